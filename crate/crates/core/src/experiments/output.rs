use serde::Serialize;

use super::{FigureId, ResultTable};

/// CSV text of a table: one row per (point, metric) with columns
/// `<point columns>,metric,mean,stderr,trials`. The loss experiment uses a
/// wide layout with one row per point:
/// `B_d,alpha,mean_loss_bits,stderr,bound_bits`.
pub fn to_csv(table: &ResultTable) -> String {
    let mut out = String::new();
    if table.figure == FigureId::MeanLossVsBd {
        out.push_str("B_d,alpha,mean_loss_bits,stderr,bound_bits\n");
        for row in table.metric("mean_loss") {
            let bound = table.get(&row.point, "bound").map_or(f64::NAN, |b| b.mean);
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                row.point[0], row.point[1], row.mean, row.stderr, bound
            ));
        }
        return out;
    }
    out.push_str(&table.columns.join(","));
    out.push_str(",metric,mean,stderr,trials\n");
    for row in &table.rows {
        for x in &row.point {
            out.push_str(&format!("{x},"));
        }
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.metric, row.mean, row.stderr, row.trials
        ));
    }
    out
}

#[derive(Serialize)]
struct JsonDoc<'a, M: Serialize> {
    metadata: &'a M,
    columns: &'a [String],
    rows: Vec<JsonRow<'a>>,
}

#[derive(Serialize)]
struct JsonRow<'a> {
    point: serde_json::Map<String, serde_json::Value>,
    metric: &'a str,
    mean: f64,
    stderr: f64,
    trials: usize,
}

/// Pretty JSON with the caller's `metadata` object and the table rows,
/// each point given as a column-name map.
pub fn to_json<M: Serialize>(table: &ResultTable, metadata: &M) -> String {
    let rows = table
        .rows
        .iter()
        .map(|r| JsonRow {
            point: table
                .columns
                .iter()
                .zip(&r.point)
                .map(|(c, &x)| (c.clone(), serde_json::json!(x)))
                .collect(),
            metric: &r.metric,
            mean: r.mean,
            stderr: r.stderr,
            trials: r.trials,
        })
        .collect();
    let doc = JsonDoc {
        metadata,
        columns: &table.columns,
        rows,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("tables hold only finite numbers");
    text.push('\n');
    text
}
