use wyner_core::experiments::{self, run_samples, Execution, ExperimentSpec, FigureId};
use wyner_core::Error;

#[test]
fn short_run_is_a_prefix_of_a_long_run() {
    let short = ExperimentSpec::default_for(FigureId::CompareStrategies)
        .with_trials(100)
        .with_seed(9);
    let long = short.clone().with_trials(1000);
    let a = run_samples(&short, Execution::Serial).unwrap();
    let b = run_samples(&long, Execution::Parallel).unwrap();
    assert_eq!(a.slots, b.slots);
    assert_eq!(a.per_trial[..], b.per_trial[..100]);
    let sums = |s: &experiments::Samples| -> Vec<f64> {
        (0..s.slots.len())
            .map(|i| s.per_trial[..100].iter().map(|t| t[i]).sum())
            .collect()
    };
    assert_eq!(sums(&a), sums(&b));
}

#[test]
fn seeds_change_results() {
    let spec = ExperimentSpec::default_for(FigureId::SumRateVsK).with_trials(100);
    let a = experiments::run(&spec.clone().with_seed(1)).unwrap();
    let b = experiments::run(&spec.with_seed(2)).unwrap();
    assert_ne!(a, b);
}

#[test]
fn stderr_is_sample_std_over_root_n() {
    let spec = ExperimentSpec::default_for(FigureId::SumRateVsK).with_trials(150);
    let samples = run_samples(&spec, Execution::Serial).unwrap();
    let table = experiments::run(&spec).unwrap();
    for (i, slot) in samples.slots.iter().enumerate() {
        let xs: Vec<f64> = samples.per_trial.iter().map(|t| t[i]).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let row = table.get(&slot.point, &slot.metric).unwrap();
        assert!((row.mean - mean).abs() < 1e-12 * mean.abs().max(1.0));
        assert!((row.stderr - sd / n.sqrt()).abs() < 1e-12);
        assert_eq!(row.trials, 150);
    }
}

#[test]
fn invalid_specs_are_rejected_with_hints() {
    let base = ExperimentSpec::default_for(FigureId::CompareStrategies);
    let cases = [
        base.clone().with_trials(99),
        ExperimentSpec {
            sweep: wyner_core::experiments::Sweep {
                b_tot: vec![5],
                ..base.sweep.clone()
            },
            ..base.clone()
        },
        ExperimentSpec {
            sweep: wyner_core::experiments::Sweep {
                alpha: vec![],
                ..base.sweep.clone()
            },
            ..base.clone()
        },
        ExperimentSpec {
            sweep: wyner_core::experiments::Sweep {
                alpha: vec![2.0],
                ..base.sweep.clone()
            },
            ..base.clone()
        },
        ExperimentSpec {
            sweep: wyner_core::experiments::Sweep {
                antennas: 9,
                ..base.sweep.clone()
            },
            ..base.clone()
        },
    ];
    for spec in cases {
        match experiments::run(&spec) {
            Err(Error::InvalidSpec { hint, .. }) => assert!(!hint.is_empty()),
            other => panic!("expected InvalidSpec, got {other:?}"),
        }
    }
    let odd = ExperimentSpec {
        sweep: wyner_core::experiments::Sweep {
            b_tot: vec![7],
            ..base.sweep.clone()
        },
        ..base
    };
    let Err(Error::InvalidSpec { message, .. }) = odd.validate() else {
        panic!()
    };
    assert!(message.contains("btot"));
}

#[test]
fn loss_table_has_the_wide_header() {
    let spec = ExperimentSpec::default_for(FigureId::MeanLossVsBd).with_trials(100);
    let csv = experiments::to_csv(&experiments::run(&spec).unwrap());
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("B_d,alpha,mean_loss_bits,stderr,bound_bits")
    );
    assert_eq!(lines.count(), spec.sweep.b_d.len() * spec.sweep.alpha.len());
    assert!(!csv.contains('\r'));
}

#[test]
fn split_table_reproduces_the_golden_splits() {
    let spec = ExperimentSpec::default_for(FigureId::SplitVsAlpha).with_trials(100);
    let table = experiments::run(&spec).unwrap();
    assert_eq!(table.get(&[0.0], "b_d_opt").unwrap().mean, 2.0);
    assert_eq!(table.get(&[0.0], "b_i_opt").unwrap().mean, 6.0);
    assert_eq!(table.get(&[-40.0], "b_d_opt").unwrap().mean, 8.0);
    let b_d: Vec<f64> = table.metric("b_d_opt").map(|r| r.mean).collect();
    assert!(
        b_d.windows(2).all(|w| w[1] <= w[0]),
        "alpha grid runs from -40 dB upward"
    );
}

#[test]
fn every_figure_reports_finite_rows() {
    for figure in FigureId::ALL {
        let mut spec = ExperimentSpec::default_for(figure).with_trials(100);
        if figure == FigureId::AsymmetricCells {
            spec.sweep.cells = vec![12];
        }
        let table = experiments::run(&spec).unwrap();
        assert!(!table.rows.is_empty());
        assert!(table
            .rows
            .iter()
            .all(|r| r.mean.is_finite() && r.stderr.is_finite()));
        assert!(table
            .rows
            .iter()
            .all(|r| r.point.len() == table.columns.len()));
    }
}
