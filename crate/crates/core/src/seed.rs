//! Deterministic sub-seed derivation.
//!
//! Every random draw in a simulation is keyed by `(master seed, trial, cell,
//! role, extra)` and fed through a SplitMix64 finalizer chain. A trial can
//! therefore be regenerated on its own, in any order and on any thread, and
//! produce the same bits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a random stream is used for. The discriminant is part of the key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Role {
    Trial = 0x01,
    Desired = 0x02,
    Interfering = 0x03,
    DesiredCodebook = 0x04,
    InterferingCodebook = 0x05,
    Alpha = 0x06,
    Oracle = 0x07,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds `parts` into `seed` one word at a time.
pub fn mix(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Seed of trial `index` under `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    mix(master, &[Role::Trial as u64, index])
}

/// Seed of one per-cell stream inside a trial.
pub fn cell_seed(trial: u64, cell: usize, role: Role) -> u64 {
    mix(trial, &[cell as u64, role as u64])
}

/// Seed of a codebook: the stream also depends on its size so that codebooks
/// of different sizes in the same trial are independent.
pub fn codebook_seed(trial: u64, cell: usize, role: Role, bits: u32) -> u64 {
    mix(trial, &[cell as u64, role as u64, u64::from(bits)])
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
