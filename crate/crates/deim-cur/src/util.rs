//! Crate-internal helpers for dispatching data-parallel loops.
//!
//! Every parallel loop in this crate maps independent indices to
//! independently computed outputs collected in index order, so results are
//! bitwise identical with and without the `parallel` feature.

/// Work threshold (in rough flop units) below which spawning is not worth it.
pub(crate) const PAR_MIN_WORK: usize = 250_000;

#[cfg(feature = "parallel")]
pub(crate) fn indexed_map<T, F>(n: usize, work_hint: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if work_hint >= PAR_MIN_WORK && n > 1 {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn indexed_map<T, F>(n: usize, _work_hint: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Deterministic splitmix64 stream, used where a fixed arbitrary-looking
/// vector is needed without pulling in an RNG (e.g. power iteration start).
pub(crate) fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform value in [0, 1) from a splitmix64 draw.
pub(crate) fn unit_f64(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
