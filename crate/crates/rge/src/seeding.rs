//! Deterministic seed derivation for independent PRNG streams.

/// SplitMix64 finalizer.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Folds a list of stream coordinates into one seed; any change to any
/// coordinate yields an unrelated stream.
pub(crate) fn derive_seed(parts: &[u64]) -> u64 {
    let mut state = 0x243f6a8885a308d3u64;
    for (i, &p) in parts.iter().enumerate() {
        state = mix(state ^ mix(p.wrapping_add(i as u64)));
    }
    state
}
