//! Small shared numeric helpers.

/// Ceiling that forgives float noise just below an integer: values within
/// 1e−9 of an integer round to it instead of up. A plain `ceil` would turn
/// e.g. `11.0 / 0.1 = 110.00000000000001` into 111.
pub(crate) fn fuzzy_ceil(t: f64) -> u64 {
    debug_assert!(t >= 0.0 && t.is_finite());
    let rounded = t.round();
    if t - rounded > 1e-9 {
        rounded as u64 + 1
    } else {
        rounded as u64
    }
}
