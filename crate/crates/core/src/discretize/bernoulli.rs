/// Bernoulli function `B(x) = x / (eˣ − 1)`, the exponential-fitting weight.
///
/// Uses a Taylor expansion near the removable singularity at 0. For large
/// positive `x` the quotient underflows to 0, for large negative `x` it tends
/// to `-x`; both limits fall out of `expm1` without special casing.
pub fn bernoulli(x: f64) -> f64 {
    if x.abs() <= 1e-5 {
        let x2 = x * x;
        1.0 - 0.5 * x + x2 / 12.0 - x2 * x2 / 720.0
    } else {
        x / x.exp_m1()
    }
}
