//! Cancellation-free evaluation of the exponential kernels behind Ψ.
//!
//! Both helpers have a removable singularity at `u = 0`. Near zero they are
//! summed from their Taylor series; elsewhere they are written in terms of
//! `expm1` so that no difference of nearly equal quantities is formed.

/// `(e^u - 1) / u`, continuous at `u = 0` with value 1.
///
/// `∫₀^c e^{m t} dt = c · exprel(m c)`.
pub fn exprel(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else if u.abs() < 1e-5 {
        // 1 + u/2 + u²/6 is exact to f64 precision here.
        1.0 + u * (0.5 + u / 6.0)
    } else {
        u.exp_m1() / u
    }
}

/// `(e^u (u - 1) + 1) / u²`, continuous at `u = 0` with value 1/2.
///
/// `∫₀^c t e^{k t} dt = c² · exprel2(k c)`.
pub fn exprel2(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        // Σ_{m≥2} (m-1) u^{m-2} / m!
        let mut term: f64 = 0.5;
        let mut sum: f64 = 0.5;
        let mut m = 2.0_f64;
        while term.abs() > f64::EPSILON * 0.25 * sum.abs() && m < 60.0 {
            term *= u * m / ((m - 1.0) * (m + 1.0));
            sum += term;
            m += 1.0;
        }
        sum
    } else {
        (u * u.exp() - u.exp_m1()) / (u * u)
    }
}
