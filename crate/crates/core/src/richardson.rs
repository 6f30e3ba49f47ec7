//! Observed convergence order from errors on successively halved spacings.

/// `log2(e_coarse / e_fine)` for a refinement ratio of two.
pub fn observed_order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}

/// Orders between consecutive entries of an error sequence on `h, h/2, ...`.
pub fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| observed_order(w[0], w[1])).collect()
}

/// Order estimated from three solutions on `h, h/2, h/4` without a reference:
/// `log2(|q_h - q_{h/2}| / |q_{h/2} - q_{h/4}|)`.
pub fn self_convergence_order(q_h: f64, q_h2: f64, q_h4: f64) -> f64 {
    ((q_h - q_h2).abs() / (q_h2 - q_h4).abs()).log2()
}

/// Leading coefficient `kappa` of an error model `kappa h^p` from the
/// difference between results at `2h` and `h`.
pub fn leading_coefficient(diff_2h_h: f64, h: f64, p: f64) -> f64 {
    diff_2h_h.abs() / ((2.0_f64.powf(p) - 1.0) * h.powf(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_order_sequence() {
        let errs: Vec<f64> = [0.1, 0.05, 0.025].iter().map(|h| 3.0 * h * h).collect();
        for p in observed_orders(&errs) {
            assert!((p - 2.0).abs() < 1e-12);
        }
        let q = |h: f64| 1.0 + 0.7 * h * h;
        assert!((self_convergence_order(q(0.1), q(0.05), q(0.025)) - 2.0).abs() < 1e-9);
        assert!((leading_coefficient(q(0.1) - q(0.05), 0.05, 2.0) - 0.7).abs() < 1e-12);
    }
}
