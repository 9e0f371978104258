//! Moments and covariance barriers for tilted semicircle measures.
//!
//! For the exponentially tilted semicircle
//! `mu_lambda(dx) ∝ sqrt(1-x^2) e^(lambda x) dx` on [-1, 1], with
//! `R2 = I_2(lambda)/I_1(lambda)` and `R01 = I_0(lambda)/I_1(lambda)`:
//!
//! * `E[x]   = R2`
//! * `E[x^2] = 1 - 3 I_2(lambda) / (lambda I_1(lambda))`
//! * `Cov(x, x^2) = d/dlambda E[x^2] = 3 [4 R2 - lambda (1 - R2^2)] / lambda^2`
//! * `phi(z) = z^2 (R01^2 - 1) - 4 = z [4 R2 - z (1 - R2^2)]`
//!
//! The last equality uses the recurrence `I_0 = I_2 + 2 I_1 / z` and is
//! how `phi` is evaluated: the direct form loses all precision below
//! `z ~ 0.1` (it subtracts 4 from something 4 + O(z^4)), while the
//! bracketed form only cancels like O(z^3). Two consequences follow
//! immediately and are exploited by the tests:
//!
//! * `phi(z) = z^3 Cov(x, x^2) / 3`, so positivity of the covariance
//!   for all tilts is literally positivity of `phi`;
//! * near zero, `Cov = z/16 - z^3/128 + O(z^5)`, hence
//!   `phi = z^4/48 - z^6/384 + O(z^8)`.

use crate::bessel::{ratio_i0_i1, ratio_i2_i1};
use crate::error::Error;
use crate::quad::{GaussLegendre, TiltedMeasure, DEFAULT_QUAD_POINTS};
use crate::Result;

/// Which evaluation route to use for the tilted covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Closed form in Bessel ratios (plus its Taylor series near 0).
    Analytic,
    /// Gauss-Legendre integration of the defining moments.
    Quadrature,
}

/// Below this |lambda| the Bessel-ratio forms switch to Taylor series.
const TAYLOR_SPLIT: f64 = 1e-2;

/// E[x] under the lambda-tilted semicircle: `I_2/I_1`, odd in lambda.
pub fn mean_x(lambda: f64) -> Result<f64> {
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let z = lambda.abs();
    let r2 = if z < TAYLOR_SPLIT {
        z / 4.0 - z.powi(3) / 96.0 + z.powi(5) / 1536.0
    } else {
        ratio_i2_i1(z)?
    };
    Ok(lambda.signum() * r2)
}

/// E[x^2] under the lambda-tilted semicircle, even in lambda;
/// `1 - 3 I_2 / (lambda I_1)`, with value 1/4 at lambda = 0.
pub fn mean_x2(lambda: f64) -> Result<f64> {
    let z = lambda.abs();
    if z < TAYLOR_SPLIT {
        // 3 R2/z = 3/4 - z^2/32 + ... ; E[x^2] = 1/4 + z^2/32 - z^4/512...
        return Ok(0.25 + z * z / 32.0 - z.powi(4) / 512.0);
    }
    Ok(1.0 - 3.0 * ratio_i2_i1(z)? / z)
}

/// Cov(x, x^2) under the lambda-tilted semicircle, odd in lambda.
///
/// Near zero it behaves as `lambda/16 - lambda^3/128`; for large
/// lambda as `3/lambda^2` (exactly `3(lambda - 3)/lambda^3` through
/// second order — the measure concentrates at x = 1 like a
/// Gamma(3/2, lambda) in 1 - x, whose moments give the constant 3).
pub fn cov_x_x2(lambda: f64, route: Route) -> Result<f64> {
    match route {
        Route::Analytic => {
            let z = lambda.abs();
            let c = if z < TAYLOR_SPLIT {
                z / 16.0 - z.powi(3) / 128.0
            } else {
                let r2 = ratio_i2_i1(z)?;
                3.0 * (4.0 * r2 - z * (1.0 - r2 * r2)) / (z * z)
            };
            Ok(if lambda < 0.0 { -c } else { c })
        }
        Route::Quadrature => Ok(TiltedMeasure::linear(lambda).cov(|x| x, |x| x * x)),
    }
}

/// The barrier function `phi(z) = z^2 [(I_0/I_1)^2 - 1] - 4`,
/// evaluated in the cancellation-free form `z [4 R2 - z (1 - R2^2)]`.
/// Strictly positive for every z > 0.
pub fn phi(z: f64) -> Result<f64> {
    if z <= 0.0 || z.is_nan() {
        return Err(Error::domain(format!("phi requires z > 0, got {z}")));
    }
    if z < 1e-3 {
        return Ok(z.powi(4) / 48.0 - z.powi(6) / 384.0);
    }
    let r2 = ratio_i2_i1(z)?;
    Ok(z * (4.0 * r2 - z * (1.0 - r2 * r2)))
}

/// Direct textbook form of `phi`; numerically fine only for moderate z
/// (kept for cross-checking the stable form).
pub fn phi_direct(z: f64) -> Result<f64> {
    let r01 = ratio_i0_i1(z)?;
    Ok(z * z * (r01 * r01 - 1.0) - 4.0)
}

/// Log-spaced positivity grid for `phi`: `n` points on [lo, hi].
pub fn phi_grid(n: usize, lo: f64, hi: f64) -> Result<Vec<(f64, f64)>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(Error::domain("phi grid needs 0 < lo < hi and n >= 2"));
    }
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let z = lo * (step * i as f64).exp();
            Ok((z, phi(z)?))
        })
        .collect()
}

/// Euler-factor tilted covariance
/// `alpha_p(lambda) = Cov(g_p(x), x^2)` under
/// `mu ∝ sqrt(1-x^2) (1 - 2x/sqrt(p) + 1/p)^(-lambda)`,
/// where `g_p(x) = -log(1 - 2x/sqrt(p) + 1/p)`.
pub fn euler_tilt_cov(p: u64, lambda: f64) -> Result<f64> {
    let mu = TiltedMeasure::euler(p, lambda)?;
    let t = 1.0 / (p as f64).sqrt();
    Ok(mu.cov(move |x| -(1.0 - 2.0 * t * x + t * t).ln(), |x| x * x))
}

/// Same covariance with the Euler parameter `t = 1/sqrt(p)` treated as
/// a continuous variable in (0, 1) — used to study the p -> infinity
/// scaling without a primality constraint.
pub fn euler_tilt_cov_t(t: f64, lambda: f64, points: usize) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::domain(format!("Euler parameter t must lie in (0,1), got {t}")));
    }
    let rule = GaussLegendre::cached(points);
    let g = move |x: f64| -(1.0 - 2.0 * t * x + t * t).ln();
    let w = move |x: f64| (1.0 - 2.0 * t * x + t * t).powf(-lambda);
    let raw = |f: &dyn Fn(f64) -> f64| {
        rule.integrate(0.0, std::f64::consts::PI, |theta| {
            let (s, c) = theta.sin_cos();
            s * s * w(c) * f(c)
        })
    };
    let z = raw(&|_| 1.0);
    let eg = raw(&g) / z;
    let ex2 = raw(&|x| x * x) / z;
    Ok(raw(&|x| (g(x) - eg) * (x * x - ex2)) / z)
}

/// Residual of the perfect-square identity
/// `1 + 2t^2 - 2t sqrt(1+t^2) = (sqrt(1+t^2) - t)^2` used in the
/// barrier algebra; zero for every real t up to rounding.
pub fn perfect_square_residual(t: f64) -> f64 {
    let s = (1.0 + t * t).sqrt();
    (1.0 + 2.0 * t * t - 2.0 * t * s) - (s - t) * (s - t)
}

/// Quadrature check of the mean identity `E[x] = I_2/I_1`; returns
/// (quadrature value, Bessel value).
pub fn mean_identity(lambda: f64) -> Result<(f64, f64)> {
    let q = TiltedMeasure::linear(lambda).expect(|x| x);
    Ok((q, mean_x(lambda)?))
}

/// Number of points used by the covariance quadrature route (exposed
/// for doubling checks).
pub const COV_QUAD_POINTS: usize = DEFAULT_QUAD_POINTS;

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn mean_x2_limits_and_monotonicity() {
        assert!((mean_x2(0.0).unwrap() - 0.25).abs() < 1e-14);
        // Concentration at x = 1: E[x^2] = 1 - 3/lambda + O(1/lambda^2).
        assert!(rel(mean_x2(500.0).unwrap(), 0.994017990982) < 1e-9);
        assert!(mean_x2(5000.0).unwrap() > 0.9994);
        let mut prev = mean_x2(0.0).unwrap();
        for i in 1..=60 {
            let lambda = 1e-2 * (i as f64 * 0.2).exp();
            let m = mean_x2(lambda).unwrap();
            assert!(m > prev, "mean_x2 not increasing at lambda={lambda}");
            prev = m;
        }
    }

    #[test]
    fn mean_x2_matches_dense_quadrature() {
        for lambda in [0.3, 1.0, 7.0] {
            let q = TiltedMeasure::linear(lambda)
                .with_points(10_000)
                .expect(|x| x * x);
            assert!(
                (mean_x2(lambda).unwrap() - q).abs() < 1e-10,
                "lambda={lambda}"
            );
        }
    }

    #[test]
    fn mean_identity_holds() {
        for lambda in [0.1, 1.0, 10.0] {
            let (quad, bessel) = mean_identity(lambda).unwrap();
            assert!((quad - bessel).abs() < 1e-10, "lambda={lambda}");
        }
    }

    #[test]
    fn cov_routes_agree_and_are_odd() {
        for i in 0..=40 {
            let lambda = -10.0 + 0.5 * i as f64;
            let a = cov_x_x2(lambda, Route::Analytic).unwrap();
            let q = cov_x_x2(lambda, Route::Quadrature).unwrap();
            assert!((a - q).abs() < 1e-8, "routes disagree at lambda={lambda}");
            let neg = cov_x_x2(-lambda, Route::Analytic).unwrap();
            assert_eq!(neg, -a, "odd symmetry broken at lambda={lambda}");
            if lambda > 0.0 {
                assert!(a > 0.0, "covariance not positive at lambda={lambda}");
            }
        }
        assert_eq!(cov_x_x2(0.0, Route::Analytic).unwrap(), 0.0);
        assert!(cov_x_x2(0.0, Route::Quadrature).unwrap().abs() < 1e-15);
    }

    #[test]
    fn cov_small_lambda_is_lambda_over_sixteen() {
        let c = cov_x_x2(1e-3, Route::Analytic).unwrap();
        assert!(rel(c / 1e-3, 1.0 / 16.0) < 0.01);
        // Frozen quadrature-confirmed value.
        assert!(rel(
            cov_x_x2(1.0, Route::Analytic).unwrap(),
            5.540376140082004e-2
        ) < 1e-12);
    }

    #[test]
    fn cov_large_lambda_is_three_over_lambda_squared() {
        // lambda^2 Cov -> 3 with first correction -9/lambda: the tilted
        // mass concentrates near x = 1 where 1 - x is Gamma(3/2, lambda)
        // distributed, giving Cov(x, x^2) = 3/lambda^2 - 9/lambda^3 + ...
        for lambda in [50.0, 200.0, 1000.0] {
            let c = cov_x_x2(lambda, Route::Analytic).unwrap();
            let predicted = 3.0 * (1.0 - 3.0 / lambda) / (lambda * lambda);
            assert!(rel(c, predicted) < 1e-3, "lambda={lambda}");
        }
    }

    #[test]
    fn phi_is_quartic_over_48_near_zero() {
        // phi = z^4/48 (1 - z^2/8 + O(z^4)).
        let z = 0.1;
        assert!(rel(phi(z).unwrap() * 48.0 / z.powi(4), 1.0) < 2e-3);
        let z = 1e-4;
        assert!(rel(phi(z).unwrap(), z.powi(4) / 48.0 * (1.0 - z * z / 8.0)) < 1e-12);
    }

    #[test]
    fn phi_matches_direct_form_and_is_continuous_at_seam() {
        for z in [0.05, 0.1, 1.0, 5.0, 20.0] {
            assert!(
                rel(phi(z).unwrap(), phi_direct(z).unwrap()) < 1e-7,
                "z={z}"
            );
        }
        let lo = phi(1e-3 * (1.0 - 1e-9)).unwrap();
        let hi = phi(1e-3 * (1.0 + 1e-9)).unwrap();
        assert!(rel(lo, hi) < 1e-7);
    }

    #[test]
    fn phi_golden_at_one() {
        assert!(rel(phi(1.0).unwrap(), 1.8467920466940013e-2) < 1e-12);
    }

    #[test]
    fn phi_positive_on_log_grid() {
        let grid = phi_grid(10_000, 1e-3, 1e3).unwrap();
        assert_eq!(grid.len(), 10_000);
        for (z, v) in grid {
            assert!(v > 0.0, "phi({z}) = {v} not positive");
        }
    }

    #[test]
    fn phi_rejects_bad_arguments() {
        assert!(phi(0.0).is_err());
        assert!(phi(-1.0).is_err());
        assert!(phi(f64::NAN).is_err());
        assert!(phi_grid(10, 0.0, 1.0).is_err());
        assert!(phi_grid(1, 0.1, 1.0).is_err());
    }

    #[test]
    fn perfect_square_identity_is_exact() {
        for i in 0..=100 {
            let t = 0.1 * i as f64;
            let r = perfect_square_residual(t);
            assert!(r.abs() < 4e-13 * (1.0 + t * t), "t={t}: residual {r}");
        }
    }

    #[test]
    fn euler_tilt_at_zero_lambda_has_closed_form() {
        // At lambda = 0 the covariance is a two-term Chebyshev sum:
        // expanding -log(1 - 2tx + t^2) = sum_k (t^k/k)(U_k - U_{k-2})
        // against x^2 = (U_2 + U_0)/4 and using E[U_m U_n] = delta_mn
        // under the semicircle gives exactly t^2/8 - t^4/16, i.e.
        // (2p - 1)/(16 p^2). In particular it is positive for every p.
        for p in [2u64, 3, 5, 7, 97, 1009] {
            let exact = (2.0 * p as f64 - 1.0) / (16.0 * (p as f64).powi(2));
            assert!(rel(euler_tilt_cov(p, 0.0).unwrap(), exact) < 1e-12, "p={p}");
        }
    }

    #[test]
    fn euler_tilt_positive_on_sign_table() {
        for &p in &crate::primes::primes_upto(97) {
            for lambda in [0.25, 0.5, 1.0, 2.0, 4.0] {
                let a = euler_tilt_cov(p, lambda).unwrap();
                assert!(a > 0.0, "alpha_{p}({lambda}) = {a} not positive");
            }
        }
    }

    #[test]
    fn euler_tilt_goldens() {
        assert!(rel(euler_tilt_cov(3, 1.0).unwrap(), 1.3351422822811593e-1) < 1e-10);
        assert!(rel(euler_tilt_cov(97, 4.0).unwrap(), 1.1097389442396487e-2) < 1e-10);
    }

    #[test]
    fn euler_tilt_small_t_law() {
        // -log h = 2tx + (2x^2 - 1) t^2 + O(t^3), so
        // alpha = 2t Cov(x, x^2) + 2t^2 Var(x^2) + O(t^3)
        //       = (2 lambda + 1) t^2 / 8 + O(t^3)
        // (the first term is O(t^2) because the effective linear tilt of
        // the measure is itself 2 lambda t).
        for lambda in [0.5, 1.0, 2.0] {
            let a = euler_tilt_cov(100_003, lambda).unwrap();
            let law = (2.0 * lambda + 1.0) / (8.0 * 100_003.0);
            assert!(rel(a, law) < 1e-3, "lambda={lambda}");
        }
        let t = 1e-3;
        let a = euler_tilt_cov_t(t, 1.0, 2048).unwrap();
        assert!(rel(a, 3.0 * t * t / 8.0) < 1e-3);
    }

    #[test]
    fn euler_tilt_t_rejects_bad_parameters() {
        assert!(euler_tilt_cov_t(0.0, 1.0, 64).is_err());
        assert!(euler_tilt_cov_t(1.0, 1.0, 64).is_err());
        assert!(euler_tilt_cov_t(-0.3, 1.0, 64).is_err());
    }

    #[test]
    fn taylor_seams_are_continuous() {
        type Check = (&'static str, fn(f64) -> f64);
        let checks: [Check; 3] = [
            ("mean_x", |z| mean_x(z).unwrap()),
            ("mean_x2", |z| mean_x2(z).unwrap()),
            ("cov", |z| cov_x_x2(z, Route::Analytic).unwrap()),
        ];
        for (name, f) in checks {
            let lo = f(TAYLOR_SPLIT * (1.0 - 1e-9));
            let hi = f(TAYLOR_SPLIT * (1.0 + 1e-9));
            assert!(rel(lo, hi) < 1e-8, "{name} seam: {lo} vs {hi}");
        }
    }
}
