//! Sampling Satake angles from the Sato-Tate measure.
//!
//! The measure is `(2/pi) sin^2(theta) dtheta` on [0, pi], with
//! closed-form CDF `F(theta) = (theta - sin(theta) cos(theta)) / pi`.
//! Draws use inverse-CDF lookup on a precomputed 1e5-knot table of
//! F^{-1}, followed by Newton polish; near the endpoints, where
//! F' = (2/pi) sin^2(theta) vanishes, the cube-root asymptotic
//! `F ~ 2 theta^3 / (3 pi)` seeds the iteration instead.

use rand::Rng;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// CDF of the Sato-Tate measure on [0, pi].
pub fn st_cdf(theta: f64) -> f64 {
    ((theta - theta.sin() * theta.cos()) / PI).clamp(0.0, 1.0)
}

/// Density of the Sato-Tate measure on [0, pi].
pub fn st_density(theta: f64) -> f64 {
    2.0 / PI * theta.sin().powi(2)
}

const KNOTS: usize = 100_000;
/// Below this quantile (and above 1 minus it) the cube-root asymptotic
/// of the inverse CDF replaces table interpolation.
const EDGE: f64 = 1e-4;

fn inverse_table() -> &'static Vec<f64> {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(KNOTS + 1);
        let mut theta = 0.0f64;
        for i in 0..=KNOTS {
            let u = i as f64 / KNOTS as f64;
            theta = polish(if i == 0 { 0.0 } else { theta }, u, 50);
            table.push(theta);
        }
        table[KNOTS] = PI;
        table
    })
}

/// Newton iterations for F(theta) = u, falling back to bisection steps
/// when the derivative is too small to be trusted.
fn polish(start: f64, u: f64, iters: usize) -> f64 {
    let mut theta = if start <= 0.0 && u > 0.0 {
        (1.5 * PI * u).cbrt()
    } else {
        start
    };
    for _ in 0..iters {
        let f = st_cdf(theta) - u;
        let d = st_density(theta);
        if d < 1e-12 {
            break;
        }
        let step = f / d;
        theta = (theta - step).clamp(0.0, PI);
        if step.abs() < 1e-15 {
            break;
        }
    }
    theta
}

/// Quantile function of the Sato-Tate measure: the unique theta in
/// [0, pi] with F(theta) = u.
pub fn st_quantile(u: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&u));
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return PI;
    }
    if u < EDGE {
        // F(theta) = 2 theta^3/(3 pi) (1 - theta^2/5 + O(theta^4))
        let t = (1.5 * PI * u).cbrt();
        return polish(t * (1.0 + t * t / 15.0), u, 8);
    }
    if u > 1.0 - EDGE {
        return PI - st_quantile(1.0 - u);
    }
    let table = inverse_table();
    let x = u * KNOTS as f64;
    let i = (x as usize).min(KNOTS - 1);
    let frac = x - i as f64;
    let guess = table[i] + frac * (table[i + 1] - table[i]);
    polish(guess, u, 4)
}

/// Draws one Satake angle from the Sato-Tate measure.
pub fn sample_theta<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    st_quantile(rng.gen::<f64>())
}

/// Two-sided Kolmogorov-Smirnov distance between a sample and a
/// continuous CDF. Sorts a copy of the sample.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}
