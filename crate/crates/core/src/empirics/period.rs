//! Real period of an integral Weierstrass model.
//!
//! The period of the invariant differential dx/(2y + a1x + a3) over the
//! full real locus is computed from the roots of the associated cubic
//! g(x) = 4x³ + b2x² + 2b4x + b6 via the arithmetic–geometric mean:
//!
//! * Δ > 0 (three real roots e1 > e2 > e3, two real components):
//!   Ω = 2π / AGM(√(e1−e3), √(e1−e2));
//! * Δ < 0 (one real root e1, complex pair z, z̄, one component):
//!   Ω = π / AGM(√B, √((A+B)/2)) with A = e1 − Re z, B = |e1 − z|.
//!
//! Both reduce to Gauss's identity ∫₀^∞ dt/√((t²+a²)(t²+b²)) =
//! π/(2·AGM(a, b)) after the substitution x = e1 + t² (the second via
//! one complex AGM step made real). Roots come from the closed-form
//! cubic solution polished by Newton iteration.

use super::wmodel::{invariants, AInvs};
use crate::error::Error;
use crate::Result;

/// Arithmetic–geometric mean of two positive numbers.
fn agm(mut a: f64, mut b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    for _ in 0..64 {
        let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
        if (an - bn).abs() <= 1e-16 * an {
            return 0.5 * (an + bn);
        }
        a = an;
        b = bn;
    }
    0.5 * (a + b)
}

fn newton_polish(c2: f64, c1: f64, c0: f64, mut x: f64) -> f64 {
    // Monic cubic x³ + c2x² + c1x + c0.
    for _ in 0..60 {
        let f = ((x + c2) * x + c1) * x + c0;
        let df = (3.0 * x + 2.0 * c2) * x + c1;
        if df == 0.0 {
            // Seed sat on a critical point; nudge off it rather than
            // accept a non-root.
            x += 1e-7 * (1.0 + x.abs());
            continue;
        }
        let step = f / df;
        x -= step;
        if step.abs() <= 1e-16 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Roots of the monic cubic x³ + c2x² + c1x + c0 with all-real (`true`)
/// or one-real (`false`) root structure decided by the caller.
fn real_roots(c2: f64, c1: f64, c0: f64, three_real: bool) -> Vec<f64> {
    // Depress: x = t − c2/3 ⇒ t³ + pt + q with p = c1 − 3s²,
    // q = 2s³ − c1·s + c0 for s = c2/3.
    let s = c2 / 3.0;
    let p = c1 - 3.0 * s * s;
    let q = 2.0 * s * s * s - c1 * s + c0;
    let mut roots = if three_real {
        // Trigonometric form (casus irreducibilis): p < 0 here.
        let m = 2.0 * (-p / 3.0).max(0.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * f64::from(k) / 3.0).cos() - s)
            .collect::<Vec<_>>()
    } else {
        // Cardano: one real root.
        let d = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        let u = (-q / 2.0 + d).cbrt();
        let v = (-q / 2.0 - d).cbrt();
        vec![u + v - s]
    };
    for r in &mut roots {
        *r = newton_polish(c2, c1, c0, *r);
    }
    roots.sort_by(|x, y| y.partial_cmp(x).unwrap());
    roots
}

/// Real period Ω of the model's invariant differential over the whole
/// real locus (both components when Δ > 0).
pub fn real_period(a: &AInvs) -> Result<f64> {
    let inv = invariants(a)?;
    if inv.disc == 0 {
        return Err(Error::domain("real_period: singular model (Δ = 0)"));
    }
    // Monic form of g/4: x³ + (b2/4)x² + (b4/2)x + b6/4.
    let c2 = inv.b2 as f64 / 4.0;
    let c1 = inv.b4 as f64 / 2.0;
    let c0 = inv.b6 as f64 / 4.0;
    if inv.disc > 0 {
        let r = real_roots(c2, c1, c0, true);
        let (e1, e2, e3) = (r[0], r[1], r[2]);
        if !(e1 > e2 && e2 > e3) {
            return Err(Error::data_bug(format!(
                "real_period: root finder returned non-separated roots {r:?} for {a:?}"
            )));
        }
        Ok(2.0 * std::f64::consts::PI / agm((e1 - e3).sqrt(), (e1 - e2).sqrt()))
    } else {
        let r = real_roots(c2, c1, c0, false);
        let e1 = r[0];
        // Deflate: remaining quadratic x² + q1x + q0.
        let q1 = c2 + e1;
        let q0 = c1 + e1 * q1;
        let a_re = e1 + q1 / 2.0; // e1 − Re z
        let b_abs = (e1 * e1 + q1 * e1 + q0).sqrt(); // |e1 − z|
        Ok(std::f64::consts::PI / agm(b_abs.sqrt(), (0.5 * (a_re + b_abs)).sqrt()))
    }
}
