//! Integral Weierstrass models over Q: invariants, coordinate changes,
//! and finite-field point counts.
//!
//! A model is the coefficient vector `[a1, a2, a3, a4, a6]` of
//! `y^2 + a1·xy + a3·y = x^3 + a2·x^2 + a4·x + a6`. All invariant
//! arithmetic is done in `i128` with overflow checks, so pathological
//! inputs fail loudly instead of wrapping.

use crate::error::Error;
use crate::Result;

/// Coefficients `[a1, a2, a3, a4, a6]` of an integral Weierstrass model.
pub type AInvs = [i64; 5];

/// The classical b-, c- and discriminant invariants of a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Invariants {
    pub b2: i128,
    pub b4: i128,
    pub b6: i128,
    pub b8: i128,
    pub c4: i128,
    pub c6: i128,
    pub disc: i128,
}

fn ck_mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b)
        .ok_or_else(|| Error::validation("overflow in Weierstrass invariant arithmetic"))
}

fn ck_add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b)
        .ok_or_else(|| Error::validation("overflow in Weierstrass invariant arithmetic"))
}

/// Compute b2, b4, b6, b8, c4, c6 and the discriminant.
///
/// The identities `4·b8 = b2·b6 − b4²` and `1728·Δ = c4³ − c6²` are
/// asserted; a failure would indicate integer overflow slipping through
/// or a broken formula, so it is escalated as a fatal consistency error.
pub fn invariants(a: &AInvs) -> Result<Invariants> {
    invariants_i128(&a.map(i128::from))
}

/// [`invariants`] on a wide model, as produced mid-walk by
/// [`transform_rst`].
pub fn invariants_i128(a: &[i128; 5]) -> Result<Invariants> {
    let [a1, a2, a3, a4, a6] = *a;
    let b2 = ck_add(ck_mul(a1, a1)?, ck_mul(4, a2)?)?;
    let b4 = ck_add(ck_mul(2, a4)?, ck_mul(a1, a3)?)?;
    let b6 = ck_add(ck_mul(a3, a3)?, ck_mul(4, a6)?)?;
    let b8 = {
        let t1 = ck_mul(ck_mul(a1, a1)?, a6)?;
        let t2 = ck_mul(ck_mul(4, a2)?, a6)?;
        let t3 = ck_mul(ck_mul(a1, a3)?, a4)?;
        let t4 = ck_mul(a2, ck_mul(a3, a3)?)?;
        let t5 = ck_mul(a4, a4)?;
        ck_add(ck_add(ck_add(t1, t2)?, ck_add(t4, -t3)?)?, -t5)?
    };
    let c4 = ck_add(ck_mul(b2, b2)?, ck_mul(-24, b4)?)?;
    let c6 = {
        let t1 = ck_mul(ck_mul(b2, b2)?, b2)?;
        let t2 = ck_mul(36, ck_mul(b2, b4)?)?;
        ck_add(ck_add(-t1, t2)?, ck_mul(-216, b6)?)?
    };
    let disc = {
        let t1 = ck_mul(ck_mul(b2, b2)?, b8)?;
        let t2 = ck_mul(8, ck_mul(ck_mul(b4, b4)?, b4)?)?;
        let t3 = ck_mul(27, ck_mul(b6, b6)?)?;
        let t4 = ck_mul(9, ck_mul(ck_mul(b2, b4)?, b6)?)?;
        ck_add(ck_add(-t1, -t2)?, ck_add(-t3, t4)?)?
    };
    let four_b8 = ck_mul(4, b8)?;
    let check = ck_add(ck_mul(b2, b6)?, -ck_mul(b4, b4)?)?;
    if four_b8 != check {
        return Err(Error::data_bug(format!(
            "b-invariant identity 4·b8 = b2·b6 − b4² failed for {a:?}"
        )));
    }
    let c_check = ck_add(ck_mul(ck_mul(c4, c4)?, c4)?, -ck_mul(c6, c6)?)?;
    if c_check != ck_mul(1728, disc)? {
        return Err(Error::data_bug(format!(
            "c-invariant identity 1728·Δ = c4³ − c6² failed for {a:?}"
        )));
    }
    Ok(Invariants {
        b2,
        b4,
        b6,
        b8,
        c4,
        c6,
        disc,
    })
}

/// Apply the coordinate change `x = u²x' + r`, `y = u³y' + su²x' + t`
/// (here with `u = 1`), returning the transformed coefficients.
///
/// Used by the local-reduction walk to translate singular points and to
/// straighten tangent directions; `u = 1` keeps the model integral.
pub fn transform_rst(a: &[i128; 5], r: i128, s: i128, t: i128) -> Result<[i128; 5]> {
    let [a1, a2, a3, a4, a6] = *a;
    let a1n = ck_add(a1, ck_mul(2, s)?)?;
    let a2n = ck_add(ck_add(a2, -ck_mul(s, a1)?)?, ck_add(ck_mul(3, r)?, -ck_mul(s, s)?)?)?;
    let a3n = ck_add(a3, ck_add(ck_mul(r, a1)?, ck_mul(2, t)?)?)?;
    let a4n = {
        let t1 = ck_mul(s, a3)?;
        let t2 = ck_mul(ck_mul(2, r)?, a2)?;
        let t3 = ck_mul(ck_add(t, ck_mul(r, s)?)?, a1)?;
        let t4 = ck_mul(ck_mul(3, r)?, r)?;
        let t5 = ck_mul(ck_mul(2, s)?, t)?;
        ck_add(ck_add(ck_add(a4, -t1)?, ck_add(t2, -t3)?)?, ck_add(t4, -t5)?)?
    };
    let a6n = {
        let t1 = ck_mul(r, a4)?;
        let t2 = ck_mul(ck_mul(r, r)?, a2)?;
        let t3 = ck_mul(ck_mul(r, r)?, r)?;
        let t4 = ck_mul(t, a3)?;
        let t5 = ck_mul(t, t)?;
        let t6 = ck_mul(ck_mul(r, t)?, a1)?;
        ck_add(ck_add(ck_add(a6, t1)?, ck_add(t2, t3)?)?, ck_add(-ck_add(t4, t5)?, -t6)?)?
    };
    Ok([a1n, a2n, a3n, a4n, a6n])
}

/// Rescale by `u` (divides `a_i` by `u^i`); errors when non-integral.
pub fn rescale_down(a: &[i128; 5], u: i128) -> Result<[i128; 5]> {
    let pows = [u, u * u, u * u * u, u * u * u * u, u * u * u * u * u * u];
    let mut out = [0i128; 5];
    for (i, (&ai, &ui)) in a.iter().zip(pows.iter()).enumerate() {
        if ai % ui != 0 {
            return Err(Error::data_bug(format!(
                "rescale by u = {u} requested on a model where a[{i}] = {ai} is not divisible"
            )));
        }
        out[i] = ai / ui;
    }
    Ok(out)
}

/// Quadratic-residue table mod an odd prime: `tab[x] = χ(x) ∈ {−1,0,+1}`.
#[derive(Debug, Clone)]
pub struct QrTable {
    pub p: u32,
    tab: Vec<i8>,
}

impl QrTable {
    pub fn new(p: u32) -> Self {
        debug_assert!(p >= 3, "QR tables are for odd primes");
        let mut tab = vec![-1i8; p as usize];
        tab[0] = 0;
        for x in 1..u64::from(p) {
            tab[(x * x % u64::from(p)) as usize] = 1;
        }
        QrTable { p, tab }
    }

    #[inline]
    pub fn chi(&self, x: u32) -> i8 {
        self.tab[x as usize]
    }
}

/// Trace of Frobenius at a good odd prime, given a prebuilt QR table:
/// `a_p = −Σ_x χ(4x³ + b2x² + 2b4x + b6)`, by finite-difference stepping.
fn ap_good_odd(inv: &Invariants, qr: &QrTable) -> i64 {
    let p = i64::from(qr.p);
    let m = |v: i128| -> i64 { (v.rem_euclid(i128::from(p))) as i64 };
    // g(x) = 4x^3 + b2 x^2 + 2 b4 x + b6; third difference of the cubic is 24.
    let (b2, b4, b6) = (m(inv.b2), m(inv.b4), m(inv.b6));
    let g = |x: i64| -> i64 { (4 * x * x * x + b2 * x * x + 2 * b4 * x + b6).rem_euclid(p) };
    let mut g0 = g(0);
    let mut d1 = (g(1) - g(0)).rem_euclid(p);
    let mut d2 = (g(2) - 2 * g(1) + g(0)).rem_euclid(p);
    let d3 = 24 % p;
    let mut sum: i64 = 0;
    for _ in 0..p {
        sum += i64::from(qr.chi(g0 as u32));
        g0 += d1;
        if g0 >= p {
            g0 -= p;
        }
        d1 += d2;
        if d1 >= p {
            d1 -= p;
        }
        d2 += d3;
        if d2 >= p {
            d2 -= p;
        }
    }
    -sum
}

/// Trace of Frobenius at a good prime `p ≤ 10⁴` by naive counting,
/// `a_p = p + 1 − #E(F_p)`.
///
/// Errors when `p` is not prime, `p > 10⁴`, or the model has bad
/// reduction at `p` (the caller is expected to have checked `p ∤ Δ`;
/// the error makes a missed check loud).
pub fn ap_count(a: &AInvs, p: u32) -> Result<i64> {
    if !crate::primes::is_prime(u64::from(p)) {
        return Err(Error::domain(format!("ap_count: {p} is not prime")));
    }
    if p > 10_000 {
        return Err(Error::domain(format!(
            "ap_count: p = {p} exceeds the naive-count bound 10⁴"
        )));
    }
    let inv = invariants(a)?;
    if inv.disc.rem_euclid(i128::from(p)) == 0 {
        return Err(Error::domain(format!(
            "ap_count: bad reduction at p = {p} (p divides the discriminant)"
        )));
    }
    if p == 2 {
        return Ok(3 - i64::from(affine_points_f2(a)) - 1);
    }
    let qr = QrTable::new(p);
    let ap = ap_good_odd(&inv, &qr);
    debug_assert!((ap * ap) as f64 <= 4.0 * f64::from(p) + 1e-9);
    Ok(ap)
}

/// Same as [`ap_count`] for odd `p`, but skipping validation and reusing
/// caller-held invariants and QR table (bulk sweeps over many curves).
pub fn ap_good_with_table(inv: &Invariants, qr: &QrTable) -> i64 {
    ap_good_odd(inv, qr)
}

fn affine_points_f2(a: &AInvs) -> u32 {
    let [a1, a2, a3, a4, a6] = a.map(|v| v.rem_euclid(2));
    let mut n = 0;
    for x in 0..2i64 {
        for y in 0..2i64 {
            let lhs = y * y + a1 * x * y + a3 * y;
            let rhs = x * x * x + a2 * x * x + a4 * x + a6;
            if (lhs - rhs).rem_euclid(2) == 0 {
                n += 1;
            }
        }
    }
    n
}

/// Trace at a bad prime of a (locally) minimal model, via the count of
/// nonsingular points: `a_p = p − #E_ns(F_p)`.
///
/// Split multiplicative reduction gives `+1`, nonsplit `−1`, additive
/// `0`. This is a pure point count and therefore serves as an
/// independent cross-check on the local-reduction walk.
pub fn ap_bad(a: &AInvs, p: u32) -> Result<i64> {
    let inv = invariants(a)?;
    if inv.disc.rem_euclid(i128::from(p)) != 0 {
        return Err(Error::domain(format!(
            "ap_bad: good reduction at p = {p}; use ap_count"
        )));
    }
    if p == 2 {
        let [a1, a2, a3, a4, a6] = a.map(|v| v.rem_euclid(2));
        let mut n = 0;
        for x in 0..2i64 {
            for y in 0..2i64 {
                let on = (y * y + a1 * x * y + a3 * y - (x * x * x + a2 * x * x + a4 * x + a6))
                    .rem_euclid(2)
                    == 0;
                if !on {
                    continue;
                }
                // Singular iff both partials vanish mod 2.
                let fx = (a1 * y - (3 * x * x + 2 * a2 * x + a4)).rem_euclid(2) == 0;
                let fy = (2 * y + a1 * x + a3).rem_euclid(2) == 0;
                if !(fx && fy) {
                    n += 1;
                }
            }
        }
        return Ok(2 - (n + 1));
    }
    let pi = i64::from(p);
    let m = |v: i128| -> i64 { (v.rem_euclid(i128::from(p))) as i64 };
    let (b2, b4, b6) = (m(inv.b2), m(inv.b4), m(inv.b6));
    let qr = QrTable::new(p);
    let g = |x: i64| -> i64 {
        ((4 * x % pi * x % pi * x + b2 * x % pi * x + 2 * b4 * x + b6) % pi).rem_euclid(pi)
    };
    let gp = |x: i64| -> i64 { (12 * x % pi * x + 2 * b2 * x + 2 * b4).rem_euclid(pi) };
    let mut affine: i64 = 0;
    let mut singular: i64 = 0;
    for x in 0..pi {
        let gx = g(x);
        affine += 1 + i64::from(qr.chi(gx as u32));
        if gx == 0 && gp(x) == 0 {
            singular += 1;
        }
    }
    // For p odd, singular points sit at the double roots of g; each such x
    // carries exactly one point (the repeated y-root), already counted once
    // in `affine` via 1 + χ(0) = 1.
    let nonsingular = affine - singular + 1; // +1 for the point at infinity
    Ok(pi - nonsingular)
}
