//! Local reduction data of an integral Weierstrass model at a prime:
//! Kodaira type, conductor exponent, Tamagawa number, minimality.
//!
//! The implementation follows the classical reduction walk: detect
//! good/multiplicative reduction from the valuations of Δ and c4, then
//! for additive primes translate the singular point to the origin,
//! straighten the tangent direction, and read off the type from a cubic
//! (and, deeper in, a chain of quadratics) over F_p. Every step's
//! divisibility preconditions are enforced with checked exact divisions:
//! a violated precondition aborts with a fatal consistency error instead
//! of silently returning a wrong type.
//!
//! Scope: all odd primes. Additive reduction at p = 2 is deliberately
//! out of scope (the walk at 2 needs its own congruence analysis); it is
//! reported as a domain error so callers can exclude those models. Good
//! and multiplicative reduction at 2 are fully supported.

use super::wmodel::{invariants_i128, rescale_down, transform_rst, AInvs, Invariants};
use crate::error::Error;
use crate::primes::{is_prime, mod_inverse, mod_pow};
use crate::Result;

/// Kodaira symbol of the special fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kodaira {
    /// I_n (n = 0 is good reduction).
    I(u32),
    /// I_n^* (n ≥ 0).
    Ist(u32),
    II,
    III,
    IV,
    IVst,
    IIIst,
    IIst,
}

impl Kodaira {
    /// Number of irreducible components of the special fiber
    /// (counted without multiplicity).
    pub fn components(&self) -> u32 {
        match *self {
            Kodaira::I(0) => 1,
            Kodaira::I(n) => n,
            Kodaira::Ist(n) => 5 + n,
            Kodaira::II => 1,
            Kodaira::III => 2,
            Kodaira::IV => 3,
            Kodaira::IVst => 7,
            Kodaira::IIIst => 8,
            Kodaira::IIst => 9,
        }
    }
}

impl std::fmt::Display for Kodaira {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::Ist(n) => write!(f, "I{n}*"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::IVst => write!(f, "IV*"),
            Kodaira::IIIst => write!(f, "III*"),
            Kodaira::IIst => write!(f, "II*"),
        }
    }
}

/// Local reduction data at one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalData {
    pub p: u32,
    pub kodaira: Kodaira,
    /// Conductor exponent f_p.
    pub f: u32,
    /// Tamagawa number c_p.
    pub c: u64,
    /// For multiplicative reduction: whether the node's tangents are
    /// rational (split). `None` otherwise.
    pub split: Option<bool>,
    /// Valuation of the minimal discriminant at p.
    pub v_disc: u32,
    /// Whether the input model was already minimal at p.
    pub minimal: bool,
}

fn vp(x: i128, p: i128) -> u32 {
    debug_assert!(x != 0);
    let mut x = x;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Valuation with 0 ↦ "infinite" (encoded as u32::MAX).
fn vp0(x: i128, p: i128) -> u32 {
    if x == 0 {
        u32::MAX
    } else {
        vp(x, p)
    }
}

fn exact_div(x: i128, d: i128, what: &str) -> Result<i128> {
    if x % d != 0 {
        return Err(Error::data_bug(format!(
            "reduction walk: {what} = {x} is not divisible by {d}"
        )));
    }
    Ok(x / d)
}

/// Symmetric (least-absolute) representative of x mod m.
fn sym_rep(x: i128, m: i128) -> i128 {
    let r = x.rem_euclid(m);
    if 2 * r > m {
        r - m
    } else {
        r
    }
}

fn legendre(x: i128, p: i128) -> i8 {
    let r = x.rem_euclid(p);
    if r == 0 {
        return 0;
    }
    let e = mod_pow(r as u64, ((p - 1) / 2) as u64, p as u64);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Multiplicative reduction: are the node's tangent directions rational?
fn mult_is_split(a: &[i128; 5], inv: &Invariants, p: i128) -> bool {
    if p == 2 {
        // v2(c4) = 0 forces a1 odd; the node has x ≡ a3/a1 ≡ a3 (mod 2)
        // and the tangent quadratic T² + T + (a2 + 3x0) splits over F_2
        // exactly when its constant term is even.
        let x0 = a[2].rem_euclid(2);
        (a[1] + 3 * x0).rem_euclid(2) == 0
    } else {
        // For odd p the tangent slopes are ±√(3e) at the double root e,
        // and χ(3e) = χ(−c6) (e.g. via A = −3e², B = 2e³, −c6 = (12e)³).
        legendre(-inv.c6, p) == 1
    }
}

/// Find the singular point of the reduced curve mod p (additive case:
/// the cusp) and return the translation (r, t) moving it to the origin.
fn singular_shift(a: &[i128; 5], inv: &Invariants, p: i128) -> Result<(i128, i128)> {
    if p >= 5 {
        // Cusp x-coordinate: triple root of 4x³ + b2x² + 2b4x + b6,
        // i.e. −b2/12; then 2y0 = −(a1x0 + a3).
        let inv12 = i128::from(
            mod_inverse(12 % p as u64, p as u64)
                .ok_or_else(|| Error::data_bug("12 not invertible for p ≥ 5"))?,
        );
        let x0 = (-inv.b2 * inv12).rem_euclid(p);
        let inv2 = i128::from(mod_inverse(2, p as u64).unwrap());
        let y0 = ((-(a[0] * x0 + a[2])).rem_euclid(p) * inv2).rem_euclid(p);
        return Ok((sym_rep(x0, p), sym_rep(y0, p)));
    }
    // p = 3: brute-force the nine residue pairs.
    for x0 in 0..p {
        for y0 in 0..p {
            let f = (y0 * y0 + a[0] * x0 * y0 + a[2] * y0
                - (x0 * x0 * x0 + a[1] * x0 * x0 + a[3] * x0 + a[4]))
                .rem_euclid(p);
            let fx = (a[0] * y0 - (3 * x0 * x0 + 2 * a[1] * x0 + a[3])).rem_euclid(p);
            let fy = (2 * y0 + a[0] * x0 + a[2]).rem_euclid(p);
            if f == 0 && fx == 0 && fy == 0 {
                return Ok((sym_rep(x0, p), sym_rep(y0, p)));
            }
        }
    }
    Err(Error::data_bug(
        "additive reduction but no singular point found mod p",
    ))
}

/// Roots of the monic cubic T³ + aT² + bT + c over F_p, as
/// (simple roots, multiple root with its multiplicity).
struct CubicRoots {
    simple: Vec<i128>,
    multiple: Option<(i128, u32)>,
}

fn cubic_roots_mod_p(a: i128, b: i128, c: i128, p: i128) -> CubicRoots {
    let mut simple = Vec::new();
    let mut multiple = None;
    for t in 0..p {
        // Synthetic division: P(t), then Q(t) for Q = P/(T−t), then R(t).
        let pt = (((t + a) * t + b) * t + c).rem_euclid(p);
        if pt != 0 {
            continue;
        }
        // P = (T−t)·(T² + q1 T + q0) with q1 = a + t, q0 = b + t(a + t).
        let q1 = (a + t).rem_euclid(p);
        let q0 = (b + t * (a + t)).rem_euclid(p);
        let qt = ((t + q1) * t + q0).rem_euclid(p);
        if qt != 0 {
            simple.push(t);
            continue;
        }
        // Multiplicity ≥ 2; triple iff the remaining linear factor
        // T + (q1 + t) also vanishes at t.
        let rt = (t + q1 + t).rem_euclid(p);
        let m = if rt == 0 { 3 } else { 2 };
        multiple = Some((t, m));
    }
    CubicRoots { simple, multiple }
}

/// Local reduction data of the model `a` at the prime `p`.
///
/// Errors: `p` not prime; singular model (Δ = 0); additive reduction at
/// p = 2 (documented scope limit).
pub fn local_reduction(a: &AInvs, p: u32) -> Result<LocalData> {
    if !is_prime(u64::from(p)) {
        return Err(Error::domain(format!("local_reduction: {p} is not prime")));
    }
    let pl = i128::from(p);
    let mut m: [i128; 5] = a.map(i128::from);
    let mut minimal = true;

    'restart: loop {
        let inv = invariants_i128(&m)?;
        if inv.disc == 0 {
            return Err(Error::domain("local_reduction: singular model (Δ = 0)"));
        }
        let n = vp0(inv.disc, pl);
        if n == 0 {
            return finish(p, Kodaira::I(0), 0, 1, None, 0, minimal);
        }
        if vp0(inv.c4, pl) == 0 {
            // Multiplicative: type I_n with n = v(Δ).
            let split = mult_is_split(&m, &inv, pl);
            let c = if split {
                u64::from(n)
            } else if n % 2 == 0 {
                2
            } else {
                1
            };
            return finish(p, Kodaira::I(n), 1, c, Some(split), n, minimal);
        }
        if p == 2 {
            return Err(Error::domain(
                "local_reduction: additive reduction at p = 2 is not supported; \
                 exclude such models upstream",
            ));
        }

        // Additive. Move the singular point (a cusp) to the origin.
        let (r, t) = singular_shift(&m, &inv, pl)?;
        m = transform_rst(&m, r, 0, t)?;
        let inv = invariants_i128(&m)?;
        for (i, &ai) in m.iter().enumerate().skip(2) {
            if ai % pl != 0 {
                return Err(Error::data_bug(format!(
                    "singular-point translation left a[{i}] = {ai} nonzero mod {p}"
                )));
            }
        }

        if vp0(m[4], pl) < 2 {
            return finish(p, Kodaira::II, n, 1, None, n, minimal);
        }
        if vp0(inv.b8, pl) < 3 {
            return finish(p, Kodaira::III, n - 1, 2, None, n, minimal);
        }
        if vp0(inv.b6, pl) < 3 {
            // Type IV: component count from Y² + (a3/p)Y − (a6/p²).
            let a31 = exact_div(m[2], pl, "a3")?;
            let a62 = exact_div(m[4], pl * pl, "a6")?;
            let d = a31 * a31 + 4 * a62;
            let c = if legendre(d, pl) == 1 { 3 } else { 1 };
            return finish(p, Kodaira::IV, n - 2, c, None, n, minimal);
        }

        // Straighten the (double) tangent line: kill a1 mod p, then a3
        // mod p²; afterwards p | a1, a2 and p² | a3, a4 and p³ | a6.
        let inv2 = i128::from(mod_inverse(2, p as u64).unwrap());
        let s = sym_rep((-m[0] * inv2).rem_euclid(pl), pl);
        m = transform_rst(&m, 0, s, 0)?;
        let a31 = exact_div(m[2], pl, "a3 before the p² shift")?;
        let t2 = pl * sym_rep((-a31 * inv2).rem_euclid(pl), pl);
        m = transform_rst(&m, 0, 0, t2)?;
        let a21 = exact_div(m[1], pl, "a2")?;
        let a42 = exact_div(m[3], pl * pl, "a4")?;
        let a63 = exact_div(m[4], pl * pl * pl, "a6")?;
        if m[0] % pl != 0 || m[2] % (pl * pl) != 0 {
            return Err(Error::data_bug(
                "tangent normalization failed to clear a1 mod p / a3 mod p²",
            ));
        }

        let roots = cubic_roots_mod_p(
            a21.rem_euclid(pl),
            a42.rem_euclid(pl),
            a63.rem_euclid(pl),
            pl,
        );
        match roots.multiple {
            None => {
                // Separable cubic: I0*; components = 1 + rational roots.
                let c = 1 + roots.simple.len() as u64;
                return finish(p, Kodaira::Ist(0), n - 4, c, None, n, minimal);
            }
            Some((beta, 2)) => {
                // Double root: I_n* chain. Translate the double root to 0.
                m = transform_rst(&m, pl * sym_rep(beta, pl), 0, 0)?;
                let lead = exact_div(m[1], pl, "a2 in the I_n* chain")?.rem_euclid(pl);
                if lead == 0 {
                    return Err(Error::data_bug(
                        "double-root translation left a2/p ≡ 0 (would be a triple root)",
                    ));
                }
                let mut j: u32 = 1;
                loop {
                    // Y-quadratic: Y² + (a3/p^{1+j})Y − a6/p^{2+2j}.
                    let p1j = pl.checked_pow(1 + j).ok_or_else(overflow)?;
                    let p22j = pl.checked_pow(2 + 2 * j).ok_or_else(overflow)?;
                    let a3j = exact_div(m[2], p1j, "a3 in the I_n* chain")?;
                    let a6j = exact_div(m[4], p22j, "a6 in the I_n* chain")?;
                    let dy = (a3j * a3j + 4 * a6j).rem_euclid(pl);
                    if dy != 0 {
                        let nst = 2 * j - 1;
                        let c = if legendre(dy, pl) == 1 { 4 } else { 2 };
                        return finish(p, Kodaira::Ist(nst), n - 4 - nst, c, None, n, minimal);
                    }
                    let gamma = sym_rep((-a3j * inv2).rem_euclid(pl), pl);
                    m = transform_rst(&m, 0, 0, p1j * gamma)?;
                    // X-quadratic: (a2/p)X² + (a4/p^{2+j})X + a6/p^{3+2j}.
                    let p2j = pl.checked_pow(2 + j).ok_or_else(overflow)?;
                    let p32j = pl.checked_pow(3 + 2 * j).ok_or_else(overflow)?;
                    let a4j = exact_div(m[3], p2j, "a4 in the I_n* chain")?;
                    let a6j = exact_div(m[4], p32j, "a6 in the I_n* chain")?;
                    let dx = (a4j * a4j - 4 * lead * a6j).rem_euclid(pl);
                    if dx != 0 {
                        let nst = 2 * j;
                        let c = if legendre(dx, pl) == 1 { 4 } else { 2 };
                        return finish(p, Kodaira::Ist(nst), n - 4 - nst, c, None, n, minimal);
                    }
                    let inv_lead = i128::from(
                        mod_inverse((2 * lead).rem_euclid(pl) as u64, p as u64)
                            .ok_or_else(|| Error::data_bug("2·a2/p not invertible"))?,
                    );
                    let delta = sym_rep((-a4j * inv_lead).rem_euclid(pl), pl);
                    m = transform_rst(&m, p1j * delta, 0, 0)?;
                    j += 1;
                    if j > n {
                        return Err(Error::data_bug("I_n* chain exceeded v(Δ) iterations"));
                    }
                }
            }
            Some((beta, _)) => {
                // Triple root: translate to 0, then IV* / III* / II* / rescale.
                m = transform_rst(&m, pl * sym_rep(beta, pl), 0, 0)?;
                let p2 = pl * pl;
                let a32 = exact_div(m[2], p2, "a3 after the triple-root shift")?;
                let a64 = exact_div(m[4], p2 * p2, "a6 after the triple-root shift")?;
                let dy = (a32 * a32 + 4 * a64).rem_euclid(pl);
                if dy != 0 {
                    let c = if legendre(dy, pl) == 1 { 3 } else { 1 };
                    return finish(p, Kodaira::IVst, n - 6, c, None, n, minimal);
                }
                let gamma = sym_rep((-a32 * inv2).rem_euclid(pl), pl);
                m = transform_rst(&m, 0, 0, p2 * gamma)?;
                if vp0(m[3], pl) < 4 {
                    return finish(p, Kodaira::IIIst, n - 7, 2, None, n, minimal);
                }
                if vp0(m[4], pl) < 6 {
                    return finish(p, Kodaira::IIst, n - 8, 1, None, n, minimal);
                }
                // Non-minimal model: divide a_i by p^i and restart.
                m = rescale_down(&m, pl)?;
                minimal = false;
                continue 'restart;
            }
        }
    }
}

fn overflow() -> Error {
    Error::validation("overflow in the reduction walk")
}

/// Assemble the result, asserting the component-count identity
/// f = v(Δ) − (components − 1) that ties the type, the conductor
/// exponent and the discriminant valuation together.
fn finish(
    p: u32,
    kodaira: Kodaira,
    f: u32,
    c: u64,
    split: Option<bool>,
    v_disc: u32,
    minimal: bool,
) -> Result<LocalData> {
    let mcomp = kodaira.components();
    if v_disc + 1 != f + mcomp {
        return Err(Error::data_bug(format!(
            "component-count identity violated at p = {p}: type {kodaira}, f = {f}, \
             v(Δ) = {v_disc}, components = {mcomp}"
        )));
    }
    Ok(LocalData {
        p,
        kodaira,
        f,
        c,
        split,
        v_disc,
        minimal,
    })
}
