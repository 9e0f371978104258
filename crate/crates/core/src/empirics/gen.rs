//! Fixture generation: enumerate reduced integral models in a
//! coefficient box, keep globally minimal rank-0 curves of bounded
//! conductor, and complete each into a [`CurveRecord`] whose every
//! derived quantity is internally cross-checked.
//!
//! Enumeration covers a1, a3 ∈ {0, 1} and a2 ∈ {−1, 0, 1} (the reduced
//! normal form, which each isomorphism class attains exactly once) with
//! a4, a6 in a configurable box. A model survives only if
//!
//! 1. its discriminant is nonzero, supported on primes below the
//!    conductor bound, with radical below the bound (necessary for
//!    N < bound on a minimal model);
//! 2. it is minimal at every bad prime (otherwise the class reappears
//!    via its own reduced minimal model) and not additive at 2 (out of
//!    the reduction walk's scope — counted, not silently dropped);
//! 3. the conductor ∏ p^{f_p} is below the bound;
//! 4. the functional-equation sign is +1 and L(1) is away from zero
//!    (rank 0).
//!
//! Completion then stores a_p for all primes up to the table bound
//! (bad-prime traces cross-checked against the reduction walk's
//! split/nonsplit decision), the real period, torsion order, Tamagawa
//! product, L(1), and the analytic Sha — which is required to be a
//! perfect square within 10⁻⁶ relative error, a strong end-to-end check
//! tying all components together on every kept curve.

use std::collections::BTreeMap;

use super::hecke::{functional_sign, l_value, TRUNC_A};
use super::period::real_period;
use super::record::CurveRecord;
use super::tate::local_reduction;
use super::torsion::torsion_order;
use super::wmodel::{ap_bad, ap_count, invariants, ap_good_with_table, AInvs, QrTable};
use crate::error::Error;
use crate::exec::run_chunks;
use crate::primes::{is_prime, primes_upto};
use crate::Result;

/// Generation parameters.
#[derive(Debug, Clone)]
pub struct GenOptions {
    /// Conductors kept are `< max_conductor`.
    pub max_conductor: u64,
    /// a_p stored for all primes `≤ ap_bound`.
    pub ap_bound: u64,
    /// |a4| bound of the enumeration box.
    pub a4_bound: i64,
    /// |a6| bound of the enumeration box.
    pub a6_bound: i64,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            max_conductor: 10_000,
            ap_bound: 600,
            a4_bound: 300,
            a6_bound: 3_000,
        }
    }
}

/// Per-disposition counters for the enumeration.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct GenCounters {
    pub models: u64,
    pub singular: u64,
    pub unsupported_disc: u64,
    pub non_minimal: u64,
    pub additive_at_two: u64,
    pub conductor_too_big: u64,
    pub odd_sign: u64,
    pub even_sign_l_zero: u64,
    pub kept: u64,
}

impl GenCounters {
    fn absorb(&mut self, o: &GenCounters) {
        self.models += o.models;
        self.singular += o.singular;
        self.unsupported_disc += o.unsupported_disc;
        self.non_minimal += o.non_minimal;
        self.additive_at_two += o.additive_at_two;
        self.conductor_too_big += o.conductor_too_big;
        self.odd_sign += o.odd_sign;
        self.even_sign_l_zero += o.even_sign_l_zero;
        self.kept += o.kept;
    }
}

enum Disposition {
    Kept(Box<CurveRecord>),
    UnsupportedDisc,
    NonMinimal,
    AdditiveAtTwo,
    ConductorTooBig,
    OddSign,
    EvenSignLZero,
}

/// Factor |Δ| when it can possibly belong to a minimal model of
/// conductor < `max_n`: all prime factors below `max_n` and radical
/// below `max_n`. Returns `None` (reject) otherwise.
///
/// Strategy: strip primes ≤ 97; the cofactor must then be 1 or a power
/// q^k of a single prime q < `max_n` (two distinct primes > 97 already
/// push the radical past 10⁴-scale bounds).
fn conductor_feasible_factors(disc: i128, max_n: u64) -> Option<Vec<(u64, u32)>> {
    let mut m = disc.unsigned_abs();
    let mut rad: u64 = 1;
    let mut out: Vec<(u64, u32)> = Vec::new();
    for &p in SMALL_PRIMES {
        let pl = u128::from(p);
        if m % pl == 0 {
            let mut e = 0u32;
            while m % pl == 0 {
                m /= pl;
                e += 1;
            }
            out.push((p, e));
            rad = rad.checked_mul(p)?;
            if rad >= max_n {
                return None;
            }
        }
    }
    if m == 1 {
        return Some(out);
    }
    // Cofactor: must be q^k for a single prime q with rad·q < max_n.
    let m64 = u64::try_from(m).ok()?;
    let q = if is_prime(m64) {
        out.push((m64, 1));
        m64
    } else {
        let mut found = 0u64;
        for k in 2u32..=6 {
            let root = (m64 as f64).powf(1.0 / f64::from(k)).round() as u64;
            for cand in root.saturating_sub(1)..=root + 1 {
                if cand > 1 && cand.checked_pow(k) == Some(m64) && is_prime(cand) {
                    out.push((cand, k));
                    found = cand;
                    break;
                }
            }
            if found > 0 {
                break;
            }
        }
        if found == 0 {
            return None;
        }
        found
    };
    if rad.checked_mul(q)? >= max_n {
        return None;
    }
    Some(out)
}

const SMALL_PRIMES: &[u64] = &[
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97,
];

/// Shared read-only context for completion: QR tables for all odd
/// primes up to the a_p bound.
pub struct GenContext {
    primes: Vec<u64>,
    qr: Vec<QrTable>,
}

impl GenContext {
    pub fn new(ap_bound: u64) -> Self {
        let primes = primes_upto(ap_bound);
        let qr = primes
            .iter()
            .skip(1) // 2 handled separately
            .map(|&p| QrTable::new(p as u32))
            .collect();
        GenContext { primes, qr }
    }
}

fn is_perfect_square(n: u64) -> bool {
    let r = (n as f64).sqrt().round() as u64;
    [r.saturating_sub(1), r, r + 1].iter().any(|&s| s * s == n)
}

/// Complete one reduced model into a record, or classify why it is not
/// part of the fixture. Errors are reserved for internal inconsistencies.
fn complete_model(a: &AInvs, opts: &GenOptions, ctx: &GenContext) -> Result<Disposition> {
    let inv = invariants(a)?;
    debug_assert!(inv.disc != 0);
    let Some(factors) = conductor_feasible_factors(inv.disc, opts.max_conductor) else {
        return Ok(Disposition::UnsupportedDisc);
    };
    // Additive at 2 (2 | Δ and 2 | c4) is outside the walk's scope.
    if inv.disc % 2 == 0 && inv.c4 % 2 == 0 {
        return Ok(Disposition::AdditiveAtTwo);
    }
    let mut conductor: u64 = 1;
    let mut tamagawa: u64 = 1;
    let mut locals = Vec::with_capacity(factors.len());
    for &(p, _) in &factors {
        let d = local_reduction(a, p as u32)?;
        if !d.minimal {
            return Ok(Disposition::NonMinimal);
        }
        conductor = conductor.saturating_mul(u64::from(p as u32).pow(d.f));
        if conductor >= opts.max_conductor {
            return Ok(Disposition::ConductorTooBig);
        }
        tamagawa *= d.c;
        locals.push(d);
    }
    // Trace table for all primes ≤ ap_bound, bad primes cross-checked
    // against the walk's split decision.
    let mut ap = BTreeMap::new();
    for (i, &p) in ctx.primes.iter().enumerate() {
        let t = if inv.disc.rem_euclid(i128::from(p)) == 0 {
            let t = ap_bad(a, p as u32)?;
            if let Some(d) = locals.iter().find(|d| u64::from(d.p) == p) {
                let want = match d.split {
                    Some(true) => 1,
                    Some(false) => -1,
                    None => 0,
                };
                if t != want {
                    return Err(Error::data_bug(format!(
                        "split/count mismatch at p = {p} for {a:?}: walk says {want}, count {t}"
                    )));
                }
            }
            t
        } else if p == 2 {
            ap_count(a, 2)?
        } else {
            ap_good_with_table(&inv, &ctx.qr[i - 1])
        };
        ap.insert(p, t);
    }
    // The stored table must reach the L(1) truncation point.
    let needed = (TRUNC_A * (conductor as f64).sqrt()).ceil() as u64;
    if needed > opts.ap_bound {
        return Err(Error::validation(format!(
            "ap_bound {} cannot support L(1) at conductor {conductor} (needs {needed})",
            opts.ap_bound
        )));
    }
    if functional_sign(conductor, &ap)? < 0 {
        return Ok(Disposition::OddSign);
    }
    let l1 = l_value(conductor, &ap)?;
    if l1 < 1e-5 {
        return Ok(Disposition::EvenSignLZero);
    }
    let omega = real_period(a)?;
    let torsion = torsion_order(a)?;
    let sha_f = l1 * (torsion * torsion) as f64 / (omega * tamagawa as f64);
    let sha = sha_f.round();
    if !(sha >= 1.0 && ((sha_f / sha) - 1.0).abs() < 1e-6) {
        return Err(Error::data_bug(format!(
            "analytic Sha {sha_f} is not a near-integer for {a:?} (N = {conductor})"
        )));
    }
    let sha = sha as u64;
    if !is_perfect_square(sha) {
        return Err(Error::data_bug(format!(
            "analytic Sha {sha} is not a perfect square for {a:?} (N = {conductor})"
        )));
    }
    Ok(Disposition::Kept(Box::new(CurveRecord {
        label: String::new(), // assigned after the global sort
        conductor,
        ainvs: *a,
        rank: 0,
        ap,
        omega,
        tamagawa_product: tamagawa,
        sha,
        torsion,
        l1,
    })))
}

/// Enumerate the box and build the fixture. Deterministic: records are
/// sorted by (conductor, a-invariants) and labeled `{N}.{i}` with
/// 1-based `i` within each conductor.
pub fn generate(opts: &GenOptions) -> Result<(Vec<CurveRecord>, GenCounters)> {
    let ctx = GenContext::new(opts.ap_bound);
    let a6_values: Vec<i64> = (-opts.a6_bound..=opts.a6_bound).collect();
    let chunks: Vec<Result<(Vec<CurveRecord>, GenCounters)>> =
        run_chunks(a6_values.len(), |idx| {
            let a6 = a6_values[idx];
            let mut counters = GenCounters::default();
            let mut kept = Vec::new();
            for a1 in 0..=1i64 {
                for a2 in -1..=1i64 {
                    for a3 in 0..=1i64 {
                        for a4 in -opts.a4_bound..=opts.a4_bound {
                            let a = [a1, a2, a3, a4, a6];
                            counters.models += 1;
                            let inv = invariants(&a)?;
                            if inv.disc == 0 {
                                counters.singular += 1;
                                continue;
                            }
                            match complete_model(&a, opts, &ctx)? {
                                Disposition::Kept(r) => {
                                    counters.kept += 1;
                                    kept.push(*r);
                                }
                                Disposition::UnsupportedDisc => counters.unsupported_disc += 1,
                                Disposition::NonMinimal => counters.non_minimal += 1,
                                Disposition::AdditiveAtTwo => counters.additive_at_two += 1,
                                Disposition::ConductorTooBig => counters.conductor_too_big += 1,
                                Disposition::OddSign => counters.odd_sign += 1,
                                Disposition::EvenSignLZero => counters.even_sign_l_zero += 1,
                            }
                        }
                    }
                }
            }
            Ok((kept, counters))
        });
    let mut records = Vec::new();
    let mut counters = GenCounters::default();
    for chunk in chunks {
        let (kept, c) = chunk?;
        counters.absorb(&c);
        records.extend(kept);
    }
    records.sort_by(|x, y| (x.conductor, x.ainvs).cmp(&(y.conductor, y.ainvs)));
    let mut idx = 0u32;
    let mut last_n = 0u64;
    for rec in &mut records {
        idx = if rec.conductor == last_n { idx + 1 } else { 1 };
        last_n = rec.conductor;
        rec.label = format!("{}.{idx}", rec.conductor);
        rec.validate()?;
    }
    Ok((records, counters))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_box() -> GenOptions {
        GenOptions {
            a4_bound: 12,
            a6_bound: 20,
            ..GenOptions::default()
        }
    }

    #[test]
    fn tiny_box_contains_the_classical_small_conductors() {
        let (records, counters) = generate(&tiny_box()).unwrap();
        assert_eq!(counters.kept as usize, records.len());
        assert!(!records.is_empty());
        // The conductor-11 generator (0,−1,1,−10,−20) falls in the box.
        let e11 = records
            .iter()
            .find(|r| r.ainvs == [0, -1, 1, -10, -20])
            .expect("conductor-11 curve present");
        assert_eq!(e11.conductor, 11);
        assert_eq!(e11.label, "11.1");
        assert_eq!(e11.torsion, 5);
        assert_eq!(e11.tamagawa_product, 5);
        assert_eq!(e11.sha, 1);
        assert!((e11.l1 - 0.253_841_860_855_910_68).abs() < 1e-12);
        // Conductors are sorted and below the bound; labels count up.
        for w in records.windows(2) {
            assert!(w[0].conductor <= w[1].conductor);
        }
        for r in &records {
            assert!(r.conductor < 10_000);
            assert_eq!(r.rank, 0);
        }
        // The rank-1 conductor-37 curve must have been excluded by sign.
        assert!(records.iter().all(|r| r.ainvs != [0, 0, 1, -1, 0]));
        assert!(counters.odd_sign > 0);
        assert!(counters.additive_at_two > 0);
    }

    #[test]
    fn generation_is_deterministic() {
        let opts = GenOptions {
            a4_bound: 6,
            a6_bound: 8,
            ..GenOptions::default()
        };
        let (r1, c1) = generate(&opts).unwrap();
        let (r2, c2) = generate(&opts).unwrap();
        assert_eq!(c1, c2);
        assert_eq!(r1, r2);
        let s1: Vec<String> = r1.iter().map(|r| serde_json::to_string(r).unwrap()).collect();
        let s2: Vec<String> = r2.iter().map(|r| serde_json::to_string(r).unwrap()).collect();
        assert_eq!(s1, s2);
    }

    #[test]
    fn counters_partition_the_box() {
        let opts = GenOptions {
            a4_bound: 5,
            a6_bound: 7,
            ..GenOptions::default()
        };
        let (_, c) = generate(&opts).unwrap();
        let total = 2 * 3 * 2 * (2 * 5 + 1) * (2 * 7 + 1);
        assert_eq!(c.models, total);
        let classified = c.singular
            + c.unsupported_disc
            + c.non_minimal
            + c.additive_at_two
            + c.conductor_too_big
            + c.odd_sign
            + c.even_sign_l_zero
            + c.kept;
        assert_eq!(classified, total);
    }
}
