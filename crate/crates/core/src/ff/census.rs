//! Full census of cyclotomic types over the family at a fixed prime q.
//!
//! The sweep iterates (d₂, d₁) groups. Within a group the maps
//! t ↦ t³ + d₂t² + d₁t over F_q and F_{q²} are shared by all q choices of
//! d₀, and because elements are packed with coordinate 0 in the lowest
//! digit, adding the scalar d₀ is a single shift of the low digit. That
//! turns the degree-2 power sum for one curve into a q²-length gather,
//! and the whole census into ~q⁵ table lookups plus a lazy degree-3 pass
//! over the curves not pinned down by (S₁, S₂). The one collision the
//! degree-3 pass cannot split (Φ₈ vs Φ₁Φ₂Φ₄, both with p₁ = p₂ = p₃ = 0)
//! is settled by the functional-equation sign from the bad fibers, and
//! that sign formula is re-asserted against the resolved L-polynomial of
//! every single curve before it is counted.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::curve::{
    bad_fiber_analysis, exact_div, filter_by_p3, functional_sign, pick_by_sign, sha_of_curve,
    survivors_from_sums, BadFiberData, CensusTables, FFCurveRecord, ShaValue,
};
use super::lpoly::{five_named_types, CyclotomicType, UnitizedLPolynomial};
use super::poly;
use crate::error::Error;
use crate::exec;
use crate::primes::is_prime;

/// Aggregate for one cyclotomic type.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TypeStats {
    pub count: u64,
    /// Distinct Ш values seen in the type (expected to be a singleton).
    pub sha_values: BTreeSet<ShaValue>,
}

/// Census output: counts per type, optionally per-curve records in
/// lexicographic (d₂, d₁, d₀) order.
#[derive(Debug, Serialize)]
pub struct CensusResult {
    pub q: u32,
    /// Number of curves = monic squarefree cubics = q³ − q².
    pub total: u64,
    pub types: BTreeMap<CyclotomicType, TypeStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub records: Option<Vec<FFCurveRecord>>,
}

impl CensusResult {
    pub fn count_of(&self, ty: &CyclotomicType) -> u64 {
        self.types.get(ty).map_or(0, |s| s.count)
    }

    /// Counts of the five tabulated rank-0 types, in table order
    /// (Φ₂², Φ₂³, Φ₂⁴, Φ₄², Φ₂²·Φ₆).
    pub fn named_counts(&self) -> [u64; 5] {
        let named = five_named_types();
        std::array::from_fn(|i| self.count_of(&named[i]))
    }

    /// Total count over types with no Φ₁ factor (rank 0).
    pub fn rank_zero_total(&self) -> u64 {
        self.types
            .iter()
            .filter(|(ty, _)| !ty.contains_one())
            .map(|(_, s)| s.count)
            .sum()
    }

    /// CSV with columns (q, type, count, count_over_q, sha).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,type,count,count_over_q,sha\n");
        for (ty, stats) in &self.types {
            let over_q = if stats.count % self.q as u64 == 0 {
                format!("{}", stats.count / self.q as u64)
            } else {
                format!("{:.6}", stats.count as f64 / self.q as f64)
            };
            let sha = stats
                .sha_values
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join("|");
            out.push_str(&format!("{},{},{},{},{}\n", self.q, ty, stats.count, over_q, sha));
        }
        out
    }
}

struct ChunkOut {
    counts: BTreeMap<CyclotomicType, TypeStats>,
    records: Vec<FFCurveRecord>,
    total: u64,
}

/// Run the census at prime q ≡ 7 (mod 12).
pub fn type_census(q: u32, with_records: bool) -> Result<CensusResult, Error> {
    if !is_prime(q as u64) || q < 5 {
        return Err(Error::validation(format!(
            "q must be a prime >= 5, got {q}"
        )));
    }
    if q % 12 != 7 {
        return Err(Error::validation(format!(
            "the census regime is q ≡ 7 (mod 12); got q = {q}"
        )));
    }
    let tables = CensusTables::new(q)?;
    let chunk_outs = exec::run_chunks(q as usize, |d2| {
        sweep_d2(d2 as u32, &tables, with_records)
    });
    let mut types: BTreeMap<CyclotomicType, TypeStats> = BTreeMap::new();
    let mut records = Vec::new();
    let mut total = 0u64;
    for out in chunk_outs {
        let out = out?;
        total += out.total;
        for (ty, stats) in out.counts {
            let entry = types.entry(ty).or_default();
            entry.count += stats.count;
            entry.sha_values.extend(stats.sha_values);
        }
        records.extend(out.records);
    }
    let expected = (q as u64).pow(3) - (q as u64).pow(2);
    if total != expected {
        return Err(Error::data_bug(format!(
            "census saw {total} squarefree cubics, expected q³ − q² = {expected}"
        )));
    }
    Ok(CensusResult {
        q,
        total,
        types,
        records: if with_records { Some(records) } else { None },
    })
}

/// Sweep every (d₁, d₀) for a fixed d₂.
fn sweep_d2(d2: u32, tables: &CensusTables, with_records: bool) -> Result<ChunkOut, Error> {
    let q = tables.q;
    let qs = q as usize;
    let qe = q as u64;
    let (t1, p1) = tables.level(1);
    let (t2, p2) = tables.level(2);
    let n2 = p2.size;
    let sigma1 = &t1.entries;
    let sigma2 = &t2.entries;

    let mut counts: BTreeMap<CyclotomicType, TypeStats> = BTreeMap::new();
    let mut records = Vec::new();
    let mut total = 0u64;

    // Group-level scratch, reused across d₁.
    let mut base1 = vec![0u32; qs];
    let mut rest2 = vec![0u32; n2];
    let mut c02 = vec![0u32; n2];
    let mut rest3: Vec<u32> = Vec::new();
    let mut c03: Vec<u32> = Vec::new();

    let (p1t1, p1t2, p1t3) = (p1.plane(0, 0), p1.plane(1, 0), p1.plane(2, 0));

    for d1 in 0..q {
        // base1[t] = t³ + d₂t² + d₁t over F_q.
        for t in 0..qs {
            base1[t] =
                ((p1t3[t] as u64 + d2 as u64 * p1t2[t] as u64 + d1 as u64 * p1t1[t] as u64) % qe)
                    as u32;
        }
        // Packed partial image over F_{q²}: rest2 holds the coordinate-1
        // digit already multiplied by q; c02 holds coordinate 0.
        for axis in 0..2 {
            let a1 = p2.plane(0, axis);
            let a2 = p2.plane(1, axis);
            let a3 = p2.plane(2, axis);
            for i in 0..n2 {
                let c =
                    ((a3[i] as u64 + d2 as u64 * a2[i] as u64 + d1 as u64 * a1[i] as u64) % qe)
                        as u32;
                if axis == 0 {
                    c02[i] = c;
                } else {
                    rest2[i] = c * q;
                }
            }
        }

        // Per-d₀ resolution slots: None = not squarefree (skipped). A
        // resolved slot carries the bad-fiber data when tie-breaking
        // already computed it, so finalize does not factor twice.
        type Slot = (UnitizedLPolynomial, CyclotomicType, Option<BadFiberData>);
        let mut slots: Vec<Option<Slot>> = vec![None; qs];
        let mut pending: Vec<(u32, Vec<(UnitizedLPolynomial, CyclotomicType)>)> = Vec::new();

        for d0 in 0..q {
            let d_poly = [d0, d1, d2, 1];
            if !poly::is_squarefree(&d_poly, q) {
                continue;
            }
            total += 1;
            // S₁ and S₂ by the low-digit shift.
            let mut acc1 = 0i64;
            for &b in base1.iter() {
                let mut s = b + d0;
                if s >= q {
                    s -= q;
                }
                acc1 += sigma1[s as usize] as i64;
            }
            let s1 = -acc1;
            let mut acc2 = 0i64;
            for i in 0..n2 {
                let mut s = c02[i] + d0;
                if s >= q {
                    s -= q;
                }
                acc2 += sigma2[(rest2[i] + s) as usize] as i64;
            }
            let s2 = -acc2;
            // Unitized degree from the discriminant radical.
            let b = super::curve::disc_poly(&d_poly, q);
            let g = poly::gcd(&b, &poly::derivative(&b, q), q);
            let m = 4usize.checked_sub(g.len() - 1).ok_or_else(|| {
                Error::data_bug("conductor degree below the unitized degree floor")
            })?;
            let mut survivors = survivors_from_sums(q as i64, m, s1, s2)?;
            if survivors.len() == 1 {
                let (lp, ty) = survivors.pop().unwrap();
                slots[d0 as usize] = Some((lp, ty, None));
            } else {
                pending.push((d0, survivors));
            }
        }

        // Lazy degree-3 pass for this (d₂, d₁) group.
        if !pending.is_empty() {
            let (t3, p3) = tables.level3()?;
            let n3 = p3.size;
            let sigma3 = &t3.entries;
            if rest3.is_empty() {
                rest3 = vec![0u32; n3];
                c03 = vec![0u32; n3];
            }
            for axis in 0..3 {
                let a1 = p3.plane(0, axis);
                let a2 = p3.plane(1, axis);
                let a3 = p3.plane(2, axis);
                match axis {
                    0 => {
                        for i in 0..n3 {
                            c03[i] = ((a3[i] as u64
                                + d2 as u64 * a2[i] as u64
                                + d1 as u64 * a1[i] as u64)
                                % qe) as u32;
                        }
                    }
                    1 => {
                        for i in 0..n3 {
                            rest3[i] = (((a3[i] as u64
                                + d2 as u64 * a2[i] as u64
                                + d1 as u64 * a1[i] as u64)
                                % qe) as u32)
                                * q;
                        }
                    }
                    _ => {
                        for i in 0..n3 {
                            rest3[i] += (((a3[i] as u64
                                + d2 as u64 * a2[i] as u64
                                + d1 as u64 * a1[i] as u64)
                                % qe) as u32)
                                * q
                                * q;
                        }
                    }
                }
            }
            for (d0, survivors) in pending.drain(..) {
                let mut acc3 = 0i64;
                for i in 0..n3 {
                    let mut s = c03[i] + d0;
                    if s >= q {
                        s -= q;
                    }
                    acc3 += sigma3[(rest3[i] + s) as usize] as i64;
                }
                // S₃ = −acc3; p₃ = −S₃/q³ = acc3/q³.
                let p3_target =
                    exact_div(acc3, (q as i64).pow(3), "the degree-3 power sum")?;
                let mut filtered = filter_by_p3(survivors, p3_target);
                slots[d0 as usize] = Some(match filtered.len() {
                    1 => {
                        let (lp, ty) = filtered.pop().unwrap();
                        (lp, ty, None)
                    }
                    2 => {
                        // The Φ₈ / Φ₁Φ₂Φ₄ collision: break it with the
                        // functional-equation sign from the bad fibers.
                        let d_poly = [d0, d1, d2, 1];
                        let bad = bad_fiber_analysis(&d_poly, q)?;
                        let eps = functional_sign(&bad, q);
                        let (lp, ty) = pick_by_sign(filtered, eps)?;
                        (lp, ty, Some(bad))
                    }
                    n => {
                        return Err(Error::data_bug(format!(
                            "{n} candidates after the degree-3 power sum at \
                             D = [{d0}, {d1}, {d2}, 1]"
                        )))
                    }
                });
            }
        }

        // Finalize in d₀ order. Every curve gets its bad-fiber analysis
        // here (if tie-breaking did not already do it), both for the
        // Tamagawa numbers feeding Ш and to hold the functional-sign
        // invariant curve by curve.
        for d0 in 0..q {
            let Some((lp, ty, stored_bad)) = slots[d0 as usize].take() else {
                continue;
            };
            let d_poly = [d0, d1, d2, 1];
            let bad = match stored_bad {
                Some(b) => b,
                None => bad_fiber_analysis(&d_poly, q)?,
            };
            if lp.epsilon() != functional_sign(&bad, q) {
                return Err(Error::data_bug(format!(
                    "functional-equation sign mismatch in the census sweep at \
                     D = {d_poly:?}, q = {q}"
                )));
            }
            let sha = sha_of_curve(&ty, bad.c_infinity, bad.c_fin_product)?;
            let entry = counts.entry(ty.clone()).or_default();
            entry.count += 1;
            entry.sha_values.insert(sha);
            if with_records {
                records.push(FFCurveRecord {
                    q,
                    d_coeffs: d_poly.to_vec(),
                    bad,
                    l_poly: lp,
                    cyclo_type: ty,
                    sha,
                });
            }
        }
    }

    Ok(ChunkOut {
        counts,
        records,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::curve::curve_record;

    #[test]
    fn rejects_wrong_residue_class_and_composites() {
        assert!(type_census(13, false).is_err()); // 13 ≡ 1 (mod 12)
        assert!(type_census(21, false).is_err()); // composite
        assert!(type_census(5, false).is_err()); // 5 ≡ 5 (mod 12)
    }

    #[test]
    fn q7_census_matches_reference_row() {
        let census = type_census(7, false).unwrap();
        assert_eq!(census.total, 294);
        assert_eq!(census.named_counts(), [7, 0, 0, 14, 28]); // (1,0,0,2,4)·q
        let sum: u64 = census.types.values().map(|s| s.count).sum();
        assert_eq!(sum, 294);
    }

    #[test]
    fn q19_census_matches_reference_row() {
        let census = type_census(19, false).unwrap();
        assert_eq!(census.total, 6498);
        assert_eq!(
            census.named_counts(),
            [19, 3 * 19, 0, 23 * 19, 58 * 19]
        );
    }

    #[test]
    #[ignore = "heavier census; exercised by the acceptance suite"]
    fn q31_census_matches_reference_row() {
        let t0 = std::time::Instant::now();
        let census = type_census(31, false).unwrap();
        eprintln!("q = 31 census took {:?}", t0.elapsed());
        assert_eq!(census.total, 31u64.pow(3) - 31u64.pow(2));
        assert_eq!(census.named_counts(), [31, 6 * 31, 31, 56 * 31, 141 * 31]);
    }

    #[test]
    #[ignore = "heavier census; exercised by the acceptance suite"]
    fn q43_census_matches_reference_row() {
        let t0 = std::time::Instant::now();
        let census = type_census(43, false).unwrap();
        eprintln!("q = 43 census took {:?}", t0.elapsed());
        assert_eq!(census.total, 43u64.pow(3) - 43u64.pow(2));
        assert_eq!(census.named_counts(), [43, 9 * 43, 4 * 43, 107 * 43, 291 * 43]);
    }

    #[test]
    fn q_divides_every_type_count_at_small_primes() {
        for q in [7u32, 19] {
            let census = type_census(q, false).unwrap();
            for (ty, stats) in &census.types {
                assert_eq!(
                    stats.count % q as u64,
                    0,
                    "q = {q} does not divide N = {} for type {ty}",
                    stats.count
                );
            }
        }
    }

    #[test]
    fn sha_is_constant_within_each_type() {
        for q in [7u32, 19] {
            let census = type_census(q, false).unwrap();
            for (ty, stats) in &census.types {
                assert_eq!(
                    stats.sha_values.len(),
                    1,
                    "type {ty} at q = {q} has mixed Ш values {:?}",
                    stats.sha_values
                );
            }
        }
    }

    #[test]
    fn five_named_types_have_sha_one(){
        let census = type_census(7, false).unwrap();
        for ty in five_named_types() {
            if census.count_of(&ty) > 0 {
                let stats = &census.types[&ty];
                assert_eq!(stats.sha_values.iter().next(), Some(&ShaValue::Order(1)));
            }
        }
    }

    #[test]
    fn census_records_match_single_curve_pipeline() {
        // The optimized sweep must agree curve-by-curve with the direct
        // per-curve path.
        let census = type_census(7, true).unwrap();
        let records = census.records.as_ref().unwrap();
        assert_eq!(records.len(), 294);
        let tables = CensusTables::new(7).unwrap();
        let mut expected_d: u64 = 0;
        for rec in records {
            let direct = curve_record(&rec.d_coeffs, &tables).unwrap();
            assert_eq!(rec.l_poly, direct.l_poly, "at D = {:?}", rec.d_coeffs);
            assert_eq!(rec.cyclo_type, direct.cyclo_type);
            assert_eq!(rec.sha, direct.sha);
            assert_eq!(rec.bad, direct.bad);
            // Lexicographic (d2, d1, d0) order.
            let key = rec.d_coeffs[2] as u64 * 49 + rec.d_coeffs[1] as u64 * 7
                + rec.d_coeffs[0] as u64;
            assert!(key >= expected_d);
            expected_d = key;
        }
    }

    #[test]
    fn csv_has_header_and_one_row_per_type() {
        let census = type_census(7, false).unwrap();
        let csv = census.to_csv();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines[0], "q,type,count,count_over_q,sha");
        assert_eq!(lines.len(), 1 + census.types.len());
        assert!(lines.iter().skip(1).all(|l| l.starts_with("7,")));
        // The dominant type row carries Ш = 1 and an integer N/q.
        assert!(lines.iter().any(|l| l.contains("Phi2^2*Phi6") && l.ends_with(",4,1")));
    }
}
