//! Independent Euler-product oracle for the L-polynomial pipeline.
//!
//! L(T) = ∏_v (local factor at v)⁻¹ over the finite places of F_q(t),
//! where a good place of degree e contributes (1 − a_v T^e + q^e T^{2e})
//! with a_v = −σ_e(D mod π), a multiplicative place contributes
//! (1 − ε_v T^e) with ε_v = ±1 by the split/non-split dichotomy, and the
//! additive place at ∞ contributes 1. Since deg L ≤ 4, truncating the
//! product over places of degree ≤ 4 at T⁵ determines L exactly. This
//! recomputes the same object as the power-sum pipeline from completely
//! different inputs (per-place local factors instead of aggregate traces),
//! so agreement pins down every sign and normalization convention.
//!
//! Places of degree e are enumerated as Frobenius orbits on F_{q^e}: each
//! length-e orbit is the root set of one monic irreducible of degree e,
//! and evaluating D at a root of π is evaluation "mod π" under any field
//! identification — σ_e(c) = Σ_x χ(x³ + x + c) does not depend on the
//! choice because it is a sum over the whole field.

use super::field::FieldCtx;
use super::tables::{char_sum_table_any, CharSumTable};
use crate::error::Error;
use crate::primes::{is_prime, mobius};

struct Level {
    e: u32,
    table: CharSumTable,
    /// One packed root index per degree-e place.
    roots: Vec<usize>,
}

/// Shared context: character-sum tables and place lists for degrees ≤ 4.
pub struct OracleCtx {
    pub q: u32,
    levels: Vec<Level>,
}

/// Number of monic irreducibles of degree e over F_q.
fn irreducible_count(q: u32, e: u32) -> u64 {
    let mut sum = 0i64;
    for f in 1..=e {
        if e.is_multiple_of(f) {
            sum += mobius((e / f) as u64) * (q as u64).pow(f) as i64;
        }
    }
    (sum / e as i64) as u64
}

/// x ↦ x^q as a permutation table, via the F_q-linearity of Frobenius.
fn frobenius_table(ctx: &FieldCtx) -> Vec<u32> {
    let e = ctx.d as usize;
    let size = ctx.size;
    let mut frob = vec![0u32; size];
    if e == 1 {
        for (x, f) in frob.iter_mut().enumerate() {
            *f = x as u32;
        }
        return frob;
    }
    // Images of the power basis: (α^j)^q = (α^q)^j.
    let alpha_q = ctx.pow_idx(ctx.q as usize, ctx.q as u64);
    let mut basis = vec![0usize; e];
    basis[0] = 1;
    for j in 1..e {
        basis[j] = ctx.mul_idx(basis[j - 1], alpha_q);
    }
    let mut coords = [0u32; 6];
    for (x, f) in frob.iter_mut().enumerate() {
        ctx.unpack(x, &mut coords);
        let mut y = 0usize;
        for (j, &b) in basis.iter().enumerate() {
            y = ctx.add_idx(y, ctx.scalar_mul_idx(b, coords[j]));
        }
        *f = y as u32;
    }
    frob
}

impl OracleCtx {
    pub fn new(q: u32) -> Result<OracleCtx, Error> {
        if !is_prime(q as u64) || q < 5 {
            return Err(Error::validation(format!(
                "q must be a prime >= 5, got {q}"
            )));
        }
        let mut levels = Vec::new();
        for e in 1..=4u32 {
            let table = char_sum_table_any(q, e)?;
            let ctx = &table.field;
            let frob = frobenius_table(ctx);
            let mut visited = vec![false; ctx.size];
            let mut roots = Vec::new();
            for x0 in 0..ctx.size {
                if visited[x0] {
                    continue;
                }
                let mut orbit = vec![x0];
                let mut y = frob[x0] as usize;
                while y != x0 {
                    orbit.push(y);
                    y = frob[y] as usize;
                }
                for &o in &orbit {
                    visited[o] = true;
                }
                // A length-e orbit is exactly one degree-e place; shorter
                // orbits belong to proper subfields (handled at their own
                // level). Its minimal polynomial ∏(X − β_i) must land in
                // F_q[X] — a strong self-check of the arithmetic.
                if orbit.len() == e as usize {
                    let mut cur = vec![1usize];
                    for &b in &orbit {
                        let neg_b = ctx.neg_idx(b);
                        let mut next = vec![0usize; cur.len() + 1];
                        for (k, &c) in cur.iter().enumerate() {
                            next[k + 1] = ctx.add_idx(next[k + 1], c);
                            next[k] = ctx.add_idx(next[k], ctx.mul_idx(c, neg_b));
                        }
                        cur = next;
                    }
                    if cur.iter().any(|&c| c >= q as usize) {
                        return Err(Error::data_bug(
                            "minimal polynomial of a Frobenius orbit has non-scalar coefficients",
                        ));
                    }
                    roots.push(x0);
                }
            }
            let expected = irreducible_count(q, e);
            if roots.len() as u64 != expected {
                return Err(Error::data_bug(format!(
                    "found {} degree-{e} places over F_{q}, expected {expected}",
                    roots.len()
                )));
            }
            levels.push(Level { e, table, roots });
        }
        Ok(OracleCtx { q, levels })
    }

    /// Coefficients of L(T) mod T⁵ as exact integers, via the truncated
    /// Euler product over places of degree ≤ 4.
    pub fn euler_series(&self, d_poly: &[u32]) -> Result<[i128; 5], Error> {
        let q = self.q;
        if d_poly.len() != 4 || d_poly[3] != 1 || d_poly.iter().any(|&c| c >= q) {
            return Err(Error::validation(
                "D must be a reduced monic cubic: [d0, d1, d2, 1]",
            ));
        }
        let inv2 = (q as u64).div_ceil(2);
        let neg_nine_half = ((q as u64 - 9 % q as u64) * inv2 % q as u64) as u32;
        let mut acc: [i128; 5] = [1, 0, 0, 0, 0];
        for level in &self.levels {
            let e = level.e as usize;
            let ctx = &level.table.field;
            let qe = (q as i128).pow(level.e);
            for &beta in &level.roots {
                // c̄ = D(β) by Horner.
                let mut val = 0usize;
                for k in (0..4).rev() {
                    val = ctx.mul_idx(val, beta);
                    val = ctx.add_scalar_idx(val, d_poly[k]);
                }
                // 4 + 27c̄² = 0 marks multiplicative reduction.
                let w = ctx.add_scalar_idx(
                    ctx.scalar_mul_idx(ctx.mul_idx(val, val), 27 % q),
                    4 % q,
                );
                let mut u = [0i128; 5];
                u[0] = 1;
                if w == 0 {
                    // (1 − εT^e)⁻¹, ε = χ(3x₀) with 3x₀ = −(9/2)c̄.
                    let eps = ctx.chi[ctx.scalar_mul_idx(val, neg_nine_half)] as i128;
                    if eps == 0 {
                        return Err(Error::data_bug(
                            "vanishing split character at a multiplicative place",
                        ));
                    }
                    for k in 1..5 {
                        u[k] = u[k - 1] * eps;
                    }
                } else {
                    // (1 − a_v T^e + q^e T^{2e})⁻¹ with a_v = −σ_e(c̄).
                    let a = -(level.table.entries[val] as i128);
                    for k in 1..5 {
                        u[k] = a * u[k - 1] - if k >= 2 { qe * u[k - 2] } else { 0 };
                    }
                }
                let mut next = [0i128; 5];
                for (i, &ai) in acc.iter().enumerate() {
                    if ai == 0 {
                        continue;
                    }
                    let mut k = 0;
                    while i + e * k < 5 {
                        next[i + e * k] += ai * u[k];
                        k += 1;
                    }
                }
                acc = next;
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::curve::{l_polynomial, CensusTables};
    use crate::ff::poly;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn place_counts_match_the_necklace_formula() {
        let oracle = OracleCtx::new(7).unwrap();
        let counts: Vec<usize> = oracle.levels.iter().map(|l| l.roots.len()).collect();
        assert_eq!(counts, vec![7, 21, 112, 588]);
    }

    #[test]
    fn euler_truncation_matches_power_sum_pipeline_on_random_curves() {
        for q in [7u32, 19] {
            let oracle = OracleCtx::new(q).unwrap();
            let tables = CensusTables::new(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(0xF0 + q as u64);
            let mut tested = 0;
            let mut saw_short = false;
            while tested < 100 {
                let d_poly = [
                    rng.gen_range(0..q),
                    rng.gen_range(0..q),
                    rng.gen_range(0..q),
                    1,
                ];
                if !poly::is_squarefree(&d_poly, q) {
                    continue;
                }
                tested += 1;
                let (lp, _) = l_polynomial(&d_poly, &tables).unwrap();
                let series = oracle.euler_series(&d_poly).unwrap();
                let m = lp.degree();
                if m < 4 {
                    saw_short = true;
                }
                for (k, &got) in series.iter().enumerate() {
                    let expected = if k <= m {
                        lp.coeffs()[k] as i128 * (q as i128).pow(k as u32)
                    } else {
                        0
                    };
                    assert_eq!(
                        got, expected,
                        "q = {q}, D = {d_poly:?}, coefficient of T^{k}"
                    );
                }
            }
            assert!(
                saw_short,
                "the sample at q = {q} should include degree-drop curves"
            );
        }
    }
}
