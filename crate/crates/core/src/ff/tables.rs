//! Character-sum tables σ_d(c) = Σ_{x ∈ F_{q^d}} χ(x³ + x + c).
//!
//! These tables turn fiber-trace computation into a single array lookup:
//! a good fiber over t contributes trace −σ_d(D(t)), and (because the
//! node's tangent-direction character is what the incomplete sum leaves
//! behind) the same formula covers multiplicative fibers automatically.
//!
//! Build strategy: σ is the additive convolution of the histogram
//! N(v) = #{x : x³ + x = v} (reflected) with the character χ, over the
//! additive group (Z_q)^d. A naive per-axis DFT of length q along each of
//! the d axes computes it in O(d·q^{d+1}) work instead of O(q^{2d}),
//! which is what makes on-demand degree-3 tables affordable. Entries are
//! integers; the float round-trip is checked to tight tolerance and the
//! results are validated against the Weil bound before use.

use num_complex::Complex64;

use super::field::FieldCtx;
use crate::error::Error;

/// Transient + persistent memory allowed for one table build.
const MEMORY_BUDGET_BYTES: u64 = 4 << 30;

/// Character-sum table for one (q, d), together with the field context
/// that interprets its packed indices.
pub struct CharSumTable {
    pub q: u32,
    pub d: u32,
    pub field: FieldCtx,
    /// entries[c] = Σ_x χ(x³ + x + c), indexed by packed c.
    pub entries: Vec<i16>,
}

/// Integer floor square root.
fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

impl CharSumTable {
    /// Weil bound for complete character sums of this cubic: 2√(q^d).
    pub fn hasse_bound(&self) -> i64 {
        isqrt(4 * (self.field.size as u64)) as i64
    }

    /// Packed indices of the c with 4 + 27c² = 0, where the fiber is
    /// singular. There are 0 or 2 of them (−4/27 is a nonzero scalar).
    pub fn bad_c(&self) -> Vec<usize> {
        let f = &self.field;
        let q = self.q as u64;
        let inv27 = crate::primes::mod_inverse(27 % q, q).unwrap();
        let target_scalar = ((q - 4 % q) % q * inv27 % q) as usize; // -4/27 in F_q
        let mut out: Vec<usize> = (0..f.size)
            .filter(|&c| f.mul_idx(c, c) == target_scalar)
            .collect();
        out.sort_unstable();
        out
    }
}

/// Per-axis DFT over the additive group (Z_q)^d, in place.
fn dft_axes(data: &mut [Complex64], q: usize, d: usize, inverse: bool) {
    let n = data.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let w: Vec<Complex64> = (0..q)
        .map(|r| {
            let ang = sign * 2.0 * std::f64::consts::PI * r as f64 / q as f64;
            Complex64::new(ang.cos(), ang.sin())
        })
        .collect();
    let mut line = vec![Complex64::new(0.0, 0.0); q];
    let mut out = vec![Complex64::new(0.0, 0.0); q];
    let mut stride = 1usize;
    for _axis in 0..d {
        let block = stride * q;
        let mut block_start = 0;
        while block_start < n {
            for off in 0..stride {
                let base = block_start + off;
                for (j, l) in line.iter_mut().enumerate() {
                    *l = data[base + j * stride];
                }
                for (k, o) in out.iter_mut().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, &lj) in line.iter().enumerate() {
                        acc += lj * w[(j * k) % q];
                    }
                    *o = acc;
                }
                for (k, &o) in out.iter().enumerate() {
                    data[base + k * stride] = o;
                }
            }
            block_start += block;
        }
        stride *= q;
    }
}

fn build_entries(field: &FieldCtx) -> Result<Vec<i16>, Error> {
    let n = field.size;
    let q = field.q as usize;
    let d = field.d as usize;

    // R(u) = N(-u) where N is the value histogram of x³ + x; then
    // σ(c) = (R * χ)(c) as a cyclic convolution over (Z_q)^d.
    let mut rhist = vec![Complex64::new(0.0, 0.0); n];
    for x in 0..n {
        let v = field.add_idx(field.mul_idx(field.mul_idx(x, x), x), x);
        rhist[field.neg_idx(v)] += Complex64::new(1.0, 0.0);
    }
    let mut acc: Vec<Complex64> = field
        .chi
        .iter()
        .map(|&c| Complex64::new(c as f64, 0.0))
        .collect();
    dft_axes(&mut rhist, q, d, false);
    dft_axes(&mut acc, q, d, false);
    for (a, r) in acc.iter_mut().zip(rhist.iter()) {
        *a *= *r;
    }
    drop(rhist);
    dft_axes(&mut acc, q, d, true);

    let scale = 1.0 / n as f64;
    let mut entries = vec![0i16; n];
    let mut max_err = 0.0f64;
    for (e, &a) in entries.iter_mut().zip(acc.iter()) {
        let re = a.re * scale;
        let im = a.im * scale;
        let r = re.round();
        max_err = max_err.max((re - r).abs()).max(im.abs());
        *e = r as i16;
    }
    if max_err > 0.05 {
        return Err(Error::data_bug(format!(
            "character-sum convolution failed to round-trip to integers (max deviation {max_err:.3e})"
        )));
    }
    Ok(entries)
}

fn validate(table: &CharSumTable) -> Result<(), Error> {
    let hasse = table.hasse_bound();
    let bad = table.bad_c();
    if bad.len() > 2 {
        return Err(Error::data_bug(format!(
            "expected at most 2 singular c values, found {}",
            bad.len()
        )));
    }
    let total: i64 = table.entries.iter().map(|&e| e as i64).sum();
    if total != 0 {
        return Err(Error::data_bug(format!(
            "complete character sum over all c must vanish, got {total}"
        )));
    }
    for (c, &e) in table.entries.iter().enumerate() {
        let e = e as i64;
        if e.abs() > hasse {
            return Err(Error::data_bug(format!(
                "entry at c={c} violates the Weil bound: |{e}| > {hasse}"
            )));
        }
        if bad.binary_search(&c).is_ok() && e.abs() != 1 {
            return Err(Error::data_bug(format!(
                "singular fiber at c={c} must have entry ±1, got {e}"
            )));
        }
    }
    Ok(())
}

/// Build the character-sum table for F_{q^d}. The public menu of
/// extension degrees is 1..=3 (what the census consumes); the local-factor
/// oracle uses `char_sum_table_any` for degree 4.
pub fn char_sum_table(q: u32, d: u32) -> Result<CharSumTable, Error> {
    if !(1..=3).contains(&d) {
        return Err(Error::validation(format!(
            "char_sum_table supports extension degrees 1..=3, got {d}"
        )));
    }
    char_sum_table_any(q, d)
}

pub(crate) fn char_sum_table_any(q: u32, d: u32) -> Result<CharSumTable, Error> {
    let size = (q as u64)
        .checked_pow(d)
        .ok_or_else(|| Error::resource(format!("q^d overflows for q={q}, d={d}")))?;
    let bytes = size * 40; // two complex temporaries + entries
    if bytes > MEMORY_BUDGET_BYTES {
        return Err(Error::resource(format!(
            "character table for q={q}, d={d} needs ~{} MB, over the {} MB budget; use a smaller q",
            bytes >> 20,
            MEMORY_BUDGET_BYTES >> 20
        )));
    }
    let field = FieldCtx::new(q, d)?;
    let entries = build_entries(&field)?;
    let table = CharSumTable {
        q,
        d,
        field,
        entries,
    };
    validate(&table)?;
    Ok(table)
}
