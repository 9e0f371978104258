//! Quasi-polynomial structure of the type counts, and type-level
//! murmuration densities.
//!
//! The reference census table records N_λ(q)/q for the five rank-0 types
//! at the 14 primes q ≡ 7 (mod 12) up to 223. Two closed forms hold
//! across the table — N_{Φ₂²} = q exactly, and N_{Φ₂³} = q(q−7)/4 with
//! the single exception q = 127 — while each column becomes an exact
//! quadratic in k = (q − r)/96 along every residue class r (mod 96) with
//! enough data points.

use std::collections::BTreeMap;

use serde::Serialize;

use super::census::CensusResult;
use super::curve::ShaValue;
use super::lpoly::five_named_types;
use crate::primes::gcd;

/// One census summary row: N_λ(q)/q for the five tabulated types in
/// table order (Φ₂², Φ₂³, Φ₂⁴, Φ₄², Φ₂²·Φ₆).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub q: u32,
    pub n_over_q: [u64; 5],
}

/// The 14 tabulated rows (primes ≡ 7 mod 12, q ≤ 223).
pub fn reference_rows() -> Vec<CensusRow> {
    let raw: [(u32, [u64; 5]); 14] = [
        (7, [1, 0, 0, 2, 4]),
        (19, [1, 3, 0, 23, 58]),
        (31, [1, 6, 1, 56, 141]),
        (43, [1, 9, 4, 107, 291]),
        (67, [1, 15, 15, 287, 742]),
        (79, [1, 18, 21, 380, 994]),
        (103, [1, 24, 42, 668, 1768]),
        (127, [1, 27, 67, 1004, 2673]),
        (139, [1, 33, 81, 1205, 3172]),
        (151, [1, 36, 93, 1388, 3694]),
        (163, [1, 39, 114, 1619, 4324]),
        (199, [1, 48, 177, 2492, 6592]),
        (211, [1, 51, 198, 2753, 7312]),
        (223, [1, 54, 229, 3122, 8265]),
    ];
    raw.iter()
        .map(|&(q, n_over_q)| CensusRow { q, n_over_q })
        .collect()
}

/// Convert a computed census into a summary row (requires q | N_λ, which
/// holds at every tabulated prime).
pub fn census_row(census: &CensusResult) -> Option<CensusRow> {
    let counts = census.named_counts();
    let q = census.q as u64;
    if counts.iter().any(|&n| n % q != 0) {
        return None;
    }
    Some(CensusRow {
        q: census.q,
        n_over_q: std::array::from_fn(|i| counts[i] / q),
    })
}

/// Reduced fraction with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    fn new(num: i128, den: i128) -> Rational {
        assert!(den != 0, "zero denominator in a fit coefficient");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num.unsigned_abs() as u64, den.unsigned_abs() as u64).max(1) as i128;
        Rational {
            num: (sign * num / g) as i64,
            den: (sign * den / g) as i64,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        (self.den == 1).then_some(self.num)
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Exact quadratic fit for one (residue class, type column) pair.
#[derive(Debug, Clone, Serialize)]
pub struct ClassFit {
    /// q mod 96.
    pub residue: u32,
    pub qs: Vec<u32>,
    /// Display name of the type column.
    pub column: String,
    /// p(k) = a·k² + b·k + c with k = (q − residue)/96.
    pub coeffs: [Rational; 3],
    /// Points beyond the three defining ones that the fit reproduces
    /// exactly (with three rows the fit is exactly determined).
    pub extra_points_checked: usize,
    pub extra_points_match: bool,
}

/// Report of every structural check on a set of census rows.
#[derive(Debug, Serialize)]
pub struct QuasiReport {
    pub rows_used: usize,
    /// (q, N_{Φ₂²}/q == 1) per row.
    pub phi22_exact: Vec<(u32, bool)>,
    /// (q, N_{Φ₂³}/q == (q−7)/4) per row.
    pub phi23_line: Vec<(u32, bool)>,
    /// Rows where the Φ₂³ line fails.
    pub phi23_exceptions: Vec<u32>,
    /// Exact quadratic fits per residue class (mod 96) with ≥ 3 rows,
    /// one per type column.
    pub class_fits: Vec<ClassFit>,
    /// Residue classes present but with fewer than 3 rows (no fit).
    pub thin_classes: Vec<(u32, usize)>,
}

impl QuasiReport {
    /// The fit for one (residue, column-index) pair, if present.
    pub fn fit_for(&self, residue: u32, column_index: usize) -> Option<&ClassFit> {
        let name = five_named_types()[column_index].to_string();
        self.class_fits
            .iter()
            .find(|f| f.residue == residue && f.column == name)
    }
}

/// Fit p(k) = a·k² + b·k + c exactly through the first three points and
/// verify the rest; all arithmetic exact (i128 Cramer).
fn quadratic_fit(points: &[(i128, i128)]) -> ([Rational; 3], usize, bool) {
    let (k0, y0) = points[0];
    let (k1, y1) = points[1];
    let (k2, y2) = points[2];
    let det = k0 * k0 * (k1 - k2) - k0 * (k1 * k1 - k2 * k2) + (k1 * k1 * k2 - k1 * k2 * k2);
    let da = y0 * (k1 - k2) - k0 * (y1 - y2) + (y1 * k2 - k1 * y2);
    let db = k0 * k0 * (y1 - y2) - y0 * (k1 * k1 - k2 * k2) + (k1 * k1 * y2 - y1 * k2 * k2);
    let dc = k0 * k0 * (k1 * y2 - y1 * k2) - k0 * (k1 * k1 * y2 - y1 * k2 * k2)
        + y0 * (k1 * k1 * k2 - k1 * k2 * k2);
    let mut extra_match = true;
    for &(k, y) in &points[3..] {
        if det * y != da * k * k + db * k + dc {
            extra_match = false;
        }
    }
    (
        [
            Rational::new(da, det),
            Rational::new(db, det),
            Rational::new(dc, det),
        ],
        points.len() - 3,
        extra_match,
    )
}

/// Check the closed forms and fit the per-class quadratics. Mismatches
/// are reported, never raised as errors.
pub fn quasi_polynomial_check(rows: &[CensusRow]) -> QuasiReport {
    let mut phi22_exact = Vec::new();
    let mut phi23_line = Vec::new();
    let mut phi23_exceptions = Vec::new();
    for row in rows {
        phi22_exact.push((row.q, row.n_over_q[0] == 1));
        let line_ok = 4 * row.n_over_q[1] == (row.q as u64 - 7);
        phi23_line.push((row.q, line_ok));
        if !line_ok {
            phi23_exceptions.push(row.q);
        }
    }

    let mut classes: BTreeMap<u32, Vec<&CensusRow>> = BTreeMap::new();
    for row in rows {
        classes.entry(row.q % 96).or_default().push(row);
    }
    let named = five_named_types();
    let mut class_fits = Vec::new();
    let mut thin_classes = Vec::new();
    for (residue, class_rows) in &classes {
        if class_rows.len() < 3 {
            thin_classes.push((*residue, class_rows.len()));
            continue;
        }
        let mut sorted = class_rows.clone();
        sorted.sort_by_key(|r| r.q);
        let qs: Vec<u32> = sorted.iter().map(|r| r.q).collect();
        for (col, ty) in named.iter().enumerate() {
            let points: Vec<(i128, i128)> = sorted
                .iter()
                .map(|r| {
                    (
                        ((r.q - residue) / 96) as i128,
                        r.n_over_q[col] as i128,
                    )
                })
                .collect();
            let (coeffs, extra, ok) = quadratic_fit(&points);
            class_fits.push(ClassFit {
                residue: *residue,
                qs: qs.clone(),
                column: ty.to_string(),
                coeffs,
                extra_points_checked: extra,
                extra_points_match: ok,
            });
        }
    }
    QuasiReport {
        rows_used: rows.len(),
        phi22_exact,
        phi23_line,
        phi23_exceptions,
        class_fits,
        thin_classes,
    }
}

/// Murmuration density δ_s(d) = Σ_λ N_λ·p_d(λ) / Σ_λ N_λ over the types
/// whose (constant) Ш equals s. None when the stratum is empty.
pub fn murmuration_density(census: &CensusResult, s: u64, d: u64) -> Option<f64> {
    let target = ShaValue::Order(s);
    let mut weight = 0u64;
    let mut acc = 0i64;
    for (ty, stats) in &census.types {
        if stats.sha_values.len() == 1 && stats.sha_values.contains(&target) {
            weight += stats.count;
            acc += stats.count as i64 * ty.power_sum(d);
        }
    }
    (weight > 0).then(|| acc as f64 / weight as f64)
}
