//! Unitized L-polynomials and their cyclotomic structure.
//!
//! For a curve in the family, the unitized polynomial
//! L̃(U) = U^m · L(1/(qU)) is monic with integer coefficients, satisfies
//! the palindromy c_{m−i} = ε·c_i forced by the functional equation, and
//! — this is the Kronecker step — has all roots on the unit circle, so it
//! is a product of cyclotomic polynomials. Since m ≤ 4, only Φ_n with
//! φ(n) ≤ 4 can occur: n ∈ {1, 2, 3, 4, 5, 6, 8, 10, 12}.

use serde::Serialize;

use crate::error::Error;
use crate::primes::{gcd, mobius, totient};

/// The indices n with φ(n) ≤ 4, i.e. every cyclotomic polynomial that can
/// divide a unitized L-polynomial of degree ≤ 4.
pub const CYCLOTOMIC_MENU: [u32; 9] = [1, 2, 3, 4, 5, 6, 8, 10, 12];

/// Coefficients of Φ_n, descending (monic first).
pub fn cyclotomic_poly(n: u32) -> &'static [i64] {
    match n {
        1 => &[1, -1],
        2 => &[1, 1],
        3 => &[1, 1, 1],
        4 => &[1, 0, 1],
        5 => &[1, 1, 1, 1, 1],
        6 => &[1, -1, 1],
        8 => &[1, 0, 0, 0, 1],
        10 => &[1, -1, 1, -1, 1],
        12 => &[1, 0, -1, 0, 1],
        _ => panic!("Φ_{n} is outside the degree-4 menu"),
    }
}

/// A monic integer polynomial with constant term recovered from an
/// L-polynomial by the unitization U ↦ 1/(qU); coefficients are stored
/// descending, so `coeffs[0] == 1` is the leading term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitizedLPolynomial {
    coeffs: Vec<i64>,
}

impl UnitizedLPolynomial {
    pub fn new(coeffs: Vec<i64>) -> Result<UnitizedLPolynomial, Error> {
        if coeffs.is_empty() || coeffs[0] != 1 {
            return Err(Error::validation(
                "a unitized L-polynomial is monic: descending coefficients starting with 1",
            ));
        }
        Ok(UnitizedLPolynomial { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Descending coefficients, leading term first.
    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn eval_at_one(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    /// +1 or −1 if c_{m−i} = ε·c_i for all i; None if neither sign works.
    /// The zero-degree polynomial is palindromic with ε = +1.
    pub fn palindromy_sign(&self) -> Option<i8> {
        for eps in [1i64, -1] {
            let m = self.degree();
            if (0..=m).all(|i| self.coeffs[m - i] == eps * self.coeffs[i]) {
                return Some(eps as i8);
            }
        }
        None
    }

    /// The functional-equation sign ε = c_m (for products of cyclotomics
    /// the constant coefficient is ±1); +1 for the degree-0 polynomial.
    pub fn epsilon(&self) -> i8 {
        let m = self.degree();
        if m == 0 {
            1
        } else {
            self.coeffs[m] as i8
        }
    }

    /// Power sum p_k = Σ_j ζ_j^k of the roots, via Newton's identities
    /// (valid for any monic polynomial; e_i = 0 beyond the degree).
    pub fn power_sum(&self, k: usize) -> i64 {
        let m = self.degree();
        // Elementary symmetric functions: c_i = (−1)^i e_i.
        let e = |i: usize| -> i64 {
            if i > m {
                0
            } else if i.is_multiple_of(2) {
                self.coeffs[i]
            } else {
                -self.coeffs[i]
            }
        };
        let mut p = vec![0i64; k + 1];
        for j in 1..=k {
            // p_j = Σ_{i=1}^{j-1} (−1)^{i−1} e_i p_{j−i} + (−1)^{j−1} j e_j
            let mut acc = 0i64;
            for i in 1..j {
                let term = e(i) * p[j - i];
                acc += if i % 2 == 1 { term } else { -term };
            }
            let last = j as i64 * e(j);
            acc += if j % 2 == 1 { last } else { -last };
            p[j] = acc;
        }
        p[k]
    }
}

/// A multiset of cyclotomic indices, sorted ascending; the type of a
/// curve is the multiset with L̃ = ∏_j Φ_{n_j}.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CyclotomicType {
    indices: Vec<u32>,
}

impl CyclotomicType {
    pub fn new(mut indices: Vec<u32>) -> CyclotomicType {
        for &n in &indices {
            cyclotomic_poly(n); // panics outside the menu
        }
        indices.sort_unstable();
        CyclotomicType { indices }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn contains_one(&self) -> bool {
        self.indices.contains(&1)
    }

    pub fn degree(&self) -> usize {
        self.indices.iter().map(|&n| totient(n as u64) as usize).sum()
    }

    /// Reconstruct ∏ Φ_{n_j} as a unitized polynomial.
    pub fn product(&self) -> UnitizedLPolynomial {
        let mut acc = vec![1i64];
        for &n in &self.indices {
            acc = mul_desc(&acc, cyclotomic_poly(n));
        }
        UnitizedLPolynomial::new(acc).expect("cyclotomic products are monic")
    }

    /// L̃(1) = ∏ Φ_{n_j}(1): zero iff some n_j = 1; Φ_{p^k}(1) = p and
    /// Φ_n(1) = 1 for n with at least two prime factors.
    pub fn l_tilde_at_one(&self) -> i64 {
        self.indices
            .iter()
            .map(|&n| cyclotomic_poly(n).iter().sum::<i64>())
            .product()
    }

    /// Power sum p_d = Σ_j c_{n_j}(d) of the roots at exponent d, where
    /// c_n(d) is a Ramanujan sum. The normalized fiber trace of the curve
    /// at a degree-1 place of F_{q^d} is a_v = −p_d.
    pub fn power_sum(&self, d: u64) -> i64 {
        self.indices.iter().map(|&n| ramanujan_sum(n as u64, d)).sum()
    }

    /// lcm of the indices: the period of d ↦ p_d.
    pub fn period(&self) -> u64 {
        self.indices
            .iter()
            .fold(1u64, |acc, &n| acc / gcd(acc, n as u64) * n as u64)
    }
}

impl std::fmt::Display for CyclotomicType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.indices.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        let mut i = 0;
        while i < self.indices.len() {
            let n = self.indices[i];
            let mut j = i;
            while j < self.indices.len() && self.indices[j] == n {
                j += 1;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if j - i == 1 {
                write!(f, "Phi{n}")?;
            } else {
                write!(f, "Phi{n}^{}", j - i)?;
            }
            i = j;
        }
        Ok(())
    }
}

/// Product of two descending-coefficient integer polynomials.
fn mul_desc(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Exact division of descending-coefficient polynomials by a monic
/// divisor; None if the remainder is nonzero.
fn div_exact_desc(a: &[i64], b: &[i64]) -> Option<Vec<i64>> {
    if a.len() < b.len() {
        return None;
    }
    debug_assert_eq!(b[0], 1);
    let qlen = a.len() - b.len() + 1;
    let mut rem = a.to_vec();
    let mut quo = vec![0i64; qlen];
    for i in 0..qlen {
        let c = rem[i];
        quo[i] = c;
        if c != 0 {
            for (j, &bj) in b.iter().enumerate() {
                rem[i + j] -= c * bj;
            }
        }
    }
    if rem[qlen..].iter().all(|&r| r == 0) {
        Some(quo)
    } else {
        None
    }
}

/// Factor a unitized L-polynomial over the cyclotomic menu by greedy
/// exact trial division (valid because factorization over ℚ is unique).
/// Failure means the polynomial has a root off the unit circle — a
/// violation of the Kronecker step — and is reported as a data bug.
pub fn cyclotomic_factor(p: &UnitizedLPolynomial) -> Result<CyclotomicType, Error> {
    let mut cur = p.coeffs().to_vec();
    let mut indices = Vec::new();
    'outer: while cur.len() > 1 {
        for &n in &CYCLOTOMIC_MENU {
            if let Some(q) = div_exact_desc(&cur, cyclotomic_poly(n)) {
                indices.push(n);
                cur = q;
                continue 'outer;
            }
        }
        return Err(Error::data_bug(format!(
            "not a product of cyclotomic polynomials: {:?}",
            p.coeffs()
        )));
    }
    Ok(CyclotomicType::new(indices))
}

/// Ramanujan sum c_n(d) = Σ_{k coprime to n} e(kd/n)
///            = μ(n/g) · φ(n) / φ(n/g),  g = gcd(n, d).
pub fn ramanujan_sum(n: u64, d: u64) -> i64 {
    if n == 1 {
        return 1;
    }
    let g = gcd(n, d);
    let m = n / g;
    let mu = mobius(m);
    if mu == 0 {
        return 0;
    }
    let phi_n = totient(n);
    let phi_m = totient(m);
    debug_assert_eq!(phi_n % phi_m, 0);
    mu * (phi_n / phi_m) as i64
}

/// The five rank-0 types tabulated in the reference census, in table
/// order: Φ₂², Φ₂³, Φ₂⁴, Φ₄², Φ₂²·Φ₆.
pub fn five_named_types() -> [CyclotomicType; 5] {
    [
        CyclotomicType::new(vec![2, 2]),
        CyclotomicType::new(vec![2, 2, 2]),
        CyclotomicType::new(vec![2, 2, 2, 2]),
        CyclotomicType::new(vec![4, 4]),
        CyclotomicType::new(vec![2, 2, 6]),
    ]
}
