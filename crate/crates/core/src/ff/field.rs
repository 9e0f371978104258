//! Finite-field arithmetic for F_{q^d} with table-friendly packed indices.
//!
//! An element of F_{q^d} = F_q[α]/(modulus) with coordinates
//! (c_0, …, c_{d-1}) in the basis (1, α, …, α^{d-1}) is addressed by the
//! packed index c_0 + c_1·q + … + c_{d-1}·q^{d-1}. Packing is chosen so
//! that adding a base-field scalar only moves coordinate 0, which the
//! census sweep exploits, and so that the additive group is the product
//! group (Z_q)^d, which the character-table convolution exploits.
//!
//! The irreducible modulus for each (q, d) is located by a fixed-seed
//! search, so indices mean the same element in every run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly;
use crate::error::Error;
use crate::primes::{factorize, is_prime};

/// Seed for the deterministic modulus search.
const MODULUS_SEED: u64 = 0x5EED;
/// Seed for the deterministic multiplicative-generator search.
const GENERATOR_SEED: u64 = 0x9E37;

/// Maximum extension degree the packed representation supports.
pub const MAX_EXT_DEGREE: u32 = 6;

/// Arithmetic context for F_{q^d} acting on packed element indices.
pub struct FieldCtx {
    pub q: u32,
    pub d: u32,
    /// q^d, the number of elements.
    pub size: usize,
    /// Monic irreducible modulus, ascending coefficients, length d+1.
    modulus: Vec<u32>,
    /// red[k] = coordinates of α^(d+k), for k in 0..d-1.
    red: Vec<Vec<u32>>,
    /// Quadratic character by packed index; χ(0) = 0.
    pub chi: Vec<i8>,
}

impl FieldCtx {
    pub fn new(q: u32, d: u32) -> Result<FieldCtx, Error> {
        if !is_prime(q as u64) || q < 5 {
            return Err(Error::validation(format!(
                "q must be a prime >= 5 (fields of characteristic 2 and 3 are out of scope), got {q}"
            )));
        }
        if d == 0 || d > MAX_EXT_DEGREE {
            return Err(Error::validation(format!(
                "extension degree must be in 1..={MAX_EXT_DEGREE}, got {d}"
            )));
        }
        let size_u64 = (q as u64).checked_pow(d).unwrap();
        if size_u64 > (1 << 31) {
            return Err(Error::resource(format!(
                "field F_{{{q}^{d}}} has {size_u64} elements, beyond the packed-index range; use a smaller q"
            )));
        }
        let size = size_u64 as usize;
        let modulus = if d == 1 {
            vec![0, 1]
        } else {
            poly::find_irreducible(q, d, MODULUS_SEED)
        };
        // Reduction rows: α^d = -(m_0 + … + m_{d-1} α^{d-1}), then multiply up.
        let du = d as usize;
        let mut red: Vec<Vec<u32>> = Vec::new();
        if d >= 2 {
            let first: Vec<u32> = (0..du).map(|j| (q - modulus[j] % q) % q).collect();
            red.push(first);
            for k in 1..du - 1 {
                let prev = &red[k - 1];
                // α^(d+k) = α · α^(d+k-1): shift coordinates up, reduce the overflow.
                let mut cur = vec![0u32; du];
                cur[1..du].copy_from_slice(&prev[..du - 1]);
                let top = prev[du - 1] as u64;
                if top != 0 {
                    for j in 0..du {
                        cur[j] = ((cur[j] as u64 + top * red[0][j] as u64) % q as u64) as u32;
                    }
                }
                red.push(cur);
            }
        }
        let mut ctx = FieldCtx {
            q,
            d,
            size,
            modulus,
            red,
            chi: Vec::new(),
        };
        ctx.chi = ctx.build_chi()?;
        Ok(ctx)
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn unpack(&self, mut idx: usize, out: &mut [u32]) {
        let q = self.q as usize;
        for o in out.iter_mut().take(self.d as usize) {
            *o = (idx % q) as u32;
            idx /= q;
        }
    }

    #[inline]
    pub fn pack(&self, coords: &[u32]) -> usize {
        let q = self.q as usize;
        let mut idx = 0usize;
        for &c in coords.iter().take(self.d as usize).rev() {
            idx = idx * q + c as usize;
        }
        idx
    }

    #[inline]
    pub fn add_idx(&self, a: usize, b: usize) -> usize {
        let (mut ca, mut cb) = ([0u32; 6], [0u32; 6]);
        self.unpack(a, &mut ca);
        self.unpack(b, &mut cb);
        let mut out = [0u32; 6];
        for j in 0..self.d as usize {
            out[j] = (ca[j] + cb[j]) % self.q;
        }
        self.pack(&out)
    }

    #[inline]
    pub fn neg_idx(&self, a: usize) -> usize {
        let mut ca = [0u32; 6];
        self.unpack(a, &mut ca);
        let mut out = [0u32; 6];
        for j in 0..self.d as usize {
            out[j] = (self.q - ca[j]) % self.q;
        }
        self.pack(&out)
    }

    /// Multiply a packed element by a base-field scalar.
    #[inline]
    pub fn scalar_mul_idx(&self, a: usize, s: u32) -> usize {
        let mut ca = [0u32; 6];
        self.unpack(a, &mut ca);
        let mut out = [0u32; 6];
        for j in 0..self.d as usize {
            out[j] = ((ca[j] as u64 * s as u64) % self.q as u64) as u32;
        }
        self.pack(&out)
    }

    /// Add a base-field scalar (moves only coordinate 0).
    #[inline]
    pub fn add_scalar_idx(&self, a: usize, s: u32) -> usize {
        let q = self.q as usize;
        let c0 = a % q;
        let shifted = (c0 + s as usize) % q;
        a - c0 + shifted
    }

    pub fn mul_idx(&self, a: usize, b: usize) -> usize {
        let du = self.d as usize;
        if du == 1 {
            return (a as u64 * b as u64 % self.q as u64) as usize;
        }
        let (mut ca, mut cb) = ([0u32; 6], [0u32; 6]);
        self.unpack(a, &mut ca);
        self.unpack(b, &mut cb);
        let mut prod = [0u64; 11];
        for i in 0..du {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..du {
                prod[i + j] += ca[i] as u64 * cb[j] as u64;
            }
        }
        let q = self.q as u64;
        for i in (du..2 * du - 1).rev() {
            let c = prod[i] % q;
            if c != 0 {
                let row = &self.red[i - du];
                for j in 0..du {
                    prod[j] += c * row[j] as u64;
                }
            }
            prod[i] = 0;
        }
        let mut out = [0u32; 6];
        for j in 0..du {
            out[j] = (prod[j] % q) as u32;
        }
        self.pack(&out)
    }

    pub fn pow_idx(&self, a: usize, mut e: u64) -> usize {
        let mut acc = 1usize; // packed representation of the element 1
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_idx(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_idx(base, base);
            }
        }
        acc
    }

    /// Quadratic character table: walk the powers of a multiplicative
    /// generator, assigning +1 to even powers and -1 to odd powers.
    fn build_chi(&self) -> Result<Vec<i8>, Error> {
        let order = self.size as u64 - 1;
        let order_primes: Vec<u64> = factorize(order).into_iter().map(|(p, _)| p).collect();
        let mut rng =
            ChaCha8Rng::seed_from_u64(GENERATOR_SEED ^ ((self.q as u64) << 8) ^ self.d as u64);
        let gen = loop {
            let cand = rng.gen_range(1..self.size);
            if order_primes
                .iter()
                .all(|&p| self.pow_idx(cand, order / p) != 1)
            {
                break cand;
            }
        };
        let mut chi = vec![0i8; self.size];
        let mut cur = 1usize;
        let mut seen = 0u64;
        for k in 0..order {
            debug_assert_eq!(chi[cur], 0);
            chi[cur] = if k % 2 == 0 { 1 } else { -1 };
            seen += 1;
            cur = self.mul_idx(cur, gen);
        }
        if cur != 1 || seen != order {
            return Err(Error::data_bug(
                "multiplicative generator walk failed to close",
            ));
        }
        Ok(chi)
    }
}

/// Packed coordinates of t, t², t³ for every element of F_{q^d}, stored
/// planar (`plane(p)[axis * size + i]`), so census loops touch contiguous
/// memory per axis.
pub struct PowerCoords {
    pub d: usize,
    pub size: usize,
    planes: [Vec<u32>; 3],
}

impl PowerCoords {
    pub fn build(ctx: &FieldCtx) -> PowerCoords {
        let d = ctx.d as usize;
        let size = ctx.size;
        let mut planes = [
            vec![0u32; d * size],
            vec![0u32; d * size],
            vec![0u32; d * size],
        ];
        let mut coords = [0u32; 6];
        for t in 0..size {
            let t2 = ctx.mul_idx(t, t);
            let t3 = ctx.mul_idx(t2, t);
            for (p, v) in [t, t2, t3].into_iter().enumerate() {
                ctx.unpack(v, &mut coords);
                for axis in 0..d {
                    planes[p][axis * size + t] = coords[axis];
                }
            }
        }
        PowerCoords { d, size, planes }
    }

    /// Coordinates of t^(p+1) along `axis`, one entry per element index.
    #[inline]
    pub fn plane(&self, p: usize, axis: usize) -> &[u32] {
        &self.planes[p][axis * self.size..(axis + 1) * self.size]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(FieldCtx::new(4, 1).is_err());
        assert!(FieldCtx::new(3, 2).is_err());
        assert!(FieldCtx::new(7, 0).is_err());
        assert!(FieldCtx::new(7, 9).is_err());
    }

    #[test]
    fn field_axioms_spot_check() {
        for (q, d) in [(7u32, 1u32), (7, 2), (7, 3), (19, 2), (5, 3)] {
            let f = FieldCtx::new(q, d).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            for _ in 0..300 {
                let a = rng.gen_range(0..f.size);
                let b = rng.gen_range(0..f.size);
                let c = rng.gen_range(0..f.size);
                assert_eq!(f.mul_idx(a, b), f.mul_idx(b, a));
                assert_eq!(
                    f.mul_idx(a, f.mul_idx(b, c)),
                    f.mul_idx(f.mul_idx(a, b), c)
                );
                assert_eq!(
                    f.mul_idx(a, f.add_idx(b, c)),
                    f.add_idx(f.mul_idx(a, b), f.mul_idx(a, c))
                );
                assert_eq!(f.add_idx(a, f.neg_idx(a)), 0);
                assert_eq!(f.mul_idx(a, 1), a);
                if a != 0 {
                    let inv = f.pow_idx(a, f.size as u64 - 2);
                    assert_eq!(f.mul_idx(a, inv), 1);
                }
            }
        }
    }

    #[test]
    fn chi_is_multiplicative_and_balanced() {
        for (q, d) in [(7u32, 1u32), (7, 2), (13, 2), (5, 3)] {
            let f = FieldCtx::new(q, d).unwrap();
            let plus: i64 = f.chi.iter().map(|&v| v as i64).sum();
            assert_eq!(plus, 0, "character values must sum to zero");
            assert_eq!(f.chi[0], 0);
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            for _ in 0..200 {
                let a = rng.gen_range(1..f.size);
                let b = rng.gen_range(1..f.size);
                assert_eq!(
                    f.chi[f.mul_idx(a, b)],
                    f.chi[a] * f.chi[b],
                    "χ must be multiplicative"
                );
            }
            // On base-field scalars, χ is the Legendre symbol raised to the
            // norm exponent 1 + q + … + q^(d-1) ≡ d (mod 2): Legendre itself
            // for odd d, identically +1 on nonzero scalars for even d.
            for c in 1..q {
                let got = f.chi[c as usize];
                if d % 2 == 1 {
                    assert_eq!(got, poly::legendre(c, q));
                } else {
                    assert_eq!(got, 1);
                }
            }
        }
    }

    #[test]
    fn scalar_helpers_match_generic_ops() {
        let f = FieldCtx::new(7, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = rng.gen_range(0..f.size);
            let s = rng.gen_range(0..7u32);
            assert_eq!(f.add_scalar_idx(a, s), f.add_idx(a, s as usize));
            assert_eq!(f.scalar_mul_idx(a, s), f.mul_idx(a, s as usize));
        }
    }

    #[test]
    fn power_coords_match_mul() {
        let f = FieldCtx::new(7, 2).unwrap();
        let pc = PowerCoords::build(&f);
        let mut coords = [0u32; 6];
        for t in 0..f.size {
            let t3 = f.mul_idx(f.mul_idx(t, t), t);
            f.unpack(t3, &mut coords);
            for (axis, &c) in coords.iter().enumerate().take(2) {
                assert_eq!(pc.plane(2, axis)[t], c);
            }
        }
    }
}
