//! Small arithmetic utilities shared by every module: prime sieves,
//! multiplicative-function tables, gcd/inverse, and factorization by
//! trial division (all inputs here are far below 2^53).

/// Primes up to `n` inclusive, by sieve of Eratosthenes.
pub fn primes_upto(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    out
}

/// First `k` primes.
pub fn first_primes(k: usize) -> Vec<u64> {
    // p_k < k(ln k + ln ln k) for k >= 6; pad the bound for small k.
    let bound = if k < 6 {
        13
    } else {
        let kf = k as f64;
        (kf * (kf.ln() + kf.ln().ln()) * 1.2) as u64 + 10
    };
    let mut ps = primes_upto(bound);
    while ps.len() < k {
        ps = primes_upto(bound * 2);
    }
    ps.truncate(k);
    ps
}

/// Deterministic primality by trial division (inputs are small).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factorization by trial division: (prime, exponent) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    let mut phi = n;
    for (p, _) in factorize(n) {
        phi -= phi / p;
    }
    phi
}

/// Number of divisors tau(n).
pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Möbius function mu(n).
pub fn mobius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Sieve of mu(1..=n), linear in n: mu[0] is unused.
pub fn mobius_sieve(n: usize) -> Vec<i8> {
    let mut mu = vec![0i8; n + 1];
    if n == 0 {
        return mu;
    }
    mu[1] = 1;
    let mut primes = Vec::new();
    let mut is_comp = vec![false; n + 1];
    for i in 2..=n {
        if !is_comp[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > n {
                break;
            }
            is_comp[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// Greatest common divisor.
pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Extended gcd: returns (g, x, y) with a*x + b*y = g.
pub fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Inverse of `a` modulo `m` (None when gcd(a, m) != 1).
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = egcd((a % m) as i64, m as i64);
    if g != 1 {
        None
    } else {
        Some(x.rem_euclid(m as i64) as u64)
    }
}

/// Modular exponentiation (u128 intermediate; moduli stay below 2^63).
pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mm = m as u128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % mm;
        }
        b = b * b % mm;
        exp >>= 1;
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_25_primes_end_at_97() {
        let ps = first_primes(25);
        assert_eq!(ps.len(), 25);
        assert_eq!(ps[0], 2);
        assert_eq!(ps[24], 97);
    }

    #[test]
    fn totient_and_small_values() {
        assert_eq!(totient(1), 1);
        assert_eq!(totient(12), 4);
        assert_eq!(totient(97), 96);
    }

    #[test]
    fn mobius_sieve_matches_pointwise() {
        let mu = mobius_sieve(500);
        for n in 1..=500u64 {
            assert_eq!(mu[n as usize] as i64, mobius(n), "mu({n})");
        }
    }

    #[test]
    fn mod_inverse_roundtrip() {
        for m in [5u64, 97, 1000, 9973] {
            for a in 1..m.min(50) {
                if gcd(a, m) == 1 {
                    let inv = mod_inverse(a, m).unwrap();
                    assert_eq!(a * inv % m, 1, "a={a} m={m}");
                }
            }
        }
    }

    #[test]
    fn divisor_count_small() {
        assert_eq!(divisor_count(1), 1);
        assert_eq!(divisor_count(12), 6);
        assert_eq!(divisor_count(2520), 48);
    }
}
