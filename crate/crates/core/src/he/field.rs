//! Arithmetic in Z_q for a 64-bit prime q.

use rand::Rng;

/// 2^61 - 1, a Mersenne prime.
pub const DEFAULT_MODULUS: u64 = (1u64 << 61) - 1;

pub fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 + b as u128) % q as u128) as u64
}

pub fn sub_mod(a: u64, b: u64, q: u64) -> u64 {
    let (a, b) = (a % q, b % q);
    if a >= b {
        a - b
    } else {
        q - (b - a)
    }
}

pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

/// `base^exp mod q`, with `0^0 = 1`.
pub fn pow_mod(base: u64, mut exp: u64, q: u64) -> u64 {
    let mut result = 1 % q;
    let mut b = base % q;
    while exp > 0 {
        if exp & 1 == 1 {
            result = mul_mod(result, b, q);
        }
        b = mul_mod(b, b, q);
        exp >>= 1;
    }
    result
}

/// Deterministic Miller-Rabin; these bases are exact for every 64-bit integer.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Uniform prime in `[lo, hi)`. Panics if the range holds no prime.
pub fn random_prime<R: Rng + ?Sized>(rng: &mut R, lo: u64, hi: u64) -> u64 {
    assert!(lo < hi, "empty prime range");
    for _ in 0..1_000_000 {
        let candidate = rng.gen_range(lo..hi);
        if is_prime(candidate) {
            return candidate;
        }
    }
    (lo..hi).find(|&n| is_prime(n)).expect("no prime in range")
}

/// Smallest quadratic non-residue; used as the group generator of the sealing layer.
pub fn smallest_non_residue(q: u64) -> u64 {
    (2..q)
        .find(|&g| pow_mod(g, (q - 1) / 2, q) == q - 1)
        .expect("odd prime has a non-residue")
}

/// Multiplicative order of `x` modulo the prime `q`, when `q - 1` factors by trial division
/// up to 2^20 (with at most one larger prime cofactor). `None` for `x = 0` or when the
/// factorization is out of reach.
pub fn multiplicative_order(x: u64, q: u64) -> Option<u64> {
    if x.is_multiple_of(q) {
        return None;
    }
    let mut primes = Vec::new();
    let mut rest = q - 1;
    let mut d = 2u64;
    while d * d <= rest && d < 1 << 20 {
        if rest.is_multiple_of(d) {
            primes.push(d);
            while rest.is_multiple_of(d) {
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        if !is_prime(rest) {
            return None;
        }
        primes.push(rest);
    }
    let mut order = q - 1;
    for p in primes {
        while order.is_multiple_of(p) && pow_mod(x, order / p, q) == 1 {
            order /= p;
        }
    }
    Some(order)
}
