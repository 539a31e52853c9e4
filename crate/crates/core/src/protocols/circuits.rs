//! The public homomorphic circuits evaluated by the non-key-holder.
//!
//! Each builder takes only ciphertext inputs; the constants they embed (`0`, `1`, `2`, and the
//! candidate distances `0..=|At|`) are fixed by the protocol, never by a party's input. The
//! audit rebuilds these circuits over placeholder leaves and compares shapes.
//!
//! Folds start from the identity element, so each circuit performs an exact, input-independent
//! number of homomorphic operations (see the `*_ops` functions).

use std::sync::atomic::{AtomicU64, Ordering};

use crate::he::{ct_add, ct_mul, ct_pow, ct_sub, Ciphertext, HeError, Operand};
use crate::Exec;

/// Counts homomorphic operations; shareable across worker threads.
#[derive(Debug, Default)]
pub struct Meter {
    ops: AtomicU64,
}

impl Meter {
    pub fn new() -> Self {
        Meter::default()
    }

    pub fn ops(&self) -> u64 {
        self.ops.load(Ordering::Relaxed)
    }

    fn tick(&self) {
        self.ops.fetch_add(1, Ordering::Relaxed);
    }

    pub fn add(&self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Ciphertext, HeError> {
        self.tick();
        ct_add(a, b)
    }

    pub fn sub(&self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Ciphertext, HeError> {
        self.tick();
        ct_sub(a, b)
    }

    pub fn mul(&self, a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Ciphertext, HeError> {
        self.tick();
        ct_mul(a, b)
    }

    pub fn pow(&self, base: &Ciphertext, e: impl Into<Operand>) -> Result<Ciphertext, HeError> {
        self.tick();
        ct_pow(base, e)
    }
}

fn fold(
    meter: &Meter,
    identity: u64,
    items: Vec<Ciphertext>,
    op: impl Fn(&Meter, Operand, &Ciphertext) -> Result<Ciphertext, HeError>,
) -> Result<Ciphertext, HeError> {
    let mut acc = Operand::Scalar(identity);
    for item in &items {
        acc = Operand::Ct(op(meter, acc, item)?);
    }
    match acc {
        Operand::Ct(c) => Ok(c),
        Operand::Scalar(_) => Err(HeError::NoCiphertextOperand),
    }
}

/// `sum_i (a_i - b_i)^2`: the number of positions where two encrypted bit vectors differ.
pub fn hamming(
    meter: &Meter,
    a: &[Ciphertext],
    b: &[Ciphertext],
    exec: Exec,
) -> Result<Ciphertext, HeError> {
    assert_eq!(a.len(), b.len(), "vector lengths");
    let pairs: Vec<(&Ciphertext, &Ciphertext)> = a.iter().zip(b).collect();
    let squares = exec
        .map_slice(&pairs, |(x, y)| {
            let diff = meter.sub(*x, *y)?;
            meter.pow(&diff, 2)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    fold(meter, 0, squares, |m, acc, x| m.add(acc, x))
}

pub fn hamming_ops(len: usize) -> u64 {
    3 * len as u64
}

/// `prod_i (1 - a_i * b_i)^2`: zero iff some row has both bits set, one otherwise.
pub fn row_mismatch_product(
    meter: &Meter,
    a: &[Ciphertext],
    b: &[Ciphertext],
    exec: Exec,
) -> Result<Ciphertext, HeError> {
    assert_eq!(a.len(), b.len(), "vector lengths");
    let pairs: Vec<(&Ciphertext, &Ciphertext)> = a.iter().zip(b).collect();
    let entries = exec
        .map_slice(&pairs, |(x, y)| {
            let both = meter.mul(*x, *y)?;
            let flipped = meter.sub(1, &both)?;
            meter.pow(&flipped, 2)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    fold(meter, 1, entries, |m, acc, x| m.mul(acc, x))
}

pub fn row_mismatch_product_ops(len: usize) -> u64 {
    4 * len as u64
}

/// Builds the meta-encrypted candidate list over distances `0..=atoms`.
///
/// `L_i = prod_{d in S} (i - d)` is zero iff distance `i` occurs; the running prefix product
/// `P_i = L_0 * ... * L_i` is zero from the smallest occurring distance on, and each entry is
/// published as `P_i^(p_i - 1)` with `p_i` a prime supplied as an encrypted leaf.
pub fn first_zero_list(
    meter: &Meter,
    distances: &[Ciphertext],
    atoms: usize,
    primes: &[Ciphertext],
    exec: Exec,
) -> Result<Vec<Ciphertext>, HeError> {
    assert_eq!(primes.len(), atoms + 1, "one prime per candidate distance");
    let candidates: Vec<u64> = (0..=atoms as u64).collect();
    let per_candidate = exec
        .map_slice(&candidates, |&i| {
            let factors = distances
                .iter()
                .map(|d| meter.sub(i, d))
                .collect::<Result<Vec<_>, _>>()?;
            fold(meter, 1, factors, |m, acc, x| m.mul(acc, x))
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut prefix = Operand::Scalar(1);
    let mut out = Vec::with_capacity(per_candidate.len());
    for (l_i, p_i) in per_candidate.iter().zip(primes) {
        let p = meter.mul(prefix, l_i)?;
        let exponent = meter.sub(p_i, 1)?;
        out.push(meter.pow(&p, &exponent)?);
        prefix = Operand::Ct(p);
    }
    Ok(out)
}

pub fn first_zero_list_ops(distances: usize, atoms: usize) -> u64 {
    (atoms as u64 + 1) * (2 * distances as u64 + 3)
}

/// `r * (x - y)`: zero iff `x = y`, otherwise blinded by `r`.
pub fn psi_blind(
    meter: &Meter,
    x: &Ciphertext,
    y: &Ciphertext,
    r: &Ciphertext,
) -> Result<Ciphertext, HeError> {
    let diff = meter.sub(x, y)?;
    meter.mul(r, &diff)
}

pub fn psi_blind_ops() -> u64 {
    2
}
