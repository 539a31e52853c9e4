//! Homomorphic encryption emulation over Z_q.
//!
//! TOY SECURITY. Leaves are sealed with a hashed-ElGamal style mask (public pair `(g, h = g^x)`,
//! fresh random exponent per encryption), which makes encryption probabilistic and keeps
//! plaintexts out of the serialized form. Homomorphic operations do not compute on the sealed
//! values: they build an operation-expression DAG that the key holder evaluates after
//! unsealing the leaves. The emulation is faithful to correctness and to who-sees-what, and
//! makes no claim of cryptographic strength. Everything above this module only touches
//! [`keygen`], [`encrypt`], [`decrypt`] and the `ct_*` operations, so a real scheme can be
//! dropped in behind the same surface.
//!
//! The decryptor can see the shape of an expression. Protocol circuits are fixed and public,
//! so the shape carries nothing input-dependent as long as every private constant enters as an
//! encrypted leaf rather than a [`Operand::Scalar`].

mod cipher;
mod codec;
pub mod field;

use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};

use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use cipher::{ct_add, ct_mul, ct_pow, ct_sub, Ciphertext, Leaf, Op, Operand, ShapeDigest};
pub use codec::{deserialize_ct, serialize_ct};
use field::{add_mod, is_prime, pow_mod, smallest_non_residue, sub_mod, DEFAULT_MODULUS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeError {
    #[error("invalid scheme parameters: {0}")]
    InvalidParams(String),
    #[error("plaintext {value} is outside Z_{modulus}")]
    OutOfRange { value: u64, modulus: u64 },
    #[error("ciphertext operands under different keys ({0} vs {1})")]
    KeyMismatch(KeyId, KeyId),
    #[error("ciphertext was sealed under key {found}, not {expected}")]
    WrongKey { expected: KeyId, found: KeyId },
    #[error("operation needs at least one ciphertext operand")]
    NoCiphertextOperand,
    #[error("malformed ciphertext: {0}")]
    Malformed(String),
}

/// Security parameter and plaintext modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchemeParams {
    /// Bits of nonce entropy per leaf; a multiple of 8, at least 64.
    pub rho: u32,
    /// Prime modulus of the plaintext field.
    pub modulus: u64,
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams {
            rho: 128,
            modulus: DEFAULT_MODULUS,
        }
    }
}

impl SchemeParams {
    pub fn new(rho: u32, modulus: u64) -> Result<Self, HeError> {
        let p = SchemeParams { rho, modulus };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), HeError> {
        if self.rho < 64 || !self.rho.is_multiple_of(8) {
            return Err(HeError::InvalidParams(format!(
                "rho must be a multiple of 8 and at least 64, got {}",
                self.rho
            )));
        }
        if self.modulus < 5 || !is_prime(self.modulus) {
            return Err(HeError::InvalidParams(format!(
                "modulus {} is not an odd prime >= 5",
                self.modulus
            )));
        }
        Ok(())
    }

    pub fn nonce_bytes(&self) -> usize {
        self.rho as usize / 8
    }
}

/// 128-bit key identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct KeyId(pub u128);

impl fmt::Display for KeyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:032x}", self.0)
    }
}

impl From<KeyId> for String {
    fn from(k: KeyId) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for KeyId {
    type Error = std::num::ParseIntError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        u128::from_str_radix(&s, 16).map(KeyId)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicKey {
    pub key_id: KeyId,
    pub params: SchemeParams,
    pub generator: u64,
    pub element: u64,
}

impl PublicKey {
    pub fn modulus(&self) -> u64 {
        self.params.modulus
    }
}

pub struct SecretKey {
    key_id: KeyId,
    modulus: u64,
    exponent: u64,
}

impl SecretKey {
    pub fn key_id(&self) -> KeyId {
        self.key_id
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SecretKey")
            .field("key_id", &self.key_id)
            .finish_non_exhaustive()
    }
}

#[derive(Debug)]
pub struct KeyPair {
    pub public: PublicKey,
    pub secret: SecretKey,
}

static KEY_COUNTER: AtomicU32 = AtomicU32::new(0);

/// Fresh key pair. The low 32 bits of the key id come from a process-wide counter, so ids
/// never repeat within a process even when two generators share a seed.
pub fn keygen<R: Rng + ?Sized>(params: &SchemeParams, rng: &mut R) -> Result<KeyPair, HeError> {
    params.validate()?;
    let q = params.modulus;
    let generator = smallest_non_residue(q);
    let exponent = rng.gen_range(1..q - 1);
    let element = pow_mod(generator, exponent, q);
    let high: u128 = rng.gen::<u128>() & !0xffff_ffffu128;
    let key_id = KeyId(high | KEY_COUNTER.fetch_add(1, Ordering::Relaxed) as u128);
    Ok(KeyPair {
        public: PublicKey {
            key_id,
            params: *params,
            generator,
            element,
        },
        secret: SecretKey {
            key_id,
            modulus: q,
            exponent,
        },
    })
}

fn mask(key_id: KeyId, nonce: &[u8], shared: u64, q: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(b"psimc-seal-v1");
    h.update(key_id.0.to_be_bytes());
    h.update((nonce.len() as u32).to_be_bytes());
    h.update(nonce);
    h.update(shared.to_be_bytes());
    let digest = h.finalize();
    let mut wide = [0u8; 16];
    wide.copy_from_slice(&digest[..16]);
    (u128::from_be_bytes(wide) % q as u128) as u64
}

/// Seals `m` into a fresh leaf.
pub fn encrypt<R: Rng + ?Sized>(
    pk: &PublicKey,
    m: u64,
    rng: &mut R,
) -> Result<Ciphertext, HeError> {
    let q = pk.modulus();
    if m >= q {
        return Err(HeError::OutOfRange {
            value: m,
            modulus: q,
        });
    }
    let mut nonce = vec![0u8; pk.params.nonce_bytes()];
    rng.fill(nonce.as_mut_slice());
    let r = rng.gen_range(1..q - 1);
    let c1 = pow_mod(pk.generator, r, q);
    let shared = pow_mod(pk.element, r, q);
    let c2 = add_mod(m, mask(pk.key_id, &nonce, shared, q), q);
    Ok(Ciphertext::leaf(Leaf {
        key_id: pk.key_id,
        nonce,
        c1,
        c2,
    }))
}

fn unseal(sk: &SecretKey, leaf: &Leaf) -> Result<u64, HeError> {
    if leaf.key_id != sk.key_id {
        return Err(HeError::WrongKey {
            expected: sk.key_id,
            found: leaf.key_id,
        });
    }
    let q = sk.modulus;
    let shared = pow_mod(leaf.c1, sk.exponent, q);
    Ok(sub_mod(
        leaf.c2,
        mask(leaf.key_id, &leaf.nonce, shared, q),
        q,
    ))
}

/// Unseals every leaf and evaluates the expression in Z_q.
pub fn decrypt(sk: &SecretKey, c: &Ciphertext) -> Result<u64, HeError> {
    if c.key_id() != sk.key_id {
        return Err(HeError::WrongKey {
            expected: sk.key_id,
            found: c.key_id(),
        });
    }
    c.evaluate(sk.modulus, |leaf| unseal(sk, leaf))
}
