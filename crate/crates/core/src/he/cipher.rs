use std::collections::HashMap;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::field::{add_mod, mul_mod, pow_mod, sub_mod};
use super::{HeError, KeyId};

/// A sealed plaintext.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Leaf {
    pub key_id: KeyId,
    pub nonce: Vec<u8>,
    pub c1: u64,
    pub c2: u64,
}

impl Leaf {
    /// The opaque sealed field: `c1 || c2`, big-endian.
    pub fn sealed(&self) -> [u8; 16] {
        let mut out = [0u8; 16];
        out[..8].copy_from_slice(&self.c1.to_be_bytes());
        out[8..].copy_from_slice(&self.c2.to_be_bytes());
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Pow,
}

impl Op {
    pub(crate) fn code(self) -> u8 {
        match self {
            Op::Add => 0,
            Op::Sub => 1,
            Op::Mul => 2,
            Op::Pow => 3,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Op> {
        Some(match c {
            0 => Op::Add,
            1 => Op::Sub,
            2 => Op::Mul,
            3 => Op::Pow,
            _ => return None,
        })
    }
}

/// Operand of an expression node. Scalars are public constants; for `Pow` a scalar right
/// operand is an integer exponent, everywhere else a field element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operand {
    Ct(Ciphertext),
    Scalar(u64),
}

impl From<Ciphertext> for Operand {
    fn from(c: Ciphertext) -> Self {
        Operand::Ct(c)
    }
}

impl From<&Ciphertext> for Operand {
    fn from(c: &Ciphertext) -> Self {
        Operand::Ct(c.clone())
    }
}

impl From<u64> for Operand {
    fn from(v: u64) -> Self {
        Operand::Scalar(v)
    }
}

impl Operand {
    fn as_ct(&self) -> Option<&Ciphertext> {
        match self {
            Operand::Ct(c) => Some(c),
            Operand::Scalar(_) => None,
        }
    }
}

#[derive(Debug)]
pub(crate) enum Node {
    Leaf(Leaf),
    Op {
        op: Op,
        key_id: KeyId,
        lhs: Operand,
        rhs: Operand,
    },
}

/// Emulated homomorphic ciphertext: a sealed leaf or an operation over other ciphertexts.
///
/// Subexpressions are shared, so a ciphertext is a DAG; node counts and the byte encoding
/// count every shared node once.
#[derive(Debug, Clone)]
pub struct Ciphertext(pub(crate) Arc<Node>);

// Structural equality via the canonical encoding; recursive comparison would revisit
// shared subexpressions exponentially often.
impl PartialEq for Ciphertext {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || super::codec::serialize_ct(self) == super::codec::serialize_ct(other)
    }
}

impl Eq for Ciphertext {}

/// Digest of an expression's shape: operators and scalar constants, leaves abstracted.
pub type ShapeDigest = [u8; 32];

impl Ciphertext {
    pub(crate) fn leaf(leaf: Leaf) -> Self {
        Ciphertext(Arc::new(Node::Leaf(leaf)))
    }

    pub fn key_id(&self) -> KeyId {
        match &*self.0 {
            Node::Leaf(l) => l.key_id,
            Node::Op { key_id, .. } => *key_id,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(&*self.0, Node::Leaf(_))
    }

    pub fn as_leaf(&self) -> Option<&Leaf> {
        match &*self.0 {
            Node::Leaf(l) => Some(l),
            Node::Op { .. } => None,
        }
    }

    /// Distinct nodes in post-order (left operand first); the root comes last.
    pub(crate) fn topo_order(&self) -> Vec<&Node> {
        let mut seen: HashMap<*const Node, ()> = HashMap::new();
        let mut out = Vec::new();
        // (node, children already pushed)
        let mut stack: Vec<(&Node, bool)> = vec![(&*self.0, false)];
        while let Some((node, expanded)) = stack.pop() {
            let key = node as *const Node;
            if seen.contains_key(&key) {
                continue;
            }
            match node {
                Node::Op { lhs, rhs, .. } if !expanded => {
                    stack.push((node, true));
                    for operand in [rhs, lhs] {
                        if let Operand::Ct(c) = operand {
                            if !seen.contains_key(&Arc::as_ptr(&c.0)) {
                                stack.push((&*c.0, false));
                            }
                        }
                    }
                }
                _ => {
                    seen.insert(key, ());
                    out.push(node);
                }
            }
        }
        out
    }

    /// Number of distinct operation nodes.
    pub fn node_count(&self) -> usize {
        self.topo_order()
            .iter()
            .filter(|n| matches!(n, Node::Op { .. }))
            .count()
    }

    pub fn leaf_count(&self) -> usize {
        self.topo_order()
            .iter()
            .filter(|n| matches!(n, Node::Leaf(_)))
            .count()
    }

    /// All scalar constants appearing in operation nodes, in post-order.
    pub fn scalars(&self) -> Vec<u64> {
        let mut out = Vec::new();
        for node in self.topo_order() {
            if let Node::Op { lhs, rhs, .. } = node {
                for operand in [lhs, rhs] {
                    if let Operand::Scalar(v) = operand {
                        out.push(*v);
                    }
                }
            }
        }
        out
    }

    pub fn shape_digest(&self) -> ShapeDigest {
        let order = self.topo_order();
        let mut digests: HashMap<*const Node, ShapeDigest> = HashMap::with_capacity(order.len());
        let mut last = [0u8; 32];
        for node in order {
            let mut h = Sha256::new();
            match node {
                Node::Leaf(_) => h.update(b"L"),
                Node::Op { op, lhs, rhs, .. } => {
                    h.update([b'O', op.code()]);
                    for operand in [lhs, rhs] {
                        match operand {
                            Operand::Ct(c) => {
                                h.update(b"c");
                                h.update(digests[&Arc::as_ptr(&c.0)]);
                            }
                            Operand::Scalar(v) => {
                                h.update(b"s");
                                h.update(v.to_be_bytes());
                            }
                        }
                    }
                }
            }
            last = h.finalize().into();
            digests.insert(node as *const Node, last);
        }
        last
    }

    /// Evaluates bottom-up in Z_q, unsealing leaves with `unseal`. Each shared node is
    /// evaluated once.
    pub(crate) fn evaluate<F>(&self, q: u64, mut unseal: F) -> Result<u64, HeError>
    where
        F: FnMut(&Leaf) -> Result<u64, HeError>,
    {
        let order = self.topo_order();
        let mut values: HashMap<*const Node, u64> = HashMap::with_capacity(order.len());
        let mut last = 0;
        for node in order {
            let v = match node {
                Node::Leaf(l) => unseal(l)?,
                Node::Op { op, lhs, rhs, .. } => {
                    let get = |o: &Operand| match o {
                        Operand::Ct(c) => values[&Arc::as_ptr(&c.0)],
                        Operand::Scalar(s) => *s,
                    };
                    let (a, b) = (get(lhs) % q, get(rhs));
                    match op {
                        Op::Add => add_mod(a, b, q),
                        Op::Sub => sub_mod(a, b, q),
                        Op::Mul => mul_mod(a, b % q, q),
                        Op::Pow => pow_mod(a, b, q),
                    }
                }
            };
            values.insert(node as *const Node, v);
            last = v;
        }
        Ok(last)
    }

    pub fn add(&self, rhs: impl Into<Operand>) -> Result<Ciphertext, HeError> {
        ct_add(self, rhs)
    }

    pub fn sub(&self, rhs: impl Into<Operand>) -> Result<Ciphertext, HeError> {
        ct_sub(self, rhs)
    }

    pub fn mul(&self, rhs: impl Into<Operand>) -> Result<Ciphertext, HeError> {
        ct_mul(self, rhs)
    }

    pub fn pow(&self, exponent: impl Into<Operand>) -> Result<Ciphertext, HeError> {
        ct_pow(self, exponent)
    }
}

pub(crate) fn make_node(op: Op, lhs: Operand, rhs: Operand) -> Result<Ciphertext, HeError> {
    let key_id = match (lhs.as_ct(), rhs.as_ct()) {
        (Some(a), Some(b)) if a.key_id() != b.key_id() => {
            return Err(HeError::KeyMismatch(a.key_id(), b.key_id()))
        }
        (Some(c), _) | (None, Some(c)) => c.key_id(),
        (None, None) => return Err(HeError::NoCiphertextOperand),
    };
    Ok(Ciphertext(Arc::new(Node::Op {
        op,
        key_id,
        lhs,
        rhs,
    })))
}

pub fn ct_add(a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Ciphertext, HeError> {
    make_node(Op::Add, a.into(), b.into())
}

/// `a - b` in Z_q.
pub fn ct_sub(a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Ciphertext, HeError> {
    make_node(Op::Sub, a.into(), b.into())
}

pub fn ct_mul(a: impl Into<Operand>, b: impl Into<Operand>) -> Result<Ciphertext, HeError> {
    make_node(Op::Mul, a.into(), b.into())
}

/// `base^exponent`; an encrypted exponent is read as the integer representative in `[0, q)`.
pub fn ct_pow(base: &Ciphertext, exponent: impl Into<Operand>) -> Result<Ciphertext, HeError> {
    make_node(Op::Pow, Operand::Ct(base.clone()), exponent.into())
}
