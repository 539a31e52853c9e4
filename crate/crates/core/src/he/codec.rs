//! Canonical byte encoding of ciphertexts.
//!
//! ```text
//! leaf:  0x00 | key_id u128 | nonce_len u16 | nonce | c1 u64 | c2 u64
//! node:  0x01 | key_id u128 | count u32 | entry * count
//! entry: 0x00 | nonce_len u16 | nonce | c1 u64 | c2 u64          (leaf)
//!        0x01 | op u8 | operand | operand                          (operation)
//! operand: 0x00 | index u32   (earlier entry)
//!          0x01 | value u64   (public scalar)
//! ```
//!
//! Integers are big-endian. Node entries list the distinct nodes of the DAG in post-order,
//! left operand first; the root is the last entry.

use std::collections::HashMap;
use std::sync::Arc;

use super::cipher::{make_node, Ciphertext, Leaf, Node, Op, Operand};
use super::{HeError, KeyId};

const TAG_LEAF: u8 = 0;
const TAG_NODE: u8 = 1;

pub fn serialize_ct(c: &Ciphertext) -> Vec<u8> {
    let mut out = Vec::new();
    match &*c.0 {
        Node::Leaf(leaf) => {
            out.push(TAG_LEAF);
            out.extend_from_slice(&leaf.key_id.0.to_be_bytes());
            put_leaf_body(&mut out, leaf);
        }
        Node::Op { key_id, .. } => {
            let order = c.topo_order();
            let index: HashMap<*const Node, u32> = order
                .iter()
                .enumerate()
                .map(|(i, n)| (*n as *const Node, i as u32))
                .collect();
            out.push(TAG_NODE);
            out.extend_from_slice(&key_id.0.to_be_bytes());
            out.extend_from_slice(&(order.len() as u32).to_be_bytes());
            for node in order {
                match node {
                    Node::Leaf(leaf) => {
                        out.push(TAG_LEAF);
                        put_leaf_body(&mut out, leaf);
                    }
                    Node::Op { op, lhs, rhs, .. } => {
                        out.push(TAG_NODE);
                        out.push(op.code());
                        for operand in [lhs, rhs] {
                            match operand {
                                Operand::Ct(c) => {
                                    out.push(0);
                                    out.extend_from_slice(&index[&Arc::as_ptr(&c.0)].to_be_bytes());
                                }
                                Operand::Scalar(v) => {
                                    out.push(1);
                                    out.extend_from_slice(&v.to_be_bytes());
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn put_leaf_body(out: &mut Vec<u8>, leaf: &Leaf) {
    out.extend_from_slice(&(leaf.nonce.len() as u16).to_be_bytes());
    out.extend_from_slice(&leaf.nonce);
    out.extend_from_slice(&leaf.c1.to_be_bytes());
    out.extend_from_slice(&leaf.c2.to_be_bytes());
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], HeError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| HeError::Malformed(format!("truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, HeError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, HeError> {
        Ok(u16::from_be_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32, HeError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, HeError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u128(&mut self) -> Result<u128, HeError> {
        Ok(u128::from_be_bytes(self.take(16)?.try_into().unwrap()))
    }

    fn leaf_body(&mut self, key_id: KeyId) -> Result<Leaf, HeError> {
        let len = self.u16()? as usize;
        let nonce = self.take(len)?.to_vec();
        Ok(Leaf {
            key_id,
            nonce,
            c1: self.u64()?,
            c2: self.u64()?,
        })
    }
}

pub fn deserialize_ct(bytes: &[u8]) -> Result<Ciphertext, HeError> {
    let mut r = Reader { bytes, pos: 0 };
    let tag = r.u8()?;
    let key_id = KeyId(r.u128()?);
    let ct = match tag {
        TAG_LEAF => Ciphertext::leaf(r.leaf_body(key_id)?),
        TAG_NODE => {
            let count = r.u32()? as usize;
            if count == 0 {
                return Err(HeError::Malformed("empty node table".into()));
            }
            // each entry is at least 1 + 2 bytes; reject absurd counts before allocating
            if count > bytes.len() {
                return Err(HeError::Malformed(format!(
                    "entry count {count} exceeds input"
                )));
            }
            let mut entries: Vec<Ciphertext> = Vec::with_capacity(count);
            for _ in 0..count {
                let entry = match r.u8()? {
                    TAG_LEAF => Ciphertext::leaf(r.leaf_body(key_id)?),
                    TAG_NODE => {
                        let code = r.u8()?;
                        let op = Op::from_code(code)
                            .ok_or_else(|| HeError::Malformed(format!("unknown op {code}")))?;
                        let lhs = read_operand(&mut r, &entries)?;
                        let rhs = read_operand(&mut r, &entries)?;
                        make_node(op, lhs, rhs).map_err(|e| HeError::Malformed(e.to_string()))?
                    }
                    t => return Err(HeError::Malformed(format!("unknown entry tag {t}"))),
                };
                entries.push(entry);
            }
            let root = entries.pop().expect("count > 0");
            if root.is_leaf() {
                return Err(HeError::Malformed("node table root is a leaf".into()));
            }
            root
        }
        t => return Err(HeError::Malformed(format!("unknown tag {t}"))),
    };
    if r.pos != bytes.len() {
        return Err(HeError::Malformed(format!(
            "{} trailing bytes",
            bytes.len() - r.pos
        )));
    }
    Ok(ct)
}

fn read_operand(r: &mut Reader<'_>, entries: &[Ciphertext]) -> Result<Operand, HeError> {
    match r.u8()? {
        0 => {
            let idx = r.u32()? as usize;
            entries
                .get(idx)
                .cloned()
                .map(Operand::Ct)
                .ok_or_else(|| HeError::Malformed(format!("forward reference to entry {idx}")))
        }
        1 => Ok(Operand::Scalar(r.u64()?)),
        t => Err(HeError::Malformed(format!("unknown operand tag {t}"))),
    }
}
