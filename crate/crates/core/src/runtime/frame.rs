//! Protocol frames and their length-prefixed wire encoding.
//!
//! A frame on the wire is a 4-byte big-endian length followed by a UTF-8 JSON object
//! `{"v":1,"seq":n,"from":"A"|"B","kind":k,"body":...}`. Ciphertexts inside bodies are the
//! canonical byte encoding, base64 (standard alphabet, padded).

use std::fmt;
use std::io::{Read, Write};

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::ChannelError;
use crate::he::{deserialize_ct, serialize_ct, Ciphertext, PublicKey};

pub const WIRE_VERSION: u8 = 1;

/// Default cap on one encoded frame: 64 MiB.
pub const DEFAULT_MAX_FRAME: usize = 64 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    A,
    B,
}

impl Role {
    pub fn peer(self) -> Role {
        match self {
            Role::A => Role::B,
            Role::B => Role::A,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::A => "A",
            Role::B => "B",
        })
    }
}

impl std::str::FromStr for Role {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" | "a" => Ok(Role::A),
            "B" | "b" => Ok(Role::B),
            _ => Err(format!("unknown role `{s}` (expected A or B)")),
        }
    }
}

/// Ciphertext bytes as carried in a frame body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct WireCt(pub Vec<u8>);

impl WireCt {
    pub fn decode(&self) -> Result<Ciphertext, ChannelError> {
        deserialize_ct(&self.0).map_err(|e| ChannelError::Schema(e.to_string()))
    }
}

impl From<&Ciphertext> for WireCt {
    fn from(c: &Ciphertext) -> Self {
        WireCt(serialize_ct(c))
    }
}

impl From<WireCt> for String {
    fn from(w: WireCt) -> String {
        STANDARD.encode(w.0)
    }
}

impl TryFrom<String> for WireCt {
    type Error = base64::DecodeError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        STANDARD.decode(s).map(WireCt)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PubkeyBody {
    pub protocol: String,
    pub session_id: String,
    pub config_hash: String,
    pub key: PublicKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CtBody {
    pub ct: WireCt,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CtsBody {
    pub cts: Vec<WireCt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultStage {
    /// Non-key-holder announces how many models it iterates over.
    Models,
    /// Key holder closes the session; carries the output only in symmetric mode.
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultBody {
    pub stage: ResultStage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortCode {
    Config,
    Input,
    Protocol,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbortBody {
    pub code: AbortCode,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "body", rename_all = "snake_case")]
pub enum Payload {
    Pubkey(PubkeyBody),
    Ct(CtBody),
    CtVector(CtsBody),
    CtList(CtsBody),
    Result(ResultBody),
    Abort(AbortBody),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Pubkey(_) => "pubkey",
            Payload::Ct(_) => "ct",
            Payload::CtVector(_) => "ct_vector",
            Payload::CtList(_) => "ct_list",
            Payload::Result(_) => "result",
            Payload::Abort(_) => "abort",
        }
    }

    /// Ciphertexts carried by this payload.
    pub fn ciphertexts(&self) -> &[WireCt] {
        match self {
            Payload::Ct(b) => std::slice::from_ref(&b.ct),
            Payload::CtVector(b) | Payload::CtList(b) => &b.cts,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub v: u8,
    pub seq: u64,
    pub from: Role,
    #[serde(flatten)]
    pub payload: Payload,
}

impl Frame {
    pub fn new(seq: u64, from: Role, payload: Payload) -> Self {
        Frame {
            v: WIRE_VERSION,
            seq,
            from,
            payload,
        }
    }

    pub fn kind(&self) -> &'static str {
        self.payload.kind()
    }

    /// Body checks beyond what the JSON shape enforces.
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.v != WIRE_VERSION {
            return Err(ChannelError::Schema(format!(
                "unsupported version {}",
                self.v
            )));
        }
        match &self.payload {
            Payload::CtVector(b) | Payload::CtList(b) if b.cts.is_empty() => {
                return Err(ChannelError::Schema(format!("empty {}", self.kind())));
            }
            Payload::Pubkey(b) => b
                .key
                .params
                .validate()
                .map_err(|e| ChannelError::Schema(e.to_string()))?,
            _ => {}
        }
        for ct in self.payload.ciphertexts() {
            ct.decode()?;
        }
        Ok(())
    }
}

pub fn encode_frame(frame: &Frame, max_frame: usize) -> Result<Vec<u8>, ChannelError> {
    let json = serde_json::to_vec(frame).map_err(|e| ChannelError::Schema(e.to_string()))?;
    if json.len() > max_frame || json.len() > u32::MAX as usize {
        return Err(ChannelError::Oversize {
            len: json.len(),
            cap: max_frame,
        });
    }
    let mut out = Vec::with_capacity(4 + json.len());
    out.extend_from_slice(&(json.len() as u32).to_be_bytes());
    out.extend_from_slice(&json);
    Ok(out)
}

pub fn decode_body(json: &[u8]) -> Result<Frame, ChannelError> {
    let frame: Frame =
        serde_json::from_slice(json).map_err(|e| ChannelError::Schema(e.to_string()))?;
    frame.validate()?;
    Ok(frame)
}

pub fn write_frame<W: Write>(
    w: &mut W,
    frame: &Frame,
    max_frame: usize,
) -> Result<(), ChannelError> {
    let bytes = encode_frame(frame, max_frame)?;
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

/// Reads one frame. A clean end of stream before the length prefix reports `Closed`.
pub fn read_frame<R: Read>(r: &mut R, max_frame: usize) -> Result<Frame, ChannelError> {
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let len = u32::from_be_bytes(len) as usize;
    if len > max_frame {
        return Err(ChannelError::Oversize {
            len,
            cap: max_frame,
        });
    }
    let mut body = vec![0u8; len];
    r.read_exact(&mut body)?;
    decode_body(&body)
}
