use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::frame::{Frame, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Sent,
    Received,
}

/// Per-party operation counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub keygens: u64,
    pub encryptions: u64,
    pub decryptions: u64,
    pub homomorphic_ops: u64,
    pub frames_sent: u64,
    pub frames_received: u64,
    pub ciphertexts_sent: u64,
    pub ciphertexts_received: u64,
}

impl Counters {
    pub fn frames(&self) -> u64 {
        self.frames_sent + self.frames_received
    }

    pub fn merge(&mut self, other: &Counters) {
        self.keygens += other.keygens;
        self.encryptions += other.encryptions;
        self.decryptions += other.decryptions;
        self.homomorphic_ops += other.homomorphic_ops;
        self.frames_sent += other.frames_sent;
        self.frames_received += other.frames_received;
        self.ciphertexts_sent += other.ciphertexts_sent;
        self.ciphertexts_received += other.ciphertexts_received;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub direction: Direction,
    pub timestamp_ms: u64,
    pub frame: Frame,
}

/// One party's view of one protocol run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub session_id: String,
    pub protocol: String,
    /// Party whose view this is.
    pub view: Role,
    /// Party holding the decryption key in this run.
    pub key_holder: Role,
    pub atoms: usize,
    pub entries: Vec<Entry>,
    pub counters: Counters,
    /// Plaintexts the viewing party obtained by decryption, in order.
    #[serde(default)]
    pub decrypted: Vec<u64>,
    /// Set once the run finished without error.
    #[serde(default)]
    pub complete: bool,
}

impl Transcript {
    pub fn new(protocol: &str, view: Role, key_holder: Role, atoms: usize) -> Self {
        Transcript {
            session_id: String::new(),
            protocol: protocol.to_string(),
            view,
            key_holder,
            atoms,
            entries: Vec::new(),
            counters: Counters::default(),
            decrypted: Vec::new(),
            complete: false,
        }
    }

    /// Appends a frame and updates frame and ciphertext counters.
    pub fn record(&mut self, direction: Direction, frame: Frame) {
        let cts = frame.payload.ciphertexts().len() as u64;
        match direction {
            Direction::Sent => {
                self.counters.frames_sent += 1;
                self.counters.ciphertexts_sent += cts;
            }
            Direction::Received => {
                self.counters.frames_received += 1;
                self.counters.ciphertexts_received += cts;
            }
        }
        self.entries.push(Entry {
            direction,
            timestamp_ms: now_ms(),
            frame,
        });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Frames sent by `role`, in order.
    pub fn frames_from(&self, role: Role) -> impl Iterator<Item = &Frame> {
        self.entries
            .iter()
            .map(|e| &e.frame)
            .filter(move |f| f.from == role)
    }

    /// `(direction, sender, kind, ciphertext count)` per entry; equal across transports for
    /// equal inputs and seeds.
    pub fn profile(&self) -> Vec<(Direction, Role, &'static str, usize)> {
        self.entries
            .iter()
            .map(|e| {
                (
                    e.direction,
                    e.frame.from,
                    e.frame.kind(),
                    e.frame.payload.ciphertexts().len(),
                )
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcript serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}
