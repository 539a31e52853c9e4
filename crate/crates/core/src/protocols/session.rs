use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use super::{ProtocolError, ProtocolKind, SessionConfig};
use crate::he::{decrypt, encrypt, keygen, Ciphertext, KeyPair, PublicKey, SecretKey};
use crate::logic::Interpretation;
use crate::runtime::{
    AbortBody, AbortCode, Endpoint, Payload, PubkeyBody, ResultBody, ResultStage, Role, WireCt,
};

/// Cycles through `models` until the list holds exactly `target` entries.
pub fn pad_models(models: &[Interpretation], target: usize) -> Vec<Interpretation> {
    models.iter().cycle().take(target).cloned().collect()
}

pub(crate) struct Party<'a> {
    pub ep: &'a mut Endpoint,
    pub cfg: &'a SessionConfig,
    pub kind: ProtocolKind,
    pub rng: ChaCha20Rng,
}

impl<'a> Party<'a> {
    pub fn new(ep: &'a mut Endpoint, cfg: &'a SessionConfig, kind: ProtocolKind) -> Self {
        let mut h = Sha256::new();
        h.update(b"psimc-rng-v1");
        h.update(cfg.seed.to_be_bytes());
        h.update(ep.role().to_string().as_bytes());
        let rng = ChaCha20Rng::from_seed(h.finalize().into());
        Party { ep, cfg, kind, rng }
    }

    pub fn role(&self) -> Role {
        self.ep.role()
    }

    pub fn atoms(&self) -> usize {
        self.cfg.signature.len()
    }

    pub fn count_ops(&mut self, n: u64) {
        self.ep.transcript_mut().counters.homomorphic_ops += n;
    }

    /// Key holder: generate the session key and announce it with the config hash.
    pub fn open_as_key_holder(&mut self) -> Result<KeyPair, ProtocolError> {
        let kp = keygen(&self.cfg.params, &mut self.rng)?;
        self.ep.transcript_mut().counters.keygens += 1;
        let session_id = format!("{:016x}", self.rng.gen::<u64>());
        self.ep.transcript_mut().session_id = session_id.clone();
        self.ep.send(Payload::Pubkey(PubkeyBody {
            protocol: self.kind.name().to_string(),
            session_id,
            config_hash: self.cfg.config_hash(self.kind),
            key: kp.public.clone(),
        }))?;
        Ok(kp)
    }

    /// Peer: accept the key holder's key after checking the configuration agrees.
    pub fn open_as_peer(&mut self) -> Result<PublicKey, ProtocolError> {
        let body = match self.recv()? {
            Payload::Pubkey(b) => b,
            other => return Err(unexpected("pubkey", &other)),
        };
        let ours = self.cfg.config_hash(self.kind);
        if body.config_hash != ours || body.protocol != self.kind.name() {
            let reason = format!(
                "config hash mismatch for {}: ours {ours}, received {} for {}",
                self.kind, body.config_hash, body.protocol
            );
            self.abort(AbortCode::Config, &reason);
            return Err(ProtocolError::ConfigMismatch {
                ours,
                theirs: body.config_hash,
            });
        }
        self.ep.transcript_mut().session_id = body.session_id;
        Ok(body.key)
    }

    /// Next payload; an abort frame from the peer becomes an error.
    pub fn recv(&mut self) -> Result<Payload, ProtocolError> {
        let frame = self.ep.recv()?;
        match frame.payload {
            Payload::Abort(AbortBody { code, reason }) => {
                Err(ProtocolError::PeerAbort { code, reason })
            }
            p => Ok(p),
        }
    }

    pub fn send(&mut self, payload: Payload) -> Result<(), ProtocolError> {
        Ok(self.ep.send(payload)?)
    }

    /// Best effort; the session is failing anyway.
    pub fn abort(&mut self, code: AbortCode, reason: &str) {
        let _ = self.ep.send(Payload::Abort(AbortBody {
            code,
            reason: reason.to_string(),
        }));
    }

    /// Encrypts a batch. Per-item generators are split off sequentially, so the ciphertexts
    /// do not depend on whether the batch runs in parallel.
    pub fn encrypt_all(
        &mut self,
        pk: &PublicKey,
        values: &[u64],
    ) -> Result<Vec<Ciphertext>, ProtocolError> {
        let seeds: Vec<[u8; 32]> = values.iter().map(|_| self.rng.gen()).collect();
        let jobs: Vec<(u64, [u8; 32])> = values.iter().copied().zip(seeds).collect();
        let cts = self
            .cfg
            .exec
            .map_slice(&jobs, |(m, seed)| {
                encrypt(pk, *m, &mut ChaCha20Rng::from_seed(*seed))
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        self.ep.transcript_mut().counters.encryptions += cts.len() as u64;
        Ok(cts)
    }

    pub fn decrypt(&mut self, sk: &SecretKey, c: &Ciphertext) -> Result<u64, ProtocolError> {
        let v = decrypt(sk, c)?;
        let t = self.ep.transcript_mut();
        t.counters.decryptions += 1;
        t.decrypted.push(v);
        Ok(v)
    }

    /// Key holder closes the run; the output travels only in symmetric mode.
    pub fn close_as_key_holder(&mut self, result: u64) -> Result<(), ProtocolError> {
        let value = self.cfg.symmetric.then_some(result);
        self.send(Payload::Result(ResultBody {
            stage: ResultStage::Done,
            value,
        }))?;
        self.ep.transcript_mut().complete = true;
        Ok(())
    }

    pub fn close_as_peer(&mut self) -> Result<Option<u64>, ProtocolError> {
        match self.recv()? {
            Payload::Result(ResultBody {
                stage: ResultStage::Done,
                value,
            }) => {
                self.ep.transcript_mut().complete = true;
                Ok(value)
            }
            other => Err(unexpected("result", &other)),
        }
    }
}

pub(crate) fn wire(cts: &[Ciphertext]) -> Vec<WireCt> {
    cts.iter().map(WireCt::from).collect()
}

pub(crate) fn unwire(ws: &[WireCt]) -> Result<Vec<Ciphertext>, ProtocolError> {
    Ok(ws.iter().map(|w| w.decode()).collect::<Result<_, _>>()?)
}

pub(crate) fn unexpected(expected: &'static str, got: &Payload) -> ProtocolError {
    ProtocolError::UnexpectedFrame {
        expected,
        got: got.kind(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn padding_cycles_in_order() {
        let ms: Vec<Interpretation> = ["111", "110"].iter().map(|s| s.parse().unwrap()).collect();
        let padded: Vec<String> = pad_models(&ms, 8).iter().map(|w| w.to_string()).collect();
        assert_eq!(
            padded,
            ["111", "110", "111", "110", "111", "110", "111", "110"]
        );
        assert_eq!(pad_models(&ms, 1).len(), 1);
    }
}
