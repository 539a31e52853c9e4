use std::time::Duration;

use super::frame::{Frame, Payload, Role};
use super::transcript::{Direction, Transcript};
use super::{Channel, ChannelError};

pub const DEFAULT_RECV_TIMEOUT: Duration = Duration::from_secs(30);

/// One party's side of a session: numbers outgoing frames, checks incoming sequence numbers,
/// and records both directions into the current transcript.
pub struct Endpoint {
    channel: Box<dyn Channel>,
    role: Role,
    next_seq: u64,
    peer_seq: u64,
    timeout: Duration,
    transcript: Transcript,
}

impl Endpoint {
    pub fn new(channel: impl Channel + 'static, role: Role) -> Self {
        Endpoint {
            channel: Box::new(channel),
            role,
            next_seq: 0,
            peer_seq: 0,
            timeout: DEFAULT_RECV_TIMEOUT,
            transcript: Transcript::new("", role, Role::A, 0),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn role(&self) -> Role {
        self.role
    }

    /// Starts a fresh transcript for the next run and returns the previous one.
    pub fn begin(&mut self, protocol: &str, key_holder: Role, atoms: usize) -> Transcript {
        std::mem::replace(
            &mut self.transcript,
            Transcript::new(protocol, self.role, key_holder, atoms),
        )
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn transcript_mut(&mut self) -> &mut Transcript {
        &mut self.transcript
    }

    pub fn take_transcript(&mut self) -> Transcript {
        let protocol = self.transcript.protocol.clone();
        let (key_holder, atoms) = (self.transcript.key_holder, self.transcript.atoms);
        self.begin(&protocol, key_holder, atoms)
    }

    pub fn send(&mut self, payload: Payload) -> Result<(), ChannelError> {
        let frame = Frame::new(self.next_seq, self.role, payload);
        self.channel.send(&frame)?;
        self.next_seq += 1;
        self.transcript.record(Direction::Sent, frame);
        Ok(())
    }

    /// Next frame from the peer. Sequence numbers must be consecutive and the sender must be
    /// the peer role.
    pub fn recv(&mut self) -> Result<Frame, ChannelError> {
        let frame = self.channel.recv(self.timeout)?;
        if frame.from != self.role.peer() {
            return Err(ChannelError::Schema(format!(
                "frame claims sender {} but the peer is {}",
                frame.from,
                self.role.peer()
            )));
        }
        if frame.seq != self.peer_seq {
            return Err(ChannelError::Schema(format!(
                "expected seq {} from peer, got {}",
                self.peer_seq, frame.seq
            )));
        }
        self.peer_seq += 1;
        self.transcript.record(Direction::Received, frame.clone());
        Ok(frame)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::runtime::frame::{ResultBody, ResultStage};
    use crate::runtime::pair_memory_channels;

    fn done() -> Payload {
        Payload::Result(ResultBody {
            stage: ResultStage::Done,
            value: None,
        })
    }

    #[test]
    fn sequence_numbers_and_recording() {
        let (l, r) = pair_memory_channels();
        let mut a = Endpoint::new(l, Role::A);
        let mut b = Endpoint::new(r, Role::B);
        a.send(done()).unwrap();
        a.send(done()).unwrap();
        assert_eq!(b.recv().unwrap().seq, 0);
        assert_eq!(b.recv().unwrap().seq, 1);
        assert_eq!(a.transcript().counters.frames_sent, 2);
        assert_eq!(b.transcript().counters.frames_received, 2);
    }

    #[test]
    fn rejects_wrong_sender() {
        let (l, r) = pair_memory_channels();
        let mut a = Endpoint::new(l, Role::A);
        let mut also_a = Endpoint::new(r, Role::A);
        a.send(done()).unwrap();
        assert!(matches!(also_a.recv(), Err(ChannelError::Schema(_))));
    }
}
