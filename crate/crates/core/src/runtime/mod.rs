//! Message transport, framing, and per-party transcripts.

mod channel;
mod endpoint;
pub mod frame;
mod transcript;

use std::io;
use std::time::Duration;

use thiserror::Error;

pub use channel::{
    pair_memory_channels, tcp_connect, tcp_connect_retry, tcp_listen, Channel, MemoryChannel,
    TcpAcceptor, TcpChannel,
};
pub use endpoint::{Endpoint, DEFAULT_RECV_TIMEOUT};
pub use frame::{
    AbortBody, AbortCode, CtBody, CtsBody, Frame, Payload, PubkeyBody, ResultBody, ResultStage,
    Role, WireCt, DEFAULT_MAX_FRAME,
};
pub use transcript::{Counters, Direction, Entry, Transcript};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("timed out after {0:?} waiting for a frame")]
    Timeout(Duration),
    #[error("channel closed by peer")]
    Closed,
    #[error("frame of {len} bytes exceeds cap of {cap}")]
    Oversize { len: usize, cap: usize },
    #[error("frame schema violation: {0}")]
    Schema(String),
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: String,
        #[source]
        source: io::Error,
    },
    #[error("cannot connect to {addr}: {source}")]
    Connect {
        addr: String,
        #[source]
        source: io::Error,
    },
    #[error("i/o error: {0}")]
    Io(#[source] io::Error),
}

impl From<io::Error> for ChannelError {
    fn from(e: io::Error) -> Self {
        match e.kind() {
            io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut => {
                ChannelError::Timeout(Duration::ZERO)
            }
            io::ErrorKind::UnexpectedEof
            | io::ErrorKind::ConnectionReset
            | io::ErrorKind::ConnectionAborted
            | io::ErrorKind::BrokenPipe => ChannelError::Closed,
            _ => ChannelError::Io(e),
        }
    }
}
