use std::io;
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError, Sender};
use std::thread;
use std::time::{Duration, Instant};

use super::frame::{decode_body, encode_frame, read_frame, write_frame, Frame, DEFAULT_MAX_FRAME};
use super::ChannelError;

/// Duplex, FIFO frame transport between the two parties.
pub trait Channel: Send {
    fn send(&mut self, frame: &Frame) -> Result<(), ChannelError>;
    fn recv(&mut self, timeout: Duration) -> Result<Frame, ChannelError>;
}

impl<C: Channel + ?Sized> Channel for Box<C> {
    fn send(&mut self, frame: &Frame) -> Result<(), ChannelError> {
        (**self).send(frame)
    }
    fn recv(&mut self, timeout: Duration) -> Result<Frame, ChannelError> {
        (**self).recv(timeout)
    }
}

/// In-process endpoint. Frames travel as their full wire encoding.
pub struct MemoryChannel {
    tx: Sender<Vec<u8>>,
    rx: Receiver<Vec<u8>>,
    max_frame: usize,
}

pub fn pair_memory_channels() -> (MemoryChannel, MemoryChannel) {
    let (tx_ab, rx_ab) = mpsc::channel();
    let (tx_ba, rx_ba) = mpsc::channel();
    (
        MemoryChannel {
            tx: tx_ab,
            rx: rx_ba,
            max_frame: DEFAULT_MAX_FRAME,
        },
        MemoryChannel {
            tx: tx_ba,
            rx: rx_ab,
            max_frame: DEFAULT_MAX_FRAME,
        },
    )
}

impl MemoryChannel {
    pub fn with_max_frame(mut self, max_frame: usize) -> Self {
        self.max_frame = max_frame;
        self
    }
}

impl Channel for MemoryChannel {
    fn send(&mut self, frame: &Frame) -> Result<(), ChannelError> {
        frame.validate()?;
        let bytes = encode_frame(frame, self.max_frame)?;
        self.tx.send(bytes).map_err(|_| ChannelError::Closed)
    }

    fn recv(&mut self, timeout: Duration) -> Result<Frame, ChannelError> {
        let bytes = self.rx.recv_timeout(timeout).map_err(|e| match e {
            RecvTimeoutError::Timeout => ChannelError::Timeout(timeout),
            RecvTimeoutError::Disconnected => ChannelError::Closed,
        })?;
        let len = u32::from_be_bytes(bytes[..4].try_into().expect("length prefix")) as usize;
        if len > self.max_frame {
            return Err(ChannelError::Oversize {
                len,
                cap: self.max_frame,
            });
        }
        decode_body(&bytes[4..])
    }
}

pub struct TcpChannel {
    stream: TcpStream,
    peer: SocketAddr,
    max_frame: usize,
}

impl TcpChannel {
    fn new(stream: TcpStream) -> Result<Self, ChannelError> {
        stream.set_nodelay(true)?;
        let peer = stream.peer_addr()?;
        Ok(TcpChannel {
            stream,
            peer,
            max_frame: DEFAULT_MAX_FRAME,
        })
    }

    pub fn peer_addr(&self) -> SocketAddr {
        self.peer
    }

    pub fn with_max_frame(mut self, max_frame: usize) -> Self {
        self.max_frame = max_frame;
        self
    }
}

impl Channel for TcpChannel {
    fn send(&mut self, frame: &Frame) -> Result<(), ChannelError> {
        frame.validate()?;
        write_frame(&mut self.stream, frame, self.max_frame)
    }

    fn recv(&mut self, timeout: Duration) -> Result<Frame, ChannelError> {
        self.stream
            .set_read_timeout(Some(timeout.max(Duration::from_millis(1))))?;
        read_frame(&mut self.stream, self.max_frame).map_err(|e| match e {
            ChannelError::Timeout(_) => ChannelError::Timeout(timeout),
            other => other,
        })
    }
}

/// Bound listening socket that accepts the single peer of a session.
pub struct TcpAcceptor {
    listener: TcpListener,
}

impl TcpAcceptor {
    pub fn bind(addr: &str) -> Result<Self, ChannelError> {
        let listener = TcpListener::bind(addr).map_err(|e| ChannelError::Bind {
            addr: addr.to_string(),
            source: e,
        })?;
        Ok(TcpAcceptor { listener })
    }

    pub fn local_addr(&self) -> Result<SocketAddr, ChannelError> {
        Ok(self.listener.local_addr()?)
    }

    pub fn accept(&self) -> Result<TcpChannel, ChannelError> {
        let (stream, _) = self.listener.accept()?;
        TcpChannel::new(stream)
    }
}

/// Binds `addr` and waits for one peer.
pub fn tcp_listen(addr: &str) -> Result<TcpChannel, ChannelError> {
    TcpAcceptor::bind(addr)?.accept()
}

pub fn tcp_connect(addr: &str) -> Result<TcpChannel, ChannelError> {
    let addrs: Vec<SocketAddr> = addr
        .to_socket_addrs()
        .map_err(|e| ChannelError::Connect {
            addr: addr.to_string(),
            source: e,
        })?
        .collect();
    let mut last = io::Error::new(io::ErrorKind::NotFound, "address resolved to nothing");
    for a in addrs {
        match TcpStream::connect(a) {
            Ok(s) => return TcpChannel::new(s),
            Err(e) => last = e,
        }
    }
    Err(ChannelError::Connect {
        addr: addr.to_string(),
        source: last,
    })
}

/// Retries refused connections until `wait` elapses; for peers started in any order.
pub fn tcp_connect_retry(addr: &str, wait: Duration) -> Result<TcpChannel, ChannelError> {
    let deadline = Instant::now() + wait;
    loop {
        match tcp_connect(addr) {
            Ok(ch) => return Ok(ch),
            Err(ChannelError::Connect { source, .. })
                if source.kind() == io::ErrorKind::ConnectionRefused
                    && Instant::now() < deadline =>
            {
                thread::sleep(Duration::from_millis(25));
            }
            Err(e) => return Err(e),
        }
    }
}
