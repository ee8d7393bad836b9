//! Length-prefixed binary protocol between a coordinator and remote
//! workers, so upload and download costs can be measured as real bytes.
//!
//! Frame: `len: u32 BE` (payload bytes) ‖ `type: u8` ‖ payload.
//!
//! TASK payload: `task_id u64` ‖ `q u64` ‖ `t u32` ‖ `cols u32` ‖ `mode u8`
//! (0 field, 1 analog) ‖ entries, row-major. RESPONSE payload: `task_id u64`
//! ‖ `t u32` ‖ packed lower triangle. Integers inside payloads are little
//! endian; field entries take 8 bytes, complex entries 16 (re, im as f64).

use std::io::{self, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::cmatrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::field::{Fe, PrimeField};
use crate::matrix::{triangle_len, FieldMatrix, PackedLower};
use crate::pool::{Dispatched, Payload, PoolConfig, Response, Share, TaskTrace};

pub const FRAME_HEADER_BYTES: usize = 5;
pub const TASK_HEADER_BYTES: usize = 25;
pub const RESPONSE_HEADER_BYTES: usize = 12;
/// Per-share upload overhead on top of the entries.
pub const TASK_OVERHEAD_BYTES: usize = FRAME_HEADER_BYTES + TASK_HEADER_BYTES;
/// Per-response download overhead on top of the entries.
pub const RESPONSE_OVERHEAD_BYTES: usize = FRAME_HEADER_BYTES + RESPONSE_HEADER_BYTES;
const MAX_PAYLOAD: usize = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    Hello = 0x01,
    Task = 0x02,
    Response = 0x03,
    Error = 0x7F,
}

impl TryFrom<u8> for MsgType {
    type Error = crate::error::Error;
    fn try_from(b: u8) -> Result<Self> {
        match b {
            0x01 => Ok(MsgType::Hello),
            0x02 => Ok(MsgType::Task),
            0x03 => Ok(MsgType::Response),
            0x7F => Ok(MsgType::Error),
            other => Err(Error::Malformed(format!("unknown message type {other:#04x}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub msg_type: MsgType,
    pub payload: Vec<u8>,
}

impl Frame {
    pub fn wire_len(&self) -> usize {
        FRAME_HEADER_BYTES + self.payload.len()
    }
}

pub fn encode_frame(frame: &Frame) -> Vec<u8> {
    let mut out = Vec::with_capacity(frame.wire_len());
    out.extend_from_slice(&(frame.payload.len() as u32).to_be_bytes());
    out.push(frame.msg_type as u8);
    out.extend_from_slice(&frame.payload);
    out
}

/// Decodes exactly one frame occupying all of `bytes`.
pub fn decode_frame(bytes: &[u8]) -> Result<Frame> {
    if bytes.len() < FRAME_HEADER_BYTES {
        return Err(Error::Truncated);
    }
    let len = u32::from_be_bytes(bytes[..4].try_into().expect("4 bytes")) as usize;
    let msg_type = MsgType::try_from(bytes[4])?;
    let body = &bytes[FRAME_HEADER_BYTES..];
    if body.len() < len {
        return Err(Error::Truncated);
    }
    if body.len() > len {
        return Err(Error::Malformed(format!("declared {len} payload bytes, found {}", body.len())));
    }
    Ok(Frame { msg_type, payload: body.to_vec() })
}

pub fn read_frame<R: Read>(r: &mut R) -> Result<Frame> {
    let mut header = [0u8; FRAME_HEADER_BYTES];
    read_exact(r, &mut header)?;
    let len = u32::from_be_bytes(header[..4].try_into().expect("4 bytes")) as usize;
    let msg_type = MsgType::try_from(header[4])?;
    if len > MAX_PAYLOAD {
        return Err(Error::Malformed(format!("payload of {len} bytes exceeds limit")));
    }
    let mut payload = vec![0u8; len];
    read_exact(r, &mut payload)?;
    Ok(Frame { msg_type, payload })
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|e| if e.kind() == io::ErrorKind::UnexpectedEof { Error::Truncated } else { Error::Io(e) })
}

pub fn write_frame<W: Write>(w: &mut W, frame: &Frame) -> Result<usize> {
    let bytes = encode_frame(frame);
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(bytes.len())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Entries {
    Field(Vec<u64>),
    Analog(Vec<Complex64>),
}

impl Entries {
    fn len(&self) -> usize {
        match self {
            Entries::Field(v) => v.len(),
            Entries::Analog(v) => v.len(),
        }
    }

    fn write_to(&self, out: &mut Vec<u8>) {
        match self {
            Entries::Field(v) => v.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            Entries::Analog(v) => v.iter().for_each(|z| {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }),
        }
    }

    fn read(bytes: &[u8], analog: bool) -> Entries {
        if analog {
            Entries::Analog(
                bytes
                    .chunks_exact(16)
                    .map(|c| {
                        Complex64::new(
                            f64::from_le_bytes(c[..8].try_into().unwrap()),
                            f64::from_le_bytes(c[8..].try_into().unwrap()),
                        )
                    })
                    .collect(),
            )
        } else {
            Entries::Field(bytes.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().unwrap())).collect())
        }
    }
}

struct Cursor<'a>(&'a [u8]);

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.0.len() < n {
            return Err(Error::Truncated);
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskMsg {
    pub task_id: u64,
    pub q: u64,
    pub t: u32,
    pub cols: u32,
    pub entries: Entries,
}

impl TaskMsg {
    pub fn to_frame(&self) -> Frame {
        let mut payload = Vec::with_capacity(TASK_HEADER_BYTES + self.entries.len() * 16);
        payload.extend_from_slice(&self.task_id.to_le_bytes());
        payload.extend_from_slice(&self.q.to_le_bytes());
        payload.extend_from_slice(&self.t.to_le_bytes());
        payload.extend_from_slice(&self.cols.to_le_bytes());
        payload.push(matches!(self.entries, Entries::Analog(_)) as u8);
        self.entries.write_to(&mut payload);
        Frame { msg_type: MsgType::Task, payload }
    }

    pub fn parse(frame: &Frame) -> Result<Self> {
        if frame.msg_type != MsgType::Task {
            return Err(Error::Malformed(format!("expected TASK, got {:?}", frame.msg_type)));
        }
        let mut c = Cursor(&frame.payload);
        let (task_id, q, t, cols) = (c.u64()?, c.u64()?, c.u32()?, c.u32()?);
        let analog = match c.take(1)?[0] {
            0 => false,
            1 => true,
            m => return Err(Error::Malformed(format!("unknown mode {m}"))),
        };
        let width = if analog { 16 } else { 8 };
        let expected = t as usize * cols as usize * width;
        if c.0.len() != expected {
            return Err(Error::Malformed(format!("{} entry bytes for a {t}x{cols} task", c.0.len())));
        }
        Ok(TaskMsg { task_id, q, t, cols, entries: Entries::read(c.0, analog) })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMsg {
    pub task_id: u64,
    pub t: u32,
    pub entries: Entries,
}

impl ResponseMsg {
    pub fn to_frame(&self) -> Frame {
        let mut payload = Vec::with_capacity(RESPONSE_HEADER_BYTES + self.entries.len() * 16);
        payload.extend_from_slice(&self.task_id.to_le_bytes());
        payload.extend_from_slice(&self.t.to_le_bytes());
        self.entries.write_to(&mut payload);
        Frame { msg_type: MsgType::Response, payload }
    }

    /// The entry width is implied by the payload length.
    pub fn parse(frame: &Frame) -> Result<Self> {
        match frame.msg_type {
            MsgType::Response => {}
            MsgType::Error => return Err(Error::Remote(String::from_utf8_lossy(&frame.payload).into_owned())),
            other => return Err(Error::Malformed(format!("expected RESPONSE, got {other:?}"))),
        }
        let mut c = Cursor(&frame.payload);
        let (task_id, t) = (c.u64()?, c.u32()?);
        let n = triangle_len(t as usize);
        let analog = match c.0.len() {
            len if len == n * 8 => false,
            len if len == n * 16 => true,
            len => return Err(Error::Malformed(format!("{len} entry bytes for dimension {t}"))),
        };
        Ok(ResponseMsg { task_id, t, entries: Entries::read(c.0, analog) })
    }
}

fn error_frame(msg: impl Into<String>) -> Frame {
    Frame { msg_type: MsgType::Error, payload: msg.into().into_bytes() }
}

/// Executes one TASK: the lower triangle of `M·Mᵀ` (or `M·M*`).
pub fn execute_task(task: &TaskMsg, only_q: Option<u64>) -> Result<ResponseMsg> {
    let (t, cols) = (task.t as usize, task.cols as usize);
    let entries = match &task.entries {
        Entries::Field(raw) => {
            if only_q.is_some_and(|q| q != task.q) {
                return Err(Error::Config(format!("worker only serves q = {}", only_q.unwrap())));
            }
            let field = PrimeField::new(task.q)?;
            if raw.iter().any(|&v| v >= task.q) {
                return Err(Error::Malformed("unreduced field entry".into()));
            }
            let m = FieldMatrix::from_vec(t, cols, raw.iter().map(|&v| field.elem(v)).collect())?;
            Entries::Field(m.gram_lower(&field).into_entries().into_iter().map(Fe::value).collect())
        }
        Entries::Analog(raw) => {
            let m = ComplexMatrix::from_fn(t, cols, |i, j| raw[i * cols + j]);
            Entries::Analog(m.gram_lower().into_entries())
        }
    };
    Ok(ResponseMsg { task_id: task.task_id, t: task.t, entries })
}

fn handle_connection(mut stream: TcpStream, only_q: Option<u64>) -> Result<()> {
    let frame = read_frame(&mut stream)?;
    let reply = match frame.msg_type {
        MsgType::Hello => Frame { msg_type: MsgType::Hello, payload: frame.payload },
        MsgType::Task => match TaskMsg::parse(&frame).and_then(|t| execute_task(&t, only_q)) {
            Ok(resp) => resp.to_frame(),
            Err(e) => error_frame(e.to_string()),
        },
        other => error_frame(format!("unexpected {other:?} frame")),
    };
    write_frame(&mut stream, &reply)?;
    Ok(())
}

/// A stateless worker: one TASK per connection, connections served
/// concurrently.
pub struct WorkerServer {
    listener: TcpListener,
    only_q: Option<u64>,
}

impl WorkerServer {
    pub fn bind<A: ToSocketAddrs>(addr: A, only_q: Option<u64>) -> Result<Self> {
        Ok(WorkerServer { listener: TcpListener::bind(addr)?, only_q })
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Serves forever.
    pub fn run(self) -> Result<()> {
        for stream in self.listener.incoming() {
            let stream = match stream {
                Ok(s) => s,
                Err(_) => continue,
            };
            let only_q = self.only_q;
            thread::spawn(move || {
                let _ = handle_connection(stream, only_q);
            });
        }
        Ok(())
    }

    /// Runs the server on a background thread and returns its address.
    pub fn spawn(self) -> Result<SocketAddr> {
        let addr = self.local_addr()?;
        thread::spawn(move || self.run());
        Ok(addr)
    }
}

pub fn serve_worker(port: u16, only_q: Option<u64>) -> Result<()> {
    WorkerServer::bind(("0.0.0.0", port), only_q)?.run()
}

#[derive(Debug, Clone)]
pub struct RemoteConfig {
    pub endpoints: Vec<String>,
    pub timeout: Duration,
}

impl RemoteConfig {
    pub fn new(endpoints: Vec<String>) -> Self {
        RemoteConfig { endpoints, timeout: Duration::from_secs(5) }
    }
}

/// A share type that can be shipped as a TASK.
pub trait WireShare: Payload + Clone + Send + Sync + 'static {
    type Output: Payload + Send + 'static;
    fn to_task(&self, task_id: u64, q: u64) -> TaskMsg;
    fn from_response(resp: ResponseMsg, q: u64) -> Result<Self::Output>;
}

impl WireShare for FieldMatrix {
    type Output = PackedLower<Fe>;

    fn to_task(&self, task_id: u64, q: u64) -> TaskMsg {
        TaskMsg {
            task_id,
            q,
            t: self.rows() as u32,
            cols: self.cols() as u32,
            entries: Entries::Field(self.as_slice().iter().map(|v| v.value()).collect()),
        }
    }

    fn from_response(resp: ResponseMsg, q: u64) -> Result<PackedLower<Fe>> {
        let field = PrimeField::new(q)?;
        match resp.entries {
            Entries::Field(v) => PackedLower::new(resp.t as usize, v.into_iter().map(|x| field.elem(x)).collect()),
            Entries::Analog(_) => Err(Error::Malformed("analog response to a field task".into())),
        }
    }
}

impl WireShare for ComplexMatrix {
    type Output = PackedLower<Complex64>;

    fn to_task(&self, task_id: u64, _q: u64) -> TaskMsg {
        TaskMsg {
            task_id,
            q: 0,
            t: self.rows() as u32,
            cols: self.cols() as u32,
            entries: Entries::Analog(self.as_slice().to_vec()),
        }
    }

    fn from_response(resp: ResponseMsg, _q: u64) -> Result<PackedLower<Complex64>> {
        match resp.entries {
            Entries::Analog(v) => PackedLower::new(resp.t as usize, v),
            Entries::Field(_) => Err(Error::Malformed("field response to an analog task".into())),
        }
    }
}

struct Outcome<R> {
    worker: usize,
    sent: usize,
    received: usize,
    elapsed_ms: f64,
    result: Result<R>,
}

fn run_remote_task<S: WireShare>(
    endpoint: &str,
    frame: &Frame,
    q: u64,
    timeout: Duration,
) -> (usize, usize, Result<S::Output>) {
    let mut sent = 0;
    let attempt = (|| -> Result<(usize, S::Output)> {
        let addr =
            endpoint.to_socket_addrs()?.next().ok_or_else(|| Error::Config(format!("cannot resolve {endpoint}")))?;
        let mut stream = TcpStream::connect_timeout(&addr, timeout)?;
        stream.set_read_timeout(Some(timeout))?;
        stream.set_write_timeout(Some(timeout))?;
        sent = write_frame(&mut stream, frame)?;
        let reply = read_frame(&mut stream)?;
        let received = reply.wire_len();
        let resp = ResponseMsg::parse(&reply)?;
        Ok((received, S::from_response(resp, q)?))
    })();
    match attempt {
        Ok((received, out)) => (sent, received, Ok(out)),
        Err(e) => (sent, 0, Err(e)),
    }
}

/// Drop-in replacement for [`crate::pool::dispatch`] over TCP. Share `i`
/// goes to `endpoints[i % len]`; unreachable or timed-out workers count as
/// stragglers, as do workers in the simulated straggler set (they receive
/// the task but their answer is discarded). Trace byte counts are measured
/// on the socket.
pub fn dispatch_remote<S: WireShare>(
    shares: &[Share<S>],
    field: &PrimeField,
    remote: &RemoteConfig,
    config: &PoolConfig,
) -> Result<Dispatched<S, S::Output>> {
    if remote.endpoints.is_empty() {
        return Err(Error::Config("no endpoints given".into()));
    }
    let n = shares.len();
    let simulated = config.dropped_workers(n)?;
    let q = field.modulus();
    let (tx, rx) = mpsc::channel();
    for (slot, share) in shares.iter().enumerate() {
        let endpoint = remote.endpoints[slot % remote.endpoints.len()].clone();
        let frame = share.payload.to_task(slot as u64, q).to_frame();
        let (tx, timeout, worker) = (tx.clone(), remote.timeout, share.worker);
        thread::spawn(move || {
            let start = Instant::now();
            let (sent, received, result) = run_remote_task::<S>(&endpoint, &frame, q, timeout);
            let _ =
                tx.send(Outcome { worker, sent, received, elapsed_ms: start.elapsed().as_secs_f64() * 1e3, result });
        });
    }
    drop(tx);

    let needed = config.needed.unwrap_or(n);
    let mut responses = Vec::new();
    let mut ignored = Vec::new();
    let mut dropped: Vec<usize> = Vec::new();
    let mut latency_ms = vec![None; n];
    let (mut upload_bytes, mut download_bytes) = (0, 0);
    let slot_of = |w: usize| shares.iter().position(|s| s.worker == w).expect("known worker");
    for outcome in rx {
        upload_bytes += outcome.sent;
        let slot = slot_of(outcome.worker);
        match outcome.result {
            Ok(payload) if !simulated.contains(&slot) => {
                latency_ms[slot] = Some(outcome.elapsed_ms);
                if responses.len() < needed {
                    download_bytes += outcome.received;
                    responses.push(Response { worker: outcome.worker, payload });
                } else {
                    ignored.push(outcome.worker);
                }
            }
            _ => dropped.push(outcome.worker),
        }
    }
    dropped.sort_unstable();
    if responses.is_empty() {
        return Err(Error::NoResponses);
    }
    let download_elems: usize = responses.iter().map(|r| r.payload.elems()).sum();
    let trace = TaskTrace {
        n_workers: n,
        upload_elems: shares.iter().map(|s| s.payload.elems()).sum(),
        download_elems,
        upload_bytes,
        download_bytes,
        responders: responses.iter().map(|r| r.worker).collect(),
        ignored,
        dropped,
        latency_ms,
    };
    let captured = shares.iter().filter(|s| config.capture.contains(&s.worker)).cloned().collect();
    Ok(Dispatched { responses, trace, captured })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_by_one_task_layout() {
        let task = TaskMsg { task_id: 9, q: 11, t: 1, cols: 1, entries: Entries::Field(vec![3]) };
        let frame = task.to_frame();
        assert_eq!(frame.payload.len(), 8 + 8 + 4 + 4 + 1 + 8);
        let bytes = encode_frame(&frame);
        assert_eq!(&bytes[..5], &[0, 0, 0, 33, 0x02]);
        assert_eq!(TaskMsg::parse(&decode_frame(&bytes).unwrap()).unwrap(), task);
    }

    #[test]
    fn length_mismatch_and_truncation() {
        let mut bytes = encode_frame(&Frame { msg_type: MsgType::Hello, payload: vec![1, 2, 3] });
        assert!(matches!(decode_frame(&bytes[..6]), Err(Error::Truncated)));
        assert!(matches!(decode_frame(&bytes[..3]), Err(Error::Truncated)));
        bytes.push(0);
        assert!(matches!(decode_frame(&bytes), Err(Error::Malformed(_))));
        let unknown = [0, 0, 0, 0, 0x55];
        assert!(matches!(decode_frame(&unknown), Err(Error::Malformed(_))));
        let bad_task = Frame { msg_type: MsgType::Task, payload: vec![0; 26] };
        assert!(matches!(TaskMsg::parse(&bad_task), Err(Error::Malformed(_))));
    }

    #[test]
    fn worker_computes_field_and_analog_grams() {
        let field = PrimeField::new(11).unwrap();
        let task = TaskMsg { task_id: 1, q: 11, t: 2, cols: 2, entries: Entries::Field(vec![1, 2, 3, 4]) };
        let resp = execute_task(&task, None).unwrap();
        // rows (1,2),(3,4): 5, 11≡0, 25≡3
        assert_eq!(resp.entries, Entries::Field(vec![5, 0, 3]));
        assert!(execute_task(&task, Some(13)).is_err());
        let _ = field;
        let analog = TaskMsg {
            task_id: 2,
            q: 0,
            t: 1,
            cols: 2,
            entries: Entries::Analog(vec![Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)]),
        };
        assert_eq!(execute_task(&analog, None).unwrap().entries, Entries::Analog(vec![Complex64::new(5.0, 0.0)]));
    }

    #[test]
    fn loopback_hello_and_task() {
        let addr = WorkerServer::bind("127.0.0.1:0", None).unwrap().spawn().unwrap();
        let mut s = TcpStream::connect(addr).unwrap();
        write_frame(&mut s, &Frame { msg_type: MsgType::Hello, payload: b"hi".to_vec() }).unwrap();
        assert_eq!(read_frame(&mut s).unwrap().payload, b"hi");
        let mut s = TcpStream::connect(addr).unwrap();
        let task = TaskMsg { task_id: 4, q: 7, t: 1, cols: 1, entries: Entries::Field(vec![9]) };
        write_frame(&mut s, &task.to_frame()).unwrap();
        let reply = read_frame(&mut s).unwrap();
        assert_eq!(reply.msg_type, MsgType::Error);
    }

    fn frames() -> impl Strategy<Value = Frame> {
        (
            prop::sample::select(vec![MsgType::Hello, MsgType::Task, MsgType::Response, MsgType::Error]),
            prop::collection::vec(any::<u8>(), 0..64),
        )
            .prop_map(|(msg_type, payload)| Frame { msg_type, payload })
    }

    proptest! {
        #[test]
        fn frame_round_trip(f in frames()) {
            prop_assert_eq!(decode_frame(&encode_frame(&f)).unwrap(), f.clone());
            prop_assert_eq!(read_frame(&mut &encode_frame(&f)[..]).unwrap(), f);
        }

        #[test]
        fn response_round_trip(t in 0u32..5, seed in any::<u64>(), analog: bool) {
            let n = triangle_len(t as usize);
            let entries = if analog {
                Entries::Analog((0..n).map(|i| Complex64::new(i as f64 + seed as f64, -(i as f64))).collect())
            } else {
                Entries::Field((0..n as u64).map(|i| i ^ seed).collect())
            };
            let msg = ResponseMsg { task_id: seed, t, entries };
            let back = ResponseMsg::parse(&decode_frame(&encode_frame(&msg.to_frame())).unwrap()).unwrap();
            // an empty triangle cannot carry its mode
            if n > 0 { prop_assert_eq!(back, msg); }
        }
    }
}
