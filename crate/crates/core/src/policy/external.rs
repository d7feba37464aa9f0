//! Line-delimited JSON protocol for policies running outside the engine.
//!
//! ```text
//! engine -> policy  {"type":"hello","protocol_version":1,"fingerprint":..,"n":..,"m":..,"exits":[..],"side":"pursuer"}
//! policy -> engine  {"type":"ready","fingerprint":..}
//! engine -> policy  {"type":"act","episode":..,"t":..,"state":{"pursuers":[..],"evader":..},"exits":[..],"feature":{..}}
//! policy -> engine  {"type":"move","nodes":[..]}      (pursuer side)
//!                   {"type":"move","node":..}         (evader side)
//! engine -> policy  {"type":"end","episode":..,"outcome":"capture","steps":..}
//! ```
//!
//! One request is in flight at a time. Unknown fields are ignored.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EpisodeInfo, EvaderPolicy, PursuerPolicy, Side};
use crate::error::{Error, Result};
use crate::features::extract_feature;
use crate::game::{GlobalState, Outcome, PegSpec};

pub const PROTOCOL_VERSION: u32 = 1;

/// Where an external policy lives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    /// Program and arguments; spoken to over its stdin and stdout.
    Command(Vec<String>),
    /// `host:port` of a listening policy server.
    Tcp(String),
}

#[derive(Debug, Clone)]
pub struct ExternalConfig {
    pub timeout: Duration,
    pub send_features: bool,
}

impl Default for ExternalConfig {
    fn default() -> Self {
        ExternalConfig { timeout: Duration::from_secs(10), send_features: true }
    }
}

/// Feature matrix as sent on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireFeature {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
    pub c: usize,
    pub l: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Message {
    Hello {
        protocol_version: u32,
        fingerprint: u64,
        n: usize,
        m: usize,
        exits: Vec<usize>,
        side: Side,
    },
    Ready {
        fingerprint: u64,
    },
    Act {
        episode: u64,
        t: usize,
        state: GlobalState,
        exits: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        feature: Option<WireFeature>,
    },
    Move {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        node: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<Vec<usize>>,
    },
    End {
        episode: u64,
        outcome: Outcome,
        steps: usize,
    },
}

impl Message {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("messages always serialize")
    }

    pub fn from_line(line: &str) -> Result<Message> {
        serde_json::from_str(line.trim()).map_err(|e| Error::Protocol(format!("bad message {:?}: {e}", line.trim())))
    }
}

trait Transport: Send {
    fn send(&mut self, line: &str) -> Result<()>;
    fn recv(&mut self, timeout: Duration) -> Result<String>;
}

struct ChildTransport {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
}

impl ChildTransport {
    fn spawn(argv: &[String]) -> Result<ChildTransport> {
        let (program, args) = argv.split_first().ok_or_else(|| Error::Argument("empty policy command".into()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::Protocol(format!("cannot start policy {program:?}: {e}")))?;
        let stdout = child.stdout.take().expect("piped");
        let stdin = child.stdin.take();
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        Ok(ChildTransport { child, stdin, lines: rx })
    }
}

impl Transport for ChildTransport {
    fn send(&mut self, line: &str) -> Result<()> {
        let stdin = self.stdin.as_mut().ok_or_else(|| Error::Protocol("policy input closed".into()))?;
        writeln!(stdin, "{line}")
            .and_then(|_| stdin.flush())
            .map_err(|e| Error::Protocol(format!("write to policy: {e}")))
    }

    fn recv(&mut self, timeout: Duration) -> Result<String> {
        match self.lines.recv_timeout(timeout) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(Error::Protocol(format!("read from policy: {e}"))),
            Err(RecvTimeoutError::Timeout) => Err(Error::Timeout(timeout)),
            Err(RecvTimeoutError::Disconnected) => Err(Error::Protocol("policy closed its output".into())),
        }
    }
}

impl Drop for ChildTransport {
    fn drop(&mut self) {
        // Closing stdin asks the policy to exit; give it a moment, then kill.
        self.stdin.take();
        for _ in 0..50 {
            if let Ok(Some(_)) = self.child.try_wait() {
                return;
            }
            std::thread::sleep(Duration::from_millis(10));
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

struct TcpTransport {
    writer: TcpStream,
    reader: BufReader<TcpStream>,
}

impl Transport for TcpTransport {
    fn send(&mut self, line: &str) -> Result<()> {
        writeln!(self.writer, "{line}")
            .and_then(|_| self.writer.flush())
            .map_err(|e| Error::Protocol(format!("write to policy: {e}")))
    }

    fn recv(&mut self, timeout: Duration) -> Result<String> {
        self.reader.get_ref().set_read_timeout(Some(timeout))?;
        let mut line = String::new();
        match self.reader.read_line(&mut line) {
            Ok(0) => Err(Error::Protocol("policy closed the connection".into())),
            Ok(_) => Ok(line),
            Err(e) if matches!(e.kind(), std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut) => {
                Err(Error::Timeout(timeout))
            }
            Err(e) => Err(Error::Protocol(format!("read from policy: {e}"))),
        }
    }
}

/// A connected external policy. Plays either side.
pub struct ExternalPolicy {
    transport: Box<dyn Transport>,
    side: Side,
    config: ExternalConfig,
    episode: u64,
}

impl ExternalPolicy {
    /// Opens the endpoint and completes the handshake.
    pub fn connect(endpoint: &Endpoint, config: &ExternalConfig, spec: &PegSpec, side: Side) -> Result<ExternalPolicy> {
        let transport: Box<dyn Transport> = match endpoint {
            Endpoint::Command(argv) => Box::new(ChildTransport::spawn(argv)?),
            Endpoint::Tcp(addr) => {
                let stream = TcpStream::connect(addr).map_err(|e| Error::Protocol(format!("connect {addr}: {e}")))?;
                stream.set_nodelay(true)?;
                Box::new(TcpTransport { reader: BufReader::new(stream.try_clone()?), writer: stream })
            }
        };
        let mut policy = ExternalPolicy { transport, side, config: config.clone(), episode: 0 };
        policy.handshake(spec)?;
        Ok(policy)
    }

    fn handshake(&mut self, spec: &PegSpec) -> Result<()> {
        let hello = Message::Hello {
            protocol_version: PROTOCOL_VERSION,
            fingerprint: spec.fingerprint(),
            n: spec.node_count(),
            m: spec.pursuers(),
            exits: spec.exits().to_vec(),
            side: self.side,
        };
        self.transport.send(&hello.to_line())?;
        match self.receive()? {
            Message::Ready { fingerprint } if fingerprint == spec.fingerprint() => Ok(()),
            Message::Ready { fingerprint } => {
                Err(Error::FingerprintMismatch { expected: spec.fingerprint(), found: fingerprint })
            }
            other => Err(Error::Protocol(format!("expected ready, got {}", other.to_line()))),
        }
    }

    fn receive(&mut self) -> Result<Message> {
        let line = self.transport.recv(self.config.timeout)?;
        Message::from_line(&line)
    }

    fn request(&mut self, spec: &PegSpec, s: &GlobalState, t: usize) -> Result<(Option<usize>, Option<Vec<usize>>)> {
        let feature = if self.config.send_features && spec.apsp().diameter() > 0 {
            let f = extract_feature(spec, s, 0)?;
            Some(WireFeature { rows: f.rows, cols: f.cols, values: f.data, c: f.acting_node, l: f.acting_order })
        } else {
            None
        };
        let act = Message::Act { episode: self.episode, t, state: s.clone(), exits: spec.exits().to_vec(), feature };
        self.transport.send(&act.to_line())?;
        match self.receive()? {
            Message::Move { node, nodes } => Ok((node, nodes)),
            other => Err(Error::Protocol(format!("expected move, got {}", other.to_line()))),
        }
    }

    fn finish(&mut self, outcome: Outcome, steps: usize) -> Result<()> {
        self.transport.send(&Message::End { episode: self.episode, outcome, steps }.to_line())
    }
}

impl PursuerPolicy for ExternalPolicy {
    fn name(&self) -> String {
        "external".into()
    }
    fn stationary(&self) -> bool {
        false
    }
    fn begin_episode(&mut self, _spec: &PegSpec, info: EpisodeInfo) -> Result<()> {
        self.episode = info.episode;
        Ok(())
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, t: usize) -> Result<Vec<usize>> {
        match self.request(spec, s, t)? {
            (_, Some(nodes)) => Ok(nodes),
            (Some(node), None) if spec.pursuers() == 1 => Ok(vec![node]),
            _ => Err(Error::Protocol("pursuer move must carry \"nodes\"".into())),
        }
    }
    fn end_episode(&mut self, outcome: Outcome, steps: usize) -> Result<()> {
        self.finish(outcome, steps)
    }
}

impl EvaderPolicy for ExternalPolicy {
    fn name(&self) -> String {
        "external".into()
    }
    fn stationary(&self) -> bool {
        false
    }
    fn begin_episode(&mut self, _spec: &PegSpec, info: EpisodeInfo) -> Result<()> {
        self.episode = info.episode;
        Ok(())
    }
    fn act(&mut self, spec: &PegSpec, s: &GlobalState, t: usize) -> Result<usize> {
        match self.request(spec, s, t)? {
            (Some(node), _) => Ok(node),
            _ => Err(Error::Protocol("evader move must carry \"node\"".into())),
        }
    }
    fn end_episode(&mut self, outcome: Outcome, steps: usize) -> Result<()> {
        self.finish(outcome, steps)
    }
}

/// Misbehaviors for the echo test double.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EchoOptions {
    /// Answer `act` with an out-of-range node.
    pub illegal: bool,
    /// Echo a wrong fingerprint in `ready`.
    pub bad_fingerprint: bool,
    /// Never answer `act`.
    pub silent: bool,
}

/// Serves the protocol with a policy that never moves. Returns when the
/// input ends.
pub fn echo_serve<R: BufRead, W: Write>(input: R, mut output: W, opts: EchoOptions) -> Result<()> {
    let mut side = Side::Pursuer;
    let mut n = 0;
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match Message::from_line(&line)? {
            Message::Hello { fingerprint, side: s, n: nodes, .. } => {
                side = s;
                n = nodes;
                let fingerprint = if opts.bad_fingerprint { fingerprint ^ 1 } else { fingerprint };
                Some(Message::Ready { fingerprint })
            }
            Message::Act { .. } if opts.silent => None,
            Message::Act { state, .. } => Some(match (side, opts.illegal) {
                (Side::Pursuer, false) => Message::Move { node: None, nodes: Some(state.pursuers) },
                (Side::Pursuer, true) => Message::Move { node: None, nodes: Some(vec![n; state.pursuers.len()]) },
                (Side::Evader, false) => Message::Move { node: Some(state.evader), nodes: None },
                (Side::Evader, true) => Message::Move { node: Some(n), nodes: None },
            }),
            _ => None,
        };
        if let Some(reply) = reply {
            writeln!(output, "{}", reply.to_line())?;
            output.flush()?;
        }
    }
    Ok(())
}
