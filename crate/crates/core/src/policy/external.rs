use super::{validate_distribution, Policy, PolicyError, ValueFn};
use crate::game::{encode_observation, History, InfoState, ENCODING_VERSION};
use rand::RngCore;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

/// How to launch a policy process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub name: String,
    pub program: String,
    #[serde(default)]
    pub args: Vec<String>,
    /// Per-request reply deadline.
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
}

fn default_timeout_ms() -> u64 {
    10_000
}

struct Conn {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    /// Set after a timeout or broken pipe; replies could no longer be matched to requests.
    broken: bool,
}

/// A policy and value provider served by a subprocess over JSON lines.
///
/// Requests are serialised; run one process per worker for parallelism.
pub struct ExternalPolicy {
    spec: ProcessSpec,
    conn: Mutex<Conn>,
}

impl ExternalPolicy {
    /// Launches the process and performs the handshake.
    pub fn spawn(spec: ProcessSpec) -> Result<Self, PolicyError> {
        let mut child = Command::new(&spec.program)
            .args(&spec.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|source| PolicyError::Launch { command: spec.program.clone(), source })?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let policy = ExternalPolicy { spec, conn: Mutex::new(Conn { child, stdin, lines: rx, broken: false }) };
        let reply = policy.request(&json!({"kind": "hello", "game": "dond", "encoding_version": ENCODING_VERSION}))?;
        if reply.get("ok") != Some(&Value::Bool(true)) {
            return Err(PolicyError::Protocol { detail: "handshake not acknowledged".into(), message: reply.to_string() });
        }
        Ok(policy)
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    fn request(&self, req: &Value) -> Result<Value, PolicyError> {
        let mut conn = self.conn.lock().unwrap_or_else(|e| e.into_inner());
        let text = req.to_string();
        if conn.broken {
            return Err(PolicyError::Protocol { detail: "process connection is no longer usable".into(), message: text });
        }
        if let Err(e) = writeln!(conn.stdin, "{text}").and_then(|_| conn.stdin.flush()) {
            conn.broken = true;
            return Err(PolicyError::Protocol { detail: format!("write failed: {e}"), message: text });
        }
        let timeout = Duration::from_millis(self.spec.timeout_ms);
        let line = match conn.lines.recv_timeout(timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => {
                conn.broken = true;
                return Err(PolicyError::Protocol { detail: format!("read failed: {e}"), message: text });
            }
            Err(RecvTimeoutError::Timeout) => {
                conn.broken = true;
                return Err(PolicyError::Timeout { timeout, request: text });
            }
            Err(RecvTimeoutError::Disconnected) => {
                conn.broken = true;
                return Err(PolicyError::Protocol { detail: "process closed its output".into(), message: text });
            }
        };
        serde_json::from_str(&line)
            .map_err(|e| PolicyError::Protocol { detail: format!("reply is not JSON: {e}"), message: line })
    }
}

impl Drop for ExternalPolicy {
    fn drop(&mut self) {
        let conn = self.conn.get_mut().unwrap_or_else(|e| e.into_inner());
        let _ = conn.child.kill();
        let _ = conn.child.wait();
    }
}

fn float_array(reply: &Value, field: &str) -> Result<Vec<f64>, PolicyError> {
    let bad = |detail: String| PolicyError::Protocol { detail, message: reply.to_string() };
    let arr = reply.get(field).and_then(Value::as_array).ok_or_else(|| bad(format!("missing array `{field}`")))?;
    arr.iter().map(|x| x.as_f64().ok_or_else(|| bad(format!("non-numeric entry in `{field}`")))).collect()
}

impl Policy for ExternalPolicy {
    fn name(&self) -> &str {
        &self.spec.name
    }

    fn probs(&self, s: &InfoState) -> Result<Vec<f64>, PolicyError> {
        let legal: Vec<u32> = s.legal_actions()?.iter().map(|a| a.id()).collect();
        let reply = self.request(&json!({"kind": "act", "obs": encode_observation(s), "legal": legal}))?;
        let probs = float_array(&reply, "probs")?;
        validate_distribution(s, &probs)?;
        Ok(probs)
    }
}

impl ValueFn for ExternalPolicy {
    fn values(&self, s: &InfoState, _h: &History, _rng: &mut dyn RngCore) -> Result<[f64; 2], PolicyError> {
        let reply = self.request(&json!({"kind": "value", "obs": encode_observation(s)}))?;
        let v = float_array(&reply, "values")?;
        match v.as_slice() {
            [a, b] if a.is_finite() && b.is_finite() => Ok([*a, *b]),
            _ => Err(PolicyError::Protocol { detail: "expected two finite values".into(), message: reply.to_string() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{GameParams, Instance, Player};

    fn shell(name: &str, script: &str, timeout_ms: u64) -> ProcessSpec {
        ProcessSpec { name: name.into(), program: "sh".into(), args: vec!["-c".into(), script.into()], timeout_ms }
    }

    fn state() -> InfoState {
        let inst = Instance::new([1, 1, 1], [5, 5, 0], [0, 5, 5]).unwrap();
        History::new(inst, GameParams::new(10, 0.0, 1.0).unwrap()).unwrap().info_state(Player::One)
    }

    #[test]
    fn malformed_reply_is_a_protocol_error() {
        let p = ExternalPolicy::spawn(shell("bad", "read l; echo '{\"ok\":true}'; while read l; do echo 'oops{'; done", 5000))
            .unwrap();
        match p.probs(&state()) {
            Err(PolicyError::Protocol { message, .. }) => assert_eq!(message, "oops{"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn silence_times_out() {
        let p = ExternalPolicy::spawn(shell("mute", "read l; echo '{\"ok\":true}'; sleep 5", 200)).unwrap();
        assert!(matches!(p.probs(&state()), Err(PolicyError::Timeout { .. })));
        // the connection is abandoned rather than reused out of sync
        assert!(matches!(p.probs(&state()), Err(PolicyError::Protocol { .. })));
    }

    #[test]
    fn refused_handshake_and_missing_program() {
        assert!(matches!(
            ExternalPolicy::spawn(shell("no", "read l; echo '{\"ok\":false}'", 5000)),
            Err(PolicyError::Protocol { .. })
        ));
        let spec = ProcessSpec { name: "x".into(), program: "/nonexistent/agent".into(), args: vec![], timeout_ms: 100 };
        assert!(matches!(ExternalPolicy::spawn(spec), Err(PolicyError::Launch { .. })));
    }

    #[test]
    fn value_replies_are_parsed() {
        let p = ExternalPolicy::spawn(shell(
            "v",
            "read l; echo '{\"ok\":true}'; while read l; do echo '{\"values\":[1.5,-2]}'; done",
            5000,
        ))
        .unwrap();
        let s = state();
        let inst = Instance::new([1, 1, 1], [5, 5, 0], [0, 5, 5]).unwrap();
        let h = History::new(inst, GameParams::new(10, 0.0, 1.0).unwrap()).unwrap();
        let mut rng = rand::rng();
        assert_eq!(p.values(&s, &h, &mut rng).unwrap(), [1.5, -2.0]);
    }
}
