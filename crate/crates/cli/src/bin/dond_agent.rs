//! Reference external policy process speaking the JSON-lines protocol.
//!
//! Modes: `uniform` answers every request correctly with uniform play and
//! zero values; `malformed` answers requests with broken JSON; `bad-sum`
//! returns probabilities that do not sum to one; `crash` exits after the
//! handshake.

use serde_json::{json, Value};
use std::io::{BufRead, Write};

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_else(|| "uniform".into());
    if !["uniform", "malformed", "bad-sum", "crash"].contains(&mode.as_str()) {
        eprintln!("unknown mode `{mode}`; expected uniform, malformed, bad-sum or crash");
        std::process::exit(2);
    }
    let stdin = std::io::stdin();
    let mut out = std::io::stdout().lock();
    for line in stdin.lock().lines() {
        let Ok(line) = line else { break };
        let req: Value = match serde_json::from_str(&line) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("unreadable request: {e}");
                break;
            }
        };
        let reply = match req.get("kind").and_then(Value::as_str) {
            Some("hello") => json!({"ok": true}).to_string(),
            Some(_) if mode == "crash" => std::process::exit(1),
            Some(_) if mode == "malformed" => "{\"probs\": [".to_string(),
            Some("act") => {
                let n = req.get("legal").and_then(Value::as_array).map_or(0, Vec::len);
                let p = if mode == "bad-sum" { 0.5 } else { 1.0 / n.max(1) as f64 };
                json!({"probs": vec![p; n]}).to_string()
            }
            Some("value") => json!({"values": [0.0, 0.0]}).to_string(),
            _ => json!({"error": "unknown request"}).to_string(),
        };
        if writeln!(out, "{reply}").and_then(|_| out.flush()).is_err() {
            break;
        }
    }
}
