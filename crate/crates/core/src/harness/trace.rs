//! Line-delimited trace emission and exact replay.
//!
//! A trace is a sequence of single-line records: a header carrying the full
//! trial configuration, one record per slot, one record per combiner action,
//! a result record, and a final whole-file checksum record. Replaying
//! re-runs the trial from the header and verifies that every byte matches.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::TraceError;
use crate::observe::{CombineEvent, SimObserver, SlotEvent, TxAction};
use crate::packet::Probability;
use crate::queues::HaltKind;

use super::{run_trial, Mode, Scheme, SimConfig, TrialResult};

pub const TRACE_SCHEMA: &str = "collisim-trace-v1";

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn tx_action_str(a: TxAction) -> String {
    match a {
        TxAction::Silent => "silent".into(),
        TxAction::Combination => "rlc".into(),
        TxAction::Packet(id) => id.to_string(),
    }
}

/// Buffers trace lines for one trial; `finish` appends the result and the
/// checksum and yields the exact file contents.
pub struct TraceWriter {
    lines: Vec<String>,
}

impl TraceWriter {
    pub fn new(cfg: &SimConfig, trial: u32) -> Self {
        let header = format!(
            "{{\"schema\":\"{}\",\"scheme\":\"{}\",\"p\":{},\"m\":{},\"seed\":{},\"trial\":{},\"mode\":\"{}\",\"field_modulus\":{}}}",
            TRACE_SCHEMA,
            cfg.scheme.name(),
            cfg.p,
            cfg.m,
            cfg.seed,
            trial,
            cfg.mode.name(),
            cfg.field_modulus,
        );
        TraceWriter { lines: vec![header] }
    }

    pub fn finish(mut self, result: &TrialResult) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_else(|| "null".into());
        self.lines.push(format!(
            "{{\"event\":\"result\",\"phase1_slots\":{},\"phase2_slots\":{},\"total_slots\":{},\"r1\":{},\"r2\":{},\"decode_ok_rx1\":{},\"decode_ok_rx2\":{},\"halt_kind\":\"{}\"}}",
            result.phase1_slots,
            result.phase2_slots,
            result.total_slots,
            opt(result.r1),
            opt(result.r2),
            result.decode_ok_rx1,
            result.decode_ok_rx2,
            result.halt.map(|h| h.name()).unwrap_or("none"),
        ));
        let mut body = String::new();
        for l in &self.lines {
            body.push_str(l);
            body.push('\n');
        }
        let checksum = fnv1a64(body.as_bytes());
        let _ = writeln!(body, "{{\"checksum\":\"fnv1a64:{checksum:016x}\"}}");
        body
    }
}

impl SimObserver for TraceWriter {
    fn slot(&mut self, ev: &SlotEvent<'_>) {
        let (a11, a12, a21, a22) = ev.state.flags();
        let bit = |b: bool| if b { 1 } else { 0 };
        let mut transitions = String::from("[");
        for (i, mv) in ev.transitions.iter().enumerate() {
            if i > 0 {
                transitions.push(',');
            }
            let _ = write!(
                transitions,
                "[\"{}\",\"{}\",\"{}\"]",
                mv.id,
                mv.from.name(),
                mv.to.name()
            );
        }
        transitions.push(']');
        self.lines.push(format!(
            "{{\"t\":{},\"alpha\":[{},{},{},{}],\"case\":{},\"tx1\":\"{}\",\"tx2\":\"{}\",\"transitions\":{}}}",
            ev.t,
            bit(a11),
            bit(a12),
            bit(a21),
            bit(a22),
            ev.case.get(),
            tx_action_str(ev.tx1),
            tx_action_str(ev.tx2),
            transitions,
        ));
    }

    fn combine(&mut self, ev: &CombineEvent) {
        let inputs: Vec<String> = ev.inputs.iter().map(|id| format!("\"{id}\"")).collect();
        let output = ev
            .output
            .map(|id| format!("\"{id}\""))
            .unwrap_or_else(|| "null".into());
        self.lines.push(format!(
            "{{\"event\":\"combine\",\"kind\":\"{}\",\"tx\":{},\"inputs\":[{}],\"output\":{}}}",
            ev.kind.name(),
            ev.tx.idx() + 1,
            inputs.join(","),
            output,
        ));
    }
}

/// Produce the complete trace text for one trial of a configuration.
pub fn trace_trial(cfg: &SimConfig, p: Probability, trial: u32) -> String {
    let mut writer = TraceWriter::new(cfg, trial);
    let result = run_trial(cfg, p, trial, &mut writer);
    writer.finish(&result)
}

fn extract<'a>(line: &'a str, key: &str) -> Result<&'a str, TraceError> {
    let pat = format!("\"{key}\":");
    let start = line
        .find(&pat)
        .ok_or_else(|| TraceError::Schema(format!("missing field {key}")))?
        + pat.len();
    let rest = &line[start..];
    let end = if let Some(stripped) = rest.strip_prefix('"') {
        let close = stripped
            .find('"')
            .ok_or_else(|| TraceError::Schema(format!("unterminated string for {key}")))?;
        return Ok(&stripped[..close]);
    } else {
        rest.find([',', '}'])
            .ok_or_else(|| TraceError::Schema(format!("unterminated value for {key}")))?
    };
    Ok(&rest[..end])
}

fn parse_num<T: std::str::FromStr>(line: &str, key: &str) -> Result<T, TraceError> {
    extract(line, key)?
        .parse::<T>()
        .map_err(|_| TraceError::Schema(format!("bad numeric field {key}")))
}

/// Parse the result record of a trace.
fn parse_result(line: &str, trial: u32) -> Result<TrialResult, TraceError> {
    let opt_f = |s: &str| -> Option<f64> {
        if s == "null" {
            None
        } else {
            s.parse().ok()
        }
    };
    let halt = match extract(line, "halt_kind")? {
        "none" => None,
        "type_i" => Some(HaltKind::TypeI),
        "type_ii" => Some(HaltKind::TypeII),
        other => return Err(TraceError::Schema(format!("unknown halt kind {other}"))),
    };
    Ok(TrialResult {
        trial,
        phase1_slots: parse_num(line, "phase1_slots")?,
        phase2_slots: parse_num(line, "phase2_slots")?,
        total_slots: parse_num(line, "total_slots")?,
        r1: opt_f(extract(line, "r1")?),
        r2: opt_f(extract(line, "r2")?),
        decode_ok_rx1: extract(line, "decode_ok_rx1")? == "true",
        decode_ok_rx2: extract(line, "decode_ok_rx2")? == "true",
        halt,
    })
}

/// Replay a trace file: verify its checksum, re-run the trial it describes,
/// require byte equality, and return the reconstructed result.
pub fn replay(path: &Path) -> Result<TrialResult, TraceError> {
    let text = std::fs::read_to_string(path)?;
    let trimmed = text.trim_end_matches('\n');
    let (body_end, checksum_line) = match trimmed.rfind('\n') {
        Some(i) => (i + 1, &trimmed[i + 1..]),
        None => return Err(TraceError::Schema("trace too short".into())),
    };
    if !checksum_line.starts_with("{\"checksum\":") {
        return Err(TraceError::Schema("missing checksum record".into()));
    }
    let stored = extract(checksum_line, "checksum")?;
    let stored_hex = stored
        .strip_prefix("fnv1a64:")
        .ok_or_else(|| TraceError::Schema("unknown checksum kind".into()))?;
    let computed = fnv1a64(&text.as_bytes()[..body_end]);
    let computed_str = format!("{computed:016x}");
    if stored_hex != computed_str {
        return Err(TraceError::Checksum {
            stored: stored_hex.into(),
            computed: computed_str,
        });
    }

    let header = text
        .lines()
        .next()
        .ok_or_else(|| TraceError::Schema("empty trace".into()))?;
    if extract(header, "schema")? != TRACE_SCHEMA {
        return Err(TraceError::Schema(format!(
            "schema {} not supported",
            extract(header, "schema")?
        )));
    }
    let cfg = SimConfig {
        scheme: Scheme::parse(extract(header, "scheme")?)
            .map_err(|e| TraceError::Schema(e.to_string()))?,
        p: parse_num(header, "p")?,
        m: parse_num(header, "m")?,
        seed: parse_num(header, "seed")?,
        trials: 1,
        mode: Mode::parse(extract(header, "mode")?)
            .map_err(|e| TraceError::Schema(e.to_string()))?,
        workers: 1,
        field_modulus: parse_num(header, "field_modulus")?,
    };
    let trial: u32 = parse_num(header, "trial")?;
    let p = cfg
        .validate()
        .map_err(|e| TraceError::Schema(e.to_string()))?;

    let regenerated = trace_trial(&cfg, p, trial);
    if regenerated != text {
        return Err(TraceError::Mismatch(
            "regenerated trace differs from file".into(),
        ));
    }
    let result_line = text
        .lines()
        .rev()
        .find(|l| l.starts_with("{\"event\":\"result\""))
        .ok_or_else(|| TraceError::Schema("missing result record".into()))?;
    parse_result(result_line, trial)
}
