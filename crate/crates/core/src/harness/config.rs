//! Plain-text configuration files: one `key = value` per line, `#` comments.
//! Command-line flags override anything read from a file.

use crate::error::ConfigError;

use super::{Mode, Scheme, SimConfig};

/// Fields a config file may set; `None` means "not mentioned".
#[derive(Clone, Debug, Default)]
pub struct PartialConfig {
    pub scheme: Option<Scheme>,
    pub p: Option<f64>,
    pub m: Option<u32>,
    pub seed: Option<u64>,
    pub trials: Option<u32>,
    pub mode: Option<Mode>,
    pub workers: Option<usize>,
    pub field_modulus: Option<u64>,
    pub out: Option<String>,
    pub trace: Option<String>,
}

impl PartialConfig {
    /// Layer this partial over a base configuration.
    pub fn apply(&self, mut base: SimConfig) -> SimConfig {
        if let Some(v) = self.scheme {
            base.scheme = v;
        }
        if let Some(v) = self.p {
            base.p = v;
        }
        if let Some(v) = self.m {
            base.m = v;
        }
        if let Some(v) = self.seed {
            base.seed = v;
        }
        if let Some(v) = self.trials {
            base.trials = v;
        }
        if let Some(v) = self.mode {
            base.mode = v;
        }
        if let Some(v) = self.workers {
            base.workers = v;
        }
        if let Some(v) = self.field_modulus {
            base.field_modulus = v;
        }
        base
    }
}

pub fn parse_config_text(text: &str) -> Result<PartialConfig, ConfigError> {
    let mut out = PartialConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = i + 1;
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::BadConfigLine {
                line: lineno,
                reason: "expected key = value".into(),
            });
        };
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        let bad = |reason: &str| ConfigError::BadConfigLine {
            line: lineno,
            reason: format!("{reason}: {value}"),
        };
        match key.as_str() {
            "scheme" => out.scheme = Some(Scheme::parse(value)?),
            "p" => out.p = Some(value.parse().map_err(|_| bad("not a probability"))?),
            "m" => out.m = Some(value.parse().map_err(|_| bad("not a packet count"))?),
            "seed" => out.seed = Some(value.parse().map_err(|_| bad("not a seed"))?),
            "trials" => out.trials = Some(value.parse().map_err(|_| bad("not a count"))?),
            "mode" => out.mode = Some(Mode::parse(value)?),
            "workers" => out.workers = Some(value.parse().map_err(|_| bad("not a count"))?),
            "field_modulus" => {
                out.field_modulus = Some(value.parse().map_err(|_| bad("not a modulus"))?)
            }
            "out" => out.out = Some(value.to_string()),
            "trace" => out.trace = Some(value.to_string()),
            _ => {
                return Err(ConfigError::BadConfigLine {
                    line: lineno,
                    reason: format!("unknown key {key}"),
                })
            }
        }
    }
    Ok(out)
}
