//! Run parameters. Built-in defaults, a preset, a flat `key=value` config
//! file and command-line flags are layered in that order; later layers win.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

/// Linear grid `start, …, stop` with `count` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Range {
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let [start, stop, count] = parts[..] else {
            bail!("range `{text}` is not start:stop:count");
        };
        let range = Range {
            start: parse_number(start)?,
            stop: parse_number(stop)?,
            count: count
                .trim()
                .parse()
                .with_context(|| format!("range count `{count}` is not an integer"))?,
        };
        if range.count == 0 {
            bail!("range `{text}` is empty");
        }
        if !(range.start.is_finite() && range.stop.is_finite()) {
            bail!("range `{text}` has a non-finite end point");
        }
        Ok(range)
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * k as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Fixed(f64),
    Sweep(Range),
}

impl Value {
    /// A single number or a `start:stop:count` range.
    pub fn parse(text: &str) -> Result<Self> {
        if text.contains(':') {
            Range::parse(text).map(Value::Sweep)
        } else {
            parse_number(text).map(Value::Fixed)
        }
    }
}

fn parse_number(text: &str) -> Result<f64> {
    let t = text.trim();
    match t {
        "inf" | "+inf" => Ok(f64::INFINITY),
        _ => t.parse().with_context(|| format!("`{t}` is not a number")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    ModeSweep,
    WorkContour,
    Tradeoff,
    EmpSweep,
    Sample,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::ModeSweep => "mode-sweep",
            CommandKind::WorkContour => "work-contour",
            CommandKind::Tradeoff => "tradeoff",
            CommandKind::EmpSweep => "emp-sweep",
            CommandKind::Sample => "sample",
        }
    }

    /// Accepted symbols with their built-in values.
    fn defaults(self) -> Vec<(&'static str, &'static str)> {
        let cycle = [
            ("gamma_c", "2"),
            ("gamma_h", "2"),
            ("beta_c", "10"),
            ("beta_h", "2"),
            ("omega_c", "0.2"),
            ("omega_h", "0.85"),
            ("sigma_c", "1"),
            ("sigma_h", "1"),
            ("tau_c", "inf"),
            ("tau_h", "inf"),
            ("tau_adi", "0"),
        ];
        let mut out = cycle.to_vec();
        match self {
            // ω_h follows from r
            CommandKind::ModeSweep => {
                out.retain(|e| e.0 != "omega_h");
                out.push(("r", "0.5:3:251"));
            }
            CommandKind::WorkContour => set(&mut out, "omega_h", "0.02:1:50"),
            CommandKind::Tradeoff => set(&mut out, "gamma_h", "1.5:2.5:101"),
            CommandKind::Sample => set(&mut out, "n", "100000"),
            CommandKind::EmpSweep => {
                out = vec![
                    ("eta_C", "0.05:0.95:19"),
                    ("beta_h", "2"),
                    ("sigma_c", "1"),
                    ("sigma_h", "1"),
                    ("tau_adi", "0"),
                ];
            }
        }
        out
    }
}

fn set(out: &mut Vec<(&'static str, &'static str)>, key: &'static str, value: &'static str) {
    match out.iter_mut().find(|e| e.0 == key) {
        Some(e) => e.1 = value,
        None => out.push((key, value)),
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub struct Preset {
    pub name: &'static str,
    pub command: CommandKind,
    pub entries: &'static [(&'static str, &'static str)],
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1b",
        command: CommandKind::ModeSweep,
        entries: &[
            ("gamma_c", "2"),
            ("gamma_h", "2"),
            ("omega_c", "0.2"),
            ("r", "0.5:3:2501"),
        ],
    },
    Preset {
        name: "fig1c",
        command: CommandKind::WorkContour,
        entries: &[
            ("gamma_c", "2"),
            ("gamma_h", "2"),
            ("omega_c", "0.02:1:50"),
            ("omega_h", "0.02:1:50"),
        ],
    },
    Preset {
        name: "fig1d",
        command: CommandKind::WorkContour,
        entries: &[
            ("gamma_c", "2"),
            ("gamma_h", "4"),
            ("omega_c", "0.02:1:50"),
            ("omega_h", "0.02:1:50"),
        ],
    },
    Preset {
        name: "fig1e",
        command: CommandKind::WorkContour,
        entries: &[
            ("gamma_c", "4"),
            ("gamma_h", "2"),
            ("omega_c", "0.02:1:50"),
            ("omega_h", "0.02:1:50"),
        ],
    },
    // variance versus r at fixed ω_c = 0.2
    Preset {
        name: "fig2a",
        command: CommandKind::ModeSweep,
        entries: &[
            ("gamma_c", "2"),
            ("gamma_h", "2"),
            ("omega_c", "0.2"),
            ("r", "0.5:3:251"),
        ],
    },
    Preset {
        name: "fig2b",
        command: CommandKind::Tradeoff,
        entries: &[
            ("gamma_c", "2"),
            ("gamma_h", "1.5:2.5:101"),
            ("omega_c", "0.2"),
            ("omega_h", "0.85"),
        ],
    },
    Preset {
        name: "fig3",
        command: CommandKind::EmpSweep,
        entries: &[("eta_C", "0.05:0.95:19"), ("beta_h", "2"), ("tau_adi", "0")],
    },
];

pub fn find_preset(name: &str) -> Result<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let known: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        anyhow!("unknown preset `{name}` (known: {})", known.join(", "))
    })
}

/// Contents of a flat `key=value` config file. Blank lines and lines
/// starting with `#` are skipped.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    pub values: Vec<(String, String)>,
    pub seed: Option<u64>,
    pub precision: Option<usize>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut file = ConfigFile::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("line {}: expected key=value", n + 1))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "seed" => file.seed = Some(value.parse().context("seed")?),
                "precision" => file.precision = Some(value.parse().context("precision")?),
                _ => file.values.push((key.to_string(), value.to_string())),
            }
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config file {}", path.display()))
    }
}

/// Splits `sym=value`.
pub fn split_assignment(text: &str) -> Result<(&str, &str)> {
    text.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| anyhow!("`{text}` is not sym=value"))
}

/// Resolved symbol values for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub command: CommandKind,
    pub values: BTreeMap<String, Value>,
}

impl Params {
    pub fn new(command: CommandKind) -> Self {
        let values = command
            .defaults()
            .iter()
            .map(|&(k, v)| (k.to_string(), Value::parse(v).expect("built-in default")))
            .collect();
        Params { command, values }
    }

    pub fn apply(&mut self, key: &str, value: Value) -> Result<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => {
                let known: Vec<&str> = self.values.keys().map(String::as_str).collect();
                bail!(
                    "`{key}` is not a parameter of {} (known: {})",
                    self.command,
                    known.join(", ")
                )
            }
        }
    }

    pub fn apply_text(&mut self, key: &str, text: &str) -> Result<()> {
        let value = Value::parse(text).with_context(|| format!("value of `{key}`"))?;
        self.apply(key, value)
    }

    /// Swept symbols in key order.
    pub fn swept(&self) -> Vec<&str> {
        self.values
            .iter()
            .filter(|(_, v)| matches!(v, Value::Sweep(_)))
            .map(|(k, _)| k.as_str())
            .collect()
    }

    /// Cartesian product of all values; the first key in order varies slowest.
    pub fn points(&self) -> Vec<BTreeMap<String, f64>> {
        let mut out = vec![BTreeMap::new()];
        for (key, value) in &self.values {
            let options = match value {
                Value::Fixed(v) => vec![*v],
                Value::Sweep(r) => r.points(),
            };
            out = out
                .into_iter()
                .flat_map(|p| {
                    options.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.insert(key.clone(), v);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_points_hit_both_ends() {
        let r = Range::parse("0.5:3:2501").unwrap();
        let p = r.points();
        assert_eq!(p.len(), 2501);
        assert_eq!((p[0], p[2500]), (0.5, 3.0));
        assert_eq!(Range::parse("1:2:1").unwrap().points(), vec![1.0]);
        assert!(Range::parse("1:2:0").is_err());
        assert!(Range::parse("1:2").is_err());
    }

    #[test]
    fn values_and_numbers() {
        assert_eq!(Value::parse("inf").unwrap(), Value::Fixed(f64::INFINITY));
        assert_eq!(Value::parse(" 0.25").unwrap(), Value::Fixed(0.25));
        assert!(Value::parse("x").is_err());
    }

    #[test]
    fn config_file_parsing() {
        let f = ConfigFile::parse("# comment\n\ngamma_h = 4\nseed=9\nr=1:2:3\n").unwrap();
        assert_eq!(f.seed, Some(9));
        assert_eq!(
            f.values,
            vec![("gamma_h".into(), "4".into()), ("r".into(), "1:2:3".into())]
        );
        assert!(ConfigFile::parse("nonsense").is_err());
    }

    #[test]
    fn defaults_cover_command_axes() {
        let p = Params::new(CommandKind::Tradeoff);
        assert_eq!(p.swept(), vec!["gamma_h"]);
        assert_eq!(p.values["omega_h"], Value::Fixed(0.85));
        assert_eq!(Params::new(CommandKind::ModeSweep).swept(), vec!["r"]);
        assert!(!Params::new(CommandKind::ModeSweep)
            .values
            .contains_key("omega_h"));
        let mut p = Params::new(CommandKind::EmpSweep);
        assert!(p.apply_text("gamma_c", "2").is_err());
        p.apply_text("eta_C", "0.2:0.8:4").unwrap();
        assert_eq!(p.points().len(), 4);
    }

    #[test]
    fn cartesian_order_is_key_order() {
        let mut p = Params::new(CommandKind::WorkContour);
        p.apply_text("omega_c", "1:2:2").unwrap();
        p.apply_text("omega_h", "3:4:2").unwrap();
        let pts: Vec<(f64, f64)> = p
            .points()
            .iter()
            .map(|q| (q["omega_c"], q["omega_h"]))
            .collect();
        assert_eq!(pts, vec![(1.0, 3.0), (1.0, 4.0), (2.0, 3.0), (2.0, 4.0)]);
    }

    #[test]
    fn presets_name_valid_symbols() {
        for preset in PRESETS {
            let mut p = Params::new(preset.command);
            for &(k, v) in preset.entries {
                p.apply_text(k, v).unwrap();
            }
        }
        assert!(find_preset("fig9").is_err());
    }
}
