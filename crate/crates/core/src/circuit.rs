//! Cycle-by-cycle schedules of CPHASE and SWAP gates on physical qubits.
//!
//! Two serialized forms exist. The text form has one line per cycle,
//! `t: CPHASE(a,b) SWAP(c,d) ...`, preceded by `# arch:`, `# physical:` and
//! `# init:` header lines. The JSON form carries the same data plus the
//! logical pair each CPHASE was generated for.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mapping::Mapping;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    #[serde(rename = "CPHASE")]
    Cphase,
    #[serde(rename = "SWAP")]
    Swap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub a: usize,
    pub b: usize,
    /// Logical pair a CPHASE was emitted for. Informational; the verifier
    /// recomputes it from the tracked mapping.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub logical: Option<(usize, usize)>,
}

impl Gate {
    pub fn cphase(a: usize, b: usize, logical: (usize, usize)) -> Self {
        let logical = if logical.0 <= logical.1 {
            logical
        } else {
            (logical.1, logical.0)
        };
        Self {
            kind: GateKind::Cphase,
            a,
            b,
            logical: Some(logical),
        }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self {
            kind: GateKind::Swap,
            a,
            b,
            logical: None,
        }
    }

    pub fn is_swap(&self) -> bool {
        self.kind == GateKind::Swap
    }

    pub fn touches(&self, p: usize) -> bool {
        self.a == p || self.b == p
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            GateKind::Cphase => "CPHASE",
            GateKind::Swap => "SWAP",
        };
        write!(f, "{name}({},{})", self.a, self.b)
    }
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Text { line: usize, msg: String },
    #[error("schedule JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledCircuit {
    pub architecture: String,
    pub num_physical: usize,
    pub init: Mapping,
    pub cycles: Vec<Vec<Gate>>,
}

impl ScheduledCircuit {
    pub fn new(architecture: impl Into<String>, num_physical: usize, init: Mapping) -> Self {
        Self {
            architecture: architecture.into(),
            num_physical,
            init,
            cycles: Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        self.cycles.len()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.cycles.iter().flatten()
    }

    pub fn cphase_count(&self) -> usize {
        self.gates().filter(|g| !g.is_swap()).count()
    }

    pub fn swap_count(&self) -> usize {
        self.gates().filter(|g| g.is_swap()).count()
    }

    /// Drops trailing cycles that contain no CPHASE.
    pub fn trim_trailing_swaps(&mut self) {
        while let Some(last) = self.cycles.last() {
            if last.iter().any(|g| !g.is_swap()) {
                break;
            }
            self.cycles.pop();
        }
    }

    /// Renames every physical qubit `p` to `sites[p]`.
    pub fn relabel(
        &self,
        architecture: impl Into<String>,
        num_physical: usize,
        sites: &[usize],
    ) -> Self {
        Self {
            architecture: architecture.into(),
            num_physical,
            init: self.init.through(sites),
            cycles: self
                .cycles
                .iter()
                .map(|cycle| {
                    cycle
                        .iter()
                        .map(|g| Gate {
                            a: sites[g.a],
                            b: sites[g.b],
                            ..*g
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# arch: {}\n# physical: {}\n# init:",
            self.architecture, self.num_physical
        );
        for p in self.init.as_slice() {
            out.push_str(&format!(" {p}"));
        }
        out.push('\n');
        for (t, cycle) in self.cycles.iter().enumerate() {
            out.push_str(&format!("{t}:"));
            for g in cycle {
                out.push_str(&format!(" {g}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, FormatError> {
        let err = |line: usize, msg: String| FormatError::Text { line, msg };
        let mut architecture = None;
        let mut num_physical = None;
        let mut init = None;
        let mut cycles: Vec<Vec<Gate>> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() {
                continue;
            }
            if let Some(header) = content.strip_prefix('#') {
                let Some((key, value)) = header.split_once(':') else {
                    continue;
                };
                let value = value.trim();
                match key.trim() {
                    "arch" => architecture = Some(value.to_string()),
                    "physical" => {
                        num_physical = Some(
                            value
                                .parse::<usize>()
                                .map_err(|_| err(line, format!("bad qubit count {value:?}")))?,
                        )
                    }
                    "init" => {
                        let pi = value
                            .split_whitespace()
                            .map(str::parse::<usize>)
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|_| err(line, format!("bad init mapping {value:?}")))?;
                        init = Some(pi);
                    }
                    _ => {}
                }
                continue;
            }
            let (t, body) = content
                .split_once(':')
                .ok_or_else(|| err(line, "expected \"t: GATE ...\"".into()))?;
            let t: usize = t
                .trim()
                .parse()
                .map_err(|_| err(line, format!("bad cycle index {t:?}")))?;
            if t != cycles.len() {
                return Err(err(
                    line,
                    format!("expected cycle {}, found {t}", cycles.len()),
                ));
            }
            let mut cycle = Vec::new();
            for token in body.split_whitespace() {
                cycle.push(
                    parse_gate(token).ok_or_else(|| err(line, format!("bad gate {token:?}")))?,
                );
            }
            cycles.push(cycle);
        }
        let init = init.ok_or_else(|| err(1, "missing \"# init:\" header".into()))?;
        let num_physical =
            num_physical.unwrap_or_else(|| init.iter().copied().max().map_or(0, |m| m + 1));
        Ok(Self {
            architecture: architecture.unwrap_or_else(|| "custom".into()),
            num_physical,
            init: Mapping::from_vec_unchecked(init),
            cycles,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }
}

fn parse_gate(token: &str) -> Option<Gate> {
    let (name, rest) = token.split_once('(')?;
    let inner = rest.strip_suffix(')')?;
    let (a, b) = inner.split_once(',')?;
    let a = a.trim().parse().ok()?;
    let b = b.trim().parse().ok()?;
    let kind = match name {
        "CPHASE" => GateKind::Cphase,
        "SWAP" => GateKind::Swap,
        _ => return None,
    };
    Some(Gate {
        kind,
        a,
        b,
        logical: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ScheduledCircuit {
        let mut c = ScheduledCircuit::new("linear:3", 3, Mapping::identity(3));
        c.cycles.push(vec![Gate::cphase(0, 1, (0, 1))]);
        c.cycles.push(vec![Gate::swap(1, 2)]);
        c.cycles.push(vec![]);
        c
    }

    #[test]
    fn text_lines() {
        let text = sample().to_text();
        assert!(text.contains("0: CPHASE(0,1)\n"));
        assert!(text.contains("1: SWAP(1,2)\n"));
        assert!(text.contains("2:\n"));
    }

    #[test]
    fn text_roundtrip_drops_provenance_only() {
        let c = sample();
        let back = ScheduledCircuit::parse_text(&c.to_text()).unwrap();
        assert_eq!(back.init, c.init);
        assert_eq!(back.depth(), 3);
        assert_eq!(back.cycles[0][0].logical, None);
        assert_eq!(back.cycles[1][0], c.cycles[1][0]);
    }

    #[test]
    fn json_roundtrip() {
        let c = sample();
        assert_eq!(ScheduledCircuit::from_json(&c.to_json()).unwrap(), c);
        assert!(c.to_json().contains("\"kind\": \"CPHASE\""));
    }

    #[test]
    fn text_errors_carry_line() {
        let bad = "# init: 0 1\n0: CPHASE(0,1)\n1: FOO(1,2)\n";
        match ScheduledCircuit::parse_text(bad) {
            Err(FormatError::Text { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn trims_trailing_swaps() {
        let mut c = sample();
        c.trim_trailing_swaps();
        assert_eq!(c.depth(), 1);
    }
}
