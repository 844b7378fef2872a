//! Logical-to-physical qubit assignments.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MappingError {
    #[error("logical qubits {a} and {b} share physical qubit {p}")]
    NotInjective { a: usize, b: usize, p: usize },
    #[error("logical qubit {logical} maps to physical {p}, outside 0..{q}")]
    OutOfRange { logical: usize, p: usize, q: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// `pi[logical] = physical`. Injective; the image may be a strict subset of
/// the device.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mapping {
    pi: Vec<usize>,
}

impl Mapping {
    pub fn new(pi: Vec<usize>, q: usize) -> Result<Self, MappingError> {
        let m = Self { pi };
        m.validate(q)?;
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            pi: (0..n).collect(),
        }
    }

    pub(crate) fn from_vec_unchecked(pi: Vec<usize>) -> Self {
        Self { pi }
    }

    pub fn validate(&self, q: usize) -> Result<(), MappingError> {
        let mut owner = vec![usize::MAX; q];
        for (logical, &p) in self.pi.iter().enumerate() {
            if p >= q {
                return Err(MappingError::OutOfRange { logical, p, q });
            }
            if owner[p] != usize::MAX {
                return Err(MappingError::NotInjective {
                    a: owner[p],
                    b: logical,
                    p,
                });
            }
            owner[p] = logical;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn get(&self, logical: usize) -> usize {
        self.pi[logical]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.pi
    }

    /// Physical-to-logical table over `q` sites; `None` marks unused sites.
    pub fn inverse(&self, q: usize) -> Vec<Option<usize>> {
        let mut inv = vec![None; q];
        for (logical, &p) in self.pi.iter().enumerate() {
            inv[p] = Some(logical);
        }
        inv
    }

    /// Composes with a site relabelling: `result[l] = sites[self[l]]`.
    pub fn through(&self, sites: &[usize]) -> Mapping {
        Mapping {
            pi: self.pi.iter().map(|&p| sites[p]).collect(),
        }
    }

    /// One `logical physical` pair per line.
    pub fn to_text(&self) -> String {
        self.pi
            .iter()
            .enumerate()
            .map(|(l, p)| format!("{l} {p}\n"))
            .collect()
    }

    pub fn parse(text: &str, q: usize) -> Result<Self, MappingError> {
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let parsed: Vec<usize> = content
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| MappingError::Parse {
                    line: idx + 1,
                    msg: format!("expected \"logical physical\", found {content:?}"),
                })?;
            if parsed.len() != 2 {
                return Err(MappingError::Parse {
                    line: idx + 1,
                    msg: format!("expected \"logical physical\", found {content:?}"),
                });
            }
            pairs.push((parsed[0], parsed[1], idx + 1));
        }
        pairs.sort_unstable();
        let mut pi = Vec::with_capacity(pairs.len());
        for (expect, &(l, p, line)) in pairs.iter().enumerate() {
            if l != expect {
                return Err(MappingError::Parse {
                    line,
                    msg: format!("logical ids must be exactly 0..{}", pairs.len()),
                });
            }
            pi.push(p);
        }
        Self::new(pi, q)
    }
}
