//! The two restricted families and the statistics that can be marked.

use crate::error::{Error, Result};
use crate::term::{level_histogram, term_stats, LevelHistogram, Term};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Every index is at most k.
    BoundedIndex,
    /// No node lies below level k.
    BoundedLevels,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::BoundedIndex => "index",
            Family::BoundedLevels => "levels",
        })
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "index" => Ok(Family::BoundedIndex),
            "levels" => Ok(Family::BoundedLevels),
            _ => Err(format!("unknown family {s:?}, expected index or levels")),
        }
    }
}

/// A family together with its bound `k >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub k: u32,
}

impl FamilySpec {
    pub fn new(family: Family, k: u32) -> Result<FamilySpec> {
        if k == 0 {
            return Err(Error::InvalidBound { k });
        }
        Ok(FamilySpec { family, k })
    }

    /// Closed terms whose indices are all at most `k`.
    pub fn index(k: u32) -> FamilySpec {
        FamilySpec::new(Family::BoundedIndex, k).expect("k must be positive")
    }

    /// Closed terms with at most `k` levels.
    pub fn levels(k: u32) -> FamilySpec {
        FamilySpec::new(Family::BoundedLevels, k).expect("k must be positive")
    }

    /// Number of classes in the specification, one per offset `0..=k`.
    pub fn classes(&self) -> usize {
        self.k as usize + 1
    }

    pub fn contains(&self, t: &Term) -> bool {
        let s = term_stats(t);
        s.closed
            && match self.family {
                Family::BoundedIndex => s.max_index <= self.k,
                Family::BoundedLevels => s.level_count <= self.k as usize,
            }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-k{}", self.family, self.k)
    }
}

/// The statistic attached to each term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkSpec {
    None,
    TotalLeaves,
    LeavesAtLevel(u32),
    UnaryAtLevel(u32),
    BinaryAtLevel(u32),
}

impl MarkSpec {
    pub fn validate(&self, spec: FamilySpec) -> Result<()> {
        let level = match *self {
            MarkSpec::None | MarkSpec::TotalLeaves => return Ok(()),
            MarkSpec::LeavesAtLevel(l) | MarkSpec::UnaryAtLevel(l) | MarkSpec::BinaryAtLevel(l) => l,
        };
        if spec.family == Family::BoundedLevels && level <= spec.k {
            Ok(())
        } else {
            Err(Error::InvalidMark { mark: self.to_string(), family: spec.family.to_string(), k: spec.k })
        }
    }

    pub fn level(&self) -> Option<u32> {
        match *self {
            MarkSpec::LeavesAtLevel(l) | MarkSpec::UnaryAtLevel(l) | MarkSpec::BinaryAtLevel(l) => Some(l),
            _ => None,
        }
    }

    /// The value of the statistic on a term, given its level histogram.
    pub fn value(&self, h: &LevelHistogram) -> u64 {
        (match *self {
            MarkSpec::None => 0,
            MarkSpec::TotalLeaves => h.leaves(),
            MarkSpec::LeavesAtLevel(l) => h.at(l as usize).leaves,
            MarkSpec::UnaryAtLevel(l) => h.at(l as usize).unary,
            MarkSpec::BinaryAtLevel(l) => h.at(l as usize).binary,
        }) as u64
    }

    pub fn value_of(&self, t: &Term) -> u64 {
        self.value(&level_histogram(t))
    }

    /// Every mark that is valid for `spec`, `None` first.
    pub fn all(spec: FamilySpec) -> Vec<MarkSpec> {
        let mut marks = vec![MarkSpec::None, MarkSpec::TotalLeaves];
        if spec.family == Family::BoundedLevels {
            for l in 0..=spec.k {
                marks.push(MarkSpec::LeavesAtLevel(l));
                marks.push(MarkSpec::UnaryAtLevel(l));
                marks.push(MarkSpec::BinaryAtLevel(l));
            }
        }
        marks
    }
}

impl fmt::Display for MarkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarkSpec::None => f.write_str("none"),
            MarkSpec::TotalLeaves => f.write_str("total"),
            MarkSpec::LeavesAtLevel(l) => write!(f, "leaves@{l}"),
            MarkSpec::UnaryAtLevel(l) => write!(f, "unary@{l}"),
            MarkSpec::BinaryAtLevel(l) => write!(f, "binary@{l}"),
        }
    }
}

impl FromStr for MarkSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" => return Ok(MarkSpec::None),
            "total" => return Ok(MarkSpec::TotalLeaves),
            _ => {}
        }
        let (kind, level) = s
            .split_once('@')
            .ok_or_else(|| format!("unknown mark {s:?}, expected total, leaves@L, unary@L or binary@L"))?;
        let level: u32 = level.parse().map_err(|_| format!("bad level in mark {s:?}"))?;
        match kind {
            "leaves" => Ok(MarkSpec::LeavesAtLevel(level)),
            "unary" => Ok(MarkSpec::UnaryAtLevel(level)),
            "binary" => Ok(MarkSpec::BinaryAtLevel(level)),
            _ => Err(format!("unknown mark kind {kind:?}")),
        }
    }
}

/// How one class of the specification is built.
///
/// Class `i` has `i` leaf labels, an optional unary production into another
/// class and the binary production `class × class`. The flags say which of
/// these node kinds carry the mark.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct ClassRule {
    pub colors: u32,
    pub child: Option<usize>,
    pub leaf: bool,
    pub unary: bool,
    pub binary: bool,
}

pub(crate) fn class_rules(spec: FamilySpec, mark: MarkSpec) -> Vec<ClassRule> {
    let k = spec.k as usize;
    (0..=k)
        .map(|i| {
            let child = match spec.family {
                Family::BoundedIndex => Some((i + 1).min(k)),
                Family::BoundedLevels => (i < k).then_some(i + 1),
            };
            let at = |l: u32| l as usize == i;
            ClassRule {
                colors: i as u32,
                child,
                leaf: match mark {
                    MarkSpec::TotalLeaves => true,
                    MarkSpec::LeavesAtLevel(l) => at(l),
                    _ => false,
                },
                unary: matches!(mark, MarkSpec::UnaryAtLevel(l) if at(l)),
                binary: matches!(mark, MarkSpec::BinaryAtLevel(l) if at(l)),
            }
        })
        .collect()
}

/// Classes in an order where every unary child is done before its parent.
pub(crate) fn build_order(spec: FamilySpec) -> impl Iterator<Item = usize> {
    (0..=spec.k as usize).rev()
}
