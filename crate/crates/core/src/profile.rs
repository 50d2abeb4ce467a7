//! Expected number of leaves, abstractions and applications per level in a
//! uniform closed term with at most `k` levels.

use crate::asymptotics::{classify_bound, BoundKind};
use crate::error::{Error, Result};
use crate::family::{FamilySpec, MarkSpec};
use crate::series::{Census, MomentOrder};
use rug::Rational;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Leaf,
    Unary,
    Binary,
}

impl NodeKind {
    pub const ALL: [NodeKind; 3] = [NodeKind::Leaf, NodeKind::Unary, NodeKind::Binary];

    pub fn mark(self, level: u32) -> MarkSpec {
        match self {
            NodeKind::Leaf => MarkSpec::LeavesAtLevel(level),
            NodeKind::Unary => MarkSpec::UnaryAtLevel(level),
            NodeKind::Binary => MarkSpec::BinaryAtLevel(level),
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Leaf => "leaf",
            NodeKind::Unary => "unary",
            NodeKind::Binary => "binary",
        })
    }
}

impl FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "leaf" | "leaves" => Ok(NodeKind::Leaf),
            "unary" => Ok(NodeKind::Unary),
            "binary" => Ok(NodeKind::Binary),
            _ => Err(format!("unknown node kind {s:?}")),
        }
    }
}

/// Growth of a level mean in `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// No closed term has such a node: leaves at level 0, abstractions at level `k`.
    Empty,
    Constant,
    SqrtN,
    LinearN,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Empty => "empty",
            Regime::Constant => "constant",
            Regime::SqrtN => "sqrt_n",
            Regime::LinearN => "linear_n",
        })
    }
}

/// Regime of `kind` at `level`, predicted from where `k` falls among the `N_j`.
pub fn predicted_regime(k: u32, kind: NodeKind, level: u32) -> Result<Regime> {
    if level > k {
        return Err(Error::LevelOutOfRange { l: level, lo: 0, hi: k });
    }
    if (kind == NodeKind::Leaf && level == 0) || (kind == NodeKind::Unary && level == k) {
        return Ok(Regime::Empty);
    }
    let class = classify_bound(k);
    let edge = k.saturating_sub(class.j);
    Ok(if level < edge {
        Regime::Constant
    } else if level == edge && class.kind == BoundKind::Boundary {
        Regime::SqrtN
    } else {
        Regime::LinearN
    })
}

/// `λ_0 = 0`, `λ_{i+1} = i + 1 + √λ_i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaSeq(pub Vec<f64>);

impl LambdaSeq {
    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }
}

/// `λ_0 ..= λ_m`.
pub fn lambda_sequence(m: usize) -> LambdaSeq {
    let mut v = Vec::with_capacity(m + 1);
    v.push(0.0);
    for i in 0..m {
        let prev: f64 = v[i];
        v.push((i + 1) as f64 + prev.sqrt());
    }
    LambdaSeq(v)
}

/// Terms below this are dropped from the series in [`limit_constant_d`].
const SERIES_CUTOFF: f64 = 1e-15;

/// Limit of the mean number of leaves at level `L = k - l` for `k = N_j` and
/// `j < l <= k`:
///
/// `(k-l)/(2λ_{l-j}) (1 + Σ_{m=1}^{k-l} √λ_{l-j} / (2^m λ_{l-j+m} √λ_{l-j+1} ⋯ √λ_{l-j+m-1}))`.
pub fn limit_constant_d(k: u32, l: u32) -> Result<f64> {
    let class = classify_bound(k);
    if class.kind != BoundKind::Boundary {
        return Err(Error::NotBoundary { k });
    }
    if l <= class.j || l > k {
        return Err(Error::LevelOutOfRange { l, lo: class.j + 1, hi: k });
    }
    let (k, l, j) = (k as usize, l as usize, class.j as usize);
    let lam = lambda_sequence(k - j + 1);
    let base = lam.get(l - j);
    let mut sum = 1.0;
    let mut term = base.sqrt();
    for m in 1..=k - l {
        term /= 2.0;
        if m > 1 {
            term /= lam.get(l - j + m - 1).sqrt();
        }
        let t = term / lam.get(l - j + m);
        if t < SERIES_CUTOFF {
            break;
        }
        sum += t;
    }
    Ok((k - l) as f64 / (2.0 * base) * sum)
}

/// Large-`k` approximation `L / (2(k - j - 1 - L))` of the limit mean number
/// of leaves at level `L`, for `k = N_j` and `L < k - j - 1`.
pub fn limit_constant_c_approx(k: u32, level: u32) -> Result<f64> {
    let class = classify_bound(k);
    if class.kind != BoundKind::Boundary {
        return Err(Error::NotBoundary { k });
    }
    let top = (k - class.j).saturating_sub(1);
    if level >= top {
        return Err(Error::LevelOutOfRange { l: level, lo: 0, hi: top.saturating_sub(1) });
    }
    Ok(level as f64 / (2.0 * (top - level) as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileEntry {
    pub level: u32,
    pub kind: NodeKind,
    pub n: usize,
    #[serde(serialize_with = "ser_rational")]
    pub mean: Rational,
    pub regime: Regime,
    /// Known limit of the mean, for leaves in the bounded levels at `k = N_j`.
    pub limit_constant: Option<f64>,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeStruct;
    let mut st = s.serialize_struct("Rational", 3)?;
    st.serialize_field("numer", &r.numer().to_string())?;
    st.serialize_field("denom", &r.denom().to_string())?;
    st.serialize_field("value", &r.to_f64())?;
    st.end()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileReport {
    pub k: u32,
    pub j: u32,
    pub boundary: bool,
    pub n: usize,
    /// Ordered by level, then leaf, unary, binary.
    pub entries: Vec<ProfileEntry>,
}

impl ProfileReport {
    pub fn entry(&self, kind: NodeKind, level: u32) -> Option<&ProfileEntry> {
        self.entries.iter().find(|e| e.kind == kind && e.level == level)
    }

    pub fn mean(&self, kind: NodeKind, level: u32) -> Option<&Rational> {
        self.entry(kind, level).map(|e| &e.mean)
    }
}

/// Exact mean of `kind` at `level` over closed terms of size `n`.
pub fn level_mean(census: &Census, k: u32, kind: NodeKind, level: u32, n: usize) -> Result<Rational> {
    let spec = FamilySpec::levels(k);
    let t = census.table(spec, kind.mark(level), n, MomentOrder::First)?;
    let count = t.count(0, n);
    if *count == 0 {
        return Err(Error::EmptySize { n });
    }
    Ok(Rational::from((t.first(0, n), count.clone())))
}

fn limit_for(k: u32, kind: NodeKind, level: u32) -> Option<f64> {
    if kind != NodeKind::Leaf {
        return None;
    }
    limit_constant_d(k, k - level).ok()
}

/// Profiles at several sizes sharing one set of tables. Tables are built
/// for the largest size first.
pub fn profile_reports(census: &Census, k: u32, sizes: &[usize]) -> Result<Vec<ProfileReport>> {
    let spec = FamilySpec::levels(k);
    let class = classify_bound(k);
    let Some(&top) = sizes.iter().max() else { return Ok(Vec::new()) };
    for level in 0..=k {
        for kind in NodeKind::ALL {
            census.table(spec, kind.mark(level), top, MomentOrder::First)?;
        }
    }
    sizes
        .iter()
        .map(|&n| {
            let mut entries = Vec::new();
            for level in 0..=k {
                for kind in NodeKind::ALL {
                    entries.push(ProfileEntry {
                        level,
                        kind,
                        n,
                        mean: level_mean(census, k, kind, level, n)?,
                        regime: predicted_regime(k, kind, level)?,
                        limit_constant: limit_for(k, kind, level),
                    });
                }
            }
            Ok(ProfileReport { k, j: class.j, boundary: class.kind == BoundKind::Boundary, n, entries })
        })
        .collect()
}

pub fn profile_report(k: u32, n: usize) -> Result<ProfileReport> {
    Ok(profile_reports(&Census::from_env(), k, &[n])?.remove(0))
}
