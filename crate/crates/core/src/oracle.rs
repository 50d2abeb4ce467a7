//! Brute-force enumeration of small closed terms.
//!
//! Every Motzkin tree of the requested size is generated, then every
//! admissible leaf labelling. Nothing here shares code with the counting
//! recurrences, which is the point.

use crate::error::{Error, Result};
use crate::family::{Family, FamilySpec, MarkSpec};
use crate::series::{Census, MomentOrder};
use crate::term::{level_histogram, Term};
use rug::Integer;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

/// Largest size the oracle accepts by default.
pub const ORACLE_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub spec: FamilySpec,
    pub n: usize,
    pub terms: Vec<Term>,
}

enum Shape {
    Leaf,
    Unary(Rc<Shape>),
    Binary(Rc<Shape>, Rc<Shape>),
}

struct Shapes {
    max_depth: Option<usize>,
    memo: HashMap<(usize, usize), Rc<Vec<Rc<Shape>>>>,
}

impl Shapes {
    /// Trees of `n` nodes whose root has `depth` abstractions above it.
    /// Leaves come first, then unary roots, then binary roots by left size.
    fn of(&mut self, n: usize, depth: usize) -> Rc<Vec<Rc<Shape>>> {
        if let Some(v) = self.memo.get(&(n, depth)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if n == 1 {
            out.push(Rc::new(Shape::Leaf));
        }
        if n >= 2 && self.max_depth.is_none_or(|m| depth < m) {
            for body in self.of(n - 1, depth + 1).iter() {
                out.push(Rc::new(Shape::Unary(body.clone())));
            }
        }
        for left in 1..n.saturating_sub(1) {
            let ls = self.of(left, depth);
            let rs = self.of(n - 1 - left, depth);
            for l in ls.iter() {
                for r in rs.iter() {
                    out.push(Rc::new(Shape::Binary(l.clone(), r.clone())));
                }
            }
        }
        let out = Rc::new(out);
        self.memo.insert((n, depth), out.clone());
        out
    }
}

fn leaf_depths(s: &Shape, depth: usize, out: &mut Vec<usize>) {
    match s {
        Shape::Leaf => out.push(depth),
        Shape::Unary(b) => leaf_depths(b, depth + 1, out),
        Shape::Binary(l, r) => {
            leaf_depths(l, depth, out);
            leaf_depths(r, depth, out);
        }
    }
}

fn label(s: &Shape, labels: &mut std::slice::Iter<'_, u32>) -> Term {
    match s {
        Shape::Leaf => Term::Var(*labels.next().unwrap()),
        Shape::Unary(b) => Term::abs(label(b, labels)),
        Shape::Binary(l, r) => {
            let l = label(l, labels);
            Term::app(l, label(r, labels))
        }
    }
}

/// Calls `f` on every closed term of size `n` in the family.
pub fn for_each_term(spec: FamilySpec, n: usize, cap: usize, mut f: impl FnMut(&Term)) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    if n == 0 {
        return Ok(());
    }
    let k = spec.k as usize;
    let mut shapes = Shapes {
        max_depth: (spec.family == Family::BoundedLevels).then_some(k),
        memo: HashMap::new(),
    };
    let mut depths = Vec::new();
    for shape in shapes.of(n, 0).iter() {
        depths.clear();
        leaf_depths(shape, 0, &mut depths);
        let top: Vec<u32> = depths
            .iter()
            .map(|&d| match spec.family {
                Family::BoundedIndex => d.min(k) as u32,
                Family::BoundedLevels => d as u32,
            })
            .collect();
        if top.contains(&0) {
            continue;
        }
        // odometer over 1..=top[i]
        let mut labels = vec![1u32; top.len()];
        loop {
            f(&label(shape, &mut labels.iter()));
            let mut i = labels.len();
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if labels[i] < top[i] {
                    labels[i] += 1;
                    break;
                }
                labels[i] = 1;
            }
            if labels.iter().all(|&x| x == 1) {
                break;
            }
        }
    }
    Ok(())
}

pub fn enumerate_terms(spec: FamilySpec, n: usize) -> Result<OracleResult> {
    let mut terms = Vec::new();
    for_each_term(spec, n, ORACLE_CAP, |t| terms.push(t.clone()))?;
    Ok(OracleResult { spec, n, terms })
}

pub fn oracle_histogram(spec: FamilySpec, mark: MarkSpec, n: usize) -> Result<BTreeMap<u64, u64>> {
    Ok(oracle_histograms(spec, &[mark], n)?.remove(0))
}

/// Histograms for several marks from a single enumeration.
pub fn oracle_histograms(spec: FamilySpec, marks: &[MarkSpec], n: usize) -> Result<Vec<BTreeMap<u64, u64>>> {
    for m in marks {
        m.validate(spec)?;
    }
    let mut out = vec![BTreeMap::new(); marks.len()];
    for_each_term(spec, n, ORACLE_CAP, |t| {
        let h = level_histogram(t);
        for (m, hist) in marks.iter().zip(out.iter_mut()) {
            *hist.entry(m.value(&h)).or_insert(0) += 1;
        }
    })?;
    Ok(out)
}

/// Outcome of comparing the counting tables with enumeration.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct Verification {
    /// `(size, mark)` pairs compared.
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Checks counts, every histogram and the first two moments against brute
/// force for all sizes `1..=max_n` and every valid mark.
pub fn verify_against_oracle(census: &Census, spec: FamilySpec, max_n: usize) -> Result<Verification> {
    if max_n > ORACLE_CAP {
        return Err(Error::CapExceeded { n: max_n, cap: ORACLE_CAP });
    }
    let marks = MarkSpec::all(spec);
    let mut out = Verification::default();
    for n in 1..=max_n {
        let brute = oracle_histograms(spec, &marks, n)?;
        let terms: u64 = brute[0].values().sum();
        let count = census.count_closed(spec, n)?;
        if count != terms {
            out.mismatches.push(format!("n={n}: count {count} != {terms}"));
        }
        for (mark, hist) in marks.iter().zip(&brute) {
            out.checked += 1;
            let expected: BTreeMap<u64, Integer> = hist.iter().map(|(&v, &c)| (v, Integer::from(c))).collect();
            let got = match census.distribution(spec, *mark, n) {
                Ok(d) => d,
                Err(Error::EmptySize { .. }) => BTreeMap::new(),
                Err(e) => return Err(e),
            };
            if got != expected {
                out.mismatches.push(format!("n={n} {mark}: histogram {got:?} != {expected:?}"));
            }
            if terms == 0 || *mark == MarkSpec::None {
                continue;
            }
            let t = census.table(spec, *mark, n, MomentOrder::Second)?;
            let s1: u64 = hist.iter().map(|(v, c)| v * c).sum();
            let s2: u64 = hist.iter().map(|(v, c)| v * v * c).sum();
            if t.first(0, n) != s1 || t.second(0, n) != Some(Integer::from(s2)) {
                out.mismatches.push(format!("n={n} {mark}: moment sums differ"));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_debruijn;
    use std::collections::HashSet;

    fn texts(spec: FamilySpec, n: usize) -> HashSet<Term> {
        enumerate_terms(spec, n).unwrap().terms.into_iter().collect()
    }

    fn set(ts: &[&str]) -> HashSet<Term> {
        ts.iter().map(|t| parse_debruijn(t).unwrap()).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(texts(FamilySpec::index(1), 4), set(&["λλλ1", "λ(1 1)"]));
        assert_eq!(texts(FamilySpec::levels(1), 6), set(&["λ(1 (1 1))", "λ(1 1 1)"]));
        assert_eq!(
            texts(FamilySpec::index(1), 5),
            set(&["λλλλ1", "λλ(1 1)", "λ(1 (λ1))", "λ((λ1) 1)", "(λ1) (λ1)"])
        );
        for spec in [FamilySpec::index(3), FamilySpec::levels(3)] {
            assert!(texts(spec, 1).is_empty());
        }
    }

    #[test]
    fn histograms() {
        let h = oracle_histogram(FamilySpec::index(1), MarkSpec::TotalLeaves, 5).unwrap();
        assert_eq!(h, BTreeMap::from([(1, 1), (2, 4)]));
        let h = oracle_histogram(FamilySpec::levels(1), MarkSpec::LeavesAtLevel(1), 4).unwrap();
        assert_eq!(h, BTreeMap::from([(2, 1)]));
        let h = oracle_histogram(FamilySpec::levels(2), MarkSpec::UnaryAtLevel(0), 2).unwrap();
        assert_eq!(h, BTreeMap::from([(1, 1)]));
    }

    #[test]
    fn output_is_valid_and_distinct() {
        for spec in [FamilySpec::index(2), FamilySpec::levels(2)] {
            for n in 1..=8 {
                let r = enumerate_terms(spec, n).unwrap();
                let distinct: HashSet<_> = r.terms.iter().collect();
                assert_eq!(distinct.len(), r.terms.len());
                for t in &r.terms {
                    assert_eq!(t.size(), n);
                    assert!(spec.contains(t));
                }
            }
        }
    }

    #[test]
    fn small_tables_agree() {
        let census = Census::new();
        for spec in [FamilySpec::index(2), FamilySpec::levels(2)] {
            let v = verify_against_oracle(&census, spec, 8).unwrap();
            assert!(v.ok(), "{:?}", v.mismatches);
            assert!(v.checked >= 8);
        }
    }

    #[test]
    fn cap_is_enforced() {
        assert_eq!(
            enumerate_terms(FamilySpec::index(1), 13).unwrap_err(),
            Error::CapExceeded { n: 13, cap: ORACLE_CAP }
        );
    }
}
