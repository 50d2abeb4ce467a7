//! Exact counting of both families, with moments of a marked statistic.
//!
//! Class `i` of a family collects the terms that sit below `i` abstractions
//! of some context. Its counting sequence satisfies
//!
//! ```text
//! A_i[n] = i·[n = 1] + A_c[n-1] + Σ_{a+b=n-1} A_i[a]·A_i[b]
//! ```
//!
//! where `c` is the unary child class: `min(i+1, k)` for bounded indices
//! (class `k` loops onto itself) and `i+1` for bounded levels (class `k` has
//! no unary production). The closed terms are class 0.
//!
//! For a marked statistic `m`, rows `B` and `C` hold `Σ m(t)` and `Σ m(t)²`
//! over the same terms and follow from the product rule.

mod cache;
mod census;
mod distribution;
mod relaxed;

pub use cache::{read_table, write_table, CACHE_ENV};
pub use census::{count_closed, distribution, exact_moments, Census, ExactMoments, DEFAULT_DISTRIBUTION_CAP};

use crate::error::Result;
use crate::family::{build_order, class_rules, FamilySpec, MarkSpec};
use rug::{Integer, Rational};
use std::sync::Arc;

/// Counting rows `A_i[0..=max_size]` for every class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub spec: FamilySpec,
    pub max_size: usize,
    rows: Vec<Vec<Integer>>,
}

impl CountTable {
    pub fn build(spec: FamilySpec, max_size: usize) -> CountTable {
        let rules = class_rules(spec, MarkSpec::None);
        let mut rows: Vec<Vec<Integer>> = vec![Vec::new(); spec.classes()];
        for i in build_order(spec) {
            let rule = rules[i];
            let row = {
                let child_row = rule.child.filter(|&c| c != i).map(|c| &rows[c]);
                relaxed::online_square(max_size + 1, |n, conv, prev| {
                    let mut v = conv;
                    if n == 1 {
                        v += rule.colors;
                    }
                    if n >= 2 && rule.child.is_some() {
                        v += child_row.map_or(&prev[n - 1], |r| &r[n - 1]);
                    }
                    v
                })
            };
            rows[i] = row;
        }
        CountTable { spec, max_size, rows }
    }

    pub(crate) fn from_rows(spec: FamilySpec, rows: Vec<Vec<Integer>>) -> CountTable {
        let max_size = rows[0].len() - 1;
        CountTable { spec, max_size, rows }
    }

    /// `A_i[n]`.
    pub fn count(&self, class: usize, n: usize) -> &Integer {
        &self.rows[class][n]
    }

    pub fn row(&self, class: usize) -> &[Integer] {
        &self.rows[class]
    }

    /// Number of closed terms of size `n`.
    pub fn closed(&self, n: usize) -> &Integer {
        &self.rows[0][n]
    }

    /// `Σ_{a+b=n-1} A_i[a]·A_i[b]`, recovered from the recurrence.
    pub(crate) fn binary_part(&self, class: usize, n: usize) -> Integer {
        let rules = class_rules(self.spec, MarkSpec::None);
        let rule = rules[class];
        let mut v = self.rows[class][n].clone();
        if n == 1 {
            v -= rule.colors;
        }
        if n >= 2 {
            if let Some(c) = rule.child {
                v -= &self.rows[c][n - 1];
            }
        }
        v
    }

    /// The same table cut down to `max_size`.
    pub fn truncated(&self, max_size: usize) -> CountTable {
        let rows = self.rows.iter().map(|r| r[..=max_size].to_vec()).collect();
        CountTable { spec: self.spec, max_size, rows }
    }
}

/// How many moment rows to propagate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MomentOrder {
    /// Counts and `Σ m(t)`: enough for means.
    First,
    /// Counts, `Σ m(t)` and `Σ m(t)²`.
    Second,
}

/// Counting rows plus moment rows of one marked statistic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentTable {
    pub mark: MarkSpec,
    counts: Arc<CountTable>,
    first: Vec<Vec<Integer>>,
    second: Option<Vec<Vec<Integer>>>,
}

impl MomentTable {
    /// Builds counts and both moment rows up to `max_size`.
    pub fn build(spec: FamilySpec, mark: MarkSpec, max_size: usize) -> Result<MomentTable> {
        mark.validate(spec)?;
        let counts = Arc::new(CountTable::build(spec, max_size));
        MomentTable::from_counts(counts, mark, MomentOrder::Second)
    }

    /// Builds moment rows on top of existing counts.
    pub fn from_counts(counts: Arc<CountTable>, mark: MarkSpec, order: MomentOrder) -> Result<MomentTable> {
        mark.validate(counts.spec)?;
        if mark == MarkSpec::None {
            return Ok(MomentTable { mark, counts, first: Vec::new(), second: None });
        }
        let first = first_rows(&counts, mark);
        let second = (order == MomentOrder::Second).then(|| second_rows(&counts, mark, &first));
        Ok(MomentTable { mark, counts, first, second })
    }

    pub(crate) fn from_parts(
        counts: Arc<CountTable>,
        mark: MarkSpec,
        first: Vec<Vec<Integer>>,
        second: Option<Vec<Vec<Integer>>>,
    ) -> MomentTable {
        MomentTable { mark, counts, first, second }
    }

    pub fn spec(&self) -> FamilySpec {
        self.counts.spec
    }

    pub fn max_size(&self) -> usize {
        self.counts.max_size
    }

    pub fn counts(&self) -> &Arc<CountTable> {
        &self.counts
    }

    pub fn order(&self) -> MomentOrder {
        if self.second.is_some() || self.mark == MarkSpec::None {
            MomentOrder::Second
        } else {
            MomentOrder::First
        }
    }

    /// `A_i[n]`.
    pub fn count(&self, class: usize, n: usize) -> &Integer {
        self.counts.count(class, n)
    }

    /// `B_i[n]`, zero when nothing is marked.
    pub fn first(&self, class: usize, n: usize) -> Integer {
        self.first.get(class).map_or_else(Integer::new, |r| r[n].clone())
    }

    /// `C_i[n]`, `None` if only first moments were built.
    pub fn second(&self, class: usize, n: usize) -> Option<Integer> {
        if self.mark == MarkSpec::None {
            return Some(Integer::new());
        }
        self.second.as_ref().map(|rows| rows[class][n].clone())
    }

    pub(crate) fn first_rows(&self) -> &[Vec<Integer>] {
        &self.first
    }

    pub(crate) fn second_rows(&self) -> Option<&[Vec<Integer>]> {
        self.second.as_deref()
    }

    /// Exact mean of the statistic over closed terms of size `n`.
    pub fn mean(&self, n: usize) -> Option<Rational> {
        let a = self.counts.closed(n);
        (*a != 0).then(|| Rational::from((self.first(0, n), a.clone())))
    }
}

fn first_rows(counts: &CountTable, mark: MarkSpec) -> Vec<Vec<Integer>> {
    let spec = counts.spec;
    let rules = class_rules(spec, mark);
    let len = counts.max_size + 1;
    let mut rows: Vec<Vec<Integer>> = vec![Vec::new(); spec.classes()];
    for i in build_order(spec) {
        let rule = rules[i];
        let a = counts.row(i);
        let row = {
            let child_b = rule.child.filter(|&c| c != i).map(|c| &rows[c]);
            relaxed::online_product(a, len, |n, conv, prev| {
                let mut v = conv << 1u32;
                if n == 1 && rule.leaf {
                    v += rule.colors;
                }
                if n >= 2 {
                    if let Some(c) = rule.child {
                        v += child_b.map_or(&prev[n - 1], |r| &r[n - 1]);
                        if rule.unary {
                            v += counts.count(c, n - 1);
                        }
                    }
                }
                if rule.binary && n >= 1 {
                    v += counts.binary_part(i, n);
                }
                v
            })
        };
        rows[i] = row;
    }
    rows
}

fn second_rows(counts: &CountTable, mark: MarkSpec, first: &[Vec<Integer>]) -> Vec<Vec<Integer>> {
    let spec = counts.spec;
    let rules = class_rules(spec, mark);
    let len = counts.max_size + 1;
    let mut rows: Vec<Vec<Integer>> = vec![Vec::new(); spec.classes()];
    for i in build_order(spec) {
        let rule = rules[i];
        let a = counts.row(i);
        let b = &first[i];
        let bb = relaxed::square(b);
        // Σ (B_a A_b + A_a B_b) over a + b = n - 1, read off the B recurrence
        let sym_ba = |n: usize| -> Integer {
            let mut v = b[n].clone();
            if n == 1 && rule.leaf {
                v -= rule.colors;
            }
            if n >= 2 {
                if let Some(c) = rule.child {
                    v -= &first[c][n - 1];
                    if rule.unary {
                        v -= counts.count(c, n - 1);
                    }
                }
            }
            if rule.binary {
                v -= counts.binary_part(i, n);
            }
            v
        };
        let row = {
            let child_c = rule.child.filter(|&c| c != i).map(|c| &rows[c]);
            relaxed::online_product(a, len, |n, conv, prev| {
                let mut v = conv << 1u32;
                if n >= 1 {
                    v += Integer::from(&bb[n - 1] << 1u32);
                }
                if n == 1 && rule.leaf {
                    v += rule.colors;
                }
                if n >= 2 {
                    if let Some(c) = rule.child {
                        v += child_c.map_or(&prev[n - 1], |r| &r[n - 1]);
                        if rule.unary {
                            v += Integer::from(&first[c][n - 1] << 1u32);
                            v += counts.count(c, n - 1);
                        }
                    }
                }
                if rule.binary && n >= 1 {
                    v += sym_ba(n) << 1u32;
                    v += counts.binary_part(i, n);
                }
                v
            })
        };
        rows[i] = row;
    }
    rows
}
