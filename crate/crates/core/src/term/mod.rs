//! Lambda-terms in De Bruijn notation and their shape statistics.
//!
//! A term is a Motzkin tree: variables are leaves, abstractions are unary
//! nodes and applications are binary nodes. The *level* of a node is the
//! number of abstractions strictly above it, so the root sits at level 0.

mod dag;
mod text;

pub use dag::{to_lambda_dag, DagNode, LambdaDag, NodeKind};
pub use text::{parse_debruijn, render_debruijn};

use serde::{Deserialize, Serialize};
use std::fmt;

/// A lambda-term with De Bruijn indices.
///
/// The JSON form is `{"var": n}`, `{"abs": t}` or `{"app": [t, t]}`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Term {
    Var(u32),
    Abs(Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(index: u32) -> Term {
        Term::Var(index)
    }

    pub fn abs(body: Term) -> Term {
        Term::Abs(Box::new(body))
    }

    pub fn app(left: Term, right: Term) -> Term {
        Term::App(Box::new(left), Box::new(right))
    }

    /// Wraps `body` in `count` abstractions.
    pub fn abs_n(count: u32, body: Term) -> Term {
        (0..count).fold(body, |t, _| Term::abs(t))
    }

    pub fn size(&self) -> usize {
        self.nodes().count()
    }

    pub fn stats(&self) -> TermStats {
        term_stats(self)
    }

    pub fn is_closed(&self) -> bool {
        self.nodes().all(|(t, depth)| match t {
            Term::Var(i) => *i as usize <= depth,
            _ => true,
        })
    }

    /// Preorder walk yielding each node with its level.
    pub fn nodes(&self) -> Nodes<'_> {
        Nodes { stack: vec![(self, 0)] }
    }

    fn take_children(&mut self, out: &mut Vec<Term>) {
        match self {
            Term::Var(_) => {}
            Term::Abs(b) => out.push(std::mem::replace(&mut **b, Term::Var(1))),
            Term::App(l, r) => {
                out.push(std::mem::replace(&mut **l, Term::Var(1)));
                out.push(std::mem::replace(&mut **r, Term::Var(1)));
            }
        }
    }
}

// Sampled terms can be thousands of nodes deep; the derived drop would recurse.
impl Drop for Term {
    fn drop(&mut self) {
        if matches!(self, Term::Var(_)) {
            return;
        }
        let mut stack = Vec::new();
        self.take_children(&mut stack);
        while let Some(mut t) = stack.pop() {
            t.take_children(&mut stack);
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_debruijn(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Term({})", render_debruijn(self))
    }
}

pub struct Nodes<'a> {
    stack: Vec<(&'a Term, usize)>,
}

impl<'a> Iterator for Nodes<'a> {
    type Item = (&'a Term, usize);

    fn next(&mut self) -> Option<Self::Item> {
        let (t, depth) = self.stack.pop()?;
        match t {
            Term::Var(_) => {}
            Term::Abs(b) => self.stack.push((b, depth + 1)),
            Term::App(l, r) => {
                self.stack.push((r, depth));
                self.stack.push((l, depth));
            }
        }
        Some((t, depth))
    }
}

/// Node counts and bounds of a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermStats {
    pub size: usize,
    pub leaf_count: usize,
    pub unary_count: usize,
    pub binary_count: usize,
    /// Largest index, 0 only if there were no leaves (which cannot happen).
    pub max_index: u32,
    /// Largest number of abstractions above any node.
    pub level_count: usize,
    pub closed: bool,
}

pub fn term_stats(t: &Term) -> TermStats {
    let mut s = TermStats {
        size: 0,
        leaf_count: 0,
        unary_count: 0,
        binary_count: 0,
        max_index: 0,
        level_count: 0,
        closed: true,
    };
    for (node, depth) in t.nodes() {
        s.size += 1;
        s.level_count = s.level_count.max(depth);
        match node {
            Term::Var(i) => {
                s.leaf_count += 1;
                s.max_index = s.max_index.max(*i);
                if *i as usize > depth {
                    s.closed = false;
                }
            }
            Term::Abs(_) => s.unary_count += 1,
            Term::App(..) => s.binary_count += 1,
        }
    }
    s
}

/// Per-level node counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCounts {
    pub leaves: usize,
    pub unary: usize,
    pub binary: usize,
}

impl LevelCounts {
    pub fn total(&self) -> usize {
        self.leaves + self.unary + self.binary
    }
}

/// Node counts bucketed by level; `levels[d]` describes level `d`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelHistogram {
    pub levels: Vec<LevelCounts>,
}

impl LevelHistogram {
    /// Counts at level `d`, zero beyond the deepest level.
    pub fn at(&self, d: usize) -> LevelCounts {
        self.levels.get(d).copied().unwrap_or_default()
    }

    pub fn leaves(&self) -> usize {
        self.levels.iter().map(|c| c.leaves).sum()
    }

    pub fn unary(&self) -> usize {
        self.levels.iter().map(|c| c.unary).sum()
    }

    pub fn binary(&self) -> usize {
        self.levels.iter().map(|c| c.binary).sum()
    }
}

pub fn level_histogram(t: &Term) -> LevelHistogram {
    let mut levels: Vec<LevelCounts> = Vec::new();
    for (node, depth) in t.nodes() {
        if levels.len() <= depth {
            levels.resize(depth + 1, LevelCounts::default());
        }
        let c = &mut levels[depth];
        match node {
            Term::Var(_) => c.leaves += 1,
            Term::Abs(_) => c.unary += 1,
            Term::App(..) => c.binary += 1,
        }
    }
    LevelHistogram { levels }
}
