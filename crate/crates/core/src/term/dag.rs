use super::Term;
use crate::error::{Error, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Leaf,
    Unary,
    Binary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DagNode {
    pub id: usize,
    pub kind: NodeKind,
}

/// The Motzkin skeleton of a closed term plus one binder edge per leaf,
/// pointing from the abstraction that binds it. Node ids follow preorder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LambdaDag {
    pub nodes: Vec<DagNode>,
    pub tree_edges: Vec<(usize, usize)>,
    pub binder_edges: Vec<(usize, usize)>,
}

impl LambdaDag {
    pub fn from_term(t: &Term) -> Result<LambdaDag> {
        to_lambda_dag(t)
    }
}

pub fn to_lambda_dag(t: &Term) -> Result<LambdaDag> {
    let mut dag = LambdaDag { nodes: Vec::new(), tree_edges: Vec::new(), binder_edges: Vec::new() };
    // (node, parent id, number of binders on the path when this node was pushed)
    let mut todo: Vec<(&Term, Option<usize>, usize)> = vec![(t, None, 0)];
    let mut binders: Vec<usize> = Vec::new();
    while let Some((node, parent, depth)) = todo.pop() {
        binders.truncate(depth);
        let id = dag.nodes.len();
        if let Some(p) = parent {
            dag.tree_edges.push((p, id));
        }
        match node {
            Term::Var(i) => {
                let i = *i as usize;
                if i > depth {
                    return Err(Error::NotClosed);
                }
                dag.nodes.push(DagNode { id, kind: NodeKind::Leaf });
                dag.binder_edges.push((binders[depth - i], id));
            }
            Term::Abs(b) => {
                dag.nodes.push(DagNode { id, kind: NodeKind::Unary });
                binders.push(id);
                todo.push((b, Some(id), depth + 1));
            }
            Term::App(l, r) => {
                dag.nodes.push(DagNode { id, kind: NodeKind::Binary });
                todo.push((r, Some(id), depth));
                todo.push((l, Some(id), depth));
            }
        }
    }
    Ok(dag)
}
