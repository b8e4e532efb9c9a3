//! Decision trees over `{0,1}` variables.
//!
//! Trees live in an index pool: [`NodeId`]s point into a vector of [`Node`]s.
//! Construction goes through [`DecisionTree::new`], which rejects anything
//! that is not a proper decision tree (dangling children, shared nodes,
//! a variable queried twice on one root-to-leaf path), so every
//! `DecisionTree` value is valid.
//!
//! Every t-DNF can be written as a t-clipped decision tree; that compiler is
//! not provided here.

mod random;
mod text;

use std::collections::BTreeSet;
use std::fmt;

use crate::boolfn::TruthTable;
use crate::restrict::{Cell, Restriction};
use crate::{Error, Result};

pub use random::{random_clipped_tree, RandomTreeConfig};

/// A variable identifier; printed as `x<i>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// Index of a node in a tree's pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    /// Queries `var`; the `zero` child is taken when it is 0.
    Internal {
        var: Var,
        zero: NodeId,
        one: NodeId,
    },
    Leaf(bool),
}

/// Why a node pool is not a decision tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    /// A node refers to a child outside the pool.
    DanglingChild {
        node: NodeId,
        child: NodeId,
    },
    /// A node is reachable along two different routes (shared or cyclic).
    SharedNode {
        node: NodeId,
        path: Vec<(Var, bool)>,
    },
    /// `var` is queried twice along `path`.
    RepeatedVariable {
        var: Var,
        path: Vec<(Var, bool)>,
    },
    EmptyPool,
}

fn fmt_path(path: &[(Var, bool)]) -> String {
    if path.is_empty() {
        return "root".to_string();
    }
    path.iter()
        .map(|(v, b)| format!("{v}={}", u8::from(*b)))
        .collect::<Vec<_>>()
        .join(" -> ")
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::DanglingChild { node, child } => {
                write!(f, "node {} points to missing node {}", node.0, child.0)
            }
            TreeViolation::SharedNode { node, path } => {
                write!(f, "node {} reached twice, second time via {}", node.0, fmt_path(path))
            }
            TreeViolation::RepeatedVariable { var, path } => {
                write!(f, "variable {var} repeated on path {}", fmt_path(path))
            }
            TreeViolation::EmptyPool => write!(f, "empty node pool"),
        }
    }
}

impl std::error::Error for TreeViolation {}

impl From<TreeViolation> for Error {
    fn from(v: TreeViolation) -> Self {
        Error::Usage(format!("invalid decision tree: {v}"))
    }
}

/// Clipping statistics of a tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClipReport {
    /// Smallest `t` such that the tree is t-clipped: the largest, over
    /// internal nodes, of the distance to the nearest leaf (0 for a leaf).
    pub t_clip: usize,
    /// Distance from the root to its nearest leaf.
    pub t0_clip: usize,
}

impl ClipReport {
    pub fn is_clipped(&self, t: usize) -> bool {
        self.t_clip <= t
    }

    /// `(t0, t)`-clipped: root within `t0` of a leaf, everything within `t`.
    pub fn is_clipped_with_root(&self, t0: usize, t: usize) -> bool {
        self.t0_clip <= t0 && self.t_clip <= t
    }
}

/// A validated decision tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTree {
    nodes: Vec<Node>,
    root: NodeId,
    read_once: bool,
}

impl DecisionTree {
    /// Builds a tree from a node pool, rejecting anything invalid.
    ///
    /// Nodes not reachable from `root` are allowed and ignored.
    pub fn new(nodes: Vec<Node>, root: NodeId) -> Result<Self, TreeViolation> {
        validate_pool(&nodes, root)?;
        let mut tree = DecisionTree {
            nodes,
            root,
            read_once: false,
        };
        tree.read_once = tree.internal_vars().len() == tree.internal_count();
        Ok(tree)
    }

    pub fn leaf(value: bool) -> Self {
        DecisionTree {
            nodes: vec![Node::Leaf(value)],
            root: NodeId(0),
            read_once: true,
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id.index()]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// True when no variable labels two internal nodes.
    pub fn is_read_once(&self) -> bool {
        self.read_once
    }

    /// Node ids reachable from the root, parents before children.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            out.push(id);
            if let Node::Internal { zero, one, .. } = self.node(id) {
                stack.push(one);
                stack.push(zero);
            }
        }
        out
    }

    fn internal_count(&self) -> usize {
        self.preorder()
            .into_iter()
            .filter(|&id| matches!(self.node(id), Node::Internal { .. }))
            .count()
    }

    fn internal_vars(&self) -> BTreeSet<Var> {
        self.preorder()
            .into_iter()
            .filter_map(|id| match self.node(id) {
                Node::Internal { var, .. } => Some(var),
                Node::Leaf(_) => None,
            })
            .collect()
    }

    /// Distinct variables appearing in the tree, sorted.
    pub fn variables(&self) -> Vec<Var> {
        self.internal_vars().into_iter().collect()
    }

    /// Number of distinct variables.
    pub fn var_count(&self) -> usize {
        self.internal_vars().len()
    }

    /// One past the largest variable id (0 for a leaf). A restriction for this
    /// tree must have at least this many cells.
    pub fn var_universe(&self) -> usize {
        self.internal_vars().last().map_or(0, |v| v.index() + 1)
    }

    /// Longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go(tree: &DecisionTree, id: NodeId) -> usize {
            match tree.node(id) {
                Node::Leaf(_) => 0,
                Node::Internal { zero, one, .. } => 1 + go(tree, zero).max(go(tree, one)),
            }
        }
        go(self, self.root)
    }

    /// Re-checks the structural rules. Always `Ok` for values built through
    /// [`DecisionTree::new`]; kept for symmetry with the text front end.
    pub fn validate(&self) -> Result<(), TreeViolation> {
        validate_pool(&self.nodes, self.root)
    }

    /// Distance from every reachable node to its nearest leaf, indexed by
    /// node id (`usize::MAX` for unreachable nodes).
    pub fn leaf_distances(&self) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.nodes.len()];
        for &id in self.preorder().iter().rev() {
            dist[id.index()] = match self.node(id) {
                Node::Leaf(_) => 0,
                Node::Internal { zero, one, .. } => 1 + dist[zero.index()].min(dist[one.index()]),
            };
        }
        dist
    }

    pub fn clip_report(&self) -> ClipReport {
        let dist = self.leaf_distances();
        let t_clip = self
            .preorder()
            .into_iter()
            .filter(|&id| matches!(self.node(id), Node::Internal { .. }))
            .map(|id| dist[id.index()])
            .max()
            .unwrap_or(0);
        ClipReport {
            t_clip,
            t0_clip: dist[self.root.index()],
        }
    }

    /// Evaluates the tree; bit `i` of `x` is the value of variable `i`.
    pub fn eval_index(&self, x: usize) -> bool {
        let mut id = self.root;
        loop {
            match self.node(id) {
                Node::Leaf(b) => return b,
                Node::Internal { var, zero, one } => {
                    id = if (x >> var.index()) & 1 == 1 { one } else { zero };
                }
            }
        }
    }

    /// Truth table over `order`: table variable `j` is tree variable
    /// `order[j]`. Every tree variable must be listed; extra entries act as
    /// padding variables the function ignores.
    pub fn to_truth_table(&self, order: &[Var]) -> Result<TruthTable> {
        let mut position = std::collections::HashMap::new();
        for (j, v) in order.iter().enumerate() {
            if position.insert(*v, j).is_some() {
                return Err(Error::usage(format!("variable {v} listed twice in ordering")));
            }
        }
        for v in self.internal_vars() {
            if !position.contains_key(&v) {
                return Err(Error::usage(format!("ordering is missing tree variable {v}")));
            }
        }
        if order.len() > TruthTable::MAX_VARS {
            return Err(Error::Resource {
                what: "truth table variables",
                actual: order.len(),
                cap: TruthTable::MAX_VARS,
            });
        }
        TruthTable::from_fn(order.len(), |y| {
            let mut id = self.root;
            loop {
                match self.node(id) {
                    Node::Leaf(b) => return b,
                    Node::Internal { var, zero, one } => {
                        id = if (y >> position[&var]) & 1 == 1 { one } else { zero };
                    }
                }
            }
        })
    }

    /// Truth table over variables `0..var_universe()`.
    pub fn to_truth_table_natural(&self) -> Result<TruthTable> {
        let order: Vec<Var> = (0..self.var_universe() as u32).map(Var).collect();
        self.to_truth_table(&order)
    }

    fn check_covers(&self, rho: &Restriction) -> Result<()> {
        if rho.len() < self.var_universe() {
            return Err(Error::usage(format!(
                "restriction has {} cells but the tree uses variable x{}",
                rho.len(),
                self.var_universe() - 1
            )));
        }
        Ok(())
    }

    /// `T|_ρ`: nodes on fixed variables are replaced by the chosen child.
    /// Isomorphic subtrees are not merged.
    pub fn apply_restriction(&self, rho: &Restriction) -> Result<DecisionTree> {
        self.check_covers(rho)?;
        let mut nodes = Vec::new();
        let root = self.copy_restricted(self.root, rho, &mut nodes);
        Ok(DecisionTree {
            nodes,
            root,
            read_once: self.read_once,
        })
    }

    fn copy_restricted(&self, id: NodeId, rho: &Restriction, out: &mut Vec<Node>) -> NodeId {
        let mut id = id;
        loop {
            match self.node(id) {
                Node::Leaf(b) => {
                    out.push(Node::Leaf(b));
                    return NodeId(out.len() as u32 - 1);
                }
                Node::Internal { var, zero, one } => match rho.cell(var.index()) {
                    Cell::Zero => id = zero,
                    Cell::One => id = one,
                    Cell::Star => {
                        let z = self.copy_restricted(zero, rho, out);
                        let o = self.copy_restricted(one, rho, out);
                        out.push(Node::Internal { var, zero: z, one: o });
                        return NodeId(out.len() as u32 - 1);
                    }
                },
            }
        }
    }

    /// Which leaf values (`[has 0, has 1]`) are reachable from the root.
    pub fn reachable_leaf_values(&self) -> [bool; 2] {
        let mut seen = [false; 2];
        for id in self.preorder() {
            if let Node::Leaf(b) = self.node(id) {
                seen[usize::from(b)] = true;
            }
        }
        seen
    }

    /// Leaf values reachable in `T|_ρ`, without building the restricted tree.
    pub fn reachable_leaf_values_under(&self, rho: &Restriction) -> Result<[bool; 2]> {
        self.check_covers(rho)?;
        let mut seen = [false; 2];
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            match self.node(id) {
                Node::Leaf(b) => {
                    seen[usize::from(b)] = true;
                    if seen[0] && seen[1] {
                        break;
                    }
                }
                Node::Internal { var, zero, one } => match rho.cell(var.index()) {
                    Cell::Zero => stack.push(zero),
                    Cell::One => stack.push(one),
                    Cell::Star => {
                        stack.push(one);
                        stack.push(zero);
                    }
                },
            }
        }
        Ok(seen)
    }

    /// True iff some reachable leaf is 0 and some reachable leaf is 1. For
    /// read-once trees this is exactly non-constancy.
    pub fn has_split_path(&self) -> bool {
        let [zero, one] = self.reachable_leaf_values();
        zero && one
    }

    /// Constancy of the computed function. Read-once trees use leaf
    /// reachability; other trees go through the truth table, since with a
    /// repeated variable the reachable leaves can disagree on a constant
    /// function.
    pub fn constancy(&self) -> Result<crate::Constancy> {
        use crate::Constancy;
        let [zero, one] = self.reachable_leaf_values();
        match (zero, one) {
            (true, false) => Ok(Constancy::Const0),
            (false, true) => Ok(Constancy::Const1),
            _ if self.read_once => Ok(Constancy::NonConstant),
            _ => {
                let order = self.variables();
                Ok(self.to_truth_table(&order)?.constancy())
            }
        }
    }

    /// Exact `DT_depth(f|_ρ)`.
    ///
    /// The restricted tree is simplified, its (starred) variables collected,
    /// and the exact depth search runs on the truth table over just those.
    /// More than `live_cap` such variables is a [`Error::Resource`].
    pub fn restricted_dt_depth(&self, rho: &Restriction, live_cap: usize) -> Result<usize> {
        let [zero, one] = self.reachable_leaf_values_under(rho)?;
        if !(zero && one) {
            return Ok(0);
        }
        let restricted = self.apply_restriction(rho)?;
        let vars = restricted.variables();
        if vars.len() > live_cap {
            return Err(Error::Resource {
                what: "live variables",
                actual: vars.len(),
                cap: live_cap,
            });
        }
        if self.read_once && vars.len() == 1 {
            return Ok(1);
        }
        restricted.to_truth_table(&vars)?.dt_depth_with_cap(live_cap)
    }

    /// Relabels variables with `map` (old id -> new id). The map must be
    /// injective on the tree's variables.
    pub fn relabel(&self, map: impl Fn(Var) -> Var) -> Result<DecisionTree> {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match *n {
                Node::Internal { var, zero, one } => Node::Internal {
                    var: map(var),
                    zero,
                    one,
                },
                leaf => leaf,
            })
            .collect();
        Ok(DecisionTree::new(nodes, self.root)?)
    }
}

fn validate_pool(nodes: &[Node], root: NodeId) -> Result<(), TreeViolation> {
    if nodes.is_empty() {
        return Err(TreeViolation::EmptyPool);
    }
    if root.index() >= nodes.len() {
        return Err(TreeViolation::DanglingChild {
            node: root,
            child: root,
        });
    }
    let mut visited = vec![false; nodes.len()];
    let mut path: Vec<(Var, bool)> = Vec::new();
    // Explicit DFS so that very deep (path-like) trees do not overflow.
    enum Step {
        Enter(NodeId, Option<(Var, bool)>),
        Leave,
    }
    let mut stack = vec![Step::Enter(root, None)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Leave => {
                path.pop();
            }
            Step::Enter(id, edge) => {
                if let Some(e) = edge {
                    path.push(e);
                }
                if std::mem::replace(&mut visited[id.index()], true) {
                    return Err(TreeViolation::SharedNode {
                        node: id,
                        path: path.clone(),
                    });
                }
                stack.push(Step::Leave);
                if let Node::Internal { var, zero, one } = nodes[id.index()] {
                    if path.iter().any(|(v, _)| *v == var) {
                        return Err(TreeViolation::RepeatedVariable {
                            var,
                            path: path.clone(),
                        });
                    }
                    for child in [zero, one] {
                        if child.index() >= nodes.len() {
                            return Err(TreeViolation::DanglingChild { node: id, child });
                        }
                    }
                    stack.push(Step::Enter(one, Some((var, true))));
                    stack.push(Step::Enter(zero, Some((var, false))));
                }
            }
        }
    }
    Ok(())
}

/// Incremental construction of a node pool.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, value: bool) -> NodeId {
        self.nodes.push(Node::Leaf(value));
        NodeId(self.nodes.len() as u32 - 1)
    }

    pub fn internal(&mut self, var: Var, zero: NodeId, one: NodeId) -> NodeId {
        self.nodes.push(Node::Internal { var, zero, one });
        NodeId(self.nodes.len() as u32 - 1)
    }

    /// Reserves a slot to be filled later with [`TreeBuilder::set`].
    pub fn placeholder(&mut self) -> NodeId {
        self.leaf(false)
    }

    pub fn set(&mut self, id: NodeId, node: Node) {
        self.nodes[id.index()] = node;
    }

    pub fn finish(self, root: NodeId) -> Result<DecisionTree, TreeViolation> {
        DecisionTree::new(self.nodes, root)
    }
}
