//! Complete clipped trees `W_t(r)` and xor tree tribes `Ξ_t(r)`.
//!
//! `W_t(0)` is a single leaf. `W_t(r)` is a chain of `t` variables joined by
//! 0-edges that ends in a leaf; the 1-edge out of every chain variable enters
//! a fresh copy of `W_t(r−1)`. Each chain is a *block*; the root block is at
//! level 1 and a block entered through a 1-edge of a level-`l` block is at
//! level `l + 1`.
//!
//! `Ξ_t(r)` labels every leaf with the parity of the 1-edges on its root path
//! (the empty path has parity 0).
//!
//! Variable ids are 0-based and handed out block by block in breadth-first
//! order: all level-1 variables, then level 2, and so on. Within a level,
//! blocks follow the order of the variables that spawned them, and inside a
//! block ids increase from the block root down the chain.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::dtree::{DecisionTree, Node, NodeId, TreeBuilder, Var};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TribeSpec {
    pub t: usize,
    pub r: usize,
}

impl TribeSpec {
    pub fn new(t: usize, r: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::usage("clip parameter t must be at least 1"));
        }
        Ok(TribeSpec { t, r })
    }

    /// `n(t, r)` as a machine integer, when it fits.
    pub fn num_vars(&self) -> Option<usize> {
        num_vars(self.t, self.r).to_usize()
    }
}

/// `n(t, r) = Σ_{i=1..r} tⁱ`.
pub fn num_vars(t: usize, r: usize) -> BigUint {
    let t = BigUint::from(t);
    let mut power = BigUint::from(1u32);
    let mut total = BigUint::zero();
    for _ in 0..r {
        power *= &t;
        total += &power;
    }
    total
}

/// Where a tribe variable sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarInfo {
    /// Block level, `1..=r`.
    pub level: usize,
    /// Edges from the root.
    pub depth: usize,
    /// 1-based position inside its block chain.
    pub block_pos: usize,
    /// The variable whose edge leads here, and that edge's label.
    pub parent: Option<(Var, bool)>,
}

/// A xor tree tribe with its structural metadata.
#[derive(Debug, Clone)]
pub struct TribeTree {
    pub tree: DecisionTree,
    pub spec: TribeSpec,
    /// `info[i]` describes variable `x_i`.
    pub info: Vec<VarInfo>,
}

/// Largest tribe we are willing to materialize.
pub const MAX_TRIBE_VARS: usize = 1 << 22;

struct Block {
    level: usize,
    first_var: u32,
    /// Child block spawned by the 1-edge of each chain position.
    children: Vec<Option<usize>>,
}

fn layout(spec: TribeSpec) -> Result<(Vec<Block>, Vec<VarInfo>)> {
    let n = spec
        .num_vars()
        .filter(|&n| n <= MAX_TRIBE_VARS)
        .ok_or(Error::Resource {
            what: "tribe variables",
            actual: spec.num_vars().unwrap_or(usize::MAX),
            cap: MAX_TRIBE_VARS,
        })?;
    let mut blocks = Vec::new();
    let mut info = Vec::with_capacity(n);
    if spec.r == 0 {
        return Ok((blocks, info));
    }
    let mut queue = VecDeque::new();
    blocks.push(Block {
        level: 1,
        first_var: 0,
        children: vec![None; spec.t],
    });
    queue.push_back((0usize, None::<(Var, bool)>, 0usize));
    let mut next_var = 0u32;
    while let Some((b, entry_parent, entry_depth)) = queue.pop_front() {
        let level = blocks[b].level;
        blocks[b].first_var = next_var;
        for pos in 0..spec.t {
            let var = Var(next_var);
            next_var += 1;
            info.push(VarInfo {
                level,
                depth: entry_depth + pos,
                block_pos: pos + 1,
                parent: if pos == 0 {
                    entry_parent
                } else {
                    Some((Var(var.0 - 1), false))
                },
            });
            if level < spec.r {
                let child = blocks.len();
                blocks.push(Block {
                    level: level + 1,
                    first_var: 0,
                    children: vec![None; spec.t],
                });
                blocks[b].children[pos] = Some(child);
                queue.push_back((child, Some((var, true)), entry_depth + pos + 1));
            }
        }
    }
    debug_assert_eq!(info.len(), n);
    Ok((blocks, info))
}

fn build(spec: TribeSpec, labels: impl Fn(usize) -> bool) -> Result<(DecisionTree, Vec<VarInfo>)> {
    let (blocks, info) = layout(spec)?;
    let mut builder = TreeBuilder::new();
    if blocks.is_empty() {
        let root = builder.leaf(labels(0));
        return Ok((builder.finish(root).expect("single leaf"), info));
    }
    // Post-order over blocks so that children exist before their parents.
    // `parity` is the number of 1-edges taken before entering the block.
    fn emit(
        blocks: &[Block],
        b: usize,
        parity: usize,
        builder: &mut TreeBuilder,
        labels: &dyn Fn(usize) -> bool,
    ) -> NodeId {
        let block = &blocks[b];
        let mut below = builder.leaf(labels(parity));
        for pos in (0..block.children.len()).rev() {
            let one = match block.children[pos] {
                Some(child) => emit(blocks, child, parity + 1, builder, labels),
                None => builder.leaf(labels(parity + 1)),
            };
            below = builder.internal(Var(block.first_var + pos as u32), below, one);
        }
        below
    }
    let root = emit(&blocks, 0, 0, &mut builder, &labels);
    let tree = builder.finish(root).expect("construction yields a valid tree");
    Ok((tree, info))
}

/// `W_t(r)` with every leaf labelled 0.
pub fn build_complete_clipped(t: usize, r: usize) -> Result<DecisionTree> {
    let spec = TribeSpec::new(t, r)?;
    Ok(build(spec, |_| false)?.0)
}

/// `Ξ_t(r)`.
pub fn build_xor_tribe(t: usize, r: usize) -> Result<TribeTree> {
    let spec = TribeSpec::new(t, r)?;
    let (tree, info) = build(spec, |parity| parity % 2 == 1)?;
    Ok(TribeTree { tree, spec, info })
}

impl TribeTree {
    pub fn num_vars(&self) -> usize {
        self.info.len()
    }

    pub fn var_info(&self, var: Var) -> Result<VarInfo> {
        self.info
            .get(var.index())
            .copied()
            .ok_or_else(|| Error::usage(format!("{var} is not a variable of Ξ_{}({})", self.spec.t, self.spec.r)))
    }

    /// Number of variables at each level `1..=r`.
    pub fn level_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.spec.r];
        for info in &self.info {
            counts[info.level - 1] += 1;
        }
        counts
    }

    /// Variables on the path from the root to `var`, root first, `var` last.
    pub fn ancestors(&self, var: Var) -> Result<Vec<Var>> {
        let mut chain = vec![var];
        let mut info = self.var_info(var)?;
        while let Some((parent, _)) = info.parent {
            chain.push(parent);
            info = self.var_info(parent)?;
        }
        chain.reverse();
        Ok(chain)
    }

    /// True iff all of `vars` lie on one root-to-leaf path.
    pub fn on_one_path(&self, vars: &[Var]) -> Result<bool> {
        let Some(&deepest) = vars.iter().max_by_key(|v| self.info.get(v.index()).map(|i| i.depth)) else {
            return Ok(true);
        };
        let chain = self.ancestors(deepest)?;
        for v in vars {
            self.var_info(*v)?;
            if !chain.contains(v) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A broken tribe invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TribeViolation {
    RepeatedVariable(Var),
    WrongVariableCount {
        expected: usize,
        actual: usize,
    },
    /// All leaves below this variable carry the same value.
    RedundantVertex(Var),
    /// Leaf label differs from the parity of its root path.
    ParityMismatch {
        leaf: NodeId,
    },
    /// This variable is farther than `t + 1` from a leaf with `value`.
    FarFromLeaf {
        var: Var,
        value: bool,
    },
    /// Level map disagrees with the block structure.
    LevelMismatch(Var),
    /// Leaves at `level` do not all carry the value its parity predicts.
    LeafLevelValue {
        level: usize,
    },
}

impl fmt::Display for TribeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TribeViolation::RepeatedVariable(v) => write!(f, "variable {v} appears twice"),
            TribeViolation::WrongVariableCount { expected, actual } => {
                write!(f, "expected {expected} variables, found {actual}")
            }
            TribeViolation::RedundantVertex(v) => write!(f, "every leaf below {v} has the same value"),
            TribeViolation::ParityMismatch { leaf } => {
                write!(f, "leaf node {} is not the parity of its path", leaf.0)
            }
            TribeViolation::FarFromLeaf { var, value } => {
                write!(f, "{var} is more than t+1 steps from a {}-leaf", u8::from(*value))
            }
            TribeViolation::LevelMismatch(v) => write!(f, "level recorded for {v} is wrong"),
            TribeViolation::LeafLevelValue { level } => {
                write!(f, "leaves at level {level} do not share the predicted value")
            }
        }
    }
}

impl std::error::Error for TribeViolation {}

/// Checks every structural tribe property on `tribe`.
pub fn verify_tribe(tribe: &TribeTree) -> Result<(), TribeViolation> {
    let tree = &tribe.tree;
    let t = tribe.spec.t;
    let mut seen = std::collections::HashSet::new();
    for id in tree.preorder() {
        if let Node::Internal { var, .. } = tree.node(id) {
            if !seen.insert(var) {
                return Err(TribeViolation::RepeatedVariable(var));
            }
        }
    }
    let expected = tribe.spec.num_vars().unwrap_or(usize::MAX);
    if seen.len() != expected || tribe.info.len() != expected {
        return Err(TribeViolation::WrongVariableCount {
            expected,
            actual: seen.len(),
        });
    }

    // Per node: distance to the nearest 0-leaf and 1-leaf below it.
    let mut nearest = vec![[usize::MAX; 2]; tree.nodes().len()];
    for &id in tree.preorder().iter().rev() {
        nearest[id.0 as usize] = match tree.node(id) {
            Node::Leaf(b) => {
                let mut d = [usize::MAX; 2];
                d[usize::from(b)] = 0;
                d
            }
            Node::Internal { var, zero, one } => {
                let (z, o) = (nearest[zero.0 as usize], nearest[one.0 as usize]);
                let d = [z[0].min(o[0]).saturating_add(1), z[1].min(o[1]).saturating_add(1)];
                for value in [false, true] {
                    if d[usize::from(value)] == usize::MAX {
                        return Err(TribeViolation::RedundantVertex(var));
                    }
                    if d[usize::from(value)] > t + 1 {
                        return Err(TribeViolation::FarFromLeaf { var, value });
                    }
                }
                d
            }
        };
    }

    // Walk from the root tracking parity and level.
    let mut leaf_value_at_level: Vec<Option<bool>> = vec![None; tribe.spec.r + 2];
    let mut stack = vec![(tree.root(), 0usize, 1usize)];
    while let Some((id, parity, level)) = stack.pop() {
        match tree.node(id) {
            Node::Leaf(b) => {
                if b != (parity % 2 == 1) {
                    return Err(TribeViolation::ParityMismatch { leaf: id });
                }
                if tribe.spec.r > 0 {
                    let predicted = level % 2 == 0;
                    let slot = &mut leaf_value_at_level[level.min(tribe.spec.r + 1)];
                    if b != predicted || slot.is_some_and(|v| v != b) {
                        return Err(TribeViolation::LeafLevelValue { level });
                    }
                    *slot = Some(b);
                }
            }
            Node::Internal { var, zero, one } => {
                let info = tribe.info.get(var.index()).ok_or(TribeViolation::LevelMismatch(var))?;
                if info.level != level {
                    return Err(TribeViolation::LevelMismatch(var));
                }
                stack.push((zero, parity, level));
                stack.push((one, parity + 1, level + 1));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::TruthTable;
    use crate::Rational;
    use num_traits::One;

    #[test]
    fn num_vars_examples() {
        assert_eq!(num_vars(2, 3), BigUint::from(14u32));
        assert_eq!(num_vars(1, 9), BigUint::from(9u32));
        assert_eq!(num_vars(5, 0), BigUint::zero());
        assert_eq!(num_vars(3, 12), BigUint::from(797160u32));
    }

    #[test]
    fn complete_clipped_shapes() {
        assert_eq!(build_complete_clipped(3, 0).unwrap().to_string(), "L0");
        let w = build_complete_clipped(1, 3).unwrap();
        assert_eq!(w.to_string(), "(x0 L0 (x1 L0 (x2 L0 L0)))");
        let tribe = build_xor_tribe(2, 3).unwrap();
        assert_eq!(tribe.level_counts(), vec![2, 4, 8]);
        assert_eq!(tribe.tree.var_count(), 14);
    }

    #[test]
    fn clipping_is_min_of_t_and_r() {
        for t in 1..=4 {
            for r in 1..=4 {
                let report = build_xor_tribe(t, r).unwrap().tree.clip_report();
                assert_eq!(report.t_clip, t.min(r), "t={t} r={r}");
            }
        }
    }

    #[test]
    fn small_tribes_compute_the_expected_functions() {
        for t in 1..=5 {
            let or = build_xor_tribe(t, 1).unwrap().tree.to_truth_table_natural().unwrap();
            assert_eq!(or, TruthTable::or(t).unwrap());
            assert_eq!(or.dt_depth().unwrap(), t);
        }
        let xi = build_xor_tribe(1, 2).unwrap().tree;
        assert_eq!(xi.to_string(), "(x0 L0 (x1 L1 L0))");
    }

    #[test]
    fn variable_ids_are_breadth_first() {
        let tribe = build_xor_tribe(2, 2).unwrap();
        assert_eq!(
            tribe.tree.to_string(),
            "(x0 (x1 L0 (x4 (x5 L1 L0) L0)) (x2 (x3 L1 L0) L0))"
        );
        assert_eq!(tribe.info[3].parent, Some((Var(2), false)));
        assert_eq!(tribe.info[2].parent, Some((Var(0), true)));
        assert_eq!(tribe.info[5].depth, 3);
        assert_eq!(tribe.ancestors(Var(5)).unwrap(), vec![Var(0), Var(1), Var(4), Var(5)]);
        assert!(tribe.on_one_path(&[Var(0), Var(3)]).unwrap());
        assert!(!tribe.on_one_path(&[Var(3), Var(5)]).unwrap());
    }

    #[test]
    fn built_tribes_verify() {
        for t in 1..=4 {
            for r in 0..=4 {
                let tribe = build_xor_tribe(t, r).unwrap();
                assert_eq!(verify_tribe(&tribe), Ok(()), "t={t} r={r}");
            }
        }
    }

    #[test]
    fn verify_rejects_broken_tribes() {
        // x1 appears on both branches of the root.
        let mut tribe = build_xor_tribe(1, 2).unwrap();
        let repeated = DecisionTree::new(
            vec![
                Node::Leaf(false),
                Node::Leaf(true),
                Node::Leaf(false),
                Node::Internal {
                    var: Var(1),
                    zero: NodeId(1),
                    one: NodeId(2),
                },
                Node::Leaf(false),
                Node::Internal {
                    var: Var(1),
                    zero: NodeId(4),
                    one: NodeId(0),
                },
                Node::Internal {
                    var: Var(0),
                    zero: NodeId(5),
                    one: NodeId(3),
                },
            ],
            NodeId(6),
        )
        .unwrap();
        tribe.tree = repeated;
        assert!(matches!(verify_tribe(&tribe), Err(TribeViolation::RepeatedVariable(_))));

        let mut redundant = build_xor_tribe(1, 2).unwrap();
        redundant.tree = "(x0 L0 (x1 L0 L0))".parse().unwrap();
        assert!(matches!(
            verify_tribe(&redundant),
            Err(TribeViolation::RedundantVertex(Var(1)))
        ));
    }

    #[test]
    fn influence_decays_with_depth() {
        let tribe = build_xor_tribe(2, 3).unwrap();
        let table = tribe.tree.to_truth_table_natural().unwrap();
        for (i, info) in tribe.info.iter().enumerate() {
            let bound = Rational::one() / Rational::from_integer((1i64 << info.depth).into());
            assert!(table.influence(i).unwrap() <= bound, "x{i}");
        }
    }
}
