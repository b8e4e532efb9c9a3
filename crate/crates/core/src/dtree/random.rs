//! Random t-clipped decision trees, used to exercise the upper bound on
//! trees that are not tribes.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::{DecisionTree, Node, NodeId, TreeBuilder, Var};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomTreeConfig {
    /// Every internal node ends up within `t` steps of a leaf.
    pub t: usize,
    /// Variables are drawn from `x0..x{num_vars-1}`.
    pub num_vars: usize,
    /// Chance that an unconstrained position becomes a leaf early.
    pub stop_probability: f64,
}

/// Draws a t-clipped tree.
///
/// Each internal node carries a budget `k`: some leaf must sit within `k`
/// steps below it. One child (chosen at random) inherits `k - 1`, the other
/// starts over with `t`. A budget of zero, or running out of unused
/// variables on the current path, forces a leaf.
pub fn random_clipped_tree<R: Rng + ?Sized>(rng: &mut R, config: &RandomTreeConfig) -> DecisionTree {
    assert!(config.t >= 1, "clipping parameter must be positive");
    let mut builder = TreeBuilder::new();
    let mut on_path = vec![false; config.num_vars];
    let root = grow(rng, config, &mut builder, &mut on_path, config.t, true);
    builder.finish(root).expect("generator only builds valid trees")
}

fn grow<R: Rng + ?Sized>(
    rng: &mut R,
    config: &RandomTreeConfig,
    builder: &mut TreeBuilder,
    on_path: &mut [bool],
    budget: usize,
    is_root: bool,
) -> NodeId {
    let free: Vec<usize> = (0..on_path.len()).filter(|&i| !on_path[i]).collect();
    let stop = !is_root && rng.random_bool(config.stop_probability);
    if budget == 0 || free.is_empty() || stop {
        return builder.leaf(rng.random());
    }
    let var = *free.choose(rng).expect("non-empty");
    on_path[var] = true;
    let short_side_is_one: bool = rng.random();
    let (zero_budget, one_budget) = if short_side_is_one {
        (config.t, budget - 1)
    } else {
        (budget - 1, config.t)
    };
    let zero = grow(rng, config, builder, on_path, zero_budget, false);
    let one = grow(rng, config, builder, on_path, one_budget, false);
    on_path[var] = false;
    builder.internal(Var(var as u32), zero, one)
}

impl DecisionTree {
    /// Number of leaves reachable from the root.
    pub fn leaf_count(&self) -> usize {
        self.preorder()
            .into_iter()
            .filter(|&id| matches!(self.node(id), Node::Leaf(_)))
            .count()
    }
}
