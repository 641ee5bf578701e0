//! Brute-force backward reachability.
//!
//! Stairs are grown one frontier at a time by applying [`inverse_step`] to
//! every member of the previous stair. Nothing here uses the closed-form
//! terms, which makes these sets the reference the analytic generator is
//! checked against.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::bvc::Bvc;
use crate::error::{Error, Result};
use crate::nat::Nat;
use crate::numtheory::{in_cycle, inverse_step};

/// Members of one stair in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StairSet {
    pub index: u32,
    pub members: BTreeSet<Nat>,
}

impl StairSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, n: &Nat) -> bool {
        self.members.contains(n)
    }
}

fn expand(frontier: &BTreeSet<Nat>) -> BTreeSet<Nat> {
    frontier
        .iter()
        .flat_map(|x| inverse_step(x).expect("stair members are positive").into_vec())
        .collect()
}

/// Stairs `1..=j_max` with respect to the cycle `{1, 2, 4}`.
///
/// Stair 1 is the backward image of the cycle minus the cycle itself,
/// i.e. `{8}`.
pub fn stairs_icltz(j_max: u32) -> Result<Vec<StairSet>> {
    if j_max == 0 {
        return Err(Error::InvalidStair(0));
    }
    let cycle: BTreeSet<Nat> = [1u64, 2, 4].into_iter().map(Nat::from).collect();
    let mut frontier: BTreeSet<Nat> = expand(&cycle).into_iter().filter(|x| !in_cycle(x)).collect();
    let mut out = Vec::with_capacity(j_max as usize);
    for index in 1..=j_max {
        if index > 1 {
            frontier = expand(&frontier);
        }
        debug_assert!(frontier.iter().all(|x| !in_cycle(x)));
        out.push(StairSet {
            index,
            members: frontier.clone(),
        });
    }
    Ok(out)
}

/// Root of the `k`-th subtree: the `(x-1)/3` preimage of `2^(2k)`.
pub fn subtree_root(k: u32) -> Result<Nat> {
    if k < 2 {
        return Err(Error::InvalidSubtree(k));
    }
    let spine = Nat::pow2(2 * u64::from(k));
    Ok(inverse_step(&spine)?
        .divided
        .expect("2^(2k) - 1 is an odd multiple of three"))
}

/// Stairs `1..=j_max` of the subtree rooted at `Y_k/3`.
pub fn subtree_stairs(k: u32, j_max: u32) -> Result<Vec<StairSet>> {
    if j_max == 0 {
        return Err(Error::InvalidStair(0));
    }
    let mut frontier = BTreeSet::from([subtree_root(k)?]);
    let mut out = Vec::with_capacity(j_max as usize);
    for index in 1..=j_max {
        if index > 1 {
            frontier = expand(&frontier);
        }
        out.push(StairSet {
            index,
            members: frontier.clone(),
        });
    }
    Ok(out)
}

/// The `j`-th stair of the subtree rooted at `Y_k/3`, keeping only one
/// frontier in memory.
pub fn subtree_stairs_bfs(k: u32, j: u32) -> Result<StairSet> {
    if j == 0 {
        return Err(Error::InvalidStair(0));
    }
    let mut frontier = BTreeSet::from([subtree_root(k)?]);
    for _ in 1..j {
        frontier = expand(&frontier);
    }
    Ok(StairSet {
        index: j,
        members: frontier,
    })
}

/// Root of a rendered backward tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeRoot {
    /// Stairs with respect to `{1, 2, 4}`, starting at 8.
    Cycle,
    /// The subtree rooted at `Y_k/3`.
    Subtree(u32),
}

struct TreeNode {
    value: Nat,
    stair: u32,
    // Path code from the stair-2 node; subtree trees only.
    bvc: Option<Bvc>,
}

/// Renders the backward tree to `depth` stairs as a Graphviz digraph.
///
/// Edges point from a value to its preimages. Subtree nodes from stair 3
/// on also carry their verification code.
pub fn tree_dot(root: TreeRoot, depth: u32) -> Result<String> {
    if depth == 0 {
        return Err(Error::InvalidStair(0));
    }
    let (start, name) = match root {
        TreeRoot::Cycle => (Nat::from(8u64), "collatz_icltz".to_string()),
        TreeRoot::Subtree(k) => (subtree_root(k)?, format!("collatz_subtree_k{k}")),
    };
    let with_codes = matches!(root, TreeRoot::Subtree(_));

    let mut nodes = vec![TreeNode {
        value: start,
        stair: 1,
        bvc: with_codes.then(Bvc::empty),
    }];
    let mut edges: Vec<(Nat, Nat)> = Vec::new();
    let mut frontier = vec![0usize];
    for stair in 2..=depth {
        let mut next = Vec::new();
        for &idx in &frontier {
            let pre = inverse_step(&nodes[idx].value)?;
            let parent_value = nodes[idx].value.clone();
            let parent_code = nodes[idx].bvc.clone();
            let children = [(pre.doubled, false)].into_iter().chain(pre.divided.map(|d| (d, true)));
            for (value, bit) in children {
                // The stair-2 node is the anchor of every code.
                let bvc = parent_code.as_ref().map(|c| {
                    let mut c = c.clone();
                    if stair > 2 {
                        c.push(bit);
                    }
                    c
                });
                edges.push((parent_value.clone(), value.clone()));
                next.push(nodes.len());
                nodes.push(TreeNode { value, stair, bvc });
            }
        }
        frontier = next;
    }
    nodes.sort_by(|a, b| (a.stair, &a.value).cmp(&(b.stair, &b.value)));

    let mut out = String::new();
    writeln!(out, "digraph {name} {{").unwrap();
    writeln!(out, "  rankdir=TB;").unwrap();
    writeln!(out, "  node [shape=ellipse];").unwrap();
    for node in &nodes {
        let mut label = format!("{}\\nstair={}", node.value, node.stair);
        if let Some(code) = node.bvc.as_ref().filter(|_| node.stair >= 3) {
            write!(label, "\\nbvc={code}").unwrap();
        }
        writeln!(out, "  n{} [label=\"{label}\"];", node.value).unwrap();
    }
    for (from, to) in &edges {
        writeln!(out, "  n{from} -> n{to};").unwrap();
    }
    out.push_str("}\n");
    Ok(out)
}
