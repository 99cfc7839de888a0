//! Branch masses and moments of a tree, seen from every vertex.

use crate::error::{Error, Result};
use crate::graph::TreeGraph;
use crate::scalar::Scalar;

/// The component of `T - v` containing neighbor `via`.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<S> {
    pub via: usize,
    pub mass: S,
    /// `sum_{u in b} pi_u d(v, u)`.
    pub moment: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchMoments<S> {
    /// `branches[v]` lists the branches at `v`, ordered by `via`.
    pub branches: Vec<Vec<Branch<S>>>,
    /// `sum_u pi_u d(v, u)` per vertex.
    pub first: Vec<S>,
    /// `sum_u pi_u d(v, u)^2` per vertex.
    pub second: Vec<S>,
}

/// Subtree sums with respect to the tree's root.
pub(crate) struct Subtree<S> {
    pub mass: Vec<S>,
    /// Moment of the subtree about its own top vertex.
    pub moment: Vec<S>,
    pub second: Vec<S>,
}

pub(crate) fn subtree_sums<S: Scalar>(t: &TreeGraph, pi: &[S]) -> Subtree<S> {
    let n = t.n();
    let mut mass = pi.to_vec();
    let mut moment = vec![S::zero(); n];
    let mut second = vec![S::zero(); n];
    for &v in t.preorder().iter().rev() {
        for &c in t.children(v) {
            // Shifting by one edge: d -> d + 1.
            let m1 = moment[c].clone() + mass[c].clone();
            let two = S::from_usize(2);
            second[v] = second[v].clone() + second[c].clone() + two * moment[c].clone() + mass[c].clone();
            moment[v] = moment[v].clone() + m1;
            mass[v] = mass[v].clone() + mass[c].clone();
        }
    }
    Subtree { mass, moment, second }
}

/// Two depth-first passes: subtree sums bottom-up, then whole-tree sums
/// top-down by rerooting across each edge.
pub fn branch_moments<S: Scalar>(t: &TreeGraph) -> Result<BranchMoments<S>> {
    let pi = S::masses(t).ok_or(Error::RequiresExactMasses)?;
    Ok(branch_moments_with(t, &pi))
}

pub(crate) fn branch_moments_with<S: Scalar>(t: &TreeGraph, pi: &[S]) -> BranchMoments<S> {
    let n = t.n();
    let sub = subtree_sums(t, pi);
    let root = t.root();
    let total = sub.mass[root].clone();
    let two = S::from_usize(2);

    let mut first = vec![S::zero(); n];
    let mut second = vec![S::zero(); n];
    first[root] = sub.moment[root].clone();
    second[root] = sub.second[root].clone();
    for &v in t.preorder() {
        for &c in t.children(v) {
            let inside = sub.moment[c].clone() + sub.mass[c].clone();
            let outside = first[v].clone() - inside.clone();
            first[c] = first[v].clone() + total.clone() - two.clone() * sub.mass[c].clone();
            second[c] = second[v].clone() + two.clone() * (outside - inside) + total.clone();
        }
    }

    let mut branches = vec![Vec::new(); n];
    for v in 0..n {
        for &u in t.neighbors(v) {
            let b = if t.parent(v) == Some(u) {
                let inside = sub.moment[v].clone();
                Branch { via: u, mass: total.clone() - sub.mass[v].clone(), moment: first[v].clone() - inside }
            } else {
                Branch { via: u, mass: sub.mass[u].clone(), moment: sub.moment[u].clone() + sub.mass[u].clone() }
            };
            branches[v].push(b);
        }
    }
    BranchMoments { branches, first, second }
}
