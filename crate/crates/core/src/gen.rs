//! Instance generators used by tests, the self-test and the CLI.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{star_edges, GraphOptions, StarGraph, WeightedGraph};
use crate::scalar::Rational;

/// Normalizes positive integer weights to an exact distribution.
pub fn normalize(weights: &[u64]) -> Vec<Rational> {
    let total: u64 = weights.iter().sum();
    weights.iter().map(|&w| Rational::new((w as i64).into(), (total as i64).into())).collect()
}

pub fn random_weights<R: Rng>(rng: &mut R, n: usize, max_weight: u64) -> Vec<u64> {
    (0..n).map(|_| rng.gen_range(1..=max_weight.max(1))).collect()
}

/// Uniformly labeled random tree built by random attachment and relabeling.
pub fn random_tree_edges<R: Rng>(rng: &mut R, n: usize) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    (1..n).map(|i| (perm[rng.gen_range(0..i)], perm[i])).collect()
}

/// Random tree with exact masses proportional to weights in `1..=max_weight`.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, max_weight: u64) -> WeightedGraph {
    let edges = random_tree_edges(rng, n);
    let pi = normalize(&random_weights(rng, n, max_weight));
    WeightedGraph::from_rational(n, &edges, pi, GraphOptions::default()).expect("generated tree is valid")
}

/// Random tree plus up to `extra` random chords.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, extra: usize, max_weight: u64) -> WeightedGraph {
    let mut edges: BTreeSet<(usize, usize)> =
        random_tree_edges(rng, n).into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
    if n >= 3 {
        for _ in 0..extra {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                edges.insert((u.min(v), u.max(v)));
            }
        }
    }
    let edges: Vec<_> = edges.into_iter().collect();
    let pi = normalize(&random_weights(rng, n, max_weight));
    WeightedGraph::from_rational(n, &edges, pi, GraphOptions::default()).expect("generated graph is valid")
}

pub fn random_star<R: Rng>(rng: &mut R, n: usize, max_weight: u64) -> StarGraph {
    StarGraph::from_rational(normalize(&random_weights(rng, n, max_weight)), GraphOptions::default())
        .expect("generated star is valid")
}

/// Random star whose leaves admit an exactly balanced split.
pub fn random_balanced_star<R: Rng>(rng: &mut R, leaves: usize, max_weight: u64) -> StarGraph {
    assert!(leaves >= 2);
    let left = rng.gen_range(1..leaves);
    let right = leaves - left;
    // Draw both sides, then pad the lighter one so the sums agree.
    let mut a = random_weights(rng, left, max_weight);
    let mut b = random_weights(rng, right, max_weight);
    let (sa, sb): (u64, u64) = (a.iter().sum(), b.iter().sum());
    if sa < sb {
        a[0] += sb - sa;
    } else {
        b[0] += sa - sb;
    }
    let mut leaf_weights: Vec<u64> = a.into_iter().chain(b).collect();
    leaf_weights.shuffle(rng);
    let mut w = vec![rng.gen_range(1..=max_weight.max(1))];
    w.extend(leaf_weights);
    StarGraph::from_rational(normalize(&w), GraphOptions::default()).expect("generated star is valid")
}

pub fn uniform_star(n: usize) -> StarGraph {
    StarGraph::new(WeightedGraph::uniform(n, &star_edges(n)).expect("star is valid")).expect("star is valid")
}

/// All non-isomorphic trees on `n` vertices, as edge lists.
pub fn unlabeled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n == 0 {
        return Vec::new();
    }
    let mut current: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for size in 2..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for tree in &current {
            for attach in 0..size - 1 {
                let mut edges = tree.clone();
                edges.push((attach, size - 1));
                if seen.insert(canonical_form(size, &edges)) {
                    next.push(edges);
                }
            }
        }
        current = next;
    }
    current
}

/// Center-rooted AHU encoding; equal iff the trees are isomorphic.
pub fn canonical_form(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let centers = tree_centers(&adj);
    centers.iter().map(|&c| encode(&adj, c, usize::MAX)).min().unwrap_or_default()
}

fn tree_centers(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            for &w in &adj[leaf] {
                degree[w] -= 1;
                if degree[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

fn encode(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut parts: Vec<String> = adj[v].iter().filter(|&&w| w != parent).map(|&w| encode(adj, w, v)).collect();
    parts.sort();
    format!("({})", parts.concat())
}

/// All non-decreasing sequences of length `len` over `1..=max`.
pub fn multisets(len: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(len: usize, lo: u64, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in lo..=max {
            cur.push(v);
            rec(len, v, max, cur, out);
            cur.pop();
        }
    }
    rec(len, 1, max, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unlabeled_tree_counts() {
        let counts: Vec<usize> = (1..=10).map(|n| unlabeled_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
        assert_eq!(counts.iter().sum::<usize>(), 201);
    }

    #[test]
    fn balanced_stars_are_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let s = random_balanced_star(&mut rng, 5, 9);
            assert!(crate::lambda::star_is_tight(&s).unwrap());
        }
    }

    #[test]
    fn multiset_count() {
        assert_eq!(multisets(3, 4).len(), 20);
        assert!(multisets(2, 3).iter().all(|m| m[0] <= m[1]));
    }
}
