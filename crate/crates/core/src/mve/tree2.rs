//! Maximum variance embedding of a tree in the plane.
//!
//! In an optimal embedding every edge is fully stretched and each branch at
//! the barycenter runs along a straight ray, so the barycenter either sits
//! on a vertex whose branch moments can be balanced by unit vectors in the
//! plane, or strictly inside an edge with both sides on one line. Exactly
//! one of these cases is feasible.

use crate::embedding::EmbeddingKD;
use crate::error::{Error, Result};
use crate::graph::TreeGraph;
use crate::mve::moments::{branch_moments_with, subtree_sums};
use crate::report::{SolveReport, Status, Witness};
use crate::scalar::{rational_to_f64, Rational, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub enum BarycenterCase {
    Vertex(usize),
    /// Point at distance `alpha` from `u` toward `v`, with `u < v`.
    Edge { u: usize, v: usize, alpha: f64 },
}

/// Every feasible case with its value.
#[derive(Debug, Clone)]
pub struct Mve2Cases<S> {
    pub feasible: Vec<(BarycenterCase, S)>,
    pub scanned: usize,
}

fn scan<S: Scalar>(t: &TreeGraph, pi: &[S]) -> Mve2Cases<S> {
    let n = t.n();
    let bm = branch_moments_with(t, pi);
    let sub = subtree_sums(t, pi);
    let total = sub.mass[t.root()].clone();
    let two = S::from_usize(2);
    let mut feasible = Vec::new();

    for v in 0..n {
        let mut sum = S::zero();
        let mut max = S::zero();
        for b in &bm.branches[v] {
            sum = sum + b.moment.clone();
            if b.moment > max {
                max = b.moment.clone();
            }
        }
        if (two.clone() * max).le_slack(&sum) {
            feasible.push((BarycenterCase::Vertex(v), bm.second[v].clone()));
        }
    }

    for &c in t.preorder() {
        let Some(p) = t.parent(c) else { continue };
        let (m1, mo1, s1) = (sub.mass[c].clone(), sub.moment[c].clone(), sub.second[c].clone());
        let m2 = total.clone() - m1.clone();
        let mo2 = bm.first[p].clone() - (mo1.clone() + m1.clone());
        let s2 = bm.second[p].clone() - (s1.clone() + two.clone() * mo1.clone() + m1.clone());
        let alpha = (m2.clone() + mo2.clone() - mo1.clone()) / total.clone();
        let one = S::one();
        if !(alpha > S::slack() && alpha < one.clone() - S::slack()) {
            continue;
        }
        let beta = one - alpha.clone();
        let value = alpha.clone() * alpha.clone() * m1
            + two.clone() * alpha.clone() * mo1
            + s1
            + beta.clone() * beta.clone() * m2
            + two.clone() * beta.clone() * mo2
            + s2;
        let a = alpha.to_f64();
        let case = if c < p {
            BarycenterCase::Edge { u: c, v: p, alpha: a }
        } else {
            BarycenterCase::Edge { u: p, v: c, alpha: 1.0 - a }
        };
        feasible.push((case, value));
    }
    Mve2Cases { feasible, scanned: 2 * n - 1 }
}

/// All feasible barycenter cases, exact when the masses are rational.
pub fn tree_mve2_cases(t: &TreeGraph) -> Result<Mve2Cases<f64>> {
    check(t)?;
    Ok(match t.pi_exact() {
        Some(p) => {
            let c = scan::<Rational>(t, p);
            Mve2Cases { feasible: c.feasible.into_iter().map(|(k, v)| (k, rational_to_f64(&v))).collect(), scanned: c.scanned }
        }
        None => scan::<f64>(t, t.pi()),
    })
}

fn check(t: &TreeGraph) -> Result<()> {
    if t.n() < 2 {
        return Err(Error::InvalidArgument("tree must have at least two vertices".into()));
    }
    Ok(())
}

fn solve(t: &TreeGraph) -> Result<(BarycenterCase, f64, Option<Rational>, usize)> {
    check(t)?;
    match t.pi_exact() {
        Some(p) => {
            let c = scan::<Rational>(t, p);
            let count = c.feasible.len();
            let (case, v) = c.feasible.into_iter().next().ok_or(Error::NoFeasibleBarycenter)?;
            Ok((case, rational_to_f64(&v), Some(v), count))
        }
        None => {
            let c = scan::<f64>(t, t.pi());
            let count = c.feasible.len();
            let (case, v) = c.feasible.into_iter().next().ok_or(Error::NoFeasibleBarycenter)?;
            Ok((case, v, None, count))
        }
    }
}

/// Optimal two-dimensional variance of a tree, in linear time.
pub fn tree_mve2_value(t: &TreeGraph) -> Result<SolveReport> {
    let (case, value, exact, count) = solve(t)?;
    let emb = embed_case(t, &case);
    let mut r = SolveReport::new(value, Witness::Embedding(emb), Status::Exact).with_exact(exact).diag("feasible_cases", count);
    r = match case {
        BarycenterCase::Vertex(v) => r.diag("case", "vertex").diag("barycenter", v),
        BarycenterCase::Edge { u, v, alpha } => r.diag("case", "edge").diag("barycenter", vec![u, v]).diag("alpha", alpha),
    };
    Ok(r)
}

/// A fully stretched planar embedding attaining [`tree_mve2_value`].
pub fn tree_mve2_embed(t: &TreeGraph) -> Result<EmbeddingKD> {
    let (case, ..) = solve(t)?;
    Ok(embed_case(t, &case))
}

/// Splits the moments into three groups, largest first into the lightest
/// group. Returns the group of each item and the group sums.
fn three_groups(m: &[f64]) -> (Vec<usize>, [f64; 3]) {
    let mut order: Vec<usize> = (0..m.len()).collect();
    order.sort_by(|&a, &b| m[b].total_cmp(&m[a]).then(a.cmp(&b)));
    let mut sums = [0.0f64; 3];
    let mut group = vec![0; m.len()];
    for i in order {
        let g = (0..3).min_by(|&a, &b| sums[a].total_cmp(&sums[b])).expect("three groups");
        group[i] = g;
        sums[g] += m[i];
    }
    (group, sums)
}

/// Unit vectors `d_g` with `sum_g sums[g] d_g = 0`.
fn directions(sums: [f64; 3]) -> [[f64; 2]; 3] {
    let mut idx = [0, 1, 2];
    idx.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]));
    let (a, b, c) = (sums[idx[0]], sums[idx[1]], sums[idx[2]]);
    let total = a + b + c;
    assert!(a <= b + c + 1e-9 * total.max(1e-300), "moment groups violate the triangle inequality");
    let mut out = [[0.0; 2]; 3];
    if a <= 1e-300 {
        // Nothing to balance; spread the rays.
        let step = 2.0 * std::f64::consts::PI / 3.0;
        for (g, d) in out.iter_mut().enumerate() {
            *d = [(g as f64 * step).cos(), (g as f64 * step).sin()];
        }
        return out;
    }
    let cos = ((c * c - a * a - b * b) / (2.0 * a * b.max(1e-300))).clamp(-1.0, 1.0);
    let da = [1.0, 0.0];
    let db = [cos, (1.0 - cos * cos).max(0.0).sqrt()];
    let rest = [-(a * da[0] + b * db[0]), -(a * da[1] + b * db[1])];
    let len = (rest[0] * rest[0] + rest[1] * rest[1]).sqrt();
    let dc = if c > 1e-300 && len > 0.0 { [rest[0] / len, rest[1] / len] } else { [0.0, 1.0] };
    out[idx[0]] = da;
    out[idx[1]] = db;
    out[idx[2]] = dc;
    out
}

fn embed_case(t: &TreeGraph, case: &BarycenterCase) -> EmbeddingKD {
    let n = t.n();
    let mut y = vec![vec![0.0; 2]; n];
    match *case {
        BarycenterCase::Vertex(v) => {
            let bm = branch_moments_with(t, t.pi());
            let m: Vec<f64> = bm.branches[v].iter().map(|b| b.moment).collect();
            let (group, sums) = three_groups(&m);
            let dirs = directions(sums);
            let d = t.distances_from(v);
            for (i, b) in bm.branches[v].iter().enumerate() {
                for w in t.branch(v, b.via) {
                    let r = d[w] as f64;
                    y[w] = vec![r * dirs[group[i]][0], r * dirs[group[i]][1]];
                }
            }
        }
        BarycenterCase::Edge { u, v, alpha } => {
            let du = t.distances_from(u);
            for w in t.branch(v, u) {
                y[w][0] = -(du[w] as f64 + alpha);
            }
            let dv = t.distances_from(v);
            for w in t.branch(u, v) {
                y[w][0] = dv[w] as f64 + 1.0 - alpha;
            }
        }
    }
    EmbeddingKD { k: 2, y }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::{path_edges, star_edges, GraphOptions, WeightedGraph};
    use crate::objective::{barycenter, lipschitz_check, variance};
    use crate::scalar::rational;
    use crate::spread::abs_oracle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn claw() -> TreeGraph {
        let g = WeightedGraph::from_rational(
            4,
            &star_edges(4),
            vec![rational(0, 1), rational(1, 3), rational(1, 3), rational(1, 3)],
            GraphOptions::allow_zero_mass(),
        )
        .unwrap();
        TreeGraph::new(g).unwrap()
    }

    #[test]
    fn examples() {
        let r = tree_mve2_value(&claw()).unwrap();
        assert_eq!(r.exact, Some(rational(1, 1)));
        assert_eq!(r.diagnostics["case"], "vertex");
        assert_eq!(r.diagnostics["barycenter"], 0);

        let p3 = TreeGraph::new(WeightedGraph::uniform(3, &path_edges(3)).unwrap()).unwrap();
        let r = tree_mve2_value(&p3).unwrap();
        assert_eq!(r.exact, Some(rational(2, 3)));
        assert_eq!(r.diagnostics["barycenter"], 1);

        let k2 = TreeGraph::new(WeightedGraph::uniform(2, &path_edges(2)).unwrap()).unwrap();
        let r = tree_mve2_value(&k2).unwrap();
        assert_eq!(r.exact, Some(rational(1, 4)));
        assert_eq!(r.diagnostics["alpha"], 0.5);
    }

    #[test]
    fn claw_embedding_is_symmetric() {
        let t = claw();
        let e = tree_mve2_embed(&t).unwrap();
        assert_eq!(e.row(0), &[0.0, 0.0]);
        for (a, b) in [(1, 2), (1, 3), (2, 3)] {
            assert!((e.dist2(a, b) - 3.0).abs() < 1e-12);
        }
        assert!((variance(&e, &t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn light_leaves_balance_heavy_leaf() {
        let s = WeightedGraph::from_rational(
            4,
            &star_edges(4),
            vec![rational(0, 1), rational(1, 2), rational(1, 4), rational(1, 4)],
            GraphOptions::allow_zero_mass(),
        )
        .unwrap();
        let t = TreeGraph::new(s).unwrap();
        let e = tree_mve2_embed(&t).unwrap();
        let b = barycenter(&e, t.pi());
        assert!(b[0].abs() < 1e-9 && b[1].abs() < 1e-9);
    }

    #[test]
    fn random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=12 {
            for _ in 0..8 {
                let t = TreeGraph::new(gen::random_tree(&mut rng, n, 6)).unwrap();
                let cases = tree_mve2_cases(&t).unwrap();
                assert_eq!(cases.feasible.len(), 1, "{:?}", cases.feasible);
                let r = tree_mve2_value(&t).unwrap();
                let e = tree_mve2_embed(&t).unwrap();
                let lip = lipschitz_check(&e, &t, 1e-9).unwrap();
                assert!(lip.ok);
                for &(u, v) in t.edges() {
                    assert!((e.dist2(u, v).sqrt() - 1.0).abs() < 1e-9);
                }
                assert!((variance(&e, &t).unwrap() - r.value).abs() < 1e-9);
                if n <= 10 {
                    assert!(r.exact >= abs_oracle(&t, 14).unwrap().exact);
                }
            }
        }
    }
}
