//! Exhaustive vertex expansion over all proper subsets.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::report::{SolveReport, Status, Witness};
use crate::scalar::{common_denominator, to_integer_weights, Rational};

pub const DEFAULT_MAX_N: usize = 20;

/// Vertices of `mask`, ascending.
pub(crate) fn members(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&v| mask >> v & 1 == 1).collect()
}

/// The lexicographically smaller of `S` and `V \ S`.
pub(crate) fn normalize(s: Vec<usize>, n: usize) -> Vec<usize> {
    let mut inside = vec![false; n];
    for &v in &s {
        inside[v] = true;
    }
    let comp: Vec<usize> = (0..n).filter(|&v| !inside[v]).collect();
    if comp < s {
        comp
    } else {
        s
    }
}

enum Masses {
    Int(Vec<u64>),
    Float(Vec<f64>),
}

/// Minimum of `pi(N(S) ∪ N(V \ S)) / min(pi(S), pi(V \ S))` over every
/// proper nonempty `S`, exact when the masses are rational. Ties go to the
/// lexicographically smallest set among all optimal sets and their
/// complements.
pub fn vexp_bruteforce(g: &WeightedGraph, max_n: usize) -> Result<SolveReport> {
    let n = g.n();
    if n > max_n || n > 30 {
        return Err(Error::BudgetExceeded { what: "subset enumeration", needed: 1u128 << n.min(120), budget: 1u128 << max_n.min(30) });
    }
    if n < 2 {
        return Err(Error::InvalidArgument("vertex expansion needs at least two vertices".into()));
    }
    let adj = g.adjacency_masks().expect("n <= 30");
    let masses = match g.pi_exact().and_then(|p| {
        let den = common_denominator(p)?;
        Some(Masses::Int(to_integer_weights(p, den)?))
    }) {
        Some(m) => m,
        None => Masses::Float(g.pi().to_vec()),
    };

    let full = (1u64 << n) - 1;
    let size = 1usize << n;
    // nbr[S] = vertices adjacent to some vertex of S.
    let mut nbr = vec![0u64; size];
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        nbr[s] = nbr[s & (s - 1)] | adj[low];
    }
    let weight = |mask: u64| -> (u64, f64) {
        match &masses {
            Masses::Int(w) => (members(mask, n).iter().map(|&v| w[v]).sum(), 0.0),
            Masses::Float(w) => (0, members(mask, n).iter().map(|&v| w[v]).sum()),
        }
    };
    let mut mass_i = vec![0u64; size];
    let mut mass_f = vec![0.0f64; size];
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        let (a, b) = weight(1 << low);
        mass_i[s] = mass_i[s & (s - 1)] + a;
        mass_f[s] = mass_f[s & (s - 1)] + b;
    }

    // Best (numerator, denominator) and set.
    let mut best: Option<(u128, u128, f64, Vec<usize>)> = None;
    for s in 1..full {
        let comp = full & !s;
        let boundary = (nbr[s as usize] & comp) | (nbr[comp as usize] & s);
        let (num, den, ratio) = match &masses {
            Masses::Int(..) => {
                let d = mass_i[s as usize].min(mass_i[comp as usize]);
                if d == 0 {
                    continue;
                }
                let b = mass_i[boundary as usize];
                (b as u128, d as u128, b as f64 / d as f64)
            }
            Masses::Float(_) => {
                let d = mass_f[s as usize].min(mass_f[comp as usize]);
                if d <= 0.0 {
                    continue;
                }
                (0, 0, mass_f[boundary as usize] / d)
            }
        };
        let order = match &best {
            None => Ordering::Less,
            Some((bn, bd, br, _)) => match &masses {
                Masses::Int(..) => (num * bd).cmp(&(bn * den)),
                Masses::Float(_) => {
                    if (ratio - br).abs() <= 1e-12 * br.abs().max(1.0) {
                        Ordering::Equal
                    } else {
                        ratio.total_cmp(br)
                    }
                }
            },
        };
        let set = || normalize(members(s, n), n);
        match order {
            Ordering::Less => best = Some((num, den, ratio, set())),
            Ordering::Equal => {
                let cand = set();
                if let Some(b) = best.as_mut() {
                    if cand < b.3 {
                        b.3 = cand;
                    }
                }
            }
            Ordering::Greater => {}
        }
    }
    let (num, den, ratio, set) =
        best.ok_or_else(|| Error::InvalidArgument("every cut has a side of zero mass".into()))?;
    Ok(match masses {
        Masses::Int(..) => {
            let q = Rational::new(num.into(), den.into());
            SolveReport::exact(q, Witness::VertexSet(set))
        }
        Masses::Float(_) => SolveReport::new(ratio, Witness::VertexSet(set), Status::Exact),
    })
}

/// Exact expansion of a set given as a rational.
pub fn expansion_exact(s: &[usize], g: &WeightedGraph) -> Result<Rational> {
    crate::objective::expansion_of_set_exact(s, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::{path_edges, star_edges};
    use crate::scalar::rational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn examples() {
        let p3 = WeightedGraph::uniform(3, &path_edges(3)).unwrap();
        let r = vexp_bruteforce(&p3, 20).unwrap();
        assert_eq!(r.exact, Some(rational(2, 1)));
        assert_eq!(r.vertex_set(), Some(&[0usize][..]));

        let s4 = WeightedGraph::uniform(4, &star_edges(4)).unwrap();
        let r = vexp_bruteforce(&s4, 20).unwrap();
        assert_eq!(r.exact, Some(rational(3, 2)));
        assert_eq!(r.vertex_set(), Some(&[0usize, 1][..]));

        let k2 = WeightedGraph::uniform(2, &path_edges(2)).unwrap();
        assert_eq!(vexp_bruteforce(&k2, 20).unwrap().exact, Some(rational(2, 1)));

        let p5 = WeightedGraph::uniform(5, &path_edges(5)).unwrap();
        let r = vexp_bruteforce(&p5, 20).unwrap();
        assert_eq!(r.exact, Some(rational(1, 1)));
        assert_eq!(r.vertex_set(), Some(&[0usize, 1][..]));
    }

    #[test]
    fn budget() {
        let g = WeightedGraph::uniform(21, &path_edges(21)).unwrap();
        assert!(matches!(vexp_bruteforce(&g, 20), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn witness_attains_value_and_complement_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 2..=10 {
            let g = gen::random_connected_graph(&mut rng, n, n / 2, 5);
            let r = vexp_bruteforce(&g, 20).unwrap();
            let s = r.vertex_set().unwrap().to_vec();
            let comp: Vec<usize> = (0..n).filter(|v| !s.contains(v)).collect();
            assert_eq!(Some(expansion_exact(&s, &g).unwrap()), r.exact);
            assert_eq!(Some(expansion_exact(&comp, &g).unwrap()), r.exact);
            assert!(s < comp);
        }
    }
}
