//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line
//! to stderr (visible without `--nocapture`); the test fails if any does.

use std::cmp::Ordering;
use std::io::Write;
use std::time::{Duration, Instant};

use num::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use isoconst::gen;
use isoconst::graph::{star_edges, GraphOptions, StarGraph, TreeGraph, WeightedGraph};
use isoconst::lambda::{cheeger_sandwich, oracle_small, star_fptas, star_lambda_cmp};
use isoconst::mve::rounding::{prepare, round_prepared};
use isoconst::mve::{gaussian_trials, lift_solve, pca_round, tau_k, tree_mve2_cases, tree_mve2_embed, tree_mve2_value, GramLift};
use isoconst::objective::{lipschitz_check, variance};
use isoconst::reductions::{
    decide_partition, lambda_gap_bound, partition_bruteforce, to_lambda_star, to_spread_star, LambdaBackend,
    PartitionInstance,
};
use isoconst::scalar::{rational, rational_to_f64, Rational};
use isoconst::spread::abs::{integer_variance, integral_witness};
use isoconst::spread::{abs_oracle, is_fully_stretched, star_spread_exact, tree_spread_fptas};
use isoconst::vexp::{vexp_bruteforce, vexp_tree_uniform};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn tree_with(n: usize, edges: &[(usize, usize)], pi: Vec<Rational>, opts: GraphOptions) -> TreeGraph {
    TreeGraph::new(WeightedGraph::from_rational(n, edges, pi, opts).unwrap()).unwrap()
}

fn claw() -> TreeGraph {
    let pi = vec![rational(0, 1), rational(1, 3), rational(1, 3), rational(1, 3)];
    tree_with(4, &star_edges(4), pi, GraphOptions::allow_zero_mass())
}

/// All Partition instances with `len <= 8` entries in `1..=12`.
fn partition_sweep() -> Vec<PartitionInstance> {
    (1..=8).flat_map(|len| gen::multisets(len, 12)).map(|p| PartitionInstance::new(p).unwrap()).collect()
}

fn balanced_star_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst_width = 0.0f64;
    let mut worst_ratio = 1.0f64;
    for trial in 0..50 {
        let leaves = 2 + trial % 7;
        let s = gen::random_balanced_star(&mut rng, leaves, 9);
        let pi0 = s.center_mass_exact().unwrap().clone();
        let target = Rational::one() / (Rational::one() - pi0);
        let t = rational_to_f64(&target);
        let iv = oracle_small(&s, 10).map_err(err)?;
        worst_width = worst_width.max(iv.width());
        ensure(iv.width() <= 1e-7, || format!("star {trial}: oracle width {}", iv.width()))?;
        ensure(iv.lo <= t + 1e-7 && (iv.hi - t).abs() <= 1e-7, || {
            format!("star {trial}: oracle [{}, {}] vs {t}", iv.lo, iv.hi)
        })?;
        let f = star_fptas(&s, 1e-3).map_err(err)?.value;
        worst_ratio = worst_ratio.max(f / t);
        ensure(f >= t * (1.0 - 1e-12) && f <= 1.001 * t, || format!("star {trial}: fptas {f} vs {t}"))?;
    }
    Ok(format!("50 stars, max oracle width {worst_width:.1e}, max fptas ratio {worst_ratio:.6}"))
}

fn lambda_hardness_gap() -> Outcome {
    let sweep = partition_sweep();
    let betas = [rational(3, 2), rational(2, 1), rational(3, 1)];
    let jobs: Vec<(&PartitionInstance, &Rational)> = sweep.iter().flat_map(|p| betas.iter().map(move |b| (p, b))).collect();
    let failures: Vec<String> = jobs
        .par_iter()
        .filter_map(|&(p, beta)| {
            let check = || -> Result<(), String> {
                let yes = partition_bruteforce(p).map_err(err)?;
                let decided = decide_partition(p, beta, LambdaBackend::StarExact).map_err(err)?;
                ensure(yes == decided, || "decision disagrees with brute force".into())?;
                let s = to_lambda_star(p, beta).map_err(err)?;
                if yes {
                    ensure(star_lambda_cmp(&s, beta).map_err(err)? == Ordering::Equal, || "YES value is not beta".into())?;
                } else {
                    let gap = lambda_gap_bound(p, beta).map_err(err)?.gap;
                    let edge = beta + &gap;
                    ensure(star_lambda_cmp(&s, &edge).map_err(err)? != Ordering::Less, || "NO gap too small".into())?;
                }
                Ok(())
            };
            check().err().map(|e| format!("p={:?} beta={beta}: {e}", p.p))
        })
        .collect();
    // Independent backend on a deterministic subsample.
    let sample: Vec<_> = jobs.iter().step_by(401).filter(|(p, _)| p.p.len() <= 6).collect();
    let oracle_failures: Vec<String> = sample
        .par_iter()
        .filter_map(|&&(p, beta)| {
            let yes = partition_bruteforce(p).ok()?;
            match decide_partition(p, beta, LambdaBackend::Oracle { max_n: 10 }) {
                Ok(d) if d == yes => None,
                other => Some(format!("oracle p={:?} beta={beta}: {other:?}", p.p)),
            }
        })
        .collect();
    ensure(failures.is_empty(), || format!("{} disagreements, first: {}", failures.len(), failures[0]))?;
    ensure(oracle_failures.is_empty(), || format!("{} oracle disagreements, first: {}", oracle_failures.len(), oracle_failures[0]))?;
    Ok(format!("{} instances, 0 disagreements; oracle cross-check on {}", jobs.len(), sample.len()))
}

fn spread_gadget() -> Outcome {
    let sweep = partition_sweep();
    let betas = [rational(1, 4), rational(1, 2), rational(3, 4)];
    let jobs: Vec<(&PartitionInstance, &Rational)> = sweep.iter().flat_map(|p| betas.iter().map(move |b| (p, b))).collect();
    let failures: Vec<String> = jobs
        .par_iter()
        .filter_map(|&(p, beta)| {
            let check = || -> Result<(), String> {
                let yes = partition_bruteforce(p).map_err(err)?;
                let s = to_spread_star(p, beta).map_err(err)?;
                let v = star_spread_exact(&s).map_err(err)?.exact.ok_or("no exact value")?;
                ensure(yes == (&v == beta), || format!("partition {yes} but spread {v}"))
            };
            check().err().map(|e| format!("p={:?} beta={beta}: {e}", p.p))
        })
        .collect();
    ensure(failures.is_empty(), || format!("{} disagreements, first: {}", failures.len(), failures[0]))?;

    let t = claw();
    let e1 = star_spread_exact(&StarGraph::new(t.graph().clone()).unwrap()).map_err(err)?.exact.unwrap();
    let e1_abs = abs_oracle(t.graph(), 20).map_err(err)?.exact.unwrap();
    let e2 = tree_mve2_value(&t).map_err(err)?.exact.unwrap();
    ensure(e1 == rational(8, 9) && e1_abs == e1, || format!("claw spread {e1} / {e1_abs}"))?;
    ensure(e2 == rational(1, 1), || format!("claw mve2 {e2}"))?;
    ensure(&e2 / &e1 == rational(9, 8), || "claw ratio".into())?;
    Ok(format!("{} instances, 0 disagreements; claw 8/9, 1, ratio 9/8", jobs.len()))
}

fn tree_fptas_vs_abs() -> Outcome {
    let mut count = 0usize;
    let mut worst = 1.0f64;
    for n in 2..=9 {
        let trees = gen::unlabeled_trees(n);
        let results: Vec<Result<f64, String>> = trees
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, edges)| {
                let mut rng = ChaCha8Rng::seed_from_u64((n * 1000 + i) as u64);
                let pis: Vec<Vec<Rational>> = (0..100).map(|_| gen::normalize(&gen::random_weights(&mut rng, n, 20))).collect();
                pis.into_iter().map(move |pi| {
                    let t = tree_with(n, edges, pi, GraphOptions::default());
                    let g = t.graph();
                    let e1 = abs_oracle(g, 20).map_err(err)?.exact.ok_or("abs value not exact")?;
                    let r = tree_spread_fptas(&t, 1e-3).map_err(err)?;
                    let y = integral_witness(&r).ok_or("witness not integral")?;
                    ensure(is_fully_stretched(&y, g), || format!("n={n}: witness not fully stretched"))?;
                    ensure(y.iter().filter(|&&c| c == 0).count() == 1, || format!("n={n}: zero set not a singleton"))?;
                    let v = integer_variance(&y, g).ok_or("no exact variance")?;
                    ensure(r.value == rational_to_f64(&v), || format!("n={n}: reported {} vs witness {v}", r.value))?;
                    let scaled = &v * Rational::new(1001.into(), 1000.into());
                    ensure(v <= e1 && scaled >= e1, || format!("n={n}: fptas {v} vs abs {e1}"))?;
                    Ok(rational_to_f64(&(&e1 / &v)))
                })
            })
            .collect();
        for r in results {
            worst = worst.max(r?);
            count += 1;
        }
    }
    Ok(format!("{count} weighted trees, worst abs/fptas ratio {worst:.6}"))
}

fn mve2_pipeline() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let trees: Vec<TreeGraph> = (0..50)
        .map(|_| {
            let n = rng.gen_range(2..=10);
            TreeGraph::new(gen::random_tree(&mut rng, n, 9)).unwrap()
        })
        .collect();
    let gaps: Vec<Result<f64, String>> = trees
        .par_iter()
        .enumerate()
        .map(|(i, t)| {
            let g = t.graph();
            let value = tree_mve2_value(t).map_err(err)?.value;
            let cases = tree_mve2_cases(t).map_err(err)?;
            ensure(cases.feasible.len() == 1, || format!("tree {i}: {} feasible cases", cases.feasible.len()))?;
            let emb = tree_mve2_embed(t).map_err(err)?;
            ensure(lipschitz_check(&emb, g, 1e-9).map_err(err)?.ok, || format!("tree {i}: not Lipschitz"))?;
            let slack = g.edges().iter().map(|&(u, v)| (emb.dist2(u, v).sqrt() - 1.0).abs()).fold(0.0, f64::max);
            ensure(slack <= 1e-9, || format!("tree {i}: edge length off by {slack}"))?;
            let var = variance(&emb, g).map_err(err)?;
            ensure((var - value).abs() <= 1e-9, || format!("tree {i}: variance {var} vs value {value}"))?;
            let lift = lift_solve(g, 1e-6, 20_000).map_err(err)?;
            let d = (lift.objective - value).abs();
            ensure(d <= 1e-3, || format!("tree {i}: lift {} vs mve2 {value}", lift.objective))?;
            Ok(d)
        })
        .collect();
    let mut worst = 0.0f64;
    for g in gaps {
        worst = worst.max(g?);
    }
    Ok(format!("50 trees, max |lift - mve2| {worst:.2e}"))
}

fn vertex_expansion() -> Outcome {
    let mut count = 0;
    for n in 2..=10 {
        for edges in gen::unlabeled_trees(n) {
            let t = TreeGraph::new(WeightedGraph::uniform(n, &edges).unwrap()).unwrap();
            let dp = vexp_tree_uniform(&t).map_err(err)?.exact;
            let brute = vexp_bruteforce(t.graph(), 20).map_err(err)?.exact;
            ensure(dp.is_some() && dp == brute, || format!("n={n} {edges:?}: dp {dp:?} vs brute {brute:?}"))?;
            count += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for _ in 0..100 {
        let n = rng.gen_range(2..=15);
        let edges = gen::random_tree_edges(&mut rng, n);
        let t = TreeGraph::new(WeightedGraph::uniform(n, &edges).unwrap()).unwrap();
        let dp = vexp_tree_uniform(&t).map_err(err)?.exact;
        let brute = vexp_bruteforce(t.graph(), 20).map_err(err)?.exact;
        ensure(dp.is_some() && dp == brute, || format!("random n={n}: dp {dp:?} vs brute {brute:?}"))?;
        count += 1;
    }
    let mut stars: Vec<StarGraph> = (2..=8).map(gen::uniform_star).collect();
    for n in 2..=8 {
        stars.extend((0..20).map(|_| gen::random_star(&mut rng, n, 9)));
    }
    for s in &stars {
        let iv = oracle_small(s, 10).map_err(err)?;
        ensure(iv.is_certified(), || format!("oracle interval [{}, {}] not certified", iv.lo, iv.hi))?;
        let phi = vexp_bruteforce(s, 20).map_err(err)?.value;
        ensure(cheeger_sandwich(iv.lo, phi) && cheeger_sandwich(iv.hi, phi), || {
            format!("sandwich fails: lambda {} phi {phi}", iv.hi)
        })?;
    }
    Ok(format!("{count} trees match brute force; sandwich holds on {} stars", stars.len()))
}

fn pair_distances(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            out.push(rows[u].iter().zip(&rows[v]).map(|(a, b)| (a - b) * (a - b)).sum());
        }
    }
    out
}

fn gaussian_concentration() -> Outcome {
    const SEEDS: u64 = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut graphs = vec![claw().graph().clone()];
    for _ in 0..5 {
        let n = rng.gen_range(8..=16);
        graphs.push(gen::random_tree(&mut rng, n, 9));
    }
    let mut lines = Vec::new();
    let mut worst_z = 0.0f64;
    let mut min_retention = 1.0f64;
    for (gi, g) in graphs.iter().enumerate() {
        let lift = lift_solve(g, 1e-6, 20_000).map_err(err)?.lift;
        let n = lift.n();
        let ln = (n as f64).ln();
        let mut ks = vec![1, 2, 4, ln.ceil() as usize, (4.0 * ln).ceil() as usize];
        ks.sort_unstable();
        ks.dedup();
        let prep = prepare(&lift);
        let base = pair_distances(&lift.factor());
        for &k in &ks {
            let tau = tau_k(k, n);
            let runs: Vec<(Vec<f64>, bool, bool)> = (0..SEEDS)
                .into_par_iter()
                .map(|t| {
                    let (emb, rep) = round_prepared(&prep, &lift, k, 1_000_000 * gi as u64 + t, tau);
                    (pair_distances(&emb.y), rep.lipschitz, rep.retained)
                })
                .collect();
            let m = SEEDS as f64;
            for (j, &b) in base.iter().enumerate() {
                let mean = runs.iter().map(|r| r.0[j]).sum::<f64>() / m;
                let var = runs.iter().map(|r| (r.0[j] - mean).powi(2)).sum::<f64>() / (m - 1.0);
                let se = (var / m).sqrt();
                let pred = k as f64 / tau * b;
                let z = if se > 0.0 { (mean - pred).abs() / se } else { 0.0 };
                worst_z = worst_z.max(z);
                ensure((mean - pred).abs() <= 5.0 * se + 1e-12 * pred.max(1.0), || {
                    format!("graph {gi} k={k} pair {j}: mean {mean} vs {pred} (se {se})")
                })?;
            }
            let fail = runs.iter().filter(|r| !r.1).count() as f64 / m;
            let kept = runs.iter().filter(|r| r.2).count() as f64 / m;
            min_retention = min_retention.min(kept);
            ensure(fail <= 2.0 / n as f64, || format!("graph {gi} k={k}: Lipschitz failure rate {fail}"))?;
            ensure(kept >= 1.0 / 24.0, || format!("graph {gi} k={k}: retention frequency {kept}"))?;
        }
        lines.push(format!("n={n} k={ks:?}"));
    }
    Ok(format!("{}; max pair z {worst_z:.2}, min retention {min_retention:.3}", lines.join(", ")))
}

fn cube_lift() -> GramLift {
    let mut vectors = Vec::new();
    let mut edges = Vec::new();
    for v in 0..8usize {
        vectors.push((0..3).map(|b| if v >> b & 1 == 1 { 0.5 } else { -0.5 }).collect());
        for b in 0..3 {
            let w = v ^ (1 << b);
            if v < w {
                edges.push((v, w));
            }
        }
    }
    GramLift::from_vectors(&vectors, vec![0.125; 8], edges).unwrap()
}

fn rounding_comparison() -> Outcome {
    let lift = cube_lift();
    ensure(lift.rank(1e-9) == 3, || "cube lift is not rank 3".into())?;
    let (_, var) = pca_round(&lift, 1).map_err(err)?;
    let pca = var / lift.objective();
    ensure(pca <= 0.34, || format!("pca retains {pca}"))?;
    let s = gaussian_trials(&lift, 1, 808, 10_000, None).map_err(err)?;
    let pred = 1.0 / s.tau;
    ensure((s.mean_var_ratio - pred).abs() <= 5.0 * s.var_ratio_std_err, || {
        format!("gaussian mean ratio {} vs {pred} (se {})", s.mean_var_ratio, s.var_ratio_std_err)
    })?;
    Ok(format!(
        "pca k=1 retains {pca:.4}; gaussian mean ratio {:.5} vs k/tau {pred:.5} (se {:.1e})",
        s.mean_var_ratio, s.var_ratio_std_err
    ))
}

struct Criterion {
    id: usize,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion { id: 1, name: "balanced-star exactness", budget: Some(Duration::from_secs(30)), run: balanced_star_exactness },
        Criterion { id: 2, name: "lambda hardness gap", budget: Some(Duration::from_secs(300)), run: lambda_hardness_gap },
        Criterion { id: 3, name: "spread gadget and claw", budget: None, run: spread_gadget },
        Criterion { id: 4, name: "tree FPTAS vs ABS oracle", budget: Some(Duration::from_secs(600)), run: tree_fptas_vs_abs },
        Criterion { id: 5, name: "two-dimensional tree pipeline", budget: None, run: mve2_pipeline },
        Criterion { id: 6, name: "vertex expansion", budget: Some(Duration::from_secs(300)), run: vertex_expansion },
        Criterion { id: 7, name: "gaussian rounding concentration", budget: Some(Duration::from_secs(600)), run: gaussian_concentration },
        Criterion { id: 8, name: "rounding comparison", budget: None, run: rounding_comparison },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(c.run).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(b)) if took > b => Err(format!("took {took:.1?}, budget {b:?}")),
            (o, _) => o,
        };
        let line = match &outcome {
            Ok(detail) => format!("PASS criterion {} ({}) in {:.1?}: {detail}\n", c.id, c.name, took),
            Err(e) => format!("FAIL criterion {} ({}) in {:.1?}: {e}\n", c.id, c.name, took),
        };
        let _ = std::io::stderr().write_all(line.as_bytes());
        if outcome.is_err() {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

