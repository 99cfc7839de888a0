//! Property suites at reduced sizes, runnable from the command line.
//!
//! Two knobs deliberately break a solver so the corresponding suite can be
//! seen failing: a factor on the Gaussian rounding scale, and the grid
//! constant of the star FPTAS.

use std::time::Instant;

use num::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::gen;
use crate::graph::{star_edges, GraphOptions, TreeGraph, WeightedGraph};
use crate::lambda::{oracle_small, star_exact, star_fptas_with, star_lower_bound, FptasOptions};
use crate::mve::{gaussian_trials, lift_solve, tau_k, tree_mve2_cases, tree_mve2_embed, tree_mve2_value, GramLift};
use crate::objective::{lipschitz_check, variance, variance_barycentric};
use crate::reductions::{decide_partition, partition_bruteforce, spread_gap_check, LambdaBackend, PartitionInstance};
use crate::scalar::{rational, Rational};
use crate::spread::{abs_oracle, abs_singleton_best, tree_spread_fptas};
use crate::vexp::{vexp_bruteforce, vexp_star_weighted, vexp_tree_uniform};
use crate::Embedding1D;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestOptions {
    /// Multiplies the rounding scale `tau_k`; `1.0` is correct.
    pub tau_scale: f64,
    /// Grid constant handed to the star FPTAS.
    pub fptas_grid: f64,
    pub seed: u64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        SelftestOptions { tau_scale: 1.0, fptas_grid: FptasOptions::default().grid, seed: 2024 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl SuiteResult {
    pub fn to_json(&self) -> Value {
        json!({ "suite": self.name, "passed": self.passed, "detail": self.detail })
    }
}

type Check = std::result::Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn objectives(rng: &mut ChaCha8Rng) -> Check {
    use rand::Rng;
    for n in 2..=9 {
        let g = gen::random_connected_graph(rng, n, n, 6);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let e = Embedding1D::new(x).map_err(err)?;
        let a = variance(&e, &g).map_err(err)?;
        let b = variance_barycentric(&e, &g).map_err(err)?;
        ensure((a - b).abs() <= 1e-12 * a.abs().max(1.0), || format!("variance forms differ on n={n}: {a} vs {b}"))?;
    }
    Ok(())
}

fn lambda_oracle(rng: &mut ChaCha8Rng) -> Check {
    for _ in 0..6 {
        let s = gen::random_balanced_star(rng, 4, 6);
        let iv = oracle_small(&s, 10).map_err(err)?;
        let lb: f64 = star_lower_bound(&s).map_err(err)?;
        ensure(iv.is_certified() && (iv.hi - lb).abs() <= 1e-7, || format!("balanced star: [{}, {}] vs {lb}", iv.lo, iv.hi))?;
    }
    for n in 3..=6 {
        let s = gen::random_star(rng, n, 6);
        let iv = oracle_small(&s, 10).map_err(err)?;
        let ex = star_exact(&s).map_err(err)?;
        ensure(iv.lo <= ex.value + 1e-7 && ex.value <= iv.hi + 1e-7, || {
            format!("oracle [{}, {}] misses star value {}", iv.lo, iv.hi, ex.value)
        })?;
    }
    Ok(())
}

fn lambda_fptas(rng: &mut ChaCha8Rng, grid: f64) -> Check {
    let eps = 0.05;
    let opts = FptasOptions { grid, ..FptasOptions::default() };
    for n in 3..=7 {
        for _ in 0..3 {
            let s = gen::random_star(rng, n, 4);
            if s.pi().iter().cloned().fold(f64::INFINITY, f64::min) <= eps {
                continue;
            }
            let ex = star_exact(&s).map_err(err)?.value;
            let r = star_fptas_with(&s, eps, opts).map_err(err)?;
            ensure(r.value >= ex - 1e-9 && r.value <= (1.0 + eps) * ex + 1e-12, || {
                format!("fptas {} outside [{ex}, {}]", r.value, (1.0 + eps) * ex)
            })?;
        }
    }
    Ok(())
}

fn spread(rng: &mut ChaCha8Rng) -> Check {
    for n in 1..=7 {
        for edges in gen::unlabeled_trees(n) {
            let w = gen::random_weights(rng, n, 5);
            let g = WeightedGraph::from_rational(n, &edges, gen::normalize(&w), GraphOptions::default()).map_err(err)?;
            let oracle = abs_oracle(&g, 14).map_err(err)?;
            let single = abs_singleton_best(&g).map_err(err)?;
            ensure(single.exact == oracle.exact, || format!("singleton root not optimal on {edges:?}"))?;
            let t = TreeGraph::new(g).map_err(err)?;
            let f = tree_spread_fptas(&t, 1e-3).map_err(err)?;
            ensure(f.value <= oracle.value + 1e-12 && f.value * 1.001 >= oracle.value, || {
                format!("tree fptas {} vs oracle {}", f.value, oracle.value)
            })?;
        }
    }
    Ok(())
}

fn mve2(rng: &mut ChaCha8Rng) -> Check {
    for n in 2..=9 {
        let t = TreeGraph::new(gen::random_tree(rng, n, 6)).map_err(err)?;
        let cases = tree_mve2_cases(&t).map_err(err)?;
        ensure(cases.feasible.len() == 1, || format!("{} feasible cases on n={n}", cases.feasible.len()))?;
        let r = tree_mve2_value(&t).map_err(err)?;
        let e = tree_mve2_embed(&t).map_err(err)?;
        ensure(lipschitz_check(&e, &t, 1e-9).map_err(err)?.ok, || "embedding not Lipschitz".into())?;
        let v = variance(&e, &t).map_err(err)?;
        ensure((v - r.value).abs() <= 1e-9, || format!("embedding variance {v} vs value {}", r.value))?;
        let one = abs_oracle(&t, 14).map_err(err)?;
        ensure(r.value + 1e-12 >= one.value, || "planar value below line value".into())?;
        if n <= 6 {
            let lift = lift_solve(&t, 1e-7, 4000).map_err(err)?;
            ensure((lift.objective - r.value).abs() <= 1e-3, || format!("lift {} vs tree {}", lift.objective, r.value))?;
        }
    }
    Ok(())
}

fn claw() -> WeightedGraph {
    WeightedGraph::from_rational(
        4,
        &star_edges(4),
        vec![Rational::zero(), rational(1, 3), rational(1, 3), rational(1, 3)],
        GraphOptions::allow_zero_mass(),
    )
    .expect("valid claw")
}

fn rounding(rng: &mut ChaCha8Rng, tau_scale: f64, seed: u64) -> Check {
    let mut lifts: Vec<GramLift> = vec![lift_solve(&claw(), 1e-7, 3000).map_err(err)?.lift];
    let t = gen::random_tree(rng, 8, 5);
    lifts.push(lift_solve(&t, 1e-6, 3000).map_err(err)?.lift);
    for lift in &lifts {
        let n = lift.n();
        for k in [1usize, 2, 4] {
            let tau = tau_k(k, n) * tau_scale;
            let s = gaussian_trials(lift, k, seed, 2000, Some(tau)).map_err(err)?;
            let predicted = k as f64 / tau_k(k, n);
            ensure((s.mean_var_ratio - predicted).abs() <= 5.0 * s.var_ratio_std_err + 1e-12, || {
                format!("k={k}: mean variance ratio {} vs {predicted} (se {})", s.mean_var_ratio, s.var_ratio_std_err)
            })?;
            ensure(s.lipschitz_failure_rate <= 2.0 / n as f64, || {
                format!("k={k}: Lipschitz failure rate {}", s.lipschitz_failure_rate)
            })?;
            ensure(s.retention_rate >= 1.0 / 24.0, || format!("k={k}: retention rate {}", s.retention_rate))?;
        }
    }
    Ok(())
}

fn vexp(rng: &mut ChaCha8Rng) -> Check {
    for n in 2..=8 {
        for edges in gen::unlabeled_trees(n) {
            let t = TreeGraph::new(WeightedGraph::uniform(n, &edges).map_err(err)?).map_err(err)?;
            let a = vexp_tree_uniform(&t).map_err(err)?;
            let b = vexp_bruteforce(&t, 20).map_err(err)?;
            ensure(a.exact == b.exact, || format!("tree DP {:?} vs brute {:?} on {edges:?}", a.exact, b.exact))?;
        }
    }
    for n in 2..=9 {
        let s = gen::random_star(rng, n, 7);
        let a = vexp_star_weighted(&s).map_err(err)?;
        let b = vexp_bruteforce(&s, 20).map_err(err)?;
        ensure(a.exact == b.exact, || format!("weighted star {:?} vs brute {:?}", a.exact, b.exact))?;
    }
    Ok(())
}

fn reductions() -> Check {
    for len in 1..=4 {
        for p in gen::multisets(len, 4) {
            let inst = PartitionInstance::new(p.clone()).map_err(err)?;
            let yes = partition_bruteforce(&inst).map_err(err)?;
            for beta in [rational(3, 2), rational(2, 1), rational(3, 1)] {
                let got = decide_partition(&inst, &beta, LambdaBackend::StarExact).map_err(err)?;
                ensure(got == yes, || format!("lambda gadget disagrees on {p:?}, beta {beta}"))?;
            }
            for beta in [rational(1, 4), rational(1, 2), rational(3, 4)] {
                let c = spread_gap_check(&inst, &beta).map_err(err)?;
                ensure(c.agrees, || format!("spread gadget disagrees on {p:?}, beta {beta}"))?;
            }
        }
    }
    Ok(())
}

pub const SUITES: &[&str] = &["objectives", "lambda-oracle", "lambda-fptas", "spread", "mve2", "rounding", "vexp", "reductions"];

/// Runs every suite (or only those named in `only`).
pub fn run_selftest(opts: SelftestOptions, only: Option<&[String]>) -> Vec<SuiteResult> {
    let mut out = Vec::new();
    for (i, &name) in SUITES.iter().enumerate() {
        if let Some(names) = only {
            if !names.iter().any(|n| n == name) {
                continue;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
        let start = Instant::now();
        let res = match name {
            "objectives" => objectives(&mut rng),
            "lambda-oracle" => lambda_oracle(&mut rng),
            "lambda-fptas" => lambda_fptas(&mut rng, opts.fptas_grid),
            "spread" => spread(&mut rng),
            "mve2" => mve2(&mut rng),
            "rounding" => rounding(&mut rng, opts.tau_scale, opts.seed),
            "vexp" => vexp(&mut rng),
            "reductions" => reductions(),
            _ => unreachable!(),
        };
        out.push(SuiteResult {
            name,
            passed: res.is_ok(),
            detail: res.err().unwrap_or_else(|| "ok".into()),
            millis: start.elapsed().as_millis(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn only(name: &str) -> Vec<String> {
        vec![name.to_string()]
    }

    #[test]
    fn all_suites_pass() {
        for r in run_selftest(SelftestOptions::default(), None) {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn corrupted_tau_fails_rounding() {
        let opts = SelftestOptions { tau_scale: 0.1, ..SelftestOptions::default() };
        let r = run_selftest(opts, Some(&only("rounding")));
        assert!(!r[0].passed);
    }

    #[test]
    fn perturbed_grid_fails_fptas() {
        let opts = SelftestOptions { fptas_grid: 1e-4, ..SelftestOptions::default() };
        let r = run_selftest(opts, Some(&only("lambda-fptas")));
        assert!(!r[0].passed);
    }
}
