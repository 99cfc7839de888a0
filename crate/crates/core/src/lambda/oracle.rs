//! Certified interval for lambda-infinity on small graphs.
//!
//! Upper bounds come from evaluating the true quotient at minimizers of
//! quadratic surrogates: one per furthest-neighbor assignment `f`, and one
//! per tie structure (a set of neighbors of each vertex forced to sit at the
//! same distance, with signs). Take an optimum with the most ties. It lies in
//! the relative interior of its own structure, where the surrogate agrees
//! with the true numerator, so it is a generalized eigenvector of the
//! surrogate restricted to that structure. If its eigenspace had a member
//! outside the structure's region, moving towards it would reach an optimum
//! with more ties; so every basis vector of that eigenspace is optimal too.
//! Scoring all eigenvectors of all structures therefore returns the exact
//! value, and the interval collapses when the enumeration fits the budget.
//!
//! Otherwise lower bounds come from convex combinations of neighbors: for weights `w_v`
//! on the simplex over `N(v)`, `max_u (x_u - x_v)^2 >= sum_u w_vu (x_u -
//! x_v)^2`, so the smallest generalized eigenvalue of that quadratic is a
//! valid bound. Weights are taken from stationarity at the best valuation,
//! from mass-proportional weights, and refined by supergradient ascent. The
//! per-assignment minimum over `f` is also a valid bound and is kept too.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen, SVD};

use crate::embedding::Embedding1D;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::objective::lambda_numerator;
use crate::report::{SolveReport, Status, Witness};

/// Interval width below which the oracle reports an exact value.
pub const CERTIFY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub max_n: usize,
    /// Cap on the number of furthest-neighbor assignments, `prod_v deg(v)`.
    pub assignment_budget: u128,
    /// Cap on the number of tie structures; above it only local refinement
    /// from the best assignments is used.
    pub structure_budget: u128,
    pub ascent_iters: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { max_n: 10, assignment_budget: 1_000_000, structure_budget: 50_000, ascent_iters: 400 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LambdaInterval {
    pub lo: f64,
    pub hi: f64,
    /// Valuation attaining `hi`: pi-centered, largest edge difference 1.
    pub witness: Embedding1D,
}

impl LambdaInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_certified(&self) -> bool {
        self.width() <= CERTIFY_TOL
    }

    pub fn to_report(&self) -> SolveReport {
        let status = if self.is_certified() { Status::Exact } else { Status::Interval { lo: self.lo, hi: self.hi } };
        SolveReport::new(self.hi, Witness::Valuation(self.witness.x.clone()), status)
            .diag("lo", self.lo)
            .diag("hi", self.hi)
    }
}

pub fn oracle_small(g: &WeightedGraph, max_n: usize) -> Result<LambdaInterval> {
    oracle_with(g, OracleOptions { max_n, ..OracleOptions::default() })
}

/// Shared linear algebra for one graph.
struct Frame<'a> {
    g: &'a WeightedGraph,
    n: usize,
    pi: Vec<f64>,
    /// Orthonormal basis of `{x : pi^T x = 0}`, one column per direction.
    p: DMatrix<f64>,
    /// Cholesky factor of `P^T diag(pi) P`.
    l: DMatrix<f64>,
}

impl<'a> Frame<'a> {
    fn new(g: &'a WeightedGraph) -> Result<Self> {
        let n = g.n();
        let pi = g.pi().to_vec();
        let c = DMatrix::from_row_slice(1, n, &pi);
        let p = null_space(&c);
        let m = p.transpose() * DMatrix::from_diagonal(&DVector::from_vec(pi.clone())) * &p;
        let l = Cholesky::new(m).ok_or_else(|| Error::InsufficientAccuracy("variance form not definite".into()))?.l();
        Ok(Frame { g, n, pi, p, l })
    }

    /// Smallest eigenpair of `A` relative to the variance form, in the
    /// reduced coordinates of `P`. Returns `(mu, x)` with `x` in vertex space.
    fn min_eig(&self, a: &DMatrix<f64>) -> (f64, DVector<f64>) {
        let (mu, z) = reduced_min_eig(a, &self.l);
        let t = self.l.tr_solve_lower_triangular(&z).expect("non-singular factor");
        (mu, &self.p * t)
    }

    /// Reduced quadratic `P^T (sum_v pi_v sum_u w_vu e_uv e_uv^T) P`.
    fn reduced_form(&self, terms: &[(usize, usize, f64)]) -> DMatrix<f64> {
        let k = self.p.ncols();
        let mut a = DMatrix::zeros(k, k);
        for &(v, u, coef) in terms {
            if coef == 0.0 {
                continue;
            }
            let diff = self.p.row(u) - self.p.row(v);
            a += coef * diff.transpose() * diff;
        }
        a
    }

    fn true_objective(&self, x: &[f64]) -> Option<f64> {
        let var = variance_of(x, &self.pi);
        if var <= 1e-14 * x.iter().map(|v| v * v).sum::<f64>().max(1e-300) {
            return None;
        }
        Some(lambda_numerator(x, self.g) / var)
    }
}

fn variance_of(x: &[f64], pi: &[f64]) -> f64 {
    let mean: f64 = x.iter().zip(pi).map(|(a, b)| a * b).sum();
    x.iter().zip(pi).map(|(a, b)| b * (a - mean).powi(2)).sum()
}

/// Eigenpairs of `L^{-1} A L^{-T}`, ascending.
fn reduced_eigs(a: &DMatrix<f64>, l: &DMatrix<f64>) -> Vec<(f64, DVector<f64>)> {
    let y = l.solve_lower_triangular(a).expect("non-singular factor");
    let c = l.solve_lower_triangular(&y.transpose()).expect("non-singular factor");
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut out: Vec<(f64, DVector<f64>)> =
        eig.eigenvalues.iter().enumerate().map(|(i, &mu)| (mu, eig.eigenvectors.column(i).into_owned())).collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn reduced_min_eig(a: &DMatrix<f64>, l: &DMatrix<f64>) -> (f64, DVector<f64>) {
    reduced_eigs(a, l).into_iter().next().expect("non-empty reduced space")
}

/// Orthonormal basis of the null space of `c` (rows are constraints).
fn null_space(c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.ncols();
    let gram = c.transpose() * c;
    let eig = SymmetricEigen::new(gram);
    let scale = eig.eigenvalues.iter().cloned().fold(1.0f64, f64::max);
    let cols: Vec<DVector<f64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= 1e-10 * scale)
        .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    DMatrix::from_columns(&cols)
}

/// One vertex's share of a tie structure: reference neighbor `r`, and the
/// other active neighbors with the sign of `x_u - x_v` relative to
/// `x_r - x_v`.
#[derive(Debug, Clone)]
struct Tie {
    r: usize,
    rest: Vec<(usize, f64)>,
}

fn tie_options(nbrs: &[usize]) -> Vec<Tie> {
    let d = nbrs.len();
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << d) {
        let members: Vec<usize> = (0..d).filter(|&j| mask >> j & 1 == 1).map(|j| nbrs[j]).collect();
        let r = members[0];
        let rest = &members[1..];
        for signs in 0u32..(1u32 << rest.len()) {
            out.push(Tie {
                r,
                rest: rest.iter().enumerate().map(|(j, &u)| (u, if signs >> j & 1 == 1 { -1.0 } else { 1.0 })).collect(),
            });
        }
    }
    out
}

fn structure_count(g: &WeightedGraph) -> u128 {
    (0..g.n()).fold(1u128, |acc, v| {
        let d = g.degree(v) as u32;
        acc.saturating_mul(3u128.checked_pow(d).map_or(u128::MAX, |p| (p - 1) / 2))
    })
}

fn assignment_count(g: &WeightedGraph) -> u128 {
    (0..g.n()).fold(1u128, |acc, v| acc.saturating_mul(g.degree(v) as u128))
}

/// Stationary valuations of the surrogate for a full tie structure, sorted
/// by eigenvalue; empty if the structure leaves no non-constant valuation.
fn structure_spectrum(frame: &Frame, ties: &[&Tie]) -> Vec<DVector<f64>> {
    let n = frame.n;
    let mut rows: Vec<DVector<f64>> = vec![DVector::from_vec(frame.pi.clone())];
    for (v, tie) in ties.iter().enumerate() {
        for &(u, s) in &tie.rest {
            let mut row = DVector::zeros(n);
            row[u] += 1.0;
            row[v] -= 1.0;
            row[tie.r] -= s;
            row[v] += s;
            rows.push(row);
        }
    }
    let c = DMatrix::from_rows(&rows.iter().map(|r| r.transpose()).collect::<Vec<_>>());
    let b = null_space(&c);
    if b.ncols() == 0 {
        return Vec::new();
    }
    let d = DMatrix::from_diagonal(&DVector::from_vec(frame.pi.clone()));
    let m = b.transpose() * d * &b;
    let Some(chol) = Cholesky::new(m) else { return Vec::new() };
    let l = chol.l();
    let k = b.ncols();
    let mut a = DMatrix::zeros(k, k);
    for (v, tie) in ties.iter().enumerate() {
        let diff = b.row(tie.r) - b.row(v);
        a += frame.pi[v] * diff.transpose() * diff;
    }
    reduced_eigs(&a, &l)
        .into_iter()
        .filter_map(|(_, z)| l.tr_solve_lower_triangular(&z).map(|t| &b * t))
        .collect()
}

/// Active sets of `x`: neighbors within relative `tol` of the largest
/// squared difference.
fn active_sets(g: &WeightedGraph, x: &[f64], tol: f64) -> Vec<Vec<usize>> {
    (0..g.n())
        .map(|v| {
            let best = g.neighbors(v).iter().map(|&u| (x[u] - x[v]).powi(2)).fold(0.0, f64::max);
            g.neighbors(v).iter().copied().filter(|&u| (x[u] - x[v]).powi(2) >= best * (1.0 - tol) - 1e-15).collect()
        })
        .collect()
}

fn ties_at(g: &WeightedGraph, x: &[f64], tol: f64) -> Vec<Tie> {
    active_sets(g, x, tol)
        .into_iter()
        .enumerate()
        .map(|(v, act)| {
            let r = act[0];
            let base = x[r] - x[v];
            let rest = act[1..]
                .iter()
                .map(|&u| (u, if (x[u] - x[v]) * base < 0.0 { -1.0 } else { 1.0 }))
                .collect();
            Tie { r, rest }
        })
        .collect()
}

struct Best {
    value: f64,
    x: Vec<f64>,
}

impl Best {
    fn offer(&mut self, frame: &Frame, x: &DVector<f64>) {
        let xs: Vec<f64> = x.iter().copied().collect();
        if let Some(v) = frame.true_objective(&xs) {
            if v < self.value {
                self.value = v;
                self.x = xs;
            }
        }
    }
}

pub fn oracle_with(g: &WeightedGraph, opts: OracleOptions) -> Result<LambdaInterval> {
    let n = g.n();
    if n > opts.max_n {
        return Err(Error::BudgetExceeded { what: "oracle vertex count", needed: n as u128, budget: opts.max_n as u128 });
    }
    if n < 2 {
        return Err(Error::InvalidGraph("lambda-infinity needs at least two vertices".into()));
    }
    if g.has_zero_mass() {
        return Err(Error::InvalidArgument("the oracle requires positive masses".into()));
    }
    let assignments = assignment_count(g);
    if assignments > opts.assignment_budget {
        return Err(Error::BudgetExceeded { what: "furthest-neighbor assignments", needed: assignments, budget: opts.assignment_budget });
    }
    let frame = Frame::new(g)?;
    let mut best = Best { value: f64::INFINITY, x: vec![0.0; n] };

    // Per-assignment surrogates.
    let mut lo_assign = f64::INFINITY;
    let mut scored: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut f = vec![0usize; n];
    loop {
        let terms: Vec<(usize, usize, f64)> = (0..n).map(|v| (v, g.neighbors(v)[f[v]], frame.pi[v])).collect();
        let a = frame.reduced_form(&terms);
        let (mu, x) = frame.min_eig(&a);
        lo_assign = lo_assign.min(mu);
        let xs: Vec<f64> = x.iter().copied().collect();
        if let Some(v) = frame.true_objective(&xs) {
            scored.push((v, xs.clone()));
        }
        best.offer(&frame, &x);
        // Mixed-radix increment.
        let mut v = 0;
        while v < n {
            f[v] += 1;
            if f[v] < g.degree(v) {
                break;
            }
            f[v] = 0;
            v += 1;
        }
        if v == n {
            break;
        }
    }

    let structures = structure_count(g);
    let exhaustive = structures <= opts.structure_budget;
    if exhaustive {
        let options: Vec<Vec<Tie>> = (0..n).map(|v| tie_options(g.neighbors(v))).collect();
        let mut idx = vec![0usize; n];
        loop {
            let ties: Vec<&Tie> = (0..n).map(|v| &options[v][idx[v]]).collect();
            for x in structure_spectrum(&frame, &ties) {
                best.offer(&frame, &x);
            }
            let mut v = 0;
            while v < n {
                idx[v] += 1;
                if idx[v] < options[v].len() {
                    break;
                }
                idx[v] = 0;
                v += 1;
            }
            if v == n {
                break;
            }
        }
    } else {
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        scored.truncate(32);
        for (_, start) in scored {
            let mut x = start;
            for _ in 0..32 {
                let ties = ties_at(g, &x, 1e-6);
                let refs: Vec<&Tie> = ties.iter().collect();
                let Some(next) = structure_spectrum(&frame, &refs).into_iter().next() else { break };
                let nx: Vec<f64> = next.iter().copied().collect();
                let (Some(old), Some(new)) = (frame.true_objective(&x), frame.true_objective(&nx)) else { break };
                best.offer(&frame, &next);
                if new >= old - 1e-13 * old {
                    break;
                }
                x = nx;
            }
        }
    }
    if !best.value.is_finite() {
        return Err(Error::DegenerateValuation);
    }
    let hi = best.value;
    let x_hi = normalize(&best.x, g);

    // Exhaustive enumeration scores every stationary point, so `hi` is exact.
    let mut lo = if exhaustive { hi.max(lo_assign) } else { lo_assign.max(dual_bound(&frame, &x_hi, hi, opts.ascent_iters)) };
    if lo > hi {
        if lo - hi > 1e-9 * hi {
            return Err(Error::InsufficientAccuracy(format!("lower bound {lo} exceeds upper bound {hi}")));
        }
        lo = hi;
    }
    Ok(LambdaInterval { lo, hi, witness: Embedding1D::new(x_hi)? })
}

/// Centers at the pi-mean and scales the largest edge difference to 1.
fn normalize(x: &[f64], g: &WeightedGraph) -> Vec<f64> {
    let mean: f64 = x.iter().zip(g.pi()).map(|(a, b)| a * b).sum();
    let scale = g.edges().iter().map(|&(u, v)| (x[u] - x[v]).abs()).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    x.iter().map(|v| (v - mean) / scale).collect()
}

/// Neighbor weights: `weights[v][j]` belongs to `g.neighbors(v)[j]`.
type Weights = Vec<Vec<f64>>;

fn weighted_terms(frame: &Frame, w: &Weights) -> Vec<(usize, usize, f64)> {
    let mut terms = Vec::new();
    for v in 0..frame.n {
        for (j, &u) in frame.g.neighbors(v).iter().enumerate() {
            terms.push((v, u, frame.pi[v] * w[v][j]));
        }
    }
    terms
}

fn bound_for(frame: &Frame, w: &Weights) -> (f64, DVector<f64>) {
    frame.min_eig(&frame.reduced_form(&weighted_terms(frame, w)))
}

fn dual_bound(frame: &Frame, x: &[f64], lambda: f64, iters: usize) -> f64 {
    let g = frame.g;
    let mut starts: Vec<Weights> = Vec::new();
    starts.push(
        (0..frame.n)
            .map(|v| {
                let nb = g.neighbors(v);
                let total: f64 = nb.iter().map(|&u| frame.pi[u]).sum();
                nb.iter().map(|&u| frame.pi[u] / total).collect()
            })
            .collect(),
    );
    if let Some(w) = stationary_weights(frame, x, lambda) {
        starts.push(w);
    }
    let mut best = f64::NEG_INFINITY;
    let mut best_w = starts[0].clone();
    for w in &starts {
        let (mu, _) = bound_for(frame, w);
        if mu > best {
            best = mu;
            best_w = w.clone();
        }
    }
    if lambda - best <= CERTIFY_TOL * 0.1 * lambda.max(1.0) {
        return best;
    }
    // Projected supergradient ascent on the concave map w -> lambda_min.
    let mut w = best_w;
    let mut step = 0.5;
    for k in 0..iters {
        let (mu, xv) = bound_for(frame, &w);
        if mu > best {
            best = mu;
        }
        let mut grad: Weights = Vec::with_capacity(frame.n);
        let mut norm = 0.0;
        for v in 0..frame.n {
            let row: Vec<f64> = g.neighbors(v).iter().map(|&u| (xv[u] - xv[v]).powi(2)).collect();
            norm += row.iter().map(|r| r * r).sum::<f64>();
            grad.push(row);
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            break;
        }
        let t = step / ((k + 1) as f64).sqrt() / norm;
        for v in 0..frame.n {
            let moved: Vec<f64> = w[v].iter().zip(&grad[v]).map(|(a, b)| a + t * b).collect();
            w[v] = project_simplex(&moved);
        }
        if k % 100 == 99 {
            step *= 0.5;
        }
    }
    best
}

/// Weights satisfying stationarity `Q_w x = lambda D~ x` in the least-norm
/// sense on the active sets, clipped back to the simplex.
fn stationary_weights(frame: &Frame, x: &[f64], lambda: f64) -> Option<Weights> {
    let g = frame.g;
    let n = frame.n;
    let act = active_sets(g, x, 1e-7);
    let mut vars: Vec<(usize, usize)> = Vec::new();
    for (v, a) in act.iter().enumerate() {
        for &u in a {
            vars.push((v, u));
        }
    }
    let m = vars.len();
    let mean: f64 = x.iter().zip(&frame.pi).map(|(a, b)| a * b).sum();
    let mut mat = DMatrix::zeros(2 * n, m);
    let mut rhs = DVector::zeros(2 * n);
    for (col, &(v, u)) in vars.iter().enumerate() {
        let c = frame.pi[v] * (x[u] - x[v]);
        mat[(u, col)] += c;
        mat[(v, col)] -= c;
        mat[(n + v, col)] = 1.0;
    }
    for v in 0..n {
        rhs[v] = lambda * frame.pi[v] * (x[v] - mean);
        rhs[n + v] = 1.0;
    }
    let svd = SVD::<f64, Dyn, Dyn>::new(mat, true, true);
    let sol = svd.solve(&rhs, 1e-12).ok()?;
    let mut w: Weights = (0..n).map(|v| vec![0.0; g.degree(v)]).collect();
    for (col, &(v, u)) in vars.iter().enumerate() {
        let j = g.neighbors(v).iter().position(|&t| t == u).expect("neighbor");
        w[v][j] = sol[col].max(0.0);
    }
    for (v, row) in w.iter_mut().enumerate() {
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            row.iter_mut().for_each(|c| *c /= s);
        } else {
            let k = act[v].len() as f64;
            for &u in &act[v] {
                let j = g.neighbors(v).iter().position(|&t| t == u).expect("neighbor");
                row[j] = 1.0 / k;
            }
        }
    }
    Some(w)
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&c| (c - theta).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::graph::{path_edges, star_edges, GraphOptions, StarGraph};
    use crate::lambda::star::{almost_binary_violation, star_exact, star_is_tight, star_lower_bound};
    use crate::objective::lambda_objective;
    use crate::scalar::rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn star(p: &[(i64, i64)]) -> StarGraph {
        StarGraph::from_rational(p.iter().map(|&(a, b)| rational(a, b)).collect(), GraphOptions::default()).unwrap()
    }

    #[test]
    fn k2_is_four() {
        let g = WeightedGraph::uniform(2, &path_edges(2)).unwrap();
        let r = oracle_small(&g, 10).unwrap();
        assert!((r.lo - 4.0).abs() < 1e-9 && (r.hi - 4.0).abs() < 1e-9);
    }

    #[test]
    fn balanced_three_star() {
        let g = WeightedGraph::uniform(3, &star_edges(3)).unwrap();
        let r = oracle_small(&g, 10).unwrap();
        assert!(r.is_certified());
        assert!((r.hi - 1.5).abs() < 1e-9);
    }

    #[test]
    fn unbalanced_star_gap() {
        let s = star(&[(1, 2), (1, 6), (1, 6), (1, 6)]);
        let r = oracle_small(&s, 10).unwrap();
        assert!(r.hi - 2.0 >= 1.0 / 54.0);
        let exact = star_exact(&s).unwrap().value;
        assert!((r.hi - exact).abs() < 1e-9, "{} vs {}", r.hi, exact);
        assert!(r.is_certified() && r.lo <= exact + 1e-12);
    }

    #[test]
    fn rejects_zero_mass_and_large_graphs() {
        let s = StarGraph::from_rational(
            vec![rational(0, 1), rational(1, 2), rational(1, 2)],
            GraphOptions::allow_zero_mass(),
        )
        .unwrap();
        assert!(oracle_small(&s, 10).is_err());
        let g = WeightedGraph::uniform(12, &path_edges(12)).unwrap();
        assert!(matches!(oracle_small(&g, 10), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn random_stars_respect_lower_bound_and_binarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            let n = 3 + trial % 5;
            let s = gen::random_star(&mut rng, n, 6);
            let r = oracle_small(&s, 10).unwrap();
            let lb: f64 = star_lower_bound(&s).unwrap();
            assert!(r.lo >= lb - 1e-9, "lo {} < lb {lb}", r.lo);
            assert!(r.is_certified());
            let exact = star_exact(&s).unwrap().value;
            assert!((r.hi - exact).abs() <= 1e-9 * exact, "hi {} vs {exact}", r.hi);
            if star_is_tight(&s).unwrap() {
                assert!(r.is_certified() && (r.hi - lb).abs() <= 1e-7);
            } else {
                assert!(r.hi > lb + 1e-9);
            }
            assert!(almost_binary_violation(&r.witness, &s).unwrap() <= 1);
            assert!((lambda_objective(&r.witness, &s).unwrap() - r.hi).abs() <= 1e-9 * r.hi);
        }
    }

    #[test]
    fn small_graphs_give_valid_intervals() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let g = gen::random_connected_graph(&mut rng, 6, 2, 5);
            let r = oracle_small(&g, 10).unwrap();
            assert!(r.lo <= r.hi);
            assert!((lambda_objective(&r.witness, &g).unwrap() - r.hi).abs() <= 1e-9 * r.hi);
            for _ in 0..300 {
                let x: Vec<f64> = (0..g.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let Ok(e) = Embedding1D::new(x) else { continue };
                if let Ok(v) = lambda_objective(&e, &g) {
                    assert!(v >= r.lo * (1.0 - 1e-9), "sample {v} below lo {}", r.lo);
                }
            }
        }
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.9, -1.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&c| c >= 0.0));
        assert_eq!(project_simplex(&[0.25, 0.75]), vec![0.25, 0.75]);
    }
}
