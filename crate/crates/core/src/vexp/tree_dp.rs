//! Vertex expansion of a tree with uniform masses.
//!
//! State per vertex: its side, its parent's side (or none at the root), and
//! the set of reachable `(vertices on side A, boundary vertices)` pairs in
//! its subtree. Children are merged one at a time; the merged tables are
//! kept so a witness cut can be read back.

use crate::error::{Error, Result};
use crate::graph::TreeGraph;
use crate::report::{SolveReport, Witness};
use crate::scalar::Rational;
use crate::vexp::brute::normalize;

const NONE: usize = 2;

/// Boolean table over `(flag, a, b)` with `a, b <= size`.
#[derive(Clone)]
struct Table {
    size: usize,
    flags: usize,
    bits: Vec<bool>,
}

impl Table {
    fn new(size: usize, flags: usize) -> Self {
        Table { size, flags, bits: vec![false; flags * (size + 1) * (size + 1)] }
    }
    fn idx(&self, f: usize, a: usize, b: usize) -> usize {
        (f * (self.size + 1) + a) * (self.size + 1) + b
    }
    fn get(&self, f: usize, a: usize, b: usize) -> bool {
        f < self.flags && a <= self.size && b <= self.size && self.bits[self.idx(f, a, b)]
    }
    fn set(&mut self, f: usize, a: usize, b: usize) {
        let i = self.idx(f, a, b);
        self.bits[i] = true;
    }
    fn entries(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let s = self.size + 1;
        self.bits.iter().enumerate().filter(|(_, &on)| on).map(move |(i, _)| (i / (s * s), (i / s) % s, i % s))
    }
}

struct Dp<'a> {
    t: &'a TreeGraph,
    /// `final_[v][lv][lp]`: pairs for the subtree of `v` (single flag).
    final_: Vec<[[Table; 3]; 2]>,
    /// `prefix[v][lv][j]`: children `0..j` merged; flag = some child differs.
    prefix: Vec<[Vec<Table>; 2]>,
}

impl<'a> Dp<'a> {
    fn build(t: &'a TreeGraph) -> Self {
        let n = t.n();
        let empty = || Table::new(0, 1);
        let mut final_: Vec<[[Table; 3]; 2]> = (0..n).map(|_| std::array::from_fn(|_| std::array::from_fn(|_| empty()))).collect();
        let mut prefix: Vec<[Vec<Table>; 2]> = (0..n).map(|_| [Vec::new(), Vec::new()]).collect();
        let mut size = vec![1usize; n];

        for &v in t.preorder().iter().rev() {
            for lv in 0..2 {
                let mut acc = Table::new(0, 2);
                acc.set(0, 0, 0);
                let mut tables = vec![acc.clone()];
                let mut s = 0;
                for &c in t.children(v) {
                    let sc = size[c];
                    let mut next = Table::new(s + sc, 2);
                    for (f, a, b) in acc.entries() {
                        for lc in 0..2 {
                            let nf = f | usize::from(lc != lv);
                            for (_, ac, bc) in final_[c][lc][lv].entries() {
                                next.set(nf, a + ac, b + bc);
                            }
                        }
                    }
                    s += sc;
                    acc = next;
                    tables.push(acc.clone());
                }
                for lp in 0..3 {
                    let mut out = Table::new(s + 1, 1);
                    for (f, a, b) in acc.entries() {
                        let bd = f == 1 || (lp != NONE && lp != lv);
                        out.set(0, a + usize::from(lv == 0), b + usize::from(bd));
                    }
                    final_[v][lv][lp] = out;
                }
                prefix[v][lv] = tables;
            }
            size[v] = 1 + t.children(v).iter().map(|&c| size[c]).sum::<usize>();
        }
        Dp { t, final_, prefix }
    }

    /// Labels the subtree of `v` to realize `(a, b)`.
    fn assign(&self, v: usize, lv: usize, lp: usize, a: usize, b: usize, labels: &mut [usize]) {
        labels[v] = lv;
        let tables = &self.prefix[v][lv];
        let last = tables.last().expect("at least the empty prefix");
        let a0 = a - usize::from(lv == 0);
        let forced = lp != NONE && lp != lv;
        let (mut f, mut bb) = if forced {
            if last.get(0, a0, b - 1) {
                (0, b - 1)
            } else {
                (1, b - 1)
            }
        } else if b >= 1 && last.get(1, a0, b - 1) {
            (1, b - 1)
        } else {
            (0, b)
        };
        let mut aa = a0;
        debug_assert!(last.get(f, aa, bb));
        let children = self.t.children(v);
        for j in (0..children.len()).rev() {
            let c = children[j];
            let prev = &tables[j];
            let mut found = None;
            'search: for lc in 0..2 {
                let differs = lc != lv;
                if differs && f == 0 {
                    continue;
                }
                let prev_flags: &[usize] = if differs { &[0, 1] } else { std::slice::from_ref(&f) };
                for (_, ac, bc) in self.final_[c][lc][lv].entries() {
                    if ac > aa || bc > bb {
                        continue;
                    }
                    for &pf in prev_flags {
                        if prev.get(pf, aa - ac, bb - bc) {
                            found = Some((lc, ac, bc, pf));
                            break 'search;
                        }
                    }
                }
            }
            let (lc, ac, bc, pf) = found.expect("table entry has a predecessor");
            self.assign(c, lc, lv, ac, bc, labels);
            aa -= ac;
            bb -= bc;
            f = pf;
        }
    }
}

/// Exact vertex expansion of a tree with uniform masses.
pub fn vexp_tree_uniform(t: &TreeGraph) -> Result<SolveReport> {
    if !t.is_uniform() {
        return Err(Error::NotUniform("tree DP needs equal vertex masses".into()));
    }
    let n = t.n();
    if n < 2 {
        return Err(Error::InvalidArgument("vertex expansion needs at least two vertices".into()));
    }
    let dp = Dp::build(t);
    let root = t.root();
    // Best (boundary, min side, root label, a).
    let mut best: Option<(usize, usize, usize, usize)> = None;
    for lv in 0..2 {
        for (_, a, b) in dp.final_[root][lv][NONE].entries() {
            if a == 0 || a == n {
                continue;
            }
            let m = a.min(n - a);
            let better = match best {
                None => true,
                Some((bb, bm, ..)) => b * bm < bb * m,
            };
            if better {
                best = Some((b, m, lv, a));
            }
        }
    }
    let (b, m, lv, a) = best.expect("n >= 2 has a proper cut");
    let mut labels = vec![0; n];
    dp.assign(root, lv, NONE, a, b, &mut labels);
    let set: Vec<usize> = (0..n).filter(|&v| labels[v] == 0).collect();
    let value = Rational::new(b.into(), m.into());
    Ok(SolveReport::exact(value, Witness::VertexSet(normalize(set, n))).diag("boundary", b).diag("min_side", m))
}
