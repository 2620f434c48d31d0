//! Primal network simplex for the transportation problem with cost
//! `|z_i - w_j|²`.
//!
//! The spanning-tree bookkeeping (parent, thread, subtree sizes, last
//! successors) follows the classical LEMON layout. The initial tree is the
//! northwest-corner staircase rooted at the first source, built so that every
//! zero-flow tree arc points away from the root; together with the
//! last-blocking-arc leaving rule the tree stays strongly feasible, which
//! rules out cycling for both pivot rules.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{QotError, Result};

use super::measure::DiscreteMeasure;

const UP: i8 = 1;
const DOWN: i8 = -1;
const TREE: i8 = 0;
const LOWER: i8 = 1;
const NONE: usize = usize::MAX;

/// Entering-arc selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotRule {
    /// Most negative reduced cost within blocks of `~√(arcs)` arcs.
    #[default]
    BlockSearch,
    /// Lowest-index arc with negative reduced cost.
    Bland,
}

/// Sparse optimal plan: `(source, target, mass)` for every positive mass.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassicalPlan {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl ClassicalPlan {
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.cols]; self.rows];
        for &(i, j, m) in &self.entries {
            out[i][j] += m;
        }
        out
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.rows];
        for &(i, _, m) in &self.entries {
            s[i] += m;
        }
        s
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.cols];
        for &(_, j, m) in &self.entries {
            s[j] += m;
        }
        s
    }

    /// Largest marginal deviation from the given weights.
    pub fn feasibility_error(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        let r = self.row_sums().iter().zip(mu.weights()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let c = self.col_sums().iter().zip(nu.weights()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        r.max(c)
    }

    pub fn cost(&self, mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
        self.entries
            .iter()
            .map(|&(i, j, m)| m * (mu.points()[i] - nu.points()[j]).norm_sqr())
            .sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct W2Result {
    pub value: f64,
    pub plan: ClassicalPlan,
    pub pivots: usize,
}

/// Exact `W₂²(μ, ν)` with the default pivot rule.
pub fn w2_discrete(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> Result<W2Result> {
    w2_discrete_with(mu, nu, PivotRule::BlockSearch)
}

pub fn w2_discrete_with(mu: &DiscreteMeasure, nu: &DiscreteMeasure, rule: PivotRule) -> Result<W2Result> {
    if mu.is_empty() || nu.is_empty() {
        return Err(QotError::InvalidInput("empty measure".into()));
    }
    let mut ns = NetworkSimplex::new(mu.points(), mu.weights(), nu.points(), nu.weights());
    ns.run(rule)?;
    let plan = ns.plan();
    let value = plan.cost(mu, nu);
    Ok(W2Result {
        value,
        plan,
        pivots: ns.pivots,
    })
}

struct NetworkSimplex<'a> {
    src: &'a [C64],
    dst: &'a [C64],
    n: usize,
    m: usize,
    flow: Vec<f64>,
    state: Vec<i8>,
    pi: Vec<f64>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    pred_dir: Vec<i8>,
    thread: Vec<usize>,
    rev_thread: Vec<usize>,
    succ_num: Vec<usize>,
    last_succ: Vec<usize>,
    dirty_revs: Vec<usize>,
    root: usize,
    eps: f64,
    pivots: usize,
    // pivot scratch
    in_arc: usize,
    join: usize,
    u_in: usize,
    v_in: usize,
    u_out: usize,
    delta: f64,
}

impl<'a> NetworkSimplex<'a> {
    fn new(src: &'a [C64], a: &[f64], dst: &'a [C64], b: &[f64]) -> Self {
        let (n, m) = (src.len(), dst.len());
        let nodes = n + m;
        let arcs = n * m;
        let mut ns = Self {
            src,
            dst,
            n,
            m,
            flow: vec![0.0; arcs],
            state: vec![LOWER; arcs],
            pi: vec![0.0; nodes],
            parent: vec![NONE; nodes],
            pred: vec![NONE; nodes],
            pred_dir: vec![0; nodes],
            thread: vec![0; nodes],
            rev_thread: vec![0; nodes],
            succ_num: vec![1; nodes],
            last_succ: vec![0; nodes],
            dirty_revs: Vec::new(),
            root: 0,
            eps: 0.0,
            pivots: 0,
            in_arc: 0,
            join: 0,
            u_in: 0,
            v_in: 0,
            u_out: 0,
            delta: 0.0,
        };
        let max_cost = ns.max_cost();
        ns.eps = 1e-13 * max_cost.max(1.0);
        ns.northwest_corner(a, b);
        ns
    }

    fn max_cost(&self) -> f64 {
        let mut lo = C64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for z in self.src.iter().chain(self.dst) {
            lo = C64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = C64::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        (hi - lo).norm_sqr()
    }

    #[inline]
    fn source(&self, e: usize) -> usize {
        e / self.m
    }

    #[inline]
    fn target(&self, e: usize) -> usize {
        self.n + e % self.m
    }

    #[inline]
    fn cost(&self, e: usize) -> f64 {
        (self.src[e / self.m] - self.dst[e % self.m]).norm_sqr()
    }

    #[inline]
    fn reduced(&self, e: usize) -> f64 {
        self.state[e] as f64 * (self.cost(e) + self.pi[self.source(e)] - self.pi[self.target(e)])
    }

    /// Staircase tree; on a tie the column advances first so that the
    /// zero-flow arc hangs below its source.
    fn northwest_corner(&mut self, a: &[f64], b: &[f64]) {
        let (n, m) = (self.n, self.m);
        let nodes = n + m;
        let mut tree_arcs = Vec::with_capacity(nodes - 1);
        let (mut i, mut j) = (0usize, 0usize);
        let mut ra = a[0];
        let mut rb = b[0];
        loop {
            let x = ra.min(rb);
            self.flow[i * m + j] = x;
            self.state[i * m + j] = TREE;
            tree_arcs.push(i * m + j);
            ra -= x;
            rb -= x;
            let col_done = rb <= ra;
            if (col_done || i + 1 == n) && j + 1 < m {
                j += 1;
                rb = b[j];
            } else if i + 1 < n {
                i += 1;
                ra = a[i];
            } else {
                break;
            }
        }
        debug_assert_eq!(tree_arcs.len(), nodes - 1);

        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
        for &e in &tree_arcs {
            adj[self.source(e)].push(e);
            adj[self.target(e)].push(e);
        }
        // iterative DFS for preorder, parents and subtree sizes
        self.root = 0;
        let mut order = Vec::with_capacity(nodes);
        let mut stack = vec![0usize];
        self.parent[0] = NONE;
        while let Some(u) = stack.pop() {
            order.push(u);
            for &e in adj[u].iter().rev() {
                let v = if self.source(e) == u { self.target(e) } else { self.source(e) };
                if v == self.parent[u] && self.pred[u] == e {
                    continue;
                }
                self.parent[v] = u;
                self.pred[v] = e;
                self.pred_dir[v] = if self.source(e) == v { UP } else { DOWN };
                stack.push(v);
            }
        }
        debug_assert_eq!(order.len(), nodes);
        for k in 0..nodes {
            let (u, next) = (order[k], order[(k + 1) % nodes]);
            self.thread[u] = next;
            self.rev_thread[next] = u;
        }
        for &u in order.iter().rev() {
            self.succ_num[u] = 1;
            self.last_succ[u] = u;
        }
        for &u in order.iter().rev() {
            let p = self.parent[u];
            if p != NONE {
                self.succ_num[p] += self.succ_num[u];
            }
        }
        // last successor: the preorder position of u plus its subtree size, minus one
        let mut pos = vec![0usize; nodes];
        for (k, &u) in order.iter().enumerate() {
            pos[u] = k;
        }
        for &u in &order {
            self.last_succ[u] = order[pos[u] + self.succ_num[u] - 1];
        }
        self.recompute_potentials();
    }

    fn recompute_potentials(&mut self) {
        let mut u = self.root;
        self.pi[u] = 0.0;
        loop {
            u = self.thread[u];
            if u == self.root {
                break;
            }
            let e = self.pred[u];
            let p = self.parent[u];
            // tree arcs have zero reduced cost: pi[target] = pi[source] + c
            self.pi[u] = if self.pred_dir[u] == UP {
                self.pi[p] - self.cost(e)
            } else {
                self.pi[p] + self.cost(e)
            };
        }
    }

    fn run(&mut self, rule: PivotRule) -> Result<()> {
        let arcs = self.n * self.m;
        let block = ((arcs as f64).sqrt().ceil() as usize).max(10).min(arcs.max(1));
        let mut next = 0usize;
        let limit = 50 * arcs + 1000;
        loop {
            let found = match rule {
                PivotRule::BlockSearch => self.block_search(block, &mut next),
                PivotRule::Bland => self.bland_search(),
            };
            if !found {
                break;
            }
            self.find_join();
            let change = self.find_leaving();
            self.change_flow(change);
            if change {
                self.update_tree();
                self.update_potential();
            }
            self.pivots += 1;
            if self.pivots % 256 == 0 {
                self.recompute_potentials();
            }
            if self.pivots > limit {
                return Err(QotError::NonConvergence {
                    iterations: self.pivots,
                    primal: 0.0,
                    dual: 0.0,
                });
            }
        }
        Ok(())
    }

    fn block_search(&mut self, block: usize, next: &mut usize) -> bool {
        let arcs = self.n * self.m;
        let mut min = -self.eps;
        let mut best = NONE;
        let mut cnt = block;
        let mut e = *next;
        for _ in 0..arcs {
            let c = self.reduced(e);
            if c < min {
                min = c;
                best = e;
            }
            e += 1;
            if e == arcs {
                e = 0;
            }
            cnt -= 1;
            if cnt == 0 {
                if best != NONE {
                    break;
                }
                cnt = block;
            }
        }
        if best == NONE {
            return false;
        }
        *next = e;
        self.in_arc = best;
        true
    }

    fn bland_search(&mut self) -> bool {
        for e in 0..self.n * self.m {
            if self.reduced(e) < -self.eps {
                self.in_arc = e;
                return true;
            }
        }
        false
    }

    fn find_join(&mut self) {
        let mut u = self.source(self.in_arc);
        let mut v = self.target(self.in_arc);
        while u != v {
            if self.succ_num[u] < self.succ_num[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        self.join = u;
    }

    /// Last blocking arc in cycle orientation; false when the entering arc
    /// itself is the bottleneck (never happens for uncapacitated arcs).
    fn find_leaving(&mut self) -> bool {
        let first = self.source(self.in_arc);
        let second = self.target(self.in_arc);
        self.delta = f64::INFINITY;
        let mut result = 0;
        let mut u = first;
        while u != self.join {
            if self.pred_dir[u] == UP {
                let d = self.flow[self.pred[u]];
                if d < self.delta {
                    self.delta = d;
                    self.u_out = u;
                    result = 1;
                }
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != self.join {
            if self.pred_dir[u] == DOWN {
                let d = self.flow[self.pred[u]];
                if d <= self.delta {
                    self.delta = d;
                    self.u_out = u;
                    result = 2;
                }
            }
            u = self.parent[u];
        }
        if result == 1 {
            self.u_in = first;
            self.v_in = second;
        } else {
            self.u_in = second;
            self.v_in = first;
        }
        result != 0
    }

    fn change_flow(&mut self, change: bool) {
        if self.delta > 0.0 {
            let val = self.delta;
            self.flow[self.in_arc] += val;
            let mut u = self.source(self.in_arc);
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] -= self.pred_dir[u] as f64 * val;
                u = self.parent[u];
            }
            let mut u = self.target(self.in_arc);
            while u != self.join {
                let e = self.pred[u];
                self.flow[e] += self.pred_dir[u] as f64 * val;
                u = self.parent[u];
            }
        }
        if change {
            self.state[self.in_arc] = TREE;
            let out = self.pred[self.u_out];
            self.flow[out] = 0.0;
            self.state[out] = LOWER;
        }
    }

    fn update_tree(&mut self) {
        let (u_in, v_in, u_out, join, in_arc) = (self.u_in, self.v_in, self.u_out, self.join, self.in_arc);
        let old_rev_thread = self.rev_thread[u_out];
        let old_succ_num = self.succ_num[u_out];
        let old_last_succ = self.last_succ[u_out];
        let v_out = self.parent[u_out];

        if u_in == u_out {
            self.parent[u_in] = v_in;
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = if u_in == self.source(in_arc) { UP } else { DOWN };
            if self.thread[v_in] != u_out {
                let mut after = self.thread[old_last_succ];
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
                after = self.thread[v_in];
                self.thread[v_in] = u_out;
                self.rev_thread[u_out] = v_in;
                self.thread[old_last_succ] = after;
                self.rev_thread[after] = old_last_succ;
            }
        } else {
            let thread_continue = if old_rev_thread == v_in {
                self.thread[old_last_succ]
            } else {
                self.thread[v_in]
            };
            let mut stem = u_in;
            let mut par_stem = v_in;
            let mut last = self.last_succ[u_in];
            let mut after = self.thread[last];
            self.thread[v_in] = u_in;
            self.dirty_revs.clear();
            self.dirty_revs.push(v_in);
            while stem != u_out {
                let next_stem = self.parent[stem];
                self.thread[last] = next_stem;
                self.dirty_revs.push(last);

                let before = self.rev_thread[stem];
                self.thread[before] = after;
                self.rev_thread[after] = before;

                self.parent[stem] = par_stem;
                par_stem = stem;
                stem = next_stem;

                last = if self.last_succ[stem] == self.last_succ[par_stem] {
                    self.rev_thread[par_stem]
                } else {
                    self.last_succ[stem]
                };
                after = self.thread[last];
            }
            self.parent[u_out] = par_stem;
            self.thread[last] = thread_continue;
            self.rev_thread[thread_continue] = last;
            self.last_succ[u_out] = last;

            if old_rev_thread != v_in {
                self.thread[old_rev_thread] = after;
                self.rev_thread[after] = old_rev_thread;
            }

            for k in 0..self.dirty_revs.len() {
                let u = self.dirty_revs[k];
                let t = self.thread[u];
                self.rev_thread[t] = u;
            }

            let mut tmp_sc = 0usize;
            let tmp_ls = self.last_succ[u_out];
            let mut u = u_out;
            while u != u_in {
                let p = self.parent[u];
                self.pred[u] = self.pred[p];
                self.pred_dir[u] = -self.pred_dir[p];
                tmp_sc += self.succ_num[u] - self.succ_num[p];
                self.succ_num[u] = tmp_sc;
                self.last_succ[p] = tmp_ls;
                u = p;
            }
            self.pred[u_in] = in_arc;
            self.pred_dir[u_in] = if u_in == self.source(in_arc) { UP } else { DOWN };
            self.succ_num[u_in] = old_succ_num;
        }

        let up_limit_out = if self.last_succ[join] == v_in { join } else { NONE };
        let last_succ_out = self.last_succ[u_out];
        let mut u = v_in;
        while u != NONE && self.last_succ[u] == v_in {
            self.last_succ[u] = last_succ_out;
            u = self.parent[u];
        }

        if join != old_rev_thread && v_in != old_rev_thread {
            let mut u = v_out;
            while u != up_limit_out && u != NONE && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = old_rev_thread;
                u = self.parent[u];
            }
        } else if last_succ_out != old_last_succ {
            let mut u = v_out;
            while u != up_limit_out && u != NONE && self.last_succ[u] == old_last_succ {
                self.last_succ[u] = last_succ_out;
                u = self.parent[u];
            }
        }

        let mut u = v_in;
        while u != join {
            self.succ_num[u] += old_succ_num;
            u = self.parent[u];
        }
        let mut u = v_out;
        while u != join {
            self.succ_num[u] -= old_succ_num;
            u = self.parent[u];
        }
    }

    fn update_potential(&mut self) {
        let (u_in, v_in) = (self.u_in, self.v_in);
        let sigma = self.pi[v_in] - self.pi[u_in] - self.pred_dir[u_in] as f64 * self.cost(self.in_arc);
        let end = self.thread[self.last_succ[u_in]];
        let mut u = u_in;
        while u != end {
            self.pi[u] += sigma;
            u = self.thread[u];
        }
    }

    fn plan(&self) -> ClassicalPlan {
        let mut entries = Vec::with_capacity(self.n + self.m);
        for u in 0..self.n + self.m {
            let e = self.pred[u];
            if e != NONE && self.flow[e] > 0.0 {
                entries.push((self.source(e), e % self.m, self.flow[e]));
            }
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        ClassicalPlan {
            rows: self.n,
            cols: self.m,
            entries,
        }
    }
}
