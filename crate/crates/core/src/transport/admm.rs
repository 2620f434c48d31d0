//! ADMM for the coupling program
//!
//! ```text
//! minimize Tr[C Π]  subject to  Π ⪰ 0,  Tr_{H*} Π = σ,  Tr_H Π = ρᵀ.
//! ```
//!
//! Two exact reductions run before the iteration. Any feasible `Π` lives on
//! `supp σ ⊗ supp ρᵀ`, so rank-deficient marginals shrink the problem to
//! their supports. Then the composite indices are split into blocks that the
//! cost and both marginal maps never connect; every iterate stays block
//! diagonal and the PSD projection runs block by block.

use std::path::PathBuf;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{QotError, Result};
use crate::linalg::{hermitian_eig, kron, ComplexMatrix, UnionFind};
use crate::states::{Coupling, DensityMatrix, MarginalError};

use super::cost::{coupling_cost, CostOperator};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ADMMConfig {
    pub penalty: f64,
    pub tol_primal: f64,
    pub tol_dual: f64,
    pub max_iter: usize,
    pub adaptive: bool,
    /// Residual ratio that triggers a penalty change.
    pub adapt_ratio: f64,
    /// Multiplicative penalty change.
    pub adapt_factor: f64,
    /// Restrict to the marginal supports when they are rank deficient.
    pub reduce_support: bool,
    /// Eigenvalues below `support_tol · λ_max` count as outside the support;
    /// the kept spectrum is renormalized.
    pub support_tol: f64,
    /// Exploit the block structure of cost and marginals.
    pub use_blocks: bool,
    /// Over-relaxation `α` in `(0, 2)`; `1` is the plain iteration.
    pub relaxation: f64,
    /// Anderson acceleration memory on the fixed-point map; `0` disables it
    /// and `relaxation` then applies.
    pub anderson: usize,
    /// Iterations between penalty updates.
    pub adapt_interval: usize,
    /// Optional CSV iteration log.
    pub log_path: Option<PathBuf>,
}

impl Default for ADMMConfig {
    fn default() -> Self {
        Self {
            penalty: 1.0,
            tol_primal: 1e-7,
            tol_dual: 1e-7,
            max_iter: 50_000,
            adaptive: true,
            adapt_ratio: 10.0,
            adapt_factor: 2.0,
            reduce_support: true,
            support_tol: 1e-12,
            use_blocks: true,
            relaxation: 1.0,
            anderson: 0,
            adapt_interval: 1,
            log_path: None,
        }
    }
}

impl ADMMConfig {
    /// Anderson memory 20, penalty updates every 50 iterations and a support
    /// cutoff at `1e-6 λ_max`. Much faster on small unstructured instances and
    /// on mixtures of coherent states, whose spectra decay geometrically.
    pub fn accelerated() -> Self {
        Self {
            anderson: 20,
            adapt_interval: 50,
            support_tol: 1e-6,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.penalty, self.tol_primal, self.tol_dual, self.adapt_ratio];
        if positive.iter().any(|&x| !(x > 0.0) || !x.is_finite()) || self.max_iter == 0 || !(self.support_tol >= 0.0 && self.support_tol < 1.0) || self.adapt_interval == 0 || !(self.relaxation > 0.0 && self.relaxation < 2.0) || !(self.adapt_factor > 1.0) {
            return Err(QotError::InvalidParameter(
                "ADMM penalty, tolerances, ratio and max_iter must be positive; factor > 1".into(),
            ));
        }
        Ok(())
    }
}

/// Output of [`solve_qot`].
#[derive(Debug, Clone, Serialize)]
pub struct QOTSolution {
    /// `Tr[C Π]` at the reported coupling.
    pub value: f64,
    #[serde(skip)]
    pub coupling: Coupling,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub min_eigenvalue: f64,
    pub marginal_error: f64,
    pub final_penalty: f64,
    /// Dimensions of the supports the program was solved on.
    pub reduced_dims: (usize, usize),
    pub block_count: usize,
    pub max_block: usize,
}

/// Orthogonal projection onto `{Tr_2 X = A, Tr_1 X = B}` for `X` on `d1·d2`.
pub fn affine_project(x: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (d1, d2) = (a.rows(), b.rows());
    let layout = Layout::single(d1, d2);
    let mut it = layout.gather(x);
    layout.affine_project(&mut it, a, b);
    Ok(layout.scatter(&it))
}

/// Block partition of the composite index set `i*d2 + j`.
struct Layout {
    d1: usize,
    d2: usize,
    blocks: Vec<Vec<usize>>,
}

type Iterate = Vec<ComplexMatrix>;

impl Layout {
    fn single(d1: usize, d2: usize) -> Self {
        Self {
            d1,
            d2,
            blocks: vec![(0..d1 * d2).collect()],
        }
    }

    /// Finest partition connected by the cost pattern and closed under the
    /// two marginal maps: if `(i,j)` and `(k,j)` share a block for some `j`,
    /// then so do `(i,j')` and `(k,j')` for every `j'` (likewise on the
    /// second factor).
    fn detect(c: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Self {
        let (d1, d2) = (a.rows(), b.rows());
        let n = d1 * d2;
        let mut uf = UnionFind::new(n);
        for p in 0..n {
            for q in p + 1..n {
                if c[(p, q)].norm() > tol || c[(q, p)].norm() > tol {
                    uf.union(p, q);
                }
            }
        }
        loop {
            let mut uf1 = UnionFind::new(d1);
            for i in 0..d1 {
                for k in i + 1..d1 {
                    if a[(i, k)].norm() > tol {
                        uf1.union(i, k);
                    }
                }
            }
            let mut uf2 = UnionFind::new(d2);
            for j in 0..d2 {
                for l in j + 1..d2 {
                    if b[(j, l)].norm() > tol {
                        uf2.union(j, l);
                    }
                }
            }
            let mut seen = vec![usize::MAX; n];
            for j in 0..d2 {
                for i in 0..d1 {
                    let r = uf.find(i * d2 + j);
                    if seen[r] == usize::MAX {
                        seen[r] = i;
                    } else {
                        uf1.union(seen[r], i);
                    }
                }
                for i in 0..d1 {
                    seen[uf.find(i * d2 + j)] = usize::MAX;
                }
            }
            for i in 0..d1 {
                for j in 0..d2 {
                    let r = uf.find(i * d2 + j);
                    if seen[r] == usize::MAX {
                        seen[r] = j;
                    } else {
                        uf2.union(seen[r], j);
                    }
                }
                for j in 0..d2 {
                    seen[uf.find(i * d2 + j)] = usize::MAX;
                }
            }
            let mut changed = false;
            for comp in uf1.components() {
                for &i in &comp[1..] {
                    for j in 0..d2 {
                        changed |= uf.union(comp[0] * d2 + j, i * d2 + j);
                    }
                }
            }
            for comp in uf2.components() {
                for &j in &comp[1..] {
                    for i in 0..d1 {
                        changed |= uf.union(i * d2 + comp[0], i * d2 + j);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Self {
            d1,
            d2,
            blocks: uf.components(),
        }
    }

    fn gather(&self, m: &ComplexMatrix) -> Iterate {
        self.blocks.iter().map(|idx| m.submatrix(idx, idx)).collect()
    }

    fn scatter(&self, it: &Iterate) -> ComplexMatrix {
        let n = self.d1 * self.d2;
        let mut out = ComplexMatrix::zeros(n, n);
        for (idx, blk) in self.blocks.iter().zip(it) {
            out.set_block(idx, blk);
        }
        out
    }

    fn marginals(&self, it: &Iterate) -> (ComplexMatrix, ComplexMatrix) {
        let (d1, d2) = (self.d1, self.d2);
        let mut t2 = ComplexMatrix::zeros(d1, d1);
        let mut t1 = ComplexMatrix::zeros(d2, d2);
        for (idx, blk) in self.blocks.iter().zip(it) {
            for (p, &ip) in idx.iter().enumerate() {
                let (i, j) = (ip / d2, ip % d2);
                for (q, &iq) in idx.iter().enumerate() {
                    let (k, l) = (iq / d2, iq % d2);
                    if j == l {
                        t2[(i, k)] += blk[(p, q)];
                    }
                    if i == k {
                        t1[(j, l)] += blk[(p, q)];
                    }
                }
            }
        }
        (t2, t1)
    }

    fn affine_project(&self, it: &mut Iterate, a: &ComplexMatrix, b: &ComplexMatrix) {
        let (d1, d2) = (self.d1, self.d2);
        let (t2, t1) = self.marginals(it);
        let mut da = a - &t2;
        let mut db = b - &t1;
        let (ta, tb) = (da.trace(), db.trace());
        let t = (ta + tb) * 0.5;
        for i in 0..d1 {
            da[(i, i)] -= ta / d1 as f64;
        }
        for j in 0..d2 {
            db[(j, j)] -= tb / d2 as f64;
        }
        let (inv1, inv2, inv12) = (1.0 / d1 as f64, 1.0 / d2 as f64, t / (d1 * d2) as f64);
        for (idx, blk) in self.blocks.iter().zip(it.iter_mut()) {
            for (p, &ip) in idx.iter().enumerate() {
                let (i, j) = (ip / d2, ip % d2);
                for (q, &iq) in idx.iter().enumerate() {
                    let (k, l) = (iq / d2, iq % d2);
                    let mut add = C64::new(0.0, 0.0);
                    if j == l {
                        add += da[(i, k)] * inv2;
                    }
                    if i == k {
                        add += db[(j, l)] * inv1;
                    }
                    if p == q {
                        add += inv12;
                    }
                    blk[(p, q)] += add;
                }
            }
        }
    }
}

/// Type-II Anderson acceleration with a monotonicity safeguard: an
/// extrapolated point whose fixed-point residual does not decrease is
/// discarded in favour of the plain step from the previous point.
struct Anderson {
    memory: usize,
    dy: std::collections::VecDeque<Vec<f64>>,
    df: std::collections::VecDeque<Vec<f64>>,
    /// `(y, f = T(y) - y, T(y))` at the previous evaluation.
    prev: Option<(Vec<f64>, Vec<f64>, Iterate)>,
    last_was_extrapolated: bool,
}

fn flatten(it: &Iterate) -> Vec<f64> {
    it.iter()
        .flat_map(|b| b.as_slice().iter().flat_map(|z| [z.re, z.im]))
        .collect()
}

fn unflatten(v: &[f64], like: &Iterate) -> Iterate {
    let mut k = 0;
    like.iter()
        .map(|b| {
            let mut out = b.clone();
            for z in out.as_mut_slice() {
                *z = C64::new(v[k], v[k + 1]);
                k += 2;
            }
            out
        })
        .collect()
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl Anderson {
    fn new(memory: usize) -> Self {
        Self {
            memory,
            dy: Default::default(),
            df: Default::default(),
            prev: None,
            last_was_extrapolated: false,
        }
    }

    fn reset(&mut self) {
        self.dy.clear();
        self.df.clear();
        self.prev = None;
        self.last_was_extrapolated = false;
    }

    /// Next point given the current `y` and `T(y)`.
    fn step(&mut self, y: &Iterate, ty: Iterate) -> Iterate {
        let yv = flatten(y);
        let gv = flatten(&ty);
        let f: Vec<f64> = gv.iter().zip(&yv).map(|(g, y)| g - y).collect();
        if let Some((py, pf, pty)) = self.prev.take() {
            if self.last_was_extrapolated && l2(&f) >= l2(&pf) {
                self.dy.clear();
                self.df.clear();
                self.last_was_extrapolated = false;
                return pty;
            }
            self.dy.push_back(yv.iter().zip(&py).map(|(a, b)| a - b).collect());
            self.df.push_back(f.iter().zip(&pf).map(|(a, b)| a - b).collect());
            if self.dy.len() > self.memory {
                self.dy.pop_front();
                self.df.pop_front();
            }
        }
        self.prev = Some((yv, f.clone(), ty.clone()));
        let m = self.df.len();
        if m == 0 {
            self.last_was_extrapolated = false;
            return ty;
        }
        let gram = nalgebra::DMatrix::from_fn(m, m, |i, j| {
            self.df[i].iter().zip(&self.df[j]).map(|(a, b)| a * b).sum::<f64>()
        });
        let tr = gram.trace();
        if !(tr > 1e-28) || !tr.is_finite() {
            self.last_was_extrapolated = false;
            return ty;
        }
        let reg = 1e-10 * tr;
        let rhs = nalgebra::DVector::from_fn(m, |i, _| {
            self.df[i].iter().zip(&f).map(|(a, b)| a * b).sum::<f64>()
        });
        let Some(gamma) = (gram + nalgebra::DMatrix::identity(m, m) * reg).lu().solve(&rhs) else {
            self.last_was_extrapolated = false;
            return ty;
        };
        let mut corr = vec![0.0; gv.len()];
        for i in 0..m {
            let g = gamma[i];
            for ((x, a), b) in corr.iter_mut().zip(&self.dy[i]).zip(&self.df[i]) {
                *x += g * (a + b);
            }
        }
        // Extrapolations larger than the iterate itself are not trusted.
        let size = l2(&corr);
        if !size.is_finite() || size > l2(&gv).max(1.0) {
            self.reset();
            return ty;
        }
        let next: Vec<f64> = gv.iter().zip(&corr).map(|(g, c)| g - c).collect();
        if gamma.iter().any(|g| !g.is_finite()) || next.iter().any(|x| !x.is_finite()) {
            self.reset();
            return ty;
        }
        self.last_was_extrapolated = true;
        unflatten(&next, &ty)
    }
}

fn psd_project_block(m: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    if m.rows() == 1 {
        let v = m[(0, 0)].re;
        return Ok((ComplexMatrix::from_diag(&[v.max(0.0)]), v));
    }
    let eig = hermitian_eig(&m.symmetrize())?;
    Ok((eig.map(|l| l.max(0.0)), eig.min()))
}

fn norm(it: &Iterate) -> f64 {
    it.iter().map(|b| b.frobenius_norm().powi(2)).sum::<f64>().sqrt()
}

fn diff_norm(x: &Iterate, y: &Iterate) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| a.dist(b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Isometry onto the numerical support (`V = I` for full rank) and the
/// compressed state `V†ρV`.
fn support(rho: &DensityMatrix, reduce: bool, rel_tol: f64) -> Result<(Option<ComplexMatrix>, ComplexMatrix)> {
    let d = rho.dim();
    if !reduce {
        return Ok((None, rho.matrix().clone()));
    }
    let eig = hermitian_eig(rho.matrix())?;
    let cut = rel_tol * eig.max();
    let keep: Vec<usize> = (0..d).filter(|&k| eig.eigenvalues[k] > cut).collect();
    if keep.len() == d {
        return Ok((None, rho.matrix().clone()));
    }
    let rows: Vec<usize> = (0..d).collect();
    let v = eig.eigenvectors.submatrix(&rows, &keep);
    let kept: Vec<f64> = keep.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mass: f64 = kept.iter().sum();
    let compressed = ComplexMatrix::from_diag(&kept.iter().map(|x| x / mass).collect::<Vec<_>>());
    Ok((Some(v), compressed))
}

/// Approximates `D²(ρ, σ) = min_Π Tr[C Π]` over couplings of `ρ` and `σ`.
///
/// A run that hits `max_iter` is returned with `converged = false`.
pub fn solve_qot(rho: &DensityMatrix, sigma: &DensityMatrix, cost: &CostOperator, cfg: &ADMMConfig) -> Result<QOTSolution> {
    cfg.validate()?;
    let d = cost.dim();
    if rho.dim() != d || sigma.dim() != d {
        return Err(QotError::Dimension(format!(
            "states of dimension {} and {} for a cost on dimension {d}",
            rho.dim(),
            sigma.dim()
        )));
    }

    let (v_sigma, a) = support(sigma, cfg.reduce_support, cfg.support_tol)?;
    let (v_rho, rho_c) = support(rho, cfg.reduce_support, cfg.support_tol)?;
    let b = rho_c.transpose();
    let (d1, d2) = (a.rows(), b.rows());
    let lift = match (&v_sigma, &v_rho) {
        (None, None) => None,
        _ => {
            let vs = v_sigma.clone().unwrap_or_else(|| ComplexMatrix::identity(d));
            let vr = v_rho.clone().unwrap_or_else(|| ComplexMatrix::identity(d));
            Some(kron(&vs, &vr.conj()))
        }
    };
    let c_red = match &lift {
        None => cost.matrix().clone(),
        Some(w) => w.adjoint().matmul(cost.matrix()).matmul(w).symmetrize(),
    };

    let layout = if cfg.use_blocks {
        let tol = 1e-13 * c_red.max_abs().max(1.0);
        Layout::detect(&c_red, &a, &b, tol)
    } else {
        Layout::single(d1, d2)
    };
    let c_blocks = layout.gather(&c_red);
    let objective = |it: &Iterate| -> f64 { c_blocks.iter().zip(it).map(|(c, x)| c.trace_product(x).re).sum() };

    let mut writer = match &cfg.log_path {
        Some(p) => {
            let mut w = csv::Writer::from_path(p)?;
            w.write_record(["iteration", "objective", "primal_residual", "dual_residual", "penalty"])?;
            Some(w)
        }
        None => None,
    };

    // Fixed-point form of the iteration on y = Π + U:
    //   Z = PSD(y), U = y - Z, Π = Proj_aff(Z - U - C/pen), T(y) = Π + U.
    // Plain steps y <- T(y) reproduce the ADMM sequence exactly.
    let mut z = layout.gather(&kron(&a, &b));
    let mut y = z.clone();
    let mut pen = cfg.penalty;
    let mut rescale = 1.0;
    let mut accel = (cfg.anderson > 0).then(|| Anderson::new(cfg.anderson));
    let mut z_prev = z.clone();
    let (mut r, mut s) = (f64::INFINITY, f64::INFINITY);
    let mut iterations = 0;
    let mut converged = false;

    for it in 1..=cfg.max_iter {
        iterations = it;
        z = y
            .iter()
            .map(|b| psd_project_block(b).map(|(m, _)| m))
            .collect::<Result<_>>()?;
        let mut u: Iterate = y.iter().zip(&z).map(|(yb, zb)| yb - zb).collect();
        if rescale != 1.0 {
            u.iter_mut().for_each(|m| *m = m.scale(rescale));
            rescale = 1.0;
        }
        let mut pi: Iterate = z
            .iter()
            .zip(&u)
            .zip(&c_blocks)
            .map(|((zb, ub), cb)| {
                let mut p = zb - ub;
                p.add_scaled(-1.0 / pen, cb);
                p
            })
            .collect();
        layout.affine_project(&mut pi, &a, &b);
        r = diff_norm(&pi, &z);
        s = pen * diff_norm(&z, &z_prev);
        if let Some(w) = writer.as_mut() {
            w.write_record(&[
                it.to_string(),
                format!("{:.17e}", objective(&pi)),
                format!("{r:.6e}"),
                format!("{s:.6e}"),
                format!("{pen:.6e}"),
            ])?;
        }
        if !r.is_finite() || !s.is_finite() {
            return Err(QotError::NonConvergence {
                iterations: it,
                primal: r,
                dual: s,
            });
        }
        let scale_p = 1f64.max(norm(&pi)).max(norm(&z));
        let scale_d = 1f64.max(pen * norm(&u));
        if it > 1 && r <= cfg.tol_primal * scale_p && s <= cfg.tol_dual * scale_d {
            converged = true;
            break;
        }
        let ty: Iterate = pi.iter().zip(&u).map(|(p, ub)| p + ub).collect();
        y = match accel.as_mut() {
            Some(aa) => aa.step(&y, ty),
            None if cfg.relaxation == 1.0 => ty,
            None => y
                .iter()
                .zip(&ty)
                .map(|(yb, tb)| &yb.scale(1.0 - cfg.relaxation) + &tb.scale(cfg.relaxation))
                .collect(),
        };
        z_prev = std::mem::take(&mut z);
        if cfg.adaptive && it % cfg.adapt_interval == 0 {
            let factor = if r > cfg.adapt_ratio * s {
                cfg.adapt_factor
            } else if s > cfg.adapt_ratio * r {
                1.0 / cfg.adapt_factor
            } else {
                1.0
            };
            // Keep the penalty within twelve decades of its start.
            let factor = (factor * pen).clamp(cfg.penalty * 1e-6, cfg.penalty * 1e6) / pen;
            if factor != 1.0 {
                pen *= factor;
                rescale = 1.0 / factor;
                if let Some(aa) = accel.as_mut() {
                    aa.reset();
                }
            }
        }
    }
    z = if converged { z } else { z_prev };
    if let Some(mut w) = writer {
        w.flush()?;
    }
    if !converged {
        log::warn!("ADMM stopped at {iterations} iterations (primal {r:.3e}, dual {s:.3e})");
    }

    let mut fin = z;
    layout.affine_project(&mut fin, &a, &b);
    let mut min_eig = f64::INFINITY;
    for blk in &fin {
        min_eig = min_eig.min(psd_project_block(blk)?.1);
    }
    let reduced = layout.scatter(&fin);
    let full = match &lift {
        None => reduced,
        Some(w) => w.matmul(&reduced).matmul(&w.adjoint()),
    };
    let coupling = Coupling::unchecked(full, rho.clone(), sigma.clone())?;
    let err = coupling_marginals(&coupling, min_eig);
    let value = coupling_cost(&coupling, cost)?;
    let max_block = layout.blocks.iter().map(Vec::len).max().unwrap_or(0);
    Ok(QOTSolution {
        value,
        coupling,
        primal_residual: r,
        dual_residual: s,
        iterations,
        converged,
        min_eigenvalue: min_eig,
        marginal_error: err.max_marginal(),
        final_penalty: pen,
        reduced_dims: (d1, d2),
        block_count: layout.blocks.len(),
        max_block,
    })
}

fn coupling_marginals(c: &Coupling, min_eigenvalue: f64) -> MarginalError {
    let target = c.target_marginal().dist(c.target().matrix());
    let source = c.source_marginal().dist(&c.source().transpose());
    MarginalError {
        target,
        source,
        min_eigenvalue,
        trace: (c.matrix().trace().re - 1.0).abs(),
    }
}
