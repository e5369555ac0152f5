//! Lowest eigenpairs of a [`SparseHermitian`].
//!
//! Two routes: a dense Hermitian decomposition (faer) for small
//! matrices and a Lanczos iteration with full reorthogonalization for larger
//! ones. Every returned pair carries its recomputed residual
//! `‖H v − λ v‖₂`.

use std::str::FromStr;

use faer::{Mat, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHermitian;

/// Largest dimension accepted by [`dense_eigh`].
pub const DENSE_MAX_DIM: usize = 4096;

/// `Method::Auto` switches from dense to Lanczos above this dimension.
pub const AUTO_DENSE_LIMIT: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Dense,
    Lanczos,
    Auto,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dense" => Ok(Method::Dense),
            "lanczos" => Ok(Method::Lanczos),
            "auto" => Ok(Method::Auto),
            other => Err(format!("unknown solver `{other}` (expected dense, lanczos or auto)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Number of lowest eigenpairs wanted.
    pub k: usize,
    /// Relative residual target.
    pub tol: f64,
    /// Lanczos iteration budget; `None` means `10·n`.
    pub max_iter: Option<usize>,
    /// Seed for the ChaCha8 stream that draws Lanczos start vectors.
    pub seed: u64,
    pub method: Method,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k: 6,
            tol: 1e-10,
            max_iter: None,
            seed: 0,
            method: Method::Auto,
        }
    }
}

impl SolverConfig {
    pub fn with_k(k: usize) -> Self {
        SolverConfig {
            k,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Unit eigenvectors matching `values`.
    pub vectors: Vec<Vec<Complex64>>,
    /// `‖H v_i − λ_i v_i‖₂`.
    pub residuals: Vec<f64>,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Keeps the `k` lowest pairs.
    pub fn truncate(&mut self, k: usize) {
        self.values.truncate(k);
        self.vectors.truncate(k);
        self.residuals.truncate(k);
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Residual scale `max(1, max |λ|)` used by the convergence test.
pub fn residual_scale(values: &[f64]) -> f64 {
    values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Full decomposition through a dense Hermitian eigensolver.
pub fn dense_eigh(h: &SparseHermitian) -> Result<EigenResult> {
    let n = h.dim();
    if n > DENSE_MAX_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    if n == 0 {
        return Ok(EigenResult {
            values: vec![],
            vectors: vec![],
            residuals: vec![],
        });
    }
    let eig = h
        .to_dense()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::DenseSolver(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
    let values: Vec<f64> = order.iter().map(|&c| s[c].re).collect();
    let vectors: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&c| (0..n).map(|r| u[(r, c)]).collect())
        .collect();
    let residuals = residuals(h, &values, &vectors);
    Ok(EigenResult {
        values,
        vectors,
        residuals,
    })
}

/// Eigenvalues only, ascending. Cheaper than [`dense_eigh`] when vectors
/// are not needed.
pub fn dense_eigenvalues(h: &SparseHermitian) -> Result<Vec<f64>> {
    let n = h.dim();
    if n > DENSE_MAX_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    if n == 0 {
        return Ok(vec![]);
    }
    let mut values = h
        .to_dense()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::DenseSolver(format!("{e:?}")))?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Recomputes `‖H v − λ v‖₂` for every pair of `res`.
pub fn residual_report(h: &SparseHermitian, res: &EigenResult) -> Result<Vec<f64>> {
    if res.values.len() != res.vectors.len() {
        return Err(Error::SizeMismatch {
            expected: res.values.len(),
            got: res.vectors.len(),
        });
    }
    if let Some(v) = res.vectors.iter().find(|v| v.len() != h.dim()) {
        return Err(Error::SizeMismatch {
            expected: h.dim(),
            got: v.len(),
        });
    }
    Ok(residuals(h, &res.values, &res.vectors))
}

fn residuals(h: &SparseHermitian, values: &[f64], vectors: &[Vec<Complex64>]) -> Vec<f64> {
    let mut hv = vec![Complex64::default(); h.dim()];
    values
        .iter()
        .zip(vectors)
        .map(|(&lambda, v)| {
            h.matvec(v, &mut hv);
            hv.iter()
                .zip(v)
                .map(|(a, b)| (a - b * lambda).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// The `cfg.k` lowest eigenpairs using the method selected in `cfg`.
pub fn solve_lowest(h: &SparseHermitian, cfg: &SolverConfig) -> Result<EigenResult> {
    validate(h, cfg)?;
    let dense = match cfg.method {
        Method::Dense => true,
        Method::Lanczos => false,
        Method::Auto => h.dim() <= AUTO_DENSE_LIMIT,
    };
    if dense {
        let mut res = dense_eigh(h)?;
        res.truncate(cfg.k);
        Ok(res)
    } else {
        lanczos_lowest(h, cfg)
    }
}

fn validate(h: &SparseHermitian, cfg: &SolverConfig) -> Result<()> {
    if cfg.k == 0 || cfg.k > h.dim() {
        return Err(Error::InvalidSolverConfig(format!(
            "k = {} must be in 1..={}",
            cfg.k,
            h.dim()
        )));
    }
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(Error::InvalidSolverConfig(format!("tol = {} must be > 0", cfg.tol)));
    }
    if cfg.max_iter == Some(0) {
        return Err(Error::InvalidSolverConfig("max_iter must be positive".into()));
    }
    Ok(())
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// Classical Gram–Schmidt, applied twice.
fn orthogonalize<'a>(w: &mut [Complex64], against: impl Iterator<Item = &'a Vec<Complex64>> + Clone) {
    for _ in 0..2 {
        for q in against.clone() {
            let c = dot(q, w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
    }
}

fn random_unit<'a>(
    rng: &mut ChaCha8Rng,
    n: usize,
    against: impl Iterator<Item = &'a Vec<Complex64>> + Clone,
) -> Option<Vec<Complex64>> {
    for _ in 0..4 {
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let before = norm(&v);
        orthogonalize(&mut v, against.clone());
        let after = norm(&v);
        if after > 1e-8 * before {
            v.iter_mut().for_each(|x| *x /= after);
            return Some(v);
        }
    }
    None
}

struct Pass {
    pairs: Vec<(f64, Vec<Complex64>)>,
    iterations: usize,
    converged: bool,
}

/// One Lanczos run on the complement of `locked`, returning its `want`
/// lowest Ritz pairs.
fn lanczos_pass(
    h: &SparseHermitian,
    want: usize,
    tol: f64,
    budget: usize,
    locked: &[Vec<Complex64>],
    rng: &mut ChaCha8Rng,
) -> Result<Pass> {
    let n = h.dim();
    let available = n - locked.len();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut best = Vec::new();
    let mut w = vec![Complex64::default(); n];

    let Some(mut q) = random_unit(rng, n, locked.iter()) else {
        return Ok(Pass {
            pairs: best,
            iterations: 0,
            converged: true,
        });
    };

    for iter in 0..budget {
        h.matvec(&q, &mut w);
        let alpha = dot(&q, &w).re;
        for (wi, qi) in w.iter_mut().zip(&q) {
            *wi -= qi * alpha;
        }
        if let (Some(prev), Some(&beta)) = (basis.last(), betas.last()) {
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= pi * beta;
            }
        }
        basis.push(q);
        alphas.push(alpha);
        orthogonalize(&mut w, basis.iter().chain(locked));
        let beta = norm(&w);
        let m = basis.len();

        let exhausted = m == available;
        let ritz_scale = residual_scale(&alphas).max(beta);
        let breakdown = beta <= 1e-12 * ritz_scale;

        if m >= want && (m % 5 == 0 || exhausted || breakdown || iter + 1 == budget) {
            let mut t = Mat::<f64>::zeros(m, m);
            for a in 0..m {
                t[(a, a)] = alphas[a];
                if a + 1 < m {
                    t[(a, a + 1)] = betas[a];
                    t[(a + 1, a)] = betas[a];
                }
            }
            let eig = t
                .self_adjoint_eigen(Side::Lower)
                .map_err(|e| Error::DenseSolver(format!("{e:?}")))?;
            let theta = eig.S().column_vector();
            let s_mat = eig.U();
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&a, &b| theta[a].total_cmp(&theta[b]));
            // Per-pair scale: never looser than the scale of the final k values.
            let pair_tol = |lambda: f64| tol * lambda.abs().max(1.0);
            let estimates_ok = exhausted
                || order[..want].iter().all(|&c| {
                    (beta * s_mat[(m - 1, c)]).abs() <= pair_tol(theta[c])
                });

            let pairs: Vec<(f64, Vec<Complex64>)> = order[..want]
                .iter()
                .map(|&c| {
                    let mut y = vec![Complex64::default(); n];
                    for (row, qv) in basis.iter().enumerate() {
                        let s = s_mat[(row, c)];
                        for (yi, qi) in y.iter_mut().zip(qv) {
                            *yi += qi * s;
                        }
                    }
                    let nrm = norm(&y);
                    y.iter_mut().for_each(|x| *x /= nrm);
                    (theta[c], y)
                })
                .collect();
            if estimates_ok {
                let (vals, vecs): (Vec<f64>, Vec<Vec<Complex64>>) = pairs.iter().cloned().unzip();
                let true_ok = residuals(h, &vals, &vecs)
                    .iter()
                    .zip(&vals)
                    .all(|(&r, &v)| r <= pair_tol(v));
                if true_ok || exhausted {
                    return Ok(Pass {
                        pairs,
                        iterations: iter + 1,
                        converged: true_ok,
                    });
                }
            }
            best = pairs;
        }

        if exhausted {
            break;
        }
        if breakdown {
            // Invariant subspace found; continue in its complement.
            match random_unit(rng, n, basis.iter().chain(locked)) {
                Some(fresh) => {
                    betas.push(0.0);
                    q = fresh;
                }
                None => break,
            }
        } else {
            betas.push(beta);
            q = w.iter().map(|x| x / beta).collect();
        }
    }
    Ok(Pass {
        iterations: budget,
        pairs: best,
        converged: false,
    })
}

/// The `cfg.k` lowest eigenpairs by Lanczos with full reorthogonalization.
///
/// A single Krylov sequence sees only one vector per distinct eigenvalue, so
/// converged pairs are locked and the iteration is rerun in their orthogonal
/// complement until no new eigenvalue appears below the current `k`-th one.
/// This recovers degenerate copies. The run is deterministic for a fixed
/// seed.
pub fn lanczos_lowest(h: &SparseHermitian, cfg: &SolverConfig) -> Result<EigenResult> {
    validate(h, cfg)?;
    let n = h.dim();
    let k = cfg.k;
    let mut budget = cfg.max_iter.unwrap_or(10 * n);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut locked: Vec<(f64, Vec<Complex64>)> = Vec::new();
    let mut iterations = 0;

    loop {
        let available = n - locked.len();
        if available == 0 {
            break;
        }
        let want = k.min(available);
        let locked_vecs: Vec<Vec<Complex64>> = locked.iter().map(|(_, v)| v.clone()).collect();
        let pass = lanczos_pass(h, want, cfg.tol, budget, &locked_vecs, &mut rng)?;
        iterations += pass.iterations;
        budget = budget.saturating_sub(pass.iterations);

        let threshold = if locked.len() >= k {
            let mut vals: Vec<f64> = locked.iter().map(|p| p.0).collect();
            vals.sort_by(f64::total_cmp);
            let scale = residual_scale(&vals);
            Some(vals[k - 1] - cfg.tol * scale)
        } else {
            None
        };
        let found_lower = pass
            .pairs
            .iter()
            .any(|(v, _)| threshold.is_none_or(|t| *v < t));
        locked.extend(pass.pairs);

        if !pass.converged {
            let res = finish(h, locked, k);
            return Err(Error::NoConvergence {
                iterations,
                max_residual: res.max_residual(),
                best: Box::new(res),
            });
        }
        if !found_lower {
            break;
        }
        if budget == 0 {
            let res = finish(h, locked, k);
            return Err(Error::NoConvergence {
                iterations,
                max_residual: res.max_residual(),
                best: Box::new(res),
            });
        }
    }

    let res = finish(h, locked, k);
    let scale = residual_scale(&res.values);
    if res.max_residual() > cfg.tol * scale {
        return Err(Error::NoConvergence {
            iterations,
            max_residual: res.max_residual(),
            best: Box::new(res),
        });
    }
    Ok(res)
}

fn finish(h: &SparseHermitian, mut pairs: Vec<(f64, Vec<Complex64>)>, k: usize) -> EigenResult {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.truncate(k);
    let (values, vectors): (Vec<f64>, Vec<Vec<Complex64>>) = pairs.into_iter().unzip();
    let residuals = residuals(h, &values, &vectors);
    EigenResult {
        values,
        vectors,
        residuals,
    }
}
