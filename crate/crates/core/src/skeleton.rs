//! Skeleton-image restoration for a fixed kernel estimate.
//!
//! Alternates a conjugate-gradient solve of
//! `(K^T K + 2 beta L_gamma) x = K^T b` with a refresh of the l1-Laplacian
//! weights from the current solution. The first pass uses an unweighted
//! Laplacian.

use crate::error::{Error, Result};
use crate::fourier::Convolver;
use crate::graph::{build_gamma_graph, build_unweighted_graph, LatticeGraph, WeightParams};
use crate::image::{dot, norm, Image};
use crate::kernel::BlurKernel;
use crate::linalg::{axpy, FnOperator, LinearOperator};
use crate::spectral::power_method_extremes;

/// Condition number above which the refinement fallback engages.
pub const CONDITION_LIMIT: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub solution: Vec<f64>,
    pub iterations: usize,
    /// `|A x - rhs| / |rhs|`, recomputed from scratch at exit.
    pub relative_residual: f64,
    pub converged: bool,
}

/// Plain conjugate gradients for a symmetric positive-definite operator.
pub fn cg_solve(
    op: &impl LinearOperator,
    rhs: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iters: usize,
) -> Result<CgOutcome> {
    cg_solve_observed(op, rhs, x0, tol, max_iters, |_, _| {})
}

/// [`cg_solve`] calling `observer(iteration, x)` after every update.
pub fn cg_solve_observed(
    op: &impl LinearOperator,
    rhs: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iters: usize,
    mut observer: impl FnMut(usize, &[f64]),
) -> Result<CgOutcome> {
    let n = op.dim();
    if rhs.len() != n || x0.is_some_and(|x| x.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: format!("{n} entries"),
            actual: format!("{} entries", rhs.len()),
        });
    }
    let bnorm = norm(rhs);
    if bnorm == 0.0 {
        return Ok(CgOutcome {
            solution: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        });
    }
    let mut x = x0.map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; n]);
    let mut ap = vec![0.0; n];
    op.apply(&x, &mut ap);
    let mut r: Vec<f64> = rhs.iter().zip(&ap).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let target = tol * bnorm;
    let mut iterations = 0;
    while rr.sqrt() > target && iterations < max_iters {
        op.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !pap.is_finite() || !rr.is_finite() {
            return Err(Error::SolverFailure {
                reason: "non-finite value in conjugate gradients".into(),
                iterations,
                residual: rr.sqrt() / bnorm,
            });
        }
        if pap <= 0.0 {
            // the operator is not positive definite along p; stop with what we have
            break;
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
        iterations += 1;
        observer(iterations, &x);
    }
    op.apply(&x, &mut ap);
    let res = rhs.iter().zip(&ap).map(|(b, a)| (b - a).powi(2)).sum::<f64>().sqrt() / bnorm;
    if !res.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::SolverFailure {
            reason: "non-finite solution".into(),
            iterations,
            residual: res,
        });
    }
    Ok(CgOutcome {
        solution: x,
        iterations,
        relative_residual: res,
        converged: res <= tol,
    })
}

/// The matrix-free system operator `K^T K + 2 beta L`.
#[derive(Debug, Clone)]
pub struct DeconvOperator {
    conv: Convolver,
    graph: LatticeGraph,
    beta: f64,
}

impl DeconvOperator {
    pub fn new(k: &BlurKernel, graph: LatticeGraph, beta: f64) -> Result<Self> {
        let conv = Convolver::new(graph.width(), graph.height(), k)?;
        Ok(Self { conv, graph, beta })
    }

    pub fn convolver(&self) -> &Convolver {
        &self.conv
    }

    pub fn graph(&self) -> &LatticeGraph {
        &self.graph
    }

    pub fn set_graph(&mut self, graph: LatticeGraph) {
        assert_eq!(graph.dims(), self.graph.dims());
        self.graph = graph;
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Right-hand side `K^T b`.
    pub fn rhs(&self, b: &Image) -> Vec<f64> {
        self.conv.apply_adjoint(b.as_slice())
    }

    /// `1/2 |K x - b|^2 + beta x^T L x`.
    pub fn objective(&self, x: &[f64], b: &Image) -> f64 {
        let kx = self.conv.apply(x);
        let fid: f64 = kx.iter().zip(b.as_slice()).map(|(a, c)| (a - c).powi(2)).sum();
        0.5 * fid + self.beta * self.graph.quadratic_form(x)
    }
}

impl LinearOperator for DeconvOperator {
    fn dim(&self) -> usize {
        self.graph.node_count()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let ktk = self.conv.apply_normal(x);
        self.graph.apply(x, out);
        for (o, k) in out.iter_mut().zip(&ktk) {
            *o = k + 2.0 * self.beta * *o;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConditioningReport {
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub condition_number: f64,
    pub converged: bool,
}

/// Power-method estimate of the extreme eigenvalues of `K^T K + 2 beta L`.
pub fn conditioning_report(k: &BlurKernel, g: &LatticeGraph, beta: f64) -> Result<ConditioningReport> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be >= 0, got {beta}")));
    }
    let op = DeconvOperator::new(k, g.clone(), beta)?;
    Ok(report_for(&op))
}

fn report_for(op: &DeconvOperator) -> ConditioningReport {
    let e = power_method_extremes(op, op.dim(), 20_000, 1e-10);
    ConditioningReport {
        lambda_max: e.lambda_max,
        lambda_min: e.lambda_min,
        condition_number: e.condition_number().max(1.0),
        converged: e.converged,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkeletonOptions {
    pub params: WeightParams,
    pub beta: f64,
    /// Reweighting passes (solve, then refresh `L_gamma`).
    pub outer_iters: usize,
    /// Relative change of the skeleton that ends reweighting early.
    pub tol: f64,
    pub cg_tol: f64,
    pub cg_max_iters: usize,
    /// Run the power-method conditioning check before each solve.
    pub check_conditioning: bool,
}

impl Default for SkeletonOptions {
    fn default() -> Self {
        Self {
            params: WeightParams::default(),
            beta: 0.01,
            outer_iters: 4,
            tol: 1e-4,
            cg_tol: 1e-6,
            cg_max_iters: 200,
            check_conditioning: false,
        }
    }
}

impl SkeletonOptions {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {}", self.beta)));
        }
        if self.outer_iters == 0 || self.cg_max_iters == 0 {
            return Err(Error::InvalidParameter("iteration caps must be positive".into()));
        }
        if !(self.tol > 0.0 && self.cg_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SkeletonResult {
    pub skeleton: Image,
    pub outer_iterations: usize,
    pub cg_iterations: usize,
    /// Present when conditioning checks were requested; the last one computed.
    pub conditioning: Option<ConditioningReport>,
    pub refined: bool,
}

/// Restores the skeleton image for kernel `k`.
pub fn restore_skeleton(b: &Image, k: &BlurKernel, opts: &SkeletonOptions) -> Result<Image> {
    Ok(restore_skeleton_detailed(b, k, opts, None)?.skeleton)
}

/// Like [`restore_skeleton`], optionally warm-starting CG from `init`.
pub fn restore_skeleton_detailed(
    b: &Image,
    k: &BlurKernel,
    opts: &SkeletonOptions,
    init: Option<&Image>,
) -> Result<SkeletonResult> {
    opts.validate()?;
    if let Some(x) = init {
        b.same_dims(x)?;
    }
    let mut op = DeconvOperator::new(k, build_unweighted_graph(b.width(), b.height())?, opts.beta)?;
    let rhs = op.rhs(b);
    let mut x = init.unwrap_or(b).clone();
    let mut cg_iterations = 0;
    let mut conditioning = None;
    let mut refined = false;
    let mut outer_iterations = 0;
    for outer in 0..opts.outer_iters {
        let mut ill_conditioned = false;
        if opts.check_conditioning {
            let rep = report_for(&op);
            ill_conditioned = rep.condition_number > CONDITION_LIMIT;
            conditioning = Some(rep);
        }
        let (sol, iters) = if ill_conditioned {
            refined = true;
            let lmax = conditioning.map(|c| c.lambda_max).unwrap_or(1.0);
            solve_with_refinement(&op, &rhs, x.as_slice(), 1e-6 * lmax, opts)?
        } else {
            let out = cg_solve(&op, &rhs, Some(x.as_slice()), opts.cg_tol, opts.cg_max_iters)?;
            (out.solution, out.iterations)
        };
        cg_iterations += iters;
        let next = Image::new(b.width(), b.height(), sol)?;
        let change = next.relative_change(&x);
        x = next;
        outer_iterations = outer + 1;
        if outer + 1 < opts.outer_iters {
            op.set_graph(build_gamma_graph(&x, opts.params)?);
        }
        if change < opts.tol && outer > 0 {
            break;
        }
    }
    Ok(SkeletonResult {
        skeleton: x,
        outer_iterations,
        cg_iterations,
        conditioning,
        refined,
    })
}

/// Solves `A x = rhs` through `(A + shift I)` plus two refinement sweeps.
fn solve_with_refinement(
    op: &DeconvOperator,
    rhs: &[f64],
    x0: &[f64],
    shift: f64,
    opts: &SkeletonOptions,
) -> Result<(Vec<f64>, usize)> {
    let regularized = FnOperator::new(op.dim(), |x: &[f64], out: &mut [f64]| {
        op.apply(x, out);
        axpy(shift, x, out);
    });
    let first = cg_solve(&regularized, rhs, Some(x0), opts.cg_tol, opts.cg_max_iters)?;
    let mut x = first.solution;
    let mut iters = first.iterations;
    let mut ax = vec![0.0; op.dim()];
    for _ in 0..2 {
        op.apply(&x, &mut ax);
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let d = cg_solve(&regularized, &r, None, opts.cg_tol, opts.cg_max_iters)?;
        axpy(1.0, &d.solution, &mut x);
        iters += d.iterations;
    }
    Ok((x, iters))
}
