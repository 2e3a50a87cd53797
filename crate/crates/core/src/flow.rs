//! The moment-map energy `f = |mu - alpha|^2`, its downward gradient flow,
//! classification of critical points into slope-ordered blocks, the
//! algebraic two-step type for the framed stability parameter, and the
//! numerical Hessian index.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, null_space, C64, CMat};
use crate::quiver::{
    canonical_central, induced_central, slope_data, CentralElement, DimensionVector, Quiver,
};
use crate::rep::{
    inf_action_square, moment_defect, GradedLinearMap, LieAlgebraElement, Representation,
};

/// Energy of a representation against a central parameter.
pub fn energy(x: &Representation, alpha: &CentralElement) -> f64 {
    let beta = moment_defect(x, alpha);
    beta.norm().powi(2)
}

/// Gradient of the energy for the edge-wise real trace metric:
/// `grad f(x) = 2i rho_x(mu(x) - alpha)`. The overall factor is pinned by
/// central finite differences (see the tests and the verify suite).
pub fn grad_energy(x: &Representation, alpha: &CentralElement) -> Result<GradedLinearMap> {
    if !alpha.is_admissible(x.dims()) {
        return Err(Error::InadmissibleCentral(format!(
            "alpha is not admissible for {}",
            x.dims()
        )));
    }
    let beta = moment_defect(x, alpha);
    let g = inf_action_square(x, &beta)?;
    Ok(g.scale(C64::new(0.0, 2.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FlowStatus {
    Converged,
    MaxSteps,
    Diverged,
    NumericalStall,
}

#[derive(Debug, Clone, Copy)]
pub struct FlowOpts {
    pub grad_tol: f64,
    pub max_steps: usize,
    pub h0: f64,
    pub h_max: f64,
    /// Relative per-step error budget for the step-doubling estimate.
    pub step_tol: f64,
    pub trace_len: usize,
}

impl Default for FlowOpts {
    fn default() -> Self {
        FlowOpts {
            grad_tol: 1e-8,
            max_steps: 100_000,
            h0: 1e-2,
            h_max: 0.25,
            step_tol: 1e-9,
            trace_len: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FlowSample {
    pub t: f64,
    pub f: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub samples: Vec<FlowSample>,
    pub limit: Representation,
    pub status: FlowStatus,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
    pub f_limit: f64,
    pub grad_norm_limit: f64,
    /// Largest change of a closed-path trace between start and limit.
    pub invariant_drift: f64,
}

fn rk4_step(x: &Representation, alpha: &CentralElement, h: f64) -> Result<Representation> {
    let field = |y: &Representation| -> Result<GradedLinearMap> {
        Ok(grad_energy(y, alpha)?.scale(C64::new(-1.0, 0.0)))
    };
    let k1 = field(x)?;
    let mut y = x.clone();
    y.axpy(h / 2.0, &k1);
    let k2 = field(&y)?;
    let mut y = x.clone();
    y.axpy(h / 2.0, &k2);
    let k3 = field(&y)?;
    let mut y = x.clone();
    y.axpy(h, &k3);
    let k4 = field(&y)?;
    let mut out = x.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    Ok(out)
}

/// Integrates the downward flow with an adaptive fourth-order step. A step
/// is accepted only when the energy does not increase; the step shrinks on
/// rejection and grows on acceptance.
pub fn integrate_flow(
    x0: &Representation,
    alpha: &CentralElement,
    opts: &FlowOpts,
) -> Result<FlowResult> {
    if !alpha.is_admissible(x0.dims()) {
        return Err(Error::InadmissibleCentral(format!(
            "alpha is not admissible for {}",
            x0.dims()
        )));
    }
    let traces0 = closed_path_traces(x0, opts.trace_len);
    let mut x = x0.clone();
    let mut t = 0.0;
    let mut h = opts.h0;
    let mut f = energy(&x, alpha);
    let mut samples = Vec::new();
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut status = FlowStatus::MaxSteps;

    let mut grad_norm = grad_energy(&x, alpha)?.norm();
    samples.push(FlowSample { t, f, grad_norm });

    while accepted + rejected < opts.max_steps {
        if grad_norm <= opts.grad_tol {
            status = FlowStatus::Converged;
            break;
        }
        if !f.is_finite() {
            status = FlowStatus::Diverged;
            break;
        }
        // step doubling: one full step against two half steps gives both a
        // higher-order state and a local error estimate
        let full = rk4_step(&x, alpha, h)?;
        let halves = rk4_step(&rk4_step(&x, alpha, h / 2.0)?, alpha, h / 2.0)?;
        let mut err: f64 = 0.0;
        let mut scale: f64 = 1.0;
        for e in 0..x.quiver().edge_count() {
            err += (full.block(e) - halves.block(e)).norm_squared();
            scale = scale.max(halves.block(e).norm());
        }
        let err = err.sqrt() / scale;
        let f_new = energy(&halves, alpha);
        // sufficient decrease: the exact flow loses h |grad|^2 per unit of
        // curvature-free time, so demand a fixed fraction of that; plain
        // epsilon-decreases at the stability boundary get rejected
        let target = f - 0.1 * h * grad_norm * grad_norm + 1e-15 * (1.0 + f.abs());
        if err <= opts.step_tol && f_new <= target {
            x = halves;
            t += h;
            f = f_new;
            grad_norm = grad_energy(&x, alpha)?.norm();
            accepted += 1;
            samples.push(FlowSample { t, f, grad_norm });
            let grow = (0.9 * (opts.step_tol / err.max(1e-300)).powf(0.2)).min(2.0);
            h = (h * grow.max(1.0)).min(opts.h_max);
        } else {
            rejected += 1;
            let shrink = if err > opts.step_tol {
                (0.9 * (opts.step_tol / err).powf(0.2)).clamp(0.2, 0.9)
            } else {
                0.5
            };
            h *= shrink;
            if h < 1e-14 {
                status = FlowStatus::NumericalStall;
                break;
            }
        }
    }
    if grad_norm <= opts.grad_tol {
        status = FlowStatus::Converged;
    }

    let traces1 = closed_path_traces(&x, opts.trace_len);
    let mut drift: f64 = 0.0;
    for (key, z0) in &traces0 {
        let z1 = traces1.get(key).copied().unwrap_or(C64::new(0.0, 0.0));
        drift = drift.max((z1 - z0).norm());
    }

    Ok(FlowResult {
        samples,
        limit: x,
        status,
        steps_accepted: accepted,
        steps_rejected: rejected,
        f_limit: f,
        grad_norm_limit: grad_norm,
        invariant_drift: drift,
    })
}

/// Traces of `x_p` over closed paths of length at most `max_len`,
/// deduplicated up to cyclic rotation. Keys are printed edge sequences.
pub fn closed_path_traces(x: &Representation, max_len: usize) -> BTreeMap<String, C64> {
    let q = x.quiver();
    let mut out = BTreeMap::new();
    let mut seen: std::collections::BTreeSet<Vec<usize>> = Default::default();

    fn canonical(seq: &[usize]) -> Vec<usize> {
        let n = seq.len();
        let mut best = seq.to_vec();
        for s in 1..n {
            let rot: Vec<usize> = (0..n).map(|i| seq[(i + s) % n]).collect();
            if rot < best {
                best = rot;
            }
        }
        best
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        q: &Quiver,
        x: &Representation,
        start: usize,
        seq: &mut Vec<usize>,
        current: usize,
        max_len: usize,
        seen: &mut std::collections::BTreeSet<Vec<usize>>,
        out: &mut BTreeMap<String, C64>,
    ) {
        for (e, edge) in q.edges().iter().enumerate() {
            if edge.tail != current {
                continue;
            }
            seq.push(e);
            if edge.head == start {
                let canon = canonical(seq);
                if seen.insert(canon) {
                    let name = seq
                        .iter()
                        .rev()
                        .map(|&i| q.edge(i).id.clone())
                        .collect::<Vec<_>>()
                        .join(" ");
                    let mut m = CMat::identity(x.dims().get(start), x.dims().get(start));
                    for &i in seq.iter() {
                        m = x.block(i) * m;
                    }
                    out.insert(name, m.trace());
                }
            }
            if seq.len() < max_len {
                walk(q, x, start, seq, edge.head, max_len, seen, out);
            }
            seq.pop();
        }
    }

    for start in 0..q.vertex_count() {
        if x.dims().get(start) == 0 {
            continue;
        }
        let mut seq = Vec::new();
        walk(q, x, start, &mut seq, start, max_len, &mut seen, &mut out);
    }
    out
}

/// Ordered list of dimension vectors with strictly increasing slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct HNType {
    pub blocks: Vec<DimensionVector>,
    pub slopes: Vec<Rational64>,
}

impl HNType {
    /// The block containing the framing vertex; for the framed parameter
    /// this is the quotient by the maximal semistable subrepresentation.
    pub fn label(&self, q: &Quiver) -> DimensionVector {
        if let Some(inf) = q.framing() {
            for b in &self.blocks {
                if b.get(inf) > 0 {
                    return b.clone();
                }
            }
        }
        self.blocks[0].clone()
    }
}

fn assert_canonical(q: &Quiver, dims: &DimensionVector, alpha: &CentralElement) -> Result<()> {
    let expect = canonical_central(q, dims)?;
    if alpha != &expect {
        return Err(Error::PreconditionFailed(
            "this operation needs the framed canonical stability parameter".into(),
        ));
    }
    Ok(())
}

/// Dimension vector of the maximal subrepresentation avoiding the framing
/// vertex, by a decreasing-subspace fixed-point iteration with numerical
/// kernels.
pub fn max_subrep_avoiding_framing(x: &Representation) -> Result<DimensionVector> {
    let q = x.quiver().clone();
    let inf = q
        .framing()
        .ok_or_else(|| Error::InvalidFraming("quiver has no framing vertex".into()))?;
    let mut bases: Vec<CMat> = (0..q.vertex_count())
        .map(|k| {
            if k == inf {
                CMat::zeros(x.dims().get(k), 0)
            } else {
                CMat::identity(x.dims().get(k), x.dims().get(k))
            }
        })
        .collect();
    let max_iter = x.dims().total() + 1;
    for _ in 0..max_iter {
        let mut changed = false;
        let mut next = bases.clone();
        for k in 0..q.vertex_count() {
            if k == inf || bases[k].ncols() == 0 {
                continue;
            }
            // for each outgoing edge, the component of x_a W_k leaving W_{h(a)}
            let mut rows: Vec<CMat> = Vec::new();
            for (e, edge) in q.edges().iter().enumerate() {
                if edge.tail != k {
                    continue;
                }
                let target = &bases[edge.head];
                let mapped = x.block(e) * &bases[k];
                let proj = if target.ncols() == 0 {
                    mapped
                } else {
                    &mapped - target * (target.adjoint() * &mapped)
                };
                rows.push(proj);
            }
            if rows.is_empty() {
                continue;
            }
            let stacked = crate::linalg::vstack(&rows);
            let kernel = null_space(&stacked);
            if kernel.ncols() < bases[k].ncols() {
                next[k] = &bases[k] * kernel;
                changed = true;
            }
        }
        bases = next;
        if !changed {
            break;
        }
    }
    let dims = bases.iter().map(|b| b.ncols()).collect();
    DimensionVector::new(&q, dims)
}

/// Algebraic two-step type of a representation for the framed canonical
/// parameter: the quotient by the maximal framing-avoiding
/// subrepresentation followed by that subrepresentation, or the single
/// stable block.
pub fn hn_type_algebraic(x: &Representation, alpha: &CentralElement) -> Result<HNType> {
    let q = x.quiver().clone();
    assert_canonical(&q, x.dims(), alpha)?;
    let w = max_subrep_avoiding_framing(x)?;
    if w.is_zero() {
        let slope = slope_data(alpha, x.dims())?.slope;
        return Ok(HNType {
            blocks: vec![x.dims().clone()],
            slopes: vec![slope],
        });
    }
    let quotient = x.dims().sub(&w)?;
    let s_q = slope_data(alpha, &quotient)?.slope;
    let s_w = slope_data(alpha, &w)?.slope;
    Ok(HNType {
        blocks: vec![quotient, w],
        slopes: vec![s_q, s_w],
    })
}

/// Stability for the framed canonical parameter: no nonzero
/// subrepresentation avoids the framing vertex.
pub fn is_alpha_stable(x: &Representation, alpha: &CentralElement) -> Result<bool> {
    let q = x.quiver();
    let inf = q
        .framing()
        .ok_or_else(|| Error::InvalidFraming("quiver has no framing vertex".into()))?;
    if x.dims().get(inf) != 1 {
        return Err(Error::PreconditionFailed(
            "stability check needs framing dimension 1".into(),
        ));
    }
    assert_canonical(q, x.dims(), alpha)?;
    Ok(max_subrep_avoiding_framing(x)?.is_zero())
}

/// A critical point split into slope-ordered blocks.
#[derive(Debug, Clone)]
pub struct CriticalClassification {
    pub hn: HNType,
    pub beta: LieAlgebraElement,
    /// `|mu(x_l) - alpha_l|` per block, for the induced central elements.
    pub block_residuals: Vec<f64>,
    pub off_block_norm: f64,
    pub cluster_margin: f64,
    /// Per-vertex unitary aligning coordinates with the block split.
    pub basis: Vec<CMat>,
}

/// Splits a critical representation along the spectrum of
/// `beta = mu(x) - alpha` and orders the blocks by increasing slope.
pub fn classify_critical(
    x: &Representation,
    alpha: &CentralElement,
    opts: &FlowOpts,
) -> Result<CriticalClassification> {
    let q = x.quiver().clone();
    let grad = grad_energy(x, alpha)?;
    if grad.norm() > opts.grad_tol {
        return Err(Error::NotCritical(format!(
            "gradient norm {:.3e} exceeds {:.1e}",
            grad.norm(),
            opts.grad_tol
        )));
    }
    let beta = moment_defect(x, alpha);
    let class_tol = 1e-6 * (1.0 + beta.norm());

    // Hermitian forms H_k = beta_k / i; eigenvalue h corresponds to
    // slope -h on its block
    let mut vertex_eigs: Vec<(Vec<f64>, CMat)> = Vec::new();
    let mut all_vals: Vec<f64> = Vec::new();
    for k in 0..q.vertex_count() {
        let h = beta.block(k) * C64::new(0.0, -1.0);
        let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
        let (vals, vecs) = hermitian_eigen(&h);
        all_vals.extend(vals.iter());
        vertex_eigs.push((vals, vecs));
    }
    if all_vals.is_empty() {
        return Err(Error::ZeroDimensionVector("empty representation".into()));
    }
    all_vals.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // 1-d clustering at gaps above class_tol
    let mut centers: Vec<(f64, f64)> = Vec::new();
    let mut lo = all_vals[0];
    let mut hi = all_vals[0];
    let mut min_gap = f64::INFINITY;
    for &v in &all_vals[1..] {
        if v - hi > class_tol {
            centers.push((lo, hi));
            min_gap = min_gap.min(v - hi);
            lo = v;
        }
        hi = v;
    }
    centers.push((lo, hi));
    let cluster_margin = if centers.len() == 1 {
        f64::INFINITY
    } else {
        min_gap / class_tol
    };
    if centers.len() > 1 && cluster_margin < 1e3 {
        return Err(Error::DegenerateSpectrum {
            margin: cluster_margin,
            detail: "eigenvalue clusters are not well separated".into(),
        });
    }
    let spread = centers.iter().map(|(a, b)| b - a).fold(0.0f64, f64::max);
    if spread > 10.0 * class_tol {
        return Err(Error::DegenerateSpectrum {
            margin: spread / class_tol,
            detail: "eigenvalue cluster spread exceeds tolerance".into(),
        });
    }

    // descending eigenvalue = increasing slope
    centers.reverse();
    let nclusters = centers.len();
    let in_cluster = |v: f64| -> usize {
        centers
            .iter()
            .position(|&(a, b)| v >= a - class_tol && v <= b + class_tol)
            .expect("eigenvalue belongs to a cluster")
    };

    // per-vertex permutation into (cluster, eigen) order and block dims
    let mut blocks_dims = vec![vec![0usize; q.vertex_count()]; nclusters];
    let mut basis: Vec<CMat> = Vec::new();
    for k in 0..q.vertex_count() {
        let (vals, vecs) = &vertex_eigs[k];
        let mut order: Vec<usize> = (0..vals.len()).collect();
        order.sort_by(|&a, &b| {
            let ca = in_cluster(vals[a]);
            let cb = in_cluster(vals[b]);
            ca.cmp(&cb).then(a.cmp(&b))
        });
        let n = vals.len();
        let mut u = CMat::zeros(n, n);
        for (j, &i) in order.iter().enumerate() {
            u.set_column(j, &vecs.column(i));
            blocks_dims[in_cluster(vals[i])][k] += 1;
        }
        basis.push(u);
    }

    // rotate x into the eigenbasis and measure off-block leakage
    let g_inv: Vec<CMat> = basis.iter().map(|u| u.adjoint()).collect();
    let rotated = x.conjugate(&g_inv, &basis);
    let mut dims_acc: Vec<DimensionVector> = Vec::new();
    for dims in &blocks_dims {
        dims_acc.push(DimensionVector::new(&q, dims.clone())?);
    }
    let offset = |l: usize, k: usize| -> usize { (0..l).map(|m| blocks_dims[m][k]).sum() };
    let mut block_reps: Vec<Representation> = Vec::new();
    for (l, dims) in dims_acc.iter().enumerate() {
        let mut xl = Representation::zero(&q, dims.clone());
        for (e, edge) in q.edges().iter().enumerate() {
            let (r, c) = (dims.get(edge.head), dims.get(edge.tail));
            let (ro, co) = (offset(l, edge.head), offset(l, edge.tail));
            if r > 0 && c > 0 {
                let view = rotated.block(e).view((ro, co), (r, c));
                xl.block_mut(e).copy_from(&view);
            }
        }
        block_reps.push(xl);
    }
    let mut off_block_norm: f64 = 0.0;
    for (e, edge) in q.edges().iter().enumerate() {
        let m = rotated.block(e);
        for l1 in 0..nclusters {
            for l2 in 0..nclusters {
                if l1 == l2 {
                    continue;
                }
                let (r, c) = (dims_acc[l1].get(edge.head), dims_acc[l2].get(edge.tail));
                if r > 0 && c > 0 {
                    let view = m.view((offset(l1, edge.head), offset(l2, edge.tail)), (r, c));
                    off_block_norm = off_block_norm.max(view.norm());
                }
            }
        }
    }
    if off_block_norm > 10.0 * class_tol * (1.0 + x.norm()) {
        return Err(Error::DegenerateSpectrum {
            margin: off_block_norm / class_tol,
            detail: "off-block entries do not vanish in the eigenbasis".into(),
        });
    }

    // exact slopes and per-block moment residuals
    let mut slopes = Vec::new();
    let mut residuals = Vec::new();
    for (l, dims) in dims_acc.iter().enumerate() {
        let s = slope_data(alpha, dims)?.slope;
        slopes.push(s);
        let alpha_l = induced_central(alpha, x.dims(), dims)?;
        let defect = moment_defect(&block_reps[l], &alpha_l);
        residuals.push(defect.norm());
    }
    for w in slopes.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::DegenerateSpectrum {
                margin: cluster_margin,
                detail: "distinct clusters share a slope".into(),
            });
        }
    }

    Ok(CriticalClassification {
        hn: HNType {
            blocks: dims_acc,
            slopes,
        },
        beta,
        block_residuals: residuals,
        off_block_norm,
        cluster_margin,
        basis,
    })
}

/// Index and nullity of the numerical Hessian of the energy at a critical
/// point, by central differences on the real coordinates.
#[derive(Debug, Clone)]
pub struct HessianReport {
    pub index: usize,
    pub nullity: usize,
    pub eigenvalues: Vec<f64>,
    pub hess_tol: f64,
    /// Smallest |eigenvalue|/hess_tol over eigenvalues classified nonzero.
    pub eigen_margin: f64,
}

pub fn hessian_index(
    x: &Representation,
    alpha: &CentralElement,
    opts: &FlowOpts,
) -> Result<HessianReport> {
    let grad = grad_energy(x, alpha)?;
    if grad.norm() > opts.grad_tol.max(1e-6) {
        return Err(Error::NotCritical(format!(
            "gradient norm {:.3e} at the Hessian base point",
            grad.norm()
        )));
    }
    let q = x.quiver().clone();
    let base = x.as_graded().to_vec();
    let n_c = base.len();
    let n = 2 * n_c;
    let h = 1e-5;

    let eval = |coords: &[f64]| -> f64 {
        let v = nalgebra::DVector::from_iterator(
            n_c,
            (0..n_c).map(|i| C64::new(coords[2 * i], coords[2 * i + 1])),
        );
        let g = GradedLinearMap::from_vec(&q, x.dims().clone(), x.dims().clone(), &v);
        let rep = g.into_representation().expect("square grading");
        energy(&rep, alpha)
    };

    let mut coords = vec![0.0f64; n];
    for i in 0..n_c {
        coords[2 * i] = base[i].re;
        coords[2 * i + 1] = base[i].im;
    }
    let f0 = eval(&coords);
    let mut hess = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let mut cp = coords.clone();
        cp[i] += h;
        let fp = eval(&cp);
        cp[i] -= 2.0 * h;
        let fm = eval(&cp);
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in (i + 1)..n {
            let mut c = coords.clone();
            c[i] += h;
            c[j] += h;
            let fpp = eval(&c);
            c[j] -= 2.0 * h;
            let fpm = eval(&c);
            c[i] -= 2.0 * h;
            let fmm = eval(&c);
            c[j] += 2.0 * h;
            let fmp = eval(&c);
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    let se = nalgebra::SymmetricEigen::new(hess);
    let mut eigenvalues: Vec<f64> = se.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = eigenvalues
        .iter()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let hess_tol = 1e-4 * scale;
    let index = eigenvalues.iter().filter(|&&v| v < -hess_tol).count();
    let nullity = eigenvalues.iter().filter(|&&v| v.abs() <= hess_tol).count();
    let eigen_margin = eigenvalues
        .iter()
        .filter(|v| v.abs() > hess_tol)
        .map(|v| v.abs() / hess_tol)
        .fold(f64::INFINITY, f64::min);
    Ok(HessianReport {
        index,
        nullity,
        eigenvalues,
        hess_tol,
        eigen_margin,
    })
}

/// Embeds a representation over a sub-dimension vector as the leading block
/// of the ambient space (zero elsewhere).
pub fn embed_block(x: &Representation, ambient: &DimensionVector) -> Result<Representation> {
    let rest = ambient.sub(x.dims())?;
    let zero = Representation::zero(x.quiver(), rest);
    Representation::block_embed(x, &zero, None)
}

/// Convenience wrapper around `canonical_central` for a shared quiver.
pub fn canonical_for(q: &Arc<Quiver>, v: &DimensionVector) -> Result<CentralElement> {
    canonical_central(q, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::jordan_double;
    use crate::rng::trial_rng;

    fn setup(v: Vec<usize>) -> (Arc<Quiver>, DimensionVector, CentralElement) {
        let (q, _) = jordan_double();
        let q = Arc::new(q);
        let dims = DimensionVector::new(&q, v).unwrap();
        let alpha = canonical_central(&q, &dims).unwrap();
        (q, dims, alpha)
    }

    fn minimizer(q: &Arc<Quiver>, dims: DimensionVector) -> Representation {
        let mut x = Representation::zero(q, dims);
        x.set_scalar("abar", C64::new(std::f64::consts::SQRT_2, 0.0))
            .unwrap();
        x
    }

    #[test]
    fn gradient_vanishes_at_minimizer_and_zero() {
        let (q, dims, alpha) = setup(vec![1, 1]);
        let x = minimizer(&q, dims.clone());
        assert!(grad_energy(&x, &alpha).unwrap().norm() < 1e-12);
        let zero = Representation::zero(&q, dims);
        assert!(grad_energy(&zero, &alpha).unwrap().norm() < 1e-15);
        assert!((energy(&zero, &alpha) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (q, dims, alpha) = setup(vec![2, 1]);
        let mut rng = trial_rng(17, "fd", 0);
        let x = Representation::random(&q, dims.clone(), &mut rng);
        let g = grad_energy(&x, &alpha).unwrap();
        let dir = GradedLinearMap::random(&q, dims.clone(), dims, &mut rng);
        let h = 1e-6;
        let mut xp = x.clone();
        xp.axpy(h, &dir);
        let mut xm = x.clone();
        xm.axpy(-h, &dir);
        let fd = (energy(&xp, &alpha) - energy(&xm, &alpha)) / (2.0 * h);
        let metric = g.inner(&dir).re;
        assert!(
            (fd - metric).abs() < 1e-6 * (1.0 + fd.abs()),
            "fd {fd} vs metric {metric}"
        );
    }

    #[test]
    fn gradient_sign_descends() {
        // the descent certificate for the sign convention
        let (q, dims, alpha) = setup(vec![1, 1]);
        let mut x = Representation::zero(&q, dims);
        x.set_scalar("a", C64::new(1.0, 0.0)).unwrap();
        x.set_scalar("abar", C64::new(1.0, 0.0)).unwrap();
        let f0 = energy(&x, &alpha);
        let g = grad_energy(&x, &alpha).unwrap();
        // supported on the framing edges only at this point
        assert!(g.block(q.edge_index("B").unwrap()).norm() == 0.0);
        assert!(g.block(q.edge_index("Bbar").unwrap()).norm() == 0.0);
        let ga = g.block(q.edge_index("a").unwrap())[(0, 0)];
        let gabar = g.block(q.edge_index("abar").unwrap())[(0, 0)];
        assert!(ga.re > 0.0 && gabar.re < 0.0);
        let mut y = x.clone();
        y.axpy(-1e-3, &g);
        assert!(energy(&y, &alpha) < f0);
    }

    #[test]
    fn inadmissible_central_is_rejected() {
        let (q, dims, _) = setup(vec![1, 1]);
        let bad = CentralElement::from_integers(&q, &[1, 1]).unwrap();
        let x = Representation::zero(&q, dims);
        assert!(matches!(
            grad_energy(&x, &bad),
            Err(Error::InadmissibleCentral(_))
        ));
        assert!(matches!(
            integrate_flow(&x, &bad, &FlowOpts::default()),
            Err(Error::InadmissibleCentral(_))
        ));
    }

    #[test]
    fn classify_rejects_non_critical_points() {
        let (q, dims, alpha) = setup(vec![1, 1]);
        let mut x = Representation::zero(&q, dims);
        x.set_scalar("a", C64::new(1.0, 0.0)).unwrap();
        x.set_scalar("abar", C64::new(1.0, 0.0)).unwrap();
        assert!(matches!(
            classify_critical(&x, &alpha, &FlowOpts::default()),
            Err(Error::NotCritical(_))
        ));
        assert!(matches!(
            hessian_index(&x, &alpha, &FlowOpts::default()),
            Err(Error::NotCritical(_))
        ));
    }

    #[test]
    fn nearly_merged_clusters_are_reported_degenerate() {
        // a tiny stability parameter puts the two eigenvalue clusters just
        // above the merge tolerance but far below the separation demand
        let (q, dims, _) = setup(vec![1, 1]);
        let eps = Rational64::new(1, 10_000);
        let alpha = CentralElement::new(&q, vec![eps, -eps]).unwrap();
        let x = Representation::zero(&q, dims);
        assert!(alpha.is_admissible(x.dims()));
        match classify_critical(&x, &alpha, &FlowOpts::default()) {
            Err(Error::DegenerateSpectrum { margin, .. }) => {
                assert!(margin < 1e3, "margin {margin}");
            }
            other => panic!("expected a degenerate spectrum, got {other:?}"),
        }
    }

    #[test]
    fn flow_reaches_minimizer_circle() {
        let (q, dims, alpha) = setup(vec![1, 1]);
        let mut x0 = Representation::zero(&q, dims);
        x0.set_scalar("a", C64::new(1.0, 0.0)).unwrap();
        x0.set_scalar("abar", C64::new(1.0, 0.0)).unwrap();
        let result = integrate_flow(&x0, &alpha, &FlowOpts::default()).unwrap();
        assert_eq!(result.status, FlowStatus::Converged);
        assert!(result.f_limit <= 1e-10, "f_limit {}", result.f_limit);
        let a = result.limit.block(q.edge_index("a").unwrap())[(0, 0)].norm();
        let abar = result.limit.block(q.edge_index("abar").unwrap())[(0, 0)].norm();
        assert!(
            (abar * abar - a * a - 2.0).abs() < 1e-5,
            "|abar|^2-|a|^2 = {}",
            abar * abar - a * a
        );
        for w in result.samples.windows(2) {
            assert!(w[1].f <= w[0].f + 1e-10);
        }
    }

    #[test]
    fn critical_start_takes_no_steps() {
        let (q, dims, alpha) = setup(vec![1, 1]);
        let mut x0 = Representation::zero(&q, dims);
        x0.set_scalar("B", C64::new(1.0, 0.0)).unwrap();
        let result = integrate_flow(&x0, &alpha, &FlowOpts::default()).unwrap();
        assert_eq!(result.status, FlowStatus::Converged);
        assert_eq!(result.steps_accepted, 0);
        assert!((result.f_limit - 2.0).abs() < 1e-12);
        let cls = classify_critical(&result.limit, &alpha, &FlowOpts::default()).unwrap();
        assert_eq!(cls.hn.blocks.len(), 2);
        assert_eq!(cls.hn.blocks[0].dims(), &[0, 1]);
        assert_eq!(cls.hn.blocks[1].dims(), &[1, 0]);
    }

    #[test]
    fn zero_start_is_fixed() {
        let (q, dims, alpha) = setup(vec![1, 1]);
        let x0 = Representation::zero(&q, dims);
        let result = integrate_flow(&x0, &alpha, &FlowOpts::default()).unwrap();
        assert_eq!(result.steps_accepted, 0);
        assert!((result.f_limit - 2.0).abs() < 1e-12);
        let _ = q;
    }

    #[test]
    fn classify_worked_cases() {
        let (q, dims, alpha) = setup(vec![1, 1]);
        let zero = Representation::zero(&q, dims.clone());
        let cls = classify_critical(&zero, &alpha, &FlowOpts::default()).unwrap();
        assert_eq!(cls.hn.blocks[0].dims(), &[0, 1]);
        assert_eq!(cls.hn.blocks[1].dims(), &[1, 0]);
        assert_eq!(cls.hn.slopes[0], Rational64::from(-1));
        assert_eq!(cls.hn.slopes[1], Rational64::from(1));
        assert!(cls.block_residuals.iter().all(|&r| r < 1e-12));
        assert!(cls.off_block_norm < 1e-12);

        let x = minimizer(&q, dims);
        let cls2 = classify_critical(&x, &alpha, &FlowOpts::default()).unwrap();
        assert_eq!(cls2.hn.blocks.len(), 1);
        assert_eq!(cls2.hn.slopes[0], Rational64::from(0));
        assert_eq!(cls2.hn.label(&q).dims(), &[1, 1]);
    }

    #[test]
    fn hn_type_worked_cases() {
        let (q, dims, alpha) = setup(vec![1, 1]);
        let mut xb = Representation::zero(&q, dims.clone());
        xb.set_scalar("B", C64::new(1.0, 0.0)).unwrap();
        let t = hn_type_algebraic(&xb, &alpha).unwrap();
        assert_eq!(t.label(&q).dims(), &[0, 1]);
        assert!(!is_alpha_stable(&xb, &alpha).unwrap());

        let xmin = minimizer(&q, dims.clone());
        let t2 = hn_type_algebraic(&xmin, &alpha).unwrap();
        assert_eq!(t2.label(&q).dims(), &[1, 1]);
        assert!(is_alpha_stable(&xmin, &alpha).unwrap());

        let zero = Representation::zero(&q, dims.clone());
        let t3 = hn_type_algebraic(&zero, &alpha).unwrap();
        assert_eq!(t3.label(&q).dims(), &[0, 1]);

        // a != 0, abar = 0 leaves the loop vertex invariant
        let mut xa = Representation::zero(&q, dims);
        xa.set_scalar("a", C64::new(1.0, 0.0)).unwrap();
        assert!(!is_alpha_stable(&xa, &alpha).unwrap());
    }

    #[test]
    fn hessian_index_worked_cases() {
        let (q, dims, alpha) = setup(vec![1, 1]);
        let zero = Representation::zero(&q, dims.clone());
        let rep = hessian_index(&zero, &alpha, &FlowOpts::default()).unwrap();
        assert_eq!(rep.index, 2);
        assert_eq!(rep.nullity, 4);

        let xmin = minimizer(&q, dims);
        let rep2 = hessian_index(&xmin, &alpha, &FlowOpts::default()).unwrap();
        assert_eq!(rep2.index, 0);
    }

    #[test]
    fn traces_of_loop_powers() {
        let (q, dims, _) = setup(vec![1, 1]);
        let mut x = Representation::zero(&q, dims);
        x.set_scalar("B", C64::new(2.0, 0.0)).unwrap();
        let tr = closed_path_traces(&x, 2);
        assert_eq!(tr["B"], C64::new(2.0, 0.0));
        assert_eq!(tr["B B"], C64::new(4.0, 0.0));
        // a abar and abar a are one cyclic class
        let cyclic: Vec<&String> = tr
            .keys()
            .filter(|k| k.split(' ').all(|e| e == "a" || e == "abar"))
            .collect();
        assert_eq!(cyclic.len(), 1);
        assert_eq!(tr[cyclic[0]], C64::new(0.0, 0.0));
        let zero = Representation::zero(x.quiver(), x.dims().clone());
        assert!(closed_path_traces(&zero, 3).values().all(|z| z.norm() == 0.0));
    }
}
