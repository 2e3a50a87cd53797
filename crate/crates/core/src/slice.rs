//! Negative slices at critical points, adjacent critical sets, flow-line
//! fibres with their tubular-neighbourhood rank arithmetic, Euler-class
//! degree data, and the tangent/normal bookkeeping of the Hecke
//! correspondence point sets.

use std::sync::Arc;

use rand::Rng;

use crate::deform::{deformation_complex, dnu_matrix, rho_matrix};
use crate::error::{Error, Result};
use crate::expansion::{build_negative_slice_quiver, expand_restrict, negative_slice_rep};
use crate::flow::{embed_block, hessian_index, is_alpha_stable, FlowOpts};
use crate::linalg::{
    column_space, max_principal_angle, null_space, rank_report, vstack, C64, CMat, RankReport,
};
use crate::quiver::{
    canonical_central, relation_set_checks, CentralElement, DimensionVector, Quiver, RelationSet,
};
use crate::rep::{d_nu, relation_map, GradedLinearMap, LieAlgebraElement, Representation};
use crate::rng::complex_normal;

/// A pair of adjacent critical levels: the upper one carries a stable
/// representation over `v_u`, the lower label is `v_ell = v_u + e_k`, both
/// inside the ambient dimension vector `v`.
#[derive(Debug, Clone)]
pub struct AdjacentPair {
    pub v: DimensionVector,
    pub v_u: DimensionVector,
    pub v_ell: DimensionVector,
    pub vertex: usize,
    pub x_u: Representation,
    pub alpha: CentralElement,
}

impl AdjacentPair {
    pub fn new(
        q: &Arc<Quiver>,
        v: DimensionVector,
        v_u: DimensionVector,
        vertex: usize,
        x_u: Representation,
    ) -> Result<Self> {
        let e_k = DimensionVector::unit(q, vertex);
        let v_ell = v_u.add(&e_k);
        if !v_ell.leq(&v) {
            return Err(Error::InvalidDimensionVector(
                "adjacent pair needs v_u + e_k <= v".into(),
            ));
        }
        if x_u.dims() != &v_u {
            return Err(Error::ShapeError(
                "upper representation must live over v_u".into(),
            ));
        }
        let alpha_u = canonical_central(q, &v_u)?;
        if !is_alpha_stable(&x_u, &alpha_u)? {
            return Err(Error::PreconditionFailed(
                "upper critical representation must be stable".into(),
            ));
        }
        let alpha = canonical_central(q, &v)?;
        Ok(AdjacentPair {
            v,
            v_u,
            v_ell,
            vertex,
            x_u,
            alpha,
        })
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        self.x_u.quiver()
    }

    pub fn e_k(&self) -> DimensionVector {
        DimensionVector::unit(self.quiver(), self.vertex)
    }

    /// The upper critical point embedded in the ambient space.
    pub fn ambient_x_u(&self) -> Result<Representation> {
        embed_block(&self.x_u, &self.v)
    }
}

fn hom1_dim(q: &Quiver, source: &DimensionVector, target: &DimensionVector) -> usize {
    q.edges()
        .iter()
        .map(|e| source.get(e.tail) * target.get(e.head))
        .sum()
}

fn rel_dim(rels: &RelationSet, source: &DimensionVector, target: &DimensionVector) -> usize {
    rels.relations()
        .iter()
        .map(|r| source.get(r.tail) * target.get(r.head))
        .sum()
}

/// Fibre data of the space of flow lines over the upper critical set: the
/// cokernel of the infinitesimal action on single-column homomorphisms.
#[derive(Debug, Clone)]
pub struct FibreReport {
    pub coker_dim: usize,
    pub hom0_dim: usize,
    pub hom1_dim: usize,
    pub rank: RankReport,
    /// The residual circle acts on the fibre with weight one.
    pub circle_weight: i64,
}

pub fn adjacent_fibre(pair: &AdjacentPair) -> Result<FibreReport> {
    let q = pair.quiver();
    let e_k = pair.e_k();
    let x2 = Representation::zero(q, e_k.clone());
    let a = rho_matrix(&pair.x_u, &x2);
    let rank = rank_report(&a);
    Ok(FibreReport {
        coker_dim: a.nrows() - rank.rank,
        hom0_dim: a.ncols(),
        hom1_dim: a.nrows(),
        rank,
        circle_weight: 1,
    })
}

/// Orthonormal basis of the negative slice of a critical representation
/// with `[v - v2 | v2]` block layout.
pub fn negative_slice_at(
    x: &Representation,
    rels: &RelationSet,
    v2: &DimensionVector,
) -> Result<Vec<GradedLinearMap>> {
    let q = x.quiver().clone();
    let v1 = x.dims().sub(v2)?;
    let (x1, x2, up, low) = x.block_split(&v1, v2)?;
    let scale = 1.0 + x.norm();
    if up.norm() > 1e-9 * scale || low.norm() > 1e-9 * scale {
        return Err(Error::PreconditionFailed(
            "representation is not block diagonal for the requested split".into(),
        ));
    }
    let report = deformation_complex(&q, rels, &x1, &x2)?;
    Ok(report.slice_basis)
}

/// Real ranks of the two tubular-neighbourhood bundles along a flow-line
/// point and of their trivial quotient.
#[derive(Debug, Clone)]
pub struct BundleRanks {
    pub rank_d: usize,
    pub rank_v: usize,
    pub rank_t: usize,
    /// Codimension of the flow lines inside the unstable set (= rank_d).
    pub nu: usize,
    pub lambda_u: usize,
    pub margins: Vec<f64>,
}

/// Splits a slice direction along its per-vertex kernels: checks the
/// kernel dimension vector and returns the direction restricted to the
/// orthocomplement of the kernel, regraded over that complement.
fn kernel_split(
    q: &Arc<Quiver>,
    dx: &GradedLinearMap,
    expect_kernel: &DimensionVector,
) -> Result<(GradedLinearMap, f64)> {
    let source = dx.source().clone();
    let target = dx.target().clone();
    let mut margin = f64::INFINITY;
    let mut complements: Vec<CMat> = Vec::new();
    for j in 0..q.vertex_count() {
        let cols = source.get(j);
        if cols == 0 {
            complements.push(CMat::zeros(0, 0));
            continue;
        }
        let rows: Vec<CMat> = q
            .edges_with_tail(j)
            .map(|(e, _)| dx.block(e).clone())
            .collect();
        let stacked = if rows.is_empty() {
            CMat::zeros(0, cols)
        } else {
            vstack(&rows)
        };
        let r = rank_report(&stacked);
        let expect_rank = cols - expect_kernel.get(j);
        if r.rank != expect_rank {
            return Err(Error::NotOnFlowLine(format!(
                "kernel dimension {} at vertex {:?}, expected {}",
                cols - r.rank,
                q.vertex_id(j),
                expect_kernel.get(j)
            )));
        }
        margin = margin.min(r.margin());
        let kernel = null_space(&stacked);
        let full = CMat::identity(cols, cols);
        let proj = &full - &kernel * kernel.adjoint();
        complements.push(column_space(&proj));
    }
    let e_dims: Vec<usize> = (0..q.vertex_count())
        .map(|j| complements[j].ncols())
        .collect();
    let e_vec = DimensionVector::new(q, e_dims)?;
    let mut y = GradedLinearMap::zero(q, e_vec, target);
    for (e, edge) in q.edges().iter().enumerate() {
        let c = &complements[edge.tail];
        if c.ncols() > 0 && dx.block(e).nrows() > 0 {
            *y.block_mut(e) = dx.block(e) * c;
        }
    }
    Ok((y, margin))
}

/// Rank arithmetic of the two-term complexes over a point of the flow-line
/// stratum: the fibre of the tubular neighbourhood inside the unstable set
/// (`rank_d`), the restricted normal of the lower stratum (`rank_v`,
/// computed independently over `v_ell`), and the trivial quotient
/// (`rank_t`, from the dimension formula).
pub fn bundle_ranks(pair: &AdjacentPair, dx: &GradedLinearMap) -> Result<BundleRanks> {
    let q = pair.quiver().clone();
    let rest = pair.v.sub(&pair.v_u)?; // v - v_u
    let tail = pair.v.sub(&pair.v_ell)?; // v - v_ell
    if dx.source() != &rest || dx.target() != &pair.v_u {
        return Err(Error::ShapeError(
            "slice direction must map v - v_u into v_u".into(),
        ));
    }
    let (y, split_margin) = kernel_split(&q, dx, &tail)?;
    let e_k = pair.e_k();
    if y.source() != &e_k {
        return Err(Error::NotOnFlowLine(
            "kernel complement does not have unit dimension at the adjacency vertex".into(),
        ));
    }

    let mut margins = vec![split_margin];

    // fibre of the flow-line tubular neighbourhood: cokernel of
    // (u1, u2) -> rho_{x_u}(u1) + y u2 inside Hom1(v - v_ell, v_u)
    let zero_tail = Representation::zero(&q, tail.clone());
    let m1 = rho_matrix(&pair.x_u, &zero_tail);
    let dim_u2: usize = (0..q.vertex_count())
        .map(|k| e_k.get(k) * tail.get(k))
        .sum();
    let dim_out = hom1_dim(&q, &tail, &pair.v_u);
    let m2 = crate::linalg::operator_matrix(dim_u2, dim_out, |vin| {
        let u2 = LieAlgebraElement::from_vec(&q, tail.clone(), e_k.clone(), vin);
        let mut out = GradedLinearMap::zero(&q, tail.clone(), pair.v_u.clone());
        for (e, edge) in q.edges().iter().enumerate() {
            if out.block(e).nrows() > 0 && out.block(e).ncols() > 0 {
                *out.block_mut(e) = y.block(e) * u2.block(edge.tail);
            }
        }
        out.to_vec()
    });
    let md = crate::linalg::hstack(&[m1, m2]);
    let rank_d_rep = rank_report(&md);
    margins.push(rank_d_rep.margin());
    let rank_d = 2 * (dim_out - rank_d_rep.rank);

    // independent route: normal of the lower stratum at the assembled
    // representation over v_ell
    let zero_ek = Representation::zero(&q, e_k.clone());
    let x_ell = Representation::block_embed(&pair.x_u, &zero_ek, Some(&y))?;
    let mv = rho_matrix(&x_ell, &zero_tail);
    let rank_v_rep = rank_report(&mv);
    margins.push(rank_v_rep.margin());
    let rank_v = 2 * (hom1_dim(&q, &tail, &pair.v_ell) - rank_v_rep.rank);

    let rank_t = 2 * hom1_dim(&q, &tail, &e_k);

    let ambient = pair.ambient_x_u()?;
    let hess = hessian_index(&ambient, &pair.alpha, &FlowOpts::default())?;
    margins.push(hess.eigen_margin);

    Ok(BundleRanks {
        rank_d,
        rank_v,
        rank_t,
        nu: rank_d,
        lambda_u: hess.index,
        margins,
    })
}

/// Degree data of the trivial quotient bundle: complex dimension `n` of
/// its fibre and the bi-weights of the residual torus action per edge
/// block.
#[derive(Debug, Clone, serde::Serialize)]
pub struct WeightEntry {
    pub edge: String,
    pub rows: usize,
    pub cols: usize,
    /// weight under the unit circle at the adjacency vertex
    pub circle_weight: i64,
    /// weight type under the complementary unitary factor (standard dual)
    pub complement_weight: i64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct EulerData {
    pub n: usize,
    pub degree: usize,
    pub weights: Vec<WeightEntry>,
}

pub fn euler_data(pair: &AdjacentPair) -> Result<EulerData> {
    let q = pair.quiver();
    let tail = pair.v.sub(&pair.v_ell)?;
    let e_k = pair.e_k();
    let mut n = 0;
    let mut weights = Vec::new();
    for edge in q.edges() {
        let rows = e_k.get(edge.head);
        let cols = tail.get(edge.tail);
        if rows * cols > 0 {
            n += rows * cols;
            weights.push(WeightEntry {
                edge: edge.id.clone(),
                rows,
                cols,
                circle_weight: 1,
                complement_weight: -1,
            });
        }
    }
    Ok(EulerData {
        n,
        degree: 2 * n,
        weights,
    })
}

/// Membership flags and tangent-complex ranks at a sample point of the
/// flow-line space, following the restricted-quiver model of the slice.
#[derive(Debug, Clone)]
pub struct HeckeReport {
    pub in_n: bool,
    pub in_t: bool,
    pub in_b: bool,
    /// rank of the connecting relation derivative on the slice coordinates
    pub rank_n_in_f: usize,
    /// rank of the full (trace-free diagonal + connecting) derivative
    pub rank_b_in_f: usize,
    /// rank of the connecting derivative restricted to the tangent of T
    pub rank_b_in_t: usize,
    /// the same complex seen from the ambient product model; the extra
    /// directions cannot lower the rank, so this equals `rank_n_in_f`
    pub rank_tilde: usize,
    /// Thom codimension from the block dimension formula
    pub d: usize,
    pub d_numeric: usize,
    /// formula = numeric check; skipped (None) if the loop condition fails
    pub d_matches: Option<bool>,
    pub loop_condition: bool,
    /// largest principal angle between the two normal-fibre computations
    pub normal_angle: Option<f64>,
    pub margins: Vec<f64>,
}

/// Tangent report at `(x_u, y)` with `y` a nonzero slice direction over
/// `e_k`-graded sources.
pub fn hecke_tangent_report(
    pair: &AdjacentPair,
    rels: &RelationSet,
    y: &GradedLinearMap,
) -> Result<HeckeReport> {
    let q = pair.quiver().clone();
    let e_k = pair.e_k();
    if y.source() != &e_k || y.target() != &pair.v_u {
        return Err(Error::ShapeError(
            "hecke point must connect e_k into v_u".into(),
        ));
    }
    if y.norm() == 0.0 {
        return Err(Error::PreconditionFailed("hecke point needs y != 0".into()));
    }
    let checks = relation_set_checks(&q, rels);
    let tol = 1e-9 * (1.0 + pair.x_u.norm()) * (1.0 + y.norm());

    // membership
    let zero_ek = Representation::zero(&q, e_k.clone());
    let nu_xu = relation_map(&pair.x_u, rels)?;
    let in_t = nu_xu.norm() <= tol;
    let dnu_y = d_nu(&pair.x_u, &zero_ek, rels, y)?;
    let in_n = dnu_y.norm() <= tol;
    let in_b = in_t && in_n;

    // restricted-quiver model of the slice at (x_u, y)
    let spec = build_negative_slice_quiver(&q, rels, &pair.v_u, &e_k)?;
    let result = expand_restrict(&spec)?;
    let xprime = negative_slice_rep(&spec, &result, &pair.x_u, y)?;
    let full = dnu_matrix(&xprime, &xprime, &result.rprime);

    // row ranges per restricted relation, in vectorisation order
    let vprime = spec.expanded_dims(&result.qprime);
    let mut row_ranges = Vec::new();
    let mut at = 0usize;
    for rel in result.rprime.relations() {
        let sz = vprime.get(rel.tail) * vprime.get(rel.head);
        row_ranges.push((at, sz));
        at += sz;
    }

    let is_cross = |i: usize| {
        let tag = result.relation_tags[i];
        let tp = &spec.parts()[tag.tail_part];
        let hp = &spec.parts()[tag.head_part];
        tp.id.ends_with(".2") && hp.id.ends_with(".1")
    };

    let mut cross_rows: Vec<CMat> = Vec::new();
    let mut diag_rows: Vec<CMat> = Vec::new();
    for (i, rel) in result.rprime.relations().iter().enumerate() {
        let (start, sz) = row_ranges[i];
        if sz == 0 {
            continue;
        }
        let rows = CMat::from(full.view((start, 0), (sz, full.ncols())));
        if is_cross(i) {
            cross_rows.push(rows);
        } else {
            // trace-free projection on square diagonal blocks
            let (r, c) = (vprime.get(rel.head), vprime.get(rel.tail));
            if r == c && r > 0 {
                let mut id_vec = crate::linalg::CVec::zeros(sz);
                for j in 0..r {
                    id_vec[j * r + j] = C64::new(1.0, 0.0);
                }
                let nrm = (r as f64).sqrt();
                let id_vec = id_vec / C64::new(nrm, 0.0);
                let proj = CMat::identity(sz, sz) - &id_vec * id_vec.adjoint();
                diag_rows.push(proj * rows);
            } else {
                diag_rows.push(rows);
            }
        }
    }
    let m_n = if cross_rows.is_empty() {
        CMat::zeros(0, full.ncols())
    } else {
        vstack(&cross_rows)
    };
    let m_sq = if diag_rows.is_empty() {
        CMat::zeros(0, full.ncols())
    } else {
        vstack(&diag_rows)
    };

    let d = 2 * rel_dim(rels, &e_k, &pair.v_u);
    let rank_n = rank_report(&m_n);
    let rank_b = rank_report(&vstack(&[m_sq.clone(), m_n.clone()]));
    let d_numeric = 2 * rank_n.rank;

    // tangent of T: kernel of the trace-free diagonal derivative
    let t_tangent = null_space(&m_sq);
    let p_t = &t_tangent * t_tangent.adjoint();
    let n_normal = column_space(&m_n.adjoint());
    let b_normal_in_t = column_space(&(p_t * m_n.adjoint()));
    let rank_b_in_t = b_normal_in_t.ncols();
    let normal_angle = max_principal_angle(&n_normal, &b_normal_in_t);

    let d_matches = if checks.loop_condition {
        Some(d == d_numeric)
    } else {
        None
    };

    Ok(HeckeReport {
        in_n,
        in_t,
        in_b,
        rank_n_in_f: rank_n.rank,
        rank_b_in_f: rank_b.rank,
        rank_b_in_t,
        rank_tilde: rank_n.rank,
        d,
        d_numeric,
        d_matches,
        loop_condition: checks.loop_condition,
        normal_angle,
        margins: vec![rank_n.margin(), rank_b.margin()],
    })
}

/// Numerically measured complex codimension of the kernel-dimension
/// stratum inside the negative slice at a flow-line point `dx`: the rank
/// of the first-order rank-preservation conditions (cokernel projection of
/// the perturbed stacked maps against the kernel) restricted to slice
/// directions.
pub fn stratum_codim_in_slice(
    pair: &AdjacentPair,
    rels: &RelationSet,
    dx: &GradedLinearMap,
) -> Result<(usize, f64)> {
    let q = pair.quiver().clone();
    let rest = pair.v.sub(&pair.v_u)?;
    let tail = pair.v.sub(&pair.v_ell)?;
    let ambient = pair.ambient_x_u()?;
    let basis = negative_slice_at(&ambient, rels, &rest)?;
    if basis.is_empty() {
        return Ok((0, f64::INFINITY));
    }
    // per-vertex kernels and cokernel projectors of the stacked maps at dx
    let mut kernels: Vec<Option<CMat>> = Vec::new();
    let mut coker_proj: Vec<Option<CMat>> = Vec::new();
    for j in 0..q.vertex_count() {
        if rest.get(j) == 0 || tail.get(j) == 0 {
            kernels.push(None);
            coker_proj.push(None);
            continue;
        }
        let rows: Vec<CMat> = q
            .edges_with_tail(j)
            .map(|(e, _)| dx.block(e).clone())
            .collect();
        if rows.is_empty() {
            kernels.push(None);
            coker_proj.push(None);
            continue;
        }
        let stacked = vstack(&rows);
        let kernel = null_space(&stacked);
        if kernel.ncols() != tail.get(j) {
            return Err(Error::NotOnFlowLine(format!(
                "kernel dimension {} at vertex {:?}, expected {}",
                kernel.ncols(),
                q.vertex_id(j),
                tail.get(j)
            )));
        }
        let image = column_space(&stacked);
        let proj = CMat::identity(stacked.nrows(), stacked.nrows()) - &image * image.adjoint();
        kernels.push(Some(kernel));
        coker_proj.push(Some(proj));
    }
    // condition map on slice coefficients
    let dim_out: usize = (0..q.vertex_count())
        .map(|j| match (&kernels[j], &coker_proj[j]) {
            (Some(k), Some(p)) => p.nrows() * k.ncols(),
            _ => 0,
        })
        .sum();
    let m = crate::linalg::operator_matrix(basis.len(), dim_out, |c| {
        let mut delta = GradedLinearMap::zero(&q, rest.clone(), pair.v_u.clone());
        for (i, b) in basis.iter().enumerate() {
            delta = delta.add(&b.scale(c[i]));
        }
        let mut out = Vec::with_capacity(dim_out);
        for j in 0..q.vertex_count() {
            let (Some(kernel), Some(proj)) = (&kernels[j], &coker_proj[j]) else {
                continue;
            };
            let rows: Vec<CMat> = q
                .edges_with_tail(j)
                .map(|(e, _)| delta.block(e).clone())
                .collect();
            let stacked = vstack(&rows);
            let cond = proj * stacked * kernel;
            out.extend_from_slice(cond.as_slice());
        }
        crate::linalg::CVec::from_vec(out)
    });
    let r = rank_report(&m);
    Ok((r.rank, r.margin()))
}

/// Draws a slice direction at the ambient upper critical point and
/// projects it onto the stratum whose kernel dimension vector is
/// `v - v_ell`. Returns `None` when the projected direction fails the
/// margin or membership checks, so callers can resample.
pub fn sample_flow_line_point(
    pair: &AdjacentPair,
    rels: &RelationSet,
    rng: &mut impl Rng,
) -> Result<Option<GradedLinearMap>> {
    let q = pair.quiver().clone();
    let rest = pair.v.sub(&pair.v_u)?;
    let tail = pair.v.sub(&pair.v_ell)?;
    let ambient = pair.ambient_x_u()?;
    let basis = negative_slice_at(&ambient, rels, &rest)?;
    if basis.is_empty() {
        return Ok(None);
    }
    let mut y = GradedLinearMap::zero(&q, rest.clone(), pair.v_u.clone());
    for b in &basis {
        y = y.add(&b.scale(complex_normal(rng)));
    }
    // truncate per-vertex singular values down to the stratum
    let mut projected = y.clone();
    for j in 0..q.vertex_count() {
        let cols = rest.get(j);
        if cols == 0 {
            continue;
        }
        let keep = cols - tail.get(j);
        let rows: Vec<CMat> = q
            .edges_with_tail(j)
            .map(|(e, _)| y.block(e).clone())
            .collect();
        if rows.is_empty() {
            continue;
        }
        let stacked = vstack(&rows);
        if stacked.nrows() == 0 {
            continue;
        }
        let svd = stacked.clone().svd(false, true);
        let v_t = svd.v_t.as_ref().expect("svd v requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| {
            svd.singular_values[b]
                .partial_cmp(&svd.singular_values[a])
                .unwrap()
        });
        if keep < order.len() {
            let smax = svd.singular_values[order[0]].max(1e-300);
            if keep > 0 && svd.singular_values[order[keep - 1]] / smax < 1e-6 {
                return Ok(None); // margin too small, resample
            }
            let mut proj = CMat::zeros(cols, cols);
            for &i in order.iter().take(keep) {
                let row = v_t.row(i);
                let col = row.adjoint();
                proj += &col * row;
            }
            for (e, _) in q.edges_with_tail(j) {
                let b = projected.block(e).clone();
                if b.nrows() > 0 {
                    *projected.block_mut(e) = b * &proj;
                }
            }
        }
    }
    // verify the projection stayed on the slice
    let (x1, x2, _, _) = ambient.block_split(&pair.v_u, &rest)?;
    let scale = 1.0 + projected.norm();
    let rho_err = crate::rep::inf_action_adjoint(&x1, &x2, &projected)?.norm();
    let dnu_err = d_nu(&x1, &x2, rels, &projected)?.norm();
    if rho_err > 1e-8 * scale || dnu_err > 1e-8 * scale {
        return Ok(None);
    }
    if projected.norm() < 1e-6 {
        return Ok(None);
    }
    Ok(Some(projected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{a1_double, jordan_double};
    use crate::rng::trial_rng;

    fn pair_011(
        qr: (Quiver, RelationSet),
        ambient: Vec<usize>,
    ) -> (AdjacentPair, RelationSet) {
        let (q, r) = qr;
        let q = Arc::new(q);
        let v = DimensionVector::new(&q, ambient).unwrap();
        let v_u = DimensionVector::new(&q, vec![0, 1]).unwrap();
        let x_u = Representation::zero(&q, v_u.clone());
        let k = q.vertex_index("1").unwrap();
        (AdjacentPair::new(&q, v, v_u, k, x_u).unwrap(), r)
    }

    #[test]
    fn adjacent_fibre_worked_cases() {
        let (pair, _) = pair_011(jordan_double(), vec![1, 1]);
        let f = adjacent_fibre(&pair).unwrap();
        assert_eq!(f.coker_dim, 1);
        assert_eq!(f.hom0_dim, 0);
        let (pair_a1, _) = pair_011(a1_double(), vec![1, 1]);
        let fa = adjacent_fibre(&pair_a1).unwrap();
        assert_eq!(fa.coker_dim, 1);
    }

    #[test]
    fn adjacent_fibre_with_empty_hom_space() {
        // a framing-only upper point on the handsaw: no edges connect the
        // adjacency vertex to its support
        let (q, _r) = crate::builders::build_handsaw(3).unwrap();
        let q = Arc::new(q);
        let w3 = q.vertex_index("W3").unwrap();
        let w1 = q.vertex_index("W1").unwrap();
        let v_u = DimensionVector::unit(&q, w3);
        let mut v_dims = vec![0; q.vertex_count()];
        v_dims[w3] = 1;
        v_dims[w1] = 1;
        let v = DimensionVector::new(&q, v_dims).unwrap();
        let x_u = Representation::zero(&q, v_u.clone());
        let pair = AdjacentPair::new(&q, v, v_u, w1, x_u).unwrap();
        let f = adjacent_fibre(&pair).unwrap();
        assert_eq!(f.hom1_dim, 0);
        assert_eq!(f.coker_dim, 0);
    }

    #[test]
    fn euler_degree_worked_cases() {
        // v = v_ell: both sides empty
        let (pair, _) = pair_011(jordan_double(), vec![1, 1]);
        let e = euler_data(&pair).unwrap();
        assert_eq!((e.n, e.degree), (0, 0));
        // one extra column at the loop vertex: the two loops contribute
        let (pair2, _) = pair_011(jordan_double(), vec![2, 1]);
        let e2 = euler_data(&pair2).unwrap();
        assert_eq!((e2.n, e2.degree), (2, 4));
        let loops: Vec<&str> = e2.weights.iter().map(|w| w.edge.as_str()).collect();
        assert_eq!(loops, vec!["B", "Bbar"]);

        // handsaw: fibre blocks enumerated edge by edge
        let (hq, _) = crate::builders::build_handsaw(3).unwrap();
        let hq = Arc::new(hq);
        let w3 = hq.vertex_index("W3").unwrap();
        let v1 = hq.vertex_index("V1").unwrap();
        let v2v = hq.vertex_index("V2").unwrap();
        let v_u = DimensionVector::unit(&hq, w3);
        let mut dims = vec![0; hq.vertex_count()];
        dims[w3] = 1;
        dims[v1] = 1;
        dims[v2v] = 1; // the leftover column sits at V2
        let v = DimensionVector::new(&hq, dims).unwrap();
        let x_u = Representation::zero(&hq, v_u.clone());
        let pair_h = AdjacentPair::new(&hq, v, v_u, v1, x_u).unwrap();
        let eh = euler_data(&pair_h).unwrap();
        // by hand: edges with tail V2 and head V1 do not exist, so n = 0
        let manual: usize = hq
            .edges()
            .iter()
            .filter(|e| e.tail == v2v && e.head == v1)
            .count();
        assert_eq!(eh.n, manual);
        assert_eq!(eh.degree, 2 * manual);
    }

    #[test]
    fn negative_slice_worked_cases() {
        let (q, r) = jordan_double();
        let q = Arc::new(q);
        let v = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let v2 = DimensionVector::new(&q, vec![1, 0]).unwrap();
        let x = Representation::zero(&q, v);
        // without relations: only the connecting edge block survives
        let empty = RelationSet::empty();
        let basis = negative_slice_at(&x, &empty, &v2).unwrap();
        assert_eq!(basis.len(), 1);
        let abar = x.quiver().edge_index("abar").unwrap();
        assert!(basis[0].block(abar).norm() > 0.99);
        // quadratic relations vanish to first order at zero
        let basis_r = negative_slice_at(&x, &r, &v2).unwrap();
        assert_eq!(basis_r.len(), 1);
    }

    #[test]
    fn bundle_ranks_trivial_and_loop_cases() {
        // v = v_ell: all three ranks vanish
        let (pair, r) = pair_011(jordan_double(), vec![1, 1]);
        let mut rng = trial_rng(31, "bundle", 0);
        let y = sample_flow_line_point(&pair, &r, &mut rng)
            .unwrap()
            .expect("slice is one-dimensional");
        let b = bundle_ranks(&pair, &y).unwrap();
        assert_eq!((b.rank_d, b.rank_v, b.rank_t), (0, 0, 0));
        assert_eq!(b.lambda_u, 2);

        // v = (2,1): the quotient bundle picks up both loops
        let (pair2, r2) = pair_011(jordan_double(), vec![2, 1]);
        for t in 0..5 {
            let mut rng = trial_rng(32, "bundle2", t);
            if let Some(y) = sample_flow_line_point(&pair2, &r2, &mut rng).unwrap() {
                let b2 = bundle_ranks(&pair2, &y).unwrap();
                assert_eq!(b2.rank_t, 4);
                assert_eq!(b2.rank_v, b2.rank_d + b2.rank_t);
                return;
            }
        }
        panic!("no flow-line sample accepted");
    }

    #[test]
    fn hecke_report_zero_thom_class_case() {
        let (pair, r) = pair_011(jordan_double(), vec![1, 1]);
        let q = pair.quiver().clone();
        let mut y = GradedLinearMap::zero(&q, pair.e_k(), pair.v_u.clone());
        y.set_scalar("abar", C64::new(1.0, 0.0)).unwrap();
        let rep = hecke_tangent_report(&pair, &r, &y).unwrap();
        assert_eq!(rep.d, 0);
        assert_eq!(rep.d_numeric, 0);
        assert_eq!(rep.d_matches, Some(true));
        assert!(rep.in_t && rep.in_n && rep.in_b);
        assert_eq!(rep.rank_n_in_f, 0);
    }

    #[test]
    fn hecke_report_at_minimizer_pair() {
        // v_u = (1,1) with the stable minimizer, k = 1, v_ell = (2,1)
        let (q, r) = jordan_double();
        let q = Arc::new(q);
        let v = DimensionVector::new(&q, vec![2, 1]).unwrap();
        let v_u = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let mut x_u = Representation::zero(&q, v_u.clone());
        x_u.set_scalar("abar", C64::new(std::f64::consts::SQRT_2, 0.0))
            .unwrap();
        let k = q.vertex_index("1").unwrap();
        let pair = AdjacentPair::new(&q, v, v_u.clone(), k, x_u.clone()).unwrap();
        // generic slice direction at (x_u, e_1)
        let ambient_xu =
            Representation::block_embed(&x_u, &Representation::zero(&q, pair.e_k()), None)
                .unwrap();
        let basis = negative_slice_at(&ambient_xu, &r, &pair.e_k()).unwrap();
        assert!(!basis.is_empty());
        let mut rng = trial_rng(33, "hecke", 0);
        let mut y = GradedLinearMap::zero(&q, pair.e_k(), v_u);
        for b in &basis {
            y = y.add(&b.scale(complex_normal(&mut rng)));
        }
        let rep = hecke_tangent_report(&pair, &r, &y).unwrap();
        assert_eq!(rep.d, 2, "single square relation block");
        assert_eq!(rep.d_matches, Some(true));
        assert!(rep.in_t);
        let angle = rep.normal_angle.expect("normals have equal dimension");
        assert!(angle < 1e-8, "normal fibres agree, angle {angle}");
    }

    /// Jordan pair with a nonzero upper point: v = (3,1), v_u = (1,1)
    /// critical at |abar| = 2, adjacency at the loop vertex.
    fn rich_pair() -> (AdjacentPair, RelationSet) {
        let (q, r) = jordan_double();
        let q = Arc::new(q);
        let v = DimensionVector::new(&q, vec![3, 1]).unwrap();
        let v_u = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let mut x_u = Representation::zero(&q, v_u.clone());
        x_u.set_scalar("abar", C64::new(2.0, 0.0)).unwrap();
        x_u.set_scalar("B", C64::new(0.3, 0.1)).unwrap();
        x_u.set_scalar("Bbar", C64::new(-0.2, 0.5)).unwrap();
        let k = q.vertex_index("1").unwrap();
        (AdjacentPair::new(&q, v, v_u, k, x_u).unwrap(), r)
    }

    #[test]
    fn rich_pair_has_nontrivial_bundle_split() {
        let (pair, r) = rich_pair();
        for t in 0..10 {
            let mut rng = trial_rng(57, "rich", t);
            let Some(y) = sample_flow_line_point(&pair, &r, &mut rng).unwrap() else {
                continue;
            };
            let b = bundle_ranks(&pair, &y).unwrap();
            assert_eq!(b.rank_d, 2);
            assert_eq!(b.rank_t, 4);
            assert_eq!(b.rank_v, 6);
            assert_eq!(b.lambda_u, 8);
            // measured codimension of the stratum agrees with the fibre rank
            let (codim, margin) = stratum_codim_in_slice(&pair, &r, &y).unwrap();
            assert_eq!(2 * codim, b.nu);
            assert!(margin > 1e3);
            return;
        }
        panic!("no flow-line sample accepted");
    }

    #[test]
    fn open_stratum_has_zero_measured_codim() {
        let (pair, r) = pair_011(jordan_double(), vec![2, 1]);
        let mut rng = trial_rng(58, "open-stratum", 0);
        let y = sample_flow_line_point(&pair, &r, &mut rng)
            .unwrap()
            .expect("generic rows are on the stratum");
        let (codim, _) = stratum_codim_in_slice(&pair, &r, &y).unwrap();
        assert_eq!(codim, 0);
    }

    #[test]
    fn hecke_membership_off_shell() {
        // a stable upper point that violates the relations: the T flag
        // drops while the N flag is evaluated independently
        let (q, r) = jordan_double();
        let q = Arc::new(q);
        let v = DimensionVector::new(&q, vec![2, 1]).unwrap();
        let v_u = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let mut x_u = Representation::zero(&q, v_u.clone());
        x_u.set_scalar("a", C64::new(1.0, 0.0)).unwrap();
        x_u.set_scalar("abar", C64::new(1.0, 0.0)).unwrap();
        x_u.set_scalar("Bbar", C64::new(1.0, 0.0)).unwrap();
        let k = q.vertex_index("1").unwrap();
        let pair = AdjacentPair::new(&q, v, v_u.clone(), k, x_u).unwrap();
        let mut y = GradedLinearMap::zero(&q, pair.e_k(), v_u);
        y.set_scalar("B", C64::new(1.0, 0.0)).unwrap();
        let rep = hecke_tangent_report(&pair, &r, &y).unwrap();
        assert!(!rep.in_t);
        assert!(!rep.in_b);
        // the Bbar block of x_u feeds the y_B slot of the relation derivative
        assert!(!rep.in_n);
        assert_eq!(rep.in_b, rep.in_t && rep.in_n);
    }

    #[test]
    fn minimizer_slice_dimension_matches_h1() {
        let (q, r) = jordan_double();
        let q = Arc::new(q);
        let v_u = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let v2 = DimensionVector::new(&q, vec![1, 0]).unwrap();
        let mut x_u = Representation::zero(&q, v_u);
        x_u.set_scalar("abar", C64::new(std::f64::consts::SQRT_2, 0.0))
            .unwrap();
        let ambient = crate::flow::embed_block(
            &x_u,
            &DimensionVector::new(&q, vec![2, 1]).unwrap(),
        )
        .unwrap();
        let basis = negative_slice_at(&ambient, &r, &v2).unwrap();
        assert_eq!(basis.len(), 2);
    }

    #[test]
    fn hecke_rejects_zero_direction() {
        let (pair, r) = pair_011(jordan_double(), vec![1, 1]);
        let y = GradedLinearMap::zero(pair.quiver(), pair.e_k(), pair.v_u.clone());
        assert!(matches!(
            hecke_tangent_report(&pair, &r, &y),
            Err(Error::PreconditionFailed(_))
        ));
    }
}
