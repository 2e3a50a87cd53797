//! Deformation complexes at block-diagonal representations and the
//! cokernel formula for the derivative of the relation map.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, null_space, operator_matrix, rank_report, vstack, CMat, RankReport};
use crate::quiver::{dims_and_forms, relation_set_checks, DimensionVector, Quiver, RelationSet};
use crate::rep::{
    d_nu, inf_action, GradedLinearMap, LieAlgebraElement, RelationValue, Representation,
};

/// Cohomology dimensions of the three-term complex
/// `Hom0 -> Hom1 -> Rel` at `x1 (+) x2`, together with an orthonormal basis
/// of the middle cohomology (the negative slice) and the rank margins.
#[derive(Debug, Clone)]
pub struct DeformationReport {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub ringel_r: i64,
    pub slice_basis: Vec<GradedLinearMap>,
    pub margins: Vec<f64>,
    pub rank_rho: RankReport,
    pub rank_dnu: RankReport,
    pub rank_stack: RankReport,
}

impl DeformationReport {
    pub fn index(&self) -> i64 {
        self.h0 as i64 - self.h1 as i64 + self.h2 as i64
    }

    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Matrix of the infinitesimal action `Hom0(v2, v1) -> Hom1(v2, v1)` at
/// `(x1, x2)`, in vectorised coordinates.
pub fn rho_matrix(x1: &Representation, x2: &Representation) -> CMat {
    let q = x1.quiver().clone();
    let v1 = x1.dims().clone();
    let v2 = x2.dims().clone();
    let dim_in: usize = (0..q.vertex_count()).map(|k| v1.get(k) * v2.get(k)).sum();
    let dim_out: usize = q
        .edges()
        .iter()
        .map(|e| v1.get(e.head) * v2.get(e.tail))
        .sum();
    operator_matrix(dim_in, dim_out, |vin| {
        let u = LieAlgebraElement::from_vec(&q, v2.clone(), v1.clone(), vin);
        inf_action(x1, x2, &u).expect("shapes fixed").to_vec()
    })
}

/// Matrix of `d nu` at `(x1, x2)`: `Hom1(v2, v1) -> Rel(v2, v1)`.
pub fn dnu_matrix(x1: &Representation, x2: &Representation, rels: &RelationSet) -> CMat {
    let q = x1.quiver().clone();
    let v1 = x1.dims().clone();
    let v2 = x2.dims().clone();
    let dim_in: usize = q
        .edges()
        .iter()
        .map(|e| v1.get(e.head) * v2.get(e.tail))
        .sum();
    let dim_out: usize = rels
        .relations()
        .iter()
        .map(|r| v1.get(r.head) * v2.get(r.tail))
        .sum();
    operator_matrix(dim_in, dim_out, |vin| {
        let dx = GradedLinearMap::from_vec(&q, v2.clone(), v1.clone(), vin);
        d_nu(x1, x2, rels, &dx).expect("shapes fixed").to_vec()
    })
}

/// Computes `h^0 = dim ker rho`, `h^1 = dim (ker rho^* cap ker d nu)` and
/// `h^2 = dim ker (d nu)^*` for the complex at `x1 (+) x2`; the middle
/// cohomology comes back as an orthonormal basis.
pub fn deformation_complex(
    q: &Arc<Quiver>,
    rels: &RelationSet,
    x1: &Representation,
    x2: &Representation,
) -> Result<DeformationReport> {
    let v1 = x1.dims().clone();
    let v2 = x2.dims().clone();
    let forms = dims_and_forms(q, rels, &v1, &v2)?;
    let a = rho_matrix(x1, x2);
    let b = dnu_matrix(x1, x2, rels);

    let rank_rho = rank_report(&a);
    let rank_dnu = rank_report(&b);
    let h0 = a.ncols() - rank_rho.rank;
    let h2 = b.nrows() - rank_dnu.rank;

    let stacked = vstack(&[a.adjoint(), b.clone()]);
    let rank_stack = rank_report(&stacked);
    let kernel = null_space(&stacked);
    let h1 = kernel.ncols();

    let slice_basis: Vec<GradedLinearMap> = (0..h1)
        .map(|j| {
            GradedLinearMap::from_vec(q, v2.clone(), v1.clone(), &kernel.column(j).into_owned())
        })
        .collect();

    let margins = vec![rank_rho.margin(), rank_dnu.margin(), rank_stack.margin()];
    Ok(DeformationReport {
        h0,
        h1,
        h2,
        ringel_r: forms.ringel_r,
        slice_basis,
        margins,
        rank_rho,
        rank_dnu,
        rank_stack,
    })
}

/// Two routes to the cokernel dimension of `d nu` at `(x1, 0)`: singular
/// values versus the block formula over the orthocomplement of the image
/// of `x1`. Requires a complete quadratic relation set.
#[derive(Debug, Clone)]
pub struct CokernelCheck {
    pub numeric: usize,
    pub formula: usize,
    pub perp_dims: DimensionVector,
    pub margin: f64,
}

pub fn coker_dnu_check(
    q: &Arc<Quiver>,
    rels: &RelationSet,
    x1: &Representation,
    v2: &DimensionVector,
) -> Result<CokernelCheck> {
    let checks = relation_set_checks(q, rels);
    if !checks.complete {
        return Err(Error::PreconditionFailed(
            "cokernel formula needs a complete quadratic relation set".into(),
        ));
    }
    let x2 = Representation::zero(q, v2.clone());
    let b = dnu_matrix(x1, &x2, rels);
    let rank_b = rank_report(&b);
    let numeric = b.nrows() - rank_b.rank;

    // per-vertex dimension of the orthocomplement of the image of x1
    let v1 = x1.dims();
    let mut perp = Vec::with_capacity(q.vertex_count());
    let mut margin = rank_b.margin();
    for k in 0..q.vertex_count() {
        let incoming: Vec<CMat> = q
            .edges_with_head(k)
            .map(|(e, _)| x1.block(e).clone())
            .collect();
        if incoming.is_empty() || v1.get(k) == 0 {
            perp.push(v1.get(k));
            continue;
        }
        let stacked = linalg::hstack(&incoming);
        let r = rank_report(&stacked);
        margin = margin.min(r.margin());
        perp.push(v1.get(k) - r.rank);
    }
    let perp_dims = DimensionVector::new(q, perp)?;
    let formula: usize = rels
        .relations()
        .iter()
        .map(|r| v2.get(r.tail) * perp_dims.get(r.head))
        .sum();
    Ok(CokernelCheck {
        numeric,
        formula,
        perp_dims,
        margin,
    })
}

/// Removes the trace component from every square relation block.
pub fn relation_trace_free(u: &RelationValue) -> RelationValue {
    let mut out = u.clone();
    for i in 0..out.blocks().len() {
        let b = out.block(i).clone();
        if b.nrows() == b.ncols() && b.nrows() > 0 {
            let n = b.nrows();
            let t = b.trace() / crate::linalg::C64::new(n as f64, 0.0);
            let mut m = b;
            for j in 0..n {
                m[(j, j)] -= t;
            }
            out.set_block(i, m);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{a1_double, jordan_double};
    use crate::linalg::C64;
    use crate::quiver::DimensionVector;
    use crate::rng::trial_rng;

    fn sqrt2() -> C64 {
        C64::new(std::f64::consts::SQRT_2, 0.0)
    }

    #[test]
    fn jordan_deformation_report() {
        let (q, r) = jordan_double();
        let q = Arc::new(q);
        let v1 = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let v2 = DimensionVector::new(&q, vec![1, 0]).unwrap();
        let mut x1 = Representation::zero(&q, v1);
        x1.set_scalar("abar", sqrt2()).unwrap();
        let x2 = Representation::zero(&q, v2);
        let rep = deformation_complex(&q, &r, &x1, &x2).unwrap();
        assert_eq!((rep.h0, rep.h1, rep.h2), (0, 2, 1));
        assert_eq!(rep.ringel_r, -1);
        assert_eq!(rep.index(), rep.ringel_r);
        for (i, b) in rep.slice_basis.iter().enumerate() {
            for (j, c) in rep.slice_basis.iter().enumerate() {
                let g = b.inner(c);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g - C64::new(want, 0.0)).norm() < 1e-9);
            }
            assert!(crate::rep::inf_action_adjoint(&x1, &x2, b).unwrap().norm() < 1e-9);
            assert!(d_nu(&x1, &x2, &r, b).unwrap().norm() < 1e-9);
        }
    }

    #[test]
    fn zero_representation_degenerates() {
        let (q, r) = jordan_double();
        let q = Arc::new(q);
        let v1 = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let v2 = DimensionVector::new(&q, vec![1, 0]).unwrap();
        let x1 = Representation::zero(&q, v1.clone());
        let x2 = Representation::zero(&q, v2.clone());
        let rep = deformation_complex(&q, &r, &x1, &x2).unwrap();
        let forms = dims_and_forms(&q, &r, &v1, &v2).unwrap();
        assert_eq!(rep.h0 as i64, forms.hom0);
        assert_eq!(rep.h1 as i64, forms.hom1);
        assert_eq!(rep.h2 as i64, forms.rel);
    }

    #[test]
    fn a1_h0_vanishes_at_stable_point() {
        let (q, r) = a1_double();
        let q = Arc::new(q);
        let v1 = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let v2 = DimensionVector::new(&q, vec![1, 0]).unwrap();
        let mut x1 = Representation::zero(&q, v1);
        x1.set_scalar("abar", sqrt2()).unwrap();
        let x2 = Representation::zero(&q, v2);
        let rep = deformation_complex(&q, &r, &x1, &x2).unwrap();
        assert_eq!(rep.h0, 0);
        assert_eq!(rep.index(), rep.ringel_r);
    }

    #[test]
    fn cokernel_check_worked_cases() {
        let (q, r) = jordan_double();
        let q = Arc::new(q);
        let v1 = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let v2 = DimensionVector::new(&q, vec![1, 0]).unwrap();
        let mut x1 = Representation::zero(&q, v1.clone());
        x1.set_scalar("abar", sqrt2()).unwrap();
        let c = coker_dnu_check(&q, &r, &x1, &v2).unwrap();
        assert_eq!(c.numeric, 1);
        assert_eq!(c.formula, 1);
        assert_eq!(c.perp_dims.dims(), &[1, 0]);

        // surjective images at both vertices force a zero cokernel
        let mut rng = trial_rng(3, "coker", 0);
        let mut full = Representation::random(&q, v1, &mut rng);
        full.set_scalar("a", C64::new(0.0, 0.0)).unwrap();
        let c2 = coker_dnu_check(&q, &r, &full, &v2).unwrap();
        assert_eq!(c2.formula, 0);
        assert_eq!(c2.numeric, 0);

        let (qa, ra) = a1_double();
        let qa = Arc::new(qa);
        let v1a = DimensionVector::new(&qa, vec![1, 1]).unwrap();
        let v2a = DimensionVector::new(&qa, vec![1, 0]).unwrap();
        let mut xa = Representation::zero(&qa, v1a);
        xa.set_scalar("abar", sqrt2()).unwrap();
        let ca = coker_dnu_check(&qa, &ra, &xa, &v2a).unwrap();
        assert_eq!(ca.numeric, 1);
        assert_eq!(ca.formula, 1);
    }

    #[test]
    fn cokernel_check_requires_completeness() {
        use crate::quiver::{Path, Relation};
        let (q, full) = jordan_double();
        let q = Arc::new(q);
        let v1 = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let v2 = DimensionVector::new(&q, vec![1, 0]).unwrap();
        let x1 = Representation::zero(&q, v1);
        // a second relation at vertex 1 breaks completeness clause 2
        let k1 = q.vertex_index("1").unwrap();
        let extra = Relation::new(
            &q,
            "r_extra".into(),
            k1,
            k1,
            vec![(
                C64::new(1.0, 0.0),
                Path::from_ids(&q, &["Bbar", "B"]).unwrap(),
            )],
        )
        .unwrap();
        let mut rels = full.relations().to_vec();
        rels.push(extra);
        let broken = RelationSet::new(rels).unwrap();
        assert!(matches!(
            coker_dnu_check(&q, &broken, &x1, &v2),
            Err(Error::PreconditionFailed(_))
        ));
    }
}
