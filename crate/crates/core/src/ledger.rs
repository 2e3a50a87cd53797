//! The integer degree/rank ledger of one adjacent pair: Morse index above,
//! flow-line codimension, Euler and Thom degrees, and the induced degree
//! shift of the convolution step; plus the per-block factorization of a
//! critical classification.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{hessian_index, CriticalClassification, FlowOpts};
use crate::linalg::CMat;
use crate::quiver::{
    induced_central, relation_set_checks, CentralElement, DimensionVector, RelationSet,
};
use crate::rng::{random_unitary, trial_rng};
use crate::slice::{
    bundle_ranks, euler_data, hecke_tangent_report, negative_slice_at, sample_flow_line_point,
    AdjacentPair,
};

/// Integer record attached to one adjacent pair. All rank-type entries are
/// even real dimensions; `shift = d - lambda_u` is the degree shift of the
/// induced homomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvolutionLedger {
    pub v: Vec<usize>,
    pub v_u: Vec<usize>,
    pub v_ell: Vec<usize>,
    pub vertex: String,
    pub lambda_u: usize,
    pub nu: usize,
    pub euler_degree: usize,
    pub thom_degree_d: usize,
    pub chern_degree: usize,
    pub shift: i64,
    pub grassmannian_dim: usize,
    pub provenance: LedgerProvenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerProvenance {
    pub seed: u64,
    pub samples: usize,
    pub lambda_votes: BTreeMap<usize, usize>,
    pub nu_votes: BTreeMap<usize, usize>,
    pub d_numeric: usize,
    pub min_margin_exponent: i32,
}

impl Eq for LedgerProvenance {}

fn majority(votes: &BTreeMap<usize, usize>, what: &str) -> Result<usize> {
    let total: usize = votes.values().sum();
    let (&value, &count) = votes
        .iter()
        .max_by_key(|(_, &c)| c)
        .ok_or_else(|| Error::UnstableLedger(format!("no {what} samples")))?;
    if 2 * count <= total {
        return Err(Error::UnstableLedger(format!(
            "{what} votes are split: {votes:?}"
        )));
    }
    Ok(value)
}

/// Assembles the ledger by sampling the upper critical set and the
/// flow-line stratum. Integer ranks are decided by majority over samples,
/// never averaged; all margins land in the provenance block.
pub fn build_ledger(
    pair: &AdjacentPair,
    rels: &RelationSet,
    samples: usize,
    seed: u64,
) -> Result<ConvolutionLedger> {
    let q = pair.quiver().clone();
    let checks = relation_set_checks(&q, rels);
    if !checks.complete {
        return Err(Error::PreconditionFailed(
            "ledger needs a complete quadratic relation set".into(),
        ));
    }
    let samples = samples.max(1);
    let mut min_margin = f64::INFINITY;

    // Morse index above, sampled over the unitary orbit of the critical point
    let ambient = pair.ambient_x_u()?;
    let mut lambda_votes: BTreeMap<usize, usize> = BTreeMap::new();
    for s in 0..samples {
        let mut rng = trial_rng(seed, "ledger-lambda", s as u64);
        let x = if s == 0 {
            ambient.clone()
        } else {
            let g: Vec<CMat> = (0..q.vertex_count())
                .map(|k| random_unitary(&mut rng, pair.v.get(k)))
                .collect();
            let g_inv: Vec<CMat> = g.iter().map(|m| m.adjoint()).collect();
            ambient.conjugate(&g, &g_inv)
        };
        let hess = hessian_index(&x, &pair.alpha, &FlowOpts::default())?;
        min_margin = min_margin.min(hess.eigen_margin);
        *lambda_votes.entry(hess.index).or_insert(0) += 1;
    }
    let lambda_u = majority(&lambda_votes, "lambda")?;

    // flow-line codimension, sampled on the stratum; empty complexes when
    // the ambient space ends at v_ell
    let mut nu_votes: BTreeMap<usize, usize> = BTreeMap::new();
    if pair.v == pair.v_ell {
        nu_votes.insert(0, samples);
    } else {
        let mut got = 0usize;
        let mut trial = 0u64;
        while got < samples && trial < (samples as u64) * 20 {
            let mut rng = trial_rng(seed, "ledger-nu", trial);
            trial += 1;
            if let Some(y) = sample_flow_line_point(pair, rels, &mut rng)? {
                let b = bundle_ranks(pair, &y)?;
                for m in &b.margins {
                    min_margin = min_margin.min(*m);
                }
                *nu_votes.entry(b.nu).or_insert(0) += 1;
                got += 1;
            }
        }
        if got == 0 {
            return Err(Error::UnstableLedger(
                "no flow-line sample passed the margin checks".into(),
            ));
        }
    }
    let nu = majority(&nu_votes, "nu")?;

    let euler = euler_data(pair)?;

    // Thom codimension, with the numerical cross-check at a sampled point
    let mut d = None;
    let mut d_numeric = 0usize;
    for trial in 0..(samples as u64) * 20 {
        let mut rng = trial_rng(seed, "ledger-d", trial);
        let ambient_xu = crate::rep::Representation::block_embed(
            &pair.x_u,
            &crate::rep::Representation::zero(&q, pair.e_k()),
            None,
        )?;
        let basis = negative_slice_at(&ambient_xu, rels, &pair.e_k())?;
        if basis.is_empty() {
            // empty slice: the formula side alone decides
            let rep = hecke_dims_only(pair, rels);
            d = Some(rep);
            d_numeric = rep;
            break;
        }
        let mut y = crate::rep::GradedLinearMap::zero(&q, pair.e_k(), pair.v_u.clone());
        for b in &basis {
            y = y.add(&b.scale(crate::rng::complex_normal(&mut rng)));
        }
        if y.norm() < 1e-8 {
            continue;
        }
        let report = hecke_tangent_report(pair, rels, &y)?;
        for m in &report.margins {
            min_margin = min_margin.min(*m);
        }
        d = Some(report.d);
        d_numeric = report.d_numeric;
        if report.loop_condition && report.d != report.d_numeric {
            return Err(Error::UnstableLedger(format!(
                "thom degree formula {} disagrees with numeric {}",
                report.d, report.d_numeric
            )));
        }
        break;
    }
    let d = d.ok_or_else(|| Error::UnstableLedger("no hecke sample accepted".into()))?;

    if lambda_u % 2 != 0 || nu % 2 != 0 {
        return Err(Error::UnstableLedger(format!(
            "odd real rank: lambda {lambda_u}, nu {nu}"
        )));
    }

    let grassmannian_dim: usize = (0..q.vertex_count())
        .map(|k| pair.v_u.get(k) * (pair.v_ell.get(k) - pair.v_u.get(k)))
        .sum();

    let min_margin_exponent = if min_margin.is_finite() {
        min_margin.log10().floor() as i32
    } else {
        i32::MAX
    };

    Ok(ConvolutionLedger {
        v: pair.v.dims().to_vec(),
        v_u: pair.v_u.dims().to_vec(),
        v_ell: pair.v_ell.dims().to_vec(),
        vertex: q.vertex_id(pair.vertex).to_string(),
        lambda_u,
        nu,
        euler_degree: euler.degree,
        thom_degree_d: d,
        chern_degree: 2,
        shift: d as i64 - lambda_u as i64,
        grassmannian_dim,
        provenance: LedgerProvenance {
            seed,
            samples,
            lambda_votes,
            nu_votes,
            d_numeric,
            min_margin_exponent,
        },
    })
}

impl ConvolutionLedger {
    /// Degree of the image of a class of degree `p`, composed with cup
    /// product by an extra class of degree `m` (the free parameter of the
    /// pushforward step): `p + m + shift`.
    pub fn shifted_degree(&self, p: i64, m: i64) -> i64 {
        p + m + self.shift
    }
}

fn hecke_dims_only(pair: &AdjacentPair, rels: &RelationSet) -> usize {
    let e_k = pair.e_k();
    2 * rels
        .relations()
        .iter()
        .map(|r| e_k.get(r.tail) * pair.v_u.get(r.head))
        .sum::<usize>()
}

/// Per-block labels of a critical classification: each block with its
/// induced admissible central element.
#[derive(Debug, Clone)]
pub struct CriticalFactorization {
    pub blocks: Vec<(DimensionVector, CentralElement)>,
}

pub fn critical_factorization(
    cls: &CriticalClassification,
    alpha: &CentralElement,
    ambient: &DimensionVector,
) -> Result<CriticalFactorization> {
    let mut blocks = Vec::new();
    for dims in &cls.hn.blocks {
        let induced = induced_central(alpha, ambient, dims)?;
        if !induced.is_admissible(dims) {
            return Err(Error::InadmissibleCentral(format!(
                "induced element fails admissibility on {dims}"
            )));
        }
        blocks.push((dims.clone(), induced));
    }
    let mut total = vec![0usize; ambient.dims().len()];
    for (dims, _) in &blocks {
        for (i, &d) in dims.dims().iter().enumerate() {
            total[i] += d;
        }
    }
    if total != ambient.dims() {
        return Err(Error::InvalidDimensionVector(
            "classification blocks do not sum to the ambient vector".into(),
        ));
    }
    Ok(CriticalFactorization { blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::jordan_double;
    use crate::flow::classify_critical;
    use crate::quiver::canonical_central;
    use crate::rep::Representation;
    use num_rational::Rational64;
    use std::sync::Arc;

    fn worked_pair() -> (AdjacentPair, RelationSet) {
        let (q, r) = jordan_double();
        let q = Arc::new(q);
        let v = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let v_u = DimensionVector::new(&q, vec![0, 1]).unwrap();
        let x_u = Representation::zero(&q, v_u.clone());
        let k = q.vertex_index("1").unwrap();
        (AdjacentPair::new(&q, v, v_u, k, x_u).unwrap(), r)
    }

    #[test]
    fn worked_ledger_values() {
        let (pair, r) = worked_pair();
        let ledger = build_ledger(&pair, &r, 3, 7).unwrap();
        assert_eq!(ledger.lambda_u, 2);
        assert_eq!(ledger.nu, 0);
        assert_eq!(ledger.euler_degree, 0);
        assert_eq!(ledger.thom_degree_d, 0);
        assert_eq!(ledger.shift, -2);
        assert_eq!(ledger.grassmannian_dim, 0);
        assert_eq!(ledger.chern_degree, 2);
    }

    #[test]
    fn shifted_degree_exposes_the_free_class_degree() {
        let (pair, r) = worked_pair();
        let ledger = build_ledger(&pair, &r, 1, 0).unwrap();
        assert_eq!(ledger.shifted_degree(5, 0), 5 + ledger.shift);
        assert_eq!(ledger.shifted_degree(5, 2), 7 + ledger.shift);
    }

    #[test]
    fn ledger_is_deterministic() {
        let (pair, r) = worked_pair();
        let a = build_ledger(&pair, &r, 3, 42).unwrap();
        let b = build_ledger(&pair, &r, 3, 42).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
        let c = build_ledger(&pair, &r, 3, 43).unwrap();
        assert_eq!(a.shift, c.shift);
    }

    #[test]
    fn factorization_of_zero_critical_point() {
        let (q, _) = jordan_double();
        let q = Arc::new(q);
        let v = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let alpha = canonical_central(&q, &v).unwrap();
        let zero = Representation::zero(&q, v.clone());
        let cls = classify_critical(&zero, &alpha, &FlowOpts::default()).unwrap();
        let fact = critical_factorization(&cls, &alpha, &v).unwrap();
        assert_eq!(fact.blocks.len(), 2);
        // each induced element vanishes on its support
        let (b0, a0) = &fact.blocks[0];
        assert_eq!(b0.dims(), &[0, 1]);
        assert_eq!(a0.get(1), Rational64::from(0));
        let (b1, a1) = &fact.blocks[1];
        assert_eq!(b1.dims(), &[1, 0]);
        assert_eq!(a1.get(0), Rational64::from(0));
        for (dims, a) in &fact.blocks {
            assert!(a.is_admissible(dims));
        }
    }

    #[test]
    fn factorization_of_minimizer_is_single_block() {
        let (q, _) = jordan_double();
        let q = Arc::new(q);
        let v = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let alpha = canonical_central(&q, &v).unwrap();
        let mut x = Representation::zero(&q, v.clone());
        x.set_scalar("abar", crate::linalg::C64::new(std::f64::consts::SQRT_2, 0.0))
            .unwrap();
        let cls = classify_critical(&x, &alpha, &FlowOpts::default()).unwrap();
        let fact = critical_factorization(&cls, &alpha, &v).unwrap();
        assert_eq!(fact.blocks.len(), 1);
        assert_eq!(fact.blocks[0].1.scalars(), alpha.scalars());
    }
}
