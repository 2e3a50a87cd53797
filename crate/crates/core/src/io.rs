//! JSON encodings of quivers, relation sets, dimension vectors,
//! representations and central parameters, plus the CSV trajectory export.
//!
//! Quiver file layout:
//! `{"vertices":[..], "framing":"inf", "edges":[{"id","tail","head"},..],
//!   "relations":[{"id","tail","head","terms":[{"coeff":[re,im],
//!   "path":["a1","a2",..]},..]},..]}`
//! with relation paths listed in application order.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::FlowSample;
use crate::linalg::CMat;
use crate::quiver::{CentralElement, DimensionVector, Path, Quiver, Relation, RelationSet};
use crate::rep::Representation;

#[derive(Debug, Serialize, Deserialize)]
pub struct QuiverFile {
    pub vertices: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub framing: Option<String>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub relations: Vec<RelationRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: String,
    pub tail: String,
    pub head: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RelationRecord {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub terms: Vec<TermRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff: [f64; 2],
    pub path: Vec<String>,
}

pub fn quiver_to_json(q: &Quiver, rels: &RelationSet) -> serde_json::Value {
    let file = QuiverFile {
        vertices: q.vertices().to_vec(),
        framing: q.framing().map(|k| q.vertex_id(k).to_string()),
        edges: q
            .edges()
            .iter()
            .map(|e| EdgeRecord {
                id: e.id.clone(),
                tail: q.vertex_id(e.tail).to_string(),
                head: q.vertex_id(e.head).to_string(),
            })
            .collect(),
        relations: rels
            .relations()
            .iter()
            .map(|r| RelationRecord {
                id: r.id.clone(),
                tail: q.vertex_id(r.tail).to_string(),
                head: q.vertex_id(r.head).to_string(),
                terms: r
                    .terms()
                    .iter()
                    .map(|(c, p)| TermRecord {
                        coeff: [c.re, c.im],
                        path: p
                            .edges()
                            .iter()
                            .map(|&e| q.edge(e).id.clone())
                            .collect(),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_value(file).expect("quiver serializes")
}

pub fn quiver_from_json(value: &serde_json::Value) -> Result<(Arc<Quiver>, RelationSet)> {
    let file: QuiverFile = serde_json::from_value(value.clone())?;
    let q = Arc::new(Quiver::new(
        file.vertices,
        file.edges
            .into_iter()
            .map(|e| (e.id, e.tail, e.head))
            .collect(),
        file.framing.as_deref(),
    )?);
    let mut relations = Vec::new();
    for r in file.relations {
        let tail = q.vertex_index(&r.tail)?;
        let head = q.vertex_index(&r.head)?;
        let mut terms = Vec::new();
        for t in r.terms {
            let ids: Vec<&str> = t.path.iter().map(|s| s.as_str()).collect();
            terms.push((
                Complex64::new(t.coeff[0], t.coeff[1]),
                Path::from_ids(&q, &ids)?,
            ));
        }
        relations.push(Relation::new(&q, r.id, tail, head, terms)?);
    }
    Ok((q, RelationSet::new(relations)?))
}

pub fn dims_to_json(q: &Quiver, v: &DimensionVector) -> serde_json::Value {
    let map: BTreeMap<String, usize> = (0..q.vertex_count())
        .map(|k| (q.vertex_id(k).to_string(), v.get(k)))
        .collect();
    serde_json::to_value(map).expect("dims serialize")
}

pub fn dims_from_json(q: &Quiver, value: &serde_json::Value) -> Result<DimensionVector> {
    let map: BTreeMap<String, usize> = serde_json::from_value(value.clone())?;
    DimensionVector::from_map(q, &map)
}

/// Parses `"1,2"`-style comma-separated dimensions in vertex order.
pub fn dims_from_list(q: &Quiver, list: &str) -> Result<DimensionVector> {
    let dims: Vec<usize> = list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidDimensionVector(e.to_string()))
        })
        .collect::<Result<_>>()?;
    DimensionVector::new(q, dims)
}

#[derive(Debug, Serialize, Deserialize)]
struct RepFile {
    dims: BTreeMap<String, usize>,
    blocks: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
}

pub fn rep_to_json(x: &Representation) -> serde_json::Value {
    let q = x.quiver();
    let dims: BTreeMap<String, usize> = (0..q.vertex_count())
        .map(|k| (q.vertex_id(k).to_string(), x.dims().get(k)))
        .collect();
    let mut blocks = BTreeMap::new();
    for (e, edge) in q.edges().iter().enumerate() {
        let m = x.block(e);
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect();
        blocks.insert(edge.id.clone(), rows);
    }
    serde_json::to_value(RepFile { dims, blocks }).expect("representation serializes")
}

pub fn rep_from_json(q: &Arc<Quiver>, value: &serde_json::Value) -> Result<Representation> {
    let file: RepFile = serde_json::from_value(value.clone())?;
    let dims = DimensionVector::from_map(q, &file.dims)?;
    let mut x = Representation::zero(q, dims.clone());
    for (id, rows) in file.blocks {
        let e = q.edge_index(&id)?;
        let edge = q.edge(e);
        let (nr, nc) = (dims.get(edge.head), dims.get(edge.tail));
        if rows.len() != nr || rows.iter().any(|r| r.len() != nc) {
            return Err(Error::ShapeError(format!(
                "block {id:?} must be {nr}x{nc}"
            )));
        }
        let m = CMat::from_fn(nr, nc, |i, j| {
            Complex64::new(rows[i][j][0], rows[i][j][1])
        });
        x.set_block(&id, m)?;
    }
    Ok(x)
}

/// Central parameter file: vertex id to integer or `"p/q"` string.
pub fn alpha_from_json(q: &Quiver, value: &serde_json::Value) -> Result<CentralElement> {
    let map: BTreeMap<String, serde_json::Value> = serde_json::from_value(value.clone())?;
    let mut scalars = vec![Rational64::from(0); q.vertex_count()];
    if map.len() != q.vertex_count() {
        return Err(Error::InvalidParameter(
            "central element must list every vertex".into(),
        ));
    }
    for (name, v) in map {
        let k = q.vertex_index(&name)?;
        scalars[k] = match v {
            serde_json::Value::Number(n) => {
                let i = n
                    .as_i64()
                    .ok_or_else(|| Error::InvalidParameter("scalars must be exact".into()))?;
                Rational64::from(i)
            }
            serde_json::Value::String(s) => {
                let parts: Vec<&str> = s.split('/').collect();
                match parts.as_slice() {
                    [p] => Rational64::from(
                        p.trim()
                            .parse::<i64>()
                            .map_err(|e| Error::InvalidParameter(e.to_string()))?,
                    ),
                    [p, d] => Rational64::new(
                        p.trim()
                            .parse::<i64>()
                            .map_err(|e| Error::InvalidParameter(e.to_string()))?,
                        d.trim()
                            .parse::<i64>()
                            .map_err(|e| Error::InvalidParameter(e.to_string()))?,
                    ),
                    _ => {
                        return Err(Error::InvalidParameter(format!(
                            "cannot parse scalar {s:?}"
                        )))
                    }
                }
            }
            other => {
                return Err(Error::InvalidParameter(format!(
                    "cannot parse scalar {other}"
                )))
            }
        };
    }
    CentralElement::new(q, scalars)
}

pub fn trajectory_csv(samples: &[FlowSample]) -> String {
    let mut out = String::from("t,f,grad_norm\n");
    for s in samples {
        out.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", s.t, s.f, s.grad_norm));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::jordan_double;
    use crate::rng::trial_rng;

    #[test]
    fn quiver_roundtrip() {
        let (q, r) = jordan_double();
        let json = quiver_to_json(&q, &r);
        let (q2, r2) = quiver_from_json(&json).unwrap();
        assert_eq!(q2.vertices(), q.vertices());
        assert_eq!(q2.edge_count(), q.edge_count());
        assert_eq!(r2.len(), r.len());
        let map = |e: usize| q.edge_index(&q2.edge(e).id.clone()).unwrap();
        assert!(r2.same_terms(&r, &map));
    }

    #[test]
    fn representation_roundtrip() {
        let (q, _) = jordan_double();
        let q = Arc::new(q);
        let dims = DimensionVector::new(&q, vec![2, 1]).unwrap();
        let mut rng = trial_rng(5, "io", 0);
        let x = Representation::random(&q, dims, &mut rng);
        let json = rep_to_json(&x);
        let y = rep_from_json(&q, &json).unwrap();
        for e in 0..q.edge_count() {
            assert!((x.block(e) - y.block(e)).norm() < 1e-15);
        }
    }

    #[test]
    fn alpha_parsing() {
        let (q, _) = jordan_double();
        let v = serde_json::json!({"1": "3/2", "inf": -3});
        let a = alpha_from_json(&q, &v).unwrap();
        assert_eq!(a.get(0), Rational64::new(3, 2));
        assert_eq!(a.get(1), Rational64::from(-3));
    }

    #[test]
    fn dims_list_parsing() {
        let (q, _) = jordan_double();
        let v = dims_from_list(&q, "2,1").unwrap();
        assert_eq!(v.dims(), &[2, 1]);
        assert!(dims_from_list(&q, "2").is_err());
    }
}
