//! Quivers, dimension vectors, paths, relations and stability parameters.
//!
//! Everything in this module is exact: dimension formulas are integer
//! arithmetic and slopes/degrees are rationals, so stability comparisons
//! never touch floating point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// A finite directed graph with an optional framing vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Quiver {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    framing: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

impl Quiver {
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, String)>,
        framing: Option<&str>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for v in &vertices {
            if !seen.insert(v.clone()) {
                return Err(Error::InvalidQuiver(format!("duplicate vertex id {v:?}")));
            }
        }
        let index: BTreeMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let mut edge_ids = BTreeSet::new();
        let mut es = Vec::with_capacity(edges.len());
        for (id, tail, head) in edges {
            if !edge_ids.insert(id.clone()) {
                return Err(Error::InvalidQuiver(format!("duplicate edge id {id:?}")));
            }
            let tail = *index
                .get(tail.as_str())
                .ok_or_else(|| Error::InvalidQuiver(format!("edge {id:?}: unknown tail {tail:?}")))?;
            let head = *index
                .get(head.as_str())
                .ok_or_else(|| Error::InvalidQuiver(format!("edge {id:?}: unknown head {head:?}")))?;
            es.push(Edge { id, tail, head });
        }
        let framing = match framing {
            None => None,
            Some(f) => Some(*index.get(f).ok_or_else(|| {
                Error::InvalidFraming(format!("framing vertex {f:?} is not a vertex"))
            })?),
        };
        Ok(Quiver {
            vertices,
            edges: es,
            framing,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn framing(&self) -> Option<usize> {
        self.framing
    }

    pub fn vertex_id(&self, k: usize) -> &str {
        &self.vertices[k]
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertices
            .iter()
            .position(|v| v == id)
            .ok_or_else(|| Error::InvalidQuiver(format!("unknown vertex {id:?}")))
    }

    pub fn edge_index(&self, id: &str) -> Result<usize> {
        self.edges
            .iter()
            .position(|e| e.id == id)
            .ok_or_else(|| Error::InvalidQuiver(format!("unknown edge {id:?}")))
    }

    pub fn edges_with_head(&self, k: usize) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.head == k)
    }

    pub fn edges_with_tail(&self, k: usize) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.tail == k)
    }
}

/// Per-vertex dimension cap; keeps the dense assembled operators small.
pub const DEFAULT_DIM_CAP: usize = 8;

/// A nonnegative integer per vertex, stored in the quiver's vertex order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DimensionVector {
    dims: Vec<usize>,
}

impl DimensionVector {
    pub fn new(q: &Quiver, dims: Vec<usize>) -> Result<Self> {
        Self::with_cap(q, dims, DEFAULT_DIM_CAP)
    }

    /// Constructor with an explicit per-vertex cap for callers that accept
    /// larger dense assemblies.
    pub fn with_cap(q: &Quiver, dims: Vec<usize>, cap: usize) -> Result<Self> {
        if dims.len() != q.vertex_count() {
            return Err(Error::InvalidDimensionVector(format!(
                "expected {} entries, got {}",
                q.vertex_count(),
                dims.len()
            )));
        }
        if let Some(&d) = dims.iter().find(|&&d| d > cap) {
            return Err(Error::InvalidDimensionVector(format!(
                "vertex dimension {d} exceeds the cap {cap}"
            )));
        }
        Ok(DimensionVector { dims })
    }

    pub fn zero(q: &Quiver) -> Self {
        DimensionVector {
            dims: vec![0; q.vertex_count()],
        }
    }

    /// Unit vector at a single vertex.
    pub fn unit(q: &Quiver, k: usize) -> Self {
        let mut dims = vec![0; q.vertex_count()];
        dims[k] = 1;
        DimensionVector { dims }
    }

    pub fn from_map(q: &Quiver, map: &BTreeMap<String, usize>) -> Result<Self> {
        let mut dims = vec![0; q.vertex_count()];
        for (name, &d) in map {
            dims[q.vertex_index(name)?] = d;
        }
        if map.len() != q.vertex_count() {
            return Err(Error::InvalidDimensionVector(
                "dimension vector keys must be exactly the quiver's vertices".into(),
            ));
        }
        Ok(DimensionVector { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn get(&self, k: usize) -> usize {
        self.dims[k]
    }

    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn leq(&self, other: &DimensionVector) -> bool {
        self.dims.len() == other.dims.len()
            && self.dims.iter().zip(&other.dims).all(|(a, b)| a <= b)
    }

    pub fn add(&self, other: &DimensionVector) -> DimensionVector {
        DimensionVector {
            dims: self
                .dims
                .iter()
                .zip(&other.dims)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &DimensionVector) -> Result<DimensionVector> {
        if !other.leq(self) {
            return Err(Error::InvalidDimensionVector(
                "subtraction would go negative".into(),
            ));
        }
        Ok(DimensionVector {
            dims: self
                .dims
                .iter()
                .zip(&other.dims)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

impl fmt::Display for DimensionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// A composable, nonempty sequence of edges stored in application order:
/// `edges[0]` acts first. The printed form is the reverse concatenation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    edges: Vec<usize>,
}

impl Path {
    pub fn new(q: &Quiver, edges: Vec<usize>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidPath("empty path".into()));
        }
        for w in edges.windows(2) {
            if q.edge(w[0]).head != q.edge(w[1]).tail {
                return Err(Error::InvalidPath(format!(
                    "edges {:?} and {:?} do not compose",
                    q.edge(w[0]).id,
                    q.edge(w[1]).id
                )));
            }
        }
        Ok(Path { edges })
    }

    pub fn from_ids(q: &Quiver, ids: &[&str]) -> Result<Self> {
        let edges = ids
            .iter()
            .map(|id| q.edge_index(id))
            .collect::<Result<Vec<_>>>()?;
        Path::new(q, edges)
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tail(&self, q: &Quiver) -> usize {
        q.edge(self.edges[0]).tail
    }

    pub fn head(&self, q: &Quiver) -> usize {
        q.edge(*self.edges.last().unwrap()).head
    }

    /// Printed form, last edge first.
    pub fn display(&self, q: &Quiver) -> String {
        self.edges
            .iter()
            .rev()
            .map(|&e| q.edge(e).id.clone())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A complex linear combination of paths with common head and tail.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub id: String,
    pub tail: usize,
    pub head: usize,
    terms: Vec<(Complex64, Path)>,
}

impl Relation {
    pub fn new(
        q: &Quiver,
        id: String,
        tail: usize,
        head: usize,
        terms: Vec<(Complex64, Path)>,
    ) -> Result<Self> {
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        for (coeff, path) in &terms {
            if coeff.is_zero() {
                return Err(Error::InvalidRelation(format!(
                    "relation {id:?} has a zero coefficient"
                )));
            }
            if path.tail(q) != tail || path.head(q) != head {
                return Err(Error::InvalidRelation(format!(
                    "relation {id:?}: path {} has wrong endpoints",
                    path.display(q)
                )));
            }
            if !seen.insert(path.edges().to_vec()) {
                return Err(Error::InvalidRelation(format!(
                    "relation {id:?}: duplicate path {}",
                    path.display(q)
                )));
            }
        }
        Ok(Relation {
            id,
            tail,
            head,
            terms,
        })
    }

    pub fn terms(&self) -> &[(Complex64, Path)] {
        &self.terms
    }

    pub fn is_quadratic(&self) -> bool {
        self.terms.iter().all(|(_, p)| p.len() == 2)
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((_, p0)) => self.terms.iter().all(|(_, p)| p.len() == p0.len()),
        }
    }
}

/// A finite set of relations with unique names.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RelationSet {
    relations: Vec<Relation>,
}

impl RelationSet {
    pub fn new(relations: Vec<Relation>) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for r in &relations {
            if !ids.insert(r.id.clone()) {
                return Err(Error::InvalidRelation(format!(
                    "duplicate relation id {:?}",
                    r.id
                )));
            }
        }
        Ok(RelationSet { relations })
    }

    pub fn empty() -> Self {
        RelationSet::default()
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// Compares two relation sets as unordered collections of
    /// (tail, head, terms), ignoring relation names. `edge_map` translates
    /// this set's edge indices into `other`'s quiver.
    pub fn same_terms(&self, other: &RelationSet, edge_map: &dyn Fn(usize) -> usize) -> bool {
        if self.relations.len() != other.relations.len() {
            return false;
        }
        let canon = |terms: &[(Complex64, Path)], map: Option<&dyn Fn(usize) -> usize>| {
            let mut v: Vec<(Vec<usize>, (i64, i64))> = terms
                .iter()
                .map(|(c, p)| {
                    let edges: Vec<usize> = p
                        .edges()
                        .iter()
                        .map(|&e| map.map(|m| m(e)).unwrap_or(e))
                        .collect();
                    (edges, ((c.re * 1e12).round() as i64, (c.im * 1e12).round() as i64))
                })
                .collect();
            v.sort();
            v
        };
        let mut left: Vec<_> = self
            .relations
            .iter()
            .map(|r| canon(&r.terms, Some(edge_map)))
            .collect();
        let mut right: Vec<_> = other.relations.iter().map(|r| canon(&r.terms, None)).collect();
        left.sort();
        right.sort();
        left == right
    }
}

/// A per-vertex rational scalar; the associated Lie algebra element is
/// `i * alpha_k * id` on each vertex space.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralElement {
    scalars: Vec<Rational64>,
}

impl CentralElement {
    pub fn new(q: &Quiver, scalars: Vec<Rational64>) -> Result<Self> {
        if scalars.len() != q.vertex_count() {
            return Err(Error::InvalidParameter(format!(
                "central element needs {} scalars, got {}",
                q.vertex_count(),
                scalars.len()
            )));
        }
        Ok(CentralElement { scalars })
    }

    pub fn from_integers(q: &Quiver, scalars: &[i64]) -> Result<Self> {
        CentralElement::new(q, scalars.iter().map(|&s| Rational64::from(s)).collect())
    }

    pub fn scalars(&self) -> &[Rational64] {
        &self.scalars
    }

    pub fn get(&self, k: usize) -> Rational64 {
        self.scalars[k]
    }

    pub fn get_f64(&self, k: usize) -> f64 {
        *self.scalars[k].numer() as f64 / *self.scalars[k].denom() as f64
    }

    pub fn is_admissible(&self, v: &DimensionVector) -> bool {
        let sum: Rational64 = self
            .scalars
            .iter()
            .zip(v.dims())
            .map(|(a, &d)| a * Rational64::from(d as i64))
            .sum();
        sum.is_zero()
    }
}

/// Integer dimension data of the length-0/1 homomorphism spaces, the
/// relation block space, and the two associated bilinear forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimsAndForms {
    pub hom0: i64,
    pub hom1: i64,
    pub rel: i64,
    pub ringel: i64,
    pub ringel_r: i64,
}

/// Dimension bookkeeping for homomorphisms from a `v2`-graded space to a
/// `v1`-graded space: `hom1` counts the edge blocks, `rel` the relation
/// blocks, and `ringel_r = hom0 - hom1 + rel` is the index of the
/// associated three-term complex.
pub fn dims_and_forms(
    q: &Quiver,
    r: &RelationSet,
    v1: &DimensionVector,
    v2: &DimensionVector,
) -> Result<DimsAndForms> {
    if v1.dims().len() != q.vertex_count() || v2.dims().len() != q.vertex_count() {
        return Err(Error::InvalidDimensionVector(
            "dimension vectors do not match the quiver".into(),
        ));
    }
    let hom0: i64 = (0..q.vertex_count())
        .map(|k| (v1.get(k) * v2.get(k)) as i64)
        .sum();
    let hom1: i64 = q
        .edges()
        .iter()
        .map(|e| (v2.get(e.tail) * v1.get(e.head)) as i64)
        .sum();
    let rel: i64 = r
        .relations()
        .iter()
        .map(|rel| (v2.get(rel.tail) * v1.get(rel.head)) as i64)
        .sum();
    Ok(DimsAndForms {
        hom0,
        hom1,
        rel,
        ringel: hom0 - hom1,
        ringel_r: hom0 - hom1 + rel,
    })
}

/// The framed stability parameter: 1 at every ordinary vertex and minus the
/// total ordinary dimension at the framing vertex.
pub fn canonical_central(q: &Quiver, v: &DimensionVector) -> Result<CentralElement> {
    let inf = q
        .framing()
        .ok_or_else(|| Error::InvalidFraming("quiver has no framing vertex".into()))?;
    if v.get(inf) != 1 {
        return Err(Error::InvalidFraming(format!(
            "framing vertex must have dimension 1, got {}",
            v.get(inf)
        )));
    }
    let others: i64 = (0..q.vertex_count())
        .filter(|&k| k != inf)
        .map(|k| v.get(k) as i64)
        .sum();
    let scalars = (0..q.vertex_count())
        .map(|k| {
            if k == inf {
                Rational64::from(-others)
            } else {
                Rational64::from(1)
            }
        })
        .collect();
    Ok(CentralElement { scalars })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeData {
    pub degree: Rational64,
    pub rank: i64,
    pub slope: Rational64,
    pub admissible: bool,
}

pub fn slope_data(alpha: &CentralElement, v: &DimensionVector) -> Result<SlopeData> {
    if v.is_zero() {
        return Err(Error::ZeroDimensionVector("slope of the zero vector".into()));
    }
    let degree: Rational64 = alpha
        .scalars()
        .iter()
        .zip(v.dims())
        .map(|(a, &d)| a * Rational64::from(d as i64))
        .sum();
    let rank = v.total() as i64;
    Ok(SlopeData {
        degree,
        rank,
        slope: degree / Rational64::from(rank),
        admissible: degree.is_zero(),
    })
}

/// Shifts every scalar by minus the slope of `vp`, so the result is
/// admissible for `vp`.
pub fn induced_central(
    alpha: &CentralElement,
    v: &DimensionVector,
    vp: &DimensionVector,
) -> Result<CentralElement> {
    if !vp.leq(v) {
        return Err(Error::InvalidDimensionVector(
            "induced central element needs vp <= v".into(),
        ));
    }
    if vp.is_zero() {
        return Err(Error::ZeroDimensionVector(
            "induced central element of the zero vector".into(),
        ));
    }
    let slope = slope_data(alpha, vp)?.slope;
    Ok(CentralElement {
        scalars: alpha.scalars().iter().map(|a| a - slope).collect(),
    })
}

/// One structural defect found by `relation_set_checks`.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub check: &'static str,
    pub edge: Option<String>,
    pub relation: Option<String>,
    pub path: Option<String>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationChecks {
    pub quadratic: bool,
    pub complete: bool,
    pub homogeneous: bool,
    pub loop_condition: bool,
    pub witnesses: Vec<Witness>,
}

/// Structural checks on a relation set: every path quadratic, completeness
/// of the quadratic system, homogeneity, and the loop-pairing condition for
/// loops at relation tails. Witnesses carry the first violation per clause,
/// scanned in (edge id, relation id) order.
pub fn relation_set_checks(q: &Quiver, r: &RelationSet) -> RelationChecks {
    let mut witnesses = Vec::new();

    let mut quadratic = true;
    'quad: for rel in r.relations() {
        for (_, p) in rel.terms() {
            if p.len() != 2 {
                quadratic = false;
                witnesses.push(Witness {
                    check: "quadratic",
                    edge: None,
                    relation: Some(rel.id.clone()),
                    path: Some(p.display(q)),
                    detail: format!("path has length {}", p.len()),
                });
                break 'quad;
            }
        }
    }

    let mut homogeneous = true;
    for rel in r.relations() {
        if !rel.is_homogeneous() {
            homogeneous = false;
            witnesses.push(Witness {
                check: "homogeneous",
                edge: None,
                relation: Some(rel.id.clone()),
                path: None,
                detail: "paths of different lengths".into(),
            });
            break;
        }
    }

    // deterministic scan order
    let mut edge_order: Vec<usize> = (0..q.edge_count()).collect();
    edge_order.sort_by(|&a, &b| q.edge(a).id.cmp(&q.edge(b).id));
    let mut rel_order: Vec<usize> = (0..r.len()).collect();
    rel_order.sort_by(|&a, &b| r.relations()[a].id.cmp(&r.relations()[b].id));

    let mut complete = quadratic;
    if quadratic {
        // clause 1: every edge into a relation's head leads some path of it
        'clause1: for &ei in &edge_order {
            let e = q.edge(ei);
            for &ri in &rel_order {
                let rel = &r.relations()[ri];
                if e.head != rel.head {
                    continue;
                }
                let found = rel
                    .terms()
                    .iter()
                    .any(|(_, p)| p.edges()[p.len() - 1] == ei);
                if !found {
                    complete = false;
                    witnesses.push(Witness {
                        check: "complete-clause-1",
                        edge: Some(e.id.clone()),
                        relation: Some(rel.id.clone()),
                        path: None,
                        detail: "edge into the relation head leads no path of it".into(),
                    });
                    break 'clause1;
                }
            }
        }
        // clause 2: an edge out of a relation tail belongs to a unique
        // relation and trails a unique path of it
        'clause2: for &ei in &edge_order {
            let e = q.edge(ei);
            let rels_at_tail: Vec<usize> = rel_order
                .iter()
                .copied()
                .filter(|&ri| r.relations()[ri].tail == e.tail)
                .collect();
            if rels_at_tail.is_empty() {
                continue;
            }
            if rels_at_tail.len() > 1 {
                complete = false;
                witnesses.push(Witness {
                    check: "complete-clause-2",
                    edge: Some(e.id.clone()),
                    relation: Some(r.relations()[rels_at_tail[1]].id.clone()),
                    path: None,
                    detail: format!(
                        "edge tail {} is the tail of {} relations",
                        q.vertex_id(e.tail),
                        rels_at_tail.len()
                    ),
                });
                break 'clause2;
            }
            let rel = &r.relations()[rels_at_tail[0]];
            let count = rel
                .terms()
                .iter()
                .filter(|(_, p)| p.edges()[0] == ei)
                .count();
            if count != 1 {
                complete = false;
                witnesses.push(Witness {
                    check: "complete-clause-2",
                    edge: Some(e.id.clone()),
                    relation: Some(rel.id.clone()),
                    path: None,
                    detail: format!("edge trails {count} paths of the relation"),
                });
                break 'clause2;
            }
        }
    }

    // loop condition: a loop trailing a path of a relation must be matched
    // by a unique loop leading a path with the same middle edge
    let mut loop_condition = true;
    if quadratic {
        'loops: for &ai in &edge_order {
            let a = q.edge(ai);
            if a.tail != a.head {
                continue;
            }
            for &ri in &rel_order {
                let rel = &r.relations()[ri];
                if rel.tail != a.tail {
                    continue;
                }
                for (_, p) in rel.terms() {
                    if p.edges()[0] != ai {
                        continue;
                    }
                    let b = p.edges()[1];
                    let matching: Vec<usize> = rel
                        .terms()
                        .iter()
                        .filter(|(_, p2)| {
                            let a2 = p2.edges()[1];
                            let e2 = q.edge(a2);
                            p2.edges()[0] == b && e2.tail == e2.head && e2.head == rel.head
                        })
                        .map(|(_, p2)| p2.edges()[1])
                        .collect();
                    if matching.len() != 1 {
                        loop_condition = false;
                        witnesses.push(Witness {
                            check: "loop-condition",
                            edge: Some(a.id.clone()),
                            relation: Some(rel.id.clone()),
                            path: Some(p.display(q)),
                            detail: format!(
                                "{} matching loops at the relation head",
                                matching.len()
                            ),
                        });
                        break 'loops;
                    }
                }
            }
        }
    }

    RelationChecks {
        quadratic,
        complete,
        homogeneous,
        loop_condition,
        witnesses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_nakajima_double, framed_jordan_base};

    #[test]
    fn dims_and_forms_on_jordan_double() {
        let (q, r) = build_nakajima_double(&framed_jordan_base()).unwrap();
        let v11 = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let d = dims_and_forms(&q, &r, &v11, &v11).unwrap();
        assert_eq!(
            d,
            DimsAndForms {
                hom0: 2,
                hom1: 4,
                rel: 2,
                ringel: -2,
                ringel_r: 0
            }
        );
        let v10 = DimensionVector::new(&q, vec![1, 0]).unwrap();
        let d2 = dims_and_forms(&q, &r, &v11, &v10).unwrap();
        assert_eq!(
            d2,
            DimsAndForms {
                hom0: 1,
                hom1: 3,
                rel: 1,
                ringel: -2,
                ringel_r: -1
            }
        );
    }

    #[test]
    fn dims_and_forms_edgeless() {
        let q = Quiver::new(
            vec!["x".into(), "y".into()],
            vec![],
            None,
        )
        .unwrap();
        let r = RelationSet::empty();
        let v1 = DimensionVector::new(&q, vec![2, 3]).unwrap();
        let v2 = DimensionVector::new(&q, vec![5, 7]).unwrap();
        let d = dims_and_forms(&q, &r, &v1, &v2).unwrap();
        assert_eq!(d.ringel, 2 * 5 + 3 * 7);
        assert_eq!(d.hom1, 0);
    }

    #[test]
    fn canonical_central_is_admissible() {
        let (q, _) = build_nakajima_double(&framed_jordan_base()).unwrap();
        let v = DimensionVector::new(&q, vec![2, 1]).unwrap();
        let alpha = canonical_central(&q, &v).unwrap();
        assert_eq!(alpha.scalars(), &[Rational64::from(1), Rational64::from(-2)]);
        assert!(alpha.is_admissible(&v));
        let v11 = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let a11 = canonical_central(&q, &v11).unwrap();
        assert_eq!(a11.scalars(), &[Rational64::from(1), Rational64::from(-1)]);
        // all non-framing dims zero
        let v01 = DimensionVector::new(&q, vec![0, 1]).unwrap();
        let a01 = canonical_central(&q, &v01).unwrap();
        assert_eq!(a01.scalars(), &[Rational64::from(1), Rational64::from(0)]);
        assert!(a01.is_admissible(&v01));
    }

    #[test]
    fn canonical_central_rejects_bad_framing() {
        let (q, _) = build_nakajima_double(&framed_jordan_base()).unwrap();
        let v = DimensionVector::new(&q, vec![2, 0]).unwrap();
        assert!(matches!(
            canonical_central(&q, &v),
            Err(Error::InvalidFraming(_))
        ));
    }

    #[test]
    fn induced_central_worked_cases() {
        let (q, _) = build_nakajima_double(&framed_jordan_base()).unwrap();
        let v = DimensionVector::new(&q, vec![2, 1]).unwrap();
        let alpha = canonical_central(&q, &v).unwrap();
        let vp = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let induced = induced_central(&alpha, &v, &vp).unwrap();
        assert_eq!(
            induced.scalars(),
            &[Rational64::new(3, 2), Rational64::new(-3, 2)]
        );
        assert!(induced.is_admissible(&vp));
        // vp = v gives alpha back for admissible alpha
        let same = induced_central(&alpha, &v, &v).unwrap();
        assert_eq!(same.scalars(), alpha.scalars());
        // support restriction case
        let v11 = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let a11 = canonical_central(&q, &v11).unwrap();
        let vp10 = DimensionVector::new(&q, vec![1, 0]).unwrap();
        let ind = induced_central(&a11, &v11, &vp10).unwrap();
        assert_eq!(ind.scalars()[0], Rational64::from(0));
        assert_eq!(ind.scalars()[1], Rational64::from(-2));
        assert!(ind.is_admissible(&vp10));
    }

    #[test]
    fn induced_central_rejects_zero() {
        let (q, _) = build_nakajima_double(&framed_jordan_base()).unwrap();
        let v = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let alpha = canonical_central(&q, &v).unwrap();
        let zero = DimensionVector::zero(&q);
        assert!(matches!(
            induced_central(&alpha, &v, &zero),
            Err(Error::ZeroDimensionVector(_))
        ));
    }

    #[test]
    fn slope_data_worked_cases() {
        let (q, _) = build_nakajima_double(&framed_jordan_base()).unwrap();
        let v = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let alpha = canonical_central(&q, &v).unwrap();
        let d = slope_data(&alpha, &v).unwrap();
        assert!(d.admissible);
        assert_eq!(d.rank, 2);
        assert_eq!(d.slope, Rational64::from(0));
        let v10 = DimensionVector::new(&q, vec![1, 0]).unwrap();
        let d10 = slope_data(&alpha, &v10).unwrap();
        assert_eq!(d10.degree, Rational64::from(1));
        assert_eq!(d10.slope, Rational64::from(1));
        let v01 = DimensionVector::new(&q, vec![0, 1]).unwrap();
        let d01 = slope_data(&alpha, &v01).unwrap();
        assert_eq!(d01.degree, Rational64::from(-1));
        assert_eq!(d01.slope, Rational64::from(-1));
        assert!(matches!(
            slope_data(&alpha, &DimensionVector::zero(&q)),
            Err(Error::ZeroDimensionVector(_))
        ));
    }

    #[test]
    fn path_composability_enforced() {
        let (q, _) = build_nakajima_double(&framed_jordan_base()).unwrap();
        // abar: 1 -> inf followed by abar again does not compose
        assert!(Path::from_ids(&q, &["abar", "abar"]).is_err());
        let p = Path::from_ids(&q, &["abar", "a"]).unwrap();
        assert_eq!(p.tail(&q), q.vertex_index("1").unwrap());
        assert_eq!(p.head(&q), q.vertex_index("1").unwrap());
        assert_eq!(p.display(&q), "a abar");
    }
}
