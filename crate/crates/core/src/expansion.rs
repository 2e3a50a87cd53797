//! Vertex expansion and edge restriction of a quiver with relations:
//! splitting the vertex spaces, retaining a subset of the induced edges,
//! pruning relation paths that leave the retained edge set, and moving
//! representations across the construction.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::quiver::{DimensionVector, Path, Quiver, Relation, RelationSet};
use crate::rep::{GradedLinearMap, Representation};

/// One summand of the split of a base vertex space.
#[derive(Debug, Clone)]
pub struct VertexPart {
    pub id: String,
    pub base_vertex: usize,
    pub dim: usize,
}

/// One retained edge of the expanded quiver, with its base edge and the
/// parts it connects.
#[derive(Debug, Clone)]
pub struct RetainedEdge {
    pub id: String,
    pub base_edge: usize,
    pub tail_part: usize,
    pub head_part: usize,
}

/// An expansion of a base quiver (vertex split, surjective back onto the
/// base) together with a retained edge subset and the base relations to be
/// restricted. Parts of a base vertex are laid out in declaration order
/// when representations are assembled.
#[derive(Debug, Clone)]
pub struct ExpansionSpec {
    base: Arc<Quiver>,
    base_relations: RelationSet,
    parts: Vec<VertexPart>,
    retained: Vec<RetainedEdge>,
    parts_of: Vec<Vec<usize>>,
    framing_part: Option<usize>,
}

impl ExpansionSpec {
    pub fn new(
        base: &Arc<Quiver>,
        base_relations: RelationSet,
        parts: Vec<VertexPart>,
        retained: Vec<RetainedEdge>,
    ) -> Result<Self> {
        let mut parts_of: Vec<Vec<usize>> = vec![Vec::new(); base.vertex_count()];
        let mut ids = std::collections::BTreeSet::new();
        for (i, p) in parts.iter().enumerate() {
            if p.base_vertex >= base.vertex_count() {
                return Err(Error::InvalidExpansion(format!(
                    "part {:?} references vertex {}",
                    p.id, p.base_vertex
                )));
            }
            if !ids.insert(p.id.clone()) {
                return Err(Error::InvalidExpansion(format!("duplicate part id {:?}", p.id)));
            }
            parts_of[p.base_vertex].push(i);
        }
        for (k, ps) in parts_of.iter().enumerate() {
            if ps.is_empty() {
                return Err(Error::InvalidExpansion(format!(
                    "base vertex {:?} has no parts",
                    base.vertex_id(k)
                )));
            }
            if ps.len() > 1 && ps.iter().any(|&i| parts[i].dim == 0) {
                return Err(Error::InvalidExpansion(format!(
                    "split parts of {:?} must have positive dimension",
                    base.vertex_id(k)
                )));
            }
        }
        let mut edge_ids = std::collections::BTreeSet::new();
        let mut triples = std::collections::BTreeSet::new();
        for e in &retained {
            if e.base_edge >= base.edge_count()
                || e.tail_part >= parts.len()
                || e.head_part >= parts.len()
            {
                return Err(Error::InvalidExpansion(format!(
                    "retained edge {:?} is out of range",
                    e.id
                )));
            }
            let b = base.edge(e.base_edge);
            if parts[e.tail_part].base_vertex != b.tail || parts[e.head_part].base_vertex != b.head
            {
                return Err(Error::InvalidExpansion(format!(
                    "retained edge {:?} does not lift its base edge",
                    e.id
                )));
            }
            if !edge_ids.insert(e.id.clone()) {
                return Err(Error::InvalidExpansion(format!("duplicate edge id {:?}", e.id)));
            }
            if !triples.insert((e.base_edge, e.tail_part, e.head_part)) {
                return Err(Error::InvalidExpansion(format!(
                    "duplicate lift for edge {:?}",
                    e.id
                )));
            }
        }
        Ok(ExpansionSpec {
            base: base.clone(),
            base_relations,
            parts,
            retained,
            parts_of,
            framing_part: None,
        })
    }

    /// Chooses which part of the base framing vertex frames the restricted
    /// quiver; defaults to the first declared part.
    pub fn with_framing_part(mut self, part: usize) -> Result<Self> {
        match self.base.framing() {
            Some(k) if self.parts[part].base_vertex == k => {
                self.framing_part = Some(part);
                Ok(self)
            }
            _ => Err(Error::InvalidFraming(
                "framing part must split the base framing vertex".into(),
            )),
        }
    }

    pub fn base(&self) -> &Arc<Quiver> {
        &self.base
    }

    pub fn base_relations(&self) -> &RelationSet {
        &self.base_relations
    }

    pub fn parts(&self) -> &[VertexPart] {
        &self.parts
    }

    pub fn retained(&self) -> &[RetainedEdge] {
        &self.retained
    }

    pub fn parts_of(&self, base_vertex: usize) -> &[usize] {
        &self.parts_of[base_vertex]
    }

    /// Total dimension vector on the base quiver.
    pub fn ambient_dims(&self) -> DimensionVector {
        let dims = (0..self.base.vertex_count())
            .map(|k| self.parts_of[k].iter().map(|&i| self.parts[i].dim).sum())
            .collect();
        DimensionVector::new(&self.base, dims).expect("dims match base")
    }

    /// Dimension vector on the expanded quiver.
    pub fn expanded_dims(&self, qprime: &Quiver) -> DimensionVector {
        DimensionVector::new(qprime, self.parts.iter().map(|p| p.dim).collect())
            .expect("dims match expansion")
    }

    /// Row/column offset of a part inside its base vertex space.
    pub fn part_offset(&self, part: usize) -> usize {
        let p = &self.parts[part];
        self.parts_of[p.base_vertex]
            .iter()
            .take_while(|&&i| i != part)
            .map(|&i| self.parts[i].dim)
            .sum()
    }
}

/// A path pruned from a restricted relation, with the number of edges that
/// left the retained set.
#[derive(Debug, Clone)]
pub struct DroppedPath {
    pub relation: String,
    pub base_relation: String,
    pub coeff: Complex64,
    pub lift: Vec<String>,
    pub removed: usize,
}

/// Origin of a restricted relation: base relation index plus the lift's
/// tail and head parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationTag {
    pub base_relation: usize,
    pub tail_part: usize,
    pub head_part: usize,
}

#[derive(Debug, Clone)]
pub struct ExpansionResult {
    pub qprime: Arc<Quiver>,
    pub rprime: RelationSet,
    pub relation_tags: Vec<RelationTag>,
    pub fully_restricted: bool,
    pub dropped_paths: Vec<DroppedPath>,
}

fn lift_name(base: &Quiver, spec: &ExpansionSpec, base_edge: usize, tp: usize, hp: usize) -> String {
    format!(
        "{}!{}>{}",
        base.edge(base_edge).id,
        spec.parts[tp].id,
        spec.parts[hp].id
    )
}

/// Builds the restricted quiver and relation set. Relation paths are lifted
/// along all induced edges; a lift survives when every edge is retained.
/// Lifts of a relation that keep no path are discarded (unless the base
/// relation was empty). `fully_restricted` quantifies over the pruned paths
/// of the surviving relations.
pub fn expand_restrict(spec: &ExpansionSpec) -> Result<ExpansionResult> {
    let base = spec.base();
    let qprime = Arc::new(Quiver::new(
        spec.parts.iter().map(|p| p.id.clone()).collect(),
        spec.retained
            .iter()
            .map(|e| {
                (
                    e.id.clone(),
                    spec.parts[e.tail_part].id.clone(),
                    spec.parts[e.head_part].id.clone(),
                )
            })
            .collect(),
        spec.base
            .framing()
            .map(|k| {
                let part = spec.framing_part.unwrap_or(spec.parts_of[k][0]);
                spec.parts[part].id.clone()
            })
            .as_deref(),
    )?);

    // lookup: (base edge, tail part, head part) -> retained index
    let retained_lookup: BTreeMap<(usize, usize, usize), usize> = spec
        .retained
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.base_edge, e.tail_part, e.head_part), i))
        .collect();

    let mut relations = Vec::new();
    let mut tags = Vec::new();
    let mut dropped_paths = Vec::new();
    let mut fully_restricted = true;

    for (ri, rel) in spec.base_relations.relations().iter().enumerate() {
        for &tp in &spec.parts_of[rel.tail] {
            for &hp in &spec.parts_of[rel.head] {
                let single = spec.parts_of[rel.tail].len() == 1 && spec.parts_of[rel.head].len() == 1;
                let rel_id = if single {
                    rel.id.clone()
                } else {
                    format!("{}@{}>{}", rel.id, spec.parts[tp].id, spec.parts[hp].id)
                };
                let mut terms: Vec<(Complex64, Path)> = Vec::new();
                let mut pruned: Vec<DroppedPath> = Vec::new();
                for (coeff, path) in rel.terms() {
                    enumerate_lifts(
                        spec,
                        &retained_lookup,
                        path.edges(),
                        tp,
                        hp,
                        &mut |lift: &[LiftStep]| {
                            let removed = lift.iter().filter(|s| s.retained.is_none()).count();
                            if removed == 0 {
                                let edges: Vec<usize> =
                                    lift.iter().map(|s| s.retained.unwrap()).collect();
                                terms.push((
                                    *coeff,
                                    Path::new(&qprime, edges).expect("lift composes"),
                                ));
                            } else {
                                pruned.push(DroppedPath {
                                    relation: rel_id.clone(),
                                    base_relation: rel.id.clone(),
                                    coeff: *coeff,
                                    lift: lift
                                        .iter()
                                        .map(|s| match s.retained {
                                            Some(i) => spec.retained[i].id.clone(),
                                            None => lift_name(base, spec, s.base_edge, s.tp, s.hp),
                                        })
                                        .collect(),
                                    removed,
                                });
                            }
                        },
                    );
                }
                let keep = !terms.is_empty() || rel.terms().is_empty();
                if keep {
                    let tail = qprime.vertex_index(&spec.parts[tp].id)?;
                    let head = qprime.vertex_index(&spec.parts[hp].id)?;
                    relations.push(Relation::new(&qprime, rel_id, tail, head, terms)?);
                    tags.push(RelationTag {
                        base_relation: ri,
                        tail_part: tp,
                        head_part: hp,
                    });
                    if pruned.iter().any(|d| d.removed < 2) {
                        fully_restricted = false;
                    }
                    dropped_paths.extend(pruned);
                }
            }
        }
    }

    Ok(ExpansionResult {
        qprime,
        rprime: RelationSet::new(relations)?,
        relation_tags: tags,
        fully_restricted,
        dropped_paths,
    })
}

struct LiftStep {
    base_edge: usize,
    tp: usize,
    hp: usize,
    retained: Option<usize>,
}

fn enumerate_lifts(
    spec: &ExpansionSpec,
    lookup: &BTreeMap<(usize, usize, usize), usize>,
    edges: &[usize],
    start_part: usize,
    end_part: usize,
    visit: &mut dyn FnMut(&[LiftStep]),
) {
    fn walk(
        spec: &ExpansionSpec,
        lookup: &BTreeMap<(usize, usize, usize), usize>,
        edges: &[usize],
        at: usize,
        current: usize,
        end_part: usize,
        acc: &mut Vec<LiftStep>,
        visit: &mut dyn FnMut(&[LiftStep]),
    ) {
        if at == edges.len() {
            if current == end_part {
                visit(acc);
            }
            return;
        }
        let e = edges[at];
        let head = spec.base().edge(e).head;
        for &hp in &spec.parts_of[head] {
            let retained = lookup.get(&(e, current, hp)).copied();
            acc.push(LiftStep {
                base_edge: e,
                tp: current,
                hp,
                retained,
            });
            walk(spec, lookup, edges, at + 1, hp, end_part, acc, visit);
            acc.pop();
        }
    }
    let mut acc = Vec::new();
    walk(spec, lookup, edges, 0, start_part, end_part, &mut acc, visit);
}

/// Assembles a base-quiver representation from a restricted one by placing
/// each retained block at its part offsets.
pub fn embed_restricted_rep(
    spec: &ExpansionSpec,
    result: &ExpansionResult,
    xprime: &Representation,
) -> Result<Representation> {
    let expect = spec.expanded_dims(&result.qprime);
    if xprime.dims() != &expect {
        return Err(Error::InvalidExpansion(format!(
            "representation dims {} do not match the split {}",
            xprime.dims(),
            expect
        )));
    }
    let ambient = spec.ambient_dims();
    let mut out = Representation::zero(spec.base(), ambient);
    for (i, e) in spec.retained.iter().enumerate() {
        let block = xprime.block(i);
        if block.nrows() == 0 || block.ncols() == 0 {
            continue;
        }
        let ro = spec.part_offset(e.head_part);
        let co = spec.part_offset(e.tail_part);
        out.block_mut(e.base_edge)
            .view_mut((ro, co), (block.nrows(), block.ncols()))
            .copy_from(block);
    }
    Ok(out)
}

/// Extracts the restricted representation from a base one by reading the
/// retained blocks at their part offsets.
pub fn restrict_rep(
    spec: &ExpansionSpec,
    result: &ExpansionResult,
    x: &Representation,
) -> Result<Representation> {
    if x.dims() != &spec.ambient_dims() {
        return Err(Error::InvalidExpansion(
            "representation dims do not match the ambient split".into(),
        ));
    }
    let dims = spec.expanded_dims(&result.qprime);
    let mut blocks = Vec::with_capacity(spec.retained.len());
    for e in &spec.retained {
        let ro = spec.part_offset(e.head_part);
        let co = spec.part_offset(e.tail_part);
        let r = spec.parts[e.head_part].dim;
        let c = spec.parts[e.tail_part].dim;
        if r == 0 || c == 0 {
            blocks.push(CMat::zeros(r, c));
        } else {
            blocks.push(x.block(e.base_edge).view((ro, co), (r, c)).into());
        }
    }
    Representation::from_blocks(&result.qprime, dims, blocks)
}

/// The base quiver of the handsaw reduction: loops `B1`, `B2` at `V`, an
/// edge `a: W -> V` and `b: V -> W`, with the moment-map relation
/// `r = B1 B2 - B2 B1 + a b` at the loop vertex.
pub fn adhm_base() -> (Arc<Quiver>, RelationSet) {
    let q = Arc::new(
        Quiver::new(
            vec!["V".into(), "W".into()],
            vec![
                ("B1".into(), "V".into(), "V".into()),
                ("B2".into(), "V".into(), "V".into()),
                ("a".into(), "W".into(), "V".into()),
                ("b".into(), "V".into(), "W".into()),
            ],
            Some("W"),
        )
        .unwrap(),
    );
    let v = q.vertex_index("V").unwrap();
    let one = Complex64::new(1.0, 0.0);
    let r = Relation::new(
        &q,
        "r".into(),
        v,
        v,
        vec![
            (one, Path::from_ids(&q, &["B2", "B1"]).unwrap()),
            (-one, Path::from_ids(&q, &["B1", "B2"]).unwrap()),
            (one, Path::from_ids(&q, &["b", "a"]).unwrap()),
        ],
    )
    .unwrap();
    (q.clone(), RelationSet::new(vec![r]).unwrap())
}

/// The handsaw split of the ADHM base: `V = V1 (+) .. (+) V{n-1}`,
/// `W = W1 (+) .. (+) Wn`, retaining the step component of `B1`, the
/// diagonal of `B2`, the diagonal of `a` and the superdiagonal of `b`.
/// Retained edges carry the handsaw names, so the restricted relation set
/// can be compared directly with `build_handsaw`.
pub fn adhm_handsaw_spec(n: usize, v_dims: &[usize], w_dims: &[usize]) -> Result<ExpansionSpec> {
    if n < 2 || v_dims.len() != n - 1 || w_dims.len() != n {
        return Err(Error::InvalidParameter(
            "handsaw split needs n >= 2 with n-1 loop-vertex parts and n framing parts".into(),
        ));
    }
    let (base, rels) = adhm_base();
    let v = base.vertex_index("V")?;
    let w = base.vertex_index("W")?;
    let mut parts = Vec::new();
    for (k, &d) in v_dims.iter().enumerate() {
        parts.push(VertexPart {
            id: format!("V{}", k + 1),
            base_vertex: v,
            dim: d,
        });
    }
    for (k, &d) in w_dims.iter().enumerate() {
        parts.push(VertexPart {
            id: format!("W{}", k + 1),
            base_vertex: w,
            dim: d,
        });
    }
    let vp = |k: usize| k - 1; // part index of Vk
    let wp = |k: usize| (n - 1) + (k - 1); // part index of Wk
    let b1 = base.edge_index("B1")?;
    let b2 = base.edge_index("B2")?;
    let ea = base.edge_index("a")?;
    let eb = base.edge_index("b")?;
    let mut retained = Vec::new();
    for k in 1..=n.saturating_sub(2) {
        retained.push(RetainedEdge {
            id: format!("B1_{k}"),
            base_edge: b1,
            tail_part: vp(k),
            head_part: vp(k + 1),
        });
    }
    for k in 1..n {
        retained.push(RetainedEdge {
            id: format!("B2_{k}"),
            base_edge: b2,
            tail_part: vp(k),
            head_part: vp(k),
        });
        retained.push(RetainedEdge {
            id: format!("a_{k}"),
            base_edge: ea,
            tail_part: wp(k),
            head_part: vp(k),
        });
    }
    for k in 2..=n {
        retained.push(RetainedEdge {
            id: format!("b_{k}"),
            base_edge: eb,
            tail_part: vp(k - 1),
            head_part: wp(k),
        });
    }
    ExpansionSpec::new(&base, rels, parts, retained)?.with_framing_part(wp(n))
}

/// Two-copy split of `(Q, R)` along `v = v1 + v2`, retaining the full first
/// copy and every second-copy-to-first-copy edge. Copies exist only for
/// positive dimensions (a lone zero part is kept when a vertex vanishes
/// entirely, so the split still covers the base).
pub fn build_negative_slice_quiver(
    q: &Arc<Quiver>,
    rels: &RelationSet,
    v1: &DimensionVector,
    v2: &DimensionVector,
) -> Result<ExpansionSpec> {
    let mut parts = Vec::new();
    let mut copy1: Vec<Option<usize>> = vec![None; q.vertex_count()];
    let mut copy2: Vec<Option<usize>> = vec![None; q.vertex_count()];
    for k in 0..q.vertex_count() {
        if v1.get(k) > 0 || (v1.get(k) == 0 && v2.get(k) == 0) {
            copy1[k] = Some(parts.len());
            parts.push(VertexPart {
                id: format!("{}.1", q.vertex_id(k)),
                base_vertex: k,
                dim: v1.get(k),
            });
        }
        if v2.get(k) > 0 {
            copy2[k] = Some(parts.len());
            parts.push(VertexPart {
                id: format!("{}.2", q.vertex_id(k)),
                base_vertex: k,
                dim: v2.get(k),
            });
        }
    }
    let mut retained = Vec::new();
    for (e, edge) in q.edges().iter().enumerate() {
        if let (Some(tp), Some(hp)) = (copy1[edge.tail], copy1[edge.head]) {
            retained.push(RetainedEdge {
                id: format!("{}.1", edge.id),
                base_edge: e,
                tail_part: tp,
                head_part: hp,
            });
        }
        if let (Some(tp), Some(hp)) = (copy2[edge.tail], copy1[edge.head]) {
            retained.push(RetainedEdge {
                id: format!("{}.y", edge.id),
                base_edge: e,
                tail_part: tp,
                head_part: hp,
            });
        }
    }
    ExpansionSpec::new(q, rels.clone(), parts, retained)
}

/// Builds the restricted-quiver representation `(x, y)` of a negative-slice
/// split from its diagonal part and its connecting graded map.
pub fn negative_slice_rep(
    spec: &ExpansionSpec,
    result: &ExpansionResult,
    x: &Representation,
    y: &GradedLinearMap,
) -> Result<Representation> {
    let dims = spec.expanded_dims(&result.qprime);
    let mut blocks = Vec::with_capacity(spec.retained.len());
    for e in &spec.retained {
        if e.id.ends_with(".1") {
            blocks.push(x.block(e.base_edge).clone());
        } else {
            blocks.push(y.block(e.base_edge).clone());
        }
    }
    Representation::from_blocks(&result.qprime, dims, blocks)
}

/// Block dimensions of the two summands of the relation space of a
/// negative-slice split, one entry per base relation.
#[derive(Debug, Clone)]
pub struct SliceRelationSplit {
    /// (relation id, rows, cols) over the first copy.
    pub diagonal: Vec<(String, usize, usize)>,
    /// (relation id, rows, cols) from the second copy into the first.
    pub connecting: Vec<(String, usize, usize)>,
}

pub fn negative_slice_relation_split(
    rels: &RelationSet,
    v1: &DimensionVector,
    v2: &DimensionVector,
) -> SliceRelationSplit {
    SliceRelationSplit {
        diagonal: rels
            .relations()
            .iter()
            .map(|r| (r.id.clone(), v1.get(r.head), v1.get(r.tail)))
            .collect(),
        connecting: rels
            .relations()
            .iter()
            .map(|r| (r.id.clone(), v1.get(r.head), v2.get(r.tail)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{build_handsaw, jordan_double};
    use crate::rep::relation_map;
    use crate::rng::trial_rng;

    #[test]
    fn handsaw_reduction_matches_builder() {
        for n in [3usize, 4, 5] {
            let spec = adhm_handsaw_spec(n, &vec![1; n - 1], &vec![1; n]).unwrap();
            let result = expand_restrict(&spec).unwrap();
            let (hq, hr) = build_handsaw(n).unwrap();
            assert!(result.fully_restricted, "n={n}");
            assert_eq!(result.rprime.len(), hr.len());
            // identical edge names let us map indices through ids
            let map = |e: usize| {
                hq.edge_index(&result.qprime.edge(e).id.clone()).unwrap()
            };
            assert!(result.rprime.same_terms(&hr, &map));
        }
    }

    #[test]
    fn trivial_expansion_is_identity() {
        let (q, r) = jordan_double();
        let q = Arc::new(q);
        let parts = (0..q.vertex_count())
            .map(|k| VertexPart {
                id: q.vertex_id(k).to_string(),
                base_vertex: k,
                dim: 2,
            })
            .collect();
        let retained = q
            .edges()
            .iter()
            .enumerate()
            .map(|(e, edge)| RetainedEdge {
                id: edge.id.clone(),
                base_edge: e,
                tail_part: edge.tail,
                head_part: edge.head,
            })
            .collect();
        let spec = ExpansionSpec::new(&q, r.clone(), parts, retained).unwrap();
        let result = expand_restrict(&spec).unwrap();
        assert!(result.fully_restricted);
        assert!(result.dropped_paths.is_empty());
        let map = |e: usize| q.edge_index(&result.qprime.edge(e).id.clone()).unwrap();
        assert!(result.rprime.same_terms(&r, &map));
    }

    #[test]
    fn negative_slice_split_of_jordan() {
        let (q, r) = jordan_double();
        let q = Arc::new(q);
        let v1 = DimensionVector::new(&q, vec![1, 1]).unwrap();
        let v2 = DimensionVector::new(&q, vec![1, 0]).unwrap();
        let spec = build_negative_slice_quiver(&q, &r, &v1, &v2).unwrap();
        let result = expand_restrict(&spec).unwrap();
        let copy1 = result
            .qprime
            .edges()
            .iter()
            .filter(|e| e.id.ends_with(".1"))
            .count();
        let cross = result
            .qprime
            .edges()
            .iter()
            .filter(|e| e.id.ends_with(".y"))
            .count();
        assert_eq!(copy1, 4);
        assert_eq!(cross, 3);
        assert!(!result.fully_restricted);
        // block split: one entry per base relation on both summands
        let split = negative_slice_relation_split(&r, &v1, &v2);
        assert_eq!(split.diagonal.len(), 2);
        assert_eq!(split.connecting.len(), 2);
        // the framing relation block from the second copy is 0-dimensional
        assert_eq!(split.connecting[1].2, 0);
    }

    #[test]
    fn negative_slice_with_empty_second_copy() {
        let (q, r) = jordan_double();
        let q = Arc::new(q);
        let v1 = DimensionVector::new(&q, vec![2, 1]).unwrap();
        let v2 = DimensionVector::zero(&q);
        let spec = build_negative_slice_quiver(&q, &r, &v1, &v2).unwrap();
        let result = expand_restrict(&spec).unwrap();
        assert_eq!(result.qprime.edge_count(), q.edge_count());
        let map = |e: usize| {
            let id = result.qprime.edge(e).id.trim_end_matches(".1").to_string();
            q.edge_index(&id).unwrap()
        };
        assert!(result.rprime.same_terms(&r, &map));
        assert!(result.fully_restricted);
    }

    #[test]
    fn restricted_relations_project_into_base_relations() {
        // every surviving relation maps edgewise onto a sub-sum of its
        // base relation, coefficients included
        for (spec, _) in [
            (adhm_handsaw_spec(4, &[1, 1, 1], &[1, 1, 1, 1]).unwrap(), 0),
            (
                {
                    let (q, r) = jordan_double();
                    let q = Arc::new(q);
                    let v1 = DimensionVector::new(&q, vec![1, 1]).unwrap();
                    let v2 = DimensionVector::new(&q, vec![1, 0]).unwrap();
                    build_negative_slice_quiver(&q, &r, &v1, &v2).unwrap()
                },
                0,
            ),
        ] {
            let result = expand_restrict(&spec).unwrap();
            for (i, rel) in result.rprime.relations().iter().enumerate() {
                let tag = result.relation_tags[i];
                let base_rel = &spec.base_relations().relations()[tag.base_relation];
                for (coeff, path) in rel.terms() {
                    let base_path: Vec<usize> = path
                        .edges()
                        .iter()
                        .map(|&e| spec.retained()[e].base_edge)
                        .collect();
                    let hit = base_rel.terms().iter().find(|(c, p)| {
                        p.edges() == base_path.as_slice() && (c - coeff).norm() < 1e-15
                    });
                    assert!(
                        hit.is_some(),
                        "lifted path {:?} of {:?} has no base counterpart",
                        path.display(&result.qprime),
                        rel.id
                    );
                }
                assert!(rel.terms().len() <= base_rel.terms().len());
            }
        }
    }

    #[test]
    fn embed_and_restrict_roundtrip() {
        let spec = adhm_handsaw_spec(3, &[1, 1], &[1, 1, 1]).unwrap();
        let result = expand_restrict(&spec).unwrap();
        let dims = spec.expanded_dims(&result.qprime);
        let mut rng = trial_rng(21, "embed", 0);
        let xp = Representation::random(&result.qprime, dims, &mut rng);
        let x = embed_restricted_rep(&spec, &result, &xp).unwrap();
        let back = restrict_rep(&spec, &result, &x).unwrap();
        for e in 0..result.qprime.edge_count() {
            assert!((back.block(e) - xp.block(e)).norm() < 1e-15);
        }
        // relation transfer: nu'(x') = 0 forces nu(S(x')) = 0
        let nu_p = relation_map(&xp, &result.rprime).unwrap();
        let nu = relation_map(&x, &spec.base_relations).unwrap();
        // generic x' does not satisfy the relations, but the retained slot
        // of nu must reproduce nu' blockwise
        let tag = result.relation_tags[0];
        let ro = spec.part_offset(tag.head_part);
        let co = spec.part_offset(tag.tail_part);
        let block = nu.block(tag.base_relation).view(
            (ro, co),
            (nu_p.block(0).nrows(), nu_p.block(0).ncols()),
        );
        assert!((CMat::from(block) - nu_p.block(0)).norm() < 1e-12);
    }
}
