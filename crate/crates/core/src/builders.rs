//! Constructors for the standard quiver-with-relations families used
//! throughout the crate and its test suites.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quiver::{Path, Quiver, Relation, RelationSet};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn minus_one() -> Complex64 {
    Complex64::new(-1.0, 0.0)
}

/// Framed Jordan base: a loop `B` at vertex `1` and an edge `a: inf -> 1`.
pub fn framed_jordan_base() -> Quiver {
    Quiver::new(
        vec!["1".into(), "inf".into()],
        vec![
            ("B".into(), "1".into(), "1".into()),
            ("a".into(), "inf".into(), "1".into()),
        ],
        Some("inf"),
    )
    .unwrap()
}

/// Framed A1 base: the single edge `a: inf -> 1`.
pub fn framed_a1_base() -> Quiver {
    Quiver::new(
        vec!["1".into(), "inf".into()],
        vec![("a".into(), "inf".into(), "1".into())],
        Some("inf"),
    )
    .unwrap()
}

/// Doubles a base quiver by adding a reversed edge `<id>bar` for every base
/// edge, and installs one relation per vertex:
/// `r_k = sum_{h(a)=k} a abar - sum_{t(a)=k} abar a` over base edges.
pub fn build_nakajima_double(base: &Quiver) -> Result<(Quiver, RelationSet)> {
    let mut edges: Vec<(String, String, String)> = Vec::with_capacity(2 * base.edge_count());
    for e in base.edges() {
        edges.push((
            e.id.clone(),
            base.vertex_id(e.tail).to_string(),
            base.vertex_id(e.head).to_string(),
        ));
        edges.push((
            format!("{}bar", e.id),
            base.vertex_id(e.head).to_string(),
            base.vertex_id(e.tail).to_string(),
        ));
    }
    let doubled = Quiver::new(
        base.vertices().to_vec(),
        edges,
        base.framing().map(|k| base.vertex_id(k)),
    )?;

    let mut relations = Vec::with_capacity(base.vertex_count());
    for k in 0..base.vertex_count() {
        let mut terms = Vec::new();
        for e in base.edges() {
            let a = doubled.edge_index(&e.id)?;
            let abar = doubled.edge_index(&format!("{}bar", e.id))?;
            if e.head == k {
                // printed `a abar`: apply abar first
                terms.push((one(), Path::new(&doubled, vec![abar, a])?));
            }
            if e.tail == k {
                terms.push((minus_one(), Path::new(&doubled, vec![a, abar])?));
            }
        }
        relations.push(Relation::new(
            &doubled,
            format!("r_{}", base.vertex_id(k)),
            k,
            k,
            terms,
        )?);
    }
    Ok((doubled, RelationSet::new(relations)?))
}

/// Handsaw quiver on `n` steps: vertices `V1..V{n-1}`, `W1..Wn`, edges
/// `B1_k: Vk -> V{k+1}`, `B2_k: Vk -> Vk`, `a_k: Wk -> Vk`,
/// `b_k: V{k-1} -> Wk`, and one relation per interior step,
/// `r_k = B1_k B2_k - B2_{k+1} B1_k + a_{k+1} b_{k+1}`.
/// The framing vertex is `Wn`.
pub fn build_handsaw(n: usize) -> Result<(Quiver, RelationSet)> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "handsaw needs n >= 2, got {n}"
        )));
    }
    let mut vertices: Vec<String> = (1..n).map(|k| format!("V{k}")).collect();
    vertices.extend((1..=n).map(|k| format!("W{k}")));
    let mut edges = Vec::new();
    for k in 1..=n.saturating_sub(2) {
        edges.push((format!("B1_{k}"), format!("V{k}"), format!("V{}", k + 1)));
    }
    for k in 1..n {
        edges.push((format!("B2_{k}"), format!("V{k}"), format!("V{k}")));
        edges.push((format!("a_{k}"), format!("W{k}"), format!("V{k}")));
    }
    for k in 2..=n {
        edges.push((format!("b_{k}"), format!("V{}", k - 1), format!("W{k}")));
    }
    let framing = format!("W{n}");
    let q = Quiver::new(vertices, edges, Some(&framing))?;

    let mut relations = Vec::new();
    for k in 1..=n.saturating_sub(2) {
        let b1 = q.edge_index(&format!("B1_{k}"))?;
        let b2k = q.edge_index(&format!("B2_{k}"))?;
        let b2k1 = q.edge_index(&format!("B2_{}", k + 1))?;
        let ak1 = q.edge_index(&format!("a_{}", k + 1))?;
        let bk1 = q.edge_index(&format!("b_{}", k + 1))?;
        let tail = q.vertex_index(&format!("V{k}"))?;
        let head = q.vertex_index(&format!("V{}", k + 1))?;
        let terms = vec![
            (one(), Path::new(&q, vec![b2k, b1])?),
            (minus_one(), Path::new(&q, vec![b1, b2k1])?),
            (one(), Path::new(&q, vec![bk1, ak1])?),
        ];
        relations.push(Relation::new(&q, format!("r_{k}"), tail, head, terms)?);
    }
    Ok((q, RelationSet::new(relations)?))
}

/// Two-vertex quiver with `n` loops `a1..an` at `V`, edges `b1: W -> V` and
/// `b2: V -> W`, and relations
/// `r = a1 a_{sigma(1)} + ... + an a_{sigma(n)} + b1 b2`, `r' = b2 b1`.
/// `sigma` is a permutation of `0..n` in zero-based form. The framing
/// vertex is `W`.
pub fn build_extended_adhm(n_loops: usize, sigma: &[usize]) -> Result<(Quiver, RelationSet)> {
    if n_loops < 1 {
        return Err(Error::InvalidParameter("need at least one loop".into()));
    }
    if sigma.len() != n_loops {
        return Err(Error::InvalidParameter(format!(
            "permutation length {} does not match {n_loops}",
            sigma.len()
        )));
    }
    let mut seen = vec![false; n_loops];
    for &s in sigma {
        if s >= n_loops || seen[s] {
            return Err(Error::InvalidParameter("sigma is not a permutation".into()));
        }
        seen[s] = true;
    }

    let mut edges: Vec<(String, String, String)> = (1..=n_loops)
        .map(|i| (format!("a{i}"), "V".into(), "V".into()))
        .collect();
    edges.push(("b1".into(), "W".into(), "V".into()));
    edges.push(("b2".into(), "V".into(), "W".into()));
    let q = Quiver::new(vec!["V".into(), "W".into()], edges, Some("W"))?;
    let v = q.vertex_index("V")?;
    let w = q.vertex_index("W")?;

    let mut terms = Vec::new();
    for i in 0..n_loops {
        let outer = q.edge_index(&format!("a{}", i + 1))?;
        let inner = q.edge_index(&format!("a{}", sigma[i] + 1))?;
        // printed `a_i a_{sigma(i)}`: apply the sigma edge first
        terms.push((one(), Path::new(&q, vec![inner, outer])?));
    }
    let b1 = q.edge_index("b1")?;
    let b2 = q.edge_index("b2")?;
    terms.push((one(), Path::new(&q, vec![b2, b1])?));
    let r = Relation::new(&q, "r".into(), v, v, terms)?;
    let rprime = Relation::new(
        &q,
        "r'".into(),
        w,
        w,
        vec![(one(), Path::new(&q, vec![b1, b2])?)],
    )?;
    Ok((q, RelationSet::new(vec![r, rprime])?))
}

/// Framed Jordan double: the Nakajima double of `framed_jordan_base`.
pub fn jordan_double() -> (Quiver, RelationSet) {
    build_nakajima_double(&framed_jordan_base()).unwrap()
}

/// Framed A1 double: the Nakajima double of `framed_a1_base`.
pub fn a1_double() -> (Quiver, RelationSet) {
    build_nakajima_double(&framed_a1_base()).unwrap()
}
