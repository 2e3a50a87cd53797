//! Complex-matrix representations of a quiver and the linear maps between
//! graded homomorphism spaces: path evaluation, the relation map and its
//! derivative/adjoint, the infinitesimal group action, and the moment map.

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{C64, CMat, CVec};
use crate::quiver::{DimensionVector, Path, Quiver, RelationSet};
use crate::rng::random_matrix;

/// One complex matrix per edge, of shape (head dim x tail dim).
#[derive(Debug, Clone)]
pub struct Representation {
    quiver: Arc<Quiver>,
    dims: DimensionVector,
    blocks: Vec<CMat>,
}

/// An element of the edge-graded homomorphism space from a `source`-graded
/// collection of vertex spaces to a `target`-graded one; block `a` has
/// shape (target[head(a)] x source[tail(a)]).
#[derive(Debug, Clone)]
pub struct GradedLinearMap {
    quiver: Arc<Quiver>,
    source: DimensionVector,
    target: DimensionVector,
    blocks: Vec<CMat>,
}

/// A vertex-graded collection of matrices, block `k` of shape
/// (target[k] x source[k]). With `source == target` this is a Lie algebra
/// element; rectangular variants appear in deformation complexes.
#[derive(Debug, Clone)]
pub struct LieAlgebraElement {
    quiver: Arc<Quiver>,
    source: DimensionVector,
    target: DimensionVector,
    blocks: Vec<CMat>,
}

/// One matrix per relation, block `r` of shape
/// (target[head(r)] x source[tail(r)]).
#[derive(Debug, Clone)]
pub struct RelationValue {
    source: DimensionVector,
    target: DimensionVector,
    blocks: Vec<CMat>,
}

fn edge_shape(q: &Quiver, source: &DimensionVector, target: &DimensionVector, e: usize) -> (usize, usize) {
    let edge = q.edge(e);
    (target.get(edge.head), source.get(edge.tail))
}

impl Representation {
    pub fn zero(quiver: &Arc<Quiver>, dims: DimensionVector) -> Self {
        let blocks = (0..quiver.edge_count())
            .map(|e| {
                let (r, c) = edge_shape(quiver, &dims, &dims, e);
                CMat::zeros(r, c)
            })
            .collect();
        Representation {
            quiver: quiver.clone(),
            dims,
            blocks,
        }
    }

    pub fn random(quiver: &Arc<Quiver>, dims: DimensionVector, rng: &mut impl Rng) -> Self {
        let mut x = Representation::zero(quiver, dims);
        for e in 0..quiver.edge_count() {
            let (r, c) = edge_shape(quiver, &x.dims, &x.dims, e);
            x.blocks[e] = random_matrix(rng, r, c);
        }
        x
    }

    pub fn from_blocks(
        quiver: &Arc<Quiver>,
        dims: DimensionVector,
        blocks: Vec<CMat>,
    ) -> Result<Self> {
        if blocks.len() != quiver.edge_count() {
            return Err(Error::ShapeError("one block per edge required".into()));
        }
        for (e, b) in blocks.iter().enumerate() {
            let (r, c) = edge_shape(quiver, &dims, &dims, e);
            if b.nrows() != r || b.ncols() != c {
                return Err(Error::ShapeError(format!(
                    "edge {:?} expects {}x{}, got {}x{}",
                    quiver.edge(e).id,
                    r,
                    c,
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Representation {
            quiver: quiver.clone(),
            dims,
            blocks,
        })
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn dims(&self) -> &DimensionVector {
        &self.dims
    }

    pub fn block(&self, e: usize) -> &CMat {
        &self.blocks[e]
    }

    pub fn block_mut(&mut self, e: usize) -> &mut CMat {
        &mut self.blocks[e]
    }

    pub fn set_block(&mut self, id: &str, m: CMat) -> Result<()> {
        let e = self.quiver.edge_index(id)?;
        let (r, c) = edge_shape(&self.quiver, &self.dims, &self.dims, e);
        if m.nrows() != r || m.ncols() != c {
            return Err(Error::ShapeError(format!(
                "edge {id:?} expects {r}x{c}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        self.blocks[e] = m;
        Ok(())
    }

    /// Sets a 1x1 block from a scalar.
    pub fn set_scalar(&mut self, id: &str, z: C64) -> Result<()> {
        self.set_block(id, CMat::from_element(1, 1, z))
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn as_graded(&self) -> GradedLinearMap {
        GradedLinearMap {
            quiver: self.quiver.clone(),
            source: self.dims.clone(),
            target: self.dims.clone(),
            blocks: self.blocks.clone(),
        }
    }

    pub fn axpy(&mut self, alpha: f64, dir: &GradedLinearMap) {
        let a = C64::new(alpha, 0.0);
        for e in 0..self.blocks.len() {
            self.blocks[e] += &dir.blocks[e] * a;
        }
    }

    /// Conjugates by a per-vertex unitary (or any invertible) collection:
    /// `x_a <- g_{h(a)} x_a g_{t(a)}^{-1}` with `g_inv` supplied by the caller.
    pub fn conjugate(&self, g: &[CMat], g_inv: &[CMat]) -> Representation {
        let mut out = self.clone();
        for (e, edge) in self.quiver.edges().iter().enumerate() {
            out.blocks[e] = &g[edge.head] * &self.blocks[e] * &g_inv[edge.tail];
        }
        out
    }

    /// Assembles a representation over `v1 + v2` from diagonal parts and a
    /// strictly triangular part mapping the second summand into the first.
    /// Per vertex, coordinates are ordered first-summand first.
    pub fn block_embed(
        x1: &Representation,
        x2: &Representation,
        off: Option<&GradedLinearMap>,
    ) -> Result<Representation> {
        let q = x1.quiver.clone();
        if let Some(dx) = off {
            if dx.source != x2.dims || dx.target != x1.dims {
                return Err(Error::ShapeError(
                    "off-diagonal part must map the second summand into the first".into(),
                ));
            }
        }
        let dims = x1.dims.add(&x2.dims);
        let mut out = Representation::zero(&q, dims);
        for (e, edge) in q.edges().iter().enumerate() {
            let (r1, c1) = (x1.dims.get(edge.head), x1.dims.get(edge.tail));
            let (r2, c2) = (x2.dims.get(edge.head), x2.dims.get(edge.tail));
            let mut m = CMat::zeros(r1 + r2, c1 + c2);
            if r1 > 0 && c1 > 0 {
                m.view_mut((0, 0), (r1, c1)).copy_from(&x1.blocks[e]);
            }
            if r2 > 0 && c2 > 0 {
                m.view_mut((r1, c1), (r2, c2)).copy_from(&x2.blocks[e]);
            }
            if let Some(dx) = off {
                if r1 > 0 && c2 > 0 {
                    m.view_mut((0, c1), (r1, c2)).copy_from(&dx.blocks[e]);
                }
            }
            out.blocks[e] = m;
        }
        Ok(out)
    }

    /// Splits a representation over `v1 + v2` into its four block parts:
    /// the two diagonal representations plus both off-diagonal graded maps.
    pub fn block_split(
        &self,
        v1: &DimensionVector,
        v2: &DimensionVector,
    ) -> Result<(Representation, Representation, GradedLinearMap, GradedLinearMap)> {
        if v1.add(v2) != self.dims {
            return Err(Error::ShapeError("block split dims must sum to dims".into()));
        }
        let q = &self.quiver;
        let mut x1 = Representation::zero(q, v1.clone());
        let mut x2 = Representation::zero(q, v2.clone());
        let mut up = GradedLinearMap::zero(q, v2.clone(), v1.clone());
        let mut low = GradedLinearMap::zero(q, v1.clone(), v2.clone());
        for (e, edge) in q.edges().iter().enumerate() {
            let (r1, c1) = (v1.get(edge.head), v1.get(edge.tail));
            let (r2, c2) = (v2.get(edge.head), v2.get(edge.tail));
            let m = &self.blocks[e];
            if r1 > 0 && c1 > 0 {
                x1.blocks[e] = m.view((0, 0), (r1, c1)).into();
            }
            if r2 > 0 && c2 > 0 {
                x2.blocks[e] = m.view((r1, c1), (r2, c2)).into();
            }
            if r1 > 0 && c2 > 0 {
                up.blocks[e] = m.view((0, c1), (r1, c2)).into();
            }
            if r2 > 0 && c1 > 0 {
                low.blocks[e] = m.view((r1, 0), (r2, c1)).into();
            }
        }
        Ok((x1, x2, up, low))
    }
}

impl GradedLinearMap {
    pub fn zero(quiver: &Arc<Quiver>, source: DimensionVector, target: DimensionVector) -> Self {
        let blocks = (0..quiver.edge_count())
            .map(|e| {
                let (r, c) = edge_shape(quiver, &source, &target, e);
                CMat::zeros(r, c)
            })
            .collect();
        GradedLinearMap {
            quiver: quiver.clone(),
            source,
            target,
            blocks,
        }
    }

    pub fn random(
        quiver: &Arc<Quiver>,
        source: DimensionVector,
        target: DimensionVector,
        rng: &mut impl Rng,
    ) -> Self {
        let mut g = GradedLinearMap::zero(quiver, source, target);
        for e in 0..quiver.edge_count() {
            let (r, c) = edge_shape(quiver, &g.source, &g.target, e);
            g.blocks[e] = random_matrix(rng, r, c);
        }
        g
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn source(&self) -> &DimensionVector {
        &self.source
    }

    pub fn target(&self) -> &DimensionVector {
        &self.target
    }

    pub fn block(&self, e: usize) -> &CMat {
        &self.blocks[e]
    }

    pub fn block_mut(&mut self, e: usize) -> &mut CMat {
        &mut self.blocks[e]
    }

    pub fn set_scalar(&mut self, id: &str, z: C64) -> Result<()> {
        let e = self.quiver.edge_index(id)?;
        let (r, c) = edge_shape(&self.quiver, &self.source, &self.target, e);
        if (r, c) != (1, 1) {
            return Err(Error::ShapeError(format!("edge {id:?} block is {r}x{c}")));
        }
        self.blocks[e] = CMat::from_element(1, 1, z);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.nrows() * b.ncols()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    /// Hermitian inner product: sum of tr(A_a B_a^*).
    pub fn inner(&self, other: &GradedLinearMap) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            for (x, y) in a.iter().zip(b.iter()) {
                s += x * y.conj();
            }
        }
        s
    }

    pub fn scale(&self, z: C64) -> GradedLinearMap {
        let mut out = self.clone();
        for b in &mut out.blocks {
            *b *= z;
        }
        out
    }

    pub fn add(&self, other: &GradedLinearMap) -> GradedLinearMap {
        let mut out = self.clone();
        for (b, o) in out.blocks.iter_mut().zip(&other.blocks) {
            *b += o;
        }
        out
    }

    pub fn to_vec(&self) -> CVec {
        let mut data = Vec::with_capacity(self.dim());
        for b in &self.blocks {
            data.extend_from_slice(b.as_slice());
        }
        CVec::from_vec(data)
    }

    pub fn from_vec(
        quiver: &Arc<Quiver>,
        source: DimensionVector,
        target: DimensionVector,
        v: &CVec,
    ) -> Self {
        let mut g = GradedLinearMap::zero(quiver, source, target);
        let mut at = 0;
        for e in 0..quiver.edge_count() {
            let (r, c) = edge_shape(quiver, &g.source, &g.target, e);
            g.blocks[e] = CMat::from_column_slice(r, c, &v.as_slice()[at..at + r * c]);
            at += r * c;
        }
        debug_assert_eq!(at, v.len());
        g
    }

    pub fn into_representation(self) -> Result<Representation> {
        if self.source != self.target {
            return Err(Error::ShapeError(
                "only square graded maps are representations".into(),
            ));
        }
        Ok(Representation {
            quiver: self.quiver,
            dims: self.source,
            blocks: self.blocks,
        })
    }
}

impl LieAlgebraElement {
    pub fn quiver(&self) -> &Arc<Quiver> {
        &self.quiver
    }

    pub fn zero(quiver: &Arc<Quiver>, source: DimensionVector, target: DimensionVector) -> Self {
        let blocks = (0..quiver.vertex_count())
            .map(|k| CMat::zeros(target.get(k), source.get(k)))
            .collect();
        LieAlgebraElement {
            quiver: quiver.clone(),
            source,
            target,
            blocks,
        }
    }

    pub fn random(
        quiver: &Arc<Quiver>,
        source: DimensionVector,
        target: DimensionVector,
        rng: &mut impl Rng,
    ) -> Self {
        let mut u = LieAlgebraElement::zero(quiver, source, target);
        for k in 0..quiver.vertex_count() {
            u.blocks[k] = random_matrix(rng, u.target.get(k), u.source.get(k));
        }
        u
    }

    /// Random skew-Hermitian element (square grading).
    pub fn random_skew(quiver: &Arc<Quiver>, dims: &DimensionVector, rng: &mut impl Rng) -> Self {
        let mut u = LieAlgebraElement::zero(quiver, dims.clone(), dims.clone());
        for k in 0..quiver.vertex_count() {
            let g = random_matrix(rng, dims.get(k), dims.get(k));
            u.blocks[k] = (&g - g.adjoint()) * C64::new(0.5, 0.0);
        }
        u
    }

    pub fn source(&self) -> &DimensionVector {
        &self.source
    }

    pub fn target(&self) -> &DimensionVector {
        &self.target
    }

    pub fn block(&self, k: usize) -> &CMat {
        &self.blocks[k]
    }

    pub fn block_mut(&mut self, k: usize) -> &mut CMat {
        &mut self.blocks[k]
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.nrows() * b.ncols()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &LieAlgebraElement) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            for (x, y) in a.iter().zip(b.iter()) {
                s += x * y.conj();
            }
        }
        s
    }

    pub fn sub(&self, other: &LieAlgebraElement) -> LieAlgebraElement {
        let mut out = self.clone();
        for (b, o) in out.blocks.iter_mut().zip(&other.blocks) {
            *b -= o;
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    pub fn is_skew_hermitian(&self, tol: f64) -> bool {
        self.source == self.target
            && self
                .blocks
                .iter()
                .all(|b| (b + b.adjoint()).norm() <= tol * (1.0 + b.norm()))
    }

    pub fn to_vec(&self) -> CVec {
        let mut data = Vec::with_capacity(self.dim());
        for b in &self.blocks {
            data.extend_from_slice(b.as_slice());
        }
        CVec::from_vec(data)
    }

    pub fn from_vec(
        quiver: &Arc<Quiver>,
        source: DimensionVector,
        target: DimensionVector,
        v: &CVec,
    ) -> Self {
        let mut u = LieAlgebraElement::zero(quiver, source, target);
        let mut at = 0;
        for k in 0..quiver.vertex_count() {
            let (r, c) = (u.target.get(k), u.source.get(k));
            u.blocks[k] = CMat::from_column_slice(r, c, &v.as_slice()[at..at + r * c]);
            at += r * c;
        }
        u
    }
}

impl RelationValue {
    pub fn source(&self) -> &DimensionVector {
        &self.source
    }

    pub fn target(&self) -> &DimensionVector {
        &self.target
    }

    pub fn zero(r: &RelationSet, source: &DimensionVector, target: &DimensionVector) -> Self {
        let blocks = r
            .relations()
            .iter()
            .map(|rel| CMat::zeros(target.get(rel.head), source.get(rel.tail)))
            .collect();
        RelationValue {
            source: source.clone(),
            target: target.clone(),
            blocks,
        }
    }

    pub fn random(
        r: &RelationSet,
        source: &DimensionVector,
        target: &DimensionVector,
        rng: &mut impl Rng,
    ) -> Self {
        let blocks = r
            .relations()
            .iter()
            .map(|rel| random_matrix(rng, target.get(rel.head), source.get(rel.tail)))
            .collect();
        RelationValue {
            source: source.clone(),
            target: target.clone(),
            blocks,
        }
    }

    pub fn block(&self, i: usize) -> &CMat {
        &self.blocks[i]
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn set_block(&mut self, i: usize, m: CMat) {
        assert_eq!(
            (m.nrows(), m.ncols()),
            (self.blocks[i].nrows(), self.blocks[i].ncols()),
            "relation block shape"
        );
        self.blocks[i] = m;
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.nrows() * b.ncols()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &RelationValue) -> C64 {
        let mut s = C64::new(0.0, 0.0);
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            for (x, y) in a.iter().zip(b.iter()) {
                s += x * y.conj();
            }
        }
        s
    }

    pub fn sub(&self, other: &RelationValue) -> RelationValue {
        let mut out = self.clone();
        for (b, o) in out.blocks.iter_mut().zip(&other.blocks) {
            *b -= o;
        }
        out
    }

    pub fn to_vec(&self) -> CVec {
        let mut data = Vec::with_capacity(self.dim());
        for b in &self.blocks {
            data.extend_from_slice(b.as_slice());
        }
        CVec::from_vec(data)
    }

    pub fn from_vec(
        r: &RelationSet,
        source: &DimensionVector,
        target: &DimensionVector,
        v: &CVec,
    ) -> Self {
        let mut out = RelationValue::zero(r, source, target);
        let mut at = 0;
        for b in &mut out.blocks {
            let (rr, cc) = (b.nrows(), b.ncols());
            *b = CMat::from_column_slice(rr, cc, &v.as_slice()[at..at + rr * cc]);
            at += rr * cc;
        }
        out
    }
}

/// Product of the edge matrices along a path, first edge applied first.
pub fn evaluate_path(x: &Representation, p: &Path) -> Result<CMat> {
    let q = x.quiver();
    let tail = p.tail(q);
    let mut m = CMat::identity(x.dims().get(tail), x.dims().get(tail));
    for &e in p.edges() {
        m = x.block(e) * m;
    }
    Ok(m)
}

/// The relation map: block `r` is `sum_p lambda_p x_p`.
pub fn relation_map(x: &Representation, rels: &RelationSet) -> Result<RelationValue> {
    let mut out = RelationValue::zero(rels, x.dims(), x.dims());
    for (i, rel) in rels.relations().iter().enumerate() {
        for (coeff, p) in rel.terms() {
            let m = evaluate_path(x, p)?;
            out.blocks[i] += m * *coeff;
        }
    }
    Ok(out)
}

/// Derivative of the path evaluation at the block-diagonal point
/// `x1 (+) x2` in a strictly triangular direction `dx`:
/// `sum_l x1_{a_n}..x1_{a_{l+1}} dx_{a_l} x2_{a_{l-1}}..x2_{a_1}`.
pub fn path_derivative(
    x1: &Representation,
    x2: &Representation,
    dx: &GradedLinearMap,
    p: &Path,
) -> Result<CMat> {
    if dx.source() != x2.dims() || dx.target() != x1.dims() {
        return Err(Error::ShapeError(
            "direction must map the second summand into the first".into(),
        ));
    }
    let q = x1.quiver();
    let n = p.len();
    let tail = p.tail(q);
    let head = p.head(q);
    let mut out = CMat::zeros(x1.dims().get(head), x2.dims().get(tail));

    // prefix[l] = x2_{a_l} .. x2_{a_1} acting on the source of the path
    let mut prefix: Vec<CMat> = Vec::with_capacity(n);
    let mut acc = CMat::identity(x2.dims().get(tail), x2.dims().get(tail));
    prefix.push(acc.clone());
    for &e in p.edges().iter().take(n - 1) {
        acc = x2.block(e) * acc;
        prefix.push(acc.clone());
    }
    // walk suffixes of x1 from the head side
    let mut suffix = CMat::identity(x1.dims().get(head), x1.dims().get(head));
    for l in (0..n).rev() {
        let e = p.edges()[l];
        out += &suffix * &dx.blocks[e] * &prefix[l];
        suffix = suffix * x1.block(e);
    }
    Ok(out)
}

/// Derivative of the relation map at `x1 (+) x2` in direction `dx`.
pub fn d_nu(
    x1: &Representation,
    x2: &Representation,
    rels: &RelationSet,
    dx: &GradedLinearMap,
) -> Result<RelationValue> {
    let mut out = RelationValue::zero(rels, x2.dims(), x1.dims());
    for (i, rel) in rels.relations().iter().enumerate() {
        for (coeff, p) in rel.terms() {
            let m = path_derivative(x1, x2, dx, p)?;
            out.blocks[i] += m * *coeff;
        }
    }
    Ok(out)
}

/// Adjoint of `d_nu` for quadratic relation sets:
/// `u_r` contributes `conj(lambda_p) x1_{a2}^* u_r` to slot `a1(p)` and
/// `conj(lambda_p) u_r x2_{a1}^*` to slot `a2(p)`.
pub fn d_nu_adjoint(
    x1: &Representation,
    x2: &Representation,
    rels: &RelationSet,
    u: &RelationValue,
) -> Result<GradedLinearMap> {
    let q = x1.quiver();
    let mut out = GradedLinearMap::zero(q, x2.dims().clone(), x1.dims().clone());
    for (i, rel) in rels.relations().iter().enumerate() {
        for (coeff, p) in rel.terms() {
            if p.len() != 2 {
                return Err(Error::UnsupportedRelationDegree(format!(
                    "relation {:?} has a path of length {}",
                    rel.id,
                    p.len()
                )));
            }
            let (a1, a2) = (p.edges()[0], p.edges()[1]);
            let cbar = coeff.conj();
            out.blocks[a1] += x1.block(a2).adjoint() * &u.blocks[i] * cbar;
            out.blocks[a2] += &u.blocks[i] * x2.block(a1).adjoint() * cbar;
        }
    }
    Ok(out)
}

/// Infinitesimal action in the rectangular form:
/// `(rho(u))_a = u_{h(a)} x2_a - x1_a u_{t(a)}`.
pub fn inf_action(
    x1: &Representation,
    x2: &Representation,
    u: &LieAlgebraElement,
) -> Result<GradedLinearMap> {
    if u.source() != x2.dims() || u.target() != x1.dims() {
        return Err(Error::ShapeError(
            "vertex blocks must map the second grading into the first".into(),
        ));
    }
    let q = x1.quiver();
    let mut out = GradedLinearMap::zero(q, x2.dims().clone(), x1.dims().clone());
    for (e, edge) in q.edges().iter().enumerate() {
        out.blocks[e] = &u.blocks[edge.head] * x2.block(e) - x1.block(e) * &u.blocks[edge.tail];
    }
    Ok(out)
}

/// Square-case infinitesimal action at a single representation.
pub fn inf_action_square(x: &Representation, u: &LieAlgebraElement) -> Result<GradedLinearMap> {
    inf_action(x, x, u)
}

/// Adjoint of the infinitesimal action:
/// `(rho^*)(dx)_k = sum_{h(a)=k} dx_a x2_a^* - sum_{t(a)=k} x1_a^* dx_a`.
pub fn inf_action_adjoint(
    x1: &Representation,
    x2: &Representation,
    dx: &GradedLinearMap,
) -> Result<LieAlgebraElement> {
    if dx.source() != x2.dims() || dx.target() != x1.dims() {
        return Err(Error::ShapeError(
            "direction must map the second grading into the first".into(),
        ));
    }
    let q = x1.quiver();
    let mut out = LieAlgebraElement::zero(q, x2.dims().clone(), x1.dims().clone());
    for (e, edge) in q.edges().iter().enumerate() {
        out.blocks[edge.head] += &dx.blocks[e] * x2.block(e).adjoint();
        out.blocks[edge.tail] -= x1.block(e).adjoint() * &dx.blocks[e];
    }
    Ok(out)
}

/// Moment map of the unitary action:
/// `mu(x)_k = (1/2i) (sum_{h(a)=k} x_a x_a^* - sum_{t(a)=k} x_a^* x_a)`.
/// The blocks are skew-Hermitian and the total trace vanishes.
pub fn moment_map(x: &Representation) -> LieAlgebraElement {
    let q = x.quiver();
    let mut out = LieAlgebraElement::zero(q, x.dims().clone(), x.dims().clone());
    let half_over_i = C64::new(0.0, -0.5); // 1/(2i)
    for (e, edge) in q.edges().iter().enumerate() {
        let b = x.block(e);
        out.blocks[edge.head] += b * b.adjoint() * half_over_i;
        out.blocks[edge.tail] -= b.adjoint() * b * half_over_i;
    }
    out
}

/// `mu(x) - i alpha`, the shifted moment map entering the energy.
pub fn moment_defect(x: &Representation, alpha: &crate::quiver::CentralElement) -> LieAlgebraElement {
    let mut beta = moment_map(x);
    for k in 0..x.quiver().vertex_count() {
        let n = x.dims().get(k);
        let shift = Complex64::new(0.0, alpha.get_f64(k));
        for i in 0..n {
            beta.blocks[k][(i, i)] -= shift;
        }
    }
    beta
}
