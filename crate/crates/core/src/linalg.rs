//! Dense complex linear algebra helpers: the shared rank rule, kernels,
//! orthonormalisation and principal angles.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Relative singular-value cutoff used by every rank decision in the crate.
pub const RANK_REL_TOL: f64 = 1e-9;

/// Outcome of a rank decision, carrying the spectral data needed to judge
/// how well separated the decision was.
#[derive(Debug, Clone)]
pub struct RankReport {
    pub rank: usize,
    pub nrows: usize,
    pub ncols: usize,
    /// Largest singular value (0 for an empty or zero matrix).
    pub smax: f64,
    /// Smallest kept singular value relative to `smax`; `inf` when rank is 0.
    pub kept_min_rel: f64,
    /// Largest discarded singular value relative to `smax`; 0 when full rank.
    pub drop_max_rel: f64,
}

impl RankReport {
    /// Separation margin of the rank decision: ratio between the smallest
    /// kept and the largest dropped singular value.
    pub fn margin(&self) -> f64 {
        if self.rank == 0 || self.drop_max_rel == 0.0 {
            if self.rank == 0 {
                f64::INFINITY
            } else {
                self.kept_min_rel / RANK_REL_TOL
            }
        } else {
            self.kept_min_rel / self.drop_max_rel
        }
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rank
    }
}

pub fn zeros(nrows: usize, ncols: usize) -> CMat {
    CMat::zeros(nrows, ncols)
}

fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Numerical rank with the crate-wide rule: keep singular values above
/// `rel_tol * max(smax, 1e-300)`.
pub fn rank_report_tol(m: &CMat, rel_tol: f64) -> RankReport {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    let cutoff = rel_tol * smax.max(1e-300);
    let rank = sv.iter().filter(|&&s| s > cutoff).count();
    let kept_min_rel = if rank == 0 {
        f64::INFINITY
    } else {
        sv[rank - 1] / smax.max(1e-300)
    };
    let drop_max_rel = if rank < sv.len() {
        sv[rank] / smax.max(1e-300)
    } else {
        0.0
    };
    RankReport {
        rank,
        nrows: m.nrows(),
        ncols: m.ncols(),
        smax,
        kept_min_rel,
        drop_max_rel,
    }
}

pub fn rank_report(m: &CMat) -> RankReport {
    rank_report_tol(m, RANK_REL_TOL)
}

pub fn rank(m: &CMat) -> usize {
    rank_report(m).rank
}

/// Orthonormal basis of the null space, as matrix columns.
pub fn null_space(m: &CMat) -> CMat {
    null_space_tol(m, RANK_REL_TOL)
}

pub fn null_space_tol(m: &CMat, rel_tol: f64) -> CMat {
    let n = m.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMat::identity(n, n);
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd with v requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = rel_tol * smax.max(1e-300);
    let kept: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff)
        .collect();
    // v_t has min(nrows, ncols) rows; null vectors are the remaining rows of
    // the full V, which nalgebra does not return, so complete the basis by
    // projecting the identity away from the row space.
    let rank = kept.len();
    if rank == n {
        return CMat::zeros(n, 0);
    }
    // Rows of v_t indexed by kept singular values span the row space.
    let mut row_basis = CMat::zeros(n, rank);
    for (j, &i) in kept.iter().enumerate() {
        for r in 0..n {
            row_basis[(r, j)] = v_t[(i, r)].conj();
        }
    }
    complete_to_complement(&row_basis, n)
}

/// Orthonormal basis of the column space.
pub fn column_space(m: &CMat) -> CMat {
    if m.nrows() == 0 || m.ncols() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd with u requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = RANK_REL_TOL * smax.max(1e-300);
    let kept: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff)
        .collect();
    let mut b = CMat::zeros(m.nrows(), kept.len());
    for (j, &i) in kept.iter().enumerate() {
        b.set_column(j, &u.column(i));
    }
    b
}

/// Orthonormal basis of the orthogonal complement of the span of `basis`
/// (columns assumed orthonormal) inside the ambient space of dimension `n`.
fn complete_to_complement(basis: &CMat, n: usize) -> CMat {
    let k = basis.ncols();
    let mut cols: Vec<CVec> = Vec::with_capacity(n - k);
    let mut have = 0usize;
    for i in 0..n {
        if have == n - k {
            break;
        }
        let mut v = CVec::zeros(n);
        v[i] = C64::new(1.0, 0.0);
        // project away basis and previously found complement vectors, twice
        // for numerical safety
        for _ in 0..2 {
            for j in 0..k {
                let b = basis.column(j);
                let c: C64 = b.dotc(&v);
                v -= CVec::from(b) * c;
            }
            for w in &cols {
                let c: C64 = w.dotc(&v);
                v -= w * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v / C64::new(norm, 0.0));
            have += 1;
        }
    }
    let mut out = CMat::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Modified Gram-Schmidt; returns an orthonormal basis of the span.
pub fn orthonormalize(vectors: &[CVec]) -> Vec<CVec> {
    let mut out: Vec<CVec> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &out {
                let c: C64 = b.dotc(&w);
                w -= b * c;
            }
        }
        let n = w.norm();
        if n > 1e-12 {
            out.push(w / C64::new(n, 0.0));
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let se = nalgebra::SymmetricEigen::new(m.clone());
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMat::zeros(n, n);
    for (j, &i) in idx.iter().enumerate() {
        vecs.set_column(j, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Largest principal angle (radians) between the column spans of two
/// matrices with orthonormal columns. Returns `None` if the spans have
/// different dimensions.
pub fn max_principal_angle(a: &CMat, b: &CMat) -> Option<f64> {
    if a.ncols() != b.ncols() {
        return None;
    }
    if a.ncols() == 0 {
        return Some(0.0);
    }
    let overlap = a.adjoint() * b;
    let mut sv = singular_values(&overlap);
    sv.truncate(a.ncols());
    let smin = sv.last().copied().unwrap_or(0.0).clamp(-1.0, 1.0);
    Some(smin.min(1.0).acos())
}

/// Builds the matrix of a linear map given its action on basis vectors.
pub fn operator_matrix<F>(dim_in: usize, dim_out: usize, mut apply: F) -> CMat
where
    F: FnMut(&CVec) -> CVec,
{
    let mut m = CMat::zeros(dim_out, dim_in);
    let mut e = CVec::zeros(dim_in);
    for j in 0..dim_in {
        e[j] = C64::new(1.0, 0.0);
        let col = apply(&e);
        assert_eq!(col.len(), dim_out, "operator output dimension mismatch");
        m.set_column(j, &col);
        e[j] = C64::new(0.0, 0.0);
    }
    m
}

/// Stacks matrices vertically (all must share the column count).
pub fn vstack(blocks: &[CMat]) -> CMat {
    let ncols = blocks.iter().map(|b| b.ncols()).max().unwrap_or(0);
    let nrows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(nrows, ncols);
    let mut r = 0;
    for b in blocks {
        if b.nrows() > 0 && b.ncols() > 0 {
            out.view_mut((r, 0), (b.nrows(), b.ncols())).copy_from(b);
        }
        r += b.nrows();
    }
    out
}

/// Stacks matrices horizontally (all must share the row count).
pub fn hstack(blocks: &[CMat]) -> CMat {
    let nrows = blocks.iter().map(|b| b.nrows()).max().unwrap_or(0);
    let ncols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(nrows, ncols);
    let mut c = 0;
    for b in blocks {
        if b.nrows() > 0 && b.ncols() > 0 {
            out.view_mut((0, c), (b.nrows(), b.ncols())).copy_from(b);
        }
        c += b.ncols();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rank_of_rank_one_matrix() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        let r = rank_report(&m);
        assert_eq!(r.rank, 1);
        assert!(r.margin() > 1e6);
    }

    #[test]
    fn null_space_is_orthonormal_kernel() {
        let m = CMat::from_row_slice(1, 3, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let ns = null_space(&m);
        assert_eq!(ns.ncols(), 2);
        assert!(((&m) * &ns).norm() < 1e-12);
        let gram = ns.adjoint() * &ns;
        assert!((gram - CMat::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn empty_matrices_are_handled() {
        let m = CMat::zeros(0, 3);
        assert_eq!(rank(&m), 0);
        assert_eq!(null_space(&m).ncols(), 3);
        let m2 = CMat::zeros(3, 0);
        assert_eq!(rank(&m2), 0);
        assert_eq!(null_space(&m2).ncols(), 0);
    }

    #[test]
    fn principal_angle_of_equal_spans_is_zero() {
        let a = CMat::from_row_slice(3, 1, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let b = CMat::from_row_slice(3, 1, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let angle = max_principal_angle(&a, &b).unwrap();
        assert!(angle < 1e-12);
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let h = CMat::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&h);
        assert!(vals[0] <= vals[1]);
        let d = CMat::from_diagonal(&CVec::from_iterator(2, vals.iter().map(|&v| c(v, 0.0))));
        let rec = &vecs * d * vecs.adjoint();
        assert!((rec - h).norm() < 1e-12);
    }
}
