//! Dense complex linear algebra with a shared tolerance policy.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ExtError, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Thresholds used by every rank, equality and positivity decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancePolicy {
    /// Relative singular value cutoff, scaled by max(sigma_max, 1) and the dimension.
    pub rank_rel_tol: f64,
    /// Absolute residual threshold for identity checks.
    pub eq_abs_tol: f64,
    /// Negative eigenvalue floor, scaled by max(norm, 1).
    pub psd_floor: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { rank_rel_tol: 1e-10, eq_abs_tol: 1e-9, psd_floor: -1e-10 }
    }
}

impl TolerancePolicy {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.rank_rel_tol) {
            return Err(ExtError::InvalidPolicy("rank_rel_tol must be positive".into()));
        }
        if !ok(self.eq_abs_tol) {
            return Err(ExtError::InvalidPolicy("eq_abs_tol must be positive".into()));
        }
        if !ok(-self.psd_floor) {
            return Err(ExtError::InvalidPolicy("psd_floor must be negative".into()));
        }
        Ok(())
    }

    /// Singular values at or below this count as zero.
    pub fn rank_threshold(&self, sigma_max: f64, dim: usize) -> f64 {
        self.rank_rel_tol * sigma_max.max(1.0) * dim.max(1) as f64
    }

    /// Eigenvalues below this are genuinely negative.
    pub fn psd_threshold(&self, norm: f64) -> f64 {
        self.psd_floor * norm.max(1.0)
    }

    /// `residual` is zero relative to a quantity of size `scale`.
    pub fn close(&self, residual: f64, scale: f64) -> bool {
        residual <= self.eq_abs_tol * (1.0 + scale)
    }

    /// Angle cutoff for principal vectors: `1 - cos` at or below `rank_rel_tol`.
    pub fn meets(&self, sine: f64) -> bool {
        let s = sine.clamp(0.0, 1.0);
        let one_minus_cos = s * s / (1.0 + (1.0 - s * s).sqrt());
        one_minus_cos <= self.rank_rel_tol
    }
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMatrix {
    CMatrix::zeros(r, c)
}

pub fn from_real(r: usize, c: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(r, c, data.iter().map(|&x| C64::new(x, 0.0)))
}

pub fn diag_real(d: &[f64]) -> CMatrix {
    let mut m = zeros(d.len(), d.len());
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] = c(x);
    }
    m
}

pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub fn hermitian_residual(a: &CMatrix) -> f64 {
    (a - a.adjoint()).norm()
}

/// Spectral norm (largest singular value); zero for empty matrices.
pub fn norm2(a: &CMatrix) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    singular_values(a)[0]
}

pub fn check_hermitian(a: &CMatrix, tol: &TolerancePolicy) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(ExtError::DimMismatch(format!("{}x{} is not square", a.nrows(), a.ncols())));
    }
    let r = hermitian_residual(a);
    if r > tol.eq_abs_tol * (1.0 + a.norm()) {
        return Err(ExtError::NotHermitian(r));
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    if n == 0 {
        return (vec![], zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitize(a));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vecs = zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn min_eig(a: &CMatrix) -> f64 {
    eigh(a).0.first().copied().unwrap_or(0.0)
}

pub fn max_eig(a: &CMatrix) -> f64 {
    eigh(a).0.last().copied().unwrap_or(0.0)
}

fn from_spectrum(vals: &[f64], vecs: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = vals.len();
    let mut scaled = vecs.clone();
    for j in 0..n {
        let s = f(vals[j]);
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    hermitize(&(scaled * vecs.adjoint()))
}

pub fn is_psd(a: &CMatrix, tol: &TolerancePolicy) -> bool {
    a.nrows() == 0 || min_eig(a) >= tol.psd_threshold(norm2(a))
}

pub fn check_psd(a: &CMatrix, tol: &TolerancePolicy) -> Result<()> {
    check_hermitian(a, tol)?;
    let m = min_eig(a);
    if a.nrows() > 0 && m < tol.psd_threshold(norm2(a)) {
        return Err(ExtError::NotPsd { min_eig: m });
    }
    Ok(())
}

/// PSD square root; eigenvalues in `[floor, 0)` and below the rank cutoff are clamped to zero.
pub fn psd_sqrt(a: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    check_hermitian(a, tol)?;
    let (vals, vecs) = eigh(a);
    let floor = tol.psd_threshold(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    if let Some(&m) = vals.first() {
        if m < floor {
            return Err(ExtError::NotPsd { min_eig: m });
        }
    }
    let big = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = tol.rank_threshold(big, a.nrows());
    Ok(from_spectrum(&vals, &vecs, |x| if x <= cut { 0.0 } else { x.sqrt() }))
}

/// Thin singular value decomposition with a full-length `v` (n x n).
///
/// `s` lists all `min(m, n)` singular values in descending order; the leading
/// columns of `v` are the matching right singular vectors.
struct FullSvd {
    s: Vec<f64>,
    v: CMatrix,
}

/// Orthonormalize columns in order, dropping those that become negligible.
fn gram_schmidt(a: &CMatrix) -> CMatrix {
    let mut cols: Vec<CVector> = Vec::with_capacity(a.ncols());
    for j in 0..a.ncols() {
        let mut x = a.column(j).into_owned();
        for _ in 0..2 {
            for q in &cols {
                let c = q.dotc(&x);
                x -= q * c;
            }
        }
        let nx = x.norm();
        if nx > 1e-8 {
            cols.push(x.unscale(nx));
        }
    }
    let mut out = zeros(a.nrows(), cols.len());
    for (j, q) in cols.iter().enumerate() {
        out.set_column(j, q);
    }
    out
}

/// Orthonormal completion of orthonormal columns `q` to C^n.
fn completion(q: &CMatrix) -> CMatrix {
    let n = q.nrows();
    let (vals, vecs) = eigh(&(identity(n) - q * q.adjoint()));
    let cols: Vec<usize> = (0..n).filter(|&i| vals[i] > 0.5).collect();
    let mut b = zeros(n, cols.len());
    for (k, &i) in cols.iter().enumerate() {
        b.set_column(k, &vecs.column(i));
    }
    b
}

/// SVD through the Hermitian dilation `[[0, a], [a*, 0]]`, whose spectrum is `±s`.
fn full_svd(a: &CMatrix) -> FullSvd {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return FullSvd { s: vec![], v: identity(n) };
    }
    let p = m.min(n);
    let mut h = zeros(m + n, m + n);
    h.view_mut((0, m), (m, n)).copy_from(a);
    h.view_mut((m, 0), (n, m)).copy_from(&a.adjoint());
    let (vals, vecs) = eigh(&h);
    let top: Vec<usize> = (0..p).map(|j| m + n - 1 - j).collect();
    let s: Vec<f64> = top.iter().map(|&i| vals[i].max(0.0)).collect();
    let cut = 64.0 * f64::EPSILON * s[0].max(f64::MIN_POSITIVE) * (m + n) as f64;
    let big: Vec<usize> = top.iter().copied().filter(|&i| vals[i] > cut).collect();
    let mut vb = zeros(n, big.len());
    for (k, &i) in big.iter().enumerate() {
        let y = vecs.view((m, i), (n, 1));
        vb.set_column(k, &y.unscale(y.norm()).column(0));
    }
    let vb = gram_schmidt(&vb);
    let v = hstack(&vb, &completion(&vb));
    FullSvd { s, v }
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    full_svd(a).s
}

fn numerical_rank(s: &[f64], dims: (usize, usize), tol: &TolerancePolicy) -> usize {
    let smax = s.first().copied().unwrap_or(0.0);
    let thr = tol.rank_threshold(smax, dims.0.max(dims.1));
    s.iter().take_while(|&&x| x > thr).count()
}

pub fn rank(a: &CMatrix, tol: &TolerancePolicy) -> usize {
    let f = full_svd(a);
    numerical_rank(&f.s, a.shape(), tol)
}

/// Orthonormal basis of the column space at numerical rank.
pub fn column_space(a: &CMatrix, tol: &TolerancePolicy) -> Subspace {
    let f = full_svd(a);
    let r = numerical_rank(&f.s, a.shape(), tol);
    let mut u = a * f.v.columns(0, r);
    for k in 0..r {
        let sk = f.s[k];
        u.column_mut(k).unscale_mut(sk);
    }
    Subspace { basis: gram_schmidt(&u) }
}

/// Orthonormal basis (columns) of the numerical null space.
pub fn null_space(a: &CMatrix, tol: &TolerancePolicy) -> CMatrix {
    let n = a.ncols();
    let f = full_svd(a);
    let r = numerical_rank(&f.s, a.shape(), tol);
    f.v.columns(r, n - r).into_owned()
}

/// Moore-Penrose pseudo-inverse of an arbitrary matrix.
pub fn pinv(a: &CMatrix, tol: &TolerancePolicy) -> CMatrix {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return zeros(n, m);
    }
    let f = full_svd(a);
    let r = numerical_rank(&f.s, a.shape(), tol);
    let mut out = zeros(n, m);
    for k in 0..r {
        let vk = f.v.column(k);
        let uk = (a * vk).unscale(f.s[k]);
        out += (vk * uk.adjoint()).unscale(f.s[k]);
    }
    out
}

/// Moore-Penrose pseudo-inverse of a Hermitian matrix (result is Hermitian).
pub fn moore_penrose(a: &CMatrix, tol: &TolerancePolicy) -> CMatrix {
    hermitize(&pinv(a, tol))
}

/// Pseudo-inverse of the PSD square root, `(A)^{(-1/2)}`.
pub fn psd_inv_sqrt(a: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    Ok(moore_penrose(&psd_sqrt(a, tol)?, tol))
}

pub fn range_basis(a: &CMatrix, tol: &TolerancePolicy) -> Subspace {
    column_space(a, tol)
}

/// `a <= b` in the Loewner order.
pub fn psd_order(a: &CMatrix, b: &CMatrix, tol: &TolerancePolicy) -> Result<bool> {
    if a.shape() != b.shape() {
        return Err(ExtError::DimMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(is_psd(&hermitize(&(b - a)), tol))
}

/// Solve `a x = b` by least squares; errors when `a` is singular.
pub fn solve(a: &CMatrix, b: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    if a.nrows() != a.ncols() || a.nrows() != b.nrows() {
        return Err(ExtError::DimMismatch("solve".into()));
    }
    if rank(a, tol) < a.nrows() {
        return Err(ExtError::NotInvertible);
    }
    a.clone().lu().solve(b).ok_or(ExtError::NotInvertible)
}

pub fn inverse(a: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    solve(a, &identity(a.nrows()), tol)
}

/// Column-stack two matrices with equal row counts.
pub fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.nrows(), b.nrows(), "hstack row mismatch");
    let mut m = zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    m
}

/// Row-stack two matrices with equal column counts.
pub fn vstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.ncols(), "vstack column mismatch");
    let mut m = zeros(a.nrows() + b.nrows(), a.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    m
}

/// Block-diagonal matrix.
pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut m = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    m
}

/// A subspace of C^n stored by an orthonormal basis (n x k, k may be 0).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: CMatrix,
}

impl Subspace {
    pub fn zero(n: usize) -> Self {
        Self { basis: zeros(n, 0) }
    }

    pub fn full(n: usize) -> Self {
        Self { basis: identity(n) }
    }

    /// Span of the columns of `m`.
    pub fn span(m: &CMatrix, tol: &TolerancePolicy) -> Self {
        column_space(m, tol)
    }

    /// Wrap a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: CMatrix, tol: &TolerancePolicy) -> Result<Self> {
        let k = basis.ncols();
        let r = (basis.adjoint() * &basis - identity(k)).norm();
        if r > tol.eq_abs_tol {
            return Err(ExtError::InternalMismatch(format!("basis not orthonormal ({r:.2e})")));
        }
        Ok(Self { basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn projector(&self) -> CMatrix {
        &self.basis * self.basis.adjoint()
    }

    pub fn complement(&self) -> Self {
        let n = self.ambient_dim();
        if self.dim() == 0 {
            return Self::full(n);
        }
        let (vals, vecs) = eigh(&(identity(n) - self.projector()));
        let cols: Vec<usize> = (0..n).filter(|&i| vals[i] > 0.5).collect();
        let mut b = zeros(n, cols.len());
        for (k, &i) in cols.iter().enumerate() {
            b.set_column(k, &vecs.column(i));
        }
        Self { basis: b }
    }

    /// Coordinates of ambient vectors in this basis.
    pub fn coords(&self, v: &CMatrix) -> CMatrix {
        self.basis.adjoint() * v
    }

    /// Norm of the part of `v` outside the subspace.
    pub fn residual(&self, v: &CMatrix) -> f64 {
        (v - self.projector() * v).norm()
    }

    pub fn contains_vectors(&self, v: &CMatrix, tol: &TolerancePolicy) -> bool {
        v.ncols() == 0 || tol.close(self.residual(v), v.norm())
    }

    pub fn contains(&self, other: &Subspace, tol: &TolerancePolicy) -> bool {
        other.dim() <= self.dim() && self.contains_vectors(&other.basis, tol)
    }

    /// Equality of orthogonal projections within `eq_abs_tol`.
    pub fn same_as(&self, other: &Subspace, tol: &TolerancePolicy) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.dim() == other.dim()
            && norm2(&(self.projector() - other.projector())) <= tol.eq_abs_tol
    }

    /// Distance between orthogonal projections.
    pub fn gap_to(&self, other: &Subspace) -> f64 {
        norm2(&(self.projector() - other.projector()))
    }

    pub fn join(&self, other: &Subspace, tol: &TolerancePolicy) -> Self {
        Self::span(&hstack(&self.basis, &other.basis), tol)
    }

    /// Image of the subspace under a matrix.
    pub fn image(&self, a: &CMatrix, tol: &TolerancePolicy) -> Self {
        Self::span(&(a * &self.basis), tol)
    }
}

/// Intersection via principal vectors with `1 - cos <= rank_rel_tol`.
pub fn subspace_meet(u: &Subspace, v: &Subspace, tol: &TolerancePolicy) -> Result<Subspace> {
    let n = u.ambient_dim();
    if n != v.ambient_dim() {
        return Err(ExtError::AmbientMismatch(n, v.ambient_dim()));
    }
    if u.dim() == 0 || v.dim() == 0 {
        return Ok(Subspace::zero(n));
    }
    let m = v.basis() - u.projector() * v.basis();
    let f = full_svd(&m);
    let kv = v.dim();
    // singular values are sines of principal angles, descending; pad zeros
    let mut sines = f.s.clone();
    sines.resize(kv, 0.0);
    let cols: Vec<usize> = (0..kv).filter(|&j| tol.meets(sines[j])).collect();
    let mut b = zeros(n, cols.len());
    for (k, &j) in cols.iter().enumerate() {
        b.set_column(k, &(v.basis() * f.v.column(j)));
    }
    Ok(Subspace::span(&b, tol))
}

/// Principal angles in ascending order (`min(dim u, dim v)` of them).
pub fn principal_angles(u: &Subspace, v: &Subspace) -> Result<Vec<f64>> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(ExtError::AmbientMismatch(u.ambient_dim(), v.ambient_dim()));
    }
    if u.dim() == 0 || v.dim() == 0 {
        return Err(ExtError::EmptySubspace);
    }
    let (big, small) = if u.dim() >= v.dim() { (u, v) } else { (v, u) };
    let k = small.dim();
    let cross = big.basis().adjoint() * small.basis();
    let cosines = singular_values(&cross);
    let resid = small.basis() - big.projector() * small.basis();
    let mut sines: Vec<f64> = singular_values(&resid);
    sines.resize(k, 0.0);
    sines.sort_by(f64::total_cmp);
    let mut angles: Vec<f64> = (0..k)
        .map(|i| {
            let cs = cosines[i].clamp(0.0, 1.0);
            if cs * cs > 0.5 {
                sines[i].clamp(0.0, 1.0).asin()
            } else {
                cs.acos()
            }
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::default()
    }

    fn e(n: usize, i: usize) -> CMatrix {
        let mut v = zeros(n, 1);
        v[(i, 0)] = ONE;
        v
    }

    fn close(a: &CMatrix, b: &CMatrix, eps: f64) -> bool {
        (a - b).norm() <= eps
    }

    #[test]
    fn sqrt_of_diagonal_and_identity() {
        let t = tol();
        let r = psd_sqrt(&diag_real(&[4.0, 9.0]), &t).unwrap();
        assert!(close(&r, &diag_real(&[2.0, 3.0]), 1e-12));
        assert!(close(&psd_sqrt(&identity(3), &t).unwrap(), &identity(3), 1e-12));
    }

    #[test]
    fn sqrt_of_rank_one() {
        let a = from_real(2, 2, &[1.0, 0.5, 0.5, 0.25]);
        let r = psd_sqrt(&a, &tol()).unwrap();
        assert!(close(&r, &a.unscale(1.25f64.sqrt()), 1e-12));
    }

    #[test]
    fn sqrt_rejects_negative() {
        let err = psd_sqrt(&diag_real(&[1.0, -0.5]), &tol()).unwrap_err();
        assert!(matches!(err, ExtError::NotPsd { .. }));
    }

    #[test]
    fn sqrt_clamps_roundoff() {
        let r = psd_sqrt(&diag_real(&[1.0, -1e-14]), &tol()).unwrap();
        assert!(close(&r, &diag_real(&[1.0, 0.0]), 1e-12));
    }

    #[test]
    fn pseudo_inverse_examples() {
        let t = tol();
        assert!(close(&moore_penrose(&diag_real(&[2.0, 0.0]), &t), &diag_real(&[0.5, 0.0]), 1e-12));
        assert!(close(&moore_penrose(&identity(2), &t), &identity(2), 1e-12));
        let a = from_real(2, 2, &[1.0, 0.5, 0.5, 0.25]);
        assert!(close(&moore_penrose(&a, &t), &a.scale(0.64), 1e-12));
    }

    #[test]
    fn range_examples() {
        let t = tol();
        let r = range_basis(&diag_real(&[1.0, 0.0]), &t);
        assert!(r.same_as(&Subspace::span(&e(2, 0), &t), &t));
        let a = from_real(2, 2, &[1.0, 0.5, 0.5, 0.25]);
        let r = range_basis(&a, &t);
        assert!(r.same_as(&Subspace::span(&from_real(2, 1, &[1.0, 0.5]), &t), &t));
        assert_eq!(range_basis(&zeros(3, 3), &t).dim(), 0);
    }

    #[test]
    fn meet_examples() {
        let t = tol();
        let e1 = Subspace::span(&e(2, 0), &t);
        let e2 = Subspace::span(&e(2, 1), &t);
        assert_eq!(subspace_meet(&e1, &e2, &t).unwrap().dim(), 0);
        let v = Subspace::span(&from_real(2, 1, &[1.0, 0.5]), &t);
        assert_eq!(subspace_meet(&v, &e2, &t).unwrap().dim(), 0);
        assert!(subspace_meet(&v, &v, &t).unwrap().same_as(&v, &t));
        let err = subspace_meet(&v, &Subspace::full(3), &t).unwrap_err();
        assert_eq!(err, ExtError::AmbientMismatch(2, 3));
    }

    #[test]
    fn angle_examples() {
        let t = tol();
        let e1 = Subspace::span(&e(2, 0), &t);
        let e2 = Subspace::span(&e(2, 1), &t);
        let d = Subspace::span(&from_real(2, 1, &[1.0, 1.0]), &t);
        assert!(principal_angles(&e1, &e1).unwrap()[0].abs() < 1e-12);
        assert!((principal_angles(&e1, &d).unwrap()[0] - FRAC_PI_4).abs() < 1e-12);
        assert!((principal_angles(&e1, &e2).unwrap()[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert_eq!(principal_angles(&e1, &Subspace::zero(2)), Err(ExtError::EmptySubspace));
    }

    #[test]
    fn order_examples() {
        let t = tol();
        assert!(psd_order(&identity(2), &identity(2).scale(2.0), &t).unwrap());
        let mu = from_real(2, 2, &[0.0, 0.5, 0.5, -0.75]);
        let big = from_real(2, 2, &[0.0, 0.5, 0.5, 0.75]);
        assert!(psd_order(&mu, &big, &t).unwrap());
        assert!(!psd_order(&diag_real(&[1.0, 0.0]), &diag_real(&[0.0, 1.0]), &t).unwrap());
        assert!(psd_order(&identity(2), &identity(3), &t).is_err());
    }

    #[test]
    fn complement_and_nullspace() {
        let t = tol();
        let v = Subspace::span(&from_real(3, 1, &[1.0, 1.0, 0.0]), &t);
        let c = v.complement();
        assert_eq!(c.dim(), 2);
        assert!((v.basis().adjoint() * c.basis()).norm() < 1e-12);
        let a = from_real(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let ns = null_space(&a, &t);
        assert_eq!(ns.ncols(), 1);
        assert!((a * ns).norm() < 1e-12);
    }

    #[test]
    fn policy_validation() {
        assert!(TolerancePolicy::default().validate().is_ok());
        let bad = TolerancePolicy { psd_floor: 1e-10, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
