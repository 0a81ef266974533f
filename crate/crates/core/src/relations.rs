//! Linear relations on C^n stored as graph subspaces of C^n + C^n.

use crate::contractions::HermitianContraction;
use crate::error::{ExtError, Result};
use crate::numeric::{
    check_hermitian, hermitize, identity, is_psd, norm2, null_space, pinv, rank, subspace_meet,
    vstack, CMatrix, Subspace, TolerancePolicy, C64,
};

/// A relation given by its graph; first block argument, second block value.
#[derive(Debug, Clone)]
pub struct LinearRelation {
    n: usize,
    graph: Subspace,
}

/// Orthogonal decomposition of a selfadjoint relation into an operator part
/// on the carrier and a purely multivalued part.
#[derive(Debug, Clone)]
pub struct SelfadjointParts {
    pub carrier: Subspace,
    /// Operator part in carrier coordinates.
    pub op_part: CMatrix,
    pub mul: Subspace,
}

impl SelfadjointParts {
    /// Operator part as an n x n matrix vanishing on the multivalued part.
    pub fn ambient_op(&self) -> CMatrix {
        let q = self.carrier.basis();
        q * &self.op_part * q.adjoint()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelationClass {
    pub symmetric: bool,
    pub selfadjoint: bool,
    pub nonnegative: bool,
    pub operator: bool,
}

/// Result of the forward Cayley transform.
#[derive(Debug, Clone)]
pub enum CayleyImage {
    /// Selfadjoint input: an everywhere defined selfadjoint contraction.
    Full(CMatrix),
    /// Symmetric input: a Hermitian contraction on a subspace.
    Partial(HermitianContraction),
}

impl LinearRelation {
    /// Span of the pairs `(f_j, g_j)` given by the columns of `f` and `g`.
    pub fn from_pairs(f: &CMatrix, g: &CMatrix, tol: &TolerancePolicy) -> Result<Self> {
        if f.shape() != g.shape() {
            return Err(ExtError::DimMismatch(format!("{:?} vs {:?}", f.shape(), g.shape())));
        }
        Ok(Self { n: f.nrows(), graph: Subspace::span(&vstack(f, g), tol) })
    }

    pub fn from_graph(n: usize, graph: Subspace) -> Result<Self> {
        if graph.ambient_dim() != 2 * n {
            return Err(ExtError::AmbientMismatch(2 * n, graph.ambient_dim()));
        }
        Ok(Self { n, graph })
    }

    /// Graph of an everywhere defined matrix.
    pub fn graph_of(a: &CMatrix, tol: &TolerancePolicy) -> Result<Self> {
        Self::from_pairs(&identity(a.nrows()), a, tol)
    }

    /// `{0} x m`.
    pub fn pure_mul(m: &Subspace, tol: &TolerancePolicy) -> Result<Self> {
        let z = CMatrix::zeros(m.ambient_dim(), m.dim());
        Self::from_pairs(&z, m.basis(), tol)
    }

    pub fn space_dim(&self) -> usize {
        self.n
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    /// Argument block of the graph basis.
    pub fn top(&self) -> CMatrix {
        self.graph.basis().rows(0, self.n).into_owned()
    }

    /// Value block of the graph basis.
    pub fn bottom(&self) -> CMatrix {
        self.graph.basis().rows(self.n, self.n).into_owned()
    }

    pub fn dom(&self, tol: &TolerancePolicy) -> Subspace {
        Subspace::span(&self.top(), tol)
    }

    pub fn ran(&self, tol: &TolerancePolicy) -> Subspace {
        Subspace::span(&self.bottom(), tol)
    }

    pub fn ker(&self, tol: &TolerancePolicy) -> Subspace {
        let ns = null_space(&self.bottom(), tol);
        Subspace::span(&(self.top() * ns), tol)
    }

    pub fn mul(&self, tol: &TolerancePolicy) -> Subspace {
        let ns = null_space(&self.top(), tol);
        Subspace::span(&(self.bottom() * ns), tol)
    }

    pub fn inverse(&self, tol: &TolerancePolicy) -> Self {
        Self::from_pairs(&self.bottom(), &self.top(), tol).expect("blocks have equal shape")
    }

    /// `R*`: the orthogonal complement of `{(-g, f) : (f, g) in R}`.
    pub fn adjoint(&self, tol: &TolerancePolicy) -> Self {
        let j = vstack(&(-self.bottom()), &self.top());
        let jr = Subspace::span(&j, tol);
        Self { n: self.n, graph: jr.complement() }
    }

    pub fn same_as(&self, other: &LinearRelation, tol: &TolerancePolicy) -> bool {
        self.n == other.n && self.graph.same_as(&other.graph, tol)
    }

    pub fn contains(&self, other: &LinearRelation, tol: &TolerancePolicy) -> bool {
        self.n == other.n && self.graph.contains(&other.graph, tol)
    }

    /// Graph intersection.
    pub fn meet(&self, other: &LinearRelation, tol: &TolerancePolicy) -> Result<Self> {
        let g = subspace_meet(&self.graph, &other.graph, tol)?;
        Ok(Self { n: self.n, graph: g })
    }

    /// Gram matrix `[(g_j, f_i)]` over the graph basis.
    fn cross_gram(&self) -> CMatrix {
        self.top().adjoint() * self.bottom()
    }

    pub fn is_symmetric(&self, tol: &TolerancePolicy) -> bool {
        let k = self.cross_gram();
        tol.close((&k - k.adjoint()).norm(), 0.0)
    }

    pub fn classify(&self, tol: &TolerancePolicy) -> RelationClass {
        let symmetric = self.is_symmetric(tol);
        let selfadjoint = symmetric && self.same_as(&self.adjoint(tol), tol);
        let nonnegative = symmetric && is_psd(&hermitize(&self.cross_gram()), tol);
        let operator = self.mul(tol).is_zero();
        RelationClass { symmetric, selfadjoint, nonnegative, operator }
    }

    /// Operator part on `(mul R)^perp` and the multivalued part.
    pub fn parts(&self, tol: &TolerancePolicy) -> Result<SelfadjointParts> {
        if !self.classify(tol).selfadjoint {
            return Err(ExtError::NotSelfadjoint);
        }
        let mul = self.mul(tol);
        let carrier = mul.complement();
        let q = carrier.basis();
        // the top block spans the carrier: solve F X = Q
        let x = pinv(&self.top(), tol) * q;
        let op = q.adjoint() * self.bottom() * x;
        Ok(SelfadjointParts { carrier, op_part: hermitize(&op), mul })
    }

    /// `(R - z)^{-1}` as an everywhere defined matrix.
    pub fn resolvent(&self, z: C64, tol: &TolerancePolicy) -> Result<CMatrix> {
        let f = self.top();
        let a = self.bottom() - f.scale(1.0).map(|x| x * z);
        let hit = ExtError::SpectrumHit { re: z.re, im: z.im };
        if rank(&a, tol) < self.n {
            return Err(hit);
        }
        let ns = null_space(&a, tol);
        if ns.ncols() > 0 && !tol.close((&f * &ns).norm(), 0.0) {
            return Err(hit);
        }
        Ok(f * pinv(&a, tol))
    }

    /// `{(f + f', f - f')}`; full matrix when selfadjoint.
    pub fn cayley_forward(&self, tol: &TolerancePolicy) -> Result<CayleyImage> {
        let class = self.classify(tol);
        if !class.symmetric {
            return Err(ExtError::NotSymmetric);
        }
        if !class.nonnegative {
            return Err(ExtError::NotNonnegative);
        }
        let x = self.top() + self.bottom();
        let y = self.top() - self.bottom();
        if class.selfadjoint {
            return Ok(CayleyImage::Full(hermitize(&(y * pinv(&x, tol)))));
        }
        let dom = Subspace::span(&x, tol);
        let action = y * pinv(&x, tol) * dom.basis();
        Ok(CayleyImage::Partial(HermitianContraction::new(dom, action, tol)?))
    }

    /// `ker(R* - z)`, the orthogonal complement of `ran(R - conj z)`.
    pub fn defect_subspace(&self, z: C64, tol: &TolerancePolicy) -> Subspace {
        let zc = z.conj();
        let a = self.bottom() - self.top().map(|x| x * zc);
        Subspace::span(&a, tol).complement()
    }
}

/// `{((I+B)h, (I-B)h)}` for a selfadjoint contraction `B`.
pub fn cayley_inverse(b: &CMatrix, tol: &TolerancePolicy) -> Result<LinearRelation> {
    check_hermitian(b, tol)?;
    let nb = norm2(b);
    if nb > 1.0 + tol.eq_abs_tol {
        return Err(ExtError::NotContraction(nb));
    }
    let i = identity(b.nrows());
    LinearRelation::from_pairs(&(&i + b), &(&i - b), tol)
}
