//! Closed nonnegative forms of selfadjoint relations and their ordering.

use crate::error::{ExtError, Result};
use crate::numeric::{
    check_hermitian, hermitize, identity, is_psd, norm2, null_space, pinv, psd_order, psd_sqrt,
    range_basis, CMatrix, Subspace, TolerancePolicy, C64,
};
use crate::relations::LinearRelation;

/// Form domain with a PSD Gram matrix in domain coordinates.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    domain: Subspace,
    gram: CMatrix,
}

impl ClosedForm {
    pub fn new(domain: Subspace, gram: CMatrix, tol: &TolerancePolicy) -> Result<Self> {
        if gram.nrows() != domain.dim() {
            return Err(ExtError::DimMismatch(format!(
                "gram {}x{} for domain of dim {}",
                gram.nrows(),
                gram.ncols(),
                domain.dim()
            )));
        }
        check_hermitian(&gram, tol)?;
        if !is_psd(&gram, tol) {
            return Err(ExtError::NotPsd { min_eig: crate::numeric::min_eig(&gram) });
        }
        Ok(Self { domain, gram: hermitize(&gram) })
    }

    pub fn domain(&self) -> &Subspace {
        &self.domain
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    /// `Q gram Q*`: the form operator extended by zero off the domain.
    pub fn ambient(&self) -> CMatrix {
        let q = self.domain.basis();
        hermitize(&(q * &self.gram * q.adjoint()))
    }

    /// `h[u, v]` for ambient vectors in the domain.
    pub fn sesq(&self, u: &CMatrix, v: &CMatrix) -> C64 {
        (v.adjoint() * self.ambient() * u)[(0, 0)]
    }

    pub fn value(&self, u: &CMatrix) -> f64 {
        self.sesq(u, u).re
    }

    /// Gram of the form on the columns of `v`.
    pub fn compress(&self, v: &CMatrix) -> CMatrix {
        hermitize(&(v.adjoint() * self.ambient() * v))
    }

    pub fn contains(&self, v: &CMatrix, tol: &TolerancePolicy) -> bool {
        self.domain.contains_vectors(v, tol)
    }
}

/// Form of a nonnegative selfadjoint relation: its operator part on the carrier.
pub fn form_of_relation(r: &LinearRelation, tol: &TolerancePolicy) -> Result<ClosedForm> {
    let class = r.classify(tol);
    if !(class.selfadjoint && class.nonnegative) {
        return Err(ExtError::NotSelfadjointNonnegative);
    }
    let parts = r.parts(tol)?;
    ClosedForm::new(parts.carrier, parts.op_part, tol)
}

/// Form of the Cayley inverse of `b` (or of its inverse relation when `invert`).
pub fn form_via_cayley(b: &CMatrix, invert: bool, tol: &TolerancePolicy) -> Result<ClosedForm> {
    check_hermitian(b, tol)?;
    let nb = norm2(b);
    if nb > 1.0 + tol.eq_abs_tol {
        return Err(ExtError::NotContraction(nb));
    }
    let n = b.nrows();
    let x = if invert { identity(n) - b } else { identity(n) + b };
    let domain = range_basis(&x, tol);
    let q = domain.basis();
    let k = domain.dim();
    let gram = -identity(k) + (q.adjoint() * pinv(&x, tol) * q).scale(2.0);
    ClosedForm::new(domain, hermitize(&gram), tol)
}

/// Gram of the energy inner product `h[u, v] + (u, v)`.
pub fn energy_gram(f: &ClosedForm) -> CMatrix {
    f.gram() + identity(f.gram().nrows())
}

/// Ambient energy operator: `I + Q gram Q*` on the domain.
pub fn energy_ambient(f: &ClosedForm) -> CMatrix {
    f.ambient() + f.domain().projector()
}

/// `h^C[u, v] = h[Cu, Cv]` on the preimage of the domain.
pub fn form_pullback(f: &ClosedForm, c: &CMatrix, tol: &TolerancePolicy) -> Result<ClosedForm> {
    let n = f.domain().ambient_dim();
    if c.shape() != (n, n) {
        return Err(ExtError::DimMismatch(format!("C is {}x{}", c.nrows(), c.ncols())));
    }
    let outside = identity(n) - f.domain().projector();
    let dom = Subspace::span(&null_space(&(outside * c), tol), tol);
    let cd = c * dom.basis();
    let gram = hermitize(&(cd.adjoint() * f.ambient() * cd));
    ClosedForm::new(dom, gram, tol)
}

/// `inf_{phi in V} h[u - phi]` with a minimizer.
pub fn seminorm_distance(
    f: &ClosedForm,
    u: &CMatrix,
    v: &Subspace,
    tol: &TolerancePolicy,
) -> Result<(f64, CMatrix)> {
    if !f.contains(u, tol) {
        return Err(ExtError::DomainViolation(f.domain().residual(u)));
    }
    if !f.domain().contains(v, tol) {
        return Err(ExtError::DomainViolation(f.domain().residual(v.basis())));
    }
    let root = psd_sqrt(&f.ambient(), tol)?;
    let rv = &root * v.basis();
    let coef = pinv(&rv, tol) * (&root * u);
    let phi = v.basis() * coef;
    let diff = u - &phi;
    Ok((f.value(&diff).max(0.0), phi))
}

/// `dom F0 ⊆ dom F1` and the two forms agree on `dom F0`.
pub fn form_restriction_check(f0: &ClosedForm, f1: &ClosedForm, tol: &TolerancePolicy) -> bool {
    if f0.domain().ambient_dim() != f1.domain().ambient_dim() || !f1.domain().contains(f0.domain(), tol) {
        return false;
    }
    let q0 = f0.domain().basis();
    let d = (f1.compress(q0) - f0.gram()).norm();
    tol.close(d, f0.gram().norm())
}

/// Outcome of comparing `H1 >= H2` through the six equivalent items.
#[derive(Debug, Clone)]
pub struct OrderVerdict {
    /// `H1 >= H2` in the form sense.
    pub leq: bool,
    /// Items (i) to (vi), evaluated independently.
    pub items: [bool; 6],
    pub c: Option<CMatrix>,
    pub c1: Option<CMatrix>,
    pub m: Option<CMatrix>,
    pub max_residual: f64,
}

impl OrderVerdict {
    pub fn agree(&self) -> bool {
        self.items.iter().all(|&b| b == self.items[0])
    }
}

/// Douglas-type comparison of two nonnegative selfadjoint relations.
pub fn order_compare(h1: &LinearRelation, h2: &LinearRelation, tol: &TolerancePolicy) -> Result<OrderVerdict> {
    let f1 = form_of_relation(h1, tol)?;
    let f2 = form_of_relation(h2, tol)?;
    let n = h1.space_dim();
    let i = identity(n);
    let q1 = f1.domain().basis().clone();
    let q2 = f2.domain().basis().clone();
    let dom_inc = f2.domain().contains(f1.domain(), tol);
    let mut max_residual = 0.0f64;

    // (i) forms
    let item1 = dom_inc && is_psd(&hermitize(&(f1.gram() - f2.compress(&q1))), tol);

    // (ii) C H1^{1/2} ⊂ H2^{1/2}
    let a1 = psd_sqrt(&f1.ambient(), tol)?;
    let a2 = psd_sqrt(&f2.ambient(), tol)?;
    let c = &a2 * pinv(&a1, tol);
    let fac = (&c * &a1 * &q1 - &a2 * &q1).norm();
    let c_contr = norm2(&c) <= 1.0 + tol.eq_abs_tol;
    let item2 = dom_inc && c_contr && tol.close(fac, a2.norm());
    if item2 {
        max_residual = max_residual.max(fac);
    }

    // (iii) (P1 H2^{1/2} h, P1 H2^{1/2} k) = H1[C* h, C* k] on dom H2^{1/2}
    let p1 = f1.domain().projector();
    let lhs = &p1 * &a2 * &q2;
    let rhs = &a1 * c.adjoint() * &q2;
    let g_res = (lhs.adjoint() * &lhs - rhs.adjoint() * &rhs).norm();
    let item3 = c_contr && dom_inc && tol.close(g_res, a2.norm().powi(2));

    // (iv) (H1+I)^{-1/2} = (H2+I)^{-1/2} C1
    let m1 = C64::new(-1.0, 0.0);
    let r1 = h1.resolvent(m1, tol)?;
    let r2 = h2.resolvent(m1, tol)?;
    let r1h = psd_sqrt(&hermitize(&r1), tol)?;
    let r2h = psd_sqrt(&hermitize(&r2), tol)?;
    let r2h_pinv = pinv(&r2h, tol);
    let c1 = &r2h_pinv * &r1h;
    let c1_res = (&r2h * &c1 - &r1h).norm();
    let cdom2 = f2.domain();
    let item4 = norm2(&c1) <= 1.0 + tol.eq_abs_tol
        && tol.close(c1_res, 1.0)
        && cdom2.contains_vectors(&c1, tol);

    // (v) (H1+I)^{-1} = (H2+I)^{-1/2} M (H2+I)^{-1/2}, 0 <= M <= I
    let m = hermitize(&(&r2h_pinv * &r1 * &r2h_pinv));
    let m_res = (&r2h * &m * &r2h - &r1).norm();
    let item5 = is_psd(&m, tol)
        && psd_order(&m, &i, tol)?
        && tol.close(m_res, 1.0)
        && cdom2.contains_vectors(&m, tol);

    // (vi)
    let item6 = psd_order(&hermitize(&r1), &hermitize(&r2), tol)?;

    if item4 {
        max_residual = max_residual.max(c1_res);
    }
    if item5 {
        max_residual = max_residual.max(m_res);
    }
    let items = [item1, item2, item3, item4, item5, item6];
    let leq = item1;
    Ok(OrderVerdict {
        leq,
        items,
        c: item2.then_some(c),
        c1: item4.then_some(c1),
        m: item5.then_some(m),
        max_residual,
    })
}

/// Kreĭn–von Neumann value `sup_phi |(S phi, u)|^2 / (S phi, phi)` over `dom S`,
/// for `S` given by argument block `d` and value block `s d`; infinite when unbounded.
pub fn krein_sup(d: &CMatrix, sd: &CMatrix, u: &CMatrix, tol: &TolerancePolicy) -> f64 {
    let k = hermitize(&(d.adjoint() * sd));
    let b = sd.adjoint() * u;
    let kp = pinv(&k, tol);
    let resid = (&k * &kp * &b - &b).norm();
    if !tol.close(resid, b.norm()) {
        return f64::INFINITY;
    }
    (b.adjoint() * kp * b)[(0, 0)].re
}
