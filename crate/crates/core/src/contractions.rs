//! Hermitian contractions on subspaces, shorted operators and the
//! interval of selfadjoint contractive extensions.

use crate::error::{ExtError, Result};
use crate::numeric::{
    check_hermitian, check_psd, from_real, hermitize, hstack, identity, norm2, pinv, psd_sqrt,
    range_basis, solve, subspace_meet, CMatrix, Subspace, TolerancePolicy, C64,
};
use crate::random;
use crate::relations::LinearRelation;

/// Hermitian contraction `B` defined on `dom` with values in C^n.
#[derive(Debug, Clone)]
pub struct HermitianContraction {
    dom: Subspace,
    /// `n x k` image of the orthonormal basis of `dom`.
    action: CMatrix,
}

impl HermitianContraction {
    pub fn new(dom: Subspace, action: CMatrix, tol: &TolerancePolicy) -> Result<Self> {
        if action.nrows() != dom.ambient_dim() || action.ncols() != dom.dim() {
            return Err(ExtError::DimMismatch(format!(
                "action {:?} for domain of dim {} in C^{}",
                action.shape(),
                dom.dim(),
                dom.ambient_dim()
            )));
        }
        let inner = dom.basis().adjoint() * &action;
        let r = (&inner - inner.adjoint()).norm();
        if !tol.close(r, inner.norm()) {
            return Err(ExtError::InvalidContraction(format!("not Hermitian on domain ({r:.2e})")));
        }
        let nb = norm2(&action);
        if nb > 1.0 + tol.eq_abs_tol {
            return Err(ExtError::InvalidContraction(format!("norm {nb} exceeds 1")));
        }
        Ok(Self { dom, action })
    }

    /// Restriction of an everywhere defined matrix to `dom`.
    pub fn restrict(b: &CMatrix, dom: Subspace, tol: &TolerancePolicy) -> Result<Self> {
        let action = b * dom.basis();
        Self::new(dom, action, tol)
    }

    pub fn space_dim(&self) -> usize {
        self.dom.ambient_dim()
    }

    pub fn dom(&self) -> &Subspace {
        &self.dom
    }

    pub fn action(&self) -> &CMatrix {
        &self.action
    }

    pub fn defect(&self) -> Subspace {
        self.dom.complement()
    }

    /// `B P_dom` as an n x n matrix.
    pub fn ambient(&self) -> CMatrix {
        &self.action * self.dom.basis().adjoint()
    }

    pub fn same_as(&self, other: &HermitianContraction, tol: &TolerancePolicy) -> bool {
        self.dom.same_as(&other.dom, tol) && tol.close((self.ambient() - other.ambient()).norm(), 1.0)
    }

    /// Residual of `bt` restricted to `dom` against the action.
    pub fn extension_residual(&self, bt: &CMatrix) -> f64 {
        (bt * self.dom.basis() - &self.action).norm()
    }

    /// `bt` is a selfadjoint contractive extension.
    pub fn is_sc_extension(&self, bt: &CMatrix, tol: &TolerancePolicy) -> bool {
        check_hermitian(bt, tol).is_ok()
            && norm2(bt) <= 1.0 + tol.eq_abs_tol
            && tol.close(self.extension_residual(bt), 1.0)
    }

    /// The relation `S = {((I+B)h, (I-B)h) : h in dom}`.
    pub fn symmetric_relation(&self, tol: &TolerancePolicy) -> LinearRelation {
        let q = self.dom.basis();
        LinearRelation::from_pairs(&(q + &self.action), &(q - &self.action), tol)
            .expect("blocks have equal shape")
    }
}

/// Endpoints of the interval of sc-extensions.
#[derive(Debug, Clone)]
pub struct ExtremePair {
    pub b_mu: CMatrix,
    pub b_max: CMatrix,
    pub gap: CMatrix,
    pub gap_root: CMatrix,
    pub defect: Subspace,
}

impl ExtremePair {
    /// `cran(B_M - B_mu)`.
    pub fn gap_range(&self, tol: &TolerancePolicy) -> Subspace {
        range_basis(&self.gap, tol)
    }
}

/// Instance bundle returned by `builtin_instance`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub contraction: HermitianContraction,
    /// Boundary models fix the pair `(B0, B1)`; `None` means the extreme pair.
    pub boundary_pair: Option<(CMatrix, CMatrix)>,
}

/// Block coordinates of a contraction in the frame `[Q | N]`.
fn blocks(b: &HermitianContraction) -> (CMatrix, CMatrix, CMatrix, CMatrix) {
    let q = b.dom.basis().clone();
    let nb = b.defect().basis().clone();
    let t11 = hermitize(&(q.adjoint() * &b.action));
    let t21 = nb.adjoint() * &b.action;
    (q, nb, t11, t21)
}

fn assemble(q: &CMatrix, nb: &CMatrix, t11: &CMatrix, t21: &CMatrix, t22: &CMatrix) -> CMatrix {
    let u = hstack(q, nb);
    let k = t11.ncols();
    let m = t22.ncols();
    let mut t = CMatrix::zeros(k + m, k + m);
    t.view_mut((0, 0), (k, k)).copy_from(t11);
    t.view_mut((k, 0), (m, k)).copy_from(t21);
    t.view_mut((0, k), (k, m)).copy_from(&t21.adjoint());
    t.view_mut((k, k), (m, m)).copy_from(t22);
    hermitize(&(&u * t * u.adjoint()))
}

/// `B_mu` and `B_M` from the vanishing Schur complements of `I + B` and `I - B`.
pub fn extreme_extensions(b: &HermitianContraction, tol: &TolerancePolicy) -> Result<ExtremePair> {
    let (q, nb, t11, t21) = blocks(b);
    let k = t11.nrows();
    let m = nb.ncols();
    let ik = identity(k);
    let im = identity(m);
    let t22_mu = -&im + &t21 * pinv(&(&ik + &t11), tol) * t21.adjoint();
    let t22_max = &im - &t21 * pinv(&(&ik - &t11), tol) * t21.adjoint();
    let b_mu = assemble(&q, &nb, &t11, &t21, &hermitize(&t22_mu));
    let b_max = assemble(&q, &nb, &t11, &t21, &hermitize(&t22_max));
    for bt in [&b_mu, &b_max] {
        if !b.is_sc_extension(bt, tol) {
            return Err(ExtError::InvalidContraction(format!(
                "extreme extension has norm {:.6}",
                norm2(bt)
            )));
        }
    }
    let gap = hermitize(&(&b_max - &b_mu));
    let gap_root = psd_sqrt(&gap, tol)?;
    Ok(ExtremePair { b_mu, b_max, gap, gap_root, defect: b.defect() })
}

/// `(B_M + B_mu)/2 + gap_root Z gap_root / 2`.
///
/// `Z` is either a d x d matrix in coordinates of an orthonormal basis of
/// `cran gap` (d its dimension) or an n x n matrix supported on `cran gap`.
pub fn interval_element(p: &ExtremePair, z: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    check_hermitian(z, tol)?;
    let nz = norm2(z);
    if nz > 1.0 + tol.eq_abs_tol {
        return Err(ExtError::NotContraction(nz));
    }
    let r = p.gap_range(tol);
    let n = p.gap.nrows();
    let zn = if z.nrows() == r.dim() && (z.nrows() != n || r.dim() == n) {
        r.basis() * z * r.basis().adjoint()
    } else if z.nrows() == n {
        let pr = r.projector();
        let off = (z - &pr * z * &pr).norm();
        if !tol.close(off, z.norm()) {
            return Err(ExtError::SupportViolation(off));
        }
        z.clone()
    } else {
        return Err(ExtError::DimMismatch(format!("Z is {}x{}", z.nrows(), z.ncols())));
    };
    let mid = (&p.b_max + &p.b_mu).scale(0.5);
    Ok(hermitize(&(mid + (&p.gap_root * zn * &p.gap_root).scale(0.5))))
}

/// Shorted operator `S_K` by the Schur complement and by `S^{1/2} P_Omega S^{1/2}`.
pub fn shorted_operator(s: &CMatrix, k: &Subspace, tol: &TolerancePolicy) -> Result<CMatrix> {
    check_psd(s, tol)?;
    if k.ambient_dim() != s.nrows() {
        return Err(ExtError::AmbientMismatch(s.nrows(), k.ambient_dim()));
    }
    let schur = shorted_schur(s, k, tol);
    let omega = shorted_omega(s, k, tol)?;
    let diff = norm2(&(&schur - &omega));
    if !tol.close(diff, norm2(s)) {
        return Err(ExtError::InternalMismatch(format!("shorted operator algorithms differ by {diff:.2e}")));
    }
    Ok(schur)
}

fn shorted_schur(s: &CMatrix, k: &Subspace, tol: &TolerancePolicy) -> CMatrix {
    let kb = k.basis();
    let kp = k.complement();
    let kpb = kp.basis();
    let s11 = kb.adjoint() * s * kb;
    let s12 = kb.adjoint() * s * kpb;
    let s22 = kpb.adjoint() * s * kpb;
    let sch = s11 - &s12 * pinv(&s22, tol) * s12.adjoint();
    hermitize(&(kb * sch * kb.adjoint()))
}

fn shorted_omega(s: &CMatrix, k: &Subspace, tol: &TolerancePolicy) -> Result<CMatrix> {
    let root = psd_sqrt(s, tol)?;
    let cran = range_basis(s, tol);
    let w = k.complement().image(&root, tol);
    let omega = subspace_meet(&cran, &w.complement(), tol)?;
    Ok(hermitize(&(&root * omega.projector() * &root)))
}

/// `ran (S_K)^{1/2} = ran S^{1/2} ∩ K`.
pub fn sh2_holds(s: &CMatrix, k: &Subspace, tol: &TolerancePolicy) -> Result<bool> {
    let sk = shorted_operator(s, k, tol)?;
    let lhs = range_basis(&sk, tol);
    let rhs = subspace_meet(&range_basis(s, tol), k, tol)?;
    Ok(lhs.same_as(&rhs, tol))
}

/// `F:G = F (F+G)^+ G`.
pub fn parallel_sum(f: &CMatrix, g: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    check_psd(f, tol)?;
    check_psd(g, tol)?;
    if f.shape() != g.shape() {
        return Err(ExtError::DimMismatch(format!("{:?} vs {:?}", f.shape(), g.shape())));
    }
    Ok(hermitize(&(f * pinv(&(f + g), tol) * g)))
}

/// Range identities relating `bt` to the extreme pair.
pub fn novrav_check(p: &ExtremePair, bt: &CMatrix, tol: &TolerancePolicy) -> Result<(bool, bool)> {
    let n = bt.nrows();
    let i = identity(n);
    let upper_l = subspace_meet(&range_basis(&(&i - bt), tol), &p.defect, tol)?;
    let upper_r = range_basis(&hermitize(&(&p.b_max - bt)), tol);
    let lower_l = subspace_meet(&range_basis(&(&i + bt), tol), &p.defect, tol)?;
    let lower_r = range_basis(&hermitize(&(bt - &p.b_mu)), tol);
    Ok((upper_l.same_as(&upper_r, tol), lower_l.same_as(&lower_r, tol)))
}

/// `C_a = 2a((S_K + a)^{-1} - (S_F + a)^{-1})`.
pub fn c_a(sf: &LinearRelation, sk: &LinearRelation, a: f64, tol: &TolerancePolicy) -> Result<CMatrix> {
    if !(a > 0.0) {
        return Err(ExtError::PreconditionFailed(format!("a = {a} must be positive")));
    }
    let z = C64::new(-a, 0.0);
    let rk = sk.resolvent(z, tol)?;
    let rf = sf.resolvent(z, tol)?;
    Ok(hermitize(&(rk - rf).scale(2.0 * a)))
}

/// Smallest `bt`-invariant subspace containing `n_sub`, with the compression of `bt`.
pub fn simple_part(bt: &CMatrix, n_sub: &Subspace, tol: &TolerancePolicy) -> (Subspace, CMatrix) {
    let mut v = n_sub.clone();
    loop {
        let next = v.join(&v.image(bt, tol), tol);
        if next.dim() == v.dim() {
            break;
        }
        v = next;
    }
    let q = v.basis();
    let comp = hermitize(&(q.adjoint() * bt * q));
    (v, comp)
}

/// `P_N (bt - lambda)^{-1}` restricted to `N`, in basis coordinates of `N`.
pub fn compressed_resolvent(
    bt: &CMatrix,
    n_sub: &Subspace,
    lambda: C64,
    tol: &TolerancePolicy,
) -> Result<CMatrix> {
    let shifted = bt - identity(bt.nrows()).map(|x| x * lambda);
    let x = solve(&shifted, n_sub.basis(), tol)
        .map_err(|_| ExtError::SpectrumHit { re: lambda.re, im: lambda.im })?;
    Ok(n_sub.basis().adjoint() * x)
}

#[derive(Debug, Clone)]
pub struct PppReport {
    /// `Q^{-1}(lambda) + lambda` constant over the samples.
    pub constant: bool,
    /// `N` fills the minimal invariant subspace.
    pub fills_simple_part: bool,
    pub consistent: bool,
    pub max_variation: f64,
}

/// Constancy test for `Q^{-1} + lambda` on the simple part generated by `N`.
pub fn ppp_check(
    bt: &CMatrix,
    n_sub: &Subspace,
    samples: &[C64],
    tol: &TolerancePolicy,
) -> Result<PppReport> {
    let (simple, _) = simple_part(bt, n_sub, tol);
    let fills = simple.dim() == n_sub.dim();
    let mut values = Vec::with_capacity(samples.len());
    for &lam in samples {
        let q = compressed_resolvent(bt, n_sub, lam, tol)?;
        let qi = crate::numeric::inverse(&q, tol)
            .map_err(|_| ExtError::SpectrumHit { re: lam.re, im: lam.im })?;
        values.push(qi + identity(n_sub.dim()).map(|x| x * lam));
    }
    let mut max_variation = 0.0f64;
    for v in values.iter().skip(1) {
        max_variation = max_variation.max((v - &values[0]).norm());
    }
    let scale = values.first().map(|v| v.norm()).unwrap_or(0.0);
    let constant = tol.close(max_variation, scale);
    Ok(PppReport { constant, fills_simple_part: fills, consistent: constant == fills, max_variation })
}

/// Random Hermitian contraction: a random sc-matrix compressed to a random frame.
pub fn random_instance(seed: u64, n: usize, domdim: usize, tol: &TolerancePolicy) -> Result<HermitianContraction> {
    if domdim > n || n == 0 {
        return Err(ExtError::DimMismatch(format!("domain dim {domdim} in C^{n}")));
    }
    let mut rng = random::rng(seed);
    let full = random::sc_matrix(&mut rng, n, -0.95, 0.95);
    let frame = random::frame(&mut rng, n, domdim);
    let dom = Subspace::from_orthonormal(frame, tol)?;
    HermitianContraction::restrict(&full, dom, tol)
}

fn parse_random(spec: &str) -> Option<(u64, usize, usize)> {
    let inner = spec.strip_prefix("random(")?.strip_suffix(')')?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return None;
    }
    Some((parts[0].parse().ok()?, parts[1].parse().ok()?, parts[2].parse().ok()?))
}

/// `E1`, `E2`, `E3` or `random(seed,n,domdim)`.
pub fn builtin_instance(name: &str) -> Result<Instance> {
    let tol = TolerancePolicy::default();
    let e1 = Subspace::full(2).basis().columns(0, 1).into_owned();
    let dom = Subspace::from_orthonormal(e1, &tol)?;
    match name {
        "E1" => Ok(Instance {
            name: name.into(),
            contraction: HermitianContraction::new(dom, from_real(2, 1, &[0.0, 0.0]), &tol)?,
            boundary_pair: None,
        }),
        "E2" | "E3" => {
            let b = HermitianContraction::new(dom, from_real(2, 1, &[0.0, 0.5]), &tol)?;
            let boundary_pair = if name == "E3" {
                let p = extreme_extensions(&b, &tol)?;
                Some((p.b_mu, p.b_max))
            } else {
                None
            };
            Ok(Instance { name: name.into(), contraction: b, boundary_pair })
        }
        _ => {
            let (seed, n, k) = parse_random(name).ok_or_else(|| ExtError::UnknownName(name.into()))?;
            Ok(Instance {
                name: name.into(),
                contraction: random_instance(seed, n, k, &tol)?,
                boundary_pair: None,
            })
        }
    }
}
