//! Boundary pairs and triplets, Weyl functions and the main transform of a pair `{S0, S1}`
//! in the nondense relation model.
//!
//! `S0`, `S1` are the Cayley preimages of `B0 <= B1`, `N` is an orthonormal basis of
//! `ran(B1 - B0)^{1/2}` and `L = dom S0 + span N`. The representative map is
//! `T(f + g) = S0 f - g`. Boundary values of general elements `(u, u')` of the relation
//! `{(u, Tu + m) : m in mul S0}` use `Gamma1^(u, u') = V*(u' - G1 u)` with `V = Gamma0(-1)`
//! and `G1` the ambient matrix of the closed form of `S1`; on the graph of `T` this is `Gamma1`.

use crate::contractions::HermitianContraction;
use crate::error::{ExtError, Result};
use crate::forms::{energy_ambient, form_of_relation, seminorm_distance, ClosedForm};
use crate::numeric::{
    hermitize, hstack, identity, inverse, min_eig, norm2, pinv, rank, subspace_meet, vstack, zeros, CMatrix,
    Subspace, TolerancePolicy, C64,
};
use crate::pairs::{new0_verdict, pair_energy_complement};
use crate::qfun::{LimitProtocol, QPair};
use crate::relations::LinearRelation;

fn spectrum_hit(z: C64) -> ExtError {
    ExtError::SpectrumHit { re: z.re, im: z.im }
}

fn scale(m: &CMatrix, s: C64) -> CMatrix {
    m.map(|x| x * s)
}

/// `z` in the exterior of `[0, inf)` with the tolerance margin.
fn check_exterior(z: C64, tol: &TolerancePolicy) -> Result<()> {
    let m = tol.eq_abs_tol;
    if z.im.abs() <= m && z.re >= -m {
        Err(spectrum_hit(z))
    } else {
        Ok(())
    }
}

/// Verified structure of the model.
#[derive(Debug, Clone)]
pub struct ModelChecks {
    /// `z` with the verdict on `L = dom S0 + N_z` and `D[S1] = D[S0] + N_z`.
    pub decomp11: Vec<(C64, bool)>,
    /// `L = dom S1 + N` as a sum.
    pub l2_sum: bool,
    /// `dim(dom S1 ∩ N)`; the second sum need not be direct.
    pub l2_overlap: usize,
    pub l_in_form_domain: bool,
    /// `N ⊆ ker(S* + 1)`.
    pub defect_inclusion: bool,
    /// `{g, -g} ∈ S*` for `g ∈ N`.
    pub adjoint_pairs: bool,
    /// `max |S1[f, phi] - (Tf, phi)|` over `f ∈ L`, `phi ∈ D[S0]`.
    pub lemma_residual: f64,
}

impl ModelChecks {
    pub fn holds(&self, tol: &TolerancePolicy) -> bool {
        self.decomp11.iter().all(|p| p.1)
            && self.l2_sum
            && self.l_in_form_domain
            && self.defect_inclusion
            && self.adjoint_pairs
            && tol.close(self.lemma_residual, 1.0)
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryModel {
    pair: QPair,
    s: LinearRelation,
    f0: ClosedForm,
    f1: ClosedForm,
    dom0: Subspace,
    dom1: Subspace,
    mul0: Subspace,
    gap: Subspace,
    l: Subspace,
    t: CMatrix,
    g1: CMatrix,
    energy: CMatrix,
    tol: TolerancePolicy,
    pub checks: ModelChecks,
}

/// Assembles `L`, `N`, `T` for a pair of sc-extensions of `B` passing every new0 condition.
pub fn build_model(
    b: &HermitianContraction,
    b0: &CMatrix,
    b1: &CMatrix,
    tol: &TolerancePolicy,
) -> Result<BoundaryModel> {
    if !b.is_sc_extension(b0, tol) || !b.is_sc_extension(b1, tol) {
        return Err(ExtError::PairNotConforming);
    }
    if !new0_verdict(b0, b1, tol)?.all() {
        return Err(ExtError::PairNotConforming);
    }
    let pair = QPair::new(b0, b1, tol)?;
    let (r0, r1) = pair.relations();
    let parts0 = r0.parts(tol)?;
    let f0 = form_of_relation(r0, tol)?;
    let f1 = form_of_relation(r1, tol)?;
    let nb = pair.gap_basis().clone();
    let n = pair.space_dim();
    let d = nb.ncols();
    let gap = Subspace::span(&nb, tol);
    if !pair_energy_complement(b0, b1, tol)?.same_as(&gap, tol) {
        return Err(ExtError::PairNotConforming);
    }

    let dom0 = parts0.carrier.clone();
    let k = dom0.dim();
    let frame = hstack(dom0.basis(), &nb);
    if rank(&frame, tol) != k + d {
        return Err(ExtError::PairNotConforming);
    }
    let l = Subspace::span(&frame, tol);
    let coords = pinv(&frame, tol);
    let a0 = parts0.ambient_op();
    let t = &a0 * dom0.basis() * coords.rows(0, k) - &nb * coords.rows(k, d);

    let dom1 = r1.dom(tol);
    let s = b.symmetric_relation(tol);
    let g1 = f1.ambient();
    let energy = energy_ambient(&f1);
    let mut model = BoundaryModel {
        pair,
        s,
        f0,
        f1,
        dom0,
        dom1,
        mul0: parts0.mul.clone(),
        gap,
        l,
        t,
        g1,
        energy,
        tol: *tol,
        checks: ModelChecks {
            decomp11: Vec::new(),
            l2_sum: false,
            l2_overlap: 0,
            l_in_form_domain: false,
            defect_inclusion: false,
            adjoint_pairs: false,
            lemma_residual: 0.0,
        },
    };
    model.checks = model.run_checks(n)?;
    Ok(model)
}

impl BoundaryModel {
    fn run_checks(&self, n: usize) -> Result<ModelChecks> {
        let tol = &self.tol;
        let nb = self.pair.gap_basis();
        let d = nb.ncols();
        let mut decomp11 = Vec::new();
        for z in [C64::new(-1.0, 0.0), C64::new(-2.0, 0.0), C64::new(0.0, 1.0)] {
            let nz = self.defect_basis(z)?;
            let lz = hstack(self.dom0.basis(), &nz);
            let dz = hstack(self.f0.domain().basis(), &nz);
            let ok = rank(&lz, tol) == self.dom0.dim() + d
                && Subspace::span(&lz, tol).same_as(&self.l, tol)
                && rank(&dz, tol) == self.f0.domain().dim() + d
                && Subspace::span(&dz, tol).same_as(self.f1.domain(), tol);
            decomp11.push((z, ok));
        }
        let l2 = self.dom1.join(&self.gap, tol);
        let l2_overlap = subspace_meet(&self.dom1, &self.gap, tol)?.dim();
        let l_in_form_domain = self.f1.domain().contains(&self.l, tol) && self.l.contains(&self.dom1, tol);
        let defect = self.s.defect_subspace(C64::new(-1.0, 0.0), tol);
        let defect_inclusion = d == 0 || defect.contains_vectors(nb, tol);
        let adjoint_pairs = d == 0 || {
            let g = LinearRelation::from_pairs(nb, &(-nb), tol)?;
            self.s.adjoint(tol).contains(&g, tol)
        };
        let lb = self.l.basis();
        let phi = self.f0.domain().basis();
        let lemma_residual = if phi.ncols() == 0 || lb.ncols() == 0 {
            0.0
        } else {
            norm2(&(phi.adjoint() * (&self.g1 - &self.t) * lb))
        };
        let _ = n;
        Ok(ModelChecks {
            decomp11,
            l2_sum: l2.same_as(&self.l, tol),
            l2_overlap,
            l_in_form_domain,
            defect_inclusion,
            adjoint_pairs,
            lemma_residual,
        })
    }

    pub fn pair(&self) -> &QPair {
        &self.pair
    }

    pub fn symmetric(&self) -> &LinearRelation {
        &self.s
    }

    pub fn space_dim(&self) -> usize {
        self.pair.space_dim()
    }

    pub fn param_dim(&self) -> usize {
        self.pair.gap_dim()
    }

    pub fn l(&self) -> &Subspace {
        &self.l
    }

    pub fn gap_space(&self) -> &Subspace {
        &self.gap
    }

    /// `T` on `L`, zero on `L^⊥`.
    pub fn t(&self) -> &CMatrix {
        &self.t
    }

    /// `dom S0`.
    pub fn dom0(&self) -> &Subspace {
        &self.dom0
    }

    pub fn mul0(&self) -> &Subspace {
        &self.mul0
    }

    pub fn form0(&self) -> &ClosedForm {
        &self.f0
    }

    pub fn form1(&self) -> &ClosedForm {
        &self.f1
    }

    pub fn tol(&self) -> &TolerancePolicy {
        &self.tol
    }

    /// Basis of `N_z = (I + (z+1)(S0 - z)^{-1}) N`.
    pub fn defect_basis(&self, z: C64) -> Result<CMatrix> {
        check_exterior(z, &self.tol)?;
        Ok(self.pair.shift_factor(false, z)? * self.pair.gap_basis())
    }

    /// `S1[u, v]` for columns of `u`, `v`.
    pub fn form1_sesq(&self, u: &CMatrix, v: &CMatrix) -> CMatrix {
        v.adjoint() * &self.g1 * u
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryTriplet {
    pub d: usize,
    /// `d x n`, meaningful on `D[S1]`.
    pub gamma0: CMatrix,
    /// `d x n`, meaningful on `L`.
    pub gamma1: Option<CMatrix>,
    /// `d x n` factor of `Gamma1^(u, u') = K (u' - G1 u)`.
    pub gamma1_hat: Option<CMatrix>,
    pub canonical: bool,
    pub transformed: bool,
}

impl BoundaryTriplet {
    pub fn gamma1(&self) -> Result<&CMatrix> {
        self.gamma1.as_ref().ok_or_else(|| ExtError::PreconditionFailed("Gamma1 not built".into()))
    }

    /// Relation-level `Gamma1^(u, u')`.
    pub fn gamma1_relation(&self, model: &BoundaryModel, u: &CMatrix, up: &CMatrix) -> Result<CMatrix> {
        let k = self
            .gamma1_hat
            .as_ref()
            .ok_or_else(|| ExtError::PreconditionFailed("relation-level Gamma1 not built".into()))?;
        Ok(k * (up - &model.g1 * u))
    }
}

/// `Gamma0 = (N* E N)^{-1} N* E`: coordinates of the energy projection onto `N`.
pub fn canonical_gamma0(model: &BoundaryModel) -> BoundaryTriplet {
    let nb = model.pair.gap_basis();
    let d = nb.ncols();
    let n = model.space_dim();
    let gamma0 = if d == 0 {
        zeros(0, n)
    } else {
        let gram = nb.adjoint() * &model.energy * nb;
        let gram_inv = inverse(&gram, &model.tol).expect("energy Gram of N is positive definite");
        gram_inv * nb.adjoint() * &model.energy * model.f1.domain().projector()
    };
    BoundaryTriplet { d, gamma0, gamma1: None, gamma1_hat: None, canonical: true, transformed: false }
}

/// `Gamma0' = K Gamma0` for invertible `K`; `Gamma1` must be rebuilt.
pub fn recoordinate(triplet: &BoundaryTriplet, k: &CMatrix, tol: &TolerancePolicy) -> Result<BoundaryTriplet> {
    if k.shape() != (triplet.d, triplet.d) {
        return Err(ExtError::DimMismatch(format!("K is {}x{}", k.nrows(), k.ncols())));
    }
    if rank(k, tol) != triplet.d {
        return Err(ExtError::NotInvertible);
    }
    Ok(BoundaryTriplet {
        d: triplet.d,
        gamma0: k * &triplet.gamma0,
        gamma1: None,
        gamma1_hat: None,
        canonical: false,
        transformed: false,
    })
}

#[derive(Debug, Clone)]
pub struct Gamma0Report {
    pub kernel_residual: f64,
    /// `ker Gamma0 ∩ D[S1] = D[S0]`.
    pub kernel_is_form_domain: bool,
    /// `ker Gamma0 ∩ L = dom S0`.
    pub kernel_on_l: bool,
    pub surjective: bool,
}

impl Gamma0Report {
    pub fn holds(&self, tol: &TolerancePolicy) -> bool {
        tol.close(self.kernel_residual, 1.0) && self.kernel_is_form_domain && self.kernel_on_l && self.surjective
    }
}

fn kernel_within(map: &CMatrix, space: &Subspace, tol: &TolerancePolicy) -> Subspace {
    let b = space.basis();
    if b.ncols() == 0 {
        return Subspace::zero(space.ambient_dim());
    }
    Subspace::span(&(b * crate::numeric::null_space(&(map * b), tol)), tol)
}

pub fn gamma0_checks(model: &BoundaryModel, triplet: &BoundaryTriplet) -> Gamma0Report {
    let tol = &model.tol;
    let g = &triplet.gamma0;
    let d0 = model.f0.domain().basis();
    let kernel_residual = if d0.ncols() == 0 || triplet.d == 0 { 0.0 } else { norm2(&(g * d0)) };
    let d1 = model.f1.domain().basis();
    Gamma0Report {
        kernel_residual,
        kernel_is_form_domain: kernel_within(g, model.f1.domain(), tol).same_as(model.f0.domain(), tol),
        kernel_on_l: kernel_within(g, &model.l, tol).same_as(&model.dom0, tol),
        surjective: triplet.d == 0 || rank(&(g * d1), tol) == triplet.d,
    }
}

/// `Gamma0(z) = (Gamma0 restricted to N_z)^{-1}` as an `n x d` matrix.
pub fn gamma0_field(model: &BoundaryModel, triplet: &BoundaryTriplet, z: C64) -> Result<CMatrix> {
    let nz = model.defect_basis(z)?;
    if triplet.d == 0 {
        return Ok(nz);
    }
    let g = &triplet.gamma0 * &nz;
    Ok(nz * inverse(&g, &model.tol).map_err(|_| spectrum_hit(z))?)
}

#[derive(Debug, Clone)]
pub struct FieldReport {
    /// `max ||Gamma0 Gamma0(z) - I||`.
    pub roundtrip_residual: f64,
    /// `max ||Gamma0(z) - Gamma0(xi) - (z - xi)(S0 - z)^{-1} Gamma0(xi)||` against `xi = -1`.
    pub gzxi_residual: f64,
    /// `||Gamma0(x)||` along `x = -1/t`.
    pub slim_sequence: Vec<(f64, f64)>,
    /// `s-lim Gamma0(x) = 0` as `x -> -inf`; a dense-domain clause.
    pub slim_vanishes: bool,
    pub slim_limit: f64,
}

pub fn field_checks(
    model: &BoundaryModel,
    triplet: &BoundaryTriplet,
    samples: &[C64],
    proto: &LimitProtocol,
) -> Result<FieldReport> {
    let xi = C64::new(-1.0, 0.0);
    let gxi = gamma0_field(model, triplet, xi)?;
    let mut roundtrip = 0.0f64;
    let mut gzxi = 0.0f64;
    for &z in samples {
        let gz = gamma0_field(model, triplet, z)?;
        roundtrip = roundtrip.max(norm2(&(&triplet.gamma0 * &gz - identity(triplet.d))));
        let rhs = &gxi + scale(&(model.pair.resolvent(false, z)? * &gxi), z - xi);
        gzxi = gzxi.max(norm2(&(gz - rhs)));
    }
    let mut seq = Vec::new();
    for t in proto.steps() {
        let g = gamma0_field(model, triplet, C64::new(-1.0 / t, 0.0))?;
        seq.push((t, norm2(&g)));
    }
    let slim_limit = seq.last().map(|p| p.1).unwrap_or(0.0);
    Ok(FieldReport {
        roundtrip_residual: roundtrip,
        gzxi_residual: gzxi,
        slim_vanishes: triplet.d == 0 || proto.vanishes(&seq),
        slim_sequence: seq,
        slim_limit,
    })
}

/// `W(z, xi) = Gamma0(xi)* G1 Gamma0(z)`, i.e. `(W h, e) = S1[Gamma0(z) h, Gamma0(xi) e]`.
pub fn w_kernel(model: &BoundaryModel, triplet: &BoundaryTriplet, z: C64, xi: C64) -> Result<CMatrix> {
    let gz = gamma0_field(model, triplet, z)?;
    let gx = gamma0_field(model, triplet, xi)?;
    Ok(model.form1_sesq(&gz, &gx))
}

/// Max pairwise deviation of `z Gamma0(xi)* Gamma0(z) - W(z, xi)` over `xis`.
pub fn diff_check(model: &BoundaryModel, triplet: &BoundaryTriplet, z: C64, xis: &[C64]) -> Result<f64> {
    let gz = gamma0_field(model, triplet, z)?;
    let mut vals = Vec::new();
    for &xi in xis {
        let gx = gamma0_field(model, triplet, xi)?;
        vals.push(scale(&(gx.adjoint() * &gz), z) - model.form1_sesq(&gz, &gx));
    }
    let mut worst = 0.0f64;
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            worst = worst.max(norm2(&(&vals[i] - &vals[j])));
        }
    }
    Ok(worst)
}

/// Minimum eigenvalue of the kernel matrix `[W(z_j, z_i)]` over the sample grid.
pub fn w_kernel_min_eig(model: &BoundaryModel, triplet: &BoundaryTriplet, points: &[C64]) -> Result<f64> {
    let d = triplet.d;
    let m = points.len();
    if d == 0 || m == 0 {
        return Ok(0.0);
    }
    let fields: Vec<CMatrix> = points.iter().map(|&z| gamma0_field(model, triplet, z)).collect::<Result<_>>()?;
    let mut big = zeros(m * d, m * d);
    for i in 0..m {
        for j in 0..m {
            big.view_mut((i * d, j * d), (d, d)).copy_from(&model.form1_sesq(&fields[j], &fields[i]));
        }
    }
    Ok(min_eig(&hermitize(&big)))
}

#[derive(Debug, Clone)]
pub struct Gamma1Report {
    /// `(Gamma1 u, Gamma0 v) = (Tu, v) - S1[u, v]` over `u ∈ L`, `v ∈ D[S1]`.
    pub gg_residual: f64,
    /// `-(Gamma1 psi, Gamma0 g) = (psi, g)_{S1}` on `N`.
    pub gam10_residual: f64,
    pub surjective: bool,
    /// `ker Gamma1 = {u ∈ L : {u, Tu} ∈ S1}`.
    pub kernel_law: bool,
    pub kernel_dim: usize,
    /// Minimum eigenvalue of the Hermitian part of `I - Gamma1 Gamma0(-1)`.
    pub pd_min_eig: f64,
}

impl Gamma1Report {
    pub fn holds(&self, tol: &TolerancePolicy) -> bool {
        tol.close(self.gg_residual, 1.0) && tol.close(self.gam10_residual, 1.0) && self.surjective && self.kernel_law
    }
}

/// Solves (GG) for `Gamma1` against `v = Gamma0(-1) e_j` and checks the result.
pub fn build_gamma1(model: &BoundaryModel, triplet: &BoundaryTriplet) -> Result<(BoundaryTriplet, Gamma1Report)> {
    let tol = &model.tol;
    let d = triplet.d;
    let n = model.space_dim();
    let lb = model.l.basis();
    let mut out = triplet.clone();
    if d == 0 {
        out.gamma1 = Some(zeros(0, n));
        out.gamma1_hat = Some(zeros(0, n));
        let report = Gamma1Report {
            gg_residual: 0.0,
            gam10_residual: 0.0,
            surjective: true,
            kernel_law: true,
            kernel_dim: model.l.dim(),
            pd_min_eig: f64::INFINITY,
        };
        return Ok((out, report));
    }
    let v = gamma0_field(model, triplet, C64::new(-1.0, 0.0))?;
    let gm = &triplet.gamma0 * &v;
    let k = inverse(&gm.adjoint(), tol)? * v.adjoint();
    let gamma1 = &k * (&model.t - &model.g1) * model.l.projector();

    let d1 = model.f1.domain().basis();
    let lhs = (&triplet.gamma0 * d1).adjoint() * (&gamma1 * lb);
    let rhs = d1.adjoint() * (&model.t - &model.g1) * lb;
    let gg_residual = norm2(&(lhs - rhs));

    let nb = model.pair.gap_basis();
    let gam10 = -((&triplet.gamma0 * nb).adjoint() * (&gamma1 * nb)) - nb.adjoint() * &model.energy * nb;
    let gam10_residual = norm2(&gam10);

    let surjective = rank(&(&gamma1 * lb), tol) == d;
    let ker = kernel_within(&gamma1, &model.l, tol);
    let (_, r1) = model.pair.relations();
    let outside = identity(2 * n) - r1.graph().projector();
    let stacked = vstack(lb, &(&model.t * lb));
    let graph_side = Subspace::span(&(lb * crate::numeric::null_space(&(outside * stacked), tol)), tol);
    let kernel_law = ker.same_as(&graph_side, tol);

    let pd = identity(d) - &gamma1 * &v;
    let pd_min_eig = min_eig(&hermitize(&pd));
    if pd_min_eig <= 0.0 {
        return Err(ExtError::SingularGram);
    }
    out.gamma1 = Some(gamma1);
    out.gamma1_hat = Some(k);
    let report = Gamma1Report { gg_residual, gam10_residual, surjective, kernel_law, kernel_dim: ker.dim(), pd_min_eig };
    Ok((out, report))
}

/// `M(z) = Gamma1^(Gamma0(z), z Gamma0(z))`.
pub fn weyl_eval(model: &BoundaryModel, triplet: &BoundaryTriplet, z: C64) -> Result<CMatrix> {
    let gz = gamma0_field(model, triplet, z)?;
    triplet.gamma1_relation(model, &gz, &scale(&gz, z))
}

#[derive(Debug, Clone)]
pub struct WeylReport {
    /// `-M(z) = W(z, xi) - z Gamma0(xi)* Gamma0(z)`.
    pub qwg_residual: f64,
    /// `(M(z) - M(xi)*)/(z - conj xi) = Gamma0(xi)* Gamma0(z)`.
    pub nevan_residual: f64,
    /// `M(conj z) = M(z)*`.
    pub symmetry_residual: f64,
    /// Minimum eigenvalue of `Im M(z) / Im z` over nonreal samples.
    pub im_min_eig: f64,
    /// `max ||Gamma1 Gamma0(z) - M(z)||`: the graph-of-`T` value differs off `z = -1`.
    pub section_gap: f64,
    /// `max ||(z - T) Gamma0(z) mod mul S0||`: `Gamma0(z)` spans eigen-elements of the relation.
    pub eigen_residual: f64,
}

impl WeylReport {
    pub fn holds(&self, tol: &TolerancePolicy) -> bool {
        tol.close(self.qwg_residual, 1.0)
            && tol.close(self.nevan_residual, 1.0)
            && tol.close(self.symmetry_residual, 1.0)
            && tol.close(self.eigen_residual, 1.0)
            && self.im_min_eig >= tol.psd_floor
    }
}

pub fn weyl_checks(model: &BoundaryModel, triplet: &BoundaryTriplet, samples: &[C64]) -> Result<WeylReport> {
    let gamma1 = triplet.gamma1()?;
    let pc = identity(model.space_dim()) - model.mul0.projector();
    let mut rep = WeylReport {
        qwg_residual: 0.0,
        nevan_residual: 0.0,
        symmetry_residual: 0.0,
        im_min_eig: f64::INFINITY,
        section_gap: 0.0,
        eigen_residual: 0.0,
    };
    if triplet.d == 0 {
        return Ok(rep);
    }
    let fields: Vec<CMatrix> = samples.iter().map(|&z| gamma0_field(model, triplet, z)).collect::<Result<_>>()?;
    let ms: Vec<CMatrix> = samples.iter().map(|&z| weyl_eval(model, triplet, z)).collect::<Result<_>>()?;
    for (i, &z) in samples.iter().enumerate() {
        let gz = &fields[i];
        rep.section_gap = rep.section_gap.max(norm2(&(gamma1 * gz - &ms[i])));
        let ez = scale(gz, z) - &model.t * gz;
        rep.eigen_residual = rep.eigen_residual.max(norm2(&(&pc * ez)));
        if z.im.abs() > model.tol.eq_abs_tol {
            rep.symmetry_residual =
                rep.symmetry_residual.max(norm2(&(weyl_eval(model, triplet, z.conj())? - ms[i].adjoint())));
            let im = scale(&(&ms[i] - ms[i].adjoint()), C64::new(0.0, -0.5 / z.im));
            rep.im_min_eig = rep.im_min_eig.min(min_eig(&hermitize(&im)));
        }
        for (j, &xi) in samples.iter().enumerate() {
            let gx = &fields[j];
            let w = model.form1_sesq(gz, gx);
            let qwg = &ms[i] + w - scale(&(gx.adjoint() * gz), z);
            rep.qwg_residual = rep.qwg_residual.max(norm2(&qwg));
            let den = z - xi.conj();
            if den.norm() > 1e-3 {
                let lhs = scale(&(&ms[i] - ms[j].adjoint()), 1.0 / den);
                rep.nevan_residual = rep.nevan_residual.max(norm2(&(lhs - gx.adjoint() * gz)));
            }
        }
    }
    if rep.im_min_eig == f64::INFINITY {
        rep.im_min_eig = 0.0;
    }
    Ok(rep)
}

#[derive(Debug, Clone)]
pub struct T1Report {
    /// `Gamma0(-1) = (B1 - B0)^{1/2} X0`.
    pub x0: CMatrix,
    /// `max ||M(z) + 2 X0* Q0((1-z)/(1+z)) X0||`.
    pub t1_residual: f64,
    /// `||M(-1) + 2 X0* X0||`.
    pub m_minus_one_residual: f64,
    /// `max ||M(z) - C* calQ0(z) C||` with `C = sqrt(2) N* X0`.
    pub congruence_residual: f64,
    pub congruence: CMatrix,
}

impl T1Report {
    pub fn holds(&self, tol: &TolerancePolicy) -> bool {
        tol.close(self.t1_residual, 1.0)
            && tol.close(self.m_minus_one_residual, 1.0)
            && tol.close(self.congruence_residual, 1.0)
    }
}

pub fn t1_check(model: &BoundaryModel, triplet: &BoundaryTriplet, samples: &[C64]) -> Result<T1Report> {
    let tol = &model.tol;
    let d = triplet.d;
    let root = model.pair.gap_root();
    let v = gamma0_field(model, triplet, C64::new(-1.0, 0.0))?;
    let x0 = pinv(root, tol) * &v;
    let fact = norm2(&(root * &x0 - &v));
    if !tol.close(fact, norm2(&v)) {
        return Err(ExtError::FactorizationResidual(fact));
    }
    let x = model.pair.gap_basis().adjoint() * &x0;
    let congruence = scale(&x, C64::new(2f64.sqrt(), 0.0));
    let mut rep = T1Report {
        x0: x0.clone(),
        t1_residual: 0.0,
        m_minus_one_residual: 0.0,
        congruence_residual: 0.0,
        congruence: congruence.clone(),
    };
    if d == 0 {
        return Ok(rep);
    }
    let m1 = weyl_eval(model, triplet, C64::new(-1.0, 0.0))?;
    rep.m_minus_one_residual = norm2(&(m1 + scale(&(x0.adjoint() * &x0), C64::new(2.0, 0.0))));
    for &z in samples {
        if (z + 1.0).norm() < 1e-6 {
            continue;
        }
        let m = weyl_eval(model, triplet, z)?;
        let mu = (1.0 - z) / (1.0 + z);
        let q0 = model.pair.q0(mu)?;
        let t1 = &m + scale(&(x.adjoint() * q0 * &x), C64::new(2.0, 0.0));
        rep.t1_residual = rep.t1_residual.max(norm2(&t1));
        let cq = model.pair.calq0(z)?;
        rep.congruence_residual = rep.congruence_residual.max(norm2(&(&m - congruence.adjoint() * cq * &congruence)));
    }
    Ok(rep)
}

#[derive(Debug, Clone)]
pub struct MainReport {
    /// `||G* F - F* G||` over the generating pairs.
    pub symmetry_residual: f64,
    pub selfadjoint: bool,
    pub nonnegative: bool,
    /// The adjoined multivalued part equals `{(m, -V* m) : m ∈ mul S0}`.
    pub mul_matches: bool,
    /// Graph of `Ã` meets `(H ⊕ {0})^2` in the graph of `S`.
    pub graph_s: bool,
    /// `D[Ã] = {(v, Gamma0 v)}` and `Ã[(v, Gamma0 v)] = S1[v]`.
    pub dom_form: bool,
    pub dom_form_residual: f64,
    /// `max_v inf_{u ∈ dom S0} Ã[(v, Gamma0 v) - (u, 0)]` over a basis of `D[S1]`.
    pub extr_value: f64,
    /// `dim(dom Ã^{1/2} ∩ (C^n ⊕ 0))` and the same for `ran Ã^{1/2}`.
    pub base_dom_dim: usize,
    pub base_ran_dim: usize,
    /// The same dimensions against the boundary summand `0 ⊕ C^d`.
    pub boundary_dom_dim: usize,
    pub boundary_ran_dim: usize,
}

impl MainReport {
    pub fn holds(&self, tol: &TolerancePolicy) -> bool {
        tol.close(self.symmetry_residual, 1.0)
            && self.selfadjoint
            && self.nonnegative
            && self.mul_matches
            && self.graph_s
            && self.dom_form
    }

    pub fn extr_holds(&self, tol: &TolerancePolicy) -> bool {
        tol.close(self.extr_value, 1.0)
    }
}

fn embed_base(n: usize, d: usize) -> CMatrix {
    vstack(&identity(n), &zeros(d, n))
}

/// `Ã = {((u, Gamma0 u), (Tu, -Gamma1 u)) : u ∈ L}` completed by `{0} × dom^⊥` on `C^{n+d}`.
pub fn main_transform(model: &BoundaryModel, triplet: &BoundaryTriplet) -> Result<(LinearRelation, MainReport)> {
    let tol = &model.tol;
    let n = model.space_dim();
    let d = triplet.d;
    let gamma1 = triplet.gamma1()?;
    let lb = model.l.basis();
    let top = vstack(lb, &(&triplet.gamma0 * lb));
    let bottom = vstack(&(&model.t * lb), &(-(gamma1 * lb)));
    let cross = bottom.adjoint() * &top;
    let symmetry_residual = norm2(&(&cross - cross.adjoint()));
    if !tol.close(symmetry_residual, norm2(&top) * norm2(&bottom)) {
        return Err(ExtError::NotSymmetric);
    }
    let dom_perp = Subspace::span(&top, tol).complement();
    let pm = dom_perp.basis();
    let f = hstack(&top, &zeros(n + d, pm.ncols()));
    let g = hstack(&bottom, pm);
    let a = LinearRelation::from_pairs(&f, &g, tol)?;
    let class = a.classify(tol);
    if !class.selfadjoint {
        return Err(ExtError::CompletionNotSelfadjoint);
    }

    let mul_matches = match triplet.gamma1_hat.as_ref() {
        Some(k) => {
            let mb = model.mul0.basis();
            let expected = Subspace::span(&vstack(mb, &(-(k * mb))), tol);
            expected.same_as(&dom_perp, tol)
        }
        None => false,
    };

    let graph_s = {
        let dim = 2 * (n + d);
        let mut w = zeros(dim, 2 * n);
        w.view_mut((0, 0), (n, n)).copy_from(&identity(n));
        w.view_mut((n + d, n), (n, n)).copy_from(&identity(n));
        let w = Subspace::span(&w, tol);
        let meet = subspace_meet(a.graph(), &w, tol)?;
        let sg = model.s.graph().basis();
        let mut lifted = zeros(dim, sg.ncols());
        lifted.view_mut((0, 0), (n, sg.ncols())).copy_from(&sg.rows(0, n));
        lifted.view_mut((n + d, 0), (n, sg.ncols())).copy_from(&sg.rows(n, n));
        let embedded = Subspace::span(&lifted, tol);
        meet.same_as(&embedded, tol)
    };

    let fa = form_of_relation(&a, tol)?;
    let d1 = model.f1.domain().basis();
    let j = vstack(d1, &(&triplet.gamma0 * d1));
    let dom_form_residual = norm2(&(j.adjoint() * fa.ambient() * &j - d1.adjoint() * &model.g1 * d1));
    let dom_form = fa.domain().same_as(&Subspace::span(&j, tol), tol) && tol.close(dom_form_residual, 1.0);

    let base_dom = vstack(model.dom0.basis(), &zeros(d, model.dom0.dim()));
    let base_dom = Subspace::span(&base_dom, tol);
    let mut extr_value = 0.0f64;
    for c in 0..j.ncols() {
        let (val, _) = seminorm_distance(&fa, &j.columns(c, 1).into_owned(), &base_dom, tol)?;
        extr_value = extr_value.max(val);
    }

    let base = Subspace::span(&embed_base(n, d), tol);
    let bnd = base.complement();
    let ran_root = crate::numeric::range_basis(&fa.ambient(), tol);
    let dim_meet = |u: &Subspace, v: &Subspace| subspace_meet(u, v, tol).map(|s| s.dim());
    let report = MainReport {
        symmetry_residual,
        selfadjoint: class.selfadjoint,
        nonnegative: class.nonnegative,
        mul_matches,
        graph_s,
        dom_form,
        dom_form_residual,
        extr_value,
        base_dom_dim: dim_meet(fa.domain(), &base)?,
        base_ran_dim: dim_meet(&ran_root, &base)?,
        boundary_dom_dim: dim_meet(fa.domain(), &bnd)?,
        boundary_ran_dim: dim_meet(&ran_root, &bnd)?,
    };
    if !class.nonnegative {
        return Err(ExtError::CompletionNotSelfadjoint);
    }
    Ok((a, report))
}

/// `max ||P_H (Ã - z)^{-1}|_H + (M(z) + z)^{-1}||` over `samples`.
pub fn compressed_resolvent_check(
    model: &BoundaryModel,
    triplet: &BoundaryTriplet,
    a: &LinearRelation,
    samples: &[C64],
) -> Result<f64> {
    let n = model.space_dim();
    let d = triplet.d;
    let mut worst = 0.0f64;
    if d == 0 {
        return Ok(worst);
    }
    for &z in samples {
        let lhs = a.resolvent(z, &model.tol)?.view((n, n), (d, d)).into_owned();
        let m = weyl_eval(model, triplet, z)? + scale(&identity(d), z);
        let rhs = -inverse(&m, &model.tol).map_err(|_| spectrum_hit(z))?;
        worst = worst.max(norm2(&(lhs - rhs)));
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct GreenReport {
    /// `(Tu, v) - (u, Tv) = (Gamma1 u, Gamma0 v) - (Gamma0 u, Gamma1 v)` on a basis of `L`.
    pub green_residual: f64,
    /// Minimum eigenvalue of `omega(f, f) = (Tf, f) - (Gamma1 f, Gamma0 f)` on `L`.
    pub omega_min: f64,
}

impl GreenReport {
    pub fn green_holds(&self, tol: &TolerancePolicy) -> bool {
        tol.close(self.green_residual, 1.0)
    }

    pub fn positive(&self, tol: &TolerancePolicy) -> bool {
        self.omega_min >= tol.psd_floor
    }
}

/// Green's identity and positivity for `T`, `Gamma0`, `Gamma1` given on a basis `lb`.
pub fn green_positive_checks(t: &CMatrix, gamma0: &CMatrix, gamma1: &CMatrix, lb: &CMatrix) -> GreenReport {
    if lb.ncols() == 0 {
        return GreenReport { green_residual: 0.0, omega_min: 0.0 };
    }
    let tl = t * lb;
    let g0 = gamma0 * lb;
    let g1 = gamma1 * lb;
    let lhs = lb.adjoint() * &tl - tl.adjoint() * lb;
    let rhs = g0.adjoint() * &g1 - g1.adjoint() * &g0;
    let omega = lb.adjoint() * &tl - g0.adjoint() * &g1;
    GreenReport { green_residual: norm2(&(lhs - rhs)), omega_min: min_eig(&hermitize(&omega)) }
}

/// `Gamma0' = W((I + BC)Gamma0 - B Gamma1)`, `Gamma1' = W^{-*}(Gamma1 - C Gamma0)`.
pub fn descallpos_transform(
    triplet: &BoundaryTriplet,
    b: &CMatrix,
    c: &CMatrix,
    w: &CMatrix,
    tol: &TolerancePolicy,
) -> Result<BoundaryTriplet> {
    let d = triplet.d;
    for m in [b, c, w] {
        if m.shape() != (d, d) {
            return Err(ExtError::DimMismatch(format!("expected {d}x{d}, got {}x{}", m.nrows(), m.ncols())));
        }
    }
    crate::numeric::check_psd(b, tol)?;
    crate::numeric::check_psd(c, tol)?;
    if rank(w, tol) != d {
        return Err(ExtError::NotInvertible);
    }
    let gamma1 = triplet.gamma1()?;
    let g0 = w * ((identity(d) + b * c) * &triplet.gamma0 - b * gamma1);
    let g1 = inverse(&w.adjoint(), tol)? * (gamma1 - c * &triplet.gamma0);
    Ok(BoundaryTriplet { d, gamma0: g0, gamma1: Some(g1), gamma1_hat: None, canonical: false, transformed: true })
}

/// Everything the boundary suite measures on one model.
#[derive(Debug, Clone)]
pub struct BoundarySuite {
    pub model: ModelChecks,
    pub gamma0: Gamma0Report,
    pub field: FieldReport,
    pub diff_residual: f64,
    pub w_min_eig: f64,
    pub gamma1: Gamma1Report,
    pub weyl: WeylReport,
    pub t1: T1Report,
    pub main: MainReport,
    pub resolvent_residual: f64,
    pub green: GreenReport,
    /// Green residual and `omega'` minimum after a random positive `descallpos` transform.
    pub descallpos: GreenReport,
    /// `max ||M'(z) - K^{-*} M(z) K^{-1}||` for a recoordinated `Gamma0' = K Gamma0`.
    pub recoordination_residual: f64,
    pub m_minus_one: CMatrix,
}

impl BoundarySuite {
    /// All finite-dimensional clauses, with residuals against `tol`.
    pub fn core_holds(&self, tol: &TolerancePolicy) -> bool {
        self.model.holds(tol)
            && self.gamma0.holds(tol)
            && tol.close(self.field.gzxi_residual, 1.0)
            && tol.close(self.field.roundtrip_residual, 1.0)
            && tol.close(self.diff_residual, 1.0)
            && self.w_min_eig >= tol.psd_floor
            && self.gamma1.holds(tol)
            && self.weyl.holds(tol)
            && self.t1.holds(tol)
            && self.main.holds(tol)
            && tol.close(self.resolvent_residual, 1.0)
            && self.green.green_holds(tol)
            && self.green.positive(tol)
            && self.descallpos.green_holds(tol)
            && self.descallpos.positive(tol)
            && tol.close(self.recoordination_residual, 1.0)
    }

    /// The largest residual among the finite-dimensional identities.
    pub fn max_residual(&self) -> f64 {
        [
            self.model.lemma_residual,
            self.gamma0.kernel_residual,
            self.field.gzxi_residual,
            self.field.roundtrip_residual,
            self.diff_residual,
            self.gamma1.gg_residual,
            self.gamma1.gam10_residual,
            self.weyl.qwg_residual,
            self.weyl.nevan_residual,
            self.weyl.symmetry_residual,
            self.weyl.eigen_residual,
            self.t1.t1_residual,
            self.t1.m_minus_one_residual,
            self.t1.congruence_residual,
            self.main.symmetry_residual,
            self.main.dom_form_residual,
            self.resolvent_residual,
            self.green.green_residual,
            self.descallpos.green_residual,
            self.recoordination_residual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Standard sample grid: off the half-line, away from `-1`.
pub fn boundary_samples() -> Vec<C64> {
    vec![
        C64::new(-2.0, 0.0),
        C64::new(-0.5, 0.0),
        C64::new(-7.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 2.0),
        C64::new(0.5, -1.5),
        C64::new(3.0, 0.7),
    ]
}

/// Runs every boundary check on `(B, B0, B1)` with the canonical `Gamma0`.
pub fn boundary_suite(
    b: &HermitianContraction,
    b0: &CMatrix,
    b1: &CMatrix,
    proto: &LimitProtocol,
    seed: u64,
    tol: &TolerancePolicy,
) -> Result<BoundarySuite> {
    let model = build_model(b, b0, b1, tol)?;
    let g0 = canonical_gamma0(&model);
    let gamma0 = gamma0_checks(&model, &g0);
    let samples = boundary_samples();
    let field = field_checks(&model, &g0, &samples, proto)?;
    let xis = [C64::new(-1.0, 0.0), C64::new(-2.0, 0.0), C64::new(-3.0, 0.0)];
    let mut diff_residual = 0.0f64;
    for &z in &samples {
        diff_residual = diff_residual.max(diff_check(&model, &g0, z, &xis)?);
    }
    let w_min_eig = w_kernel_min_eig(&model, &g0, &samples)?;
    let (triplet, gamma1) = build_gamma1(&model, &g0)?;
    let weyl = weyl_checks(&model, &triplet, &samples)?;
    let t1 = t1_check(&model, &triplet, &samples)?;
    let (a, main) = main_transform(&model, &triplet)?;
    let resolvent_residual = compressed_resolvent_check(&model, &triplet, &a, &samples)?;
    let gamma1_m = triplet.gamma1()?;
    let green = green_positive_checks(&model.t, &triplet.gamma0, gamma1_m, model.l.basis());

    let d = triplet.d;
    let mut rng = crate::random::rng(seed);
    let (bp, cp, wp) = if d == 0 {
        (zeros(0, 0), zeros(0, 0), zeros(0, 0))
    } else {
        let x = crate::random::gaussian(&mut rng, d, d);
        let y = crate::random::gaussian(&mut rng, d, d);
        let w = crate::random::gaussian(&mut rng, d, d) + scale(&identity(d), C64::new(d as f64, 0.0));
        (hermitize(&(&x * x.adjoint())).scale(0.2), hermitize(&(&y * y.adjoint())).scale(0.2), w)
    };
    let moved = descallpos_transform(&triplet, &bp, &cp, &wp, tol)?;
    let descallpos = green_positive_checks(&model.t, &moved.gamma0, moved.gamma1()?, model.l.basis());

    let mut recoordination_residual = 0.0f64;
    if d > 0 {
        let k = crate::random::gaussian(&mut rng, d, d) + scale(&identity(d), C64::new(2.0 * d as f64, 0.0));
        let (re, _) = build_gamma1(&model, &recoordinate(&g0, &k, tol)?)?;
        let kinv = inverse(&k, tol)?;
        for &z in &samples {
            let lhs = weyl_eval(&model, &re, z)?;
            let rhs = kinv.adjoint() * weyl_eval(&model, &triplet, z)? * &kinv;
            recoordination_residual = recoordination_residual.max(norm2(&(lhs - rhs)));
        }
    }
    let m_minus_one = weyl_eval(&model, &triplet, C64::new(-1.0, 0.0))?;
    Ok(BoundarySuite {
        model: model.checks.clone(),
        gamma0,
        field,
        diff_residual,
        w_min_eig,
        gamma1,
        weyl,
        t1,
        main,
        resolvent_residual,
        green,
        descallpos,
        recoordination_residual,
        m_minus_one,
    })
}
