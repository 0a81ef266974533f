//! Special pairs of selfadjoint contractions and of their Cayley inverses.

use rand::Rng;
use rayon::prelude::*;

use crate::contractions::{extreme_extensions, interval_element, parallel_sum, HermitianContraction};
use crate::error::{ExtError, Result};
use crate::forms::{energy_ambient, form_of_relation, form_restriction_check, seminorm_distance, ClosedForm};
use crate::numeric::{
    block_diag, eigh, hermitize, identity, norm2, null_space, principal_angles,
    psd_order, psd_sqrt, pinv, range_basis, rank, solve, subspace_meet, vstack, CMatrix, Subspace,
    TolerancePolicy, C64,
};
use crate::random;
use crate::relations::cayley_inverse;

/// `W = (I+B1)^{(-1/2)} (I+B0)^{1/2}`.
pub fn w_operator(b0: &CMatrix, b1: &CMatrix, tol: &TolerancePolicy) -> Result<CMatrix> {
    if !psd_order(b0, b1, tol)? {
        return Err(ExtError::OrderViolation);
    }
    let i = identity(b0.nrows());
    let r0 = psd_sqrt(&hermitize(&(&i + b0)), tol)?;
    let r1 = psd_sqrt(&hermitize(&(&i + b1)), tol)?;
    Ok(pinv(&r1, tol) * r0)
}

fn psd_range(a: &CMatrix, tol: &TolerancePolicy) -> Subspace {
    range_basis(&hermitize(a), tol)
}

fn trivially_meet(u: &Subspace, v: &Subspace, tol: &TolerancePolicy) -> Result<bool> {
    Ok(subspace_meet(u, v, tol)?.is_zero())
}

/// Forms of `S0`, `S1` and of their inverses.
struct PairForms {
    s0: ClosedForm,
    s1: ClosedForm,
    s0_inv: ClosedForm,
    s1_inv: ClosedForm,
}

fn pair_forms(b0: &CMatrix, b1: &CMatrix, tol: &TolerancePolicy) -> Result<PairForms> {
    let r0 = cayley_inverse(b0, tol)?;
    let r1 = cayley_inverse(b1, tol)?;
    Ok(PairForms {
        s0: form_of_relation(&r0, tol)?,
        s1: form_of_relation(&r1, tol)?,
        s0_inv: form_of_relation(&r0.inverse(tol), tol)?,
        s1_inv: form_of_relation(&r1.inverse(tol), tol)?,
    })
}

/// `D[S1] minus_{S1} D[S0]`: energy-orthogonal complement of `D[S0]` in `D[S1]`.
pub fn energy_complement(f0: &ClosedForm, f1: &ClosedForm, tol: &TolerancePolicy) -> Subspace {
    let q1 = f1.domain().basis();
    if q1.ncols() == 0 {
        return Subspace::zero(f1.domain().ambient_dim());
    }
    // Orthogonal complement in the coordinates of G^{1/2}, G = Gram + I.
    let g = hermitize(&(q1.adjoint() * energy_ambient(f1) * q1));
    let root = psd_sqrt(&g, tol).expect("energy Gram is positive definite");
    let ry = &root * (q1.adjoint() * f0.domain().basis());
    let perp = Subspace::span(&ry, tol).complement();
    let coords = solve(&root, perp.basis(), tol).expect("energy Gram is positive definite");
    Subspace::span(&(q1 * coords), tol)
}

/// `energy_complement` of the Cayley inverses of `B0 <= B1`, computed as
/// `(I+B1)^{1/2} (ker W* ∩ ran(I+B1))` without forming either form.
pub fn pair_energy_complement(b0: &CMatrix, b1: &CMatrix, tol: &TolerancePolicy) -> Result<Subspace> {
    let w = w_operator(b0, b1, tol)?;
    let ip1 = hermitize(&(identity(b0.nrows()) + b1));
    let ker_wstar = Subspace::span(&null_space(&w.adjoint(), tol), tol);
    let y = subspace_meet(&ker_wstar, &psd_range(&ip1, tol), tol)?;
    Ok(y.image(&psd_sqrt(&ip1, tol)?, tol))
}

/// `inf_{phi in D[F0]} F1[u - phi] = 0` for all `u` in `D[F1]`.
fn approximation_holds(f0: &ClosedForm, f1: &ClosedForm, tol: &TolerancePolicy) -> Result<(bool, f64)> {
    if !f1.domain().contains(f0.domain(), tol) {
        return Ok((false, f64::INFINITY));
    }
    let q1 = f1.domain().basis();
    let scale = f1.gram().norm();
    let mut worst = 0.0f64;
    for j in 0..q1.ncols() {
        let u = q1.columns(j, 1).into_owned();
        let (d, _) = seminorm_distance(f1, &u, f0.domain(), tol)?;
        worst = worst.max(d);
    }
    Ok((tol.close(worst, scale), worst))
}

#[derive(Debug, Clone)]
pub struct New0Verdict {
    pub items: [bool; 4],
    pub w: CMatrix,
    /// `W W*`.
    pub pi: CMatrix,
    /// Projection onto `ker W*` inside `cran(I+B1)`.
    pub p: CMatrix,
    /// `‖(B1-B0)^{1/2} g‖²_{S1} = 2‖P_{cran gap} g‖²` over a basis.
    pub norm_gap_residual: f64,
    /// `‖(I+B1)^{1/2} P g‖²_{S1} = 2‖P g‖²` over a basis.
    pub norm_p_residual: f64,
}

impl New0Verdict {
    pub fn agree(&self) -> bool {
        self.items.iter().all(|&b| b == self.items[0])
    }

    pub fn all(&self) -> bool {
        self.items.iter().all(|&b| b)
    }
}

/// The four equivalent conditions for `S0[.]` to be a closed restriction of `S1[.]`.
pub fn new0_verdict(b0: &CMatrix, b1: &CMatrix, tol: &TolerancePolicy) -> Result<New0Verdict> {
    let w = w_operator(b0, b1, tol)?;
    let n = b0.nrows();
    let i = identity(n);
    let forms = pair_forms(b0, b1, tol)?;
    let gap = hermitize(&(b1 - b0));
    let gap_range = psd_range(&gap, tol);

    let item1 = form_restriction_check(&forms.s0, &forms.s1, tol);

    let item2 = forms.s1.domain().contains(forms.s0.domain(), tol)
        && pair_energy_complement(b0, b1, tol)?.same_as(&gap_range, tol);

    let pi = hermitize(&(&w * w.adjoint()));
    let idem = (&pi * &pi - &pi).norm();
    let item3 = tol.close(idem, pi.norm());

    let item4 = trivially_meet(&psd_range(&(&i + b0), tol), &gap_range, tol)?;

    let ran1 = psd_range(&(&i + b1), tol);
    let ker_wstar = Subspace::span(&null_space(&w.adjoint(), tol), tol);
    let p_sub = subspace_meet(&ker_wstar, &ran1, tol)?;
    let p = p_sub.projector();

    let e1 = energy_ambient(&forms.s1);
    let gap_root = psd_sqrt(&gap, tol)?;
    let root1 = psd_sqrt(&hermitize(&(&i + b1)), tol)?;
    let p_gap = gap_range.projector();
    let mut norm_gap_residual = 0.0f64;
    let mut norm_p_residual = 0.0f64;
    let q = ran1.basis();
    for j in 0..q.ncols() {
        let g = q.columns(j, 1).into_owned();
        let x = &gap_root * &g;
        let lhs = (x.adjoint() * &e1 * &x)[(0, 0)].re;
        let rhs = 2.0 * (&p_gap * &g).norm_squared();
        norm_gap_residual = norm_gap_residual.max((lhs - rhs).abs());
        let pg = &p * &g;
        let y = &root1 * &pg;
        let lhs = (y.adjoint() * &e1 * &y)[(0, 0)].re;
        norm_p_residual = norm_p_residual.max((lhs - 2.0 * pg.norm_squared()).abs());
    }

    Ok(New0Verdict { items: [item1, item2, item3, item4], w, pi, p, norm_gap_residual, norm_p_residual })
}

#[derive(Debug, Clone, Copy)]
pub struct ApproxVerdict {
    pub appr1: bool,
    pub appr2: bool,
    pub dorth2: bool,
    pub max_distance: f64,
}

impl ApproxVerdict {
    pub fn agree(&self) -> bool {
        self.appr1 == self.appr2 && self.appr2 == self.dorth2
    }
}

/// Approximation property and its two range reformulations.
pub fn approx_verdict(b0: &CMatrix, b1: &CMatrix, tol: &TolerancePolicy) -> Result<ApproxVerdict> {
    let n0 = new0_verdict(b0, b1, tol)?;
    if !n0.all() {
        return Err(ExtError::PreconditionFailed("the form restriction conditions fail".into()));
    }
    let forms = pair_forms(b0, b1, tol)?;
    let (appr1, max_distance) = approximation_holds(&forms.s0, &forms.s1, tol)?;

    let i = identity(b0.nrows());
    let root1 = psd_sqrt(&hermitize(&(&i + b1)), tol)?;
    let ker_wstar = Subspace::span(&null_space(&n0.w.adjoint(), tol), tol);
    let lifted = ker_wstar.image(&root1, tol);
    let appr2 = trivially_meet(&psd_range(&(&i - b1), tol), &lifted, tol)?;

    let comp = energy_complement(&forms.s0, &forms.s1, tol);
    let dorth2 = trivially_meet(forms.s1_inv.domain(), &comp, tol)?;
    Ok(ApproxVerdict { appr1, appr2, dorth2, max_distance })
}

/// The four equivalent conditions of the two-sided restriction theorem.
pub fn thmnew_verdict(b0: &CMatrix, b1: &CMatrix, tol: &TolerancePolicy) -> Result<[bool; 4]> {
    let forms = pair_forms(b0, b1, tol)?;
    let i = identity(b0.nrows());
    let r01 = form_restriction_check(&forms.s0, &forms.s1, tol);
    let r10 = form_restriction_check(&forms.s1_inv, &forms.s0_inv, tol);
    let item1 = r01 && approximation_holds(&forms.s0, &forms.s1, tol)?.0;
    let item2 = r10 && approximation_holds(&forms.s1_inv, &forms.s0_inv, tol)?.0;
    let item3 = r01 && r10;
    let gap = psd_range(&(b1 - b0), tol);
    let item4 = trivially_meet(&psd_range(&(&i + b0), tol), &gap, tol)?
        && trivially_meet(&psd_range(&(&i - b1), tol), &gap, tol)?;
    Ok([item1, item2, item3, item4])
}

#[derive(Debug, Clone, Copy)]
pub struct MainVerdict {
    pub main_ok: bool,
    pub nonnegpair_ok: bool,
    /// Ordering, kernel and the two range clauses.
    pub main_clauses: [bool; 4],
    /// Graph meet and the two form restrictions.
    pub nonnegpair_clauses: [bool; 3],
    /// Range-meet reformulations through the extreme pair.
    pub lower_equivalent: bool,
    pub upper_equivalent: bool,
}

/// Conditions on `(B0, B1)` and on their Cayley inverses, evaluated independently.
pub fn main_verdict(
    b: &HermitianContraction,
    b0: &CMatrix,
    b1: &CMatrix,
    tol: &TolerancePolicy,
) -> Result<MainVerdict> {
    for bt in [b0, b1] {
        if !b.is_sc_extension(bt, tol) {
            return Err(ExtError::NotExtension(b.extension_residual(bt)));
        }
    }
    let ext = extreme_extensions(b, tol)?;
    let i = identity(b0.nrows());
    let gap = hermitize(&(b1 - b0));
    let gap_range = psd_range(&gap, tol);
    let ordered = psd_order(b0, b1, tol)?;
    let kernel = Subspace::span(&null_space(&gap, tol), tol).same_as(b.dom(), tol);
    let lower = trivially_meet(&gap_range, &psd_range(&(b0 - &ext.b_mu), tol), tol)?;
    let upper = trivially_meet(&gap_range, &psd_range(&(&ext.b_max - b1), tol), tol)?;
    let main_clauses = [ordered, kernel, lower, upper];

    let s = b.symmetric_relation(tol);
    let r0 = cayley_inverse(b0, tol)?;
    let r1 = cayley_inverse(b1, tol)?;
    let meet = r0.meet(&r1, tol)?.same_as(&s, tol);
    let forms = pair_forms(b0, b1, tol)?;
    let nonnegpair_clauses = [
        meet,
        form_restriction_check(&forms.s0, &forms.s1, tol),
        form_restriction_check(&forms.s1_inv, &forms.s0_inv, tol),
    ];

    let lower_alt = trivially_meet(&psd_range(&(&i + b0), tol), &gap_range, tol)?;
    let upper_alt = trivially_meet(&psd_range(&(&i - b1), tol), &gap_range, tol)?;
    Ok(MainVerdict {
        main_ok: main_clauses.iter().all(|&x| x),
        nonnegpair_ok: nonnegpair_clauses.iter().all(|&x| x),
        main_clauses,
        nonnegpair_clauses,
        lower_equivalent: lower_alt == lower,
        upper_equivalent: upper_alt == upper,
    })
}

/// Everything known about a pair, in one record.
#[derive(Debug, Clone)]
pub struct PairVerdict {
    pub new0: New0Verdict,
    pub approx: Option<ApproxVerdict>,
    pub thmnew: [bool; 4],
    pub main: Option<MainVerdict>,
    pub gap_dim: usize,
}

impl PairVerdict {
    /// Every family of equivalent conditions carries one boolean.
    pub fn consistent(&self) -> bool {
        self.new0.agree()
            && self.approx.is_none_or(|a| a.agree())
            && self.thmnew.iter().all(|&x| x == self.thmnew[0])
            && self.main.is_none_or(|m| m.main_ok == m.nonnegpair_ok && m.lower_equivalent && m.upper_equivalent)
    }
}

pub fn pair_verdict(
    b: Option<&HermitianContraction>,
    b0: &CMatrix,
    b1: &CMatrix,
    tol: &TolerancePolicy,
) -> Result<PairVerdict> {
    let new0 = new0_verdict(b0, b1, tol)?;
    let approx = if new0.all() { Some(approx_verdict(b0, b1, tol)?) } else { None };
    let thmnew = thmnew_verdict(b0, b1, tol)?;
    let main = match b {
        Some(b) => Some(main_verdict(b, b0, b1, tol)?),
        None => None,
    };
    Ok(PairVerdict { new0, approx, thmnew, main, gap_dim: rank(&(b1 - b0), tol) })
}

/// Random pair `Z0 <= Z1` of d x d contractions.
fn random_z_pair<R: Rng>(rng: &mut R, d: usize, kind: usize) -> (CMatrix, CMatrix) {
    let i = identity(d);
    let z1 = if kind == 2 { i.clone() } else { random::sc_matrix(rng, d, -1.0, 1.0) };
    if kind == 1 {
        return (-&i, z1);
    }
    let root = crate::numeric::psd_sqrt(&hermitize(&(&i + &z1)), &TolerancePolicy::default())
        .expect("I + Z1 is PSD");
    let eigs: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
    let p = random::hermitian_with_spectrum(rng, &eigs);
    let z0 = hermitize(&(&z1 - &root * p * &root));
    (z0, z1)
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    pub trials: usize,
    pub extreme_ok: bool,
    /// Trial indices whose pair satisfies the conditions without being the extreme pair.
    pub counterexamples: Vec<usize>,
    pub vacuous: bool,
}

fn trial_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64)
}

/// Random interval pairs must fail the conditions unless they are the extreme pair.
pub fn uniqueness_scan(
    b: &HermitianContraction,
    trials: usize,
    seed: u64,
    tol: &TolerancePolicy,
) -> Result<ScanReport> {
    let ext = extreme_extensions(b, tol)?;
    let extreme_ok = main_verdict(b, &ext.b_mu, &ext.b_max, tol)?.main_ok;
    let d = ext.gap_range(tol).dim();
    if d == 0 {
        return Ok(ScanReport { trials: 0, extreme_ok, counterexamples: vec![], vacuous: true });
    }
    let hits: Vec<Option<usize>> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = random::rng(trial_seed(seed, k));
            let (z0, z1) = random_z_pair(&mut rng, d, k % 4);
            let b0 = interval_element(&ext, &z0, tol).ok()?;
            let b1 = interval_element(&ext, &z1, tol).ok()?;
            let dist = (&b0 - &ext.b_mu).norm().max((&b1 - &ext.b_max).norm());
            let v = main_verdict(b, &b0, &b1, tol).ok()?;
            (v.main_ok && dist > 1e-8).then_some(k)
        })
        .collect();
    Ok(ScanReport { trials, extreme_ok, counterexamples: hits.into_iter().flatten().collect(), vacuous: false })
}

/// Labelled pairs for the equivalence ledger of one instance.
pub fn ledger_pairs(
    b: &HermitianContraction,
    seed: u64,
    count: usize,
    tol: &TolerancePolicy,
) -> Result<Vec<(String, CMatrix, CMatrix)>> {
    let ext = extreme_extensions(b, tol)?;
    let mut out = vec![("extreme".to_string(), ext.b_mu.clone(), ext.b_max.clone())];
    let d = ext.gap_range(tol).dim();
    let mut rng = random::rng(seed);
    if d > 0 {
        for k in 0..count {
            let (z0, z1) = random_z_pair(&mut rng, d, k % 4);
            out.push((
                format!("interval-{k}"),
                interval_element(&ext, &z0, tol)?,
                interval_element(&ext, &z1, tol)?,
            ));
        }
        out.push(("lower-mid".into(), ext.b_mu.clone(), interval_element(&ext, &CMatrix::zeros(d, d), tol)?));
    }
    Ok(out)
}

/// Ordered pair with `I + B0 = X (I - P) X`, `X = (I+B1)^{1/2}`, `P` an orthogonal projection.
///
/// When `approximating`, `P` lives in the eigenspace of `B1` for the eigenvalue 1.
pub fn conforming_pair(seed: u64, n: usize, approximating: bool) -> (CMatrix, CMatrix) {
    let mut rng = random::rng(seed);
    let tol = TolerancePolicy::default();
    let k = rng.random_range(1..=n.max(2) - 1).min(n);
    let mut eigs: Vec<f64> = (0..n).map(|_| rng.random_range(-0.9..0.9)).collect();
    let u = random::unitary(&mut rng, n);
    let p = if approximating {
        for e in eigs.iter_mut().take(k) {
            *e = 1.0;
        }
        let j = rng.random_range(1..=k);
        let cols = u.columns(0, k) * random::frame(&mut rng, k, j);
        &cols * cols.adjoint()
    } else {
        let f = random::frame(&mut rng, n, k);
        &f * f.adjoint()
    };
    let b1 = hermitize(&(&u * crate::numeric::diag_real(&eigs) * u.adjoint()));
    let x = psd_sqrt(&hermitize(&(identity(n) + &b1)), &tol).expect("PSD");
    let b0 = hermitize(&(&b1 - &x * p * &x));
    (b0, b1)
}

/// Generic ordered pair of selfadjoint contractions.
pub fn generic_pair(seed: u64, n: usize) -> (CMatrix, CMatrix) {
    let mut rng = random::rng(seed);
    let (z0, z1) = random_z_pair(&mut rng, n, 0);
    (z0, z1)
}

#[derive(Debug, Clone)]
pub struct CounterexampleDiagnostics {
    /// `dim(ran X^{1/2} ∩ M)`.
    pub dim_xroot_meet_m: usize,
    /// `dim(ran(I-Y)^{1/2} ∩ ran(Y-X)^{1/2})`.
    pub dim_upper_meet: usize,
    /// `dim(ran X ∩ ran Y)`.
    pub dim_ranx_meet_rany: usize,
    /// Smallest principal angle between the dominant spectral halves of `F` and `G`.
    pub min_angle: f64,
    /// `‖F : G‖`.
    pub parallel_sum_norm: f64,
    pub identity_residual: f64,
    pub ordered: bool,
}

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub x: CMatrix,
    pub y: CMatrix,
    pub z0: CMatrix,
    pub z1: CMatrix,
    pub diagnostics: CounterexampleDiagnostics,
}

fn dominant_half(a: &CMatrix) -> Subspace {
    let (_, vecs) = eigh(a);
    let n = a.nrows();
    let h = n.div_ceil(2);
    Subspace::span(&vecs.columns(n - h, h).into_owned(), &TolerancePolicy::default())
}

/// Finite truncation of the two-block construction from `F`, `G` on C^k.
pub fn counterexample_generator(f: &CMatrix, g: &CMatrix, tol: &TolerancePolicy) -> Result<Counterexample> {
    let k = f.nrows();
    if rank(f, tol) < k || rank(g, tol) < k {
        return Err(ExtError::KernelViolation("F and G must be injective".into()));
    }
    crate::numeric::check_psd(f, tol)?;
    crate::numeric::check_psd(g, tol)?;
    let nf = norm2(f);
    if nf >= 1.0 {
        return Err(ExtError::KernelViolation(format!("‖F‖ = {nf} must be below 1")));
    }
    let ik = identity(k);
    let f2 = hermitize(&(f * f));
    let x = block_diag(&f2, &(&ik - &f2));
    let m = Subspace::span(&vstack(g, &ik), tol);
    let i = identity(2 * k);
    let root = psd_sqrt(&hermitize(&(&i - &x)), tol)?;
    let pm = m.projector();
    let y = hermitize(&(&x + &root * &pm * &root));
    let z0 = hermitize(&(x.scale(2.0) - &i));
    let z1 = hermitize(&(y.scale(2.0) - &i));
    let defining = hermitize(&(&root * &pm * &root));
    let identity_residual = (&y - &x - &defining).norm();
    let ordered = psd_order(&z0, &z1, tol)?;

    let dim_xroot_meet_m = subspace_meet(&psd_range(&x, tol), &m, tol)?.dim();
    let dim_upper_meet = subspace_meet(&psd_range(&(&i - &y), tol), &psd_range(&(&y - &x), tol), tol)?.dim();
    let dim_ranx_meet_rany = subspace_meet(&psd_range(&x, tol), &psd_range(&y, tol), tol)?.dim();
    let angles = principal_angles(&dominant_half(f), &dominant_half(g))?;
    let diagnostics = CounterexampleDiagnostics {
        dim_xroot_meet_m,
        dim_upper_meet,
        dim_ranx_meet_rany,
        min_angle: angles[0],
        parallel_sum_norm: norm2(&parallel_sum(f, g, tol)?),
        identity_residual,
        ordered,
    };
    Ok(Counterexample { x, y, z0, z1, diagnostics })
}

/// `F = diag(2^{-i})`, `G = Q diag(3^{-i}) Q*` with the size-n Fourier unitary `Q`.
pub fn canonical_fg(n: usize) -> (CMatrix, CMatrix) {
    let f = crate::numeric::diag_real(&(1..=n).map(|i| 0.5f64.powi(i as i32)).collect::<Vec<_>>());
    let g0 = crate::numeric::diag_real(&(1..=n).map(|i| (1.0 / 3.0f64).powi(i as i32)).collect::<Vec<_>>());
    let q = CMatrix::from_fn(n, n, |j, k| {
        let t = -2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64;
        C64::from_polar(1.0 / (n as f64).sqrt(), t)
    });
    (f, hermitize(&(&q * g0 * q.adjoint())))
}
