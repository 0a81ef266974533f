//! Q-functions of a Hermitian contraction and of a nonnegative symmetric relation.

use rand::Rng;

use crate::contractions::{c_a, simple_part, ExtremePair, HermitianContraction};
use crate::error::{ExtError, Result};
use crate::numeric::{
    eigh, hermitize, identity, inverse, max_eig, min_eig, norm2, psd_sqrt, rank, range_basis,
    singular_values, solve, subspace_meet, CMatrix, Subspace, TolerancePolicy, C64,
};
use crate::pairs::new0_verdict;
use crate::relations::{cayley_inverse, LinearRelation};

fn scaled_identity(n: usize, s: C64) -> CMatrix {
    identity(n).map(|x| x * s)
}

fn spectrum_hit(z: C64) -> ExtError {
    ExtError::SpectrumHit { re: z.re, im: z.im }
}

/// `V diag(f(e)) V*` for real eigenvalues and a complex scalar function.
fn spectral_apply(vals: &[f64], vecs: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let mut scaled = vecs.clone();
    for (j, &e) in vals.iter().enumerate() {
        let s = f(e);
        for i in 0..vecs.nrows() {
            scaled[(i, j)] *= s;
        }
    }
    scaled * vecs.adjoint()
}

/// Eigen-decomposed selfadjoint relation: operator part on the carrier plus a multivalued part.
#[derive(Debug, Clone)]
struct SpectralRelation {
    vals: Vec<f64>,
    /// Eigenvectors of the operator part in ambient coordinates.
    vecs: CMatrix,
    mul_proj: CMatrix,
}

impl SpectralRelation {
    fn new(r: &LinearRelation, tol: &TolerancePolicy) -> Result<Self> {
        let parts = r.parts(tol)?;
        let (vals, v) = eigh(&parts.op_part);
        Ok(Self { vals, vecs: parts.carrier.basis() * v, mul_proj: parts.mul.projector() })
    }

    fn check(&self, z: C64) -> Result<()> {
        if self.vals.iter().any(|&e| (C64::new(e, 0.0) - z).norm() < f64::MIN_POSITIVE.sqrt()) {
            return Err(spectrum_hit(z));
        }
        Ok(())
    }

    fn resolvent(&self, z: C64) -> Result<CMatrix> {
        self.check(z)?;
        Ok(spectral_apply(&self.vals, &self.vecs, |e| 1.0 / (C64::new(e, 0.0) - z)))
    }

    /// `I + (z+1)(S - z)^{-1} = (S + 1)(S - z)^{-1}`, free of cancellation.
    fn shift_factor(&self, z: C64) -> Result<CMatrix> {
        self.check(z)?;
        let carrier = spectral_apply(&self.vals, &self.vecs, |e| (e + 1.0) / (C64::new(e, 0.0) - z));
        Ok(carrier + &self.mul_proj)
    }
}

/// Ordered pair `B0 <= B1` with the data every Q-function of the pair needs.
#[derive(Debug, Clone)]
pub struct QPair {
    b0: CMatrix,
    b1: CMatrix,
    root: CMatrix,
    /// Orthonormal basis of `N = cran(B1 - B0)`.
    nb: CMatrix,
    eig0: (Vec<f64>, CMatrix),
    eig1: (Vec<f64>, CMatrix),
    s0: LinearRelation,
    s1: LinearRelation,
    sp0: SpectralRelation,
    sp1: SpectralRelation,
    tol: TolerancePolicy,
}

/// Which function of the pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QKind {
    Q0,
    Q1,
    CalQ0,
    CalQ1,
}

impl QKind {
    pub fn name(self) -> &'static str {
        match self {
            QKind::Q0 => "q0",
            QKind::Q1 => "q1",
            QKind::CalQ0 => "calq0",
            QKind::CalQ1 => "calq1",
        }
    }

    /// `Q0`, `Q1` live off `[-1,1]`; the others off `[0, inf)`.
    pub fn admits(self, z: C64, tol: &TolerancePolicy) -> bool {
        let m = tol.eq_abs_tol;
        if z.im.abs() >= m {
            return true;
        }
        match self {
            QKind::Q0 | QKind::Q1 => z.re.abs() >= 1.0 + m,
            QKind::CalQ0 | QKind::CalQ1 => z.re <= -m,
        }
    }
}

impl QPair {
    pub fn new(b0: &CMatrix, b1: &CMatrix, tol: &TolerancePolicy) -> Result<Self> {
        if !crate::numeric::psd_order(b0, b1, tol)? {
            return Err(ExtError::OrderViolation);
        }
        let gap = hermitize(&(b1 - b0));
        let root = psd_sqrt(&gap, tol)?;
        let nb = range_basis(&gap, tol).basis().clone();
        let s0 = cayley_inverse(b0, tol)?;
        let s1 = cayley_inverse(b1, tol)?;
        Ok(Self {
            b0: hermitize(b0),
            b1: hermitize(b1),
            root,
            nb,
            eig0: eigh(b0),
            eig1: eigh(b1),
            sp0: SpectralRelation::new(&s0, tol)?,
            sp1: SpectralRelation::new(&s1, tol)?,
            s0,
            s1,
            tol: *tol,
        })
    }

    pub fn from_extreme(p: &ExtremePair, tol: &TolerancePolicy) -> Result<Self> {
        Self::new(&p.b_mu, &p.b_max, tol)
    }

    pub fn b0(&self) -> &CMatrix {
        &self.b0
    }

    pub fn b1(&self) -> &CMatrix {
        &self.b1
    }

    /// `(B1 - B0)^{1/2}`.
    pub fn gap_root(&self) -> &CMatrix {
        &self.root
    }

    pub fn gap_basis(&self) -> &CMatrix {
        &self.nb
    }

    pub fn gap_dim(&self) -> usize {
        self.nb.ncols()
    }

    pub fn space_dim(&self) -> usize {
        self.b0.nrows()
    }

    /// Cayley inverses `S0`, `S1`.
    pub fn relations(&self) -> (&LinearRelation, &LinearRelation) {
        (&self.s0, &self.s1)
    }

    /// `I + (z+1)(S_k - z)^{-1}` for `k = 0` or `k = 1` (`upper`).
    pub fn shift_factor(&self, upper: bool, z: C64) -> Result<CMatrix> {
        if upper { self.sp1.shift_factor(z) } else { self.sp0.shift_factor(z) }
    }

    /// `(S_k - z)^{-1}` from the eigen-decomposed operator part.
    pub fn resolvent(&self, upper: bool, z: C64) -> Result<CMatrix> {
        if upper { self.sp1.resolvent(z) } else { self.sp0.resolvent(z) }
    }

    fn guard(&self, kind: QKind, z: C64) -> Result<()> {
        if kind.admits(z, &self.tol) {
            Ok(())
        } else {
            Err(spectrum_hit(z))
        }
    }

    fn compress(&self, m: &CMatrix) -> CMatrix {
        self.nb.adjoint() * &self.root * m * &self.root * &self.nb
    }

    fn contraction_q(&self, upper: bool, lambda: C64) -> Result<CMatrix> {
        let (vals, vecs) = if upper { &self.eig1 } else { &self.eig0 };
        if vals.iter().any(|&e| (C64::new(e, 0.0) - lambda).norm() < f64::MIN_POSITIVE.sqrt()) {
            return Err(spectrum_hit(lambda));
        }
        let res = spectral_apply(vals, vecs, |e| 1.0 / (C64::new(e, 0.0) - lambda));
        let sign = if upper { -1.0 } else { 1.0 };
        Ok(self.compress(&res) + scaled_identity(self.gap_dim(), C64::new(sign, 0.0)))
    }

    /// `[(B1-B0)^{1/2}(B0-l)^{-1}(B1-B0)^{1/2} + I]` on `N`.
    pub fn q0(&self, lambda: C64) -> Result<CMatrix> {
        self.guard(QKind::Q0, lambda)?;
        self.contraction_q(false, lambda)
    }

    /// `[(B1-B0)^{1/2}(B1-l)^{-1}(B1-B0)^{1/2} - I]` on `N`.
    pub fn q1(&self, lambda: C64) -> Result<CMatrix> {
        self.guard(QKind::Q1, lambda)?;
        self.contraction_q(true, lambda)
    }

    fn gamma_field(&self, upper: bool, lambda: C64) -> Result<CMatrix> {
        let sp = if upper { &self.sp1 } else { &self.sp0 };
        Ok(sp.shift_factor(lambda)? * &self.root * &self.nb)
    }

    /// `gamma0(l) = (I + (l+1)(S0 - l)^{-1}) (B1-B0)^{1/2}` on `N`.
    pub fn gamma0(&self, lambda: C64) -> Result<CMatrix> {
        self.guard(QKind::CalQ0, lambda)?;
        self.gamma_field(false, lambda)
    }

    pub fn gamma1(&self, lambda: C64) -> Result<CMatrix> {
        self.guard(QKind::CalQ0, lambda)?;
        self.gamma_field(true, lambda)
    }

    fn calq(&self, upper: bool, lambda: C64) -> Result<CMatrix> {
        let g = self.gamma_field(upper, lambda)?;
        let body = self.nb.adjoint() * &self.root * g;
        let sign = if upper { 1.0 } else { -1.0 };
        Ok(scaled_identity(self.gap_dim(), C64::new(sign, 0.0)) + body.map(|x| x * (lambda + 1.0) / 2.0))
    }

    pub fn calq0(&self, lambda: C64) -> Result<CMatrix> {
        self.guard(QKind::CalQ0, lambda)?;
        self.calq(false, lambda)
    }

    pub fn calq1(&self, lambda: C64) -> Result<CMatrix> {
        self.guard(QKind::CalQ1, lambda)?;
        self.calq(true, lambda)
    }

    pub fn eval(&self, kind: QKind, lambda: C64) -> Result<CMatrix> {
        match kind {
            QKind::Q0 => self.q0(lambda),
            QKind::Q1 => self.q1(lambda),
            QKind::CalQ0 => self.calq0(lambda),
            QKind::CalQ1 => self.calq1(lambda),
        }
    }
}

/// One evaluation of `(Q0, Q1)`.
pub fn q_pair_eval(pair: &QPair, lambda: C64) -> Result<(CMatrix, CMatrix)> {
    Ok((pair.q0(lambda)?, pair.q1(lambda)?))
}

#[derive(Debug, Clone)]
pub struct CalqSample {
    pub calq0: CMatrix,
    pub calq1: CMatrix,
    pub gamma0: CMatrix,
    pub gamma1: CMatrix,
}

pub fn calq_pair_eval(pair: &QPair, lambda: C64) -> Result<CalqSample> {
    Ok(CalqSample {
        calq0: pair.calq0(lambda)?,
        calq1: pair.calq1(lambda)?,
        gamma0: pair.gamma0(lambda)?,
        gamma1: pair.gamma1(lambda)?,
    })
}

/// `max ||F G + I||` over both orders and all samples.
fn product_residual(f: impl Fn(C64) -> Result<CMatrix>, g: impl Fn(C64) -> Result<CMatrix>, samples: &[C64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in samples {
        let a = f(z)?;
        let b = g(z)?;
        let i = identity(a.nrows());
        worst = worst.max((&a * &b + &i).norm()).max((&b * &a + &i).norm());
    }
    Ok(worst)
}

/// Residual of `Q0 Q1 = Q1 Q0 = -I`.
pub fn inv11_residual(pair: &QPair, samples: &[C64]) -> Result<f64> {
    product_residual(|z| pair.q0(z), |z| pair.q1(z), samples)
}

/// Residual of `calQ0 calQ1 = calQ1 calQ0 = -I`.
pub fn adth_residual(pair: &QPair, samples: &[C64]) -> Result<f64> {
    product_residual(|z| pair.calq0(z), |z| pair.calq1(z), samples)
}

/// Residual of `calQ_k(l) - calQ_k(z)* = (l - conj z)/2 gamma_k(z)* gamma_k(l)`.
pub fn calq_identity_residual(pair: &QPair, samples: &[C64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &l in samples {
        for &z in samples {
            for upper in [false, true] {
                let (ql, qz) = if upper { (pair.calq1(l)?, pair.calq1(z)?) } else { (pair.calq0(l)?, pair.calq0(z)?) };
                let (gl, gz) = if upper { (pair.gamma1(l)?, pair.gamma1(z)?) } else { (pair.gamma0(l)?, pair.gamma0(z)?) };
                let rhs = (gz.adjoint() * gl).map(|x| x * (l - z.conj()) / 2.0);
                worst = worst.max((ql - qz.adjoint() - rhs).norm());
            }
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct MoebiusReport {
    /// Resolvent transport for `B0` and `B1`.
    pub preobras_residual: f64,
    /// `calQ_k(l) = -Q_k((1-l)/(1+l))`.
    pub cq01_residual: f64,
    pub samples: usize,
}

impl MoebiusReport {
    pub fn holds(&self, tol: &TolerancePolicy) -> bool {
        tol.close(self.preobras_residual, 1.0) && tol.close(self.cq01_residual, 1.0)
    }
}

/// Checks the resolvent transport between `B` and `S` and the identity linking both Q-families.
pub fn moebius_check(pair: &QPair, samples: &[C64], tol: &TolerancePolicy) -> Result<MoebiusReport> {
    let n = pair.space_dim();
    let mut pre = 0.0f64;
    let mut cq = 0.0f64;
    for &lam in samples {
        if !QKind::CalQ0.admits(lam, tol) || (lam + 1.0).norm() < tol.eq_abs_tol {
            return Err(spectrum_hit(lam));
        }
        let mu = (1.0 - lam) / (1.0 + lam);
        for (b, s) in [(&pair.b0, &pair.s0), (&pair.b1, &pair.s1)] {
            let lhs = solve(&(b - scaled_identity(n, mu)), &identity(n), tol).map_err(|_| spectrum_hit(mu))?;
            let rs = s.resolvent(lam, tol)?;
            let inner = identity(n) + rs.map(|x| x * 2.0 / (1.0 + mu));
            let rhs = inner.map(|x| -x / (1.0 + mu));
            pre = pre.max((lhs - rhs).norm());
        }
        cq = cq.max((pair.calq0(lam)? + pair.q0(mu)?).norm());
        cq = cq.max((pair.calq1(lam)? + pair.q1(mu)?).norm());
    }
    Ok(MoebiusReport { preobras_residual: pre, cq01_residual: cq, samples: samples.len() })
}

/// Geometric sampling `t = 2^{-k}` toward a limit point, with a log-log slope over the tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitProtocol {
    pub k_min: u32,
    pub k_max: u32,
    /// Number of trailing points used for the slope fit.
    pub fit: usize,
    /// Finite point standing in for `|lambda| -> infinity` in the value limits at infinity.
    pub far: f64,
}

impl Default for LimitProtocol {
    fn default() -> Self {
        Self { k_min: 5, k_max: 28, fit: 8, far: 1e6 }
    }
}

impl LimitProtocol {
    pub fn steps(&self) -> Vec<f64> {
        (self.k_min..=self.k_max).map(|k| 2f64.powi(-(k as i32))).collect()
    }

    /// Least-squares slope of `ln v` against `ln t` over the trailing window.
    pub fn slope(&self, seq: &[(f64, f64)]) -> f64 {
        let tail = &seq[seq.len().saturating_sub(self.fit)..];
        let pts: Vec<(f64, f64)> = tail.iter().map(|&(t, v)| (t.ln(), v.abs().max(f64::MIN_POSITIVE).ln())).collect();
        let m = pts.len() as f64;
        if pts.len() < 2 {
            return 0.0;
        }
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }

    /// `v(t) -> 0`: exact zeros, or a positive leading power.
    pub fn vanishes(&self, seq: &[(f64, f64)]) -> bool {
        match seq.last() {
            None => true,
            Some(&(_, v)) if v.abs() <= f64::MIN_POSITIVE => true,
            Some(_) => self.slope(seq) >= 0.5,
        }
    }

    /// `v(t) -> +infinity`: positive, increasing over the window, negative leading power.
    pub fn diverges(&self, seq: &[(f64, f64)]) -> bool {
        let tail = &seq[seq.len().saturating_sub(self.fit)..];
        if tail.is_empty() {
            return true;
        }
        let positive = tail.iter().all(|p| p.1 > 0.0);
        let increasing = tail.windows(2).all(|w| w[1].1 >= w[0].1);
        positive && increasing && self.slope(seq) <= -0.5
    }
}

/// Verdict on one property with the sampled evidence behind it.
#[derive(Debug, Clone)]
pub struct PropertyVerdict {
    pub name: String,
    pub holds: bool,
    /// Last value of the surrogate sequence (or the decisive sample).
    pub measured: f64,
    /// `(t, value)` pairs; for limits at infinity `t = 1/|x|`.
    pub sequence: Vec<(f64, f64)>,
}

impl PropertyVerdict {
    fn from_seq(name: &str, holds: bool, sequence: Vec<(f64, f64)>) -> Self {
        let measured = sequence.last().map(|p| p.1).unwrap_or(0.0);
        Self { name: name.into(), holds, measured, sequence }
    }
}

#[derive(Debug, Clone)]
pub struct ClassReport {
    pub kind: QKind,
    pub properties: Vec<PropertyVerdict>,
}

impl ClassReport {
    pub fn get(&self, name: &str) -> Option<&PropertyVerdict> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn holds(&self, name: &str) -> Option<bool> {
        self.get(name).map(|p| p.holds)
    }

    /// Verdicts of the numbered class properties, in order.
    pub fn profile(&self) -> Vec<bool> {
        let prefix = match self.kind {
            QKind::Q0 => "prop.",
            QKind::Q1 => "prop1.",
            QKind::CalQ0 => "klass0.",
            QKind::CalQ1 => "klass1.",
        };
        self.properties.iter().filter(|p| p.name.starts_with(prefix)).map(|p| p.holds).collect()
    }
}

/// Nonreal sample points for the Nevanlinna kernel.
pub fn kernel_points() -> Vec<C64> {
    vec![
        C64::new(0.3, 0.7),
        C64::new(-2.0, 0.5),
        C64::new(1.5, 2.0),
        C64::new(-0.5, 3.0),
        C64::new(4.0, 0.2),
    ]
}

/// Minimum eigenvalue of the kernel `[(F(z_i) - F(z_j)*)/(z_i - conj z_j)]` and the worst `F(conj z) - F(z)*`.
pub fn nevanlinna_kernel(f: impl Fn(C64) -> Result<CMatrix>, points: &[C64]) -> Result<(f64, f64, f64)> {
    let vals: Vec<CMatrix> = points.iter().map(|&z| f(z)).collect::<Result<_>>()?;
    let d = vals.first().map(|v| v.nrows()).unwrap_or(0);
    let m = points.len();
    let mut k = CMatrix::zeros(m * d, m * d);
    for i in 0..m {
        for j in 0..m {
            let blk = (&vals[i] - vals[j].adjoint()).map(|x| x / (points[i] - points[j].conj()));
            k.view_mut((i * d, j * d), (d, d)).copy_from(&blk);
        }
    }
    let mut sym = 0.0f64;
    for (&z, v) in points.iter().zip(&vals) {
        sym = sym.max((f(z.conj())? - v.adjoint()).norm());
    }
    let k = hermitize(&k);
    Ok((min_eig(&k), norm2(&k), sym))
}

fn herglotz_verdict(pair: &QPair, kind: QKind, tol: &TolerancePolicy) -> Result<PropertyVerdict> {
    let (m, scale, sym) = nevanlinna_kernel(|z| pair.eval(kind, z), &kernel_points())?;
    let holds = m >= tol.psd_threshold(scale) && tol.close(sym, scale);
    Ok(PropertyVerdict { name: "herglotz".into(), holds, measured: m, sequence: vec![(0.0, m), (1.0, sym)] })
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Sequence `t -> g(F(point(t)))` along the protocol steps.
fn sampled(
    pair: &QPair,
    kind: QKind,
    steps: &[f64],
    point: impl Fn(f64) -> f64,
    g: impl Fn(f64, &CMatrix) -> f64,
) -> Result<Vec<(f64, f64)>> {
    steps
        .iter()
        .map(|&t| {
            let x = point(t);
            Ok((t, g(x, &pair.eval(kind, real(x))?)))
        })
        .collect()
}

fn sign_verdict(pair: &QPair, kind: QKind, tol: &TolerancePolicy) -> Result<PropertyVerdict> {
    let mut seq = Vec::new();
    let mut holds = true;
    let rays: Vec<(f64, f64)> = match kind {
        // (point, expected sign)
        QKind::Q0 => (-6..=6).flat_map(|j| [(-1.0 - 2f64.powi(j), 1.0), (1.0 + 2f64.powi(j), 1.0)]).collect(),
        QKind::Q1 => (-6..=6).flat_map(|j| [(-1.0 - 2f64.powi(j), -1.0), (1.0 + 2f64.powi(j), -1.0)]).collect(),
        QKind::CalQ0 => (-6..=6).map(|j| (-(2f64.powi(j)), -1.0)).collect(),
        QKind::CalQ1 => (-6..=6).map(|j| (-(2f64.powi(j)), 1.0)).collect(),
    };
    for (x, s) in rays {
        let q = pair.eval(kind, real(x))?;
        if q.nrows() == 0 {
            continue;
        }
        let (vals, _) = eigh(&hermitize(&q));
        let worst = if s > 0.0 { vals[0] } else { -vals[vals.len() - 1] };
        holds &= worst > tol.rank_threshold(norm2(&q), 1);
        seq.push((x, worst));
    }
    let measured = seq.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(PropertyVerdict { name: "znak".into(), holds, measured, sequence: seq })
}

fn invertible_verdict(pair: &QPair, kind: QKind, name: &str, tol: &TolerancePolicy) -> Result<PropertyVerdict> {
    let mut pts = kernel_points();
    pts.extend((-6..=6).map(|j| real(-(2f64.powi(j)))));
    let mut seq = Vec::new();
    let mut holds = true;
    for (i, &z) in pts.iter().enumerate() {
        let q = pair.eval(kind, z)?;
        let s = singular_values(&q).last().copied().unwrap_or(f64::INFINITY);
        holds &= q.nrows() == 0 || rank(&q, tol) == q.nrows();
        seq.push((i as f64, s));
    }
    let measured = seq.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(PropertyVerdict { name: name.into(), holds, measured, sequence: seq })
}

fn value_at_infinity(pair: &QPair, kind: QKind, name: &str, target: f64, far: f64) -> Result<PropertyVerdict> {
    let d = pair.gap_dim();
    let want = scaled_identity(d, real(target));
    let mut seq = Vec::new();
    for z in [real(far), real(-far), C64::new(0.0, far)] {
        seq.push((1.0 / far, (pair.eval(kind, z)? - &want).norm()));
    }
    // deviation is O(1/|lambda|); allow 10 / |lambda|
    let holds = seq.iter().all(|p| p.1 <= 10.0 / far);
    let measured = seq.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(PropertyVerdict { name: name.into(), holds, measured, sequence: seq })
}

fn op_norm(_: f64, q: &CMatrix) -> f64 {
    norm2(q)
}

/// Per-property report for one function of the pair.
pub fn class_report(pair: &QPair, kind: QKind, proto: &LimitProtocol, tol: &TolerancePolicy) -> Result<ClassReport> {
    let steps = proto.steps();
    let mut props = vec![herglotz_verdict(pair, kind, tol)?];
    let min_e = |_: f64, q: &CMatrix| min_eig(&hermitize(q));
    let neg_max = |_: f64, q: &CMatrix| -max_eig(&hermitize(q));
    match kind {
        QKind::Q0 => {
            props.push(value_at_infinity(pair, kind, "prop.1", 1.0, proto.far)?);
            let s = sampled(pair, kind, &steps, |t| 1.0 + t, op_norm)?;
            props.push(PropertyVerdict::from_seq("prop.2", proto.vanishes(&s), s));
            let s = sampled(pair, kind, &steps, |t| -1.0 - t, min_e)?;
            props.push(PropertyVerdict::from_seq("prop.3", proto.diverges(&s), s));
        }
        QKind::Q1 => {
            props.push(value_at_infinity(pair, kind, "prop1.1", -1.0, proto.far)?);
            let s = sampled(pair, kind, &steps, |t| -1.0 - t, op_norm)?;
            props.push(PropertyVerdict::from_seq("prop1.2", proto.vanishes(&s), s));
            let s = sampled(pair, kind, &steps, |t| 1.0 + t, neg_max)?;
            props.push(PropertyVerdict::from_seq("prop1.3", proto.diverges(&s), s));
        }
        QKind::CalQ0 => {
            props.push(invertible_verdict(pair, kind, "klass0.1", tol)?);
            let s = sampled(pair, kind, &steps, |t| -t, op_norm)?;
            props.push(PropertyVerdict::from_seq("klass0.2", proto.vanishes(&s), s));
            let s = sampled(pair, kind, &steps, |t| -1.0 / t, neg_max)?;
            props.push(PropertyVerdict::from_seq("klass0.3", proto.diverges(&s), s));
            let s = sampled(pair, kind, &steps, |t| -1.0 / t, |x, q| norm2(q) / x.abs())?;
            props.push(PropertyVerdict::from_seq("klass0.4", proto.vanishes(&s), s));
        }
        QKind::CalQ1 => {
            props.push(invertible_verdict(pair, kind, "klass1.1", tol)?);
            let s = sampled(pair, kind, &steps, |t| -t, min_e)?;
            props.push(PropertyVerdict::from_seq("klass1.2", proto.diverges(&s), s));
            let s = sampled(pair, kind, &steps, |t| -1.0 / t, op_norm)?;
            props.push(PropertyVerdict::from_seq("klass1.3", proto.vanishes(&s), s));
            let s = sampled(pair, kind, &steps, |t| -1.0 / t, |x, q| -x * min_eig(&hermitize(q)))?;
            props.push(PropertyVerdict::from_seq("klass1.4", proto.diverges(&s), s));
        }
    }
    props.push(sign_verdict(pair, kind, tol)?);
    Ok(ClassReport { kind, properties: props })
}

/// `ker(I + B0) = {0}`.
pub fn lower_kernel_trivial(b0: &CMatrix, tol: &TolerancePolicy) -> bool {
    let n = b0.nrows();
    rank(&hermitize(&(identity(n) + b0)), tol) == n
}

#[derive(Debug, Clone)]
pub struct NdenVerdict {
    /// `(l+1) Q0(l) -> 0` as `l` increases to `-1`.
    pub vanishing_residue: bool,
    /// `(Q1(l) f, f)/(1+l)` diverges for every `f != 0`.
    pub divergent_ratio: bool,
    pub kernel_trivial: bool,
    /// Measured `lim (l+1) Q0(l)` on `N`.
    pub residue: CMatrix,
    /// Gap space `N` is zero.
    pub vacuous: bool,
}

impl NdenVerdict {
    pub fn items(&self) -> [bool; 3] {
        [self.vanishing_residue, self.divergent_ratio, self.kernel_trivial]
    }

    /// On a zero gap space the first two items hold vacuously and carry no information.
    pub fn agree(&self) -> bool {
        if self.vacuous {
            return self.vanishing_residue && self.divergent_ratio;
        }
        self.items().iter().all(|&x| x == self.kernel_trivial)
    }
}

/// The three conditions tied to `ker(I + B0)`.
pub fn nden_verdict(
    b: &HermitianContraction,
    b0: &CMatrix,
    b1: &CMatrix,
    proto: &LimitProtocol,
    tol: &TolerancePolicy,
) -> Result<NdenVerdict> {
    let q = b.dom().basis();
    if rank(&(q + b.action()), tol) < q.ncols() {
        return Err(ExtError::PreconditionFailed("ker(I + B) is nontrivial".into()));
    }
    if !b.is_sc_extension(b0, tol) || !b.is_sc_extension(b1, tol) {
        return Err(ExtError::PreconditionFailed("pair is not a pair of sc-extensions".into()));
    }
    if !new0_verdict(b0, b1, tol)?.all() {
        return Err(ExtError::PreconditionFailed("pair fails the restriction conditions".into()));
    }
    let pair = QPair::new(b0, b1, tol)?;
    let steps = proto.steps();
    let kernel_trivial = lower_kernel_trivial(b0, tol);
    let d = pair.gap_dim();
    if d == 0 {
        return Ok(NdenVerdict {
            vanishing_residue: true,
            divergent_ratio: true,
            kernel_trivial,
            residue: CMatrix::zeros(0, 0),
            vacuous: true,
        });
    }
    let mut res_seq = Vec::new();
    let mut ratio_seq = Vec::new();
    let mut residue = CMatrix::zeros(d, d);
    for &t in &steps {
        let lam = real(-1.0 - t);
        let q0 = pair.q0(lam)?;
        residue = q0.map(|x| x * (-t));
        res_seq.push((t, norm2(&residue)));
        let ratio = pair.q1(lam)?.map(|x| x / (-t));
        ratio_seq.push((t, min_eig(&hermitize(&ratio))));
    }
    Ok(NdenVerdict {
        vanishing_residue: proto.vanishes(&res_seq),
        divergent_ratio: proto.diverges(&ratio_seq),
        kernel_trivial,
        residue,
        vacuous: false,
    })
}

/// Samples of `Gamma(z)` and `Q(z)` built from a fixed bijection onto one defect subspace.
#[derive(Debug, Clone)]
pub struct GenericQ {
    pub points: Vec<C64>,
    pub gammas: Vec<CMatrix>,
    pub qs: Vec<CMatrix>,
    /// Worst residual of the gamma-field identity over point pairs.
    pub gg_residual: f64,
    /// Worst residual of `Q(z) - Q(w)* = (z - conj w) Gamma(w)* Gamma(z)`.
    pub q_residual: f64,
    /// Worst distance of `ran Gamma(z)` from the defect subspace at `z`.
    pub defect_residual: f64,
}

/// Gamma-field and Q-function of `S` generated by `st` and `gamma_z0`.
pub fn generic_gamma_q(
    s: &LinearRelation,
    st: &LinearRelation,
    gamma_z0: &CMatrix,
    z0: C64,
    c: &CMatrix,
    points: &[C64],
    tol: &TolerancePolicy,
) -> Result<GenericQ> {
    let d = gamma_z0.ncols();
    let defect = s.defect_subspace(z0, tol);
    if rank(gamma_z0, tol) != d || defect.dim() != d || !defect.contains_vectors(gamma_z0, tol) {
        return Err(ExtError::NotBijection);
    }
    crate::numeric::check_hermitian(c, tol)?;
    let base = c - (gamma_z0.adjoint() * gamma_z0).map(|x| x * C64::new(0.0, z0.im));
    let mut gammas = Vec::with_capacity(points.len());
    let mut resolvents = Vec::with_capacity(points.len());
    let mut qs = Vec::with_capacity(points.len());
    for &z in points {
        let r = st.resolvent(z, tol)?;
        let g = gamma_z0 + (&r * gamma_z0).map(|x| x * (z - z0));
        let q = &base + (gamma_z0.adjoint() * &g).map(|x| x * (z - z0.conj()));
        gammas.push(g);
        resolvents.push(r);
        qs.push(q);
    }
    let mut gg = 0.0f64;
    let mut qr = 0.0f64;
    let mut dr = 0.0f64;
    for (i, &z) in points.iter().enumerate() {
        let dz = s.defect_subspace(z, tol);
        if d > 0 {
            dr = dr.max(dz.residual(&gammas[i]) / (1.0 + gammas[i].norm()));
        }
        for (j, &w) in points.iter().enumerate() {
            let pred = &gammas[j] + (&resolvents[i] * &gammas[j]).map(|x| x * (z - w));
            gg = gg.max((&gammas[i] - pred).norm());
            let rhs = (gammas[j].adjoint() * &gammas[i]).map(|x| x * (z - w.conj()));
            qr = qr.max((&qs[i] - qs[j].adjoint() - rhs).norm());
        }
    }
    Ok(GenericQ { points: points.to_vec(), gammas, qs, gg_residual: gg, q_residual: qr, defect_residual: dr })
}

#[derive(Debug, Clone)]
pub struct SuscheReport {
    /// Recovered `Y = (-M(-1))^{1/2}`.
    pub y: CMatrix,
    /// `||U* U - I||` for the congruence `U = Y0 Y^{-1}`.
    pub unitary_residual: f64,
    /// Worst `||Y^{-1} M Y^{-1} - U* calQ0 U||` over the samples.
    pub max_residual: f64,
    /// `||Y^{-1} M(-1) Y^{-1} + I||`.
    pub normalization_residual: f64,
}

/// Round trip `M = Y0* calQ0 Y0`, `Y = (-M(-1))^{1/2}`, `Y^{-1} M Y^{-1}`.
pub fn susche_roundtrip(pair: &QPair, y0: &CMatrix, samples: &[C64], tol: &TolerancePolicy) -> Result<SuscheReport> {
    let d = pair.gap_dim();
    if y0.nrows() != d || y0.ncols() != d {
        return Err(ExtError::DimMismatch(format!("Y0 must be {d}x{d}")));
    }
    let m = |z: C64| -> Result<CMatrix> { Ok(y0.adjoint() * pair.calq0(z)? * y0) };
    let minus_m = hermitize(&(-m(real(-1.0))?));
    if d > 0 && min_eig(&minus_m) <= tol.rank_threshold(norm2(&minus_m), d) {
        return Err(ExtError::NotInverseStieltjesSample);
    }
    let y = psd_sqrt(&minus_m, tol)?;
    let yi = inverse(&y, tol)?;
    let u = y0 * &yi;
    let unitary_residual = (u.adjoint() * &u - identity(d)).norm();
    let mut max_residual = 0.0f64;
    for &z in samples {
        let rec = &yi * m(z)? * &yi;
        max_residual = max_residual.max((rec - u.adjoint() * pair.calq0(z)? * &u).norm());
    }
    let normalization_residual = (&yi * m(real(-1.0))? * &yi + identity(d)).norm();
    Ok(SuscheReport { y, unitary_residual, max_residual, normalization_residual })
}

#[derive(Debug, Clone)]
pub struct KreinOvcharenkoReport {
    /// `ran gamma_F(-a) = ran gamma_K(-a) = ran C_a^{1/2}` at every sampled `a`.
    pub ranges_agree: bool,
    /// `ran gamma(l)` lies in the defect subspace at `l`.
    pub defect_residual: f64,
    /// Gamma-field identities for `S_F` and `S_K`.
    pub gamma_residual: f64,
    /// Q-function identity of `Q_F^(0)`, `Q_K^(0)` against their gamma-fields.
    pub q_residual: f64,
    /// Variation in `l` of `Q_F^(0) - 2 calQ0` and `Q_K^(0) - 2 calQ1`.
    pub doubled_variation: f64,
    /// Value of that difference (the additive constant).
    pub constant: f64,
    /// Variation in `l` of the literal difference `Q_F^(0) - calQ0`.
    pub literal_variation: f64,
    /// `C_1 = B_M - B_mu`.
    pub c1_residual: f64,
}

/// Friedrichs/Krein gamma-fields and Q-functions of a nondense symmetric relation.
pub fn intro_kreinovch(
    s: &LinearRelation,
    extreme: &ExtremePair,
    a_samples: &[f64],
    l_samples: &[C64],
    tol: &TolerancePolicy,
) -> Result<KreinOvcharenkoReport> {
    let pair = QPair::from_extreme(extreme, tol)?;
    let (sf, sk) = pair.relations();
    let mut ranges_agree = true;
    for &a in a_samples {
        let ca = c_a(sf, sk, a, tol)?;
        let target = range_basis(&ca, tol);
        for g in [pair.gamma0(real(-a))?, pair.gamma1(real(-a))?] {
            ranges_agree &= Subspace::span(&g, tol).same_as(&target, tol);
        }
    }
    let c1 = c_a(sf, sk, 1.0, tol)?;
    let c1_residual = (c1 - &extreme.gap).norm();
    let qf = |l: C64| -> Result<CMatrix> { Ok(pair.calq0(l)?.map(|x| x * 2.0)) };
    let qk = |l: C64| -> Result<CMatrix> { Ok(pair.calq1(l)?.map(|x| x * 2.0)) };
    let mut defect_residual = 0.0f64;
    let mut gamma_residual = 0.0f64;
    let mut q_residual = 0.0f64;
    for &l in l_samples {
        let dl = s.defect_subspace(l, tol);
        let gfl = pair.gamma0(l)?;
        let gkl = pair.gamma1(l)?;
        if pair.gap_dim() > 0 {
            defect_residual = defect_residual.max(dl.residual(&gfl)).max(dl.residual(&gkl));
        }
        for &z in l_samples {
            let gfz = pair.gamma0(z)?;
            let gkz = pair.gamma1(z)?;
            let rf = pair.sp0.resolvent(l)?;
            let rk = pair.sp1.resolvent(l)?;
            gamma_residual = gamma_residual
                .max((&gfl - &gfz - (rf * &gfz).map(|x| x * (l - z))).norm())
                .max((&gkl - &gkz - (rk * &gkz).map(|x| x * (l - z))).norm());
            let lf = qf(l)? - qf(z)?.adjoint() - (gfz.adjoint() * &gfl).map(|x| x * (l - z.conj()));
            let lk = qk(l)? - qk(z)?.adjoint() - (gkz.adjoint() * &gkl).map(|x| x * (l - z.conj()));
            q_residual = q_residual.max(lf.norm()).max(lk.norm());
        }
    }
    let mut doubled_variation = 0.0f64;
    let mut literal_variation = 0.0f64;
    let mut constant = 0.0f64;
    if let Some(&l0) = l_samples.first() {
        let lit0 = qf(l0)? - pair.calq0(l0)?;
        for &l in l_samples {
            let df = qf(l)? - pair.calq0(l)?.map(|x| x * 2.0);
            let dk = qk(l)? - pair.calq1(l)?.map(|x| x * 2.0);
            constant = constant.max(df.norm()).max(dk.norm());
            literal_variation = literal_variation.max((qf(l)? - pair.calq0(l)? - &lit0).norm());
        }
        doubled_variation = constant;
    }
    Ok(KreinOvcharenkoReport {
        ranges_agree,
        defect_residual,
        gamma_residual,
        q_residual,
        doubled_variation,
        constant,
        literal_variation,
        c1_residual,
    })
}

/// `Q0` of the pair against `Q0` computed on the `B0`-invariant hull of `N`.
pub fn simple_part_residual(pair: &QPair, samples: &[C64], tol: &TolerancePolicy) -> Result<f64> {
    let n_sub = Subspace::from_orthonormal(pair.nb.clone(), tol)?;
    let (hull, comp) = simple_part(&pair.b0, &n_sub, tol);
    let v = hull.basis();
    let w = v.adjoint() * &pair.root * &pair.nb;
    let k = comp.nrows();
    let mut worst = 0.0f64;
    for &z in samples {
        let r = solve(&(&comp - scaled_identity(k, z)), &w, tol).map_err(|_| spectrum_hit(z))?;
        let q = w.adjoint() * r + identity(pair.gap_dim());
        worst = worst.max((q - pair.q0(z)?).norm());
    }
    Ok(worst)
}

/// Random points of `C \ [-1,1]` with margin, mixing real and nonreal samples.
pub fn samples_off_interval<R: Rng>(rng: &mut R, count: usize) -> Vec<C64> {
    (0..count)
        .map(|k| {
            if k % 3 == 0 {
                let x = rng.random_range(1.1..5.0);
                real(if rng.random_bool(0.5) { x } else { -x })
            } else {
                let im = rng.random_range(0.05..3.0);
                C64::new(rng.random_range(-4.0..4.0), if rng.random_bool(0.5) { im } else { -im })
            }
        })
        .collect()
}

/// Random points of `C \ [0, inf)` kept away from `-1`.
pub fn samples_off_halfline<R: Rng>(rng: &mut R, count: usize) -> Vec<C64> {
    (0..count)
        .map(|k| {
            if k % 3 == 0 {
                let x = rng.random_range(0.05..0.9);
                real(if rng.random_bool(0.5) { -x } else { -1.0 - 4.0 * x })
            } else {
                let im = rng.random_range(0.05..3.0);
                C64::new(rng.random_range(-5.0..5.0), if rng.random_bool(0.5) { im } else { -im })
            }
        })
        .collect()
}

/// Meet of `N` with `ran(I + B0)`; zero exactly when the first nden item can hold.
pub fn gap_meets_lower_range(pair: &QPair, tol: &TolerancePolicy) -> Result<Subspace> {
    let n_sub = Subspace::from_orthonormal(pair.nb.clone(), tol)?;
    let r = range_basis(&hermitize(&(identity(pair.space_dim()) + &pair.b0)), tol);
    subspace_meet(&n_sub, &r, tol)
}
