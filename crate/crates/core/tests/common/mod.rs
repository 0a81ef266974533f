#![allow(dead_code)]

pub mod oracle;

use std::time::{Duration, Instant};

use extlab_core::boundary::{
    boundary_suite, build_gamma1, build_model, canonical_gamma0, w_kernel, weyl_eval, BoundaryModel,
    BoundaryTriplet,
};
use extlab_core::contractions::{
    builtin_instance, extreme_extensions, interval_element, novrav_check, random_instance, sh2_holds,
    shorted_operator, HermitianContraction,
};
use extlab_core::forms::{form_of_relation, form_via_cayley, order_compare};
use extlab_core::numeric::{from_real, hermitize, identity, is_psd, norm2};
use extlab_core::pairs::{
    canonical_fg, conforming_pair, counterexample_generator, generic_pair, ledger_pairs, pair_verdict,
    uniqueness_scan,
};
use extlab_core::qfun::{
    adth_residual, class_report, inv11_residual, lower_kernel_trivial, moebius_check, nden_verdict,
    nevanlinna_kernel, kernel_points, samples_off_halfline, samples_off_interval, LimitProtocol, QKind, QPair,
};
use extlab_core::random::{frame, rng};
use extlab_core::relations::{cayley_inverse, CayleyImage};
use extlab_core::{CMatrix, ExtError, Subspace, TolerancePolicy, C64};
use oracle::{int, q, to_f64, Boundary2, Instance2, Q};
use rayon::prelude::*;

/// One acceptance line.
#[derive(Debug)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub max_residual: f64,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
    pub detail: String,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let budget = self.budget.map(|b| format!(" / budget {:.0}s", b.as_secs_f64())).unwrap_or_default();
        let mut s = format!(
            "[{verdict}] criterion {}: {} | max_residual {:.2e} | {:.2}s{budget} | {}",
            self.id,
            self.title,
            self.max_residual,
            self.elapsed.as_secs_f64(),
            self.detail
        );
        for f in self.failures.iter().take(5) {
            s.push_str(&format!("\n        failure: {f}"));
        }
        s
    }
}

fn finish(
    id: usize,
    title: &'static str,
    start: Instant,
    budget: Option<Duration>,
    max_residual: f64,
    detail: String,
    failures: Vec<String>,
) -> Outcome {
    let elapsed = start.elapsed();
    let in_budget = budget.is_none_or(|b| elapsed <= b);
    let mut failures = failures;
    if !in_budget {
        failures.push(format!("runtime {:.2}s over budget", elapsed.as_secs_f64()));
    }
    Outcome { id, title, passed: failures.is_empty(), max_residual, elapsed, budget, detail, failures }
}

pub fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn cq(x: Q) -> C64 {
    c(to_f64(x))
}

/// Collects `|library - oracle|` and `|oracle - literal|` comparisons.
#[derive(Default)]
struct Ledger {
    worst: f64,
    failures: Vec<String>,
    checks: usize,
}

impl Ledger {
    fn cmp(&mut self, what: &str, got: C64, want: C64, tol: f64) {
        let r = (got - want).norm();
        self.worst = self.worst.max(r);
        self.checks += 1;
        if !(r <= tol) {
            self.failures.push(format!("{what}: got {got}, expected {want} (|diff| {r:.2e})"));
        }
    }

    fn exact(&mut self, what: &str, got: Q, want: Q) {
        self.checks += 1;
        if got != want {
            self.failures.push(format!("{what}: oracle {got} differs from closed form {want}"));
        }
    }

    fn cmp_matrix(&mut self, what: &str, got: &CMatrix, want: &[[Q; 2]; 2], tol: f64) {
        for i in 0..2 {
            for j in 0..2 {
                self.cmp(&format!("{what}[{i}{j}]"), got[(i, j)], cq(want[i][j]), tol);
            }
        }
    }
}

/// Sign fixing the orientation of the gap basis against `e2`.
fn orientation(model: &BoundaryModel) -> f64 {
    model.pair().gap_basis()[(1, 0)].re.signum()
}

pub fn e3_triplet() -> (BoundaryModel, BoundaryTriplet) {
    let t = tol();
    let inst = builtin_instance("E3").unwrap();
    let (b0, b1) = inst.boundary_pair.unwrap();
    let model = build_model(&inst.contraction, &b0, &b1, &t).unwrap();
    let (tr, _) = build_gamma1(&model, &canonical_gamma0(&model)).unwrap();
    (model, tr)
}

pub fn criterion_1() -> Outcome {
    let start = Instant::now();
    let t = tol();
    let eps = 1e-9;
    let mut led = Ledger::default();

    let e1 = Instance2::new(int(0), int(0));
    let e2 = Instance2::new(int(0), q(1, 2));
    led.exact("E1 B_mu e2-entry", e1.b_mu[1][1], int(-1));
    led.exact("E1 B_M e2-entry", e1.b_max[1][1], int(1));
    led.exact("E2 B_mu e2-entry", e2.b_mu[1][1], q(-3, 4));
    led.exact("E2 B_M e2-entry", e2.b_max[1][1], q(3, 4));
    let sk = e2.s_k();
    for (i, j, want) in [(0, 0, q(4, 3)), (0, 1, q(-2, 3)), (1, 0, q(-2, 3)), (1, 1, q(1, 3))] {
        led.exact(&format!("E2 S_K[{i}{j}]"), sk[i][j], want);
    }

    let real_points: Vec<Q> = vec![int(2), int(-3), q(5, 2), q(-7, 4), int(9)];
    for &l in &real_points {
        led.exact("E1 Q0", e1.q0(l), (l - int(1)) / (l + int(1)));
        let closed = (l - int(1)) * (l + q(1, 4)) / ((l + int(1)) * (l - q(1, 4)));
        led.exact("E2 Q0", e2.q0(l), closed);
    }
    let half_points: Vec<Q> = vec![int(-2), q(-1, 2), int(-5), q(-3, 7), int(-11)];
    for &l in &half_points {
        led.exact("E2 calQ0", e2.calq0(l), l * (int(5) - int(3) * l) / (int(3) - int(5) * l));
    }

    for (name, oracle) in [("E1", &e1), ("E2", &e2)] {
        let b = builtin_instance(name).unwrap().contraction;
        let p = extreme_extensions(&b, &t).unwrap();
        led.cmp_matrix(&format!("{name} B_mu"), &p.b_mu, &oracle.b_mu, eps);
        led.cmp_matrix(&format!("{name} B_M"), &p.b_max, &oracle.b_max, eps);
        let pair = QPair::from_extreme(&p, &t).unwrap();
        for &l in &real_points {
            led.cmp(&format!("{name} Q0({l})"), pair.q0(cq(l)).unwrap()[(0, 0)], cq(oracle.q0(l)), eps);
        }
        for z in [C64::new(0.3, 1.0), C64::new(-2.0, -0.5), C64::new(4.0, 0.01)] {
            let closed = if name == "E1" {
                (z - 1.0) / (z + 1.0)
            } else {
                (z - 1.0) * (z + 0.25) / ((z + 1.0) * (z - 0.25))
            };
            led.cmp(&format!("{name} Q0({z})"), pair.q0(z).unwrap()[(0, 0)], closed, eps);
        }
        if name == "E2" {
            let s = form_of_relation(&cayley_inverse(&p.b_max, &t).unwrap(), &t).unwrap().ambient();
            led.cmp_matrix("E2 S_K", &s, &sk, eps);
            let lit = from_real(2, 2, &[4.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0, 1.0 / 3.0]);
            led.cmp("E2 S_K literal", c(norm2(&(&s - lit))), c(0.0), eps);
            for &l in &half_points {
                led.cmp(&format!("E2 calQ0({l})"), pair.calq0(cq(l)).unwrap()[(0, 0)], cq(oracle.calq0(l)), eps);
            }
            for z in [C64::new(0.0, 1.0), C64::new(2.0, -1.0)] {
                let closed = z * (5.0 - 3.0 * z) / (3.0 - 5.0 * z);
                led.cmp(&format!("E2 calQ0({z})"), pair.calq0(z).unwrap()[(0, 0)], closed, eps);
            }
        }
    }

    let bd = Boundary2::new(int(0), q(1, 2));
    let e2v = [int(0), int(1)];
    let half = [int(1), q(1, 2)];
    led.exact("E3 Gamma1 e2", bd.gamma1(&e2v), q(-4, 3));
    led.exact("E3 Gamma1 (1,1/2)", bd.gamma1(&half), q(4, 5));
    led.exact("E3 ker Gamma1", bd.gamma1_kernel(), q(11, 10));
    led.exact("E3 W(-1,-1)", bd.w_minus_one(), q(1, 3));
    led.exact("E3 M(-1)", bd.weyl(int(-1)), q(-4, 3));
    led.exact("E3 M(-2)", bd.weyl(int(-2)), q(-88, 39));
    led.exact("E3 Gamma0 row", bd.gamma0[0], q(-1, 2));

    let (model, tr) = e3_triplet();
    let s = orientation(&model);
    let g1 = tr.gamma1().unwrap().map(|x| x * s);
    let vec = |v: [Q; 2]| from_real(2, 1, &[to_f64(v[0]), to_f64(v[1])]);
    led.cmp("E3 Gamma1 e2", (&g1 * vec(e2v))[(0, 0)], cq(bd.gamma1(&e2v)), eps);
    led.cmp("E3 Gamma1 (1,1/2)", (&g1 * vec(half))[(0, 0)], cq(bd.gamma1(&half)), eps);
    let kernel = [int(1), bd.gamma1_kernel()];
    led.cmp("E3 Gamma1 on kernel", (&g1 * vec(kernel))[(0, 0)], c(0.0), eps);
    let g0 = tr.gamma0.map(|x| x * s);
    led.cmp("E3 Gamma0 e1", g0[(0, 0)], cq(bd.gamma0[0]), eps);
    led.cmp("E3 Gamma0 e2", g0[(0, 1)], cq(bd.gamma0[1]), eps);
    let w = w_kernel(&model, &tr, c(-1.0), c(-1.0)).unwrap()[(0, 0)];
    led.cmp("E3 W(-1,-1)", w, cq(bd.w_minus_one()), eps);
    for z in [int(-1), int(-2), q(-1, 3), int(-6)] {
        let m = weyl_eval(&model, &tr, cq(z)).unwrap()[(0, 0)];
        led.cmp(&format!("E3 M({z})"), m, cq(bd.weyl(z)), eps);
    }

    let detail = format!("{} comparisons against the rational oracle and closed forms", led.checks);
    finish(1, "worked-instance exactness (E1, E2, E3)", start, Some(Duration::from_secs(1)), led.worst, detail, led.failures)
}

/// `(n, domdim)` of the `k`-th random nondense instance with `n <= max_n`.
pub fn random_shape(k: u64, max_n: usize) -> (usize, usize) {
    let n = 2 + (k as usize % (max_n - 1));
    let domdim = 1 + (k as usize / (max_n - 1)) % (n - 1);
    (n, domdim)
}

struct InstanceCheck {
    worst: f64,
    failures: Vec<String>,
}

impl InstanceCheck {
    fn rel(&mut self, what: &str, residual: f64, scale: f64) {
        let r = residual / (1.0 + scale);
        self.worst = self.worst.max(r);
        if !(r <= 1e-8) {
            self.failures.push(format!("{what}: relative residual {r:.2e}"));
        }
    }

    fn flag(&mut self, what: &str, ok: bool) {
        if !ok {
            self.failures.push(what.to_string());
        }
    }
}

fn identity_suite(seed: u64) -> extlab_core::Result<InstanceCheck> {
    let t = tol();
    let (n, k) = random_shape(seed, 8);
    let b = random_instance(seed, n, k, &t)?;
    let p = extreme_extensions(&b, &t)?;
    let d = p.gap_range(&t).dim();
    let mut r = rng(seed ^ 0xA5A5);
    let z = extlab_core::random::sc_matrix(&mut r, d, -1.0, 1.0);
    let bt = interval_element(&p, &z, &t)?;
    let mid = interval_element(&p, &CMatrix::zeros(d, d), &t)?;
    let mut chk = InstanceCheck { worst: 0.0, failures: Vec::new() };

    for (name, m) in [("B_mu", &p.b_mu), ("B_M", &p.b_max), ("mid", &mid), ("Bt", &bt)] {
        let rel = cayley_inverse(m, &t)?;
        match rel.cayley_forward(&t)? {
            CayleyImage::Full(back) => chk.rel(&format!("cayley round trip {name}"), norm2(&(back - m)), norm2(m)),
            CayleyImage::Partial(_) => chk.flag(&format!("cayley round trip {name}: not selfadjoint"), false),
        }
        let fa = form_of_relation(&rel, &t)?;
        let fb = form_via_cayley(m, false, &t)?;
        chk.flag(&format!("form domains {name}"), fa.domain().same_as(fb.domain(), &t));
        chk.rel(&format!("form cross-implementation {name}"), norm2(&(fa.ambient() - fb.ambient())), norm2(&fa.ambient()));
        let fi = form_of_relation(&rel.inverse(&t), &t)?;
        let fj = form_via_cayley(m, true, &t)?;
        chk.flag(&format!("inverse form domains {name}"), fi.domain().same_as(fj.domain(), &t));
        chk.rel(&format!("inverse form {name}"), norm2(&(fi.ambient() - fj.ambient())), norm2(&fi.ambient()));
    }

    let i = identity(n);
    let ksub = Subspace::span(&frame(&mut r, n, n.div_ceil(2)), &t);
    for (name, s) in [("I+Bt", &i + &bt), ("I-Bt", &i - &bt)] {
        let s = hermitize(&s);
        match shorted_operator(&s, &ksub, &t) {
            Ok(sk) => {
                chk.flag(&format!("shorted maximality {name}"), is_psd(&hermitize(&(&s - &sk)), &t));
                chk.flag(&format!("Sh2 {name}"), sh2_holds(&s, &ksub, &t)?);
            }
            Err(e) => chk.flag(&format!("shorted {name}: {e}"), false),
        }
    }
    let rels = [cayley_inverse(&p.b_mu, &t)?, cayley_inverse(&bt, &t)?, cayley_inverse(&p.b_max, &t)?];
    for (a, bb) in [(0, 1), (1, 2), (1, 0), (2, 0)] {
        let v = order_compare(&rels[a], &rels[bb], &t)?;
        chk.flag(&format!("Douglas agreement ({a},{bb})"), v.agree());
    }
    let (up, lo) = novrav_check(&p, &bt, &t)?;
    chk.flag("novrav", up && lo);

    let pair = QPair::from_extreme(&p, &t)?;
    let off = samples_off_interval(&mut r, 30);
    let half = samples_off_halfline(&mut r, 30);
    chk.rel("inv11 products", inv11_residual(&pair, &off)?, 0.0);
    chk.rel("adth products", adth_residual(&pair, &half)?, 0.0);
    let mo = moebius_check(&pair, &half, &t)?;
    chk.rel("preobras", mo.preobras_residual, 0.0);
    chk.rel("cq01", mo.cq01_residual, 0.0);
    for kind in [QKind::Q0, QKind::Q1, QKind::CalQ0, QKind::CalQ1] {
        let (m, scale, sym) = nevanlinna_kernel(|z| pair.eval(kind, z), &kernel_points())?;
        chk.flag(&format!("Nevanlinna kernel {}", kind.name()), m >= t.psd_threshold(scale));
        chk.rel(&format!("Nevanlinna symmetry {}", kind.name()), sym, scale);
    }
    Ok(chk)
}

pub fn criterion_2() -> Outcome {
    let start = Instant::now();
    let results: Vec<(u64, extlab_core::Result<InstanceCheck>)> =
        (0..200u64).into_par_iter().map(|s| (s, identity_suite(s))).collect();
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (seed, res) in results {
        match res {
            Ok(chk) => {
                worst = worst.max(chk.worst);
                failures.extend(chk.failures.into_iter().map(|f| format!("seed {seed}: {f}")));
            }
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    let detail = "200 random instances, n in 2..=8, 30 samples per product identity".to_string();
    finish(2, "identity suites on random instances", start, Some(Duration::from_secs(60)), worst, detail, failures)
}

pub fn ledger_instances(count: u64) -> Vec<(String, HermitianContraction)> {
    let t = tol();
    let mut out: Vec<(String, HermitianContraction)> = ["E1", "E2"]
        .iter()
        .map(|n| (n.to_string(), builtin_instance(n).unwrap().contraction))
        .collect();
    for k in 0..count {
        let (n, d) = random_shape(k + 11, 6);
        out.push((format!("random:{k}:{n}:{d}"), random_instance(1000 + k, n, d, &t).unwrap()));
    }
    out
}

pub fn criterion_3() -> Outcome {
    let start = Instant::now();
    let t = tol();
    let mut failures = Vec::new();
    let mut evaluated = 0usize;
    for (name, b) in ledger_instances(20) {
        let pairs = ledger_pairs(&b, 7, 12, &t).unwrap();
        for (label, b0, b1) in pairs {
            match pair_verdict(Some(&b), &b0, &b1, &t) {
                Ok(v) if v.consistent() => evaluated += 1,
                Ok(v) => failures.push(format!("{name}/{label}: divergent verdicts {v:?}")),
                Err(e) => failures.push(format!("{name}/{label}: {e}")),
            }
        }
    }
    for seed in 0..20u64 {
        let n = 2 + (seed as usize % 5);
        for (label, (b0, b1)) in [
            ("conforming+", conforming_pair(seed, n, true)),
            ("conforming-", conforming_pair(seed, n, false)),
            ("generic", generic_pair(seed, n)),
        ] {
            match pair_verdict(None, &b0, &b1, &t) {
                Ok(v) if v.consistent() => evaluated += 1,
                Ok(_) => failures.push(format!("{label} seed {seed}: divergent verdicts")),
                Err(e) => failures.push(format!("{label} seed {seed}: {e}")),
            }
        }
    }
    let detail = format!("{evaluated} pairs evaluated, {} divergences", failures.len());
    finish(3, "equivalence ledger", start, None, 0.0, detail, failures)
}

pub fn criterion_4() -> Outcome {
    let start = Instant::now();
    let t = tol();
    let mut failures = Vec::new();
    let mut trials = 0usize;
    for (name, b) in ledger_instances(20) {
        match uniqueness_scan(&b, 100, 42, &t) {
            Ok(rep) => {
                trials += rep.trials;
                if !rep.extreme_ok {
                    failures.push(format!("{name}: extreme pair fails"));
                }
                if !rep.counterexamples.is_empty() {
                    failures.push(format!("{name}: {} non-extreme pairs pass", rep.counterexamples.len()));
                }
                if rep.trials < 100 && !rep.vacuous {
                    failures.push(format!("{name}: only {} trials", rep.trials));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    let detail = format!("22 instances, {trials} trials, no pair other than the extreme pair passes");
    finish(4, "finite-defect rigidity", start, None, 0.0, detail, failures)
}

pub fn criterion_5() -> Outcome {
    let start = Instant::now();
    let t = tol();
    let proto = LimitProtocol::default();
    let mut failures = Vec::new();
    let mut evaluated = 0usize;
    let mut skipped = 0usize;
    let mut worst = 0.0f64;
    for (name, b) in ledger_instances(20) {
        let nondense = b.dom().dim() < b.space_dim();
        for (label, b0, b1) in ledger_pairs(&b, 3, 8, &t).unwrap() {
            match nden_verdict(&b, &b0, &b1, &proto, &t) {
                Ok(v) => {
                    evaluated += 1;
                    if !v.agree() {
                        failures.push(format!("{name}/{label}: items disagree {:?}", v.items()));
                    }
                    if nondense && !v.vacuous && v.items().iter().any(|&x| x) {
                        failures.push(format!("{name}/{label}: items not uniformly false {:?}", v.items()));
                    }
                    if label == "extreme" && (name == "E1" || name == "E2") {
                        let want = if name == "E1" { -2.0 } else { -1.2 };
                        let r = (v.residue[(0, 0)] - want).norm();
                        worst = worst.max(r);
                        if r > 1e-6 {
                            failures.push(format!("{name}: residue {} expected {want}", v.residue[(0, 0)]));
                        }
                    }
                }
                Err(ExtError::PreconditionFailed(_)) => skipped += 1,
                Err(e) => failures.push(format!("{name}/{label}: {e}")),
            }
        }
    }
    let detail = format!(
        "{evaluated} conforming pairs agree and are false, {skipped} non-conforming pairs rejected; residues E1 -2, E2 -6/5"
    );
    finish(5, "nden consistency", start, None, worst, detail, failures)
}

pub fn criterion_6() -> Outcome {
    let start = Instant::now();
    let t = tol();
    let proto = LimitProtocol::default();
    let mut failures = Vec::new();
    let mut reports = 0usize;
    for (name, b) in ledger_instances(20) {
        let p = extreme_extensions(&b, &t).unwrap();
        let pair = QPair::from_extreme(&p, &t).unwrap();
        let predicate = lower_kernel_trivial(&p.b_mu, &t);
        for kind in [QKind::Q0, QKind::Q1, QKind::CalQ0, QKind::CalQ1] {
            let rep = match class_report(&pair, kind, &proto, &t) {
                Ok(r) => r,
                Err(e) => {
                    failures.push(format!("{name} {}: {e}", kind.name()));
                    continue;
                }
            };
            reports += 1;
            for prop in &rep.properties {
                let expected = if prop.name.ends_with(".4") { predicate } else { true };
                if prop.holds != expected {
                    failures.push(format!(
                        "{name} {} {}: {} (expected {expected}, measured {:.3e})",
                        kind.name(),
                        prop.name,
                        prop.holds,
                        prop.measured
                    ));
                }
            }
        }
    }
    let detail = format!("{reports} class reports; property 4 tracks ker(I+B0) = 0, which is false on every instance");
    finish(6, "class-report law", start, None, 0.0, detail, failures)
}

pub fn criterion_7() -> Outcome {
    let start = Instant::now();
    let t = tol();
    let proto = LimitProtocol::default();
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut cases: Vec<(String, HermitianContraction, CMatrix, CMatrix)> = Vec::new();
    let e3 = builtin_instance("E3").unwrap();
    let (b0, b1) = e3.boundary_pair.clone().unwrap();
    cases.push(("E3".into(), e3.contraction, b0, b1));
    for k in 0..20u64 {
        let (n, d) = random_shape(k + 3, 8);
        let b = random_instance(500 + k, n.max(3), d.min(n.max(3) - 1), &t).unwrap();
        let p = extreme_extensions(&b, &t).unwrap();
        cases.push((format!("random:{k}"), b, p.b_mu, p.b_max));
    }
    let mut base_dom = 0usize;
    let mut base_ran = 0usize;
    let mut ran_nonzero = 0usize;
    let mut bnd = 0usize;
    let mut slim_fail = 0usize;
    for (name, b, b0, b1) in &cases {
        match boundary_suite(b, b0, b1, &proto, 9, &t) {
            Ok(s) => {
                let r = s.max_residual();
                worst = worst.max(r);
                if r > 1e-8 || !s.core_holds(&t) {
                    failures.push(format!("{name}: identities fail (max residual {r:.2e})"));
                }
                if !s.main.extr_holds(&t) {
                    failures.push(format!("{name}: EXTR value {:.2e}", s.main.extr_value));
                }
                base_dom += s.main.base_dom_dim;
                base_ran += s.main.base_ran_dim;
                ran_nonzero += usize::from(s.main.base_ran_dim > 0);
                bnd += s.main.boundary_dom_dim + s.main.boundary_ran_dim;
                slim_fail += usize::from(!s.field.slim_vanishes);
                if s.main.base_dom_dim == 0 {
                    failures.push(format!("{name}: dom clause measured 0"));
                }
            }
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    let detail = format!(
        "E3 + 20 random nondense instances; infinite-dimensional clauses (base-space reading): \
         dim(dom A^(1/2) ∩ H) summed {base_dom} [expected-fail, nonzero on every instance], \
         dim(ran A^(1/2) ∩ H) summed {base_ran} [nonzero on {ran_nonzero}/21, zero on E3]; \
         boundary-summand reading: summed dimension {bnd}; s-lim Gamma0(x) = 0 fails on {slim_fail}/21 [expected-fail]"
    );
    finish(7, "boundary suite", start, None, worst, detail, failures)
}

pub fn criterion_8() -> Outcome {
    let start = Instant::now();
    let t = tol();
    let mut failures = Vec::new();
    let mut angles = Vec::new();
    let mut worst = 0.0f64;
    for n in [2usize, 4, 8, 16] {
        let (f, g) = canonical_fg(n);
        match counterexample_generator(&f, &g, &t) {
            Ok(cx) => {
                let d = &cx.diagnostics;
                angles.push(d.min_angle);
                worst = worst.max(d.identity_residual);
                if d.identity_residual > 1e-12 * (1.0 + norm2(&cx.y)) {
                    failures.push(format!("n = {n}: defining identity residual {:.2e}", d.identity_residual));
                }
                if !d.ordered {
                    failures.push(format!("n = {n}: Z pair not ordered"));
                }
            }
            Err(e) => failures.push(format!("n = {n}: {e}")),
        }
    }
    if !angles.windows(2).all(|w| w[1] < w[0]) {
        failures.push(format!("angles not decreasing: {angles:?}"));
    }
    let detail = format!(
        "minimal angles {}",
        angles.iter().map(|a| format!("{a:.3e}")).collect::<Vec<_>>().join(" > ")
    );
    finish(8, "truncation study of the canonical (F, G) family", start, Some(Duration::from_secs(10)), worst, detail, failures)
}
