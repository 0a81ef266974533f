use extlab_core::boundary::boundary_suite;
use extlab_core::contractions::{
    extreme_extensions, interval_element, novrav_check, sh2_holds, shorted_operator, ExtremePair,
};
use extlab_core::numeric::{identity, norm2};
use extlab_core::pairs::{canonical_fg, counterexample_generator, ledger_pairs, pair_verdict, uniqueness_scan};
use extlab_core::qfun::{
    adth_residual, class_report, inv11_residual, lower_kernel_trivial, moebius_check, nden_verdict, LimitProtocol,
    QKind, QPair,
};
use extlab_core::{CMatrix, Result as CoreResult, TolerancePolicy, C64};
use serde_json::{json, Value};

use crate::config::{Check, Function, ResolvedInstance, ScenarioConfig};
use crate::error::Result;
use crate::report::{Environment, Record, ReportDocument, Verdict};

/// `[[re, im], ...]` rows.
pub fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    json!(rows)
}

struct Ctx<'a> {
    inst: &'a ResolvedInstance,
    tol: TolerancePolicy,
    seed: u64,
    proto: LimitProtocol,
    q_samples: Vec<C64>,
    calq_samples: Vec<C64>,
    trials: usize,
}

impl Ctx<'_> {
    fn extreme(&self) -> CoreResult<ExtremePair> {
        extreme_extensions(&self.inst.contraction, &self.tol)
    }
}

fn close(tol: &TolerancePolicy, r: f64) -> bool {
    tol.close(r, 1.0)
}

/// Runs the requested suites in config order; a suite error becomes a failed record.
pub fn run_scenario(cfg: &ScenarioConfig, env_seed: Option<&str>) -> Result<ReportDocument> {
    let seed = cfg.effective_seed(env_seed)?;
    let tol = cfg.tolerances.policy()?;
    let inst = cfg.resolve_instance(seed, &tol)?;
    let margin = cfg.grids.margin;
    let (q_samples, calq_samples) = if cfg.grids.is_empty() {
        (
            vec![C64::new(3.0, 0.0), C64::new(-2.5, 0.0), C64::new(0.5, 1.0), C64::new(-0.3, -2.0)],
            vec![C64::new(-2.0, 0.0), C64::new(-0.5, 0.0), C64::new(1.0, 1.0), C64::new(-3.0, 0.5)],
        )
    } else {
        let pts = cfg.grids.points()?;
        let pick = |k: QKind| pts.iter().copied().filter(|&z| Function::Q(k).admits(z, margin)).collect::<Vec<_>>();
        (pick(QKind::Q0), pick(QKind::CalQ0))
    };
    let ctx = Ctx {
        inst: &inst,
        tol,
        seed,
        proto: LimitProtocol::default(),
        q_samples,
        calq_samples,
        trials: cfg.scan_trials,
    };
    let mut records = Vec::new();
    for check in &cfg.checks {
        let out = match check {
            Check::Shorted => shorted_suite(&ctx),
            Check::Pairs => pairs_suite(&ctx),
            Check::Qfun => qfun_suite(&ctx),
            Check::Boundary => boundary_records(&ctx),
            Check::UniquenessScan => scan_suite(&ctx),
            Check::Asymptotic4 { sizes } => asymptotic_suite(&ctx, sizes),
        };
        match out {
            Ok(mut r) => records.append(&mut r),
            Err(e) => records.push(Record::new(check.name(), "-", Verdict::Failed, None, json!({ "error": e.to_string() }))),
        }
    }
    Ok(ReportDocument {
        environment: Environment {
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            instance: inst.label.clone(),
            tolerances: tol,
        },
        records,
    })
}

fn shorted_suite(ctx: &Ctx) -> CoreResult<Vec<Record>> {
    let t = &ctx.tol;
    let p = ctx.extreme()?;
    let n = p.b_mu.nrows();
    let i = identity(n);
    let lower = norm2(&shorted_operator(&(&i + &p.b_mu), &p.defect, t)?);
    let upper = norm2(&shorted_operator(&(&i - &p.b_max), &p.defect, t)?);
    let r = lower.max(upper);
    let sh2 = sh2_holds(&(&i + &p.b_max), &p.defect, t)? && sh2_holds(&(&i - &p.b_mu), &p.defect, t)?;
    let d = p.gap_range(t).dim();
    let mid = interval_element(&p, &CMatrix::zeros(d, d), t)?;
    let (nu, nl) = novrav_check(&p, &mid, t)?;
    Ok(vec![
        Record::new(
            "shorted.extreme_pair",
            "shormat1",
            Verdict::from_bool(close(t, r)),
            Some(r),
            json!({ "lower_residual": lower, "upper_residual": upper, "gap_dim": d }),
        ),
        Record::new("shorted.sh2", "Sh2", Verdict::from_bool(sh2), None, json!({ "holds": sh2 })),
        Record::new(
            "shorted.novrav",
            "novrav",
            Verdict::from_bool(nu && nl),
            None,
            json!({ "upper": nu, "lower": nl, "element": "Z = 0" }),
        ),
    ])
}

fn pairs_suite(ctx: &Ctx) -> CoreResult<Vec<Record>> {
    let t = &ctx.tol;
    let b = &ctx.inst.contraction;
    let p = ctx.extreme()?;
    let v = pair_verdict(Some(b), &p.b_mu, &p.b_max, t)?;
    let main = v.main.expect("contraction supplied");
    let ok = v.new0.all() && main.main_ok && v.consistent();
    let norm_r = v.new0.norm_gap_residual.max(v.new0.norm_p_residual);
    let mut inconsistent = Vec::new();
    let ledger = ledger_pairs(b, ctx.seed, 8, t)?;
    for (name, b0, b1) in &ledger {
        if !pair_verdict(Some(b), b0, b1, t)?.consistent() {
            inconsistent.push(name.clone());
        }
    }
    Ok(vec![
        Record::new(
            "pairs.extreme",
            "MAIN",
            Verdict::from_bool(ok),
            None,
            json!({
                "new0": v.new0.items,
                "thmnew": v.thmnew,
                "main_clauses": main.main_clauses,
                "nonnegpair_clauses": main.nonnegpair_clauses,
                "gap_dim": v.gap_dim,
            }),
        ),
        Record::new(
            "pairs.norm",
            "norm",
            Verdict::from_bool(close(t, norm_r)),
            Some(norm_r),
            json!({ "gap_form": v.new0.norm_gap_residual, "projection_form": v.new0.norm_p_residual }),
        ),
        Record::new(
            "pairs.ledger",
            "new0",
            Verdict::from_bool(inconsistent.is_empty()),
            None,
            json!({ "pairs": ledger.len(), "inconsistent": inconsistent }),
        ),
    ])
}

fn class_records(ctx: &Ctx, pair: &QPair, kernel_trivial: bool) -> CoreResult<Vec<Record>> {
    let mut out = Vec::new();
    for (kind, anchor) in [(QKind::Q0, "PROP"), (QKind::Q1, "PROP1"), (QKind::CalQ0, "klass0"), (QKind::CalQ1, "klass1")] {
        let rep = class_report(pair, kind, &ctx.proto, &ctx.tol)?;
        let props: serde_json::Map<String, Value> = rep
            .properties
            .iter()
            .map(|p| (p.name.clone(), json!({ "holds": p.holds, "measured": p.measured })))
            .collect();
        let fourth = rep.properties.iter().find(|p| p.name.ends_with(".4"));
        let rest = rep.properties.iter().filter(|p| !p.name.ends_with(".4")).all(|p| p.holds);
        out.push(Record::new(
            &format!("qfun.{}", kind.name()),
            anchor,
            Verdict::from_bool(rest),
            None,
            json!({ "profile": rep.profile(), "properties": props }),
        ));
        if let Some(p4) = fourth {
            // Property 4 must match ker(I + B0) = {0}; it fails in the nondense finite model.
            let verdict = match (p4.holds == kernel_trivial, p4.holds) {
                (false, _) => Verdict::Failed,
                (true, h) => Verdict::infinite_clause(h),
            };
            out.push(Record::new(
                &format!("qfun.{}", p4.name),
                anchor,
                verdict,
                None,
                json!({ "holds": p4.holds, "measured": p4.measured, "lower_kernel_trivial": kernel_trivial }),
            ));
        }
    }
    Ok(out)
}

fn qfun_suite(ctx: &Ctx) -> CoreResult<Vec<Record>> {
    let t = &ctx.tol;
    let p = ctx.extreme()?;
    let pair = QPair::from_extreme(&p, t)?;
    let inv = inv11_residual(&pair, &ctx.q_samples)?;
    let adth = adth_residual(&pair, &ctx.calq_samples)?;
    let mo = moebius_check(&pair, &ctx.calq_samples, t)?;
    let mut out = vec![
        Record::new("qfun.inv11", "inv11", Verdict::from_bool(close(t, inv)), Some(inv), json!({ "samples": ctx.q_samples.len() })),
        Record::new("qfun.adth", "adth", Verdict::from_bool(close(t, adth)), Some(adth), json!({ "samples": ctx.calq_samples.len() })),
        Record::new(
            "qfun.moebius",
            "preobras",
            Verdict::from_bool(mo.holds(t)),
            Some(mo.preobras_residual.max(mo.cq01_residual)),
            json!({ "preobras": mo.preobras_residual, "cq01": mo.cq01_residual }),
        ),
    ];
    let kernel_trivial = lower_kernel_trivial(&p.b_mu, t);
    out.extend(class_records(ctx, &pair, kernel_trivial)?);
    let nd = nden_verdict(&ctx.inst.contraction, &p.b_mu, &p.b_max, &ctx.proto, t)?;
    out.push(Record::new(
        "qfun.nden",
        "nden",
        Verdict::from_bool(nd.agree()),
        None,
        json!({ "items": nd.items(), "vacuous": nd.vacuous, "residue": matrix_json(&nd.residue) }),
    ));
    Ok(out)
}

fn boundary_records(ctx: &Ctx) -> CoreResult<Vec<Record>> {
    let t = &ctx.tol;
    let b = &ctx.inst.contraction;
    let (b0, b1) = match &ctx.inst.pair {
        Some(pair) => pair.clone(),
        None => {
            let p = ctx.extreme()?;
            (p.b_mu, p.b_max)
        }
    };
    let s = boundary_suite(b, &b0, &b1, &ctx.proto, ctx.seed, t)?;
    let c = |r: f64| close(t, r);
    let field_r = s.field.roundtrip_residual.max(s.field.gzxi_residual);
    let g1_r = s.gamma1.gg_residual.max(s.gamma1.gam10_residual);
    let w = &s.weyl;
    let weyl_r = [w.qwg_residual, w.nevan_residual, w.symmetry_residual, w.eigen_residual].into_iter().fold(0.0, f64::max);
    let t1_r = s.t1.t1_residual.max(s.t1.m_minus_one_residual).max(s.t1.congruence_residual);
    let m = &s.main;
    let main_r = m.symmetry_residual.max(m.dom_form_residual);
    Ok(vec![
        Record::new(
            "boundary.model",
            "decomp11",
            Verdict::from_bool(s.model.holds(t)),
            Some(s.model.lemma_residual),
            json!({ "l2_sum": s.model.l2_sum, "l2_overlap": s.model.l2_overlap, "adjoint_pairs": s.model.adjoint_pairs }),
        ),
        Record::new(
            "boundary.gamma0",
            "gz",
            Verdict::from_bool(s.gamma0.holds(t)),
            Some(s.gamma0.kernel_residual),
            json!({ "surjective": s.gamma0.surjective, "kernel_is_form_domain": s.gamma0.kernel_is_form_domain }),
        ),
        Record::new("boundary.gamma0_field", "gzxi", Verdict::from_bool(c(field_r)), Some(field_r), json!({})),
        Record::new(
            "boundary.gamma0_slim",
            "GFIELD",
            Verdict::infinite_clause(s.field.slim_vanishes),
            None,
            json!({ "limit": s.field.slim_limit }),
        ),
        Record::new(
            "boundary.diff",
            "diff",
            Verdict::from_bool(c(s.diff_residual) && s.w_min_eig >= t.psd_floor),
            Some(s.diff_residual),
            json!({ "w_min_eig": s.w_min_eig }),
        ),
        Record::new(
            "boundary.gamma1",
            "GG",
            Verdict::from_bool(s.gamma1.holds(t)),
            Some(g1_r),
            json!({ "kernel_dim": s.gamma1.kernel_dim, "pd_min_eig": s.gamma1.pd_min_eig }),
        ),
        Record::new(
            "boundary.weyl",
            "QWG",
            Verdict::from_bool(w.holds(t)),
            Some(weyl_r),
            json!({ "m_minus_one": matrix_json(&s.m_minus_one), "im_min_eig": w.im_min_eig, "section_gap": w.section_gap }),
        ),
        Record::new("boundary.t1", "T1", Verdict::from_bool(s.t1.holds(t)), Some(t1_r), json!({ "x0": matrix_json(&s.t1.x0) })),
        Record::new(
            "boundary.main_transform",
            "A",
            Verdict::from_bool(m.holds(t)),
            Some(main_r),
            json!({ "selfadjoint": m.selfadjoint, "nonnegative": m.nonnegative, "graph_s": m.graph_s, "mul_matches": m.mul_matches }),
        ),
        Record::new("boundary.extr", "EXTR", Verdict::from_bool(m.extr_holds(t)), Some(m.extr_value), json!({})),
        Record::new(
            "boundary.mt_boundary_summand",
            "MT",
            Verdict::infinite_clause(m.boundary_dom_dim == 0 && m.boundary_ran_dim == 0),
            None,
            json!({ "dom_dim": m.boundary_dom_dim, "ran_dim": m.boundary_ran_dim }),
        ),
        Record::new(
            "boundary.mt_base_space",
            "MT",
            Verdict::infinite_clause(m.base_dom_dim == 0 && m.base_ran_dim == 0),
            None,
            json!({ "dom_dim": m.base_dom_dim, "ran_dim": m.base_ran_dim }),
        ),
        Record::new(
            "boundary.compressed_resolvent",
            "A",
            Verdict::from_bool(c(s.resolvent_residual)),
            Some(s.resolvent_residual),
            json!({}),
        ),
        Record::new(
            "boundary.green",
            "greenid",
            Verdict::from_bool(s.green.green_holds(t) && s.green.positive(t)),
            Some(s.green.green_residual),
            json!({ "omega_min": s.green.omega_min }),
        ),
        Record::new(
            "boundary.descallpos",
            "descallpos",
            Verdict::from_bool(s.descallpos.green_holds(t) && s.descallpos.positive(t)),
            Some(s.descallpos.green_residual),
            json!({ "omega_min": s.descallpos.omega_min }),
        ),
        Record::new(
            "boundary.recoordination",
            "weyl",
            Verdict::from_bool(c(s.recoordination_residual)),
            Some(s.recoordination_residual),
            json!({}),
        ),
    ])
}

fn scan_suite(ctx: &Ctx) -> CoreResult<Vec<Record>> {
    let r = uniqueness_scan(&ctx.inst.contraction, ctx.trials, ctx.seed, &ctx.tol)?;
    Ok(vec![Record::new(
        "uniqueness_scan",
        "MAIN",
        Verdict::from_bool(r.extreme_ok && r.counterexamples.is_empty()),
        None,
        json!({ "trials": r.trials, "extreme_ok": r.extreme_ok, "counterexamples": r.counterexamples, "vacuous": r.vacuous }),
    )])
}

fn asymptotic_suite(ctx: &Ctx, sizes: &[usize]) -> CoreResult<Vec<Record>> {
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    let mut ok = true;
    let mut angles: Vec<(usize, f64)> = Vec::new();
    for &n in sizes {
        let (f, g) = canonical_fg(n);
        let cx = counterexample_generator(&f, &g, &ctx.tol)?;
        let d = &cx.diagnostics;
        worst = worst.max(d.identity_residual);
        ok &= d.ordered && close(&ctx.tol, d.identity_residual);
        angles.push((n, d.min_angle));
        rows.push(json!({
            "n": n,
            "min_angle": d.min_angle,
            "parallel_sum_norm": d.parallel_sum_norm,
            "dim_xroot_meet_m": d.dim_xroot_meet_m,
            "dim_upper_meet": d.dim_upper_meet,
            "dim_ranx_meet_rany": d.dim_ranx_meet_rany,
        }));
    }
    angles.sort_by_key(|a| a.0);
    angles.dedup_by_key(|a| a.0);
    let decreasing = angles.windows(2).all(|w| w[1].1 < w[0].1);
    Ok(vec![Record::new(
        "asymptotic4",
        "Zpair",
        Verdict::from_bool(ok && decreasing),
        Some(worst),
        json!({ "sizes": rows, "angles_decreasing": decreasing }),
    )])
}
