use std::io::Write;

use extlab_core::boundary::{build_gamma1, build_model, canonical_gamma0, weyl_eval};
use extlab_core::contractions::extreme_extensions;
use extlab_core::qfun::QPair;
use extlab_core::{CMatrix, TolerancePolicy, C64};

use crate::config::{Function, Ray, ResolvedInstance};
use crate::error::{CliError, Result};

/// `start:stop:count[:log]` for a real ray, `z:re,im;re,im;...` for complex points, empty for none.
pub fn parse_grid(spec: &str) -> Result<Vec<C64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(vec![]);
    }
    let bad = |m: &str| CliError::GridSpec(format!("`{spec}`: {m}"));
    if let Some(list) = spec.strip_prefix("z:") {
        return list
            .split(';')
            .filter(|s| !s.trim().is_empty())
            .map(|p| {
                let (re, im) = p.split_once(',').ok_or_else(|| bad("complex points are `re,im`"))?;
                let f = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
                Ok(C64::new(f(re)?, f(im)?))
            })
            .collect();
    }
    let parts: Vec<&str> = spec.split(':').collect();
    if !(3..=4).contains(&parts.len()) || (parts.len() == 4 && parts[3] != "log") {
        return Err(bad("expected start:stop:count[:log]"));
    }
    let f = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
    let ray = Ray {
        start: f(parts[0])?,
        stop: f(parts[1])?,
        count: parts[2].trim().parse().map_err(|_| bad("count must be an unsigned integer"))?,
        log: parts.len() == 4,
    };
    Ok(ray.points()?.into_iter().map(|x| C64::new(x, 0.0)).collect())
}

/// One matrix per sample point.
pub fn evaluate(
    inst: &ResolvedInstance,
    function: Function,
    points: &[C64],
    margin: f64,
    tol: &TolerancePolicy,
) -> Result<Vec<CMatrix>> {
    for &z in points {
        function.check(z, margin)?;
    }
    if points.is_empty() {
        return Ok(vec![]);
    }
    let b = &inst.contraction;
    match function {
        Function::Q(kind) => {
            let pair = QPair::from_extreme(&extreme_extensions(b, tol)?, tol)?;
            Ok(points.iter().map(|&z| pair.eval(kind, z)).collect::<extlab_core::Result<_>>()?)
        }
        Function::Weyl => {
            let (b0, b1) = match &inst.pair {
                Some(p) => p.clone(),
                None => {
                    let p = extreme_extensions(b, tol)?;
                    (p.b_mu, p.b_max)
                }
            };
            let model = build_model(b, &b0, &b1, tol)?;
            let (tr, _) = build_gamma1(&model, &canonical_gamma0(&model))?;
            Ok(points.iter().map(|&z| weyl_eval(&model, &tr, z)).collect::<extlab_core::Result<_>>()?)
        }
    }
}

/// Columns `lambda_re, lambda_im`, then `entry_ij_re, entry_ij_im` in row-major order.
pub fn write_csv<W: Write>(out: W, dim: usize, points: &[C64], values: &[CMatrix]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["lambda_re".to_string(), "lambda_im".to_string()];
    for i in 0..dim {
        for j in 0..dim {
            header.push(format!("entry_{i}{j}_re"));
            header.push(format!("entry_{i}{j}_im"));
        }
    }
    w.write_record(&header)?;
    for (z, m) in points.iter().zip(values) {
        let mut row = vec![z.re.to_string(), z.im.to_string()];
        for i in 0..dim {
            for j in 0..dim {
                row.push(m[(i, j)].re.to_string());
                row.push(m[(i, j)].im.to_string());
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Size of the matrices a function returns on this instance.
pub fn value_dim(inst: &ResolvedInstance, function: Function, tol: &TolerancePolicy) -> Result<usize> {
    let p = extreme_extensions(&inst.contraction, tol)?;
    Ok(match (function, &inst.pair) {
        (Function::Weyl, Some((b0, b1))) => extlab_core::numeric::rank(&(b1 - b0), tol),
        _ => p.gap_range(tol).dim(),
    })
}

pub fn emit_curve<W: Write>(
    inst: &ResolvedInstance,
    function: Function,
    points: &[C64],
    margin: f64,
    tol: &TolerancePolicy,
    out: W,
) -> Result<()> {
    let values = evaluate(inst, function, points, margin, tol)?;
    let dim = match values.first() {
        Some(m) => m.nrows(),
        None => value_dim(inst, function, tol)?,
    };
    write_csv(out, dim, points, &values)
}
