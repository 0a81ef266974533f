use std::path::{Path, PathBuf};

use extlab_core::contractions::{builtin_instance, HermitianContraction};
use extlab_core::numeric::from_real;
use extlab_core::qfun::QKind;
use extlab_core::{CMatrix, Subspace, TolerancePolicy, C64};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const SEED_ENV: &str = "EXTLAB_SEED";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Mandatory for random instances; `EXTLAB_SEED` takes precedence.
    #[serde(default)]
    pub seed: Option<u64>,
    pub instance: InstanceSpec,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    #[serde(default)]
    pub grids: Grids,
    /// Trials of `uniqueness_scan`.
    #[serde(default = "default_trials")]
    pub scan_trials: usize,
}

fn default_trials() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum InstanceSpec {
    E1,
    E2,
    E3,
    #[serde(rename = "random")]
    Random { n: usize, domdim: usize },
    #[serde(rename = "file")]
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    Shorted,
    Pairs,
    Qfun,
    Boundary,
    UniquenessScan,
    Asymptotic4 { sizes: Vec<usize> },
}

impl Check {
    pub fn name(&self) -> &'static str {
        match self {
            Check::Shorted => "shorted",
            Check::Pairs => "pairs",
            Check::Qfun => "qfun",
            Check::Boundary => "boundary",
            Check::UniquenessScan => "uniqueness_scan",
            Check::Asymptotic4 { .. } => "asymptotic4",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub rank_rel_tol: Option<f64>,
    pub eq_abs_tol: Option<f64>,
    pub psd_floor: Option<f64>,
}

impl ToleranceOverrides {
    pub fn policy(&self) -> Result<TolerancePolicy> {
        let d = TolerancePolicy::default();
        let p = TolerancePolicy {
            rank_rel_tol: self.rank_rel_tol.unwrap_or(d.rank_rel_tol),
            eq_abs_tol: self.eq_abs_tol.unwrap_or(d.eq_abs_tol),
            psd_floor: self.psd_floor.unwrap_or(d.psd_floor),
        };
        p.validate().map_err(|e| CliError::Config(format!("tolerances: {e}")))?;
        Ok(p)
    }
}

/// Sample points for the Q-function identities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    /// Distance every sample keeps from the forbidden real sets.
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub rays: Vec<Ray>,
    /// `[re, im]` pairs.
    #[serde(default)]
    pub complex: Vec<[f64; 2]>,
}

fn default_margin() -> f64 {
    1e-6
}

impl Default for Grids {
    fn default() -> Self {
        Self { margin: default_margin(), rays: vec![], complex: vec![] }
    }
}

impl Grids {
    pub fn is_empty(&self) -> bool {
        self.rays.iter().all(|r| r.count == 0) && self.complex.is_empty()
    }

    pub fn points(&self) -> Result<Vec<C64>> {
        let mut out = Vec::new();
        for r in &self.rays {
            out.extend(r.points()?.into_iter().map(|x| C64::new(x, 0.0)));
        }
        out.extend(self.complex.iter().map(|p| C64::new(p[0], p[1])));
        Ok(out)
    }
}

/// Real ray from `start` to `stop`, linear or geometric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ray {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default)]
    pub log: bool,
}

impl Ray {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::GridSpec("ray endpoints must be finite".into()));
        }
        if self.log && (self.start == 0.0 || self.stop == 0.0 || self.start.signum() != self.stop.signum()) {
            return Err(CliError::GridSpec("log ray needs nonzero endpoints of one sign".into()));
        }
        let step = |i: usize| if self.count == 1 { 0.0 } else { i as f64 / (self.count - 1) as f64 };
        Ok((0..self.count)
            .map(|i| {
                let s = step(i);
                if self.log {
                    let (a, b) = (self.start.abs().ln(), self.stop.abs().ln());
                    self.start.signum() * (a + s * (b - a)).exp()
                } else {
                    self.start + s * (self.stop - self.start)
                }
            })
            .collect())
    }
}

/// Functions that can be sampled on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Q(QKind),
    Weyl,
}

impl Function {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "q0" => Function::Q(QKind::Q0),
            "q1" => Function::Q(QKind::Q1),
            "calq0" => Function::Q(QKind::CalQ0),
            "calq1" => Function::Q(QKind::CalQ1),
            "weyl" => Function::Weyl,
            _ => return Err(CliError::Config(format!("unknown function `{s}`"))),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Function::Q(k) => k.name(),
            Function::Weyl => "weyl",
        }
    }

    /// `q0`, `q1` live off `[-1, 1]`; the others off `[0, inf)`.
    pub fn admits(self, z: C64, margin: f64) -> bool {
        if z.im.abs() >= margin {
            return true;
        }
        match self {
            Function::Q(QKind::Q0 | QKind::Q1) => z.re.abs() >= 1.0 + margin,
            _ => z.re <= -margin,
        }
    }

    pub fn check(self, z: C64, margin: f64) -> Result<()> {
        if self.admits(z, margin) {
            Ok(())
        } else {
            Err(CliError::GridDomain { function: self.name().into(), re: z.re, im: z.im, margin })
        }
    }
}

/// Hermitian contraction read from a TOML file; all entries real.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub dim: usize,
    /// Orthonormal basis of `dom B`, one vector per entry.
    pub domain: Vec<Vec<f64>>,
    /// `B` applied to each domain vector.
    pub action: Vec<Vec<f64>>,
    /// Pair `(B0, B1)` for the boundary suite, row-major; the extreme pair when absent.
    #[serde(default)]
    pub pair: Option<PairFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairFile {
    pub b0: Vec<Vec<f64>>,
    pub b1: Vec<Vec<f64>>,
}

fn columns(n: usize, cols: &[Vec<f64>], what: &str) -> Result<CMatrix> {
    if cols.iter().any(|c| c.len() != n) {
        return Err(CliError::Config(format!("{what}: every vector needs {n} entries")));
    }
    let flat: Vec<f64> = (0..n).flat_map(|i| cols.iter().map(move |c| c[i])).collect();
    Ok(from_real(n, cols.len(), &flat))
}

fn square(n: usize, rows: &[Vec<f64>], what: &str) -> Result<CMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Config(format!("{what}: expected a {n}x{n} matrix")));
    }
    Ok(from_real(n, n, &rows.concat()))
}

/// Instance built from a config, with the pair used by the boundary suite.
#[derive(Debug, Clone)]
pub struct ResolvedInstance {
    pub label: String,
    pub contraction: HermitianContraction,
    pub pair: Option<(CMatrix, CMatrix)>,
}

impl InstanceFile {
    pub fn resolve(&self, label: String, tol: &TolerancePolicy) -> Result<ResolvedInstance> {
        let n = self.dim;
        if n == 0 || self.domain.len() != self.action.len() {
            return Err(CliError::Config("instance file: need dim > 0 and one action per domain vector".into()));
        }
        let dom = Subspace::from_orthonormal(columns(n, &self.domain, "domain")?, tol)
            .map_err(|e| CliError::Config(format!("instance file: domain: {e}")))?;
        let contraction = HermitianContraction::new(dom, columns(n, &self.action, "action")?, tol)
            .map_err(|e| CliError::Config(format!("instance file: {e}")))?;
        let pair = match &self.pair {
            Some(p) => Some((square(n, &p.b0, "pair.b0")?, square(n, &p.b1, "pair.b1")?)),
            None => None,
        };
        Ok(ResolvedInstance { label, contraction, pair })
    }
}

impl ScenarioConfig {
    /// Parses a config; relative instance paths are taken against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if let (InstanceSpec::File(p), Some(base)) = (&mut cfg.instance, base) {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent())
    }

    fn validate(&self) -> Result<()> {
        self.tolerances.policy()?;
        if let InstanceSpec::Random { n, domdim } = self.instance {
            if n == 0 || domdim > n {
                return Err(CliError::Config(format!("instance.random: need 0 < n and domdim <= n, got n = {n}, domdim = {domdim}")));
            }
        }
        if !(self.grids.margin.is_finite() && self.grids.margin > 0.0) {
            return Err(CliError::Config("grids.margin must be positive".into()));
        }
        for c in &self.checks {
            if let Check::Asymptotic4 { sizes } = c {
                if sizes.is_empty() || sizes.contains(&0) {
                    return Err(CliError::Config("asymptotic4.sizes: need positive sizes".into()));
                }
            }
        }
        let points = self.grids.points()?;
        let all = [QKind::Q0, QKind::Q1, QKind::CalQ0, QKind::CalQ1].map(Function::Q);
        for z in points {
            if !all.iter().any(|f| f.admits(z, self.grids.margin)) {
                return Err(CliError::GridDomain { function: "every q-function".into(), re: z.re, im: z.im, margin: self.grids.margin });
            }
        }
        Ok(())
    }

    /// `EXTLAB_SEED` when given, else the config seed; random instances need one of them.
    pub fn effective_seed(&self, env: Option<&str>) -> Result<u64> {
        let seed = match env {
            Some(s) => Some(s.trim().parse::<u64>().map_err(|_| CliError::Config(format!("{SEED_ENV}=`{s}` is not an unsigned integer")))?),
            None => self.seed,
        };
        match (seed, &self.instance) {
            (Some(s), _) => Ok(s),
            (None, InstanceSpec::Random { .. }) => Err(CliError::Config("seed is mandatory for random instances".into())),
            (None, _) => Ok(0),
        }
    }

    pub fn resolve_instance(&self, seed: u64, tol: &TolerancePolicy) -> Result<ResolvedInstance> {
        let name = match &self.instance {
            InstanceSpec::E1 => "E1".to_string(),
            InstanceSpec::E2 => "E2".to_string(),
            InstanceSpec::E3 => "E3".to_string(),
            InstanceSpec::Random { n, domdim } => format!("random({seed},{n},{domdim})"),
            InstanceSpec::File(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                let file: InstanceFile = toml::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                return file.resolve(p.display().to_string(), tol);
            }
        };
        resolve_builtin(&name)
    }
}

pub fn resolve_builtin(name: &str) -> Result<ResolvedInstance> {
    let inst = builtin_instance(name).map_err(|e| CliError::Config(format!("instance: {e}")))?;
    Ok(ResolvedInstance { label: inst.name, contraction: inst.contraction, pair: inst.boundary_pair })
}
