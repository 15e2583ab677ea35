//! Declarative run configuration (TOML).

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Deserialize;

use crate::analysis::{ErrorScope, MeshConvention, Mode, StudyOptions};
use crate::assembly::PenaltyScaling;
use crate::classify::ClassifyOptions;
use crate::mesh::BoxDomain;
use crate::problem::{builtin_problem, custom_sphere, plane_patch, BenchmarkProblem, PROBLEM_NAMES};
use crate::solver::SolverOptions;
use crate::{Error, Result};

/// A user-supplied interface with a closed-form solution.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CustomSurface {
    /// `u^s = w/β^s` with `w = |X − c| − r`.
    Sphere { center: [f64; 3], radius: f64 },
    /// `u^s = w/β^s + t·X` with `w = n·X − offset`.
    Plane { normal: [f64; 3], offset: f64 },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub rel_tol: Option<f64>,
    pub max_iter: Option<usize>,
}

/// Configuration as written; every field optional so that command-line
/// overrides can be merged before validation.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub problem: Option<String>,
    pub custom: Option<CustomSurface>,
    pub beta_minus: Option<f64>,
    pub beta_plus: Option<f64>,
    pub ladder: Option<Vec<usize>>,
    pub mesh_convention: Option<String>,
    pub mode: Option<String>,
    pub epsilon: Option<i64>,
    pub sigma0_factor: Option<f64>,
    pub penalty_scaling: Option<String>,
    pub wrong_plane: Option<bool>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub deterministic: Option<bool>,
    pub interface_only: Option<bool>,
    pub linf_samples: Option<usize>,
    pub strict_boundary: Option<bool>,
    pub solver: Option<SolverSection>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Builtin(String),
    Custom(CustomSurface),
}

/// Validated configuration with defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub beta_minus: f64,
    pub beta_plus: f64,
    pub ladder: Vec<usize>,
    pub convention: MeshConvention,
    pub mode: Mode,
    pub epsilon: Option<i32>,
    pub sigma0_factor: f64,
    pub penalty_scaling: PenaltyScaling,
    pub wrong_plane: bool,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub deterministic: bool,
    pub interface_only: bool,
    pub linf_samples: usize,
    pub strict_boundary: bool,
    pub rel_tol: f64,
    pub max_iter: Option<usize>,
}

pub const DEFAULT_LADDER: [usize; 4] = [10, 20, 30, 40];

fn field(name: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{name}: {msg}"))
}

pub fn parse_raw(text: &str) -> Result<RawConfig> {
    toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_raw(text)?.resolve()
}

impl RawConfig {
    /// Fields set in `other` replace those of `self`.
    pub fn merge(mut self, other: RawConfig) -> RawConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            problem, custom, beta_minus, beta_plus, ladder, mesh_convention, mode, epsilon, sigma0_factor, penalty_scaling,
            wrong_plane, seed,
            output_dir, deterministic, interface_only, linf_samples, strict_boundary, solver
        );
        self
    }

    pub fn resolve(self) -> Result<RunConfig> {
        let problem = match (self.problem, self.custom) {
            (Some(_), Some(_)) => return Err(field("custom", "cannot be combined with `problem`")),
            (None, Some(c)) => {
                if let CustomSurface::Sphere { radius, .. } = &c {
                    if radius.is_nan() || *radius <= 0.0 {
                        return Err(field("custom.radius", "must be positive"));
                    }
                }
                if let CustomSurface::Plane { normal, .. } = &c {
                    if normal.iter().all(|v| *v == 0.0) {
                        return Err(field("custom.normal", "must be non-zero"));
                    }
                }
                ProblemSpec::Custom(c)
            }
            (p, None) => {
                let p = p.unwrap_or_else(|| "sphere".into());
                if !PROBLEM_NAMES.contains(&p.as_str()) {
                    return Err(field("problem", format!("unknown problem `{p}` (known: {})", PROBLEM_NAMES.join(", "))));
                }
                ProblemSpec::Builtin(p)
            }
        };
        let beta_minus = self.beta_minus.unwrap_or(1.0);
        let beta_plus = self.beta_plus.unwrap_or(100.0);
        for (n, b) in [("beta_minus", beta_minus), ("beta_plus", beta_plus)] {
            if !(b > 0.0 && b.is_finite()) {
                return Err(field(n, format!("must be positive and finite (got {b})")));
            }
        }
        let ladder = self.ladder.unwrap_or_else(|| DEFAULT_LADDER.to_vec());
        if ladder.is_empty() {
            return Err(field("ladder", "must not be empty"));
        }
        if ladder.contains(&0) {
            return Err(field("ladder", "entries must be positive"));
        }
        if ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(field("ladder", "must be strictly increasing"));
        }
        let convention = match self.mesh_convention.as_deref() {
            None => MeshConvention::PerAxis,
            Some(c) => c.parse()?,
        };
        let epsilon = match self.epsilon {
            None => None,
            Some(e @ -1..=1) => Some(e as i32),
            Some(e) => return Err(field("epsilon", format!("must be -1, 0 or 1 (got {e})"))),
        };
        let mode = match (self.mode.as_deref().map(str::parse::<Mode>).transpose()?, epsilon) {
            (Some(m), None) => m,
            (None, None) => Mode::Sppife,
            (None, Some(e)) => Mode::from_epsilon(e).expect("validated epsilon"),
            (Some(Mode::Interpolation), Some(e)) => {
                return Err(field("epsilon", format!("{e} given but mode `interpolation` solves no system")))
            }
            (Some(m), Some(e)) => {
                if m.epsilon() != Some(e) {
                    return Err(field("epsilon", format!("{e} conflicts with mode `{}`", m.name())));
                }
                m
            }
        };
        let sigma0_factor = self.sigma0_factor.unwrap_or(10.0);
        if !(sigma0_factor > 0.0 && sigma0_factor.is_finite()) {
            return Err(field("sigma0_factor", format!("must be positive (got {sigma0_factor})")));
        }
        let penalty_scaling = match self.penalty_scaling.as_deref() {
            Some("area") => PenaltyScaling::Area,
            None | Some("length") => PenaltyScaling::Length,
            Some(other) => return Err(field("penalty_scaling", format!("expected `area` or `length`, got `{other}`"))),
        };
        let linf_samples = self.linf_samples.unwrap_or(5);
        if linf_samples < 5 {
            return Err(field("linf_samples", "must be at least 5"));
        }
        let solver = self.solver.unwrap_or_default();
        let rel_tol = solver.rel_tol.unwrap_or(1e-10);
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(field("solver.rel_tol", format!("must lie in (0, 1) (got {rel_tol})")));
        }
        if solver.max_iter == Some(0) {
            return Err(field("solver.max_iter", "must be positive"));
        }
        Ok(RunConfig {
            problem,
            beta_minus,
            beta_plus,
            ladder,
            convention,
            epsilon: mode.epsilon(),
            mode,
            sigma0_factor,
            penalty_scaling,
            wrong_plane: self.wrong_plane.unwrap_or(false),
            seed: self.seed.unwrap_or(42),
            output_dir: self.output_dir.unwrap_or_else(|| PathBuf::from("results")),
            deterministic: self.deterministic.unwrap_or(false),
            interface_only: self.interface_only.unwrap_or(false),
            linf_samples,
            strict_boundary: self.strict_boundary.unwrap_or(false),
            rel_tol,
            max_iter: solver.max_iter,
        })
    }
}

impl RunConfig {
    pub fn build_problem(&self) -> Result<BenchmarkProblem> {
        match &self.problem {
            ProblemSpec::Builtin(name) => builtin_problem(name, self.beta_minus, self.beta_plus),
            ProblemSpec::Custom(CustomSurface::Sphere { center, radius }) => {
                Ok(custom_sphere(*center, *radius, self.beta_minus, self.beta_plus))
            }
            ProblemSpec::Custom(CustomSurface::Plane { normal, offset }) => {
                Ok(plane_patch(*normal, *offset, self.beta_minus, self.beta_plus))
            }
        }
    }

    pub fn study_options(&self) -> StudyOptions {
        StudyOptions {
            domain: BoxDomain::symmetric_unit(),
            convention: self.convention,
            mode: self.mode,
            sigma0_factor: self.sigma0_factor,
            penalty_scaling: self.penalty_scaling,
            wrong_plane: self.wrong_plane,
            seed: self.seed,
            solver: SolverOptions { rel_tol: self.rel_tol, max_iter: self.max_iter, ..Default::default() },
            classify: ClassifyOptions { strict_boundary: self.strict_boundary, ..Default::default() },
            scope: if self.interface_only { ErrorScope::InterfaceOnly } else { ErrorScope::All },
            linf_samples: self.linf_samples,
        }
    }

    /// Every effective parameter, one `key = value` per line.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let problem = match &self.problem {
            ProblemSpec::Builtin(n) => n.clone(),
            ProblemSpec::Custom(c) => format!("custom {c:?}"),
        };
        let eps = self.epsilon.map_or_else(|| "none".to_string(), |e| e.to_string());
        let sigma0 = self.sigma0_factor * self.beta_minus.max(self.beta_plus);
        let max_iter = self.max_iter.map_or_else(|| "20*sqrt(dofs)".to_string(), |m| m.to_string());
        let _ = writeln!(s, "problem = {problem}");
        let _ = writeln!(s, "domain = (-1, 1)^3");
        let _ = writeln!(s, "beta_minus = {}", self.beta_minus);
        let _ = writeln!(s, "beta_plus = {}", self.beta_plus);
        let _ = writeln!(s, "ladder = {:?}", self.ladder);
        let _ = writeln!(s, "mesh_convention = {}", self.convention.name());
        let _ = writeln!(s, "mode = {}", self.mode.name());
        let _ = writeln!(s, "epsilon = {eps}");
        let _ = writeln!(s, "sigma0_factor = {}", self.sigma0_factor);
        let _ = writeln!(s, "sigma0 = {sigma0}");
        let scaling = match self.penalty_scaling {
            PenaltyScaling::Area => "area",
            PenaltyScaling::Length => "length",
        };
        let _ = writeln!(s, "penalty_scaling = {scaling}");
        let _ = writeln!(s, "wrong_plane = {}", self.wrong_plane);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "output_dir = {}", self.output_dir.display());
        let _ = writeln!(s, "deterministic = {}", self.deterministic);
        let _ = writeln!(s, "interface_only = {}", self.interface_only);
        let _ = writeln!(s, "linf_samples = {}", self.linf_samples);
        let _ = writeln!(s, "strict_boundary = {}", self.strict_boundary);
        let _ = writeln!(s, "solver.rel_tol = {:e}", self.rel_tol);
        let _ = writeln!(s, "solver.max_iter = {max_iter}");
        s
    }
}
