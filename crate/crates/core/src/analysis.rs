//! Error norms, interface-element error ratios and convergence studies.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::assembly::{self, PenaltyScaling, SchemeParameters};
use crate::classify::{ClassifyOptions, Side};
use crate::geometry::PlaneRule;
use crate::ife::lagrange_interpolate;
use crate::levelset::LevelSet;
use crate::mesh::{BoxDomain, CartesianMesh};
use crate::problem::BenchmarkProblem;
use crate::quadrature::{box_points, rules, tet_points};
use crate::solver::SolverOptions;
use crate::space::{GeometrySummary, GlobalIFESpace, SpaceOptions};
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Interpolation,
    Sppife,
    Nppife,
    Ippife,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Interpolation => "interpolation",
            Mode::Sppife => "sppife",
            Mode::Nppife => "nppife",
            Mode::Ippife => "ippife",
        }
    }

    /// The `ε` a penalty mode implies; `None` for interpolation.
    pub fn epsilon(self) -> Option<i32> {
        match self {
            Mode::Interpolation => None,
            Mode::Sppife => Some(-1),
            Mode::Nppife => Some(1),
            Mode::Ippife => Some(0),
        }
    }

    pub fn from_epsilon(eps: i32) -> Option<Mode> {
        match eps {
            -1 => Some(Mode::Sppife),
            1 => Some(Mode::Nppife),
            0 => Some(Mode::Ippife),
            _ => None,
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Mode> {
        match s.to_ascii_lowercase().as_str() {
            "interpolation" => Ok(Mode::Interpolation),
            "sppife" => Ok(Mode::Sppife),
            "nppife" => Ok(Mode::Nppife),
            "ippife" => Ok(Mode::Ippife),
            _ => Err(Error::Config(format!("mode: unknown mode `{s}`"))),
        }
    }
}

/// Which elements enter the error computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorScope {
    All,
    /// Only interface elements; the global norms are left empty.
    InterfaceOnly,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorReport {
    pub linf: Option<f64>,
    pub l2: Option<f64>,
    pub h1: Option<f64>,
    pub eta_inf: Option<f64>,
    pub eta0: Option<f64>,
    pub eta1: Option<f64>,
}

pub const COLUMN_NAMES: [&str; 6] = ["Linf", "L2", "H1", "eta_inf", "eta0", "eta1"];

impl ErrorReport {
    pub fn columns(&self) -> [Option<f64>; 6] {
        [self.linf, self.l2, self.h1, self.eta_inf, self.eta0, self.eta1]
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Partial {
    linf: f64,
    l2: f64,
    h1: f64,
    ph2: f64,
}

fn side_at(ls: &dyn LevelSet, x: &Vec3) -> Side {
    if ls.value(x) < 0.0 { Side::Minus } else { Side::Plus }
}

fn element_partial(
    space: &GlobalIFESpace,
    problem: &BenchmarkProblem,
    coeffs: &[f64],
    e: usize,
    samples: usize,
) -> Partial {
    let mesh = &space.mesh;
    let ls = &problem.surface;
    let polys = [space.element_function(e, coeffs, Side::Minus), space.element_function(e, coeffs, Side::Plus)];
    let pick = |s: Side| if s == Side::Minus { &polys[0] } else { &polys[1] };
    let mut p = Partial::default();
    let accumulate = |x: &Vec3, w: f64, p: &mut Partial, with_ph2: bool| {
        let s = side_at(ls, x);
        let v = pick(s);
        let j = problem.jet(x, s);
        let d = j.v - v.value(x);
        let g = Vec3::new(j.g[0], j.g[1], j.g[2]) - v.gradient(x);
        p.linf = p.linf.max(d.abs());
        p.l2 += w * d * d;
        p.h1 += w * g.norm_squared();
        if with_ph2 {
            p.ph2 += w * (j.v * j.v + j.g.iter().map(|c| c * c).sum::<f64>() + j.hessian_frobenius_sq());
        }
    };
    let o = mesh.element_origin(e);
    let hi = o + mesh.spacing();
    match space.interface_slot(e) {
        None => {
            for (x, w) in box_points(o, hi, rules::default_cube()) {
                accumulate(&x, w, &mut p, false);
            }
        }
        Some(s) => {
            for t in &space.decomps[s].tets {
                for (x, w) in tet_points(t, rules::default_tet()) {
                    accumulate(&x, w, &mut p, true);
                }
            }
        }
    }
    // dense sampling for the maximum norm, vertices included
    let m = samples.max(2);
    let step = mesh.spacing() / (m - 1) as f64;
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                let x = o + Vec3::new(i as f64 * step.x, j as f64 * step.y, k as f64 * step.z);
                let s = side_at(ls, &x);
                p.linf = p.linf.max((problem.u(&x, s) - pick(s).value(&x)).abs());
            }
        }
    }
    p
}

/// Errors of the finite element function with nodal coefficients `coeffs`.
/// Both the exact solution and the discrete function are evaluated on the
/// side given by the true level set.
pub fn compute_errors(
    space: &GlobalIFESpace,
    problem: &BenchmarkProblem,
    coeffs: &[f64],
    scope: ErrorScope,
    samples: usize,
) -> ErrorReport {
    let elements: Vec<usize> = match scope {
        ErrorScope::All => (0..space.mesh.num_elements()).collect(),
        ErrorScope::InterfaceOnly => space.cls.interface_elements.clone(),
    };
    let mut linf: f64 = 0.0;
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    let (mut eta_inf, mut eta0, mut eta1): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for chunk in elements.chunks(4096) {
        let parts: Vec<Partial> =
            chunk.par_iter().map(|&e| element_partial(space, problem, coeffs, e, samples)).collect();
        for (&e, p) in chunk.iter().zip(&parts) {
            linf = linf.max(p.linf);
            l2 += p.l2;
            h1 += p.h1;
            if space.interface_slot(e).is_some() {
                let norm = p.ph2.max(0.0).sqrt();
                eta_inf = eta_inf.max(p.linf);
                if norm > 0.0 {
                    eta0 = eta0.max(p.l2.max(0.0).sqrt() / norm);
                    eta1 = eta1.max(p.h1.max(0.0).sqrt() / norm);
                }
            }
        }
    }
    let global = scope == ErrorScope::All;
    let has_interface = !space.cls.interface_elements.is_empty();
    ErrorReport {
        linf: global.then_some(linf),
        l2: global.then(|| l2.max(0.0).sqrt()),
        h1: global.then(|| h1.max(0.0).sqrt()),
        eta_inf: has_interface.then_some(eta_inf),
        eta0: has_interface.then_some(eta0),
        eta1: has_interface.then_some(eta1),
    }
}

/// `log(e₁/e₂) / log(h₁/h₂)`.
pub fn rate(e1: f64, h1: f64, e2: f64, h2: f64) -> Option<f64> {
    let r = (e1 / e2).ln() / (h1 / h2).ln();
    (e1 > 0.0 && e2 > 0.0 && r.is_finite()).then_some(r)
}

#[derive(Debug, Clone)]
pub struct StudyOptions {
    pub domain: BoxDomain,
    pub convention: MeshConvention,
    pub mode: Mode,
    pub sigma0_factor: f64,
    pub penalty_scaling: PenaltyScaling,
    pub wrong_plane: bool,
    pub seed: u64,
    pub solver: SolverOptions,
    pub classify: ClassifyOptions,
    pub scope: ErrorScope,
    /// Sampling points per axis and element for the maximum norm.
    pub linf_samples: usize,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            domain: BoxDomain::symmetric_unit(),
            convention: MeshConvention::PerAxis,
            mode: Mode::Sppife,
            sigma0_factor: 10.0,
            penalty_scaling: PenaltyScaling::Length,
            wrong_plane: false,
            seed: 42,
            solver: SolverOptions::default(),
            classify: ClassifyOptions::default(),
            scope: ErrorScope::All,
            linf_samples: 5,
        }
    }
}

impl StudyOptions {
    pub fn plane_rule(&self) -> PlaneRule {
        if self.wrong_plane { PlaneRule::Random { seed: self.seed } } else { PlaneRule::Rules }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Timings {
    pub setup: f64,
    pub assemble: f64,
    pub solve: f64,
    pub errors: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RowStats {
    pub subdivisions: usize,
    pub dofs: usize,
    pub penalty_faces: usize,
    pub iterations: Option<usize>,
    pub residual: Option<f64>,
    pub geometry: GeometrySummary,
    pub seconds: Timings,
}

#[derive(Debug, Clone)]
pub struct StudyRow {
    /// Row parameter `N`; the row is labelled `1/N` and `h = 1/N` enters the rates.
    pub n_per_unit: usize,
    pub report: Option<ErrorReport>,
    pub stats: RowStats,
    pub failure: Option<String>,
}

impl StudyRow {
    pub fn h(&self) -> f64 {
        1.0 / self.n_per_unit as f64
    }

    pub fn label(&self) -> String {
        format!("1/{}", self.n_per_unit)
    }
}

/// How a row label `1/N` maps to a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshConvention {
    /// `N` subdivisions per axis.
    PerAxis,
    /// `N` subdivisions per unit length of the longest side.
    PerUnit,
}

impl FromStr for MeshConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_axis" => Ok(MeshConvention::PerAxis),
            "per_unit" => Ok(MeshConvention::PerUnit),
            _ => Err(Error::Config(format!("mesh_convention: expected `per_axis` or `per_unit`, got `{s}`"))),
        }
    }
}

impl MeshConvention {
    pub fn name(self) -> &'static str {
        match self {
            MeshConvention::PerAxis => "per_axis",
            MeshConvention::PerUnit => "per_unit",
        }
    }
}

/// Subdivisions per axis for the row labelled `1/n`.
pub fn subdivisions(domain: &BoxDomain, n: usize, convention: MeshConvention) -> usize {
    match convention {
        MeshConvention::PerAxis => n.max(1),
        MeshConvention::PerUnit => ((n as f64 * domain.lengths().max()).round() as usize).max(1),
    }
}

/// One mesh of a study: build, (solve), measure.
pub fn run_row(problem: &BenchmarkProblem, n_per_unit: usize, opts: &StudyOptions) -> Result<(ErrorReport, RowStats)> {
    let t0 = Instant::now();
    let mut stats = RowStats { subdivisions: subdivisions(&opts.domain, n_per_unit, opts.convention), ..Default::default() };
    let mesh = CartesianMesh::new(opts.domain, stats.subdivisions)?;
    let space_opts = SpaceOptions { classify: opts.classify.clone(), rule: opts.plane_rule() };
    let space = GlobalIFESpace::build(&mesh, &problem.surface, problem.beta_minus, problem.beta_plus, &space_opts)?;
    stats.dofs = space.num_dofs();
    stats.geometry = space.summary();
    stats.seconds.setup = t0.elapsed().as_secs_f64();

    let coeffs = match opts.mode.epsilon() {
        None => lagrange_interpolate(&space.mesh, &space.cls, &|x, s| problem.u(x, s)),
        Some(eps) => {
            let t1 = Instant::now();
            let params = SchemeParameters::new(eps, opts.sigma0_factor * problem.beta_minus.max(problem.beta_plus))?
                .with_scaling(opts.penalty_scaling);
            let mut sys = assembly::assemble(&space, problem, &params)?;
            assembly::apply_dirichlet(&mut sys, &assembly::boundary_values(&space, problem), true);
            stats.penalty_faces = sys.penalty_faces;
            stats.seconds.assemble = t1.elapsed().as_secs_f64();
            let t2 = Instant::now();
            let solver = SolverOptions { kind: params.solver_kind(), ..opts.solver.clone() };
            let (x, st) = assembly::solve(&sys, &solver)?;
            stats.iterations = Some(st.iterations);
            stats.residual = Some(st.residual);
            stats.seconds.solve = t2.elapsed().as_secs_f64();
            x
        }
    };
    let t3 = Instant::now();
    let report = compute_errors(&space, problem, &coeffs, opts.scope, opts.linf_samples);
    stats.seconds.errors = t3.elapsed().as_secs_f64();
    Ok((report, stats))
}

#[derive(Debug, Clone)]
pub struct StudyTable {
    pub problem: String,
    pub mode: Mode,
    pub rows: Vec<StudyRow>,
}

/// Runs every mesh of `ladder`; failures are recorded per row.
pub fn convergence_study(problem: &BenchmarkProblem, ladder: &[usize], opts: &StudyOptions) -> StudyTable {
    convergence_study_with(problem, ladder, opts, |_| {})
}

/// [`convergence_study`] with a callback after each row.
pub fn convergence_study_with(
    problem: &BenchmarkProblem,
    ladder: &[usize],
    opts: &StudyOptions,
    mut on_row: impl FnMut(&StudyRow),
) -> StudyTable {
    let mut rows = Vec::with_capacity(ladder.len());
    for &n in ladder {
        let row = match run_row(problem, n, opts) {
            Ok((report, stats)) => StudyRow { n_per_unit: n, report: Some(report), stats, failure: None },
            Err(e) => StudyRow { n_per_unit: n, report: None, stats: RowStats::default(), failure: Some(e.to_string()) },
        };
        log::info!("{} {} 1/{n}: {:?}", problem.name, opts.mode.name(), row.report);
        on_row(&row);
        rows.push(row);
    }
    StudyTable { problem: problem.name.clone(), mode: opts.mode, rows }
}

impl StudyTable {
    pub fn value(&self, row: usize, column: usize) -> Option<f64> {
        self.rows[row].report.and_then(|r| r.columns()[column])
    }

    /// Rates against the previous row; `None` for the first row or missing data.
    pub fn rates(&self, column: usize) -> Vec<Option<f64>> {
        (0..self.rows.len())
            .map(|i| {
                if i == 0 {
                    return None;
                }
                let (a, b) = (self.value(i - 1, column)?, self.value(i, column)?);
                rate(a, self.rows[i - 1].h(), b, self.rows[i].h())
            })
            .collect()
    }

    pub fn column_index(name: &str) -> Option<usize> {
        COLUMN_NAMES.iter().position(|c| *c == name)
    }

    pub fn all_succeeded(&self) -> bool {
        self.rows.iter().all(|r| r.failure.is_none())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("h");
        for c in COLUMN_NAMES {
            let _ = write!(out, ",{c},rate");
        }
        out.push('\n');
        let rates: Vec<Vec<Option<f64>>> = (0..6).map(|c| self.rates(c)).collect();
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&row.label());
            for c in 0..6 {
                let v = self.value(i, c).map(|v| format!("{v:.6e}")).unwrap_or_default();
                let r = rates[c][i].map(|r| format!("{r:.4}")).unwrap_or_default();
                let _ = write!(out, ",{v},{r}");
            }
            out.push('\n');
        }
        out
    }

    /// Markdown tables: global norms, then the interface-element ratios.
    pub fn to_markdown(&self) -> String {
        let mut out = format!("## {} ({})\n\n", self.problem, self.mode.name());
        let groups: [(&[usize], [&str; 3]); 2] = [
            (&[0, 1, 2], ["‖u − u_h‖_L∞", "‖u − u_h‖_L²", "|u − u_h|_PH¹"]),
            (&[3, 4, 5], ["η∞", "η⁰", "η¹"]),
        ];
        for (cols, titles) in groups {
            if (0..self.rows.len()).all(|i| cols.iter().all(|&c| self.value(i, c).is_none())) {
                continue;
            }
            out.push_str("| h |");
            for t in titles {
                let _ = write!(out, " {t} | rate |");
            }
            out.push_str("\n|---|");
            out.push_str(&"---|---|".repeat(3));
            out.push('\n');
            let rates: Vec<Vec<Option<f64>>> = cols.iter().map(|&c| self.rates(c)).collect();
            for (i, row) in self.rows.iter().enumerate() {
                let _ = write!(out, "| {} |", row.label());
                for (k, &c) in cols.iter().enumerate() {
                    let v = self.value(i, c).map(|v| format!("{v:.4e}")).unwrap_or_else(|| "-".into());
                    let r = rates[k][i].map(|r| format!("{r:.4}")).unwrap_or_default();
                    let _ = write!(out, " {v} | {r} |");
                }
                out.push('\n');
            }
            out.push('\n');
        }
        for row in &self.rows {
            if let Some(f) = &row.failure {
                let _ = writeln!(out, "- {} failed: {f}", row.label());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::plane_patch;

    #[test]
    fn rate_of_exact_powers() {
        let h = 0.1;
        assert_eq!(rate(h * h, h, (h / 2.0).powi(2), h / 2.0), Some(2.0));
        assert_eq!(rate(0.0, 0.1, 1.0, 0.05), None);
    }

    #[test]
    fn mode_round_trip() {
        for m in [Mode::Interpolation, Mode::Sppife, Mode::Nppife, Mode::Ippife] {
            assert_eq!(m.name().parse::<Mode>().unwrap(), m);
            if let Some(e) = m.epsilon() {
                assert_eq!(Mode::from_epsilon(e), Some(m));
            }
        }
        assert!("foo".parse::<Mode>().is_err());
    }

    #[test]
    fn interpolating_a_trilinear_function_is_exact() {
        // no interface in Ω, β constant, u = w/β + t·X with w affine
        let p = plane_patch([1.0, 0.5, -0.2], 9.0, 2.0, 2.0);
        let mesh = CartesianMesh::new(BoxDomain::symmetric_unit(), 4).unwrap();
        let sp = GlobalIFESpace::build(&mesh, &p.surface, 2.0, 2.0, &SpaceOptions::default()).unwrap();
        let c = lagrange_interpolate(&sp.mesh, &sp.cls, &|x, s| p.u(x, s));
        let r = compute_errors(&sp, &p, &c, ErrorScope::All, 5);
        for v in [r.linf, r.l2, r.h1] {
            assert!(v.unwrap() <= 1e-10);
        }
        assert!(r.eta0.is_none());
    }

    #[test]
    fn planar_interface_interpolation_is_exact() {
        let p = plane_patch([0.2, 1.0, 0.4], 0.1, 1.0, 100.0);
        let mesh = CartesianMesh::new(BoxDomain::symmetric_unit(), 6).unwrap();
        let sp = GlobalIFESpace::build(&mesh, &p.surface, 1.0, 100.0, &SpaceOptions::default()).unwrap();
        let c = lagrange_interpolate(&sp.mesh, &sp.cls, &|x, s| p.u(x, s));
        let r = compute_errors(&sp, &p, &c, ErrorScope::All, 5);
        assert!(r.l2.unwrap() <= 1e-12 && r.h1.unwrap() <= 1e-11 && r.linf.unwrap() <= 1e-12, "{r:?}");
        assert!(r.eta1.unwrap() <= 1e-11);
    }

    #[test]
    fn table_output_formats() {
        let mk = |n: usize, e: f64| StudyRow {
            n_per_unit: n,
            report: Some(ErrorReport { linf: Some(e), l2: Some(e), h1: Some(e), ..Default::default() }),
            stats: RowStats::default(),
            failure: None,
        };
        let t = StudyTable {
            problem: "x".into(),
            mode: Mode::Interpolation,
            rows: vec![mk(10, 1e-2), mk(20, 2.5e-3), StudyRow { n_per_unit: 40, report: None, stats: RowStats::default(), failure: Some("boom".into()) }],
        };
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "h,Linf,rate,L2,rate,H1,rate,eta_inf,rate,eta0,rate,eta1,rate");
        assert_eq!(lines[1], "1/10,1.000000e-2,,1.000000e-2,,1.000000e-2,,,,,,,");
        assert_eq!(lines[2], "1/20,2.500000e-3,2.0000,2.500000e-3,2.0000,2.500000e-3,2.0000,,,,,,");
        assert_eq!(lines[3], "1/40,,,,,,,,,,,,");
        assert!(lines.iter().all(|l| l.split(',').count() == 13));
        let md = t.to_markdown();
        assert!(md.contains("| 1/20 | 2.5000e-3 | 2.0000 |"));
        assert!(md.contains("1/40 failed: boom"));
        assert!(!md.contains("η⁰"));
    }

    #[test]
    fn interface_only_scope_leaves_globals_empty() {
        let p = crate::problem::custom_sphere([0.0; 3], 0.5, 1.0, 10.0);
        let opts = StudyOptions {
            mode: Mode::Interpolation,
            scope: ErrorScope::InterfaceOnly,
            convention: MeshConvention::PerUnit,
            ..Default::default()
        };
        let (r, st) = run_row(&p, 5, &opts).unwrap();
        assert!(r.l2.is_none() && r.eta0.unwrap() > 0.0);
        assert_eq!(st.subdivisions, 10);
    }
}
