//! Executes a configured study and writes its artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use crate::analysis::{convergence_study_with, StudyRow, StudyTable};
use crate::config::RunConfig;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub table: StudyTable,
    pub csv: PathBuf,
    pub markdown: PathBuf,
    pub log: PathBuf,
}

impl RunOutcome {
    pub fn success(&self) -> bool {
        self.table.all_succeeded()
    }
}

fn row_log(row: &StudyRow) -> String {
    let mut s = String::new();
    let st = &row.stats;
    let _ = writeln!(s, "[row {}]", row.label());
    if let Some(f) = &row.failure {
        let _ = writeln!(s, "  FAILED: {f}");
        return s;
    }
    let g = &st.geometry;
    let _ = writeln!(s, "  subdivisions per axis = {}", st.subdivisions);
    let _ = writeln!(s, "  dofs = {}", st.dofs);
    let _ = writeln!(s, "  interface elements = {}", g.interface_elements);
    let _ = writeln!(s, "  case counts (1..5) = {:?}", g.case_counts);
    let _ = writeln!(s, "  max plane-triangle angle = {:.6} deg (limit 135)", g.max_angle_deg);
    let _ = writeln!(s, "  min 1 + mu*gamma.delta = {:.6}", g.min_denominator);
    let _ = writeln!(s, "  gamma.delta range = [{:.6}, {:.6}]", g.min_gamma_delta, g.max_gamma_delta);
    let _ = writeln!(s, "  max h^-1 |delta|_inf - 7.43 gamma.delta = {:.3e}", g.max_delta_bound_residual);
    let _ = writeln!(s, "  snapped nodes = {}", g.snapped_nodes);
    let _ = writeln!(s, "  interface faces on the boundary = {}", g.boundary_crossings);
    let _ = writeln!(s, "  signed-cone decompositions = {}", g.cone_fallbacks);
    if st.iterations.is_some() {
        let _ = writeln!(s, "  penalty faces = {}", st.penalty_faces);
        let _ = writeln!(s, "  solver iterations = {}", st.iterations.unwrap_or(0));
        let _ = writeln!(s, "  relative residual = {:.3e}", st.residual.unwrap_or(f64::NAN));
    }
    let t = &st.seconds;
    let _ = writeln!(
        s,
        "  seconds: setup {:.3}, assemble {:.3}, solve {:.3}, errors {:.3}",
        t.setup, t.assemble, t.solve, t.errors
    );
    if let Some(r) = &row.report {
        let _ = writeln!(s, "  errors = {r:?}");
    }
    s
}

/// Runs the study and writes `results.csv`, `results.md` and `run.log`.
/// Row failures are recorded, not returned; see [`RunOutcome::success`].
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let problem = config.build_problem()?;
    let opts = config.study_options();
    let dir = &config.output_dir;
    fs::create_dir_all(dir)?;

    let mut log = String::new();
    let _ = writeln!(log, "# configuration");
    log.push_str(&config.echo());
    let _ = writeln!(log, "\n# problem notes");
    if problem.notes.is_empty() {
        let _ = writeln!(log, "(none)");
    }
    for n in &problem.notes {
        let _ = writeln!(log, "- {n}");
    }
    let _ = writeln!(log, "\n# rows");

    let mut study = || {
        convergence_study_with(&problem, &config.ladder, &opts, |row| {
            log.push_str(&row_log(row));
        })
    };
    let table = if config.deterministic {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| Error::Config(format!("deterministic: {e}")))?
            .install(study)
    } else {
        study()
    };
    let failed = table.rows.iter().filter(|r| r.failure.is_some()).count();
    let _ = writeln!(log, "\n# status\n{}", if failed == 0 { "ok".to_string() } else { format!("{failed} row(s) failed") });

    let csv = dir.join("results.csv");
    let markdown = dir.join("results.md");
    let log_path = dir.join("run.log");
    fs::write(&csv, table.to_csv())?;
    fs::write(&markdown, table.to_markdown())?;
    fs::write(&log_path, log)?;
    Ok(RunOutcome { table, csv, markdown, log: log_path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn writes_artifacts_and_echoes_config() {
        let dir = tempfile::tempdir().unwrap();
        let text = format!(
            "ladder = [8, 10]\nmode = \"interpolation\"\noutput_dir = {:?}\n[custom]\nkind = \"sphere\"\ncenter = [0.0, 0.0, 0.0]\nradius = 0.5\n",
            dir.path().display().to_string()
        );
        let cfg = parse_config(&text).unwrap();
        let out = run(&cfg).unwrap();
        assert!(out.success());
        let log = fs::read_to_string(&out.log).unwrap();
        for key in cfg.echo().lines() {
            assert!(log.contains(key), "missing `{key}`");
        }
        assert!(log.contains("[row 1/10]") && log.contains("case counts"));
        let csv = fs::read_to_string(&out.csv).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(fs::read_to_string(&out.markdown).unwrap().contains("| 1/8 |"));
    }

    #[test]
    fn failed_rows_are_reported() {
        let dir = tempfile::tempdir().unwrap();
        // the edge from the origin to (1, 0, 0) crosses this sphere twice
        let text = format!(
            "ladder = [2]\nmode = \"interpolation\"\noutput_dir = {:?}\n[custom]\nkind = \"sphere\"\ncenter = [0.5, 0.0, 0.0]\nradius = 0.3\n",
            dir.path().display().to_string()
        );
        let out = run(&parse_config(&text).unwrap()).unwrap();
        assert!(!out.success());
        assert!(fs::read_to_string(&out.log).unwrap().contains("FAILED"));
    }
}
