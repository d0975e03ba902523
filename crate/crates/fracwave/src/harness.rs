//! Config-driven convergence experiments and report assembly.
//!
//! A convergence run sweeps one refinement axis (N or M, dyadic) for each α,
//! solves every cell, and tabulates E together with the log₂ refinement
//! order. Cells are independent and may run on a worker pool; the report is
//! assembled in config order so identical configs produce identical output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::FractionalOrder;
use crate::problem::ProblemSpec;
use crate::solver::{solve, Scheme, SpatialGrid};

/// Built-in benchmark problems addressable from configs and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleId {
    Ex51,
    Ex52,
}

impl ExampleId {
    pub fn name(&self) -> &'static str {
        match self {
            ExampleId::Ex51 => "ex51",
            ExampleId::Ex52 => "ex52",
        }
    }

    pub fn problem(&self, order: FractionalOrder) -> ProblemSpec {
        match self {
            ExampleId::Ex51 => ProblemSpec::ex51(order),
            ExampleId::Ex52 => ProblemSpec::ex52(order),
        }
    }

    /// First level included in the error max: ex51 measures from k = 0,
    /// ex52 from k = 1.
    pub fn error_from_level(&self) -> usize {
        match self {
            ExampleId::Ex51 => 0,
            ExampleId::Ex52 => 1,
        }
    }
}

impl std::str::FromStr for ExampleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex51" => Ok(ExampleId::Ex51),
            "ex52" => Ok(ExampleId::Ex52),
            other => Err(Error::Config(format!(
                "unknown example '{other}' (expected ex51 or ex52; custom problems go through the library API)"
            ))),
        }
    }
}

/// One convergence experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub example: ExampleId,
    pub scheme: Scheme,
    pub alphas: Vec<f64>,
    pub n_list: Vec<usize>,
    pub m_list: Vec<usize>,
    /// Grading exponent r; ignored by uniform schemes.
    pub grading: f64,
    /// Kernel-compression tolerance for the fast schemes.
    pub soe_eps: f64,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.alphas.is_empty() {
            return Err(Error::Config("alpha list is empty".into()));
        }
        for &alpha in &self.alphas {
            FractionalOrder::new(alpha).map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.n_list.is_empty() || self.m_list.is_empty() {
            return Err(Error::Config("N and M lists must be nonempty".into()));
        }
        if self.n_list.len() > 1 && self.m_list.len() > 1 {
            return Err(Error::Config(
                "exactly one of N and M may sweep; fix the other to a single value".into(),
            ));
        }
        for list in [&self.n_list, &self.m_list] {
            if list.len() > 1 {
                for pair in list.windows(2) {
                    if pair[1] != 2 * pair[0] {
                        return Err(Error::Config(
                            "refinement lists must be dyadic (each entry twice the previous) so the order column is meaningful".into(),
                        ));
                    }
                }
            }
        }
        if !(self.grading >= 1.0) {
            return Err(Error::Config(format!(
                "grading r = {} must be >= 1",
                self.grading
            )));
        }
        if !(self.soe_eps > 0.0) {
            return Err(Error::Config("soe tolerance must be positive".into()));
        }
        Ok(())
    }

    fn sweeps_n(&self) -> bool {
        self.n_list.len() > 1 || self.m_list.len() == 1
    }
}

/// One report row; `order` is blank on the first row of each α block.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub alpha: f64,
    pub n: usize,
    pub m: usize,
    pub scheme: Scheme,
    pub error: f64,
    pub order: Option<f64>,
    pub seconds: f64,
}

/// Assembled convergence table plus the metadata that produced it.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub example: ExampleId,
    pub scheme: Scheme,
    pub soe_eps: f64,
    pub rows: Vec<ReportRow>,
}

impl ConvergenceReport {
    /// CSV with header `alpha,N,M,scheme,E,order,seconds`; E carries six
    /// significant digits, the order four decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,N,M,scheme,E,order,seconds\n");
        for row in &self.rows {
            let order = row
                .order
                .map(|o| format!("{o:.4}"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{:.5e},{},{:.2}",
                row.alpha, row.n, row.m, row.scheme, row.error, order, row.seconds
            );
        }
        out
    }

    /// Human-readable aligned table.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "example {}  scheme {}  (soe eps {:.1e})",
            self.example.name(),
            self.scheme,
            self.soe_eps
        );
        let _ = writeln!(
            out,
            "{:>6} {:>7} {:>7} {:>12} {:>9} {:>9}",
            "alpha", "N", "M", "E", "order", "CPU(s)"
        );
        for row in &self.rows {
            let order = row.order.map(|o| format!("{o:.4}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:>6} {:>7} {:>7} {:>12.4e} {:>9} {:>9.2}",
                row.alpha, row.n, row.m, row.error, order, row.seconds
            );
        }
        out
    }
}

/// Worker pool sized by `FRACWAVE_THREADS` (default: hardware parallelism).
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = std::env::var("FRACWAVE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        });
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))
}

/// Runs the configured sweep and assembles the report.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let sweep_n = config.sweeps_n();
    let axis: Vec<(usize, usize)> = if sweep_n {
        let m = config.m_list[0];
        config.n_list.iter().map(|&n| (n, m)).collect()
    } else {
        let n = config.n_list[0];
        config.m_list.iter().map(|&m| (n, m)).collect()
    };
    let mut cells = Vec::new();
    for &alpha in &config.alphas {
        for &(n, m) in &axis {
            cells.push((alpha, n, m));
        }
    }
    let pool = thread_pool()?;
    let results: Vec<Result<(f64, f64)>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(alpha, n, m)| run_cell(config, alpha, n, m))
            .collect()
    });

    let mut rows = Vec::with_capacity(cells.len());
    for (idx, ((alpha, n, m), cell)) in cells.into_iter().zip(results).enumerate() {
        let (error, seconds) = cell?;
        let first_of_block = idx % axis.len() == 0;
        let order = if first_of_block {
            None
        } else {
            let prev: &ReportRow = &rows[idx - 1];
            Some((prev.error / error).log2())
        };
        rows.push(ReportRow {
            alpha,
            n,
            m,
            scheme: config.scheme,
            error,
            order,
            seconds,
        });
    }
    Ok(ConvergenceReport {
        example: config.example,
        scheme: config.scheme,
        soe_eps: config.soe_eps,
        rows,
    })
}

fn run_cell(config: &ExperimentConfig, alpha: f64, n: usize, m: usize) -> Result<(f64, f64)> {
    let started = Instant::now();
    let order = FractionalOrder::new(alpha)?;
    let problem = config.example.problem(order);
    let grid = SpatialGrid::new(problem.length, m)?;
    let result = solve(&problem, &grid, n, config.scheme, config.grading, config.soe_eps)?;
    let error = result
        .max_error(&problem, &grid, config.example.error_from_level())
        .expect("benchmark problems ship exact solutions");
    Ok((error, started.elapsed().as_secs_f64()))
}

/// Smooth benchmark sweep (exact solution u = t⁵ sin(πx)/5).
pub fn run_example_51(mut config: ExperimentConfig) -> Result<ConvergenceReport> {
    config.example = ExampleId::Ex51;
    run_convergence(&config)
}

/// Weak-initial-regularity benchmark sweep on graded meshes.
pub fn run_example_52(mut config: ExperimentConfig) -> Result<ConvergenceReport> {
    config.example = ExampleId::Ex52;
    run_convergence(&config)
}

/// Key=value config file: one pair per line, `#` comments and blank lines
/// ignored. CLI flags override whatever the file sets.
pub fn parse_key_value_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "{}:{}: expected key=value, got '{line}'",
                path.display(),
                lineno + 1
            )));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Comma-separated list of positive integers.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad integer '{tok}' in list '{s}'")))
        })
        .collect()
}

/// Comma-separated list of floats.
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number '{tok}' in list '{s}'")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            example: ExampleId::Ex51,
            scheme: Scheme::H3n3Direct,
            alphas: vec![1.5],
            n_list: vec![8, 16],
            m_list: vec![16],
            grading: 1.0,
            soe_eps: 1e-10,
            out: None,
        }
    }

    #[test]
    fn row_count_is_alphas_times_axis() {
        let mut config = tiny_config();
        config.alphas = vec![1.3, 1.7];
        let report = run_convergence(&config).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(report.rows[0].order.is_none());
        assert!(report.rows[1].order.is_some());
        assert!(report.rows[2].order.is_none(), "order resets per alpha block");
    }

    #[test]
    fn order_column_recomputable_from_errors() {
        let report = run_convergence(&tiny_config()).unwrap();
        let e0 = report.rows[0].error;
        let e1 = report.rows[1].error;
        let order = report.rows[1].order.unwrap();
        assert!((order - (e0 / e1).log2()).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_dyadic_and_double_sweeps() {
        let mut config = tiny_config();
        config.n_list = vec![8, 24];
        assert!(config.validate().is_err());
        let mut config = tiny_config();
        config.m_list = vec![16, 32];
        assert!(config.validate().is_err());
    }

    #[test]
    fn csv_layout() {
        let report = run_convergence(&tiny_config()).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "alpha,N,M,scheme,E,order,seconds");
        let first = lines.next().unwrap();
        assert!(first.starts_with("1.5,8,16,h3n3-direct,"));
        // First row has a blank order field.
        assert_eq!(first.split(',').nth(5).unwrap(), "");
    }

    #[test]
    fn key_value_parsing() {
        let dir = std::env::temp_dir().join("fracwave-test-config");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "# comment\nscheme = h3n3-fast\nN=8,16\n\n").unwrap();
        let pairs = parse_key_value_file(&path).unwrap();
        assert_eq!(
            pairs,
            vec![
                ("scheme".to_string(), "h3n3-fast".to_string()),
                ("N".to_string(), "8,16".to_string())
            ]
        );
        assert!(parse_usize_list("8,16").unwrap() == vec![8, 16]);
        assert!(parse_f64_list("1.1,1.9").unwrap() == vec![1.1, 1.9]);
        assert!(parse_usize_list("8,x").is_err());
    }
}
