//! Subcommand implementations.

use dynbc::datum::project_datum;
use dynbc::geometry::{BoundaryPoint, DomainSpec, Point};
use dynbc::montecarlo::estimate_solution;
use dynbc::real::wrap_angle;
use dynbc::spectral::{
    check_spectral_condition, degree_eigenvalue, evaluate_solution, subordinated_solution, BoundaryParams,
    SubordinationQuad,
};
use dynbc::stoch::{
    sample_boundary_process, sample_exit_point, sample_inverse_stable, sample_inverse_tempered, sample_stable,
    RngStream,
};
use dynbc::symbols::{ml_e, FractionalOrder, MLParams, TimeModel};
use dynbc::verify::{compare, SpectralConfig};

use crate::config::{ConfigError, RunConfig};
use crate::table::{emit_with, Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] dynbc::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("comparison failed: max |z| = {max_abs_z}, exact checks {exact}")]
    ComparisonFailed { max_abs_z: f64, exact: &'static str },
}

impl CliError {
    /// 2: configuration, 3: mathematical precondition, 4: comparison failure.
    pub fn exit_code(&self) -> i32 {
        use dynbc::Error as E;
        match self {
            Self::Config(_) | Self::Io(_) => 2,
            Self::Solver(E::InvalidParameter(_) | E::InvalidMode(_) | E::Input(_)) => 2,
            Self::Solver(_) => 3,
            Self::ComparisonFailed { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn point_cells(dim: usize, x: &Point<f64>) -> Vec<Cell> {
    let mut c = vec![Cell::Float(x.x), Cell::Float(x.y)];
    if dim == 3 {
        c.push(Cell::Float(x.z));
    }
    c
}

fn point_header(dim: usize) -> Vec<&'static str> {
    if dim == 3 {
        vec!["t", "x1", "x2", "x3"]
    } else {
        vec!["t", "x1", "x2"]
    }
}

/// Eigenvalue table `degree, lambda, lambda + Lambda` and the spectral-condition report.
pub fn eigen(cfg: &RunConfig) -> Result<Table> {
    let check = check_spectral_condition(&cfg.domain, &cfg.bc);
    eprintln!(
        "lambda_1 = {} ({}); criterion k <= l R (N-1): {}",
        check.first_eigenvalue,
        if check.ok { "spectral condition holds" } else { "spectral condition violated" },
        if check.remark_ok { "holds" } else { "violated" }
    );
    if check.first_eigenvalue + cfg.bc.lambda() < 0.0 {
        eprintln!("warning: lambda_1 + Lambda < 0; solve and compare will refuse this configuration");
    } else if !check.ok {
        eprintln!("warning: lambda_1 < 0, compensated by the killing rate");
    }
    if check.disagrees() {
        eprintln!("warning: the explicit eigenvalue and the closed-form criterion disagree; the eigenvalue is used");
    }
    let lambda = cfg.bc.lambda();
    let mut t = Table::new(vec!["degree", "lambda", "lambda_shifted"]);
    for d in 0..=cfg.n_max {
        let shifted = degree_eigenvalue(&cfg.domain, &cfg.bc, d);
        t.push(vec![Cell::Int(d as i64), Cell::Float(shifted - lambda), Cell::Float(shifted)]);
    }
    Ok(t)
}

/// Spectral route at every `(t, x)`, optionally with the subordination cross-check.
pub fn solve(cfg: &RunConfig) -> Result<Table> {
    let model = cfg.require_time()?;
    let datum = cfg.require_datum()?;
    let grid = cfg.eval_grid()?;
    let field = project_datum(&cfg.domain, datum, cfg.n_max)?;
    let alpha = match (cfg.subordination, model) {
        (false, _) => None,
        (true, TimeModel::Caputo(a)) => Some(a),
        (true, TimeModel::Symbol(_)) => {
            return Err(ConfigError::Invalid {
                key: "eval.subordination".into(),
                msg: "the subordination check needs time.model = caputo".into(),
            }
            .into())
        }
    };
    let dim = cfg.domain.dim();
    let mut header = point_header(dim);
    header.push("u");
    if alpha.is_some() {
        header.push("u_subordinated");
    }
    let mut table = Table::new(header);
    for (t, x) in grid {
        let mut row = vec![Cell::Float(t)];
        row.extend(point_cells(dim, &x));
        row.push(Cell::Float(evaluate_solution(&field, &cfg.bc, &model, t, &x)?));
        if let Some(a) = alpha {
            let v = if t == 0.0 {
                evaluate_solution(&field, &cfg.bc, &model, t, &x)?
            } else {
                subordinated_solution(&field, &cfg.bc, a, t, &x, SubordinationQuad::default())?
            };
            row.push(Cell::Float(v));
        }
        table.push(row);
    }
    Ok(table)
}

/// Monte Carlo estimates `t, x1, x2, mean, stderr, n`.
pub fn simulate(cfg: &RunConfig) -> Result<Table> {
    let model = cfg.require_time()?;
    let datum = cfg.require_datum()?;
    let grid = cfg.eval_grid()?;
    let mc = dynbc::montecarlo::MCConfig { time_model: model, ..cfg.mc };
    let mut table = Table::new(vec!["t", "x1", "x2", "mean", "stderr", "n"]);
    for (t, x) in grid {
        let e = estimate_solution(&cfg.domain, &cfg.bc, datum, t, &x, &mc)?;
        table.push(vec![
            Cell::Float(t),
            Cell::Float(x.x),
            Cell::Float(x.y),
            Cell::Float(e.mean),
            Cell::Float(e.stderr),
            Cell::Int(e.n as i64),
        ]);
    }
    Ok(table)
}

/// Writes `compare.csv` and `compare.json`; fails with exit code 4 on disagreement.
pub fn compare_routes(cfg: &RunConfig) -> Result<()> {
    let model = cfg.require_time()?;
    let datum = cfg.require_datum()?;
    let grid = cfg.eval_grid()?;
    let report = compare(&cfg.domain, &cfg.bc, &model, datum, &grid, &SpectralConfig { n_max: cfg.n_max }, &cfg.mc)?;
    let dir = cfg.output.dir.as_deref();
    emit_with(dir, "compare.csv", |w| report.write_csv(w))?;
    let json = report.summary_json();
    match dir {
        Some(_) => emit_with(dir, "compare.json", |w| writeln!(w, "{json}"))?,
        None => eprintln!("{json}"),
    }
    if report.pass {
        Ok(())
    } else {
        Err(CliError::ComparisonFailed {
            max_abs_z: report.max_abs_z,
            exact: if report.exact_ok { "passed" } else { "failed" },
        })
    }
}

/// `z, value` table of `E_{alpha, beta}(z)`.
pub fn mlf(alpha: f64, beta: f64, zs: &[f64]) -> Result<Table> {
    let p = MLParams::new(alpha, beta)?;
    let mut t = Table::new(vec!["z", "value"]);
    for &z in zs {
        t.push(vec![Cell::Float(z), Cell::Float(ml_e(p, z)?)]);
    }
    Ok(t)
}

/// Raw variates for downstream distribution checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleKind {
    Stable { alpha: f64 },
    InverseStable { alpha: f64, t: f64 },
    InverseTempered { alpha: f64, theta: f64, t: f64, delta: f64 },
    /// Exit angle from `x` in the disk of radius `radius`.
    ExitAngle { radius: f64, x: Point<f64> },
    /// Angular increment in `(-pi, pi]` of the boundary process over intrinsic time `s`.
    BoundaryIncrement { radius: f64, k: f64, l: f64, s: f64 },
}

pub fn sample(kind: SampleKind, n: u64, seed: u64) -> Result<Table> {
    let mut rng = RngStream::new(seed, 0);
    let mut table = Table::new(vec!["value"]);
    let mut draw: Box<dyn FnMut(&mut RngStream) -> dynbc::Result<f64>> = match kind {
        SampleKind::Stable { alpha } => Box::new(move |r| sample_stable(r, alpha)),
        SampleKind::InverseStable { alpha, t } => {
            let a = FractionalOrder::new(alpha)?;
            Box::new(move |r| sample_inverse_stable(r, a, t))
        }
        SampleKind::InverseTempered { alpha, theta, t, delta } => {
            Box::new(move |r| sample_inverse_tempered(r, alpha, theta, t, delta))
        }
        SampleKind::ExitAngle { radius, x } => {
            let dom = DomainSpec::disk(radius)?;
            Box::new(move |r| Ok(sample_exit_point(r, &dom, &x)?.angle()))
        }
        SampleKind::BoundaryIncrement { radius, k, l, s } => {
            let dom = DomainSpec::disk(radius)?;
            let bp = BoundaryParams::new(k, l, 0.0)?;
            bp.require_process()?;
            Box::new(move |r| {
                let a = wrap_angle(sample_boundary_process(r, &dom, &bp, &BoundaryPoint::Circle(0.0), s)?.angle());
                Ok(if a > std::f64::consts::PI { a - 2.0 * std::f64::consts::PI } else { a })
            })
        }
    };
    for _ in 0..n {
        table.push(vec![Cell::Float(draw(&mut rng)?)]);
    }
    Ok(table)
}
