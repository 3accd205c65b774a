//! Independent numerical oracles: the L1 Caputo derivative, mode-wise residuals of
//! the boundary evolution equation, the Kolmogorov-Smirnov statistic and the
//! spectral-versus-Monte-Carlo comparator.

use std::io::Write;

use serde::Serialize;

use crate::datum::{project_datum, BoundaryDatum};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::montecarlo::{estimate_solution, MCConfig};
use crate::real::Real;
use crate::spectral::{degree_eigenvalue, evaluate_solution, spectral_gate, BoundaryParams, SpectralField};
use crate::special::gamma;
use crate::symbols::{ml_e, BernsteinSymbol, FractionalOrder, MLParams, TimeModel};

/// z-scores above this flag a disagreement.
pub const Z_THRESHOLD: f64 = 4.0;

/// Relative tolerance for grid points where both routes must agree exactly.
pub const EXACT_TOL: f64 = 1e-12;

/// L1 approximation of the Caputo derivative at `t_1, ..., t_N` from samples on a
/// uniform grid `t_0 < ... < t_N`.
pub fn caputo_l1<T: Real>(times: &[T], values: &[T], alpha: T) -> Result<Vec<T>> {
    if times.len() != values.len() {
        return Err(Error::InvalidParameter("times and values differ in length".into()));
    }
    if times.len() < 3 {
        return Err(Error::InvalidParameter("the L1 scheme needs at least 3 grid points".into()));
    }
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let n = times.len() - 1;
    let h = (times[n] - times[0]) / T::of_usize(n);
    if !(h > T::zero()) || !h.is_finite() {
        return Err(Error::InvalidParameter("grid must be increasing and finite".into()));
    }
    let tol = h * T::lit(1e-9);
    if times.windows(2).any(|w| (w[1] - w[0] - h).abs() > tol) {
        return Err(Error::InvalidParameter("grid is not uniform".into()));
    }
    let e = T::one() - alpha;
    let b: Vec<T> = (0..n).map(|j| T::of_usize(j + 1).powf(e) - T::of_usize(j).powf(e)).collect();
    let scale = T::one() / (gamma(T::lit(2.0) - alpha) * h.powf(alpha));
    let diff: Vec<T> = values.windows(2).map(|w| w[1] - w[0]).collect();
    Ok((1..=n)
        .map(|m| {
            let mut s = T::zero();
            for j in 0..m {
                s += b[j] * diff[m - 1 - j];
            }
            s * scale
        })
        .collect())
}

fn uniform_grid<T: Real>(t_end: T, n_grid: usize) -> Vec<T> {
    (0..=n_grid).map(|j| t_end * T::of_usize(j) / T::of_usize(n_grid)).collect()
}

/// Residual `D^alpha v + mu v` of `v(t) = E_alpha(-mu t^alpha)` at the nodes `t_1..t_N`
/// of the uniform grid with `n_grid` steps on `[0, t_end]`.
pub fn relaxation_residual<T: Real>(alpha: FractionalOrder<T>, mu: T, t_end: T, n_grid: usize) -> Result<Vec<T>> {
    if !(t_end > T::zero()) || !t_end.is_finite() {
        return Err(Error::Domain(format!("final time {t_end} must be positive")));
    }
    let times = uniform_grid(t_end, n_grid);
    let ml = MLParams::classical(alpha);
    let a = alpha.get();
    let v: Vec<T> = times
        .iter()
        .map(|&t| if t == T::zero() { Ok(T::one()) } else { ml_e(ml, -mu * t.powf(a)) })
        .collect::<Result<_>>()?;
    let d = caputo_l1(&times, &v, a)?;
    Ok(d.iter().zip(&v[1..]).map(|(&dv, &vv)| dv + mu * vv).collect())
}

/// Mode-wise residual of the relaxation equations `D^alpha v = -(lambda + Lambda) v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<T> {
    /// Nodes `t_1..t_N` at which residuals are reported.
    pub grid: Vec<T>,
    pub residual_max: T,
    pub residual_l2: T,
    pub expected_order: T,
    /// Largest mode residual at the final time.
    pub final_residual: T,
    /// `log2` of the final-time residual ratio between steps `h` and `h/2`; `None`
    /// when both vanish.
    pub observed_order: Option<T>,
}

/// Applies the L1 scheme to every retained mode of `field`; the per-node residual is the
/// largest `|c (D^alpha v + mu v)|` over modes.
pub fn residual_check<T: Real>(
    dom: &DomainSpec<T>,
    bp: &BoundaryParams<T>,
    alpha: FractionalOrder<T>,
    field: &SpectralField<T>,
    t_end: T,
    n_grid: usize,
) -> Result<ResidualReport<T>> {
    spectral_gate(dom, bp)?;
    let mut weights = vec![T::zero(); field.max_degree() + 1];
    for (m, &c) in field.coefficients() {
        let w = &mut weights[m.degree()];
        *w = w.max(c.abs());
    }
    let node_residuals = |n: usize| -> Result<Vec<T>> {
        let mut out = vec![T::zero(); n];
        for (d, &w) in weights.iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            let mu = degree_eigenvalue(dom, bp, d);
            for (o, r) in out.iter_mut().zip(relaxation_residual(alpha, mu, t_end, n)?) {
                *o = o.max(w * r.abs());
            }
        }
        Ok(out)
    };
    let coarse = node_residuals(n_grid)?;
    let fine = node_residuals(2 * n_grid)?;
    let residual_max = coarse.iter().fold(T::zero(), |a, &b| a.max(b));
    let residual_l2 = coarse.iter().map(|&r| r * r).sum::<T>().sqrt();
    let (rc, rf) = (coarse[n_grid - 1], fine[2 * n_grid - 1]);
    let observed_order = if rc > T::zero() && rf > T::zero() { Some((rc / rf).log2()) } else { None };
    Ok(ResidualReport {
        grid: uniform_grid(t_end, n_grid)[1..].to_vec(),
        residual_max,
        residual_l2,
        expected_order: T::lit(2.0) - alpha.get(),
        final_residual: rc,
        observed_order,
    })
}

/// One-sample Kolmogorov-Smirnov distance between `samples` and `cdf`.
pub fn ks_statistic<T: Real>(samples: &[T], cdf: impl Fn(T) -> T) -> Result<T> {
    if samples.len() < 100 {
        return Err(Error::InvalidParameter(format!("KS needs at least 100 samples, got {}", samples.len())));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("KS sample".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = T::of_usize(xs.len());
    let mut d = T::zero();
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        let lo = T::of_usize(i) / n;
        let hi = T::of_usize(i + 1) / n;
        d = d.max(hi - f).max(f - lo);
    }
    Ok(d)
}

/// Asymptotic 1% critical value of the one-sample KS statistic.
pub fn ks_critical_value<T: Real>(n: usize) -> T {
    T::lit(1.63) / T::of_usize(n).sqrt()
}

/// Spectral settings for [`compare`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig {
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow<T> {
    pub t: T,
    pub x: Point<T>,
    pub u_spectral: T,
    pub u_mc: T,
    pub stderr: T,
    /// `(u_mc - u_spectral) / stderr`; `None` when `stderr = 0`.
    pub z: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonParameters {
    pub dim: usize,
    pub radius: f64,
    pub k: f64,
    pub l: f64,
    pub lambda: f64,
    pub time_model: &'static str,
    pub alpha: f64,
    pub theta: Option<f64>,
    pub n_max: usize,
    pub n_paths: u64,
    pub seed: u64,
    pub tempered_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport<T> {
    pub points: Vec<ComparisonRow<T>>,
    /// Largest `|z|` over points with a defined z-score (0 if none).
    pub max_abs_z: T,
    /// Points with zero standard error agree to [`EXACT_TOL`].
    pub exact_ok: bool,
    pub pass: bool,
    pub parameters: ComparisonParameters,
}

#[derive(Serialize)]
struct Summary<'a> {
    max_abs_z: f64,
    pass: bool,
    exact_ok: bool,
    n_points: usize,
    n_exact: usize,
    z_threshold: f64,
    parameters: &'a ComparisonParameters,
}

/// Full-precision float formatting for artifacts.
pub fn fmt_float<T: Real>(v: T) -> String {
    format!("{:.16e}", v.to_f64_lossy())
}

impl<T: Real> ComparisonReport<T> {
    pub const CSV_HEADER: &'static str = "t,x1,x2,u_spectral,u_mc,stderr,z";

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in &self.points {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt_float(r.t),
                fmt_float(r.x.x),
                fmt_float(r.x.y),
                fmt_float(r.u_spectral),
                fmt_float(r.u_mc),
                fmt_float(r.stderr),
                r.z.map(fmt_float).unwrap_or_default()
            )?;
        }
        Ok(())
    }

    /// JSON summary with a fixed key order; contains no shard count, so it is identical
    /// across shardings.
    pub fn summary_json(&self) -> String {
        let s = Summary {
            max_abs_z: self.max_abs_z.to_f64_lossy(),
            pass: self.pass,
            exact_ok: self.exact_ok,
            n_points: self.points.len(),
            n_exact: self.points.iter().filter(|r| r.z.is_none()).count(),
            z_threshold: Z_THRESHOLD,
            parameters: &self.parameters,
        };
        serde_json::to_string_pretty(&s).expect("plain data serializes")
    }
}

/// Evaluates the spectral and Monte Carlo routes at every `(t, x)` of `grid`, in order.
pub fn compare<T: Real, D: BoundaryDatum<T> + ?Sized>(
    dom: &DomainSpec<T>,
    bp: &BoundaryParams<T>,
    model: &TimeModel<T>,
    datum: &D,
    grid: &[(T, Point<T>)],
    spectral: &SpectralConfig,
    mc: &MCConfig<T>,
) -> Result<ComparisonReport<T>> {
    bp.require_process()?;
    spectral_gate(dom, bp)?;
    let mc = MCConfig { time_model: *model, ..*mc };
    let field = project_datum(dom, datum, spectral.n_max)?;
    let mut points = Vec::with_capacity(grid.len());
    for &(t, x) in grid {
        let u_spectral = evaluate_solution(&field, bp, model, t, &x)?;
        let est = estimate_solution(dom, bp, datum, t, &x, &mc)?;
        let z = (est.stderr > T::zero()).then(|| (est.mean - u_spectral) / est.stderr);
        points.push(ComparisonRow { t, x, u_spectral, u_mc: est.mean, stderr: est.stderr, z });
    }
    let max_abs_z = points.iter().filter_map(|r| r.z).fold(T::zero(), |a, z| a.max(z.abs()));
    let tol = T::lit(EXACT_TOL);
    let exact_ok = points
        .iter()
        .filter(|r| r.z.is_none())
        .all(|r| (r.u_mc - r.u_spectral).abs() <= tol * T::one().max(r.u_spectral.abs()));
    let pass = exact_ok && max_abs_z < T::lit(Z_THRESHOLD);
    let (time_model, theta) = match model.symbol() {
        BernsteinSymbol::Stable { .. } => ("caputo", None),
        BernsteinSymbol::TemperedStable { theta, .. } => ("tempered", Some(theta.to_f64_lossy())),
    };
    let parameters = ComparisonParameters {
        dim: dom.dim(),
        radius: dom.radius().to_f64_lossy(),
        k: bp.k().to_f64_lossy(),
        l: bp.l().to_f64_lossy(),
        lambda: bp.lambda().to_f64_lossy(),
        time_model,
        alpha: model.alpha().get().to_f64_lossy(),
        theta,
        n_max: spectral.n_max,
        n_paths: mc.n_paths,
        seed: mc.seed,
        tempered_step: mc.tempered_step.to_f64_lossy(),
    };
    Ok(ComparisonReport { points, max_abs_z, exact_ok, pass, parameters })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datum::NamedDatum;
    use crate::spectral::{ModeIndex, Parity};
    use crate::stoch::{sample_exit_point, RngStream};
    use crate::symbols::m_phi;
    use std::f64::consts::PI;

    fn grid(n: usize) -> Vec<f64> {
        uniform_grid(1.0, n)
    }

    #[test]
    fn l1_of_constant_is_zero() {
        let t = grid(64);
        let d = caputo_l1(&t, &vec![3.5; 65], 0.4).unwrap();
        assert_eq!(d.len(), 64);
        assert!(d.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn l1_is_exact_for_linear_functions() {
        // D^alpha t = t^{1-alpha}/Gamma(2-alpha); 1/Gamma(1.5) = 1.1283791670955125739
        let t = grid(256);
        let d = caputo_l1(&t, &t, 0.5).unwrap();
        for (dv, &tj) in d.iter().zip(&t[1..]) {
            assert!((dv - tj.sqrt() * 1.128_379_167_095_512_6).abs() < 1e-12);
        }
    }

    #[test]
    fn l1_rejects_bad_grids() {
        assert!(caputo_l1(&[0.0, 1.0], &[0.0, 1.0], 0.5).is_err());
        assert!(caputo_l1(&[0.0, 0.4, 1.0], &[0.0; 3], 0.5).is_err());
        assert!(caputo_l1(&grid(4), &[0.0; 5], 1.0).is_err());
        assert!(caputo_l1(&grid(4), &[0.0; 4], 0.5).is_err());
    }

    #[test]
    fn l1_is_linear() {
        let t = grid(128);
        let f: Vec<f64> = t.iter().map(|x| x * x).collect();
        let g: Vec<f64> = t.iter().map(|x| x.sin()).collect();
        let fg: Vec<f64> = f.iter().zip(&g).map(|(a, b)| a + 2.0 * b).collect();
        let (df, dg, dfg) = (
            caputo_l1(&t, &f, 0.3).unwrap(),
            caputo_l1(&t, &g, 0.3).unwrap(),
            caputo_l1(&t, &fg, 0.3).unwrap(),
        );
        for i in 0..df.len() {
            assert!((dfg[i] - df[i] - 2.0 * dg[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn relaxation_residual_orders() {
        let half = FractionalOrder::new(0.5).unwrap();
        let a: Vec<f64> = relaxation_residual(half, 2.0, 1.0, 512).unwrap();
        let b: Vec<f64> = relaxation_residual(half, 2.0, 1.0, 1024).unwrap();
        let ratio = a.last().unwrap().abs() / b.last().unwrap().abs();
        let target = 2f64.powf(1.5);
        assert!((ratio / target - 1.0).abs() < 0.2, "ratio {ratio}");

        let a: Vec<f64> = relaxation_residual(FractionalOrder::new(0.9).unwrap(), 1.0, 1.0, 256).unwrap();
        let b: Vec<f64> = relaxation_residual(FractionalOrder::new(0.9).unwrap(), 1.0, 1.0, 512).unwrap();
        let order = (a.last().unwrap().abs() / b.last().unwrap().abs()).log2();
        assert!((order - 1.1).abs() < 0.3, "order {order}");

        let z = relaxation_residual(half, 0.0, 1.0, 64).unwrap();
        assert!(z.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn ml_relaxation_solves_the_eigen_equation() {
        // D^{1/2} E_{1/2}(-t^{1/2}) = -E_{1/2}(-t^{1/2})
        let r: Vec<f64> = relaxation_residual(FractionalOrder::new(0.5).unwrap(), 1.0, 1.0, 1024).unwrap();
        assert!(r.last().unwrap().abs() < 1e-3);
    }

    #[test]
    fn m_phi_stable_satisfies_the_eigen_equation() {
        let sym = BernsteinSymbol::stable(0.5).unwrap();
        let t = grid(1024);
        let v: Vec<f64> = t.iter().map(|&s| m_phi(&sym, 0.0, 1.0, s).unwrap()).collect();
        let d = caputo_l1(&t, &v, 0.5).unwrap();
        assert!((d.last().unwrap() + v.last().unwrap()).abs() < 1e-3);
    }

    #[test]
    fn residual_report_invariants() {
        let dom = DomainSpec::disk(1.0).unwrap();
        let bp = BoundaryParams::new(-1.0, 1.0, 0.0).unwrap();
        let field = SpectralField::from_coefficients(
            dom,
            4,
            [
                (ModeIndex::constant(2), 1.0),
                (ModeIndex::circle(1, Parity::Cos).unwrap(), 0.5),
                (ModeIndex::circle(3, Parity::Sin).unwrap(), 0.25),
            ],
        )
        .unwrap();
        let alpha = FractionalOrder::new(0.5).unwrap();
        let rep = residual_check(&dom, &bp, alpha, &field, 1.0, 128).unwrap();
        assert_eq!(rep.grid.len(), 128);
        assert!(rep.residual_max >= rep.residual_l2 / (rep.grid.len() as f64).sqrt());
        assert!(rep.residual_l2 >= 0.0);
        assert_eq!(rep.expected_order, 1.5);
        assert!((rep.observed_order.unwrap() - 1.5).abs() < 0.3);

        let constant = SpectralField::from_coefficients(dom, 0, [(ModeIndex::constant(2), 2.0)]).unwrap();
        let rep = residual_check(&dom, &bp, alpha, &constant, 1.0, 32).unwrap();
        assert_eq!(rep.residual_max, 0.0);
        assert_eq!(rep.observed_order, None);

        // killing shifts every mode: the constant mode then relaxes like E(-Lambda t^alpha)
        let killed = bp.with_lambda(0.5).unwrap();
        let rep = residual_check(&dom, &killed, alpha, &constant, 1.0, 64).unwrap();
        let direct: Vec<f64> = relaxation_residual(alpha, 0.5, 1.0, 64).unwrap();
        assert!((rep.final_residual - 2.0 * direct.last().unwrap().abs()).abs() < 1e-15);

        let unstable = BoundaryParams::new(2.0, 1.0, 0.0).unwrap();
        assert!(residual_check(&dom, &unstable, alpha, &field, 1.0, 32).is_err());
    }

    #[test]
    fn ks_self_test_and_degenerate_law() {
        let mut passes = 0;
        for run in 0..20 {
            let mut rng = RngStream::new(100, run);
            let u: Vec<f64> = (0..100_000).map(|_| rng.uniform()).collect();
            if ks_statistic(&u, |x| x).unwrap() < ks_critical_value(u.len()) {
                passes += 1;
            }
        }
        assert!(passes >= 19, "{passes}/20");
        let c = vec![0.5; 200];
        assert!(ks_statistic(&c, |x: f64| x).unwrap() >= 0.5);
        assert!(ks_statistic(&c[..50], |x: f64| x).is_err());
        assert!(ks_statistic(&[f64::NAN; 200], |x: f64| x).is_err());
    }

    #[test]
    fn exit_angles_from_the_center_are_uniform() {
        let dom = DomainSpec::disk(1.0).unwrap();
        let mut rng = RngStream::new(8, 0);
        let th: Vec<f64> = (0..100_000)
            .map(|_| sample_exit_point(&mut rng, &dom, &Point::origin()).unwrap().angle())
            .collect();
        let d = ks_statistic(&th, |x| x / (2.0 * PI)).unwrap();
        assert!(d < ks_critical_value(th.len()));
    }

    fn benchmark() -> (DomainSpec<f64>, BoundaryParams<f64>, TimeModel<f64>, Vec<(f64, Point<f64>)>) {
        let grid = [0.5, 1.0]
            .iter()
            .flat_map(|&t| [Point::planar(0.5, 0.0), Point::planar(0.0, 0.8)].map(|x| (t, x)))
            .collect();
        (
            DomainSpec::disk(1.0).unwrap(),
            BoundaryParams::new(-1.0, 1.0, 0.0).unwrap(),
            TimeModel::caputo(0.5).unwrap(),
            grid,
        )
    }

    #[test]
    fn constant_datum_compares_exactly() {
        let (dom, bp, model, grid) = benchmark();
        let mc = MCConfig::new(2000, 1, 2, model).unwrap();
        let rep = compare(&dom, &bp, &model, &NamedDatum::Constant(1.0), &grid, &SpectralConfig { n_max: 4 }, &mc)
            .unwrap();
        assert!(rep.points.iter().all(|r| r.z.is_none() && r.u_mc == 1.0));
        assert!(rep.exact_ok && rep.pass);
        assert_eq!(rep.max_abs_z, 0.0);
    }

    #[test]
    fn single_mode_routes_agree_and_scale() {
        let (dom, bp, model, grid) = benchmark();
        let mc = MCConfig::new(20_000, 3, 4, model).unwrap();
        let cos = NamedDatum::Fourier { constant: 0.0, cos: vec![(1, 1.0)], sin: vec![] };
        let spec = SpectralConfig { n_max: 4 };
        let rep = compare(&dom, &bp, &model, &cos, &grid, &spec, &mc).unwrap();
        assert!(rep.pass, "max |z| = {}", rep.max_abs_z);
        let scaled = compare(&dom, &bp, &model, &cos.scaled(3.0), &grid, &spec, &mc).unwrap();
        for (a, b) in rep.points.iter().zip(&scaled.points) {
            assert!((b.u_mc - 3.0 * a.u_mc).abs() < 1e-12);
            assert!((b.z.unwrap() - a.z.unwrap()).abs() < 1e-9);
        }
        let mut csv = Vec::new();
        rep.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("t,x1,x2,u_spectral,u_mc,stderr,z\n"));
        assert_eq!(text.lines().count(), grid.len() + 1);
        let json: serde_json::Value = serde_json::from_str(&rep.summary_json()).unwrap();
        assert_eq!(json["parameters"]["seed"], 3);
        assert!(json.get("n_shards").is_none());
    }

    #[test]
    fn compare_requires_the_process() {
        let (dom, _, model, grid) = benchmark();
        let bp = BoundaryParams::new(0.5, 1.0, 0.0).unwrap();
        let mc = MCConfig::new(10, 1, 1, model).unwrap();
        assert!(compare(&dom, &bp, &model, &NamedDatum::Constant(1.0), &grid, &SpectralConfig { n_max: 2 }, &mc)
            .is_err());
    }
}
