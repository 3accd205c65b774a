//! Sharded, reproducible Monte Carlo estimator of the probabilistic
//! representation `u(t, x) = E_x[ e^{-Lambda L_t} u0(X^Gamma(L_t)) ]`, started from
//! the harmonic-measure exit point of `x`.
//!
//! Paths are grouped in fixed blocks of [`BLOCK_SIZE`]; block `b` always draws from
//! `RngStream(seed, b)` and its moments are merged in block order, so the estimate
//! does not depend on how blocks are spread over shards or threads.

use rayon::prelude::*;

use crate::datum::BoundaryDatum;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, DomainSpec, Point};
use crate::real::Real;
use crate::spectral::BoundaryParams;
use crate::stoch::{
    sample_boundary_process, sample_exit_point, sample_inverse_stable, sample_inverse_tempered, RngStream,
};
use crate::symbols::{BernsteinSymbol, TimeModel};

/// Paths per random stream.
pub const BLOCK_SIZE: u64 = 1024;

/// Default grid step of the tempered inverse-subordinator sampler, relative to `t`.
pub const DEFAULT_TEMPERED_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCConfig<T> {
    pub n_paths: u64,
    pub seed: u64,
    pub n_shards: usize,
    pub time_model: TimeModel<T>,
    /// Tempered sampler grid step as a fraction of `t`.
    pub tempered_step: T,
}

impl<T: Real> MCConfig<T> {
    pub fn new(n_paths: u64, seed: u64, n_shards: usize, time_model: TimeModel<T>) -> Result<Self> {
        let cfg = Self { n_paths, seed, n_shards, time_model, tempered_step: T::lit(DEFAULT_TEMPERED_STEP) };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_shards(mut self, n_shards: usize) -> Result<Self> {
        self.n_shards = n_shards;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tempered_step(mut self, step: T) -> Result<Self> {
        self.tempered_step = step;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 || self.n_shards == 0 {
            return Err(Error::InvalidParameter("n_paths and n_shards must be positive".into()));
        }
        if (self.n_shards as u64) > self.n_paths {
            return Err(Error::InvalidParameter(format!(
                "n_shards = {} exceeds n_paths = {}",
                self.n_shards, self.n_paths
            )));
        }
        if !(self.tempered_step > T::zero()) || !self.tempered_step.is_finite() {
            return Err(Error::InvalidParameter(format!("tempered step {}", self.tempered_step)));
        }
        Ok(())
    }
}

/// Sample mean with its standard error and 95% normal interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate<T> {
    pub mean: T,
    pub stderr: T,
    pub n: u64,
    pub ci95: (T, T),
}

impl<T: Real> MCEstimate<T> {
    fn from_moments(m: &Moments<T>) -> Self {
        let stderr = if m.n > 1 {
            (m.m2 / T::lit((m.n - 1) as f64) / T::lit(m.n as f64)).sqrt()
        } else {
            T::infinity()
        };
        let half = T::lit(1.96) * stderr;
        Self { mean: m.mean, stderr, n: m.n, ci95: (m.mean - half, m.mean + half) }
    }
}

/// Welford accumulator; merged with Chan's update.
#[derive(Debug, Clone, Copy)]
struct Moments<T> {
    n: u64,
    mean: T,
    m2: T,
}

impl<T: Real> Moments<T> {
    fn new() -> Self {
        Self { n: 0, mean: T::zero(), m2: T::zero() }
    }

    fn push(&mut self, x: T) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / T::lit(self.n as f64);
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Self) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *o;
            return;
        }
        let (na, nb) = (T::lit(self.n as f64), T::lit(o.n as f64));
        let n = na + nb;
        let d = o.mean - self.mean;
        self.mean += d * nb / n;
        self.m2 += o.m2 + d * d * na * nb / n;
        self.n += o.n;
    }
}

/// One simulated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample<T> {
    /// Intrinsic time `L_t` (or `s` for the unsubordinated estimator).
    pub elapsed: T,
    pub start: BoundaryPoint<T>,
    pub end: BoundaryPoint<T>,
    /// `u0` at the end point.
    pub datum: T,
    /// `e^{-Lambda elapsed}`.
    pub weight: T,
    pub value: T,
}

#[derive(Debug, Clone, Copy)]
enum Clock<T> {
    Fixed(T),
    Model(TimeModel<T>, T),
}

struct Problem<'a, T, D: ?Sized> {
    dom: DomainSpec<T>,
    bp: BoundaryParams<T>,
    u0: &'a D,
    x: Point<T>,
    on_boundary: Option<BoundaryPoint<T>>,
    clock: Clock<T>,
    tempered_delta: T,
}

impl<'a, T: Real, D: BoundaryDatum<T> + ?Sized> Problem<'a, T, D> {
    fn new(
        dom: &DomainSpec<T>,
        bp: &BoundaryParams<T>,
        u0: &'a D,
        x: &Point<T>,
        clock: Clock<T>,
        cfg: &MCConfig<T>,
    ) -> Result<Self> {
        cfg.validate()?;
        bp.require_process()?;
        if dom.dim() != 2 {
            return Err(Error::Unsupported("Monte Carlo route needs the boundary process, available on the disk only".into()));
        }
        let t = match clock {
            Clock::Fixed(s) | Clock::Model(_, s) => s,
        };
        if !(t >= T::zero()) || !t.is_finite() {
            return Err(Error::Domain(format!("time {t} must be finite and >= 0")));
        }
        let r = dom.check_closure(x)?;
        let on_boundary = if (r - dom.radius()).abs() <= dom.radius() * T::lit(1e-12) {
            Some(dom.boundary_point(x)?)
        } else {
            None
        };
        Ok(Self {
            dom: *dom,
            bp: *bp,
            u0,
            x: *x,
            on_boundary,
            clock,
            tempered_delta: cfg.tempered_step * t,
        })
    }

    fn elapsed(&self, rng: &mut RngStream) -> Result<T> {
        match self.clock {
            Clock::Fixed(s) => Ok(s),
            Clock::Model(model, t) => match model.symbol() {
                BernsteinSymbol::Stable { alpha } => sample_inverse_stable(rng, alpha, t),
                BernsteinSymbol::TemperedStable { alpha, theta } => {
                    if alpha.is_one() {
                        Ok(t)
                    } else {
                        sample_inverse_tempered(rng, alpha.get(), theta, t, self.tempered_delta)
                    }
                }
            },
        }
    }

    fn path(&self, rng: &mut RngStream) -> Result<PathSample<T>> {
        let start = match self.on_boundary {
            Some(y) => y,
            None => sample_exit_point(rng, &self.dom, &self.x)?,
        };
        let elapsed = self.elapsed(rng)?;
        let end = sample_boundary_process(rng, &self.dom, &self.bp, &start, elapsed)?;
        let datum = self.u0.value(&end);
        if !datum.is_finite() {
            return Err(Error::NonFinite(format!("u0 at {end:?}")));
        }
        let weight = (-self.bp.lambda() * elapsed).exp();
        Ok(PathSample { elapsed, start, end, datum, weight, value: weight * datum })
    }

    fn block(&self, seed: u64, b: u64, n_paths: u64, mut sink: impl FnMut(PathSample<T>)) -> Result<()> {
        let mut rng = RngStream::new(seed, b);
        let end = ((b + 1) * BLOCK_SIZE).min(n_paths);
        for _ in b * BLOCK_SIZE..end {
            sink(self.path(&mut rng)?);
        }
        Ok(())
    }

    fn estimate(&self, cfg: &MCConfig<T>) -> Result<MCEstimate<T>> {
        let n_blocks = cfg.n_paths.div_ceil(BLOCK_SIZE);
        let shards = cfg.n_shards as u64;
        let per_shard: Vec<Vec<(u64, Moments<T>)>> = (0..shards)
            .into_par_iter()
            .map(|s| {
                let mut out = Vec::new();
                let mut b = s;
                while b < n_blocks {
                    let mut m = Moments::new();
                    self.block(cfg.seed, b, cfg.n_paths, |p| m.push(p.value))?;
                    out.push((b, m));
                    b += shards;
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let mut blocks = vec![Moments::new(); n_blocks as usize];
        for (b, m) in per_shard.into_iter().flatten() {
            blocks[b as usize] = m;
        }
        let mut total = Moments::new();
        for m in &blocks {
            total.merge(m);
        }
        Ok(MCEstimate::from_moments(&total))
    }

    fn samples(&self, cfg: &MCConfig<T>) -> Result<Vec<PathSample<T>>> {
        let mut out = Vec::with_capacity(cfg.n_paths as usize);
        for b in 0..cfg.n_paths.div_ceil(BLOCK_SIZE) {
            self.block(cfg.seed, b, cfg.n_paths, |p| out.push(p))?;
        }
        Ok(out)
    }
}

/// Estimates `u(t, x)`; needs `k <= 0` and the disk.
pub fn estimate_solution<T: Real, D: BoundaryDatum<T> + ?Sized>(
    dom: &DomainSpec<T>,
    bp: &BoundaryParams<T>,
    u0: &D,
    t: T,
    x: &Point<T>,
    cfg: &MCConfig<T>,
) -> Result<MCEstimate<T>> {
    Problem::new(dom, bp, u0, x, Clock::Model(cfg.time_model, t), cfg)?.estimate(cfg)
}

/// Estimates the unsubordinated solution `e^{-Lambda s} w(s, x)` at intrinsic time `s`.
pub fn estimate_w<T: Real, D: BoundaryDatum<T> + ?Sized>(
    dom: &DomainSpec<T>,
    bp: &BoundaryParams<T>,
    u0: &D,
    s: T,
    x: &Point<T>,
    cfg: &MCConfig<T>,
) -> Result<MCEstimate<T>> {
    Problem::new(dom, bp, u0, x, Clock::Fixed(s), cfg)?.estimate(cfg)
}

/// The individual paths behind [`estimate_solution`], in block order.
pub fn solution_paths<T: Real, D: BoundaryDatum<T> + ?Sized>(
    dom: &DomainSpec<T>,
    bp: &BoundaryParams<T>,
    u0: &D,
    t: T,
    x: &Point<T>,
    cfg: &MCConfig<T>,
) -> Result<Vec<PathSample<T>>> {
    Problem::new(dom, bp, u0, x, Clock::Model(cfg.time_model, t), cfg)?.samples(cfg)
}

/// The individual paths behind [`estimate_w`], in block order.
pub fn w_paths<T: Real, D: BoundaryDatum<T> + ?Sized>(
    dom: &DomainSpec<T>,
    bp: &BoundaryParams<T>,
    u0: &D,
    s: T,
    x: &Point<T>,
    cfg: &MCConfig<T>,
) -> Result<Vec<PathSample<T>>> {
    Problem::new(dom, bp, u0, x, Clock::Fixed(s), cfg)?.samples(cfg)
}

/// Mean and standard error of arbitrary per-path values, merged exactly as the
/// estimator merges them (blocks of [`BLOCK_SIZE`] in order).
pub fn summarize<T: Real>(values: &[T]) -> MCEstimate<T> {
    let mut total = Moments::new();
    for chunk in values.chunks(BLOCK_SIZE as usize) {
        let mut m = Moments::new();
        for &v in chunk {
            m.push(v);
        }
        total.merge(&m);
    }
    MCEstimate::from_moments(&total)
}
