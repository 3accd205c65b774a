//! Exact samplers: one-sided stable and tempered-stable subordinators, the
//! inverse process `L_t`, harmonic-measure exit points and the boundary Lévy
//! process on the circle.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};
use crate::real::{wrap_angle, Real};
use crate::spectral::BoundaryParams;
use crate::special::zolotarev_k;
use crate::symbols::FractionalOrder;

pub use crate::geometry::BoundaryPoint;

/// A seeded random stream; `(seed, stream_id)` fixes the whole sequence and distinct
/// stream ids give independent ChaCha streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self { seed, stream_id, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on the open interval `(0, 1)` from the top 53 bits.
    pub fn uniform<T: Real>(&mut self) -> T {
        T::lit(((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64))
    }

    pub fn exponential<T: Real>(&mut self) -> T {
        let e: f64 = Exp1.sample(&mut self.rng);
        T::lit(e)
    }

    pub fn normal<T: Real>(&mut self) -> T {
        let z: f64 = StandardNormal.sample(&mut self.rng);
        T::lit(z)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

fn open_unit<T: Real>(alpha: T) -> Result<()> {
    if !(alpha > T::zero() && alpha < T::one()) {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

/// Standard one-sided stable variate, `E e^{-lam S} = e^{-lam^alpha}` (Kanter's
/// representation: one uniform angle, one unit exponential).
pub fn sample_stable<T: Real>(rng: &mut RngStream, alpha: T) -> Result<T> {
    open_unit(alpha)?;
    Ok(stable_unchecked(rng, alpha))
}

fn stable_unchecked<T: Real>(rng: &mut RngStream, alpha: T) -> T {
    let u = T::PI() * rng.uniform::<T>();
    let e = rng.exponential::<T>();
    (zolotarev_k(alpha, u) / e).powf((T::one() - alpha) / alpha)
}

/// `L_t = (t/S)^alpha`; exact in law for a single `t`. `alpha = 1` gives `t` and
/// consumes no randomness.
pub fn sample_inverse_stable<T: Real>(rng: &mut RngStream, alpha: FractionalOrder<T>, t: T) -> Result<T> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::Domain(format!("t = {t} must be finite and >= 0")));
    }
    if alpha.is_one() || t == T::zero() {
        return Ok(t);
    }
    let a = alpha.get();
    Ok((t / stable_unchecked(rng, a)).powf(a))
}

/// Tempered subordinator increments over a step `delta`: stable proposals of scale
/// `delta^{1/alpha}` accepted with probability `e^{-theta x}`.
///
/// The accepted law has Laplace exponent `delta ((lam + theta)^alpha - theta^alpha)`
/// exactly; the acceptance rate is `e^{-delta theta^alpha}`.
fn tempered_increment<T: Real>(rng: &mut RngStream, alpha: T, theta: T, scale: T) -> T {
    loop {
        let x = scale * stable_unchecked(rng, alpha);
        if rng.uniform::<T>() <= (-theta * x).exp() {
            return x;
        }
    }
}

/// First passage of the tempered-stable subordinator simulated on the grid
/// `{delta, 2 delta, ...}`, answered for every time in `times` (ascending) from one
/// shared path, so the results are nondecreasing in `t`.
///
/// With `H((n-1) delta) <= t < H(n delta)` the true `L_t` lies in `[(n-1) delta, n delta]`;
/// the returned value interpolates `H` linearly there, so its error is at most `delta`.
pub fn sample_inverse_tempered_path<T: Real>(
    rng: &mut RngStream,
    alpha: T,
    theta: T,
    times: &[T],
    delta: T,
) -> Result<Vec<T>> {
    open_unit(alpha)?;
    if !(theta > T::zero()) || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("theta must be > 0, got {theta}")));
    }
    if !(delta > T::zero()) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("grid step must be > 0, got {delta}")));
    }
    if times.iter().any(|t| !(*t >= T::zero()) || !t.is_finite()) {
        return Err(Error::Domain("times must be finite and >= 0".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("times must be ascending".into()));
    }
    let scale = delta.powf(T::one() / alpha);
    let mut out = Vec::with_capacity(times.len());
    let (mut h, mut steps) = (T::zero(), 0usize);
    let mut prev_h = T::zero();
    for &t in times {
        if t == T::zero() {
            out.push(T::zero());
            continue;
        }
        while h <= t {
            prev_h = h;
            h += tempered_increment(rng, alpha, theta, scale);
            steps += 1;
        }
        let frac = (t - prev_h) / (h - prev_h);
        out.push(delta * (T::of_usize(steps - 1) + frac));
    }
    Ok(out)
}

/// Single-time version of [`sample_inverse_tempered_path`]; `t = 0` returns 0.
pub fn sample_inverse_tempered<T: Real>(rng: &mut RngStream, alpha: T, theta: T, t: T, delta: T) -> Result<T> {
    Ok(sample_inverse_tempered_path(rng, alpha, theta, &[t], delta)?[0])
}

/// Wrapped-Cauchy deviation with mean resultant length `rho`, by the tan-half-angle
/// inverse CDF.
fn wrapped_cauchy<T: Real>(rng: &mut RngStream, rho: T) -> T {
    let u = rng.uniform::<T>();
    let q = (T::one() - rho) / (T::one() + rho);
    T::lit(2.0) * (q * (T::PI() * (u - T::lit(0.5))).tan()).atan()
}

/// Exit point of Brownian motion started at interior `x` (harmonic measure).
///
/// Disk: `arg x` plus a wrapped-Cauchy deviation with `rho = |x|/R`. Ball: the cosine of
/// the angle to `x` is drawn from the closed-form inverse CDF of the Poisson kernel and
/// the azimuth about `x` is uniform.
pub fn sample_exit_point<T: Real>(rng: &mut RngStream, dom: &DomainSpec<T>, x: &Point<T>) -> Result<BoundaryPoint<T>> {
    let r = dom.check_closure(x)?;
    if r >= dom.radius() {
        return Err(Error::Domain(format!("|x| = {r} is not interior")));
    }
    let rho = r / dom.radius();
    if dom.dim() == 2 {
        let base = if r == T::zero() { T::zero() } else { x.y.atan2(x.x) };
        return Ok(BoundaryPoint::Circle(base + wrapped_cauchy(rng, rho)).normalized(dom.radius()));
    }
    let u = rng.uniform::<T>();
    let phi = T::lit(2.0) * T::PI() * rng.uniform::<T>();
    let one = T::one();
    let two = T::lit(2.0);
    // cos(gamma) = N / a^2 with a = 1 - rho + 2 rho U
    let a = one - rho + two * rho * u;
    let n = two * u - one + two * rho * (one - u + u * u) - rho * rho + two * rho * rho * u
        - two * rho * rho * rho * u * (one - u);
    let c = (n / (a * a)).max(-one).min(one);
    let s = (one - c * c).max(T::zero()).sqrt();
    let axis = if r == T::zero() { Point::new(T::zero(), T::zero(), one) } else { x.scale(one / r) };
    let (e1, e2) = orthonormal_frame(&axis);
    let dir = Point::new(
        c * axis.x + s * (phi.cos() * e1.x + phi.sin() * e2.x),
        c * axis.y + s * (phi.cos() * e1.y + phi.sin() * e2.y),
        c * axis.z + s * (phi.cos() * e1.z + phi.sin() * e2.z),
    );
    Ok(BoundaryPoint::Sphere(dir).normalized(dom.radius()))
}

fn orthonormal_frame<T: Real>(a: &Point<T>) -> (Point<T>, Point<T>) {
    // pick the coordinate axis least aligned with a
    let helper = if a.x.abs() <= a.y.abs() && a.x.abs() <= a.z.abs() {
        Point::new(T::one(), T::zero(), T::zero())
    } else if a.y.abs() <= a.z.abs() {
        Point::new(T::zero(), T::one(), T::zero())
    } else {
        Point::new(T::zero(), T::zero(), T::one())
    };
    let d = helper.dot(a);
    let e1 = Point::new(helper.x - d * a.x, helper.y - d * a.y, helper.z - d * a.z);
    let e1 = e1.scale(T::one() / e1.norm());
    let e2 = Point::new(a.y * e1.z - a.z * e1.y, a.z * e1.x - a.x * e1.z, a.x * e1.y - a.y * e1.x);
    (e1, e2)
}

/// Advances the boundary process on the circle by intrinsic time `s`:
/// `theta + N(0, 2 l s / R^2) + WrappedCauchy(scale |k| s / R)`.
///
/// Always draws one normal and one uniform, so random-number use does not depend on the
/// parameters.
pub fn sample_boundary_process<T: Real>(
    rng: &mut RngStream,
    dom: &DomainSpec<T>,
    bp: &BoundaryParams<T>,
    y0: &BoundaryPoint<T>,
    s: T,
) -> Result<BoundaryPoint<T>> {
    bp.require_process()?;
    if dom.dim() != 2 {
        return Err(Error::Unsupported("the boundary process is implemented on the circle only".into()));
    }
    if !(s >= T::zero()) || !s.is_finite() {
        return Err(Error::Domain(format!("elapsed time {s} must be finite and >= 0")));
    }
    if s == T::zero() {
        return Ok(*y0);
    }
    let r = dom.radius();
    let z = rng.normal::<T>();
    let sigma = (T::lit(2.0) * bp.l() * s).sqrt() / r;
    let c = -bp.k() * s / r;
    let jump = wrapped_cauchy(rng, (-c).exp());
    Ok(BoundaryPoint::Circle(wrap_angle(y0.angle() + sigma * z + jump)))
}
