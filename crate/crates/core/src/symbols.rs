//! Mittag-Leffler function, Bernstein symbols, Lévy tails and the
//! relaxation function `M^Λ_Φ(t, λ) = E[exp(-(λ + Λ) L_t)]`.
//!
//! The Mittag-Leffler function is only evaluated on the non-positive real
//! axis. Four regimes are used:
//!
//! * `|z| <= 1`: compensated power series;
//! * `1 < |z| < 50`: real integral representation (Gorenflo-Loutchko-Luchko
//!   kernel in logarithmic variables), or for `alpha = 1` the
//!   incomplete-exponential integral;
//! * `|z| >= 50`: algebraic asymptotic expansion with optimal truncation;
//! * `alpha = beta = 1`: `exp(z)`.
//!
//! For `|z| > 1` the second parameter is first reduced into `(0, 1 + alpha)`
//! through `E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::laplace::{talbot, TALBOT_NODES};
use crate::quad::Adaptive;
use crate::real::{sin_pi, Real};
use crate::special::{gamma, gamma_neg_order_tail, ln_gamma, rgamma};

const SERIES_RADIUS: f64 = 1.0;
const ASYMPTOTIC_RADIUS: f64 = 50.0;

/// Order `alpha in (0, 1]` of the Caputo derivative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder<T>(T);

impl<T: Real> FractionalOrder<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha > T::zero() && alpha <= T::one() {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidParameter(format!(
                "fractional order must lie in (0, 1], got {alpha}"
            )))
        }
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.0 == T::one()
    }
}

/// Parameters `(alpha, beta)` of `E_{alpha,beta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams<T> {
    alpha: T,
    beta: T,
}

impl<T: Real> MLParams<T> {
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        FractionalOrder::new(alpha)?;
        if !(beta > T::zero()) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    /// `E_{alpha,1}`.
    pub fn classical(alpha: FractionalOrder<T>) -> Self {
        Self {
            alpha: alpha.get(),
            beta: T::one(),
        }
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }
}

/// Mittag-Leffler function `E_{alpha,beta}(z)` for `z <= 0`.
pub fn ml_e<T: Real>(params: MLParams<T>, z: T) -> Result<T> {
    if z.is_nan() || z > T::zero() {
        return Err(Error::Domain(format!(
            "Mittag-Leffler argument must be <= 0, got {z}"
        )));
    }
    let MLParams { alpha, beta } = params;
    if alpha == T::one() && beta == T::one() {
        return Ok(z.exp());
    }
    let x = -z;
    if x == T::zero() {
        return Ok(rgamma(beta));
    }
    if x.is_infinite() {
        return Ok(T::zero());
    }
    if x <= T::lit(SERIES_RADIUS) {
        return Ok(ml_series(alpha, beta, z));
    }
    Ok(ml_reduced(alpha, beta, x))
}

/// `E_{alpha,beta}(-x)` for `x > 1`, reducing `beta` below `1 + alpha` first.
fn ml_reduced<T: Real>(alpha: T, beta: T, x: T) -> T {
    if alpha < T::one() && x >= T::lit(ASYMPTOTIC_RADIUS) {
        return ml_asymptotic(alpha, beta, x);
    }
    // keep the kernel exponent (1 - beta)/alpha in [0, 1)
    if beta > T::one() && (alpha < T::one() || beta >= T::lit(2.0)) {
        let lower = ml_reduced(alpha, beta - alpha, x);
        return (lower - rgamma(beta - alpha)) / (-x);
    }
    if alpha == T::one() {
        if beta == T::one() {
            return (-x).exp();
        }
        if x >= T::lit(ASYMPTOTIC_RADIUS) {
            return ml_asymptotic(alpha, beta, x);
        }
        if beta > T::one() {
            return ml_alpha_one_integral(beta, x);
        }
        // E_{1,b}(z) = z E_{1,b+1}(z) + 1/Gamma(b)
        return -x * ml_alpha_one_integral(beta + T::one(), x) + rgamma(beta);
    }
    ml_kernel_integral(alpha, beta, x)
}

fn ml_series<T: Real>(alpha: T, beta: T, z: T) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    let mut zpow = T::one();
    let tol = T::lit(1e-17);
    for k in 0..5000 {
        let arg = alpha * T::of_usize(k) + beta;
        let term = zpow * rgamma(arg);
        // Kahan
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        if arg > T::lit(2.0) && term.abs() <= tol * sum.abs() {
            break;
        }
        zpow *= z;
        if zpow == T::zero() {
            break;
        }
    }
    sum
}

/// `-sum_{k>=1} z^{-k} / Gamma(beta - alpha k)` at `z = -x`, truncated at
/// its smallest term. Requires `beta < 1 + alpha`.
fn ml_asymptotic<T: Real>(alpha: T, beta: T, x: T) -> T {
    let lx = x.ln();
    let mut sum = T::zero();
    let mut prev_bound = T::infinity();
    for k in 1..2000 {
        let kf = T::of_usize(k);
        let arg = beta - alpha * kf;
        let sign = if k % 2 == 1 { T::one() } else { -T::one() };
        if arg > T::zero() {
            // leading terms while 1/Gamma is still evaluated directly
            sum += sign * rgamma(arg) * (-kf * lx).exp();
            continue;
        }
        // 1/Gamma(arg) = Gamma(1 - arg) sin(pi arg) / pi, with 1 - arg >= 1
        let bound = (ln_gamma(T::one() - arg) - kf * lx).exp() / T::PI();
        if bound > prev_bound {
            break;
        }
        sum += sign * sin_pi(arg) * bound;
        if bound < T::lit(1e-18) * sum.abs().max(T::min_positive_value()) {
            break;
        }
        prev_bound = bound;
    }
    sum
}

/// Real integral representation for `0 < alpha < 1`, `0 < beta < 1 + alpha`,
/// `z = -x < 0`, written in the variable `y = ln(chi / x)`.
fn ml_kernel_integral<T: Real>(alpha: T, beta: T, x: T) -> T {
    let p = (T::one() - beta) / alpha;
    let s1 = sin_pi(T::one() - beta);
    let s2 = sin_pi(T::one() - beta + alpha);
    let cos_half = (alpha * T::FRAC_PI_2()).cos();
    let cos_half_sq = cos_half * cos_half;
    let lx = x.ln();
    let inv_alpha = T::one() / alpha;
    let integrand = |y: T| {
        let lchi = lx + y;
        let cutoff = (lchi * inv_alpha).exp();
        if cutoff > T::lit(745.0) {
            return T::zero();
        }
        let sh = (y / T::lit(2.0)).sinh();
        // 2 (cosh y + cos(alpha pi)) = 4 (sinh^2(y/2) + cos^2(alpha pi / 2))
        let denom = T::lit(4.0) * (sh * sh + cos_half_sq);
        (p * lchi - cutoff).exp() * (y.exp() * s1 + s2) / denom
    };
    let right = alpha * T::lit(45.0).ln() - lx;
    let left = -(T::lit(42.0) / (p + T::one())).max(T::lit(40.0));
    let mut points = vec![left, right];
    for c in [T::zero(), -lx, T::lit(-5.0)] {
        if c > left && c < right {
            points.push(c);
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    points.dedup();
    let quad = Adaptive::with_tol(T::lit(1e-16), T::epsilon() * T::lit(4.0));
    quad.integrate_over(&points, integrand).value / (alpha * T::PI())
}

/// `E_{1,beta}(-x) = (1/Gamma(beta)) int_0^1 exp(-x (1 - u^{1/(beta-1)})) du`, `beta > 1`.
fn ml_alpha_one_integral<T: Real>(beta: T, x: T) -> T {
    let e = T::one() / (beta - T::one());
    let quad = Adaptive::with_tol(T::lit(1e-16), T::epsilon() * T::lit(4.0));
    let mut points = vec![T::zero(), T::one()];
    // the integrand rises from e^-x to 1 near u = (1 - 1/x)^(beta-1)
    let knee = (T::one() - T::one() / x).powf(beta - T::one());
    if knee > T::zero() && knee < T::one() {
        points.insert(1, knee);
    }
    let v = quad
        .integrate_over(&points, |u| (-x * (T::one() - u.powf(e))).exp())
        .value;
    v * rgamma(beta)
}

/// Laplace exponent `Phi` of the subordinator driving the time change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BernsteinSymbol<T> {
    /// `Phi(lam) = lam^alpha`.
    Stable { alpha: FractionalOrder<T> },
    /// `Phi(lam) = (lam + theta)^alpha - theta^alpha`.
    TemperedStable { alpha: FractionalOrder<T>, theta: T },
}

impl<T: Real> BernsteinSymbol<T> {
    pub fn stable(alpha: T) -> Result<Self> {
        Ok(Self::Stable {
            alpha: FractionalOrder::new(alpha)?,
        })
    }

    pub fn tempered(alpha: T, theta: T) -> Result<Self> {
        if !(theta > T::zero()) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tempering parameter must be > 0, got {theta}"
            )));
        }
        Ok(Self::TemperedStable {
            alpha: FractionalOrder::new(alpha)?,
            theta,
        })
    }

    pub fn alpha(&self) -> FractionalOrder<T> {
        match *self {
            Self::Stable { alpha } | Self::TemperedStable { alpha, .. } => alpha,
        }
    }

    /// `Phi(lam)` for `lam >= 0`.
    pub fn eval(&self, lam: T) -> Result<T> {
        if lam.is_nan() || lam < T::zero() {
            return Err(Error::Domain(format!("Phi needs lam >= 0, got {lam}")));
        }
        if lam == T::zero() {
            return Ok(T::zero());
        }
        Ok(match *self {
            Self::Stable { alpha } => lam.powf(alpha.get()),
            Self::TemperedStable { alpha, theta } => {
                let a = alpha.get();
                // theta^a ((1 + lam/theta)^a - 1), accurate for lam << theta
                theta.powf(a) * (a * (lam / theta).ln_1p()).exp_m1()
            }
        })
    }

    /// `Phi(s)` on the principal branch, for the Talbot contour.
    pub fn eval_complex(&self, s: Complex<T>) -> Complex<T> {
        match *self {
            Self::Stable { alpha } => s.powf(alpha.get()),
            Self::TemperedStable { alpha, theta } => {
                let a = alpha.get();
                (s + theta).powf(a) - Complex::new(theta.powf(a), T::zero())
            }
        }
    }

    /// Tail `kappa(t) = Pi(t, inf)` of the Lévy measure.
    pub fn kappa_tail(&self, t: T) -> Result<T> {
        if t.is_nan() || t <= T::zero() {
            return Err(Error::Domain(format!("kappa needs t > 0, got {t}")));
        }
        let alpha = self.alpha();
        if alpha.is_one() {
            return Err(Error::LocalTimeDerivative);
        }
        let a = alpha.get();
        Ok(match *self {
            Self::Stable { .. } => t.powf(-a) / gamma(T::one() - a),
            Self::TemperedStable { theta, .. } => {
                // alpha/Gamma(1-alpha) int_t^inf e^{-theta s} s^{-alpha-1} ds
                a * theta.powf(a) * gamma_neg_order_tail(a, theta * t) / gamma(T::one() - a)
            }
        })
    }
}

/// `Phi(lam)`.
pub fn phi_eval<T: Real>(sym: &BernsteinSymbol<T>, lam: T) -> Result<T> {
    sym.eval(lam)
}

/// `kappa(t) = Pi(t, inf)`.
pub fn kappa_tail<T: Real>(sym: &BernsteinSymbol<T>, t: T) -> Result<T> {
    sym.kappa_tail(t)
}

/// `M^Λ_Φ(t, λ) = E_0[exp(-(λ + Λ) L_t)]`.
pub fn m_phi<T: Real>(sym: &BernsteinSymbol<T>, killing: T, lam: T, t: T) -> Result<T> {
    let mu = lam + killing;
    if mu.is_nan() || mu < T::zero() {
        return Err(Error::Domain(format!("lam + Lambda must be >= 0, got {mu}")));
    }
    if t.is_nan() || t < T::zero() {
        return Err(Error::Domain(format!("t must be >= 0, got {t}")));
    }
    if t == T::zero() || mu == T::zero() {
        return Ok(T::one());
    }
    let alpha = sym.alpha();
    if alpha.is_one() {
        // Phi(lam) = lam in both families: L_t = t
        return Ok((-mu * t).exp());
    }
    match *sym {
        BernsteinSymbol::Stable { alpha } => {
            ml_e(MLParams::classical(alpha), -mu * t.powf(alpha.get()))
        }
        BernsteinSymbol::TemperedStable { .. } => {
            let v = talbot(
                |s: Complex<T>| {
                    let phi = sym.eval_complex(s);
                    phi / s / (phi + mu)
                },
                t,
                TALBOT_NODES,
            );
            Ok(v.max(T::zero()).min(T::one()))
        }
    }
}

/// Time non-locality of the boundary condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeModel<T> {
    /// Caputo-Džrbašjan derivative of order alpha.
    Caputo(FractionalOrder<T>),
    /// General convolution derivative `D^Φ_t`.
    Symbol(BernsteinSymbol<T>),
}

impl<T: Real> TimeModel<T> {
    pub fn caputo(alpha: T) -> Result<Self> {
        Ok(Self::Caputo(FractionalOrder::new(alpha)?))
    }

    pub fn alpha(&self) -> FractionalOrder<T> {
        match self {
            Self::Caputo(a) => *a,
            Self::Symbol(s) => s.alpha(),
        }
    }

    pub fn symbol(&self) -> BernsteinSymbol<T> {
        match *self {
            Self::Caputo(alpha) => BernsteinSymbol::Stable { alpha },
            Self::Symbol(s) => s,
        }
    }

    /// Weight of a mode with shifted eigenvalue `mu = λ + Λ` at time `t`.
    pub fn relaxation(&self, mu: T, t: T) -> Result<T> {
        match *self {
            Self::Caputo(alpha) => {
                if mu < T::zero() {
                    return Err(Error::Domain(format!("eigenvalue {mu} < 0")));
                }
                if t == T::zero() {
                    return Ok(T::one());
                }
                if alpha.is_one() {
                    Ok((-mu * t).exp())
                } else {
                    ml_e(MLParams::classical(alpha), -mu * t.powf(alpha.get()))
                }
            }
            Self::Symbol(sym) => m_phi(&sym, T::zero(), mu, t),
        }
    }

    /// Is the inverse subordinator a stable one (closed-form sampler)?
    pub fn is_stable(&self) -> bool {
        matches!(self.symbol(), BernsteinSymbol::Stable { .. })
    }
}
