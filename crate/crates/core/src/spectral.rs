//! Explicit eigengeometry of the reactive-diffusive boundary operator on the
//! disk and ball, projection of boundary data, and the series solutions.
//!
//! On the circle of radius `R` the orthonormal basis (arclength measure) is
//! `1/sqrt(2 pi R)`, `cos(n theta)/sqrt(pi R)`, `sin(n theta)/sqrt(pi R)`; on
//! the sphere it is the real spherical harmonics divided by `R`. A mode of
//! degree `d` extends harmonically as `(r/R)^d` times its boundary value and
//! has eigenvalue `-k d/R + l sigma_d + Lambda`, with `sigma_d = d^2/R^2`
//! (circle) or `d(d+1)/R^2` (sphere).

use std::collections::BTreeMap;

use log::warn;

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, Adaptive, GaussLegendre};
use crate::real::{sin_pi, Real};
use crate::special::{ln_gamma, zolotarev_k};
use crate::symbols::{FractionalOrder, TimeModel};

pub use crate::geometry::{BoundaryPoint, DomainSpec, Point};

/// Coefficients `k`, `l`, `Lambda` of the boundary operator `k A_DN + l Delta_Gamma - Lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryParams<T> {
    k: T,
    l: T,
    lambda: T,
}

impl<T: Real> BoundaryParams<T> {
    pub fn new(k: T, l: T, lambda: T) -> Result<Self> {
        if !(k.is_finite() && l.is_finite() && lambda.is_finite()) {
            return Err(Error::NonFinite(format!("k = {k}, l = {l}, Lambda = {lambda}")));
        }
        if l < T::zero() {
            return Err(Error::InvalidParameter(format!("l must be >= 0, got {l}")));
        }
        if lambda < T::zero() {
            return Err(Error::InvalidParameter(format!("Lambda must be >= 0, got {lambda}")));
        }
        if k > T::zero() && l == T::zero() {
            return Err(Error::InvalidParameter("k > 0 requires l > 0".into()));
        }
        Ok(Self { k, l, lambda })
    }

    pub fn k(&self) -> T {
        self.k
    }

    pub fn l(&self) -> T {
        self.l
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        Self::new(self.k, self.l, lambda)
    }

    /// The boundary process exists only for `k <= 0`.
    pub fn require_process(&self) -> Result<()> {
        if self.k > T::zero() {
            return Err(Error::Domain(format!(
                "k = {} > 0: the boundary process needs k <= 0",
                self.k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Cos,
    Sin,
}

/// Index of a basis function: `(n, parity)` on the circle, `(ell, m)` on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeIndex {
    Circle { n: u32, parity: Parity },
    Sphere { ell: u32, m: i32 },
}

impl ModeIndex {
    pub fn circle(n: u32, parity: Parity) -> Result<Self> {
        if n == 0 && parity == Parity::Sin {
            return Err(Error::InvalidMode("(0, sin) is not a basis function".into()));
        }
        Ok(Self::Circle { n, parity })
    }

    pub fn sphere(ell: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > ell {
            return Err(Error::InvalidMode(format!("|m| = {} > ell = {ell}", m.abs())));
        }
        Ok(Self::Sphere { ell, m })
    }

    pub fn constant(dim: usize) -> Self {
        if dim == 2 {
            Self::Circle { n: 0, parity: Parity::Cos }
        } else {
            Self::Sphere { ell: 0, m: 0 }
        }
    }

    pub fn degree(&self) -> usize {
        match *self {
            Self::Circle { n, .. } => n as usize,
            Self::Sphere { ell, .. } => ell as usize,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Circle { .. } => 2,
            Self::Sphere { .. } => 3,
        }
    }

    /// Position in the degree-major enumeration used by [`modes`].
    pub fn ordinal(&self) -> usize {
        match *self {
            Self::Circle { n: 0, .. } => 0,
            Self::Circle { n, parity } => 2 * n as usize - usize::from(parity == Parity::Cos),
            Self::Sphere { ell, m } => {
                let l = ell as i64;
                (l * l + l + m as i64) as usize
            }
        }
    }

    fn validate(&self, dom: &DomainSpec<impl Real>) -> Result<()> {
        if self.dim() != dom.dim() {
            return Err(Error::InvalidMode(format!("{self:?} on a dim-{} domain", dom.dim())));
        }
        match *self {
            Self::Circle { n, parity } => Self::circle(n, parity).map(|_| ()),
            Self::Sphere { ell, m } => Self::sphere(ell, m).map(|_| ()),
        }
    }
}

/// Number of modes of degree `<= max_degree`.
pub fn mode_count(dim: usize, max_degree: usize) -> usize {
    if dim == 2 {
        2 * max_degree + 1
    } else {
        (max_degree + 1) * (max_degree + 1)
    }
}

/// All modes of degree `<= max_degree`, in ordinal order.
pub fn modes<T: Real>(dom: &DomainSpec<T>, max_degree: usize) -> Vec<ModeIndex> {
    let mut out = Vec::with_capacity(mode_count(dom.dim(), max_degree));
    for d in 0..=max_degree as u32 {
        if dom.dim() == 2 {
            out.push(ModeIndex::Circle { n: d, parity: Parity::Cos });
            if d > 0 {
                out.push(ModeIndex::Circle { n: d, parity: Parity::Sin });
            }
        } else {
            for m in -(d as i32)..=d as i32 {
                out.push(ModeIndex::Sphere { ell: d, m });
            }
        }
    }
    out
}

/// `lambda_d + Lambda` for every mode of degree `d`.
pub fn degree_eigenvalue<T: Real>(dom: &DomainSpec<T>, bp: &BoundaryParams<T>, d: usize) -> T {
    let r = dom.radius();
    let d = T::of_usize(d);
    let sigma_lb = if dom.dim() == 2 { d * d } else { d * (d + T::one()) } / (r * r);
    -bp.k() * d / r + bp.l() * sigma_lb + bp.lambda()
}

/// Eigenvalue `lambda + Lambda` of a mode.
pub fn eigenvalue<T: Real>(dom: &DomainSpec<T>, bp: &BoundaryParams<T>, mode: ModeIndex) -> Result<T> {
    mode.validate(dom)?;
    Ok(degree_eigenvalue(dom, bp, mode.degree()))
}

/// Outcome of the `lambda_1 >= 0` test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCheck<T> {
    pub ok: bool,
    /// Degree-1 eigenvalue without the killing term.
    pub first_eigenvalue: T,
    /// The closed-form criterion `k <= l R (N - 1)`, reported for comparison only.
    pub remark_ok: bool,
}

impl<T: Real> SpectralCheck<T> {
    pub fn disagrees(&self) -> bool {
        self.ok != self.remark_ok
    }
}

/// Computes the degree-1 eigenvalue (with `Lambda = 0`) and decides `lambda_1 >= 0`.
///
/// The explicit eigenvalue is authoritative; the closed-form `k <= l R (N-1)`
/// criterion is evaluated alongside and a warning is logged when they differ.
pub fn check_spectral_condition<T: Real>(dom: &DomainSpec<T>, bp: &BoundaryParams<T>) -> SpectralCheck<T> {
    let first = degree_eigenvalue(dom, bp, 1) - bp.lambda();
    let ok = first >= T::zero();
    let n = T::of_usize(dom.dim());
    let remark_ok = bp.k() <= bp.l() * dom.radius() * (n - T::one());
    if ok != remark_ok {
        warn!(
            "explicit lambda_1 = {first} ({}) disagrees with k <= l R (N-1) ({}) for k = {}, l = {}, R = {}",
            if ok { "ok" } else { "violated" },
            if remark_ok { "ok" } else { "violated" },
            bp.k(),
            bp.l(),
            dom.radius()
        );
    }
    SpectralCheck { ok, first_eigenvalue: first, remark_ok }
}

pub(crate) fn spectral_gate<T: Real>(dom: &DomainSpec<T>, bp: &BoundaryParams<T>) -> Result<()> {
    let check = check_spectral_condition(dom, bp);
    let shifted = check.first_eigenvalue + bp.lambda();
    if shifted < T::zero() {
        return Err(Error::SpectralCondition(shifted.to_f64_lossy()));
    }
    Ok(())
}

/// Orthonormal associated Legendre table `P_l^m(cos theta)`, `0 <= m <= l <= lmax`,
/// normalized so that `P_l^m(cos theta) cos(m phi) sqrt(2)` is orthonormal on the unit
/// sphere; stored at `l(l+1)/2 + m`.
fn legendre_table<T: Real>(lmax: usize, c: T, s: T) -> Vec<T> {
    let idx = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut p = vec![T::zero(); idx(lmax, lmax) + 1];
    p[0] = T::one() / (T::lit(4.0) * T::PI()).sqrt();
    for m in 0..=lmax {
        if m > 0 {
            let mf = T::of_usize(m);
            p[idx(m, m)] = ((T::lit(2.0) * mf + T::one()) / (T::lit(2.0) * mf)).sqrt() * s * p[idx(m - 1, m - 1)];
        }
        if m < lmax {
            let mf = T::of_usize(m);
            p[idx(m + 1, m)] = (T::lit(2.0) * mf + T::lit(3.0)).sqrt() * c * p[idx(m, m)];
        }
        for l in m + 2..=lmax {
            let lf = T::of_usize(l);
            let mf = T::of_usize(m);
            let a = ((T::lit(4.0) * lf * lf - T::one()) / (lf * lf - mf * mf)).sqrt();
            let lp = lf - T::one();
            let b = ((lp * lp - mf * mf) / (T::lit(4.0) * lp * lp - T::one())).sqrt();
            p[idx(l, m)] = a * (c * p[idx(l - 1, m)] - b * p[idx(l - 2, m)]);
        }
    }
    p
}

/// Real spherical harmonics of degree `<= lmax`, orthonormal on the unit sphere, in ordinal order.
pub fn real_spherical_harmonics<T: Real>(lmax: usize, colatitude: T, longitude: T) -> Vec<T> {
    let p = legendre_table(lmax, colatitude.cos(), colatitude.sin());
    let sqrt2 = T::lit(2.0).sqrt();
    let mut out = vec![T::zero(); (lmax + 1) * (lmax + 1)];
    for l in 0..=lmax {
        let base = l * l + l;
        out[base] = p[l * (l + 1) / 2];
        for m in 1..=l {
            let (sm, cm) = (T::of_usize(m) * longitude).sin_cos();
            let v = sqrt2 * p[l * (l + 1) / 2 + m];
            out[base + m] = v * cm;
            out[base - m] = v * sm;
        }
    }
    out
}

/// Boundary basis values of every mode of degree `<= max_degree` at `y`, in ordinal order.
pub fn boundary_basis<T: Real>(dom: &DomainSpec<T>, y: &BoundaryPoint<T>, max_degree: usize) -> Vec<T> {
    let r = dom.radius();
    match (dom.dim(), y) {
        (2, _) => {
            let theta = y.angle();
            let a0 = T::one() / (T::lit(2.0) * T::PI() * r).sqrt();
            let a = T::one() / (T::PI() * r).sqrt();
            let mut out = Vec::with_capacity(2 * max_degree + 1);
            out.push(a0);
            for n in 1..=max_degree {
                let (s, c) = (T::of_usize(n) * theta).sin_cos();
                out.push(a * c);
                out.push(a * s);
            }
            out
        }
        (_, BoundaryPoint::Sphere(p)) => {
            let (th, ph) = p.spherical_angles();
            let mut v = real_spherical_harmonics(max_degree, th, ph);
            for x in v.iter_mut() {
                *x /= r;
            }
            v
        }
        (_, BoundaryPoint::Circle(_)) => {
            // an angle on a sphere domain is read as a point of the equator
            let p = BoundaryPoint::on_sphere(r, T::FRAC_PI_2(), y.angle());
            boundary_basis(dom, &p, max_degree)
        }
    }
}

/// Boundary value of a single basis function.
pub fn basis_function<T: Real>(dom: &DomainSpec<T>, mode: ModeIndex, y: &BoundaryPoint<T>) -> Result<T> {
    mode.validate(dom)?;
    Ok(boundary_basis(dom, y, mode.degree())[mode.ordinal()])
}

/// Harmonic extensions `(r/R)^d phi(x/|x|)` of every mode of degree `<= max_degree`.
fn extension_basis<T: Real>(dom: &DomainSpec<T>, x: &Point<T>, max_degree: usize) -> Result<Vec<T>> {
    let r = dom.check_closure(x)?;
    let n = mode_count(dom.dim(), max_degree);
    if r == T::zero() {
        let mut v = vec![T::zero(); n];
        let y = if dom.dim() == 2 {
            BoundaryPoint::Circle(T::zero())
        } else {
            BoundaryPoint::on_sphere(dom.radius(), T::zero(), T::zero())
        };
        v[0] = boundary_basis(dom, &y, 0)[0];
        return Ok(v);
    }
    let y = if dom.dim() == 2 {
        BoundaryPoint::Circle(x.y.atan2(x.x)).normalized(dom.radius())
    } else {
        BoundaryPoint::Sphere(x.scale(dom.radius() / r))
    };
    let mut v = boundary_basis(dom, &y, max_degree);
    let ratio = (r / dom.radius()).min(T::one());
    let mut scale = T::one();
    for d in 1..=max_degree {
        scale *= ratio;
        let lo = mode_count(dom.dim(), d - 1);
        for e in v[lo..mode_count(dom.dim(), d)].iter_mut() {
            *e *= scale;
        }
    }
    Ok(v)
}

/// Harmonic extension of one basis function to `x` in the closed domain.
pub fn harmonic_extension<T: Real>(dom: &DomainSpec<T>, mode: ModeIndex, x: &Point<T>) -> Result<T> {
    mode.validate(dom)?;
    Ok(extension_basis(dom, x, mode.degree())?[mode.ordinal()])
}

/// Samples of a boundary datum on a quadrature grid.
///
/// Circle: `values[j] = u(2 pi j / G)`. Sphere: Gauss-Legendre nodes in `cos(colatitude)`
/// times a uniform longitude grid, stored colatitude-major.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryGrid<T> {
    Circle { values: Vec<T> },
    Sphere { n_colat: usize, n_lon: usize, values: Vec<T> },
}

impl<T: Real> BoundaryGrid<T> {
    /// Smallest grid resolving degree `n_max` exactly, times `oversample`.
    pub fn minimal_size(dim: usize, n_max: usize, oversample: usize) -> (usize, usize) {
        let f = oversample.max(1);
        if dim == 2 {
            ((2 * n_max + 2) * f, 1)
        } else {
            ((n_max + 1) * f, (2 * n_max + 2) * f)
        }
    }

    /// Grid points in storage order.
    pub fn points(dom: &DomainSpec<T>, n_colat: usize, n_lon: usize) -> Vec<BoundaryPoint<T>> {
        if dom.dim() == 2 {
            let g = n_colat;
            (0..g)
                .map(|j| BoundaryPoint::Circle(T::lit(2.0) * T::PI() * T::of_usize(j) / T::of_usize(g)))
                .collect()
        } else {
            let (x, _) = gauss_legendre::<T>(n_colat);
            let mut out = Vec::with_capacity(n_colat * n_lon);
            for &c in &x {
                let th = c.max(-T::one()).min(T::one()).acos();
                for j in 0..n_lon {
                    let ph = T::lit(2.0) * T::PI() * T::of_usize(j) / T::of_usize(n_lon);
                    out.push(BoundaryPoint::on_sphere(dom.radius(), th, ph));
                }
            }
            out
        }
    }

    /// Samples `f` on the grid resolving `n_max`, oversampled by `oversample`.
    pub fn sample<F: FnMut(&BoundaryPoint<T>) -> T>(
        dom: &DomainSpec<T>,
        n_max: usize,
        oversample: usize,
        mut f: F,
    ) -> Self {
        let (a, b) = Self::minimal_size(dom.dim(), n_max, oversample);
        let values = Self::points(dom, a, b).iter().map(&mut f).collect();
        if dom.dim() == 2 {
            Self::Circle { values }
        } else {
            Self::Sphere { n_colat: a, n_lon: b, values }
        }
    }

    pub fn values(&self) -> &[T] {
        match self {
            Self::Circle { values } | Self::Sphere { values, .. } => values,
        }
    }
}

/// Truncated eigen-coefficients `<u0, phi>` of a boundary datum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    domain: DomainSpec<T>,
    coefficients: BTreeMap<ModeIndex, T>,
    n_max: usize,
    residual: T,
}

impl<T: Real> SpectralField<T> {
    pub fn from_coefficients<I>(domain: DomainSpec<T>, n_max: usize, coefficients: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ModeIndex, T)>,
    {
        let mut map = BTreeMap::new();
        for (mode, c) in coefficients {
            mode.validate(&domain)?;
            if mode.degree() > n_max {
                return Err(Error::InvalidMode(format!("{mode:?} exceeds n_max = {n_max}")));
            }
            if !c.is_finite() {
                return Err(Error::NonFinite(format!("coefficient of {mode:?}")));
            }
            if c != T::zero() {
                *map.entry(mode).or_insert(T::zero()) += c;
            }
        }
        Ok(Self { domain, coefficients: map, n_max, residual: T::zero() })
    }

    pub fn domain(&self) -> &DomainSpec<T> {
        &self.domain
    }

    pub fn coefficients(&self) -> &BTreeMap<ModeIndex, T> {
        &self.coefficients
    }

    pub fn coefficient(&self, mode: ModeIndex) -> T {
        self.coefficients.get(&mode).copied().unwrap_or_else(T::zero)
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Highest degree carrying a nonzero coefficient.
    pub fn max_degree(&self) -> usize {
        self.coefficients.keys().map(ModeIndex::degree).max().unwrap_or(0)
    }

    pub fn l2_norm(&self) -> T {
        self.coefficients.values().map(|&c| c * c).sum::<T>().sqrt()
    }

    /// Grid `L^2(Gamma)` norm of the part of the samples not captured by the retained
    /// modes: truncation plus aliasing of unresolved frequencies.
    pub fn projection_residual(&self) -> T {
        self.residual
    }

    /// Whether the projection residual exceeds `tol` times the coefficient norm.
    pub fn is_aliased(&self, tol: T) -> bool {
        self.residual > tol * self.l2_norm().max(T::min_positive_value())
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        for v in out.coefficients.values_mut() {
            *v *= c;
        }
        out.residual *= c.abs();
        out
    }

    /// Coefficients in ordinal order up to `max_degree`.
    fn dense(&self, max_degree: usize) -> Vec<T> {
        let mut v = vec![T::zero(); mode_count(self.domain.dim(), max_degree)];
        for (m, &c) in &self.coefficients {
            if m.degree() <= max_degree {
                v[m.ordinal()] = c;
            }
        }
        v
    }
}

/// Projects grid samples of `u0` onto the orthonormal basis up to degree `n_max`.
///
/// Exact to rounding for band-limited data of degree `<= n_max`; anything the grid
/// cannot resolve shows up in [`SpectralField::projection_residual`].
pub fn project_boundary_datum<T: Real>(
    dom: &DomainSpec<T>,
    grid: &BoundaryGrid<T>,
    n_max: usize,
) -> Result<SpectralField<T>> {
    if let Some(i) = grid.values().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("boundary sample {i}")));
    }
    let r = dom.radius();
    let mut coef = vec![T::zero(); mode_count(dom.dim(), n_max)];
    let (points, weights) = match (dom.dim(), grid) {
        (2, BoundaryGrid::Circle { values }) => {
            let g = values.len();
            if g < 2 * n_max + 2 {
                return Err(Error::GridTooCoarse(format!("{g} angles for n_max = {n_max}, need {}", 2 * n_max + 2)));
            }
            let w = T::lit(2.0) * T::PI() * r / T::of_usize(g);
            (BoundaryGrid::points(dom, g, 1), vec![w; g])
        }
        (3, BoundaryGrid::Sphere { n_colat, n_lon, values }) => {
            if *n_colat < n_max + 1 || *n_lon < 2 * n_max + 1 {
                return Err(Error::GridTooCoarse(format!(
                    "{n_colat} x {n_lon} nodes for n_max = {n_max}, need {} x {}",
                    n_max + 1,
                    2 * n_max + 1
                )));
            }
            if values.len() != n_colat * n_lon {
                return Err(Error::Input(format!("{} samples for a {n_colat} x {n_lon} grid", values.len())));
            }
            let (_, wl) = gauss_legendre::<T>(*n_colat);
            let dphi = T::lit(2.0) * T::PI() / T::of_usize(*n_lon);
            let w = wl.iter().flat_map(|&a| std::iter::repeat(a * dphi * r * r).take(*n_lon)).collect();
            (BoundaryGrid::points(dom, *n_colat, *n_lon), w)
        }
        _ => return Err(Error::Input(format!("grid does not match a dim-{} domain", dom.dim()))),
    };
    let values = grid.values();
    let mut basis = Vec::with_capacity(points.len());
    for ((y, &w), &u) in points.iter().zip(&weights).zip(values) {
        let b = boundary_basis(dom, y, n_max);
        for (c, &phi) in coef.iter_mut().zip(&b) {
            *c += w * u * phi;
        }
        basis.push(b);
    }
    let mut res2 = T::zero();
    for ((b, &w), &u) in basis.iter().zip(&weights).zip(values) {
        let rec: T = b.iter().zip(&coef).map(|(&phi, &c)| phi * c).sum();
        res2 += w * (u - rec) * (u - rec);
    }
    // drop rounding-level coefficients so band-limited data give sparse fields
    let data_norm = weights.iter().zip(values).map(|(&w, &u)| w * u * u).sum::<T>().sqrt();
    let floor = data_norm * T::epsilon() * T::lit(64.0);
    let mut field = SpectralField::from_coefficients(
        *dom,
        n_max,
        modes(dom, n_max).into_iter().zip(coef).filter(|&(_, c)| c.abs() > floor),
    )?;
    field.residual = res2.sqrt();
    if field.is_aliased(T::lit(1e-8)) {
        warn!(
            "boundary datum not resolved by n_max = {n_max}: residual {} against norm {}",
            field.residual,
            field.l2_norm()
        );
    }
    Ok(field)
}

/// Time weight of every degree `<= max_degree` (all ones at `t = 0`).
fn degree_weights<T: Real>(
    field: &SpectralField<T>,
    bp: &BoundaryParams<T>,
    model: &TimeModel<T>,
    t: T,
    max_degree: usize,
) -> Result<Vec<T>> {
    if !t.is_finite() || t < T::zero() {
        return Err(Error::Domain(format!("t = {t} must be finite and >= 0")));
    }
    let dom = field.domain();
    (0..=max_degree)
        .map(|d| {
            if t == T::zero() {
                Ok(T::one())
            } else {
                model.relaxation(degree_eigenvalue(dom, bp, d), t)
            }
        })
        .collect()
}

/// Default tail tolerance used by the evaluators.
pub fn default_truncation_eps<T: Real>() -> T {
    T::lit(1e-15)
}

/// Smallest degree `D` whose discarded tail `sum |c| w` is below `eps`.
///
/// For Mittag-Leffler weights `w = 1/(1 + t^alpha mu)` (valid since
/// `E_alpha(-x) <= 1/(1 + x/Gamma(1+alpha)) <= 1/(1+x)`); for other symbols the
/// weights themselves. Bounds the `L^2(Gamma)` error of the truncated series.
pub fn truncation_bound<T: Real>(
    field: &SpectralField<T>,
    bp: &BoundaryParams<T>,
    model: &TimeModel<T>,
    t: T,
    eps: T,
) -> Result<usize> {
    let top = field.max_degree();
    if t == T::zero() {
        return Ok(field.n_max());
    }
    if !t.is_finite() || t < T::zero() {
        return Err(Error::Domain(format!("t = {t} must be finite and >= 0")));
    }
    let dom = field.domain();
    let weights: Vec<T> = match model {
        TimeModel::Caputo(a) => {
            let ta = t.powf(a.get());
            (0..=top)
                .map(|d| {
                    let mu = degree_eigenvalue(dom, bp, d);
                    if a.is_one() {
                        (-mu * t).exp()
                    } else {
                        T::one() / (T::one() + ta * mu.max(T::zero()))
                    }
                })
                .collect()
        }
        TimeModel::Symbol(_) => degree_weights(field, bp, model, t, top)?,
    };
    let mut tail = vec![T::zero(); top + 2];
    for (m, &c) in field.coefficients() {
        tail[m.degree()] += c.abs() * weights[m.degree()];
    }
    // tail[d] becomes the sum over degrees >= d
    for d in (0..=top).rev() {
        let next = tail[d + 1];
        tail[d] += next;
    }
    Ok((0..=top).find(|&d| tail[d + 1] < eps).unwrap_or(top))
}

fn evaluate_with<T: Real>(
    field: &SpectralField<T>,
    bp: &BoundaryParams<T>,
    model: &TimeModel<T>,
    t: T,
    basis: impl FnOnce(usize) -> Result<Vec<T>>,
) -> Result<T> {
    spectral_gate(field.domain(), bp)?;
    let top = if t == T::zero() {
        field.max_degree()
    } else {
        truncation_bound(field, bp, model, t, default_truncation_eps())?
    };
    let weights = degree_weights(field, bp, model, t, top)?;
    let psi = basis(top)?;
    let mut sum = T::zero();
    for (m, &c) in field.coefficients() {
        let d = m.degree();
        if d <= top {
            sum += c * weights[d] * psi[m.ordinal()];
        }
    }
    Ok(sum)
}

/// `u(t, x) = sum c M(t, lambda) psi(x)` in the closed domain.
pub fn evaluate_solution<T: Real>(
    field: &SpectralField<T>,
    bp: &BoundaryParams<T>,
    model: &TimeModel<T>,
    t: T,
    x: &Point<T>,
) -> Result<T> {
    let dom = *field.domain();
    evaluate_with(field, bp, model, t, |top| extension_basis(&dom, x, top))
}

/// Boundary trace `v(t, y) = sum c M(t, lambda) phi(y)`.
pub fn evaluate_boundary<T: Real>(
    field: &SpectralField<T>,
    bp: &BoundaryParams<T>,
    model: &TimeModel<T>,
    t: T,
    y: &BoundaryPoint<T>,
) -> Result<T> {
    let dom = *field.domain();
    evaluate_with(field, bp, model, t, |top| Ok(boundary_basis(&dom, y, top)))
}

/// Harmonic extension of the datum itself (`t = 0`).
pub fn evaluate_initial<T: Real>(field: &SpectralField<T>, x: &Point<T>) -> Result<T> {
    let v = extension_basis(field.domain(), x, field.max_degree())?;
    Ok(field.dense(field.max_degree()).iter().zip(&v).map(|(&c, &p)| c * p).sum())
}

/// Quadrature settings for the subordination integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubordinationQuad<T> {
    /// Gauss-Legendre nodes for Zolotarev's angular integral.
    pub nodes: usize,
    /// Absolute tolerance of the outer adaptive integral.
    pub tol: T,
}

impl<T: Real> Default for SubordinationQuad<T> {
    fn default() -> Self {
        Self { nodes: 64, tol: T::lit(1e-10) }
    }
}

/// Density of the standard one-sided stable law (`E e^{-lam S} = e^{-lam^alpha}`) by
/// Zolotarev's integral over `(0, pi)`, switching to the convergent tail series once
/// `x^{-alpha}` is small.
///
/// The angular integrand `K e^{-cK}` peaks where `K(u) = 1/c`; the rule is applied on
/// panels graded towards that point.
pub fn stable_density<T: Real>(alpha: T, x: T, rule: &GaussLegendre<T>) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    let one = T::one();
    let xa = x.powf(-alpha);
    if xa < T::lit(0.25) {
        return stable_tail_series(alpha, x, xa);
    }
    let e = one / (one - alpha);
    let c = x.powf(-alpha * e);
    let f = |u: T| {
        let k = zolotarev_k(alpha, u);
        let kc = k * c;
        if kc > T::lit(700.0) || !k.is_finite() {
            T::zero()
        } else {
            k * (-kc).exp()
        }
    };
    // K is increasing on (0, pi); bisect for the peak
    let target = -c.ln();
    let (mut lo, mut hi) = (T::zero(), T::PI());
    for _ in 0..60 {
        let mid = (lo + hi) / T::lit(2.0);
        if zolotarev_k(alpha, mid).ln() < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let delta = T::PI() - lo;
    let mut cuts = vec![T::zero()];
    let mut w = delta * T::lit(8.0);
    while w > delta / T::lit(8.0) {
        if w < T::PI() {
            cuts.push(T::PI() - w);
        }
        w /= T::lit(2.0);
    }
    cuts.push(T::PI());
    let integral: T = cuts.windows(2).map(|p| rule.integrate(p[0], p[1], f)).sum();
    alpha * e / T::PI() * x.powf(-e) * integral
}

// g(x) = (1/pi) sum_k (-1)^{k+1} Gamma(alpha k + 1)/k! sin(pi alpha k) x^{-alpha k - 1}
fn stable_tail_series<T: Real>(alpha: T, x: T, xa: T) -> T {
    let one = T::one();
    let mut sum = T::zero();
    let mut pow = one;
    for k in 1..400 {
        let kf = T::of_usize(k);
        pow *= xa;
        let bound = (ln_gamma(alpha * kf + one) - ln_gamma(kf + one)).exp() * pow;
        let sign = if k % 2 == 1 { one } else { -one };
        sum += sign * bound * sin_pi(alpha * kf);
        if bound < T::epsilon() * sum.abs() * T::lit(0.01) {
            break;
        }
    }
    sum / (T::PI() * x)
}

/// Density of `L_t` at `s`: `h(t, s) = (t/alpha) s^{-1-1/alpha} g_alpha(t s^{-1/alpha})`.
pub fn inverse_stable_density<T: Real>(alpha: T, t: T, s: T, rule: &GaussLegendre<T>) -> T {
    if s <= T::zero() || t <= T::zero() {
        return T::zero();
    }
    let inv = T::one() / alpha;
    t / alpha * s.powf(-T::one() - inv) * stable_density(alpha, t * s.powf(-inv), rule)
}

/// `u(t, x) = int_0^inf w(s, x) h(t, s) ds` with `w` the `alpha = 1` solution
/// (killing included).
pub fn subordinated_solution<T: Real>(
    field: &SpectralField<T>,
    bp: &BoundaryParams<T>,
    alpha: FractionalOrder<T>,
    t: T,
    x: &Point<T>,
    quad: SubordinationQuad<T>,
) -> Result<T> {
    let exp_model = TimeModel::Caputo(FractionalOrder::new(T::one())?);
    if alpha.is_one() {
        return evaluate_solution(field, bp, &exp_model, t, x);
    }
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::Domain(format!("t = {t} must be > 0")));
    }
    spectral_gate(field.domain(), bp)?;
    let a = alpha.get();
    let top = field.max_degree();
    let psi = extension_basis(field.domain(), x, top)?;
    // spatial factors per degree, so w(s) = sum_d b_d e^{-mu_d s}
    let mut by_degree = vec![T::zero(); top + 1];
    for (m, &c) in field.coefficients() {
        by_degree[m.degree()] += c * psi[m.ordinal()];
    }
    let mu: Vec<T> = (0..=top).map(|d| degree_eigenvalue(field.domain(), bp, d)).collect();
    let rule = GaussLegendre::new(quad.nodes);
    let centre = a * t.ln();
    let lo = centre + T::lit(1e-14).ln();
    let hi = centre + T::lit(60.0).ln();
    let pts = [lo, centre - T::lit(5.0), centre - T::one(), centre, centre + T::one(), hi];
    let integral = Adaptive::with_tol(quad.tol, T::zero()).integrate_over(&pts, |v| {
        let s = v.exp();
        let w: T = by_degree.iter().zip(&mu).map(|(&b, &m)| b * (-m * s).exp()).sum();
        w * inverse_stable_density(a, t, s, &rule) * s
    });
    Ok(integral.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn disk() -> DomainSpec<f64> {
        DomainSpec::disk(1.0).unwrap()
    }

    fn cos1() -> ModeIndex {
        ModeIndex::Circle { n: 1, parity: Parity::Cos }
    }

    // Finite-difference oracle: lambda psi = -k d_n psi - l Delta_Gamma psi at boundary points.
    fn fd_eigen(dom: &DomainSpec<f64>, bp: &BoundaryParams<f64>, mode: ModeIndex) -> f64 {
        let r = dom.radius();
        let h = 1e-5;
        let mut best = f64::NAN;
        for j in 0..20 {
            let th = 0.1 + 2.0 * PI * j as f64 / 20.0;
            let at = |rr: f64, tt: f64| harmonic_extension(dom, mode, &Point::from_polar(rr, tt)).unwrap();
            let f0 = at(r, th);
            if f0.abs() < 1e-3 {
                continue;
            }
            let dn = (3.0 * f0 - 4.0 * at(r - h, th) + at(r - 2.0 * h, th)) / (2.0 * h);
            let hh = 1e-4;
            let lap = (at(r, th + hh) - 2.0 * f0 + at(r, th - hh)) / (hh * hh * r * r);
            best = (-bp.k() * dn - bp.l() * lap) / f0 + bp.lambda();
        }
        best
    }

    #[test]
    fn eigenvalue_examples() {
        let bp = BoundaryParams::new(-1.0, 1.0, 0.0).unwrap();
        assert_eq!(eigenvalue(&disk(), &bp, cos1()).unwrap(), 2.0);
        assert!((fd_eigen(&disk(), &bp, cos1()) - 2.0).abs() < 1e-6);
        let bp2 = BoundaryParams::new(-1.0, 0.0, 0.0).unwrap();
        let d2 = DomainSpec::disk(2.0).unwrap();
        let m3 = ModeIndex::Circle { n: 3, parity: Parity::Cos };
        assert_eq!(eigenvalue(&d2, &bp2, m3).unwrap(), 1.5);
        assert!((fd_eigen(&d2, &bp2, m3) - 1.5).abs() < 1e-6);
        let bpl = BoundaryParams::new(0.3, 2.0, 0.7).unwrap();
        assert_eq!(eigenvalue(&disk(), &bpl, ModeIndex::constant(2)).unwrap(), 0.7);
        let ball = DomainSpec::ball(1.5).unwrap();
        assert_eq!(eigenvalue(&ball, &bpl, ModeIndex::constant(3)).unwrap(), 0.7);
        assert!(eigenvalue(&disk(), &bp, ModeIndex::Sphere { ell: 1, m: 0 }).is_err());
        assert!(eigenvalue(&ball, &bp, ModeIndex::Sphere { ell: 1, m: 2 }).is_err());
    }

    #[test]
    fn ball_eigenvalue_matches_finite_differences() {
        // radial derivative of r^l Y and the spherical Laplacian -l(l+1)/R^2
        let ball = DomainSpec::ball(1.3).unwrap();
        let bp = BoundaryParams::new(-0.7, 0.4, 0.0).unwrap();
        for &(ell, m) in &[(1u32, 0i32), (2, 1), (3, -2)] {
            let mode = ModeIndex::Sphere { ell, m };
            let y = Point::from_spherical(1.3, 0.9, 0.4);
            let f0 = harmonic_extension(&ball, mode, &y).unwrap();
            let h = 1e-5;
            let inner = |s: f64| harmonic_extension(&ball, mode, &y.scale(s)).unwrap();
            let dn = (3.0 * f0 - 4.0 * inner(1.0 - h / 1.3) + inner(1.0 - 2.0 * h / 1.3)) / (2.0 * h);
            let lam = eigenvalue(&ball, &bp, mode).unwrap();
            let l = ell as f64;
            let expect = -bp.k() * dn / f0 + bp.l() * l * (l + 1.0) / (1.3 * 1.3);
            assert!((lam - expect).abs() < 1e-6, "{lam} {expect}");
        }
    }

    #[test]
    fn eigenvalues_nondecreasing_for_nonpositive_k() {
        let bp = BoundaryParams::new(-0.8, 0.3, 0.1).unwrap();
        for dom in [DomainSpec::disk(0.7).unwrap(), DomainSpec::ball(2.0).unwrap()] {
            let mut prev = f64::NEG_INFINITY;
            for d in 0..30 {
                let v = degree_eigenvalue(&dom, &bp, d);
                assert!(v >= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn spectral_condition_examples() {
        let c = check_spectral_condition(&disk(), &BoundaryParams::new(0.5, 1.0, 0.0).unwrap());
        assert!(c.ok);
        assert_eq!(c.first_eigenvalue, 0.5);
        let c = check_spectral_condition(&disk(), &BoundaryParams::new(-1.0, 0.0, 0.0).unwrap());
        assert!(c.ok);
        assert_eq!(c.first_eigenvalue, 1.0);
        let c = check_spectral_condition(&disk(), &BoundaryParams::new(2.0, 1.0, 0.0).unwrap());
        assert!(!c.ok);
        assert_eq!(c.first_eigenvalue, -1.0);
        // R = 2: explicit k <= l/R, closed form k <= l R
        let c = check_spectral_condition(&DomainSpec::disk(2.0).unwrap(), &BoundaryParams::new(1.0, 1.0, 0.0).unwrap());
        assert!(!c.ok && c.remark_ok && c.disagrees());
    }

    #[test]
    fn boundary_params_invariants() {
        assert!(BoundaryParams::new(1.0, 0.0, 0.0).is_err());
        assert!(BoundaryParams::new(-1.0, -0.1, 0.0).is_err());
        assert!(BoundaryParams::new(-1.0, 0.0, -1.0).is_err());
        assert!(BoundaryParams::new(0.5, 1.0, 0.0).unwrap().require_process().is_err());
        assert!(BoundaryParams::new(0.0, 1.0, 0.0).unwrap().require_process().is_ok());
    }

    #[test]
    fn mode_ordinals_follow_enumeration() {
        for dom in [disk(), DomainSpec::ball(1.0).unwrap()] {
            for (i, m) in modes(&dom, 6).iter().enumerate() {
                assert_eq!(m.ordinal(), i);
            }
        }
        assert!(ModeIndex::circle(0, Parity::Sin).is_err());
    }

    #[test]
    fn projection_examples() {
        let r = 1.7;
        let dom = DomainSpec::disk(r).unwrap();
        let grid = BoundaryGrid::sample(&dom, 5, 1, |_| 3.0);
        let f = project_boundary_datum(&dom, &grid, 5).unwrap();
        assert_eq!(f.coefficients().len(), 1);
        assert_relative_eq!(f.coefficient(ModeIndex::constant(2)), 3.0 * (2.0 * PI * r).sqrt(), max_relative = 1e-14);

        let dom = disk();
        let grid = BoundaryGrid::sample(&dom, 4, 1, |y| y.angle().cos());
        let f = project_boundary_datum(&dom, &grid, 4).unwrap();
        assert_eq!(f.coefficients().len(), 1);
        assert!((f.coefficient(cos1()) - PI.sqrt()).abs() < 1e-14);
        assert!(f.projection_residual() < 1e-13);
    }

    #[test]
    fn aliasing_is_flagged() {
        let dom = disk();
        let n_max = 4;
        let grid = BoundaryGrid::sample(&dom, n_max, 1, |y| (5.0 * y.angle()).cos());
        let f = project_boundary_datum(&dom, &grid, n_max).unwrap();
        // double-resolution quadrature: every retained coefficient is zero, energy sqrt(pi)
        let fine = project_boundary_datum(&dom, &BoundaryGrid::sample(&dom, n_max, 2, |y| (5.0 * y.angle()).cos()), n_max).unwrap();
        assert!(fine.coefficients().is_empty());
        assert!((fine.projection_residual() - PI.sqrt()).abs() < 1e-12);
        assert!(f.coefficients().is_empty());
        assert!(f.projection_residual() > 1.0);
        assert!(f.is_aliased(1e-8));
        let coarse = BoundaryGrid::Circle { values: vec![1.0; 9] };
        assert!(matches!(project_boundary_datum(&dom, &coarse, 4), Err(Error::GridTooCoarse(_))));
        let bad = BoundaryGrid::Circle { values: vec![f64::NAN; 12] };
        assert!(matches!(project_boundary_datum(&dom, &bad, 4), Err(Error::NonFinite(_))));
    }

    #[test]
    fn sphere_projection_is_exact_for_band_limited_data() {
        let ball = DomainSpec::ball(1.4f64).unwrap();
        let n_max = 5;
        let target = [
            (ModeIndex::Sphere { ell: 0, m: 0 }, 0.5),
            (ModeIndex::Sphere { ell: 2, m: -1 }, 1.25),
            (ModeIndex::Sphere { ell: 5, m: 4 }, -0.75),
        ];
        let field = SpectralField::from_coefficients(ball, n_max, target).unwrap();
        let grid = BoundaryGrid::sample(&ball, n_max, 1, |y| {
            let b = boundary_basis(&ball, y, n_max);
            target.iter().map(|(m, c)| c * b[m.ordinal()]).sum()
        });
        let f = project_boundary_datum(&ball, &grid, n_max).unwrap();
        for m in modes(&ball, n_max) {
            assert!((f.coefficient(m) - field.coefficient(m)).abs() < 1e-13, "{m:?}");
        }
        assert!(f.projection_residual() < 1e-12);
    }

    #[test]
    fn spherical_harmonics_are_orthonormal() {
        let l = 6;
        let (x, w) = gauss_legendre::<f64>(l + 1);
        let nlon = 2 * l + 2;
        let n = (l + 1) * (l + 1);
        let mut gram = vec![0.0; n * n];
        for (&c, &wc) in x.iter().zip(&w) {
            for j in 0..nlon {
                let ph = 2.0 * PI * j as f64 / nlon as f64;
                let y = real_spherical_harmonics(l, c.acos(), ph);
                for a in 0..n {
                    for b in 0..n {
                        gram[a * n + b] += wc * 2.0 * PI / nlon as f64 * y[a] * y[b];
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a * n + b] - e).abs() < 1e-13);
            }
        }
        // Y_1^0 = sqrt(3/(4 pi)) cos(theta)
        let y = real_spherical_harmonics(1, 0.3f64, 0.0);
        assert!((y[2] - (3.0 / (4.0 * PI)).sqrt() * 0.3f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn harmonic_extension_examples() {
        let dom = disk();
        let v = harmonic_extension(&dom, cos1(), &Point::planar(0.5, 0.0)).unwrap();
        assert!((v - 0.5 / PI.sqrt()).abs() < 1e-15);
        // mean value over a small circle around the point
        let c = Point::planar(0.3, -0.2);
        let n = 64;
        let mut mean = 0.0;
        for j in 0..n {
            let a = 2.0 * PI * j as f64 / n as f64;
            let p = Point::planar(c.x + 0.1 * a.cos(), c.y + 0.1 * a.sin());
            mean += harmonic_extension(&dom, ModeIndex::Circle { n: 3, parity: Parity::Sin }, &p).unwrap();
        }
        mean /= n as f64;
        let at = harmonic_extension(&dom, ModeIndex::Circle { n: 3, parity: Parity::Sin }, &c).unwrap();
        assert!((mean - at).abs() < 1e-8);
        assert_eq!(harmonic_extension(&dom, cos1(), &Point::origin()).unwrap(), 0.0);
        let c0 = harmonic_extension(&dom, ModeIndex::constant(2), &Point::planar(0.2, 0.1)).unwrap();
        assert_eq!(c0, 1.0 / (2.0 * PI).sqrt());
        assert!(harmonic_extension(&dom, cos1(), &Point::planar(1.1, 0.0)).is_err());
        let ball = DomainSpec::ball(2.0f64).unwrap();
        let m = ModeIndex::Sphere { ell: 2, m: 1 };
        assert_eq!(harmonic_extension(&ball, m, &Point::origin()).unwrap(), 0.0);
        let y = BoundaryPoint::on_sphere(2.0, 0.8, 1.1);
        let on = harmonic_extension(&ball, m, &y.to_point(2.0)).unwrap();
        assert!((on - basis_function(&ball, m, &y).unwrap()).abs() < 1e-15);
    }

    fn cos_field() -> SpectralField<f64> {
        SpectralField::from_coefficients(disk(), 1, [(cos1(), PI.sqrt())]).unwrap()
    }

    #[test]
    fn evaluate_solution_examples() {
        let bp = BoundaryParams::new(-1.0, 1.0, 0.0).unwrap();
        let x = Point::planar(0.5, 0.0);
        let half = TimeModel::caputo(0.5).unwrap();
        let v = evaluate_solution(&cos_field(), &bp, &half, 1.0, &x).unwrap();
        // 0.5 E_{1/2}(-2), mpmath
        assert!((v - 0.127_697_838_155_252_87).abs() < 1e-12);
        let one = TimeModel::caputo(1.0).unwrap();
        let v = evaluate_solution(&cos_field(), &bp, &one, 1.0, &x).unwrap();
        assert!((v - 0.067_667_641_618_306_35).abs() < 1e-15);
        let unit = SpectralField::from_coefficients(disk(), 0, [(ModeIndex::constant(2), (2.0 * PI).sqrt())]).unwrap();
        for &t in &[0.0, 0.3, 7.0] {
            let v = evaluate_solution(&unit, &bp, &half, t, &Point::planar(0.1, -0.6)).unwrap();
            assert!((v - 1.0).abs() < 1e-15);
        }
        let bad = BoundaryParams::new(2.0, 1.0, 0.0).unwrap();
        assert!(matches!(
            evaluate_solution(&cos_field(), &bad, &half, 1.0, &x),
            Err(Error::SpectralCondition(_))
        ));
        // killing can restore the condition
        let killed = BoundaryParams::new(2.0, 1.0, 1.5).unwrap();
        assert!(evaluate_solution(&cos_field(), &killed, &half, 1.0, &x).is_ok());
    }

    #[test]
    fn t_zero_reproduces_harmonic_extension() {
        let dom = disk();
        let grid = BoundaryGrid::sample(&dom, 6, 1, |y| 1.0 + y.angle().cos() + 0.25 * (3.0 * y.angle()).cos());
        let f = project_boundary_datum(&dom, &grid, 6).unwrap();
        let bp = BoundaryParams::new(-1.0, 1.0, 0.0).unwrap();
        let x = Point::planar(0.3, 0.4);
        let th = 0.4f64.atan2(0.3);
        let expect = 1.0 + 0.5 * th.cos() + 0.25 * 0.125 * (3.0 * th).cos();
        let v = evaluate_solution(&f, &bp, &TimeModel::caputo(0.5).unwrap(), 0.0, &x).unwrap();
        assert!((v - expect).abs() < 1e-14);
        assert!((evaluate_initial(&f, &x).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn truncation_examples() {
        let bp = BoundaryParams::new(-1.0, 1.0, 0.0).unwrap();
        let half = TimeModel::caputo(0.5).unwrap();
        let single = SpectralField::from_coefficients(disk(), 9, [(ModeIndex::Circle { n: 3, parity: Parity::Sin }, 2.0)]).unwrap();
        assert_eq!(truncation_bound(&single, &bp, &half, 1.0, 1e-12).unwrap(), 3);
        assert_eq!(truncation_bound(&single, &bp, &half, 1.0, f64::INFINITY).unwrap(), 0);
        assert_eq!(truncation_bound(&single, &bp, &half, 0.0, 1e-3).unwrap(), 9);
        // c_n = 2^{-n}, lambda_n = n + n^2, brute-force tail to degree 200
        let geo = SpectralField::from_coefficients(
            disk(),
            200,
            (0..=200u32).map(|n| (ModeIndex::Circle { n, parity: Parity::Cos }, 0.5f64.powi(n as i32))),
        )
        .unwrap();
        let d = truncation_bound(&geo, &bp, &half, 1.0, 1e-8).unwrap();
        let tail = |from: usize| -> f64 {
            (from..=200).map(|n| 0.5f64.powi(n as i32) / (1.0 + (n + n * n) as f64)).sum()
        };
        assert!(tail(d + 1) < 1e-8 && tail(d) >= 1e-8, "D = {d}");
        let mut prev = usize::MAX;
        for &t in &[0.01, 0.1, 1.0, 10.0, 100.0] {
            let d = truncation_bound(&geo, &bp, &half, t, 1e-8).unwrap();
            assert!(d <= prev);
            prev = d;
        }
    }

    #[test]
    fn stable_density_normalization_and_laplace_transform() {
        let rule = GaussLegendre::new(64);
        for &alpha in &[0.3f64, 0.5, 0.7] {
            for &lam in &[0.0f64, 1.0, 2.0] {
                let q = Adaptive::with_tol(1e-12, 0.0).integrate_over(&[-30.0, -3.0, 0.0, 3.0, 60.0], |v: f64| {
                    let x = v.exp();
                    stable_density(alpha, x, &rule) * (-lam * x).exp() * x
                });
                let tail = if lam == 0.0 { (60.0f64).exp().powf(-alpha) / crate::special::gamma(1.0 - alpha) } else { 0.0 };
                let oracle = (-lam.powf(alpha)).exp();
                assert!((q.value + tail - oracle).abs() < 1e-8, "alpha={alpha} lam={lam}: {}", q.value + tail);
            }
        }
        // alpha = 1/2 has the closed form (1/(2 sqrt(pi))) x^{-3/2} e^{-1/(4x)}
        for &x in &[0.05f64, 0.3, 1.0, 4.0, 50.0, 1e4] {
            let exact = 0.5 / PI.sqrt() * x.powf(-1.5) * (-0.25 / x).exp();
            assert_relative_eq!(stable_density(0.5, x, &rule), exact, max_relative = 1e-10);
        }
    }

    #[test]
    fn subordination_matches_direct_route() {
        let bp = BoundaryParams::new(-1.0, 1.0, 0.0).unwrap();
        let half = FractionalOrder::new(0.5).unwrap();
        let x = Point::planar(0.5, 0.0);
        let v = subordinated_solution(&cos_field(), &bp, half, 1.0, &x, SubordinationQuad::default()).unwrap();
        assert!((v - 0.127_697_838_155_252_87).abs() < 1e-4);
        let unit = SpectralField::from_coefficients(disk(), 0, [(ModeIndex::constant(2), (2.0 * PI).sqrt())]).unwrap();
        let v = subordinated_solution(&unit, &bp, half, 2.0, &x, SubordinationQuad::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-6);
        let small = subordinated_solution(&cos_field(), &bp, half, 1e-4, &x, SubordinationQuad::default()).unwrap();
        let direct = evaluate_solution(&cos_field(), &bp, &TimeModel::caputo(0.5).unwrap(), 1e-4, &x).unwrap();
        assert!((small - direct).abs() < 1e-3);
        assert!((small - 0.5).abs() < 0.05);
    }
}
