//! Boundary data `u0`: closed-form test data and sampled data read from CSV.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryPoint, DomainSpec};
use crate::real::{wrap_angle, Real};
use crate::spectral::{project_boundary_datum, real_spherical_harmonics, BoundaryGrid, SpectralField};

/// A function on the boundary.
pub trait BoundaryDatum<T>: Send + Sync {
    fn value(&self, y: &BoundaryPoint<T>) -> T;

    /// Largest degree carried by the datum, if it is band-limited.
    fn bandwidth(&self) -> Option<usize> {
        None
    }
}

impl<T, F> BoundaryDatum<T> for F
where
    F: Fn(&BoundaryPoint<T>) -> T + Send + Sync,
{
    fn value(&self, y: &BoundaryPoint<T>) -> T {
        self(y)
    }
}

/// Closed-form boundary data.
#[derive(Debug, Clone, PartialEq)]
pub enum NamedDatum<T> {
    Constant(T),
    /// `a0 + sum a_n cos(n theta) + sum b_n sin(n theta)`; on the sphere `theta` is the longitude.
    Fourier { constant: T, cos: Vec<(u32, T)>, sin: Vec<(u32, T)> },
    /// `sum c Y_l^m` with real harmonics orthonormal on the unit sphere.
    Harmonic(Vec<(u32, i32, T)>),
    /// `inside` on the arc `[from, to)` (taken mod 2 pi), `outside` elsewhere.
    Step { from: T, to: T, inside: T, outside: T },
}

impl<T: Real> NamedDatum<T> {
    /// Scales every amplitude by `c`.
    pub fn scaled(&self, c: T) -> Self {
        match self {
            Self::Constant(v) => Self::Constant(*v * c),
            Self::Fourier { constant, cos, sin } => Self::Fourier {
                constant: *constant * c,
                cos: cos.iter().map(|&(n, a)| (n, a * c)).collect(),
                sin: sin.iter().map(|&(n, a)| (n, a * c)).collect(),
            },
            Self::Harmonic(terms) => Self::Harmonic(terms.iter().map(|&(l, m, a)| (l, m, a * c)).collect()),
            Self::Step { from, to, inside, outside } => Self::Step {
                from: *from,
                to: *to,
                inside: *inside * c,
                outside: *outside * c,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Harmonic(terms) => {
                if let Some(&(l, m, _)) = terms.iter().find(|&&(l, m, _)| m.unsigned_abs() > l) {
                    return Err(Error::InvalidMode(format!("harmonic ({l}, {m})")));
                }
            }
            Self::Step { from, to, .. } if !(from.is_finite() && to.is_finite()) => {
                return Err(Error::NonFinite("step endpoints".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

impl<T: Real> BoundaryDatum<T> for NamedDatum<T> {
    fn value(&self, y: &BoundaryPoint<T>) -> T {
        match self {
            Self::Constant(c) => *c,
            Self::Fourier { constant, cos, sin } => {
                let th = y.angle();
                let mut v = *constant;
                for &(n, a) in cos {
                    v += a * (T::lit(n as f64) * th).cos();
                }
                for &(n, b) in sin {
                    v += b * (T::lit(n as f64) * th).sin();
                }
                v
            }
            Self::Harmonic(terms) => {
                let (th, ph) = match y {
                    BoundaryPoint::Sphere(p) => p.spherical_angles(),
                    BoundaryPoint::Circle(a) => (T::FRAC_PI_2(), *a),
                };
                let top = terms.iter().map(|t| t.0 as usize).max().unwrap_or(0);
                let ys = real_spherical_harmonics(top, th, ph);
                terms
                    .iter()
                    .map(|&(l, m, c)| c * ys[(l as i64 * l as i64 + l as i64 + m as i64) as usize])
                    .sum()
            }
            Self::Step { from, to, inside, outside } => {
                let a = wrap_angle(y.angle() - *from);
                let width = wrap_angle(*to - *from);
                if a < width {
                    *inside
                } else {
                    *outside
                }
            }
        }
    }

    fn bandwidth(&self) -> Option<usize> {
        match self {
            Self::Constant(_) => Some(0),
            Self::Fourier { cos, sin, .. } => Some(cos.iter().chain(sin).map(|t| t.0 as usize).max().unwrap_or(0)),
            Self::Harmonic(terms) => Some(terms.iter().map(|t| t.0 as usize).max().unwrap_or(0)),
            Self::Step { .. } => None,
        }
    }
}

/// Boundary data sampled at scattered angles (circle) or on a colatitude x longitude
/// tensor grid (sphere), interpolated linearly (periodically in angle/longitude).
#[derive(Debug, Clone, PartialEq)]
pub enum SampledDatum<T> {
    Circle { angles: Vec<T>, values: Vec<T> },
    Sphere { colatitudes: Vec<T>, longitudes: Vec<T>, values: Vec<T> },
}

fn parse_field<T: Real>(s: &str, line: usize) -> Result<T> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Input(format!("line {line}: cannot parse '{s}' as a number")))?;
    if !v.is_finite() {
        return Err(Error::NonFinite(format!("line {line}: {s}")));
    }
    Ok(T::lit(v))
}

/// Periodic linear interpolation weights on sorted nodes in `[0, 2 pi)`.
fn periodic_bracket<T: Real>(nodes: &[T], x: T) -> (usize, usize, T) {
    let n = nodes.len();
    if n == 1 {
        return (0, 0, T::zero());
    }
    let x = wrap_angle(x);
    let two_pi = T::lit(2.0) * T::PI();
    let hi = nodes.partition_point(|&a| a <= x);
    let (i, j) = if hi == 0 || hi == n { (n - 1, 0) } else { (hi - 1, hi) };
    let mut gap = nodes[j] - nodes[i];
    let mut off = x - nodes[i];
    if gap <= T::zero() {
        gap += two_pi;
    }
    if off < T::zero() {
        off += two_pi;
    }
    (i, j, off / gap)
}

fn clamped_bracket<T: Real>(nodes: &[T], x: T) -> (usize, usize, T) {
    let n = nodes.len();
    if n == 1 || x <= nodes[0] {
        return (0, 0, T::zero());
    }
    if x >= nodes[n - 1] {
        return (n - 1, n - 1, T::zero());
    }
    let hi = nodes.partition_point(|&a| a <= x);
    (hi - 1, hi, (x - nodes[hi - 1]) / (nodes[hi] - nodes[hi - 1]))
}

impl<T: Real> SampledDatum<T> {
    /// Reads `angle,value` (dim 2) or `colatitude,longitude,value` (dim 3) with a header row.
    pub fn from_csv_reader<R: Read>(dim: usize, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Input(e.to_string()))?.clone();
        let expected: &[&str] = if dim == 2 { &["angle", "value"] } else { &["colatitude", "longitude", "value"] };
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Input(format!("expected header {}, got {:?}", expected.join(","), headers)));
        }
        let mut rows: Vec<Vec<T>> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Input(e.to_string()))?;
            if rec.len() != expected.len() {
                return Err(Error::Input(format!("line {}: expected {} fields", i + 2, expected.len())));
            }
            rows.push(rec.iter().map(|f| parse_field(f, i + 2)).collect::<Result<_>>()?);
        }
        if rows.is_empty() {
            return Err(Error::Input("no samples".into()));
        }
        if dim == 2 {
            let mut pairs: Vec<(T, T)> = rows.iter().map(|r| (wrap_angle(r[0]), r[1])).collect();
            pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite angles"));
            if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Input("duplicate angle".into()));
            }
            Ok(Self::Circle {
                angles: pairs.iter().map(|p| p.0).collect(),
                values: pairs.iter().map(|p| p.1).collect(),
            })
        } else {
            let mut colat: Vec<T> = rows.iter().map(|r| r[0]).collect();
            let mut lon: Vec<T> = rows.iter().map(|r| wrap_angle(r[1])).collect();
            for v in [&mut colat, &mut lon] {
                v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
                v.dedup();
            }
            if colat.iter().any(|&c| c < T::zero() || c > T::PI()) {
                return Err(Error::Input("colatitude outside [0, pi]".into()));
            }
            if colat.len() * lon.len() != rows.len() {
                return Err(Error::Input(format!(
                    "{} rows do not form a {} x {} colatitude-longitude grid",
                    rows.len(),
                    colat.len(),
                    lon.len()
                )));
            }
            let mut values = vec![T::nan(); rows.len()];
            for r in &rows {
                let i = colat.partition_point(|&c| c < r[0]);
                let j = lon.partition_point(|&c| c < wrap_angle(r[1]));
                values[i * lon.len() + j] = r[2];
            }
            if values.iter().any(|v| v.is_nan()) {
                return Err(Error::Input("duplicate grid node".into()));
            }
            Ok(Self::Sphere { colatitudes: colat, longitudes: lon, values })
        }
    }

    pub fn from_csv_path(dim: usize, path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(dim, f)
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Circle { .. } => 2,
            Self::Sphere { .. } => 3,
        }
    }
}

impl<T: Real> BoundaryDatum<T> for SampledDatum<T> {
    fn value(&self, y: &BoundaryPoint<T>) -> T {
        match self {
            Self::Circle { angles, values } => {
                let (i, j, w) = periodic_bracket(angles, y.angle());
                values[i] * (T::one() - w) + values[j] * w
            }
            Self::Sphere { colatitudes, longitudes, values } => {
                let (th, ph) = match y {
                    BoundaryPoint::Sphere(p) => p.spherical_angles(),
                    BoundaryPoint::Circle(a) => (T::FRAC_PI_2(), *a),
                };
                let (a, b, u) = clamped_bracket(colatitudes, th);
                let (c, d, v) = periodic_bracket(longitudes, ph);
                let n = longitudes.len();
                let at = |i: usize, j: usize| values[i * n + j];
                let one = T::one();
                (one - u) * ((one - v) * at(a, c) + v * at(a, d)) + u * ((one - v) * at(b, c) + v * at(b, d))
            }
        }
    }
}

/// Samples `datum` on the quadrature grid for `n_max` (oversampled unless band-limited)
/// and projects it.
pub fn project_datum<T: Real, D: BoundaryDatum<T> + ?Sized>(
    dom: &DomainSpec<T>,
    datum: &D,
    n_max: usize,
) -> Result<SpectralField<T>> {
    let oversample = match datum.bandwidth() {
        Some(b) if b <= n_max => 1,
        _ => 4,
    };
    let grid = BoundaryGrid::sample(dom, n_max, oversample, |y| datum.value(y));
    project_boundary_datum(dom, &grid, n_max)
}
