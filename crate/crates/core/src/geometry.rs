//! Disk and ball geometry: domains, interior points and boundary points.

use crate::error::{Error, Result};
use crate::real::{wrap_angle, Real};

/// Canonical domain: the disk (`dim = 2`) or the ball (`dim = 3`) of radius `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec<T> {
    dim: usize,
    radius: T,
}

impl<T: Real> DomainSpec<T> {
    pub fn new(dim: usize, radius: T) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidParameter(format!("dim must be 2 or 3, got {dim}")));
        }
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { dim, radius })
    }

    pub fn disk(radius: T) -> Result<Self> {
        Self::new(2, radius)
    }

    pub fn ball(radius: T) -> Result<Self> {
        Self::new(3, radius)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// Validates that `p` lies in the closed domain and returns `|p|`.
    pub fn check_closure(&self, p: &Point<T>) -> Result<T> {
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return Err(Error::NonFinite(format!("point {p:?}")));
        }
        if self.dim == 2 && p.z != T::zero() {
            return Err(Error::Domain(format!("planar point expected, got z = {}", p.z)));
        }
        let r = p.norm();
        if r > self.radius * (T::one() + T::lit(1e-12)) {
            return Err(Error::Domain(format!("|x| = {r} exceeds R = {}", self.radius)));
        }
        Ok(r)
    }

    /// Radial projection of a point with `|p| = R` (to rounding) onto the boundary.
    pub fn boundary_point(&self, p: &Point<T>) -> Result<BoundaryPoint<T>> {
        let r = self.check_closure(p)?;
        let tol = self.radius * T::lit(1e-12);
        if (r - self.radius).abs() > tol {
            return Err(Error::Domain(format!("|x| = {r} is not on the boundary")));
        }
        Ok(match self.dim {
            2 => BoundaryPoint::Circle(p.y.atan2(p.x)).normalized(self.radius),
            _ => BoundaryPoint::Sphere(*p).normalized(self.radius),
        })
    }
}

/// A point of `R^3`; disk points keep `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Point<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn planar(x: T, y: T) -> Self {
        Self { x, y, z: T::zero() }
    }

    pub fn origin() -> Self {
        Self::default()
    }

    pub fn from_polar(r: T, theta: T) -> Self {
        Self::planar(r * theta.cos(), r * theta.sin())
    }

    pub fn from_spherical(r: T, colatitude: T, longitude: T) -> Self {
        let s = colatitude.sin();
        Self::new(r * s * longitude.cos(), r * s * longitude.sin(), r * colatitude.cos())
    }

    pub fn norm(&self) -> T {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scale(&self, c: T) -> Self {
        Self::new(self.x * c, self.y * c, self.z * c)
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Colatitude in `[0, pi]` and longitude in `[0, 2pi)`; the origin maps to `(0, 0)`.
    pub fn spherical_angles(&self) -> (T, T) {
        let r = self.norm();
        if r == T::zero() {
            return (T::zero(), T::zero());
        }
        let c = (self.z / r).max(-T::one()).min(T::one());
        (c.acos(), wrap_angle(self.y.atan2(self.x)))
    }
}

/// A point of the boundary: an angle on the circle, or a point of the sphere of radius `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint<T> {
    Circle(T),
    Sphere(Point<T>),
}

impl<T: Real> BoundaryPoint<T> {
    /// Reduces the angle mod 2pi, or rescales the vector to length `radius`.
    pub fn normalized(self, radius: T) -> Self {
        match self {
            Self::Circle(theta) => Self::Circle(wrap_angle(theta)),
            Self::Sphere(p) => {
                let n = p.norm();
                if n == T::zero() {
                    Self::Sphere(Point::new(T::zero(), T::zero(), radius))
                } else {
                    Self::Sphere(p.scale(radius / n))
                }
            }
        }
    }

    pub fn on_sphere(radius: T, colatitude: T, longitude: T) -> Self {
        Self::Sphere(Point::from_spherical(radius, colatitude, longitude))
    }

    /// Circle angle; for sphere points the longitude.
    pub fn angle(&self) -> T {
        match self {
            Self::Circle(theta) => *theta,
            Self::Sphere(p) => p.spherical_angles().1,
        }
    }

    pub fn to_point(&self, radius: T) -> Point<T> {
        match self {
            Self::Circle(theta) => Point::from_polar(radius, *theta),
            Self::Sphere(p) => *p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_validation() {
        assert!(DomainSpec::new(4, 1.0).is_err());
        assert!(DomainSpec::disk(0.0).is_err());
        assert!(DomainSpec::disk(f64::NAN).is_err());
        let d = DomainSpec::disk(2.0).unwrap();
        assert_eq!(d.check_closure(&Point::planar(1.2, 1.6)).unwrap(), 2.0);
        assert!(d.check_closure(&Point::planar(1.3, 1.6)).is_err());
        assert!(d.check_closure(&Point::new(0.1, 0.0, 0.1)).is_err());
    }

    #[test]
    fn boundary_points_lie_on_the_boundary() {
        let b = DomainSpec::ball(2.0f64).unwrap();
        let y = b.boundary_point(&Point::new(0.0, 1.2, 1.6)).unwrap();
        match y {
            BoundaryPoint::Sphere(p) => assert!((p.norm() - 2.0).abs() < 1e-15),
            _ => panic!(),
        }
        assert!(b.boundary_point(&Point::new(0.0, 0.0, 1.0)).is_err());
        let c = BoundaryPoint::Circle(-0.5f64).normalized(1.0);
        assert!((c.angle() - (2.0 * std::f64::consts::PI - 0.5)).abs() < 1e-15);
        let (th, ph) = Point::from_spherical(1.0, 0.7, 5.9f64).spherical_angles();
        assert!((th - 0.7).abs() < 1e-14 && (ph - 5.9).abs() < 1e-14);
    }
}
