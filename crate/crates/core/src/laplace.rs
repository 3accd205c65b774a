//! Fixed-Talbot numerical inversion of Laplace transforms.

use num_complex::Complex;

use crate::real::Real;

/// Default number of contour nodes.
pub const TALBOT_NODES: usize = 32;

/// Inverts `F(s) = int_0^inf e^{-st} f(t) dt` at `t > 0` along the fixed
/// Talbot contour `s(u) = r u (cot u + i)`, `r = 2M/(5t)`. All singularities
/// of `F` must lie on the negative real axis.
pub fn talbot<T, F>(transform: F, t: T, nodes: usize) -> T
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T>,
{
    assert!(t > T::zero(), "talbot inversion needs t > 0");
    let m = T::of_usize(nodes);
    let r = T::lit(2.0) * m / (T::lit(5.0) * t);
    let mut acc = T::lit(0.5) * (r * t).exp() * transform(Complex::new(r, T::zero())).re;
    for k in 1..nodes {
        let theta = T::of_usize(k) * T::PI() / m;
        let cot = theta.cos() / theta.sin();
        let s = Complex::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - T::one()) * cot;
        let term = (s * t).exp() * transform(s) * Complex::new(T::one(), sigma);
        acc += term.re;
    }
    acc * r / m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn inverts_elementary_transforms() {
        // 1/(s+1) -> e^-t
        for &t in &[0.1f64, 1.0, 5.0] {
            let v = talbot(|s: Complex<f64>| (s + 1.0).inv(), t, TALBOT_NODES);
            assert_relative_eq!(v, (-t).exp(), max_relative = 1e-9);
        }
        // 1/sqrt(s) -> 1/sqrt(pi t)
        let v = talbot(|s: Complex<f64>| s.sqrt().inv(), 2.0, TALBOT_NODES);
        assert_relative_eq!(v, 1.0 / (std::f64::consts::PI * 2.0).sqrt(), max_relative = 1e-9);
    }
}
