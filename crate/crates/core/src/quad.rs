//! Quadrature rules: Gauss-Legendre node tables and an adaptive
//! Gauss-Kronrod (7/15) integrator.

use crate::real::Real;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n > 0, "at least one node");
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, 0.0f64);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                let jf = j as f64;
                p0 = ((2.0 * jf + 1.0) * z * p1 - jf * p2) / (jf + 1.0);
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (
        nodes.into_iter().map(T::lit).collect(),
        weights.into_iter().map(T::lit).collect(),
    )
}

/// Fixed Gauss-Legendre rule mapped to `[a, b]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let mut acc = T::zero();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let fc = f(mid);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(mid - dx) + f(mid + dx);
        kron += T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss += T::lit(WG[j / 2]) * pair;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
}

/// Adaptive Gauss-Kronrod settings.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Real> Default for Adaptive<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::epsilon() * T::lit(10.0),
            rel_tol: T::epsilon() * T::lit(50.0),
            max_intervals: 4000,
        }
    }
}

impl<T: Real> Adaptive<T> {
    pub fn with_tol(abs_tol: T, rel_tol: T) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates over the consecutive intervals defined by `points`
    /// (at least two, ascending).
    pub fn integrate_over<F: FnMut(T) -> T>(&self, points: &[T], mut f: F) -> Integral<T> {
        assert!(points.len() >= 2, "need at least one interval");
        // (a, b, value, error)
        let mut segs: Vec<(T, T, T, T)> = Vec::with_capacity(64);
        for w in points.windows(2) {
            if w[1] > w[0] {
                let (v, e) = kronrod15(&mut f, w[0], w[1]);
                segs.push((w[0], w[1], v, e));
            }
        }
        loop {
            let total: T = segs.iter().map(|s| s.2).sum();
            let err: T = segs.iter().map(|s| s.3).sum();
            let target = self.abs_tol.max(self.rel_tol * total.abs());
            if err <= target || segs.len() >= self.max_intervals {
                return Integral {
                    value: total,
                    error: err,
                    intervals: segs.len(),
                };
            }
            let (worst, _) = segs
                .iter()
                .enumerate()
                .fold((0, T::neg_infinity()), |(bi, be), (i, s)| {
                    if s.3 > be {
                        (i, s.3)
                    } else {
                        (bi, be)
                    }
                });
            let (a, b, _, _) = segs[worst];
            let m = (a + b) / T::lit(2.0);
            if m <= a || m >= b {
                // interval exhausted at working precision
                segs[worst].3 = T::zero();
                continue;
            }
            let (v1, e1) = kronrod15(&mut f, a, m);
            let (v2, e2) = kronrod15(&mut f, m, b);
            segs[worst] = (a, m, v1, e1);
            segs.push((m, b, v2, e2));
        }
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, f: F) -> Integral<T> {
        self.integrate_over(&[a, b], f)
    }
}
