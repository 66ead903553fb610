//! The six unit-variance kernels and their induced log-kernels.
//!
//! Every kernel `K` here integrates to one, has zero mean and unit second
//! moment, and has finite roughness `R(K) = ∫K²`. Each induces a log-kernel
//!
//! ```text
//! L(x; z, h) = (xh)^{-1} K((ln x - ln z) / h),   x, z, h > 0,
//! ```
//!
//! which is a proper density on `(0, ∞)` for every location `z` and
//! bandwidth `h`. All log-kernels are generated mechanically from this
//! identity rather than from per-kernel closed forms.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

const SQRT_5: f64 = 2.236_067_977_499_79;
const SQRT_6: f64 = 2.449_489_742_783_178;
const SQRT_3: f64 = 1.732_050_807_568_877_2;
const SQRT_2: f64 = std::f64::consts::SQRT_2;
const PI: f64 = std::f64::consts::PI;

/// Selects one of the six supported kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Epanechnikov,
    Gaussian,
    Laplace,
    Logistic,
    Triangular,
    Uniform,
}

/// Constants of a kernel consumed by variance and AMISE formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConstants {
    /// `R(K) = ∫ K²(z) dz`.
    pub l2_norm: f64,
    /// Half-width of the support interval, or `None` for kernels supported
    /// on the whole real line.
    pub support_halfwidth: Option<f64>,
}

impl KernelKind {
    pub const ALL: [KernelKind; 6] = [
        KernelKind::Epanechnikov,
        KernelKind::Gaussian,
        KernelKind::Laplace,
        KernelKind::Logistic,
        KernelKind::Triangular,
        KernelKind::Uniform,
    ];

    /// Canonical lowercase name.
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Epanechnikov => "epanechnikov",
            KernelKind::Gaussian => "gaussian",
            KernelKind::Laplace => "laplace",
            KernelKind::Logistic => "logistic",
            KernelKind::Triangular => "triangular",
            KernelKind::Uniform => "uniform",
        }
    }

    /// Evaluate `K(y)`. Compact kernels return exactly zero at and beyond
    /// their support edge.
    #[inline]
    pub fn eval(self, y: f64) -> f64 {
        match self {
            KernelKind::Epanechnikov => {
                let a = y.abs();
                if a >= SQRT_5 {
                    0.0
                } else {
                    3.0 * (5.0 - y * y) / (20.0 * SQRT_5)
                }
            }
            KernelKind::Gaussian => (-0.5 * y * y).exp() / (2.0 * PI).sqrt(),
            KernelKind::Laplace => 0.5 * SQRT_2 * (-SQRT_2 * y.abs()).exp(),
            KernelKind::Logistic => {
                let t = PI * y / (2.0 * SQRT_3);
                let sech = 1.0 / t.cosh();
                PI / (4.0 * SQRT_3) * sech * sech
            }
            KernelKind::Triangular => {
                let a = y.abs();
                if a >= SQRT_6 {
                    0.0
                } else {
                    (SQRT_6 - a) / 6.0
                }
            }
            KernelKind::Uniform => {
                if y.abs() >= SQRT_3 {
                    0.0
                } else {
                    1.0 / (2.0 * SQRT_3)
                }
            }
        }
    }

    /// Evaluate the induced log-kernel `L(x; z, h)`.
    pub fn log_eval(self, x: f64, z: f64, h: f64) -> Result<f64, Error> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("log-kernel point x must be positive, got {x}")));
        }
        if !(z > 0.0) {
            return Err(Error::Domain(format!("log-kernel location z must be positive, got {z}")));
        }
        if !(h > 0.0) {
            return Err(Error::Domain(format!("bandwidth h must be positive, got {h}")));
        }
        Ok(self.log_eval_unchecked(x, z.ln(), h))
    }

    /// `L(x; z, h)` with `log z` precomputed and preconditions already
    /// validated by the caller.
    #[inline]
    pub(crate) fn log_eval_unchecked(self, x: f64, log_z: f64, h: f64) -> f64 {
        self.eval((x.ln() - log_z) / h) / (x * h)
    }

    /// Constants of this kernel.
    pub fn constants(self) -> KernelConstants {
        match self {
            KernelKind::Epanechnikov => KernelConstants {
                l2_norm: 3.0 / (5.0 * SQRT_5),
                support_halfwidth: Some(SQRT_5),
            },
            KernelKind::Gaussian => KernelConstants {
                l2_norm: 0.5 / PI.sqrt(),
                support_halfwidth: None,
            },
            KernelKind::Laplace => KernelConstants {
                l2_norm: 0.25 * SQRT_2,
                support_halfwidth: None,
            },
            KernelKind::Logistic => KernelConstants {
                l2_norm: PI / (6.0 * SQRT_3),
                support_halfwidth: None,
            },
            KernelKind::Triangular => KernelConstants {
                l2_norm: SQRT_6 / 9.0,
                support_halfwidth: Some(SQRT_6),
            },
            KernelKind::Uniform => KernelConstants {
                l2_norm: 0.5 / SQRT_3,
                support_halfwidth: Some(SQRT_3),
            },
        }
    }

    /// Half-width in kernel units beyond which `K` is negligible. Equals
    /// the support half-width for compact kernels; for unbounded kernels
    /// this is the point where the tail drops below ~1e-16, which is where
    /// grid padding and quadrature windows can safely stop.
    pub(crate) fn effective_halfwidth(self) -> f64 {
        match self.constants().support_halfwidth {
            Some(w) => w,
            None => match self {
                KernelKind::Gaussian => 8.8,
                KernelKind::Laplace => 26.0,
                KernelKind::Logistic => 21.0,
                _ => unreachable!(),
            },
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    /// Accepts the six canonical lowercase names. "rectangular" is accepted
    /// as an alias for "uniform" but never emitted.
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "epanechnikov" => Ok(KernelKind::Epanechnikov),
            "gaussian" => Ok(KernelKind::Gaussian),
            "laplace" => Ok(KernelKind::Laplace),
            "logistic" => Ok(KernelKind::Logistic),
            "triangular" => Ok(KernelKind::Triangular),
            "uniform" | "rectangular" => Ok(KernelKind::Uniform),
            other => Err(Error::Config(format!(
                "unknown kernel \"{other}\"; valid kernels are epanechnikov, gaussian, laplace, logistic, triangular, uniform"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{integrate_panels, log_spaced_edges};
    use proptest::prelude::*;

    /// Quadrature of `y^m K(y)` over the (effective) support, with panel
    /// edges at the origin and the support boundary so kinks never straddle
    /// a panel.
    fn kernel_moment(kind: KernelKind, m: u32) -> f64 {
        let w = match kind.constants().support_halfwidth {
            Some(w) => w,
            None => 60.0,
        };
        let edges = [-w, -w / 2.0, -1.0, 0.0, 1.0, w / 2.0, w];
        integrate_panels(&|y: f64| y.powi(m as i32) * kind.eval(y), &edges, 1e-12)
    }

    #[test]
    fn table_point_values() {
        let inv_sqrt_2pi = 1.0 / (2.0 * PI).sqrt();
        assert!((KernelKind::Gaussian.eval(0.0) - inv_sqrt_2pi).abs() < 1e-12);
        assert!((KernelKind::Uniform.eval(0.0) - 0.288_675_134_594_812_9).abs() < 1e-12);
        assert_eq!(KernelKind::Epanechnikov.eval(SQRT_5), 0.0);
        assert_eq!(KernelKind::Triangular.eval(SQRT_6 + 0.1), 0.0);
        assert_eq!(KernelKind::Uniform.eval(SQRT_3), 0.0);
        assert!((KernelKind::Laplace.eval(0.0) - 0.5 * SQRT_2).abs() < 1e-12);
        assert!((KernelKind::Logistic.eval(0.0) - PI / (4.0 * SQRT_3)).abs() < 1e-12);
    }

    #[test]
    fn unit_mass_zero_mean_unit_variance() {
        for kind in KernelKind::ALL {
            assert!((kernel_moment(kind, 0) - 1.0).abs() < 1e-8, "{kind}: mass");
            assert!(kernel_moment(kind, 1).abs() < 1e-8, "{kind}: mean");
            assert!((kernel_moment(kind, 2) - 1.0).abs() < 1e-6, "{kind}: variance");
        }
    }

    #[test]
    fn l2_norm_matches_quadrature() {
        for kind in KernelKind::ALL {
            let w = match kind.constants().support_halfwidth {
                Some(w) => w,
                None => 60.0,
            };
            let edges = [-w, -1.0, 0.0, 1.0, w];
            let quad = integrate_panels(&|y: f64| kind.eval(y) * kind.eval(y), &edges, 1e-12);
            let closed = kind.constants().l2_norm;
            assert!((quad - closed).abs() < 1e-8, "{kind}: {quad} vs {closed}");
        }
    }

    #[test]
    fn log_kernel_point_values() {
        // log(1/1) = 0, so L(1; 1, 1) = K(0)
        let v = KernelKind::Gaussian.log_eval(1.0, 1.0, 1.0).unwrap();
        assert!((v - 0.398_942_280_401_432_7).abs() < 1e-12);

        // log-uniform: 1/(2 sqrt(3) x) inside (e^{-sqrt3}, e^{sqrt3}), 0 outside
        for x in [0.2, 0.5, 1.0, 3.0, 5.0, 6.0] {
            let v = KernelKind::Uniform.log_eval(x, 1.0, 1.0).unwrap();
            let expect = if x > (-SQRT_3).exp() && x < SQRT_3.exp() {
                1.0 / (2.0 * SQRT_3 * x)
            } else {
                0.0
            };
            assert!((v - expect).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn log_kernel_rejects_bad_arguments() {
        assert!(KernelKind::Gaussian.log_eval(0.0, 1.0, 1.0).is_err());
        assert!(KernelKind::Gaussian.log_eval(1.0, -2.0, 1.0).is_err());
        assert!(KernelKind::Gaussian.log_eval(1.0, 1.0, 0.0).is_err());
        assert!(KernelKind::Gaussian.log_eval(f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn log_kernel_unit_mass_spot_checks() {
        // The full (z, h) sweep runs in the acceptance suite; keep one pair
        // per kernel here so a broken kernel fails fast.
        for kind in KernelKind::ALL {
            let (z, h) = (0.5, 0.7);
            let w = kind.effective_halfwidth() * h;
            let lo = z * (-w).exp();
            let hi = z * w.exp();
            let edges = log_spaced_edges(lo, hi, 32);
            let mass = integrate_panels(&|x: f64| kind.log_eval(x, z, h).unwrap(), &edges, 1e-10);
            assert!((mass - 1.0).abs() < 1e-6, "{kind}: mass {mass}");
        }
    }

    #[test]
    fn name_round_trip_and_alias() {
        for kind in KernelKind::ALL {
            assert_eq!(kind.name().parse::<KernelKind>().unwrap(), kind);
        }
        assert_eq!("rectangular".parse::<KernelKind>().unwrap(), KernelKind::Uniform);
        let err = "tricube".parse::<KernelKind>().unwrap_err();
        assert!(err.to_string().contains("epanechnikov"));
    }

    proptest! {
        #[test]
        fn kernels_are_symmetric_and_nonnegative(y in -12.0f64..12.0) {
            for kind in KernelKind::ALL {
                let v = kind.eval(y);
                prop_assert!(v >= 0.0);
                prop_assert!((v - kind.eval(-y)).abs() <= 1e-15 * (1.0 + v));
            }
        }

        #[test]
        fn log_kernel_matches_change_of_variable(
            x in 0.01f64..50.0,
            z in 0.01f64..50.0,
            h in 0.05f64..4.0,
        ) {
            for kind in KernelKind::ALL {
                let direct = kind.log_eval(x, z, h).unwrap();
                let identity = kind.eval((x.ln() - z.ln()) / h) / (x * h);
                prop_assert!((direct - identity).abs() <= 1e-14 * (1.0 + identity.abs()));
            }
        }
    }
}
