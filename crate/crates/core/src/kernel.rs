//! Pair weights ω(r), their clamped ratios, and the integrated concentration
//! weight W(r).
//!
//! All families are written directly as the pair weight ω with ω(0) = 1 and
//! compact support `h`; the normalization of the classical SPH kernels is
//! irrelevant here because every use divides by a weight sum.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Default number of intervals in the W(r) table.
pub const DEFAULT_TABLE_RESOLUTION: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    /// ω = 1 − r⁴/h⁴.
    ProposedQuartic,
    /// M4 cubic spline with support h, scaled so ω(0) = 1.
    CubicSpline,
    /// Wendland C2, (1 − q)⁴(1 + 4q).
    WendlandC2,
    /// Lucy quartic, (1 + 3q)(1 − q)³.
    ClassicQuartic,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 4] = [
        KernelFamily::ProposedQuartic,
        KernelFamily::CubicSpline,
        KernelFamily::WendlandC2,
        KernelFamily::ClassicQuartic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::ProposedQuartic => "proposed_quartic",
            KernelFamily::CubicSpline => "cubic_spline",
            KernelFamily::WendlandC2 => "wendland_c2",
            KernelFamily::ClassicQuartic => "classic_quartic",
        }
    }

    /// ω(q) and dω/dq on the unit support.
    fn unit<T: Real>(self, q: T) -> (T, T) {
        let one = T::one();
        let c = T::lit;
        match self {
            KernelFamily::ProposedQuartic => {
                let q3 = q * q * q;
                (one - q3 * q, -c(4.0) * q3)
            }
            KernelFamily::CubicSpline => {
                if q <= c(0.5) {
                    (
                        one - c(6.0) * q * q + c(6.0) * q * q * q,
                        -c(12.0) * q + c(18.0) * q * q,
                    )
                } else {
                    let s = one - q;
                    (c(2.0) * s * s * s, -c(6.0) * s * s)
                }
            }
            KernelFamily::WendlandC2 => {
                let s = one - q;
                let s3 = s * s * s;
                (s3 * s * (one + c(4.0) * q), -c(20.0) * q * s3)
            }
            KernelFamily::ClassicQuartic => {
                let s = one - q;
                (
                    (one + c(3.0) * q) * s * s * s,
                    -c(12.0) * q * s * s,
                )
            }
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelFamily::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidKernel(format!("unknown kernel family `{s}`")))
    }
}

/// Kernel family, smoothing radius `h`, clamp threshold `delta`, and the
/// precomputed W(r) table.
#[derive(Clone, Debug)]
pub struct KernelSpec<T> {
    family: KernelFamily,
    h: T,
    delta: T,
    table: Vec<T>,
    table_step: T,
}

impl<T: Real> KernelSpec<T> {
    pub fn new(family: KernelFamily, h: T, delta: T) -> Result<Self> {
        Self::with_resolution(family, h, delta, DEFAULT_TABLE_RESOLUTION)
    }

    pub fn with_resolution(
        family: KernelFamily,
        h: T,
        delta: T,
        resolution: usize,
    ) -> Result<Self> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::InvalidKernel(format!("h must be positive, got {h}")));
        }
        if !(delta > T::zero() && delta < h) {
            return Err(Error::InvalidKernel(format!(
                "delta must satisfy 0 < delta < h, got delta = {delta}, h = {h}"
            )));
        }
        if resolution < 2 {
            return Err(Error::InvalidKernel(
                "W table resolution must be at least 2".into(),
            ));
        }
        let mut spec = KernelSpec {
            family,
            h,
            delta,
            table: Vec::new(),
            table_step: h / T::from_usize_lossy(resolution),
        };
        spec.table = spec.tabulate_big_w(resolution);
        Ok(spec)
    }

    #[inline]
    pub fn family(&self) -> KernelFamily {
        self.family
    }

    #[inline]
    pub fn h(&self) -> T {
        self.h
    }

    #[inline]
    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn table_resolution(&self) -> usize {
        self.table.len() - 1
    }

    #[inline]
    pub fn omega(&self, r: T) -> T {
        if r >= self.h {
            return T::zero();
        }
        self.family.unit(r / self.h).0
    }

    #[inline]
    pub fn omega_prime(&self, r: T) -> T {
        if r >= self.h {
            return T::zero();
        }
        self.family.unit(r / self.h).1 / self.h
    }

    /// ω(r)/r, with r replaced by δ when r ≤ δ.
    #[inline]
    pub fn omega_over_r(&self, r: T) -> T {
        self.omega(r) / r.max(self.delta)
    }

    /// ω(r)/r², with r replaced by δ when r ≤ δ.
    #[inline]
    pub fn omega_over_r2(&self, r: T) -> T {
        let d = r.max(self.delta);
        self.omega(r) / (d * d)
    }

    /// ω′(r)/r with the same clamp as [`omega_over_r`](Self::omega_over_r).
    #[inline]
    pub fn omega_prime_over_r(&self, r: T) -> T {
        self.omega_prime(r) / r.max(self.delta)
    }

    /// Ω_ω(r) = ω/r² − ω′/r (unclamped). A kernel is free of the compressive
    /// clumping mode where this is positive. At r = h the one-sided limit from
    /// inside the support is used; beyond h the indicator is zero.
    pub fn stability_indicator(&self, r: T) -> Result<T> {
        if !(r > T::zero()) {
            return Err(Error::SingularRadius);
        }
        if r > self.h {
            return Ok(T::zero());
        }
        let (w, dw) = self.family.unit(r / self.h);
        Ok(w / (r * r) - dw / (self.h * r))
    }

    /// Smallest Ω_ω over the uniform grid r_k = k·h/points, k = 1..=points.
    /// Returns (r, Ω_ω(r)) at the minimum.
    pub fn stability_minimum(&self, points: usize) -> (T, T) {
        let count = T::from_usize_lossy(points.max(1));
        (1..=points.max(1))
            .map(|k| {
                let r = self.h * T::from_usize_lossy(k) / count;
                (r, self.stability_indicator(r).unwrap_or(T::nan()))
            })
            .fold((T::zero(), T::infinity()), |best, cur| if cur.1 < best.1 || cur.1.is_nan() { cur } else { best })
    }

    /// W(r) = ∫_r^h (clamped ω/s) ds, interpolated from the table.
    pub fn big_w(&self, r: T) -> T {
        if r >= self.h {
            return T::zero();
        }
        let x = (r.max(T::zero())) / self.table_step;
        let k = x.floor().to_usize().unwrap_or(0).min(self.table.len() - 2);
        let frac = x - T::from_usize_lossy(k);
        self.table[k] + (self.table[k + 1] - self.table[k]) * frac
    }

    fn tabulate_big_w(&self, resolution: usize) -> Vec<T> {
        // Five-point Gauss-Legendre per panel, split at δ where the clamp kinks.
        const NODES: [f64; 5] = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        const WEIGHTS: [f64; 5] = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let gauss = |a: T, b: T| -> T {
            let mid = (a + b) * T::lit(0.5);
            let half = (b - a) * T::lit(0.5);
            let mut acc = T::zero();
            for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
                acc += T::lit(*w) * self.omega_over_r(mid + half * T::lit(*x));
            }
            acc * half
        };
        let mut table = vec![T::zero(); resolution + 1];
        for k in (0..resolution).rev() {
            let a = T::from_usize_lossy(k) * self.table_step;
            let b = if k + 1 == resolution {
                self.h
            } else {
                T::from_usize_lossy(k + 1) * self.table_step
            };
            let panel = if a < self.delta && self.delta < b {
                gauss(a, self.delta) + gauss(self.delta, b)
            } else {
                gauss(a, b)
            };
            table[k] = table[k + 1] + panel;
        }
        table
    }
}
