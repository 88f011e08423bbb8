//! Reference constants from a prototype particle with a full lattice
//! neighborhood.

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::scalar::{Real, Vector};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceConstants<T> {
    /// Full-support weight sum α0.
    pub alpha0: T,
    /// Full-support Laplacian diagonal A0.
    pub a0: T,
    /// Raw lattice concentration; concentrations are reported divided by it.
    pub c0: T,
    /// Raw lattice Δc (negative for decreasing kernels).
    pub delta0c: T,
    /// |∇c| on the lattice; zero up to rounding.
    pub grad0c: T,
    pub beta0: T,
    pub lambda0: T,
    pub kappa0: T,
}

impl<T: Real> ReferenceConstants<T> {
    /// Δc magnitude in the normalized-concentration convention (c0 = 1).
    pub fn delta0c_normalized(&self) -> T {
        (self.delta0c / self.c0).abs()
    }
}

/// Lattice offsets of spacing `d0` with `0 < r < h` around a particle at the
/// origin.
pub fn build_prototype<T: Real, const D: usize>(d0: T, h: T) -> Vec<Vector<T, D>> {
    let m = (h / d0).ceil().to_i64().unwrap_or(0);
    let side = (2 * m + 1) as usize;
    let total = side.pow(D as u32);
    let mut out = Vec::new();
    for flat in 0..total {
        let mut rest = flat;
        let p = Vector::<T, D>::from_fn(|_| {
            let k = (rest % side) as i64 - m;
            rest /= side;
            T::lit(k as f64) * d0
        });
        let r = p.norm();
        if r > T::zero() && r < h {
            out.push(p);
        }
    }
    out
}

/// α0 = Σ ω and A0 = Σ (1/α0 + 1/α0) ω/r² over the prototype.
pub fn compute_alpha0_a0<T: Real, const D: usize>(
    proto: &[Vector<T, D>],
    kernel: &KernelSpec<T>,
) -> (T, T) {
    let alpha0: T = proto.iter().map(|p| kernel.omega(p.norm())).sum();
    let sum: T = proto.iter().map(|p| kernel.omega_over_r2(p.norm())).sum();
    (alpha0, T::lit(2.0) / alpha0 * sum)
}

/// Raw c0 = ΣW/α0 and Δ0c = Σ(ω′/r)/α0 (clamped at δ).
pub fn compute_c0_delta0c<T: Real, const D: usize>(
    proto: &[Vector<T, D>],
    kernel: &KernelSpec<T>,
    alpha0: T,
) -> (T, T) {
    let w: T = proto.iter().map(|p| kernel.big_w(p.norm())).sum();
    let lap: T = proto.iter().map(|p| kernel.omega_prime_over_r(p.norm())).sum();
    (w / alpha0, lap / alpha0)
}

fn grad0c<T: Real, const D: usize>(proto: &[Vector<T, D>], kernel: &KernelSpec<T>, alpha0: T) -> T {
    let g: Vector<T, D> = proto
        .iter()
        .map(|p| {
            let r = p.norm();
            *p / r * kernel.omega_over_r(r)
        })
        .sum();
    g.norm() / alpha0
}

/// Interior-case pressure gradient at the prototype centre for the pressure
/// field `p`, with β0 = 1.
fn centre_gradient<T: Real, const D: usize>(
    proto: &[Vector<T, D>],
    kernel: &KernelSpec<T>,
    alpha0: T,
    rho0: T,
    p: impl Fn(&Vector<T, D>) -> T,
) -> Vector<T, D> {
    let pi = p(&Vector::zeros());
    let coeff = T::lit(2.0) / alpha0;
    let sum: Vector<T, D> = proto
        .iter()
        .map(|x| {
            let r = x.norm();
            *x / r * (coeff * (p(x) - pi) * kernel.omega_over_r(r))
        })
        .sum();
    sum / rho0
}

/// Scales the pressure force so that a linear field p = x yields exactly
/// (1/ρ0, 0, …) on the lattice.
pub fn calibrate_beta0<T: Real, const D: usize>(
    proto: &[Vector<T, D>],
    kernel: &KernelSpec<T>,
    alpha0: T,
    rho0: T,
) -> Result<T> {
    if !(rho0 > T::zero()) {
        return Err(Error::Calibration(format!("rho0 must be positive, got {rho0}")));
    }
    let computed = centre_gradient(proto, kernel, alpha0, rho0, |x| x[0]);
    if !(computed[0].abs() > T::zero()) || !computed[0].is_finite() {
        return Err(Error::Calibration(
            "pressure force of p = x has no x-component".into(),
        ));
    }
    Ok((T::one() / rho0) / computed.norm())
}

/// Runs the full prototype calibration.
pub fn calibrate<T: Real, const D: usize>(
    d0: T,
    kernel: &KernelSpec<T>,
    rho0: T,
) -> Result<ReferenceConstants<T>> {
    let proto = build_prototype::<T, D>(d0, kernel.h());
    if proto.is_empty() {
        return Err(Error::Calibration(format!(
            "no lattice neighbor within h = {} at spacing {d0}",
            kernel.h()
        )));
    }
    let (alpha0, a0) = compute_alpha0_a0(&proto, kernel);
    let (c0, delta0c) = compute_c0_delta0c(&proto, kernel, alpha0);
    let g0 = grad0c(&proto, kernel, alpha0);
    debug_assert!(g0 * d0 < T::lit(1e-5), "lattice concentration gradient should vanish");
    let beta0 = calibrate_beta0(&proto, kernel, alpha0, rho0)?;
    Ok(ReferenceConstants {
        alpha0,
        a0,
        c0,
        delta0c,
        grad0c: g0,
        beta0,
        lambda0: T::one(),
        kappa0: T::one(),
    })
}
