//! Particle shifting by iterative minimization of a per-particle free
//! energy: a momentum anchor to the advected position, a double-well bulk
//! term in the concentration and a squared-gradient term.
//!
//! Concentrations are normalized so the reference lattice has c = 1. The
//! functional is posed in lattice units (lengths divided by d0); in
//! particular `kappa` multiplies d0²·Δc.

use rayon::prelude::*;

use crate::calibration::ReferenceConstants;
use crate::classification::compute_alpha_hats;
use crate::error::{Error, Result};
use crate::geometry::{build_neighbors, SignedDistanceField};
use crate::kernel::KernelSpec;
use crate::neighborhood::Neighborhood;
use crate::scalar::{Real, Vector};

/// Distance, in units of d0, by which particles pushed out of a solid are
/// placed inside the fluid.
const SOLID_MARGIN: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftConfig<T> {
    pub kappa: T,
    pub lambda: T,
    pub iterations: usize,
    pub d0: T,
}

impl<T: Real> ShiftConfig<T> {
    pub fn new(kappa: T, lambda: T, iterations: usize, d0: T) -> Result<Self> {
        let unit = |v: T| v >= T::zero() && v <= T::one();
        if !unit(kappa) {
            return Err(Error::Config(format!("kappa must lie in [0, 1], got {kappa}")));
        }
        if !unit(lambda) {
            return Err(Error::Config(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        if !(d0 > T::zero()) {
            return Err(Error::Config(format!("d0 must be positive, got {d0}")));
        }
        Ok(ShiftConfig {
            kappa,
            lambda,
            iterations,
            d0,
        })
    }
}

/// c_i = Σ W(r_ij) / (α̂_i c0), fluid and ghost solid neighbors.
pub fn concentration<T: Real, const D: usize>(
    i: usize,
    nb: &Neighborhood<'_, T, D>,
    alpha_hat: T,
    c0: T,
) -> T {
    let sum: T = nb
        .fluid_pairs(i)
        .chain(nb.solid_pairs(i))
        .map(|pair| nb.kernel.big_w(pair.r))
        .sum();
    sum / (alpha_hat * c0)
}

/// ∇c_i = Σ n_ij ω/r / (α̂_i c0); points toward increasing concentration.
pub fn grad_c<T: Real, const D: usize>(
    i: usize,
    nb: &Neighborhood<'_, T, D>,
    alpha_hat: T,
    c0: T,
) -> Vector<T, D> {
    let sum: Vector<T, D> = nb
        .fluid_pairs(i)
        .chain(nb.solid_pairs(i))
        .map(|pair| pair.n * nb.kernel.omega_over_r(pair.r))
        .sum();
    sum / (alpha_hat * c0)
}

/// Δc_i = Σ ω′/r / (α̂_i c0).
pub fn lap_c<T: Real, const D: usize>(
    i: usize,
    nb: &Neighborhood<'_, T, D>,
    alpha_hat: T,
    c0: T,
) -> T {
    let sum: T = nb
        .fluid_pairs(i)
        .chain(nb.solid_pairs(i))
        .map(|pair| nb.kernel.omega_prime_over_r(pair.r))
        .sum();
    sum / (alpha_hat * c0)
}

/// ∇F = (x − x*)/d0² + λ(c³ − c)∇c − κ d0² Δc ∇c, in 1/length, with ∇c
/// from [`grad_c`] and Δc from [`lap_c`].
pub fn free_energy_gradient<T: Real, const D: usize>(
    x: Vector<T, D>,
    x_star: Vector<T, D>,
    c: T,
    grad: Vector<T, D>,
    lap: T,
    config: &ShiftConfig<T>,
) -> Vector<T, D> {
    let d0 = config.d0;
    let anchor = (x - x_star) / (d0 * d0);
    let bulk = config.lambda * (c * c * c - c);
    // `lap` is the Laplacian for the increasing-W orientation, opposite to
    // `grad`; negating it pairs both in the same orientation.
    let gradient_energy = -config.kappa * d0 * d0 * lap;
    anchor + grad * (bulk + gradient_energy)
}

/// Step coefficient ς = d0² / (1 + λ0 + κ0 d0² |Δ0c|), which bounds the
/// per-iteration displacement by d0 for admissible λ, κ.
pub fn varsigma<T: Real>(constants: &ReferenceConstants<T>, d0: T) -> T {
    d0 * d0 / (T::one() + constants.lambda0 + constants.kappa0 * d0 * d0 * constants.delta0c_normalized())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ShiftReport<T> {
    /// ξ = Σ‖δx‖/(d0 N) for each iteration.
    pub xi: Vec<T>,
    /// Largest single-particle displacement over all iterations.
    pub max_displacement: T,
}

/// Runs `config.iterations` Jacobi sweeps against the fixed anchors
/// `x_star`, rebuilding neighbors every sweep.
pub fn shift_particles<T: Real, const D: usize>(
    positions: &mut [Vector<T, D>],
    x_star: &[Vector<T, D>],
    ghosts: &[Vector<T, D>],
    sdf: &SignedDistanceField<T, D>,
    kernel: &KernelSpec<T>,
    constants: &ReferenceConstants<T>,
    config: &ShiftConfig<T>,
) -> ShiftReport<T> {
    assert_eq!(positions.len(), x_star.len());
    let d0 = config.d0;
    let step = varsigma(constants, d0);
    let margin = T::lit(SOLID_MARGIN) * d0;
    let count = T::from_usize_lossy(positions.len().max(1));
    let mut report = ShiftReport {
        xi: Vec::with_capacity(config.iterations),
        max_displacement: T::zero(),
    };
    for _ in 0..config.iterations {
        let table = build_neighbors(positions, ghosts, kernel.h());
        let alpha_hat = compute_alpha_hats(positions, ghosts, &table, kernel, constants.alpha0);
        let nb = Neighborhood {
            positions,
            ghosts,
            table: &table,
            kernel,
        };
        let moved: Vec<Vector<T, D>> = (0..positions.len())
            .into_par_iter()
            .map(|i| {
                let c = concentration(i, &nb, alpha_hat[i], constants.c0);
                let g = grad_c(i, &nb, alpha_hat[i], constants.c0);
                let l = lap_c(i, &nb, alpha_hat[i], constants.c0);
                let mut dx = -free_energy_gradient(nb.positions[i], x_star[i], c, g, l, config) * step;
                let len = dx.norm();
                if len > d0 {
                    dx = dx * (d0 / len);
                }
                let x = nb.positions[i] + dx;
                if sdf.distance(&x) < T::zero() {
                    sdf.push_out(x, margin)
                } else {
                    x
                }
            })
            .collect();
        let mut total = T::zero();
        for (x, new) in positions.iter_mut().zip(moved) {
            let d = (new - *x).norm();
            total += d;
            report.max_displacement = report.max_displacement.max(d);
            *x = new;
        }
        report.xi.push(total / (d0 * count));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::calibrate;
    use crate::kernel::KernelFamily;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (KernelSpec<f64>, ReferenceConstants<f64>) {
        let k = KernelSpec::new(KernelFamily::ProposedQuartic, 2.5, 1.0).unwrap();
        let c = calibrate::<f64, 2>(1.0, &k, 1000.0).unwrap();
        (k, c)
    }

    fn lattice(n: i32) -> Vec<Vector<f64, 2>> {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| Vector([i as f64 + 0.5, j as f64 + 0.5])))
            .collect()
    }

    fn open_sdf() -> SignedDistanceField<f64, 2> {
        SignedDistanceField::new(vec![], Vector([0.0, 0.0]), Vector([20.0, 20.0]))
    }

    #[test]
    fn lattice_concentration_and_derivatives() {
        let (k, c) = setup();
        let pts = lattice(11);
        let t = build_neighbors(&pts, &[], 2.5);
        let nb = Neighborhood { positions: &pts, ghosts: &[], table: &t, kernel: &k };
        let centre = pts.iter().position(|p| p.0 == [5.5, 5.5]).unwrap();
        assert_relative_eq!(concentration(centre, &nb, c.alpha0, c.c0), 1.0, max_relative = 1e-12);
        assert!(grad_c(centre, &nb, c.alpha0, c.c0).norm() < 1e-12);
        assert_relative_eq!(lap_c(centre, &nb, c.alpha0, c.c0), c.delta0c / c.c0, max_relative = 1e-12);
        // Top surface: gradient points down into the fluid, c is about half.
        let top = pts.iter().position(|p| p.0 == [5.5, 10.5]).unwrap();
        let g = grad_c(top, &nb, c.alpha0, c.c0);
        assert!(g[1] < 0.0 && g[0].abs() < 1e-12);
        let ct = concentration(top, &nb, c.alpha0, c.c0);
        assert!(ct > 0.4 && ct < 0.7, "{ct}");
    }

    #[test]
    fn isolated_and_pair() {
        let (k, c) = setup();
        let lone = vec![Vector([0.0, 0.0])];
        let t = build_neighbors(&lone, &[], 2.5);
        let nb = Neighborhood { positions: &lone, ghosts: &[], table: &t, kernel: &k };
        assert_eq!(concentration(0, &nb, c.alpha0, c.c0), 0.0);
        let pair = vec![Vector([0.0, 0.0]), Vector([1.7, 0.0])];
        let t = build_neighbors(&pair, &[], 2.5);
        let nb = Neighborhood { positions: &pair, ghosts: &[], table: &t, kernel: &k };
        let g = grad_c(0, &nb, c.alpha0, 1.0);
        assert_relative_eq!(g.norm(), k.omega(1.7) / (1.7 * c.alpha0), max_relative = 1e-14);
    }

    #[test]
    fn energy_gradient_terms() {
        let cfg = ShiftConfig::new(0.0, 0.0, 10, 0.5).unwrap();
        let g = free_energy_gradient(Vector([0.1, 0.0]), Vector([0.0, 0.0]), 0.8, Vector([1.0, 1.0]), -2.0, &cfg);
        assert_relative_eq!(g[0], 0.1 / 0.25);
        assert_eq!(g[1], 0.0);
        let cfg = ShiftConfig::new(0.0, 1.0, 10, 1.0).unwrap();
        let g = free_energy_gradient(Vector([0.0, 0.0]), Vector([0.0, 0.0]), 1.0, Vector([0.3, 0.0]), -2.0, &cfg);
        assert_eq!(g.norm(), 0.0);
        let cfg = ShiftConfig::new(0.5, 0.0, 10, 1.0).unwrap();
        let g = free_energy_gradient(Vector([0.0, 0.0]), Vector([0.0, 0.0]), 0.5, Vector([0.0, -0.2]), -2.0, &cfg);
        assert_relative_eq!(g[1], -0.5 * -2.0 * -0.2);
        assert!(ShiftConfig::new(1.5, 0.0, 1, 1.0).is_err());
        assert!(ShiftConfig::new(0.1, -0.1, 1, 1.0).is_err());
    }

    #[test]
    fn regular_lattice_is_fixed_point_without_bulk_and_gradient_terms() {
        let (k, c) = setup();
        let mut pts = lattice(8);
        let anchors = pts.clone();
        let cfg = ShiftConfig::new(0.0, 0.0, 3, 1.0).unwrap();
        let report = shift_particles(&mut pts, &anchors, &[], &open_sdf(), &k, &c, &cfg);
        assert_eq!(pts, anchors);
        assert!(report.xi.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn displacement_bounded_and_outside_solids() {
        let (k, c) = setup();
        let sdf = SignedDistanceField::new(
            vec![crate::geometry::Primitive::Container { min: Vector([0.0, 0.0]), max: Vector([8.0, 8.0]) }],
            Vector([0.0, 0.0]),
            Vector([8.0, 8.0]),
        );
        let ghosts = crate::geometry::seed_ghost_solids(&sdf, 1.0, 2.5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut pts: Vec<_> = lattice(8)
            .into_iter()
            .map(|p| p + Vector([rng.gen_range(-0.45..0.45), rng.gen_range(-0.45..0.45)]))
            .collect();
        let anchors = pts.clone();
        let cfg = ShiftConfig::new(1.0, 1.0, 10, 1.0).unwrap();
        let report = shift_particles(&mut pts, &anchors, &ghosts.positions, &sdf, &k, &c, &cfg);
        assert!(report.max_displacement <= 1.0 + 1e-12);
        assert!(pts.iter().all(|p| sdf.distance(p) >= 0.0));
        assert_eq!(report.xi.len(), 10);
    }

    #[test]
    fn gradient_energy_reduces_concentration_spread() {
        let (k, c) = setup();
        let sdf = SignedDistanceField::new(
            vec![crate::geometry::Primitive::Container { min: Vector([0.0, 0.0]), max: Vector([10.0, 10.0]) }],
            Vector([0.0, 0.0]),
            Vector([10.0, 10.0]),
        );
        let ghosts = crate::geometry::seed_ghost_solids(&sdf, 1.0, 2.5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pts: Vec<_> = lattice(10)
            .into_iter()
            .map(|p| p + Vector([rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)]))
            .collect();
        let spread = |pts: &[Vector<f64, 2>]| {
            let t = build_neighbors(pts, &ghosts.positions, 2.5);
            let a = compute_alpha_hats(pts, &ghosts.positions, &t, &k, c.alpha0);
            let nb = Neighborhood { positions: pts, ghosts: &ghosts.positions, table: &t, kernel: &k };
            let cs: Vec<f64> = (0..pts.len()).map(|i| concentration(i, &nb, a[i], c.c0)).collect();
            let mean = cs.iter().sum::<f64>() / cs.len() as f64;
            cs.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
        };
        let before = spread(&pts);
        let anchors = pts.clone();
        let cfg = ShiftConfig::new(1.0, 0.0, 10, 1.0).unwrap();
        shift_particles(&mut pts, &anchors, &ghosts.positions, &sdf, &k, &c, &cfg);
        assert!(spread(&pts) < 0.5 * before);
    }
}
