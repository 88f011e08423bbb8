//! Wall velocity constraint, per-class pressure gradient, XSPH smoothing and
//! the CFL time step.

use rayon::prelude::*;

use crate::calibration::ReferenceConstants;
use crate::classification::ParticleClass;
use crate::error::{Error, Result};
use crate::geometry::GhostSolidSet;
use crate::neighborhood::Neighborhood;
use crate::scalar::{Real, Vector};

/// Velocity floor in the CFL condition, m/s.
pub const CFL_VELOCITY_FLOOR: f64 = 1e-8;

/// Solid-wall slipperiness: `cn` scales the normal relative velocity that is
/// cancelled, `ct` the tangential one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WallCondition<T> {
    cn: T,
    ct: T,
}

impl<T: Real> WallCondition<T> {
    pub fn new(cn: T, ct: T) -> Result<Self> {
        let unit = |v: T| v >= T::zero() && v <= T::one();
        if !unit(cn) || !unit(ct) {
            return Err(Error::Config(format!(
                "wall coefficients must lie in [0, 1], got cn = {cn}, ct = {ct}"
            )));
        }
        Ok(WallCondition { cn, ct })
    }

    pub fn no_slip() -> Self {
        WallCondition {
            cn: T::one(),
            ct: T::one(),
        }
    }

    pub fn cn(&self) -> T {
        self.cn
    }

    pub fn ct(&self) -> T {
        self.ct
    }
}

/// Δv* between fluid particle velocity `v_star` and a ghost with velocity
/// `v_ghost` and unit normal `normal`. The normal coefficient is forced to 1
/// when the particle approaches the wall.
pub fn wall_delta_v<T: Real, const D: usize>(
    v_star: Vector<T, D>,
    v_ghost: Vector<T, D>,
    normal: Vector<T, D>,
    wall: WallCondition<T>,
) -> Vector<T, D> {
    let relative = v_ghost - v_star;
    let normal_part = relative.project_onto(&normal);
    let tangential = relative - normal_part;
    let cn = if relative.dot(&normal) > T::zero() {
        T::one()
    } else {
        wall.cn
    };
    normal_part * cn + tangential * wall.ct
}

/// Δv* for every fluid–ghost pair, stored parallel to the solid adjacency.
pub fn compute_wall_deltas<T: Real, const D: usize>(
    nb: &Neighborhood<'_, T, D>,
    ghosts: &GhostSolidSet<T, D>,
    v_star: &[Vector<T, D>],
    wall: WallCondition<T>,
) -> Vec<Vector<T, D>> {
    let rows: Vec<Vec<Vector<T, D>>> = (0..nb.len())
        .into_par_iter()
        .map(|i| {
            nb.table
                .solid(i)
                .iter()
                .map(|&s| wall_delta_v(v_star[i], ghosts.velocities[s], ghosts.normals[s], wall))
                .collect()
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// Bracketed pair sum of the per-class pressure operator, without the wall
/// velocity term and without the β0/ρ0 factor.
fn pressure_bracket<T: Real, const D: usize>(
    i: usize,
    class: ParticleClass,
    pressures: &[T],
    nb: &Neighborhood<'_, T, D>,
    alpha_hat: &[T],
) -> Vector<T, D> {
    let inv_i = alpha_hat[i].recip();
    let pi = pressures[i];
    let relative = matches!(class, ParticleClass::Interior | ParticleClass::Wall);
    let mut sum = Vector::zeros();
    for pair in nb.fluid_pairs(i) {
        let j = pair.index;
        let dp = if relative { pressures[j] - pi } else { pressures[j] };
        sum += pair.n * ((inv_i + alpha_hat[j].recip()) * dp * nb.kernel.omega_over_r(pair.r));
    }
    if class == ParticleClass::FreeSurfaceWall {
        // Air term: the missing air support is taken as the complement of the
        // fluid and solid supports, with solids mirroring p_i.
        let air: Vector<T, D> = nb
            .solid_pairs(i)
            .map(|pair| pair.n * nb.kernel.omega_over_r(pair.r))
            .sum();
        sum += air * (T::lit(2.0) * inv_i * pi);
    }
    sum
}

/// Wall velocity term Σ_s (2/α̂_i) proj_{n_is}(Δv*_is) ω_is, in m/s.
fn wall_term<T: Real, const D: usize>(
    i: usize,
    nb: &Neighborhood<'_, T, D>,
    alpha_hat: &[T],
    wall_deltas: &[Vector<T, D>],
) -> Vector<T, D> {
    let coeff = T::lit(2.0) / alpha_hat[i];
    nb.solid_pairs(i)
        .map(|pair| wall_deltas[pair.slot].project_onto(&pair.n) * (coeff * nb.kernel.omega(pair.r)))
        .sum()
}

/// Pressure-gradient estimate ∇p/ρ0 for particle `i` (β0 applied). Under
/// p = x on the reference lattice an interior particle yields (1/ρ0, 0, …).
///
/// For wall-touching classes the wall velocity constraint enters as
/// −(β0/Δt)·Σ_s (2/α̂_i) proj(Δv*) ω, so that subtracting Δt times this
/// gradient moves v* toward the constrained wall velocity.
#[allow(clippy::too_many_arguments)]
pub fn pressure_gradient<T: Real, const D: usize>(
    i: usize,
    class: ParticleClass,
    pressures: &[T],
    nb: &Neighborhood<'_, T, D>,
    alpha_hat: &[T],
    wall_deltas: &[Vector<T, D>],
    constants: &ReferenceConstants<T>,
    rho0: T,
    dt: T,
) -> Vector<T, D> {
    let mut g = pressure_bracket(i, class, pressures, nb, alpha_hat) * (constants.beta0 / rho0);
    if class.touches_wall() {
        g -= wall_term(i, nb, alpha_hat, wall_deltas) * (constants.beta0 / dt);
    }
    g
}

/// Pressure acceleration −∇p/ρ0 for every particle.
#[allow(clippy::too_many_arguments)]
pub fn pressure_accelerations<T: Real, const D: usize>(
    classes: &[ParticleClass],
    pressures: &[T],
    nb: &Neighborhood<'_, T, D>,
    alpha_hat: &[T],
    wall_deltas: &[Vector<T, D>],
    constants: &ReferenceConstants<T>,
    rho0: T,
    dt: T,
) -> Vec<Vector<T, D>> {
    (0..nb.len())
        .into_par_iter()
        .map(|i| {
            -pressure_gradient(i, classes[i], pressures, nb, alpha_hat, wall_deltas, constants, rho0, dt)
        })
        .collect()
}

/// XSPH velocity correction eps·Σ_b (ω_ij/α̂_i)(v_j − v_i).
pub fn xsph_viscosity<T: Real, const D: usize>(
    i: usize,
    nb: &Neighborhood<'_, T, D>,
    velocities: &[Vector<T, D>],
    alpha_hat: &[T],
    eps: T,
) -> Vector<T, D> {
    if eps == T::zero() {
        return Vector::zeros();
    }
    let vi = velocities[i];
    let sum: Vector<T, D> = nb
        .fluid_pairs(i)
        .map(|pair| (velocities[pair.index] - vi) * nb.kernel.omega(pair.r))
        .sum();
    sum * (eps / alpha_hat[i])
}

/// Δt = min(dt_max, cfl·h / max(v_max, v_floor)).
pub fn cfl_dt<T: Real>(v_max: T, h: T, cfl_factor: T, dt_max: T) -> T {
    let v = v_max.max(T::lit(CFL_VELOCITY_FLOOR));
    dt_max.min(cfl_factor * h / v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::calibrate;
    use crate::geometry::build_neighbors;
    use crate::kernel::{KernelFamily, KernelSpec};
    use approx::assert_relative_eq;

    fn lattice(n: i32) -> Vec<Vector<f64, 2>> {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| Vector([i as f64, j as f64])))
            .collect()
    }

    #[test]
    fn wall_delta_cases() {
        let n = Vector([0.0, 1.0]);
        let v = Vector([0.3, -0.2]);
        let cond = WallCondition::new(0.5, 0.5).unwrap();
        assert_eq!(wall_delta_v(v, v, n, cond).0, [0.0, 0.0]);
        // Tangential sliding only, no-slip tangentially.
        let d = wall_delta_v(Vector([1.0, 0.0]), Vector::zeros(), n, WallCondition::new(0.0, 1.0).unwrap());
        assert_eq!(d.0, [-1.0, 0.0]);
        // Approaching the wall: normal part is fully cancelled whatever cn is.
        let d = wall_delta_v(Vector([0.0, -2.0]), Vector::zeros(), n, WallCondition::new(0.0, 0.0).unwrap());
        assert_eq!(d.0, [0.0, 2.0]);
        // Leaving the wall: cn applies.
        let d = wall_delta_v(Vector([0.0, 2.0]), Vector::zeros(), n, WallCondition::new(0.25, 0.0).unwrap());
        assert_eq!(d.0, [0.0, -0.5]);
        let full = wall_delta_v(Vector([0.4, 2.0]), Vector([0.1, 0.1]), n, WallCondition::no_slip());
        assert_relative_eq!(full[0], -0.3);
        assert_relative_eq!(full[1], -1.9);
        assert!(WallCondition::new(1.1, 0.0).is_err());
        assert!(WallCondition::new(0.0, -0.1).is_err());
    }

    #[test]
    fn gradient_on_lattice() {
        let k = KernelSpec::new(KernelFamily::ProposedQuartic, 2.5, 1.0).unwrap();
        let c = calibrate::<f64, 2>(1.0, &k, 1000.0).unwrap();
        let pts = lattice(9);
        let t = build_neighbors(&pts, &[], 2.5);
        let nb = Neighborhood {
            positions: &pts,
            ghosts: &[],
            table: &t,
            kernel: &k,
        };
        let alpha = vec![c.alpha0; pts.len()];
        let centre = pts.iter().position(|p| p.0 == [4.0, 4.0]).unwrap();
        let uniform = vec![3.0; pts.len()];
        let g = pressure_gradient(centre, ParticleClass::Interior, &uniform, &nb, &alpha, &[], &c, 1000.0, 1e-3);
        assert!(g.norm() < 1e-15);
        let linear: Vec<f64> = pts.iter().map(|p| p[0]).collect();
        let g = pressure_gradient(centre, ParticleClass::Interior, &linear, &nb, &alpha, &[], &c, 1000.0, 1e-3);
        assert_relative_eq!(g[0], 1e-3, max_relative = 1e-12);
        assert!(g[1].abs() < 1e-16);
        let zero = vec![0.0; pts.len()];
        let g = pressure_gradient(centre, ParticleClass::FreeSurface, &zero, &nb, &alpha, &[], &c, 1000.0, 1e-3);
        assert_eq!(g.norm(), 0.0);
        // Equal pressures, no walls: the interior forces sum to zero.
        let acc = pressure_accelerations(
            &vec![ParticleClass::Interior; pts.len()],
            &uniform,
            &nb,
            &alpha,
            &[],
            &c,
            1000.0,
            1e-3,
        );
        assert!(acc.iter().copied().sum::<Vector<f64, 2>>().norm() < 1e-14);
    }

    #[test]
    fn xsph_and_cfl() {
        let k = KernelSpec::new(KernelFamily::ProposedQuartic, 2.5, 1.0).unwrap();
        let pts = vec![Vector([0.0, 0.0]), Vector([1.0, 0.0])];
        let t = build_neighbors(&pts, &[], 2.5);
        let nb = Neighborhood {
            positions: &pts,
            ghosts: &[],
            table: &t,
            kernel: &k,
        };
        let alpha = vec![12.0, 12.0];
        let v = vec![Vector([1.0, 0.0]), Vector([-1.0, 0.0])];
        let a = xsph_viscosity(0, &nb, &v, &alpha, 0.1);
        let b = xsph_viscosity(1, &nb, &v, &alpha, 0.1);
        assert_relative_eq!((a + b).norm(), 0.0);
        assert!(a[0] < 0.0);
        assert_eq!(xsph_viscosity(0, &nb, &v, &alpha, 0.0).norm(), 0.0);
        let uniform = vec![Vector([1.0, 2.0]); 2];
        assert_eq!(xsph_viscosity(0, &nb, &uniform, &alpha, 0.5).norm(), 0.0);

        assert_eq!(cfl_dt(0.0, 0.025, 0.4, 1e-3), 1e-3);
        let dt1 = cfl_dt(100.0, 0.025, 0.4, 1e-3);
        let dt2 = cfl_dt(200.0, 0.025, 0.4, 1e-3);
        assert_relative_eq!(dt1, 2.0 * dt2);
        assert_eq!(cfl_dt(10.0, 0.025, 0.4, 1e-3), 1e-3);
    }
}
