//! Two-point (staggered) mass and velocity mapping.

use crate::kernel::KernelSpec;
use crate::scalar::{Real, Vector};

/// m_ij = ω_ij/α_i · m_i for every j in `neighbors`.
pub fn pair_masses<T: Real, const D: usize>(
    xi: Vector<T, D>,
    mass_i: T,
    alpha_i: T,
    neighbors: &[Vector<T, D>],
    kernel: &KernelSpec<T>,
) -> Vec<T> {
    neighbors
        .iter()
        .map(|xj| kernel.omega((*xj - xi).norm()) / alpha_i * mass_i)
        .collect()
}

/// Unclamped weight sum α_i = Σ_j ω_ij.
pub fn raw_alpha<T: Real, const D: usize>(
    xi: Vector<T, D>,
    neighbors: &[Vector<T, D>],
    kernel: &KernelSpec<T>,
) -> T {
    neighbors.iter().map(|xj| kernel.omega((*xj - xi).norm())).sum()
}

/// v_ij = (v_i + v_j)/2.
pub fn pair_velocity<T: Real, const D: usize>(vi: Vector<T, D>, vj: Vector<T, D>) -> Vector<T, D> {
    (vi + vj) * T::lit(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelFamily;

    #[test]
    fn masses_sum_to_particle_mass() {
        let k = KernelSpec::new(KernelFamily::ProposedQuartic, 2.5, 1.0).unwrap();
        let xi = Vector([0.0, 0.0]);
        let nb = [Vector([1.0, 0.0]), Vector([0.3, -1.2]), Vector([-2.0, 0.4])];
        let alpha = raw_alpha(xi, &nb, &k);
        let m: f64 = pair_masses(xi, 2.0, alpha, &nb, &k).iter().sum();
        assert!((m - 2.0).abs() < 1e-14);
        let v = pair_velocity(Vector([1.0, 2.0]), Vector([3.0, -2.0]));
        assert_eq!(v.0, [2.0, 0.0]);
    }
}
