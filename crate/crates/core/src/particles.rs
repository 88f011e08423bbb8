use crate::classification::ParticleClass;
use crate::scalar::{Real, Vector};

/// Fluid state stored as parallel sequences indexed by particle id.
#[derive(Clone, Debug, Default)]
pub struct ParticleSystem<T, const D: usize> {
    pub positions: Vec<Vector<T, D>>,
    pub velocities: Vec<Vector<T, D>>,
    pub intermediate_velocities: Vec<Vector<T, D>>,
    pub pressures: Vec<T>,
    pub classes: Vec<ParticleClass>,
    pub alpha_hat: Vec<T>,
    /// Concentration normalized so the full lattice has c = 1.
    pub concentration: Vec<T>,
    /// Compression-positive divergence source of the previous step, used by
    /// the error-compensating source.
    pub previous_source: Vec<T>,
}

impl<T: Real, const D: usize> ParticleSystem<T, D> {
    pub fn new(positions: Vec<Vector<T, D>>, velocities: Vec<Vector<T, D>>) -> Self {
        assert_eq!(positions.len(), velocities.len());
        let n = positions.len();
        ParticleSystem {
            positions,
            intermediate_velocities: velocities.clone(),
            velocities,
            pressures: vec![T::zero(); n],
            classes: vec![ParticleClass::Interior; n],
            alpha_hat: vec![T::zero(); n],
            concentration: vec![T::one(); n],
            previous_source: vec![T::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn max_speed(&self) -> T {
        self.velocities
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), T::max)
    }

    /// Σ v (unit particle mass).
    pub fn momentum(&self) -> Vector<T, D> {
        self.velocities.iter().copied().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.positions.iter().all(Vector::is_finite)
            && self.velocities.iter().all(Vector::is_finite)
            && self.pressures.iter().all(|p| p.is_finite())
    }
}
