//! Corrected weight sums and the four-way boundary classification of fluid
//! particles.
//!
//! Missing air neighbors are accounted for analytically: the weight sum is
//! clamped from below by the full-support value α0 and the Laplacian
//! diagonal is completed up to A0 for particles truncated by the free
//! surface.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::calibration::ReferenceConstants;
use crate::error::{Error, Result};
use crate::geometry::NeighborTable;
use crate::kernel::KernelSpec;
use crate::scalar::{Real, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ParticleClass {
    /// Support does not touch any boundary (P^b).
    #[default]
    Interior,
    /// Truncated by the free surface only (P^a).
    FreeSurface,
    /// Truncated by a solid wall only (P^s).
    Wall,
    /// Truncated by both (P^{a∧s}).
    FreeSurfaceWall,
}

impl ParticleClass {
    pub const ALL: [ParticleClass; 4] = [
        ParticleClass::Interior,
        ParticleClass::FreeSurface,
        ParticleClass::Wall,
        ParticleClass::FreeSurfaceWall,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ParticleClass::Interior => "Pb",
            ParticleClass::FreeSurface => "Pa",
            ParticleClass::Wall => "Ps",
            ParticleClass::FreeSurfaceWall => "PaS",
        }
    }

    pub fn touches_air(self) -> bool {
        matches!(self, ParticleClass::FreeSurface | ParticleClass::FreeSurfaceWall)
    }

    pub fn touches_wall(self) -> bool {
        matches!(self, ParticleClass::Wall | ParticleClass::FreeSurfaceWall)
    }
}

impl fmt::Display for ParticleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ParticleClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParticleClass::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| Error::Config(format!("unknown particle class `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BoundaryWeights<T> {
    pub alpha_hat: T,
    pub ab: T,
    pub as_: T,
    pub a_hat: T,
}

/// Smallest relative slack on the `>= A0` tests, so that a lattice particle
/// whose sum differs from the prototype only by rounding is never truncated.
fn rounding_slack<T: Real>() -> T {
    T::epsilon() * T::lit(1024.0)
}

/// α̂_i = max(α0, Σ_{b ∪ s} ω_ij).
pub fn compute_alpha_hat<T: Real, const D: usize>(
    i: usize,
    positions: &[Vector<T, D>],
    ghosts: &[Vector<T, D>],
    table: &NeighborTable,
    kernel: &KernelSpec<T>,
    alpha0: T,
) -> T {
    let xi = positions[i];
    let fluid: T = table
        .fluid(i)
        .iter()
        .map(|&j| kernel.omega((positions[j] - xi).norm()))
        .sum();
    let solid: T = table
        .solid(i)
        .iter()
        .map(|&s| kernel.omega((ghosts[s] - xi).norm()))
        .sum();
    alpha0.max(fluid + solid)
}

pub fn compute_alpha_hats<T: Real, const D: usize>(
    positions: &[Vector<T, D>],
    ghosts: &[Vector<T, D>],
    table: &NeighborTable,
    kernel: &KernelSpec<T>,
    alpha0: T,
) -> Vec<T> {
    (0..positions.len())
        .into_par_iter()
        .map(|i| compute_alpha_hat(i, positions, ghosts, table, kernel, alpha0))
        .collect()
}

/// A_i^b and A_i^s; ghost solids take α̂ of the querying particle.
pub fn compute_ab_as<T: Real, const D: usize>(
    i: usize,
    positions: &[Vector<T, D>],
    ghosts: &[Vector<T, D>],
    table: &NeighborTable,
    alpha_hat: &[T],
    kernel: &KernelSpec<T>,
) -> (T, T) {
    let xi = positions[i];
    let inv_i = alpha_hat[i].recip();
    let ab: T = table
        .fluid(i)
        .iter()
        .map(|&j| (inv_i + alpha_hat[j].recip()) * kernel.omega_over_r2((positions[j] - xi).norm()))
        .sum();
    let as_: T = table
        .solid(i)
        .iter()
        .map(|&s| kernel.omega_over_r2((ghosts[s] - xi).norm()))
        .sum::<T>()
        * (inv_i + inv_i);
    (ab, as_)
}

/// `tolerance` is the relative support deficit below which a particle still
/// counts as fully supported.
pub fn classify<T: Real>(ab: T, as_: T, has_solid_neighbors: bool, a0: T, tolerance: T) -> ParticleClass {
    let full = a0 * (T::one() - tolerance.max(rounding_slack::<T>()));
    match (has_solid_neighbors, ab + as_ >= full) {
        (false, true) => ParticleClass::Interior,
        (false, false) => ParticleClass::FreeSurface,
        (true, true) => ParticleClass::Wall,
        (true, false) => ParticleClass::FreeSurfaceWall,
    }
}

/// Â_i per class, and whether a free-surface/wall particle had to be floored
/// at 10⁻⁶·A0 because A_i^s ≥ A0.
pub fn compute_a_hat<T: Real>(class: ParticleClass, ab: T, as_: T, a0: T) -> (T, bool) {
    match class {
        ParticleClass::FreeSurface => (a0, false),
        ParticleClass::Interior | ParticleClass::Wall => (ab, false),
        ParticleClass::FreeSurfaceWall => {
            let floor = a0 * T::lit(1e-6);
            let a = a0 - as_;
            if a <= floor {
                (floor, true)
            } else {
                (a, false)
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Classification<T> {
    pub weights: Vec<BoundaryWeights<T>>,
    pub classes: Vec<ParticleClass>,
    /// Particles whose Â had to be floored.
    pub degenerate: usize,
}

impl<T: Real> Classification<T> {
    pub fn alpha_hat(&self) -> Vec<T> {
        self.weights.iter().map(|w| w.alpha_hat).collect()
    }

    pub fn counts(&self) -> [usize; 4] {
        let mut out = [0; 4];
        for c in &self.classes {
            let k = ParticleClass::ALL.iter().position(|x| x == c).unwrap_or(0);
            out[k] += 1;
        }
        out
    }

    pub fn has_free_surface(&self) -> bool {
        self.classes.iter().any(|c| c.touches_air())
    }
}

/// α̂ pass followed by the A^b/A^s/class pass.
pub fn classify_all<T: Real, const D: usize>(
    positions: &[Vector<T, D>],
    ghosts: &[Vector<T, D>],
    table: &NeighborTable,
    kernel: &KernelSpec<T>,
    constants: &ReferenceConstants<T>,
    tolerance: T,
) -> Classification<T> {
    let alpha_hat = compute_alpha_hats(positions, ghosts, table, kernel, constants.alpha0);
    let rows: Vec<(BoundaryWeights<T>, ParticleClass, bool)> = (0..positions.len())
        .into_par_iter()
        .map(|i| {
            let (ab, as_) = compute_ab_as(i, positions, ghosts, table, &alpha_hat, kernel);
            let class = classify(ab, as_, !table.solid(i).is_empty(), constants.a0, tolerance);
            let (a_hat, degenerate) = compute_a_hat(class, ab, as_, constants.a0);
            (
                BoundaryWeights {
                    alpha_hat: alpha_hat[i],
                    ab,
                    as_,
                    a_hat,
                },
                class,
                degenerate,
            )
        })
        .collect();
    let degenerate = rows.iter().filter(|r| r.2).count();
    let (weights, classes) = rows.into_iter().map(|(w, c, _)| (w, c)).unzip();
    Classification {
        weights,
        classes,
        degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::calibrate;
    use crate::geometry::{build_neighbors, seed_ghost_solids, Primitive, SignedDistanceField};
    use crate::kernel::KernelFamily;
    use approx::assert_relative_eq;

    fn setup() -> (KernelSpec<f64>, ReferenceConstants<f64>) {
        let k = KernelSpec::new(KernelFamily::ProposedQuartic, 2.5, 1.0).unwrap();
        let c = calibrate::<f64, 2>(1.0, &k, 1000.0).unwrap();
        (k, c)
    }

    fn lattice(nx: i32, ny: i32) -> Vec<Vector<f64, 2>> {
        (0..nx)
            .flat_map(|i| (0..ny).map(move |j| Vector([i as f64 + 0.5, j as f64 + 0.5])))
            .collect()
    }

    fn index_of(pts: &[Vector<f64, 2>], x: f64, y: f64) -> usize {
        pts.iter().position(|p| p.0 == [x, y]).unwrap()
    }

    #[test]
    fn isolated_particle() {
        let (k, c) = setup();
        let pts = vec![Vector([0.0, 0.0])];
        let t = build_neighbors(&pts, &[], 2.5);
        assert_eq!(compute_alpha_hat(0, &pts, &[], &t, &k, c.alpha0), c.alpha0);
        let cl = classify_all(&pts, &[], &t, &k, &c, 0.0);
        assert_eq!(cl.classes[0], ParticleClass::FreeSurface);
        assert_eq!(cl.weights[0].a_hat, c.a0);
    }

    #[test]
    fn lattice_interior_and_surface() {
        let (k, c) = setup();
        let pts = lattice(11, 11);
        let t = build_neighbors(&pts, &[], 2.5);
        let cl = classify_all(&pts, &[], &t, &k, &c, 0.0);
        let centre = index_of(&pts, 5.5, 5.5);
        assert_relative_eq!(cl.weights[centre].alpha_hat, c.alpha0, max_relative = 1e-14);
        assert_relative_eq!(cl.weights[centre].ab, c.a0, max_relative = 1e-12);
        assert_eq!(cl.classes[centre], ParticleClass::Interior);
        assert_relative_eq!(cl.weights[centre].a_hat, c.a0, max_relative = 1e-12);
        let edge = index_of(&pts, 5.5, 10.5);
        assert_eq!(cl.classes[edge], ParticleClass::FreeSurface);
        assert_eq!(cl.weights[edge].a_hat, c.a0);
        assert!(cl.weights[edge].ab < c.a0);
        assert_eq!(cl.counts().iter().sum::<usize>(), pts.len());
    }

    #[test]
    fn compressed_cluster_uses_actual_sum() {
        let (k, c) = setup();
        let pts: Vec<_> = lattice(7, 7).into_iter().map(|p| p * 0.7).collect();
        let t = build_neighbors(&pts, &[], 2.5);
        let i = index_of(&pts, 3.5 * 0.7, 3.5 * 0.7);
        let direct: f64 = t.fluid(i).iter().map(|&j| k.omega((pts[j] - pts[i]).norm())).sum();
        assert!(direct > c.alpha0);
        assert_relative_eq!(compute_alpha_hat(i, &pts, &[], &t, &k, c.alpha0), direct);
    }

    #[test]
    fn wall_particles_and_half_lattice() {
        let (k, c) = setup();
        let sdf = SignedDistanceField::new(
            vec![Primitive::Container {
                min: Vector([0.0, 0.0]),
                max: Vector([12.0, 12.0]),
            }],
            Vector([0.0, 0.0]),
            Vector([12.0, 12.0]),
        );
        let ghosts = seed_ghost_solids(&sdf, 1.0, 2.5);
        let pts = lattice(12, 12);
        let t = build_neighbors(&pts, &ghosts.positions, 2.5);
        let cl = classify_all(&pts, &ghosts.positions, &t, &k, &c, 0.0);
        // Fully walled, fully filled: nothing touches air.
        assert!(!cl.has_free_surface());
        let bottom = index_of(&pts, 5.5, 0.5);
        assert_eq!(cl.classes[bottom], ParticleClass::Wall);
        assert_relative_eq!(cl.weights[bottom].ab + cl.weights[bottom].as_, c.a0, max_relative = 1e-12);
        assert_eq!(cl.weights[bottom].a_hat, cl.weights[bottom].ab);
        assert!(t.solid(index_of(&pts, 5.5, 5.5)).is_empty());
        assert_eq!(cl.weights[index_of(&pts, 5.5, 5.5)].as_, 0.0);

        // A particle whose solid neighbors mirror the half lattice below it.
        let lone = vec![Vector([5.5, 0.5])];
        let only_below: Vec<_> = ghosts.positions.iter().copied().filter(|g| g[1] < 0.0).collect();
        let t = build_neighbors(&lone, &only_below, 2.5);
        let alpha = vec![c.alpha0];
        let (_, as_) = compute_ab_as(0, &lone, &only_below, &t, &alpha, &k);
        let below: f64 = crate::calibration::build_prototype::<f64, 2>(1.0, 2.5)
            .iter()
            .filter(|p| p[1] < 0.0)
            .map(|p| k.omega_over_r2(p.norm()))
            .sum::<f64>()
            * 2.0
            / c.alpha0;
        assert_relative_eq!(as_, below, max_relative = 1e-12);
        assert!(as_ < c.a0 / 2.0);
    }

    #[test]
    fn a_hat_rules() {
        let a0 = 2.0;
        assert_eq!(compute_a_hat(ParticleClass::FreeSurface, 0.5, 0.0, a0), (2.0, false));
        assert_eq!(compute_a_hat(ParticleClass::Interior, 2.5, 0.0, a0), (2.5, false));
        assert_eq!(compute_a_hat(ParticleClass::Wall, 1.5, 0.7, a0), (1.5, false));
        assert_eq!(compute_a_hat(ParticleClass::FreeSurfaceWall, 0.5, 0.5, a0), (1.5, false));
        let (a, degenerate) = compute_a_hat(ParticleClass::FreeSurfaceWall, 0.0, 2.5, a0);
        assert!(degenerate);
        assert_eq!(a, 2e-6);
        assert_eq!(classify(2.0, 0.0, false, a0, 0.0), ParticleClass::Interior);
        assert_eq!(classify(1.9, 0.0, false, a0, 0.0), ParticleClass::FreeSurface);
        assert_eq!(classify(1.0, 1.0, true, a0, 0.0), ParticleClass::Wall);
        assert_eq!(classify(1.0, 0.9, true, a0, 0.0), ParticleClass::FreeSurfaceWall);
        assert_eq!(classify(1.99, 0.0, false, a0, 0.01), ParticleClass::Interior);
        assert_eq!(classify(1.97, 0.0, false, a0, 0.01), ParticleClass::FreeSurface);
        assert_eq!(classify(1.0, 0.99, true, a0, 0.01), ParticleClass::Wall);
    }
}
