//! Boundary-corrected pressure Poisson equation and its matrix-free
//! conjugate gradient solve.
//!
//! The operator is kept in its written form L_i = (Â_i/ρ0)p_i − Σ c_ij p_j,
//! which is symmetric positive semi-definite. Pressures are physical
//! (positive under compression), so the solved system is L p = −D + ECS with
//! D the divergence-like source, negative under compression.

use rayon::prelude::*;

use crate::classification::{BoundaryWeights, ParticleClass};
use crate::error::{Error, Result};
use crate::neighborhood::Neighborhood;
use crate::scalar::{Real, Vector};

/// Block length of the fixed-order parallel reductions.
const REDUCTION_BLOCK: usize = 1024;

#[derive(Clone, Debug)]
pub struct PressureSystem<T> {
    diagonal: Vec<T>,
    offsets: Vec<usize>,
    columns: Vec<usize>,
    coefficients: Vec<T>,
    has_dirichlet: bool,
}

impl<T: Real> PressureSystem<T> {
    /// Builds the coefficient lists from this step's neighbors and weights.
    pub fn assemble<const D: usize>(
        nb: &Neighborhood<'_, T, D>,
        weights: &[BoundaryWeights<T>],
        classes: &[ParticleClass],
        rho0: T,
    ) -> Self {
        let inv_rho = rho0.recip();
        let rows: Vec<Vec<(usize, T)>> = (0..nb.len())
            .into_par_iter()
            .map(|i| {
                let inv_i = weights[i].alpha_hat.recip();
                nb.fluid_pairs(i)
                    .map(|pair| {
                        let j = pair.index;
                        let c = (inv_i + weights[j].alpha_hat.recip()) * nb.kernel.omega_over_r2(pair.r);
                        (j, c * inv_rho)
                    })
                    .collect()
            })
            .collect();
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let mut columns = Vec::new();
        let mut coefficients = Vec::new();
        for row in rows {
            for (j, c) in row {
                columns.push(j);
                coefficients.push(c);
            }
            offsets.push(columns.len());
        }
        PressureSystem {
            diagonal: weights.iter().map(|w| w.a_hat * inv_rho).collect(),
            offsets,
            columns,
            coefficients,
            has_dirichlet: classes.iter().any(|c| c.touches_air()),
        }
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    /// False when every row is a Neumann row, in which case the operator has
    /// the constants in its null space.
    pub fn has_dirichlet(&self) -> bool {
        self.has_dirichlet
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diagonal
    }

    /// Column indices and coefficients of row `i` (positive, subtracted).
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let r = self.offsets[i]..self.offsets[i + 1];
        (&self.columns[r.clone()], &self.coefficients[r])
    }

    #[inline]
    fn apply_row(&self, i: usize, p: &[T]) -> T {
        let (cols, coeffs) = self.row(i);
        let off: T = cols.iter().zip(coeffs).map(|(&j, &c)| c * p[j]).sum();
        self.diagonal[i] * p[i] - off
    }

    pub fn apply_into(&self, p: &[T], out: &mut [T]) {
        out.par_iter_mut()
            .enumerate()
            .for_each(|(i, o)| *o = self.apply_row(i, p));
    }

    pub fn apply_laplacian(&self, p: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); p.len()];
        self.apply_into(p, &mut out);
        out
    }
}

/// D_i = (1/Δt)Σ_b (1/α̂_i + 1/α̂_j)((v*_j − v*_i)/2)·n_ij ω/r, plus
/// (1/Δt)Σ_s (2/α̂_i)Δv*_is·n_is ω/r for particles with solid neighbors.
pub fn compute_source<T: Real, const D: usize>(
    nb: &Neighborhood<'_, T, D>,
    v_star: &[Vector<T, D>],
    alpha_hat: &[T],
    wall_deltas: &[Vector<T, D>],
    dt: T,
) -> Result<Vec<T>> {
    if !(dt > T::zero()) {
        return Err(Error::NonPositiveTimeStep(dt.as_f64()));
    }
    let half = T::lit(0.5);
    let inv_dt = dt.recip();
    Ok((0..nb.len())
        .into_par_iter()
        .map(|i| {
            let inv_i = alpha_hat[i].recip();
            let vi = v_star[i];
            let fluid: T = nb
                .fluid_pairs(i)
                .map(|pair| {
                    let j = pair.index;
                    (inv_i + alpha_hat[j].recip())
                        * ((v_star[j] - vi) * half).dot(&pair.n)
                        * nb.kernel.omega_over_r(pair.r)
                })
                .sum();
            let solid: T = nb
                .solid_pairs(i)
                .map(|pair| wall_deltas[pair.slot].dot(&pair.n) * nb.kernel.omega_over_r(pair.r))
                .sum::<T>()
                * (inv_i + inv_i);
            (fluid + solid) * inv_dt
        })
        .collect())
}

/// Error-compensating source |e|·s + |s|·e for particles denser than the
/// reference (e > 0), else 0. `e` is the relative density error and `s` the
/// previous step's compression-positive source.
pub fn compute_ecs<T: Real>(relative_error: T, source: T) -> T {
    if relative_error > T::zero() {
        relative_error.abs() * source + source.abs() * relative_error
    } else {
        T::zero()
    }
}

/// η = (1/N)Σ|L_i − b_i|.
pub fn residual_eta<T: Real>(lp: &[T], rhs: &[T]) -> T {
    if lp.is_empty() {
        return T::zero();
    }
    let total: T = lp.iter().zip(rhs).map(|(a, b)| (*a - *b).abs()).sum();
    total / T::from_usize_lossy(lp.len())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgConfig<T> {
    /// Stop once η ≤ eta0.
    pub eta0: T,
    pub max_iterations: usize,
    /// Fixed-order reductions, independent of thread scheduling.
    pub ordered_reductions: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CgOutcome<T> {
    pub iterations: usize,
    pub eta: T,
    pub converged: bool,
    /// ‖r‖₂ before the first iteration and after each one.
    pub residual_norms: Vec<T>,
}

fn dot<T: Real>(a: &[T], b: &[T], ordered: bool) -> T {
    if ordered {
        let partial: Vec<T> = a
            .par_chunks(REDUCTION_BLOCK)
            .zip(b.par_chunks(REDUCTION_BLOCK))
            .map(|(x, y)| x.iter().zip(y).map(|(u, v)| *u * *v).sum())
            .collect();
        partial.into_iter().sum()
    } else {
        a.par_iter().zip(b).map(|(u, v)| *u * *v).sum()
    }
}

fn mean_abs<T: Real>(v: &[T]) -> T {
    if v.is_empty() {
        return T::zero();
    }
    v.iter().map(|x| x.abs()).sum::<T>() / T::from_usize_lossy(v.len())
}

fn remove_mean<T: Real>(v: &mut [T]) {
    if v.is_empty() {
        return;
    }
    let mean = v.iter().copied().sum::<T>() / T::from_usize_lossy(v.len());
    v.iter_mut().for_each(|x| *x -= mean);
}

/// Unpreconditioned CG on L p = rhs, starting from the contents of
/// `pressures`. Without Dirichlet rows the rhs is made compatible by removing
/// its mean and the solution is returned with zero mean.
pub fn solve_pressure<T: Real>(
    system: &PressureSystem<T>,
    rhs: &[T],
    pressures: &mut [T],
    config: &CgConfig<T>,
) -> Result<CgOutcome<T>> {
    let n = system.len();
    assert_eq!(rhs.len(), n);
    assert_eq!(pressures.len(), n);
    let ordered = config.ordered_reductions;
    let mut b = rhs.to_vec();
    if !system.has_dirichlet() {
        remove_mean(&mut b);
        remove_mean(pressures);
    }

    let mut residual = system.apply_laplacian(pressures);
    residual
        .par_iter_mut()
        .zip(&b)
        .for_each(|(r, bi)| *r = *bi - *r);
    let mut direction = residual.clone();
    let mut applied = vec![T::zero(); n];
    let mut rr = dot(&residual, &residual, ordered);
    let mut norms = vec![rr.sqrt()];
    let mut eta = mean_abs(&residual);
    let mut iterations = 0;

    while eta > config.eta0 && iterations < config.max_iterations {
        system.apply_into(&direction, &mut applied);
        let curvature = dot(&direction, &applied, ordered);
        if !(curvature > T::zero()) {
            if !curvature.is_finite() {
                return Err(Error::SolverDiverged { iteration: iterations });
            }
            break;
        }
        let step = rr / curvature;
        pressures
            .par_iter_mut()
            .zip(&direction)
            .for_each(|(p, y)| *p += step * *y);
        residual
            .par_iter_mut()
            .zip(&applied)
            .for_each(|(r, ly)| *r -= step * *ly);
        let rr_next = dot(&residual, &residual, ordered);
        iterations += 1;
        if !rr_next.is_finite() {
            return Err(Error::SolverDiverged { iteration: iterations });
        }
        let gamma = rr_next / rr;
        rr = rr_next;
        direction
            .par_iter_mut()
            .zip(&residual)
            .for_each(|(y, r)| *y = *r + gamma * *y);
        norms.push(rr.sqrt());
        eta = mean_abs(&residual);
    }

    if !system.has_dirichlet() {
        remove_mean(pressures);
    }
    Ok(CgOutcome {
        iterations,
        eta,
        converged: eta <= config.eta0,
        residual_norms: norms,
    })
}
