//! Solver configuration and the time step.

use rayon::prelude::*;

use crate::calibration::{calibrate, ReferenceConstants};
use crate::classification::{classify_all, compute_alpha_hats, Classification};
use crate::error::{Error, Result};
use crate::forces::{cfl_dt, compute_wall_deltas, pressure_accelerations, xsph_viscosity, WallCondition};
use crate::geometry::{build_neighbors, mean_min_distance, GhostSolidSet, SignedDistanceField};
use crate::kernel::KernelSpec;
use crate::neighborhood::Neighborhood;
use crate::particles::ParticleSystem;
use crate::ppe::{compute_ecs, compute_source, solve_pressure, CgConfig, PressureSystem};
use crate::scalar::{Real, Vector};
use crate::shifting::{concentration, shift_particles, ShiftConfig};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig<T, const D: usize> {
    pub rho0: T,
    pub gravity: Vector<T, D>,
    pub cfl_factor: T,
    pub xsph_eps: T,
    pub dt_max: T,
    /// η0 = eta0_coeff / Δt².
    pub eta0_coeff: T,
    pub max_cg_iterations: usize,
    pub warm_start: bool,
    pub ordered_reductions: bool,
    /// Adds the error-compensating source for particles denser than rest.
    pub error_compensation: bool,
    /// Relative support deficit tolerated before a particle counts as
    /// truncated by the free surface.
    pub surface_tolerance: T,
    /// Moves positions by Δt²·F^p after the projection, so that the step
    /// advects with the corrected velocity; off keeps the predicted positions.
    pub correct_positions: bool,
    pub wall: WallCondition<T>,
    pub shift: ShiftConfig<T>,
}

impl<T: Real, const D: usize> SolverConfig<T, D> {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho0 > T::zero()) {
            return Err(Error::Config(format!("rho0 must be positive, got {}", self.rho0)));
        }
        if !(self.cfl_factor > T::zero() && self.cfl_factor <= T::one()) {
            return Err(Error::Config(format!(
                "cfl_factor must lie in (0, 1], got {}",
                self.cfl_factor
            )));
        }
        if !(self.xsph_eps >= T::zero() && self.xsph_eps <= T::one()) {
            return Err(Error::Config(format!("xsph_eps must lie in [0, 1], got {}", self.xsph_eps)));
        }
        if !(self.dt_max > T::zero()) {
            return Err(Error::Config(format!("dt_max must be positive, got {}", self.dt_max)));
        }
        if !(self.eta0_coeff >= T::zero()) {
            return Err(Error::Config(format!(
                "eta0_coeff must be nonnegative, got {}",
                self.eta0_coeff
            )));
        }
        if !(self.surface_tolerance >= T::zero() && self.surface_tolerance < T::one()) {
            return Err(Error::Config(format!(
                "surface_tolerance must lie in [0, 1), got {}",
                self.surface_tolerance
            )));
        }
        if !self.gravity.is_finite() {
            return Err(Error::Config("gravity must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepReport<T> {
    pub step: u64,
    pub time: T,
    pub dt: T,
    pub cg_iterations: usize,
    pub eta: T,
    pub cg_converged: bool,
    /// ‖r‖₂ history of this step's solve.
    pub residual_norms: Vec<T>,
    /// Shifting ξ per iteration.
    pub xi: Vec<T>,
    pub d_bar: T,
    pub p_min: T,
    pub p_max: T,
    /// ‖ΔP/N − Δt·g‖: per-particle momentum change not due to gravity.
    pub momentum_drift: T,
    /// Mean normalized concentration.
    pub volume: T,
    /// Pb, Pa, Ps, PaS counts.
    pub class_counts: [usize; 4],
    pub degenerate: usize,
}

/// Complete simulation state: geometry, constants and particles.
#[derive(Clone, Debug)]
pub struct Simulation<T, const D: usize> {
    pub config: SolverConfig<T, D>,
    pub kernel: KernelSpec<T>,
    pub constants: ReferenceConstants<T>,
    pub sdf: SignedDistanceField<T, D>,
    pub ghosts: GhostSolidSet<T, D>,
    pub particles: ParticleSystem<T, D>,
    pub time: T,
    pub steps: u64,
}

impl<T: Real, const D: usize> Simulation<T, D> {
    /// Calibrates the reference constants and classifies the initial state.
    pub fn new(
        config: SolverConfig<T, D>,
        kernel: KernelSpec<T>,
        sdf: SignedDistanceField<T, D>,
        ghosts: GhostSolidSet<T, D>,
        particles: ParticleSystem<T, D>,
    ) -> Result<Self> {
        config.validate()?;
        let constants = calibrate::<T, D>(config.shift.d0, &kernel, config.rho0)?;
        let mut sim = Simulation {
            config,
            kernel,
            constants,
            sdf,
            ghosts,
            particles,
            time: T::zero(),
            steps: 0,
        };
        let table = build_neighbors(&sim.particles.positions, &sim.ghosts.positions, sim.kernel.h());
        let cl = classify_all(
            &sim.particles.positions,
            &sim.ghosts.positions,
            &table,
            &sim.kernel,
            &sim.constants,
            sim.config.surface_tolerance,
        );
        sim.store_classification(&cl, &table);
        Ok(sim)
    }

    pub fn d0(&self) -> T {
        self.config.shift.d0
    }

    fn store_classification(&mut self, cl: &Classification<T>, table: &crate::geometry::NeighborTable) {
        self.particles.classes = cl.classes.clone();
        self.particles.alpha_hat = cl.alpha_hat();
        let nb = Neighborhood {
            positions: &self.particles.positions,
            ghosts: &self.ghosts.positions,
            table,
            kernel: &self.kernel,
        };
        let c0 = self.constants.c0;
        let alpha = &self.particles.alpha_hat;
        self.particles.concentration = (0..nb.len())
            .into_par_iter()
            .map(|i| concentration(i, &nb, alpha[i], c0))
            .collect();
    }

    /// Advances one time step.
    pub fn step(&mut self) -> Result<StepReport<T>> {
        let cfg = self.config;
        let h = self.kernel.h();
        let n = self.particles.len();
        let ghosts = &self.ghosts.positions;

        let dt = cfl_dt(self.particles.max_speed(), h, cfg.cfl_factor, cfg.dt_max);

        // Prediction with external force and XSPH smoothing.
        let table = build_neighbors(&self.particles.positions, ghosts, h);
        let alpha_hat = compute_alpha_hats(&self.particles.positions, ghosts, &table, &self.kernel, self.constants.alpha0);
        let nb = Neighborhood {
            positions: &self.particles.positions,
            ghosts,
            table: &table,
            kernel: &self.kernel,
        };
        let velocities = &self.particles.velocities;
        let v_star: Vec<Vector<T, D>> = (0..n)
            .into_par_iter()
            .map(|i| {
                velocities[i] + cfg.gravity * dt + xsph_viscosity(i, &nb, velocities, &alpha_hat, cfg.xsph_eps)
            })
            .collect();
        let x_star: Vec<Vector<T, D>> = self
            .particles
            .positions
            .iter()
            .zip(&v_star)
            .map(|(x, v)| *x + *v * dt)
            .collect();

        let mut positions = x_star.clone();
        let shift_report = shift_particles(
            &mut positions,
            &x_star,
            ghosts,
            &self.sdf,
            &self.kernel,
            &self.constants,
            &cfg.shift,
        );

        // Classification at the shifted positions.
        let table = build_neighbors(&positions, ghosts, h);
        let cl = classify_all(&positions, ghosts, &table, &self.kernel, &self.constants, cfg.surface_tolerance);
        let alpha_hat = cl.alpha_hat();
        let nb = Neighborhood {
            positions: &positions,
            ghosts,
            table: &table,
            kernel: &self.kernel,
        };
        let c0 = self.constants.c0;
        let conc: Vec<T> = (0..n)
            .into_par_iter()
            .map(|i| concentration(i, &nb, alpha_hat[i], c0))
            .collect();

        // Pressure projection.
        let wall_deltas = compute_wall_deltas(&nb, &self.ghosts, &v_star, cfg.wall);
        let divergence = compute_source(&nb, &v_star, &alpha_hat, &wall_deltas, dt)?;
        let source: Vec<T> = divergence.iter().map(|d| -*d).collect();
        let rhs: Vec<T> = if cfg.error_compensation {
            source
                .iter()
                .zip(&conc)
                .zip(&self.particles.previous_source)
                .map(|((s, c), prev)| *s + compute_ecs(*c - T::one(), *prev))
                .collect()
        } else {
            source.clone()
        };
        let system = PressureSystem::assemble(&nb, &cl.weights, &cl.classes, cfg.rho0);
        let mut pressures = if cfg.warm_start && self.particles.pressures.len() == n {
            self.particles.pressures.clone()
        } else {
            vec![T::zero(); n]
        };
        let cg = CgConfig {
            eta0: cfg.eta0_coeff / (dt * dt),
            max_iterations: cfg.max_cg_iterations,
            ordered_reductions: cfg.ordered_reductions,
        };
        let outcome = solve_pressure(&system, &rhs, &mut pressures, &cg)?;

        let acc = pressure_accelerations(
            &cl.classes,
            &pressures,
            &nb,
            &alpha_hat,
            &wall_deltas,
            &self.constants,
            cfg.rho0,
            dt,
        );
        let new_velocities: Vec<Vector<T, D>> = v_star.iter().zip(&acc).map(|(v, a)| *v + *a * dt).collect();

        let d_bar = mean_min_distance(&positions, &table, h);
        let count = T::from_usize_lossy(n.max(1));
        let momentum_before = self.particles.momentum();
        let momentum_after: Vector<T, D> = new_velocities.iter().copied().sum();
        let drift = ((momentum_after - momentum_before) / count - cfg.gravity * dt).norm();
        let volume = if n == 0 {
            T::zero()
        } else {
            conc.iter().copied().sum::<T>() / count
        };
        let p_min = pressures.iter().copied().fold(T::infinity(), T::min);
        let p_max = pressures.iter().copied().fold(T::neg_infinity(), T::max);

        if cfg.correct_positions {
            for (x, a) in positions.iter_mut().zip(&acc) {
                *x += *a * (dt * dt);
            }
        }
        let state = &mut self.particles;
        state.positions = positions;
        state.velocities = new_velocities;
        state.intermediate_velocities = v_star;
        state.pressures = pressures;
        state.classes = cl.classes.clone();
        state.alpha_hat = alpha_hat;
        state.concentration = conc;
        state.previous_source = source;
        self.time += dt;
        self.steps += 1;
        if !self.particles.is_finite() {
            return Err(Error::NonFiniteState {
                step: self.steps,
                time: self.time.as_f64(),
            });
        }

        Ok(StepReport {
            step: self.steps,
            time: self.time,
            dt,
            cg_iterations: outcome.iterations,
            eta: outcome.eta,
            cg_converged: outcome.converged,
            residual_norms: outcome.residual_norms,
            xi: shift_report.xi,
            d_bar,
            p_min: if n == 0 { T::zero() } else { p_min },
            p_max: if n == 0 { T::zero() } else { p_max },
            momentum_drift: drift,
            volume,
            class_counts: cl.counts(),
            degenerate: cl.degenerate,
        })
    }

    /// Steps until `time >= until`, calling `observe` after every step.
    pub fn run_until(&mut self, until: T, mut observe: impl FnMut(&Self, &StepReport<T>)) -> Result<()> {
        while self.time < until {
            let report = self.step()?;
            observe(self, &report);
        }
        Ok(())
    }
}
