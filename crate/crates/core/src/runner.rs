//! Drives a scene to completion, writing frames and metrics.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::io::{write_snapshot, MetricsWriter};
use crate::scalar::Real;
use crate::scenes::SceneConfig;
use crate::solver::Simulation;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    /// Stop after this many steps even if `end_time` is not reached.
    pub max_steps: Option<u64>,
    /// Stop after this many frames have been written.
    pub max_frames: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub steps: u64,
    pub frames: usize,
    pub time: f64,
    pub metrics_path: PathBuf,
}

fn frame_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("frame_{index:05}.txt"))
}

/// Runs an already built simulation; frame 0 is the initial state.
pub fn run_simulation<T: Real, const D: usize>(
    sim: &mut Simulation<T, D>,
    scene: &SceneConfig,
    options: &RunOptions,
    out_dir: &Path,
) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let metrics_path = out_dir.join("metrics.csv");
    let mut metrics = MetricsWriter::create(&metrics_path, &sim.constants, scene.shift_iterations)?;
    let frame_limit = options.max_frames.unwrap_or(usize::MAX);
    let end = T::lit(scene.end_time);
    let interval = T::lit(scene.frame_interval);
    let mut frames = 0;
    if frames < frame_limit {
        write_snapshot(sim, frame_path(out_dir, frames))?;
        frames += 1;
    }
    let mut next_frame = interval;
    while sim.time < end && options.max_steps.is_none_or(|m| sim.steps < m) && frames < frame_limit {
        let report = sim.step()?;
        metrics.append(&report)?;
        if sim.time >= next_frame {
            write_snapshot(sim, frame_path(out_dir, frames))?;
            frames += 1;
            while next_frame <= sim.time {
                next_frame += interval;
            }
        }
    }
    metrics.flush()?;
    Ok(RunSummary {
        steps: sim.steps,
        frames,
        time: sim.time.as_f64(),
        metrics_path,
    })
}

/// Builds the scene in its configured dimension and runs it in `f64`.
pub fn run_scene(scene: &SceneConfig, options: &RunOptions, out_dir: &Path) -> Result<RunSummary> {
    match scene.dimension {
        2 => run_simulation(&mut scene.build::<f64, 2>()?, scene, options, out_dir),
        3 => run_simulation(&mut scene.build::<f64, 3>()?, scene, options, out_dir),
        d => Err(Error::Config(format!("dimension must be 2 or 3, got {d}"))),
    }
}
