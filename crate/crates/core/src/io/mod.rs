//! Scene files, particle snapshots and the metrics time series.

mod config;
mod metrics;
mod snapshot;

pub use config::{apply_override, load_scene, parse_scene, render_scene, SCENE_KEYS};
pub use metrics::{metrics_header, metrics_row, MetricsWriter};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
