//! `key = value` scene files.
//!
//! `#` starts a comment. The `scene` key selects a preset whose defaults the
//! remaining keys override; `scene` and `d0` are mandatory. Unknown or
//! repeated keys are errors.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::KernelFamily;
use crate::scenes::{SceneConfig, SceneKind};

/// Every key accepted in a scene file, in rendering order.
pub const SCENE_KEYS: &[&str] = &[
    "scene",
    "dimension",
    "d0",
    "kernel",
    "h_ratio",
    "delta_ratio",
    "table_resolution",
    "tank_width",
    "tank_height",
    "tank_depth",
    "fluid_width",
    "fluid_height",
    "fluid_depth",
    "rho0",
    "gravity",
    "cn",
    "ct",
    "kappa",
    "lambda",
    "shift_iterations",
    "cfl",
    "xsph_eps",
    "dt_max",
    "eta0_coeff",
    "max_cg_iterations",
    "warm_start",
    "ordered_reductions",
    "ecs",
    "surface_tolerance",
    "correct_positions",
    "end_time",
    "frame_interval",
    "seed",
    "epsilon",
    "velocity_scale",
];

fn parse<V: FromStr>(key: &str, value: &str) -> std::result::Result<V, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value `{value}` for `{key}`"))
}

fn parse_bool(key: &str, value: &str) -> std::result::Result<bool, String> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(format!("invalid boolean `{value}` for `{key}`")),
    }
}

/// Sets one key. The `scene` key is handled by the caller.
fn set_key(cfg: &mut SceneConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    match key {
        "dimension" => cfg.dimension = parse(key, value)?,
        "d0" => cfg.d0 = parse(key, value)?,
        "kernel" => {
            cfg.kernel = value
                .parse::<KernelFamily>()
                .map_err(|e| e.to_string())?
        }
        "h_ratio" => cfg.h_ratio = parse(key, value)?,
        "delta_ratio" => cfg.delta_ratio = parse(key, value)?,
        "table_resolution" => cfg.table_resolution = parse(key, value)?,
        "tank_width" => cfg.tank[0] = parse(key, value)?,
        "tank_height" => cfg.tank[1] = parse(key, value)?,
        "tank_depth" => cfg.tank[2] = parse(key, value)?,
        "fluid_width" => cfg.fluid[0] = parse(key, value)?,
        "fluid_height" => cfg.fluid[1] = parse(key, value)?,
        "fluid_depth" => cfg.fluid[2] = parse(key, value)?,
        "rho0" => cfg.rho0 = parse(key, value)?,
        "gravity" => cfg.gravity = parse(key, value)?,
        "cn" => cfg.cn = parse(key, value)?,
        "ct" => cfg.ct = parse(key, value)?,
        "kappa" => cfg.kappa = parse(key, value)?,
        "lambda" => cfg.lambda = parse(key, value)?,
        "shift_iterations" => cfg.shift_iterations = parse(key, value)?,
        "cfl" => cfg.cfl = parse(key, value)?,
        "xsph_eps" => cfg.xsph_eps = parse(key, value)?,
        "dt_max" => cfg.dt_max = parse(key, value)?,
        "eta0_coeff" => cfg.eta0_coeff = parse(key, value)?,
        "max_cg_iterations" => cfg.max_cg_iterations = parse(key, value)?,
        "warm_start" => cfg.warm_start = parse_bool(key, value)?,
        "ordered_reductions" => cfg.ordered_reductions = parse_bool(key, value)?,
        "ecs" => cfg.ecs = parse_bool(key, value)?,
        "surface_tolerance" => cfg.surface_tolerance = parse(key, value)?,
        "correct_positions" => cfg.correct_positions = parse_bool(key, value)?,
        "end_time" => cfg.end_time = parse(key, value)?,
        "frame_interval" => cfg.frame_interval = parse(key, value)?,
        "seed" => cfg.seed = parse(key, value)?,
        "epsilon" => cfg.epsilon = parse(key, value)?,
        "velocity_scale" => cfg.velocity_scale = parse(key, value)?,
        _ => return Err(format!("unknown key `{key}`")),
    }
    Ok(())
}

/// Parses scene-file text; `origin` names the source in error messages.
pub fn parse_scene(text: &str, origin: &str) -> Result<SceneConfig> {
    let parse_error = |line: usize, message: String| Error::Parse {
        path: origin.to_string(),
        line,
        message,
    };
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_error(line, format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !SCENE_KEYS.contains(&key) {
            return Err(parse_error(line, format!("unknown key `{key}`")));
        }
        if !seen.insert(key.to_string()) {
            return Err(parse_error(line, format!("duplicate key `{key}`")));
        }
        entries.push((line, key, value));
    }

    let (scene_line, _, scene_name) = entries
        .iter()
        .find(|e| e.1 == "scene")
        .ok_or_else(|| parse_error(0, "missing required key `scene`".into()))?;
    let kind: SceneKind = scene_name
        .parse()
        .map_err(|e: Error| parse_error(*scene_line, e.to_string()))?;
    if !seen.contains("d0") {
        return Err(parse_error(0, "missing required key `d0`".into()));
    }
    let mut cfg = SceneConfig::preset(kind);
    for (line, key, value) in entries {
        if key != "scene" {
            set_key(&mut cfg, key, value).map_err(|m| parse_error(line, m))?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<SceneConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scene(&text, &path.display().to_string())
}

/// Applies a `key=value` override to a scene and revalidates it.
pub fn apply_override(cfg: &mut SceneConfig, assignment: &str) -> Result<()> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not `key=value`")))?;
    let (key, value) = (key.trim(), value.trim());
    if key == "scene" {
        return Err(Error::Config("the scene kind cannot be overridden".into()));
    }
    set_key(cfg, key, value).map_err(Error::Config)?;
    cfg.validate()
}

/// Renders every key of the scene in a form `parse_scene` accepts.
pub fn render_scene(cfg: &SceneConfig) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("scene", cfg.kind.to_string());
    put("dimension", cfg.dimension.to_string());
    put("d0", format!("{:?}", cfg.d0));
    put("kernel", cfg.kernel.to_string());
    put("h_ratio", format!("{:?}", cfg.h_ratio));
    put("delta_ratio", format!("{:?}", cfg.delta_ratio));
    put("table_resolution", cfg.table_resolution.to_string());
    put("tank_width", format!("{:?}", cfg.tank[0]));
    put("tank_height", format!("{:?}", cfg.tank[1]));
    put("tank_depth", format!("{:?}", cfg.tank[2]));
    put("fluid_width", format!("{:?}", cfg.fluid[0]));
    put("fluid_height", format!("{:?}", cfg.fluid[1]));
    put("fluid_depth", format!("{:?}", cfg.fluid[2]));
    put("rho0", format!("{:?}", cfg.rho0));
    put("gravity", format!("{:?}", cfg.gravity));
    put("cn", format!("{:?}", cfg.cn));
    put("ct", format!("{:?}", cfg.ct));
    put("kappa", format!("{:?}", cfg.kappa));
    put("lambda", format!("{:?}", cfg.lambda));
    put("shift_iterations", cfg.shift_iterations.to_string());
    put("cfl", format!("{:?}", cfg.cfl));
    put("xsph_eps", format!("{:?}", cfg.xsph_eps));
    put("dt_max", format!("{:?}", cfg.dt_max));
    put("eta0_coeff", format!("{:?}", cfg.eta0_coeff));
    put("max_cg_iterations", cfg.max_cg_iterations.to_string());
    put("warm_start", cfg.warm_start.to_string());
    put("ordered_reductions", cfg.ordered_reductions.to_string());
    put("ecs", cfg.ecs.to_string());
    put("surface_tolerance", format!("{:?}", cfg.surface_tolerance));
    put("correct_positions", cfg.correct_positions.to_string());
    put("end_time", format!("{:?}", cfg.end_time));
    put("frame_interval", format!("{:?}", cfg.frame_interval));
    put("seed", cfg.seed.to_string());
    put("epsilon", format!("{:?}", cfg.epsilon));
    put("velocity_scale", format!("{:?}", cfg.velocity_scale));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dambreak_table_values_accepted() {
        let text = "# 2D dambreak\nscene = dambreak\nd0 = 0.02\ncn = 0.2\nct = 0.0\nkappa = 0.1\n";
        let cfg = parse_scene(text, "inline").unwrap();
        assert_eq!(cfg.kind, SceneKind::Dambreak);
        assert_eq!((cfg.cn, cfg.ct, cfg.kappa), (0.2, 0.0, 0.1));
        let echoed = render_scene(&cfg);
        assert!(echoed.contains("cn = 0.2\n") && echoed.contains("kappa = 0.1\n"));
        assert_eq!(parse_scene(&echoed, "echo").unwrap(), cfg);
    }

    #[test]
    fn rejections() {
        let err = parse_scene("scene = dambreak\nd0 = 0.02\nkappa = -0.1\n", "f").unwrap_err();
        assert!(err.to_string().contains("kappa"), "{err}");
        let err = parse_scene("scene = dambreak\nkappa = 0.1\n", "f").unwrap_err();
        assert!(err.to_string().contains("d0"), "{err}");
        let err = parse_scene("scene = dambreak\nd0 = 0.02\nfoo = 1\n", "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_scene("scene = dambreak\nd0 = 0.02\ncn 0.5\n", "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_scene("scene = dambreak\nd0 = 0.02\nd0 = 0.01\n", "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_scene("scene = dambreak\nd0 = x\n", "f").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(parse_scene("scene = volcano\nd0 = 1\n", "f").is_err());
        assert!(parse_scene("scene = dambreak\nd0 = 0.02\nkappa = 1.5\n", "f").is_err());
    }

    #[test]
    fn overrides() {
        let mut cfg = SceneConfig::preset(SceneKind::Dambreak);
        apply_override(&mut cfg, "ct=1").unwrap();
        assert_eq!(cfg.ct, 1.0);
        assert!(apply_override(&mut cfg, "ct=2").is_err());
        assert!(apply_override(&mut cfg, "nonsense").is_err());
        assert!(apply_override(&mut cfg, "scene=hydrostatic").is_err());
    }

    #[test]
    fn every_key_is_rendered() {
        let text = render_scene(&SceneConfig::preset(SceneKind::Hydrostatic));
        let keys: Vec<&str> = text.lines().map(|l| l.split(" = ").next().unwrap()).collect();
        assert_eq!(keys, SCENE_KEYS);
    }
}
