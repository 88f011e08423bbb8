//! Whitespace-separated particle snapshots.
//!
//! Layout:
//! ```text
//! # vsph snapshot
//! # time <t>
//! # n <N>
//! # dimension <D>
//! # d0 <d0>
//! # h <h>
//! # alpha0 <..> a0 <..> c0 <..> delta0c <..> beta0 <..>
//! # id x y [z] vx vy [vz] p class c
//! <one row per particle>
//! ```
//! Reals are written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use crate::calibration::ReferenceConstants;
use crate::classification::ParticleClass;
use crate::error::{Error, Result};
use crate::scalar::{Real, Vector};
use crate::solver::Simulation;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot<T, const D: usize> {
    pub time: T,
    pub d0: T,
    pub h: T,
    pub constants: ReferenceConstants<T>,
    pub positions: Vec<Vector<T, D>>,
    pub velocities: Vec<Vector<T, D>>,
    pub pressures: Vec<T>,
    pub classes: Vec<ParticleClass>,
    pub concentration: Vec<T>,
}

fn real<T: Real>(x: T) -> String {
    format!("{x:.16e}")
}

const AXES: [&str; 3] = ["x", "y", "z"];

impl<T: Real, const D: usize> Snapshot<T, D> {
    pub fn from_simulation(sim: &Simulation<T, D>) -> Self {
        let p = &sim.particles;
        Snapshot {
            time: sim.time,
            d0: sim.d0(),
            h: sim.kernel.h(),
            constants: sim.constants,
            positions: p.positions.clone(),
            velocities: p.velocities.clone(),
            pressures: p.pressures.clone(),
            classes: p.classes.clone(),
            concentration: p.concentration.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn render(&self) -> String {
        let c = &self.constants;
        let mut out = String::new();
        out.push_str("# vsph snapshot\n");
        let _ = writeln!(out, "# time {}", real(self.time));
        let _ = writeln!(out, "# n {}", self.len());
        let _ = writeln!(out, "# dimension {D}");
        let _ = writeln!(out, "# d0 {}", real(self.d0));
        let _ = writeln!(out, "# h {}", real(self.h));
        let _ = writeln!(
            out,
            "# alpha0 {} a0 {} c0 {} delta0c {} beta0 {}",
            real(c.alpha0),
            real(c.a0),
            real(c.c0),
            real(c.delta0c),
            real(c.beta0)
        );
        let mut columns = vec!["id".to_string()];
        columns.extend(AXES[..D].iter().map(|a| a.to_string()));
        columns.extend(AXES[..D].iter().map(|a| format!("v{a}")));
        columns.extend(["p", "class", "c"].map(String::from));
        let _ = writeln!(out, "# {}", columns.join(" "));
        for i in 0..self.len() {
            let mut row = vec![i.to_string()];
            row.extend(self.positions[i].0.iter().map(|x| real(*x)));
            row.extend(self.velocities[i].0.iter().map(|x| real(*x)));
            row.push(real(self.pressures[i]));
            row.push(self.classes[i].to_string());
            row.push(real(self.concentration[i]));
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            path: origin.to_string(),
            line,
            message,
        };
        let num = |line: usize, s: &str| -> Result<T> {
            s.parse::<T>().map_err(|_| err(line, format!("invalid number `{s}`")))
        };
        let mut header = std::collections::HashMap::new();
        let mut snap = Snapshot {
            time: T::zero(),
            d0: T::zero(),
            h: T::zero(),
            constants: ReferenceConstants {
                alpha0: T::zero(),
                a0: T::zero(),
                c0: T::zero(),
                delta0c: T::zero(),
                grad0c: T::zero(),
                beta0: T::zero(),
                lambda0: T::one(),
                kappa0: T::one(),
            },
            positions: Vec::new(),
            velocities: Vec::new(),
            pressures: Vec::new(),
            classes: Vec::new(),
            concentration: Vec::new(),
        };
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            if let Some(rest) = raw.strip_prefix('#') {
                let tokens: Vec<&str> = rest.split_whitespace().collect();
                for pair in tokens.chunks(2) {
                    if let [k, v] = pair {
                        header.insert(k.to_string(), (line, v.to_string()));
                    }
                }
                continue;
            }
            let fields: Vec<&str> = raw.split_whitespace().collect();
            if fields.is_empty() {
                continue;
            }
            if fields.len() != 2 * D + 4 {
                return Err(err(line, format!("expected {} columns, got {}", 2 * D + 4, fields.len())));
            }
            let mut pos = Vector::zeros();
            let mut vel = Vector::zeros();
            for k in 0..D {
                pos[k] = num(line, fields[1 + k])?;
                vel[k] = num(line, fields[1 + D + k])?;
            }
            snap.positions.push(pos);
            snap.velocities.push(vel);
            snap.pressures.push(num(line, fields[1 + 2 * D])?);
            snap.classes.push(fields[2 + 2 * D].parse().map_err(|e: Error| err(line, e.to_string()))?);
            snap.concentration.push(num(line, fields[3 + 2 * D])?);
        }
        let get = |key: &str| -> Result<T> {
            let (line, v) = header
                .get(key)
                .ok_or_else(|| err(0, format!("missing header field `{key}`")))?;
            num(*line, v)
        };
        snap.time = get("time")?;
        snap.d0 = get("d0")?;
        snap.h = get("h")?;
        snap.constants.alpha0 = get("alpha0")?;
        snap.constants.a0 = get("a0")?;
        snap.constants.c0 = get("c0")?;
        snap.constants.delta0c = get("delta0c")?;
        snap.constants.beta0 = get("beta0")?;
        let n: usize = header
            .get("n")
            .and_then(|(_, v)| v.parse().ok())
            .ok_or_else(|| err(0, "missing header field `n`".into()))?;
        if n != snap.len() {
            return Err(err(0, format!("header declares {n} particles, found {}", snap.len())));
        }
        Ok(snap)
    }
}

pub fn write_snapshot<T: Real, const D: usize>(sim: &Simulation<T, D>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, Snapshot::from_simulation(sim).render()).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot<T: Real, const D: usize>(path: impl AsRef<Path>) -> Result<Snapshot<T, D>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Snapshot::parse(&text, &path.display().to_string())
}
