use crate::geometry::sdf::SignedDistanceField;
use crate::scalar::{Real, Vector};

/// Static boundary samples inside the solid, within `h` of the wall.
#[derive(Clone, Debug, Default)]
pub struct GhostSolidSet<T, const D: usize> {
    pub positions: Vec<Vector<T, D>>,
    pub velocities: Vec<Vector<T, D>>,
    /// Unit normals pointing toward the fluid.
    pub normals: Vec<Vector<T, D>>,
}

impl<T: Real, const D: usize> GhostSolidSet<T, D> {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Assigns the same rigid translation velocity to every sample.
    pub fn set_velocity(&mut self, v: Vector<T, D>) {
        self.velocities.iter_mut().for_each(|w| *w = v);
    }
}

/// Calls `f` for every cell-centred lattice point `(k + ½)·d0` inside the box.
pub(crate) fn for_each_lattice_point<T: Real, const D: usize>(
    min: &Vector<T, D>,
    max: &Vector<T, D>,
    d0: T,
    mut f: impl FnMut(Vector<T, D>),
) {
    let half = T::lit(0.5);
    let mut lo = [0i64; D];
    let mut hi = [0i64; D];
    for k in 0..D {
        lo[k] = (min[k] / d0 - half).floor().to_i64().unwrap_or(0);
        hi[k] = (max[k] / d0 - half).ceil().to_i64().unwrap_or(0);
    }
    let mut idx = lo;
    loop {
        let p = Vector::from_fn(|k| (T::lit(idx[k] as f64) + half) * d0);
        if (0..D).all(|k| p[k] >= min[k] && p[k] <= max[k]) {
            f(p);
        }
        let mut axis = 0;
        loop {
            if axis == D {
                return;
            }
            idx[axis] += 1;
            if idx[axis] <= hi[axis] {
                break;
            }
            idx[axis] = lo[axis];
            axis += 1;
        }
    }
}

/// Seeds ghost solids on the cell-centred lattice of spacing `d0`, keeping
/// points with `-h <= distance < 0`.
pub fn seed_ghost_solids<T: Real, const D: usize>(
    sdf: &SignedDistanceField<T, D>,
    d0: T,
    h: T,
) -> GhostSolidSet<T, D> {
    let mut set = GhostSolidSet {
        positions: Vec::new(),
        velocities: Vec::new(),
        normals: Vec::new(),
    };
    if !sdf.has_solids() {
        return set;
    }
    let (dmin, dmax) = sdf.domain();
    let pad = h + d0;
    let lo = Vector::from_fn(|k| dmin[k] - pad);
    let hi = Vector::from_fn(|k| dmax[k] + pad);
    for_each_lattice_point(&lo, &hi, d0, |p| {
        let (dist, grad) = sdf.query(&p);
        if dist < T::zero() && dist >= -h {
            set.positions.push(p);
            set.velocities.push(Vector::zeros());
            set.normals.push(grad);
        }
    });
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sdf::Primitive;
    use approx::assert_relative_eq;

    #[test]
    fn half_space_layers() {
        let sdf = SignedDistanceField::new(
            vec![Primitive::HalfSpace {
                origin: Vector([0.0, 0.0]),
                normal: Vector([0.0, 1.0]),
            }],
            Vector([0.0, 0.0]),
            Vector([4.0, 4.0]),
        );
        let ghosts = seed_ghost_solids(&sdf, 1.0, 2.5);
        let mut layers: Vec<f64> = ghosts.positions.iter().map(|p| p[1]).collect();
        layers.sort_by(|a, b| a.partial_cmp(b).unwrap());
        layers.dedup();
        assert_eq!(layers, vec![-2.5, -1.5, -0.5]);
        assert!(ghosts.normals.iter().all(|n| n.0 == [0.0, 1.0]));
        assert!(ghosts.velocities.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn no_solids_no_ghosts() {
        let sdf = SignedDistanceField::<f64, 2>::new(vec![], Vector([0.0, 0.0]), Vector([1.0, 1.0]));
        assert!(seed_ghost_solids(&sdf, 0.1, 0.25).is_empty());
    }

    #[test]
    fn container_normals_point_inward() {
        let sdf = SignedDistanceField::new(
            vec![Primitive::Container {
                min: Vector([0.0, 0.0]),
                max: Vector([1.0, 1.0]),
            }],
            Vector([0.0, 0.0]),
            Vector([1.0, 1.0]),
        );
        let ghosts = seed_ghost_solids(&sdf, 0.1, 0.25);
        assert!(!ghosts.is_empty());
        let centre = Vector([0.5, 0.5]);
        for (p, n) in ghosts.positions.iter().zip(&ghosts.normals) {
            assert_relative_eq!(n.norm(), 1.0, epsilon = 1e-12);
            assert!((centre - *p).dot(n) > 0.0);
            let d = sdf.distance(p);
            assert!((-0.25..0.0).contains(&d));
        }
        let again = seed_ghost_solids(&sdf, 0.1, 0.25);
        assert_eq!(ghosts.positions, again.positions);
    }
}
