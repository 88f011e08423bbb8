//! Analytic signed distance fields. Distance is positive on the fluid side
//! and negative inside solids; the gradient points toward the fluid.

use crate::scalar::{Real, Vector};

#[derive(Clone, Debug, PartialEq)]
pub enum Primitive<T, const D: usize> {
    /// Solid below the plane through `origin`; fluid on the `normal` side.
    HalfSpace {
        origin: Vector<T, D>,
        normal: Vector<T, D>,
    },
    /// Fluid confined to the box; everything outside it is solid.
    Container {
        min: Vector<T, D>,
        max: Vector<T, D>,
    },
    SolidBox {
        min: Vector<T, D>,
        max: Vector<T, D>,
    },
    SolidSphere { center: Vector<T, D>, radius: T },
}

/// Distance and outward (toward solid surface exterior) gradient of a solid
/// axis-aligned box.
fn solid_box<T: Real, const D: usize>(
    x: &Vector<T, D>,
    min: &Vector<T, D>,
    max: &Vector<T, D>,
) -> (T, Vector<T, D>) {
    let half = T::lit(0.5);
    let p = Vector::<T, D>::from_fn(|k| x[k] - (min[k] + max[k]) * half);
    let q = Vector::<T, D>::from_fn(|k| p[k].abs() - (max[k] - min[k]) * half);
    let outside = q.map(|v| v.max(T::zero()));
    let out_norm = outside.norm();
    if out_norm > T::zero() {
        let grad = Vector::from_fn(|k| p[k].signum() * outside[k] / out_norm);
        (out_norm, grad)
    } else {
        let mut axis = 0;
        for k in 1..D {
            if q[k] > q[axis] {
                axis = k;
            }
        }
        let sign = if p[axis] >= T::zero() { T::one() } else { -T::one() };
        (q[axis], Vector::axis(axis) * sign)
    }
}

impl<T: Real, const D: usize> Primitive<T, D> {
    pub fn evaluate(&self, x: &Vector<T, D>) -> (T, Vector<T, D>) {
        match self {
            Primitive::HalfSpace { origin, normal } => ((*x - *origin).dot(normal), *normal),
            Primitive::Container { min, max } => {
                let (d, g) = solid_box(x, min, max);
                (-d, -g)
            }
            Primitive::SolidBox { min, max } => solid_box(x, min, max),
            Primitive::SolidSphere { center, radius } => {
                let v = *x - *center;
                let r = v.norm();
                let grad = if r > T::zero() { v / r } else { Vector::axis(0) };
                (r - *radius, grad)
            }
        }
    }
}

/// Union of solid primitives over a bounded scene domain.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedDistanceField<T, const D: usize> {
    primitives: Vec<Primitive<T, D>>,
    domain_min: Vector<T, D>,
    domain_max: Vector<T, D>,
}

impl<T: Real, const D: usize> SignedDistanceField<T, D> {
    pub fn new(
        primitives: Vec<Primitive<T, D>>,
        domain_min: Vector<T, D>,
        domain_max: Vector<T, D>,
    ) -> Self {
        let primitives = primitives
            .into_iter()
            .map(|p| match p {
                Primitive::HalfSpace { origin, normal } => Primitive::HalfSpace {
                    origin,
                    normal: normal / normal.norm(),
                },
                other => other,
            })
            .collect();
        SignedDistanceField {
            primitives,
            domain_min,
            domain_max,
        }
    }

    pub fn has_solids(&self) -> bool {
        !self.primitives.is_empty()
    }

    pub fn primitives(&self) -> &[Primitive<T, D>] {
        &self.primitives
    }

    pub fn domain(&self) -> (Vector<T, D>, Vector<T, D>) {
        (self.domain_min, self.domain_max)
    }

    /// Signed distance and unit gradient at `x`. Without solids the distance
    /// is +∞.
    pub fn query(&self, x: &Vector<T, D>) -> (T, Vector<T, D>) {
        let mut best = (T::infinity(), Vector::axis(0));
        for p in &self.primitives {
            let (d, g) = p.evaluate(x);
            if d < best.0 {
                best = (d, g);
            }
        }
        best
    }

    #[inline]
    pub fn distance(&self, x: &Vector<T, D>) -> T {
        self.query(x).0
    }

    /// Moves `x` out of the solid along the gradient so that its distance is
    /// at least `margin`. Points already outside are returned unchanged.
    pub fn push_out(&self, x: Vector<T, D>, margin: T) -> Vector<T, D> {
        let mut p = x;
        for _ in 0..4 {
            let (d, g) = self.query(&p);
            if d >= margin {
                break;
            }
            p += g * (margin - d);
        }
        p
    }
}
