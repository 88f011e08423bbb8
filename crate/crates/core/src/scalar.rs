//! Scalar abstraction and a small fixed-dimension vector type.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar the solver is generic over (`f32` or `f64`).
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + Default
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Sum
    + AddAssign
    + SubAssign
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Infallible for the supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite conversion to f64")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A `D`-dimensional vector with components of type `T`.
#[derive(Clone, Copy, PartialEq)]
pub struct Vector<T, const D: usize>(pub [T; D]);

impl<T: Real, const D: usize> Vector<T, D> {
    #[inline]
    pub fn zeros() -> Self {
        Vector([T::zero(); D])
    }

    #[inline]
    pub fn from_fn(mut f: impl FnMut(usize) -> T) -> Self {
        let mut out = [T::zero(); D];
        for (k, c) in out.iter_mut().enumerate() {
            *c = f(k);
        }
        Vector(out)
    }

    /// Unit vector along `axis`.
    #[inline]
    pub fn axis(axis: usize) -> Self {
        Self::from_fn(|k| if k == axis { T::one() } else { T::zero() })
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        let mut acc = T::zero();
        for k in 0..D {
            acc += self.0[k] * other.0[k];
        }
        acc
    }

    #[inline]
    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// Projection of `self` onto the (unit) direction `n`.
    #[inline]
    pub fn project_onto(&self, n: &Self) -> Self {
        *n * self.dot(n)
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    #[inline]
    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::from_fn(|k| f(self.0[k]))
    }

    /// Converts to another scalar type through `f64`.
    pub fn cast<U: Real>(&self) -> Vector<U, D> {
        Vector::from_fn(|k| U::lit(self.0[k].as_f64()))
    }
}

impl<T: Real, const D: usize> Default for Vector<T, D> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Debug, const D: usize> Debug for Vector<T, D> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl<T, const D: usize> Index<usize> for Vector<T, D> {
    type Output = T;
    #[inline]
    fn index(&self, k: usize) -> &T {
        &self.0[k]
    }
}

impl<T, const D: usize> IndexMut<usize> for Vector<T, D> {
    #[inline]
    fn index_mut(&mut self, k: usize) -> &mut T {
        &mut self.0[k]
    }
}

impl<T: Real, const D: usize> Add for Vector<T, D> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|k| self.0[k] + rhs.0[k])
    }
}

impl<T: Real, const D: usize> Sub for Vector<T, D> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|k| self.0[k] - rhs.0[k])
    }
}

impl<T: Real, const D: usize> Mul<T> for Vector<T, D> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::from_fn(|k| self.0[k] * s)
    }
}

impl<T: Real, const D: usize> Div<T> for Vector<T, D> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::from_fn(|k| self.0[k] / s)
    }
}

impl<T: Real, const D: usize> Neg for Vector<T, D> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::from_fn(|k| -self.0[k])
    }
}

impl<T: Real, const D: usize> AddAssign for Vector<T, D> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        for k in 0..D {
            self.0[k] += rhs.0[k];
        }
    }
}

impl<T: Real, const D: usize> SubAssign for Vector<T, D> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        for k in 0..D {
            self.0[k] -= rhs.0[k];
        }
    }
}

impl<T: Real, const D: usize> Sum for Vector<T, D> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zeros(), |a, b| a + b)
    }
}

impl<T, const D: usize> From<[T; D]> for Vector<T, D> {
    fn from(a: [T; D]) -> Self {
        Vector(a)
    }
}
