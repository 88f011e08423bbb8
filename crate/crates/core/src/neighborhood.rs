//! Borrowed view of one step's geometry shared by the per-particle operators.

use crate::geometry::NeighborTable;
use crate::kernel::KernelSpec;
use crate::scalar::{Real, Vector};

/// Pair geometry: index, distance and unit direction from i to the neighbor.
/// Coincident points get a zero direction.
#[derive(Clone, Copy, Debug)]
pub struct Pair<T, const D: usize> {
    pub index: usize,
    /// Position of the pair in the flat adjacency storage.
    pub slot: usize,
    pub r: T,
    pub n: Vector<T, D>,
}

#[derive(Clone, Copy)]
pub struct Neighborhood<'a, T, const D: usize> {
    pub positions: &'a [Vector<T, D>],
    pub ghosts: &'a [Vector<T, D>],
    pub table: &'a NeighborTable,
    pub kernel: &'a KernelSpec<T>,
}

#[inline]
fn pair<T: Real, const D: usize>(index: usize, slot: usize, xi: Vector<T, D>, xj: Vector<T, D>) -> Pair<T, D> {
    let d = xj - xi;
    let r = d.norm();
    let n = if r > T::zero() { d / r } else { Vector::zeros() };
    Pair { index, slot, r, n }
}

impl<'a, T: Real, const D: usize> Neighborhood<'a, T, D> {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn fluid_pairs(&self, i: usize) -> impl Iterator<Item = Pair<T, D>> + '_ {
        let xi = self.positions[i];
        let range = self.table.fluid.range(i);
        self.table
            .fluid(i)
            .iter()
            .zip(range)
            .map(move |(&j, slot)| pair(j, slot, xi, self.positions[j]))
    }

    pub fn solid_pairs(&self, i: usize) -> impl Iterator<Item = Pair<T, D>> + '_ {
        let xi = self.positions[i];
        let range = self.table.solid.range(i);
        self.table
            .solid(i)
            .iter()
            .zip(range)
            .map(move |(&s, slot)| pair(s, slot, xi, self.ghosts[s]))
    }

    pub fn has_solid(&self, i: usize) -> bool {
        !self.table.solid(i).is_empty()
    }
}
