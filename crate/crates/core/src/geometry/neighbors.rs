//! Uniform-grid neighbor search.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::scalar::{Real, Vector};

/// Compressed adjacency lists, one row per query point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Adjacency {
    offsets: Vec<usize>,
    indices: Vec<usize>,
}

impl Adjacency {
    fn from_rows(rows: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let total = rows.iter().map(Vec::len).sum();
        let mut indices = Vec::with_capacity(total);
        for row in rows {
            indices.extend(row);
            offsets.push(indices.len());
        }
        Adjacency { offsets, indices }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[usize] {
        &self.indices[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Flat index range of row `i`, for data stored parallel to the indices.
    #[inline]
    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn rows(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }
}

/// For every fluid particle: fluid neighbors (excluding itself) and ghost
/// solid neighbors, all strictly within `h`, sorted by index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NeighborTable {
    pub fluid: Adjacency,
    pub solid: Adjacency,
}

impl NeighborTable {
    #[inline]
    pub fn fluid(&self, i: usize) -> &[usize] {
        self.fluid.row(i)
    }

    #[inline]
    pub fn solid(&self, i: usize) -> &[usize] {
        self.solid.row(i)
    }

    pub fn len(&self) -> usize {
        self.fluid.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Points bucketed into cubic cells of edge `cell`.
pub struct CellGrid<const D: usize> {
    cells: HashMap<[i64; D], (usize, usize)>,
    order: Vec<usize>,
}

#[inline]
fn cell_of<T: Real, const D: usize>(x: &Vector<T, D>, cell: T) -> [i64; D] {
    let mut key = [0i64; D];
    for k in 0..D {
        key[k] = (x[k] / cell).floor().to_i64().unwrap_or(i64::MAX);
    }
    key
}

impl<const D: usize> CellGrid<D> {
    pub fn build<T: Real>(points: &[Vector<T, D>], cell: T) -> Self {
        let mut keyed: Vec<([i64; D], usize)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (cell_of(p, cell), i))
            .collect();
        keyed.sort_unstable();
        let mut cells = HashMap::new();
        let mut start = 0;
        while start < keyed.len() {
            let key = keyed[start].0;
            let mut end = start + 1;
            while end < keyed.len() && keyed[end].0 == key {
                end += 1;
            }
            cells.insert(key, (start, end));
            start = end;
        }
        CellGrid {
            cells,
            order: keyed.into_iter().map(|(_, i)| i).collect(),
        }
    }

    /// Calls `f` with every indexed point in the 3^D block of cells around `x`.
    pub fn for_each_candidate<T: Real>(&self, x: &Vector<T, D>, cell: T, mut f: impl FnMut(usize)) {
        let centre = cell_of(x, cell);
        let mut offset = [-1i64; D];
        loop {
            let mut key = centre;
            for k in 0..D {
                key[k] = key[k].saturating_add(offset[k]);
            }
            if let Some(&(s, e)) = self.cells.get(&key) {
                for &j in &self.order[s..e] {
                    f(j);
                }
            }
            let mut axis = 0;
            loop {
                if axis == D {
                    return;
                }
                offset[axis] += 1;
                if offset[axis] <= 1 {
                    break;
                }
                offset[axis] = -1;
                axis += 1;
            }
        }
    }
}

/// Builds the neighbor table with a background grid of cell size `h` and the
/// exact test `r < h`.
pub fn build_neighbors<T: Real, const D: usize>(
    positions: &[Vector<T, D>],
    ghosts: &[Vector<T, D>],
    h: T,
) -> NeighborTable {
    let h2 = h * h;
    let fluid_grid = CellGrid::build(positions, h);
    let ghost_grid = CellGrid::build(ghosts, h);
    let (fluid_rows, solid_rows): (Vec<Vec<usize>>, Vec<Vec<usize>>) = positions
        .par_iter()
        .enumerate()
        .map(|(i, xi)| {
            let mut fl = Vec::new();
            fluid_grid.for_each_candidate(xi, h, |j| {
                if j != i && (positions[j] - *xi).norm_squared() < h2 {
                    fl.push(j);
                }
            });
            fl.sort_unstable();
            let mut so = Vec::new();
            ghost_grid.for_each_candidate(xi, h, |j| {
                if (ghosts[j] - *xi).norm_squared() < h2 {
                    so.push(j);
                }
            });
            so.sort_unstable();
            (fl, so)
        })
        .unzip();
    NeighborTable {
        fluid: Adjacency::from_rows(fluid_rows),
        solid: Adjacency::from_rows(solid_rows),
    }
}

/// Mean over particles of the distance to the nearest other fluid particle
/// (d̄). Particles with no neighbor inside `h` contribute `h`.
pub fn mean_min_distance<T: Real, const D: usize>(
    positions: &[Vector<T, D>],
    table: &NeighborTable,
    h: T,
) -> T {
    if positions.is_empty() {
        return T::zero();
    }
    let total: T = (0..positions.len())
        .map(|i| {
            table
                .fluid(i)
                .iter()
                .map(|&j| (positions[j] - positions[i]).norm())
                .fold(h, T::min)
        })
        .sum();
    total / T::from_usize_lossy(positions.len())
}
