//! Uniform grids and sampled fields.
//!
//! Both grid endpoints are nodes. Two-dimensional fields are stored row
//! major with x contiguous and y as the slow axis, so `values[j*nx + i]`
//! holds the node `(x_i, y_j)`.

use crate::error::{Error, Result};
use crate::real::Real;

/// Edge nodes are filled by one-sided stencils, so norms that claim interior
/// accuracy skip this many nodes per side unless told otherwise.
pub const DEFAULT_INTERIOR_MARGIN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// One-dimensional uniform grid with at least 8 nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D<T> {
    x_min: T,
    x_max: T,
    n: usize,
    h: T,
}

impl<T: Real> Grid1D<T> {
    pub fn new(x_min: T, x_max: T, n: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::invalid("grid bounds", "must be finite"));
        }
        if x_max <= x_min {
            return Err(Error::invalid(
                "grid bounds",
                format!("need x_max > x_min, got [{x_min}, {x_max}]"),
            ));
        }
        if n < 8 {
            return Err(Error::invalid("n", format!("need at least 8 nodes, got {n}")));
        }
        let h = (x_max - x_min) / T::of_usize(n - 1);
        Ok(Grid1D { x_min, x_max, n, h })
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Node spacing (x_max - x_min) / (n - 1).
    pub fn h(&self) -> T {
        self.h
    }

    pub fn node(&self, i: usize) -> T {
        debug_assert!(i < self.n);
        self.x_min + T::of_usize(i) * self.h
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n).map(move |i| self.node(i))
    }

    /// Index of the node closest to `x`.
    pub fn nearest_index(&self, x: T) -> usize {
        let t = ((x - self.x_min) / self.h).round();
        let i = t.to_usize().unwrap_or(0);
        i.min(self.n - 1)
    }
}

/// Tensor grid over x and y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D<T> {
    pub x: Grid1D<T>,
    pub y: Grid1D<T>,
}

impl<T: Real> Grid2D<T> {
    pub fn new(x: Grid1D<T>, y: Grid1D<T>) -> Self {
        Grid2D { x, y }
    }

    pub fn nx(&self) -> usize {
        self.x.n()
    }

    pub fn ny(&self) -> usize {
        self.y.n()
    }

    pub fn len(&self) -> usize {
        self.nx() * self.ny()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid<T> {
    One(Grid1D<T>),
    Two(Grid2D<T>),
}

impl<T: Real> Grid<T> {
    pub fn dims(&self) -> usize {
        match self {
            Grid::One(_) => 1,
            Grid::Two(_) => 2,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::One(g) => g.n(),
            Grid::Two(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_one(&self) -> Result<&Grid1D<T>> {
        match self {
            Grid::One(g) => Ok(g),
            Grid::Two(_) => Err(Error::GridMismatch("expected a 1-d grid".into())),
        }
    }

    pub fn as_two(&self) -> Result<&Grid2D<T>> {
        match self {
            Grid::Two(g) => Ok(g),
            Grid::One(_) => Err(Error::GridMismatch("expected a 2-d grid".into())),
        }
    }

    pub fn spacing(&self, axis: Axis) -> Result<T> {
        match (self, axis) {
            (Grid::One(g), Axis::X) => Ok(g.h()),
            (Grid::One(_), Axis::Y) => Err(Error::MissingAxis { axis, dims: 1 }),
            (Grid::Two(g), Axis::X) => Ok(g.x.h()),
            (Grid::Two(g), Axis::Y) => Ok(g.y.h()),
        }
    }
}

/// Scalar samples over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Real> Field<T> {
    pub fn from_values(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field { grid, values })
    }

    pub fn sample_1d(grid: &Grid1D<T>, f: impl Fn(T) -> T) -> Self {
        let values = grid.nodes().map(f).collect();
        Field {
            grid: Grid::One(*grid),
            values,
        }
    }

    pub fn sample_2d(grid: &Grid2D<T>, f: impl Fn(T, T) -> T) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny() {
            let y = grid.y.node(j);
            for i in 0..grid.nx() {
                values.push(f(grid.x.node(i), y));
            }
        }
        Field {
            grid: Grid::Two(*grid),
            values,
        }
    }

    pub fn constant(grid: Grid<T>, c: T) -> Self {
        let values = vec![c; grid.len()];
        Field { grid, values }
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn grid1(&self) -> Result<&Grid1D<T>> {
        self.grid.as_one()
    }

    pub fn grid2(&self) -> Result<&Grid2D<T>> {
        self.grid.as_two()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at node i of a 1-d field.
    pub fn at1(&self, i: usize) -> T {
        debug_assert!(matches!(self.grid, Grid::One(_)));
        self.values[i]
    }

    /// Value at node (x_i, y_j) of a 2-d field.
    pub fn at2(&self, i: usize, j: usize) -> T {
        let nx = match &self.grid {
            Grid::Two(g) => g.nx(),
            Grid::One(_) => panic!("at2 on a 1-d field"),
        };
        self.values[j * nx + i]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Field {
            grid: self.grid,
            values,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: T) -> Self {
        self.map(|v| c * v)
    }

    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    /// Indices of nodes at least `margin` nodes away from every edge.
    pub fn interior_indices(&self, margin: usize) -> Result<Vec<usize>> {
        match &self.grid {
            Grid::One(g) => {
                let n = g.n();
                if 2 * margin >= n {
                    return Err(Error::invalid(
                        "margin",
                        format!("margin {margin} empties a grid of {n} nodes"),
                    ));
                }
                Ok((margin..n - margin).collect())
            }
            Grid::Two(g) => {
                let (nx, ny) = (g.nx(), g.ny());
                if 2 * margin >= nx || 2 * margin >= ny {
                    return Err(Error::invalid(
                        "margin",
                        format!("margin {margin} empties a {nx}x{ny} grid"),
                    ));
                }
                let mut idx = Vec::with_capacity((nx - 2 * margin) * (ny - 2 * margin));
                for j in margin..ny - margin {
                    for i in margin..nx - margin {
                        idx.push(j * nx + i);
                    }
                }
                Ok(idx)
            }
        }
    }

    /// Sup norm over the interior, skipping `margin` nodes per side.
    pub fn interior_sup_norm(&self, margin: usize) -> Result<T> {
        let idx = self.interior_indices(margin)?;
        Ok(idx
            .into_iter()
            .fold(T::zero(), |acc, k| acc.max(self.values[k].abs())))
    }
}

/// Interior sup norm of (a - b), divided by the larger interior sup norm of
/// the two inputs. Falls back to the absolute difference when both vanish.
pub fn relative_sup_diff<T: Real>(a: &Field<T>, b: &Field<T>, margin: usize) -> Result<T> {
    let diff = a.sub(b)?.interior_sup_norm(margin)?;
    let scale = a.interior_sup_norm(margin)?.max(b.interior_sup_norm(margin)?);
    if scale == T::zero() {
        Ok(diff)
    } else {
        Ok(diff / scale)
    }
}
