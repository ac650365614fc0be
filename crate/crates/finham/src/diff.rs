//! Second-order finite differences on uniform grids.
//!
//! Interior nodes use central stencils. Edge nodes are filled with one-sided
//! second-order stencils so the output is defined everywhere, but accuracy
//! claims hold on the interior only; norms exclude a margin per side.

use crate::error::{Error, Result};
use crate::grid::{Axis, Field, Grid, Grid1D, Grid2D};
use crate::real::Real;
use crate::smooth::{Smooth1, Smooth2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivOrder {
    First,
    Second,
}

/// Closure rule for the stencil at the grid edges.
///
/// `Periodic` identifies node -1 with node n-1 (the matrix convention used
/// by adjointness checks). `OneSided` keeps the operators usable for pricing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryScheme {
    OneSided,
    Periodic,
}

/// Central-difference derivative along `axis` with one-sided edges.
pub fn apply_derivative<T: Real>(field: &Field<T>, axis: Axis, order: DerivOrder) -> Result<Field<T>> {
    apply_derivative_with(field, axis, order, BoundaryScheme::OneSided)
}

pub fn apply_derivative_with<T: Real>(
    field: &Field<T>,
    axis: Axis,
    order: DerivOrder,
    scheme: BoundaryScheme,
) -> Result<Field<T>> {
    let h = field.grid().spacing(axis)?;
    let (n_lanes, lane_len, lane_start, stride) = lanes(field.grid(), axis)?;
    let mut out = field.clone();
    let mut buf = vec![T::zero(); lane_len];
    let mut der = vec![T::zero(); lane_len];
    for l in 0..n_lanes {
        let start = lane_start(l);
        for (k, slot) in buf.iter_mut().enumerate() {
            *slot = field.values()[start + k * stride];
        }
        derivative_lane(&buf, h, order, scheme, &mut der);
        for (k, &v) in der.iter().enumerate() {
            out.values_mut()[start + k * stride] = v;
        }
    }
    Ok(out)
}

type LaneStart = Box<dyn Fn(usize) -> usize>;

fn lanes<T: Real>(grid: &Grid<T>, axis: Axis) -> Result<(usize, usize, LaneStart, usize)> {
    match (grid, axis) {
        (Grid::One(g), Axis::X) => Ok((1, g.n(), Box::new(|_| 0), 1)),
        (Grid::One(_), Axis::Y) => Err(Error::MissingAxis { axis, dims: 1 }),
        (Grid::Two(g), Axis::X) => {
            let nx = g.nx();
            Ok((g.ny(), nx, Box::new(move |j| j * nx), 1))
        }
        (Grid::Two(g), Axis::Y) => {
            let nx = g.nx();
            Ok((nx, g.ny(), Box::new(move |i| i), nx))
        }
    }
}

fn derivative_lane<T: Real>(v: &[T], h: T, order: DerivOrder, scheme: BoundaryScheme, out: &mut [T]) {
    let n = v.len();
    let two = T::of(2.0);
    match order {
        DerivOrder::First => {
            let inv2h = T::one() / (two * h);
            for i in 1..n - 1 {
                out[i] = (v[i + 1] - v[i - 1]) * inv2h;
            }
            match scheme {
                BoundaryScheme::Periodic => {
                    out[0] = (v[1] - v[n - 1]) * inv2h;
                    out[n - 1] = (v[0] - v[n - 2]) * inv2h;
                }
                BoundaryScheme::OneSided => {
                    out[0] = (-(T::of(3.0)) * v[0] + T::of(4.0) * v[1] - v[2]) * inv2h;
                    out[n - 1] =
                        (T::of(3.0) * v[n - 1] - T::of(4.0) * v[n - 2] + v[n - 3]) * inv2h;
                }
            }
        }
        DerivOrder::Second => {
            let invh2 = T::one() / (h * h);
            for i in 1..n - 1 {
                out[i] = (v[i + 1] - two * v[i] + v[i - 1]) * invh2;
            }
            match scheme {
                BoundaryScheme::Periodic => {
                    out[0] = (v[1] - two * v[0] + v[n - 1]) * invh2;
                    out[n - 1] = (v[0] - two * v[n - 1] + v[n - 2]) * invh2;
                }
                BoundaryScheme::OneSided => {
                    out[0] = (two * v[0] - T::of(5.0) * v[1] + T::of(4.0) * v[2] - v[3]) * invh2;
                    out[n - 1] = (two * v[n - 1] - T::of(5.0) * v[n - 2] + T::of(4.0) * v[n - 3]
                        - v[n - 4])
                        * invh2;
                }
            }
        }
    }
}

/// A 1-d field together with its first two x-derivatives.
pub struct Jet1<T> {
    pub value: Field<T>,
    pub dx: Field<T>,
    pub dxx: Field<T>,
}

impl<T: Real> Jet1<T> {
    /// Differentiates samples with central stencils.
    pub fn central(field: &Field<T>) -> Result<Self> {
        field.grid1()?;
        Ok(Jet1 {
            dx: apply_derivative(field, Axis::X, DerivOrder::First)?,
            dxx: apply_derivative(field, Axis::X, DerivOrder::Second)?,
            value: field.clone(),
        })
    }

    /// Samples exact derivatives from an analytic bundle.
    pub fn sample(grid: &Grid1D<T>, s: &Smooth1<T>) -> Self {
        Jet1 {
            value: Field::sample_1d(grid, |x| s.eval(x)),
            dx: Field::sample_1d(grid, |x| s.deriv1(x)),
            dxx: Field::sample_1d(grid, |x| s.deriv2(x)),
        }
    }
}

/// A 2-d field with the partials every operator in this crate consumes.
pub struct Jet2<T> {
    pub value: Field<T>,
    pub dx: Field<T>,
    pub dy: Field<T>,
    pub dxx: Field<T>,
    pub dyy: Field<T>,
    pub dxy: Field<T>,
}

impl<T: Real> Jet2<T> {
    /// Differentiates samples with central stencils; the mixed partial is the
    /// y-derivative of the x-derivative.
    pub fn central(field: &Field<T>) -> Result<Self> {
        field.grid2()?;
        let dx = apply_derivative(field, Axis::X, DerivOrder::First)?;
        Ok(Jet2 {
            dy: apply_derivative(field, Axis::Y, DerivOrder::First)?,
            dxx: apply_derivative(field, Axis::X, DerivOrder::Second)?,
            dyy: apply_derivative(field, Axis::Y, DerivOrder::Second)?,
            dxy: apply_derivative(&dx, Axis::Y, DerivOrder::First)?,
            dx,
            value: field.clone(),
        })
    }

    pub fn sample(grid: &Grid2D<T>, s: &Smooth2<T>) -> Self {
        Jet2 {
            value: Field::sample_2d(grid, |x, y| s.eval(x, y)),
            dx: Field::sample_2d(grid, |x, y| s.dx(x, y)),
            dy: Field::sample_2d(grid, |x, y| s.dy(x, y)),
            dxx: Field::sample_2d(grid, |x, y| s.dxx(x, y)),
            dyy: Field::sample_2d(grid, |x, y| s.dyy(x, y)),
            dxy: Field::sample_2d(grid, |x, y| s.dxy(x, y)),
        }
    }
}

/// Minimal dense square matrix, only used by the adjointness check and its
/// test oracles.
#[derive(Debug, Clone)]
pub struct DenseMatrix<T> {
    n: usize,
    a: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            a: vec![T::zero(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.a[i * self.n + j] = v;
    }
}

/// First-derivative matrix D on the given grid.
pub fn momentum_matrix<T: Real>(grid: &Grid1D<T>, scheme: BoundaryScheme) -> Result<DenseMatrix<T>> {
    let n = grid.n();
    if n > 4096 {
        return Err(Error::invalid(
            "n",
            format!("dense momentum matrix capped at 4096 nodes, got {n}"),
        ));
    }
    let inv2h = T::one() / (T::of(2.0) * grid.h());
    let mut d = DenseMatrix::zeros(n);
    for i in 1..n - 1 {
        d.set(i, i - 1, -inv2h);
        d.set(i, i + 1, inv2h);
    }
    match scheme {
        BoundaryScheme::Periodic => {
            d.set(0, n - 1, -inv2h);
            d.set(0, 1, inv2h);
            d.set(n - 1, n - 2, -inv2h);
            d.set(n - 1, 0, inv2h);
        }
        BoundaryScheme::OneSided => {
            d.set(0, 0, -(T::of(3.0)) * inv2h);
            d.set(0, 1, T::of(4.0) * inv2h);
            d.set(0, 2, -inv2h);
            d.set(n - 1, n - 1, T::of(3.0) * inv2h);
            d.set(n - 1, n - 2, -(T::of(4.0)) * inv2h);
            d.set(n - 1, n - 3, inv2h);
        }
    }
    Ok(d)
}

/// Max |(D + D^T)_{ij}| for the first-derivative matrix. Zero exactly under
/// the periodic closure; one-sided edges concentrate the defect in the two
/// boundary rows.
pub fn momentum_antihermiticity_check<T: Real>(
    grid: &Grid1D<T>,
    scheme: BoundaryScheme,
) -> Result<T> {
    let d = momentum_matrix(grid, scheme)?;
    let n = d.n();
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((d.get(i, j) + d.get(j, i)).abs());
        }
    }
    Ok(worst)
}
