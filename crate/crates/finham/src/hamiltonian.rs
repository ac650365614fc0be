//! Generators of option-price evolution in log-price coordinates.
//!
//! Every generator here is written in the form
//! H f = cxx f_xx + cxy f_xy + cyy f_yy + cx f_x + cy f_y + c0 f
//! and all of them funnel through one combination routine, so two generators
//! with equal coefficients produce bitwise-identical output fields.

use crate::diff::{Jet1, Jet2};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid1D};
use crate::linalg::TriBand;
use crate::params::{vol_coeff_map, BsParams, GammaCoupling, MgParams, RhoSign};
use crate::real::Real;
use crate::smooth::{Smooth1, Smooth2};

/// Squared volatility as a function of the second coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaSq<T> {
    Constant(T),
    /// sigma^2 = e^y, the level instantaneously consistent with the
    /// stochastic-volatility generator.
    ExpY,
}

impl<T: Real> SigmaSq<T> {
    pub fn at(&self, y: T) -> T {
        match *self {
            SigmaSq::Constant(s) => s,
            SigmaSq::ExpY => y.exp(),
        }
    }
}

/// Coefficients of a second-order generator at one volatility level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorCoeffs<T> {
    pub cxx: T,
    pub cxy: T,
    pub cyy: T,
    pub cx: T,
    pub cy: T,
    pub c0: T,
}

impl<T: Real> OperatorCoeffs<T> {
    pub fn is_finite(&self) -> bool {
        self.cxx.is_finite()
            && self.cxy.is_finite()
            && self.cyy.is_finite()
            && self.cx.is_finite()
            && self.cy.is_finite()
            && self.c0.is_finite()
    }
}

pub trait Hamiltonian<T: Real> {
    fn apply(&self, f: &Field<T>) -> Result<Field<T>>;
}

/// One-dimensional log-price generator
/// H = -(sigma^2/2) d_xx + (sigma^2/2 - r) d_x + r.
#[derive(Debug, Clone, Copy)]
pub struct BsHamiltonian<T> {
    params: BsParams<T>,
}

impl<T: Real> BsHamiltonian<T> {
    pub fn new(params: BsParams<T>) -> Self {
        BsHamiltonian { params }
    }

    pub fn params(&self) -> BsParams<T> {
        self.params
    }

    fn coeffs(&self) -> (T, T, T) {
        let half_s = self.params.sigma_sq() * T::of(0.5);
        (-half_s, half_s - self.params.r, self.params.r)
    }

    pub fn apply_jet(&self, jet: &Jet1<T>) -> Field<T> {
        let (cxx, cx, c0) = self.coeffs();
        let mut out = jet.value.clone();
        for (i, slot) in out.values_mut().iter_mut().enumerate() {
            *slot = cxx * jet.dxx.values()[i] + cx * jet.dx.values()[i] + c0 * jet.value.values()[i];
        }
        out
    }

    /// Pointwise action on an analytic bundle; no discretisation error.
    pub fn apply_smooth(&self, s: &Smooth1<T>, x: T) -> T {
        let (cxx, cx, c0) = self.coeffs();
        cxx * s.deriv2(x) + cx * s.deriv1(x) + c0 * s.eval(x)
    }

    /// Matrix of H with one-sided edge rows narrowed to three points so the
    /// result stays almost tridiagonal. The edge second derivative drops to
    /// first order; pricing norms exclude the boundary anyway.
    pub fn tri_band(&self, grid: &Grid1D<T>) -> Result<TriBand<T>> {
        let c = self.coeffs();
        operator_band(grid, |_| c)
    }
}

/// Banded matrix of c2(i) d_xx + c1(i) d_x + c0(i) on a uniform grid, with
/// the edge rows narrowed to the nearest three points.
pub fn operator_band<T: Real>(
    grid: &Grid1D<T>,
    coeff_at: impl Fn(usize) -> (T, T, T),
) -> Result<TriBand<T>> {
    let n = grid.n();
    let h = grid.h();
    let invh2 = T::one() / (h * h);
    let inv2h = T::one() / (T::of(2.0) * h);
    let two = T::of(2.0);
    let mut m = TriBand::zeros(n)?;
    for i in 1..n - 1 {
        let (cxx, cx, c0) = coeff_at(i);
        m.lower[i] = cxx * invh2 - cx * inv2h;
        m.diag[i] = -(two * cxx * invh2) + c0;
        m.upper[i] = cxx * invh2 + cx * inv2h;
    }
    // row 0: d2 ~ (f0 - 2 f1 + f2)/h^2, d1 ~ (-3 f0 + 4 f1 - f2)/(2h)
    let (cxx, cx, c0) = coeff_at(0);
    m.diag[0] = cxx * invh2 - T::of(3.0) * cx * inv2h + c0;
    m.upper[0] = -(two * cxx * invh2) + T::of(4.0) * cx * inv2h;
    m.row0_c2 = cxx * invh2 - cx * inv2h;
    // mirrored at the far edge
    let (cxx, cx, c0) = coeff_at(n - 1);
    m.diag[n - 1] = cxx * invh2 + T::of(3.0) * cx * inv2h + c0;
    m.lower[n - 1] = -(two * cxx * invh2) - T::of(4.0) * cx * inv2h;
    m.rowl_c3 = cxx * invh2 + cx * inv2h;
    Ok(m)
}

impl<T: Real> Hamiltonian<T> for BsHamiltonian<T> {
    fn apply(&self, f: &Field<T>) -> Result<Field<T>> {
        let jet = Jet1::central(f)?;
        Ok(self.apply_jet(&jet))
    }
}

/// Two-dimensional generator obtained from the one-dimensional one by the
/// minimal substitution d_x -> d_x + gamma d_y:
/// H = -(s/2) d_xx - s gamma d_xy - (s/2) gamma^2 d_yy
///     + (s/2 - r) d_x + (s/2 - r) gamma d_y + r,   s = sigma^2(y).
#[derive(Debug, Clone, Copy)]
pub struct GaugeHamiltonian<T> {
    pub sigma_sq: SigmaSq<T>,
    pub r: T,
    pub coupling: GammaCoupling<T>,
}

impl<T: Real> GaugeHamiltonian<T> {
    pub fn new(sigma_sq: SigmaSq<T>, r: T, coupling: GammaCoupling<T>) -> Result<Self> {
        if let SigmaSq::Constant(s) = sigma_sq {
            if !s.is_finite() || s <= T::zero() {
                return Err(Error::invalid(
                    "sigma_sq",
                    format!("must be finite and positive, got {s}"),
                ));
            }
        }
        if !r.is_finite() {
            return Err(Error::invalid("r", format!("must be finite, got {r}")));
        }
        Ok(GaugeHamiltonian { sigma_sq, r, coupling })
    }

    pub fn coeffs_at(&self, y: T) -> OperatorCoeffs<T> {
        let s = self.sigma_sq.at(y);
        let g = self.coupling.0;
        let half = T::of(0.5);
        OperatorCoeffs {
            cxx: -(s * half),
            cxy: -(s * g),
            cyy: -(s * half * g * g),
            cx: s * half - self.r,
            cy: (s * half - self.r) * g,
            c0: self.r,
        }
    }

    pub fn apply_jet(&self, jet: &Jet2<T>) -> Result<Field<T>> {
        combine_2d(jet, |y| Ok(self.coeffs_at(y)))
    }

    pub fn apply_smooth(&self, s: &Smooth2<T>, x: T, y: T) -> T {
        combine_point(&self.coeffs_at(y), s, x, y)
    }
}

impl<T: Real> Hamiltonian<T> for GaugeHamiltonian<T> {
    fn apply(&self, f: &Field<T>) -> Result<Field<T>> {
        let jet = Jet2::central(f)?;
        self.apply_jet(&jet)
    }
}

/// How the stochastic-volatility generator obtains its parameters.
#[derive(Debug, Clone, Copy)]
pub enum MgCoefficientMode<T> {
    /// One validated parameter set used at every volatility level.
    Fixed(MgParams<T>),
    /// Parameters re-derived from the volatility-coefficient identification
    /// at each level, which pins |rho| = 1 and the rate lambda e^-y + mu.
    MappedPointwise { alpha: T, lambda: T, mu: T, sign: RhoSign },
}

/// Stochastic-volatility generator in (log price, log squared volatility):
/// H = -(e^y/2) d_xx - rho zeta e^{y(alpha-1/2)} d_xy
///     - (zeta^2/2) e^{2y(alpha-1)} d_yy - (r - e^y/2) d_x
///     - (lambda e^-y + mu - (zeta^2/2) e^{2y(alpha-1)}) d_y + r.
#[derive(Debug, Clone, Copy)]
pub struct MgHamiltonian<T> {
    pub mode: MgCoefficientMode<T>,
}

impl<T: Real> MgHamiltonian<T> {
    pub fn new(mode: MgCoefficientMode<T>) -> Self {
        MgHamiltonian { mode }
    }

    pub fn coeffs_at(&self, y: T) -> Result<OperatorCoeffs<T>> {
        let half = T::of(0.5);
        let ey = y.exp();
        let (r, zeta_sq, rho_zeta, alpha, lambda, mu) = match self.mode {
            MgCoefficientMode::Fixed(p) => {
                (p.r, p.zeta * p.zeta, p.rho * p.zeta, p.alpha, p.lambda, p.mu)
            }
            MgCoefficientMode::MappedPointwise { alpha, lambda, mu, sign } => {
                let v = vol_coeff_map(alpha, y, lambda, mu)?;
                let rz = match sign {
                    RhoSign::Plus => v.rho_zeta,
                    RhoSign::Minus => -v.rho_zeta,
                };
                (v.rate, v.zeta_sq, rz, alpha, lambda, mu)
            }
        };
        let vol_drive = zeta_sq * half * (T::of(2.0) * y * (alpha - T::one())).exp();
        let c = OperatorCoeffs {
            cxx: -(ey * half),
            cxy: -(rho_zeta * (y * (alpha - half)).exp()),
            cyy: -vol_drive,
            cx: -(r - ey * half),
            cy: -(lambda * (-y).exp() + mu - vol_drive),
            c0: r,
        };
        if !c.is_finite() {
            return Err(Error::SingularParameter(format!(
                "generator coefficients overflow at y = {y}"
            )));
        }
        Ok(c)
    }

    pub fn apply_jet(&self, jet: &Jet2<T>) -> Result<Field<T>> {
        combine_2d(jet, |y| self.coeffs_at(y))
    }

    pub fn apply_smooth(&self, s: &Smooth2<T>, x: T, y: T) -> Result<T> {
        Ok(combine_point(&self.coeffs_at(y)?, s, x, y))
    }
}

impl<T: Real> Hamiltonian<T> for MgHamiltonian<T> {
    fn apply(&self, f: &Field<T>) -> Result<Field<T>> {
        let jet = Jet2::central(f)?;
        self.apply_jet(&jet)
    }
}

/// Shared combination path. Coefficients are fetched once per volatility
/// level; the per-node expression has a single evaluation order so equal
/// coefficients give equal bits.
fn combine_2d<T: Real>(
    jet: &Jet2<T>,
    mut coeffs_at: impl FnMut(T) -> Result<OperatorCoeffs<T>>,
) -> Result<Field<T>> {
    let grid = jet.value.grid2()?.clone();
    let nx = grid.nx();
    let mut out = jet.value.clone();
    for j in 0..grid.ny() {
        let c = coeffs_at(grid.y.node(j))?;
        for i in 0..nx {
            let k = j * nx + i;
            out.values_mut()[k] = c.cxx * jet.dxx.values()[k]
                + c.cxy * jet.dxy.values()[k]
                + c.cyy * jet.dyy.values()[k]
                + c.cx * jet.dx.values()[k]
                + c.cy * jet.dy.values()[k]
                + c.c0 * jet.value.values()[k];
        }
    }
    Ok(out)
}

fn combine_point<T: Real>(c: &OperatorCoeffs<T>, s: &Smooth2<T>, x: T, y: T) -> T {
    c.cxx * s.dxx(x, y)
        + c.cxy * s.dxy(x, y)
        + c.cyy * s.dyy(x, y)
        + c.cx * s.dx(x, y)
        + c.cy * s.dy(x, y)
        + c.c0 * s.eval(x, y)
}
