//! Backward evolution of option values under the one- and two-dimensional
//! generators: banded implicit schemes in one dimension, an
//! alternating-direction splitting with explicit cross term in two.

use std::rc::Rc;

use crate::diff::{apply_derivative, DerivOrder};
use crate::error::{Error, Result};
use crate::grid::{Axis, Field, Grid, Grid1D};
use crate::hamiltonian::{operator_band, BsHamiltonian, MgCoefficientMode, MgHamiltonian};
use crate::linalg::TriBand;
use crate::params::{BsParams, MgParams};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    ImplicitEuler,
    CrankNicolson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// Evolve the edge rows with their one-sided stencils.
    OneSided,
    /// Pin the edges to known far-field values; a call or put payoff supplies
    /// its discounted asymptotics, anything else freezes the terminal edges.
    DirichletAsymptotic,
}

#[derive(Debug, Clone, Copy)]
pub struct EvolutionConfig<T> {
    pub tau: T,
    pub n_steps: usize,
    pub scheme: Scheme,
    pub boundary: BoundaryMode,
    /// Replace the first step by two implicit-Euler half-steps to damp the
    /// payoff kink before the trapezoidal scheme takes over.
    pub rannacher: bool,
}

impl<T: Real> EvolutionConfig<T> {
    pub fn new(tau: T, n_steps: usize) -> Result<Self> {
        if !tau.is_finite() || tau < T::zero() {
            return Err(Error::invalid("tau", format!("must be finite and nonnegative, got {tau}")));
        }
        if n_steps == 0 {
            return Err(Error::invalid("n_steps", "must be at least 1".to_string()));
        }
        Ok(EvolutionConfig {
            tau,
            n_steps,
            scheme: Scheme::CrankNicolson,
            boundary: BoundaryMode::DirichletAsymptotic,
            rannacher: true,
        })
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_boundary(mut self, boundary: BoundaryMode) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn without_rannacher(mut self) -> Self {
        self.rannacher = false;
        self
    }
}

/// Terminal condition on the log-price axis.
#[derive(Clone)]
pub enum Payoff<T> {
    Call { strike: T },
    Put { strike: T },
    Custom(Rc<dyn Fn(T) -> T>),
}

impl<T: Real> Payoff<T> {
    pub fn call(strike: T) -> Result<Self> {
        if !strike.is_finite() || strike <= T::zero() {
            return Err(Error::invalid("strike", format!("must be finite and positive, got {strike}")));
        }
        Ok(Payoff::Call { strike })
    }

    pub fn put(strike: T) -> Result<Self> {
        if !strike.is_finite() || strike <= T::zero() {
            return Err(Error::invalid("strike", format!("must be finite and positive, got {strike}")));
        }
        Ok(Payoff::Put { strike })
    }

    pub fn custom(f: impl Fn(T) -> T + 'static) -> Self {
        Payoff::Custom(Rc::new(f))
    }

    pub fn strike(&self) -> Option<T> {
        match self {
            Payoff::Call { strike } | Payoff::Put { strike } => Some(*strike),
            Payoff::Custom(_) => None,
        }
    }

    /// Payoff at log-price x.
    pub fn value(&self, x: T) -> T {
        match self {
            Payoff::Call { strike } => (x.exp() - *strike).max(T::zero()),
            Payoff::Put { strike } => (*strike - x.exp()).max(T::zero()),
            Payoff::Custom(f) => f(x),
        }
    }

    pub fn terminal(&self, grid: &Grid1D<T>) -> Field<T> {
        Field::sample_1d(grid, |x| self.value(x))
    }
}

impl<T: Real> std::fmt::Debug for Payoff<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Payoff::Call { strike } => write!(f, "Call {{ strike: {strike} }}"),
            Payoff::Put { strike } => write!(f, "Put {{ strike: {strike} }}"),
            Payoff::Custom(_) => write!(f, "Custom"),
        }
    }
}

fn growth_guard<T: Real>(step: usize, before: T, after: T) -> Result<()> {
    if before > T::zero() && after > T::of(10.0) * before {
        return Err(Error::Unstable {
            step,
            before: before.as_f64(),
            after: after.as_f64(),
        });
    }
    Ok(())
}

fn pin_edges<T: Real>(m: &mut TriBand<T>) {
    let n = m.n();
    m.diag[0] = T::one();
    m.upper[0] = T::zero();
    m.row0_c2 = T::zero();
    m.diag[n - 1] = T::one();
    m.lower[n - 1] = T::zero();
    m.rowl_c3 = T::zero();
}

fn sup<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

/// Evolves the terminal condition backward over tau under exp(-tau H).
/// With Dirichlet boundaries and no payoff information the edge values stay
/// frozen at their terminal levels.
pub fn evolve<T: Real>(
    h: &BsHamiltonian<T>,
    terminal: &Field<T>,
    cfg: &EvolutionConfig<T>,
) -> Result<Field<T>> {
    evolve_with_boundary(h, terminal, cfg, None)
}

pub(crate) fn evolve_with_boundary<T: Real>(
    h: &BsHamiltonian<T>,
    terminal: &Field<T>,
    cfg: &EvolutionConfig<T>,
    bc: Option<&dyn Fn(T) -> (T, T)>,
) -> Result<Field<T>> {
    let grid = *terminal.grid1()?;
    if cfg.tau == T::zero() {
        return Ok(terminal.clone());
    }
    let n = grid.n();
    let band = h.tri_band(&grid)?;
    let dt = cfg.tau / T::of_usize(cfg.n_steps);
    let half = dt * T::of(0.5);
    let dirichlet = matches!(cfg.boundary, BoundaryMode::DirichletAsymptotic);
    let frozen = (terminal.at1(0), terminal.at1(n - 1));

    // (step length, lhs shift, rhs matrix shift or identity)
    let mut plan: Vec<(T, T, Option<T>)> = Vec::new();
    match cfg.scheme {
        Scheme::ImplicitEuler => {
            for _ in 0..cfg.n_steps {
                plan.push((dt, dt, None));
            }
        }
        Scheme::CrankNicolson => {
            if cfg.rannacher {
                plan.push((half, half, None));
                plan.push((half, half, None));
                for _ in 1..cfg.n_steps {
                    plan.push((dt, half, Some(-half)));
                }
            } else {
                for _ in 0..cfg.n_steps {
                    plan.push((dt, half, Some(-half)));
                }
            }
        }
    }

    let mut lhs_cache: Vec<(T, TriBand<T>)> = Vec::new();
    let mut rhs_cache: Vec<(T, TriBand<T>)> = Vec::new();

    let mut u = terminal.values().to_vec();
    let mut tau_done = T::zero();
    let mut prev = sup(&u);
    for (k, &(dts, ls, rs)) in plan.iter().enumerate() {
        tau_done = tau_done + dts;
        if !lhs_cache.iter().any(|(s, _)| *s == ls) {
            let mut m = TriBand::identity_plus(ls, &band);
            if dirichlet {
                pin_edges(&mut m);
            }
            lhs_cache.push((ls, m));
        }
        let lhs = &lhs_cache.iter().find(|(s, _)| *s == ls).unwrap().1;
        let mut rhs = match rs {
            Some(shift) => {
                if !rhs_cache.iter().any(|(s, _)| *s == shift) {
                    rhs_cache.push((shift, TriBand::identity_plus(shift, &band)));
                }
                rhs_cache.iter().find(|(s, _)| *s == shift).unwrap().1.apply(&u)
            }
            None => u.clone(),
        };
        if dirichlet {
            let (lo, hi) = match bc {
                Some(f) => f(tau_done),
                None => frozen,
            };
            rhs[0] = lo;
            rhs[n - 1] = hi;
        }
        u = lhs.solve(&rhs)?;
        let s = sup(&u);
        growth_guard(k, prev, s)?;
        prev = s;
    }
    Field::from_values(Grid::One(grid), u)
}

/// Prices a European option on the log-price grid by backward evolution.
pub fn price_european_bs<T: Real>(
    params: BsParams<T>,
    payoff: &Payoff<T>,
    grid: &Grid1D<T>,
    cfg: &EvolutionConfig<T>,
) -> Result<Field<T>> {
    let h = BsHamiltonian::new(params);
    let terminal = payoff.terminal(grid);
    let r = params.r;
    let s_lo = grid.x_min().exp();
    let s_hi = grid.x_max().exp();
    match *payoff {
        Payoff::Call { strike } => {
            let f = move |t: T| (T::zero(), s_hi - strike * (-r * t).exp());
            evolve_with_boundary(&h, &terminal, cfg, Some(&f))
        }
        Payoff::Put { strike } => {
            let f = move |t: T| (strike * (-r * t).exp() - s_lo, T::zero());
            evolve_with_boundary(&h, &terminal, cfg, Some(&f))
        }
        Payoff::Custom(_) => evolve_with_boundary(&h, &terminal, cfg, None),
    }
}

/// Reference value for a European call or put, computed through the
/// complementary error function in double precision.
pub fn closed_form_bs<T: Real>(payoff: &Payoff<T>, s: T, r: T, sigma: T, tau: T) -> Result<T> {
    let strike = payoff.strike().ok_or_else(|| {
        Error::invalid("payoff", "closed form requires a call or put".to_string())
    })?;
    if !s.is_finite() || s <= T::zero() {
        return Err(Error::invalid("s", format!("must be finite and positive, got {s}")));
    }
    if !sigma.is_finite() || sigma <= T::zero() {
        return Err(Error::invalid("sigma", format!("must be finite and positive, got {sigma}")));
    }
    if !tau.is_finite() || tau <= T::zero() {
        return Err(Error::invalid("tau", format!("must be finite and positive, got {tau}")));
    }
    if !r.is_finite() {
        return Err(Error::invalid("r", format!("must be finite, got {r}")));
    }
    let sf = s.as_f64();
    let kf = strike.as_f64();
    let rf = r.as_f64();
    let st = sigma.as_f64() * tau.as_f64().sqrt();
    let d1 = ((sf / kf).ln() + (rf + 0.5 * sigma.as_f64() * sigma.as_f64()) * tau.as_f64()) / st;
    let d2 = d1 - st;
    let phi = |x: f64| 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2);
    let disc = (-rf * tau.as_f64()).exp();
    let v = match payoff {
        Payoff::Call { .. } => sf * phi(d1) - kf * disc * phi(d2),
        Payoff::Put { .. } => kf * disc * phi(-d2) - sf * phi(-d1),
        Payoff::Custom(_) => unreachable!(),
    };
    Ok(T::of(v))
}

struct DouglasOperators<T> {
    x_bands: Vec<TriBand<T>>,
    y_band: TriBand<T>,
    cxy: Vec<T>,
}

fn douglas_operators<T: Real>(
    params: &MgParams<T>,
    gx: &Grid1D<T>,
    gy: &Grid1D<T>,
) -> Result<DouglasOperators<T>> {
    let h = MgHamiltonian::new(MgCoefficientMode::Fixed(*params));
    let ys: Vec<T> = gy.nodes().collect();
    let coeffs = ys.iter().map(|&y| h.coeffs_at(y)).collect::<Result<Vec<_>>>()?;
    let mut x_bands = Vec::with_capacity(ys.len());
    for c in &coeffs {
        // the zeroth-order rate rides with the x sweep
        x_bands.push(operator_band(gx, |_| (c.cxx, c.cx, c.c0))?);
    }
    let y_band = operator_band(gy, |k| (coeffs[k].cyy, coeffs[k].cy, T::zero()))?;
    let cxy = coeffs.iter().map(|c| c.cxy).collect();
    Ok(DouglasOperators { x_bands, y_band, cxy })
}

fn apply_rows<T: Real>(bands: &[TriBand<T>], u: &[T], nx: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(u.len());
    for (j, band) in bands.iter().enumerate() {
        out.extend_from_slice(&band.apply(&u[j * nx..(j + 1) * nx]));
    }
    out
}

fn apply_cols<T: Real>(band: &TriBand<T>, u: &[T], nx: usize, ny: usize) -> Vec<T> {
    let mut out = vec![T::zero(); u.len()];
    let mut col = vec![T::zero(); ny];
    for i in 0..nx {
        for j in 0..ny {
            col[j] = u[j * nx + i];
        }
        let w = band.apply(&col);
        for j in 0..ny {
            out[j * nx + i] = w[j];
        }
    }
    out
}

/// Evolves a two-dimensional terminal condition under the stochastic
/// volatility generator with a Douglas splitting: explicit predictor over the
/// full operator, then implicit corrector sweeps in x and in y. The mixed
/// derivative stays explicit, so the step size is capped by
/// dt max|c_xy| / (hx hy) <= 1, checked up front.
pub fn evolve_mg<T: Real>(
    params: &MgParams<T>,
    terminal: &Field<T>,
    cfg: &EvolutionConfig<T>,
) -> Result<Field<T>> {
    let g2 = *terminal.grid2()?;
    if cfg.tau == T::zero() {
        return Ok(terminal.clone());
    }
    let (nx, ny) = (g2.nx(), g2.ny());
    let ops = douglas_operators(params, &g2.x, &g2.y)?;
    let dt = cfg.tau / T::of_usize(cfg.n_steps);
    let cross = dt * sup(&ops.cxy) / (g2.x.h() * g2.y.h());
    if cross > T::one() {
        return Err(Error::invalid(
            "n_steps",
            format!("explicit cross term needs dt max|c_xy|/(hx hy) <= 1, got {cross}"),
        ));
    }

    let theta_main = match cfg.scheme {
        Scheme::ImplicitEuler => T::one(),
        Scheme::CrankNicolson => T::of(0.5),
    };
    // (step length, weight)
    let mut plan: Vec<(T, T)> = Vec::new();
    if matches!(cfg.scheme, Scheme::CrankNicolson) && cfg.rannacher {
        let half = dt * T::of(0.5);
        plan.push((half, T::one()));
        plan.push((half, T::one()));
        for _ in 1..cfg.n_steps {
            plan.push((dt, theta_main));
        }
    } else {
        for _ in 0..cfg.n_steps {
            plan.push((dt, theta_main));
        }
    }

    let dirichlet = matches!(cfg.boundary, BoundaryMode::DirichletAsymptotic);
    let mut u = terminal.values().to_vec();
    let mut prev = sup(&u);
    let mut field = terminal.clone();
    for (k, &(dts, theta)) in plan.iter().enumerate() {
        field.values_mut().copy_from_slice(&u);
        let hx = apply_rows(&ops.x_bands, &u, nx);
        let hy = apply_cols(&ops.y_band, &u, nx, ny);
        let dx = apply_derivative(&field, Axis::X, DerivOrder::First)?;
        let dxy = apply_derivative(&dx, Axis::Y, DerivOrder::First)?;
        let s = theta * dts;

        // predictor: everything explicit
        let mut y1 = vec![T::zero(); u.len()];
        for j in 0..ny {
            let cm = ops.cxy[j];
            for i in 0..nx {
                let idx = j * nx + i;
                y1[idx] = u[idx] - dts * (hx[idx] + hy[idx] + cm * dxy.values()[idx]);
            }
        }
        // x sweep
        for j in 0..ny {
            let lhs = TriBand::identity_plus(s, &ops.x_bands[j]);
            let mut rhs = vec![T::zero(); nx];
            for i in 0..nx {
                let idx = j * nx + i;
                rhs[i] = y1[idx] + s * hx[idx];
            }
            let sol = lhs.solve(&rhs)?;
            y1[j * nx..(j + 1) * nx].copy_from_slice(&sol);
        }
        // y sweep
        let lhs_y = TriBand::identity_plus(s, &ops.y_band);
        let mut col = vec![T::zero(); ny];
        for i in 0..nx {
            for j in 0..ny {
                col[j] = y1[j * nx + i] + s * hy[j * nx + i];
            }
            let sol = lhs_y.solve(&col)?;
            for j in 0..ny {
                y1[j * nx + i] = sol[j];
            }
        }
        u = y1;
        if dirichlet {
            let t = terminal.values();
            for i in 0..nx {
                u[i] = t[i];
                u[(ny - 1) * nx + i] = t[(ny - 1) * nx + i];
            }
            for j in 0..ny {
                u[j * nx] = t[j * nx];
                u[j * nx + nx - 1] = t[j * nx + nx - 1];
            }
        }
        let snorm = sup(&u);
        growth_guard(k, prev, snorm)?;
        prev = snorm;
    }
    Field::from_values(Grid::Two(g2), u)
}
