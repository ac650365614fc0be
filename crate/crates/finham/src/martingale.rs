//! No-arbitrage state checks, the equilibrium-volatility constraint, and
//! seeded Monte Carlo verification of the discounted expectation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::{Axis, Field, Grid1D, Grid2D, DEFAULT_INTERIOR_MARGIN};
use crate::hamiltonian::{BsHamiltonian, Hamiltonian, MgHamiltonian};
use crate::params::{BsParams, MgParams};
use crate::real::Real;
use crate::smooth::{Smooth1, Smooth2};

/// Whether residuals are evaluated with exact derivatives of the probe state
/// or with the grid stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeMode {
    Analytic,
    Central,
}

#[derive(Debug, Clone)]
pub struct MartingaleReport<T> {
    pub max_interior_residual: T,
    pub residual_field: Field<T>,
    pub constraint_residuals: Vec<(String, T)>,
}

impl<T: Real> MartingaleReport<T> {
    fn from_residual(residual_field: Field<T>, constraint_residuals: Vec<(String, T)>) -> Result<Self> {
        let max_interior_residual = residual_field.interior_sup_norm(DEFAULT_INTERIOR_MARGIN)?;
        Ok(MartingaleReport { max_interior_residual, residual_field, constraint_residuals })
    }
}

/// Residual of the generator applied to the state e^{a x}. The no-arbitrage
/// state is a = 1; other exponents serve as controls that must not pass.
pub fn bs_exponential_state_residual<T: Real>(
    params: BsParams<T>,
    grid: &Grid1D<T>,
    mode: DerivativeMode,
    a: T,
) -> Result<MartingaleReport<T>> {
    let h = BsHamiltonian::new(params);
    let residual = match mode {
        DerivativeMode::Analytic => {
            let s = Smooth1::exp_scaled(a);
            Field::sample_1d(grid, |x| h.apply_smooth(&s, x))
        }
        DerivativeMode::Central => {
            let f = Field::sample_1d(grid, |x| (a * x).exp());
            h.apply(&f)?
        }
    };
    MartingaleReport::from_residual(residual, Vec::new())
}

/// Residual of the one-dimensional generator on its no-arbitrage state e^x.
pub fn check_bs_martingale<T: Real>(
    params: BsParams<T>,
    grid: &Grid1D<T>,
    mode: DerivativeMode,
) -> Result<MartingaleReport<T>> {
    bs_exponential_state_residual(params, grid, mode, T::one())
}

/// Residual of the two-dimensional generator on e^x, which it annihilates
/// for every parameter set (the volatility terms never see the state).
pub fn check_mg_martingale<T: Real>(
    h: &MgHamiltonian<T>,
    grid: &Grid2D<T>,
    mode: DerivativeMode,
) -> Result<MartingaleReport<T>> {
    let residual = match mode {
        DerivativeMode::Analytic => {
            let s = Smooth2::exp_linear(T::one(), T::zero());
            let mut out = Field::constant(crate::grid::Grid::Two(grid.clone()), T::zero());
            let nx = grid.nx();
            for j in 0..grid.ny() {
                let y = grid.y.node(j);
                for i in 0..nx {
                    let v = h.apply_smooth(&s, grid.x.node(i), y)?;
                    out.values_mut()[j * nx + i] = v;
                }
            }
            out
        }
        DerivativeMode::Central => {
            let f = Field::sample_2d(grid, |x, _| x.exp());
            h.apply(&f)?
        }
    };
    MartingaleReport::from_residual(residual, Vec::new())
}

/// Multiplier profile of the joint state e^{x+y}: H e^{x+y} = m(y) e^{x+y}
/// pointwise, returned as (y, m(y)) pairs. Under the volatility-coefficient
/// identification m(y) = -(e^y + r(y)), so m vanishes exactly at the
/// equilibrium volatility levels.
pub fn joint_exponential_factor_profile<T: Real>(
    h: &MgHamiltonian<T>,
    y_grid: &Grid1D<T>,
) -> Result<Vec<(T, T)>> {
    let s = Smooth2::exp_linear(T::one(), T::one());
    let mut out = Vec::with_capacity(y_grid.n());
    for y in y_grid.nodes() {
        let factor = h.apply_smooth(&s, T::zero(), y)? / y.exp();
        out.push((y, factor));
    }
    Ok(out)
}

/// Minimum absolute value of the x-derivative of `state` on the interior
/// (one-node margin). A strictly positive result certifies the shift
/// generator does not annihilate the state.
pub fn shift_generator_min_abs<T: Real>(state: &Field<T>) -> Result<T> {
    let d = crate::diff::apply_derivative(state, Axis::X, crate::diff::DerivOrder::First)?;
    let idx = d.interior_indices(1)?;
    let mut min = T::infinity();
    for i in idx {
        min = min.min(d.values()[i].abs());
    }
    Ok(min)
}

/// The broken-symmetry witness: the price-shift generator applied to the
/// no-arbitrage state e^x has strictly positive magnitude everywhere.
pub fn price_shift_generator_check<T: Real>(grid: &Grid1D<T>) -> Result<T> {
    let state = Field::sample_1d(grid, |x| x.exp());
    shift_generator_min_abs(&state)
}

/// Real volatility levels solving e^{2y} + mu e^y + lambda = 0.
#[derive(Debug, Clone)]
pub struct EquilibriumRoots<T> {
    /// Ascending log-volatility roots; 0, 1 or 2 entries.
    pub roots_y: Vec<T>,
    pub discriminant: T,
}

/// Substitutes u = e^y and solves u^2 + mu u + lambda = 0 with the
/// cancellation-free quadratic formula; only u > 0 survives the change of
/// variables.
pub fn solve_equilibrium_volatility<T: Real>(lambda: T, mu: T) -> Result<EquilibriumRoots<T>> {
    for (name, v) in [("lambda", lambda), ("mu", mu)] {
        if !v.is_finite() {
            return Err(Error::invalid(name, format!("must be finite, got {v}")));
        }
    }
    let disc = mu * mu - T::of(4.0) * lambda;
    let mut roots_y = Vec::new();
    if disc >= T::zero() {
        let sq = disc.sqrt();
        let mut us = Vec::new();
        if mu == T::zero() && lambda == T::zero() {
            us.push(T::zero());
        } else {
            let q = -(mu + mu.signum() * sq) * T::of(0.5);
            us.push(q);
            if q != T::zero() {
                us.push(lambda / q);
            } else {
                us.push(T::zero());
            }
        }
        us.retain(|u| *u > T::zero());
        us.sort_by(|a, b| a.partial_cmp(b).unwrap());
        us.dedup();
        roots_y = us.into_iter().map(|u| u.ln()).collect();
    }
    Ok(EquilibriumRoots { roots_y, discriminant: disc })
}

/// e^{2y} + mu e^y + lambda, the constraint the equilibrium roots solve.
pub fn equilibrium_residual<T: Real>(lambda: T, mu: T, y: T) -> T {
    (T::of(2.0) * y).exp() + mu * y.exp() + lambda
}

/// lambda + e^y (mu + (zeta^2/2) e^{2y(alpha-1)} + rho zeta e^{y(alpha-1/2)}),
/// the vacuum constraint in its stated form. Under the
/// volatility-coefficient identification it reduces to
/// lambda + mu e^y + (3/2) e^{2y}, which differs from
/// [`equilibrium_residual`]; both are computed so reports can show the gap.
pub fn vacuum_constraint_residual<T: Real>(params: &MgParams<T>, y: T) -> T {
    let half = T::of(0.5);
    let vol = params.zeta * params.zeta * half * (T::of(2.0) * y * (params.alpha - T::one())).exp();
    let cross = params.rho * params.zeta * (y * (params.alpha - half)).exp();
    params.lambda + y.exp() * (params.mu + vol + cross)
}

/// |e^y + r| at each root with r = lambda e^{-y} + mu; zero in exact
/// arithmetic because the defining quadratic divided by e^y is e^y + r = 0.
pub fn check_negative_rate_identity<T: Real>(
    lambda: T,
    mu: T,
    roots: &EquilibriumRoots<T>,
) -> Vec<T> {
    roots
        .roots_y
        .iter()
        .map(|&y| {
            let r = lambda * (-y).exp() + mu;
            (y.exp() + r).abs()
        })
        .collect()
}

/// Fixed-seed Monte Carlo summary.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate<T> {
    pub estimate: T,
    pub std_error: T,
    pub n_paths: usize,
    pub seed: u64,
}

/// Discounted terminal values of risk-neutral geometric Brownian paths.
/// The discount is folded into the exponent, so the only deviation from s0
/// is the sampled noise: value = s0 exp(-sigma^2 t/2 + sigma sqrt(t) z).
pub fn discounted_terminal_values<T: Real>(
    params: BsParams<T>,
    s0: T,
    t: T,
    n_paths: usize,
    seed: u64,
) -> Result<Vec<T>> {
    if !s0.is_finite() || s0 <= T::zero() {
        return Err(Error::invalid("s0", format!("must be finite and positive, got {s0}")));
    }
    if !t.is_finite() || t < T::zero() {
        return Err(Error::invalid("t", format!("must be finite and nonnegative, got {t}")));
    }
    if n_paths < 10_000 {
        return Err(Error::invalid(
            "n_paths",
            format!("at least 10000 paths required for a trustworthy band, got {n_paths}"),
        ));
    }
    let sigma = params.sigma;
    let drift = -(sigma * sigma * t * T::of(0.5));
    let vol = sigma * t.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_paths);
    for _ in 0..n_paths {
        let z: f64 = rng.sample(StandardNormal);
        out.push(s0 * (drift + vol * T::of(z)).exp());
    }
    Ok(out)
}

/// Mean and standard error of the discounted terminal values; the mean must
/// sit within a few standard errors of s0 when the model is risk-neutral.
/// Reductions are sequential so a fixed seed gives identical bytes.
pub fn discounted_expectation_check<T: Real>(
    params: BsParams<T>,
    s0: T,
    t: T,
    n_paths: usize,
    seed: u64,
) -> Result<McEstimate<T>> {
    let values = discounted_terminal_values(params, s0, t, n_paths, seed)?;
    let n = T::of_usize(values.len());
    let mut sum = T::zero();
    for &v in &values {
        sum = sum + v;
    }
    let mean = sum / n;
    let mut ssq = T::zero();
    for &v in &values {
        let d = v - mean;
        ssq = ssq + d * d;
    }
    let var = ssq / (n - T::one());
    let std_error = var.sqrt() / n.sqrt();
    Ok(McEstimate { estimate: mean, std_error, n_paths: values.len(), seed })
}

/// A pair of noise vectors with target correlation rho, plus their sample
/// correlation. At rho = +-1 the second vector is the (signed) first one,
/// bit for bit, and the sample correlation is exactly +-1.
#[derive(Debug, Clone)]
pub struct NoisePair<T> {
    pub first: Vec<T>,
    pub second: Vec<T>,
    pub sample_corr: T,
    pub seed: u64,
}

pub fn correlated_noise_pair<T: Real>(rho: T, n: usize, seed: u64) -> Result<NoisePair<T>> {
    if !rho.is_finite() || rho.abs() > T::one() {
        return Err(Error::invalid("rho", format!("must lie in [-1, 1], got {rho}")));
    }
    if n < 2 {
        return Err(Error::invalid("n", format!("need at least 2 pairs, got {n}")));
    }
    let comp = (T::one() - rho * rho).max(T::zero()).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first = Vec::with_capacity(n);
    let mut second = Vec::with_capacity(n);
    for _ in 0..n {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let r1 = T::of(z1);
        first.push(r1);
        second.push(rho * r1 + comp * T::of(z2));
    }
    let sample_corr = sample_correlation(&first, &second);
    Ok(NoisePair { first, second, sample_corr, seed })
}

/// Pearson correlation with one product under the square root, so mirrored
/// inputs hit the IEEE identity sqrt(s*s) = |s| and return exactly +-1.
fn sample_correlation<T: Real>(x: &[T], y: &[T]) -> T {
    let n = T::of_usize(x.len());
    let mut sx = T::zero();
    let mut sy = T::zero();
    for i in 0..x.len() {
        sx = sx + x[i];
        sy = sy + y[i];
    }
    let mx = sx / n;
    let my = sy / n;
    let mut sxx = T::zero();
    let mut syy = T::zero();
    let mut sxy = T::zero();
    for i in 0..x.len() {
        let a = x[i] - mx;
        let b = y[i] - my;
        sxx = sxx + a * a;
        syy = syy + b * b;
        sxy = sxy + a * b;
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::MgCoefficientMode;
    use crate::params::RhoSign;

    fn params() -> BsParams<f64> {
        BsParams::new(0.2, 0.05).unwrap()
    }

    #[test]
    fn analytic_martingale_residual_is_rounding_level() {
        let g = Grid1D::new(-2.0_f64, 2.0, 64).unwrap();
        let rep = check_bs_martingale(params(), &g, DerivativeMode::Analytic).unwrap();
        assert!(rep.max_interior_residual <= 1e-12, "residual {:e}", rep.max_interior_residual);
    }

    #[test]
    fn central_martingale_residual_converges_at_second_order() {
        let res = |n: usize| {
            let g = Grid1D::new(-2.0_f64, 2.0, n).unwrap();
            check_bs_martingale(params(), &g, DerivativeMode::Central)
                .unwrap()
                .max_interior_residual
        };
        let ratio = res(201) / res(401);
        assert!((3.6..4.4).contains(&ratio), "convergence ratio {ratio}");
    }

    #[test]
    fn squared_state_is_rejected_with_the_predicted_factor() {
        let g = Grid1D::new(-1.0_f64, 1.0, 65).unwrap();
        let rep = bs_exponential_state_residual(params(), &g, DerivativeMode::Analytic, 2.0).unwrap();
        // H e^{2x} = -(sigma^2 + r) e^{2x}; on [-1, 1] the interior max sits
        // near the right margin
        assert!(rep.max_interior_residual > 1e-2, "control must fail loudly");
        let idx = g.nearest_index(0.0);
        assert_eq!(g.node(idx), 0.0);
        let want = 0.09;
        assert!((rep.residual_field.at1(idx).abs() - want).abs() <= 1e-14);
    }

    #[test]
    fn two_dimensional_martingale_state_is_annihilated_for_any_parameters() {
        let g2 = Grid2D::new(
            Grid1D::new(-1.5_f64, 1.5, 33).unwrap(),
            Grid1D::new(-2.0_f64, 1.0, 25).unwrap(),
        );
        for p in [
            MgParams::new(0.05, 1.0, 0.4, 1.5, 0.3, -0.1).unwrap(),
            MgParams::new(-0.2, 2.0, -0.9, 0.7, 1.0, 0.5).unwrap(),
        ] {
            let h = MgHamiltonian::new(MgCoefficientMode::Fixed(p));
            let rep = check_mg_martingale(&h, &g2, DerivativeMode::Analytic).unwrap();
            assert!(rep.max_interior_residual <= 1e-12, "residual {:e}", rep.max_interior_residual);
            // central stencils leave h^2 truncation, so only a coarse bound
            // holds on a 33x25 grid
            let rep_c = check_mg_martingale(&h, &g2, DerivativeMode::Central).unwrap();
            assert!(rep_c.max_interior_residual <= 1e-2, "stencil residual {:e}", rep_c.max_interior_residual);
        }
    }

    #[test]
    fn joint_factor_profile_matches_negative_level_plus_rate() {
        let p = MgParams::from_vol_coeff(1.5_f64, 0.0, 0.0, 0.05, RhoSign::Plus).unwrap();
        let h = MgHamiltonian::new(MgCoefficientMode::Fixed(p));
        let yg = Grid1D::new(-1.0_f64, 1.0, 9).unwrap();
        for (y, m) in joint_exponential_factor_profile(&h, &yg).unwrap() {
            let want = -(y.exp() + 0.05);
            assert!((m - want).abs() <= 1e-13 * want.abs(), "factor {m} at y = {y}");
        }
    }

    #[test]
    fn shift_generator_never_annihilates_the_state() {
        let g = Grid1D::new(-1.0_f64, 1.0, 201).unwrap();
        let min = price_shift_generator_check(&g).unwrap();
        assert!(min > 0.0);
        assert!((min - (-1.0_f64).exp()).abs() < 0.05, "min {min}");

        let g2 = Grid1D::new(0.0_f64, 2.0, 201).unwrap();
        let min2 = price_shift_generator_check(&g2).unwrap();
        assert!((min2 - 1.0).abs() < 0.05, "min {min2}");

        let flat = Field::constant(crate::grid::Grid::One(g), 3.0);
        assert_eq!(shift_generator_min_abs(&flat).unwrap(), 0.0);
    }

    #[test]
    fn equilibrium_roots_for_the_reference_pair() {
        let roots = solve_equilibrium_volatility(2.0_f64, -3.0).unwrap();
        assert_eq!(roots.discriminant, 1.0);
        assert_eq!(roots.roots_y, vec![0.0, 2.0_f64.ln()]);
        for &y in &roots.roots_y {
            assert!(equilibrium_residual(2.0, -3.0, y).abs() <= 1e-10);
        }
        let ids = check_negative_rate_identity(2.0, -3.0, &roots);
        assert_eq!(ids[0], 0.0);
        assert!(ids[1] <= 1e-12);
    }

    #[test]
    fn degenerate_and_empty_root_cases() {
        let only = solve_equilibrium_volatility(0.0_f64, -1.0).unwrap();
        assert_eq!(only.roots_y, vec![0.0]);
        let none = solve_equilibrium_volatility(1.0_f64, 1.0).unwrap();
        assert!(none.roots_y.is_empty());
        assert_eq!(none.discriminant, -3.0);
        assert!(solve_equilibrium_volatility(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn vacuum_constraint_and_equilibrium_residuals_differ_as_documented() {
        // mapped parameters at y_ref = 0: zeta = 1, rho = 1, r = lambda + mu
        let p = MgParams::from_vol_coeff(1.5_f64, 0.0, 2.0, -3.0, RhoSign::Plus).unwrap();
        let vac = vacuum_constraint_residual(&p, 0.0);
        assert!((vac - 0.5).abs() <= 1e-14, "vacuum form gave {vac}");
        let eq = equilibrium_residual(2.0, -3.0, 0.0);
        assert_eq!(eq, 0.0);
    }

    #[test]
    fn discounted_expectation_sits_in_the_three_sigma_band() {
        let est = discounted_expectation_check(params(), 100.0_f64, 1.0, 100_000, 42).unwrap();
        assert!(est.std_error > 0.0);
        let gap = (est.estimate - 100.0).abs();
        assert!(gap <= 3.0 * est.std_error, "gap {gap} vs 3se {}", 3.0 * est.std_error);
    }

    #[test]
    fn zero_horizon_and_zero_volatility_are_exact() {
        let est = discounted_expectation_check(params(), 100.0_f64, 0.0, 10_000, 7).unwrap();
        assert_eq!(est.estimate, 100.0);
        assert_eq!(est.std_error, 0.0);
        let frozen = BsParams::new(1e-300_f64, 0.05).unwrap();
        let est2 = discounted_expectation_check(frozen, 50.0_f64, 1.0, 10_000, 7).unwrap();
        assert!((est2.estimate - 50.0).abs() <= 1e-9);
    }

    #[test]
    fn monte_carlo_input_validation() {
        assert!(discounted_expectation_check(params(), 0.0_f64, 1.0, 10_000, 1).is_err());
        assert!(discounted_expectation_check(params(), 100.0_f64, -1.0, 10_000, 1).is_err());
        assert!(discounted_expectation_check(params(), 100.0_f64, 1.0, 9_999, 1).is_err());
    }

    #[test]
    fn extreme_correlations_are_bitwise_mirrors() {
        let plus = correlated_noise_pair(1.0_f64, 4096, 11).unwrap();
        assert_eq!(plus.first, plus.second);
        assert_eq!(plus.sample_corr, 1.0);

        let minus = correlated_noise_pair(-1.0_f64, 4096, 11).unwrap();
        let mirrored: Vec<f64> = minus.first.iter().map(|v| -v).collect();
        assert_eq!(minus.second, mirrored);
        assert_eq!(minus.sample_corr, -1.0);
    }

    #[test]
    fn moderate_correlation_lands_near_target() {
        let n = 100_000;
        let pair = correlated_noise_pair(0.3_f64, n, 5).unwrap();
        let band = 3.0 / (n as f64).sqrt();
        assert!((pair.sample_corr - 0.3).abs() <= band, "corr {}", pair.sample_corr);
        assert!(correlated_noise_pair(1.2_f64, n, 5).is_err());
    }
}
