//! Validated model parameter sets.

use crate::error::{Error, Result};
use crate::real::Real;

/// Log-price diffusion parameters: volatility and short rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsParams<T> {
    pub sigma: T,
    pub r: T,
}

impl<T: Real> BsParams<T> {
    pub fn new(sigma: T, r: T) -> Result<Self> {
        if !sigma.is_finite() || sigma <= T::zero() {
            return Err(Error::invalid("sigma", format!("must be finite and positive, got {sigma}")));
        }
        if !r.is_finite() {
            return Err(Error::invalid("r", format!("must be finite, got {r}")));
        }
        Ok(BsParams { sigma, r })
    }

    pub fn sigma_sq(&self) -> T {
        self.sigma * self.sigma
    }
}

/// Stochastic-volatility parameters for the two-dimensional generator.
///
/// `y` is log squared volatility; `zeta` scales its noise, `rho` correlates
/// the two noises, `alpha` sets the volatility-of-volatility exponent and
/// `lambda`, `mu` the drift of e^y.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgParams<T> {
    pub r: T,
    pub zeta: T,
    pub rho: T,
    pub alpha: T,
    pub lambda: T,
    pub mu: T,
}

impl<T: Real> MgParams<T> {
    pub fn new(r: T, zeta: T, rho: T, alpha: T, lambda: T, mu: T) -> Result<Self> {
        for (name, v) in [("r", r), ("alpha", alpha), ("lambda", lambda), ("mu", mu)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if !zeta.is_finite() || zeta <= T::zero() {
            return Err(Error::invalid("zeta", format!("must be finite and positive, got {zeta}")));
        }
        if !rho.is_finite() || rho < -T::one() || rho > T::one() {
            return Err(Error::invalid("rho", format!("must lie in [-1, 1], got {rho}")));
        }
        Ok(MgParams { r, zeta, rho, alpha, lambda, mu })
    }

    /// Parameters reproducing the gauge generator at unit coupling, built by
    /// inverting the volatility-coefficient relations at reference level
    /// `y_ref`. The inversion forces |rho| = 1; `sign` picks the branch.
    pub fn from_vol_coeff(alpha: T, y_ref: T, lambda: T, mu: T, sign: RhoSign) -> Result<Self> {
        let v = vol_coeff_map(alpha, y_ref, lambda, mu)?;
        let zeta = v.zeta_sq.sqrt();
        // rho = rho_zeta / zeta equals 1 up to one rounding; clamp so the
        // range check cannot trip on 1 + 2^-52
        let rho = (v.rho_zeta / zeta).max(-T::one()).min(T::one());
        let rho = match sign {
            RhoSign::Plus => rho,
            RhoSign::Minus => -rho,
        };
        MgParams::new(v.rate, zeta, rho, alpha, lambda, mu)
    }
}

/// Sign branch for the correlation forced to unit magnitude by
/// [`MgParams::from_vol_coeff`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoSign {
    Plus,
    Minus,
}

/// Strength of the cross-coupling between price and volatility momenta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaCoupling<T>(pub T);

impl<T: Real> GammaCoupling<T> {
    pub fn new(gamma: T) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::invalid("gamma", format!("must be finite, got {gamma}")));
        }
        Ok(GammaCoupling(gamma))
    }
}

/// The three derived quantities the volatility-coefficient identification
/// fixes: zeta^2, the product rho*zeta, and the implied rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolCoeffValues<T> {
    pub zeta_sq: T,
    pub rho_zeta: T,
    pub rate: T,
}

/// zeta^2 = e^{-2y(alpha - 3/2)}, rho*zeta = e^{-y(alpha - 3/2)},
/// r = lambda e^{-y} + mu.
pub fn vol_coeff_map<T: Real>(alpha: T, y: T, lambda: T, mu: T) -> Result<VolCoeffValues<T>> {
    for (name, v) in [("alpha", alpha), ("y", y), ("lambda", lambda), ("mu", mu)] {
        if !v.is_finite() {
            return Err(Error::invalid(name, format!("must be finite, got {v}")));
        }
    }
    let shift = alpha - T::of(1.5);
    let zeta_sq = (-(T::of(2.0)) * y * shift).exp();
    let rho_zeta = (-y * shift).exp();
    let rate = lambda * (-y).exp() + mu;
    if !zeta_sq.is_finite() || zeta_sq <= T::zero() {
        return Err(Error::SingularParameter(format!(
            "volatility normalisation overflowed: zeta^2 = {zeta_sq} at alpha = {alpha}, y = {y}"
        )));
    }
    Ok(VolCoeffValues { zeta_sq, rho_zeta, rate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bs_params_reject_bad_volatility() {
        assert!(BsParams::new(0.0_f64, 0.05).is_err());
        assert!(BsParams::new(-0.2_f64, 0.05).is_err());
        assert!(BsParams::new(f64::NAN, 0.05).is_err());
        assert!(BsParams::new(0.2_f64, f64::INFINITY).is_err());
        assert!(BsParams::new(0.2_f64, -0.01).is_ok());
    }

    #[test]
    fn mg_params_reject_out_of_range_correlation() {
        assert!(MgParams::new(0.05_f64, 1.0, 1.5, 1.5, 0.0, 0.0).is_err());
        assert!(MgParams::new(0.05_f64, 1.0, -1.0, 1.5, 0.0, 0.0).is_ok());
    }

    #[test]
    fn map_values_at_reference_point() {
        // alpha = 2, y = ln 2, lambda = 2, mu = -3:
        // zeta^2 = e^{-2 ln 2 * 1/2} = 1/2, rho*zeta = 2^{-1/2}, r = 1 - 3 = -2
        let v = vol_coeff_map(2.0_f64, 2.0_f64.ln(), 2.0, -3.0).unwrap();
        assert!((v.zeta_sq - 0.5).abs() < 1e-15);
        assert!((v.rho_zeta - 0.5_f64.sqrt()).abs() < 1e-15);
        assert!((v.rate - (-2.0)).abs() < 1e-15);
    }

    #[test]
    fn map_is_identity_normalisation_at_alpha_three_halves() {
        let v = vol_coeff_map(1.5_f64, -0.7, 0.0, 0.03).unwrap();
        assert_eq!(v.zeta_sq, 1.0);
        assert_eq!(v.rho_zeta, 1.0);
        assert_eq!(v.rate, 0.03);
    }

    #[test]
    fn derived_params_have_unit_correlation_magnitude() {
        for &(alpha, y) in &[(2.0_f64, 0.4), (0.3, -1.2), (1.5, 2.0), (-1.0, 0.9)] {
            let p = MgParams::from_vol_coeff(alpha, y, 0.5, 0.02, RhoSign::Plus).unwrap();
            assert!((p.rho.abs() - 1.0).abs() < 1e-12, "rho = {}", p.rho);
            let m = MgParams::from_vol_coeff(alpha, y, 0.5, 0.02, RhoSign::Minus).unwrap();
            assert_eq!(m.rho, -p.rho);
        }
    }

    #[test]
    fn map_rejects_overflowing_normalisation() {
        assert!(matches!(
            vol_coeff_map(-400.0_f64, 3.0, 0.0, 0.0),
            Err(Error::SingularParameter(_))
        ));
    }
}
