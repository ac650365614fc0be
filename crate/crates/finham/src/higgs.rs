//! Quartic interaction potential of the price and volatility fields, its
//! vacuum, and the volatility mass term generated by expanding around a
//! nonzero vacuum.

use crate::error::{Error, Result};
use crate::grid::Field;
use crate::params::MgParams;
use crate::real::Real;

/// Coefficients of the second-order interaction potential
/// V = c_xyy phi_x phi_y^2 + c_xxy phi_x^2 phi_y + c_xxyy phi_x^2 phi_y^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialCoefficients<T> {
    pub c_xyy: T,
    pub c_xxy: T,
    pub c_xxyy: T,
}

pub fn potential_coefficients<T: Real>(params: &MgParams<T>, y: T) -> PotentialCoefficients<T> {
    let half = T::of(0.5);
    let ey = y.exp();
    let vol = params.zeta * params.zeta * half * (T::of(2.0) * y * (params.alpha - T::one())).exp();
    PotentialCoefficients {
        c_xyy: -(T::of(2.0)) * (params.r - ey * half),
        c_xxy: -(T::of(2.0)) * (params.lambda * (-y).exp() + params.mu - vol),
        c_xxyy: params.r,
    }
}

/// Ratio of the two cubic coefficients,
/// (lambda e^-y + mu - (zeta^2/2) e^{2y(alpha-1)}) / (r - e^y/2).
/// Exactly 1 for parameters produced by the volatility-coefficient
/// identification at the same level y.
pub fn vacuum_ratio<T: Real>(params: &MgParams<T>, y: T) -> Result<T> {
    let half = T::of(0.5);
    let ey = y.exp();
    let denom = params.r - ey * half;
    if denom.abs() <= T::of(1e-12) {
        return Err(Error::SingularParameter(format!(
            "cubic-coefficient ratio undefined: r - e^y/2 = {denom} at y = {y}"
        )));
    }
    let vol = params.zeta * params.zeta * half * (T::of(2.0) * y * (params.alpha - T::one())).exp();
    let numer = params.lambda * (-y).exp() + params.mu - vol;
    Ok(numer / denom)
}

/// The price-field vacuum and the inputs that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumSolution<T> {
    pub phi_vac: T,
    pub source_r: T,
    pub source_sigma_sq: T,
}

/// phi_vac = 1 - sigma^2/(2r), the stationary point of the potential in the
/// price direction. sigma^2 = 2r lands exactly on zero.
pub fn vacuum_price_only<T: Real>(sigma_sq: T, r: T) -> Result<VacuumSolution<T>> {
    if !sigma_sq.is_finite() || sigma_sq < T::zero() {
        return Err(Error::invalid(
            "sigma_sq",
            format!("must be finite and nonnegative, got {sigma_sq}"),
        ));
    }
    if !r.is_finite() {
        return Err(Error::invalid("r", format!("must be finite, got {r}")));
    }
    if r == T::zero() {
        return Err(Error::SingularParameter("vacuum undefined at r = 0".into()));
    }
    Ok(VacuumSolution {
        phi_vac: T::one() - sigma_sq / (T::of(2.0) * r),
        source_r: r,
        source_sigma_sq: sigma_sq,
    })
}

/// phi - phi_vac pointwise: the fluctuation field.
pub fn shift_field<T: Real>(phi: &Field<T>, vac: &VacuumSolution<T>) -> Field<T> {
    let v = vac.phi_vac;
    phi.map(|p| p - v)
}

/// The quadratic volatility term extracted at the vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassTerm<T> {
    pub coefficient: T,
    /// True exactly when the vacuum vanishes, i.e. sigma^2 = 2r.
    pub vanishes_at_hermiticity: bool,
}

/// Coefficient of phi_y^2 after the shift:
/// (-2(r - e^y/2) + r phi_vac) phi_vac, closed form -(2r - e^y)^2/(4r).
pub fn mass_coefficient<T: Real>(e_y: T, r: T) -> Result<MassTerm<T>> {
    let vac = vacuum_price_only(e_y, r)?;
    let phi = vac.phi_vac;
    let coefficient = (-(T::of(2.0)) * (r - e_y * T::of(0.5)) + r * phi) * phi;
    Ok(MassTerm { coefficient, vanishes_at_hermiticity: phi == T::zero() })
}

/// Coefficients of the potential restricted to the volatility-quadratic
/// sector after shifting the price field by its vacuum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumExpansion<T> {
    /// Coefficient of phi_y^2: the mass term.
    pub phi_y_sq: T,
    /// Coefficient of (fluctuation) phi_y^2: identically zero at the true
    /// vacuum.
    pub fluct_phi_y_sq: T,
    /// Coefficient of (fluctuation)^2 phi_y^2: the bare r.
    pub fluct_sq_phi_y_sq: T,
}

impl<T: Real> VacuumExpansion<T> {
    pub fn pairs(&self) -> [(&'static str, T); 3] {
        [
            ("phi_y_sq", self.phi_y_sq),
            ("fluct_phi_y_sq", self.fluct_phi_y_sq),
            ("fluct_sq_phi_y_sq", self.fluct_sq_phi_y_sq),
        ]
    }
}

/// Expands -2(r - e^y/2)(phi_vac + u) phi_y^2 + r (phi_vac + u)^2 phi_y^2 in
/// the fluctuation u and collects the three coefficients.
pub fn expand_potential_around_vacuum<T: Real>(e_y: T, r: T) -> Result<VacuumExpansion<T>> {
    let vac = vacuum_price_only(e_y, r)?;
    let phi = vac.phi_vac;
    let two = T::of(2.0);
    let cubic = -two * (r - e_y * T::of(0.5));
    Ok(VacuumExpansion {
        phi_y_sq: (cubic + r * phi) * phi,
        fluct_phi_y_sq: cubic + two * r * phi,
        fluct_sq_phi_y_sq: r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::RhoSign;

    #[test]
    fn cubic_coefficients_match_under_the_identification() {
        for &(alpha, y) in &[(1.5_f64, 0.0), (2.0, 0.4), (0.8, -0.7)] {
            let p = MgParams::from_vol_coeff(alpha, y, 0.5, 0.02, RhoSign::Plus).unwrap();
            let c = potential_coefficients(&p, y);
            assert!(
                (c.c_xyy - c.c_xxy).abs() <= 1e-12,
                "coefficients split at alpha = {alpha}, y = {y}: {} vs {}",
                c.c_xyy,
                c.c_xxy
            );
            assert_eq!(c.c_xxyy, p.r);
            assert_eq!(vacuum_ratio(&p, y).unwrap(), 1.0);
        }
    }

    #[test]
    fn cubic_price_coefficient_frozen_value() {
        // r = 0.05, e^y = 0.04: c_xyy = -2(0.05 - 0.02) = -0.06
        let p = MgParams::new(0.05_f64, 1.0, 0.0, 1.5, 0.0, 0.0).unwrap();
        let c = potential_coefficients(&p, 0.04_f64.ln());
        assert!((c.c_xyy - (-0.06)).abs() <= 1e-15, "got {}", c.c_xyy);
    }

    #[test]
    fn vacuum_ratio_singularity_and_zero_numerator() {
        // r = e^y/2 exactly
        let p = MgParams::new(0.5_f64, 1.0, 0.0, 1.5, 0.0, 0.0).unwrap();
        assert!(matches!(vacuum_ratio(&p, 0.0), Err(Error::SingularParameter(_))));
        // numerator lambda e^-y + mu - e^y/2 = 0 at y = 0, lambda = 0, mu = 0.5
        let q = MgParams::new(0.3_f64, 1.0, 0.0, 1.5, 0.0, 0.5).unwrap();
        assert_eq!(vacuum_ratio(&q, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn vacuum_values() {
        assert_eq!(vacuum_price_only(0.1_f64, 0.05).unwrap().phi_vac, 0.0);
        assert_eq!(vacuum_price_only(0.0_f64, 0.3).unwrap().phi_vac, 1.0);
        let v = vacuum_price_only(0.04_f64, 0.05).unwrap();
        assert!((v.phi_vac - 0.6).abs() <= 1e-15, "got {}", v.phi_vac);
        assert!(vacuum_price_only(0.04_f64, 0.0).is_err());
    }

    #[test]
    fn shift_is_exact_translation() {
        let g = crate::grid::Grid1D::new(0.0_f64, 1.0, 9).unwrap();
        let vac = vacuum_price_only(0.04_f64, 0.05).unwrap();
        let phi = Field::sample_1d(&g, |x| x + vac.phi_vac);
        let shifted = shift_field(&phi, &vac);
        for (i, x) in g.nodes().enumerate() {
            assert!((shifted.at1(i) - x).abs() <= 1e-15);
        }
        let back = shifted.map(|v| v + vac.phi_vac);
        for (a, b) in back.values().iter().zip(phi.values()) {
            assert!((a - b).abs() <= 1e-14);
        }
    }

    #[test]
    fn mass_coefficient_frozen_values_and_closed_form() {
        let m = mass_coefficient(0.04_f64, 0.05).unwrap();
        assert!((m.coefficient - (-0.018)).abs() <= 1e-15, "got {}", m.coefficient);
        assert!(!m.vanishes_at_hermiticity);

        let m2 = mass_coefficient(1.0_f64, 1.0).unwrap();
        assert!((m2.coefficient - (-0.25)).abs() <= 1e-15, "got {}", m2.coefficient);

        for &(e_y, r) in &[(0.3_f64, 0.07), (1.7, -0.4), (0.02, 0.9)] {
            let m = mass_coefficient(e_y, r).unwrap().coefficient;
            let closed = -(2.0 * r - e_y).powi(2) / (4.0 * r);
            assert!((m - closed).abs() <= 1e-12, "({e_y}, {r}): {m} vs {closed}");
        }
    }

    #[test]
    fn massless_locus_is_exact_and_three_way_equivalent() {
        for &r in &[0.05_f64, 0.3, -0.2, 1.0] {
            let e_y = 2.0 * r;
            if e_y < 0.0 {
                continue;
            }
            let vac = vacuum_price_only(e_y, r).unwrap();
            assert_eq!(vac.phi_vac, 0.0);
            let m = mass_coefficient(e_y, r).unwrap();
            assert_eq!(m.coefficient.abs(), 0.0);
            assert!(m.vanishes_at_hermiticity);
        }
        // off the locus everything is nonzero together
        for &(e_y, r) in &[(0.04_f64, 0.05), (1.0, 1.0), (0.5, -0.1)] {
            let vac = vacuum_price_only(e_y, r).unwrap();
            let m = mass_coefficient(e_y, r).unwrap();
            assert!(vac.phi_vac != 0.0 && m.coefficient != 0.0 && !m.vanishes_at_hermiticity);
        }
    }

    #[test]
    fn expansion_coefficients_frozen_point_and_vanishing_linear_term() {
        let e = expand_potential_around_vacuum(1.0_f64, 1.0).unwrap();
        assert!((e.phi_y_sq - (-0.25)).abs() <= 1e-15);
        assert_eq!(e.fluct_phi_y_sq, 0.0);
        assert_eq!(e.fluct_sq_phi_y_sq, 1.0);

        for k in 1..=20 {
            let e_y = 0.1 * k as f64;
            let r = 0.31 - 0.02 * k as f64;
            if r == 0.0 {
                continue;
            }
            let e = expand_potential_around_vacuum(e_y, r).unwrap();
            assert!(e.fluct_phi_y_sq.abs() <= 1e-13, "linear term {:e}", e.fluct_phi_y_sq);
            let m = mass_coefficient(e_y, r).unwrap();
            assert_eq!(e.phi_y_sq, m.coefficient);
        }
    }

    #[test]
    fn forced_massless_expansion() {
        let r = 0.07_f64;
        let e = expand_potential_around_vacuum(2.0 * r, r).unwrap();
        assert_eq!(e.phi_y_sq.abs(), 0.0);
        assert_eq!(e.fluct_phi_y_sq, 0.0);
        assert_eq!(e.fluct_sq_phi_y_sq, r);
    }
}
