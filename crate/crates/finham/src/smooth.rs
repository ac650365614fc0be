//! Analytic function bundles: a value closure together with the exact
//! derivatives the operators need. These drive the analytic-derivative mode
//! of every check, where discretization error must not appear.

use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::real::Real;

type Fn1<T> = Rc<dyn Fn(T) -> T>;
type Fn2<T> = Rc<dyn Fn(T, T) -> T>;

/// Scalar function of x with first and second derivatives.
#[derive(Clone)]
pub struct Smooth1<T> {
    f: Fn1<T>,
    d1: Fn1<T>,
    d2: Fn1<T>,
}

impl<T: Real> Smooth1<T> {
    pub fn new(
        f: impl Fn(T) -> T + 'static,
        d1: impl Fn(T) -> T + 'static,
        d2: impl Fn(T) -> T + 'static,
    ) -> Self {
        Smooth1 {
            f: Rc::new(f),
            d1: Rc::new(d1),
            d2: Rc::new(d2),
        }
    }

    pub fn constant(c: T) -> Self {
        Smooth1::new(move |_| c, |_| T::zero(), |_| T::zero())
    }

    /// x -> e^{a x}
    pub fn exp_scaled(a: T) -> Self {
        Smooth1::new(
            move |x| (a * x).exp(),
            move |x| a * (a * x).exp(),
            move |x| a * a * (a * x).exp(),
        )
    }

    /// The identity x -> x.
    pub fn coordinate() -> Self {
        Smooth1::new(|x| x, |_| T::one(), |_| T::zero())
    }

    pub fn eval(&self, x: T) -> T {
        (self.f)(x)
    }

    pub fn deriv1(&self, x: T) -> T {
        (self.d1)(x)
    }

    pub fn deriv2(&self, x: T) -> T {
        (self.d2)(x)
    }

    /// e^{omega * theta(x)} * f(x) with product-rule derivatives. Used by the
    /// exact conjugation route, so no finite differences enter.
    pub fn gauge_product(theta: &Smooth1<T>, omega: T, f: &Smooth1<T>) -> Smooth1<T> {
        let (t, t1, t2) = (theta.f.clone(), theta.d1.clone(), theta.d2.clone());
        let (g, g1, g2) = (f.f.clone(), f.d1.clone(), f.d2.clone());
        let value = {
            let (t, g) = (t.clone(), g.clone());
            move |x| (omega * t(x)).exp() * g(x)
        };
        let first = {
            let (t, t1, g, g1) = (t.clone(), t1.clone(), g.clone(), g1.clone());
            move |x| (omega * t(x)).exp() * (omega * t1(x) * g(x) + g1(x))
        };
        let second = move |x| {
            let u = (omega * t(x)).exp();
            let (p, q) = (t1(x), t2(x));
            u * (omega * omega * p * p * g(x)
                + omega * q * g(x)
                + (T::one() + T::one()) * omega * p * g1(x)
                + g2(x))
        };
        Smooth1::new(value, first, second)
    }
}

/// Scalar function of (x, y) with the partials up to the mixed second order.
#[derive(Clone)]
pub struct Smooth2<T> {
    f: Fn2<T>,
    dx: Fn2<T>,
    dy: Fn2<T>,
    dxx: Fn2<T>,
    dyy: Fn2<T>,
    dxy: Fn2<T>,
}

impl<T: Real> Smooth2<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        f: impl Fn(T, T) -> T + 'static,
        dx: impl Fn(T, T) -> T + 'static,
        dy: impl Fn(T, T) -> T + 'static,
        dxx: impl Fn(T, T) -> T + 'static,
        dyy: impl Fn(T, T) -> T + 'static,
        dxy: impl Fn(T, T) -> T + 'static,
    ) -> Self {
        Smooth2 {
            f: Rc::new(f),
            dx: Rc::new(dx),
            dy: Rc::new(dy),
            dxx: Rc::new(dxx),
            dyy: Rc::new(dyy),
            dxy: Rc::new(dxy),
        }
    }

    /// (x, y) -> e^{a x + b y}
    pub fn exp_linear(a: T, b: T) -> Self {
        let e = move |x: T, y: T| (a * x + b * y).exp();
        Smooth2::new(
            e,
            move |x, y| a * e(x, y),
            move |x, y| b * e(x, y),
            move |x, y| a * a * e(x, y),
            move |x, y| b * b * e(x, y),
            move |x, y| a * b * e(x, y),
        )
    }

    pub fn eval(&self, x: T, y: T) -> T {
        (self.f)(x, y)
    }

    pub fn dx(&self, x: T, y: T) -> T {
        (self.dx)(x, y)
    }

    pub fn dy(&self, x: T, y: T) -> T {
        (self.dy)(x, y)
    }

    pub fn dxx(&self, x: T, y: T) -> T {
        (self.dxx)(x, y)
    }

    pub fn dyy(&self, x: T, y: T) -> T {
        (self.dyy)(x, y)
    }

    pub fn dxy(&self, x: T, y: T) -> T {
        (self.dxy)(x, y)
    }

    /// Seeded random band-limited field: a sum of `terms` products
    /// amp * sin(kx x + px) * sin(ky y + py) with wavenumbers below 2.
    /// Smooth, bounded, and exactly differentiable, which makes it the probe
    /// family for operator-identity checks.
    pub fn random_trig(seed: u64, terms: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = Vec::with_capacity(terms);
        for _ in 0..terms.max(1) {
            let amp = rng.random_range(-1.0..1.0_f64) / terms.max(1) as f64;
            let kx = rng.random_range(0.3..2.0_f64);
            let ky = rng.random_range(0.3..2.0_f64);
            let px = rng.random_range(0.0..6.283_f64);
            let py = rng.random_range(0.0..6.283_f64);
            coeffs.push((amp, kx, ky, px, py));
        }
        let c = Rc::new(coeffs);
        let term_sum = move |c: &[(f64, f64, f64, f64, f64)],
                             x: T,
                             y: T,
                             part: fn(T, T, T, T, T, T) -> T| {
            c.iter().fold(T::zero(), |acc, &(a, kx, ky, px, py)| {
                let (a, kx, ky, px, py) = (T::of(a), T::of(kx), T::of(ky), T::of(px), T::of(py));
                acc + part(a, kx * x + px, ky * y + py, kx, ky, T::zero())
            })
        };
        let mk = |part: fn(T, T, T, T, T, T) -> T, c: Rc<Vec<(f64, f64, f64, f64, f64)>>| {
            let term_sum = term_sum;
            move |x: T, y: T| term_sum(&c, x, y, part)
        };
        Smooth2 {
            f: Rc::new(mk(|a, u, v, _, _, _| a * u.sin() * v.sin(), c.clone())),
            dx: Rc::new(mk(|a, u, v, kx, _, _| a * kx * u.cos() * v.sin(), c.clone())),
            dy: Rc::new(mk(|a, u, v, _, ky, _| a * ky * u.sin() * v.cos(), c.clone())),
            dxx: Rc::new(mk(
                |a, u, v, kx, _, _| -(a * kx * kx * u.sin() * v.sin()),
                c.clone(),
            )),
            dyy: Rc::new(mk(
                |a, u, v, _, ky, _| -(a * ky * ky * u.sin() * v.sin()),
                c.clone(),
            )),
            dxy: Rc::new(mk(|a, u, v, kx, ky, _| a * kx * ky * u.cos() * v.cos(), c)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauge_product_derivatives_match_finite_differences() {
        let direct = |x: f64| (0.3 * x * x).exp() * (0.7 * x).exp();
        let theta = Smooth1::new(|x: f64| x * x, |x| 2.0 * x, |_| 2.0);
        let f = Smooth1::exp_scaled(0.7);
        let g = Smooth1::gauge_product(&theta, 0.3, &f);
        let h = 1e-5;
        for &x in &[-0.8, 0.1, 0.9] {
            let d1_num = (direct(x + h) - direct(x - h)) / (2.0 * h);
            let d2_num = (direct(x + h) - 2.0 * direct(x) + direct(x - h)) / (h * h);
            assert!((g.eval(x) - direct(x)).abs() < 1e-14);
            assert!((g.deriv1(x) - d1_num).abs() < 1e-7, "first derivative at {x}");
            assert!(
                (g.deriv2(x) - d2_num).abs() < 1e-4 * d2_num.abs().max(1.0),
                "second derivative at {x}"
            );
        }
    }

    #[test]
    fn random_trig_partials_match_finite_differences() {
        let s: Smooth2<f64> = Smooth2::random_trig(42, 6);
        let (x, y) = (0.37, -0.61);
        let h = 1e-5;
        let dx_num = (s.eval(x + h, y) - s.eval(x - h, y)) / (2.0 * h);
        let dy_num = (s.eval(x, y + h) - s.eval(x, y - h)) / (2.0 * h);
        let dxy_num = (s.eval(x + h, y + h) - s.eval(x + h, y - h) - s.eval(x - h, y + h)
            + s.eval(x - h, y - h))
            / (4.0 * h * h);
        assert!((s.dx(x, y) - dx_num).abs() < 1e-8);
        assert!((s.dy(x, y) - dy_num).abs() < 1e-8);
        assert!((s.dxy(x, y) - dxy_num).abs() < 1e-5);
    }

    #[test]
    fn random_trig_is_seed_deterministic() {
        let a: Smooth2<f64> = Smooth2::random_trig(7, 5);
        let b: Smooth2<f64> = Smooth2::random_trig(7, 5);
        assert_eq!(a.eval(0.3, 0.4), b.eval(0.3, 0.4));
    }
}
