//! Structured right-hand sides f for the 1D and 2D model problems.
//!
//! Keeping f symbolic (rather than only as a closure) gives analytic fast
//! paths for constant data and closed-form exact solutions of
//! −εu″ + u′ = f for every family used by the experiments.

use std::f64::consts::PI;

use crate::mesh::ScalarFn;

/// 1D forcing term.
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    Constant(f64),
    /// c₀ + c₁x + c₂x² + ...
    Polynomial(Vec<f64>),
    /// sin(kπx)
    SinPi(f64),
    /// cos(kπx)
    CosPi(f64),
    Sum(Vec<Forcing>),
}

impl Forcing {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Forcing::Constant(c) => *c,
            Forcing::Polynomial(c) => horner(c, x),
            Forcing::SinPi(k) => (k * PI * x).sin(),
            Forcing::CosPi(k) => (k * PI * x).cos(),
            Forcing::Sum(parts) => parts.iter().map(|p| p.eval(x)).sum(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Forcing::Constant(_) => 0.0,
            Forcing::Polynomial(c) => horner(&poly_derivative(c), x),
            Forcing::SinPi(k) => k * PI * (k * PI * x).cos(),
            Forcing::CosPi(k) => -k * PI * (k * PI * x).sin(),
            Forcing::Sum(parts) => parts.iter().map(|p| p.derivative(x)).sum(),
        }
    }

    /// ∫₀¹ f.
    pub fn mean(&self) -> f64 {
        match self {
            Forcing::Constant(c) => *c,
            Forcing::Polynomial(c) => c
                .iter()
                .enumerate()
                .map(|(i, a)| a / (i as f64 + 1.0))
                .sum(),
            Forcing::SinPi(k) => {
                if *k == 0.0 {
                    0.0
                } else {
                    (1.0 - (k * PI).cos()) / (k * PI)
                }
            }
            Forcing::CosPi(k) => {
                if *k == 0.0 {
                    1.0
                } else {
                    (k * PI).sin() / (k * PI)
                }
            }
            Forcing::Sum(parts) => parts.iter().map(Forcing::mean).sum(),
        }
    }

    /// w(x) = ∫₀^x f, in closed form.
    pub fn antiderivative(&self, x: f64) -> f64 {
        match self {
            Forcing::Constant(c) => c * x,
            Forcing::Polynomial(c) => horner(&poly_integral(c), x),
            Forcing::SinPi(k) => {
                if *k == 0.0 {
                    0.0
                } else {
                    (1.0 - (k * PI * x).cos()) / (k * PI)
                }
            }
            Forcing::CosPi(k) => {
                if *k == 0.0 {
                    x
                } else {
                    (k * PI * x).sin() / (k * PI)
                }
            }
            Forcing::Sum(parts) => parts.iter().map(|p| p.antiderivative(x)).sum(),
        }
    }

    /// f − ∫₀¹f, which has zero average.
    pub fn mean_free(&self) -> Forcing {
        Forcing::Sum(vec![self.clone(), Forcing::Constant(-self.mean())])
    }

    /// Upper bounds for (‖f‖_∞, ‖f′‖_∞), sampled on a fine grid for
    /// polynomials and sums.
    pub fn sup_norms(&self) -> (f64, f64) {
        match self {
            Forcing::Constant(c) => (c.abs(), 0.0),
            Forcing::SinPi(k) | Forcing::CosPi(k) if k.fract() == 0.0 && *k != 0.0 => {
                (1.0, k.abs() * PI)
            }
            _ => {
                let samples = 4096;
                (0..=samples).fold((0.0f64, 0.0f64), |(a, b), i| {
                    let x = i as f64 / samples as f64;
                    (a.max(self.eval(x).abs()), b.max(self.derivative(x).abs()))
                })
            }
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Forcing::Constant(c) => Some(*c),
            Forcing::Polynomial(c) if c.iter().skip(1).all(|&a| a == 0.0) => {
                Some(c.first().copied().unwrap_or(0.0))
            }
            _ => None,
        }
    }

    pub fn to_scalar_fn(&self) -> ScalarFn {
        if let Some(c) = self.as_constant() {
            return ScalarFn::constant(c);
        }
        let me = self.clone();
        let (a, b) = self.sup_norms();
        ScalarFn::new(move |x| me.eval(x)).with_sup_norms(a, b)
    }
}

pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub(crate) fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| i as f64 * c)
        .collect()
}

/// Antiderivative vanishing at 0.
pub(crate) fn poly_integral(coeffs: &[f64]) -> Vec<f64> {
    std::iter::once(0.0)
        .chain(coeffs.iter().enumerate().map(|(i, c)| c / (i as f64 + 1.0)))
        .collect()
}

/// 2D forcing term f(x, y).
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing2D {
    Constant(f64),
    /// f(x, y) = fx(x)·fy(y)
    Product(Forcing, Forcing),
}

impl Forcing2D {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Forcing2D::Constant(c) => *c,
            Forcing2D::Product(fx, fy) => fx.eval(x) * fy.eval(y),
        }
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Forcing2D::Constant(c) => Some(*c),
            Forcing2D::Product(fx, fy) => Some(fx.as_constant()? * fy.as_constant()?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::composite;

    #[test]
    fn means_match_quadrature() {
        let cases = [
            Forcing::Constant(2.5),
            Forcing::Polynomial(vec![0.0, 1.0, -1.0]),
            Forcing::SinPi(1.0),
            Forcing::CosPi(2.0),
            Forcing::Sum(vec![
                Forcing::Constant(1.0),
                Forcing::Polynomial(vec![0.0, 1.0]),
            ]),
        ];
        for f in cases {
            let q = composite(|x| f.eval(x), 0.0, 1.0, 8, 10);
            assert!((q - f.mean()).abs() < 1e-13, "{f:?}");
            let x = 0.37;
            let w = composite(|s| f.eval(s), 0.0, x, 8, 10);
            assert!((w - f.antiderivative(x)).abs() < 1e-13, "{f:?}");
            assert!(f.mean_free().mean().abs() < 1e-14);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let f = Forcing::Sum(vec![
            Forcing::SinPi(1.0),
            Forcing::Polynomial(vec![1.0, -2.0, 3.0]),
        ]);
        let d = 1e-6;
        for &x in &[0.1, 0.5, 0.9] {
            let fd = (f.eval(x + d) - f.eval(x - d)) / (2.0 * d);
            assert!((fd - f.derivative(x)).abs() < 1e-8);
        }
    }

    #[test]
    fn sup_norms() {
        assert_eq!(Forcing::SinPi(1.0).sup_norms(), (1.0, PI));
        let (a, b) = Forcing::Polynomial(vec![0.0, 1.0, -1.0]).sup_norms();
        assert!((a - 0.25).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
    }
}
