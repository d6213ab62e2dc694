//! Generating bubbles on a reference element [0, h] and the upwinded test
//! basis g_i = φ_i + B_i − B_{i+1} built from them.
//!
//! A bubble is characterised by its average b = (1/h)∫B and its energy scale
//! b_e = h∫(B′)². Only b enters the UPG stiffness matrix; b_e appears in the
//! discrete optimal norm.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::Mesh1D;
use crate::quadrature::{self, LayerSide};

/// Quadrature order for moments of user-supplied bubbles.
pub const CUSTOM_MOMENT_ORDER: usize = 20;

type BubbleFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BubbleKind {
    Quadratic,
    ScaledQuadratic,
    Exponential,
    Custom,
}

#[derive(Clone)]
enum Shape {
    /// (4β/h²)·x(h − x)
    Parabola { beta: f64 },
    /// (1 − e^{−x/ε})/(1 − e^{−h/ε}) − x/h
    Exponential { eps: f64, denom: f64 },
    Custom {
        value: BubbleFn,
        derivative: BubbleFn,
    },
}

/// A generating bubble B on [0, h] with its moments.
#[derive(Clone)]
pub struct BubbleSpec {
    kind: BubbleKind,
    h: f64,
    eps: Option<f64>,
    shape: Shape,
    average: f64,
    energy: f64,
}

/// coth(z) − 1/z, evaluated without cancellation for small z.
pub(crate) fn langevin(z: f64) -> f64 {
    if z < 0.1 {
        let z2 = z * z;
        z * (1.0 / 3.0
            + z2 * (-1.0 / 45.0 + z2 * (2.0 / 945.0 + z2 * (-1.0 / 4725.0 + z2 * 2.0 / 93555.0))))
    } else {
        1.0 / z.tanh() - 1.0 / z
    }
}

/// t₀ = tanh(h / (2ε)).
pub fn t0(eps: f64, h: f64) -> f64 {
    (h / (2.0 * eps)).tanh()
}

/// Average of the exponential bubble, b = 1/(2t₀) − ε/h.
pub fn exponential_average(eps: f64, h: f64) -> f64 {
    0.5 * langevin(h / (2.0 * eps))
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive, got {v:e}"
        )))
    }
}

impl BubbleSpec {
    /// B = 4(x/h)(1 − x/h), with b = 2/3 and b_e = 16/3.
    pub fn quadratic(h: f64) -> Result<Self> {
        check_positive("h", h)?;
        Ok(Self::parabola(BubbleKind::Quadratic, h, None, 1.0))
    }

    /// Quadratic bubble scaled to the exponential bubble's average:
    /// β = (3/2)(1/(2t₀) − ε/h).
    pub fn scaled_quadratic(eps: f64, h: f64) -> Result<Self> {
        check_positive("eps", eps)?;
        check_positive("h", h)?;
        let beta = 1.5 * exponential_average(eps, h);
        if !(beta > 0.0) {
            return Err(Error::NonPositiveAverage(2.0 * beta / 3.0));
        }
        Ok(Self::parabola(
            BubbleKind::ScaledQuadratic,
            h,
            Some(eps),
            beta,
        ))
    }

    /// Quadratic bubble with a prescribed average b (β = 3b/2).
    pub fn quadratic_with_average(h: f64, average: f64) -> Result<Self> {
        check_positive("h", h)?;
        if !(average > 0.0) {
            return Err(Error::NonPositiveAverage(average));
        }
        Ok(Self::parabola(
            BubbleKind::ScaledQuadratic,
            h,
            None,
            1.5 * average,
        ))
    }

    /// Quadratic bubble with b = 1/2 − ε/h, which zeroes the upper diagonal
    /// of the UPG matrix.
    pub fn forward_solve(eps: f64, h: f64) -> Result<Self> {
        check_positive("h", h)?;
        if !(eps >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must be >= 0, got {eps:e}"
            )));
        }
        let mut b = Self::quadratic_with_average(h, 0.5 - eps / h)?;
        b.eps = Some(eps);
        Ok(b)
    }

    /// The ε/h → 0 limit of the scaled quadratic bubble, 3(x/h)(1 − x/h).
    pub fn limit_quadratic(h: f64) -> Result<Self> {
        check_positive("h", h)?;
        Ok(Self::parabola(
            BubbleKind::ScaledQuadratic,
            h,
            Some(0.0),
            0.75,
        ))
    }

    fn parabola(kind: BubbleKind, h: f64, eps: Option<f64>, beta: f64) -> Self {
        Self {
            kind,
            h,
            eps,
            shape: Shape::Parabola { beta },
            average: 2.0 * beta / 3.0,
            energy: 16.0 * beta * beta / 3.0,
        }
    }

    /// B(x) = (1 − e^{−x/ε})/(1 − e^{−h/ε}) − x/h.
    pub fn exponential(eps: f64, h: f64) -> Result<Self> {
        check_positive("eps", eps)?;
        check_positive("h", h)?;
        let z = h / (2.0 * eps);
        let l = langevin(z);
        Ok(Self {
            kind: BubbleKind::Exponential,
            h,
            eps: Some(eps),
            shape: Shape::Exponential {
                eps,
                denom: -(-h / eps).exp_m1(),
            },
            average: 0.5 * l,
            // h∫(B′)² = h/(2ε t₀) − 1 = z·coth(z) − 1
            energy: z * l,
        })
    }

    /// User-supplied bubble; the derivative is approximated by a fourth-order
    /// central difference.
    pub fn custom<F>(h: f64, value: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let value: BubbleFn = Arc::new(value);
        let v = value.clone();
        let d = 1e-3 * h;
        let derivative: BubbleFn = Arc::new(move |x| {
            (-v(x + 2.0 * d) + 8.0 * v(x + d) - 8.0 * v(x - d) + v(x - 2.0 * d)) / (12.0 * d)
        });
        Self::custom_parts(h, value, derivative)
    }

    pub fn custom_with_derivative<F, G>(h: f64, value: F, derivative: G) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::custom_parts(h, Arc::new(value), Arc::new(derivative))
    }

    fn custom_parts(h: f64, value: BubbleFn, derivative: BubbleFn) -> Result<Self> {
        check_positive("h", h)?;
        let left = value(0.0);
        let right = value(h);
        let scale = (0..=16)
            .map(|k| value(h * k as f64 / 16.0).abs())
            .fold(1.0, f64::max);
        if left.abs() > 1e-12 * scale || right.abs() > 1e-12 * scale {
            return Err(Error::BubbleBoundary { left, right });
        }
        let average = quadrature::gauss_quad(|x| value(x), 0.0, h, CUSTOM_MOMENT_ORDER) / h;
        if !(average > 0.0) {
            return Err(Error::NonPositiveAverage(average));
        }
        let energy = h * quadrature::gauss_quad(
            |x| {
                let d = derivative(x);
                d * d
            },
            0.0,
            h,
            CUSTOM_MOMENT_ORDER,
        );
        Ok(Self {
            kind: BubbleKind::Custom,
            h,
            eps: None,
            shape: Shape::Custom { value, derivative },
            average,
            energy,
        })
    }

    pub fn kind(&self) -> BubbleKind {
        self.kind
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn eps(&self) -> Option<f64> {
        self.eps
    }

    /// Scale β of a parabolic bubble (1 for the plain quadratic).
    pub fn beta(&self) -> Option<f64> {
        match self.shape {
            Shape::Parabola { beta } => Some(beta),
            _ => None,
        }
    }

    /// b = (1/h)∫₀^h B.
    pub fn average(&self) -> f64 {
        self.average
    }

    /// b_e = h∫₀^h (B′)².
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Whether b ≥ 1/π, the hypothesis of the optimal-norm error estimate.
    pub fn meets_error_estimate_hypothesis(&self) -> bool {
        self.average >= 1.0 / std::f64::consts::PI
    }

    /// Width of a thin layer at the element start, if the bubble has one.
    pub fn layer_width(&self) -> Option<f64> {
        match self.shape {
            Shape::Exponential { eps, .. } if eps < 0.25 * self.h => Some(eps),
            _ => None,
        }
    }

    /// B(x) for x in [0, h]; zero outside.
    pub fn eval(&self, x: f64) -> f64 {
        if !(0.0..=self.h).contains(&x) {
            return 0.0;
        }
        match &self.shape {
            Shape::Parabola { beta } => 4.0 * beta / (self.h * self.h) * x * (self.h - x),
            Shape::Exponential { eps, denom } => -(-x / eps).exp_m1() / denom - x / self.h,
            Shape::Custom { value, .. } => value(x),
        }
    }

    /// B′(x) for x in [0, h]; zero outside.
    pub fn derivative(&self, x: f64) -> f64 {
        if !(0.0..=self.h).contains(&x) {
            return 0.0;
        }
        match &self.shape {
            Shape::Parabola { beta } => 4.0 * beta / (self.h * self.h) * (self.h - 2.0 * x),
            Shape::Exponential { eps, denom } => (-x / eps).exp() / (eps * denom) - 1.0 / self.h,
            Shape::Custom { derivative, .. } => derivative(x),
        }
    }

    /// ∫₀^h g(x)·B(x) dx, graded toward the layer of an exponential bubble.
    pub fn weighted_integral<F: Fn(f64) -> f64>(&self, g: F, order: usize) -> f64 {
        let integrand = |x: f64| g(x) * self.eval(x);
        match self.layer_width() {
            Some(w) => quadrature::graded(integrand, 0.0, self.h, order, LayerSide::Start, w),
            None => quadrature::gauss_quad(integrand, 0.0, self.h, order),
        }
    }
}

impl fmt::Debug for BubbleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BubbleSpec")
            .field("kind", &self.kind)
            .field("h", &self.h)
            .field("eps", &self.eps)
            .field("beta", &self.beta())
            .field("average", &self.average)
            .field("energy", &self.energy)
            .finish()
    }
}

/// Upwinded test function g_i = φ_i + B_i − B_{i+1}.
#[derive(Debug, Clone)]
pub struct TestFunction {
    mesh: Mesh1D,
    bubble: BubbleSpec,
    index: usize,
}

impl TestFunction {
    pub fn new(mesh: &Mesh1D, bubble: &BubbleSpec, index: usize) -> Result<Self> {
        if index == 0 || index >= mesh.n() {
            return Err(Error::IndexOutOfRange {
                index,
                max: mesh.n() - 1,
            });
        }
        if (bubble.h() - mesh.h()).abs() > 1e-12 * mesh.h() {
            return Err(Error::InvalidParameter(format!(
                "bubble built for h = {} used on a mesh with h = {}",
                bubble.h(),
                mesh.h()
            )));
        }
        Ok(Self {
            mesh: mesh.clone(),
            bubble: bubble.clone(),
            index,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// g_i(x).
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.index;
        let left = self.mesh.node(i - 1);
        let mid = self.mesh.node(i);
        let right = self.mesh.node(i + 1);
        let hat = self.mesh.hat_any(i, x);
        let bubble = if (left..=mid).contains(&x) {
            self.bubble.eval(x - left)
        } else if x > mid && x <= right {
            -self.bubble.eval(x - mid)
        } else {
            0.0
        };
        hat + bubble
    }
}
