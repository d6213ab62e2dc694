//! Gauss–Legendre quadrature.
//!
//! Rules are computed once per order by Newton iteration on the Legendre
//! recurrence and cached for the lifetime of the process.

use std::sync::OnceLock;

/// Largest supported rule order.
pub const MAX_ORDER: usize = 64;

/// Quadrature order used for element integrals throughout the crate.
pub const DEFAULT_ORDER: usize = 10;

/// Nodes and weights on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    fn compute(order: usize) -> Self {
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let nf = order as f64;
        for i in 0..order.div_ceil(2) {
            // Tricomi initial guess for the i-th root
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Apply the rule on [a, b].
    pub fn integrate<F: Fn(f64) -> f64>(&self, g: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * g(mid + half * t))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if order == 0 { 1.0 } else { p1 };
    let dp = order as f64 * (x * p - p0) / (x * x - 1.0);
    (p, dp)
}

/// Cached Gauss–Legendre rule with `order` points.
///
/// Panics if `order` is zero or larger than [`MAX_ORDER`].
pub fn rule(order: usize) -> &'static GaussRule {
    static RULES: [OnceLock<GaussRule>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];
    assert!(
        (1..=MAX_ORDER).contains(&order),
        "quadrature order {order} outside 1..={MAX_ORDER}"
    );
    RULES[order].get_or_init(|| GaussRule::compute(order))
}

/// Gauss–Legendre approximation of the integral of `g` over [a, b].
///
/// Exact for polynomials of degree at most `2 * order - 1`.
pub fn gauss_quad<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, order: usize) -> f64 {
    rule(order).integrate(g, a, b)
}

/// Composite Gauss rule on `panels` equal subintervals of [a, b].
pub fn composite<F: Fn(f64) -> f64>(g: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let panels = panels.max(1);
    let r = rule(order);
    let step = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + k as f64 * step;
            let hi = if k + 1 == panels { b } else { lo + step };
            r.integrate(&g, lo, hi)
        })
        .sum()
}

/// Which end of an interval carries a thin layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerSide {
    Start,
    End,
}

/// Gauss rule on [a, b] with panels graded geometrically toward a layer of
/// width `width` at one end. Falls back to a single panel when the layer is
/// not thin relative to the interval.
pub fn graded<F: Fn(f64) -> f64>(
    g: F,
    a: f64,
    b: f64,
    order: usize,
    side: LayerSide,
    width: f64,
) -> f64 {
    let len = b - a;
    if len <= 0.0 {
        return 0.0;
    }
    if !(width > 0.0) || width >= 0.25 * len {
        return gauss_quad(g, a, b, order);
    }
    let r = rule(order);
    let mut total = 0.0;
    let mut lo_offset = 0.0;
    let mut hi_offset = width;
    loop {
        let hi_clamped = hi_offset.min(len);
        let (lo, hi) = match side {
            LayerSide::Start => (a + lo_offset, a + hi_clamped),
            LayerSide::End => (b - hi_clamped, b - lo_offset),
        };
        total += r.integrate(&g, lo, hi);
        if hi_clamped >= len {
            break;
        }
        lo_offset = hi_clamped;
        hi_offset = hi_clamped * 2.0;
    }
    total
}
