//! Discrete optimal norms, error measures and oscillation diagnostics.

use crate::error::{Error, Result};
use crate::mesh::{NodalField1D, P1Function, ScalarFn};
use crate::quadrature::{self, LayerSide, DEFAULT_ORDER};

/// Negative radicands down to this size are rounding noise and clamp to 0.
pub const RADICAND_CLAMP: f64 = 1e-14;

/// Which discrete optimal trial norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormVariant {
    /// ε²|u|² + |u|²_{*,h}
    Sl { eps: f64 },
    /// (ε + hb)²/(1 + b_e)·|u|² + |u|²_{*,h}/(1 + b_e)
    Upg { b: f64, b_e: f64, eps: f64, h: f64 },
    /// ε²|u|² + ‖u − ū‖²
    Spls { eps: f64 },
}

/// A closed subinterval [a, b] of [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub a: f64,
    pub b: f64,
}

impl Window {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(0.0 <= a && a < b && b <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "window [{a}, {b}] not inside [0, 1]"
            )));
        }
        Ok(Self { a, b })
    }

    pub fn full() -> Self {
        Self { a: 0.0, b: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscReport {
    pub sign_changes: usize,
    pub teeth_amplitude: f64,
    pub max_jump: f64,
}

fn clamp_sqrt(radicand: f64) -> Result<f64> {
    if radicand >= 0.0 {
        Ok(radicand.sqrt())
    } else if radicand >= -RADICAND_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::NegativeRadicand(radicand))
    }
}

fn element_averages(u: &NodalField1D) -> Vec<f64> {
    let full = u.full_values();
    full.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// |u|_{*,h}² = (1/n)Σ(element averages)² − (∫u)².
pub fn star_seminorm(u: &NodalField1D) -> Result<f64> {
    let avg = element_averages(u);
    let n = avg.len() as f64;
    let mean = avg.iter().sum::<f64>() / n;
    let sq = avg.iter().map(|a| a * a).sum::<f64>() / n;
    clamp_sqrt(sq - mean * mean)
}

/// |u|²_{H¹} of the piecewise-linear field.
pub fn h1_seminorm_sq(u: &NodalField1D) -> f64 {
    let h = u.mesh().h();
    u.full_values()
        .windows(2)
        .map(|w| (w[1] - w[0]).powi(2) / h)
        .sum()
}

/// ∫ g over [a, b], graded toward x = 1 when `g` carries a layer width.
fn integrate_fn<G: Fn(f64) -> f64>(g: G, a: f64, b: f64, layer: Option<f64>) -> f64 {
    match layer {
        Some(w) => quadrature::graded(g, a, b, DEFAULT_ORDER, LayerSide::End, w),
        None => quadrature::gauss_quad(g, a, b, DEFAULT_ORDER),
    }
}

enum TSource {
    /// Nodal values and ∫₀^{x_k} u at every node.
    Nodal {
        p1: P1Function,
        cumulative: Vec<f64>,
    },
    General {
        u: ScalarFn,
        panels: usize,
    },
}

/// Tu(x) = x·ū − ∫₀ˣ u, together with |Tu|² = ‖u‖² − ū².
pub struct AppliedT {
    mean: f64,
    seminorm_sq: f64,
    source: TSource,
}

impl AppliedT {
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// |Tu|, the H¹ seminorm.
    pub fn seminorm(&self) -> f64 {
        self.seminorm_sq.max(0.0).sqrt()
    }

    pub fn seminorm_sq(&self) -> f64 {
        self.seminorm_sq
    }

    pub fn eval(&self, x: f64) -> f64 {
        let integral = match &self.source {
            TSource::Nodal { p1, cumulative } => {
                let k = p1.mesh.locate(x);
                let (a, _) = p1.mesh.element(k);
                let s = x - a;
                let h = p1.mesh.h();
                let (u0, u1) = (p1.values[k - 1], p1.values[k]);
                cumulative[k - 1] + u0 * s + 0.5 * (u1 - u0) * s * s / h
            }
            TSource::General { u, panels } => {
                let m = ((*panels as f64) * x).ceil().max(1.0) as usize;
                quadrature::composite(|s| u.eval(s), 0.0, x, m, DEFAULT_ORDER)
            }
        };
        x * self.mean - integral
    }

    /// (Tu)′(x) = ū − u(x).
    pub fn derivative(&self, x: f64) -> f64 {
        match &self.source {
            TSource::Nodal { p1, .. } => self.mean - p1.eval(x),
            TSource::General { u, .. } => self.mean - u.eval(x),
        }
    }
}

/// T applied to a piecewise-linear field; the result is piecewise quadratic
/// and evaluated exactly.
pub fn apply_t(u: &NodalField1D) -> AppliedT {
    apply_t_p1(&u.to_p1())
}

pub fn apply_t_p1(p1: &P1Function) -> AppliedT {
    let h = p1.mesh.h();
    let mut cumulative = vec![0.0; p1.values.len()];
    for k in 1..p1.values.len() {
        cumulative[k] = cumulative[k - 1] + 0.5 * h * (p1.values[k - 1] + p1.values[k]);
    }
    let mean = *cumulative.last().unwrap_or(&0.0);
    let seminorm_sq = p1.l2_inner(p1) - mean * mean;
    AppliedT {
        mean,
        seminorm_sq,
        source: TSource::Nodal {
            p1: p1.clone(),
            cumulative,
        },
    }
}

/// T applied to a general function, integrals by composite Gauss.
pub fn apply_t_fn(u: &ScalarFn) -> AppliedT {
    if let Some(c) = u.constant {
        return AppliedT {
            mean: c,
            seminorm_sq: 0.0,
            source: TSource::General {
                u: u.clone(),
                panels: 1,
            },
        };
    }
    let panels = 64;
    let mut mean = 0.0;
    let mut sq = 0.0;
    for k in 0..panels {
        let (a, b) = (k as f64 / panels as f64, (k + 1) as f64 / panels as f64);
        mean += integrate_fn(|x| u.eval(x), a, b, u.layer_width);
        sq += integrate_fn(|x| u.eval(x).powi(2), a, b, u.layer_width);
    }
    AppliedT {
        mean,
        seminorm_sq: sq - mean * mean,
        source: TSource::General {
            u: u.clone(),
            panels,
        },
    }
}

pub fn star_norm(u: &NodalField1D, variant: NormVariant) -> Result<f64> {
    let grad = h1_seminorm_sq(u);
    match variant {
        NormVariant::Sl { eps } => {
            let s = star_seminorm(u)?;
            Ok((eps * eps * grad + s * s).sqrt())
        }
        NormVariant::Upg { b, b_e, eps, h } => {
            if !(b > 0.0 && b_e >= 0.0 && eps >= 0.0 && h > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "UPG norm needs b > 0, b_e >= 0, eps >= 0, h > 0 (b = {b}, b_e = {b_e}, eps = {eps}, h = {h})"
                )));
            }
            let s = star_seminorm(u)?;
            let c = eps + h * b;
            Ok(((c * c * grad + s * s) / (1.0 + b_e)).sqrt())
        }
        NormVariant::Spls { eps } => {
            let t = apply_t(u);
            Ok((eps * eps * grad + t.seminorm_sq().max(0.0)).sqrt())
        }
    }
}

/// max_j |u_h(x_j) − exact(x_j)| over interior nodes.
pub fn discrete_inf_error(u_h: &NodalField1D, exact: &ScalarFn) -> f64 {
    u_h.mesh()
        .interior_nodes()
        .iter()
        .zip(u_h.values())
        .map(|(&x, v)| (v - exact.eval(x)).abs())
        .fold(0.0, f64::max)
}

/// (‖u − u_h‖_{L²(w)}, |u − u_h|_{H¹(w)}).
pub fn windowed_errors(
    u_h: &NodalField1D,
    exact: &ScalarFn,
    exact_d: &ScalarFn,
    w: Window,
) -> (f64, f64) {
    windowed_errors_p1(&u_h.to_p1(), exact, exact_d, w)
}

/// As [`windowed_errors`] for a piecewise-linear function with arbitrary
/// boundary values. Elements are integrated with panels graded toward their
/// right end when `exact` declares a layer width.
pub fn windowed_errors_p1(
    u_h: &P1Function,
    exact: &ScalarFn,
    exact_d: &ScalarFn,
    w: Window,
) -> (f64, f64) {
    let mesh = &u_h.mesh;
    let h = mesh.h();
    let layer = exact.layer_width.or(exact_d.layer_width);
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for k in 1..=mesh.n() {
        let (a, b) = mesh.element(k);
        let (lo, hi) = (a.max(w.a), b.min(w.b));
        if hi <= lo {
            continue;
        }
        let (u0, u1) = (u_h.values[k - 1], u_h.values[k]);
        let slope = (u1 - u0) / h;
        l2 += integrate_fn(
            |x| (exact.eval(x) - (u0 + slope * (x - a))).powi(2),
            lo,
            hi,
            layer,
        );
        h1 += integrate_fn(|x| (exact_d.eval(x) - slope).powi(2), lo, hi, layer);
    }
    (l2.sqrt(), h1.sqrt())
}

/// |u_j − (u_{j−1} + u_{j+1})/2| at every interior node, boundary values zero.
pub fn teeth_profile(u_h: &NodalField1D) -> Vec<f64> {
    let full = u_h.full_values();
    full.windows(3)
        .map(|w| (w[1] - 0.5 * (w[0] + w[2])).abs())
        .collect()
}

pub fn oscillation_report(u_h: &NodalField1D) -> OscReport {
    let full = u_h.full_values();
    let diffs: Vec<f64> = full.windows(2).map(|w| w[1] - w[0]).collect();
    let mut sign_changes = 0;
    let mut last = 0.0f64;
    for &d in &diffs {
        if d != 0.0 {
            if last != 0.0 && d.signum() != last.signum() {
                sign_changes += 1;
            }
            last = d;
        }
    }
    OscReport {
        sign_changes,
        teeth_amplitude: teeth_profile(u_h).into_iter().fold(0.0, f64::max),
        max_jump: diffs.iter().fold(0.0, |m: f64, d| m.max(d.abs())),
    }
}

/// c₀ = sqrt(1 + (h/(πε))²).
pub fn norm_equivalence_constant(eps: f64, h: f64) -> f64 {
    (1.0 + (h / (std::f64::consts::PI * eps)).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{interpolate, Mesh1D};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn field(n: usize, values: Vec<f64>) -> NodalField1D {
        NodalField1D::new(Mesh1D::new(n).unwrap(), values).unwrap()
    }

    #[test]
    fn teeth_saw_has_zero_seminorm() {
        for n in [2, 4, 8, 64, 100] {
            let w = NodalField1D::teeth_saw(Mesh1D::new(n).unwrap());
            assert!(star_seminorm(&w).unwrap() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn central_hat_on_four_elements() {
        let u = field(4, vec![0.0, 1.0, 0.0]);
        assert!((star_seminorm(&u).unwrap() - 0.25).abs() < 1e-15);
        assert!((h1_seminorm_sq(&u) - 8.0).abs() < 1e-12);
        // ‖φ₂‖² = 2h/3, mean h
        let expected = (8.0 + 2.0 * 0.25 / 3.0 - 0.0625f64).sqrt();
        assert!((star_norm(&u, NormVariant::Spls { eps: 1.0 }).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn sl_norm_with_zero_eps_is_the_seminorm() {
        let u = field(5, vec![0.3, -1.0, 2.0, 0.5]);
        let a = star_norm(&u, NormVariant::Sl { eps: 0.0 }).unwrap();
        assert_eq!(a, star_seminorm(&u).unwrap());
    }

    #[test]
    fn upg_norm_of_teeth_saw() {
        let n = 8;
        let h = 1.0 / n as f64;
        let (b, b_e, eps) = (2.0 / 3.0, 4.0 / 3.0, 1e-3);
        let w = NodalField1D::teeth_saw(Mesh1D::new(n).unwrap());
        let v = star_norm(&w, NormVariant::Upg { b, b_e, eps, h }).unwrap();
        let expected = (eps + h * b).powi(2) / ((1.0 + b_e) * h * h);
        assert!((v * v - expected).abs() < 1e-12);
        assert!(v * v >= b * b / (1.0 + b_e));
    }

    #[test]
    fn negative_radicand_is_reported() {
        assert_eq!(clamp_sqrt(-1e-15).unwrap(), 0.0);
        assert!(matches!(
            clamp_sqrt(-1e-10),
            Err(Error::NegativeRadicand(_))
        ));
    }

    #[test]
    fn t_of_a_parabola() {
        let u = ScalarFn::new(|x| x * (1.0 - x));
        let t = apply_t_fn(&u);
        assert!((t.seminorm_sq() - 1.0 / 180.0).abs() < 1e-14);
        assert!(t.eval(0.0).abs() < 1e-15 && t.eval(1.0).abs() < 1e-14);
        let c = apply_t_fn(&ScalarFn::constant(3.0));
        assert_eq!(c.seminorm(), 0.0);
        assert!(c.eval(0.4).abs() < 1e-14);
    }

    #[test]
    fn t_of_piecewise_linear_vanishes_at_ends_and_is_quadratic() {
        let u = field(6, vec![0.4, -0.1, 0.9, 0.2, -0.7]);
        let t = apply_t(&u);
        assert!(t.eval(0.0).abs() < 1e-15);
        assert!(t.eval(1.0).abs() < 1e-14);
        // third differences vanish inside an element
        let (a, _) = u.mesh().element(3);
        let d = 0.01;
        let v: Vec<f64> = (0..4).map(|k| t.eval(a + 0.02 + k as f64 * d)).collect();
        assert!((v[3] - 3.0 * v[2] + 3.0 * v[1] - v[0]).abs() < 1e-14);
    }

    #[test]
    fn windowed_errors_vanish_for_linear_exact() {
        let mesh = Mesh1D::new(10).unwrap();
        let f = ScalarFn::new(|_| 0.0);
        let uh = interpolate(&mesh, &f);
        let (l2, h1) = windowed_errors(&uh, &f, &f, Window::new(0.1, 0.75).unwrap());
        assert_eq!((l2, h1), (0.0, 0.0));
    }

    #[test]
    fn discrete_inf_error_of_a_shift() {
        let mesh = Mesh1D::new(10).unwrap();
        let f = ScalarFn::new(|x| x * x);
        let uh = interpolate(&mesh, &f);
        assert_eq!(discrete_inf_error(&uh, &f), 0.0);
        let shifted =
            NodalField1D::new(mesh, uh.values().iter().map(|v| v + 0.25).collect()).unwrap();
        assert!((discrete_inf_error(&shifted, &f) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn oscillation_report_cases() {
        let mesh = Mesh1D::new(10).unwrap();
        let w = NodalField1D::teeth_saw(mesh.clone());
        let c = -0.3;
        let cw = w.combine(c, &w, 0.0);
        let r = oscillation_report(&cw);
        assert!((r.teeth_amplitude - 0.3).abs() < 1e-15);
        assert_eq!(r.sign_changes, 9);
        assert!((r.max_jump - 0.3).abs() < 1e-15);

        let mono = NodalField1D::new(mesh.clone(), (1..10).map(|j| j as f64).collect()).unwrap();
        assert_eq!(oscillation_report(&mono).sign_changes, 1);

        let parab = interpolate(&mesh, &ScalarFn::new(|x| x * (1.0 - x)));
        let r = oscillation_report(&parab);
        assert!((r.teeth_amplitude - 0.01).abs() < 1e-15);
        assert_eq!(r.sign_changes, 1);
    }

    #[test]
    fn inverse_inequalities_have_mesh_independent_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst = Vec::new();
        for n in [8usize, 32, 128] {
            let mesh = Mesh1D::new(n).unwrap();
            let h = mesh.h();
            let (mut c1, mut c2) = (0.0f64, 0.0f64);
            for _ in 0..1000 {
                let v: Vec<f64> = (1..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let u = NodalField1D::new(mesh.clone(), v).unwrap();
                let p = u.to_p1();
                let l2 = p.l2_inner(&p).sqrt();
                let inf = u.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
                c1 = c1.max(h * h1_seminorm_sq(&u).sqrt() / l2);
                c2 = c2.max(l2 / inf);
            }
            worst.push((c1, c2));
        }
        let (c1_8, c2_8) = worst[0];
        for &(c1, c2) in &worst[1..] {
            assert!(c1 <= 1.01 * c1_8, "{c1} vs {c1_8}");
            assert!(c2 <= 1.01 * c2_8, "{c2} vs {c2_8}");
        }
    }

    #[test]
    fn sampled_norm_equivalence_for_small_eps() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [8usize, 32] {
            let mesh = Mesh1D::new(n).unwrap();
            for eps in [1e-2, 1e-4, 1e-6] {
                let c0 = norm_equivalence_constant(eps, mesh.h());
                for _ in 0..200 {
                    let v: Vec<f64> = (1..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let u = NodalField1D::new(mesh.clone(), v).unwrap();
                    let cont = star_norm(&u, NormVariant::Spls { eps }).unwrap();
                    let disc = star_norm(&u, NormVariant::Sl { eps }).unwrap();
                    assert!(cont <= c0 * disc * (1.0 + 1e-12));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn seminorm_identity(values in prop::collection::vec(-10.0f64..10.0, 1..40)) {
            let n = values.len() + 1;
            let u = field(n, values);
            let s = star_seminorm(&u).unwrap();
            let avg = element_averages(&u);
            let lhs = s * s + u.to_p1().integral().powi(2);
            let rhs = avg.iter().map(|a| a * a).sum::<f64>() / n as f64;
            prop_assert!((lhs - rhs).abs() < 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn t_norm_identity_matches_quadrature(values in prop::collection::vec(-3.0f64..3.0, 1..20)) {
            let n = values.len() + 1;
            let u = field(n, values);
            let t = apply_t(&u);
            let mesh = u.mesh().clone();
            let direct: f64 = (1..=n)
                .map(|k| {
                    let (a, b) = mesh.element(k);
                    let d = 1e-3 * mesh.h();
                    let slope = |x: f64| (t.eval(x + d) - t.eval(x - d)) / (2.0 * d);
                    quadrature::gauss_quad(|x| slope(x).powi(2), a, b, 4)
                })
                .sum();
            prop_assert!((direct - t.seminorm_sq()).abs() < 1e-8 * t.seminorm_sq().max(1.0));
        }
    }
}
