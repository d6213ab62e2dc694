//! Independent reference computations: transport solutions, exact solutions
//! of the 1D model problem, its Green's function, L² projections, Poisson
//! solutions and closed-form interpolation energy errors.
//!
//! Every exponential is evaluated with a non-positive argument.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::forcing::{horner, poly_derivative, poly_integral, Forcing};
use crate::mesh::{Mesh1D, P1Function, ScalarFn};
use crate::p2::{self, P2Function};
use crate::quadrature::{self, DEFAULT_ORDER};

/// First-order transport problems attached to w′ = f.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportKind {
    /// w(x) = ∫₀^x f, inflow condition at x = 0.
    LeftToRight,
    /// θ(x) = w(x) − ∫₀¹ f, inflow condition at x = 1.
    RightToLeft,
    /// U(x) = w(x) − w(1)/2, the average of the two.
    Shifted,
}

/// ∫_a^b f by composite Gauss (order 10, panels no wider than 1/16),
/// exact for constants.
pub fn integrate(f: &ScalarFn, a: f64, b: f64) -> f64 {
    if let Some(c) = f.constant {
        return c * (b - a);
    }
    let panels = ((b - a).abs() * 16.0).ceil().max(1.0) as usize;
    quadrature::composite(|x| f.eval(x), a, b, panels, DEFAULT_ORDER)
}

pub fn transport(kind: TransportKind, f: &ScalarFn, x: f64) -> f64 {
    let w = integrate(f, 0.0, x);
    match kind {
        TransportKind::LeftToRight => w,
        TransportKind::RightToLeft => w - integrate(f, 0.0, 1.0),
        TransportKind::Shifted => w - 0.5 * integrate(f, 0.0, 1.0),
    }
}

/// Closed-form transport values for structured data.
pub fn transport_exact(kind: TransportKind, f: &Forcing, x: f64) -> f64 {
    let w = f.antiderivative(x);
    match kind {
        TransportKind::LeftToRight => w,
        TransportKind::RightToLeft => w - f.mean(),
        TransportKind::Shifted => w - 0.5 * f.mean(),
    }
}

/// Boundary-layer part (e^{(x−1)/ε} − e^{−1/ε})/(1 − e^{−1/ε}) of the
/// constant-data solution.
pub fn layer_profile(eps: f64, x: f64) -> f64 {
    let e1 = (-1.0 / eps).exp();
    (((x - 1.0) / eps).exp() - e1) / (1.0 - e1)
}

/// Exact solution of −εu″ + u′ = 1, u(0) = u(1) = 0:
/// u(x) = x − (e^{(x−1)/ε} − e^{−1/ε})/(1 − e^{−1/ε}).
pub fn exact_const_f(eps: f64, x: f64) -> f64 {
    x - layer_profile(eps, x)
}

pub fn exact_const_f_derivative(eps: f64, x: f64) -> f64 {
    1.0 - ((x - 1.0) / eps).exp() / (eps * -(-1.0 / eps).exp_m1())
}

/// Particular solution q of q′ − εq″ = f for one family of f.
#[derive(Debug, Clone, PartialEq)]
enum Particular {
    Poly(Vec<f64>),
    /// a·sin(ωx) + c·cos(ωx)
    Trig {
        a: f64,
        c: f64,
        omega: f64,
    },
}

impl Particular {
    fn value(&self, x: f64) -> f64 {
        match self {
            Particular::Poly(q) => horner(q, x),
            Particular::Trig { a, c, omega } => a * (omega * x).sin() + c * (omega * x).cos(),
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        match self {
            Particular::Poly(q) => horner(&poly_derivative(q), x),
            Particular::Trig { a, c, omega } => {
                omega * (a * (omega * x).cos() - c * (omega * x).sin())
            }
        }
    }

    fn second_derivative(&self, x: f64) -> f64 {
        match self {
            Particular::Poly(q) => horner(&poly_derivative(&poly_derivative(q)), x),
            Particular::Trig { a, c, omega } => {
                -omega * omega * (a * (omega * x).sin() + c * (omega * x).cos())
            }
        }
    }
}

fn particulars(f: &Forcing, eps: f64, out: &mut Vec<Particular>) {
    use std::f64::consts::PI;
    match f {
        Forcing::Constant(c) => out.push(Particular::Poly(vec![0.0, *c])),
        Forcing::Polynomial(p) => {
            // r = p + εp′ + ε²p″ + ..., q = ∫r
            let mut r = p.clone();
            let mut d = poly_derivative(p);
            let mut scale = eps;
            while !d.is_empty() {
                for (i, v) in d.iter().enumerate() {
                    r[i] += scale * v;
                }
                d = poly_derivative(&d);
                scale *= eps;
            }
            out.push(Particular::Poly(poly_integral(&r)));
        }
        Forcing::SinPi(k) | Forcing::CosPi(k) if *k == 0.0 => {
            let c = if matches!(f, Forcing::CosPi(_)) {
                1.0
            } else {
                0.0
            };
            out.push(Particular::Poly(vec![0.0, c]));
        }
        Forcing::SinPi(k) => {
            let omega = k * PI;
            let den = 1.0 + eps * eps * omega * omega;
            out.push(Particular::Trig {
                a: eps / den,
                c: -1.0 / (omega * den),
                omega,
            });
        }
        Forcing::CosPi(k) => {
            let omega = k * PI;
            let den = 1.0 + eps * eps * omega * omega;
            out.push(Particular::Trig {
                a: 1.0 / (omega * den),
                c: eps / den,
                omega,
            });
        }
        Forcing::Sum(parts) => {
            for p in parts {
                particulars(p, eps, out);
            }
        }
    }
}

/// Exact solution of −εu″ + u′ = f with homogeneous Dirichlet data, for
/// structured f:
/// u = q(x) − q(1) + (q(1) − q(0))·(1 − e^{(x−1)/ε})/(1 − e^{−1/ε}).
#[derive(Debug, Clone)]
pub struct ExactSolution {
    eps: f64,
    parts: Vec<Particular>,
    jump: f64,
    q1: f64,
    denom: f64,
}

impl ExactSolution {
    pub fn new(eps: f64, f: &Forcing) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must be positive, got {eps:e}"
            )));
        }
        let mut parts = Vec::new();
        particulars(f, eps, &mut parts);
        let q = |x: f64| parts.iter().map(|p| p.value(x)).sum::<f64>();
        let (q0, q1) = (q(0.0), q(1.0));
        Ok(Self {
            eps,
            jump: q1 - q0,
            q1,
            denom: -(-1.0 / eps).exp_m1(),
            parts,
        })
    }

    fn q(&self, x: f64) -> f64 {
        self.parts.iter().map(|p| p.value(x)).sum()
    }

    pub fn value(&self, x: f64) -> f64 {
        let layer = -((x - 1.0) / self.eps).exp_m1() / self.denom;
        self.q(x) - self.q1 + self.jump * layer
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let dq: f64 = self.parts.iter().map(|p| p.derivative(x)).sum();
        dq - self.jump * ((x - 1.0) / self.eps).exp() / (self.eps * self.denom)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let d2q: f64 = self.parts.iter().map(|p| p.second_derivative(x)).sum();
        d2q - self.jump * ((x - 1.0) / self.eps).exp() / (self.eps * self.eps * self.denom)
    }

    pub fn as_scalar_fn(&self) -> ScalarFn {
        let me = self.clone();
        ScalarFn::new(move |x| me.value(x)).with_layer(self.eps)
    }

    pub fn derivative_fn(&self) -> ScalarFn {
        let me = self.clone();
        ScalarFn::new(move |x| me.derivative(x)).with_layer(self.eps)
    }
}

/// Green's function of −εu″ + u′ on (0, 1) with Dirichlet data, so that
/// u(x) = ∫ G(x, s) f(s) ds.
pub fn greens(eps: f64, x: f64, s: f64) -> f64 {
    let e1 = (-1.0 / eps).exp();
    let denom = -(-1.0 / eps).exp_m1();
    if s < x {
        (-((x - 1.0) / eps).exp_m1()) * (-(-s / eps).exp_m1()) / denom
    } else {
        (((x - s) / eps).exp() - ((x - 1.0) / eps).exp() - (-s / eps).exp() + e1) / denom
    }
}

/// Dense matrix with entry (j, i) = G(x_j, x_i) over interior nodes.
pub fn inverse_via_greens(eps: f64, mesh: &Mesh1D) -> DMatrix<f64> {
    let x = mesh.interior_nodes();
    let m = x.len();
    DMatrix::from_fn(m, m, |j, i| greens(eps, x[j], x[i]))
}

/// Target subspaces of continuous piecewise-linear functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionTarget {
    /// M_h: zero boundary values.
    ZeroBoundary,
    /// M̄_h = {v − v̄ : v ∈ M_h}.
    MeanZero,
    /// M̃_h = M̄_h ⊕ span{1} = {v ∈ P1 : v(0) = v(1)}.
    EqualEnds,
}

/// Basis of a projection target as full nodal vectors.
pub fn target_basis(target: ProjectionTarget, mesh: &Mesh1D) -> Vec<P1Function> {
    let n = mesh.n();
    let hat = |i: usize| {
        let mut v = vec![0.0; n + 1];
        v[i] = 1.0;
        P1Function {
            mesh: mesh.clone(),
            values: v,
        }
    };
    let mut basis: Vec<P1Function> = (1..n).map(hat).collect();
    match target {
        ProjectionTarget::ZeroBoundary => {}
        ProjectionTarget::MeanZero => {
            for b in &mut basis {
                let mean = b.integral();
                *b = b.shifted(-mean);
            }
        }
        ProjectionTarget::EqualEnds => {
            let mut tie = vec![0.0; n + 1];
            tie[0] = 1.0;
            tie[n] = 1.0;
            basis.push(P1Function {
                mesh: mesh.clone(),
                values: tie,
            });
        }
    }
    basis
}

/// Per-element moments (∫ g·(1 − t), ∫ g·t) for t the local coordinate.
fn element_moments(g: &ScalarFn, mesh: &Mesh1D) -> Vec<(f64, f64)> {
    let h = mesh.h();
    (1..=mesh.n())
        .map(|k| {
            let (a, b) = mesh.element(k);
            if let Some(c) = g.constant {
                return (0.5 * c * h, 0.5 * c * h);
            }
            let l = quadrature::gauss_quad(|x| g.eval(x) * (b - x) / h, a, b, DEFAULT_ORDER);
            let r = quadrature::gauss_quad(|x| g.eval(x) * (x - a) / h, a, b, DEFAULT_ORDER);
            (l, r)
        })
        .collect()
}

/// (g, p) for a P1 function p, exact in p given the element moments.
fn moment_against(moments: &[(f64, f64)], p: &P1Function) -> f64 {
    moments
        .iter()
        .enumerate()
        .map(|(k, (l, r))| l * p.values[k] + r * p.values[k + 1])
        .sum()
}

/// L² projection of `g` onto `target`, by the normal equations on the
/// target's basis.
pub fn l2_project(g: &ScalarFn, target: ProjectionTarget, mesh: &Mesh1D) -> Result<P1Function> {
    let basis = target_basis(target, mesh);
    let dim = basis.len();
    let gram = DMatrix::from_fn(dim, dim, |i, j| basis[i].l2_inner(&basis[j]));
    let moments = element_moments(g, mesh);
    let rhs = DVector::from_iterator(dim, basis.iter().map(|b| moment_against(&moments, b)));
    let coeffs = gram
        .cholesky()
        .ok_or_else(|| Error::Consistency("projection Gram matrix not SPD".into()))?
        .solve(&rhs);
    let mut values = vec![0.0; mesh.n() + 1];
    for (c, b) in coeffs.iter().zip(&basis) {
        for (v, bv) in values.iter_mut().zip(&b.values) {
            *v += c * bv;
        }
    }
    Ok(P1Function {
        mesh: mesh.clone(),
        values,
    })
}

/// u^f(x) = ∫₀¹ G₀(x, s) f(s) ds with G₀(x, s) = min(x, s)(1 − max(x, s)),
/// the solution of −u″ = f with zero boundary values.
pub fn poisson_uf(f: &ScalarFn, x: f64) -> f64 {
    let left = ScalarFn::new({
        let f = f.clone();
        move |s| s * f.eval(s)
    });
    let right = ScalarFn::new({
        let f = f.clone();
        move |s| (1.0 - s) * f.eval(s)
    });
    (1.0 - x) * integrate(&left, 0.0, x) + x * integrate(&right, x, 1.0)
}

/// (u^f)′(x) = ∫ₓ¹(1 − s)f − ∫₀ˣ s f.
pub fn poisson_uf_derivative(f: &ScalarFn, x: f64) -> f64 {
    let left = ScalarFn::new({
        let f = f.clone();
        move |s| s * f.eval(s)
    });
    let right = ScalarFn::new({
        let f = f.clone();
        move |s| (1.0 - s) * f.eval(s)
    });
    integrate(&right, x, 1.0) - integrate(&left, 0.0, x)
}

/// Elliptic projection u_h^f of u^f onto the P2 space:
/// ((u_h^f)′, v′) = (f, v) for all P2 v.
pub fn elliptic_projection_uf(f: &ScalarFn, mesh: &Mesh1D) -> Result<P2Function> {
    let a = p2::stiffness(mesh);
    let rhs = p2::load(mesh, f);
    let coeffs = a
        .cholesky()
        .ok_or_else(|| Error::Consistency("P2 stiffness not SPD".into()))?
        .solve(&rhs);
    Ok(P2Function::from_coefficients(mesh, coeffs.as_slice()))
}

/// Windows for the interpolation energy error of the constant-data solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyWindow {
    /// [0, 1]
    Full,
    /// [0, 1 − h]
    AwayFromLayer,
    /// [1 − h, 1]
    LastElement,
}

/// Closed-form |u − I_h u|² over a window, for u = exact_const_f(ε) on a
/// uniform mesh of size h.
pub fn interp_energy_error(eps: f64, h: f64, window: EnergyWindow) -> Result<f64> {
    if !(eps > 0.0) || !(h > 0.0 && h < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need eps > 0 and 0 < h < 1, got eps = {eps:e}, h = {h}"
        )));
    }
    // (1 + e^{−1/ε})/(1 − e^{−1/ε}) = coth(1/(2ε)); (1 − e^{−h/ε})/(1 + e^{−h/ε}) = tanh(h/(2ε))
    let full = (1.0 / (0.5 / eps).tanh()) * (0.5 / eps - (0.5 * h / eps).tanh() / h);
    let denom = -(-2.0 / eps).exp_m1();
    Ok(match window {
        EnergyWindow::Full => full,
        EnergyWindow::AwayFromLayer => ((-2.0 * h / eps).exp() - (-2.0 / eps).exp()) / denom * full,
        EnergyWindow::LastElement => -(-2.0 * h / eps).exp_m1() / denom * full,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn transport_values_for_unit_data() {
        let one = ScalarFn::constant(1.0);
        for &x in &[0.0, 0.3, 1.0] {
            assert_eq!(transport(TransportKind::LeftToRight, &one, x), x);
            assert_eq!(transport(TransportKind::RightToLeft, &one, x), x - 1.0);
            assert_eq!(transport(TransportKind::Shifted, &one, x), x - 0.5);
        }
    }

    #[test]
    fn transport_gap_is_the_mean() {
        let f = ScalarFn::new(|x| (3.0 * x).sin() + x * x);
        let mean = integrate(&f, 0.0, 1.0);
        for k in 0..=10 {
            let x = k as f64 / 10.0;
            let gap = transport(TransportKind::LeftToRight, &f, x)
                - transport(TransportKind::RightToLeft, &f, x);
            assert!((gap - mean).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_data_solution() {
        assert_eq!(exact_const_f(0.1, 0.0), 0.0);
        assert!(exact_const_f(0.1, 1.0).abs() < 1e-16);
        // 40-digit mpmath: 0.49330714907571514444
        assert!((exact_const_f(0.1, 0.5) - 0.493_307_149_075_715_14).abs() < 1e-15);
        assert_eq!(exact_const_f(1e-8, 0.5), 0.5);
    }

    #[test]
    fn constant_data_solution_satisfies_ode() {
        let eps = 0.05;
        let u = ExactSolution::new(eps, &Forcing::Constant(1.0)).unwrap();
        for k in 1..100 {
            let x = k as f64 / 100.0;
            let r = -eps * u.second_derivative(x) + u.derivative(x) - 1.0;
            assert!(r.abs() < 1e-8, "x = {x}: {r}");
            assert!((u.value(x) - exact_const_f(eps, x)).abs() < 1e-14);
            assert!((u.derivative(x) - exact_const_f_derivative(eps, x)).abs() < 1e-10);
        }
    }

    #[test]
    fn structured_solutions_satisfy_ode_and_boundary_conditions() {
        let cases = [
            Forcing::SinPi(1.0),
            Forcing::CosPi(2.0),
            Forcing::Polynomial(vec![0.0, 1.0, -1.0]),
            Forcing::Polynomial(vec![1.0, 1.0]),
            Forcing::Sum(vec![Forcing::SinPi(1.0), Forcing::Constant(-2.0 / PI)]),
        ];
        for eps in [0.3, 0.02, 1e-6] {
            for f in &cases {
                let u = ExactSolution::new(eps, f).unwrap();
                assert!(u.value(0.0).abs() < 1e-12, "{f:?} {eps}");
                assert!(u.value(1.0).abs() < 1e-12, "{f:?} {eps}");
                for k in 1..100 {
                    let x = k as f64 / 100.0;
                    let r = -eps * u.second_derivative(x) + u.derivative(x) - f.eval(x);
                    assert!(r.abs() < 1e-8, "{f:?} eps={eps} x={x}: {r}");
                }
            }
        }
    }

    #[test]
    fn greens_reference_and_limits() {
        // 40-digit mpmath: 0.91177153311072623142
        assert!((greens(0.1, 0.5, 0.25) - 0.911_771_533_110_726_2).abs() < 1e-14);
        assert!((greens(1e-6, 0.5, 0.25) - 1.0).abs() < 1e-12);
        assert!(greens(1e-6, 0.25, 0.5).abs() < 1e-12);
        for &(x, s) in &[(0.0, 0.3), (0.4, 0.0), (0.4, 1.0), (1.0, 0.3)] {
            assert!(greens(0.1, x, s).abs() < 1e-12, "({x},{s})");
        }
    }

    #[test]
    fn greens_monotone_in_s_on_each_side() {
        let eps = 0.05;
        let x = 0.6;
        let mut prev = greens(eps, x, 0.0);
        for k in 1..60 {
            let s = k as f64 / 100.0;
            let g = greens(eps, x, s);
            assert!(g >= prev - 1e-15);
            prev = g;
        }
        let mut prev = greens(eps, x, 0.6);
        for k in 61..=100 {
            let s = k as f64 / 100.0;
            let g = greens(eps, x, s);
            assert!(g <= prev + 1e-15);
            prev = g;
        }
    }

    #[test]
    fn greens_reproduces_the_exact_solution() {
        let eps = 0.1;
        for &x in &[0.2, 0.5, 0.9] {
            let g = ScalarFn::new(move |s| greens(eps, x, s));
            let left =
                quadrature::graded(|s| g.eval(s), 0.0, x, 20, quadrature::LayerSide::End, eps);
            let right =
                quadrature::graded(|s| g.eval(s), x, 1.0, 20, quadrature::LayerSide::Start, eps);
            assert!((left + right - exact_const_f(eps, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn exponentials_stay_finite_for_tiny_eps() {
        for &eps in &[1e-300, 1e-200, 1e-30] {
            for k in 0..=20 {
                let x = k as f64 / 20.0;
                assert!(exact_const_f(eps, x).is_finite());
                assert!(greens(eps, x, 0.5).is_finite());
                assert!(greens(eps, 0.5, x).is_finite());
                let u = ExactSolution::new(eps, &Forcing::SinPi(1.0)).unwrap();
                assert!(u.value(x).is_finite());
            }
            for w in [
                EnergyWindow::Full,
                EnergyWindow::AwayFromLayer,
                EnergyWindow::LastElement,
            ] {
                assert!(interp_energy_error(eps.max(1e-150), 0.1, w)
                    .unwrap()
                    .is_finite());
            }
        }
    }

    #[test]
    fn projection_is_idempotent_on_targets() {
        let mesh = Mesh1D::new(7).unwrap();
        for target in [
            ProjectionTarget::ZeroBoundary,
            ProjectionTarget::MeanZero,
            ProjectionTarget::EqualEnds,
        ] {
            let basis = target_basis(target, &mesh);
            let mut values = vec![0.0; 8];
            for (k, b) in basis.iter().enumerate() {
                for (v, bv) in values.iter_mut().zip(&b.values) {
                    *v += (k as f64 * 0.7).sin() * bv;
                }
            }
            let p = P1Function {
                mesh: mesh.clone(),
                values,
            };
            let g = {
                let p = p.clone();
                ScalarFn::new(move |x| p.eval(x))
            };
            let proj = l2_project(&g, target, &mesh).unwrap();
            for (a, b) in proj.values.iter().zip(&p.values) {
                assert!((a - b).abs() < 1e-12, "{target:?}");
            }
        }
    }

    #[test]
    fn mean_zero_projection_has_zero_mean() {
        let mesh = Mesh1D::new(12).unwrap();
        let g = ScalarFn::new(|x| (5.0 * x).exp());
        let p = l2_project(&g, ProjectionTarget::MeanZero, &mesh).unwrap();
        assert!(p.integral().abs() < 1e-12);
        let p = l2_project(&g, ProjectionTarget::EqualEnds, &mesh).unwrap();
        assert!((p.values[0] - p.values[12]).abs() < 1e-12);
    }

    #[test]
    fn projection_agrees_with_sampled_least_squares() {
        let mesh = Mesh1D::new(9).unwrap();
        let g = ScalarFn::new(|x| (3.0 * x).cos() + x);
        for target in [
            ProjectionTarget::ZeroBoundary,
            ProjectionTarget::MeanZero,
            ProjectionTarget::EqualEnds,
        ] {
            let basis = target_basis(target, &mesh);
            // weighted least squares on Gauss points of every element
            let r = quadrature::rule(6);
            let mut rows = Vec::new();
            let mut rhs = Vec::new();
            for k in 1..=mesh.n() {
                let (a, b) = mesh.element(k);
                for (t, w) in r.nodes.iter().zip(&r.weights) {
                    let x = 0.5 * (a + b) + 0.5 * (b - a) * t;
                    let sw = (0.5 * (b - a) * w).sqrt();
                    rows.push(basis.iter().map(|p| sw * p.eval(x)).collect::<Vec<_>>());
                    rhs.push(sw * g.eval(x));
                }
            }
            let a = DMatrix::from_fn(rows.len(), basis.len(), |i, j| rows[i][j]);
            let svd = a.svd(true, true);
            let c = svd.solve(&DVector::from_vec(rhs), 1e-14).unwrap();
            let proj = l2_project(&g, target, &mesh).unwrap();
            for j in 0..=mesh.n() {
                let v: f64 = basis
                    .iter()
                    .zip(c.iter())
                    .map(|(p, ci)| ci * p.values[j])
                    .sum();
                assert!((v - proj.values[j]).abs() < 1e-10, "{target:?} node {j}");
            }
        }
    }

    #[test]
    fn poisson_oracles() {
        let one = ScalarFn::constant(1.0);
        let s = ScalarFn::new(|x| (PI * x).sin());
        for k in 0..=10 {
            let x = k as f64 / 10.0;
            assert!((poisson_uf(&one, x) - 0.5 * (x - x * x)).abs() < 1e-14);
            assert!((-poisson_uf_derivative(&one, x) - (x - 0.5)).abs() < 1e-14);
            assert!((poisson_uf(&s, x) - (PI * x).sin() / (PI * PI)).abs() < 1e-13);
        }
        // P2 elliptic projection of a quadratic u^f is exact
        let mesh = Mesh1D::new(6).unwrap();
        let uh = elliptic_projection_uf(&one, &mesh).unwrap();
        for k in 0..=30 {
            let x = k as f64 / 30.0;
            assert!((uh.eval(x) - 0.5 * (x - x * x)).abs() < 1e-13);
        }
    }

    #[test]
    fn energy_error_closed_forms() {
        let full = interp_energy_error(1e-3, 0.1, EnergyWindow::Full).unwrap();
        assert!((full - 490.0).abs() < 1e-9);
        let away = interp_energy_error(1e-3, 0.1, EnergyWindow::AwayFromLayer).unwrap();
        assert!((away / full - (-200.0f64).exp()).abs() < 1e-12 * (-200.0f64).exp());
        let last = interp_energy_error(1e-3, 0.1, EnergyWindow::LastElement).unwrap();
        assert!((full - away - last).abs() < 1e-12 * full);
        assert!(interp_energy_error(0.0, 0.1, EnergyWindow::Full).is_err());
    }
}
