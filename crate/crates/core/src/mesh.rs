//! Uniform 1D meshes, hat functions and nodal fields.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Uniform partition of [0, 1] into `n` elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    n: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::MeshTooCoarse(n));
        }
        let h = 1.0 / n as f64;
        let nodes = (0..=n).map(|j| j as f64 / n as f64).collect();
        Ok(Self { n, h, nodes })
    }

    /// Number of elements.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// All nodes x_0 = 0, ..., x_n = 1.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    /// Number of interior unknowns, n - 1.
    pub fn interior_count(&self) -> usize {
        self.n - 1
    }

    pub fn interior_nodes(&self) -> &[f64] {
        &self.nodes[1..self.n]
    }

    /// Element k (1-based) is [x_{k-1}, x_k].
    pub fn element(&self, k: usize) -> (f64, f64) {
        (self.nodes[k - 1], self.nodes[k])
    }

    /// 1-based element containing `x`; a node belongs to the element on its left.
    pub fn locate(&self, x: f64) -> usize {
        let t = x * self.n as f64;
        let r = t.round();
        let k = if (t - r).abs() < 1e-9 { r } else { t.ceil() } as isize;
        k.clamp(1, self.n as isize) as usize
    }

    /// Hat function φ_i at `x`, for any i in 0..=n (boundary hats included).
    pub fn hat_any(&self, i: usize, x: f64) -> f64 {
        let t = x * self.n as f64 - i as f64;
        (1.0 - t.abs()).max(0.0)
    }

    /// Interior hat φ_i, i in 1..=n-1.
    pub fn hat_eval(&self, i: usize, x: f64) -> Result<f64> {
        if i == 0 || i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                max: self.n - 1,
            });
        }
        Ok(self.hat_any(i, x))
    }

    /// Derivative of φ_i (any i in 0..=n); left derivative at nodes.
    pub fn hat_derivative(&self, i: usize, x: f64) -> f64 {
        let k = self.locate(x);
        if k == i {
            self.n as f64
        } else if k == i + 1 {
            -(self.n as f64)
        } else {
            0.0
        }
    }
}

/// A real function on [0, 1] with optional metadata used by fast paths and
/// error bounds.
#[derive(Clone)]
pub struct ScalarFn {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Known value when the function is constant.
    pub constant: Option<f64>,
    /// Known ‖f‖_∞.
    pub sup_norm: Option<f64>,
    /// Known ‖f′‖_∞.
    pub sup_norm_derivative: Option<f64>,
    /// Width of a boundary layer at x = 1, if the function has one.
    pub layer_width: Option<f64>,
}

impl ScalarFn {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(f),
            constant: None,
            sup_norm: None,
            sup_norm_derivative: None,
            layer_width: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            eval: Arc::new(move |_| c),
            constant: Some(c),
            sup_norm: Some(c.abs()),
            sup_norm_derivative: Some(0.0),
            layer_width: None,
        }
    }

    pub fn with_sup_norms(mut self, f_inf: f64, df_inf: f64) -> Self {
        self.sup_norm = Some(f_inf);
        self.sup_norm_derivative = Some(df_inf);
        self
    }

    pub fn with_layer(mut self, width: f64) -> Self {
        self.layer_width = Some(width);
        self
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn")
            .field("constant", &self.constant)
            .field("sup_norm", &self.sup_norm)
            .field("sup_norm_derivative", &self.sup_norm_derivative)
            .field("layer_width", &self.layer_width)
            .finish_non_exhaustive()
    }
}

/// Interior nodal coefficients of a continuous piecewise-linear function
/// vanishing at x = 0 and x = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField1D {
    mesh: Mesh1D,
    values: Vec<f64>,
}

impl NodalField1D {
    pub fn new(mesh: Mesh1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.interior_count() {
            return Err(Error::DimensionMismatch {
                expected: mesh.interior_count(),
                got: values.len(),
            });
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: Mesh1D) -> Self {
        let values = vec![0.0; mesh.interior_count()];
        Self { mesh, values }
    }

    /// The teeth-saw field ω_h = φ_1 + φ_3 + ... .
    pub fn teeth_saw(mesh: Mesh1D) -> Self {
        let values = (1..mesh.n())
            .map(|j| if j % 2 == 1 { 1.0 } else { 0.0 })
            .collect();
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    /// Interior values u_1..u_{n-1}.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Nodal value at node j in 0..=n (zero at the boundary).
    pub fn node_value(&self, j: usize) -> f64 {
        if j == 0 || j >= self.mesh.n() {
            0.0
        } else {
            self.values[j - 1]
        }
    }

    /// Nodal values including the two boundary zeros.
    pub fn full_values(&self) -> Vec<f64> {
        (0..=self.mesh.n()).map(|j| self.node_value(j)).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.mesh.locate(x);
        let (a, _) = self.mesh.element(k);
        let t = (x - a) / self.mesh.h();
        (1.0 - t) * self.node_value(k - 1) + t * self.node_value(k)
    }

    /// Left derivative at `x`.
    pub fn derivative(&self, x: f64) -> f64 {
        let k = self.mesh.locate(x);
        (self.node_value(k) - self.node_value(k - 1)) / self.mesh.h()
    }

    pub fn to_p1(&self) -> P1Function {
        P1Function {
            mesh: self.mesh.clone(),
            values: self.full_values(),
        }
    }

    pub fn as_scalar_fn(&self) -> ScalarFn {
        let me = self.clone();
        ScalarFn::new(move |x| me.eval(x))
    }

    /// Elementwise a*self + b*other on the same mesh.
    pub fn combine(&self, a: f64, other: &NodalField1D, b: f64) -> NodalField1D {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| a * u + b * v)
            .collect();
        NodalField1D {
            mesh: self.mesh.clone(),
            values,
        }
    }
}

/// Continuous piecewise-linear function with arbitrary values at all n + 1
/// nodes, including the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct P1Function {
    pub mesh: Mesh1D,
    /// Values at x_0..x_n.
    pub values: Vec<f64>,
}

impl P1Function {
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.mesh.locate(x);
        let (a, _) = self.mesh.element(k);
        let t = (x - a) / self.mesh.h();
        (1.0 - t) * self.values[k - 1] + t * self.values[k]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let k = self.mesh.locate(x);
        (self.values[k] - self.values[k - 1]) / self.mesh.h()
    }

    /// Exact ∫₀¹ of the function.
    pub fn integral(&self) -> f64 {
        let h = self.mesh.h();
        self.values
            .windows(2)
            .map(|w| 0.5 * h * (w[0] + w[1]))
            .sum()
    }

    /// Exact L²(0,1) inner product with another P1 function on the same mesh.
    pub fn l2_inner(&self, other: &P1Function) -> f64 {
        let h = self.mesh.h();
        (1..=self.mesh.n())
            .map(|k| {
                let (a0, a1) = (self.values[k - 1], self.values[k]);
                let (b0, b1) = (other.values[k - 1], other.values[k]);
                h / 6.0 * (2.0 * a0 * b0 + a0 * b1 + a1 * b0 + 2.0 * a1 * b1)
            })
            .sum()
    }

    pub fn shifted(&self, c: f64) -> P1Function {
        P1Function {
            mesh: self.mesh.clone(),
            values: self.values.iter().map(|v| v + c).collect(),
        }
    }
}

/// Nodal interpolant of `f` with zero boundary values.
pub fn interpolate(mesh: &Mesh1D, f: &ScalarFn) -> NodalField1D {
    let values = mesh.interior_nodes().iter().map(|&x| f.eval(x)).collect();
    NodalField1D {
        mesh: mesh.clone(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn mesh_layout() {
        let m = Mesh1D::new(2).unwrap();
        assert_eq!(m.nodes(), &[0.0, 0.5, 1.0]);
        assert_eq!(m.h(), 0.5);
        let m = Mesh1D::new(4).unwrap();
        assert_eq!(m.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        let m = Mesh1D::new(100).unwrap();
        assert_eq!(m.h(), 0.01);
        assert_eq!(m.nodes().len(), 101);
        assert_eq!(m.nodes()[100], 1.0);
    }

    #[test]
    fn rejects_coarse_mesh() {
        assert_eq!(Mesh1D::new(1), Err(Error::MeshTooCoarse(1)));
        assert_eq!(Mesh1D::new(0), Err(Error::MeshTooCoarse(0)));
    }

    #[test]
    fn hat_values() {
        let m = Mesh1D::new(4).unwrap();
        assert_eq!(m.hat_eval(2, 0.5).unwrap(), 1.0);
        assert!((m.hat_eval(2, 0.375).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(m.hat_eval(2, 0.9).unwrap(), 0.0);
        assert!(m.hat_eval(0, 0.1).is_err());
        assert!(m.hat_eval(4, 0.1).is_err());
    }

    #[test]
    fn partition_of_unity() {
        let m = Mesh1D::new(7).unwrap();
        for k in 0..=200 {
            let x = k as f64 / 200.0;
            let s: f64 = (0..=7).map(|i| m.hat_any(i, x)).sum();
            assert!((s - 1.0).abs() < 1e-14, "x = {x}: {s}");
        }
    }

    #[test]
    fn node_attributed_to_left_element() {
        let m = Mesh1D::new(4).unwrap();
        assert_eq!(m.locate(0.5), 2);
        assert_eq!(m.locate(0.0), 1);
        assert_eq!(m.locate(1.0), 4);
        assert_eq!(m.hat_derivative(2, 0.5), 4.0);
    }

    #[test]
    fn interpolation_examples() {
        let m = Mesh1D::new(2).unwrap();
        let u = interpolate(&m, &ScalarFn::new(|x| x * (1.0 - x)));
        assert_eq!(u.values(), &[0.25]);
        let m = Mesh1D::new(4).unwrap();
        let u = interpolate(&m, &ScalarFn::new(|x| (PI * x).sin()));
        let expected = [(PI / 4.0).sin(), 1.0, (3.0 * PI / 4.0).sin()];
        for (a, b) in u.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn interpolation_reproduces_p1_fields() {
        let m = Mesh1D::new(9).unwrap();
        let vals: Vec<f64> = (1..9).map(|j| ((j * 7) % 5) as f64 - 2.0).collect();
        let u = NodalField1D::new(m.clone(), vals).unwrap();
        let again = interpolate(&m, &u.as_scalar_fn());
        for (a, b) in again.values().iter().zip(u.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn p1_integral_and_inner_product() {
        let m = Mesh1D::new(4).unwrap();
        let hat = NodalField1D::new(m, vec![0.0, 1.0, 0.0]).unwrap().to_p1();
        assert!((hat.integral() - 0.25).abs() < 1e-15);
        // (φ, φ) = 2h/3
        assert!((hat.l2_inner(&hat) - 2.0 * 0.25 / 3.0).abs() < 1e-15);
    }
}
