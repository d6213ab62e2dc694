//! Continuous piecewise-quadratic space with zero boundary values, in the
//! hierarchical basis: n − 1 vertex hats followed by n element bubbles
//! 4t(1 − t).

use nalgebra::{DMatrix, DVector};

use crate::mesh::{Mesh1D, ScalarFn};
use crate::quadrature::{self, DEFAULT_ORDER};

/// Dimension 2n − 1 of the space.
pub fn dimension(mesh: &Mesh1D) -> usize {
    2 * mesh.n() - 1
}

/// Element bubble on element k (1-based) at `x`.
pub fn element_bubble(mesh: &Mesh1D, k: usize, x: f64) -> f64 {
    let (a, b) = mesh.element(k);
    if x < a || x > b {
        return 0.0;
    }
    let t = (x - a) / mesh.h();
    4.0 * t * (1.0 - t)
}

fn element_bubble_derivative(mesh: &Mesh1D, k: usize, x: f64) -> f64 {
    let (a, b) = mesh.element(k);
    if x < a || x > b {
        return 0.0;
    }
    let t = (x - a) / mesh.h();
    4.0 * (1.0 - 2.0 * t) / mesh.h()
}

/// Basis function `idx` of the hierarchical basis at `x`.
pub fn basis(mesh: &Mesh1D, idx: usize, x: f64) -> f64 {
    let nv = mesh.n() - 1;
    if idx < nv {
        mesh.hat_any(idx + 1, x)
    } else {
        element_bubble(mesh, idx - nv + 1, x)
    }
}

/// Stiffness matrix (v′, w′) on the hierarchical basis. Hats and bubbles are
/// H¹-orthogonal, so the matrix is block diagonal.
pub fn stiffness(mesh: &Mesh1D) -> DMatrix<f64> {
    let nv = mesh.n() - 1;
    let dim = dimension(mesh);
    let h = mesh.h();
    let mut a = DMatrix::zeros(dim, dim);
    for i in 0..nv {
        a[(i, i)] = 2.0 / h;
        if i + 1 < nv {
            a[(i, i + 1)] = -1.0 / h;
            a[(i + 1, i)] = -1.0 / h;
        }
    }
    for k in 0..mesh.n() {
        a[(nv + k, nv + k)] = 16.0 / (3.0 * h);
    }
    a
}

/// Load vector (f, v) for every basis function, by element quadrature.
pub fn load(mesh: &Mesh1D, f: &ScalarFn) -> DVector<f64> {
    let nv = mesh.n() - 1;
    let h = mesh.h();
    let mut rhs = DVector::zeros(dimension(mesh));
    for k in 1..=mesh.n() {
        let (a, b) = mesh.element(k);
        let (left, right, bubble) = match f.constant {
            Some(c) => (0.5 * c * h, 0.5 * c * h, 2.0 / 3.0 * c * h),
            None => {
                let q = |g: &dyn Fn(f64) -> f64| quadrature::gauss_quad(g, a, b, DEFAULT_ORDER);
                (
                    q(&|x| f.eval(x) * (b - x) / h),
                    q(&|x| f.eval(x) * (x - a) / h),
                    q(&|x| f.eval(x) * element_bubble(mesh, k, x)),
                )
            }
        };
        // left end of element k is node k − 1, right end is node k
        if k >= 2 {
            rhs[k - 2] += left;
        }
        if k <= nv {
            rhs[k - 1] += right;
        }
        rhs[nv + k - 1] += bubble;
    }
    rhs
}

/// A member of the P2 space in hierarchical coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct P2Function {
    pub mesh: Mesh1D,
    /// Vertex coefficients at x_1..x_{n-1}.
    pub vertex: Vec<f64>,
    /// Bubble coefficients on elements 1..n.
    pub bubble: Vec<f64>,
}

impl P2Function {
    pub fn from_coefficients(mesh: &Mesh1D, coeffs: &[f64]) -> Self {
        let nv = mesh.n() - 1;
        Self {
            mesh: mesh.clone(),
            vertex: coeffs[..nv].to_vec(),
            bubble: coeffs[nv..].to_vec(),
        }
    }

    fn vertex_value(&self, j: usize) -> f64 {
        if j == 0 || j >= self.mesh.n() {
            0.0
        } else {
            self.vertex[j - 1]
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.mesh.locate(x);
        let (a, _) = self.mesh.element(k);
        let t = (x - a) / self.mesh.h();
        (1.0 - t) * self.vertex_value(k - 1)
            + t * self.vertex_value(k)
            + self.bubble[k - 1] * 4.0 * t * (1.0 - t)
    }

    /// Left derivative at nodes.
    pub fn derivative(&self, x: f64) -> f64 {
        let k = self.mesh.locate(x);
        (self.vertex_value(k) - self.vertex_value(k - 1)) / self.mesh.h()
            + self.bubble[k - 1] * element_bubble_derivative(&self.mesh, k, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stiffness_matches_quadrature() {
        let mesh = Mesh1D::new(5).unwrap();
        let a = stiffness(&mesh);
        let dim = dimension(&mesh);
        let d = |idx: usize, x: f64| {
            let nv = mesh.n() - 1;
            if idx < nv {
                mesh.hat_derivative(idx + 1, x)
            } else {
                element_bubble_derivative(&mesh, idx - nv + 1, x)
            }
        };
        for i in 0..dim {
            for j in 0..dim {
                let q: f64 = (1..=mesh.n())
                    .map(|k| {
                        let (lo, hi) = mesh.element(k);
                        let eps = 1e-14;
                        quadrature::gauss_quad(|x| d(i, x) * d(j, x), lo + eps, hi - eps, 4)
                    })
                    .sum();
                assert!(
                    (q - a[(i, j)]).abs() < 1e-9,
                    "({i},{j}): {q} vs {}",
                    a[(i, j)]
                );
            }
        }
    }

    #[test]
    fn constant_load_matches_quadrature() {
        let mesh = Mesh1D::new(6).unwrap();
        let fast = load(&mesh, &ScalarFn::constant(2.0));
        let slow = load(&mesh, &ScalarFn::new(|_| 2.0));
        for i in 0..dimension(&mesh) {
            assert!((fast[i] - slow[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn hierarchical_function_evaluation() {
        let mesh = Mesh1D::new(4).unwrap();
        let mut coeffs = vec![0.0; dimension(&mesh)];
        coeffs[1] = 1.0; // hat at x_2
        coeffs[3 + 1] = 2.0; // bubble on element 2
        let p = P2Function::from_coefficients(&mesh, &coeffs);
        assert!((p.eval(0.5) - 1.0).abs() < 1e-15);
        // midpoint of element 2: hat = 1/2, bubble = 1 → 0.5 + 2
        assert!((p.eval(0.375) - 2.5).abs() < 1e-14);
        assert!((basis(&mesh, 4, 0.375) - 1.0).abs() < 1e-15);
    }
}
