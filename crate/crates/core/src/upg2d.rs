//! Tensor-product quadratic-bubble UPG for −εΔu + u_x = f on the unit square
//! with zero Dirichlet data.
//!
//! Unknowns are ordered x-fastest: index (j − 1)(n − 1) + (i − 1) holds
//! u_{ij} ≈ u(x_i, y_j). The system matrix is
//! A = M ⊗ Mfe_x + (ε/h)·S ⊗ Mq with the left factors acting on y.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::bubbles::{t0, BubbleSpec};
use crate::discretize::upg_stencil;
use crate::error::{Error, Result};
use crate::forcing::Forcing2D;
use crate::mesh::{Mesh1D, NodalField1D};
use crate::quadrature;
use crate::tridiag::{TriDiag, PIVOT_FLOOR};

/// Largest n accepted by the dense reference solver.
pub const DENSE_MAX_N: usize = 32;

/// Gauss order per direction for the load vector.
pub const RHS_ORDER: usize = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct KroneckerSystem {
    pub n: usize,
    pub eps: f64,
    /// Quadratic bubble amplitude β used in the x test functions.
    pub beta: f64,
    /// (h/6)·tridiag(1, 4, 1)
    pub m: TriDiag,
    pub mfe_x: TriDiag,
    /// tridiag(−1, 2, −1)
    pub s: TriDiag,
    /// (φ_k, g_i) in x, test index i in rows.
    pub mq: TriDiag,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodalField2D {
    pub n: usize,
    pub values: Vec<f64>,
}

impl NodalField2D {
    /// u_{ij} for 1 ≤ i, j ≤ n − 1.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(j - 1) * (self.n - 1) + (i - 1)]
    }

    pub fn max_abs_diff(&self, other: &NodalField2D) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

fn mass(m: usize, h: f64) -> TriDiag {
    TriDiag::constant(m, h / 6.0, 4.0 * h / 6.0, h / 6.0)
}

/// Mq = (φ_k, φ_i + B_i − B_{i+1}) for the bubble 4β(x/h)(1 − x/h):
/// M + (βh/3)·tridiag(1, 0, −1).
fn bubble_mass(m: usize, h: f64, beta: f64) -> TriDiag {
    let c = beta * h / 3.0;
    TriDiag::constant(m, h / 6.0 + c, 4.0 * h / 6.0, h / 6.0 - c)
}

/// (f, g_i(x)φ_j(y)) for the bubble amplitude β.
fn load_2d(n: usize, beta: f64, f: &Forcing2D) -> Vec<f64> {
    let m = n - 1;
    let h = 1.0 / n as f64;
    if let Some(c) = f.as_constant() {
        return vec![c * h * h; m * m];
    }
    let rule = quadrature::rule(RHS_ORDER);
    let pts: Vec<(f64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(t, w)| (0.5 * (1.0 + t), 0.5 * w * h))
        .collect();
    let mut rhs = vec![0.0; m * m];
    for ky in 1..=n {
        for kx in 1..=n {
            for &(tx, wx) in &pts {
                let x = (kx as f64 - 1.0 + tx) * h;
                let bubble = 4.0 * beta * tx * (1.0 - tx);
                // g_{kx} = t + B on its left element, g_{kx−1} = (1 − t) − B on its right one
                let gx = [(kx, tx + bubble), (kx.wrapping_sub(1), 1.0 - tx - bubble)];
                for &(ty, wy) in &pts {
                    let y = (ky as f64 - 1.0 + ty) * h;
                    let fw = f.eval(x, y) * wx * wy;
                    for &(j, py) in &[(ky, ty), (ky.wrapping_sub(1), 1.0 - ty)] {
                        if j == 0 || j > m {
                            continue;
                        }
                        for &(i, px) in &gx {
                            if i == 0 || i > m {
                                continue;
                            }
                            rhs[(j - 1) * m + (i - 1)] += fw * px * py;
                        }
                    }
                }
            }
        }
    }
    rhs
}

/// Assemble the four factors and the load for ε > 0.
///
/// The x factor is built from the scaled quadratic bubble and checked
/// against the exponential-bubble closed form
/// (1/t₀)·tridiag(−(1 + t₀)/2, 1, −(1 − t₀)/2).
pub fn assemble_2d(eps: f64, n: usize, f: &Forcing2D) -> Result<KroneckerSystem> {
    if n < 2 {
        return Err(Error::MeshTooCoarse(n));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps:e}"
        )));
    }
    let m = n - 1;
    let h = 1.0 / n as f64;
    let bubble = BubbleSpec::scaled_quadratic(eps, h)?;
    let beta = bubble.beta().unwrap_or(1.5 * bubble.average());
    let (l, d, u) = upg_stencil(eps, h, bubble.average());
    let t = t0(eps, h);
    let closed = [-(1.0 + t) / (2.0 * t), 1.0 / t, -(1.0 - t) / (2.0 * t)];
    for (a, b) in [l, d, u].iter().zip(&closed) {
        if (a - b).abs() > 1e-12 * b.abs().max(1.0) {
            return Err(Error::Consistency(format!(
                "scaled quadratic stencil {a} differs from exponential form {b}"
            )));
        }
    }
    Ok(KroneckerSystem {
        n,
        eps,
        beta,
        m: mass(m, h),
        mfe_x: TriDiag::constant(m, l, d, u),
        s: TriDiag::constant(m, -1.0, 2.0, -1.0),
        mq: bubble_mass(m, h, beta),
        rhs: load_2d(n, beta, f),
    })
}

/// (L ⊗ R)v for tridiagonal factors, v ordered x-fastest.
fn kron_apply(left: &TriDiag, right: &TriDiag, v: &[f64]) -> Vec<f64> {
    let m = right.order();
    let rv: Vec<Vec<f64>> = v.chunks(m).map(|row| right.matvec(row)).collect();
    let mut out = vec![0.0; v.len()];
    for j in 0..m {
        let dst = &mut out[j * m..(j + 1) * m];
        let lo = j.saturating_sub(1);
        for (l, row) in rv.iter().enumerate().take((j + 2).min(m)).skip(lo) {
            let c = left.get(j, l);
            for (o, r) in dst.iter_mut().zip(row) {
                *o += c * r;
            }
        }
    }
    out
}

impl KroneckerSystem {
    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn size(&self) -> usize {
        (self.n - 1) * (self.n - 1)
    }

    /// A·v using the factored form.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let a = kron_apply(&self.m, &self.mfe_x, v);
        let b = kron_apply(&self.s, &self.mq, v);
        let r = self.eps / self.h();
        a.iter().zip(&b).map(|(x, y)| x + r * y).collect()
    }

    /// The assembled matrix; only sensible for small n.
    pub fn dense(&self) -> DMatrix<f64> {
        let r = self.eps / self.h();
        self.m.to_dense().kronecker(&self.mfe_x.to_dense())
            + (self.s.to_dense().kronecker(&self.mq.to_dense())) * r
    }
}

/// Sine-transform solve: the y factors share the eigenvectors sin(jkπ/n)
/// with eigenvalues σ_k = 2 − 2cos(kπ/n) and μ_k = (h/6)(6 − σ_k).
pub fn solve_2d_fast(sys: &KroneckerSystem) -> Result<NodalField2D> {
    let n = sys.n;
    let m = n - 1;
    let h = sys.h();
    let r = sys.eps / h;
    let sines: Vec<f64> = (0..m * m)
        .map(|idx| {
            let (j, k) = (idx / m + 1, idx % m + 1);
            ((j * k) as f64 * std::f64::consts::PI / n as f64).sin()
        })
        .collect();
    let sine = |j: usize, k: usize| sines[(j - 1) * m + (k - 1)];
    let rows: Vec<&[f64]> = sys.rhs.chunks(m).collect();
    let modes: Vec<Vec<f64>> = (1..=m)
        .into_par_iter()
        .map(|k| {
            let mut fk = vec![0.0; m];
            for (j, row) in rows.iter().enumerate() {
                let s = sine(j + 1, k);
                for (a, b) in fk.iter_mut().zip(row.iter()) {
                    *a += s * b;
                }
            }
            let scale = 2.0 / n as f64;
            fk.iter_mut().for_each(|v| *v *= scale);
            let sigma = 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / n as f64).cos();
            let mu = h / 6.0 * (6.0 - sigma);
            sys.mfe_x
                .scaled_sum(mu, &sys.mq, r * sigma)
                .solve_pivoted(&fk, PIVOT_FLOOR)
        })
        .collect::<Result<_>>()?;
    let mut values = vec![0.0; m * m];
    values.par_chunks_mut(m).enumerate().for_each(|(j, row)| {
        for (k, mode) in modes.iter().enumerate() {
            let s = sine(j + 1, k + 1);
            for (a, b) in row.iter_mut().zip(mode) {
                *a += s * b;
            }
        }
    });
    Ok(NodalField2D { n, values })
}

/// Dense LU solve of the assembled system, for n ≤ [`DENSE_MAX_N`].
pub fn solve_2d_dense(sys: &KroneckerSystem) -> Result<NodalField2D> {
    if sys.n > DENSE_MAX_N {
        return Err(Error::TooLarge {
            n: sys.n,
            max: DENSE_MAX_N,
        });
    }
    let sol = sys
        .dense()
        .lu()
        .solve(&DVector::from_column_slice(&sys.rhs))
        .ok_or(Error::Singular { row: 0, pivot: 0.0 })?;
    Ok(NodalField2D {
        n: sys.n,
        values: sol.as_slice().to_vec(),
    })
}

/// Reduced system [M ⊗ C⁰]W = F with C⁰ = tridiag(−1, 1, 0) and the load
/// built from the limit bubble 3(x/h)(1 − x/h).
pub fn solve_reduced_2d(n: usize, f: &Forcing2D) -> Result<NodalField2D> {
    if n < 2 {
        return Err(Error::MeshTooCoarse(n));
    }
    let m = n - 1;
    let h = 1.0 / n as f64;
    let rhs = load_2d(n, 0.75, f);
    let c0 = TriDiag::constant(m, -1.0, 1.0, 0.0);
    let mut values = Vec::with_capacity(m * m);
    for row in rhs.chunks(m) {
        values.extend(c0.solve(row)?);
    }
    let mass = mass(m, h);
    let mut column = vec![0.0; m];
    for i in 0..m {
        for j in 0..m {
            column[j] = values[j * m + i];
        }
        let solved = mass.solve(&column)?;
        for j in 0..m {
            values[j * m + i] = solved[j];
        }
    }
    Ok(NodalField2D { n, values })
}

/// The x_i-section (u_{i,1}, …, u_{i,n−1}) as a field in y.
pub fn section(u: &NodalField2D, i: usize) -> Result<NodalField1D> {
    if i == 0 || i >= u.n {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: u.n - 1,
        });
    }
    let values = (1..u.n).map(|j| u.get(i, j)).collect();
    NodalField1D::new(Mesh1D::new(u.n)?, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forcing::Forcing;
    use crate::mesh::ScalarFn;
    use crate::oracles::{l2_project, ProjectionTarget};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_rhs(sys: &mut KroneckerSystem, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sys.rhs
            .iter_mut()
            .for_each(|v| *v = rng.gen_range(-1.0..1.0));
    }

    #[test]
    fn factor_examples() {
        let sys = assemble_2d(0.1, 4, &Forcing2D::Constant(1.0)).unwrap();
        let h = 0.25;
        assert_eq!(sys.m.row(1), (h / 6.0, 4.0 * h / 6.0, h / 6.0));
        let c = sys.beta * h / 3.0;
        let (l, d, u) = sys.mq.row(1);
        assert!((l - (h / 6.0 + c)).abs() < 1e-15);
        assert!((d - 4.0 * h / 6.0).abs() < 1e-15);
        assert!((u - (h / 6.0 - c)).abs() < 1e-15);
        assert!(sys.rhs.iter().all(|&v| (v - h * h).abs() < 1e-15));
        // M = (h/6)(6I − S)
        let lhs = sys.m.to_dense();
        let rhs = (DMatrix::identity(3, 3) * 6.0 - sys.s.to_dense()) * (h / 6.0);
        assert!((lhs - rhs).amax() < 1e-15);
    }

    #[test]
    fn bubble_mass_matches_quadrature() {
        let n = 5;
        let mesh = Mesh1D::new(n).unwrap();
        let h = mesh.h();
        let bubble = BubbleSpec::scaled_quadratic(0.01, h).unwrap();
        let mq = bubble_mass(n - 1, h, bubble.beta().unwrap());
        for i in 1..n {
            let g = crate::bubbles::TestFunction::new(&mesh, &bubble, i).unwrap();
            for k in 1..n {
                let direct: f64 = (1..=n)
                    .map(|e| {
                        let (a, b) = mesh.element(e);
                        quadrature::gauss_quad(|x| mesh.hat_any(k, x) * g.eval(x), a, b, 6)
                    })
                    .sum();
                assert!((mq.get(i - 1, k - 1) - direct).abs() < 1e-14, "({i},{k})");
            }
        }
    }

    #[test]
    fn quadrature_load_matches_separable_form() {
        let n = 6;
        let fx = Forcing::SinPi(1.0);
        let fy = Forcing::Polynomial(vec![1.0, 2.0]);
        let f = Forcing2D::Product(fx.clone(), fy.clone());
        let sys = assemble_2d(0.05, n, &f).unwrap();
        let mesh = Mesh1D::new(n).unwrap();
        let bubble = BubbleSpec::quadratic_with_average(mesh.h(), 2.0 * sys.beta / 3.0).unwrap();
        let lx = crate::discretize::upg_loads(&mesh, &bubble, &fx.to_scalar_fn());
        let ly = crate::discretize::hat_loads(&mesh, &fy.to_scalar_fn());
        for (j, y) in ly.iter().enumerate() {
            for (i, x) in lx.iter().enumerate() {
                assert!((sys.rhs[j * (n - 1) + i] - x * y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn factored_apply_matches_dense() {
        for n in [2, 5, 16] {
            let sys = assemble_2d(0.03, n, &Forcing2D::Constant(1.0)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let v: Vec<f64> = (0..sys.size()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let fast = sys.apply(&v);
            let dense = sys.dense() * DVector::from_vec(v);
            for (a, b) in fast.iter().zip(dense.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fast_and_dense_solvers_agree() {
        for n in [2, 4, 8, 16] {
            for eps in [0.1, 1e-4] {
                let mut sys = assemble_2d(eps, n, &Forcing2D::Constant(1.0)).unwrap();
                random_rhs(&mut sys, 3 + n as u64);
                let fast = solve_2d_fast(&sys).unwrap();
                let dense = solve_2d_dense(&sys).unwrap();
                assert!(fast.max_abs_diff(&dense) < 1e-10, "n={n} eps={eps}");
            }
        }
    }

    #[test]
    fn dense_solver_guard_and_residual() {
        let sys = assemble_2d(0.1, 4, &Forcing2D::Constant(1.0)).unwrap();
        let u = solve_2d_dense(&sys).unwrap();
        let r = sys.apply(&u.values);
        for (a, b) in r.iter().zip(&sys.rhs) {
            assert!((a - b).abs() < 1e-12);
        }
        let a = sys.dense();
        assert!((&a - a.transpose()).amax() > 1e-3);
        let big = assemble_2d(0.1, 33, &Forcing2D::Constant(1.0)).unwrap();
        assert!(matches!(solve_2d_dense(&big), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn reduced_sections_are_scaled_projections_of_one() {
        let n = 16;
        let w = solve_reduced_2d(n, &Forcing2D::Constant(1.0)).unwrap();
        let mesh = Mesh1D::new(n).unwrap();
        let p = l2_project(
            &ScalarFn::constant(1.0),
            ProjectionTarget::ZeroBoundary,
            &mesh,
        )
        .unwrap();
        for i in 1..n {
            let s = section(&w, i).unwrap();
            let x = mesh.node(i);
            for (j, v) in s.values().iter().enumerate() {
                assert!((v - x * p.values[j + 1]).abs() < 1e-10);
            }
        }
        assert!(section(&w, 0).is_err() && section(&w, n).is_err());
    }

    #[test]
    fn reduced_limit_is_approached() {
        let n = 16;
        let h = 1.0 / n as f64;
        let w = solve_reduced_2d(n, &Forcing2D::Constant(1.0)).unwrap();
        let mut prev = f64::INFINITY;
        for ratio in [1e-2, 1e-4, 1e-6] {
            let sys = assemble_2d(ratio * h, n, &Forcing2D::Constant(1.0)).unwrap();
            let d = solve_2d_fast(&sys).unwrap().max_abs_diff(&w);
            assert!(d < prev, "ratio {ratio}: {d} >= {prev}");
            prev = d;
        }
        assert!(prev < 1e-4);
    }
}
