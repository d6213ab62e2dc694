//! Assembly and solution of the 1D discretizations: standard linear Galerkin
//! (SL), P1–P2 saddle-point least squares (SPLS) and bubble-upwinded
//! Petrov–Galerkin (UPG), including their ε = 0 reduced problems.

use nalgebra::{DMatrix, DVector};

use crate::bubbles::BubbleSpec;
use crate::error::{Error, Result};
use crate::mesh::{Mesh1D, NodalField1D, ScalarFn};
use crate::p2::{self, P2Function};
use crate::quadrature::{self, DEFAULT_ORDER};
use crate::tridiag::{TriDiag, PIVOT_FLOOR};

/// Relative pivot size below which the reduced SL matrix counts as singular.
pub const REDUCED_PIVOT_RATIO: f64 = 1e-12;

/// Solvability defects at or below this size are treated as zero.
pub const DEFECT_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub enum Method {
    StandardLinear,
    Spls,
    Upg(BubbleSpec),
}

#[derive(Debug, Clone)]
pub struct ProblemSpec1D {
    /// ε ≥ 0; zero selects the reduced problem.
    pub eps: f64,
    pub f: ScalarFn,
    pub mesh: Mesh1D,
    pub method: Method,
}

impl ProblemSpec1D {
    pub fn new(eps: f64, f: ScalarFn, mesh: Mesh1D, method: Method) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eps must be >= 0, got {eps}"
            )));
        }
        if let Method::Upg(b) = &method {
            if (b.h() - mesh.h()).abs() > 1e-12 * mesh.h() {
                return Err(Error::InvalidParameter(format!(
                    "bubble built for h = {} used on a mesh with h = {}",
                    b.h(),
                    mesh.h()
                )));
            }
        }
        Ok(Self {
            eps,
            f,
            mesh,
            method,
        })
    }
}

/// (f, φ_j) for the interior hats.
pub fn hat_loads(mesh: &Mesh1D, f: &ScalarFn) -> Vec<f64> {
    let h = mesh.h();
    if let Some(c) = f.constant {
        return vec![c * h; mesh.interior_count()];
    }
    let mut rhs = vec![0.0; mesh.interior_count()];
    for k in 1..=mesh.n() {
        let (a, b) = mesh.element(k);
        let left = quadrature::gauss_quad(|x| f.eval(x) * (b - x) / h, a, b, DEFAULT_ORDER);
        let right = quadrature::gauss_quad(|x| f.eval(x) * (x - a) / h, a, b, DEFAULT_ORDER);
        if k >= 2 {
            rhs[k - 2] += left;
        }
        if k < mesh.n() {
            rhs[k - 1] += right;
        }
    }
    rhs
}

/// (ε/h)·tridiag(−1, 2, −1) + tridiag(−1/2, 0, 1/2) and (f, φ_j).
pub fn assemble_sl(eps: f64, mesh: &Mesh1D, f: &ScalarFn) -> (TriDiag, Vec<f64>) {
    let r = eps / mesh.h();
    let m = TriDiag::constant(mesh.interior_count(), -r - 0.5, 2.0 * r, -r + 0.5);
    (m, hat_loads(mesh, f))
}

/// Stencil (lower, diag, upper) of the UPG matrix for ε/h and bubble
/// average b: s = ε/h + b gives (−s − 1/2, 2s, −s + 1/2).
pub fn upg_stencil(eps: f64, h: f64, b: f64) -> (f64, f64, f64) {
    let s = eps / h + b;
    (-s - 0.5, 2.0 * s, -s + 0.5)
}

/// The UPG matrix has non-positive off-diagonals exactly when ε/h + b ≥ 1/2.
pub fn upg_is_m_matrix(eps: f64, h: f64, b: f64) -> bool {
    eps / h + b >= 0.5
}

/// (f, g_j) = (f, φ_j) + (f, B_j) − (f, B_{j+1}).
pub fn upg_loads(mesh: &Mesh1D, bubble: &BubbleSpec, f: &ScalarFn) -> Vec<f64> {
    let h = mesh.h();
    if let Some(c) = f.constant {
        return vec![c * h; mesh.interior_count()];
    }
    let mut rhs = hat_loads(mesh, f);
    // bubble moments per element
    let moments: Vec<f64> = (1..=mesh.n())
        .map(|k| {
            let a = mesh.node(k - 1);
            bubble.weighted_integral(|s| f.eval(a + s), DEFAULT_ORDER)
        })
        .collect();
    for (j, r) in rhs.iter_mut().enumerate() {
        *r += moments[j] - moments[j + 1];
    }
    rhs
}

pub fn assemble_upg(
    eps: f64,
    mesh: &Mesh1D,
    bubble: &BubbleSpec,
    f: &ScalarFn,
) -> (TriDiag, Vec<f64>) {
    let (l, d, u) = upg_stencil(eps, mesh.h(), bubble.average());
    let m = TriDiag::constant(mesh.interior_count(), l, d, u);
    (m, upg_loads(mesh, bubble, f))
}

/// Outcome of the reduced SL problem tridiag(−1/2, 0, 1/2)·U = (f, φ_j).
#[derive(Debug, Clone)]
pub enum ReducedSl {
    Unique(NodalField1D),
    /// Even n: the matrix is singular with kernel ω_h. `defect` is the
    /// solvability residual Σ_{j odd}(f, φ_j); when it vanishes,
    /// `particular` is the solution orthogonal to the kernel.
    Singular {
        kernel: NodalField1D,
        defect: f64,
        particular: Option<NodalField1D>,
    },
}

impl ReducedSl {
    pub fn solution(&self) -> Option<&NodalField1D> {
        match self {
            ReducedSl::Unique(u) => Some(u),
            ReducedSl::Singular { particular, .. } => particular.as_ref(),
        }
    }
}

pub fn solve_reduced_sl(mesh: &Mesh1D, f: &ScalarFn) -> Result<ReducedSl> {
    let (m, rhs) = assemble_sl(0.0, mesh, f);
    let floor = REDUCED_PIVOT_RATIO * m.max_abs_entry();
    match m.solve_pivoted(&rhs, floor) {
        Ok(u) => Ok(ReducedSl::Unique(NodalField1D::new(mesh.clone(), u)?)),
        Err(Error::Singular { .. }) => {
            let kernel = NodalField1D::teeth_saw(mesh.clone());
            let defect: f64 = rhs.iter().step_by(2).sum();
            let particular = if defect.abs() <= DEFECT_TOL {
                Some(NodalField1D::new(mesh.clone(), reduced_chain(&rhs))?)
            } else {
                None
            };
            Ok(ReducedSl::Singular {
                kernel,
                defect,
                particular,
            })
        }
        Err(e) => Err(e),
    }
}

/// Solution of U_{j+1} = U_{j−1} + 2F_j with the odd chain shifted to be
/// orthogonal to ω_h.
fn reduced_chain(rhs: &[f64]) -> Vec<f64> {
    let m = rhs.len();
    let mut u = vec![0.0; m];
    // u[j] holds U_{j+1}
    for j in 1..=m {
        let prev = if j >= 2 { u[j - 2] } else { 0.0 };
        if j < m {
            u[j] = if j % 2 == 1 {
                prev + 2.0 * rhs[j - 1]
            } else {
                u[j - 2] + 2.0 * rhs[j - 1]
            };
        }
    }
    // the recursion above seeded the odd chain with U_1 = 0
    let odd: Vec<usize> = (0..m).step_by(2).collect();
    let shift = odd.iter().map(|&i| u[i]).sum::<f64>() / odd.len() as f64;
    for &i in &odd {
        u[i] -= shift;
    }
    u
}

/// Block system [[A₀, B], [Bᵀ, 0]] for (w_h, u_h).
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub mesh: Mesh1D,
    pub eps: f64,
    /// P2 stiffness, (2n − 1) × (2n − 1).
    pub a0_block: DMatrix<f64>,
    /// b(v, p) with test v in rows (P2) and trial p in columns (P1).
    pub b_block: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

pub fn assemble_spls(eps: f64, mesh: &Mesh1D, f: &ScalarFn) -> Result<SaddleSystem> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must be >= 0, got {eps}"
        )));
    }
    let nv = mesh.interior_count();
    let dim = p2::dimension(mesh);
    let r = eps / mesh.h();
    let mut b = DMatrix::zeros(dim, nv);
    for i in 0..nv {
        b[(i, i)] = 2.0 * r;
        if i > 0 {
            b[(i, i - 1)] = -r - 0.5;
        }
        if i + 1 < nv {
            b[(i, i + 1)] = -r + 0.5;
        }
    }
    // bubble on element k against φ_j: φ_j′ · 2h/3
    for k in 1..=mesh.n() {
        let row = nv + k - 1;
        if k <= nv {
            b[(row, k - 1)] = 2.0 / 3.0;
        }
        if k >= 2 {
            b[(row, k - 2)] = -2.0 / 3.0;
        }
    }
    Ok(SaddleSystem {
        mesh: mesh.clone(),
        eps,
        a0_block: p2::stiffness(mesh),
        b_block: b,
        rhs: p2::load(mesh, f),
    })
}

impl SaddleSystem {
    /// The full symmetric indefinite matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        let (p, q) = self.b_block.shape();
        let mut k = DMatrix::zeros(p + q, p + q);
        k.view_mut((0, 0), (p, p)).copy_from(&self.a0_block);
        k.view_mut((0, p), (p, q)).copy_from(&self.b_block);
        k.view_mut((p, 0), (q, p))
            .copy_from(&self.b_block.transpose());
        k
    }

    /// Residuals (‖A₀w + Bu − F‖, ‖Bᵀw‖).
    pub fn residuals(&self, w: &DVector<f64>, u: &DVector<f64>) -> (f64, f64) {
        let first = &self.a0_block * w + &self.b_block * u - &self.rhs;
        let second = self.b_block.transpose() * w;
        (first.amax(), second.amax())
    }
}

/// Dense LU solve of the saddle system; returns (w_h, u_h).
pub fn solve_spls(system: &SaddleSystem) -> Result<(P2Function, NodalField1D)> {
    let (p, q) = system.b_block.shape();
    let mut rhs = DVector::zeros(p + q);
    rhs.rows_mut(0, p).copy_from(&system.rhs);
    let sol = system
        .matrix()
        .lu()
        .solve(&rhs)
        .ok_or(Error::Singular { row: 0, pivot: 0.0 })?;
    let w = P2Function::from_coefficients(&system.mesh, &sol.as_slice()[..p]);
    let u = NodalField1D::new(system.mesh.clone(), sol.as_slice()[p..].to_vec())?;
    Ok((w, u))
}

/// The discrete solution u_h of a problem specification.
pub fn solve(spec: &ProblemSpec1D) -> Result<NodalField1D> {
    let mesh = &spec.mesh;
    match &spec.method {
        Method::StandardLinear => {
            if spec.eps == 0.0 {
                return match solve_reduced_sl(mesh, &spec.f)? {
                    ReducedSl::Unique(u) => Ok(u),
                    ReducedSl::Singular {
                        particular: Some(u),
                        ..
                    } => Ok(u),
                    ReducedSl::Singular { .. } => Err(Error::Singular { row: 0, pivot: 0.0 }),
                };
            }
            let (m, rhs) = assemble_sl(spec.eps, mesh, &spec.f);
            NodalField1D::new(mesh.clone(), m.solve_pivoted(&rhs, PIVOT_FLOOR)?)
        }
        Method::Upg(bubble) => {
            let (m, rhs) = assemble_upg(spec.eps, mesh, bubble, &spec.f);
            NodalField1D::new(mesh.clone(), m.solve(&rhs)?)
        }
        Method::Spls => {
            let sys = assemble_spls(spec.eps, mesh, &spec.f)?;
            Ok(solve_spls(&sys)?.1)
        }
    }
}
