//! Tridiagonal matrices stored by diagonals.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Pivot magnitude below which a tridiagonal solve reports singularity.
pub const PIVOT_FLOOR: f64 = 1e-300;

/// Tridiagonal matrix of order m, stored as three diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct TriDiag {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl TriDiag {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let m = diag.len();
        let off = m.saturating_sub(1);
        if lower.len() != off {
            return Err(Error::DimensionMismatch {
                expected: off,
                got: lower.len(),
            });
        }
        if upper.len() != off {
            return Err(Error::DimensionMismatch {
                expected: off,
                got: upper.len(),
            });
        }
        Ok(Self { lower, diag, upper })
    }

    /// Constant-stencil matrix tridiag(a, b, c) of order m.
    pub fn constant(m: usize, a: f64, b: f64, c: f64) -> Self {
        let off = m.saturating_sub(1);
        Self {
            lower: vec![a; off],
            diag: vec![b; m],
            upper: vec![c; off],
        }
    }

    pub fn identity(m: usize) -> Self {
        Self::constant(m, 0.0, 1.0, 0.0)
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Entry (i, j), zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if j + 1 == i {
            self.lower[j]
        } else if i + 1 == j {
            self.upper[i]
        } else {
            0.0
        }
    }

    /// Row i as (lower, diag, upper); missing neighbours are reported as 0.
    pub fn row(&self, i: usize) -> (f64, f64, f64) {
        let l = if i > 0 { self.lower[i - 1] } else { 0.0 };
        let u = if i + 1 < self.order() {
            self.upper[i]
        } else {
            0.0
        };
        (l, self.diag[i], u)
    }

    /// self * a + other * b.
    pub fn scaled_sum(&self, a: f64, other: &TriDiag, b: f64) -> TriDiag {
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        TriDiag {
            lower: mix(&self.lower, &other.lower),
            diag: mix(&self.diag, &other.diag),
            upper: mix(&self.upper, &other.upper),
        }
    }

    pub fn scale(&self, a: f64) -> TriDiag {
        let s = |x: &[f64]| x.iter().map(|p| a * p).collect();
        TriDiag {
            lower: s(&self.lower),
            diag: s(&self.diag),
            upper: s(&self.upper),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let m = self.order();
        (0..m)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < m {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.order();
        DMatrix::from_fn(m, m, |i, j| self.get(i, j))
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.lower
            .iter()
            .chain(&self.diag)
            .chain(&self.upper)
            .fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    /// True when all off-diagonals are non-positive and the diagonal positive.
    pub fn has_m_matrix_sign_pattern(&self) -> bool {
        self.diag.iter().all(|&d| d > 0.0)
            && self.lower.iter().chain(&self.upper).all(|&v| v <= 0.0)
    }

    /// Solve `self * x = rhs`.
    ///
    /// Uses plain forward substitution when the upper diagonal is identically
    /// zero, the Thomas algorithm otherwise.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let m = self.order();
        if rhs.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: rhs.len(),
            });
        }
        if m == 0 {
            return Ok(Vec::new());
        }
        if self.upper.iter().all(|&u| u == 0.0) {
            return self.forward_substitute(rhs);
        }
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        let mut pivot = self.diag[0];
        if pivot.abs() < PIVOT_FLOOR {
            return Err(Error::Singular { row: 0, pivot });
        }
        if m > 1 {
            c[0] = self.upper[0] / pivot;
        }
        d[0] = rhs[0] / pivot;
        for i in 1..m {
            pivot = self.diag[i] - self.lower[i - 1] * c[i - 1];
            if pivot.abs() < PIVOT_FLOOR {
                return Err(Error::Singular { row: i, pivot });
            }
            if i + 1 < m {
                c[i] = self.upper[i] / pivot;
            }
            d[i] = (rhs[i] - self.lower[i - 1] * d[i - 1]) / pivot;
        }
        let mut x = d;
        for i in (0..m - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }

    /// Solve `self * x = rhs` by Gaussian elimination with partial pivoting
    /// (row interchanges between neighbours, one extra superdiagonal of
    /// fill). A final pivot smaller than `floor` in magnitude is reported as
    /// singular.
    pub fn solve_pivoted(&self, rhs: &[f64], floor: f64) -> Result<Vec<f64>> {
        let m = self.order();
        if rhs.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: rhs.len(),
            });
        }
        if m == 0 {
            return Ok(Vec::new());
        }
        let mut d = self.diag.clone();
        let mut du = self.upper.clone();
        let mut dl = self.lower.clone();
        let mut du2 = vec![0.0; m.saturating_sub(2)];
        let mut b = rhs.to_vec();
        for i in 0..m - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    return Err(Error::Singular { row: i, pivot: 0.0 });
                }
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                b[i + 1] -= fact * b[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 2 < m {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du2[i];
                }
                du[i] = temp;
                b.swap(i, i + 1);
                b[i + 1] -= fact * b[i];
            }
            dl[i] = 0.0;
        }
        if let Some((row, &pivot)) = d.iter().enumerate().find(|(_, p)| p.abs() < floor) {
            return Err(Error::Singular { row, pivot });
        }
        let mut x = b;
        x[m - 1] /= d[m - 1];
        if m > 1 {
            x[m - 2] = (x[m - 2] - du[m - 2] * x[m - 1]) / d[m - 2];
        }
        for i in (0..m.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        Ok(x)
    }

    fn forward_substitute(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let m = self.order();
        let mut x = vec![0.0; m];
        for i in 0..m {
            let pivot = self.diag[i];
            if pivot.abs() < PIVOT_FLOOR {
                return Err(Error::Singular { row: i, pivot });
            }
            let carry = if i > 0 {
                self.lower[i - 1] * x[i - 1]
            } else {
                0.0
            };
            x[i] = (rhs[i] - carry) / pivot;
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_returns_rhs() {
        let rhs = vec![1.0, -2.0, 3.5, 4.0];
        assert_eq!(TriDiag::identity(4).solve(&rhs).unwrap(), rhs);
    }

    #[test]
    fn lower_bidiagonal_gives_partial_sums() {
        let m = TriDiag::constant(6, -1.0, 1.0, 0.0);
        let f = vec![0.5, 1.0, -0.25, 2.0, 0.0, 3.0];
        let x = m.solve(&f).unwrap();
        let mut acc = 0.0;
        for (xi, fi) in x.iter().zip(&f) {
            acc += fi;
            assert_eq!(*xi, acc);
        }
    }

    #[test]
    fn laplacian_system() {
        let m = TriDiag::constant(4, -1.0, 2.0, -1.0);
        let x = m.solve(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let m = TriDiag::constant(4, -0.5, 0.0, 0.5);
        assert!(matches!(
            m.solve(&[1.0; 4]),
            Err(Error::Singular { row: 0, .. })
        ));
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(TriDiag::new(vec![1.0], vec![1.0; 3], vec![1.0, 2.0]).is_err());
        assert!(TriDiag::identity(3).solve(&[1.0; 2]).is_err());
    }

    proptest! {
        #[test]
        fn thomas_matches_dense_lu_on_dominant_systems(
            m in 1usize..40,
            seed in prop::collection::vec(-1.0f64..1.0, 160),
        ) {
            let lower: Vec<f64> = seed[..m.saturating_sub(1)].to_vec();
            let upper: Vec<f64> = seed[40..40 + m.saturating_sub(1)].to_vec();
            let diag: Vec<f64> = seed[80..80 + m].iter().map(|v| 2.5 + v).collect();
            let rhs: Vec<f64> = seed[120..120 + m].to_vec();
            let t = TriDiag::new(lower, diag, upper).unwrap();
            let x = t.solve(&rhs).unwrap();
            let dense = t.to_dense().lu().solve(&nalgebra::DVector::from_vec(rhs.clone())).unwrap();
            for i in 0..m {
                prop_assert!((x[i] - dense[i]).abs() < 1e-12);
            }
            let back = t.matvec(&x);
            for i in 0..m {
                prop_assert!((back[i] - rhs[i]).abs() < 1e-12);
            }
        }

        #[test]
        fn pivoted_solve_handles_weak_diagonals(
            m in 1usize..40,
            seed in prop::collection::vec(-1.0f64..1.0, 160),
            weak in 0.0f64..1e-6,
        ) {
            let lower: Vec<f64> = seed[..m.saturating_sub(1)].iter().map(|v| v - 1.5).collect();
            let upper: Vec<f64> = seed[40..40 + m.saturating_sub(1)].iter().map(|v| v + 1.5).collect();
            let diag: Vec<f64> = seed[80..80 + m].iter().map(|v| weak * v).collect();
            let rhs: Vec<f64> = seed[120..120 + m].to_vec();
            let t = TriDiag::new(lower, diag, upper).unwrap();
            let lu = t.to_dense().lu();
            prop_assume!(lu.determinant().abs() > 1e-6);
            let x = t.solve_pivoted(&rhs, PIVOT_FLOOR).unwrap();
            let dense = lu.solve(&nalgebra::DVector::from_vec(rhs.clone())).unwrap();
            let scale = dense.amax().max(1.0);
            for i in 0..m {
                prop_assert!((x[i] - dense[i]).abs() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn pivoted_solve_reports_structural_singularity() {
        // central-difference convection of odd order is singular
        let t = TriDiag::constant(3, -0.5, 0.0, 0.5);
        let floor = 1e-12 * t.max_abs_entry();
        assert!(matches!(
            t.solve_pivoted(&[1.0; 3], floor),
            Err(Error::Singular { .. })
        ));
        let t = TriDiag::constant(4, -0.5, 0.0, 0.5);
        let rhs = [1.0, 0.0, 1.0, 2.0];
        let x = t.solve_pivoted(&rhs, floor).unwrap();
        let back = t.matvec(&x);
        for (a, b) in back.iter().zip(&rhs) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
