//! Small dense symmetric matrices: covariance construction and a cyclic
//! Jacobi eigensolver.

use crate::error::{NppError, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 64;
const SYMMETRY_TOL: f64 = 1e-12;

/// Square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    m: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            data: vec![0.0; m * m],
        }
    }

    pub fn identity(m: usize) -> Self {
        let mut a = Self::zeros(m);
        for i in 0..m {
            a.set(i, i, 1.0);
        }
        a
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        if rows.iter().any(|r| r.len() != m) {
            return Err(NppError::invalid("matrix rows must all have length m"));
        }
        Ok(Self {
            m,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.m + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.m.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m);
        Self {
            m: self.m,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m);
        let m = self.m;
        let mut out = Self::zeros(m);
        for i in 0..m {
            for k in 0..m {
                let a = self.get(i, k);
                for j in 0..m {
                    out.data[i * m + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut a = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            a.set(i, i, v);
        }
        a
    }

    /// Largest |A_ij − A_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.m {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.m {
            for j in 0..self.m {
                if i != j {
                    s += self.get(i, j).powi(2);
                }
            }
        }
        s.sqrt()
    }
}

fn check_symmetric(a: &Matrix) -> Result<()> {
    if a.m > MAX_DIM {
        return Err(NppError::invalid(format!("matrix dimension {} exceeds {MAX_DIM}", a.m)));
    }
    if a.data.iter().any(|x| !x.is_finite()) {
        return Err(NppError::invalid("matrix has non-finite entries"));
    }
    if a.asymmetry() > SYMMETRY_TOL {
        return Err(NppError::invalid(format!(
            "matrix is not symmetric (max deviation {:e})",
            a.asymmetry()
        )));
    }
    Ok(())
}

fn check_covariance_inputs(overlaps: &Matrix, gammas: &[f64]) -> Result<()> {
    check_symmetric(overlaps)?;
    if gammas.len() != overlaps.m {
        return Err(NppError::invalid(format!(
            "{} gammas for a {}x{} overlap matrix",
            gammas.len(),
            overlaps.m,
            overlaps.m
        )));
    }
    if let Some(g) = gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(NppError::invalid(format!("gamma {g} outside [0, 1]")));
    }
    for i in 0..overlaps.m {
        if (overlaps.get(i, i) - 1.0).abs() > SYMMETRY_TOL {
            return Err(NppError::invalid("overlap matrix needs a unit diagonal"));
        }
    }
    Ok(())
}

/// Σ_ii = 1 and Σ_ij = ρ_ij γ_i γ_j.
pub fn build_covariance(overlaps: &Matrix, gammas: &[f64]) -> Result<Matrix> {
    check_covariance_inputs(overlaps, gammas)?;
    let m = overlaps.m;
    let mut s = Matrix::identity(m);
    for i in 0..m {
        for j in 0..m {
            if i != j {
                s.set(i, j, overlaps.get(i, j) * gammas[i] * gammas[j]);
            }
        }
    }
    Ok(s)
}

/// The same matrix as A Σ̄ A + (I − A²) with A = diag(γ).
pub fn build_covariance_scaled(overlaps: &Matrix, gammas: &[f64]) -> Result<Matrix> {
    check_covariance_inputs(overlaps, gammas)?;
    let a = Matrix::diagonal(gammas);
    let rest: Vec<f64> = gammas.iter().map(|g| 1.0 - g * g).collect();
    Ok(a.mul(overlaps).mul(&a).add(&Matrix::diagonal(&rest)))
}

/// All eigenvalues of a symmetric matrix, ascending, by cyclic Jacobi
/// rotations until the off-diagonal Frobenius norm is at most
/// 10⁻¹²·max(1, ‖M‖_F).
pub fn symmetric_eigenvalues(matrix: &Matrix) -> Result<Vec<f64>> {
    check_symmetric(matrix)?;
    let m = matrix.m;
    let mut a = matrix.clone();
    // Work on the exactly symmetrized copy.
    for i in 0..m {
        for j in 0..i {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    let tol = 1e-12 * matrix.frobenius().max(1.0);
    for _sweep in 0..100 {
        if a.off_diagonal_norm() <= tol {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - s * akq);
                    a.set(k, q, s * akp + c * akq);
                }
                for k in 0..m {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - s * aqk);
                    a.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..m).map(|i| a.get(i, i)).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

pub fn min_eigenvalue(matrix: &Matrix) -> Result<f64> {
    if matrix.m == 0 {
        return Err(NppError::invalid("empty matrix has no eigenvalues"));
    }
    Ok(symmetric_eigenvalues(matrix)?[0])
}
