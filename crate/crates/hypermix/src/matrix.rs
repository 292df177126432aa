//! Minimal dense linear algebra over any [`Scalar`] backend.
//!
//! Everything here is desk scale (dimensions in the tens, occasionally a
//! few thousand for flattened grids), so a plain row-major matrix with
//! Gaussian elimination is both sufficient and auditable. Running the
//! same elimination over `BigRational` gives exact determinants and exact
//! solves, which several acceptance checks require.

use crate::error::Error;
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds an `n x n` matrix from an entry generator (row, col), 0-based.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn conj_transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &T) -> Self {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out: Mat<T> = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matvec");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for j in 0..self.cols {
                    acc = acc + self[(i, j)].clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Mat::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)].clone();
                if a.is_zero() {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        out[(i * other.rows + p, j * other.cols + q)] =
                            a.clone() * other[(p, q)].clone();
                    }
                }
            }
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// Determinant by Gaussian elimination with magnitude pivoting.
    /// Exact over rationals.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| a[(i, col)].abs_cmp(&a[(j, col)]));
            let pivot = match pivot {
                Some(p) => p,
                None => return T::zero(),
            };
            if a[(pivot, col)].is_zero() {
                return T::zero();
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let d = a[(col, col)].clone();
            det = det * d.clone();
            for i in col + 1..n {
                let factor = a[(i, col)].clone() / d.clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let sub = factor.clone() * a[(col, j)].clone();
                    a[(i, j)] = a[(i, j)].clone() - sub;
                }
            }
        }
        det
    }

    /// Solves `self * x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>, Error> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(self.rows, b.len());
        let n = self.rows;
        let mut a = self.clone();
        let mut x: Vec<T> = b.to_vec();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].abs_cmp(&a[(j, col)]))
                .expect("non-empty pivot range");
            if a[(pivot, col)].is_zero() {
                return Err(Error::SingularMatrix);
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                x.swap(pivot, col);
            }
            let d = a[(col, col)].clone();
            for i in col + 1..n {
                let factor = a[(i, col)].clone() / d.clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let sub = factor.clone() * a[(col, j)].clone();
                    a[(i, j)] = a[(i, j)].clone() - sub;
                }
                let sub = factor * x[col].clone();
                x[i] = x[i].clone() - sub;
            }
        }
        for col in (0..n).rev() {
            let mut acc = x[col].clone();
            for j in col + 1..n {
                acc = acc - a[(col, j)].clone() * x[j].clone();
            }
            x[col] = acc / a[(col, col)].clone();
        }
        Ok(x)
    }

    /// Rank via elimination. For float backends entries below `tol`
    /// (in magnitude, relative to the largest entry) are treated as zero;
    /// rationals use exact zero tests.
    pub fn rank(&self, tol: f64) -> usize {
        let mut a = self.clone();
        let scale = self.max_magnitude().max(1.0);
        let cutoff = if T::is_exact() { 0.0 } else { tol * scale };
        let mut rank = 0;
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let pivot = (row..self.rows)
                .max_by(|&i, &j| a[(i, col)].abs_cmp(&a[(j, col)]))
                .unwrap();
            let ok = if T::is_exact() {
                !a[(pivot, col)].is_zero()
            } else {
                a[(pivot, col)].magnitude() > cutoff
            };
            if !ok {
                continue;
            }
            a.swap_rows(pivot, row);
            let d = a[(row, col)].clone();
            for i in row + 1..self.rows {
                let factor = a[(i, col)].clone() / d.clone();
                if factor.is_zero() {
                    continue;
                }
                for j in col..self.cols {
                    let sub = factor.clone() * a[(row, j)].clone();
                    a[(i, j)] = a[(i, j)].clone() - sub;
                }
            }
            rank += 1;
            row += 1;
        }
        rank
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for col in 0..self.cols {
            self.data.swap(i * self.cols + col, j * self.cols + col);
        }
    }

    /// Exponential of a nilpotent matrix: the Taylor series summed until a
    /// power vanishes identically. Terms are accumulated as
    /// `term <- term * (A / k)`, so no factorial overflows. Panics if the
    /// matrix fails to nilpotate within `rows` steps.
    pub fn exp_nilpotent(&self) -> Self {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut sum = Mat::identity(n);
        let mut term = Mat::identity(n);
        for k in 1..=n {
            term = term.matmul(self);
            let inv_k = T::one() / T::from_int(k as i64);
            term = term.scale(&inv_k);
            if term.data.iter().all(Zero::is_zero) {
                return sum;
            }
            sum = sum.add(&term);
        }
        assert!(
            self.matpow_is_zero(n),
            "exp_nilpotent called on a non-nilpotent matrix"
        );
        sum
    }

    fn matpow_is_zero(&self, p: usize) -> bool {
        let mut acc = Mat::identity(self.rows);
        for _ in 0..p {
            acc = acc.matmul(self);
            if acc.data.iter().all(Zero::is_zero) {
                return true;
            }
        }
        acc.data.iter().all(Zero::is_zero)
    }

    /// `max_ij |self_ij - other_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }
}

use num_traits::Zero;

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense float exponential by scaling and squaring with a Taylor kernel.
/// Used as an independent oracle against the structured exponentials
/// elsewhere in the crate; not performance critical.
pub fn expm_scaling_squaring(a: &Mat<f64>) -> Mat<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let norm = (0..n)
        .map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(&(0.5f64.powi(s as i32)));
    let mut sum = Mat::identity(n);
    let mut term = Mat::identity(n);
    for k in 1..200 {
        term = term.matmul(&scaled).scale(&(1.0 / k as f64));
        let mag = term.max_magnitude();
        sum = sum.add(&term);
        if mag < 1e-300 || mag < 1e-18 * sum.max_magnitude() {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..s {
        result = result.matmul(&result);
    }
    result
}

/// Complex variant of [`expm_scaling_squaring`].
pub fn expm_scaling_squaring_c(a: &Mat<num_complex::Complex64>) -> Mat<num_complex::Complex64> {
    use num_complex::Complex64;
    let n = a.nrows();
    let norm = (0..n)
        .map(|i| a.row(i).iter().map(|x| x.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(&Complex64::new(0.5f64.powi(s as i32), 0.0));
    let mut sum = Mat::identity(n);
    let mut term = Mat::identity(n);
    for k in 1..200 {
        term = term
            .matmul(&scaled)
            .scale(&Complex64::new(1.0 / k as f64, 0.0));
        let mag = term.max_magnitude();
        sum = sum.add(&term);
        if mag < 1e-300 || mag < 1e-18 * sum.max_magnitude() {
            break;
        }
    }
    let mut result = sum;
    for _ in 0..s {
        result = result.matmul(&result);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    #[test]
    fn rational_det_hilbert_like() {
        // det [[1, 1/2], [1/2, 1/6]] = 1/6 - 1/4 = -1/12, exactly.
        let m = Mat::from_rows(vec![
            vec![ratio(1, 1), ratio(1, 2)],
            vec![ratio(1, 2), ratio(1, 6)],
        ]);
        assert_eq!(m.det(), ratio(-1, 12));
    }

    #[test]
    fn solve_roundtrip_rational() {
        let m = Mat::from_rows(vec![
            vec![ratio(2, 1), ratio(1, 1)],
            vec![ratio(1, 1), ratio(3, 1)],
        ]);
        let b = vec![ratio(5, 1), ratio(10, 1)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.matvec(&x), b);
    }

    #[test]
    fn singular_solve_errors() {
        let m: Mat<f64> = Mat::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(m.solve(&[1.0, 0.0]), Err(Error::SingularMatrix)));
    }

    #[test]
    fn exp_nilpotent_single_jordan_step() {
        let mut s: Mat<f64> = Mat::zeros(2, 2);
        s[(0, 1)] = 1.0;
        let e = s.exp_nilpotent();
        assert_eq!(e[(0, 0)], 1.0);
        assert_eq!(e[(0, 1)], 1.0);
        assert_eq!(e[(1, 0)], 0.0);
        assert_eq!(e[(1, 1)], 1.0);
    }

    #[test]
    fn expm_oracle_matches_nilpotent_closed_form() {
        let mut s: Mat<f64> = Mat::zeros(3, 3);
        s[(0, 1)] = 2.0;
        s[(1, 2)] = 2.0;
        let exact = s.exp_nilpotent();
        let oracle = expm_scaling_squaring(&s);
        assert!(exact.max_abs_diff(&oracle) < 1e-12);
    }

    #[test]
    fn kron_identity_blocks() {
        let a: Mat<f64> = Mat::identity(2);
        let b = Mat::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let k = a.kron(&b);
        assert_eq!(k[(0, 1)], 2.0);
        assert_eq!(k[(3, 3)], 4.0);
        assert_eq!(k[(0, 2)], 0.0);
    }

    #[test]
    fn rank_rational_exact() {
        let m = Mat::from_rows(vec![
            vec![ratio(1, 1), ratio(2, 1), ratio(3, 1)],
            vec![ratio(2, 1), ratio(4, 1), ratio(6, 1)],
            vec![ratio(0, 1), ratio(1, 1), ratio(1, 1)],
        ]);
        assert_eq!(m.rank(0.0), 2);
        let id: Mat<BigRational> = Mat::identity(4);
        assert_eq!(id.rank(0.0), 4);
    }
}
