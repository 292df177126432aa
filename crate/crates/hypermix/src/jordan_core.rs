//! Finite-dimensional backward-shift blocks and the two-point steering
//! solver on them.
//!
//! The model space is `K^{2n}` with the canonical basis `e_1..e_2n`, the
//! nilpotent backward shift `S e_1 = 0`, `S e_k = e_{k-1}`, and the
//! projection `P` onto `E = span{e_1..e_n}` along `F = span{e_{n+1}..e_2n}`.
//! Given a nonzero parameter `z` and targets `u, v` in `E`, there is a
//! unique `x` with
//!
//! ```text
//! P x = u     and     P e^{zS} x = v,
//! ```
//!
//! found by fixing the leading coordinates of `x` to `u` and solving an
//! `n x n` system `A_{n,z} xbar = w` for the tail, where
//! `A_{n,z} = { z^{j+k-1} / (j+k-1)! }`. The tail coordinates obey
//! `|x_{n+j}| <= c |z|^{-j}`, so `x -> u` and `e^{zS} x -> v` as
//! `|z| -> infinity`; [`verify_decay`] measures those rates empirically.
//!
//! Two numerical choices matter here:
//!
//! * `A_{n,z}` has entries spanning factorial scales and its conditioning
//!   degrades with `|z|`. The solver therefore works through the scaling
//!   `A_{n,z} = z D_{n,z} A_{n,1} D_{n,z}` with `D_{n,z} = diag(1, z, ...,
//!   z^{n-1})`, solving one z-independent system and rescaling.
//! * applying the dense exponential to the solution in floats cancels
//!   catastrophically for large `|z|` (the solve forces head coordinates
//!   of size `O(1)` out of terms of size `|z|^{2n-1}`). The returned image
//!   is instead assembled from the exact-by-construction head `v` and the
//!   tail formula `(e^{zS}x)_{n+j} = sum_{l>=n+j} z^{l-n-j} x_l/(l-n-j)!`,
//!   whose terms are all of the same order. The dense recomputation is
//!   kept as a test oracle at moderate `|z|` and in exact mode.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::{norm_inf, Scalar};

/// Relative residual tolerance for the scaled steering solve.
pub const SOLVE_TOLERANCE: f64 = 1e-9;

/// A `2n`-dimensional nilpotent backward-shift block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftBlock {
    n: usize,
}

impl ShiftBlock {
    /// Creates the block with half-dimension `n >= 1`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "ShiftBlock needs n >= 1");
        ShiftBlock { n }
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    /// Underlying dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// The shift matrix: ones on the superdiagonal.
    pub fn shift_matrix<T: Scalar>(&self) -> Mat<T> {
        let d = self.dim();
        Mat::from_fn(d, d, |i, j| {
            if j == i + 1 {
                T::one()
            } else {
                T::zero()
            }
        })
    }

    /// Zero-pads a coefficient vector on `E` to the full `2n` dimension.
    pub fn embed<T: Scalar>(&self, u: &[T]) -> Vec<T> {
        assert_eq!(u.len(), self.n, "E-vector must have n coefficients");
        let mut full = vec![T::zero(); self.dim()];
        full[..self.n].clone_from_slice(u);
        full
    }

    /// Projection onto `E` along `F`: the leading `n` coordinates.
    pub fn project<'a, T>(&self, x: &'a [T]) -> &'a [T] {
        assert_eq!(x.len(), self.dim());
        &x[..self.n]
    }
}

/// `e^{zS}` on a `2n`-dimensional block: upper-triangular with
/// `M[j][k] = z^{k-j}/(k-j)!`, summed exactly (the series has at most
/// `2n` nonzero terms).
pub fn exp_shift<T: Scalar>(block: &ShiftBlock, z: &T) -> Mat<T> {
    let d = block.dim();
    // coeff[m] = z^m / m!, built incrementally.
    let mut coeff = Vec::with_capacity(d);
    coeff.push(T::one());
    for m in 1..d {
        let prev = coeff[m - 1].clone();
        coeff.push(prev * z.clone() / T::from_int(m as i64));
    }
    Mat::from_fn(d, d, |i, j| {
        if j >= i {
            coeff[j - i].clone()
        } else {
            T::zero()
        }
    })
}

/// The steering matrix `A_{n,z} = { z^{j+k-1} / (j+k-1)! }` (1-based
/// indices). For `z = 0` this is the zero matrix; it is invertible for
/// every `z != 0`.
pub fn build_a_matrix<T: Scalar>(n: usize, z: &T) -> Mat<T> {
    // coeff[m] = z^{m+1} / (m+1)! for m = 0 .. 2n-2.
    let mut coeff = Vec::with_capacity(2 * n - 1);
    coeff.push(z.clone());
    for m in 1..(2 * n - 1) {
        let prev = coeff[m - 1].clone();
        coeff.push(prev * z.clone() / T::from_int((m + 1) as i64));
    }
    Mat::from_fn(n, n, |j, k| coeff[j + k].clone())
}

/// `D_{n,z} = diag(1, z, ..., z^{n-1})`.
pub fn build_d_matrix<T: Scalar>(n: usize, z: &T) -> Mat<T> {
    let mut m = Mat::zeros(n, n);
    let mut p = T::one();
    for i in 0..n {
        m[(i, i)] = p.clone();
        p = p * z.clone();
    }
    m
}

/// A steering instance: block, nonzero parameter and the two `E`-targets.
#[derive(Clone, Debug)]
pub struct SteeringProblem<T> {
    pub block: ShiftBlock,
    pub z: T,
    pub u: Vec<T>,
    pub v: Vec<T>,
}

impl<T: Scalar> SteeringProblem<T> {
    pub fn new(block: ShiftBlock, z: T, u: Vec<T>, v: Vec<T>) -> Self {
        assert_eq!(u.len(), block.half_dim());
        assert_eq!(v.len(), block.half_dim());
        SteeringProblem { block, z, u, v }
    }
}

/// The steering vector, its image under `e^{zS}` and bound witnesses.
#[derive(Clone, Debug)]
pub struct SteeringSolution<T> {
    /// The full `2n`-vector with `P x = u`.
    pub x: Vec<T>,
    /// `e^{zS} x`, head exact by construction, tail by the stable formula.
    pub image: Vec<T>,
    /// `|x_{n+j}|` for `j = 1..n`.
    pub tail_u: Vec<f64>,
    /// `|(e^{zS}x)_{n+j}|` for `j = 1..n`.
    pub tail_v: Vec<f64>,
    /// Relative residual of the scaled solve `A_{n,1} t = y`.
    pub solve_residual: f64,
}

impl<T: Scalar> SteeringSolution<T> {
    /// `(||x - u||_inf, ||image - v||_inf)` against the embedded targets.
    pub fn target_residuals(&self, problem: &SteeringProblem<T>) -> (f64, f64) {
        let n = problem.block.half_dim();
        let ru = self.x[n..]
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max);
        let head_err = self.image[..n]
            .iter()
            .zip(&problem.v)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max);
        let rv = self.image[n..]
            .iter()
            .map(Scalar::magnitude)
            .fold(head_err, f64::max);
        (ru, rv)
    }
}

/// Right-hand side `w^z` of the tail system:
/// `w_j = v_{n-j+1} - sum_{d=0}^{j-1} z^d u_{n-j+d+1} / d!` (1-based).
fn steering_rhs<T: Scalar>(n: usize, z: &T, u: &[T], v: &[T]) -> Vec<T> {
    (0..n)
        .map(|jj| {
            let mut acc = v[n - 1 - jj].clone();
            let mut zd = T::one();
            for d in 0..=jj {
                acc = acc - zd.clone() * u[n - 1 - jj + d].clone() / T::from_int(fact(d));
                zd = zd * z.clone();
            }
            acc
        })
        .collect()
}

fn fact(d: usize) -> i64 {
    (1..=d as i64).product::<i64>().max(1)
}

/// Solves the two-point steering problem through the `D_{n,z}` scaling.
pub fn solve_steering<T: Scalar>(problem: &SteeringProblem<T>) -> Result<SteeringSolution<T>> {
    let n = problem.block.half_dim();
    let z = &problem.z;
    if z.is_zero() {
        return Err(Error::ZeroParameter);
    }
    let w = steering_rhs(n, z, &problem.u, &problem.v);

    // y = D_{n,z}^{-1} w, coordinatewise w_j / z^{j-1}.
    let mut y = Vec::with_capacity(n);
    let mut zp = T::one();
    for wj in &w {
        y.push(wj.clone() / zp.clone());
        zp = zp * z.clone();
    }

    let a1: Mat<T> = build_a_matrix(n, &T::one());
    let t = a1.solve(&y)?;

    // Relative residual of the scaled system; exact mode yields zero.
    let resid_vec: Vec<T> = a1
        .matvec(&t)
        .into_iter()
        .zip(&y)
        .map(|(a, b)| a - b.clone())
        .collect();
    let y_scale = norm_inf(&y).max(f64::MIN_POSITIVE);
    let solve_residual = norm_inf(&resid_vec) / y_scale;
    if solve_residual > SOLVE_TOLERANCE {
        return Err(Error::IllConditioned {
            residual: solve_residual,
            tolerance: SOLVE_TOLERANCE,
        });
    }

    // xbar_j = t_j / z^j.
    let mut xbar = Vec::with_capacity(n);
    let mut zp = z.clone();
    for tj in &t {
        xbar.push(tj.clone() / zp.clone());
        zp = zp * z.clone();
    }

    let mut x = problem.u.clone();
    x.extend(xbar.iter().cloned());

    // Image tail: (e^{zS}x)_{n+j} = sum_{m=j}^{n} z^{m-j} xbar_m / (m-j)!.
    let mut image = problem.v.clone();
    for jj in 0..n {
        let mut acc = T::zero();
        let mut term_pow = T::one();
        for (d, xm) in xbar.iter().enumerate().skip(jj) {
            let d_rel = d - jj;
            acc = acc + term_pow.clone() * xm.clone() / T::from_int(fact(d_rel));
            term_pow = term_pow * z.clone();
        }
        image.push(acc);
    }

    let tail_u = xbar.iter().map(Scalar::magnitude).collect();
    let tail_v = image[n..].iter().map(Scalar::magnitude).collect();

    Ok(SteeringSolution {
        x,
        image,
        tail_u,
        tail_v,
        solve_residual,
    })
}

/// Per-coordinate decay diagnostics from [`verify_decay`].
#[derive(Clone, Debug, Serialize)]
pub struct DecayPerJ {
    /// Tail coordinate index, 1-based.
    pub j: usize,
    /// `sup |x_{n+j}| * |z|^j` over the sample.
    pub sup_scaled_x: f64,
    /// `sup |(e^{zS}x)_{n+j}| * |z|^j` over the sample.
    pub sup_scaled_image: f64,
    /// Fitted slope of `log sup|x_{n+j}|` against `log |z|`.
    pub slope_x: Option<f64>,
    /// Fitted slope of `log sup|(e^{zS}x)_{n+j}|` against `log |z|`.
    pub slope_image: Option<f64>,
}

/// Decay report: an empirical constant `c` for the `c |z|^{-j}` bounds and
/// per-`j` log-log slopes.
#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub c_estimate: f64,
    pub per_j: Vec<DecayPerJ>,
}

/// Runs the steering solver over a bounded family of `(u, v)` pairs and a
/// set of parameters with `|z| >= eps`, and measures the tail decay rates.
pub fn verify_decay<T: Scalar>(
    block: &ShiftBlock,
    bound_set: &[(Vec<T>, Vec<T>)],
    eps: f64,
    z_samples: &[T],
) -> Result<DecayReport> {
    assert!(eps > 0.0, "eps must be positive");
    assert!(
        z_samples.iter().all(|z| z.magnitude() >= eps),
        "all |z| must be >= eps"
    );
    let n = block.half_dim();
    // sup over pairs, per z sample and per tail coordinate.
    let mut sup_x = vec![vec![0f64; z_samples.len()]; n];
    let mut sup_img = vec![vec![0f64; z_samples.len()]; n];
    for (zi, z) in z_samples.iter().enumerate() {
        for (u, v) in bound_set {
            let problem = SteeringProblem::new(*block, z.clone(), u.clone(), v.clone());
            let sol = solve_steering(&problem)?;
            for j in 0..n {
                sup_x[j][zi] = sup_x[j][zi].max(sol.tail_u[j]);
                sup_img[j][zi] = sup_img[j][zi].max(sol.tail_v[j]);
            }
        }
    }
    let logz: Vec<f64> = z_samples.iter().map(|z| z.magnitude().ln()).collect();
    let mut per_j = Vec::with_capacity(n);
    let mut c_estimate = 0f64;
    for j in 0..n {
        let scale = |mags: &[f64]| -> f64 {
            mags.iter()
                .zip(z_samples)
                .map(|(m, z)| m * z.magnitude().powi((j + 1) as i32))
                .fold(0.0, f64::max)
        };
        let sup_scaled_x = scale(&sup_x[j]);
        let sup_scaled_image = scale(&sup_img[j]);
        c_estimate = c_estimate.max(sup_scaled_x).max(sup_scaled_image);
        per_j.push(DecayPerJ {
            j: j + 1,
            sup_scaled_x,
            sup_scaled_image,
            slope_x: fit_loglog(&logz, &sup_x[j]),
            slope_image: fit_loglog(&logz, &sup_img[j]),
        });
    }
    Ok(DecayReport { c_estimate, per_j })
}

/// Least-squares slope of `log y` against `log-domain x`; `None` when a
/// magnitude vanishes (log undefined, e.g. zero steering data).
pub fn fit_loglog(logx: &[f64], y: &[f64]) -> Option<f64> {
    if y.len() < 2 || y.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let logy: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = logx.len() as f64;
    let mx = logx.iter().sum::<f64>() / n;
    let my = logy.iter().sum::<f64>() / n;
    let sxx: f64 = logx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = logx
        .iter()
        .zip(&logy)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_complex::Complex64;
    use num_rational::BigRational;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rational_block_exp(n: usize, z: i64, d: i64) -> Mat<BigRational> {
        exp_shift(&ShiftBlock::new(n), &ratio(z, d))
    }

    #[test]
    fn exp_shift_zero_is_identity() {
        let block = ShiftBlock::new(3);
        let e: Mat<f64> = exp_shift(&block, &0.0);
        assert_eq!(e, Mat::identity(6));
    }

    #[test]
    fn exp_shift_single_jordan_step() {
        let block = ShiftBlock::new(1);
        let e: Mat<f64> = exp_shift(&block, &1.0);
        assert_eq!(e, Mat::from_rows(vec![vec![1.0, 1.0], vec![0.0, 1.0]]));
    }

    #[test]
    fn exp_shift_exact_rational_entry() {
        // n = 2, z = 2: entry (1,4) of the 4x4 block is 2^3/3! = 4/3.
        let e = rational_block_exp(2, 2, 1);
        assert_eq!(e[(0, 3)], ratio(4, 3));
    }

    #[test]
    fn exp_shift_matches_series_oracle() {
        // Brute-force oracle: sum the nilpotent series of z*S directly.
        let block = ShiftBlock::new(3);
        let z = ratio(7, 3);
        let s: Mat<BigRational> = block.shift_matrix();
        let oracle = s.scale(&z).exp_nilpotent();
        assert_eq!(exp_shift(&block, &z), oracle);
    }

    #[test]
    fn a_matrix_small_cases() {
        let a: Mat<f64> = build_a_matrix(1, &3.5);
        assert_eq!(a[(0, 0)], 3.5);

        let a = build_a_matrix(2, &ratio(1, 1));
        assert_eq!(a[(0, 0)], ratio(1, 1));
        assert_eq!(a[(0, 1)], ratio(1, 2));
        assert_eq!(a[(1, 0)], ratio(1, 2));
        assert_eq!(a[(1, 1)], ratio(1, 6));
        assert_eq!(a.det(), ratio(-1, 12));
    }

    #[test]
    fn a_matrix_zero_parameter_is_zero_matrix() {
        let a = build_a_matrix(3, &ratio(0, 1));
        assert_eq!(a, Mat::zeros(3, 3));
    }

    #[test]
    fn dia_scaling_identity_exact() {
        // A_{3,2} = 2 * D_{3,2} A_{3,1} D_{3,2} with D_{3,2} = diag(1,2,4).
        let z = ratio(2, 1);
        let lhs = build_a_matrix(3, &z);
        let d = build_d_matrix(3, &z);
        assert_eq!(d[(2, 2)], ratio(4, 1));
        let rhs = d
            .matmul(&build_a_matrix(3, &ratio(1, 1)))
            .matmul(&d)
            .scale(&z);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn steering_rejects_zero_parameter() {
        let block = ShiftBlock::new(2);
        let p = SteeringProblem::new(block, 0.0, vec![1.0, 0.0], vec![0.0, 0.0]);
        assert!(matches!(solve_steering(&p), Err(Error::ZeroParameter)));
    }

    #[test]
    fn steering_kernel_vector_is_fixed_point() {
        // u = v = (a): u lies in ker S, so x = (a, 0) works for any z.
        let block = ShiftBlock::new(1);
        for z in [0.5, 10.0, -3.0] {
            let p = SteeringProblem::new(block, z, vec![2.5], vec![2.5]);
            let sol = solve_steering(&p).unwrap();
            assert!((sol.x[0] - 2.5).abs() < 1e-15);
            assert!(sol.x[1].abs() < 1e-15);
            assert!(sol.image[1].abs() < 1e-15);
        }
    }

    #[test]
    fn steering_closed_form_n1() {
        // u = (1), v = (0), z = 10: x_2 = (v_1 - u_1)/z = -1/10, exactly.
        let block = ShiftBlock::new(1);
        let p = SteeringProblem::new(block, ratio(10, 1), vec![ratio(1, 1)], vec![ratio(0, 1)]);
        let sol = solve_steering(&p).unwrap();
        assert_eq!(sol.x, vec![ratio(1, 1), ratio(-1, 10)]);
        assert_eq!(sol.solve_residual, 0.0);
        // Exact mode: the dense exponential reproduces the image verbatim.
        let dense = exp_shift(&block, &ratio(10, 1)).matvec(&sol.x);
        assert_eq!(dense, sol.image);
    }

    #[test]
    fn steering_scaled_tails_share_one_constant() {
        // n = 2, u = v = (1,1): |x_{n+j}| |z|^j is z-independent here.
        let block = ShiftBlock::new(2);
        let mut scaled = Vec::new();
        for z in [10.0, 100.0, 1000.0] {
            let p = SteeringProblem::new(block, z, vec![1.0, 1.0], vec![1.0, 1.0]);
            let sol = solve_steering(&p).unwrap();
            let m = (sol.tail_u[0] * z).max(sol.tail_u[1] * z * z);
            scaled.push(m);
        }
        for m in &scaled {
            assert!(*m <= 12.0 + 1e-6, "scaled tail {m} escapes the constant");
            assert!((m - scaled[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn steering_correctness_random_problems() {
        // 200 random problems, n <= 5: P x = u exactly and
        // P e^{zS} x = v with relative residual <= 1e-9, where the image is
        // recomputed independently through the dense exponential.
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.gen_range(1..=5);
            let block = ShiftBlock::new(n);
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let z = sign * rng.gen_range(1.0..30.0);
            let p = SteeringProblem::new(block, z, u.clone(), v.clone());
            let sol = solve_steering(&p).unwrap();
            assert_eq!(&sol.x[..n], &u[..]);
            let dense = exp_shift(&block, &z).matvec(&sol.x);
            let scale = crate::scalar::norm_inf(&dense).max(1.0);
            for j in 0..n {
                assert!((dense[j] - v[j]).abs() / scale < 1e-9);
                assert!((dense[n + j] - sol.image[n + j]).abs() / scale < 1e-9);
            }
        }
    }

    #[test]
    fn uniqueness_against_direct_solve() {
        // Second route: solve A_{n,z} xbar = w directly (no scaling) and
        // compare tails; both must agree to solver tolerance.
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(1..=4);
            let block = ShiftBlock::new(n);
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let z: f64 = rng.gen_range(1.0..20.0);
            let p = SteeringProblem::new(block, z, u.clone(), v.clone());
            let sol = solve_steering(&p).unwrap();
            let w = steering_rhs(n, &z, &u, &v);
            let direct = build_a_matrix(n, &z).solve(&w).unwrap();
            for j in 0..n {
                assert!((direct[j] - sol.x[n + j]).abs() < 1e-9 * direct[j].abs().max(1.0));
            }
        }
    }

    #[test]
    fn decay_slopes_n1_exact() {
        let block = ShiftBlock::new(1);
        let pairs = vec![
            (vec![1.0], vec![-1.0]),
            (vec![-1.0], vec![1.0]),
            (vec![1.0], vec![0.3]),
        ];
        let zs: Vec<f64> = (1..=4).map(|d| 10f64.powi(d)).collect();
        let report = verify_decay(&block, &pairs, 1.0, &zs).unwrap();
        let slope = report.per_j[0].slope_x.unwrap();
        assert!((-1.1..=-0.9).contains(&slope), "slope {slope}");
    }

    #[test]
    fn decay_slopes_n2_random_pairs() {
        let block = ShiftBlock::new(2);
        let mut rng = StdRng::seed_from_u64(3);
        let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..20)
            .map(|_| {
                (
                    (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                    (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                )
            })
            .collect();
        let zs: Vec<f64> = (0..13).map(|i| 10f64.powf(1.0 + 0.25 * i as f64)).collect();
        let report = verify_decay(&block, &pairs, 1.0, &zs).unwrap();
        for (j, want) in [(0usize, -1.0), (1, -2.0)] {
            let sx = report.per_j[j].slope_x.unwrap();
            let si = report.per_j[j].slope_image.unwrap();
            assert!((sx - want).abs() <= 0.15, "slope_x[{j}] = {sx}");
            assert!((si - want).abs() <= 0.15, "slope_image[{j}] = {si}");
        }
    }

    #[test]
    fn decay_zero_data_gives_zero_constant() {
        let block = ShiftBlock::new(3);
        let pairs = vec![(vec![0.0; 3], vec![0.0; 3])];
        let zs = vec![10.0, 100.0];
        let report = verify_decay(&block, &pairs, 1.0, &zs).unwrap();
        assert_eq!(report.c_estimate, 0.0);
        assert!(report.per_j.iter().all(|p| p.slope_x.is_none()));
    }

    #[test]
    fn limit_behavior_residuals_fall() {
        let mut rng = StdRng::seed_from_u64(11);
        for n in 1..=4 {
            let block = ShiftBlock::new(n);
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut prev: Option<(f64, f64)> = None;
            let mut last = (f64::MAX, f64::MAX);
            for decade in 1..=6 {
                let z = 10f64.powi(decade);
                let p = SteeringProblem::new(block, z, u.clone(), v.clone());
                let sol = solve_steering(&p).unwrap();
                let (ru, rv) = sol.target_residuals(&p);
                if let Some((pu, pv)) = prev {
                    if decade >= 3 {
                        assert!(ru <= pu * (1.0 + 1e-12));
                        assert!(rv <= pv * (1.0 + 1e-12));
                    }
                }
                prev = Some((ru, rv));
                last = (ru, rv);
            }
            assert!(last.0 <= 1e-4, "n={n}: ||x-u|| = {} at 1e6", last.0);
            assert!(last.1 <= 1e-4, "n={n}: ||img-v|| = {} at 1e6", last.1);
        }
    }

    #[test]
    fn exponential_homomorphism_float() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let block = ShiftBlock::new(n);
            let z = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let w = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let ez = exp_shift(&block, &z);
            let ew = exp_shift(&block, &w);
            let rhs = exp_shift(&block, &(z + w));
            // Error scale of the float product is the factor-norm product
            // (the two exponentials can cancel down to near-identity).
            let scale = (ez.max_magnitude() * ew.max_magnitude())
                .max(rhs.max_magnitude())
                .max(1.0);
            assert!(ez.matmul(&ew).max_abs_diff(&rhs) / scale < 1e-12);
        }
    }

    #[test]
    fn dia_identity_complex_float() {
        let z = Complex64::new(0.0, 1.0);
        for n in 1..=8 {
            let lhs = build_a_matrix(n, &z);
            let d = build_d_matrix(n, &z);
            let rhs = d
                .matmul(&build_a_matrix(n, &Complex64::new(1.0, 0.0)))
                .matmul(&d)
                .scale(&z);
            assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * rhs.max_magnitude().max(1.0));
        }
    }
}
