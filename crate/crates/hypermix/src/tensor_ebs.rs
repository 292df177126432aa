//! Commuting tuples of backward shifts on a product index grid, their
//! kernel-image subspaces, and multi-parameter steering.
//!
//! The grid is `M = {1..2n_1} x ... x {1..2n_k}` with canonical basis
//! `{e_m}`, and the `j`-th operator acts by `T_j e_m = e_{m - e_j}` when
//! `m_j > 1`, zero otherwise; equivalently `T_j = I (x) .. (x) S_j (x) ..
//! (x) I` for the single-block shift `S_j`. The tuple commutes exactly,
//! and the span of the subspaces
//!
//! ```text
//! kappa(n, T) = T_1^{n_1} .. T_k^{n_k} ( ker T_1^{2n_1} cap .. cap ker T_k^{2n_k} )
//! ```
//!
//! is the core block `E = span{e_m : m in M_0}`, `M_0 = {1..n_1} x ... x
//! {1..n_k}`.
//!
//! Steering a pair `(u, v)` of core vectors along a parameter sequence
//! `z_m` with `|z_m| -> infinity` follows the product construction: each
//! grid axis is steered independently with the single-block solver, and
//! the per-axis factors are combined as outer products. At a given step,
//! axes whose parameter coordinate has reached the large threshold `tau`
//! are steered; the remaining small axes carry the factor `e^{-z_j S_j}`
//! applied to the target coordinate, which the group action then undoes
//! exactly. If no axis is large the step is reported as unsteerable
//! rather than failing the whole run.
//!
//! Images are assembled from per-axis steering images (outer products),
//! never by multiplying the assembled vector with a dense exponential:
//! at large `|z|` the dense route cancels catastrophically in floats.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jordan_core::{exp_shift, solve_steering, ShiftBlock, SteeringProblem};
use crate::matrix::Mat;
use crate::scalar::{norm_inf, Scalar};

/// Default cap on the flattened product dimension.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Default large-coordinate classification threshold.
pub const DEFAULT_LARGE_THRESHOLD: f64 = 10.0;

/// A `k`-tuple of pairwise commuting backward shifts on the flattened
/// product grid. Multi-indices are stored 0-based, row-major with the
/// last axis fastest; the paper-style coordinate `m_j` is `c_j + 1`.
#[derive(Clone, Debug)]
pub struct TensorTuple {
    dims: Vec<usize>,
    sides: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
    cap: usize,
}

impl TensorTuple {
    pub fn new(dims: &[usize]) -> Result<Self> {
        Self::with_cap(dims, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(dims: &[usize], cap: usize) -> Result<Self> {
        assert!(!dims.is_empty(), "need k >= 1 axes");
        assert!(dims.iter().all(|&n| n >= 1), "all n_j must be >= 1");
        let sides: Vec<usize> = dims.iter().map(|&n| 2 * n).collect();
        let mut total = 1usize;
        for &s in &sides {
            total = total.checked_mul(s).ok_or(Error::CapExceeded {
                requested: usize::MAX,
                cap,
            })?;
        }
        if total > cap {
            return Err(Error::CapExceeded {
                requested: total,
                cap,
            });
        }
        let mut strides = vec![1usize; dims.len()];
        for j in (0..dims.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * sides[j + 1];
        }
        Ok(TensorTuple {
            dims: dims.to_vec(),
            sides,
            strides,
            total,
            cap,
        })
    }

    pub fn k(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Flattened dimension, the product of the `2 n_j`.
    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn block(&self, axis: usize) -> ShiftBlock {
        ShiftBlock::new(self.dims[axis])
    }

    /// Flat index of a 0-based multi-index.
    pub fn flat(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    /// 0-based multi-index of a flat index.
    pub fn coords(&self, mut flat: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.k());
        for j in 0..self.k() {
            out.push(flat / self.strides[j]);
            flat %= self.strides[j];
        }
        out
    }

    /// Flat indices of the core block `M_0` (all coordinates `< n_j`),
    /// sorted.
    pub fn core_indices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        let mut coords = vec![0usize; self.k()];
        loop {
            out.push(self.flat(&coords));
            let mut j = self.k();
            loop {
                if j == 0 {
                    out.sort_unstable();
                    return out;
                }
                j -= 1;
                coords[j] += 1;
                if coords[j] < self.dims[j] {
                    break;
                }
                coords[j] = 0;
            }
        }
    }

    /// Applies `T_axis` to a flattened vector.
    pub fn apply_shift<T: Scalar>(&self, axis: usize, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.total);
        let stride = self.strides[axis];
        let side = self.sides[axis];
        let mut out = vec![T::zero(); self.total];
        for (i, item) in out.iter_mut().enumerate() {
            let c = (i / stride) % side;
            if c + 1 < side {
                *item = x[i + stride].clone();
            }
        }
        out
    }

    /// Dense matrix of `T_axis`; for tests and small grids.
    pub fn shift_matrix<T: Scalar>(&self, axis: usize) -> Mat<T> {
        let mut m = Mat::zeros(self.total, self.total);
        for col in 0..self.total {
            let c = (col / self.strides[axis]) % self.sides[axis];
            if c >= 1 {
                m[(col - self.strides[axis], col)] = T::one();
            }
        }
        m
    }

    /// Applies `e^{z S_axis}` along one axis (exact nilpotent series per
    /// fiber, numerically stable for moderate `|z|`).
    pub fn apply_axis_exp<T: Scalar>(&self, axis: usize, z: &T, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.total);
        let side = self.sides[axis];
        let stride = self.strides[axis];
        // coeff[d] = z^d / d!
        let mut coeff = Vec::with_capacity(side);
        coeff.push(T::one());
        for d in 1..side {
            let prev = coeff[d - 1].clone();
            coeff.push(prev * z.clone() / T::from_int(d as i64));
        }
        let mut out = vec![T::zero(); self.total];
        for (i, item) in out.iter_mut().enumerate() {
            let c = (i / stride) % side;
            let mut acc = T::zero();
            for l in c..side {
                let xv = &x[i + (l - c) * stride];
                if xv.is_zero() {
                    continue;
                }
                acc = acc + coeff[l - c].clone() * xv.clone();
            }
            *item = acc;
        }
        out
    }

    /// Applies `e^{<z,T>}` by composing the per-axis exponentials
    /// (the factors commute, so the order is immaterial).
    pub fn apply_exp<T: Scalar>(&self, z: &[T], x: &[T]) -> Vec<T> {
        assert_eq!(z.len(), self.k());
        let mut v = x.to_vec();
        for (axis, zj) in z.iter().enumerate() {
            if !zj.is_zero() {
                v = self.apply_axis_exp(axis, zj, &v);
            }
        }
        v
    }

    /// Dense `e^{<z,T>}` via the exact nilpotent series of the sum.
    /// Equals the Kronecker product of the per-factor exponentials.
    pub fn exp_linear_combination<T: Scalar>(&self, z: &[T]) -> Result<Mat<T>> {
        assert_eq!(z.len(), self.k());
        if self.total > self.cap {
            return Err(Error::CapExceeded {
                requested: self.total,
                cap: self.cap,
            });
        }
        let mut sum: Mat<T> = Mat::zeros(self.total, self.total);
        for (axis, zj) in z.iter().enumerate() {
            if !zj.is_zero() {
                sum = sum.add(&self.shift_matrix(axis).scale(zj));
            }
        }
        Ok(sum.exp_nilpotent())
    }

    /// Exact commutation `T_j T_l = T_l T_j` on every basis vector,
    /// checked by index arithmetic.
    pub fn commutes_exactly(&self) -> bool {
        for j in 0..self.k() {
            for l in (j + 1)..self.k() {
                for flat in 0..self.total {
                    let mut e = vec![0f64; self.total];
                    e[flat] = 1.0;
                    let a = self.apply_shift(j, &self.apply_shift(l, &e));
                    let b = self.apply_shift(l, &self.apply_shift(j, &e));
                    if a != b {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// A kernel-image subspace `kappa(n, T)`, spanned by grid basis vectors.
#[derive(Clone, Debug, Serialize)]
pub struct KernelSubspace {
    /// The defining multi-index, 1-based as in the kappa definition.
    pub n: Vec<usize>,
    /// Flat indices of the spanning basis vectors.
    pub basis: Vec<usize>,
}

impl KernelSubspace {
    /// Re-verifies membership: each basis vector must equal `T^n y` for a
    /// witness `y` annihilated by every `T_j^{2n_j}`.
    pub fn verify(&self, tuple: &TensorTuple) -> bool {
        self.basis.iter().all(|&b| {
            let coords = tuple.coords(b);
            // Witness y = e_{b + n} (0-based shift by n).
            let witness: Vec<usize> = coords.iter().zip(&self.n).map(|(c, nj)| c + nj).collect();
            if witness
                .iter()
                .enumerate()
                .any(|(j, &c)| c >= tuple.sides[j])
            {
                return false;
            }
            let mut y = vec![0f64; tuple.total_dim()];
            y[tuple.flat(&witness)] = 1.0;
            // T_j^{2 n_j} y must vanish.
            for (j, &nj) in self.n.iter().enumerate() {
                let mut v = y.clone();
                for _ in 0..(2 * nj) {
                    v = tuple.apply_shift(j, &v);
                }
                if v.iter().any(|&t| t != 0.0) {
                    return false;
                }
            }
            // T^n y must reproduce the basis vector.
            let mut v = y;
            for (j, &nj) in self.n.iter().enumerate() {
                for _ in 0..nj {
                    v = tuple.apply_shift(j, &v);
                }
            }
            v.iter()
                .enumerate()
                .all(|(i, &t)| if i == b { t == 1.0 } else { t == 0.0 })
        })
    }
}

/// Computes `kappa(n, T)` definitionally: intersect the kernels of the
/// `T_j^{2n_j}` (spanned by basis vectors, since shifts map basis vectors
/// to basis vectors or zero) and push the intersection through
/// `T_1^{n_1} .. T_k^{n_k}`.
pub fn compute_kappa(tuple: &TensorTuple, n: &[usize]) -> Result<KernelSubspace> {
    assert_eq!(n.len(), tuple.k());
    for (j, &nj) in n.iter().enumerate() {
        if nj < 1 || nj > tuple.dims[j] {
            return Err(Error::IndexOutOfRange(format!(
                "n[{j}] = {nj} outside 1..={}",
                tuple.dims[j]
            )));
        }
    }
    let mut basis = Vec::new();
    for flat in 0..tuple.total_dim() {
        let coords = tuple.coords(flat);
        // e_flat lies in every ker T_j^{2n_j} iff coord_j <= 2n_j - 1.
        if coords.iter().zip(n).all(|(&c, &nj)| c <= 2 * nj - 1) {
            // Image under T^n is e_{coords - n} when all coords >= n_j.
            if coords.iter().zip(n).all(|(&c, &nj)| c >= nj) {
                let img: Vec<usize> = coords.iter().zip(n).map(|(&c, &nj)| c - nj).collect();
                basis.push(tuple.flat(&img));
            }
        }
    }
    basis.sort_unstable();
    basis.dedup();
    Ok(KernelSubspace {
        n: n.to_vec(),
        basis,
    })
}

/// Per-step outcome of [`steer_tensor`].
#[derive(Clone, Debug)]
pub struct SteerStep<T> {
    pub z: Vec<T>,
    /// Axes classified large (steered) at this step.
    pub large_axes: Vec<usize>,
    /// The steering vector, when the step is steerable.
    pub x: Option<Vec<T>>,
    /// `e^{<z,T>} x`, assembled from per-axis steering images.
    pub image: Option<Vec<T>>,
    /// `||x - u||_inf`.
    pub res_u: Option<f64>,
    /// `||image - v||_inf`.
    pub res_v: Option<f64>,
    /// Present when the step could not be steered.
    pub failure: Option<String>,
}

/// Result of steering a `(u, v)` pair along a parameter sequence.
#[derive(Clone, Debug)]
pub struct TensorSteering<T> {
    pub steps: Vec<SteerStep<T>>,
    /// Large-coordinate threshold used for classification.
    pub threshold: f64,
}

impl<T> TensorSteering<T> {
    /// Residual curves `(|z_m|, res_u, res_v)` of the successful steps.
    pub fn residual_curves(&self) -> Vec<(f64, f64, f64)>
    where
        T: Scalar,
    {
        self.steps
            .iter()
            .filter_map(|s| {
                let ru = s.res_u?;
                let rv = s.res_v?;
                let mag = s.z.iter().map(|c| c.magnitude().powi(2)).sum::<f64>();
                Some((mag.sqrt(), ru, rv))
            })
            .collect()
    }
}

/// Steers the pair `(u, v)` of core-supported vectors along `z_seq`.
/// `tau` is the large-coordinate threshold ([`DEFAULT_LARGE_THRESHOLD`]).
pub fn steer_tensor<T: Scalar>(
    tuple: &TensorTuple,
    u: &[T],
    v: &[T],
    z_seq: &[Vec<T>],
    tau: f64,
) -> Result<TensorSteering<T>> {
    assert_eq!(u.len(), tuple.total_dim());
    assert_eq!(v.len(), tuple.total_dim());
    let core: std::collections::HashSet<usize> = tuple.core_indices().into_iter().collect();
    for (i, (a, b)) in u.iter().zip(v).enumerate() {
        if (!a.is_zero() || !b.is_zero()) && !core.contains(&i) {
            return Err(Error::SupportOutsideCore);
        }
    }
    let mags: Vec<f64> = z_seq
        .iter()
        .map(|z| z.iter().map(|c| c.magnitude().powi(2)).sum::<f64>().sqrt())
        .collect();
    assert!(
        mags.windows(2).all(|w| w[0] <= w[1] + 1e-12),
        "|z_m| must be nondecreasing"
    );

    let mut steps = Vec::with_capacity(z_seq.len());
    for z in z_seq {
        assert_eq!(z.len(), tuple.k());
        let large_axes: Vec<usize> = (0..tuple.k())
            .filter(|&j| z[j].magnitude() >= tau)
            .collect();
        if large_axes.is_empty() {
            steps.push(SteerStep {
                z: z.clone(),
                large_axes,
                x: None,
                image: None,
                res_u: None,
                res_v: None,
                failure: Some(Error::NoLargeCoordinate { threshold: tau }.to_string()),
            });
            continue;
        }
        match steer_single(tuple, u, v, z, &large_axes) {
            Ok((x, image)) => {
                let res_u = residual_inf(&x, u);
                let res_v = residual_inf(&image, v);
                steps.push(SteerStep {
                    z: z.clone(),
                    large_axes,
                    x: Some(x),
                    image: Some(image),
                    res_u: Some(res_u),
                    res_v: Some(res_v),
                    failure: None,
                });
            }
            Err(e) => steps.push(SteerStep {
                z: z.clone(),
                large_axes,
                x: None,
                image: None,
                res_u: None,
                res_v: None,
                failure: Some(e.to_string()),
            }),
        }
    }
    Ok(TensorSteering {
        steps,
        threshold: tau,
    })
}

/// Steers at one parameter value. Returns `(x, e^{<z,T>} x)`.
fn steer_single<T: Scalar>(
    tuple: &TensorTuple,
    u: &[T],
    v: &[T],
    z: &[T],
    large_axes: &[usize],
) -> Result<(Vec<T>, Vec<T>)> {
    let k = tuple.k();
    let is_large: Vec<bool> = (0..k).map(|j| large_axes.contains(&j)).collect();

    // Per-axis factors, indexed by (axis, core coordinate q):
    //   u-piece: factor steering (e_q, 0); small axes keep e_q verbatim.
    //   v-piece: factor steering (0, e_q); small axes carry e^{-z_j S} e_q.
    // Each factor stores (vector, image under e^{z_j S_j}).
    let mut u_factors: Vec<Vec<(Vec<T>, Vec<T>)>> = Vec::with_capacity(k);
    let mut v_factors: Vec<Vec<(Vec<T>, Vec<T>)>> = Vec::with_capacity(k);
    for j in 0..k {
        let block = tuple.block(j);
        let nj = tuple.dims[j];
        let mut uf = Vec::with_capacity(nj);
        let mut vf = Vec::with_capacity(nj);
        for q in 0..nj {
            let mut e = vec![T::zero(); nj];
            e[q] = T::one();
            if is_large[j] {
                let p_u = SteeringProblem::new(block, z[j].clone(), e.clone(), vec![T::zero(); nj]);
                let sol_u = solve_steering(&p_u)?;
                uf.push((sol_u.x, sol_u.image));
                let p_v = SteeringProblem::new(block, z[j].clone(), vec![T::zero(); nj], e);
                let sol_v = solve_steering(&p_v)?;
                vf.push((sol_v.x, sol_v.image));
            } else {
                let e_full = block.embed(&e);
                // Small axis, u-piece: keep the coordinate; its image is
                // e^{z_j S} e_q (moderate z, stable).
                let img = exp_shift(&block, &z[j]).matvec(&e_full);
                uf.push((e_full.clone(), img));
                // Small axis, v-piece: pre-image e^{-z_j S} e_q, which the
                // group action returns to e_q.
                let pre = exp_shift(&block, &(-z[j].clone())).matvec(&e_full);
                let back = exp_shift(&block, &z[j]).matvec(&pre);
                vf.push((pre, back));
            }
        }
        u_factors.push(uf);
        v_factors.push(vf);
    }

    let mut x = vec![T::zero(); tuple.total_dim()];
    let mut image = vec![T::zero(); tuple.total_dim()];
    for &flat in &tuple.core_indices() {
        let coords = tuple.coords(flat);
        if !u[flat].is_zero() {
            let vecs: Vec<&[T]> = coords
                .iter()
                .enumerate()
                .map(|(j, &c)| u_factors[j][c].0.as_slice())
                .collect();
            outer_accumulate(tuple, &mut x, &u[flat], &vecs);
            let imgs: Vec<&[T]> = coords
                .iter()
                .enumerate()
                .map(|(j, &c)| u_factors[j][c].1.as_slice())
                .collect();
            outer_accumulate(tuple, &mut image, &u[flat], &imgs);
        }
        if !v[flat].is_zero() {
            let vecs: Vec<&[T]> = coords
                .iter()
                .enumerate()
                .map(|(j, &c)| v_factors[j][c].0.as_slice())
                .collect();
            outer_accumulate(tuple, &mut x, &v[flat], &vecs);
            let imgs: Vec<&[T]> = coords
                .iter()
                .enumerate()
                .map(|(j, &c)| v_factors[j][c].1.as_slice())
                .collect();
            outer_accumulate(tuple, &mut image, &v[flat], &imgs);
        }
    }
    Ok((x, image))
}

/// `out += coeff * factors_1 (x) ... (x) factors_k` on the flat grid.
fn outer_accumulate<T: Scalar>(tuple: &TensorTuple, out: &mut [T], coeff: &T, factors: &[&[T]]) {
    for (i, item) in out.iter_mut().enumerate() {
        let mut prod = coeff.clone();
        let mut rest = i;
        for (j, f) in factors.iter().enumerate() {
            let c = rest / tuple.strides[j];
            rest %= tuple.strides[j];
            if f[c].is_zero() {
                prod = T::zero();
                break;
            }
            prod = prod * f[c].clone();
        }
        if !prod.is_zero() {
            *item = item.clone() + prod;
        }
    }
}

fn residual_inf<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    let diff: Vec<T> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x.clone() - y.clone())
        .collect();
    norm_inf(&diff)
}
