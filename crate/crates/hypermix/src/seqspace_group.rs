//! A truncated sequence-space model carrying a biorthogonal system, the
//! `k` commuting annihilation operators built from it, and the entire
//! exponential group `e^{<z,A>}` with certified series truncation.
//!
//! # The model
//!
//! The ambient space is truncated `l^1`: basis vectors `x_n` (`q(x_n) =
//! 1`), coordinate functionals scaled by configurable nonzero diagonals
//! `f_n(x_n) = d_n`, the seminorm `p(x) = sup_n |f_n(x)|` and the norm
//! `q(x) = sum |x_n|`, so `p <= c q` with `c = max |d_n|`. Indices are
//! enumerated by a graded-lexicographic bijection `gamma` between
//! multi-indices in `Z_+^k` and `0..N`; the truncation keeps complete
//! grades `0..=G` only.
//!
//! From the diagonals, `eps_m = min{ |d_{gamma(n)}| : |n| = m+1 }`, and a
//! positive sequence `alpha` satisfying `alpha_{m+1} >= 2^m alpha_m /
//! eps_m` drives the operator weights: `A_j` maps `x_{gamma(n+e_j)}` to
//! `(alpha_{|n|}/alpha_{|n|+1}) x_{gamma(n)}` and kills `x_{gamma(m)}`
//! when `m_j = 0`. Written in the series form `A_j x = sum_n c_{j,n}
//! f_{gamma(n+e_j)}(x) x_{gamma(n)}`, the coefficients obey `|c_{j,n}| <
//! 2^{-|n|}` once the alpha recursion carries any strict slack; their sum
//! stays below `2^k`. The operators commute exactly and lower the grade
//! by one, so the truncation is an exact invariant-subspace restriction,
//! not an approximation.
//!
//! `alpha` grows like `2^{m^2/2}` and would overflow doubles near grade
//! sixty, so only `log2 alpha` and the exact ratios
//! `alpha_m/alpha_{m+1}` are materialized.
//!
//! # Certified exponentials
//!
//! `e^{<z,A>} x` is accumulated grade by grade from the multi-series
//! `sum_n (z^n / n!) A^n x`. The chain bound `q(A_1^{n_1}..A_k^{n_k} x)
//! <= c^{|n|-1} a^{|n|} p(x)` with `a = max_j sum_n |c_{j,n}|` majorizes
//! the tail beyond grade `g` by `(p(x)/c) sum_{L>g} (a c |z|_1)^L / L!`,
//! an entire-function tail, so the accumulation stops either when that
//! bound drops below the requested tolerance or when the nilpotent series
//! terminates exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::scalar::Scalar;

/// Graded-lexicographic bijection between `Z_+^k` and `Z_+`: indices of
/// grade `g` precede grade `g+1`; within a grade the order is ascending
/// lexicographic. For `k = 1` this is the identity enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedBijection {
    k: usize,
}

fn binomial(n: usize, r: usize) -> usize {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc = 1usize;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

impl GradedBijection {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "need k >= 1");
        GradedBijection { k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of multi-indices of grade exactly `g`.
    pub fn grade_count(&self, g: usize) -> usize {
        binomial(g + self.k - 1, self.k - 1)
    }

    /// Rank of the first multi-index of grade `g`.
    pub fn grade_offset(&self, g: usize) -> usize {
        if g == 0 {
            0
        } else {
            binomial(g + self.k - 1, self.k)
        }
    }

    pub fn grade(&self, n: &[usize]) -> usize {
        n.iter().sum()
    }

    pub fn forward(&self, n: &[usize]) -> usize {
        assert_eq!(n.len(), self.k);
        let g = self.grade(n);
        let mut rank = self.grade_offset(g);
        let mut remaining = g;
        for (i, &ni) in n.iter().enumerate().take(self.k - 1) {
            let slots = self.k - i - 1;
            for c in 0..ni {
                // Tuples with this prefix and i-th coordinate c.
                rank += binomial(remaining - c + slots - 1, slots - 1);
            }
            remaining -= ni;
        }
        rank
    }

    pub fn inverse(&self, rank: usize) -> Vec<usize> {
        let mut g = 0;
        while self.grade_offset(g + 1) <= rank {
            g += 1;
        }
        let mut r = rank - self.grade_offset(g);
        let mut out = Vec::with_capacity(self.k);
        let mut remaining = g;
        for i in 0..self.k - 1 {
            let slots = self.k - i - 1;
            let mut c = 0;
            loop {
                let cnt = binomial(remaining - c + slots - 1, slots - 1);
                if r < cnt {
                    break;
                }
                r -= cnt;
                c += 1;
            }
            out.push(c);
            remaining -= c;
        }
        out.push(remaining);
        out
    }
}

/// The alpha sequence in log2 space, from the equality choice
/// `alpha_{m+1} = 2^m alpha_m / eps_m`, `alpha_0 = 1`.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaSequence {
    pub log2: Vec<f64>,
}

impl AlphaSequence {
    /// `alpha_m` in linear scale; overflows to infinity for large grades,
    /// which is exactly why ratios are used everywhere else.
    pub fn linear(&self, m: usize) -> f64 {
        self.log2[m].exp2()
    }
}

/// Builds `alpha_0..alpha_m_max` from positive `eps` values by the
/// equality recursion; values are kept in log space.
pub fn build_alpha_sequence(eps: &[f64], m_max: usize) -> Result<AlphaSequence> {
    if m_max > 0 {
        assert!(eps.len() >= m_max, "need eps_0..eps_{}", m_max - 1);
    }
    let mut log2 = Vec::with_capacity(m_max + 1);
    log2.push(0.0);
    for m in 0..m_max {
        if !(eps[m] > 0.0) {
            return Err(Error::NonpositiveEpsilon { grade: m });
        }
        let next = m as f64 + log2[m] - eps[m].log2();
        log2.push(next);
    }
    Ok(AlphaSequence { log2 })
}

/// Sparse operator on the truncated basis, stored as (row, col, value)
/// triplets.
#[derive(Clone, Debug)]
pub struct SparseOperator<T> {
    dim: usize,
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> SparseOperator<T> {
    pub fn new(dim: usize, mut entries: Vec<(usize, usize, T)>) -> Self {
        entries.sort_by_key(|&(r, c, _)| (r, c));
        SparseOperator { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim);
        let mut out = vec![T::zero(); self.dim];
        for (r, c, v) in &self.entries {
            if !x[*c].is_zero() {
                out[*r] = out[*r].clone() + v.clone() * x[*c].clone();
            }
        }
        out
    }

    pub fn to_dense(&self) -> Mat<T> {
        let mut m: Mat<T> = Mat::zeros(self.dim, self.dim);
        for (r, c, v) in &self.entries {
            m[(*r, *c)] = m[(*r, *c)].clone() + v.clone();
        }
        m
    }
}

/// Builds the series operator `T x = sum_n a_n f_{alpha(n)}(x)
/// x_{beta(n)}` on the truncated model; with the coordinate-functional
/// instantiation the matrix entry at `(beta(n), alpha(n))` is
/// `a_n d_{alpha(n)}`.
pub fn build_operator_from_series<T: Scalar>(
    model: &SeqSpaceModel<T>,
    a: &[T],
    alpha_map: &[usize],
    beta_map: &[usize],
) -> SparseOperator<T> {
    assert_eq!(a.len(), alpha_map.len());
    assert_eq!(a.len(), beta_map.len());
    let mut entries = Vec::new();
    for ((an, &src), &dst) in a.iter().zip(alpha_map).zip(beta_map) {
        assert!(src < model.dim && dst < model.dim, "index map out of range");
        if !an.is_zero() {
            entries.push((dst, src, an.clone() * model.f_diag[src].clone()));
        }
    }
    SparseOperator::new(model.dim, entries)
}

/// The truncated sequence-space model with its operator tuple.
#[derive(Clone, Debug)]
pub struct SeqSpaceModel<T> {
    k: usize,
    max_grade: usize,
    dim: usize,
    gamma: GradedBijection,
    /// Diagonal values `f_n(x_n)`, all nonzero.
    f_diag: Vec<T>,
    /// `q`-norms of the model sequence (all 1 in this instantiation).
    x_norms: Vec<f64>,
    /// `eps_m` for `m = 0..max_grade-1`, exact field elements.
    eps: Vec<T>,
    /// `log2 alpha_m` for `m = 0..=max_grade` (includes the slack).
    alpha_log2: Vec<f64>,
    /// Exact ratios `alpha_m / alpha_{m+1}`, `m = 0..max_grade-1`.
    ratios: Vec<T>,
    /// Strictness slack `sigma >= 1` in the alpha recursion.
    slack: T,
    /// The operators `A_1..A_k`.
    ops: Vec<SparseOperator<T>>,
    /// Per operator: the coefficients `c_{j,n}` keyed by `n`.
    c_entries: Vec<Vec<(Vec<usize>, T)>>,
    /// Per operator: `sum_n |c_{j,n}|`.
    c_sums: Vec<f64>,
}

impl<T: Scalar> SeqSpaceModel<T> {
    /// Builds the model with unit diagonals and the default slack 2.
    pub fn with_ones(k: usize, max_grade: usize) -> Result<Self> {
        let gamma = GradedBijection::new(k);
        let dim = gamma.grade_offset(max_grade + 1);
        Self::build(k, max_grade, vec![T::one(); dim], T::from_int(2))
    }

    /// Builds the model from explicit diagonals `f_n(x_n)` (one per kept
    /// index) and a slack factor `sigma >= 1` for the alpha recursion
    /// `alpha_{m+1} = sigma 2^m alpha_m / eps_m`. Slack strictly above 1
    /// makes every `|c_{j,n}| < 2^{-|n|}` strict; slack exactly 1 is the
    /// equality choice.
    pub fn build(k: usize, max_grade: usize, f_diag: Vec<T>, slack: T) -> Result<Self> {
        let gamma = GradedBijection::new(k);
        let dim = gamma.grade_offset(max_grade + 1);
        assert_eq!(
            f_diag.len(),
            dim,
            "need one diagonal value per kept index ({dim})"
        );
        assert!(slack.magnitude() >= 1.0, "slack must be >= 1");

        // eps_m = min |f_diag| over grade m+1; exact via abs_cmp.
        let mut eps = Vec::with_capacity(max_grade);
        for m in 0..max_grade {
            let lo = gamma.grade_offset(m + 1);
            let hi = gamma.grade_offset(m + 2);
            let mut best: Option<&T> = None;
            for d in &f_diag[lo..hi] {
                if d.is_zero() {
                    return Err(Error::NonpositiveEpsilon { grade: m });
                }
                best = match best {
                    None => Some(d),
                    Some(b) => {
                        if d.abs_cmp(b) == std::cmp::Ordering::Less {
                            Some(d)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            eps.push(best.expect("non-empty grade").abs());
        }
        for d in &f_diag {
            if d.is_zero() {
                return Err(Error::NonpositiveEpsilon { grade: 0 });
            }
        }

        // alpha in log2 space, with slack folded in.
        let mut alpha_log2 = Vec::with_capacity(max_grade + 1);
        alpha_log2.push(0.0);
        let slack_log2 = slack.magnitude().log2();
        for m in 0..max_grade {
            let e = eps[m].magnitude();
            if !(e > 0.0) {
                return Err(Error::NonpositiveEpsilon { grade: m });
            }
            alpha_log2.push(m as f64 + alpha_log2[m] - e.log2() + slack_log2);
        }

        // Exact ratios alpha_m / alpha_{m+1} = eps_m / (slack 2^m).
        let mut ratios = Vec::with_capacity(max_grade);
        let mut pow2 = T::one();
        for e in eps.iter().take(max_grade) {
            ratios.push(e.clone() / (slack.clone() * pow2.clone()));
            pow2 = pow2 * T::from_int(2);
        }

        // Operators and coefficient tables.
        let mut ops = Vec::with_capacity(k);
        let mut c_entries = Vec::with_capacity(k);
        let mut c_sums = Vec::with_capacity(k);
        for j in 0..k {
            let mut entries = Vec::new();
            let mut coeffs = Vec::new();
            let mut sum = 0f64;
            for col in 0..dim {
                let m = gamma.inverse(col);
                if m[j] == 0 {
                    continue;
                }
                let mut n = m.clone();
                n[j] -= 1;
                let row = gamma.forward(&n);
                let grade_n = gamma.grade(&n);
                let weight = ratios[grade_n].clone();
                entries.push((row, col, weight.clone()));
                let c = weight / f_diag[col].clone();
                sum += c.magnitude();
                coeffs.push((n, c));
            }
            ops.push(SparseOperator::new(dim, entries));
            c_entries.push(coeffs);
            c_sums.push(sum);
        }

        Ok(SeqSpaceModel {
            k,
            max_grade,
            dim,
            gamma,
            f_diag,
            x_norms: vec![1.0; dim],
            eps,
            alpha_log2,
            ratios,
            slack,
            ops,
            c_entries,
            c_sums,
        })
    }

    /// Builds from a raw truncation dimension, which must sit on a grade
    /// boundary.
    pub fn from_dimension(k: usize, dim: usize, f_diag: Vec<T>, slack: T) -> Result<Self> {
        let gamma = GradedBijection::new(k);
        let mut g = 0;
        loop {
            let off = gamma.grade_offset(g + 1);
            if off == dim {
                return Self::build(k, g, f_diag, slack);
            }
            if off > dim {
                return Err(Error::IncompleteGrade { dim, k });
            }
            g += 1;
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_grade(&self) -> usize {
        self.max_grade
    }

    pub fn gamma(&self) -> &GradedBijection {
        &self.gamma
    }

    pub fn f_diag(&self) -> &[T] {
        &self.f_diag
    }

    pub fn x_norms(&self) -> &[f64] {
        &self.x_norms
    }

    pub fn eps(&self) -> &[T] {
        &self.eps
    }

    pub fn alpha_log2(&self) -> &[f64] {
        &self.alpha_log2
    }

    /// `alpha_m / alpha_{m+1}` for `m < max_grade`.
    pub fn ratio(&self, m: usize) -> &T {
        &self.ratios[m]
    }

    /// The operator tuple `A_1..A_k`.
    pub fn a_operators(&self) -> &[SparseOperator<T>] {
        &self.ops
    }

    /// Coefficients `c_{j,n}` of `A_{j+1}` keyed by the multi-index `n`.
    pub fn c_coefficients(&self, j: usize) -> &[(Vec<usize>, T)] {
        &self.c_entries[j]
    }

    /// `a = max_j sum_n |c_{j,n}|`; satisfies `q(A_j x) <= a p(x)`.
    pub fn a_bound(&self) -> f64 {
        self.c_sums.iter().copied().fold(0.0, f64::max)
    }

    /// `c` with `p <= c q` on the model: `max_n |f_n(x_n)|`.
    pub fn c_bound(&self) -> f64 {
        self.f_diag
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max)
    }

    /// `p(x) = sup_n |f_n(x)| = sup_n |d_n x_n|`.
    pub fn p_seminorm(&self, x: &[T]) -> f64 {
        assert_eq!(x.len(), self.dim);
        x.iter()
            .zip(&self.f_diag)
            .map(|(xi, di)| (xi.clone() * di.clone()).magnitude())
            .fold(0.0, f64::max)
    }

    /// `q(x) = sum |x_n|` (the disk norm of the truncated model).
    pub fn q_norm(&self, x: &[T]) -> f64 {
        crate::scalar::norm_l1(x)
    }

    /// Kernel-image subspace `kappa(m, A)` computed definitionally on the
    /// truncation: indices annihilated by every `A_j^{2m_j}` and pushed
    /// through `A^m`. Truncation shrinks these spaces; covering a grade-g
    /// index requires `2g + k <= max_grade`.
    pub fn compute_kappa(&self, m: &[usize]) -> Vec<usize> {
        assert_eq!(m.len(), self.k);
        assert!(m.iter().all(|&mj| mj >= 1));
        let mut out = Vec::new();
        for idx in 0..self.dim {
            let n = self.gamma.inverse(idx);
            if n.iter().zip(m).all(|(&nj, &mj)| nj <= 2 * mj - 1)
                && n.iter().zip(m).all(|(&nj, &mj)| nj >= mj)
            {
                let img: Vec<usize> = n.iter().zip(m).map(|(&nj, &mj)| nj - mj).collect();
                out.push(self.gamma.forward(&img));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Serializes the model to the documented JSON schema.
    pub fn to_json(&self) -> serde_json::Value {
        let gamma_table: Vec<Vec<usize>> = (0..self.dim).map(|i| self.gamma.inverse(i)).collect();
        let coeffs: Vec<serde_json::Value> = (0..self.k)
            .flat_map(|j| {
                self.c_entries[j].iter().map(move |(n, c)| {
                    serde_json::json!({
                        "j": j + 1,
                        "n": n,
                        "c": format!("{c}"),
                        "c_magnitude": c.magnitude(),
                    })
                })
            })
            .collect();
        serde_json::json!({
            "schema": "hypermix.seqspace-model.v1",
            "k": self.k,
            "max_grade": self.max_grade,
            "dim": self.dim,
            "eps_complete_through_grade": self.max_grade.saturating_sub(1),
            "slack": format!("{}", self.slack),
            "gamma_table": gamma_table,
            "x_norms": self.x_norms,
            "f_diag": self.f_diag.iter().map(|d| format!("{d}")).collect::<Vec<_>>(),
            "f_diag_magnitude": self.f_diag.iter().map(Scalar::magnitude).collect::<Vec<_>>(),
            "alpha_log2": self.alpha_log2,
            "coefficients": coeffs,
        })
    }
}

impl SeqSpaceModel<f64> {
    /// Reads a float model back from the JSON schema written by
    /// [`SeqSpaceModel::to_json`].
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let get = |path: &str| {
            value.get(path).ok_or_else(|| Error::Config {
                path: path.to_string(),
                message: "missing field".to_string(),
            })
        };
        let k = get("k")?.as_u64().unwrap_or(0) as usize;
        let max_grade = get("max_grade")?.as_u64().unwrap_or(0) as usize;
        let f_diag: Vec<f64> = get("f_diag_magnitude")?
            .as_array()
            .ok_or_else(|| Error::Config {
                path: "f_diag_magnitude".into(),
                message: "expected array".into(),
            })?
            .iter()
            .filter_map(|v| v.as_f64())
            .collect();
        let slack: f64 = get("slack")?
            .as_str()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Config {
                path: "slack".into(),
                message: "expected numeric string".into(),
            })?;
        Self::build(k, max_grade, f_diag, slack)
    }
}

/// Result of a certified group application.
#[derive(Clone, Debug)]
pub struct GroupApplication<T> {
    pub vector: Vec<T>,
    /// Analytic bound on the dropped tail (0 when the nilpotent series
    /// terminated exactly).
    pub certified_tail_bound: f64,
    /// Highest grade whose terms were accumulated.
    pub grades_used: usize,
}

/// Applies `e^{<z,A>}` to `x`, accumulating the multi-series grade by
/// grade until the analytic tail bound falls below `tol` (or the series
/// terminates exactly; the truncated operators are nilpotent).
pub fn exp_group_apply<T: Scalar>(
    model: &SeqSpaceModel<T>,
    z: &[T],
    x: &[T],
    tol: f64,
) -> GroupApplication<T> {
    assert_eq!(z.len(), model.k());
    assert_eq!(x.len(), model.dim());
    assert!(tol > 0.0, "tol must be positive");
    let a = model.a_bound();
    let c = model.c_bound();
    let z1: f64 = z.iter().map(Scalar::magnitude).sum();
    let p_x = model.p_seminorm(x);
    let mut acc = x.to_vec();

    if z.iter().all(Zero::is_zero) {
        return GroupApplication {
            vector: acc,
            certified_tail_bound: 0.0,
            grades_used: 0,
        };
    }

    // tail(g) = (p(x)/c) sum_{L>g} (a c z1)^L / L!
    let rho = a * c * z1;
    let tail_after = |g: usize| -> f64 {
        if p_x == 0.0 {
            return 0.0;
        }
        let mut term = 1.0f64;
        for l in 1..=g {
            term *= rho / l as f64;
        }
        // term = rho^g / g!; sum the strictly later terms.
        let mut sum = 0.0;
        let mut t = term;
        let mut l = g + 1;
        loop {
            t *= rho / l as f64;
            sum += t;
            if t < sum * 1e-18 + f64::MIN_POSITIVE {
                break;
            }
            l += 1;
        }
        sum * p_x / c
    };

    // Grade-by-grade accumulation: carry (coefficient, A^n x) per
    // multi-index of the current grade, advancing with the first nonzero
    // axis so each A^n x is computed once.
    let gamma = GradedBijection::new(model.k());
    let mut current: Vec<(Vec<usize>, T, Vec<T>)> =
        vec![(vec![0; model.k()], T::one(), x.to_vec())];
    let mut grades_used = 0;
    let mut bound = tail_after(0);
    for g in 1.. {
        if bound < tol {
            break;
        }
        let mut next: Vec<(Vec<usize>, T, Vec<T>)> = Vec::new();
        for rank in 0..gamma.grade_count(g) {
            let n = gamma.inverse(gamma.grade_offset(g) + rank);
            let j0 = n.iter().position(|&nj| nj > 0).expect("grade >= 1");
            let mut prev = n.clone();
            prev[j0] -= 1;
            // A dropped parent means A^{n-e_j} x = 0, hence A^n x = 0.
            let Some(parent) = current.iter().find(|(pn, _, _)| *pn == prev) else {
                continue;
            };
            let vec_n = model.ops[j0].apply(&parent.2);
            let coeff = parent.1.clone() * z[j0].clone() / T::from_int(n[j0] as i64);
            if vec_n.iter().any(|t| !t.is_zero()) {
                for (dst, src) in acc.iter_mut().zip(&vec_n) {
                    *dst = dst.clone() + coeff.clone() * src.clone();
                }
                next.push((n, coeff, vec_n));
            }
        }
        if next.is_empty() {
            // Nilpotent termination: the dropped tail is identically zero.
            bound = 0.0;
            break;
        }
        grades_used = g;
        current = next;
        bound = tail_after(g);
    }

    GroupApplication {
        vector: acc,
        certified_tail_bound: bound.min(tail_after(grades_used)),
        grades_used,
    }
}

use num_traits::Zero;

/// Product of a biorthogonalization: corrected functionals, corrected
/// vectors, and the triangular correction coefficients.
#[derive(Clone, Debug)]
pub struct Biorthogonal<T> {
    /// `g_n = f_n + sum_{j<n} alpha_{n,j} f_j`, one row per functional.
    pub g_rows: Vec<Vec<T>>,
    /// Columns `x_k` with `g_n(x_k) = 0` for `n != k`.
    pub x_cols: Vec<Vec<T>>,
    /// `alpha[n]` holds `alpha_{n,j}` for `j < n`.
    pub alpha: Vec<Vec<T>>,
    /// Largest off-diagonal `|g_n(x_k)|` left by the construction.
    pub residual: f64,
}

/// Biorthogonalizes linearly independent functionals (rows) against a
/// spanning candidate list (columns), following the inductive triangular
/// correction: pick `y_n` among the candidates with `g_n(y_n) != 0`
/// after correcting `g_n` to vanish on `y_0..y_{n-1}`, then back-
/// substitute `x_k = y_k + sum beta_{k,j} y_j`.
pub fn biorthogonalize<T: Scalar>(
    functionals: &[Vec<T>],
    candidates: &[Vec<T>],
) -> Result<Biorthogonal<T>> {
    let count = functionals.len();
    assert!(count >= 1, "need at least one functional");
    let dim = functionals[0].len();
    assert!(functionals.iter().all(|f| f.len() == dim));
    assert!(candidates.iter().all(|c| c.len() == dim));

    let pair = |f: &[T], y: &[T]| -> T {
        f.iter()
            .zip(y)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    };

    let mut g_rows: Vec<Vec<T>> = Vec::with_capacity(count);
    let mut ys: Vec<Vec<T>> = Vec::with_capacity(count);
    let mut alpha: Vec<Vec<T>> = Vec::with_capacity(count);

    for n in 0..count {
        // Correct f_n to vanish on y_0..y_{n-1}.
        let coeffs: Vec<T> = if n == 0 {
            Vec::new()
        } else {
            let m = Mat::from_fn(n, n, |row, col| pair(&functionals[col], &ys[row]));
            let rhs: Vec<T> = (0..n)
                .map(|row| -pair(&functionals[n], &ys[row]))
                .collect();
            m.solve(&rhs)
                .map_err(|_| Error::DependentFunctionals { step: n })?
        };
        let mut g = functionals[n].clone();
        for (j, aj) in coeffs.iter().enumerate() {
            for (gi, fi) in g.iter_mut().zip(&functionals[j]) {
                *gi = gi.clone() + aj.clone() * fi.clone();
            }
        }
        // Pick the candidate with the largest |g_n(y)| (first maximum).
        let mut best: Option<(usize, f64)> = None;
        for (ci, cand) in candidates.iter().enumerate() {
            let v = pair(&g, cand).magnitude();
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((ci, v));
            }
        }
        let (ci, mag) = best.expect("non-empty candidate list");
        if mag == 0.0 {
            return Err(Error::DependentFunctionals { step: n });
        }
        g_rows.push(g);
        ys.push(candidates[ci].clone());
        alpha.push(coeffs);
    }

    // Back-substitution: x_k = y_k + sum_{j<k} beta_{k,j} y_j with
    // g_n(x_k) = 0 for n < k (n > k vanishes by construction).
    let gy = Mat::from_fn(count, count, |n, j| pair(&g_rows[n], &ys[j]));
    let mut x_cols: Vec<Vec<T>> = Vec::with_capacity(count);
    for kcol in 0..count {
        let mut beta = vec![T::zero(); kcol];
        for n in (0..kcol).rev() {
            // g_n(y_j) = 0 for j < n, so only beta_{k,j>=n} contribute.
            let mut acc = gy[(n, kcol)].clone();
            for (j, b) in beta.iter().enumerate().skip(n + 1) {
                acc = acc + b.clone() * gy[(n, j)].clone();
            }
            beta[n] = -acc / gy[(n, n)].clone();
        }
        let mut x = ys[kcol].clone();
        for (j, b) in beta.iter().enumerate() {
            for (xi, yi) in x.iter_mut().zip(&ys[j]) {
                *xi = xi.clone() + b.clone() * yi.clone();
            }
        }
        x_cols.push(x);
    }

    let mut residual = 0f64;
    for (n, g) in g_rows.iter().enumerate() {
        for (kcol, x) in x_cols.iter().enumerate() {
            if n != kcol {
                residual = residual.max(pair(g, x).magnitude());
            }
        }
    }
    Ok(Biorthogonal {
        g_rows,
        x_cols,
        alpha,
        residual,
    })
}

/// Central-difference Cauchy-Riemann residual of `zeta -> f_i(e^{<z +
/// zeta e_axis, A>} x)` at `zeta = 0`: `|D_s g + i D_t g|`, which decays
/// like `h^2` for an analytic map.
pub fn cauchy_riemann_residual(
    model: &SeqSpaceModel<Complex64>,
    z: &[Complex64],
    axis: usize,
    x: &[Complex64],
    functional: usize,
    h: f64,
) -> f64 {
    let eval = |dz: Complex64| -> Complex64 {
        let mut zz = z.to_vec();
        zz[axis] += dz;
        let out = exp_group_apply(model, &zz, x, 1e-14);
        out.vector[functional] * model.f_diag()[functional]
    };
    let two_h = Complex64::new(2.0 * h, 0.0);
    let ds = (eval(Complex64::new(h, 0.0)) - eval(Complex64::new(-h, 0.0))) / two_h;
    let dt = (eval(Complex64::new(0.0, h)) - eval(Complex64::new(0.0, -h))) / two_h;
    (ds + Complex64::i() * dt).norm()
}
