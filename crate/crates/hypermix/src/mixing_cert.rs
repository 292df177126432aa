//! Empirical certification of mixing and hereditary hypercyclicity at
//! desk scale, and the finite-dimensional orbit-coverage obstruction.
//!
//! A semigroup `{T_t}` is mixing when for every pair of nonempty open
//! sets `U, V` there is `r > 0` with `T_t(U) /\ V` nonempty whenever
//! `|t| > r`. The desk-scale proxy replaces open sets by norm balls and
//! density by sampled pairs; a [`MixingCertificate`] stores, per grid
//! parameter, an explicit witness `x in U` with `T_t x in V`, or the
//! failure. The certificate is labeled evidence, not proof.
//!
//! Witnesses come from the constructive kernel recipe rather than
//! generic optimization: ball centers are projected onto the span of the
//! supplied kernel basis and steered with the product construction, so
//! successes inherit the `c |z|^{-j}` steering rates. Negative controls
//! (identity, scalar rotation) get the naive candidate and honestly fail.
//!
//! [`orbit_coverage_3d`] illustrates why none of this can happen in
//! finite dimension: the projective orbit `{+-e^{tA} x / |e^{tA} x|}` of
//! a `3 x 3` generator is a smooth curve, and the fraction of an
//! equal-area sphere mesh it visits stays far from 1.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{expm_scaling_squaring, Mat};
use crate::scalar::Scalar;
use crate::seqspace_group::{exp_group_apply, SeqSpaceModel};
use crate::tensor_ebs::TensorTuple;

/// Which norm a ball lives in: the disk norm `q` (l1) or the seminorm
/// proxy `p` (sup).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BallNorm {
    Q,
    P,
}

impl BallNorm {
    pub fn eval<T: Scalar>(&self, v: &[T]) -> f64 {
        match self {
            BallNorm::Q => crate::scalar::norm_l1(v),
            BallNorm::P => crate::scalar::norm_inf(v),
        }
    }
}

/// An open norm ball standing in for a nonempty open set.
#[derive(Clone, Debug, Serialize)]
pub struct OpenBall<T> {
    pub center: Vec<T>,
    pub radius: f64,
    pub norm: BallNorm,
}

impl<T: Scalar> OpenBall<T> {
    pub fn new(center: Vec<T>, radius: f64, norm: BallNorm) -> Self {
        assert!(radius > 0.0, "ball radius must be positive");
        OpenBall {
            center,
            radius,
            norm,
        }
    }

    pub fn distance(&self, v: &[T]) -> f64 {
        assert_eq!(v.len(), self.center.len());
        let diff: Vec<T> = v
            .iter()
            .zip(&self.center)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        self.norm.eval(&diff)
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.distance(v) < self.radius
    }
}

/// A parameterized operator group action `t -> T_t`.
pub trait GroupAction<T> {
    /// Dimension of the underlying space.
    fn dim(&self) -> usize;
    /// Number of group parameters.
    fn param_len(&self) -> usize;
    /// Applies `T_t` to `x`.
    fn apply(&self, t: &[T], x: &[T]) -> Vec<T>;
}

/// The tensor-shift exponential group `t -> e^{<t,T>}`.
pub struct TensorGroup<'a> {
    pub tuple: &'a TensorTuple,
}

impl<T: Scalar> GroupAction<T> for TensorGroup<'_> {
    fn dim(&self) -> usize {
        self.tuple.total_dim()
    }
    fn param_len(&self) -> usize {
        self.tuple.k()
    }
    fn apply(&self, t: &[T], x: &[T]) -> Vec<T> {
        self.tuple.apply_exp(t, x)
    }
}

/// The sequence-space exponential group with certified truncation.
pub struct SeqSpaceGroup<'a, T> {
    pub model: &'a SeqSpaceModel<T>,
    pub tol: f64,
}

impl<T: Scalar> GroupAction<T> for SeqSpaceGroup<'_, T> {
    fn dim(&self) -> usize {
        self.model.dim()
    }
    fn param_len(&self) -> usize {
        self.model.k()
    }
    fn apply(&self, t: &[T], x: &[T]) -> Vec<T> {
        exp_group_apply(self.model, t, x, self.tol).vector
    }
}

/// The identity group: a negative control (not mixing).
pub struct IdentityGroup {
    pub dim: usize,
}

impl<T: Scalar> GroupAction<T> for IdentityGroup {
    fn dim(&self) -> usize {
        self.dim
    }
    fn param_len(&self) -> usize {
        1
    }
    fn apply(&self, _t: &[T], x: &[T]) -> Vec<T> {
        x.to_vec()
    }
}

/// `T_t = e^{it} I` on the complex line: preserves moduli, so it cannot
/// move mass between balls of different center modulus.
pub struct RotationGroup;

impl GroupAction<num_complex::Complex64> for RotationGroup {
    fn dim(&self) -> usize {
        1
    }
    fn param_len(&self) -> usize {
        1
    }
    fn apply(
        &self,
        t: &[num_complex::Complex64],
        x: &[num_complex::Complex64],
    ) -> Vec<num_complex::Complex64> {
        let phase = (num_complex::Complex64::i() * t[0]).exp();
        x.iter().map(|v| v * phase).collect()
    }
}

/// Produces steering candidates for a witness search at one parameter.
pub trait WitnessBuilder<T> {
    fn candidates(&self, t: &[T], u0: &[T], v0: &[T]) -> Vec<Vec<T>>;
}

/// Constructive witnesses via the tensor steering recipe.
pub struct TensorSteeringWitness<'a> {
    pub tuple: &'a TensorTuple,
    pub tau: f64,
}

impl<T: Scalar> WitnessBuilder<T> for TensorSteeringWitness<'_> {
    fn candidates(&self, t: &[T], u0: &[T], v0: &[T]) -> Vec<Vec<T>> {
        match crate::tensor_ebs::steer_tensor(self.tuple, u0, v0, &[t.to_vec()], self.tau) {
            Ok(out) => out
                .steps
                .into_iter()
                .filter_map(|s| s.x)
                .collect(),
            Err(_) => Vec::new(),
        }
    }
}

/// Fallback candidate: the projected `U`-center itself. Honest for
/// negative controls, which have nothing to steer with.
pub struct NaiveWitness;

impl<T: Scalar> WitnessBuilder<T> for NaiveWitness {
    fn candidates(&self, _t: &[T], u0: &[T], _v0: &[T]) -> Vec<Vec<T>> {
        vec![u0.to_vec()]
    }
}

/// A stored witness: the point, its image, and both ball distances.
#[derive(Clone, Debug, Serialize)]
pub struct Witness<T> {
    pub t: Vec<T>,
    pub x: Vec<T>,
    pub image: Vec<T>,
    pub dist_u: f64,
    pub dist_v: f64,
}

/// The empirical transitivity record for one ball pair.
#[derive(Clone, Debug, Serialize)]
pub struct MixingCertificate<T> {
    pub u: OpenBall<T>,
    pub v: OpenBall<T>,
    /// Smallest grid magnitude beyond which every sample succeeded.
    pub r: Option<f64>,
    pub witnesses: Vec<Witness<T>>,
    /// Parameters with no witness found.
    pub failures: Vec<Vec<T>>,
}

impl<T: Scalar> MixingCertificate<T> {
    /// Re-verifies every stored witness from scratch.
    pub fn verify<G: GroupAction<T>>(&self, group: &G) -> bool {
        self.witnesses.iter().all(|w| {
            let image = group.apply(&w.t, &w.x);
            self.u.contains(&w.x) && self.v.contains(&image)
        })
    }

    /// Restricts the stored results to a sub-grid (e.g. an arithmetic
    /// sub-progression) and recomputes `r` over it.
    pub fn refilter<F: Fn(&[T]) -> bool>(&self, keep: F) -> Option<f64> {
        let mut entries: Vec<(f64, bool)> = Vec::new();
        for w in &self.witnesses {
            if keep(&w.t) {
                entries.push((param_magnitude(&w.t), true));
            }
        }
        for f in &self.failures {
            if keep(f) {
                entries.push((param_magnitude(f), false));
            }
        }
        threshold_magnitude(entries)
    }
}

fn param_magnitude<T: Scalar>(t: &[T]) -> f64 {
    t.iter()
        .map(|c| c.magnitude().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Smallest magnitude `r` in the sample such that every sample with
/// magnitude `>= r` succeeded (magnitude levels are all-or-nothing).
fn threshold_magnitude(mut entries: Vec<(f64, bool)>) -> Option<f64> {
    if entries.is_empty() {
        return None;
    }
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut r = None;
    for (mag, ok) in entries {
        if ok {
            if r.is_none() {
                r = Some(mag);
            }
        } else {
            r = None;
        }
    }
    r
}

/// Projects `x` onto the span of `basis` by least squares (normal
/// equations with the conjugate pairing).
pub fn project_onto_span<T: Scalar>(basis: &[Vec<T>], x: &[T]) -> Result<Vec<T>> {
    assert!(!basis.is_empty(), "empty kernel basis");
    let n = basis.len();
    let gram = Mat::from_fn(n, n, |i, j| {
        basis[i]
            .iter()
            .zip(&basis[j])
            .fold(T::zero(), |acc, (a, b)| acc + a.conj() * b.clone())
    });
    let rhs: Vec<T> = (0..n)
        .map(|i| {
            basis[i]
                .iter()
                .zip(x)
                .fold(T::zero(), |acc, (a, b)| acc + a.conj() * b.clone())
        })
        .collect();
    let coef = gram.solve(&rhs)?;
    let mut out = vec![T::zero(); x.len()];
    for (c, b) in coef.iter().zip(basis) {
        for (o, bi) in out.iter_mut().zip(b) {
            *o = o.clone() + c.clone() * bi.clone();
        }
    }
    Ok(out)
}

/// Certifies empirical transitivity of `group` between balls `u` and `v`
/// along `t_grid`: centers are projected onto the kernel span, steering
/// candidates come from `witnesses`, and each grid parameter records a
/// verified witness or a failure.
pub fn certify_mixing<T, G, W>(
    group: &G,
    witness_builder: &W,
    kernel_basis: &[Vec<T>],
    u: &OpenBall<T>,
    v: &OpenBall<T>,
    t_grid: &[Vec<T>],
) -> Result<MixingCertificate<T>>
where
    T: Scalar,
    G: GroupAction<T>,
    W: WitnessBuilder<T>,
{
    let proj_u = project_onto_span(kernel_basis, &u.center)?;
    let proj_v = project_onto_span(kernel_basis, &v.center)?;
    for (ball, proj) in [(u, &proj_u), (v, &proj_v)] {
        let d = ball.distance(proj);
        if d >= ball.radius {
            return Err(Error::NotReachable {
                distance: d,
                radius: ball.radius,
            });
        }
    }

    let mut witnesses = Vec::new();
    let mut failures = Vec::new();
    for t in t_grid {
        let found = witness_builder
            .candidates(t, &proj_u, &proj_v)
            .into_iter()
            .find_map(|x| {
                let image = group.apply(t, &x);
                let dist_u = u.distance(&x);
                let dist_v = v.distance(&image);
                (dist_u < u.radius && dist_v < v.radius).then_some(Witness {
                    t: t.clone(),
                    x,
                    image,
                    dist_u,
                    dist_v,
                })
            });
        match found {
            Some(w) => witnesses.push(w),
            None => failures.push(t.clone()),
        }
    }

    let entries: Vec<(f64, bool)> = witnesses
        .iter()
        .map(|w| (param_magnitude(&w.t), true))
        .chain(failures.iter().map(|f| (param_magnitude(f), false)))
        .collect();
    Ok(MixingCertificate {
        u: u.clone(),
        v: v.clone(),
        r: threshold_magnitude(entries),
        witnesses,
        failures,
    })
}

/// Per-pair outcome of [`hereditary_check`].
#[derive(Clone, Debug, Serialize)]
pub struct HereditaryPair {
    /// Index into the parameter sequence past which every step succeeded.
    pub tail_index: Option<usize>,
    pub successes: Vec<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HereditaryReport {
    pub pairs: Vec<HereditaryPair>,
    /// True when every sampled pair has a success tail.
    pub all_pairs_have_tails: bool,
}

/// Checks the hereditary pattern: along a fixed parameter sequence with
/// strictly growing magnitudes, every sampled ball pair must succeed from
/// some tail index on.
pub fn hereditary_check<T, G, W>(
    group: &G,
    witness_builder: &W,
    kernel_basis: &[Vec<T>],
    t_seq: &[Vec<T>],
    pair_samples: &[(OpenBall<T>, OpenBall<T>)],
) -> Result<HereditaryReport>
where
    T: Scalar,
    G: GroupAction<T>,
    W: WitnessBuilder<T>,
{
    let mags: Vec<f64> = t_seq.iter().map(|t| param_magnitude(t)).collect();
    assert!(
        mags.windows(2).all(|w| w[0] < w[1]),
        "|t_m| must be strictly increasing"
    );
    let mut pairs = Vec::with_capacity(pair_samples.len());
    for (u, v) in pair_samples {
        let cert = certify_mixing(group, witness_builder, kernel_basis, u, v, t_seq)?;
        let success_set: std::collections::HashSet<usize> = cert
            .witnesses
            .iter()
            .map(|w| {
                t_seq
                    .iter()
                    .position(|t| {
                        t.iter()
                            .zip(&w.t)
                            .all(|(a, b)| (a.clone() - b.clone()).magnitude() == 0.0)
                    })
                    .expect("witness parameter from the grid")
            })
            .collect();
        let successes: Vec<bool> = (0..t_seq.len()).map(|i| success_set.contains(&i)).collect();
        let tail_index = successes
            .iter()
            .rposition(|&ok| !ok)
            .map(|last_fail| last_fail + 1)
            .or(Some(0))
            .filter(|&idx| idx < t_seq.len());
        pairs.push(HereditaryPair {
            tail_index,
            successes,
        });
    }
    let all = pairs.iter().all(|p| p.tail_index.is_some());
    Ok(HereditaryReport {
        pairs,
        all_pairs_have_tails: all,
    })
}

/// Equal-area partition of the unit sphere: `bands` latitude bands of
/// equal `z`-measure times `sectors` equal longitude sectors.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SphereMesh {
    pub bands: usize,
    pub sectors: usize,
}

impl SphereMesh {
    pub fn new(bands: usize, sectors: usize) -> Self {
        assert!(bands * sectors >= 1000, "mesh must have >= 1e3 cells");
        SphereMesh { bands, sectors }
    }

    pub fn total_cells(&self) -> usize {
        self.bands * self.sectors
    }

    /// Cell of a unit vector. Equal-area: uniform in `z = cos(theta)`
    /// and in longitude.
    pub fn cell(&self, v: [f64; 3]) -> usize {
        let z = v[2].clamp(-1.0, 1.0);
        let band = (((z + 1.0) / 2.0 * self.bands as f64) as usize).min(self.bands - 1);
        let phi = v[1].atan2(v[0]);
        let frac = (phi + std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
        let sector = ((frac * self.sectors as f64) as usize).min(self.sectors - 1);
        band * self.sectors + sector
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverageReport {
    pub covered_fraction: f64,
    pub hit_cells: usize,
    pub total_cells: usize,
    pub t_max: f64,
    pub samples: usize,
}

/// Covered fraction of the projective sphere by the normalized orbit
/// `{+- e^{tA} x / |e^{tA} x| : 0 <= t <= t_max}`. The orbit direction is
/// advanced by a precomputed one-step exponential and renormalized, so
/// the trajectory never overflows even for expanding generators.
pub fn orbit_coverage_3d(
    a: &Mat<f64>,
    x: [f64; 3],
    t_max: f64,
    samples: usize,
    mesh: SphereMesh,
) -> CoverageReport {
    assert_eq!((a.nrows(), a.ncols()), (3, 3));
    assert!(samples >= 2);
    let norm0 = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    assert!(norm0 > 0.0, "x must be nonzero");
    let dt = t_max / (samples - 1) as f64;
    let step = expm_scaling_squaring(&a.scale(&dt));
    let mut hit = vec![false; mesh.total_cells()];
    let mut y = [x[0] / norm0, x[1] / norm0, x[2] / norm0];
    for i in 0..samples {
        hit[mesh.cell(y)] = true;
        hit[mesh.cell([-y[0], -y[1], -y[2]])] = true;
        if i + 1 < samples {
            let next = step.matvec(&y);
            let n = (next[0] * next[0] + next[1] * next[1] + next[2] * next[2]).sqrt();
            y = [next[0] / n, next[1] / n, next[2] / n];
        }
    }
    let hit_cells = hit.iter().filter(|&&h| h).count();
    CoverageReport {
        covered_fraction: hit_cells as f64 / mesh.total_cells() as f64,
        hit_cells,
        total_cells: mesh.total_cells(),
        t_max,
        samples,
    }
}
