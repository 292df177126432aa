//! Discretized `L_p` models for `0 <= p < 1`: the `q_p` functionals and
//! `d_p` metrics on cell-centered grid fields, the coordinate-halving
//! dilation tuple on the unit cube, and the translation group on a
//! symmetric box standing in for `R^k`.
//!
//! For `0 < p < 1`, `q_p(f) = int |f|^p` (a Riemann sum here); `|.|^p`
//! is subadditive, so `d_p(f,g) = q_p(f-g)` is a metric without any
//! normalization. For `p = 0`,
//!
//! ```text
//! q_0(h) = sum_n 2^{-n} / mu(Omega_n) * int_{Omega_n} |h| / (1 + |h|),
//! ```
//!
//! with `Omega_n` a fixed exhaustion by nested centered boxes, clipped
//! to the model box; once a window covers the whole box the remaining
//! geometric weight is accounted in closed form, so constants integrate
//! exactly. The exhaustion choice changes the metric but not the
//! topology; this one is fixed for reproducibility.
//!
//! Discretization is cell-centered with linear interpolation along the
//! pulled-back axis and constant extrapolation at the edges;
//! non-aligned translations interpolate the same way and zero-fill
//! outside the box. Fields whose support would leave the box are
//! re-gridded on a larger box rather than wrapped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A scalar field sampled at cell centers of a rectangular grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    resolution: Vec<usize>,
    extent: Vec<(f64, f64)>,
    strides: Vec<usize>,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(resolution: &[usize], extent: &[(f64, f64)]) -> Self {
        assert_eq!(resolution.len(), extent.len());
        assert!(!resolution.is_empty());
        assert!(
            resolution.iter().all(|&r| r >= 8),
            "resolution must be >= 8 per axis"
        );
        assert!(extent.iter().all(|(lo, hi)| hi > lo), "extent must be positive");
        let mut strides = vec![1usize; resolution.len()];
        for j in (0..resolution.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * resolution[j + 1];
        }
        let total: usize = resolution.iter().product();
        GridField {
            resolution: resolution.to_vec(),
            extent: extent.to_vec(),
            strides,
            values: vec![0.0; total],
        }
    }

    /// Unit-cube grid `[0,1]^k`.
    pub fn unit_cube(resolution: &[usize]) -> Self {
        let extent = vec![(0.0, 1.0); resolution.len()];
        Self::new(resolution, &extent)
    }

    /// Symmetric box `[-half, half]^k`.
    pub fn symmetric_box(resolution: &[usize], half: f64) -> Self {
        assert!(half > 0.0);
        let extent = vec![(-half, half); resolution.len()];
        Self::new(resolution, &extent)
    }

    /// Samples `f` at every cell center.
    pub fn fill(mut self, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let k = self.k();
        let mut coords = vec![0usize; k];
        for i in 0..self.values.len() {
            let mut rest = i;
            for j in 0..k {
                coords[j] = rest / self.strides[j];
                rest %= self.strides[j];
            }
            let point: Vec<f64> = (0..k).map(|j| self.cell_center(j, coords[j])).collect();
            self.values[i] = f(&point);
        }
        self
    }

    pub fn k(&self) -> usize {
        self.resolution.len()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn extent(&self) -> &[(f64, f64)] {
        &self.extent
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let (lo, hi) = self.extent[axis];
        (hi - lo) / self.resolution[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.k()).map(|j| self.spacing(j)).product()
    }

    pub fn cell_center(&self, axis: usize, idx: usize) -> f64 {
        let (lo, _) = self.extent[axis];
        lo + (idx as f64 + 0.5) * self.spacing(axis)
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.resolution == other.resolution && self.extent == other.extent
    }

    fn coords_of(&self, mut flat: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.k());
        for j in 0..self.k() {
            out.push(flat / self.strides[j]);
            flat %= self.strides[j];
        }
        out
    }

    /// Linear interpolation along one axis at coordinate `x`, the other
    /// axes pinned at the cell indices of `flat`. Clamps at the edges.
    fn interp_axis(&self, flat_base: usize, axis: usize, x: f64) -> f64 {
        let (lo, _) = self.extent[axis];
        let h = self.spacing(axis);
        let res = self.resolution[axis];
        let pos = (x - lo) / h - 0.5;
        let i0 = pos.floor();
        let frac = pos - i0;
        let i0 = i0 as isize;
        let read = |i: isize| -> f64 {
            let i = i.clamp(0, res as isize - 1) as usize;
            let current = (flat_base / self.strides[axis]) % res;
            let flat = flat_base - current * self.strides[axis] + i * self.strides[axis];
            self.values[flat]
        };
        (1.0 - frac) * read(i0) + frac * read(i0 + 1)
    }

    /// Point sample with per-axis linear interpolation; zero outside the
    /// box (used by translations).
    fn sample_or_zero(&self, point: &[f64]) -> f64 {
        for (j, &x) in point.iter().enumerate() {
            let (lo, hi) = self.extent[j];
            if x < lo || x > hi {
                return 0.0;
            }
        }
        // Multilinear interpolation via successive axis reductions on
        // the 2^k corner stencil.
        let k = self.k();
        let mut idx = Vec::with_capacity(k);
        let mut frac = Vec::with_capacity(k);
        for (j, &x) in point.iter().enumerate() {
            let (lo, _) = self.extent[j];
            let h = self.spacing(j);
            let pos = (x - lo) / h - 0.5;
            let base = pos.floor();
            frac.push(pos - base);
            idx.push(base as isize);
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << k) {
            let mut weight = 1.0;
            let mut flat = 0usize;
            for j in 0..k {
                let bit = (corner >> j) & 1;
                let w = if bit == 1 { frac[j] } else { 1.0 - frac[j] };
                weight *= w;
                let i = (idx[j] + bit as isize).clamp(0, self.resolution[j] as isize - 1) as usize;
                flat += i * self.strides[j];
            }
            acc += weight * self.values[flat];
        }
        acc
    }

    /// the half-width of the support (largest |coordinate| of a nonzero
    /// cell, measured to the cell edge), per axis.
    fn support_reach(&self, t: &[f64]) -> Vec<f64> {
        let mut reach = vec![f64::NEG_INFINITY; self.k()];
        for (i, &v) in self.values.iter().enumerate() {
            if v != 0.0 {
                let coords = self.coords_of(i);
                for j in 0..self.k() {
                    let c = self.cell_center(j, coords[j]) + t[j];
                    let edge = c.abs() + 0.5 * self.spacing(j);
                    if edge > reach[j] {
                        reach[j] = edge;
                    }
                }
            }
        }
        reach
    }
}

/// The `q_p`/`d_p` machinery for `p` in `[0, 1)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LpMetric {
    /// `p = 0` selects the exhaustion metric.
    pub p: f64,
}

impl LpMetric {
    pub fn new(p: f64) -> Self {
        assert!((0.0..1.0).contains(&p), "p must lie in [0, 1)");
        LpMetric { p }
    }

    /// `q_p` of a field (distance to zero).
    pub fn functional(&self, f: &GridField) -> f64 {
        self.accumulate(f, |v| v)
    }

    /// `d_p(f, g) = q_p(f - g)`.
    pub fn distance(&self, f: &GridField, g: &GridField) -> Result<f64> {
        if !f.same_layout(g) {
            return Err(Error::GridMismatch(
                "fields live on different grids".to_string(),
            ));
        }
        let mut i = 0;
        let g_values = g.values();
        Ok(self.accumulate(f, |v| {
            let d = v - g_values[i];
            i += 1;
            d
        }))
    }

    fn accumulate(&self, f: &GridField, mut diff: impl FnMut(f64) -> f64) -> f64 {
        let vol = f.cell_volume();
        if self.p > 0.0 {
            let mut acc = 0.0;
            for &v in f.values() {
                acc += diff(v).abs().powf(self.p) * vol;
            }
            return acc;
        }
        // p = 0: per-cell phi values first, then the window sums.
        let phi: Vec<f64> = f
            .values()
            .iter()
            .map(|&v| {
                let d = diff(v).abs();
                d / (1.0 + d)
            })
            .collect();
        // Ω_n = [-(n+1), n+1]^k clipped to the box; saturation when the
        // window covers every cell.
        let k = f.k();
        let box_reach = (0..k)
            .map(|j| f.extent()[j].0.abs().max(f.extent()[j].1.abs()))
            .fold(0.0f64, f64::max);
        let mut total = 0.0;
        let mut n = 0usize;
        loop {
            let w = (n + 1) as f64;
            let mut integral = 0.0;
            let mut measure = 0.0;
            for (i, &p_val) in phi.iter().enumerate() {
                let coords = f.coords_of(i);
                let inside = (0..k).all(|j| f.cell_center(j, coords[j]).abs() <= w);
                if inside {
                    integral += p_val * vol;
                    measure += vol;
                }
            }
            let weight = 0.5f64.powi(n as i32);
            if w >= box_reach {
                // All remaining windows coincide with the box; their
                // geometric weights sum to 2 * 2^{-n}.
                if measure > 0.0 {
                    total += 2.0 * weight * integral / measure;
                }
                break;
            }
            if measure > 0.0 {
                total += weight * integral / measure;
            }
            n += 1;
        }
        total
    }
}

/// Pullback through `x_axis -> x_axis / 2` on the unit cube, with linear
/// interpolation along the halved axis.
pub fn dilation_apply(axis: usize, f: &GridField) -> GridField {
    assert!(
        f.extent().iter().all(|&(lo, hi)| lo == 0.0 && hi == 1.0),
        "dilation acts on the unit cube"
    );
    let mut out = f.clone();
    for i in 0..out.values.len() {
        let coords = f.coords_of(i);
        let x = f.cell_center(axis, coords[axis]) / 2.0;
        out.values[i] = f.interp_axis(i, axis, x);
    }
    out
}

/// Translation `T_t f(x) = f(x - t)` on the same grid; zero-fill
/// outside. Errors with [`Error::SupportEscape`] if the shifted support
/// would leave the box.
pub fn translate(f: &GridField, t: &[f64]) -> Result<GridField> {
    assert_eq!(t.len(), f.k());
    let reach = f.support_reach(t);
    for (j, &r) in reach.iter().enumerate() {
        let (lo, hi) = f.extent()[j];
        let half = lo.abs().max(hi.abs());
        if r > half {
            return Err(Error::SupportEscape { needed: r });
        }
    }
    Ok(translate_unchecked(f, t))
}

fn translate_unchecked(f: &GridField, t: &[f64]) -> GridField {
    let mut out = f.clone();
    for i in 0..out.values.len() {
        let coords = f.coords_of(i);
        let point: Vec<f64> = (0..f.k())
            .map(|j| f.cell_center(j, coords[j]) - t[j])
            .collect();
        out.values[i] = f.sample_or_zero(&point);
    }
    out
}

/// Translation that re-grids onto a larger symmetric box (same spacing)
/// when the shifted support would escape, instead of wrapping.
pub fn translate_extending(f: &GridField, t: &[f64]) -> GridField {
    match translate(f, t) {
        Ok(out) => out,
        Err(_) => {
            let reach = f
                .support_reach(t)
                .into_iter()
                .fold(0.0f64, f64::max);
            let spacing = f.spacing(0);
            let cells_half = (reach / spacing).ceil() as usize + 1;
            let res = vec![2 * cells_half; f.k()];
            let half = cells_half as f64 * spacing;
            let big = GridField::symmetric_box(&res, half);
            // Embed f on the big grid, then translate there.
            let embedded = big.clone().fill(|p| f.sample_or_zero(p));
            translate_unchecked(&embedded, t)
        }
    }
}

/// Report of the corner-clearing kernel-density probe for one target.
#[derive(Clone, Debug, Serialize)]
pub struct DensityProbeTarget {
    /// Cleared-corner half-width `delta = 2^{-m}`.
    pub delta: f64,
    pub delta_log2: i32,
    /// `d_p(f, f_cleared)`, the cleared corner mass.
    pub distance: f64,
    /// Power `pw` with `(T_1 .. T_k)^{pw}` annihilating the cleared
    /// field exactly on the grid; `None` if not achieved within the
    /// search range (a resolution problem, reported rather than hidden).
    pub annihilation_power: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityProbeReport {
    pub eps: f64,
    pub targets: Vec<DensityProbeTarget>,
    pub all_below_eps: bool,
}

/// For each target `f`, clears the dyadic corner `[0, delta)^k` with the
/// largest `delta = 2^{-m}` whose `|f|^p` mass stays below `eps`, then
/// verifies that the composite dilation power annihilates the cleared
/// field exactly.
pub fn kernel_density_probe(
    metric: &LpMetric,
    targets: &[GridField],
    eps: f64,
) -> Result<DensityProbeReport> {
    assert!(eps > 0.0);
    let mut out = Vec::with_capacity(targets.len());
    for f in targets {
        let k = f.k();
        // Corner mass at delta = 2^{-m}: cells with every center < delta.
        let corner_mass = |delta: f64| -> f64 {
            let mut cleared = f.clone();
            for i in 0..cleared.values.len() {
                let coords = f.coords_of(i);
                let inside = (0..k).all(|j| f.cell_center(j, coords[j]) < delta);
                if inside {
                    cleared.values[i] = 0.0;
                }
            }
            metric.distance(f, &cleared).expect("same layout")
        };
        let mut m = 1i32;
        while corner_mass(0.5f64.powi(m)) >= eps {
            m += 1;
            assert!(m < 60, "no dyadic corner satisfies the mass bound");
        }
        let delta = 0.5f64.powi(m);
        let mut cleared = f.clone();
        for i in 0..cleared.values.len() {
            let coords = f.coords_of(i);
            if (0..k).all(|j| f.cell_center(j, coords[j]) < delta) {
                cleared.values[i] = 0.0;
            }
        }
        let distance = metric.distance(f, &cleared)?;

        // Composite annihilation: (T_1 ... T_k)^pw pulls every
        // coordinate into the cleared corner once 2^{-pw} (plus the
        // interpolation stencil) sits inside delta.
        let mut annihilation_power = None;
        let mut current = cleared.clone();
        for pw in 1..=(m as usize + 4) {
            for axis in 0..k {
                current = dilation_apply(axis, &current);
            }
            if current.values().iter().all(|&v| v == 0.0) {
                annihilation_power = Some(pw);
                break;
            }
        }
        out.push(DensityProbeTarget {
            delta,
            delta_log2: -m,
            distance,
            annihilation_power,
        });
    }
    let all = out.iter().all(|t| t.distance < eps);
    Ok(DensityProbeReport {
        eps,
        targets: out,
        all_below_eps: all,
    })
}

/// One shift's distances in the translation escape check.
#[derive(Clone, Debug, Serialize)]
pub struct TranslationStep {
    pub t_magnitude: f64,
    pub forward: f64,
    pub backward: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuityStep {
    pub offset: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TranslationReport {
    /// Per test field, the escape curve along the shift sequence.
    pub escapes: Vec<Vec<TranslationStep>>,
    /// Strong-continuity refinement: `d_0(T_{t+delta} f, T_t f)` with the
    /// offset halved per step.
    pub continuity: Vec<ContinuityStep>,
    /// Half-width of the largest distinct exhaustion window on the
    /// working box.
    pub omega_span: f64,
}

/// Verifies the escape-to-infinity mechanism of the translation group:
/// `d_0(T_{t_n} f, 0) -> 0` and `d_0(T_{-t_n} f, 0) -> 0` as the support
/// leaves the exhaustion windows, plus a strong-continuity refinement
/// at the first shift. All distances are computed on one common box
/// sized for the largest shift.
pub fn translation_group_check(
    metric: &LpMetric,
    t_seq: &[Vec<f64>],
    fields: &[GridField],
) -> Result<TranslationReport> {
    assert!(metric.p == 0.0, "the escape check uses the d_0 metric");
    assert!(!t_seq.is_empty() && !fields.is_empty());
    let k = fields[0].k();
    assert!(t_seq.iter().all(|t| t.len() == k));

    // Common working box: every field embedded once, sized for the
    // largest shift in either direction.
    let max_shift = t_seq
        .iter()
        .flat_map(|t| t.iter().map(|c| c.abs()))
        .fold(0.0f64, f64::max);
    let mut escapes = Vec::with_capacity(fields.len());
    let mut working: Option<GridField> = None;
    for f in fields {
        let reach = f
            .support_reach(&vec![0.0; k])
            .into_iter()
            .fold(1.0f64, f64::max);
        let spacing = f.spacing(0);
        let half_cells = ((reach + max_shift) / spacing).ceil() as usize + 2;
        let res = vec![2 * half_cells; k];
        let half = half_cells as f64 * spacing;
        let base = GridField::symmetric_box(&res, half).fill(|p| f.sample_or_zero(p));
        let zero = GridField::symmetric_box(&res, half);
        let mut steps = Vec::with_capacity(t_seq.len());
        for t in t_seq {
            let fwd = translate(&base, t)?;
            let neg: Vec<f64> = t.iter().map(|c| -c).collect();
            let bwd = translate(&base, &neg)?;
            steps.push(TranslationStep {
                t_magnitude: t.iter().map(|c| c * c).sum::<f64>().sqrt(),
                forward: metric.distance(&fwd, &zero)?,
                backward: metric.distance(&bwd, &zero)?,
            });
        }
        working.get_or_insert(base);
        escapes.push(steps);
    }

    // Strong continuity at t = t_seq[0]: halve the offset six times.
    let base = working.expect("at least one field");
    let t0 = &t_seq[0];
    let reference = translate(&base, t0)?;
    let mut continuity = Vec::new();
    let mut offset = 0.4 * base.spacing(0) * 16.0;
    for _ in 0..7 {
        let mut shifted_t = t0.clone();
        shifted_t[0] += offset;
        let moved = translate(&base, &shifted_t)?;
        continuity.push(ContinuityStep {
            offset,
            distance: metric.distance(&moved, &reference)?,
        });
        offset /= 2.0;
    }

    let box_half = base.extent()[0].1;
    Ok(TranslationReport {
        escapes,
        continuity,
        omega_span: box_half.floor(),
    })
}

/// Writes a field as a JSON header plus flat little-endian `f64` binary.
pub fn save_field(field: &GridField, path_base: &std::path::Path) -> Result<()> {
    let header = serde_json::json!({
        "schema": "hypermix.grid-field.v1",
        "k": field.k(),
        "resolution": field.resolution(),
        "extent": field.extent(),
        "dtype": "f64le",
        "count": field.values().len(),
    });
    std::fs::write(
        path_base.with_extension("json"),
        serde_json::to_string_pretty(&header)?,
    )?;
    let mut bytes = Vec::with_capacity(field.values().len() * 8);
    for v in field.values() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path_base.with_extension("bin"), bytes)?;
    Ok(())
}

/// Reads a field written by [`save_field`].
pub fn load_field(path_base: &std::path::Path) -> Result<GridField> {
    let header: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path_base.with_extension("json"))?)?;
    let resolution: Vec<usize> = serde_json::from_value(header["resolution"].clone())?;
    let extent: Vec<(f64, f64)> = serde_json::from_value(header["extent"].clone())?;
    let bytes = std::fs::read(path_base.with_extension("bin"))?;
    let mut field = GridField::new(&resolution, &extent);
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    if values.len() != field.values().len() {
        return Err(Error::GridMismatch(format!(
            "binary payload has {} values, header expects {}",
            values.len(),
            field.values().len()
        )));
    }
    field.values_mut().copy_from_slice(&values);
    Ok(field)
}
