//! Batch experiment runners with deterministic artifacts.
//!
//! Every runner takes a seeded config plus a [`RunContext`], executes one
//! experiment, and writes a JSON report and CSV data tables under the
//! output directory. Identical config and seed produce byte-identical
//! artifacts: randomness comes from a counter-based generator seeded
//! explicitly, report structs serialize with fixed field order, and
//! wall-clock metadata goes to a separate `*.meta.json` sidecar.
//! Parallel scans collect per-item results in input order before any
//! reduction, so worker count never changes the output; the
//! `HYPERMIX_THREADS` environment variable caps the pool.

use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::jordan_core::{self, build_a_matrix, build_d_matrix, ShiftBlock};
use crate::lp_grid::{self, GridField, LpMetric};
use crate::matrix::Mat;
use crate::mixing_cert::{
    self, certify_mixing, BallNorm, OpenBall, SphereMesh, TensorGroup, TensorSteeringWitness,
};
use crate::scalar::{ratio, Scalar};
use crate::seqspace_group::SeqSpaceModel;
use crate::spectral_gallery::{self, kernel_eigencheck, Symbol};
use crate::tensor_ebs::{self, TensorTuple};

/// Arithmetic backend selector for runners that support both.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithMode {
    Float,
    Rational,
}

impl std::str::FromStr for ArithMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "float" => Ok(ArithMode::Float),
            "rational" => Ok(ArithMode::Rational),
            other => Err(format!("unknown arith mode `{other}` (float|rational)")),
        }
    }
}

/// Shared runner context: output directory, seed override, backend.
#[derive(Clone, Debug)]
pub struct RunContext {
    pub out_dir: PathBuf,
    pub seed_override: Option<u64>,
    pub arith: ArithMode,
}

impl RunContext {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        RunContext {
            out_dir: out_dir.into(),
            seed_override: None,
            arith: ArithMode::Float,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed_override = Some(seed);
        self
    }

    pub fn with_arith(mut self, arith: ArithMode) -> Self {
        self.arith = arith;
        self
    }

    fn seed(&self, config_seed: u64) -> u64 {
        self.seed_override.unwrap_or(config_seed)
    }

    fn rng(&self, config_seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed(config_seed))
    }
}

/// Worker cap from `HYPERMIX_THREADS` (0 or unset: rayon default).
pub fn thread_cap() -> Option<usize> {
    std::env::var("HYPERMIX_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs `op` inside a rayon pool sized by [`thread_cap`].
pub fn with_thread_pool<T: Send>(op: impl FnOnce() -> T + Send) -> T {
    match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("rayon pool")
            .install(op),
        None => op(),
    }
}

/// Parses a config file into a typed config, reporting the offending
/// field path on failure.
pub fn load_config<C: DeserializeOwned>(path: &Path, subcommand: &str) -> Result<C> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config {
        path: format!("{subcommand} config {}", path.display()),
        message: e.to_string(),
    })
}

fn write_report(ctx: &RunContext, name: &str, report: &serde_json::Value) -> Result<PathBuf> {
    std::fs::create_dir_all(&ctx.out_dir)?;
    let path = ctx.out_dir.join(format!("{name}.json"));
    let mut file = std::fs::File::create(&path)?;
    file.write_all(serde_json::to_string_pretty(report)?.as_bytes())?;
    file.write_all(b"\n")?;
    // Timestamps live in the sidecar so reports stay byte-identical.
    let meta = json!({
        "written_at_unix_ms": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0),
    });
    std::fs::write(
        ctx.out_dir.join(format!("{name}.meta.json")),
        serde_json::to_string_pretty(&meta)?,
    )?;
    Ok(path)
}

fn write_csv(ctx: &RunContext, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    std::fs::create_dir_all(&ctx.out_dir)?;
    let mut w = csv::Writer::from_path(ctx.out_dir.join(format!("{name}.csv")))
        .map_err(|e| Error::Config {
            path: name.to_string(),
            message: e.to_string(),
        })?;
    w.write_record(header).map_err(csv_err(name))?;
    for row in rows {
        w.write_record(row).map_err(csv_err(name))?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(name: &str) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Config {
        path: name.to_string(),
        message: e.to_string(),
    }
}

fn envelope(subcommand: &str, seed: u64, config: serde_json::Value, results: serde_json::Value) -> serde_json::Value {
    json!({
        "tool": "hypermix",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "seed": seed,
        "config": config,
        "results": results,
    })
}

// --- steer ---------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteerConfig {
    pub seed: u64,
    /// Half-dimension of the shift block.
    pub n: usize,
    /// Decades `lo..=hi`: parameters `z = 10^d`.
    pub decade_lo: i32,
    pub decade_hi: i32,
    /// Number of random unit-box `(u, v)` pairs.
    pub pairs: usize,
}

impl Default for SteerConfig {
    fn default() -> Self {
        SteerConfig {
            seed: 7,
            n: 2,
            decade_lo: 1,
            decade_hi: 5,
            pairs: 20,
        }
    }
}

/// Single-block steering experiment: residual curve per decade, decay
/// slopes, and (in rational mode) the exact invertibility checks.
pub fn run_steer(cfg: &SteerConfig, ctx: &RunContext) -> Result<PathBuf> {
    let seed = ctx.seed(cfg.seed);
    let mut rng = ctx.rng(cfg.seed);
    let block = ShiftBlock::new(cfg.n);
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..cfg.pairs)
        .map(|_| {
            (
                (0..cfg.n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                (0..cfg.n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            )
        })
        .collect();
    let z_samples: Vec<f64> = (cfg.decade_lo..=cfg.decade_hi)
        .map(|d| 10f64.powi(d))
        .collect();
    let decay = jordan_core::verify_decay(&block, &pairs, 10f64.powi(cfg.decade_lo), &z_samples)?;

    let mut rows = Vec::new();
    for &z in &z_samples {
        let mut worst_u = 0f64;
        let mut worst_v = 0f64;
        for (u, v) in &pairs {
            let p = jordan_core::SteeringProblem::new(block, z, u.clone(), v.clone());
            let sol = jordan_core::solve_steering(&p)?;
            let (ru, rv) = sol.target_residuals(&p);
            worst_u = worst_u.max(ru);
            worst_v = worst_v.max(rv);
        }
        rows.push(vec![
            format!("{z:e}"),
            format!("{worst_u:e}"),
            format!("{worst_v:e}"),
        ]);
    }
    write_csv(ctx, "steer_residuals", &["z", "res_u_max", "res_v_max"], &rows)?;

    let exact = if ctx.arith == ArithMode::Rational {
        let mut dets = Vec::new();
        for n in 1..=8usize {
            let z = ratio(seed as i64 % 7 + 2, 3);
            let a = build_a_matrix(n, &z);
            let det = a.det();
            let d = build_d_matrix(n, &z);
            let rhs = d
                .matmul(&build_a_matrix(n, &ratio(1, 1)))
                .matmul(&d)
                .scale(&z);
            dets.push(json!({
                "n": n,
                "z": format!("{z}"),
                "det": format!("{det}"),
                "det_nonzero": !num_traits::Zero::is_zero(&det),
                "dia_identity_exact": a == rhs,
            }));
        }
        json!({ "invertibility": dets })
    } else {
        serde_json::Value::Null
    };

    let report = envelope(
        "steer",
        seed,
        serde_json::to_value(cfg)?,
        json!({
            "decay": decay,
            "exact_checks": exact,
        }),
    );
    write_report(ctx, "steer_report", &report)
}

// --- tensor-steer ----------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorSteerConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub decade_lo: i32,
    pub decade_hi: i32,
    pub pairs: usize,
    /// Large-coordinate threshold tau.
    pub tau: f64,
}

impl Default for TensorSteerConfig {
    fn default() -> Self {
        TensorSteerConfig {
            seed: 7,
            dims: vec![2, 2],
            decade_lo: 1,
            decade_hi: 5,
            pairs: 20,
            tau: tensor_ebs::DEFAULT_LARGE_THRESHOLD,
        }
    }
}

/// Multi-parameter steering along the diagonal ray `z_m = (10^m, ..)`.
pub fn run_tensor_steer(cfg: &TensorSteerConfig, ctx: &RunContext) -> Result<PathBuf> {
    let seed = ctx.seed(cfg.seed);
    let mut rng = ctx.rng(cfg.seed);
    let tuple = TensorTuple::new(&cfg.dims)?;
    let core = tuple.core_indices();
    let z_seq: Vec<Vec<f64>> = (cfg.decade_lo..=cfg.decade_hi)
        .map(|d| vec![10f64.powi(d); tuple.k()])
        .collect();

    let mut worst: Vec<(f64, f64)> = vec![(0.0, 0.0); z_seq.len()];
    let mut pair_summaries = Vec::new();
    for pair_idx in 0..cfg.pairs {
        let mut u = vec![0.0; tuple.total_dim()];
        let mut v = vec![0.0; tuple.total_dim()];
        for &i in &core {
            u[i] = rng.gen_range(-1.0..1.0);
            v[i] = rng.gen_range(-1.0..1.0);
        }
        let run = tensor_ebs::steer_tensor(&tuple, &u, &v, &z_seq, cfg.tau)?;
        let curves = run.residual_curves();
        for (i, (_, ru, rv)) in curves.iter().enumerate() {
            worst[i].0 = worst[i].0.max(*ru);
            worst[i].1 = worst[i].1.max(*rv);
        }
        pair_summaries.push(json!({
            "pair": pair_idx,
            "final_res_u": curves.last().map(|c| c.1),
            "final_res_v": curves.last().map(|c| c.2),
            "failures": run.steps.iter().filter(|s| s.failure.is_some()).count(),
        }));
    }

    let rows: Vec<Vec<String>> = z_seq
        .iter()
        .zip(&worst)
        .enumerate()
        .map(|(i, (z, (ru, rv)))| {
            vec![
                format!("{}", i as i32 + cfg.decade_lo),
                format!("{:e}", z[0]),
                format!("{ru:e}"),
                format!("{rv:e}"),
            ]
        })
        .collect();
    write_csv(
        ctx,
        "tensor_steer_residuals",
        &["m", "z_coord", "res_u_max", "res_v_max"],
        &rows,
    )?;

    let report = envelope(
        "tensor-steer",
        seed,
        serde_json::to_value(cfg)?,
        json!({
            "dims": cfg.dims,
            "tau": cfg.tau,
            "pairs": pair_summaries,
            "worst_final_res_u": worst.last().map(|w| w.0),
            "worst_final_res_v": worst.last().map(|w| w.1),
        }),
    );
    write_report(ctx, "tensor_steer_report", &report)
}

// --- group-build -----------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupBuildConfig {
    pub seed: u64,
    pub k: usize,
    pub max_grade: usize,
    /// Strictness slack in the alpha recursion.
    pub slack: f64,
    /// Optional explicit diagonals; unit diagonals otherwise.
    pub f_diag: Option<Vec<f64>>,
    /// Tolerance for the certified exponential spot check.
    pub tol: f64,
}

impl Default for GroupBuildConfig {
    fn default() -> Self {
        GroupBuildConfig {
            seed: 7,
            k: 2,
            max_grade: 5,
            slack: 2.0,
            f_diag: None,
            tol: 1e-10,
        }
    }
}

/// Builds the sequence-space model, serializes it, and spot-checks the
/// coefficient bounds, commutation, and one certified group application.
pub fn run_group_build(cfg: &GroupBuildConfig, ctx: &RunContext) -> Result<PathBuf> {
    let seed = ctx.seed(cfg.seed);
    let mut rng = ctx.rng(cfg.seed);
    let dim = crate::seqspace_group::GradedBijection::new(cfg.k).grade_offset(cfg.max_grade + 1);
    let f_diag = cfg.f_diag.clone().unwrap_or_else(|| vec![1.0; dim]);
    let model = SeqSpaceModel::build(cfg.k, cfg.max_grade, f_diag, cfg.slack)?;

    std::fs::create_dir_all(&ctx.out_dir)?;
    std::fs::write(
        ctx.out_dir.join("seqspace_model.json"),
        serde_json::to_string_pretty(&model.to_json())?,
    )?;

    // Coefficient audit.
    let mut max_scaled = 0f64;
    let mut sums = Vec::new();
    for j in 0..cfg.k {
        let mut sum = 0.0;
        for (n, c) in model.c_coefficients(j) {
            let grade: usize = n.iter().sum();
            max_scaled = max_scaled.max(c.magnitude() * 2f64.powi(grade as i32));
            sum += c.magnitude();
        }
        sums.push(sum);
    }

    // Commutation on every basis vector (float route; the rational mode
    // swaps in exact arithmetic).
    let commutes = if ctx.arith == ArithMode::Rational {
        let f_diag_q: Vec<num_rational::BigRational> = model
            .f_diag()
            .iter()
            .map(|d| {
                // Diagonals arrive as f64; audit mode maps them to exact
                // rationals through the decimal expansion.
                let scaled = (d * 1e12).round() as i64;
                ratio(scaled, 1_000_000_000_000)
            })
            .collect();
        let slack_q = {
            let scaled = (cfg.slack * 1e6).round() as i64;
            ratio(scaled, 1_000_000)
        };
        let qmodel = SeqSpaceModel::build(cfg.k, cfg.max_grade, f_diag_q, slack_q)?;
        let ops = qmodel.a_operators();
        let mut ok = true;
        'outer: for j in 0..cfg.k {
            for l in (j + 1)..cfg.k {
                for idx in 0..qmodel.dim() {
                    let mut e = vec![num_rational::BigRational::from_integer(0.into()); qmodel.dim()];
                    e[idx] = ratio(1, 1);
                    if ops[j].apply(&ops[l].apply(&e)) != ops[l].apply(&ops[j].apply(&e)) {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        ok
    } else {
        let ops = model.a_operators();
        let mut ok = true;
        for j in 0..cfg.k {
            for l in (j + 1)..cfg.k {
                for idx in 0..model.dim() {
                    let mut e = vec![0.0; model.dim()];
                    e[idx] = 1.0;
                    let a = ops[j].apply(&ops[l].apply(&e));
                    let b = ops[l].apply(&ops[j].apply(&e));
                    if a.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-15) {
                        ok = false;
                    }
                }
            }
        }
        ok
    };

    // One certified application as a smoke record.
    let z: Vec<f64> = (0..cfg.k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let x: Vec<f64> = (0..model.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let app = crate::seqspace_group::exp_group_apply(&model, &z, &x, cfg.tol);

    let rows: Vec<Vec<String>> = model
        .alpha_log2()
        .iter()
        .enumerate()
        .map(|(m, a)| vec![format!("{m}"), format!("{a}")])
        .collect();
    write_csv(ctx, "group_alpha_log2", &["grade", "alpha_log2"], &rows)?;

    let report = envelope(
        "group-build",
        seed,
        serde_json::to_value(cfg)?,
        json!({
            "dim": model.dim(),
            "a_bound": model.a_bound(),
            "c_bound": model.c_bound(),
            "coefficient_sums": sums,
            "max_scaled_coefficient": max_scaled,
            "strict_coefficient_bound": max_scaled < 1.0,
            "pairwise_commutation": commutes,
            "sample_application": {
                "z": z,
                "certified_tail_bound": app.certified_tail_bound,
                "grades_used": app.grades_used,
            },
        }),
    );
    write_report(ctx, "group_build_report", &report)
}

// --- mix-cert ----------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixCertConfig {
    pub seed: u64,
    pub dims: Vec<usize>,
    pub radius: f64,
    pub pairs: usize,
    /// Grid magnitudes (per direction).
    pub magnitudes: Vec<f64>,
    pub tau: f64,
}

impl Default for MixCertConfig {
    fn default() -> Self {
        MixCertConfig {
            seed: 7,
            dims: vec![2, 2],
            radius: 0.5,
            pairs: 20,
            magnitudes: vec![10.0, 100.0, 1000.0, 10000.0],
            tau: tensor_ebs::DEFAULT_LARGE_THRESHOLD,
        }
    }
}

/// Ball center with l1 norm at most 1, supported on the core block.
pub fn random_core_center(rng: &mut impl Rng, tuple: &TensorTuple) -> Vec<f64> {
    let mut c = vec![0.0; tuple.total_dim()];
    for &i in &tuple.core_indices() {
        c[i] = rng.gen_range(-1.0..1.0);
    }
    let n1: f64 = c.iter().map(|v| f64::abs(*v)).sum();
    if n1 > 1.0 {
        for v in c.iter_mut() {
            *v /= n1;
        }
    }
    c
}

/// Directions for the certification grid: the diagonal, each axis, and
/// the alternating diagonal.
fn cert_directions(k: usize) -> Vec<Vec<f64>> {
    let mut dirs = vec![vec![1.0 / (k as f64).sqrt(); k]];
    for j in 0..k {
        let mut d = vec![0.0; k];
        d[j] = 1.0;
        dirs.push(d);
    }
    if k >= 2 {
        let mut d = vec![1.0 / (k as f64).sqrt(); k];
        d[0] = -d[0];
        dirs.push(d);
    }
    dirs
}

/// Runs mixing certification for random core ball pairs over the grid
/// `magnitude x direction`, with identity and rotation negative controls.
pub fn run_mix_cert(cfg: &MixCertConfig, ctx: &RunContext) -> Result<PathBuf> {
    let seed = ctx.seed(cfg.seed);
    let mut rng = ctx.rng(cfg.seed);
    let tuple = TensorTuple::new(&cfg.dims)?;
    let group = TensorGroup { tuple: &tuple };
    let builder = TensorSteeringWitness {
        tuple: &tuple,
        tau: cfg.tau,
    };
    let kernel: Vec<Vec<f64>> = tuple
        .core_indices()
        .into_iter()
        .map(|i| {
            let mut e = vec![0.0; tuple.total_dim()];
            e[i] = 1.0;
            e
        })
        .collect();
    let grid: Vec<Vec<f64>> = cfg
        .magnitudes
        .iter()
        .flat_map(|&m| {
            cert_directions(tuple.k())
                .into_iter()
                .map(move |d| d.iter().map(|c| c * m).collect())
        })
        .collect();

    let ball_pairs: Vec<(OpenBall<f64>, OpenBall<f64>)> = (0..cfg.pairs)
        .map(|_| {
            (
                OpenBall::new(random_core_center(&mut rng, &tuple), cfg.radius, BallNorm::Q),
                OpenBall::new(random_core_center(&mut rng, &tuple), cfg.radius, BallNorm::Q),
            )
        })
        .collect();

    let certs: Vec<_> = with_thread_pool(|| {
        use rayon::prelude::*;
        ball_pairs
            .par_iter()
            .map(|(u, v)| certify_mixing(&group, &builder, &kernel, u, v, &grid))
            .collect::<Vec<_>>()
    });

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut sound = true;
    for (i, cert) in certs.into_iter().enumerate() {
        let cert = cert?;
        sound &= cert.verify(&group);
        for w in &cert.witnesses {
            rows.push(vec![
                format!("{i}"),
                format!("{:e}", (w.t.iter().map(|c| c * c).sum::<f64>()).sqrt()),
                "1".to_string(),
                format!("{:e}", w.dist_u),
                format!("{:e}", w.dist_v),
            ]);
        }
        for f in &cert.failures {
            rows.push(vec![
                format!("{i}"),
                format!("{:e}", (f.iter().map(|c| c * c).sum::<f64>()).sqrt()),
                "0".to_string(),
                String::new(),
                String::new(),
            ]);
        }
        summaries.push(json!({
            "pair": i,
            "r": cert.r,
            "witnesses": cert.witnesses.len(),
            "failures": cert.failures.len(),
        }));
        std::fs::create_dir_all(&ctx.out_dir)?;
        std::fs::write(
            ctx.out_dir.join(format!("certificate_{i:03}.json")),
            serde_json::to_string_pretty(&json!({
                "tau": cfg.tau,
                "grid": grid,
                "certificate": cert,
            }))?,
        )?;
    }
    rows.sort();
    write_csv(
        ctx,
        "mix_cert_scan",
        &["pair", "t_magnitude", "success", "dist_u", "dist_v"],
        &rows,
    )?;

    // Negative controls.
    let id_group = mixing_cert::IdentityGroup { dim: 2 };
    let id_cert = certify_mixing(
        &id_group,
        &mixing_cert::NaiveWitness,
        &[vec![1.0, 0.0], vec![0.0, 1.0]],
        &OpenBall::new(vec![1.0, 0.0], 0.3, BallNorm::Q),
        &OpenBall::new(vec![-1.0, 0.0], 0.3, BallNorm::Q),
        &cfg.magnitudes.iter().map(|&m| vec![m]).collect::<Vec<_>>(),
    )?;
    let rot_grid: Vec<Vec<Complex64>> = cfg
        .magnitudes
        .iter()
        .map(|&m| vec![Complex64::new(m, 0.0)])
        .collect();
    let rot_cert = certify_mixing(
        &mixing_cert::RotationGroup,
        &mixing_cert::NaiveWitness,
        &[vec![Complex64::new(1.0, 0.0)]],
        &OpenBall::new(vec![Complex64::new(1.0, 0.0)], 0.1, BallNorm::Q),
        &OpenBall::new(vec![Complex64::new(2.0, 0.0)], 0.1, BallNorm::Q),
        &rot_grid,
    )?;

    let report = envelope(
        "mix-cert",
        seed,
        serde_json::to_value(cfg)?,
        json!({
            "pairs": summaries,
            "all_witnesses_reverify": sound,
            "identity_control": {
                "witnesses": id_cert.witnesses.len(),
                "r": id_cert.r,
            },
            "rotation_control": {
                "witnesses": rot_cert.witnesses.len(),
                "r": rot_cert.r,
            },
        }),
    );
    write_report(ctx, "mix_cert_report", &report)
}

// --- orbit-coverage -----------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitCoverageConfig {
    pub seed: u64,
    pub runs: usize,
    pub t_max: f64,
    pub samples: usize,
    pub bands: usize,
    pub sectors: usize,
}

impl Default for OrbitCoverageConfig {
    fn default() -> Self {
        OrbitCoverageConfig {
            seed: 7,
            runs: 10,
            t_max: 100.0,
            samples: 100_000,
            bands: 64,
            sectors: 128,
        }
    }
}

/// Projective orbit coverage for random Gaussian generators.
pub fn run_orbit_coverage(cfg: &OrbitCoverageConfig, ctx: &RunContext) -> Result<PathBuf> {
    let seed = ctx.seed(cfg.seed);
    let mesh = SphereMesh::new(cfg.bands, cfg.sectors);
    // Each run draws its generator from a per-run stream so parallel
    // execution cannot reorder the randomness.
    let inputs: Vec<(Mat<f64>, [f64; 3])> = (0..cfg.runs)
        .map(|run| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(run as u64));
            let a = Mat::from_fn(3, 3, |_, _| StandardNormal.sample(&mut rng));
            let mut x = [0.0; 3];
            loop {
                for v in x.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                if x.iter().map(|v| v * v).sum::<f64>() > 1e-3 {
                    break;
                }
            }
            (a, x)
        })
        .collect();

    let reports: Vec<_> = with_thread_pool(|| {
        use rayon::prelude::*;
        inputs
            .par_iter()
            .map(|(a, x)| mixing_cert::orbit_coverage_3d(a, *x, cfg.t_max, cfg.samples, mesh))
            .collect::<Vec<_>>()
    });

    let rows: Vec<Vec<String>> = reports
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                format!("{i}"),
                format!("{}", r.covered_fraction),
                format!("{}", r.hit_cells),
            ]
        })
        .collect();
    write_csv(ctx, "orbit_coverage", &["run", "fraction", "hit_cells"], &rows)?;

    let max_fraction = reports
        .iter()
        .map(|r| r.covered_fraction)
        .fold(0.0f64, f64::max);
    let report = envelope(
        "orbit-coverage",
        seed,
        serde_json::to_value(cfg)?,
        json!({
            "mesh": { "bands": cfg.bands, "sectors": cfg.sectors },
            "runs": reports,
            "max_fraction": max_fraction,
        }),
    );
    write_report(ctx, "orbit_coverage_report", &report)
}

// --- gallery -------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryConfig {
    pub seed: u64,
    /// Fill resolution for the domain scenarios.
    pub resolution: usize,
    /// Random samples for the domain-fact sweep.
    pub random_samples: usize,
}

impl Default for GalleryConfig {
    fn default() -> Self {
        GalleryConfig {
            seed: 7,
            resolution: 96,
            random_samples: 100_000,
        }
    }
}

/// The four-cell symbol-criterion scenario plus kernel eigenchecks.
pub fn run_gallery(cfg: &GalleryConfig, ctx: &RunContext) -> Result<PathBuf> {
    let seed = ctx.seed(cfg.seed);
    let mut rng = ctx.rng(cfg.seed);
    let scenario = spectral_gallery::b2cp_scenario(cfg.resolution)?;
    let random_ok = spectral_gallery::verify_domain_facts_random(&mut rng, cfg.random_samples);

    // Witness table for plotting.
    let mut rows = Vec::new();
    for cell in &scenario.cells {
        if let Some((pre, img)) = cell.flags.circle_witness {
            rows.push(vec![
                cell.label.clone(),
                "circle".into(),
                format!("{}", pre.re),
                format!("{}", pre.im),
                format!("{}", img.re),
                format!("{}", img.im),
            ]);
        }
        let (pre, img) = cell.flags.max_modulus_witness;
        rows.push(vec![
            cell.label.clone(),
            "max_modulus".into(),
            format!("{}", pre.re),
            format!("{}", pre.im),
            format!("{}", img.re),
            format!("{}", img.im),
        ]);
        let (pre, img) = cell.flags.min_modulus_witness;
        rows.push(vec![
            cell.label.clone(),
            "min_modulus".into(),
            format!("{}", pre.re),
            format!("{}", pre.im),
            format!("{}", img.re),
            format!("{}", img.im),
        ]);
    }
    write_csv(
        ctx,
        "gallery_witnesses",
        &["cell", "kind", "pre_re", "pre_im", "img_re", "img_im"],
        &rows,
    )?;

    // Kernel eigencheck table for alpha = 1 + z/2.
    let symbol = Symbol::polynomial(vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)]);
    let w = Complex64::new(0.8, 0.0);
    let eigen: Vec<serde_json::Value> = [30usize, 40, 50, 60]
        .iter()
        .map(|&n| {
            let r = kernel_eigencheck(&symbol, w, n).expect("low-degree symbol");
            json!({ "truncation": n, "residual": r })
        })
        .collect();

    let report = envelope(
        "gallery",
        seed,
        serde_json::to_value(cfg)?,
        json!({
            "scenario": scenario,
            "random_domain_facts_hold": random_ok,
            "kernel_eigencheck": {
                "symbol": "1 + z/2",
                "w": [w.re, w.im],
                "table": eigen,
            },
        }),
    );
    write_report(ctx, "gallery_report", &report)
}

// --- lp-demo -----------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LpDemoConfig {
    pub seed: u64,
    /// Exponent for the density probe (0 < p < 1).
    pub p: f64,
    pub resolution: usize,
    pub eps: f64,
    /// Number of unit shifts in the translation escape sequence.
    pub shifts: usize,
}

impl Default for LpDemoConfig {
    fn default() -> Self {
        LpDemoConfig {
            seed: 7,
            p: 0.5,
            resolution: 64,
            eps: 1e-3,
            shifts: 12,
        }
    }
}

/// Dilation kernel-density probe on the unit square and the translation
/// escape check on the line.
pub fn run_lp_demo(cfg: &LpDemoConfig, ctx: &RunContext) -> Result<PathBuf> {
    let seed = ctx.seed(cfg.seed);
    let metric_p = LpMetric::new(cfg.p);
    let constant = GridField::unit_cube(&[cfg.resolution, cfg.resolution]).fill(|_| 1.0);
    let smooth = GridField::unit_cube(&[cfg.resolution, cfg.resolution])
        .fill(|p| (std::f64::consts::PI * p[0]).sin() * (1.0 + p[1]));
    let probe = lp_grid::kernel_density_probe(&metric_p, &[constant, smooth], cfg.eps)?;

    let metric_0 = LpMetric::new(0.0);
    let bump = GridField::symmetric_box(&[40], 2.0).fill(|p| (1.0 - p[0] * p[0]).max(0.0));
    let t_seq: Vec<Vec<f64>> = (1..=cfg.shifts).map(|n| vec![n as f64]).collect();
    let translation = lp_grid::translation_group_check(&metric_0, &t_seq, &[bump])?;

    let rows: Vec<Vec<String>> = translation.escapes[0]
        .iter()
        .map(|s| {
            vec![
                format!("{}", s.t_magnitude),
                format!("{:e}", s.forward),
                format!("{:e}", s.backward),
            ]
        })
        .collect();
    write_csv(ctx, "lp_translation_escape", &["t", "forward_d0", "backward_d0"], &rows)?;

    let report = envelope(
        "lp-demo",
        seed,
        serde_json::to_value(cfg)?,
        json!({
            "density_probe": probe,
            "translation": translation,
        }),
    );
    write_report(ctx, "lp_demo_report", &report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp_ctx(name: &str) -> RunContext {
        let dir = std::env::temp_dir().join(format!("hypermix-report-{name}"));
        let _ = std::fs::remove_dir_all(&dir);
        RunContext::new(dir)
    }

    #[test]
    fn steer_runner_writes_artifacts() {
        let ctx = tmp_ctx("steer").with_arith(ArithMode::Rational);
        let cfg = SteerConfig {
            pairs: 5,
            ..SteerConfig::default()
        };
        let path = run_steer(&cfg, &ctx).unwrap();
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(report["subcommand"], "steer");
        let checks = report["results"]["exact_checks"]["invertibility"]
            .as_array()
            .unwrap();
        assert_eq!(checks.len(), 8);
        assert!(checks.iter().all(|c| c["det_nonzero"] == true));
        assert!(ctx.out_dir.join("steer_residuals.csv").exists());
    }

    #[test]
    fn reports_are_byte_identical_across_reruns() {
        let cfg = TensorSteerConfig {
            pairs: 3,
            decade_hi: 3,
            ..TensorSteerConfig::default()
        };
        let ctx1 = tmp_ctx("det1");
        let ctx2 = tmp_ctx("det2");
        run_tensor_steer(&cfg, &ctx1).unwrap();
        run_tensor_steer(&cfg, &ctx2).unwrap();
        for name in ["tensor_steer_report.json", "tensor_steer_residuals.csv"] {
            let a = std::fs::read(ctx1.out_dir.join(name)).unwrap();
            let b = std::fs::read(ctx2.out_dir.join(name)).unwrap();
            assert_eq!(a, b, "{name} differs across reruns");
        }
    }

    #[test]
    fn seed_override_changes_results() {
        let cfg = OrbitCoverageConfig {
            runs: 2,
            samples: 2000,
            ..OrbitCoverageConfig::default()
        };
        let ctx1 = tmp_ctx("seed1");
        let ctx2 = tmp_ctx("seed2").with_seed(99);
        run_orbit_coverage(&cfg, &ctx1).unwrap();
        run_orbit_coverage(&cfg, &ctx2).unwrap();
        let a = std::fs::read_to_string(ctx1.out_dir.join("orbit_coverage_report.json")).unwrap();
        let b = std::fs::read_to_string(ctx2.out_dir.join("orbit_coverage_report.json")).unwrap();
        let ja: serde_json::Value = serde_json::from_str(&a).unwrap();
        let jb: serde_json::Value = serde_json::from_str(&b).unwrap();
        assert_eq!(ja["seed"], 7);
        assert_eq!(jb["seed"], 99);
        assert_ne!(ja["results"]["runs"], jb["results"]["runs"]);
    }

    #[test]
    fn config_validation_reports_field() {
        let dir = std::env::temp_dir().join("hypermix-report-cfg");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(&path, r#"{"n": 2, "decade_lo": 1, "decade_hi": 3, "pairs": 2}"#).unwrap();
        let err = load_config::<SteerConfig>(&path, "steer").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("seed"), "error should name the field: {msg}");
        std::fs::write(&path, r#"{"seed": 1, "n": 2, "decade_lo": 1, "decade_hi": 3, "pairs": 2, "bogus": 5}"#)
            .unwrap();
        let err = load_config::<SteerConfig>(&path, "steer").unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn gallery_runner_emits_pattern() {
        let ctx = tmp_ctx("gallery");
        let cfg = GalleryConfig {
            resolution: 64,
            random_samples: 1000,
            ..GalleryConfig::default()
        };
        let path = run_gallery(&cfg, &ctx).unwrap();
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(
            report["results"]["scenario"]["matches_expected_pattern"],
            true
        );
        assert!(ctx.out_dir.join("gallery_witnesses.csv").exists());
    }
}
