//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its runtime. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines.

use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use hypermix::jordan_core::{
    build_a_matrix, build_d_matrix, solve_steering, verify_decay, ShiftBlock, SteeringProblem,
};
use hypermix::lp_grid::{kernel_density_probe, translation_group_check, GridField, LpMetric};
use hypermix::matrix::{expm_scaling_squaring, Mat};
use hypermix::mixing_cert::{
    certify_mixing, orbit_coverage_3d, BallNorm, IdentityGroup, NaiveWitness, OpenBall,
    RotationGroup, SphereMesh, TensorGroup, TensorSteeringWitness,
};
use hypermix::scalar::ratio;
use hypermix::seqspace_group::{
    cauchy_riemann_residual, exp_group_apply, GradedBijection, SeqSpaceModel,
};
use hypermix::spectral_gallery::{
    b2cp_scenario, kernel_eigencheck, verify_domain_facts, verify_domain_facts_random, Symbol,
};
use hypermix::tensor_ebs::{steer_tensor, TensorTuple, DEFAULT_LARGE_THRESHOLD};

fn pass(criterion: u32, label: &str, started: Instant) {
    println!(
        "PASS criterion {criterion} ({label}) in {:.2}s",
        started.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_1_exact_invertibility() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    for n in 1..=8usize {
        for _ in 0..20 {
            let numer = loop {
                let v = rng.gen_range(-40i64..=40);
                if v != 0 {
                    break v;
                }
            };
            let denom = rng.gen_range(1i64..=12);
            let z = ratio(numer, denom);
            let a = build_a_matrix(n, &z);
            let det = a.det();
            assert!(
                !num_traits::Zero::is_zero(&det),
                "det A_{{{n},{numer}/{denom}}} = 0"
            );
            // Scaling identity, exactly.
            let d = build_d_matrix(n, &z);
            let rhs = d
                .matmul(&build_a_matrix(n, &ratio(1, 1)))
                .matmul(&d)
                .scale(&z);
            assert_eq!(a, rhs, "scaling identity fails at n = {n}");
        }
    }
    assert!(started.elapsed().as_secs_f64() < 5.0, "runtime budget");
    pass(1, "exact invertibility and scaling identity", started);
}

#[test]
fn criterion_2_steering_bounds() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(2);
    for n in 1..=4usize {
        let block = ShiftBlock::new(n);
        let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..20)
            .map(|_| {
                (
                    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                )
            })
            .collect();
        // Fitted slopes over |z| in {10 .. 1e4}.
        let z_samples: Vec<f64> = (0..13).map(|i| 10f64.powf(1.0 + 0.25 * i as f64)).collect();
        let report = verify_decay(&block, &pairs, 10.0, &z_samples).unwrap();
        for (j, per_j) in report.per_j.iter().enumerate() {
            let want = -((j + 1) as f64);
            let sx = per_j.slope_x.expect("nonzero magnitudes");
            let si = per_j.slope_image.expect("nonzero magnitudes");
            assert!((sx - want).abs() <= 0.15, "n={n} slope_x[{j}] = {sx}");
            assert!((si - want).abs() <= 0.15, "n={n} slope_image[{j}] = {si}");
        }
        // Residuals at |z| = 1e6.
        for (u, v) in &pairs {
            let p = SteeringProblem::new(block, 1e6, u.clone(), v.clone());
            let sol = solve_steering(&p).unwrap();
            let (ru, rv) = sol.target_residuals(&p);
            assert!(ru <= 1e-4, "n={n}: ||x - u|| = {ru:.3e}");
            assert!(rv <= 1e-4, "n={n}: ||e^zS x - v|| = {rv:.3e}");
        }
    }
    assert!(started.elapsed().as_secs_f64() < 10.0, "runtime budget");
    pass(2, "steering decay slopes and limit residuals", started);
}

#[test]
fn criterion_3_tensor_steering() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(3);
    for dims in [vec![2usize, 2], vec![3, 2]] {
        let tuple = TensorTuple::new(&dims).unwrap();
        let core = tuple.core_indices();
        let z_seq: Vec<Vec<f64>> = (1..=5).map(|m| vec![10f64.powi(m); 2]).collect();
        for pair in 0..20 {
            let mut u = vec![0.0; tuple.total_dim()];
            let mut v = vec![0.0; tuple.total_dim()];
            for &i in &core {
                u[i] = rng.gen_range(-1.0..1.0);
                v[i] = rng.gen_range(-1.0..1.0);
            }
            let run = steer_tensor(&tuple, &u, &v, &z_seq, DEFAULT_LARGE_THRESHOLD).unwrap();
            let (_, ru, rv) = *run.residual_curves().last().expect("five steps");
            assert!(ru <= 1e-3, "dims {dims:?} pair {pair}: res_u {ru:.3e}");
            assert!(rv <= 1e-3, "dims {dims:?} pair {pair}: res_v {rv:.3e}");
        }
    }
    assert!(started.elapsed().as_secs_f64() < 30.0, "runtime budget");
    pass(3, "tensor steering at m = 5", started);
}

#[test]
fn criterion_4_seqspace_group() {
    let started = Instant::now();

    // Commutation, exact in rational arithmetic, k <= 3 and grades <= 6.
    for k in 2..=3usize {
        let dim = GradedBijection::new(k).grade_offset(7);
        let model = SeqSpaceModel::build(k, 6, vec![ratio(1, 1); dim], ratio(2, 1)).unwrap();
        let ops = model.a_operators();
        for j in 0..k {
            for l in (j + 1)..k {
                for idx in 0..model.dim() {
                    let mut e =
                        vec![num_rational::BigRational::from_integer(0.into()); model.dim()];
                    e[idx] = ratio(1, 1);
                    assert_eq!(
                        ops[j].apply(&ops[l].apply(&e)),
                        ops[l].apply(&ops[j].apply(&e)),
                        "commutation fails at k={k}, basis {idx}"
                    );
                }
            }
        }
    }

    let model: SeqSpaceModel<f64> = SeqSpaceModel::with_ones(2, 6).unwrap();
    let tol = 1e-10;
    let mut rng = StdRng::seed_from_u64(4);

    // Group law within 2 tol on 50 random vectors.
    for _ in 0..50 {
        let z: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let w: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let zw: Vec<f64> = z.iter().zip(&w).map(|(a, b)| a + b).collect();
        let x: Vec<f64> = (0..model.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let composed = exp_group_apply(&model, &z, &exp_group_apply(&model, &w, &x, tol).vector, tol);
        let direct = exp_group_apply(&model, &zw, &x, tol);
        for (a, b) in composed.vector.iter().zip(&direct.vector) {
            assert!((a - b).abs() <= 2.0 * tol, "group law: {a} vs {b}");
        }
    }

    // Uniform continuity bound on 100 samples.
    let a = model.a_bound();
    let c = model.c_bound();
    for _ in 0..100 {
        let z: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x: Vec<f64> = (0..model.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let out = exp_group_apply(&model, &z, &x, 1e-12);
        let diff: Vec<f64> = out.vector.iter().zip(&x).map(|(p, q)| p - q).collect();
        let z1: f64 = z.iter().map(|t| t.abs()).sum();
        let bound = model.p_seminorm(&x) / c * ((a * c * z1).exp() - 1.0);
        assert!(model.q_norm(&diff) <= bound + 1e-12, "continuity bound");
    }

    // Dense-exponential oracle agreement at N <= 64.
    assert!(model.dim() <= 64);
    for _ in 0..10 {
        let z: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let x: Vec<f64> = (0..model.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut dense = Mat::zeros(model.dim(), model.dim());
        for (j, op) in model.a_operators().iter().enumerate() {
            dense = dense.add(&op.to_dense().scale(&z[j]));
        }
        let oracle = expm_scaling_squaring(&dense).matvec(&x);
        let got = exp_group_apply(&model, &z, &x, 1e-12);
        for (p, q) in oracle.iter().zip(&got.vector) {
            assert!((p - q).abs() <= 1e-9, "oracle disagreement {p} vs {q}");
        }
    }

    assert!(started.elapsed().as_secs_f64() < 60.0, "runtime budget");
    pass(4, "group commutation, law, continuity, oracle", started);
}

#[test]
fn criterion_5_mixing_certificate() {
    let started = Instant::now();
    let tuple = TensorTuple::new(&[2, 2]).unwrap();
    let group = TensorGroup { tuple: &tuple };
    let builder = TensorSteeringWitness {
        tuple: &tuple,
        tau: DEFAULT_LARGE_THRESHOLD,
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
    // Grid: four magnitudes times five directions.
    let directions: Vec<Vec<f64>> = vec![
        vec![1.0 / 2f64.sqrt(); 2],
        vec![1.0, 0.0],
        vec![0.0, 1.0],
        vec![-1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()],
        vec![-1.0, 0.0],
    ];
    let grid: Vec<Vec<f64>> = [10.0, 100.0, 1000.0, 10000.0]
        .iter()
        .flat_map(|&m| {
            directions
                .iter()
                .map(move |d| d.iter().map(|c| c * m).collect())
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut center = |rng: &mut ChaCha8Rng| {
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
    };
    for pair in 0..20 {
        let u = OpenBall::new(center(&mut rng), 0.5, BallNorm::Q);
        let v = OpenBall::new(center(&mut rng), 0.5, BallNorm::Q);
        let cert = certify_mixing(&group, &builder, &kernel, &u, &v, &grid).unwrap();
        assert!(cert.verify(&group), "witness re-verification, pair {pair}");
        // Every sample with |t| >= 100 must have produced a witness.
        for f in &cert.failures {
            let mag = f.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!(
                mag < 100.0 * (1.0 - 1e-12),
                "pair {pair}: failure at |t| = {mag}"
            );
        }
        let r = cert.r.expect("certificate threshold");
        assert!(r <= 100.0 + 1e-9, "pair {pair}: r = {r}");
    }

    // Negative controls produce empty certificates.
    let id_cert = certify_mixing(
        &IdentityGroup { dim: 2 },
        &NaiveWitness,
        &[vec![1.0, 0.0], vec![0.0, 1.0]],
        &OpenBall::new(vec![1.0, 0.0], 0.3, BallNorm::Q),
        &OpenBall::new(vec![-1.0, 0.0], 0.3, BallNorm::Q),
        &(1..=4).map(|d| vec![10f64.powi(d)]).collect::<Vec<_>>(),
    )
    .unwrap();
    assert!(id_cert.witnesses.is_empty() && id_cert.r.is_none());
    let rot_cert = certify_mixing(
        &RotationGroup,
        &NaiveWitness,
        &[vec![Complex64::new(1.0, 0.0)]],
        &OpenBall::new(vec![Complex64::new(1.0, 0.0)], 0.1, BallNorm::Q),
        &OpenBall::new(vec![Complex64::new(2.0, 0.0)], 0.1, BallNorm::Q),
        &(1..=10)
            .map(|m| vec![Complex64::new(m as f64 * 9.0, 0.0)])
            .collect::<Vec<_>>(),
    )
    .unwrap();
    assert!(rot_cert.witnesses.is_empty() && rot_cert.r.is_none());

    assert!(started.elapsed().as_secs_f64() < 60.0, "runtime budget");
    pass(5, "mixing certificates and negative controls", started);
}

#[test]
fn criterion_6_orbit_coverage() {
    let started = Instant::now();
    let mesh = SphereMesh::new(64, 128);
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Mat::from_fn(3, 3, |_, _| StandardNormal.sample(&mut rng));
        let x = [
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
            StandardNormal.sample(&mut rng),
        ];
        let report = orbit_coverage_3d(&a, x, 100.0, 100_000, mesh);
        assert!(
            report.covered_fraction <= 0.2,
            "seed {seed}: fraction {}",
            report.covered_fraction
        );
    }
    assert!(started.elapsed().as_secs_f64() < 30.0, "runtime budget");
    pass(6, "orbit coverage bounded by 0.2", started);
}

#[test]
fn criterion_7_gallery() {
    let started = Instant::now();
    // Domain facts at witnesses and on 1e5 random samples.
    let facts = verify_domain_facts(256);
    assert!(facts.all_hold, "{facts:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    assert!(verify_domain_facts_random(&mut rng, 100_000));

    // Four-cell decision pattern.
    let scenario = b2cp_scenario(96).unwrap();
    let verdicts: Vec<bool> = scenario.cells.iter().map(|c| c.hypercyclic_type).collect();
    assert_eq!(verdicts, vec![true, false, false, true]);
    assert!(scenario.matches_expected_pattern);

    // Kernel eigencheck shrink factor for 1 + z/2 at w = 0.8.
    let symbol = Symbol::polynomial(vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)]);
    let w = Complex64::new(0.8, 0.0);
    let r30 = kernel_eigencheck(&symbol, w, 30).unwrap();
    let r60 = kernel_eigencheck(&symbol, w, 60).unwrap();
    assert!(
        r60 <= r30 * 0.8f64.powi(25),
        "shrink factor {} vs {}",
        r60 / r30,
        0.8f64.powi(25)
    );

    assert!(started.elapsed().as_secs_f64() < 20.0, "runtime budget");
    pass(7, "domain facts, decision table, eigencheck", started);
}

#[test]
fn criterion_8_lp_demos() {
    let started = Instant::now();

    // Translation escape for the standard bump.
    let metric0 = LpMetric::new(0.0);
    let bump = GridField::symmetric_box(&[40], 2.0).fill(|p| (1.0 - p[0] * p[0]).max(0.0));
    let t_seq: Vec<Vec<f64>> = (1..=14).map(|n| vec![n as f64]).collect();
    let report = translation_group_check(&metric0, &t_seq, &[bump]).unwrap();
    let threshold = report.omega_span + 1.0;
    let mut beyond = 0;
    for s in &report.escapes[0] {
        if s.t_magnitude > threshold {
            beyond += 1;
            assert!(s.forward < 1e-3, "|t| = {}: d0 = {}", s.t_magnitude, s.forward);
            assert!(s.backward < 1e-3, "|t| = {}: d0 = {}", s.t_magnitude, s.backward);
        }
    }
    assert!(beyond > 0, "sequence must pass the window span");

    // Density probe at p = 1/2.
    let metric = LpMetric::new(0.5);
    let constant = GridField::unit_cube(&[64, 64]).fill(|_| 1.0);
    let probe = kernel_density_probe(&metric, &[constant], 1e-3).unwrap();
    assert!(probe.all_below_eps);
    assert!(probe.targets[0].distance < 1e-3);
    assert!(probe.targets[0].annihilation_power.is_some());

    assert!(started.elapsed().as_secs_f64() < 30.0, "runtime budget");
    pass(8, "translation escape and density probe", started);
}

#[test]
fn criterion_9_analyticity_probe() {
    let started = Instant::now();
    let model: SeqSpaceModel<Complex64> = SeqSpaceModel::with_ones(2, 6).unwrap();
    let mut rng = StdRng::seed_from_u64(9);
    let x: Vec<Complex64> = (0..model.dim())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let z = vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)];
    for axis in 0..2 {
        let mut h = 0.1;
        let mut prev = cauchy_riemann_residual(&model, &z, axis, &x, 1, h);
        for halving in 0..4 {
            h /= 2.0;
            let next = cauchy_riemann_residual(&model, &z, axis, &x, 1, h);
            let factor = prev / next;
            assert!(
                (3.0..=5.0).contains(&factor),
                "axis {axis}, halving {halving}: factor {factor}"
            );
            prev = next;
        }
    }
    pass(9, "Cauchy-Riemann residual quarters per halving", started);
}
