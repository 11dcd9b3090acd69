//! End-to-end acceptance runs.  Each test covers one verification target at
//! its stated tolerance and prints a single summary line; together they are
//! the release gate for the crate.

use std::cmp::Ordering;
use std::sync::Arc;
use std::time::Instant;

use num::complex::Complex;
use num::rational::BigRational;
use num::ToPrimitive;
use qmod::moment::omega_form;
use qmod::{
    classify_stability, descended_chern_integral, descended_metric_chart, endomorphism_basis,
    facet_signature, hn_filtration, horizontal_dimension, integral_weight_in_facet, jh_filtration,
    kempf_ness_flow, kronecker_moduli_report, moment_identity_residual, moment_map,
    revalidate_jh_at_weight, s_equivalent, same_facet, skew_endomorphism_dimension,
    ambient_chern_fd, CMat, ClassifyOptions, Distribution, FiltrationOptions, FlowOptions,
    LineBundleData, Quiver, Representation, TangentVector, Verdict, Weight,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C64 = Complex<f64>;

fn quiver(vertices: &[&str], arrows: &[(&str, &str, &str)]) -> Arc<Quiver> {
    Quiver::new(
        vertices.iter().map(|s| s.to_string()),
        arrows
            .iter()
            .map(|(id, s, t)| (id.to_string(), s.to_string(), t.to_string())),
    )
    .expect("well-formed quiver")
}

fn kronecker() -> Arc<Quiver> {
    quiver(&["1", "2"], &[("x", "1", "2"), ("y", "1", "2")])
}

fn single_arrow() -> Arc<Quiver> {
    quiver(&["1", "2"], &[("x", "1", "2")])
}

fn loop_quiver() -> Arc<Quiver> {
    quiver(&["1"], &[("t", "1", "1")])
}

fn triangle() -> Arc<Quiver> {
    quiver(
        &["1", "2", "3"],
        &[("a", "1", "2"), ("b", "2", "3"), ("c", "1", "3")],
    )
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn rational_weight(entries: &[(i64, i64)]) -> Weight {
    entries.iter().map(|&(n, d)| rat(n, d)).collect()
}

fn random_rational<R: Rng>(rng: &mut R) -> BigRational {
    rat(rng.gen_range(-12..=12), rng.gen_range(1..=8))
}

fn random_weight<R: Rng>(rng: &mut R, len: usize) -> Weight {
    (0..len).map(|_| random_rational(rng)).collect()
}

fn random_quiver_and_dims<R: Rng>(rng: &mut R) -> (Arc<Quiver>, Vec<usize>) {
    let n_v = rng.gen_range(1..=3);
    let vertices: Vec<String> = (0..n_v).map(|i| format!("v{i}")).collect();
    let n_arrows = rng.gen_range(1..=4);
    let arrows: Vec<(String, String, String)> = (0..n_arrows)
        .map(|k| {
            (
                format!("a{k}"),
                format!("v{}", rng.gen_range(0..n_v)),
                format!("v{}", rng.gen_range(0..n_v)),
            )
        })
        .collect();
    let q = Quiver::new(vertices, arrows).expect("well-formed quiver");
    let dims: Vec<usize> = (0..n_v).map(|_| rng.gen_range(1..=3)).collect();
    (q, dims)
}

fn mat1(re: f64, im: f64) -> CMat {
    CMat::from_element(1, 1, C64::new(re, im))
}

fn kronecker_pair(a: C64, b: C64) -> Representation<f64> {
    Representation::new(
        kronecker(),
        vec![1, 1],
        vec![CMat::from_element(1, 1, a), CMat::from_element(1, 1, b)],
    )
    .expect("shapes match")
}

/// The sample shared by the first two tests: five random quivers, twenty
/// random (representation, direction, weight) triples each.
fn moment_sample() -> Vec<(Representation<f64>, qmod::LieElement<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
    let mut sample = Vec::new();
    for _ in 0..5 {
        let (q, dims) = random_quiver_and_dims(&mut rng);
        for _ in 0..20 {
            let rep = Representation::random(
                Arc::clone(&q),
                dims.clone(),
                rng.gen(),
                Distribution::ComplexGaussian,
            );
            let xi = qmod::LieElement::random_skew(&dims, &mut rng);
            let theta: Vec<f64> = (0..dims.len())
                .map(|_| random_rational(&mut rng).to_f64().expect("small rational"))
                .collect();
            sample.push((rep, xi, theta));
        }
    }
    sample
}

#[test]
fn moment_pairing_identity_holds_on_random_instances() {
    let start = Instant::now();
    let sample = moment_sample();
    assert_eq!(sample.len(), 100);
    let mut worst = 0.0f64;
    for (rep, xi, theta) in &sample {
        let residual = moment_identity_residual(rep, xi, theta).expect("skew direction");
        worst = worst.max(residual);
        assert!(
            residual <= 1e-10,
            "pairing residual {residual:.3e} above 1e-10"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "identity sweep took {elapsed:?}");
    println!(
        "PASS moment pairing identity: 100 random triples over 5 quivers, worst residual {worst:.3e} (<= 1e-10) in {elapsed:.2?}"
    );
}

#[test]
fn moment_map_is_trace_free_on_the_same_sample() {
    let sample = moment_sample();
    let mut worst = 0.0f64;
    for (rep, _, theta) in &sample {
        let mm = moment_map(rep, theta).expect("nonzero rank");
        let trace = mm.l.trace_sum().norm();
        worst = worst.max(trace);
        assert!(trace <= 1e-12, "trace sum {trace:.3e} above 1e-12");
    }
    println!(
        "PASS trace-free moment map: worst |sum tr L| {worst:.3e} (<= 1e-12) over 100 samples"
    );
}

#[test]
fn kronecker_flow_descends_to_the_unit_sphere() {
    let theta = [1.0f64, -1.0];
    let opts = FlowOptions {
        epsilon: 1e-8,
        max_iters: 5000,
        record_history: true,
        ..FlowOptions::default()
    };
    let mut worst_norm_gap = 0.0f64;
    let mut most_iters = 0usize;
    for seed in 0..50u64 {
        let rep = Representation::random(
            kronecker(),
            vec![1, 1],
            0x3F0 + seed,
            Distribution::ComplexGaussian,
        );
        assert!(rep.norm() > 1e-6, "degenerate draw");
        let report = kempf_ness_flow(&rep, &theta, &opts).expect("flow runs");
        assert!(
            report.converged && report.iterations <= 5000,
            "seed {seed}: no convergence in {} iterations (final norm {:.3e})",
            report.iterations,
            report.final_moment_norm
        );
        assert!(report.final_moment_norm <= 1e-8);
        let sphere_gap = (report.final_rep.norm().powi(2) - 1.0).abs();
        assert!(
            sphere_gap <= 1e-6,
            "seed {seed}: |a|^2+|b|^2 = 1 violated by {sphere_gap:.3e}"
        );
        let history = &report.f_history;
        assert!(!history.is_empty(), "history was not recorded");
        for pair in history.windows(2) {
            assert!(
                pair[1] <= pair[0],
                "seed {seed}: objective rose from {} to {}",
                pair[0],
                pair[1]
            );
        }
        worst_norm_gap = worst_norm_gap.max(sphere_gap);
        most_iters = most_iters.max(report.iterations);
    }
    println!(
        "PASS flow convergence: 50/50 runs reached |L| <= 1e-8 (max {most_iters} iterations), worst sphere gap {worst_norm_gap:.3e}, every objective history monotone"
    );
}

#[test]
fn curated_verdicts_match_structural_analysis() {
    let th_pos = rational_weight(&[(1, 1), (-1, 1)]);
    let th_zero = rational_weight(&[(0, 1), (0, 1)]);
    let th_loop = rational_weight(&[(0, 1)]);

    let zero_kron = kronecker_pair(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let stable_kron = kronecker_pair(C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let generic_kron = kronecker_pair(C64::new(0.6, 0.1), C64::new(-0.3, 0.8));

    let arrow_on = Representation::new(single_arrow(), vec![1, 1], vec![mat1(1.0, 0.0)])
        .expect("shapes match");
    let arrow_off = Representation::new(single_arrow(), vec![1, 1], vec![mat1(0.0, 0.0)])
        .expect("shapes match");

    let loop_one = Representation::new(loop_quiver(), vec![1], vec![mat1(2.0, 1.0)])
        .expect("shapes match");
    let jordan = Representation::new(
        loop_quiver(),
        vec![2],
        vec![CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        )],
    )
    .expect("shapes match");
    let semisimple_loop = Representation::new(
        loop_quiver(),
        vec![2],
        vec![CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(2.0, 0.0),
            ],
        )],
    )
    .expect("shapes match");
    let zero_loop =
        Representation::new(loop_quiver(), vec![2], vec![CMat::zeros(2, 2)]).expect("shapes");

    let double_stable =
        Representation::direct_sum(&kronecker(), &[&stable_kron, &stable_kron]).expect("same quiver");
    let double_arrow =
        Representation::direct_sum(&single_arrow(), &[&arrow_on, &arrow_on]).expect("same quiver");

    let cases: Vec<(&str, &Representation<f64>, &Weight, Verdict)> = vec![
        ("kronecker unit", &stable_kron, &th_pos, Verdict::Stable),
        ("kronecker generic", &generic_kron, &th_pos, Verdict::Stable),
        ("kronecker zero", &zero_kron, &th_pos, Verdict::Unstable),
        (
            "kronecker unit, balanced weight",
            &stable_kron,
            &th_zero,
            Verdict::StrictlySemistableNotPolystable,
        ),
        (
            "kronecker zero, balanced weight",
            &zero_kron,
            &th_zero,
            Verdict::StrictlySemistablePolystable,
        ),
        ("loop d=1", &loop_one, &th_loop, Verdict::Stable),
        (
            "loop jordan block",
            &jordan,
            &th_loop,
            Verdict::StrictlySemistableNotPolystable,
        ),
        (
            "loop distinct eigenvalues",
            &semisimple_loop,
            &th_loop,
            Verdict::StrictlySemistablePolystable,
        ),
        (
            "loop zero",
            &zero_loop,
            &th_loop,
            Verdict::StrictlySemistablePolystable,
        ),
        ("arrow on", &arrow_on, &th_pos, Verdict::Stable),
        ("arrow off", &arrow_off, &th_pos, Verdict::Unstable),
        (
            "arrow on, balanced weight",
            &arrow_on,
            &th_zero,
            Verdict::StrictlySemistableNotPolystable,
        ),
        (
            "arrow off, balanced weight",
            &arrow_off,
            &th_zero,
            Verdict::StrictlySemistablePolystable,
        ),
        (
            "kronecker double",
            &double_stable,
            &th_pos,
            Verdict::StrictlySemistablePolystable,
        ),
        (
            "arrow double",
            &double_arrow,
            &th_pos,
            Verdict::StrictlySemistablePolystable,
        ),
    ];

    let opts = ClassifyOptions::default();
    for (name, rep, theta, expected) in &cases {
        let result = classify_stability(rep, theta, &opts).expect("classification runs");
        assert_eq!(
            result.verdict, *expected,
            "{name}: classified {:?}, structural analysis says {:?} (flags {:?})",
            result.verdict, expected, result.flags
        );
        assert!(
            result.search_exhaustive,
            "{name}: structural search was not exhaustive"
        );
        assert_eq!(
            result.flow.converged,
            expected.is_semistable(),
            "{name}: flow verdict disagrees with the structural one"
        );
        if *expected == Verdict::Unstable {
            assert!(result.witness.is_some(), "{name}: no destabilizing witness");
        }
    }
    println!(
        "PASS curated cross-validation: {}/{} flow verdicts match exhaustive structural analysis",
        cases.len(),
        cases.len()
    );
}

#[test]
fn facet_mates_share_every_verdict() {
    let dims = vec![1usize, 1usize];
    let mut rng = ChaCha8Rng::seed_from_u64(0xFACE7);
    let opts = ClassifyOptions::default();
    let filt_opts = FiltrationOptions::default();
    let mut wall_pairs = 0usize;

    let mut done = 0usize;
    while done < 100 {
        // A third of the pairs sit on the slope-tie wall; the rest are open
        // chambers with matched orientation.
        let (theta, omega): (Weight, Weight) = if done % 3 == 0 {
            let t = random_rational(&mut rng);
            let s = random_rational(&mut rng);
            (vec![t.clone(), t], vec![s.clone(), s])
        } else {
            let theta = random_weight(&mut rng, 2);
            let mut omega = random_weight(&mut rng, 2);
            if theta[0] == theta[1] || omega[0] == omega[1] {
                continue;
            }
            if (theta[0] > theta[1]) != (omega[0] > omega[1]) {
                omega.swap(0, 1);
            }
            (theta, omega)
        };
        done += 1;
        assert!(
            same_facet(&theta, &omega, &dims).expect("arrangement"),
            "construction landed outside the facet"
        );

        let generic = kronecker_pair(C64::new(0.4, -0.2), C64::new(0.7, 0.1));
        let zero = kronecker_pair(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let unit = kronecker_pair(C64::new(1.0, 0.0), C64::new(0.0, 0.0));

        for rep in [&generic, &zero, &unit] {
            let at_theta = classify_stability(rep, &theta, &opts).expect("runs");
            let at_omega = classify_stability(rep, &omega, &opts).expect("runs");
            assert_eq!(
                at_theta.verdict, at_omega.verdict,
                "verdicts split inside a facet: theta {theta:?} vs omega {omega:?}"
            );

            if at_theta.verdict.is_semistable() {
                let jh = jh_filtration(rep, &theta, &filt_opts).expect("semistable input");
                revalidate_jh_at_weight(rep, &jh, &omega, &filt_opts)
                    .expect("filtration survives the facet mate");
                wall_pairs += usize::from(jh.len() > 1);
            }
        }

        let eq_theta = s_equivalent(&generic, &zero, &theta, &filt_opts);
        let eq_omega = s_equivalent(&generic, &zero, &omega, &filt_opts);
        match (eq_theta, eq_omega) {
            (Ok(a), Ok(b)) => assert_eq!(a, b, "S-equivalence split inside a facet"),
            (Err(_), Err(_)) => {} // both weights reject the unstable input
            (a, b) => panic!("S-equivalence defined at only one weight: {a:?} vs {b:?}"),
        }
    }
    assert!(wall_pairs > 0, "no wall pair exercised a nontrivial filtration");
    println!(
        "PASS facet invariance: verdicts, Jordan-Holder revalidation, and S-equivalence agree across 100 same-facet weight pairs ({wall_pairs} nontrivial filtrations revalidated)"
    );
}

#[test]
fn integral_weights_keep_the_exact_signature() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x16E7);
    let mut nontrivial = 0usize;
    for _ in 0..100 {
        let (_, dims) = random_quiver_and_dims(&mut rng);
        let theta = random_weight(&mut rng, dims.len());
        let integral = integral_weight_in_facet(&theta, &dims).expect("arrangement");
        for entry in &integral {
            assert!(entry.is_integer(), "non-integral entry {entry}");
        }
        assert_eq!(
            facet_signature(&theta, &dims).expect("signature"),
            facet_signature(&integral, &dims).expect("signature"),
            "signature moved for theta {theta:?} on dims {dims:?}"
        );
        assert!(same_facet(&theta, &integral, &dims).expect("arrangement"));
        nontrivial += usize::from(theta.iter().any(|t| !t.is_integer()));
    }
    println!(
        "PASS integral weights: 100/100 rounded weights share the exact facet signature ({nontrivial} with fractional input)"
    );
}

#[test]
fn quotient_form_integrates_to_the_sphere_volume() {
    let report = kronecker_moduli_report::<f64>(200, &[1.0, -1.0]).expect("quadrature");
    let target = std::f64::consts::TAU;
    let gap = (report.total - target).abs();
    assert!(
        gap <= 0.01 * target,
        "integral {} misses 2 pi by {gap:.3e}",
        report.total
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0x40D);
    for i in 0..50u64 {
        let (rep, ambient, gauge) = if i < 40 {
            let raw = Representation::random(
                kronecker(),
                vec![1, 1],
                0xE40 + i,
                Distribution::ComplexGaussian,
            );
            let scale = 1.0 / raw.norm();
            let mats = raw.matrices().iter().map(|m| m * C64::new(scale, 0.0)).collect();
            let rep = Representation::new(kronecker(), vec![1, 1], mats).expect("shapes");
            let mm = moment_map(&rep, &[1.0, -1.0]).expect("rank one");
            assert!(mm.norm <= 1e-12, "normalized point is not Einstein-Hermitian");
            (rep, 2usize, 2usize)
        } else {
            let raw = Representation::random(
                triangle(),
                vec![1, 1, 1],
                0xE80 + i + rng.gen_range(0..7),
                Distribution::ComplexGaussian,
            );
            let opts = FlowOptions {
                epsilon: 1e-10,
                ..FlowOptions::default()
            };
            let flowed = kempf_ness_flow(&raw, &[1.0, 0.0, -1.0], &opts).expect("flow runs");
            assert!(flowed.converged, "triangle point did not reach the zero set");
            (flowed.final_rep, 3usize, 3usize)
        };
        let horizontal = horizontal_dimension(&rep);
        assert_eq!(
            horizontal,
            ambient - gauge + 1,
            "horizontal dimension off at sample {i}"
        );
    }
    println!(
        "PASS quotient form: integral {:.6} vs 2 pi (relative gap {:.2e}) at grid 200; horizontal dimension = dim A - dim G + 1 at 50 stable Einstein-Hermitian points",
        report.total,
        gap / target
    );
}

#[test]
fn line_bundle_curvature_identities_hold() {
    // Ambient curvature against the constant multiple of the Kahler form.
    let mut rng = ChaCha8Rng::seed_from_u64(0x11B);
    let data = LineBundleData::new(&rational_weight(&[(1, 1), (-1, 1)]), &[1, 1])
        .expect("kronecker weight");
    let lambda: f64 = data.lambda();
    let mut worst_ambient = 0.0f64;
    for seed in 0..10u64 {
        let x = Representation::random(
            kronecker(),
            vec![1, 1],
            0x1B0 + seed,
            Distribution::ComplexGaussian,
        );
        let v = TangentVector::random(&x, &mut rng);
        let w = TangentVector::random(&x, &mut rng);
        let fd = ambient_chern_fd(&x, &v, &w, lambda, 1e-3).expect("finite differences");
        let target = -(lambda / std::f64::consts::TAU) * omega_form(v.mats(), w.mats());
        let gap = (fd - target).abs();
        worst_ambient = worst_ambient.max(gap);
        assert!(gap <= 1e-6, "ambient curvature residual {gap:.3e}");
    }

    // Chart metric against the closed form e^{-n} (1 + |z|^2)^{-n}.
    let n = data.twist() as i32;
    let mut worst_metric = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for k in 0..20 {
        let u = -2.0 + 0.21 * k as f64;
        let v = 1.7 - 0.17 * k as f64;
        let sample = descended_metric_chart(u, v, &data).expect("chart");
        let closed = (-1.0f64).exp() * (1.0 + u * u + v * v).powi(-n);
        let metric_gap = (sample.metric - closed).abs();
        worst_metric = worst_metric.max(metric_gap);
        assert!(metric_gap <= 1e-8, "chart metric off by {metric_gap:.3e}");
        let ratio_gap = (sample.ratio - n as f64 / std::f64::consts::TAU).abs();
        worst_ratio = worst_ratio.max(ratio_gap);
        assert!(ratio_gap <= 1e-3, "curvature ratio off by {ratio_gap:.3e}");
    }

    // Total curvature equals the twist.
    let integral = descended_chern_integral::<f64>(64, &data).expect("quadrature");
    let integral_gap = (integral.total - 1.0).abs();
    assert!(
        integral_gap <= 0.01,
        "first Chern number {} misses the twist",
        integral.total
    );
    println!(
        "PASS line bundle: ambient curvature residual {worst_ambient:.2e} (<= 1e-6), chart metric residual {worst_metric:.2e} (<= 1e-8), ratio residual {worst_ratio:.2e} (<= 1e-3), total curvature {:.4} vs twist 1",
        integral.total
    );
}

#[test]
fn stable_points_are_schur_with_a_skew_line() {
    let th_pos = rational_weight(&[(1, 1), (-1, 1)]);
    let th_triangle = rational_weight(&[(1, 1), (0, 1), (-1, 1)]);
    let opts = ClassifyOptions::default();
    let mut checked = 0usize;

    // Randomly generated stable points, flowed to their Einstein-Hermitian
    // representatives.
    for seed in 0..10u64 {
        let raw = Representation::random(
            kronecker(),
            vec![1, 1],
            0x9C0 + seed,
            Distribution::ComplexGaussian,
        );
        let flow_opts = FlowOptions {
            epsilon: 1e-10,
            ..FlowOptions::default()
        };
        let flowed = kempf_ness_flow(&raw, &[1.0, -1.0], &flow_opts).expect("flow runs");
        assert!(flowed.converged);
        for rep in [&raw, &flowed.final_rep] {
            let verdict = classify_stability(rep, &th_pos, &opts).expect("runs");
            assert_eq!(verdict.verdict, Verdict::Stable);
            assert_eq!(endomorphism_basis(rep).len(), 1, "stable but not Schur");
            assert_eq!(
                skew_endomorphism_dimension(rep),
                1,
                "skew endomorphisms are not a line at seed {seed}"
            );
            checked += 1;
        }
    }

    for seed in 0..5u64 {
        let raw = Representation::random(
            triangle(),
            vec![1, 1, 1],
            0xA11 + seed,
            Distribution::ComplexGaussian,
        );
        let flow_opts = FlowOptions {
            epsilon: 1e-10,
            ..FlowOptions::default()
        };
        let flowed = kempf_ness_flow(&raw, &[1.0, 0.0, -1.0], &flow_opts).expect("flow runs");
        assert!(flowed.converged);
        let verdict = classify_stability(&flowed.final_rep, &th_triangle, &opts).expect("runs");
        assert_eq!(verdict.verdict, Verdict::Stable);
        assert_eq!(endomorphism_basis(&flowed.final_rep).len(), 1);
        assert_eq!(skew_endomorphism_dimension(&flowed.final_rep), 1);
        checked += 1;
    }
    println!(
        "PASS Schur consistency: {checked}/{checked} stable points have dim End = 1 and a one-dimensional skew-Hermitian endomorphism space"
    );
}

#[test]
fn slopes_filter_through_the_seesaw() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EE5);
    let mut tallies = [0usize; 3];
    for trial in 0..200 {
        let (q, _) = random_quiver_and_dims(&mut rng);
        let n_v = q.num_vertices();
        let (sub_dims, quot_dims) = loop {
            let a: Vec<usize> = (0..n_v).map(|_| rng.gen_range(0..=3)).collect();
            let c: Vec<usize> = (0..n_v).map(|_| rng.gen_range(0..=3)).collect();
            if a.iter().sum::<usize>() > 0 && c.iter().sum::<usize>() > 0 {
                break (a, c);
            }
        };
        let total_dims: Vec<usize> = sub_dims
            .iter()
            .zip(&quot_dims)
            .map(|(&a, &c)| a + c)
            .collect();

        // Assemble a genuine extension: block-triangular matrices with a
        // random coupling class.
        let sub = Representation::random(
            Arc::clone(&q),
            sub_dims.clone(),
            2 * trial,
            Distribution::ComplexGaussian,
        );
        let quot = Representation::random(
            Arc::clone(&q),
            quot_dims.clone(),
            2 * trial + 1,
            Distribution::ComplexGaussian,
        );
        let mut mats = Vec::new();
        for (idx, arrow) in q.arrows().iter().enumerate() {
            let rows = total_dims[arrow.dst];
            let cols = total_dims[arrow.src];
            let (ra, ca) = (sub_dims[arrow.dst], sub_dims[arrow.src]);
            let mut m = CMat::zeros(rows, cols);
            m.view_mut((0, 0), (ra, ca)).copy_from(sub.matrix(idx));
            m.view_mut((ra, ca), (rows - ra, cols - ca))
                .copy_from(quot.matrix(idx));
            for r in 0..ra {
                for col in ca..cols {
                    m[(r, col)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            mats.push(m);
        }
        let total = Representation::new(Arc::clone(&q), total_dims.clone(), mats)
            .expect("block shapes line up");

        let theta = random_weight(&mut rng, n_v);
        let mu_sub = qmod::slope(&theta, sub.dims()).expect("nonzero rank").slope;
        let mu_total = qmod::slope(&theta, total.dims()).expect("nonzero rank").slope;
        let mu_quot = qmod::slope(&theta, quot.dims()).expect("nonzero rank").slope;

        let left = mu_sub.cmp(&mu_total);
        let right = mu_total.cmp(&mu_quot);
        assert_eq!(
            left, right,
            "mixed seesaw pattern: mu(sub) {mu_sub} vs mu(total) {mu_total} vs mu(quot) {mu_quot}"
        );
        tallies[match left {
            Ordering::Less => 0,
            Ordering::Equal => 1,
            Ordering::Greater => 2,
        }] += 1;
    }
    println!(
        "PASS seesaw: 200 short exact sequences, sign patterns rising/level/falling = {}/{}/{}, no mixed pattern",
        tallies[0], tallies[1], tallies[2]
    );
}

#[test]
fn unstable_points_expose_their_filtration() {
    // A companion check tying the filtration layer into the gate: the zero
    // Kronecker representation at weight (1, -1) has the two vertex simples
    // as its Harder-Narasimhan factors, with strictly increasing slopes.
    let theta = rational_weight(&[(1, 1), (-1, 1)]);
    let zero = kronecker_pair(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    let f = hn_filtration(&zero, &theta, &FiltrationOptions::default()).expect("filtration");
    assert_eq!(f.len(), 2);
    for pair in f.factor_slopes.windows(2) {
        assert!(pair[0] < pair[1], "slopes not strictly increasing");
    }
    println!("PASS filtration companion: unstable point splits into {} factors with increasing slopes", f.len());
}
