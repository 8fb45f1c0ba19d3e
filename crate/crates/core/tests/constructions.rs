use std::f64::consts::PI;

use proptest::prelude::*;

use qsl_core::bounds::{qsl_time, separable_pure_bound, Verdict, DEFAULT_STRUCTURE_TOL};
use qsl_core::constructions::{
    collective_overlap_fn, collective_t_perp, grouped_overlap_fn, grouped_t_perp, make_collective, make_grouped,
    make_mixture_demo, make_psi_ent, psi_ent_survival_amplitude, CollectiveSpec,
    EntangledChainSpec, GroupedSpec,
};
use qsl_core::dynamics::{first_orthogonal_time, SearchOptions, SurvivalCurve};
use qsl_core::qcore::energy_stats;

fn sample_times(horizon: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| 2.0 * horizon * k as f64 / (n - 1) as f64)
}

/// Order of the zero of `f` at `t0`, from finite differences of increasing order.
fn root_multiplicity(f: impl Fn(f64) -> num_complex::Complex64, t0: f64) -> usize {
    let h = 1e-4;
    for k in 1..=12usize {
        // k-th forward difference of f at t0, scaled by h^k
        let diff: num_complex::Complex64 = (0..=k)
            .map(|j| {
                let binom = (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64);
                let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                f(t0 + j as f64 * h) * (sign * binom)
            })
            .sum();
        if diff.norm() / h.powi(k as i32) > 0.1 {
            return k;
        }
    }
    12
}

#[test]
fn entangled_overlap_matches_matrix_survival() {
    for (n, m) in [(2, 2), (2, 3), (3, 2), (3, 3), (4, 2), (2, 6)] {
        let spec = EntangledChainSpec::new(n, m, 0.8).unwrap();
        let chain = make_psi_ent(&spec).unwrap();
        let curve = SurvivalCurve::new(&chain.state, &chain.hamiltonian).unwrap();
        let horizon = 20.0 * qsl_time(&spec.global_stats()).time.as_f64();
        for t in sample_times(horizon, 200) {
            let analytic = psi_ent_survival_amplitude(&spec, t).norm_sqr();
            assert!((analytic - curve.eval(t)).abs() < 1e-9, "N={n} M={m} t={t}");
        }
    }
}

#[test]
fn entangled_global_stats_match_matrix() {
    for (n, m) in [(2, 3), (3, 2), (5, 2)] {
        let spec = EntangledChainSpec::new(n, m, 1.3).unwrap();
        let chain = make_psi_ent(&spec).unwrap();
        let measured = energy_stats(&chain.state, &chain.hamiltonian).unwrap();
        let expected = spec.global_stats();
        assert!((measured.energy() - expected.energy()).abs() < 1e-12);
        assert!((measured.spread() - expected.spread()).abs() < 1e-12);
    }
}

#[test]
fn entangled_speedup_over_separable_bound() {
    for n in [2, 3, 4, 5] {
        for m in 1..=4 {
            let spec = EntangledChainSpec::new(n, m, 1.0).unwrap();
            if (n as u64).pow(m as u32) > 1024 {
                continue;
            }
            let chain = make_psi_ent(&spec).unwrap();
            let out =
                first_orthogonal_time(&chain.state, &chain.hamiltonian, &SearchOptions::default())
                    .unwrap();
            let t = out.t_perp.unwrap();
            assert!((t - chain.analytic_t_perp).abs() <= 1e-8 * chain.analytic_t_perp);
            let sep = separable_pure_bound(&vec![spec.local_stats(); m]).unwrap().time.as_f64();
            if m >= 2 {
                assert!(t < sep, "N={n} M={m}: {t} vs {sep}");
            } else {
                assert!(t >= sep - 1e-9);
                if n == 2 {
                    assert!((t - sep).abs() < 1e-8);
                }
            }
        }
    }
}

#[test]
fn collective_overlap_matches_matrix_survival() {
    for m in 1..=6 {
        for (w0, w) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.7, 2.3), (1.0, 0.25)] {
            let spec = CollectiveSpec::new(m, w0, w).unwrap();
            let (psi, h) = make_collective(&spec).unwrap();
            let curve = SurvivalCurve::new(&psi, &h).unwrap();
            let horizon = 20.0 * spec.qsl_time();
            for t in sample_times(horizon, 200) {
                let analytic = collective_overlap_fn(&spec, t).norm_sqr();
                assert!((analytic - curve.eval(t)).abs() < 1e-9, "M={m} w0={w0} w={w} t={t}");
            }
        }
    }
}

#[test]
fn collective_t_perp_matches_matrix_solver() {
    for m in 1..=6 {
        for (w0, w) in [(1.0, 0.0), (0.0, 1.0), (1.0, 0.5), (1.0, 1.0), (1.0, 3.0), (0.5, 1.75)] {
            let spec = CollectiveSpec::new(m, w0, w).unwrap();
            let scalar = collective_t_perp(&spec).unwrap();
            let (psi, h) = make_collective(&spec).unwrap();
            let matrix = first_orthogonal_time(&psi, &h, &SearchOptions::default()).unwrap();
            match (scalar.t_perp, matrix.t_perp) {
                (Some(a), Some(b)) => {
                    // A k-fold zero of the amplitude moves by about eps^(1/k)
                    // under round-off in the eigendecomposition.
                    let k = root_multiplicity(|t| collective_overlap_fn(&spec, t), a);
                    let tol = if k == 1 { 1e-8 } else { 10.0 * f64::EPSILON.powf(1.0 / k as f64) };
                    assert!((a - b).abs() < tol, "M={m} w0={w0} w={w} k={k}: {a} vs {b}")
                }
                (None, None) => {}
                other => panic!("M={m} w0={w0} w={w}: solvers disagree {other:?}"),
            }
        }
    }
}

#[test]
fn two_qubits_equal_couplings_never_orthogonal() {
    // |overlap|^2 = cos^6 t + sin^6 t >= 1/4
    let spec = CollectiveSpec::new(2, 1.0, 1.0).unwrap();
    let scalar = collective_t_perp(&spec).unwrap();
    assert!(scalar.t_perp.is_none());
    assert!((scalar.min_overlap - 0.25).abs() < 1e-12);
    let (psi, h) = make_collective(&spec).unwrap();
    let matrix = first_orthogonal_time(&psi, &h, &SearchOptions::default()).unwrap();
    assert!(matrix.t_perp.is_none());
    assert!((matrix.min_overlap - 0.25).abs() < 1e-9);
    assert!(((matrix.t_at_min / (PI / 4.0)).fract() - 0.0).abs() < 1e-6
        || ((matrix.t_at_min / (PI / 4.0)).fract() - 1.0).abs() < 1e-6);
}

#[test]
fn collective_limits() {
    let ratio = |w: f64| {
        let spec = CollectiveSpec::new(9, 1.0, w).unwrap();
        collective_t_perp(&spec).unwrap().t_perp.unwrap() / spec.qsl_time()
    };
    assert!((ratio(0.0) - 3.0).abs() < 1e-9);
    let far = ratio(1000.0);
    assert!((1.0 - 1e-9..1.001).contains(&far), "{far}");
    for k in 0..=200 {
        let w = 0.05 * k as f64;
        let spec = CollectiveSpec::new(9, 1.0, w).unwrap();
        if let Some(t) = collective_t_perp(&spec).unwrap().t_perp {
            assert!(t / spec.qsl_time() >= 1.0 - 1e-9, "w={w}");
        }
    }
    let limit = CollectiveSpec::new(9, 0.0, 1.0).unwrap();
    let t = collective_t_perp(&limit).unwrap().t_perp.unwrap();
    assert!((t / limit.qsl_time() - 1.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn collective_overlap_independent_of_initial_bits(
        bits in prop::collection::vec(any::<bool>(), 1..=4),
        w0 in 0.1f64..2.0,
        w in 0.0f64..3.0,
        t in 0.0f64..10.0,
    ) {
        let spec = CollectiveSpec::with_initial(w0, w, bits).unwrap();
        let (psi, h) = make_collective(&spec).unwrap();
        let curve = SurvivalCurve::new(&psi, &h).unwrap();
        prop_assert!((curve.eval(t) - collective_overlap_fn(&spec, t).norm_sqr()).abs() < 1e-10);
    }

    #[test]
    fn grouped_time_respects_sqrt_m_over_q(
        groups in 1usize..=3,
        per_group in 1usize..=3,
        w0 in 0.0f64..2.0,
        w in 0.0f64..2.0,
    ) {
        prop_assume!(w0 + w > 0.1);
        let spec = GroupedSpec::new(groups, per_group, w0, w).unwrap();
        if let Some(t) = grouped_t_perp(&spec).unwrap().t_perp {
            prop_assert!(t >= spec.lower_bound_factor() * spec.qsl_time() - 1e-9);
        }
        let (psi, h) = make_grouped(&spec).unwrap();
        let curve = SurvivalCurve::new(&psi, &h).unwrap();
        for t in sample_times(2.0 * spec.qsl_time(), 25) {
            let analytic = grouped_overlap_fn(&spec, t).unwrap().norm_sqr();
            prop_assert!((curve.eval(t) - analytic).abs() < 1e-9);
        }
    }
}

#[test]
fn grouped_examples() {
    for (g, q, expected) in [(3, 3, 3f64.sqrt()), (2, 2, 2f64.sqrt()), (2, 1, 2f64.sqrt())] {
        let (w0, w) = if q == 1 { (1.0, 0.0) } else { (0.0, 1.0) };
        let spec = GroupedSpec::new(g, q, w0, w).unwrap();
        let ratio = grouped_t_perp(&spec).unwrap().t_perp.unwrap() / spec.qsl_time();
        assert!((ratio - expected).abs() < 1e-8, "G={g} Q={q}: {ratio}");
        // the dense path sees a G-fold zero, so only agree to eps^(1/G)
        let (psi, h) = make_grouped(&spec).unwrap();
        let out = first_orthogonal_time(&psi, &h, &SearchOptions::default()).unwrap();
        let dense = out.t_perp.unwrap() / spec.qsl_time();
        assert!((dense - expected).abs() < 10.0 * f64::EPSILON.powf(1.0 / g as f64));
    }
}

#[test]
fn mixture_demo_reaches_bound_with_saturating_structure() {
    for omega in [1.0, 0.5, 2.5] {
        let demo = make_mixture_demo(omega).unwrap();
        let rho = demo.assembled();
        let h = demo.global_hamiltonian().unwrap();
        let stats = energy_stats(&rho, &h).unwrap();
        assert!((stats.energy() - 1.5 * omega).abs() < 1e-12);
        assert!((stats.spread() - 0.5 * omega).abs() < 1e-12);

        let curve = SurvivalCurve::new(&rho, &h).unwrap();
        for t in sample_times(2.0 * PI / omega, 200) {
            assert!((curve.eval(t) - demo.analytic_survival(t)).abs() < 1e-9);
        }
        let out = first_orthogonal_time(&rho, &h, &SearchOptions::default()).unwrap();
        let t = out.t_perp.unwrap();
        assert!((t - demo.analytic_t_perp()).abs() < 1e-8);
        assert!((t - qsl_time(&stats).time.as_f64()).abs() < 1e-8);

        let analysis = qsl_core::bounds::analyze_ensemble_at_qsl(
            &demo.ensemble,
            &demo.locals,
            DEFAULT_STRUCTURE_TOL,
        )
        .unwrap();
        assert_eq!(analysis.verdict, Verdict::SaturatingStructure);
        let evolving: Vec<_> = analysis.terms.iter().map(|r| r.evolving_index).collect();
        assert_eq!(evolving, vec![Some(0), Some(1)]);
    }
}
