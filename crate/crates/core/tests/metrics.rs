use proptest::prelude::*;

use tdvmm::engine::DesignPoint;
use tdvmm::metrics::*;
use tdvmm::par::Execution;

fn batch(seed: u64, n: usize) -> TrialBatch {
    TrialBatch {
        seed,
        n_trials: n,
        ..Default::default()
    }
}

fn square(m: usize) -> DesignPoint {
    DesignPoint {
        m_rows: m,
        n_cols: m,
        ..Default::default()
    }
}

#[test]
fn precision_reference_values() {
    assert_eq!(precision(0.0074, 16), 6);
    assert_eq!(precision(0.045, 16), 3);
    assert_eq!(precision(0.25, 16), 1);
    assert_eq!(precision(0.9, 16), 0);
    assert_eq!(precision(0.0, 16), 16);
}

#[test]
fn singleton_batch_statistics() {
    let s = ErrorStats::from_errors(&[0.013]);
    assert_eq!((s.max, s.p99, s.mean, s.count), (0.013, 0.013, 0.013, 1));
}

#[test]
fn energy_is_additive_over_columns() {
    let dp = square(6);
    let traces = trial_traces(&dp, &batch(2, 1), 0).unwrap();
    assert_eq!(traces.len(), 12);
    let total = capacitor_energy(&traces, dp.v_reset);
    let parts: f64 = traces
        .iter()
        .map(|t| column_energy(t.capacitance, dp.v_reset, t.total_excursion(dp.v_reset)))
        .sum();
    assert!((total - parts).abs() <= 1e-15 * total);
    let r = run_design_point(&dp, &batch(2, 1), &PerfModel::default(), Execution::Sequential).unwrap();
    assert!((r.e_cl_total - total).abs() <= 1e-12 * total);
}

#[test]
fn reruns_are_bit_identical_across_schedules() {
    let dp = square(8);
    let perf = PerfModel::default();
    let a = evaluate_design_point(&dp, &batch(9, 12), &perf, Execution::Parallel).unwrap();
    let b = evaluate_design_point(&dp, &batch(9, 12), &perf, Execution::Sequential).unwrap();
    assert_eq!(a, b);
    let c = evaluate_design_point(&dp, &batch(10, 12), &perf, Execution::Parallel).unwrap();
    assert_ne!(a.report.e_out_max, c.report.e_out_max);
}

#[test]
fn differential_scheme_beats_single_ended() {
    for topology in ["source-connected", "drain-connected"] {
        let mut dp = square(12);
        dp.cell.topology = topology.parse().unwrap();
        let r = run_design_point(&dp, &batch(4, 20), &PerfModel::default(), Execution::default()).unwrap();
        assert!(r.e_out_max <= r.e_single_max, "{topology}");
    }
}

#[test]
fn capacitor_share_grows_with_array_size() {
    let perf = PerfModel::default();
    let mut last = (0.0, 0.0);
    for m in [4, 16, 64] {
        let dp = square(m);
        let r = run_design_point(&dp, &batch(1, 2), &perf, Execution::default()).unwrap();
        let est = performance_estimate(&dp, &perf, &r).unwrap();
        let share = est.share("load capacitors").unwrap();
        assert!(share.0 > last.0 && share.1 > last.1, "M={m}: {share:?}");
        last = share;
    }
}

#[test]
fn zero_io_efficiency_is_ops_over_capacitor_energy() {
    let dp = square(10);
    let r = run_design_point(&dp, &batch(1, 3), &PerfModel::zero_io(), Execution::default()).unwrap();
    let est = performance_estimate(&dp, &PerfModel::zero_io(), &r).unwrap();
    assert_eq!(est.energy_efficiency, 2.0 * 100.0 / r.e_cl_total);
}

#[test]
fn efficiency_falls_with_target_precision() {
    let perf = PerfModel::default();
    let base = square(16);
    let mut last = f64::INFINITY;
    for bits in 2..=6 {
        let dp = design_for_precision(&base, &perf, bits);
        let r = run_design_point(&dp, &batch(1, 2), &perf, Execution::default()).unwrap();
        let eff = performance_estimate(&dp, &perf, &r).unwrap().energy_efficiency;
        assert!(eff < last, "{bits} bits");
        last = eff;
    }
}

#[test]
fn empty_sweep_is_rejected() {
    let err = sweep(&square(4), &SweepGrid::default(), &batch(0, 1), &PerfModel::default(), Execution::default());
    assert!(err.is_err());
}

#[test]
fn single_point_sweep_matches_direct_run() {
    let base = square(6);
    let grid = SweepGrid {
        axes: vec![(SweepVar::TWindow, vec![32e-9])],
    };
    let perf = PerfModel::default();
    let out = sweep(&base, &grid, &batch(3, 4), &perf, Execution::default()).unwrap();
    let mut dp = base;
    dp.t_window = 32e-9;
    let direct = run_design_point(&dp, &batch(3, 4), &perf, Execution::default()).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].result.as_ref().unwrap(), &direct);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn grid_sampler_draws_only_grid_levels(bits in 1u32..8, seed in any::<u64>(), trial in 0usize..100) {
        let b = TrialBatch { seed, n_trials: 100, sampler: Sampler::GridQuantized(bits) };
        let shape = WorkloadShape { m_rows: 5, n_cols: 3, weight_scale: 1.0, mismatch_sigma_vt: 0.0, programming_error: false };
        let d = b.draw(trial, &shape).unwrap();
        let levels = f64::from((1u32 << bits) - 1);
        for v in d.x.iter().chain(d.w_pos.iter().flatten()).chain(d.w_neg.iter().flatten()) {
            let k = v * levels;
            prop_assert!((k - k.round()).abs() < 1e-9 && (0.0..=1.0).contains(v));
        }
    }

    #[test]
    fn precision_is_antitone(a in 1e-6f64..1.0, b in 1e-6f64..1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(precision(lo, 30) >= precision(hi, 30));
    }
}
