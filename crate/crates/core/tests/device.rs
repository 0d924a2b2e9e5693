use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tdvmm::device::*;

mod common;
use common::{flat_scan_current, nested_scan_current, random_cell, TOPOLOGIES};

#[test]
fn solver_matches_flat_million_point_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..6 {
        let (cell, vg, vn) = random_cell(&mut rng);
        let want = flat_scan_current(&cell, vg, vn, 1_000_000);
        let got = solve_cell(&cell, vg, vn).unwrap().current;
        assert!(((got - want) / want).abs() < 1e-6, "{cell:?} vg={vg} vn={vn}: {got} vs {want}");
    }
}

#[test]
fn solver_matches_nested_scan_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..2_000 {
        let (cell, vg, vn) = random_cell(&mut rng);
        let want = nested_scan_current(&cell, vg, vn, 1_000);
        let got = solve_cell(&cell, vg, vn).unwrap().current;
        worst = worst.max(((got - want) / want).abs());
    }
    assert!(worst < 1e-6, "worst relative deviation {worst:e}");
}

#[test]
fn internal_node_is_consistent_with_current() {
    for topology in TOPOLOGIES {
        let cell = CellState::default().with_topology(topology).with_r0(80e3);
        let op = solve_cell(&cell, 0.3, 0.8).unwrap();
        let drop = match topology {
            CellTopology::SourceConnected => op.v_internal,
            CellTopology::DrainConnected => 0.8 - op.v_internal,
        };
        let i_r = rram_current(&cell.rram, drop);
        assert!(((i_r - op.current) / op.current).abs() < 1e-9);
    }
}

#[test]
fn rram_reference_values() {
    let r = RramParams::default();
    assert_eq!(rram_current(&r, 0.0), 0.0);
    let i = rram_current(&r, 0.2);
    assert!((i - 0.8f64.sinh() / 1e4).abs() < 1e-15);
    assert!((i - 88.81e-6).abs() < 0.01e-6);
}

#[test]
fn source_connected_cell_depends_less_on_node_voltage() {
    for r0 in [2.5e3, 2.5e5, 2.5e6] {
        let change = |topology| {
            let cell = CellState::default().with_topology(topology).with_r0(r0);
            let hi = solve_cell(&cell, 0.3, 0.9).unwrap().current;
            let lo = solve_cell(&cell, 0.3, 0.7).unwrap().current;
            (hi - lo) / hi
        };
        let (s, d) = (change(CellTopology::SourceConnected), change(CellTopology::DrainConnected));
        assert!(s < d, "r0={r0}: source {s} vs drain {d}");
    }
}

#[test]
fn calibration_lands_near_reference_window() {
    let range = cell_current_range(&CellState::default(), 0.3, 0.8).unwrap();
    assert!((range.i_max / 136.9e-9 - 1.0).abs() < 0.3, "{range:?}");
    assert!((range.i_min / 25.8e-9 - 1.0).abs() < 0.3, "{range:?}");
}

#[test]
fn stronger_nonlinearity_does_not_widen_window() {
    let base = CellState::default();
    let mut steep = base;
    steep.rram.beta = 8.0;
    let a = cell_current_range(&base, 0.3, 0.8).unwrap();
    let b = cell_current_range(&steep, 0.3, 0.8).unwrap();
    assert!(b.dynamic_range() <= a.dynamic_range());
}

#[test]
fn lower_on_resistance_barely_raises_max_current() {
    let base = CellState::default();
    let mut low = base;
    low.rram.r_on /= 10.0;
    let a = cell_current_range(&base, 0.3, 0.8).unwrap();
    let b = cell_current_range(&low, 0.3, 0.8).unwrap();
    assert!(b.i_max > a.i_max && b.i_max < 2.0 * a.i_max);
}

#[test]
fn degenerate_window_is_rejected() {
    let mut cell = CellState::default();
    cell.rram.r_off = cell.rram.r_on;
    assert!(cell_current_range(&cell, 0.3, 0.8).is_err());
}

#[test]
fn half_weight_matches_dense_resistance_sweep() {
    for topology in TOPOLOGIES {
        let template = CellState::default().with_topology(topology);
        let range = cell_current_range(&template, 0.3, 0.8).unwrap();
        let target = 0.5 * (range.i_min + range.i_max);
        // Current falls with r0: bracket the target on a log grid, then bisect.
        let current = |r0: f64| solve_cell(&template.with_r0(r0), 0.3, 0.8).unwrap().current;
        let (lo_r, hi_r) = (template.rram.r_on.ln(), template.rram.r_off.ln());
        let n = 2_000;
        let grid: Vec<f64> = (0..=n).map(|k| (lo_r + (hi_r - lo_r) * k as f64 / n as f64).exp()).collect();
        let k = grid.windows(2).position(|w| current(w[1]) <= target).unwrap();
        let (mut a, mut b) = (grid[k], grid[k + 1]);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if current(mid) > target {
                a = mid;
            } else {
                b = mid;
            }
        }
        let oracle_r0 = 0.5 * (a + b);
        let rram = program_weight(0.5, &template, 0.3, 0.8).unwrap();
        assert!((rram.r0 / oracle_r0 - 1.0).abs() < 1e-6, "{topology:?}");
        let achieved = current(rram.r0);
        assert!(((achieved - target) / target).abs() < 1e-6);
    }
}

#[test]
fn programming_boundaries() {
    let t = CellState::default();
    assert_eq!(program_weight(1.0, &t, 0.3, 0.8).unwrap().r0, t.rram.r_on);
    assert_eq!(program_weight(0.0, &t, 0.3, 0.8).unwrap().r0, t.rram.r_off);
    assert!(program_weight(1.2, &t, 0.3, 0.8).is_err());
}

fn mean_region_error(l_gate: f64, v_gate: f64) -> f64 {
    let mut template = CellState::default();
    template.mosfet.l_gate = l_gate;
    let spec = ContourSpec {
        v_gate,
        v_cal: 0.8,
        region: (0.7, 0.9),
        delta_v: 1e-3,
    };
    let v_nodes: Vec<f64> = (0..=10).map(|k| 0.7 + 0.02 * k as f64).collect();
    let weights: Vec<f64> = (0..=10).map(|k| 0.1 * k as f64).collect();
    mean_error(&error_contour(&template, &spec, &v_nodes, &weights).unwrap()).unwrap()
}

#[test]
fn longer_gate_cuts_local_error() {
    let short = mean_region_error(60e-9, 0.3);
    let long = mean_region_error(240e-9, 0.3);
    assert!(short >= 3.0 * long, "60 nm {short:e}, 240 nm {long:e}");
    let mid = mean_region_error(120e-9, 0.3);
    assert!(short > mid && mid > long);
}

#[test]
fn higher_drive_lowers_local_error_pointwise() {
    let template = CellState::default();
    for w in [0.0, 0.25, 0.5, 0.75, 1.0] {
        for vn in [0.72, 0.8, 0.88] {
            let err = |vg: f64| {
                let range = cell_current_range(&template, vg, 0.8).unwrap();
                let rram = program_weight_in(w, &range, &template, vg, 0.8, None).unwrap();
                clm_dibl_error(&CellState { rram, ..template }, vg, vn, 1e-3).unwrap()
            };
            assert!(err(0.5) < err(0.3), "w={w} vn={vn}");
        }
    }
}

#[test]
fn ideal_source_has_no_local_error() {
    assert_eq!(local_error(&ConstantSink(1e-7), 0.8, 1e-3).unwrap(), 0.0);
}

#[test]
fn contour_flags_points_outside_region() {
    let spec = ContourSpec {
        v_gate: 0.3,
        v_cal: 0.8,
        region: (0.7, 0.9),
        delta_v: 1e-3,
    };
    let pts = error_contour(&CellState::default(), &spec, &[0.5, 0.8], &[0.2, 0.9]).unwrap();
    assert_eq!(pts.len(), 4);
    assert_eq!(pts.iter().filter(|p| p.in_region).count(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn current_increases_with_gate(t in 0usize..2, vg in 0.05f64..0.95, dv in 0.01f64..0.05, vn in 0.05f64..1.0,
                                   lr in 0.0f64..1.0) {
        let cell = CellState::default().with_topology(TOPOLOGIES[t]).with_r0(2.5e3 * 1000f64.powf(lr));
        let a = solve_cell(&cell, vg, vn).unwrap().current;
        let b = solve_cell(&cell, vg + dv, vn).unwrap().current;
        prop_assert!(b > a);
    }

    #[test]
    fn current_non_decreasing_in_node(t in 0usize..2, vg in 0.0f64..1.0, vn in 0.0f64..0.95, dv in 0.001f64..0.05,
                                      lr in 0.0f64..1.0) {
        let cell = CellState::default().with_topology(TOPOLOGIES[t]).with_r0(2.5e3 * 1000f64.powf(lr));
        let a = solve_cell(&cell, vg, vn).unwrap().current;
        let b = solve_cell(&cell, vg, vn + dv).unwrap().current;
        prop_assert!(b >= a);
    }

    #[test]
    fn current_decreases_with_resistance(t in 0usize..2, vg in 0.2f64..0.8, vn in 0.3f64..1.0, lr in 0.0f64..0.95) {
        let cell = CellState::default().with_topology(TOPOLOGIES[t]);
        let r0 = 2.5e3 * 1000f64.powf(lr);
        let a = solve_cell(&cell.with_r0(r0), vg, vn).unwrap().current;
        let b = solve_cell(&cell.with_r0(r0 * 1.1), vg, vn).unwrap().current;
        prop_assert!(b < a);
    }

    #[test]
    fn source_connection_lowers_node_sensitivity(vg in 0.25f64..0.6, vn in 0.7f64..0.9, lr in 0.0f64..1.0) {
        let r0 = 2.5e3 * 1000f64.powf(lr);
        let rel = |topology| {
            let cell = CellState::default().with_topology(topology).with_r0(r0);
            let i = solve_cell(&cell, vg, vn).unwrap().current;
            (i - solve_cell(&cell, vg, vn - 1e-3).unwrap().current) / i
        };
        prop_assert!(rel(CellTopology::SourceConnected) <= rel(CellTopology::DrainConnected));
    }

    #[test]
    fn program_readback_round_trip(t in 0usize..2, w in 0.0f64..=1.0, vg in prop::sample::select(vec![0.3, 0.5])) {
        let template = CellState::default().with_topology(TOPOLOGIES[t]);
        let rram = program_weight(w, &template, vg, 0.8).unwrap();
        let range = cell_current_range(&template, vg, 0.8).unwrap();
        let back = weight_from_current(&range, readback(&CellState { rram, ..template }, vg, 0.8).unwrap());
        prop_assert!((back - w).abs() < 1e-5);
    }

    #[test]
    fn rram_is_odd(v in -1.0f64..1.0, beta in 1.0f64..10.0, r0 in 1e3f64..1e7) {
        let r = RramParams { r0, beta, ..Default::default() };
        prop_assert_eq!(rram_current(&r, -v), -rram_current(&r, v));
    }
}
