//! Brute-force oracle for the series-cell solver.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tdvmm::device::{mosfet_current, rram_current, CellState, CellTopology};

pub const TOPOLOGIES: [CellTopology; 2] = [CellTopology::SourceConnected, CellTopology::DrainConnected];

/// Branch mismatch as a function of the RRAM drop, from the device laws only.
fn scan_mismatch(cell: &CellState, vg: f64, vn: f64, u: f64) -> f64 {
    let i_mos = match cell.topology {
        CellTopology::SourceConnected => mosfet_current(&cell.mosfet, vg - u, vn - u),
        CellTopology::DrainConnected => mosfet_current(&cell.mosfet, vg, vn - u),
    }
    .unwrap();
    i_mos - rram_current(&cell.rram, u)
}

/// Root of the mismatch over `[lo, hi]` by an `n`-point scan and linear
/// interpolation within the bracketing cell.
fn scan_root(cell: &CellState, vg: f64, vn: f64, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let h = (hi - lo) / n as f64;
    let mut prev = scan_mismatch(cell, vg, vn, lo);
    for k in 1..=n {
        let u = lo + h * k as f64;
        let g = scan_mismatch(cell, vg, vn, u);
        if g <= 0.0 {
            let root = u - h * g / (g - prev);
            return (u - h, root);
        }
        prev = g;
    }
    panic!("no sign change on [{lo}, {hi}]");
}

/// Current from a flat `n`-point scan of the RRAM drop over `[0, v_node]`.
pub fn flat_scan_current(cell: &CellState, vg: f64, vn: f64, n: usize) -> f64 {
    let (_, u) = scan_root(cell, vg, vn, 0.0, vn, n);
    rram_current(&cell.rram, u)
}

/// Two-level scan: a coarse `n` grid then `n` points inside the bracket,
/// for the same `n²` resolution as a flat scan.
pub fn nested_scan_current(cell: &CellState, vg: f64, vn: f64, n: usize) -> f64 {
    let (lo, _) = scan_root(cell, vg, vn, 0.0, vn, n);
    let (_, u) = scan_root(cell, vg, vn, lo, lo + vn / n as f64, n);
    rram_current(&cell.rram, u)
}

/// Random topology, log-uniform `r0` over the window, and bias point.
pub fn random_cell(rng: &mut ChaCha8Rng) -> (CellState, f64, f64) {
    let topology = TOPOLOGIES[rng.gen_range(0..2)];
    let base = CellState::default().with_topology(topology);
    let r0 = (base.rram.r_on.ln() + rng.gen::<f64>() * (base.rram.r_off / base.rram.r_on).ln()).exp();
    (base.with_r0(r0), rng.gen_range(0.2..0.6), rng.gen_range(0.05..1.0))
}
