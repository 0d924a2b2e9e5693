//! Smooth all-region behavioral MOSFET.
//!
//! The drain current is
//!
//! ```text
//! I = i_spec · (W/L) · F(u)² · sat(v_ds) · (1 + λ_eff · v_ds)
//! u = (v_gs − v_t0 + η_eff · v_ds) / (n · v_T)
//! F(u) = ln(1 + exp(u / 2))
//! sat(v_ds) = 1 − exp(−v_ds / v_T)
//! ```
//!
//! `F²` interpolates between the exponential subthreshold law and the
//! square-law strong-inversion regime. CLM enters through `λ_eff` and DIBL
//! through the threshold shift `η_eff · v_ds`; both scale as `l_ref / l_gate`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MosfetParams {
    /// Nominal threshold voltage (V).
    pub v_t0: f64,
    /// Subthreshold ideality factor.
    pub n_slope: f64,
    /// Specific current at unit W/L (A).
    pub i_spec: f64,
    pub w_over_l: f64,
    /// Channel-length modulation coefficient at `l_ref` (1/V).
    pub lambda_clm: f64,
    /// DIBL coefficient at `l_ref` (V/V).
    pub eta_dibl: f64,
    /// Drawn gate length (m).
    pub l_gate: f64,
    /// Gate length at which `lambda_clm` and `eta_dibl` are specified (m).
    pub l_ref: f64,
    pub thermal_voltage: f64,
}

impl Default for MosfetParams {
    /// Calibrated so that a cell at v_gate = 0.3 V with a 2.5 kΩ RRAM on its
    /// source draws ~137 nA at a 0.8 V column node with a 120 nm gate.
    fn default() -> Self {
        Self {
            v_t0: 0.35,
            n_slope: 1.3,
            i_spec: 1.91e-7,
            w_over_l: 2.0,
            lambda_clm: 0.3,
            eta_dibl: 0.08,
            l_gate: 120e-9,
            l_ref: 60e-9,
            thermal_voltage: 0.0258,
        }
    }
}

/// Current and its partial derivatives at one bias point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DrainCurrent {
    pub current: f64,
    pub d_vgs: f64,
    pub d_vds: f64,
}

#[inline]
fn softplus(x: f64) -> f64 {
    if x > 36.0 {
        x + (-x).exp()
    } else {
        x.exp().ln_1p()
    }
}

#[inline]
fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl MosfetParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_slope", self.n_slope),
            ("i_spec", self.i_spec),
            ("w_over_l", self.w_over_l),
            ("l_gate", self.l_gate),
            ("l_ref", self.l_ref),
            ("thermal_voltage", self.thermal_voltage),
            ("v_t0", self.v_t0),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("mosfet {name} must be > 0, got {v}")));
            }
        }
        for (name, v) in [("lambda_clm", self.lambda_clm), ("eta_dibl", self.eta_dibl)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(format!("mosfet {name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    fn length_factor(&self) -> f64 {
        self.l_ref / self.l_gate
    }

    /// CLM coefficient after gate-length scaling.
    pub fn lambda_eff(&self) -> f64 {
        self.lambda_clm * self.length_factor()
    }

    /// DIBL coefficient after gate-length scaling.
    pub fn eta_eff(&self) -> f64 {
        self.eta_dibl * self.length_factor()
    }

    /// Copy with the threshold shifted by `dv` (mismatch).
    pub fn with_threshold_offset(mut self, dv: f64) -> Self {
        self.v_t0 += dv;
        self
    }

    /// Drain current; `v_ds` must be non-negative.
    pub fn current(&self, v_gs: f64, v_ds: f64) -> Result<f64> {
        if !(v_ds >= 0.0) {
            return Err(Error::contract(format!("v_ds must be >= 0, got {v_ds}")));
        }
        if !v_gs.is_finite() || !v_ds.is_finite() {
            return Err(Error::contract("non-finite bias"));
        }
        Ok(self.eval(v_gs, v_ds).current)
    }

    /// Unchecked evaluation with analytic derivatives. Negative `v_ds` is
    /// treated as zero.
    #[inline]
    pub(crate) fn eval(&self, v_gs: f64, v_ds: f64) -> DrainCurrent {
        let v_ds = v_ds.max(0.0);
        let vt = self.thermal_voltage;
        let nvt = self.n_slope * vt;
        let eta = self.eta_eff();
        let lambda = self.lambda_eff();
        let scale = self.i_spec * self.w_over_l;

        let u = (v_gs - self.v_t0 + eta * v_ds) / nvt;
        let f = softplus(0.5 * u);
        // dF/du
        let df = 0.5 * logistic(0.5 * u);
        let decay = (-v_ds / vt).exp();
        let sat = -(-v_ds / vt).exp_m1();
        let clm = 1.0 + lambda * v_ds;

        let current = scale * f * f * sat * clm;
        let d_f2 = 2.0 * f * df / nvt;
        let d_vgs = scale * d_f2 * sat * clm;
        let d_vds = scale * (d_f2 * eta * sat * clm + f * f * (decay / vt) * clm + f * f * sat * lambda);
        DrainCurrent {
            current,
            d_vgs,
            d_vds,
        }
    }
}

/// Free-function form of [`MosfetParams::current`].
pub fn mosfet_current(p: &MosfetParams, v_gs: f64, v_ds: f64) -> Result<f64> {
    p.current(v_gs, v_ds)
}
