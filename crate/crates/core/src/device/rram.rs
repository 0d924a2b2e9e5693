use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// sinh-type RRAM: `I = sinh(β·V) / (β·R0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RramParams {
    /// Low-voltage resistance, the programmable state (Ω).
    pub r0: f64,
    /// Non-linearity factor (1/V).
    pub beta: f64,
    /// Lowest programmable `r0` (Ω).
    pub r_on: f64,
    /// Highest programmable `r0` (Ω).
    pub r_off: f64,
}

impl Default for RramParams {
    fn default() -> Self {
        Self {
            r0: 2.5e3,
            beta: 4.0,
            r_on: 2.5e3,
            r_off: 2.5e6,
        }
    }
}

impl RramParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::config(format!("rram beta must be > 0, got {}", self.beta)));
        }
        if !(self.r_on > 0.0 && self.r_on.is_finite() && self.r_off.is_finite()) {
            return Err(Error::config("rram r_on/r_off must be positive and finite"));
        }
        if self.r_on > self.r_off {
            return Err(Error::config(format!(
                "rram r_on ({}) must not exceed r_off ({})",
                self.r_on, self.r_off
            )));
        }
        if !(self.r0 >= self.r_on && self.r0 <= self.r_off) {
            return Err(Error::config(format!(
                "rram r0 {} outside [{}, {}]",
                self.r0, self.r_on, self.r_off
            )));
        }
        Ok(())
    }

    /// Same device programmed to a different state.
    pub fn with_r0(mut self, r0: f64) -> Self {
        self.r0 = r0;
        self
    }

    #[inline]
    pub fn current(&self, v: f64) -> f64 {
        (self.beta * v).sinh() / (self.beta * self.r0)
    }

    /// Differential conductance dI/dV.
    #[inline]
    pub fn conductance(&self, v: f64) -> f64 {
        (self.beta * v).cosh() / self.r0
    }
}

pub fn rram_current(r: &RramParams, v: f64) -> f64 {
    r.current(v)
}
