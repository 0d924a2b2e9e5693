//! Tabulated I(V) characteristics.
//!
//! A characteristic stores current and slope on a uniform grid over
//! `[0, v_max]` and interpolates with cubic Hermite segments. Tables on the
//! same grid add linearly, so a column's total load is a single table that
//! is updated as inputs switch off.

use crate::device::CurrentSink;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Characteristic {
    v_max: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Characteristic {
    pub fn zeros(v_max: f64, points: usize) -> Result<Self> {
        if points < 2 || !(v_max > 0.0) {
            return Err(Error::config("characteristic needs >= 2 points and v_max > 0"));
        }
        Ok(Self {
            v_max,
            step: v_max / (points - 1) as f64,
            values: vec![0.0; points],
            slopes: vec![0.0; points],
        })
    }

    pub fn sample<S: CurrentSink + ?Sized>(sink: &S, v_max: f64, points: usize) -> Result<Self> {
        let mut c = Self::zeros(v_max, points)?;
        for k in 0..points {
            let v = (k as f64 * c.step).min(v_max);
            let (i, d) = sink.current_and_slope(v)?;
            c.values[k] = i;
            c.slopes[k] = d;
        }
        Ok(c)
    }

    pub fn points(&self) -> usize {
        self.values.len()
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    /// `self += factor · other`; both tables must share a grid.
    pub fn add_scaled(&mut self, other: &Characteristic, factor: f64) {
        debug_assert_eq!(self.values.len(), other.values.len());
        debug_assert_eq!(self.v_max, other.v_max);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += factor * b;
        }
        for (a, b) in self.slopes.iter_mut().zip(&other.slopes) {
            *a += factor * b;
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= factor);
        self.slopes.iter_mut().for_each(|v| *v *= factor);
        self
    }

    /// Interpolated current; `v` is clamped to the table range.
    #[inline]
    pub fn eval(&self, v: f64) -> f64 {
        let v = v.clamp(0.0, self.v_max);
        let s = v / self.step;
        let k = (s as usize).min(self.values.len() - 2);
        let t = s - k as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[k]
            + h10 * self.step * self.slopes[k]
            + h01 * self.values[k + 1]
            + h11 * self.step * self.slopes[k + 1]
    }
}
