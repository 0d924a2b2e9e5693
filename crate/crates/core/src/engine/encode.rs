use crate::error::{Error, Result};

/// Input pulse widths for one VMM operation. Every pulse rises at `t = 0`
/// and falls at its duration.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedInput {
    pub durations: Vec<f64>,
    pub t_window: f64,
}

impl EncodedInput {
    pub fn len(&self) -> usize {
        self.durations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.durations.is_empty()
    }
}

/// Time-encodes normalized inputs: `duration_i = x_i · T`.
pub fn encode_inputs(x: &[f64], t_window: f64) -> Result<EncodedInput> {
    if !(t_window > 0.0) {
        return Err(Error::contract(format!("time window must be > 0, got {t_window}")));
    }
    if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        return Err(Error::contract(format!("input {i} = {v} outside [0, 1]")));
    }
    Ok(EncodedInput {
        durations: x.iter().map(|&v| v * t_window).collect(),
        t_window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_time_encoding() {
        let e = encode_inputs(&[0.0, 1.0], 16e-9).unwrap();
        assert_eq!(e.durations, vec![0.0, 16e-9]);
        let e = encode_inputs(&[0.5], 64e-9).unwrap();
        assert_eq!(e.durations[0], 32e-9);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(encode_inputs(&[0.2, 1.2], 16e-9).is_err());
        assert!(encode_inputs(&[-0.1], 16e-9).is_err());
        assert!(encode_inputs(&[f64::NAN], 16e-9).is_err());
    }
}
