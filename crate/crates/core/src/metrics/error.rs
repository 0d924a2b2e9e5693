//! Timing error and effective precision.

/// Normalized timing error `|t_cal − t_sim| / T` of one output.
pub fn compute_error(t_sim: f64, t_cal: f64, t_window: f64) -> f64 {
    (t_cal - t_sim).abs() / t_window
}

/// Effective precision in bits, `floor(−log2 e − 1)`, never negative.
/// A zero error has no finite precision and reports `cap` instead.
pub fn precision(e_out: f64, cap: u32) -> u32 {
    if !(e_out > 0.0) {
        return cap;
    }
    let p = (-e_out.log2() - 1.0).floor();
    if p <= 0.0 {
        0
    } else {
        p as u32
    }
}

/// Aggregate of per-output errors over a batch.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorStats {
    pub max: f64,
    /// Nearest-rank 99th percentile.
    pub p99: f64,
    pub mean: f64,
    pub count: usize,
}

impl ErrorStats {
    pub fn from_errors(errors: &[f64]) -> Self {
        if errors.is_empty() {
            return Self::default();
        }
        let mut sorted = errors.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let rank = ((0.99 * n as f64).ceil() as usize).clamp(1, n);
        Self {
            max: sorted[n - 1],
            p99: sorted[rank - 1],
            mean: errors.iter().sum::<f64>() / n as f64,
            count: n,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_arithmetic() {
        assert_eq!(compute_error(3e-9, 3e-9, 16e-9), 0.0);
        assert!((compute_error(0.486, 0.5, 1.0) - 0.014).abs() < 1e-15);
        assert!((compute_error(0.486 * 64e-9, 0.5 * 64e-9, 64e-9) - 0.014).abs() < 1e-12);
    }

    #[test]
    fn precision_examples() {
        assert_eq!(precision(0.0074, 8), 6);
        assert_eq!(precision(0.045, 8), 3);
        assert_eq!(precision(0.25, 8), 1);
        assert_eq!(precision(0.9, 8), 0);
        assert_eq!(precision(0.0, 4), 4);
    }

    #[test]
    fn singleton_batch() {
        let s = ErrorStats::from_errors(&[0.02]);
        assert_eq!((s.max, s.p99, s.mean, s.count), (0.02, 0.02, 0.02, 1));
    }

    #[test]
    fn percentile_is_nearest_rank() {
        let e: Vec<f64> = (1..=200).map(|k| k as f64).collect();
        let s = ErrorStats::from_errors(&e);
        assert_eq!(s.max, 200.0);
        assert_eq!(s.p99, 198.0);
        assert_eq!(s.mean, 100.5);
    }
}
