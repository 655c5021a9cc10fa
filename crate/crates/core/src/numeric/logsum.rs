//! Numerically stable log-domain accumulation.

/// Log-sum-exp over a slice (two passes: max, then shifted sum).
pub fn logsumexp(values: &[f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        if v > max {
            max = v;
        }
    }
    if !max.is_finite() {
        return max;
    }
    let mut sum = 0.0;
    for &v in values {
        sum += (v - max).exp();
    }
    max + sum.ln()
}

/// Streaming log-sum-exp with a running maximum.
///
/// Never materializes the terms, so partition sums over up to 2^26
/// energies run in O(1) memory.
#[derive(Debug, Clone, Copy)]
pub struct StreamingLogSumExp {
    max: f64,
    sum: f64,
    count: u64,
}

impl StreamingLogSumExp {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
            count: 0,
        }
    }

    pub fn push(&mut self, v: f64) {
        self.count += 1;
        if v <= self.max {
            self.sum += (v - self.max).exp();
        } else {
            // rescale the accumulated sum to the new maximum
            self.sum = self.sum * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    pub fn value(&self) -> f64 {
        if self.count == 0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

impl Default for StreamingLogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

/// Neumaier-compensated sum; order-fixed reductions stay bit-stable
/// and accurate for long accumulations.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_on_small_inputs() {
        let xs = [0.5f64, 2.0, -1.0, 0.0];
        let naive = xs.iter().map(|x| x.exp()).sum::<f64>().ln();
        assert!((logsumexp(&xs) - naive).abs() < 1e-14);
    }

    #[test]
    fn survives_huge_magnitudes() {
        let xs = [-10_000.0, -10_002.0];
        let expected = -10_000.0 + (1.0 + (-2.0f64).exp()).ln();
        assert!((logsumexp(&xs) - expected).abs() < 1e-12);
        let xs = [10_000.0, 9_998.0];
        let expected = 10_000.0 + (1.0 + (-2.0f64).exp()).ln();
        assert!((logsumexp(&xs) - expected).abs() < 1e-12);
    }

    #[test]
    fn streaming_agrees_with_slice_version() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.7).sin() * 300.0).collect();
        let mut s = StreamingLogSumExp::new();
        for &x in &xs {
            s.push(x);
        }
        assert!((s.value() - logsumexp(&xs)).abs() < 1e-10);
        assert_eq!(s.count(), 1000);
    }

    #[test]
    fn empty_stream_is_log_zero() {
        assert_eq!(StreamingLogSumExp::new().value(), f64::NEG_INFINITY);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut c = CompensatedSum::new();
        c.add(1.0);
        for _ in 0..10_000_000 {
            c.add(1e-16);
        }
        assert!((c.value() - (1.0 + 1e-9)).abs() < 1e-15);
    }
}
