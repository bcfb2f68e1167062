//! Small descriptive statistics used by the experiment runners.

use serde::Serialize;

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn sample_variance(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

/// Normal-approximation 95% half-width `1.96 s / sqrt(n)`.
pub fn half_width_95(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    1.96 * (sample_variance(v) / v.len() as f64).sqrt()
}

/// Ordinary least-squares slope of `ys` on `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    let (mx, my) = (mean(xs), mean(ys));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Mean and 95% half-width at each checkpoint, across runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateStats {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub half_width: Vec<f64>,
    pub runs: usize,
}

impl AggregateStats {
    /// `series[r][c]` is run `r` at checkpoint `c`; all runs share `times`.
    pub fn from_runs(times: &[f64], series: &[&[f64]]) -> Self {
        assert!(series.iter().all(|s| s.len() == times.len()), "ragged series");
        let mut mean_v = Vec::with_capacity(times.len());
        let mut hw = Vec::with_capacity(times.len());
        let mut column = Vec::with_capacity(series.len());
        for c in 0..times.len() {
            column.clear();
            column.extend(series.iter().map(|s| s[c]));
            mean_v.push(mean(&column));
            hw.push(half_width_95(&column));
        }
        AggregateStats {
            times: times.to_vec(),
            mean: mean_v,
            half_width: hw,
            runs: series.len(),
        }
    }

    pub fn final_mean(&self) -> f64 {
        *self.mean.last().expect("non-empty series")
    }
}
