use serde::{Deserialize, Serialize};

/// Shared bin edges with separate counts for records whose final state lies
/// in the even or odd sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub count_even_true: Vec<usize>,
    pub count_odd_true: Vec<usize>,
}

/// Quantile with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    let x = p * (sorted.len() - 1) as f64;
    let (lo, hi) = (x.floor() as usize, x.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (x - lo as f64)
}

pub const MAX_BINS: usize = 200;

/// Freedman–Diaconis bin count `⌈range / (2 IQR n^{-1/3})⌉`, at least 1 and
/// at most [`MAX_BINS`].
pub fn freedman_diaconis_bins(values: &[f64]) -> usize {
    if values.len() < 2 {
        return 1;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let iqr = quantile(&v, 0.75) - quantile(&v, 0.25);
    let range = v[v.len() - 1] - v[0];
    let width = 2.0 * iqr / (v.len() as f64).cbrt();
    if !(width > 0.0) || !(range > 0.0) {
        return 1;
    }
    ((range / width).ceil() as usize).clamp(1, MAX_BINS)
}

impl Histogram {
    /// Bins the union of both groups; `bins = None` uses Freedman–Diaconis.
    pub fn build(even: &[f64], odd: &[f64], bins: Option<usize>) -> Self {
        let all: Vec<f64> = even.iter().chain(odd).copied().collect();
        if all.is_empty() {
            return Self { edges: vec![], count_even_true: vec![], count_odd_true: vec![] };
        }
        let k = bins.unwrap_or_else(|| freedman_diaconis_bins(&all)).max(1);
        let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi <= lo {
            hi = lo + 1.0;
        }
        let width = (hi - lo) / k as f64;
        let edges: Vec<f64> = (0..=k).map(|i| if i == k { hi } else { lo + width * i as f64 }).collect();
        let count = |xs: &[f64]| {
            let mut c = vec![0; k];
            for &x in xs {
                c[(((x - lo) / width) as usize).min(k - 1)] += 1;
            }
            c
        };
        Self { count_even_true: count(even), count_odd_true: count(odd), edges }
    }

    pub fn bins(&self) -> usize {
        self.count_even_true.len()
    }

    pub fn total(&self) -> usize {
        self.count_even_true.iter().chain(&self.count_odd_true).sum()
    }
}
