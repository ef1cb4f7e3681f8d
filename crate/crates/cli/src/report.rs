use std::collections::BTreeMap;

use serde::Serialize;
use stallings_core::recognition::Verdict;

const Z95: f64 = 1.959_963_984_540_054;

pub const VERDICTS: [Verdict; 5] =
    [Verdict::Intransitive, Verdict::Imprimitive, Verdict::Alternating, Verdict::Symmetric, Verdict::Undetermined];

/// Wilson score interval at 95% for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if k == 0.0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (low, high)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Frequency {
    pub count: u64,
    pub frequency: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub command: Vec<String>,
    pub seed: u64,
    pub wall_time_ms: u64,
    pub rank: usize,
    pub n: usize,
    pub trials: u64,
    pub condition_vertices: usize,
    /// `2^-rank`, the limiting alternating frequency.
    pub expected_alternating: f64,
    pub outcomes: BTreeMap<String, Frequency>,
}

impl ExperimentReport {
    pub fn outcomes_from(counts: &BTreeMap<Verdict, u64>, trials: u64) -> BTreeMap<String, Frequency> {
        VERDICTS
            .iter()
            .map(|v| {
                let count = counts.get(v).copied().unwrap_or(0);
                let (wilson_low, wilson_high) = wilson(count, trials);
                let frequency = if trials == 0 { 0.0 } else { count as f64 / trials as f64 };
                (format!("{v:?}"), Frequency { count, frequency, wilson_low, wilson_high })
            })
            .collect()
    }

    pub fn frequency(&self, v: Verdict) -> f64 {
        self.outcomes[&format!("{v:?}")].frequency
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("outcome,count,frequency,wilson_low,wilson_high\n");
        for (name, f) in &self.outcomes {
            out += &format!("{name},{},{},{},{}\n", f.count, f.frequency, f.wilson_low, f.wilson_high);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 0 of 10 and 5 of 10, against published Wilson intervals
        let (lo, hi) = wilson(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.2775).abs() < 1e-4);
        let (lo, hi) = wilson(5, 10);
        assert!((lo - 0.2366).abs() < 1e-4 && (hi - 0.7634).abs() < 1e-4);
    }

    #[test]
    fn outcomes_cover_every_verdict() {
        let counts = BTreeMap::from([(Verdict::Alternating, 3), (Verdict::Symmetric, 7)]);
        let o = ExperimentReport::outcomes_from(&counts, 10);
        assert_eq!(o.len(), 5);
        assert_eq!(o.values().map(|f| f.count).sum::<u64>(), 10);
        assert!(o.values().all(|f| (0.0..=1.0).contains(&f.frequency)));
    }
}
