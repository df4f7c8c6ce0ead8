//! Stage-wise current statistics and the three-mode comparison table.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::Mode;
use crate::stage_estimator::Stage;

/// Streaming mean and variance (Welford), mergeable across charges.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n as f64 / n as f64;
        self.m2 += other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64;
        self.n = n;
    }

    /// Population standard deviation.
    pub fn std_dev(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.m2 / self.n as f64).max(0.0).sqrt()
        }
    }
}

/// Static error and fluctuation of the arc current in one stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageMetrics {
    pub samples: u64,
    /// Mean of `i - i_set`, A.
    pub static_error: f64,
    /// Standard deviation of `i`, A.
    pub std_dev: f64,
}

impl From<&Moments> for StageMetrics {
    fn from(m: &Moments) -> Self {
        Self {
            samples: m.n,
            static_error: m.mean,
            std_dev: m.std_dev(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EndReason {
    /// Refining progress reached the configured end value.
    Finished,
    TimeCap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeMetrics {
    pub mode: Mode,
    pub seed: u64,
    /// Current deviation from setpoint per stage over arc-on samples.
    pub deviation: [Moments; 3],
    /// Simulated time from power-on to the end of the charge, s.
    pub duration: f64,
    /// Integrated active power, kWh.
    pub energy: f64,
    /// Time each stage was entered, s.
    pub stage_entry: [Option<f64>; 3],
    pub end: EndReason,
    /// Phase-cycles with `arc_success` set.
    pub arc_on_samples: u64,
    /// Phase-cycles spent in slow, fast or full lift.
    pub protective_samples: u64,
    pub arc_losses: u64,
}

impl ChargeMetrics {
    pub fn stage(&self, stage: Stage) -> StageMetrics {
        StageMetrics::from(&self.deviation[stage.index()])
    }

    /// Time from power-on until the melt-down stage ended, s.
    pub fn melting_time(&self) -> Option<f64> {
        self.stage_entry[Stage::Oxidation.index()]
    }
}

/// All charges of one mode plus stage statistics pooled over them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mode: Mode,
    pub charges: Vec<ChargeMetrics>,
    pub stages: [StageMetrics; 3],
}

impl MetricsReport {
    pub fn new(mode: Mode, charges: Vec<ChargeMetrics>) -> Self {
        let mut pooled = [Moments::default(); 3];
        for c in &charges {
            for (acc, m) in pooled.iter_mut().zip(&c.deviation) {
                acc.merge(m);
            }
        }
        Self {
            mode,
            charges,
            stages: pooled.map(|m| StageMetrics::from(&m)),
        }
    }

    pub fn stage(&self, stage: Stage) -> StageMetrics {
        self.stages[stage.index()]
    }
}

/// Reports of the three modes over identical seeds and plant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub seed: u64,
    pub reports: Vec<MetricsReport>,
}

/// Table row: label and the value it shows.
type Row<T> = (&'static str, fn(&T) -> f64);

impl Comparison {
    pub fn report(&self, mode: Mode) -> Option<&MetricsReport> {
        self.reports.iter().find(|r| r.mode == mode)
    }

    /// Static error and standard deviation per stage, one column per mode.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "Arc current by melting stage, seed {}", self.seed);
        for r in &self.reports {
            let _ = writeln!(out, "  {} - {}", r.mode.letter(), r.mode.description());
        }
        let _ = writeln!(out);
        let mut header = format!("{:<44}", "evaluation criterion");
        for r in &self.reports {
            let _ = write!(header, "{:>10}", r.mode.letter());
        }
        let _ = writeln!(out, "{header}");
        let rows: [Row<StageMetrics>; 2] = [
            ("Static error of the arc current (A)", |m| m.static_error),
            ("Standard deviation of the arc current (A)", |m| m.std_dev),
        ];
        for (title, value) in rows {
            let _ = writeln!(out, "{title}");
            for stage in Stage::ALL {
                let mut line = format!("{:<44}", format!("  {} stage", stage.name()));
                for r in &self.reports {
                    let _ = write!(line, "{:>10.0}", value(&r.stage(stage)));
                }
                let _ = writeln!(out, "{line}");
            }
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "Charge summary (mean over charges)");
        let summary: [Row<ChargeMetrics>; 3] = [
            ("  melt-down time (min)", |c| {
                c.melting_time().unwrap_or(f64::NAN) / 60.0
            }),
            ("  charge time (min)", |c| c.duration / 60.0),
            ("  energy (kWh)", |c| c.energy),
        ];
        for (title, value) in summary {
            let mut line = format!("{title:<44}");
            for r in &self.reports {
                let mean = r.charges.iter().map(value).sum::<f64>() / r.charges.len().max(1) as f64;
                let _ = write!(line, "{mean:>10.1}");
            }
            let _ = writeln!(out, "{line}");
        }
        out
    }
}
