//! Ensembles, the exact oracle, uniqueness systems and theorem suites.

pub mod ensemble;
pub mod exact;
pub mod suites;
pub mod systems;

use serde::Serialize;

pub use ensemble::{gen, EnsembleClass, EnsembleSpec};
pub use exact::{exact_drazin, exact_pinv, RMatrix};
pub use suites::{run_suite, run_suite_on, Suite};
pub use systems::{solution_family, verify_system, Family, System};

const MAX_MESSAGES: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The sample does not meet the hypothesis of the statement.
    Skip,
}

/// Result of one statement on one sample.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub theorem: String,
    pub status: Status,
    pub residual: f64,
    pub detail: String,
}

impl Outcome {
    pub fn new(theorem: impl Into<String>, ok: bool, residual: f64, detail: impl Into<String>) -> Self {
        Self {
            theorem: theorem.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual,
            detail: detail.into(),
        }
    }

    pub fn skip(theorem: impl Into<String>) -> Self {
        Self {
            theorem: theorem.into(),
            status: Status::Skip,
            residual: 0.0,
            detail: String::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremStats {
    pub theorem: String,
    pub samples: usize,
    pub failures: usize,
    pub skipped: usize,
    pub worst_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub samples: usize,
    pub failures: usize,
    pub worst_residual: f64,
    pub breakdown: Vec<TheoremStats>,
    pub messages: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn theorem(&self, name: &str) -> Option<&TheoremStats> {
        self.breakdown.iter().find(|t| t.theorem == name)
    }

    /// Aggregates per-sample outcomes, listed in sample order, into a report.
    /// The result depends only on that order, not on evaluation order.
    pub fn from_outcomes(suite: impl Into<String>, samples: usize, outcomes: Vec<(usize, Outcome)>) -> Self {
        let mut breakdown: Vec<TheoremStats> = Vec::new();
        let mut messages = Vec::new();
        let mut failures = 0;
        let mut worst = 0.0f64;
        for (i, o) in outcomes {
            let pos = match breakdown.iter().position(|t| t.theorem == o.theorem) {
                Some(p) => p,
                None => {
                    breakdown.push(TheoremStats {
                        theorem: o.theorem.clone(),
                        samples: 0,
                        failures: 0,
                        skipped: 0,
                        worst_residual: 0.0,
                    });
                    breakdown.len() - 1
                }
            };
            let t = &mut breakdown[pos];
            match o.status {
                Status::Skip => t.skipped += 1,
                Status::Pass | Status::Fail => {
                    t.samples += 1;
                    t.worst_residual = t.worst_residual.max(o.residual);
                    worst = worst.max(o.residual);
                }
            }
            if o.status == Status::Fail {
                t.failures += 1;
                failures += 1;
                if messages.len() < MAX_MESSAGES {
                    messages.push(format!("sample {i}: {}: {}", o.theorem, o.detail));
                }
            }
        }
        Self {
            suite: suite.into(),
            samples,
            failures,
            worst_residual: worst,
            breakdown,
            messages,
        }
    }

    /// Combines reports of the same suite over several ensembles.
    pub fn merge(suite: impl Into<String>, parts: Vec<VerificationReport>) -> Self {
        let mut out = Self {
            suite: suite.into(),
            samples: 0,
            failures: 0,
            worst_residual: 0.0,
            breakdown: Vec::new(),
            messages: Vec::new(),
        };
        for p in parts {
            out.samples += p.samples;
            out.failures += p.failures;
            out.worst_residual = out.worst_residual.max(p.worst_residual);
            for t in p.breakdown {
                match out.breakdown.iter_mut().find(|x| x.theorem == t.theorem) {
                    Some(x) => {
                        x.samples += t.samples;
                        x.failures += t.failures;
                        x.skipped += t.skipped;
                        x.worst_residual = x.worst_residual.max(t.worst_residual);
                    }
                    None => out.breakdown.push(t),
                }
            }
            for m in p.messages {
                if out.messages.len() < MAX_MESSAGES {
                    out.messages.push(m);
                }
            }
        }
        out
    }
}
