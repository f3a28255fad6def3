//! Randomized campaigns: draw channels, analyze them and run every check.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::analyze;
use crate::checks::{run_all, CheckBudget, CheckContext, CheckRecord, Status};
use crate::config::AnalysisConfig;
use crate::error::{Error, Result};
use crate::io::ChannelFile;
use crate::random::sub_seed;
use crate::report::{CheckEntry, ConfigSection};
use crate::zoo::{random_channel, random_kinds};

#[derive(Clone, Debug, PartialEq)]
pub struct Campaign {
    pub count: usize,
    pub dims: Vec<usize>,
    pub kinds: Vec<String>,
    pub seed: u64,
}

impl Campaign {
    pub fn check(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidParameter("--count must be at least 1".into()));
        }
        if self.dims.is_empty() || self.kinds.is_empty() {
            return Err(Error::InvalidParameter(
                "need at least one dim and one kind".into(),
            ));
        }
        for &n in &self.dims {
            if n == 0 {
                return Err(Error::InvalidParameter("dims must be at least 1".into()));
            }
            if n > crate::MAX_DIM {
                return Err(Error::TooLarge(n));
            }
        }
        let reg = random_kinds();
        for k in &self.kinds {
            reg.get(k)?;
        }
        Ok(())
    }

    /// Instance `i` cycles through kinds first, then dims.
    pub fn instance(&self, i: usize) -> (String, usize, u64) {
        let k = self.kinds.len();
        (
            self.kinds[i % k].clone(),
            self.dims[(i / k) % self.dims.len()],
            sub_seed(self.seed, i as u64),
        )
    }
}

/// Everything recorded about one fuzzed channel.
#[derive(Clone, Debug)]
pub struct InstanceResult {
    pub index: usize,
    pub kind: String,
    pub dim: usize,
    pub channel_seed: u64,
    pub channel: Option<ChannelFile>,
    pub phi_finite: Option<bool>,
    pub records: Vec<CheckRecord>,
    /// Set when generation or analysis itself failed.
    pub error: Option<String>,
}

impl InstanceResult {
    pub fn failed(&self) -> bool {
        self.error.is_some()
            || self
                .records
                .iter()
                .any(|r| r.outcome.status == Status::Fail)
    }

    pub fn record(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }
}

pub fn run_instance(
    campaign: &Campaign,
    i: usize,
    config: &AnalysisConfig,
    budget: CheckBudget,
) -> InstanceResult {
    let (kind, dim, channel_seed) = campaign.instance(i);
    let mut out = InstanceResult {
        index: i,
        kind,
        dim,
        channel_seed,
        channel: None,
        phi_finite: None,
        records: Vec::new(),
        error: None,
    };
    let phi = match random_channel(&out.kind, dim, channel_seed) {
        Ok(phi) => phi.with_name(format!("{}#{i}", out.kind)),
        Err(e) => {
            out.error = Some(format!("generation: {e}"));
            return out;
        }
    };
    out.channel = Some(ChannelFile::from_map(&phi));
    match analyze(phi, config) {
        Ok((phi, an)) => {
            out.phi_finite = an.states.phi_finite;
            out.records = run_all(&CheckContext {
                phi: &phi,
                analysis: &an,
                config,
                budget,
            });
        }
        Err(e) => out.error = Some(format!("analysis: {e}")),
    }
    out
}

/// Runs every instance, in parallel, returning results in index order.
pub fn run_campaign(
    campaign: &Campaign,
    config: &AnalysisConfig,
    budget: CheckBudget,
) -> Result<Vec<InstanceResult>> {
    campaign.check()?;
    config.check()?;
    Ok((0..campaign.count)
        .into_par_iter()
        .map(|i| run_instance(campaign, i, config, budget))
        .collect())
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StatusCounts {
    pub pass: usize,
    pub fail: usize,
    pub hypothesis_unmet: usize,
    pub not_applicable: usize,
    pub reported: usize,
}

impl StatusCounts {
    fn add(&mut self, s: Status) {
        match s {
            Status::Pass => self.pass += 1,
            Status::Fail => self.fail += 1,
            Status::HypothesisUnmet => self.hypothesis_unmet += 1,
            Status::NotApplicable => self.not_applicable += 1,
            Status::Reported => self.reported += 1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FailureEntry {
    pub index: usize,
    pub kind: String,
    pub dim: usize,
    pub channel_seed: u64,
    pub failing_checks: Vec<&'static str>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzSummary {
    pub count: usize,
    pub dims: Vec<usize>,
    pub kinds: Vec<String>,
    pub seed: u64,
    pub config: ConfigSection,
    pub phi_finite: usize,
    pub not_phi_finite: usize,
    pub failures: usize,
    pub per_check: BTreeMap<&'static str, StatusCounts>,
    pub failing_instances: Vec<FailureEntry>,
}

impl FuzzSummary {
    pub fn new(campaign: &Campaign, config: &AnalysisConfig, results: &[InstanceResult]) -> Self {
        let mut per_check: BTreeMap<&'static str, StatusCounts> = BTreeMap::new();
        for r in results {
            for rec in &r.records {
                per_check
                    .entry(rec.name)
                    .or_default()
                    .add(rec.outcome.status);
            }
        }
        let failing: Vec<FailureEntry> = results
            .iter()
            .filter(|r| r.failed())
            .map(|r| FailureEntry {
                index: r.index,
                kind: r.kind.clone(),
                dim: r.dim,
                channel_seed: r.channel_seed,
                failing_checks: r
                    .records
                    .iter()
                    .filter(|x| x.outcome.status == Status::Fail)
                    .map(|x| x.name)
                    .collect(),
                error: r.error.clone(),
            })
            .collect();
        FuzzSummary {
            count: campaign.count,
            dims: campaign.dims.clone(),
            kinds: campaign.kinds.clone(),
            seed: campaign.seed,
            config: config.into(),
            phi_finite: results
                .iter()
                .filter(|r| r.phi_finite == Some(true))
                .count(),
            not_phi_finite: results
                .iter()
                .filter(|r| r.phi_finite != Some(true))
                .count(),
            failures: failing.len(),
            per_check,
            failing_instances: failing,
        }
    }
}

/// What gets archived for a failing instance: enough to replay it.
#[derive(Clone, Debug, Serialize)]
pub struct ArchivedFailure<'a> {
    pub index: usize,
    pub kind: &'a str,
    pub dim: usize,
    pub channel_seed: u64,
    pub config: ConfigSection,
    pub channel: Option<&'a ChannelFile>,
    pub error: Option<&'a str>,
    pub failing_checks: Vec<CheckEntry>,
}

impl<'a> ArchivedFailure<'a> {
    pub fn new(r: &'a InstanceResult, config: &AnalysisConfig) -> Self {
        ArchivedFailure {
            index: r.index,
            kind: &r.kind,
            dim: r.dim,
            channel_seed: r.channel_seed,
            config: config.into(),
            channel: r.channel.as_ref(),
            error: r.error.as_deref(),
            failing_checks: r
                .records
                .iter()
                .filter(|x| x.outcome.status == Status::Fail)
                .map(CheckEntry::from)
                .collect(),
        }
    }
}
