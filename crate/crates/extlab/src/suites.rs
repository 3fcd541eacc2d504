//! Named suites: how cases are sampled for each statement, and how a run becomes a report.

use std::sync::Arc;
use std::time::Instant;

use extlab_core::homology::DEFAULT_BUDGET;
use extlab_core::FiniteAlgebra;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cases::{error_outcome, evaluate, CaseParams, CaseSpec};
use crate::error::{HarnessError, Result};
use crate::report::{CaseReport, Report, Summary, Timing, Verdict, Witness, REPORT_FORMAT};
use crate::sample::{case_rng, random_module_from, random_poly_module, Flags, SampleParams};
use crate::serial::{AlgebraSpec, ModuleSpec, PolyModuleSpec};
use crate::stock::STOCK_RINGS;

pub const SUITES: [&str; 10] = [
    "trivial-ext-tor",
    "tor-splitting",
    "gulliksen",
    "ext-rigidity",
    "env-nonvanishing",
    "auslander-reiten",
    "product-ext",
    "base-change-ext",
    "specialization",
    "ext-gap-scan",
];

/// Suites whose statements are about degrees `>= 3` over `R(k)`.
const HIGH_DEGREE_SUITES: [&str; 4] = ["trivial-ext-tor", "ext-rigidity", "env-nonvanishing", "auslander-reiten"];

pub const DEFAULT_BOUND: usize = 10;
pub const DEFAULT_WINDOW: usize = 3;
pub const DEFAULT_TRIALS: usize = 50;

/// Extension degrees (relative to the base field) tried by `base-change-ext`.
pub const BASE_CHANGE_FACTORS: [u32; 2] = [2, 3];

fn default_trials() -> usize {
    DEFAULT_TRIALS
}
fn default_bound() -> usize {
    DEFAULT_BOUND
}
fn default_window() -> usize {
    DEFAULT_WINDOW
}
fn default_budget() -> usize {
    DEFAULT_BUDGET
}

/// Configuration of one suite run. `rings` names base rings `R`; suites about trivial
/// extensions work over `R(k)`. An empty list means every stock ring (`F5_y2` alone for
/// `specialization`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub suite: String,
    #[serde(default)]
    pub rings: Vec<String>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_bound")]
    pub bound: usize,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: usize,
    /// Forces `specialization` to a single `alpha` (integer encoding).
    #[serde(default)]
    pub alpha: Option<u32>,
    #[serde(default)]
    pub sample: SampleParams,
}

impl SuiteConfig {
    pub fn new(suite: &str) -> Self {
        SuiteConfig {
            suite: suite.to_string(),
            rings: Vec::new(),
            trials: DEFAULT_TRIALS,
            bound: DEFAULT_BOUND,
            window: DEFAULT_WINDOW,
            seed: 0,
            budget: DEFAULT_BUDGET,
            alpha: None,
            sample: SampleParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !SUITES.contains(&self.suite.as_str()) {
            return Err(HarnessError::UnknownSuite(self.suite.clone()));
        }
        if self.trials == 0 {
            return Err(HarnessError::Validation("trials must be at least 1".into()));
        }
        if HIGH_DEGREE_SUITES.contains(&self.suite.as_str()) && self.bound < 4 {
            return Err(HarnessError::Validation(format!("suite `{}` needs bound >= 4", self.suite)));
        }
        if self.sample.max_generators == 0 || !(0.0..1.0).contains(&self.sample.zero_probability) {
            return Err(HarnessError::Validation("sampling needs max_generators >= 1 and zero_probability in [0, 1)".into()));
        }
        Ok(())
    }

    pub fn effective_rings(&self) -> Vec<String> {
        if !self.rings.is_empty() {
            self.rings.clone()
        } else if self.suite == "specialization" {
            vec!["F5_y2".into()]
        } else {
            STOCK_RINGS.iter().map(|s| s.to_string()).collect()
        }
    }

    pub fn params(&self) -> CaseParams {
        CaseParams { bound: self.bound, window: self.window, budget: self.budget }
    }

    fn cases_per_ring(&self) -> usize {
        if self.suite == "env-nonvanishing" {
            1
        } else {
            self.trials
        }
    }
}

/// Samples case `trial` of `config.suite` over the base ring `ring`.
pub fn generate_case(config: &SuiteConfig, ring: &Arc<FiniteAlgebra>, trial: usize, rng: &mut ChaCha8Rng) -> Result<CaseSpec> {
    let sp = &config.sample;
    let mut sample = |alg: &Arc<FiniteAlgebra>, flags: Flags| -> Result<ModuleSpec> {
        Ok(ModuleSpec::of(&random_module_from(alg, rng, sp, flags)?))
    };
    let extension = || -> Result<Arc<FiniteAlgebra>> { Ok(Arc::new(ring.residue_trivial_extension()?)) };
    Ok(match config.suite.as_str() {
        "trivial-ext-tor" => {
            let a = extension()?;
            let (m, n) = (sample(&a, Flags::NON_FREE)?, sample(&a, Flags::NON_FREE)?);
            CaseSpec::TrivialExtTor { algebra: AlgebraSpec::of(&a), m, n }
        }
        "tor-splitting" => {
            let (m, n) = (sample(ring, Flags::NONZERO)?, sample(ring, Flags::NONZERO)?);
            CaseSpec::TorSplitting { base: AlgebraSpec::of(ring), m, n }
        }
        "gulliksen" if trial == 0 => {
            ring.residue_degree()?;
            CaseSpec::GulliksenResidue { base: AlgebraSpec::of(ring) }
        }
        "gulliksen" => {
            let (m, n) = (sample(ring, Flags::NONZERO)?, sample(ring, Flags::NONZERO)?);
            CaseSpec::GulliksenPair { base: AlgebraSpec::of(ring), m, n }
        }
        "ext-rigidity" => {
            let a = extension()?;
            let (m, n) = (sample(&a, Flags::NON_FREE)?, sample(&a, Flags::NON_INJECTIVE)?);
            CaseSpec::ExtRigidity { algebra: AlgebraSpec::of(&a), m, n }
        }
        "env-nonvanishing" => CaseSpec::EnvNonvanishing { algebra: AlgebraSpec::of(&*extension()?) },
        "auslander-reiten" => {
            let a = extension()?;
            CaseSpec::AuslanderReiten { m: sample(&a, Flags::NONZERO)?, algebra: AlgebraSpec::of(&a) }
        }
        "product-ext" => {
            let a = extension()?;
            let (m_left, n_left) = (sample(ring, Flags::NONZERO)?, sample(ring, Flags::NONZERO)?);
            let (m_right, n_right) = (sample(&a, Flags::NONZERO)?, sample(&a, Flags::NONZERO)?);
            CaseSpec::ProductExt { left: AlgebraSpec::of(ring), right: AlgebraSpec::of(&a), m_left, n_left, m_right, n_right }
        }
        "base-change-ext" => {
            let a = extension()?;
            let (m, n) = (sample(&a, Flags::NONZERO)?, sample(&a, Flags::NONZERO)?);
            CaseSpec::BaseChangeExt { algebra: AlgebraSpec::of(&a), m, n, factors: BASE_CHANGE_FACTORS.to_vec() }
        }
        "specialization" => {
            ring.residue_degree()?;
            let m = PolyModuleSpec::of(&random_poly_module(ring, rng, sp)?);
            let n = PolyModuleSpec::of(&random_poly_module(ring, rng, sp)?);
            let alphas = match config.alpha {
                Some(a) => vec![a],
                None => (0..ring.field().order()).collect(),
            };
            CaseSpec::Specialization { algebra: AlgebraSpec::of(ring), m, n, alphas }
        }
        "ext-gap-scan" => {
            let (m, n) = (sample(ring, Flags::NONZERO)?, sample(ring, Flags::NONZERO)?);
            CaseSpec::GapScan { algebra: AlgebraSpec::of(ring), m, n }
        }
        other => return Err(HarnessError::UnknownSuite(other.to_string())),
    })
}

/// Runs a suite. `resolve` maps ring names to algebras. Cases run in parallel; case `i` draws
/// its randomness from stream `i` of the seed, so the report does not depend on scheduling.
pub fn run_suite(config: &SuiteConfig, resolve: &dyn Fn(&str) -> Result<Arc<FiniteAlgebra>>) -> Result<Report> {
    config.validate()?;
    let started = Instant::now();
    let names = config.effective_rings();
    let rings = names.iter().map(|n| resolve(n)).collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..rings.len()).flat_map(|r| (0..config.cases_per_ring()).map(move |t| (r, t))).collect();
    let params = config.params();
    let results = jobs
        .par_iter()
        .enumerate()
        .map(|(index, &(r, trial))| -> Result<(CaseReport, u64)> {
            let start = Instant::now();
            let mut rng = case_rng(config.seed, index as u64);
            let (outcome, case) = match generate_case(config, &rings[r], trial, &mut rng) {
                Ok(case) => (evaluate(&case, &params), Some(case)),
                Err(e @ HarnessError::SamplingExhausted { .. }) => (error_outcome(e), None),
                Err(e) => return Err(e),
            };
            let witness = match (outcome.verdict, case) {
                (Verdict::Fail, Some(case)) => {
                    Some(Witness { format: REPORT_FORMAT, suite: config.suite.clone(), params, case })
                }
                _ => None,
            };
            let report = CaseReport {
                index,
                ring: names[r].clone(),
                verdict: outcome.verdict,
                reason: outcome.reason,
                detail: outcome.detail,
                witness,
            };
            Ok((report, start.elapsed().as_millis() as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    let (cases, case_ms): (Vec<CaseReport>, Vec<u64>) = results.into_iter().unzip();
    let summary = Summary::of(&cases);
    let mut config = config.clone();
    config.rings = names;
    Ok(Report {
        format: REPORT_FORMAT,
        suite: config.suite.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        verdict: summary.verdict(),
        summary,
        config,
        cases,
        timing: Timing { total_ms: started.elapsed().as_millis() as u64, case_ms },
    })
}

/// Recomputes a witnessed case.
pub fn replay(witness: &Witness) -> crate::cases::Outcome {
    evaluate(&witness.case, &witness.params)
}
