//! Seeded randomized law checking.
//!
//! Every suite is a list of laws. A law is run for a number of trials; trial
//! `t` of law `l` draws from [`trial_rng`] with stream `l << 32 | t`, so
//! reports are identical whatever the number of worker threads.
//!
//! Implications report trials whose hypothesis failed as vacuous, and each
//! implication suite also constructs inputs that satisfy the hypothesis.

mod conditionals;
mod enrichment;
mod inequalities;
mod structure;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::discrete::{FinRel, PartialFn};
use crate::error::{Error, Result};
use crate::finstoch::SubKernel;
use crate::inference::Conditionals;
use crate::morphism::{Backend, Morphism, Tolerance};
use crate::order::conditional_leq;
use crate::random::trial_rng;

pub use enrichment::{check_balanced, BalancedOutcome};
pub use inequalities::{
    cauchy_schwarz_numeric, check_cancellative, check_cauchy_schwarz, check_means,
    check_validity_increase, is_zero_scalar, is_zero_scalar_sampled, means_numeric, validity,
    InequalityCheck, ValidityReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Axioms,
    Balanced,
    Enrichment,
    CauchySchwarz,
    Means,
    Validity,
    Cancellative,
    RelAppendix,
    Conditionals,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Axioms,
        Suite::Balanced,
        Suite::Enrichment,
        Suite::CauchySchwarz,
        Suite::Means,
        Suite::Validity,
        Suite::Cancellative,
        Suite::RelAppendix,
        Suite::Conditionals,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Balanced => "balanced",
            Suite::Enrichment => "enrichment",
            Suite::CauchySchwarz => "cauchy-schwarz",
            Suite::Means => "means",
            Suite::Validity => "validity",
            Suite::Cancellative => "cancellative",
            Suite::RelAppendix => "rel-appendix",
            Suite::Conditionals => "conditionals",
        }
    }

    /// Whether the suite can run in `backend` at all.
    pub fn supports(self, backend: Backend) -> bool {
        self != Suite::RelAppendix || backend == Backend::Rel
    }

    /// Suites selected by `all`. Relations are not balanced, so the balanced
    /// suite only runs there when asked for by name.
    pub fn default_for(backend: Backend) -> Vec<Suite> {
        Suite::ALL
            .into_iter()
            .filter(|s| s.supports(backend))
            .filter(|&s| !(s == Suite::Balanced && backend == Backend::Rel))
            .collect()
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite `{s}`")))
    }
}

impl Serialize for Suite {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteConfig {
    /// Trials per law; fixed regression cases run once.
    pub trials: usize,
    pub seed: u64,
    /// Largest object cardinality drawn.
    pub max_card: usize,
    pub tol: Tolerance,
    /// Worker threads; `1` runs trials in order on the calling thread.
    pub jobs: usize,
}

impl SuiteConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        SuiteConfig {
            trials,
            seed,
            ..SuiteConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.max_card == 0 {
            return Err(Error::Config("max cardinality must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            trials: 200,
            seed: 0,
            max_card: 4,
            tol: Tolerance::DEFAULT,
            jobs: 1,
        }
    }
}

/// Evidence for one failing trial.
#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub law: String,
    pub trial: usize,
    pub inputs: serde_json::Value,
    pub lhs: serde_json::Value,
    pub rhs: serde_json::Value,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawSummary {
    pub law: String,
    pub trials: usize,
    pub vacuous: usize,
    pub failures: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub suite: Suite,
    pub backend: Backend,
    pub seed: u64,
    pub trials: usize,
    pub max_card: usize,
    /// Largest residual over passing trials.
    pub max_residual: f64,
    pub vacuous: usize,
    pub laws: Vec<LawSummary>,
    pub failures: Vec<Failure>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Result of a single trial.
#[derive(Clone, Debug)]
pub enum Outcome {
    Pass { residual: f64 },
    /// The hypothesis of an implication did not hold.
    Vacuous,
    Fail(Box<FailureDetail>),
}

#[derive(Clone, Debug)]
pub struct FailureDetail {
    pub inputs: serde_json::Value,
    pub lhs: serde_json::Value,
    pub rhs: serde_json::Value,
    pub residual: f64,
    pub message: Option<String>,
}

impl Outcome {
    pub fn pass(residual: f64) -> Self {
        Outcome::Pass { residual }
    }

    pub fn fail(
        inputs: serde_json::Value,
        lhs: serde_json::Value,
        rhs: serde_json::Value,
        residual: f64,
        message: impl Into<Option<String>>,
    ) -> Self {
        Outcome::Fail(Box::new(FailureDetail {
            inputs,
            lhs,
            rhs,
            residual,
            message: message.into(),
        }))
    }

    fn and(self, other: Outcome) -> Outcome {
        match (self, other) {
            (f @ Outcome::Fail(_), _) | (_, f @ Outcome::Fail(_)) => f,
            (Outcome::Vacuous, _) | (_, Outcome::Vacuous) => Outcome::Vacuous,
            (Outcome::Pass { residual: a }, Outcome::Pass { residual: b }) => Outcome::pass(a.max(b)),
        }
    }
}

type Check = Box<dyn Fn(&mut ChaCha8Rng) -> Result<Outcome> + Send + Sync>;

pub struct Law {
    pub name: &'static str,
    fixed: bool,
    check: Check,
}

impl Law {
    pub fn random(
        name: &'static str,
        check: impl Fn(&mut ChaCha8Rng) -> Result<Outcome> + Send + Sync + 'static,
    ) -> Self {
        Law {
            name,
            fixed: false,
            check: Box::new(check),
        }
    }

    /// A regression case; runs once.
    pub fn fixed(name: &'static str, check: impl Fn() -> Result<Outcome> + Send + Sync + 'static) -> Self {
        Law {
            name,
            fixed: true,
            check: Box::new(move |_| check()),
        }
    }
}

/// Runs `laws` and aggregates the report.
pub fn run_laws(suite: Suite, backend: Backend, laws: &[Law], cfg: &SuiteConfig) -> LawReport {
    let mut report = LawReport {
        suite,
        backend,
        seed: cfg.seed,
        trials: cfg.trials,
        max_card: cfg.max_card,
        max_residual: 0.0,
        vacuous: 0,
        laws: Vec::with_capacity(laws.len()),
        failures: Vec::new(),
    };
    for (index, law) in laws.iter().enumerate() {
        let trials = if law.fixed { 1 } else { cfg.trials };
        let run = |t: usize| {
            let mut rng = trial_rng(cfg.seed, (index as u64) << 32 | t as u64);
            (law.check)(&mut rng).unwrap_or_else(|e| {
                Outcome::fail(
                    serde_json::Value::Null,
                    serde_json::Value::Null,
                    serde_json::Value::Null,
                    f64::INFINITY,
                    Some(e.to_string()),
                )
            })
        };
        let outcomes: Vec<Outcome> = if cfg.jobs > 1 {
            (0..trials).into_par_iter().map(run).collect()
        } else {
            (0..trials).map(run).collect()
        };
        let mut summary = LawSummary {
            law: law.name.to_string(),
            trials,
            vacuous: 0,
            failures: 0,
            max_residual: 0.0,
        };
        for (trial, outcome) in outcomes.into_iter().enumerate() {
            match outcome {
                Outcome::Pass { residual } => {
                    summary.max_residual = summary.max_residual.max(residual);
                }
                Outcome::Vacuous => summary.vacuous += 1,
                Outcome::Fail(d) => {
                    summary.failures += 1;
                    report.failures.push(Failure {
                        law: law.name.to_string(),
                        trial,
                        inputs: d.inputs,
                        lhs: d.lhs,
                        rhs: d.rhs,
                        residual: d.residual,
                        message: d.message,
                    });
                }
            }
        }
        report.max_residual = report.max_residual.max(summary.max_residual);
        report.vacuous += summary.vacuous;
        report.laws.push(summary);
    }
    report
}

/// Backend hooks used by the suites.
pub trait LawBackend: Conditionals {
    /// Kernel view, for numeric cross-checks.
    fn as_kernel(&self) -> Option<&SubKernel> {
        None
    }

    /// A random scalar `I → I`, with the zero scalar among the candidates.
    fn random_scalar(rng: &mut ChaCha8Rng) -> Self;

    /// A random scalar that is not zero.
    fn random_nonzero_scalar(rng: &mut ChaCha8Rng) -> Self;

    /// A random pair for cross-checking the decider against brute force.
    fn random_search_pair(dom: usize, cod: usize, rng: &mut ChaCha8Rng) -> (Self, Self);
}

impl LawBackend for SubKernel {
    fn as_kernel(&self) -> Option<&SubKernel> {
        Some(self)
    }

    fn random_scalar(rng: &mut ChaCha8Rng) -> Self {
        let s = match rng.gen_range(0..6) {
            0 => 0.0,
            1 => 0.1,
            2 => 0.5,
            3 => 0.9,
            4 => 1.0,
            _ => rng.gen(),
        };
        SubKernel::from_data_unchecked(1, 1, vec![s])
    }

    fn random_nonzero_scalar(rng: &mut ChaCha8Rng) -> Self {
        let s = [0.1, 0.5, 0.9][rng.gen_range(0..3)];
        SubKernel::from_data_unchecked(1, 1, vec![s])
    }

    /// Entries on the `1/16` lattice, so a `1/64` witness grid is within
    /// `1/128` of every ratio and violations exceed `1/16`.
    fn random_search_pair(dom: usize, cod: usize, rng: &mut ChaCha8Rng) -> (Self, Self) {
        use crate::random::random_lattice_kernel;
        let g = random_lattice_kernel(dom, cod, 16, rng);
        let f = if rng.gen_bool(0.5) {
            let data = g
                .entries()
                .iter()
                .map(|&v| (v * 16.0 * rng.gen_range(0..=4) as f64 / 4.0).floor() / 16.0)
                .collect();
            SubKernel::from_data_unchecked(dom, cod, data)
        } else {
            random_lattice_kernel(dom, cod, 16, rng)
        };
        (f, g)
    }
}

impl LawBackend for PartialFn {
    fn random_scalar(rng: &mut ChaCha8Rng) -> Self {
        PartialFn::new(1, vec![rng.gen_bool(0.5).then_some(0)]).expect("scalar")
    }

    fn random_nonzero_scalar(_rng: &mut ChaCha8Rng) -> Self {
        PartialFn::identity(1)
    }

    fn random_search_pair(dom: usize, cod: usize, rng: &mut ChaCha8Rng) -> (Self, Self) {
        use crate::random::Random;
        let g = PartialFn::random(dom, cod, rng);
        let f = if rng.gen_bool(0.5) {
            let table = g.table().iter().map(|&y| y.filter(|_| rng.gen_bool(0.5))).collect();
            PartialFn::new(cod, table).expect("in range")
        } else {
            PartialFn::random(dom, cod, rng)
        };
        (f, g)
    }
}

impl LawBackend for FinRel {
    fn random_scalar(rng: &mut ChaCha8Rng) -> Self {
        FinRel::new(1, 1, vec![rng.gen_bool(0.5)]).expect("scalar")
    }

    fn random_nonzero_scalar(_rng: &mut ChaCha8Rng) -> Self {
        FinRel::identity(1)
    }

    fn random_search_pair(dom: usize, cod: usize, rng: &mut ChaCha8Rng) -> (Self, Self) {
        use crate::random::Random;
        let g = FinRel::random(dom, cod, rng);
        let f = if rng.gen_bool(0.5) {
            g.clone().intersect_random(rng)
        } else {
            FinRel::random(dom, cod, rng)
        };
        (f, g)
    }
}

impl FinRel {
    fn intersect_random(self, rng: &mut ChaCha8Rng) -> FinRel {
        let bits = self.bits().iter().map(|&b| b && rng.gen_bool(0.5)).collect();
        FinRel::new(self.dom(), self.cod(), bits).expect("same shape")
    }
}

/// Inputs for failure reports.
pub(crate) fn inputs<M: Morphism>(named: &[(&str, &M)]) -> serde_json::Value {
    serde_json::Value::Object(
        named
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_json()))
            .collect(),
    )
}

/// Equality up to `tol`.
pub(crate) fn expect_eq<M: Morphism>(
    named: &[(&str, &M)],
    lhs: &M,
    rhs: &M,
    tol: Tolerance,
) -> Result<Outcome> {
    let residual = lhs.residual(rhs)?;
    Ok(if residual <= tol.value() {
        Outcome::pass(residual)
    } else {
        Outcome::fail(inputs(named), lhs.to_json(), rhs.to_json(), residual, None)
    })
}

/// `lhs ⊑ rhs`.
pub(crate) fn expect_leq<M: LawBackend>(
    named: &[(&str, &M)],
    lhs: &M,
    rhs: &M,
    tol: Tolerance,
) -> Result<Outcome> {
    let v = conditional_leq(lhs, rhs, tol)?;
    Ok(if v.holds {
        Outcome::pass(v.residual)
    } else {
        Outcome::fail(inputs(named), lhs.to_json(), rhs.to_json(), v.residual, Some("not below".into()))
    })
}

pub(crate) fn expect(condition: bool, message: &str, named: &[(&str, &impl Morphism)]) -> Outcome {
    if condition {
        Outcome::pass(0.0)
    } else {
        Outcome::fail(
            inputs(named),
            serde_json::Value::Null,
            serde_json::Value::Null,
            f64::INFINITY,
            Some(message.to_string()),
        )
    }
}

pub(crate) fn card(rng: &mut ChaCha8Rng, max: usize) -> usize {
    rng.gen_range(1..=max.max(1))
}

fn laws_for<M: LawBackend>(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<Law>> {
    if !suite.supports(M::BACKEND) {
        return Err(Error::Unsupported {
            what: "the rel-appendix suite",
            backend: M::BACKEND,
        });
    }
    Ok(match suite {
        Suite::Axioms => structure::axioms::<M>(cfg),
        Suite::RelAppendix => structure::rel_appendix(cfg),
        Suite::Balanced => enrichment::balanced::<M>(cfg),
        Suite::Enrichment => enrichment::enrichment::<M>(cfg),
        Suite::CauchySchwarz => inequalities::cauchy_schwarz::<M>(cfg),
        Suite::Means => inequalities::means::<M>(cfg),
        Suite::Validity => inequalities::validity_suite::<M>(cfg),
        Suite::Cancellative => inequalities::cancellative::<M>(cfg),
        Suite::Conditionals => conditionals::conditionals::<M>(cfg),
    })
}

/// Runs one suite in one backend.
pub fn run_suite(suite: Suite, backend: Backend, cfg: &SuiteConfig) -> Result<LawReport> {
    cfg.validate()?;
    let laws = match backend {
        Backend::FinStoch => laws_for::<SubKernel>(suite, cfg)?,
        Backend::Par => laws_for::<PartialFn>(suite, cfg)?,
        Backend::Rel => laws_for::<FinRel>(suite, cfg)?,
    };
    Ok(run_laws(suite, backend, &laws, cfg))
}

pub fn run_axiom_suite(backend: Backend, max_card: usize, trials: usize, seed: u64) -> Result<LawReport> {
    run_suite(
        Suite::Axioms,
        backend,
        &SuiteConfig {
            max_card,
            ..SuiteConfig::new(trials, seed)
        },
    )
}

pub fn run_balanced_suite(backend: Backend, cfg: &SuiteConfig) -> Result<LawReport> {
    run_suite(Suite::Balanced, backend, cfg)
}

pub fn run_enrichment_suite(backend: Backend, trials: usize, seed: u64) -> Result<LawReport> {
    run_suite(Suite::Enrichment, backend, &SuiteConfig::new(trials, seed))
}
