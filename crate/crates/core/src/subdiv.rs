//! Bit-by-bit subdivision search driver.
//!
//! The driver fixes index qubits one at a time, most significant first. At
//! depth `k` it prepares the sublist sharing the already-determined prefix
//! plus a candidate bit `b`, queries the oracle once, and decides membership
//! by running the differentiator chain on the flag-register model state.
//! Under the promise that the target exists, an absent verdict at `b = 0`
//! fixes the bit to 1 without a second query, which is what keeps the oracle
//! count at exactly `n`.
//!
//! Chain restarts triggered by stochastic `M1` firings are tallied
//! separately from oracle queries; the search never hides them.

use std::collections::HashMap;
use std::sync::Arc;

use rand::Rng;

use crate::differentiator::{
    make_plan, run_chain, second_register_model, ChainMode, ChainOutcome, Classification,
    DifferentiatorPlan,
};
use crate::error::{Error, Result};
use crate::sigfmt::json_f64_array;
use crate::statevec::{OracleSpec, QuantumState};

/// Which sublist size parameterizes the differentiator matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeMode {
    /// `M` is the actual sublist size at the current depth; a fresh plan per
    /// depth. The self-consistent reading.
    Exact,
    /// `M = 2^n` at every depth, reproducing the worked example's
    /// arithmetic.
    Paper,
}

impl SizeMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SizeMode::Exact => "exact",
            SizeMode::Paper => "paper",
        }
    }
}

/// How an absent verdict at `b = 0` is turned into a bit choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchPolicy {
    /// Fix the bit to 1 without a second oracle query (valid under the
    /// promise that the target exists). Query count is exactly `n`.
    InferComplement,
    /// Test `b = 1` explicitly; raises target-not-found if both branches
    /// test absent.
    TestBoth,
}

/// Recovery scheme for stochastic chains in which `M1` fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestartPolicy {
    /// Re-run the chain until a clean outcome, up to a budget.
    RetryUntilClean { max_restarts: u32 },
    /// Run a fixed odd number of chains and take the majority readout,
    /// clean or not.
    MajorityVote { trials: u32 },
}

/// Full parameterization of one search run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub n: usize,
    pub mode: ChainMode,
    pub size_mode: SizeMode,
    pub policy: BranchPolicy,
    pub restart_policy: RestartPolicy,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(n: usize) -> Self {
        SearchConfig {
            n,
            mode: ChainMode::Forced,
            size_mode: SizeMode::Exact,
            policy: BranchPolicy::InferComplement,
            restart_policy: RestartPolicy::RetryUntilClean { max_restarts: 1000 },
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.n > OracleSpec::MAX_INDEX_QUBITS {
            return Err(Error::InvalidConfig(format!(
                "n = {} outside [1, {}]",
                self.n,
                OracleSpec::MAX_INDEX_QUBITS
            )));
        }
        match self.restart_policy {
            RestartPolicy::RetryUntilClean { max_restarts } if max_restarts < 1 => Err(
                Error::InvalidConfig("max_restarts must be at least 1".into()),
            ),
            RestartPolicy::MajorityVote { trials } if trials < 1 || trials % 2 == 0 => Err(
                Error::InvalidConfig("majority-vote trials must be odd and >= 1".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Per-depth cache of differentiator plans, keyed by sublist size.
#[derive(Debug, Default)]
pub struct PlanCache {
    plans: HashMap<u64, Arc<DifferentiatorPlan>>,
}

impl PlanCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn plan_for(&mut self, sublist_size: u64) -> Result<Arc<DifferentiatorPlan>> {
        if let Some(plan) = self.plans.get(&sublist_size) {
            return Ok(Arc::clone(plan));
        }
        let plan = Arc::new(make_plan(sublist_size, None)?);
        self.plans.insert(sublist_size, Arc::clone(&plan));
        Ok(plan)
    }
}

/// Everything recorded while fixing one bit.
#[derive(Debug, Clone, PartialEq)]
pub struct BitDecision {
    pub k: usize,
    pub tested_b: u8,
    pub membership: Classification,
    pub queries_used: u32,
    pub chain_outcomes: Vec<ChainOutcome>,
    /// Chain executions at this depth; a clean first attempt counts as 1.
    pub restarts: u32,
    pub chosen_bit: u8,
}

/// Record of one full subdivision search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchTrace {
    pub n: usize,
    pub decisions: Vec<BitDecision>,
    pub total_queries: u64,
    /// Total chain executions across all membership tests.
    pub total_chain_restarts: u64,
    pub result: u64,
}

impl SearchTrace {
    pub fn to_json(&self) -> String {
        let decisions: Vec<String> = self
            .decisions
            .iter()
            .map(|d| {
                let probs: Vec<f64> = d
                    .chain_outcomes
                    .iter()
                    .map(|o| o.chain_probability)
                    .collect();
                format!(
                    "{{\"k\":{},\"tested_b\":{},\"membership\":\"{}\",\"queries\":{},\"restarts\":{},\"chosen_bit\":{},\"chain_probabilities\":{}}}",
                    d.k,
                    d.tested_b,
                    d.membership.as_str(),
                    d.queries_used,
                    d.restarts,
                    d.chosen_bit,
                    json_f64_array(&probs),
                )
            })
            .collect();
        format!(
            "{{\"n\":{},\"result\":{},\"total_queries\":{},\"total_chain_restarts\":{},\"decisions\":[{}]}}",
            self.n,
            self.result,
            self.total_queries,
            self.total_chain_restarts,
            decisions.join(","),
        )
    }
}

/// Result of one membership test: the verdict, every chain outcome produced
/// while reaching it, the oracle queries spent (always 1), and the number of
/// chain executions.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipTest {
    pub membership: Classification,
    pub chain_outcomes: Vec<ChainOutcome>,
    pub queries: u32,
    pub restarts: u32,
}

/// Decide whether the sublist `|prefix, b, * .. *⟩` contains the target.
///
/// Prepares the prefix state, spreads the free suffix with the partial
/// Hadamard, queries the oracle once, extracts the two-dimensional flag
/// model, and classifies it with the differentiator chain under the
/// configured policies. At the deepest level of exact mode the sublist has a
/// single item and the flag amplitude is exactly 0 or 1, so membership is
/// read directly and no chain runs.
pub fn test_membership<R: Rng + ?Sized>(
    prefix: &[u8],
    b: u8,
    oracle: &mut OracleSpec,
    config: &SearchConfig,
    cache: &mut PlanCache,
    rng: &mut R,
) -> Result<MembershipTest> {
    let n = config.n;
    let k = prefix.len();
    if k >= n {
        return Err(Error::InvalidPrefix { len: k + 1, n });
    }

    let mut bits = prefix.to_vec();
    bits.push(b);
    let joint = QuantumState::prepare_prefix_state(&bits, n)?
        .apply_partial_hadamard(k + 1)?
        .append_zero_qubit()?
        .apply_oracle(oracle)?;
    let flag_one = joint.qubit_probability(n, 1)?;

    let sublist_size = 1u64 << (n - k - 1);
    // flag_one is exactly 0 when the target is outside the sublist and
    // 1/sublist_size otherwise; halfway is a safe threshold.
    let target_in_sublist = flag_one * 2.0 * sublist_size as f64 > 1.0;

    if config.size_mode == SizeMode::Exact && sublist_size == 1 {
        let membership = if target_in_sublist {
            Classification::Present
        } else {
            Classification::Absent
        };
        return Ok(MembershipTest {
            membership,
            chain_outcomes: Vec::new(),
            queries: 1,
            restarts: 0,
        });
    }

    let model_size = match config.size_mode {
        SizeMode::Exact => sublist_size,
        SizeMode::Paper => 1u64 << n,
    };
    let plan = cache.plan_for(model_size)?;
    let input = second_register_model(model_size, target_in_sublist)?;

    let (membership, restarts, chain_outcomes) = run_restart_policy(
        || run_chain(&input, &plan, config.mode, rng),
        &config.restart_policy,
    )?;
    Ok(MembershipTest {
        membership,
        chain_outcomes,
        queries: 1,
        restarts,
    })
}

/// Drive repeated chain attempts according to the restart policy.
///
/// Returns the membership verdict, the number of chain executions (a clean
/// first attempt counts as 1), and every recorded outcome. An annihilated
/// branch counts as a failed attempt rather than an error.
pub fn run_restart_policy<F>(
    mut attempt: F,
    policy: &RestartPolicy,
) -> Result<(Classification, u32, Vec<ChainOutcome>)>
where
    F: FnMut() -> Result<ChainOutcome>,
{
    match *policy {
        RestartPolicy::RetryUntilClean { max_restarts } => {
            let mut outcomes = Vec::new();
            for executed in 1..=max_restarts {
                match attempt() {
                    Ok(outcome) => {
                        let clean = outcome.clean;
                        let readout = outcome.readout;
                        outcomes.push(outcome);
                        if clean {
                            return Ok((readout, executed, outcomes));
                        }
                    }
                    Err(Error::ZeroProbabilityBranch) => {}
                    Err(e) => return Err(e),
                }
            }
            Err(Error::RestartBudgetExhausted { max_restarts })
        }
        RestartPolicy::MajorityVote { trials } => {
            let mut outcomes = Vec::with_capacity(trials as usize);
            let mut present_votes = 0u32;
            for _ in 0..trials {
                match attempt() {
                    Ok(outcome) => {
                        if outcome.readout == Classification::Present {
                            present_votes += 1;
                        }
                        outcomes.push(outcome);
                    }
                    Err(Error::ZeroProbabilityBranch) => {}
                    Err(e) => return Err(e),
                }
            }
            if outcomes.is_empty() {
                return Err(Error::ZeroProbabilityBranch);
            }
            let membership = if present_votes > trials / 2 {
                Classification::Present
            } else {
                Classification::Absent
            };
            Ok((membership, trials, outcomes))
        }
    }
}

/// Run the full subdivision search.
pub fn search<R: Rng + ?Sized>(
    oracle: &mut OracleSpec,
    config: &SearchConfig,
    rng: &mut R,
) -> Result<SearchTrace> {
    config.validate()?;
    if oracle.n() != config.n {
        return Err(Error::InvalidConfig(format!(
            "oracle has n = {}, config has n = {}",
            oracle.n(),
            config.n
        )));
    }

    let n = config.n;
    let mut cache = PlanCache::new();
    let mut prefix: Vec<u8> = Vec::with_capacity(n);
    let mut decisions: Vec<BitDecision> = Vec::with_capacity(n);

    for k in 0..n {
        let zero = test_membership(&prefix, 0, oracle, config, &mut cache, rng)?;
        let decision = match zero.membership {
            Classification::Present => BitDecision {
                k,
                tested_b: 0,
                membership: Classification::Present,
                queries_used: zero.queries,
                chain_outcomes: zero.chain_outcomes,
                restarts: zero.restarts,
                chosen_bit: 0,
            },
            Classification::Absent => match config.policy {
                BranchPolicy::InferComplement => BitDecision {
                    k,
                    tested_b: 0,
                    membership: Classification::Absent,
                    queries_used: zero.queries,
                    chain_outcomes: zero.chain_outcomes,
                    restarts: zero.restarts,
                    chosen_bit: 1,
                },
                BranchPolicy::TestBoth => {
                    let one = test_membership(&prefix, 1, oracle, config, &mut cache, rng)?;
                    if one.membership == Classification::Absent {
                        return Err(Error::TargetNotFound);
                    }
                    let mut chain_outcomes = zero.chain_outcomes;
                    chain_outcomes.extend(one.chain_outcomes);
                    BitDecision {
                        k,
                        tested_b: 1,
                        membership: Classification::Present,
                        queries_used: zero.queries + one.queries,
                        chain_outcomes,
                        restarts: zero.restarts + one.restarts,
                        chosen_bit: 1,
                    }
                }
            },
        };
        prefix.push(decision.chosen_bit);
        decisions.push(decision);
    }

    let result = prefix
        .iter()
        .fold(0u64, |acc, &bit| (acc << 1) | u64::from(bit));
    let total_queries = decisions.iter().map(|d| u64::from(d.queries_used)).sum();
    let total_chain_restarts = decisions.iter().map(|d| u64::from(d.restarts)).sum();
    Ok(SearchTrace {
        n,
        decisions,
        total_queries,
        total_chain_restarts,
        result,
    })
}
