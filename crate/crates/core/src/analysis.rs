//! Cost models and validation experiments.
//!
//! The subdivision count of `n = lg(2^n)` oracle queries is only half the
//! bill: every membership test needs a clean chain, and a clean chain occurs
//! with probability `1/c^(2v)`. This module quantifies that hidden factor in
//! closed form, checks it against seeded Monte Carlo sampling, compares
//! against the usual baselines, and runs the joint-register experiment that
//! the two-dimensional flag model abstracts away.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::differentiator::{build_d, second_register_model};
use crate::differentiator::{
    build_measurement_pair, chain_success_probability, make_plan, run_chain, svd_2x2, ChainMode,
    DifferentiatorPlan, TwoDimState,
};
use crate::error::{Error, Result};
use crate::sigfmt::sig15;
use crate::statevec::{OracleSpec, QuantumState};
use crate::subdiv::{SearchConfig, SizeMode};

/// Joint-register experiments keep the full `2^(n+1)` state in memory.
pub const JOINT_MODE_MAX_N: usize = 14;

/// Expected number of chain executions until a clean one: `c^(2v)`.
///
/// Equals `1 / chain_success_probability` for both model inputs, since
/// `||D x|| = ||D y|| = 1`.
pub fn expected_restarts(sublist_size: u64, root_power: u32) -> Result<f64> {
    let d = build_d(sublist_size)?;
    let svd = svd_2x2(&d)?;
    let pair = build_measurement_pair(svd.v(), root_power)?;
    Ok(pair.normalizer().powi(2 * root_power as i32))
}

/// Standard expected Grover iteration count, `(pi/4) sqrt(N)`.
pub fn grover_baseline(list_size: u64) -> f64 {
    debug_assert!(list_size >= 2);
    std::f64::consts::FRAC_PI_4 * (list_size as f64).sqrt()
}

/// Estimate the clean-chain probability by running stochastic chains.
///
/// Returns the fraction of clean runs and its standard error
/// `sqrt(p(1-p)/trials)`. Trials are batched; each batch runs on its own
/// child generator seeded from the caller's, so the estimate is
/// deterministic for a fixed seed and independent of worker scheduling.
pub fn monte_carlo_chain<R: Rng + ?Sized>(
    plan: &DifferentiatorPlan,
    input: &TwoDimState,
    trials: u64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1"));
    }
    const BATCH: u64 = 10_000;
    let full_batches = trials / BATCH;
    let remainder = trials % BATCH;
    let mut batches: Vec<(u64, u64)> = (0..full_batches)
        .map(|_| (rng.random::<u64>(), BATCH))
        .collect();
    if remainder > 0 {
        batches.push((rng.random::<u64>(), remainder));
    }

    let clean: u64 = batches
        .into_par_iter()
        .map(|(seed, count)| {
            let mut batch_rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .filter(|_| {
                    // An annihilated branch cannot be a clean all-M0 run.
                    run_chain(input, plan, ChainMode::Stochastic, &mut batch_rng)
                        .map(|o| o.clean)
                        .unwrap_or(false)
                })
                .count() as u64
        })
        .sum();

    let estimate = clean as f64 / trials as f64;
    let standard_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    Ok((estimate, standard_error))
}

/// One row of the cost report.
#[derive(Debug, Clone, PartialEq)]
pub struct CostRow {
    pub n: usize,
    pub sublist_size: u64,
    pub root_power: u32,
    pub normalizer: f64,
    pub chain_probability: f64,
    pub expected_restarts: f64,
    pub subdivision_queries: u64,
    pub restart_adjusted_cost: f64,
    pub grover_queries: f64,
    pub classical_queries: f64,
    pub mc_clean_estimate: Option<f64>,
    pub mc_standard_error: Option<f64>,
}

/// Cost sweep over list sizes.
///
/// `restart_adjusted_cost` is the honest figure the query count alone hides:
/// `n` oracle queries multiplied by the expected chain restarts at the
/// costliest depth (in exact size mode the first depth, `M = 2^(n-1)`; in
/// paper mode `M = 2^n` at every depth). The degenerate `n = 1` exact row
/// has a one-item sublist, needs no chain, and costs exactly one query.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport {
    pub size_mode: SizeMode,
    pub mc_trials: u64,
    pub rows: Vec<CostRow>,
}

impl CostReport {
    pub fn csv_header(&self) -> String {
        let mut header = String::from(
            "n,m,v,c,chain_probability,expected_restarts,subdivision_queries,\
             restart_adjusted_cost,grover_queries,classical_queries",
        );
        if self.mc_trials > 0 {
            header.push_str(",mc_clean_estimate,mc_standard_error");
        }
        header
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.csv_header();
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}",
                row.n,
                row.sublist_size,
                row.root_power,
                sig15(row.normalizer),
                sig15(row.chain_probability),
                sig15(row.expected_restarts),
                row.subdivision_queries,
                sig15(row.restart_adjusted_cost),
                sig15(row.grover_queries),
                sig15(row.classical_queries),
            ));
            if self.mc_trials > 0 {
                out.push_str(&format!(
                    ",{},{}",
                    row.mc_clean_estimate.map(sig15).unwrap_or_default(),
                    row.mc_standard_error.map(sig15).unwrap_or_default(),
                ));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|row| {
                let mut fields = vec![
                    format!("\"n\":{}", row.n),
                    format!("\"m\":{}", row.sublist_size),
                    format!("\"v\":{}", row.root_power),
                    format!("\"c\":{}", sig15(row.normalizer)),
                    format!("\"chain_probability\":{}", sig15(row.chain_probability)),
                    format!("\"expected_restarts\":{}", sig15(row.expected_restarts)),
                    format!("\"subdivision_queries\":{}", row.subdivision_queries),
                    format!(
                        "\"restart_adjusted_cost\":{}",
                        sig15(row.restart_adjusted_cost)
                    ),
                    format!("\"grover_queries\":{}", sig15(row.grover_queries)),
                    format!("\"classical_queries\":{}", sig15(row.classical_queries)),
                ];
                if let (Some(est), Some(se)) = (row.mc_clean_estimate, row.mc_standard_error) {
                    fields.push(format!("\"mc_clean_estimate\":{}", sig15(est)));
                    fields.push(format!("\"mc_standard_error\":{}", sig15(se)));
                }
                format!("{{{}}}", fields.join(","))
            })
            .collect();
        format!(
            "{{\"size_mode\":\"{}\",\"mc_trials\":{},\"rows\":[{}]}}",
            self.size_mode.as_str(),
            self.mc_trials,
            rows.join(",")
        )
    }
}

/// Closed-form cost rows for each `n`, no sampling.
pub fn cost_sweep(n_values: &[usize], config: &SearchConfig) -> Result<CostReport> {
    cost_sweep_with_monte_carlo(n_values, config, 0)
}

/// Cost rows with an optional Monte Carlo verification column.
///
/// With `mc_trials > 0` each row gets a clean-chain estimate over that many
/// stochastic chains. Row `i` samples on a generator seeded with
/// `config.seed + i`, so reports are reproducible and rows independent.
pub fn cost_sweep_with_monte_carlo(
    n_values: &[usize],
    config: &SearchConfig,
    mc_trials: u64,
) -> Result<CostReport> {
    let mut rows = Vec::with_capacity(n_values.len());
    for (row_index, &n) in n_values.iter().enumerate() {
        if !(1..=OracleSpec::MAX_INDEX_QUBITS).contains(&n) {
            return Err(Error::InvalidConfig(format!(
                "n = {n} outside [1, {}]",
                OracleSpec::MAX_INDEX_QUBITS
            )));
        }
        let list_size = 1u64 << n;
        let sublist_size = match config.size_mode {
            SizeMode::Paper => list_size,
            SizeMode::Exact => list_size / 2,
        };

        let row = if sublist_size < 2 {
            CostRow {
                n,
                sublist_size,
                root_power: 0,
                normalizer: 1.0,
                chain_probability: 1.0,
                expected_restarts: 1.0,
                subdivision_queries: n as u64,
                restart_adjusted_cost: n as f64,
                grover_queries: grover_baseline(list_size),
                classical_queries: list_size as f64 / 2.0,
                mc_clean_estimate: None,
                mc_standard_error: None,
            }
        } else {
            let plan = make_plan(sublist_size, None)?;
            let x = second_register_model(sublist_size, true)?;
            let chain_probability = chain_success_probability(&plan, &x);
            let restarts = expected_restarts(sublist_size, plan.root_power())?;
            let (mc_clean_estimate, mc_standard_error) = if mc_trials > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(row_index as u64));
                let (est, se) = monte_carlo_chain(&plan, &x, mc_trials, &mut rng)?;
                (Some(est), Some(se))
            } else {
                (None, None)
            };
            CostRow {
                n,
                sublist_size,
                root_power: plan.root_power(),
                normalizer: plan.normalizer(),
                chain_probability,
                expected_restarts: restarts,
                subdivision_queries: n as u64,
                restart_adjusted_cost: n as f64 * restarts,
                grover_queries: grover_baseline(list_size),
                classical_queries: list_size as f64 / 2.0,
                mc_clean_estimate,
                mc_standard_error,
            }
        };
        rows.push(row);
    }
    Ok(CostReport {
        size_mode: config.size_mode,
        mc_trials,
        rows,
    })
}

/// Statistics for one sublist case of the joint-register experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct JointCaseReport {
    pub sublist_prefix: Vec<u8>,
    pub sublist_size: u64,
    pub target_in_sublist: bool,
    /// Exact flag-1 probability before the chain (`1/M` or `0`).
    pub pre_chain_flag_one: f64,
    /// Exact flag-1 probability after the forced chain on the joint state.
    pub post_chain_flag_one: f64,
    /// Flag-1 probability the two-dimensional model predicts post-chain.
    pub model_post_chain_flag_one: f64,
    /// `|post_chain_flag_one - model_post_chain_flag_one|`.
    pub flag_divergence: f64,
    /// Sampled flag-1 frequency over the trial measurements.
    pub sampled_flag_one: f64,
    /// Among flag-1 trials, fraction whose first register read the target.
    pub conditional_target_given_flag_one: Option<f64>,
}

/// Report of the joint-register experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct JointModeReport {
    pub n: usize,
    pub target: u64,
    pub trials: u64,
    pub present_case: JointCaseReport,
    pub absent_case: JointCaseReport,
}

impl JointModeReport {
    pub fn to_json(&self) -> String {
        format!(
            "{{\"n\":{},\"target\":{},\"trials\":{},\"present\":{},\"absent\":{}}}",
            self.n,
            self.target,
            self.trials,
            json_case(&self.present_case),
            json_case(&self.absent_case),
        )
    }
}

fn json_case(case: &JointCaseReport) -> String {
    let prefix: String = case
        .sublist_prefix
        .iter()
        .map(|b| char::from(b'0' + b))
        .collect();
    let conditional = match case.conditional_target_given_flag_one {
        Some(v) => sig15(v),
        None => "null".to_string(),
    };
    format!(
        "{{\"prefix\":\"{}\",\"sublist_size\":{},\"target_in_sublist\":{},\"pre_chain_flag_one\":{},\"post_chain_flag_one\":{},\"model_post_chain_flag_one\":{},\"flag_divergence\":{},\"sampled_flag_one\":{},\"conditional_target_given_flag_one\":{}}}",
        prefix,
        case.sublist_size,
        case.target_in_sublist,
        sig15(case.pre_chain_flag_one),
        sig15(case.post_chain_flag_one),
        sig15(case.model_post_chain_flag_one),
        sig15(case.flag_divergence),
        sig15(case.sampled_flag_one),
        conditional,
    )
}

/// Run the chain on the full entangled post-oracle state instead of the
/// two-dimensional model, then measure both registers.
///
/// The two-dimensional treatment assumes the flag register is in a pure
/// state; on the joint state the chain operators act on the flag qubit of an
/// entangled register, and the flag statistics diverge from the model. Two
/// sublists are examined: the whole list (which always contains the target)
/// and the half list whose leading bit differs from the target's (which
/// never does).
pub fn joint_mode_experiment<R: Rng + ?Sized>(
    n: usize,
    target: u64,
    trials: u64,
    rng: &mut R,
) -> Result<JointModeReport> {
    if n > JOINT_MODE_MAX_N {
        return Err(Error::ResourceLimit {
            n,
            max: JOINT_MODE_MAX_N,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1"));
    }
    // Validates n >= 1 and the target range.
    OracleSpec::new(n, target)?;

    let target_top_bit = ((target >> (n - 1)) & 1) as u8;
    let present_case = joint_case(n, target, &[], trials, rng)?;
    let absent_case = joint_case(n, target, &[1 - target_top_bit], trials, rng)?;
    Ok(JointModeReport {
        n,
        target,
        trials,
        present_case,
        absent_case,
    })
}

fn joint_case<R: Rng + ?Sized>(
    n: usize,
    target: u64,
    prefix: &[u8],
    trials: u64,
    rng: &mut R,
) -> Result<JointCaseReport> {
    let mut oracle = OracleSpec::new(n, target)?;
    let mut joint = QuantumState::prepare_prefix_state(prefix, n)?
        .apply_partial_hadamard(prefix.len())?
        .append_zero_qubit()?
        .apply_oracle(&mut oracle)?;

    let sublist_size = 1u64 << (n - prefix.len());
    let pre_chain_flag_one = joint.qubit_probability(n, 1)?;
    let target_in_sublist = pre_chain_flag_one * 2.0 * sublist_size as f64 > 1.0;

    let model_post_chain_flag_one = if sublist_size >= 2 {
        let plan = make_plan(sublist_size, None)?;

        // Forced chain on the flag qubit of the joint state.
        let r_t = plan.svd().r().transpose().to_complex();
        let q = plan.svd().q().to_complex();
        let m0 = plan.pair().m0().to_complex();
        (joint, _) = joint.apply_qubit_operator(n, &r_t, false)?;
        for _ in 0..plan.root_power() {
            (joint, _) = joint.apply_qubit_operator(n, &m0, true)?;
        }
        (joint, _) = joint.apply_qubit_operator(n, &q, false)?;

        // What the two-dimensional model claims the flag should do.
        let input = second_register_model(sublist_size, target_in_sublist)?;
        let model = run_chain(&input, &plan, ChainMode::Forced, rng)?;
        model.final_state.a1().norm_sqr()
    } else {
        // One-item sublist: the flag is already a basis state.
        if target_in_sublist {
            1.0
        } else {
            0.0
        }
    };

    let post_chain_flag_one = joint.qubit_probability(n, 1)?;
    let flag_divergence = (post_chain_flag_one - model_post_chain_flag_one).abs();

    // Joint measurement of both registers, sampled from the cumulative
    // distribution of the post-chain state.
    let cdf = cumulative_probabilities(&joint);
    let mut flag_one_count = 0u64;
    let mut target_given_flag_one = 0u64;
    for _ in 0..trials {
        let index = sample_index(&cdf, rng.random::<f64>());
        let flag = index & 1;
        let register = (index >> 1) as u64;
        if flag == 1 {
            flag_one_count += 1;
            if register == target {
                target_given_flag_one += 1;
            }
        }
    }
    let sampled_flag_one = flag_one_count as f64 / trials as f64;
    let conditional_target_given_flag_one = if flag_one_count > 0 {
        Some(target_given_flag_one as f64 / flag_one_count as f64)
    } else {
        None
    };

    Ok(JointCaseReport {
        sublist_prefix: prefix.to_vec(),
        sublist_size,
        target_in_sublist,
        pre_chain_flag_one,
        post_chain_flag_one,
        model_post_chain_flag_one,
        flag_divergence,
        sampled_flag_one,
        conditional_target_given_flag_one,
    })
}

fn cumulative_probabilities(state: &QuantumState) -> Vec<f64> {
    let mut acc = 0.0;
    state
        .amplitudes()
        .iter()
        .map(|a| {
            acc += a.norm_sqr();
            acc
        })
        .collect()
}

fn sample_index(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().expect("non-empty distribution");
    let needle = u * total;
    cdf.partition_point(|&c| c <= needle).min(cdf.len() - 1)
}
