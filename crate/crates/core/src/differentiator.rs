//! Discrimination of the two nearly parallel flag states.
//!
//! After one oracle query the flag register is either exactly `|0⟩` (target
//! absent from the sublist) or `sqrt(1-1/M)|0⟩ + (1/sqrt(M))|1⟩` (target
//! present in a sublist of `M` items). The matrix
//!
//! ```text
//! D = [ 1  -sqrt(M-1) ]
//!     [ 0   sqrt(M)   ]
//! ```
//!
//! maps the first state to `|0⟩` and the second to `|1⟩`, but is not
//! unitary. It is realized as a chain of selective measurement operators:
//! factor `D = Q V R^T` by SVD, take the `v`-th root of the diagonal factor,
//! normalize it into a measurement operator `M0` with complement
//! `M1 = sqrt(I - M0^dag M0)`, and run `R^T`, then `M0` applied `v` times,
//! then `Q`. Each `M0` step succeeds only with probability
//! `<psi|M0^dag M0|psi>`; a run in which `M1` never fired realizes `D`
//! exactly (up to positive scale) and classifies the input perfectly.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::sigfmt::{json_f64_array, json_mat2, sig15};

/// Normalized one-qubit state, the model of the flag register.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoDimState {
    a0: Complex64,
    a1: Complex64,
}

impl TwoDimState {
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self> {
        let norm_sqr = a0.norm_sqr() + a1.norm_sqr();
        if (norm_sqr - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("two-dim state is not normalized"));
        }
        Ok(TwoDimState { a0, a1 })
    }

    pub fn from_real(a0: f64, a1: f64) -> Result<Self> {
        Self::new(Complex64::new(a0, 0.0), Complex64::new(a1, 0.0))
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    pub fn a1(&self) -> Complex64 {
        self.a1
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.a0, self.a1]
    }
}

/// Flag state when the target lies in a sublist of `M` items (`present`),
/// or when it does not (`absent`).
pub fn second_register_model(sublist_size: u64, present: bool) -> Result<TwoDimState> {
    if sublist_size < 2 {
        return Err(Error::InvalidSublistSize(sublist_size));
    }
    if present {
        let m = sublist_size as f64;
        TwoDimState::from_real(((m - 1.0) / m).sqrt(), 1.0 / m.sqrt())
    } else {
        TwoDimState::from_real(1.0, 0.0)
    }
}

/// The discriminating matrix for a sublist of `M` items.
pub fn build_d(sublist_size: u64) -> Result<Mat2> {
    if sublist_size < 2 {
        return Err(Error::InvalidSublistSize(sublist_size));
    }
    let m = sublist_size as f64;
    Ok(Mat2::new(1.0, -(m - 1.0).sqrt(), 0.0, m.sqrt()))
}

/// Singular value decomposition `A = Q V R^T` of a real 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvdTriple {
    q: Mat2,
    v: Mat2,
    r: Mat2,
}

impl SvdTriple {
    pub fn q(&self) -> &Mat2 {
        &self.q
    }

    /// Diagonal factor, `diag(sigma1, sigma2)` with `sigma1 >= sigma2 > 0`.
    pub fn v(&self) -> &Mat2 {
        &self.v
    }

    pub fn r(&self) -> &Mat2 {
        &self.r
    }

    pub fn sigma1(&self) -> f64 {
        self.v.0[0][0]
    }

    pub fn sigma2(&self) -> f64 {
        self.v.0[1][1]
    }

    pub fn reconstruct(&self) -> Mat2 {
        self.q.mul(&self.v).mul(&self.r.transpose())
    }
}

/// Closed-form SVD of a nonsingular real 2x2 matrix.
///
/// `sigma2` is recovered from `|det A| / sigma1` rather than by subtraction,
/// which keeps the small singular value accurate when the two differ by many
/// orders of magnitude. The rotation pair is canonicalized so that the
/// lower-left entry of `Q` is positive (both signs reconstruct `A`; the
/// positive choice is the one the worked chain traces use).
pub fn svd_2x2(a: &Mat2) -> Result<SvdTriple> {
    let det = a.det();
    if det.abs() <= 1e-14 {
        return Err(Error::SingularMatrix);
    }
    let m = &a.0;
    let e = (m[0][0] + m[1][1]) / 2.0;
    let f = (m[0][0] - m[1][1]) / 2.0;
    let g = (m[1][0] + m[0][1]) / 2.0;
    let h = (m[1][0] - m[0][1]) / 2.0;

    let q1 = e.hypot(h);
    let q2 = f.hypot(g);
    let sigma1 = q1 + q2;
    let sigma2 = det.abs() / sigma1;

    let a1 = g.atan2(f);
    let a2 = h.atan2(e);
    let mut q = Mat2::rotation((a1 + a2) / 2.0);
    let mut r = Mat2::rotation((a1 - a2) / 2.0);

    // A negative determinant puts a reflection into the right factor.
    if det < 0.0 {
        r.0[0][1] = -r.0[0][1];
        r.0[1][1] = -r.0[1][1];
    }

    if q.0[1][0] < 0.0 || (q.0[1][0] == 0.0 && q.0[0][0] < 0.0) {
        q = q.neg();
        r = r.neg();
    }

    Ok(SvdTriple {
        q,
        v: Mat2::diag(sigma1, sigma2),
        r,
    })
}

/// Smallest power-of-two root `v` for which `sigma1^(1/v) < 2`.
pub fn choose_root_power(sigma1: f64) -> u32 {
    debug_assert!(sigma1 > 0.0);
    let mut v = 1u32;
    while sigma1 >= (1u64 << v) as f64 {
        v *= 2;
    }
    v
}

/// Complete measurement operator pair derived from the diagonal SVD factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementPair {
    m0: Mat2,
    m1: Mat2,
    root_power: u32,
    normalizer: f64,
}

impl MeasurementPair {
    pub fn m0(&self) -> &Mat2 {
        &self.m0
    }

    pub fn m1(&self) -> &Mat2 {
        &self.m1
    }

    /// Root power `v`: how many times `M0` is applied in a chain.
    pub fn root_power(&self) -> u32 {
        self.root_power
    }

    /// Normalizer `c = sqrt(s1^2 + s2^2)` of the rooted diagonal entries.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }
}

/// Take the `v`-th root of the diagonal factor and normalize it into `M0`;
/// the complement is `M1 = sqrt(I - M0^dag M0)`. `v` must be a power of two
/// so the root is a cascade of exact square roots.
pub fn build_measurement_pair(v_mat: &Mat2, root_power: u32) -> Result<MeasurementPair> {
    if root_power == 0 || !root_power.is_power_of_two() {
        return Err(Error::InvalidRootPower(root_power));
    }
    if v_mat.0[0][1] != 0.0 || v_mat.0[1][0] != 0.0 {
        return Err(Error::InvalidArgument("V must be diagonal"));
    }
    let (sigma1, sigma2) = (v_mat.0[0][0], v_mat.0[1][1]);
    if !(sigma1 >= sigma2 && sigma2 > 0.0) {
        return Err(Error::InvalidArgument(
            "diagonal entries must satisfy sigma1 >= sigma2 > 0",
        ));
    }
    let s1 = root_pow2(sigma1, root_power);
    let s2 = root_pow2(sigma2, root_power);
    let c = s1.hypot(s2);
    let m0 = Mat2::diag(s1 / c, s2 / c);
    let m1 = Mat2::diag(
        (1.0 - m0.0[0][0] * m0.0[0][0]).max(0.0).sqrt(),
        (1.0 - m0.0[1][1] * m0.0[1][1]).max(0.0).sqrt(),
    );
    Ok(MeasurementPair {
        m0,
        m1,
        root_power,
        normalizer: c,
    })
}

/// `x^(1/v)` for `v` a power of two, by repeated square roots.
fn root_pow2(x: f64, v: u32) -> f64 {
    let mut y = x;
    for _ in 0..v.trailing_zeros() {
        y = y.sqrt();
    }
    y
}

/// Everything needed to run the chain for one sublist size.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentiatorPlan {
    sublist_size: u64,
    d: Mat2,
    svd: SvdTriple,
    pair: MeasurementPair,
}

impl DifferentiatorPlan {
    pub fn sublist_size(&self) -> u64 {
        self.sublist_size
    }

    pub fn d(&self) -> &Mat2 {
        &self.d
    }

    pub fn svd(&self) -> &SvdTriple {
        &self.svd
    }

    pub fn pair(&self) -> &MeasurementPair {
        &self.pair
    }

    pub fn root_power(&self) -> u32 {
        self.pair.root_power
    }

    pub fn normalizer(&self) -> f64 {
        self.pair.normalizer
    }

    /// JSON document with all matrices, reals at 15 significant digits.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"M\":{},\"v\":{},\"c\":{},\"D\":{},\"Q\":{},\"V\":{},\"R\":{},\"M0\":{},\"M1\":{}}}",
            self.sublist_size,
            self.pair.root_power,
            sig15(self.pair.normalizer),
            json_mat2(&self.d.0),
            json_mat2(&self.svd.q.0),
            json_mat2(&self.svd.v.0),
            json_mat2(&self.svd.r.0),
            json_mat2(&self.pair.m0.0),
            json_mat2(&self.pair.m1.0),
        )
    }
}

/// Assemble the full pipeline for a sublist of `M` items. The root power is
/// chosen automatically unless overridden.
pub fn make_plan(sublist_size: u64, root_override: Option<u32>) -> Result<DifferentiatorPlan> {
    let d = build_d(sublist_size)?;
    let svd = svd_2x2(&d)?;
    let root_power = match root_override {
        Some(v) => {
            if v == 0 || !v.is_power_of_two() {
                return Err(Error::InvalidRootPower(v));
            }
            v
        }
        None => choose_root_power(svd.sigma1()),
    };
    let pair = build_measurement_pair(svd.v(), root_power)?;
    Ok(DifferentiatorPlan {
        sublist_size,
        d,
        svd,
        pair,
    })
}

/// Whether a chain step took the intended operator or its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    M0,
    M1,
}

/// Verdict of the chain on the flag state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Present,
    Absent,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Present => "present",
            Classification::Absent => "absent",
        }
    }
}

/// How branch selection is performed during the non-unitary phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainMode {
    /// Every step takes `M0`; step probabilities record what the stochastic
    /// draw would have seen.
    Forced,
    /// Each step draws `M0` with probability `<psi|M0^dag M0|psi>`.
    Stochastic,
}

/// Branch-by-branch record of one chain run.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutcome {
    pub branches: Vec<Branch>,
    pub step_probabilities: Vec<f64>,
    pub final_state: TwoDimState,
    pub readout: Classification,
    /// True iff `M1` never fired.
    pub clean: bool,
    /// Product of the step probabilities of the branches actually taken.
    pub chain_probability: f64,
}

impl ChainOutcome {
    pub fn to_json(&self) -> String {
        let branches: Vec<&str> = self
            .branches
            .iter()
            .map(|b| match b {
                Branch::M0 => "\"M0\"",
                Branch::M1 => "\"M1\"",
            })
            .map(|s| s.trim_matches('"'))
            .collect();
        let branch_json: Vec<String> = branches.iter().map(|b| format!("\"{b}\"")).collect();
        format!(
            "{{\"branches\":[{}],\"step_probabilities\":{},\"final_state\":{},\"readout\":\"{}\",\"clean\":{},\"chain_probability\":{}}}",
            branch_json.join(","),
            json_f64_array(&self.step_probabilities),
            json_two_dim(&self.final_state),
            self.readout.as_str(),
            self.clean,
            sig15(self.chain_probability),
        )
    }
}

fn json_two_dim(state: &TwoDimState) -> String {
    format!(
        "[[{},{}],[{},{}]]",
        sig15(state.a0.re),
        sig15(state.a0.im),
        sig15(state.a1.re),
        sig15(state.a1.im)
    )
}

/// `present` iff the final state is closer to `|1⟩` than to `|0⟩`.
pub fn classify(final_state: &TwoDimState) -> Classification {
    if final_state.a1.norm_sqr() > 0.5 {
        Classification::Present
    } else {
        Classification::Absent
    }
}

/// Run the chain `R^T`, `M0 x v`, `Q` on a flag state.
///
/// Each non-unitary step is the selective-measurement update: the chosen
/// operator is applied and the state divided by the square root of the
/// branch weight. The arithmetic is identical to routing the one-qubit state
/// through [`crate::statevec::QuantumState::apply_qubit_operator`],
/// specialized to two amplitudes so million-trial sampling stays cheap.
pub fn run_chain<R: Rng + ?Sized>(
    input: &TwoDimState,
    plan: &DifferentiatorPlan,
    mode: ChainMode,
    rng: &mut R,
) -> Result<ChainOutcome> {
    let mut amps = plan.svd.r.transpose().mul_cvec(input.amplitudes());

    let steps = plan.pair.root_power as usize;
    let mut branches = Vec::with_capacity(steps);
    let mut step_probabilities = Vec::with_capacity(steps);
    let mut chain_probability = 1.0;
    for _ in 0..steps {
        let m0_amps = plan.pair.m0.mul_cvec(amps);
        let p0 = m0_amps[0].norm_sqr() + m0_amps[1].norm_sqr();
        let take_m0 = match mode {
            ChainMode::Forced => true,
            ChainMode::Stochastic => rng.random::<f64>() < p0,
        };
        if take_m0 {
            branches.push(Branch::M0);
            step_probabilities.push(p0);
            chain_probability *= p0;
            amps = renormalize(m0_amps, p0)?;
        } else {
            let m1_amps = plan.pair.m1.mul_cvec(amps);
            let p1 = m1_amps[0].norm_sqr() + m1_amps[1].norm_sqr();
            branches.push(Branch::M1);
            step_probabilities.push(p1);
            chain_probability *= p1;
            amps = renormalize(m1_amps, p1)?;
        }
    }

    amps = plan.svd.q.mul_cvec(amps);

    let final_state = TwoDimState::new(amps[0], amps[1])?;
    let clean = branches.iter().all(|b| *b == Branch::M0);
    Ok(ChainOutcome {
        readout: classify(&final_state),
        branches,
        step_probabilities,
        final_state,
        clean,
        chain_probability,
    })
}

fn renormalize(amps: [Complex64; 2], weight: f64) -> Result<[Complex64; 2]> {
    if weight < 1e-300 {
        return Err(Error::ZeroProbabilityBranch);
    }
    let inv = 1.0 / weight.sqrt();
    Ok([amps[0] * inv, amps[1] * inv])
}

/// Probability that a stochastic chain takes the `M0` branch at every step:
/// `||M0^v R^T psi||^2 = ||D psi||^2 / c^(2v)`.
pub fn chain_success_probability(plan: &DifferentiatorPlan, input: &TwoDimState) -> f64 {
    let image = plan.d.mul_cvec(input.amplitudes());
    let norm_sqr = image[0].norm_sqr() + image[1].norm_sqr();
    norm_sqr / plan.pair.normalizer.powi(2 * plan.pair.root_power as i32)
}
