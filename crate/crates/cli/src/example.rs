// Reference values are quoted digit for digit, including near-constants
// like 0.707106781186547/...548 whose final-ulp asymmetry is part of the
// trace.
#![allow(clippy::approx_constant, clippy::excessive_precision)]

//! Self-verifying reproduction of the complete worked chain trace at
//! n = 20, v = 16 (full-list size mode).
//!
//! Prints the prepared matrices, every intermediate state and step
//! probability, then checks each printed quantity against its reference
//! value at 1e-9 absolute. Any mismatch is reported as an expected/actual
//! diff on standard error and the command exits with status 1.

use std::process::ExitCode;

use qsubdiv::differentiator::{make_plan, second_register_model};
use qsubdiv::mat2::Mat2;
use qsubdiv::sigfmt::sig15;
use qsubdiv::statevec::QuantumState;

const TOLERANCE: f64 = 1e-9;

/// Reference values from the worked trace.
const X: [f64; 2] = [0.999999523162728, 0.000976562500000];
const D: [[f64; 2]; 2] = [[1.0, -1023.999511718634], [0.0, 1024.0]];
const Q: [[f64; 2]; 2] = [
    [-0.707106781186547, -0.707106781186547],
    [0.707106781186547, -0.707106781186547],
];
const V: [f64; 2] = [1448.154515236507, 0.707106865480];
const R: [[f64; 2]; 2] = [
    [-0.000488281308208, -0.999999880790675],
    [0.999999880790675, -0.000488281308208],
];
const V_ROOT: [f64; 2] = [1.575980833365910, 0.978572069378633];
const M0: [f64; 2] = [0.849549077650853, 0.527509587270776];
const AFTER_RT: [f64; 2] = [0.000488281308208, -0.999999880790675];
const FIRST_STEP_PROBABILITY: f64 = 0.278266470393446;
const AFTER_ONE_STEP: [f64; 2] = [0.000786372165026, -0.999999690809361];
const AFTER_ALL_STEPS: [f64; 2] = [0.707106781186547, -0.707106781186548];
const FINAL: [f64; 2] = [0.0, 1.0];
const STEP_RANGE: (f64, f64) = (0.27, 0.41);

struct Checkpoints {
    failures: u32,
    total: u32,
}

impl Checkpoints {
    fn new() -> Self {
        Checkpoints {
            failures: 0,
            total: 0,
        }
    }

    fn check(&mut self, label: &str, actual: f64, expected: f64) {
        self.total += 1;
        if (actual - expected).abs() > TOLERANCE {
            self.failures += 1;
            eprintln!(
                "MISMATCH {label}: expected {}, actual {}, |diff| = {:.3e}",
                sig15(expected),
                sig15(actual),
                (actual - expected).abs()
            );
        }
    }

    fn check_matrix(&mut self, label: &str, actual: &Mat2, expected: &[[f64; 2]; 2]) {
        for (r, (arow, erow)) in actual.0.iter().zip(expected.iter()).enumerate() {
            for (c, (a, e)) in arow.iter().zip(erow.iter()).enumerate() {
                self.check(&format!("{label}[{r}][{c}]"), *a, *e);
            }
        }
    }

    fn check_in_range(&mut self, label: &str, actual: f64, low: f64, high: f64) {
        self.total += 1;
        if !(low..=high).contains(&actual) {
            self.failures += 1;
            eprintln!("MISMATCH {label}: {actual} outside [{low}, {high}]");
        }
    }
}

fn fmt_state(a0: f64, a1: f64) -> String {
    format!("({a0:.15}, {a1:.15})")
}

fn fmt_matrix(m: &Mat2) -> String {
    format!(
        "[[{}, {}], [{}, {}]]",
        sig15(m.0[0][0]),
        sig15(m.0[0][1]),
        sig15(m.0[1][0]),
        sig15(m.0[1][1])
    )
}

pub fn run() -> ExitCode {
    let mut checks = Checkpoints::new();

    let x = second_register_model(1 << 20, true).expect("model state");
    println!("x = {}", fmt_state(x.a0().re, x.a1().re));
    checks.check("x[0]", x.a0().re, X[0]);
    checks.check("x[1]", x.a1().re, X[1]);

    let plan = make_plan(1 << 20, Some(16)).expect("plan");
    println!("D = {}", fmt_matrix(plan.d()));
    checks.check_matrix("D", plan.d(), &D);
    println!("Q = {}", fmt_matrix(plan.svd().q()));
    checks.check_matrix("Q", plan.svd().q(), &Q);
    println!(
        "V = diag({}, {})",
        sig15(plan.svd().sigma1()),
        sig15(plan.svd().sigma2())
    );
    checks.check("V[0][0]", plan.svd().sigma1(), V[0]);
    checks.check("V[1][1]", plan.svd().sigma2(), V[1]);
    println!("R = {}", fmt_matrix(plan.svd().r()));
    checks.check_matrix("R", plan.svd().r(), &R);

    let c = plan.normalizer();
    let s1 = plan.pair().m0().0[0][0] * c;
    let s2 = plan.pair().m0().0[1][1] * c;
    println!("V^(1/16) = diag({}, {})", sig15(s1), sig15(s2));
    checks.check("V^(1/16)[0][0]", s1, V_ROOT[0]);
    checks.check("V^(1/16)[1][1]", s2, V_ROOT[1]);

    let m0_diag = [plan.pair().m0().0[0][0], plan.pair().m0().0[1][1]];
    println!("M0 = diag({}, {})", sig15(m0_diag[0]), sig15(m0_diag[1]));
    checks.check("M0[0][0]", m0_diag[0], M0[0]);
    checks.check("M0[1][1]", m0_diag[1], M0[1]);

    // The chain itself: R^T, sixteen selective M0 steps, Q.
    let mut state = QuantumState::from_amplitudes(vec![x.a0(), x.a1()]).expect("input state");
    (state, _) = state
        .apply_qubit_operator(0, &plan.svd().r().transpose().to_complex(), false)
        .expect("R^T");
    println!(
        "after R^T: {}",
        fmt_state(state.amplitude(0).re, state.amplitude(1).re)
    );
    checks.check("after R^T [0]", state.amplitude(0).re, AFTER_RT[0]);
    checks.check("after R^T [1]", state.amplitude(1).re, AFTER_RT[1]);

    let m0_op = plan.pair().m0().to_complex();
    for step in 1..=16u32 {
        let (next, probability) = state
            .apply_qubit_operator(0, &m0_op, true)
            .expect("M0 step");
        state = next;
        println!(
            "step {step:2}: p = {probability:.15}, state = {}",
            fmt_state(state.amplitude(0).re, state.amplitude(1).re)
        );
        checks.check_in_range(
            &format!("step {step} probability"),
            probability,
            STEP_RANGE.0,
            STEP_RANGE.1,
        );
        if step == 1 {
            checks.check("step 1 probability", probability, FIRST_STEP_PROBABILITY);
            checks.check("after step 1 [0]", state.amplitude(0).re, AFTER_ONE_STEP[0]);
            checks.check("after step 1 [1]", state.amplitude(1).re, AFTER_ONE_STEP[1]);
        }
    }
    checks.check(
        "after 16 steps [0]",
        state.amplitude(0).re,
        AFTER_ALL_STEPS[0],
    );
    checks.check(
        "after 16 steps [1]",
        state.amplitude(1).re,
        AFTER_ALL_STEPS[1],
    );

    (state, _) = state
        .apply_qubit_operator(0, &plan.svd().q().to_complex(), false)
        .expect("Q");
    println!(
        "after Q: {}",
        fmt_state(state.amplitude(0).re, state.amplitude(1).re)
    );
    checks.check("final [0]", state.amplitude(0).re, FINAL[0]);
    checks.check("final [1]", state.amplitude(1).re, FINAL[1]);

    let readout = if state.amplitude(1).norm_sqr() > 0.5 {
        "present"
    } else {
        "absent"
    };
    println!("readout: {readout}");

    println!(
        "checkpoints: {} passed, {} failed",
        checks.total - checks.failures,
        checks.failures
    );
    if checks.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
