//! Dense state vectors for the index register plus flag qubit.
//!
//! Qubit 0 is the most significant bit: basis index `i` of an `m`-qubit state
//! assigns qubit `q` the bit `(i >> (m - 1 - q)) & 1`. The flag register of
//! the search is therefore always the lowest bit of the amplitude index.
//!
//! Only the operations the subdivision search needs are provided: preparation
//! of a prefix basis state, the partial Hadamard that spreads the free
//! suffix, the marking oracle, general (possibly non-unitary) single-qubit
//! operators with selective renormalization, and computational-basis
//! measurement of one qubit.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Hard cap on register width: 30 index qubits plus the flag.
pub const MAX_QUBITS: usize = 31;

/// Branch weights below this are treated as annihilation.
const ZERO_BRANCH: f64 = 1e-300;

/// Complex amplitude vector over `2^qubit_count` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    qubit_count: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Basis state `|index⟩` on `qubit_count` qubits.
    pub fn basis(qubit_count: usize, index: u64) -> Result<Self> {
        check_qubit_count(qubit_count)?;
        let dim = 1u64 << qubit_count;
        if index >= dim {
            return Err(Error::TargetOutOfRange {
                target: index,
                n: qubit_count,
            });
        }
        let mut amplitudes = vec![Complex64::ZERO; dim as usize];
        amplitudes[index as usize] = Complex64::ONE;
        Ok(QuantumState {
            qubit_count,
            amplitudes,
        })
    }

    /// Build a state from raw amplitudes; the length must be a power of two
    /// and the vector normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(
                "amplitude vector length must be a power of two >= 2",
            ));
        }
        let qubit_count = dim.trailing_zeros() as usize;
        check_qubit_count(qubit_count)?;
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("amplitude vector is not normalized"));
        }
        Ok(QuantumState {
            qubit_count,
            amplitudes,
        })
    }

    /// The prefix basis state `|b_0 .. b_{j-1} 0 .. 0⟩` on `n` qubits.
    pub fn prepare_prefix_state(determined_bits: &[u8], n: usize) -> Result<Self> {
        check_qubit_count(n)?;
        if determined_bits.len() > n {
            return Err(Error::InvalidPrefix {
                len: determined_bits.len(),
                n,
            });
        }
        let mut index = 0u64;
        for (pos, &bit) in determined_bits.iter().enumerate() {
            if bit > 1 {
                return Err(Error::InvalidArgument("prefix bits must be 0 or 1"));
            }
            index |= u64::from(bit) << (n - 1 - pos);
        }
        Self::basis(n, index)
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: u64) -> Complex64 {
        self.amplitudes[index as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Total squared amplitude of basis states whose `qubit` equals `bit`.
    pub fn qubit_probability(&self, qubit: usize, bit: u8) -> Result<f64> {
        let mask = self.qubit_mask(qubit)?;
        let want = if bit > 0 { mask } else { 0 };
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (*i as u64) & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Tensor the state with a fresh `|0⟩` qubit in the last position.
    pub fn append_zero_qubit(&self) -> Result<Self> {
        check_qubit_count(self.qubit_count + 1)?;
        let mut amplitudes = vec![Complex64::ZERO; self.amplitudes.len() * 2];
        for (i, &a) in self.amplitudes.iter().enumerate() {
            amplitudes[2 * i] = a;
        }
        Ok(QuantumState {
            qubit_count: self.qubit_count + 1,
            amplitudes,
        })
    }

    /// Identity on the first `fixed_count` qubits, Hadamard on the rest.
    ///
    /// Defined only for the search's use pattern: the input must be a basis
    /// state whose free suffix is `|0..0⟩`. The result is the uniform
    /// superposition over all basis states sharing the fixed prefix, each
    /// with real amplitude `1/sqrt(2^(n-fixed_count))`.
    pub fn apply_partial_hadamard(&self, fixed_count: usize) -> Result<Self> {
        let n = self.qubit_count;
        if fixed_count > n {
            return Err(Error::InvalidPrefix {
                len: fixed_count,
                n,
            });
        }
        let base = self.basis_index()?;
        let free = n - fixed_count;
        let suffix_mask = if free == 0 { 0 } else { (1u64 << free) - 1 };
        if base & suffix_mask != 0 {
            return Err(Error::HadamardPrecondition(
                "free suffix qubits must be |0>",
            ));
        }
        let count = 1u64 << free;
        let amp = Complex64::new(1.0 / (count as f64).sqrt(), 0.0);
        let mut amplitudes = vec![Complex64::ZERO; self.amplitudes.len()];
        for suffix in 0..count {
            amplitudes[(base | suffix) as usize] = amp;
        }
        Ok(QuantumState {
            qubit_count: n,
            amplitudes,
        })
    }

    /// Marking oracle: `|i⟩|q⟩ -> |i⟩|q XOR f(i)⟩` with the flag qubit in the
    /// last position. Increments the oracle's query counter.
    pub fn apply_oracle(&self, oracle: &mut OracleSpec) -> Result<Self> {
        let expected = oracle.n() + 1;
        if self.qubit_count != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: self.qubit_count,
            });
        }
        let mut amplitudes = self.amplitudes.clone();
        let flag0 = (oracle.target() << 1) as usize;
        amplitudes.swap(flag0, flag0 + 1);
        oracle.record_query();
        Ok(QuantumState {
            qubit_count: self.qubit_count,
            amplitudes,
        })
    }

    /// Apply an arbitrary 2x2 operator to one qubit.
    ///
    /// Returns the resulting state together with the branch weight
    /// `<psi| op^dag op |psi>` evaluated on the input. With `renormalize`
    /// set the output is divided by its norm (the selective-measurement
    /// update); a branch weight below 1e-300 is an annihilated state and
    /// yields an error instead.
    pub fn apply_qubit_operator(
        &self,
        qubit: usize,
        op: &[[Complex64; 2]; 2],
        renormalize: bool,
    ) -> Result<(Self, f64)> {
        let mask = self.qubit_mask(qubit)? as usize;
        let mut amplitudes = self.amplitudes.clone();
        let mut weight = 0.0;
        for i0 in 0..amplitudes.len() {
            if i0 & mask != 0 {
                continue;
            }
            let i1 = i0 | mask;
            let a0 = self.amplitudes[i0];
            let a1 = self.amplitudes[i1];
            let b0 = op[0][0] * a0 + op[0][1] * a1;
            let b1 = op[1][0] * a0 + op[1][1] * a1;
            weight += b0.norm_sqr() + b1.norm_sqr();
            amplitudes[i0] = b0;
            amplitudes[i1] = b1;
        }
        if renormalize {
            if weight < ZERO_BRANCH {
                return Err(Error::ZeroProbabilityBranch);
            }
            let inv = 1.0 / weight.sqrt();
            for a in &mut amplitudes {
                *a *= inv;
            }
        }
        Ok((
            QuantumState {
                qubit_count: self.qubit_count,
                amplitudes,
            },
            weight,
        ))
    }

    /// Measure one qubit in the computational basis; returns the outcome and
    /// the renormalized collapsed state.
    pub fn measure_qubit<R: Rng + ?Sized>(&self, qubit: usize, rng: &mut R) -> Result<(u8, Self)> {
        let mask = self.qubit_mask(qubit)?;
        let p1 = self.qubit_probability(qubit, 1)?;
        let outcome: u8 = if rng.random::<f64>() < p1 { 1 } else { 0 };
        let p = if outcome == 1 { p1 } else { 1.0 - p1 };
        let want = if outcome == 1 { mask } else { 0 };
        let inv = 1.0 / p.sqrt();
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                if (i as u64) & mask == want {
                    a * inv
                } else {
                    Complex64::ZERO
                }
            })
            .collect();
        Ok((
            outcome,
            QuantumState {
                qubit_count: self.qubit_count,
                amplitudes,
            },
        ))
    }

    /// Index of the single populated basis state, if the state is one.
    fn basis_index(&self) -> Result<u64> {
        let mut found: Option<usize> = None;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() > 0.5 {
                found = Some(i);
                break;
            }
        }
        let i = found.ok_or(Error::HadamardPrecondition("input is not a basis state"))?;
        if (self.amplitudes[i] - Complex64::ONE).norm() > 1e-10 {
            return Err(Error::HadamardPrecondition(
                "basis amplitude must be 1 (no phase)",
            ));
        }
        Ok(i as u64)
    }

    fn qubit_mask(&self, qubit: usize) -> Result<u64> {
        if qubit >= self.qubit_count {
            return Err(Error::InvalidQubit {
                qubit,
                count: self.qubit_count,
            });
        }
        Ok(1u64 << (self.qubit_count - 1 - qubit))
    }
}

/// Search oracle: list size `2^n`, hidden target index, and a query tally.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSpec {
    n: usize,
    target: u64,
    query_count: u64,
}

impl OracleSpec {
    pub const MAX_INDEX_QUBITS: usize = 30;

    pub fn new(n: usize, target: u64) -> Result<Self> {
        if !(1..=Self::MAX_INDEX_QUBITS).contains(&n) {
            return Err(Error::OracleSize {
                n,
                max: Self::MAX_INDEX_QUBITS,
            });
        }
        if target >= 1u64 << n {
            return Err(Error::TargetOutOfRange { target, n });
        }
        Ok(OracleSpec {
            n,
            target,
            query_count: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    /// Classical truth `f(i)`; does not count as a query.
    pub fn marks(&self, i: u64) -> bool {
        i == self.target
    }

    fn record_query(&mut self) {
        self.query_count += 1;
    }
}

fn check_qubit_count(qubit_count: usize) -> Result<()> {
    if !(1..=MAX_QUBITS).contains(&qubit_count) {
        return Err(Error::InvalidArgument(
            "qubit count must be between 1 and 31",
        ));
    }
    Ok(())
}
