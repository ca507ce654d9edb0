//! Replays LOCC protocols on qubit registers with exact ancilla accounting.
//!
//! The ledger keeps the joint state of every live qubit (qubit 0 most
//! significant), who holds each qubit, the original qubit count `n` and the
//! number of ancillas `k` added so far. Final local work is
//!
//! ```text
//! W_l = n'_A - S(ρ'_A) + n'_B - S(ρ'_B) - k = n - S(ρ'_A) - S(ρ'_B)
//! ```

use std::str::FromStr;

use crate::channels::{cnot_gate, dephase_factor, embed_qubit_unitary, LocalBasis, UNITARY_TOL};
use crate::qstate::{
    entropy_unchecked, partial_trace_dims, unitarity_residual, BipartiteState, ComplexMatrix,
    Party, C64,
};
use crate::{Error, Result};

/// Agreement required between the two forms of the local work.
pub const ACCOUNTING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolStep {
    /// Append a `|0⟩` qubit held by `party`.
    AddAncilla { party: Party },
    /// Unitary on the listed qubits (first listed most significant), all of
    /// which must be held by `party`.
    LocalUnitary {
        party: Party,
        qubits: Vec<usize>,
        unitary: ComplexMatrix,
    },
    /// Dephase `qubit` in `basis` while sending it from `from` to `to`.
    DephaseAndSend {
        qubit: usize,
        basis: LocalBasis,
        from: Party,
        to: Party,
    },
}

impl ProtocolStep {
    pub fn cnot(party: Party, control: usize, target: usize) -> Self {
        ProtocolStep::LocalUnitary {
            party,
            qubits: vec![control, target],
            unitary: cnot_gate(),
        }
    }

    pub fn send(qubit: usize, from: Party, to: Party) -> Self {
        ProtocolStep::DephaseAndSend {
            qubit,
            basis: LocalBasis::computational(2),
            from,
            to,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolLedger {
    joint: ComplexMatrix,
    holders: Vec<Party>,
    n_original: usize,
    k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkResult {
    /// `n - S(ρ'_A) - S(ρ'_B)`.
    pub w_local: f64,
    /// `n'_A - S(ρ'_A) + n'_B - S(ρ'_B) - k`.
    pub w_local_by_party: f64,
    pub s_a_final: f64,
    pub s_b_final: f64,
    pub n_a_final: usize,
    pub n_b_final: usize,
    pub k: usize,
}

impl ProtocolLedger {
    /// Alice's qubits come first, then Bob's.
    pub fn new(s: &BipartiteState) -> Result<Self> {
        let (na, nb) = s
            .qubit_counts()
            .ok_or(Error::NotQubits(s.dim_a(), s.dim_b()))?;
        let holders = std::iter::repeat_n(Party::Alice, na)
            .chain(std::iter::repeat_n(Party::Bob, nb))
            .collect();
        Ok(ProtocolLedger {
            joint: s.rho().clone(),
            holders,
            n_original: na + nb,
            k: 0,
        })
    }

    pub fn joint(&self) -> &ComplexMatrix {
        &self.joint
    }

    pub fn holders(&self) -> &[Party] {
        &self.holders
    }

    pub fn n_original(&self) -> usize {
        self.n_original
    }

    pub fn ancillas(&self) -> usize {
        self.k
    }

    pub fn qubit_count(&self) -> usize {
        self.holders.len()
    }

    pub fn qubits_of(&self, party: Party) -> Vec<usize> {
        (0..self.holders.len())
            .filter(|&q| self.holders[q] == party)
            .collect()
    }

    /// Reduced state of the listed qubits, ascending order.
    pub fn reduced(&self, qubits: &[usize]) -> ComplexMatrix {
        let dims = vec![2; self.qubit_count()];
        partial_trace_dims(&self.joint, &dims, qubits)
    }

    pub fn reduced_party(&self, party: Party) -> ComplexMatrix {
        self.reduced(&self.qubits_of(party))
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.qubit_count() {
            return Err(Error::InvalidParameter(format!(
                "qubit {q} out of range ({} live qubits)",
                self.qubit_count()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, step: &ProtocolStep) -> Result<Self> {
        let mut next = self.clone();
        match step {
            ProtocolStep::AddAncilla { party } => {
                let mut zero = ComplexMatrix::zeros(2, 2);
                zero[(0, 0)] = C64::new(1.0, 0.0);
                next.joint = self.joint.kronecker(&zero);
                next.holders.push(*party);
                next.k += 1;
            }
            ProtocolStep::LocalUnitary {
                party,
                qubits,
                unitary,
            } => {
                for &q in qubits {
                    self.check_qubit(q)?;
                    if self.holders[q] != *party {
                        return Err(Error::Locality(format!(
                            "party {party} acts on qubit {q} held by {}",
                            self.holders[q]
                        )));
                    }
                }
                let residual = unitarity_residual(unitary);
                if residual > UNITARY_TOL {
                    return Err(Error::NotUnitary(residual));
                }
                let full = embed_qubit_unitary(unitary, qubits, self.qubit_count())?;
                next.joint = &full * &self.joint * full.adjoint();
            }
            ProtocolStep::DephaseAndSend {
                qubit,
                basis,
                from,
                to,
            } => {
                self.check_qubit(*qubit)?;
                if self.holders[*qubit] != *from {
                    return Err(Error::Locality(format!(
                        "party {from} sends qubit {qubit} held by {}",
                        self.holders[*qubit]
                    )));
                }
                if basis.dim() != 2 {
                    return Err(Error::DimensionMismatch(format!(
                        "dephasing basis of dim {} for a qubit",
                        basis.dim()
                    )));
                }
                let dims = vec![2; self.qubit_count()];
                next.joint = dephase_factor(&self.joint, &dims, *qubit, basis);
                next.holders[*qubit] = *to;
            }
        }
        Ok(next)
    }

    pub fn replay<'a>(&self, steps: impl IntoIterator<Item = &'a ProtocolStep>) -> Result<Self> {
        let mut ledger = self.clone();
        for step in steps {
            ledger = ledger.apply(step)?;
        }
        Ok(ledger)
    }

    pub fn finalize(&self) -> Result<WorkResult> {
        let a = self.qubits_of(Party::Alice);
        let b = self.qubits_of(Party::Bob);
        let s_a = if a.is_empty() {
            0.0
        } else {
            entropy_unchecked(&self.reduced(&a))
        };
        let s_b = if b.is_empty() {
            0.0
        } else {
            entropy_unchecked(&self.reduced(&b))
        };
        let w_local = self.n_original as f64 - s_a - s_b;
        let w_local_by_party = (a.len() as f64 - s_a) + (b.len() as f64 - s_b) - self.k as f64;
        if (w_local - w_local_by_party).abs() > ACCOUNTING_TOL {
            return Err(Error::InvalidState(format!(
                "work accounting disagrees: {w_local} vs {w_local_by_party}"
            )));
        }
        Ok(WorkResult {
            w_local,
            w_local_by_party,
            s_a_final: s_a,
            s_b_final: s_b,
            n_a_final: a.len(),
            n_b_final: b.len(),
            k: self.k,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinScript {
    /// Measure with an ancilla, send, reset Bob's bit, send back, erase.
    CcMeasureSend,
    /// Alice dephases her whole part in a supplied basis and sends it.
    SchmidtDephase,
    /// Alice dephases her whole part computationally and sends it.
    MaxcorrDephase,
}

impl FromStr for BuiltinScript {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "cc_measure_send" => Ok(BuiltinScript::CcMeasureSend),
            "schmidt_dephase" => Ok(BuiltinScript::SchmidtDephase),
            "maxcorr_dephase" => Ok(BuiltinScript::MaxcorrDephase),
            other => Err(Error::InvalidParameter(format!("unknown script {other:?}"))),
        }
    }
}

/// Steps of a built-in protocol for `ledger`'s current holders.
///
/// `basis` applies to [`BuiltinScript::SchmidtDephase`] and spans all of
/// Alice's qubits; it defaults to the eigenbasis of her reduction.
pub fn builtin_script(
    script: BuiltinScript,
    ledger: &ProtocolLedger,
    basis: Option<&LocalBasis>,
) -> Result<Vec<ProtocolStep>> {
    let alice = ledger.qubits_of(Party::Alice);
    let bob = ledger.qubits_of(Party::Bob);
    match script {
        BuiltinScript::CcMeasureSend => {
            if alice.is_empty() || bob.is_empty() {
                return Err(Error::InvalidParameter(
                    "cc_measure_send needs qubits on both sides".into(),
                ));
            }
            let mut steps = Vec::new();
            let first_ancilla = ledger.qubit_count();
            for (i, (&a, &b)) in alice.iter().zip(&bob).enumerate() {
                let anc = first_ancilla + i;
                steps.extend([
                    ProtocolStep::AddAncilla {
                        party: Party::Alice,
                    },
                    ProtocolStep::cnot(Party::Alice, a, anc),
                    ProtocolStep::send(anc, Party::Alice, Party::Bob),
                    ProtocolStep::cnot(Party::Bob, anc, b),
                    ProtocolStep::send(anc, Party::Bob, Party::Alice),
                    ProtocolStep::cnot(Party::Alice, a, anc),
                ]);
            }
            Ok(steps)
        }
        BuiltinScript::MaxcorrDephase => Ok(alice
            .iter()
            .map(|&q| ProtocolStep::send(q, Party::Alice, Party::Bob))
            .collect()),
        BuiltinScript::SchmidtDephase => {
            let dim = 1usize << alice.len();
            let owned;
            let basis = match basis {
                Some(b) => b,
                None => {
                    owned = LocalBasis::eigenbasis(&ledger.reduced(&alice))?;
                    &owned
                }
            };
            if basis.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "basis of dim {} for Alice's {} qubits",
                    basis.dim(),
                    alice.len()
                )));
            }
            if alice.len() == 1 {
                return Ok(vec![ProtocolStep::DephaseAndSend {
                    qubit: alice[0],
                    basis: basis.clone(),
                    from: Party::Alice,
                    to: Party::Bob,
                }]);
            }
            // Rotate the basis onto the computational one, then dephase
            // qubit by qubit.
            let mut steps = vec![ProtocolStep::LocalUnitary {
                party: Party::Alice,
                qubits: alice.clone(),
                unitary: basis.matrix().adjoint(),
            }];
            steps.extend(
                alice
                    .iter()
                    .map(|&q| ProtocolStep::send(q, Party::Alice, Party::Bob)),
            );
            Ok(steps)
        }
    }
}
