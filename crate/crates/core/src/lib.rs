//! Work extraction from bipartite quantum states.
//!
//! A party holding an entire `n`-qubit state `ρ` can draw `n - S(ρ)` bits of
//! work from a heat bath. Two parties restricted to local operations and
//! classical (dephasing) communication generally draw less; the gap is the
//! work deficit. This crate computes the global work, the one-way deficit
//! (by basis optimisation, with a brute-force grid oracle), the entropic
//! lower bound, closed forms for pure and maximally correlated states, and
//! replays explicit protocols built from ancillas, local unitaries and
//! dephasing channels.
//!
//! All entropies and work values are in bits (`log2`), i.e. multiples of
//! `kT ln 2`. Joint indices are Alice-major: `a * dim_b + b`.

pub mod channels;
pub mod cli;
pub mod deficit;
mod error;
pub mod optimize;
pub mod protocol;
pub mod qstate;
pub mod states;

pub use error::{Error, Result};

pub use channels::{
    add_ancilla, apply_local_unitary, cnot, dephase_local, BasisAngles, LocalBasis,
};
pub use deficit::{
    additivity_check, classical_work, deficit_lower_bound, maxcorr_deficit, one_way_deficit,
    oracle_one_way_deficit, pure_state_deficit, total_work, DeficitReport, Direction,
    OptimizerConfig,
};
pub use protocol::{builtin_script, BuiltinScript, ProtocolLedger, ProtocolStep, WorkResult};
pub use qstate::{
    eigvals_hermitian, is_cc_in_basis, partial_trace, schmidt_decompose, shannon_entropy,
    tensor_product, von_neumann_entropy, BipartiteState, ComplexMatrix, Party, PureState,
    SchmidtForm, C64,
};
