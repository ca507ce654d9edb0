//! Allowed elementary operations: pure ancillas, local unitaries and
//! complete local dephasing `Σ_i P_i ρ P_i`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::qstate::{
    eigh, identity, tensor_product, unitarity_residual, BipartiteState, ComplexMatrix, Party, C64,
};
use crate::{Error, Result};

pub const UNITARY_TOL: f64 = 1e-9;

/// An orthonormal basis; column `i` of the unitary is basis vector `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBasis {
    u: ComplexMatrix,
}

impl LocalBasis {
    pub fn new(u: ComplexMatrix) -> Result<Self> {
        let residual = unitarity_residual(&u);
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary(residual));
        }
        Ok(LocalBasis { u })
    }

    pub fn computational(dim: usize) -> Self {
        LocalBasis { u: identity(dim) }
    }

    pub fn from_angles(angles: &BasisAngles) -> Self {
        let u = match angles {
            BasisAngles::Qubit { theta, phi } => qubit_basis_matrix(*theta, *phi),
            BasisAngles::Generator { dim, params } => generator_unitary(*dim, params),
        };
        LocalBasis { u }
    }

    /// Extends orthonormal `columns` to a basis of `C^dim` by Gram–Schmidt
    /// against the computational vectors.
    pub fn completing(columns: &[DVector<C64>], dim: usize) -> Self {
        let mut basis: Vec<DVector<C64>> = Vec::with_capacity(dim);
        let candidates = columns.iter().cloned().chain((0..dim).map(|i| {
            let mut e = DVector::zeros(dim);
            e[i] = C64::new(1.0, 0.0);
            e
        }));
        for mut v in candidates {
            if basis.len() == dim {
                break;
            }
            // Two passes for numerical orthogonality.
            for _ in 0..2 {
                for b in &basis {
                    let overlap = b.dotc(&v);
                    v -= b * overlap;
                }
            }
            let norm = v.norm();
            if norm > 1e-6 {
                basis.push(v / C64::new(norm, 0.0));
            }
        }
        LocalBasis {
            u: ComplexMatrix::from_columns(&basis),
        }
    }

    /// Eigenbasis of a Hermitian operator, ascending eigenvalues.
    pub fn eigenbasis(m: &ComplexMatrix) -> Result<Self> {
        Ok(LocalBasis {
            u: eigh(m)?.vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn vector(&self, i: usize) -> DVector<C64> {
        self.u.column(i).into_owned()
    }

    /// Rank-1 projector onto basis vector `i`.
    pub fn projector(&self, i: usize) -> ComplexMatrix {
        let v = self.u.column(i);
        v * v.adjoint()
    }

    /// Angles reproducing this basis' projectors, for qubit bases.
    pub fn qubit_angles(&self) -> Option<BasisAngles> {
        if self.dim() != 2 {
            return None;
        }
        let (c0, c1) = (self.u[(0, 0)], self.u[(1, 0)]);
        let theta = 2.0 * c1.norm().atan2(c0.norm());
        let phi = if c0.norm() < 1e-15 || c1.norm() < 1e-15 {
            0.0
        } else {
            c1.arg() - c0.arg()
        };
        Some(BasisAngles::Qubit { theta, phi }.normalized())
    }
}

/// Parameterisation of a [`LocalBasis`] for optimisation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisAngles {
    /// Bloch angles of the first basis vector, `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    Qubit { theta: f64, phi: f64 },
    /// `d²` real parameters of a Hermitian generator `H`, basis `exp(iH)`.
    Generator { dim: usize, params: Vec<f64> },
}

impl BasisAngles {
    pub fn parameter_count(dim: usize) -> usize {
        if dim == 2 {
            2
        } else {
            dim * dim
        }
    }

    pub fn from_params(dim: usize, params: &[f64]) -> Self {
        if dim == 2 {
            BasisAngles::Qubit {
                theta: params[0],
                phi: params[1],
            }
            .normalized()
        } else {
            BasisAngles::Generator {
                dim,
                params: params.to_vec(),
            }
        }
    }

    /// Maps qubit angles into `θ ∈ [0, π]`, `φ ∈ [0, 2π)` without changing
    /// the projectors.
    pub fn normalized(&self) -> Self {
        use std::f64::consts::{PI, TAU};
        match self {
            BasisAngles::Qubit { theta, phi } => {
                let mut t = theta.rem_euclid(TAU);
                let mut p = *phi;
                if t > PI {
                    t = TAU - t;
                    p += PI;
                }
                let mut p = p.rem_euclid(TAU);
                if p >= TAU {
                    p = 0.0;
                }
                BasisAngles::Qubit { theta: t, phi: p }
            }
            other => other.clone(),
        }
    }
}

/// Columns `(cos θ/2, e^{iφ} sin θ/2)` and `(-e^{-iφ} sin θ/2, cos θ/2)`.
pub fn qubit_basis_matrix(theta: f64, phi: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    let e = C64::from_polar(1.0, phi);
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[C64::new(c, 0.0), -e.conj() * s, e * s, C64::new(c, 0.0)],
    )
}

/// `exp(iH)` with `H` Hermitian: diagonal from `params[..dim]`, then
/// (re, im) pairs for the upper triangle in row order.
pub fn generator_unitary(dim: usize, params: &[f64]) -> ComplexMatrix {
    assert_eq!(params.len(), dim * dim, "generator needs dim² parameters");
    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = C64::new(params[i], 0.0);
    }
    let mut k = dim;
    for i in 0..dim {
        for j in i + 1..dim {
            let z = C64::new(params[k], params[k + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            k += 2;
        }
    }
    let eig = eigh(&h).expect("generator is Hermitian by construction");
    let phases = ComplexMatrix::from_diagonal(&DVector::from_iterator(
        dim,
        eig.values.iter().map(|&l| C64::from_polar(1.0, l)),
    ));
    &eig.vectors * phases * eig.vectors.adjoint()
}

fn party_factor(party: Party) -> usize {
    match party {
        Party::Alice => 0,
        Party::Bob => 1,
    }
}

/// `I ⊗ op ⊗ I` acting on factor `factor` of `⊗_i C^dims[i]`.
fn embed_factor(dims: &[usize], factor: usize, op: &ComplexMatrix) -> ComplexMatrix {
    let left: usize = dims[..factor].iter().product();
    let right: usize = dims[factor + 1..].iter().product();
    tensor_product(&tensor_product(&identity(left), op), &identity(right))
}

/// Complete dephasing of one tensor factor in `basis`.
pub fn dephase_factor(
    m: &ComplexMatrix,
    dims: &[usize],
    factor: usize,
    basis: &LocalBasis,
) -> ComplexMatrix {
    assert_eq!(dims[factor], basis.dim());
    let right: usize = dims[factor + 1..].iter().product();
    let d = dims[factor];
    let digit = |i: usize| (i / right) % d;
    let u = embed_factor(dims, factor, basis.matrix());
    let mut w = u.adjoint() * m * &u;
    let n = w.nrows();
    for i in 0..n {
        for j in 0..n {
            if digit(i) != digit(j) {
                w[(i, j)] = C64::new(0.0, 0.0);
            }
        }
    }
    &u * w * u.adjoint()
}

/// `Σ_i (P_i ⊗ I) ρ (P_i ⊗ I)` (or `I ⊗ P_i` for Bob) with rank-1 `P_i`.
pub fn dephase_local(
    s: &BipartiteState,
    party: Party,
    basis: &LocalBasis,
) -> Result<BipartiteState> {
    if basis.dim() != s.dim(party) {
        return Err(Error::DimensionMismatch(format!(
            "basis of dim {} for party {party} of dim {}",
            basis.dim(),
            s.dim(party)
        )));
    }
    let rho = dephase_factor(s.rho(), &[s.dim_a(), s.dim_b()], party_factor(party), basis);
    Ok(BipartiteState::from_parts(s.dim_a(), s.dim_b(), rho))
}

/// `ρ ← (U ⊗ I) ρ (U ⊗ I)†` (or `I ⊗ U`).
pub fn apply_local_unitary(
    s: &BipartiteState,
    party: Party,
    u: &ComplexMatrix,
) -> Result<BipartiteState> {
    if u.nrows() != s.dim(party) || u.ncols() != s.dim(party) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} unitary for party {party} of dim {}",
            u.nrows(),
            u.ncols(),
            s.dim(party)
        )));
    }
    let residual = unitarity_residual(u);
    if residual > UNITARY_TOL {
        return Err(Error::NotUnitary(residual));
    }
    let full = embed_factor(&[s.dim_a(), s.dim_b()], party_factor(party), u);
    let rho = &full * s.rho() * full.adjoint();
    Ok(BipartiteState::from_parts(s.dim_a(), s.dim_b(), rho))
}

/// Appends a `|0⟩⟨0|` ancilla of dimension `anc_dim` to `party`'s
/// subsystem, as its least significant factor.
pub fn add_ancilla(s: &BipartiteState, party: Party, anc_dim: usize) -> Result<BipartiteState> {
    if anc_dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "ancilla dimension {anc_dim} < 2"
        )));
    }
    let (da, db) = (s.dim_a(), s.dim_b());
    let (na, nb) = match party {
        Party::Alice => (da * anc_dim, db),
        Party::Bob => (da, db * anc_dim),
    };
    // Old index (a, b) maps to the new index with ancilla digit 0.
    let map = |i: usize| match party {
        Party::Alice => (i / db) * anc_dim * db + i % db,
        Party::Bob => i * anc_dim,
    };
    let n = na * nb;
    let mut rho = ComplexMatrix::zeros(n, n);
    for i in 0..da * db {
        for j in 0..da * db {
            rho[(map(i), map(j))] = s.rho()[(i, j)];
        }
    }
    Ok(BipartiteState::from_parts(na, nb, rho))
}

/// Lifts a unitary on the listed qubits (first listed most significant) to
/// `total_qubits` qubits, qubit 0 most significant.
pub fn embed_qubit_unitary(
    u: &ComplexMatrix,
    qubits: &[usize],
    total_qubits: usize,
) -> Result<ComplexMatrix> {
    let k = qubits.len();
    if u.nrows() != 1 << k || u.ncols() != 1 << k {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} unitary on {k} qubits",
            u.nrows(),
            u.ncols()
        )));
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= total_qubits {
            return Err(Error::InvalidParameter(format!(
                "qubit {q} out of range for {total_qubits} qubits"
            )));
        }
        if qubits[..i].contains(&q) {
            return Err(Error::InvalidParameter(format!("qubit {q} listed twice")));
        }
    }
    let shift = |q: usize| total_qubits - 1 - q;
    let sub_index = |x: usize| {
        qubits
            .iter()
            .fold(0usize, |acc, &q| (acc << 1) | ((x >> shift(q)) & 1))
    };
    let with_sub = |x: usize, s: usize| {
        qubits.iter().enumerate().fold(x, |acc, (i, &q)| {
            let bit = (s >> (k - 1 - i)) & 1;
            (acc & !(1 << shift(q))) | (bit << shift(q))
        })
    };
    let dim = 1usize << total_qubits;
    let mut full = ComplexMatrix::zeros(dim, dim);
    for x in 0..dim {
        let s = sub_index(x);
        for s_out in 0..1 << k {
            let amp = u[(s_out, s)];
            if amp != C64::new(0.0, 0.0) {
                full[(with_sub(x, s_out), x)] = amp;
            }
        }
    }
    Ok(full)
}

/// Two-qubit controlled-NOT, control most significant.
pub fn cnot_gate() -> ComplexMatrix {
    let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    ComplexMatrix::from_row_slice(4, 4, &[l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o])
}

/// CNOT on `total_qubits` qubits, qubit 0 most significant.
pub fn cnot(control: usize, target: usize, total_qubits: usize) -> Result<ComplexMatrix> {
    if control == target {
        return Err(Error::InvalidParameter(format!(
            "cnot control and target are both qubit {control}"
        )));
    }
    embed_qubit_unitary(&cnot_gate(), &[control, target], total_qubits)
}
