//! Generators for the state families used throughout, plus seeded random
//! states.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::channels::LocalBasis;
use crate::qstate::{
    identity, tensor_product, BipartiteState, ComplexMatrix, DensityCheck, PureState, C64,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    /// `Σ_i |ii⟩/√d`.
    MaxEntangled { d: usize },
    /// `½(|00⟩⟨00| + |11⟩⟨11|)`.
    CcPair,
    /// `Σ p_ij |i_A j_B⟩⟨i_A j_B|`, `probs[i][j] = p_ij`; bases default to
    /// computational.
    ClassicallyCorrelated {
        probs: Vec<Vec<f64>>,
        basis_a: Option<LocalBasis>,
        basis_b: Option<LocalBasis>,
    },
    /// `Σ σ_ij |ii⟩⟨jj|`.
    MaxCorrelated { sigma: ComplexMatrix },
    /// `p Φ⁺ + (1-p) Φ⁻`.
    PhiMixture { p: f64 },
    RandomMixed {
        dim_a: usize,
        dim_b: usize,
        rank: usize,
        seed: u64,
    },
    RandomPure {
        dim_a: usize,
        dim_b: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Mixed(BipartiteState),
    Pure(PureState),
}

impl Generated {
    pub fn into_state(self) -> BipartiteState {
        match self {
            Generated::Mixed(s) => s,
            Generated::Pure(p) => p.density(),
        }
    }
}

pub fn gen(spec: &FamilySpec) -> Result<Generated> {
    Ok(match spec {
        FamilySpec::MaxEntangled { d } => Generated::Pure(max_entangled(*d)?),
        FamilySpec::CcPair => Generated::Mixed(cc_pair()),
        FamilySpec::ClassicallyCorrelated {
            probs,
            basis_a,
            basis_b,
        } => Generated::Mixed(classically_correlated(
            probs,
            basis_a.as_ref(),
            basis_b.as_ref(),
        )?),
        FamilySpec::MaxCorrelated { sigma } => Generated::Mixed(max_correlated(sigma)?),
        FamilySpec::PhiMixture { p } => Generated::Mixed(phi_mixture(*p)?),
        FamilySpec::RandomMixed {
            dim_a,
            dim_b,
            rank,
            seed,
        } => Generated::Mixed(random_mixed(*dim_a, *dim_b, *rank, *seed)?),
        FamilySpec::RandomPure { dim_a, dim_b, seed } => {
            Generated::Pure(random_pure(*dim_a, *dim_b, *seed)?)
        }
    })
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn max_entangled(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension {d} < 2")));
    }
    let mut amps = DVector::zeros(d * d);
    let a = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        amps[i * d + i] = c(a);
    }
    PureState::new(d, d, amps)
}

pub fn cc_pair() -> BipartiteState {
    let mut rho = ComplexMatrix::zeros(4, 4);
    rho[(0, 0)] = c(0.5);
    rho[(3, 3)] = c(0.5);
    BipartiteState::new(2, 2, rho).expect("valid by construction")
}

fn check_probabilities<'a>(p: impl IntoIterator<Item = &'a f64>) -> Result<()> {
    let mut total = 0.0;
    for &x in p {
        if x < 0.0 || !x.is_finite() {
            return Err(Error::InvalidParameter(format!("probability {x}")));
        }
        total += x;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "probabilities sum to {total}"
        )));
    }
    Ok(())
}

pub fn classically_correlated(
    probs: &[Vec<f64>],
    basis_a: Option<&LocalBasis>,
    basis_b: Option<&LocalBasis>,
) -> Result<BipartiteState> {
    let da = probs.len();
    let db = probs.first().map_or(0, Vec::len);
    if da == 0 || db == 0 || probs.iter().any(|row| row.len() != db) {
        return Err(Error::InvalidParameter(
            "probability table must be a non-empty rectangle".into(),
        ));
    }
    check_probabilities(probs.iter().flatten())?;
    let ua = basis_a
        .cloned()
        .unwrap_or_else(|| LocalBasis::computational(da));
    let ub = basis_b
        .cloned()
        .unwrap_or_else(|| LocalBasis::computational(db));
    if ua.dim() != da || ub.dim() != db {
        return Err(Error::DimensionMismatch(format!(
            "bases of dims {}x{} for a {da}x{db} table",
            ua.dim(),
            ub.dim()
        )));
    }
    let mut rho = ComplexMatrix::zeros(da * db, da * db);
    for (i, row) in probs.iter().enumerate() {
        for (j, &p) in row.iter().enumerate() {
            if p > 0.0 {
                rho += tensor_product(&ua.projector(i), &ub.projector(j)) * c(p);
            }
        }
    }
    BipartiteState::new(da, db, rho)
}

pub fn max_correlated(sigma: &ComplexMatrix) -> Result<BipartiteState> {
    let d = sigma.nrows();
    if d < 2 || !sigma.is_square() {
        return Err(Error::InvalidParameter(format!(
            "sigma must be square of size >= 2, got {}x{}",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    let check = DensityCheck::of(sigma);
    if check.hermiticity_residual > 1e-9
        || check.trace_residual > 1e-9
        || check.min_eigenvalue < -1e-9
    {
        return Err(Error::InvalidParameter(format!(
            "sigma is not a density matrix ({check:?})"
        )));
    }
    let mut rho = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            rho[(i * d + i, j * d + j)] = sigma[(i, j)];
        }
    }
    BipartiteState::new(d, d, rho)
}

pub fn phi_mixture(p: f64) -> Result<BipartiteState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("mixing weight {p}")));
    }
    // p Φ⁺ + (1-p) Φ⁻: the cross terms carry p - (1-p).
    let coherence = 0.5 * (p - (1.0 - p));
    let mut rho = ComplexMatrix::zeros(4, 4);
    rho[(0, 0)] = c(0.5);
    rho[(3, 3)] = c(0.5);
    rho[(0, 3)] = c(coherence);
    rho[(3, 0)] = c(coherence);
    BipartiteState::new(2, 2, rho)
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// `G G† / Tr(G G†)` with `G` a `dim × rank` complex Ginibre matrix.
pub fn random_mixed(dim_a: usize, dim_b: usize, rank: usize, seed: u64) -> Result<BipartiteState> {
    let dim = dim_a * dim_b;
    if dim_a == 0 || dim_b == 0 || rank == 0 || rank > dim {
        return Err(Error::InvalidParameter(format!(
            "rank {rank} for dims {dim_a}x{dim_b}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| gaussian(&mut rng));
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    BipartiteState::new(dim_a, dim_b, w / c(tr))
}

/// Normalised complex Gaussian vector (unitarily invariant).
pub fn random_pure(dim_a: usize, dim_b: usize, seed: u64) -> Result<PureState> {
    if dim_a == 0 || dim_b == 0 {
        return Err(Error::InvalidParameter(format!("dims {dim_a}x{dim_b}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = DVector::from_fn(dim_a * dim_b, |_, _| gaussian(&mut rng));
    let norm = v.norm();
    PureState::new(dim_a, dim_b, v / c(norm))
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of `R`'s
/// diagonal divided out.
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(&mut rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut phases = identity(dim);
    for i in 0..dim {
        let d = r[(i, i)];
        phases[(i, i)] = if d.norm() > 0.0 {
            d / c(d.norm())
        } else {
            c(1.0)
        };
    }
    q * phases
}

/// Validation residuals against the density-matrix tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Validation {
    pub hermiticity_residual: f64,
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
    pub hermitian: bool,
    pub unit_trace: bool,
    pub psd: bool,
    pub pass: bool,
}

pub fn validate(rho: &ComplexMatrix) -> Validation {
    let check = DensityCheck::of(rho);
    Validation {
        hermiticity_residual: check.hermiticity_residual,
        trace_residual: check.trace_residual,
        min_eigenvalue: check.min_eigenvalue,
        hermitian: check.is_hermitian(),
        unit_trace: check.has_unit_trace(),
        psd: check.is_psd(),
        pass: check.passes(),
    }
}
