//! Global work, the one-way work deficit and its reference values.
//!
//! The one-way deficit is the smallest entropy increase Alice can incur by
//! completely dephasing her subsystem in some basis before sending it to
//! Bob:
//!
//! ```text
//! Δ← = min_U S(Σ_k (P_k ⊗ I) ρ (P_k ⊗ I)) - S(ρ)
//! ```
//!
//! It is found by multi-start Nelder–Mead over basis parameters. A separate
//! exhaustive grid search over qubit bases serves as an oracle; it goes
//! through [`dephase_local`] and a full eigendecomposition, whereas the
//! optimiser evaluates the dephased entropy from its conditional blocks.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{
    dephase_local, generator_unitary, qubit_basis_matrix, BasisAngles, LocalBasis,
};
use crate::optimize::{nelder_mead, Minimum, SimplexOptions};
use crate::qstate::{
    entropy_unchecked, partial_trace, qubits_in, schmidt_decompose, von_neumann_entropy,
    BipartiteState, ComplexMatrix, Party, PureState, C64,
};
use crate::{Error, Result};

/// Largest total dimension accepted by the optimiser.
pub const MAX_TOTAL_DIM: usize = 64;
/// Off-pattern tolerance for the maximally correlated form.
pub const MAXCORR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub f_tol: f64,
    pub x_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 32,
            max_iters: 2000,
            f_tol: 1e-10,
            x_tol: 1e-8,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        OptimizerConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidParameter("restarts must be >= 1".into()));
        }
        if !(self.f_tol > 0.0 && self.x_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "tolerances must be positive".into(),
            ));
        }
        Ok(())
    }

    fn simplex_options(&self) -> SimplexOptions {
        SimplexOptions {
            max_iters: self.max_iters,
            f_tol: self.f_tol,
            x_tol: self.x_tol,
            ..SimplexOptions::default()
        }
    }
}

/// Random generator for one restart: the config seed selects the key, the
/// restart index selects the ChaCha stream. Restarts are therefore
/// reproducible independently of scheduling.
pub fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn starting_point(seed: u64, restart: usize, dim: usize) -> Vec<f64> {
    let mut rng = restart_rng(seed, restart);
    if dim == 2 {
        vec![rng.random_range(0.0..=PI), rng.random_range(0.0..TAU)]
    } else {
        (0..dim * dim).map(|_| rng.random_range(-PI..PI)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Alice dephases and sends her subsystem to Bob.
    #[default]
    AliceToBob,
    BobToAlice,
}

impl Direction {
    pub fn sender(self) -> Party {
        match self {
            Direction::AliceToBob => Party::Alice,
            Direction::BobToAlice => Party::Bob,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Pure,
    MaxCorrelated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub family: Family,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerDiagnostics {
    pub restarts: usize,
    pub winning_restart: usize,
    /// Nelder–Mead iterations of the winning restart.
    pub iterations: usize,
    pub evaluations: usize,
    pub converged_restarts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficitReport {
    /// Qubit count, when both subsystems are qubit registers.
    pub n: Option<usize>,
    pub w_total: Option<f64>,
    pub s_a: f64,
    pub s_b: f64,
    pub s_total: f64,
    pub delta_one_way: f64,
    pub lower_bound: f64,
    pub direction: Direction,
    /// Basis of the sending party attaining `delta_one_way`.
    pub best_basis: BasisAngles,
    pub closed_form: Option<ClosedForm>,
    pub diagnostics: OptimizerDiagnostics,
}

impl DeficitReport {
    pub fn best_local_basis(&self) -> LocalBasis {
        LocalBasis::from_angles(&self.best_basis)
    }

    /// Work left for the parties after the one-way protocol, `W_t - Δ←`.
    pub fn w_local(&self) -> Option<f64> {
        self.w_total.map(|w| w - self.delta_one_way)
    }
}

/// `n - S(ρ)`, the work available to a holder of the whole state.
pub fn total_work(s: &BipartiteState) -> Result<f64> {
    let (na, nb) = s
        .qubit_counts()
        .ok_or(Error::NotQubits(s.dim_a(), s.dim_b()))?;
    Ok((na + nb) as f64 - entropy_unchecked(s.rho()))
}

/// `n - H(X)` for a distribution over `n`-bit strings.
pub fn classical_work(p: &[f64]) -> Result<f64> {
    let n = qubits_in(p.len()).ok_or_else(|| {
        Error::InvalidDistribution(format!("{} outcomes is not a power of two", p.len()))
    })?;
    Ok(n as f64 - crate::qstate::shannon_entropy(p)?)
}

/// `max{S(ρ_A), S(ρ_B)} - S(ρ)`.
pub fn deficit_lower_bound(s: &BipartiteState) -> f64 {
    let s_a = entropy_unchecked(&partial_trace(s, Party::Alice));
    let s_b = entropy_unchecked(&partial_trace(s, Party::Bob));
    s_a.max(s_b) - entropy_unchecked(s.rho())
}

/// Entropy of the squared Schmidt coefficients.
pub fn pure_state_deficit(psi: &PureState) -> f64 {
    schmidt_decompose(psi)
        .weights()
        .into_iter()
        .filter(|&w| w > 0.0)
        .map(|w| -w * w.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Largest entry outside the `|ii⟩⟨jj|` pattern, or `None` if the
/// subsystems differ in dimension.
pub fn maxcorr_residual(s: &BipartiteState) -> Option<f64> {
    let d = s.dim_a();
    if s.dim_b() != d {
        return None;
    }
    let on_pattern = |i: usize| i / d == i % d;
    let rho = s.rho();
    let mut worst = 0.0f64;
    for i in 0..d * d {
        for j in 0..d * d {
            if !(on_pattern(i) && on_pattern(j)) {
                worst = worst.max(rho[(i, j)].norm());
            }
        }
    }
    Some(worst)
}

/// `S(ρ_A) - S(ρ)` for states `Σ σ_ij |ii⟩⟨jj|`.
pub fn maxcorr_deficit(s: &BipartiteState) -> Result<f64> {
    match maxcorr_residual(s) {
        None => Err(Error::NotMaxCorrelated(f64::INFINITY)),
        Some(r) if r > MAXCORR_TOL => Err(Error::NotMaxCorrelated(r)),
        Some(_) => {
            Ok(entropy_unchecked(&partial_trace(s, Party::Alice)) - entropy_unchecked(s.rho()))
        }
    }
}

fn purity(s: &BipartiteState) -> f64 {
    let rho = s.rho();
    (rho * rho).trace().re
}

/// Reference value when the state belongs to a family with a known deficit.
pub fn closed_form(s: &BipartiteState) -> Option<ClosedForm> {
    if (purity(s) - 1.0).abs() <= 1e-9 {
        let psi = dominant_pure_state(s).ok()?;
        return Some(ClosedForm {
            family: Family::Pure,
            value: pure_state_deficit(&psi),
        });
    }
    maxcorr_deficit(s).ok().map(|value| ClosedForm {
        family: Family::MaxCorrelated,
        value,
    })
}

/// The eigenvector of the largest eigenvalue, for states that are pure.
pub fn dominant_pure_state(s: &BipartiteState) -> Result<PureState> {
    let p = purity(s);
    if (p - 1.0).abs() > 1e-9 {
        return Err(Error::NotPure(p));
    }
    let eig = crate::qstate::eigh(s.rho())?;
    let v = eig.vectors.column(eig.values.len() - 1).into_owned();
    let v = &v / C64::new(v.norm(), 0.0);
    PureState::new(s.dim_a(), s.dim_b(), v)
}

/// Entropy after complete dephasing of Alice's factor, computed blockwise:
/// in the basis `{u_k}` the dephased state is `⊕_k |u_k⟩⟨u_k| ⊗ B_k` with
/// `B_k = (u_k† ⊗ I) ρ (u_k ⊗ I)`.
struct DephasedEntropy<'a> {
    rho: &'a ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
}

impl<'a> DephasedEntropy<'a> {
    fn new(s: &'a BipartiteState) -> Self {
        DephasedEntropy {
            rho: s.rho(),
            dim_a: s.dim_a(),
            dim_b: s.dim_b(),
        }
    }

    fn at_params(&self, params: &[f64]) -> f64 {
        let u = if self.dim_a == 2 {
            qubit_basis_matrix(params[0], params[1])
        } else {
            generator_unitary(self.dim_a, params)
        };
        self.at_basis(&u)
    }

    fn at_basis(&self, u: &ComplexMatrix) -> f64 {
        let (da, db) = (self.dim_a, self.dim_b);
        let n = da * db;
        let mut partial = vec![C64::new(0.0, 0.0); n * db];
        let mut block = ComplexMatrix::zeros(db, db);
        let mut total = 0.0;
        for k in 0..da {
            // partial[(a, b), b'] = Σ_a' ρ[(a, b), (a', b')] u[a', k]
            for row in 0..n {
                for bp in 0..db {
                    let mut acc = C64::new(0.0, 0.0);
                    for ap in 0..da {
                        acc += self.rho[(row, ap * db + bp)] * u[(ap, k)];
                    }
                    partial[row * db + bp] = acc;
                }
            }
            for b in 0..db {
                for bp in 0..db {
                    let mut acc = C64::new(0.0, 0.0);
                    for a in 0..da {
                        acc += u[(a, k)].conj() * partial[(a * db + b) * db + bp];
                    }
                    block[(b, bp)] = acc;
                }
            }
            total += block_entropy(&block);
        }
        total
    }
}

/// `-Σ λ log2 λ` over the eigenvalues of an unnormalised Hermitian block.
fn block_entropy(block: &ComplexMatrix) -> f64 {
    let term = |v: f64| if v > 0.0 { -v * v.log2() } else { 0.0 };
    match block.nrows() {
        1 => term(block[(0, 0)].re),
        2 => {
            let (a, d) = (block[(0, 0)].re, block[(1, 1)].re);
            let z = (block[(0, 1)] + block[(1, 0)].conj()) * 0.5;
            let mean = 0.5 * (a + d);
            let r = (0.25 * (a - d) * (a - d) + z.norm_sqr()).sqrt();
            term(mean + r) + term(mean - r)
        }
        _ => {
            let h = (block + block.adjoint()).scale(0.5);
            h.symmetric_eigenvalues().iter().map(|&v| term(v)).sum()
        }
    }
}

/// One-way deficit with Alice sending.
pub fn one_way_deficit(s: &BipartiteState, cfg: &OptimizerConfig) -> Result<DeficitReport> {
    one_way_deficit_directed(s, cfg, Direction::AliceToBob)
}

pub fn one_way_deficit_directed(
    s: &BipartiteState,
    cfg: &OptimizerConfig,
    direction: Direction,
) -> Result<DeficitReport> {
    cfg.validate()?;
    let oriented = match direction {
        Direction::AliceToBob => s.clone(),
        Direction::BobToAlice => s.swapped(),
    };
    let dim = oriented.dim_a();
    if !(2..=4).contains(&dim) {
        return Err(Error::Unsupported(format!(
            "sender dimension {dim} (supported: 2, 3, 4)"
        )));
    }
    if oriented.total_dim() > MAX_TOTAL_DIM {
        return Err(Error::Unsupported(format!(
            "total dimension {} exceeds {MAX_TOTAL_DIM}",
            oriented.total_dim()
        )));
    }

    let s_total = entropy_unchecked(s.rho());
    let s_a = entropy_unchecked(&partial_trace(s, Party::Alice));
    let s_b = entropy_unchecked(&partial_trace(s, Party::Bob));

    let objective = DephasedEntropy::new(&oriented);
    let opts = cfg.simplex_options();
    let runs: Vec<Minimum> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let x0 = starting_point(cfg.seed, r, dim);
            nelder_mead(|x| objective.at_params(x), &x0, &opts)
        })
        .collect();

    // Lowest value wins; ties go to the lowest restart index.
    let (winner, best) = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .expect("at least one restart");

    let n = s.qubit_counts().map(|(na, nb)| na + nb);
    Ok(DeficitReport {
        n,
        w_total: n.map(|n| n as f64 - s_total),
        s_a,
        s_b,
        s_total,
        delta_one_way: best.value - s_total,
        lower_bound: s_a.max(s_b) - s_total,
        direction,
        best_basis: BasisAngles::from_params(dim, &best.x),
        closed_form: closed_form(s),
        diagnostics: OptimizerDiagnostics {
            restarts: cfg.restarts,
            winning_restart: winner,
            iterations: best.iterations,
            evaluations: runs.iter().map(|m| m.evaluations).sum(),
            converged_restarts: runs.iter().filter(|m| m.converged).count(),
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleMinimum {
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
}

/// Grid values within this of the incumbent do not replace it, so the
/// earliest grid point wins near-ties.
const ORACLE_TIE_TOL: f64 = 1e-12;

/// Exhaustive minimum over `θ_i = π i/(grid_theta-1)`, `φ_j = 2π j/grid_phi`,
/// each point evaluated as `S(dephase_local(ρ)) - S(ρ)`.
pub fn oracle_one_way_deficit(
    s: &BipartiteState,
    grid_theta: usize,
    grid_phi: usize,
) -> Result<OracleMinimum> {
    if s.dim_a() != 2 {
        return Err(Error::Unsupported(format!(
            "grid oracle needs a qubit on Alice's side, got dimension {}",
            s.dim_a()
        )));
    }
    if grid_theta == 0 || grid_phi == 0 {
        return Err(Error::InvalidParameter("empty grid".into()));
    }
    let s_rho = von_neumann_entropy(s.rho())?;
    let theta_at = |i: usize| {
        if grid_theta == 1 {
            0.0
        } else {
            PI * i as f64 / (grid_theta - 1) as f64
        }
    };
    let phi_at = |j: usize| TAU * j as f64 / grid_phi as f64;

    let rows: Vec<Result<Vec<f64>>> = (0..grid_theta)
        .into_par_iter()
        .map(|i| {
            (0..grid_phi)
                .map(|j| {
                    let basis = LocalBasis::from_angles(&BasisAngles::Qubit {
                        theta: theta_at(i),
                        phi: phi_at(j),
                    });
                    let out = dephase_local(s, Party::Alice, &basis)?;
                    Ok(von_neumann_entropy(out.rho())? - s_rho)
                })
                .collect()
        })
        .collect();

    let mut best = OracleMinimum {
        value: f64::INFINITY,
        theta: 0.0,
        phi: 0.0,
    };
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row?.into_iter().enumerate() {
            if v < best.value - ORACLE_TIE_TOL {
                best = OracleMinimum {
                    value: v,
                    theta: theta_at(i),
                    phi: phi_at(j),
                };
            }
        }
    }
    Ok(best)
}

/// Two copies with Alice holding both of her halves: factor order
/// `(A1, A2, B1, B2)`.
pub fn two_copies(s: &BipartiteState) -> BipartiteState {
    let (da, db) = (s.dim_a(), s.dim_b());
    let n = da * db;
    let big = n * n;
    // (a1, a2, b1, b2) -> index into ρ ⊗ ρ ordered (a1, b1, a2, b2)
    let source = |i: usize| {
        let b2 = i % db;
        let b1 = (i / db) % db;
        let a2 = (i / (db * db)) % da;
        let a1 = i / (db * db * da);
        (a1 * db + b1, a2 * db + b2)
    };
    let rho = s.rho();
    let mut out = ComplexMatrix::zeros(big, big);
    for i in 0..big {
        let (ri1, ri2) = source(i);
        for j in 0..big {
            let (rj1, rj2) = source(j);
            out[(i, j)] = rho[(ri1, rj1)] * rho[(ri2, rj2)];
        }
    }
    BipartiteState::from_parts(da * da, db * db, out)
}

/// `(Δ←(ρ), Δ←(ρ ⊗ ρ))` with the two-copy sender holding both halves.
pub fn additivity_check(s: &BipartiteState, cfg: &OptimizerConfig) -> Result<(f64, f64)> {
    if s.total_dim() > 4 || s.dim_a() < 2 {
        return Err(Error::Unsupported(format!(
            "additivity check needs a state of total dimension <= 4 with a non-trivial sender, got {}x{}",
            s.dim_a(),
            s.dim_b()
        )));
    }
    let single = one_way_deficit(s, cfg)?.delta_one_way;
    let double = one_way_deficit(&two_copies(s), cfg)?.delta_one_way;
    Ok((single, double))
}
