//! Dense complex linear algebra and bipartite state primitives.

use std::fmt;

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::LocalBasis;
use crate::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Hermiticity and trace tolerance for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_TOL, 0)` are treated as zero.
pub const PSD_TOL: f64 = 1e-9;
/// Off-diagonal magnitude below which a matrix counts as diagonal.
pub const DIAGONAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    #[serde(rename = "A")]
    Alice,
    #[serde(rename = "B")]
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::Alice => "A",
            Party::Bob => "B",
        })
    }
}

/// Kronecker product `x ⊗ y`.
pub fn tensor_product(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    x.kronecker(y)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

/// Largest entry of `|m - m†|`.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest entry of `|u†u - I|`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

pub fn max_abs_diff(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    assert_eq!(x.shape(), y.shape());
    x.iter()
        .zip(y.iter())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let d = ComplexMatrix::from_diagonal(&DVector::from_iterator(
            n,
            self.values.iter().map(|&v| C64::new(v, 0.0)),
        ));
        &self.vectors * d * self.vectors.adjoint()
    }
}

pub fn eigh(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let residual = hermiticity_residual(m);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian(residual));
    }
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(m.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Ok(HermitianEigen { values, vectors })
}

/// Real eigenvalues of a Hermitian matrix, ascending.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let residual = hermiticity_residual(m);
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian(residual));
    }
    let mut values: Vec<f64> = hermitize(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `-Σ λ log2 λ` over a spectrum, clipping `[-PSD_TOL, 0)` to zero.
pub fn entropy_of_spectrum(values: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &v in values {
        if v < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {v:e}")));
        }
        if v > 0.0 {
            s -= v * v.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(m: &ComplexMatrix) -> Result<f64> {
    entropy_of_spectrum(&eigvals_hermitian(m)?)
}

/// Entropy of a matrix already known to be a density matrix up to rounding;
/// hermitises and clips every negative eigenvalue.
pub(crate) fn entropy_unchecked(m: &ComplexMatrix) -> f64 {
    hermitize(m)
        .symmetric_eigenvalues()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Shannon entropy in bits of a probability vector.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty".into()));
    }
    if let Some(&bad) = p.iter().find(|&&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::InvalidDistribution(format!("entry {bad}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("sums to {total}")));
    }
    Ok(p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0))
}

/// Residuals of a candidate density matrix against the validity tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityCheck {
    pub hermiticity_residual: f64,
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
}

impl DensityCheck {
    pub fn of(m: &ComplexMatrix) -> DensityCheck {
        let hermiticity_residual = hermiticity_residual(m);
        if !hermiticity_residual.is_finite() {
            return DensityCheck {
                hermiticity_residual,
                trace_residual: f64::INFINITY,
                min_eigenvalue: f64::NEG_INFINITY,
            };
        }
        let trace_residual = (m.trace() - C64::new(1.0, 0.0)).norm();
        let min_eigenvalue = hermitize(m)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        DensityCheck {
            hermiticity_residual,
            trace_residual,
            min_eigenvalue,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual <= HERMITIAN_TOL
    }

    pub fn has_unit_trace(&self) -> bool {
        self.trace_residual <= TRACE_TOL
    }

    pub fn is_psd(&self) -> bool {
        self.min_eigenvalue >= -PSD_TOL
    }

    pub fn passes(&self) -> bool {
        self.is_hermitian() && self.has_unit_trace() && self.is_psd()
    }

    fn into_result(self) -> Result<()> {
        if !self.is_hermitian() {
            Err(Error::NotHermitian(self.hermiticity_residual))
        } else if !self.has_unit_trace() {
            Err(Error::InvalidState(format!(
                "trace off by {:e}",
                self.trace_residual
            )))
        } else if !self.is_psd() {
            Err(Error::InvalidState(format!(
                "eigenvalue {:e} below -{PSD_TOL:e}",
                self.min_eigenvalue
            )))
        } else {
            Ok(())
        }
    }
}

/// A density matrix `ρ_AB` on `C^dim_a ⊗ C^dim_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    rho: ComplexMatrix,
}

impl BipartiteState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(dim_a: usize, dim_b: usize, rho: ComplexMatrix) -> Result<Self> {
        let n = dim_a * dim_b;
        if dim_a == 0 || dim_b == 0 || rho.nrows() != n || rho.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for dims {dim_a}x{dim_b}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        DensityCheck::of(&rho).into_result()?;
        Ok(BipartiteState { dim_a, dim_b, rho })
    }

    /// For outputs of maps already known to preserve validity.
    pub(crate) fn from_parts(dim_a: usize, dim_b: usize, rho: ComplexMatrix) -> Self {
        debug_assert_eq!(rho.nrows(), dim_a * dim_b);
        BipartiteState { dim_a, dim_b, rho }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self, party: Party) -> usize {
        match party {
            Party::Alice => self.dim_a,
            Party::Bob => self.dim_b,
        }
    }

    pub fn rho(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_rho(self) -> ComplexMatrix {
        self.rho
    }

    pub fn total_dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    /// Qubit counts `(n_A, n_B)` when both dimensions are powers of two.
    pub fn qubit_counts(&self) -> Option<(usize, usize)> {
        Some((qubits_in(self.dim_a)?, qubits_in(self.dim_b)?))
    }

    pub fn reduced(&self, keep: Party) -> ComplexMatrix {
        partial_trace(self, keep)
    }

    pub fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(&self.rho)
    }

    /// The same state with the subsystem roles exchanged.
    pub fn swapped(&self) -> BipartiteState {
        let (da, db) = (self.dim_a, self.dim_b);
        let perm = |i: usize| (i % db) * da + i / db;
        let n = self.total_dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(perm(i), perm(j))] = self.rho[(i, j)];
            }
        }
        BipartiteState::from_parts(db, da, out)
    }
}

/// `log2(dim)` when `dim` is a power of two (including `dim == 1`).
pub fn qubits_in(dim: usize) -> Option<usize> {
    dim.is_power_of_two().then(|| dim.trailing_zeros() as usize)
}

/// Reduction onto the kept party.
pub fn partial_trace(s: &BipartiteState, keep: Party) -> ComplexMatrix {
    let keep_idx = match keep {
        Party::Alice => 0,
        Party::Bob => 1,
    };
    partial_trace_dims(&s.rho, &[s.dim_a, s.dim_b], &[keep_idx])
}

/// Partial trace of `m` on `⊗_i C^dims[i]` keeping the factors in `keep`
/// (ascending), first factor most significant.
pub fn partial_trace_dims(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> ComplexMatrix {
    let total: usize = dims.iter().product();
    assert_eq!(m.nrows(), total, "matrix does not match factor dimensions");
    debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let dk: usize = keep.iter().map(|&i| dims[i]).product();
    let dt: usize = traced.iter().map(|&i| dims[i]).product();

    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let offsets = |factors: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for &f in factors.iter().rev() {
                    off += (idx % dims[f]) * strides[f];
                    idx /= dims[f];
                }
                off
            })
            .collect()
    };
    let kept_off = offsets(keep, dk);
    let traced_off = offsets(&traced, dt);

    ComplexMatrix::from_fn(dk, dk, |r, c| {
        traced_off
            .iter()
            .map(|&t| m[(kept_off[r] + t, kept_off[c] + t)])
            .sum()
    })
}

/// A normalised vector on `C^dim_a ⊗ C^dim_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: DVector<C64>,
}

impl PureState {
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: DVector<C64>) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || amplitudes.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims {dim_a}x{dim_b}",
                amplitudes.len()
            )));
        }
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("squared norm {norm2}")));
        }
        Ok(PureState {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn density(&self) -> BipartiteState {
        let rho = &self.amplitudes * self.amplitudes.adjoint();
        BipartiteState::from_parts(self.dim_a, self.dim_b, rho)
    }
}

/// `ψ = Σ_i a_i |e_i⟩|f_i⟩`; `e_i`, `f_i` are the leading columns of the bases.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub coefficients: Vec<f64>,
    pub basis_a: LocalBasis,
    pub basis_b: LocalBasis,
}

impl SchmidtForm {
    pub fn reconstruct(&self) -> DVector<C64> {
        let (ea, eb) = (self.basis_a.matrix(), self.basis_b.matrix());
        let mut psi = DVector::zeros(ea.nrows() * eb.nrows());
        for (i, &a) in self.coefficients.iter().enumerate() {
            psi += ea.column(i).kronecker(&eb.column(i)) * C64::new(a, 0.0);
        }
        psi
    }

    /// Squared coefficients, the spectrum of either reduction.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|a| a * a).collect()
    }
}

pub fn schmidt_decompose(psi: &PureState) -> SchmidtForm {
    let (da, db) = (psi.dim_a, psi.dim_b);
    let m = ComplexMatrix::from_fn(da, db, |a, b| psi.amplitudes[a * db + b]);
    let svd = SVD::new(m, true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let s = &svd.singular_values;

    // Descending, ties (to 1e-12) in original order.
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse((s[i] * 1e12).round() as i64));

    let cols_a: Vec<DVector<C64>> = order.iter().map(|&i| u.column(i).into_owned()).collect();
    let cols_b: Vec<DVector<C64>> = order
        .iter()
        .map(|&i| v_t.row(i).transpose().into_owned())
        .collect();
    SchmidtForm {
        coefficients: order.iter().map(|&i| s[i]).collect(),
        basis_a: LocalBasis::completing(&cols_a, da),
        basis_b: LocalBasis::completing(&cols_b, db),
    }
}

/// Whether `ρ` is diagonal in the product basis `basis_a ⊗ basis_b`.
pub fn is_cc_in_basis(s: &BipartiteState, basis_a: &LocalBasis, basis_b: &LocalBasis) -> bool {
    if basis_a.dim() != s.dim_a || basis_b.dim() != s.dim_b {
        return false;
    }
    let u = tensor_product(basis_a.matrix(), basis_b.matrix());
    let w = u.adjoint() * &s.rho * &u;
    let n = w.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || w[(i, j)].norm() <= DIAGONAL_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| c(v)),
        ))
    }

    fn singlet() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(2, 2, DVector::from_vec(vec![c(h), c(0.0), c(0.0), c(h)])).unwrap()
    }

    fn cc_pair() -> BipartiteState {
        BipartiteState::new(2, 2, diag(&[0.5, 0.0, 0.0, 0.5])).unwrap()
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
    }

    #[test]
    fn kron_identities_and_projectors() {
        assert_eq!(tensor_product(&identity(2), &identity(2)), identity(4));
        let p0 = diag(&[1.0, 0.0]);
        let p1 = diag(&[0.0, 1.0]);
        assert_eq!(tensor_product(&p0, &p1), diag(&[0.0, 1.0, 0.0, 0.0]));
        let x = tensor_product(&sigma_x(), &identity(2));
        assert!(max_abs_diff(&(&x * &x), &identity(4)) == 0.0);
    }

    #[test]
    fn reductions_of_reference_states() {
        let half = diag(&[0.5, 0.5]);
        let rho = singlet().density();
        assert!(max_abs_diff(&partial_trace(&rho, Party::Alice), &half) < 1e-15);
        assert!(max_abs_diff(&partial_trace(&cc_pair(), Party::Bob), &half) < 1e-15);

        let ra = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.7), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.3)],
        );
        let rb = diag(&[0.4, 0.6]);
        let prod = BipartiteState::new(2, 2, tensor_product(&ra, &rb)).unwrap();
        assert!(max_abs_diff(&partial_trace(&prod, Party::Alice), &ra) < 1e-15);
        assert!(max_abs_diff(&partial_trace(&prod, Party::Bob), &rb) < 1e-15);
    }

    #[test]
    fn partial_trace_three_factors() {
        let a = diag(&[0.2, 0.8]);
        let b = diag(&[1.0, 0.0, 0.0]);
        let cm = diag(&[0.5, 0.5]);
        let m = tensor_product(&tensor_product(&a, &b), &cm);
        let ac = partial_trace_dims(&m, &[2, 3, 2], &[0, 2]);
        assert!(max_abs_diff(&ac, &tensor_product(&a, &cm)) < 1e-15);
        let bb = partial_trace_dims(&m, &[2, 3, 2], &[1]);
        assert!(max_abs_diff(&bb, &b) < 1e-15);
    }

    #[test]
    fn spectra() {
        assert_eq!(
            eigvals_hermitian(&diag(&[0.5, 0.5])).unwrap(),
            vec![0.5, 0.5]
        );
        let v = eigvals_hermitian(&diag(&[0.9, 0.1])).unwrap();
        assert!((v[0] - 0.1).abs() < 1e-15 && (v[1] - 0.9).abs() < 1e-15);
        let v = eigvals_hermitian(singlet().density().rho()).unwrap();
        for (got, want) in v.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian(_))));
        assert!(matches!(eigvals_hermitian(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigh_reconstructs() {
        let m = ComplexMatrix::from_row_slice(
            3,
            3,
            &[
                c(0.5),
                C64::new(0.1, 0.05),
                C64::new(0.0, -0.2),
                C64::new(0.1, -0.05),
                c(0.3),
                c(0.02),
                C64::new(0.0, 0.2),
                c(0.02),
                c(0.2),
            ],
        );
        let e = eigh(&m).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(max_abs_diff(&e.reconstruct(), &m) < 1e-9);
    }

    #[test]
    fn entropies() {
        assert!(
            von_neumann_entropy(singlet().density().rho())
                .unwrap()
                .abs()
                < 1e-12
        );
        assert!((von_neumann_entropy(&diag(&[0.5, 0.5])).unwrap() - 1.0).abs() < 1e-15);
        // H(0.3) from an independent numpy evaluation.
        let s = von_neumann_entropy(&diag(&[0.3, 0.7])).unwrap();
        assert!((s - 0.8812908992306927).abs() < 1e-14);
        // Clipping window.
        assert!(von_neumann_entropy(&diag(&[1.0 + 5e-10, -5e-10])).unwrap() < 1e-8);
        assert!(matches!(
            von_neumann_entropy(&diag(&[1.1, -0.1])),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn shannon() {
        assert_eq!(shannon_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(shannon_entropy(&[0.5, 0.5]).unwrap(), 1.0);
        // H(0.8) from an independent numpy evaluation.
        assert!((shannon_entropy(&[0.8, 0.2]).unwrap() - 0.7219280948873623).abs() < 1e-15);
        assert!(shannon_entropy(&[1.2, -0.2]).is_err());
        assert!(shannon_entropy(&[0.5, 0.4]).is_err());
        assert!(shannon_entropy(&[]).is_err());
    }

    #[test]
    fn schmidt_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = schmidt_decompose(&singlet());
        assert!((f.coefficients[0] - h).abs() < 1e-12 && (f.coefficients[1] - h).abs() < 1e-12);

        let ket01 = PureState::new(
            2,
            2,
            DVector::from_vec(vec![c(0.0), c(1.0), c(0.0), c(0.0)]),
        )
        .unwrap();
        let f = schmidt_decompose(&ket01);
        assert!((f.coefficients[0] - 1.0).abs() < 1e-12 && f.coefficients[1].abs() < 1e-12);
        assert!((f.reconstruct() - ket01.amplitudes()).norm() < 1e-12);

        let psi = PureState::new(
            2,
            2,
            DVector::from_vec(vec![c(0.3f64.sqrt()), c(0.0), c(0.0), c(0.7f64.sqrt())]),
        )
        .unwrap();
        let f = schmidt_decompose(&psi);
        assert!((f.coefficients[0] - 0.7f64.sqrt()).abs() < 1e-12);
        assert!((f.coefficients[1] - 0.3f64.sqrt()).abs() < 1e-12);
        assert!((f.reconstruct() - psi.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn schmidt_rectangular_completes_bases() {
        // 2x3 state, Bob basis must be completed to three vectors.
        let amps = vec![c(0.5), c(0.0), c(0.5), c(0.0), C64::new(0.0, 0.5), c(0.5)];
        let psi = PureState::new(2, 3, DVector::from_vec(amps)).unwrap();
        let f = schmidt_decompose(&psi);
        assert_eq!(f.coefficients.len(), 2);
        assert_eq!(f.basis_b.dim(), 3);
        assert!((f.reconstruct() - psi.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn classically_correlated_detection() {
        let comp = LocalBasis::computational(2);
        assert!(is_cc_in_basis(&cc_pair(), &comp, &comp));
        assert!(!is_cc_in_basis(&singlet().density(), &comp, &comp));
    }

    #[test]
    fn state_validation_errors() {
        assert!(matches!(
            BipartiteState::new(2, 2, diag(&[0.5, 0.5, 0.01, 0.0])),
            Err(Error::InvalidState(_))
        ));
        assert!(matches!(
            BipartiteState::new(2, 2, diag(&[0.5, 0.5])),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            BipartiteState::new(1, 2, diag(&[1.1, -0.1])),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn swapping_subsystems() {
        let ra = diag(&[0.9, 0.1]);
        let rb = diag(&[0.2, 0.3, 0.5]);
        let s = BipartiteState::new(2, 3, tensor_product(&ra, &rb)).unwrap();
        let t = s.swapped();
        assert_eq!((t.dim_a(), t.dim_b()), (3, 2));
        assert!(max_abs_diff(t.rho(), &tensor_product(&rb, &ra)) < 1e-15);
    }
}
