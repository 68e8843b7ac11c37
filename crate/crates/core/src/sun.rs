//! SU(N) generators in the Cartan / ladder basis, decomposition of a diagonal
//! potential operator, and the commutator identities linking the two.
//!
//! The infinitesimal transformation parameters of the field multiplet (the
//! overall phase `a`, the Cartan angles `δθ_k` and the ladder angles
//! `δθ_{i,j}`, `δφ_{i,j}`) appear only in the derivation of the continuity
//! equations; nothing here represents them at runtime.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::{Error, Result, C64};

pub type CMatrix = DMatrix<C64>;

/// Ladder pair `(λ1, λ2)` built from the elementary matrix `E[i,j]`
/// (1-based, `i < j`).
#[derive(Debug, Clone)]
pub struct LadderPair {
    pub i: usize,
    pub j: usize,
    pub lambda1: CMatrix,
    pub lambda2: CMatrix,
}

/// The `N² − 1` generators of SU(N).
#[derive(Debug, Clone)]
pub struct SunBasis {
    n: usize,
    cartan: Vec<CMatrix>,
    ladders: Vec<LadderPair>,
}

impl SunBasis {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `D_1 … D_{N−1}`.
    pub fn cartan(&self) -> &[CMatrix] {
        &self.cartan
    }

    /// Ladder pairs ordered lexicographically by `(i, j)`.
    pub fn ladders(&self) -> &[LadderPair] {
        &self.ladders
    }

    pub fn ladder(&self, i: usize, j: usize) -> Result<&LadderPair> {
        check_pair(self.n, i, j)?;
        Ok(self
            .ladders
            .iter()
            .find(|p| p.i == i && p.j == j)
            .expect("every pair is built"))
    }

    /// Every generator, Cartan first, then `λ1, λ2` per pair.
    pub fn generators(&self) -> Vec<&CMatrix> {
        self.cartan
            .iter()
            .chain(self.ladders.iter().flat_map(|p| [&p.lambda1, &p.lambda2]))
            .collect()
    }

    /// `Σ c_k D_k`.
    pub fn cartan_combination(&self, c: &[f64]) -> CMatrix {
        let mut o = CMatrix::zeros(self.n, self.n);
        for (d, &ck) in self.cartan.iter().zip(c) {
            o += d * C64::new(ck, 0.0);
        }
        o
    }
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i < 1 || i >= j || j > n {
        return Err(Error::InvalidArgument(format!(
            "ladder indices need 1 <= i < j <= {n}, got ({i}, {j})"
        )));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "SU(N) needs N >= 2, got {n}"
        )));
    }
    Ok(())
}

/// Cartan generator `D_k = √(2/(k(k+1))) diag(1, …, 1, −k, 0, …, 0)`.
pub fn cartan_generator(n: usize, k: usize) -> CMatrix {
    let s = (2.0 / (k * (k + 1)) as f64).sqrt();
    let mut d = CMatrix::zeros(n, n);
    for m in 0..k {
        d[(m, m)] = C64::new(s, 0.0);
    }
    d[(k, k)] = C64::new(-(k as f64) * s, 0.0);
    d
}

pub fn build_basis(n: usize) -> Result<SunBasis> {
    check_n(n)?;
    let cartan = (1..n).map(|k| cartan_generator(n, k)).collect();
    let mut ladders = Vec::with_capacity(pair_count(n));
    for i in 1..=n {
        for j in i + 1..=n {
            let mut e = CMatrix::zeros(n, n);
            e[(i - 1, j - 1)] = C64::new(1.0, 0.0);
            let ed = e.adjoint();
            let lambda1 = &e + &ed;
            let lambda2 = (&e - &ed) * C64::i();
            ladders.push(LadderPair {
                i,
                j,
                lambda1,
                lambda2,
            });
        }
    }
    Ok(SunBasis { n, cartan, ladders })
}

/// `N(N−1)/2`.
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Split of `diag(V_1 … V_N)` into an identity part and a Cartan part.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionResult {
    /// `(1/N) Σ V_i`.
    pub mean_coefficient: f64,
    /// Projection coefficients `c_k = ½ Tr(M D_k)`, `M = diag(V̄ − V_i)`.
    pub c: Vec<f64>,
    /// `√((k+1)/(2k)) [V_{k+1} − Σ_{i≤k+1} V_i]`, literally.
    pub printed_c: Vec<f64>,
    /// Max-norm of `Σ c_k D_k − M`.
    pub reconstruction_error: f64,
}

/// The literal sum formula, and the same formula with the sum read as the
/// average `(1/(k+1)) Σ_{i≤k+1} V_i`.
fn printed_coefficients(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (1..values.len())
        .map(|k| {
            let pre = ((k + 1) as f64 / (2 * k) as f64).sqrt();
            let sum: f64 = values[..=k].iter().sum();
            (
                pre * (values[k] - sum),
                pre * (values[k] - sum / (k + 1) as f64),
            )
        })
        .unzip()
}

pub fn difference_operator(values: &[f64]) -> CMatrix {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        values.iter().map(|v| C64::new(mean - v, 0.0)),
    ))
}

pub fn decompose(values: &[f64]) -> Result<DecompositionResult> {
    let n = values.len();
    check_n(n)?;
    let basis = build_basis(n)?;
    decompose_in(&basis, values)
}

/// [`decompose`] against a prebuilt basis.
pub fn decompose_in(basis: &SunBasis, values: &[f64]) -> Result<DecompositionResult> {
    let n = values.len();
    if n != basis.n {
        return Err(Error::InvalidArgument(format!(
            "{n} potentials for an SU({}) basis",
            basis.n
        )));
    }
    let mean_coefficient = values.iter().sum::<f64>() / n as f64;
    let m = difference_operator(values);
    let c: Vec<f64> = basis
        .cartan
        .iter()
        .map(|d| 0.5 * (&m * d).trace().re)
        .collect();
    let reconstruction_error = max_norm(&(basis.cartan_combination(&c) - &m));
    Ok(DecompositionResult {
        mean_coefficient,
        c,
        printed_c: printed_coefficients(values).0,
        reconstruction_error,
    })
}

pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Residuals of `[O, λ1] = i(V_i − V_j) λ2` and `[O, λ2] = −i(V_i − V_j) λ1`
/// with `O = Σ c_k D_k` from the projection coefficients.
pub fn commutator_check(values: &[f64], i: usize, j: usize) -> Result<(f64, f64)> {
    let n = values.len();
    check_n(n)?;
    check_pair(n, i, j)?;
    let basis = build_basis(n)?;
    commutator_check_in(&basis, values, i, j)
}

/// [`commutator_check`] against a prebuilt basis.
pub fn commutator_check_in(
    basis: &SunBasis,
    values: &[f64],
    i: usize,
    j: usize,
) -> Result<(f64, f64)> {
    let dec = decompose_in(basis, values)?;
    let o = basis.cartan_combination(&dec.c);
    let pair = basis.ladder(i, j)?;
    let dv = C64::new(0.0, values[i - 1] - values[j - 1]);
    let err1 = max_norm(&(commutator(&o, &pair.lambda1) - &pair.lambda2 * dv));
    let err2 = max_norm(&(commutator(&o, &pair.lambda2) + &pair.lambda1 * dv));
    Ok((err1, err2))
}

/// One row of the projection-versus-printed coefficient comparison.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientRow {
    pub k: usize,
    pub projection: f64,
    pub printed: f64,
    pub printed_as_average: f64,
    pub printed_agrees: bool,
    pub average_agrees: bool,
}

/// Compares the projection coefficients against the literal sum formula and
/// its averaged reading, row by row.
pub fn coefficient_table(values: &[f64], tol: f64) -> Result<Vec<CoefficientRow>> {
    let dec = decompose(values)?;
    let (_, averaged) = printed_coefficients(values);
    Ok(dec
        .c
        .iter()
        .zip(&dec.printed_c)
        .zip(averaged)
        .enumerate()
        .map(
            |(idx, ((&projection, &printed), printed_as_average))| CoefficientRow {
                k: idx + 1,
                projection,
                printed,
                printed_as_average,
                printed_agrees: (projection - printed).abs() <= tol,
                average_agrees: (projection - printed_as_average).abs() <= tol,
            },
        )
        .collect())
}
