//! Small dense complex linear algebra.
//!
//! Everything here targets dimensions up to a few dozen: matrices are stored
//! row-major in a flat `Vec`, and the Hermitian eigensolver is a cyclic
//! Jacobi iteration. The module also builds the concrete operators used by the
//! figure presets (spin-1 angular momentum, Pauli matrices) and qubit states
//! from Bloch vectors.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance on `‖M − M†‖_max / ‖M‖_max` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const DEGENERACY_GAP: f64 = 1e-9;
/// Tolerance used when validating orthonormal bases and normalized states.
pub const ORTHONORMAL_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-12;

const JACOBI_REL_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 64;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Returns `v / ‖v‖`, or `None` for the zero vector.
pub fn normalized(v: &[C64]) -> Option<Vec<C64>> {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    Some(v.iter().map(|z| z / n).collect())
}

/// Square complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![C64::default(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows; rejects ragged, empty or non-finite input.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidMatrix("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidMatrix(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    /// `|v⟩⟨v|`
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let dim = columns.len();
        if dim == 0 || columns.iter().any(|col| col.len() != dim) {
            return Err(Error::InvalidMatrix("columns must form a square matrix".into()));
        }
        Ok(Self::from_fn(dim, |i, j| columns[j][i]))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        debug_assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `[A, B] = AB − BA`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// `{A, B} = AB + BA`
    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// `‖M − M†‖_max`
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let asymmetry = self.hermitian_defect();
        let tolerance = HERMITIAN_TOL * self.max_abs();
        if asymmetry > tolerance {
            return Err(Error::NotHermitian { asymmetry, tolerance });
        }
        Ok(())
    }

    /// `(M + M†)/2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn check_same_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_dim(rhs);
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C64::default() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_dim(rhs);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_dim(rhs);
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// A complete orthonormal basis, stored as the columns of a unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthonormalBasis {
    unitary: ComplexMatrix,
}

impl OrthonormalBasis {
    /// Validates that the columns of `unitary` are orthonormal within 1e-10.
    pub fn new(unitary: ComplexMatrix) -> Result<Self> {
        let defect = gram_defect(&unitary);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::InvalidBasis(format!(
                "Gram matrix deviates from identity by {defect:.3e}"
            )));
        }
        Ok(Self { unitary })
    }

    pub(crate) fn new_unchecked(unitary: ComplexMatrix) -> Self {
        Self { unitary }
    }

    pub fn standard(dim: usize) -> Self {
        Self { unitary: ComplexMatrix::identity(dim) }
    }

    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        Self::new(ComplexMatrix::from_columns(columns)?)
    }

    pub fn dim(&self) -> usize {
        self.unitary.dim()
    }

    pub fn vector(&self, n: usize) -> Vec<C64> {
        self.unitary.column(n)
    }

    pub fn vectors(&self) -> Vec<Vec<C64>> {
        (0..self.dim()).map(|n| self.vector(n)).collect()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.unitary
    }

    /// Coefficients `⟨ψ_n|v⟩` of `v` in this basis.
    pub fn coefficients(&self, v: &[C64]) -> Vec<C64> {
        self.unitary.adjoint().mul_vec(v)
    }

    /// `‖U†U − I‖_max`
    pub fn orthonormality_defect(&self) -> f64 {
        gram_defect(&self.unitary)
    }
}

fn gram_defect(u: &ComplexMatrix) -> f64 {
    let gram = &u.adjoint() * u;
    gram.max_abs_diff(&ComplexMatrix::identity(u.dim()))
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come back ascending. Each eigenvector is rotated so that its
/// largest-magnitude component (first one on ties) is real and positive, and
/// vectors inside a degenerate cluster are re-orthonormalized in index order.
pub fn eigh(m: &ComplexMatrix) -> Result<(Vec<f64>, OrthonormalBasis)> {
    m.check_hermitian()?;
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius();

    if scale > 0.0 {
        for _ in 0..JACOBI_MAX_SWEEPS {
            if off_diagonal_norm(&a) <= JACOBI_REL_TOL * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] < DEGENERACY_GAP {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(&mut vectors[start..end]);
        }
        start = end;
    }
    for vec in &mut vectors {
        fix_phase(vec);
    }

    let basis = OrthonormalBasis::new_unchecked(ComplexMatrix::from_columns(&vectors)?);
    Ok((values, basis))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Zeroes `a[p][q]` with the unitary `J = diag(1, e^{-iφ}) · R(θ)` acting on
/// the (p, q) plane, where `a[p][q] = r e^{iφ}`.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip entries already negligible against both diagonal entries.
    if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::default();
        a[(q, p)] = C64::default();
        return;
    }
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let cs = 1.0 / (1.0 + t * t).sqrt();
    let sn = t * cs;
    let conj_phase = phase.conj();
    let j_pp = C64::new(cs, 0.0);
    let j_pq = C64::new(sn, 0.0);
    let j_qp = conj_phase * (-sn);
    let j_qq = conj_phase * cs;

    let n = a.dim();
    // A ← A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    // A ← J† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = C64::default();
    a[(q, p)] = C64::default();
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V ← V J
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}

fn gram_schmidt(vectors: &mut [Vec<C64>]) {
    for i in 0..vectors.len() {
        let (done, rest) = vectors.split_at_mut(i);
        let current = &mut rest[0];
        for prev in done.iter() {
            let overlap = inner(prev, current);
            for (x, p) in current.iter_mut().zip(prev) {
                *x -= overlap * p;
            }
        }
        if let Some(unit) = normalized(current) {
            *current = unit;
        }
    }
}

fn fix_phase(v: &mut [C64]) {
    let largest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if largest == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= largest * (1.0 - 1e-12))
        .expect("non-empty vector");
    let rot = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= rot;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

/// Hermitian operator together with its spectral decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: OrthonormalBasis,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let (eigenvalues, eigenvectors) = eigh(&matrix)?;
        Ok(Self { matrix: matrix.hermitian_part(), eigenvalues, eigenvectors })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::new(ComplexMatrix::diagonal(values)).expect("real diagonal is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &OrthonormalBasis {
        &self.eigenvectors
    }

    /// `A + B`
    pub fn plus(&self, other: &Observable) -> Result<Observable> {
        check_dims(self.dim(), other.dim())?;
        Observable::new(&self.matrix + &other.matrix)
    }

    /// `A − B`
    pub fn minus(&self, other: &Observable) -> Result<Observable> {
        check_dims(self.dim(), other.dim())?;
        Observable::new(&self.matrix - &other.matrix)
    }

    /// `A + cI`
    pub fn shifted(&self, shift: f64) -> Observable {
        let m = &self.matrix + &ComplexMatrix::identity(self.dim()).scale(C64::new(shift, 0.0));
        Observable::new(m).expect("shift preserves hermiticity")
    }

    /// `max_i ‖M v_i − λ_i v_i‖₂`
    pub fn max_eigen_residual(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let v = self.eigenvectors.vector(i);
                let mv = self.matrix.mul_vec(&v);
                let r: Vec<C64> =
                    mv.iter().zip(&v).map(|(x, y)| x - y * self.eigenvalues[i]).collect();
                norm(&r)
            })
            .fold(0.0, f64::max)
    }

    /// `Σ λ_i v_i v_i†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim());
        for (i, &lambda) in self.eigenvalues.iter().enumerate() {
            let proj = ComplexMatrix::outer(&self.eigenvectors.vector(i));
            out = &out + &proj.scale(C64::new(lambda, 0.0));
        }
        out
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A pure state vector or a density matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure(Vec<C64>),
    Mixed(ComplexMatrix),
}

impl QuantumState {
    /// Pure state from a vector that must already be normalized to 1e-12.
    pub fn pure(vector: Vec<C64>) -> Result<Self> {
        if vector.is_empty() {
            return Err(Error::InvalidState("empty state vector".into()));
        }
        let n = norm(&vector);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("state norm {n} is not 1")));
        }
        Ok(Self::Pure(vector))
    }

    /// Pure state from any nonzero vector, normalized on the way in.
    pub fn pure_normalized(vector: Vec<C64>) -> Result<Self> {
        let unit = normalized(&vector)
            .ok_or_else(|| Error::InvalidState("zero state vector".into()))?;
        Ok(Self::Pure(unit))
    }

    /// Density matrix: Hermitian, unit trace, eigenvalues ≥ −1e-10.
    pub fn mixed(rho: ComplexMatrix) -> Result<Self> {
        let (values, _) = eigh(&rho)?;
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        if let Some(&min) = values.first() {
            if min < -1e-10 {
                return Err(Error::InvalidState(format!("negative eigenvalue {min}")));
            }
        }
        Ok(Self::Mixed(rho.hermitian_part()))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(v) => v.len(),
            Self::Mixed(rho) => rho.dim(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, Self::Pure(_))
    }

    pub fn vector(&self) -> Option<&[C64]> {
        match self {
            Self::Pure(v) => Some(v),
            Self::Mixed(_) => None,
        }
    }

    pub(crate) fn require_pure(&self) -> Result<&[C64]> {
        self.vector().ok_or(Error::MixedStateUnsupported)
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        match self {
            Self::Pure(v) => ComplexMatrix::outer(v),
            Self::Mixed(rho) => rho.clone(),
        }
    }

    /// `⟨M⟩` for an arbitrary (not necessarily Hermitian) operator.
    pub fn expect(&self, m: &ComplexMatrix) -> Result<C64> {
        check_dims(self.dim(), m.dim())?;
        Ok(match self {
            Self::Pure(v) => inner(v, &m.mul_vec(v)),
            Self::Mixed(rho) => {
                let n = rho.dim();
                let mut acc = C64::default();
                for i in 0..n {
                    for k in 0..n {
                        acc += rho[(i, k)] * m[(k, i)];
                    }
                }
                acc
            }
        })
    }

    /// `|⟨Ψ|x⟩|²`, or `⟨x|ρ|x⟩` for a density matrix.
    pub fn fidelity(&self, x: &[C64]) -> Result<f64> {
        check_dims(self.dim(), x.len())?;
        Ok(match self {
            Self::Pure(v) => inner(v, x).norm_sqr(),
            Self::Mixed(rho) => inner(x, &rho.mul_vec(x)).re,
        })
    }
}

/// Spin-1 angular momentum `(Lx, Ly, Lz)` in the basis `(|1⟩, |0⟩, |−1⟩)`.
pub fn spin1_operators() -> (Observable, Observable, Observable) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::default();
    let lx = ComplexMatrix::from_rows(vec![
        vec![z, c(s, 0.0), z],
        vec![c(s, 0.0), z, c(s, 0.0)],
        vec![z, c(s, 0.0), z],
    ])
    .expect("static matrix");
    let ly = ComplexMatrix::from_rows(vec![
        vec![z, c(0.0, -s), z],
        vec![c(0.0, s), z, c(0.0, -s)],
        vec![z, c(0.0, s), z],
    ])
    .expect("static matrix");
    let lz = ComplexMatrix::diagonal(&[1.0, 0.0, -1.0]);
    (
        Observable::new(lx).expect("Lx is Hermitian"),
        Observable::new(ly).expect("Ly is Hermitian"),
        Observable::new(lz).expect("Lz is Hermitian"),
    )
}

pub fn pauli_matrices() -> [ComplexMatrix; 3] {
    let z = C64::default();
    let one = c(1.0, 0.0);
    [
        ComplexMatrix::from_rows(vec![vec![z, one], vec![one, z]]).expect("static matrix"),
        ComplexMatrix::from_rows(vec![vec![z, c(0.0, -1.0)], vec![c(0.0, 1.0), z]])
            .expect("static matrix"),
        ComplexMatrix::diagonal(&[1.0, -1.0]),
    ]
}

/// `(σx, σy, σz)`
pub fn pauli_operators() -> (Observable, Observable, Observable) {
    let [x, y, z] = pauli_matrices();
    (
        Observable::new(x).expect("Pauli X is Hermitian"),
        Observable::new(y).expect("Pauli Y is Hermitian"),
        Observable::new(z).expect("Pauli Z is Hermitian"),
    )
}

/// `ρ = ½(I + r·σ)`. Returned as a pure vector when `‖r‖ ≥ 1 − 1e-10`.
pub fn qubit_state_from_bloch(r: [f64; 3]) -> Result<QuantumState> {
    let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !len.is_finite() || len > 1.0 + NORM_TOL {
        return Err(Error::BlochNormExceeded(len));
    }
    let [sx, sy, sz] = pauli_matrices();
    let mut rho = ComplexMatrix::identity(2);
    for (coef, sigma) in r.iter().zip([&sx, &sy, &sz]) {
        rho = &rho + &sigma.scale(c(*coef, 0.0));
    }
    let rho = rho.scale(c(0.5, 0.0));
    if len >= 1.0 - 1e-10 {
        let (_, vecs) = eigh(&rho)?;
        let top = normalized(&vecs.vector(1)).expect("eigenvector is nonzero");
        Ok(QuantumState::Pure(top))
    } else {
        Ok(QuantumState::Mixed(rho))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        g.hermitian_part()
    }

    #[test]
    fn eigh_diagonal() {
        let (vals, vecs) = eigh(&ComplexMatrix::diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        assert_eq!(vecs.vector(0), vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(vecs.vector(1), vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(vecs.vector(2), vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    }

    #[test]
    fn eigh_pauli_x() {
        let [sx, _, _] = pauli_matrices();
        let (vals, vecs) = eigh(&sx).unwrap();
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], 1.0, epsilon = 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = vecs.vector(0);
        let v1 = vecs.vector(1);
        assert!((v0[0] - c(s, 0.0)).norm() < 1e-14 && (v0[1] - c(-s, 0.0)).norm() < 1e-14);
        assert!((v1[0] - c(s, 0.0)).norm() < 1e-14 && (v1[1] - c(s, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in [2, 3, 6, 12, 32] {
            let m = random_hermitian(d, &mut rng);
            let obs = Observable::new(m.clone()).unwrap();
            assert!(obs.reconstruct().max_abs_diff(&m) < 1e-10, "d={d}");
            assert!(obs.max_eigen_residual() < 1e-10);
            assert!(obs.eigenvectors().orthonormality_defect() < 1e-10);
            assert!(obs.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn eigh_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_hermitian(7, &mut rng);
        let (a, va) = eigh(&m).unwrap();
        let (b, vb) = eigh(&m).unwrap();
        assert_eq!(a, b);
        assert_eq!(va, vb);
    }

    #[test]
    fn eigh_phase_convention() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = random_hermitian(5, &mut rng);
        let (_, vecs) = eigh(&m).unwrap();
        for v in vecs.vectors() {
            let largest = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let pivot = v.iter().find(|z| z.norm() >= largest * (1.0 - 1e-12)).unwrap();
            assert_eq!(pivot.im, 0.0);
            assert!(pivot.re > 0.0);
        }
    }

    #[test]
    fn eigh_handles_degenerate_spectrum() {
        // Rotate diag(1,1,2,2) by a random unitary.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(4, &mut rng);
        let (_, u) = eigh(&h).unwrap();
        let u = u.as_matrix();
        let m = &(u * &ComplexMatrix::diagonal(&[1.0, 1.0, 2.0, 2.0])) * &u.adjoint();
        let obs = Observable::new(m.clone()).unwrap();
        assert!(obs.eigenvectors().orthonormality_defect() < 1e-10);
        assert!(obs.reconstruct().max_abs_diff(&m) < 1e-10);
        assert!(obs.max_eigen_residual() < 1e-10);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn spin1_algebra() {
        let (lx, ly, lz) = spin1_operators();
        let comm = lx.matrix().commutator(ly.matrix());
        let ilz = lz.matrix().scale(c(0.0, 1.0));
        assert!(comm.max_abs_diff(&ilz) < 1e-14);
        let casimir = &(&(lx.matrix() * lx.matrix()) + &(ly.matrix() * ly.matrix()))
            + &(lz.matrix() * lz.matrix());
        assert!(casimir.max_abs_diff(&ComplexMatrix::identity(3).scale(c(2.0, 0.0))) < 1e-14);
        for (got, want) in lx.eigenvalues().iter().zip([-1.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn pauli_algebra() {
        let [x, y, z] = pauli_matrices();
        assert!((&x * &y).max_abs_diff(&z.scale(c(0.0, 1.0))) < 1e-15);
        assert_eq!(z.trace(), c(0.0, 0.0));
        for s in [&x, &y, &z] {
            assert!((s * s).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        }
        let (_, _, sz) = pauli_operators();
        assert_eq!(sz.eigenvalues(), &[-1.0, 1.0]);
    }

    #[test]
    fn bloch_states() {
        let up = qubit_state_from_bloch([0.0, 0.0, 1.0]).unwrap();
        assert!(up.is_pure());
        assert!(up.density_matrix().max_abs_diff(&ComplexMatrix::diagonal(&[1.0, 0.0])) < 1e-14);

        let mixed = qubit_state_from_bloch([0.0, 0.0, 0.0]).unwrap();
        assert!(!mixed.is_pure());
        assert!(mixed.density_matrix().max_abs_diff(&ComplexMatrix::diagonal(&[0.5, 0.5])) < 1e-15);

        for k in 0..=20 {
            let theta = std::f64::consts::PI * k as f64 / 20.0;
            let r = [
                (theta / 2.0).cos(),
                3f64.sqrt() / 2.0 * (theta / 2.0).sin(),
                0.5 * (theta / 2.0).sin(),
            ];
            assert!(qubit_state_from_bloch(r).unwrap().is_pure());
        }

        assert!(matches!(
            qubit_state_from_bloch([1.0, 0.1, 0.0]),
            Err(Error::BlochNormExceeded(_))
        ));
    }

    #[test]
    fn bloch_spectrum() {
        let r = [0.3, -0.2, 0.5];
        let len = (0.09f64 + 0.04 + 0.25).sqrt();
        let rho = qubit_state_from_bloch(r).unwrap().density_matrix();
        let (vals, _) = eigh(&rho).unwrap();
        assert_abs_diff_eq!(vals[0], (1.0 - len) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], (1.0 + len) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn pure_state_validation() {
        assert!(QuantumState::pure(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(QuantumState::pure_normalized(vec![c(0.0, 0.0)]).is_err());
        let mixed = ComplexMatrix::diagonal(&[0.7, 0.4]);
        assert!(QuantumState::mixed(mixed).is_err());
    }
}
