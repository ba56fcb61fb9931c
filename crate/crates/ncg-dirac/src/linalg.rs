//! Dense complex linear algebra helpers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn conj_mat(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

pub fn conj_vec(v: &CVec) -> CVec {
    v.map(|z| z.conj())
}

/// Frobenius norm.
pub fn fro(m: &CMat) -> f64 {
    m.norm()
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * cr(0.5)
}

pub fn unit_vec(dim: usize, i: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[i] = cr(1.0);
    v
}

/// Antilinear operator `v ↦ mat · conj(v)`.
#[derive(Debug, Clone)]
pub struct Antilinear {
    pub mat: CMat,
}

impl Antilinear {
    pub fn new(mat: CMat) -> Self {
        Antilinear { mat }
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        &self.mat * conj_vec(v)
    }

    /// Matrix of the composition with itself (a linear map).
    pub fn squared(&self) -> CMat {
        &self.mat * conj_mat(&self.mat)
    }

    /// Residual of being an involution.
    pub fn involution_defect(&self) -> f64 {
        let n = self.mat.nrows();
        fro(&(self.squared() - CMat::identity(n, n)))
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let se = nalgebra::SymmetricEigen::new(hermitize(m));
    let mut ev: Vec<f64> = se.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Eigenvalues of a general complex matrix via its Schur form, sorted by
/// (re, im). Falls back to a second Schur attempt with a tiny perturbation
/// if the iteration fails to converge.
pub fn general_eigenvalues(m: &CMat) -> Vec<C64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let ev = m.clone().eigenvalues().unwrap_or_else(|| {
        let n = m.nrows();
        let jitter = CMat::identity(n, n) * c(1e-300, 0.0);
        (m + jitter)
            .eigenvalues()
            .expect("complex Schur iteration failed")
    });
    let mut out: Vec<C64> = ev.iter().copied().collect();
    out.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    out
}

pub fn smallest_hermitian_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Kronecker product `a ⊗ b` (block structure follows `a`).
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s != cr(0.0) {
                for p in 0..br {
                    for q in 0..bc {
                        out[(i * br + p, j * bc + q)] = s * b[(p, q)];
                    }
                }
            }
        }
    }
    out
}
