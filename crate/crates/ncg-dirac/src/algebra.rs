//! Finite-dimensional unital *-algebras with a distinguished linear
//! functional.
//!
//! An [`Algebra`] stores structure constants `eᵢeⱼ = Σₖ c[i][j][k] eₖ` as
//! left/right multiplication matrices, the unit and the antilinear star.
//! Construction validates associativity, the unit and the star axioms
//! eagerly; invalid structure constants are rejected rather than deferred.
//! Elements are plain coefficient vectors over the chosen basis.

use crate::check::{CheckResult, Error, Result};
use crate::linalg::{conj_mat, cr, fro, unit_vec, CMat, CVec, C64};

#[derive(Debug, Clone)]
pub struct Algebra {
    dim: usize,
    basis_labels: Vec<String>,
    /// `left_mats[i]`: matrix of `x ↦ eᵢ·x`.
    left_mats: Vec<CMat>,
    /// `right_mats[i]`: matrix of `x ↦ x·eᵢ`.
    right_mats: Vec<CMat>,
    unit: CVec,
    /// `a* = star_mat · conj(a)`.
    star_mat: CMat,
}

const BUILD_TOL: f64 = 1e-12;

impl Algebra {
    /// Build and validate an algebra from structure constants
    /// `structure[i][j]` = coefficient vector of `eᵢeⱼ`.
    pub fn from_structure(
        basis_labels: Vec<String>,
        structure: &[Vec<CVec>],
        unit: CVec,
        star_mat: CMat,
    ) -> Result<Self> {
        let dim = basis_labels.len();
        if dim == 0 {
            return Err(Error::InvalidModel("algebra must have dimension ≥ 1".into()));
        }
        {
            let mut sorted = basis_labels.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != dim {
                return Err(Error::InvalidModel("duplicate basis labels".into()));
            }
        }
        if structure.len() != dim || structure.iter().any(|row| row.len() != dim) {
            return Err(Error::Dimension("structure constant table shape".into()));
        }
        let mut left_mats = vec![CMat::zeros(dim, dim); dim];
        let mut right_mats = vec![CMat::zeros(dim, dim); dim];
        for i in 0..dim {
            for j in 0..dim {
                let prod = &structure[i][j];
                if prod.len() != dim {
                    return Err(Error::Dimension("structure constant vector length".into()));
                }
                for k in 0..dim {
                    left_mats[i][(k, j)] = prod[k];
                    right_mats[j][(k, i)] = prod[k];
                }
            }
        }
        let alg = Algebra {
            dim,
            basis_labels,
            left_mats,
            right_mats,
            unit,
            star_mat,
        };
        alg.validate()?;
        Ok(alg)
    }

    fn validate(&self) -> Result<()> {
        let dim = self.dim;
        // (eᵢeⱼ)x = eᵢ(eⱼx) for all x, i.e. L(eᵢeⱼ) = LᵢLⱼ.
        let mut assoc: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let prod = self.mul(&self.basis_element(i), &self.basis_element(j));
                assoc = assoc.max(fro(&(self.left_mult(&prod) - &self.left_mats[i] * &self.left_mats[j])));
                assoc = assoc.max(fro(&(self.right_mult(&prod) - &self.right_mats[j] * &self.right_mats[i])));
            }
        }
        if assoc > BUILD_TOL {
            return Err(Error::InvalidModel(format!(
                "structure constants not associative (residual {assoc:.3e})"
            )));
        }
        let id = CMat::identity(dim, dim);
        let unit_res = fro(&(self.left_mult(&self.unit) - &id)).max(fro(&(self.right_mult(&self.unit) - &id)));
        if unit_res > BUILD_TOL {
            return Err(Error::InvalidModel(format!(
                "unit is not a two-sided identity (residual {unit_res:.3e})"
            )));
        }
        // star: antilinear involution, (ab)* = b*a*.
        let invol = fro(&(&self.star_mat * conj_mat(&self.star_mat) - &id));
        if invol > BUILD_TOL {
            return Err(Error::InvalidModel(format!(
                "star does not square to the identity (residual {invol:.3e})"
            )));
        }
        let mut antihom: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let lhs = self.star(&self.mul(&self.basis_element(i), &self.basis_element(j)));
                let rhs = self.mul(&self.star(&self.basis_element(j)), &self.star(&self.basis_element(i)));
                antihom = antihom.max((lhs - rhs).norm());
            }
        }
        if antihom > BUILD_TOL {
            return Err(Error::InvalidModel(format!(
                "star is not an anti-homomorphism (residual {antihom:.3e})"
            )));
        }
        Ok(())
    }

    /// Commutative algebra of complex functions on a finite set, with the
    /// idempotent basis `δ_x`.
    pub fn functions(vertices: &[String]) -> Result<Self> {
        let dim = vertices.len();
        if dim == 0 {
            return Err(Error::InvalidModel("vertex set must be nonempty".into()));
        }
        let mut structure = vec![vec![CVec::zeros(dim); dim]; dim];
        for i in 0..dim {
            for (j, row) in structure.iter_mut().enumerate() {
                if i == j {
                    row[i] = unit_vec(dim, i);
                }
            }
        }
        let unit = CVec::from_element(dim, cr(1.0));
        Algebra::from_structure(vertices.to_vec(), &structure, unit, CMat::identity(dim, dim))
    }

    /// Matrix algebra `Mₙ(ℂ)` with the matrix-unit basis `E_{ij}` (row-major
    /// index `i·n + j`), star = Hermitian conjugation.
    pub fn matrix_units(n: usize) -> Self {
        assert!(n >= 1, "matrix algebra needs n ≥ 1");
        let dim = n * n;
        let idx = |i: usize, j: usize| i * n + j;
        let mut labels = Vec::with_capacity(dim);
        for i in 0..n {
            for j in 0..n {
                labels.push(format!("E{}{}", i + 1, j + 1));
            }
        }
        let mut structure = vec![vec![CVec::zeros(dim); dim]; dim];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        if j == k {
                            structure[idx(i, j)][idx(k, l)] = unit_vec(dim, idx(i, l));
                        }
                    }
                }
            }
        }
        let mut unit = CVec::zeros(dim);
        for i in 0..n {
            unit[idx(i, i)] = cr(1.0);
        }
        let mut star = CMat::zeros(dim, dim);
        for i in 0..n {
            for j in 0..n {
                star[(idx(j, i), idx(i, j))] = cr(1.0);
            }
        }
        Algebra::from_structure(labels, &structure, unit, star).expect("matrix units are associative")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis_labels(&self) -> &[String] {
        &self.basis_labels
    }

    pub fn unit(&self) -> &CVec {
        &self.unit
    }

    pub fn star_matrix(&self) -> &CMat {
        &self.star_mat
    }

    pub fn basis_element(&self, i: usize) -> CVec {
        unit_vec(self.dim, i)
    }

    pub fn left_mult(&self, a: &CVec) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            if a[i] != cr(0.0) {
                m += &self.left_mats[i] * a[i];
            }
        }
        m
    }

    pub fn right_mult(&self, a: &CVec) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            if a[i] != cr(0.0) {
                m += &self.right_mats[i] * a[i];
            }
        }
        m
    }

    pub fn mul(&self, a: &CVec, b: &CVec) -> CVec {
        assert_eq!(a.len(), self.dim, "element length");
        assert_eq!(b.len(), self.dim, "element length");
        self.left_mult(a) * b
    }

    pub fn star(&self, a: &CVec) -> CVec {
        assert_eq!(a.len(), self.dim, "element length");
        &self.star_mat * a.map(|z| z.conj())
    }

    pub fn commutator(&self, a: &CVec, b: &CVec) -> CVec {
        self.mul(a, b) - self.mul(b, a)
    }
}

/// Linear functional `∫a = Σᵢ wᵢ aᵢ`.
#[derive(Debug, Clone)]
pub struct Functional {
    weights: CVec,
}

impl Functional {
    pub fn new(weights: CVec) -> Self {
        Functional { weights }
    }

    pub fn weights(&self) -> &CVec {
        &self.weights
    }

    pub fn integrate(&self, a: &CVec) -> C64 {
        assert_eq!(a.len(), self.weights.len(), "element length");
        self.weights
            .iter()
            .zip(a.iter())
            .map(|(w, x)| w * x)
            .sum()
    }

    /// Max residual of `∫(eᵢeⱼ) − ∫(eⱼeᵢ)` over basis pairs.
    pub fn check_trace(&self, alg: &Algebra, tol: f64) -> CheckResult {
        let mut res: f64 = 0.0;
        for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                let ij = self.integrate(&alg.mul(&alg.basis_element(i), &alg.basis_element(j)));
                let ji = self.integrate(&alg.mul(&alg.basis_element(j), &alg.basis_element(i)));
                res = res.max((ij - ji).norm());
            }
        }
        CheckResult::from_residual("functional_trace", res, tol)
    }

    /// Max residual of `∫(a*) − conj(∫a)` over the basis.
    pub fn check_star_preserving(&self, alg: &Algebra, tol: f64) -> CheckResult {
        let mut res: f64 = 0.0;
        for i in 0..alg.dim() {
            let e = alg.basis_element(i);
            res = res.max((self.integrate(&alg.star(&e)) - self.integrate(&e).conj()).norm());
        }
        CheckResult::from_residual("functional_star_preserving", res, tol)
    }

    /// Hermitian form `H[i][j] = ∫(eᵢ* eⱼ)`.
    pub fn sesquilinear_matrix(&self, alg: &Algebra) -> CMat {
        let dim = alg.dim();
        CMat::from_fn(dim, dim, |i, j| {
            self.integrate(&alg.mul(&alg.star(&alg.basis_element(i)), &alg.basis_element(j)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use proptest::prelude::*;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn function_algebra_idempotents() {
        let a = Algebra::functions(&labels(&["x", "y"])).unwrap();
        assert_eq!(a.dim(), 2);
        let dx = a.basis_element(0);
        let dy = a.basis_element(1);
        assert_eq!(a.mul(&dx, &dx), dx);
        assert!(a.mul(&dx, &dy).norm() == 0.0);
    }

    #[test]
    fn function_algebra_unit_is_partition() {
        let a = Algebra::functions(&labels(&["0", "1", "2"])).unwrap();
        let sum = a.basis_element(0) + a.basis_element(1) + a.basis_element(2);
        assert_eq!(a.unit(), &sum);
    }

    #[test]
    fn function_algebra_star_conjugates() {
        let a = Algebra::functions(&labels(&["x", "y"])).unwrap();
        let el = a.basis_element(0) * cr(2.0) + a.basis_element(1) * c(0.0, 1.0);
        let expected = a.basis_element(0) * cr(2.0) - a.basis_element(1) * c(0.0, 1.0);
        assert!((a.star(&el) - expected).norm() < 1e-15);
        let im = a.basis_element(0) * c(0.0, 1.0);
        assert!((a.star(&im) + im).norm() < 1e-15);
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(matches!(
            Algebra::functions(&labels(&["x", "x"])),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn matrix_units_multiply() {
        let a = Algebra::matrix_units(2);
        // E12 E21 = E11, E12 E22 = E12
        assert_eq!(a.mul(&a.basis_element(1), &a.basis_element(2)), a.basis_element(0));
        assert_eq!(a.mul(&a.basis_element(1), &a.basis_element(3)), a.basis_element(1));
        // (E12)* = E21
        assert_eq!(a.star(&a.basis_element(1)), a.basis_element(2));
        assert_eq!(Algebra::matrix_units(3).dim(), 9);
    }

    #[test]
    fn normalised_trace_functional() {
        let a = Algebra::matrix_units(2);
        let mut w = CVec::zeros(4);
        w[0] = cr(0.5);
        w[3] = cr(0.5);
        let f = Functional::new(w);
        assert_eq!(f.integrate(&a.basis_element(0)), cr(0.5));
        assert!(f.check_trace(&a, 1e-12).passed);
        assert!(f.check_star_preserving(&a, 1e-12).passed);
    }

    #[test]
    fn corner_entry_functional_is_not_a_trace() {
        let a = Algebra::matrix_units(2);
        // ∫a = a_11
        let f = Functional::new(unit_vec(4, 0));
        let check = f.check_trace(&a, 1e-12);
        assert!(!check.passed);
        // ∫(E12 E21) = 1 vs ∫(E21 E12) = 0
        assert!((check.residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bad_structure_constants_rejected() {
        // e1*e1 = e2, e2*anything = e1: not associative
        let dim = 2;
        let mut structure = vec![vec![CVec::zeros(dim); dim]; dim];
        structure[0][0] = unit_vec(dim, 1);
        structure[0][1] = unit_vec(dim, 0);
        structure[1][0] = unit_vec(dim, 0);
        structure[1][1] = unit_vec(dim, 0);
        let res = Algebra::from_structure(
            labels(&["a", "b"]),
            &structure,
            unit_vec(dim, 0),
            CMat::identity(dim, dim),
        );
        assert!(matches!(res, Err(Error::InvalidModel(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn functional_linear_and_star_preserving(
            re1 in -5.0f64..5.0, im1 in -5.0f64..5.0,
            re2 in -5.0f64..5.0, im2 in -5.0f64..5.0,
            s in -3.0f64..3.0,
        ) {
            let a = Algebra::matrix_units(2);
            let mut w = CVec::zeros(4);
            w[0] = cr(0.5);
            w[3] = cr(0.5);
            let f = Functional::new(w);
            let x = a.basis_element(0) * c(re1, im1) + a.basis_element(1) * c(im2, re2);
            let y = a.basis_element(2) * c(re2, im2) + a.basis_element(3) * c(re1, -im1);
            let lin = f.integrate(&(&x * cr(s) + &y)) - (f.integrate(&x) * cr(s) + f.integrate(&y));
            prop_assert!(lin.norm() < 1e-12);
            let star = f.integrate(&a.star(&x)) - f.integrate(&x).conj();
            prop_assert!(star.norm() < 1e-12);
        }

        #[test]
        fn star_is_antimultiplicative(
            re1 in -5.0f64..5.0, im1 in -5.0f64..5.0,
            re2 in -5.0f64..5.0, im2 in -5.0f64..5.0,
        ) {
            let a = Algebra::matrix_units(3);
            let x = CVec::from_fn(9, |i, _| c(re1 * (i as f64 + 1.0), im1 - i as f64));
            let y = CVec::from_fn(9, |i, _| c(im2 + i as f64, re2 * (i as f64 - 4.0)));
            let lhs = a.star(&a.mul(&x, &y));
            let rhs = a.mul(&a.star(&y), &a.star(&x));
            prop_assert!((lhs - rhs).norm() < 1e-9);
        }
    }
}
