//! The spinor bimodule S = A ⊕ Ω¹ with Clifford action, D = d + δ, charge
//! conjugation J, grading γ, inner product and the axiom verifier.
//!
//! Coordinate convention: the A block comes first, then the Ω¹ block (for
//! free backends ordered s¹ coefficients, then s², …). All operators are
//! N×N complex matrices with N = dim A + dim Ω¹; J is a matrix composed
//! with entrywise conjugation.

use crate::algebra::Functional;
use crate::calculus::Calculus;
use crate::check::{CheckResult, Error, Result, VerificationReport};
use crate::linalg::{
    c, conj_mat, cr, fro, general_eigenvalues, hermitian_eigenvalues, hermitize, unit_vec,
    Antilinear, CMat, CVec, C64,
};
use crate::qrg::{
    self, check_combined_reality_sigma, check_delta_star, check_divergence_compatible,
    check_metric_compatible, check_metric_reality, check_sigma_symmetric, check_star_preserving,
    check_torsion_free, Connection, MetricData, QuantumMetric,
};
use crate::KERNEL_TOL;

#[derive(Debug, Clone)]
pub struct SpinorPackage<'m> {
    pub calc: &'m Calculus,
    pub metric: &'m QuantumMetric,
    pub conn: &'m Connection,
    pub functional: &'m Functional,
    /// ℂ-dimension of S.
    pub dim: usize,
    /// D = d + δ.
    pub dirac: CMat,
    /// γ = +1 on A, −1 on Ω¹.
    pub gamma: CMat,
    /// J(a+ω) = a* + ω*.
    pub j: Antilinear,
    /// Gram matrix of ⟨a+ω, b+η⟩ = ∫(a*b + (ω*,η)).
    pub gram: CMat,
    pub gram_hermiticity_residual: f64,
    /// δ = ( , )∘∇ as a matrix A ← Ω¹.
    pub delta: CMat,
}

pub fn build_spinor<'m>(
    calc: &'m Calculus,
    metric: &'m QuantumMetric,
    conn: &'m Connection,
    functional: &'m Functional,
) -> SpinorPackage<'m> {
    let na = calc.dim_a();
    let n1 = calc.dim_o1();
    let n = na + n1;

    let delta = qrg::divergence_matrix(calc, metric, conn);
    let mut dirac = CMat::zeros(n, n);
    dirac.view_mut((0, na), (na, n1)).copy_from(&delta);
    dirac.view_mut((na, 0), (n1, na)).copy_from(&calc.d_mat);

    let mut gamma = CMat::zeros(n, n);
    for i in 0..na {
        gamma[(i, i)] = cr(1.0);
    }
    for u in 0..n1 {
        gamma[(na + u, na + u)] = cr(-1.0);
    }

    let mut jmat = CMat::zeros(n, n);
    jmat.view_mut((0, 0), (na, na)).copy_from(calc.algebra.star_matrix());
    jmat.view_mut((na, na), (n1, n1)).copy_from(&calc.star1.mat);

    let mut gram = CMat::zeros(n, n);
    gram.view_mut((0, 0), (na, na))
        .copy_from(&functional.sesquilinear_matrix(&calc.algebra));
    for u in 0..n1 {
        let us = calc.star1.apply(&unit_vec(n1, u));
        for v in 0..n1 {
            let p = metric.pair(calc, &us, &unit_vec(n1, v));
            gram[(na + u, na + v)] = functional.integrate(&p);
        }
    }
    let gram_hermiticity_residual = fro(&(&gram - gram.adjoint()));

    SpinorPackage {
        calc,
        metric,
        conn,
        functional,
        dim: n,
        dirac,
        gamma,
        j: Antilinear::new(jmat),
        gram,
        gram_hermiticity_residual,
        delta,
    }
}

impl<'m> SpinorPackage<'m> {
    pub fn embed(&self, a: &CVec, omega: &CVec) -> CVec {
        let na = self.calc.dim_a();
        let mut v = CVec::zeros(self.dim);
        for i in 0..na {
            v[i] = a[i];
        }
        for u in 0..omega.len() {
            v[na + u] = omega[u];
        }
        v
    }

    pub fn split(&self, v: &CVec) -> (CVec, CVec) {
        let na = self.calc.dim_a();
        (
            CVec::from_fn(na, |i, _| v[i]),
            CVec::from_fn(self.dim - na, |u, _| v[na + u]),
        )
    }

    /// Left action of an algebra element on S.
    pub fn left_action(&self, a: &CVec) -> CMat {
        let na = self.calc.dim_a();
        let n1 = self.calc.dim_o1();
        let mut m = CMat::zeros(self.dim, self.dim);
        m.view_mut((0, 0), (na, na)).copy_from(&self.calc.algebra.left_mult(a));
        m.view_mut((na, na), (n1, n1)).copy_from(&self.calc.lmul_o1(a));
        m
    }

    /// Right action of an algebra element on S.
    pub fn right_action(&self, a: &CVec) -> CMat {
        let na = self.calc.dim_a();
        let n1 = self.calc.dim_o1();
        let mut m = CMat::zeros(self.dim, self.dim);
        m.view_mut((0, 0), (na, na)).copy_from(&self.calc.algebra.right_mult(a));
        m.view_mut((na, na), (n1, n1)).copy_from(&self.calc.rmul_o1(a));
        m
    }

    /// Clifford action `ω▷(a+η) = ωa + (ω,η)` of a one-form, as an N×N
    /// matrix.
    pub fn clifford_action(&self, omega: &CVec) -> CMat {
        let na = self.calc.dim_a();
        let n1 = self.calc.dim_o1();
        let mut m = CMat::zeros(self.dim, self.dim);
        for j in 0..na {
            let col = self.calc.rmul_o1(&self.calc.algebra.basis_element(j)) * omega;
            for u in 0..n1 {
                m[(na + u, j)] = col[u];
            }
        }
        for v in 0..n1 {
            let p = self.metric.pair(self.calc, omega, &unit_vec(n1, v));
            for i in 0..na {
                m[(i, na + v)] = p[i];
            }
        }
        m
    }

    /// Coefficient-level Clifford matrices Cⁱ = sⁱ▷ of shape (1+k)×(1+k)
    /// for a free backend, together with the residual of
    /// `Tr(CⁱCʲ) = g^{ij} + g^{ji}`. Graph backends have no such
    /// coefficient frame.
    pub fn clifford_matrices(&self) -> Option<(Vec<CMat>, f64)> {
        let f = self.calc.as_free()?;
        let MetricData::FreeInverse(g_inv) = &self.metric.data else {
            return None;
        };
        let k = f.k;
        let mut mats = Vec::with_capacity(k);
        for i in 0..k {
            let mut m = CMat::zeros(1 + k, 1 + k);
            for j in 0..k {
                m[(0, 1 + j)] = g_inv[(i, j)];
            }
            m[(1 + i, 0)] = cr(1.0);
            mats.push(m);
        }
        let mut res: f64 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let tr: C64 = (&mats[i] * &mats[j]).trace();
                res = res.max((tr - g_inv[(i, j)] - g_inv[(j, i)]).norm());
            }
        }
        Some((mats, res))
    }

    /// The matrix of `J b J⁻¹` (with J² = id this is conjugation by J).
    pub fn j_conjugated(&self, b: &CVec) -> CMat {
        &self.j.mat * conj_mat(&self.left_action(b)) * conj_mat(&self.j.mat)
    }

    /// Run the full axiom suite.
    pub fn verify(&self, tol: f64) -> VerificationReport {
        let mut report = VerificationReport::default();
        let calc = self.calc;
        let na = calc.dim_a();
        let n1 = calc.dim_o1();
        let n = self.dim;
        let id = CMat::identity(n, n);

        // connection / metric level
        report.push(check_star_preserving(calc, self.conn, tol));
        report.push(check_sigma_symmetric(calc, self.metric, self.conn, tol));
        report.push(check_metric_reality(calc, self.metric, tol));
        let compat = check_metric_compatible(calc, self.metric, self.conn, tol);
        let compat_passed = compat.applicable && compat.passed;
        report.push(compat);
        report.push(check_torsion_free(calc, self.conn, tol));
        report.push(check_combined_reality_sigma(calc, self.metric, self.conn, tol));

        report.push(
            CheckResult::from_residual("gram_hermitian", self.gram_hermiticity_residual, tol)
                .with_detail("failure signals metric reality broken under the functional".into()),
        );

        // (a) [D,a] = (da)▷
        let mut res_a: f64 = 0.0;
        for i in 0..na {
            let e = calc.algebra.basis_element(i);
            let la = self.left_action(&e);
            let comm = &self.dirac * &la - &la * &self.dirac;
            res_a = res_a.max(fro(&(comm - self.clifford_action(&calc.differential(&e)))));
        }
        report.push(CheckResult::from_residual("clifford_commutator", res_a, tol));

        // precompute J b J⁻¹ for the commutant checks
        let jbj: Vec<CMat> = (0..na)
            .map(|i| self.j_conjugated(&calc.algebra.basis_element(i)))
            .collect();

        // (b) [[D,a], JbJ⁻¹] = 0
        let mut res_b: f64 = 0.0;
        for i in 0..na {
            let la = self.left_action(&calc.algebra.basis_element(i));
            let da = &self.dirac * &la - &la * &self.dirac;
            for rb in &jbj {
                res_b = res_b.max(fro(&(&da * rb - rb * &da)));
            }
        }
        report.push(CheckResult::from_residual("first_order", res_b, tol));

        // (c) [a, JbJ⁻¹] = 0
        let mut res_c: f64 = 0.0;
        for i in 0..na {
            let la = self.left_action(&calc.algebra.basis_element(i));
            for rb in &jbj {
                res_c = res_c.max(fro(&(&la * rb - rb * &la)));
            }
        }
        report.push(CheckResult::from_residual("commutant", res_c, tol));

        // (d) [γ, a] = 0
        let mut res_d: f64 = 0.0;
        for i in 0..na {
            let la = self.left_action(&calc.algebra.basis_element(i));
            res_d = res_d.max(fro(&(&self.gamma * &la - &la * &self.gamma)));
        }
        report.push(CheckResult::from_residual("gamma_bimodule", res_d, tol));

        // (e) involutions and (anti)commutations
        report.push(CheckResult::from_residual(
            "j_squared",
            self.j.involution_defect(),
            tol,
        ));
        report.push(CheckResult::from_residual(
            "gamma_squared",
            fro(&(&self.gamma * &self.gamma - &id)),
            tol,
        ));
        report.push(CheckResult::from_residual(
            "dirac_gamma_anticommute",
            fro(&(&self.dirac * &self.gamma + &self.gamma * &self.dirac)),
            tol,
        ));
        report.push(CheckResult::from_residual(
            "j_gamma_commute",
            fro(&(&self.j.mat * conj_mat(&self.gamma) - &self.gamma * &self.j.mat)),
            tol,
        ));
        report.push(CheckResult::from_residual(
            "j_dirac_commute",
            fro(&(&self.j.mat * conj_mat(&self.dirac) - &self.dirac * &self.j.mat)),
            tol,
        ));

        // (f) D antihermitian w.r.t. the gram
        report.push(CheckResult::from_residual(
            "dirac_antihermitian",
            fro(&(&self.gram * &self.dirac + self.dirac.adjoint() * &self.gram)),
            tol,
        ));

        // (g) γ hermitian w.r.t. the gram
        report.push(CheckResult::from_residual(
            "gamma_hermitian",
            fro(&(self.gamma.adjoint() * &self.gram - &self.gram * &self.gamma)),
            tol,
        ));

        // (h) ⟨Jφ, Jψ⟩ = ⟨ψ, φ⟩
        report.push(CheckResult::from_residual(
            "j_isometry",
            fro(&(self.j.mat.adjoint() * &self.gram * &self.j.mat - self.gram.transpose())),
            tol,
        ));

        // (i) action of a* adjoint to action of a
        let mut res_i: f64 = 0.0;
        for i in 0..na {
            let e = calc.algebra.basis_element(i);
            let la = self.left_action(&e);
            let las = self.left_action(&calc.algebra.star(&e));
            res_i = res_i.max(fro(&(las.adjoint() * &self.gram - &self.gram * la)));
        }
        report.push(CheckResult::from_residual("star_adjoint", res_i, tol));

        // (j) extended positivity of the gram, per block
        let eva = hermitian_eigenvalues(&self.gram.view((0, 0), (na, na)).into_owned());
        let evo = hermitian_eigenvalues(&self.gram.view((na, na), (n1, n1)).into_owned());
        let min_a = eva.first().copied().unwrap_or(1.0);
        let min_o = evo.first().copied().unwrap_or(1.0);
        let min_all = min_a.min(min_o);
        report.push(CheckResult {
            name: "positivity".into(),
            passed: min_all > tol,
            residual: (-min_all).max(0.0),
            detail: format!("smallest eigenvalue: A block {min_a:.6e}, one-form block {min_o:.6e}"),
            required: true,
            applicable: true,
        });

        // (k) extended trace: ∫(ab) = ∫(ba) and ∫(ω,η) = ∫(η,ω)
        let trace_a = self.functional.check_trace(&calc.algebra, tol).residual;
        let mut trace_o: f64 = 0.0;
        for u in 0..n1 {
            for v in 0..n1 {
                let uv = self
                    .functional
                    .integrate(&self.metric.pair(calc, &unit_vec(n1, u), &unit_vec(n1, v)));
                let vu = self
                    .functional
                    .integrate(&self.metric.pair(calc, &unit_vec(n1, v), &unit_vec(n1, u)));
                trace_o = trace_o.max((uv - vu).norm());
            }
        }
        report.push(
            CheckResult::from_residual("extended_trace", trace_a.max(trace_o), tol).with_detail(
                format!("algebra residual {trace_a:.3e}, one-form residual {trace_o:.3e}"),
            ),
        );

        // (l) divergence compatibility
        report.push(check_divergence_compatible(
            calc,
            self.functional,
            self.metric,
            self.conn,
            tol,
        ));

        report.push(check_delta_star(calc, self.metric, self.conn, tol));

        // (m) D² = Δ ⊕ Δ with both Laplacians built by the qrg layer
        let lap_f = qrg::laplacian_functions(calc, self.metric, self.conn);
        let lap_o = qrg::laplacian_one_forms(calc, self.metric, self.conn);
        let mut block = CMat::zeros(n, n);
        block.view_mut((0, 0), (na, na)).copy_from(&lap_f);
        block.view_mut((na, na), (n1, n1)).copy_from(&lap_o);
        let res_m = fro(&(&self.dirac * &self.dirac - block));
        let tensor_detail = if self.conn.sigma_inverse().is_some() {
            let lap_t = qrg::laplacian_one_forms_tensor(calc, self.metric, self.conn);
            format!(
                "tensorial one-form Laplacian deviation {:.3e} (vanishes for metric-compatible connections)",
                fro(&(lap_t - lap_o))
            )
        } else {
            "tensorial route skipped: sigma singular".into()
        };
        report.push(
            CheckResult::from_residual("dirac_squared_laplacian", res_m, tol)
                .with_detail(tensor_detail),
        );

        // (n) covariance of the Clifford action under the tensor connection,
        // assembled on Ω¹⊗S = Ω¹ ⊕ Ω¹⊗Ω¹ (optional geometric property)
        let cov = {
            // on the Ω¹ part of Ω¹⊗S both routes reduce to ∇ itself, so the
            // whole content sits in the Ω¹⊗Ω¹ part:
            // (id⊗( , ))∘∇_{Ω¹⊗Ω¹} versus d∘( , )
            let lhs = self.metric.contract_last_two(calc) * self.conn.tensor_square(calc);
            let rhs = &calc.d_mat * &self.metric.eval;
            fro(&(lhs - rhs))
        };
        let cov_passed = cov <= tol;
        report.push(
            CheckResult::from_residual("clifford_covariance", cov, tol)
                .with_detail(format!(
                    "agrees with metric_compatible: {}",
                    compat_passed == cov_passed
                ))
                .informational(),
        );

        report
    }

    /// Eigenvalues of the Hermitian operator iD.
    ///
    /// When the gram is positive definite and D is antihermitian with
    /// respect to it, iD is diagonalised in the gram-orthonormal frame and
    /// real eigenvalues are returned; otherwise general complex eigenvalues
    /// are computed in the raw coordinate frame and flagged.
    pub fn spectrum(&self, tol: f64) -> Spectrum {
        let g = hermitize(&self.gram);
        let anti_res = fro(&(&g * &self.dirac + self.dirac.adjoint() * &g));
        let hermitian_ok = anti_res <= tol;
        // nalgebra's complex Cholesky does not reject indefinite input, so
        // positivity is decided by the smallest eigenvalue
        let gram_positive =
            crate::linalg::smallest_hermitian_eigenvalue(&g) > 1e-13 * fro(&g).max(1.0);
        let chol = if gram_positive {
            nalgebra::Cholesky::new(g.clone())
        } else {
            None
        };
        let idirac = &self.dirac * c(0.0, 1.0);

        if let (Some(ch), true) = (chol, hermitian_ok) {
            let l_adj = ch.l().adjoint();
            let l_adj_inv = l_adj
                .clone()
                .try_inverse()
                .expect("Cholesky factor is invertible");
            let transformed = &l_adj * &idirac * l_adj_inv;
            let mut vals = hermitian_eigenvalues(&transformed);
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let kernel_dim = vals.iter().filter(|v| v.abs() < KERNEL_TOL).count();
            let values = vals.iter().map(|&v| cr(v)).collect();
            Spectrum {
                values,
                real_values: Some(vals),
                kernel_dim,
                hermitian_ok,
                gram_positive,
            }
        } else {
            let values = general_eigenvalues(&idirac);
            let real_values = if values.iter().all(|z| z.im.abs() < tol * 100.0) {
                let mut v: Vec<f64> = values.iter().map(|z| z.re).collect();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                Some(v)
            } else {
                None
            };
            let kernel_dim = values.iter().filter(|z| z.norm() < KERNEL_TOL).count();
            Spectrum {
                values,
                real_values,
                kernel_dim,
                hermitian_ok,
                gram_positive,
            }
        }
    }

    /// Modified Dirac operator from a bimodule-connection shift
    /// `α_S(a+ω) = aα₀ + α(ω)` with α₀ a central one-form and α a bimodule
    /// map Ω¹ → Ω¹⊗Ω¹:
    /// `D_{α_S}(a+ω) = D(a+ω) + aα₀ + ( , )α(ω)`.
    ///
    /// Returns the new package plus a report on the conditions under which
    /// the axioms survive: α₀* = α₀, α∘* = σ∘†∘α and ( , )α + (α₀, ) = 0,
    /// followed by the full axiom suite of the modified operator.
    pub fn with_alpha_s(
        &self,
        alpha0: &CVec,
        alpha: &CMat,
        tol: f64,
    ) -> Result<(SpinorPackage<'m>, VerificationReport)> {
        let calc = self.calc;
        let na = calc.dim_a();
        let n1 = calc.dim_o1();
        // centrality of α₀
        let mut central: f64 = 0.0;
        for i in 0..na {
            let e = calc.algebra.basis_element(i);
            central = central.max((calc.lmul_o1(&e) * alpha0 - calc.rmul_o1(&e) * alpha0).norm());
        }
        if central > tol {
            return Err(Error::InvalidModel(format!(
                "alpha0 is not central (residual {central:.3e})"
            )));
        }
        let bim = calc.bimodule_residual_12(alpha);
        if bim > tol {
            return Err(Error::InvalidModel(format!(
                "alpha is not a bimodule map (residual {bim:.3e})"
            )));
        }

        let mut dirac = self.dirac.clone();
        for j in 0..na {
            let col = calc.lmul_o1(&calc.algebra.basis_element(j)) * alpha0;
            for u in 0..n1 {
                dirac[(na + u, j)] += col[u];
            }
        }
        let pair_alpha = &self.metric.eval * alpha;
        for v in 0..n1 {
            for i in 0..na {
                dirac[(i, na + v)] += pair_alpha[(i, v)];
            }
        }

        let mut report = VerificationReport::default();
        report.push(CheckResult::from_residual(
            "alpha0_self_adjoint",
            (calc.star1.apply(alpha0) - alpha0).norm(),
            tol,
        ));
        report.push(CheckResult::from_residual(
            "alpha_star_compatible",
            fro(&(alpha * &calc.star1.mat
                - &self.conn.sigma * &calc.dagger2.mat * conj_mat(alpha))),
            tol,
        ));
        // (α₀, ·) as a matrix A ← Ω¹
        let mut pair_alpha0 = CMat::zeros(na, n1);
        for v in 0..n1 {
            pair_alpha0.set_column(v, &self.metric.pair(calc, alpha0, &unit_vec(n1, v)));
        }
        report.push(CheckResult::from_residual(
            "alpha_pairing_cancels",
            fro(&(&self.metric.eval * alpha + pair_alpha0)),
            tol,
        ));

        let pkg = SpinorPackage {
            dirac,
            ..self.clone()
        };
        report.extend(pkg.verify(tol));
        Ok((pkg, report))
    }
}

/// Eigenvalue data for iD.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// All eigenvalues of iD, sorted by (re, im).
    pub values: Vec<C64>,
    /// Present when the eigenvalues are (numerically) real.
    pub real_values: Option<Vec<f64>>,
    /// Count of eigenvalues with |λ| below the kernel threshold.
    pub kernel_dim: usize,
    /// D was antihermitian with respect to the gram.
    pub hermitian_ok: bool,
    /// The gram admitted a Cholesky factorisation.
    pub gram_positive: bool,
}
