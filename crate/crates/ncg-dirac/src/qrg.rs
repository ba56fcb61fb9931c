//! Quantum metrics, bimodule connections with generalised braiding,
//! divergence and Laplacians, and the compatibility checks between them.
//!
//! Only the inverse metric `( , ): Ω¹⊗Ω¹ → A` is stored; the metric element
//! itself is never materialised. Connections are ℂ-linear matrices
//! `∇: Ω¹ → Ω¹⊗Ω¹` and `σ: Ω¹⊗Ω¹ → Ω¹⊗Ω¹` whose Leibniz and bimodule laws
//! are verified at construction.

use crate::calculus::{Backend, Calculus};
use crate::check::{CheckResult, Error, Result};
use crate::linalg::{conj_mat, cr, fro, unit_vec, CMat, CVec, C64};
use crate::algebra::Functional;

#[derive(Debug, Clone)]
pub enum MetricData {
    /// One weight per arrow: `(ω_{x→y}, ω_{y→x}) = λ_{x→y} δ_x`.
    GraphWeights(Vec<C64>),
    /// `(sⁱ, sʲ) = g_inv[i][j]·1`.
    FreeInverse(CMat),
}

#[derive(Debug, Clone)]
pub struct QuantumMetric {
    /// The evaluation map `( , )` as a matrix A ← Ω¹⊗Ω¹.
    pub eval: CMat,
    pub data: MetricData,
}

impl QuantumMetric {
    pub fn graph(calc: &Calculus, weights: &[f64]) -> Result<Self> {
        let w: Vec<C64> = weights.iter().map(|&x| cr(x)).collect();
        Self::graph_complex(calc, &w, false)
    }

    /// Complex arrow weights are only accepted with `allow_nonreal`; reality
    /// of the metric is a theorem hypothesis rather than a type constraint,
    /// and non-real weights exist to exercise the failure paths.
    pub fn graph_complex(calc: &Calculus, weights: &[C64], allow_nonreal: bool) -> Result<Self> {
        let g = calc
            .as_graph()
            .ok_or_else(|| Error::InvalidModel("graph metric needs a graph calculus".into()))?;
        if weights.len() != g.arrows.len() {
            return Err(Error::Dimension("one metric weight per arrow".into()));
        }
        if weights.iter().any(|l| l.norm() == 0.0) {
            return Err(Error::InvalidModel("metric weights must be nonzero".into()));
        }
        if !allow_nonreal && weights.iter().any(|l| l.im != 0.0) {
            return Err(Error::InvalidModel(
                "metric weights must be real (pass allow_nonreal to override)".into(),
            ));
        }
        let mut eval = CMat::zeros(calc.dim_a(), calc.dim_o2());
        for (t, &(x, w, y)) in g.two_steps.iter().enumerate() {
            if x == y {
                eval[(x, t)] = weights[g.arrow_idx[&(x, w)]];
            }
        }
        let m = QuantumMetric {
            eval,
            data: MetricData::GraphWeights(weights.to_vec()),
        };
        m.validate(calc)?;
        Ok(m)
    }

    pub fn free(calc: &Calculus, g_inv: &CMat) -> Result<Self> {
        let f = calc
            .as_free()
            .ok_or_else(|| Error::InvalidModel("free metric needs a free calculus".into()))?;
        if g_inv.nrows() != f.k || g_inv.ncols() != f.k {
            return Err(Error::Dimension("inverse metric must be k×k".into()));
        }
        if g_inv.clone().try_inverse().is_none() {
            return Err(Error::InvalidModel("inverse metric coefficients are singular".into()));
        }
        let na = calc.dim_a();
        let mut eval = CMat::zeros(na, calc.dim_o2());
        for i in 0..f.k {
            for j in 0..f.k {
                if g_inv[(i, j)] != cr(0.0) {
                    for a in 0..na {
                        eval[(a, (i * f.k + j) * na + a)] = g_inv[(i, j)];
                    }
                }
            }
        }
        let m = QuantumMetric {
            eval,
            data: MetricData::FreeInverse(g_inv.clone()),
        };
        m.validate(calc)?;
        Ok(m)
    }

    fn validate(&self, calc: &Calculus) -> Result<()> {
        let res = self.bimodule_residual(calc);
        if res > 1e-12 {
            return Err(Error::InvalidModel(format!(
                "metric evaluation is not a bimodule map (residual {res:.3e})"
            )));
        }
        Ok(())
    }

    pub fn bimodule_residual(&self, calc: &Calculus) -> f64 {
        let mut res: f64 = 0.0;
        for i in 0..calc.dim_a() {
            let e = calc.algebra.basis_element(i);
            let la = calc.algebra.left_mult(&e);
            let ra = calc.algebra.right_mult(&e);
            res = res.max(fro(&(&self.eval * calc.lmul_o2(&e) - la * &self.eval)));
            res = res.max(fro(&(&self.eval * calc.rmul_o2(&e) - ra * &self.eval)));
        }
        res
    }

    /// `(ξ, η)` as an algebra element.
    pub fn pair(&self, calc: &Calculus, xi: &CVec, eta: &CVec) -> CVec {
        &self.eval * calc.tensor_11(xi, eta)
    }

    /// `(id⊗( , )): Ω¹⊗Ω¹⊗Ω¹ → Ω¹` (pair the last two factors and act on
    /// the first from the right).
    pub fn contract_last_two(&self, calc: &Calculus) -> CMat {
        let mut out = CMat::zeros(calc.dim_o1(), calc.dim_o3());
        match &calc.backend {
            Backend::Graph(g) => {
                for (s, &(x, w, z, y)) in g.three_steps.iter().enumerate() {
                    if y == w {
                        let lambda = self.eval[(w, g.two_step_idx[&(w, z, y)])];
                        out[(g.arrow_idx[&(x, w)], s)] += lambda;
                    }
                }
            }
            Backend::Free(f) => {
                let na = calc.dim_a();
                match &self.data {
                    MetricData::FreeInverse(g_inv) => {
                        for i in 0..f.k {
                            for j in 0..f.k {
                                for l in 0..f.k {
                                    let gjl = g_inv[(j, l)];
                                    if gjl != cr(0.0) {
                                        for a in 0..na {
                                            out[(i * na + a, ((i * f.k + j) * f.k + l) * na + a)] +=
                                                gjl;
                                        }
                                    }
                                }
                            }
                        }
                    }
                    MetricData::GraphWeights(_) => unreachable!("free calculus with graph metric"),
                }
            }
        }
        out
    }
}

/// Tags recording how a connection was produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConnectionKind {
    Bare,
    Inner,
    Qlc(String),
    Explicit,
}

#[derive(Debug, Clone)]
pub struct Connection {
    /// ∇: Ω¹ → Ω¹⊗Ω¹.
    pub nabla: CMat,
    /// Generalised braiding σ: Ω¹⊗Ω¹ → Ω¹⊗Ω¹.
    pub sigma: CMat,
    pub kind: ConnectionKind,
}

impl Connection {
    /// The canonical inner connection with σ = id:
    /// `∇ω = θ⊗ω − ω⊗θ`. Trivially σ-symmetric for any metric.
    pub fn bare(calc: &Calculus) -> Self {
        let nabla = calc.tensor_with_left(&calc.theta) - calc.tensor_with_right(&calc.theta);
        Connection {
            nabla,
            sigma: CMat::identity(calc.dim_o2(), calc.dim_o2()),
            kind: ConnectionKind::Bare,
        }
    }

    /// Inner connection `∇ω = θ⊗ω − σ(ω⊗θ) + α(ω)` for a bimodule map σ
    /// (and optional bimodule map α: Ω¹ → Ω¹⊗Ω¹).
    pub fn inner(calc: &Calculus, sigma: CMat, alpha: Option<&CMat>, kind: ConnectionKind) -> Result<Self> {
        let mut nabla =
            calc.tensor_with_left(&calc.theta) - &sigma * calc.tensor_with_right(&calc.theta);
        if let Some(a) = alpha {
            let res = calc.bimodule_residual_12(a);
            if res > 1e-12 {
                return Err(Error::InvalidModel(format!(
                    "alpha is not a bimodule map (residual {res:.3e})"
                )));
            }
            nabla += a;
        }
        Connection::from_parts(calc, nabla, sigma, kind)
    }

    /// Validate and wrap an explicit (∇, σ) pair.
    pub fn from_parts(calc: &Calculus, nabla: CMat, sigma: CMat, kind: ConnectionKind) -> Result<Self> {
        let conn = Connection { nabla, sigma, kind };
        let bim = calc.bimodule_residual_o2(&conn.sigma);
        if bim > 1e-12 {
            return Err(Error::InvalidModel(format!(
                "sigma is not a bimodule map (residual {bim:.3e})"
            )));
        }
        let (left, right) = conn.leibniz_residuals(calc);
        if left > 1e-9 || right > 1e-9 {
            return Err(Error::InvalidModel(format!(
                "connection fails the Leibniz laws (left {left:.3e}, right {right:.3e})"
            )));
        }
        Ok(conn)
    }

    /// Residuals of the two Leibniz laws over all basis pairs:
    /// `∇(aω) = a∇ω + da⊗ω` and `∇(ωa) = (∇ω)a + σ(ω⊗da)`.
    pub fn leibniz_residuals(&self, calc: &Calculus) -> (f64, f64) {
        let n1 = calc.dim_o1();
        let mut left: f64 = 0.0;
        let mut right: f64 = 0.0;
        for i in 0..calc.dim_a() {
            let e = calc.algebra.basis_element(i);
            let de = calc.differential(&e);
            let mut tensor_de_left = CMat::zeros(calc.dim_o2(), n1);
            let mut tensor_de_right = CMat::zeros(calc.dim_o2(), n1);
            for u in 0..n1 {
                tensor_de_left.set_column(u, &calc.tensor_11(&de, &unit_vec(n1, u)));
                tensor_de_right.set_column(u, &calc.tensor_11(&unit_vec(n1, u), &de));
            }
            left = left.max(fro(
                &(&self.nabla * calc.lmul_o1(&e) - calc.lmul_o2(&e) * &self.nabla - tensor_de_left),
            ));
            right = right.max(fro(
                &(&self.nabla * calc.rmul_o1(&e)
                    - calc.rmul_o2(&e) * &self.nabla
                    - &self.sigma * tensor_de_right),
            ));
        }
        (left, right)
    }

    pub fn sigma_inverse(&self) -> Option<CMat> {
        self.sigma.clone().try_inverse()
    }

    /// Tensor-product connection on Ω¹⊗Ω¹:
    /// `∇_{Ω¹⊗Ω¹} = ∇⊗id + (σ⊗id)(id⊗∇)`.
    pub fn tensor_square(&self, calc: &Calculus) -> CMat {
        calc.map_first_12(&self.nabla)
            + calc.map_first_22(&self.sigma) * calc.map_second_12(&self.nabla)
    }
}

// ----------------------------------------------------------------------
// divergence and Laplacians

/// δ = ( , )∘∇: Ω¹ → A.
pub fn divergence_matrix(calc: &Calculus, metric: &QuantumMetric, conn: &Connection) -> CMat {
    let _ = calc;
    &metric.eval * &conn.nabla
}

pub fn divergence(calc: &Calculus, metric: &QuantumMetric, conn: &Connection, omega: &CVec) -> CVec {
    divergence_matrix(calc, metric, conn) * omega
}

/// Δ = δ∘d on functions.
pub fn laplacian_functions(calc: &Calculus, metric: &QuantumMetric, conn: &Connection) -> CMat {
    divergence_matrix(calc, metric, conn) * &calc.d_mat
}

pub fn laplacian(calc: &Calculus, metric: &QuantumMetric, conn: &Connection, a: &CVec) -> CVec {
    laplacian_functions(calc, metric, conn) * a
}

/// Δ = d∘δ on one-forms (the block of D² on Ω¹).
pub fn laplacian_one_forms(calc: &Calculus, metric: &QuantumMetric, conn: &Connection) -> CMat {
    &calc.d_mat * divergence_matrix(calc, metric, conn)
}

/// The tensorial route `(id⊗( , ))∘∇_{Ω¹⊗Ω¹}∘∇`, which agrees with d∘δ
/// exactly when the connection is metric compatible.
pub fn laplacian_one_forms_tensor(
    calc: &Calculus,
    metric: &QuantumMetric,
    conn: &Connection,
) -> CMat {
    metric.contract_last_two(calc) * conn.tensor_square(calc) * &conn.nabla
}

// ----------------------------------------------------------------------
// checks

/// Residual of `(σ∘†)² = id`, which *-preservation implies.
pub fn sigma_dagger_involution_residual(calc: &Calculus, conn: &Connection) -> f64 {
    let sd = &conn.sigma * &calc.dagger2.mat;
    fro(&(&sd * conj_mat(&sd) - CMat::identity(sd.nrows(), sd.ncols())))
}

/// `∇∘* = σ∘†∘∇` plus the implied `(σ∘†)² = id`.
pub fn check_star_preserving(calc: &Calculus, conn: &Connection, tol: f64) -> CheckResult {
    let lhs = &conn.nabla * &calc.star1.mat;
    let rhs = &conn.sigma * &calc.dagger2.mat * conj_mat(&conn.nabla);
    let res = fro(&(lhs - rhs));
    let invol = sigma_dagger_involution_residual(calc, conn);
    CheckResult::from_residual("star_preserving", res, tol)
        .with_detail(format!("(sigma.dagger)^2 = id residual {invol:.3e}"))
}

/// `( , )∘σ = ( , )`.
pub fn check_sigma_symmetric(
    calc: &Calculus,
    metric: &QuantumMetric,
    conn: &Connection,
    tol: f64,
) -> CheckResult {
    let res = fro(&(&metric.eval * &conn.sigma - &metric.eval));
    let mut detail = String::new();
    if let (Some(g), MetricData::GraphWeights(w)) = (calc.as_graph(), &metric.data) {
        // closed form λ_{x→y} = Σ_z λ_{x→z} σ_{x,x}^z_y on every arrow
        let mut worst: f64 = 0.0;
        for &(x, y) in &g.arrows {
            let mut sum = cr(0.0);
            for &(x2, z) in &g.arrows {
                if x2 == x {
                    sum += w[g.arrow_idx[&(x, z)]] * g.sigma_entry(&conn.sigma, x, x, z, y);
                }
            }
            worst = worst.max((w[g.arrow_idx[&(x, y)]] - sum).norm());
        }
        detail = format!("arrow-wise closed form residual {worst:.3e}");
    }
    CheckResult::from_residual("sigma_symmetric", res, tol).with_detail(detail)
}

/// Metric reality `*∘( , ) = ( , )∘†`.
pub fn check_metric_reality(calc: &Calculus, metric: &QuantumMetric, tol: f64) -> CheckResult {
    let lhs = calc.algebra.star_matrix() * conj_mat(&metric.eval);
    let rhs = &metric.eval * &calc.dagger2.mat;
    CheckResult::from_residual("metric_reality", fro(&(lhs - rhs)), tol)
}

/// Metric compatibility in the inverse form
/// `d∘( , ) = (id⊗( , ))∘∇_{Ω¹⊗Ω¹}`. Needs σ invertible; informational
/// because the Dirac construction itself does not require it.
pub fn check_metric_compatible(
    calc: &Calculus,
    metric: &QuantumMetric,
    conn: &Connection,
    tol: f64,
) -> CheckResult {
    if conn.sigma_inverse().is_none() {
        return CheckResult::not_applicable("metric_compatible", "sigma is singular");
    }
    let lhs = &calc.d_mat * &metric.eval;
    let rhs = metric.contract_last_two(calc) * conn.tensor_square(calc);
    CheckResult::from_residual("metric_compatible", fro(&(lhs - rhs)), tol).informational()
}

/// Torsion `T_∇ = ∧∇ − d` on the basis one-forms, plus `∧∘(id+σ) = 0`.
/// Needs wedge relations on a free backend.
pub fn check_torsion_free(calc: &Calculus, conn: &Connection, tol: f64) -> CheckResult {
    let Some(f) = calc.as_free() else {
        return CheckResult::not_applicable("torsion_free", "no exterior square on a graph backend");
    };
    let Some(w) = &f.wedge else {
        return CheckResult::not_applicable("torsion_free", "no wedge relations declared");
    };
    let na = calc.dim_a();
    let ext = w.ext_labels.len();
    // ∧: Ω¹⊗Ω¹ → Ω²_ext
    let mut wedge = CMat::zeros(ext * na, calc.dim_o2());
    for i in 0..f.k {
        for j in 0..f.k {
            for (e, ce) in w.wedge_coeffs[i][j].iter().enumerate() {
                if *ce != cr(0.0) {
                    for a in 0..na {
                        wedge[(e * na + a, (i * f.k + j) * na + a)] += *ce;
                    }
                }
            }
        }
    }
    let mut torsion: f64 = 0.0;
    for i in 0..f.k {
        let si = calc.free_one_form(i, calc.algebra.unit());
        let t = &wedge * (&conn.nabla * si) - &w.d_one_forms[i];
        torsion = torsion.max(t.norm());
    }
    let id = CMat::identity(calc.dim_o2(), calc.dim_o2());
    let anti = fro(&(&wedge * (id + &conn.sigma)));
    CheckResult::from_residual("torsion_free", torsion, tol)
        .with_detail(format!("wedge∘(id+sigma) residual {anti:.3e}"))
        .informational()
}

/// Divergence compatibility `∫∘δ = 0` over the Ω¹ basis; on graphs the
/// arrow-wise relation `μ_y λ_{y→x} = μ_x λ_{x→y}` is reported as detail.
pub fn check_divergence_compatible(
    calc: &Calculus,
    functional: &Functional,
    metric: &QuantumMetric,
    conn: &Connection,
    tol: f64,
) -> CheckResult {
    let div = divergence_matrix(calc, metric, conn);
    let mut res: f64 = 0.0;
    for u in 0..calc.dim_o1() {
        res = res.max(functional.integrate(&div.column(u).into_owned()).norm());
    }
    let mut detail = String::new();
    if let (Some(g), MetricData::GraphWeights(w)) = (calc.as_graph(), &metric.data) {
        let mu = functional.weights();
        let mut worst: f64 = 0.0;
        for &(x, y) in &g.arrows {
            let lhs = mu[y] * w[g.arrow_idx[&(y, x)]];
            let rhs = mu[x] * w[g.arrow_idx[&(x, y)]];
            worst = worst.max((lhs - rhs).norm());
        }
        detail = format!("arrow-wise measure relation residual {worst:.3e}");
    }
    CheckResult::from_residual("divergence_compatible", res, tol).with_detail(detail)
}

/// `δ∘* = *∘δ`. Implied by reality + *-preservation + σ-symmetry.
pub fn check_delta_star(
    calc: &Calculus,
    metric: &QuantumMetric,
    conn: &Connection,
    tol: f64,
) -> CheckResult {
    let div = divergence_matrix(calc, metric, conn);
    let lhs = &div * &calc.star1.mat;
    let rhs = calc.algebra.star_matrix() * conj_mat(&div);
    CheckResult::from_residual("delta_star_commute", fro(&(lhs - rhs)), tol)
}

/// The combined reality/σ-symmetry condition
/// `(ω,η)* = ( , )σ(η*⊗ω*)`, the minimum needed on the metric for the
/// spinor construction; reported alongside the two separate checks.
pub fn check_combined_reality_sigma(
    calc: &Calculus,
    metric: &QuantumMetric,
    conn: &Connection,
    tol: f64,
) -> CheckResult {
    let n1 = calc.dim_o1();
    let mut res: f64 = 0.0;
    for u in 0..n1 {
        let us = calc.star1.apply(&unit_vec(n1, u));
        for v in 0..n1 {
            let vs = calc.star1.apply(&unit_vec(n1, v));
            let lhs = calc
                .algebra
                .star(&metric.pair(calc, &unit_vec(n1, u), &unit_vec(n1, v)));
            let rhs = &metric.eval * (&conn.sigma * calc.tensor_11(&vs, &us));
            res = res.max((lhs - rhs).norm());
        }
    }
    CheckResult::from_residual("reality_sigma_combined", res, tol).informational()
}

/// Closed-form graph divergence
/// `δω_{x→y} = λ_{y→x}δ_y − (Σ_z λ_{x→z} σ_{x,x}^z_y) δ_x`, for oracle
/// comparison with the generic composition.
pub fn graph_divergence_closed_form(
    calc: &Calculus,
    metric: &QuantumMetric,
    conn: &Connection,
) -> Option<CMat> {
    let g = calc.as_graph()?;
    let MetricData::GraphWeights(w) = &metric.data else {
        return None;
    };
    let mut out = CMat::zeros(calc.dim_a(), calc.dim_o1());
    for (u, &(x, y)) in g.arrows.iter().enumerate() {
        out[(y, u)] += w[g.arrow_idx[&(y, x)]];
        let mut sum = cr(0.0);
        for &(x2, z) in &g.arrows {
            if x2 == x {
                sum += w[g.arrow_idx[&(x, z)]] * g.sigma_entry(&conn.sigma, x, x, z, y);
            }
        }
        out[(x, u)] -= sum;
    }
    Some(out)
}
