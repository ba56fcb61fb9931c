//! Coupling of the Dirac operator to an external 1-form on the trivial line
//! bundle E = A: α-shifted connections and Dirac operators, the modified
//! charge conjugation, right-handed operators and the dagger intertwining
//! check.
//!
//! Connections on E = A are classified by a 1-form α = ζ(θ) + α₀ with ζ a
//! bimodule map on Ω¹ and α₀ central (graphs admit no nonzero central
//! 1-forms). The coupled operator is
//! `D_α(a+ω) = D(a+ω) + aα + (ω,α)` with `J_α(a+ω) = a* + (id−ζ)(ω*)`,
//! assuming the base metric σ-symmetric for the closed form.

use crate::calculus::Calculus;
use crate::check::{CheckResult, Error, Result, VerificationReport};
use crate::linalg::{conj_mat, fro, unit_vec, Antilinear, CMat, CVec};
use crate::qrg::{
    check_metric_reality, check_sigma_symmetric, check_star_preserving, Connection, ConnectionKind,
};
use crate::spinor::SpinorPackage;

#[derive(Debug, Clone)]
pub struct GaugeData {
    /// Bimodule map ζ: Ω¹ → Ω¹.
    pub zeta: CMat,
    /// Central one-form α₀ (zero on graph backends).
    pub alpha0: CVec,
    /// α = ζ(θ) + α₀.
    pub alpha: CVec,
    /// ∇_A: A → Ω¹ (under Ω¹⊗A ≅ Ω¹), a ↦ da + aα.
    pub nabla_a: CMat,
    /// σ_A as a map Ω¹ → Ω¹, ω ↦ (id−ζ)ω.
    pub sigma_a: CMat,
}

pub fn make_gauge(calc: &Calculus, zeta: CMat, alpha0: CVec, tol: f64) -> Result<GaugeData> {
    let n1 = calc.dim_o1();
    if zeta.nrows() != n1 || zeta.ncols() != n1 {
        return Err(Error::Dimension("zeta must act on one-forms".into()));
    }
    if alpha0.len() != n1 {
        return Err(Error::Dimension("alpha0 must be a one-form".into()));
    }
    let bim = calc.bimodule_residual_o1(&zeta);
    if bim > tol {
        return Err(Error::InvalidModel(format!(
            "zeta is not a bimodule map (residual {bim:.3e})"
        )));
    }
    let mut central: f64 = 0.0;
    for i in 0..calc.dim_a() {
        let e = calc.algebra.basis_element(i);
        central = central.max((calc.lmul_o1(&e) * &alpha0 - calc.rmul_o1(&e) * &alpha0).norm());
    }
    if central > tol {
        return Err(Error::InvalidModel(format!(
            "alpha0 is not central (residual {central:.3e})"
        )));
    }
    if calc.as_graph().is_some() && alpha0.norm() > 0.0 {
        return Err(Error::InvalidModel(
            "graph calculi admit no nonzero central one-forms".into(),
        ));
    }
    let alpha = &zeta * &calc.theta + &alpha0;
    let mut nabla_a = calc.d_mat.clone();
    for j in 0..calc.dim_a() {
        let col = calc.lmul_o1(&calc.algebra.basis_element(j)) * &alpha;
        for u in 0..n1 {
            nabla_a[(u, j)] += col[u];
        }
    }
    let sigma_a = CMat::identity(n1, n1) - &zeta;
    Ok(GaugeData {
        zeta,
        alpha0,
        alpha,
        nabla_a,
        sigma_a,
    })
}

/// Diagonal ζ on a graph backend from per-arrow coefficients.
pub fn graph_zeta(calc: &Calculus, coeffs: &[crate::linalg::C64]) -> Result<CMat> {
    let g = calc
        .as_graph()
        .ok_or_else(|| Error::InvalidModel("arrow coefficients need a graph calculus".into()))?;
    if coeffs.len() != g.arrows.len() {
        return Err(Error::Dimension("one zeta coefficient per arrow".into()));
    }
    Ok(CMat::from_fn(coeffs.len(), coeffs.len(), |i, j| {
        if i == j {
            coeffs[i]
        } else {
            crate::linalg::cr(0.0)
        }
    }))
}

/// ζ on a free backend from a k×k matrix on the basis forms.
pub fn free_zeta(calc: &Calculus, zk: &CMat) -> Result<CMat> {
    let f = calc
        .as_free()
        .ok_or_else(|| Error::InvalidModel("basis-form zeta needs a free calculus".into()))?;
    if zk.nrows() != f.k || zk.ncols() != f.k {
        return Err(Error::Dimension("zeta coefficients must be k×k".into()));
    }
    let na = calc.dim_a();
    let n1 = calc.dim_o1();
    let mut out = CMat::zeros(n1, n1);
    for i in 0..f.k {
        for j in 0..f.k {
            for a in 0..na {
                out[(j * na + a, i * na + a)] = zk[(j, i)];
            }
        }
    }
    Ok(out)
}

/// The minimally coupled connection on Ω¹ ≅ Ω¹⊗A:
/// `∇_α ω = ∇ω + σ(ω⊗α)` with braiding `σ_α(ω⊗η) = σ(ω⊗(id−ζ)η)`.
pub fn gauged_connection(calc: &Calculus, conn: &Connection, gauge: &GaugeData) -> Result<Connection> {
    let n1 = calc.dim_o1();
    let mut shift = CMat::zeros(calc.dim_o2(), n1);
    for u in 0..n1 {
        shift.set_column(u, &calc.tensor_11(&unit_vec(n1, u), &gauge.alpha));
    }
    let nabla = &conn.nabla + &conn.sigma * shift;
    let sigma = &conn.sigma * calc.map_second_11(&gauge.sigma_a);
    Connection::from_parts(calc, nabla, sigma, ConnectionKind::Explicit)
}

impl<'m> SpinorPackage<'m> {
    /// Couple the package to the gauge data: D becomes D_α, J becomes J_α;
    /// γ and the gram are unchanged. The report records the σ-symmetry
    /// precondition, the survival of [D,a] = (da)▷ and Dγ = −γD, the
    /// closed form versus the tensor-connection composition, and J_α² − id.
    pub fn gauged(&self, gauge: &GaugeData, tol: f64) -> (SpinorPackage<'m>, VerificationReport) {
        let calc = self.calc;
        let na = calc.dim_a();
        let n1 = calc.dim_o1();
        let mut report = VerificationReport::default();

        let sym = check_sigma_symmetric(calc, self.metric, self.conn, tol);
        let sym_ok = sym.passed;
        report.push(
            CheckResult {
                name: "gauge_sigma_symmetric_pre".into(),
                detail: "closed form assumes a sigma-symmetric base metric".into(),
                ..sym
            }
            .informational(),
        );

        let mut dirac = self.dirac.clone();
        // A block: a ↦ aα
        for j in 0..na {
            let col = calc.lmul_o1(&calc.algebra.basis_element(j)) * &gauge.alpha;
            for u in 0..n1 {
                dirac[(na + u, j)] += col[u];
            }
        }
        // Ω¹ block: ω ↦ (ω, α)
        for v in 0..n1 {
            let p = self.metric.pair(calc, &unit_vec(n1, v), &gauge.alpha);
            for i in 0..na {
                dirac[(i, na + v)] += p[i];
            }
        }

        let mut jmat = CMat::zeros(self.dim, self.dim);
        jmat.view_mut((0, 0), (na, na))
            .copy_from(calc.algebra.star_matrix());
        jmat.view_mut((na, na), (n1, n1))
            .copy_from(&(&gauge.sigma_a * &calc.star1.mat));

        let pkg = SpinorPackage {
            dirac,
            j: Antilinear::new(jmat),
            ..self.clone()
        };

        report.push(
            CheckResult::from_residual("j_alpha_squared", pkg.j.involution_defect(), tol)
                .informational(),
        );

        // [D_α, a] = (da)▷ survives the coupling
        let mut res_comm: f64 = 0.0;
        for i in 0..na {
            let e = calc.algebra.basis_element(i);
            let la = pkg.left_action(&e);
            let comm = &pkg.dirac * &la - &la * &pkg.dirac;
            res_comm = res_comm.max(fro(&(comm - pkg.clifford_action(&calc.differential(&e)))));
        }
        report.push(CheckResult::from_residual("gauge_commutator", res_comm, tol));
        report.push(CheckResult::from_residual(
            "gauge_gamma_anticommute",
            fro(&(&pkg.dirac * &pkg.gamma + &pkg.gamma * &pkg.dirac)),
            tol,
        ));

        // closed form versus the tensor-product connection composition
        match gauged_connection(calc, self.conn, gauge) {
            Ok(conn_a) => {
                let mut generic = CMat::zeros(self.dim, self.dim);
                generic
                    .view_mut((0, na), (na, n1))
                    .copy_from(&(&self.metric.eval * &conn_a.nabla));
                generic.view_mut((na, 0), (n1, na)).copy_from(&gauge.nabla_a);
                let res = fro(&(&pkg.dirac - generic));
                let mut check = CheckResult::from_residual("gauge_closed_form", res, tol)
                    .with_detail(format!("sigma-symmetric base: {sym_ok}"));
                if !sym_ok {
                    check = check.informational();
                }
                report.push(check);
            }
            Err(e) => {
                report.push(
                    CheckResult::not_applicable("gauge_closed_form", &format!("{e}")),
                );
            }
        }

        (pkg, report)
    }
}

/// Right-handed data: ∇^R = σ⁻¹∘∇, δ^R = ( , )∘∇^R, D^R = d + δ^R, and the
/// antilinear dagger map (a+ω) ↦ a* + ω* identifying S with S^R.
#[derive(Debug, Clone)]
pub struct RightPackage {
    pub delta_r: CMat,
    pub dirac_r: CMat,
    pub dagger: Antilinear,
}

/// Build the right-handed Dirac operator; `None` when σ is singular.
pub fn right_dirac(pkg: &SpinorPackage) -> Option<RightPackage> {
    let calc = pkg.calc;
    let sigma_inv = pkg.conn.sigma_inverse()?;
    let na = calc.dim_a();
    let n1 = calc.dim_o1();
    let delta_r = &pkg.metric.eval * sigma_inv * &pkg.conn.nabla;
    let mut dirac_r = CMat::zeros(pkg.dim, pkg.dim);
    dirac_r.view_mut((0, na), (na, n1)).copy_from(&delta_r);
    dirac_r.view_mut((na, 0), (n1, na)).copy_from(&calc.d_mat);
    let mut dmat = CMat::zeros(pkg.dim, pkg.dim);
    dmat.view_mut((0, 0), (na, na)).copy_from(calc.algebra.star_matrix());
    dmat.view_mut((na, na), (n1, n1)).copy_from(&calc.star1.mat);
    Some(RightPackage {
        delta_r,
        dirac_r,
        dagger: Antilinear::new(dmat),
    })
}

/// `†∘D = D^R∘†`. Runs even when the hypotheses (∇ *-preserving, metric
/// reality) fail, but is then annotated and informational.
pub fn check_dagger_intertwine(
    pkg: &SpinorPackage,
    rpkg: &RightPackage,
    tol: f64,
) -> CheckResult {
    let res = fro(&(&rpkg.dagger.mat * conj_mat(&pkg.dirac) - &rpkg.dirac_r * &rpkg.dagger.mat));
    let star_ok = check_star_preserving(pkg.calc, pkg.conn, tol).passed;
    let real_ok = check_metric_reality(pkg.calc, pkg.metric, tol).passed;
    let mut check = CheckResult::from_residual("dagger_intertwine", res, tol);
    if star_ok && real_ok {
        check = check.with_detail("hypotheses met: star-preserving connection, real metric".into());
    } else {
        check = check
            .with_detail(format!(
                "hypotheses unmet (star_preserving: {star_ok}, metric_reality: {real_ok})"
            ))
            .informational();
    }
    check
}

/// Right-handed isometry `⟨φ†, ψ†⟩^R = ⟨ψ, φ⟩`; for E = A the right gram
/// coincides with the gram of S, so this reduces to an isometry condition
/// on the dagger map. Requires ∫ to be an extended trace, annotated when
/// that fails.
pub fn check_right_isometry(pkg: &SpinorPackage, rpkg: &RightPackage, tol: f64) -> CheckResult {
    let res = fro(
        &(rpkg.dagger.mat.adjoint() * &pkg.gram * &rpkg.dagger.mat - pkg.gram.transpose()),
    );
    let trace_ok = pkg
        .verify_extended_trace_residual(tol);
    let mut check = CheckResult::from_residual("right_isometry", res, tol);
    if trace_ok <= tol {
        check = check.with_detail("hypothesis met: functional is an extended trace".into());
    } else {
        check = check
            .with_detail(format!(
                "hypothesis unmet: extended trace residual {trace_ok:.3e}"
            ))
            .informational();
    }
    check
}

impl<'m> SpinorPackage<'m> {
    fn verify_extended_trace_residual(&self, _tol: f64) -> f64 {
        let calc = self.calc;
        let n1 = calc.dim_o1();
        let mut res = self
            .functional
            .check_trace(&calc.algebra, 1e-30)
            .residual;
        for u in 0..n1 {
            for v in 0..n1 {
                let uv = self
                    .functional
                    .integrate(&self.metric.pair(calc, &unit_vec(n1, u), &unit_vec(n1, v)));
                let vu = self
                    .functional
                    .integrate(&self.metric.pair(calc, &unit_vec(n1, v), &unit_vec(n1, u)));
                res = res.max((uv - vu).norm());
            }
        }
        res
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr, unit_vec, CVec};
    use crate::models::{
        an_chain, fuzzy_sphere, m2, polygon, weighted_graph, GraphConnection, M2Case,
        M2Connection, Measure, ModelBundle, PolygonConnection, PolygonLambda,
    };
    use crate::qrg::ConnectionKind;
    use std::collections::BTreeMap;

    const TOL: f64 = 1e-9;
    const ROUND: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    fn two_node() -> ModelBundle {
        weighted_graph(
            &["x", "y"],
            &[("x", "y", -1.0), ("y", "x", -1.0)],
            Measure::Auto,
            GraphConnection::Bare,
        )
        .unwrap()
    }

    #[test]
    fn trivial_gauge_reproduces_differential_and_operators() {
        let b = two_node();
        let calc = &b.calc;
        let zeta = CMat::zeros(calc.dim_o1(), calc.dim_o1());
        let gauge = make_gauge(calc, zeta, CVec::zeros(calc.dim_o1()), TOL).unwrap();
        assert!(gauge.alpha.norm() == 0.0);
        assert!(fro(&(&gauge.nabla_a - &calc.d_mat)) == 0.0);
        let pkg = b.spinor();
        let (gauged, report) = pkg.gauged(&gauge, TOL);
        // bit-identical D and J
        assert_eq!(gauged.dirac, pkg.dirac);
        assert_eq!(gauged.j.mat, pkg.j.mat);
        assert!(report.overall());
        // ∇_α = ∇ for the trivial gauge
        let conn_a = gauged_connection(calc, &b.conn, &gauge).unwrap();
        assert!(fro(&(&conn_a.nabla - &b.conn.nabla)) == 0.0);
    }

    #[test]
    fn graph_zeta_assembles_the_coupling_one_form() {
        let b = polygon(4, PolygonLambda::Constant(-1.0), PolygonConnection::Bare).unwrap();
        let calc = &b.calc;
        let g = calc.as_graph().unwrap();
        let mut coeffs = vec![cr(0.0); g.arrows.len()];
        coeffs[g.arrow_index(0, 1).unwrap()] = c(0.0, 2.0);
        coeffs[g.arrow_index(2, 1).unwrap()] = cr(-1.0);
        let zeta = graph_zeta(calc, &coeffs).unwrap();
        let gauge = make_gauge(calc, zeta, CVec::zeros(calc.dim_o1()), TOL).unwrap();
        // α = ζ(θ) = Σ α_{x→y} ω_{x→y}
        let mut expected = CVec::zeros(calc.dim_o1());
        expected[g.arrow_index(0, 1).unwrap()] = c(0.0, 2.0);
        expected[g.arrow_index(2, 1).unwrap()] = cr(-1.0);
        assert!((gauge.alpha - expected).norm() < 1e-14);
    }

    #[test]
    fn graphs_reject_nonzero_alpha0() {
        let b = two_node();
        let calc = &b.calc;
        let zeta = CMat::zeros(calc.dim_o1(), calc.dim_o1());
        let a0 = unit_vec(calc.dim_o1(), 0);
        // a single arrow form is not even central, and graphs force α₀ = 0
        assert!(make_gauge(calc, zeta, a0, TOL).is_err());
    }

    #[test]
    fn free_backend_scalar_alpha0_is_central() {
        let b = m2(M2Case::II, -1.0, cr(0.0), M2Connection::Qlc).unwrap();
        let calc = &b.calc;
        let zeta = CMat::zeros(calc.dim_o1(), calc.dim_o1());
        let a0 = calc.free_one_form(0, calc.algebra.unit()) * c(0.0, 0.5)
            + calc.free_one_form(1, calc.algebra.unit()) * cr(1.0);
        let gauge = make_gauge(calc, zeta, a0.clone(), TOL).unwrap();
        assert!((gauge.alpha - a0).norm() < 1e-14);
    }

    #[test]
    fn bare_sigma_identity_gauged_connection_appends_alpha() {
        // with σ = id, ∇_α ω = ∇ω + ω⊗α
        let b = m2(M2Case::II, -1.0, cr(0.0), M2Connection::Bare).unwrap();
        let calc = &b.calc;
        let zk = CMat::from_row_slice(2, 2, &[cr(0.3), cr(0.0), cr(0.0), c(0.0, -0.2)]);
        let zeta = free_zeta(calc, &zk).unwrap();
        let gauge = make_gauge(calc, zeta, CVec::zeros(calc.dim_o1()), TOL).unwrap();
        let conn_a = gauged_connection(calc, &b.conn, &gauge).unwrap();
        let n1 = calc.dim_o1();
        for u in 0..n1 {
            let basis = unit_vec(n1, u);
            let expected =
                &b.conn.nabla * &basis + calc.tensor_11(&basis, &gauge.alpha);
            assert!((conn_a.nabla.column(u).into_owned() - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn two_node_gauged_dirac_closed_form() {
        let b = two_node();
        let calc = &b.calc;
        let g = calc.as_graph().unwrap();
        let mut coeffs = vec![cr(0.0); 2];
        coeffs[g.arrow_index(0, 1).unwrap()] = cr(1.0);
        let zeta = graph_zeta(calc, &coeffs).unwrap();
        let gauge = make_gauge(calc, zeta, CVec::zeros(calc.dim_o1()), TOL).unwrap();
        let pkg = b.spinor();
        let (gauged, report) = pkg.gauged(&gauge, TOL);
        assert!(report.get("gauge_closed_form").unwrap().passed);
        // D_α δ_x = D δ_x + ω_{x→y}
        let dx = pkg.embed(&calc.algebra.basis_element(0), &CVec::zeros(2));
        let base = &pkg.dirac * &dx;
        let shift = pkg.embed(&CVec::zeros(2), &calc.graph_one_form(0, 1).unwrap());
        assert!((&gauged.dirac * &dx - (base + shift)).norm() < 1e-14);
        // α_{y→x} = 0 leaves D ω_{x→y} unchanged
        let w = pkg.embed(&CVec::zeros(2), &calc.graph_one_form(0, 1).unwrap());
        assert!((&gauged.dirac * &w - &pkg.dirac * &w).norm() < 1e-14);
        // and J_α(ω_{x→y}) = (α_{y→x} − 1)ω_{y→x} = −ω_{y→x}
        let jw = gauged.j.apply(&w);
        let expected = pkg.embed(&CVec::zeros(2), &(calc.graph_one_form(1, 0).unwrap() * cr(-1.0)));
        assert!((jw - expected).norm() < 1e-14);
        // J_α² reported (not an involution in general, here it is)
        assert!(report.get("j_alpha_squared").is_some());
    }

    #[test]
    fn gauged_dirac_matches_graph_formulas_on_polygon() {
        // D_α(δ_x) = D(δ_x) + Σ α_{x→y} ω_{x→y};
        // D_α(ω_{x→y}) = D(ω_{x→y}) + λ_{x→y} α_{y→x} δ_x
        let b = polygon(5, PolygonLambda::Constant(-1.5), PolygonConnection::Qlc).unwrap();
        let calc = &b.calc;
        let g = calc.as_graph().unwrap();
        let coeffs: Vec<crate::linalg::C64> = (0..g.arrows.len())
            .map(|u| c(0.1 * u as f64, 0.05 * (u as f64 - 3.0)))
            .collect();
        let zeta = graph_zeta(calc, &coeffs).unwrap();
        let gauge = make_gauge(calc, zeta, CVec::zeros(calc.dim_o1()), TOL).unwrap();
        let pkg = b.spinor();
        let (gauged, report) = pkg.gauged(&gauge, TOL);
        assert!(report.get("gauge_closed_form").unwrap().passed);
        assert!(report.get("gauge_commutator").unwrap().passed);
        assert!(report.get("gauge_gamma_anticommute").unwrap().passed);
        let na = calc.dim_a();
        for x in 0..na {
            let v = pkg.embed(&calc.algebra.basis_element(x), &CVec::zeros(calc.dim_o1()));
            let mut shift = CVec::zeros(calc.dim_o1());
            for (u, &(x2, _)) in g.arrows.iter().enumerate() {
                if x2 == x {
                    shift[u] = coeffs[u];
                }
            }
            let expected = &pkg.dirac * &v + pkg.embed(&CVec::zeros(na), &shift);
            assert!((&gauged.dirac * &v - expected).norm() < 1e-13);
        }
        let crate::qrg::MetricData::GraphWeights(w) = &b.metric.data else {
            panic!()
        };
        for (u, &(x, y)) in g.arrows.iter().enumerate() {
            let v = pkg.embed(&CVec::zeros(na), &unit_vec(calc.dim_o1(), u));
            let rev = g.arrow_index(y, x).unwrap();
            let shift = calc.algebra.basis_element(x) * (w[u] * coeffs[rev]);
            let expected = &pkg.dirac * &v + pkg.embed(&shift, &CVec::zeros(calc.dim_o1()));
            assert!((&gauged.dirac * &v - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn right_dirac_trivial_for_bare() {
        let b = an_chain(3, &[-1.0, -2.0]).unwrap();
        let pkg = b.spinor();
        let rpkg = right_dirac(&pkg).unwrap();
        assert!(fro(&(&rpkg.dirac_r - &pkg.dirac)) < 1e-14);
        assert!(fro(&(&rpkg.delta_r - &pkg.delta)) < 1e-14);
    }

    #[test]
    fn right_divergence_agrees_iff_sigma_symmetric() {
        let symmetric = m2(M2Case::II, -1.0, c(0.0, 1.0), M2Connection::Qlc).unwrap();
        let pkg = symmetric.spinor();
        let rpkg = right_dirac(&pkg).unwrap();
        assert!(fro(&(&rpkg.delta_r - &pkg.delta)) < 1e-12);

        let asym = polygon(
            5,
            PolygonLambda::PerEdge(vec![-1.0, -2.0, -1.0, -1.5, -1.0]),
            PolygonConnection::Qlc,
        )
        .unwrap();
        let pkg2 = asym.spinor();
        let rpkg2 = right_dirac(&pkg2).unwrap();
        assert!(fro(&(&rpkg2.delta_r - &pkg2.delta)) > 1e-3);
    }

    #[test]
    fn dagger_intertwines_left_and_right_dirac() {
        // σ-symmetric models and Case (i) (hypotheses hold) all pass
        for bundle in [
            polygon(4, PolygonLambda::Constant(-1.0), PolygonConnection::Qlc).unwrap(),
            an_chain(4, &[-1.0; 3]).unwrap(),
            m2(M2Case::I, -1.0, cr(0.0), M2Connection::Qlc).unwrap(),
            m2(M2Case::II, -1.0, c(0.0, 1.0), M2Connection::Qlc).unwrap(),
            fuzzy_sphere(2, &ROUND).unwrap(),
        ] {
            let pkg = bundle.spinor();
            let rpkg = right_dirac(&pkg).unwrap();
            let check = check_dagger_intertwine(&pkg, &rpkg, TOL);
            assert!(check.passed, "{:?}: {:.3e}", bundle.conn.kind, check.residual);
            assert!(check.detail.contains("hypotheses met"));
        }
    }

    #[test]
    fn dagger_intertwine_annotated_when_hypotheses_fail() {
        // a non-unimodular σ block is not *-preserving
        let calc = crate::calculus::Calculus::graph(
            &["x".to_string(), "y".to_string()],
            &[("x".to_string(), "y".to_string()), ("y".to_string(), "x".to_string())],
        )
        .unwrap();
        let metric = crate::qrg::QuantumMetric::graph(&calc, &[-1.0, -1.0]).unwrap();
        let g = calc.as_graph().unwrap();
        let mut blocks = BTreeMap::new();
        blocks.insert((0usize, 0usize), CMat::from_element(1, 1, cr(2.0)));
        let sigma = g.sigma_from_blocks(&blocks).unwrap();
        let conn =
            crate::qrg::Connection::inner(&calc, sigma, None, ConnectionKind::Inner).unwrap();
        let functional = crate::algebra::Functional::new(CVec::from_element(2, cr(1.0)));
        let pkg = crate::spinor::build_spinor(&calc, &metric, &conn, &functional);
        let rpkg = right_dirac(&pkg).unwrap();
        let check = check_dagger_intertwine(&pkg, &rpkg, TOL);
        assert!(check.detail.contains("hypotheses unmet"));
        assert!(!check.required);
    }

    #[test]
    fn right_isometry_holds_under_extended_trace() {
        for bundle in [
            polygon(6, PolygonLambda::Constant(-2.0), PolygonConnection::Qlc).unwrap(),
            an_chain(5, &[-1.0; 4]).unwrap(),
            m2(M2Case::II, -1.0, cr(0.0), M2Connection::Qlc).unwrap(),
            fuzzy_sphere(3, &ROUND).unwrap(),
        ] {
            let pkg = bundle.spinor();
            let rpkg = right_dirac(&pkg).unwrap();
            let check = check_right_isometry(&pkg, &rpkg, TOL);
            assert!(check.passed, "{:?}", bundle.conn.kind);
            assert!(check.detail.contains("hypothesis met"));
        }
        // Case (i) fails the extended trace: annotated informational
        let b = m2(M2Case::I, -1.0, cr(0.0), M2Connection::Qlc).unwrap();
        let pkg = b.spinor();
        let rpkg = right_dirac(&pkg).unwrap();
        let check = check_right_isometry(&pkg, &rpkg, TOL);
        assert!(!check.required && check.detail.contains("hypothesis unmet"));
    }
}
