//! First-order differential calculi with explicit bases for Ω¹, Ω¹⊗Ω¹ and
//! Ω¹⊗Ω¹⊗Ω¹, in two backends: weighted-graph and free-module.
//!
//! Every structure map (d, star, the flip-star involution † on two-tensors,
//! module actions) is materialised as a ℂ-linear — or, for the antilinear
//! ones, matrix-plus-conjugation — operator on the underlying ℂ-spaces, so
//! that downstream composition and residual checks are uniform matrix
//! algebra. Tensor products over A are represented by their canonical bases
//! (two-steps for graphs, `e_a sⁱ⊗sʲ` for free modules), never by numerical
//! quotients of tensor products over ℂ.

mod free;
mod graph;

pub use free::{FreeData, WedgeData};
pub use graph::GraphData;

use crate::algebra::Algebra;
use crate::check::{Error, Result};
use crate::linalg::{cr, fro, unit_vec, Antilinear, CMat, CVec};

#[derive(Debug, Clone)]
pub enum Backend {
    Graph(GraphData),
    Free(FreeData),
}

#[derive(Debug, Clone)]
pub struct Calculus {
    pub algebra: Algebra,
    pub backend: Backend,
    dim_o1: usize,
    dim_o2: usize,
    dim_o3: usize,
    /// d: A → Ω¹.
    pub d_mat: CMat,
    /// Antilinear star on Ω¹.
    pub star1: Antilinear,
    /// Antilinear involution † = flip∘(*⊗*) on Ω¹⊗Ω¹.
    pub dagger2: Antilinear,
    /// Inner form θ with da = [θ, a].
    pub theta: CVec,
}

const BUILD_TOL: f64 = 1e-12;

impl Calculus {
    // ------------------------------------------------------------------
    // constructors

    /// Graph calculus on a bidirected graph given by vertex labels and
    /// arrows (pairs of labels). Every arrow must have its reverse; no
    /// self-loops.
    pub fn graph(vertices: &[String], arrow_labels: &[(String, String)]) -> Result<Self> {
        let algebra = Algebra::functions(vertices)?;
        let mut arrows = Vec::with_capacity(arrow_labels.len());
        for (a, b) in arrow_labels {
            let x = vertices
                .iter()
                .position(|v| v == a)
                .ok_or_else(|| Error::InvalidModel(format!("unknown vertex '{a}'")))?;
            let y = vertices
                .iter()
                .position(|v| v == b)
                .ok_or_else(|| Error::InvalidModel(format!("unknown vertex '{b}'")))?;
            arrows.push((x, y));
        }
        let data = GraphData::new(vertices.to_vec(), arrows)?;
        let na = algebra.dim();
        let n1 = data.arrows.len();
        let n2 = data.two_steps.len();
        let n3 = data.three_steps.len();

        let mut d_mat = CMat::zeros(n1, na);
        for (u, &(x, y)) in data.arrows.iter().enumerate() {
            d_mat[(u, y)] += cr(1.0);
            d_mat[(u, x)] -= cr(1.0);
        }
        let mut star1 = CMat::zeros(n1, n1);
        for (u, &(x, y)) in data.arrows.iter().enumerate() {
            star1[(data.arrow_idx[&(y, x)], u)] = cr(-1.0);
        }
        let mut dagger2 = CMat::zeros(n2, n2);
        for (t, &(x, w, y)) in data.two_steps.iter().enumerate() {
            dagger2[(data.two_step_idx[&(y, w, x)], t)] = cr(1.0);
        }
        let theta = CVec::from_element(n1, cr(1.0));

        let calc = Calculus {
            algebra,
            backend: Backend::Graph(data),
            dim_o1: n1,
            dim_o2: n2,
            dim_o3: n3,
            d_mat,
            star1: Antilinear::new(star1),
            dagger2: Antilinear::new(dagger2),
            theta,
        };
        calc.validate()?;
        Ok(calc)
    }

    /// Free-module calculus with central basis forms s¹..sᵏ, inner form
    /// θ = Σ theta_coeffs[i]·sⁱ and star matrix S on the basis forms.
    pub fn free(
        algebra: Algebra,
        labels: Vec<String>,
        theta_coeffs: Vec<CVec>,
        star_k: CMat,
        wedge: Option<WedgeData>,
    ) -> Result<Self> {
        let k = labels.len();
        if k == 0 {
            return Err(Error::InvalidModel("free calculus needs rank ≥ 1".into()));
        }
        if theta_coeffs.len() != k {
            return Err(Error::Dimension("theta needs one coefficient per basis form".into()));
        }
        if star_k.nrows() != k || star_k.ncols() != k {
            return Err(Error::Dimension("star matrix must be k×k".into()));
        }
        let na = algebra.dim();
        for t in &theta_coeffs {
            if t.len() != na {
                return Err(Error::Dimension("theta coefficient length".into()));
            }
        }
        if let Some(w) = &wedge {
            let e = w.ext_labels.len();
            if w.wedge_coeffs.len() != k
                || w.wedge_coeffs.iter().any(|r| r.len() != k)
                || w.wedge_coeffs
                    .iter()
                    .flatten()
                    .any(|v| v.len() != e)
                || w.d_one_forms.len() != k
                || w.d_one_forms.iter().any(|v| v.len() != e * na)
            {
                return Err(Error::Dimension("wedge relation table shape".into()));
            }
        }

        let n1 = k * na;
        let n2 = k * k * na;
        let n3 = k * k * k * na;

        // d(e_a) block i = [θᵢ, e_a]
        let mut d_mat = CMat::zeros(n1, na);
        for i in 0..k {
            let ad = algebra.left_mult(&theta_coeffs[i]) - algebra.right_mult(&theta_coeffs[i]);
            for a in 0..na {
                for b in 0..na {
                    d_mat[(i * na + b, a)] = ad[(b, a)];
                }
            }
        }
        // (e_a sⁱ)* = Σⱼ S[i][j] (e_a)* sʲ
        let mut star1 = CMat::zeros(n1, n1);
        let star_a = algebra.star_matrix();
        for i in 0..k {
            for j in 0..k {
                if star_k[(i, j)] != cr(0.0) {
                    for a in 0..na {
                        for b in 0..na {
                            star1[(j * na + b, i * na + a)] += star_k[(i, j)] * star_a[(b, a)];
                        }
                    }
                }
            }
        }
        // †(e_a sⁱ⊗sʲ) = Σ_{l,m} S[i][l] S[j][m] (e_a)* sᵐ⊗sˡ
        let mut dagger2 = CMat::zeros(n2, n2);
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    for m in 0..k {
                        let s = star_k[(i, l)] * star_k[(j, m)];
                        if s != cr(0.0) {
                            for a in 0..na {
                                for b in 0..na {
                                    dagger2[((m * k + l) * na + b, (i * k + j) * na + a)] +=
                                        s * star_a[(b, a)];
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut theta = CVec::zeros(n1);
        for i in 0..k {
            for a in 0..na {
                theta[i * na + a] = theta_coeffs[i][a];
            }
        }

        let calc = Calculus {
            algebra,
            backend: Backend::Free(FreeData {
                k,
                labels,
                theta_coeffs,
                star_k,
                wedge,
            }),
            dim_o1: n1,
            dim_o2: n2,
            dim_o3: n3,
            d_mat,
            star1: Antilinear::new(star1),
            dagger2: Antilinear::new(dagger2),
            theta,
        };
        calc.validate()?;
        Ok(calc)
    }

    fn validate(&self) -> Result<()> {
        let inv1 = self.star1.involution_defect();
        if inv1 > BUILD_TOL {
            return Err(Error::InvalidModel(format!(
                "star is not an involution on one-forms (residual {inv1:.3e})"
            )));
        }
        let inv2 = self.dagger2.involution_defect();
        if inv2 > BUILD_TOL {
            return Err(Error::InvalidModel(format!(
                "dagger is not an involution on two-tensors (residual {inv2:.3e})"
            )));
        }
        let anti_theta = (self.star1.apply(&self.theta) + &self.theta).norm();
        if anti_theta > BUILD_TOL {
            return Err(Error::InvalidModel(format!(
                "inner form fails θ* = −θ (residual {anti_theta:.3e})"
            )));
        }
        let leib = self.leibniz_residual();
        if leib > BUILD_TOL {
            return Err(Error::InvalidModel(format!(
                "differential fails the Leibniz rule (residual {leib:.3e})"
            )));
        }
        let inner = self.inner_residual();
        if inner > BUILD_TOL {
            return Err(Error::InvalidModel(format!(
                "differential is not inner for θ (residual {inner:.3e})"
            )));
        }
        Ok(())
    }

    // ------------------------------------------------------------------
    // dimensions and accessors

    pub fn dim_a(&self) -> usize {
        self.algebra.dim()
    }
    pub fn dim_o1(&self) -> usize {
        self.dim_o1
    }
    pub fn dim_o2(&self) -> usize {
        self.dim_o2
    }
    pub fn dim_o3(&self) -> usize {
        self.dim_o3
    }

    pub fn as_graph(&self) -> Option<&GraphData> {
        match &self.backend {
            Backend::Graph(g) => Some(g),
            Backend::Free(_) => None,
        }
    }

    pub fn as_free(&self) -> Option<&FreeData> {
        match &self.backend {
            Backend::Graph(_) => None,
            Backend::Free(f) => Some(f),
        }
    }

    pub fn differential(&self, a: &CVec) -> CVec {
        &self.d_mat * a
    }

    /// One-form with a single algebra coefficient on basis form `i`
    /// (free backend) .
    pub fn free_one_form(&self, i: usize, coeff: &CVec) -> CVec {
        let na = self.dim_a();
        let mut v = CVec::zeros(self.dim_o1);
        for a in 0..na {
            v[i * na + a] = coeff[a];
        }
        v
    }

    /// The coefficient of basis form `i` in a free-backend one-form.
    pub fn free_coefficient(&self, v: &CVec, i: usize) -> CVec {
        let na = self.dim_a();
        CVec::from_fn(na, |a, _| v[i * na + a])
    }

    /// Basis one-form ω_{x→y} (graph backend).
    pub fn graph_one_form(&self, x: usize, y: usize) -> Option<CVec> {
        let g = self.as_graph()?;
        let u = g.arrow_index(x, y)?;
        Some(unit_vec(self.dim_o1, u))
    }

    // ------------------------------------------------------------------
    // module actions

    pub fn lmul_o1(&self, a: &CVec) -> CMat {
        match &self.backend {
            Backend::Graph(g) => CMat::from_fn(self.dim_o1, self.dim_o1, |i, j| {
                if i == j {
                    a[g.arrows[i].0]
                } else {
                    cr(0.0)
                }
            }),
            Backend::Free(f) => block_diag(&self.algebra.left_mult(a), f.k),
        }
    }

    pub fn rmul_o1(&self, a: &CVec) -> CMat {
        match &self.backend {
            Backend::Graph(g) => CMat::from_fn(self.dim_o1, self.dim_o1, |i, j| {
                if i == j {
                    a[g.arrows[i].1]
                } else {
                    cr(0.0)
                }
            }),
            Backend::Free(f) => block_diag(&self.algebra.right_mult(a), f.k),
        }
    }

    pub fn lmul_o2(&self, a: &CVec) -> CMat {
        match &self.backend {
            Backend::Graph(g) => CMat::from_fn(self.dim_o2, self.dim_o2, |i, j| {
                if i == j {
                    a[g.two_steps[i].0]
                } else {
                    cr(0.0)
                }
            }),
            Backend::Free(f) => block_diag(&self.algebra.left_mult(a), f.k * f.k),
        }
    }

    pub fn rmul_o2(&self, a: &CVec) -> CMat {
        match &self.backend {
            Backend::Graph(g) => CMat::from_fn(self.dim_o2, self.dim_o2, |i, j| {
                if i == j {
                    a[g.two_steps[i].2]
                } else {
                    cr(0.0)
                }
            }),
            Backend::Free(f) => block_diag(&self.algebra.right_mult(a), f.k * f.k),
        }
    }

    // ------------------------------------------------------------------
    // tensor products over A on canonical representatives

    /// ξ⊗η of two one-forms.
    pub fn tensor_11(&self, u: &CVec, v: &CVec) -> CVec {
        let mut out = CVec::zeros(self.dim_o2);
        match &self.backend {
            Backend::Graph(g) => {
                for (t, &(x, w, y)) in g.two_steps.iter().enumerate() {
                    out[t] = u[g.arrow_idx[&(x, w)]] * v[g.arrow_idx[&(w, y)]];
                }
            }
            Backend::Free(f) => {
                let na = self.dim_a();
                for i in 0..f.k {
                    let ui = self.free_coefficient(u, i);
                    if ui.iter().all(|z| *z == cr(0.0)) {
                        continue;
                    }
                    let lm = self.algebra.left_mult(&ui);
                    for j in 0..f.k {
                        let vj = CVec::from_fn(na, |a, _| v[j * na + a]);
                        let prod = &lm * vj;
                        for a in 0..na {
                            out[(i * f.k + j) * na + a] = prod[a];
                        }
                    }
                }
            }
        }
        out
    }

    /// ξ⊗T of a one-form and a two-tensor.
    pub fn tensor_12(&self, u: &CVec, t: &CVec) -> CVec {
        let mut out = CVec::zeros(self.dim_o3);
        match &self.backend {
            Backend::Graph(g) => {
                for (s, &(x, w, z, y)) in g.three_steps.iter().enumerate() {
                    out[s] = u[g.arrow_idx[&(x, w)]] * t[g.two_step_idx[&(w, z, y)]];
                }
            }
            Backend::Free(f) => {
                let na = self.dim_a();
                for i in 0..f.k {
                    let ui = self.free_coefficient(u, i);
                    if ui.iter().all(|z| *z == cr(0.0)) {
                        continue;
                    }
                    let lm = self.algebra.left_mult(&ui);
                    for jl in 0..f.k * f.k {
                        let tc = CVec::from_fn(na, |a, _| t[jl * na + a]);
                        let prod = &lm * tc;
                        for a in 0..na {
                            out[(i * f.k * f.k + jl) * na + a] = prod[a];
                        }
                    }
                }
            }
        }
        out
    }

    /// T⊗ξ of a two-tensor and a one-form.
    pub fn tensor_21(&self, t: &CVec, v: &CVec) -> CVec {
        let mut out = CVec::zeros(self.dim_o3);
        match &self.backend {
            Backend::Graph(g) => {
                for (s, &(x, w, z, y)) in g.three_steps.iter().enumerate() {
                    out[s] = t[g.two_step_idx[&(x, w, z)]] * v[g.arrow_idx[&(z, y)]];
                }
            }
            Backend::Free(f) => {
                let na = self.dim_a();
                for ij in 0..f.k * f.k {
                    let tc = CVec::from_fn(na, |a, _| t[ij * na + a]);
                    if tc.iter().all(|z| *z == cr(0.0)) {
                        continue;
                    }
                    let lm = self.algebra.left_mult(&tc);
                    for l in 0..f.k {
                        let vl = CVec::from_fn(na, |a, _| v[l * na + a]);
                        let prod = &lm * vl;
                        for a in 0..na {
                            out[(ij * f.k + l) * na + a] = prod[a];
                        }
                    }
                }
            }
        }
        out
    }

    /// Matrix of `v ↦ ξ⊗v` on Ω¹.
    pub fn tensor_with_left(&self, xi: &CVec) -> CMat {
        let mut m = CMat::zeros(self.dim_o2, self.dim_o1);
        for u in 0..self.dim_o1 {
            m.set_column(u, &self.tensor_11(xi, &unit_vec(self.dim_o1, u)));
        }
        m
    }

    /// Matrix of `v ↦ v⊗ξ` on Ω¹.
    pub fn tensor_with_right(&self, xi: &CVec) -> CMat {
        let mut m = CMat::zeros(self.dim_o2, self.dim_o1);
        for u in 0..self.dim_o1 {
            m.set_column(u, &self.tensor_11(&unit_vec(self.dim_o1, u), xi));
        }
        m
    }

    // ------------------------------------------------------------------
    // canonical splits of tensor bases

    /// Split a basis two-tensor into (full first factor, coefficient-free
    /// second factor), both as Ω¹ vectors.
    fn split_o2_basis(&self, b: usize) -> (CVec, CVec) {
        match &self.backend {
            Backend::Graph(g) => {
                let (x, w, y) = g.two_steps[b];
                (
                    unit_vec(self.dim_o1, g.arrow_idx[&(x, w)]),
                    unit_vec(self.dim_o1, g.arrow_idx[&(w, y)]),
                )
            }
            Backend::Free(f) => {
                let na = self.dim_a();
                let a = b % na;
                let ij = b / na;
                let (i, j) = (ij / f.k, ij % f.k);
                (
                    self.free_one_form(i, &unit_vec(na, a)),
                    self.free_one_form(j, self.algebra.unit()),
                )
            }
        }
    }

    /// Split a basis three-tensor into (full first two factors as an Ω²
    /// vector, coefficient-free last factor as an Ω¹ vector).
    fn split_o3_basis(&self, b: usize) -> (CVec, CVec) {
        match &self.backend {
            Backend::Graph(g) => {
                let (x, w, z, y) = g.three_steps[b];
                (
                    unit_vec(self.dim_o2, g.two_step_idx[&(x, w, z)]),
                    unit_vec(self.dim_o1, g.arrow_idx[&(z, y)]),
                )
            }
            Backend::Free(f) => {
                let na = self.dim_a();
                let a = b % na;
                let ijl = b / na;
                let (ij, l) = (ijl / f.k, ijl % f.k);
                let mut first = CVec::zeros(self.dim_o2);
                first[ij * na + a] = cr(1.0);
                (first, self.free_one_form(l, self.algebra.unit()))
            }
        }
    }

    // ------------------------------------------------------------------
    // tensor extensions of maps

    /// `m⊗id: Ω¹⊗Ω¹ → Ω¹⊗Ω¹⊗Ω¹` for `m: Ω¹ → Ω¹⊗Ω¹` applied to the full
    /// first factor.
    pub fn map_first_12(&self, m: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim_o3, self.dim_o2);
        for b in 0..self.dim_o2 {
            let (first, second) = self.split_o2_basis(b);
            out.set_column(b, &self.tensor_21(&(m * first), &second));
        }
        out
    }

    /// `id⊗m: Ω¹⊗Ω¹ → Ω¹⊗Ω¹⊗Ω¹` on canonical representatives, with the
    /// coefficient kept on the far left.
    pub fn map_second_12(&self, m: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim_o3, self.dim_o2);
        for b in 0..self.dim_o2 {
            let (first, second) = self.split_o2_basis(b);
            out.set_column(b, &self.tensor_12(&first, &(m * second)));
        }
        out
    }

    /// `m⊗id: Ω¹⊗Ω¹⊗Ω¹ → Ω¹⊗Ω¹⊗Ω¹` for `m: Ω¹⊗Ω¹ → Ω¹⊗Ω¹` acting on the
    /// first two factors.
    pub fn map_first_22(&self, m: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim_o3, self.dim_o3);
        for b in 0..self.dim_o3 {
            let (first, last) = self.split_o3_basis(b);
            out.set_column(b, &self.tensor_21(&(m * first), &last));
        }
        out
    }

    /// `id⊗m: Ω¹⊗Ω¹ → Ω¹⊗Ω¹` for a bimodule map `m: Ω¹ → Ω¹`.
    pub fn map_second_11(&self, m: &CMat) -> CMat {
        let mut out = CMat::zeros(self.dim_o2, self.dim_o2);
        for b in 0..self.dim_o2 {
            let (first, second) = self.split_o2_basis(b);
            out.set_column(b, &self.tensor_11(&first, &(m * second)));
        }
        out
    }

    // ------------------------------------------------------------------
    // structural residuals

    /// Max residual of `d(ab) − (da)b − a(db)` over basis pairs.
    pub fn leibniz_residual(&self) -> f64 {
        let na = self.dim_a();
        let mut res: f64 = 0.0;
        for i in 0..na {
            let ei = self.algebra.basis_element(i);
            let dei = self.differential(&ei);
            for j in 0..na {
                let ej = self.algebra.basis_element(j);
                let lhs = self.differential(&self.algebra.mul(&ei, &ej));
                let rhs = self.rmul_o1(&ej) * &dei + self.lmul_o1(&ei) * self.differential(&ej);
                res = res.max((lhs - rhs).norm());
            }
        }
        res
    }

    /// Max residual of `da − (θa − aθ)` over the basis.
    pub fn inner_residual(&self) -> f64 {
        let mut res: f64 = 0.0;
        for i in 0..self.dim_a() {
            let e = self.algebra.basis_element(i);
            let inner = self.rmul_o1(&e) * &self.theta - self.lmul_o1(&e) * &self.theta;
            res = res.max((self.differential(&e) - inner).norm());
        }
        res
    }

    /// Residual of a matrix being a bimodule map on Ω¹.
    pub fn bimodule_residual_o1(&self, m: &CMat) -> f64 {
        let mut res: f64 = 0.0;
        for i in 0..self.dim_a() {
            let e = self.algebra.basis_element(i);
            res = res.max(fro(&(m * self.lmul_o1(&e) - self.lmul_o1(&e) * m)));
            res = res.max(fro(&(m * self.rmul_o1(&e) - self.rmul_o1(&e) * m)));
        }
        res
    }

    /// Residual of a matrix being a bimodule map Ω¹⊗Ω¹ → Ω¹⊗Ω¹.
    pub fn bimodule_residual_o2(&self, m: &CMat) -> f64 {
        let mut res: f64 = 0.0;
        for i in 0..self.dim_a() {
            let e = self.algebra.basis_element(i);
            res = res.max(fro(&(m * self.lmul_o2(&e) - self.lmul_o2(&e) * m)));
            res = res.max(fro(&(m * self.rmul_o2(&e) - self.rmul_o2(&e) * m)));
        }
        res
    }

    /// Residual of a matrix being a bimodule map Ω¹ → Ω¹⊗Ω¹.
    pub fn bimodule_residual_12(&self, m: &CMat) -> f64 {
        let mut res: f64 = 0.0;
        for i in 0..self.dim_a() {
            let e = self.algebra.basis_element(i);
            res = res.max(fro(&(m * self.lmul_o1(&e) - self.lmul_o2(&e) * m)));
            res = res.max(fro(&(m * self.rmul_o1(&e) - self.rmul_o2(&e) * m)));
        }
        res
    }
}

/// Block-diagonal matrix with `copies` copies of `m`.
fn block_diag(m: &CMat, copies: usize) -> CMat {
    let n = m.nrows();
    let mut out = CMat::zeros(n * copies, n * copies);
    for c in 0..copies {
        for i in 0..n {
            for j in 0..n {
                out[(c * n + i, c * n + j)] = m[(i, j)];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use proptest::prelude::*;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn arrows(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn two_node() -> Calculus {
        Calculus::graph(&labels(&["x", "y"]), &arrows(&[("x", "y"), ("y", "x")])).unwrap()
    }

    fn complete_graph(n: usize) -> Calculus {
        let vs: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut ar = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    ar.push((vs[i].clone(), vs[j].clone()));
                }
            }
        }
        Calculus::graph(&vs, &ar).unwrap()
    }

    fn m2_calculus() -> Calculus {
        let algebra = Algebra::matrix_units(2);
        let star_k = CMat::from_row_slice(2, 2, &[cr(0.0), cr(-1.0), cr(-1.0), cr(0.0)]);
        Calculus::free(
            algebra,
            vec!["s".into(), "t".into()],
            vec![unit_vec(4, 1), unit_vec(4, 2)],
            star_k,
            None,
        )
        .unwrap()
    }

    #[test]
    fn two_node_enumeration() {
        let calc = two_node();
        let g = calc.as_graph().unwrap();
        assert_eq!(g.arrows.len(), 2);
        assert_eq!(g.two_steps, vec![(0, 1, 0), (1, 0, 1)]);
    }

    #[test]
    fn triangle_enumeration_matches_counting_oracle() {
        let calc = complete_graph(3);
        let g = calc.as_graph().unwrap();
        // oracle: ordered vertex pairs for arrows, composable arrow pairs
        // for two-steps
        let mut arrow_count = 0;
        let mut two_step_count = 0;
        for x in 0..3 {
            for y in 0..3 {
                if x != y {
                    arrow_count += 1;
                    for z in 0..3 {
                        if z != y {
                            two_step_count += 1;
                        }
                    }
                }
            }
        }
        assert_eq!(g.arrows.len(), arrow_count);
        assert_eq!(arrow_count, 6);
        assert_eq!(g.two_steps.len(), two_step_count);
        assert_eq!(two_step_count, 12);
    }

    #[test]
    fn one_directional_arrow_rejected() {
        let res = Calculus::graph(&labels(&["x", "y"]), &arrows(&[("x", "y")]));
        assert!(matches!(res, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn self_loop_rejected() {
        let res = Calculus::graph(
            &labels(&["x", "y"]),
            &arrows(&[("x", "x"), ("x", "y"), ("y", "x")]),
        );
        assert!(matches!(res, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn graph_differential_of_vertex_function() {
        let calc = two_node();
        // d δ_x = ω_{y→x} − ω_{x→y}
        let d = calc.differential(&calc.algebra.basis_element(0));
        let expected = calc.graph_one_form(1, 0).unwrap() - calc.graph_one_form(0, 1).unwrap();
        assert!((d - expected).norm() < 1e-15);
    }

    #[test]
    fn differential_of_unit_vanishes() {
        for calc in [two_node(), complete_graph(3), m2_calculus()] {
            assert!(calc.differential(&calc.algebra.unit().clone()).norm() < 1e-14);
        }
    }

    #[test]
    fn graph_dagger_on_back_and_forth_tensor() {
        let calc = two_node();
        // †(ω_{x→y}⊗ω_{y→x}) = ω_{x→y}⊗ω_{y→x}: two star signs cancel
        let t = calc.tensor_11(
            &calc.graph_one_form(0, 1).unwrap(),
            &calc.graph_one_form(1, 0).unwrap(),
        );
        assert!((calc.dagger2.apply(&t) - &t).norm() < 1e-15);
    }

    #[test]
    fn m2_theta_antiself_adjoint_and_inner() {
        let calc = m2_calculus();
        assert!((calc.star1.apply(&calc.theta) + &calc.theta).norm() < 1e-14);
        assert!(calc.inner_residual() < 1e-14);
        assert!(calc.leibniz_residual() < 1e-14);
    }

    #[test]
    fn m2_identity_star_matrix_rejected() {
        // with S = id the inner form would satisfy θ* = +θ ≠ −θ
        let algebra = Algebra::matrix_units(2);
        let res = Calculus::free(
            algebra,
            vec!["s".into(), "t".into()],
            vec![unit_vec(4, 1), unit_vec(4, 2)],
            CMat::identity(2, 2),
            None,
        );
        assert!(matches!(res, Err(Error::InvalidModel(_))));
    }

    #[test]
    fn m2_dagger_fixes_s_tensor_t() {
        let calc = m2_calculus();
        // (s⊗t)† = t*⊗s* flipped = s⊗t
        let s = calc.free_one_form(0, calc.algebra.unit());
        let t = calc.free_one_form(1, calc.algebra.unit());
        let st = calc.tensor_11(&s, &t);
        assert!((calc.dagger2.apply(&st) - &st).norm() < 1e-14);
    }

    #[test]
    fn tensor_extension_maps_compose_on_graphs() {
        // (m⊗id) then (id⊗( ,)-style contraction shapes must agree with
        // direct evaluation on a concrete two-step
        let calc = complete_graph(3);
        let g = calc.as_graph().unwrap();
        let m = calc.tensor_with_left(&calc.theta); // ω ↦ θ⊗ω
        let ext = calc.map_first_12(&m);
        // θ⊗(first factor)⊗(second factor) of the two-step 0→1→2
        let b = g.two_step_idx[&(0, 1, 2)];
        let col = ext.column(b).into_owned();
        let mut expected = CVec::zeros(calc.dim_o3());
        for &(w, x2) in g.arrows.iter() {
            if x2 == 0 {
                expected[g.three_step_idx[&(w, 0, 1, 2)]] = cr(1.0);
            }
        }
        assert!((col - expected).norm() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn dagger_is_an_antilinear_involution(
            re in -3.0f64..3.0, im in -3.0f64..3.0, seed in 0usize..12
        ) {
            for calc in [two_node(), complete_graph(3), m2_calculus()] {
                let n2 = calc.dim_o2();
                let v = CVec::from_fn(n2, |i, _| {
                    c(re * ((i + seed) as f64).sin(), im * ((i * 3 + 1) as f64).cos())
                });
                // involution
                prop_assert!((calc.dagger2.apply(&calc.dagger2.apply(&v)) - &v).norm() < 1e-12);
                // antilinearity
                let z = c(re, im);
                let lhs = calc.dagger2.apply(&(&v * z));
                let rhs = calc.dagger2.apply(&v) * z.conj();
                prop_assert!((lhs - rhs).norm() < 1e-12);
            }
        }

        #[test]
        fn star_is_an_antilinear_involution(
            re in -3.0f64..3.0, im in -3.0f64..3.0, seed in 0usize..12
        ) {
            for calc in [two_node(), complete_graph(4), m2_calculus()] {
                let n1 = calc.dim_o1();
                let v = CVec::from_fn(n1, |i, _| {
                    c(im * ((i + 2 * seed) as f64).cos(), re * ((i + 1) as f64).sin())
                });
                prop_assert!((calc.star1.apply(&calc.star1.apply(&v)) - &v).norm() < 1e-12);
                let z = c(re, im);
                let lhs = calc.star1.apply(&(&v * z));
                let rhs = calc.star1.apply(&v) * z.conj();
                prop_assert!((lhs - rhs).norm() < 1e-12);
            }
        }

        #[test]
        fn tensor_products_respect_middle_coefficients(
            re in -3.0f64..3.0, im in -3.0f64..3.0
        ) {
            // (ξa)⊗η = ξ⊗(aη) on canonical representatives
            for calc in [two_node(), complete_graph(3), m2_calculus()] {
                let a = CVec::from_fn(calc.dim_a(), |i, _| c(re + i as f64, im));
                let n1 = calc.dim_o1();
                let xi = CVec::from_fn(n1, |i, _| c((i as f64).cos(), re));
                let eta = CVec::from_fn(n1, |i, _| c(im, (i as f64).sin()));
                let lhs = calc.tensor_11(&(calc.rmul_o1(&a) * &xi), &eta);
                let rhs = calc.tensor_11(&xi, &(calc.lmul_o1(&a) * &eta));
                prop_assert!((lhs - rhs).norm() < 1e-10);
            }
        }
    }
}
