//! Builders assembling complete (calculus, metric, connection, functional)
//! bundles for the worked geometries: weighted bidirected graphs, chains
//! with q-integer measures, polygons, M₂(ℂ) and reduced fuzzy spheres.

use std::collections::BTreeMap;

use crate::algebra::{Algebra, Functional};
use crate::calculus::{Calculus, WedgeData};
use crate::check::{Error, Result};
use crate::linalg::{c, cr, unit_vec, CMat, CVec, C64};
use crate::qrg::{Connection, ConnectionKind, QuantumMetric};
use crate::spinor::{build_spinor, SpinorPackage};

#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub calc: Calculus,
    pub metric: QuantumMetric,
    pub conn: Connection,
    /// Named alternates (e.g. the bare connection when the primary is a
    /// QLC) for coincidence comparisons.
    pub alt_connections: Vec<(String, Connection)>,
    pub functional: Functional,
    pub notes: Vec<String>,
}

impl ModelBundle {
    pub fn spinor(&self) -> SpinorPackage<'_> {
        build_spinor(&self.calc, &self.metric, &self.conn, &self.functional)
    }

    pub fn spinor_with<'m>(&'m self, conn: &'m Connection) -> SpinorPackage<'m> {
        build_spinor(&self.calc, &self.metric, conn, &self.functional)
    }
}

#[derive(Debug, Clone)]
pub enum Measure {
    /// Solve `μ_y λ_{y→x} = μ_x λ_{x→y}` along a spanning tree per
    /// component, root normalised to 1; inconsistent cycles are rejected.
    Auto,
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone)]
pub enum GraphConnection {
    Bare,
    /// Per-endpoint-pair σ blocks (rows/columns ordered by intermediate
    /// vertex); missing pairs act as the identity.
    SigmaBlocks(BTreeMap<(String, String), CMat>),
}

/// Weighted bidirected graph: one real nonzero weight per arrow.
pub fn weighted_graph(
    vertices: &[&str],
    arrows: &[(&str, &str, f64)],
    mu: Measure,
    connection: GraphConnection,
) -> Result<ModelBundle> {
    let vlabels: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
    let alabels: Vec<(String, String)> = arrows
        .iter()
        .map(|(a, b, _)| (a.to_string(), b.to_string()))
        .collect();
    let calc = Calculus::graph(&vlabels, &alabels)?;
    let g = calc.as_graph().unwrap();
    let mut weights = vec![0.0; g.arrows.len()];
    for (a, b, l) in arrows {
        let x = g.vertex_index(a).unwrap();
        let y = g.vertex_index(b).unwrap();
        let idx = g
            .arrow_index(x, y)
            .ok_or_else(|| Error::InvalidModel(format!("unknown arrow {a}→{b}")))?;
        weights[idx] = *l;
    }
    let metric = QuantumMetric::graph(&calc, &weights)?;
    let mu_vec = match mu {
        Measure::Explicit(m) => {
            if m.len() != vertices.len() {
                return Err(Error::Dimension("one measure weight per vertex".into()));
            }
            if m.iter().any(|x| *x <= 0.0) {
                return Err(Error::InvalidModel("measure weights must be positive".into()));
            }
            m
        }
        Measure::Auto => solve_measure(&calc, &weights)?,
    };
    let functional = Functional::new(CVec::from_fn(vertices.len(), |i, _| cr(mu_vec[i])));
    let conn = match connection {
        GraphConnection::Bare => Connection::bare(&calc),
        GraphConnection::SigmaBlocks(blocks) => {
            let mut idx_blocks = BTreeMap::new();
            for ((a, b), m) in blocks {
                let x = g
                    .vertex_index(&a)
                    .ok_or_else(|| Error::InvalidModel(format!("unknown vertex '{a}'")))?;
                let y = g
                    .vertex_index(&b)
                    .ok_or_else(|| Error::InvalidModel(format!("unknown vertex '{b}'")))?;
                idx_blocks.insert((x, y), m);
            }
            let sigma = g.sigma_from_blocks(&idx_blocks)?;
            Connection::inner(&calc, sigma, None, ConnectionKind::Inner)?
        }
    };
    Ok(ModelBundle {
        alt_connections: vec![("bare".into(), Connection::bare(&calc))],
        calc,
        metric,
        conn,
        functional,
        notes: vec![],
    })
}

/// Propagate the divergence-compatibility relation along a BFS spanning
/// tree; report the offending arrow when a cycle is inconsistent.
fn solve_measure(calc: &Calculus, weights: &[f64]) -> Result<Vec<f64>> {
    let g = calc.as_graph().unwrap();
    let n = g.vertices.len();
    let mut mu = vec![None::<f64>; n];
    for root in 0..n {
        if mu[root].is_some() {
            continue;
        }
        mu[root] = Some(1.0);
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let mx = mu[x].unwrap();
            for &(x2, y) in &g.arrows {
                if x2 != x {
                    continue;
                }
                let fwd = weights[g.arrow_index(x, y).unwrap()];
                let bwd = weights[g.arrow_index(y, x).unwrap()];
                let proposal = mx * fwd / bwd;
                match mu[y] {
                    None => {
                        mu[y] = Some(proposal);
                        queue.push_back(y);
                    }
                    Some(existing) => {
                        if (existing - proposal).abs() > 1e-9 * existing.abs().max(1.0) {
                            return Err(Error::InvalidModel(format!(
                                "inconsistent measure around a cycle through {}→{}: \
                                 {existing} vs {proposal}",
                                g.vertices[x], g.vertices[y]
                            )));
                        }
                    }
                }
            }
        }
    }
    let mu: Vec<f64> = mu.into_iter().map(|m| m.unwrap()).collect();
    if mu.iter().any(|m| *m <= 0.0) {
        return Err(Error::InvalidModel(
            "auto-solved measure is not positive; check weight signs".into(),
        ));
    }
    Ok(mu)
}

/// Symmetric q-integer `(i)_q = sin(iπ/(n+1))/sin(π/(n+1))` at
/// `q = exp(iπ/(n+1))`.
pub fn q_integer(i: usize, n: usize) -> f64 {
    let denom = (std::f64::consts::PI / (n as f64 + 1.0)).sin();
    ((i as f64) * std::f64::consts::PI / (n as f64 + 1.0)).sin() / denom
}

/// Chain with n nodes, metric `λ_{i→i+1} = 1/hᵢ`, `λ_{i+1→i} = 1/(φᵢhᵢ)`
/// with direction coefficients `φᵢ = (i+1)_q/(i)_q`, measure `μᵢ = (i)_q`,
/// bare connection.
pub fn an_chain(n: usize, h: &[f64]) -> Result<ModelBundle> {
    if n < 2 {
        return Err(Error::InvalidModel("chain needs n ≥ 2".into()));
    }
    if h.len() != n - 1 {
        return Err(Error::Dimension("chain needs n−1 metric parameters".into()));
    }
    if h.iter().any(|x| *x >= 0.0) {
        return Err(Error::InvalidModel(
            "chain parameters must be negative for a positive inner product".into(),
        ));
    }
    let vertices: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    let mut arrow_labels = Vec::new();
    for i in 0..n - 1 {
        arrow_labels.push((vertices[i].clone(), vertices[i + 1].clone()));
        arrow_labels.push((vertices[i + 1].clone(), vertices[i].clone()));
    }
    let calc = Calculus::graph(&vertices, &arrow_labels)?;
    let g = calc.as_graph().unwrap();
    let mut weights = vec![0.0; g.arrows.len()];
    for i in 0..n - 1 {
        let phi = q_integer(i + 2, n) / q_integer(i + 1, n);
        weights[g.arrow_index(i, i + 1).unwrap()] = 1.0 / h[i];
        weights[g.arrow_index(i + 1, i).unwrap()] = 1.0 / (phi * h[i]);
    }
    let metric = QuantumMetric::graph(&calc, &weights)?;
    let functional = Functional::new(CVec::from_fn(n, |i, _| cr(q_integer(i + 1, n))));
    let conn = Connection::bare(&calc);
    Ok(ModelBundle {
        alt_connections: vec![],
        calc,
        metric,
        conn,
        functional,
        notes: vec!["measure = symmetric q-integers".into()],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolygonConnection {
    Bare,
    Qlc,
}

#[derive(Debug, Clone)]
pub enum PolygonLambda {
    Constant(f64),
    /// One weight per edge {i, i+1}, applied in both directions.
    PerEdge(Vec<f64>),
}

/// n-gon on ℤₙ with an edge-symmetric metric and measure μ ≡ 1. The QLC
/// scales same-direction two-steps by `ρ_±(i) = λ_{i→i±1}/λ_{i±1→i±2}` and
/// swaps the two back-and-forth two-steps at each vertex.
pub fn polygon(n: usize, lambda: PolygonLambda, connection: PolygonConnection) -> Result<ModelBundle> {
    if n < 3 {
        return Err(Error::InvalidModel("polygon needs n ≥ 3".into()));
    }
    let edge_weights: Vec<f64> = match lambda {
        PolygonLambda::Constant(l) => vec![l; n],
        PolygonLambda::PerEdge(v) => {
            if v.len() != n {
                return Err(Error::Dimension("polygon needs one weight per edge".into()));
            }
            v
        }
    };
    let vertices: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut arrow_labels = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        arrow_labels.push((vertices[i].clone(), vertices[j].clone()));
        arrow_labels.push((vertices[j].clone(), vertices[i].clone()));
    }
    let calc = Calculus::graph(&vertices, &arrow_labels)?;
    let g = calc.as_graph().unwrap();
    let mut weights = vec![0.0; g.arrows.len()];
    for i in 0..n {
        let j = (i + 1) % n;
        weights[g.arrow_index(i, j).unwrap()] = edge_weights[i];
        weights[g.arrow_index(j, i).unwrap()] = edge_weights[i];
    }
    let metric = QuantumMetric::graph(&calc, &weights)?;
    let functional = Functional::new(CVec::from_element(n, cr(1.0)));
    let lam = |x: usize, y: usize| weights[g.arrow_index(x, y).unwrap()];
    let conn = match connection {
        PolygonConnection::Bare => Connection::bare(&calc),
        PolygonConnection::Qlc => {
            let n2 = calc.dim_o2();
            let mut sigma = CMat::zeros(n2, n2);
            for i in 0..n {
                let plus = (i + 1) % n;
                let minus = (i + n - 1) % n;
                let plus2 = (i + 2) % n;
                let minus2 = (i + n - 2) % n;
                // same-direction two-steps scale by ρ_±(i)
                let rho_p = lam(i, plus) / lam(plus, plus2);
                let rho_m = lam(i, minus) / lam(minus, minus2);
                let ts_pp = g.two_step_idx[&(i, plus, plus2)];
                let ts_mm = g.two_step_idx[&(i, minus, minus2)];
                sigma[(ts_pp, ts_pp)] = cr(rho_p);
                sigma[(ts_mm, ts_mm)] = cr(rho_m);
                // back-and-forth two-steps swap direction
                let ts_pb = g.two_step_idx[&(i, plus, i)];
                let ts_mb = g.two_step_idx[&(i, minus, i)];
                sigma[(ts_mb, ts_pb)] = cr(1.0);
                sigma[(ts_pb, ts_mb)] = cr(1.0);
            }
            Connection::inner(&calc, sigma, None, ConnectionKind::Qlc("polygon".into()))?
        }
    };
    Ok(ModelBundle {
        alt_connections: vec![("bare".into(), Connection::bare(&calc))],
        calc,
        metric,
        conn,
        functional,
        notes: vec![],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum M2Case {
    I,
    II,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum M2Connection {
    Bare,
    Qlc,
}

/// M₂(ℂ) with its standard 2D inner calculus: central basis s, t,
/// θ = E₁₂s + E₂₁t, s* = −t, wedge relations s∧t = t∧s, s² = t² = 0.
///
/// Case I metric: g = λ⁻¹(s⊗t − t⊗s), pairing (s,t) = −λ, (t,s) = λ.
/// Case II metric: g = λ⁻¹(s⊗s + t⊗t), pairing (s,s) = (t,t) = λ.
/// The σ-symmetric QLC is σ = −flip in Case I and the displayed
/// ρ-family (ρ imaginary) in Case II. ∫ = ½Tr.
pub fn m2(case: M2Case, lambda: f64, rho: C64, connection: M2Connection) -> Result<ModelBundle> {
    if lambda == 0.0 {
        return Err(Error::InvalidModel("metric normalisation must be nonzero".into()));
    }
    if rho.re != 0.0 {
        return Err(Error::InvalidModel("rho must be purely imaginary".into()));
    }
    let algebra = Algebra::matrix_units(2);
    let na = algebra.dim();
    let e12 = unit_vec(na, 1);
    let e21 = unit_vec(na, 2);
    // s* = −t, t* = −s
    let star_k = CMat::from_row_slice(2, 2, &[cr(0.0), cr(-1.0), cr(-1.0), cr(0.0)]);
    let wedge = WedgeData {
        ext_labels: vec!["s^t".into()],
        wedge_coeffs: vec![
            vec![vec![cr(0.0)], vec![cr(1.0)]],
            vec![vec![cr(1.0)], vec![cr(0.0)]],
        ],
        d_one_forms: vec![&e21 * cr(2.0), &e12 * cr(2.0)],
    };
    let calc = Calculus::free(
        algebra,
        vec!["s".into(), "t".into()],
        vec![e12.clone(), e21.clone()],
        star_k,
        Some(wedge),
    )?;
    let g_inv = match case {
        M2Case::I => CMat::from_row_slice(2, 2, &[cr(0.0), cr(-lambda), cr(lambda), cr(0.0)]),
        M2Case::II => CMat::from_row_slice(2, 2, &[cr(lambda), cr(0.0), cr(0.0), cr(lambda)]),
    };
    let metric = QuantumMetric::free(&calc, &g_inv)?;
    let functional = {
        let mut w = CVec::zeros(na);
        w[0] = cr(0.5);
        w[3] = cr(0.5);
        Functional::new(w)
    };
    let conn = match connection {
        M2Connection::Bare => Connection::bare(&calc),
        M2Connection::Qlc => {
            let sigma_k = match case {
                // σ = −flip on the basis forms
                M2Case::I => {
                    let mut s = CMat::zeros(4, 4);
                    for i in 0..2 {
                        for j in 0..2 {
                            s[(j * 2 + i, i * 2 + j)] = cr(-1.0);
                        }
                    }
                    s
                }
                // σ(s⊗s) = s⊗s + ρ(s⊗t − t⊗s), σ(s⊗t) = −t⊗s + ρ(s⊗s − t⊗t),
                // σ(t⊗s) = −s⊗t + ρ(s⊗s − t⊗t), σ(t⊗t) = t⊗t + ρ(s⊗t − t⊗s)
                M2Case::II => {
                    let o = cr(0.0);
                    let one = cr(1.0);
                    CMat::from_row_slice(
                        4,
                        4,
                        &[
                            one, rho, rho, o, //
                            rho, o, -one, rho, //
                            -rho, -one, o, -rho, //
                            o, -rho, -rho, one,
                        ],
                    )
                }
            };
            let sigma = free_sigma_from_scalar(&calc, &sigma_k);
            Connection::inner(&calc, sigma, None, ConnectionKind::Qlc(format!("m2-{case:?}")))?
        }
    };
    Ok(ModelBundle {
        alt_connections: vec![("bare".into(), Connection::bare(&calc))],
        calc,
        metric,
        conn,
        functional,
        notes: vec![format!("case {case:?}, lambda {lambda}, rho {rho}")],
    })
}

/// Extend a k²×k² matrix on the basis two-tensors sⁱ⊗sʲ blockwise to the
/// full coefficient space.
pub fn free_sigma_from_scalar(calc: &Calculus, sk: &CMat) -> CMat {
    let f = calc.as_free().expect("free backend");
    let na = calc.dim_a();
    let kk = f.k * f.k;
    assert_eq!(sk.nrows(), kk);
    let mut out = CMat::zeros(kk * na, kk * na);
    for r in 0..kk {
        for q in 0..kk {
            if sk[(r, q)] != cr(0.0) {
                for a in 0..na {
                    out[(r * na + a, q * na + a)] = sk[(r, q)];
                }
            }
        }
    }
    out
}

/// Spin-j angular momentum matrices (2j+1 = n), basis ordered by descending
/// magnetic number.
fn spin_matrices(n: usize) -> (CMat, CMat, CMat) {
    let j = (n as f64 - 1.0) / 2.0;
    let mut jz = CMat::zeros(n, n);
    let mut jp = CMat::zeros(n, n);
    for r in 0..n {
        let m = j - r as f64;
        jz[(r, r)] = cr(m);
        if r + 1 < n {
            let m_lower = j - (r + 1) as f64;
            jp[(r, r + 1)] = cr((j * (j + 1.0) - m_lower * (m_lower + 1.0)).sqrt());
        }
    }
    let jm = jp.transpose();
    let jx = (&jp + &jm) * cr(0.5);
    let jy = (&jp - &jm) * c(0.0, -0.5);
    (jx, jy, jz)
}

fn epsilon(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Reduced fuzzy sphere on Mₙ(ℂ): coordinates xⁱ = 2λ_P Jⁱ with λ_P = 1/n,
/// central self-adjoint basis s¹s²s³, θ = (1/2iλ_P)xⁱsⁱ, inverse metric
/// g_inv (real symmetric positive), the unique *-preserving QLC with
/// constant Christoffel symbols
/// `∇sⁱ = −½ g^{ij}(2ε_{jlm}g_{mk} + Tr(g)ε_{jkl}) sᵏ⊗sˡ` (σ = flip), and
/// ∫ = (1/n)Tr.
pub fn fuzzy_sphere(n: usize, g_inv_entries: &[[f64; 3]; 3]) -> Result<ModelBundle> {
    if n < 2 {
        return Err(Error::InvalidModel("reduced fuzzy sphere needs n ≥ 2".into()));
    }
    let g_inv = CMat::from_fn(3, 3, |i, j| cr(g_inv_entries[i][j]));
    for i in 0..3 {
        for j in 0..3 {
            if (g_inv[(i, j)] - g_inv[(j, i)]).norm() > 1e-14 || g_inv[(i, j)].im != 0.0 {
                return Err(Error::InvalidModel(
                    "inverse metric must be real symmetric".into(),
                ));
            }
        }
    }
    let eig = crate::linalg::hermitian_eigenvalues(&g_inv);
    if eig.first().copied().unwrap_or(0.0) <= 0.0 {
        return Err(Error::InvalidModel(
            "inverse metric must be positive definite".into(),
        ));
    }

    let lambda_p = 1.0 / n as f64;
    let algebra = Algebra::matrix_units(n);
    let na = algebra.dim();
    let (jx, jy, jz) = spin_matrices(n);
    let coords: Vec<CMat> = [jx, jy, jz].iter().map(|m| m * cr(2.0 * lambda_p)).collect();
    let x_el: Vec<CVec> = coords.iter().map(mat_to_element).collect();

    // internal consistency of the spin construction
    {
        let mut casimir = CMat::zeros(n, n);
        for xi in &coords {
            casimir += xi * xi;
        }
        let target = CMat::identity(n, n) * cr(1.0 - lambda_p * lambda_p);
        assert!(
            (casimir - target).norm() < 1e-10,
            "coordinate Casimir deviates from 1 − λ_P²"
        );
        for i in 0..3 {
            for j in 0..3 {
                let mut rhs = CMat::zeros(n, n);
                for (k, xk) in coords.iter().enumerate() {
                    rhs += xk * c(0.0, 2.0 * lambda_p * epsilon(i, j, k));
                }
                let comm = &coords[i] * &coords[j] - &coords[j] * &coords[i];
                assert!((comm - rhs).norm() < 1e-10, "coordinate commutation relations");
            }
        }
    }

    // θᵢ = (1/2iλ_P) xᵢ
    let theta_scale = c(0.0, -0.5 / lambda_p);
    let theta_coeffs: Vec<CVec> = x_el.iter().map(|x| x * theta_scale).collect();
    let wedge = {
        // sⁱ anticommute; dsⁱ = −½ ε_{ijk} sʲ∧sᵏ
        let ext_pairs = [(0usize, 1usize), (0, 2), (1, 2)];
        let ext_labels = vec!["s1^s2".into(), "s1^s3".into(), "s2^s3".into()];
        let mut wedge_coeffs = vec![vec![vec![cr(0.0); 3]; 3]; 3];
        for (e, &(p, q)) in ext_pairs.iter().enumerate() {
            wedge_coeffs[p][q][e] = cr(1.0);
            wedge_coeffs[q][p][e] = cr(-1.0);
        }
        let unit = algebra.unit().clone();
        let mut d_one_forms = Vec::new();
        for i in 0..3 {
            let mut v = CVec::zeros(3 * na);
            for (e, &(p, q)) in ext_pairs.iter().enumerate() {
                let coeff = -0.5 * (epsilon(i, p, q) - epsilon(i, q, p));
                if coeff != 0.0 {
                    for a in 0..na {
                        v[e * na + a] = cr(coeff) * unit[a];
                    }
                }
            }
            d_one_forms.push(v);
        }
        WedgeData {
            ext_labels,
            wedge_coeffs,
            d_one_forms,
        }
    };
    let calc = Calculus::free(
        algebra,
        vec!["s1".into(), "s2".into(), "s3".into()],
        theta_coeffs,
        CMat::identity(3, 3),
        Some(wedge),
    )?;
    let metric = QuantumMetric::free(&calc, &g_inv)?;
    let functional = {
        let mut w = CVec::zeros(na);
        for i in 0..n {
            w[i * n + i] = cr(1.0 / n as f64);
        }
        Functional::new(w)
    };

    // QLC: constant Christoffel symbols from the inverse metric
    let g_lower = g_inv.clone().try_inverse().expect("validated invertible");
    let trace_g: C64 = g_lower.trace();
    let mut nabla = CMat::zeros(calc.dim_o2(), calc.dim_o1());
    let mut gamma_coeff = vec![CMat::zeros(3, 3); 3]; // [i][(k,l)]
    for i in 0..3 {
        for k in 0..3 {
            for l in 0..3 {
                let mut val = cr(0.0);
                for jj in 0..3 {
                    let mut inner = cr(0.0);
                    for m in 0..3 {
                        inner += cr(2.0 * epsilon(jj, l, m)) * g_lower[(m, k)];
                    }
                    inner += trace_g * cr(epsilon(jj, k, l));
                    val += g_inv[(i, jj)] * inner;
                }
                gamma_coeff[i][(k, l)] = val * cr(-0.5);
            }
        }
    }
    for (i, gamma_i) in gamma_coeff.iter().enumerate() {
        for a in 0..na {
            let ea = calc.algebra.basis_element(a);
            // ∇(e_a sⁱ) = e_a ∇sⁱ + d(e_a)⊗sⁱ
            let mut col = CVec::zeros(calc.dim_o2());
            for k in 0..3 {
                for l in 0..3 {
                    let w = gamma_i[(k, l)];
                    if w != cr(0.0) {
                        for b in 0..na {
                            col[(k * 3 + l) * na + b] += w * ea[b];
                        }
                    }
                }
            }
            col += calc.tensor_11(&calc.differential(&ea), &calc.free_one_form(i, calc.algebra.unit()));
            nabla.set_column(i * na + a, &col);
        }
    }
    let mut flip = CMat::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            flip[(j * 3 + i, i * 3 + j)] = cr(1.0);
        }
    }
    let sigma = free_sigma_from_scalar(&calc, &flip);
    let conn = Connection::from_parts(&calc, nabla, sigma, ConnectionKind::Qlc("fuzzy".into()))?;

    Ok(ModelBundle {
        alt_connections: vec![("bare".into(), Connection::bare(&calc))],
        calc,
        metric,
        conn,
        functional,
        notes: vec![format!("lambda_P = 1/{n}")],
    })
}

/// Row-major flattening of an n×n matrix into matrix-unit coefficients.
pub fn mat_to_element(m: &CMat) -> CVec {
    let n = m.nrows();
    CVec::from_fn(n * n, |idx, _| m[(idx / n, idx % n)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::Error;

    const ROUND: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

    #[test]
    fn auto_measure_constant_for_edge_symmetric_weights() {
        let b = weighted_graph(
            &["a", "b", "c"],
            &[
                ("a", "b", -2.0),
                ("b", "a", -2.0),
                ("b", "c", -5.0),
                ("c", "b", -5.0),
            ],
            Measure::Auto,
            GraphConnection::Bare,
        )
        .unwrap();
        for i in 0..3 {
            assert_eq!(b.functional.weights()[i], cr(1.0));
        }
    }

    #[test]
    fn auto_measure_two_node_asymmetric() {
        // λ_{x→y} = −1, λ_{y→x} = −2 forces μ = (1, 1/2)
        let b = weighted_graph(
            &["x", "y"],
            &[("x", "y", -1.0), ("y", "x", -2.0)],
            Measure::Auto,
            GraphConnection::Bare,
        )
        .unwrap();
        assert_eq!(b.functional.weights()[0], cr(1.0));
        assert_eq!(b.functional.weights()[1], cr(0.5));
        let check = crate::qrg::check_divergence_compatible(
            &b.calc,
            &b.functional,
            &b.metric,
            &b.conn,
            1e-12,
        );
        assert!(check.passed);
    }

    #[test]
    fn auto_measure_rejects_inconsistent_cycles() {
        // ratios −1/−2, −1/−2, −1/−2 around a triangle multiply to 1/8 ≠ 1
        let res = weighted_graph(
            &["a", "b", "c"],
            &[
                ("a", "b", -1.0),
                ("b", "a", -2.0),
                ("b", "c", -1.0),
                ("c", "b", -2.0),
                ("c", "a", -1.0),
                ("a", "c", -2.0),
            ],
            Measure::Auto,
            GraphConnection::Bare,
        );
        match res {
            Err(Error::InvalidModel(msg)) => assert!(msg.contains("cycle"), "{msg}"),
            other => panic!("expected cycle obstruction, got {other:?}"),
        }
    }

    #[test]
    fn q_integer_values() {
        // n = 2, q = e^{iπ/3}: (2)_q = 2cos(π/3) = 1
        assert!((q_integer(2, 2) - 1.0).abs() < 1e-15);
        // n = 3, q = e^{iπ/4}: (1, √2, 1)
        assert!((q_integer(1, 3) - 1.0).abs() < 1e-15);
        assert!((q_integer(2, 3) - 2.0f64.sqrt()).abs() < 1e-15);
        assert!((q_integer(3, 3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chain_measures_positive_up_to_n_50() {
        for n in 2..=50usize {
            for i in 1..=n {
                assert!(q_integer(i, n) > 0.0, "({i})_q at n = {n}");
            }
        }
        let b = an_chain(2, &[-1.0]).unwrap();
        assert!((b.functional.weights()[0] - cr(1.0)).norm() < 1e-14);
        assert!((b.functional.weights()[1] - cr(1.0)).norm() < 1e-14);
        let b3 = an_chain(3, &[-1.0, -1.0]).unwrap();
        assert!((b3.functional.weights()[1].re - 2.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn chain_rejects_nonnegative_parameters() {
        assert!(matches!(
            an_chain(3, &[-1.0, 1.0]),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn chain_weights_all_negative() {
        let b = an_chain(7, &[-0.5, -1.0, -2.0, -0.7, -1.3, -0.9]).unwrap();
        let crate::qrg::MetricData::GraphWeights(w) = &b.metric.data else {
            panic!()
        };
        for l in w {
            assert!(l.re < 0.0 && l.im == 0.0);
        }
    }

    #[test]
    fn polygon_qlc_dirac_closed_form() {
        // D(ω_{i→i±1}) = λ_{i±1→i} δ_{i±1} − λ_{i→i∓1} δ_i
        let weights = vec![-1.0, -2.0, -1.5, -0.5, -3.0];
        let b = polygon(5, PolygonLambda::PerEdge(weights.clone()), PolygonConnection::Qlc)
            .unwrap();
        let g = b.calc.as_graph().unwrap();
        let div = crate::qrg::divergence_matrix(&b.calc, &b.metric, &b.conn);
        let lam = |x: usize, y: usize| {
            let crate::qrg::MetricData::GraphWeights(w) = &b.metric.data else {
                panic!()
            };
            w[g.arrow_index(x, y).unwrap()].re
        };
        for i in 0..5usize {
            let plus = (i + 1) % 5;
            let minus = (i + 4) % 5;
            let u = g.arrow_index(i, plus).unwrap();
            let expected = b.calc.algebra.basis_element(plus) * cr(lam(plus, i))
                - b.calc.algebra.basis_element(i) * cr(lam(i, minus));
            assert!((div.column(u).into_owned() - expected).norm() < 1e-13, "arrow {i}");
        }
    }

    #[test]
    fn polygon_bare_equals_qlc_dirac_for_constant_weights() {
        for n in 3..=8usize {
            let b = polygon(n, PolygonLambda::Constant(-1.0), PolygonConnection::Qlc).unwrap();
            let qlc = b.spinor();
            let bare = b.spinor_with(&b.alt_connections[0].1);
            assert!(crate::linalg::fro(&(&qlc.dirac - &bare.dirac)) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn polygon_rejects_small_n() {
        assert!(polygon(2, PolygonLambda::Constant(-1.0), PolygonConnection::Bare).is_err());
    }

    #[test]
    fn m2_case_i_connection_display() {
        // ∇s = 2E₁₂ s⊗s + 2E₂₁ t⊗s
        let b = m2(M2Case::I, -1.0, cr(0.0), M2Connection::Qlc).unwrap();
        let calc = &b.calc;
        let s = calc.free_one_form(0, calc.algebra.unit());
        let t = calc.free_one_form(1, calc.algebra.unit());
        let e12 = calc.algebra.basis_element(1);
        let e21 = calc.algebra.basis_element(2);
        let expected = calc.tensor_11(&calc.free_one_form(0, &(&e12 * cr(2.0))), &s)
            + calc.tensor_11(&calc.free_one_form(1, &(&e21 * cr(2.0))), &s);
        assert!((&b.conn.nabla * &s - expected).norm() < 1e-14);
        let _ = t;
    }

    #[test]
    fn m2_rejects_non_imaginary_rho() {
        assert!(matches!(
            m2(M2Case::II, -1.0, c(0.5, 1.0), M2Connection::Qlc),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn m2_case_ii_gram_block_eigenvalues() {
        // the one-form block of the gram has eigenvalues ±λ/2 in the
        // arrow frame; with λ < 0 the form is indefinite of signature (4,4)
        let lambda = -1.0;
        let b = m2(M2Case::II, lambda, c(0.0, 1.0), M2Connection::Qlc).unwrap();
        let pkg = b.spinor();
        let na = b.calc.dim_a();
        let n1 = b.calc.dim_o1();
        let block = pkg.gram.view((na, na), (n1, n1)).into_owned();
        let ev = crate::linalg::hermitian_eigenvalues(&block);
        for (i, v) in ev.iter().enumerate() {
            let expected = if i < 4 { lambda / 2.0 } else { -lambda / 2.0 };
            assert!((v - expected).abs() < 1e-12, "{v} vs {expected}");
        }
    }

    #[test]
    fn fuzzy_spin_half_coordinates() {
        let b = fuzzy_sphere(2, &ROUND).unwrap();
        let f = b.calc.as_free().unwrap();
        // xⁱ = σᵢ/2 up to ordering; Σ(xⁱ)² = 3/4 = 1 − λ_P²
        let x: Vec<CMat> = f
            .theta_coeffs
            .iter()
            .map(|t| {
                let el = t * c(0.0, 1.0); // 2λ_P = 1, θ = (1/i)x
                CMat::from_fn(2, 2, |i, j| el[i * 2 + j])
            })
            .collect();
        let mut casimir = CMat::zeros(2, 2);
        for xi in &x {
            casimir += xi * xi;
        }
        assert!(crate::linalg::fro(&(casimir - CMat::identity(2, 2) * cr(0.75))) < 1e-14);
        // x³ = diag(1/2, −1/2)
        assert!((x[2][(0, 0)] - cr(0.5)).norm() < 1e-14);
        assert!((x[2][(1, 1)] + cr(0.5)).norm() < 1e-14);
    }

    #[test]
    fn fuzzy_round_christoffels() {
        // ∇sⁱ = −½ ε_{ikl} sᵏ⊗sˡ for the round metric
        let b = fuzzy_sphere(2, &ROUND).unwrap();
        let calc = &b.calc;
        let na = calc.dim_a();
        for i in 0..3 {
            let si = calc.free_one_form(i, calc.algebra.unit());
            let mut expected = CVec::zeros(calc.dim_o2());
            for k in 0..3 {
                for l in 0..3 {
                    let w = -0.5 * epsilon(i, k, l);
                    if w != 0.0 {
                        for a in 0..na {
                            expected[(k * 3 + l) * na + a] = cr(w) * calc.algebra.unit()[a];
                        }
                    }
                }
            }
            assert!((&b.conn.nabla * si - expected).norm() < 1e-14, "s^{i}");
        }
    }

    #[test]
    fn fuzzy_rejects_bad_metrics() {
        let asym = [[1.0, 0.5, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(fuzzy_sphere(2, &asym).is_err());
        let indef = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]];
        assert!(fuzzy_sphere(2, &indef).is_err());
        assert!(fuzzy_sphere(1, &ROUND).is_err());
    }

    #[test]
    fn fuzzy_differential_of_coordinates() {
        // dxⁱ = ε_{ijk} xʲ sᵏ
        for n in [2usize, 3] {
            let b = fuzzy_sphere(n, &ROUND).unwrap();
            let calc = &b.calc;
            let f = calc.as_free().unwrap();
            let lambda_p = 1.0 / n as f64;
            let x: Vec<CVec> = f
                .theta_coeffs
                .iter()
                .map(|t| t * c(0.0, 2.0 * lambda_p))
                .collect();
            for i in 0..3 {
                let d = calc.differential(&x[i]);
                let mut expected = CVec::zeros(calc.dim_o1());
                for j in 0..3 {
                    for k in 0..3 {
                        let e = epsilon(i, j, k);
                        if e != 0.0 {
                            expected += calc.free_one_form(k, &(&x[j] * cr(e)));
                        }
                    }
                }
                assert!((d - expected).norm() < 1e-12, "dx^{i} at n = {n}");
            }
        }
    }
}
