use ncg_dirac::linalg::{c, cr, fro};
use ncg_dirac::models::{
    an_chain, fuzzy_sphere, m2, polygon, weighted_graph, GraphConnection, M2Case, M2Connection,
    Measure, PolygonConnection, PolygonLambda,
};
use ncg_dirac::DEFAULT_TOL;

const ROUND: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

#[test]
fn smoke_two_node_graph() {
    let b = weighted_graph(
        &["x", "y"],
        &[("x", "y", -1.0), ("y", "x", -1.0)],
        Measure::Auto,
        GraphConnection::Bare,
    )
    .unwrap();
    let pkg = b.spinor();
    let report = pkg.verify(DEFAULT_TOL);
    for c in &report.checks {
        println!(
            "{}: {} residual {:.3e} {}",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.residual,
            c.detail
        );
    }
    let spec = pkg.spectrum(DEFAULT_TOL);
    println!("spectrum: {:?}", spec.real_values);
    println!("kernel: {}", spec.kernel_dim);
    assert!(report.overall());
    let vals = spec.real_values.unwrap();
    let expected = [-2.0, 0.0, 0.0, 2.0];
    for (v, e) in vals.iter().zip(expected.iter()) {
        assert!((v - e).abs() < 1e-9, "{v} vs {e}");
    }
}

#[test]
fn smoke_triangle_bare() {
    let b = polygon(3, PolygonLambda::Constant(-1.0), PolygonConnection::Bare).unwrap();
    let pkg = b.spinor();
    let report = pkg.verify(DEFAULT_TOL);
    for c in &report.checks {
        println!(
            "{}: {} residual {:.3e}",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.residual
        );
    }
    assert!(report.overall());
    let spec = pkg.spectrum(DEFAULT_TOL);
    println!("triangle spectrum: {:?}", spec.real_values);
    assert_eq!(spec.kernel_dim, 5);
}

#[test]
fn smoke_polygon_qlc() {
    for n in [3usize, 4, 5, 6] {
        let b = polygon(n, PolygonLambda::Constant(-1.0), PolygonConnection::Qlc).unwrap();
        let pkg = b.spinor();
        let report = pkg.verify(DEFAULT_TOL);
        println!("--- n = {n}");
        for c in &report.checks {
            println!(
                "{}: {} residual {:.3e}",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.residual
            );
        }
        assert!(report.overall(), "polygon n={n} qlc");
        // bare/QLC coincidence
        let bare = b.spinor_with(&b.alt_connections[0].1);
        let diff = fro(&(&pkg.dirac - &bare.dirac));
        println!("bare vs qlc D: {diff:.3e}");
        assert!(diff < 1e-12);
        let mc = report.get("metric_compatible").unwrap();
        println!("metric_compatible: {} {:.3e}", mc.passed, mc.residual);
    }
}

#[test]
fn smoke_m2() {
    for (case, rho) in [
        (M2Case::I, cr(0.0)),
        (M2Case::II, cr(0.0)),
        (M2Case::II, c(0.0, 1.0)),
    ] {
        let b = m2(case, -1.0, rho, M2Connection::Qlc).unwrap();
        let pkg = b.spinor();
        let report = pkg.verify(DEFAULT_TOL);
        println!("--- case {case:?} rho {rho}");
        for c in &report.checks {
            println!(
                "{}: {} residual {:.3e} {}",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.residual,
                c.detail,
            );
        }
        let bare = b.spinor_with(&b.alt_connections[0].1);
        println!("bare vs qlc D: {:.3e}", fro(&(&pkg.dirac - &bare.dirac)));
    }
}

#[test]
fn smoke_fuzzy() {
    for n in [2usize, 3] {
        let b = fuzzy_sphere(n, &ROUND).unwrap();
        let pkg = b.spinor();
        let report = pkg.verify(DEFAULT_TOL);
        println!("--- fuzzy n = {n}");
        for c in &report.checks {
            println!(
                "{}: {} residual {:.3e}",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.residual
            );
        }
        assert!(report.overall(), "fuzzy n={n}");
        let bare = b.spinor_with(&b.alt_connections[0].1);
        println!("bare vs qlc D: {:.3e}", fro(&(&pkg.dirac - &bare.dirac)));
        assert!(fro(&(&pkg.dirac - &bare.dirac)) < 1e-12);
    }
}

#[test]
fn smoke_an_chain() {
    let b = an_chain(3, &[-1.0, -1.0]).unwrap();
    let pkg = b.spinor();
    let report = pkg.verify(DEFAULT_TOL);
    for c in &report.checks {
        println!(
            "{}: {} residual {:.3e}",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            c.residual
        );
    }
    assert!(report.overall());
}
