use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ncg_dirac::gauge;
use ncg_dirac::modelspec::{build_bundle, build_gauge, parse_model_str, ModelKind, ModelSpec};
use ncg_dirac::models::{ModelBundle, PolygonLambda};
use ncg_dirac::report::{
    export_json, overall_with_expectations, spinor_basis_labels, ReportDocument, SpectrumReport,
};
use ncg_dirac::{CheckResult, VerificationReport, DEFAULT_TOL, KERNEL_TOL};

#[derive(Parser)]
#[command(
    name = "ncg-dirac",
    about = "Build Dirac operators from quantum Riemannian geometries on finite-dimensional *-algebras, verify the spectral-triple axioms and compute spectra",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the model in a spec file and run the full axiom suite.
    /// Exit code 0 when every required check matches expectations, 1 on
    /// check failures, 2 on invalid input.
    Check {
        spec: String,
        /// Absolute residual tolerance (overrides the spec file and the
        /// NCG_DIRAC_TOL environment variable).
        #[arg(long)]
        tol: Option<f64>,
        /// Emit the full report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print the spectrum of the Hermitian operator iD.
    Spectrum {
        spec: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Dump operators as deterministic JSON matrices.
    Export {
        spec: String,
        #[arg(long, value_enum)]
        what: What,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// List the available model kinds.
    Models,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Copy, Clone, ValueEnum)]
#[allow(clippy::upper_case_acronyms)]
enum What {
    D,
    Gamma,
    Gram,
    J,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn resolve_tol(flag: Option<f64>, spec: &ModelSpec) -> f64 {
    flag.or(spec.tolerance)
        .or_else(|| {
            std::env::var("NCG_DIRAC_TOL")
                .ok()
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|t| t.is_finite() && *t > 0.0)
        })
        .unwrap_or(DEFAULT_TOL)
}

fn load(path: &str) -> Result<ModelSpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    parse_model_str(&text).map_err(|v| v.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Check { spec, tol, json } => {
            let spec = load(&spec)?;
            let tol = resolve_tol(tol, &spec);
            let bundle = build_bundle(&spec).map_err(|e| e.to_string())?;
            let pkg = bundle.spinor();
            let mut report = pkg.verify(tol);
            append_right_handed_checks(&pkg, &mut report, tol);
            if let Some(gspec) = &spec.gauge {
                let gdata = build_gauge(gspec, &bundle, tol).map_err(|e| e.to_string())?;
                let (_gauged, greport) = pkg.gauged(&gdata, tol);
                report.extend(greport);
            }
            let spectrum = pkg.spectrum(tol);
            let doc = ReportDocument {
                model_echo: spec.echo.clone(),
                tolerance: tol,
                expect: spec.expect.clone(),
                checks: report.checks.clone(),
                spectrum: Some(SpectrumReport {
                    ratios: polygon_ratios(&spec, &bundle, &spectrum),
                    spectrum,
                }),
                overall: overall_with_expectations(&report.checks, &spec.expect),
            };
            if json {
                println!("{}", doc.to_json());
            } else {
                print!("{}", doc.to_text());
            }
            Ok(if doc.overall {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Spectrum { spec, format, tol } => {
            let spec = load(&spec)?;
            let tol = resolve_tol(tol, &spec);
            let bundle = build_bundle(&spec).map_err(|e| e.to_string())?;
            let pkg = bundle.spinor();
            let spectrum = pkg.spectrum(tol);
            let sr = SpectrumReport {
                ratios: polygon_ratios(&spec, &bundle, &spectrum),
                spectrum,
            };
            match format {
                Format::Text => print!("{}", ncg_dirac::report::spectrum_text(&sr)),
                Format::Json => println!("{}", ncg_dirac::report::spectrum_json(&sr).render()),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Export { spec, what, tol } => {
            let spec = load(&spec)?;
            let _tol = resolve_tol(tol, &spec);
            let bundle = build_bundle(&spec).map_err(|e| e.to_string())?;
            let pkg = bundle.spinor();
            let basis = spinor_basis_labels(&bundle.calc);
            let mut mats: Vec<(&str, &ncg_dirac::CMat)> = Vec::new();
            match what {
                What::D => mats.push(("D", &pkg.dirac)),
                What::Gamma => mats.push(("gamma", &pkg.gamma)),
                What::Gram => mats.push(("gram", &pkg.gram)),
                What::J => mats.push(("J", &pkg.j.mat)),
                What::All => {
                    mats.push(("D", &pkg.dirac));
                    mats.push(("gamma", &pkg.gamma));
                    mats.push(("gram", &pkg.gram));
                    mats.push(("J", &pkg.j.mat));
                }
            }
            println!("{}", export_json(&spec.echo, &basis, &mats));
            Ok(ExitCode::SUCCESS)
        }
        Command::Models => {
            print!("{}", model_listing());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn append_right_handed_checks(
    pkg: &ncg_dirac::spinor::SpinorPackage,
    report: &mut VerificationReport,
    tol: f64,
) {
    match gauge::right_dirac(pkg) {
        Some(rpkg) => {
            report.push(gauge::check_dagger_intertwine(pkg, &rpkg, tol));
            report.push(gauge::check_right_isometry(pkg, &rpkg, tol));
        }
        None => {
            report.push(CheckResult::not_applicable(
                "dagger_intertwine",
                "sigma is singular",
            ));
            report.push(CheckResult::not_applicable(
                "right_isometry",
                "sigma is singular",
            ));
        }
    }
}

/// For constant-weight polygons, nonzero eigenvalues divided by √(−λ).
fn polygon_ratios(
    spec: &ModelSpec,
    _bundle: &ModelBundle,
    spectrum: &ncg_dirac::spinor::Spectrum,
) -> Option<Vec<f64>> {
    let ModelKind::Polygon {
        lambda: PolygonLambda::Constant(l),
        ..
    } = &spec.kind
    else {
        return None;
    };
    if *l >= 0.0 {
        return None;
    }
    let scale = (-l).sqrt();
    let vals = spectrum.real_values.as_ref()?;
    Some(
        vals.iter()
            .filter(|v| v.abs() >= KERNEL_TOL)
            .map(|v| v / scale)
            .collect(),
    )
}

fn model_listing() -> String {
    let mut out = String::new();
    out.push_str("available model kinds:\n");
    out.push_str(
        "  graph         weighted bidirected graph; parameters: vertices, lambda\n\
         \u{20}               (map \"x->y\" -> negative weight), mu (\"auto\" or per-vertex),\n\
         \u{20}               connection (\"bare\" or {\"sigma\": {\"x,y\": matrix}})\n",
    );
    out.push_str(
        "  an_chain      chain with q-integer measure; parameters: n, h (n-1 negative reals)\n",
    );
    out.push_str(
        "  polygon       n-gon with edge-symmetric metric; parameters: n, lambda\n\
         \u{20}               (constant or per-edge), connection (\"bare\" or \"qlc\")\n",
    );
    out.push_str(
        "  m2            2x2 matrix algebra; parameters: case (\"i\"/\"ii\"), lambda,\n\
         \u{20}               rho (imaginary, case ii), connection (\"bare\" or \"qlc\")\n",
    );
    out.push_str(
        "  fuzzy_sphere  reduced fuzzy sphere on M_n; parameters: n, g_inv\n\
         \u{20}               (\"round\" or 3x3 real symmetric positive matrix)\n",
    );
    out.push_str("\ncommon fields: tolerance, expect (check name -> expected boolean), gauge\n");
    out
}
