use std::collections::BTreeSet;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use weyl_lab::catalog;
use weyl_lab::checks::{self, VerifyOptions};
use weyl_lab::holonomy::{length_transport, transport_with_metric};
use weyl_lab::report::Status;
use weyl_lab::riemann::{christoffel, ricci, riemann, scalar_curvature};
use weyl_lab::scenario::{parse_scenario, Scenario};
use weyl_lab::weyl::{is_integrable, length_curvature, WeylStructure};

#[derive(Parser)]
#[command(name = "weyl-lab", about = "Symbolic and numeric checks for Weyl-geometry identities")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full identity suite and print a pass/fail report
    VerifyPaper {
        /// Emit the report as JSON instead of text lines
        #[arg(long)]
        json: bool,
        /// Negative control: use the wrong-sign w convention
        #[arg(long)]
        flip_w_sign: bool,
        /// Comma-separated list of check ids to run
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
    },
    /// Print the Christoffel symbols of a scenario's metric
    Christoffel { scenario: String },
    /// Print the scalar curvature and nonzero Ricci components
    Curvature { scenario: String },
    /// Print the length curvature, integrability verdict, and the Weyl
    /// identity check lines for a scenario with a [weyl] section
    Weyl { scenario: String },
    /// Run the gauge-law suite on a scenario
    Gauge { scenario: String },
    /// Transport a vector (and a length, if [weyl] is present) around the
    /// scenario's loop
    Transport {
        scenario: String,
        #[arg(long)]
        steps: Option<usize>,
    },
}

fn load(arg: &str) -> Result<Scenario, String> {
    if std::path::Path::new(arg).exists() {
        let text = std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
        return parse_scenario(&text).map_err(|e| format!("{arg}: {e}"));
    }
    if let Some(src) = catalog::source(arg) {
        return parse_scenario(src).map_err(|e| format!("{arg}: {e}"));
    }
    Err(format!(
        "`{arg}` is neither a file nor a catalog entry (catalog: {})",
        catalog::NAMES.join(", ")
    ))
}

fn index_label(coords: &[String], idx: &[usize]) -> String {
    idx.iter()
        .map(|&i| coords[i].as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_christoffel(s: &Scenario) -> Result<(), String> {
    let g = s.metric().map_err(|e| e.to_string())?;
    let conn = christoffel(&g).map_err(|e| e.to_string())?;
    let coords = &g.chart.coords;
    let d = g.dim();
    let mut any = false;
    for l in 0..d {
        for m in 0..d {
            for n in m..d {
                let e = conn.get(l, m, n);
                if !e.is_zero() {
                    any = true;
                    println!(
                        "Gamma^{}_{{{} {}}} = {}",
                        coords[l], coords[m], coords[n], e
                    );
                }
            }
        }
    }
    if !any {
        println!("all Christoffel symbols vanish");
    }
    Ok(())
}

fn cmd_curvature(s: &Scenario) -> Result<(), String> {
    let g = s.metric().map_err(|e| e.to_string())?;
    let r = scalar_curvature(&g).map_err(|e| e.to_string())?;
    println!("R = {r}");
    let ric = ricci(&riemann(&christoffel(&g).map_err(|e| e.to_string())?));
    let coords = &g.chart.coords;
    let d = g.dim();
    for i in 0..d {
        for j in 0..d {
            let e = ric.get(&[i, j]);
            if !e.is_zero() {
                println!("Ric_{{{}}} = {}", index_label(coords, &[i, j]), e);
            }
        }
    }
    Ok(())
}

fn cmd_weyl(s: &Scenario) -> Result<(), String> {
    let chart = s.chart().map_err(|e| e.to_string())?;
    let g = s.metric_on(chart.clone()).map_err(|e| e.to_string())?;
    let w = s.weyl_covector(chart.clone()).map_err(|e| e.to_string())?;
    let lc = length_curvature(&w);
    let coords = &chart.coords;
    let d = chart.dim();
    let mut any = false;
    for i in 0..d {
        for j in 0..d {
            let e = lc.get(&[i, j]);
            if !e.is_zero() {
                any = true;
                println!("W_{{{}}} = {}", index_label(coords, &[i, j]), e);
            }
        }
    }
    if !any {
        println!("W_{{mu nu}} = 0");
    }
    println!(
        "integrable: {}",
        if is_integrable(&w) { "yes" } else { "no" }
    );
    let _ = WeylStructure::new(g, w).map_err(|e| e.to_string())?;
    let (st, detail) = checks::colon_identity_on(s);
    println!("CHECK colon {st} {detail}");
    let (st, detail) = checks::scalar_identity_on(s, false);
    println!("CHECK scalar-identity {st} {detail}");
    Ok(())
}

fn cmd_gauge(s: &Scenario) -> Result<(), String> {
    let (st, detail) = checks::gauge_suite_on(s);
    println!("CHECK gauge {st} {detail}");
    match st {
        Status::Fail => Err("gauge suite failed".into()),
        _ => Ok(()),
    }
}

fn cmd_transport(s: &Scenario, steps: Option<usize>) -> Result<(), String> {
    let path = s.loop_path(steps).map_err(|e| e.to_string())?;
    let g = s.metric().map_err(|e| e.to_string())?;
    let conn = christoffel(&g).map_err(|e| e.to_string())?;
    let d = g.dim();
    let mut b0 = vec![0.0; d];
    b0[0] = 1.0;
    let out = transport_with_metric(&conn, Some(&g), &path, &b0).map_err(|e| e.to_string())?;
    println!("steps = {}", path.steps);
    println!("initial vector = {b0:?}");
    println!("final vector = {:?}", out.final_vector);
    println!("initial length = {}", out.initial_length);
    println!("final length = {}", out.final_length);
    if let Some(a) = out.rotation_angle {
        println!("rotation angle = {a}");
    }
    if !s.weyl.is_empty() {
        let chart = s.chart().map_err(|e| e.to_string())?;
        let w = s.weyl_covector(chart).map_err(|e| e.to_string())?;
        let ws = WeylStructure::new(s.metric().map_err(|e| e.to_string())?, w)
            .map_err(|e| e.to_string())?;
        let lt = length_transport(&ws, &path, 1.0).map_err(|e| e.to_string())?;
        println!("length factor = {}", lt.final_length);
        println!("exponential-law prediction = {}", lt.predicted_exact);
        println!("first-order prediction = {}", lt.predicted_first_order);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<ExitCode, String> = match cli.cmd {
        Cmd::VerifyPaper {
            json,
            flip_w_sign,
            only,
        } => {
            let opts = VerifyOptions {
                flip_w_sign,
                only: only.map(|v| v.into_iter().collect::<BTreeSet<_>>()),
            };
            let report = checks::verify_paper(&opts);
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            Ok(if report.overall() == Status::Pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Cmd::Christoffel { scenario } => {
            load(&scenario).and_then(|s| cmd_christoffel(&s)).map(|_| ExitCode::SUCCESS)
        }
        Cmd::Curvature { scenario } => {
            load(&scenario).and_then(|s| cmd_curvature(&s)).map(|_| ExitCode::SUCCESS)
        }
        Cmd::Weyl { scenario } => {
            load(&scenario).and_then(|s| cmd_weyl(&s)).map(|_| ExitCode::SUCCESS)
        }
        Cmd::Gauge { scenario } => {
            load(&scenario).and_then(|s| cmd_gauge(&s)).map(|_| ExitCode::SUCCESS)
        }
        Cmd::Transport { scenario, steps } => load(&scenario)
            .and_then(|s| cmd_transport(&s, steps))
            .map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
