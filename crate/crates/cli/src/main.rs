use std::path::PathBuf;
use std::process::ExitCode;

use bdl_core::crossed::{element_v, geodesic_sweep, verify_flip_symmetry, verify_v_identities};
use bdl_core::harness::{random_periodic_pairs, run_suite, Suite, SuiteConfig};
use bdl_core::julg_valette::{equivariance_defect, index_b, index_w};
use bdl_core::literal::parse_cylinder;
use bdl_core::module_calculus::{final_identity_check, untwist_check, Mutation};
use bdl_core::operator::mult_right_commutator;
use bdl_core::{BoundaryPoint, FreeGroup, ReducedWord};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

/// Exact verification harness for the boundary crossed product of a free group.
#[derive(Parser)]
#[command(name = "bdl", version)]
struct Cli {
    /// Rank n of the free group.
    #[arg(long, global = true, default_value_t = 2)]
    rank: usize,
    /// Truncation radius; each command has its own default.
    #[arg(long, global = true)]
    radius: Option<usize>,
    /// Cylinder depth of test vectors.
    #[arg(long, global = true, default_value_t = 2)]
    depth: usize,
    /// Emit JSON to stdout, or with `--json=PATH` to a file.
    #[arg(long, global = true, num_args = 0..=1, require_equals = true, value_name = "PATH")]
    json: Option<Option<PathBuf>>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact element identities and the suite runner.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Truncated operator laboratory.
    Oplab {
        #[command(subcommand)]
        what: Oplab,
    },
    /// Julg–Valette operators.
    Jv {
        #[command(subcommand)]
        what: Jv,
    },
    /// Untwisting unitary and the iota comparison.
    Untwist {
        #[command(subcommand)]
        what: UntwistCmd,
    },
    /// Fbar = Wbar on the spanning set.
    FinalIdentity {
        /// Test hook: `drop-vbar-term:<letter>` or `perturb-v:<letter>`.
        #[arg(long, default_value = "none")]
        mutation: Mutation,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// v*v = vv* = chi and unitarity of w + 1.
    VIdentities,
    /// bar_sigma(v - chi) = v* - chi.
    FlipSymmetry,
    /// Tensor formula for v against bi-infinite geodesics.
    Geodesic {
        #[arg(long, default_value_t = 50)]
        random_pairs: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Runs a whole suite and prints one line per check.
    Suite {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value = "none")]
        mutation: Mutation,
        /// Radius for the truncated-operator sweeps.
        #[arg(long, default_value_t = 6)]
        operator_radius: usize,
        /// Record wall time per check (reports are then not byte-identical).
        #[arg(long)]
        timings: bool,
        /// Request floating-point mode; always rejected.
        #[arg(long)]
        float: bool,
    },
}

#[derive(Subcommand)]
enum Oplab {
    /// Support certificate of [M(f~), rho(gamma)].
    Commutator {
        #[arg(long, default_value = "chi(a)")]
        f: String,
        #[arg(long, default_value = "a")]
        gamma: ReducedWord,
    },
}

#[derive(Subcommand)]
enum Jv {
    /// Index of b, or of W_a when a ray is given.
    Index {
        /// Boundary point `head(period)`, e.g. `(a)` or `b(aB)`.
        #[arg(long)]
        ray: Option<BoundaryPoint>,
    },
    /// Rank and support of gamma b gamma^-1 - b.
    Defect {
        #[arg(long)]
        gamma: ReducedWord,
    },
}

#[derive(Subcommand)]
enum UntwistCmd {
    /// Unitarity of U, iota comparisons and regular-representation conjugations.
    Check,
}

struct Outcome {
    pass: bool,
    json: Value,
    text: String,
}

fn run(cli: &Cli) -> bdl_core::Result<Outcome> {
    let group = FreeGroup::new(cli.rank)?;
    let radius = |default: usize| cli.radius.unwrap_or(default);
    Ok(match &cli.command {
        Command::Verify { what } => match what {
            Verify::VIdentities => {
                let cert = verify_v_identities(group);
                certificate_outcome(cert.pass(), serde_json::to_value(&cert.checks).unwrap(), &cert.checks)
            }
            Verify::FlipSymmetry => {
                let cert = verify_flip_symmetry(group);
                certificate_outcome(cert.pass(), serde_json::to_value(&cert.checks).unwrap(), &cert.checks)
            }
            Verify::Geodesic { random_pairs, seed } => {
                let extra = random_periodic_pairs(group, *seed, *random_pairs);
                let (checked, bad) = geodesic_sweep(&element_v(group), &extra)?;
                Outcome {
                    pass: bad.is_empty(),
                    json: json!({ "checked": checked, "disagreements": bad }),
                    text: format!("{checked} checks, {} disagreements", bad.len()),
                }
            }
            Verify::Suite {
                suite,
                mutation,
                operator_radius,
                timings,
                float,
            } => {
                let config = SuiteConfig {
                    rank: cli.rank,
                    radius: radius(4),
                    depth: cli.depth,
                    operator_radius: *operator_radius,
                    float_mode: *float,
                    mutation: mutation.clone(),
                    timings: *timings,
                    ..SuiteConfig::default()
                };
                let report = run_suite(&config, *suite)?;
                Outcome {
                    pass: report.pass,
                    json: serde_json::to_value(&report).unwrap(),
                    text: report.summary(),
                }
            }
        },
        Command::Oplab {
            what: Oplab::Commutator { f, gamma },
        } => {
            let f = parse_cylinder(group, f)?;
            let cert = mult_right_commutator(&f, gamma, radius(6))?;
            Outcome {
                pass: cert.pass,
                text: format!(
                    "{}: rank {}, support radius {}, bound {}, interior radius {}",
                    cert.description,
                    cert.rank,
                    or_none(cert.support_radius),
                    or_none(cert.bound),
                    cert.interior_radius
                ),
                json: serde_json::to_value(&cert).unwrap(),
            }
        }
        Command::Jv { what } => match what {
            Jv::Index { ray } => {
                let r = radius(4);
                let (name, report) = match ray {
                    None => ("b".to_string(), index_b(group, r)?),
                    Some(a) => (format!("W_{a}"), index_w(group, a, r)?),
                };
                Outcome {
                    pass: report.index == 1,
                    text: format!(
                        "index({name}) = {} (kernel {}, cokernel {}, R = {})",
                        report.index, report.kernel, report.cokernel, report.radius
                    ),
                    json: serde_json::to_value(report).unwrap(),
                }
            }
            Jv::Defect { gamma } => {
                let cert = equivariance_defect(group, gamma, radius(5))?;
                Outcome {
                    pass: cert.pass,
                    text: format!(
                        "{}: rank {}, support radius {}, distance to [e, {gamma}] {}",
                        cert.support.description,
                        cert.support.rank,
                        or_none(cert.support.support_radius),
                        cert.distance_to_geodesic
                    ),
                    json: serde_json::to_value(&cert).unwrap(),
                }
            }
        },
        Command::Untwist {
            what: UntwistCmd::Check,
        } => {
            let report = untwist_check(group, radius(4), cli.depth)?;
            let iota_pass = report.iota.iter().filter(|r| r.pass).count();
            Outcome {
                pass: report.pass,
                text: format!(
                    "U unitary: {}; right-linear: {}; iota checks passing: {iota_pass}/{}",
                    report.unitary,
                    report.right_linear,
                    report.iota.len()
                ),
                json: serde_json::to_value(&report).unwrap(),
            }
        }
        Command::FinalIdentity { mutation } => {
            let cert = final_identity_check(group, radius(4), cli.depth, mutation)?;
            let text = match &cert.discrepancy {
                None => format!(
                    "Fbar = Wbar on {} vectors chi_u (x) e_g, |u| <= {}, |g| <= {}",
                    cert.checked, cert.scope.depth, cert.scope.radius
                ),
                Some(d) => format!("Fbar != Wbar {d}"),
            };
            Outcome {
                pass: cert.pass,
                text,
                json: serde_json::to_value(&cert).unwrap(),
            }
        }
    })
}

fn or_none(x: Option<usize>) -> String {
    x.map_or_else(|| "none".into(), |r| r.to_string())
}

fn certificate_outcome(pass: bool, json: Value, checks: &[bdl_core::crossed::IdentityCheck]) -> Outcome {
    let text = checks
        .iter()
        .map(|c| {
            let status = if c.pass { "PASS" } else { "FAIL" };
            match &c.discrepancy {
                Some(d) => format!("{status} {}  ({d})", c.name),
                None => format!("{status} {}", c.name),
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    Outcome { pass, json, text }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let rendered = serde_json::to_string_pretty(&out.json).unwrap();
            match &cli.json {
                Some(None) => println!("{rendered}"),
                Some(Some(path)) => {
                    if let Err(e) = std::fs::write(path, rendered + "\n") {
                        eprintln!("bdl: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                    println!("{}", out.text.trim_end());
                }
                None => println!("{}", out.text.trim_end()),
            }
            if out.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("bdl: {e}");
            ExitCode::from(2)
        }
    }
}
