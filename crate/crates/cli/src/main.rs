mod checks;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use cage_core::cell_solver::{compute_basis, decay_report, Space, StripGrid};
use cage_core::experiments::{delta_sweep, DEFAULT_BUDGET};
use cage_core::fdfd::{measure_transmission, solve_scattering, Polarization, SimulationConfig, TransmissionReport};
use cage_core::homogenized::{analytic_rt, interface_conditions, solve_limit_problem};
use cage_core::io::{basis_csv, config_to_value, field_vtk, parse_config, report_csv, sweep_csv, write_outputs};
use cage_core::{build_canonical_obstacle, CaseId, Rational};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

#[derive(Parser)]
#[command(name = "cage-lab", version, about = "Shielding by thin periodic conducting layers")]
struct Cli {
    /// Seed for every random draw (test profiles, noise checks).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Directory receiving all outputs and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cohomology basis of one space for one obstacle.
    Cell {
        #[arg(long)]
        case: CaseId,
        #[arg(long, default_value = "KN")]
        space: Space,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        l: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Resolved scattering problem from a JSON config.
    Fdfd {
        #[arg(long)]
        config: PathBuf,
        /// VTK file with the field magnitudes.
        #[arg(long)]
        out: Option<String>,
        #[arg(long, default_value = "trans.csv")]
        report: String,
    },
    /// Reflection and transmission of the homogenized interface.
    Homog {
        #[arg(long)]
        case: CaseId,
        #[arg(long, default_value = "e1", value_parser = parse_pol)]
        pol: Polarization,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        omega: f64,
        /// Permittivity as `re,im`.
        #[arg(long, default_value = "1,1", value_parser = parse_eps, allow_hyphen_values = true)]
        eps: Complex64,
        #[arg(long, default_value = "homog.csv")]
        report: String,
        /// Also solve the discrete limit problem and compare.
        #[arg(long)]
        verify: bool,
    },
    /// Delta sweep of resolved layers against the homogenized limit.
    Sweep {
        #[arg(long)]
        case: CaseId,
        #[arg(long, value_delimiter = ',', default_value = "1/2,1/4,1/8", value_parser = parse_ratio)]
        deltas: Vec<Rational>,
        #[arg(long, value_delimiter = ',', default_value = "e1,e2", value_parser = parse_pol)]
        pols: Vec<Polarization>,
        /// Base config; its grid density per period is kept for every row.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value = "sweep.csv")]
        out: String,
    },
    /// Invariant suite.
    Check {
        /// Include the cohomology properties of the cell problems.
        #[arg(long)]
        props: bool,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        l: usize,
    },
}

fn parse_ratio(s: &str) -> Result<Rational, String> {
    cage_core::io::parse_rational("delta", &json!(s)).map_err(|e| e.to_string())
}

fn parse_pol(s: &str) -> Result<Polarization, String> {
    cage_core::io::parse_polarization("pol", &json!(s)).map_err(|e| e.to_string())
}

fn parse_eps(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or("expected re,im")?;
    let re: f64 = re.trim().parse().map_err(|_| format!("bad real part `{re}`"))?;
    let im: f64 = im.trim().parse().map_err(|_| format!("bad imaginary part `{im}`"))?;
    Ok(Complex64::new(re, im))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let out_dir = cli.out_dir;
    match cli.command {
        Command::Cell { case, space, n, l, out } => {
            let grid = StripGrid::new(Some(&build_canonical_obstacle(case)), n, l)?;
            let basis = compute_basis(space, case, &grid)?;
            let decay: Vec<_> = basis.elements.iter().map(|e| decay_report(&e.potential)).collect();
            let mut pass = basis.gram_rank == basis.dimension;
            println!("{space} {case}: dimension {}, gram condition {:.4e}", basis.dimension, basis.gram_condition);
            for (e, d) in basis.elements.iter().zip(&decay) {
                let ok = e.checks.curl <= checks::CURL_BOUND
                    && e.checks.divergence <= checks::DIVERGENCE_BOUND
                    && e.checks.boundary <= checks::BOUNDARY_BOUND;
                pass &= ok;
                let rate = d.rate.map(|r| format!("{r:.4}")).unwrap_or_else(|| "n/a".into());
                println!(
                    "{} {:<4} limit+ {:?} limit- {:?} decay rate {rate}",
                    verdict(ok),
                    e.kind().name(),
                    e.limit_plus,
                    e.limit_minus
                );
            }
            let name = out.unwrap_or_else(|| format!("basis_{space}_{case}.csv"));
            let input = json!({"command": "cell", "case": case.name(), "space": space.name(), "n": n, "L": l});
            write_outputs(&out_dir, &input, &[(name, basis_csv(&basis, &decay).into_bytes())])?;
            Ok(pass)
        }
        Command::Fdfd { config, out, report } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let c = parse_config(&text)?;
            let layer = c.layer()?;
            let field = solve_scattering(&c, layer.as_ref())?;
            let trans = measure_transmission(&field, &c, c.d)?;
            let (r1, r2) = field.residuals;
            print_report(&trans);
            println!("first-order residuals {r1:.3e} {r2:.3e}, {} iterations", field.stats.iterations);
            let pass = r1 <= 10.0 * c.tolerance && r2 <= 10.0 * c.tolerance && trans.shielding_ratio <= 1.0 + 1e-6;
            let mut files = vec![(report, report_csv(&[(c.case, c.delta, trans)]).into_bytes())];
            if let Some(vtk) = out {
                files.push((vtk, field_vtk(&field).into_bytes()));
            }
            write_outputs(&out_dir, &config_to_value(&c), &files)?;
            Ok(pass)
        }
        Command::Homog { case, pol, omega, eps, report, verify } => {
            let rt = analytic_rt(case, pol, omega, eps)?;
            println!("R = {} {:+}i", rt.reflection.re + 0.0, rt.reflection.im + 0.0);
            println!("T = {} {:+}i", rt.transmission.re + 0.0, rt.transmission.im + 0.0);
            let analytic = TransmissionReport {
                polarization: pol,
                incident: Complex64::new(1.0, 0.0),
                transmitted: rt.transmission,
                reflected: rt.reflection,
                shielding_ratio: rt.transmission.norm(),
            };
            let mut rows = vec![(Some(case), Rational::from_integer(0), analytic)];
            let mut pass = true;
            if verify {
                let mut c = SimulationConfig::new(Some(case), Rational::new(1, 2));
                c.omega = omega;
                c.epsilon = eps;
                c.source.polarization = pol;
                c.validate()?;
                let field = solve_limit_problem(&c, &interface_conditions(case))?;
                let disc = measure_transmission(&field, &c, c.d)?;
                let dt = (disc.transmitted - rt.transmission).norm();
                let dr = (disc.reflected - rt.reflection).norm();
                pass = dt <= 0.01 && dr <= 0.01;
                println!(
                    "{} discrete limit: T {:.6} R {:.6} (deviation {dt:.2e}, {dr:.2e})",
                    verdict(pass),
                    disc.transmitted,
                    disc.reflected
                );
                rows.push((Some(case), c.delta, disc));
            }
            let input = json!({"command": "homog", "case": case.name(), "pol": pol.name(), "omega": omega, "eps": [eps.re, eps.im]});
            write_outputs(&out_dir, &input, &[(report, report_csv(&rows).into_bytes())])?;
            Ok(pass)
        }
        Command::Sweep { case, deltas, pols, config, budget, out } => {
            let base = match config {
                Some(path) => parse_config(&std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?)?,
                None => SimulationConfig::new(Some(case), deltas[0]),
            };
            let table = delta_sweep(case, &deltas, &pols, &base, budget)?;
            println!("case delta pol ratio far_field_error stability");
            for r in &table.rows {
                println!(
                    "{} {} {} {:.6} {:.6} {:.6}",
                    case,
                    r.delta,
                    r.polarization.name(),
                    r.shielding_ratio,
                    r.far_field_error,
                    r.stability_ratio
                );
            }
            let pass = table.rows.iter().all(|r| r.shielding_ratio <= 1.0 + 1e-6 && r.far_field_error.is_finite());
            let mut input = config_to_value(&base);
            input["sweep"] = json!({
                "case": case.name(),
                "deltas": deltas.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
                "pols": pols.iter().map(|p| p.name()).collect::<Vec<_>>(),
            });
            write_outputs(&out_dir, &input, &[(out, sweep_csv(&table).into_bytes())])?;
            Ok(pass)
        }
        Command::Check { props, n, l } => {
            if n == 0 || l == 0 {
                bail!("n and L must be positive");
            }
            let mut outcomes = checks::structural(cli.seed);
            if props {
                outcomes.extend(checks::cohomology(n, l));
            }
            for o in &outcomes {
                println!("{} {}: {}", verdict(o.pass), o.name, o.detail);
            }
            let failed = outcomes.iter().filter(|o| !o.pass).count();
            println!("{} of {} checks passed", outcomes.len() - failed, outcomes.len());
            Ok(failed == 0)
        }
    }
}

fn print_report(r: &TransmissionReport) {
    println!("incident    {:.9} {:+.9}i", r.incident.re, r.incident.im);
    println!("transmitted {:.9} {:+.9}i", r.transmitted.re, r.transmitted.im);
    println!("reflected   {:.9} {:+.9}i", r.reflected.re, r.reflected.im);
    println!("shielding ratio {:.9}", r.shielding_ratio);
}
