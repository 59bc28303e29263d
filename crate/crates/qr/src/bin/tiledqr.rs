//! Command-line front end: scheme generation, simulation, bound checks,
//! table reproduction, banded search and performance prediction.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tiledqr::analysis::{
    cp_formula, cp_lower_bound, cp_upper_bound, slowed_schedule_check, FormulaScheme,
};
use tiledqr::dynamic::generate_dynamic;
use tiledqr::graph::expand;
use tiledqr::grid::{GridShape, KernelFamily};
use tiledqr::list::{total_weight, EliminationList};
use tiledqr::perf::{predict, PerfModelInput};
use tiledqr::schemes::{generate_list, SchemeSpec};
use tiledqr::search::{optimal_banded_search, render_outcome, BandedInstance};
use tiledqr::sim::{critical_path, simulate};
use tiledqr::tables::{compare_row, reproduce, TableId, COMPARISON_HEADER};
use tiledqr::QrError;

#[derive(Parser)]
#[command(name = "tiledqr", about = "Tiled QR elimination-scheme simulator and analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SchemeArgs {
    /// flattree, fibonacci, greedy, binarytree, plasmatree, asap or grasap.
    scheme: String,
    p: usize,
    q: usize,
    /// PlasmaTree domain size.
    #[arg(long)]
    bs: Option<usize>,
    /// Grasap switch point (number of trailing ASAP columns).
    #[arg(long)]
    k: Option<usize>,
    /// Kernel family (tt or ts); only affects dynamic schemes' decisions.
    #[arg(long, default_value = "tt")]
    family: String,
}

#[derive(Subcommand)]
enum Command {
    /// Print the elimination list of a scheme.
    Gen(SchemeArgs),
    /// Validate an elimination-list file; nonzero exit if invalid.
    Validate { listfile: String },
    /// Rewrite an elimination list into no-reverse form.
    Normalize { listfile: String },
    /// Simulate a list's kernel graph; prints the schedule as CSV.
    Simulate {
        listfile: String,
        #[arg(long, default_value = "tt")]
        family: String,
        /// Processor count (default: unbounded).
        #[arg(long)]
        procs: Option<usize>,
    },
    /// Zeroing time-step matrix of a scheme (CSV).
    Timesteps {
        #[command(flatten)]
        scheme: SchemeArgs,
        /// Unit-cost coarse model instead of weighted kernels.
        #[arg(long)]
        coarse: bool,
    },
    /// Greedy vs best-BS PlasmaTree vs Fibonacci critical paths.
    Compare {
        #[arg(long)]
        p: usize,
        /// Column-count range, e.g. 1..40 (inclusive).
        #[arg(long)]
        qs: String,
        /// Schemes to include (subset of greedy,plasmatree,fibonacci).
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<String>>,
    },
    /// Closed-form critical-path formulas at a shape.
    Formulas {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Upper/lower critical-path bounds and slowed-schedule checks.
    Bounds {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Exhaustive optimal-schedule search on the banded q x q instance.
    Search {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Roofline-style performance prediction for a scheme.
    Predict {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        gamma_seq: f64,
        #[arg(long)]
        procs: usize,
        #[arg(long)]
        nb: usize,
    },
    /// Regenerate a reference table and diff against its fixture.
    Table { id: String },
}

fn parse_scheme(args: &SchemeArgs) -> Result<SchemeSpec, QrError> {
    let spec = match args.scheme.as_str() {
        "flattree" => SchemeSpec::FlatTree,
        "fibonacci" => SchemeSpec::Fibonacci,
        "greedy" => SchemeSpec::Greedy,
        "binarytree" => SchemeSpec::BinaryTree,
        "plasmatree" => SchemeSpec::PlasmaTree {
            bs: args.bs.ok_or_else(|| {
                QrError::InvalidArgument("plasmatree requires --bs <domain size>".into())
            })?,
        },
        "asap" => SchemeSpec::Asap,
        "grasap" => SchemeSpec::Grasap {
            kswitch: args
                .k
                .ok_or_else(|| QrError::InvalidArgument("grasap requires --k <columns>".into()))?,
        },
        other => return Err(QrError::InvalidArgument(format!("unknown scheme {other}"))),
    };
    Ok(spec)
}

fn parse_family(s: &str) -> Result<KernelFamily, QrError> {
    s.parse()
}

fn scheme_list(
    scheme: &SchemeSpec,
    shape: GridShape,
    family: KernelFamily,
) -> Result<EliminationList, QrError> {
    if scheme.is_dynamic() {
        Ok(generate_dynamic(scheme, shape, family)?.list)
    } else {
        generate_list(scheme, shape)
    }
}

fn read_list(path: &str) -> Result<EliminationList, QrError> {
    let text = fs::read_to_string(path)?;
    EliminationList::from_text(&text)
}

fn parse_range(s: &str) -> Result<(usize, usize), QrError> {
    let err = || QrError::InvalidArgument(format!("bad range {s}, expected a..b"));
    let (a, b) = s.split_once("..").ok_or_else(err)?;
    let lo: usize = a.trim().parse().map_err(|_| err())?;
    let hi: usize = b.trim().parse().map_err(|_| err())?;
    if lo < 1 || hi < lo {
        return Err(err());
    }
    Ok((lo, hi))
}

fn run(cli: Cli) -> Result<bool, QrError> {
    match cli.command {
        Command::Gen(args) => {
            let shape = GridShape::new(args.p, args.q)?;
            let scheme = parse_scheme(&args)?;
            let family = parse_family(&args.family)?;
            print!("{}", scheme_list(&scheme, shape, family)?.to_text());
        }
        Command::Validate { listfile } => {
            let list = read_list(&listfile)?;
            let report = list.validate();
            if !report.is_ok() {
                for v in &report.violations {
                    eprintln!("{v}");
                }
                return Ok(false);
            }
            println!(
                "ok: {} eliminations on {}x{}",
                list.items().len(),
                list.shape().p(),
                list.shape().q()
            );
        }
        Command::Normalize { listfile } => {
            let list = read_list(&listfile)?;
            print!("{}", list.normalize_no_reverse()?.to_text());
        }
        Command::Simulate { listfile, family, procs } => {
            let list = read_list(&listfile)?;
            let graph = expand(&list, parse_family(&family)?)?;
            let sched = simulate(&graph, procs)?;
            println!("# makespan {}", sched.makespan);
            print!("{}", sched.to_csv(&graph));
        }
        Command::Timesteps { scheme: args, coarse } => {
            let shape = GridShape::new(args.p, args.q)?;
            let scheme = parse_scheme(&args)?;
            let matrix = if coarse {
                tiledqr::coarse::coarse_timesteps(&scheme, shape)?
            } else {
                tiledqr::tables::tiled_zero_times(&scheme, shape)?
            };
            print!("{}", matrix.to_csv());
        }
        Command::Compare { p, qs, schemes } => {
            if let Some(names) = &schemes {
                for n in names {
                    if !matches!(n.as_str(), "greedy" | "plasmatree" | "fibonacci") {
                        return Err(QrError::InvalidArgument(format!(
                            "unknown comparison scheme {n}"
                        )));
                    }
                }
            }
            let (lo, hi) = parse_range(&qs)?;
            println!("{COMPARISON_HEADER}");
            for q in lo..=hi.min(p) {
                println!("{}", compare_row(GridShape::new(p, q)?)?.to_csv_line());
            }
        }
        Command::Formulas { p, q } => {
            let shape = GridShape::new(p, q)?;
            println!("scheme,critical_path");
            let cases = [
                ("flattree-tt", FormulaScheme::FlatTreeTt),
                ("flattree-ts", FormulaScheme::FlatTreeTs),
                ("binarytree-tt", FormulaScheme::BinaryTreeTt),
            ];
            for (name, fs) in cases {
                match cp_formula(fs, shape) {
                    Some(v) => println!("{name},{v}"),
                    None => println!("{name},undefined"),
                }
            }
        }
        Command::Bounds { p, q } => {
            let shape = GridShape::new(p, q)?;
            println!("name,value");
            for scheme in [SchemeSpec::Fibonacci, SchemeSpec::Greedy] {
                let bound = cp_upper_bound(&scheme, shape)?;
                let actual = critical_path(&scheme, shape, KernelFamily::Tt)?;
                println!("{scheme}_upper_bound,{bound}");
                println!("{scheme}_critical_path,{actual}");
            }
            match cp_lower_bound(q) {
                Ok(v) => println!("lower_bound,{v}"),
                Err(_) => println!("lower_bound,undefined"),
            }
            for scheme in [SchemeSpec::Fibonacci, SchemeSpec::Greedy] {
                let r = slowed_schedule_check(&scheme, shape)?;
                println!("{scheme}_slowed_feasible,{}", r.feasible);
                println!("{scheme}_slowed_makespan,{}", r.slowed_makespan);
                println!("{scheme}_slowed_bound,{}", r.bound);
            }
        }
        Command::Search { q, budget } => {
            let outcome = optimal_banded_search(BandedInstance::new(q)?, budget)?;
            print!("{}", render_outcome(&outcome));
        }
        Command::Predict { scheme: args, gamma_seq, procs, nb } => {
            let shape = GridShape::new(args.p, args.q)?;
            let scheme = parse_scheme(&args)?;
            let family = parse_family(&args.family)?;
            let cp = critical_path(&scheme, shape, family)?;
            let total = total_weight(shape);
            let input = PerfModelInput {
                gamma_seq,
                processors: procs,
                n_b: nb,
                shape,
                cp,
                total,
            };
            let pred = predict(&input)?;
            println!(
                "{{\"shape\": [{}, {}], \"scheme\": \"{}\", \"cp\": {}, \"T\": {}, \"regime\": \"{}\", \"gflops\": {:.4}}}",
                args.p,
                args.q,
                scheme,
                cp,
                total,
                pred.regime.name(),
                pred.gflops
            );
        }
        Command::Table { id } => {
            let report = reproduce(TableId::parse(&id)?)?;
            print!("{}", report.rendered);
            if !report.is_ok() {
                for m in &report.mismatches {
                    eprintln!("mismatch: {m}");
                }
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
