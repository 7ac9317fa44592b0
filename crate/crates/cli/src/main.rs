use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use plateau_core::codes::OpBudget;
use plateau_core::field::{recognize_walsh_form, FieldCtx, Parity, WalshForm};
use plateau_core::sss::SchemeCtx;
use plateau_core::theory::DualDistance;
use plateau_core::walsh::{classify_plateaued, walsh_counts_fast};

use plateau_cli::pipeline::{
    self, build_table, classify, parse_construction, PipelineError, PredictionStatus,
};
use plateau_cli::report;
use plateau_cli::fixtures;

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_HYPOTHESIS: u8 = 3;

#[derive(Parser)]
#[command(name = "plateau", version, about = "Exact analysis of p-ary plateaued functions and their few-weight codes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct FunctionArgs {
    /// Odd prime modulus.
    #[arg(long)]
    p: u32,
    /// Number of variables.
    #[arg(long)]
    n: u32,
    /// Polynomial source, e.g. "2*x1^2*x4^2+2*x1^2+x2^2+x3*x4".
    #[arg(long, conflicts_with = "table")]
    poly: Option<String>,
    /// Function-table file ("p n" header then p^n values).
    #[arg(long)]
    table: Option<String>,
    /// Worker-thread cap for internal parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Operation budget for enumeration jobs (default 10^10; the
    /// PLATEAU_BUDGET environment variable overrides the default).
    #[arg(long)]
    budget: Option<u64>,
    /// Output format.
    #[arg(long, default_value = "json", value_parser = ["json", "text"])]
    format: String,
}

#[derive(Args, Clone)]
struct ConstructionArgs {
    /// Code construction to analyze.
    #[arg(long, value_parser = ["first-gen", "defset-zero", "defset-sq", "defset-nsq"])]
    construction: String,
    /// Keep one coordinate per scaling class of the defining set.
    #[arg(long)]
    punctured: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full pipeline: classify, construct, enumerate, predict, compare.
    Analyze {
        #[command(flatten)]
        function: FunctionArgs,
        #[command(flatten)]
        construction: ConstructionArgs,
    },
    /// Run the built-in fixture suite and print pass/fail per example.
    VerifyExamples {
        /// Operation budget for enumeration jobs.
        #[arg(long)]
        budget: Option<u64>,
        /// Worker-thread cap.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Access-structure report of the scheme hosted on the dual code.
    Sss {
        #[command(flatten)]
        function: FunctionArgs,
        #[command(flatten)]
        construction: ConstructionArgs,
        /// Include the full list of minimal access sets (can be large).
        #[arg(long)]
        list_sets: bool,
    },
    /// Exact Walsh spectrum summary (per-point rows with --full).
    Spectrum {
        #[command(flatten)]
        function: FunctionArgs,
        /// Emit every spectrum row.
        #[arg(long)]
        full: bool,
    },
    /// Classification only: amplitude, sign partition, regularity, duals.
    Classify {
        #[command(flatten)]
        function: FunctionArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match &err {
                PipelineError::Input(_) => EXIT_USAGE,
                _ => EXIT_HYPOTHESIS,
            };
            ExitCode::from(code)
        }
    }
}

fn budget_from(flag: Option<u64>) -> OpBudget {
    if let Some(b) = flag {
        return OpBudget(b);
    }
    if let Ok(env) = std::env::var("PLATEAU_BUDGET") {
        if let Ok(b) = env.parse::<u64>() {
            return OpBudget(b);
        }
    }
    OpBudget::default()
}

fn init_threads(threads: Option<usize>) {
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

fn load_function(args: &FunctionArgs) -> Result<(plateau_core::FunctionTable, Option<String>), PipelineError> {
    let table_text = match &args.table {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| {
            PipelineError::Input(format!("cannot read table file {path}: {e}"))
        })?),
        None => None,
    };
    build_table(args.p, args.n, args.poly.as_deref(), table_text.as_deref())
}

fn function_value(args: &FunctionArgs, poly_echo: &Option<String>) -> serde_json::Value {
    let source = if args.poly.is_some() { "poly" } else { "table" };
    report::function_json(args.p, args.n, poly_echo.as_deref(), source)
}

fn run(cli: Cli) -> Result<u8, PipelineError> {
    match cli.cmd {
        Cmd::Analyze { function, construction } => {
            init_threads(function.threads);
            let budget = budget_from(function.budget);
            let (f, echo) = load_function(&function)?;
            let profile = classify(&f)?;
            let kind = parse_construction(&construction.construction)?;
            let outcome =
                pipeline::run_construction(&f, &profile, kind, construction.punctured, budget)?;
            let fjson = function_value(&function, &echo);
            let pjson = report::profile_json(&profile);
            let cjson = report::construction_json(&outcome);
            if function.format == "text" {
                print!("{}", report::analysis_text(&fjson, &pjson, &cjson));
            } else {
                println!("{}", report::render(&report::analysis_json(fjson, pjson, cjson), true));
            }
            Ok(match outcome.prediction {
                PredictionStatus::Mismatch(_) => EXIT_MISMATCH,
                _ => 0,
            })
        }
        Cmd::VerifyExamples { budget, threads } => {
            init_threads(threads);
            let budget = budget_from(budget);
            let fixtures = fixtures::builtin();
            let total = fixtures.len();
            let mut passed = 0;
            for fx in &fixtures {
                let result = pipeline::verify_fixture(fx, budget);
                if result.passed() {
                    passed += 1;
                    println!("example {:2} PASS  {}", result.id, result.name);
                } else {
                    println!("example {:2} FAIL  {}", result.id, result.name);
                    for f in &result.failures {
                        println!("            - {f}");
                    }
                }
            }
            println!("{passed}/{total} PASS");
            Ok(if passed == total { 0 } else { EXIT_MISMATCH })
        }
        Cmd::Sss { function, construction, list_sets } => {
            init_threads(function.threads);
            let budget = budget_from(function.budget);
            let (f, echo) = load_function(&function)?;
            let profile = classify(&f)?;
            let kind = parse_construction(&construction.construction)?;
            let outcome =
                pipeline::run_construction(&f, &profile, kind, construction.punctured, budget)?;
            let ctx = SchemeCtx::from_code(&outcome.spec, Some(&f))?;
            let access = ctx.minimal_access_sets(budget)?;
            let d_dual = match outcome.dual.d_dual {
                DualDistance::Exact(d) => d,
                DualDistance::AtLeastFive => 5,
            };
            let coverage = ctx.coverage_report(&access, d_dual);
            let fjson = function_value(&function, &echo);
            let doc = report::sss_json(fjson, &outcome, &ctx, &access, &coverage, list_sets);
            println!("{}", report::render(&doc, true));
            Ok(0)
        }
        Cmd::Spectrum { function, full } => {
            init_threads(function.threads);
            let (f, echo) = load_function(&function)?;
            let spectrum = walsh_counts_fast(&f);
            let parseval =
                spectrum.parseval_sum().as_integer() == Some((f.p() as i64).pow(2 * f.n()));
            let classified = classify_plateaued(&spectrum).ok();
            let mut doc = serde_json::json!({
                "schema": report::SCHEMA,
                "function": function_value(&function, &echo),
                "support_size": (0..f.len()).filter(|&a| !spectrum.value(a).is_zero()).count(),
                "parseval_ok": parseval,
                "s": classified.as_ref().map(|p| p.s()),
                "plateaued": classified.is_some(),
            });
            if full {
                let ctx = FieldCtx::new(f.p()).expect("valid prime");
                let rows: Vec<serde_json::Value> = (0..f.len())
                    .map(|alpha| {
                        let value = spectrum.value(alpha);
                        let form = classified.as_ref().map(|prof| {
                            let parity = if (prof.n() + prof.s()) % 2 == 0 {
                                Parity::Even
                            } else {
                                Parity::Odd
                            };
                            let magnitude =
                                (f.p() as i64).pow((prof.n() + prof.s()) / 2);
                            match recognize_walsh_form(&ctx, &value, magnitude, parity) {
                                WalshForm::Zero => "0".to_string(),
                                WalshForm::Root { sign, phase } => {
                                    format!("{}p^{}·w^{}", sign_str(sign), (prof.n() + prof.s()) / 2, phase)
                                }
                                WalshForm::Gauss { sign, phase } => {
                                    format!("{}p^{}·G·w^{}", sign_str(sign), (prof.n() + prof.s() - 1) / 2, phase)
                                }
                                WalshForm::NoMatch => "?".to_string(),
                            }
                        });
                        serde_json::json!({
                            "alpha": plateau_core::walsh::point_digits(f.p(), f.n(), alpha),
                            "counts": spectrum.row(alpha),
                            "form": form,
                        })
                    })
                    .collect();
                doc["rows"] = serde_json::json!(rows);
            }
            println!("{}", report::render(&doc, true));
            Ok(0)
        }
        Cmd::Classify { function } => {
            init_threads(function.threads);
            let (f, echo) = load_function(&function)?;
            let profile = classify(&f)?;
            let doc = serde_json::json!({
                "schema": report::SCHEMA,
                "function": function_value(&function, &echo),
                "profile": report::profile_json(&profile),
            });
            if function.format == "text" {
                let pjson = report::profile_json(&profile);
                println!(
                    "s={} k={} type={} regularity={} nwrf_t={} dual_bent={}",
                    pjson["s"], pjson["k"], pjson["type"], pjson["regularity"],
                    pjson["nwrf_t"], pjson["dual_bent"]
                );
            } else {
                println!("{}", report::render(&doc, true));
            }
            Ok(0)
        }
    }
}

fn sign_str(sign: i8) -> &'static str {
    if sign >= 0 {
        "+"
    } else {
        "-"
    }
}
