use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use gradplate::case::PRESETS;
use gradplate::{run_case, CaseSpec};

/// Run a plate analysis case and write normalized results.
#[derive(Debug, Parser)]
#[command(name = "gradplate", version, about)]
struct Args {
    /// Case file (JSON).
    #[arg(long, value_name = "FILE", required_unless_present = "preset")]
    case: Option<PathBuf>,

    /// Directory for summary.json, curve.csv and through_thickness.csv.
    #[arg(long, value_name = "DIR", default_value = "out")]
    output: PathBuf,

    /// Override the number of elements per patch direction.
    #[arg(long, value_name = "K")]
    refine: Option<usize>,

    /// Override the spline degree.
    #[arg(long, value_name = "P")]
    degree: Option<usize>,

    /// Assemble on a single thread.
    #[arg(long)]
    deterministic: bool,

    /// Print a skeleton case (square, circle or skew) and exit.
    #[arg(long, value_name = "NAME", conflicts_with = "case")]
    preset: Option<String>,
}

fn run(args: Args) -> Result<()> {
    if let Some(name) = &args.preset {
        println!("{}", CaseSpec::preset(name)?.to_json());
        return Ok(());
    }
    if args.deterministic {
        rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build_global()?;
    }
    let Some(path) = &args.case else {
        bail!("--case is required (presets: {})", PRESETS.join(", "));
    };
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut spec =
        CaseSpec::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    if let Some(k) = args.refine {
        spec.mesh.refine = k;
    }
    if let Some(p) = args.degree {
        spec.mesh.degree = p;
    }
    spec.validate().context("invalid overrides")?;
    let result = run_case(&spec).with_context(|| format!("running case `{}`", spec.name))?;
    result
        .write(&args.output)
        .with_context(|| format!("writing results to {}", args.output.display()))?;
    let s = &result.summary;
    if let Some(r) = &s.static_result {
        println!("{}: w_bar = {:.6}", s.name, r.w_bar);
    }
    if let Some(b) = &s.buckling {
        println!("{}: delta_T_cr = {:.6}", s.name, b.delta_t_cr);
    }
    if let Some(t) = &s.postbuckling {
        let unconverged = t.points.iter().filter(|p| !p.converged).count();
        println!(
            "{}: {} path points, {} unconverged",
            s.name,
            t.points.len(),
            unconverged
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
