//! `coxext` — distributions, extremes, and diagnostics for inversion and
//! descent statistics on finite Coxeter groups.
//!
//! Exit codes: 0 success, 1 verification/domain failure, 2 usage error.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coxext::conditions::{check_growth, profile_sequence, ConditionId, SequenceSpec};
use coxext::extremes::{norming_constants, tail_ratio, ConvergenceReport, Grid};
use coxext::groups::GroupDescriptor;
use coxext::montecarlo::{run as run_sim, SimConfig};
use coxext::oracle;
use coxext::statistics::{
    descent_bernoulli_params, eulerian_pmf, mahonian_pmf, moments, SampleMethod, Statistic,
};

#[derive(Parser)]
#[command(name = "coxext", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    out: OutputOpts,
}

#[derive(Args, Clone)]
struct OutputOpts {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, order, degrees, and reflection count of a group.
    Describe { group: String },
    /// Probability mass function of a statistic.
    Pmf {
        group: String,
        #[arg(long)]
        stat: String,
        /// Attach exact integer counts.
        #[arg(long)]
        exact: bool,
    },
    /// Exact mean and variance of a statistic.
    Moments {
        group: String,
        #[arg(long)]
        stat: String,
    },
    /// Roots −qᵢ of the Eulerian polynomial and Bernoulli parameters pᵢ.
    Roots { group: String },
    /// Gumbel norming constants for one row of a sequence.
    Norms {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        stat: String,
        #[arg(long)]
        n: u64,
    },
    /// Exact sup-error of the Gumbel approximation along a row list.
    Converge {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        stat: String,
        #[arg(long = "n-list")]
        n_list: String,
        /// Evaluation grid min:max:step.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Exact-vs-normal upper tail ratios at standardized points.
    Tailratio {
        group: String,
        #[arg(long)]
        stat: String,
        #[arg(long = "x-list")]
        x_list: String,
    },
    /// Simulate row maxima of the triangular array.
    Simulate {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        stat: String,
        #[arg(long = "n-list")]
        n_list: String,
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
        #[arg(long, env = "COXEXT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "inverse_cdf")]
        method: String,
    },
    /// Evaluate a growth condition along a sequence.
    Check {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        stat: String,
        #[arg(long)]
        condition: String,
        #[arg(long = "n-list")]
        n_list: String,
    },
    /// Compare analytic count vectors against brute-force enumeration.
    OracleVerify {
        group: String,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}

/// "100,1000" or decade shorthand "1e2..1e4x10" (inclusive, multiplicative
/// step); forms can be mixed with commas.
fn parse_n_list(text: &str) -> anyhow::Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((lo, rest)) = part.split_once("..") {
            let (hi, factor) = rest
                .split_once('x')
                .ok_or_else(|| anyhow::anyhow!("range '{part}' needs 'LO..HIxFACTOR'"))?;
            let lo: f64 = lo.trim().parse()?;
            let hi: f64 = hi.trim().parse()?;
            let factor: f64 = factor.trim().parse()?;
            if !(factor > 1.0) || !(lo >= 1.0) || hi < lo {
                anyhow::bail!("bad range '{part}'");
            }
            let mut x = lo;
            while x <= hi * 1.000001 {
                out.push(x.round() as u64);
                x *= factor;
            }
        } else {
            let v: f64 = part.parse()?;
            out.push(v.round() as u64);
        }
    }
    if out.is_empty() {
        anyhow::bail!("empty n-list");
    }
    Ok(out)
}

fn parse_x_list(text: &str) -> anyhow::Result<Vec<f64>> {
    let xs: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()?;
    if xs.is_empty() {
        anyhow::bail!("empty x-list");
    }
    Ok(xs)
}

fn writer(out: &OutputOpts) -> io::Result<Box<dyn Write>> {
    Ok(match &out.output {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json(out: &OutputOpts, value: serde_json::Value) -> anyhow::Result<()> {
    let mut w = writer(out)?;
    serde_json::to_writer_pretty(&mut w, &value)?;
    writeln!(w)?;
    Ok(())
}

fn pmf_for(g: &GroupDescriptor, stat: Statistic, exact: bool) -> coxext::Result<coxext::Pmf> {
    match stat {
        Statistic::Inv => mahonian_pmf(g, exact),
        Statistic::Des => eulerian_pmf(g),
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<ExitCode> {
    let out = &cli.out;
    match &cli.command {
        Command::Describe { group } => {
            let g = GroupDescriptor::parse(group)?;
            let summary = g.summary();
            match out.format {
                Format::Json => emit_json(out, serde_json::to_value(&summary)?)?,
                Format::Csv => {
                    let mut w = writer(out)?;
                    writeln!(w, "field,value")?;
                    writeln!(w, "group,{g}")?;
                    writeln!(w, "rank,{}", g.rank())?;
                    writeln!(w, "reflection_count,{}", g.reflection_count())?;
                    writeln!(w, "order,{}", g.order())?;
                    let degrees: Vec<String> =
                        g.degrees().iter().map(u64::to_string).collect();
                    writeln!(w, "degrees,{}", degrees.join(" "))?;
                }
            }
        }
        Command::Pmf { group, stat, exact } => {
            let g = GroupDescriptor::parse(group)?;
            let pmf = pmf_for(&g, stat.parse()?, *exact)?;
            match out.format {
                Format::Json => emit_json(out, pmf.to_json())?,
                Format::Csv => pmf.write_csv(writer(out)?)?,
            }
        }
        Command::Moments { group, stat } => {
            let g = GroupDescriptor::parse(group)?;
            let stat: Statistic = stat.parse()?;
            let m = moments(&g, stat)?;
            match out.format {
                Format::Json => emit_json(
                    out,
                    serde_json::json!({
                        "group": g.to_string(),
                        "stat": stat.to_string(),
                        "mean": m.mean.to_string(),
                        "variance": m.variance.to_string(),
                        "mean_f64": m.mean_f,
                        "variance_f64": m.var_f,
                    }),
                )?,
                Format::Csv => {
                    let mut w = writer(out)?;
                    writeln!(w, "field,exact,float")?;
                    writeln!(w, "mean,{},{}", m.mean, m.mean_f)?;
                    writeln!(w, "variance,{},{}", m.variance, m.var_f)?;
                }
            }
        }
        Command::Roots { group } => {
            let g = GroupDescriptor::parse(group)?;
            let params = descent_bernoulli_params(&g, 1e-12)?;
            match out.format {
                Format::Json => {
                    emit_json(
                        out,
                        serde_json::json!({
                            "group": g.to_string(),
                            "q": params.q,
                            "p": params.p,
                        }),
                    )?;
                }
                Format::Csv => {
                    let mut w = writer(out)?;
                    writeln!(w, "i,q,p")?;
                    for (i, p) in params.p.iter().enumerate() {
                        writeln!(w, "{i},{},{p}", params.q[i])?;
                    }
                }
            }
        }
        Command::Norms { seq, stat, n } => {
            let spec = SequenceSpec::parse(seq)?;
            let g = spec.materialize(*n)?;
            let m = moments(&g, stat.parse()?)?;
            let norm = norming_constants(*n, &m)?;
            match out.format {
                Format::Json => emit_json(out, serde_json::to_value(norm)?)?,
                Format::Csv => {
                    let mut w = writer(out)?;
                    writeln!(w, "n,group,alpha,beta,a,b")?;
                    writeln!(
                        w,
                        "{n},{g},{},{},{},{}",
                        norm.alpha, norm.beta, norm.a, norm.b
                    )?;
                }
            }
        }
        Command::Converge {
            seq,
            stat,
            n_list,
            grid,
        } => {
            let spec = SequenceSpec::parse(seq)?;
            let stat: Statistic = stat.parse()?;
            let grid = match grid {
                Some(g) => Grid::parse(g)?,
                None => Grid::default(),
            };
            let ns = parse_n_list(n_list)?;
            let mut items = Vec::with_capacity(ns.len());
            for &n in &ns {
                let g = spec.materialize(n)?;
                items.push((n, pmf_for(&g, stat, false)?, moments(&g, stat)?));
            }
            let report = ConvergenceReport::build(&items, grid)?;
            match out.format {
                Format::Json => emit_json(out, serde_json::to_value(&report)?)?,
                Format::Csv => report.write_csv(writer(out)?)?,
            }
        }
        Command::Tailratio {
            group,
            stat,
            x_list,
        } => {
            let g = GroupDescriptor::parse(group)?;
            let stat: Statistic = stat.parse()?;
            let pmf = pmf_for(&g, stat, false)?;
            let m = moments(&g, stat)?;
            let points = tail_ratio(&pmf, &m, &parse_x_list(x_list)?)?;
            match out.format {
                Format::Json => emit_json(out, serde_json::to_value(&points)?)?,
                Format::Csv => {
                    let mut w = writer(out)?;
                    writeln!(w, "x,ratio,in_zone")?;
                    for p in points {
                        match p.ratio {
                            Some(r) => writeln!(w, "{},{r},{}", p.x, p.in_zone)?,
                            None => writeln!(w, "{},underflow,{}", p.x, p.in_zone)?,
                        }
                    }
                }
            }
        }
        Command::Simulate {
            seq,
            stat,
            n_list,
            replicates,
            seed,
            method,
        } => {
            let config = SimConfig {
                spec: SequenceSpec::parse(seq)?,
                stat: stat.parse()?,
                rows: parse_n_list(n_list)?,
                replicates: *replicates,
                master_seed: *seed,
                method: method.parse::<SampleMethod>()?,
            };
            let report = run_sim(&config)?;
            match out.format {
                Format::Json => emit_json(out, serde_json::to_value(&report)?)?,
                Format::Csv => report.write_csv(writer(out)?)?,
            }
        }
        Command::Check {
            seq,
            stat,
            condition,
            n_list,
        } => {
            let spec = SequenceSpec::parse(seq)?;
            let profiles =
                profile_sequence(&spec, &parse_n_list(n_list)?, stat.parse()?)?;
            let id: ConditionId = condition.parse()?;
            let report = check_growth(&profiles, id)?;
            if let Some(note) = &report.note {
                eprintln!("note: {note}");
            }
            match out.format {
                Format::Json => emit_json(out, serde_json::to_value(&report)?)?,
                Format::Csv => report.write_csv(writer(out)?)?,
            }
        }
        Command::OracleVerify { group, cap } => {
            let g = GroupDescriptor::parse(group)?;
            let report = oracle::verify(&g, *cap)?;
            match out.format {
                Format::Json => emit_json(out, serde_json::to_value(&report)?)?,
                Format::Csv => {
                    let mut w = writer(out)?;
                    writeln!(w, "group,order,inv_ok,des_ok")?;
                    writeln!(
                        w,
                        "{},{},{},{}",
                        report.group, report.order, report.inv_ok, report.des_ok
                    )?;
                }
            }
            if !report.all_ok() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
