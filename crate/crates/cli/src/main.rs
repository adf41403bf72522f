//! Command-line front end: grid operations, Hamilton-Jacobi solves, sweeps and
//! the verification campaign.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use levelconv::extremal::{inf_conv, inf_max, sup_min};
use levelconv::gridfn::{fmt_sig, sample, FunctionSpec, GridDomain, GridFunction, OutsideMode};
use levelconv::harness::{self, CampaignConfig, InequalityId, DEFAULT_C_TOL};
use levelconv::hj::{default_t_ladder, longtime_sweep, solve, Formula, HamiltonianSpec, SweepConfig};
use levelconv::orlicz::{luxemburg_norm, YoungFunction};
use levelconv::transform::{check_with, hat_with, Ladder};

#[derive(Parser)]
#[command(name = "levelconv", version, about = "Extremal convolutions, radial transforms and Luxemburg norms on uniform grids")]
struct Cli {
    #[command(flatten)]
    grid: GridArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, global = true, default_value_t = 1)]
    dim: usize,
    #[arg(long, global = true, default_value_t = 4.0)]
    half_width: f64,
    /// Grid points per axis (odd).
    #[arg(long, global = true, default_value_t = 257)]
    n: usize,
    /// Young function as JSON, e.g. '{"kind":"power","p":2}'.
    #[arg(long, global = true)]
    phi: Option<String>,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 25)]
    trials: usize,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    InfConv,
    InfMax,
    SupMin,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Hat,
    Check,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormulaArg {
    HopfLax,
    Hopf,
    LevelSum,
}

impl From<FormulaArg> for Formula {
    fn from(f: FormulaArg) -> Self {
        match f {
            FormulaArg::HopfLax => Formula::HopfLax,
            FormulaArg::Hopf => Formula::Hopf,
            FormulaArg::LevelSum => Formula::LevelSum,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Inf-convolution, inf-max or sup-min of two function specs.
    Conv {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, value_enum, default_value_t = Op::InfConv)]
        op: Op,
    },
    /// Radial profile of the upper or lower transform.
    Transform {
        #[arg(long)]
        f: String,
        #[arg(long, value_enum, default_value_t = Which::Hat)]
        which: Which,
        /// Uniform ladder size; 0 uses every node value.
        #[arg(long, default_value_t = 256)]
        ladder: usize,
    },
    /// Luxemburg norm of a function spec.
    Norm {
        #[arg(long)]
        f: String,
        /// Take the norm of the reciprocal.
        #[arg(long)]
        recip: bool,
    },
    /// One Hamilton-Jacobi solve.
    Hj {
        #[arg(long)]
        g: String,
        /// Hamiltonian as JSON, e.g. '{"kind":"norm"}'.
        #[arg(long)]
        hamiltonian: String,
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value_t = FormulaArg::HopfLax)]
        formula: FormulaArg,
    },
    /// Norm of the reciprocal solution along a t ladder, with a log-log slope.
    Sweep {
        #[arg(long)]
        g: String,
        #[arg(long)]
        hamiltonian: String,
        #[arg(long, value_enum, default_value_t = FormulaArg::HopfLax)]
        formula: FormulaArg,
        /// Comma-separated geometric ladder; defaults to 4, 8, ..., 256.
        #[arg(long, value_delimiter = ',')]
        ts: Option<Vec<f64>>,
        #[arg(long)]
        theory_slope: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        slope_tolerance: f64,
    },
    /// Run the inequality campaign; exit code 1 on any failure.
    Verify {
        /// Comma-separated ids; all by default.
        #[arg(long, value_delimiter = ',')]
        ids: Option<Vec<String>>,
        #[arg(long, default_value_t = DEFAULT_C_TOL)]
        c_tol: f64,
    },
    /// Check that a weakened sharp constant is caught.
    Selftest {
        #[arg(long, default_value_t = 3.9)]
        weakened: f64,
    },
}

struct Ctx {
    grid: GridArgs,
}

impl Ctx {
    fn domain(&self) -> Result<GridDomain> {
        Ok(GridDomain::new(self.grid.dim, self.grid.half_width, self.grid.n)?)
    }

    fn phi(&self) -> Result<YoungFunction> {
        match &self.grid.phi {
            Some(s) => Ok(YoungFunction::from_json(s).context("--phi")?),
            None => Ok(YoungFunction::Power { p: 2.0 }),
        }
    }

    fn function(&self, json: &str, what: &str) -> Result<GridFunction> {
        let spec = FunctionSpec::from_json(json).with_context(|| format!("--{what}"))?;
        Ok(sample(&spec, &self.domain()?, OutsideMode::PlusInfinity)?)
    }

    fn sink(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.grid.out {
            Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn emit_json(&self, v: &Value) -> Result<()> {
        let mut w = self.sink()?;
        serde_json::to_writer_pretty(&mut w, v)?;
        writeln!(w)?;
        Ok(())
    }

    fn emit_grid(&self, f: &GridFunction) -> Result<()> {
        match self.grid.format {
            Format::Csv => Ok(f.write_csv(self.sink()?)?),
            Format::Json => {
                let d = f.domain();
                self.emit_json(&json!({
                    "dim": d.dim(),
                    "half_width": fmt_sig(d.half_width()),
                    "points_per_axis": d.points_per_axis(),
                    "values": f.values().iter().map(|&v| fmt_sig(v)).collect::<Vec<_>>(),
                }))
            }
        }
    }
}

fn parse_ids(ids: &[String]) -> Result<Vec<InequalityId>> {
    ids.iter().filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse::<InequalityId>().map_err(|e| anyhow::anyhow!("{e}"))).collect()
}

fn run(cli: Cli) -> Result<u8> {
    let ctx = Ctx { grid: cli.grid };
    match cli.cmd {
        Cmd::Conv { f, g, op } => {
            let (f, g) = (ctx.function(&f, "f")?, ctx.function(&g, "g")?);
            let r = match op {
                Op::InfConv => inf_conv(&f, &g)?,
                Op::InfMax => inf_max(&f, &g)?,
                Op::SupMin => sup_min(&f.with_outside(OutsideMode::MinusInfinity), &g.with_outside(OutsideMode::MinusInfinity))?,
            };
            ctx.emit_grid(&r)?;
        }
        Cmd::Transform { f, which, ladder } => {
            let f = ctx.function(&f, "f")?;
            let ladder = if ladder == 0 { Ladder::NodeValues } else { Ladder::Uniform(ladder) };
            let (profile, _) = match which {
                Which::Hat => hat_with(&f, &ladder),
                Which::Check => check_with(&f, &ladder),
            };
            match ctx.grid.format {
                Format::Csv => profile.write_csv(ctx.sink()?)?,
                Format::Json => ctx.emit_json(&json!({
                    "breakpoints": profile.breakpoints.iter().map(|&(t, v)| [fmt_sig(t), fmt_sig(v)]).collect::<Vec<_>>(),
                    "value_at_infinity": fmt_sig(profile.value_at_infinity),
                }))?,
            }
        }
        Cmd::Norm { f, recip } => {
            let mut f = ctx.function(&f, "f")?;
            if recip {
                f = f.recip();
            }
            let v = luxemburg_norm(&f, &ctx.phi()?);
            match ctx.grid.format {
                Format::Csv => writeln!(ctx.sink()?, "norm\n{}", fmt_sig(v))?,
                Format::Json => ctx.emit_json(&json!({ "norm": fmt_sig(v) }))?,
            }
        }
        Cmd::Hj { g, hamiltonian, t, formula } => {
            let g = ctx.function(&g, "g")?;
            let h = HamiltonianSpec::from_json(&hamiltonian).context("--hamiltonian")?;
            let s = solve(formula.into(), &h, &g, t)?;
            if !s.feasibility.satisfied {
                eprintln!("warning: sign condition fails ({})", fmt_sig(s.feasibility.value));
            }
            ctx.emit_grid(&s.u)?;
        }
        Cmd::Sweep { g, hamiltonian, formula, ts, theory_slope, slope_tolerance } => {
            let g = ctx.function(&g, "g")?;
            let h = HamiltonianSpec::from_json(&hamiltonian).context("--hamiltonian")?;
            let mut cfg = SweepConfig::new(formula.into(), h);
            cfg.theory_slope = theory_slope;
            cfg.slope_tolerance = slope_tolerance;
            let ts = ts.unwrap_or_else(default_t_ladder);
            let report = longtime_sweep(&cfg, &g, &ctx.phi()?, &ts)?;
            match ctx.grid.format {
                Format::Csv => {
                    report.write_csv(ctx.sink()?)?;
                    eprintln!("{}", report.summary_json());
                }
                Format::Json => {
                    let mut v: Value = serde_json::from_str(&report.summary_json())?;
                    v["rows"] = report.rows.iter().map(|r| json!({ "t": fmt_sig(r.t), "norm": fmt_sig(r.norm) })).collect();
                    ctx.emit_json(&v)?;
                }
            }
            if report.pass == Some(false) {
                return Ok(1);
            }
        }
        Cmd::Verify { ids, c_tol } => {
            let mut cfg = CampaignConfig::new(ctx.grid.dim, ctx.grid.half_width, ctx.grid.n, ctx.grid.trials);
            cfg.first_seed = ctx.grid.seed;
            cfg.c_tol = c_tol;
            if let Some(ids) = ids {
                cfg.ids = parse_ids(&ids)?;
            }
            if ctx.grid.phi.is_some() {
                cfg.phi = Some(ctx.phi()?);
            }
            let summary = harness::campaign(&cfg)?;
            ctx.emit_json(&summary.to_json())?;
            eprintln!(
                "passes {} vacuous {} hypothesis_not_met {} failures {} errors {}",
                summary.passes,
                summary.vacuous,
                summary.hypothesis_not_met,
                summary.failures,
                summary.errors.len()
            );
            return Ok(summary.exit_code() as u8);
        }
        Cmd::Selftest { weakened } => {
            let r = harness::selftest(weakened)?;
            ctx.emit_json(&json!({
                "ok": r.ok(),
                "control": r.control.to_json(),
                "weakened": r.weakened.to_json(),
            }))?;
            if !r.ok() {
                bail!("weakened constant {weakened} was not caught");
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
