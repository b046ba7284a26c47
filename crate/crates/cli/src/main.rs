//! `dmt`: Morse matchings, homology, persistence, scalar fields and pruning
//! from the command line.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dmt_core::complex::{parse_complex, SimplicialComplex};
use dmt_core::gadget::{GadgetMode, Prescriptions};
use dmt_core::homology::{simplicial_homology, Coefficient};
use dmt_core::morse::{check_dmf, morse_summary, topo_sort_dmf};
use dmt_core::persistence::{diagram_svg, diagram_text, parse_filtration, persist_incremental, persist_naive, IncrementalConfig};
use dmt_core::pipeline::{homology_via_mmup, morse_matching, MorseConfig};
use dmt_core::pop::{PopConfig, SolverKind};
use dmt_core::prune::{check_core, prune_boundary};
use dmt_core::scalar::{parse_scalar_field, solve_compatible, validate_compatibility, TiePolicy};

use report::{list, Report};

#[derive(Parser)]
#[command(name = "dmt", version, about = "Discrete Morse matchings via partially rigid orientations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Near-optimal gradient field of a complex.
    Morse {
        complex: PathBuf,
        /// Write the gradient pairs (`alpha_id beta_id` per line).
        #[arg(long)]
        dgvf_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Homology through the Morse complex.
    Homology {
        complex: PathBuf,
        #[arg(long, default_value = "Z")]
        coeff: String,
        /// Skip critical-pair cancellation before the Smith form.
        #[arg(long)]
        no_cancel: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Persistence pairs of a filtration.
    Persist {
        filtration: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 480)]
        svg_size: u32,
        /// Re-solve the gradient field after this many negative simplices
        /// (0: never).
        #[arg(long, default_value_t = 16)]
        recompute: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Gradient field compatible with a vertex scalar field.
    Scalar {
        complex: PathBuf,
        field: PathBuf,
        #[arg(long, value_enum, default_value_t = Ties::Reject)]
        ties: Ties,
        #[command(flatten)]
        common: Common,
    },
    /// Collapse free faces down to the core.
    Prune {
        complex: PathBuf,
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value = "auto")]
    solver: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    balance_c: f64,
    #[arg(long, value_enum, default_value_t = Gadget::Fft)]
    gadget: Gadget,
    #[arg(long, value_enum, default_value_t = Oracle::Off)]
    oracle: Oracle,
    /// Add per-stage wall-clock timings (makes reports non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Gadget {
    Mr,
    Fft,
    /// Pseudo-FFT at every cell, even where direct links are smaller.
    FftAll,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Oracle {
    Off,
    Report,
    Strict,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Ties {
    Reject,
    Perturb,
}

enum Failure {
    Input(String),
    Solver(String),
}

const EXIT_INPUT: u8 = 2;
const EXIT_ORACLE: u8 = 3;
const EXIT_SOLVER: u8 = 4;

fn input<E: std::fmt::Display>(path: &Path) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(input(path))
}

fn load_complex(path: &Path) -> Result<SimplicialComplex, Failure> {
    parse_complex(&read(path)?).map_err(input(path))
}

fn write(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(input(path))
}

fn solver_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Solver(e.to_string())
}

impl Common {
    fn config(&self) -> Result<MorseConfig, Failure> {
        let solver: SolverKind = self.solver.parse().map_err(Failure::Input)?;
        if !(self.balance_c > 0.0 && self.balance_c <= 0.5) {
            return Err(Failure::Input(format!("--balance-c must lie in (0, 0.5], got {}", self.balance_c)));
        }
        Ok(MorseConfig {
            pop: PopConfig {
                solver,
                seed: self.seed,
                balance_c: self.balance_c,
                ..PopConfig::default()
            },
            gadget: match self.gadget {
                Gadget::Mr => GadgetMode::MatchingGadget,
                Gadget::Fft => GadgetMode::PseudoFft,
                Gadget::FftAll => GadgetMode::PseudoFftEverywhere,
            },
            ..MorseConfig::default()
        })
    }

    fn echo(&self, r: &mut Report) {
        r.put("config.solver", &self.solver);
        r.put("config.seed", self.seed);
        r.put("config.balance_c", format!("{:.6}", self.balance_c));
        r.put(
            "config.gadget",
            match self.gadget {
                Gadget::Mr => "mr",
                Gadget::Fft => "fft",
                Gadget::FftAll => "fft-all",
            },
        );
        r.put(
            "config.oracle",
            match self.oracle {
                Oracle::Off => "off",
                Oracle::Report => "report",
                Oracle::Strict => "strict",
            },
        );
    }
}

struct Clock {
    on: bool,
    last: Instant,
}

impl Clock {
    fn new(on: bool) -> Self {
        Clock { on, last: Instant::now() }
    }

    fn lap(&mut self, r: &mut Report, stage: &str) {
        if self.on {
            r.put(&format!("time.{stage}_ms"), format!("{:.3}", self.last.elapsed().as_secs_f64() * 1e3));
        }
        self.last = Instant::now();
    }
}

fn complex_header(r: &mut Report, path: &Path, k: &SimplicialComplex) {
    r.put("input", path.display());
    r.put("cells", k.len());
    r.put("cells_per_dim", list(&k.counts()));
    r.put("euler", k.euler_characteristic());
}

fn cmd_morse(path: &Path, dgvf_out: Option<&Path>, common: &Common, r: &mut Report) -> Result<(), Failure> {
    let k = load_complex(path)?;
    let cfg = common.config()?;
    let mut clock = Clock::new(common.timings);
    complex_header(r, path, &k);
    let run = morse_matching(&k, &cfg, &Prescriptions::default()).map_err(solver_err)?;
    clock.lap(r, "solve");
    r.put("gadget_nodes", run.gadget_nodes);
    r.put("gadget_rigid", run.gadget_rigid);
    r.put("trace.depth", run.trace.depth());
    r.put("trace.nodes", run.trace.nodes.len());
    r.put("trace.removed", run.trace.total_cost());
    let betti = simplicial_homology(&k, Coefficient::Integers).betti();
    match morse_summary(&k, &run.dgvf, &betti) {
        Ok(s) => {
            r.put("critical", list(&s.critical));
            r.put("critical_total", s.morse_total);
            r.put("betti", list(&s.betti));
            r.put("ratio", format!("{:.4}", s.ratio));
            r.check("morse_inequalities", true, "");
        }
        Err(e) => r.check("morse_inequalities", false, e),
    }
    let dmf = check_dmf(&k, &topo_sort_dmf(&k, &run.dgvf));
    r.check("dmf_axioms", dmf.is_empty(), dmf.join("; "));
    if let Some(out) = dgvf_out {
        write(out, &run.dgvf.serialize())?;
        r.put("dgvf_out", out.display());
    }
    Ok(())
}

fn cmd_homology(path: &Path, coeff: &str, no_cancel: bool, common: &Common, r: &mut Report) -> Result<(), Failure> {
    let k = load_complex(path)?;
    let coeff: Coefficient = coeff.parse().map_err(|e| Failure::Input(format!("{e}")))?;
    let mut cfg = common.config()?;
    cfg.cancel = !no_cancel;
    let mut clock = Clock::new(common.timings);
    complex_header(r, path, &k);
    r.put("coefficients", coeff);
    let (h, v) = homology_via_mmup(&k, &cfg, coeff).map_err(solver_err)?;
    clock.lap(r, "homology");
    r.put("morse_complex", list(&v.critical_counts()));
    r.block("homology", &h.report());
    if common.oracle != Oracle::Off {
        let o = simplicial_homology(&k, coeff);
        clock.lap(r, "oracle");
        r.check("simplicial_oracle", o.isomorphic(&h), format!("oracle gives\n{}", o.report()));
    }
    Ok(())
}

fn cmd_persist(path: &Path, svg: Option<&Path>, size: u32, every: usize, common: &Common, r: &mut Report) -> Result<(), Failure> {
    let f = parse_filtration(&read(path)?).map_err(input(path))?;
    let cfg = IncrementalConfig {
        morse: common.config()?,
        recompute_every: every,
    };
    let mut clock = Clock::new(common.timings);
    r.put("input", path.display());
    r.put("simplices", f.len());
    let res = persist_incremental(&f, &cfg).map_err(solver_err)?;
    clock.lap(r, "incremental");
    let top = res.pairs.iter().map(|p| p.dim).max().unwrap_or(0);
    let finite: Vec<usize> = (0..=top).map(|d| res.pairs.iter().filter(|p| p.dim == d && p.death.is_some()).count()).collect();
    let essential: Vec<usize> = (0..=top).map(|d| res.pairs.iter().filter(|p| p.dim == d && p.death.is_none()).count()).collect();
    r.put("pairs_finite", list(&finite));
    r.put("pairs_essential", list(&essential));
    r.put("stats.positive", res.stats.positive);
    r.put("stats.negative", res.stats.negative);
    r.put("stats.reversals", res.stats.reversals);
    r.put("stats.column_ops", res.stats.column_ops);
    r.put("stats.recomputations", res.stats.recomputations);
    r.put("stats.final_critical", res.stats.final_critical);
    let text = diagram_text(&res.pairs);
    r.block("diagram", &text);
    if common.oracle != Oracle::Off {
        let naive = persist_naive(&f);
        clock.lap(r, "oracle");
        r.check("naive_oracle", diagram_text(&naive) == text, "diagrams differ");
    }
    if let Some(out) = svg {
        write(out, &diagram_svg(&res.pairs, size))?;
        r.put("svg", out.display());
    }
    Ok(())
}

fn cmd_scalar(cpath: &Path, fpath: &Path, ties: Ties, common: &Common, r: &mut Report) -> Result<(), Failure> {
    let k = load_complex(cpath)?;
    let field = parse_scalar_field(&read(fpath)?).map_err(input(fpath))?;
    let policy = match ties {
        Ties::Reject => TiePolicy::Reject,
        Ties::Perturb => TiePolicy::Perturb,
    };
    let cfg = common.config()?;
    let mut clock = Clock::new(common.timings);
    complex_header(r, cpath, &k);
    r.put("field", fpath.display());
    let res = solve_compatible(&k, &field, policy, &cfg).map_err(|e| match e {
        dmt_core::scalar::ScalarSolveError::Field(e) => Failure::Input(format!("{}: {e}", fpath.display())),
        other => solver_err(other),
    })?;
    clock.lap(r, "solve");
    let prohibited = res.constraints.prohibited.iter().filter(|p| p.is_some()).count();
    r.put("prohibited_pairs", prohibited);
    r.put("critical", list(&res.run.dgvf.critical_counts()));
    r.put("critical_total", res.run.dgvf.critical_total());
    let violations = validate_compatibility(&k, &field, &res.run.dgvf);
    r.put("violations", violations.len());
    r.check("compatibility", violations.is_empty(), violations.join("; "));
    if common.oracle != Oracle::Off {
        let free = morse_matching(&k, &cfg, &Prescriptions::default()).map_err(solver_err)?;
        clock.lap(r, "unconstrained");
        r.put("unconstrained_critical_total", free.dgvf.critical_total());
        let betti = simplicial_homology(&k, Coefficient::Integers).betti();
        let ok = morse_summary(&k, &res.run.dgvf, &betti);
        r.check("morse_inequalities", ok.is_ok(), ok.err().map_or(String::new(), |e| e.to_string()));
    }
    Ok(())
}

fn cmd_prune(path: &Path, trace_out: Option<&Path>, common: &Common, r: &mut Report) -> Result<(), Failure> {
    let k = load_complex(path)?;
    let mut clock = Clock::new(common.timings);
    complex_header(r, path, &k);
    let pr = prune_boundary(&k);
    clock.lap(r, "prune");
    r.put("collapses", pr.steps.len());
    r.put("collapses_per_dim", list(&pr.counts()));
    r.put("core_cells", pr.core.len());
    r.put("core_cells_per_dim", list(&pr.core.counts()));
    let dominated = check_core(&pr.core);
    r.check(
        "no_dominated_vertex",
        dominated.is_empty(),
        format!("{} dominated pairs", dominated.len()),
    );
    if common.oracle != Oracle::Off {
        let before = simplicial_homology(&k, Coefficient::Integers);
        let after = simplicial_homology(&pr.core, Coefficient::Integers);
        r.check("homology_preserved", before.isomorphic(&after), "homology changed");
    }
    if let Some(out) = trace_out {
        write(out, &pr.trace())?;
        r.put("trace_out", out.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut r = Report::default();
    let (name, common) = match &cli.cmd {
        Cmd::Morse { common, .. } => ("morse", common),
        Cmd::Homology { common, .. } => ("homology", common),
        Cmd::Persist { common, .. } => ("persist", common),
        Cmd::Scalar { common, .. } => ("scalar", common),
        Cmd::Prune { common, .. } => ("prune", common),
    };
    r.put("command", name);
    common.echo(&mut r);
    let result = match &cli.cmd {
        Cmd::Morse { complex, dgvf_out, common } => cmd_morse(complex, dgvf_out.as_deref(), common, &mut r),
        Cmd::Homology {
            complex,
            coeff,
            no_cancel,
            common,
        } => cmd_homology(complex, coeff, *no_cancel, common, &mut r),
        Cmd::Persist {
            filtration,
            svg,
            svg_size,
            recompute,
            common,
        } => cmd_persist(filtration, svg.as_deref(), *svg_size, *recompute, common, &mut r),
        Cmd::Scalar {
            complex,
            field,
            ties,
            common,
        } => cmd_scalar(complex, field, *ties, common, &mut r),
        Cmd::Prune {
            complex,
            trace_out,
            common,
        } => cmd_prune(complex, trace_out.as_deref(), common, &mut r),
    };
    match result {
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Solver(m)) => {
            print!("{}", r.render());
            eprintln!("solver failure: {m}");
            ExitCode::from(EXIT_SOLVER)
        }
        Ok(()) => {
            print!("{}", r.render());
            if common.oracle == Oracle::Strict && !r.mismatches.is_empty() {
                for m in &r.mismatches {
                    eprintln!("oracle mismatch: {m}");
                }
                return ExitCode::from(EXIT_ORACLE);
            }
            ExitCode::SUCCESS
        }
    }
}
