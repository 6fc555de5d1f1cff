use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pmc_core::diagram::Generator;
use pmc_core::laws::{run_suite, LawBackend, Suite, SuiteConfig};
use pmc_core::random::{trial_rng, Random};
use pmc_core::{
    bayes_invert, conditional, conditional_leq, evaluate, parse, restriction_leq, typecheck, Backend, DiagramTerm,
    Error, FinRel, Morphism, ObjectType, PartialFn, Signature, SubKernel, Tolerance,
};

const EXIT_INPUT: u8 = 1;
const EXIT_CAPABILITY: u8 = 2;
const EXIT_DOES_NOT_HOLD: u8 = 3;
const EXIT_SUITE_FAILED: u8 = 4;

/// Partial Markov categories over finite sets: evaluate string diagrams
/// and check their order and inference laws.
#[derive(Parser)]
#[command(name = "pmc", version)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Semantic backend.
    #[arg(long, global = true, default_value = "finstoch", value_parser = parse_backend)]
    backend: Backend,
    /// Signature file (JSON).
    #[arg(long, global = true)]
    sig: Option<PathBuf>,
    /// Numeric tolerance.
    #[arg(long, global = true, default_value_t = Tolerance::DEFAULT.value())]
    tol: f64,
    /// Seed for random trials; PMC_SEED overrides it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Trials per law.
    #[arg(long, global = true, default_value_t = 200)]
    trials: usize,
    /// Largest object cardinality drawn by random laws.
    #[arg(long, global = true, default_value_t = 4)]
    max_card: usize,
    /// Emit one JSON document on standard output.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for law trials.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Read TERM arguments as inline expressions instead of file paths.
    #[arg(long, global = true)]
    expr: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a diagram.
    Eval { term: String },
    /// Decide whether F is below G.
    Order {
        f: String,
        g: String,
        #[arg(long, value_enum, default_value_t = RelationArg::Conditional)]
        relation: RelationArg,
    },
    /// Split F : X → A ⊗ B into a marginal and a conditional.
    Conditional {
        term: String,
        /// Number of leading codomain factors that form A.
        #[arg(long, default_value_t = 1)]
        split: usize,
    },
    /// Bayesian inverse of the channel G : A → B with respect to F : X → A.
    Bayes { g: String, f: String },
    /// Validity of predicate P : X → I in state SIGMA : I → X, before and after updating.
    Validity { sigma: String, p: String },
    /// Run law suites.
    Laws {
        /// Comma-separated suite names, or `all`.
        #[arg(long, default_value = "all")]
        suites: String,
        /// Run in every backend instead of the selected one.
        #[arg(long)]
        all_backends: bool,
        /// Directory for per-suite report files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a signature with random generators on one object.
    GenSig {
        /// Cardinality of the object `X`.
        #[arg(long, default_value_t = 3)]
        card: usize,
        /// Number of generators `k0, k1, ...`, each `X → X`.
        #[arg(long, default_value_t = 2)]
        count: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationArg {
    Restriction,
    Conditional,
}

fn parse_backend(s: &str) -> Result<Backend, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// A command result: the JSON document, its human rendering and the exit code.
struct Output {
    json: Value,
    human: String,
    code: u8,
}

impl Output {
    fn ok(json: Value, human: String) -> Self {
        Output { json, human, code: 0 }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unsupported { .. } | Error::MissingPayload { .. } | Error::TooLarge { .. } => EXIT_CAPABILITY,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

type CliResult<T> = Result<T, Failure>;

macro_rules! on_backend {
    ($backend:expr, $f:ident($($arg:expr),*)) => {
        match $backend {
            Backend::FinStoch => $f::<SubKernel>($($arg),*),
            Backend::Par => $f::<PartialFn>($($arg),*),
            Backend::Rel => $f::<FinRel>($($arg),*),
        }
    };
}

struct Context {
    opts: Opts,
    sig: Signature,
    tol: Tolerance,
    seed: u64,
}

impl Context {
    fn new(opts: Opts) -> CliResult<Self> {
        let tol = Tolerance::new(opts.tol)?;
        let seed = match std::env::var("PMC_SEED") {
            Ok(s) => s.trim().parse().map_err(|_| input(format!("PMC_SEED is not an unsigned integer: {s:?}")))?,
            Err(_) => opts.seed,
        };
        let sig = match &opts.sig {
            Some(path) => Signature::from_path(path)?,
            None => Signature::new(),
        };
        Ok(Context { opts, sig, tol, seed })
    }

    fn source(&self, arg: &str) -> CliResult<String> {
        if self.opts.expr {
            return Ok(arg.to_string());
        }
        std::fs::read_to_string(arg).map_err(|e| input(format!("{arg}: {e}")))
    }

    fn term(&self, arg: &str) -> CliResult<Typed> {
        let term = parse(&self.source(arg)?, &self.sig)?;
        let (dom, cod) = typecheck(&term, &self.sig)?;
        Ok(Typed { term, dom, cod })
    }

    fn eval<M: Morphism>(&self, arg: &str) -> CliResult<(Typed, M)> {
        let t = self.term(arg)?;
        let m = evaluate(&t.term, &self.sig)?;
        Ok((t, m))
    }
}

struct Typed {
    term: DiagramTerm,
    dom: ObjectType,
    cod: ObjectType,
}

impl Typed {
    fn signature(&self) -> String {
        format!("{} : {} → {}", pmc_core::render(&self.term), self.dom, self.cod)
    }
}

fn cmd_eval<M: Morphism>(cx: &Context, arg: &str) -> CliResult<Output> {
    let (t, m) = cx.eval::<M>(arg)?;
    Ok(Output::ok(
        json!({
            "backend": M::BACKEND,
            "term": pmc_core::render(&t.term),
            "dom": t.dom.to_string(),
            "cod": t.cod.to_string(),
            "morphism": m.to_json(),
        }),
        format!("{}\n{m}", t.signature()),
    ))
}

fn cmd_order<M: LawBackend>(cx: &Context, f: &str, g: &str, relation: RelationArg) -> CliResult<Output> {
    let (_, fm) = cx.eval::<M>(f)?;
    let (_, gm) = cx.eval::<M>(g)?;
    let verdict = match relation {
        RelationArg::Restriction => restriction_leq(&fm, &gm, cx.tol)?,
        RelationArg::Conditional => conditional_leq(&fm, &gm, cx.tol)?,
    };
    let mut human = format!(
        "{}: {} (residual {:e})",
        serde_json::to_value(verdict.relation).expect("relation serializes").as_str().unwrap_or_default(),
        if verdict.holds { "holds" } else { "does not hold" },
        verdict.residual
    );
    if let Some(w) = &verdict.witness {
        human.push_str(&format!("\nwitness:\n{w}"));
    }
    Ok(Output {
        json: verdict.to_json(),
        human,
        code: if verdict.holds { 0 } else { EXIT_DOES_NOT_HOLD },
    })
}

fn cmd_conditional<M: LawBackend>(cx: &Context, arg: &str, k: usize) -> CliResult<Output> {
    let (t, f) = cx.eval::<M>(arg)?;
    let (a, b) = t
        .cod
        .split_at(k)
        .ok_or_else(|| input(format!("cannot split codomain {} after {k} factors", t.cod)))?;
    let split = (a.cardinality(&cx.sig)?, b.cardinality(&cx.sig)?);
    let joint = conditional(&f, split, cx.tol)?;
    Ok(Output::ok(
        joint.to_json(),
        format!(
            "{}\nmarginal : {} → {a}\n{}\nconditional : {} → {b}\n{}",
            t.signature(),
            t.dom,
            joint.marginal,
            a.concat(&t.dom),
            joint.conditional
        ),
    ))
}

fn cmd_bayes<M: LawBackend>(cx: &Context, g: &str, f: &str) -> CliResult<Output> {
    let (gt, gm) = cx.eval::<M>(g)?;
    let (ft, fm) = cx.eval::<M>(f)?;
    let inv = bayes_invert(&gm, &fm, cx.tol)?;
    Ok(Output::ok(
        json!({ "backend": M::BACKEND, "inverse": inv.to_json() }),
        format!("inverse : {} → {}\n{inv}", gt.cod.concat(&ft.dom), gt.dom),
    ))
}

fn cmd_validity<M: LawBackend>(cx: &Context, sigma: &str, p: &str) -> CliResult<Output> {
    let (_, s) = cx.eval::<M>(sigma)?;
    let (_, pm) = cx.eval::<M>(p)?;
    let r = pmc_core::laws::check_validity_increase(&s, &pm, cx.tol)?;
    let human = format!(
        "prior validity: {}\nposterior:\n{}\nposterior validity: {}\nholds: {}{}",
        r.prior_validity,
        r.posterior,
        r.posterior_validity,
        r.holds,
        if r.degenerate { " (degenerate prior)" } else { "" }
    );
    Ok(Output {
        json: r.to_json(),
        human,
        code: if r.holds { 0 } else { EXIT_DOES_NOT_HOLD },
    })
}

fn cmd_laws(cx: &Context, suites: &str, all_backends: bool, out: Option<&Path>) -> CliResult<Output> {
    let cfg = SuiteConfig {
        max_card: cx.opts.max_card,
        tol: cx.tol,
        jobs: cx.opts.jobs,
        ..SuiteConfig::new(cx.opts.trials, cx.seed)
    };
    cfg.validate()?;
    let backends: Vec<Backend> = if all_backends { Backend::ALL.to_vec() } else { vec![cx.opts.backend] };
    let mut plan = Vec::new();
    for &backend in &backends {
        if suites.trim() == "all" {
            plan.extend(Suite::default_for(backend).into_iter().map(|s| (backend, s)));
        } else {
            for name in suites.split(',') {
                let suite: Suite = name.trim().parse()?;
                if !suite.supports(backend) {
                    if all_backends {
                        continue;
                    }
                    return Err(Error::Unsupported { what: "this suite", backend }.into());
                }
                plan.push((backend, suite));
            }
        }
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| input(format!("{}: {e}", dir.display())))?;
    }
    let mut reports = Vec::new();
    let mut human = String::new();
    let mut passed = true;
    for (backend, suite) in plan {
        let report = run_suite(suite, backend, &cfg)?;
        passed &= report.passed();
        human.push_str(&format!(
            "{} {backend} {suite}: {} laws, {} failures, {} vacuous, max residual {:e}\n",
            if report.passed() { "PASS" } else { "FAIL" },
            report.laws.len(),
            report.failures.len(),
            report.vacuous,
            report.max_residual
        ));
        for f in report.failures.iter().take(3) {
            human.push_str(&format!("  {} trial {}: {}\n", f.law, f.trial, f.message.as_deref().unwrap_or("equation fails")));
        }
        let doc = report.to_json();
        if let Some(dir) = out {
            let path = dir.join(format!("{backend}-{suite}.json"));
            let text = serde_json::to_string_pretty(&doc).expect("report serializes");
            std::fs::write(&path, text).map_err(|e| input(format!("{}: {e}", path.display())))?;
        }
        reports.push(doc);
    }
    human.pop();
    Ok(Output {
        json: json!({ "passed": passed, "reports": reports }),
        human,
        code: if passed { 0 } else { EXIT_SUITE_FAILED },
    })
}

fn cmd_gen_sig(cx: &Context, card: usize, count: usize) -> CliResult<Output> {
    if card == 0 {
        return Err(input("--card must be at least 1"));
    }
    let mut sig = Signature::new();
    sig.add_object("X", card);
    let x = ObjectType::new(["X"]);
    let mut rng = trial_rng(cx.seed, 0);
    for i in 0..count {
        let mut g = Generator::new(x.clone(), x.clone());
        g.finstoch = Some(SubKernel::random(card, card, &mut rng).to_rows());
        g.par = Some(PartialFn::random(card, card, &mut rng).table().to_vec());
        let rel = FinRel::random(card, card, &mut rng);
        g.rel = Some((0..card).map(|r| rel.row(r).to_vec()).collect());
        sig.add_generator(format!("k{i}"), g)?;
    }
    let doc = sig.to_json();
    let human = serde_json::to_string_pretty(&doc).expect("signature serializes");
    Ok(Output::ok(doc, human))
}

fn run(cli: Cli) -> CliResult<Output> {
    let backend = cli.opts.backend;
    let cx = Context::new(cli.opts)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cx.opts.jobs.max(1))
        .build()
        .map_err(|e| input(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Eval { term } => on_backend!(backend, cmd_eval(&cx, term)),
        Command::Order { f, g, relation } => on_backend!(backend, cmd_order(&cx, f, g, *relation)),
        Command::Conditional { term, split } => on_backend!(backend, cmd_conditional(&cx, term, *split)),
        Command::Bayes { g, f } => on_backend!(backend, cmd_bayes(&cx, g, f)),
        Command::Validity { sigma, p } => on_backend!(backend, cmd_validity(&cx, sigma, p)),
        Command::Laws { suites, all_backends, out } => cmd_laws(&cx, suites, *all_backends, out.as_deref()),
        Command::GenSig { card, count } => cmd_gen_sig(&cx, *card, *count),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let json_mode = cli.opts.json;
    match run(cli) {
        Ok(out) => {
            if json_mode {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("output serializes"));
            } else {
                println!("{}", out.human);
            }
            ExitCode::from(out.code)
        }
        Err(f) => {
            if json_mode {
                println!("{}", json!({ "error": f.message, "exit_code": f.code }));
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
