//! Command-line front end. Every run prints a config echo first; the echo,
//! fed back as arguments, reproduces the run exactly.
//!
//! Exit codes: 0 computed, 1 negative verdict of a yes/no subcommand,
//! 2 usage or parse error, 3 budget exhausted.

pub mod render;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use discrarr::arrangement::DEFAULT_SAMPLE_BUDGET;
use discrarr::classify::{audit_arrangement, enumerate_candidates, family_name, MAX_DESK_N};
use discrarr::discriminantal::{
    intersection_rank, representative, Representative, DEFAULT_REPRESENTATIVE_BUDGET,
};
use discrarr::io::{arrangement_from_json, arrangement_to_json, translation_from_json, ReportFile};
use discrarr::presentation::DEFAULT_SEARCH_BUDGET;
use discrarr::varieties::{
    default_r, membership, solve_on_variety_with_budget, Family, VarietyQuery, DEFAULT_SOLVE_BUDGET,
};
use discrarr::{Arrangement, Error, FieldMode, Presentation, TranslationVector};

pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Circuits of the arrangement.
    Circuits,
    /// Rank of the intersection of D_S over the family.
    Rank,
    /// BBA condition and the threshold of V_T for a family.
    Bba,
    /// Membership of the arrangement in V_(T, r).
    Membership,
    /// Audit of every small structural family against the arrangement.
    Classify,
    /// Degeneration T_(from -> to).
    Degenerate,
    /// Seeded arrangement, on a family's variety or generic.
    Sample,
    /// SVG drawing of a translated line arrangement.
    Render,
    /// Candidate families for minimal non-very generic intersections.
    Enumerate,
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "discrarr",
    version,
    about = "Discriminantal arrangements, exactly"
)]
pub struct CommandConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Arrangement JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Where to write the JSON report, sampled arrangement or SVG.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Family text ("123,156,246" or "[1 2 13],[4 5 6]") or a name such as
    /// W6, Wd8_4, W8, L8, DW10.
    #[arg(long)]
    pub family: Option<String>,
    /// Translation JSON file for render.
    #[arg(long)]
    pub translation: Option<PathBuf>,
    /// Rank threshold; defaults to the V_T threshold.
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long)]
    pub from: Option<usize>,
    #[arg(long)]
    pub to: Option<usize>,
    /// Ground set size where no arrangement is given.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// "Q" or "Fp:<prime>".
    #[arg(long, default_value = "Q")]
    pub field: String,
    /// Search or retry budget; each subcommand has its own default.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub nprime_max: Option<usize>,
    /// Render viewport "xmin,ymin,xmax,ymax".
    #[arg(long)]
    pub viewport: Option<String>,
    /// Print only the JSON form on stdout (the echo goes to stderr).
    #[arg(long)]
    pub json: bool,
}

impl CommandConfig {
    /// The argument list that reproduces this run, defaults included.
    pub fn echo_args(&self) -> Vec<String> {
        let command = self
            .command
            .to_possible_value()
            .expect("no skipped variants");
        let mut args = vec![command.get_name().to_string()];
        let mut opt = |name: &str, value: Option<String>| {
            if let Some(v) = value {
                args.push(format!("--{name}"));
                args.push(v);
            }
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        opt("input", path(&self.input));
        opt("output", path(&self.output));
        opt("family", self.family.clone());
        opt("translation", path(&self.translation));
        opt("r", self.r.map(|v| v.to_string()));
        opt("from", self.from.map(|v| v.to_string()));
        opt("to", self.to.map(|v| v.to_string()));
        opt("n", self.n.map(|v| v.to_string()));
        opt("k", Some(self.k.to_string()));
        opt("seed", Some(self.seed.to_string()));
        opt("field", Some(self.field.clone()));
        opt("budget", self.budget.map(|v| v.to_string()));
        opt("nprime-max", self.nprime_max.map(|v| v.to_string()));
        opt("viewport", self.viewport.clone());
        if self.json {
            args.push("--json".into());
        }
        args
    }

    pub fn echo(&self) -> String {
        let args = self.echo_args();
        let joined = shlex::try_join(args.iter().map(String::as_str))
            .expect("arguments contain no NUL bytes");
        format!("# discrarr {joined}")
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } | Error::RetryBudgetExhausted { .. } => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Result of one subcommand.
#[derive(Clone, Debug)]
pub struct Report {
    pub human: Vec<String>,
    pub json: Value,
    /// Answer of a yes/no subcommand.
    pub verdict: Option<bool>,
    /// Written to `--output` instead of the JSON form when present.
    pub artifact: Option<String>,
}

impl Report {
    fn new(human: Vec<String>, json: Value) -> Self {
        Report {
            human,
            json,
            verdict: None,
            artifact: None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.verdict == Some(false) {
            EXIT_NEGATIVE
        } else {
            0
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn in_file(path: &Path, e: Error) -> CliError {
    let mut err = CliError::from(e);
    err.message = format!("{}: {}", path.display(), err.message);
    err
}

fn arrangement(cfg: &CommandConfig) -> Result<Arrangement, CliError> {
    let path = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::usage("--input is required"))?;
    arrangement_from_json(&read(path)?).map_err(|e| in_file(path, e))
}

fn required<T: Copy>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::usage(format!("--{flag} is required")))
}

fn family_text(cfg: &CommandConfig) -> Result<&str, CliError> {
    cfg.family
        .as_deref()
        .ok_or_else(|| CliError::usage("--family is required"))
}

/// A named family on its own ground set, or the parsed text.
fn presentation(text: &str, n: Option<usize>, k: usize) -> Result<Presentation, CliError> {
    if let Some(f) = Family::by_name(text) {
        let p = f.presentation()?;
        return Ok(match n {
            Some(n) => p.with_context(n.max(p.n()), k)?,
            None => p,
        });
    }
    Ok(Presentation::parse(text, n, k)?)
}

fn field(cfg: &CommandConfig) -> Result<FieldMode, CliError> {
    Ok(cfg.field.parse()?)
}

fn lists(t: &Presentation) -> Value {
    json!(t.to_lists())
}

pub fn run(cfg: &CommandConfig) -> Result<Report, CliError> {
    match cfg.command {
        Command::Circuits => cmd_circuits(cfg),
        Command::Rank => cmd_rank(cfg),
        Command::Bba => cmd_bba(cfg),
        Command::Membership => cmd_membership(cfg),
        Command::Classify => cmd_classify(cfg),
        Command::Degenerate => cmd_degenerate(cfg),
        Command::Sample => cmd_sample(cfg),
        Command::Render => cmd_render(cfg),
        Command::Enumerate => cmd_enumerate(cfg),
    }
}

pub fn cmd_circuits(cfg: &CommandConfig) -> Result<Report, CliError> {
    let a = arrangement(cfg)?;
    let wide = a.n() > 9;
    let circuits: Vec<Vec<usize>> = a.circuits().iter().map(|c| c.indices().to_vec()).collect();
    let mut human = vec![format!(
        "{} circuits (n = {}, k = {}, generic: {})",
        circuits.len(),
        a.n(),
        a.k(),
        a.is_generic()
    )];
    human.extend(a.circuits().iter().map(|c| c.indices().format(wide)));
    Ok(Report::new(
        human,
        json!({"n": a.n(), "k": a.k(), "generic": a.is_generic(), "circuits": circuits}),
    ))
}

pub fn cmd_rank(cfg: &CommandConfig) -> Result<Report, CliError> {
    let a = arrangement(cfg)?;
    let t = presentation(family_text(cfg)?, Some(a.n()), a.k())?;
    let rank = intersection_rank(&a, &t)?;
    Ok(Report::new(
        vec![format!("rank {rank} (nu {}) for {}", t.nu(), t.to_text())],
        json!({"family": t.to_text(), "members": lists(&t), "rank": rank, "nu": t.nu()}),
    ))
}

fn ground(cfg: &CommandConfig) -> Result<(Option<usize>, usize), CliError> {
    Ok(match &cfg.input {
        Some(_) => {
            let a = arrangement(cfg)?;
            (Some(a.n()), a.k())
        }
        None => (cfg.n, cfg.k),
    })
}

pub fn cmd_bba(cfg: &CommandConfig) -> Result<Report, CliError> {
    let (n, k) = ground(cfg)?;
    let t = presentation(family_text(cfg)?, n, k)?;
    let verdict = t.bba_check()?;
    let budget = cfg.budget.unwrap_or(DEFAULT_SEARCH_BUDGET);
    let threshold = match default_r(&t, budget) {
        Ok(r) => Some(r),
        Err(Error::InvalidArgument(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let witness = verdict.witness.as_ref().map(Presentation::to_text);
    let mut human = vec![format!(
        "{}: {} (nu {})",
        t.to_text(),
        if verdict.ok {
            "satisfies BBA"
        } else {
            "violates BBA"
        },
        t.nu()
    )];
    if let Some(w) = &witness {
        human.push(format!("witness {w}"));
    }
    human.push(match threshold {
        Some(r) => format!("V_T threshold r = {r}"),
        None => "no strict upper bound in P".into(),
    });
    let mut report = Report::new(
        human,
        json!({"family": t.to_text(), "ok": verdict.ok, "witness": witness, "nu": t.nu(), "r": threshold}),
    );
    report.verdict = Some(verdict.ok);
    Ok(report)
}

pub fn cmd_membership(cfg: &CommandConfig) -> Result<Report, CliError> {
    let a = arrangement(cfg)?;
    let t = presentation(family_text(cfg)?, Some(a.n()), a.k())?;
    let r = match cfg.r {
        Some(r) => r,
        None => default_r(&t, cfg.budget.unwrap_or(DEFAULT_SEARCH_BUDGET))?,
    };
    let v = membership(&a, &VarietyQuery::new(t.clone(), r), field(cfg)?)?;
    let mut report = Report::new(
        vec![format!(
            "{} (rank certificate {}, r = {r}, field {}) for {}",
            v.member,
            v.rank_certificate,
            v.field,
            t.to_text()
        )],
        json!({
            "family": t.to_text(),
            "member": v.member,
            "rank_certificate": v.rank_certificate,
            "r": r,
            "field": v.field.to_string(),
        }),
    );
    report.verdict = Some(v.member);
    Ok(report)
}

pub fn cmd_classify(cfg: &CommandConfig) -> Result<Report, CliError> {
    let a = arrangement(cfg)?;
    let nprime_max = cfg.nprime_max.unwrap_or(a.n().min(MAX_DESK_N));
    let report = audit_arrangement(&a, nprime_max, field(cfg)?)?;
    let file = ReportFile::new(&a, &report);
    let mut human = vec![format!(
        "{} hits over {} families and {} labelings (field {}, n' <= {nprime_max})",
        report.hits.len(),
        report.families,
        report.labelings,
        report.field.tag()
    )];
    human.extend(report.hits.iter().map(|h| {
        format!(
            "{} {} rank {} r {} labels {:?}",
            h.family,
            h.presentation.to_text(),
            h.rank,
            h.r,
            h.labels
        )
    }));
    human.push(file.note.clone());
    let json = serde_json::to_value(&file).expect("plain data");
    Ok(Report::new(human, json))
}

pub fn cmd_degenerate(cfg: &CommandConfig) -> Result<Report, CliError> {
    let (n, k) = ground(cfg)?;
    let t = presentation(family_text(cfg)?, n, k)?;
    let d = t.degenerate(required(cfg.from, "from")?, required(cfg.to, "to")?)?;
    Ok(Report::new(
        vec![format!(
            "{} (gamma = {})",
            d.presentation.to_text(),
            d.gamma
        )],
        json!({"presentation": d.presentation.to_text(), "members": lists(&d.presentation), "n": d.presentation.n(), "gamma": d.gamma}),
    ))
}

pub fn cmd_sample(cfg: &CommandConfig) -> Result<Report, CliError> {
    let sample = match &cfg.family {
        Some(name) => {
            let f = Family::by_name(name).ok_or_else(|| {
                CliError::usage(format!("{name:?} names no family with a defining equation"))
            })?;
            solve_on_variety_with_budget(&f, cfg.seed, cfg.budget.unwrap_or(DEFAULT_SOLVE_BUDGET))?
        }
        None => Arrangement::random_generic_with_budget(
            required(cfg.n, "n")?,
            cfg.k,
            cfg.seed,
            50,
            cfg.budget.unwrap_or(DEFAULT_SAMPLE_BUDGET),
        )?,
    };
    let text = arrangement_to_json(&sample.arrangement);
    let json: Value = serde_json::from_str(&text).expect("valid JSON");
    let mut report = Report::new(
        vec![format!(
            "{} lines in rank {} after {} resamples",
            sample.arrangement.n(),
            sample.arrangement.k(),
            sample.resamples
        )],
        json,
    );
    report.artifact = Some(text);
    Ok(report)
}

fn viewport(cfg: &CommandConfig) -> Result<Option<render::Viewport>, CliError> {
    let Some(text) = &cfg.viewport else {
        return Ok(None);
    };
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::usage(format!("--viewport: {e}")))?;
    match v.as_slice() {
        &[a, b, c, d] if v.iter().all(|x| x.is_finite()) => Ok(Some([a, b, c, d])),
        _ => Err(CliError::usage(
            "--viewport needs four finite numbers xmin,ymin,xmax,ymax",
        )),
    }
}

pub fn cmd_render(cfg: &CommandConfig) -> Result<Report, CliError> {
    let a = arrangement(cfg)?;
    let t = match (&cfg.translation, &cfg.family) {
        (Some(path), _) => translation_from_json(&read(path)?).map_err(|e| in_file(path, e))?,
        (None, Some(text)) => {
            let target = presentation(text, Some(a.n()), a.k())?;
            let budget = cfg.budget.unwrap_or(DEFAULT_REPRESENTATIVE_BUDGET);
            match representative(&a, &target, cfg.seed, budget)? {
                Representative::Found(t) => t,
                Representative::NotFound { achieved, .. } => {
                    return Err(CliError {
                        code: EXIT_BUDGET,
                        message: format!(
                            "no translation realizes {} within {budget} attempts; the last one realized {}",
                            target.to_text(),
                            achieved.to_text()
                        ),
                    })
                }
            }
        }
        (None, None) => TranslationVector::zero(a.n()),
    };
    let svg = render::render_svg(&a, &t, viewport(cfg)?)?;
    let concurrent: Vec<String> = render::intersection_points(&a, &t)?
        .values()
        .filter(|s| s.len() >= 3)
        .map(|s| s.format(a.n() > 9))
        .collect();
    let mut report = Report::new(
        vec![svg.clone()],
        json!({"translation": t.t.iter().map(ToString::to_string).collect::<Vec<_>>(), "concurrent": concurrent}),
    );
    report.artifact = Some(svg);
    Ok(report)
}

pub fn cmd_enumerate(cfg: &CommandConfig) -> Result<Report, CliError> {
    let n = cfg.n.unwrap_or(8);
    let nprime_max = cfg.nprime_max.unwrap_or(n);
    let classes = enumerate_candidates(n, cfg.k, nprime_max)?;
    let named: Vec<(String, &Presentation)> = classes
        .iter()
        .map(|t| Ok((family_name(t)?, t)))
        .collect::<Result<_, Error>>()?;
    let mut human = vec![format!(
        "{} classes for n = {n}, k = {}, n' <= {nprime_max}",
        classes.len(),
        cfg.k
    )];
    human.extend(named.iter().map(|(name, t)| {
        format!(
            "{name}: {} (n' = {}, nu {}, in P: {})",
            t.to_text(),
            t.union().len(),
            t.nu(),
            t.is_in_p()
        )
    }));
    let json = json!({
        "n": n,
        "k": cfg.k,
        "nprime_max": nprime_max,
        "classes": named.iter().map(|(name, t)| json!({
            "name": name,
            "canonical": t.to_text(),
            "members": lists(t),
            "nu": t.nu(),
            "in_p": t.is_in_p(),
        })).collect::<Vec<_>>(),
    });
    Ok(Report::new(human, json))
}
