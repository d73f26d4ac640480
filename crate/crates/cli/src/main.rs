use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use twistgen::f2group::{compare_groups, target_order, BsgsConfig, GenSet};
use twistgen::proofscripts::{
    builtin_ids, builtin_source, commutator_scripts, generation_inputs, omori_words, parse_script,
    run_script, Level, RunContext, Script, Step,
};
use twistgen::surface::{
    build_catalog, default_seed_sets, infer_seed_classes, parse_seed_file, seeds_for,
    validate_catalog, CurveCatalog, CurveId, GenusModel, Layout, MappingClassSpec, SeedProfile,
};
use twistgen::words::{parse_word, Environment, Evaluator, Word};

mod report;

use report::{Document, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "twistgen", version, about = "Mod-2 checks of Dehn-twist generating sets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    genus: usize,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed file replacing the shipped seeds.
    #[arg(long)]
    seeds: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a proof script.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Script id; `com` picks the commutator script for the genus.
        #[arg(long, required_unless_present = "script")]
        theorem: Option<String>,
        /// A script file to run instead of a shipped one.
        #[arg(long, conflicts_with = "theorem")]
        script: Option<PathBuf>,
        #[arg(long, default_value = "mod2")]
        level: Level,
        /// Run generation checks above the chain cap.
        #[arg(long)]
        force: bool,
        /// Corrupt one curve id first: `STEP:FROM:TO`, e.g. `3:c2:a1`.
        #[arg(long)]
        tamper: Option<String>,
    },
    /// Exact order of a generating set and comparison with the reference twists.
    Order {
        #[command(flatten)]
        common: Common,
        /// `omori`, a script id, or a list such as `[T, A1*A2^-1]`.
        #[arg(long)]
        gens: String,
        #[arg(long)]
        layout: Option<Layout>,
        #[arg(long)]
        force: bool,
    },
    /// Print the curve catalog.
    Catalog {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        layout: Option<Layout>,
        #[arg(long)]
        profile: Option<SeedProfile>,
    },
    /// Evaluate a word in the mod-2 representation.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        word: String,
        #[arg(long)]
        layout: Option<Layout>,
        #[arg(long)]
        profile: Option<SeedProfile>,
    },
    /// Search for seed classes consistent with the curve-image statements.
    Infer {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        layout: Option<Layout>,
        #[arg(long)]
        profile: Option<SeedProfile>,
        /// Search only `f1`, with `a2` fixed to the seed in use.
        #[arg(long)]
        fix_a2: bool,
    },
}

/// A usage or configuration error; exit code 2.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Output {
    verb: &'static str,
    genus: usize,
    pass: bool,
    text: String,
    result: Value,
}

fn progress() -> Arc<dyn Fn(&str) + Send + Sync> {
    Arc::new(|m: &str| eprintln!("twistgen: {m}"))
}

fn config(force: bool) -> BsgsConfig {
    let mut cfg = BsgsConfig::from_env().forced(force);
    cfg.progress = Some(progress());
    cfg
}

fn genus(g: usize) -> Result<GenusModel, Usage> {
    Ok(GenusModel::new(g)?)
}

fn catalog(
    common: &Common,
    layout: Layout,
    profile: Option<SeedProfile>,
) -> Result<CurveCatalog, Usage> {
    let genus = genus(common.genus)?;
    let profile = profile.unwrap_or_else(|| SeedProfile::default_for(genus, layout));
    let sets = match &common.seeds {
        Some(p) => parse_seed_file(&read(p)?)?,
        None => default_seed_sets(),
    };
    let seeds = seeds_for(&sets, profile, genus, layout)?;
    Ok(build_catalog(genus, layout, seeds)?)
}

fn read(p: &Path) -> Result<String, Usage> {
    std::fs::read_to_string(p).map_err(|e| Usage(format!("{}: {e}", p.display())))
}

fn load_script(theorem: Option<&str>, script: Option<&Path>, g: usize) -> Result<Script, Usage> {
    if let Some(p) = script {
        return Ok(parse_script(&read(p)?)?.instantiate(g)?);
    }
    match theorem.unwrap_or_default() {
        "com" => Ok(commutator_scripts(g)?),
        id => {
            let src = builtin_source(id)
                .map_err(|_| Usage(format!("unknown theorem `{id}`; one of com, {}", builtin_ids().join(", "))))?;
            Ok(src.instantiate(g)?)
        }
    }
}

fn tamper(script: Script, spec: &str) -> Result<Script, Usage> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [i, from, to] = parts.as_slice() else {
        return Err(Usage(format!("--tamper wants STEP:FROM:TO, got `{spec}`")));
    };
    let i: usize = i.parse().map_err(|_| Usage(format!("bad step index `{i}`")))?;
    let (s, predicted) = script.tamper(i, CurveId::parse_lower(from)?, CurveId::parse_lower(to)?)?;
    eprintln!("twistgen: tampered step {i}; predicted failures {predicted:?}");
    Ok(s)
}

fn uses_twists(s: &Script) -> bool {
    s.steps.iter().any(|st| match &st.step {
        Step::Define { word, .. } | Step::AssertClassImage { word, .. } | Step::AssertDet { word, .. } => {
            word.has_twist()
        }
        Step::AssertRepEqual { lhs, rhs } => lhs.has_twist() || rhs.has_twist(),
        Step::AssertGeneration { gens, reference } => gens.iter().chain(reference).any(Word::has_twist),
        Step::FindConjugator { .. } => true,
    })
}

fn cmd_verify(
    common: &Common,
    theorem: Option<&str>,
    script: Option<&Path>,
    level: Level,
    force: bool,
    tamper_spec: Option<&str>,
) -> Result<Output, Usage> {
    let mut s = load_script(theorem, script, common.genus)?;
    if let Some(t) = tamper_spec {
        s = tamper(s, t)?;
    }
    if level == Level::Signed && uses_twists(&s) {
        return Err(Usage(format!(
            "{} uses twists, which have no signed representation; use --level mod2",
            s.id
        )));
    }
    let cat = catalog(common, s.layout, Some(s.profile))?;
    let ctx = RunContext::with_catalog(cat)?.level(level).config(config(force));
    let r = run_script(&s, &ctx)?;
    Ok(Output {
        verb: "verify",
        genus: common.genus,
        pass: r.passed(),
        text: r.to_text(),
        result: serde_json::to_value(&r)?,
    })
}

#[derive(Serialize)]
struct OrderResult {
    gens: String,
    layout: String,
    order: String,
    reference_order: String,
    target_order: String,
    target_matches: bool,
    same_group: bool,
}

fn cmd_order(common: &Common, gens: &str, layout: Option<Layout>, force: bool) -> Result<Output, Usage> {
    let g = genus(common.genus)?;
    let cfg = config(force);
    cfg.check(g.g())?;
    let (layout, a, b) = if gens == "omori" || gens.starts_with('[') {
        let layout = layout.unwrap_or(Layout::Rotation);
        let cat = catalog(common, layout, None)?;
        let spec = MappingClassSpec::new(g, layout)?;
        let ev = Evaluator::new(Environment::new(g), &cat, &spec)?;
        let words: Vec<Word> = if gens == "omori" {
            omori_words(g)
        } else {
            let inner = gens.trim().trim_start_matches('[').trim_end_matches(']');
            inner.split(',').map(parse_word).collect::<Result<_, _>>()?
        };
        let all = |ws: &[Word]| ws.iter().map(|w| ev.evaluate_mod2(w)).collect::<Result<Vec<_>, _>>();
        (layout, all(&words)?, all(&omori_words(g))?)
    } else {
        let s = load_script(Some(gens), None, g.g())?;
        let cat = catalog(common, s.layout, Some(s.profile))?;
        let ctx = RunContext::with_catalog(cat)?;
        let (a, b) = generation_inputs(&s, &ctx)?;
        (s.layout, a, b)
    };
    let c = compare_groups(&GenSet::new(g.g(), a)?, &GenSet::new(g.g(), b)?, &cfg, true)?;
    let target = target_order(g.g());
    let res = OrderResult {
        gens: gens.to_string(),
        layout: layout.to_string(),
        order: c.order_a.to_string(),
        reference_order: c.order_b.to_string(),
        target_matches: c.order_b == target,
        target_order: target.to_string(),
        same_group: c.same,
    };
    let mut text = format!(
        "order {}\nreference order {}\ntarget order {} ({})\nsame_group {}\n",
        res.order,
        res.reference_order,
        res.target_order,
        if res.target_matches { "matches" } else { "differs; recorded as a finding" },
        res.same_group
    );
    text.push_str(&format!("verdict: {}\n", if c.same { "pass" } else { "fail" }));
    Ok(Output {
        verb: "order",
        genus: g.g(),
        pass: c.same,
        text,
        result: serde_json::to_value(&res)?,
    })
}

fn cmd_catalog(common: &Common, layout: Option<Layout>, profile: Option<SeedProfile>) -> Result<Output, Usage> {
    let cat = catalog(common, layout.unwrap_or(Layout::Rotation), profile)?;
    let spec = MappingClassSpec::new(cat.genus(), cat.layout())?;
    let v = validate_catalog(&cat, &spec);
    let entries: Vec<Value> = cat
        .entries()
        .iter()
        .map(|c| Ok(json!({"curve": c.to_string(), "class": cat.class(c)?.to_string()})))
        .collect::<Result<_, Usage>>()?;
    Ok(Output {
        verb: "catalog",
        genus: common.genus,
        pass: true,
        text: cat.to_file_text(),
        result: json!({
            "layout": cat.layout().to_string(),
            "profile": cat.profile().to_string(),
            "entries": entries,
            "constraints": v.results.len(),
            "constraints_passed": v.passed(),
        }),
    })
}

fn cmd_eval(
    common: &Common,
    word: &str,
    layout: Option<Layout>,
    profile: Option<SeedProfile>,
) -> Result<Output, Usage> {
    let w = parse_word(word)?;
    let cat = catalog(common, layout.unwrap_or(Layout::Rotation), profile)?;
    let spec = MappingClassSpec::new(cat.genus(), cat.layout())?;
    let ev = Evaluator::new(Environment::new(cat.genus()), &cat, &spec)?;
    let m = ev.evaluate_mod2(&w)?;
    let rows = m.hex_rows();
    let permutation = m.images().all(|v| v.weight() == 1);
    let mut text = String::new();
    for r in &rows {
        text.push_str(r);
        text.push('\n');
    }
    text.push_str(&format!(
        "preserves_form {}\npermutation {permutation}\n",
        m.preserves_form()
    ));
    Ok(Output {
        verb: "eval",
        genus: common.genus,
        pass: true,
        text,
        result: json!({
            "word": w.to_string(),
            "rows": rows,
            "preserves_form": m.preserves_form(),
            "permutation": permutation,
        }),
    })
}

fn cmd_infer(
    common: &Common,
    layout: Option<Layout>,
    profile: Option<SeedProfile>,
    fix_a2: bool,
) -> Result<Output, Usage> {
    let layout = layout.unwrap_or(Layout::Rotation);
    let cat = catalog(common, layout, profile)?;
    let fixed = if fix_a2 { Some(cat.class(&CurveId::a(2))?) } else { None };
    let found = infer_seed_classes(cat.genus(), layout, cat.profile(), fixed)?;
    let shipped = (cat.class(&CurveId::a(2))?, cat.class(&CurveId::f(1))?);
    let mut text = format!(
        "{} candidate seed pairs for profile {} ({layout} layout)\n",
        found.len(),
        cat.profile()
    );
    let list: Vec<Value> = found
        .iter()
        .map(|(a2, f1)| {
            let mark = if (*a2, *f1) == shipped { "  (shipped)" } else { "" };
            text.push_str(&format!("a2 = {a2}  f1 = {f1}{mark}\n"));
            json!({"a2": a2.to_string(), "f1": f1.to_string(), "shipped": (*a2, *f1) == shipped})
        })
        .collect();
    let includes = found.contains(&shipped);
    Ok(Output {
        verb: "infer",
        genus: common.genus,
        pass: includes,
        text,
        result: json!({
            "layout": layout.to_string(),
            "profile": cat.profile().to_string(),
            "candidates": list,
            "includes_shipped": includes,
        }),
    })
}

fn emit(common: &Common, out: &Output, start: Instant) -> Result<(), Usage> {
    let body = match common.format {
        Format::Text => out.text.clone(),
        Format::Json => {
            let doc = Document {
                schema_version: SCHEMA_VERSION,
                tool_version: env!("CARGO_PKG_VERSION"),
                command: std::env::args().skip(1).collect(),
                verb: out.verb,
                genus: out.genus,
                verdict: if out.pass { "pass" } else { "fail" },
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
                result: out.result.clone(),
            };
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    match &common.out {
        Some(p) => std::fs::write(p, body).map_err(|e| Usage(format!("{}: {e}", p.display())))?,
        None => print!("{body}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (common, res) = match &cli.cmd {
        Cmd::Verify {
            common,
            theorem,
            script,
            level,
            force,
            tamper,
        } => (
            common,
            cmd_verify(common, theorem.as_deref(), script.as_deref(), *level, *force, tamper.as_deref()),
        ),
        Cmd::Order {
            common,
            gens,
            layout,
            force,
        } => (common, cmd_order(common, gens, *layout, *force)),
        Cmd::Catalog {
            common,
            layout,
            profile,
        } => (common, cmd_catalog(common, *layout, *profile)),
        Cmd::Eval {
            common,
            word,
            layout,
            profile,
        } => (common, cmd_eval(common, word, *layout, *profile)),
        Cmd::Infer {
            common,
            layout,
            profile,
            fix_a2,
        } => (common, cmd_infer(common, *layout, *profile, *fix_a2)),
    };
    let out = match res {
        Ok(o) => o,
        Err(Usage(msg)) => {
            eprintln!("twistgen: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(Usage(msg)) = emit(common, &out, start) {
        eprintln!("twistgen: {msg}");
        return ExitCode::from(2);
    }
    if out.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
