//! `plansym` command-line driver.
//!
//! Exit codes: 0 success, 1 conflict found (`--fail-on-conflict`) or states
//! not isomorphic (`isocheck`), 2 input error, 3 resource cap exceeded.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use plansym::abstraction::{pool, verify_faithfulness};
use plansym::canonical::{states_isomorphic, FormCache};
use plansym::conflicts::{find_conflicts, ConflictOptions, DomainReport};
use plansym::object_graph::{build_object_graph, ColorLegend, Encoding};
use plansym::pddl::GroundError;
use plansym::state_space::format_vstar;
use plansym::wl::{wl1_histograms, Aggregation};
use plansym::{expand, load_task, GroundTask, State, TransitionSystem};

use config::{AggChoice, AlgChoice, EncodingChoice, FileConfig, FlagConfig, RunConfig};

#[derive(Parser)]
#[command(name = "plansym", version, about = "State symmetry and color-refinement analysis for STRIPS tasks")]
struct Cli {
    /// TOML file with defaults for the flags below (kebab-case keys).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand reachable state spaces and report their size and V* values.
    Expand {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        common: Common,
    },
    /// Quotient the pooled state spaces by state isomorphism.
    Abstract {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        common: Common,
        /// Canonical-form store to extend with the classes found.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Also check that the quotient is faithful.
        #[arg(long)]
        verify: bool,
    },
    /// Count pairs of classes that color refinement cannot separate.
    Conflicts {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        encoding: Option<EncodingChoice>,
        #[arg(long, value_enum)]
        agg: Option<AggChoice>,
        #[arg(long, value_enum)]
        alg: Option<AlgChoice>,
        #[arg(long)]
        fwl2_max_vertices: Option<usize>,
        /// Witness pairs listed per configuration.
        #[arg(long)]
        witnesses: Option<usize>,
        #[arg(long)]
        fail_on_conflict: bool,
    },
    /// Decide whether two state dumps are isomorphic.
    Isocheck {
        domain: PathBuf,
        instance: PathBuf,
        state_a: PathBuf,
        state_b: PathBuf,
        /// Instance of the second state, if different.
        #[arg(long)]
        instance_b: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Inputs {
    domain: PathBuf,
    /// Instance files or glob patterns.
    #[arg(required = true)]
    instances: Vec<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    states_max: Option<usize>,
    /// Directory for report files.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Cap(String),
}

impl From<plansym::Error> for Failure {
    fn from(e: plansym::Error) -> Self {
        match e {
            plansym::Error::StateCap(_) | plansym::Error::Ground(GroundError::TooManyActions { .. }) => {
                Failure::Cap(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(Failure::Input)?,
        None => FileConfig::default(),
    };
    let mut flags = FlagConfig {
        jobs: cli.jobs,
        ..FlagConfig::default()
    };
    match &cli.command {
        Command::Expand { common, .. } => set_common(&mut flags, common),
        Command::Abstract { common, cache, .. } => {
            set_common(&mut flags, common);
            flags.cache = cache.clone();
        }
        Command::Conflicts {
            common,
            encoding,
            agg,
            alg,
            fwl2_max_vertices,
            witnesses,
            fail_on_conflict,
            ..
        } => {
            set_common(&mut flags, common);
            flags.encoding = *encoding;
            flags.agg = *agg;
            flags.alg = *alg;
            flags.fwl2_max_vertices = *fwl2_max_vertices;
            flags.witnesses = *witnesses;
            flags.fail_on_conflict = *fail_on_conflict;
        }
        Command::Isocheck { .. } => {}
    }
    let cfg = RunConfig::resolve(flags, file).map_err(Failure::Input)?;
    if let Some(n) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    match cli.command {
        Command::Expand { inputs, .. } => cmd_expand(&inputs, &cfg),
        Command::Abstract { inputs, verify, .. } => cmd_abstract(&inputs, &cfg, verify),
        Command::Conflicts { inputs, .. } => cmd_conflicts(&inputs, &cfg),
        Command::Isocheck {
            domain,
            instance,
            state_a,
            state_b,
            instance_b,
        } => cmd_isocheck(&domain, &instance, instance_b.as_deref(), &state_a, &state_b),
    }
}

fn set_common(flags: &mut FlagConfig, common: &Common) {
    flags.states_max = common.states_max;
    flags.out = common.out.clone();
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Provenance<'a> {
    tool: &'static str,
    version: &'static str,
    inputs: Vec<InputDigest>,
    config: &'a RunConfig,
}

impl Provenance<'_> {
    fn comment_lines(&self) -> String {
        let mut out = format!("# {} {}\n", self.tool, self.version);
        for i in &self.inputs {
            let _ = writeln!(out, "# input {} sha256 {}", i.path, i.sha256);
        }
        let _ = writeln!(out, "# config {}", serde_json::to_string(self.config).unwrap());
        out
    }
}

struct Loaded {
    tasks: Vec<GroundTask>,
    digests: Vec<InputDigest>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn digest(path: &Path, text: &str) -> InputDigest {
    InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(text.as_bytes())),
    }
}

fn instance_paths(patterns: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in patterns {
        let s = p.to_string_lossy();
        if !s.contains(['*', '?', '[']) {
            out.push(p.clone());
            continue;
        }
        let mut matched: Vec<PathBuf> = glob::glob(&s)
            .map_err(|e| Failure::Input(format!("bad pattern '{s}': {e}")))?
            .filter_map(|r| r.ok())
            .collect();
        if matched.is_empty() {
            return Err(Failure::Input(format!("no files match '{s}'")));
        }
        matched.sort();
        out.extend(matched);
    }
    Ok(out)
}

fn load(inputs: &Inputs) -> Result<Loaded> {
    let domain = read(&inputs.domain)?;
    check_domain(&inputs.domain, &domain)?;
    let mut digests = vec![digest(&inputs.domain, &domain)];
    let mut tasks = Vec::new();
    for path in instance_paths(&inputs.instances)? {
        let text = read(&path)?;
        digests.push(digest(&path, &text));
        let task = load_task(&domain, &text).map_err(|e| match Failure::from(e) {
            Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
            Failure::Cap(m) => Failure::Cap(format!("{}: {m}", path.display())),
        })?;
        tasks.push(task);
    }
    Ok(Loaded { tasks, digests })
}

fn check_domain(path: &Path, text: &str) -> Result<()> {
    plansym::pddl::parse_domain(text)
        .map(drop)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_out(cfg: &RunConfig, name: &str, contents: &str) -> Result<()> {
    let Some(dir) = &cfg.out else { return Ok(()) };
    fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn expand_all(tasks: &[GroundTask], cfg: &RunConfig) -> Result<Vec<TransitionSystem>> {
    tasks
        .iter()
        .map(|t| expand(t, cfg.states_max).map_err(|e| Failure::Cap(format!("{}: {e}", t.instance_name))))
        .collect()
}

#[derive(Serialize)]
struct ExpandSummary {
    instance: String,
    states: usize,
    transitions: usize,
    goal_states: usize,
    initial_vstar: String,
    vstar: Vec<(String, usize)>,
}

fn cmd_expand(inputs: &Inputs, cfg: &RunConfig) -> Result<u8> {
    let loaded = load(inputs)?;
    let systems = expand_all(&loaded.tasks, cfg)?;
    let mut summaries = Vec::new();
    for (task, ts) in loaded.tasks.iter().zip(&systems) {
        let s = ExpandSummary {
            instance: task.instance_name.clone(),
            states: ts.num_states(),
            transitions: ts.num_transitions(),
            goal_states: ts.goal_flags.iter().filter(|&&g| g).count(),
            initial_vstar: format_vstar(ts.vstar[ts.initial]),
            vstar: ts.vstar_histogram().into_iter().map(|(v, n)| (format_vstar(v), n)).collect(),
        };
        println!("instance: {}", s.instance);
        println!("states: {}", s.states);
        println!("transitions: {}", s.transitions);
        println!("goal states: {}", s.goal_states);
        println!("initial vstar: {}", s.initial_vstar);
        let hist: Vec<String> = s.vstar.iter().map(|(v, n)| format!("{v}:{n}")).collect();
        println!("vstar histogram: {}", hist.join(" "));
        write_out(cfg, &format!("{}.ts.txt", task.instance_name), &ts.to_text(task))?;
        summaries.push(s);
    }
    let prov = Provenance {
        tool: "plansym",
        version: env!("CARGO_PKG_VERSION"),
        inputs: loaded.digests,
        config: cfg,
    };
    let json = serde_json::json!({ "provenance": prov, "instances": summaries });
    write_out(cfg, "expand.json", &format!("{}\n", serde_json::to_string_pretty(&json).unwrap()))?;
    Ok(0)
}

fn cmd_abstract(inputs: &Inputs, cfg: &RunConfig, verify: bool) -> Result<u8> {
    let loaded = load(inputs)?;
    let systems = expand_all(&loaded.tasks, cfg)?;
    let pairs: Vec<_> = loaded.tasks.iter().zip(&systems).collect();
    let am = pool(&pairs).map_err(|e| Failure::Input(e.to_string()))?;
    let mut per_instance = Vec::new();
    for (i, (task, ts)) in pairs.iter().enumerate() {
        let classes = am.classes_in_instance(i);
        println!("{}: states {} classes {}", task.instance_name, ts.num_states(), classes);
        per_instance.push(serde_json::json!({
            "instance": task.instance_name,
            "states": ts.num_states(),
            "classes": classes,
        }));
    }
    println!("instances: {}", loaded.tasks.len());
    println!("states: {}", am.num_states());
    println!("classes: {}", am.num_classes());
    println!("factor: {:.3}", am.reduction_factor());
    let mut faithful = None;
    if verify {
        let ok = (0..systems.len()).all(|i| verify_faithfulness(&systems[i], &am, i).is_faithful());
        println!("faithful: {}", if ok { "yes" } else { "no" });
        faithful = Some(ok);
    }
    if let Some(path) = &cfg.cache {
        let mut cache = FormCache::load(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let new = am.classes.iter().filter(|c| cache.insert(c.form.clone())).count();
        cache.save(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        println!("cache: {} forms ({new} new)", cache.len());
    }
    let prov = Provenance {
        tool: "plansym",
        version: env!("CARGO_PKG_VERSION"),
        inputs: loaded.digests,
        config: cfg,
    };
    let tasks: Vec<&GroundTask> = loaded.tasks.iter().collect();
    let systems_ref: Vec<&TransitionSystem> = systems.iter().collect();
    let reduced = format!("{}{}", prov.comment_lines(), am.export_reduced_set(&tasks, &systems_ref));
    write_out(cfg, "reduced.txt", &reduced)?;
    let json = serde_json::json!({
        "provenance": prov,
        "instances": per_instance,
        "states": am.num_states(),
        "classes": am.num_classes(),
        "factor": am.reduction_factor(),
        "faithful": faithful,
    });
    write_out(cfg, "abstract.json", &format!("{}\n", serde_json::to_string_pretty(&json).unwrap()))?;
    Ok(0)
}

fn cmd_conflicts(inputs: &Inputs, cfg: &RunConfig) -> Result<u8> {
    let loaded = load(inputs)?;
    let configs = cfg.analysis_configs();
    if configs.is_empty() {
        return Err(Failure::Input("no analysis configuration selected".into()));
    }
    let mut notices = Vec::new();
    let mut kept = Vec::new();
    let mut systems = Vec::new();
    for task in &loaded.tasks {
        match expand(task, cfg.states_max) {
            Ok(ts) => {
                kept.push(task);
                systems.push(ts);
            }
            Err(e) => notices.push(format!("{}: {e}", task.instance_name)),
        }
    }
    for n in &notices {
        eprintln!("notice: skipped {n}");
    }
    let systems: Vec<&TransitionSystem> = systems.iter().collect();
    let pairs: Vec<_> = kept.iter().copied().zip(systems.iter().copied()).collect();
    let am = pool(&pairs).map_err(|e| Failure::Input(e.to_string()))?;
    let opts = ConflictOptions {
        max_witnesses: cfg.witnesses,
        fwl2_max_vertices: cfg.fwl2_max_vertices,
    };
    let reports: Vec<_> = configs
        .iter()
        .map(|&c| find_conflicts(&am, &kept, &systems, c, &opts))
        .collect();
    let domain = loaded.tasks.first().map_or_else(String::new, |t| t.domain_name.clone());
    let row = DomainReport {
        domain,
        instances: kept.len(),
        states: am.num_states(),
        classes: am.num_classes(),
        notices,
        reports,
    };
    let csv = format!("{}\n{}\n", DomainReport::csv_header(&configs), row.csv_row());
    print!("{csv}");

    let mut witnesses = String::new();
    for r in &row.reports {
        for s in &r.skipped {
            let _ = writeln!(witnesses, "skipped {}: class {} has {} vertices", r.config.column(), s.class, s.vertices);
        }
        for w in &r.witnesses {
            let atoms = |rep: plansym::abstraction::StateRef| {
                systems[rep.instance].states[rep.state].atom_names(kept[rep.instance]).join(" ")
            };
            let _ = writeln!(
                witnesses,
                "{} classes {} {} vstar {} {}{} histogram {}\n  a: {}\n  b: {}",
                r.config.column(),
                w.class_a,
                w.class_b,
                w.vstar_a,
                w.vstar_b,
                if w.v_conflict { " V" } else { "" },
                w.histogram,
                atoms(w.rep_a),
                atoms(w.rep_b)
            );
        }
    }
    if !witnesses.is_empty() {
        print!("\n{witnesses}");
    }
    let prov = Provenance {
        tool: "plansym",
        version: env!("CARGO_PKG_VERSION"),
        inputs: loaded.digests,
        config: cfg,
    };
    write_out(cfg, "conflicts.csv", &format!("{}{csv}", prov.comment_lines()))?;
    write_out(cfg, "witnesses.txt", &format!("{}{witnesses}", prov.comment_lines()))?;
    let json = serde_json::json!({ "provenance": prov, "report": row });
    write_out(cfg, "conflicts.json", &format!("{}\n", serde_json::to_string_pretty(&json).unwrap()))?;
    let any = row.reports.iter().any(|r| r.e_pairs > 0);
    Ok(if cfg.fail_on_conflict && any { 1 } else { 0 })
}

fn cmd_isocheck(domain: &Path, instance: &Path, instance_b: Option<&Path>, a: &Path, b: &Path) -> Result<u8> {
    let domain_text = read(domain)?;
    check_domain(domain, &domain_text)?;
    let load_one = |p: &Path| -> Result<GroundTask> {
        load_task(&domain_text, &read(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
    };
    let ta = load_one(instance)?;
    let tb = match instance_b {
        Some(p) => load_one(p)?,
        None => ta.clone(),
    };
    let parse = |task: &GroundTask, p: &Path| -> Result<State> {
        State::parse_text(task, &read(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
    };
    let (sa, sb) = (parse(&ta, a)?, parse(&tb, b)?);
    if states_isomorphic(&sa, &ta, &sb, &tb) {
        println!("isomorphic");
        return Ok(0);
    }
    let legend = ColorLegend::for_task(&ta);
    let note = if !legend.is_compatible(&tb) {
        "instances have different predicate tables".to_string()
    } else {
        let ga = build_object_graph(&sa, &ta, Encoding::Plain, &legend).graph;
        let gb = build_object_graph(&sb, &tb, Encoding::Plain, &legend).graph;
        let r = wl1_histograms(&[&ga, &gb], Aggregation::Multiset);
        let same = r.histograms[0] == r.histograms[1];
        format!("1-WL(plain) histograms {}", if same { "equal" } else { "differ" })
    };
    println!("not isomorphic; {note}");
    Ok(1)
}
