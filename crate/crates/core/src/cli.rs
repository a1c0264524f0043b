//! Command-line front end: `validate`, `enumerate`, `classify`, `verify`,
//! `compose` and `join`.
//!
//! Exit status is 0 on success, 1 when a verification check fails and 2 on a
//! usage, parse or construction error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use crate::lattice::{ElemSet, FiniteLattice};
use crate::library;
use crate::morphisms::{enumerate_morphisms, JoinMap, LatticeMorphism, LatticeRef, MorphismClass, DEFAULT_GUARD};
use crate::quantaloid::{classify_power_map, hom_set, hom_set_count, QuantaloidError, Tier, TierReport};
use crate::subcategory::{GeneratedSubcategory, SubcategorySpec};
use crate::text::{parse_lattice, parse_maps, write_map, write_power_map, NamedMorphism, TextError};
use crate::verify::{verify_lattice, CheckRecord, CheckStatus, VerificationReport, VerifyConfig, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qlat",
    version,
    about = "Finite lattices, union-preserving maps and their enrichments"
)]
pub struct Cli {
    /// Lattice file to make available by name (repeatable).
    #[arg(long = "lattice", global = true, value_name = "PATH")]
    pub lattice_files: Vec<PathBuf>,
    /// Largest hom-set that may be enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_GUARD)]
    pub guard: u64,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// JSON.
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build lattices and print their profiles.
    Validate {
        /// Lattice files or built-in names (C2, C3, C4, B2, M3, N5).
        #[arg(required = true)]
        lattices: Vec<String>,
    },
    /// Count (or list) a hom-set.
    Enumerate(EnumerateArgs),
    /// Place every map of a map file among the enrichments.
    Classify {
        map_file: PathBuf,
        #[command(flatten)]
        subcat: SubcatArgs,
    },
    /// Run every applicable check on each lattice.
    Verify {
        lattices: Vec<String>,
        /// Random samples per sampled check.
        #[arg(long, default_value_t = 500)]
        budget: usize,
    },
    /// Compose two maps: `outer ∘ inner`.
    Compose { outer: PathBuf, inner: PathBuf },
    /// Pointwise join of every map in the given files.
    Join {
        #[arg(required = true)]
        map_files: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(long, num_args = 2, value_names = ["SOURCE", "TARGET"], required = true)]
    pub hom: Vec<String>,
    /// Count one tier of union-preserving maps.
    #[arg(long, value_parser = parse_tier, conflicts_with = "class")]
    pub tier: Option<Tier>,
    /// Count one class of morphisms.
    #[arg(long, value_parser = parse_class)]
    pub class: Option<MorphismClass>,
    /// Print the members as well as the count.
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub subcat: SubcatArgs,
}

#[derive(Debug, Args)]
pub struct SubcatArgs {
    /// all, fixedtop, atomistic or generated:<map file of join maps>.
    #[arg(long, default_value = "all")]
    pub subcat: String,
    /// Close the subcategory under pointwise joins first.
    #[arg(long)]
    pub enrich: bool,
}

fn parse_tier(s: &str) -> Result<Tier, String> {
    s.parse()
}

fn parse_class(s: &str) -> Result<MorphismClass, String> {
    s.parse()
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Text { path: String, source: TextError },
    #[error("unknown lattice `{0}` (not a file, a loaded lattice or a built-in)")]
    UnknownLattice(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Quantaloid(#[from] QuantaloidError),
    #[error(transparent)]
    Morphism(#[from] crate::morphisms::MorphismError),
}

/// Lattices addressable by name: built-ins, overridden by `--lattice` files.
struct Registry {
    by_name: BTreeMap<String, LatticeRef>,
}

impl Registry {
    fn load(paths: &[PathBuf]) -> Result<Self, CliError> {
        let mut by_name: BTreeMap<String, LatticeRef> =
            library::all().into_iter().map(|l| (l.name().to_string(), l)).collect();
        for p in paths {
            let l = read_lattice(p)?;
            by_name.insert(l.name().to_string(), l);
        }
        Ok(Registry { by_name })
    }

    fn get(&self, name: &str) -> Option<LatticeRef> {
        self.by_name.get(name).cloned()
    }

    /// An existing file is parsed; anything else is looked up by name.
    fn resolve(&self, arg: &str) -> Result<LatticeRef, CliError> {
        let path = Path::new(arg);
        if path.is_file() {
            return read_lattice(path);
        }
        self.get(arg).ok_or_else(|| CliError::UnknownLattice(arg.to_string()))
    }

    fn read_maps(&self, path: &Path) -> Result<Vec<NamedMorphism>, CliError> {
        let text = read(path)?;
        parse_maps(&text, &|name| self.get(name)).map_err(|source| CliError::Text {
            path: display(path),
            source,
        })
    }
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: display(path),
        source,
    })
}

fn read_lattice(path: &Path) -> Result<LatticeRef, CliError> {
    let text = read(path)?;
    parse_lattice(&text)
        .map(LatticeRef::new)
        .map_err(|source| CliError::Text {
            path: display(path),
            source,
        })
}

fn subcategory(args: &SubcatArgs, registry: &Registry, guard: u64) -> Result<SubcategorySpec, CliError> {
    let spec = match args.subcat.as_str() {
        "all" => SubcategorySpec::All,
        "fixedtop" => SubcategorySpec::FixedTop,
        "atomistic" => SubcategorySpec::Atomistic,
        other => {
            let path = other.strip_prefix("generated:").ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown subcategory `{other}` (all, fixedtop, atomistic, generated:<path>)"
                ))
            })?;
            let mut objects: Vec<LatticeRef> = Vec::new();
            let mut generators: Vec<JoinMap> = Vec::new();
            for NamedMorphism { name, morphism } in registry.read_maps(Path::new(path))? {
                let LatticeMorphism::Join(f) = morphism else {
                    return Err(CliError::Usage(format!("{path}: generator `{name}` is not a join map")));
                };
                for l in [f.source(), f.target()] {
                    if !objects.iter().any(|o| **o == **l) {
                        objects.push(l.clone());
                    }
                }
                generators.push(f);
            }
            SubcategorySpec::Generated(GeneratedSubcategory::new(objects, generators, guard)?)
        }
    };
    if !args.enrich {
        return Ok(spec);
    }
    Ok(spec.pre_enrich(guard)?)
}

fn names(l: &FiniteLattice, s: ElemSet) -> Vec<String> {
    s.iter().map(|x| l.element_name(x).to_string()).collect()
}

fn table_text(f: &JoinMap) -> String {
    if f.is_identity() {
        return "id".to_string();
    }
    if f.is_zero() {
        return "0".to_string();
    }
    let (s, t) = (f.source(), f.target());
    s.nonzero()
        .iter()
        .map(|x| format!("{}->{}", s.element_name(x), t.element_name(f.apply(x))))
        .collect::<Vec<_>>()
        .join(" ")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

struct Output<'a> {
    out: &'a mut dyn Write,
    format: Format,
}

impl Output<'_> {
    fn text(&mut self, s: &str) {
        let _ = self.out.write_all(s.as_bytes());
    }

    fn json(&mut self, v: &Value) {
        let _ = writeln!(
            self.out,
            "{}",
            serde_json::to_string_pretty(v).expect("json value serializes")
        );
    }
}

fn validate(lattices: &[String], registry: &Registry, o: &mut Output) -> Result<i32, CliError> {
    let mut records = Vec::new();
    for arg in lattices {
        let l = registry.resolve(arg)?;
        let p = l.classify();
        let triple = p
            .witness_triple
            .map(|(a, b, c)| [a, b, c].map(|x| l.element_name(x).to_string()));
        match o.format {
            Format::Text => {
                let mut s = format!("lattice {} ({} elements)\n", l.name(), l.len());
                s += &format!("  two-element chain: {}\n", yes_no(p.is_two_chain));
                s += &format!("  atoms: {}\n", names(&l, p.atoms).join(" "));
                s += &format!("  join-irreducibles: {}\n", names(&l, p.join_irreducibles).join(" "));
                s += &format!("  atomistic: {}\n", yes_no(p.is_atomistic));
                s += &format!("  orthocomplemented: {}\n", yes_no(p.is_orthocomplemented));
                s += &format!(
                    "  witness triple: {}\n",
                    triple.map_or("none".to_string(), |t| t.join(" "))
                );
                o.text(&s);
            }
            Format::Structured => records.push(json!({
                "lattice": l.name(),
                "elements": l.elements(),
                "two_element_chain": p.is_two_chain,
                "atoms": names(&l, p.atoms),
                "join_irreducibles": names(&l, p.join_irreducibles),
                "atomistic": p.is_atomistic,
                "orthocomplemented": p.is_orthocomplemented,
                "witness_triple": triple,
            })),
        }
    }
    if o.format == Format::Structured {
        o.json(&Value::Array(records));
    }
    Ok(EXIT_OK)
}

fn enumerate(args: &EnumerateArgs, registry: &Registry, guard: u64, o: &mut Output) -> Result<i32, CliError> {
    let (source, target) = (registry.resolve(&args.hom[0])?, registry.resolve(&args.hom[1])?);
    let header = format!("{} -> {}", source.name(), target.name());
    if let Some(class) = args.class {
        let maps = enumerate_morphisms(&source, &target, class, guard)?;
        let texts: Vec<String> = maps
            .iter()
            .enumerate()
            .map(|(i, m)| write_map(&format!("f{i}"), m))
            .collect();
        return Ok(report_counts(
            o,
            &header,
            &[(class.as_str(), maps.len() as u64)],
            args.list.then_some(texts),
        ));
    }
    let spec = subcategory(&args.subcat, registry, guard)?;
    let tiers: Vec<Tier> = args.tier.map_or(Tier::ALL.to_vec(), |t| vec![t]);
    let mut counts = Vec::new();
    let mut listed = Vec::new();
    for tier in &tiers {
        if args.list {
            let maps = hom_set(&source, &target, *tier, &spec, guard)?;
            counts.push((tier.as_str(), maps.len() as u64));
            listed.extend(
                maps.iter()
                    .enumerate()
                    .map(|(i, g)| write_power_map(&format!("{tier}{i}"), g)),
            );
        } else {
            counts.push((tier.as_str(), hom_set_count(&source, &target, *tier, &spec, guard)?));
        }
    }
    Ok(report_counts(o, &header, &counts, args.list.then_some(listed)))
}

fn report_counts(o: &mut Output, header: &str, counts: &[(&str, u64)], listed: Option<Vec<String>>) -> i32 {
    match o.format {
        Format::Text => {
            let mut s = String::new();
            if let [(_, n)] = counts {
                s += &format!("{n}\n");
            } else {
                s += &format!("{header}\n");
                for (k, n) in counts {
                    s += &format!("{k:<8} {n}\n");
                }
            }
            for m in listed.iter().flatten() {
                s += m;
            }
            o.text(&s);
        }
        Format::Structured => {
            let counts: BTreeMap<&str, u64> = counts.iter().copied().collect();
            let mut v = json!({ "hom": header, "counts": counts });
            if let Some(listed) = listed {
                v["maps"] = json!(listed);
            }
            o.json(&v);
        }
    }
    EXIT_OK
}

fn classify(
    path: &Path,
    subcat: &SubcatArgs,
    registry: &Registry,
    guard: u64,
    o: &mut Output,
) -> Result<i32, CliError> {
    let spec = subcategory(subcat, registry, guard)?;
    let mut records = Vec::new();
    for NamedMorphism { name, morphism } in registry.read_maps(path)? {
        let g = morphism.to_power_map();
        let report: TierReport = classify_power_map(&g, &spec, guard)?;
        let f_pr = report.property_transition.as_ref().map(table_text);
        match o.format {
            Format::Text => {
                let mut s = format!(
                    "map {name} : {} -> {} ({})\n",
                    g.source().name(),
                    g.target().name(),
                    morphism.class()
                );
                s += &format!("  union-preserving: {}\n", yes_no(report.in_q_plus));
                s += &format!("  state transition: {}", yes_no(report.is_state_transition));
                if let Some(f) = &f_pr {
                    s += &format!("; f_pr = {f}");
                }
                s += &format!("; in Q⁻: {}\n", yes_no(report.in_q_minus));
                if !report.in_q_minus {
                    for line in write_power_map("hull", &report.q_minus_hull).lines() {
                        s += &format!("  | {line}\n");
                    }
                }
                o.text(&s);
            }
            Format::Structured => records.push(json!({
                "map": name,
                "source": g.source().name(),
                "target": g.target().name(),
                "class": morphism.class().as_str(),
                "union_preserving": report.in_q_plus,
                "state_transition": report.is_state_transition,
                "property_transition": f_pr,
                "in_q_minus": report.in_q_minus,
                "q_minus_hull": write_power_map("hull", &report.q_minus_hull),
            })),
        }
    }
    if o.format == Format::Structured {
        o.json(&Value::Array(records));
    }
    Ok(EXIT_OK)
}

fn verify(lattices: &[String], registry: &Registry, cfg: &VerifyConfig, o: &mut Output) -> i32 {
    let mut records = Vec::new();
    for arg in lattices {
        match registry.resolve(arg) {
            Ok(l) => records.extend(verify_lattice(&l, cfg)),
            Err(e) => records.push(CheckRecord {
                id: "construction".to_string(),
                status: CheckStatus::Fail,
                lattices: vec![arg.clone()],
                counts: BTreeMap::new(),
                witnesses: Vec::new(),
                notes: vec![e.to_string()],
                elapsed_ms: 0,
            }),
        }
    }
    let report = VerificationReport::new(records);
    match o.format {
        Format::Text => o.text(&report.to_text()),
        Format::Structured => o.text(&(report.to_json() + "\n")),
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn single_map(registry: &Registry, path: &Path) -> Result<NamedMorphism, CliError> {
    let mut maps = registry.read_maps(path)?;
    if maps.len() != 1 {
        return Err(CliError::Usage(format!(
            "{}: expected exactly one map, found {}",
            display(path),
            maps.len()
        )));
    }
    Ok(maps.remove(0))
}

fn print_map(o: &mut Output, name: &str, m: &LatticeMorphism) {
    let text = write_map(name, m);
    match o.format {
        Format::Text => o.text(&text),
        Format::Structured => o.json(&json!({ "map": text })),
    }
}

fn dispatch(cli: &Cli, o: &mut Output) -> Result<i32, CliError> {
    let registry = Registry::load(&cli.lattice_files)?;
    match &cli.command {
        Command::Validate { lattices } => validate(lattices, &registry, o),
        Command::Enumerate(args) => enumerate(args, &registry, cli.guard, o),
        Command::Classify { map_file, subcat } => classify(map_file, subcat, &registry, cli.guard, o),
        Command::Verify { lattices, budget } => {
            let cfg = VerifyConfig {
                guard: cli.guard,
                sample_budget: *budget,
                seed: cli.seed,
                ..VerifyConfig::default()
            };
            Ok(verify(lattices, &registry, &cfg, o))
        }
        Command::Compose { outer, inner } => {
            let (g, f) = (single_map(&registry, outer)?, single_map(&registry, inner)?);
            let composite = g.morphism.compose(&f.morphism)?;
            print_map(o, &format!("{}_{}", g.name, f.name), &composite);
            Ok(EXIT_OK)
        }
        Command::Join { map_files } => {
            let mut maps = Vec::new();
            for p in map_files {
                maps.extend(registry.read_maps(p)?.into_iter().map(|m| m.morphism));
            }
            let joined = LatticeMorphism::pointwise_join(&maps)?;
            print_map(o, "join", &joined);
            Ok(EXIT_OK)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let mut o = Output {
        out,
        format: cli.format,
    };
    match dispatch(&cli, &mut o) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
