use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ni_core::expand::{nest, Expansion, NestMode, SubstitutionPlan};
use ni_core::oracle::budget_from_env;
use ni_core::{
    add_zero, compose5, decompose5, dice_to_identity, find_repeats, gap_sequence, identity_addition, is_alphabetical,
    is_irreducible, measured_pattern, multiply_by_one, parse_composition_spec, parse_dice_file, parse_ni_list,
    pattern_from_descriptor, solve, step_relabel, verify_expansion, win_matrix, write_ni_list, Descriptor, DiceSet,
    Enumeration, EnumerationMode, EnumerationRecord, GapSequence, Identity, Operator,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ni", version, about = "Nontransitive identities: solve, verify, enumerate, expand, compose")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Normalise identities and report their shape and list membership.
    Parse {
        #[command(flatten)]
        input: Identities,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Minimal dice set for an identity, in dice-file format.
    Solve {
        identity: Identity,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Check a dice file against a descriptor's win pattern.
    Check {
        dice: PathBuf,
        #[arg(long)]
        descriptor: Descriptor,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// List the NIs of a descriptor in viable-index order.
    Enum(EnumArgs),
    /// Build larger identities from smaller ones.
    Expand {
        #[command(subcommand)]
        op: ExpandOp,
        /// Print the uncanonicalised rewrite.
        #[arg(long, global = true)]
        raw: bool,
    },
    /// Move five-dice NIs between step patterns.
    Relabel {
        #[command(flatten)]
        input: Identities,
        #[arg(long, default_value = "[5D:]")]
        from: Descriptor,
        #[arg(long, default_value = "[5D:1]")]
        to: Descriptor,
    },
    /// Split a five-dice NI into its composing three-dice NIs.
    Decompose {
        identity: Identity,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Build every five-dice NI matching a composition spec file.
    Compose {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Gap sequences and repeated gap runs.
    Analyze {
        #[command(subcommand)]
        op: AnalyzeOp,
    },
    /// Brute-force dice sweep, independent of the enumerator.
    Oracle {
        #[arg(long, default_value_t = 3)]
        dice: usize,
        #[arg(long, default_value_t = 3)]
        sides: usize,
        /// Largest face value.
        #[arg(long, default_value_t = 9)]
        max: u32,
    },
}

/// One identity on the command line, or every identity of a list file.
#[derive(Args)]
struct Identities {
    #[arg(required_unless_present = "input", conflicts_with = "input")]
    identity: Option<Identity>,
    #[arg(long)]
    input: Option<PathBuf>,
}

impl Identities {
    fn load(&self) -> Result<Vec<Identity>> {
        match (&self.identity, &self.input) {
            (Some(id), _) => Ok(vec![id.clone()]),
            (None, Some(path)) => read_list(path),
            (None, None) => unreachable!("clap requires one of them"),
        }
    }
}

#[derive(Args)]
struct EnumArgs {
    #[arg(long)]
    descriptor: Descriptor,
    #[arg(long, default_value = "irreducible")]
    mode: EnumerationMode,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Directory for per-unit progress files; reruns skip finished units.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Write a list file (with header) here instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Allow universes larger than NI_BUDGET viable identities.
    #[arg(long)]
    long_run: bool,
}

#[derive(Subcommand)]
enum ExpandOp {
    /// Append `<A=B=...`.
    AddZero {
        #[command(flatten)]
        input: Identities,
    },
    /// Double every face.
    MulOne {
        #[command(flatten)]
        input: Identities,
        #[arg(long, default_value = "=")]
        joiner: Operator,
    },
    /// Concatenate identities of one shape.
    Add {
        #[arg(required = true, num_args = 2..)]
        identities: Vec<Identity>,
        /// One `<` or `=` per join; defaults to all `<`.
        #[arg(long)]
        joiners: Option<String>,
    },
    /// Replace each face with a whole NI, keeping the substituting dice.
    NestFaces {
        base: Identity,
        /// One NI for every face, or one per base die.
        #[arg(required = true)]
        subs: Vec<Identity>,
    },
    /// Replace each face with a whole NI on fresh dice per base die.
    NestDice {
        base: Identity,
        #[arg(required = true)]
        subs: Vec<Identity>,
    },
}

#[derive(Subcommand)]
enum AnalyzeOp {
    /// Gaps between successive NI viable indexes.
    Gaps {
        #[arg(long)]
        descriptor: Descriptor,
        #[arg(long, default_value = "irreducible")]
        mode: EnumerationMode,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Repeated runs in the gap sequence.
    Repeats {
        #[arg(long)]
        descriptor: Descriptor,
        #[arg(long, default_value = "irreducible")]
        mode: EnumerationMode,
        #[arg(long, default_value_t = 4)]
        min_len: usize,
        #[arg(long, default_value_t = 2)]
        min_reps: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read_list(path: &Path) -> Result<Vec<Identity>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_ni_list(&text).with_context(|| format!("in {}", path.display()))?.identities)
}

fn json_out(v: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("json values serialise"))
}

fn csv_out(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn lines<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().fold(String::new(), |mut s, x| {
        let _ = writeln!(s, "{x}");
        s
    })
}

fn dice_json(ds: &DiceSet) -> Value {
    let map: serde_json::Map<String, Value> =
        (0..ds.dice()).map(|d| (ni_core::Die::new(d).to_string(), json!(ds.sorted_faces(d)))).collect();
    Value::Object(map)
}

fn run(cmd: Command) -> Result<String> {
    match cmd {
        Command::Parse { input, format } => parse(&input.load()?, format),
        Command::Solve { identity, format } => {
            let ds = solve(&identity)?;
            Ok(match format {
                Format::Json => json_out(&dice_json(&ds)),
                _ => ds.to_string(),
            })
        }
        Command::Check { dice, descriptor, format } => check(&dice, &descriptor, format),
        Command::Enum(args) => enumerate(&args),
        Command::Expand { op, raw } => expand(op, raw),
        Command::Relabel { input, from, to } => {
            let moved: Result<Vec<Identity>> =
                input.load()?.iter().map(|id| Ok(step_relabel(id, &from, &to)?)).collect();
            Ok(lines(moved?))
        }
        Command::Decompose { identity, format } => {
            let parts = decompose5(&identity)?;
            Ok(match format {
                Format::Json => json_out(&Value::Array(
                    parts
                        .iter()
                        .map(|c| {
                            json!({
                                "triple": c.triple.iter().map(|d| d.letter()).collect::<String>(),
                                "anchor": c.anchor.to_string(),
                                "anchored": c.anchored,
                                "raw": c.raw.to_string(),
                                "canonical": c.canonical.to_string(),
                            })
                        })
                        .collect(),
                )),
                // a spec file that `compose --spec` reads back
                _ => ni_core::CompositionSpec::from_components(&parts)?.to_string(),
            })
        }
        Command::Compose { spec } => {
            let text = std::fs::read_to_string(&spec).with_context(|| format!("reading {}", spec.display()))?;
            Ok(lines(compose5(&parse_composition_spec(&text)?)))
        }
        Command::Analyze { op } => analyze(op),
        Command::Oracle { dice, sides, max } => Ok(lines(ni_core::brute_force_oracle(dice, sides, max)?)),
    }
}

/// Text, shape, alphabetical, irreducible.
type ParseRow = (String, Option<(usize, usize)>, bool, bool);

fn parse(ids: &[Identity], format: Format) -> Result<String> {
    let rows: Vec<ParseRow> =
        ids.iter().map(|id| (id.to_string(), id.shape(), is_alphabetical(id), is_irreducible(id))).collect();
    let shape = |s: Option<(usize, usize)>| s.map_or_else(|| "unbalanced".to_string(), |(k, n)| format!("[{k}D{n}S]"));
    match format {
        Format::Text => Ok(lines(rows.iter().map(|(id, s, a, i)| {
            format!(
                "{id}\t{}\t{}",
                shape(*s),
                if *i {
                    "irreducible"
                } else if *a {
                    "alphabetical"
                } else {
                    "unsorted"
                }
            )
        }))),
        Format::Json => Ok(json_out(&Value::Array(
            rows.iter()
                .map(|(id, s, a, i)| {
                    json!({ "identity": id, "shape": s.map(|(k, n)| json!({"dice": k, "sides": n})),
                            "alphabetical": a, "irreducible": i })
                })
                .collect(),
        ))),
        Format::Csv => csv_out(
            &["identity", "shape", "alphabetical", "irreducible"],
            rows.iter().map(|(id, s, a, i)| vec![id.clone(), shape(*s), a.to_string(), i.to_string()]),
        ),
    }
}

fn check(path: &Path, d: &Descriptor, format: Format) -> Result<String> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let ds = parse_dice_file(&text)?;
    if let Some(n) = d.sides() {
        if ds.sides() != n {
            bail!("side count mismatch: dice have {} sides, {d} wants {n}", ds.sides());
        }
    }
    let want = pattern_from_descriptor(d)?;
    let got = win_matrix(&ds).pattern();
    if ds.dice() != want.dice() || !got.is_isomorphic_to(&want) {
        bail!("win pattern mismatch");
    }
    let id = dice_to_identity(&ds, &d.with_sides(ds.sides()))?;
    Ok(match format {
        Format::Json => json_out(&json!({ "identity": id.to_string(), "descriptor": d.to_string() })),
        _ => format!("{id}\n"),
    })
}

fn enumerate(args: &EnumArgs) -> Result<String> {
    let e = Enumeration::new(&args.descriptor, args.mode)?;
    let universe = e.viable_count();
    let budget = budget_from_env();
    if universe > budget && !args.long_run {
        bail!("{} has {universe} viable identities, above the budget of {budget}; pass --long-run", args.descriptor);
    }
    let jobs = args.jobs.max(1);
    let records = match &args.checkpoint {
        Some(dir) => e.collect_nontransitive_checkpointed(jobs, dir)?,
        None => e.collect_nontransitive(jobs),
    };
    if let Some(out) = &args.out {
        let text = write_ni_list(&args.descriptor, args.mode, records.into_iter().map(|r| r.identity));
        std::fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
        return Ok(String::new());
    }
    let gaps = record_gaps(&records);
    match args.format {
        Format::Text => Ok(lines(records.iter().map(|r| &r.identity))),
        Format::Json => Ok(json_out(&Value::Array(
            records
                .iter()
                .zip(&gaps)
                .enumerate()
                .map(|(i, (r, g))| {
                    json!({ "index": i, "viable_index": r.viable_index, "gap": g,
                            "identity": r.identity.to_string(), "encoding": r.encoding.to_string() })
                })
                .collect(),
        ))),
        Format::Csv => csv_out(
            &["index", "viable_index", "gap", "identity"],
            records.iter().zip(&gaps).enumerate().map(|(i, (r, g))| {
                vec![
                    i.to_string(),
                    r.viable_index.to_string(),
                    g.map_or(String::new(), |g| g.to_string()),
                    r.identity.to_string(),
                ]
            }),
        ),
    }
}

/// Gap to the previous record; the first has none.
fn record_gaps(records: &[EnumerationRecord]) -> Vec<Option<u64>> {
    std::iter::once(None)
        .chain(records.windows(2).map(|w| Some(w[1].viable_index - w[0].viable_index)))
        .take(records.len())
        .collect()
}

fn report(e: &Expansion, raw: bool) -> Result<String> {
    if !e.nontransitive {
        bail!("expansion is not nontransitive: {}", e.raw);
    }
    Ok(format!("{}\n", if raw { &e.raw } else { &e.canonical }))
}

fn expand(op: ExpandOp, raw: bool) -> Result<String> {
    match op {
        ExpandOp::AddZero { input } => each(&input, raw, add_zero),
        ExpandOp::MulOne { input, joiner } => each(&input, raw, |id| multiply_by_one(id, joiner)),
        ExpandOp::Add { identities, joiners } => {
            let joiners: Vec<Operator> = match joiners {
                Some(text) => text.chars().map(|c| Ok(c.to_string().parse()?)).collect::<Result<_>>()?,
                None => vec![Operator::Less; identities.len() - 1],
            };
            report(&identity_addition(&identities, &joiners)?, raw)
        }
        ExpandOp::NestFaces { base, subs } => {
            report(&nest(&base, &plan(&base, subs, NestMode::FaceExponentiation)?)?, raw)
        }
        ExpandOp::NestDice { base, subs } => {
            report(&nest(&base, &plan(&base, subs, NestMode::DiceMultiplication)?)?, raw)
        }
    }
}

fn plan(base: &Identity, subs: Vec<Identity>, mode: NestMode) -> Result<SubstitutionPlan> {
    Ok(match subs.len() {
        1 => SubstitutionPlan::uniform(base, &subs[0], mode),
        _ => SubstitutionPlan::per_die(base, &subs, mode)?,
    })
}

/// Applies a one-identity rewrite to every input, failing on the first
/// result that is not nontransitive.
fn each(input: &Identities, raw: bool, f: impl Fn(&Identity) -> Identity) -> Result<String> {
    let mut out = String::new();
    for id in input.load()? {
        let pattern = measured_pattern(&id)?;
        out += &report(&verify_expansion(f(&id), &pattern), raw)?;
    }
    Ok(out)
}

fn analyze(op: AnalyzeOp) -> Result<String> {
    match op {
        AnalyzeOp::Gaps { descriptor, mode, format } => {
            let g = gap_sequence(&descriptor, mode)?;
            match format {
                Format::Text => Ok(format!("{}\n", g.gaps.iter().map(u64::to_string).collect::<Vec<_>>().join(", "))),
                Format::Json => Ok(json_out(&serde_json::to_value(&g)?)),
                Format::Csv => gaps_csv(&g),
            }
        }
        AnalyzeOp::Repeats { descriptor, mode, min_len, min_reps, format } => {
            let g = gap_sequence(&descriptor, mode)?;
            let reports = find_repeats(&g, min_len, min_reps);
            match format {
                Format::Json => Ok(json_out(&serde_json::to_value(&reports)?)),
                _ => Ok(lines(reports.iter().map(|r| {
                    let pattern: Vec<String> = r.pattern.iter().map(u64::to_string).collect();
                    let before: Vec<String> = r.preceded_by.iter().map(|(v, n)| format!("{v}x{n}")).collect();
                    format!(
                        "{}\trepeats {}\tpartial {}\tsplit {}\tpreceded by {}",
                        pattern.join(","),
                        r.repetitions,
                        r.partials.len(),
                        r.splits.len(),
                        before.join(" ")
                    )
                }))),
            }
        }
    }
}

fn gaps_csv(g: &GapSequence) -> Result<String> {
    let indexes = g.indexes();
    csv_out(
        &["index", "viable_index", "gap"],
        indexes.iter().enumerate().map(|(i, v)| {
            let gap = if i == 0 { String::new() } else { g.gaps[i - 1].to_string() };
            vec![i.to_string(), v.to_string(), gap]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn first_record_has_no_gap() {
        let e = Enumeration::new(&"[3D3S]".parse().unwrap(), EnumerationMode::Irreducible).unwrap();
        let records: Vec<EnumerationRecord> = e.nontransitive().take(3).collect();
        let gaps = record_gaps(&records);
        assert_eq!(gaps, [None, Some(42), Some(10)]);
        assert_eq!(ni_core::encode_identity(&records[0].identity, 3).unwrap(), records[0].encoding);
    }
}
