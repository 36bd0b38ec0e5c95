use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use phonfeat::accent::ProjectionReport;
use phonfeat::encoder::EMBED_DIM;
use phonfeat::eval::per_from_files;
use phonfeat::frontend::{ArpabetTable, PinyinTable};
use phonfeat::{
    builtin, embed_utterance, encode_utterance, project_utterance, substitution_table, tokenize_tagged_line,
    validate_inventory, EncodedUtterance, Format, Inventory, Lang, Mode, Resources, TonePolicy, Weights,
};

const DATA_ENV: &str = "PHONFEAT_DATA";

/// Phonological-feature front-end for English/Mandarin text.
#[derive(Parser)]
#[command(name = "phonfeat", version)]
struct Cli {
    /// Directory holding en.tsv, cmn.tsv and the mapping tables
    /// [default: ./data if present, else the built-in tables].
    /// PHONFEAT_DATA takes precedence.
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, default_value = "tsv")]
    format: Format,
    /// Weight of a feature match in projection scores.
    #[arg(long, global = true, default_value_t = 1.0)]
    w_match: f64,
    /// Weight of a feature mismatch in projection scores.
    #[arg(long, global = true, default_value_t = 2.0)]
    w_mismatch: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the inventories and mapping tables; exit 0 iff clean.
    Validate {
        #[arg(long)]
        lang: Option<Lang>,
    },
    /// Print the feature set of one phoneme (optional features in parentheses).
    Features { lang: Lang, sampa: String },
    /// Encode tagged lines (one utterance per line) into frames.
    Encode {
        #[arg(long, default_value = "surface")]
        mode: Mode,
        #[arg(default_value = "-")]
        input: String,
    },
    /// Encode and add the 256-wide toy embedding.
    Embed {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "surface")]
        mode: Mode,
        #[arg(default_value = "-")]
        input: String,
    },
    /// Phone error rate of line-aligned transcriptions.
    Per { reference: PathBuf, hypothesis: PathBuf },
    /// Project tagged lines through another language's inventory.
    Project {
        #[arg(long)]
        from: Lang,
        #[arg(long)]
        to: Lang,
        #[arg(long, default_value = "drop")]
        tone_policy: TonePolicy,
        #[arg(default_value = "-")]
        input: String,
    },
    /// Ranked substitution table for every source phoneme.
    Table {
        #[arg(long)]
        from: Lang,
        #[arg(long)]
        to: Lang,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 1, msg: msg.into() }
}

fn data(msg: impl ToString) -> Failure {
    Failure {
        code: 2,
        msg: msg.to_string(),
    }
}

fn input(msg: impl ToString) -> Failure {
    Failure {
        code: 3,
        msg: msg.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let mut out = String::new();
    let res = run(&cli, &mut out);
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let _ = lock.write_all(out.as_bytes());
    let _ = lock.flush();
    match res {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("phonfeat: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

enum DataSource {
    Dir(PathBuf),
    Builtin,
}

impl DataSource {
    fn resolve(cli: &Cli) -> DataSource {
        if let Some(dir) = std::env::var_os(DATA_ENV).filter(|v| !v.is_empty()) {
            return DataSource::Dir(dir.into());
        }
        if let Some(dir) = &cli.data_dir {
            return DataSource::Dir(dir.clone());
        }
        let local = Path::new("data");
        if local.join("en.tsv").is_file() {
            return DataSource::Dir(local.to_path_buf());
        }
        DataSource::Builtin
    }

    fn read(&self, name: &str) -> Result<String, Failure> {
        match self {
            DataSource::Dir(d) => {
                let p = d.join(name);
                std::fs::read_to_string(&p).map_err(|e| data(format!("cannot read {}: {e}", p.display())))
            }
            DataSource::Builtin => Ok(match name {
                "en.tsv" => builtin::EN,
                "cmn.tsv" => builtin::CMN,
                "arpabet_to_sampa.tsv" => builtin::ARPABET,
                _ => builtin::PINYIN,
            }
            .to_string()),
        }
    }

    fn load(&self) -> Result<Resources, Failure> {
        match self {
            DataSource::Dir(d) => Resources::load(d).map_err(data),
            DataSource::Builtin => Resources::try_builtin().map_err(data),
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| input(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {path}: {e}")))
    }
}

/// Non-blank input lines with their 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).map(|(i, l)| (i + 1, l))
}

fn encode_lines(res: &Resources, text: &str, mode: Mode) -> Result<Vec<EncodedUtterance>, Failure> {
    lines(text)
        .map(|(n, line)| {
            let toks = tokenize_tagged_line(line).map_err(|e| input(format!("line {n}: {e}")))?;
            encode_utterance(res, &toks, mode).map_err(|e| input(format!("line {n}: {e}")))
        })
        .collect()
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn run(cli: &Cli, out: &mut String) -> Result<u8, Failure> {
    if !(cli.w_match.is_finite() && cli.w_match > 0.0 && cli.w_mismatch.is_finite() && cli.w_mismatch >= 0.0) {
        return Err(usage("--w-match must be positive and --w-mismatch non-negative"));
    }
    let weights = Weights::new(cli.w_match, cli.w_mismatch);
    let src = DataSource::resolve(cli);
    match &cli.command {
        Command::Validate { lang } => validate(&src, *lang, out),
        Command::Features { lang, sampa } => {
            let res = src.load()?;
            let e = res.inventory(*lang).lookup(sampa).map_err(input)?;
            match cli.format {
                Format::Tsv => {
                    let parts: Vec<String> = e
                        .features
                        .specified()
                        .iter()
                        .map(|f| {
                            if e.features.is_optional(f) {
                                format!("({})", f.name())
                            } else {
                                f.name().to_string()
                            }
                        })
                        .collect();
                    writeln!(out, "{}", parts.join(" ")).unwrap();
                }
                Format::Json => {
                    let names = |s: phonfeat::FeatureSet| s.iter().map(|f| f.name()).collect::<Vec<_>>();
                    #[derive(Serialize)]
                    struct Out<'a> {
                        sampa: &'a str,
                        lang: Lang,
                        features: Vec<&'static str>,
                        optional: Vec<&'static str>,
                        allophone_of: Option<&'a str>,
                    }
                    let o = Out {
                        sampa: &e.sampa,
                        lang: e.lang,
                        features: names(e.features.specified()),
                        optional: names(e.features.optional()),
                        allophone_of: e.allophone_of.as_deref(),
                    };
                    writeln!(out, "{}", json(&o)).unwrap();
                }
            }
            Ok(0)
        }
        Command::Encode { mode, input: path } => {
            let res = src.load()?;
            let text = read_input(path)?;
            let encs = encode_lines(&res, &text, *mode)?;
            match cli.format {
                Format::Tsv => {
                    let blocks: Vec<String> = encs.iter().map(|e| e.to_tsv()).collect();
                    out.push_str(&blocks.join("\n"));
                }
                Format::Json => {
                    for e in &encs {
                        writeln!(out, "{}", e.serialize(Format::Json)).unwrap();
                    }
                }
            }
            Ok(0)
        }
        Command::Embed { seed, mode, input: path } => {
            let res = src.load()?;
            let text = read_input(path)?;
            let encs = encode_lines(&res, &text, *mode)?;
            for (u, enc) in encs.iter().enumerate() {
                let emb = embed_utterance(enc, *seed);
                match cli.format {
                    Format::Tsv => {
                        if u > 0 {
                            out.push('\n');
                        }
                        out.push_str("idx\tsymbol");
                        for c in 0..EMBED_DIM {
                            write!(out, "\te{c}").unwrap();
                        }
                        out.push('\n');
                        for (i, f) in enc.frames.iter().enumerate() {
                            write!(out, "{i}\t{}", f.symbol).unwrap();
                            for x in emb.row(i) {
                                write!(out, "\t{x}").unwrap();
                            }
                            out.push('\n');
                        }
                    }
                    Format::Json => {
                        #[derive(Serialize)]
                        struct Out<'a> {
                            seed: u64,
                            frames: &'a [phonfeat::Frame],
                            embedding: Vec<&'a [f32]>,
                        }
                        let o = Out {
                            seed: *seed,
                            frames: &enc.frames,
                            embedding: (0..emb.rows()).map(|i| emb.row(i)).collect(),
                        };
                        writeln!(out, "{}", json(&o)).unwrap();
                    }
                }
            }
            Ok(0)
        }
        Command::Per { reference, hypothesis } => {
            let rep = per_from_files(reference, hypothesis).map_err(input)?;
            match cli.format {
                Format::Tsv => out.push_str(&rep.to_tsv().map_err(input)?),
                Format::Json => {
                    #[derive(Serialize)]
                    struct Line {
                        entries: usize,
                        deletions: usize,
                        insertions: usize,
                        substitutions: usize,
                        per: f64,
                    }
                    let line = |r: &phonfeat::AlignmentResult| -> Result<Line, Failure> {
                        Ok(Line {
                            entries: r.entries,
                            deletions: r.deletions,
                            insertions: r.insertions,
                            substitutions: r.substitutions,
                            per: r.per().map_err(input)?,
                        })
                    };
                    #[derive(Serialize)]
                    struct Out {
                        lines: Vec<Line>,
                        corpus: Line,
                        mean_per: f64,
                    }
                    let o = Out {
                        lines: rep.lines.iter().map(line).collect::<Result<_, _>>()?,
                        corpus: line(&rep.total)?,
                        mean_per: rep.mean_per().map_err(input)?,
                    };
                    writeln!(out, "{}", json(&o)).unwrap();
                }
            }
            Ok(0)
        }
        Command::Project {
            from,
            to,
            tone_policy,
            input: path,
        } => {
            let res = src.load()?;
            let text = read_input(path)?;
            let reports: Vec<ProjectionReport> = lines(&text)
                .map(|(n, line)| {
                    let toks = tokenize_tagged_line(line).map_err(|e| input(format!("line {n}: {e}")))?;
                    project_utterance(&res, &toks, *from, *to, *tone_policy, weights)
                        .map_err(|e| input(format!("line {n}: {e}")))
                })
                .collect::<Result<_, _>>()?;
            match cli.format {
                Format::Tsv => {
                    let blocks: Vec<String> = reports.iter().map(|r| r.to_tsv()).collect();
                    out.push_str(&blocks.join("\n"));
                }
                Format::Json => {
                    for r in &reports {
                        writeln!(out, "{}", json(r)).unwrap();
                    }
                }
            }
            Ok(0)
        }
        Command::Table { from, to } => {
            let res = src.load()?;
            let t = substitution_table(res.inventory(*from), res.inventory(*to), weights).map_err(data)?;
            match cli.format {
                Format::Tsv => out.push_str(&t.to_tsv()),
                Format::Json => writeln!(out, "{}", json(&t)).unwrap(),
            }
            Ok(0)
        }
    }
}

fn validate(src: &DataSource, only: Option<Lang>, out: &mut String) -> Result<u8, Failure> {
    let mut problems = 0;
    let mut invs = Vec::new();
    for (lang, file) in [(Lang::En, "en.tsv"), (Lang::Cmn, "cmn.tsv")] {
        if only.is_some_and(|l| l != lang) {
            continue;
        }
        let inv = Inventory::parse_unchecked(&src.read(file)?, lang).map_err(|e| data(format!("{file}: {e}")))?;
        let violations = validate_inventory(&inv);
        for v in &violations {
            writeln!(out, "{lang}\tFAIL\t{v}").unwrap();
        }
        problems += violations.len();
        let phonemes: Vec<_> = inv.phonemes().collect();
        writeln!(
            out,
            "{lang}\t{}\t{} phonemes ({} consonantal, {} vocalic), {} allophones",
            if violations.is_empty() { "ok" } else { "invalid" },
            phonemes.len(),
            phonemes.iter().filter(|e| e.is_consonantal()).count(),
            phonemes.iter().filter(|e| e.is_vocalic()).count(),
            inv.allophones().count()
        )
        .unwrap();
        invs.push(inv);
    }

    // Every symbol a mapping table can emit must exist in its inventory.
    let mut check_map = |lang: Lang, file: &str, syms: Vec<String>| {
        let Some(inv) = invs.iter().find(|i| i.lang() == lang) else {
            return;
        };
        for s in syms {
            if inv.get(&s).is_none() {
                writeln!(out, "{lang}\tFAIL\t{file}: emits `{s}`, which is not in the inventory").unwrap();
                problems += 1;
            }
        }
    };
    let arpabet = ArpabetTable::parse(&src.read("arpabet_to_sampa.tsv")?).map_err(data)?;
    let arpa_syms = arpabet
        .codes()
        .iter()
        .flat_map(|c| arpabet.get(c).unwrap_or_default().to_vec())
        .collect();
    check_map(Lang::En, "arpabet_to_sampa.tsv", arpa_syms);
    let pinyin = PinyinTable::parse(&src.read("pinyin_to_sampa.tsv")?).map_err(data)?;
    let py_syms = pinyin.emitted_symbols().map(str::to_string).collect();
    check_map(Lang::Cmn, "pinyin_to_sampa.tsv", py_syms);

    if problems > 0 {
        return Err(data(format!("{problems} violation(s)")));
    }
    Ok(0)
}
