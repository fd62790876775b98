//! `klsep` — command-line driver for the Kazhdan-Lusztig separation toolkit.
//!
//! Every subcommand writes a deterministic, diffable report. Exit codes:
//! 0 success, 2 bad configuration or input, 3 unsupported spec, 4 internal
//! invariant violation.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufReader, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use klsep_core::bott_samelson::{bb_cell_dim, fiber_fixed_points, subword_product, Word};
use klsep_core::coxeter::{build_group, CoxeterSpec, Elt, Family, GroupTable};
use klsep_core::hecke::{kl_basis, read_klt1, write_klt1, KlTable};
use klsep_core::separation::{compute_fw, propagate, sigma_report, CharStatus, FwTable};
use klsep_core::torsion::{cokernel_torsion, euler_class_d4, mult_matrix, smith_normal_form};
use klsep_core::wgraph::{build_wgraph, read_wg1, write_wg1, WGraph};

const VERSION: &str = env!("CARGO_PKG_VERSION");

// ------------------------------------------------------------- errors ----

enum AppError {
    /// Bad flags, unreadable or malformed input files, unknown elements.
    BadConfig(String),
    /// A spec outside the supported families/ranks.
    Unsupported(String),
    /// A broken internal invariant (also reached via caught panics).
    Internal(String),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::BadConfig(_) => 2,
            AppError::Unsupported(_) => 3,
            AppError::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::BadConfig(m) | AppError::Unsupported(m) | AppError::Internal(m) => m,
        }
    }
}

type AppResult<T> = Result<T, AppError>;

fn bad(msg: impl Into<String>) -> AppError {
    AppError::BadConfig(msg.into())
}

// --------------------------------------------------------------- flags ----

#[derive(Parser)]
#[command(name = "klsep", version, about = "Kazhdan-Lusztig bases, W-graphs and separated elements")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct SpecArgs {
    /// Coxeter family: A, B, D, F4, G2 or I2.
    #[arg(long)]
    family: String,
    /// Rank (ignored for F4/G2/I2).
    #[arg(long)]
    rank: Option<usize>,
    /// Order m of st, for I2 only.
    #[arg(long)]
    m: Option<usize>,
}

impl SpecArgs {
    fn resolve(&self) -> AppResult<CoxeterSpec> {
        let spec = match self.family.to_uppercase().as_str() {
            "A" => CoxeterSpec::a(self.rank.ok_or_else(|| bad("--rank required for family A"))?),
            "B" => CoxeterSpec::b(self.rank.ok_or_else(|| bad("--rank required for family B"))?),
            "D" => CoxeterSpec::d(self.rank.ok_or_else(|| bad("--rank required for family D"))?),
            "F4" => CoxeterSpec::f4(),
            "G2" => CoxeterSpec::g2(),
            "I2" => CoxeterSpec::i2(self.m.ok_or_else(|| bad("--m required for family I2"))?),
            other => return Err(bad(format!("unknown family {:?}", other))),
        };
        spec.validate()
            .map_err(|e| AppError::Unsupported(e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Directory holding KLT1 dumps of the KL table.
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Worker thread count (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Notation {
    Letters,
    Oneline,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the group and print basic statistics.
    Group {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Dump KL basis rows h_w with their mu edges.
    Klbasis {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Only this element (letters, or one-line in type A).
        #[arg(long)]
        element: Option<String>,
        /// Disambiguate the element selector.
        #[arg(long, value_enum)]
        notation: Option<Notation>,
    },
    /// Emit the W-graph in WG1 format, or re-emit a WG1 file canonically.
    Wgraph {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Ingest this WG1 file instead of computing.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// SIGMA1 report: undefined, non-separated and sigma counts.
    Sigma {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Include the full f table in the report.
        #[arg(long)]
        include_fw: bool,
        /// Rebuild from an emitted WG1 file instead of computing the basis.
        #[arg(long)]
        from_wgraph: Option<PathBuf>,
    },
    /// Spread character equalities/inequalities through the W-graph.
    Propagate {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// Assumption file: one "<element> eq|neq" per line.
        #[arg(long)]
        assume: Option<PathBuf>,
    },
    /// Fixed points and cell dimensions of a Bott-Samelson fiber.
    Fiber {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutputArgs,
        /// The word, as letters (repeats allowed, e.g. "ststs").
        #[arg(long)]
        word: String,
        /// The base point (letters, or one-line in type A).
        #[arg(long)]
        base: String,
        #[arg(long, value_enum)]
        notation: Option<Notation>,
    },
    /// Integer torsion certificate for the rank-4 fork group fiber.
    Torsion {
        #[command(flatten)]
        spec: SpecArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
}

// ------------------------------------------------------------ plumbing ----

fn init_threads(out: &OutputArgs) -> AppResult<()> {
    if let Some(n) = out.threads {
        if n == 0 {
            return Err(bad("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| bad(format!("thread pool: {}", e)))?;
    }
    Ok(())
}

fn letter_table(spec: &CoxeterSpec) -> String {
    (0..spec.rank)
        .map(|i| format!("{}=s{}", spec.letter(i), i + 1))
        .collect::<Vec<_>>()
        .join(" ")
}

/// The comment header embedded in every text/CSV report.
fn header(spec: &CoxeterSpec, cache_note: Option<&str>) -> String {
    let mut h = format!(
        "# klsep {}\n# spec {}\n# letters {}\n",
        VERSION,
        spec,
        letter_table(spec)
    );
    if let Some(note) = cache_note {
        h.push_str(&format!("# cache {}\n", note));
    }
    h
}

/// The same provenance fields for JSON reports.
fn envelope(spec: &CoxeterSpec, cache_note: Option<&str>, body: Value) -> Value {
    let mut map = Map::new();
    map.insert("tool".into(), json!({ "name": "klsep", "version": VERSION }));
    map.insert("spec".into(), Value::String(spec.to_string()));
    map.insert("letters".into(), Value::String(letter_table(spec)));
    if let Some(note) = cache_note {
        map.insert("cache".into(), Value::String(note.to_string()));
    }
    if let Value::Object(b) = body {
        for (k, v) in b {
            map.insert(k, v);
        }
    }
    Value::Object(map)
}

fn emit(out: &OutputArgs, text: String) -> AppResult<()> {
    match &out.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| bad(format!("writing {}: {}", path.display(), e))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| AppError::Internal(format!("stdout: {}", e)))
        }
    }
}

/// Load the KL table from a KLT1 cache dump if present, else compute and
/// populate the cache. Returns the table and a provenance note.
fn kl_with_cache(
    g: &GroupTable,
    cache: &Option<PathBuf>,
) -> AppResult<(KlTable, Option<String>)> {
    let Some(dir) = cache else {
        return Ok((kl_basis(g), None));
    };
    fs::create_dir_all(dir)
        .map_err(|e| bad(format!("cache dir {}: {}", dir.display(), e)))?;
    let path = dir.join(format!("{}.klt1", g.spec));
    if path.exists() {
        let file = fs::File::open(&path)
            .map_err(|e| bad(format!("cache {}: {}", path.display(), e)))?;
        let t = read_klt1(g.spec, BufReader::new(file))
            .map_err(|e| bad(format!("cache {}: {}", path.display(), e)))?;
        return Ok((t, Some(format!("hit {}", path.display()))));
    }
    let t = kl_basis(g);
    let mut buf = Vec::new();
    write_klt1(&t, &mut buf).map_err(|e| AppError::Internal(e.to_string()))?;
    fs::write(&path, buf).map_err(|e| bad(format!("cache {}: {}", path.display(), e)))?;
    Ok((t, Some(format!("miss, wrote {}", path.display()))))
}

/// Parse an element given as a letter word or, in type A, one-line notation.
fn parse_element(g: &GroupTable, s: &str, notation: Option<Notation>) -> AppResult<Elt> {
    let as_letters = g.parse_letters(s).ok();
    let as_line = if g.spec.family == Family::A
        && s.len() == g.n + 1
        && s.bytes().all(|b| b.is_ascii_digit())
    {
        let digits: Vec<u8> = s.bytes().map(|b| b - b'0').collect();
        g.parse_one_line(&digits).ok()
    } else {
        None
    };
    match notation {
        Some(Notation::Letters) => {
            as_letters.ok_or_else(|| bad(format!("{:?} is not a letter word", s)))
        }
        Some(Notation::Oneline) => {
            as_line.ok_or_else(|| bad(format!("{:?} is not one-line notation", s)))
        }
        None => match (as_letters, as_line) {
            (Some(a), Some(b)) if a != b => Err(bad(format!(
                "{:?} parses as both a letter word and one-line notation; pass --notation",
                s
            ))),
            (Some(a), _) => Ok(a),
            (None, Some(b)) => Ok(b),
            (None, None) => Err(bad(format!("cannot parse element {:?}", s))),
        },
    }
}

// --------------------------------------------------------- subcommands ----

fn run_group(spec: CoxeterSpec, out: &OutputArgs) -> AppResult<()> {
    let g = build_group(spec).map_err(|e| AppError::Unsupported(e.to_string()))?;
    let max_len = g.length(g.longest());
    let mut by_length = vec![0usize; max_len + 1];
    for x in g.elements() {
        by_length[g.length(x)] += 1;
    }
    let text = match out.format {
        Format::Text => {
            let mut s = header(&spec, None);
            s.push_str(&format!("order {}\n", g.size()));
            s.push_str(&format!(
                "longest {} (length {})\n",
                g.letters(g.longest()),
                max_len
            ));
            s.push_str("lengths");
            for c in &by_length {
                s.push_str(&format!(" {}", c));
            }
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = header(&spec, None);
            s.push_str("element,length,left_descents,right_descents\n");
            for x in g.elements() {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    g.letters(x),
                    g.length(x),
                    descent_letters(&g, x, klsep_core::coxeter::Side::Left),
                    descent_letters(&g, x, klsep_core::coxeter::Side::Right),
                ));
            }
            s
        }
        Format::Json => {
            let body = json!({
                "order": g.size(),
                "longest": g.letters(g.longest()),
                "lengthDistribution": by_length,
            });
            pretty(envelope(&spec, None, body))
        }
    };
    emit(out, text)
}

fn descent_letters(g: &GroupTable, x: Elt, side: klsep_core::coxeter::Side) -> String {
    let s: String = g.descents(x, side).iter().map(|&i| g.spec.letter(i)).collect();
    if s.is_empty() {
        "-".into()
    } else {
        s
    }
}

/// `h_w` rendered as "H_w + v^-1 H_e" style text.
fn render_h(g: &GroupTable, t: &KlTable, w: Elt) -> String {
    let mut entries: Vec<(Elt, klsep_core::LaurentPoly)> = t.row(w).iter().collect();
    entries.sort_by_key(|&(x, _)| std::cmp::Reverse((g.length(x), x)));
    let mut parts = Vec::new();
    for (x, p) in entries {
        let name = format!("H_{}", g.letters(x));
        let one = p.coeff(0) == 1 && p.min_exp() == Some(0) && p.max_exp() == Some(0);
        let single = p.iter().count() == 1 && p.min_exp().map_or(false, |e| p.coeff(e) == 1);
        parts.push(if one {
            name
        } else if single {
            format!("v^{} {}", p.min_exp().unwrap(), name)
        } else {
            format!("({}) {}", p, name)
        });
    }
    parts.join(" + ")
}

fn run_klbasis(
    spec: CoxeterSpec,
    out: &OutputArgs,
    element: &Option<String>,
    notation: Option<Notation>,
) -> AppResult<()> {
    let g = build_group(spec).map_err(|e| AppError::Unsupported(e.to_string()))?;
    let (t, cache_note) = kl_with_cache(&g, &out.cache)?;
    let targets: Vec<Elt> = match element {
        Some(s) => vec![parse_element(&g, s, notation)?],
        None => g.elements().collect(),
    };
    let text = match out.format {
        Format::Text => {
            let mut s = header(&spec, cache_note.as_deref());
            for &w in &targets {
                s.push_str(&format!("h_{} = {}\n", g.letters(w), render_h(&g, &t, w)));
                for &(x, mu) in t.mu_edges_below(w) {
                    s.push_str(&format!("  mu({}, {}) = {}\n", g.letters(x), g.letters(w), mu));
                }
            }
            s
        }
        Format::Csv => {
            let mut s = header(&spec, cache_note.as_deref());
            s.push_str("w,x,h_xw,mu\n");
            for &w in &targets {
                for (x, p) in t.row(w).iter() {
                    s.push_str(&format!(
                        "{},{},{},{}\n",
                        g.letters(w),
                        g.letters(x),
                        p,
                        t.mu(x, w)
                    ));
                }
            }
            s
        }
        Format::Json => {
            let mut rows = Map::new();
            for &w in &targets {
                let mut entries = Map::new();
                for (x, p) in t.row(w).iter() {
                    entries.insert(g.letters(x), Value::String(p.to_string()));
                }
                rows.insert(g.letters(w), Value::Object(entries));
            }
            pretty(envelope(&spec, cache_note.as_deref(), json!({ "rows": rows })))
        }
    };
    emit(out, text)
}

fn load_wgraph(g: &GroupTable, path: &Path) -> AppResult<WGraph> {
    let file = fs::File::open(path)
        .map_err(|e| bad(format!("{}: {}", path.display(), e)))?;
    let wg = read_wg1(BufReader::new(file))
        .map_err(|e| bad(format!("{}: {}", path.display(), e)))?;
    if wg.spec != g.spec {
        return Err(bad(format!(
            "{} holds a {} graph, expected {}",
            path.display(),
            wg.spec,
            g.spec
        )));
    }
    Ok(wg)
}

fn run_wgraph(spec: CoxeterSpec, out: &OutputArgs, input: &Option<PathBuf>) -> AppResult<()> {
    let g = build_group(spec).map_err(|e| AppError::Unsupported(e.to_string()))?;
    let wg = match input {
        Some(path) => load_wgraph(&g, path)?,
        None => {
            let (t, _) = kl_with_cache(&g, &out.cache)?;
            build_wgraph(&g, &t)
        }
    };
    let mut buf = Vec::new();
    write_wg1(&wg, &mut buf).map_err(|e| AppError::Internal(e.to_string()))?;
    emit(out, String::from_utf8(buf).expect("WG1 is ASCII"))
}

fn sigma_json(g: &GroupTable, f: &FwTable, include_fw: bool) -> String {
    let report = sigma_report(g, f, include_fw);
    let body = serde_json::to_value(&report).expect("report serializes");
    let mut text = pretty(envelope(&g.spec, None, body));
    text.push('\n');
    text
}

fn run_sigma(
    spec: CoxeterSpec,
    out: &OutputArgs,
    include_fw: bool,
    from_wgraph: &Option<PathBuf>,
) -> AppResult<()> {
    let g = build_group(spec).map_err(|e| AppError::Unsupported(e.to_string()))?;
    let wg = match from_wgraph {
        Some(path) => load_wgraph(&g, path)?,
        None => {
            let (t, _) = kl_with_cache(&g, &out.cache)?;
            build_wgraph(&g, &t)
        }
    };
    let f = compute_fw(&g, &wg);
    let text = match out.format {
        // SIGMA1 is a JSON format; text and json coincide here.
        Format::Text | Format::Json => sigma_json(&g, &f, include_fw),
        Format::Csv => {
            let report = sigma_report(&g, &f, false);
            let mut s = header(&spec, None);
            s.push_str("element,status\n");
            for x in report.undefined {
                s.push_str(&format!("{},undefined\n", x));
            }
            for x in report.non_separated {
                s.push_str(&format!("{},non-separated\n", x));
            }
            s.push_str(&format!("# sigma {} of {}\n", report.sigma_size, report.order));
            s
        }
    };
    emit(out, text)
}

fn read_assumptions(
    g: &GroupTable,
    path: &Path,
) -> AppResult<BTreeMap<Elt, CharStatus>> {
    let body = fs::read_to_string(path)
        .map_err(|e| bad(format!("{}: {}", path.display(), e)))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in body.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let (Some(elt), Some(status), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(bad(format!(
                "{}:{}: expected \"<element> eq|neq\"",
                path.display(),
                lineno + 1
            )));
        };
        let x = parse_element(g, elt, None)?;
        let st = match status {
            "eq" => CharStatus::CharEq,
            "neq" => CharStatus::CharNeq,
            other => {
                return Err(bad(format!(
                    "{}:{}: unknown status {:?}",
                    path.display(),
                    lineno + 1,
                    other
                )))
            }
        };
        map.insert(x, st);
    }
    Ok(map)
}

fn status_name(s: CharStatus) -> &'static str {
    match s {
        CharStatus::CharEq => "eq",
        CharStatus::CharNeq => "neq",
        CharStatus::Unknown => "unknown",
    }
}

fn run_propagate(spec: CoxeterSpec, out: &OutputArgs, assume: &Option<PathBuf>) -> AppResult<()> {
    let g = build_group(spec).map_err(|e| AppError::Unsupported(e.to_string()))?;
    let (t, cache_note) = kl_with_cache(&g, &out.cache)?;
    let wg = build_wgraph(&g, &t);
    let f = compute_fw(&g, &wg);
    let assumptions = match assume {
        Some(path) => read_assumptions(&g, path)?,
        None => BTreeMap::new(),
    };
    let marks = propagate(&g, &wg, &f, &assumptions)
        .map_err(|e| bad(format!("assumptions: {}", e)))?;
    // The interesting rows: everything that is not plainly separated.
    let rows: Vec<(String, &'static str)> = g
        .elements()
        .filter(|&x| !f.is_separated(x))
        .map(|x| (g.letters(x), status_name(marks[x as usize])))
        .collect();
    let text = match out.format {
        Format::Text => {
            let mut s = header(&spec, cache_note.as_deref());
            for (name, st) in &rows {
                s.push_str(&format!("{} {}\n", name, st));
            }
            s
        }
        Format::Csv => {
            let mut s = header(&spec, cache_note.as_deref());
            s.push_str("element,status\n");
            for (name, st) in &rows {
                s.push_str(&format!("{},{}\n", name, st));
            }
            s
        }
        Format::Json => {
            let mut map = Map::new();
            for (name, st) in &rows {
                map.insert(name.clone(), Value::String((*st).to_string()));
            }
            pretty(envelope(&spec, cache_note.as_deref(), json!({ "marks": map })))
        }
    };
    emit(out, text)
}

fn run_fiber(
    spec: CoxeterSpec,
    out: &OutputArgs,
    word: &str,
    base: &str,
    notation: Option<Notation>,
) -> AppResult<()> {
    let g = build_group(spec).map_err(|e| AppError::Unsupported(e.to_string()))?;
    let letters: Result<Vec<usize>, _> = word
        .chars()
        .map(|c| g.spec.letter_index(c).ok_or(c))
        .collect();
    let w = Word(letters.map_err(|c| bad(format!("unknown letter {:?} in --word", c)))?);
    let y = parse_element(&g, base, notation)?;
    let fixed = fiber_fixed_points(&g, &w, y).map_err(|e| bad(e.to_string()))?;
    let rows: Vec<(String, usize, usize, String)> = fixed
        .iter()
        .map(|&eps| {
            let (total, fiber) = bb_cell_dim(&g, &w, eps);
            (
                eps.to_bit_string(),
                total,
                fiber,
                g.letters(subword_product(&g, &w, eps)),
            )
        })
        .collect();
    let text = match out.format {
        Format::Text => {
            let mut s = header(&spec, None);
            s.push_str(&format!("word {}\nbase {}\nfixed {}\n", word, g.letters(y), rows.len()));
            for (mask, total, fiber, prod) in &rows {
                s.push_str(&format!(
                    "{} total {} fiber {} product {}\n",
                    mask, total, fiber, prod
                ));
            }
            s
        }
        Format::Csv => {
            let mut s = header(&spec, None);
            s.push_str("mask,total_dim,fiber_dim,product\n");
            for (mask, total, fiber, prod) in &rows {
                s.push_str(&format!("{},{},{},{}\n", mask, total, fiber, prod));
            }
            s
        }
        Format::Json => {
            let body = json!({
                "word": word,
                "base": g.letters(y),
                "fixedPoints": rows
                    .iter()
                    .map(|(mask, total, fiber, prod)| json!({
                        "mask": mask,
                        "totalDim": total,
                        "fiberDim": fiber,
                        "product": prod,
                    }))
                    .collect::<Vec<_>>(),
            });
            pretty(envelope(&spec, None, body))
        }
    };
    emit(out, text)
}

fn run_torsion(spec: CoxeterSpec, out: &OutputArgs) -> AppResult<()> {
    let g = build_group(spec).map_err(|e| AppError::Unsupported(e.to_string()))?;
    let (table, class) = euler_class_d4(&g).map_err(|e| AppError::Unsupported(e.to_string()))?;
    let m = mult_matrix(&class, 1).map_err(|e| AppError::Internal(e.to_string()))?;
    let det = m.det();
    let s = smith_normal_form(&m);
    let torsion = cokernel_torsion(&s.invariants);
    let verdict = if torsion.is_empty() {
        "torsion-free".to_string()
    } else {
        torsion
            .iter()
            .map(|p| format!("Z/{}", p))
            .collect::<Vec<_>>()
            .join(" + ")
            + " torsion"
    };
    let text = match out.format {
        Format::Text => {
            let mut st = header(&spec, None);
            st.push_str("restrictions\n");
            for (eps, wt) in &table {
                st.push_str(&format!("  {:03b} {:?}\n", eps, wt));
            }
            st.push_str(&format!("euler class {}\n", class));
            st.push_str(&format!("matrix\n{}", m));
            st.push_str(&format!("det {}\n", det));
            st.push_str(&format!("smith {:?}\n", s.invariants));
            st.push_str(&format!("verdict {}\n", verdict));
            st
        }
        Format::Csv => {
            let mut st = header(&spec, None);
            st.push_str("key,value\n");
            st.push_str(&format!("euler_class,{}\n", class));
            st.push_str(&format!("det,{}\n", det));
            st.push_str(&format!(
                "smith,{}\n",
                s.invariants
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            ));
            st.push_str(&format!("verdict,{}\n", verdict));
            st
        }
        Format::Json => {
            let body = json!({
                "eulerClass": class.to_string(),
                "matrix": (0..m.rows)
                    .map(|i| (0..m.cols).map(|j| m.get(i, j)).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
                "det": det,
                "smithInvariants": s.invariants,
                "torsionPrimes": torsion,
                "verdict": verdict,
            });
            pretty(envelope(&spec, None, body))
        }
    };
    emit(out, text)
}

fn pretty(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("json serializes") + "\n"
}

// ----------------------------------------------------------------- main ----

fn dispatch(cli: Cli) -> AppResult<()> {
    match &cli.cmd {
        Cmd::Group { spec, out } => {
            init_threads(out)?;
            run_group(spec.resolve()?, out)
        }
        Cmd::Klbasis { spec, out, element, notation } => {
            init_threads(out)?;
            run_klbasis(spec.resolve()?, out, element, *notation)
        }
        Cmd::Wgraph { spec, out, input } => {
            init_threads(out)?;
            run_wgraph(spec.resolve()?, out, input)
        }
        Cmd::Sigma { spec, out, include_fw, from_wgraph } => {
            init_threads(out)?;
            run_sigma(spec.resolve()?, out, *include_fw, from_wgraph)
        }
        Cmd::Propagate { spec, out, assume } => {
            init_threads(out)?;
            run_propagate(spec.resolve()?, out, assume)
        }
        Cmd::Fiber { spec, out, word, base, notation } => {
            init_threads(out)?;
            run_fiber(spec.resolve()?, out, word, base, *notation)
        }
        Cmd::Torsion { spec, out } => {
            init_threads(out)?;
            run_torsion(spec.resolve()?, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = catch_unwind(AssertUnwindSafe(|| dispatch(cli)));
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("klsep: {}", e.message());
            ExitCode::from(e.exit_code())
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .map(|s| s.as_str())
                .or_else(|| payload.downcast_ref::<&str>().copied())
                .unwrap_or("unknown panic");
            eprintln!("klsep: internal invariant violation: {}", msg);
            ExitCode::from(4)
        }
    }
}
