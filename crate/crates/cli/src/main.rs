use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ramseykit::amalgam::{refute_tree_amalgam, AllStructures, LinearOrders, StructureClass, TreeAge};
use ramseykit::fixtures::{run_fixture, FIXTURE_NAMES};
use ramseykit::formula::parse_formula_list;
use ramseykit::homogenize::HomogenizationResult;
use ramseykit::ramsey::{
    parse_report, serialize_budget_report, serialize_verdict, verify_witness, Report, DEFAULT_BUDGET,
};
use ramseykit::skew::skew_embed;
use ramseykit::tree::parse_tree_shorthand;
use ramseykit::{
    arrow_holds, check_amalgamation, cl, encode_coloring_as_structure, enumerate_embeddings, extract_s, fill_m,
    homogenize, isolating_formula, parse_structure, qf_type, serialize_structure, Coloring, Elem, Embedding, Error,
    FiniteStructure, HomogenizationRequest, IndexedFamily,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod request;

use request::{FamilySpec, Request};

#[derive(Parser)]
#[command(name = "ramseykit", version, about = "Finite structures, types, arrows and homogenization")]
struct Cli {
    /// Search budget in nodes (or candidate checks).
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Seed for generated colorings.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "RAMSEYKIT_WORKERS")]
    workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Report,
}

#[derive(Subcommand)]
enum Command {
    /// Check a structure against its signature.
    Validate { structure: String },
    /// Quantifier-free type of a tuple.
    Qftype { structure: String, tuple: Vec<String> },
    /// Increasing enumeration of the substructure generated by a tuple.
    Closure { structure: String, tuple: Vec<String> },
    /// Formula isolating the type of a tuple.
    Isolate { structure: String, tuple: Vec<String> },
    /// Decide C -> (B)^A_k.
    Arrow {
        c: String,
        b: String,
        a: String,
        #[arg(short, long, default_value_t = 2)]
        k: usize,
        /// Recheck a saved report instead of searching.
        #[arg(long, value_name = "REPORT")]
        verify: Option<PathBuf>,
        /// On failure, retry up to this many times with a taller C (shorthand only).
        #[arg(long, default_value_t = 0)]
        escalate: usize,
    },
    /// Find a copy on which a family is uniform for every type.
    Homogenize {
        request: PathBuf,
        /// On failure, retry with taller trees (shorthand index only).
        #[arg(long)]
        grow: bool,
    },
    /// Skew embedding of k^<=n.
    Skew { k: u32, n: usize },
    /// Fill a tree with level predicates out to uniform height m.
    Fill {
        structure: String,
        #[arg(short, long)]
        m: usize,
        /// Write filled.txt, extract.txt and marks.txt here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for an amalgam of B1 and B2 over A.
    Amalgam {
        a: String,
        b1: String,
        b2: String,
        /// Images of A's elements in B1 (default: first embedding).
        #[arg(long, num_args = 1.., value_delimiter = ' ')]
        e1: Option<Vec<String>>,
        #[arg(long, num_args = 1.., value_delimiter = ' ')]
        e2: Option<Vec<String>>,
        #[arg(long, default_value_t = 12)]
        bound: usize,
        #[arg(long, value_enum, default_value_t = Class::Tree)]
        class: Class,
    },
    /// Run a named reproduction.
    Fixtures {
        name: Option<String>,
        #[arg(long, default_value_t = 12)]
        bound: usize,
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    Tree,
    Linear,
    All,
}

/// What the process prints and how it exits.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, code: 0 }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error[cli.invalid-argument]: --workers must be positive");
            return ExitCode::from(3);
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(Error::BudgetExceeded { budget }) => {
            print!("{}", serialize_budget_report(budget));
            eprintln!("error[ramsey.budget-exceeded]: search budget of {budget} exceeded");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(3)
        }
    }
}

fn load(arg: &str) -> ramseykit::Result<FiniteStructure> {
    load_relative(arg, Path::new("."))
}

/// A structure from a file, or a full tree from the `k^<=n@dialect`
/// shorthand. Relative paths are taken from `base`.
fn load_relative(arg: &str, base: &Path) -> ramseykit::Result<FiniteStructure> {
    if is_shorthand(arg) {
        return Ok(parse_tree_shorthand(arg)?.into_structure());
    }
    let path = base.join(arg);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let s = parse_structure(&text)?;
    s.checked()
}

fn is_shorthand(arg: &str) -> bool {
    arg.contains("^<=") && arg.contains('@')
}

/// Elements named by label, or by number when no label matches.
fn elements(s: &FiniteStructure, names: &[String]) -> ramseykit::Result<Vec<Elem>> {
    names
        .iter()
        .map(|n| {
            if let Some(e) = s.element_by_label(n) {
                return Ok(e);
            }
            let e: Elem = n.parse().map_err(|_| Error::InvalidArgument(format!("no element `{n}`")))?;
            if e >= s.size() {
                return Err(Error::OutOfUniverse(e));
            }
            Ok(e)
        })
        .collect()
}

fn names(s: &FiniteStructure, elems: &[Elem]) -> String {
    elems.iter().map(|&e| s.label(e)).collect::<Vec<_>>().join(" ")
}

fn run(cli: &Cli) -> ramseykit::Result<Outcome> {
    match &cli.command {
        Command::Validate { structure } => {
            let arg = structure;
            let s = if is_shorthand(arg) {
                parse_tree_shorthand(arg)?.into_structure()
            } else {
                let text = std::fs::read_to_string(arg)
                    .map_err(|e| Error::InvalidArgument(format!("cannot read {arg}: {e}")))?;
                parse_structure(&text)?
            };
            let v = s.validate();
            if v.is_empty() {
                Ok(Outcome::ok(format!("valid: {} elements\n", s.size())))
            } else {
                let mut text = String::new();
                for x in &v {
                    let _ = writeln!(text, "violation: {x}");
                }
                Ok(Outcome { text, code: 1 })
            }
        }
        Command::Qftype { structure, tuple } => {
            let s = load(structure)?;
            let t = elements(&s, tuple)?;
            let q = qf_type(&s, &t)?;
            Ok(Outcome::ok(format!("{q}\n")))
        }
        Command::Closure { structure, tuple } => {
            let s = load(structure)?;
            let t = elements(&s, tuple)?;
            let c = cl(&s, &t)?;
            Ok(Outcome::ok(format!("{}\n", names(&s, &c))))
        }
        Command::Isolate { structure, tuple } => {
            let s = load(structure)?;
            let t = elements(&s, tuple)?;
            let f = isolating_formula(&qf_type(&s, &t)?)?;
            Ok(Outcome::ok(format!("{f}\n")))
        }
        Command::Arrow { c, b, a, k, verify, escalate } => {
            if *k == 0 {
                return Err(Error::InvalidArgument("k must be at least 1".into()));
            }
            let (b, a) = (load(b)?, load(a)?);
            if let Some(path) = verify {
                return verify_report(&load(c)?, &b, &a, *k, path, cli.budget);
            }
            if *escalate > 0 && !is_shorthand(c) {
                return Err(Error::InvalidArgument("--escalate needs C in `k^<=n@dialect` form".into()));
            }
            let mut host = c.clone();
            let mut text = String::new();
            for step in 0..=*escalate {
                let out = arrow(&load(&host)?, &b, &a, *k, cli.budget, cli.format)?;
                if *escalate > 0 {
                    let _ = writeln!(text, "C = {host}");
                }
                text.push_str(&out.text);
                if out.code == 0 || step == *escalate {
                    return Ok(Outcome { text, code: out.code });
                }
                host = taller(&host)?;
            }
            unreachable!("the last step returns")
        }
        Command::Homogenize { request, grow } => homogenize_cmd(request, *grow, cli),
        Command::Skew { k, n } => {
            if *k == 0 {
                return Err(Error::InvalidArgument("k must be at least 1".into()));
            }
            let s = skew_embed(*k, *n);
            let mut text =
                format!("levels: {}\n", s.levels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "));
            for (from, to) in &s.map {
                let _ = writeln!(text, "{from} -> {to}");
            }
            Ok(Outcome::ok(text))
        }
        Command::Fill { structure, m, out } => fill(structure, *m, out.as_deref()),
        Command::Amalgam { a, b1, b2, e1, e2, bound, class } => {
            let (a, b1, b2) = (load(a)?, load(b1)?, load(b2)?);
            amalgam(&a, &b1, &b2, e1.as_deref(), e2.as_deref(), *bound, *class, cli.budget)
        }
        Command::Fixtures { name, bound, list } => {
            if *list || name.is_none() {
                return Ok(Outcome::ok(FIXTURE_NAMES.iter().map(|n| format!("{n}\n")).collect()));
            }
            let run = run_fixture(name.as_deref().unwrap_or_default(), *bound, cli.budget)?;
            Ok(Outcome { text: run.text, code: if run.positive { 0 } else { 1 } })
        }
    }
}

fn arrow(
    c: &FiniteStructure,
    b: &FiniteStructure,
    a: &FiniteStructure,
    k: usize,
    budget: u64,
    format: Format,
) -> ramseykit::Result<Outcome> {
    let v = arrow_holds(c, b, a, k, budget)?;
    let code = if v.holds() { 0 } else { 1 };
    if format == Format::Report {
        return Ok(Outcome { text: serialize_verdict(&v), code });
    }
    let mut text = format!(
        "C -> (B)^A_{k}: {}\nA-copies: {}\nB-copies: {}\nnodes: {}\n",
        if v.holds() { "holds" } else { "fails" },
        v.a_copies,
        v.b_copies,
        v.nodes
    );
    if let Some(w) = v.witness() {
        let ok = verify_witness(c, b, a, w)?;
        let _ = writeln!(text, "witness rechecked: {}", if ok { "yes" } else { "no" });
        for (copy, col) in w.copies.iter().zip(&w.colors) {
            let _ = writeln!(text, "copy {} color {col}", names(c, copy));
        }
    }
    Ok(Outcome { text, code })
}

fn verify_report(
    c: &FiniteStructure,
    b: &FiniteStructure,
    a: &FiniteStructure,
    k: usize,
    path: &Path,
    budget: u64,
) -> ramseykit::Result<Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    match parse_report(&text)? {
        Report::Fails { witness, .. } => {
            let ok = witness.k <= k && verify_witness(c, b, a, &witness)?;
            let verdict = if ok { "valid" } else { "invalid" };
            Ok(Outcome { text: format!("witness: {verdict}\n"), code: if ok { 0 } else { 1 } })
        }
        Report::Holds { .. } => {
            let v = arrow_holds(c, b, a, k, budget)?;
            let ok = v.holds();
            let verdict = if ok { "confirmed" } else { "refuted" };
            Ok(Outcome { text: format!("holds: {verdict}\n"), code: if ok { 0 } else { 1 } })
        }
        Report::Budget { budget } => {
            Ok(Outcome { text: format!("report is inconclusive (budget {budget})\n"), code: 2 })
        }
    }
}

/// A seeded coloring of the copies of `pattern` in `index`.
fn random_coloring(
    index: &FiniteStructure,
    pattern: &FiniteStructure,
    k: usize,
    seed: u64,
) -> ramseykit::Result<Coloring> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Coloring::from_fn(index, pattern, k, |_| rng.gen_range(0..k))
}

fn homogenize_cmd(path: &Path, grow: bool, cli: &Cli) -> ramseykit::Result<Outcome> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let req = Request::parse(&text)?;
    let b = load_relative(&req.b, base)?;
    let mut index_arg = req.index.clone();
    let mut header = String::new();
    let attempts = if grow { 4 } else { 1 };
    if grow && !(is_shorthand(&req.index) && matches!(req.family, FamilySpec::Coloring { .. })) {
        return Err(Error::InvalidArgument("--grow needs a `k^<=n@dialect` index and a generated coloring".into()));
    }
    for attempt in 0..attempts {
        let index = load_relative(&index_arg, base)?;
        let (family, delta) = match &req.family {
            FamilySpec::Coloring { pattern, k } => {
                let a = load_relative(pattern, base)?;
                let g = random_coloring(&index, &a, *k, cli.seed)?;
                if attempt == 0 {
                    let _ = writeln!(header, "seed: {}", cli.seed);
                }
                let m = encode_coloring_as_structure(&index, &a, &g)?;
                let fam = IndexedFamily::identity(index.clone(), m)?;
                (fam, ramseykit::homogenize::coloring_delta(*k, a.size()))
            }
            FamilySpec::Explicit { target, family, delta } => {
                let t = load_relative(target, base)?;
                let fam = match family {
                    None => IndexedFamily::identity(index.clone(), t)?,
                    Some(f) => {
                        let text = read(&base.join(f))?;
                        IndexedFamily::new(index.clone(), t, request::parse_family(&text)?)?
                    }
                };
                let delta_text = read(&base.join(delta))?;
                (fam, parse_formula_list(&delta_text)?)
            }
        };
        let types = match &req.types {
            None => None,
            Some(list) => Some(
                list.iter()
                    .map(|names| {
                        let t = elements(&b, names)?;
                        qf_type(&b.without_labels(), &t)
                    })
                    .collect::<ramseykit::Result<Vec<_>>>()?,
            ),
        };
        let hr = HomogenizationRequest { family, b: b.clone(), delta, types, max_len: req.max_len };
        match homogenize(&hr, cli.budget) {
            Ok(res) => {
                let _ = writeln!(header, "index: {index_arg}\nresult: found");
                return Ok(Outcome::ok(header + &render(&res, &index)));
            }
            Err(Error::NoHomogeneousCopy) if attempt + 1 < attempts => {
                let next = taller(&index_arg)?;
                let _ = writeln!(header, "index: {index_arg}\nresult: none\ngrowing to {next}");
                index_arg = next;
            }
            Err(Error::NoHomogeneousCopy) => {
                let _ = writeln!(header, "index: {index_arg}\nresult: none");
                return Ok(Outcome { text: header, code: 1 });
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("the last attempt returns")
}

fn read(path: &Path) -> ramseykit::Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn taller(shorthand: &str) -> ramseykit::Result<String> {
    let t = parse_tree_shorthand(shorthand)?;
    let (shape, dialect) = shorthand.split_once('@').unwrap_or_default();
    let (k, _) = shape.split_once("^<=").unwrap_or_default();
    let n = t.nodes().iter().map(|x| x.level()).max().unwrap_or(0);
    Ok(format!("{}^<={}@{}", k.trim(), n + 1, dialect.trim()))
}

fn render(res: &HomogenizationResult, index: &FiniteStructure) -> String {
    res.report(index)
}

fn fill(arg: &str, m: usize, out: Option<&Path>) -> ramseykit::Result<Outcome> {
    let d = load(arg)?;
    let f = fill_m(&d, m)?;
    let marks = f.mark_elements();
    let carved = extract_s(f.filled.structure(), &marks, m)?;
    let show = |v: &[ramseykit::TreeNode]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut text = format!("k: {}\ny: {}\nmarks: {}\n", f.k, show(&f.y), show(&f.marks));
    let filled_text = serialize_structure(f.filled.structure());
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            let write = |name: &str, body: &str| {
                std::fs::write(dir.join(name), body).map_err(|e| Error::InvalidArgument(e.to_string()))
            };
            write("filled.txt", &filled_text)?;
            write("extract.txt", &serialize_structure(&carved))?;
            write("marks.txt", &(show(&f.marks) + "\n"))?;
            let _ = writeln!(text, "wrote {}", dir.display());
        }
        None => {
            text.push_str("filled:\n");
            text.push_str(&filled_text);
        }
    }
    Ok(Outcome::ok(text))
}

fn embedding_arg(
    a: &FiniteStructure,
    b: &FiniteStructure,
    given: Option<&[String]>,
    which: &str,
) -> ramseykit::Result<Embedding> {
    match given {
        Some(list) => {
            let map = elements(b, list)?;
            if map.len() != a.size() || !a.is_embedding(b, &map) {
                return Err(Error::InvalidArgument(format!("{which} is not an embedding")));
            }
            Ok(Embedding { map })
        }
        None => enumerate_embeddings(a, b)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::InvalidArgument(format!("A does not embed in {which}"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn amalgam(
    a: &FiniteStructure,
    b1: &FiniteStructure,
    b2: &FiniteStructure,
    e1: Option<&[String]>,
    e2: Option<&[String]>,
    bound: usize,
    class: Class,
    budget: u64,
) -> ramseykit::Result<Outcome> {
    let e1 = embedding_arg(a, b1, e1, "B1")?;
    let e2 = embedding_arg(a, b2, e2, "B2")?;
    let mut text = String::new();
    for (name, b, e) in [("B1", b1, &e1), ("B2", b2, &e2)] {
        let pairs: Vec<String> =
            e.map.iter().enumerate().map(|(x, &y)| format!("{}->{}", a.label(x), b.label(y))).collect();
        let _ = writeln!(text, "A embeds in {name} via {}", pairs.join(" "));
    }
    let class_ref: &dyn StructureClass = match class {
        Class::Tree => &TreeAge,
        Class::Linear => &LinearOrders,
        Class::All => &AllStructures,
    };
    if matches!(class, Class::Tree) {
        if let Some(r) = refute_tree_amalgam(b1, b2, &e1, &e2) {
            text.push_str(&r.to_string());
        }
    }
    let s = check_amalgamation(a, b1, b2, &e1, &e2, class_ref, bound, budget)?;
    let _ = writeln!(text, "candidates generated: {}\ncandidates tested: {}", s.generated, s.candidates);
    match s.amalgam {
        Some(am) => {
            let _ = writeln!(text, "amalgam found with {} elements", am.d.size());
            let _ = writeln!(text, "g1: {}", am.g1.map.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
            let _ = writeln!(text, "g2: {}", am.g2.map.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "));
            text.push_str(&serialize_structure(&am.d));
            Ok(Outcome::ok(text))
        }
        None => {
            let _ = writeln!(text, "no amalgam up to bound {bound}");
            Ok(Outcome { text, code: 1 })
        }
    }
}
