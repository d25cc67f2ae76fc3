//! The `nsoperad` command line.
//!
//! Exit codes: 0 on success, 1 on a validation failure or bad input, 2 when
//! `--strict` demands a certified answer that the truncation cannot give.

pub mod format;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::free::{
    concentrated_sequence, free_operad, pushout_oracle, pushout_presentation, CellKind, DimensionTable, FreeBounds,
    GradedSequence, OracleRelations, PushoutBounds,
};
use crate::hochschild::{hochschild_of_homology_comparison, HochschildData};
use crate::operad::{FinOperad, MultiplicativeOperad};
use crate::poisson::{poisson_operad_with, SignConvention};
use crate::specseq::{collapse_report, Bicomplex};

use format::{parse_bicomplex, parse_sequence, OperadDocument};

#[derive(Parser, Debug)]
#[command(name = "nsoperad", version, about = "Exact computations with non-symmetric operads over Q")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse an operad description and check the operad axioms.
    Validate {
        path: PathBuf,
        /// Print the dimension rows as tab-separated values.
        #[arg(long)]
        tsv: bool,
    },
    /// Emit the Poisson operad with a bracket of degree d - 1.
    Poisson {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        arity_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Convention::Shifted)]
        convention: Convention,
        #[arg(long)]
        tsv: bool,
    },
    /// Hochschild cohomology of a multiplicative operad.
    Hh {
        path: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t_min: isize,
        #[arg(long, allow_hyphen_values = true)]
        t_max: isize,
        /// Last cosimplicial degree kept; defaults to the top stored arity.
        #[arg(long)]
        p_max: Option<usize>,
        /// Also compute the cohomology of the homology operad.
        #[arg(long)]
        compare_homology: bool,
        #[command(flatten)]
        report: Report,
    },
    /// Spectral sequence pages of an operad's normalized bicomplex or of a
    /// bicomplex file (`.bc`).
    Ss {
        path: PathBuf,
        #[arg(long, default_value_t = 3)]
        r_max: usize,
        #[arg(long)]
        p_max: Option<usize>,
        #[command(flatten)]
        report: Report,
    },
    /// Dimensions of a free operad.
    Free {
        #[command(flatten)]
        generators: Generators,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Compare the odd-tree presentation of attaching a disk cell with the
    /// generators-and-relations oracle.
    PushoutCheck {
        path: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Args, Debug)]
pub struct Report {
    /// Print machine-readable rows instead of tables.
    #[arg(long)]
    pub tsv: bool,
    /// Exit with status 2 if any reported value is not certified.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct Generators {
    /// Graded sequence file.
    #[arg(long)]
    seq: Option<PathBuf>,
    /// The disk D^p concentrated in arity q.
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    disk: Option<Vec<usize>>,
    /// The sphere S^p concentrated in arity q.
    #[arg(long, num_args = 2, value_names = ["P", "Q"])]
    sphere: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long, default_value_t = 4)]
    arity_max: usize,
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
    /// Cap on tree vertices (free operads, oracle) or odd vertices
    /// (presentations).
    #[arg(long)]
    max_vertices: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    Shifted,
    Prefix,
}

/// Failures mapped to exit codes.
enum Outcome {
    Ok,
    Invalid,
    NotCertified,
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli.command, out) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::Invalid) => 1,
        Ok(Outcome::NotCertified) => 2,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            match e {
                Error::WindowNotCertified(_) => 2,
                _ => 1,
            }
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidParameter(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn load_multiplicative(path: &Path) -> Result<MultiplicativeOperad> {
    let doc = OperadDocument::parse(&read(path)?)?;
    doc.multiplicative()
        .ok_or_else(|| Error::InvalidParameter("the description has no multiplication and basepoint".into()))?
}

fn execute(cmd: &Command, out: &mut dyn Write) -> Result<Outcome> {
    let w = |out: &mut dyn Write, s: String| -> Result<()> {
        out.write_all(s.as_bytes()).map_err(|e| Error::InvalidParameter(e.to_string()))
    };
    match cmd {
        Command::Validate { path, tsv } => {
            let doc = OperadDocument::parse(&read(path)?)?;
            let (text, ok) = validate_report(&doc, *tsv);
            w(out, text)?;
            Ok(if ok { Outcome::Ok } else { Outcome::Invalid })
        }
        Command::Poisson { d, arity_max, out: dest, convention, tsv } => {
            let conv = match convention {
                Convention::Shifted => SignConvention::Shifted,
                Convention::Prefix => SignConvention::Prefix,
            };
            let p = poisson_operad_with(*d, *arity_max, conv)?;
            w(out, poisson_table(&p.multiplicative.operad, *d, *tsv))?;
            if let Some(dest) = dest {
                let labels = p
                    .basis
                    .iter()
                    .map(|b| b.iter().map(|m| m.to_string().replace(' ', ".")).collect())
                    .collect();
                let doc = OperadDocument { labels, ..OperadDocument::with_default_labels(p.multiplicative.operad.clone()) }
                    .with_multiplicative(&p.multiplicative)?;
                fs::write(dest, doc.emit()?).map_err(|e| io_err(dest, e))?;
            }
            Ok(Outcome::Ok)
        }
        Command::Hh { path, t_min, t_max, p_max, compare_homology, report } => {
            let m = load_multiplicative(path)?;
            let p_max = p_max.unwrap_or(m.operad.arity_max());
            let (text, certified, ok) = hh_report(&m, *t_min, *t_max, p_max, *compare_homology, report.tsv)?;
            w(out, text)?;
            Ok(if !ok {
                Outcome::Invalid
            } else if report.strict && !certified {
                Outcome::NotCertified
            } else {
                Outcome::Ok
            })
        }
        Command::Ss { path, r_max, p_max, report } => {
            let b = load_bicomplex(path, *p_max)?;
            let (text, certified) = ss_report(&b, *r_max, report.tsv)?;
            w(out, text)?;
            Ok(if report.strict && !certified { Outcome::NotCertified } else { Outcome::Ok })
        }
        Command::Free { generators, bounds } => {
            let s = match (&generators.seq, &generators.disk, &generators.sphere) {
                (Some(path), _, _) => parse_sequence(&read(path)?)?,
                (_, Some(pq), _) => concentrated_sequence(pq[0], pq[1], CellKind::Disk, bounds.arity_max)?,
                (_, _, Some(pq)) => concentrated_sequence(pq[0], pq[1], CellKind::Sphere, bounds.arity_max)?,
                _ => unreachable!("clap requires one generator option"),
            };
            w(out, free_report(&s, bounds)?)?;
            Ok(Outcome::Ok)
        }
        Command::PushoutCheck { path, p, q, bounds, strict } => {
            let doc = OperadDocument::parse(&read(path)?)?;
            let (text, agree, certified) = pushout_report(&doc.operad, *p, *q, bounds)?;
            w(out, text)?;
            Ok(if !agree {
                Outcome::Invalid
            } else if *strict && !certified {
                Outcome::NotCertified
            } else {
                Outcome::Ok
            })
        }
    }
}

fn dims_line(o: &FinOperad, n: usize) -> String {
    let d: Vec<String> = o.component(n).dims().iter().map(ToString::to_string).collect();
    d.join(" ")
}

/// The validation report and whether everything passed.
pub fn validate_report(doc: &OperadDocument, tsv: bool) -> (String, bool) {
    let o = &doc.operad;
    let mut s = String::new();
    if tsv {
        for n in 0..=o.arity_max() {
            for (k, d) in o.component(n).dims().iter().enumerate() {
                s += &format!("{n}\t{k}\t{d}\n");
            }
        }
    } else {
        s += &format!("arity_max {}\n", o.arity_max());
        for n in 0..=o.arity_max() {
            s += &format!("arity {n}: {}\n", dims_line(o, n));
        }
    }
    let report = o.check_axioms();
    if let Some(v) = report.violations.first() {
        s += &format!("INVALID: {} axiom violations; first: {v:?}\n", report.violations.len());
        return (s, false);
    }
    s += &format!("axioms: {} instances checked\n", report.instances_checked);
    if let Some(m) = doc.multiplicative() {
        match m.and_then(|m| m.validate()) {
            Ok(()) => s += "multiplicative structure: valid\n",
            Err(e) => {
                s += &format!("INVALID: {e}\n");
                return (s, false);
            }
        }
    }
    s += "VALID\n";
    (s, true)
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Per arity, the dimensions in degrees `0, m, 2m, ...`, the total and `n!`.
pub fn poisson_table(o: &FinOperad, d: usize, tsv: bool) -> String {
    let m = d - 1;
    let mut s = String::new();
    if !tsv {
        s += &format!("Poisson operad, bracket degree {m}\n");
        s += &format!("{:>5}  {:<28} {:>6} {:>6}\n", "arity", "dims in degrees 0,m,2m,...", "total", "n!");
    }
    for n in 0..=o.arity_max() {
        let c = o.component(n);
        let dims: Vec<usize> = (0..=c.max_degree()).step_by(m).map(|k| c.dim(k)).collect();
        if tsv {
            for (j, x) in dims.iter().enumerate() {
                s += &format!("{n}\t{}\t{x}\n", j * m);
            }
        } else {
            let ds: Vec<String> = dims.iter().map(ToString::to_string).collect();
            s += &format!("{n:>5}  {:<28} {:>6} {:>6}\n", ds.join(" "), c.total_dim(), factorial(n));
        }
    }
    s
}

/// Text, whether every row is certified, and whether a requested homology
/// comparison agreed.
pub fn hh_report(
    m: &MultiplicativeOperad,
    t_min: isize,
    t_max: isize,
    p_max: usize,
    compare: bool,
    tsv: bool,
) -> Result<(String, bool, bool)> {
    if compare {
        let c = hochschild_of_homology_comparison(m, t_min, t_max, p_max)?;
        let mut s = String::new();
        if tsv {
            for (a, b) in c.operad.rows.iter().zip(&c.homology.rows) {
                s += &format!("{}\t{}\t{}\t{}\n", a.t, a.dim, b.dim, a.certified && b.certified);
            }
        } else {
            s += &format!("HH of the operad\n{}", c.operad);
            s += &format!("HH of its homology\n{}", c.homology);
        }
        let ok = c.equal_on_certified();
        let certified = c.operad.rows.iter().chain(&c.homology.rows).all(|r| r.certified);
        if !tsv {
            s += &format!("certified degrees agree: {}\n", if ok { "yes" } else { "no" });
            s += &format!("truncated totals agree: {}\n", if c.equal_truncated() { "yes" } else { "no" });
        }
        return Ok((s, certified, ok));
    }
    let data = HochschildData::new(std::sync::Arc::new(m.clone()), p_max)?;
    let h = data.cohomology(t_min, t_max)?;
    let certified = h.rows.iter().all(|r| r.certified);
    let s = if tsv { h.tsv() } else { h.to_string() };
    Ok((s, certified, true))
}

fn load_bicomplex(path: &Path, p_max: Option<usize>) -> Result<Bicomplex> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e == "bc") {
        return parse_bicomplex(&text);
    }
    let doc = OperadDocument::parse(&text)?;
    let m = doc
        .multiplicative()
        .ok_or_else(|| Error::InvalidParameter("the description has no multiplication and basepoint".into()))??;
    let p_max = p_max.unwrap_or(m.operad.arity_max());
    Ok(HochschildData::new(std::sync::Arc::new(m), p_max)?.bicomplex)
}

/// Pages, the `E_∞` page, the collapse verdict, the Euler line and the
/// comparison of `E_∞` with the total homology; and whether all cells of the
/// last page are certified.
pub fn ss_report(b: &Bicomplex, r_max: usize, tsv: bool) -> Result<(String, bool)> {
    let rep = collapse_report(b, r_max.max(2))?;
    let mut s = String::new();
    let shown: Vec<_> = rep.pages.iter().filter(|p| p.r <= r_max.max(2)).collect();
    for pg in &shown {
        s += &if tsv { pg.tsv() } else { format!("{pg}\n") };
    }
    if tsv {
        s += &rep.infinity.tsv().replace(&format!("{}\t", rep.infinity.r), "inf\t");
    } else {
        s += &format!("{}\n", rep.infinity).replacen(&format!("E_{}", rep.infinity.r), "E_inf", 1);
        s += &format!("verdict: {}\n", rep.verdict());
        let e: Vec<String> = rep.euler.iter().map(ToString::to_string).collect();
        let same = rep.euler.windows(2).all(|w| w[0] == w[1]);
        s += &format!("euler characteristic per page: {} ({})\n", e.join(" "), if same { "constant" } else { "NOT constant" });
        let (lo, hi) = b.total_range();
        let ok = (lo..=hi).all(|t| rep.infinity.total(t) == b.total_homology_dim(t));
        s += &format!("E_inf totals match total homology: {}\n", if ok { "yes" } else { "no" });
    }
    let certified = rep.infinity.cells.iter().all(|c| c.certified);
    Ok((s, certified))
}

fn operad_table(o: &FinOperad, d: usize, certified: bool) -> DimensionTable {
    DimensionTable {
        dims: o.components().iter().map(|c| c.truncated(d).padded(d).dims().to_vec()).collect(),
        homology: o.components().iter().map(|c| c.truncated(d).padded(d).homology_dims()).collect(),
        certified,
    }
}

pub fn free_report(s: &GradedSequence, b: &BoundArgs) -> Result<String> {
    let f = free_operad(s, &FreeBounds { arity_max: b.arity_max, max_degree: b.max_degree, max_vertices: b.max_vertices })?;
    let t = operad_table(&f.operad, b.max_degree, f.certified);
    Ok(format!("free operad\n{t}"))
}

/// Text, agreement of presentation and oracle together with the
/// quasi-isomorphism verdict, and certification.
pub fn pushout_report(o: &FinOperad, p: usize, q: usize, b: &BoundArgs) -> Result<(String, bool, bool)> {
    let pb = PushoutBounds { arity_max: b.arity_max, max_degree: b.max_degree, max_odd_vertices: b.max_vertices };
    let pres = pushout_presentation(o, p, q, &pb)?;
    let attach = concentrated_sequence(p, q, CellKind::Disk, b.arity_max)?;
    let fb = FreeBounds { arity_max: b.arity_max, max_degree: b.max_degree, max_vertices: b.max_vertices };
    let oracle = pushout_oracle(o, &attach, &OracleRelations::None, &fb)?;
    let table = pres.table();
    let agree = table == oracle;
    let w = pres.inclusion.is_weak_equivalence();
    let qi = w.holds_below(b.max_degree);
    let mut s = format!("presentation\n{table}");
    s += &format!("presentation vs oracle: {}\n", if agree { "AGREE" } else { "DISAGREE" });
    s += &format!(
        "inclusion quasi-isomorphism below degree {}: {}\n",
        b.max_degree,
        if qi { "PASS" } else { "FAIL" }
    );
    Ok((s, agree && qi, pres.certified && oracle.certified))
}

#[cfg(test)]
mod tests;
