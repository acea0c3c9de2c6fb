use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;

use kohn_core::berger::{self, berger_spectrum};
use kohn_core::families::{
    check_pair, gerson_classes, gerson_counts, make_pair, pair_equivalent, verify_gerson_isospectral, GersonCounts, PairParams,
};
use kohn_core::genfun::{compare_f, FComparison};
use kohn_core::lens::{cr_witness, isometry_witness, CrWitness, IsometryWitness};
use kohn_core::search::{sweep, SweepOptions};
use kohn_core::{berger_isospectral_upto, DimTable, Quotient, SphereQuotient};

use crate::config::{parse_k_range, Command, FamilyKind, Format, Mode, RunConfig};
use crate::CliError;

const DEFAULT_BERGER_CUTOFF: usize = 30;

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_quotient(src: &str) -> Result<Quotient, CliError> {
    src.parse::<Quotient>()
        .map_err(|e| CliError::Usage(format!("`{src}`: {e}")))
}

pub fn run(cfg: RunConfig) -> Result<(), CliError> {
    match &cfg.command {
        Command::Dims { group, pmax, qmax } => dims(&cfg, group, *pmax, *qmax),
        Command::Search {
            n,
            k_range,
            checkpoint_dir,
        } => search(&cfg, *n, k_range, checkpoint_dir.clone()),
        Command::CheckPair { a, b, mode } => check(&cfg, a, b, *mode),
        Command::Family { kind } => family(&cfg, kind),
        Command::Berger { group } => berger_cmd(&cfg, group),
    }
}

fn reject(format: Format, what: &str) -> CliError {
    CliError::Usage(format!("--format {format:?} is not supported for {what}").to_lowercase())
}

/// CSV is rectangular (`p <= pmax`, `q <= qmax`); JSON is the square table
/// up to `max(pmax, qmax)`.
fn dims(cfg: &RunConfig, group: &str, pmax: usize, qmax: usize) -> Result<(), CliError> {
    let q = parse_quotient(group)?;
    let table = DimTable::compute(&q, pmax.max(qmax))?;
    let mut out = sink(&cfg.out)?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            let header: Vec<String> = std::iter::once("p\\q".to_string())
                .chain((0..=qmax).map(|x| x.to_string()))
                .collect();
            w.write_record(&header)?;
            for p in 0..=pmax {
                let row: Vec<String> = std::iter::once(p.to_string())
                    .chain((0..=qmax).map(|x| table.get(p, x).to_string()))
                    .collect();
                w.write_record(&row)?;
            }
            w.flush()?;
        }
        Format::Json | Format::Jsonl => writeln!(out, "{}", serde_json::to_string(&table)?)?,
    }
    out.flush()?;
    Ok(())
}

fn search(cfg: &RunConfig, n: usize, k_range: &str, checkpoint_dir: Option<PathBuf>) -> Result<(), CliError> {
    let ks = parse_k_range(k_range)?;
    let format = cfg.format.unwrap_or(Format::Jsonl);
    let checkpoint_dir = checkpoint_dir.or_else(|| {
        cfg.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".checkpoints");
            PathBuf::from(s)
        })
    });
    let opts = SweepOptions {
        checkpoint_dir,
        resume: cfg.resume,
    };
    enum Out {
        Lines(Box<dyn Write>),
        Table(csv::Writer<Box<dyn Write>>),
    }
    let mut out = match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink(&cfg.out)?);
            w.write_record(["2n-1", "k", "family"])?;
            Out::Table(w)
        }
        _ => Out::Lines(sink(&cfg.out)?),
    };
    let all = sweep(n, ks, &opts, |k, families, resumed| {
        if resumed {
            eprintln!("k={k}: {} families (checkpoint)", families.len());
        }
        match &mut out {
            Out::Lines(w) if format == Format::Jsonl => {
                for f in families {
                    writeln!(w, "{}", serde_json::to_string(f)?)?;
                }
                w.flush()?;
            }
            Out::Lines(_) => {}
            Out::Table(w) => {
                for f in families {
                    w.write_record([(2 * n - 1).to_string(), k.to_string(), f.member_list()])
                        .map_err(|e| kohn_core::Error::Io(e.into()))?;
                }
                w.flush()?;
            }
        }
        Ok(())
    })?;
    match out {
        Out::Lines(mut w) => {
            if format == Format::Json {
                writeln!(w, "{}", serde_json::to_string_pretty(&all)?)?;
            }
            w.flush()?;
        }
        Out::Table(mut w) => w.flush()?,
    }
    Ok(())
}

#[derive(Serialize)]
struct BergerVerdict {
    cutoff: usize,
    equal: bool,
}

#[derive(Serialize, Default)]
struct Verdict {
    a: String,
    b: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    cr_equivalent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cr_witness: Option<CrWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    isometric: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    isometry_witness: Option<IsometryWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_equal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f_comparison: Option<FComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    berger: Option<BergerVerdict>,
}

fn check(cfg: &RunConfig, a: &str, b: &str, mode: Mode) -> Result<(), CliError> {
    let (qa, qb) = (parse_quotient(a)?, parse_quotient(b)?);
    if qa.n() != qb.n() {
        return Err(kohn_core::Error::DimensionMismatch(qa.n(), qb.n()).into());
    }
    let wants = |m: Mode| mode == m || mode == Mode::All;
    let mut v = Verdict {
        a: qa.to_string(),
        b: qb.to_string(),
        ..Default::default()
    };
    let lenses = qa.as_lens().zip(qb.as_lens());
    if matches!(mode, Mode::Cr | Mode::Riem) && lenses.is_none() {
        return Err(CliError::Usage("CR equivalence and isometry are decided for lens spaces only".into()));
    }
    if let Some((la, lb)) = lenses {
        if wants(Mode::Cr) {
            v.cr_witness = cr_witness(la, lb);
            v.cr_equivalent = Some(v.cr_witness.is_some());
        }
        if wants(Mode::Riem) {
            v.isometry_witness = isometry_witness(la, lb);
            v.isometric = Some(v.isometry_witness.is_some());
        }
    }
    if wants(Mode::KohnF) {
        let cmp = compare_f(&qa, &qb, cfg.cutoff)?;
        v.f_equal = Some(cmp.is_equal());
        v.f_comparison = Some(cmp);
    }
    if wants(Mode::Berger) {
        let cutoff = cfg.cutoff.unwrap_or(DEFAULT_BERGER_CUTOFF);
        v.berger = Some(BergerVerdict {
            cutoff,
            equal: berger_isospectral_upto(&qa, &qb, cutoff)?,
        });
    }
    let mut out = sink(&cfg.out)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
    out.flush()?;
    let negative = match mode {
        Mode::Cr => v.cr_equivalent == Some(false),
        Mode::Riem => v.isometric == Some(false),
        Mode::KohnF => matches!(v.f_comparison, Some(FComparison::Different { .. })),
        Mode::Berger => v.berger.as_ref().is_some_and(|x| !x.equal),
        Mode::All => false,
    };
    if negative {
        return Err(CliError::Verification(format!("{mode:?} verdict is negative")));
    }
    Ok(())
}

#[derive(Serialize)]
struct GersonReport {
    #[serde(flatten)]
    counts: GersonCounts,
    members: Vec<String>,
    isospectral: bool,
}

#[derive(Serialize)]
struct PairReport {
    r: u64,
    a: Vec<u64>,
    plus: String,
    minus: String,
    f_equal: bool,
    equivalent: bool,
    involution_criterion: bool,
}

fn family(cfg: &RunConfig, kind: &FamilyKind) -> Result<(), CliError> {
    let mut out = sink(&cfg.out)?;
    let json = match cfg.format {
        None => false,
        Some(Format::Json | Format::Jsonl) => true,
        Some(f) => return Err(reject(f, "family")),
    };
    match kind {
        FamilyKind::Gerson { k } => {
            let counts = gerson_counts(*k)?;
            let report = GersonReport {
                members: gerson_classes(*k)?.iter().map(ToString::to_string).collect(),
                isospectral: verify_gerson_isospectral(*k)?,
                counts,
            };
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                let c = &report.counts;
                writeln!(out, "G({}, {}): {} sets, {} ordered tuples", c.n, c.k, c.sets, c.raw)?;
                writeln!(out, "classes: {} (expected {})", c.classes, c.expected_classes)?;
                for m in &report.members {
                    writeln!(out, "  {m}")?;
                }
                writeln!(out, "isospectral: {}", report.isospectral)?;
            }
            out.flush()?;
            if !report.isospectral || report.counts.classes as u64 != report.counts.expected_classes {
                return Err(CliError::Verification(format!("G({}, {})", report.counts.n, k)));
            }
        }
        FamilyKind::Pair { r, a } => {
            let params = PairParams::new(*r, a)?;
            let (plus, minus) = make_pair(&params);
            let (f_equal, equivalent) = check_pair(&params)?;
            let report = PairReport {
                r: *r,
                a: a.clone(),
                plus: plus.to_string(),
                minus: minus.to_string(),
                f_equal,
                equivalent,
                involution_criterion: pair_equivalent(&params),
            };
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                writeln!(out, "L+ = {}", report.plus)?;
                writeln!(out, "L- = {}", report.minus)?;
                writeln!(out, "F-equal: {}", report.f_equal)?;
                writeln!(out, "equivalent: {}", report.equivalent)?;
                writeln!(out, "involution criterion: {}", report.involution_criterion)?;
            }
            out.flush()?;
            if !f_equal || equivalent != report.involution_criterion {
                return Err(CliError::Verification(format!("pair r={r} a={a:?}")));
            }
        }
    }
    Ok(())
}

fn berger_cmd(cfg: &RunConfig, group: &str) -> Result<(), CliError> {
    let q = parse_quotient(group)?;
    let lines = berger_spectrum(&q, cfg.cutoff.unwrap_or(10))?;
    let mut out = sink(&cfg.out)?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => out.write_all(berger::to_csv(&lines).as_bytes())?,
        Format::Json | Format::Jsonl => writeln!(out, "{}", serde_json::to_string(&lines)?)?,
    }
    out.flush()?;
    Ok(())
}
