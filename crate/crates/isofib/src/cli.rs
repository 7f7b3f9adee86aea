//! Command-line front end.

use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::atlas::{atlas_table, AtlasRecord};
use crate::classifier::{
    classify, compare_atlas, compare_families, request_for_table, ClassifyRequest, Comparison, FamilyRecord, FamilyRow,
    ANY_BASE_A, ANY_BASE_B,
};
use crate::cover::{enumerate_covers, CoverConstraints, CoverData, CoverSpec, Dedup};
use crate::error::{Error, Result};
use crate::group::FiniteAbelianGroup;
use crate::parallel::{with_workers, workers_from_env};
use crate::reference::{self, Table};
use crate::sandwich::{InvariantReport, SandwichSpec, SandwichSurface};

#[derive(Parser, Debug)]
#[command(
    name = "isofib",
    version,
    about = "Abelian covers, diagonal quotient surfaces and canonical pencils"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Faithful Abelian actions on curves of genus 2 or 3, checked against the reference tables
    Atlas(AtlasArgs),
    /// Enumerate covers of a curve with a given group
    Covers(CoversArgs),
    /// Search for surfaces whose canonical map factors through an isotrivial pencil
    Classify(ClassifyArgs),
    /// Invariants of the quotient surface described by a JSON spec file
    Invariants(InvariantsArgs),
    /// Recompute a reference table and list every discrepancy
    Compare(CompareArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct AtlasArgs {
    /// genus of the curve, 2 or 3
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=3))]
    pub genus: u32,
    /// keep only actions with this quotient genus
    #[arg(long)]
    pub quotient_genus: Option<u32>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct CoversArgs {
    /// cyclic factors, e.g. 2,4
    #[arg(long, value_parser = parse_group)]
    pub group: FiniteAbelianGroup,
    #[arg(long, default_value_t = 0)]
    pub base_genus: u32,
    /// genus of the covering curve
    #[arg(long)]
    pub genus: Option<u64>,
    /// at most this many branch points
    #[arg(long)]
    pub max_points: Option<u64>,
    /// required eigenspace dimension, e.g. 1,0=2
    #[arg(long = "dim", value_parser = parse_dim)]
    pub dims: Vec<(Vec<u32>, u64)>,
    /// identify covers differing by an automorphism of the group
    #[arg(long)]
    pub up_to_automorphism: bool,
    /// keep every connected twist instead of one per branch multiset
    #[arg(long)]
    pub all_twists: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// genus of the fibre F
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=5))]
    pub genus_f: u32,
    /// cyclic factors such as 2,2,2, or `all`; may be repeated
    #[arg(long = "group", required = true, value_parser = parse_group_choice)]
    pub groups: Vec<GroupChoice>,
    /// genus of F/G, or `any`
    #[arg(long, value_parser = parse_base_a)]
    pub base_a: BaseChoice,
    /// genus of D/G, or `any`
    #[arg(long, value_parser = parse_base_b)]
    pub base_b: BaseChoice,
    /// range of geometric genera, lo..hi
    #[arg(long, value_parser = parse_range)]
    pub pg: RangeInclusive<u64>,
    /// reference table to compare against
    #[arg(long)]
    pub compare: Option<String>,
    /// allow fibre genus 4 and 5, whose output is not checked against any table
    #[arg(long)]
    pub unverified: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct InvariantsArgs {
    /// JSON file with `group`, `coverF` and `coverD`
    pub spec_file: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// table name, e.g. zero or mostro
    pub table_id: String,
    #[arg(long, value_parser = parse_range, default_value = "3..8")]
    pub pg: RangeInclusive<u64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

#[derive(Clone, Debug)]
pub enum GroupChoice {
    All,
    One(FiniteAbelianGroup),
}

#[derive(Clone, Debug)]
pub struct BaseChoice(pub Vec<u32>);

fn parse_factors(s: &str) -> std::result::Result<Vec<u32>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|e| format!("{x:?}: {e}")))
        .collect()
}

fn parse_group(s: &str) -> std::result::Result<FiniteAbelianGroup, String> {
    FiniteAbelianGroup::new(&parse_factors(s)?).map_err(|e| e.to_string())
}

fn parse_group_choice(s: &str) -> std::result::Result<GroupChoice, String> {
    if s.trim() == "all" {
        Ok(GroupChoice::All)
    } else {
        parse_group(s).map(GroupChoice::One)
    }
}

fn parse_base(s: &str, any: &[u32]) -> std::result::Result<BaseChoice, String> {
    if s.trim() == "any" {
        return Ok(BaseChoice(any.to_vec()));
    }
    let v: u32 = s.trim().parse().map_err(|e| format!("{s:?}: {e}"))?;
    if !any.contains(&v) {
        return Err(format!("supported values are {any:?} or `any`"));
    }
    Ok(BaseChoice(vec![v]))
}

fn parse_base_a(s: &str) -> std::result::Result<BaseChoice, String> {
    parse_base(s, &ANY_BASE_A)
}

fn parse_base_b(s: &str) -> std::result::Result<BaseChoice, String> {
    parse_base(s, &ANY_BASE_B)
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<u64>, String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected lo..hi, got {s:?}"))?;
    let lo: u64 = lo.trim().parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi: u64 = hi
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|e| format!("{hi:?}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {s}"));
    }
    Ok(lo..=hi)
}

fn parse_dim(s: &str) -> std::result::Result<(Vec<u32>, u64), String> {
    let (chi, d) = s
        .split_once('=')
        .ok_or_else(|| format!("expected CHI=DIM, got {s:?}"))?;
    Ok((
        parse_factors(chi)?,
        d.trim().parse().map_err(|e| format!("{d:?}: {e}"))?,
    ))
}

/// Rows of strings plus the JSON value of the same data.
pub struct Rendered {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub json: serde_json::Value,
}

impl Rendered {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => render_table(&self.headers, &self.rows),
            Format::Csv => render_csv(&self.headers, &self.rows),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("values serialize");
                s.push('\n');
                s
            }
        }
    }
}

pub fn render_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let width = |s: &str| s.chars().count();
    let mut widths: Vec<usize> = headers.iter().map(|h| width(h)).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(width(c));
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(c);
            if i + 1 < cells.len() {
                s.extend(std::iter::repeat_n(' ', w - width(c)));
            }
        }
        s.push('\n');
        s
    };
    let mut out = line(headers.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

pub fn render_csv(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("records serialize")
}

fn compact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("records serialize")
}

pub fn render_atlas(genus: u32, quotient_genus: Option<u32>) -> Result<Rendered> {
    let table = atlas_table(genus)?;
    let keep = |a: u32| quotient_genus.is_none_or(|q| q == a);
    let records: Vec<AtlasRecord> = table
        .rows
        .iter()
        .filter(|r| keep(r.quotient_genus))
        .map(AtlasRecord::from)
        .collect();
    let mut rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.quotient_genus.to_string(),
                r.group.label(),
                r.profile.clone(),
                r.status.clone(),
                r.reference_row.clone().unwrap_or_default(),
                compact(&r.witness),
            ]
        })
        .collect();
    let missing: Vec<_> = table.missing.iter().filter(|m| keep(m.quotient_genus)).collect();
    for m in &missing {
        let support: Vec<String> = m.support.iter().map(|c| c.to_string()).collect();
        rows.push(vec![
            m.quotient_genus.to_string(),
            m.group.label(),
            format!("support {{{}}}", support.join(",")),
            "missing".into(),
            m.row.clone(),
            String::new(),
        ]);
    }
    let json = json!({
        "genus": genus,
        "rows": records,
        "missing": missing.iter().map(|m| json!({
            "row": m.row,
            "quotient_genus": m.quotient_genus,
            "group": m.group,
            "support": m.support,
            "source": m.source,
        })).collect::<Vec<_>>(),
    });
    Ok(Rendered {
        headers: vec!["g(A)", "G", "profile", "status", "reference", "witness"],
        rows,
        json,
    })
}

pub fn render_covers(args: &CoversArgs) -> Result<Rendered> {
    let group = &args.group;
    let dims = args
        .dims
        .iter()
        .map(|(c, d)| Ok((group.character(c)?, *d)))
        .collect::<Result<Vec<_>>>()?;
    let constraints = CoverConstraints {
        genus: args.genus,
        max_branch_points: args.max_points,
        dims,
        dedup: if args.up_to_automorphism {
            Dedup::Automorphisms
        } else {
            Dedup::None
        },
        one_twist_per_branch: !args.all_twists,
    };
    let covers = enumerate_covers(group, args.base_genus, &constraints)?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for c in &covers {
        let genus = c.genus()?;
        let spec: CoverSpec = c.to_spec();
        rows.push(vec![
            genus.to_string(),
            c.branch_points().to_string(),
            branch_text(c),
            c.twist().iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" "),
            c.profile().to_string(),
        ]);
        records.push(json!({
            "group": group,
            "cover": spec,
            "genus": genus,
            "profile": c.profile().to_string(),
        }));
    }
    Ok(Rendered {
        headers: vec!["genus", "points", "branch", "twist", "profile"],
        rows,
        json: serde_json::Value::Array(records),
    })
}

fn branch_text(c: &CoverData) -> String {
    c.branch()
        .iter()
        .map(|e| format!("{}^{}", e.elem, e.mult))
        .collect::<Vec<_>>()
        .join(" ")
}

fn family_rows(families: &[FamilyRow]) -> Vec<Vec<String>> {
    families
        .iter()
        .map(|f| {
            let r = FamilyRecord::from(f);
            let (g_d, k2, t) = match f.fit {
                Some(_) => (r.g_d, r.k2, r.t),
                None => {
                    let at = |v: &dyn Fn(&crate::classifier::FamilyMember) -> String| {
                        f.members
                            .iter()
                            .map(|m| format!("{} (p_g={})", v(m), m.p_g))
                            .collect::<Vec<_>>()
                            .join(", ")
                    };
                    (
                        at(&|m| m.g_d.to_string()),
                        at(&|m| m.k2.to_string()),
                        at(&|m| m.t_z.to_string()),
                    )
                }
            };
            vec![
                f.group.label(),
                f.a.to_string(),
                f.b.to_string(),
                f.g_f.to_string(),
                g_d,
                k2,
                t,
            ]
        })
        .collect()
}

pub const FAMILY_HEADERS: [&str; 7] = ["G", "g(A)", "g(B)", "g(F)", "g(D)", "K²", "t"];
pub const DISCREPANCY_HEADERS: [&str; 7] = ["table", "row", "kind", "field", "reference", "computed", "delta"];

fn discrepancy_rows(c: &Comparison) -> Vec<Vec<String>> {
    c.discrepancies
        .iter()
        .map(|d| {
            vec![
                d.table.clone(),
                d.row.clone(),
                compact(&d.kind).trim_matches('"').to_string(),
                d.field.clone(),
                d.reference.clone(),
                d.computed.clone(),
                d.delta.clone(),
            ]
        })
        .collect()
}

fn comparison_text(c: &Comparison, format: Format) -> String {
    let rows = discrepancy_rows(c);
    match format {
        Format::Table => {
            let exact = c.exact_rows();
            let mut s = format!(
                "comparison with {}: {} rows paired, {} exact, {} discrepancies\n",
                c.table,
                c.matches.len(),
                exact.len(),
                c.discrepancies.len()
            );
            if !rows.is_empty() {
                s.push_str(&render_table(&DISCREPANCY_HEADERS, &rows));
            }
            s
        }
        Format::Csv => render_csv(&DISCREPANCY_HEADERS, &rows),
        Format::Json => unreachable!("json output is assembled by the caller"),
    }
}

fn emit_warnings(families: &[FamilyRow], err: &mut dyn Write) {
    for f in families {
        for m in &f.members {
            for w in &m.warnings {
                let _ = writeln!(err, "warning: {} p_g={} g(D)={}: {w}", f.group.label(), m.p_g, m.g_d);
            }
        }
    }
}

fn run_classify(args: &ClassifyArgs, workers: Option<usize>, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    if args.genus_f > 3 && !args.unverified {
        return Err(Error::InvalidInput(format!(
            "fibre genus {} is outside the checked range 2..3; pass --unverified to search it anyway",
            args.genus_f
        )));
    }
    let groups = if args.groups.iter().any(|g| matches!(g, GroupChoice::All)) {
        Vec::new()
    } else {
        args.groups
            .iter()
            .filter_map(|g| match g {
                GroupChoice::One(g) => Some(g.clone()),
                GroupChoice::All => None,
            })
            .collect()
    };
    let mut req = ClassifyRequest::new(args.genus_f, groups, &args.base_a.0, &args.base_b.0, args.pg.clone());
    req.workers = workers;
    let families = classify(&req)?;
    emit_warnings(&families, err);
    let comparison = match &args.compare {
        Some(id) => Some(compare_families(&families, &req, id)?),
        None => None,
    };
    let rows = family_rows(&families);
    let text = match args.format {
        Format::Json => {
            let records: Vec<FamilyRecord> = families.iter().map(FamilyRecord::from).collect();
            let mut v = json!({ "families": records });
            if let Some(c) = &comparison {
                v["comparison"] = to_json(c);
            }
            let mut s = serde_json::to_string_pretty(&v).expect("records serialize");
            s.push('\n');
            s
        }
        f => {
            let mut s = match f {
                Format::Table => render_table(&FAMILY_HEADERS, &rows),
                _ => render_csv(&FAMILY_HEADERS, &rows),
            };
            if let Some(c) = &comparison {
                s.push('\n');
                s.push_str(&comparison_text(c, f));
            }
            s
        }
    };
    write_out(out, &text)
}

pub fn read_spec(path: &std::path::Path) -> Result<SandwichSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

pub fn render_invariants(report: &InvariantReport) -> Rendered {
    let sing = report
        .sing
        .iter()
        .map(|s| format!("{}x1/{}(1,{})", s.count, s.n, s.q))
        .collect::<Vec<_>>()
        .join(" ");
    let chi0 = report
        .canonical_character
        .as_ref()
        .map(|c| c.to_string())
        .unwrap_or_else(|| "-".into());
    let values = vec![
        report.p_g.to_string(),
        report.q.to_string(),
        report.chi.to_string(),
        report.euler_e.to_string(),
        report.k2.to_string(),
        report.t_z.to_string(),
        sing,
        chi0,
    ];
    Rendered {
        headers: vec!["p_g", "q", "chi", "euler_e", "K2", "t_z", "sing", "canonical_character"],
        rows: vec![values],
        json: to_json(report),
    }
}

fn run_invariants(args: &InvariantsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let spec = read_spec(&args.spec_file)?;
    let surface = SandwichSurface::from_spec(&spec)?;
    let report = surface.invariants()?;
    for w in report.soft_warnings() {
        let _ = writeln!(err, "warning: {w}");
    }
    let r = render_invariants(&report);
    let text = match args.format {
        Format::Table => {
            // one field per line reads better for a single report
            let rows: Vec<Vec<String>> = r
                .headers
                .iter()
                .zip(&r.rows[0])
                .map(|(h, v)| vec![h.to_string(), v.clone()])
                .collect();
            let mut s = format!("{surface}\n");
            s.push_str(&render_table(&["field", "value"], &rows));
            s
        }
        f => r.render(f),
    };
    write_out(out, &text)
}

fn run_compare(args: &CompareArgs, workers: Option<usize>, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let comparison = match reference::table(&args.table_id)? {
        Table::Actions(t) => compare_atlas(&atlas_table(t.genus)?)?,
        Table::Families(t) => {
            let mut merged = Comparison {
                table: t.id.clone(),
                ..Default::default()
            };
            for mut req in request_for_table(t, args.pg.clone()) {
                req.workers = workers;
                let families = classify(&req)?;
                emit_warnings(&families, err);
                let c = compare_families(&families, &req, &t.id)?;
                merged.matches.extend(c.matches);
                merged.discrepancies.extend(c.discrepancies);
            }
            merged
        }
    };
    let text = match args.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&comparison).expect("records serialize");
            s.push('\n');
            s
        }
        f => comparison_text(&comparison, f),
    };
    write_out(out, &text)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::Capability(format!("cannot write output: {e}")))
}

/// Parse `argv` (program name first), run the command and return the exit code.
pub fn parse_and_run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match run(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let workers = workers_from_env()?;
    match &cli.command {
        Command::Atlas(a) => {
            let r = with_workers(workers, || render_atlas(a.genus, a.quotient_genus))??;
            write_out(out, &r.render(a.format))
        }
        Command::Covers(c) => {
            let r = with_workers(workers, || render_covers(c))??;
            write_out(out, &r.render(c.format))
        }
        Command::Classify(c) => run_classify(c, workers, out, err),
        Command::Invariants(i) => run_invariants(i, out, err),
        Command::Compare(c) => run_compare(c, workers, out, err),
    }
}
