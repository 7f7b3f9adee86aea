//! Search for sandwich surfaces whose canonical map factors through the
//! isotrivial pencil, grouped into families in `p_g`, and comparison with
//! the embedded reference tables.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::atlas::{abelian_groups_up_to, AtlasTable};
use crate::cover::{enumerate_covers, enumerate_covers_up_to, CoverConstraints, CoverData, CoverSpec, Dedup};
use crate::error::{Error, Result};
use crate::group::{Automorphism, CharacterIndex, FiniteAbelianGroup, GroupElement};
use crate::linear::LinearForm;
use crate::parallel::with_workers;
use crate::reference::{self, FamilyRef, FamilyTable, Table};
use crate::sandwich::{InvariantReport, SandwichSurface, SingularityRecord};

/// Base genera tried when a request says "any".
pub const ANY_BASE_A: [u32; 3] = [0, 1, 2];
pub const ANY_BASE_B: [u32; 2] = [0, 1];

#[derive(Clone, Debug)]
pub struct ClassifyRequest {
    pub genus_f: u32,
    /// empty means every Abelian group of order at most `4·g_F + 4`
    pub groups: Vec<FiniteAbelianGroup>,
    pub base_a: Vec<u32>,
    pub base_b: Vec<u32>,
    pub pg: RangeInclusive<u64>,
    pub workers: Option<usize>,
}

impl ClassifyRequest {
    pub fn new(genus_f: u32, groups: Vec<FiniteAbelianGroup>, a: &[u32], b: &[u32], pg: RangeInclusive<u64>) -> Self {
        ClassifyRequest {
            genus_f,
            groups,
            base_a: a.to_vec(),
            base_b: b.to_vec(),
            pg,
            workers: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(2..=5).contains(&self.genus_f) {
            return Err(Error::InvalidInput(format!(
                "fibre genus must be between 2 and 5, got {}",
                self.genus_f
            )));
        }
        if self.pg.is_empty() || *self.pg.start() < 2 {
            return Err(Error::InvalidInput(format!(
                "p_g range must be nonempty and start at 2 or more, got {}..{}",
                self.pg.start(),
                self.pg.end()
            )));
        }
        if self.base_a.is_empty() || self.base_b.is_empty() {
            return Err(Error::InvalidInput("no base genera requested".into()));
        }
        Ok(())
    }

    fn group_list(&self) -> Vec<FiniteAbelianGroup> {
        if self.groups.is_empty() {
            abelian_groups_up_to(4 * self.genus_f as usize + 4)
        } else {
            self.groups.clone()
        }
    }

    /// The `(group, a, b)` cells covered by this request.
    pub fn cells(&self) -> BTreeSet<(Vec<u32>, u32, u32)> {
        let mut out = BTreeSet::new();
        for g in self.group_list() {
            for &a in &self.base_a {
                for &b in &self.base_b {
                    out.insert((g.factors().to_vec(), a, b));
                }
            }
        }
        out
    }
}

/// One canonical-pencil surface at a fixed `p_g`.
#[derive(Clone, Debug)]
pub struct Solution {
    pub surface: SandwichSurface,
    pub report: InvariantReport,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct FamilyMember {
    pub p_g: u64,
    pub g_d: u64,
    pub k2: i64,
    pub t_z: u64,
    pub sing: Vec<SingularityRecord>,
    pub cover_d: CoverData,
    pub report: InvariantReport,
    pub warnings: Vec<String>,
}

/// Exact linear forms in `p = p_g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FamilyFit {
    pub g_d: LinearForm,
    pub k2: LinearForm,
    pub t_z: LinearForm,
}

impl FamilyFit {
    /// The same forms in `m = p_g + 1`.
    pub fn in_m(&self) -> FamilyFit {
        FamilyFit {
            g_d: self.g_d.shifted(-1),
            k2: self.k2.shifted(-1),
            t_z: self.t_z.shifted(-1),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FamilyRow {
    pub group: FiniteAbelianGroup,
    pub a: u32,
    pub b: u32,
    pub g_f: u64,
    pub cover_f: CoverData,
    pub canonical_character: CharacterIndex,
    /// branch element whose multiplicity on `D` grows with `p_g`
    pub growth: Option<GroupElement>,
    pub members: Vec<FamilyMember>,
    pub fit: Option<FamilyFit>,
}

impl FamilyRow {
    pub fn p_g_values(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.p_g).collect()
    }

    pub fn member(&self, p_g: u64) -> Option<&FamilyMember> {
        self.members.iter().find(|m| m.p_g == p_g)
    }
}

/// Flat record used for rendering; forms are in `m = p_g + 1`.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyRecord {
    pub group: FiniteAbelianGroup,
    pub a: u32,
    pub b: u32,
    pub g_f: u64,
    pub p_g: String,
    pub g_d: String,
    #[serde(rename = "K2")]
    pub k2: String,
    pub t: String,
    pub canonical_character: CharacterIndex,
    pub cover_f: CoverSpec,
    pub growth: Option<GroupElement>,
    pub members: Vec<MemberRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MemberRecord {
    pub p_g: u64,
    pub g_d: u64,
    #[serde(rename = "K2")]
    pub k2: i64,
    pub t_z: u64,
    pub sing: Vec<SingularityRecord>,
    pub cover_d: CoverSpec,
}

impl From<&FamilyRow> for FamilyRecord {
    fn from(f: &FamilyRow) -> Self {
        let (p_g, g_d, k2, t) = match f.fit {
            Some(fit) => {
                let m = fit.in_m();
                (
                    "m-1".to_string(),
                    m.g_d.to_string(),
                    m.k2.to_string(),
                    m.t_z.to_string(),
                )
            }
            None => {
                let list = |v: Vec<String>| v.join("/");
                (
                    list(f.members.iter().map(|m| m.p_g.to_string()).collect()),
                    list(f.members.iter().map(|m| m.g_d.to_string()).collect()),
                    list(f.members.iter().map(|m| m.k2.to_string()).collect()),
                    list(f.members.iter().map(|m| m.t_z.to_string()).collect()),
                )
            }
        };
        FamilyRecord {
            group: f.group.clone(),
            a: f.a,
            b: f.b,
            g_f: f.g_f,
            p_g,
            g_d,
            k2,
            t,
            canonical_character: f.canonical_character.clone(),
            cover_f: f.cover_f.to_spec(),
            growth: f.growth.clone(),
            members: f
                .members
                .iter()
                .map(|m| MemberRecord {
                    p_g: m.p_g,
                    g_d: m.g_d,
                    k2: m.k2,
                    t_z: m.t_z,
                    sing: m.sing.clone(),
                    cover_d: m.cover_d.to_spec(),
                })
                .collect(),
        }
    }
}

/// One unit of parallel work: a fixed `F`, `χ₀`, base genus of `D` and `p_g`.
struct Cell {
    group: FiniteAbelianGroup,
    cover_f: CoverData,
    chi0: CharacterIndex,
    stabilizer: Vec<Automorphism>,
    b: u32,
    p_g: u64,
}

fn f_covers(group: &FiniteAbelianGroup, g_f: u32, a: u32) -> Result<Vec<CoverData>> {
    let constraints = CoverConstraints {
        genus: Some(g_f as u64),
        dedup: Dedup::Automorphisms,
        one_twist_per_branch: true,
        ..Default::default()
    };
    enumerate_covers(group, a, &constraints)
}

fn stabilizer_of_cover(cover: &CoverData, auts: &[Automorphism]) -> Vec<Automorphism> {
    auts.iter()
        .filter(|s| cover.transform(s).branch() == cover.branch())
        .cloned()
        .collect()
}

fn cells_for(req: &ClassifyRequest) -> Result<Vec<Cell>> {
    let mut cells = Vec::new();
    for group in req.group_list() {
        let auts = group.automorphisms()?;
        for &a in &req.base_a {
            for cover_f in f_covers(&group, req.genus_f, a)? {
                let stab_f = stabilizer_of_cover(&cover_f, &auts);
                let profile = cover_f.profile();
                for (idx, &d) in profile.dims().iter().enumerate() {
                    // one χ₀ per orbit of the stabilizer of F
                    if d != 1 || stab_f.iter().any(|s| s.apply_character_index(idx) < idx) {
                        continue;
                    }
                    let chi0 = group.character_at(idx);
                    let stabilizer: Vec<Automorphism> = stab_f
                        .iter()
                        .filter(|s| s.apply_character_index(idx) == idx)
                        .cloned()
                        .collect();
                    for &b in &req.base_b {
                        for p_g in req.pg.clone() {
                            cells.push(Cell {
                                group: group.clone(),
                                cover_f: cover_f.clone(),
                                chi0: chi0.clone(),
                                stabilizer: stabilizer.clone(),
                                b,
                                p_g,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(cells)
}

fn solve_cell(cell: &Cell) -> Result<Vec<Solution>> {
    let g = &cell.group;
    let profile = cell.cover_f.profile();
    let mut dims = Vec::new();
    for (chi, _) in profile.nonzero() {
        if chi != cell.chi0 {
            dims.push((g.inverse_character(&chi), 0));
        }
    }
    dims.push((g.inverse_character(&cell.chi0), cell.p_g));
    let constraints = CoverConstraints {
        dims,
        one_twist_per_branch: true,
        ..Default::default()
    };
    let ds = enumerate_covers_up_to(g, cell.b, &constraints, Some(&cell.stabilizer))?;
    let mut out = Vec::new();
    for d in ds {
        if d.genus()? < 2 {
            continue;
        }
        let surface = SandwichSurface::new(cell.cover_f.clone(), d)?;
        if surface.canonical_character()? != Some(cell.chi0.clone()) {
            return Err(Error::InternalConsistency(format!(
                "{surface} passed the degree constraints but fails the pencil criterion"
            )));
        }
        let report = surface.invariants()?;
        if report.p_g != cell.p_g {
            return Err(Error::InternalConsistency(format!(
                "{surface} was searched at p_g = {} but has p_g = {}",
                cell.p_g, report.p_g
            )));
        }
        let warnings = report.soft_warnings();
        out.push(Solution {
            surface,
            report,
            warnings,
        });
    }
    Ok(out)
}

/// Every canonical-pencil sandwich in the requested range, one per
/// isomorphism class of branch data, grouped into families.
pub fn classify(req: &ClassifyRequest) -> Result<Vec<FamilyRow>> {
    req.validate()?;
    with_workers(req.workers, || -> Result<Vec<FamilyRow>> {
        let cells = cells_for(req)?;
        let solved: Vec<Vec<Solution>> = cells.par_iter().map(solve_cell).collect::<Result<_>>()?;
        Ok(group_families(cells.iter().zip(solved)))
    })?
}

/// Elements killed by every character of `F`'s support other than `χ₀`.
fn free_kernel(cover_f: &CoverData, chi0: &CharacterIndex) -> Vec<GroupElement> {
    let g = cover_f.group();
    let support: Vec<CharacterIndex> = cover_f
        .profile()
        .nonzero()
        .into_iter()
        .map(|(c, _)| c)
        .filter(|c| c != chi0)
        .collect();
    g.elements()
        .into_iter()
        .filter(|h| !h.is_zero() && support.iter().all(|c| g.pairing_numerator(c, h) == 0))
        .collect()
}

fn growth_element(kernel: &[GroupElement], d: &CoverData) -> Option<GroupElement> {
    match kernel {
        [] => None,
        [only] => Some(only.clone()),
        _ => {
            let mut best: Option<(u32, &GroupElement)> = None;
            for h in kernel {
                let m = d.multiplicity(h);
                if best.is_none_or(|(bm, _)| m > bm) {
                    best = Some((m, h));
                }
            }
            best.map(|(_, h)| h.clone())
        }
    }
}

type KernelCache = BTreeMap<(Vec<(usize, u32)>, usize), Vec<GroupElement>>;
type Pass<'a> = &'a dyn Fn(usize, &Signature) -> Option<(i64, u64)>;
type CellSets = (BTreeSet<Vec<u32>>, BTreeSet<u32>, BTreeSet<u32>);

type FamilyKey = (Vec<u32>, u32, u32, Vec<(usize, u32)>, usize, Vec<(usize, u32)>);

fn group_families<'a>(solved: impl Iterator<Item = (&'a Cell, Vec<Solution>)>) -> Vec<FamilyRow> {
    let mut families: BTreeMap<FamilyKey, FamilyRow> = BTreeMap::new();
    let mut kernels: KernelCache = BTreeMap::new();
    for (cell, solutions) in solved {
        let g = &cell.group;
        let f_key: Vec<(usize, u32)> = cell
            .cover_f
            .branch()
            .iter()
            .map(|e| (g.index_of(&e.elem), e.mult))
            .collect();
        let chi_idx = g.character_index_of(&cell.chi0);
        let kernel = kernels
            .entry((f_key.clone(), chi_idx))
            .or_insert_with(|| free_kernel(&cell.cover_f, &cell.chi0))
            .clone();
        for s in solutions {
            let d = s.surface.cover_d().clone();
            let growth = growth_element(&kernel, &d);
            let d_key: Vec<(usize, u32)> = d
                .branch()
                .iter()
                .filter(|e| Some(&e.elem) != growth.as_ref())
                .map(|e| (g.index_of(&e.elem), e.mult))
                .collect();
            let key = (
                g.factors().to_vec(),
                cell.cover_f.base_genus(),
                cell.b,
                f_key.clone(),
                chi_idx,
                d_key,
            );
            let row = families.entry(key).or_insert_with(|| FamilyRow {
                group: g.clone(),
                a: cell.cover_f.base_genus(),
                b: cell.b,
                g_f: s.surface.genus_f(),
                cover_f: cell.cover_f.clone(),
                canonical_character: cell.chi0.clone(),
                growth: growth.clone(),
                members: Vec::new(),
                fit: None,
            });
            row.members.push(FamilyMember {
                p_g: s.report.p_g,
                g_d: s.surface.genus_d(),
                k2: s.report.k2,
                t_z: s.report.t_z,
                sing: s.report.sing.clone(),
                cover_d: d,
                report: s.report,
                warnings: s.warnings,
            });
        }
    }
    let mut rows: Vec<FamilyRow> = families.into_values().collect();
    for row in rows.iter_mut() {
        row.members.sort_by_key(|m| m.p_g);
        row.fit = fit_families(&row.members);
    }
    rows
}

/// Exact linear forms in `p_g` through the longest run of consecutive
/// `p_g` values, if it has at least three points and every field is linear.
pub fn fit_families(members: &[FamilyMember]) -> Option<FamilyFit> {
    let mut best: &[FamilyMember] = &[];
    let mut start = 0;
    for i in 1..=members.len() {
        if i == members.len() || members[i].p_g != members[i - 1].p_g + 1 {
            if i - start > best.len() {
                best = &members[start..i];
            }
            start = i;
        }
    }
    if best.len() < 3 {
        return None;
    }
    let fit = |f: &dyn Fn(&FamilyMember) -> i64| {
        LinearForm::fit(&best.iter().map(|m| (m.p_g as i64, f(m))).collect::<Vec<_>>())
    };
    Some(FamilyFit {
        g_d: fit(&|m| m.g_d as i64)?,
        k2: fit(&|m| m.k2)?,
        t_z: fit(&|m| m.t_z as i64)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscrepancyKind {
    Mismatch,
    Missing,
    Extra,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscrepancyReport {
    pub table: String,
    pub row: String,
    pub kind: DiscrepancyKind,
    pub field: String,
    pub reference: String,
    pub computed: String,
    pub delta: String,
}

/// A reference row and the engine family signature it was paired with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowMatch {
    pub row: String,
    pub exact: bool,
    /// computed p_g minus reference p_g for the paired family
    pub p_g_shift: i64,
    pub g_d: String,
    #[serde(rename = "K2")]
    pub k2: String,
    pub t: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Comparison {
    pub table: String,
    pub matches: Vec<RowMatch>,
    pub discrepancies: Vec<DiscrepancyReport>,
}

impl Comparison {
    pub fn records_for_row(&self, row: &str) -> Vec<&DiscrepancyReport> {
        self.discrepancies.iter().filter(|d| d.row == row).collect()
    }

    pub fn exact_rows(&self) -> Vec<&str> {
        self.matches
            .iter()
            .filter(|m| m.exact)
            .map(|m| m.row.as_str())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Signature {
    group: usize,
    a: u32,
    b: u32,
    g_f: u64,
    fit: FamilyFit,
}

/// Compare classifier families with a family table. Only reference rows in
/// cells covered by `req` take part.
pub fn compare_families(families: &[FamilyRow], req: &ClassifyRequest, table_id: &str) -> Result<Comparison> {
    let table = match reference::table(table_id)? {
        Table::Families(t) => t,
        Table::Actions(_) => {
            return Err(Error::InvalidInput(format!(
                "{table_id} is an action table; compare it with an atlas"
            )))
        }
    };
    Ok(compare_with_family_table(families, req, table))
}

fn compare_with_family_table(families: &[FamilyRow], req: &ClassifyRequest, table: &FamilyTable) -> Comparison {
    let cells = req.cells();
    let in_scope = |g: &FiniteAbelianGroup, a: u32, b: u32, g_f: u64| {
        g_f == req.genus_f as u64 && cells.contains(&(g.factors().to_vec(), a, b))
    };
    let mut groups: Vec<FiniteAbelianGroup> = Vec::new();
    let mut group_id = |g: &FiniteAbelianGroup| match groups.iter().position(|x| x == g) {
        Some(i) => i,
        None => {
            groups.push(g.clone());
            groups.len() - 1
        }
    };

    let refs: Vec<&FamilyRef> = table
        .rows
        .iter()
        .filter(|r| in_scope(&r.group, r.a, r.b, r.g_f as u64))
        .collect();
    let ref_cells: Vec<(usize, u32, u32, u64)> = refs
        .iter()
        .map(|r| (group_id(&r.group), r.a, r.b, r.g_f as u64))
        .collect();

    let mut sigs: BTreeSet<Signature> = BTreeSet::new();
    let mut unfitted: Vec<&FamilyRow> = Vec::new();
    for f in families {
        if !in_scope(&f.group, f.a, f.b, f.g_f) {
            continue;
        }
        match f.fit {
            Some(fit) => {
                sigs.insert(Signature {
                    group: group_id(&f.group),
                    a: f.a,
                    b: f.b,
                    g_f: f.g_f,
                    fit,
                });
            }
            None => unfitted.push(f),
        }
    }
    let sigs: Vec<Signature> = sigs.into_iter().collect();

    let same_cell = |i: usize, s: &Signature| {
        let (g, a, b, gf) = ref_cells[i];
        s.group == g && s.a == a && s.b == b && s.g_f == gf
    };
    let field_eq = |r: &FamilyRef, want: &Option<LinearForm>, got: LinearForm| want.is_none_or(|w| r.in_pg(&w) == got);
    let exact = |i: usize, s: &Signature| {
        let r = refs[i];
        same_cell(i, s) && r.in_pg(&r.g_d) == s.fit.g_d && field_eq(r, &r.k2, s.fit.k2) && field_eq(r, &r.t, s.fit.t_z)
    };
    // distance between the remaining fields, for breaking ties
    let closeness = |i: usize, s: &Signature| {
        let r = refs[i];
        let dist = |want: &Option<LinearForm>, got: LinearForm| {
            want.map_or(0, |w| {
                let d = r.in_pg(&w).sub(&got);
                d.slope.unsigned_abs() * 1000 + d.intercept.unsigned_abs()
            })
        };
        dist(&r.k2, s.fit.k2) + dist(&r.t, s.fit.t_z)
    };
    // a candidate pairing yields the p_g shift and a cost, lower is better
    let g_d_equal = |i: usize, s: &Signature| {
        (same_cell(i, s) && refs[i].in_pg(&refs[i].g_d) == s.fit.g_d).then(|| (0, closeness(i, s)))
    };
    let shifted_pg = |i: usize, s: &Signature| {
        let r = refs[i];
        let want = r.in_pg(&r.g_d);
        let slope = s.fit.g_d.slope;
        if !same_cell(i, s) || want.slope != slope || slope == 0 {
            return None;
        }
        let diff = want.intercept - s.fit.g_d.intercept;
        if diff == 0 || diff % slope != 0 {
            return None;
        }
        let shift = diff / slope;
        let k2_ok = r.k2.is_none_or(|w| r.in_pg(&w) == s.fit.k2.shifted(shift));
        k2_ok.then_some((shift, 0))
    };
    let nearest = |i: usize, s: &Signature| {
        let want = refs[i].in_pg(&refs[i].g_d);
        (same_cell(i, s) && want.slope == s.fit.g_d.slope).then(|| {
            (
                0,
                want.intercept.abs_diff(s.fit.g_d.intercept) * 1_000_000 + closeness(i, s),
            )
        })
    };
    let any_in_cell = |i: usize, s: &Signature| same_cell(i, s).then_some((0, 0));
    let exact_pass = |i: usize, s: &Signature| exact(i, s).then_some((0, 0));

    let mut pair: Vec<Option<(usize, i64)>> = vec![None; refs.len()];
    let mut used = vec![false; sigs.len()];
    let passes: [Pass; 5] = [&exact_pass, &g_d_equal, &shifted_pg, &nearest, &any_in_cell];
    for pass in passes {
        for (i, slot) in pair.iter_mut().enumerate() {
            if slot.is_some() {
                continue;
            }
            let best = (0..sigs.len())
                .filter(|&j| !used[j])
                .filter_map(|j| pass(i, &sigs[j]).map(|(shift, cost)| (cost, j, shift)))
                .min();
            if let Some((_, j, shift)) = best {
                *slot = Some((j, shift));
                used[j] = true;
            }
        }
    }

    let mut out = Comparison {
        table: table.id.clone(),
        ..Default::default()
    };
    let push =
        |out: &mut Comparison, row: &str, kind, field: &str, reference: String, computed: String, delta: String| {
            out.discrepancies.push(DiscrepancyReport {
                table: table.id.clone(),
                row: row.to_string(),
                kind,
                field: field.to_string(),
                reference,
                computed,
                delta,
            })
        };
    for (i, r) in refs.iter().enumerate() {
        let Some((j, shift)) = pair[i] else {
            push(
                &mut out,
                &r.row,
                DiscrepancyKind::Missing,
                "row",
                r.source.clone(),
                "no computed family".into(),
                String::new(),
            );
            continue;
        };
        let s = &sigs[j];
        // computed forms at the paired p_g, rewritten in the row's own parameter
        let off = r.pg_offset() + shift;
        let comp = FamilyFit {
            g_d: s.fit.g_d.shifted(off),
            k2: s.fit.k2.shifted(off),
            t_z: s.fit.t_z.shifted(off),
        };
        if shift != 0 {
            let got = LinearForm::new(1, r.p_g.intercept + shift);
            push(
                &mut out,
                &r.row,
                DiscrepancyKind::Mismatch,
                "p_g",
                r.p_g.to_string(),
                got.to_string(),
                shift.to_string(),
            );
        }
        out.matches.push(RowMatch {
            row: r.row.clone(),
            exact: shift == 0 && exact(i, s),
            p_g_shift: shift,
            g_d: comp.g_d.to_string(),
            k2: comp.k2.to_string(),
            t: comp.t_z.to_string(),
        });
        for (field, want, got) in [
            ("g_D", Some(r.g_d), comp.g_d),
            ("K2", r.k2, comp.k2),
            ("t", r.t, comp.t_z),
        ] {
            if let Some(w) = want {
                if w != got {
                    push(
                        &mut out,
                        &r.row,
                        DiscrepancyKind::Mismatch,
                        field,
                        w.to_string(),
                        got.to_string(),
                        got.sub(&w).to_string(),
                    );
                }
            }
        }
    }
    let off = table.p_g_default.intercept;
    for (j, s) in sigs.iter().enumerate() {
        if used[j] {
            continue;
        }
        let g = &groups[s.group];
        push(
            &mut out,
            "-",
            DiscrepancyKind::Extra,
            "row",
            String::new(),
            format!(
                "{} g(A)={} g(B)={} g(F)={} p_g={} g(D)={} K²={} t={}",
                g.label(),
                s.a,
                s.b,
                s.g_f,
                table.p_g_default,
                s.fit.g_d.shifted(off),
                s.fit.k2.shifted(off),
                s.fit.t_z.shifted(off)
            ),
            String::new(),
        );
    }
    for f in unfitted {
        let pts: Vec<String> = f
            .members
            .iter()
            .map(|m| format!("p_g={} g(D)={} K²={} t={}", m.p_g, m.g_d, m.k2, m.t_z))
            .collect();
        push(
            &mut out,
            "-",
            DiscrepancyKind::Extra,
            "row",
            String::new(),
            format!(
                "{} g(A)={} g(B)={} g(F)={} unfitted: {}",
                f.group.label(),
                f.a,
                f.b,
                f.g_f,
                pts.join("; ")
            ),
            String::new(),
        );
    }
    out
}

/// Compare an atlas with its reference action table: every unmatched
/// reference row is missing, every unflagged atlas row is extra.
pub fn compare_atlas(atlas: &AtlasTable) -> Result<Comparison> {
    let table = reference::action_table_for_genus(atlas.genus)
        .ok_or_else(|| Error::InvalidInput(format!("no reference action table for genus {}", atlas.genus)))?;
    let mut out = Comparison {
        table: table.id.clone(),
        ..Default::default()
    };
    for r in &table.rows {
        if atlas.missing.iter().any(|m| m.row == r.row) {
            out.discrepancies.push(DiscrepancyReport {
                table: table.id.clone(),
                row: r.row.clone(),
                kind: DiscrepancyKind::Missing,
                field: "row".into(),
                reference: r.source.clone(),
                computed: "no action with this support".into(),
                delta: String::new(),
            });
        } else {
            out.matches.push(RowMatch {
                row: r.row.clone(),
                exact: true,
                p_g_shift: 0,
                g_d: String::new(),
                k2: String::new(),
                t: String::new(),
            });
        }
    }
    for row in atlas.rows.iter().filter(|r| r.reference_row.is_none()) {
        out.discrepancies.push(DiscrepancyReport {
            table: table.id.clone(),
            row: "-".into(),
            kind: DiscrepancyKind::Extra,
            field: "row".into(),
            reference: String::new(),
            computed: format!("g(A)={} {} {}", row.quotient_genus, row.group.label(), row.profile),
            delta: String::new(),
        });
    }
    Ok(out)
}

/// The request whose cells cover every row of a family table.
pub fn request_for_table(table: &FamilyTable, pg: RangeInclusive<u64>) -> Vec<ClassifyRequest> {
    let mut by_genus: BTreeMap<u32, CellSets> = BTreeMap::new();
    for r in &table.rows {
        let e = by_genus.entry(r.g_f).or_default();
        e.0.insert(r.group.factors().to_vec());
        e.1.insert(r.a);
        e.2.insert(r.b);
    }
    by_genus
        .into_iter()
        .map(|(g_f, (groups, a, b))| {
            ClassifyRequest::new(
                g_f,
                groups
                    .into_iter()
                    .map(|f| FiniteAbelianGroup::new(&f).expect("table groups are valid"))
                    .collect(),
                &a.into_iter().collect::<Vec<_>>(),
                &b.into_iter().collect::<Vec<_>>(),
                pg.clone(),
            )
        })
        .collect()
}
