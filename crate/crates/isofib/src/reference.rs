//! Published classification tables, embedded as data.
//!
//! Action tables list, per row, the characters whose eigenspace is nonzero.
//! Family tables give linear forms in the table's own parameter `m`; each
//! row carries its `p_g` as a form in `m` so rows can be compared on a
//! common footing.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::group::{CharacterIndex, FiniteAbelianGroup};
use crate::linear::LinearForm;

const DATA: &str = include_str!("../data/reference_tables.json");

#[derive(Clone, Debug)]
pub struct ActionTable {
    pub id: String,
    pub genus: u32,
    pub rows: Vec<ActionRef>,
}

#[derive(Clone, Debug)]
pub struct ActionRef {
    pub row: String,
    pub quotient_genus: u32,
    pub group: FiniteAbelianGroup,
    pub support: Vec<CharacterIndex>,
    pub source: String,
}

#[derive(Clone, Debug)]
pub struct FamilyTable {
    pub id: String,
    /// `p_g` of the table's generic row, used to render rows it lacks
    pub p_g_default: LinearForm,
    pub rows: Vec<FamilyRef>,
}

#[derive(Clone, Debug)]
pub struct FamilyRef {
    pub row: String,
    pub group: FiniteAbelianGroup,
    pub a: u32,
    pub b: u32,
    pub g_f: u32,
    pub p_g: LinearForm,
    pub g_d: LinearForm,
    pub k2: Option<LinearForm>,
    pub t: Option<LinearForm>,
    pub source: String,
}

impl FamilyRef {
    /// Offset `c` with `p_g = m + c`.
    pub fn pg_offset(&self) -> i64 {
        self.p_g.intercept
    }

    /// A field given in `m`, rewritten in `p = p_g`.
    pub fn in_pg(&self, form: &LinearForm) -> LinearForm {
        form.shifted(-self.pg_offset())
    }
}

pub enum Table<'a> {
    Actions(&'a ActionTable),
    Families(&'a FamilyTable),
}

#[derive(Deserialize)]
struct RawData {
    action_tables: Vec<RawActionTable>,
    family_tables: Vec<RawFamilyTable>,
}

#[derive(Deserialize)]
struct RawActionTable {
    id: String,
    genus: u32,
    rows: Vec<RawActionRow>,
}

#[derive(Deserialize)]
struct RawActionRow {
    row: String,
    a: u32,
    group: Vec<u32>,
    support: Vec<Vec<u32>>,
    source: String,
}

#[derive(Deserialize)]
struct RawFamilyTable {
    id: String,
    p_g_default: String,
    rows: Vec<RawFamilyRow>,
}

#[derive(Deserialize)]
struct RawFamilyRow {
    row: String,
    group: Vec<u32>,
    a: u32,
    b: u32,
    g_f: u32,
    p_g: String,
    g_d: String,
    k2: Option<String>,
    t: Option<String>,
    source: String,
}

struct Tables {
    actions: Vec<ActionTable>,
    families: Vec<FamilyTable>,
}

fn load() -> Result<Tables> {
    let raw: RawData =
        serde_json::from_str(DATA).map_err(|e| Error::InternalConsistency(format!("embedded tables: {e}")))?;
    let mut actions = Vec::new();
    for t in raw.action_tables {
        let mut rows = Vec::new();
        for r in t.rows {
            let group = FiniteAbelianGroup::new(&r.group)?;
            let support = r
                .support
                .iter()
                .map(|c| group.character(c))
                .collect::<Result<Vec<_>>>()?;
            rows.push(ActionRef {
                row: r.row,
                quotient_genus: r.a,
                group,
                support,
                source: r.source,
            });
        }
        actions.push(ActionTable {
            id: t.id,
            genus: t.genus,
            rows,
        });
    }
    let mut families = Vec::new();
    for t in raw.family_tables {
        let mut rows = Vec::new();
        for r in t.rows {
            let p_g: LinearForm = r.p_g.parse()?;
            if p_g.slope != 1 {
                return Err(Error::InternalConsistency(format!(
                    "row {} of {} has p_g = {p_g}",
                    r.row, t.id
                )));
            }
            rows.push(FamilyRef {
                row: r.row,
                group: FiniteAbelianGroup::new(&r.group)?,
                a: r.a,
                b: r.b,
                g_f: r.g_f,
                p_g,
                g_d: r.g_d.parse()?,
                k2: r.k2.map(|s| s.parse()).transpose()?,
                t: r.t.map(|s| s.parse()).transpose()?,
                source: r.source,
            });
        }
        families.push(FamilyTable {
            id: t.id,
            p_g_default: t.p_g_default.parse()?,
            rows,
        });
    }
    Ok(Tables { actions, families })
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| load().expect("embedded reference tables are well formed"))
}

pub fn action_tables() -> &'static [ActionTable] {
    &tables().actions
}

pub fn family_tables() -> &'static [FamilyTable] {
    &tables().families
}

pub fn table_ids() -> Vec<&'static str> {
    action_tables()
        .iter()
        .map(|t| t.id.as_str())
        .chain(family_tables().iter().map(|t| t.id.as_str()))
        .collect()
}

pub fn table(id: &str) -> Result<Table<'static>> {
    if let Some(t) = action_tables().iter().find(|t| t.id == id) {
        return Ok(Table::Actions(t));
    }
    if let Some(t) = family_tables().iter().find(|t| t.id == id) {
        return Ok(Table::Families(t));
    }
    Err(Error::InvalidInput(format!(
        "unknown table {id:?}; known tables: {}",
        table_ids().join(", ")
    )))
}

/// The action table for curves of genus `g`, if one is embedded.
pub fn action_table_for_genus(g: u32) -> Option<&'static ActionTable> {
    action_tables().iter().find(|t| t.genus == g)
}
