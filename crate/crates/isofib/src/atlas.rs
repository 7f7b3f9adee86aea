//! Faithful Abelian actions on curves of small genus.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::cover::{enumerate_covers, CoverConstraints, CoverData, CoverSpec, Dedup, EigenProfile};
use crate::error::{Error, Result};
use crate::group::{Automorphism, CharacterIndex, FiniteAbelianGroup};
use crate::reference::{self, ActionRef};

/// One action up to isomorphism of eigenspace profiles.
#[derive(Clone, Debug)]
pub struct AtlasRow {
    pub quotient_genus: u32,
    pub group: FiniteAbelianGroup,
    /// canonical under automorphisms of the group
    pub profile: EigenProfile,
    pub witness: CoverData,
    /// reference row realised by this action, if any
    pub reference_row: Option<String>,
}

impl AtlasRow {
    pub fn support(&self) -> Vec<CharacterIndex> {
        self.profile.nonzero().into_iter().map(|(c, _)| c).collect()
    }

    pub fn status(&self) -> &'static str {
        if self.reference_row.is_some() {
            "reference"
        } else {
            "extra"
        }
    }
}

#[derive(Clone, Debug)]
pub struct AtlasTable {
    pub genus: u32,
    pub rows: Vec<AtlasRow>,
    /// reference rows with no matching action
    pub missing: Vec<ActionRef>,
}

/// Flat record used for rendering.
#[derive(Clone, Debug, Serialize)]
pub struct AtlasRecord {
    pub quotient_genus: u32,
    pub group: FiniteAbelianGroup,
    pub profile: String,
    pub status: String,
    pub reference_row: Option<String>,
    pub witness: CoverSpec,
}

impl From<&AtlasRow> for AtlasRecord {
    fn from(r: &AtlasRow) -> Self {
        AtlasRecord {
            quotient_genus: r.quotient_genus,
            group: r.group.clone(),
            profile: r.profile.to_string(),
            status: r.status().to_string(),
            reference_row: r.reference_row.clone(),
            witness: r.witness.to_spec(),
        }
    }
}

/// Every Abelian group of order at most `bound`, in invariant-factor form
/// `n₁ | n₂ | … | n_k`, ordered by group order and then by factors.
pub fn abelian_groups_up_to(bound: usize) -> Vec<FiniteAbelianGroup> {
    fn extend(rest: usize, tail: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        // tail holds factors from the largest down; the next must divide the last
        if rest == 1 {
            let mut f = tail.clone();
            f.reverse();
            out.push(f);
            return;
        }
        let limit = tail.last().map_or(rest, |&l| l as usize);
        for d in 2..=limit.min(rest) {
            if rest.is_multiple_of(d) && tail.last().is_none_or(|&l| (l as usize).is_multiple_of(d)) {
                tail.push(d as u32);
                extend(rest / d, tail, out);
                tail.pop();
            }
        }
    }
    let mut groups = Vec::new();
    for n in 2..=bound {
        let mut forms = Vec::new();
        extend(n, &mut Vec::new(), &mut forms);
        forms.sort();
        groups.extend(
            forms
                .into_iter()
                .map(|f| FiniteAbelianGroup::new(&f).expect("factors are at least 2")),
        );
    }
    groups
}

/// All faithful actions of Abelian groups on genus-`g` curves with quotient
/// of genus `a`, one row per eigenspace profile up to automorphisms.
pub fn enumerate_actions(g: u32, a: u32) -> Result<Vec<AtlasRow>> {
    if !(2..=5).contains(&g) {
        return Err(Error::InvalidInput(format!(
            "atlas genus must be between 2 and 5, got {g}"
        )));
    }
    if a > g {
        return Err(Error::InvalidInput(format!(
            "quotient genus {a} exceeds curve genus {g}"
        )));
    }
    let groups = abelian_groups_up_to(4 * g as usize + 4);
    let per_group: Vec<Vec<AtlasRow>> = groups
        .par_iter()
        .map(|group| actions_of(group, g, a))
        .collect::<Result<_>>()?;
    Ok(per_group.into_iter().flatten().collect())
}

fn actions_of(group: &FiniteAbelianGroup, g: u32, a: u32) -> Result<Vec<AtlasRow>> {
    let constraints = CoverConstraints {
        genus: Some(g as u64),
        dedup: Dedup::Automorphisms,
        one_twist_per_branch: true,
        ..Default::default()
    };
    let covers = enumerate_covers(group, a, &constraints)?;
    if covers.is_empty() {
        return Ok(Vec::new());
    }
    let auts = group.automorphisms()?;
    let mut by_profile: BTreeMap<Vec<u64>, (EigenProfile, CoverData)> = BTreeMap::new();
    for cover in covers {
        if cover.genus()? != g as u64 {
            return Err(Error::InternalConsistency(format!("{cover} does not have genus {g}")));
        }
        let profile = cover.profile().canonical(&auts);
        by_profile.entry(profile.dims().to_vec()).or_insert((profile, cover));
    }
    // larger profiles first, matching the lex-max canonical choice
    Ok(by_profile
        .into_values()
        .rev()
        .map(|(profile, witness)| AtlasRow {
            quotient_genus: a,
            group: group.clone(),
            profile,
            witness,
            reference_row: None,
        })
        .collect())
}

/// Sorted character indices of a support, minimised over automorphisms.
fn canonical_support(group: &FiniteAbelianGroup, support: &[CharacterIndex], auts: &[Automorphism]) -> Vec<usize> {
    let mut best: Vec<usize> = support.iter().map(|c| group.character_index_of(c)).collect();
    best.sort_unstable();
    for aut in auts {
        let mut moved: Vec<usize> = support
            .iter()
            .map(|c| aut.apply_character_index(group.character_index_of(c)))
            .collect();
        moved.sort_unstable();
        if moved < best {
            best = moved;
        }
    }
    best
}

/// The complete atlas for genus `g`, every row flagged against the embedded
/// reference table for that genus.
pub fn atlas_table(g: u32) -> Result<AtlasTable> {
    let Some(table) = reference::action_table_for_genus(g) else {
        return Err(Error::InvalidInput(format!(
            "no reference action table for genus {g}; tables exist for genus 2 and 3"
        )));
    };
    let mut rows = Vec::new();
    for a in 0..=g {
        rows.extend(enumerate_actions(g, a)?);
    }
    let mut missing = Vec::new();
    let mut aut_cache: BTreeMap<Vec<u32>, Vec<Automorphism>> = BTreeMap::new();
    for r in &table.rows {
        let auts = match aut_cache.get(r.group.factors()) {
            Some(a) => a,
            None => aut_cache
                .entry(r.group.factors().to_vec())
                .or_insert(r.group.automorphisms()?),
        };
        let target = canonical_support(&r.group, &r.support, auts);
        let mut found = false;
        for row in rows.iter_mut() {
            if row.quotient_genus != r.quotient_genus || row.group != r.group {
                continue;
            }
            if canonical_support(&row.group, &row.support(), auts) == target {
                found = true;
                if row.reference_row.is_none() {
                    row.reference_row = Some(r.row.clone());
                }
            }
        }
        if !found {
            missing.push(r.clone());
        }
    }
    Ok(AtlasTable {
        genus: g,
        rows,
        missing,
    })
}
