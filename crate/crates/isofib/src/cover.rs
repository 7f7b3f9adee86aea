//! G-covers of a smooth curve of genus `b`, described by branch monodromy
//! and the images of the base's homology generators.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Automorphism, CharacterIndex, FiniteAbelianGroup, GroupElement};

/// `mult` branch points, each with local monodromy `elem`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BranchEntry {
    pub elem: GroupElement,
    pub mult: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoverData {
    group: FiniteAbelianGroup,
    base_genus: u32,
    /// merged by element and sorted by element index
    branch: Vec<BranchEntry>,
    twist: Vec<GroupElement>,
}

/// Serialized form of a cover, without its group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverSpec {
    pub base_genus: u32,
    pub branch: Vec<BranchEntry>,
    #[serde(default)]
    pub twist: Vec<GroupElement>,
}

impl CoverData {
    pub fn new(
        group: &FiniteAbelianGroup,
        base_genus: u32,
        branch: Vec<(GroupElement, u32)>,
        twist: Vec<GroupElement>,
    ) -> Result<Self> {
        let mut merged: BTreeMap<usize, u32> = BTreeMap::new();
        for (elem, mult) in &branch {
            group.validate_element(elem)?;
            if *mult == 0 {
                continue;
            }
            if elem.is_zero() {
                return Err(Error::InvalidInput("the identity cannot be a branch monodromy".into()));
            }
            *merged.entry(group.index_of(elem)).or_insert(0) += mult;
        }
        for t in &twist {
            group.validate_element(t)?;
        }
        if twist.len() != 2 * base_genus as usize {
            return Err(Error::InvalidInput(format!(
                "twist has {} elements, base genus {base_genus} needs {}",
                twist.len(),
                2 * base_genus
            )));
        }
        let branch: Vec<BranchEntry> = merged
            .into_iter()
            .map(|(i, mult)| BranchEntry {
                elem: group.element_at(i),
                mult,
            })
            .collect();

        let mut total = group.zero();
        for e in &branch {
            total = group.add(&total, &group.scale(&e.elem, e.mult as u64));
        }
        if !total.is_zero() {
            return Err(Error::InvalidMonodromy(format!(
                "branch monodromy sums to {total}, not to the identity"
            )));
        }
        let mut gens: Vec<GroupElement> = branch.iter().map(|e| e.elem.clone()).collect();
        gens.extend(twist.iter().cloned());
        if !group.generates(&gens) {
            return Err(Error::DisconnectedCover(format!(
                "branch and twist elements do not generate {}",
                group.label()
            )));
        }
        let points: u64 = branch.iter().map(|e| e.mult as u64).sum();
        if base_genus == 0 && group.order() > 1 && points < 2 {
            return Err(Error::InvalidMonodromy(
                "a cover of the projective line needs at least two branch points".into(),
            ));
        }
        Ok(CoverData {
            group: group.clone(),
            base_genus,
            branch,
            twist,
        })
    }

    pub fn from_spec(group: &FiniteAbelianGroup, spec: &CoverSpec) -> Result<Self> {
        let branch = spec.branch.iter().map(|e| (e.elem.clone(), e.mult)).collect();
        Self::new(group, spec.base_genus, branch, spec.twist.clone())
    }

    pub fn to_spec(&self) -> CoverSpec {
        CoverSpec {
            base_genus: self.base_genus,
            branch: self.branch.clone(),
            twist: self.twist.clone(),
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn base_genus(&self) -> u32 {
        self.base_genus
    }

    pub fn branch(&self) -> &[BranchEntry] {
        &self.branch
    }

    pub fn twist(&self) -> &[GroupElement] {
        &self.twist
    }

    /// Multiplicity of `elem` in the branch multiset.
    pub fn multiplicity(&self, elem: &GroupElement) -> u32 {
        self.branch.iter().find(|e| &e.elem == elem).map_or(0, |e| e.mult)
    }

    pub fn branch_points(&self) -> u64 {
        self.branch.iter().map(|e| e.mult as u64).sum()
    }

    /// Degree of `L_χ`: `Σ mult · ⟨χ,h⟩` with `⟨χ,h⟩` taken in `[0,1)`.
    pub fn bundle_degree(&self, chi: &CharacterIndex) -> u64 {
        let e = self.group.exponent() as u64;
        let total: u64 = self
            .branch
            .iter()
            .map(|b| b.mult as u64 * self.group.pairing_numerator(chi, &b.elem) as u64)
            .sum();
        assert!(
            total.is_multiple_of(e),
            "non-integral bundle degree {total}/{e} for {chi} on {self}"
        );
        total / e
    }

    /// Dimension of the χ-eigenspace of holomorphic 1-forms on the cover.
    pub fn eigen_dim(&self, chi: &CharacterIndex) -> u64 {
        let b = self.base_genus as u64;
        if chi.is_trivial() {
            return b;
        }
        match self.bundle_degree(chi) {
            0 => {
                assert!(b >= 1, "degree-0 nontrivial L_χ over a rational base");
                b - 1
            }
            l => l + b - 1,
        }
    }

    pub fn profile(&self) -> EigenProfile {
        let dims = self.group.characters().iter().map(|chi| self.eigen_dim(chi)).collect();
        EigenProfile {
            group: self.group.clone(),
            dims,
        }
    }

    /// `2g − 2` from Riemann–Hurwitz.
    pub fn euler_defect(&self) -> i64 {
        let n = self.group.order() as i64;
        let ramification: i64 = self
            .branch
            .iter()
            .map(|e| {
                let o = self.group.element_order(&e.elem) as i64;
                e.mult as i64 * (n - n / o)
            })
            .sum();
        n * (2 * self.base_genus as i64 - 2) + ramification
    }

    pub fn riemann_hurwitz_genus(&self) -> u64 {
        let d = self.euler_defect();
        assert!(d % 2 == 0 && d >= -2, "bad Riemann–Hurwitz defect {d}");
        (d / 2 + 1) as u64
    }

    /// Genus as the total eigenspace dimension, checked against Riemann–Hurwitz.
    pub fn genus(&self) -> Result<u64> {
        let cw = self.profile().total();
        let rh = self.riemann_hurwitz_genus();
        if cw != rh {
            return Err(Error::InternalConsistency(format!(
                "eigenspace dimensions sum to {cw} but Riemann–Hurwitz gives {rh} for {self}"
            )));
        }
        Ok(cw)
    }

    /// The cover transported by an automorphism of the group.
    pub fn transform(&self, aut: &Automorphism) -> CoverData {
        let g = &self.group;
        let mut branch: Vec<BranchEntry> = self
            .branch
            .iter()
            .map(|e| BranchEntry {
                elem: aut.apply(g, &e.elem),
                mult: e.mult,
            })
            .collect();
        branch.sort_by_key(|e| g.index_of(&e.elem));
        CoverData {
            group: g.clone(),
            base_genus: self.base_genus,
            branch,
            twist: self.twist.iter().map(|t| aut.apply(g, t)).collect(),
        }
    }

    /// Same cover with its twist replaced by the canonical generating tuple
    /// of the subgroup it spans.
    pub fn with_canonical_twist(&self) -> CoverData {
        CoverData {
            twist: canonical_twist(&self.group, &self.twist),
            ..self.clone()
        }
    }

    fn key(&self, with_twist: bool) -> CoverKey {
        let g = &self.group;
        CoverKey {
            branch: self.branch.iter().map(|e| (g.index_of(&e.elem), e.mult)).collect(),
            twist: if with_twist {
                canonical_twist(g, &self.twist).iter().map(|t| g.index_of(t)).collect()
            } else {
                Vec::new()
            },
        }
    }

    /// Lexicographically minimal representative over the orbit under `auts`.
    pub fn canonical_form(&self, auts: &[Automorphism], with_twist: bool) -> CoverData {
        let mut best = self.with_canonical_twist();
        let mut best_key = best.key(with_twist);
        for aut in auts {
            let moved = self.transform(aut).with_canonical_twist();
            let k = moved.key(with_twist);
            if k < best_key {
                best_key = k;
                best = moved;
            }
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct CoverKey {
    branch: Vec<(usize, u32)>,
    twist: Vec<usize>,
}

impl fmt::Display for CoverData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} b={} {{", self.group.label(), self.base_genus)?;
        for (i, e) in self.branch.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", e.elem, e.mult)?;
        }
        write!(f, "}}")?;
        if !self.twist.is_empty() {
            let t: Vec<String> = self.twist.iter().map(|x| x.to_string()).collect();
            write!(f, " twist [{}]", t.join(" "))?;
        }
        Ok(())
    }
}

/// Lexicographically smallest tuple of the same length that spans the same
/// subgroup as `twist`: leading zeros followed by a minimal generating set.
pub fn canonical_twist(group: &FiniteAbelianGroup, twist: &[GroupElement]) -> Vec<GroupElement> {
    if twist.is_empty() {
        return Vec::new();
    }
    let mask = group.subgroup_mask(twist);
    let members: Vec<usize> = (1..group.order()).filter(|&i| mask[i]).collect();
    let target = members.len() + 1;
    for r in 0..=twist.len() {
        let mut pick = vec![0usize; r];
        if let Some(gens) = first_generating_tuple(group, &members, target, &mut pick, 0) {
            let mut out = vec![group.zero(); twist.len() - r];
            out.extend(gens.into_iter().map(|i| group.element_at(i)));
            return out;
        }
    }
    unreachable!("the twist itself spans its subgroup")
}

fn first_generating_tuple(
    group: &FiniteAbelianGroup,
    members: &[usize],
    target: usize,
    pick: &mut Vec<usize>,
    depth: usize,
) -> Option<Vec<usize>> {
    if depth == pick.len() {
        let elems: Vec<GroupElement> = pick.iter().map(|&i| group.element_at(i)).collect();
        return (group.subgroup_order(&elems) == target).then(|| pick.clone());
    }
    for &m in members {
        pick[depth] = m;
        if let Some(found) = first_generating_tuple(group, members, target, pick, depth + 1) {
            return Some(found);
        }
    }
    None
}

/// Canonical twists for every subgroup spanned by at most `2b` elements.
pub fn twist_classes(group: &FiniteAbelianGroup, base_genus: u32) -> Vec<Vec<GroupElement>> {
    let len = 2 * base_genus as usize;
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut seen: BTreeMap<Vec<usize>, Vec<GroupElement>> = BTreeMap::new();
    let mut frontier: Vec<Vec<GroupElement>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        let mut layer: BTreeMap<Vec<bool>, Vec<GroupElement>> = BTreeMap::new();
        for gens in &frontier {
            for x in group.elements() {
                let mut g2 = gens.clone();
                g2.push(x);
                layer.entry(group.subgroup_mask(&g2)).or_insert(g2);
            }
        }
        next.extend(layer.into_values());
        frontier = next;
    }
    for gens in frontier {
        let canon = canonical_twist(group, &gens);
        let key: Vec<usize> = canon.iter().map(|t| group.index_of(t)).collect();
        seen.entry(key).or_insert(canon);
    }
    seen.into_values().collect()
}

/// Eigenspace dimensions, indexed by character index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EigenProfile {
    group: FiniteAbelianGroup,
    dims: Vec<u64>,
}

impl EigenProfile {
    pub fn from_dims(group: &FiniteAbelianGroup, dims: Vec<u64>) -> Result<Self> {
        if dims.len() != group.order() {
            return Err(Error::InvalidInput(format!(
                "profile has {} entries, group order is {}",
                dims.len(),
                group.order()
            )));
        }
        Ok(EigenProfile {
            group: group.clone(),
            dims,
        })
    }

    pub fn from_entries(group: &FiniteAbelianGroup, entries: &[(CharacterIndex, u64)]) -> Result<Self> {
        let mut dims = vec![0u64; group.order()];
        for (chi, d) in entries {
            group.validate_character(chi)?;
            dims[group.character_index_of(chi)] += d;
        }
        Ok(EigenProfile {
            group: group.clone(),
            dims,
        })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn dim(&self, chi: &CharacterIndex) -> u64 {
        self.dims[self.group.character_index_of(chi)]
    }

    pub fn dims(&self) -> &[u64] {
        &self.dims
    }

    pub fn total(&self) -> u64 {
        self.dims.iter().sum()
    }

    pub fn nonzero(&self) -> Vec<(CharacterIndex, u64)> {
        self.dims
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(i, &d)| (self.group.character_at(i), d))
            .collect()
    }

    /// Profile of the transported cover: the dimension at `χ∘σ⁻¹` is the
    /// old dimension at `χ`.
    pub fn transform(&self, aut: &Automorphism) -> EigenProfile {
        let mut dims = vec![0u64; self.dims.len()];
        for (i, &d) in self.dims.iter().enumerate() {
            dims[aut.apply_character_index(i)] = d;
        }
        EigenProfile {
            group: self.group.clone(),
            dims,
        }
    }

    /// Lexicographically largest dimension vector over the orbit, so the
    /// representative puts its weight on the smallest characters.
    pub fn canonical(&self, auts: &[Automorphism]) -> EigenProfile {
        let mut best = self.clone();
        for aut in auts {
            let t = self.transform(aut);
            if t.dims > best.dims {
                best = t;
            }
        }
        best
    }
}

impl fmt::Display for EigenProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (chi, d)) in self.nonzero().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{chi}:{d}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Dedup {
    /// Distinct branch multisets and twist classes.
    #[default]
    None,
    /// Up to automorphisms of the group.
    Automorphisms,
}

#[derive(Clone, Debug, Default)]
pub struct CoverConstraints {
    pub genus: Option<u64>,
    pub max_branch_points: Option<u64>,
    /// Exact eigenspace dimensions required at the listed characters.
    pub dims: Vec<(CharacterIndex, u64)>,
    pub dedup: Dedup,
    /// Keep one connected twist per branch multiset. None of the numerical
    /// data depends on the twist beyond connectedness.
    pub one_twist_per_branch: bool,
}

/// All valid covers meeting the constraints, sorted canonically.
pub fn enumerate_covers(
    group: &FiniteAbelianGroup,
    base_genus: u32,
    constraints: &CoverConstraints,
) -> Result<Vec<CoverData>> {
    let auts = match constraints.dedup {
        Dedup::None => None,
        Dedup::Automorphisms => Some(group.automorphisms()?),
    };
    enumerate_covers_up_to(group, base_genus, constraints, auts.as_deref())
}

/// As [`enumerate_covers`], deduplicating under an explicit list of
/// automorphisms (which should form a group) instead of `constraints.dedup`.
pub fn enumerate_covers_up_to(
    group: &FiniteAbelianGroup,
    base_genus: u32,
    constraints: &CoverConstraints,
    symmetries: Option<&[Automorphism]>,
) -> Result<Vec<CoverData>> {
    let search = Search::new(group, base_genus, constraints)?;
    let mut found: BTreeMap<CoverKey, CoverData> = BTreeMap::new();
    let Some(search) = search else {
        return Ok(Vec::new());
    };
    let twists = twist_classes(group, base_genus);
    let with_twist = !constraints.one_twist_per_branch;
    let mut counts = vec![0u32; group.order()];
    let mut emit = |counts: &[u32]| -> Result<()> {
        let branch: Vec<(GroupElement, u32)> = counts
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(i, &m)| (group.element_at(i), m))
            .collect();
        let branch_elems: Vec<GroupElement> = branch.iter().map(|(e, _)| e.clone()).collect();
        for twist in &twists {
            let mut gens = branch_elems.clone();
            gens.extend(twist.iter().cloned());
            if !group.generates(&gens) {
                continue;
            }
            let cover = CoverData::new(group, base_genus, branch.clone(), twist.clone())?;
            for (chi, d) in &constraints.dims {
                if cover.eigen_dim(chi) != *d {
                    return Err(Error::InternalConsistency(format!(
                        "enumerated {cover} has dim {} at {chi}, wanted {d}",
                        cover.eigen_dim(chi)
                    )));
                }
            }
            if let Some(g) = constraints.genus {
                if cover.genus()? != g {
                    return Err(Error::InternalConsistency(format!(
                        "enumerated {cover} has the wrong genus"
                    )));
                }
            }
            let rep = match symmetries {
                Some(auts) => cover.canonical_form(auts, with_twist),
                None => cover.with_canonical_twist(),
            };
            found.entry(rep.key(with_twist)).or_insert(rep);
            if !with_twist {
                break;
            }
        }
        Ok(())
    };
    search.run(1, &mut counts, &mut emit)?;
    Ok(found.into_values().collect())
}

/// Depth-first search over multiplicities of the nonzero elements, in
/// element index order, with every constraint kept as a remaining budget.
struct Search {
    order: usize,
    /// `2g − 2 − |G|(2b − 2)` remaining, in units of `|G|`-weighted points
    genus_budget: Option<i64>,
    weight: Vec<i64>,
    count_budget: Option<u64>,
    /// per constrained character: exact target of `Σ mult·⟨ψ,h⟩·exponent`
    degree_budget: Vec<i64>,
    coeff: Vec<Vec<i64>>,
    /// whether some element at index ≥ i still moves budget k
    reachable: Vec<Vec<bool>>,
    add: Vec<Vec<usize>>,
    multiple: Vec<Vec<usize>>,
    sum: usize,
}

impl Search {
    fn new(group: &FiniteAbelianGroup, base_genus: u32, constraints: &CoverConstraints) -> Result<Option<Self>> {
        let n = group.order();
        let e = group.exponent() as i64;
        let b = base_genus as i64;
        let els = group.elements();
        let orders: Vec<i64> = els.iter().map(|x| group.element_order(x) as i64).collect();

        let mut degree_budget = Vec::new();
        let mut coeff = Vec::new();
        for (chi, d) in &constraints.dims {
            group.validate_character(chi)?;
            let d = *d as i64;
            if chi.is_trivial() {
                if d != b {
                    return Ok(None);
                }
                continue;
            }
            // l ≥ 1 gives dim l + b − 1; l = 0 gives b − 1 and needs b ≥ 1
            let l = d + 1 - b;
            if l < 0 || (l == 0 && b == 0) {
                return Ok(None);
            }
            degree_budget.push(l * e);
            coeff.push(
                els.iter()
                    .map(|x| group.pairing_numerator(chi, x) as i64)
                    .collect::<Vec<_>>(),
            );
        }

        let weight: Vec<i64> = orders.iter().map(|&o| n as i64 - n as i64 / o).collect();
        let genus_budget = match constraints.genus {
            Some(g) => {
                let t = 2 * g as i64 - 2 - n as i64 * (2 * b - 2);
                if t < 0 {
                    return Ok(None);
                }
                Some(t)
            }
            None => None,
        };

        if genus_budget.is_none() && constraints.max_branch_points.is_none() {
            let unbounded = (1..n).any(|i| coeff.iter().all(|c| c[i] == 0));
            if unbounded {
                return Err(Error::Capability(
                    "cover search needs a genus, a branch-point bound, or dimension \
                     constraints on characters that separate the group elements"
                        .into(),
                ));
            }
        }

        let mut reachable = vec![vec![false; coeff.len() + 1]; n + 1];
        for i in (1..n).rev() {
            for k in 0..coeff.len() {
                reachable[i][k] = reachable[i + 1][k] || coeff[k][i] > 0;
            }
            reachable[i][coeff.len()] = true;
        }

        let add: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..n).map(|j| group.index_of(&group.add(&els[i], &els[j]))).collect())
            .collect();
        let multiple: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                (0..orders[i] as u64)
                    .map(|k| group.index_of(&group.scale(&els[i], k)))
                    .collect()
            })
            .collect();

        Ok(Some(Search {
            order: n,
            genus_budget,
            weight,
            count_budget: constraints.max_branch_points,
            degree_budget,
            coeff,
            reachable,
            add,
            multiple,
            sum: 0,
        }))
    }

    fn run(mut self, start: usize, counts: &mut Vec<u32>, emit: &mut dyn FnMut(&[u32]) -> Result<()>) -> Result<()> {
        self.descend(start, counts, emit)
    }

    fn descend(&mut self, i: usize, counts: &mut Vec<u32>, emit: &mut dyn FnMut(&[u32]) -> Result<()>) -> Result<()> {
        if i == self.order {
            let exact =
                self.genus_budget.is_none_or(|t| t == 0) && self.degree_budget.iter().all(|&r| r == 0) && self.sum == 0;
            if exact {
                emit(counts)?;
            }
            return Ok(());
        }
        // a budget that must still reach zero but cannot move any more
        if self
            .degree_budget
            .iter()
            .enumerate()
            .any(|(k, &r)| r > 0 && !self.reachable[i][k])
        {
            return Ok(());
        }
        let mut cap = u64::MAX;
        if let Some(t) = self.genus_budget {
            cap = cap.min((t / self.weight[i]) as u64);
        }
        if let Some(c) = self.count_budget {
            cap = cap.min(c);
        }
        for (k, c) in self.coeff.iter().enumerate() {
            if c[i] > 0 {
                cap = cap.min((self.degree_budget[k] / c[i]) as u64);
            }
        }
        debug_assert!(cap < u64::MAX);

        let saved_sum = self.sum;
        for m in 0..=cap {
            counts[i] = m as u32;
            let step = self.multiple[i][(m % self.multiple[i].len() as u64) as usize];
            self.sum = self.add[saved_sum][step];
            self.shift(i, m as i64, -1);
            let r = self.descend(i + 1, counts, emit);
            self.shift(i, m as i64, 1);
            r?;
        }
        self.sum = saved_sum;
        counts[i] = 0;
        Ok(())
    }

    fn shift(&mut self, i: usize, m: i64, sign: i64) {
        if let Some(t) = self.genus_budget.as_mut() {
            *t += sign * m * self.weight[i];
        }
        if let Some(c) = self.count_budget.as_mut() {
            *c = (*c as i64 + sign * m) as u64;
        }
        for (k, c) in self.coeff.iter().enumerate() {
            self.degree_budget[k] += sign * m * c[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(f: &[u32]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(f).unwrap()
    }

    fn cover(g: &FiniteAbelianGroup, b: u32, branch: &[(&[u32], u32)], twist: &[&[u32]]) -> Result<CoverData> {
        CoverData::new(
            g,
            b,
            branch.iter().map(|(c, m)| (g.element(c).unwrap(), *m)).collect(),
            twist.iter().map(|c| g.element(c).unwrap()).collect(),
        )
    }

    fn ch(g: &FiniteAbelianGroup, c: &[u32]) -> CharacterIndex {
        g.character(c).unwrap()
    }

    #[test]
    fn validation() {
        let z2 = grp(&[2]);
        assert!(cover(&z2, 0, &[(&[1], 6)], &[]).is_ok());
        let k = grp(&[2, 2]);
        assert!(cover(&k, 0, &[(&[1, 0], 1), (&[0, 1], 1), (&[1, 1], 3)], &[]).is_ok());
        assert!(matches!(
            cover(&k, 0, &[(&[1, 0], 1), (&[0, 1], 1)], &[]),
            Err(Error::InvalidMonodromy(_))
        ));
        assert!(matches!(
            cover(&k, 0, &[(&[1, 1], 4)], &[]),
            Err(Error::DisconnectedCover(_))
        ));
        assert!(matches!(
            cover(&k, 0, &[(&[0, 0], 2), (&[1, 1], 2)], &[]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            cover(&k, 1, &[(&[1, 1], 2)], &[]),
            Err(Error::InvalidInput(_))
        ));
        // zero multiplicities vanish and repeated entries merge
        let c = cover(&z2, 0, &[(&[1], 2), (&[1], 0), (&[1], 4)], &[]).unwrap();
        assert_eq!(c.branch().len(), 1);
        assert_eq!(c.branch()[0].mult, 6);
    }

    #[test]
    fn bundle_degrees() {
        let k = grp(&[2, 2]);
        let d = cover(&k, 0, &[(&[1, 0], 2), (&[0, 1], 8)], &[]).unwrap();
        assert_eq!(d.bundle_degree(&ch(&k, &[0, 1])), 4);
        assert_eq!(d.bundle_degree(&ch(&k, &[1, 0])), 1);
        assert_eq!(d.bundle_degree(&ch(&k, &[0, 0])), 0);
        let h = grp(&[2, 8]);
        let f = cover(&h, 0, &[(&[0, 7], 1), (&[1, 4], 1), (&[1, 5], 1)], &[]).unwrap();
        assert_eq!(f.bundle_degree(&ch(&h, &[0, 1])), 2);
        // 4L_χ = D₁ + 2D₂ + 3D₃ on Z/4 with one point of each generator type
        let z4 = grp(&[4]);
        let c = cover(&z4, 0, &[(&[1], 1), (&[2], 2), (&[3], 1)], &[]).unwrap();
        // (1 + 2·2 + 3)/4
        assert_eq!(c.bundle_degree(&ch(&z4, &[1])), 2);
        // L_χ² = 2L_χ − D₂ − D₃: the carries happen at 2 and 3
        assert_eq!(c.bundle_degree(&ch(&z4, &[2])), 2 * 2 - 2 - 1);
    }

    #[test]
    fn eigen_dims() {
        let h = grp(&[2, 8]);
        let f = cover(&h, 0, &[(&[0, 7], 1), (&[1, 4], 1), (&[1, 5], 1)], &[]).unwrap();
        let p = f.profile();
        let expected: Vec<CharacterIndex> = vec![ch(&h, &[0, 1]), ch(&h, &[0, 3]), ch(&h, &[1, 2])];
        for chi in h.characters() {
            let want = u64::from(expected.contains(&chi));
            assert_eq!(p.dim(&chi), want, "{chi}");
        }

        let k = grp(&[2, 2]);
        let e = cover(&k, 1, &[(&[1, 1], 2)], &[&[1, 0], &[0, 0]]).unwrap();
        assert_eq!(e.eigen_dim(&ch(&k, &[0, 0])), 1);
        assert_eq!(e.eigen_dim(&ch(&k, &[1, 0])), 1);
        assert_eq!(e.eigen_dim(&ch(&k, &[0, 1])), 1);
        assert_eq!(e.eigen_dim(&ch(&k, &[1, 1])), 0);
    }

    #[test]
    fn genera() {
        let k = grp(&[2, 2]);
        let f = cover(&k, 0, &[(&[1, 1], 4), (&[1, 0], 2)], &[]).unwrap();
        assert_eq!(f.genus(), Ok(3));
        let k3 = grp(&[2, 2, 2]);
        let d = cover(&k3, 0, &[(&[1, 0, 0], 8), (&[0, 1, 0], 2), (&[0, 0, 1], 2)], &[]).unwrap();
        assert_eq!(d.genus(), Ok(17));
        let z2 = grp(&[2]);
        assert_eq!(cover(&z2, 0, &[(&[1], 6)], &[]).unwrap().genus(), Ok(2));
        let trivial = FiniteAbelianGroup::trivial();
        let c = CoverData::new(&trivial, 2, vec![], vec![trivial.zero(); 4]).unwrap();
        assert_eq!(c.genus(), Ok(2));
    }

    #[test]
    fn canonical_twists() {
        let k = grp(&[2, 2]);
        let e = |c: &[u32]| k.element(c).unwrap();
        assert_eq!(
            canonical_twist(&k, &[e(&[1, 1]), e(&[1, 0])]),
            vec![e(&[0, 1]), e(&[1, 0])]
        );
        assert_eq!(
            canonical_twist(&k, &[e(&[1, 1]), e(&[1, 1])]),
            vec![e(&[0, 0]), e(&[1, 1])]
        );
        // subgroups of Z/2² spanned by two elements: 0, three lines, everything
        assert_eq!(twist_classes(&k, 1).len(), 5);
        assert_eq!(twist_classes(&k, 0), vec![Vec::<GroupElement>::new()]);
    }

    #[test]
    fn enumerate_z3_genus2() {
        let z3 = grp(&[3]);
        let c = CoverConstraints {
            genus: Some(2),
            dedup: Dedup::Automorphisms,
            ..Default::default()
        };
        let all = enumerate_covers(&z3, 0, &c).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0], cover(&z3, 0, &[(&[1], 2), (&[2], 2)], &[]).unwrap());
        // without dedup the same cover appears once (it is Aut-invariant)
        let c2 = CoverConstraints {
            genus: Some(2),
            ..Default::default()
        };
        assert_eq!(enumerate_covers(&z3, 0, &c2).unwrap().len(), 1);
    }

    #[test]
    fn enumerate_klein_genus2() {
        let k = grp(&[2, 2]);
        let c = CoverConstraints {
            genus: Some(2),
            dedup: Dedup::Automorphisms,
            ..Default::default()
        };
        let all = enumerate_covers(&k, 0, &c).unwrap();
        assert_eq!(all.len(), 1);
        let mut mults: Vec<u32> = all[0].branch().iter().map(|e| e.mult).collect();
        mults.sort();
        assert_eq!(mults, vec![1, 1, 3]);
        let raw = enumerate_covers(
            &k,
            0,
            &CoverConstraints {
                genus: Some(2),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(raw.len(), 3);
    }

    #[test]
    fn enumerate_with_dims() {
        let z2 = grp(&[2]);
        let c = CoverConstraints {
            genus: Some(2),
            dims: vec![(ch(&z2, &[1]), 2)],
            ..Default::default()
        };
        let all = enumerate_covers(&z2, 0, &c).unwrap();
        assert_eq!(all, vec![cover(&z2, 0, &[(&[1], 6)], &[]).unwrap()]);
        // dims alone bound the search when the characters separate elements
        let c = CoverConstraints {
            dims: vec![(ch(&z2, &[1]), 4)],
            ..Default::default()
        };
        assert_eq!(enumerate_covers(&z2, 0, &c).unwrap().len(), 1);
        let k = grp(&[2, 2]);
        let unbounded = CoverConstraints {
            dims: vec![(ch(&k, &[1, 0]), 1)],
            ..Default::default()
        };
        assert!(matches!(enumerate_covers(&k, 0, &unbounded), Err(Error::Capability(_))));
    }

    #[test]
    fn enumerate_elliptic_base() {
        let z2 = grp(&[2]);
        // unramified double covers of an elliptic curve: genus 1 + 2·0 = 1
        let c = CoverConstraints {
            genus: Some(1),
            ..Default::default()
        };
        let all = enumerate_covers(&z2, 1, &c).unwrap();
        assert_eq!(all.len(), 1);
        assert!(all[0].branch().is_empty());
        assert_eq!(all[0].twist().len(), 2);
    }

    #[test]
    fn profile_transport() {
        let h = grp(&[2, 8]);
        let f = cover(&h, 0, &[(&[0, 7], 1), (&[1, 4], 1), (&[1, 5], 1)], &[]).unwrap();
        for aut in h.automorphisms().unwrap() {
            let moved = f.transform(&aut);
            for chi in h.characters() {
                assert_eq!(moved.eigen_dim(&aut.apply_character(&h, &chi)), f.eigen_dim(&chi));
            }
            assert_eq!(moved.profile(), f.profile().transform(&aut));
        }
    }

    #[test]
    fn spec_roundtrip() {
        let k = grp(&[2, 2]);
        let e = cover(&k, 1, &[(&[1, 1], 2)], &[&[1, 0], &[0, 0]]).unwrap();
        let json = serde_json::to_string(&e.to_spec()).unwrap();
        assert_eq!(
            json,
            r#"{"base_genus":1,"branch":[{"elem":[1,1],"mult":2}],"twist":[[1,0],[0,0]]}"#
        );
        let back: CoverSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(CoverData::from_spec(&k, &back).unwrap(), e);
    }
}
