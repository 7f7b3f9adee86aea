//! Finite Abelian groups given as products of cyclic factors, their
//! characters, cyclic subgroups and automorphisms.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest group order for which [`FiniteAbelianGroup::automorphisms`] runs.
pub const AUTOMORPHISM_ORDER_BOUND: usize = 64;

/// Hard cap on the size of an automorphism group we are willing to list.
pub const AUTOMORPHISM_COUNT_CAP: usize = 1_000_000;

const MAX_ORDER: usize = 1 << 24;

/// `Z/n_1 × … × Z/n_k`. Elements are indexed in mixed radix with the first
/// coordinate most significant, so index order is lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct FiniteAbelianGroup {
    factors: Vec<u32>,
    order: usize,
    exponent: u32,
    strides: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement(Vec<u32>);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharacterIndex(Vec<u32>);

impl GroupElement {
    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

impl CharacterIndex {
    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }
}

fn fmt_tuple(f: &mut fmt::Formatter<'_>, coords: &[u32]) -> fmt::Result {
    write!(f, "(")?;
    for (i, c) in coords.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{c}")?;
    }
    write!(f, ")")
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tuple(f, &self.0)
    }
}

impl fmt::Display for CharacterIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_tuple(f, &self.0)?;
        write!(f, "*")
    }
}

impl FiniteAbelianGroup {
    pub fn new(factors: &[u32]) -> Result<Self> {
        if let Some(bad) = factors.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidInput(format!("cyclic factor {bad} is smaller than 2")));
        }
        let mut order: usize = 1;
        for &n in factors {
            order = order
                .checked_mul(n as usize)
                .filter(|&o| o <= MAX_ORDER)
                .ok_or_else(|| Error::InvalidInput(format!("group order too large: {factors:?}")))?;
        }
        let mut strides = vec![1usize; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1] as usize;
        }
        let exponent = factors.iter().fold(1u32, |acc, &n| acc.lcm(&n));
        Ok(FiniteAbelianGroup {
            factors: factors.to_vec(),
            order,
            exponent,
            strides,
        })
    }

    pub fn trivial() -> Self {
        Self::new(&[]).expect("trivial group is valid")
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Least common multiple of the cyclic factors.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Human-readable name such as `Z/2×Z/8`.
    pub fn label(&self) -> String {
        if self.factors.is_empty() {
            return "1".to_string();
        }
        self.factors
            .iter()
            .map(|n| format!("Z/{n}"))
            .collect::<Vec<_>>()
            .join("×")
    }

    fn check_coords(&self, coords: &[u32], what: &str) -> Result<()> {
        if coords.len() != self.factors.len() {
            return Err(Error::InvalidInput(format!(
                "{what} {coords:?} has {} coordinates, group {} needs {}",
                coords.len(),
                self,
                self.factors.len()
            )));
        }
        for (c, n) in coords.iter().zip(&self.factors) {
            if c >= n {
                return Err(Error::InvalidInput(format!(
                    "{what} {coords:?} has coordinate {c} outside [0,{n})"
                )));
            }
        }
        Ok(())
    }

    pub fn element(&self, coords: &[u32]) -> Result<GroupElement> {
        self.check_coords(coords, "element")?;
        Ok(GroupElement(coords.to_vec()))
    }

    pub fn character(&self, coords: &[u32]) -> Result<CharacterIndex> {
        self.check_coords(coords, "character")?;
        Ok(CharacterIndex(coords.to_vec()))
    }

    /// Accepts an element only if it belongs to this group.
    pub fn validate_element(&self, g: &GroupElement) -> Result<()> {
        self.check_coords(&g.0, "element")
    }

    pub fn validate_character(&self, chi: &CharacterIndex) -> Result<()> {
        self.check_coords(&chi.0, "character")
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![0; self.rank()])
    }

    pub fn trivial_character(&self) -> CharacterIndex {
        CharacterIndex(vec![0; self.rank()])
    }

    fn coords_at(&self, mut idx: usize) -> Vec<u32> {
        let mut coords = vec![0u32; self.rank()];
        for i in (0..self.rank()).rev() {
            let n = self.factors[i] as usize;
            coords[i] = (idx % n) as u32;
            idx /= n;
        }
        coords
    }

    fn index_of_coords(&self, coords: &[u32]) -> usize {
        coords.iter().zip(&self.strides).map(|(&c, &s)| c as usize * s).sum()
    }

    pub fn index_of(&self, g: &GroupElement) -> usize {
        self.index_of_coords(&g.0)
    }

    pub fn element_at(&self, idx: usize) -> GroupElement {
        GroupElement(self.coords_at(idx))
    }

    pub fn character_index_of(&self, chi: &CharacterIndex) -> usize {
        self.index_of_coords(&chi.0)
    }

    pub fn character_at(&self, idx: usize) -> CharacterIndex {
        CharacterIndex(self.coords_at(idx))
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        (0..self.order).map(|i| self.element_at(i)).collect()
    }

    pub fn characters(&self) -> Vec<CharacterIndex> {
        (0..self.order).map(|i| self.character_at(i)).collect()
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(a.0.iter().zip(&self.factors).map(|(x, n)| (n - x) % n).collect())
    }

    pub fn scale(&self, a: &GroupElement, k: u64) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.factors)
                .map(|(&x, &n)| ((x as u64 * (k % n as u64)) % n as u64) as u32)
                .collect(),
        )
    }

    pub fn add_characters(&self, a: &CharacterIndex, b: &CharacterIndex) -> CharacterIndex {
        CharacterIndex(self.add(&GroupElement(a.0.clone()), &GroupElement(b.0.clone())).0)
    }

    pub fn inverse_character(&self, a: &CharacterIndex) -> CharacterIndex {
        CharacterIndex(self.neg(&GroupElement(a.0.clone())).0)
    }

    pub fn element_order(&self, g: &GroupElement) -> u32 {
        g.0.iter()
            .zip(&self.factors)
            .fold(1u32, |acc, (&c, &n)| acc.lcm(&(n / n.gcd(&c))))
    }

    /// Membership table (by element index) of the subgroup generated by `elems`.
    pub fn subgroup_mask(&self, elems: &[GroupElement]) -> Vec<bool> {
        let mut mask = vec![false; self.order];
        mask[0] = true;
        let mut members = vec![self.zero()];
        for g in elems {
            if mask[self.index_of(g)] {
                continue;
            }
            // every element of the new subgroup is s + k g with s old
            let old = members.clone();
            let mut multiple = g.clone();
            while !mask[self.index_of(&multiple)] {
                for s in &old {
                    let t = self.add(s, &multiple);
                    let ti = self.index_of(&t);
                    if !mask[ti] {
                        mask[ti] = true;
                        members.push(t);
                    }
                }
                multiple = self.add(&multiple, g);
            }
        }
        mask
    }

    pub fn subgroup_order(&self, elems: &[GroupElement]) -> usize {
        self.subgroup_mask(elems).iter().filter(|&&b| b).count()
    }

    pub fn generates(&self, elems: &[GroupElement]) -> bool {
        self.subgroup_order(elems) == self.order
    }

    /// `⟨χ,g⟩ · exponent`, an integer in `[0, exponent)`.
    pub fn pairing_numerator(&self, chi: &CharacterIndex, g: &GroupElement) -> u32 {
        let e = self.exponent as u64;
        let total: u64 = chi
            .0
            .iter()
            .zip(&g.0)
            .zip(&self.factors)
            .map(|((&c, &x), &n)| (c as u64 * x as u64 % n as u64) * (e / n as u64))
            .sum();
        (total % e) as u32
    }

    /// `⟨χ,g⟩ ∈ [0,1)` as an exact reduced fraction.
    pub fn pairing(&self, chi: &CharacterIndex, g: &GroupElement) -> Ratio<i64> {
        Ratio::new(self.pairing_numerator(chi, g) as i64, self.exponent as i64)
    }

    /// The exponent `a ∈ [0, ord h)` with `⟨χ,h⟩ = a / ord(h)`.
    pub fn restriction_exponent(&self, chi: &CharacterIndex, h: &GroupElement) -> Result<u32> {
        if h.is_zero() {
            return Err(Error::InvalidInput(
                "restriction exponent at the identity element".into(),
            ));
        }
        let o = self.element_order(h);
        let num = self.pairing_numerator(chi, h);
        Ok(num / (self.exponent / o))
    }

    /// The cyclic subgroup generated by `h`, listed as `0, h, 2h, …`.
    pub fn cyclic_subgroup(&self, h: &GroupElement) -> Vec<GroupElement> {
        let o = self.element_order(h) as u64;
        (0..o).map(|k| self.scale(h, k)).collect()
    }

    pub fn automorphisms(&self) -> Result<Vec<Automorphism>> {
        self.automorphisms_with_bound(AUTOMORPHISM_ORDER_BOUND)
    }

    /// Brute force over images of the standard generators, pruned by
    /// requiring the partial images to span a subgroup of the right order.
    pub fn automorphisms_with_bound(&self, bound: usize) -> Result<Vec<Automorphism>> {
        if self.order > bound {
            return Err(Error::Capability(format!(
                "automorphisms of {} (order {}) exceed the order bound {bound}",
                self.label(),
                self.order
            )));
        }
        let candidates: Vec<Vec<GroupElement>> = self
            .factors
            .iter()
            .map(|&n| {
                self.elements()
                    .into_iter()
                    .filter(|g| n % self.element_order(g) == 0)
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut images = Vec::with_capacity(self.rank());
        self.extend_images(&candidates, &mut images, &mut out)?;
        Ok(out)
    }

    fn extend_images(
        &self,
        candidates: &[Vec<GroupElement>],
        images: &mut Vec<GroupElement>,
        out: &mut Vec<Automorphism>,
    ) -> Result<()> {
        let j = images.len();
        if j == self.rank() {
            if out.len() >= AUTOMORPHISM_COUNT_CAP {
                return Err(Error::Capability(format!(
                    "automorphism group of {} has more than {AUTOMORPHISM_COUNT_CAP} elements",
                    self.label()
                )));
            }
            out.push(Automorphism::from_images(self, images.clone()));
            return Ok(());
        }
        let expected: usize = self.factors[..=j].iter().map(|&n| n as usize).product();
        for g in &candidates[j] {
            images.push(g.clone());
            if self.subgroup_order(images) == expected {
                self.extend_images(candidates, images, out)?;
            }
            images.pop();
        }
        Ok(())
    }
}

impl fmt::Debug for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteAbelianGroup({})", self)
    }
}

/// Comma-separated factor list, e.g. `2,8`.
impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| n.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for FiniteAbelianGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::trivial());
        }
        let factors = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidInput(format!("bad group factor {p:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&factors)
    }
}

impl TryFrom<Vec<u32>> for FiniteAbelianGroup {
    type Error = Error;

    fn try_from(factors: Vec<u32>) -> Result<Self> {
        Self::new(&factors)
    }
}

impl From<FiniteAbelianGroup> for Vec<u32> {
    fn from(g: FiniteAbelianGroup) -> Self {
        g.factors
    }
}

/// An automorphism σ, stored as the images of the standard generators
/// together with its action on element and character indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automorphism {
    images: Vec<GroupElement>,
    perm: Vec<usize>,
    /// `char_perm[idx(χ)] = idx(χ ∘ σ⁻¹)`
    char_perm: Vec<usize>,
}

impl Automorphism {
    fn from_images(group: &FiniteAbelianGroup, images: Vec<GroupElement>) -> Self {
        let perm: Vec<usize> = (0..group.order())
            .map(|i| {
                let g = group.element_at(i);
                let mut acc = group.zero();
                for (c, img) in g.coords().iter().zip(&images) {
                    acc = group.add(&acc, &group.scale(img, *c as u64));
                }
                group.index_of(&acc)
            })
            .collect();
        let mut inv = vec![0usize; perm.len()];
        for (i, &j) in perm.iter().enumerate() {
            inv[j] = i;
        }
        let e = group.exponent();
        let basis_preimages: Vec<GroupElement> = (0..group.rank())
            .map(|i| {
                let mut coords = vec![0u32; group.rank()];
                coords[i] = 1;
                group.element_at(inv[group.index_of(&GroupElement(coords))])
            })
            .collect();
        let char_perm = (0..group.order())
            .map(|ci| {
                let chi = group.character_at(ci);
                let coords: Vec<u32> = basis_preimages
                    .iter()
                    .zip(group.factors())
                    .map(|(pre, &n)| group.pairing_numerator(&chi, pre) * n / e)
                    .collect();
                group.character_index_of(&CharacterIndex(coords))
            })
            .collect();
        Automorphism {
            images,
            perm,
            char_perm,
        }
    }

    pub fn images(&self) -> &[GroupElement] {
        &self.images
    }

    pub fn apply_index(&self, idx: usize) -> usize {
        self.perm[idx]
    }

    pub fn apply(&self, group: &FiniteAbelianGroup, g: &GroupElement) -> GroupElement {
        group.element_at(self.perm[group.index_of(g)])
    }

    /// Index of the transported character `χ ∘ σ⁻¹`.
    pub fn apply_character_index(&self, idx: usize) -> usize {
        self.char_perm[idx]
    }

    pub fn apply_character(&self, group: &FiniteAbelianGroup, chi: &CharacterIndex) -> CharacterIndex {
        group.character_at(self.char_perm[group.character_index_of(chi)])
    }
}
