//! Diagonal quotients `X = (F×D)/G` of a product of two `G`-curves and the
//! invariants of their minimal resolutions.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::cover::{CoverData, CoverSpec};
use crate::error::{Error, Result};
use crate::group::{CharacterIndex, FiniteAbelianGroup};

type Q = Ratio<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SandwichSurface {
    cover_f: CoverData,
    cover_d: CoverData,
    genus_f: u64,
    genus_d: u64,
}

/// JSON description of a sandwich.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SandwichSpec {
    pub group: FiniteAbelianGroup,
    #[serde(rename = "coverF")]
    pub cover_f: CoverSpec,
    #[serde(rename = "coverD")]
    pub cover_d: CoverSpec,
}

/// Singular points of `X` of type `1/n(1,q)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SingularityRecord {
    pub n: u32,
    pub q: u32,
    pub count: u64,
    pub z_points: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub p_g: u64,
    pub q: u64,
    pub chi: i64,
    pub euler_e: i64,
    #[serde(rename = "K2")]
    pub k2: i64,
    pub t_z: u64,
    pub sing: Vec<SingularityRecord>,
    pub canonical_character: Option<CharacterIndex>,
}

impl InvariantReport {
    /// Inequalities every canonical-pencil surface should satisfy; violations
    /// are reported, not treated as errors.
    pub fn soft_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.canonical_character.is_none() {
            return out;
        }
        if 2 * self.euler_e < self.k2 {
            out.push(format!("2e = {} < K² = {}", 2 * self.euler_e, self.k2));
        }
        if 9 * self.chi < self.k2 {
            out.push(format!("9χ = {} < K² = {}", 9 * self.chi, self.k2));
        }
        out
    }
}

impl SandwichSurface {
    pub fn new(cover_f: CoverData, cover_d: CoverData) -> Result<Self> {
        if cover_f.group() != cover_d.group() {
            return Err(Error::GroupMismatch(cover_f.group().label(), cover_d.group().label()));
        }
        let genus_f = cover_f.genus()?;
        let genus_d = cover_d.genus()?;
        if genus_f < 2 || genus_d < 2 {
            return Err(Error::InvalidInput(format!(
                "both curves need genus at least 2, got g(F) = {genus_f}, g(D) = {genus_d}"
            )));
        }
        Ok(SandwichSurface {
            cover_f,
            cover_d,
            genus_f,
            genus_d,
        })
    }

    pub fn from_spec(spec: &SandwichSpec) -> Result<Self> {
        SandwichSurface::new(
            CoverData::from_spec(&spec.group, &spec.cover_f)?,
            CoverData::from_spec(&spec.group, &spec.cover_d)?,
        )
    }

    pub fn to_spec(&self) -> SandwichSpec {
        SandwichSpec {
            group: self.group().clone(),
            cover_f: self.cover_f.to_spec(),
            cover_d: self.cover_d.to_spec(),
        }
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        self.cover_f.group()
    }

    pub fn cover_f(&self) -> &CoverData {
        &self.cover_f
    }

    pub fn cover_d(&self) -> &CoverData {
        &self.cover_d
    }

    pub fn genus_f(&self) -> u64 {
        self.genus_f
    }

    pub fn genus_d(&self) -> u64 {
        self.genus_d
    }

    /// The same surface with the factors exchanged.
    pub fn swapped(&self) -> Self {
        SandwichSurface {
            cover_f: self.cover_d.clone(),
            cover_d: self.cover_f.clone(),
            genus_f: self.genus_d,
            genus_d: self.genus_f,
        }
    }

    fn products(&self) -> Vec<(CharacterIndex, u64, u64)> {
        let g = self.group();
        g.characters()
            .into_iter()
            .map(|chi| {
                let v1 = self.cover_f.eigen_dim(&chi);
                let v2 = self.cover_d.eigen_dim(&g.inverse_character(&chi));
                (chi, v1, v2)
            })
            .collect()
    }

    pub fn geometric_genus(&self) -> u64 {
        self.products().iter().map(|(_, a, b)| a * b).sum()
    }

    pub fn irregularity(&self) -> u64 {
        (self.cover_f.base_genus() + self.cover_d.base_genus()) as u64
    }

    /// The unique character carrying all 2-forms, provided it has a
    /// one-dimensional eigenspace on `F`.
    pub fn canonical_character(&self) -> Result<Option<CharacterIndex>> {
        let p_g = self.geometric_genus();
        if p_g < 2 {
            return Err(Error::NotApplicable(format!(
                "the canonical pencil criterion needs p_g ≥ 2, got {p_g}"
            )));
        }
        let nonzero: Vec<_> = self.products().into_iter().filter(|(_, a, b)| a * b != 0).collect();
        Ok(match nonzero.as_slice() {
            [(chi, 1, _)] => Some(chi.clone()),
            _ => None,
        })
    }

    /// Singular points of `X` grouped by type, and the number of points of
    /// `F×D` with nontrivial stabilizer.
    pub fn singular_locus(&self) -> (Vec<SingularityRecord>, u64) {
        let g = self.group();
        let order = g.order() as u64;
        let mut types: BTreeMap<(u32, u32), (u64, u64)> = BTreeMap::new();
        let mut t_z = 0u64;
        for e1 in self.cover_f.branch() {
            let o1 = g.element_order(&e1.elem);
            let sub1 = g.subgroup_mask(std::slice::from_ref(&e1.elem));
            for e2 in self.cover_d.branch() {
                let o2 = g.element_order(&e2.elem);
                let sub2 = g.subgroup_mask(std::slice::from_ref(&e2.elem));
                let n = sub1.iter().zip(&sub2).filter(|(a, b)| **a && **b).count() as u32;
                if n < 2 {
                    continue;
                }
                let points = e1.mult as u64 * e2.mult as u64 * (order / o1 as u64) * (order / o2 as u64);
                t_z += points;
                // c = (o1/n)·h1 rotates the F-direction by 1/n
                let c = g.scale(&e1.elem, (o1 / n) as u64);
                let k2 = (1..o2)
                    .find(|&k| g.scale(&e2.elem, k as u64) == c)
                    .expect("c lies in the subgroup generated by h2");
                let q = canonical_type(n, k2 * n / o2);
                let entry = types.entry((n, q)).or_insert((0, 0));
                entry.0 += points * n as u64 / order;
                entry.1 += points;
            }
        }
        let sing = types
            .into_iter()
            .map(|((n, q), (count, z_points))| SingularityRecord { n, q, count, z_points })
            .collect();
        (sing, t_z)
    }

    pub fn invariants(&self) -> Result<InvariantReport> {
        let g = self.group();
        let order = g.order() as i64;
        let p_g = self.geometric_genus();
        let q = self.irregularity();
        let chi = 1 - q as i64 + p_g as i64;
        let (sing, t_z) = self.singular_locus();
        let fail = |what: String| Error::InternalConsistency(format!("{what} for {self}"));

        let e_z = (2 - 2 * self.genus_f as i64) * (2 - 2 * self.genus_d as i64);
        let free_part = e_z - t_z as i64;
        if free_part % order != 0 {
            return Err(fail(format!("e(Z) − t = {free_part} is not divisible by |G|")));
        }
        let mut euler_e = free_part / order;
        let mut correction = Q::from_integer(0);
        for s in &sing {
            let string = hj_expansion(s.n, s.q)?;
            euler_e += s.count as i64 * (string.len() as i64 + 1);
            correction += Q::from_integer(s.count as i64) * discrepancies(&string)?.1;
        }
        let k2_route1 = 12 * chi - euler_e;
        let k2_z = 2 * (2 * self.genus_f as i64 - 2) * (2 * self.genus_d as i64 - 2);
        let k2_route2 = Q::new(k2_z, order) + correction;
        if k2_route2 != Q::from_integer(k2_route1) {
            return Err(fail(format!(
                "K² by Noether is {k2_route1} but by adjunction is {k2_route2}"
            )));
        }
        if sing.iter().all(|s| s.n == 2) {
            let chi_z = (self.genus_f as i64 - 1) * (self.genus_d as i64 - 1);
            let chi_short = Q::new(4 * chi_z + t_z as i64, 4 * order);
            if Q::new(k2_z, order) != Q::from_integer(k2_route1) || chi_short != Q::from_integer(chi) {
                return Err(fail(format!(
                    "node-only shortcut gives K² = {}, χ = {chi_short}",
                    Q::new(k2_z, order)
                )));
            }
        }

        let canonical_character = if p_g >= 2 { self.canonical_character()? } else { None };
        if canonical_character.is_some() && p_g >= 11 {
            let a = self.cover_f.base_genus();
            let b = self.cover_d.base_genus();
            let shape = (a <= 2 && b == 0) || (a == 0 && b == 1);
            if !(2..=5).contains(&self.genus_f) || !shape {
                return Err(fail(format!(
                    "canonical pencil with p_g = {p_g} but g(F) = {}, g(A) = {a}, g(B) = {b}",
                    self.genus_f
                )));
            }
        }
        Ok(InvariantReport {
            p_g,
            q,
            chi,
            euler_e,
            k2: k2_route1,
            t_z,
            sing,
            canonical_character,
        })
    }
}

impl std::fmt::Display for SandwichSurface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F: {}; D: {}", self.cover_f, self.cover_d)
    }
}

/// `min(q, q⁻¹ mod n)`; both name the same singularity.
pub fn canonical_type(n: u32, q: u32) -> u32 {
    let q = q % n;
    let inv = (1..n).find(|&x| (x as u64 * q as u64) % n as u64 == 1).unwrap_or(q);
    q.min(inv)
}

/// Hirzebruch–Jung continued fraction `n/q = b₁ − 1/(b₂ − …)`.
pub fn hj_expansion(n: u32, q: u32) -> Result<Vec<u32>> {
    if n < 2 || q == 0 || q >= n || n.gcd(&q) != 1 {
        return Err(Error::InvalidInput(format!(
            "1/{n}(1,{q}) is not a cyclic quotient singularity type"
        )));
    }
    let (mut a, mut b) = (n, q);
    let mut out = Vec::new();
    while b != 0 {
        let c = a.div_ceil(b);
        out.push(c);
        (a, b) = (b, c * b - a);
    }
    Ok(out)
}

/// Discrepancies `a_i` of a Hirzebruch–Jung string with self-intersections
/// `−b_i`, and the change `Σ a_i (b_i − 2)` in `K²` under resolution.
pub fn discrepancies(bs: &[u32]) -> Result<(Vec<Q>, Q)> {
    if bs.iter().any(|&b| b < 2) {
        return Err(Error::InvalidInput(format!(
            "string entries must be at least 2: {bs:?}"
        )));
    }
    // Thomas algorithm on a_{i−1} − b_i a_i + a_{i+1} = b_i − 2
    let l = bs.len();
    let mut c_prime = vec![Q::from_integer(0); l];
    let mut d_prime = vec![Q::from_integer(0); l];
    for i in 0..l {
        let diag = Q::from_integer(-(bs[i] as i64));
        let rhs = Q::from_integer(bs[i] as i64 - 2);
        let (lower_c, lower_d) = if i == 0 {
            (Q::from_integer(0), Q::from_integer(0))
        } else {
            (c_prime[i - 1], d_prime[i - 1])
        };
        let denom = diag - lower_c;
        c_prime[i] = Q::from_integer(1) / denom;
        d_prime[i] = (rhs - lower_d) / denom;
    }
    let mut a = vec![Q::from_integer(0); l];
    for i in (0..l).rev() {
        a[i] = if i + 1 == l {
            d_prime[i]
        } else {
            d_prime[i] - c_prime[i] * a[i + 1]
        };
    }
    let correction = a
        .iter()
        .zip(bs)
        .map(|(ai, &b)| *ai * Q::from_integer(b as i64 - 2))
        .sum();
    Ok((a, correction))
}
