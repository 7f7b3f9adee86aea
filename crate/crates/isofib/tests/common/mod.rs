//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's own formulas; only its data types are reused.
#![allow(dead_code)]

use isofib::{CharacterIndex, CoverData, FiniteAbelianGroup, GroupElement};
use num_rational::Ratio;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

pub fn group(f: &[u32]) -> FiniteAbelianGroup {
    FiniteAbelianGroup::new(f).unwrap()
}

/// Exponent of the group from its factors.
pub fn exponent(g: &FiniteAbelianGroup) -> u64 {
    g.factors().iter().fold(1, |acc, &n| lcm(acc, n as u64))
}

/// `⟨χ,h⟩ ∈ [0,1)` as a numerator over the exponent.
pub fn pairing(g: &FiniteAbelianGroup, chi: &[u32], h: &[u32]) -> u64 {
    let e = exponent(g);
    let s: u64 = g
        .factors()
        .iter()
        .zip(chi.iter().zip(h))
        .map(|(&n, (&c, &x))| c as u64 * x as u64 * (e / n as u64))
        .sum();
    s % e
}

/// Order of `h` as the lcm of its coordinate orders.
pub fn order(g: &FiniteAbelianGroup, h: &[u32]) -> u64 {
    g.factors()
        .iter()
        .zip(h)
        .fold(1, |acc, (&n, &x)| lcm(acc, n as u64 / gcd(n as u64, x as u64)))
}

/// `Σ mult · ⟨χ,h⟩`, which must be an integer.
pub fn degree(c: &CoverData, chi: &[u32]) -> u64 {
    let g = c.group();
    let e = exponent(g);
    let s: u64 = c
        .branch()
        .iter()
        .map(|b| b.mult as u64 * pairing(g, chi, b.elem.coords()))
        .sum();
    assert_eq!(s % e, 0, "fractional degree");
    s / e
}

/// Holomorphic 1-forms in the χ-eigenspace, by Chevalley–Weil.
pub fn cw_dim(c: &CoverData, chi: &[u32]) -> u64 {
    let b = c.base_genus() as u64;
    if chi.iter().all(|&x| x == 0) {
        return b;
    }
    match degree(c, chi) {
        0 => b - 1,
        l => l + b - 1,
    }
}

pub fn all_tuples(f: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &n in f {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn cw_genus(c: &CoverData) -> u64 {
    all_tuples(c.group().factors()).iter().map(|chi| cw_dim(c, chi)).sum()
}

/// Riemann–Hurwitz for a Galois cover of a genus-`b` curve.
pub fn rh_genus(c: &CoverData) -> i64 {
    let n = c.group().order() as i64;
    let ram: i64 = c
        .branch()
        .iter()
        .map(|e| e.mult as i64 * (n - n / order(c.group(), e.elem.coords()) as i64))
        .sum();
    let twice = n * (2 * c.base_genus() as i64 - 2) + ram;
    assert_eq!(twice % 2, 0);
    twice / 2 + 1
}

fn random_element(rng: &mut ChaCha8Rng, g: &FiniteAbelianGroup) -> Vec<u32> {
    g.factors().iter().map(|&n| rng.gen_range(0..n)).collect()
}

/// A valid cover with group of order at most 16 and base genus at most 2.
pub fn random_cover(rng: &mut ChaCha8Rng, groups: &[FiniteAbelianGroup]) -> CoverData {
    loop {
        let g = &groups[rng.gen_range(0..groups.len())];
        let b = rng.gen_range(0..=2u32);
        let k = rng.gen_range(0..=5usize);
        let mut branch: Vec<Vec<u32>> = (0..k).map(|_| random_element(rng, g)).collect();
        branch.retain(|h| h.iter().any(|&x| x != 0));
        // close up the monodromy
        let mut sum = vec![0u32; g.rank()];
        for h in &branch {
            for (i, (&x, &n)) in h.iter().zip(g.factors()).enumerate() {
                sum[i] = (sum[i] + x) % n;
            }
        }
        let closing: Vec<u32> = sum.iter().zip(g.factors()).map(|(&s, &n)| (n - s) % n).collect();
        if closing.iter().any(|&x| x != 0) {
            branch.push(closing);
        }
        let twist: Vec<GroupElement> = (0..2 * b)
            .map(|_| g.element(&random_element(rng, g)).unwrap())
            .collect();
        let branch: Vec<(GroupElement, u32)> = branch.iter().map(|h| (g.element(h).unwrap(), 1)).collect();
        if let Ok(c) = CoverData::new(g, b, branch, twist) {
            return c;
        }
    }
}

/// Continued fraction `b₁ − 1/(b₂ − …)` evaluated back to a reduced pair.
pub fn evaluate_string(bs: &[u32]) -> (u64, u64) {
    // continuants from the tail: value = r/s
    let (mut r, mut s): (i64, i64) = (1, 0);
    for &b in bs.iter().rev() {
        let nr = b as i64 * r - s;
        s = r;
        r = nr;
    }
    let d = gcd(r as u64, s as u64);
    (r as u64 / d, s as u64 / d)
}

/// Local K² correction of a cyclic quotient singularity `1/n(1,q)` with
/// string `bs`, as an exact fraction over `n`: `2 − (2+q+q')/n − Σ(bᵢ−2)`.
pub fn k2_correction_times_n(n: u64, q: u64, bs: &[u32]) -> i64 {
    let q_inv = (1..n).find(|x| x * q % n == 1).unwrap();
    let tail: i64 = bs.iter().map(|&b| b as i64 - 2).sum();
    2 * n as i64 - (2 + q + q_inv) as i64 - tail * n as i64
}

pub fn character(g: &FiniteAbelianGroup, c: &[u32]) -> CharacterIndex {
    g.character(c).unwrap()
}

/// Hirzebruch–Jung string by rounding up, independent of the library.
pub fn hj_oracle(n: u64, q: u64) -> Vec<u32> {
    let (mut a, mut b) = (n, q);
    let mut out = Vec::new();
    while b > 0 {
        let c = a.div_ceil(b);
        out.push(c as u32);
        (a, b) = (b, c * b - a);
    }
    out
}

/// `(n, q, orbit count, points of Z)` for each pair of branch entries.
pub fn singular_oracle(f: &CoverData, d: &CoverData) -> (Vec<(u64, u64, u64)>, u64) {
    let g = f.group();
    let order = g.order() as u64;
    let elems = all_tuples(g.factors());
    let multiple = |h: &[u32], k: u64| -> Vec<u32> {
        h.iter()
            .zip(g.factors())
            .map(|(&x, &n)| ((x as u64 * k) % n as u64) as u32)
            .collect()
    };
    let mut out = Vec::new();
    let mut t = 0;
    for e1 in f.branch() {
        let h1 = e1.elem.coords();
        let o1 = order_of(g, h1);
        let span1: Vec<Vec<u32>> = (0..o1).map(|k| multiple(h1, k)).collect();
        for e2 in d.branch() {
            let h2 = e2.elem.coords();
            let o2 = order_of(g, h2);
            let span2: Vec<Vec<u32>> = (0..o2).map(|k| multiple(h2, k)).collect();
            let n = elems.iter().filter(|x| span1.contains(x) && span2.contains(x)).count() as u64;
            if n < 2 {
                continue;
            }
            let points = e1.mult as u64 * e2.mult as u64 * (order / o1) * (order / o2);
            t += points;
            let c = multiple(h1, o1 / n);
            let k = (1..o2).find(|&k| multiple(h2, k) == c).unwrap();
            let j = k * n / o2;
            let j_inv = (1..n).find(|x| x * j % n == 1).unwrap();
            out.push((n, j.min(j_inv), points * n / order));
        }
    }
    (out, t)
}

pub fn order_of(g: &FiniteAbelianGroup, h: &[u32]) -> u64 {
    order(g, h)
}

/// Every invariant recomputed from scratch.
pub fn oracle_report(f: &CoverData, d: &CoverData) -> (u64, u64, i64, i64, Ratio<i64>, u64) {
    let g = f.group();
    let chars = all_tuples(g.factors());
    let inv = |c: &[u32]| -> Vec<u32> { c.iter().zip(g.factors()).map(|(&x, &n)| (n - x) % n).collect() };
    let p_g: u64 = chars.iter().map(|c| cw_dim(f, c) * cw_dim(d, &inv(c))).sum();
    let q = (f.base_genus() + d.base_genus()) as u64;
    let chi = 1 - q as i64 + p_g as i64;
    let (gf, gd) = (cw_genus(f) as i64, cw_genus(d) as i64);
    let order = g.order() as i64;
    let (sing, t) = singular_oracle(f, d);
    let mut e = Ratio::new((2 - 2 * gf) * (2 - 2 * gd) - t as i64, order);
    let mut k2 = Ratio::new(2 * (2 * gf - 2) * (2 * gd - 2), order);
    for &(n, qq, count) in &sing {
        let bs = hj_oracle(n, qq);
        e += Ratio::from_integer(count as i64 * (bs.len() as i64 + 1));
        k2 += Ratio::new(count as i64 * k2_correction_times_n(n, qq, &bs), n as i64);
    }
    assert!(e.is_integer());
    (p_g, q, chi, e.to_integer(), k2, t)
}
