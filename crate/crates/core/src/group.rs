//! Double-coset enumeration by `|c|` and bounded conjugate search.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moebius::{BoundaryPoint, MoebiusMap};
use crate::par::{self, Exec};
use crate::quad_field::{QuadInt, QuadRat, RingSpec};

/// PSL₂ of the ring with its cusp stabilizer Γ_∞ (translations by the ring,
/// plus rotations `z ↦ u²z` when extra units exist).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSpec {
    ring: RingSpec,
    generators: Vec<MoebiusMap>,
}

impl GroupSpec {
    pub fn new(ring: RingSpec) -> Result<Self> {
        let mut generators = vec![MoebiusMap::s(ring), MoebiusMap::translation(&ring.one())];
        if !ring.is_modular() {
            generators.push(MoebiusMap::translation(&ring.w()));
        }
        for u in ring.units_mod_sign().into_iter().skip(1).take(1) {
            generators.push(MoebiusMap::rotation(&u)?);
        }
        // normalization: some element outside Γ_∞ has |c| = 1
        if !generators.iter().any(|g| g.c().is_one()) {
            return Err(Error::ConstructionFailure("no element with |c| = 1".into()));
        }
        Ok(GroupSpec { ring, generators })
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    /// `S`, `T`, translation by ω, and one unit rotation where available.
    pub fn generators(&self) -> &[MoebiusMap] {
        &self.generators
    }

    /// Translations and rotations generating Γ_∞.
    pub fn cusp_stabilizer(&self) -> &[MoebiusMap] {
        &self.generators[1..]
    }
}

/// A representative of a double coset Γ_∞γΓ_∞.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CosetRep {
    pub gamma: MoebiusMap,
    pub canonical: bool,
}

impl CosetRep {
    pub fn depth(&self) -> f64 {
        self.gamma.depth().unwrap_or(f64::NEG_INFINITY)
    }

    pub fn endpoint(&self) -> BoundaryPoint {
        self.gamma.apply_boundary(&BoundaryPoint::Infinity)
    }
}

/// Canonical associates `c` with `1 ≤ N(c) ≤ bound`, sorted by `(N(c), c)`.
pub fn denominators(ring: RingSpec, bound: &BigInt) -> Vec<QuadInt> {
    let b = bound.to_f64().unwrap_or(f64::INFINITY);
    let mut set: Vec<QuadInt> = ring
        .lattice_points_in_disk(num_complex::Complex64::new(0.0, 0.0), b.sqrt())
        .into_iter()
        .filter(|c| !c.is_zero() && &c.norm() <= bound)
        .map(|c| c.canonical_associate().0)
        .collect();
    set.sort_by(|p, q| p.norm().cmp(&q.norm()).then_with(|| p.lex_cmp(q)));
    set.dedup();
    set
}

/// Reduces `a` modulo `c·Λ` so that `a/c` lies in the half-open unit cell.
pub fn reduce_mod(a: &QuadInt, c: &QuadInt) -> QuadInt {
    let f = QuadRat::from_fraction(a, c).expect("c ≠ 0").floor_to_lattice();
    a - &(&f * c)
}

/// Canonical residues `a mod c` coprime to `c`, one per class under `a ~ u²a`.
fn residues(ring: RingSpec, c: &QuadInt) -> Vec<QuadInt> {
    let n = c.norm().to_i64().expect("small denominator");
    let squares: Vec<QuadInt> = {
        let mut v: Vec<QuadInt> = ring.units().iter().map(|u| u * u).collect();
        v.sort();
        v.dedup();
        v
    };
    let ys = if ring.is_modular() { 0..1 } else { 0..n };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for y in ys {
        for x in 0..n {
            let a = reduce_mod(&QuadInt::new(ring, x, y), c);
            if !seen.insert(a.clone()) {
                continue;
            }
            if !QuadInt::gcd_bezout(&a, c).map(|g| g.0.is_unit()).unwrap_or(false) {
                continue;
            }
            let rep = squares
                .iter()
                .map(|s| reduce_mod(&(s * &a), c))
                .min()
                .expect("units nonempty");
            if rep == a {
                out.push(a);
            }
        }
    }
    out.sort();
    out
}

/// Completes a coprime column `(a, c)`, `c ≠ 0`, to a matrix with `d/c` in
/// the unit cell.
pub fn complete(a: &QuadInt, c: &QuadInt) -> MoebiusMap {
    let (g, s, t) = QuadInt::gcd_bezout(a, c).expect("c ≠ 0");
    debug_assert!(g.is_one());
    let d = reduce_mod(&s, c);
    // d − s = k·c, so b = −t + k·a keeps ad − bc = 1
    let k = (&d - &s).exact_div(c).expect("same residue");
    let b = &(-&t) + &(&k * a);
    MoebiusMap::new(a.clone(), b, c.clone(), d).expect("Bézout completion")
}

/// One canonical representative per double coset with `1 ≤ |c| ≤ c_max`,
/// sorted by `(N(c), c, a)`.
pub fn enumerate_by_c(g: &GroupSpec, c_max: f64, exec: Exec) -> Vec<CosetRep> {
    if !(c_max >= 1.0) {
        return Vec::new();
    }
    let ring = g.ring;
    let bound = BigInt::from((c_max * c_max + 1e-9).floor() as i64);
    let cs = denominators(ring, &bound);
    par::flat_map(exec, &cs, |c| {
        residues(ring, c)
            .iter()
            .map(|a| CosetRep {
                gamma: complete(a, c),
                canonical: true,
            })
            .collect()
    })
}

/// Result of [`conjugate_search`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugateSearch {
    pub min_c: f64,
    #[serde(skip)]
    pub min_norm: BigInt,
    pub witness: MoebiusMap,
    /// Number of distinct conjugates (modulo Γ_∞) visited.
    pub visited: usize,
    #[serde(skip)]
    pub visited_keys: Vec<ConjugacyKey>,
}

/// Canonical form of an element modulo conjugation by Γ_∞ and sign.
pub type ConjugacyKey = [QuadInt; 4];

/// Canonical representative of `{δγδ⁻¹ : δ ∈ Γ_∞}`; requires `c ≠ 0`.
pub fn conjugacy_key(gamma: &MoebiusMap) -> ConjugacyKey {
    let ring = gamma.ring();
    let (a, b, c, d) = (gamma.a(), gamma.b(), gamma.c(), gamma.d());
    let mut best: Option<ConjugacyKey> = None;
    for u in ring.units() {
        let u2 = &u * &u;
        let u2inv = u2.unit_inverse().expect("unit");
        let cc = &u2inv * c;
        let bb = &u2 * b;
        let m = QuadRat::from_fraction(&(a - d), &(&ring.int(2) * &cc)).expect("c ≠ 0");
        let l = -m.round_to_lattice();
        let aa = a + &(&l * &cc);
        let dd = d - &(&l * &cc);
        let b2 = &(&bb + &(&l * &(d - a))) - &(&(&l * &l) * &cc);
        for sign in [false, true] {
            let key = if sign {
                [-&cc, -&aa, -&b2, -&dd]
            } else {
                [cc.clone(), aa.clone(), b2.clone(), dd.clone()]
            };
            if best.as_ref().map_or(true, |k| key < *k) {
                best = Some(key);
            }
        }
    }
    best.expect("units nonempty")
}

/// Elements `S τ_λ γ τ_λ⁻¹ S⁻¹` with `0 < N(c) ≤ c_cap²`.
fn moves(gamma: &MoebiusMap, c_cap: f64) -> Vec<MoebiusMap> {
    let ring = gamma.ring();
    let (a, b, c, d) = (gamma.a(), gamma.b(), gamma.c(), gamma.d());
    let cc = c.to_complex();
    let m = (a - d).to_complex() / (2.0 * cc);
    let disc = gamma.discriminant().abs();
    let radius = (c_cap / cc.norm() + disc * disc / (4.0 * cc.norm_sqr())).sqrt();
    let cap = BigInt::from((c_cap * c_cap + 1e-9).floor() as i64);
    ring.lattice_points_in_disk(-m, radius)
        .into_iter()
        .filter_map(|l| {
            let b2 = &(b + &(&l * &(d - a))) - &(&(&l * &l) * c);
            let n = b2.norm();
            if n.is_zero() || n > cap {
                return None;
            }
            let a2 = a + &(&l * c);
            let d2 = d - &(&l * c);
            Some(MoebiusMap::new(d2, -c, -b2, a2).expect("conjugate"))
        })
        .collect()
}

/// Minimum `|c|` over conjugates `δγδ⁻¹` reached by words with at most
/// `word_len` occurrences of `S`, keeping only intermediate conjugates with
/// `|c| ≤ c_cap`. Monotone non-increasing in `word_len`.
pub fn conjugate_search(
    g: &GroupSpec,
    gamma: &MoebiusMap,
    word_len: usize,
    c_cap: f64,
    exec: Exec,
) -> Result<ConjugateSearch> {
    assert_eq!(g.ring, gamma.ring(), "mixed rings");
    if gamma.is_parabolic() {
        return Err(Error::NoAxis("parabolic element"));
    }
    if !gamma.is_loxodromic() {
        return Err(Error::NoAxis("elliptic element"));
    }
    let start = conjugacy_key(gamma);
    let mut seen: HashSet<ConjugacyKey> = HashSet::from([start.clone()]);
    let mut keys = vec![start];
    let mut best = (gamma.c().norm(), gamma.clone());
    let mut frontier = vec![gamma.clone()];
    for _ in 0..word_len {
        let expanded = par::map(exec, &frontier, |h| {
            moves(h, c_cap)
                .into_iter()
                .map(|k| (conjugacy_key(&k), k))
                .collect::<Vec<_>>()
        });
        let mut next = Vec::new();
        for (key, k) in expanded.into_iter().flatten() {
            if seen.contains(&key) {
                continue;
            }
            seen.insert(key.clone());
            keys.push(key);
            let n = k.c().norm();
            if n < best.0 {
                best = (n, k.clone());
            }
            next.push(k);
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(ConjugateSearch {
        min_c: best.0.to_f64().unwrap_or(f64::INFINITY).sqrt(),
        min_norm: best.0,
        witness: best.1,
        visited: keys.len(),
        visited_keys: keys,
    })
}
