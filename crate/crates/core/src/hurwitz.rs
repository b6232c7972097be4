//! Height spectra and the min-max estimate of the Hurwitz constant.
//!
//! The Hurwitz constant satisfies `1/(2K) = inf_γ max_δ ht(δγδ⁻¹)` over
//! hyperbolic (loxodromic) γ. The estimate samples classes from a bounded
//! element ball and approximates each class maximum with a bounded conjugate
//! search. Sampling biases the infimum up; truncated search biases class
//! maxima down. Classes whose search reaches `|c| = 1` are exact.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{conjugacy_key, conjugate_search, enumerate_by_c, ConjugacyKey, GroupSpec};
use crate::moebius::MoebiusMap;
use crate::par::{self, Exec};
use crate::quad_field::QuadInt;

/// Candidates searched together; fixed so both execution modes agree.
const BATCH: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassRecord {
    pub trace: QuadInt,
    pub best_witness: MoebiusMap,
    pub min_c: f64,
    pub max_height: f64,
    /// `min_c = 1`, so no conjugate has a larger height.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HurwitzParams {
    pub ring: u32,
    pub c_max: f64,
    pub trace_max: f64,
    pub word_len: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HurwitzEstimate {
    pub params: HurwitzParams,
    /// `1/(2·min height)` over the sampled classes.
    pub k_value: f64,
    /// `exp h''`, the same number as `1/(2K)`.
    pub exp_h2: f64,
    /// `1/(2·h)` for the lowest certified class maximum; a rigorous lower bound
    /// for K when present.
    pub k_lower_evidence: Option<f64>,
    pub achieving: ClassRecord,
    pub elements: usize,
    pub classes_searched: usize,
}

struct Candidate {
    h0: f64,
    gamma: MoebiusMap,
}

/// Elements `D_u τ_ν γ` with `γ` a double-coset representative (`|c| ≤ c_max`),
/// `u` a unit and `|tr| ≤ trace_max`, loxodromic only; sorted by own height.
fn candidates(g: &GroupSpec, c_max: f64, trace_max: f64, exec: Exec) -> Vec<Candidate> {
    let ring = g.ring();
    let reps = enumerate_by_c(g, c_max, exec);
    let mut out = par::flat_map(exec, &reps, |rep| {
        let mut v = Vec::new();
        let (a, b, c, d) = (rep.gamma.a(), rep.gamma.b(), rep.gamma.c(), rep.gamma.d());
        for u in ring.units_mod_sign() {
            let ui = u.unit_inverse().expect("unit");
            let (ua, ub, uc, ud) = (&u * a, &u * b, &ui * c, &ui * d);
            let cc = uc.to_complex();
            let centre = -(&ua + &ud).to_complex() / cc;
            for nu in ring.lattice_points_in_disk(centre, trace_max / cc.norm()) {
                let gamma = MoebiusMap::new(
                    &ua + &(&nu * &uc),
                    &ub + &(&nu * &ud),
                    uc.clone(),
                    ud.clone(),
                )
                .expect("unimodular");
                if gamma.trace().abs() > trace_max + 1e-12 || !gamma.is_loxodromic() {
                    continue;
                }
                let h0 = gamma.height().expect("loxodromic with c ≠ 0");
                v.push(Candidate { h0, gamma });
            }
        }
        v
    });
    out.sort_by(|p, q| p.h0.total_cmp(&q.h0).then_with(|| p.gamma.cmp(&q.gamma)));
    out
}

pub fn hurwitz_estimate(
    g: &GroupSpec,
    c_max: f64,
    trace_max: f64,
    word_len: usize,
    exec: Exec,
) -> Result<HurwitzEstimate> {
    if c_max < 1.0 || trace_max < 1.0 {
        return Err(Error::InvalidArgument("bounds must be at least 1".into()));
    }
    let cands = candidates(g, c_max, trace_max, exec);
    if cands.is_empty() {
        return Err(Error::EmptySearch);
    }
    let mut best: Option<ClassRecord> = None;
    let mut lowest_certified: Option<f64> = None;
    let mut visited: HashSet<ConjugacyKey> = HashSet::new();
    let mut searched = 0usize;
    let mut i = 0usize;
    let bound = |b: &Option<ClassRecord>| b.as_ref().map_or(f64::INFINITY, |r| r.max_height);
    while i < cands.len() && cands[i].h0 < bound(&best) {
        let mut batch = Vec::new();
        while i < cands.len() && batch.len() < BATCH && cands[i].h0 < bound(&best) {
            let key = conjugacy_key(&cands[i].gamma);
            if !visited.contains(&key) {
                batch.push(&cands[i]);
            }
            i += 1;
        }
        let results = par::map(exec, &batch, |cand| {
            let cap = 2.0 * c_max.max(cand.gamma.c().abs());
            conjugate_search(g, &cand.gamma, word_len, cap, Exec::Sequential)
        });
        for (cand, res) in batch.iter().zip(results) {
            let res = res?;
            if visited.contains(&conjugacy_key(&cand.gamma)) {
                continue;
            }
            searched += 1;
            visited.extend(res.visited_keys.iter().cloned());
            let h = cand.gamma.height_numerator() / (2.0 * res.min_c);
            let certified = res.min_norm == BigInt::one();
            if certified && lowest_certified.map_or(true, |l| h < l) {
                lowest_certified = Some(h);
            }
            if h < bound(&best) {
                let t = cand.gamma.trace();
                best = Some(ClassRecord {
                    trace: std::cmp::max_by(-&t, t, |p, q| p.lex_cmp(q)),
                    best_witness: res.witness,
                    min_c: res.min_c,
                    max_height: h,
                    certified,
                });
            }
        }
    }
    let achieving = best.ok_or(Error::EmptySearch)?;
    let h = achieving.max_height;
    Ok(HurwitzEstimate {
        params: HurwitzParams {
            ring: g.ring().d(),
            c_max,
            trace_max,
            word_len,
        },
        k_value: 1.0 / (2.0 * h),
        exp_h2: h,
        k_lower_evidence: lowest_certified.map(|l| 1.0 / (2.0 * l)),
        achieving,
        elements: cands.len(),
        classes_searched: searched,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub height: f64,
    pub depth: f64,
    pub multiplicity: usize,
    pub witness: MoebiusMap,
}

/// Element heights over the bounded ball, ascending, with multiplicities.
pub fn height_spectrum(g: &GroupSpec, c_max: f64, trace_max: f64, exec: Exec) -> Vec<SpectrumEntry> {
    let mut groups: BTreeMap<(BigInt, BigInt), SpectrumEntry> = BTreeMap::new();
    for cand in candidates(g, c_max, trace_max, exec) {
        let nc = cand.gamma.c().norm();
        let key = (cand.gamma.discriminant().norm(), nc.clone());
        groups
            .entry(key)
            .and_modify(|e| e.multiplicity += 1)
            .or_insert(SpectrumEntry {
                height: cand.h0,
                depth: nc.to_f64().unwrap_or(f64::INFINITY).ln(),
                multiplicity: 1,
                witness: cand.gamma,
            });
    }
    let mut v: Vec<SpectrumEntry> = groups.into_values().collect();
    v.sort_by(|p, q| p.height.total_cmp(&q.height).then(p.depth.total_cmp(&q.depth)));
    v
}
