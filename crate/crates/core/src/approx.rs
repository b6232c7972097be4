//! Good approximating sequences, continued sequences and the reconstruction
//! formula.
//!
//! The vertical geodesic above ξ descends through a chain of basins
//! `γ_n(B_∞)`. The basins adjacent to `B_∞` are exactly those of
//! `M_λ = (λ, −1; 1, 0)` for λ in the ring, so the next basin is `γ_n M_λ(B_∞)`
//! for the λ whose wall the geodesic meets highest. With `W = γ_n⁻¹(ξ)` and
//! `E = c ξ − a`, the wall of λ is met at squared height
//! `N(E)·(1 − |λ − W|²) / (N(cλ + d) − N(c))`.
//!
//! ξ is carried as an exact centre in ℚ(√−d) plus a rational error radius.
//! A step is emitted only when the winning λ wins for every point of the
//! error disk.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::moebius::{BoundaryPoint, MoebiusMap};
use crate::quad_field::{QuadInt, QuadRat, RingSpec};

/// Binary digits kept when converting a double to an exact centre.
const CONVERT_BITS: u32 = 120;

/// A boundary point known up to a disk: centre `center`, radius `radius`.
#[derive(Clone, Debug, PartialEq)]
pub struct Xi {
    center: QuadRat,
    radius: BigRational,
}

impl Xi {
    pub fn exact(center: QuadRat) -> Xi {
        Xi {
            center,
            radius: BigRational::zero(),
        }
    }

    pub fn with_radius(center: QuadRat, radius: BigRational) -> Xi {
        assert!(!radius.is_negative(), "negative radius");
        Xi { center, radius }
    }

    /// A double, taken to be within one unit of the last place of the truth.
    pub fn from_complex(ring: RingSpec, z: Complex64) -> Result<Xi> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidArgument("xi must be finite".into()));
        }
        if ring.is_modular() && z.im != 0.0 {
            return Err(Error::InvalidArgument("xi must be real for ring 0".into()));
        }
        let center = QuadRat::from_complex(ring, z, CONVERT_BITS)
            .expect("finite")
            .truncate(CONVERT_BITS);
        let ulp = z.norm().max(1.0) * f64::EPSILON;
        let radius = BigRational::from_float(ulp).expect("finite")
            + BigRational::new(BigInt::one(), BigInt::one() << (CONVERT_BITS as usize - 8));
        Ok(Xi { center, radius })
    }

    /// Parses `"0.37+0.21i"`, `"-1.5"`, `"2i"`.
    pub fn parse(ring: RingSpec, s: &str) -> Result<Xi> {
        Xi::from_complex(ring, parse_complex(s)?)
    }

    pub fn center(&self) -> &QuadRat {
        &self.center
    }

    pub fn radius(&self) -> &BigRational {
        &self.radius
    }

    pub fn to_complex(&self) -> Complex64 {
        self.center.to_complex()
    }

    pub fn ring(&self) -> RingSpec {
        self.center.ring()
    }
}

/// Parses a complex number written `a+bi`, `a-bi`, `a`, or `bi`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::parse(s, "expected a+bi");
    if let Some(body) = t.strip_suffix('i') {
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            x => x,
        };
        let re: f64 = re.parse().map_err(|_| bad())?;
        let im: f64 = im.parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, im))
    } else {
        Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0))
    }
}

fn ser_text<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// One term of a good approximating sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxStep {
    pub n: usize,
    pub gamma: MoebiusMap,
    /// `z_n = γ_n(∞)`.
    #[serde(serialize_with = "ser_text")]
    pub z: BoundaryPoint,
    /// `log N(c(γ_n))`.
    pub depth: f64,
    /// Distance from ξ to the nearest lattice translate of `z_n`.
    pub dist: f64,
    /// Continued-sequence term; `a_0 = 0`.
    #[serde(serialize_with = "ser_text")]
    pub a: QuadInt,
    /// `Δ(γ_n, γ_{n+1})`, absent on the last step.
    pub delta: Option<f64>,
    /// Height at which the geodesic enters the basin of `z_n`.
    pub crossing_t: f64,
    /// The step was an exact tie, resolved toward the smaller λ.
    pub branch: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// All requested steps emitted.
    Complete,
    /// ξ is a cusp point; the sequence ended at `z = ξ`.
    Terminal,
    /// The next step could not be certified at the input precision.
    Uncertified,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxRun {
    pub steps: Vec<ApproxStep>,
    pub status: RunStatus,
}

impl ApproxRun {
    pub fn q(&self) -> Vec<QuadInt> {
        self.steps.iter().map(|s| s.gamma.c().clone()).collect()
    }

    pub fn a(&self) -> Vec<QuadInt> {
        self.steps.iter().map(|s| s.a.clone()).collect()
    }
}

fn rat_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Distance from `w` to the nearest lattice point, exact up to the final root.
fn lattice_distance(w: &QuadRat) -> f64 {
    let ring = w.ring();
    let base = w.round_to_lattice();
    let mut best: Option<BigRational> = None;
    let span: &[i64] = if ring.is_modular() { &[0] } else { &[-1, 0, 1] };
    for dx in -1..=1 {
        for &dy in span {
            let l = &base + &QuadInt::new(ring, dx, dy);
            let n = (w - &QuadRat::from(&l)).norm();
            if best.as_ref().map_or(true, |b| n < *b) {
                best = Some(n);
            }
        }
    }
    rat_to_f64(&best.expect("nonempty")).sqrt()
}

struct Scored {
    lambda: QuadInt,
    score: BigRational,
    slack: f64,
}

/// Good approximating sequence of ξ, up to `steps` terms.
pub fn good_sequence(g: &GroupSpec, xi: &Xi, steps: usize) -> Result<ApproxRun> {
    let run = good_sequence_prefix(g, xi, steps)?;
    if run.status == RunStatus::Uncertified {
        return Err(Error::Uncertified {
            certified_prefix: run.steps.len(),
        });
    }
    Ok(run)
}

/// As [`good_sequence`], but returns the certified prefix instead of failing.
pub fn good_sequence_prefix(g: &GroupSpec, xi: &Xi, steps: usize) -> Result<ApproxRun> {
    let ring = g.ring();
    if xi.ring() != ring {
        return Err(Error::InvalidArgument("xi belongs to another ring".into()));
    }
    let x0 = xi.center();
    let eps = rat_to_f64(xi.radius());
    let exact = xi.radius().is_zero();
    let mut gamma = MoebiusMap::identity(ring);
    let mut out: Vec<ApproxStep> = Vec::new();
    let mut last_t = f64::INFINITY;
    let mut status = RunStatus::Complete;

    while out.len() < steps {
        let (a, b, c, d) = (gamma.a(), gamma.b(), gamma.c(), gamma.d());
        let (qa, qb, qc, qd) = (
            QuadRat::from(a),
            QuadRat::from(b),
            QuadRat::from(c),
            QuadRat::from(d),
        );
        let e0 = &(&qc * x0) - &qa;
        if e0.is_zero() {
            status = RunStatus::Terminal;
            break;
        }
        let ne = e0.norm();
        let abs_e = rat_to_f64(&ne).sqrt();
        let rho = if exact {
            0.0
        } else {
            let room = abs_e - c.abs() * eps;
            if room <= 0.0 {
                status = RunStatus::Uncertified;
                break;
            }
            eps / (abs_e * room) * (1.0 + 1e-12)
        };
        // W = γ⁻¹(ξ) = (dξ − b)/(a − cξ)
        let w0 = &(&(&qd * x0) - &qb) / &(-&e0);
        let wc = w0.to_complex();
        let nc = c.norm();
        let mut scored: Vec<Scored> = Vec::new();
        for l in ring.lattice_points_in_disk(wc, 1.0 + rho) {
            let den = &(&(c * &l) + d).norm() - &nc;
            if !den.is_positive() {
                continue;
            }
            let dist2 = (&QuadRat::from(&l) - &w0).norm();
            if exact && dist2 >= BigRational::one() {
                continue;
            }
            let denr = BigRational::from_integer(den);
            let score = (BigRational::one() - &dist2) / &denr;
            let slack = if exact {
                0.0
            } else {
                (2.0 * rat_to_f64(&dist2).sqrt() * rho + rho * rho) / rat_to_f64(&denr)
                    * (1.0 + 1e-12)
            };
            scored.push(Scored { lambda: l, score, slack });
        }
        scored.sort_by(|p, q| q.score.cmp(&p.score).then_with(|| p.lambda.cmp(&q.lambda)));
        let Some(best) = scored.first() else {
            status = RunStatus::Uncertified;
            break;
        };
        let mut branch = false;
        if exact {
            if let Some(second) = scored.get(1) {
                branch = second.score == best.score;
            }
        } else {
            let lo = rat_to_f64(&best.score) - best.slack;
            let ok = lo > 0.0
                && scored[1..].iter().all(|o| {
                    let gap = rat_to_f64(&(&best.score - &o.score));
                    gap * (1.0 - 1e-12) > best.slack + o.slack
                });
            if !ok {
                status = RunStatus::Uncertified;
                break;
            }
        }
        let t2 = rat_to_f64(&(&ne * &best.score));
        let crossing_t = t2.max(0.0).sqrt();
        let lambda = best.lambda.clone();
        let m = MoebiusMap::new(lambda.clone(), -ring.one(), ring.one(), ring.zero())
            .expect("unimodular");
        let next = &gamma * &m;
        let n = out.len();
        let z = next.apply_boundary(&BoundaryPoint::Infinity);
        let zq = next.endpoint().expect("c ≠ 0 after a step");
        let a_n = if n == 0 { ring.zero() } else { lambda };
        if let Some(prev) = out.last_mut() {
            prev.delta = Some(MoebiusMap::delta(&prev.gamma, &next));
        }
        debug_assert!(crossing_t < last_t || exact && crossing_t <= last_t);
        last_t = crossing_t;
        out.push(ApproxStep {
            n,
            depth: next.depth().expect("c ≠ 0"),
            dist: lattice_distance(&(x0 - &zq)),
            a: a_n,
            delta: None,
            crossing_t,
            branch,
            z,
            gamma: next.clone(),
        });
        gamma = next;
    }
    Ok(ApproxRun { steps: out, status })
}

/// `a_{n+1} = γ_n⁻¹(z_{n+1}) − γ_n⁻¹(z_{n−1})` with `γ_{−1} = 1`, `z_{−1} = ∞`
/// and `a_0 = 0`, computed from the matrices alone.
pub fn continued_sequence(gammas: &[MoebiusMap]) -> Result<Vec<QuadInt>> {
    let Some(first) = gammas.first() else {
        return Ok(Vec::new());
    };
    let ring = first.ring();
    let mut out = vec![ring.zero()];
    for n in 0..gammas.len().saturating_sub(1) {
        let inv = gammas[n].inverse();
        let next = inv.apply_boundary(&gammas[n + 1].apply_boundary(&BoundaryPoint::Infinity));
        let prev_point = if n == 0 {
            BoundaryPoint::Infinity
        } else {
            gammas[n - 1].apply_boundary(&BoundaryPoint::Infinity)
        };
        let prev = inv.apply_boundary(&prev_point);
        let (Some(p), Some(q)) = (next.to_quad_rat(), prev.to_quad_rat()) else {
            return Err(Error::InconsistentBasinChain {
                step: n + 1,
                detail: "a basin centre maps to infinity".into(),
            });
        };
        let diff = &p - &q;
        match diff.to_quad_int() {
            Some(v) => out.push(v),
            None => {
                return Err(Error::InconsistentBasinChain {
                    step: n + 1,
                    detail: format!("difference {diff} is not integral"),
                })
            }
        }
    }
    Ok(out)
}

/// `z_n = z_0 + Σ_{k=1}^{n} 1/x_k` with `x_k = Σ_{i=0}^{k} (−1)^{k+i+1} q_{i−1}² a_i`
/// and `q_{−1} = 0`. Needs `a_0..a_n` and `q_0..q_{n−1}`; returns `z_0..z_n`.
pub fn reconstruct(a: &[QuadInt], q: &[QuadInt], z0: &QuadRat) -> Result<Vec<QuadRat>> {
    let n = a.len().saturating_sub(1);
    if q.len() < n {
        return Err(Error::InvalidArgument(format!(
            "need {n} denominators, got {}",
            q.len()
        )));
    }
    let ring = z0.ring();
    let mut out = vec![z0.clone()];
    let mut z = z0.clone();
    let mut x = ring.zero();
    for k in 1..=n {
        let qq = &q[k - 1] * &q[k - 1];
        x = -(&x + &(&qq * &a[k]));
        if x.is_zero() {
            return Err(Error::DegenerateStep { k });
        }
        z = &z + &QuadRat::from(&x).inv().expect("nonzero");
        out.push(z.clone());
    }
    Ok(out)
}

/// Per-step values of `N(q_n)·|ξ − z_n|` and their tail minima over the run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XiHurwitz {
    pub values: Vec<f64>,
    /// `min_{k ≥ n} values[k]`; the finite-run estimate of the liminf.
    pub tail_min: Vec<f64>,
    /// False when the sequence terminated at a cusp.
    pub tail_defined: bool,
}

pub fn hurwitz_of_xi(run: &ApproxRun, xi: &Xi) -> XiHurwitz {
    let values: Vec<f64> = run
        .steps
        .iter()
        .map(|s| {
            let zq = s.gamma.endpoint().expect("c ≠ 0");
            let d = rat_to_f64(&(xi.center() - &zq).norm()).sqrt();
            rat_to_f64(&BigRational::from_integer(s.gamma.c().norm())) * d
        })
        .collect();
    let mut tail_min = values.clone();
    for i in (0..tail_min.len().saturating_sub(1)).rev() {
        tail_min[i] = tail_min[i].min(tail_min[i + 1]);
    }
    XiHurwitz {
        values,
        tail_min,
        tail_defined: run.status != RunStatus::Terminal,
    }
}

/// Classical partial quotients `b_1, b_2, …` of `x ∈ (0, 1)`, at most `n`.
pub fn classical_partial_quotients(x: &BigRational, n: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut r = x.abs() - x.abs().floor();
    while out.len() < n && !r.is_zero() {
        let inv = r.recip();
        let b = inv.floor();
        out.push(b.to_integer());
        r = inv - b;
    }
    out
}
