//! Isometric spheres, the ceiling of the basin of ∞, and the cell structure of
//! its boundary over one fundamental translation cell.
//!
//! The ceiling over `z` is `max √(r² − |z − p|²)` over isometric spheres with
//! centre `p` and radius `r`. Comparing squared heights makes every dominance
//! boundary a straight line with rational coefficients, so cells are clipped
//! exactly.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{complete, denominators, reduce_mod, CosetRep, GroupSpec};
use crate::moebius::{BoundaryPoint, MoebiusMap, UpperPoint};
use crate::par::{self, Exec};
use crate::quad_field::{QuadInt, QuadRat, RingSpec};

/// Relative tolerance for reporting ties in [`ceiling`].
pub const TIE_TOL: f64 = 1e-12;

/// The hemisphere `S_γ`, centre `γ⁻¹(∞)`, radius `1/|c(γ)|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsoSphere {
    /// γ with `γ⁻¹(∞)` the centre.
    pub owner: MoebiusMap,
    #[serde(serialize_with = "ser_point")]
    pub center: BoundaryPoint,
    pub radius: f64,
    #[serde(skip)]
    pub radius_sq: BigRational,
    #[serde(skip)]
    exact_center: QuadRat,
}

fn ser_point<S: serde::Serializer>(p: &BoundaryPoint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(p)
}

impl IsoSphere {
    /// Sphere centred at the reduced fraction `a/c`.
    fn new(a: &QuadInt, c: &QuadInt) -> IsoSphere {
        let h = complete(a, c);
        let n = c.norm();
        IsoSphere {
            owner: h.inverse(),
            center: BoundaryPoint::fraction(a.clone(), c.clone()),
            radius: 1.0 / n.to_f64().unwrap_or(f64::INFINITY).sqrt(),
            radius_sq: BigRational::new(BigInt::one(), n),
            exact_center: QuadRat::from_fraction(a, c).expect("c ≠ 0"),
        }
    }

    pub fn center_complex(&self) -> Complex64 {
        self.exact_center.to_complex()
    }

    pub fn exact_center(&self) -> &QuadRat {
        &self.exact_center
    }

    /// The element whose horoball at `γ(∞) = centre` is the basin across this
    /// sphere.
    pub fn neighbour(&self) -> CosetRep {
        CosetRep {
            gamma: self.owner.inverse(),
            canonical: false,
        }
    }

    fn height_sq_at(&self, z: Complex64) -> f64 {
        self.radius * self.radius - (z - self.center_complex()).norm_sqr()
    }
}

/// Isometric spheres with `|c| ≤ c_max` whose centre lies within `reach` of
/// the rectangle `[u0, u1] × [v0, v1]` in lattice coordinates.
pub fn spheres_near(
    g: &GroupSpec,
    c_max: f64,
    (u0, u1): (f64, f64),
    (v0, v1): (f64, f64),
    reach: f64,
    exec: Exec,
) -> Vec<IsoSphere> {
    let ring = g.ring();
    if c_max < 1.0 {
        return Vec::new();
    }
    let bound = BigInt::from((c_max * c_max + 1e-9).floor() as i64);
    let cs = denominators(ring, &bound);
    let im = if ring.is_modular() { 1.0 } else { ring.omega().im };
    let (vlo, vhi) = if ring.is_modular() {
        (0, 0)
    } else {
        ((v0 - reach / im).floor() as i64 - 1, (v1 + reach / im).ceil() as i64 + 1)
    };
    let spread = reach + (vhi - vlo).unsigned_abs() as f64;
    let (ulo, uhi) = ((u0 - spread).floor() as i64 - 1, (u1 + spread).ceil() as i64 + 1);
    let mut out = par::flat_map(exec, &cs, |c| {
        let mut v = Vec::new();
        for a in all_residues(ring, c) {
            for y in vlo..=vhi {
                for x in ulo..=uhi {
                    let lam = QuadInt::new(ring, x, y);
                    let p = &a + &(&lam * c);
                    let s = IsoSphere::new(&p, c);
                    let (u, w) = ring.coords_of(s.center_complex());
                    let du = (u0 - u).max(u - u1).max(0.0);
                    let dv = (v0 - w).max(w - v1).max(0.0);
                    if du <= reach + 1.0 && dv * im <= reach + 1e-9 {
                        v.push(s);
                    }
                }
            }
        }
        v
    });
    out.sort_by(|p, q| {
        p.radius_sq
            .cmp(&q.radius_sq)
            .reverse()
            .then_with(|| p.exact_center.lex_cmp(&q.exact_center))
    });
    out
}

/// All residues `a mod c` coprime to `c`, with `a/c` in the unit cell.
fn all_residues(ring: RingSpec, c: &QuadInt) -> Vec<QuadInt> {
    let n = c.norm().to_i64().expect("small denominator");
    let ys = if ring.is_modular() { 0..1 } else { 0..n };
    let mut out: Vec<QuadInt> = Vec::new();
    for y in ys {
        for x in 0..n {
            let a = reduce_mod(&QuadInt::new(ring, x, y), c);
            if QuadInt::gcd_bezout(&a, c).map(|g| g.0.is_unit()).unwrap_or(false) {
                out.push(a);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Result of [`ceiling`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ceiling {
    pub height: f64,
    pub dominator: CosetRep,
    /// Centres of all spheres attaining the height within [`TIE_TOL`].
    pub ties: Vec<String>,
}

/// Height of the basin of ∞ above `z`, and the neighbouring basin.
pub fn ceiling(g: &GroupSpec, z: Complex64, c_max: f64) -> Result<Ceiling> {
    if c_max < 1.0 {
        return Err(Error::InvalidArgument("c_max must be at least 1".into()));
    }
    let ring = g.ring();
    let z = if ring.is_modular() {
        Complex64::new(z.re, 0.0)
    } else {
        z
    };
    let bound = BigInt::from((c_max * c_max + 1e-9).floor() as i64);
    let mut cands: Vec<(f64, IsoSphere)> = Vec::new();
    for c in denominators(ring, &bound) {
        let cz = c.to_complex() * z;
        for a in ring.lattice_points_in_disk(cz, 1.0) {
            if !QuadInt::gcd_bezout(&a, &c).map(|g| g.0.is_unit()).unwrap_or(false) {
                continue;
            }
            let s = IsoSphere::new(&a, &c);
            let h2 = s.height_sq_at(z);
            if h2 > 0.0 {
                cands.push((h2, s));
            }
        }
    }
    let top = cands.iter().map(|c| c.0).fold(0.0, f64::max);
    if top <= 0.0 {
        return Err(Error::IncompleteComplex {
            c_max,
            uncovered: vec![(z.re, z.im)],
        });
    }
    let mut tied: Vec<&IsoSphere> = cands
        .iter()
        .filter(|c| c.0 >= top - TIE_TOL * top.max(1.0))
        .map(|c| &c.1)
        .collect();
    tied.sort_by(|p, q| {
        p.radius_sq
            .cmp(&q.radius_sq)
            .reverse()
            .then_with(|| p.exact_center.lex_cmp(&q.exact_center))
    });
    Ok(Ceiling {
        height: top.sqrt(),
        dominator: tied[0].neighbour(),
        ties: tied.iter().map(|s| s.center.to_string()).collect(),
    })
}

type Pt = (BigRational, BigRational);

fn r(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// One 2-cell (an interval for ℤ) of the cut locus over the fundamental cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutCell {
    pub dominator: CosetRep,
    /// `[∞, γ(∞)]`, the centres of the two tangent horoballs.
    pub transverse: [String; 2],
    /// Footprint vertices in ℂ, counter-clockwise.
    pub footprint: Vec<[f64; 2]>,
    /// Footprint vertices as exact lattice coordinates `(u, v)`, `z = u + v·ω`.
    pub footprint_exact: Vec<[String; 2]>,
    pub vertex_heights: Vec<f64>,
    pub summit: [f64; 3],
    pub summit_is_apex: bool,
    pub area: f64,
    #[serde(skip)]
    pub min_height_sq: BigRational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralData {
    /// Projections of summits that are sphere apexes.
    pub points: Vec<String>,
    /// The finite set 𝒟 = {|c|} over integral lines.
    pub depth_halves: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FordComplex {
    pub ring: u32,
    pub c_max: f64,
    pub cells: Vec<CutCell>,
    pub integral: IntegralData,
    /// Minimum height over the cut locus.
    pub min_height: f64,
    /// Its square, exact.
    pub min_height_sq: String,
    /// Sum of footprint areas; equals the area of the fundamental cell.
    pub total_area: f64,
}

impl FordComplex {
    /// The constant `c = 1/(2·min height)` of the good approximation bound.
    pub fn approximation_constant(&self) -> f64 {
        1.0 / (2.0 * self.min_height)
    }

    /// Combinatorial summary `(number of cells, vertices per cell)`.
    pub fn shape(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.footprint.len()).collect()
    }
}

/// Keeps the part of a convex polygon where `k·(u, v) ≥ rhs`.
fn clip(poly: &[Pt], k: &Pt, rhs: &BigRational) -> Vec<Pt> {
    let f = |p: &Pt| &k.0 * &p.0 + &k.1 * &p.1 - rhs;
    let n = poly.len();
    let mut out: Vec<Pt> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let (p, q) = (&poly[i], &poly[(i + 1) % n]);
        let (fp, fq) = (f(p), f(q));
        if !fp.is_negative() {
            out.push(p.clone());
        }
        if (fp.is_negative() && fq.is_positive()) || (fp.is_positive() && fq.is_negative()) {
            let t = &fp / (&fp - &fq);
            out.push((&p.0 + &t * (&q.0 - &p.0), &p.1 + &t * (&q.1 - &p.1)));
        }
    }
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

/// Squared height of sphere `s` above the lattice-coordinate point `z`.
fn height_sq(ring: RingSpec, s: &IsoSphere, z: &Pt) -> BigRational {
    let du = &z.0 - s.exact_center.x();
    let dv = &z.1 - s.exact_center.y();
    &s.radius_sq - ring.quadratic_form(&du, &dv)
}

/// Point of the closed polygon closest to `p` in the ring's metric.
fn closest_point(ring: RingSpec, poly: &[Pt], p: &Pt) -> (Pt, bool) {
    if inside(poly, p) {
        return (p.clone(), true);
    }
    let n = poly.len();
    let mut best: Option<(BigRational, Pt)> = None;
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[(i + 1) % n]);
        let e = (&b.0 - &a.0, &b.1 - &a.1);
        let w = (&p.0 - &a.0, &p.1 - &a.1);
        let ee = ring.quadratic_form(&e.0, &e.1);
        let t = if ee.is_zero() {
            r(0)
        } else {
            let t = ring.bilinear_form((&w.0, &w.1), (&e.0, &e.1)) / ee;
            t.max(r(0)).min(r(1))
        };
        let q = (&a.0 + &t * &e.0, &a.1 + &t * &e.1);
        let d = ring.quadratic_form(&(&p.0 - &q.0), &(&p.1 - &q.1));
        if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
            best = Some((d, q));
        }
    }
    (best.expect("nonempty polygon").1, false)
}

fn inside(poly: &[Pt], p: &Pt) -> bool {
    let n = poly.len();
    (0..n).all(|i| {
        let (a, b) = (&poly[i], &poly[(i + 1) % n]);
        let cross = (&b.0 - &a.0) * (&p.1 - &a.1) - (&b.1 - &a.1) * (&p.0 - &a.0);
        !cross.is_negative()
    })
}

fn shoelace(poly: &[Pt]) -> BigRational {
    let n = poly.len();
    let mut s = r(0);
    for i in 0..n {
        let (a, b) = (&poly[i], &poly[(i + 1) % n]);
        s += &a.0 * &b.1 - &b.0 * &a.1;
    }
    s / r(2)
}

fn to_f(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Dominance half-plane `2B(z, p_i − p_j) ≥ r_j² − r_i² + Q(p_i) − Q(p_j)`.
fn bisector(ring: RingSpec, si: &IsoSphere, sj: &IsoSphere) -> (Pt, BigRational) {
    let (pi, pj) = (&si.exact_center, &sj.exact_center);
    let wu = pi.x() - pj.x();
    let wv = pi.y() - pj.y();
    let t = r(ring.omega_trace());
    let n = r(ring.omega_norm());
    let alpha = &wu + &t * &wv / r(2);
    let beta = &t * &wu / r(2) + &n * &wv;
    let rhs = &sj.radius_sq - &si.radius_sq + pi.norm() - pj.norm();
    ((alpha * r(2), beta * r(2)), rhs)
}

fn build_cell(ring: RingSpec, si: &IsoSphere, all: &[IsoSphere], c_max: f64) -> Result<Option<CutCell>> {
    let p = si.exact_center.clone();
    let (pu, pv) = (p.x().clone(), p.y().clone());
    let two = r(2);
    let mut poly: Vec<Pt> = if ring.is_modular() {
        vec![(&pu - &two, r(0)), (&pu + &two, r(0))]
    } else {
        vec![
            (&pu - &two, &pv - &two),
            (&pu + &two, &pv - &two),
            (&pu + &two, &pv + &two),
            (&pu - &two, &pv + &two),
        ]
    };
    for sj in all {
        if std::ptr::eq(sj, si) || sj.exact_center == si.exact_center {
            continue;
        }
        let reach = si.radius + sj.radius;
        if (si.center_complex() - sj.center_complex()).norm() > reach + 1e-9 {
            continue;
        }
        let (k, rhs) = bisector(ring, si, sj);
        poly = if ring.is_modular() {
            clip_interval(&poly, &k.0, &rhs)
        } else {
            clip(&poly, &k, &rhs)
        };
        let degenerate = if ring.is_modular() {
            poly.len() < 2 || poly[0] == poly[1]
        } else {
            poly.len() < 3
        };
        if degenerate {
            return Ok(None);
        }
    }
    let measure = if ring.is_modular() {
        &poly[1].0 - &poly[0].0
    } else {
        shoelace(&poly)
    };
    if !measure.is_positive() {
        return Ok(None);
    }
    let heights: Vec<BigRational> = poly.iter().map(|z| height_sq(ring, si, z)).collect();
    let uncovered: Vec<(f64, f64)> = poly
        .iter()
        .zip(&heights)
        .filter(|(_, h)| !h.is_positive())
        .map(|(z, _)| {
            let c = QuadRat::new(ring, z.0.clone(), z.1.clone()).to_complex();
            (c.re, c.im)
        })
        .collect();
    if !uncovered.is_empty() {
        return Err(Error::IncompleteComplex { c_max, uncovered });
    }
    let (summit, apex) = if ring.is_modular() {
        let lo = &poly[0].0;
        let hi = &poly[1].0;
        let s = pu.clone().max(lo.clone()).min(hi.clone());
        let apex = s == pu;
        ((s, r(0)), apex)
    } else {
        closest_point(ring, &poly, &(pu.clone(), pv.clone()))
    };
    let summit_h = to_f(&height_sq(ring, si, &summit)).sqrt();
    let sz = QuadRat::new(ring, summit.0.clone(), summit.1.clone()).to_complex();
    let min_height_sq = heights.iter().min().cloned().expect("vertices");
    Ok(Some(CutCell {
        dominator: si.neighbour(),
        transverse: ["inf".into(), si.center.to_string()],
        footprint: poly
            .iter()
            .map(|z| {
                let c = QuadRat::new(ring, z.0.clone(), z.1.clone()).to_complex();
                [c.re, c.im]
            })
            .collect(),
        footprint_exact: poly.iter().map(|z| [z.0.to_string(), z.1.to_string()]).collect(),
        vertex_heights: heights.iter().map(|h| to_f(h).sqrt()).collect(),
        summit: [sz.re, sz.im, summit_h],
        summit_is_apex: apex,
        area: to_f(&measure) * ring.cell_area(),
        min_height_sq,
    }))
}

/// Keeps the part of the interval `[poly[0], poly[1]]` where `k·u ≥ rhs`.
fn clip_interval(poly: &[Pt], k: &BigRational, rhs: &BigRational) -> Vec<Pt> {
    let (mut lo, mut hi) = (poly[0].0.clone(), poly[1].0.clone());
    if k.is_zero() {
        if rhs.is_positive() {
            return vec![(lo.clone(), r(0)), (lo, r(0))];
        }
        return poly.to_vec();
    }
    let x = rhs / k;
    if k.is_positive() {
        lo = lo.max(x);
    } else {
        hi = hi.min(x);
    }
    if hi < lo {
        hi = lo.clone();
    }
    vec![(lo, r(0)), (hi, r(0))]
}

/// Cells of the cut locus for spheres with centre in the half-open
/// fundamental cell, using spheres with `|c| ≤ c_max`.
pub fn build_complex(g: &GroupSpec, c_max: f64, exec: Exec) -> Result<FordComplex> {
    if c_max < 1.0 {
        return Err(Error::InvalidArgument("c_max must be at least 1".into()));
    }
    let ring = g.ring();
    let vspan = if ring.is_modular() { (0.0, 0.0) } else { (0.0, 1.0) };
    let spheres = spheres_near(g, c_max, (0.0, 1.0), vspan, 2.0, exec);
    let owned: Vec<&IsoSphere> = spheres
        .iter()
        .filter(|s| s.exact_center.floor_to_lattice().is_zero())
        .collect();
    let built = par::map(exec, &owned, |s| build_cell(ring, s, &spheres, c_max));
    let mut cells = Vec::new();
    for b in built {
        if let Some(c) = b? {
            cells.push(c);
        }
    }
    cells.sort_by(|p, q| {
        p.dominator
            .gamma
            .c()
            .norm()
            .cmp(&q.dominator.gamma.c().norm())
            .then_with(|| cmp_f(p.footprint[0][0], q.footprint[0][0]))
            .then_with(|| cmp_f(p.footprint[0][1], q.footprint[0][1]))
    });
    let min_sq = cells
        .iter()
        .map(|c| c.min_height_sq.clone())
        .min()
        .ok_or(Error::IncompleteComplex {
            c_max,
            uncovered: vec![(0.0, 0.0)],
        })?;
    let mut points = Vec::new();
    let mut halves: Vec<f64> = Vec::new();
    for c in &cells {
        if c.summit_is_apex {
            points.push(c.transverse[1].clone());
            let q = c.dominator.gamma.c().abs();
            if !halves.iter().any(|h| (h - q).abs() < 1e-12) {
                halves.push(q);
            }
        }
    }
    halves.sort_by(|a, b| a.total_cmp(b));
    let total_area = cells.iter().map(|c| c.area).sum();
    Ok(FordComplex {
        ring: ring.d(),
        c_max,
        cells,
        integral: IntegralData {
            points,
            depth_halves: halves,
        },
        min_height: to_f(&min_sq).sqrt(),
        min_height_sq: min_sq.to_string(),
        total_area,
    })
}

fn cmp_f(a: f64, b: f64) -> Ordering {
    a.total_cmp(&b)
}

/// Minimum height of the cut locus.
pub fn sigma_min_height(g: &GroupSpec, c_max: f64, exec: Exec) -> Result<f64> {
    Ok(build_complex(g, c_max, exec)?.min_height)
}

/// Upper point of the ceiling above `z`.
pub fn ceiling_point(g: &GroupSpec, z: Complex64, c_max: f64) -> Result<UpperPoint> {
    let c = ceiling(g, z, c_max)?;
    Ok(UpperPoint::new(z, c.height))
}
