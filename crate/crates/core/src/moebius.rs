//! Unimodular matrices over the ring acting on the upper half-space, horoballs
//! and the numeric functionals built on them: depth, height, Δ, penetration.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::quad_field::{QuadInt, QuadRat, RingSpec};

/// An element of PSL₂ over the ring. The stored sign is normalized so that the
/// first nonzero entry of `(c, d, a, b)` is lexicographically larger than its
/// negative; structural equality is therefore projective equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoebiusMap {
    c: QuadInt,
    d: QuadInt,
    a: QuadInt,
    b: QuadInt,
}

impl MoebiusMap {
    /// Fails unless `ad − bc = 1`.
    pub fn new(a: QuadInt, b: QuadInt, c: QuadInt, d: QuadInt) -> Result<Self> {
        let det = &(&a * &d) - &(&b * &c);
        if !det.is_one() {
            return Err(Error::InvalidArgument(format!(
                "determinant is {det}, expected 1"
            )));
        }
        Ok(Self::from_entries(a, b, c, d))
    }

    /// Integer shorthand, mostly for tests: `[[a.x, a.y], [b.x, b.y], ...]`.
    pub fn from_coords(ring: RingSpec, e: [[i64; 2]; 4]) -> Result<Self> {
        let q = |v: [i64; 2]| QuadInt::new(ring, v[0], v[1]);
        Self::new(q(e[0]), q(e[1]), q(e[2]), q(e[3]))
    }

    fn from_entries(a: QuadInt, b: QuadInt, c: QuadInt, d: QuadInt) -> Self {
        let lead = [&c, &d, &a, &b]
            .into_iter()
            .find(|e| !e.is_zero())
            .cloned()
            .expect("determinant one");
        let neg = -&lead;
        if lead.lex_cmp(&neg).is_lt() {
            MoebiusMap {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            MoebiusMap { a, b, c, d }
        }
    }

    pub fn identity(ring: RingSpec) -> Self {
        Self::from_entries(ring.one(), ring.zero(), ring.zero(), ring.one())
    }

    /// The inversion `z ↦ −1/z`.
    pub fn s(ring: RingSpec) -> Self {
        Self::from_entries(ring.zero(), -ring.one(), ring.one(), ring.zero())
    }

    /// `z ↦ z + λ`.
    pub fn translation(lambda: &QuadInt) -> Self {
        let r = lambda.ring();
        Self::from_entries(r.one(), lambda.clone(), r.zero(), r.one())
    }

    /// `z ↦ u²z`, written as `diag(u, u⁻¹)`.
    pub fn rotation(u: &QuadInt) -> Result<Self> {
        let inv = u
            .unit_inverse()
            .ok_or_else(|| Error::InvalidArgument(format!("{u} is not a unit")))?;
        let r = u.ring();
        Ok(Self::from_entries(u.clone(), r.zero(), r.zero(), inv))
    }

    pub fn ring(&self) -> RingSpec {
        self.a.ring()
    }

    pub fn a(&self) -> &QuadInt {
        &self.a
    }
    pub fn b(&self) -> &QuadInt {
        &self.b
    }
    pub fn c(&self) -> &QuadInt {
        &self.c
    }
    pub fn d(&self) -> &QuadInt {
        &self.d
    }

    pub fn trace(&self) -> QuadInt {
        &self.a + &self.d
    }

    pub fn det(&self) -> QuadInt {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        self * other
    }

    pub fn inverse(&self) -> MoebiusMap {
        Self::from_entries(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    /// `tr² − 4`, exact.
    pub fn discriminant(&self) -> QuadInt {
        let t = self.trace();
        &(&t * &t) - &self.ring().int(4)
    }

    pub fn is_parabolic(&self) -> bool {
        self.discriminant().is_zero()
    }

    /// Hyperbolic or loxodromic: trace outside the real segment [−2, 2].
    pub fn is_loxodromic(&self) -> bool {
        let t = self.trace();
        !t.y().is_zero() || t.x().magnitude() > &2u32.into()
    }

    pub fn apply_boundary(&self, p: &BoundaryPoint) -> BoundaryPoint {
        match p {
            BoundaryPoint::Infinity => BoundaryPoint::fraction(self.a.clone(), self.c.clone()),
            BoundaryPoint::Exact { p, q } => BoundaryPoint::fraction(
                &(&self.a * p) + &(&self.b * q),
                &(&self.c * p) + &(&self.d * q),
            ),
            BoundaryPoint::Approx { z, err } => {
                let (a, b, c, d) = self.complex_entries();
                let den = c * z + d;
                if den.norm() == 0.0 {
                    return BoundaryPoint::Infinity;
                }
                BoundaryPoint::Approx {
                    z: (a * z + b) / den,
                    err: err / den.norm_sqr() * (1.0 + 1e-15) + 4.0 * f64::EPSILON,
                }
            }
        }
    }

    /// Poincaré extension to the upper half-space.
    pub fn apply_interior(&self, x: &UpperPoint) -> UpperPoint {
        let (a, b, c, d) = self.complex_entries();
        let czd = c * x.z + d;
        let t2 = x.t * x.t;
        let den = czd.norm_sqr() + c.norm_sqr() * t2;
        let z = ((a * x.z + b) * czd.conj() + a * c.conj() * t2) / den;
        UpperPoint { z, t: x.t / den }
    }

    pub fn complex_entries(&self) -> (Complex64, Complex64, Complex64, Complex64) {
        (
            self.a.to_complex(),
            self.b.to_complex(),
            self.c.to_complex(),
            self.d.to_complex(),
        )
    }

    /// `γ(∞) = a/c`, `None` if `c = 0`.
    pub fn endpoint(&self) -> Option<QuadRat> {
        self.a.ratio(&self.c)
    }

    /// `D = log N(c) = 2 log |c|`.
    pub fn depth(&self) -> Result<f64> {
        if self.c.is_zero() {
            return Err(Error::NotRationalLine);
        }
        Ok(ln_big(&self.c.norm()))
    }

    /// Euclidean height of the top of the axis, `√|tr² − 4| / (2|c|)`.
    pub fn height(&self) -> Result<f64> {
        if self.is_parabolic() {
            return Err(Error::NoAxis("parabolic element"));
        }
        if self.c.is_zero() {
            return Err(Error::NoAxis("axis passes through infinity"));
        }
        Ok(self.height_numerator() / (2.0 * self.c.abs()))
    }

    /// `√|tr² − 4|`, the part of the height that is a conjugacy invariant.
    pub fn height_numerator(&self) -> f64 {
        self.discriminant().abs().sqrt()
    }

    /// Endpoints `(a − d ± √(tr² − 4)) / (2c)` of the axis.
    pub fn axis_endpoints(&self) -> Result<(Complex64, Complex64)> {
        self.height()?;
        let (a, _, c, d) = self.complex_entries();
        let t = a + d;
        let s = (t * t - 4.0).sqrt();
        Ok(((a - d + s) / (2.0 * c), (a - d - s) / (2.0 * c)))
    }

    /// `a(g)c(h) − a(h)c(g)`, exact.
    pub fn delta_exact(g: &MoebiusMap, h: &MoebiusMap) -> QuadInt {
        &(&g.a * &h.c) - &(&h.a * &g.c)
    }

    /// `Δ(g, h) = |a(g)c(h) − a(h)c(g)|`.
    pub fn delta(g: &MoebiusMap, h: &MoebiusMap) -> f64 {
        Self::delta_exact(g, h).abs()
    }

    /// Image of the horoball at ∞ of height `h`.
    pub fn horoball_image(&self, h: f64) -> Horoball {
        match self.endpoint() {
            None => Horoball::at_infinity(h),
            Some(_) => Horoball {
                center: BoundaryPoint::fraction(self.a.clone(), self.c.clone()),
                size: 1.0 / (h * self.c.norm().to_f64().unwrap_or(f64::INFINITY)),
            },
        }
    }
}

fn ln_big(n: &num_bigint::BigInt) -> f64 {
    match n.to_f64() {
        Some(x) if x.is_finite() => x.ln(),
        _ => {
            let bits = n.bits();
            let shifted = n >> (bits - 60) as usize;
            shifted.to_f64().unwrap().ln() + (bits - 60) as f64 * std::f64::consts::LN_2
        }
    }
}

impl<'a> Mul<&'a MoebiusMap> for &'a MoebiusMap {
    type Output = MoebiusMap;
    fn mul(self, o: &'a MoebiusMap) -> MoebiusMap {
        MoebiusMap::from_entries(
            &(&self.a * &o.a) + &(&self.b * &o.c),
            &(&self.a * &o.b) + &(&self.b * &o.d),
            &(&self.c * &o.a) + &(&self.d * &o.c),
            &(&self.c * &o.b) + &(&self.d * &o.d),
        )
    }
}

impl Mul for MoebiusMap {
    type Output = MoebiusMap;
    fn mul(self, o: MoebiusMap) -> MoebiusMap {
        &self * &o
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    a: String,
    b: String,
    c: String,
    d: String,
    ring: u32,
}

impl Serialize for MoebiusMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            a: self.a.to_string(),
            b: self.b.to_string(),
            c: self.c.to_string(),
            d: self.d.to_string(),
            ring: self.ring().d(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MoebiusMap {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let m = MatrixJson::deserialize(de)?;
        let ring = RingSpec::new(m.ring).map_err(D::Error::custom)?;
        let p = |s: &str| QuadInt::parse(ring, s).map_err(D::Error::custom);
        MoebiusMap::new(p(&m.a)?, p(&m.b)?, p(&m.c)?, p(&m.d)?).map_err(D::Error::custom)
    }
}

impl Serialize for QuadInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A point of ∂ℍ: ∞, an exact fraction in lowest terms, or a double with an
/// absolute error bound.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryPoint {
    Infinity,
    /// `p/q` with `gcd(p, q)` a unit and `q` a canonical associate.
    Exact { p: QuadInt, q: QuadInt },
    Approx { z: Complex64, err: f64 },
}

impl BoundaryPoint {
    /// `p/q`, reduced to lowest terms; `q = 0` gives ∞.
    pub fn fraction(p: QuadInt, q: QuadInt) -> BoundaryPoint {
        if q.is_zero() {
            return BoundaryPoint::Infinity;
        }
        let (g, _, _) = QuadInt::gcd_bezout(&p, &q).expect("q ≠ 0");
        let (p, q) = if g.is_unit() {
            (p, q)
        } else {
            (p.exact_div(&g).unwrap(), q.exact_div(&g).unwrap())
        };
        let (q, u) = q.canonical_associate();
        BoundaryPoint::Exact { p: &u * &p, q }
    }

    pub fn from_quad_rat(z: &QuadRat) -> BoundaryPoint {
        let r = z.ring();
        // common denominator of the coordinates
        let den = num_integer::Integer::lcm(z.x().denom(), z.y().denom());
        let p = QuadInt::new(
            r,
            z.x().numer() * (&den / z.x().denom()),
            z.y().numer() * (&den / z.y().denom()),
        );
        BoundaryPoint::fraction(p, QuadInt::new(r, den, 0))
    }

    pub fn approx(z: Complex64) -> BoundaryPoint {
        BoundaryPoint::Approx { z, err: 0.0 }
    }

    pub fn to_complex(&self) -> Option<Complex64> {
        match self {
            BoundaryPoint::Infinity => None,
            BoundaryPoint::Exact { p, q } => Some(QuadRat::from_fraction(p, q)?.to_complex()),
            BoundaryPoint::Approx { z, .. } => Some(*z),
        }
    }

    pub fn to_quad_rat(&self) -> Option<QuadRat> {
        match self {
            BoundaryPoint::Exact { p, q } => QuadRat::from_fraction(p, q),
            _ => None,
        }
    }

    /// `p/q` text, or `inf`.
    pub fn to_text(&self) -> String {
        match self {
            BoundaryPoint::Infinity => "inf".into(),
            BoundaryPoint::Exact { p, q } => {
                if q.is_one() {
                    format!("{p}")
                } else {
                    format!("({p})/({q})")
                }
            }
            BoundaryPoint::Approx { z, .. } => format!("{}{:+}i", z.re, z.im),
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `(z, t)` in the upper half-space model, `t > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UpperPoint {
    pub z: Complex64,
    pub t: f64,
}

impl UpperPoint {
    pub fn new(z: Complex64, t: f64) -> Self {
        debug_assert!(t > 0.0);
        UpperPoint { z, t }
    }
}

/// A horoball: centered at a finite point with Euclidean diameter `size`, or
/// at ∞ with `size` the height of its boundary plane.
#[derive(Clone, Debug, PartialEq)]
pub struct Horoball {
    pub center: BoundaryPoint,
    pub size: f64,
}

impl Horoball {
    pub fn at_infinity(h: f64) -> Self {
        Horoball {
            center: BoundaryPoint::Infinity,
            size: h,
        }
    }

    pub fn is_at_infinity(&self) -> bool {
        self.center == BoundaryPoint::Infinity
    }

    /// Signed depth of `x` inside the horoball (negative outside).
    pub fn penetration(&self, x: &UpperPoint) -> f64 {
        match self.center.to_complex() {
            None => (x.t / self.size).ln(),
            Some(p) => penetration_at(p, self.size, x),
        }
    }
}

/// Penetration into the horoball at `p` of diameter `s`.
pub fn penetration_at(p: Complex64, s: f64, x: &UpperPoint) -> f64 {
    (s * x.t / ((x.z - p).norm_sqr() + x.t * x.t)).ln()
}
