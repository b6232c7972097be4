//! Exact arithmetic in ℤ and in the norm-Euclidean imaginary quadratic rings
//! 𝒪₋d for d ∈ {1, 2, 3, 7, 11}.
//!
//! Elements are stored as `x + y·ω` with arbitrary-precision coordinates,
//! where `ω = √−d` when d ≢ 3 (mod 4) and `ω = (1 + √−d)/2` otherwise. The
//! ring d = 0 stands for ℤ itself (the modular group case); its elements
//! always have `y = 0`.

mod rational;

pub use rational::QuadRat;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The rings handled by the crate.
pub const SUPPORTED_RINGS: [u32; 6] = [0, 1, 2, 3, 7, 11];

/// Which ring of integers we compute in. `d = 0` denotes ℤ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct RingSpec {
    d: u32,
}

impl TryFrom<u32> for RingSpec {
    type Error = Error;

    fn try_from(d: u32) -> Result<Self> {
        RingSpec::new(d)
    }
}

impl From<RingSpec> for u32 {
    fn from(r: RingSpec) -> u32 {
        r.d
    }
}

impl RingSpec {
    pub const MODULAR: RingSpec = RingSpec { d: 0 };

    pub fn new(d: u32) -> Result<Self> {
        if SUPPORTED_RINGS.contains(&d) {
            Ok(RingSpec { d })
        } else {
            Err(Error::UnsupportedRing(d as i64))
        }
    }

    pub fn all() -> impl Iterator<Item = RingSpec> {
        SUPPORTED_RINGS.iter().map(|&d| RingSpec { d })
    }

    pub fn d(self) -> u32 {
        self.d
    }

    /// True for ℤ, where the group acts on the upper half-plane.
    pub fn is_modular(self) -> bool {
        self.d == 0
    }

    /// Trace of ω (0 or 1).
    pub fn omega_trace(self) -> i64 {
        if self.d % 4 == 3 {
            1
        } else {
            0
        }
    }

    /// Norm of ω; ω² = tr(ω)·ω − N(ω).
    pub fn omega_norm(self) -> i64 {
        match self.d {
            0 => 0,
            d if d % 4 == 3 => (1 + d as i64) / 4,
            d => d as i64,
        }
    }

    pub fn omega(self) -> Complex64 {
        let s = (self.d as f64).sqrt();
        if self.d % 4 == 3 {
            Complex64::new(0.5, s / 2.0)
        } else {
            Complex64::new(0.0, s)
        }
    }

    /// Euclidean area of the fundamental parallelogram spanned by 1 and ω
    /// (length 1 for ℤ).
    pub fn cell_area(self) -> f64 {
        if self.is_modular() {
            1.0
        } else {
            self.omega().im
        }
    }

    pub fn zero(self) -> QuadInt {
        QuadInt::new(self, 0, 0)
    }

    pub fn one(self) -> QuadInt {
        QuadInt::new(self, 1, 0)
    }

    /// ω as a ring element. Panics for ℤ.
    pub fn w(self) -> QuadInt {
        assert!(!self.is_modular(), "ℤ has no ω");
        QuadInt::new(self, 0, 1)
    }

    pub fn int(self, x: i64) -> QuadInt {
        QuadInt::new(self, x, 0)
    }

    /// The full unit group, including −1.
    pub fn units(self) -> Vec<QuadInt> {
        let e = |x: i64, y: i64| QuadInt::new(self, x, y);
        match self.d {
            1 => vec![e(1, 0), e(-1, 0), e(0, 1), e(0, -1)],
            // ω² = ω − 1
            3 => vec![e(1, 0), e(-1, 0), e(0, 1), e(0, -1), e(-1, 1), e(1, -1)],
            _ => vec![e(1, 0), e(-1, 0)],
        }
    }

    /// Units modulo ±1; these give the rotations in the cusp stabilizer.
    pub fn units_mod_sign(self) -> Vec<QuadInt> {
        let e = |x: i64, y: i64| QuadInt::new(self, x, y);
        match self.d {
            1 => vec![e(1, 0), e(0, 1)],
            3 => vec![e(1, 0), e(0, 1), e(-1, 1)],
            _ => vec![e(1, 0)],
        }
    }

    /// Splits a complex number into real coordinates `(u, v)` with
    /// `z = u + v·ω`. For ℤ the imaginary part is dropped.
    pub fn coords_of(self, z: Complex64) -> (f64, f64) {
        if self.is_modular() {
            return (z.re, 0.0);
        }
        let w = self.omega();
        let v = z.im / w.im;
        (z.re - v * w.re, v)
    }

    /// Lattice points within Euclidean distance `radius` of `center`, sorted
    /// lexicographically. For ℤ only the real part of `center` is used.
    pub fn lattice_points_in_disk(self, center: Complex64, radius: f64) -> Vec<QuadInt> {
        let mut out = Vec::new();
        if radius < 0.0 {
            return out;
        }
        let slack = 1e-9 * (1.0 + radius);
        if self.is_modular() {
            let lo = (center.re - radius - slack).ceil() as i64;
            let hi = (center.re + radius + slack).floor() as i64;
            return (lo..=hi).map(|x| self.int(x)).collect();
        }
        let w = self.omega();
        let (u0, v0) = self.coords_of(center);
        let vr = radius / w.im;
        let vlo = (v0 - vr - slack).ceil() as i64;
        let vhi = (v0 + vr + slack).floor() as i64;
        for v in vlo..=vhi {
            let dv = v as f64 - v0;
            let rem = radius * radius - (dv * w.im).powi(2);
            if rem < -slack {
                continue;
            }
            let half = rem.max(0.0).sqrt();
            let mid = u0 - dv * w.re;
            let ulo = (mid - half - slack).ceil() as i64;
            let uhi = (mid + half + slack).floor() as i64;
            for u in ulo..=uhi {
                out.push(QuadInt::new(self, u, v));
            }
        }
        out.sort();
        out
    }

    /// Euclidean squared length of `u + v·ω` for rational coordinates.
    pub fn quadratic_form(self, u: &BigRational, v: &BigRational) -> BigRational {
        let t = BigRational::from_integer(self.omega_trace().into());
        let n = BigRational::from_integer(self.omega_norm().into());
        u * u + t * u * v + n * v * v
    }

    /// Symmetric bilinear form associated with [`quadratic_form`](Self::quadratic_form).
    pub fn bilinear_form(
        self,
        (u1, v1): (&BigRational, &BigRational),
        (u2, v2): (&BigRational, &BigRational),
    ) -> BigRational {
        let t = BigRational::from_integer(self.omega_trace().into());
        let n = BigRational::from_integer(self.omega_norm().into());
        let half = BigRational::new(1.into(), 2.into());
        u1 * u2 + t * half * (u1 * v2 + u2 * v1) + n * v1 * v2
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_modular() {
            write!(f, "Z")
        } else {
            write!(f, "O(-{})", self.d)
        }
    }
}

/// An element `x + y·ω` of the ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadInt {
    ring: RingSpec,
    x: BigInt,
    y: BigInt,
}

impl QuadInt {
    /// Panics if `y ≠ 0` in ℤ.
    pub fn new(ring: RingSpec, x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        let (x, y) = (x.into(), y.into());
        assert!(
            !ring.is_modular() || y.is_zero(),
            "elements of ℤ have no ω-component"
        );
        QuadInt { ring, x, y }
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn x(&self) -> &BigInt {
        &self.x
    }

    pub fn y(&self) -> &BigInt {
        &self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x.is_one() && self.y.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// |q|², always a nonnegative integer.
    pub fn norm(&self) -> BigInt {
        let t = self.ring.omega_trace();
        let n = self.ring.omega_norm();
        &self.x * &self.x + &self.x * &self.y * t + &self.y * &self.y * n
    }

    pub fn conj(&self) -> QuadInt {
        // conj(ω) = tr(ω) − ω
        let t = self.ring.omega_trace();
        QuadInt {
            ring: self.ring,
            x: &self.x + &self.y * t,
            y: -&self.y,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        let y = self.y.to_f64().unwrap_or(f64::NAN);
        Complex64::new(x, 0.0) + self.ring.omega() * y
    }

    pub fn abs(&self) -> f64 {
        self.norm().to_f64().unwrap_or(f64::INFINITY).sqrt()
    }

    /// Lexicographic order on `(x, y)`.
    pub fn lex_cmp(&self, other: &QuadInt) -> Ordering {
        (&self.x, &self.y).cmp(&(&other.x, &other.y))
    }

    /// Canonical member of the associate class: the lexicographically
    /// largest `(x, y)` among all unit multiples. Returns it together with
    /// the unit `u` such that `canonical = u·self`.
    pub fn canonical_associate(&self) -> (QuadInt, QuadInt) {
        let mut best: Option<(QuadInt, QuadInt)> = None;
        for u in self.ring.units() {
            let cand = &u * self;
            let better = match &best {
                None => true,
                Some((b, _)) => cand.lex_cmp(b) == Ordering::Greater,
            };
            if better {
                best = Some((cand, u));
            }
        }
        best.expect("unit group is nonempty")
    }

    /// Multiplicative inverse when `self` is a unit.
    pub fn unit_inverse(&self) -> Option<QuadInt> {
        self.is_unit().then(|| self.conj())
    }

    /// Exact ratio `self / other` in the fraction field.
    pub fn ratio(&self, other: &QuadInt) -> Option<QuadRat> {
        QuadRat::from_fraction(self, other)
    }

    /// Division with remainder: `self = q·m + r` with `N(r) < N(m)`.
    ///
    /// The quotient rounds the exact ratio to a nearby lattice point, with
    /// ties broken toward negative infinity. For d ≡ 3 (mod 4) the ω-coordinate
    /// is rounded first and the 1-coordinate is rounded after absorbing half of
    /// the ω-residual, which is what keeps `N(r) < N(m)` for d = 7 and 11.
    pub fn euclid_divmod(&self, m: &QuadInt) -> Result<(QuadInt, QuadInt)> {
        if m.is_zero() {
            return Err(Error::InvalidArgument("division by zero".into()));
        }
        let q = QuadRat::from_fraction(self, m)
            .expect("nonzero divisor")
            .round_to_lattice();
        let r = self - &(&q * m);
        debug_assert!(r.norm() < m.norm());
        Ok((q, r))
    }

    /// Extended Euclid: returns `(g, s, t)` with `s·p + t·q = g` and `g` a
    /// gcd. When `q = 0` the result is `(p, 1, 0)`; otherwise `g` is put in
    /// canonical associate form.
    pub fn gcd_bezout(p: &QuadInt, q: &QuadInt) -> Result<(QuadInt, QuadInt, QuadInt)> {
        assert_eq!(p.ring, q.ring, "mixed rings");
        let ring = p.ring;
        if p.is_zero() && q.is_zero() {
            return Err(Error::InvalidArgument("gcd of (0, 0)".into()));
        }
        if q.is_zero() {
            return Ok((p.clone(), ring.one(), ring.zero()));
        }
        let (mut r0, mut r1) = (p.clone(), q.clone());
        let (mut s0, mut s1) = (ring.one(), ring.zero());
        let (mut t0, mut t1) = (ring.zero(), ring.one());
        while !r1.is_zero() {
            let (quot, rem) = r0.euclid_divmod(&r1)?;
            let s2 = &s0 - &(&quot * &s1);
            let t2 = &t0 - &(&quot * &t1);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let (g, u) = r0.canonical_associate();
        Ok((g, &u * &s0, &u * &t0))
    }

    /// Exact division when `m` divides `self`.
    pub fn exact_div(&self, m: &QuadInt) -> Option<QuadInt> {
        QuadRat::from_fraction(self, m)?.to_quad_int()
    }
}

fn round_half_down(r: &BigRational) -> BigInt {
    // nearest integer, ties toward −∞: ceil(r − 1/2)
    let half = BigRational::new(1.into(), 2.into());
    (r - half).ceil().to_integer()
}

impl PartialOrd for QuadInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadInt {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ring
            .cmp(&other.ring)
            .then_with(|| self.lex_cmp(other))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl<'a> $tr<&'a QuadInt> for &'a QuadInt {
            type Output = QuadInt;
            fn $method(self, rhs: &'a QuadInt) -> QuadInt {
                assert_eq!(self.ring, rhs.ring, "mixed rings");
                let f: fn(&QuadInt, &QuadInt) -> QuadInt = $body;
                f(self, rhs)
            }
        }
        impl $tr<QuadInt> for QuadInt {
            type Output = QuadInt;
            fn $method(self, rhs: QuadInt) -> QuadInt {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadInt> for QuadInt {
            type Output = QuadInt;
            fn $method(self, rhs: &'a QuadInt) -> QuadInt {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| QuadInt {
    ring: a.ring,
    x: &a.x + &b.x,
    y: &a.y + &b.y
});
forward_binop!(Sub, sub, |a, b| QuadInt {
    ring: a.ring,
    x: &a.x - &b.x,
    y: &a.y - &b.y
});
forward_binop!(Mul, mul, |a, b| {
    let t = a.ring.omega_trace();
    let n = a.ring.omega_norm();
    let yy = &a.y * &b.y;
    QuadInt {
        ring: a.ring,
        x: &a.x * &b.x - &yy * n,
        y: &a.x * &b.y + &a.y * &b.x + &yy * t,
    }
});

impl Neg for &QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        QuadInt {
            ring: self.ring,
            x: -&self.x,
            y: -&self.y,
        }
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        -&self
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wterm = |y: &BigInt| -> String {
            if y.is_one() {
                "w".to_string()
            } else if *y == -BigInt::one() {
                "-w".to_string()
            } else {
                format!("{y}*w")
            }
        };
        match (self.x.is_zero(), self.y.is_zero()) {
            (_, true) => write!(f, "{}", self.x),
            (true, false) => write!(f, "{}", wterm(&self.y)),
            (false, false) => {
                if self.y.is_negative() {
                    write!(f, "{}-{}", self.x, wterm(&-&self.y))
                } else {
                    write!(f, "{}+{}", self.x, wterm(&self.y))
                }
            }
        }
    }
}

impl QuadInt {
    /// Parses the textual form `x+y*w` (also `w`, `-w`, `3`, `2-5*w`, `w*4`).
    pub fn parse(ring: RingSpec, s: &str) -> Result<QuadInt> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::parse(s, "empty"));
        }
        let mut x = BigInt::zero();
        let mut y = BigInt::zero();
        // split into signed terms
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.is_empty() {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && cur.is_empty() {
                if ch == '-' {
                    neg = !neg;
                }
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(Error::parse(s, "dangling sign"));
        }
        terms.push((neg, cur));
        for (neg, term) in terms {
            let (coef, is_w) = parse_term(&term).ok_or_else(|| Error::parse(s, "bad term"))?;
            let coef = if neg { -coef } else { coef };
            if is_w {
                y += coef;
            } else {
                x += coef;
            }
        }
        if ring.is_modular() && !y.is_zero() {
            return Err(Error::parse(s, "ℤ has no ω-component"));
        }
        Ok(QuadInt::new(ring, x, y))
    }
}

fn parse_term(t: &str) -> Option<(BigInt, bool)> {
    if t == "w" {
        return Some((BigInt::one(), true));
    }
    if let Some(c) = t.strip_suffix("*w") {
        return Some((BigInt::from_str(c).ok()?, true));
    }
    if let Some(c) = t.strip_prefix("w*") {
        return Some((BigInt::from_str(c).ok()?, true));
    }
    if t.chars().all(|c| c.is_ascii_digit()) {
        return Some((BigInt::from_str(t).ok()?, false));
    }
    None
}

/// Largest `k` with `k² ≤ n·4^bits`, i.e. `√n` to `bits` binary places.
pub(crate) fn isqrt_scaled(n: u64, bits: u32) -> BigInt {
    let scaled = BigInt::from(n) << (2 * bits as usize);
    scaled.sqrt()
}
