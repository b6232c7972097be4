use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{isqrt_scaled, round_half_down, QuadInt, RingSpec};

/// An element `x + y·ω` of the fraction field ℚ(√−d), rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadRat {
    ring: RingSpec,
    x: BigRational,
    y: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl QuadRat {
    pub fn new(ring: RingSpec, x: BigRational, y: BigRational) -> Self {
        assert!(
            !ring.is_modular() || y.is_zero(),
            "elements of ℚ have no ω-component"
        );
        QuadRat { ring, x, y }
    }

    pub fn zero(ring: RingSpec) -> Self {
        QuadRat::new(ring, rat(0), rat(0))
    }

    pub fn ring(&self) -> RingSpec {
        self.ring
    }

    pub fn x(&self) -> &BigRational {
        &self.x
    }

    pub fn y(&self) -> &BigRational {
        &self.y
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// `p / q` in the fraction field, `None` when `q = 0`.
    pub fn from_fraction(p: &QuadInt, q: &QuadInt) -> Option<QuadRat> {
        assert_eq!(p.ring(), q.ring(), "mixed rings");
        if q.is_zero() {
            return None;
        }
        let num = p * &q.conj();
        let n = q.norm();
        Some(QuadRat {
            ring: p.ring(),
            x: BigRational::new(num.x().clone(), n.clone()),
            y: BigRational::new(num.y().clone(), n),
        })
    }

    pub fn norm(&self) -> BigRational {
        self.ring.quadratic_form(&self.x, &self.y)
    }

    pub fn conj(&self) -> QuadRat {
        let t = rat(self.ring.omega_trace());
        QuadRat {
            ring: self.ring,
            x: &self.x + &self.y * t,
            y: -&self.y,
        }
    }

    pub fn inv(&self) -> Option<QuadRat> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conj();
        Some(QuadRat {
            ring: self.ring,
            x: c.x / &n,
            y: c.y / &n,
        })
    }

    pub fn to_complex(&self) -> Complex64 {
        let x = self.x.to_f64().unwrap_or(f64::NAN);
        let y = self.y.to_f64().unwrap_or(f64::NAN);
        Complex64::new(x, 0.0) + self.ring.omega() * y
    }

    /// Euclidean absolute value as a double.
    pub fn abs(&self) -> f64 {
        self.norm().to_f64().unwrap_or(f64::INFINITY).sqrt()
    }

    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }

    pub fn to_quad_int(&self) -> Option<QuadInt> {
        self.is_integral()
            .then(|| QuadInt::new(self.ring, self.x.to_integer(), self.y.to_integer()))
    }

    /// Lattice point `λ` with `self − λ` in the half-open cell `[0,1)·1 + [0,1)·ω`.
    pub fn floor_to_lattice(&self) -> QuadInt {
        QuadInt::new(self.ring, self.x.floor().to_integer(), self.y.floor().to_integer())
    }

    /// A lattice point at norm distance below 1 (nearest for d ≢ 3 mod 4).
    pub fn round_to_lattice(&self) -> QuadInt {
        if self.ring.omega_trace() == 1 {
            let v = round_half_down(&self.y);
            let e = &self.y - BigRational::from_integer(v.clone());
            let u = round_half_down(&(&self.x + e / rat(2)));
            QuadInt::new(self.ring, u, v)
        } else {
            QuadInt::new(self.ring, round_half_down(&self.x), round_half_down(&self.y))
        }
    }

    pub fn lex_cmp(&self, other: &QuadRat) -> Ordering {
        (&self.x, &self.y).cmp(&(&other.x, &other.y))
    }

    /// Rational approximation of a complex double, with `√d` taken to `bits`
    /// binary places. The conversion error is below `|z|·2^(2−bits)`.
    pub fn from_complex(ring: RingSpec, z: Complex64, bits: u32) -> Option<QuadRat> {
        let re = BigRational::from_float(z.re)?;
        if ring.is_modular() {
            return Some(QuadRat::new(ring, re, rat(0)));
        }
        let im = BigRational::from_float(z.im)?;
        let scale = BigRational::from_integer(BigInt::one() << bits as usize);
        let sqrt_d = BigRational::from_integer(isqrt_scaled(ring.d() as u64, bits)) / scale;
        Some(if ring.omega_trace() == 1 {
            // ω = (1 + √−d)/2
            let v = im * rat(2) / sqrt_d;
            let u = re - &v / rat(2);
            QuadRat::new(ring, u, v)
        } else {
            QuadRat::new(ring, re, im / sqrt_d)
        })
    }

    /// Rounds both coordinates to the grid `2^-bits ℤ`, toward −∞.
    pub fn truncate(&self, bits: u32) -> QuadRat {
        let scale = BigRational::from_integer(BigInt::one() << bits as usize);
        let cut = |r: &BigRational| (r * &scale).floor() / &scale;
        QuadRat::new(self.ring, cut(&self.x), cut(&self.y))
    }
}

impl From<&QuadInt> for QuadRat {
    fn from(q: &QuadInt) -> QuadRat {
        QuadRat {
            ring: q.ring(),
            x: BigRational::from_integer(q.x().clone()),
            y: BigRational::from_integer(q.y().clone()),
        }
    }
}

impl From<QuadInt> for QuadRat {
    fn from(q: QuadInt) -> QuadRat {
        QuadRat::from(&q)
    }
}

macro_rules! rat_binop {
    ($tr:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl<'a> $tr<&'a QuadRat> for &'a QuadRat {
            type Output = QuadRat;
            fn $method(self, rhs: &'a QuadRat) -> QuadRat {
                assert_eq!(self.ring, rhs.ring, "mixed rings");
                let ($a, $b) = (self, rhs);
                $body
            }
        }
        impl $tr<QuadRat> for QuadRat {
            type Output = QuadRat;
            fn $method(self, rhs: QuadRat) -> QuadRat {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a QuadRat> for QuadRat {
            type Output = QuadRat;
            fn $method(self, rhs: &'a QuadRat) -> QuadRat {
                (&self).$method(rhs)
            }
        }
    };
}

rat_binop!(Add, add, |a, b| QuadRat {
    ring: a.ring,
    x: &a.x + &b.x,
    y: &a.y + &b.y
});
rat_binop!(Sub, sub, |a, b| QuadRat {
    ring: a.ring,
    x: &a.x - &b.x,
    y: &a.y - &b.y
});
rat_binop!(Mul, mul, |a, b| {
    let t = rat(a.ring.omega_trace());
    let n = rat(a.ring.omega_norm());
    let yy = &a.y * &b.y;
    QuadRat {
        ring: a.ring,
        x: &a.x * &b.x - &yy * n,
        y: &a.x * &b.y + &a.y * &b.x + yy * t,
    }
});
rat_binop!(Div, div, |a, b| a * &b.inv().expect("division by zero"));

impl Neg for &QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        QuadRat {
            ring: self.ring,
            x: -&self.x,
            y: -&self.y,
        }
    }
}

impl Neg for QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        -&self
    }
}

impl fmt::Display for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.y.is_zero() {
            return write!(f, "{}", self.x);
        }
        let w = if self.y.is_one() {
            "w".to_string()
        } else if self.y == -BigRational::one() {
            "-w".to_string()
        } else {
            format!("{}*w", self.y)
        };
        if self.x.is_zero() {
            write!(f, "{w}")
        } else if self.y.is_negative() {
            write!(f, "{}{}", self.x, w)
        } else {
            write!(f, "{}+{}", self.x, w)
        }
    }
}
