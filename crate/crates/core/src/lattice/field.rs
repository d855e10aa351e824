//! Ground fields: the rationals and prime fields `F_p`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest prime accepted for `F_p`; products of two residues must fit in `u64`.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

/// The working field, identified by its characteristic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    /// `0` selects the rationals; anything else must be a prime `<= MAX_PRIME`.
    pub fn from_characteristic(c: u64) -> Result<Self> {
        if c == 0 {
            return Ok(Field::Rational);
        }
        if c > MAX_PRIME || !is_prime(c) {
            return Err(Error::InvalidCharacteristic(c));
        }
        Ok(Field::Prime(c))
    }

    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn zero(self) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::zero()),
            Field::Prime(p) => Scalar::Mod { value: 0, p },
        }
    }

    pub fn one(self) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::one()),
            Field::Prime(p) => Scalar::Mod { value: 1 % p, p },
        }
    }

    pub fn from_i64(self, v: i64) -> Scalar {
        self.from_int(&BigInt::from(v))
    }

    /// Integers always map into the field (reduction mod p).
    pub fn from_int(self, v: &BigInt) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(v.clone())),
            Field::Prime(p) => Scalar::Mod { value: reduce(v, p), p },
        }
    }

    /// Rationals map into `F_p` only when the denominator is a unit mod p.
    pub fn from_rational(self, v: &BigRational) -> Result<Scalar> {
        match self {
            Field::Rational => Ok(Scalar::Rational(v.clone())),
            Field::Prime(p) => {
                let den = reduce(v.denom(), p);
                if den == 0 {
                    return Err(Error::DenominatorDivisibleByPrime { value: v.to_string(), p });
                }
                let num = reduce(v.numer(), p);
                Ok(Scalar::Mod { value: mul_mod(num, inv_mod(den, p), p), p })
            }
        }
    }

    /// Converts a scalar of any field into this one (rationals reduce, residues must match).
    pub fn convert(self, s: &Scalar) -> Result<Scalar> {
        match s {
            Scalar::Rational(q) => self.from_rational(q),
            Scalar::Mod { p, .. } if Field::Prime(*p) == self => Ok(s.clone()),
            Scalar::Mod { p, .. } => Err(Error::FieldMismatch {
                expected: self.characteristic(),
                found: *p,
            }),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "QQ"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

/// An element of `Q` (always reduced, positive denominator) or of `F_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Mod { value: u64, p: u64 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Mod { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Mod { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Scalar {
        match self {
            Scalar::Rational(q) => {
                assert!(!q.is_zero(), "inverse of zero");
                Scalar::Rational(q.recip())
            }
            Scalar::Mod { value, p } => {
                assert!(*value != 0, "inverse of zero");
                Scalar::Mod { value: inv_mod(*value, *p), p: *p }
            }
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = self.field().one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(q) => Some(q),
            Scalar::Mod { .. } => None,
        }
    }

    /// The integer value when the scalar is an integral rational.
    pub fn to_integer(&self) -> Option<BigInt> {
        match self {
            Scalar::Rational(q) if q.is_integer() => Some(q.to_integer()),
            Scalar::Rational(_) => None,
            Scalar::Mod { value, .. } => Some(BigInt::from(*value)),
        }
    }

    /// Sign for rationals (`-1`, `0`, `1`); residues report 0 or 1.
    pub fn signum(&self) -> i32 {
        match self {
            Scalar::Rational(q) => {
                if q.is_zero() {
                    0
                } else if q.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Scalar::Mod { value, .. } => (*value != 0) as i32,
        }
    }

    /// Residues print in the symmetric range `(-p/2, p/2]` so small negatives stay readable.
    pub fn to_display_string(&self) -> String {
        match self {
            Scalar::Rational(q) => q.to_string(),
            Scalar::Mod { value, p } => {
                if *value > p / 2 {
                    format!("-{}", p - value)
                } else {
                    value.to_string()
                }
            }
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_display_string())
    }
}

fn check_same(a: u64, b: u64) {
    assert_eq!(a, b, "mixed characteristics in scalar arithmetic");
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, p: q }) => {
                check_same(*p, *q);
                Scalar::Mod { value: (a + b) % p, p: *p }
            }
            _ => panic!("mixed characteristics in scalar arithmetic"),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a - b),
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, p: q }) => {
                check_same(*p, *q);
                Scalar::Mod { value: (a + p - b) % p, p: *p }
            }
            _ => panic!("mixed characteristics in scalar arithmetic"),
        }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, p: q }) => {
                check_same(*p, *q);
                Scalar::Mod { value: mul_mod(*a, *b, *p), p: *p }
            }
            _ => panic!("mixed characteristics in scalar arithmetic"),
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        self * &rhs.inv()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Mod { value, p } => Scalar::Mod { value: (p - value) % p, p: *p },
        }
    }
}

pub(crate) fn reduce(v: &BigInt, p: u64) -> u64 {
    let m = v.mod_floor(&BigInt::from(p));
    m.to_u64().expect("residue fits in u64")
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2)
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(result, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    result
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}
