//! Exact coefficient arithmetic over `Q` and prime fields `F_p`, together with
//! the binomial-coefficient number theory used by the Frobenius arguments.

mod rational;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("characteristic {0} is not allowed (must be 0 or a prime >= 5)")]
    BadCharacteristic(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields (char {0} vs char {1})")]
    FieldMismatch(u64, u64),
    #[error("binomial({n}, {k}) requires k <= n")]
    BinomialRange { n: u64, k: u64 },
}

/// The coefficient field: `Q` (characteristic 0) or `F_p` with `p >= 5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldSpec {
    characteristic: u64,
}

impl FieldSpec {
    pub const Q: FieldSpec = FieldSpec { characteristic: 0 };

    pub fn new(characteristic: u64) -> Result<Self, ScalarError> {
        if characteristic == 0 {
            return Ok(Self::Q);
        }
        if characteristic < 5 || characteristic > u32::MAX as u64 || !is_prime(characteristic) {
            return Err(ScalarError::BadCharacteristic(characteristic));
        }
        Ok(FieldSpec { characteristic })
    }

    pub fn prime(p: u64) -> Result<Self, ScalarError> {
        if p == 0 {
            return Err(ScalarError::BadCharacteristic(0));
        }
        Self::new(p)
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn is_rational(&self) -> bool {
        self.characteristic == 0
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self.characteristic {
            0 => Scalar::Rat(Rational::from_int(n)),
            p => Scalar::Mod { v: n.rem_euclid(p as i64) as u64, p },
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match self.characteristic {
            0 => Scalar::Rat(Rational::from_big(num_rational::BigRational::from_integer(n.clone()))),
            p => {
                let r = n.mod_floor(&BigInt::from(p));
                Scalar::Mod { v: r.to_u64().unwrap_or(0), p }
            }
        }
    }

    /// Maps a rational into this field; fails if the denominator vanishes mod p.
    pub fn from_rational(&self, r: &Rational) -> Result<Scalar, ScalarError> {
        match self.characteristic {
            0 => Ok(Scalar::Rat(r.clone())),
            _ => {
                let num = self.from_bigint(&r.numer());
                let den = self.from_bigint(&r.denom());
                num.div(&den)
            }
        }
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        s.characteristic() == self.characteristic
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.characteristic {
            0 => write!(f, "Q"),
            p => write!(f, "F_{p}"),
        }
    }
}

/// An exact field element. Residues are kept in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(Rational),
    Mod { v: u64, p: u64 },
}

impl Scalar {
    pub fn characteristic(&self) -> u64 {
        match self {
            Scalar::Rat(_) => 0,
            Scalar::Mod { p, .. } => *p,
        }
    }

    pub fn field(&self) -> FieldSpec {
        FieldSpec { characteristic: self.characteristic() }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Mod { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Mod { v, .. } => *v == 1,
        }
    }

    fn check(&self, other: &Scalar) -> Result<(), ScalarError> {
        let (a, b) = (self.characteristic(), other.characteristic());
        if a == b {
            Ok(())
        } else {
            Err(ScalarError::FieldMismatch(a, b))
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        Ok(self.mul(other))
    }

    /// Panics on mixed fields; use `try_add` at API boundaries.
    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a.add(b)),
            (Scalar::Mod { v: a, p }, Scalar::Mod { v: b, p: q }) if p == q => {
                Scalar::Mod { v: (a + b) % p, p: *p }
            }
            _ => panic!("{}", ScalarError::FieldMismatch(self.characteristic(), other.characteristic())),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(a) => Scalar::Rat(a.neg()),
            Scalar::Mod { v, p } => Scalar::Mod { v: (p - v) % p, p: *p },
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a.mul(b)),
            (Scalar::Mod { v: a, p }, Scalar::Mod { v: b, p: q }) if p == q => {
                Scalar::Mod { v: (a * b) % p, p: *p }
            }
            _ => panic!("{}", ScalarError::FieldMismatch(self.characteristic(), other.characteristic())),
        }
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Rat(a) => a.inv().map(Scalar::Rat).ok_or(ScalarError::DivisionByZero),
            Scalar::Mod { v, p } => {
                if *v == 0 {
                    return Err(ScalarError::DivisionByZero);
                }
                Ok(Scalar::Mod { v: pow_mod(*v, p - 2, *p), p: *p })
            }
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.check(other)?;
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Rational value when in characteristic 0.
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Mod { .. } => None,
        }
    }

    /// Prints as a signed integer or fraction; residues print in `(-p/2, p/2]`.
    pub fn to_signed_string(&self) -> String {
        match self {
            Scalar::Rat(r) => r.to_string(),
            Scalar::Mod { v, p } => {
                if *v > p / 2 {
                    format!("-{}", p - v)
                } else {
                    v.to_string()
                }
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => write!(f, "{r}"),
            Scalar::Mod { v, p } => write!(f, "{v} (mod {p})"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_signed_string())
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Exact `C(n, k)` as a big integer.
pub fn binomial_int(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::from(1u32);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `C(n, k)` reduced into `field`.
pub fn binomial(n: u64, k: u64, field: FieldSpec) -> Result<Scalar, ScalarError> {
    if k > n {
        return Err(ScalarError::BinomialRange { n, k });
    }
    Ok(field.from_bigint(&binomial_int(n, k)))
}

/// `C(n, k) mod p` via Lucas' theorem on base-p digits.
pub fn lucas_binomial(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return 0;
        }
        let digit = (binomial_int(nd, kd) % BigInt::from(p)).to_u64().unwrap_or(0);
        acc = acc * digit % p;
        n /= p;
        k /= p;
    }
    acc
}

/// Largest `e` with `p^e | n`.
pub fn p_adic_valuation(mut n: u64, p: u64) -> u32 {
    assert!(n >= 1 && p >= 2);
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

/// `Some(s)` if `n == p^s` with `s >= 1`.
pub fn power_of(n: u64, p: u64) -> Option<u32> {
    if n < p {
        return None;
    }
    let s = p_adic_valuation(n, p);
    (p.checked_pow(s) == Some(n)).then_some(s)
}

/// The least `p^s` with `s >= 1` and `p^s >= bound`.
pub fn least_power_at_least(p: u64, bound: u64) -> u64 {
    let mut q = p;
    while q < bound {
        q *= p;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> FieldSpec {
        FieldSpec::new(5).unwrap()
    }

    #[test]
    fn rejects_small_and_composite_characteristics() {
        for c in [1, 2, 3, 4, 9, 25] {
            assert_eq!(FieldSpec::new(c), Err(ScalarError::BadCharacteristic(c)));
        }
        assert!(FieldSpec::new(7).is_ok());
    }

    #[test]
    fn field_op_examples() {
        let f = f5();
        assert_eq!(f.from_i64(3).add(&f.from_i64(4)), f.from_i64(2));
        assert_eq!(f.from_i64(2).inv().unwrap(), f.from_i64(3));
        let q = FieldSpec::Q;
        let half = q.from_rational(&Rational::new(1, 2)).unwrap();
        let two_thirds = q.from_rational(&Rational::new(2, 3)).unwrap();
        assert_eq!(half.mul(&two_thirds), Scalar::Rat(Rational::new(1, 3)));
    }

    #[test]
    fn errors() {
        let f = f5();
        assert_eq!(f.zero().inv(), Err(ScalarError::DivisionByZero));
        assert_eq!(FieldSpec::Q.one().try_add(&f.one()), Err(ScalarError::FieldMismatch(0, 5)));
        assert_eq!(binomial(2, 3, f), Err(ScalarError::BinomialRange { n: 2, k: 3 }));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2, f5()).unwrap(), f5().zero());
        assert_eq!(binomial(4, 0, FieldSpec::Q).unwrap(), FieldSpec::Q.one());
        assert_eq!(binomial(10, 5, f5()).unwrap(), f5().from_i64(2));
        assert_eq!(lucas_binomial(10, 5, 5), 2);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(p_adic_valuation(50, 5), 2);
        assert_eq!(p_adic_valuation(7, 5), 0);
        assert_eq!(p_adic_valuation(125, 5), 3);
        assert_eq!(power_of(25, 5), Some(2));
        assert_eq!(power_of(10, 5), None);
        assert_eq!(power_of(1, 5), None);
        assert_eq!(least_power_at_least(5, 3), 5);
        assert_eq!(least_power_at_least(5, 6), 25);
    }

    #[test]
    fn prime_power_binomials_vanish() {
        for p in [5u64, 7] {
            for t in 1..=2u32 {
                let q = p.pow(t);
                let f = FieldSpec::new(p).unwrap();
                for i in 1..q {
                    assert!(binomial(q, i, f).unwrap().is_zero(), "C({q},{i}) mod {p}");
                }
            }
        }
    }

    #[test]
    fn binomial_agrees_with_lucas() {
        for p in [5u64, 7] {
            let f = FieldSpec::new(p).unwrap();
            for n in 0..=200u64 {
                for k in 0..=n {
                    assert_eq!(binomial(n, k, f).unwrap(), f.from_i64(lucas_binomial(n, k, p) as i64));
                }
            }
        }
    }

    #[test]
    fn coprime_multiple_of_prime_power_choose_prime_power() {
        // C(p^t m, p^t) is a unit mod p when (p, m) = 1
        for p in [5u64, 7] {
            for t in 1..=2u32 {
                for m in 1..=6u64 {
                    if m % p == 0 {
                        continue;
                    }
                    let q = p.pow(t);
                    assert_eq!(lucas_binomial(q * m, q, p), m % p);
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rat() -> impl Strategy<Value = Rational> {
            (-50i64..50, 1i64..20).prop_map(|(n, d)| Rational::new(n, d))
        }

        proptest! {
            #[test]
            fn rational_field_axioms(a in rat(), b in rat(), c in rat()) {
                prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
                prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
                prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                if !a.is_zero() {
                    prop_assert!(a.mul(&a.inv().unwrap()).is_one());
                }
            }

            #[test]
            fn prime_field_axioms(a in 0i64..7, b in 0i64..7, c in 0i64..7) {
                let f = FieldSpec::new(7).unwrap();
                let (a, b, c) = (f.from_i64(a), f.from_i64(b), f.from_i64(c));
                prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
                if !a.is_zero() {
                    prop_assert!(a.mul(&a.inv().unwrap()).is_one());
                }
            }
        }
    }
}
