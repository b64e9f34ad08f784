//! Exact rational coefficients with a machine-word fast path.
//!
//! Elimination on these complexes keeps coefficients tiny, so values are
//! held as reduced `i64` fractions and promoted to [`Rational`] only when an
//! operation would overflow. Results that fit again are demoted.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Coeff {
    /// Numerator and positive denominator, in lowest terms.
    Small(i64, i64),
    Big(Rational),
}

impl fmt::Debug for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_rational())
    }
}

fn from_i128(n: i128, d: i128) -> Coeff {
    debug_assert!(d != 0);
    let (mut n, mut d) = if d < 0 { (-n, -d) } else { (n, d) };
    let g = n.gcd(&d);
    if g > 1 {
        n /= g;
        d /= g;
    }
    match (i64::try_from(n), i64::try_from(d)) {
        (Ok(n), Ok(d)) if n != i64::MIN => Coeff::Small(n, d),
        _ => Coeff::Big(Rational::new(BigInt::from(n), BigInt::from(d))),
    }
}

impl Coeff {
    pub fn zero() -> Coeff {
        Coeff::Small(0, 1)
    }

    pub fn one() -> Coeff {
        Coeff::Small(1, 1)
    }

    pub fn from_i64(n: i64) -> Coeff {
        if n == i64::MIN {
            Coeff::Big(Rational::from_integer(n.into()))
        } else {
            Coeff::Small(n, 1)
        }
    }

    pub fn from_rational(x: &Rational) -> Coeff {
        match (x.numer().to_i64(), x.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Coeff::Small(n, d),
            _ => Coeff::Big(x.clone()),
        }
    }

    pub fn to_rational(&self) -> Rational {
        match self {
            Coeff::Small(n, d) => Rational::new_raw((*n).into(), (*d).into()),
            Coeff::Big(x) => x.clone(),
        }
    }

    fn demote(x: Rational) -> Coeff {
        Coeff::from_rational(&x)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Small(n, _) => *n == 0,
            Coeff::Big(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Small(n, d) => *n == 1 && *d == 1,
            Coeff::Big(x) => x.is_one(),
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Small(n, d) => Coeff::Small(-n, *d),
            Coeff::Big(x) => Coeff::demote(-x),
        }
    }

    pub fn recip(&self) -> Coeff {
        match self {
            Coeff::Small(n, d) => from_i128(*d as i128, *n as i128),
            Coeff::Big(x) => Coeff::demote(x.recip()),
        }
    }

    pub fn add(&self, o: &Coeff) -> Coeff {
        match (self, o) {
            (Coeff::Small(a, b), Coeff::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    from_i128(a + c, b)
                } else {
                    from_i128(a * d + c * b, b * d)
                }
            }
            _ => Coeff::demote(self.to_rational() + o.to_rational()),
        }
    }

    pub fn sub(&self, o: &Coeff) -> Coeff {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Coeff) -> Coeff {
        match (self, o) {
            (Coeff::Small(a, b), Coeff::Small(c, d)) => {
                from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Coeff::demote(self.to_rational() * o.to_rational()),
        }
    }

    /// `self - f * x`.
    pub fn sub_mul(&self, f: &Coeff, x: &Coeff) -> Coeff {
        match (self, f, x) {
            (Coeff::Small(a, b), Coeff::Small(c, d), Coeff::Small(e, g)) => {
                let (a, b) = (*a as i128, *b as i128);
                let (n2, d2) = (*c as i128 * *e as i128, *d as i128 * *g as i128);
                if b == 1 && d2 == 1 {
                    from_i128(a - n2, 1)
                } else {
                    match (a.checked_mul(d2), n2.checked_mul(b), b.checked_mul(d2)) {
                        (Some(p), Some(q), Some(den)) => match p.checked_sub(q) {
                            Some(num) => from_i128(num, den),
                            None => Coeff::demote(self.to_rational() - f.to_rational() * x.to_rational()),
                        },
                        _ => Coeff::demote(self.to_rational() - f.to_rational() * x.to_rational()),
                    }
                }
            }
            _ => Coeff::demote(self.to_rational() - f.to_rational() * x.to_rational()),
        }
    }

    pub fn numer_denom(&self) -> (BigInt, BigInt) {
        match self {
            Coeff::Small(n, d) => ((*n).into(), (*d).into()),
            Coeff::Big(x) => (x.numer().clone(), x.denom().clone()),
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Coeff::Small(n, _) => *n < 0,
            Coeff::Big(x) => x.is_negative(),
        }
    }
}

impl PartialOrd for Coeff {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coeff {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Coeff::Small(a, b), Coeff::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Coeff::from_i64(i64::MAX);
        let sum = big.add(&big);
        assert!(matches!(sum, Coeff::Big(_)));
        assert_eq!(sum.to_rational(), r(i64::MAX, 1) * r(2, 1));
        let back = sum.sub(&big);
        assert_eq!(back, Coeff::Small(i64::MAX, 1));
        let tiny = Coeff::from_rational(&r(1, i64::MAX)).mul(&Coeff::from_rational(&r(1, 3)));
        assert!(matches!(tiny, Coeff::Big(_)));
        assert_eq!(tiny.recip().recip(), tiny);
    }

    #[test]
    fn basic_values() {
        assert!(Coeff::zero().is_zero());
        assert!(Coeff::one().is_one());
        assert_eq!(Coeff::from_rational(&r(-6, 4)), Coeff::Small(-3, 2));
        assert_eq!(Coeff::Small(-3, 2).recip(), Coeff::Small(-2, 3));
        assert_eq!(Coeff::Small(1, 2).sub_mul(&Coeff::Small(1, 3), &Coeff::Small(3, 2)), Coeff::zero());
        assert!(Coeff::Small(-1, 3) < Coeff::Small(-1, 4));
        assert_eq!(Coeff::Small(5, 7).to_string(), "5/7");
    }

    fn arb() -> impl Strategy<Value = Rational> {
        prop_oneof![
            (-20i64..20, 1i64..20).prop_map(|(p, q)| r(p, q)),
            (any::<i64>(), 1i64..i64::MAX).prop_map(|(p, q)| r(p, q)),
        ]
    }

    proptest! {
        #[test]
        fn agrees_with_big_rationals(a in arb(), b in arb(), c in arb()) {
            let (x, y, z) = (Coeff::from_rational(&a), Coeff::from_rational(&b), Coeff::from_rational(&c));
            prop_assert_eq!(x.add(&y).to_rational(), &a + &b);
            prop_assert_eq!(x.sub(&y).to_rational(), &a - &b);
            prop_assert_eq!(x.mul(&y).to_rational(), &a * &b);
            prop_assert_eq!(x.sub_mul(&y, &z).to_rational(), &a - &b * &c);
            prop_assert_eq!(x.cmp(&y), a.cmp(&b));
            if !b.is_zero() {
                prop_assert_eq!(y.recip().to_rational(), b.recip());
            }
            prop_assert_eq!(Coeff::from_rational(&x.add(&y).to_rational()), x.add(&y));
        }
    }
}
