//! Arbitrary-precision decimal floating point.
//!
//! `BigReal` is `mantissa * 10^exponent` with the mantissa rounded to a fixed
//! number of significant decimal digits (round half to even) after every
//! operation. It exists so that closed forms can be checked by a path that
//! shares no arithmetic with the double-double fast path.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Dd;

/// Smallest precision accepted by the oracle.
pub const MIN_DIGITS: u32 = 50;

#[derive(Clone, Debug)]
pub struct BigReal {
    mantissa: BigInt,
    exponent: i64,
    digits: u32,
}

fn pow10(n: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u8), n as usize)
}

fn decimal_len(x: &BigInt) -> u32 {
    if x.is_zero() {
        return 0;
    }
    // bits * log10(2) is a lower bound within one of the answer.
    let approx = ((x.bits() as f64 - 1.0) * std::f64::consts::LOG10_2).floor() as u32;
    let mut n = approx.max(1);
    let mag = x.abs();
    while mag >= pow10(n) {
        n += 1;
    }
    while n > 1 && mag < pow10(n - 1) {
        n -= 1;
    }
    n
}

/// Integer division rounding half to even.
fn div_round(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_rem(den);
    if r.is_zero() {
        return q;
    }
    let twice = r.abs() * 2u8;
    let den_abs = den.abs();
    let away = match twice.cmp(&den_abs) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => q.is_odd(),
    };
    if !away {
        return q;
    }
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    if negative {
        q - 1
    } else {
        q + 1
    }
}

impl BigReal {
    pub fn zero(digits: u32) -> BigReal {
        BigReal {
            mantissa: BigInt::zero(),
            exponent: 0,
            digits,
        }
    }

    pub fn from_int(v: i64, digits: u32) -> BigReal {
        BigReal {
            mantissa: BigInt::from(v),
            exponent: 0,
            digits,
        }
        .rounded()
    }

    /// Exact decimal image of a binary double, then rounded to `digits`.
    pub fn from_f64(x: f64, digits: u32) -> BigReal {
        assert!(x.is_finite(), "BigReal::from_f64 on non-finite value");
        if x == 0.0 {
            return BigReal::zero(digits);
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & ((1u64 << 52) - 1);
        let (significand, exp2) = if biased == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1u64 << 52), biased - 1075)
        };
        let mut m = BigInt::from(significand);
        let exponent;
        if exp2 >= 0 {
            m <<= exp2 as usize;
            exponent = 0;
        } else {
            // m * 2^-k = m * 5^k * 10^-k
            let k = (-exp2) as usize;
            m *= num_traits::pow(BigInt::from(5u8), k);
            exponent = exp2;
        }
        if negative {
            m = -m;
        }
        BigReal {
            mantissa: m,
            exponent,
            digits,
        }
        .rounded()
    }

    pub fn from_dd(x: Dd, digits: u32) -> BigReal {
        let wide = digits.max(40) + 40;
        (BigReal::from_f64(x.hi, wide) + BigReal::from_f64(x.lo, wide)).with_digits(digits)
    }

    /// Parses a decimal literal such as `6.674e-11` exactly, then rounds.
    pub fn parse(s: &str, digits: u32) -> Result<BigReal, ParseBigRealError> {
        let s = s.trim();
        let (body, exp) = match s.find(['e', 'E']) {
            Some(i) => {
                let e: i64 = s[i + 1..]
                    .parse()
                    .map_err(|_| ParseBigRealError(s.to_string()))?;
                (&s[..i], e)
            }
            None => (s, 0),
        };
        let (neg, body) = match body.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, body.strip_prefix('+').unwrap_or(body)),
        };
        let (int_part, frac_part) = match body.find('.') {
            Some(i) => (&body[..i], &body[i + 1..]),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(ParseBigRealError(s.to_string()));
        }
        let all: String = [int_part, frac_part].concat();
        if !all.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseBigRealError(s.to_string()));
        }
        let mut m = BigInt::from_str(&all).map_err(|_| ParseBigRealError(s.to_string()))?;
        if neg {
            m = -m;
        }
        Ok(BigReal {
            mantissa: m,
            exponent: exp - frac_part.len() as i64,
            digits,
        }
        .rounded())
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Same value re-rounded to a different precision.
    pub fn with_digits(&self, digits: u32) -> BigReal {
        BigReal {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent,
            digits,
        }
        .rounded()
    }

    fn rounded(mut self) -> BigReal {
        let n = decimal_len(&self.mantissa);
        if n > self.digits {
            let drop = n - self.digits;
            self.mantissa = div_round(&self.mantissa, &pow10(drop));
            self.exponent += drop as i64;
        }
        if self.mantissa.is_zero() {
            self.exponent = 0;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> BigReal {
        BigReal {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
            digits: self.digits,
        }
    }

    /// Position of the leading digit: value lies in `[10^(m-1), 10^m)`.
    fn magnitude(&self) -> i64 {
        self.exponent + decimal_len(&self.mantissa) as i64
    }

    pub fn sqr(&self) -> BigReal {
        self * self
    }

    /// Square root, `None` for negative input.
    pub fn sqrt(&self) -> Option<BigReal> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(self.clone());
        }
        // Scale so the integer root carries digits + 4 guard digits.
        let want = 2 * (self.digits as i64 + 4);
        let have = decimal_len(&self.mantissa) as i64;
        let mut shift = (want - have).max(0);
        if (self.exponent - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let scaled = &self.mantissa * pow10(shift as u32);
        let root = scaled.sqrt();
        Some(
            BigReal {
                mantissa: root,
                exponent: (self.exponent - shift) / 2,
                digits: self.digits,
            }
            .rounded(),
        )
    }

    pub fn powi(&self, n: u32) -> BigReal {
        let mut acc = BigReal::from_int(1, self.digits);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        format!("{}e{}", self.mantissa, self.exponent)
            .parse()
            .unwrap_or(f64::NAN)
    }

    /// Scientific notation with `sig` significant digits, e.g. `-5.3856e-10`.
    pub fn to_sci_string(&self, sig: u32) -> String {
        if self.is_zero() {
            return format!("0.{}e0", "0".repeat(sig.saturating_sub(1) as usize));
        }
        let r = self.with_digits(sig.max(1));
        let mut digits = r.mantissa.abs().to_string();
        let mut exp10 = r.exponent + digits.len() as i64 - 1;
        if (digits.len() as u32) < sig {
            digits.push_str(&"0".repeat((sig as usize) - digits.len()));
        } else if digits.len() as u32 > sig {
            // carry produced an extra digit (e.g. 9.99 -> 10.0)
            digits.truncate(sig as usize);
            exp10 = r.exponent + r.mantissa.abs().to_string().len() as i64 - 1;
        }
        let sign = if r.is_negative() { "-" } else { "" };
        let (lead, rest) = digits.split_at(1);
        if rest.is_empty() {
            format!("{sign}{lead}e{exp10}")
        } else {
            format!("{sign}{lead}.{rest}e{exp10}")
        }
    }

    fn binary_digits(&self, other: &BigReal) -> u32 {
        self.digits.max(other.digits)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid decimal literal `{0}`")]
pub struct ParseBigRealError(pub String);

impl<'a> Add<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn add(self, rhs: &BigReal) -> BigReal {
        let digits = self.binary_digits(rhs);
        if rhs.is_zero() {
            return self.with_digits(digits);
        }
        if self.is_zero() {
            return rhs.with_digits(digits);
        }
        // An addend more than digits+3 orders below the other only affects rounding.
        let gap = self.magnitude() - rhs.magnitude();
        let limit = digits as i64 + 3;
        let (big, small) = if gap >= 0 { (self, rhs) } else { (rhs, self) };
        if gap.abs() > limit {
            // keep a sticky trace of the small addend below the rounding point
            let floor_exp = big.magnitude() - limit;
            let sticky = BigReal {
                mantissa: if small.is_negative() {
                    -BigInt::one()
                } else {
                    BigInt::one()
                },
                exponent: floor_exp - 1,
                digits,
            };
            return (&big.with_digits(digits + 4) + &sticky.with_digits(digits + 4))
                .with_digits(digits);
        }
        let exp = self.exponent.min(rhs.exponent);
        let a = &self.mantissa * pow10((self.exponent - exp) as u32);
        let b = &rhs.mantissa * pow10((rhs.exponent - exp) as u32);
        BigReal {
            mantissa: a + b,
            exponent: exp,
            digits,
        }
        .rounded()
    }
}

impl<'a> Sub<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn sub(self, rhs: &BigReal) -> BigReal {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn mul(self, rhs: &BigReal) -> BigReal {
        BigReal {
            mantissa: &self.mantissa * &rhs.mantissa,
            exponent: self.exponent + rhs.exponent,
            digits: self.binary_digits(rhs),
        }
        .rounded()
    }
}

impl<'a> Div<&'a BigReal> for &'a BigReal {
    type Output = BigReal;
    fn div(self, rhs: &BigReal) -> BigReal {
        assert!(!rhs.is_zero(), "BigReal division by zero");
        let digits = self.binary_digits(rhs);
        if self.is_zero() {
            return BigReal::zero(digits);
        }
        let na = decimal_len(&self.mantissa) as i64;
        let nb = decimal_len(&rhs.mantissa) as i64;
        let shift = (digits as i64 + 2 + nb - na).max(0);
        let num = &self.mantissa * pow10(shift as u32);
        BigReal {
            mantissa: div_round(&num, &rhs.mantissa),
            exponent: self.exponent - rhs.exponent - shift,
            digits,
        }
        .rounded()
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
            digits: self.digits,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr<BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a BigReal> for BigReal {
            type Output = BigReal;
            fn $m(self, rhs: &BigReal) -> BigReal { (&self).$m(rhs) }
        }
        impl<'a> $tr<BigReal> for &'a BigReal {
            type Output = BigReal;
            fn $m(self, rhs: BigReal) -> BigReal { self.$m(&rhs) }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul, Div::div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        -&self
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &BigReal) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for BigReal {}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &BigReal) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for BigReal {
    fn cmp(&self, other: &BigReal) -> Ordering {
        let exp = self.exponent.min(other.exponent);
        let a = &self.mantissa * pow10((self.exponent - exp) as u32);
        let b = &other.mantissa * pow10((other.exponent - exp) as u32);
        a.cmp(&b)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().map(|p| p as u32 + 1).unwrap_or(self.digits);
        f.write_str(&self.to_sci_string(sig))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn br(s: &str) -> BigReal {
        BigReal::parse(s, 60).unwrap()
    }

    #[test]
    fn f64_conversion_is_exact() {
        // 0.1 as a double is 0.1000000000000000055511151231257827021181583404541015625
        let x = BigReal::from_f64(0.1, 80);
        assert_eq!(
            x.to_sci_string(55),
            "1.000000000000000055511151231257827021181583404541015625e-1"
        );
        assert_eq!(x.to_f64(), 0.1);
    }

    #[test]
    fn one_third_rounds_to_nearest() {
        let third = &br("1") / &br("3");
        assert_eq!(third.to_sci_string(5), "3.3333e-1");
        let two_thirds = &br("2") / &br("3");
        assert_eq!(two_thirds.to_sci_string(5), "6.6667e-1");
    }

    #[test]
    fn half_even_ties() {
        assert_eq!(BigReal::parse("2.5", 1).unwrap().to_sci_string(1), "2e0");
        assert_eq!(BigReal::parse("3.5", 1).unwrap().to_sci_string(1), "4e0");
        assert_eq!(BigReal::parse("-2.5", 1).unwrap().to_sci_string(1), "-2e0");
    }

    #[test]
    fn sqrt_two_to_sixty_digits() {
        let r = br("2").sqrt().unwrap();
        assert_eq!(
            r.to_sci_string(50),
            "1.4142135623730950488016887242096980785696718753769e0"
        );
        assert!(br("-1").sqrt().is_none());
    }

    #[test]
    fn tiny_addend_survives_in_deviation() {
        let one = br("1");
        let tiny = br("1e-40");
        let d = &(&one + &tiny) - &one;
        assert_eq!(d.to_sci_string(3), "1.00e-40");
    }

    #[test]
    fn negligible_addend_keeps_direction() {
        let one = BigReal::parse("1", 10).unwrap();
        let tiny = BigReal::parse("1e-30", 10).unwrap();
        assert_eq!(&one + &tiny, one);
        assert!(&one - &tiny <= one);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(BigReal::parse("1.2.3", 50).is_err());
        assert!(BigReal::parse("abc", 50).is_err());
        assert!(BigReal::parse("", 50).is_err());
    }

    #[test]
    fn ordering_and_sign() {
        assert!(br("-1e-10") < br("1e-30"));
        assert!(br("5") > br("4.99999"));
        assert!(br("-3").abs() == br("3"));
    }

    #[test]
    fn dd_round_trip() {
        let x = Dd::new(1.0, 1e-20);
        let b = BigReal::from_dd(x, 60);
        let d = &b - &br("1");
        assert_eq!(d.to_f64(), 1e-20);
    }
}
