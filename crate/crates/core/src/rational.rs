//! Exact rational helpers.
//!
//! Demands, probabilities and approximation thresholds are all kept as
//! `Ratio<i64>`. Powers of `1 + eps` outgrow machine integers quickly, so the
//! few places that need them go through `BigInt` fractions and come back as
//! integer degree thresholds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{input, Result};

pub type Rational = Ratio<i64>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn count(n: usize) -> Rational {
    Rational::from_integer(n as i64)
}

/// Parses `"3"`, `"-7/2"` or a decimal such as `"0.3"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return input("empty rational");
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad(s))?;
        let d: i64 = d.trim().parse().map_err(|_| bad(s))?;
        if d == 0 {
            return input(format!("zero denominator in `{s}`"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad(s));
        }
        let w: i64 = if whole_digits.is_empty() { 0 } else { whole_digits.parse().map_err(|_| bad(s))? };
        let f: i64 = frac.parse().map_err(|_| bad(s))?;
        let den = 10i64.pow(frac.len() as u32);
        let mag = w.checked_mul(den).and_then(|x| x.checked_add(f)).ok_or_else(|| bad(s))?;
        return Ok(Rational::new(if negative { -mag } else { mag }, den));
    }
    s.parse::<i64>().map(int).map_err(|_| bad(s))
}

fn bad(s: &str) -> crate::Error {
    crate::Error::Input(format!("malformed rational `{s}`"))
}

/// Canonical text form: `"3"` or `"-7/2"`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Checks `0 < eps < 1`.
pub fn check_epsilon(eps: Rational) -> Result<()> {
    if eps <= Rational::zero() || eps >= Rational::one() {
        return input(format!("epsilon must lie in (0, 1), got {}", format_rational(&eps)));
    }
    Ok(())
}

/// Unreduced fraction; powers of `1 + eps` are kept this way because
/// reducing them at every step costs a gcd on numbers with thousands of digits.
struct Raw {
    num: BigInt,
    den: BigInt,
}

impl Raw {
    fn of(r: &Rational) -> Self {
        Raw { num: BigInt::from(*r.numer()), den: BigInt::from(*r.denom()) }
    }

    fn mul(&mut self, r: &Rational) {
        self.num *= *r.numer();
        self.den *= *r.denom();
    }

    fn div(&mut self, r: &Rational) {
        self.num *= *r.denom();
        self.den *= *r.numer();
    }

    fn at_least(&self, other: &Raw) -> bool {
        &self.num * &other.den >= &other.num * &self.den
    }

    fn floor(&self) -> BigInt {
        self.num.div_floor(&self.den)
    }

    fn ceil(&self) -> BigInt {
        -(-&self.num).div_floor(&self.den)
    }
}

/// Smallest `lambda >= 0` with `base^lambda >= target`; `base > 1`.
pub fn ceil_log(base: Rational, target: Rational) -> u32 {
    assert!(base > Rational::one(), "logarithm base must exceed 1");
    let target = Raw::of(&target);
    let mut power = Raw::of(&Rational::one());
    let mut lambda = 0;
    while !power.at_least(&target) {
        power.mul(&base);
        lambda += 1;
    }
    lambda
}

/// Integer thresholds `ceil(t / ratio^alpha)` for `alpha = 0..=max_alpha`; `ratio > 1`.
///
/// An integer degree `x` satisfies `x >= t / ratio^alpha` exactly when it is at
/// least the returned entry `alpha`.
pub fn shrinking_ceil_thresholds(t: Rational, ratio: Rational, max_alpha: u32) -> Vec<i64> {
    let mut value = Raw::of(&t);
    let mut out = Vec::with_capacity(max_alpha as usize + 1);
    for alpha in 0..=max_alpha {
        if alpha > 0 {
            value.div(&ratio);
        }
        let c = clamp_i64(&value.ceil());
        out.push(c);
        // 0 < value <= 1 from here on, so every later ceiling is 1
        if c == 1 && t > Rational::zero() {
            out.resize(max_alpha as usize + 1, 1);
            break;
        }
    }
    out
}

/// Integer thresholds `floor(base * ratio^alpha)` for increasing `alpha`, stopping at the
/// first entry that reaches `limit`.
///
/// An integer degree `x` satisfies `x <= base * ratio^alpha` exactly when it is at most
/// the returned entry `alpha`.
pub fn growing_floor_thresholds(base: Rational, ratio: Rational, limit: i64) -> Vec<i64> {
    assert!(ratio > Rational::one());
    let mut value = Raw::of(&base);
    let mut out = Vec::new();
    loop {
        let f = clamp_i64(&value.floor());
        out.push(f);
        if f >= limit {
            return out;
        }
        value.mul(&ratio);
    }
}

fn clamp_i64(v: &BigInt) -> i64 {
    v.to_i64().unwrap_or(if v.is_negative() { i64::MIN } else { i64::MAX })
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a.lcm(&b)
}

/// Lossy conversion for reporting.
pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
