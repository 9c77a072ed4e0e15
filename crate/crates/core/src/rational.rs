//! Exact rational scalars and their text forms.
//!
//! Every quantity in the crate is a [`Rational`]. Denominators stay small
//! (multiples of `d + 1`, powers of two and the denominators of user input),
//! so a fixed-width `i128` ratio is exact; arithmetic overflow panics instead
//! of wrapping because overflow checks are enabled in every profile.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::Ratio<i128>;

pub fn int(n: i128) -> Rational {
    Rational::from_integer(n)
}

pub fn ratio(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

/// `max(x, 0)`.
#[inline]
pub fn pos(x: Rational) -> Rational {
    if x.is_negative() {
        Rational::zero()
    } else {
        x
    }
}

/// Parses the canonical form `n` or `n/m` with `m > 0`. No decimals.
pub fn parse_exact(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not of the form n or n/m"));
    match s.split_once('/') {
        None => parse_int(s).map(int).ok_or_else(bad),
        Some((n, m)) => {
            let n = parse_int(n).ok_or_else(bad)?;
            let m = parse_int(m).ok_or_else(bad)?;
            if m <= 0 {
                return Err(Error::Parse(format!(
                    "`{s}`: denominator must be a positive integer"
                )));
            }
            Ok(ratio(n, m))
        }
    }
}

/// Parses `n`, `n/m` or a finite decimal such as `0.6`, converting decimals
/// exactly (`0.6` becomes `3/5`).
pub fn parse_lenient(s: &str) -> Result<Rational> {
    let t = s.trim();
    if !t.contains('.') {
        return parse_exact(t);
    }
    let bad = || Error::Parse(format!("`{t}` is not a rational or finite decimal"));
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (whole, frac) = body.split_once('.').ok_or_else(bad)?;
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac.len() > 30 {
        return Err(Error::Parse(format!("`{t}` has too many decimal places")));
    }
    let digits = format!("{whole}{frac}");
    let numer: i128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let denom = 10i128.pow(frac.len() as u32);
    let r = ratio(numer, denom);
    Ok(if neg { -r } else { r })
}

fn parse_int(s: &str) -> Option<i128> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical text form: `n` for integers, `n/m` otherwise.
pub fn format_exact(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Decimal expansion if it terminates, `None` otherwise.
pub fn terminating_decimal(x: &Rational) -> Option<String> {
    let mut d = *x.denom();
    let (mut twos, mut fives) = (0u32, 0u32);
    while d % 2 == 0 {
        d /= 2;
        twos += 1;
    }
    while d % 5 == 0 {
        d /= 5;
        fives += 1;
    }
    if d != 1 {
        return None;
    }
    let places = twos.max(fives);
    let scaled = x * int(10i128.pow(places));
    debug_assert!(scaled.is_integer());
    let n = scaled.to_integer();
    if places == 0 {
        return Some(n.to_string());
    }
    let sign = if n.is_negative() { "-" } else { "" };
    let n = n.abs();
    let scale = 10i128.pow(places);
    let (q, r) = n.div_rem(&scale);
    Some(format!("{sign}{q}.{r:0width$}", width = places as usize))
}

/// Decimal rendering for display: exact when terminating, otherwise
/// truncated to `digits` places and prefixed with `~`.
pub fn format_decimal(x: &Rational, digits: u32) -> String {
    if let Some(s) = terminating_decimal(x) {
        return s;
    }
    let scale = 10i128.pow(digits);
    let scaled = (x * int(scale)).trunc().to_integer();
    let sign = if x.is_negative() { "-" } else { "" };
    let (q, r) = scaled.abs().div_rem(&scale);
    format!("~{sign}{q}.{r:0width$}", width = digits as usize)
}

/// Exact decimal where terminating, canonical rational otherwise.
pub fn format_table_cell(x: &Rational) -> String {
    terminating_decimal(x).unwrap_or_else(|| format_exact(x))
}

/// True when `0 <= x <= 1`.
pub fn in_unit_interval(x: &Rational) -> bool {
    !x.is_negative() && *x <= Rational::one()
}

pub fn to_f64(x: &Rational) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Least common multiple of a set of denominators.
pub fn lcm_of<I: IntoIterator<Item = i128>>(it: I) -> i128 {
    it.into_iter().fold(1, |acc, d| acc.lcm(&d))
}
