//! Two exact rational sequences with the same limit √2: continued-fraction
//! convergents and partial sums of the binomial series for `(1 + 1)^(1/2)`.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Decimal digits carried by [`limit_distance`].
pub const DISTANCE_DIGITS: u32 = 80;

fn check_len(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("sequence length must be at least 1".into()));
    }
    Ok(())
}

/// `1, 3/2, 7/5, 17/12, ...`: convergents of `[1; 2, 2, 2, ...]`.
pub fn cf_convergents(n: usize) -> Result<Vec<BigRational>> {
    check_len(n)?;
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::one());
    let mut out = vec![BigRational::new(p1.clone(), q1.clone())];
    while out.len() < n {
        let p2 = &p1 * 2 + &p0;
        let q2 = &q1 * 2 + &q0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        out.push(BigRational::new(p1.clone(), q1.clone()));
    }
    Ok(out)
}

/// `Σ_{k<m} C(1/2, k)` for `m = 1..=n`.
pub fn binomial_partial_sums(n: usize) -> Result<Vec<BigRational>> {
    check_len(n)?;
    let half = BigRational::new(1.into(), 2.into());
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        if k > 0 {
            let kk = BigRational::from_integer(k.into());
            term = term * (&half - &kk + BigRational::one()) / kk;
        }
        sum += &term;
        out.push(sum.clone());
    }
    Ok(out)
}

/// The binomial partial sums with `1/m` added to the `m`-th one: a third
/// sequence with the same limit and no term in common with the second.
pub fn rescaled_binomial_sums(n: usize) -> Result<Vec<BigRational>> {
    Ok(binomial_partial_sums(n)?
        .into_iter()
        .enumerate()
        .map(|(k, s)| s + BigRational::new(1.into(), (k + 1).into()))
        .collect())
}

/// Removes from each list every value that occurs in the other.
pub fn dedupe_common_terms(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let sa: HashSet<&BigRational> = a.iter().collect();
    let sb: HashSet<&BigRational> = b.iter().collect();
    (a.iter().filter(|x| !sb.contains(x)).cloned().collect(), b.iter().filter(|x| !sa.contains(x)).cloned().collect())
}

/// Sign of `x − √2`, decided by comparing `x²` with 2.
pub fn side_of_sqrt2(x: &BigRational) -> Ordering {
    if !x.is_positive() {
        return Ordering::Less;
    }
    (x * x).cmp(&BigRational::from_integer(2.into()))
}

/// Whether `x` is closer to √2 than `y` (`Less`), equally close, or farther.
/// Exact: when the two lie on opposite sides, `|x − √2| < |y − √2|` is
/// decided by comparing `(x + y)²` with 8.
pub fn compare_distance(x: &BigRational, y: &BigRational) -> Ordering {
    match (side_of_sqrt2(x), side_of_sqrt2(y)) {
        (Ordering::Equal, Ordering::Equal) => Ordering::Equal,
        (Ordering::Equal, _) => Ordering::Less,
        (_, Ordering::Equal) => Ordering::Greater,
        (Ordering::Greater, Ordering::Greater) => x.cmp(y),
        (Ordering::Less, Ordering::Less) => y.cmp(x),
        (sx, _) => {
            let s = x + y;
            let eight = BigRational::from_integer(8.into());
            if !s.is_positive() {
                // the one below √2 is negative and farther away
                return if sx == Ordering::Less { Ordering::Greater } else { Ordering::Less };
            }
            // x below, y above: x closer iff x + y > 2√2
            let closer_below = (&s * &s).cmp(&eight);
            if sx == Ordering::Less {
                closer_below.reverse()
            } else {
                closer_below
            }
        }
    }
}

/// `⌊√2 · 10^digits⌋` by integer square root.
fn scaled_sqrt2(digits: u32) -> BigInt {
    let two = BigUint::from(2u8) * BigUint::from(10u8).pow(2 * digits);
    BigInt::from(two.sqrt())
}

/// `|x_k − √2|` for every element, from an 80-digit integer approximation of
/// √2. The result is rounded to `f64` only at the end.
pub fn limit_distance(seq: &[BigRational]) -> Vec<f64> {
    let scale = BigInt::from(10u8).pow(DISTANCE_DIGITS);
    let root = BigRational::new(scaled_sqrt2(DISTANCE_DIGITS), scale);
    seq.iter().map(|x| (x - &root).abs().to_f64().unwrap_or(f64::INFINITY)).collect()
}

/// `x` rounded half away from zero to `digits` decimals.
pub fn decimal_string(x: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u8).pow(digits);
    let scaled = x.abs() * BigRational::from_integer(scale.clone());
    let rounded = (scaled + BigRational::new(1.into(), 2.into())).floor().to_integer();
    let int_part = &rounded / &scale;
    let frac_part = &rounded % &scale;
    let sign = if x.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int_part}");
    }
    format!("{sign}{int_part}.{frac:0>width$}", frac = frac_part.to_string(), width = digits as usize)
}
