use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{eval_dense, IntPolynomial, PolyError};

/// All integer roots of a univariate polynomial.
///
/// Rational-root search: after factoring out `X^k`, every nonzero integer
/// root divides the trailing coefficient and is bounded by the Cauchy bound.
/// Candidates are verified by exact evaluation.
pub fn integer_roots(p: &IntPolynomial) -> Result<BTreeSet<BigInt>, PolyError> {
    integer_roots_dense(&p.univariate_coeffs()?)
}

pub fn integer_roots_dense(coeffs: &[BigInt]) -> Result<BTreeSet<BigInt>, PolyError> {
    roots_within(coeffs, None)
}

/// Integer roots in `lo..=hi`, sorted ascending.
pub fn integer_roots_in_range(coeffs: &[BigInt], lo: &BigInt, hi: &BigInt) -> Result<Vec<BigInt>, PolyError> {
    let reach = lo.abs().max(hi.abs());
    Ok(roots_within(coeffs, Some(&reach))?
        .into_iter()
        .filter(|r| r >= lo && r <= hi)
        .collect())
}

fn roots_within(coeffs: &[BigInt], reach: Option<&BigInt>) -> Result<BTreeSet<BigInt>, PolyError> {
    let top = coeffs
        .iter()
        .rposition(|c| !c.is_zero())
        .ok_or(PolyError::ZeroPolynomial)?;
    let coeffs = &coeffs[..=top];
    let low = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    let mut roots = BTreeSet::new();
    if low > 0 {
        roots.insert(BigInt::zero());
    }
    let reduced = &coeffs[low..];
    if reduced.len() == 1 {
        return Ok(roots);
    }
    let trailing = reduced[0].abs();
    let lead = reduced.last().unwrap().abs();
    let cauchy = reduced[..reduced.len() - 1]
        .iter()
        .map(|c| c.abs().div_ceil(&lead))
        .max()
        .unwrap()
        + BigInt::one();
    let bound = match reach {
        Some(r) => cauchy.min(r.clone()),
        None => cauchy,
    };
    for d in divisors_up_to(&trailing, &bound) {
        for cand in [d.clone(), -d] {
            if eval_dense(reduced, &cand).is_zero() {
                roots.insert(cand);
            }
        }
    }
    Ok(roots)
}

/// Positive divisors of `n > 0` that are at most `bound`, ascending.
/// Uses whichever of a direct scan to `bound` or trial division to `sqrt(n)`
/// is cheaper.
pub(crate) fn divisors_up_to(n: &BigInt, bound: &BigInt) -> Vec<BigInt> {
    debug_assert!(n.is_positive());
    if !bound.is_positive() {
        return Vec::new();
    }
    let root = n.sqrt();
    if let (Some(n64), Some(b64), Some(r64)) = (n.to_u128(), bound.to_u128(), root.to_u128()) {
        let mut out = Vec::new();
        if b64 <= r64 {
            for d in 1..=b64 {
                if n64 % d == 0 {
                    out.push(BigInt::from(d));
                }
            }
        } else {
            let mut hi = Vec::new();
            for d in 1..=r64 {
                if n64 % d == 0 {
                    out.push(BigInt::from(d));
                    let e = n64 / d;
                    if e != d && e <= b64 {
                        hi.push(BigInt::from(e));
                    }
                }
            }
            out.extend(hi.into_iter().rev());
        }
        return out;
    }
    let mut out = Vec::new();
    let mut hi = Vec::new();
    let limit = bound.clone().min(root.clone());
    let mut d = BigInt::one();
    while d <= limit {
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            let e = n / &d;
            if e != d && e <= *bound && bound > &root {
                hi.push(e);
            }
        }
        d += 1;
    }
    out.extend(hi.into_iter().rev());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn set(v: &[i64]) -> BTreeSet<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(integer_roots_dense(&big(&[6, -5, 1])).unwrap(), set(&[2, 3]));
        assert_eq!(integer_roots_dense(&big(&[1, 0, 1])).unwrap(), set(&[]));
        assert_eq!(integer_roots_dense(&big(&[-3, 2])).unwrap(), set(&[]));
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert_eq!(integer_roots_dense(&big(&[0, 0])), Err(PolyError::ZeroPolynomial));
        assert_eq!(integer_roots_dense(&[]), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn zero_root_and_constants() {
        assert_eq!(integer_roots_dense(&big(&[0, 0, 1])).unwrap(), set(&[0]));
        assert_eq!(integer_roots_dense(&big(&[0, -4, 0, 1])).unwrap(), set(&[-2, 0, 2]));
        assert_eq!(integer_roots_dense(&big(&[5])).unwrap(), set(&[]));
    }

    #[test]
    fn range_restriction() {
        // (x-2)(x+3)(x-10)
        let p = big(&[60, -16, -9, 1]);
        let got = integer_roots_in_range(&p, &BigInt::from(1), &BigInt::from(9)).unwrap();
        assert_eq!(got, big(&[2]));
    }

    #[test]
    fn divisor_listing() {
        let got = divisors_up_to(&BigInt::from(36), &BigInt::from(100));
        assert_eq!(got, big(&[1, 2, 3, 4, 6, 9, 12, 18, 36]));
        let got = divisors_up_to(&BigInt::from(36), &BigInt::from(5));
        assert_eq!(got, big(&[1, 2, 3, 4]));
        let got = divisors_up_to(&BigInt::from(36), &BigInt::from(12));
        assert_eq!(got, big(&[1, 2, 3, 4, 6, 9, 12]));
    }
}
