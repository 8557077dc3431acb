use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::CountError;
use crate::poly::roots::divisors_up_to;

/// Nonzero `d` with `d | m` and `|d| <= bound`: `1, -1, 2, -2, ...`.
pub fn signed_divisors_bounded(m: &BigInt, bound: &BigInt) -> Vec<BigInt> {
    assert!(!m.is_zero(), "zero has every integer as a divisor");
    divisors_up_to(&m.abs(), bound)
        .into_iter()
        .flat_map(|d| [d.clone(), -d])
        .collect()
}

/// Every ordered `s`-tuple of nonzero integers with product `m`.
pub fn divisor_tuples(m: &BigInt, s: usize) -> Result<Vec<Vec<BigInt>>, CountError> {
    if m.is_zero() {
        return Err(CountError::ZeroTarget);
    }
    if s == 0 {
        return Err(CountError::ZeroArity);
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(s);
    positive_tuples(&m.abs(), s, &mut prefix, &mut out);
    let negative = m.is_negative();
    let mut signed = Vec::with_capacity(out.len() << (s - 1));
    for t in out {
        // free signs on the first s-1 factors; the last restores sign(m)
        for mask in 0u64..(1 << (s - 1)) {
            let mut v = t.clone();
            let mut flips = 0;
            for (i, d) in v.iter_mut().take(s - 1).enumerate() {
                if mask >> i & 1 == 1 {
                    *d = -d.clone();
                    flips += 1;
                }
            }
            if (flips % 2 == 1) != negative {
                let last = v.last_mut().unwrap();
                *last = -last.clone();
            }
            signed.push(v);
        }
    }
    Ok(signed)
}

fn positive_tuples(m: &BigInt, s: usize, prefix: &mut Vec<BigInt>, out: &mut Vec<Vec<BigInt>>) {
    if s == 1 {
        let mut t = prefix.clone();
        t.push(m.clone());
        out.push(t);
        return;
    }
    for d in divisors_up_to(m, m) {
        let rest = m / &d;
        prefix.push(d);
        positive_tuples(&rest, s - 1, prefix, out);
        prefix.pop();
    }
}

/// `L(c, X) = exp(c log X / log log X)`, defined for `X > e`.
pub fn l_function(c: f64, x: f64) -> Result<f64, CountError> {
    if !(x > std::f64::consts::E) {
        return Err(CountError::DomainError(format!("L(c, X) needs X > e, got {x}")));
    }
    let lx = x.ln();
    Ok((c * lx / lx.ln()).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn tuple_examples() {
        let t = divisor_tuples(&big(12), 2).unwrap();
        assert_eq!(t.len(), 12);
        assert!(t.iter().all(|p| &p[0] * &p[1] == big(12)));
        assert_eq!(divisor_tuples(&big(1), 1).unwrap(), vec![vec![big(1)]]);
        let t = divisor_tuples(&big(-1), 2).unwrap();
        assert_eq!(t, vec![vec![big(1), big(-1)], vec![big(-1), big(1)]]);
        assert_eq!(divisor_tuples(&big(0), 2), Err(CountError::ZeroTarget));
    }

    #[test]
    fn tuples_are_distinct_and_exhaustive() {
        for m in [-30i64, -7, 1, 8, 36] {
            for s in 1..=3 {
                let t = divisor_tuples(&big(m), s).unwrap();
                let mut sorted = t.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), t.len());
                let mut brute = 0;
                let r = m.abs();
                let mut rec = vec![0i64; s];
                fn go(i: usize, rec: &mut Vec<i64>, r: i64, m: i64, brute: &mut usize) {
                    if i == rec.len() {
                        if rec.iter().product::<i64>() == m {
                            *brute += 1;
                        }
                        return;
                    }
                    for d in -r..=r {
                        if d != 0 {
                            rec[i] = d;
                            go(i + 1, rec, r, m, brute);
                        }
                    }
                }
                go(0, &mut rec, r, m, &mut brute);
                assert_eq!(t.len(), brute, "m = {m}, s = {s}");
            }
        }
    }

    #[test]
    fn bounded_signed_divisors() {
        let d = signed_divisors_bounded(&big(-12), &big(3));
        assert_eq!(d, vec![big(1), big(-1), big(2), big(-2), big(3), big(-3)]);
    }

    #[test]
    fn l_function_examples() {
        let e = std::f64::consts::E;
        let v = l_function(1.0, e.powf(e)).unwrap();
        assert!((v / e.powf(e) - 1.0).abs() < 1e-12);
        assert_eq!(l_function(0.0, 100.0).unwrap(), 1.0);
        let lx = 1e6f64.ln();
        let want = (2.0 * lx / lx.ln()).exp();
        assert!((l_function(2.0, 1e6).unwrap() / want - 1.0).abs() < 1e-12);
        assert!((want - 3.73e4).abs() / 3.73e4 < 0.01);
        assert!(l_function(1.0, 2.0).is_err());
    }
}
