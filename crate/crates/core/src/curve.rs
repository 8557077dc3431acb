//! Separated polynomial curves, ground sets, and the closed-form bound
//! expressions used to judge measured quantities.

use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{eval_dense, IntPolynomial};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("empty polynomial list")]
    Empty,
    #[error("polynomial {0} is identically zero")]
    ZeroPolynomial(usize),
    #[error("polynomial {0} is constant")]
    ConstantPolynomial(usize),
    #[error("degrees are not strictly increasing at index {0}: {1} >= {2}")]
    DegreeNotSeparated(usize, usize, usize),
    #[error("exponents (p, q) = ({0}, {1}) outside 1 <= p <= 2 <= q")]
    ExponentRangeError(String, String),
    #[error("invalid ground set: {0}")]
    InvalidGround(String),
    #[error("invalid curve description: {0}")]
    InvalidCurve(String),
}

/// A curve `gamma = (phi_1, ..., phi_r)` of integer polynomials with strictly
/// increasing degrees `1 <= k_1 < ... < k_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatedSystem {
    polys: Vec<Vec<BigInt>>,
    degrees: Vec<usize>,
    total_degree: usize,
    degree_product: u64,
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    polys: Vec<Vec<serde_json::Number>>,
}

impl SeparatedSystem {
    /// Validates ascending coefficient lists. Trailing zero coefficients are
    /// trimmed before the degree is read off.
    pub fn validate(polys: Vec<Vec<BigInt>>) -> Result<Self, CurveError> {
        if polys.is_empty() {
            return Err(CurveError::Empty);
        }
        let mut trimmed = Vec::with_capacity(polys.len());
        let mut degrees = Vec::with_capacity(polys.len());
        for (i, mut p) in polys.into_iter().enumerate() {
            while p.last().is_some_and(|c| c.is_zero()) {
                p.pop();
            }
            match p.len() {
                0 => return Err(CurveError::ZeroPolynomial(i)),
                1 => return Err(CurveError::ConstantPolynomial(i)),
                n => degrees.push(n - 1),
            }
            trimmed.push(p);
        }
        for (i, w) in degrees.windows(2).enumerate() {
            if w[0] >= w[1] {
                return Err(CurveError::DegreeNotSeparated(i + 1, w[0], w[1]));
            }
        }
        let total_degree = degrees.iter().sum();
        let degree_product = degrees.iter().map(|&d| d as u64).product();
        Ok(SeparatedSystem {
            polys: trimmed,
            degrees,
            total_degree,
            degree_product,
        })
    }

    pub fn from_i64(polys: &[&[i64]]) -> Result<Self, CurveError> {
        Self::validate(
            polys
                .iter()
                .map(|p| p.iter().map(|&c| BigInt::from(c)).collect())
                .collect(),
        )
    }

    /// The moment curve `(T, T^2, ..., T^r)`.
    pub fn moment(r: usize) -> Self {
        Self::monomials(&(1..=r).collect::<Vec<_>>())
    }

    /// The six reference curves: `(T^2)`, `(T^3)`, `(T, T^2)`, `(T, T^3)`,
    /// `(T^2, T^3)`, `(T, T^2, T^3)`.
    pub fn battery() -> Vec<SeparatedSystem> {
        [&[2][..], &[3], &[1, 2], &[1, 3], &[2, 3], &[1, 2, 3]]
            .iter()
            .map(|k| Self::monomials(k))
            .collect()
    }

    /// `(T^{k_1}, ..., T^{k_r})`.
    pub fn monomials(exponents: &[usize]) -> Self {
        let polys = exponents
            .iter()
            .map(|&k| {
                let mut c = vec![BigInt::zero(); k + 1];
                c[k] = BigInt::one();
                c
            })
            .collect();
        Self::validate(polys).expect("monomial exponents must be strictly increasing and positive")
    }

    /// Parses `{"polys": [[c0, c1, ...], ...]}`.
    pub fn from_json(text: &str) -> Result<Self, CurveError> {
        let parsed: CurveJson =
            serde_json::from_str(text).map_err(|e| CurveError::InvalidCurve(e.to_string()))?;
        let polys = parsed
            .polys
            .into_iter()
            .map(|p| {
                p.into_iter()
                    .map(|n| {
                        n.to_string()
                            .parse::<BigInt>()
                            .map_err(|_| CurveError::InvalidCurve(format!("non-integer coefficient {n}")))
                    })
                    .collect()
            })
            .collect::<Result<Vec<Vec<BigInt>>, _>>()?;
        Self::validate(polys)
    }

    pub fn to_json(&self) -> String {
        let polys: Vec<Vec<serde_json::Value>> = self
            .polys
            .iter()
            .map(|p| {
                p.iter()
                    .map(|c| serde_json::Value::Number(c.to_string().parse().unwrap()))
                    .collect()
            })
            .collect();
        serde_json::json!({ "polys": polys }).to_string()
    }

    /// Accepts inline JSON, a path to a JSON file, `moment:R`, or
    /// `monomials:K1,K2,...`.
    pub fn parse_spec(spec: &str) -> Result<Self, CurveError> {
        let spec = spec.trim();
        if spec.starts_with('{') {
            return Self::from_json(spec);
        }
        if let Some(r) = spec.strip_prefix("moment:") {
            let r: usize = r
                .parse()
                .map_err(|_| CurveError::InvalidCurve(spec.to_string()))?;
            if r == 0 {
                return Err(CurveError::Empty);
            }
            return Ok(Self::moment(r));
        }
        if let Some(ks) = spec.strip_prefix("monomials:") {
            let ks: Vec<usize> = ks
                .split(',')
                .map(|k| k.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| CurveError::InvalidCurve(spec.to_string()))?;
            let polys = ks
                .iter()
                .map(|&k| {
                    let mut c = vec![BigInt::zero(); k + 1];
                    c[k] = BigInt::one();
                    c
                })
                .collect();
            return Self::validate(polys);
        }
        let text = std::fs::read_to_string(Path::new(spec))
            .map_err(|e| CurveError::InvalidCurve(format!("{spec}: {e}")))?;
        Self::from_json(&text)
    }

    pub fn r(&self) -> usize {
        self.polys.len()
    }

    pub fn coefficients(&self, i: usize) -> &[BigInt] {
        &self.polys[i]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// `D_gamma`, the sum of the degrees.
    pub fn total_degree(&self) -> usize {
        self.total_degree
    }

    /// `K_gamma`, the product of the degrees.
    pub fn degree_product(&self) -> u64 {
        self.degree_product
    }

    /// `sum_i (k_i - i)`, the degree attached to the Jacobian cofactor.
    pub fn jacobian_cofactor_degree(&self) -> usize {
        self.degrees
            .iter()
            .enumerate()
            .map(|(i, &k)| k - (i + 1))
            .sum()
    }

    /// `phi_i` as a polynomial in the named variable (0-based index).
    pub fn phi(&self, i: usize, var: &str) -> IntPolynomial {
        IntPolynomial::univariate(var, &self.polys[i])
    }

    pub fn eval_phi(&self, i: usize, n: &BigInt) -> BigInt {
        eval_dense(&self.polys[i], n)
    }

    /// `gamma(n) = (phi_1(n), ..., phi_r(n))`.
    pub fn evaluate_curve(&self, n: &BigInt) -> Vec<BigInt> {
        self.polys.iter().map(|p| eval_dense(p, n)).collect()
    }

    pub fn evaluate_curve_i64(&self, n: i64) -> Vec<BigInt> {
        self.evaluate_curve(&BigInt::from(n))
    }

    /// A curve with `phi_i` replaced by `phi_i + shift_i`.
    pub fn shifted(&self, shifts: &[BigInt]) -> Self {
        let mut polys = self.polys.clone();
        for (p, s) in polys.iter_mut().zip(shifts) {
            p[0] += s;
        }
        Self::validate(polys).expect("constant shifts preserve separation")
    }

    /// `2 - 1/D_gamma`.
    pub fn critical_exponent(&self) -> Rational {
        critical_exponent(self.total_degree)
    }
}

impl fmt::Display for SeparatedSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.r() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.phi(i, "T"))?;
        }
        write!(f, ")")
    }
}

pub fn critical_exponent(total_degree: usize) -> Rational {
    Rational::from_integer(2) - Rational::new(1, total_degree as i64)
}

/// A Lebesgue exponent in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exponent {
    Finite(Rational),
    Infinity,
}

impl Exponent {
    pub fn reciprocal(&self) -> f64 {
        match self {
            Exponent::Finite(p) => p.recip().to_f64().unwrap(),
            Exponent::Infinity => 0.0,
        }
    }

    pub fn reciprocal_exact(&self) -> Rational {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinity => Rational::zero(),
        }
    }

    /// The dual exponent `p'` with `1/p + 1/p' = 1`.
    pub fn dual(&self) -> Exponent {
        match self {
            Exponent::Infinity => Exponent::Finite(Rational::one()),
            Exponent::Finite(p) if *p == Rational::one() => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite((Rational::one() - p.recip()).recip()),
        }
    }

    pub fn parse(s: &str) -> Option<Exponent> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Some(Exponent::Infinity);
        }
        if let Some((a, b)) = s.split_once('/') {
            let (a, b): (i64, i64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            if b == 0 {
                return None;
            }
            return Some(Exponent::Finite(Rational::new(a, b)));
        }
        s.parse::<i64>().ok().map(|v| Exponent::Finite(Rational::from_integer(v)))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

fn check_pq(p: Exponent, q: Exponent) -> Result<(f64, f64), CurveError> {
    let bad = || CurveError::ExponentRangeError(p.to_string(), q.to_string());
    let inv_p = p.reciprocal_exact();
    let inv_q = q.reciprocal_exact();
    let half = Rational::new(1, 2);
    if inv_p > Rational::one() || inv_p < half || inv_q > half || inv_q < Rational::zero() {
        return Err(bad());
    }
    Ok((p.reciprocal(), q.reciprocal()))
}

/// `|X|^{-D(1/p - 1/q)} + |X|^{1/q - 1} + |X|^{-1/p}`.
pub fn conjecture_rhs(size_x: u64, total_degree: usize, p: Exponent, q: Exponent) -> Result<f64, CurveError> {
    let (ip, iq) = check_pq(p, q)?;
    let x = size_x as f64;
    let d = total_degree as f64;
    Ok(x.powf(-d * (ip - iq)) + x.powf(iq - 1.0) + x.powf(-ip))
}

/// The three summands of [`conjecture_rhs`] separately: (box, delta, curve).
pub fn conjecture_summands(size_x: u64, total_degree: usize, p: Exponent, q: Exponent) -> Result<[f64; 3], CurveError> {
    let (ip, iq) = check_pq(p, q)?;
    let x = size_x as f64;
    let d = total_degree as f64;
    Ok([x.powf(-d * (ip - iq)), x.powf(iq - 1.0), x.powf(-ip)])
}

/// `|X|^{-1} (|X|^{s-1} + |X| * maxreps)^{1/(2s-1)}`; the inner sum is exact.
pub fn refinement_rhs(size_x: u64, s: u32, maxreps: &BigInt) -> f64 {
    assert!(s >= 1 && size_x >= 1);
    let x = BigInt::from(size_x);
    let inner = num_traits::pow(x.clone(), (s - 1) as usize) + &x * maxreps;
    let root = big_to_f64(&inner).powf(1.0 / (2 * s - 1) as f64);
    root / size_x as f64
}

pub(crate) fn big_to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(if v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Sorted distinct elements of `X ∩ [1, N]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundSet {
    elements: Vec<i64>,
    bound: i64,
}

impl GroundSet {
    pub fn new(mut elements: Vec<i64>, bound: i64) -> Result<Self, CurveError> {
        elements.sort_unstable();
        elements.dedup();
        if let Some(&e) = elements.iter().find(|&&e| e < 1 || e > bound) {
            return Err(CurveError::InvalidGround(format!("element {e} outside [1, {bound}]")));
        }
        Ok(GroundSet { elements, bound })
    }

    /// Elements given without an explicit bound; `N` is their maximum.
    pub fn from_elements(elements: Vec<i64>) -> Result<Self, CurveError> {
        let bound = elements.iter().copied().max().unwrap_or(0);
        Self::new(elements, bound)
    }

    /// `[N] = {1, ..., N}`.
    pub fn range(n: i64) -> Self {
        GroundSet {
            elements: (1..=n).collect(),
            bound: n,
        }
    }

    /// Each `k in [N]` kept independently with probability `density`.
    pub fn random(n: i64, density: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let elements = (1..=n).filter(|_| rng.gen::<f64>() < density).collect();
        GroundSet { elements, bound: n }
    }

    /// `range:N`, `file:PATH` (one integer per line), or `random:N,density,seed`.
    pub fn parse_spec(spec: &str) -> Result<Self, CurveError> {
        let bad = |m: &str| CurveError::InvalidGround(format!("{spec}: {m}"));
        if let Some(n) = spec.strip_prefix("range:") {
            let n: i64 = n.trim().parse().map_err(|_| bad("expected integer N"))?;
            return Ok(Self::range(n));
        }
        if let Some(path) = spec.strip_prefix("file:") {
            let text = std::fs::read_to_string(path).map_err(|e| bad(&e.to_string()))?;
            let elements = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| l.parse::<i64>().map_err(|_| bad(&format!("bad line `{l}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            return Self::from_elements(elements);
        }
        if let Some(args) = spec.strip_prefix("random:") {
            let parts: Vec<&str> = args.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(bad("expected N,density,seed"));
            }
            let n: i64 = parts[0].parse().map_err(|_| bad("N"))?;
            let density: f64 = parts[1].parse().map_err(|_| bad("density"))?;
            let seed: u64 = parts[2].parse().map_err(|_| bad("seed"))?;
            if !(0.0..=1.0).contains(&density) {
                return Err(bad("density must lie in [0, 1]"));
            }
            return Ok(Self::random(n, density, seed));
        }
        Err(bad("unknown ground-set spec"))
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    pub fn contains_big(&self, x: &BigInt) -> bool {
        x.to_i64().is_some_and(|v| self.contains(v))
    }

    /// `max - min`, the largest possible difference of two elements.
    pub fn span(&self) -> i64 {
        match (self.elements.first(), self.elements.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    pub fn min(&self) -> Option<i64> {
        self.elements.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.elements.last().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        ((a - b) / b).abs() < 1e-12
    }

    #[test]
    fn validate_examples() {
        let m = SeparatedSystem::moment(3);
        assert_eq!((m.r(), m.total_degree(), m.degree_product()), (3, 6, 6));
        let s = SeparatedSystem::monomials(&[2, 3]);
        assert_eq!((s.r(), s.total_degree(), s.degree_product()), (2, 5, 6));
        assert_eq!(
            SeparatedSystem::from_i64(&[&[0, 0, 1], &[1, 0, 1]]),
            Err(CurveError::DegreeNotSeparated(1, 2, 2))
        );
        assert_eq!(SeparatedSystem::from_i64(&[&[0, 0]]), Err(CurveError::ZeroPolynomial(0)));
        assert_eq!(SeparatedSystem::from_i64(&[&[4]]), Err(CurveError::ConstantPolynomial(0)));
        assert_eq!(SeparatedSystem::validate(vec![]), Err(CurveError::Empty));
    }

    #[test]
    fn evaluate_examples() {
        let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(SeparatedSystem::moment(3).evaluate_curve_i64(2), big(&[2, 4, 8]));
        let s = SeparatedSystem::monomials(&[2, 3]);
        assert_eq!(s.evaluate_curve_i64(-1), big(&[1, -1]));
        assert_eq!(s.evaluate_curve_i64(0), big(&[0, 0]));
    }

    #[test]
    fn critical_exponent_examples() {
        assert_eq!(critical_exponent(6), Rational::new(11, 6));
        assert_eq!(critical_exponent(1), Rational::from_integer(1));
        assert_eq!(critical_exponent(3), Rational::new(5, 3));
    }

    #[test]
    fn conjecture_rhs_examples() {
        let f = |a, b| Exponent::Finite(Rational::new(a, b));
        let got = conjecture_rhs(4, 3, f(3, 2), f(3, 1)).unwrap();
        let want = 0.25 + 2.0 * 4f64.powf(-2.0 / 3.0);
        assert!(close(got, want), "{got} vs {want}");
        assert!(close(conjecture_rhs(1, 5, f(3, 2), f(3, 1)).unwrap(), 3.0));
        assert!(close(conjecture_rhs(16, 1, f(2, 1), f(2, 1)).unwrap(), 1.5));
        assert!(conjecture_rhs(16, 1, f(5, 2), f(3, 1)).is_err());
        assert!(conjecture_rhs(16, 1, f(3, 2), f(3, 2)).is_err());
        assert!(conjecture_rhs(16, 1, f(1, 1), Exponent::Infinity).is_ok());
    }

    #[test]
    fn refinement_rhs_examples() {
        assert!(close(refinement_rhs(10, 2, &BigInt::from(1)), 0.1 * 20f64.cbrt()));
        assert!(close(refinement_rhs(1, 1, &BigInt::from(0)), 1.0));
        assert!(close(refinement_rhs(100, 3, &BigInt::from(0)), 0.01 * 10_000f64.powf(0.2)));
    }

    #[test]
    fn dual_exponents() {
        let p = Exponent::Finite(Rational::new(7, 4));
        assert_eq!(p.dual(), Exponent::Finite(Rational::new(7, 3)));
        assert_eq!(Exponent::Finite(Rational::from_integer(1)).dual(), Exponent::Infinity);
        assert_eq!(Exponent::parse("7/4"), Some(p));
        assert_eq!(Exponent::parse("inf"), Some(Exponent::Infinity));
    }

    #[test]
    fn ground_set_specs() {
        assert_eq!(GroundSet::parse_spec("range:5").unwrap().elements(), &[1, 2, 3, 4, 5]);
        let a = GroundSet::parse_spec("random:50,0.5,7").unwrap();
        let b = GroundSet::parse_spec("random:50,0.5,7").unwrap();
        assert_eq!(a, b);
        assert!(a.elements().iter().all(|&e| (1..=50).contains(&e)));
        assert!(GroundSet::parse_spec("bogus").is_err());
        assert!(GroundSet::new(vec![0, 3], 5).is_err());
        assert_eq!(GroundSet::range(4).span(), 3);
    }

    #[test]
    fn json_round_trip() {
        let s = SeparatedSystem::from_json(r#"{"polys": [[0, 2], [1, -4, 1]]}"#).unwrap();
        assert_eq!(s.degrees(), &[1, 2]);
        assert_eq!(SeparatedSystem::from_json(&s.to_json()).unwrap(), s);
        assert!(SeparatedSystem::from_json(r#"{"polys": [[0.5, 1]]}"#).is_err());
    }

    #[test]
    fn cofactor_degree_is_recorded_separately() {
        assert_eq!(SeparatedSystem::monomials(&[2, 3]).jacobian_cofactor_degree(), 2);
        assert_eq!(SeparatedSystem::moment(3).jacobian_cofactor_degree(), 0);
    }
}
