//! Exact multivariate polynomials over the integers.
//!
//! Terms are stored sparsely, keyed by dense exponent vectors over an ordered
//! list of named variables. Variables are always kept in natural order
//! (`T_2 < T_10`, `X < Y`), and monomials compare lexicographically with the
//! first variable most significant. Division and the canonical text form both
//! rely on that order.

mod differencing;
pub(crate) mod roots;

pub use differencing::{first_difference_chi, second_difference_psi, shift_polynomial_rho};
pub use roots::{integer_roots, integer_roots_dense, integer_roots_in_range};

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exponent vector, one entry per variable of the owning polynomial.
pub type Monomial = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("polynomial is not divisible by the given divisor")]
    NotDivisible,
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("the zero polynomial has no finite root set")]
    ZeroPolynomial,
    #[error("degree {0} is too low for this construction")]
    DegreeTooLow(usize),
    #[error("expected a univariate polynomial, found variables {0:?}")]
    NotUnivariate(Vec<String>),
    #[error("variable `{0}` does not occur in the polynomial ring")]
    UnknownVariable(String),
    #[error("missing value for variable `{0}`")]
    MissingValue(String),
}

/// Natural ordering on variable names: alphabetic prefix first, then any
/// numeric suffix compared as a number.
pub fn compare_var_names(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let digits = s.len() - s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        if digits == 0 {
            return (s, None);
        }
        let (head, tail) = s.split_at(s.len() - digits);
        (head, tail.parse().ok())
    }
    let (pa, na) = split(a);
    let (pb, nb) = split(b);
    pa.cmp(pb).then(na.cmp(&nb)).then(a.cmp(b))
}

#[derive(Clone, Debug)]
pub struct IntPolynomial {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, BigInt>,
}

impl IntPolynomial {
    pub fn zero() -> Self {
        IntPolynomial {
            vars: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        IntPolynomial {
            vars: Vec::new(),
            terms,
        }
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![1], BigInt::one());
        IntPolynomial {
            vars: vec![name.to_string()],
            terms,
        }
    }

    /// Builds `c_0 + c_1 v + c_2 v^2 + ...` from ascending coefficients.
    pub fn univariate(var: &str, coeffs: &[BigInt]) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(vec![e as u32], c.clone());
            }
        }
        IntPolynomial {
            vars: vec![var.to_string()],
            terms,
        }
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs over `vars`.
    /// Variables may be given in any order; repeated monomials are summed.
    pub fn from_terms<I>(vars: &[&str], terms: I) -> Self
    where
        I: IntoIterator<Item = (BigInt, Vec<u32>)>,
    {
        let mut sorted: Vec<String> = vars.iter().map(|v| v.to_string()).collect();
        sorted.sort_by(|a, b| compare_var_names(a, b));
        sorted.dedup();
        let perm: Vec<usize> = vars
            .iter()
            .map(|v| sorted.iter().position(|s| s == v).unwrap())
            .collect();
        let mut out = IntPolynomial {
            vars: sorted,
            terms: BTreeMap::new(),
        };
        for (c, exps) in terms {
            assert_eq!(exps.len(), vars.len(), "exponent vector length mismatch");
            let mut mono = vec![0u32; out.vars.len()];
            for (i, e) in exps.into_iter().enumerate() {
                mono[perm[i]] += e;
            }
            out.add_term(mono, c);
        }
        out
    }

    fn add_term(&mut self, mono: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Variables that actually occur with a positive exponent.
    pub fn active_vars(&self) -> Vec<String> {
        self.vars
            .iter()
            .enumerate()
            .filter(|(i, _)| self.terms.keys().any(|m| m[*i] > 0))
            .map(|(_, v)| v.clone())
            .collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|&e| e == 0))
    }

    /// The constant value, if the polynomial is constant.
    pub fn constant_value(&self) -> Option<BigInt> {
        if !self.is_constant() {
            return None;
        }
        Some(self.terms.values().next().cloned().unwrap_or_default())
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    pub fn degree_in(&self, var: &str) -> Option<u32> {
        let i = self.var_index(var)?;
        self.terms.keys().map(|m| m[i]).max()
    }

    fn var_index(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    /// Lexicographically largest monomial and its coefficient.
    pub fn leading_term(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    pub fn content(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the integer content and makes the leading coefficient positive.
    pub fn normalized(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading_term().unwrap().1.is_negative() {
            g = -g;
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = &*c / &g;
        }
        out
    }

    /// Re-embeds into a superset of variables (given in natural order).
    fn embed(&self, vars: &[String]) -> Self {
        if vars == self.vars.as_slice() {
            return self.clone();
        }
        let idx: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.iter().position(|w| w == v).expect("embedding target misses a variable"))
            .collect();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut mono = vec![0u32; vars.len()];
                for (i, &e) in m.iter().enumerate() {
                    mono[idx[i]] = e;
                }
                (mono, c.clone())
            })
            .collect();
        IntPolynomial {
            vars: vars.to_vec(),
            terms,
        }
    }

    fn merged_vars(a: &[String], b: &[String]) -> Vec<String> {
        let mut vars: Vec<String> = a.iter().chain(b.iter()).cloned().collect();
        vars.sort_by(|x, y| compare_var_names(x, y));
        vars.dedup();
        vars
    }

    fn unify(&self, other: &Self) -> (Self, Self) {
        let vars = Self::merged_vars(&self.vars, &other.vars);
        (self.embed(&vars), other.embed(&vars))
    }

    /// Adds variables to the ring without changing the polynomial.
    pub fn with_vars(&self, extra: &[&str]) -> Self {
        let extra: Vec<String> = extra.iter().map(|s| s.to_string()).collect();
        self.embed(&Self::merged_vars(&self.vars, &extra))
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return IntPolynomial {
                vars: self.vars.clone(),
                terms: BTreeMap::new(),
            };
        }
        IntPolynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = IntPolynomial::one().embed(&self.vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, var: &str) -> Self {
        let mut out = IntPolynomial {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        let Some(i) = self.var_index(var) else {
            return out;
        };
        for (m, c) in &self.terms {
            if m[i] > 0 {
                let mut mono = m.clone();
                mono[i] -= 1;
                out.add_term(mono, c * BigInt::from(m[i]));
            }
        }
        out
    }

    /// Composes: every assigned variable is replaced by the given polynomial.
    /// Unassigned variables are kept.
    pub fn substitute(&self, assignments: &HashMap<String, IntPolynomial>) -> Result<Self, PolyError> {
        for name in assignments.keys() {
            if self.var_index(name).is_none() {
                return Err(PolyError::UnknownVariable(name.clone()));
            }
        }
        let mut vars: Vec<String> = self
            .vars
            .iter()
            .filter(|v| !assignments.contains_key(*v))
            .cloned()
            .collect();
        for p in assignments.values() {
            vars = Self::merged_vars(&vars, &p.vars);
        }
        let subs: Vec<Option<IntPolynomial>> = self
            .vars
            .iter()
            .map(|v| assignments.get(v).map(|p| p.embed(&vars)))
            .collect();
        let mut powers: Vec<Vec<IntPolynomial>> = vec![Vec::new(); self.vars.len()];
        let one = IntPolynomial::one().embed(&vars);
        let mut out = IntPolynomial {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        };
        for (m, c) in &self.terms {
            let mut kept = vec![0u32; vars.len()];
            let mut factor = one.clone();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match &subs[i] {
                    None => {
                        let j = vars.iter().position(|v| *v == self.vars[i]).unwrap();
                        kept[j] = e;
                    }
                    Some(p) => {
                        let cache = &mut powers[i];
                        if cache.is_empty() {
                            cache.push(one.clone());
                        }
                        while cache.len() <= e as usize {
                            let next = cache.last().unwrap() * p;
                            cache.push(next);
                        }
                        factor = &factor * &cache[e as usize];
                    }
                }
            }
            for (fm, fc) in factor.terms {
                let mono: Monomial = fm.iter().zip(&kept).map(|(a, b)| a + b).collect();
                out.add_term(mono, fc * c);
            }
        }
        Ok(out)
    }

    /// Substitutes integers for some variables.
    pub fn substitute_values(&self, values: &[(&str, BigInt)]) -> Result<Self, PolyError> {
        let map = values
            .iter()
            .map(|(n, v)| (n.to_string(), IntPolynomial::constant(v.clone())))
            .collect();
        self.substitute(&map)
    }

    /// Evaluates with every variable assigned; extra names are an error only
    /// if they are missing.
    pub fn evaluate(&self, values: &BTreeMap<String, BigInt>) -> Result<BigInt, PolyError> {
        let point: Vec<BigInt> = self
            .vars
            .iter()
            .map(|v| {
                values
                    .get(v)
                    .cloned()
                    .ok_or_else(|| PolyError::MissingValue(v.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(self.evaluate_point(&point))
    }

    /// Evaluates at a point given in this polynomial's variable order.
    pub fn evaluate_point(&self, point: &[BigInt]) -> BigInt {
        assert_eq!(point.len(), self.vars.len(), "point dimension mismatch");
        let mut pow_cache: Vec<Vec<BigInt>> = point.iter().map(|x| vec![BigInt::one(), x.clone()]).collect();
        let mut total = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut pow_cache[i];
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &point[i];
                    cache.push(next);
                }
                t *= &cache[e as usize];
            }
            total += t;
        }
        total
    }

    /// Collapses to a dense ascending coefficient list in `var`, evaluating
    /// every other variable at the value given in `values` (looked up by name).
    pub fn to_dense_in(&self, var: &str, values: &BTreeMap<String, BigInt>) -> Result<Vec<BigInt>, PolyError> {
        let vi = self.var_index(var);
        let mut vals: Vec<Option<&BigInt>> = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            if Some(i) == vi {
                vals.push(None);
            } else {
                vals.push(Some(values.get(v).ok_or_else(|| PolyError::MissingValue(v.clone()))?));
            }
        }
        let deg = vi.map(|i| self.terms.keys().map(|m| m[i]).max().unwrap_or(0)).unwrap_or(0);
        let mut out = vec![BigInt::zero(); deg as usize + 1];
        for (m, c) in &self.terms {
            let mut t = c.clone();
            let mut k = 0usize;
            for (i, &e) in m.iter().enumerate() {
                match vals[i] {
                    None => k = e as usize,
                    Some(x) => {
                        if e > 0 {
                            t *= num_traits::pow(x.clone(), e as usize);
                        }
                    }
                }
            }
            out[k] += t;
        }
        while out.len() > 1 && out.last().unwrap().is_zero() {
            out.pop();
        }
        Ok(out)
    }

    /// Dense ascending coefficients of a polynomial in at most one variable.
    pub fn univariate_coeffs(&self) -> Result<Vec<BigInt>, PolyError> {
        let active = self.active_vars();
        if active.len() > 1 {
            return Err(PolyError::NotUnivariate(active));
        }
        match active.first() {
            None => Ok(vec![self.constant_value().unwrap_or_default()]),
            Some(v) => {
                // the remaining variables never occur, so any value works
                let zeros = self
                    .vars
                    .iter()
                    .filter(|w| *w != v)
                    .map(|w| (w.clone(), BigInt::zero()))
                    .collect();
                self.to_dense_in(v, &zeros)
            }
        }
    }

    /// Splits `self = sum_k c_k var^k`; the `c_k` keep the remaining variables.
    /// A variable that does not occur yields `[self]`.
    pub fn coefficients_in(&self, var: &str) -> Vec<IntPolynomial> {
        let Some(vi) = self.var_index(var) else {
            return vec![self.clone()];
        };
        let rest: Vec<String> = self.vars.iter().filter(|v| *v != var).cloned().collect();
        let deg = self.terms.keys().map(|m| m[vi]).max().unwrap_or(0) as usize;
        let mut out = vec![
            IntPolynomial {
                vars: rest.clone(),
                terms: BTreeMap::new(),
            };
            deg + 1
        ];
        for (m, c) in &self.terms {
            let mut mono = m.clone();
            let k = mono.remove(vi) as usize;
            out[k].add_term(mono, c.clone());
        }
        out
    }

    /// `Some(s)` with `s * s = self` and positive leading coefficient, if
    /// `self` is a perfect square in the polynomial ring.
    pub fn perfect_square_root(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let (lm, lc) = self.leading_term()?;
        if lc.is_negative() || lm.iter().any(|e| e % 2 == 1) {
            return None;
        }
        let c0 = lc.sqrt();
        if &c0 * &c0 != *lc {
            return None;
        }
        let m0: Monomial = lm.iter().map(|e| e / 2).collect();
        let mut root = IntPolynomial {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        root.add_term(m0.clone(), c0.clone());
        let two_c0 = &c0 * 2;
        // every new term of the root is strictly lex-smaller, so the number of
        // rounds is bounded by the size of the monomial box below `m0`
        let cap = self.terms.len() * 4 + 16;
        for _ in 0..cap {
            let rem = self - &(&root * &root);
            let Some((rm, rc)) = rem.leading_term() else {
                return Some(root);
            };
            if rm.iter().zip(&m0).any(|(a, b)| a < b) {
                return None;
            }
            let (q, r) = rc.div_rem(&two_c0);
            if !r.is_zero() {
                return None;
            }
            let tm: Monomial = rm.iter().zip(&m0).map(|(a, b)| a - b).collect();
            if tm >= m0 {
                return None;
            }
            root.add_term(tm, q);
        }
        None
    }

    /// Exact division `self = q * divisor` with the lexicographic order; any
    /// nonzero remainder is reported as `NotDivisible`.
    pub fn exact_divide(&self, divisor: &Self) -> Result<Self, PolyError> {
        if divisor.is_zero() {
            return Err(PolyError::DivisionByZeroPolynomial);
        }
        let (mut rem, d) = self.unify(divisor);
        let (lead_m, lead_c) = {
            let (m, c) = d.leading_term().unwrap();
            (m.clone(), c.clone())
        };
        let mut quot = IntPolynomial {
            vars: rem.vars.clone(),
            terms: BTreeMap::new(),
        };
        while let Some((m, c)) = rem.leading_term() {
            if m.iter().zip(&lead_m).any(|(a, b)| a < b) {
                return Err(PolyError::NotDivisible);
            }
            let (q, r) = c.div_rem(&lead_c);
            if !r.is_zero() {
                return Err(PolyError::NotDivisible);
            }
            let qm: Monomial = m.iter().zip(&lead_m).map(|(a, b)| a - b).collect();
            for (dm, dc) in &d.terms {
                let mono: Monomial = dm.iter().zip(&qm).map(|(a, b)| a + b).collect();
                rem.add_term(mono, -(dc * &q));
            }
            quot.add_term(qm, q);
        }
        Ok(quot)
    }
}

impl PartialEq for IntPolynomial {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.unify(other);
        a.terms == b.terms
    }
}

impl Eq for IntPolynomial {}

impl fmt::Display for IntPolynomial {
    /// Canonical text: terms in descending lexicographic order, coefficient
    /// always written, e.g. `3*X^2*Y + -1*Z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*{}", self.vars[i])?,
                    _ => write!(f, "*{}^{}", self.vars[i], e)?,
                }
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        let (mut a, b) = self.unify(rhs);
        for (m, c) in b.terms {
            a.add_term(m, c);
        }
        a
    }
}

impl<'a> Sub<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        let (mut a, b) = self.unify(rhs);
        for (m, c) in b.terms {
            a.add_term(m, -c);
        }
        a
    }
}

impl<'a> Mul<&'a IntPolynomial> for &'a IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        let (a, b) = self.unify(rhs);
        let mut out = IntPolynomial {
            vars: a.vars.clone(),
            terms: BTreeMap::new(),
        };
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let mono: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                out.add_term(mono, ca * cb);
            }
        }
        out
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<IntPolynomial> for IntPolynomial {
            type Output = IntPolynomial;
            fn $method(self, rhs: IntPolynomial) -> IntPolynomial {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a IntPolynomial> for IntPolynomial {
            type Output = IntPolynomial;
            fn $method(self, rhs: &IntPolynomial) -> IntPolynomial {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        -&self
    }
}

/// Evaluates dense ascending coefficients at `x` by Horner's rule.
pub fn eval_dense(coeffs: &[BigInt], x: &BigInt) -> BigInt {
    coeffs
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Product of univariate variables `prod (X_i - Y)` style helper used by the
/// elimination routines: `prod_i (vars[i] - other)`.
pub fn product_of_differences(vars: &[String], other: &str) -> IntPolynomial {
    let y = IntPolynomial::var(other);
    vars.iter()
        .fold(IntPolynomial::one(), |acc, v| &acc * &(&IntPolynomial::var(v) - &y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> IntPolynomial {
        IntPolynomial::var("X")
    }
    fn y() -> IntPolynomial {
        IntPolynomial::var("Y")
    }
    fn z() -> IntPolynomial {
        IntPolynomial::var("Z")
    }
    fn c(v: i64) -> IntPolynomial {
        IntPolynomial::constant(v)
    }

    #[test]
    fn ring_examples() {
        assert_eq!((x() + y()) * (x() - y()), x() * x() - y() * y());
        let p = x() * y() + c(3);
        assert_eq!(&p + &IntPolynomial::zero(), p);
        let sq = (x() + c(1)).pow(2);
        assert!((sq - (x().pow(2) + c(2) * x() + c(1))).is_zero());
    }

    #[test]
    fn natural_variable_order() {
        let mut names = vec!["X_10", "X_2", "Y", "X_1", "T_3"];
        names.sort_by(|a, b| compare_var_names(a, b));
        assert_eq!(names, vec!["T_3", "X_1", "X_2", "X_10", "Y"]);
    }

    #[test]
    fn substitution_examples() {
        let p = x().pow(2) - y().pow(2);
        let mut map = HashMap::new();
        map.insert("Y".to_string(), x());
        assert!(p.substitute(&map).unwrap().is_zero());

        let phi2 = IntPolynomial::var("T").pow(2);
        let mut map = HashMap::new();
        map.insert("T".to_string(), x() + y() - z());
        let got = phi2.substitute(&map).unwrap();
        let want = x().pow(2) + y().pow(2) + z().pow(2) + c(2) * x() * y() - c(2) * x() * z() - c(2) * y() * z();
        assert_eq!(got, want);

        let s = (x() + y())
            .substitute_values(&[("X", 3.into()), ("Y", 4.into())])
            .unwrap();
        assert_eq!(s.constant_value(), Some(BigInt::from(7)));
    }

    #[test]
    fn substitution_rejects_unknown_variable() {
        let mut map = HashMap::new();
        map.insert("W".to_string(), x());
        assert_eq!(x().substitute(&map), Err(PolyError::UnknownVariable("W".into())));
    }

    #[test]
    fn exact_division_examples() {
        let q = (x().pow(2) - y().pow(2)).exact_divide(&(x() - y())).unwrap();
        assert_eq!(q, x() + y());
        let q = (x().pow(3) - y().pow(3)).exact_divide(&(x() - y())).unwrap();
        assert_eq!(q, x().pow(2) + x() * y() + y().pow(2));
        assert_eq!(
            (x().pow(2) + c(1)).exact_divide(&(x() - y())),
            Err(PolyError::NotDivisible)
        );
        assert_eq!(x().exact_divide(&IntPolynomial::zero()), Err(PolyError::DivisionByZeroPolynomial));
        // integer content must divide too
        assert_eq!((c(3) * x()).exact_divide(&(c(2) * x())), Err(PolyError::NotDivisible));
    }

    #[test]
    fn canonical_text() {
        let p = c(3) * x().pow(2) * y() - z();
        assert_eq!(p.to_string(), "3*X^2*Y + -1*Z");
        assert_eq!(IntPolynomial::zero().to_string(), "0");
        assert_eq!((c(-5) + x()).to_string(), "1*X + -5");
    }

    #[test]
    fn dense_views() {
        let p = c(2) * x().pow(2) * y() + x() - c(7);
        let mut vals = BTreeMap::new();
        vals.insert("Y".to_string(), BigInt::from(3));
        let dense = p.to_dense_in("X", &vals).unwrap();
        assert_eq!(dense, vec![BigInt::from(-7), BigInt::from(1), BigInt::from(6)]);
        assert_eq!(eval_dense(&dense, &BigInt::from(2)), BigInt::from(19));
        assert!(p.univariate_coeffs().is_err());
    }

    #[test]
    fn normalization_fixes_content_and_sign() {
        let p = c(-4) * x().pow(2) + c(6) * y();
        assert_eq!(p.normalized(), c(2) * x().pow(2) - c(3) * y());
    }

    #[test]
    fn coefficients_in_a_variable() {
        let p = c(3) * x().pow(2) * y() + x() - c(5);
        let parts = p.coefficients_in("X");
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0], c(-5));
        assert_eq!(parts[1], c(1));
        assert_eq!(parts[2], c(3) * y());
        assert_eq!(p.coefficients_in("Z"), vec![p.clone()]);
    }

    #[test]
    fn square_roots() {
        let q = x().pow(3) - c(3) * x() * y() + c(2) * z();
        assert_eq!((&q * &q).perfect_square_root(), Some(q.clone()));
        assert_eq!((c(4) * x() * x()).perfect_square_root(), Some(c(2) * x()));
        assert_eq!((x() * x() + c(1)).perfect_square_root(), None);
        assert_eq!((c(-1) * x() * x()).perfect_square_root(), None);
        assert_eq!((c(2) * x() * x()).perfect_square_root(), None);
    }
}
