//! Elimination toolkit: the Vandermonde determinant, the Jacobian cofactor
//! `P_gamma`, the eliminant `Q`, and the quotient polynomial `R`.
//!
//! Variables are named `X_1..X_r`, `T_1..T_r`, and `Y`.

use std::collections::HashMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::curve::SeparatedSystem;
use crate::poly::{IntPolynomial, PolyError};

pub const DEFAULT_TERM_BUDGET: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElimError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("strategy not applicable: {0}")]
    StrategyInapplicable(String),
    #[error("intermediate polynomial has {terms} terms, over the budget of {budget}")]
    DegreeBudgetExceeded { terms: usize, budget: usize },
    #[error("eliminant check failed: {0}")]
    VerificationFailed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EliminantStrategy {
    Newton,
    Resultant,
}

impl EliminantStrategy {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "newton" => Some(Self::Newton),
            "resultant" => Some(Self::Resultant),
            _ => None,
        }
    }
}

pub fn x_var(j: usize) -> String {
    format!("X_{j}")
}

pub fn t_var(i: usize) -> String {
    format!("T_{i}")
}

pub fn x_vars(r: usize) -> Vec<String> {
    (1..=r).map(x_var).collect()
}

pub fn t_vars(r: usize) -> Vec<String> {
    (1..=r).map(t_var).collect()
}

fn check_budget(p: &IntPolynomial, budget: usize) -> Result<(), ElimError> {
    if p.num_terms() > budget {
        return Err(ElimError::DegreeBudgetExceeded {
            terms: p.num_terms(),
            budget,
        });
    }
    Ok(())
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn determinant(matrix: &[Vec<IntPolynomial>]) -> Result<IntPolynomial, ElimError> {
    determinant_with_budget(matrix, usize::MAX)
}

pub fn determinant_with_budget(matrix: &[Vec<IntPolynomial>], budget: usize) -> Result<IntPolynomial, ElimError> {
    let n = matrix.len();
    assert!(matrix.iter().all(|row| row.len() == n), "matrix must be square");
    if n == 0 {
        return Ok(IntPolynomial::one());
    }
    let mut m: Vec<Vec<IntPolynomial>> = matrix.to_vec();
    let mut negate = false;
    let mut prev = IntPolynomial::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(IntPolynomial::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&m[k][k] * &m[i][j]) - &(&m[i][k] * &m[k][j]);
                let entry = num.exact_divide(&prev)?;
                check_budget(&entry, budget)?;
                m[i][j] = entry;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { -det } else { det })
}

/// Resultant of `f` and `g` with respect to `var`, as the Sylvester determinant.
pub fn resultant(f: &IntPolynomial, g: &IntPolynomial, var: &str, budget: usize) -> Result<IntPolynomial, ElimError> {
    let fc = f.coefficients_in(var);
    let gc = g.coefficients_in(var);
    let (m, n) = (fc.len() - 1, gc.len() - 1);
    if m == 0 && n == 0 {
        return Ok(IntPolynomial::one());
    }
    if m == 0 {
        return Ok(fc[0].pow(n as u32));
    }
    if n == 0 {
        return Ok(gc[0].pow(m as u32));
    }
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    // coefficient lists are ascending; Sylvester rows use descending order
    for shift in 0..n {
        let mut row = vec![IntPolynomial::zero(); size];
        for (k, c) in fc.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![IntPolynomial::zero(); size];
        for (k, c) in gc.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
        rows.push(row);
    }
    determinant_with_budget(&rows, budget)
}

/// `V_r = prod_{i<j} (X_j - X_i)`.
pub fn vandermonde(r: usize) -> IntPolynomial {
    let mut v = IntPolynomial::one();
    for j in 1..=r {
        for i in 1..j {
            v = &v * &(&IntPolynomial::var(&x_var(j)) - &IntPolynomial::var(&x_var(i)));
        }
    }
    v
}

/// `det(X_j^{i-1})`, the matrix form of [`vandermonde`].
pub fn vandermonde_matrix_det(r: usize) -> Result<IntPolynomial, ElimError> {
    let rows: Vec<Vec<IntPolynomial>> = (0..r)
        .map(|i| (1..=r).map(|j| IntPolynomial::var(&x_var(j)).pow(i as u32)).collect())
        .collect();
    determinant(&rows)
}

/// `det(phi_i'(X_j))`.
pub fn derivative_determinant(sys: &SeparatedSystem) -> Result<IntPolynomial, ElimError> {
    let r = sys.r();
    let rows: Vec<Vec<IntPolynomial>> = (0..r)
        .map(|i| {
            let d = sys.phi(i, "T").derivative("T");
            (1..=r).map(|j| rename(&d, "T", &x_var(j))).collect()
        })
        .collect();
    determinant(&rows)
}

fn rename(p: &IntPolynomial, from: &str, to: &str) -> IntPolynomial {
    if !p.vars().iter().any(|v| v == from) {
        return p.clone();
    }
    let mut map = HashMap::new();
    map.insert(from.to_string(), IntPolynomial::var(to));
    p.substitute(&map).expect("variable present")
}

/// `P_gamma = det(phi_i'(X_j)) / V_r`.
pub fn jacobian_cofactor(sys: &SeparatedSystem) -> Result<IntPolynomial, ElimError> {
    let det = derivative_determinant(sys)?;
    Ok(det.exact_divide(&vandermonde(sys.r()))?)
}

/// `sigma_{i,s} = sum_{j <= s} phi_i(X_j)` (1-based `i`).
pub fn power_sum_sigma(sys: &SeparatedSystem, i: usize, s: usize) -> IntPolynomial {
    assert!(i >= 1 && i <= sys.r(), "index out of range");
    let mut out = IntPolynomial::zero();
    for j in 1..=s {
        out = &out + &sys.phi(i - 1, &x_var(j));
    }
    out
}

/// Substitutes `T_i -> images[i-1]`.
pub fn compose_t(q: &IntPolynomial, images: &[IntPolynomial]) -> Result<IntPolynomial, ElimError> {
    let r = images.len();
    let q = q.with_vars(&t_vars(r).iter().map(String::as_str).collect::<Vec<_>>());
    let map: HashMap<String, IntPolynomial> = images
        .iter()
        .enumerate()
        .map(|(i, p)| (t_var(i + 1), p.clone()))
        .collect();
    Ok(q.substitute(&map)?)
}

fn sigma_images(sys: &SeparatedSystem, s: usize) -> Vec<IntPolynomial> {
    (1..=sys.r()).map(|i| power_sum_sigma(sys, i, s)).collect()
}

/// Whether the Newton strategy applies: `phi_i = T^{i d}` for a common `d`.
pub fn newton_applicable(sys: &SeparatedSystem) -> bool {
    let d = sys.degrees()[0];
    (0..sys.r()).all(|i| {
        let c = sys.coefficients(i);
        c.len() == (i + 1) * d + 1
            && c.last().is_some_and(|x| *x == BigInt::from(1))
            && c[..c.len() - 1].iter().all(|x| *x == BigInt::from(0))
    })
}

/// `r! e_r` written in the power sums `T_1, ..., T_r`.
pub fn newton_eliminant(r: usize) -> IntPolynomial {
    let t: Vec<IntPolynomial> = t_vars(r).iter().map(|v| IntPolynomial::var(v)).collect();
    let mut e: Vec<IntPolynomial> = vec![IntPolynomial::one()];
    let mut fact = vec![BigInt::from(1)];
    for k in 1..=r {
        fact.push(&fact[k - 1] * BigInt::from(k));
    }
    for k in 1..=r {
        let mut ek = IntPolynomial::zero();
        for i in 1..=k {
            let coef = &fact[k - 1] / &fact[k - i];
            let term = (&e[k - i] * &t[i - 1]).scale(&coef);
            ek = if i % 2 == 1 { &ek + &term } else { &ek - &term };
        }
        e.push(ek);
    }
    e.pop().unwrap()
}

/// Eliminant `Q(T_1..T_r)`: vanishes on `sigma_{., r-1}` but not on
/// `sigma_{., r}`. Normalized and verified before return.
pub fn eliminant(sys: &SeparatedSystem, strategy: EliminantStrategy) -> Result<IntPolynomial, ElimError> {
    eliminant_with_budget(sys, strategy, DEFAULT_TERM_BUDGET)
}

pub fn eliminant_with_budget(
    sys: &SeparatedSystem,
    strategy: EliminantStrategy,
    budget: usize,
) -> Result<IntPolynomial, ElimError> {
    let r = sys.r();
    let q = if r == 1 {
        IntPolynomial::var(&t_var(1))
    } else {
        match strategy {
            EliminantStrategy::Newton => {
                if !newton_applicable(sys) {
                    return Err(ElimError::StrategyInapplicable(format!(
                        "newton needs phi_i = T^(i*d); got {sys}"
                    )));
                }
                // sigma_{i,s}(X) = p_i(X_1^d, ..., X_s^d), so the power-sum
                // identity for r! e_r applies unchanged
                newton_eliminant(r)
            }
            EliminantStrategy::Resultant => resultant_eliminant(sys, budget)?,
        }
    };
    let q = q.normalized();
    check_budget(&q, budget)?;
    verify_eliminant(sys, &q)?;
    Ok(q)
}

/// Iterated resultants of `T_i - sum_{j<r} phi_i(x_j)`, eliminating the
/// `x_j` one at a time. For `r = 3` the symmetric pair of roots makes the
/// result a square, which is removed.
fn resultant_eliminant(sys: &SeparatedSystem, budget: usize) -> Result<IntPolynomial, ElimError> {
    let r = sys.r();
    if r > 3 {
        return Err(ElimError::StrategyInapplicable(format!(
            "resultant strategy supports r <= 3, got r = {r}"
        )));
    }
    let free = r - 1;
    let mut eqs: Vec<IntPolynomial> = (1..=r)
        .map(|i| &IntPolynomial::var(&t_var(i)) - &power_sum_sigma(sys, i, free))
        .collect();
    for j in (1..=free).rev() {
        let var = x_var(j);
        let pivot = eqs[0].clone();
        let mut next = Vec::with_capacity(eqs.len() - 1);
        for e in &eqs[1..] {
            let res = resultant(&pivot, e, &var, budget)?;
            check_budget(&res, budget)?;
            next.push(res);
        }
        eqs = next;
    }
    let g = eqs.pop().expect("one equation remains").normalized();
    if g.is_zero() {
        return Err(ElimError::VerificationFailed("iterated resultant vanished".into()));
    }
    if r == 3 {
        if let Some(root) = g.perfect_square_root() {
            return Ok(root);
        }
    }
    Ok(g)
}

/// Checks `Q(sigma_{., r-1}) = 0` and `Q(sigma_{., r}) != 0`.
pub fn verify_eliminant(sys: &SeparatedSystem, q: &IntPolynomial) -> Result<(), ElimError> {
    let r = sys.r();
    let lower = compose_t(q, &sigma_images(sys, r - 1))?;
    if !lower.is_zero() {
        return Err(ElimError::VerificationFailed(format!(
            "Q does not vanish on {} copies",
            r - 1
        )));
    }
    let full = compose_t(q, &sigma_images(sys, r))?;
    if full.is_zero() {
        return Err(ElimError::VerificationFailed(format!("Q vanishes on {r} copies")));
    }
    Ok(())
}

/// Which polynomial is factored through `prod (X_i - Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorSource {
    Eliminant,
    JacobianCofactor,
}

/// `Q(sigma_{., r}(X) - phi_.(Y))`.
pub fn shifted_eliminant(sys: &SeparatedSystem, q: &IntPolynomial) -> Result<IntPolynomial, ElimError> {
    let r = sys.r();
    let images: Vec<IntPolynomial> = (1..=r)
        .map(|i| &power_sum_sigma(sys, i, r) - &sys.phi(i - 1, "Y"))
        .collect();
    compose_t(q, &images)
}

/// `R` with `Q(sigma_{., r}(X) - phi_.(Y)) = R * prod_i (X_i - Y)`.
pub fn quotient_r(sys: &SeparatedSystem, q: &IntPolynomial) -> Result<IntPolynomial, ElimError> {
    let lhs = shifted_eliminant(sys, q)?;
    let denom = crate::poly::product_of_differences(&x_vars(sys.r()), "Y");
    Ok(lhs.exact_divide(&denom)?)
}

/// Attempts the same factorization with `P_gamma` read as a polynomial in
/// `T_1..T_r`; usually fails with `NotDivisible`.
pub fn quotient_r_from_cofactor(sys: &SeparatedSystem, p: &IntPolynomial) -> Result<IntPolynomial, ElimError> {
    let r = sys.r();
    let map: HashMap<String, IntPolynomial> = (1..=r)
        .map(|j| (x_var(j), IntPolynomial::var(&t_var(j))))
        .filter(|(v, _)| p.vars().contains(v))
        .collect();
    let as_t = if map.is_empty() { p.clone() } else { p.substitute(&map)? };
    quotient_r(sys, &as_t)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DefinitenessReport {
    pub lambda: i64,
    pub range: i64,
    pub points_checked: u64,
    pub exhaustive: bool,
    pub witness: Option<Vec<String>>,
}

/// Searches for a point with every coordinate in `[lambda, lambda + range]`
/// where `|P| < 1`, i.e. `P = 0`. Enumerates the whole box when it has at most
/// `samples` points, else draws `samples` seeded random points.
pub fn definiteness_probe(p: &IntPolynomial, lambda: i64, range: i64, samples: u64, seed: u64) -> DefinitenessReport {
    let nvars = p.vars().len();
    let side = (range + 1) as u128;
    let box_size = side.checked_pow(nvars as u32);
    let exhaustive = box_size.is_some_and(|b| b <= samples as u128);
    let mut report = DefinitenessReport {
        lambda,
        range,
        points_checked: 0,
        exhaustive,
        witness: None,
    };
    let check = |point: &[i64], report: &mut DefinitenessReport| -> bool {
        report.points_checked += 1;
        let pt: Vec<BigInt> = point.iter().map(|&v| BigInt::from(v)).collect();
        if p.evaluate_point(&pt) == BigInt::from(0) {
            report.witness = Some(
                p.vars()
                    .iter()
                    .zip(point)
                    .map(|(v, x)| format!("{v}={x}"))
                    .collect(),
            );
            return true;
        }
        false
    };
    if exhaustive {
        let mut point = vec![lambda; nvars];
        loop {
            if check(&point, &mut report) {
                return report;
            }
            let mut k = 0;
            loop {
                if k == nvars {
                    return report;
                }
                if point[k] < lambda + range {
                    point[k] += 1;
                    break;
                }
                point[k] = lambda;
                k += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let point: Vec<i64> = (0..nvars).map(|_| rng.gen_range(lambda..=lambda + range)).collect();
        if check(&point, &mut report) {
            break;
        }
    }
    report
}

/// Everything the elimination step produces for one curve.
#[derive(Debug, Clone)]
pub struct EliminationKit {
    pub system: SeparatedSystem,
    pub strategy: EliminantStrategy,
    pub vandermonde: IntPolynomial,
    pub jacobian_cofactor: IntPolynomial,
    pub eliminant: IntPolynomial,
    pub quotient: IntPolynomial,
}

impl EliminationKit {
    /// Uses the Newton strategy when it applies, else resultants.
    pub fn build(sys: &SeparatedSystem) -> Result<Self, ElimError> {
        let strategy = if newton_applicable(sys) {
            EliminantStrategy::Newton
        } else {
            EliminantStrategy::Resultant
        };
        Self::build_with(sys, strategy)
    }

    pub fn build_with(sys: &SeparatedSystem, strategy: EliminantStrategy) -> Result<Self, ElimError> {
        let eliminant = eliminant(sys, strategy)?;
        let quotient = quotient_r(sys, &eliminant)?;
        Ok(EliminationKit {
            system: sys.clone(),
            strategy,
            vandermonde: vandermonde(sys.r()),
            jacobian_cofactor: jacobian_cofactor(sys)?,
            eliminant,
            quotient,
        })
    }

    pub fn sigma(&self, i: usize, s: usize) -> IntPolynomial {
        power_sum_sigma(&self.system, i, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(j: usize) -> IntPolynomial {
        IntPolynomial::var(&x_var(j))
    }
    fn t(i: usize) -> IntPolynomial {
        IntPolynomial::var(&t_var(i))
    }
    fn k(v: i64) -> IntPolynomial {
        IntPolynomial::constant(v)
    }
    fn battery() -> Vec<SeparatedSystem> {
        SeparatedSystem::battery()
    }

    #[test]
    fn vandermonde_examples() {
        assert_eq!(vandermonde(1), k(1));
        assert_eq!(vandermonde(2), x(2) - x(1));
        for r in 1..=4 {
            assert_eq!(vandermonde(r), vandermonde_matrix_det(r).unwrap(), "r = {r}");
        }
    }

    #[test]
    fn determinant_needs_pivoting() {
        let m = vec![vec![k(0), k(1)], vec![k(1), k(0)]];
        assert_eq!(determinant(&m).unwrap(), k(-1));
        let m = vec![vec![k(0), k(0)], vec![k(1), k(0)]];
        assert_eq!(determinant(&m).unwrap(), k(0));
    }

    #[test]
    fn cofactor_examples() {
        assert_eq!(jacobian_cofactor(&SeparatedSystem::moment(3)).unwrap(), k(6));
        assert_eq!(jacobian_cofactor(&SeparatedSystem::moment(2)).unwrap(), k(2));
        assert_eq!(
            jacobian_cofactor(&SeparatedSystem::monomials(&[2, 3])).unwrap(),
            k(6) * x(1) * x(2)
        );
    }

    #[test]
    fn cofactor_identity_on_battery() {
        for sys in battery() {
            let det = derivative_determinant(&sys).unwrap();
            let p = jacobian_cofactor(&sys).unwrap();
            assert!((det - &vandermonde(sys.r()) * &p).is_zero(), "{sys}");
        }
    }

    #[test]
    fn newton_examples() {
        assert_eq!(eliminant(&SeparatedSystem::moment(2), EliminantStrategy::Newton).unwrap(), t(1).pow(2) - t(2));
        assert_eq!(
            eliminant(&SeparatedSystem::moment(3), EliminantStrategy::Newton).unwrap(),
            t(1).pow(3) - k(3) * t(1) * t(2) + k(2) * t(3)
        );
        assert_eq!(eliminant(&SeparatedSystem::moment(1), EliminantStrategy::Newton).unwrap(), t(1));
        assert_eq!(
            eliminant(&SeparatedSystem::monomials(&[2, 4]), EliminantStrategy::Newton).unwrap(),
            t(1).pow(2) - t(2)
        );
        assert!(matches!(
            eliminant(&SeparatedSystem::monomials(&[2, 3]), EliminantStrategy::Newton),
            Err(ElimError::StrategyInapplicable(_))
        ));
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(
            eliminant(&SeparatedSystem::monomials(&[2, 3]), EliminantStrategy::Resultant).unwrap(),
            t(1).pow(3) - t(2).pow(2)
        );
        assert_eq!(
            eliminant(&SeparatedSystem::monomials(&[1, 3]), EliminantStrategy::Resultant).unwrap(),
            t(1).pow(3) - t(2)
        );
    }

    #[test]
    fn strategies_agree_on_moment_curves() {
        for r in 2..=3 {
            let sys = SeparatedSystem::moment(r);
            let a = eliminant(&sys, EliminantStrategy::Newton).unwrap();
            let b = eliminant(&sys, EliminantStrategy::Resultant).unwrap();
            assert_eq!(a, b, "r = {r}");
        }
    }

    #[test]
    fn resultant_rejects_large_r() {
        assert!(matches!(
            eliminant(&SeparatedSystem::moment(4), EliminantStrategy::Resultant),
            Err(ElimError::StrategyInapplicable(_))
        ));
    }

    #[test]
    fn quotient_examples() {
        let sys = SeparatedSystem::moment(2);
        let q = eliminant(&sys, EliminantStrategy::Newton).unwrap();
        assert_eq!(quotient_r(&sys, &q).unwrap(), k(2));

        let sys = SeparatedSystem::monomials(&[2, 3]);
        let q = eliminant(&sys, EliminantStrategy::Resultant).unwrap();
        let r = quotient_r(&sys, &q).unwrap();
        assert_eq!(r.total_degree(), Some(4));
        assert_eq!(r.active_vars().len(), 3);
        let back = &r * &crate::poly::product_of_differences(&x_vars(2), "Y");
        assert_eq!(back, shifted_eliminant(&sys, &q).unwrap());
    }

    #[test]
    fn quotient_with_cofactor_is_reported() {
        let sys = SeparatedSystem::monomials(&[2, 3]);
        let p = jacobian_cofactor(&sys).unwrap();
        assert!(matches!(
            quotient_r_from_cofactor(&sys, &p),
            Err(ElimError::Poly(PolyError::NotDivisible))
        ));
    }

    #[test]
    fn sigma_examples() {
        let sys = SeparatedSystem::moment(1);
        assert_eq!(power_sum_sigma(&sys, 1, 3), x(1) + x(2) + x(3));
        let sys = SeparatedSystem::monomials(&[2]);
        assert_eq!(power_sum_sigma(&sys, 1, 2), x(1).pow(2) + x(2).pow(2));
        let sys = SeparatedSystem::from_i64(&[&[0, -4, 1]]).unwrap();
        assert_eq!(power_sum_sigma(&sys, 1, 1), x(1).pow(2) - k(4) * x(1));
    }

    #[test]
    fn probe_examples() {
        assert_eq!(definiteness_probe(&k(6), 1, 10, 1000, 0).witness, None);
        let p = k(6) * x(1) * x(2);
        let rep = definiteness_probe(&p, 1, 10, 1000, 0);
        assert!(rep.exhaustive && rep.witness.is_none());
        assert_eq!(rep.points_checked, 121);
        let rep = definiteness_probe(&(x(1) - x(2)), 1, 10, 1000, 0);
        assert_eq!(rep.witness, Some(vec!["X_1=1".into(), "X_2=1".into()]));
        let rep = definiteness_probe(&(x(1) - x(2)), 1, 10, 50, 3);
        assert!(!rep.exhaustive);
    }

    #[test]
    fn kit_on_battery() {
        for sys in battery() {
            let kit = EliminationKit::build(&sys).unwrap();
            verify_eliminant(&sys, &kit.eliminant).unwrap();
            let back = &kit.quotient * &crate::poly::product_of_differences(&x_vars(sys.r()), "Y");
            assert_eq!(back, shifted_eliminant(&sys, &kit.eliminant).unwrap(), "{sys}");
        }
    }
}
