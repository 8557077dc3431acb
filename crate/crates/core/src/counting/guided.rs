//! Divisor/elimination-guided enumerators.
//!
//! Each one turns the system into "a product of differences times a cofactor
//! equals a known integer", enumerates the bounded divisors, and solves the
//! cofactor equation for the one remaining unknown by exact integer roots.
//! Every candidate is re-checked against the original equations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    case_partition_with, default_strategy, for_each_tuple, is_solution, CaseCriterion, CountError, Solution,
    SolutionTally, SystemInstance,
};
use crate::curve::{GroundSet, SeparatedSystem};
use crate::elimination::{t_vars, x_var, EliminationKit};
use crate::poly::{
    first_difference_chi, integer_roots_in_range, second_difference_psi, shift_polynomial_rho, IntPolynomial,
};

use super::divisors::signed_divisors_bounded;

const UNKNOWN: &str = "U";

/// A polynomial equation `p(params; U) = rhs` to be solved for integer `U`
/// once the parameters are fixed.
struct ParamSolver {
    coeffs: Vec<IntPolynomial>,
    params: Vec<String>,
}

impl ParamSolver {
    /// `p` must be a polynomial in `params` and `U` only.
    fn new(p: IntPolynomial, params: &[String]) -> Self {
        let coeffs = p.coefficients_in(UNKNOWN);
        ParamSolver {
            coeffs,
            params: params.to_vec(),
        }
    }

    /// Elements `u` of the ground set with `p(values; u) = rhs`. When the
    /// specialized polynomial vanishes identically every element qualifies.
    fn solve(&self, values: &[BigInt], rhs: &BigInt, ground: &GroundSet) -> Vec<i64> {
        let env: BTreeMap<String, BigInt> = self.params.iter().cloned().zip(values.iter().cloned()).collect();
        let mut dense: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.evaluate(&env).expect("solver parameters cover every variable"))
            .collect();
        dense[0] -= rhs;
        if dense.iter().all(Zero::is_zero) {
            return ground.elements().to_vec();
        }
        let (Some(lo), Some(hi)) = (ground.min(), ground.max()) else {
            return Vec::new();
        };
        integer_roots_in_range(&dense, &BigInt::from(lo), &BigInt::from(hi))
            .expect("nonzero polynomial")
            .into_iter()
            .filter_map(|r| i64::try_from(r).ok())
            .filter(|&r| ground.contains(r))
            .collect()
    }
}

fn substitute(p: &IntPolynomial, map: &[(&str, IntPolynomial)]) -> IntPolynomial {
    let names: Vec<&str> = map.iter().map(|(n, _)| *n).collect();
    let p = p.with_vars(&names);
    let map: HashMap<String, IntPolynomial> = map.iter().map(|(n, q)| (n.to_string(), q.clone())).collect();
    p.substitute(&map).expect("all substituted names were added")
}

fn var(name: &str) -> IntPolynomial {
    IntPolynomial::var(name)
}

fn span_bound(ground: &GroundSet) -> BigInt {
    BigInt::from(ground.span())
}

fn degree_one_linear(sys: &SeparatedSystem) -> bool {
    sys.degrees()[0] == 1
}

/// `phi(n) - phi(m) = a` for single elements `m, n`.
///
/// With `d_1 = n - m` and `d_0 = chi(n, m)` we have `d_0 d_1 = a`; each
/// bounded divisor `d_1` leaves `chi(m + d_1, m) = a / d_1` to solve for `m`.
pub fn guided_count_base1(phi: &[BigInt], ground: &GroundSet, a: &BigInt, collect: bool) -> Result<SolutionTally, CountError> {
    if a.is_zero() {
        return Err(CountError::ZeroShift);
    }
    let phi_poly = IntPolynomial::univariate("T", phi);
    let chi = first_difference_chi(&phi_poly).map_err(|e| CountError::DomainError(e.to_string()))?;
    let u = var(UNKNOWN);
    let shifted = substitute(&chi, &[("X", &u + &var("D")), ("Y", u.clone())]);
    let solver = ParamSolver::new(shifted, &["D".to_string()]);
    let eval = |x: i64| crate::poly::eval_dense(phi, &BigInt::from(x));
    let found: Vec<Solution> = signed_divisors_bounded(a, &span_bound(ground))
        .into_par_iter()
        .flat_map_iter(|d1| {
            let d0 = a / &d1;
            let step = i64::try_from(&d1).expect("divisor bounded by the span");
            solver
                .solve(std::slice::from_ref(&d1), &d0, ground)
                .into_iter()
                .filter(move |&m| ground.contains(m + step) && eval(m + step) - eval(m) == *a)
                .map(move |m| Solution {
                    m: vec![m],
                    n: vec![m + step],
                })
                .collect::<Vec<_>>()
        })
        .collect();
    Ok(SolutionTally::from_witnesses(found, collect))
}

/// `s = r = 2` with `phi_1 = alpha T + beta`.
///
/// Writing `b = a_1 / alpha`, solutions satisfy `n_1 + n_2 = m_1 + m_2 + b`.
/// Diagonal solutions (some `n_i = m_j`) reduce to `phi(v + b) - phi(v) = a_2`.
/// For the rest put `nu = n_1 - b`; then
/// `(m_1 - n_2)(m_2 - n_2) psi(m_1, m_2, n_2) = a_2 - rho(nu, b)`, which is
/// either a bounded divisor problem or, when the right side vanishes, a root
/// problem for `psi`.
pub fn guided_count_base2(
    sys: &SeparatedSystem,
    ground: &GroundSet,
    a: &[BigInt],
    collect: bool,
) -> Result<SolutionTally, CountError> {
    if sys.r() != 2 || !degree_one_linear(sys) {
        return Err(CountError::StrategyInapplicable(
            "needs two polynomials with the first one linear".into(),
        ));
    }
    if a.len() != 2 {
        return Err(CountError::DimensionMismatch { got: a.len(), want: 2 });
    }
    if a.iter().all(Zero::is_zero) {
        return Err(CountError::ZeroShift);
    }
    let alpha = &sys.coefficients(0)[1];
    if !(&a[0] % alpha).is_zero() {
        return Ok(SolutionTally::from_witnesses(Vec::new(), collect));
    }
    let b = &a[0] / alpha;
    let b64 = i64::try_from(&b).ok();
    let phi = sys.phi(1, "T");
    let poly_err = |e: crate::poly::PolyError| CountError::DomainError(e.to_string());
    let rho = shift_polynomial_rho(&phi).map_err(poly_err)?;
    let psi = second_difference_psi(&phi).map_err(poly_err)?;
    let u = var(UNKNOWN);
    let els = ground.elements();

    let mut found: BTreeSet<Solution> = BTreeSet::new();

    // diagonal: n_i = m_j = w, and the other pair differs by b
    if let (false, Some(b64)) = (b.is_zero(), b64) {
        let diag = ParamSolver::new(substitute(&rho, &[("X", u.clone()), ("Y", var("B"))]), &["B".to_string()]);
        for v in diag.solve(std::slice::from_ref(&b), &a[1], ground) {
            if !ground.contains(v + b64) {
                continue;
            }
            for &w in els {
                for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let mut m = [0i64; 2];
                    let mut n = [0i64; 2];
                    n[i] = w;
                    m[j] = w;
                    m[1 - j] = v;
                    n[1 - i] = v + b64;
                    found.insert(Solution { m: m.to_vec(), n: n.to_vec() });
                }
            }
        }
    }

    // off-diagonal
    let psi_root = ParamSolver::new(
        substitute(
            &psi,
            &[("X", var("A")), ("Y", u.clone()), ("Z", &(&var("A") + &u) - &var("N"))],
        ),
        &["A".to_string(), "N".to_string()],
    );
    let span = span_bound(ground);
    let off: Vec<Solution> = els
        .par_iter()
        .flat_map_iter(|&n1| {
            let mut out = Vec::new();
            let Some(b64) = b64 else { return out };
            let nu = n1 - b64;
            let big_nu = BigInt::from(nu);
            let rhs = &a[1] - (sys.eval_phi(1, &BigInt::from(n1)) - sys.eval_phi(1, &big_nu));
            if rhs.is_zero() {
                for &m1 in els {
                    for m2 in psi_root.solve(&[BigInt::from(m1), big_nu.clone()], &BigInt::zero(), ground) {
                        let n2 = m1 + m2 - nu;
                        if ground.contains(n2) {
                            out.push(Solution { m: vec![m1, m2], n: vec![n1, n2] });
                        }
                    }
                }
            } else {
                for d1 in signed_divisors_bounded(&rhs, &span) {
                    let rest = &rhs / &d1;
                    for d2 in signed_divisors_bounded(&rest, &span) {
                        let (d1, d2) = (i64::try_from(&d1).unwrap(), i64::try_from(&d2).unwrap());
                        let n2 = nu - d1 - d2;
                        let (m1, m2) = (n2 + d1, n2 + d2);
                        if ground.contains(n2) && ground.contains(m1) && ground.contains(m2) {
                            out.push(Solution { m: vec![m1, m2], n: vec![n1, n2] });
                        }
                    }
                }
            }
            out
        })
        .collect();
    found.extend(off);
    let verified: Vec<Solution> = found
        .into_iter()
        .filter(|s| is_solution(sys, &s.m, &s.n, a))
        .collect();
    Ok(SolutionTally::from_witnesses(verified, collect))
}

/// Case-3 solutions for `s = r`.
///
/// Fix `m_2, ..., m_r` and put `M = a + sum_{i>=2} gamma(m_i)`, so that
/// `M = sigma_r(n) - gamma(m_1)` and `Q(M) = R(n; m_1) prod_i (n_i - m_1)`.
/// When `Q(M) != 0` the differences `d_i = n_i - m_1` are bounded divisors of
/// `Q(M)`, and `R(m_1 + d; m_1) = Q(M) / prod d_i` is solved for `m_1`.
pub fn guided_count_case3(inst: &SystemInstance, kit: &EliminationKit, collect: bool) -> Result<SolutionTally, CountError> {
    let sys = &inst.system;
    let r = sys.r();
    if inst.s != r {
        return Err(CountError::ArityNotR { s: inst.s, r });
    }
    let ground = &inst.ground;
    let els = ground.elements();
    let tnames = t_vars(r);
    let q = kit
        .eliminant
        .with_vars(&tnames.iter().map(String::as_str).collect::<Vec<_>>());
    let dnames: Vec<String> = (1..=r).map(|i| format!("D_{i}")).collect();
    let u = var(UNKNOWN);
    let mut map: Vec<(String, IntPolynomial)> = (1..=r)
        .map(|i| (x_var(i), &u + &var(&dnames[i - 1])))
        .collect();
    map.push(("Y".to_string(), u.clone()));
    let map_ref: Vec<(&str, IntPolynomial)> = map.iter().map(|(n, p)| (n.as_str(), p.clone())).collect();
    let solver = ParamSolver::new(substitute(&kit.quotient, &map_ref), &dnames);
    let span = span_bound(ground);

    let mut fixed: Vec<Vec<i64>> = Vec::new();
    if r == 1 {
        fixed.push(Vec::new());
    } else {
        for_each_tuple(els.len(), r - 1, |idx| fixed.push(idx.iter().map(|&i| els[i]).collect()));
    }
    let found: Vec<Solution> = fixed
        .par_iter()
        .flat_map_iter(|rest| {
            let mut out = Vec::new();
            let point = super::case_point(sys, &inst.a, rest);
            let qm = q.evaluate_point(&point);
            if qm.is_zero() {
                return out;
            }
            let mut d = Vec::with_capacity(r);
            divisor_walk(&qm, r, &span, &mut d, &mut |d, d0| {
                for m1 in solver.solve(d, d0, ground) {
                    let n: Option<Vec<i64>> = d
                        .iter()
                        .map(|di| {
                            let ni = m1 + i64::try_from(di).ok()?;
                            ground.contains(ni).then_some(ni)
                        })
                        .collect();
                    let Some(n) = n else { continue };
                    let mut m = Vec::with_capacity(r);
                    m.push(m1);
                    m.extend_from_slice(rest);
                    let sol = Solution { m, n };
                    if !sol.shares_element() && is_solution(sys, &sol.m, &sol.n, &inst.a) {
                        out.push(sol);
                    }
                }
            });
            out
        })
        .collect();
    Ok(SolutionTally::from_witnesses(found, collect))
}

/// Calls `f(d_1..d_k, d_0)` for every factorization `q = d_0 d_1 ... d_k`
/// with `|d_i| <= span` for `i >= 1`.
fn divisor_walk(q: &BigInt, k: usize, span: &BigInt, d: &mut Vec<BigInt>, f: &mut impl FnMut(&[BigInt], &BigInt)) {
    if d.len() == k {
        f(d, q);
        return;
    }
    for di in signed_divisors_bounded(q, span) {
        let rest = q / &di;
        d.push(di);
        divisor_walk(&rest, k, span, d, f);
        d.pop();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GuidedRoute {
    Base1,
    Base2,
    /// Cases 1 and 2 by enumeration, case 3 by the divisor argument.
    Hybrid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GuidedOutcome {
    pub route: GuidedRoute,
    pub tally: SolutionTally,
}

/// Dispatches to the applicable guided enumerator.
pub fn guided_count(inst: &SystemInstance, collect: bool) -> Result<GuidedOutcome, CountError> {
    let sys = &inst.system;
    let (r, s) = (sys.r(), inst.s);
    if inst.is_homogeneous() {
        return Err(CountError::ZeroShift);
    }
    if r == 1 && s == 1 {
        let tally = guided_count_base1(sys.coefficients(0), &inst.ground, &inst.a[0], collect)?;
        return Ok(GuidedOutcome {
            route: GuidedRoute::Base1,
            tally,
        });
    }
    if r == 2 && s == 2 && degree_one_linear(sys) {
        let tally = guided_count_base2(sys, &inst.ground, &inst.a, collect)?;
        return Ok(GuidedOutcome {
            route: GuidedRoute::Base2,
            tally,
        });
    }
    if s != r {
        return Err(CountError::StrategyInapplicable(format!(
            "guided counting covers s = r only (s = {s}, r = {r})"
        )));
    }
    let kit = EliminationKit::build_with(sys, default_strategy(sys))
        .map_err(|e| CountError::EliminantUnavailable(e.to_string()))?;
    let low = case_partition_with(inst, true, CaseCriterion::Eliminant)?.tally;
    let parts = low.partition.expect("partition present");
    let c3 = guided_count_case3(inst, &kit, collect)?;
    let count = parts[0] + parts[1] + c3.count;
    let witnesses = if collect {
        let mut w: Vec<Solution> = low
            .witnesses
            .unwrap_or_default()
            .into_iter()
            .filter(|w| w.shares_element() || !is_case3(inst, &kit, w))
            .collect();
        w.extend(c3.witnesses.unwrap_or_default());
        w.sort_unstable();
        Some(w)
    } else {
        None
    };
    Ok(GuidedOutcome {
        route: GuidedRoute::Hybrid,
        tally: SolutionTally {
            count,
            witnesses,
            partition: Some([parts[0], parts[1], c3.count]),
        },
    })
}

fn is_case3(inst: &SystemInstance, kit: &EliminationKit, w: &Solution) -> bool {
    let r = inst.system.r();
    let point = super::case_point(&inst.system, &inst.a, &w.m[1..]);
    let q = kit
        .eliminant
        .with_vars(&t_vars(r).iter().map(String::as_str).collect::<Vec<_>>());
    !q.evaluate_point(&point).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{brute_count, case_partition};

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn base1_examples() {
        let sq = big(&[0, 0, 1]);
        let g10 = GroundSet::range(10);
        assert_eq!(guided_count_base1(&sq, &g10, &BigInt::from(3), false).unwrap().count, 1);
        assert_eq!(guided_count_base1(&sq, &g10, &BigInt::from(1), false).unwrap().count, 0);
        let cube = big(&[0, 0, 0, 1]);
        let t = guided_count_base1(&cube, &GroundSet::range(20), &BigInt::from(7), true).unwrap();
        assert_eq!(t.witnesses.unwrap(), vec![Solution { m: vec![1], n: vec![2] }]);
        assert_eq!(guided_count_base1(&sq, &g10, &BigInt::from(0), false), Err(CountError::ZeroShift));
    }

    #[test]
    fn base1_linear_scans_the_ground_set() {
        let lin = big(&[5, 2]);
        let g = GroundSet::range(10);
        let t = guided_count_base1(&lin, &g, &BigInt::from(4), false).unwrap();
        assert_eq!(t.count, 8);
    }

    #[test]
    fn base2_examples() {
        let sys = SeparatedSystem::moment(2);
        let g = GroundSet::range(4);
        assert_eq!(guided_count_base2(&sys, &g, &big(&[1, 3]), false).unwrap().count, 12);
        assert_eq!(guided_count_base2(&sys, &g, &big(&[0, -4]), false).unwrap().count, 4);
        let sys = SeparatedSystem::from_i64(&[&[0, 2], &[0, 0, 1]]).unwrap();
        let g = GroundSet::range(10);
        assert_eq!(guided_count_base2(&sys, &g, &big(&[1, 5]), false).unwrap().count, 0);
    }

    #[test]
    fn case3_examples() {
        let sys = SeparatedSystem::moment(2);
        let kit = EliminationKit::build(&sys).unwrap();
        let g = GroundSet::range(4);
        let i = SystemInstance::from_i64(sys.clone(), g.clone(), 2, &[0, -4]).unwrap();
        assert_eq!(guided_count_case3(&i, &kit, false).unwrap().count, 4);
        let i = SystemInstance::from_i64(sys, g, 2, &[1, 3]).unwrap();
        assert_eq!(guided_count_case3(&i, &kit, false).unwrap().count, 0);
    }

    #[test]
    fn guided_matches_brute_on_small_battery() {
        let cases: Vec<(SeparatedSystem, i64, Vec<i64>)> = vec![
            (SeparatedSystem::monomials(&[2]), 12, vec![15]),
            (SeparatedSystem::monomials(&[3]), 12, vec![-19]),
            (SeparatedSystem::moment(2), 9, vec![2, 10]),
            (SeparatedSystem::monomials(&[1, 3]), 8, vec![1, 19]),
            (SeparatedSystem::monomials(&[2, 3]), 7, vec![5, 19]),
            (SeparatedSystem::moment(3), 6, vec![1, 5, 17]),
        ];
        for (sys, n, a) in cases {
            let i = SystemInstance::from_i64(sys.clone(), GroundSet::range(n), sys.r(), &a).unwrap();
            let brute = brute_count(&i, true).unwrap();
            let guided = guided_count(&i, true).unwrap();
            assert_eq!(guided.tally.count, brute.count, "{sys} a={a:?}");
            assert_eq!(guided.tally.witnesses, brute.witnesses, "{sys} a={a:?}");
            if sys.r() >= 2 {
                let part = case_partition(&i, false).unwrap().partition.unwrap();
                let kit = EliminationKit::build(&sys).unwrap();
                assert_eq!(guided_count_case3(&i, &kit, false).unwrap().count, part[2], "{sys}");
            }
        }
    }
}
