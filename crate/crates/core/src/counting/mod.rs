//! Exact solution counts for `sum_i (phi_j(n_i) - phi_j(m_i)) = a_j`, over
//! ordered pairs of `s`-tuples from a ground set.
//!
//! [`brute_count`] is the reference; the enumerators in [`guided`] follow the
//! divisor/elimination argument and are checked against it.

mod divisors;
pub mod guided;
mod values;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::curve::{GroundSet, SeparatedSystem};
use crate::elimination::{t_vars, x_vars, ElimError};
use crate::poly::IntPolynomial;

pub use divisors::{divisor_tuples, l_function, signed_divisors_bounded};
pub use guided::{
    guided_count, guided_count_base1, guided_count_base2, guided_count_case3, GuidedOutcome, GuidedRoute,
};
use values::{CurveTable, Value};

pub const DEFAULT_BUDGET: u64 = 10_000_000;
pub const MAXREPS_PAIR_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountError {
    #[error("work estimate {needed} exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("target vector is zero; the guided algorithms need an inhomogeneous target")]
    ZeroShift,
    #[error("cannot factor zero")]
    ZeroTarget,
    #[error("argument outside the domain: {0}")]
    DomainError(String),
    #[error("target has {got} coordinates, the curve has {want}")]
    DimensionMismatch { got: usize, want: usize },
    #[error("ground set is empty")]
    EmptyGround,
    #[error("s must be at least 1")]
    ZeroArity,
    #[error("case split needs s = r (got s = {s}, r = {r})")]
    ArityNotR { s: usize, r: usize },
    #[error("guided enumerator not applicable: {0}")]
    StrategyInapplicable(String),
    #[error("no eliminant available: {0}")]
    EliminantUnavailable(String),
    #[error(transparent)]
    Elim(#[from] ElimError),
}

/// One counting problem: curve, ground set, arity `s`, and target `a`.
#[derive(Debug, Clone)]
pub struct SystemInstance {
    pub system: SeparatedSystem,
    pub ground: GroundSet,
    pub s: usize,
    pub a: Vec<BigInt>,
}

impl SystemInstance {
    pub fn new(system: SeparatedSystem, ground: GroundSet, s: usize, a: Vec<BigInt>) -> Result<Self, CountError> {
        if s == 0 {
            return Err(CountError::ZeroArity);
        }
        if a.len() != system.r() {
            return Err(CountError::DimensionMismatch {
                got: a.len(),
                want: system.r(),
            });
        }
        Ok(SystemInstance { system, ground, s, a })
    }

    pub fn from_i64(system: SeparatedSystem, ground: GroundSet, s: usize, a: &[i64]) -> Result<Self, CountError> {
        Self::new(system, ground, s, a.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn is_homogeneous(&self) -> bool {
        self.a.iter().all(Zero::is_zero)
    }

    /// The instance with `m` and `n` exchanged, i.e. target `-a`.
    pub fn swapped(&self) -> Self {
        SystemInstance {
            a: self.a.iter().map(|v| -v).collect(),
            ..self.clone()
        }
    }
}

/// An ordered pair of tuples `(m, n)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Solution {
    pub m: Vec<i64>,
    pub n: Vec<i64>,
}

impl Solution {
    /// Case 1 of the split: some `m_i` equals some `n_j`.
    pub fn shares_element(&self) -> bool {
        self.m.iter().any(|x| self.n.contains(x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolutionTally {
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Vec<Solution>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<[u64; 3]>,
}

impl SolutionTally {
    pub fn from_count(count: u64) -> Self {
        SolutionTally {
            count,
            witnesses: None,
            partition: None,
        }
    }

    /// Sorts the witnesses and sets the count from them.
    pub fn from_witnesses(mut w: Vec<Solution>, keep: bool) -> Self {
        w.sort_unstable();
        w.dedup();
        SolutionTally {
            count: w.len() as u64,
            witnesses: keep.then_some(w),
            partition: None,
        }
    }
}

/// Exact check of `sum_i (gamma(n_i) - gamma(m_i)) = a`.
pub fn is_solution(sys: &SeparatedSystem, m: &[i64], n: &[i64], a: &[BigInt]) -> bool {
    (0..sys.r()).all(|j| {
        let side = |t: &[i64]| -> BigInt { t.iter().map(|&x| sys.eval_phi(j, &BigInt::from(x))).sum() };
        side(n) - side(m) == a[j]
    })
}

fn check_budget(ground: &GroundSet, s: usize, budget: u64) -> Result<(), CountError> {
    let needed = (ground.len() as u128).checked_pow(s as u32).unwrap_or(u128::MAX);
    if needed > budget as u128 {
        return Err(CountError::BudgetExceeded {
            needed,
            budget: budget as u128,
        });
    }
    Ok(())
}

/// Index tuples of length `s` over `0..len`, in lexicographic order.
pub(crate) fn for_each_tuple(len: usize, s: usize, mut f: impl FnMut(&[usize])) {
    if len == 0 {
        return;
    }
    let mut idx = vec![0usize; s];
    loop {
        f(&idx);
        let mut k = s;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            if idx[k] + 1 < len {
                idx[k] += 1;
                for slot in idx.iter_mut().skip(k + 1) {
                    *slot = 0;
                }
                break;
            }
        }
    }
}

/// Groups all `s`-tuples by their summed curve value.
fn sum_classes<V: Value>(table: &CurveTable<V>, s: usize) -> HashMap<Vec<V>, Vec<u64>> {
    let len = table.len();
    let mut out: HashMap<Vec<V>, Vec<u64>> = HashMap::new();
    let mut code = 0u64;
    for_each_tuple(len, s, |idx| {
        out.entry(table.tuple_sum(idx)).or_default().push(code);
        code += 1;
    });
    out
}

fn decode(code: u64, len: usize, s: usize, elements: &[i64]) -> Vec<i64> {
    let mut out = vec![0i64; s];
    let mut c = code;
    for slot in out.iter_mut().rev() {
        *slot = elements[(c % len as u64) as usize];
        c /= len as u64;
    }
    out
}

/// Meet-in-the-middle count: bucket every `m`-tuple by `sum gamma(m)`, then
/// look up `sum gamma(n) - a` for every `n`-tuple.
pub fn brute_count(inst: &SystemInstance, collect: bool) -> Result<SolutionTally, CountError> {
    brute_count_with_budget(inst, collect, DEFAULT_BUDGET)
}

pub fn brute_count_with_budget(inst: &SystemInstance, collect: bool, budget: u64) -> Result<SolutionTally, CountError> {
    check_budget(&inst.ground, inst.s, budget)?;
    let bound = values::magnitude_bound(&inst.system, &inst.ground, inst.s, &inst.a);
    if values::fits_i128(&bound) {
        brute_impl::<i128>(inst, collect)
    } else {
        brute_impl::<BigInt>(inst, collect)
    }
}

fn brute_impl<V: Value>(inst: &SystemInstance, collect: bool) -> Result<SolutionTally, CountError> {
    let table = CurveTable::<V>::new(&inst.system, &inst.ground);
    let s = inst.s;
    let len = table.len();
    if len == 0 {
        return Ok(SolutionTally::from_witnesses(Vec::new(), collect));
    }
    let classes = sum_classes(&table, s);
    let a: Vec<V> = inst.a.iter().map(V::from_big).collect();
    let elements = inst.ground.elements();
    // split the n-tuples by leading coordinate; each worker is independent
    let per_lead: Vec<(u64, Vec<Solution>)> = (0..len)
        .into_par_iter()
        .map(|lead| {
            let mut count = 0u64;
            let mut found = Vec::new();
            let mut idx = vec![lead; 1];
            let mut visit = |tail: &[usize]| {
                idx.truncate(1);
                idx.extend_from_slice(tail);
                let key: Vec<V> = table
                    .tuple_sum(&idx)
                    .iter()
                    .zip(&a)
                    .map(|(v, t)| v.sub(t))
                    .collect();
                if let Some(ms) = classes.get(&key) {
                    count += ms.len() as u64;
                    if collect {
                        let n: Vec<i64> = idx.iter().map(|&i| elements[i]).collect();
                        for &code in ms {
                            found.push(Solution {
                                m: decode(code, len, s, elements),
                                n: n.clone(),
                            });
                        }
                    }
                }
            };
            if s == 1 {
                visit(&[]);
            } else {
                for_each_tuple(len, s - 1, &mut visit);
            }
            (count, found)
        })
        .collect();
    let count = per_lead.iter().map(|(c, _)| c).sum();
    if collect {
        let w: Vec<Solution> = per_lead.into_iter().flat_map(|(_, w)| w).collect();
        let tally = SolutionTally::from_witnesses(w, true);
        debug_assert_eq!(tally.count, count);
        Ok(tally)
    } else {
        Ok(SolutionTally::from_count(count))
    }
}

/// Which polynomial decides the case-2 / case-3 boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseCriterion {
    Eliminant,
    JacobianCofactor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionOutcome {
    pub tally: SolutionTally,
    pub criterion: CaseCriterion,
    /// Solutions outside case 1 on which `Q(M) = 0` and `P(M) = 0` disagree.
    pub boundary_disagreements: u64,
}

/// `M = a + sum_{i >= 2} gamma(m_i)`, the point at which the case split
/// evaluates the eliminant.
pub fn case_point(sys: &SeparatedSystem, a: &[BigInt], m_rest: &[i64]) -> Vec<BigInt> {
    (0..sys.r())
        .map(|j| {
            m_rest
                .iter()
                .fold(a[j].clone(), |acc, &x| acc + sys.eval_phi(j, &BigInt::from(x)))
        })
        .collect()
}

fn eval_at(p: &IntPolynomial, names: &[String], point: &[BigInt]) -> BigInt {
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let p = p.with_vars(&refs);
    assert_eq!(p.vars().len(), names.len(), "polynomial has unexpected variables");
    p.evaluate_point(point)
}

/// Splits the solutions (`s = r`) into case 1 (some `m_i = n_j`), case 2
/// (`Q(M) = 0`), and case 3, with precedence 1 over 2 over 3.
pub fn case_partition(inst: &SystemInstance, collect: bool) -> Result<SolutionTally, CountError> {
    Ok(case_partition_with(inst, collect, CaseCriterion::Eliminant)?.tally)
}

pub fn case_partition_with(
    inst: &SystemInstance,
    collect: bool,
    criterion: CaseCriterion,
) -> Result<PartitionOutcome, CountError> {
    let r = inst.system.r();
    if inst.s != r {
        return Err(CountError::ArityNotR { s: inst.s, r });
    }
    let q = crate::elimination::eliminant(&inst.system, default_strategy(&inst.system))
        .map_err(|e| CountError::EliminantUnavailable(e.to_string()))?;
    let p = crate::elimination::jacobian_cofactor(&inst.system)?;
    let tally = brute_count(inst, true)?;
    let witnesses = tally.witnesses.unwrap_or_default();
    let tnames = t_vars(r);
    let xnames = x_vars(r);
    let classified: Vec<(usize, bool)> = witnesses
        .par_iter()
        .map(|w| {
            if w.shares_element() {
                return (0, false);
            }
            let point = case_point(&inst.system, &inst.a, &w.m[1..]);
            let q_zero = eval_at(&q, &tnames, &point).is_zero();
            let p_zero = eval_at(&p, &xnames, &point).is_zero();
            let zero = match criterion {
                CaseCriterion::Eliminant => q_zero,
                CaseCriterion::JacobianCofactor => p_zero,
            };
            (if zero { 1 } else { 2 }, q_zero != p_zero)
        })
        .collect();
    let mut parts = [0u64; 3];
    let mut disagreements = 0;
    for &(c, d) in &classified {
        parts[c] += 1;
        disagreements += d as u64;
    }
    Ok(PartitionOutcome {
        tally: SolutionTally {
            count: witnesses.len() as u64,
            witnesses: collect.then_some(witnesses),
            partition: Some(parts),
        },
        criterion,
        boundary_disagreements: disagreements,
    })
}

pub(crate) fn default_strategy(sys: &SeparatedSystem) -> crate::elimination::EliminantStrategy {
    if crate::elimination::newton_applicable(sys) {
        crate::elimination::EliminantStrategy::Newton
    } else {
        crate::elimination::EliminantStrategy::Resultant
    }
}

/// `max_a J_s(a)` over targets with every coordinate nonzero, and the
/// lexicographically smallest maximizer.
pub fn maxnumreps(
    sys: &SeparatedSystem,
    ground: &GroundSet,
    s: usize,
) -> Result<(u64, Option<Vec<BigInt>>), CountError> {
    maxnumreps_with_budget(sys, ground, s, DEFAULT_BUDGET)
}

pub fn maxnumreps_with_budget(
    sys: &SeparatedSystem,
    ground: &GroundSet,
    s: usize,
    budget: u64,
) -> Result<(u64, Option<Vec<BigInt>>), CountError> {
    if s == 0 {
        return Err(CountError::ZeroArity);
    }
    check_budget(ground, s, budget)?;
    let zeros = vec![BigInt::zero(); sys.r()];
    let bound = values::magnitude_bound(sys, ground, 2 * s, &zeros);
    if values::fits_i128(&bound) {
        maxreps_impl::<i128>(sys, ground, s)
    } else {
        maxreps_impl::<BigInt>(sys, ground, s)
    }
}

fn maxreps_impl<V: Value>(
    sys: &SeparatedSystem,
    ground: &GroundSet,
    s: usize,
) -> Result<(u64, Option<Vec<BigInt>>), CountError> {
    let table = CurveTable::<V>::new(sys, ground);
    let mut counts: HashMap<Vec<V>, u64> = HashMap::new();
    for_each_tuple(table.len(), s, |idx| {
        *counts.entry(table.tuple_sum(idx)).or_default() += 1;
    });
    let mut keys: Vec<(Vec<V>, u64)> = counts.into_iter().collect();
    keys.sort_unstable();
    let pairs = (keys.len() as u128).pow(2);
    if pairs > MAXREPS_PAIR_BUDGET as u128 {
        return Err(CountError::BudgetExceeded {
            needed: pairs,
            budget: MAXREPS_PAIR_BUDGET as u128,
        });
    }
    // J(a) = sum_v c(v) c(v + a): pair each m-class v with each n-class w
    let acc: HashMap<Vec<V>, u64> = keys
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<Vec<V>, u64>, (v, cv)| {
            for (w, cw) in &keys {
                let diff: Vec<V> = w.iter().zip(v).map(|(x, y)| x.sub(y)).collect();
                if diff.iter().all(|d| !d.vanishes()) {
                    *acc.entry(diff).or_default() += cv * cw;
                }
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            if a.len() < b.len() {
                return merge_into(b, a);
            }
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let best = acc
        .into_iter()
        .max_by(|(ka, ca), (kb, cb)| ca.cmp(cb).then_with(|| kb.cmp(ka)));
    Ok(match best {
        None => (0, None),
        Some((k, c)) => (c, Some(k.iter().map(V::to_big).collect())),
    })
}

fn merge_into<K: std::hash::Hash + Eq>(mut a: HashMap<K, u64>, b: HashMap<K, u64>) -> HashMap<K, u64> {
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

/// Pairs whose multisets `{phi_i(m_1), ..., phi_i(m_s)}` and
/// `{phi_i(n_1), ..., phi_i(n_s)}` coincide for every `i`.
pub fn diagonal_count(sys: &SeparatedSystem, ground: &GroundSet, s: usize) -> Result<u64, CountError> {
    if s == 0 {
        return Err(CountError::ZeroArity);
    }
    check_budget(ground, s, DEFAULT_BUDGET)?;
    let table = CurveTable::<BigInt>::new(sys, ground);
    let mut classes: HashMap<Vec<Vec<BigInt>>, u64> = HashMap::new();
    for_each_tuple(table.len(), s, |idx| {
        let key: Vec<Vec<BigInt>> = (0..sys.r())
            .map(|j| {
                let mut vals: Vec<BigInt> = idx.iter().map(|&i| table.value(i)[j].clone()).collect();
                vals.sort_unstable();
                vals
            })
            .collect();
        *classes.entry(key).or_default() += 1;
    });
    Ok(classes.values().map(|c| c * c).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn inst(sys: SeparatedSystem, n: i64, s: usize, a: &[i64]) -> SystemInstance {
        SystemInstance::from_i64(sys, GroundSet::range(n), s, a).unwrap()
    }

    /// Direct enumeration over all 2s-tuples.
    fn naive(inst: &SystemInstance) -> u64 {
        let els = inst.ground.elements();
        let mut count = 0;
        for_each_tuple(els.len(), 2 * inst.s, |idx| {
            let m: Vec<i64> = idx[..inst.s].iter().map(|&i| els[i]).collect();
            let n: Vec<i64> = idx[inst.s..].iter().map(|&i| els[i]).collect();
            if is_solution(&inst.system, &m, &n, &inst.a) {
                count += 1;
            }
        });
        count
    }

    #[test]
    fn brute_examples() {
        let t = brute_count(&inst(SeparatedSystem::monomials(&[2]), 10, 1, &[3]), true).unwrap();
        assert_eq!(t.count, 1);
        assert_eq!(t.witnesses.unwrap(), vec![Solution { m: vec![1], n: vec![2] }]);
        let t = brute_count(&inst(SeparatedSystem::moment(2), 4, 2, &[1, 3]), false).unwrap();
        assert_eq!(t.count, 12);
        let t = brute_count(&inst(SeparatedSystem::moment(2), 4, 2, &[0, -4]), true).unwrap();
        assert_eq!(t.count, 4);
        for w in t.witnesses.unwrap() {
            let mut m = w.m.clone();
            let mut n = w.n.clone();
            m.sort();
            n.sort();
            assert_eq!((m, n), (vec![1, 4], vec![2, 3]));
        }
    }

    #[test]
    fn brute_matches_full_enumeration() {
        let cases = [
            (SeparatedSystem::moment(2), 5, 2, vec![1, 3]),
            (SeparatedSystem::moment(2), 5, 2, vec![0, 0]),
            (SeparatedSystem::monomials(&[2, 3]), 4, 2, vec![3, 7]),
            (SeparatedSystem::moment(3), 3, 3, vec![0, 0, 0]),
            (SeparatedSystem::monomials(&[2]), 6, 2, vec![5]),
        ];
        for (sys, n, s, a) in cases {
            let i = inst(sys, n, s, &a);
            assert_eq!(brute_count(&i, false).unwrap().count, naive(&i));
            let w = brute_count(&i, true).unwrap();
            assert_eq!(w.count, naive(&i));
            assert!(w.witnesses.unwrap().iter().all(|w| is_solution(&i.system, &w.m, &w.n, &i.a)));
        }
    }

    #[test]
    fn big_values_take_the_bigint_path() {
        let sys = SeparatedSystem::monomials(&[40]);
        let i = inst(sys, 8, 1, &[0]);
        assert_eq!(brute_count(&i, false).unwrap().count, 8);
    }

    #[test]
    fn budget_is_enforced() {
        let i = inst(SeparatedSystem::moment(2), 10, 2, &[1, 1]);
        assert!(matches!(
            brute_count_with_budget(&i, false, 50),
            Err(CountError::BudgetExceeded { needed: 100, budget: 50 })
        ));
    }

    #[test]
    fn partition_examples() {
        let t = case_partition(&inst(SeparatedSystem::moment(2), 4, 2, &[0, -4]), false).unwrap();
        assert_eq!(t.partition, Some([0, 0, 4]));
        let t = case_partition(&inst(SeparatedSystem::moment(2), 4, 2, &[1, 3]), false).unwrap();
        assert_eq!(t.partition, Some([12, 0, 0]));
        let t = case_partition(&inst(SeparatedSystem::moment(2), 4, 2, &[100, 3]), false).unwrap();
        assert_eq!(t.partition, Some([0, 0, 0]));
        assert!(matches!(
            case_partition(&inst(SeparatedSystem::moment(2), 4, 3, &[1, 3]), false),
            Err(CountError::ArityNotR { .. })
        ));
    }

    #[test]
    fn maxnumreps_examples() {
        let (c, _) = maxnumreps(&SeparatedSystem::monomials(&[2]), &GroundSet::range(5), 1).unwrap();
        assert_eq!(c, 1);
        let (c, a) = maxnumreps(&SeparatedSystem::moment(1), &GroundSet::range(5), 1).unwrap();
        assert_eq!((c, a), (4, Some(big(&[-1]))));
        let single = GroundSet::new(vec![1], 1).unwrap();
        assert_eq!(maxnumreps(&SeparatedSystem::moment(1), &single, 1).unwrap(), (0, None));
    }

    #[test]
    fn maxnumreps_matches_explicit_targets() {
        let sys = SeparatedSystem::moment(2);
        let g = GroundSet::range(5);
        let (best, arg) = maxnumreps(&sys, &g, 2).unwrap();
        let mut brute_best = 0;
        for a1 in -8..=8i64 {
            for a2 in -48..=48i64 {
                if a1 == 0 || a2 == 0 {
                    continue;
                }
                let i = SystemInstance::from_i64(sys.clone(), g.clone(), 2, &[a1, a2]).unwrap();
                brute_best = brute_best.max(brute_count(&i, false).unwrap().count);
            }
        }
        assert_eq!(best, brute_best);
        let i = SystemInstance::new(sys, g, 2, arg.unwrap()).unwrap();
        assert_eq!(brute_count(&i, false).unwrap().count, best);
    }

    #[test]
    fn diagonal_examples() {
        assert_eq!(diagonal_count(&SeparatedSystem::monomials(&[2]), &GroundSet::range(5), 1).unwrap(), 5);
        let sys = SeparatedSystem::from_i64(&[&[0, -4, 1]]).unwrap();
        let g = GroundSet::new(vec![1, 3], 3).unwrap();
        assert_eq!(diagonal_count(&sys, &g, 1).unwrap(), 4);
        assert_eq!(diagonal_count(&SeparatedSystem::moment(2), &GroundSet::range(3), 2).unwrap(), 15);
    }
}
