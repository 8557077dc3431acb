//! Named check bundles behind `paucity suite NAME`. Each battery takes its
//! sizes explicitly so tests can pin them.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{ASampling, ExperimentConfig};
use super::scans::{
    improving_scan, paucity_scan, sample_targets, IMPROVING_RATIO_CEILING, IMPROVING_SUMMAND_FLOOR,
    PAUCITY_SLOPE_CEILING,
};
use super::{with_threads, HarnessError, EXIT_ASSERTION, EXIT_OK, EXIT_USAGE};
use crate::averaging::{
    apply_s, apply_s_star, curve_measure_mu, curve_points, extremal_witnesses, LatticeFunction, Point, PointSet,
    WitnessKind,
};
use crate::counting::{
    brute_count, case_partition, guided_count, guided_count_base1, guided_count_base2, guided_count_case3,
    SystemInstance,
};
use crate::curve::{GroundSet, SeparatedSystem};
use crate::elimination::{
    derivative_determinant, jacobian_cofactor, quotient_r, shifted_eliminant, vandermonde, verify_eliminant, x_vars,
    EliminationKit,
};
use crate::poly::{first_difference_chi, second_difference_psi, shift_polynomial_rho};
use crate::poly::{product_of_differences, IntPolynomial};
use crate::refinement::{
    anchor_sweep, build_tower_with, flow, threshold_constant, union_bound_check, verify_pruning_bounds, TowerOptions,
};

pub const SUITES: [&str; 4] = ["identities", "oracle", "refinement", "scans"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteCheck {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

impl SuiteCheck {
    fn noted(mut self, note: String) -> Self {
        self.detail = if self.detail.is_empty() {
            note
        } else {
            format!("{note}; {}", self.detail)
        };
        self
    }

    fn new(name: &str, cases: usize, failures: Vec<String>) -> Self {
        let detail = match failures.first() {
            None => String::new(),
            Some(f) => format!("{} failure(s); first: {f}", failures.len()),
        };
        SuiteCheck {
            name: name.to_string(),
            passed: failures.is_empty(),
            cases,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<SuiteCheck>,
}

impl SuiteSummary {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            EXIT_OK
        } else {
            EXIT_ASSERTION
        }
    }
}

/// Runs a named bundle with default sizes. Unknown names are usage errors.
pub fn run_suite(name: &str, seed: u64) -> Result<SuiteSummary, HarnessError> {
    let checks = match name {
        "identities" => {
            let mut c = identity_battery(&IdentityParams::default(), seed)?;
            c.extend(operator_battery(&OperatorParams::default(), seed)?);
            c
        }
        "oracle" => oracle_battery(&OracleParams::default(), seed)?,
        "refinement" => {
            let mut c = vec![flow_battery(&FlowParams::default(), seed)?];
            c.extend(pruning_battery(&PruningParams::default(), seed)?);
            c
        }
        "scans" => {
            let mut c = vec![paucity_trend(&PaucityParams::default())?.check];
            c.push(improving_consistency(&ImprovingParams::default())?.check);
            c.push(determinism_check(seed)?);
            c
        }
        _ => {
            return Err(HarnessError::Usage(format!(
                "unknown suite `{name}` (expected one of {})",
                SUITES.join(", ")
            )))
        }
    };
    Ok(SuiteSummary {
        suite: name.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Exit code of [`run_suite`], mapping usage errors to 2.
pub fn suite_exit_code(result: &Result<SuiteSummary, HarnessError>) -> i32 {
    match result {
        Ok(s) => s.exit_code(),
        Err(HarnessError::Usage(_)) => EXIT_USAGE,
        Err(e) => e.exit_code(),
    }
}

fn random_coeffs(rng: &mut ChaCha8Rng, degree: usize) -> Vec<BigInt> {
    let mut c: Vec<BigInt> = (0..=degree).map(|_| BigInt::from(rng.gen_range(-9..=9))).collect();
    while c[degree].is_zero() {
        c[degree] = BigInt::from(rng.gen_range(-9..=9));
    }
    c
}

/// A separated system with `r` components of random degrees up to `max_degree`.
pub fn random_system(rng: &mut ChaCha8Rng, r: usize, max_degree: usize) -> SeparatedSystem {
    let mut pool: Vec<usize> = (1..=max_degree).collect();
    pool.shuffle(rng);
    let mut degrees: Vec<usize> = pool[..r].to_vec();
    degrees.sort_unstable();
    SeparatedSystem::validate(degrees.iter().map(|&d| random_coeffs(rng, d)).collect()).expect("separated")
}

fn subst(p: &IntPolynomial, var: &str, value: IntPolynomial) -> IntPolynomial {
    let mut map = HashMap::new();
    map.insert(var.to_string(), value);
    p.substitute(&map).expect("substitution")
}

/// Re-checks the differencing identities of one `phi` by multiplication.
fn univariate_identities(coeffs: &[BigInt]) -> Vec<String> {
    let mut fails = Vec::new();
    let phi = IntPolynomial::univariate("T", coeffs);
    let x = IntPolynomial::var("X");
    let y = IntPolynomial::var("Y");
    let z = IntPolynomial::var("Z");
    let at = |arg: IntPolynomial| subst(&phi, "T", arg);
    let tag = format!("phi = {phi}");
    match first_difference_chi(&phi) {
        Ok(chi) if &(&x - &y) * &chi == &at(x.clone()) - &at(y.clone()) => {}
        other => fails.push(format!("chi identity, {tag}: {other:?}")),
    }
    match shift_polynomial_rho(&phi) {
        Ok(rho) if &at(x.clone()) + &rho == at(&x + &y) => {}
        other => fails.push(format!("rho identity, {tag}: {other:?}")),
    }
    if coeffs.len() > 2 {
        let second = &(&at(&(&x + &y) - &z) + &at(z.clone())) - &(&at(x.clone()) + &at(y.clone()));
        match second_difference_psi(&phi) {
            Ok(psi) if &(&(&x - &z) * &(&y - &z)) * &psi == second => {}
            other => fails.push(format!("psi identity, {tag}: {other:?}")),
        }
    }
    fails
}

/// `det(phi_i'(x_j)) = V_r P`, the eliminant conditions and `Q(sigma_r - phi(Y)) = R prod (X_i - Y)`.
fn system_identities(sys: &SeparatedSystem, with_eliminant: bool) -> Vec<String> {
    let mut fails = Vec::new();
    let tag = format!("gamma = {sys}");
    match (derivative_determinant(sys), jacobian_cofactor(sys)) {
        (Ok(det), Ok(p)) if det == &vandermonde(sys.r()) * &p => {}
        other => fails.push(format!("det = V P, {tag}: {other:?}")),
    }
    if with_eliminant {
        match EliminationKit::build(sys) {
            Ok(kit) => {
                if let Err(e) = verify_eliminant(sys, &kit.eliminant) {
                    fails.push(format!("eliminant, {tag}: {e}"));
                }
                let lhs = shifted_eliminant(sys, &kit.eliminant);
                let rhs = &kit.quotient * &product_of_differences(&x_vars(sys.r()), "Y");
                if lhs.as_ref().ok() != Some(&rhs) || quotient_r(sys, &kit.eliminant).ok() != Some(kit.quotient.clone()) {
                    fails.push(format!("Q(sigma - phi(Y)) = R prod, {tag}"));
                }
            }
            Err(e) => fails.push(format!("eliminant build, {tag}: {e}")),
        }
    }
    fails
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityParams {
    /// Random univariate `phi` per degree.
    pub polys_per_degree: usize,
    pub max_degree: usize,
    /// Random separated systems for the determinant identity.
    pub systems: usize,
    /// Random systems (small degrees) for the eliminant identities.
    pub eliminant_systems: usize,
}

impl Default for IdentityParams {
    fn default() -> Self {
        IdentityParams {
            polys_per_degree: 6,
            max_degree: 8,
            systems: 12,
            eliminant_systems: 6,
        }
    }
}

pub fn identity_battery(params: &IdentityParams, seed: u64) -> Result<Vec<SuiteCheck>, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let battery = SeparatedSystem::battery();
    let mut uni: Vec<Vec<BigInt>> = battery
        .iter()
        .flat_map(|s| (0..s.r()).map(|i| s.coefficients(i).to_vec()).collect::<Vec<_>>())
        .collect();
    for d in 1..=params.max_degree {
        for _ in 0..params.polys_per_degree {
            uni.push(random_coeffs(&mut rng, d));
        }
    }
    let uni_fails: Vec<String> = uni.iter().flat_map(|c| univariate_identities(c)).collect();
    let mut systems: Vec<(SeparatedSystem, bool)> = battery.into_iter().map(|s| (s, true)).collect();
    for i in 0..params.systems {
        let r = 1 + i % 3;
        systems.push((random_system(&mut rng, r, params.max_degree), false));
    }
    for i in 0..params.eliminant_systems {
        let r = 1 + i % 2;
        systems.push((random_system(&mut rng, r, 4), true));
    }
    let sys_fails: Vec<String> = systems.iter().flat_map(|(s, q)| system_identities(s, *q)).collect();
    Ok(vec![
        SuiteCheck::new("differencing identities", uni.len(), uni_fails),
        SuiteCheck::new("jacobian and eliminant identities", systems.len(), sys_fails),
    ])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorParams {
    pub instances: usize,
    pub max_ground: i64,
    pub support: usize,
}

impl Default for OperatorParams {
    fn default() -> Self {
        OperatorParams {
            instances: 100,
            max_ground: 12,
            support: 8,
        }
    }
}

fn random_function(rng: &mut ChaCha8Rng, r: usize, support: usize, radius: i64) -> LatticeFunction {
    LatticeFunction::from_values((0..support).map(|_| {
        let p: Point = (0..r).map(|_| rng.gen_range(-radius..=radius)).collect();
        let v = BigRational::new(BigInt::from(rng.gen_range(-20..=20)), BigInt::from(rng.gen_range(1..=6)));
        (p, v)
    }))
}

fn random_ground(rng: &mut ChaCha8Rng, max: i64) -> GroundSet {
    let n = rng.gen_range(1..=max);
    let density = rng.gen_range(0.3..=1.0);
    let g = GroundSet::random(n, density, rng.gen());
    if g.is_empty() {
        GroundSet::range(1)
    } else {
        g
    }
}

/// Adjointness, convolution form, `|mu|_1 = |X|`, `|mu|_inf <= D` and mass conservation.
pub fn operator_battery(params: &OperatorParams, seed: u64) -> Result<Vec<SuiteCheck>, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0A);
    let battery = SeparatedSystem::battery();
    let mut fails = Vec::new();
    for i in 0..params.instances {
        let sys = &battery[i % battery.len()];
        let g = random_ground(&mut rng, params.max_ground);
        let r = sys.r();
        let f = random_function(&mut rng, r, params.support, 40);
        let h = random_function(&mut rng, r, params.support, 40);
        let sf = apply_s(sys, &g, &f)?;
        let ssh = apply_s_star(sys, &g, &h)?;
        let mu = curve_measure_mu(sys, &g)?;
        let size = BigRational::from_integer(BigInt::from(g.len()));
        let tag = format!("instance {i}, gamma = {sys}");
        if sf.inner(&h) != f.inner(&ssh) {
            fails.push(format!("adjointness, {tag}"));
        }
        if sf != mu.reflect().convolve(&f) || apply_s_star(sys, &g, &f)? != mu.convolve(&f) {
            fails.push(format!("convolution form, {tag}"));
        }
        if mu.l1_norm() != size {
            fails.push(format!("|mu|_1, {tag}"));
        }
        if mu.linf_norm() > BigRational::from_integer(BigInt::from(sys.total_degree())) {
            fails.push(format!("|mu|_inf, {tag}"));
        }
        if sf.total() != &size * f.total() || ssh.total() != &size * h.total() {
            fails.push(format!("mass conservation, {tag}"));
        }
    }
    Ok(vec![SuiteCheck::new("operator axioms", params.instances, fails)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleParams {
    /// Instances per guided enumerator.
    pub instances: usize,
    pub max_n: i64,
    /// Ceiling on `N` for `r = 3` case-3 instances.
    pub max_n_cubic: i64,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams {
            instances: 50,
            max_n: 60,
            max_n_cubic: 16,
        }
    }
}

/// Alternates uniform-box and realized targets so that both empty and
/// populated solution sets are exercised.
fn oracle_target(rng: &mut ChaCha8Rng, sys: &SeparatedSystem, g: &GroundSet, s: usize, i: usize) -> Vec<BigInt> {
    let policy = if i.is_multiple_of(2) {
        ASampling::UniformBox
    } else {
        ASampling::Realized
    };
    let t = sample_targets(&policy, sys, g, s, 1, rng.gen()).expect("sampling");
    t.into_iter()
        .next()
        .unwrap_or_else(|| vec![BigInt::one(); sys.r()])
}

pub fn oracle_battery(params: &OracleParams, seed: u64) -> Result<Vec<SuiteCheck>, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0B);
    let mut checks = Vec::new();

    let anchors = [([1i64, 3], 12u64, None), ([0, -4], 4, Some([0u64, 0, 4]))];
    let mut fails = Vec::new();
    for (a, want, parts) in anchors {
        let inst = SystemInstance::from_i64(SeparatedSystem::moment(2), GroundSet::range(4), 2, &a)?;
        let brute = brute_count(&inst, false)?.count;
        let guided = guided_count(&inst, false)?.tally.count;
        if brute != want || guided != want {
            fails.push(format!("J_2([4], {a:?}) = {brute} brute, {guided} guided, want {want}"));
        }
        if let Some(p) = parts {
            let got = case_partition(&inst, false)?.partition;
            if got != Some(p) {
                fails.push(format!("partition of {a:?}: {got:?}"));
            }
        }
    }
    checks.push(SuiteCheck::new("hand-checked anchors", anchors.len(), fails));

    // base case 1: r = s = 1
    let mut fails = Vec::new();
    for i in 0..params.instances {
        let sys = if i % 3 == 2 {
            random_system(&mut rng, 1, 4)
        } else {
            SeparatedSystem::monomials(&[2 + i % 2])
        };
        let g = random_ground(&mut rng, params.max_n);
        let a = oracle_target(&mut rng, &sys, &g, 1, i);
        let inst = SystemInstance::new(sys.clone(), g.clone(), 1, a.clone())?;
        let guided = guided_count_base1(sys.coefficients(0), &g, &a[0], false)?.count;
        let brute = brute_count(&inst, false)?.count;
        if guided != brute {
            fails.push(format!("{sys} on {} points, a = {a:?}: {guided} vs {brute}", g.len()));
        }
    }
    checks.push(SuiteCheck::new("base case 1 vs brute", params.instances, fails));

    // base case 2: r = s = 2, phi_1 linear
    let mut fails = Vec::new();
    for i in 0..params.instances {
        let sys = match i % 3 {
            0 => SeparatedSystem::moment(2),
            1 => SeparatedSystem::monomials(&[1, 3]),
            _ => {
                let lin = vec![BigInt::from(rng.gen_range(-3..=3)), BigInt::from(*[-2, -1, 1, 2, 3].choose(&mut rng).unwrap())];
                let d = rng.gen_range(2..=3);
                SeparatedSystem::validate(vec![lin, random_coeffs(&mut rng, d)]).expect("separated")
            }
        };
        let g = random_ground(&mut rng, params.max_n);
        let a = oracle_target(&mut rng, &sys, &g, 2, i);
        let inst = SystemInstance::new(sys.clone(), g.clone(), 2, a.clone())?;
        let guided = guided_count_base2(&sys, &g, &a, false)?.count;
        let brute = brute_count(&inst, false)?.count;
        if guided != brute {
            fails.push(format!("{sys} on {} points, a = {a:?}: {guided} vs {brute}", g.len()));
        }
    }
    checks.push(SuiteCheck::new("base case 2 vs brute", params.instances, fails));

    // case 3 of the s = r split, plus the assembled hybrid count
    let curves = [
        SeparatedSystem::moment(2),
        SeparatedSystem::monomials(&[1, 3]),
        SeparatedSystem::monomials(&[2, 3]),
        SeparatedSystem::moment(3),
    ];
    let kits: Vec<EliminationKit> = curves
        .iter()
        .map(EliminationKit::build)
        .collect::<Result<_, _>>()?;
    let mut fails = Vec::new();
    for i in 0..params.instances {
        let k = i % curves.len();
        let sys = &curves[k];
        let cap = if sys.r() == 3 { params.max_n_cubic } else { params.max_n };
        let g = random_ground(&mut rng, cap);
        let a = oracle_target(&mut rng, sys, &g, sys.r(), i);
        let inst = SystemInstance::new(sys.clone(), g.clone(), sys.r(), a.clone())?;
        let parts = case_partition(&inst, false)?.partition.expect("partition");
        let c3 = guided_count_case3(&inst, &kits[k], false)?.count;
        let total = guided_count(&inst, false)?.tally.count;
        let brute = brute_count(&inst, false)?.count;
        if c3 != parts[2] || total != brute {
            fails.push(format!(
                "{sys} on {} points, a = {a:?}: case 3 {c3} vs {}, total {total} vs {brute}",
                g.len(),
                parts[2]
            ));
        }
    }
    checks.push(SuiteCheck::new("case 3 vs brute", params.instances, fails));
    Ok(checks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlowParams {
    pub instances: usize,
    pub max_ground: i64,
    pub max_set: usize,
    pub max_depth: usize,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            instances: 100,
            max_ground: 40,
            max_set: 200,
            max_depth: 4,
        }
    }
}

/// Random `(E, F)` with positive pairing: `F` is drawn near the origin and
/// most of `E` from the translates `F + gamma(X)`.
pub fn random_pair(
    rng: &mut ChaCha8Rng,
    sys: &SeparatedSystem,
    g: &GroundSet,
    max_set: usize,
) -> Result<(PointSet, PointSet), HarnessError> {
    let pts = curve_points(sys, g)?;
    let r = sys.r();
    let (_, fbox) = extremal_witnesses(sys, g, WitnessKind::Box)?;
    let PointSet::Box { lo, hi } = fbox else { unreachable!() };
    let fsize = rng.gen_range(1..=max_set);
    let f: BTreeSet<Point> = (0..fsize)
        .map(|_| {
            (0..r)
                .map(|j| {
                    // shrink the box so translates overlap
                    let span = ((hi[j] - lo[j]) / 8).max(2);
                    rng.gen_range(lo[j]..=lo[j] + span)
                })
                .collect()
        })
        .collect();
    let mut reach: Vec<Point> = f
        .iter()
        .flat_map(|x| pts.iter().map(move |p| x.iter().zip(p).map(|(a, b)| a + b).collect()))
        .collect();
    reach.sort_unstable();
    reach.dedup();
    reach.shuffle(rng);
    let esize = rng.gen_range(1..=max_set);
    let mut e: BTreeSet<Point> = reach.into_iter().take(esize).collect();
    // a few unreachable points so thresholds bite
    for _ in 0..rng.gen_range(0..=esize / 4) {
        if e.len() >= max_set {
            break;
        }
        e.insert((0..r).map(|_| rng.gen_range(-1000..=1000)).collect());
    }
    Ok((PointSet::Explicit(e), PointSet::Explicit(f)))
}

/// Nesting, pointwise means and largeness on random instances.
pub fn flow_battery(params: &FlowParams, seed: u64) -> Result<SuiteCheck, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0C);
    let battery = SeparatedSystem::battery();
    let mut fails = Vec::new();
    let mut nontrivial = 0;
    for i in 0..params.instances {
        let sys = &battery[i % battery.len()];
        let g = random_ground(&mut rng, params.max_ground);
        let (e, f) = random_pair(&mut rng, sys, &g, params.max_set)?;
        let depth = rng.gen_range(0..=params.max_depth);
        let tower = flow(sys, &g, &e, &f, depth)?;
        if depth > 0 && tower.stages.last().is_some_and(|st| st.e_len > 0 && st.f_len > 0) {
            nontrivial += 1;
        }
        for c in tower.stage_checks.iter().filter(|c| !c.holds()) {
            let which: Vec<&str> = [
                (!c.nested).then_some("nesting"),
                (!c.left_mean.holds).then_some("left mean"),
                (!c.right_mean.holds).then_some("right mean"),
                (!c.largeness.holds).then_some("largeness"),
            ]
            .into_iter()
            .flatten()
            .collect();
            fails.push(format!("instance {i}, gamma = {sys}, stage {}: {}", c.j, which.join(", ")));
        }
    }
    Ok(SuiteCheck::new("flowing lemma", params.instances, fails).noted(format!("{nontrivial} with a nonempty last stage")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PruningParams {
    pub instances: usize,
    pub max_ground: i64,
    pub max_set: usize,
    pub max_s: usize,
    /// Instances on which every anchor is tried.
    pub anchor_instances: usize,
}

impl Default for PruningParams {
    fn default() -> Self {
        PruningParams {
            instances: 50,
            max_ground: 24,
            max_set: 120,
            max_s: 3,
            anchor_instances: 10,
        }
    }
}

/// Outcome counts beside the checks, for reporting.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PruningStats {
    pub towers: usize,
    pub generic_floor_reached: usize,
    pub union_checked: usize,
    pub union_skipped: usize,
}

pub fn pruning_battery(params: &PruningParams, seed: u64) -> Result<Vec<SuiteCheck>, HarnessError> {
    Ok(pruning_battery_with_stats(params, seed)?.0)
}

pub fn pruning_battery_with_stats(
    params: &PruningParams,
    seed: u64,
) -> Result<(Vec<SuiteCheck>, PruningStats), HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0D);
    let battery = SeparatedSystem::battery();
    let opts = TowerOptions::default();
    let mut stats = PruningStats::default();
    let (mut prune_fails, mut floor_fails, mut union_fails, mut anchor_fails) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut instances: Vec<(SeparatedSystem, GroundSet, PointSet, PointSet, usize)> = Vec::new();
    for i in 0..params.instances {
        let sys = battery[i % battery.len()].clone();
        let s = 1 + (i / battery.len()) % params.max_s;
        // smaller ground sets for deeper towers
        let cap = (params.max_ground >> (s - 1)).max(4);
        let g = random_ground(&mut rng, cap);
        let (e, f) = random_pair(&mut rng, &sys, &g, params.max_set)?;
        instances.push((sys, g, e, f, s));
    }
    // box witnesses on r = 1 curves reach the alpha, beta >= C branch
    for (k, n) in [(2usize, 40i64), (3, 40), (2, 60)] {
        let sys = SeparatedSystem::monomials(&[k]);
        let g = GroundSet::range(n);
        let (e, f) = extremal_witnesses(&sys, &g, WitnessKind::Box)?;
        instances.push((sys, g, e, f, 1));
    }
    for (i, (sys, g, e, f, s)) in instances.iter().enumerate() {
        let tag = format!("instance {i}, gamma = {sys}, s = {s}, |X| = {}", g.len());
        let tower = match build_tower_with(sys, g, e, f, *s, None, &opts) {
            Ok(t) => t,
            Err(crate::refinement::RefineError::EmptyAnchor(_)) => continue,
            Err(err) => return Err(err.into()),
        };
        stats.towers += 1;
        let rep = verify_pruning_bounds(&tower);
        let bad: Vec<&str> = rep
            .special_b
            .iter()
            .chain(&rep.special_a)
            .chain(&rep.size_floors)
            .filter(|q| !q.holds)
            .map(|q| q.label.as_str())
            .collect();
        if !bad.is_empty() || !rep.b1_special_empty {
            prune_fails.push(format!("{tag}: {}", bad.join("; ")));
        }
        if let Some(fl) = &rep.generic_floor {
            stats.generic_floor_reached += 1;
            if !fl.holds {
                floor_fails.push(format!("{tag}: {}", fl.label));
            }
        }
        let c = BigRational::from_integer(threshold_constant(*s, sys.degree_product()));
        debug_assert_eq!(rep.generic_floor.is_some(), tower.base.alpha >= c && tower.base.beta >= c);
        for u in union_bound_check(sys, g, &tower)? {
            match u.inequality {
                Some(q) => {
                    stats.union_checked += 1;
                    if !q.holds {
                        union_fails.push(format!("{tag}: {} ({:?} vs {})", q.label, q.lhs, q.rhs));
                    }
                }
                None => stats.union_skipped += 1,
            }
        }
        if i < params.anchor_instances {
            let sweep = anchor_sweep(sys, g, e, f, *s, &opts)?;
            if !sweep.agree {
                anchor_fails.push(tag.clone());
            }
        }
    }
    let n = stats.towers;
    Ok((
        vec![
            SuiteCheck::new("special-set bounds and size floors", n, prune_fails),
            SuiteCheck::new("generic floor above threshold", stats.generic_floor_reached, floor_fails),
            SuiteCheck::new("union bound against maxnumreps", stats.union_checked, union_fails),
            SuiteCheck::new("anchor invariance", params.anchor_instances.min(n), anchor_fails),
        ],
        stats,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaucityParams {
    pub sizes: Vec<i64>,
    pub samples: usize,
    pub seed: u64,
    pub slope_ceiling_millis: u32,
}

impl Default for PaucityParams {
    fn default() -> Self {
        PaucityParams {
            sizes: vec![20, 40, 80, 160],
            samples: 20,
            seed: 1,
            slope_ceiling_millis: (PAUCITY_SLOPE_CEILING * 1000.0) as u32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendOutcome {
    pub check: SuiteCheck,
    pub slope: Option<f64>,
}

/// `max_a J_2` on `[N]` for `(T, T^2)` with realized targets.
pub fn paucity_trend(params: &PaucityParams) -> Result<TrendOutcome, HarnessError> {
    let mut c = ExperimentConfig::new("moment:2", params.sizes.iter().map(|n| format!("range:{n}")).collect());
    c.a_sampling = ASampling::Realized;
    c.samples = params.samples;
    c.seed = params.seed;
    let rep = paucity_scan(&c)?;
    let slope = rep.summary["slope"].as_f64();
    let ceiling = params.slope_ceiling_millis as f64 / 1000.0;
    let fails = match slope {
        Some(v) if v <= ceiling => vec![],
        other => vec![format!("slope {other:?} above {ceiling}")],
    };
    let check = SuiteCheck::new("paucity slope", rep.rows.len(), fails).noted(match slope {
        Some(v) => format!("slope {v:.4}"),
        None => "no slope".to_string(),
    });
    Ok(TrendOutcome { check, slope })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImprovingParams {
    pub sizes: Vec<i64>,
    pub ratio_ceiling: f64,
    pub summand_floor: f64,
}

impl Default for ImprovingParams {
    fn default() -> Self {
        ImprovingParams {
            sizes: vec![8, 16, 32],
            ratio_ceiling: IMPROVING_RATIO_CEILING,
            summand_floor: IMPROVING_SUMMAND_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImprovingOutcome {
    pub check: SuiteCheck,
    pub max_ratio: f64,
    pub min_best_summand_ratio: f64,
}

/// Extremal witnesses against the conjectured bound for every battery curve.
pub fn improving_consistency(params: &ImprovingParams) -> Result<ImprovingOutcome, HarnessError> {
    let mut fails = Vec::new();
    let (mut max_ratio, mut min_best) = (0.0f64, f64::INFINITY);
    let mut cases = 0;
    for sys in SeparatedSystem::battery() {
        let degrees: Vec<String> = sys.degrees().iter().map(ToString::to_string).collect();
        let c = ExperimentConfig::new(
            format!("monomials:{}", degrees.join(",")),
            params.sizes.iter().map(|n| format!("range:{n}")).collect(),
        );
        let rep = improving_scan(&c)?;
        cases += rep.rows.len();
        let mr = rep.summary["max_ratio"].as_f64().unwrap_or(f64::INFINITY);
        let mb = rep.summary["min_best_summand_ratio"].as_f64().unwrap_or(0.0);
        max_ratio = max_ratio.max(mr);
        min_best = min_best.min(mb);
        if mr > params.ratio_ceiling {
            fails.push(format!("{sys}: ratio {mr} above {}", params.ratio_ceiling));
        }
        if mb < params.summand_floor {
            fails.push(format!("{sys}: best summand ratio {mb} below {}", params.summand_floor));
        }
    }
    let check = SuiteCheck::new("witness/bound consistency", cases, fails)
        .noted(format!("max ratio {max_ratio:.6}, min best summand ratio {min_best:.6}"));
    Ok(ImprovingOutcome {
        check,
        max_ratio,
        min_best_summand_ratio: min_best,
    })
}

/// Both scans, rendered to CSV and JSON on 1 and 4 threads, must match byte for byte.
pub fn determinism_check(seed: u64) -> Result<SuiteCheck, HarnessError> {
    let mut paucity = ExperimentConfig::new("moment:2", vec!["range:20".into(), "random:40,0.5,7".into()]);
    paucity.seed = seed;
    paucity.a_sampling = ASampling::Realized;
    let mut improving = ExperimentConfig::new("moment:3", vec!["range:8".into(), "random:16,0.5,7".into()]);
    improving.seed = seed;
    let render = |threads: usize| -> Result<Vec<String>, HarnessError> {
        with_threads(Some(threads), || {
            let a = paucity_scan(&paucity)?;
            let b = improving_scan(&improving)?;
            Ok(vec![a.to_csv()?, a.to_json(), b.to_csv()?, b.to_json()])
        })
    };
    let one = render(1)?;
    let four = render(4)?;
    let again = render(4)?;
    let fails = if one == four && four == again {
        vec![]
    } else {
        vec!["outputs differ across runs".to_string()]
    };
    Ok(SuiteCheck::new("determinism", one.len(), fails))
}
