//! The method of refinements, run on explicit finite sets.
//!
//! [`flow`] builds nested pairs `E_j`, `F_j` by thresholding `S* 1_{F_j}` and
//! `S 1_{E_{j+1}}`. [`build_tower`] fixes an anchor `y` in `E_s` and grows the
//! tuple sets `B_t`, `A_t` with their generic and special parts. Every
//! inequality is checked in exact arithmetic and reported, never asserted.
//!
//! A tower tuple sits at `z = y - sum gamma(n) + sum gamma(m)`, so it solves
//! the counting system `sum (phi(n_i) - phi(m_i)) = a` with `a = y - z`.

use std::collections::{BTreeSet, HashSet};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::averaging::{curve_points, pairing, AvgError, Point, PointSet};
use crate::counting::{maxnumreps, CountError};
use crate::curve::{GroundSet, SeparatedSystem};
use crate::harness::report::{ser_display, ser_fraction, ser_opt_fraction};

pub const DEFAULT_TUPLE_BUDGET: u64 = 1_000_000;
pub const DEFAULT_WORK_BUDGET: u64 = 500_000_000;
/// Largest `E` or `F` that [`flow`] will materialize.
pub const SET_BUDGET: u64 = 4_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("E or F is empty")]
    EmptyBase,
    #[error("the curve is a single linear polynomial")]
    LinearCurveExcluded,
    #[error("E_{0} is empty, so there is no anchor")]
    EmptyAnchor(usize),
    #[error("anchor {0:?} is not in E_s")]
    InvalidAnchor(Point),
    #[error("s must be at least 1")]
    ZeroArity,
    #[error("tower construction examined more than {0} candidates")]
    WorkBudgetExceeded(u64),
    #[error(transparent)]
    Avg(#[from] AvgError),
    #[error(transparent)]
    Count(#[from] CountError),
}

fn frac(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn pow2(e: usize) -> BigRational {
    frac(BigInt::one() << e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "<=")]
    AtMost,
}

/// One checked inequality `lhs REL rhs`. A missing `lhs` is a minimum over an
/// empty set, so the inequality holds vacuously.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub label: String,
    #[serde(serialize_with = "ser_opt_fraction")]
    pub lhs: Option<BigRational>,
    pub relation: Relation,
    #[serde(serialize_with = "ser_fraction")]
    pub rhs: BigRational,
    pub holds: bool,
    /// `lhs - rhs` for `>=`, `rhs - lhs` for `<=`.
    #[serde(serialize_with = "ser_opt_fraction")]
    pub margin: Option<BigRational>,
}

impl Inequality {
    pub fn new(label: impl Into<String>, lhs: Option<BigRational>, relation: Relation, rhs: BigRational) -> Self {
        let margin = lhs.as_ref().map(|l| match relation {
            Relation::AtLeast => l - &rhs,
            Relation::AtMost => &rhs - l,
        });
        let holds = margin.as_ref().is_none_or(|m| !m.is_negative());
        Inequality {
            label: label.into(),
            lhs,
            relation,
            rhs,
            holds,
            margin,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub j: usize,
    #[serde(skip)]
    pub e: BTreeSet<Point>,
    #[serde(skip)]
    pub f: BTreeSet<Point>,
    pub e_len: usize,
    pub f_len: usize,
    #[serde(serialize_with = "ser_display")]
    pub pairing: BigInt,
}

/// The three flowing-lemma bounds at stage `j >= 1`, plus nesting.
#[derive(Debug, Clone, Serialize)]
pub struct StageCheck {
    pub j: usize,
    pub nested: bool,
    /// `min_{x in F_j} S 1_{E_j}(x) >= alpha / 2^j`.
    pub left_mean: Inequality,
    /// `min_{y in E_j} S* 1_{F_{j-1}}(y) >= beta / 2^j`.
    pub right_mean: Inequality,
    /// `<S 1_{E_j}, 1_{F_j}> >= 2^{-j} <S 1_{E_0}, 1_{F_0}>`.
    pub largeness: Inequality,
}

impl StageCheck {
    pub fn holds(&self) -> bool {
        self.nested && self.left_mean.holds && self.right_mean.holds && self.largeness.holds
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Base {
    pub e_len: usize,
    pub f_len: usize,
    #[serde(serialize_with = "ser_display")]
    pub pairing: BigInt,
    #[serde(serialize_with = "ser_fraction")]
    pub alpha: BigRational,
    #[serde(serialize_with = "ser_fraction")]
    pub beta: BigRational,
}

/// Which part of a tower level a tuple belongs to. `Outside` tuples descend
/// from a special parent and are in neither split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Generic,
    Special,
    Outside,
}

impl Class {
    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TowerTuple {
    pub m: Vec<i64>,
    pub n: Vec<i64>,
    pub class: Class,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LevelCounts {
    pub total: u64,
    pub generic: u64,
    pub special: u64,
}

impl LevelCounts {
    fn from_classes(c: [u64; 3]) -> Self {
        LevelCounts {
            total: c.iter().sum(),
            generic: c[0],
            special: c[1],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Level {
    pub t: usize,
    pub b: LevelCounts,
    pub a: LevelCounts,
    /// `B_t` tuples: `m` has `t - 1` entries, `n` has `t`.
    #[serde(skip)]
    pub b_tuples: Option<Vec<TowerTuple>>,
    #[serde(skip)]
    pub a_tuples: Option<Vec<TowerTuple>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementTower {
    /// Flow depth; equals `s` for a tower.
    pub depth: usize,
    pub degree_product: u64,
    pub ground_len: usize,
    pub base: Base,
    pub stages: Vec<Stage>,
    pub stage_checks: Vec<StageCheck>,
    pub anchor: Option<Point>,
    pub levels: Vec<Level>,
    /// False when the tuple budget was hit and only counts were kept.
    pub materialized: bool,
}

impl RefinementTower {
    pub fn flow_holds(&self) -> bool {
        self.stage_checks.iter().all(StageCheck::holds)
    }

    pub fn e(&self, j: usize) -> &BTreeSet<Point> {
        &self.stages[j].e
    }

    pub fn f(&self, j: usize) -> &BTreeSet<Point> {
        &self.stages[j].f
    }
}

fn add(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `S 1_E(x) = #{n : x + gamma(n) in E}`.
fn s_count(pts: &[Point], e: &HashSet<&Point>, x: &[i64]) -> usize {
    pts.iter().filter(|g| e.contains(&add(x, g))).count()
}

/// `S* 1_F(y) = #{n : y - gamma(n) in F}`.
fn s_star_count(pts: &[Point], f: &HashSet<&Point>, y: &[i64]) -> usize {
    pts.iter().filter(|g| f.contains(&sub(y, g))).count()
}

fn explicit_pairing(pts: &[Point], e: &BTreeSet<Point>, f: &BTreeSet<Point>) -> BigInt {
    let eh: HashSet<&Point> = e.iter().collect();
    BigInt::from(f.par_iter().map(|x| s_count(pts, &eh, x)).sum::<usize>())
}

/// `count >= P / (2^{j} size0)`, compared as integers.
fn meets(count: usize, j: usize, size0: usize, p: &BigInt) -> bool {
    (BigInt::from(count) * BigInt::from(size0)) << j >= *p
}

/// Nested pairs `E_0 ⊇ ... ⊇ E_J`, `F_0 ⊇ ... ⊇ F_J` with
/// `E_{j+1} = {y in E_j : S* 1_{F_j}(y) >= beta / 2^{j+1}}` and
/// `F_{j+1} = {x in F_j : S 1_{E_{j+1}}(x) >= alpha / 2^{j+1}}`.
///
/// The pointwise bounds hold by construction. The largeness bound is checked
/// and reported; thresholding alone does not guarantee it.
pub fn flow(
    sys: &SeparatedSystem,
    ground: &GroundSet,
    e: &PointSet,
    f: &PointSet,
    depth: usize,
) -> Result<RefinementTower, RefineError> {
    if e.is_empty() || f.is_empty() {
        return Err(RefineError::EmptyBase);
    }
    let p0 = pairing(sys, ground, e, f)?;
    let pts = curve_points(sys, ground)?;
    let e0 = e.materialize(SET_BUDGET)?;
    let f0 = f.materialize(SET_BUDGET)?;
    let (ne, nf) = (e0.len(), f0.len());
    let alpha = BigRational::new(p0.clone(), BigInt::from(nf));
    let beta = BigRational::new(p0.clone(), BigInt::from(ne));
    let mut stages = vec![Stage {
        j: 0,
        e_len: ne,
        f_len: nf,
        e: e0,
        f: f0,
        pairing: p0.clone(),
    }];
    for j in 0..depth {
        let prev = stages.last().unwrap();
        let fh: HashSet<&Point> = prev.f.iter().collect();
        let e_next: BTreeSet<Point> = prev
            .e
            .par_iter()
            .filter(|y| meets(s_star_count(&pts, &fh, y), j + 1, ne, &p0))
            .cloned()
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        let eh: HashSet<&Point> = e_next.iter().collect();
        let f_next: BTreeSet<Point> = prev
            .f
            .par_iter()
            .filter(|x| meets(s_count(&pts, &eh, x), j + 1, nf, &p0))
            .cloned()
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        let pr = explicit_pairing(&pts, &e_next, &f_next);
        stages.push(Stage {
            j: j + 1,
            e_len: e_next.len(),
            f_len: f_next.len(),
            e: e_next,
            f: f_next,
            pairing: pr,
        });
    }
    let stage_checks = (1..=depth)
        .map(|j| check_stage(&pts, &stages, j, &alpha, &beta, &p0))
        .collect();
    Ok(RefinementTower {
        depth,
        degree_product: sys.degree_product(),
        ground_len: ground.len(),
        base: Base {
            e_len: ne,
            f_len: nf,
            pairing: p0,
            alpha,
            beta,
        },
        stages,
        stage_checks,
        anchor: None,
        levels: Vec::new(),
        materialized: true,
    })
}

fn check_stage(
    pts: &[Point],
    stages: &[Stage],
    j: usize,
    alpha: &BigRational,
    beta: &BigRational,
    p0: &BigInt,
) -> StageCheck {
    let (cur, prev) = (&stages[j], &stages[j - 1]);
    let nested = cur.e.is_subset(&prev.e) && cur.f.is_subset(&prev.f);
    let eh: HashSet<&Point> = cur.e.iter().collect();
    let fh: HashSet<&Point> = prev.f.iter().collect();
    let left = cur.f.par_iter().map(|x| s_count(pts, &eh, x)).min();
    let right = cur.e.par_iter().map(|y| s_star_count(pts, &fh, y)).min();
    StageCheck {
        j,
        nested,
        left_mean: Inequality::new(
            format!("min S1_E{j} on F{j} >= alpha/2^{j}"),
            left.map(frac),
            Relation::AtLeast,
            alpha / pow2(j),
        ),
        right_mean: Inequality::new(
            format!("min S*1_F{} on E{j} >= beta/2^{j}", j - 1),
            right.map(frac),
            Relation::AtLeast,
            beta / pow2(j),
        ),
        largeness: Inequality::new(
            format!("<S1_E{j}, 1_F{j}> >= P/2^{j}"),
            Some(frac(cur.pairing.clone())),
            Relation::AtLeast,
            frac(p0.clone()) / pow2(j),
        ),
    }
}

/// True when `phi(a) = phi(b)` for some component `phi`.
pub fn values_collide(sys: &SeparatedSystem, a: i64, b: i64) -> bool {
    let (va, vb) = (sys.evaluate_curve_i64(a), sys.evaluate_curve_i64(b));
    va.iter().zip(&vb).any(|(x, y)| x == y)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TowerOptions {
    pub tuple_budget: u64,
    pub work_budget: u64,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            tuple_budget: DEFAULT_TUPLE_BUDGET,
            work_budget: DEFAULT_WORK_BUDGET,
        }
    }
}

/// Flow to depth `s`, then grow the tower from the lexicographically
/// smallest point of `E_s`.
pub fn build_tower(
    sys: &SeparatedSystem,
    ground: &GroundSet,
    e: &PointSet,
    f: &PointSet,
    s: usize,
) -> Result<RefinementTower, RefineError> {
    build_tower_with(sys, ground, e, f, s, None, &TowerOptions::default())
}

pub fn build_tower_with(
    sys: &SeparatedSystem,
    ground: &GroundSet,
    e: &PointSet,
    f: &PointSet,
    s: usize,
    anchor: Option<Point>,
    opts: &TowerOptions,
) -> Result<RefinementTower, RefineError> {
    check_tower_input(sys, s)?;
    let mut tower = flow(sys, ground, e, f, s)?;
    grow(sys, ground, &mut tower, anchor, opts)?;
    Ok(tower)
}

fn check_tower_input(sys: &SeparatedSystem, s: usize) -> Result<(), RefineError> {
    if sys.r() == 1 && sys.degrees()[0] == 1 {
        return Err(RefineError::LinearCurveExcluded);
    }
    if s == 0 {
        return Err(RefineError::ZeroArity);
    }
    Ok(())
}

type RawTuple = (Vec<usize>, Vec<usize>, Class);

#[derive(Default)]
struct Acc {
    b: Vec<[u64; 3]>,
    a: Vec<[u64; 3]>,
    b_tuples: Vec<Vec<RawTuple>>,
    a_tuples: Vec<Vec<RawTuple>>,
}

impl Acc {
    fn new(s: usize) -> Self {
        Acc {
            b: vec![[0; 3]; s],
            a: vec![[0; 3]; s],
            b_tuples: vec![Vec::new(); s],
            a_tuples: vec![Vec::new(); s],
        }
    }

    fn merge(&mut self, other: Acc) {
        for (x, y) in self.b.iter_mut().zip(&other.b).chain(self.a.iter_mut().zip(&other.a)) {
            for k in 0..3 {
                x[k] += y[k];
            }
        }
        for (x, y) in self
            .b_tuples
            .iter_mut()
            .zip(other.b_tuples)
            .chain(self.a_tuples.iter_mut().zip(other.a_tuples))
        {
            x.extend(y);
        }
    }
}

struct Grower<'a> {
    s: usize,
    pts: &'a [Point],
    y: &'a [i64],
    e_sets: Vec<HashSet<&'a Point>>,
    f_sets: Vec<HashSet<&'a Point>>,
    work: AtomicU64,
    work_budget: u64,
    aborted: AtomicBool,
    stored: AtomicU64,
    tuple_budget: u64,
    overflow: AtomicBool,
}

impl Grower<'_> {
    fn tick(&self) -> bool {
        if self.work.fetch_add(1, Ordering::Relaxed) >= self.work_budget {
            self.aborted.store(true, Ordering::Relaxed);
        }
        self.aborted.load(Ordering::Relaxed)
    }

    fn store(&self, into: &mut Vec<RawTuple>, m: &[usize], n: &[usize], class: Class) {
        if self.overflow.load(Ordering::Relaxed) {
            return;
        }
        if self.stored.fetch_add(1, Ordering::Relaxed) >= self.tuple_budget {
            self.overflow.store(true, Ordering::Relaxed);
            return;
        }
        into.push((m.to_vec(), n.to_vec(), class));
    }

    fn distinct(&self, i: usize, j: usize) -> bool {
        self.pts[i].iter().zip(&self.pts[j]).all(|(a, b)| a != b)
    }

    /// Extend `(m; n)` at point `z` by `n_t` into `B_t`.
    fn grow_b(&self, t: usize, m: &mut Vec<usize>, n: &mut Vec<usize>, z: &[i64], parent: Class, acc: &mut Acc) {
        let target = &self.f_sets[self.s - t];
        for k in 0..self.pts.len() {
            if self.tick() {
                return;
            }
            let zz = sub(z, &self.pts[k]);
            if !target.contains(&zz) {
                continue;
            }
            let class = match parent {
                Class::Generic if m.iter().all(|&mj| self.distinct(k, mj)) => Class::Generic,
                Class::Generic => Class::Special,
                _ => Class::Outside,
            };
            n.push(k);
            self.add_b(t, m, n, &zz, class, acc);
            n.pop();
        }
    }

    fn add_b(&self, t: usize, m: &mut Vec<usize>, n: &mut Vec<usize>, z: &[i64], class: Class, acc: &mut Acc) {
        acc.b[t - 1][class.index()] += 1;
        self.store(&mut acc.b_tuples[t - 1], m, n, class);
        self.grow_a(t, m, n, z, class, acc);
    }

    /// Extend `(m; n)` in `B_t` by `m_t` into `A_t`.
    fn grow_a(&self, t: usize, m: &mut Vec<usize>, n: &mut Vec<usize>, z: &[i64], parent: Class, acc: &mut Acc) {
        let target = &self.e_sets[self.s - t];
        for k in 0..self.pts.len() {
            if self.tick() {
                return;
            }
            let zz = add(z, &self.pts[k]);
            if !target.contains(&zz) {
                continue;
            }
            let class = match parent {
                Class::Generic => {
                    let generic = if t == 1 {
                        self.distinct(k, n[0])
                    } else {
                        n[..t - 1].iter().all(|&nj| self.distinct(k, nj)) && zz != self.y
                    };
                    if generic {
                        Class::Generic
                    } else {
                        Class::Special
                    }
                }
                _ => Class::Outside,
            };
            m.push(k);
            acc.a[t - 1][class.index()] += 1;
            self.store(&mut acc.a_tuples[t - 1], m, n, class);
            if t < self.s {
                self.grow_b(t + 1, m, n, &zz, class, acc);
            }
            m.pop();
        }
    }
}

fn grow(
    sys: &SeparatedSystem,
    ground: &GroundSet,
    tower: &mut RefinementTower,
    anchor: Option<Point>,
    opts: &TowerOptions,
) -> Result<(), RefineError> {
    let s = tower.depth;
    let es = tower.e(s);
    let y = match anchor {
        Some(y) if es.contains(&y) => y,
        Some(y) => return Err(RefineError::InvalidAnchor(y)),
        None => es.iter().next().cloned().ok_or(RefineError::EmptyAnchor(s))?,
    };
    let pts = curve_points(sys, ground)?;
    let grower = Grower {
        s,
        pts: &pts,
        y: &y,
        e_sets: tower.stages.iter().map(|st| st.e.iter().collect()).collect(),
        f_sets: tower.stages.iter().map(|st| st.f.iter().collect()).collect(),
        work: AtomicU64::new(0),
        work_budget: opts.work_budget,
        aborted: AtomicBool::new(false),
        stored: AtomicU64::new(0),
        tuple_budget: opts.tuple_budget,
        overflow: AtomicBool::new(false),
    };
    // B_1 roots in ground order; each subtree is independent
    let roots: Vec<usize> = (0..pts.len())
        .filter(|&k| grower.f_sets[s - 1].contains(&sub(&y, &pts[k])))
        .collect();
    let parts: Vec<Acc> = roots
        .par_iter()
        .map(|&k| {
            let mut acc = Acc::new(s);
            let z = sub(&y, &pts[k]);
            grower.add_b(1, &mut Vec::new(), &mut vec![k], &z, Class::Generic, &mut acc);
            acc
        })
        .collect();
    if grower.aborted.load(Ordering::Relaxed) {
        return Err(RefineError::WorkBudgetExceeded(opts.work_budget));
    }
    let mut total = Acc::new(s);
    for p in parts {
        total.merge(p);
    }
    let materialized = !grower.overflow.load(Ordering::Relaxed);
    let el = ground.elements();
    let convert = |raw: Vec<RawTuple>| -> Vec<TowerTuple> {
        let mut v: Vec<TowerTuple> = raw
            .into_iter()
            .map(|(m, n, class)| TowerTuple {
                m: m.iter().map(|&i| el[i]).collect(),
                n: n.iter().map(|&i| el[i]).collect(),
                class,
            })
            .collect();
        v.sort_by(|a, b| (&a.n, &a.m).cmp(&(&b.n, &b.m)));
        v
    };
    let mut b_tuples = total.b_tuples.into_iter();
    let mut a_tuples = total.a_tuples.into_iter();
    tower.levels = (1..=s)
        .map(|t| {
            let (bt, at) = (b_tuples.next().unwrap(), a_tuples.next().unwrap());
            Level {
                t,
                b: LevelCounts::from_classes(total.b[t - 1]),
                a: LevelCounts::from_classes(total.a[t - 1]),
                b_tuples: materialized.then(|| convert(bt)),
                a_tuples: materialized.then(|| convert(at)),
            }
        })
        .collect();
    tower.anchor = Some(y);
    tower.materialized = materialized;
    Ok(())
}

/// `C = 2^{s+1} (s+1) K`.
pub fn threshold_constant(s: usize, degree_product: u64) -> BigInt {
    (BigInt::from(s + 1) * BigInt::from(degree_product)) << (s + 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct PruningReport {
    /// `|B_{t+1}^sp| <= t K |A_t^g|` for `t = 1..s-1`.
    pub special_b: Vec<Inequality>,
    /// `|A_t^sp| <= (t+1) K |B_t^g|` for `t = 1..s`.
    pub special_a: Vec<Inequality>,
    pub b1_special_empty: bool,
    /// `|B_1| >= beta/2^s` and `|A_t| >= (alpha beta)^t / 2^{2(s + ... + (s-t+1))}`.
    pub size_floors: Vec<Inequality>,
    /// `|A_1^g| >= alpha beta / 2^{2s+1}`, present when `alpha, beta >= C`.
    pub generic_floor: Option<Inequality>,
}

impl PruningReport {
    pub fn verdicts(&self) -> Vec<bool> {
        let mut v: Vec<bool> = self
            .special_b
            .iter()
            .chain(&self.special_a)
            .chain(&self.size_floors)
            .chain(&self.generic_floor)
            .map(|i| i.holds)
            .collect();
        v.push(self.b1_special_empty);
        v
    }

    pub fn holds(&self) -> bool {
        self.verdicts().into_iter().all(|b| b)
    }
}

pub fn verify_pruning_bounds(tower: &RefinementTower) -> PruningReport {
    let s = tower.depth;
    let k = tower.degree_product;
    let lv = &tower.levels;
    let special_b = (1..s)
        .map(|t| {
            Inequality::new(
                format!("|B{}^sp| <= {t}K|A{t}^g|", t + 1),
                Some(frac(lv[t].b.special)),
                Relation::AtMost,
                frac(t as u64 * k * lv[t - 1].a.generic),
            )
        })
        .collect();
    let special_a = (1..=s)
        .map(|t| {
            Inequality::new(
                format!("|A{t}^sp| <= {}K|B{t}^g|", t + 1),
                Some(frac(lv[t - 1].a.special)),
                Relation::AtMost,
                frac((t as u64 + 1) * k * lv[t - 1].b.generic),
            )
        })
        .collect();
    let (alpha, beta) = (&tower.base.alpha, &tower.base.beta);
    let ab = alpha * beta;
    let mut size_floors = vec![Inequality::new(
        format!("|B1| >= beta/2^{s}"),
        Some(frac(lv[0].b.total)),
        Relation::AtLeast,
        beta / pow2(s),
    )];
    let mut exponent = 0;
    let mut power = BigRational::one();
    for t in 1..=s {
        exponent += 2 * (s + 1 - t);
        power *= &ab;
        size_floors.push(Inequality::new(
            format!("|A{t}| >= (alpha beta)^{t}/2^{exponent}"),
            Some(frac(lv[t - 1].a.total)),
            Relation::AtLeast,
            &power / pow2(exponent),
        ));
    }
    let c = frac(threshold_constant(s, k));
    let generic_floor = (*alpha >= c && *beta >= c).then(|| {
        Inequality::new(
            format!("|A1^g| >= alpha beta/2^{}", 2 * s + 1),
            Some(frac(lv[0].a.generic)),
            Relation::AtLeast,
            &ab / pow2(2 * s + 1),
        )
    });
    PruningReport {
        special_b,
        special_a,
        b1_special_empty: lv[0].b.special == 0 && lv[0].b.total == lv[0].b.generic,
        size_floors,
        generic_floor,
    }
}

/// `|A_t^g| <= maxnumreps_t · |E_{s-t}|` for one level.
#[derive(Debug, Clone, Serialize)]
pub struct UnionBound {
    pub t: usize,
    pub maxreps: Option<u64>,
    pub inequality: Option<Inequality>,
    /// Why the level was not checked (counting budget).
    pub skipped: Option<String>,
}

pub fn union_bound_check(
    sys: &SeparatedSystem,
    ground: &GroundSet,
    tower: &RefinementTower,
) -> Result<Vec<UnionBound>, RefineError> {
    let s = tower.depth;
    tower
        .levels
        .iter()
        .map(|lv| {
            let t = lv.t;
            match maxnumreps(sys, ground, t) {
                Ok((mr, _)) => Ok(UnionBound {
                    t,
                    maxreps: Some(mr),
                    inequality: Some(Inequality::new(
                        format!("|A{t}^g| <= maxnumreps_{t} |E{}|", s - t),
                        Some(frac(lv.a.generic)),
                        Relation::AtMost,
                        frac(mr) * frac(tower.stages[s - t].e_len),
                    )),
                    skipped: None,
                }),
                Err(e @ CountError::BudgetExceeded { .. }) => Ok(UnionBound {
                    t,
                    maxreps: None,
                    inequality: None,
                    skipped: Some(e.to_string()),
                }),
                Err(e) => Err(e.into()),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct AnchorSweep {
    pub anchors: usize,
    pub agree: bool,
    pub verdicts: Vec<(Point, Vec<bool>)>,
}

/// Rebuild the tower from every `y in E_s` and compare pruning verdicts.
pub fn anchor_sweep(
    sys: &SeparatedSystem,
    ground: &GroundSet,
    e: &PointSet,
    f: &PointSet,
    s: usize,
    opts: &TowerOptions,
) -> Result<AnchorSweep, RefineError> {
    check_tower_input(sys, s)?;
    let base = flow(sys, ground, e, f, s)?;
    let anchors: Vec<Point> = base.e(s).iter().cloned().collect();
    if anchors.is_empty() {
        return Err(RefineError::EmptyAnchor(s));
    }
    let verdicts = anchors
        .into_iter()
        .map(|y| {
            let mut tower = base.clone();
            grow(sys, ground, &mut tower, Some(y.clone()), opts)?;
            Ok((y, verify_pruning_bounds(&tower).verdicts()))
        })
        .collect::<Result<Vec<_>, RefineError>>()?;
    let agree = verdicts.windows(2).all(|w| w[0].1 == w[1].1);
    Ok(AnchorSweep {
        anchors: verdicts.len(),
        agree,
        verdicts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `alpha < C`: `alpha^s beta^{s-1} <= C^s |X|^{s-1}`.
    SmallAlpha,
    /// `beta < C`.
    SmallBeta,
    Tower,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub s: usize,
    pub degree_product: u64,
    #[serde(serialize_with = "ser_display")]
    pub threshold: BigInt,
    pub ground_len: usize,
    #[serde(serialize_with = "ser_display")]
    pub e_len: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub f_len: BigInt,
    #[serde(serialize_with = "ser_display")]
    pub pairing: BigInt,
    #[serde(serialize_with = "ser_fraction")]
    pub alpha: BigRational,
    #[serde(serialize_with = "ser_fraction")]
    pub beta: BigRational,
    pub branch: Branch,
    /// `alpha^s beta^{s-1}`.
    #[serde(serialize_with = "ser_fraction")]
    pub lhs: BigRational,
    /// `alpha^s beta^s`.
    #[serde(serialize_with = "ser_fraction")]
    pub lhs_full: BigRational,
    /// `maxnumreps_{s-1}`; zero when `s = 1`.
    pub maxreps: u64,
    /// `(|X|^{s-1} + |X| maxnumreps_{s-1}) |E|`.
    #[serde(serialize_with = "ser_display")]
    pub rhs: BigInt,
    /// `lhs / rhs`.
    #[serde(serialize_with = "ser_fraction")]
    pub constant: BigRational,
    pub tower: Option<RefinementTower>,
    pub pruning: Option<PruningReport>,
    pub union: Option<Vec<UnionBound>>,
    pub anchors: Option<AnchorSweep>,
}

impl Certificate {
    /// Every checked inequality in the tower branch holds.
    pub fn checks_hold(&self) -> bool {
        let flow_ok = self.tower.as_ref().is_none_or(RefinementTower::flow_holds);
        let prune_ok = self.pruning.as_ref().is_none_or(PruningReport::holds);
        let union_ok = self
            .union
            .iter()
            .flatten()
            .all(|u| u.inequality.as_ref().is_none_or(|i| i.holds));
        let anchor_ok = self.anchors.as_ref().is_none_or(|a| a.agree);
        flow_ok && prune_ok && union_ok && anchor_ok
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CertificateOptions {
    pub tower: TowerOptions,
    pub exhaustive_anchor: bool,
}

pub fn refinement_certificate(
    sys: &SeparatedSystem,
    ground: &GroundSet,
    e: &PointSet,
    f: &PointSet,
    s: usize,
) -> Result<Certificate, RefineError> {
    refinement_certificate_with(sys, ground, e, f, s, &CertificateOptions::default())
}

pub fn refinement_certificate_with(
    sys: &SeparatedSystem,
    ground: &GroundSet,
    e: &PointSet,
    f: &PointSet,
    s: usize,
    opts: &CertificateOptions,
) -> Result<Certificate, RefineError> {
    check_tower_input(sys, s)?;
    if e.is_empty() || f.is_empty() {
        return Err(RefineError::EmptyBase);
    }
    let (e_len, f_len) = (e.len(), f.len());
    let p = pairing(sys, ground, e, f)?;
    let alpha = BigRational::new(p.clone(), f_len.clone());
    let beta = BigRational::new(p.clone(), e_len.clone());
    let k = sys.degree_product();
    let threshold = threshold_constant(s, k);
    let c = frac(threshold.clone());
    let branch = if alpha < c {
        Branch::SmallAlpha
    } else if beta < c {
        Branch::SmallBeta
    } else {
        Branch::Tower
    };
    let lhs = num_traits::pow(alpha.clone(), s) * num_traits::pow(beta.clone(), s - 1);
    let lhs_full = &lhs * &beta;
    let maxreps = if s == 1 { 0 } else { maxnumreps(sys, ground, s - 1)?.0 };
    let x = BigInt::from(ground.len());
    let rhs = (num_traits::pow(x.clone(), s - 1) + &x * BigInt::from(maxreps)) * &e_len;
    let constant = &lhs / frac(rhs.clone());
    let (mut tower, mut pruning, mut union, mut anchors) = (None, None, None, None);
    if branch == Branch::Tower {
        let built = build_tower_with(sys, ground, e, f, s, None, &opts.tower)?;
        pruning = Some(verify_pruning_bounds(&built));
        union = Some(union_bound_check(sys, ground, &built)?);
        if opts.exhaustive_anchor {
            anchors = Some(anchor_sweep(sys, ground, e, f, s, &opts.tower)?);
        }
        tower = Some(built);
    }
    Ok(Certificate {
        s,
        degree_product: k,
        threshold,
        ground_len: ground.len(),
        e_len,
        f_len,
        pairing: p,
        alpha,
        beta,
        branch,
        lhs,
        lhs_full,
        maxreps,
        rhs,
        constant,
        tower,
        pruning,
        union,
        anchors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averaging::{extremal_witnesses, WitnessKind};
    use num_traits::Zero;

    fn set(points: &[&[i64]]) -> PointSet {
        PointSet::explicit(points.iter().map(|p| p.to_vec()))
    }

    fn line(points: &[i64]) -> PointSet {
        PointSet::explicit(points.iter().map(|&p| vec![p]))
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn flow_first_stage() {
        let sys = SeparatedSystem::from_i64(&[&[0, 1]]).unwrap();
        let ground = GroundSet::from_elements(vec![1, 2]).unwrap();
        let t = flow(&sys, &ground, &line(&[0, 1, 2, 3]), &line(&[0, 1]), 1).unwrap();
        let want: BTreeSet<Point> = [1, 2, 3].iter().map(|&v| vec![v]).collect();
        assert_eq!(t.e(1), &want);
        assert_eq!(t.base.pairing, BigInt::from(4));
        assert!(t.flow_holds());
    }

    #[test]
    fn flow_zero_pairing_and_depth_zero() {
        let sys = SeparatedSystem::moment(2);
        let ground = GroundSet::range(3);
        let e = set(&[&[100, 100]]);
        let f = set(&[&[0, 0], &[1, 1]]);
        let t = flow(&sys, &ground, &e, &f, 3).unwrap();
        for j in 0..=3 {
            assert_eq!(t.stages[j].e_len, 1);
            assert_eq!(t.stages[j].f_len, 2);
        }
        assert!(t.flow_holds());
        let t = flow(&sys, &ground, &e, &f, 0).unwrap();
        assert_eq!(t.stages.len(), 1);
        assert!(t.stage_checks.is_empty());
        assert_eq!(
            flow(&sys, &ground, &PointSet::explicit([]), &f, 1).unwrap_err(),
            RefineError::EmptyBase
        );
    }

    #[test]
    fn square_tower_s1() {
        let sys = SeparatedSystem::from_i64(&[&[0, 0, 1]]).unwrap();
        let ground = GroundSet::range(3);
        let e = line(&[0, 1, 4, 9]);
        let t = build_tower(&sys, &ground, &e, &e, 1).unwrap();
        let rep = verify_pruning_bounds(&t);
        assert!(rep.holds(), "{rep:?}");
        assert!(rep.b1_special_empty);
        assert!(frac(t.levels[0].b.total) >= &t.base.beta / pow2(1));
        // brute: B_1 = {n : y - n^2 in F}, A_1 = {(m, n) : y - n^2 + m^2 in E}
        let y = t.anchor.clone().unwrap()[0];
        let pts: Vec<i64> = (1..=3).map(|v| v * v).collect();
        let contains = |v: i64| [0, 1, 4, 9].contains(&v);
        let b1 = pts.iter().filter(|&&g| contains(y - g)).count() as u64;
        let a1 = pts
            .iter()
            .flat_map(|&gn| pts.iter().map(move |&gm| (gn, gm)))
            .filter(|&(gn, gm)| contains(y - gn) && contains(y - gn + gm))
            .count() as u64;
        assert_eq!(t.levels[0].b.total, b1);
        assert_eq!(t.levels[0].a.total, a1);
        let tuples = t.levels[0].a_tuples.as_ref().unwrap();
        assert_eq!(tuples.len() as u64, a1);
        assert!(tuples.iter().all(|tt| (tt.class == Class::Special) == (tt.m == tt.n)));
    }

    #[test]
    fn classification_examples() {
        let sq = SeparatedSystem::from_i64(&[&[0, 0, 1]]).unwrap();
        assert!(values_collide(&sq, 2, 2));
        assert!(!values_collide(&sq, 2, 1));
        let shifted = SeparatedSystem::from_i64(&[&[0, -4, 1]]).unwrap();
        assert!(values_collide(&shifted, 1, 3));
    }

    #[test]
    fn linear_curve_excluded() {
        let sys = SeparatedSystem::from_i64(&[&[0, 1]]).unwrap();
        let ground = GroundSet::range(3);
        let e = line(&[0, 1]);
        assert_eq!(
            build_tower(&sys, &ground, &e, &e, 1).unwrap_err(),
            RefineError::LinearCurveExcluded
        );
    }

    #[test]
    fn empty_anchor_when_pairing_vanishes() {
        let sys = SeparatedSystem::moment(2);
        let ground = GroundSet::range(3);
        let e = set(&[&[100, 100]]);
        let f = set(&[&[0, 0]]);
        // zero thresholds keep E, so the anchor exists but B_1 is empty
        let t = build_tower(&sys, &ground, &e, &f, 2).unwrap();
        assert_eq!(t.levels[0].b.total, 0);
        assert!(verify_pruning_bounds(&t).holds());
    }

    #[test]
    fn moment_tower_s2_matches_brute() {
        let sys = SeparatedSystem::moment(2);
        let ground = GroundSet::range(6);
        let (e, f) = extremal_witnesses(&sys, &ground, WitnessKind::Box).unwrap();
        let t = build_tower(&sys, &ground, &e, &f, 2).unwrap();
        assert!(t.flow_holds());
        assert!(verify_pruning_bounds(&t).holds());
        let y = t.anchor.clone().unwrap();
        let pts = curve_points(&sys, &ground).unwrap();
        let (e1, f1, e0, f0) = (t.e(1), t.f(1), t.e(0), t.f(0));
        let mut a2 = 0u64;
        for n1 in &pts {
            let z = sub(&y, n1);
            if !f1.contains(&z) {
                continue;
            }
            for m1 in &pts {
                let z = add(&z, m1);
                if !e1.contains(&z) {
                    continue;
                }
                for n2 in &pts {
                    let z = sub(&z, n2);
                    if !f0.contains(&z) {
                        continue;
                    }
                    a2 += pts.iter().filter(|m2| e0.contains(&add(&z, m2))).count() as u64;
                }
            }
        }
        assert_eq!(t.levels[1].a.total, a2);
        let stored = t.levels[1].a_tuples.as_ref().unwrap();
        for tt in stored.iter().filter(|tt| tt.class == Class::Generic) {
            let (sm, sn) = (
                tt.m.iter().map(|&v| sys.evaluate_curve_i64(v)).fold(vec![BigInt::zero(); 2], |a, b| {
                    a.iter().zip(&b).map(|(x, y)| x + y).collect()
                }),
                tt.n.iter().map(|&v| sys.evaluate_curve_i64(v)).fold(vec![BigInt::zero(); 2], |a, b| {
                    a.iter().zip(&b).map(|(x, y)| x + y).collect()
                }),
            );
            assert_ne!(sm, sn);
            assert!(!values_collide(&sys, tt.m[1], tt.n[0]));
            assert!(!values_collide(&sys, tt.n[1], tt.m[0]));
        }
    }

    #[test]
    fn tuple_budget_keeps_counts() {
        let sys = SeparatedSystem::moment(2);
        let ground = GroundSet::range(6);
        let (e, f) = extremal_witnesses(&sys, &ground, WitnessKind::Box).unwrap();
        let full = build_tower(&sys, &ground, &e, &f, 2).unwrap();
        let opts = TowerOptions {
            tuple_budget: 5,
            ..TowerOptions::default()
        };
        let capped = build_tower_with(&sys, &ground, &e, &f, 2, None, &opts).unwrap();
        assert!(!capped.materialized);
        assert!(capped.levels[1].a_tuples.is_none());
        assert_eq!(
            full.levels.iter().map(|l| (l.a, l.b)).collect::<Vec<_>>(),
            capped.levels.iter().map(|l| (l.a, l.b)).collect::<Vec<_>>()
        );
        let opts = TowerOptions {
            work_budget: 10,
            ..TowerOptions::default()
        };
        assert_eq!(
            build_tower_with(&sys, &ground, &e, &f, 2, None, &opts).unwrap_err(),
            RefineError::WorkBudgetExceeded(10)
        );
    }

    #[test]
    fn certificate_small_alpha() {
        let sys = SeparatedSystem::moment(2);
        let ground = GroundSet::range(50);
        let origin = set(&[&[0, 0]]);
        let c = refinement_certificate(&sys, &ground, &origin, &origin, 2).unwrap();
        assert_eq!(c.branch, Branch::SmallAlpha);
        assert!(c.lhs.is_zero());
        assert!(c.constant.is_zero());
    }

    #[test]
    fn certificate_curve_witness() {
        let sys = SeparatedSystem::moment(2);
        let ground = GroundSet::range(20);
        let (e, f) = extremal_witnesses(&sys, &ground, WitnessKind::Curve).unwrap();
        let c = refinement_certificate(&sys, &ground, &e, &f, 2).unwrap();
        assert_eq!(c.alpha, q(20, 1));
        assert_eq!(c.beta, q(1, 1));
        assert_eq!(c.maxreps, 1);
        assert_eq!(c.rhs, BigInt::from(800));
        assert_eq!(c.constant, q(1, 2));
        assert!(c.constant <= frac(1024));
    }

    #[test]
    fn certificate_singleton_ground() {
        let sys = SeparatedSystem::moment(2);
        let ground = GroundSet::from_elements(vec![3]).unwrap();
        for s in 1..=3 {
            let (e, f) = extremal_witnesses(&sys, &ground, WitnessKind::Curve).unwrap();
            let c = refinement_certificate(&sys, &ground, &e, &f, s).unwrap();
            assert!(c.constant <= frac(3));
        }
    }

    #[test]
    fn threshold_formula() {
        assert_eq!(threshold_constant(2, 2), BigInt::from(48));
        assert_eq!(threshold_constant(1, 1), BigInt::from(8));
    }

    #[test]
    fn certificate_serializes_fractions() {
        let sys = SeparatedSystem::moment(2);
        let ground = GroundSet::range(20);
        let (e, f) = extremal_witnesses(&sys, &ground, WitnessKind::Curve).unwrap();
        let c = refinement_certificate(&sys, &ground, &e, &f, 2).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["constant"], "1/2");
        assert_eq!(v["alpha"], "20/1");
        assert_eq!(v["branch"], "small_alpha");
    }
}
