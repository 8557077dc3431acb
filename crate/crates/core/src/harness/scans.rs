//! Paucity and improving scans.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use super::config::{ASampling, ExperimentConfig};
use super::report::{CellStatus, Metadata, ScanReport, ScanRow};
use super::HarnessError;
use crate::averaging::{extremal_witnesses, pairing, ratio_from_parts, FExponent, WitnessKind};
use crate::counting::{brute_count_with_budget, guided_count_base1, guided_count_base2, CountError, SystemInstance};
use crate::curve::{big_to_f64, conjecture_rhs, conjecture_summands, GroundSet, SeparatedSystem};

/// Ceiling on the fitted log-log slope of `max_a J_2` against `N` for `(T, T^2)`.
pub const PAUCITY_SLOPE_CEILING: f64 = 1.3;

/// Every extremal witness satisfies `rwt_ratio <= C * conjecture_rhs`.
pub const IMPROVING_RATIO_CEILING: f64 = 1.0;

/// Some witness per ground set attains `rwt_ratio >= c * (its summand)`.
pub const IMPROVING_SUMMAND_FLOOR: f64 = 0.5;

fn cell_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn format_target(a: &[BigInt]) -> String {
    let parts: Vec<String> = a.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(","))
}

/// Targets for one ground set, sorted and distinct.
pub fn sample_targets(
    policy: &ASampling,
    sys: &SeparatedSystem,
    ground: &GroundSet,
    s: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<Vec<BigInt>>, HarnessError> {
    if let ASampling::Explicit { targets } = policy {
        let set: BTreeSet<Vec<BigInt>> = targets
            .iter()
            .map(|t| t.iter().map(|&v| BigInt::from(v)).collect())
            .collect();
        return Ok(set.into_iter().collect());
    }
    if ground.is_empty() || samples == 0 {
        return Ok(Vec::new());
    }
    let r = sys.r();
    let values: Vec<Vec<BigInt>> = ground.elements().iter().map(|&x| sys.evaluate_curve_i64(x)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BTreeSet::new();
    let attempts = 50 * samples;
    match policy {
        ASampling::UniformBox => {
            let bounds: Vec<i128> = (0..r)
                .map(|j| {
                    let m = values.iter().map(|v| v[j].abs()).max().unwrap_or_default();
                    (m * BigInt::from(s))
                        .to_i128()
                        .ok_or_else(|| HarnessError::Usage("target box too large to sample".into()))
                })
                .collect::<Result<_, _>>()?;
            for _ in 0..attempts {
                if out.len() == samples {
                    break;
                }
                let a: Vec<BigInt> = bounds.iter().map(|&b| BigInt::from(rng.gen_range(-b..=b))).collect();
                if a.iter().any(|v| !v.is_zero()) {
                    out.insert(a);
                }
            }
        }
        ASampling::Realized => {
            for _ in 0..attempts {
                if out.len() == samples {
                    break;
                }
                let mut a = vec![BigInt::zero(); r];
                for _ in 0..s {
                    let n = &values[rng.gen_range(0..values.len())];
                    let m = &values[rng.gen_range(0..values.len())];
                    for j in 0..r {
                        a[j] += &n[j] - &m[j];
                    }
                }
                if a.iter().any(|v| !v.is_zero()) {
                    out.insert(a);
                }
            }
        }
        ASampling::Explicit { .. } => unreachable!(),
    }
    Ok(out.into_iter().collect())
}

/// `J_s(a)`, through the divisor enumerators where they apply.
pub fn count_cell(inst: &SystemInstance, budget: u64) -> Result<u64, CountError> {
    let sys = &inst.system;
    let (r, s) = (sys.r(), inst.s);
    if !inst.is_homogeneous() {
        if r == 1 && s == 1 {
            return Ok(guided_count_base1(sys.coefficients(0), &inst.ground, &inst.a[0], false)?.count);
        }
        if r == 2 && s == 2 && sys.degrees()[0] == 1 {
            return Ok(guided_count_base2(sys, &inst.ground, &inst.a, false)?.count);
        }
    }
    Ok(brute_count_with_budget(inst, false, budget)?.count)
}

/// Least-squares slope of `log y` against `log x` over points with `y > 0`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// `J_s(a)` and `J_s(a) / |X|^{s-1}` for sampled targets on each ground set,
/// plus the log-log slope of `max_a J` against `N`.
pub fn paucity_scan(config: &ExperimentConfig) -> Result<ScanReport, HarnessError> {
    let (sys, grounds) = config.validate()?;
    let s = config.s.unwrap_or(sys.r());
    let mut cells = Vec::new();
    for (gi, g) in grounds.iter().enumerate() {
        let targets = sample_targets(&config.a_sampling, &sys, g, s, config.samples, cell_seed(config.seed, gi))?;
        cells.extend(targets.into_iter().map(|a| (gi, a)));
    }
    cells.sort_by(|x, y| (grounds[x.0].bound(), x.0, &x.1).cmp(&(grounds[y.0].bound(), y.0, &y.1)));
    let rows = cells
        .par_iter()
        .map(|(gi, a)| {
            let g = &grounds[*gi];
            let inst = SystemInstance::new(sys.clone(), g.clone(), s, a.clone())?;
            let trivial = num_traits::pow(BigInt::from(g.len()), s - 1);
            let mut row = ScanRow {
                n: g.bound(),
                set: config.sets[*gi].clone(),
                size_x: g.len(),
                label: format_target(a),
                exact: String::new(),
                value: None,
                bound: Some(big_to_f64(&trivial)),
                ratio: None,
                summand_ratio: None,
                status: CellStatus::Ok,
            };
            match count_cell(&inst, config.budget) {
                Ok(j) => {
                    row.exact = j.to_string();
                    row.value = Some(j as f64);
                    row.ratio = Some(j as f64 / big_to_f64(&trivial));
                }
                Err(CountError::BudgetExceeded { .. }) => row.status = CellStatus::BudgetExceeded,
                Err(e) => return Err(HarnessError::from(e)),
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let mut max_by_n: BTreeMap<i64, u64> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.status == CellStatus::Ok) {
        let j: u64 = row.exact.parse().expect("exact count");
        let e = max_by_n.entry(row.n).or_default();
        *e = (*e).max(j);
    }
    let points: Vec<(f64, f64)> = max_by_n.iter().map(|(&n, &j)| (n as f64, j as f64)).collect();
    let mut summary = BTreeMap::new();
    summary.insert("s".into(), json!(s));
    summary.insert("curve".into(), json!(sys.to_string()));
    summary.insert(
        "max_j".into(),
        json!(max_by_n.iter().map(|(n, j)| (n.to_string(), j.to_string())).collect::<BTreeMap<_, _>>()),
    );
    summary.insert("slope".into(), json!(loglog_slope(&points)));
    summary.insert(
        "budget_exceeded".into(),
        json!(rows.iter().filter(|r| r.status == CellStatus::BudgetExceeded).count()),
    );
    Ok(ScanReport {
        metadata: Metadata::new("paucity-scan", config.hash(), config.seed),
        summary,
        rows,
    })
}

/// `rwt_ratio` of each extremal witness against the conjectured bound at
/// `(p, q)`, per ground set.
pub fn improving_scan(config: &ExperimentConfig) -> Result<ScanReport, HarnessError> {
    let (sys, grounds) = config.validate()?;
    let (p, q) = config.exponents(sys.r())?;
    let d = sys.total_degree();
    conjecture_rhs(1, d, p, q)?;
    let kinds = if config.witnesses.is_empty() {
        vec![WitnessKind::Delta, WitnessKind::Curve, WitnessKind::Box]
    } else {
        config.witnesses.clone()
    };
    let mut cells: Vec<(usize, WitnessKind)> = (0..grounds.len())
        .filter(|&gi| !grounds[gi].is_empty())
        .flat_map(|gi| kinds.iter().map(move |&k| (gi, k)))
        .collect();
    cells.sort_by_key(|&(gi, k)| (grounds[gi].bound(), gi, k));
    let rows = cells
        .par_iter()
        .map(|&(gi, kind)| {
            let g = &grounds[gi];
            let (e, f) = extremal_witnesses(&sys, g, kind)?;
            let pr = pairing(&sys, g, &e, &f)?;
            let value = ratio_from_parts(&pr, g.len(), &e.len(), &f.len(), p, q, FExponent::DualQ);
            let rhs = conjecture_rhs(g.len() as u64, d, p, q)?;
            let summand = conjecture_summands(g.len() as u64, d, p, q)?[kind.summand_index()];
            Ok(ScanRow {
                n: g.bound(),
                set: config.sets[gi].clone(),
                size_x: g.len(),
                label: kind.name().to_string(),
                exact: pr.to_string(),
                value: Some(value),
                bound: Some(rhs),
                ratio: Some(value / rhs),
                summand_ratio: Some(value / summand),
                status: CellStatus::Ok,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let max_ratio = rows.iter().filter_map(|r| r.ratio).fold(0.0f64, f64::max);
    // per ground set, the best witness against its own summand
    let mut best: BTreeMap<(i64, &str), f64> = BTreeMap::new();
    for r in &rows {
        let e = best.entry((r.n, r.set.as_str())).or_insert(0.0);
        *e = e.max(r.summand_ratio.unwrap_or(0.0));
    }
    let min_best = best.values().cloned().fold(f64::INFINITY, f64::min);
    let mut summary = BTreeMap::new();
    summary.insert("curve".into(), json!(sys.to_string()));
    summary.insert("p".into(), json!(p.to_string()));
    summary.insert("q".into(), json!(q.to_string()));
    summary.insert("max_ratio".into(), json!(max_ratio));
    summary.insert("min_best_summand_ratio".into(), json!(min_best.is_finite().then_some(min_best)));
    Ok(ScanReport {
        metadata: Metadata::new("improving", config.hash(), config.seed),
        summary,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::brute_count;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(1.5))).collect();
        assert!((loglog_slope(&pts).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(loglog_slope(&pts[..1]), None);
        assert_eq!(loglog_slope(&[(1.0, 0.0), (2.0, 0.0)]), None);
    }

    #[test]
    fn sampled_targets_are_nonzero_and_deterministic() {
        let sys = SeparatedSystem::moment(2);
        let g = GroundSet::range(10);
        for policy in [ASampling::UniformBox, ASampling::Realized] {
            let a = sample_targets(&policy, &sys, &g, 2, 20, 5).unwrap();
            assert_eq!(a, sample_targets(&policy, &sys, &g, 2, 20, 5).unwrap());
            assert_eq!(a.len(), 20);
            assert!(a.iter().all(|t| t.iter().any(|v| !v.is_zero())));
            assert!(a.iter().all(|t| t[0].abs() <= BigInt::from(20) && t[1].abs() <= BigInt::from(200)));
        }
        let realized = sample_targets(&ASampling::Realized, &sys, &g, 2, 20, 5).unwrap();
        for a in realized {
            let inst = SystemInstance::new(sys.clone(), g.clone(), 2, a).unwrap();
            assert!(brute_count(&inst, false).unwrap().count >= 1);
        }
    }

    #[test]
    fn empty_sample_gives_empty_report() {
        let mut c = ExperimentConfig::new("moment:2", vec!["range:10".into()]);
        c.samples = 0;
        let rep = paucity_scan(&c).unwrap();
        assert!(rep.rows.is_empty());
        assert_eq!(rep.summary["slope"], serde_json::Value::Null);
    }

    #[test]
    fn square_scan_within_divisor_count() {
        let mut c = ExperimentConfig::new("monomials:2", vec!["range:30".into()]);
        c.a_sampling = ASampling::Realized;
        c.seed = 3;
        let rep = paucity_scan(&c).unwrap();
        assert!(!rep.rows.is_empty());
        for row in &rep.rows {
            let a: i64 = row.label.trim_matches(|c| c == '(' || c == ')').parse().unwrap();
            let d = (1..=a.abs()).filter(|k| a % k == 0).count() as u64;
            assert!(row.exact.parse::<u64>().unwrap() <= d, "{row:?}");
        }
    }

    #[test]
    fn count_cell_matches_brute() {
        let sys = SeparatedSystem::moment(2);
        let g = GroundSet::range(12);
        for a in [[1i64, 3], [0, -4], [2, 20], [5, 0]] {
            let inst = SystemInstance::from_i64(sys.clone(), g.clone(), 2, &a).unwrap();
            assert_eq!(count_cell(&inst, 1 << 30).unwrap(), brute_count(&inst, false).unwrap().count);
        }
    }

    #[test]
    fn improving_rows_and_exponent_errors() {
        let mut c = ExperimentConfig::new("moment:3", vec!["range:8".into(), "range:16".into()]);
        let rep = improving_scan(&c).unwrap();
        assert_eq!(rep.rows.len(), 6);
        assert_eq!(rep.summary["p"], "7/4");
        c.p = Some("3".into());
        assert!(matches!(improving_scan(&c), Err(HarnessError::Curve(_))));
    }

    #[test]
    fn random_ground_scan_is_byte_identical() {
        let mut c = ExperimentConfig::new("moment:2", vec!["random:24,0.5,7".into()]);
        c.seed = 7;
        let a = improving_scan(&c).unwrap().to_csv().unwrap();
        let b = super::super::with_threads(Some(1), || improving_scan(&c).unwrap().to_csv().unwrap());
        assert_eq!(a, b);
    }
}
