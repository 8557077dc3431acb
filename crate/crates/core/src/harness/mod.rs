//! Scans, acceptance bundles and report files.

pub mod config;
pub mod report;
pub mod scans;
pub mod suite;

use thiserror::Error;

use crate::averaging::AvgError;
use crate::counting::CountError;
use crate::curve::CurveError;
use crate::elimination::ElimError;
use crate::refinement::RefineError;

pub use config::{ASampling, ExperimentConfig, OutputFormat};
pub use report::{ScanReport, ScanRow};
pub use scans::{improving_scan, paucity_scan};
pub use suite::{run_suite, SuiteSummary};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
    #[error("check failed: {0}")]
    Assertion(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Avg(#[from] AvgError),
    #[error(transparent)]
    Elim(#[from] ElimError),
    #[error(transparent)]
    Refine(#[from] RefineError),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        let budget = |c: &CountError| matches!(c, CountError::BudgetExceeded { .. });
        let usage = |c: &CountError| {
            matches!(
                c,
                CountError::ZeroShift
                    | CountError::DimensionMismatch { .. }
                    | CountError::EmptyGround
                    | CountError::ZeroArity
                    | CountError::ArityNotR { .. }
                    | CountError::StrategyInapplicable(_)
            )
        };
        match self {
            HarnessError::Usage(_) | HarnessError::Curve(_) => EXIT_USAGE,
            HarnessError::Count(c) if usage(c) => EXIT_USAGE,
            HarnessError::Refine(RefineError::LinearCurveExcluded | RefineError::ZeroArity) => EXIT_USAGE,
            HarnessError::Count(c) if budget(c) => EXIT_BUDGET,
            HarnessError::Avg(AvgError::TooLarge(_)) => EXIT_BUDGET,
            HarnessError::Elim(ElimError::DegreeBudgetExceeded { .. }) => EXIT_BUDGET,
            HarnessError::Refine(RefineError::WorkBudgetExceeded(_))
            | HarnessError::Refine(RefineError::Avg(AvgError::TooLarge(_))) => EXIT_BUDGET,
            HarnessError::Refine(RefineError::Count(c)) if budget(c) => EXIT_BUDGET,
            _ => EXIT_ASSERTION,
        }
    }
}

/// Runs `f` on a dedicated pool of `threads` workers (`None` = rayon default).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Usage("x".into()).exit_code(), EXIT_USAGE);
        let b = CountError::BudgetExceeded { needed: 2, budget: 1 };
        assert_eq!(HarnessError::Count(b.clone()).exit_code(), EXIT_BUDGET);
        assert_eq!(HarnessError::Refine(RefineError::Count(b)).exit_code(), EXIT_BUDGET);
        assert_eq!(HarnessError::Assertion("x".into()).exit_code(), EXIT_ASSERTION);
        assert_eq!(HarnessError::Count(CountError::ZeroShift).exit_code(), EXIT_USAGE);
        assert_eq!(HarnessError::Count(CountError::ZeroTarget).exit_code(), EXIT_ASSERTION);
    }

    #[test]
    fn pool_size() {
        assert_eq!(with_threads(Some(3), rayon::current_num_threads), 3);
    }
}
