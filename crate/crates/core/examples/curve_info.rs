//! Degrees, constants and default exponents for the standard battery.

use paucity::curve::SeparatedSystem;
use paucity::elimination::jacobian_cofactor;
use paucity::harness::ExperimentConfig;

fn main() {
    for sys in SeparatedSystem::battery() {
        let (p, q) = ExperimentConfig::new("", vec![]).exponents(sys.r()).unwrap();
        println!(
            "{sys}: D = {}, K = {}, p = {p}, q = {q}, P = {}",
            sys.total_degree(),
            sys.degree_product(),
            jacobian_cofactor(&sys).unwrap()
        );
    }
}
