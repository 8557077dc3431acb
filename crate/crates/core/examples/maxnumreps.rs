//! Largest representation count over targets with nonzero coordinates.

use paucity::counting::maxnumreps;
use paucity::curve::{GroundSet, SeparatedSystem};

fn main() {
    let sys = SeparatedSystem::moment(2);
    for n in [8, 16, 32] {
        for s in 1..=2 {
            let (m, arg) = maxnumreps(&sys, &GroundSet::range(n), s).unwrap();
            println!("N = {n}, s = {s}: {m} at {arg:?}");
        }
    }
}
