//! Brute force against the guided enumerators on the parabola.

use paucity::counting::{brute_count, case_partition, guided_count, SystemInstance};
use paucity::curve::{GroundSet, SeparatedSystem};

fn main() {
    for a in [[1, 3], [0, -4], [5, 45]] {
        let inst = SystemInstance::from_i64(SeparatedSystem::moment(2), GroundSet::range(4), 2, &a).unwrap();
        let brute = brute_count(&inst, false).unwrap().count;
        let guided = guided_count(&inst, true).unwrap();
        let parts = case_partition(&inst, false).unwrap().partition.unwrap();
        println!("a = {a:?}: brute {brute}, guided {} via {:?}, cases {parts:?}", guided.tally.count, guided.route);
        for w in guided.tally.witnesses.unwrap_or_default().iter().take(3) {
            println!("  {w:?}");
        }
    }
}
