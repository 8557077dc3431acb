//! Flow, tower and certificate for the box witness of the parabola.

use paucity::averaging::{extremal_witnesses, WitnessKind};
use paucity::curve::{GroundSet, SeparatedSystem};
use paucity::refinement::{refinement_certificate, verify_pruning_bounds};

fn main() {
    let sys = SeparatedSystem::monomials(&[2]);
    let ground = GroundSet::range(40);
    let (e, f) = extremal_witnesses(&sys, &ground, WitnessKind::Box).unwrap();
    let cert = refinement_certificate(&sys, &ground, &e, &f, 1).unwrap();
    println!("alpha = {}, beta = {}, C = {}, branch {:?}", cert.alpha, cert.beta, cert.threshold, cert.branch);
    if let Some(tower) = &cert.tower {
        for level in &tower.levels {
            println!("level {}: B {:?}, A {:?}", level.t, level.b, level.a);
        }
        println!("pruning bounds hold: {}", verify_pruning_bounds(tower).holds());
    }
    println!("lhs {} <= constant * rhs {}: constant {}", cert.lhs, cert.rhs, cert.constant);
}
