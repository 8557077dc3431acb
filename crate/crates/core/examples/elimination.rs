//! Eliminant and quotient for (T^2, T^3) by resultants and for (T, T^2, T^3) by Newton.

use paucity::curve::SeparatedSystem;
use paucity::elimination::EliminationKit;

fn main() {
    for sys in [SeparatedSystem::monomials(&[2, 3]), SeparatedSystem::moment(3)] {
        let kit = EliminationKit::build(&sys).unwrap();
        println!("{sys} ({:?})", kit.strategy);
        println!("  Q = {}", kit.eliminant);
        println!("  R = {}", kit.quotient);
    }
}
