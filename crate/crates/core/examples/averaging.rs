//! The averaging operators, their measure and the restricted weak-type ratio of each witness.

use num_bigint::BigInt;
use num_rational::BigRational;
use paucity::averaging::{
    apply_s, apply_s_star, curve_measure_mu, extremal_witnesses, pairing, rwt_ratio, FExponent, LatticeFunction,
    WitnessKind,
};
use paucity::curve::{conjecture_summands, Exponent, GroundSet, SeparatedSystem};

fn main() {
    let sys = SeparatedSystem::moment(2);
    let ground = GroundSet::range(6);
    let f = LatticeFunction::from_values([(vec![0, 0], BigRational::from_integer(BigInt::from(3)))]);
    let sf = apply_s(&sys, &ground, &f).unwrap();
    let ssf = apply_s_star(&sys, &ground, &f).unwrap();
    let mu = curve_measure_mu(&sys, &ground).unwrap();
    println!("|S f| support {}, |S* f| support {}, |mu|_1 = {}", sf.support_size(), ssf.support_size(), mu.l1_norm());

    let p = Exponent::parse("5/3").unwrap();
    let q = p.dual();
    let summands = conjecture_summands(ground.len() as u64, sys.total_degree(), p, q).unwrap();
    for kind in [WitnessKind::Delta, WitnessKind::Curve, WitnessKind::Box] {
        let (e, f) = extremal_witnesses(&sys, &ground, kind).unwrap();
        let pr = pairing(&sys, &ground, &e, &f).unwrap();
        let ratio = rwt_ratio(&sys, &ground, &e, &f, p, q, FExponent::DualQ).unwrap();
        println!("{kind:?}: pairing {pr}, ratio {ratio:.4}, summand {:.4}", summands[kind.summand_index()]);
    }
}
