//! A paucity scan and an improving scan rendered as CSV.

use paucity::harness::{improving_scan, paucity_scan, ASampling, ExperimentConfig, OutputFormat};

fn main() {
    let mut c = ExperimentConfig::new("moment:2", vec!["range:20".into(), "range:40".into()]);
    c.a_sampling = ASampling::Realized;
    c.samples = 5;
    c.seed = 1;
    let rep = paucity_scan(&c).unwrap();
    print!("{}", rep.render(OutputFormat::Csv).unwrap());
    println!("slope {}", rep.summary["slope"]);

    let c = ExperimentConfig::new("moment:3", vec!["range:8".into(), "range:16".into()]);
    print!("{}", improving_scan(&c).unwrap().render(OutputFormat::Csv).unwrap());
}
