pub mod averaging;
pub mod counting;
pub mod curve;
pub mod elimination;
pub mod harness;
pub mod poly;
pub mod refinement;
