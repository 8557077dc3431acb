//! First difference, shift and second difference of a cubic.

use num_bigint::BigInt;
use paucity::poly::{first_difference_chi, second_difference_psi, shift_polynomial_rho, IntPolynomial};

fn main() {
    let coeffs: Vec<BigInt> = [1, -2, 0, 3].into_iter().map(BigInt::from).collect();
    let phi = IntPolynomial::univariate("T", &coeffs);
    println!("phi = {phi}");
    println!("chi = {}", first_difference_chi(&phi).unwrap());
    println!("rho = {}", shift_polynomial_rho(&phi).unwrap());
    println!("psi = {}", second_difference_psi(&phi).unwrap());
}
