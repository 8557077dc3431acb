//! Differencing polynomials attached to a univariate `phi`.
//!
//! Each cofactor is obtained by exact polynomial division, so the defining
//! identity holds by construction and can be re-checked independently.

use std::collections::HashMap;

use super::{IntPolynomial, PolyError};

fn compose(phi: &IntPolynomial, arg: IntPolynomial) -> Result<IntPolynomial, PolyError> {
    let active = phi.active_vars();
    match active.as_slice() {
        [] => Ok(phi.clone()),
        [v] => {
            let mut map = HashMap::new();
            map.insert(v.clone(), arg);
            // drop any inactive variables so they do not leak into the result
            let coeffs = phi.univariate_coeffs()?;
            IntPolynomial::univariate(v, &coeffs).substitute(&map)
        }
        _ => Err(PolyError::NotUnivariate(active)),
    }
}

fn degree(phi: &IntPolynomial) -> Result<usize, PolyError> {
    Ok(phi.univariate_coeffs()?.len() - 1)
}

/// `chi(X, Y)` with `(X - Y) chi(X, Y) = phi(X) - phi(Y)`.
pub fn first_difference_chi(phi: &IntPolynomial) -> Result<IntPolynomial, PolyError> {
    let d = degree(phi)?;
    if d < 1 {
        return Err(PolyError::DegreeTooLow(d));
    }
    let x = IntPolynomial::var("X");
    let y = IntPolynomial::var("Y");
    let diff = &compose(phi, x.clone())? - &compose(phi, y.clone())?;
    diff.exact_divide(&(&x - &y))
}

/// `rho(X, Y)` with `phi(X + Y) = phi(X) + rho(X, Y)`.
pub fn shift_polynomial_rho(phi: &IntPolynomial) -> Result<IntPolynomial, PolyError> {
    let d = degree(phi)?;
    if d < 1 {
        return Err(PolyError::DegreeTooLow(d));
    }
    let x = IntPolynomial::var("X");
    let y = IntPolynomial::var("Y");
    let shifted = compose(phi, &x + &y)?;
    Ok((&shifted - &compose(phi, x)?).with_vars(&["X", "Y"]))
}

/// `psi(X, Y, Z)` with
/// `phi(X + Y - Z) + phi(Z) - phi(X) - phi(Y) = (X - Z)(Y - Z) psi(X, Y, Z)`.
pub fn second_difference_psi(phi: &IntPolynomial) -> Result<IntPolynomial, PolyError> {
    let d = degree(phi)?;
    if d < 2 {
        return Err(PolyError::DegreeTooLow(d));
    }
    let x = IntPolynomial::var("X");
    let y = IntPolynomial::var("Y");
    let z = IntPolynomial::var("Z");
    let lhs = &(&compose(phi, &(&x + &y) - &z)? + &compose(phi, z.clone())?)
        - &(&compose(phi, x.clone())? + &compose(phi, y.clone())?);
    let factor = &(&x - &z) * &(&y - &z);
    Ok(lhs.exact_divide(&factor)?.with_vars(&["X", "Y", "Z"]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn t_poly(coeffs: &[i64]) -> IntPolynomial {
        let c: Vec<BigInt> = coeffs.iter().map(|&v| BigInt::from(v)).collect();
        IntPolynomial::univariate("T", &c)
    }
    fn x() -> IntPolynomial {
        IntPolynomial::var("X")
    }
    fn y() -> IntPolynomial {
        IntPolynomial::var("Y")
    }
    fn k(v: i64) -> IntPolynomial {
        IntPolynomial::constant(v)
    }

    #[test]
    fn chi_examples() {
        assert_eq!(
            first_difference_chi(&t_poly(&[0, 0, 0, 1])).unwrap(),
            x().pow(2) + x() * y() + y().pow(2)
        );
        assert_eq!(first_difference_chi(&t_poly(&[0, 1])).unwrap(), k(1));
        assert_eq!(first_difference_chi(&t_poly(&[0, -4, 1])).unwrap(), x() + y() - k(4));
    }

    #[test]
    fn rho_examples() {
        assert_eq!(
            shift_polynomial_rho(&t_poly(&[0, 0, 1])).unwrap(),
            k(2) * x() * y() + y().pow(2)
        );
        assert_eq!(shift_polynomial_rho(&t_poly(&[0, 1])).unwrap(), y());
        assert_eq!(
            shift_polynomial_rho(&t_poly(&[0, 0, 0, 1])).unwrap(),
            k(3) * x().pow(2) * y() + k(3) * x() * y().pow(2) + y().pow(3)
        );
    }

    #[test]
    fn psi_examples() {
        assert_eq!(second_difference_psi(&t_poly(&[0, 0, 1])).unwrap(), k(2));
        assert_eq!(second_difference_psi(&t_poly(&[0, 0, 0, 1])).unwrap(), k(3) * (x() + y()));
        assert_eq!(
            second_difference_psi(&t_poly(&[0, 1])),
            Err(PolyError::DegreeTooLow(1))
        );
    }

    #[test]
    fn constant_phi_rejected() {
        assert_eq!(first_difference_chi(&t_poly(&[5])), Err(PolyError::DegreeTooLow(0)));
    }
}
