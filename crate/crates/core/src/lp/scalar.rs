//! Number types the simplex engine runs over: `f64` for the guiding pass and
//! exact rationals for everything that is reported.

use std::fmt::Debug;

use num_traits::{Signed, Zero};

use crate::rational::{to_f64, Rational};

pub trait Scalar: Clone + Debug {
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self -= a * b`, flushing float noise to zero.
    fn sub_mul(&mut self, a: &Self, b: &Self);
    fn magnitude(&self) -> f64;
    /// Sign with tolerance `tol`; exact types ignore `tol`.
    fn sign(&self, tol: f64) -> i8;
    fn lt(&self, o: &Self) -> bool;
}

const FLUSH: f64 = 1e-14;

impl Scalar for f64 {
    const EXACT: bool = false;
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(q: &Rational) -> Self {
        to_f64(q)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
        if self.abs() < FLUSH {
            *self = 0.0;
        }
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn sign(&self, tol: f64) -> i8 {
        if *self > tol {
            1
        } else if *self < -tol {
            -1
        } else {
            0
        }
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        num_traits::One::one()
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        if !Zero::is_zero(a) && !Zero::is_zero(b) {
            *self -= a * b;
        }
    }
    fn magnitude(&self) -> f64 {
        to_f64(&self.abs())
    }
    fn sign(&self, _tol: f64) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
}
