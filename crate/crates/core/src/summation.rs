//! Compensated summation.
//!
//! [`NeumaierSum`] carries a running correction term so that adding many
//! values of mixed magnitude loses at most a couple of ulps overall instead of
//! one rounding error per addition.

use std::iter::Sum;
use std::ops::{Add, AddAssign};

use crate::Real;

/// Kahan-Babuska (Neumaier) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum<T> {
    sum: T,
    compensation: T,
}

impl<T: Real> NeumaierSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            compensation: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn total(&self) -> T {
        self.sum + self.compensation
    }
}

impl<T: Real> AddAssign<T> for NeumaierSum<T> {
    fn add_assign(&mut self, rhs: T) {
        NeumaierSum::add(self, rhs);
    }
}

impl<T: Real> Add<T> for NeumaierSum<T> {
    type Output = Self;

    fn add(mut self, rhs: T) -> Self {
        self += rhs;
        self
    }
}

impl<T: Real> Sum<T> for NeumaierSum<T> {
    fn sum<I: Iterator<Item = T>>(iter: I) -> Self {
        iter.fold(NeumaierSum::new(), |acc, x| acc + x)
    }
}

/// Compensated sum of an iterator.
pub fn compensated_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    values.into_iter().sum::<NeumaierSum<T>>().total()
}
