//! Error-free-transform accumulation.

use std::cell::Cell;
use std::iter::Sum;
use std::ops::AddAssign;

/// Kahan-Babuska-Neumaier running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
    magnitude: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        self.magnitude += x.abs();
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// `sum |x_k| / |sum x_k|`, the factor by which rounding errors in the
    /// summands are amplified in the result. It is 1 for an empty sum.
    pub fn condition(&self) -> f64 {
        let v = self.value().abs();
        if self.magnitude == 0.0 {
            1.0
        } else if v == 0.0 {
            f64::INFINITY
        } else {
            self.magnitude / v
        }
    }
}

thread_local! {
    static WORST_CONDITION: Cell<f64> = const { Cell::new(1.0) };
}

/// Records the condition number of a finished sum on this thread.
pub fn record_condition(c: f64) {
    WORST_CONDITION.with(|w| w.set(w.get().max(c)));
}

/// Returns the largest condition number recorded on this thread since the
/// previous call, and resets it.
pub fn take_worst_condition() -> f64 {
    WORST_CONDITION.with(|w| w.replace(1.0))
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, x: f64) {
        self.add(x);
    }
}

impl Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(values: &[f64]) -> f64 {
    values.iter().copied().sum::<NeumaierSum>().value()
}
