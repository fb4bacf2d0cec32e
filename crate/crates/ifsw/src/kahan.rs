//! Compensated summation (Neumaier's variant of the Kahan algorithm).
//!
//! Several identities in this crate are asserted to near machine
//! precision over sums with 10⁵–10⁶ terms (holonomy defects, measure
//! masses). Naive summation would drown them in rounding noise; the
//! compensated sum keeps the error at a few ulps independently of the
//! number of terms.

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
