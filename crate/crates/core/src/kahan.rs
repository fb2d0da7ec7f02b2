//! Compensated (Kahan) summation.

use std::ops::{Add, Sub};

/// Two-term compensated accumulator. Works for `f64` and `Complex64`
/// (compensation is componentwise for complex addition).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum<T> {
    sum: T,
    compensation: T,
}

impl<T> KahanSum<T>
where
    T: Copy + Default + Add<Output = T> + Sub<Output = T>,
{
    pub fn new() -> Self {
        Self { sum: T::default(), compensation: T::default() }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensates_small_terms() {
        let mut k = KahanSum::<f64>::new();
        k.add(1.0);
        for _ in 0..10_000_000 {
            k.add(1e-16);
        }
        // Naive summation loses all of the 1e-16 contributions.
        assert!((k.value() - (1.0 + 1e-9)).abs() < 1e-12);
    }
}
