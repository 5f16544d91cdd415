//! Compensated summation. The moment passes add 10^5..10^7 nonnegative
//! terms; Kahan compensation keeps the accumulated error far below the
//! 1e-9 reporting precision regardless of term count.

#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Kahan { sum: 0.0, carry: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}
