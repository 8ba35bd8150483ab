/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    /// Associative merge of two partial sums.
    pub fn merge(mut self, other: NeumaierSum) -> NeumaierSum {
        self.add(other.sum);
        self.add(other.comp);
        self
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sum whose result does not depend on the order of `values`: terms are
/// sorted before compensated accumulation.
pub fn order_independent_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let mut acc = NeumaierSum::default();
    for &v in values.iter() {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensation_recovers_small_terms() {
        let mut acc = NeumaierSum::default();
        for v in [1.0, 1e100, 1.0, -1e100] {
            acc.add(v);
        }
        assert_eq!(acc.value(), 2.0);
    }

    #[test]
    fn permutation_invariant() {
        let mut a = vec![0.1, 1e16, -3.3, 2.2, -1e16, 7.0];
        let mut b = vec![7.0, -1e16, 2.2, 0.1, -3.3, 1e16];
        assert_eq!(order_independent_sum(&mut a), order_independent_sum(&mut b));
    }
}
