//! Compensated (Neumaier) accumulation for real and complex sums.

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation. The correction term also
/// captures the case where the incoming value dominates the running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Component-wise compensated sum of complex values.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    /// Folds another partial sum in, carrying both its value and its
    /// pending correction.
    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.add(other.re.sum);
        self.re.add(other.re.comp);
        self.im.add(other.im.sum);
        self.im.add(other.im.comp);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    let mut acc = NeumaierSum::new();
    for x in iter {
        acc.add(x);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(xs), 2.0);
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
    }

    #[test]
    fn harmonic_sum_beats_naive() {
        let n = 1_000_000;
        let naive: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
        let comp = compensated_sum((1..=n).map(|k| 1.0 / k as f64));
        // H_n to 20 digits
        let exact = 14.392726722865723631;
        assert!((comp - exact).abs() <= (naive - exact).abs());
        assert!((comp - exact).abs() < 4e-15);
    }

    #[test]
    fn complex_merge_matches_single_pass() {
        let zs: Vec<Complex64> = (1..1000)
            .map(|k| Complex64::new(1.0 / k as f64, -(k as f64).sqrt()))
            .collect();
        let whole: ComplexSum = zs.iter().copied().collect();
        let mut left: ComplexSum = zs[..400].iter().copied().collect();
        let right: ComplexSum = zs[400..].iter().copied().collect();
        left.merge(&right);
        assert!((whole.value() - left.value()).norm() < 1e-12);
    }
}
