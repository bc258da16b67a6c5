//! Weight vectors p = (p_1, ..., p_n), sum zero, stored as integer
//! numerators over the fixed denominator 2n so that single-box shifts
//! p_l -> p_l + delta_{l,i} - 1/n stay integral.

use crate::field::{FieldMode, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight {
    n: usize,
    /// num[i] = 2n * p_{i+1}
    num: Vec<i64>,
}

impl Weight {
    /// Vacuum weight: the barycentric coordinates of the Weyl vector,
    /// p_i = (n+1)/2 - i.
    pub fn vacuum(n: usize) -> Self {
        let num = (1..=n)
            .map(|i| (n as i64) * (n as i64 + 1) - 2 * (n as i64) * i as i64)
            .collect();
        Weight { n, num }
    }

    /// Weight with integer entries (must sum to zero).
    pub fn from_integers(p: &[i64]) -> Self {
        assert_eq!(p.iter().sum::<i64>(), 0, "weight entries must sum to zero");
        let n = p.len();
        Weight {
            n,
            num: p.iter().map(|v| 2 * n as i64 * v).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Shift by one box in row i (1-based): p_l += delta_{l,i} - 1/n.
    pub fn add_box(&self, row: usize) -> Weight {
        assert!((1..=self.n).contains(&row));
        let mut num = self.num.clone();
        for (l, v) in num.iter_mut().enumerate() {
            *v -= 2;
            if l + 1 == row {
                *v += 2 * self.n as i64;
            }
        }
        Weight { n: self.n, num }
    }

    /// p_i - p_j, guaranteed integral on module weights.
    pub fn p_diff(&self, i: usize, j: usize) -> i64 {
        let d = self.num[i - 1] - self.num[j - 1];
        debug_assert_eq!(d % (2 * self.n as i64), 0);
        d / (2 * self.n as i64)
    }

    /// 2n * p_i (exact numerator).
    pub fn numerator(&self, i: usize) -> i64 {
        self.num[i - 1]
    }

    /// q^{sign * p_i} as an exact scalar.
    pub fn q_pow_p(&self, mode: &FieldMode, i: usize, sign: i64) -> Scalar {
        // q^{p_i} = q^{num_i/(2n)} = qpow(2 * num_i)
        mode.qpow(2 * sign * self.num[i - 1])
    }

    /// q^{c * p_i} for integer c.
    pub fn q_pow_p_scaled(&self, mode: &FieldMode, i: usize, c: i64) -> Scalar {
        mode.qpow(2 * c * self.num[i - 1])
    }

    /// The deformed Vandermonde D_q(p) = prod_{i<j} [p_ij].
    pub fn dq(&self, mode: &FieldMode) -> Scalar {
        let mut acc = mode.one();
        for i in 1..=self.n {
            for j in (i + 1)..=self.n {
                acc = &acc * &mode.qint(self.p_diff(i, j));
            }
        }
        acc
    }

    /// Dynkin labels of the shifted weight: lambda_j = p_{j,j+1} - 1.
    pub fn dynkin(&self) -> Vec<i64> {
        (1..self.n).map(|j| self.p_diff(j, j + 1) - 1).collect()
    }

    /// Integrability for su(n)_k: p_{j,j+1} natural and p_{1n} <= h - 1.
    pub fn is_integrable(&self, h: usize) -> bool {
        (1..self.n).all(|j| self.p_diff(j, j + 1) >= 1) && self.p_diff(1, self.n) <= h as i64 - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_weights() {
        // (1/2, -1/2), (1, 0, -1), (3/2, 1/2, -1/2, -3/2)
        assert_eq!(Weight::vacuum(2).num, vec![2, -2]);
        assert_eq!(Weight::vacuum(3).num, vec![6, 0, -6]);
        assert_eq!(Weight::vacuum(4).num, vec![12, 4, -4, -12]);
    }

    #[test]
    fn vacuum_dynkin_is_all_ones_minus_one() {
        for n in 2..=4 {
            let w = Weight::vacuum(n);
            assert!(w.dynkin().iter().all(|&l| l == 0));
            assert!(w.is_integrable(n + 1)); // any k >= 1
        }
    }

    #[test]
    fn box_shift_keeps_differences_integral() {
        let w = Weight::vacuum(3).add_box(1).add_box(2).add_box(1);
        for i in 1..=3 {
            for j in 1..=3 {
                let _ = w.p_diff(i, j);
            }
        }
        assert_eq!(w.p_diff(1, 2), 1 + 2 - 1);
    }

    #[test]
    fn product_of_qp_is_one() {
        let mode = FieldMode::cyclotomic(3, 2);
        let w = Weight::vacuum(3).add_box(1).add_box(2);
        let mut acc = mode.one();
        for i in 1..=3 {
            acc = &acc * &w.q_pow_p(&mode, i, 1);
        }
        assert!(acc.is_one());
    }

    #[test]
    fn non_integrable_when_p1n_exceeds_height() {
        // n=2, h=3: two boxes in row 1 push p_12 to 3 > h-1
        let w = Weight::vacuum(2).add_box(1).add_box(1);
        assert_eq!(w.p_diff(1, 2), 3);
        assert!(!w.is_integrable(3));
        assert!(w.is_integrable(4));
    }
}
