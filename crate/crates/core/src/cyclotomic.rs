//! Exact sums of roots of unity.
//!
//! A sum `Σ c_k ζ_n^k` is kept as an integer polynomial modulo `x^n - 1`
//! and reduced modulo the cyclotomic polynomial `Φ_n` when a rational value
//! is required.

use num_integer::Integer;

#[derive(Debug, Clone)]
pub(crate) struct RootSum {
    n: usize,
    coeffs: Vec<i128>,
}

impl RootSum {
    pub(crate) fn new(n: usize) -> Self {
        assert!(n >= 1);
        RootSum {
            n,
            coeffs: vec![0; n],
        }
    }

    /// Adds `ζ^(a/e)` where `e` divides `n`.
    pub(crate) fn add_root(&mut self, num: u64, den: u64) {
        let den = den as usize;
        debug_assert_eq!(self.n % den, 0);
        let k = (num as usize * (self.n / den)) % self.n;
        self.coeffs[k] += 1;
    }

    /// Returns the value as an integer if the sum is a rational integer.
    pub(crate) fn as_integer(&self) -> Option<i128> {
        let phi = cyclotomic_polynomial(self.n);
        let rem = poly_rem(&self.coeffs, &phi);
        if rem.iter().skip(1).all(|&c| c == 0) {
            Some(rem.first().copied().unwrap_or(0))
        } else {
            None
        }
    }
}

/// Coefficients of `Φ_n`, lowest degree first.
fn cyclotomic_polynomial(n: usize) -> Vec<i128> {
    // x^n - 1 = Π_{d | n} Φ_d
    let mut p = vec![0i128; n + 1];
    p[0] = -1;
    p[n] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = poly_div_exact(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

fn poly_div_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    let (q, r) = poly_divmod(num, den);
    debug_assert!(r.iter().all(|&c| c == 0));
    q
}

fn poly_rem(num: &[i128], den: &[i128]) -> Vec<i128> {
    poly_divmod(num, den).1
}

/// Division by a monic integer polynomial.
fn poly_divmod(num: &[i128], den: &[i128]) -> (Vec<i128>, Vec<i128>) {
    let dd = den.len() - 1;
    debug_assert_eq!(den[dd], 1);
    let mut r = num.to_vec();
    if r.len() <= dd {
        r.resize(dd.max(1), 0);
        return (vec![0], r);
    }
    let mut q = vec![0i128; r.len() - dd];
    for i in (dd..r.len()).rev() {
        let c = r[i];
        if c == 0 {
            continue;
        }
        q[i - dd] = c;
        for (j, &dc) in den.iter().enumerate() {
            r[i - dd + j] -= c * dc;
        }
    }
    r.truncate(dd.max(1));
    (q, r)
}

/// Least common multiple of a sequence of positive integers.
pub(crate) fn lcm_all(values: impl IntoIterator<Item = u64>) -> u64 {
    values.into_iter().fold(1u64, |acc, v| acc.lcm(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn root_sums() {
        // 1 + ζ_3 + ζ_3^2 = 0
        let mut s = RootSum::new(3);
        s.add_root(0, 1);
        s.add_root(1, 3);
        s.add_root(2, 3);
        assert_eq!(s.as_integer(), Some(0));

        // 1 + ζ_3 is not rational
        let mut s = RootSum::new(3);
        s.add_root(0, 1);
        s.add_root(1, 3);
        assert_eq!(s.as_integer(), None);

        // i + (-i) + 1 + 1 = 2
        let mut s = RootSum::new(4);
        s.add_root(1, 4);
        s.add_root(3, 4);
        s.add_root(0, 1);
        s.add_root(0, 1);
        assert_eq!(s.as_integer(), Some(2));

        // -1 over n = 6
        let mut s = RootSum::new(6);
        s.add_root(1, 2);
        assert_eq!(s.as_integer(), Some(-1));
    }
}
