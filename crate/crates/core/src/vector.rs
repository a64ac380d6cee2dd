//! Dense `f64` vector helpers.

/// Norms below this are treated as zero; such vectors have no direction.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// Dot product. Accumulates in four lanes so the compiler can keep the
/// loop in registers; the lane order is fixed, so results are reproducible.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut lanes = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        lanes[0] += x[0] * y[0];
        lanes[1] += x[1] * y[1];
        lanes[2] += x[2] * y[2];
        lanes[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]) + tail
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Scales `a` to unit length. Returns the original norm, or `None` (leaving
/// `a` untouched) when the norm is below [`DEGENERATE_NORM`].
pub fn normalize(a: &mut [f64]) -> Option<f64> {
    let n = norm(a);
    if !(n >= DEGENERATE_NORM) || !n.is_finite() {
        return None;
    }
    for x in a.iter_mut() {
        *x /= n;
    }
    Some(n)
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_naive_sum_on_odd_length() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
        let b = [7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0];
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert_eq!(dot(&a, &b), naive);
    }

    #[test]
    fn normalize_three_four_five() {
        let mut v = [3.0, 4.0];
        assert_eq!(normalize(&mut v), Some(5.0));
        assert!((v[0] - 0.6).abs() < 1e-15);
        assert!((v[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn normalize_rejects_zero_and_nan() {
        let mut z = [0.0, 0.0];
        assert_eq!(normalize(&mut z), None);
        let mut n = [f64::NAN, 1.0];
        assert_eq!(normalize(&mut n), None);
    }
}
