//! Error-propagation and capacity formulas for XORed group bits.

/// Probability that the XOR of s independently flipped bits is wrong:
/// P = Σ_{r odd} C(s,r) p^r (1−p)^{s−r}, summed exactly.
pub fn effective_error_probability(s: usize, p: f64) -> f64 {
    assert!(s >= 1, "group size must be at least 1");
    assert!((0.0..=1.0).contains(&p), "probability out of range");
    let mut total = 0.0f64;
    let mut r = 1usize;
    while r <= s {
        total += binomial(s, r) * p.powi(r as i32) * (1.0 - p).powi((s - r) as i32);
        r += 2;
    }
    total
}

/// The closed form (1 − (1−2p)^s)/2 of the same quantity.
pub fn effective_error_probability_closed(s: usize, p: f64) -> f64 {
    assert!(s >= 1, "group size must be at least 1");
    0.5 * (1.0 - (1.0 - 2.0 * p).powi(s as i32))
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Binary entropy in bits, with H(0) = H(1) = 0 exactly.
pub fn binary_entropy(p: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "probability out of range");
    let term = |x: f64| if x == 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// Effective channel capacity Ch = 1 − H(P), in bits.
pub fn channel_capacity(p: f64) -> f64 {
    1.0 - binary_entropy(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bit_is_p_itself() {
        for p in [0.0, 0.1, 0.37, 0.5, 1.0] {
            assert!((effective_error_probability(1, p) - p).abs() < 1e-15);
        }
    }

    #[test]
    fn two_bits_at_ten_percent() {
        // 2 · 0.1 · 0.9 = 0.18.
        assert!((effective_error_probability(2, 0.1) - 0.18).abs() < 1e-15);
    }

    #[test]
    fn zero_noise_never_errs() {
        for s in 1..10 {
            assert_eq!(effective_error_probability(s, 0.0), 0.0);
        }
    }

    #[test]
    fn sum_and_closed_form_agree() {
        for s in 1..=64 {
            for p in [0.0, 0.01, 0.05, 0.1, 0.2, 0.33, 0.5, 0.9, 1.0] {
                let a = effective_error_probability(s, p);
                let b = effective_error_probability_closed(s, p);
                assert!((a - b).abs() < 1e-12, "s={s}, p={p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn monotone_in_p_and_saturating_in_s() {
        for s in 1..=64usize {
            let mut last = 0.0;
            for step in 0..=50 {
                let p = step as f64 * 0.01;
                let value = effective_error_probability_closed(s, p);
                assert!(value + 1e-12 >= last, "s={s}, p={p}");
                last = value;
            }
        }
        // P -> 1/2 as s grows, for any p > 0.
        assert!((effective_error_probability_closed(64, 0.1) - 0.5).abs() < 1e-4);
    }

    #[test]
    fn capacity_endpoints() {
        assert_eq!(channel_capacity(0.0), 1.0);
        assert_eq!(channel_capacity(1.0), 1.0);
        assert_eq!(channel_capacity(0.5), 0.0);
        let mid = channel_capacity(0.18);
        assert!((mid - (1.0 - binary_entropy(0.18))).abs() < 1e-15);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn capacity_zero_only_at_one_half() {
        for step in 0..=100 {
            let p = step as f64 * 0.01;
            let ch = channel_capacity(p);
            assert!((0.0..=1.0).contains(&ch));
            if (p - 0.5).abs() > 1e-9 {
                assert!(ch > 0.0, "capacity vanished at p={p}");
            }
            if p > 1e-9 && (p - 1.0).abs() > 1e-9 {
                assert!(ch < 1.0);
            }
        }
    }
}
