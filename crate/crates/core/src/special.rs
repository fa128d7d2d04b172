//! Modified Bessel functions of the first kind for integer order.
//!
//! All values are exponentially scaled, `e^{-x} I_k(x)`, so that products of
//! several Bessel factors stay in range for the field strengths met in the
//! variational solvers.

/// Fills `out[k] = e^{-x} I_k(x)` for `k = 0..out.len()`, `x >= 0`.
///
/// Miller's backward recurrence `I_{k-1} = I_{k+1} + (2k / x) I_k`, started
/// well above both `x` and the highest requested order and normalised with
/// `e^x = I_0 + 2 sum_{k>=1} I_k`.
pub fn bessel_i_scaled_into(x: f64, out: &mut [f64]) {
    assert!(x >= 0.0, "argument must be non-negative, got {x}");
    if out.is_empty() {
        return;
    }
    if x == 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
        return;
    }
    if x <= 1.0 {
        series_into(x, out);
        return;
    }
    let kmax = out.len() - 1;
    let scale = (kmax as f64).max(x);
    let start = 2 * (scale as usize + 16 + (40.0 * scale).sqrt() as usize);
    let two_over_x = 2.0 / x;
    let mut above = 0.0;
    let mut cur = 1e-300;
    let mut norm = 0.0;
    out.fill(0.0);
    for k in (1..=start).rev() {
        let below = above + k as f64 * two_over_x * cur;
        above = cur;
        cur = below;
        // `cur` now holds the unnormalised I_{k-1}, `above` I_k
        if k <= kmax {
            out[k] = above;
        }
        norm += 2.0 * above;
        if cur > 1e250 {
            cur *= 1e-250;
            above *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
}

/// Power series `I_k(x) = sum_m (x/2)^{2m+k} / (m! (m+k)!)`, used for
/// `x <= 1` where the recurrence start would overflow.
fn series_into(x: f64, out: &mut [f64]) {
    let half = 0.5 * x;
    let q = half * half;
    let damp = (-x).exp();
    let mut lead = 1.0;
    for (k, v) in out.iter_mut().enumerate() {
        if k > 0 {
            lead *= half / k as f64;
        }
        let mut term = lead;
        let mut sum = lead;
        for m in 1..40 {
            term *= q / (m as f64 * (m + k) as f64);
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
        }
        *v = damp * sum;
    }
}

pub fn bessel_i_scaled(x: f64, kmax: usize) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    bessel_i_scaled_into(x, &mut out);
    out
}

/// `e^{-x} I_0(x)` and `e^{-x} I_1(x)`.
pub fn i0_i1_scaled(x: f64) -> (f64, f64) {
    let mut buf = [0.0; 3];
    bessel_i_scaled_into(x, &mut buf);
    (buf[0], buf[1])
}

/// Smallest order `k_max` such that `sum_{k > k_max} I_k(x) < tol * I_0(x)`.
pub fn truncation_order(x: f64, tol: f64) -> usize {
    if x == 0.0 {
        return 0;
    }
    let n = 2 * (x as usize) + 64;
    let seq = bessel_i_scaled(x, n);
    let mut tail = 0.0;
    for k in (1..=n).rev() {
        tail += seq[k];
        if tail >= tol * seq[0] {
            return k.min(n);
        }
    }
    0
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power series, fine for moderate arguments.
    fn series(k: usize, x: f64) -> f64 {
        let mut term = (0.5 * x).powi(k as i32) / (1..=k).map(|v| v as f64).product::<f64>();
        let mut sum = term;
        for m in 1..200 {
            term *= 0.25 * x * x / (m as f64 * (m + k) as f64);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        sum
    }

    #[test]
    fn matches_power_series() {
        for &x in &[1e-6, 0.3, 1.0, 1.0001, 2.5, 7.0, 15.0] {
            let seq = bessel_i_scaled(x, 12);
            for (k, &v) in seq.iter().enumerate() {
                let want = series(k, x) * (-x as f64).exp();
                assert!((v - want).abs() <= 1e-13 * want.max(1e-300) + 1e-300, "k={k} x={x}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn reference_values() {
        let (i0, i1) = i0_i1_scaled(1.0);
        assert!((i0 * 1f64.exp() - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((i1 * 1f64.exp() - 0.565_159_103_992_485_1).abs() < 1e-14);
        let (i0, _) = i0_i1_scaled(10.0);
        assert!((i0 - 0.127_833_337_163_428_6).abs() < 1e-14);
        // large argument: e^{-x} I_0(x) ~ 1/sqrt(2 pi x) (1 + 1/(8x) + 9/(128 x^2))
        let x = 1000.0;
        let (i0, i1) = i0_i1_scaled(x);
        let asym = (1.0 + 1.0 / (8.0 * x) + 9.0 / (128.0 * x * x)) / (2.0 * std::f64::consts::PI * x).sqrt();
        assert!((i0 - asym).abs() < 1e-9 * asym);
        assert!(i1 < i0 && i1 > 0.99 * i0);
    }

    #[test]
    fn tiny_argument() {
        for &x in &[1e-40, 1e-200, 1e-310] {
            let seq = bessel_i_scaled(x, 30);
            assert!(seq.iter().all(|v| v.is_finite()));
            assert!((seq[0] - 1.0).abs() < 1e-15);
            assert!((seq[1] - 0.5 * x).abs() <= 1e-15 * x);
        }
    }

    #[test]
    fn zero_argument() {
        assert_eq!(bessel_i_scaled(0.0, 3), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(truncation_order(0.0, 1e-12), 0);
    }

    #[test]
    fn truncation_tail_is_small() {
        for &x in &[0.5, 3.0, 9.0] {
            let k = truncation_order(x, 1e-12);
            let seq = bessel_i_scaled(x, k + 80);
            let tail: f64 = seq[k + 1..].iter().sum();
            assert!(tail < 1e-12 * seq[0]);
        }
    }
}
