use std::f64::consts::PI;

/// Blackman-windowed sinc low-pass with unit DC gain.
///
/// `cutoff` and `transition` are in cycles per sample. The tap count is odd
/// so the filter is symmetric about its centre tap (linear phase, zero delay
/// when applied centred).
pub fn lowpass_taps(cutoff: f64, transition: f64) -> Vec<f64> {
    let mut n = (5.5 / transition).ceil() as usize;
    if n % 2 == 0 {
        n += 1;
    }
    let half = (n / 2) as f64;
    let mut taps: Vec<f64> = (0..n)
        .map(|i| {
            let m = i as f64 - half;
            let sinc = if m == 0.0 {
                2.0 * cutoff
            } else {
                (2.0 * PI * cutoff * m).sin() / (PI * m)
            };
            let w = 0.42 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos()
                + 0.08 * (4.0 * PI * i as f64 / (n - 1) as f64).cos();
            sinc * w
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Taps for decimation by `factor`: cutoff at 80% of the output Nyquist,
/// transition band from 60% to 100% of it.
pub(super) fn decimation_taps(factor: usize) -> Vec<f64> {
    let nyq = 0.5 / factor as f64;
    lowpass_taps(0.8 * nyq, 0.4 * nyq)
}

fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let mut k = i.rem_euclid(period);
    if k >= n as isize {
        k = period - k;
    }
    k as usize
}

/// Centred convolution evaluated only at samples `0, stride, 2*stride, ...`.
pub(super) fn filter_at_stride(x: &[f64], taps: &[f64], stride: usize) -> Vec<f64> {
    let n = x.len();
    let half = (taps.len() / 2) as isize;
    (0..n)
        .step_by(stride)
        .map(|c| {
            let c = c as isize;
            let lo = c - half;
            let hi = c + half;
            if lo >= 0 && hi < n as isize {
                let window = &x[lo as usize..=hi as usize];
                window.iter().zip(taps).map(|(a, b)| a * b).sum()
            } else {
                taps.iter()
                    .enumerate()
                    .map(|(j, t)| t * x[reflect(lo + j as isize, n)])
                    .sum()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflect_indices() {
        let idx: Vec<usize> = (-3..8).map(|i| reflect(i, 4)).collect();
        assert_eq!(idx, vec![3, 2, 1, 0, 1, 2, 3, 2, 1, 0, 1]);
        assert_eq!(reflect(-5, 1), 0);
    }

    #[test]
    fn taps_symmetric_unit_gain() {
        let t = decimation_taps(30);
        assert_eq!(t.len() % 2, 1);
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for i in 0..t.len() / 2 {
            assert!((t[i] - t[t.len() - 1 - i]).abs() < 1e-15);
        }
    }
}
