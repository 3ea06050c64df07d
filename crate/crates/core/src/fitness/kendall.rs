//! Kendall's tau-b in O(n log n) (Knight's algorithm).
//!
//! `tau_b = (C - D) / sqrt((n0 - n1) * (n0 - n2))` where `n0 = n(n-1)/2`,
//! `n1`/`n2` count pairs tied in x / y. When either ranking is constant the
//! denominator vanishes and tau is defined as 0.

use std::cmp::Ordering;

use super::FitnessError;

fn tied_pairs(sorted: &[f64]) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Stable merge sort of `values` counting strict inversions.
fn sort_counting_swaps(values: &mut [f64]) -> u64 {
    let n = values.len();
    let mut buf = vec![0.0; n];
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid && j < end {
                if values[j] < values[i] {
                    swaps += (mid - i) as u64;
                    buf[k] = values[j];
                    j += 1;
                } else {
                    buf[k] = values[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - i)].copy_from_slice(&values[i..mid]);
            k += mid - i;
            buf[k..k + (end - j)].copy_from_slice(&values[j..end]);
            start = end;
        }
        values.copy_from_slice(&buf);
        width *= 2;
    }
    swaps
}

/// Tie-adjusted Kendall rank correlation between `x` and `y`.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64, FitnessError> {
    if x.len() != y.len() {
        return Err(FitnessError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 2 {
        return Err(FitnessError::TooShort(n));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(FitnessError::NonFinite);
    }

    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_unstable_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
    });

    let n0 = (n as u64) * (n as u64 - 1) / 2;

    let mut n1 = 0u64;
    let mut n3 = 0u64;
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            run_x += 1;
            if w[0].1 == w[1].1 {
                run_xy += 1;
            } else {
                n3 += run_xy * (run_xy - 1) / 2;
                run_xy = 1;
            }
        } else {
            n1 += run_x * (run_x - 1) / 2;
            n3 += run_xy * (run_xy - 1) / 2;
            run_x = 1;
            run_xy = 1;
        }
    }
    n1 += run_x * (run_x - 1) / 2;
    n3 += run_xy * (run_xy - 1) / 2;

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = sort_counting_swaps(&mut ys);
    let n2 = tied_pairs(&ys);

    let tot_x = (n0 - n1) as f64;
    let tot_y = (n0 - n2) as f64;
    if tot_x == 0.0 || tot_y == 0.0 {
        return Ok(0.0);
    }
    let numerator = (n0 + n3) as f64 - (n1 + n2) as f64 - 2.0 * swaps as f64;
    Ok((numerator / (tot_x * tot_y).sqrt()).clamp(-1.0, 1.0))
}
