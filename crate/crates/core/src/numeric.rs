//! Small numeric helpers shared across modules.

/// Round non-negative targets to integers that sum to `total` using the
/// largest-remainder rule: floor everything, then hand the leftover units
/// to the largest fractional parts (ties to the lower index).
///
/// `total` must lie within `[sum of floors, sum of floors + count]`, which
/// always holds when `total` is the rounded sum of the targets.
pub fn largest_remainder(targets: &[f64], total: i64) -> Vec<i64> {
    let mut out: Vec<i64> = targets.iter().map(|&t| t.max(0.0).floor() as i64).collect();
    let floor_sum: i64 = out.iter().sum();
    let mut leftover = total - floor_sum;
    assert!(
        leftover >= 0 && leftover <= targets.len() as i64,
        "largest_remainder: total {total} unreachable from floors {floor_sum} over {} entries",
        targets.len()
    );
    let mut order: Vec<usize> = (0..targets.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = targets[a].max(0.0).fract();
        let fb = targets[b].max(0.0).fract();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for idx in order {
        if leftover == 0 {
            break;
        }
        out[idx] += 1;
        leftover -= 1;
    }
    out
}

/// Linear-interpolation quantile on a sorted sample (the common "type 7"
/// convention): position `(n - 1) * p`, interpolated between neighbours.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of an empty sample");
    assert!((0.0..=1.0).contains(&p));
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

/// Tukey whiskers of a sample: the extreme observations still within
/// 1.5 interquartile ranges of the quartiles.
pub fn tukey_whiskers(samples: &[f64]) -> (f64, f64) {
    assert!(!samples.is_empty(), "whiskers of an empty sample");
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let lo_fence = q1 - 1.5 * iqr;
    let hi_fence = q3 + 1.5 * iqr;
    let lo = sorted.iter().copied().find(|&x| x >= lo_fence).unwrap_or(sorted[0]);
    let hi = sorted
        .iter()
        .rev()
        .copied()
        .find(|&x| x <= hi_fence)
        .unwrap_or(sorted[sorted.len() - 1]);
    (lo, hi)
}
