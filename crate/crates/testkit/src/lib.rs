//! Reference oracles for tests.
//!
//! Everything here is written the slow, obvious way on plain slices and
//! shares no code with `firescope-core`, so agreement between the two is
//! evidence rather than tautology.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform values in `[lo, hi)`.
pub fn uniform(rng: &mut impl Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Scores drawn from a small grid so ties are frequent.
pub fn tied_scores(rng: &mut impl Rng, n: usize, levels: u32) -> Vec<f64> {
    (0..n)
        .map(|_| f64::from(rng.random_range(0..levels)) / f64::from(levels))
        .collect()
}

/// Mann-Whitney AUC by counting every (positive, negative) pair.
pub fn auc_pair_count(pos: &[f64], neg: &[f64]) -> f64 {
    let mut twice = 0u64;
    for &p in pos {
        for &n in neg {
            if p > n {
                twice += 2;
            } else if p == n {
                twice += 1;
            }
        }
    }
    twice as f64 / 2.0 / (pos.len() as f64 * neg.len() as f64)
}

/// Normalized 2-D Gaussian window, built directly from the 2-D density.
pub fn gaussian_window_2d(size: usize, sigma: f64) -> Vec<Vec<f64>> {
    let c = (size / 2) as f64;
    let mut w = vec![vec![0.0; size]; size];
    let mut total = 0.0;
    for (i, row) in w.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            let d2 = (i as f64 - c).powi(2) + (j as f64 - c).powi(2);
            *x = (-d2 / (2.0 * sigma * sigma)).exp();
            total += *x;
        }
    }
    for row in &mut w {
        for x in row {
            *x /= total;
        }
    }
    w
}

/// SSIM by visiting every fully interior window and computing weighted
/// moments about the local means.
#[allow(clippy::too_many_arguments)]
pub fn ssim_naive(
    a: &[f64],
    b: &[f64],
    width: usize,
    height: usize,
    window: usize,
    sigma: f64,
    c1: f64,
    c2: f64,
) -> f64 {
    let w = gaussian_window_2d(window, sigma);
    let mut total = 0.0;
    let mut count = 0usize;
    for top in 0..=height - window {
        for left in 0..=width - window {
            let (mut mx, mut my) = (0.0, 0.0);
            for i in 0..window {
                for j in 0..window {
                    let idx = (top + i) * width + left + j;
                    mx += w[i][j] * a[idx];
                    my += w[i][j] * b[idx];
                }
            }
            let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
            for i in 0..window {
                for j in 0..window {
                    let idx = (top + i) * width + left + j;
                    let dx = a[idx] - mx;
                    let dy = b[idx] - my;
                    vx += w[i][j] * dx * dx;
                    vy += w[i][j] * dy * dy;
                    cxy += w[i][j] * dx * dy;
                }
            }
            total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    total / count as f64
}

/// Quadratic weighted kappa from explicitly materialized O and E matrices.
pub fn qwk_matrices(pairs: &[(usize, usize)], k: usize) -> f64 {
    let n = pairs.len() as f64;
    let mut o = vec![vec![0.0; k]; k];
    for &(p, a) in pairs {
        o[p][a] += 1.0;
    }
    let mut e = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let row: f64 = (0..k).map(|m| o[i][m]).sum();
            let col: f64 = (0..k).map(|m| o[m][j]).sum();
            e[i][j] = row * col / n;
        }
    }
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..k {
        for j in 0..k {
            let w = ((i as f64) - (j as f64)).powi(2);
            num += w * o[i][j];
            den += w * e[i][j];
        }
    }
    1.0 - num / den
}

/// Rank position of `v` against a reference population: the average
/// 1-based rank among equal values, `(r - 0.5) / n`, linear interpolation
/// between neighbouring distinct values, and clamping outside the range.
pub fn rank_position(reference: &[f64], v: f64) -> f64 {
    let n = reference.len() as f64;
    let position_of = |x: f64| {
        let less = reference.iter().filter(|&&r| r < x).count() as f64;
        let equal = reference.iter().filter(|&&r| r == x).count() as f64;
        let avg_rank = less + (equal + 1.0) / 2.0;
        (avg_rank - 0.5) / n
    };
    if reference.contains(&v) {
        return position_of(v);
    }
    let below = reference.iter().copied().filter(|&r| r < v).reduce(f64::max);
    let above = reference.iter().copied().filter(|&r| r > v).reduce(f64::min);
    match (below, above) {
        (None, _) => 0.0,
        (_, None) => 1.0,
        (Some(lo), Some(hi)) => {
            let (plo, phi) = (position_of(lo), position_of(hi));
            plo + (v - lo) / (hi - lo) * (phi - plo)
        }
    }
}

pub fn mse_loop(a: &[f64], b: &[f64]) -> f64 {
    let mut diffs = Vec::new();
    for i in 0..a.len() {
        diffs.push(a[i] - b[i]);
    }
    let mut total = 0.0;
    for d in &diffs {
        total += d * d;
    }
    total / a.len() as f64
}

pub fn mae_loop(a: &[f64], b: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..a.len() {
        total += (a[i] - b[i]).abs();
    }
    total / a.len() as f64
}

/// ECE with bins scanned one at a time; the last bin is right-closed.
pub fn ece_loop(probs: &[f64], labels: &[bool], bins: usize) -> f64 {
    let n = probs.len() as f64;
    let mut ece = 0.0;
    for b in 0..bins {
        let lo = b as f64 / bins as f64;
        let hi = (b + 1) as f64 / bins as f64;
        let members: Vec<usize> = (0..probs.len())
            .filter(|&i| {
                let p = probs[i];
                p >= lo && (p < hi || (b == bins - 1 && p <= hi))
            })
            .collect();
        if members.is_empty() {
            continue;
        }
        let m = members.len() as f64;
        let conf: f64 = members.iter().map(|&i| probs[i]).sum::<f64>() / m;
        let freq = members.iter().filter(|&&i| labels[i]).count() as f64 / m;
        ece += m / n * (freq - conf).abs();
    }
    ece
}

pub fn fidelity_loop(orig: &[f64], modified: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut n = 0usize;
    for i in 0..orig.len() {
        let target = if orig[i] < 0.5 { 1.0 } else { 0.0 };
        if target == orig[i] {
            continue;
        }
        total += (modified[i] - orig[i]) / (target - orig[i]);
        n += 1;
    }
    total / n as f64
}

pub fn consistency_loop(orig: &[f64], modified: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..orig.len() {
        let (y, yh) = (orig[i], modified[i]);
        let d = if yh < y {
            y
        } else if yh > y {
            1.0 - y
        } else {
            1.0
        };
        total += (yh - y).abs() / d;
    }
    1.0 - total / orig.len() as f64
}

pub fn mean_loop(xs: &[f64]) -> f64 {
    let mut t = 0.0;
    for x in xs {
        t += x;
    }
    t / xs.len() as f64
}
