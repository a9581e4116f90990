use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::numeric::CompensatedSum;
use crate::raster::Raster;

/// Gaussian-window SSIM settings. `c1` and `c2` assume a `[0, 1]` data range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsimParams {
    pub window: usize,
    pub sigma: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            window: 11,
            sigma: 1.5,
            c1: 1e-4,
            c2: 9e-4,
        }
    }
}

impl SsimParams {
    pub fn validate(&self) -> Result<(), MetricError> {
        if self.window < 3 || self.window % 2 == 0 {
            return Err(MetricError::InvalidSsimParams(format!(
                "window must be odd and >= 3, got {}",
                self.window
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(MetricError::InvalidSsimParams(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0 && self.c1.is_finite() && self.c2.is_finite()) {
            return Err(MetricError::InvalidSsimParams(
                "c1 and c2 must be positive".to_owned(),
            ));
        }
        Ok(())
    }

    fn kernel(&self) -> Vec<f64> {
        let c = (self.window / 2) as f64;
        let raw: Vec<f64> = (0..self.window)
            .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * self.sigma * self.sigma)).exp())
            .collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|g| g / total).collect()
    }
}

/// Valid-mode separable filtering of a row-major image.
fn filter_valid(img: &[f64], width: usize, height: usize, kernel: &[f64]) -> Vec<f64> {
    let k = kernel.len();
    let ow = width - k + 1;
    let oh = height - k + 1;
    let mut horiz = vec![0.0; ow * height];
    for r in 0..height {
        let row = &img[r * width..(r + 1) * width];
        let out = &mut horiz[r * ow..(r + 1) * ow];
        for (c, o) in out.iter_mut().enumerate() {
            *o = kernel.iter().zip(&row[c..c + k]).map(|(g, x)| g * x).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for r in 0..oh {
        let dst = &mut out[r * ow..(r + 1) * ow];
        for (i, g) in kernel.iter().enumerate() {
            let src = &horiz[(r + i) * ow..(r + i + 1) * ow];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += g * s;
            }
        }
    }
    out
}

/// Windows (by top-left corner) that contain no masked pixel in either raster.
fn clean_windows(a: &Raster, b: &Raster, window: usize) -> Option<Vec<bool>> {
    if a.nodata().is_none() && b.nodata().is_none() {
        return None;
    }
    let (w, h) = (a.width(), a.height());
    // Summed-area table of masked pixels.
    let mut sat = vec![0u32; (w + 1) * (h + 1)];
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            let m = u32::from(a.is_masked(i) || b.is_masked(i));
            sat[(r + 1) * (w + 1) + c + 1] =
                m + sat[r * (w + 1) + c + 1] + sat[(r + 1) * (w + 1) + c] - sat[r * (w + 1) + c];
        }
    }
    let (ow, oh) = (w - window + 1, h - window + 1);
    let mut ok = Vec::with_capacity(ow * oh);
    for r in 0..oh {
        for c in 0..ow {
            let (r1, c1) = (r + window, c + window);
            let masked = sat[r1 * (w + 1) + c1] + sat[r * (w + 1) + c]
                - sat[r * (w + 1) + c1]
                - sat[r1 * (w + 1) + c];
            ok.push(masked == 0);
        }
    }
    Some(ok)
}

/// Mean structural similarity over every fully interior Gaussian window.
///
/// Inputs are expected in `[0, 1]` (use [`crate::raster::match_range`]
/// first when they are not). Windows touching a masked pixel in either
/// raster are skipped.
pub fn ssim(a: &Raster, b: &Raster, p: &SsimParams) -> Result<f64, MetricError> {
    p.validate()?;
    a.same_dims(b)?;
    let (w, h) = (a.width(), a.height());
    if w < p.window || h < p.window {
        return Err(MetricError::SmallerThanWindow {
            width: w,
            height: h,
            window: p.window,
        });
    }
    let clean = |r: &Raster| -> Vec<f64> {
        r.values()
            .iter()
            .enumerate()
            .map(|(i, &v)| if r.is_masked(i) { 0.0 } else { v })
            .collect()
    };
    let x = clean(a);
    let y = clean(b);
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(u, v)| u * v).collect();

    let kernel = p.kernel();
    let mu_x = filter_valid(&x, w, h, &kernel);
    let mu_y = filter_valid(&y, w, h, &kernel);
    let e_xx = filter_valid(&xx, w, h, &kernel);
    let e_yy = filter_valid(&yy, w, h, &kernel);
    let e_xy = filter_valid(&xy, w, h, &kernel);
    let windows = clean_windows(a, b, p.window);

    let mut acc = CompensatedSum::new();
    let mut n = 0usize;
    for i in 0..mu_x.len() {
        if windows.as_ref().is_some_and(|ok| !ok[i]) {
            continue;
        }
        let (mx, my) = (mu_x[i], mu_y[i]);
        let vx = e_xx[i] - mx * mx;
        let vy = e_yy[i] - my * my;
        let cxy = e_xy[i] - mx * my;
        let mxy = mx * my;
        let s = ((2.0 * mxy + p.c1) * (2.0 * cxy + p.c2))
            / ((mx * mx + my * my + p.c1) * (vx + vy + p.c2));
        acc.add(s);
        n += 1;
    }
    if n == 0 {
        return Err(MetricError::NoEvaluablePixels);
    }
    Ok(acc.total() / n as f64)
}
