use super::MetricError;
use crate::numeric::CompensatedSum;
use crate::raster::Raster;

fn mean_over_joint<F: Fn(f64) -> f64>(a: &Raster, b: &Raster, f: F) -> Result<f64, MetricError> {
    a.same_dims(b)?;
    let mut acc = CompensatedSum::new();
    let mut n = 0usize;
    for (i, (&x, &y)) in a.values().iter().zip(b.values()).enumerate() {
        if a.is_masked(i) || b.is_masked(i) {
            continue;
        }
        acc.add(f(x - y));
        n += 1;
    }
    if n == 0 {
        return Err(MetricError::NoEvaluablePixels);
    }
    Ok(acc.total() / n as f64)
}

/// Mean squared error over pixels valid in both rasters.
pub fn mse(a: &Raster, b: &Raster) -> Result<f64, MetricError> {
    mean_over_joint(a, b, |d| d * d)
}

/// Mean absolute error over pixels valid in both rasters.
pub fn mae(a: &Raster, b: &Raster) -> Result<f64, MetricError> {
    mean_over_joint(a, b, f64::abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::RasterError;
    use firescope_testkit as tk;

    #[test]
    fn identity_and_constant_offset() {
        let a = Raster::from_fn(5, 4, |r, c| (r * 5 + c) as f64 / 20.0).unwrap();
        assert_eq!(mse(&a, &a).unwrap(), 0.0);
        assert_eq!(mae(&a, &a).unwrap(), 0.0);
        let zero = Raster::filled(3, 3, 0.0).unwrap();
        let half = Raster::filled(3, 3, 0.5).unwrap();
        assert_eq!(mse(&half, &zero).unwrap(), 0.25);
        assert_eq!(mae(&half, &zero).unwrap(), 0.5);
    }

    #[test]
    fn matches_loop_oracle() {
        let mut rng = tk::rng(42);
        for _ in 0..20 {
            let a = tk::uniform(&mut rng, 300, 0.0, 1.0);
            let b = tk::uniform(&mut rng, 300, 0.0, 1.0);
            let ra = Raster::new(20, 15, a.clone()).unwrap();
            let rb = Raster::new(20, 15, b.clone()).unwrap();
            assert!((mse(&ra, &rb).unwrap() - tk::mse_loop(&a, &b)).abs() < 1e-12);
            assert!((mae(&ra, &rb).unwrap() - tk::mae_loop(&a, &b)).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_nodata_and_errors() {
        let a = Raster::with_nodata(3, 1, vec![0.0, 9.0, 1.0], vec![false, true, false]).unwrap();
        let b = Raster::with_nodata(3, 1, vec![1.0, 0.0, f64::NAN], vec![false, false, true]).unwrap();
        assert_eq!(mse(&a, &b).unwrap(), 1.0);
        let c = Raster::filled(2, 2, 0.0).unwrap();
        assert!(matches!(
            mse(&a, &c),
            Err(MetricError::Raster(RasterError::DimensionMismatch { .. }))
        ));
        let all = Raster::with_nodata(1, 1, vec![0.0], vec![true]).unwrap();
        let one = Raster::filled(1, 1, 0.0).unwrap();
        assert_eq!(mae(&all, &one), Err(MetricError::NoEvaluablePixels));
    }
}
