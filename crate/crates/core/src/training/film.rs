use super::TrainingError;

/// Channel-major feature grid: `data[c * height * width + row * width + col]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl FeatureMap {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<f64>) -> Result<Self, TrainingError> {
        let expected = channels * height * width;
        if data.len() != expected || expected == 0 {
            return Err(TrainingError::FeatureShape {
                channels,
                height,
                width,
                expected,
                actual: data.len(),
            });
        }
        Ok(Self {
            channels,
            height,
            width,
            data,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.plane_len();
        &self.data[c * n..(c + 1) * n]
    }
}

/// Feature-wise linear modulation: `out[c] = gamma[c] * x[c] + beta[c]`.
pub fn film(features: &FeatureMap, gamma: &[f64], beta: &[f64]) -> Result<FeatureMap, TrainingError> {
    if gamma.len() != features.channels || beta.len() != features.channels {
        return Err(TrainingError::FilmChannels {
            channels: features.channels,
            gamma: gamma.len(),
            beta: beta.len(),
        });
    }
    let n = features.plane_len();
    let data = features
        .data
        .chunks_exact(n)
        .zip(gamma.iter().zip(beta))
        .flat_map(|(plane, (&g, &b))| plane.iter().map(move |&x| g * x + b))
        .collect();
    Ok(FeatureMap { data, ..*features })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(channels: usize, values: Vec<f64>) -> FeatureMap {
        let n = values.len() / channels;
        FeatureMap::new(channels, 1, n, values).unwrap()
    }

    #[test]
    fn examples() {
        let x = map(2, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(film(&x, &[1.0, 1.0], &[0.0, 0.0]).unwrap(), x);
        assert_eq!(film(&x, &[0.0, 0.0], &[5.0, -1.0]).unwrap().data(), &[5.0, 5.0, -1.0, -1.0]);
        assert_eq!(film(&map(1, vec![3.0]), &[2.0], &[1.0]).unwrap().data(), &[7.0]);
        assert!(matches!(film(&x, &[1.0], &[0.0, 0.0]), Err(TrainingError::FilmChannels { .. })));
        assert!(FeatureMap::new(2, 2, 2, vec![0.0; 7]).is_err());
    }
}
