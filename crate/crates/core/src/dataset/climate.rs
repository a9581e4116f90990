use serde::{Deserialize, Serialize};

use super::DatasetError;

pub const MONTHS: usize = 12;
pub const CLIMATE_LEN: usize = ClimateVariable::ALL.len() * MONTHS;

/// Monthly climatology variables in their fixed vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClimateVariable {
    Temperature,
    Precipitation,
    Humidity,
    WindSpeed,
    WindDirection,
}

impl ClimateVariable {
    pub const ALL: [ClimateVariable; 5] = [
        ClimateVariable::Temperature,
        ClimateVariable::Precipitation,
        ClimateVariable::Humidity,
        ClimateVariable::WindSpeed,
        ClimateVariable::WindDirection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClimateVariable::Temperature => "temperature",
            ClimateVariable::Precipitation => "precipitation",
            ClimateVariable::Humidity => "humidity",
            ClimateVariable::WindSpeed => "wind_speed",
            ClimateVariable::WindDirection => "wind_direction",
        }
    }
}

/// One month of climatology at a tile centroid. Missing variables are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MonthlyClimate {
    /// Calendar month, 1 = January.
    pub month: u8,
    pub temperature: Option<f64>,
    pub precipitation: Option<f64>,
    pub humidity: Option<f64>,
    pub wind_speed: Option<f64>,
    /// Degrees clockwise from north.
    pub wind_direction: Option<f64>,
}

impl MonthlyClimate {
    fn get(&self, var: ClimateVariable) -> Option<f64> {
        match var {
            ClimateVariable::Temperature => self.temperature,
            ClimateVariable::Precipitation => self.precipitation,
            ClimateVariable::Humidity => self.humidity,
            ClimateVariable::WindSpeed => self.wind_speed,
            ClimateVariable::WindDirection => self.wind_direction,
        }
    }
}

/// 60-element climatology vector, variable-major: all twelve temperature
/// months first, then precipitation, humidity, wind speed and wind direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ClimateVector(Vec<f64>);

impl ClimateVector {
    pub fn new(values: Vec<f64>) -> Result<Self, DatasetError> {
        if values.len() != CLIMATE_LEN {
            return Err(DatasetError::ClimateLength(values.len()));
        }
        for (i, &v) in values.iter().enumerate() {
            let var = ClimateVariable::ALL[i / MONTHS];
            if !v.is_finite() {
                return Err(DatasetError::NonFiniteClimate {
                    month: (i % MONTHS + 1) as u8,
                    variable: var.name(),
                });
            }
            if var == ClimateVariable::WindDirection && !(0.0..360.0).contains(&v) {
                return Err(DatasetError::WindDirection(v));
            }
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Value of `var` in calendar month `month` (1-based).
    pub fn get(&self, var: ClimateVariable, month: u8) -> f64 {
        let v = ClimateVariable::ALL.iter().position(|&x| x == var).unwrap();
        self.0[v * MONTHS + month as usize - 1]
    }
}

impl TryFrom<Vec<f64>> for ClimateVector {
    type Error = DatasetError;

    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

impl From<ClimateVector> for Vec<f64> {
    fn from(v: ClimateVector) -> Self {
        v.0
    }
}

/// Assembles the climatology vector from twelve monthly records.
///
/// Records may arrive in any order. Wind directions are wrapped into
/// `[0, 360)` so a reading of 360 means north.
pub fn build_climate_vector(monthly: &[MonthlyClimate]) -> Result<ClimateVector, DatasetError> {
    let mut by_month: [Option<&MonthlyClimate>; MONTHS] = [None; MONTHS];
    for rec in monthly {
        let slot = rec
            .month
            .checked_sub(1)
            .map(usize::from)
            .filter(|&m| m < MONTHS)
            .ok_or(DatasetError::InvalidMonth { month: rec.month })?;
        if by_month[slot].replace(rec).is_some() {
            return Err(DatasetError::InvalidMonth { month: rec.month });
        }
    }
    let mut values = Vec::with_capacity(CLIMATE_LEN);
    for var in ClimateVariable::ALL {
        for (m, rec) in by_month.iter().enumerate() {
            let month = (m + 1) as u8;
            let rec = rec.ok_or(DatasetError::MissingMonth { month })?;
            let v = rec.get(var).ok_or(DatasetError::MissingVariable {
                month,
                variable: var.name(),
            })?;
            if !v.is_finite() {
                return Err(DatasetError::NonFiniteClimate {
                    month,
                    variable: var.name(),
                });
            }
            values.push(if var == ClimateVariable::WindDirection {
                v.rem_euclid(360.0)
            } else {
                v
            });
        }
    }
    ClimateVector::new(values)
}
