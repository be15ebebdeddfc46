//! Real-valued spatial coefficient profiles (used for `𝒢(x)` amplitudes and `h(x)`).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// `amplitude · exp(-((x - center)/width)²)`.
    Gaussian {
        amplitude: f64,
        #[serde(default)]
        center: f64,
        width: f64,
    },
    /// `offset + amplitude · cos(2π x / period + phase)`.
    Cosine {
        #[serde(default)]
        offset: f64,
        amplitude: f64,
        period: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Piecewise-linear through `[x, value]` points, held constant beyond the ends.
    Table {
        points: Vec<[f64; 2]>,
    },
    Sum {
        terms: Vec<Profile>,
    },
}

impl Profile {
    pub fn zero() -> Self {
        Profile::Constant { value: 0.0 }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Profile::Constant { value } => *value,
            Profile::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let s = (x - center) / width;
                amplitude * (-s * s).exp()
            }
            Profile::Cosine {
                offset,
                amplitude,
                period,
                phase,
            } => offset + amplitude * (2.0 * PI * x / period + phase).cos(),
            Profile::Table { points } => table_eval(points, x),
            Profile::Sum { terms } => terms.iter().map(|p| p.eval(x)).sum(),
        }
    }

    /// Whether the profile is identically zero by construction.
    pub fn is_trivially_zero(&self) -> bool {
        match self {
            Profile::Constant { value } => *value == 0.0,
            Profile::Gaussian { amplitude, .. } => *amplitude == 0.0,
            Profile::Cosine {
                offset, amplitude, ..
            } => *offset == 0.0 && *amplitude == 0.0,
            Profile::Table { points } => points.iter().all(|p| p[1] == 0.0),
            Profile::Sum { terms } => terms.iter().all(Profile::is_trivially_zero),
        }
    }

    /// Structural sanity: finite parameters, positive widths and periods, sorted tables.
    pub fn check(&self) -> Result<(), String> {
        match self {
            Profile::Constant { value } if !value.is_finite() => Err("constant is not finite".into()),
            Profile::Gaussian {
                amplitude,
                center,
                width,
            } if !(amplitude.is_finite() && center.is_finite() && width.is_finite() && *width > 0.0) => {
                Err("gaussian needs finite amplitude/center and positive width".into())
            }
            Profile::Cosine {
                offset,
                amplitude,
                period,
                phase,
            } if !(offset.is_finite() && amplitude.is_finite() && phase.is_finite() && period.is_finite() && *period > 0.0) => {
                Err("cosine needs finite coefficients and positive period".into())
            }
            Profile::Table { points } => {
                if points.is_empty() {
                    return Err("table profile is empty".into());
                }
                if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
                    return Err("table profile has non-finite entries".into());
                }
                if points.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err("table abscissae must be strictly increasing".into());
                }
                Ok(())
            }
            Profile::Sum { terms } => terms.iter().try_for_each(Profile::check),
            _ => Ok(()),
        }
    }
}

fn table_eval(points: &[[f64; 2]], x: f64) -> f64 {
    let i = points.partition_point(|p| p[0] <= x);
    if i == 0 {
        return points[0][1];
    }
    if i == points.len() {
        return points[i - 1][1];
    }
    let [x0, y0] = points[i - 1];
    let [x1, y1] = points[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
