//! NASA-7 polynomial thermodynamics.
//!
//! Each species carries two 7-coefficient fits, one below and one above a
//! common breakpoint temperature. The fits give dimensionless heat capacity,
//! enthalpy, and entropy:
//!
//! ```text
//! cp/R    = a1 + a2 T + a3 T^2 + a4 T^3 + a5 T^4
//! h/(RT)  = a1 + a2 T/2 + a3 T^2/3 + a4 T^3/4 + a5 T^4/5 + a6/T
//! s/R     = a1 ln T + a2 T + a3 T^2/2 + a4 T^3/3 + a5 T^4/4 + a7
//! ```

use crate::error::ChemError;

/// Two-range NASA-7 polynomial fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Nasa7 {
    pub t_low: f64,
    pub t_common: f64,
    pub t_high: f64,
    /// Coefficients valid on [t_low, t_common].
    pub low: [f64; 7],
    /// Coefficients valid on [t_common, t_high].
    pub high: [f64; 7],
}

impl Nasa7 {
    /// Validates the range ordering.
    pub fn new(
        t_low: f64,
        t_common: f64,
        t_high: f64,
        low: [f64; 7],
        high: [f64; 7],
    ) -> Result<Self, ChemError> {
        if !(t_low.is_finite() && t_common.is_finite() && t_high.is_finite())
            || !(t_low < t_common && t_common < t_high)
        {
            return Err(ChemError::InvalidMechanism(format!(
                "thermo ranges must satisfy t_low < t_common < t_high, got {t_low}, {t_common}, {t_high}"
            )));
        }
        let all = low.iter().chain(high.iter());
        if all.clone().any(|c| !c.is_finite()) {
            return Err(ChemError::InvalidMechanism(
                "thermo coefficients must be finite".into(),
            ));
        }
        Ok(Self {
            t_low,
            t_common,
            t_high,
            low,
            high,
        })
    }

    fn coeffs_at(&self, t: f64) -> &[f64; 7] {
        if t < self.t_common {
            &self.low
        } else {
            &self.high
        }
    }
}

/// Dimensionless thermodynamic state functions at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoProps {
    pub cp_over_r: f64,
    pub h_over_rt: f64,
    pub s_over_r: f64,
}

/// Evaluates the NASA-7 fit at temperature `t` (K), named for diagnostics.
pub fn nasa7_props(name: &str, fit: &Nasa7, t: f64) -> Result<ThermoProps, ChemError> {
    if !(t >= fit.t_low && t <= fit.t_high) {
        return Err(ChemError::TemperatureOutOfRange {
            species: name.to_string(),
            t,
            t_low: fit.t_low,
            t_high: fit.t_high,
        });
    }
    let a = fit.coeffs_at(t);
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    Ok(ThermoProps {
        cp_over_r: a[0] + a[1] * t + a[2] * t2 + a[3] * t3 + a[4] * t4,
        h_over_rt: a[0]
            + a[1] * t / 2.0
            + a[2] * t2 / 3.0
            + a[3] * t3 / 4.0
            + a[4] * t4 / 5.0
            + a[5] / t,
        s_over_r: a[0] * t.ln() + a[1] * t + a[2] * t2 / 2.0 + a[3] * t3 / 3.0 + a[4] * t4 / 4.0
            + a[6],
    })
}
