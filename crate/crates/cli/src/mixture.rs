//! Initial mixtures: equivalence ratio to mole fractions to molar
//! concentrations (mol/cm^3) for an ideal gas at fixed T and P.

use std::collections::BTreeMap;

use carleman_chem::{Mechanism, R_ATM_CM3};

use crate::error::CliError;

/// Moles of O2 consumed per mole of fuel for complete oxidation to CO2 and
/// H2O, from the fuel's elemental composition: C + H/4 - O/2.
pub fn o2_demand(m: &Mechanism, fuel: usize) -> f64 {
    let comp = &m.species()[fuel].composition;
    let count = |el: &str| comp.get(el).copied().unwrap_or(0) as f64;
    count("C") + count("H") / 4.0 - count("O") / 2.0
}

/// Mole fractions for a fuel/oxidizer premixture at the given equivalence
/// ratio. The oxidizer blend is given in relative moles (default air,
/// O2:N2 = 21:79) and is normalized to one mole; the fuel amount is then
/// phi * x_O2 / demand.
pub fn mole_fractions_from_phi(
    m: &Mechanism,
    fuel: &str,
    phi: f64,
    oxidizer: Option<&BTreeMap<String, f64>>,
) -> Result<Vec<f64>, CliError> {
    let fuel_idx = m
        .species_index(fuel)
        .ok_or_else(|| CliError::Invalid(format!("fuel `{fuel}` is not in the mechanism")))?;
    let demand = o2_demand(m, fuel_idx);
    if !(demand.is_finite() && demand > 0.0) {
        return Err(CliError::Invalid(format!(
            "`{fuel}` has no stoichiometric O2 demand; it cannot be the fuel"
        )));
    }

    let air: BTreeMap<String, f64> =
        [("O2".to_string(), 0.21), ("N2".to_string(), 0.79)].into_iter().collect();
    let blend = oxidizer.unwrap_or(&air);
    let blend_total: f64 = blend.values().sum();
    if blend.values().any(|v| !v.is_finite() || *v < 0.0) || blend_total <= 0.0 {
        return Err(CliError::Invalid(
            "oxidizer blend must be nonnegative with positive sum".into(),
        ));
    }
    let x_o2 = blend.get("O2").copied().unwrap_or(0.0) / blend_total;
    if x_o2 <= 0.0 {
        return Err(CliError::Invalid("oxidizer blend must contain O2".into()));
    }

    let n_fuel = phi * x_o2 / demand;
    let total = n_fuel + 1.0;
    let mut x = vec![0.0; m.n_species()];
    x[fuel_idx] = n_fuel / total;
    for (name, amount) in blend {
        let idx = m.species_index(name).ok_or_else(|| {
            CliError::Invalid(format!("oxidizer species `{name}` is not in the mechanism"))
        })?;
        x[idx] += amount / blend_total / total;
    }
    Ok(x)
}

/// Resolves a name-keyed mole fraction map against the mechanism and
/// normalizes it to sum to one.
pub fn mole_fractions_from_map(
    m: &Mechanism,
    fractions: &BTreeMap<String, f64>,
) -> Result<Vec<f64>, CliError> {
    let mut x = vec![0.0; m.n_species()];
    for (name, value) in fractions {
        let idx = m.species_index(name).ok_or_else(|| {
            CliError::Invalid(format!("species `{name}` is not in the mechanism"))
        })?;
        x[idx] += value;
    }
    let total: f64 = x.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(CliError::Invalid("mole fractions sum to zero".into()));
    }
    for v in &mut x {
        *v /= total;
    }
    Ok(x)
}

/// c_i = x_i * P / (R T) in mol/cm^3 for T in kelvin and P in atm.
pub fn concentrations(x: &[f64], temperature_k: f64, pressure_atm: f64) -> Vec<f64> {
    let c_total = pressure_atm / (R_ATM_CM3 * temperature_k);
    x.iter().map(|xi| xi * c_total).collect()
}
