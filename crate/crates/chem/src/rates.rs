//! Rate-constant and production-rate evaluation.
//!
//! All routines work in cm-mol-s-K-cal units. `net_production_rates` walks
//! the reaction list directly and is deliberately independent of the
//! polynomial compilation path, so the two can be checked against each other.

use std::collections::BTreeMap;

use crate::error::ChemError;
use crate::mechanism::{Arrhenius, Mechanism, Reaction, ReverseRate};
use crate::thermo::nasa7_props;

/// Gas constant in cal/(mol K), used with activation energies.
pub const R_CAL: f64 = 1.987204;

/// Gas constant in atm cm^3/(mol K), used for concentration conversions.
pub const R_ATM_CM3: f64 = 82.0574;

/// Thermodynamic reference pressure in atm.
pub const P_REF_ATM: f64 = 1.0;

/// Modified Arrhenius rate constant k(T) = A T^b exp(-E_a/(R T)).
pub fn rate_constant(arr: &Arrhenius, t: f64) -> Result<f64, ChemError> {
    if !t.is_finite() || t <= 0.0 {
        return Err(ChemError::RateOverflow {
            a: arr.a,
            b: arr.b,
            e_a: arr.e_a,
            t,
        });
    }
    let k = arr.a * t.powf(arr.b) * (-arr.e_a / (R_CAL * t)).exp();
    if !k.is_finite() {
        return Err(ChemError::RateOverflow {
            a: arr.a,
            b: arr.b,
            e_a: arr.e_a,
            t,
        });
    }
    Ok(k)
}

/// Reverse rate constant derived from detailed balance:
/// k_r = k_f / K_c with K_c from the species thermo fits.
pub fn equilibrium_reverse_rate(
    m: &Mechanism,
    r: &Reaction,
    t: f64,
) -> Result<f64, ChemError> {
    let k_f = rate_constant(&r.forward, t)?;
    let mut delta_h_rt = 0.0;
    let mut delta_s_r = 0.0;
    let mut delta_nu = 0i64;
    for (side, sign) in [(&r.products, 1.0), (&r.reactants, -1.0)] {
        for &(s, nu) in side.iter() {
            let sp = &m.species()[s];
            let fit = sp.thermo.as_ref().ok_or_else(|| ChemError::MissingThermo {
                species: sp.name.clone(),
            })?;
            let props = nasa7_props(&sp.name, fit, t)?;
            delta_h_rt += sign * f64::from(nu) * props.h_over_rt;
            delta_s_r += sign * f64::from(nu) * props.s_over_r;
            delta_nu += (sign as i64) * i64::from(nu);
        }
    }
    let ln_kp = delta_s_r - delta_h_rt;
    // K_c = K_p (P_ref / (R T))^delta_nu in mol/cm^3 units.
    let ln_conv = (P_REF_ATM / (R_ATM_CM3 * t)).ln();
    let k_c = (ln_kp + delta_nu as f64 * ln_conv).exp();
    let k_r = k_f / k_c;
    if !k_r.is_finite() {
        return Err(ChemError::RateOverflow {
            a: r.forward.a,
            b: r.forward.b,
            e_a: r.forward.e_a,
            t,
        });
    }
    Ok(k_r)
}

fn concentration_product(side: &[(usize, u32)], c: &[f64]) -> f64 {
    side.iter()
        .map(|&(s, nu)| c[s].powi(nu as i32))
        .product()
}

/// Net molar production rate d[c_s]/dt for every species, by direct
/// evaluation of each reaction's law of mass action.
pub fn net_production_rates(
    m: &Mechanism,
    t: f64,
    c: &[f64],
) -> Result<Vec<f64>, ChemError> {
    if c.len() != m.n_species() {
        return Err(ChemError::InvalidMechanism(format!(
            "state has {} entries but the mechanism has {} species",
            c.len(),
            m.n_species()
        )));
    }
    let mut omega = vec![0.0; m.n_species()];
    for r in m.reactions() {
        let k_f = rate_constant(&r.forward, t)?;
        let mut rate = k_f * concentration_product(&r.reactants, c);
        match r.reverse {
            ReverseRate::None => {}
            ReverseRate::Explicit(arr) => {
                rate -= rate_constant(&arr, t)? * concentration_product(&r.products, c);
            }
            ReverseRate::FromEquilibrium => {
                rate -= equilibrium_reverse_rate(m, r, t)?
                    * concentration_product(&r.products, c);
            }
        }
        if let Some(tb) = &r.third_body {
            let m_eff: f64 = c
                .iter()
                .enumerate()
                .map(|(s, &cs)| tb.efficiency(s) * cs)
                .sum();
            rate *= m_eff;
        }
        for &(s, nu) in &r.reactants {
            omega[s] -= f64::from(nu) * rate;
        }
        for &(s, nu) in &r.products {
            omega[s] += f64::from(nu) * rate;
        }
    }
    Ok(omega)
}

/// Total moles of each element per unit volume in the state `c`.
pub fn element_totals(m: &Mechanism, c: &[f64]) -> BTreeMap<String, f64> {
    let mut totals: BTreeMap<String, f64> = BTreeMap::new();
    for (sp, &cs) in m.species().iter().zip(c.iter()) {
        for (element, &count) in &sp.composition {
            *totals.entry(element.clone()).or_insert(0.0) += f64::from(count) * cs;
        }
    }
    totals
}
