//! Error type shared by the mechanism, kinetics, and compilation layers.

use thiserror::Error;

/// Errors produced while validating mechanisms or evaluating kinetics.
#[derive(Debug, Error)]
pub enum ChemError {
    #[error("species `{name}` declared more than once")]
    DuplicateSpecies { name: String },

    #[error("reaction {reaction} references species index {index} but only {n_species} species are declared")]
    UndeclaredSpecies {
        reaction: usize,
        index: usize,
        n_species: usize,
    },

    #[error("reaction {reaction} does not conserve element `{element}` ({lhs} on the left, {rhs} on the right)")]
    Unbalanced {
        reaction: usize,
        element: String,
        lhs: u32,
        rhs: u32,
    },

    #[error("reaction {reaction} has molecularity {molecularity} in the {direction} direction; at most 3 is supported")]
    UnsupportedOrder {
        reaction: usize,
        direction: &'static str,
        molecularity: u32,
    },

    #[error("species `{species}` has no thermodynamic data but an equilibrium evaluation needs it")]
    MissingThermo { species: String },

    #[error("temperature {t} K is outside the fit range [{t_low}, {t_high}] K for species `{species}`")]
    TemperatureOutOfRange {
        species: String,
        t: f64,
        t_low: f64,
        t_high: f64,
    },

    #[error("rate constant is not finite at T = {t} K (A = {a}, b = {b}, E_a = {e_a})")]
    RateOverflow { a: f64, b: f64, e_a: f64, t: f64 },

    #[error("invalid mechanism: {0}")]
    InvalidMechanism(String),

    #[error(transparent)]
    Numeric(#[from] carleman_core::Error),
}
