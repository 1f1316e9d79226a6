//! Chemical kinetics front end: mechanism data model, thermodynamic
//! polynomials, mass-action rate laws, a text-format parser, and the
//! compiler that turns an isothermal mechanism into a polynomial ODE
//! system over species concentrations.

pub mod compile;
pub mod error;
pub mod mechanism;
pub mod parser;
pub mod rates;
pub mod thermo;

pub use compile::to_polynomial;
pub use error::ChemError;
pub use mechanism::{Arrhenius, Mechanism, Reaction, ReverseRate, Species, ThirdBody};
pub use parser::{
    parse_mechanism, parse_mechanism_with_thermo, parse_thermo, write_mechanism, ParseDiagnostic,
    Severity, ThermoEntry,
};
pub use rates::{
    element_totals, equilibrium_reverse_rate, net_production_rates, rate_constant, P_REF_ATM,
    R_ATM_CM3, R_CAL,
};
pub use thermo::{nasa7_props, Nasa7, ThermoProps};
