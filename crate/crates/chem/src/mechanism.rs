//! Mechanism data model: species, reactions, and validation.
//!
//! Units follow the cm-mol-s-K-cal convention throughout: concentrations in
//! mol/cm^3, pre-exponential factors in the matching cm^3/mol powers, and
//! activation energies in cal/mol.

use std::collections::{BTreeMap, HashSet};

use crate::error::ChemError;
use crate::thermo::Nasa7;

/// One chemical species: name, elemental composition, optional thermo fit.
#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub name: String,
    /// Element symbol -> atom count.
    pub composition: BTreeMap<String, u32>,
    pub thermo: Option<Nasa7>,
}

/// Modified Arrhenius parameters: k(T) = a * T^b * exp(-e_a / (R T)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrhenius {
    /// Pre-exponential factor (cm-mol-s units for the reaction order).
    pub a: f64,
    /// Temperature exponent.
    pub b: f64,
    /// Activation energy in cal/mol.
    pub e_a: f64,
}

/// How the reverse direction of a reaction is determined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReverseRate {
    /// Irreversible.
    None,
    /// Explicit reverse Arrhenius parameters.
    Explicit(Arrhenius),
    /// Reverse rate from the equilibrium constant and the forward rate.
    FromEquilibrium,
}

/// Third-body collision partner with per-species efficiencies.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThirdBody {
    /// Species index -> efficiency; species not listed have efficiency 1.
    pub efficiencies: BTreeMap<usize, f64>,
}

impl ThirdBody {
    pub fn efficiency(&self, species: usize) -> f64 {
        self.efficiencies.get(&species).copied().unwrap_or(1.0)
    }
}

/// One elementary reaction, with participants stored by species index.
#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    /// (species index, stoichiometric coefficient), sorted by index.
    pub reactants: Vec<(usize, u32)>,
    pub products: Vec<(usize, u32)>,
    pub forward: Arrhenius,
    pub reverse: ReverseRate,
    pub third_body: Option<ThirdBody>,
    /// Flagged as an intentional duplicate of another reaction.
    pub duplicate: bool,
}

impl Reaction {
    /// Total molecularity of one side, counting the third body as one.
    fn molecularity(side: &[(usize, u32)], third_body: bool) -> u32 {
        side.iter().map(|&(_, nu)| nu).sum::<u32>() + u32::from(third_body)
    }

    pub fn forward_molecularity(&self) -> u32 {
        Self::molecularity(&self.reactants, self.third_body.is_some())
    }

    pub fn reverse_molecularity(&self) -> u32 {
        Self::molecularity(&self.products, self.third_body.is_some())
    }

    /// Net stoichiometric change for `species`: products minus reactants.
    pub fn net_stoich(&self, species: usize) -> i64 {
        let take = |side: &[(usize, u32)]| {
            side.iter()
                .find(|&&(s, _)| s == species)
                .map_or(0i64, |&(_, nu)| i64::from(nu))
        };
        take(&self.products) - take(&self.reactants)
    }
}

/// A validated reaction mechanism.
#[derive(Debug, Clone, PartialEq)]
pub struct Mechanism {
    elements: Vec<String>,
    species: Vec<Species>,
    reactions: Vec<Reaction>,
}

impl Mechanism {
    /// Builds a mechanism, checking structural invariants:
    /// unique species names, in-range participant indices, elemental balance
    /// of every reaction, and molecularity at most 3 on any reacting side.
    pub fn new(
        elements: Vec<String>,
        species: Vec<Species>,
        reactions: Vec<Reaction>,
    ) -> Result<Self, ChemError> {
        let mut seen = HashSet::new();
        for s in &species {
            if !seen.insert(s.name.clone()) {
                return Err(ChemError::DuplicateSpecies {
                    name: s.name.clone(),
                });
            }
        }
        for (ri, r) in reactions.iter().enumerate() {
            for side in [&r.reactants, &r.products] {
                if side.is_empty() {
                    return Err(ChemError::InvalidMechanism(format!(
                        "reaction {ri} has an empty side"
                    )));
                }
                for &(s, nu) in side {
                    if s >= species.len() {
                        return Err(ChemError::UndeclaredSpecies {
                            reaction: ri,
                            index: s,
                            n_species: species.len(),
                        });
                    }
                    if nu == 0 {
                        return Err(ChemError::InvalidMechanism(format!(
                            "reaction {ri} lists species {s} with zero stoichiometry"
                        )));
                    }
                }
            }
            if let Some(tb) = &r.third_body {
                for (&s, &eff) in &tb.efficiencies {
                    if s >= species.len() {
                        return Err(ChemError::UndeclaredSpecies {
                            reaction: ri,
                            index: s,
                            n_species: species.len(),
                        });
                    }
                    if !eff.is_finite() || eff < 0.0 {
                        return Err(ChemError::InvalidMechanism(format!(
                            "reaction {ri} has a negative or non-finite efficiency for species {s}"
                        )));
                    }
                }
            }
            for (arr, _what) in Self::rate_params(r) {
                if !arr.a.is_finite() || arr.a <= 0.0 || !arr.b.is_finite() || !arr.e_a.is_finite()
                {
                    return Err(ChemError::InvalidMechanism(format!(
                        "reaction {ri} has invalid Arrhenius parameters"
                    )));
                }
            }
            Self::check_balance(ri, r, &species)?;
            let fwd = r.forward_molecularity();
            if fwd > 3 {
                return Err(ChemError::UnsupportedOrder {
                    reaction: ri,
                    direction: "forward",
                    molecularity: fwd,
                });
            }
            if !matches!(r.reverse, ReverseRate::None) {
                let rev = r.reverse_molecularity();
                if rev > 3 {
                    return Err(ChemError::UnsupportedOrder {
                        reaction: ri,
                        direction: "reverse",
                        molecularity: rev,
                    });
                }
            }
        }
        Ok(Self {
            elements,
            species,
            reactions,
        })
    }

    fn rate_params(r: &Reaction) -> Vec<(Arrhenius, &'static str)> {
        let mut out = vec![(r.forward, "forward")];
        if let ReverseRate::Explicit(arr) = r.reverse {
            out.push((arr, "reverse"));
        }
        out
    }

    fn check_balance(ri: usize, r: &Reaction, species: &[Species]) -> Result<(), ChemError> {
        let count = |side: &[(usize, u32)], element: &str| {
            side.iter()
                .map(|&(s, nu)| nu * species[s].composition.get(element).copied().unwrap_or(0))
                .sum::<u32>()
        };
        let mut touched: Vec<&String> = r
            .reactants
            .iter()
            .chain(r.products.iter())
            .flat_map(|&(s, _)| species[s].composition.keys())
            .collect();
        touched.sort();
        touched.dedup();
        for element in touched {
            let lhs = count(&r.reactants, element);
            let rhs = count(&r.products, element);
            if lhs != rhs {
                return Err(ChemError::Unbalanced {
                    reaction: ri,
                    element: element.clone(),
                    lhs,
                    rhs,
                });
            }
        }
        Ok(())
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    /// Index of a species by name.
    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.species.iter().position(|s| s.name == name)
    }

    /// Largest polynomial degree the rate laws produce: the maximum
    /// molecularity over all reacting directions.
    pub fn max_molecularity(&self) -> u32 {
        self.reactions
            .iter()
            .flat_map(|r| {
                let rev = if matches!(r.reverse, ReverseRate::None) {
                    0
                } else {
                    r.reverse_molecularity()
                };
                [r.forward_molecularity(), rev]
            })
            .max()
            .unwrap_or(0)
    }
}
