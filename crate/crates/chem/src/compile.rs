//! Compilation of a mechanism into polynomial ODE coefficient matrices.
//!
//! At a frozen temperature every mass-action rate is a monomial in the
//! concentrations, so the full right-hand side assembles into
//! dc/dt = A_1 c + A_2 c^(2) + A_3 c^(3), where c^(j) is the j-fold
//! Kronecker power. Each monomial lands in the canonical column of A_j given
//! by its sorted species tuple; equivalent unsorted columns stay empty.

use carleman_core::sparse::SparseMatrix;
use carleman_core::poly::PolynomialSystem;

use crate::error::ChemError;
use crate::mechanism::{Mechanism, ReverseRate};
use crate::rates::{equilibrium_reverse_rate, rate_constant};

/// Column index of the monomial c[t_0] c[t_1] ... c[t_{j-1}] in A_j, for an
/// ascending-sorted tuple.
fn canonical_column(tuple: &[usize], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &s| acc * n + s)
}

/// Compiles the mechanism at fixed temperature `t` (K) into a polynomial
/// system over species concentrations (mol/cm^3).
pub fn to_polynomial(m: &Mechanism, t: f64) -> Result<PolynomialSystem, ChemError> {
    let n = m.n_species();
    let degree = m.max_molecularity().max(1) as usize;
    if degree > 3 {
        // Mechanism validation already enforces this; keep a local guard so a
        // hand-built pathological mechanism cannot slip through.
        let (ri, r) = m
            .reactions()
            .iter()
            .enumerate()
            .max_by_key(|(_, r)| r.forward_molecularity().max(r.reverse_molecularity()))
            .expect("degree > 0 implies at least one reaction");
        return Err(ChemError::UnsupportedOrder {
            reaction: ri,
            direction: "forward",
            molecularity: r.forward_molecularity().max(r.reverse_molecularity()),
        });
    }
    let mut triplets: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); degree];

    for r in m.reactions() {
        // Signed rate coefficients per direction; the reverse direction runs
        // over the product tuple and subtracts.
        let mut directions: Vec<(&[(usize, u32)], f64)> =
            vec![(&r.reactants, rate_constant(&r.forward, t)?)];
        match r.reverse {
            ReverseRate::None => {}
            ReverseRate::Explicit(arr) => {
                directions.push((&r.products, -rate_constant(&arr, t)?));
            }
            ReverseRate::FromEquilibrium => {
                directions.push((&r.products, -equilibrium_reverse_rate(m, r, t)?));
            }
        }

        let mut participants: Vec<usize> = r
            .reactants
            .iter()
            .chain(r.products.iter())
            .map(|&(s, _)| s)
            .collect();
        participants.sort_unstable();
        participants.dedup();

        for (side, k) in directions {
            let mut tuple: Vec<usize> = Vec::new();
            for &(s, nu) in side {
                tuple.extend(std::iter::repeat_n(s, nu as usize));
            }
            tuple.sort_unstable();

            let mut monomials: Vec<(Vec<usize>, f64)> = Vec::new();
            match &r.third_body {
                None => monomials.push((tuple, k)),
                Some(tb) => {
                    for partner in 0..n {
                        let eff = tb.efficiency(partner);
                        if eff == 0.0 {
                            continue;
                        }
                        let mut extended = tuple.clone();
                        extended.push(partner);
                        extended.sort_unstable();
                        monomials.push((extended, k * eff));
                    }
                }
            }

            for (tuple, coeff) in monomials {
                let j = tuple.len();
                debug_assert!(j >= 1 && j <= degree);
                let col = canonical_column(&tuple, n);
                for &s in &participants {
                    let net = r.net_stoich(s);
                    if net != 0 {
                        triplets[j - 1].push((s, col, net as f64 * coeff));
                    }
                }
            }
        }
    }

    let mut coeffs = Vec::with_capacity(degree);
    for (jm1, trips) in triplets.into_iter().enumerate() {
        let cols = n
            .checked_pow(jm1 as u32 + 1)
            .ok_or_else(|| ChemError::InvalidMechanism("monomial space overflows".into()))?;
        coeffs.push(SparseMatrix::from_triplets(n, cols, trips)?);
    }
    Ok(PolynomialSystem::new(n, coeffs)?)
}
