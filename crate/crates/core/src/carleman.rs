//! Truncated linearization of polynomial ODE systems.
//!
//! The state x is lifted to X = (x, x^⊗2, …, x^⊗n_t); the polynomial
//! right-hand side becomes a single block upper-triangular matrix acting on
//! X. Couplings into powers beyond n_t are dropped; that drop is the whole
//! truncation error, and everything downstream exists to study it.

use crate::block::BlockMatrix;
use crate::error::{checked_mul_hint, Error};
use crate::poly::PolynomialSystem;
use crate::sparse::{kron, kron_vec, SparseMatrix};

const NT_HINT: &str = "lifted dimension; try a smaller truncation order";

/// Total lifted dimension Σ_{k=1..n_t} n^k.
pub fn lifted_dim(n_state: usize, n_t: usize) -> Result<usize, Error> {
    let mut total = 0usize;
    let mut p = 1usize;
    for _ in 0..n_t {
        p = checked_mul_hint(p, n_state, NT_HINT)?;
        total = total
            .checked_add(p)
            .ok_or(Error::DimensionOverflow { a: total, b: p, hint: Some(NT_HINT) })?;
    }
    Ok(total)
}

/// Coupling matrix from the (i+j−1)-th Kronecker power into d(x^⊗i)/dt,
/// induced by the degree-j coefficient: base case the coefficient itself,
/// then one product-rule expansion per extra power,
/// `T_j^i = A_j ⊗ I^⊗(i−1) + I ⊗ T_j^(i−1)`.
pub fn transfer_block(
    a_j: &SparseMatrix,
    j: usize,
    i: usize,
    n_state: usize,
) -> Result<SparseMatrix, Error> {
    if j == 0 || i == 0 {
        return Err(Error::InvalidConfig("transfer_block needs j >= 1 and i >= 1".into()));
    }
    let mut cols = n_state;
    for _ in 1..j {
        cols = checked_mul_hint(cols, n_state, NT_HINT)?;
    }
    if a_j.rows() != n_state || a_j.cols() != cols {
        return Err(Error::ShapeMismatch {
            expected_rows: n_state,
            expected_cols: cols,
            rows: a_j.rows(),
            cols: a_j.cols(),
        });
    }
    let eye = SparseMatrix::identity(n_state);
    let mut cur = a_j.clone();
    let mut ident_order = 1usize;
    for _ in 2..=i {
        ident_order = checked_mul_hint(ident_order, n_state, NT_HINT)?;
        let left = kron(a_j, &SparseMatrix::identity(ident_order))?;
        let right = kron(&eye, &cur)?;
        cur = left.add(&right)?;
    }
    Ok(cur)
}

/// A polynomial system together with its truncated lifted matrix.
#[derive(Debug, Clone)]
pub struct CarlemanSystem {
    base: PolynomialSystem,
    n_t: usize,
    a_c: BlockMatrix,
}

/// Build the truncated lifted matrix for `sys` at truncation order `n_t`.
///
/// Block (i, c) is present exactly when c = i + j − 1 for some degree j of
/// the system and c ≤ n_t; couplings past n_t are dropped silently.
pub fn assemble(sys: &PolynomialSystem, n_t: usize) -> Result<CarlemanSystem, Error> {
    if n_t == 0 {
        return Err(Error::InvalidConfig("truncation order must be at least 1".into()));
    }
    let n = sys.n_state();
    let mut dims = Vec::with_capacity(n_t);
    let mut p = 1usize;
    for _ in 0..n_t {
        p = checked_mul_hint(p, n, NT_HINT)?;
        dims.push(p);
    }
    let mut a_c = BlockMatrix::new(dims.clone())?;
    let eye = SparseMatrix::identity(n);
    for j in 1..=sys.degree() {
        let a_j = sys.coeff(j);
        let mut cur = a_j.clone();
        let mut i = 1usize;
        while i + j - 1 <= n_t {
            let next = if i + j <= n_t {
                let left = kron(a_j, &SparseMatrix::identity(dims[i - 1]))?;
                let right = kron(&eye, &cur)?;
                Some(left.add(&right)?)
            } else {
                None
            };
            a_c.insert_block(i - 1, i + j - 2, cur)?;
            match next {
                Some(nx) => cur = nx,
                None => break,
            }
            i += 1;
        }
    }
    Ok(CarlemanSystem { base: sys.clone(), n_t, a_c })
}

impl CarlemanSystem {
    pub fn base(&self) -> &PolynomialSystem {
        &self.base
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn n_state(&self) -> usize {
        self.base.n_state()
    }

    pub fn a_c(&self) -> &BlockMatrix {
        &self.a_c
    }

    /// Block boundaries [0, N, N+N², …]; length n_t + 1.
    pub fn offsets(&self) -> &[usize] {
        self.a_c.offsets()
    }

    pub fn dim(&self) -> usize {
        self.a_c.dim()
    }

    pub fn nnz(&self) -> usize {
        self.a_c.nnz()
    }
}

/// Stacked Kronecker powers of a physical state.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedState {
    values: Vec<f64>,
    n_state: usize,
    n_t: usize,
}

impl LiftedState {
    /// Wrap an existing flat vector; length must match the block layout.
    pub fn new(values: Vec<f64>, n_state: usize, n_t: usize) -> Result<Self, Error> {
        let expected = lifted_dim(n_state, n_t)?;
        if values.len() != expected {
            return Err(Error::VectorLength { expected, found: values.len() });
        }
        Ok(Self { values, n_state, n_t })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn n_state(&self) -> usize {
        self.n_state
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    /// Slice holding the i-th Kronecker power, i in 1..=n_t.
    pub fn block(&self, i: usize) -> &[f64] {
        assert!(i >= 1 && i <= self.n_t, "block index {i} outside 1..={}", self.n_t);
        let mut start = 0usize;
        let mut len = self.n_state;
        for _ in 1..i {
            start += len;
            len *= self.n_state;
        }
        &self.values[start..start + len]
    }
}

/// X = (x, x^⊗2, …, x^⊗n_t).
pub fn lift(x: &[f64], n_t: usize) -> Result<LiftedState, Error> {
    if n_t == 0 {
        return Err(Error::InvalidConfig("truncation order must be at least 1".into()));
    }
    let n = x.len();
    let mut values = Vec::with_capacity(lifted_dim(n, n_t)?);
    let mut power = x.to_vec();
    values.extend_from_slice(&power);
    for _ in 1..n_t {
        power = kron_vec(&power, x)?;
        values.extend_from_slice(&power);
    }
    LiftedState::new(values, n, n_t)
}

/// Physical state = first block of the lifted vector.
pub fn readout(x: &LiftedState) -> Vec<f64> {
    x.block(1).to_vec()
}

/// Change of variable z = x/γ: the degree-j coefficient picks up γ^{j−1}.
/// Trajectories of the result, multiplied by γ, reproduce the original's.
pub fn rescale_system(sys: &PolynomialSystem, gamma: f64) -> Result<PolynomialSystem, Error> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidConfig(format!("scale factor must be positive and finite, got {gamma}")));
    }
    let coeffs = sys
        .coeffs()
        .iter()
        .enumerate()
        .map(|(jm1, a)| a.scale(gamma.powi(jm1 as i32)))
        .collect();
    PolynomialSystem::new(sys.n_state(), coeffs)
}

/// How far the higher blocks have drifted from being actual Kronecker
/// powers of the readout: max over blocks of the ∞-norm difference. Zero
/// for freshly lifted states; grows as truncated dynamics decohere.
pub fn consistency_defect(x: &LiftedState) -> f64 {
    let base = readout(x);
    let mut defect = 0.0f64;
    let mut power = base.clone();
    for i in 1..=x.n_t() {
        if i > 1 {
            power = kron_vec(&power, &base).expect("power length already allocated");
        }
        for (a, b) in x.block(i).iter().zip(&power) {
            defect = defect.max((a - b).abs());
        }
    }
    defect
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::kron_power;

    fn sm(rows: usize, cols: usize, t: &[(usize, usize, f64)]) -> SparseMatrix {
        SparseMatrix::from_triplets(rows, cols, t.iter().copied()).unwrap()
    }

    fn scalar_decay(alpha: f64) -> PolynomialSystem {
        PolynomialSystem::new(
            1,
            vec![SparseMatrix::zero(1, 1), sm(1, 1, &[(0, 0, -alpha)])],
        )
        .unwrap()
    }

    fn random_matrix(
        rng: &mut rand_chacha::ChaCha8Rng,
        rows: usize,
        cols: usize,
        density: f64,
    ) -> SparseMatrix {
        use rand::Rng;
        let mut t = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if rng.gen_bool(density) {
                    t.push((r, c, rng.gen_range(-2.0..2.0)));
                }
            }
        }
        SparseMatrix::from_triplets(rows, cols, t).unwrap()
    }

    /// Independent form of the transfer matrix: sum over which factor of
    /// the Kronecker power the coefficient acts on.
    fn transfer_by_summation(a_j: &SparseMatrix, j: usize, i: usize, n: usize) -> SparseMatrix {
        let mut acc = SparseMatrix::zero(n.pow(i as u32), n.pow((i + j - 1) as u32));
        for k in 1..=i {
            let left = SparseMatrix::identity(n.pow((k - 1) as u32));
            let right = SparseMatrix::identity(n.pow((i - k) as u32));
            let term = kron(&kron(&left, a_j).unwrap(), &right).unwrap();
            acc = acc.add(&term).unwrap();
        }
        acc
    }

    #[test]
    fn transfer_base_case_is_the_coefficient() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=3usize {
            for j in 1..=3usize {
                let a = random_matrix(&mut rng, n, n.pow(j as u32), 0.7);
                assert_eq!(transfer_block(&a, j, 1, n).unwrap(), a);
            }
        }
    }

    #[test]
    fn scalar_transfer_scales_linearly() {
        let a2 = sm(1, 1, &[(0, 0, -1.0)]);
        for i in 1..=4usize {
            let t = transfer_block(&a2, 2, i, 1).unwrap();
            assert_eq!(t.to_dense(), vec![vec![-(i as f64)]]);
        }
    }

    #[test]
    fn recursion_matches_summation_formula() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        for n in 1..=3usize {
            for j in 1..=3usize {
                for i in 1..=4usize {
                    let a = random_matrix(&mut rng, n, n.pow(j as u32), 0.6);
                    let rec = transfer_block(&a, j, i, n).unwrap();
                    let sum = transfer_by_summation(&a, j, i, n);
                    let re: Vec<_> = rec.entries().collect();
                    let se: Vec<_> = sum.entries().collect();
                    assert_eq!(re.len(), se.len(), "n={n} j={j} i={i}");
                    for (a, b) in re.iter().zip(&se) {
                        assert_eq!((a.0, a.1), (b.0, b.1));
                        assert!((a.2 - b.2).abs() <= 1e-14 * a.2.abs().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn transfer_rejects_bad_shapes() {
        let a = SparseMatrix::zero(2, 2);
        assert!(matches!(
            transfer_block(&a, 2, 1, 2),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(transfer_block(&a, 1, 3, 2).is_ok());
    }

    #[test]
    fn assemble_first_order_is_the_linear_part() {
        let a1 = sm(2, 2, &[(0, 1, 1.0), (1, 0, -1.0)]);
        let sys = PolynomialSystem::new(2, vec![a1.clone(), SparseMatrix::zero(2, 4)]).unwrap();
        let cs = assemble(&sys, 1).unwrap();
        assert_eq!(cs.dim(), 2);
        assert_eq!(cs.a_c().block(0, 0), Some(&a1));
    }

    #[test]
    fn scalar_assembly_is_shifted_superdiagonal() {
        let cs = assemble(&scalar_decay(1.0), 4).unwrap();
        assert_eq!(cs.dim(), 4);
        let dense = cs.a_c().to_sparse().unwrap().to_dense();
        let expected = vec![
            vec![0.0, -1.0, 0.0, 0.0],
            vec![0.0, 0.0, -2.0, 0.0],
            vec![0.0, 0.0, 0.0, -3.0],
            vec![0.0, 0.0, 0.0, 0.0],
        ];
        assert_eq!(dense, expected);
        // Band structure: diagonal blocks from the (zero) linear part are
        // present, the coupling one past the truncation is not.
        assert!(cs.a_c().block(3, 3).is_some());
        assert!(cs.a_c().block(0, 2).is_none());
    }

    #[test]
    fn dimension_formula() {
        for n in 1..=5usize {
            for n_t in 1..=4usize {
                let direct: usize = (1..=n_t).map(|k| n.pow(k as u32)).sum();
                assert_eq!(lifted_dim(n, n_t).unwrap(), direct);
                if n >= 2 {
                    let geometric = (n.pow(n_t as u32 + 1) - n) / (n - 1);
                    assert_eq!(direct, geometric);
                } else {
                    assert_eq!(direct, n_t);
                }
            }
        }
        assert_eq!(lifted_dim(9, 2).unwrap(), 90);
        assert_eq!(lifted_dim(9, 3).unwrap(), 819);
    }

    #[test]
    fn lift_and_readout_round_trip() {
        assert_eq!(lift(&[1.0], 4).unwrap().values(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(lift(&[2.0], 3).unwrap().values(), &[2.0, 4.0, 8.0]);
        assert_eq!(
            lift(&[1.0, 2.0], 2).unwrap().values(),
            &[1.0, 2.0, 1.0, 2.0, 2.0, 4.0]
        );
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..3 {
            let n = rng.gen_range(1..=4);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let lifted = lift(&x, 3).unwrap();
            assert_eq!(readout(&lifted), x);
        }
    }

    #[test]
    fn lifted_state_blocks() {
        let l = lift(&[1.0, 2.0], 3).unwrap();
        assert_eq!(l.block(1), &[1.0, 2.0]);
        assert_eq!(l.block(2), &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(l.block(3).len(), 8);
        assert!(LiftedState::new(vec![0.0; 5], 2, 2).is_err());
    }

    #[test]
    fn derivative_identity_below_truncation_boundary() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        for _ in 0..10 {
            let n = rng.gen_range(1..=3);
            let d = rng.gen_range(1..=3usize);
            let n_t = 5usize;
            let mut coeffs = Vec::new();
            let mut cols = 1usize;
            for _ in 0..d {
                cols *= n;
                coeffs.push(random_matrix(&mut rng, n, cols, 0.5));
            }
            let sys = PolynomialSystem::new(n, coeffs).unwrap();
            let cs = assemble(&sys, n_t).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lifted = lift(&x, n_t).unwrap();
            let dx = cs.a_c().spmv(lifted.values()).unwrap();
            let f = sys.eval_rhs(&x).unwrap();
            let off = cs.offsets();
            for i in 1..=n_t {
                if i + d - 1 > n_t {
                    break;
                }
                // Product rule: d(x^⊗i)/dt = Σ_k x^⊗(k−1) ⊗ F(x) ⊗ x^⊗(i−k).
                let mut expect = vec![0.0; n.pow(i as u32)];
                for k in 1..=i {
                    let pre = kron_power(&x, k - 1).unwrap();
                    let suf = kron_power(&x, i - k).unwrap();
                    let term = kron_vec(&kron_vec(&pre, &f).unwrap(), &suf).unwrap();
                    for (e, t) in expect.iter_mut().zip(&term) {
                        *e += t;
                    }
                }
                let got = &dx[off[i - 1]..off[i]];
                for (g, e) in got.iter().zip(&expect) {
                    assert!((g - e).abs() <= 1e-12 * e.abs().max(1.0), "block {i}: {g} vs {e}");
                }
            }
        }
    }

    #[test]
    fn rescale_identity_and_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        let sys = PolynomialSystem::new(
            2,
            vec![
                random_matrix(&mut rng, 2, 2, 0.8),
                random_matrix(&mut rng, 2, 4, 0.5),
                random_matrix(&mut rng, 2, 8, 0.3),
            ],
        )
        .unwrap();
        let same = rescale_system(&sys, 1.0).unwrap();
        for j in 1..=3 {
            assert_eq!(same.coeff(j), sys.coeff(j));
        }
        for _ in 0..5 {
            let gamma = rng.gen_range(0.1..4.0);
            let back = rescale_system(&rescale_system(&sys, gamma).unwrap(), 1.0 / gamma).unwrap();
            for j in 1..=3usize {
                for ((r1, c1, v1), (r2, c2, v2)) in sys.coeff(j).entries().zip(back.coeff(j).entries())
                {
                    assert_eq!((r1, c1), (r2, c2));
                    assert!((v1 - v2).abs() <= 1e-14 * v1.abs().max(1.0));
                }
            }
        }
        assert!(rescale_system(&sys, 0.0).is_err());
        assert!(rescale_system(&sys, -1.0).is_err());
    }

    #[test]
    fn rescaled_scalar_trajectory_matches_analytic() {
        // z = x/2 turns dx/dt = -x^2 into dz/dt = -2 z^2; from z0 = 0.5 the
        // closed form is z(t) = 1/(2 + 2t).
        let scaled = rescale_system(&scalar_decay(1.0), 2.0).unwrap();
        assert_eq!(scaled.coeff(2).get(0, 0), -2.0);
        let mut z = vec![0.5];
        let dt = 1e-5;
        for _ in 0..100_000 {
            let f = scaled.eval_rhs(&z).unwrap();
            z[0] += dt * f[0];
        }
        assert!((z[0] - 0.25).abs() < 1e-4, "z(1) = {}", z[0]);

        // And the half-scale direction: w = x/0.5 obeys dw/dt = -0.5 w^2,
        // w(t) = 2/(1 + t).
        let half = rescale_system(&scalar_decay(1.0), 0.5).unwrap();
        let mut w = vec![2.0];
        for _ in 0..100_000 {
            let f = half.eval_rhs(&w).unwrap();
            w[0] += dt * f[0];
        }
        assert!((w[0] - 1.0).abs() < 1e-4, "w(1) = {}", w[0]);
    }

    #[test]
    fn consistency_defect_cases() {
        let fresh = lift(&[0.3, -0.7, 1.1], 3).unwrap();
        assert_eq!(consistency_defect(&fresh), 0.0);
        let mut perturbed = lift(&[1.0, 2.0], 3).unwrap();
        perturbed.values_mut()[2] += 1.0;
        assert_eq!(consistency_defect(&perturbed), 1.0);
    }
}
