//! Polynomial ODE right-hand sides F(x) = sum_j A_j x^(j) and their
//! analytic Jacobians, with x^(j) the j-fold Kronecker power of the state.

use crate::error::{checked_mul_hint, Error};
use crate::sparse::{kron_vec, SparseMatrix};

/// dx/dt = Σ_{j=1..degree} A_j · x^⊗j with A_j of shape N × N^j.
#[derive(Debug, Clone)]
pub struct PolynomialSystem {
    n_state: usize,
    coeffs: Vec<SparseMatrix>,
}

impl PolynomialSystem {
    /// `coeffs[j-1]` is A_j and must be `n_state x n_state^j`.
    pub fn new(n_state: usize, coeffs: Vec<SparseMatrix>) -> Result<Self, Error> {
        if n_state == 0 {
            return Err(Error::InvalidConfig("state dimension must be at least 1".into()));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidConfig("at least one coefficient matrix required".into()));
        }
        let mut expected_cols = 1usize;
        for a in &coeffs {
            expected_cols = checked_mul_hint(
                expected_cols,
                n_state,
                "polynomial coefficient width n_state^j",
            )?;
            if a.rows() != n_state || a.cols() != expected_cols {
                return Err(Error::ShapeMismatch {
                    expected_rows: n_state,
                    expected_cols,
                    rows: a.rows(),
                    cols: a.cols(),
                });
            }
        }
        Ok(Self { n_state, coeffs })
    }

    pub fn n_state(&self) -> usize {
        self.n_state
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// A_j for j in 1..=degree.
    pub fn coeff(&self, j: usize) -> &SparseMatrix {
        &self.coeffs[j - 1]
    }

    pub fn coeffs(&self) -> &[SparseMatrix] {
        &self.coeffs
    }

    /// F(x) = Σ_j A_j · x^⊗j.
    pub fn eval_rhs(&self, x: &[f64]) -> Result<Vec<f64>, Error> {
        if x.len() != self.n_state {
            return Err(Error::VectorLength { expected: self.n_state, found: x.len() });
        }
        let mut out = vec![0.0; self.n_state];
        let mut power = vec![1.0];
        for a in &self.coeffs {
            power = kron_vec(&power, x)?;
            a.spmv_acc(1.0, &power, &mut out)?;
        }
        Ok(out)
    }

    /// Analytic Jacobian J = Σ_j A_j · (Σ_{k=1..j} x^⊗(k−1) ⊗ I ⊗ x^⊗(j−k)).
    ///
    /// Built entry-by-entry rather than through explicit Kronecker factors:
    /// each stored A_j entry (r, q, v) contributes v · ∂(x^⊗j)[q]/∂x[m] to
    /// J[r, m], read off by decomposing the column index q in base N.
    pub fn jacobian(&self, x: &[f64]) -> Result<SparseMatrix, Error> {
        if x.len() != self.n_state {
            return Err(Error::VectorLength { expected: self.n_state, found: x.len() });
        }
        let n = self.n_state;
        // powers[p] = n^p, enough for the widest coefficient.
        let mut npow = vec![1usize];
        for _ in 0..self.degree() {
            npow.push(npow.last().unwrap() * n);
        }
        let mut triplets = Vec::new();
        for (jm1, a) in self.coeffs.iter().enumerate() {
            let j = jm1 + 1;
            for (r, q, v) in a.entries() {
                // q encodes digits (d_1..d_j) base n; differentiating the
                // k-th factor leaves the product of x over the other digits.
                for k in 1..=j {
                    let hi = q / npow[j - k + 1];
                    let mid = (q / npow[j - k]) % n;
                    let lo = q % npow[j - k];
                    let mut coeff = v;
                    let mut pre = hi;
                    for _ in 0..k - 1 {
                        coeff *= x[pre % n];
                        pre /= n;
                    }
                    let mut suf = lo;
                    for _ in 0..j - k {
                        coeff *= x[suf % n];
                        suf /= n;
                    }
                    if coeff != 0.0 {
                        triplets.push((r, mid, coeff));
                    }
                }
            }
        }
        SparseMatrix::from_triplets(n, n, triplets)
    }
}

/// i-fold Kronecker power of a dense vector; `i = 0` yields the scalar `[1]`.
pub fn kron_power(x: &[f64], i: usize) -> Result<Vec<f64>, Error> {
    let mut out = vec![1.0];
    for _ in 0..i {
        out = kron_vec(&out, x)?;
    }
    Ok(out)
}
