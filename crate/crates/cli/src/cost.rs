//! Size and sparsity forecasts for the lifted system, without building it.

use carleman_core::lifted_dim;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct CostEstimate {
    pub dim: usize,
    /// Upper bound on the lifted matrix population, from the per-degree
    /// nonzero counts of the base system; absent when no counts are given.
    pub nnz_estimate: Option<usize>,
    /// dim(n_t) / dim(n_t - 1); absent at the first order.
    pub ratio_to_prev_order: Option<f64>,
}

/// Forecast for `n_state` variables at truncation order `n_t`.
/// `block_nnz[j-1]` is the nonzero count of the degree-j coefficient of the
/// base system; pass an empty slice when unknown.
pub fn cost_estimate(
    n_state: usize,
    n_t: usize,
    block_nnz: &[usize],
) -> Result<CostEstimate, CliError> {
    if n_state == 0 || n_t == 0 {
        return Err(CliError::Invalid(
            "cost estimate needs at least one variable and order one".into(),
        ));
    }
    let dim = lifted_dim(n_state, n_t)?;
    let ratio_to_prev_order = if n_t > 1 {
        Some(dim as f64 / lifted_dim(n_state, n_t - 1)? as f64)
    } else {
        None
    };

    let nnz_estimate = if block_nnz.is_empty() {
        None
    } else {
        // Block (i, i+j-1) is a sum of i Kronecker terms, each with
        // nnz(A_j) * n^(i-1) entries; overlaps make this an upper bound.
        let mut total: usize = 0;
        for i in 1..=n_t {
            let fan = n_state
                .checked_pow((i - 1) as u32)
                .ok_or_else(|| CliError::Invalid("nnz estimate overflows".into()))?;
            for (j, &nnz) in block_nnz.iter().enumerate() {
                let j = j + 1;
                if i + j - 1 > n_t {
                    continue;
                }
                let term = i
                    .checked_mul(fan)
                    .and_then(|v| v.checked_mul(nnz))
                    .ok_or_else(|| CliError::Invalid("nnz estimate overflows".into()))?;
                total = total
                    .checked_add(term)
                    .ok_or_else(|| CliError::Invalid("nnz estimate overflows".into()))?;
            }
        }
        Some(total)
    };

    Ok(CostEstimate { dim, nnz_estimate, ratio_to_prev_order })
}
