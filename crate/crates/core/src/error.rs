use thiserror::Error;

/// Errors shared by the sparse kernels, the Carleman assembly and the steppers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A dimension product left the addressable range (`usize`).
    #[error("dimension overflow: {a} x {b} exceeds the addressable range{}", hint_text(.hint))]
    DimensionOverflow { a: usize, b: usize, hint: Option<&'static str> },

    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    ShapeMismatch { expected_rows: usize, expected_cols: usize, rows: usize, cols: usize },

    #[error("vector length {found} does not match expected {expected}")]
    VectorLength { expected: usize, found: usize },

    #[error("entry ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    IndexOutOfBounds { row: usize, col: usize, rows: usize, cols: usize },

    #[error("non-finite value {value} at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize, value: f64 },

    /// A diagonal block of a block upper-triangular system is numerically singular.
    #[error("singular diagonal block {block}")]
    SingularBlock { block: usize },

    #[error("singular matrix (pivot below threshold at column {col})")]
    SingularMatrix { col: usize },

    #[error("divergence detected at t = {t:e}")]
    DivergenceDetected { t: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

fn hint_text(hint: &Option<&'static str>) -> String {
    match hint {
        Some(h) => format!(" ({h})"),
        None => String::new(),
    }
}

/// `a * b` with overflow reported as an error instead of a panic.
pub(crate) fn checked_mul(a: usize, b: usize) -> Result<usize, Error> {
    a.checked_mul(b)
        .ok_or(Error::DimensionOverflow { a, b, hint: None })
}

/// `checked_mul` variant used where a smaller truncation order would help.
pub(crate) fn checked_mul_hint(a: usize, b: usize, hint: &'static str) -> Result<usize, Error> {
    a.checked_mul(b)
        .ok_or(Error::DimensionOverflow { a, b, hint: Some(hint) })
}
