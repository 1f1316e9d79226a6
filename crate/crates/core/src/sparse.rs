//! Sparse coordinate matrices and the Kronecker algebra built on them.
//!
//! Entries are kept canonical: sorted row-major with duplicates summed at
//! construction, so every downstream product, dump, and solve is
//! deterministic and files are reproducible bit for bit.

use std::fmt::Write as _;

use crate::error::{checked_mul, Error};

/// Sparse matrix in canonical coordinate form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    /// Sorted row-major, no duplicate (row, col), no explicit zeros, all finite.
    entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    /// Build from arbitrary triplets. Duplicates are summed (in input order,
    /// so the result is deterministic); entries that cancel to exactly zero
    /// are dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, Error> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::IndexOutOfBounds { row: r, col: c, rows, cols });
            }
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { row: r, col: c, value: v });
            }
            entries.push((r, c, v));
        }
        // Stable sort keeps duplicate contributions in input order.
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut canonical: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            match canonical.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => canonical.push((r, c, v)),
            }
        }
        canonical.retain(|&(_, _, v)| v != 0.0);
        Ok(Self { rows, cols, entries: canonical })
    }

    /// All-zero matrix of the given shape.
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: Vec::new() }
    }

    /// Identity of order `n`.
    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, 1.0)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Canonical (row, col, value) triplets, sorted row-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    /// Value at (row, col), zero if absent.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        match self.entries.binary_search_by_key(&(row, col), |&(r, c, _)| (r, c)) {
            Ok(i) => self.entries[i].2,
            Err(_) => 0.0,
        }
    }

    /// Largest absolute entry (zero for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, &(_, _, v)| m.max(v.abs()))
    }

    /// `self * v`.
    pub fn spmv(&self, v: &[f64]) -> Result<Vec<f64>, Error> {
        if v.len() != self.cols {
            return Err(Error::VectorLength { expected: self.cols, found: v.len() });
        }
        let mut out = vec![0.0; self.rows];
        for &(r, c, x) in &self.entries {
            out[r] += x * v[c];
        }
        Ok(out)
    }

    /// `out += alpha * self * v`, with `out` a preallocated slice.
    pub fn spmv_acc(&self, alpha: f64, v: &[f64], out: &mut [f64]) -> Result<(), Error> {
        if v.len() != self.cols {
            return Err(Error::VectorLength { expected: self.cols, found: v.len() });
        }
        if out.len() != self.rows {
            return Err(Error::VectorLength { expected: self.rows, found: out.len() });
        }
        for &(r, c, x) in &self.entries {
            out[r] += alpha * x * v[c];
        }
        Ok(())
    }

    /// Entrywise `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self, Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                expected_rows: self.rows,
                expected_cols: self.cols,
                rows: other.rows,
                cols: other.cols,
            });
        }
        Self::from_triplets(
            self.rows,
            self.cols,
            self.entries().chain(other.entries()),
        )
    }

    /// `alpha * self`.
    pub fn scale(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.entries.retain_mut(|e| {
            e.2 *= alpha;
            e.2 != 0.0
        });
        out
    }

    /// Dense copy, row-major. Intended for small matrices and tests.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            d[r][c] = v;
        }
        d
    }
}

/// Kronecker product `a (x) b`.
///
/// Entry ((i_a*b.rows + i_b), (j_a*b.cols + j_b)) = a[i_a, j_a] * b[i_b, j_b].
pub fn kron(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix, Error> {
    let rows = checked_mul(a.rows, b.rows)?;
    let cols = checked_mul(a.cols, b.cols)?;
    let mut triplets = Vec::with_capacity(a.nnz() * b.nnz());
    for (ra, ca, va) in a.entries() {
        for (rb, cb, vb) in b.entries() {
            triplets.push((ra * b.rows + rb, ca * b.cols + cb, va * vb));
        }
    }
    SparseMatrix::from_triplets(rows, cols, triplets)
}

/// Kronecker product of two dense vectors: result[i*y.len() + j] = x[i]*y[j].
pub fn kron_vec(x: &[f64], y: &[f64]) -> Result<Vec<f64>, Error> {
    let len = checked_mul(x.len(), y.len())?;
    let mut out = Vec::with_capacity(len);
    for &xi in x {
        for &yj in y {
            out.push(xi * yj);
        }
    }
    Ok(out)
}

/// Write in MatrixMarket coordinate format: 1-based indices, entries sorted
/// row-major. Values use the shortest round-trip representation so identical
/// matrices dump to identical bytes.
pub fn write_matrix_market(m: &SparseMatrix) -> String {
    let mut s = String::new();
    s.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(s, "{} {} {}", m.rows, m.cols, m.nnz());
    for (r, c, v) in m.entries() {
        let _ = writeln!(s, "{} {} {:e}", r + 1, c + 1, v);
    }
    s
}

/// Parse the subset of MatrixMarket written by [`write_matrix_market`]
/// (coordinate, real, general).
pub fn read_matrix_market(text: &str) -> Result<SparseMatrix, Error> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidConfig("empty MatrixMarket input".into()))?;
    if !header.starts_with("%%MatrixMarket matrix coordinate real general") {
        return Err(Error::InvalidConfig(format!("unsupported MatrixMarket header: {header}")));
    }
    let mut lines = lines.filter(|l| !l.starts_with('%'));
    let size = lines
        .next()
        .ok_or_else(|| Error::InvalidConfig("missing MatrixMarket size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::InvalidConfig(format!("bad MatrixMarket size line: {e}")))?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(Error::InvalidConfig("MatrixMarket size line needs 3 fields".into()));
    };
    let mut triplets = Vec::with_capacity(nnz);
    for line in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let [r, c, v] = toks[..] else {
            return Err(Error::InvalidConfig(format!("bad MatrixMarket entry: {line}")));
        };
        let parse_idx = |t: &str| {
            t.parse::<usize>()
                .map_err(|e| Error::InvalidConfig(format!("bad index {t}: {e}")))
        };
        let (r, c) = (parse_idx(r)?, parse_idx(c)?);
        if r == 0 || c == 0 {
            return Err(Error::InvalidConfig("MatrixMarket indices are 1-based".into()));
        }
        let v: f64 = v
            .parse()
            .map_err(|e| Error::InvalidConfig(format!("bad value {v}: {e}")))?;
        triplets.push((r - 1, c - 1, v));
    }
    if triplets.len() != nnz {
        return Err(Error::InvalidConfig(format!(
            "MatrixMarket entry count {} does not match declared {nnz}",
            triplets.len()
        )));
    }
    SparseMatrix::from_triplets(rows, cols, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sm(rows: usize, cols: usize, t: &[(usize, usize, f64)]) -> SparseMatrix {
        SparseMatrix::from_triplets(rows, cols, t.iter().copied()).unwrap()
    }

    #[test]
    fn duplicates_sum_and_zeros_drop() {
        let m = sm(2, 2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 1, 5.0), (1, 1, -5.0)]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.get(1, 1), 0.0);
    }

    #[test]
    fn rejects_out_of_range_and_non_finite() {
        assert!(matches!(
            SparseMatrix::from_triplets(2, 2, [(2, 0, 1.0)]),
            Err(Error::IndexOutOfBounds { .. })
        ));
        assert!(matches!(
            SparseMatrix::from_triplets(2, 2, [(0, 0, f64::NAN)]),
            Err(Error::NonFiniteEntry { .. })
        ));
    }

    #[test]
    fn identity_has_n_entries_and_acts_trivially() {
        let i3 = SparseMatrix::identity(3);
        assert_eq!(i3.nnz(), 3);
        let v = vec![1.0, 2.0, 3.0];
        assert_eq!(i3.spmv(&v).unwrap(), v);
        assert_eq!(SparseMatrix::identity(1).to_dense(), vec![vec![1.0]]);
    }

    #[test]
    fn spmv_hand_case() {
        // [[0,-1],[0,0]] * [1,1] = [-1,0]
        let m = sm(2, 2, &[(0, 1, -1.0)]);
        assert_eq!(m.spmv(&[1.0, 1.0]).unwrap(), vec![-1.0, 0.0]);
        let z = SparseMatrix::zero(3, 2);
        assert_eq!(z.spmv(&[4.0, 5.0]).unwrap(), vec![0.0; 3]);
        assert!(matches!(m.spmv(&[1.0]), Err(Error::VectorLength { .. })));
    }

    #[test]
    fn kron_identities() {
        let i2 = SparseMatrix::identity(2);
        let i3 = SparseMatrix::identity(3);
        assert_eq!(kron(&i2, &i3).unwrap(), SparseMatrix::identity(6));
        let a = sm(2, 2, &[(0, 1, 2.0), (1, 0, -1.0)]);
        let z = SparseMatrix::zero(3, 4);
        let az = kron(&a, &z).unwrap();
        assert_eq!((az.rows(), az.cols(), az.nnz()), (6, 8, 0));
    }

    #[test]
    fn kron_hand_expansion() {
        // [[1,2]] (x) [[0,3]] = [[0,3,0,6]]
        let a = sm(1, 2, &[(0, 0, 1.0), (0, 1, 2.0)]);
        let b = sm(1, 2, &[(0, 1, 3.0)]);
        let k = kron(&a, &b).unwrap();
        assert_eq!(k.to_dense(), vec![vec![0.0, 3.0, 0.0, 6.0]]);
    }

    #[test]
    fn kron_associative_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let dims: Vec<usize> = (0..6).map(|_| rng.gen_range(1..=4)).collect();
            let rand_m = |rng: &mut rand_chacha::ChaCha8Rng, r: usize, c: usize| {
                let mut t = Vec::new();
                for i in 0..r {
                    for j in 0..c {
                        if rng.gen_bool(0.5) {
                            t.push((i, j, rng.gen_range(-2.0..2.0)));
                        }
                    }
                }
                SparseMatrix::from_triplets(r, c, t).unwrap()
            };
            let a = rand_m(&mut rng, dims[0], dims[1]);
            let b = rand_m(&mut rng, dims[2], dims[3]);
            let c = rand_m(&mut rng, dims[4], dims[5]);
            let left = kron(&kron(&a, &b).unwrap(), &c).unwrap();
            let right = kron(&a, &kron(&b, &c).unwrap()).unwrap();
            assert_eq!(left.rows(), right.rows());
            assert_eq!(left.cols(), right.cols());
            let (le, re): (Vec<_>, Vec<_>) = (left.entries().collect(), right.entries().collect());
            assert_eq!(le.len(), re.len());
            for (l, r) in le.iter().zip(&re) {
                assert_eq!((l.0, l.1), (r.0, r.1));
                assert!((l.2 - r.2).abs() <= 1e-14 * l.2.abs().max(1.0));
            }
        }
    }

    #[test]
    fn mixed_product_property() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let (ra, ca) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            let (rb, cb) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            let mut ta = Vec::new();
            for i in 0..ra {
                for j in 0..ca {
                    ta.push((i, j, rng.gen_range(-1.0..1.0)));
                }
            }
            let mut tb = Vec::new();
            for i in 0..rb {
                for j in 0..cb {
                    tb.push((i, j, rng.gen_range(-1.0..1.0)));
                }
            }
            let a = SparseMatrix::from_triplets(ra, ca, ta).unwrap();
            let b = SparseMatrix::from_triplets(rb, cb, tb).unwrap();
            let x: Vec<f64> = (0..ca).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: Vec<f64> = (0..cb).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let lhs = kron(&a, &b).unwrap().spmv(&kron_vec(&x, &y).unwrap()).unwrap();
            let rhs = kron_vec(&a.spmv(&x).unwrap(), &b.spmv(&y).unwrap()).unwrap();
            for (l, r) in lhs.iter().zip(&rhs) {
                assert!((l - r).abs() <= 1e-12, "{l} vs {r}");
            }
        }
    }

    #[test]
    fn matrix_market_round_trip_and_golden_form() {
        let m = sm(2, 3, &[(0, 1, -1.5), (1, 0, 2.0), (1, 2, 0.25)]);
        let text = write_matrix_market(&m);
        assert_eq!(
            text,
            "%%MatrixMarket matrix coordinate real general\n\
             2 3 3\n\
             1 2 -1.5e0\n\
             2 1 2e0\n\
             2 3 2.5e-1\n"
        );
        assert_eq!(read_matrix_market(&text).unwrap(), m);
    }

    #[test]
    fn matrix_market_round_trip_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
            let mut t = Vec::new();
            for i in 0..r {
                for j in 0..c {
                    if rng.gen_bool(0.4) {
                        // Random bit patterns exercise exact round-tripping.
                        t.push((i, j, rng.gen_range(-1.0e8..1.0e8) * rng.gen::<f64>()));
                    }
                }
            }
            let m = SparseMatrix::from_triplets(r, c, t).unwrap();
            assert_eq!(read_matrix_market(&write_matrix_market(&m)).unwrap(), m);
        }
    }

    #[test]
    fn scale_and_add() {
        let a = sm(2, 2, &[(0, 0, 1.0), (1, 1, 2.0)]);
        let b = sm(2, 2, &[(0, 0, -1.0), (0, 1, 3.0)]);
        let s = a.add(&b).unwrap();
        assert_eq!(s.get(0, 0), 0.0);
        assert_eq!(s.nnz(), 2);
        let d = a.scale(-2.0);
        assert_eq!(d.get(1, 1), -4.0);
        assert_eq!(a.scale(0.0).nnz(), 0);
    }
}
