//! Block-partitioned sparse matrices and the upper-triangular block solver.
//!
//! The partition is the same on rows and columns; blocks live in a sorted
//! map so iteration and flattening are deterministic. Only diagonal blocks
//! ever get factorized: the solve sweeps upward from the last block row,
//! which is exactly the structure the truncated lifted systems have.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::lu::SparseLu;
use crate::sparse::SparseMatrix;

/// Square block matrix over a shared row/column partition.
#[derive(Debug, Clone)]
pub struct BlockMatrix {
    /// Size of each block along the partition.
    block_dims: Vec<usize>,
    /// offsets[i] = start of block i in the flat layout; last entry = dim.
    offsets: Vec<usize>,
    blocks: BTreeMap<(usize, usize), SparseMatrix>,
}

impl BlockMatrix {
    pub fn new(block_dims: Vec<usize>) -> Result<Self, Error> {
        let mut offsets = Vec::with_capacity(block_dims.len() + 1);
        let mut acc: usize = 0;
        offsets.push(0);
        for &d in &block_dims {
            acc = acc
                .checked_add(d)
                .ok_or(Error::DimensionOverflow { a: acc, b: d, hint: None })?;
            offsets.push(acc);
        }
        Ok(Self { block_dims, offsets, blocks: BTreeMap::new() })
    }

    pub fn n_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Flat offsets, length `n_blocks() + 1`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Total flat dimension.
    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Set block (i, j), replacing any previous content there.
    pub fn insert_block(&mut self, i: usize, j: usize, m: SparseMatrix) -> Result<(), Error> {
        let nb = self.n_blocks();
        if i >= nb || j >= nb {
            return Err(Error::IndexOutOfBounds { row: i, col: j, rows: nb, cols: nb });
        }
        if m.rows() != self.block_dims[i] || m.cols() != self.block_dims[j] {
            return Err(Error::ShapeMismatch {
                expected_rows: self.block_dims[i],
                expected_cols: self.block_dims[j],
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        self.blocks.insert((i, j), m);
        Ok(())
    }

    pub fn block(&self, i: usize, j: usize) -> Option<&SparseMatrix> {
        self.blocks.get(&(i, j))
    }

    /// Stored blocks in sorted (block-row, block-col) order.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize, &SparseMatrix)> {
        self.blocks.iter().map(|(&(i, j), m)| (i, j, m))
    }

    pub fn nnz(&self) -> usize {
        self.blocks.values().map(SparseMatrix::nnz).sum()
    }

    /// Flatten into a single sparse matrix.
    pub fn to_sparse(&self) -> Result<SparseMatrix, Error> {
        let dim = self.dim();
        let mut triplets = Vec::with_capacity(self.nnz());
        for (i, j, m) in self.blocks() {
            let (ro, co) = (self.offsets[i], self.offsets[j]);
            for (r, c, v) in m.entries() {
                triplets.push((ro + r, co + c, v));
            }
        }
        SparseMatrix::from_triplets(dim, dim, triplets)
    }

    /// `self * v` over the flat layout.
    pub fn spmv(&self, v: &[f64]) -> Result<Vec<f64>, Error> {
        let mut out = vec![0.0; self.dim()];
        self.spmv_into(v, &mut out)?;
        Ok(out)
    }

    /// `out = self * v` into a preallocated buffer.
    pub fn spmv_into(&self, v: &[f64], out: &mut [f64]) -> Result<(), Error> {
        if v.len() != self.dim() {
            return Err(Error::VectorLength { expected: self.dim(), found: v.len() });
        }
        if out.len() != self.dim() {
            return Err(Error::VectorLength { expected: self.dim(), found: out.len() });
        }
        out.fill(0.0);
        for (i, j, m) in self.blocks() {
            let (ro, co) = (self.offsets[i], self.offsets[j]);
            m.spmv_acc(1.0, &v[co..co + m.cols()], &mut out[ro..ro + m.rows()])?;
        }
        Ok(())
    }

    fn check_upper_triangular(&self) -> Result<(), Error> {
        for (i, j, _) in self.blocks() {
            if j < i {
                return Err(Error::InvalidConfig(format!(
                    "block ({i}, {j}) lies below the diagonal; solver requires block upper-triangular structure"
                )));
            }
        }
        Ok(())
    }
}

/// Block upper-triangular solver with cached diagonal factorizations.
///
/// Owns the matrix so the factors and the off-diagonal blocks they are used
/// with can never drift apart. Build once, then solve per step.
#[derive(Debug, Clone)]
pub struct BlockLu {
    m: BlockMatrix,
    diag: Vec<SparseLu>,
}

impl BlockLu {
    pub fn new(m: BlockMatrix) -> Result<Self, Error> {
        m.check_upper_triangular()?;
        let mut diag = Vec::with_capacity(m.n_blocks());
        for i in 0..m.n_blocks() {
            let d = m
                .block(i, i)
                .ok_or(Error::SingularBlock { block: i })?;
            let lu = SparseLu::factor(d).map_err(|e| match e {
                Error::SingularMatrix { .. } => Error::SingularBlock { block: i },
                other => other,
            })?;
            diag.push(lu);
        }
        Ok(Self { m, diag })
    }

    pub fn matrix(&self) -> &BlockMatrix {
        &self.m
    }

    /// Solve `M x = b` by back-substitution from the last block row upward.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>, Error> {
        let dim = self.m.dim();
        if b.len() != dim {
            return Err(Error::VectorLength { expected: dim, found: b.len() });
        }
        let off = self.m.offsets();
        let mut x = vec![0.0; dim];
        let mut rhs = Vec::new();
        for i in (0..self.m.n_blocks()).rev() {
            rhs.clear();
            rhs.extend_from_slice(&b[off[i]..off[i + 1]]);
            for j in i + 1..self.m.n_blocks() {
                if let Some(blk) = self.m.block(i, j) {
                    blk.spmv_acc(-1.0, &x[off[j]..off[j + 1]], &mut rhs)?;
                }
            }
            let xi = self.diag[i].solve(&rhs)?;
            x[off[i]..off[i + 1]].copy_from_slice(&xi);
        }
        Ok(x)
    }
}

/// One-shot block upper-triangular solve.
pub fn solve_block_upper_triangular(m: &BlockMatrix, rhs: &[f64]) -> Result<Vec<f64>, Error> {
    BlockLu::new(m.clone())?.solve(rhs)
}
