//! Real-space lattice Hamiltonians for separable models and the round trip
//! back to momentum space.
//!
//! On an `N x N` torus with two sublattices per cell, a separable model
//! places chain-1 couplings on x bonds, negated chain-2 couplings on y
//! bonds, and the on-site difference `(onsite1 - onsite2) . sigma` on the
//! cell diagonal. Fourier-transforming the assembled matrix with
//! `a_k = (1/N) sum exp(-i k.r) a_r` recovers the Bloch blocks
//! `h(k) = (r1(kx) - r2(ky)) . sigma`, which is what
//! [`verify_separability`] checks numerically.
//!
//! The two extracted chains are 1D Hamiltonians of dimension `2N` whose
//! Bloch decompositions are `r1(k) . sigma` and `r2(k) . sigma`; the sign
//! flip on the y couplings is what turns the subtraction in
//! `r = r1 - r2` into an ordinary sum of bond terms.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geom3::Vec3;
use crate::model::{CVec3, ChainSpec, SeparableModel};

/// `d . sigma` as a dense 2x2 block in the `(A, B)` sublattice basis.
pub fn pauli_block(d: CVec3) -> [[Complex64; 2]; 2] {
    let i = Complex64::new(0.0, 1.0);
    [[d.z, d.x - i * d.y], [d.x + i * d.y, -d.z]]
}

fn real_pauli_block(v: Vec3) -> [[Complex64; 2]; 2] {
    pauli_block(CVec3::from_reals(v.x, v.y, v.z))
}

/// Sparse Hermitian matrix in deterministic triplet form.
#[derive(Debug, Clone)]
pub struct LatticeMatrix {
    dim: usize,
    triplets: Vec<(usize, usize, Complex64)>,
}

impl LatticeMatrix {
    fn new(dim: usize) -> Self {
        LatticeMatrix {
            dim,
            triplets: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn triplets(&self) -> &[(usize, usize, Complex64)] {
        &self.triplets
    }

    fn push(&mut self, row: usize, col: usize, value: Complex64) {
        if value.norm_sqr() > 0.0 {
            self.triplets.push((row, col, value));
        }
    }

    /// Adds `block` between cells `row_cell` and `col_cell` together with its
    /// Hermitian conjugate on the transposed position.
    fn add_bond(&mut self, row_cell: usize, col_cell: usize, block: [[Complex64; 2]; 2]) {
        for (s, row_block) in block.iter().enumerate() {
            for (t, &v) in row_block.iter().enumerate() {
                self.push(2 * row_cell + s, 2 * col_cell + t, v);
                self.push(2 * col_cell + t, 2 * row_cell + s, v.conj());
            }
        }
    }

    /// Adds the on-site block of one cell (no conjugate partner; the block
    /// itself must be Hermitian).
    fn add_diagonal(&mut self, cell: usize, block: [[Complex64; 2]; 2]) {
        for (s, row_block) in block.iter().enumerate() {
            for (t, &v) in row_block.iter().enumerate() {
                self.push(2 * cell + s, 2 * cell + t, v);
            }
        }
    }

    /// Merge duplicate positions and sort; assembly order stops mattering.
    fn canonicalize(mut self) -> Self {
        self.triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(self.triplets.len());
        for (r, c, v) in self.triplets {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|&(_, _, v)| v.norm_sqr() > 0.0);
        self.triplets = merged;
        self
    }

    /// Max entry-wise deviation from Hermiticity, `max |A - A^dagger|`.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut map = std::collections::HashMap::new();
        for &(r, c, v) in &self.triplets {
            *map.entry((r, c)).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        let mut worst = 0.0f64;
        for (&(r, c), &v) in &map {
            let conj = map
                .get(&(c, r))
                .copied()
                .unwrap_or(Complex64::new(0.0, 0.0));
            worst = worst.max((v - conj.conj()).norm());
        }
        worst
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.triplets {
            m[(r, c)] += v;
        }
        m
    }

    /// All eigenvalues, ascending. Dense Hermitian solve; intended for the
    /// moderate sizes used by the verification paths.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.to_dense().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        vals
    }
}

fn check_size(n: usize, max_range: usize) -> Result<()> {
    if n <= 2 * max_range || n < 3 {
        return Err(Error::LatticeTooSmall { n, max_range });
    }
    Ok(())
}

/// 2D real-space Hamiltonian of the separable model on an `N x N` torus
/// (dimension `2 N^2`). Couplings run only along x or y; indices wrap
/// periodically.
pub fn build_real_space(m: &SeparableModel, n: usize) -> Result<LatticeMatrix> {
    check_size(n, m.max_range())?;
    let cell = |l: usize, j: usize| l * n + j;
    let mut h = LatticeMatrix::new(2 * n * n);
    let onsite = m.chain1().onsite() - m.chain2().onsite();
    for l in 0..n {
        for j in 0..n {
            h.add_diagonal(cell(l, j), real_pauli_block(onsite));
            for hop in m.chain1().hoppings() {
                h.add_bond(cell(l, j), cell((l + hop.range) % n, j), pauli_block(hop.d));
            }
            for hop in m.chain2().hoppings() {
                h.add_bond(
                    cell(l, j),
                    cell(l, (j + hop.range) % n),
                    pauli_block(-hop.d),
                );
            }
        }
    }
    Ok(h.canonicalize())
}

/// 1D chain Hamiltonian of dimension `2N`: on-site block plus the chain's
/// couplings on a periodic ring.
fn chain_matrix(chain: &ChainSpec, n: usize) -> LatticeMatrix {
    let mut h = LatticeMatrix::new(2 * n);
    for l in 0..n {
        h.add_diagonal(l, real_pauli_block(chain.onsite()));
        for hop in chain.hoppings() {
            h.add_bond(l, (l + hop.range) % n, pauli_block(hop.d));
        }
    }
    h.canonicalize()
}

/// The two 1D chains hidden in the separable model. `H1` collects the x
/// couplings as they stand; `H2` carries the overall sign flip that makes
/// its Bloch vector come out as `r2` rather than `-r2`.
pub fn extract_chains(m: &SeparableModel, n: usize) -> Result<(LatticeMatrix, LatticeMatrix)> {
    check_size(n, m.max_range())?;
    Ok((chain_matrix(m.chain1(), n), chain_matrix(m.chain2(), n)))
}

/// Momentum grid of a 1D lattice: `k_m = 2 pi m / N`.
fn momentum_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|mm| 2.0 * std::f64::consts::PI * mm as f64 / n as f64)
        .collect()
}

/// Bloch blocks of a 1D chain matrix: `h(k) = (1/N) sum_t exp(i k dl) t`.
pub fn chain_bloch_blocks(h: &LatticeMatrix, n: usize) -> Vec<[[Complex64; 2]; 2]> {
    assert_eq!(h.dim(), 2 * n);
    let mut blocks = vec![[[Complex64::new(0.0, 0.0); 2]; 2]; n];
    for (mm, &k) in momentum_grid(n).iter().enumerate() {
        for &(row, col, v) in h.triplets() {
            let (lr, s) = (row / 2, row % 2);
            let (lc, t) = (col / 2, col % 2);
            let dl = (lc as isize - lr as isize) as f64;
            blocks[mm][s][t] += v * Complex64::from_polar(1.0 / n as f64, k * dl);
        }
    }
    blocks
}

fn block_deviation(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> f64 {
    let mut worst = 0.0f64;
    for s in 0..2 {
        for t in 0..2 {
            worst = worst.max((a[s][t] - b[s][t]).norm());
        }
    }
    worst
}

/// Max deviation over the momentum grid between the Bloch blocks of a chain
/// matrix and `r(k) . sigma` for the given chain.
pub fn chain_bloch_deviation(h: &LatticeMatrix, chain: &ChainSpec, n: usize) -> f64 {
    let blocks = chain_bloch_blocks(h, n);
    momentum_grid(n)
        .iter()
        .zip(blocks)
        .map(|(&k, block)| {
            let r = chain.bloch_vector(k);
            block_deviation(block, real_pauli_block(r))
        })
        .fold(0.0, f64::max)
}

/// Fourier-transforms an assembled 2D lattice matrix and returns the max
/// entry deviation from `(r1(kx) - r2(ky)) . sigma` over the `N x N`
/// momentum grid.
pub fn separability_deviation(m: &SeparableModel, h: &LatticeMatrix, n: usize) -> f64 {
    assert_eq!(h.dim(), 2 * n * n);
    let ks = momentum_grid(n);
    let norm = 1.0 / (n * n) as f64;
    let mut worst = 0.0f64;
    for &kx in &ks {
        for &ky in &ks {
            let mut block = [[Complex64::new(0.0, 0.0); 2]; 2];
            for &(row, col, v) in h.triplets() {
                let (cr, s) = (row / 2, row % 2);
                let (cc, t) = (col / 2, col % 2);
                let dl = (cc / n) as isize - (cr / n) as isize;
                let dj = (cc % n) as isize - (cr % n) as isize;
                let phase = kx * dl as f64 + ky * dj as f64;
                block[s][t] += v * Complex64::from_polar(norm, phase);
            }
            let r = m.bloch_vector(kx, ky);
            worst = worst.max(block_deviation(block, real_pauli_block(r)));
        }
    }
    worst
}

/// Builds the 2D lattice, Fourier-transforms it back, and reports the max
/// deviation from the separable Bloch form. Construction-exact up to
/// roundoff; anything above ~1e-12 means the matrix does not describe the
/// model.
pub fn verify_separability(m: &SeparableModel, n: usize) -> Result<f64> {
    let h = build_real_space(m, n)?;
    Ok(separability_deviation(m, &h, n))
}
