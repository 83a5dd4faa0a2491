//! Greedy sparse coding of a channel over the rank-one atoms
//! `A_i(x_r) = psi_x,i(x_r) psi_a,i psi_f,i^T`, and the two-stage estimate
//! that reuses the weights of the nearest reference location.
//!
//! Correlations and Gram entries use the factored forms
//! `<R, a f^T> = a^H R conj(f)` and
//! `<A_p, A_q> = conj(psi_x,p) psi_x,q (psi_a,p^H psi_a,q) (psi_f,p^H psi_f,q)`,
//! so no atom is ever materialised.

use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::dictionary::{assemble_channel, DictionaryBank};
use crate::error::{Error, Result};
use crate::geometry::Location;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Greedy variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PursuitMode {
    /// Least-squares refit of every selected coefficient after each pick.
    #[default]
    Orthogonal,
    /// Plain matching pursuit: only the picked coefficient is updated.
    Matching,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseSolution {
    pub support: Vec<usize>,
    pub coefficients: Vec<Complex64>,
    pub residual_norm: f64,
    pub iterations: usize,
    /// Residual Frobenius norm after each iteration.
    pub residual_history: Vec<f64>,
    /// Atoms rejected because they made the selected sub-dictionary rank deficient.
    pub dropped: Vec<usize>,
}

impl SparseSolution {
    /// Dense length-`atoms` weight vector.
    pub fn dense_weights(&self, atoms: usize) -> Vec<Complex64> {
        let mut w = vec![ZERO; atoms];
        for (&i, &c) in self.support.iter().zip(&self.coefficients) {
            w[i] += c;
        }
        w
    }

    pub fn is_rank_deficient(&self) -> bool {
        !self.dropped.is_empty()
    }
}

/// Relative residual under which the pursuit stops early.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

struct Factors<'a> {
    bank: &'a DictionaryBank,
    wavefronts: Vec<Complex64>,
}

impl Factors<'_> {
    /// `<A_p, A_q>`.
    fn gram(&self, p: usize, q: usize) -> Complex64 {
        let b = self.bank;
        let sv: Complex64 = (0..b.antennas())
            .map(|j| b.steering.get(j, p).conj() * b.steering.get(j, q))
            .sum();
        let frv: Complex64 = (0..b.frequencies())
            .map(|k| b.frequency.get(k, p).conj() * b.frequency.get(k, q))
            .sum();
        self.wavefronts[p].conj() * self.wavefronts[q] * sv * frv
    }

    /// `<A_i, R>` for every atom.
    fn correlations(&self, residual: &ChannelMatrix) -> Vec<Complex64> {
        let b = self.bank;
        let (na, ns, d) = (b.antennas(), b.frequencies(), b.atoms());
        // T[j, i] = sum_k R[j, k] conj(Psi_f[k, i])
        let mut t = vec![ZERO; na * d];
        for j in 0..na {
            let row = residual.row(j);
            for (k, &r) in row.iter().enumerate().take(ns) {
                if r == ZERO {
                    continue;
                }
                for i in 0..d {
                    t[j * d + i] += r * b.frequency.get(k, i).conj();
                }
            }
        }
        (0..d)
            .map(|i| {
                let s: Complex64 = (0..na).map(|j| b.steering.get(j, i).conj() * t[j * d + i]).sum();
                self.wavefronts[i].conj() * s
            })
            .collect()
    }

    fn add_atom(&self, h: &mut ChannelMatrix, i: usize, c: Complex64) {
        let b = self.bank;
        let scale = c * self.wavefronts[i];
        for j in 0..b.antennas() {
            let a = scale * b.steering.get(j, i);
            for k in 0..b.frequencies() {
                let cur = h.get(j, k);
                h.set(j, k, cur + a * b.frequency.get(k, i));
            }
        }
    }
}

/// Incrementally grown Cholesky factor `G = L L^H` of the selected Gram matrix.
#[derive(Default)]
struct Cholesky {
    rows: Vec<Vec<Complex64>>,
}

impl Cholesky {
    fn forward(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut y = Vec::with_capacity(b.len());
        for (i, row) in self.rows.iter().enumerate() {
            let s: Complex64 = (0..i).map(|k| row[k] * y[k]).sum();
            y.push((b[i] - s) / row[i]);
        }
        y
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let y = self.forward(b);
        let n = y.len();
        let mut c = vec![ZERO; n];
        for i in (0..n).rev() {
            let s: Complex64 = (i + 1..n).map(|k| self.rows[k][i].conj() * c[k]).sum();
            c[i] = (y[i] - s) / self.rows[i][i];
        }
        c
    }

    /// Tries to append a column with off-diagonal entries `g` and diagonal
    /// `diag`; returns false when the pivot is numerically zero.
    fn push(&mut self, g: &[Complex64], diag: f64) -> bool {
        let l = self.forward(g);
        let pivot = diag - l.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !(pivot > 1e-10 * diag) {
            return false;
        }
        let mut row: Vec<Complex64> = l.iter().map(|z| z.conj()).collect();
        row.push(Complex64::new(pivot.sqrt(), 0.0));
        self.rows.push(row);
        true
    }
}

/// Orthogonal matching pursuit with at most `sparsity` atoms.
pub fn omp_decompose(
    h: &ChannelMatrix,
    x_r: Location,
    bank: &DictionaryBank,
    sparsity: usize,
) -> Result<SparseSolution> {
    pursue(h, x_r, bank, sparsity, PursuitMode::Orthogonal)
}

/// Greedy decomposition in the chosen mode. Stops after `sparsity`
/// iterations, when the residual falls below [`RESIDUAL_TOLERANCE`] relative
/// to `||H||_F`, or when an iteration fails to reduce the residual.
pub fn pursue(
    h: &ChannelMatrix,
    x_r: Location,
    bank: &DictionaryBank,
    sparsity: usize,
    mode: PursuitMode,
) -> Result<SparseSolution> {
    if h.antennas() != bank.antennas() || h.frequencies() != bank.frequencies() {
        return Err(Error::DimensionMismatch {
            expected: bank.antennas() * bank.frequencies(),
            got: h.antennas() * h.frequencies(),
        });
    }
    if sparsity > bank.atoms() {
        return Err(Error::InvalidArgument(format!(
            "sparsity {sparsity} exceeds dictionary size {}",
            bank.atoms()
        )));
    }
    let factors = Factors {
        bank,
        wavefronts: bank.planar_wavefronts(x_r),
    };
    let atom_energy = (bank.antennas() * bank.frequencies()) as f64;
    let target = h.frobenius_norm();
    let stop = RESIDUAL_TOLERANCE * target;

    let mut solution = SparseSolution {
        support: Vec::new(),
        coefficients: Vec::new(),
        residual_norm: target,
        iterations: 0,
        residual_history: Vec::new(),
        dropped: Vec::new(),
    };
    if target == 0.0 {
        return Ok(solution);
    }
    let mut residual = h.clone();
    let mut excluded = vec![false; bank.atoms()];
    let mut chol = Cholesky::default();
    // <A_p, H> for the selected atoms
    let mut projections: Vec<Complex64> = Vec::new();

    while solution.iterations < sparsity && solution.residual_norm > stop {
        let corr = factors.correlations(&residual);
        // Ties go to the lowest index.
        let mut pick: Option<(usize, Complex64)> = None;
        for (i, &c) in corr.iter().enumerate() {
            if mode == PursuitMode::Orthogonal && excluded[i] {
                continue;
            }
            if pick.is_none_or(|(_, best)| c.norm_sqr() > best.norm_sqr()) {
                pick = Some((i, c));
            }
        }
        let Some((i, ci)) = pick else { break };
        if ci.norm() <= stop * atom_energy.sqrt() * 1e-3 {
            break;
        }
        solution.iterations += 1;
        match mode {
            PursuitMode::Matching => {
                let step = ci / atom_energy;
                factors.add_atom(&mut residual, i, -step);
                match solution.support.iter().position(|&s| s == i) {
                    Some(p) => solution.coefficients[p] += step,
                    None => {
                        solution.support.push(i);
                        solution.coefficients.push(step);
                    }
                }
            }
            PursuitMode::Orthogonal => {
                excluded[i] = true;
                let g: Vec<Complex64> = solution.support.iter().map(|&p| factors.gram(p, i)).collect();
                if !chol.push(&g, factors.gram(i, i).re) {
                    solution.dropped.push(i);
                    continue;
                }
                solution.support.push(i);
                let inner: Complex64 = {
                    let mut single = ChannelMatrix::zeros(bank.antennas(), bank.frequencies(), x_r);
                    factors.add_atom(&mut single, i, Complex64::new(1.0, 0.0));
                    single.entries().iter().zip(h.entries()).map(|(a, b)| a.conj() * b).sum()
                };
                projections.push(inner);
                solution.coefficients = chol.solve(&projections);
                residual = h.clone();
                for (&p, &c) in solution.support.iter().zip(&solution.coefficients) {
                    factors.add_atom(&mut residual, p, -c);
                }
            }
        }
        let norm = residual.frobenius_norm();
        let previous = solution.residual_norm;
        solution.residual_norm = norm;
        solution.residual_history.push(norm);
        if !(norm < previous) {
            break;
        }
    }
    Ok(solution)
}

/// Frobenius inner products `<A_i(x_r), R>` of the residual `h - reconstruction`
/// with every selected atom.
pub fn residual_correlations(
    h: &ChannelMatrix,
    x_r: Location,
    bank: &DictionaryBank,
    solution: &SparseSolution,
) -> Result<Vec<Complex64>> {
    let residual = residual_of(h, x_r, bank, solution)?;
    let factors = Factors {
        bank,
        wavefronts: bank.planar_wavefronts(x_r),
    };
    let all = factors.correlations(&residual);
    Ok(solution.support.iter().map(|&i| all[i]).collect())
}

fn residual_of(
    h: &ChannelMatrix,
    x_r: Location,
    bank: &DictionaryBank,
    solution: &SparseSolution,
) -> Result<ChannelMatrix> {
    let recon = assemble_channel(&solution.dense_weights(bank.atoms()), x_r, bank)?;
    let entries = h.entries().iter().zip(recon.entries()).map(|(a, b)| a - b).collect();
    ChannelMatrix::from_entries(h.antennas(), h.frequencies(), entries, x_r)
}

/// Estimates `H(x)` from the solution of the reference closest to `x`, with
/// the planar wavefronts re-evaluated at `x`.
pub fn two_stage_estimate(
    x: Location,
    references: &[(Location, SparseSolution)],
    bank: &DictionaryBank,
) -> Result<ChannelMatrix> {
    let (_, nearest) = references
        .iter()
        .min_by(|a, b| a.0.distance(x).total_cmp(&b.0.distance(x)))
        .ok_or(Error::EmptyReferences)?;
    assemble_channel(&nearest.dense_weights(bank.atoms()), x, bank)
}
