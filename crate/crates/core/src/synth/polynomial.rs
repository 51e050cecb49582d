//! POLYNOMIAL: Walsh-Hadamard coefficients of low Hamming weight, sparse
//! load, then a Hadamard layer.

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::patterns::polynomial_grid;
use crate::C64;

use super::sparse::synth_sparse;

/// Coefficients below this fraction of the vector norm are dropped.
const DROP_TOL: f64 = 1e-12;

/// Orthonormal fast Walsh-Hadamard transform `W f / sqrt(N)`; applying it
/// twice returns the input.
pub fn wht(v: &[C64]) -> Vec<C64> {
    assert!(v.len().is_power_of_two(), "length must be a power of two");
    let mut x = v.to_vec();
    let mut h = 1;
    while h < x.len() {
        for blk in x.chunks_mut(2 * h) {
            let (lo, hi) = blk.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                (*a, *b) = (*a + *b, *a - *b);
            }
        }
        h *= 2;
    }
    let s = 1.0 / (x.len() as f64).sqrt();
    x.iter_mut().for_each(|z| *z *= s);
    x
}

/// The Walsh coefficients kept for a degree-`d` polynomial on `N = 2^m`.
pub(crate) fn polynomial_walsh_entries(coeffs: &[C64], m: usize) -> Result<Vec<(usize, C64)>> {
    let d = coeffs.len() - 1;
    let x = wht(&polynomial_grid(coeffs, 1 << m));
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::ZeroVector("POLYNOMIAL vanishes on the grid".into()));
    }
    Ok(x.into_iter()
        .enumerate()
        .filter(|(i, z)| i.count_ones() as usize <= d && z.norm() > DROP_TOL * norm)
        .collect())
}

/// `sum_j c_j (i / (N - 1))^j` on `m` qubits.
pub fn synth_polynomial(coeffs: &[C64], m: usize) -> Result<Circuit> {
    let entries = polynomial_walsh_entries(coeffs, m)?;
    let mut c = synth_sparse(&entries, m)?;
    for q in 0..m {
        c.push(Gate::h(q))?;
    }
    Ok(c)
}
