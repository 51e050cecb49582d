//! FOURIER: sparse load of the conjugate coefficient pairs, then inverse QFT.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::patterns::{fourier_coefficients, Mode};
use crate::C64;

use super::{interval::iqft_block, sparse::synth_sparse};

const CANCEL_TOL: f64 = 1e-14;

/// Sum of sinusoids `sum_t a_t sin(2 pi n_t i / N + phi_t)`.
///
/// With the inverse QFT kernel `e^{-2 pi i x y / N}`, frequency `+n` sits
/// at index `N - n` and `-n` at index `n`.
pub fn synth_fourier(modes: &[Mode], m: usize) -> Result<Circuit> {
    let n = 1usize << m;
    let coeffs = fourier_coefficients(modes);
    let scale = coeffs.iter().map(|c| c.1.norm()).fold(0.0, f64::max);
    let mut entries: Vec<(usize, C64)> = Vec::new();
    for (k, f) in coeffs {
        if f.norm() <= CANCEL_TOL * scale.max(f64::MIN_POSITIVE) {
            continue;
        }
        entries.push((k, f.conj()));
        entries.push((n - k, f));
    }
    if entries.is_empty() {
        return Err(Error::ZeroVector("FOURIER modes cancel to a zero vector".into()));
    }
    entries.sort_by_key(|e| e.0);
    let mut c = synth_sparse(&entries, m)?;
    c.push(iqft_block(m))?;
    Ok(c)
}
