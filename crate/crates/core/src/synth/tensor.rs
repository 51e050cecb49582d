//! TENSOR: Kronecker product of parts on disjoint subregisters.

use crate::circuit::{tensor_embed, Circuit};
use crate::error::{Error, Result};
use crate::patterns::Pattern;

use super::synth_leaf;

/// The first part occupies the most significant qubits.
pub fn synth_tensor(parts: &[(Pattern, usize)], m: usize) -> Result<Circuit> {
    let widths: Vec<usize> = parts.iter().map(|(_, ni)| ni.trailing_zeros() as usize).collect();
    let total: usize = widths.iter().sum();
    if total != m {
        return Err(Error::LengthMismatch(1 << total, 1 << m));
    }
    let circuits = parts.iter().zip(&widths).map(|((p, _), &w)| synth_leaf(p, w)).collect::<Result<Vec<_>>>()?;
    let mut offset = m;
    let placed: Vec<(&Circuit, usize)> = circuits
        .iter()
        .zip(&widths)
        .map(|(c, &w)| {
            offset -= w;
            (c, offset)
        })
        .collect();
    tensor_embed(&placed, m)
}
