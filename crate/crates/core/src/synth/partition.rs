//! PARTITION: disjoint bounded-support parts, one anchor per dyadic block.

use crate::circuit::{Circuit, Op};
use crate::error::{Error, Result};
use crate::patterns::Pattern;

use super::product::{geometric_anchors, geometric_product_ops, spread_block};
use super::{dyadic_decompose, normalize_anchors, sparse::synth_sparse, Anchor, DyadicBlock};

fn uniform_blocks(lo: usize, hi: usize, c: crate::C64) -> Vec<(Anchor, DyadicBlock, Vec<Op>)> {
    dyadic_decompose(lo, hi)
        .into_iter()
        .map(|b| {
            let a = Anchor { index: b.start, ln_mag: c.norm().ln() + 0.5 * (b.width as f64).ln(), phase: c.arg() };
            (a, b, vec![Op::H; b.log_width()])
        })
        .collect()
}

/// Blocks of every part with their anchors and in-block spread ops.
pub(crate) fn partition_blocks(parts: &[Pattern], m: usize) -> Result<Vec<(Anchor, DyadicBlock, Vec<Op>)>> {
    let n = 1usize << m;
    let mut out = Vec::new();
    for p in parts {
        match p {
            Pattern::Sparse { entries } => out.extend(entries.iter().map(|&(i, a)| {
                (Anchor { index: i, ln_mag: a.norm().ln(), phase: a.arg() }, DyadicBlock { start: i, width: 1 }, vec![])
            })),
            Pattern::Step { k_e, c } => out.extend(uniform_blocks(0, *k_e, *c)),
            Pattern::Square { k_s, k_e, c } => out.extend(uniform_blocks(*k_s, *k_e, *c)),
            Pattern::Geometric { r, k_s, c } => {
                let blocks = dyadic_decompose(*k_s, n);
                let anchors = geometric_anchors(*r, *k_s, *c, &blocks);
                for (a, b) in anchors.into_iter().zip(blocks) {
                    out.push((a, b, geometric_product_ops(*r, b.log_width())));
                }
            }
            _ => return Err(Error::InvalidParam(format!("PARTITION cannot hold {}", p.name()))),
        }
    }
    Ok(out)
}

/// Disjoint union of `parts` without ancilla: sparse load of one anchor per
/// block, then each block spread over its low qubits.
pub fn synth_partition(parts: &[Pattern], m: usize) -> Result<Circuit> {
    let blocks = partition_blocks(parts, m)?;
    let anchors: Vec<Anchor> = blocks.iter().map(|b| b.0).collect();
    let mut c = synth_sparse(&normalize_anchors(&anchors), m)?;
    for (_, blk, ops) in &blocks {
        spread_block(&mut c, blk, ops)?;
    }
    Ok(c)
}
