//! WALSH, GEOMETRIC, HAMMING and STAIRCASE: product states and the unary cascade.

use crate::circuit::{Circuit, Gate, Op};
use crate::error::Result;
use crate::patterns::is_complex;
use crate::C64;

use super::{dyadic_decompose, normalize_anchors, sparse::synth_sparse, Anchor, DyadicBlock};

/// Two levels `c0`/`c1` on bit `k`: one rotation on `k`, then `H` everywhere.
pub fn synth_walsh(k: usize, c0: C64, c1: C64, m: usize) -> Result<Circuit> {
    let (a, b) = (c0 + c1, c0 - c1);
    let mut c = Circuit::new(m);
    if is_complex(a) || is_complex(b) {
        c.push(Gate::ry(2.0 * b.norm().atan2(a.norm()), k))?;
        let rel = crate::circuit::wrap_angle(b.arg() - a.arg());
        if a.norm() > 0.0 && b.norm() > 0.0 && rel.abs() > 1e-12 {
            c.push(Gate::phase(rel, k))?;
        }
        let ph = if a.norm() > 0.0 { a.arg() } else { b.arg() };
        c.set_global_phase(ph);
    } else {
        c.push(Gate::ry(2.0 * b.re.atan2(a.re), k))?;
    }
    for q in 0..m {
        c.push(Gate::h(q))?;
    }
    Ok(c)
}

/// `|0> + z|1>` (normalized) on one qubit; `z` given as `(ln|z|, arg z)`.
/// Real `z` uses a signed RY, complex `z` a single U3.
pub(crate) fn ratio_op(ln_mag: f64, arg: f64, complex: bool) -> Op {
    let theta = 2.0 * ln_mag.exp().atan();
    if complex {
        Op::U3(theta, crate::circuit::wrap_angle(arg), 0.0)
    } else if arg.cos() < 0.0 {
        Op::Ry(-theta)
    } else {
        Op::Ry(theta)
    }
}

/// Per-qubit ops of the product state `sum_t r^t |t>` on `p` qubits.
pub(crate) fn geometric_product_ops(r: C64, p: usize) -> Vec<Op> {
    let complex = is_complex(r);
    let (lr, ar) = (r.norm().ln(), if complex { r.arg() } else if r.re < 0.0 { std::f64::consts::PI } else { 0.0 });
    (0..p)
        .map(|j| {
            let e = (1u64 << j) as f64;
            // real r: only qubit 0 can carry a negative ratio
            let arg = if complex { (e * ar).rem_euclid(2.0 * std::f64::consts::PI) } else if j == 0 { ar } else { 0.0 };
            ratio_op(e * lr, arg, complex)
        })
        .collect()
}

/// `c r^{i - k_s}` on `[k_s, N)`.
pub fn synth_geometric(r: C64, k_s: usize, c: C64, m: usize) -> Result<Circuit> {
    let n = 1usize << m;
    let mut circ = Circuit::new(m);
    if k_s == 0 || super::interval::is_aligned(k_s, n) {
        let p = (n - k_s).trailing_zeros() as usize;
        for b in p..m {
            if (k_s >> b) & 1 == 1 {
                circ.push(Gate::x(b))?;
            }
        }
        for (q, op) in geometric_product_ops(r, p).into_iter().enumerate() {
            circ.push(Gate::new(op, vec![], vec![q])?)?;
        }
        circ.set_global_phase(c.arg());
        return Ok(circ);
    }
    let blocks = dyadic_decompose(k_s, n);
    let anchors = geometric_anchors(r, k_s, c, &blocks);
    let mut circ = synth_sparse(&normalize_anchors(&anchors), m)?;
    for blk in &blocks {
        spread_block(&mut circ, blk, &geometric_product_ops(r, blk.log_width()))?;
    }
    Ok(circ)
}

/// Anchor of each block: `c r^{b - k_s}` times the block's in-block L2
/// norm, in log magnitude.
pub(crate) fn geometric_anchors(r: C64, k_s: usize, c: C64, blocks: &[DyadicBlock]) -> Vec<Anchor> {
    let lr = r.norm().ln();
    let q = r.norm_sqr();
    blocks
        .iter()
        .map(|b| Anchor {
            index: b.start,
            ln_mag: c.norm().ln() + (b.start - k_s) as f64 * lr + 0.5 * crate::patterns::ln_geom_sum(q, b.width),
            phase: c.arg() + ((b.start - k_s) as f64 * r.arg()).rem_euclid(2.0 * std::f64::consts::PI),
        })
        .collect()
}

/// Applies `ops[j]` to low qubit `j` of `blk`, conditioned on the block's
/// high bits. Width-1 blocks need nothing.
pub(crate) fn spread_block(circ: &mut Circuit, blk: &DyadicBlock, ops: &[Op]) -> Result<()> {
    let p = blk.log_width();
    if p == 0 {
        return Ok(());
    }
    let m = circ.num_qubits();
    let controls: Vec<(usize, bool)> = (p..m).map(|b| (b, (blk.start >> b) & 1 == 1)).collect();
    let zeros: Vec<usize> = controls.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let ctrl: Vec<usize> = controls.iter().map(|c| c.0).collect();
    for &z in &zeros {
        circ.push(Gate::x(z))?;
    }
    for (j, op) in ops.iter().enumerate() {
        circ.push(Gate::new(op.clone(), ctrl.clone(), vec![j])?)?;
    }
    for &z in &zeros {
        circ.push(Gate::x(z))?;
    }
    Ok(())
}

/// `c r^{wt(i)}`: the same ratio on every qubit.
pub fn synth_hamming(r: C64, c: C64, m: usize) -> Result<Circuit> {
    let complex = is_complex(r);
    let arg = if complex { r.arg() } else if r.re < 0.0 { std::f64::consts::PI } else { 0.0 };
    let op = ratio_op(r.norm().ln(), arg, complex);
    let mut circ = Circuit::new(m);
    for q in 0..m {
        circ.push(Gate::new(op.clone(), vec![], vec![q])?)?;
    }
    circ.set_global_phase(c.arg());
    Ok(circ)
}

/// `c r^k` on indices `2^k - 1`, `k = 0..=m`.
pub fn synth_staircase(r: C64, c: C64, m: usize) -> Result<Circuit> {
    let complex = is_complex(r);
    let lr = r.norm().ln();
    // alpha_k = |r|^{k - m} keeps every term at most 1
    let ln_alpha: Vec<f64> = (0..=m).map(|k| (k as f64 - m as f64) * lr.max(0.0) + k as f64 * lr.min(0.0)).collect();
    let alpha: Vec<f64> = ln_alpha.iter().map(|l| l.exp()).collect();
    let mut tail = vec![0.0f64; m + 2];
    for k in (0..=m).rev() {
        tail[k] = tail[k + 1].hypot(alpha[k]);
    }
    let sign = if !complex && r.re < 0.0 { -1.0 } else { 1.0 };
    let mut circ = Circuit::new(m);
    for k in 0..m {
        let theta = sign * 2.0 * tail[k + 1].atan2(alpha[k]);
        let g = if k == 0 { Gate::ry(theta, 0) } else { Gate::cry(theta, k - 1, k) };
        circ.push(g)?;
    }
    if complex {
        for q in 0..m {
            circ.push(Gate::phase(r.arg(), q))?;
        }
    }
    circ.set_global_phase(c.arg());
    Ok(circ)
}
