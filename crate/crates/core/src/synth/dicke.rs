//! Dicke states via split-and-cyclic-shift blocks.

use std::collections::BTreeSet;

use crate::circuit::{Circuit, Gate, Op};
use crate::error::Result;

/// Split-and-cyclic-shift block `SCS_{l,k}` on 1-based positions `l-k..=l`;
/// position `p` is qubit `p - 1`.
fn scs(c: &mut Circuit, l: usize, k: usize) -> Result<()> {
    let q = |p: usize| p - 1;
    let lf = l as f64;
    c.push(Gate::cx(q(l - 1), q(l)))?;
    c.push(Gate::cry(2.0 * (1.0 / lf).sqrt().acos(), q(l), q(l - 1)))?;
    c.push(Gate::cx(q(l - 1), q(l)))?;
    for i in 2..=k {
        c.push(Gate::cx(q(l - i), q(l)))?;
        let theta = 2.0 * (i as f64 / lf).sqrt().acos();
        c.push(Gate::controlled_1q(Op::Ry(theta), &[q(l), q(l - i + 1)], q(l - i))?)?;
        c.push(Gate::cx(q(l - i), q(l)))?;
    }
    Ok(())
}

fn cascade(k: usize, m: usize) -> Result<Circuit> {
    let mut c = Circuit::new(m);
    if k == 0 {
        return Ok(c);
    }
    for p in m - k + 1..=m {
        c.push(Gate::x(p - 1))?;
    }
    for l in (k + 1..=m).rev() {
        scs(&mut c, l, k)?;
    }
    for l in (2..=k).rev() {
        scs(&mut c, l, l - 1)?;
    }
    Ok(c)
}

/// Moves a trailing `X` on every qubit backwards through `c` for as long as
/// it can be absorbed: through CX it toggles the target, through rotations
/// whose controls it misses it negates the angle, and it cancels plain X.
fn absorb_full_flip(c: &Circuit) -> Result<Circuit> {
    let m = c.num_qubits();
    let mut s: BTreeSet<usize> = (0..m).collect();
    let mut tail: Vec<Gate> = Vec::new();
    let gates = c.gates();
    let mut stop = gates.len();
    for (i, g) in gates.iter().enumerate().rev() {
        let t = g.targets()[0];
        let ctrls = g.controls();
        match g.op() {
            Op::X if ctrls.is_empty() => {
                if !s.remove(&t) {
                    s.insert(t);
                }
            }
            Op::X if ctrls.len() == 1 => {
                if s.contains(&ctrls[0]) && !s.remove(&t) {
                    s.insert(t);
                }
                tail.push(g.clone());
            }
            Op::Ry(theta) if ctrls.iter().all(|q| !s.contains(q)) => {
                let th = if s.contains(&t) { -theta } else { *theta };
                tail.push(Gate::new(Op::Ry(th), ctrls.to_vec(), vec![t])?);
            }
            _ => {
                stop = i + 1;
                break;
            }
        }
        stop = i;
    }
    let mut out = Circuit::new(m);
    for g in &gates[..stop] {
        out.push(g.clone())?;
    }
    for &q in &s {
        out.push(Gate::x(q))?;
    }
    for g in tail.into_iter().rev() {
        out.push(g)?;
    }
    Ok(out)
}

/// Uniform superposition over weight-`k` strings of `m` bits.
pub fn synth_dicke(k: usize, m: usize) -> Result<Circuit> {
    if 2 * k <= m {
        return cascade(k, m);
    }
    absorb_full_flip(&cascade(m - k, m)?)
}
