//! Uniform intervals: STEP, SQUARE, the QFT pair and the constant adder.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::circuit::{Circuit, Gate, Op};
use crate::error::Result;

/// Uniform superposition over `[0, k_e)` on `m` qubits.
///
/// With set bits `l_0 < ... < l_k` of `k_e`, the target splits into blocks
/// `B_j` of size `2^{l_j}`. The circuit builds them with the bits
/// `l_1..l_k` complemented (so block `B_j` is "bit `l_j` set, everything
/// above clear") and flips those bits back at the end.
pub fn synth_step(k_e: usize, m: usize) -> Result<Circuit> {
    let mut c = Circuit::new(m);
    let l: Vec<usize> = (0..=m).filter(|&b| (k_e >> b) & 1 == 1).collect();
    for q in 0..l[0].min(m) {
        c.push(Gate::h(q))?;
    }
    if l.len() == 1 {
        return Ok(c);
    }
    let total = k_e as f64;
    let split = |done: usize, block: usize| 2.0 * ((block as f64) / (total - done as f64)).sqrt().acos();
    c.push(Gate::ry(split(0, 1 << l[0]), l[1]))?;
    let mut done = 1usize << l[0];
    for j in 1..l.len() {
        for q in l[j - 1]..l[j] {
            // qubit l_{j-1} is |1> in this branch for j >= 2
            let g = if j >= 2 && q == l[j - 1] {
                Gate::cry(-FRAC_PI_2, l[j], q)
            } else {
                Gate::controlled_1q(Op::H, &[l[j]], q)?
            };
            c.push(g)?;
        }
        if j + 1 < l.len() {
            c.push(Gate::cry(split(done, 1 << l[j]), l[j], l[j + 1]))?;
            done += 1 << l[j];
        }
    }
    for &b in &l[1..] {
        c.push(Gate::x(b))?;
    }
    Ok(c)
}

/// QFT on `m` qubits: `|x> -> N^{-1/2} sum_y e^{2 pi i x y / N} |y>`.
pub fn qft(m: usize) -> Circuit {
    let mut c = Circuit::new(m);
    for j in (0..m).rev() {
        c.push(Gate::h(j)).unwrap();
        for k in (0..j).rev() {
            c.push(Gate::cphase(PI / (1u64 << (j - k)) as f64, k, j)).unwrap();
        }
    }
    for i in 0..m / 2 {
        c.push(Gate::swap(i, m - 1 - i)).unwrap();
    }
    c
}

pub fn inverse_qft(m: usize) -> Circuit {
    qft(m).inverse()
}

pub(crate) fn qft_block(m: usize) -> Gate {
    Gate::block("qft", qft(m), (0..m).collect()).unwrap()
}

pub(crate) fn iqft_block(m: usize) -> Gate {
    qft_block(m).inverse()
}

/// `|x> -> |x + k mod 2^m>`: QFT, one phase per qubit, inverse QFT.
pub fn draper_add(m: usize, k: u64) -> Vec<Gate> {
    let n = (1u128 << m) as f64;
    let mut gates = vec![qft_block(m)];
    for j in 0..m {
        let frac = ((k as u128) << j) % (1u128 << m);
        gates.push(Gate::phase(2.0 * PI * frac as f64 / n, j));
    }
    gates.push(iqft_block(m));
    gates
}

/// True when `[k_s, k_e)` is a single aligned power-of-two block.
pub fn is_aligned(k_s: usize, k_e: usize) -> bool {
    let w = k_e - k_s;
    w.is_power_of_two() && k_s % w == 0
}

/// Uniform superposition over `[k_s, k_e)`.
pub fn synth_square(k_s: usize, k_e: usize, m: usize) -> Result<Circuit> {
    if k_s == 0 {
        return synth_step(k_e, m);
    }
    let w = k_e - k_s;
    if is_aligned(k_s, k_e) {
        let p = w.trailing_zeros() as usize;
        let mut c = Circuit::new(m);
        for b in p..m {
            if (k_s >> b) & 1 == 1 {
                c.push(Gate::x(b))?;
            }
        }
        for q in 0..p {
            c.push(Gate::h(q))?;
        }
        return Ok(c);
    }
    let mut c = synth_step(w, m)?;
    for g in draper_add(m, k_s as u64) {
        c.push(g)?;
    }
    Ok(c)
}
