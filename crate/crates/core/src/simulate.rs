//! Dense statevector execution with in-place bitmask kernels.

use nalgebra::DMatrix;

use crate::circuit::{Circuit, Gate, Mat2, Op};
use crate::error::{Error, Result};
use crate::C64;

/// Largest register `run` will allocate.
pub const MAX_SIM_QUBITS: usize = 24;

/// Largest register `encode(.., validate = true)` simulates unless overridden.
pub const DEFAULT_VALIDATION_CAP: usize = 20;

/// Complex amplitudes of a `2^m` register.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    amps: Vec<C64>,
}

impl Statevector {
    /// `|0…0>` on `m` qubits.
    pub fn zero(m: usize) -> Result<Statevector> {
        if m > MAX_SIM_QUBITS {
            return Err(Error::QubitCap { num_qubits: m, cap: MAX_SIM_QUBITS });
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << m];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Statevector { amps })
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Statevector> {
        if amps.is_empty() || !amps.len().is_power_of_two() {
            return Err(Error::InvalidParam(format!("statevector length {} is not a power of two", amps.len())));
        }
        Ok(Statevector { amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }
    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies every gate of `circuit` and then its global phase.
    pub fn apply(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() > self.num_qubits() {
            return Err(Error::InvalidParam(format!(
                "{}-qubit circuit on a {}-qubit state",
                circuit.num_qubits(),
                self.num_qubits()
            )));
        }
        for g in circuit.gates() {
            apply_gate(&mut self.amps, g, 0);
        }
        let ph = circuit.global_phase();
        if ph != 0.0 {
            let f = C64::from_polar(1.0, ph);
            self.amps.iter_mut().for_each(|a| *a *= f);
        }
        Ok(())
    }

    /// Renormalized data-register state given that qubits `>= m_data` read 0,
    /// together with the probability of that outcome.
    pub fn postselect_low(&self, m_data: usize) -> (Vec<C64>, f64) {
        let n = 1usize << m_data;
        let head = &self.amps[..n];
        let p: f64 = head.iter().map(|a| a.norm_sqr()).sum();
        let s = if p > 0.0 { p.sqrt() } else { 1.0 };
        (head.iter().map(|a| a / s).collect(), p)
    }
}

fn mask_of(qs: &[usize]) -> usize {
    qs.iter().fold(0, |m, &q| m | (1 << q))
}

fn apply_1q(amps: &mut [C64], u: &Mat2, t: usize, cmask: usize) {
    let tb = 1usize << t;
    for i in 0..amps.len() {
        if i & tb == 0 && i & cmask == cmask {
            let (a, b) = (amps[i], amps[i | tb]);
            amps[i] = u[0][0] * a + u[0][1] * b;
            amps[i | tb] = u[1][0] * a + u[1][1] * b;
        }
    }
}

fn apply_dense(amps: &mut [C64], u: &DMatrix<C64>, targets: &[usize], cmask: usize) {
    let tmask = mask_of(targets);
    let d = u.nrows();
    let offsets: Vec<usize> = (0..d)
        .map(|l| targets.iter().enumerate().filter(|(b, _)| (l >> b) & 1 == 1).fold(0, |o, (_, &q)| o | (1 << q)))
        .collect();
    let mut buf = vec![C64::new(0.0, 0.0); d];
    for base in 0..amps.len() {
        if base & tmask != 0 || base & cmask != cmask {
            continue;
        }
        for (l, &o) in offsets.iter().enumerate() {
            buf[l] = amps[base | o];
        }
        for (r, &o) in offsets.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (l, v) in buf.iter().enumerate() {
                acc += u[(r, l)] * v;
            }
            amps[base | o] = acc;
        }
    }
}

/// Applies `g` with the additional control mask `cmask`.
fn apply_gate(amps: &mut [C64], g: &Gate, cmask: usize) {
    let cmask = cmask | mask_of(g.controls());
    let t = g.targets();
    match g.op() {
        Op::Swap => {
            let (a, b) = (1usize << t[0], 1usize << t[1]);
            for i in 0..amps.len() {
                if i & a != 0 && i & b == 0 && i & cmask == cmask {
                    amps.swap(i, i ^ a ^ b);
                }
            }
        }
        Op::Unitary(u) => apply_dense(amps, u, t, cmask),
        Op::Block(blk) => {
            for inner in blk.body.gates() {
                apply_gate(amps, &inner.remap(|q| t[q]), cmask);
            }
            let ph = blk.body.global_phase();
            if ph != 0.0 {
                let f = C64::from_polar(1.0, ph);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & cmask == cmask {
                        *a *= f;
                    }
                }
            }
        }
        op => {
            let u = op.matrix().expect("single-qubit op");
            apply_1q(amps, &u, t[0], cmask);
        }
    }
}

/// `U|0…0>` including the global phase.
pub fn run(circuit: &Circuit) -> Result<Statevector> {
    let mut sv = Statevector::zero(circuit.num_qubits())?;
    sv.apply(circuit)?;
    Ok(sv)
}

/// Full unitary, column `j` = `U|j>`. Intended for small registers.
pub fn unitary_matrix(circuit: &Circuit) -> Result<DMatrix<C64>> {
    let m = circuit.num_qubits();
    if m > 12 {
        return Err(Error::QubitCap { num_qubits: m, cap: 12 });
    }
    let n = 1usize << m;
    let mut out = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut amps = vec![C64::new(0.0, 0.0); n];
        amps[j] = C64::new(1.0, 0.0);
        let mut sv = Statevector { amps };
        sv.apply(circuit)?;
        for (i, a) in sv.amps.iter().enumerate() {
            out[(i, j)] = *a;
        }
    }
    Ok(out)
}

/// `<a|b>`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `min_phi ||a - e^{i phi} b||`, attained at `e^{i phi} = <b|a>/|<b|a>|`.
/// For unit vectors this is `sqrt(2 - 2|<a|b>|)`.
pub fn phase_aligned_distance(a: &[C64], b: &[C64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    // e^{i phi} = <b|a> / |<b|a>|; any phase is optimal when they are orthogonal
    let ov = inner(b, a);
    let rot = if ov.norm() > 0.0 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
    Ok(a.iter().zip(b).map(|(x, y)| (x - rot * y).norm_sqr()).sum::<f64>().sqrt())
}
