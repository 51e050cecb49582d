//! Sparse loader: pairwise merging of basis strings.
//!
//! Read backwards, each merge step maps two support strings onto a pair that
//! differs in one bit `dif` (CX gates controlled by `dif`) and folds their
//! amplitudes into one with a rotation on `dif` conditioned on bits that no
//! other support string matches. The preparation circuit replays the steps in
//! reverse, starting from the single surviving basis state.

use crate::circuit::{Circuit, Gate, Op};
use crate::error::Result;
use crate::C64;

use super::push_pattern_controlled;

const PHASE_TOL: f64 = 1e-12;

/// One merge step: rotation on `dif` under `controls`, then CX fan-out
/// from `dif` onto `cx_targets`.
pub(crate) struct Merge {
    pub dif: usize,
    pub cx_targets: Vec<usize>,
    pub controls: Vec<(usize, bool)>,
    pub theta: f64,
    pub phase: Option<f64>,
}

fn bit(x: u64, b: usize) -> bool {
    (x >> b) & 1 == 1
}

/// Narrows `cands` by repeated most-unbalanced splits until one string is
/// left; returns it and the split bits in order.
fn isolate(strings: &[u64], mut cands: Vec<usize>, m: usize) -> (usize, Vec<usize>) {
    let mut bits = Vec::new();
    while cands.len() > 1 {
        let mut best: Option<(usize, usize, bool)> = None;
        for b in 0..m {
            let ones = cands.iter().filter(|&&i| bit(strings[i], b)).count();
            let zeros = cands.len() - ones;
            if ones == 0 || zeros == 0 {
                continue;
            }
            let side = ones.min(zeros);
            if best.is_none_or(|(s, _, _)| side < s) {
                best = Some((side, b, ones <= zeros));
            }
        }
        let (_, b, val) = best.expect("distinct strings always split");
        cands.retain(|&i| bit(strings[i], b) == val);
        bits.push(b);
    }
    (cands[0], bits)
}

/// Merge steps in elimination order, the surviving string and its
/// amplitude.
pub(crate) fn plan_merges(entries: &[(usize, C64)], m: usize) -> (u64, C64, Vec<Merge>) {
    let mut strings: Vec<u64> = entries.iter().map(|e| e.0 as u64).collect();
    let mut amps: Vec<C64> = entries.iter().map(|e| e.1).collect();
    let mut merges = Vec::new();

    while strings.len() > 1 {
        let all: Vec<usize> = (0..strings.len()).collect();
        let (x1, chain) = isolate(&strings, all, m);
        let (&dif, prefix) = chain.split_last().expect("at least one split");
        let rest: Vec<usize> = (0..strings.len())
            .filter(|&i| i != x1 && prefix.iter().all(|&b| bit(strings[i], b) == bit(strings[x1], b)))
            .collect();
        let (x2, extra) = isolate(&strings, rest, m);

        let diff = strings[x1] ^ strings[x2];
        let cx_targets: Vec<usize> = (0..m).filter(|&b| b != dif && bit(diff, b)).collect();
        let flip: u64 = cx_targets.iter().fold(0, |f, &b| f | (1 << b));
        for s in strings.iter_mut() {
            if bit(*s, dif) {
                *s ^= flip;
            }
        }
        let (p, q) = if bit(strings[x1], dif) { (x2, x1) } else { (x1, x2) };
        let controls: Vec<(usize, bool)> = prefix.iter().chain(extra.iter()).map(|&b| (b, bit(strings[p], b))).collect();

        let (ap, aq) = (amps[p], amps[q]);
        let mut theta = 2.0 * aq.norm().atan2(ap.norm());
        let delta = crate::circuit::wrap_angle(aq.arg() - ap.arg());
        let phase = if delta.abs() < PHASE_TOL {
            None
        } else if delta.abs() > std::f64::consts::PI - PHASE_TOL {
            theta = -theta;
            None
        } else {
            Some(delta)
        };
        merges.push(Merge { dif, cx_targets, controls, theta, phase });

        amps[p] = C64::from_polar(ap.norm().hypot(aq.norm()), ap.arg());
        strings.remove(q);
        amps.remove(q);
    }

    (strings[0], amps[0], merges)
}

/// Circuit on `m` qubits preparing `sum a_j |x_j>` normalized, with the
/// residual phase of the last surviving amplitude as global phase.
pub fn synth_sparse(entries: &[(usize, C64)], m: usize) -> Result<Circuit> {
    let (start, amp, merges) = plan_merges(entries, m);
    let mut c = Circuit::new(m);
    c.set_global_phase(amp.arg());
    for b in 0..m {
        if bit(start, b) {
            c.push(Gate::x(b))?;
        }
    }
    for mg in merges.iter().rev() {
        let mut ops = vec![Op::Ry(mg.theta)];
        if let Some(d) = mg.phase {
            ops.push(Op::Phase(d));
        }
        push_pattern_controlled(&mut c, &mg.controls, &ops, mg.dif)?;
        for &t in &mg.cx_targets {
            c.push(Gate::cx(mg.dif, t))?;
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::run;

    fn target(entries: &[(usize, C64)], n: usize) -> Vec<C64> {
        let s = entries.iter().map(|e| e.1.norm_sqr()).sum::<f64>().sqrt();
        let mut v = vec![C64::new(0.0, 0.0); n];
        entries.iter().for_each(|&(i, a)| v[i] = a / s);
        v
    }

    fn assert_exact(entries: &[(usize, C64)], m: usize) -> Circuit {
        let c = synth_sparse(entries, m).unwrap();
        let got = run(&c).unwrap();
        let want = target(entries, 1 << m);
        for (g, w) in got.amplitudes().iter().zip(&want) {
            assert!((g - w).norm() < 1e-12, "{entries:?}: {g} vs {w}");
        }
        c
    }

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn single_entry_is_x_gates() {
        let c = assert_exact(&[(19, r(1.0))], 6);
        assert_eq!(c.gate_count(), 3);
        assert!(c.gates().iter().all(|g| g.name() == "x"));
        assert!(assert_exact(&[(0, r(1.0))], 2).is_empty());
    }

    #[test]
    fn two_entries_five_gates() {
        let c = assert_exact(&[(1, r(3.0)), (6, r(-4.0))], 3);
        assert_eq!(c.gate_count(), 5);
    }

    #[test]
    fn complex_and_many_entries() {
        assert_exact(&[(0, C64::new(0.3, 0.4)), (5, C64::new(-1.0, 0.2)), (7, C64::new(0.0, -0.7))], 3);
        let entries: Vec<(usize, C64)> =
            (0..40).map(|k| ((k * 37 + 11) % 256, C64::from_polar(1.0 + k as f64, 0.1 * k as f64))).collect();
        assert_exact(&entries, 8);
        let dense: Vec<(usize, C64)> = (0..16).map(|i| (i, r(i as f64 - 7.5))).collect();
        assert_exact(&dense, 4);
    }

    #[test]
    fn global_phase_of_single_state() {
        let c = synth_sparse(&[(2, C64::from_polar(2.0, 0.9))], 2).unwrap();
        assert!((c.global_phase() - 0.9).abs() < 1e-15);
    }
}
