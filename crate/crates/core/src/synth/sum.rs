//! SUM: PREP-SELECT-PREP† over an ancilla register with post-selection.

use crate::circuit::{controlled_on, Circuit, Op};
use crate::error::{Error, Result};
use crate::patterns::{disjoint, ln_norm, scaled_vector, support, Pattern};
use crate::simulate::inner;
use crate::C64;

use super::{push_pattern_controlled, synth_leaf, Synthesized};

/// Probabilities below this count as total cancellation.
const ZERO_PROBABILITY: f64 = 1e-12;

/// `beta_j^2` proportional to `|w_j| ||f_j||`, summing to one.
pub(crate) fn prep_weights(terms: &[(C64, Pattern)], n: usize) -> Vec<f64> {
    let ln: Vec<f64> = terms.iter().map(|(w, p)| w.norm().ln() + ln_norm(p, n)).collect();
    let top = ln.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = ln.iter().map(|l| (l - top).exp()).collect();
    let z: f64 = raw.iter().sum();
    raw.iter().map(|x| x / z).collect()
}

pub(crate) fn ancilla_count(r: usize) -> usize {
    r.next_power_of_two().trailing_zeros() as usize
}

fn unit(p: &Pattern, n: usize) -> Vec<C64> {
    let (v, _) = scaled_vector(p, n);
    let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / s).collect()
}

fn overlapping(terms: &[(C64, Pattern)], n: usize) -> Vec<(usize, usize)> {
    let sup: Vec<_> = terms.iter().map(|(_, p)| support(p, n)).collect();
    let mut out = Vec::new();
    for i in 0..sup.len() {
        for j in i + 1..sup.len() {
            if !disjoint(&sup[i], &sup[j]) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Probability that the ancilla register reads |0...0> after the LCU
/// circuit: `|| sum_j beta_j^2 e^{i arg w_j} f_j_hat ||^2`.
pub fn sum_success_probability(terms: &[(C64, Pattern)], n: usize) -> f64 {
    let b2 = prep_weights(terms, n);
    let mut p: f64 = b2.iter().map(|b| b * b).sum();
    let pairs = overlapping(terms, n);
    if pairs.is_empty() {
        return p;
    }
    let units: Vec<Option<Vec<C64>>> = (0..terms.len())
        .map(|j| pairs.iter().any(|&(a, b)| a == j || b == j).then(|| unit(&terms[j].1, n)))
        .collect();
    for (i, j) in pairs {
        let (ui, uj) = (units[i].as_ref().unwrap(), units[j].as_ref().unwrap());
        let rel = C64::from_polar(1.0, terms[j].0.arg() - terms[i].0.arg());
        p += 2.0 * b2[i] * b2[j] * (rel * inner(ui, uj)).re;
    }
    p.clamp(0.0, 1.0)
}

/// Binary RY tree on `k` qubits preparing `sum_j sqrt(b2_j) |j>`, most
/// significant qubit first.
fn prep_tree(b2: &[f64], k: usize) -> Result<Circuit> {
    let mut w = b2.to_vec();
    w.resize(1 << k, 0.0);
    let mut c = Circuit::new(k);
    for b in (0..k).rev() {
        let half = 1usize << b;
        for prefix in 0..(1usize << (k - 1 - b)) {
            let start = prefix << (b + 1);
            let left: f64 = w[start..start + half].iter().sum();
            let right: f64 = w[start + half..start + 2 * half].iter().sum();
            if right == 0.0 {
                continue;
            }
            let theta = 2.0 * right.sqrt().atan2(left.sqrt());
            let controls: Vec<(usize, bool)> = (b + 1..k).map(|q| (q, (start >> q) & 1 == 1)).collect();
            push_pattern_controlled(&mut c, &controls, &[Op::Ry(theta)], b)?;
        }
    }
    Ok(c)
}

/// Linear combination `sum_j w_j f_j` of leaf patterns on `m` data qubits
/// plus `ceil(log2 r)` ancillas above them.
pub fn synth_sum(terms: &[(C64, Pattern)], m: usize) -> Result<Synthesized> {
    let n = 1usize << m;
    if terms.len() == 1 {
        let (w, p) = &terms[0];
        let mut circuit = synth_leaf(p, m)?;
        circuit.add_global_phase(w.arg());
        return Ok(Synthesized { circuit, success_probability: 1.0, warnings: vec![] });
    }
    let success_probability = sum_success_probability(terms, n);
    if success_probability < ZERO_PROBABILITY {
        return Err(Error::ZeroVector("SUM components cancel".into()));
    }
    let mut warnings = Vec::new();
    for (i, j) in overlapping(terms, n) {
        warnings.push(format!(
            "SUM terms {i} and {j} have overlapping support; the success probability depends on their interference"
        ));
    }

    let k = ancilla_count(terms.len());
    let total = m + k;
    let anc: Vec<usize> = (m..total).collect();
    let prep = prep_tree(&prep_weights(terms, n), k)?;
    let prep_wide = {
        let mut c = Circuit::new(total);
        for g in prep.gates() {
            c.push(g.remap(|q| q + m))?;
        }
        c
    };
    let mut circuit = prep_wide.clone();
    for (j, (w, p)) in terms.iter().enumerate() {
        let mut u = synth_leaf(p, m)?;
        u.add_global_phase(w.arg());
        circuit.extend(&controlled_on(&u, &anc, j as u64, total)?)?;
    }
    circuit.extend(&prep_wide.inverse())?;
    Ok(Synthesized { circuit, success_probability, warnings })
}
