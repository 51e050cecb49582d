//! Transpiled resource counts from arithmetic on the pattern parameters.
//!
//! Families whose lowered circuit has a fixed shape get closed forms that
//! equal the transpiler's output to the gate. The rest get fitted upper
//! bounds over a size feature, with coefficients frozen from a sweep.

use std::f64::consts::PI;

use serde::Serialize;

use crate::circuit::{wrap_angle, Op};
use crate::error::Result;
use crate::patterns::{fourier_coefficients, is_complex, num_qubits, validate_params, Mode, Pattern};
use crate::synth::partition::partition_blocks;
use crate::synth::product::{geometric_anchors, geometric_product_ops, ratio_op};
use crate::synth::sparse::plan_merges;
use crate::synth::sum::ancilla_count;
use crate::synth::{complexity, dyadic_decompose, is_aligned, normalize_anchors, Anchor, DyadicBlock};
use crate::transpile::{cost, identity_phase};
use crate::C64;

/// Predicted transpiled counts; `exact` marks closed-form values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictResult {
    pub pattern_name: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    pub gate_count_1q: usize,
    pub gate_count_2q: usize,
    pub circuit_depth: usize,
    pub complexity: String,
    pub exact: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Counts {
    q1: usize,
    q2: usize,
    depth: usize,
    exact: bool,
}

impl Counts {
    fn exact(q1: usize, q2: usize, depth: usize) -> Counts {
        Counts { q1, q2, depth, exact: true }
    }

    /// A layer of `k` disjoint single-qubit gates.
    fn layer(k: usize) -> Counts {
        Counts::exact(k, 0, (k > 0) as usize)
    }
}

/// Slopes of fitted bounds `w + ceil(slope * cx)` over the modeled CX
/// count `cx` of a register of width `w`.
#[derive(Clone, Copy, Debug)]
struct Fit {
    q1: f64,
    depth: f64,
}

impl Fit {
    /// `q1 <= w + 2 cx` holds because every CX splits at most one run of
    /// single-qubit gates on each of its qubits, and `depth <= q1 + cx`;
    /// the slopes only tighten these and apply from `FIT_MIN_M` data qubits.
    fn bound(&self, cx: usize, w: usize, m: usize) -> Counts {
        let (a1, ad) = if m >= FIT_MIN_M { (self.q1, self.depth) } else { (2.0, 3.0) };
        let q1 = w + ((a1 * cx as f64).ceil() as usize).min(2 * cx);
        let depth = w + ((ad * cx as f64).ceil() as usize).min(3 * cx);
        Counts { q1, q2: cx, depth, exact: false }
    }
}

const FIT_MIN_M: usize = 4;

// Largest (measured - w) / cx over m in 4..=12 on the calibration grid in
// the tests below, plus a margin. SUM and PARTITION also cover randomized
// compositions from tests/properties.rs.
const FIT_SPARSE: Fit = Fit { q1: 1.2, depth: 2.05 };
const FIT_SQUARE: Fit = Fit { q1: 1.5, depth: 1.5 };
const FIT_GEOMETRIC: Fit = Fit { q1: 1.4, depth: 2.2 };
const FIT_FOURIER: Fit = Fit { q1: 1.3, depth: 1.75 };
const FIT_DICKE: Fit = Fit { q1: 0.72, depth: 1.65 };
const FIT_POLYNOMIAL: Fit = Fit { q1: 1.1, depth: 2.05 };
const FIT_PARTITION: Fit = Fit { q1: 1.6, depth: 2.1 };
const FIT_SUM: Fit = Fit { q1: 1.7, depth: 2.15 };

/// Transpiled 1q/2q counts and depth of `encode(p, n)` without building a
/// circuit.
pub fn predict_gates(p: &Pattern, n: usize) -> Result<PredictResult> {
    let m = num_qubits(n)?;
    validate_params(p, n)?;
    let c = predict_counts(p, m);
    Ok(PredictResult {
        pattern_name: p.name().to_string(),
        n,
        m,
        gate_count_1q: c.q1,
        gate_count_2q: c.q2,
        circuit_depth: c.depth,
        complexity: complexity(p, n),
        exact: c.exact,
    })
}

fn predict_counts(p: &Pattern, m: usize) -> Counts {
    let n = 1usize << m;
    match p {
        Pattern::Sparse { entries } if entries.len() == 1 => Counts::layer(entries[0].0.count_ones() as usize),
        Pattern::Sparse { .. } => FIT_SPARSE.bound(model_cx(p, m), m, m),
        Pattern::Step { k_e, .. } => step(*k_e),
        Pattern::Square { k_s: 0, k_e, .. } => step(*k_e),
        Pattern::Square { k_s, k_e, .. } if is_aligned(*k_s, *k_e) => {
            let p = (k_e - k_s).trailing_zeros();
            Counts::layer((k_s >> p).count_ones() as usize + p as usize)
        }
        Pattern::Square { .. } => FIT_SQUARE.bound(model_cx(p, m), m, m),
        Pattern::Walsh { .. } => Counts::layer(m),
        Pattern::Fourier { modes } if modes.len() == 1 => fourier_single(&modes[0], m),
        Pattern::Fourier { .. } => FIT_FOURIER.bound(model_cx(p, m), m, m),
        Pattern::Geometric { r, k_s, .. } if *k_s == 0 || is_aligned(*k_s, n) => {
            let p = (n - k_s).trailing_zeros();
            let flips = (k_s >> p).count_ones() as usize;
            Counts::layer(flips + geometric_product_ops(*r, p as usize).iter().filter(|o| !is_identity(o)).count())
        }
        Pattern::Geometric { .. } => FIT_GEOMETRIC.bound(model_cx(p, m), m, m),
        Pattern::Hamming { r, .. } => {
            let complex = is_complex(*r);
            let arg = if complex { r.arg() } else if r.re < 0.0 { PI } else { 0.0 };
            Counts::layer(if is_identity(&ratio_op(r.norm().ln(), arg, complex)) { 0 } else { m })
        }
        Pattern::Staircase { r, .. } => staircase(is_complex(*r), m),
        Pattern::Dicke { k, .. } if *k == 0 => Counts::exact(0, 0, 0),
        Pattern::Dicke { k, .. } if *k == m => Counts::layer(m),
        Pattern::Dicke { .. } => FIT_DICKE.bound(model_cx(p, m), m, m),
        Pattern::Polynomial { coeffs } if coeffs.len() == 1 => Counts::layer(m),
        Pattern::Polynomial { coeffs } => {
            let linear = if coeffs.len() == 2 { linear_polynomial(coeffs[0], coeffs[1], m) } else { None };
            linear.unwrap_or_else(|| FIT_POLYNOMIAL.bound(model_cx(p, m), m, m))
        }
        Pattern::Sum { terms } => {
            let a = ancilla_count(terms.len());
            FIT_SUM.bound(sum_cx(terms, m), m + a, m)
        }
        Pattern::Partition { .. } => FIT_PARTITION.bound(model_cx(p, m), m, m),
        Pattern::Tensor { parts } => parts.iter().fold(Counts::exact(0, 0, 0), |acc, (q, ni)| {
            let c = predict_counts(q, ni.trailing_zeros() as usize);
            Counts { q1: acc.q1 + c.q1, q2: acc.q2 + c.q2, depth: acc.depth.max(c.depth), exact: acc.exact && c.exact }
        }),
    }
}

fn is_identity(op: &Op) -> bool {
    op.matrix().is_some_and(|u| identity_phase(&u).is_some())
}

/// IR gate classes as the lowering distinguishes them.
#[derive(Clone, Copy, Debug)]
enum Cls {
    X,
    H,
    Rot,
    Phase,
    /// General single-qubit unitary; `true` when its determinant is not 1.
    U(bool),
    Swap,
}

fn cls_of(op: &Op) -> Cls {
    match op {
        Op::X => Cls::X,
        Op::H => Cls::H,
        Op::Ry(_) | Op::Rz(_) => Cls::Rot,
        Op::Phase(_) => Cls::Phase,
        Op::U3(_, phi, lam) => Cls::U(wrap_angle(phi + lam) != 0.0),
        Op::Swap => Cls::Swap,
        Op::Unitary(_) | Op::Block(_) => unreachable!("patterns emit no dense or block ops here"),
    }
}

fn cx_of(c: Cls, k: usize, n: usize) -> usize {
    match c {
        Cls::X => cost::mcx(k, n),
        Cls::H => cost::traceless(k, n, false),
        Cls::Rot => cost::rot(k, n),
        Cls::Phase => cost::phase(k, n),
        Cls::U(ph) => cost::general(k, n, ph),
        Cls::Swap => cost::swap(k, n),
    }
}

/// Modeled CX count of a leaf on its own `m`-qubit register.
fn model_cx(p: &Pattern, m: usize) -> usize {
    skeleton(p, m).iter().map(|&(c, k)| cx_of(c, k, m)).sum()
}

/// SUM: PREP and its inverse on the ancillas, then every component with
/// the ancilla register as extra controls and its phase on the ancillas.
fn sum_cx(terms: &[(C64, Pattern)], m: usize) -> usize {
    let a = ancilla_count(terms.len());
    let n = m + a;
    if terms.len() == 1 {
        return model_cx(&terms[0].1, m);
    }
    let prep: usize = (0..a).map(|b| (1usize << (a - 1 - b)) * cost::rot(a - 1 - b, n)).sum();
    let body: usize = terms
        .iter()
        .map(|(_, q)| skeleton(q, m).iter().map(|&(c, k)| cx_of(c, k + a, n)).sum::<usize>() + cost::all_ones_phase(a, n))
        .sum();
    2 * prep + body
}

/// `(class, controls)` of every IR gate `encode` emits for a leaf, in
/// order, derived from the parameters alone.
fn skeleton(p: &Pattern, m: usize) -> Vec<(Cls, usize)> {
    let n = 1usize << m;
    let mut out = Vec::new();
    match p {
        Pattern::Sparse { entries } => sparse_skeleton(entries, m, &mut out),
        Pattern::Step { k_e, .. } | Pattern::Square { k_s: 0, k_e, .. } => step_skeleton(*k_e, &mut out),
        Pattern::Square { k_s, k_e, .. } if is_aligned(*k_s, *k_e) => {
            let p = (k_e - k_s).trailing_zeros();
            out.extend(std::iter::repeat_n((Cls::X, 0), (k_s >> p).count_ones() as usize));
            out.extend(std::iter::repeat_n((Cls::H, 0), p as usize));
        }
        Pattern::Square { k_s, k_e, .. } => {
            step_skeleton(k_e - k_s, &mut out);
            qft_skeleton(m, &mut out);
            out.extend(std::iter::repeat_n((Cls::Phase, 0), m));
            qft_skeleton(m, &mut out);
        }
        Pattern::Walsh { .. } => {
            out.extend([(Cls::Rot, 0), (Cls::Phase, 0)]);
            out.extend(std::iter::repeat_n((Cls::H, 0), m));
        }
        Pattern::Fourier { modes } => {
            let mut entries = Vec::new();
            for (k, f) in fourier_coefficients(modes) {
                entries.push((k, f.conj()));
                entries.push((n - k, f));
            }
            entries.sort_by_key(|e| e.0);
            sparse_skeleton(&entries, m, &mut out);
            qft_skeleton(m, &mut out);
        }
        Pattern::Geometric { r, k_s, .. } if *k_s == 0 || is_aligned(*k_s, n) => {
            let p = (n - k_s).trailing_zeros();
            out.extend(std::iter::repeat_n((Cls::X, 0), (k_s >> p).count_ones() as usize));
            out.extend(geometric_product_ops(*r, p as usize).iter().map(|o| (cls_of(o), 0)));
        }
        Pattern::Geometric { r, k_s, c } => {
            let blocks = dyadic_decompose(*k_s, n);
            sparse_skeleton(&normalize_anchors(&geometric_anchors(*r, *k_s, *c, &blocks)), m, &mut out);
            for b in &blocks {
                spread_skeleton(b, &geometric_product_ops(*r, b.log_width()), m, &mut out);
            }
        }
        Pattern::Hamming { r, .. } => out.extend(std::iter::repeat_n((if is_complex(*r) { Cls::U(true) } else { Cls::Rot }, 0), m)),
        Pattern::Staircase { r, .. } => {
            out.push((Cls::Rot, 0));
            out.extend(std::iter::repeat_n((Cls::Rot, 1), m - 1));
            if is_complex(*r) {
                out.extend(std::iter::repeat_n((Cls::Phase, 0), m));
            }
        }
        Pattern::Dicke { k, .. } => {
            // the complement side can leave up to m flips around the cascade
            if 2 * k > m {
                out.extend(std::iter::repeat_n((Cls::X, 0), m));
            }
            let k = (*k).min(m - k);
            let scs = |l: usize, k: usize, out: &mut Vec<(Cls, usize)>| {
                out.extend([(Cls::X, 1), (Cls::Rot, 1), (Cls::X, 1)]);
                for _ in 2..=k.min(l - 1) {
                    out.extend([(Cls::X, 1), (Cls::Rot, 2), (Cls::X, 1)]);
                }
            };
            if k > 0 {
                out.extend(std::iter::repeat_n((Cls::X, 0), k));
                for l in (k + 1..=m).rev() {
                    scs(l, k, &mut out);
                }
                for l in (2..=k).rev() {
                    scs(l, l - 1, &mut out);
                }
            }
        }
        Pattern::Polynomial { coeffs } => {
            let complex = coeffs.iter().any(|c| is_complex(*c));
            let d = coeffs.len() - 1;
            let entries: Vec<(usize, C64)> = (0..n)
                .filter(|i| i.count_ones() as usize <= d)
                .map(|i| (i, if complex { C64::from_polar(1.0, 0.1 * i as f64) } else { C64::new(1.0, 0.0) }))
                .collect();
            sparse_skeleton(&entries, m, &mut out);
            out.extend(std::iter::repeat_n((Cls::H, 0), m));
        }
        Pattern::Partition { parts } => {
            let blocks = partition_blocks(parts, m).expect("validated parts");
            let anchors: Vec<Anchor> = blocks.iter().map(|b| b.0).collect();
            sparse_skeleton(&normalize_anchors(&anchors), m, &mut out);
            for (_, blk, ops) in &blocks {
                spread_skeleton(blk, ops, m, &mut out);
            }
        }
        Pattern::Sum { .. } | Pattern::Tensor { .. } => unreachable!("compositions do not nest"),
    }
    out
}

fn sparse_skeleton(entries: &[(usize, C64)], m: usize, out: &mut Vec<(Cls, usize)>) {
    let (start, _, merges) = plan_merges(entries, m);
    out.extend(std::iter::repeat_n((Cls::X, 0), start.count_ones() as usize));
    for mg in merges.iter().rev() {
        let k = mg.controls.len();
        let zeros = mg.controls.iter().filter(|c| !c.1).count();
        out.extend(std::iter::repeat_n((Cls::X, 0), 2 * zeros));
        out.push((Cls::Rot, k));
        if mg.phase.is_some() {
            out.push((Cls::Phase, k));
        }
        out.extend(std::iter::repeat_n((Cls::X, 1), mg.cx_targets.len()));
    }
}

fn spread_skeleton(blk: &DyadicBlock, ops: &[Op], m: usize, out: &mut Vec<(Cls, usize)>) {
    let p = blk.log_width();
    if p == 0 {
        return;
    }
    let zeros = (p..m).filter(|&b| (blk.start >> b) & 1 == 0).count();
    out.extend(std::iter::repeat_n((Cls::X, 0), 2 * zeros));
    out.extend(ops.iter().map(|o| (cls_of(o), m - p)));
}

fn step_skeleton(k_e: usize, out: &mut Vec<(Cls, usize)>) {
    let l0 = k_e.trailing_zeros() as usize;
    let k = k_e.count_ones() as usize - 1;
    out.extend(std::iter::repeat_n((Cls::H, 0), l0));
    if k == 0 {
        return;
    }
    let top = usize::BITS as usize - 1 - k_e.leading_zeros() as usize;
    out.push((Cls::Rot, 0));
    out.extend(std::iter::repeat_n((Cls::H, 1), top - l0 - (k - 1)));
    out.extend(std::iter::repeat_n((Cls::Rot, 1), 2 * (k - 1)));
    out.extend(std::iter::repeat_n((Cls::X, 0), k));
}

fn qft_skeleton(m: usize, out: &mut Vec<(Cls, usize)>) {
    out.extend(std::iter::repeat_n((Cls::H, 0), m));
    out.extend(std::iter::repeat_n((Cls::Phase, 1), m * (m - 1) / 2));
    out.extend(std::iter::repeat_n((Cls::Swap, 0), m / 2));
}

/// STEP on `[0, k_e)`: with set bits `l_0 < .. < l_k` of `k_e`, an H layer
/// below `l_0`, one RY, one CX per controlled H and four gates per CRY.
fn step(k_e: usize) -> Counts {
    let l0 = k_e.trailing_zeros() as usize;
    let k = k_e.count_ones() as usize - 1;
    if k == 0 {
        return Counts::layer(l0);
    }
    let top = usize::BITS as usize - 1 - k_e.leading_zeros() as usize;
    let span = top - l0;
    Counts::exact(l0 + 2 * span + 3 * k - 1, span + 3 * (k - 1), 2 + span + 6 * (k - 1))
}

fn staircase(complex: bool, m: usize) -> Counts {
    match (complex, m) {
        (_, 1) => Counts::layer(1),
        (false, _) => Counts::exact(2 * m - 1, 2 * (m - 1), 3 * m - 2),
        (true, _) => Counts::exact(3 * m - 1, 2 * (m - 1), 3 * m - 1),
    }
}

/// One mode: a two-entry sparse load on `n` and `N - n`, then the inverse
/// QFT. Both indices share their lowest set bit `v` and differ on every bit
/// above it.
fn fourier_single(mode: &Mode, m: usize) -> Counts {
    let n = 1usize << m;
    let v = mode.n.trailing_zeros() as usize;
    let survivor = if (mode.n >> (v + 1)) & 1 == 0 { mode.n } else { n - mode.n };
    let flips = (survivor >> (v + 2)).count_ones() as usize;
    Counts::exact(
        m * (3 * m - 5) / 2 + 4 + flips,
        m * (m - 1) + 3 * (m / 2) + (m - v - 2),
        9 * m - 9 - v,
    )
}

/// `c0 + c1 x` has Walsh support on index 0 and the powers of two.
/// Returns `None` when the kept set is not one of the three shapes with a
/// closed form, or when an entry sits too close to the drop threshold.
fn linear_polynomial(c0: C64, c1: C64, m: usize) -> Option<Counts> {
    if m == 1 {
        return Some(Counts::layer(1));
    }
    const DROP_TOL: f64 = 1e-12;
    const MARGIN: f64 = 1e3;
    let nf = (1usize << m) as f64;
    let head = nf.sqrt() * (c0 + c1 * 0.5).norm();
    let scale = c1.norm() * nf.sqrt() / (2.0 * (nf - 1.0));
    let pow: Vec<f64> = (0..m).map(|j| scale * (1u64 << j) as f64).collect();
    let norm = (head * head + pow.iter().map(|x| x * x).sum::<f64>()).sqrt();
    let keep = |x: f64| -> Option<bool> {
        let t = DROP_TOL * norm;
        if x > t * MARGIN {
            Some(true)
        } else if x < t / MARGIN {
            Some(false)
        } else {
            None
        }
    };
    let head_kept = keep(head)?;
    let pow_kept: Vec<bool> = pow.iter().map(|&x| keep(x)).collect::<Option<_>>()?;
    match (head_kept, pow_kept.iter().filter(|&&b| b).count()) {
        (_, 0) => Some(Counts::layer(m)),
        (true, k) if k == m => Some(Counts::exact(3 * m - 1, 3 * (m - 1), 4 * m - 2)),
        (false, k) if k == m => Some(Counts::exact(3 * m - 2, 3 * m - 5, 4 * m - 5)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::encode;

    fn measured(p: &Pattern, n: usize) -> (usize, usize, usize) {
        let (_, info) = encode(p, n).unwrap();
        (info.gate_count_1q, info.gate_count_2q, info.circuit_depth)
    }

    fn check_exact(p: &Pattern, n: usize) {
        let r = predict_gates(p, n).unwrap();
        assert!(r.exact, "{p:?} N={n} not exact");
        assert_eq!((r.gate_count_1q, r.gate_count_2q, r.circuit_depth), measured(p, n), "{p:?} N={n}");
    }

    #[test]
    fn step_and_square_closed_forms() {
        for m in 1..=8 {
            let n = 1usize << m;
            for k_e in 1..=n {
                check_exact(&Pattern::step(k_e), n);
            }
            for w in (0..m).map(|p| 1usize << p) {
                for k_s in (w..n).step_by(w) {
                    check_exact(&Pattern::square(k_s, k_s + w), n);
                }
            }
        }
    }

    #[test]
    fn fourier_single_mode() {
        for m in 2..=8 {
            let n = 1usize << m;
            for f in 1..n / 2 {
                for phi in [0.0, PI / 2.0, 0.4, -2.0] {
                    check_exact(&Pattern::fourier(&[(f, -1.3, phi)]), n);
                }
            }
        }
    }

    #[test]
    fn linear_polynomials() {
        let cases: [[C64; 2]; 6] = [
            [C64::new(1.0, 0.0), C64::new(1.0, 0.0)],
            [C64::new(-0.5, 0.0), C64::new(1.0, 0.0)],
            [C64::new(2.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(1.0, 0.0), C64::new(0.0, 1.0)],
            [C64::new(0.3, -0.2), C64::new(-1.0, 0.7)],
            [C64::new(0.0, -0.5), C64::new(0.0, 1.0)],
        ];
        for m in 1..=10 {
            for cs in &cases {
                check_exact(&Pattern::Polynomial { coeffs: cs.to_vec() }, 1 << m);
            }
        }
    }

    #[test]
    fn product_families() {
        let ratios = [
            C64::new(0.5, 0.0),
            C64::new(-0.5, 0.0),
            C64::new(0.95, 0.0),
            C64::new(3.0, 0.0),
            C64::from_polar(0.8, 0.7),
            C64::from_polar(1.2, -2.0),
            C64::new(0.0, 0.9),
        ];
        for m in 1..=10 {
            let n = 1usize << m;
            for &r in &ratios {
                check_exact(&Pattern::hamming(r), n);
                check_exact(&Pattern::staircase(r), n);
                check_exact(&Pattern::geometric(r, 0), n);
                check_exact(&Pattern::geometric(r, n / 2), n);
                check_exact(&Pattern::geometric(r, n - 1), n);
            }
            for k in 0..m {
                check_exact(&Pattern::walsh(k, C64::new(1.0, 0.0), C64::new(-1.0, 0.0)), n);
                check_exact(&Pattern::walsh(k, C64::new(0.2, 0.4), C64::new(1.0, 0.0)), n);
            }
            for i in [0, 1, n - 1, n / 3] {
                check_exact(&Pattern::sparse(&[(i, C64::from_polar(2.0, 0.3))]), n);
            }
            check_exact(&Pattern::dicke(0), n);
            check_exact(&Pattern::dicke(m), n);
        }
    }

    #[test]
    fn hamming_matches_table_value() {
        let r = predict_gates(&Pattern::hamming(C64::new(0.7, 0.0)), 4096).unwrap();
        assert_eq!((r.gate_count_1q, r.gate_count_2q, r.circuit_depth, r.exact), (12, 0, 1, true));
    }

    #[test]
    fn invalid_pattern_is_rejected() {
        assert!(predict_gates(&Pattern::step(0), 8).is_err());
        assert!(predict_gates(&Pattern::step(3), 6).is_err());
    }

    fn fit_grid(m: usize) -> Vec<Pattern> {
        use rand::{Rng, SeedableRng};
        let n = 1usize << m;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(m as u64);
        let amp = |rng: &mut rand_chacha::ChaCha8Rng| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let mut out = Vec::new();
        for s in [2, 3, 5, 8, 16] {
            for _ in 0..3 {
                let mut idx: Vec<usize> = Vec::new();
                while idx.len() < s.min(n / 2) {
                    let i = rng.random_range(0..n);
                    if !idx.contains(&i) {
                        idx.push(i);
                    }
                }
                out.push(Pattern::sparse(&idx.iter().map(|&i| (i, amp(&mut rng))).collect::<Vec<_>>()));
            }
        }
        for (a, b) in [(1, n - 1), (3, n / 2 + 5), (n / 3, 2 * n / 3), (n / 2 - 1, n / 2 + 1), (2, n)] {
            if !is_aligned(a, b) {
                out.push(Pattern::square(a, b));
            }
        }
        for k_s in [1, 3, n / 3, n - 3] {
            for r in [C64::new(0.8, 0.0), C64::new(-0.6, 0.0), C64::from_polar(0.9, 0.7)] {
                if !is_aligned(k_s, n) {
                    out.push(Pattern::geometric(r, k_s));
                }
            }
        }
        for t in 2..=4 {
            let modes: Vec<(usize, f64, f64)> =
                (0..t).map(|_| (rng.random_range(1..n / 2), rng.random_range(0.5..2.0), rng.random_range(-3.0..3.0))).collect();
            let mut seen = Vec::new();
            if modes.iter().all(|md| if seen.contains(&md.0) { false } else { seen.push(md.0); true }) {
                out.push(Pattern::fourier(&modes));
            }
        }
        for k in 1..m {
            out.push(Pattern::dicke(k));
        }
        for d in 2..=3 {
            let cs: Vec<f64> = (0..=d).map(|_| rng.random_range(-2.0..2.0)).collect();
            out.push(Pattern::polynomial(&cs));
        }
        out.push(Pattern::Partition {
            parts: vec![Pattern::sparse_real(&[(2, 1.0), (5, -0.5)]), Pattern::geometric(C64::new(0.8, 0.0), 11.min(n - 1))],
        });
        out.push(Pattern::Partition { parts: vec![Pattern::step(3), Pattern::square(5, n - 1)] });
        out.push(Pattern::Partition {
            parts: vec![Pattern::square(1, n / 2 + 1), Pattern::geometric(C64::from_polar(0.7, 1.0), n / 2 + 3)],
        });
        let one = C64::new(1.0, 0.0);
        out.push(Pattern::Sum { terms: vec![(one, Pattern::square(0, n / 4)), (one, Pattern::square(n / 2, n / 2 + n / 4))] });
        out.push(Pattern::Sum { terms: vec![(one, Pattern::step(n / 2 + 1)), (C64::new(0.0, 0.5), Pattern::hamming(C64::new(0.6, 0.0)))] });
        out.push(Pattern::Sum {
            terms: vec![
                (one, Pattern::fourier(&[(1, 1.0, 0.0)])),
                (C64::new(-0.3, 0.0), Pattern::sparse_real(&[(3, 1.0), (n - 2, 0.5)])),
                (C64::new(0.2, 0.2), Pattern::walsh(m - 1, one, -one)),
            ],
        });
        out
    }

    fn family(p: &Pattern) -> &'static str {
        p.name()
    }

    #[test]
    #[ignore = "calibration sweep; prints the fitted slopes"]
    fn calibrate_fits() {
        use std::collections::BTreeMap;
        let mut hi: BTreeMap<&str, [f64; 3]> = BTreeMap::new();
        let mut lo: BTreeMap<&str, [f64; 3]> = BTreeMap::new();
        for m in 4..=12 {
            for p in fit_grid(m) {
                let r = predict_gates(&p, 1 << m).unwrap();
                assert!(!r.exact);
                let got = measured(&p, 1 << m);
                let w = match &p {
                    Pattern::Sum { terms } => m + ancilla_count(terms.len()),
                    _ => m,
                } as f64;
                let cx = r.gate_count_2q as f64;
                let ratio = [(got.0 as f64 - w) / cx, got.1 as f64 / cx, (got.2 as f64 - w) / cx];
                let h = hi.entry(family(&p)).or_insert([0.0; 3]);
                let l = lo.entry(family(&p)).or_insert([f64::MAX; 3]);
                for j in 0..3 {
                    h[j] = h[j].max(ratio[j]);
                    l[j] = l[j].min(ratio[j]);
                }
            }
        }
        for (k, h) in &hi {
            println!("{k}: max {h:?} min {:?}", lo[k]);
        }
        let mut loose: BTreeMap<&str, [f64; 3]> = BTreeMap::new();
        for m in 4..=12 {
            for p in fit_grid(m) {
                let r = predict_gates(&p, 1 << m).unwrap();
                let got = measured(&p, 1 << m);
                let e = loose.entry(family(&p)).or_insert([0.0; 3]);
                let pred = [r.gate_count_1q, r.gate_count_2q, r.circuit_depth];
                for (j, g) in [got.0, got.1, got.2].into_iter().enumerate() {
                    e[j] = e[j].max(pred[j] as f64 / g.max(1) as f64);
                }
            }
        }
        for (k, e) in &loose {
            println!("{k}: predicted/measured at most {e:?}");
        }
    }

    #[test]
    fn fitted_bounds_cover_grid() {
        for m in 4..=8 {
            for p in fit_grid(m) {
                let r = predict_gates(&p, 1 << m).unwrap();
                let got = measured(&p, 1 << m);
                assert!(!r.exact);
                assert!(r.gate_count_1q >= got.0 && r.gate_count_2q >= got.1 && r.circuit_depth >= got.2, "{p:?} m={m}: {r:?} vs {got:?}");
            }
        }
    }
}
