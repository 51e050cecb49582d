//! Synthesizers behind [`encode`] and the shared builders they use.

pub mod dicke;
pub mod fourier;
pub mod interval;
pub mod partition;
pub mod polynomial;
pub mod product;
pub mod sparse;
pub mod sum;
pub mod tensor;

use serde::{Serialize, Serializer};
use serde_json::{Map, Value};

use crate::circuit::{Circuit, Gate, Op};
use crate::error::{Error, Result};
use crate::patterns::{build_vector, num_qubits, validate_params, Pattern};
use crate::simulate::{phase_aligned_distance, run, DEFAULT_VALIDATION_CAP};
use crate::transpile::transpiled_counts;
use crate::C64;

pub use dicke::synth_dicke;
pub use fourier::synth_fourier;
pub use interval::{draper_add, inverse_qft, is_aligned, qft, synth_square, synth_step};
pub use partition::synth_partition;
pub use polynomial::{synth_polynomial, wht};
pub use product::{synth_geometric, synth_hamming, synth_staircase, synth_walsh};
pub use sparse::synth_sparse;
pub use sum::{sum_success_probability, synth_sum};
pub use tensor::synth_tensor;

/// Aligned power-of-two interval `[start, start + width)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicBlock {
    pub start: usize,
    pub width: usize,
}

impl DyadicBlock {
    pub fn end(&self) -> usize {
        self.start + self.width
    }

    pub fn log_width(&self) -> usize {
        self.width.trailing_zeros() as usize
    }
}

/// Greedy cover of `[k_s, k_e)` by the largest aligned block that fits at
/// each position.
pub fn dyadic_decompose(k_s: usize, k_e: usize) -> Vec<DyadicBlock> {
    let mut out = Vec::new();
    let mut pos = k_s;
    while pos < k_e {
        let align = if pos == 0 { usize::MAX } else { 1usize << pos.trailing_zeros() };
        let mut w = align.min((k_e - pos).next_power_of_two());
        while w > k_e - pos {
            w /= 2;
        }
        out.push(DyadicBlock { start: pos, width: w });
        pos += w;
    }
    out
}

/// One block amplitude in log magnitude and phase.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Anchor {
    pub index: usize,
    pub ln_mag: f64,
    pub phase: f64,
}

/// Anchors as sparse-loader entries, rescaled so the largest magnitude is 1.
pub(crate) fn normalize_anchors(anchors: &[Anchor]) -> Vec<(usize, C64)> {
    let top = anchors.iter().map(|a| a.ln_mag).fold(f64::NEG_INFINITY, f64::max);
    anchors.iter().map(|a| (a.index, C64::from_polar((a.ln_mag - top).exp(), a.phase))).collect()
}

/// Applies `ops` to `target` conditioned on each `(qubit, value)` control;
/// zero-valued controls are conjugated with X.
pub(crate) fn push_pattern_controlled(c: &mut Circuit, controls: &[(usize, bool)], ops: &[Op], target: usize) -> Result<()> {
    let zeros: Vec<usize> = controls.iter().filter(|x| !x.1).map(|x| x.0).collect();
    let ctrl: Vec<usize> = controls.iter().map(|x| x.0).collect();
    for &z in &zeros {
        c.push(Gate::x(z))?;
    }
    for op in ops {
        c.push(Gate::new(op.clone(), ctrl.clone(), vec![target])?)?;
    }
    for &z in &zeros {
        c.push(Gate::x(z))?;
    }
    Ok(())
}

/// Circuit preparing a leaf pattern's normalized vector exactly, global
/// phase included.
pub(crate) fn synth_leaf(p: &Pattern, m: usize) -> Result<Circuit> {
    Ok(match p {
        Pattern::Sparse { entries } => synth_sparse(entries, m)?,
        Pattern::Step { k_e, c } => {
            let mut circ = synth_step(*k_e, m)?;
            circ.set_global_phase(c.arg());
            circ
        }
        Pattern::Square { k_s, k_e, c } => {
            let mut circ = synth_square(*k_s, *k_e, m)?;
            circ.set_global_phase(c.arg());
            circ
        }
        Pattern::Walsh { k, c0, c1 } => synth_walsh(*k, *c0, *c1, m)?,
        Pattern::Fourier { modes } => synth_fourier(modes, m)?,
        Pattern::Geometric { r, k_s, c } => synth_geometric(*r, *k_s, *c, m)?,
        Pattern::Hamming { r, c } => synth_hamming(*r, *c, m)?,
        Pattern::Staircase { r, c } => synth_staircase(*r, *c, m)?,
        Pattern::Dicke { k, .. } => synth_dicke(*k, m)?,
        Pattern::Polynomial { coeffs } => synth_polynomial(coeffs, m)?,
        Pattern::Sum { .. } | Pattern::Partition { .. } | Pattern::Tensor { .. } => {
            return Err(Error::InvalidParam(format!("{} is not a leaf pattern", p.name())))
        }
    })
}

/// Asymptotic gate complexity label of a pattern.
pub fn complexity(p: &Pattern, n: usize) -> String {
    let cheap_window = |k_s: usize, k_e: usize| k_s == 0 || is_aligned(k_s, k_e);
    match p {
        Pattern::Sparse { .. } => "O(s*m)".into(),
        Pattern::Square { k_s, k_e, .. } if !cheap_window(*k_s, *k_e) => "O(m^2)".into(),
        Pattern::Geometric { k_s, .. } if !cheap_window(*k_s, n) => "O(m^2)".into(),
        Pattern::Step { .. }
        | Pattern::Square { .. }
        | Pattern::Walsh { .. }
        | Pattern::Geometric { .. }
        | Pattern::Hamming { .. }
        | Pattern::Staircase { .. } => "O(m)".into(),
        Pattern::Fourier { .. } => "O(m^2)".into(),
        Pattern::Dicke { .. } => "O(k*(m-k))".into(),
        Pattern::Polynomial { coeffs } if coeffs.len() == 1 => "O(m)".into(),
        Pattern::Polynomial { coeffs } => format!("O(m^{})", coeffs.len()),
        Pattern::Sum { .. } | Pattern::Tensor { .. } => "O(sum C_i)".into(),
        Pattern::Partition { .. } => "O(L*m)".into(),
    }
}

fn serialize_vector<S: Serializer>(v: &Option<Vec<C64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(v) => s.collect_seq(v.iter().map(|z| [z.re, z.im])),
    }
}

/// Synthesis metadata returned next to every circuit.
#[derive(Clone, Debug, Serialize)]
pub struct EncodingInfo {
    pub pattern_name: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub m: usize,
    pub params: Map<String, Value>,
    pub gate_count: usize,
    pub gate_count_1q: usize,
    pub gate_count_2q: usize,
    pub circuit_depth: usize,
    pub complexity: String,
    pub success_probability: f64,
    pub circuit_code: String,
    pub validated: bool,
    #[serde(serialize_with = "serialize_vector", skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<C64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EncodeOptions {
    pub validate: bool,
    pub tol: f64,
    /// Largest total qubit count validation will simulate.
    pub validation_cap: usize,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions { validate: false, tol: 1e-6, validation_cap: DEFAULT_VALIDATION_CAP }
    }
}

/// Circuit plus the data that only the synthesizer knows.
pub struct Synthesized {
    pub circuit: Circuit,
    pub success_probability: f64,
    pub warnings: Vec<String>,
}

pub(crate) fn synthesize(p: &Pattern, m: usize) -> Result<Synthesized> {
    match p {
        Pattern::Sum { terms } => synth_sum(terms, m),
        Pattern::Partition { parts } => Ok(Synthesized {
            circuit: synth_partition(parts, m)?,
            success_probability: 1.0,
            warnings: vec![],
        }),
        Pattern::Tensor { parts } => Ok(Synthesized {
            circuit: synth_tensor(parts, m)?,
            success_probability: 1.0,
            warnings: vec![],
        }),
        _ => Ok(Synthesized { circuit: synth_leaf(p, m)?, success_probability: 1.0, warnings: vec![] }),
    }
}

/// Compiles `pattern` for a vector of length `n` with default options.
pub fn encode(pattern: &Pattern, n: usize) -> Result<(Circuit, EncodingInfo)> {
    encode_with(pattern, n, &EncodeOptions::default())
}

/// Compiles `pattern` and, when `opts.validate` is set, checks the simulated
/// state against the analytic vector (post-selecting any ancilla on |0>).
pub fn encode_with(pattern: &Pattern, n: usize, opts: &EncodeOptions) -> Result<(Circuit, EncodingInfo)> {
    validate_params(pattern, n)?;
    let m = num_qubits(n)?;
    let syn = synthesize(pattern, m)?;
    let circuit = syn.circuit;
    let counts = transpiled_counts(&circuit);
    let mut info = EncodingInfo {
        pattern_name: pattern.name().to_string(),
        n,
        m,
        params: pattern.params(),
        gate_count: circuit.gate_count(),
        gate_count_1q: counts.gate_count_1q,
        gate_count_2q: counts.gate_count_2q,
        circuit_depth: counts.circuit_depth,
        complexity: complexity(pattern, n),
        success_probability: syn.success_probability,
        circuit_code: circuit.listing(),
        validated: false,
        vector: None,
        warnings: syn.warnings,
    };
    if opts.validate {
        let want = build_vector(pattern, n)?;
        let distance = validation_distance(&circuit, m, &want, opts.validation_cap)?;
        if !(distance < opts.tol) {
            return Err(Error::ValidationFailed { distance, tol: opts.tol });
        }
        info.validated = true;
        info.vector = Some(want);
    }
    Ok((circuit, info))
}

/// Phase-aligned distance between the data register (ancilla post-selected
/// on |0>, renormalized) and `want`.
pub(crate) fn validation_distance(circuit: &Circuit, m: usize, want: &[C64], cap: usize) -> Result<f64> {
    if circuit.num_qubits() > cap {
        return Err(Error::QubitCap { num_qubits: circuit.num_qubits(), cap });
    }
    let sv = run(circuit)?;
    let (data, p) = sv.postselect_low(m);
    if !(p > 0.0) {
        return Err(Error::ValidationFailed { distance: f64::INFINITY, tol: 0.0 });
    }
    phase_aligned_distance(&data, want)
}
