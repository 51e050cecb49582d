//! Gate-level circuit IR.
//!
//! A [`Gate`] is a base operation plus a (possibly empty) control set. The
//! named kinds CX, MCX, CRY and CPHASE are not separate variants: `X` with one
//! control *is* CX, so the canonical form falls out of the representation.
//! Composite sub-circuits (the QFT pair of the constant adder) are kept as
//! [`Op::Block`] and count as one IR gate until the transpiler expands them.
//!
//! Qubit `j` holds bit `j` of the amplitude index.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

pub type Mat2 = [[C64; 2]; 2];

/// Base operation of a gate.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    X,
    H,
    Ry(f64),
    Rz(f64),
    Phase(f64),
    U3(f64, f64, f64),
    Swap,
    /// Dense unitary on the gate's targets; local index bit `b` is `targets[b]`.
    Unitary(Arc<DMatrix<C64>>),
    Block(Arc<Block>),
}

/// Named sub-circuit whose qubit `j` maps to the enclosing gate's `targets[j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub name: String,
    pub body: Circuit,
}

/// Reported gate kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    H,
    RY,
    RZ,
    PHASE,
    U3,
    CX,
    CRY,
    CPHASE,
    MCX,
    SWAP,
    UNITARY,
    BLOCK,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    op: Op,
    controls: Vec<usize>,
    targets: Vec<usize>,
}

pub(crate) fn wrap_angle(a: f64) -> f64 {
    if a > -PI && a <= PI {
        return a;
    }
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

impl Op {
    fn arity(&self) -> Option<usize> {
        match self {
            Op::Swap => Some(2),
            Op::Unitary(u) => {
                let d = u.nrows();
                if d < 2 || !d.is_power_of_two() || u.ncols() != d {
                    None
                } else {
                    Some(d.trailing_zeros() as usize)
                }
            }
            Op::Block(b) => Some(b.body.num_qubits()),
            _ => Some(1),
        }
    }

    /// 2x2 matrix for single-qubit operations.
    pub fn matrix(&self) -> Option<Mat2> {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        Some(match *self {
            Op::X => [[z, one], [one, z]],
            Op::H => {
                let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[s, s], [s, -s]]
            }
            Op::Ry(t) => {
                let (s, c) = (t / 2.0).sin_cos();
                [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
            }
            Op::Rz(t) => [[C64::from_polar(1.0, -t / 2.0), z], [z, C64::from_polar(1.0, t / 2.0)]],
            Op::Phase(l) => [[one, z], [z, C64::from_polar(1.0, l)]],
            Op::U3(t, p, l) => {
                let (s, c) = (t / 2.0).sin_cos();
                [
                    [C64::new(c, 0.0), -C64::from_polar(s, l)],
                    [C64::from_polar(s, p), C64::from_polar(c, p + l)],
                ]
            }
            _ => return None,
        })
    }

    fn inverse(&self) -> Op {
        match self {
            Op::X | Op::H | Op::Swap => self.clone(),
            Op::Ry(t) => Op::Ry(-t),
            Op::Rz(t) => Op::Rz(-t),
            Op::Phase(l) => Op::Phase(-l),
            Op::U3(t, p, l) => Op::U3(-t, -l, -p),
            Op::Unitary(u) => Op::Unitary(Arc::new(u.adjoint())),
            Op::Block(b) => {
                let name = match b.name.strip_suffix("_dg") {
                    Some(base) => base.to_string(),
                    None => format!("{}_dg", b.name),
                };
                Op::Block(Arc::new(Block { name, body: b.body.inverse() }))
            }
        }
    }

    fn base_name(&self) -> &str {
        match self {
            Op::X => "x",
            Op::H => "h",
            Op::Ry(_) => "ry",
            Op::Rz(_) => "rz",
            Op::Phase(_) => "p",
            Op::U3(..) => "u3",
            Op::Swap => "swap",
            Op::Unitary(_) => "unitary",
            Op::Block(b) => &b.name,
        }
    }
}

impl Gate {
    /// Checked constructor: controls and targets must be distinct and the
    /// target count must match the operation.
    pub fn new(op: Op, controls: Vec<usize>, targets: Vec<usize>) -> Result<Gate> {
        match op.arity() {
            Some(k) if k == targets.len() => {}
            Some(k) => {
                return Err(Error::InvalidGate(format!(
                    "{} expects {k} target(s), got {}",
                    op.base_name(),
                    targets.len()
                )))
            }
            None => return Err(Error::InvalidGate("unitary must be square with power-of-two size".into())),
        }
        let mut seen = BTreeSet::new();
        for &q in controls.iter().chain(targets.iter()) {
            if !seen.insert(q) {
                return Err(Error::RegisterOverlap(format!("qubit {q} used twice in one gate")));
            }
        }
        if let Op::Unitary(u) = &op {
            let d = u.nrows();
            let err = (u.adjoint() * u.as_ref() - DMatrix::<C64>::identity(d, d)).norm();
            if err > 1e-8 {
                return Err(Error::InvalidGate(format!("matrix is not unitary (err {err:.2e})")));
            }
        }
        Ok(Gate { op, controls, targets })
    }

    fn raw(op: Op, controls: Vec<usize>, targets: Vec<usize>) -> Gate {
        Gate { op, controls, targets }
    }

    pub fn x(q: usize) -> Gate {
        Gate::raw(Op::X, vec![], vec![q])
    }
    pub fn h(q: usize) -> Gate {
        Gate::raw(Op::H, vec![], vec![q])
    }
    pub fn ry(theta: f64, q: usize) -> Gate {
        Gate::raw(Op::Ry(theta), vec![], vec![q])
    }
    pub fn rz(theta: f64, q: usize) -> Gate {
        Gate::raw(Op::Rz(theta), vec![], vec![q])
    }
    pub fn phase(lambda: f64, q: usize) -> Gate {
        Gate::raw(Op::Phase(lambda), vec![], vec![q])
    }
    pub fn u3(theta: f64, phi: f64, lambda: f64, q: usize) -> Gate {
        Gate::raw(Op::U3(theta, phi, lambda), vec![], vec![q])
    }
    pub fn cx(c: usize, t: usize) -> Gate {
        assert_ne!(c, t, "cx control equals target");
        Gate::raw(Op::X, vec![c], vec![t])
    }
    pub fn cry(theta: f64, c: usize, t: usize) -> Gate {
        assert_ne!(c, t, "cry control equals target");
        Gate::raw(Op::Ry(theta), vec![c], vec![t])
    }
    pub fn cphase(lambda: f64, c: usize, t: usize) -> Gate {
        assert_ne!(c, t, "cphase control equals target");
        Gate::raw(Op::Phase(lambda), vec![c], vec![t])
    }
    pub fn swap(a: usize, b: usize) -> Gate {
        assert_ne!(a, b, "swap on one qubit");
        Gate::raw(Op::Swap, vec![], vec![a, b])
    }
    pub fn mcx(controls: &[usize], t: usize) -> Result<Gate> {
        Gate::new(Op::X, controls.to_vec(), vec![t])
    }
    /// Single-qubit operation with an arbitrary control set.
    pub fn controlled_1q(op: Op, controls: &[usize], t: usize) -> Result<Gate> {
        Gate::new(op, controls.to_vec(), vec![t])
    }
    pub fn unitary(u: DMatrix<C64>, targets: Vec<usize>) -> Result<Gate> {
        Gate::new(Op::Unitary(Arc::new(u)), vec![], targets)
    }
    pub fn block(name: &str, body: Circuit, targets: Vec<usize>) -> Result<Gate> {
        Gate::new(Op::Block(Arc::new(Block { name: name.to_string(), body })), vec![], targets)
    }

    pub fn op(&self) -> &Op {
        &self.op
    }
    pub fn controls(&self) -> &[usize] {
        &self.controls
    }
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(self.targets.iter()).copied()
    }

    pub fn kind(&self) -> GateKind {
        let c = self.controls.len();
        match (&self.op, c) {
            (Op::X, 0) => GateKind::X,
            (Op::X, 1) => GateKind::CX,
            (Op::X, _) => GateKind::MCX,
            (Op::Ry(_), 1) => GateKind::CRY,
            (Op::Phase(_), 1) => GateKind::CPHASE,
            (Op::Ry(_), _) => GateKind::RY,
            (Op::Phase(_), _) => GateKind::PHASE,
            (Op::H, _) => GateKind::H,
            (Op::Rz(_), _) => GateKind::RZ,
            (Op::U3(..), _) => GateKind::U3,
            (Op::Swap, _) => GateKind::SWAP,
            (Op::Unitary(_), _) => GateKind::UNITARY,
            (Op::Block(_), _) => GateKind::BLOCK,
        }
    }

    /// Real angle parameters (radians).
    pub fn params(&self) -> Vec<f64> {
        match self.op {
            Op::Ry(t) | Op::Rz(t) | Op::Phase(t) => vec![t],
            Op::U3(t, p, l) => vec![t, p, l],
            _ => vec![],
        }
    }

    /// Lower-case mnemonic, one `c` per control up to two, `mc` beyond.
    pub fn name(&self) -> String {
        let base = self.op.base_name();
        match self.controls.len() {
            0 => base.to_string(),
            1 => format!("c{base}"),
            2 if matches!(self.op, Op::X) => "ccx".to_string(),
            _ => format!("mc{base}"),
        }
    }

    pub fn inverse(&self) -> Gate {
        Gate::raw(self.op.inverse(), self.controls.clone(), self.targets.clone())
    }

    pub fn with_extra_controls(&self, extra: &[usize]) -> Result<Gate> {
        let mut controls = extra.to_vec();
        controls.extend_from_slice(&self.controls);
        Gate::new(self.op.clone(), controls, self.targets.clone())
    }

    pub fn remap(&self, map: impl Fn(usize) -> usize) -> Gate {
        Gate::raw(
            self.op.clone(),
            self.controls.iter().map(|&q| map(q)).collect(),
            self.targets.iter().map(|&q| map(q)).collect(),
        )
    }

    fn max_qubit(&self) -> usize {
        self.qubits().max().unwrap_or(0)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        let p = self.params();
        if !p.is_empty() {
            let s: Vec<String> = p.iter().map(|a| format!("{a:.17e}")).collect();
            write!(f, "({})", s.join(", "))?;
        }
        let qs: Vec<String> = self.qubits().map(|q| format!("q{q}")).collect();
        write!(f, " {}", qs.join(", "))
    }
}

/// Ordered gate list over `num_qubits` qubits with a global phase.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    global_phase: f64,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Circuit {
        Circuit { num_qubits, gates: Vec::new(), global_phase: 0.0 }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }
    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn set_global_phase(&mut self, phi: f64) {
        self.global_phase = wrap_angle(phi);
    }
    pub fn add_global_phase(&mut self, phi: f64) {
        self.global_phase = wrap_angle(self.global_phase + phi);
    }

    /// Appends in place; fails on an out-of-range qubit.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(q) = gate.qubits().find(|&q| q >= self.num_qubits) {
            return Err(Error::QubitOutOfRange { qubit: q, num_qubits: self.num_qubits });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Value-style append.
    pub fn append(mut self, gate: Gate) -> Result<Circuit> {
        self.push(gate)?;
        Ok(self)
    }

    /// Appends every gate of `other` (same qubit labels) and adds its phase.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits > self.num_qubits {
            if let Some(g) = other.gates.iter().find(|g| g.max_qubit() >= self.num_qubits) {
                return Err(Error::QubitOutOfRange { qubit: g.max_qubit(), num_qubits: self.num_qubits });
            }
        }
        self.gates.extend(other.gates.iter().cloned());
        self.add_global_phase(other.global_phase);
        Ok(())
    }

    /// Reversed gate order, inverted operations, negated global phase.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
            global_phase: wrap_angle(-self.global_phase),
        }
    }

    /// Same gates on a wider register.
    pub fn widened(&self, total: usize) -> Result<Circuit> {
        if total < self.num_qubits {
            return Err(Error::InvalidParam(format!("cannot narrow {} qubits to {total}", self.num_qubits)));
        }
        Ok(Circuit { num_qubits: total, ..self.clone() })
    }

    /// ASAP layer count where every gate occupies all of its qubits.
    pub fn depth(&self) -> usize {
        depth_of(self.num_qubits, self.gates.iter().map(|g| g.qubits().collect::<Vec<_>>()))
    }

    /// Neutral pseudo-assembly listing.
    pub fn listing(&self) -> String {
        let mut s = format!("qubits {}\n", self.num_qubits);
        if self.global_phase != 0.0 {
            s.push_str(&format!("global_phase {:.17e}\n", self.global_phase));
        }
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }
}

pub(crate) fn depth_of<I>(n: usize, gates: I) -> usize
where
    I: IntoIterator<Item = Vec<usize>>,
{
    let mut level = vec![0usize; n];
    let mut depth = 0;
    for qs in gates {
        let t = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
        for &q in &qs {
            level[q] = t;
        }
        depth = depth.max(t);
    }
    depth
}

/// Embeds `circuit` (qubits kept) into `total_qubits` and conditions every gate
/// on all of `ctrl_qubits` being |1>. The global phase becomes a phase gate on
/// the control set.
pub fn controlled(circuit: &Circuit, ctrl_qubits: &[usize], total_qubits: usize) -> Result<Circuit> {
    let state = if ctrl_qubits.is_empty() { 0 } else { (1u64 << ctrl_qubits.len()) - 1 };
    controlled_on(circuit, ctrl_qubits, state, total_qubits)
}

/// As [`controlled`], but fires on the basis pattern `state` (bit `b` of
/// `state` is the required value of `ctrl_qubits[b]`); zero bits are
/// sandwiched in X gates.
pub fn controlled_on(circuit: &Circuit, ctrl_qubits: &[usize], state: u64, total_qubits: usize) -> Result<Circuit> {
    let mut seen = BTreeSet::new();
    for &c in ctrl_qubits {
        if c < circuit.num_qubits {
            return Err(Error::RegisterOverlap(format!("control {c} lies inside the controlled register")));
        }
        if c >= total_qubits {
            return Err(Error::QubitOutOfRange { qubit: c, num_qubits: total_qubits });
        }
        if !seen.insert(c) {
            return Err(Error::RegisterOverlap(format!("control {c} listed twice")));
        }
    }
    if circuit.num_qubits > total_qubits {
        return Err(Error::InvalidParam(format!("{} qubits do not fit in {total_qubits}", circuit.num_qubits)));
    }
    let mut out = Circuit::new(total_qubits);
    let flips: Vec<usize> = ctrl_qubits
        .iter()
        .enumerate()
        .filter(|(b, _)| (state >> b) & 1 == 0)
        .map(|(_, &q)| q)
        .collect();
    let body_len = circuit.gates.len() + usize::from(circuit.global_phase != 0.0);
    if body_len == 0 {
        return Ok(out);
    }
    for &q in &flips {
        out.push(Gate::x(q))?;
    }
    if circuit.global_phase != 0.0 {
        let (&last, rest) = ctrl_qubits
            .split_last()
            .ok_or_else(|| Error::InvalidParam("controlled() needs at least one control".into()))?;
        out.push(Gate::controlled_1q(Op::Phase(circuit.global_phase), rest, last)?)?;
    }
    for g in &circuit.gates {
        out.push(g.with_extra_controls(ctrl_qubits)?)?;
    }
    for &q in &flips {
        out.push(Gate::x(q))?;
    }
    Ok(out)
}

/// Places each component at its qubit offset. Gate counts add; since the
/// registers are disjoint, depth is the maximum of the parts.
pub fn tensor_embed(components: &[(&Circuit, usize)], total_qubits: usize) -> Result<Circuit> {
    let mut used = vec![false; total_qubits];
    let mut out = Circuit::new(total_qubits);
    for (c, off) in components {
        for q in *off..off + c.num_qubits {
            if q >= total_qubits {
                return Err(Error::QubitOutOfRange { qubit: q, num_qubits: total_qubits });
            }
            if used[q] {
                return Err(Error::RegisterOverlap(format!("qubit {q} claimed by two components")));
            }
            used[q] = true;
        }
    }
    for (c, off) in components {
        for g in &c.gates {
            out.push(g.remap(|q| q + off))?;
        }
        out.add_global_phase(c.global_phase);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn append_rejects_out_of_range() {
        let c = Circuit::new(2);
        assert!(matches!(c.append(Gate::x(3)), Err(Error::QubitOutOfRange { qubit: 3, .. })));
    }

    #[test]
    fn cx_is_single_control_mcx() {
        assert_eq!(Gate::cx(0, 1), Gate::mcx(&[0], 1).unwrap());
        assert_eq!(Gate::cx(0, 1).kind(), GateKind::CX);
        assert_eq!(Gate::mcx(&[0, 2], 1).unwrap().kind(), GateKind::MCX);
    }

    #[test]
    fn gate_rejects_shared_qubit() {
        assert!(Gate::mcx(&[1, 2], 2).is_err());
        assert!(Gate::new(Op::Swap, vec![], vec![0]).is_err());
    }

    #[test]
    fn inverse_negates_angles_and_keeps_self_inverse() {
        assert_eq!(Gate::ry(0.3, 0).inverse(), Gate::ry(-0.3, 0));
        assert_eq!(Gate::h(1).inverse(), Gate::h(1));
        assert_eq!(Gate::cx(0, 1).inverse(), Gate::cx(0, 1));
        let mut c = Circuit::new(2);
        c.push(Gate::ry(0.3, 0)).unwrap();
        c.push(Gate::cphase(1.1, 0, 1)).unwrap();
        c.set_global_phase(0.4);
        let inv = c.inverse();
        assert_eq!(inv.gates()[0], Gate::cphase(-1.1, 0, 1));
        assert!((inv.global_phase() + 0.4).abs() < 1e-15);
        assert_eq!(inv.inverse(), c);
    }

    #[test]
    fn controlled_empty_circuit() {
        let c = Circuit::new(1);
        assert!(controlled(&c, &[1], 2).unwrap().is_empty());
        let mut p = Circuit::new(1);
        p.set_global_phase(PI / 3.0);
        let cc = controlled(&p, &[1], 2).unwrap();
        assert_eq!(cc.gate_count(), 1);
        assert_eq!(cc.gates()[0], Gate::phase(PI / 3.0, 1));
    }

    #[test]
    fn controlled_pattern_wraps_zero_bits() {
        let mut c = Circuit::new(1);
        c.push(Gate::x(0)).unwrap();
        // pattern |10>: ctrl[0]=q1 must be 0, ctrl[1]=q2 must be 1
        let cc = controlled_on(&c, &[1, 2], 0b10, 3).unwrap();
        let names: Vec<String> = cc.gates().iter().map(|g| g.to_string()).collect();
        assert_eq!(names, vec!["x q1", "ccx q1, q2, q0", "x q1"]);
    }

    #[test]
    fn controlled_rejects_overlap() {
        let mut c = Circuit::new(2);
        c.push(Gate::x(1)).unwrap();
        assert!(matches!(controlled(&c, &[1], 3), Err(Error::RegisterOverlap(_))));
    }

    #[test]
    fn tensor_counts_add_and_depth_is_max() {
        let mut a = Circuit::new(2);
        for _ in 0..5 {
            a.push(Gate::cx(0, 1)).unwrap();
        }
        let mut b = Circuit::new(1);
        for _ in 0..3 {
            b.push(Gate::h(0)).unwrap();
        }
        let t = tensor_embed(&[(&a, 0), (&b, 2)], 3).unwrap();
        assert_eq!(t.gate_count(), 8);
        assert_eq!(t.depth(), 5);
        assert!(tensor_embed(&[(&a, 0), (&b, 1)], 3).is_err());
    }

    #[test]
    fn depth_of_chain_and_parallel() {
        let mut c = Circuit::new(4);
        assert_eq!(c.depth(), 0);
        for q in 0..4 {
            c.push(Gate::h(q)).unwrap();
        }
        assert_eq!(c.depth(), 1);
        let mut chain = Circuit::new(4);
        for t in 1..4 {
            chain.push(Gate::cx(0, t)).unwrap();
        }
        assert_eq!(chain.depth(), 3);
    }
}
