//! Approximate loading of arbitrary vectors through a truncated matrix
//! product state and a sequential cascade of site unitaries.
//!
//! `sites[0]` carries the most significant index bit, so site `j` acts on
//! physical qubit `m - 1 - j`. The bond register occupies qubits `m..`.

use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Map};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::synth::{validation_distance, EncodeOptions, EncodingInfo};
use crate::transpile::transpiled_counts;
use crate::C64;

/// Singular values below this fraction of the largest are treated as zero.
const RANK_TOL: f64 = 1e-15;
/// Canonicality tolerance for externally supplied tensors.
const CANONICAL_TOL: f64 = 1e-8;
/// Completion candidates whose residual norm falls below this are skipped.
const DEPENDENT_TOL: f64 = 1e-8;

/// One site tensor of shape `(chi_l, 2, chi_r)`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteTensor {
    pub chi_l: usize,
    pub chi_r: usize,
    pub data: Vec<C64>,
}

impl SiteTensor {
    pub fn new(chi_l: usize, chi_r: usize, data: Vec<C64>) -> Result<SiteTensor> {
        if chi_l == 0 || chi_r == 0 || data.len() != chi_l * 2 * chi_r {
            return Err(Error::Mps(format!(
                "site data has {} entries, shape ({chi_l}, 2, {chi_r}) needs {}",
                data.len(),
                chi_l * 2 * chi_r
            )));
        }
        Ok(SiteTensor { chi_l, chi_r, data })
    }

    pub fn get(&self, a: usize, s: usize, b: usize) -> C64 {
        self.data[(a * 2 + s) * self.chi_r + b]
    }

    /// Largest deviation of `sum_{s,b} A[a,s,b] conj(A[a',s,b])` from the identity.
    pub fn canonical_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.chi_l {
            for a2 in 0..self.chi_l {
                let mut acc = C64::new(0.0, 0.0);
                for s in 0..2 {
                    for b in 0..self.chi_r {
                        acc += self.get(a, s, b) * self.get(a2, s, b).conj();
                    }
                }
                let want = if a == a2 { 1.0 } else { 0.0 };
                worst = worst.max((acc - want).norm());
            }
        }
        worst
    }
}

/// Right-canonical MPS, first site most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct MpsTensors {
    pub sites: Vec<SiteTensor>,
}

impl MpsTensors {
    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    /// Largest bond dimension.
    pub fn bond_dim(&self) -> usize {
        self.sites.iter().map(|s| s.chi_r.max(s.chi_l)).max().unwrap_or(1)
    }

    /// Checks boundary bonds, bond consistency and right-canonicality.
    pub fn check(&self, tol: f64) -> Result<()> {
        let m = self.sites.len();
        if m == 0 {
            return Err(Error::Mps("no sites".into()));
        }
        if self.sites[0].chi_l != 1 || self.sites[m - 1].chi_r != 1 {
            return Err(Error::Mps("boundary bonds must have dimension 1".into()));
        }
        for j in 1..m {
            if self.sites[j - 1].chi_r != self.sites[j].chi_l {
                return Err(Error::Mps(format!(
                    "bond {j}: left site has chi_r = {}, right site has chi_l = {}",
                    self.sites[j - 1].chi_r,
                    self.sites[j].chi_l
                )));
            }
        }
        for (j, s) in self.sites.iter().enumerate() {
            let e = s.canonical_error();
            if !(e <= tol) {
                return Err(Error::Mps(format!("site {j} is not right-canonical (deviation {e:.3e})")));
            }
        }
        Ok(())
    }

    /// Contracts the chain into the full vector (LSB index convention).
    pub fn to_vector(&self) -> Vec<C64> {
        let mut acc: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0)]];
        for site in &self.sites {
            let mut next = Vec::with_capacity(acc.len() * 2);
            for row in &acc {
                for s in 0..2 {
                    let v: Vec<C64> =
                        (0..site.chi_r).map(|b| (0..site.chi_l).map(|a| row[a] * site.get(a, s, b)).sum()).collect();
                    next.push(v);
                }
            }
            acc = next;
        }
        acc.into_iter().map(|r| r[0]).collect()
    }
}

/// Diagnostics reported in `EncodingInfo.params`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MpsDiagnostics {
    pub bond_dim: usize,
    pub n_bond: usize,
    pub truncation_error_sq: f64,
    pub n_padded: usize,
}

fn ceil_log2(x: usize) -> usize {
    x.next_power_of_two().trailing_zeros() as usize
}

/// Right-to-left SVD sweep of `v` (length `2^m`), keeping at most `chi`
/// singular values per bond. The first site is rescaled to unit norm.
/// Returns the tensors and the cumulative discarded weight of `v / ||v||`.
pub fn mps_decompose(v: &[C64], chi: usize) -> Result<(MpsTensors, f64)> {
    let n = v.len();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Mps(format!("length {n} must be a power of two and at least 2")));
    }
    if chi == 0 {
        return Err(Error::Mps("bond dimension must be positive".into()));
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroVector("MPS input is a zero vector".into()));
    }
    let m = n.trailing_zeros() as usize;
    let mut discarded = 0.0;
    // rem[row][col]: row = index prefix, col = (bit, right bond)
    let mut rem: Vec<C64> = v.iter().map(|z| z / norm).collect();
    let mut chi_r = 1usize;
    let mut sites = Vec::with_capacity(m);
    for j in (1..m).rev() {
        let rows = 1usize << j;
        let cols = 2 * chi_r;
        let mat = DMatrix::from_fn(rows, cols, |r, c| rem[r * cols + c]);
        let svd = mat.svd(true, true);
        let (u, vt) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
        let sig = svd.singular_values;
        let mut order: Vec<usize> = (0..sig.len()).collect();
        order.sort_by(|&a, &b| sig[b].total_cmp(&sig[a]));
        let top = sig[order[0]];
        let keep: Vec<usize> =
            order.iter().copied().take(chi).filter(|&i| i == order[0] || sig[i] > RANK_TOL * top).collect();
        discarded += order.iter().filter(|i| !keep.contains(i)).map(|&i| sig[i] * sig[i]).sum::<f64>();
        let k = keep.len();
        let mut data = Vec::with_capacity(k * cols);
        for &i in &keep {
            for c in 0..cols {
                data.push(vt[(i, c)]);
            }
        }
        sites.push(SiteTensor::new(k, chi_r, data)?);
        let mut next = vec![C64::new(0.0, 0.0); rows * k];
        for r in 0..rows {
            for (a, &i) in keep.iter().enumerate() {
                next[r * k + a] = u[(r, i)] * sig[i];
            }
        }
        rem = next;
        chi_r = k;
    }
    let s = rem.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    sites.push(SiteTensor::new(1, chi_r, rem.iter().map(|z| z / s).collect())?);
    sites.reverse();
    Ok((MpsTensors { sites }, discarded))
}

/// Extends orthonormal columns to a unitary by modified Gram-Schmidt over
/// the canonical basis in index order.
pub fn complete_to_unitary(cols: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let (d, k) = cols.shape();
    if k > d {
        return Err(Error::Mps(format!("{k} columns cannot be orthonormal in dimension {d}")));
    }
    let gram = cols.adjoint() * cols;
    let dev = (gram - DMatrix::<C64>::identity(k, k)).norm();
    if !(dev <= 1e-10) {
        return Err(Error::Mps(format!("columns are not orthonormal (deviation {dev:.3e})")));
    }
    let mut basis: Vec<nalgebra::DVector<C64>> = (0..k).map(|j| cols.column(j).into_owned()).collect();
    for e in 0..d {
        if basis.len() == d {
            break;
        }
        let mut v = nalgebra::DVector::<C64>::zeros(d);
        v[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let nv = v.norm();
        if nv > DEPENDENT_TOL {
            basis.push(v / C64::new(nv, 0.0));
        }
    }
    Ok(DMatrix::from_columns(&basis))
}

/// Sequential cascade preparing the MPS on `m` physical plus
/// `ceil(log2 chi)` bond qubits; the bond register returns to |0>.
pub fn mps_to_circuit(t: &MpsTensors) -> Result<Circuit> {
    t.check(CANONICAL_TOL)?;
    let m = t.num_sites();
    let nb = ceil_log2(t.bond_dim());
    let d = 1usize << nb;
    let mut c = Circuit::new(m + nb);
    for (j, site) in t.sites.iter().enumerate() {
        let q = m - 1 - j;
        // local index = phys + 2 * bond
        let iso = DMatrix::from_fn(2 * d, site.chi_l, |row, a| {
            let (s, b) = (row % 2, row / 2);
            if b < site.chi_r {
                site.get(a, s, b)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let full = complete_to_unitary(&iso)?;
        // input |a>|0> is local column 2a; remaining columns fill the rest
        let mut u = DMatrix::<C64>::zeros(2 * d, 2 * d);
        let mut spare = site.chi_l..2 * d;
        for col in 0..2 * d {
            let src = if col % 2 == 0 && col / 2 < site.chi_l { col / 2 } else { spare.next().expect("square") };
            u.set_column(col, &full.column(src));
        }
        let targets: Vec<usize> = std::iter::once(q).chain(m..m + nb).collect();
        c.push(Gate::unitary(u, targets)?)?;
    }
    Ok(c)
}

fn complexity(chi: usize) -> String {
    format!("O(m*chi^2) with chi={chi}")
}

fn build_info(
    circuit: &Circuit,
    m: usize,
    diag: MpsDiagnostics,
    want: &[C64],
    opts: &EncodeOptions,
) -> Result<EncodingInfo> {
    let counts = transpiled_counts(circuit);
    let mut params = Map::new();
    params.insert("bond_dim".into(), json!(diag.bond_dim));
    params.insert("n_bond".into(), json!(diag.n_bond));
    params.insert("truncation_error_sq".into(), json!(diag.truncation_error_sq));
    params.insert("n_padded".into(), json!(diag.n_padded));
    let mut info = EncodingInfo {
        pattern_name: "MPS".into(),
        n: 1 << m,
        m,
        params,
        gate_count: circuit.gate_count(),
        gate_count_1q: counts.gate_count_1q,
        gate_count_2q: counts.gate_count_2q,
        circuit_depth: counts.circuit_depth,
        complexity: complexity(diag.bond_dim),
        success_probability: 1.0,
        circuit_code: circuit.listing(),
        validated: false,
        vector: None,
        warnings: vec![],
    };
    if opts.validate {
        let distance = validation_distance(circuit, m, want, opts.validation_cap)?;
        if !(distance < opts.tol) {
            return Err(Error::ValidationFailed { distance, tol: opts.tol });
        }
        info.validated = true;
        info.vector = Some(want.to_vec());
    }
    Ok(info)
}

/// Zero-pads `v` to a power of two (at least 2) and normalizes it.
pub fn pad_and_normalize(v: &[C64]) -> Result<(Vec<C64>, usize)> {
    let n = v.len().next_power_of_two().max(2);
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if v.is_empty() || !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroVector("MPS input is empty or zero".into()));
    }
    let mut out: Vec<C64> = v.iter().map(|z| z / norm).collect();
    out.resize(n, C64::new(0.0, 0.0));
    Ok((out, n - v.len()))
}

/// Loads `v` through an MPS truncated at `bond_dim`.
pub fn encode_mps(v: &[C64], bond_dim: usize, opts: &EncodeOptions) -> Result<(Circuit, EncodingInfo)> {
    let (vhat, n_padded) = pad_and_normalize(v)?;
    let m = vhat.len().trailing_zeros() as usize;
    let (tensors, err) = mps_decompose(&vhat, bond_dim)?;
    let circuit = mps_to_circuit_with_bond(&tensors, bond_dim)?;
    let diag = MpsDiagnostics { bond_dim, n_bond: ceil_log2(bond_dim), truncation_error_sq: err, n_padded };
    let info = build_info(&circuit, m, diag, &vhat, opts)?;
    Ok((circuit, info))
}

/// Loads pre-built right-canonical tensors, skipping the SVD sweep.
pub fn encode_mps_from_tensors(t: &MpsTensors, opts: &EncodeOptions) -> Result<(Circuit, EncodingInfo)> {
    let circuit = mps_to_circuit(t)?;
    let m = t.num_sites();
    let chi = t.bond_dim();
    let diag = MpsDiagnostics { bond_dim: chi, n_bond: ceil_log2(chi), truncation_error_sq: 0.0, n_padded: 0 };
    let want = if opts.validate { t.to_vector() } else { vec![] };
    let info = build_info(&circuit, m, diag, &want, opts)?;
    Ok((circuit, info))
}

/// As [`mps_to_circuit`] but with the bond register sized for `chi` even
/// when the kept bonds are smaller.
fn mps_to_circuit_with_bond(t: &MpsTensors, chi: usize) -> Result<Circuit> {
    let c = mps_to_circuit(t)?;
    let m = t.num_sites();
    let nb = ceil_log2(chi.max(t.bond_dim()));
    if m + nb == c.num_qubits() {
        return Ok(c);
    }
    c.widened(m + nb)
}
