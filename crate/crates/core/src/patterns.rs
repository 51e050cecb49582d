//! Pattern declarations, parameter checks, supports and the analytic vector.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::C64;

/// Imaginary parts at or below this are treated as zero.
pub const COMPLEX_TOL: f64 = 1e-12;

pub(crate) fn is_complex(z: C64) -> bool {
    z.im.abs() > COMPLEX_TOL
}

/// One sinusoidal mode `a * sin(2 pi n i / N + phi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode {
    pub n: usize,
    pub a: f64,
    pub phi: f64,
}

/// A declared amplitude-vector family with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Pattern {
    Sparse { entries: Vec<(usize, C64)> },
    Step { k_e: usize, c: C64 },
    Square { k_s: usize, k_e: usize, c: C64 },
    Walsh { k: usize, c0: C64, c1: C64 },
    Fourier { modes: Vec<Mode> },
    Geometric { r: C64, k_s: usize, c: C64 },
    Hamming { r: C64, c: C64 },
    Staircase { r: C64, c: C64 },
    Dicke { k: usize, c: f64 },
    Polynomial { coeffs: Vec<C64> },
    Sum { terms: Vec<(C64, Pattern)> },
    Partition { parts: Vec<Pattern> },
    Tensor { parts: Vec<(Pattern, usize)> },
}

/// Where a pattern's amplitudes may be nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    /// Half-open `[lo, hi)`.
    Interval(usize, usize),
    /// Sorted index set.
    Set(Vec<usize>),
    Full,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl Pattern {
    pub fn sparse(entries: &[(usize, C64)]) -> Pattern {
        Pattern::Sparse { entries: entries.to_vec() }
    }
    pub fn sparse_real(entries: &[(usize, f64)]) -> Pattern {
        Pattern::Sparse { entries: entries.iter().map(|&(i, a)| (i, re(a))).collect() }
    }
    pub fn step(k_e: usize) -> Pattern {
        Pattern::Step { k_e, c: re(1.0) }
    }
    pub fn square(k_s: usize, k_e: usize) -> Pattern {
        Pattern::Square { k_s, k_e, c: re(1.0) }
    }
    pub fn walsh(k: usize, c0: C64, c1: C64) -> Pattern {
        Pattern::Walsh { k, c0, c1 }
    }
    pub fn fourier(modes: &[(usize, f64, f64)]) -> Pattern {
        Pattern::Fourier { modes: modes.iter().map(|&(n, a, phi)| Mode { n, a, phi }).collect() }
    }
    pub fn geometric(r: C64, k_s: usize) -> Pattern {
        Pattern::Geometric { r, k_s, c: re(1.0) }
    }
    pub fn hamming(r: C64) -> Pattern {
        Pattern::Hamming { r, c: re(1.0) }
    }
    pub fn staircase(r: C64) -> Pattern {
        Pattern::Staircase { r, c: re(1.0) }
    }
    pub fn dicke(k: usize) -> Pattern {
        Pattern::Dicke { k, c: 1.0 }
    }
    pub fn polynomial(coeffs: &[f64]) -> Pattern {
        Pattern::Polynomial { coeffs: coeffs.iter().map(|&c| re(c)).collect() }
    }

    /// Upper-case family name.
    pub fn name(&self) -> &'static str {
        match self {
            Pattern::Sparse { .. } => "SPARSE",
            Pattern::Step { .. } => "STEP",
            Pattern::Square { .. } => "SQUARE",
            Pattern::Walsh { .. } => "WALSH",
            Pattern::Fourier { .. } => "FOURIER",
            Pattern::Geometric { .. } => "GEOMETRIC",
            Pattern::Hamming { .. } => "HAMMING",
            Pattern::Staircase { .. } => "STAIRCASE",
            Pattern::Dicke { .. } => "DICKE",
            Pattern::Polynomial { .. } => "POLYNOMIAL",
            Pattern::Sum { .. } => "SUM",
            Pattern::Partition { .. } => "PARTITION",
            Pattern::Tensor { .. } => "TENSOR",
        }
    }

    pub fn is_composition(&self) -> bool {
        matches!(self, Pattern::Sum { .. } | Pattern::Partition { .. } | Pattern::Tensor { .. })
    }

    /// Supplied parameters as a JSON map; complex numbers with a nonzero
    /// imaginary part are written as `{"re", "im"}`.
    pub fn params(&self) -> Map<String, Value> {
        let v = match self {
            Pattern::Sparse { entries } => {
                json!({ "entries": entries.iter().map(|(i, a)| json!([i, cval(*a)])).collect::<Vec<_>>() })
            }
            Pattern::Step { k_e, c } => json!({ "k_e": k_e, "c": cval(*c) }),
            Pattern::Square { k_s, k_e, c } => json!({ "k_s": k_s, "k_e": k_e, "c": cval(*c) }),
            Pattern::Walsh { k, c0, c1 } => json!({ "k": k, "c0": cval(*c0), "c1": cval(*c1) }),
            Pattern::Fourier { modes } => {
                json!({ "modes": modes.iter().map(|m| json!([m.n, m.a, m.phi])).collect::<Vec<_>>() })
            }
            Pattern::Geometric { r, k_s, c } => json!({ "r": cval(*r), "k_s": k_s, "c": cval(*c) }),
            Pattern::Hamming { r, c } | Pattern::Staircase { r, c } => json!({ "r": cval(*r), "c": cval(*c) }),
            Pattern::Dicke { k, c } => json!({ "k": k, "c": c }),
            Pattern::Polynomial { coeffs } => json!({ "coeffs": coeffs.iter().map(|c| cval(*c)).collect::<Vec<_>>() }),
            Pattern::Sum { terms } => json!({
                "terms": terms.iter().map(|(w, p)| json!({ "weight": cval(*w), "of": p.to_json() })).collect::<Vec<_>>()
            }),
            Pattern::Partition { parts } => json!({ "parts": parts.iter().map(Pattern::to_json).collect::<Vec<_>>() }),
            Pattern::Tensor { parts } => json!({
                "parts": parts.iter().map(|(p, n)| json!({ "of": p.to_json(), "n": n })).collect::<Vec<_>>()
            }),
        };
        match v {
            Value::Object(m) => m,
            _ => unreachable!(),
        }
    }

    /// Full JSON document: `{"pattern": <lower-case name>, ...params}`.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("pattern".into(), Value::String(self.name().to_lowercase()));
        m.extend(self.params());
        Value::Object(m)
    }
}

pub(crate) fn cval(z: C64) -> Value {
    if z.im == 0.0 {
        json!(z.re)
    } else {
        json!({ "re": z.re, "im": z.im })
    }
}

/// `m` for a power-of-two `N >= 2`.
pub fn num_qubits(n: usize) -> Result<usize> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidParam(format!("N = {n} must be a power of two and at least 2")));
    }
    Ok(n.trailing_zeros() as usize)
}

fn finite(z: C64, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("{what} must be finite")))
    }
}

fn nonzero(z: C64, what: &str) -> Result<()> {
    finite(z, what)?;
    if z.norm() == 0.0 {
        return Err(Error::InvalidParam(format!("{what} must be nonzero")));
    }
    Ok(())
}

fn check_ratio(r: C64) -> Result<()> {
    nonzero(r, "r")?;
    if (r - 1.0).norm() <= COMPLEX_TOL {
        return Err(Error::InvalidParam("r must differ from 1".into()));
    }
    Ok(())
}

/// Checks every parameter invariant for a vector of length `n`.
pub fn validate_params(p: &Pattern, n: usize) -> Result<()> {
    validate_inner(p, n, 0)
}

fn validate_inner(p: &Pattern, n: usize, depth: usize) -> Result<()> {
    let m = num_qubits(n)?;
    if p.is_composition() && depth > 0 {
        return Err(Error::InvalidParam(format!("{} cannot be nested inside another composition", p.name())));
    }
    match p {
        Pattern::Sparse { entries } => {
            if entries.is_empty() {
                return Err(Error::InvalidParam("SPARSE needs at least one entry".into()));
            }
            let mut seen = BTreeSet::new();
            for &(i, a) in entries {
                if i >= n {
                    return Err(Error::InvalidParam(format!("SPARSE index {i} outside [0, {n})")));
                }
                if !seen.insert(i) {
                    return Err(Error::InvalidParam(format!("SPARSE index {i} repeated")));
                }
                nonzero(a, &format!("SPARSE amplitude at {i}"))?;
            }
        }
        Pattern::Step { k_e, c } => {
            if *k_e < 1 || *k_e > n {
                return Err(Error::InvalidParam(format!("STEP needs 1 <= k_e <= N, got k_e = {k_e}")));
            }
            nonzero(*c, "c")?;
        }
        Pattern::Square { k_s, k_e, c } => {
            if k_s >= k_e || *k_e > n {
                return Err(Error::InvalidParam(format!("SQUARE needs 0 <= k_s < k_e <= N, got [{k_s}, {k_e})")));
            }
            nonzero(*c, "c")?;
        }
        Pattern::Walsh { k, c0, c1 } => {
            if *k >= m {
                return Err(Error::InvalidParam(format!("WALSH bit k = {k} must be below m = {m}")));
            }
            finite(*c0, "c0")?;
            finite(*c1, "c1")?;
            if c0.norm() == 0.0 && c1.norm() == 0.0 {
                return Err(Error::InvalidParam("WALSH needs c0 or c1 nonzero".into()));
            }
        }
        Pattern::Fourier { modes } => {
            if modes.is_empty() {
                return Err(Error::InvalidParam("FOURIER needs at least one mode".into()));
            }
            for md in modes {
                if md.n < 1 || 2 * md.n >= n {
                    return Err(Error::InvalidParam(format!("FOURIER mode n = {} must satisfy 1 <= n < N/2", md.n)));
                }
                if !md.a.is_finite() || md.a == 0.0 || !md.phi.is_finite() {
                    return Err(Error::InvalidParam("FOURIER amplitudes must be finite and nonzero".into()));
                }
            }
            if fourier_coefficients(modes).iter().all(|(_, z)| z.norm() == 0.0) {
                return Err(Error::ZeroVector("FOURIER modes cancel".into()));
            }
        }
        Pattern::Geometric { r, k_s, c } => {
            check_ratio(*r)?;
            if *k_s >= n {
                return Err(Error::InvalidParam(format!("GEOMETRIC k_s = {k_s} must be below N")));
            }
            nonzero(*c, "c")?;
        }
        Pattern::Hamming { r, c } | Pattern::Staircase { r, c } => {
            check_ratio(*r)?;
            nonzero(*c, "c")?;
        }
        Pattern::Dicke { k, c } => {
            if *k > m {
                return Err(Error::InvalidParam(format!("DICKE weight k = {k} exceeds m = {m}")));
            }
            if !(c.is_finite() && *c > 0.0) {
                return Err(Error::InvalidParam("DICKE amplitude c must be real and positive".into()));
            }
        }
        Pattern::Polynomial { coeffs } => {
            if coeffs.is_empty() {
                return Err(Error::InvalidParam("POLYNOMIAL needs at least one coefficient".into()));
            }
            for (j, c) in coeffs.iter().enumerate() {
                finite(*c, &format!("coefficient {j}"))?;
            }
            // a degree-d polynomial vanishing on more than d points is zero
            let vanishes = if n > coeffs.len() - 1 {
                coeffs.iter().all(|c| c.norm() == 0.0)
            } else {
                polynomial_grid(coeffs, n).iter().all(|z| z.norm() == 0.0)
            };
            if vanishes {
                return Err(Error::ZeroVector("polynomial vanishes on the grid".into()));
            }
        }
        Pattern::Sum { terms } => {
            if terms.is_empty() {
                return Err(Error::InvalidParam("SUM needs at least one term".into()));
            }
            for (w, q) in terms {
                nonzero(*w, "SUM weight")?;
                validate_inner(q, n, depth + 1)?;
            }
        }
        Pattern::Partition { parts } => {
            if parts.is_empty() {
                return Err(Error::InvalidParam("PARTITION needs at least one part".into()));
            }
            for q in parts {
                if !matches!(
                    q,
                    Pattern::Sparse { .. } | Pattern::Step { .. } | Pattern::Square { .. } | Pattern::Geometric { .. }
                ) {
                    return Err(Error::InvalidParam(format!(
                        "PARTITION accepts only SPARSE, STEP, SQUARE or GEOMETRIC parts, got {}",
                        q.name()
                    )));
                }
                validate_inner(q, n, depth + 1)?;
            }
            let sup: Vec<Support> = parts.iter().map(|q| support(q, n)).collect();
            for i in 0..sup.len() {
                for j in i + 1..sup.len() {
                    if !disjoint(&sup[i], &sup[j]) {
                        return Err(Error::PartitionOverlap(format!("parts {i} and {j} share indices")));
                    }
                }
            }
        }
        Pattern::Tensor { parts } => {
            if parts.is_empty() {
                return Err(Error::InvalidParam("TENSOR needs at least one part".into()));
            }
            let mut prod: usize = 1;
            for (q, ni) in parts {
                num_qubits(*ni)?;
                validate_inner(q, *ni, depth + 1)?;
                prod = prod.checked_mul(*ni).ok_or_else(|| Error::InvalidParam("TENSOR widths overflow".into()))?;
            }
            if prod != n {
                return Err(Error::InvalidParam(format!("TENSOR widths multiply to {prod}, not N = {n}")));
            }
        }
    }
    Ok(())
}

/// Support descriptor of a leaf pattern; compositions report the union
/// where it is bounded.
pub fn support(p: &Pattern, n: usize) -> Support {
    match p {
        Pattern::Sparse { entries } => {
            let mut v: Vec<usize> = entries.iter().map(|e| e.0).collect();
            v.sort_unstable();
            Support::Set(v)
        }
        Pattern::Step { k_e, .. } => Support::Interval(0, *k_e),
        Pattern::Square { k_s, k_e, .. } => Support::Interval(*k_s, *k_e),
        Pattern::Geometric { k_s, .. } => Support::Interval(*k_s, n),
        _ => Support::Full,
    }
}

/// True when the two supports share no index.
pub fn disjoint(a: &Support, b: &Support) -> bool {
    match (a, b) {
        (Support::Full, _) | (_, Support::Full) => false,
        (Support::Interval(a0, a1), Support::Interval(b0, b1)) => a1 <= b0 || b1 <= a0,
        (Support::Interval(lo, hi), Support::Set(s)) | (Support::Set(s), Support::Interval(lo, hi)) => {
            !s.iter().any(|i| lo <= i && i < hi)
        }
        (Support::Set(x), Support::Set(y)) => {
            let ys: BTreeSet<_> = y.iter().collect();
            !x.iter().any(|i| ys.contains(i))
        }
    }
}

/// DFT coefficients `F_k` with `f_i = sum_k F_k e^{+2 pi i k i / N}`, as
/// `(k, F_k)` for the positive frequencies only; `F_{N-k} = conj(F_k)`.
pub(crate) fn fourier_coefficients(modes: &[Mode]) -> Vec<(usize, C64)> {
    let mut out: Vec<(usize, C64)> = Vec::new();
    for md in modes {
        // a sin(x + phi) = (a/2i) e^{i phi} e^{ix} - (a/2i) e^{-i phi} e^{-ix}
        let z = C64::from_polar(md.a / 2.0, md.phi) / C64::new(0.0, 1.0);
        match out.iter_mut().find(|(k, _)| *k == md.n) {
            Some((_, acc)) => *acc += z,
            None => out.push((md.n, z)),
        }
    }
    out.sort_by_key(|e| e.0);
    out
}

pub(crate) fn polynomial_grid(coeffs: &[C64], n: usize) -> Vec<C64> {
    let denom = (n - 1) as f64;
    (0..n)
        .map(|i| {
            let x = i as f64 / denom;
            coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c)
        })
        .collect()
}

/// `ln sum_{j<w} q^j` for `q > 0`, stable for large `w`.
pub(crate) fn ln_geom_sum(q: f64, w: usize) -> f64 {
    let wf = w as f64;
    let lq = q.ln();
    if lq.abs() < 1e-15 {
        wf.ln()
    } else if lq < 0.0 {
        // (1 - q^w) / (1 - q)
        (-(wf * lq).exp()).ln_1p() - (-lq.exp_m1()).ln()
    } else {
        // q^{w-1} (1 - q^{-w}) / (1 - q^{-1})
        (wf - 1.0) * lq + (-(-wf * lq).exp()).ln_1p() - (-(-lq).exp_m1()).ln()
    }
}

pub(crate) fn ln_binomial(m: usize, k: usize) -> f64 {
    let k = k.min(m - k);
    (0..k).map(|j| ((m - j) as f64).ln() - ((j + 1) as f64).ln()).sum()
}

/// Natural log of the L2 norm of the declared (unnormalized) leaf vector,
/// in closed form where one exists.
pub fn ln_norm(p: &Pattern, n: usize) -> f64 {
    let m = n.trailing_zeros() as usize;
    match p {
        Pattern::Sparse { entries } => 0.5 * entries.iter().map(|e| e.1.norm_sqr()).sum::<f64>().ln(),
        Pattern::Step { k_e, c } => c.norm().ln() + 0.5 * (*k_e as f64).ln(),
        Pattern::Square { k_s, k_e, c } => c.norm().ln() + 0.5 * ((k_e - k_s) as f64).ln(),
        Pattern::Walsh { c0, c1, .. } => 0.5 * ((c0.norm_sqr() + c1.norm_sqr()) * (n / 2) as f64).ln(),
        Pattern::Fourier { modes } => {
            let s: f64 = fourier_coefficients(modes).iter().map(|(_, z)| z.norm_sqr()).sum();
            0.5 * (2.0 * n as f64 * s).ln()
        }
        Pattern::Geometric { r, k_s, c } => c.norm().ln() + 0.5 * ln_geom_sum(r.norm_sqr(), n - k_s),
        Pattern::Hamming { r, c } => c.norm().ln() + 0.5 * m as f64 * r.norm_sqr().ln_1p(),
        Pattern::Staircase { r, c } => c.norm().ln() + 0.5 * ln_geom_sum(r.norm_sqr(), m + 1),
        Pattern::Dicke { k, c } => c.ln() + 0.5 * ln_binomial(m, *k),
        Pattern::Polynomial { coeffs } => {
            0.5 * polynomial_grid(coeffs, n).iter().map(|z| z.norm_sqr()).sum::<f64>().ln()
        }
        Pattern::Sum { .. } | Pattern::Partition { .. } | Pattern::Tensor { .. } => {
            let (v, ln) = scaled_vector(p, n);
            ln + 0.5 * v.iter().map(|z| z.norm_sqr()).sum::<f64>().ln()
        }
    }
}

/// `c * exp(e * ln r)` split as a bounded vector and a real log scale, so
/// that the true entries are `exp(scale) * v`.
fn log_powers(c: C64, r: C64, exps: &[Option<usize>]) -> (Vec<C64>, f64) {
    let (lr, ar) = (r.norm().ln(), r.arg());
    let top = exps.iter().flatten().map(|&e| e as f64 * lr).fold(f64::NEG_INFINITY, f64::max);
    let v = exps
        .iter()
        .map(|e| match e {
            Some(e) => {
                let e = *e as f64;
                c * C64::from_polar((e * lr - top).exp(), (e * ar).rem_euclid(2.0 * PI))
            }
            None => C64::new(0.0, 0.0),
        })
        .collect();
    (v, top)
}

/// Unnormalized declared vector as `(v, s)` with true entries `e^s v`.
pub(crate) fn scaled_vector(p: &Pattern, n: usize) -> (Vec<C64>, f64) {
    let m = n.trailing_zeros() as usize;
    let zero = C64::new(0.0, 0.0);
    match p {
        Pattern::Sparse { entries } => {
            let mut v = vec![zero; n];
            entries.iter().for_each(|&(i, a)| v[i] = a);
            (v, 0.0)
        }
        Pattern::Step { k_e, c } => ((0..n).map(|i| if i < *k_e { *c } else { zero }).collect(), 0.0),
        Pattern::Square { k_s, k_e, c } => {
            ((0..n).map(|i| if *k_s <= i && i < *k_e { *c } else { zero }).collect(), 0.0)
        }
        Pattern::Walsh { k, c0, c1 } => ((0..n).map(|i| if (i >> k) & 1 == 0 { *c0 } else { *c1 }).collect(), 0.0),
        Pattern::Fourier { modes } => {
            let v = (0..n)
                .map(|i| {
                    re(modes
                        .iter()
                        .map(|md| md.a * (2.0 * PI * ((md.n * i) % n) as f64 / n as f64 + md.phi).sin())
                        .sum())
                })
                .collect();
            (v, 0.0)
        }
        Pattern::Geometric { r, k_s, c } => {
            let e: Vec<Option<usize>> = (0..n).map(|i| (i >= *k_s).then(|| i - k_s)).collect();
            log_powers(*c, *r, &e)
        }
        Pattern::Hamming { r, c } => {
            let e: Vec<Option<usize>> = (0..n).map(|i| Some(i.count_ones() as usize)).collect();
            log_powers(*c, *r, &e)
        }
        Pattern::Staircase { r, c } => {
            let e: Vec<Option<usize>> =
                (0..n).map(|i| ((i + 1).is_power_of_two()).then(|| (i + 1).trailing_zeros() as usize)).collect();
            log_powers(*c, *r, &e)
        }
        Pattern::Dicke { k, c } => {
            ((0..n).map(|i| if i.count_ones() as usize == *k { re(*c) } else { zero }).collect(), 0.0)
        }
        Pattern::Polynomial { coeffs } => (polynomial_grid(coeffs, n), 0.0),
        Pattern::Sum { terms } => {
            let lns: Vec<f64> = terms.iter().map(|(_, q)| ln_norm(q, n)).collect();
            let top = lns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut acc = vec![zero; n];
            for (w, q) in terms {
                let (v, s) = scaled_vector(q, n);
                let f = w * (s - top).exp();
                acc.iter_mut().zip(&v).for_each(|(a, x)| *a += f * x);
            }
            (acc, top)
        }
        Pattern::Partition { parts } => {
            let scaled: Vec<(Vec<C64>, f64)> = parts.iter().map(|q| scaled_vector(q, n)).collect();
            let top = scaled.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
            let mut acc = vec![zero; n];
            for (v, s) in &scaled {
                let f = (s - top).exp();
                acc.iter_mut().zip(v).for_each(|(a, x)| *a += f * x);
            }
            (acc, top)
        }
        Pattern::Tensor { parts } => {
            let mut acc = vec![re(1.0)];
            for (q, ni) in parts {
                let f = normalized(scaled_vector(q, *ni).0);
                acc = acc.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
            }
            debug_assert_eq!(acc.len(), 1 << m);
            (acc, 0.0)
        }
    }
}

fn normalized(mut v: Vec<C64>) -> Vec<C64> {
    let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= s);
    v
}

/// The normalized analytic amplitude vector.
///
/// SUM combines the declared component vectors, so a component's overall
/// scale `c` weighs in together with its weight `w_j`.
pub fn build_vector(p: &Pattern, n: usize) -> Result<Vec<C64>> {
    validate_params(p, n)?;
    let (v, _) = scaled_vector(p, n);
    let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::ZeroVector(format!("{} evaluates to a zero vector", p.name())));
    }
    Ok(normalized(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[C64], b: &[f64]) -> bool {
        let s = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y / s).norm() < 1e-14)
    }

    #[test]
    fn staircase_example() {
        let v = build_vector(&Pattern::staircase(re(0.5)), 16).unwrap();
        let mut want = vec![0.0; 16];
        for (k, i) in [0, 1, 3, 7, 15].iter().enumerate() {
            want[*i] = 0.5f64.powi(k as i32);
        }
        assert!(close(&v, &want));
    }

    #[test]
    fn walsh_example() {
        let v = build_vector(&Pattern::walsh(2, re(1.0), re(4.0)), 8).unwrap();
        assert!(close(&v, &[1.0, 1.0, 1.0, 1.0, 4.0, 4.0, 4.0, 4.0]));
    }

    #[test]
    fn dicke_zero_is_e0() {
        let v = build_vector(&Pattern::dicke(0), 8).unwrap();
        assert!(close(&v, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn hamming_small() {
        let v = build_vector(&Pattern::hamming(re(0.5)), 4).unwrap();
        assert!(close(&v, &[1.0, 0.5, 0.5, 0.25]));
    }

    #[test]
    fn validation_errors() {
        assert!(validate_params(&Pattern::hamming(re(1.0)), 8).is_err());
        let overlap = Pattern::Partition { parts: vec![Pattern::step(4), Pattern::square(2, 6)] };
        let e = validate_params(&overlap, 8).unwrap_err();
        assert!(matches!(e, Error::PartitionOverlap(_)));
        assert!(e.to_string().contains("SUM"));
        assert!(validate_params(&Pattern::square(2, 6), 8).is_ok());
        assert!(validate_params(&Pattern::step(4), 6).is_err());
        assert!(validate_params(&Pattern::fourier(&[(4, 1.0, 0.0)]), 8).is_err());
        let nested = Pattern::Sum { terms: vec![(re(1.0), Pattern::Partition { parts: vec![Pattern::step(2)] })] };
        assert!(validate_params(&nested, 8).is_err());
        let dense = Pattern::Partition { parts: vec![Pattern::hamming(re(0.5))] };
        assert!(validate_params(&dense, 8).is_err());
    }

    #[test]
    fn supports() {
        assert_eq!(support(&Pattern::square(8, 16), 16), Support::Interval(8, 16));
        let sp = Pattern::sparse_real(&[(5, 1.0), (2, 1.0), (7, 1.0)]);
        assert_eq!(support(&sp, 8), Support::Set(vec![2, 5, 7]));
        assert_eq!(support(&Pattern::fourier(&[(1, 1.0, 0.0)]), 8), Support::Full);
    }

    #[test]
    fn closed_form_norms_match_vectors() {
        let n = 64;
        let cases = vec![
            Pattern::Geometric { r: C64::new(0.3, 0.8), k_s: 5, c: C64::new(2.0, -1.0) },
            Pattern::Geometric { r: re(1.7), k_s: 0, c: re(0.5) },
            Pattern::Hamming { r: re(-2.5), c: re(3.0) },
            Pattern::Staircase { r: C64::new(1.2, 0.4), c: re(1.0) },
            Pattern::Dicke { k: 3, c: 2.0 },
            Pattern::fourier(&[(3, 1.0, 0.2), (3, 0.5, 1.0), (7, -2.0, 0.0)]),
            Pattern::walsh(3, re(1.0), C64::new(0.0, 2.0)),
            Pattern::Square { k_s: 3, k_e: 40, c: C64::new(0.0, 3.0) },
        ];
        for p in cases {
            let (v, s) = scaled_vector(&p, n);
            let direct = s + 0.5 * v.iter().map(|z| z.norm_sqr()).sum::<f64>().ln();
            assert!((direct - ln_norm(&p, n)).abs() < 1e-12, "{p:?}");
        }
    }

    #[test]
    fn geometric_growth_does_not_overflow() {
        let v = build_vector(&Pattern::geometric(re(3.0), 0), 1 << 12).unwrap();
        assert!(v.iter().all(|z| z.re.is_finite()));
        assert!((v[4095].re / v[4094].re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_shape() {
        let p = Pattern::Sum {
            terms: vec![(C64::new(1.0, 1.0), Pattern::square(0, 4)), (re(2.0), Pattern::dicke(1))],
        };
        let j = p.to_json();
        assert_eq!(j["pattern"], "sum");
        assert_eq!(j["terms"][0]["weight"]["im"], 1.0);
        assert_eq!(j["terms"][1]["of"]["pattern"], "dicke");
    }
}
