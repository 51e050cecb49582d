//! Test oracles that share no code with the library: a minimal OpenQASM 2.0
//! interpreter for the `u3`/`cx` subset and closed-form target vectors.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use qencode::Pattern;
use std::f64::consts::PI;

/// Parses and runs `u3`/`cx` QASM from `|0...0>`.
pub fn run_qasm(text: &str) -> Vec<C> {
    let mut state: Option<Vec<C>> = None;
    let mut header = false;
    for raw in text.lines() {
        let line = raw.split("//").next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let stmt = line.strip_suffix(';').unwrap_or_else(|| panic!("missing `;`: {line}"));
        if stmt == "OPENQASM 2.0" {
            header = true;
        } else if stmt.starts_with("include") {
        } else if let Some(rest) = stmt.strip_prefix("qreg q[") {
            assert!(state.is_none(), "single register expected");
            let n: u32 = rest.strip_suffix(']').unwrap().parse().unwrap();
            let mut s = vec![C::new(0.0, 0.0); 1 << n];
            s[0] = C::new(1.0, 0.0);
            state = Some(s);
        } else if let Some(rest) = stmt.strip_prefix("u3(") {
            let (args, q) = rest.split_once(')').unwrap();
            let a: Vec<f64> = args.split(',').map(|x| x.trim().parse().unwrap()).collect();
            assert_eq!(a.len(), 3);
            apply_u3(state.as_mut().unwrap(), qubit(q), a[0], a[1], a[2]);
        } else if let Some(rest) = stmt.strip_prefix("cx ") {
            let (c, t) = rest.split_once(',').unwrap();
            apply_cx(state.as_mut().unwrap(), qubit(c), qubit(t));
        } else {
            panic!("unsupported statement: {line}");
        }
    }
    assert!(header, "missing OPENQASM 2.0 header");
    state.expect("missing qreg")
}

fn qubit(s: &str) -> usize {
    s.trim().strip_prefix("q[").and_then(|x| x.strip_suffix(']')).unwrap().parse().unwrap()
}

fn apply_u3(s: &mut [C], q: usize, th: f64, ph: f64, la: f64) {
    let (c, sn) = ((th / 2.0).cos(), (th / 2.0).sin());
    let m = [
        [C::new(c, 0.0), -C::from_polar(sn, la)],
        [C::from_polar(sn, ph), C::from_polar(c, ph + la)],
    ];
    let bit = 1 << q;
    for i in 0..s.len() {
        if i & bit == 0 {
            let (a, b) = (s[i], s[i | bit]);
            s[i] = m[0][0] * a + m[0][1] * b;
            s[i | bit] = m[1][0] * a + m[1][1] * b;
        }
    }
}

fn apply_cx(s: &mut [C], c: usize, t: usize) {
    for i in 0..s.len() {
        if (i >> c) & 1 == 1 && (i >> t) & 1 == 0 {
            s.swap(i, i | (1 << t));
        }
    }
}

pub fn normalized(v: &[C]) -> Vec<C> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / n).collect()
}

/// `min_phi || a/|a| - e^{i phi} b/|b| ||`, summed entrywise to keep
/// precision near zero.
pub fn distance(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (a, b) = (normalized(a), normalized(b));
    let ov: C = b.iter().zip(&a).map(|(x, y)| x.conj() * y).sum();
    let rot = if ov.norm() > 0.0 { ov / ov.norm() } else { C::new(1.0, 0.0) };
    a.iter().zip(&b).map(|(x, y)| (x - rot * y).norm_sqr()).sum::<f64>().sqrt()
}

fn re(x: f64) -> C {
    C::new(x, 0.0)
}

/// Unnormalized target amplitudes from the defining formulas.
pub fn target(p: &Pattern, n: usize) -> Vec<C> {
    let m = n.trailing_zeros() as usize;
    let zero = re(0.0);
    match p {
        Pattern::Sparse { entries } => {
            let mut v = vec![zero; n];
            for &(i, a) in entries {
                v[i] = a;
            }
            v
        }
        Pattern::Step { k_e, c } => (0..n).map(|i| if i < *k_e { *c } else { zero }).collect(),
        Pattern::Square { k_s, k_e, c } => (0..n).map(|i| if i >= *k_s && i < *k_e { *c } else { zero }).collect(),
        Pattern::Walsh { k, c0, c1 } => (0..n).map(|i| if (i >> k) & 1 == 0 { *c0 } else { *c1 }).collect(),
        Pattern::Fourier { modes } => (0..n)
            .map(|i| re(modes.iter().map(|md| md.a * (2.0 * PI * (md.n * i) as f64 / n as f64 + md.phi).sin()).sum()))
            .collect(),
        Pattern::Geometric { r, k_s, c } => (0..n).map(|i| if i >= *k_s { c * r.powu((i - k_s) as u32) } else { zero }).collect(),
        Pattern::Hamming { r, c } => (0..n).map(|i| c * r.powu(i.count_ones())).collect(),
        Pattern::Staircase { r, c } => {
            let mut v = vec![zero; n];
            for k in 0..=m {
                v[(1 << k) - 1] = c * r.powu(k as u32);
            }
            v
        }
        Pattern::Dicke { k, c } => (0..n).map(|i| if i.count_ones() as usize == *k { re(*c) } else { zero }).collect(),
        Pattern::Polynomial { coeffs } => (0..n)
            .map(|i| {
                let x = i as f64 / (n - 1) as f64;
                coeffs.iter().enumerate().map(|(j, c)| c * x.powi(j as i32)).sum()
            })
            .collect(),
        Pattern::Sum { terms } => {
            let mut v = vec![zero; n];
            for (w, q) in terms {
                for (a, b) in v.iter_mut().zip(target(q, n)) {
                    *a += w * b;
                }
            }
            v
        }
        Pattern::Partition { parts } => {
            let mut v = vec![zero; n];
            for q in parts {
                for (a, b) in v.iter_mut().zip(target(q, n)) {
                    *a += b;
                }
            }
            v
        }
        Pattern::Tensor { parts } => {
            // first part on the most significant qubits
            let mut v = vec![re(1.0)];
            for (q, nq) in parts {
                let f = normalized(&target(q, *nq));
                v = v.iter().flat_map(|a| f.iter().map(move |b| a * b)).collect();
            }
            assert_eq!(v.len(), n);
            v
        }
    }
}

/// QASM text of `encode(p, n)` lowered to `{CX, U3}`.
pub fn qasm_of(p: &Pattern, n: usize) -> String {
    let (c, _) = qencode::encode(p, n).unwrap();
    qencode::cli::to_qasm(&qencode::transpile::transpile(&c))
}

/// Runs the QASM of `encode(p, n)` and keeps the first `n` amplitudes
/// (ancillas sit above the data register). Returns the kept state and its
/// probability.
pub fn prepared(p: &Pattern, n: usize) -> (Vec<C>, f64) {
    let s = run_qasm(&qasm_of(p, n));
    let low = s[..n].to_vec();
    let prob = low.iter().map(|z| z.norm_sqr()).sum();
    (low, prob)
}

/// In-place orthonormal Walsh-Hadamard transform.
pub fn wht(v: &mut [C]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
    let s = (n as f64).sqrt();
    v.iter_mut().for_each(|z| *z /= s);
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
