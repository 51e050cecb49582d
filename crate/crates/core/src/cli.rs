//! Command-line front end: JSON pattern documents, vector files, OpenQASM
//! output.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use base64::Engine;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::circuit::{Circuit, Op};
use crate::mps::{encode_mps, encode_mps_from_tensors, MpsTensors, SiteTensor};
use crate::patterns::{Mode, Pattern};
use crate::synth::{encode_with, EncodeOptions, EncodingInfo};
use crate::transpile::transpile;
use crate::{predict_gates, Error, C64};

/// Failures surfaced by the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("JSON syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },

    #[error("at `{path}`: {msg}")]
    Field { path: String, msg: String },

    #[error("{path}: {msg}")]
    Input { path: String, msg: String },

    #[error(transparent)]
    Lib(#[from] Error),
}

impl CliError {
    /// 1 for a failed validation, 2 for every usage, parse or input error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(Error::ValidationFailed { .. }) => 1,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn field_err<T>(path: &str, msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Field { path: path.to_string(), msg: msg.into() })
}

fn syntax(e: serde_json::Error) -> CliError {
    CliError::Syntax { line: e.line(), column: e.column(), msg: e.to_string() }
}

/// Parses a pattern document from JSON text.
pub fn parse_pattern_str(text: &str) -> CliResult<Pattern> {
    let v: Value = serde_json::from_str(text).map_err(syntax)?;
    parse_pattern(&v)
}

/// Parses a pattern document. Unknown fields are rejected.
pub fn parse_pattern(v: &Value) -> CliResult<Pattern> {
    pattern_at(v, "$")
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> CliResult<&'a Map<String, Value>> {
    let Some(map) = v.as_object() else {
        return field_err(path, "expected an object");
    };
    for k in map.keys() {
        if !allowed.contains(&k.as_str()) {
            return field_err(&format!("{path}.{k}"), format!("unknown field (expected one of: {})", allowed.join(", ")));
        }
    }
    Ok(map)
}

fn required<'a>(map: &'a Map<String, Value>, key: &str, path: &str) -> CliResult<&'a Value> {
    match map.get(key) {
        Some(v) => Ok(v),
        None => field_err(path, format!("missing field `{key}`")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> CliResult<&'a Vec<Value>> {
    match v.as_array() {
        Some(a) => Ok(a),
        None => field_err(path, "expected an array"),
    }
}

fn index(v: &Value, path: &str) -> CliResult<usize> {
    match v.as_u64() {
        Some(x) => usize::try_from(x).or_else(|_| field_err(path, "integer too large")),
        None => field_err(path, "expected a non-negative integer"),
    }
}

fn real(v: &Value, path: &str) -> CliResult<f64> {
    match v.as_f64() {
        Some(x) => Ok(x),
        None => field_err(path, "expected a number"),
    }
}

/// A bare number or `{"re": .., "im": ..}`.
fn complex(v: &Value, path: &str) -> CliResult<C64> {
    if v.is_number() {
        return Ok(C64::new(real(v, path)?, 0.0));
    }
    let map = object(v, path, &["re", "im"])?;
    let re = map.get("re").map(|x| real(x, &format!("{path}.re"))).transpose()?.unwrap_or(0.0);
    let im = map.get("im").map(|x| real(x, &format!("{path}.im"))).transpose()?.unwrap_or(0.0);
    if map.is_empty() {
        return field_err(path, "complex value needs `re` or `im`");
    }
    Ok(C64::new(re, im))
}

fn complex_or(map: &Map<String, Value>, key: &str, path: &str, default: C64) -> CliResult<C64> {
    map.get(key).map(|v| complex(v, &format!("{path}.{key}"))).transpose().map(|c| c.unwrap_or(default))
}

fn index_field(map: &Map<String, Value>, key: &str, path: &str) -> CliResult<usize> {
    index(required(map, key, path)?, &format!("{path}.{key}"))
}

fn pattern_at(v: &Value, path: &str) -> CliResult<Pattern> {
    let Some(map) = v.as_object() else {
        return field_err(path, "expected a pattern object");
    };
    let name = match required(map, "pattern", path)?.as_str() {
        Some(s) => s.to_lowercase(),
        None => return field_err(&format!("{path}.pattern"), "expected a string"),
    };
    let one = C64::new(1.0, 0.0);
    let p = match name.as_str() {
        "sparse" => {
            let map = object(v, path, &["pattern", "entries"])?;
            let ep = format!("{path}.entries");
            let mut entries = Vec::new();
            for (i, e) in array(required(map, "entries", path)?, &ep)?.iter().enumerate() {
                let at = format!("{ep}[{i}]");
                let pair = array(e, &at)?;
                if pair.len() != 2 {
                    return field_err(&at, "expected [index, amplitude]");
                }
                entries.push((index(&pair[0], &format!("{at}[0]"))?, complex(&pair[1], &format!("{at}[1]"))?));
            }
            Pattern::Sparse { entries }
        }
        "step" => {
            let map = object(v, path, &["pattern", "k_e", "c"])?;
            Pattern::Step { k_e: index_field(map, "k_e", path)?, c: complex_or(map, "c", path, one)? }
        }
        "square" => {
            let map = object(v, path, &["pattern", "k_s", "k_e", "c"])?;
            Pattern::Square {
                k_s: index_field(map, "k_s", path)?,
                k_e: index_field(map, "k_e", path)?,
                c: complex_or(map, "c", path, one)?,
            }
        }
        "walsh" => {
            let map = object(v, path, &["pattern", "k", "c0", "c1"])?;
            let c0 = complex_or(map, "c0", path, one)?;
            Pattern::Walsh { k: index_field(map, "k", path)?, c0, c1: complex_or(map, "c1", path, -c0)? }
        }
        "fourier" => {
            let map = object(v, path, &["pattern", "modes"])?;
            let mp = format!("{path}.modes");
            let mut modes = Vec::new();
            for (i, e) in array(required(map, "modes", path)?, &mp)?.iter().enumerate() {
                modes.push(mode(e, &format!("{mp}[{i}]"))?);
            }
            Pattern::Fourier { modes }
        }
        "geometric" => {
            let map = object(v, path, &["pattern", "r", "k_s", "c"])?;
            let k_s = map.get("k_s").map(|x| index(x, &format!("{path}.k_s"))).transpose()?.unwrap_or(0);
            Pattern::Geometric {
                r: complex(required(map, "r", path)?, &format!("{path}.r"))?,
                k_s,
                c: complex_or(map, "c", path, one)?,
            }
        }
        "hamming" | "staircase" => {
            let map = object(v, path, &["pattern", "r", "c"])?;
            let r = complex(required(map, "r", path)?, &format!("{path}.r"))?;
            let c = complex_or(map, "c", path, one)?;
            if name == "hamming" {
                Pattern::Hamming { r, c }
            } else {
                Pattern::Staircase { r, c }
            }
        }
        "dicke" => {
            let map = object(v, path, &["pattern", "k", "c"])?;
            let c = map.get("c").map(|x| real(x, &format!("{path}.c"))).transpose()?.unwrap_or(1.0);
            Pattern::Dicke { k: index_field(map, "k", path)?, c }
        }
        "polynomial" => {
            let map = object(v, path, &["pattern", "coeffs"])?;
            let cp = format!("{path}.coeffs");
            let coeffs = array(required(map, "coeffs", path)?, &cp)?
                .iter()
                .enumerate()
                .map(|(i, c)| complex(c, &format!("{cp}[{i}]")))
                .collect::<CliResult<Vec<_>>>()?;
            Pattern::Polynomial { coeffs }
        }
        "sum" => {
            let map = object(v, path, &["pattern", "terms"])?;
            let tp = format!("{path}.terms");
            let mut terms = Vec::new();
            for (i, t) in array(required(map, "terms", path)?, &tp)?.iter().enumerate() {
                let at = format!("{tp}[{i}]");
                let tm = object(t, &at, &["weight", "of"])?;
                let w = complex_or(tm, "weight", &at, one)?;
                terms.push((w, pattern_at(required(tm, "of", &at)?, &format!("{at}.of"))?));
            }
            Pattern::Sum { terms }
        }
        "partition" => {
            let map = object(v, path, &["pattern", "parts"])?;
            let pp = format!("{path}.parts");
            let parts = array(required(map, "parts", path)?, &pp)?
                .iter()
                .enumerate()
                .map(|(i, q)| pattern_at(q, &format!("{pp}[{i}]")))
                .collect::<CliResult<Vec<_>>>()?;
            Pattern::Partition { parts }
        }
        "tensor" => {
            let map = object(v, path, &["pattern", "parts"])?;
            let pp = format!("{path}.parts");
            let mut parts = Vec::new();
            for (i, t) in array(required(map, "parts", path)?, &pp)?.iter().enumerate() {
                let at = format!("{pp}[{i}]");
                let tm = object(t, &at, &["of", "n"])?;
                parts.push((pattern_at(required(tm, "of", &at)?, &format!("{at}.of"))?, index_field(tm, "n", &at)?));
            }
            Pattern::Tensor { parts }
        }
        other => return field_err(&format!("{path}.pattern"), format!("unknown pattern `{other}`")),
    };
    Ok(p)
}

/// `[n, a]`, `[n, a, phi]` or `{"n", "a", "phi"}`.
fn mode(v: &Value, path: &str) -> CliResult<Mode> {
    if let Some(a) = v.as_array() {
        if a.len() != 2 && a.len() != 3 {
            return field_err(path, "expected [n, a] or [n, a, phi]");
        }
        let phi = a.get(2).map(|x| real(x, &format!("{path}[2]"))).transpose()?.unwrap_or(0.0);
        return Ok(Mode { n: index(&a[0], &format!("{path}[0]"))?, a: real(&a[1], &format!("{path}[1]"))?, phi });
    }
    let map = object(v, path, &["n", "a", "phi"])?;
    let phi = map.get("phi").map(|x| real(x, &format!("{path}.phi"))).transpose()?.unwrap_or(0.0);
    Ok(Mode { n: index_field(map, "n", path)?, a: real(required(map, "a", path)?, &format!("{path}.a"))?, phi })
}

/// OpenQASM 2.0 text of a circuit already lowered to `U3` and `CX`.
pub fn to_qasm(lowered: &Circuit) -> String {
    let mut s = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if lowered.global_phase() != 0.0 {
        let _ = writeln!(s, "// global phase {:.16e}", lowered.global_phase());
    }
    let _ = writeln!(s, "qreg q[{}];", lowered.num_qubits());
    for g in lowered.gates() {
        match (g.op(), g.controls()) {
            (Op::U3(th, ph, la), []) => {
                let _ = writeln!(s, "u3({th:.16e},{ph:.16e},{la:.16e}) q[{}];", g.targets()[0]);
            }
            (Op::X, [c]) => {
                let _ = writeln!(s, "cx q[{c}],q[{}];", g.targets()[0]);
            }
            _ => panic!("to_qasm expects a lowered circuit, found {g}"),
        }
    }
    s
}

/// Vector file encodings accepted by `mps`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VectorFormat {
    Json,
    Csv,
    /// Little-endian `f64`, real entries.
    Bin,
}

impl VectorFormat {
    fn from_path(p: &Path) -> VectorFormat {
        match p.extension().and_then(|e| e.to_str()).map(str::to_lowercase).as_deref() {
            Some("json") => VectorFormat::Json,
            Some("bin") | Some("f64") | Some("dat") => VectorFormat::Bin,
            _ => VectorFormat::Csv,
        }
    }
}

/// Decodes a vector file. `name` is used in error messages.
pub fn parse_vector(bytes: &[u8], format: VectorFormat, name: &str) -> CliResult<Vec<C64>> {
    let bad = |msg: String| CliError::Input { path: name.to_string(), msg };
    match format {
        VectorFormat::Bin => {
            if bytes.len() % 8 != 0 {
                return Err(bad(format!("{} bytes is not a whole number of f64 values", bytes.len())));
            }
            Ok(bytes.chunks_exact(8).map(|b| C64::new(f64::from_le_bytes(b.try_into().unwrap()), 0.0)).collect())
        }
        VectorFormat::Json => {
            let text = std::str::from_utf8(bytes).map_err(|e| bad(e.to_string()))?;
            let v: Value = serde_json::from_str(text).map_err(syntax)?;
            let items = array(&v, "$")?;
            items
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    let at = format!("$[{i}]");
                    match x.as_array() {
                        Some(p) if p.len() == 2 => Ok(C64::new(real(&p[0], &at)?, real(&p[1], &at)?)),
                        _ => complex(x, &at),
                    }
                })
                .collect()
        }
        VectorFormat::Csv => {
            let text = std::str::from_utf8(bytes).map_err(|e| bad(e.to_string()))?;
            let mut out = Vec::new();
            for (ln, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("line {}: `{}`: {e}", ln + 1, s.trim())));
                let z = match line.split(',').collect::<Vec<_>>()[..] {
                    [re] => C64::new(num(re)?, 0.0),
                    [re, im] => C64::new(num(re)?, num(im)?),
                    _ => return Err(bad(format!("line {}: expected `re` or `re,im`", ln + 1))),
                };
                out.push(z);
            }
            Ok(out)
        }
    }
}

/// Parses site tensors: `{"sites": [{"shape": [l, 2, r], "data": [..]}]}`
/// where `data` holds row-major numbers or `{"re", "im"}` values, or
/// `"base64"` replaces `data` with interleaved little-endian `f64` re/im.
pub fn parse_tensors(text: &str) -> CliResult<MpsTensors> {
    let v: Value = serde_json::from_str(text).map_err(syntax)?;
    let root = object(&v, "$", &["sites"])?;
    let mut sites = Vec::new();
    for (i, s) in array(required(root, "sites", "$")?, "$.sites")?.iter().enumerate() {
        let at = format!("$.sites[{i}]");
        let map = object(s, &at, &["shape", "data", "base64"])?;
        let shape = array(required(map, "shape", &at)?, &format!("{at}.shape"))?;
        if shape.len() != 3 || shape[1].as_u64() != Some(2) {
            return field_err(&format!("{at}.shape"), "expected [chi_l, 2, chi_r]");
        }
        let chi_l = index(&shape[0], &format!("{at}.shape[0]"))?;
        let chi_r = index(&shape[2], &format!("{at}.shape[2]"))?;
        let data = match (map.get("data"), map.get("base64")) {
            (Some(d), None) => array(d, &format!("{at}.data"))?
                .iter()
                .enumerate()
                .map(|(j, z)| complex(z, &format!("{at}.data[{j}]")))
                .collect::<CliResult<Vec<_>>>()?,
            (None, Some(b)) => {
                let bp = format!("{at}.base64");
                let Some(b) = b.as_str() else {
                    return field_err(&bp, "expected a string");
                };
                let raw = base64::engine::general_purpose::STANDARD.decode(b).or_else(|e| field_err(&bp, e.to_string()))?;
                if raw.len() % 16 != 0 {
                    return field_err(&bp, "length is not a whole number of complex f64 values");
                }
                raw.chunks_exact(16)
                    .map(|c| C64::new(f64::from_le_bytes(c[..8].try_into().unwrap()), f64::from_le_bytes(c[8..].try_into().unwrap())))
                    .collect()
            }
            _ => return field_err(&at, "exactly one of `data` or `base64` is required"),
        };
        sites.push(SiteTensor::new(chi_l, chi_r, data).map_err(|e| CliError::Field { path: at.clone(), msg: e.to_string() })?);
    }
    Ok(MpsTensors { sites })
}

/// Inverse of [`parse_tensors`] using plain number arrays.
pub fn tensors_to_json(t: &MpsTensors) -> Value {
    let sites: Vec<Value> = t
        .sites
        .iter()
        .map(|s| json!({ "shape": [s.chi_l, 2, s.chi_r], "data": s.data.iter().map(|z| json!({"re": z.re, "im": z.im})).collect::<Vec<_>>() }))
        .collect();
    json!({ "sites": sites })
}

#[derive(Parser, Debug)]
#[command(name = "qencode", version, about = "Compile structured amplitude vectors into {CX, U3} circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Synthesize a circuit for a pattern document.
    Encode {
        /// Pattern document: a file path or inline JSON.
        spec: String,
        /// Vector length, a power of two.
        #[arg(short = 'N', long = "n")]
        n: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Predict transpiled counts without synthesis.
    Predict {
        /// Pattern document: a file path or inline JSON.
        spec: String,
        /// Vector length, a power of two.
        #[arg(short = 'N', long = "n")]
        n: usize,
        /// Accepted and ignored.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Approximately load a numeric vector through a truncated MPS.
    Mps {
        /// Vector file (JSON array, CSV or little-endian f64).
        vector: Option<PathBuf>,
        /// Maximum bond dimension.
        #[arg(long, default_value_t = 8)]
        bond_dim: usize,
        /// Vector file format; inferred from the extension when omitted.
        #[arg(long, value_enum)]
        format: Option<VectorFormat>,
        /// Right-canonical site tensors to load instead of a vector.
        #[arg(long, conflicts_with = "vector")]
        tensors_in: Option<PathBuf>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Simulate the circuit and compare with the target state.
    #[arg(long)]
    validate: bool,
    /// Phase-aligned distance tolerance for --validate.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// What to write to --out (or stdout).
    #[arg(long, value_enum, default_value_t = Emit::Qasm)]
    emit: Emit,
    /// Output file; stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also write the info JSON to this file.
    #[arg(long)]
    info: Option<PathBuf>,
    /// Accepted and ignored.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Qasm,
    Json,
    Counts,
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::Input { path: path.display().to_string(), msg: e.to_string() })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Input { path: path.display().to_string(), msg: e.to_string() })
}

fn load_spec(spec: &str) -> CliResult<Pattern> {
    if spec.trim_start().starts_with('{') {
        return parse_pattern_str(spec);
    }
    let bytes = read(Path::new(spec))?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::Input { path: spec.to_string(), msg: e.to_string() })?;
    parse_pattern_str(&text)
}

fn info_json(info: &EncodingInfo) -> String {
    serde_json::to_string_pretty(info).expect("info serializes") + "\n"
}

fn counts_json(info: &EncodingInfo) -> String {
    let v = json!({
        "gate_count": info.gate_count,
        "gate_count_1q": info.gate_count_1q,
        "gate_count_2q": info.gate_count_2q,
        "circuit_depth": info.circuit_depth,
    });
    serde_json::to_string_pretty(&v).expect("counts serialize") + "\n"
}

/// Renders every output before touching the filesystem, so a failure
/// leaves no partial files behind.
fn emit(circuit: &Circuit, info: &EncodingInfo, args: &OutputArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let main = match args.emit {
        Emit::Qasm => to_qasm(&transpile(circuit)),
        Emit::Json => info_json(info),
        Emit::Counts => counts_json(info),
    };
    let info_text = info_json(info);
    match &args.out {
        Some(p) => write_file(p, &main)?,
        None => stdout.write_all(main.as_bytes()).map_err(|e| CliError::Input { path: "<stdout>".into(), msg: e.to_string() })?,
    }
    if let Some(p) = &args.info {
        write_file(p, &info_text)?;
    }
    Ok(())
}

fn options(args: &OutputArgs) -> EncodeOptions {
    EncodeOptions { validate: args.validate, tol: args.tol, ..EncodeOptions::default() }
}

/// Runs a parsed command, writing primary output to `stdout`.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Encode { spec, n, out } => {
            let p = load_spec(&spec)?;
            let (circuit, info) = encode_with(&p, n, &options(&out))?;
            emit(&circuit, &info, &out, stdout)
        }
        Command::Predict { spec, n, .. } => {
            let p = load_spec(&spec)?;
            let r = predict_gates(&p, n)?;
            let text = serde_json::to_string_pretty(&r).expect("prediction serializes") + "\n";
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Input { path: "<stdout>".into(), msg: e.to_string() })
        }
        Command::Mps { vector, bond_dim, format, tensors_in, out } => {
            let opts = options(&out);
            let (circuit, info) = match (vector, tensors_in) {
                (_, Some(tp)) => {
                    let bytes = read(&tp)?;
                    let text = String::from_utf8(bytes).map_err(|e| CliError::Input { path: tp.display().to_string(), msg: e.to_string() })?;
                    encode_mps_from_tensors(&parse_tensors(&text)?, &opts)?
                }
                (Some(vp), None) => {
                    let fmt = format.unwrap_or_else(|| VectorFormat::from_path(&vp));
                    let v = parse_vector(&read(&vp)?, fmt, &vp.display().to_string())?;
                    encode_mps(&v, bond_dim, &opts)?
                }
                (None, None) => {
                    return Err(CliError::Input { path: "mps".into(), msg: "a vector file or --tensors-in is required".into() });
                }
            };
            emit(&circuit, &info, &out, stdout)
        }
    }
}

/// Entry point: parses `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
