//! NPP instances: generation, quantization, serialization, and the
//! correlated interpolation family Y(τ) = √(1−τ²)·X₀ + τ·Xᵢ.

use crate::error::{NppError, Result};
use crate::rng::{seed_stream, NormalStream};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Fractional bits used by `Mode::quantized_default`.
pub const DEFAULT_QUANT_BITS: u32 = 50;
/// Largest accepted number of fractional bits.
pub const MAX_QUANT_BITS: u32 = 110;

/// Arithmetic mode of an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Float64,
    /// Weights rounded to integers at scale 2^(−bits); all subset sums are
    /// then computed exactly in 128-bit integers.
    Quantized { bits: u32 },
}

impl Mode {
    pub fn quantized_default() -> Self {
        Mode::Quantized {
            bits: DEFAULT_QUANT_BITS,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Float64 => f.write_str("float64"),
            Mode::Quantized { bits } => write!(f, "quantized:{bits}"),
        }
    }
}

impl FromStr for Mode {
    type Err = NppError;

    /// Accepts `float`, `float64`, `quantized` (default bits) and `quantized:B`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" | "float64" => Ok(Mode::Float64),
            "quantized" => Ok(Mode::quantized_default()),
            _ => {
                let bits = s
                    .strip_prefix("quantized:")
                    .and_then(|b| b.parse::<u32>().ok())
                    .ok_or_else(|| NppError::invalid(format!("unknown mode {s:?}")))?;
                if bits == 0 || bits > MAX_QUANT_BITS {
                    return Err(NppError::invalid(format!(
                        "quantization bits must be in 1..={MAX_QUANT_BITS}, got {bits}"
                    )));
                }
                Ok(Mode::Quantized { bits })
            }
        }
    }
}

/// Borrowed view of an instance's arithmetic.
#[derive(Clone, Copy, Debug)]
pub enum Weights<'a> {
    Float(&'a [f64]),
    Int { values: &'a [i128], bits: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    n: usize,
    weights: Vec<f64>,
    mode: Mode,
    quantized: Option<Vec<i128>>,
    seed: u64,
    label: String,
}

fn quantize(weights: &[f64], bits: u32) -> Result<Vec<i128>> {
    let n = weights.len() as f64;
    let scale = 2f64.powi(bits as i32);
    // |q| < 2^126 / n keeps every signed subset sum inside i128.
    let limit = 2f64.powi(126) / n;
    weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let q = (w * scale).round();
            if q.abs() >= limit {
                Err(NppError::invalid(format!(
                    "weight {i} = {w} overflows quantization at {bits} bits"
                )))
            } else {
                Ok(q as i128)
            }
        })
        .collect()
}

impl Instance {
    /// n i.i.d. N(0,1) weights from the stream keyed by `seed`.
    pub fn generate(n: usize, seed: u64, mode: Mode) -> Result<Self> {
        if n == 0 {
            return Err(NppError::invalid("instance size n must be at least 1"));
        }
        let mut stream = NormalStream::new(seed);
        let weights: Vec<f64> = (0..n).map(|_| stream.normal()).collect();
        Self::build(weights, mode, seed, format!("gaussian n={n} seed={seed}"))
    }

    /// Instance over explicit weights (seed recorded as 0).
    pub fn from_weights(weights: Vec<f64>, mode: Mode) -> Result<Self> {
        let label = format!("explicit n={}", weights.len());
        Self::build(weights, mode, 0, label)
    }

    fn build(weights: Vec<f64>, mode: Mode, seed: u64, label: String) -> Result<Self> {
        if weights.is_empty() {
            return Err(NppError::invalid("instance needs at least one weight"));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite()) {
            return Err(NppError::invalid(format!("weight {i} is not finite")));
        }
        let quantized = match mode {
            Mode::Float64 => None,
            Mode::Quantized { bits } => {
                if bits == 0 || bits > MAX_QUANT_BITS {
                    return Err(NppError::invalid(format!("bad quantization bits {bits}")));
                }
                Some(quantize(&weights, bits)?)
            }
        };
        Ok(Self {
            n: weights.len(),
            weights,
            mode,
            quantized,
            seed,
            label,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn mode(&self) -> Mode {
        self.mode
    }
    pub fn quantized_weights(&self) -> Option<&[i128]> {
        self.quantized.as_deref()
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn view(&self) -> Weights<'_> {
        match (&self.quantized, self.mode) {
            (Some(q), Mode::Quantized { bits }) => Weights::Int { values: q, bits },
            _ => Weights::Float(&self.weights),
        }
    }

    /// Same instance in a different arithmetic mode.
    pub fn with_mode(&self, mode: Mode) -> Result<Self> {
        Self::build(self.weights.clone(), mode, self.seed, self.label.clone())
    }

    /// X ↦ −X.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.weights.iter_mut().for_each(|w| *w = -*w);
        if let Some(q) = &mut out.quantized {
            q.iter_mut().for_each(|v| *v = -*v);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from(self)).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)
            .map_err(|e| NppError::invalid(format!("instance JSON: {e}")))?;
        file.try_into()
    }
}

/// On-disk JSON schema of an instance.
#[derive(Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub seed: u64,
    pub mode: String,
    pub label: String,
    pub weights: Vec<f64>,
    /// Decimal integer strings at scale 2^(−bits); present in quantized mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantized_weights: Option<Vec<String>>,
}

impl From<&Instance> for InstanceFile {
    fn from(x: &Instance) -> Self {
        Self {
            n: x.n,
            seed: x.seed,
            mode: x.mode.to_string(),
            label: x.label.clone(),
            weights: x.weights.clone(),
            quantized_weights: x
                .quantized
                .as_ref()
                .map(|q| q.iter().map(|v| v.to_string()).collect()),
        }
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = NppError;

    fn try_from(f: InstanceFile) -> Result<Self> {
        if f.weights.len() != f.n {
            return Err(NppError::invalid(format!(
                "instance declares n = {} but has {} weights",
                f.n,
                f.weights.len()
            )));
        }
        let mode: Mode = f.mode.parse()?;
        let x = Instance::build(f.weights, mode, f.seed, f.label)?;
        if let (Some(stored), Some(derived)) = (&f.quantized_weights, &x.quantized) {
            if stored.len() != derived.len() {
                return Err(NppError::invalid("quantized_weights length mismatch"));
            }
            for (i, (s, d)) in stored.iter().zip(derived).enumerate() {
                let v: i128 = s
                    .parse()
                    .map_err(|_| NppError::invalid(format!("quantized weight {i}: {s:?}")))?;
                if v != *d {
                    return Err(NppError::invalid(format!(
                        "quantized weight {i} = {v} disagrees with round(w·2^b) = {d}"
                    )));
                }
            }
        }
        Ok(x)
    }
}

/// Base instance X₀ together with T independent perturbations X₁..X_T.
#[derive(Clone, Debug)]
pub struct CorrelatedEnsemble {
    base: Instance,
    perturbations: Vec<Instance>,
}

impl CorrelatedEnsemble {
    /// X₀ uses `seed_stream(master, 0)`, Xᵢ uses `seed_stream(master, i)`.
    pub fn generate(n: usize, t: usize, master_seed: u64, mode: Mode) -> Result<Self> {
        let base = Instance::generate(n, seed_stream(master_seed, 0), mode)?;
        let perturbations = (1..=t as u64)
            .map(|i| Instance::generate(n, seed_stream(master_seed, i), mode))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            base,
            perturbations,
        })
    }

    pub fn from_parts(base: Instance, perturbations: Vec<Instance>) -> Result<Self> {
        for p in &perturbations {
            if p.n() != base.n() || p.mode() != base.mode() {
                return Err(NppError::invalid(
                    "ensemble members must share n and arithmetic mode",
                ));
            }
        }
        Ok(Self {
            base,
            perturbations,
        })
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }
    pub fn t(&self) -> usize {
        self.perturbations.len()
    }
    pub fn base(&self) -> &Instance {
        &self.base
    }
    pub fn perturbations(&self) -> &[Instance] {
        &self.perturbations
    }

    /// Y_i(τ); `i` is 1-based as in X₁..X_T.
    pub fn interpolate(&self, i: usize, tau: f64) -> Result<Instance> {
        if i == 0 || i > self.t() {
            return Err(NppError::invalid(format!(
                "perturbation index {i} outside 1..={}",
                self.t()
            )));
        }
        interpolate_pair(&self.base, &self.perturbations[i - 1], tau)
    }
}

/// Y = √(1−τ²)·x + τ·y componentwise, quantizing the float result in
/// quantized mode.
pub fn interpolate_pair(x: &Instance, y: &Instance, tau: f64) -> Result<Instance> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(NppError::invalid(format!("tau = {tau} outside [0, 1]")));
    }
    if x.n() != y.n() {
        return Err(NppError::invalid("interpolated instances differ in length"));
    }
    let keep = (1.0 - tau * tau).sqrt();
    let weights = x
        .weights()
        .iter()
        .zip(y.weights())
        .map(|(&a, &b)| keep * a + tau * b)
        .collect();
    let label = format!("interp tau={tau} of [{}] and [{}]", x.label(), y.label());
    Instance::build(weights, x.mode(), x.seed(), label)
}

/// ρ_k = √((1−τ_k²)(1−τ_{k+1}²)) + τ_k·τ_{k+1}: the correlation between
/// consecutive points of the interpolation path.
pub fn step_correlation(tau_k: f64, tau_next: f64) -> Result<f64> {
    for t in [tau_k, tau_next] {
        if !(0.0..=1.0).contains(&t) {
            return Err(NppError::invalid(format!("tau = {t} outside [0, 1]")));
        }
    }
    Ok(((1.0 - tau_k * tau_k) * (1.0 - tau_next * tau_next)).sqrt() + tau_k * tau_next)
}
