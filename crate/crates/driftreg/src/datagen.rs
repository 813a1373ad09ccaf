//! Seeded data generation: drifting synthetic regression streams, echoed
//! signals for adaptive-filtering experiments, CSV ingestion, and drift
//! measures for comparator sequences.
//!
//! All generation is bit-exact reproducible from `(generator, parameters,
//! seed)`: the PRNG below is fully specified, so two runs — or two
//! implementations — produce identical byte streams.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::learners::Sample;
use crate::linalg::{dot, norm};

/// splitmix64 finalizer. Used for seed expansion and child-seed derivation.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for replica `index`: `mix64(base + (index + 1) * GOLDEN)`.
/// Documented so other implementations can reproduce replicated runs.
pub fn child_seed(base: u64, index: u64) -> u64 {
    mix64(base.wrapping_add((index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
}

/// xoshiro256++ with splitmix64 seeding.
///
/// Gaussian draws use the Box–Muller cosine transform on two consecutive
/// uniforms, with `u1 = ((bits >> 11) + 0.5) * 2^-53` so the log argument is
/// never zero. One gaussian consumes exactly two `next_u64` outputs; nothing
/// is cached, keeping the consumption pattern trivial to replicate.
#[derive(Clone, Debug)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn seed_from(seed: u64) -> Self {
        let mut z = seed;
        let mut s = [0u64; 4];
        for w in &mut s {
            z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
            *w = mix64(z);
        }
        Rng { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53-bit resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Uniform in `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Comparator sequence `{u_t}` the learners are measured against.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparatorSeq {
    pub u: Vec<Vec<f64>>,
}

impl ComparatorSeq {
    pub fn constant(u: Vec<f64>, len: usize) -> Self {
        ComparatorSeq { u: vec![u; len] }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// Total drift `sum_{t=1}^{T-1} ||u_t - u_{t+1}||^p` for `p` in `{1, 2}`.
    pub fn drift_variance(&self, p: u32) -> f64 {
        assert!(p == 1 || p == 2, "drift order must be 1 or 2");
        self.u
            .windows(2)
            .map(|w| {
                let step: f64 = w[0]
                    .iter()
                    .zip(&w[1])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if p == 1 {
                    step
                } else {
                    step * step
                }
            })
            .sum()
    }
}

/// Stream metadata recorded for reproducibility.
#[derive(Clone, Debug, serde::Serialize)]
pub struct StreamMeta {
    pub generator: String,
    pub seed: Option<u64>,
    /// Declared bound on `||x_t||`, when the generator guarantees one.
    pub x_bound: Option<f64>,
    /// Declared bound on `|y_t|`, when the generator guarantees one.
    pub y_bound: Option<f64>,
}

/// An ordered sample stream of fixed dimension.
#[derive(Clone, Debug)]
pub struct Stream {
    pub samples: Vec<Sample>,
    pub meta: StreamMeta,
}

impl Stream {
    pub fn new(samples: Vec<Sample>, meta: StreamMeta) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Data("stream has no samples".into()));
        }
        let d = samples[0].x.len();
        for (i, s) in samples.iter().enumerate() {
            if s.x.len() != d {
                return Err(Error::Data(format!(
                    "sample {} has dimension {}, expected {d}",
                    i + 1,
                    s.x.len()
                )));
            }
            if !s.is_finite() {
                return Err(Error::Data(format!("sample {} is not finite", i + 1)));
            }
        }
        Ok(Stream { samples, meta })
    }

    pub fn dim(&self) -> usize {
        self.samples[0].x.len()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Largest `||x_t||` in the stream.
    pub fn max_input_norm(&self) -> f64 {
        self.samples.iter().map(|s| norm(&s.x)).fold(0.0, f64::max)
    }

    /// Largest `|y_t|` in the stream.
    pub fn max_label(&self) -> f64 {
        self.samples.iter().map(|s| s.y.abs()).fold(0.0, f64::max)
    }
}

/// Parameters of [`rotating_drift_stream`] with the defaults used by the
/// synthetic drift experiment: 2000 points in R^20, five coordinate pairs
/// drawn from a 45°-rotated Gaussian with standard deviations 10 and 1, the
/// remaining coordinates i.i.d. N(0, 2), and a unit comparator vector in the
/// first two coordinates rotating at a constant rate.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RotatingParams {
    pub t: usize,
    pub d: usize,
    pub pairs: usize,
    pub sigma_major: f64,
    pub sigma_minor: f64,
    pub sigma_rest: f64,
    /// Constant instantaneous drift `||u_t - u_{t-1}||` per step.
    pub drift_per_step: f64,
    pub noise_std: f64,
}

impl Default for RotatingParams {
    fn default() -> Self {
        RotatingParams {
            t: 2000,
            d: 20,
            pairs: 5,
            sigma_major: 10.0,
            sigma_minor: 1.0,
            sigma_rest: std::f64::consts::SQRT_2,
            drift_per_step: 0.01,
            noise_std: 0.0,
        }
    }
}

/// Synthetic drifting regression stream.
///
/// Labels are `y_t = u_t . x_t` plus optional Gaussian noise, where `u_t` is
/// a unit vector in the first two coordinates advancing by a fixed rotation
/// angle chosen so that the chord `||u_t - u_{t-1}||` equals
/// `drift_per_step`.
pub fn rotating_drift_stream(
    params: &RotatingParams,
    seed: u64,
) -> Result<(Stream, ComparatorSeq)> {
    let p = params;
    if p.pairs == 0 || p.d < 2 * p.pairs {
        return Err(Error::bad_param(
            "pairs",
            format!("need d >= 2*pairs, got d={} pairs={}", p.d, p.pairs),
        ));
    }
    if p.t == 0 {
        return Err(Error::bad_param("t", "stream length must be positive"));
    }
    if !(0.0..=2.0).contains(&p.drift_per_step) {
        return Err(Error::bad_param(
            "drift_per_step",
            "chord of a unit circle lies in [0, 2]",
        ));
    }

    let mut rng = Rng::seed_from(seed);
    let theta = 2.0 * (p.drift_per_step / 2.0).asin();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;

    let mut samples = Vec::with_capacity(p.t);
    let mut comparators = Vec::with_capacity(p.t);
    for step in 0..p.t {
        let mut x = vec![0.0; p.d];
        for pair in 0..p.pairs {
            let g1 = rng.next_gaussian() * p.sigma_major;
            let g2 = rng.next_gaussian() * p.sigma_minor;
            x[2 * pair] = (g1 - g2) * inv_sqrt2;
            x[2 * pair + 1] = (g1 + g2) * inv_sqrt2;
        }
        for coord in x.iter_mut().take(p.d).skip(2 * p.pairs) {
            *coord = rng.next_gaussian() * p.sigma_rest;
        }

        let angle = theta * step as f64;
        let mut u = vec![0.0; p.d];
        u[0] = angle.cos();
        u[1] = angle.sin();

        let mut y = dot(&u, &x);
        if p.noise_std > 0.0 {
            y += rng.next_gaussian() * p.noise_std;
        }
        samples.push(Sample::new(x, y)?);
        comparators.push(u);
    }

    let meta = StreamMeta {
        generator: format!(
            "rotating(t={},d={},pairs={},sigma_major={},sigma_minor={},sigma_rest={},drift_per_step={},noise_std={})",
            p.t, p.d, p.pairs, p.sigma_major, p.sigma_minor, p.sigma_rest, p.drift_per_step, p.noise_std
        ),
        seed: Some(seed),
        x_bound: None,
        y_bound: None,
    };
    Ok((
        Stream::new(samples, meta)?,
        ComparatorSeq { u: comparators },
    ))
}

/// Parameters of the FIR echo experiment with documented defaults: a 2000
/// sample speech-like source, four reflections whose shared amplitude
/// oscillates as `amp_base + amp_mod * sin(2 pi n / amp_period)`, label
/// noise N(0, 1e-3), and an order-8 tapped-delay input window.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FirEchoParams {
    pub n: usize,
    pub k: usize,
    pub amp_base: f64,
    pub amp_mod: f64,
    pub amp_period: f64,
    pub noise_std: f64,
    pub filter_order: usize,
}

impl Default for FirEchoParams {
    fn default() -> Self {
        FirEchoParams {
            n: 2000,
            k: 4,
            amp_base: 0.5,
            amp_mod: 0.3,
            amp_period: 400.0,
            noise_std: 1e-3_f64.sqrt(),
            filter_order: 8,
        }
    }
}

/// Parameters of the feedback (flange) echo experiment. The delay wobbles
/// as `delay_base + round(delay_depth * (1 + sin(2 pi n / delay_period)) / 2)`,
/// staying at least 1. Defaults keep `delay_base + delay_depth <
/// filter_order` so an order-8 FIR window remains informative.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlangeEchoParams {
    pub n: usize,
    pub amplitude: f64,
    pub delay_base: usize,
    pub delay_depth: usize,
    pub delay_period: f64,
    pub noise_std: f64,
    pub filter_order: usize,
}

impl Default for FlangeEchoParams {
    fn default() -> Self {
        FlangeEchoParams {
            n: 2000,
            amplitude: 0.5,
            delay_base: 4,
            delay_depth: 3,
            delay_period: 500.0,
            noise_std: 1e-3_f64.sqrt(),
            filter_order: 8,
        }
    }
}

/// FIR echo experiment over a generated speech-like source. The source
/// signal uses child seed 1 and the label noise child seed 2, so the whole
/// dataset is determined by `seed`.
pub fn fir_echo_dataset(params: &FirEchoParams, seed: u64) -> Result<Stream> {
    let signal = speech_like_signal(params.n, child_seed(seed, 1));
    let (base, amp_mod, period) = (params.amp_base, params.amp_mod, params.amp_period);
    let mut stream = fir_echo_stream(
        &signal,
        params.k,
        move |n| base + amp_mod * (std::f64::consts::TAU * n as f64 / period).sin(),
        params.noise_std,
        params.filter_order,
        child_seed(seed, 2),
    )?;
    stream.meta.generator = format!(
        "fir-echo(n={},k={},amp_base={},amp_mod={},amp_period={},noise_std={},filter_order={})",
        params.n,
        params.k,
        params.amp_base,
        params.amp_mod,
        params.amp_period,
        params.noise_std,
        params.filter_order
    );
    stream.meta.seed = Some(seed);
    Ok(stream)
}

/// Flange echo experiment over a generated speech-like source; seeding as
/// in [`fir_echo_dataset`].
pub fn flange_echo_dataset(params: &FlangeEchoParams, seed: u64) -> Result<Stream> {
    let signal = speech_like_signal(params.n, child_seed(seed, 1));
    let (base, depth, period) = (params.delay_base, params.delay_depth, params.delay_period);
    let mut stream = flange_echo_stream(
        &signal,
        params.amplitude,
        move |n| {
            let wobble = (depth as f64 * (1.0 + (std::f64::consts::TAU * n as f64 / period).sin())
                / 2.0)
                .round() as usize;
            (base + wobble).max(1)
        },
        params.noise_std,
        params.filter_order,
        child_seed(seed, 2),
    )?;
    stream.meta.generator = format!(
        "flange-echo(n={},amplitude={},delay_base={},delay_depth={},delay_period={},noise_std={},filter_order={})",
        params.n, params.amplitude, params.delay_base, params.delay_depth, params.delay_period,
        params.noise_std, params.filter_order
    );
    stream.meta.seed = Some(seed);
    Ok(stream)
}

/// Tapped-delay window `(x[n], x[n-1], ..., x[n-order+1])`, zero-padded at
/// the start of the signal.
fn delay_window(signal: &[f64], n: usize, order: usize) -> Vec<f64> {
    (0..order)
        .map(|k| if n >= k { signal[n - k] } else { 0.0 })
        .collect()
}

/// Echoed signal with `k` delayed reflections of time-varying amplitude:
/// `y(n) = x(n) + sum_{D=1..k} A(n) x(n-D) + v(n)` with `v ~ N(0,
/// noise_std^2)`. Inputs are tapped-delay windows of the clean signal.
pub fn fir_echo_stream(
    signal: &[f64],
    k: usize,
    amplitude: impl Fn(usize) -> f64,
    noise_std: f64,
    filter_order: usize,
    seed: u64,
) -> Result<Stream> {
    if signal.is_empty() {
        return Err(Error::Data("echo source signal is empty".into()));
    }
    if filter_order == 0 {
        return Err(Error::bad_param("filter_order", "must be at least 1"));
    }
    let mut rng = Rng::seed_from(seed);
    let mut samples = Vec::with_capacity(signal.len());
    for n in 0..signal.len() {
        let a = amplitude(n);
        let mut y = signal[n];
        for delay in 1..=k {
            if n >= delay {
                y += a * signal[n - delay];
            }
        }
        if noise_std > 0.0 {
            y += rng.next_gaussian() * noise_std;
        }
        samples.push(Sample::new(delay_window(signal, n, filter_order), y)?);
    }
    let meta = StreamMeta {
        generator: format!("fir-echo(k={k},noise_std={noise_std},filter_order={filter_order})"),
        seed: Some(seed),
        x_bound: None,
        y_bound: None,
    };
    Stream::new(samples, meta)
}

/// Feedback echo with time-varying delay:
/// `y(n) = x(n) + A y(n - D(n)) + v(n)` with `y(m) = 0` for `m < 0`.
pub fn flange_echo_stream(
    signal: &[f64],
    amplitude: f64,
    delay: impl Fn(usize) -> usize,
    noise_std: f64,
    filter_order: usize,
    seed: u64,
) -> Result<Stream> {
    if signal.is_empty() {
        return Err(Error::Data("echo source signal is empty".into()));
    }
    if filter_order == 0 {
        return Err(Error::bad_param("filter_order", "must be at least 1"));
    }
    let mut rng = Rng::seed_from(seed);
    let mut echoed = Vec::with_capacity(signal.len());
    let mut samples = Vec::with_capacity(signal.len());
    for n in 0..signal.len() {
        let dn = delay(n);
        if dn == 0 {
            return Err(Error::bad_param(
                "delay",
                format!("delay({n}) must be >= 1"),
            ));
        }
        let feedback = if n >= dn { echoed[n - dn] } else { 0.0 };
        let mut y = signal[n] + amplitude * feedback;
        if noise_std > 0.0 {
            y += rng.next_gaussian() * noise_std;
        }
        echoed.push(y);
        samples.push(Sample::new(delay_window(signal, n, filter_order), y)?);
    }
    let meta = StreamMeta {
        generator: format!(
            "flange-echo(amplitude={amplitude},noise_std={noise_std},filter_order={filter_order})"
        ),
        seed: Some(seed),
        x_bound: None,
        y_bound: None,
    };
    Stream::new(samples, meta)
}

/// Synthetic speech-like source signal: three amplitude-modulated chirps
/// (linear frequency sweeps with seeded phases) plus N(0, 0.05^2) noise.
/// A stand-in for real recordings in the echo experiments.
pub fn speech_like_signal(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = Rng::seed_from(seed);
    // (amplitude, start freq, end freq) in cycles per sample
    let parts = [
        (1.0, 0.010, 0.045),
        (0.6, 0.002, 0.030),
        (0.3, 0.070, 0.015),
    ];
    let phases: Vec<f64> = parts
        .iter()
        .map(|_| rng.next_f64() * std::f64::consts::TAU)
        .collect();
    let env_phase = rng.next_f64() * std::f64::consts::TAU;
    let n = len.max(1) as f64;
    (0..len)
        .map(|t| {
            let tf = t as f64;
            let mut s = 0.0;
            for ((amp, f0, f1), phase) in parts.iter().zip(&phases) {
                let sweep = f0 * tf + (f1 - f0) * tf * tf / (2.0 * n);
                s += amp * (std::f64::consts::TAU * sweep + phase).sin();
            }
            // syllable-like envelope with period 500 samples
            let env = 0.55 + 0.45 * (std::f64::consts::TAU * tf / 500.0 + env_phase).sin();
            s * env + 0.05 * rng.next_gaussian()
        })
        .collect()
}

/// Writes a stream in the CSV interchange format: header
/// `t,x_1,...,x_d,y`, one sample per line, LF endings, shortest
/// round-tripping decimal floats.
pub fn write_csv_stream(stream: &Stream, path: &Path) -> Result<()> {
    let d = stream.dim();
    let mut out = String::new();
    out.push('t');
    for j in 1..=d {
        let _ = write!(out, ",x_{j}");
    }
    out.push_str(",y\n");
    for (i, s) in stream.samples.iter().enumerate() {
        let _ = write!(out, "{}", i + 1);
        for v in &s.x {
            let _ = write!(out, ",{v}");
        }
        let _ = writeln!(out, ",{}", s.y);
    }
    let mut f =
        std::fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    f.write_all(out.as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// Loads a stream from the CSV interchange format, inferring the dimension
/// from the header. Malformed rows are reported with their line number.
pub fn load_csv_stream(path: &Path) -> Result<Stream> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut lines = BufReader::new(file).lines().enumerate();

    let header = match lines.next() {
        Some((_, Ok(h))) => h,
        Some((_, Err(e))) => return Err(Error::io(path.display().to_string(), e)),
        None => return Err(Error::Data(format!("{}: empty file", path.display()))),
    };
    let cols: Vec<&str> = header.trim_end().split(',').collect();
    if cols.len() < 3 || cols[0] != "t" || *cols.last().unwrap() != "y" {
        return Err(Error::Data(format!(
            "{}: header must be `t,x_1,...,x_d,y`, got `{header}`",
            path.display()
        )));
    }
    let d = cols.len() - 2;
    for (j, c) in cols[1..=d].iter().enumerate() {
        if *c != format!("x_{}", j + 1) {
            return Err(Error::Data(format!(
                "{}: expected column `x_{}`, got `{c}`",
                path.display(),
                j + 1
            )));
        }
    }

    let mut samples = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != d + 2 {
            return Err(Error::Data(format!(
                "{}: line {lineno}: expected {} fields, got {}",
                path.display(),
                d + 2,
                fields.len()
            )));
        }
        let parse = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| {
                Error::Data(format!(
                    "{}: line {lineno}: non-numeric {what} `{s}`",
                    path.display()
                ))
            })
        };
        let x: Vec<f64> = fields[1..=d]
            .iter()
            .map(|s| parse(s, "input"))
            .collect::<Result<_>>()?;
        let y = parse(fields[d + 1], "label")?;
        samples.push(Sample::new(x, y).map_err(|_| {
            Error::Data(format!(
                "{}: line {lineno}: non-finite value",
                path.display()
            ))
        })?);
    }
    if samples.is_empty() {
        return Err(Error::Data(format!("{}: no samples", path.display())));
    }
    let meta = StreamMeta {
        generator: format!("csv:{}", path.display()),
        seed: None,
        x_bound: None,
        y_bound: None,
    };
    Stream::new(samples, meta)
}
