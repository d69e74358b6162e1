//! Error-vector-magnitude measurement graph.
//!
//! Five sources feed the pipeline: `SRC1` the window lengths, `SRC2`/`SRC3`
//! the reference real/imaginary parts, `SRC4`/`SRC5` the received ones.
//! `FA` broadcasts each length to the two window averagers `EA` and `RFA`
//! (extra fanout ports go to `LSNK<j>`). `RFC` interleaves the reference
//! into one complex stream read by `E` and `RFM`; `RCC` interleaves the
//! received samples for `E`. `RMS` turns the two windowed mean squares
//! into one EVM value per window for `SNK`.

use num_complex::Complex;
use num_traits::Float;
use thiserror::Error;

use crate::model::{ActorDecl, ActorLibrary, ApplicationGraph, ModelError, Token, TokenType};
use crate::runtime::IoBindings;
use crate::transform::TokenProfile;

use super::Lcg;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvmError {
    #[error("at least one window is required")]
    NoWindows,
    #[error("window {index} has length {len}; lengths must be at least 1")]
    BadWindow { index: usize, len: i64 },
    #[error("length fanout must be at least 2, got {0}")]
    BadFanout(usize),
    #[error("{what} has {got} samples, windows need {expected}")]
    SampleCount {
        what: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("reference and received lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("reference is identically zero")]
    ZeroReference,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvmConfig {
    pub windows: Vec<i64>,
    /// Fanout of `FA`. Ports beyond the two averagers feed length sinks.
    pub length_fanout: usize,
}

impl EvmConfig {
    pub fn new(windows: Vec<i64>) -> Self {
        EvmConfig {
            windows,
            length_fanout: 2,
        }
    }

    pub fn validate(&self) -> Result<(), EvmError> {
        if self.windows.is_empty() {
            return Err(EvmError::NoWindows);
        }
        if let Some((index, &len)) = self.windows.iter().enumerate().find(|(_, &n)| n < 1) {
            return Err(EvmError::BadWindow { index, len });
        }
        if self.length_fanout < 2 {
            return Err(EvmError::BadFanout(self.length_fanout));
        }
        Ok(())
    }

    pub fn total_samples(&self) -> usize {
        self.windows.iter().map(|&n| n as usize).sum()
    }

    pub fn max_window(&self) -> usize {
        self.windows.iter().copied().max().unwrap_or(1) as usize
    }

    /// Capacity of every sample-carrying edge. Interleaved outputs need two
    /// slots even for one-sample windows.
    pub fn data_capacity(&self) -> usize {
        self.max_window().max(2)
    }
}

/// Reference and received sample streams, all windows concatenated.
#[derive(Debug, Clone, PartialEq)]
pub struct EvmInputs {
    pub reference: Vec<Complex<f64>>,
    pub received: Vec<Complex<f64>>,
}

impl EvmInputs {
    /// Uniform samples in `[-1, 1)` for both parts of both streams.
    pub fn random(cfg: &EvmConfig, rng: &mut Lcg) -> Self {
        let n = cfg.total_samples();
        let draw = |rng: &mut Lcg| {
            (0..n)
                .map(|_| Complex::new(rng.next_signed(), rng.next_signed()))
                .collect()
        };
        let reference = draw(rng);
        let received = draw(rng);
        EvmInputs {
            reference,
            received,
        }
    }

    pub fn check(&self, cfg: &EvmConfig) -> Result<(), EvmError> {
        let expected = cfg.total_samples();
        for (what, got) in [
            ("reference", self.reference.len()),
            ("received", self.received.len()),
        ] {
            if got != expected {
                return Err(EvmError::SampleCount {
                    what,
                    got,
                    expected,
                });
            }
        }
        Ok(())
    }
}

/// Random window lengths in `lo..=hi`.
pub fn random_windows(rng: &mut Lcg, count: usize, lo: i64, hi: i64) -> Vec<i64> {
    (0..count)
        .map(|_| rng.next_in(lo as u64, hi as u64) as i64)
        .collect()
}

pub fn build_evm_graph(cfg: &EvmConfig, lib: &ActorLibrary) -> Result<ApplicationGraph, EvmError> {
    cfg.validate()?;
    let d = cfg.data_capacity();
    let f = cfg.length_fanout;
    let mut g = ApplicationGraph::new();
    let mut add = |decl: ActorDecl| g.add_actor(lib, decl);
    add(ActorDecl::new("SRC1", "src").param("type", "i64"))?;
    for s in ["SRC2", "SRC3", "SRC4", "SRC5"] {
        add(ActorDecl::new(s, "src"))?;
    }
    add(ActorDecl::new("FA", "fork").param("fanout", f))?;
    add(ActorDecl::new("RFC", "interleave").param("fanout", 2))?;
    add(ActorDecl::new("RCC", "interleave").param("fanout", 1))?;
    add(ActorDecl::new("E", "errmag"))?;
    add(ActorDecl::new("RFM", "mag"))?;
    add(ActorDecl::new("EA", "avg"))?;
    add(ActorDecl::new("RFA", "avg"))?;
    add(ActorDecl::new("RMS", "rms-ratio"))?;
    add(ActorDecl::new("SNK", "snk"))?;
    for j in 2..f {
        add(ActorDecl::new(format!("LSNK{j}"), "snk"))?;
    }

    let (i, x) = (TokenType::I64, TokenType::F64);
    let mut edges: Vec<(String, &str, String, &str, usize, TokenType)> = vec![
        ("SRC1".into(), "out", "FA".into(), "in", 1, i),
        ("FA".into(), "out0", "EA".into(), "len", 1, i),
        ("FA".into(), "out1", "RFA".into(), "len", 1, i),
        ("SRC2".into(), "out", "RFC".into(), "re", d, x),
        ("SRC3".into(), "out", "RFC".into(), "im", d, x),
        ("SRC4".into(), "out", "RCC".into(), "re", d, x),
        ("SRC5".into(), "out", "RCC".into(), "im", d, x),
        ("RFC".into(), "out0", "E".into(), "ref", d, x),
        ("RFC".into(), "out1", "RFM".into(), "in", d, x),
        ("RCC".into(), "out0", "E".into(), "rec", d, x),
        ("E".into(), "out", "EA".into(), "in", d, x),
        ("RFM".into(), "out", "RFA".into(), "in", d, x),
        ("EA".into(), "out", "RMS".into(), "e", d, x),
        ("RFA".into(), "out", "RMS".into(), "r", d, x),
        ("RMS".into(), "out", "SNK".into(), "in", d, x),
    ];
    let extra: Vec<String> = (2..f).map(|j| format!("out{j}")).collect();
    for (j, port) in (2..f).zip(&extra) {
        edges.push(("FA".into(), port, format!("LSNK{j}"), "in", 1, i));
    }
    for (s, sp, t, tp, cap, ty) in edges {
        g.connect(lib, &s, sp, &t, tp, cap, ty)?;
    }
    Ok(g)
}

pub fn io_bindings(cfg: &EvmConfig, inputs: &EvmInputs) -> Result<IoBindings, EvmError> {
    inputs.check(cfg)?;
    let part = |xs: &[Complex<f64>], f: fn(&Complex<f64>) -> f64| {
        xs.iter().map(|c| Token::F64(f(c))).collect::<Vec<_>>()
    };
    Ok(IoBindings::new()
        .input("SRC1", cfg.windows.iter().map(|&n| Token::I64(n)).collect())
        .input("SRC2", part(&inputs.reference, |c| c.re))
        .input("SRC3", part(&inputs.reference, |c| c.im))
        .input("SRC4", part(&inputs.received, |c| c.re))
        .input("SRC5", part(&inputs.received, |c| c.im)))
}

/// Tokens carried by each edge of the EVM graph over a whole run.
pub fn token_profile(cfg: &EvmConfig) -> TokenProfile {
    let k = cfg.windows.len() as u64;
    let s = cfg.total_samples() as u64;
    let mut p = TokenProfile::new();
    p.set("SRC1", "FA", k);
    p.set("FA", "EA", k);
    p.set("FA", "RFA", k);
    for j in 2..cfg.length_fanout {
        p.set("FA", &format!("LSNK{j}"), k);
    }
    for (src, snk) in [("SRC2", "RFC"), ("SRC3", "RFC"), ("SRC4", "RCC"), ("SRC5", "RCC")] {
        p.set(src, snk, s);
    }
    for (src, snk) in [("RFC", "E"), ("RFC", "RFM"), ("RCC", "E")] {
        p.set(src, snk, 2 * s);
    }
    p.set("E", "EA", s);
    p.set("RFM", "RFA", s);
    for (src, snk) in [("EA", "RMS"), ("RFA", "RMS"), ("RMS", "SNK")] {
        p.set(src, snk, k);
    }
    p
}

/// `sqrt(mean |ref - rec|^2) / sqrt(mean |ref|^2)`, summing left to right.
pub fn evm_oracle<T: Float>(reference: &[Complex<T>], received: &[Complex<T>]) -> Result<T, EvmError> {
    if reference.len() != received.len() {
        return Err(EvmError::LengthMismatch(reference.len(), received.len()));
    }
    if reference.is_empty() {
        return Err(EvmError::Empty);
    }
    let n = T::from(reference.len()).ok_or(EvmError::Empty)?;
    let mut ke = T::zero();
    let mut kr = T::zero();
    for (r, x) in reference.iter().zip(received) {
        ke = ke + (r - x).norm_sqr();
        kr = kr + r.norm_sqr();
    }
    if kr == T::zero() {
        return Err(EvmError::ZeroReference);
    }
    Ok((ke / n).sqrt() / (kr / n).sqrt())
}

/// One oracle value per window.
pub fn evm_oracle_windows(cfg: &EvmConfig, inputs: &EvmInputs) -> Result<Vec<f64>, EvmError> {
    inputs.check(cfg)?;
    let mut out = Vec::with_capacity(cfg.windows.len());
    let mut at = 0;
    for &n in &cfg.windows {
        let r = at..at + n as usize;
        out.push(evm_oracle(&inputs.reference[r.clone()], &inputs.received[r])?);
        at += n as usize;
    }
    Ok(out)
}

/// Direct and passivized BMR predicted from the capacity rule, in bytes.
pub fn analytic_bmr(cfg: &EvmConfig) -> (u64, u64) {
    let d = cfg.data_capacity() as u64;
    let f = cfg.length_fanout as u64;
    // 12 data edges, 1 + f length edges
    let direct = 8 * (12 * d + 1 + f);
    // FA: 1 + f unit buffers become one; RFC: 4 buffers become 2d; RCC: 3 become 2d
    let optimized = direct - 8 * (f + 2 * d + d);
    (direct, optimized)
}

/// Store counts of the direct and passivized runs over the whole input.
pub fn analytic_token_stores(cfg: &EvmConfig) -> (u64, u64) {
    let k = cfg.windows.len() as u64;
    let s = cfg.total_samples() as u64;
    let f = cfg.length_fanout as u64;
    (k * (4 + f) + 12 * s, 4 * k + 6 * s)
}

/// Tokens expected at all sinks once every window is processed.
pub fn expected_sink_tokens(cfg: &EvmConfig) -> u64 {
    cfg.windows.len() as u64 * (cfg.length_fanout as u64 - 1)
}
