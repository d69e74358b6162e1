//! Active implementations of the shipped actor kinds.

use super::{
    ActorDecl, ActorError, CfdfActor, IoRole, KindEntry, ModelError, PortIo, PortLayout, PortSpec,
    Rates, Token, TokenType,
};
use crate::kernels;

const F64: Option<TokenType> = Some(TokenType::F64);
const I64: Option<TokenType> = Some(TokenType::I64);

fn ports(specs: &[(&str, Option<TokenType>)]) -> Vec<PortSpec> {
    specs.iter().map(|(n, t)| PortSpec::new(*n, *t)).collect()
}

fn numbered(prefix: &str, n: usize, ty: Option<TokenType>) -> Vec<PortSpec> {
    (0..n).map(|i| PortSpec::new(format!("{prefix}{i}"), ty)).collect()
}

fn fanout(decl: &ActorDecl, default: usize) -> Result<usize, ModelError> {
    let m: usize = decl.params.parse_or(&decl.name, "fanout", default)?;
    if m == 0 {
        return Err(ModelError::BadParam {
            actor: decl.name.clone(),
            key: "fanout".into(),
            reason: "must be at least 1".into(),
        });
    }
    Ok(m)
}

fn gain(decl: &ActorDecl) -> Result<f64, ModelError> {
    decl.params.parse_or(&decl.name, "k", 1.0)
}

fn read_f64(io: &mut dyn PortIo, port: usize) -> Result<f64, ActorError> {
    match io.read(port)? {
        Token::F64(x) => Ok(x),
        t => Err(ActorError::TypeMismatch {
            port,
            expected: TokenType::F64,
            got: t.token_type(),
        }),
    }
}

fn read_len(io: &mut dyn PortIo, port: usize) -> Result<usize, ActorError> {
    match io.read(port)? {
        Token::I64(n) if n >= 1 => Ok(n as usize),
        Token::I64(n) => Err(ActorError::InvalidToken(format!(
            "window length must be at least 1, got {n}"
        ))),
        t => Err(ActorError::TypeMismatch {
            port,
            expected: TokenType::I64,
            got: t.token_type(),
        }),
    }
}

/// Shared bookkeeping for every actor implementation.
struct Core {
    name: String,
    kind: String,
    layout: PortLayout,
    rates: Rates,
    mode: usize,
}

impl Core {
    fn new(decl: &ActorDecl, layout: PortLayout, rates: Rates) -> Self {
        Core {
            name: decl.name.clone(),
            kind: decl.kind.clone(),
            layout,
            rates,
            mode: 0,
        }
    }
}

macro_rules! core_accessors {
    ($modes:expr) => {
        fn name(&self) -> &str {
            &self.core.name
        }
        fn kind(&self) -> &str {
            &self.core.kind
        }
        fn layout(&self) -> &PortLayout {
            &self.core.layout
        }
        fn mode_names(&self) -> &'static [&'static str] {
            $modes
        }
        fn mode(&self) -> usize {
            self.core.mode
        }
        fn rates(&self) -> &Rates {
            &self.core.rates
        }
    };
}

/// Single-mode actor whose firing is a pure function of the consumed
/// tokens.
struct Sdf<F> {
    core: Core,
    fire: F,
}

impl<F> CfdfActor for Sdf<F>
where
    F: FnMut(&mut dyn PortIo) -> Result<(), ActorError> + Send,
{
    core_accessors!(&["fire"]);

    fn invoke(&mut self, io: &mut dyn PortIo) -> Result<usize, ActorError> {
        (self.fire)(io)?;
        Ok(0)
    }
}

fn sdf<F>(decl: &ActorDecl, layout: PortLayout, consume: Vec<usize>, produce: Vec<usize>, fire: F) -> Box<dyn CfdfActor>
where
    F: FnMut(&mut dyn PortIo) -> Result<(), ActorError> + Send + 'static,
{
    Box::new(Sdf {
        core: Core::new(decl, layout, Rates::new(consume, produce)),
        fire,
    })
}

/// Emits one token per firing from a bound finite stream.
struct Source {
    core: Core,
    ty: TokenType,
    data: Vec<Token>,
    pos: usize,
}

impl Source {
    fn refresh(&mut self) {
        if self.pos < self.data.len() {
            self.core.mode = 0;
            self.core.rates = Rates::new(vec![], vec![1]);
        } else {
            self.core.mode = 1;
            self.core.rates = Rates::halted(0, 1);
        }
    }
}

impl CfdfActor for Source {
    core_accessors!(&["emit", "done"]);

    fn invoke(&mut self, io: &mut dyn PortIo) -> Result<usize, ActorError> {
        io.write(0, self.data[self.pos])?;
        self.pos += 1;
        self.refresh();
        Ok(self.core.mode)
    }

    fn io_role(&self) -> IoRole {
        IoRole::Source
    }

    fn bind_input(&mut self, data: Vec<Token>) -> Result<(), ActorError> {
        if let Some(bad) = data.iter().find(|t| t.token_type() != self.ty) {
            return Err(ActorError::Io(format!(
                "source `{}` expects {} samples, found {}",
                self.core.name,
                self.ty,
                bad.token_type()
            )));
        }
        self.data = data;
        self.pos = 0;
        self.refresh();
        Ok(())
    }
}

/// Variable-length source. The bound stream is framed as `N, x1..xN, M,
/// y1..yM, ...`; each frame emits its length on `len` in mode
/// `emit-length` and then all N samples on `out` in mode `emit-data`.
struct VarSource {
    core: Core,
    data: Vec<Token>,
    pos: usize,
    pending: usize,
}

const VSRC_EMIT_LENGTH: usize = 0;
const VSRC_EMIT_DATA: usize = 1;
const VSRC_DONE: usize = 2;

fn frame_header(t: Token) -> Option<usize> {
    match t {
        Token::I64(n) if n >= 0 => Some(n as usize),
        Token::F64(x) if x >= 0.0 && x.fract() == 0.0 && x <= i64::MAX as f64 => Some(x as usize),
        _ => None,
    }
}

impl VarSource {
    fn set_mode(&mut self, mode: usize) {
        self.core.mode = mode;
        self.core.rates = match mode {
            VSRC_EMIT_LENGTH => Rates::new(vec![], vec![1, 0]),
            VSRC_EMIT_DATA => Rates::new(vec![], vec![0, self.pending]),
            _ => Rates::halted(0, 2),
        };
    }
}

impl CfdfActor for VarSource {
    core_accessors!(&["emit-length", "emit-data", "done"]);

    fn invoke(&mut self, io: &mut dyn PortIo) -> Result<usize, ActorError> {
        match self.core.mode {
            VSRC_EMIT_LENGTH => {
                let n = frame_header(self.data[self.pos]).expect("framing checked on bind");
                self.pos += 1;
                io.write(0, Token::I64(n as i64))?;
                self.pending = n;
                self.set_mode(VSRC_EMIT_DATA);
            }
            VSRC_EMIT_DATA => {
                for _ in 0..self.pending {
                    io.write(1, self.data[self.pos])?;
                    self.pos += 1;
                }
                self.pending = 0;
                let next = if self.pos < self.data.len() {
                    VSRC_EMIT_LENGTH
                } else {
                    VSRC_DONE
                };
                self.set_mode(next);
            }
            _ => unreachable!("halted actor invoked"),
        }
        Ok(self.core.mode)
    }

    fn io_role(&self) -> IoRole {
        IoRole::Source
    }

    fn bind_input(&mut self, data: Vec<Token>) -> Result<(), ActorError> {
        let mut i = 0;
        while i < data.len() {
            let n = frame_header(data[i]).ok_or_else(|| {
                ActorError::Io(format!("vsrc `{}`: bad frame header at {i}", self.core.name))
            })?;
            if data.len() - i - 1 < n {
                return Err(ActorError::Io(format!(
                    "vsrc `{}`: frame at {i} declares {n} samples but the stream ends early",
                    self.core.name
                )));
            }
            if let Some(bad) = data[i + 1..i + 1 + n].iter().find(|t| t.as_f64().is_none()) {
                return Err(ActorError::Io(format!(
                    "vsrc `{}`: non-f64 sample {bad}",
                    self.core.name
                )));
            }
            i += n + 1;
        }
        self.data = data;
        self.pos = 0;
        self.pending = 0;
        let mode = if self.data.is_empty() {
            VSRC_DONE
        } else {
            VSRC_EMIT_LENGTH
        };
        self.set_mode(mode);
        Ok(())
    }
}

struct Sink {
    core: Core,
    received: Vec<Token>,
}

impl CfdfActor for Sink {
    core_accessors!(&["consume"]);

    fn invoke(&mut self, io: &mut dyn PortIo) -> Result<usize, ActorError> {
        let t = io.read(0)?;
        self.received.push(t);
        Ok(0)
    }

    fn io_role(&self) -> IoRole {
        IoRole::Sink
    }

    fn sink_output(&self) -> Option<&[Token]> {
        Some(&self.received)
    }
}

/// Windowed mean: reads a window length N, then consumes N samples and
/// emits their left-to-right sum divided by N.
struct WindowAverage {
    core: Core,
    window: usize,
}

const AVG_READ_LENGTH: usize = 0;
const AVG_PROCESS: usize = 1;

impl CfdfActor for WindowAverage {
    core_accessors!(&["read-length", "process"]);

    fn invoke(&mut self, io: &mut dyn PortIo) -> Result<usize, ActorError> {
        if self.core.mode == AVG_READ_LENGTH {
            self.window = read_len(io, 0)?;
            self.core.mode = AVG_PROCESS;
            self.core.rates = Rates::new(vec![0, self.window], vec![1]);
        } else {
            let mut sum = 0.0;
            for _ in 0..self.window {
                sum += read_f64(io, 1)?;
            }
            io.write(0, Token::F64(sum / self.window as f64))?;
            self.core.mode = AVG_READ_LENGTH;
            self.core.rates = Rates::new(vec![1, 0], vec![0]);
        }
        Ok(self.core.mode)
    }
}

fn src_type(decl: &ActorDecl) -> Result<TokenType, ModelError> {
    decl.params.parse_or(&decl.name, "type", TokenType::F64)
}

fn layout_src(d: &ActorDecl) -> Result<PortLayout, ModelError> {
    Ok(PortLayout::new(vec![], ports(&[("out", Some(src_type(d)?))])))
}

fn active_src(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    let mut s = Source {
        core: Core::new(d, layout, Rates::halted(0, 1)),
        ty: src_type(d)?,
        data: Vec::new(),
        pos: 0,
    };
    s.refresh();
    Ok(Box::new(s))
}

fn layout_vsrc(_: &ActorDecl) -> Result<PortLayout, ModelError> {
    Ok(PortLayout::new(vec![], ports(&[("len", I64), ("out", F64)])))
}

fn active_vsrc(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    let mut s = VarSource {
        core: Core::new(d, layout, Rates::halted(0, 2)),
        data: Vec::new(),
        pos: 0,
        pending: 0,
    };
    s.set_mode(VSRC_DONE);
    Ok(Box::new(s))
}

fn layout_snk(_: &ActorDecl) -> Result<PortLayout, ModelError> {
    Ok(PortLayout::new(ports(&[("in", None)]), vec![]))
}

fn active_snk(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    Ok(Box::new(Sink {
        core: Core::new(d, layout, Rates::new(vec![1], vec![])),
        received: Vec::new(),
    }))
}

fn layout_unary(_: &ActorDecl) -> Result<PortLayout, ModelError> {
    Ok(PortLayout::new(ports(&[("in", F64)]), ports(&[("out", F64)])))
}

fn active_gain(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    let k = gain(d)?;
    Ok(sdf(d, layout, vec![1], vec![1], move |io| {
        let x = read_f64(io, 0)?;
        io.write(0, Token::F64(k * x))
    }))
}

fn active_acc(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    let mut total = 0.0;
    Ok(sdf(d, layout, vec![1], vec![1], move |io| {
        total += read_f64(io, 0)?;
        io.write(0, Token::F64(total))
    }))
}

fn active_mag(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    Ok(sdf(d, layout, vec![2], vec![1], |io| {
        let re = read_f64(io, 0)?;
        let im = read_f64(io, 0)?;
        io.write(0, Token::F64(re * re + im * im))
    }))
}

fn layout_sub(_: &ActorDecl) -> Result<PortLayout, ModelError> {
    Ok(PortLayout::new(ports(&[("a", F64), ("b", F64)]), ports(&[("out", F64)])))
}

fn active_sub(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    Ok(sdf(d, layout, vec![1, 1], vec![1], |io| {
        let a = read_f64(io, 0)?;
        let b = read_f64(io, 1)?;
        io.write(0, Token::F64(a - b))
    }))
}

fn layout_errmag(_: &ActorDecl) -> Result<PortLayout, ModelError> {
    Ok(PortLayout::new(ports(&[("ref", F64), ("rec", F64)]), ports(&[("out", F64)])))
}

/// Squared magnitude of the complex difference of two interleaved streams.
fn active_errmag(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    Ok(sdf(d, layout, vec![2, 2], vec![1], |io| {
        let (r_re, r_im) = (read_f64(io, 0)?, read_f64(io, 0)?);
        let (x_re, x_im) = (read_f64(io, 1)?, read_f64(io, 1)?);
        let (d_re, d_im) = (r_re - x_re, r_im - x_im);
        io.write(0, Token::F64(d_re * d_re + d_im * d_im))
    }))
}

fn layout_avg(_: &ActorDecl) -> Result<PortLayout, ModelError> {
    Ok(PortLayout::new(ports(&[("len", I64), ("in", F64)]), ports(&[("out", F64)])))
}

fn active_avg(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    Ok(Box::new(WindowAverage {
        core: Core::new(d, layout, Rates::new(vec![1, 0], vec![0])),
        window: 0,
    }))
}

fn layout_rms_ratio(_: &ActorDecl) -> Result<PortLayout, ModelError> {
    Ok(PortLayout::new(ports(&[("e", F64), ("r", F64)]), ports(&[("out", F64)])))
}

/// `sqrt(e) / sqrt(r)`: ratio of two RMS values given their mean squares.
fn active_rms_ratio(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    Ok(sdf(d, layout, vec![1, 1], vec![1], |io| {
        let e = read_f64(io, 0)?;
        let r = read_f64(io, 1)?;
        io.write(0, Token::F64(e.sqrt() / r.sqrt()))
    }))
}

fn layout_fork(d: &ActorDecl) -> Result<PortLayout, ModelError> {
    Ok(PortLayout::new(ports(&[("in", None)]), numbered("out", fanout(d, 2)?, None)))
}

fn active_fork(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    let m = layout.outputs.len();
    Ok(sdf(d, layout, vec![1], vec![1; m], move |io| {
        let t = io.read(0)?;
        for j in 0..m {
            io.write(j, t)?;
        }
        Ok(())
    }))
}

fn layout_gainfork(d: &ActorDecl) -> Result<PortLayout, ModelError> {
    gain(d)?;
    Ok(PortLayout::new(ports(&[("in", F64)]), numbered("out", fanout(d, 2)?, F64)))
}

fn active_gainfork(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    let k = gain(d)?;
    let m = layout.outputs.len();
    Ok(sdf(d, layout, vec![1], vec![1; m], move |io| {
        let y = Token::F64(k * read_f64(io, 0)?);
        for j in 0..m {
            io.write(j, y)?;
        }
        Ok(())
    }))
}

fn layout_interleave(d: &ActorDecl) -> Result<PortLayout, ModelError> {
    Ok(PortLayout::new(
        ports(&[("re", F64), ("im", F64)]),
        numbered("out", fanout(d, 1)?, F64),
    ))
}

fn active_interleave(d: &ActorDecl, layout: PortLayout) -> Result<Box<dyn CfdfActor>, ModelError> {
    let m = layout.outputs.len();
    Ok(sdf(d, layout, vec![1, 1], vec![2; m], move |io| {
        let re = io.read(0)?;
        let im = io.read(1)?;
        for j in 0..m {
            io.write(j, re)?;
            io.write(j, im)?;
        }
        Ok(())
    }))
}

fn entry(
    kind: &str,
    layout: super::library::LayoutFn,
    active: super::ActiveFactory,
    passive: Option<super::PassiveFactory>,
) -> KindEntry {
    KindEntry {
        kind: kind.to_string(),
        layout,
        active,
        passive,
    }
}

pub(super) fn standard_entries() -> Vec<KindEntry> {
    vec![
        entry("src", layout_src, active_src, None),
        entry("vsrc", layout_vsrc, active_vsrc, None),
        entry("snk", layout_snk, active_snk, None),
        entry("gain", layout_unary, active_gain, None),
        entry("acc", layout_unary, active_acc, None),
        entry("mag", layout_unary, active_mag, None),
        entry("sub", layout_sub, active_sub, None),
        entry("errmag", layout_errmag, active_errmag, None),
        entry("avg", layout_avg, active_avg, None),
        entry("rms-ratio", layout_rms_ratio, active_rms_ratio, None),
        entry("fork", layout_fork, active_fork, Some(kernels::passive_fork)),
        entry(
            "gainfork",
            layout_gainfork,
            active_gainfork,
            Some(kernels::passive_gainfork),
        ),
        entry(
            "interleave",
            layout_interleave,
            active_interleave,
            Some(kernels::passive_interleave),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, VecDeque};

    use super::super::{enable, enable_named, ActorLibrary};
    use super::*;

    /// Unbounded per-port queues for driving one actor by hand.
    struct Queues {
        inputs: Vec<VecDeque<Token>>,
        outputs: Vec<Vec<Token>>,
    }

    impl Queues {
        fn new(layout: &PortLayout) -> Self {
            Queues {
                inputs: vec![VecDeque::new(); layout.inputs.len()],
                outputs: vec![Vec::new(); layout.outputs.len()],
            }
        }
    }

    impl PortIo for Queues {
        fn read(&mut self, input: usize) -> Result<Token, ActorError> {
            self.inputs[input].pop_front().ok_or(ActorError::Empty(input))
        }
        fn write(&mut self, output: usize, token: Token) -> Result<(), ActorError> {
            self.outputs[output].push(token);
            Ok(())
        }
    }

    fn actor(decl: ActorDecl) -> Box<dyn CfdfActor> {
        ActorLibrary::standard().instantiate_active(&decl).unwrap()
    }

    fn named(pairs: &[(&str, usize)]) -> BTreeMap<String, usize> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn fork_enable_cases() {
        let fork = actor(ActorDecl::new("F", "fork"));
        let free = named(&[("out0", 1), ("out1", 3)]);
        assert!(enable_named(fork.as_ref(), &named(&[("in", 1)]), &free).unwrap());
        assert!(!enable_named(fork.as_ref(), &named(&[("in", 0)]), &free).unwrap());
        assert!(matches!(
            enable_named(fork.as_ref(), &named(&[("in", 1), ("x", 1)]), &free),
            Err(ModelError::UnknownPort { .. })
        ));
    }

    #[test]
    fn gain_not_enabled_without_output_space() {
        let g = actor(ActorDecl::new("G", "gain").param("k", 2.0));
        assert!(!enable(g.as_ref(), &[5], &[0]));
        assert!(enable(g.as_ref(), &[5], &[1]));
    }

    #[test]
    fn enable_has_no_side_effects() {
        let mut avg = actor(ActorDecl::new("A", "avg"));
        let before = (avg.mode(), avg.rates().clone());
        for _ in 0..10 {
            enable(avg.as_ref(), &[1, 0], &[1]);
        }
        assert_eq!((avg.mode(), avg.rates().clone()), before);
        let mut q = Queues::new(avg.layout());
        q.inputs[0].push_back(Token::I64(2));
        avg.invoke(&mut q).unwrap();
        assert_eq!(avg.mode_names()[avg.mode()], "process");
    }

    #[test]
    fn fork_broadcasts_input() {
        let mut fork = actor(ActorDecl::new("F", "fork"));
        let mut q = Queues::new(fork.layout());
        q.inputs[0].push_back(Token::F64(7.0));
        fork.invoke(&mut q).unwrap();
        assert_eq!(q.outputs, vec![vec![Token::F64(7.0)], vec![Token::F64(7.0)]]);
    }

    #[test]
    fn gain_multiplies() {
        let mut g = actor(ActorDecl::new("G", "gain").param("k", 2.0));
        let mut q = Queues::new(g.layout());
        q.inputs[0].push_back(Token::F64(3.0));
        g.invoke(&mut q).unwrap();
        assert_eq!(q.outputs[0], vec![Token::F64(6.0)]);
    }

    #[test]
    fn variable_source_two_mode_cycle() {
        let mut s = actor(ActorDecl::new("S", "vsrc"));
        s.bind_input(vec![Token::I64(2), Token::F64(0.5), Token::F64(1.5)])
            .unwrap();
        let mut q = Queues::new(s.layout());
        assert_eq!(s.mode_names()[s.mode()], "emit-length");
        assert_eq!(s.rates().produce, vec![1, 0]);
        let m = s.invoke(&mut q).unwrap();
        assert_eq!(s.mode_names()[m], "emit-data");
        assert_eq!(s.rates().produce, vec![0, 2]);
        s.invoke(&mut q).unwrap();
        assert_eq!(q.outputs[0], vec![Token::I64(2)]);
        assert_eq!(q.outputs[1], vec![Token::F64(0.5), Token::F64(1.5)]);
        assert_eq!(q.outputs[0].len() + q.outputs[1].len(), 1 + 2);
        // stream exhausted: no further firing
        assert!(!s.rates().fireable);

        let mut again = actor(ActorDecl::new("S", "vsrc"));
        again
            .bind_input(vec![
                Token::I64(1),
                Token::F64(0.0),
                Token::I64(1),
                Token::F64(1.0),
            ])
            .unwrap();
        let mut q = Queues::new(again.layout());
        again.invoke(&mut q).unwrap();
        assert_eq!(again.invoke(&mut q).unwrap(), 0, "returns to emit-length");
        assert!(again.bind_input(vec![Token::I64(3), Token::F64(1.0)]).is_err());
    }

    #[test]
    fn interleave_and_magnitudes() {
        let mut il = actor(ActorDecl::new("I", "interleave").param("fanout", 2));
        let mut q = Queues::new(il.layout());
        q.inputs[0].push_back(Token::F64(1.0));
        q.inputs[1].push_back(Token::F64(10.0));
        il.invoke(&mut q).unwrap();
        let expect = vec![Token::F64(1.0), Token::F64(10.0)];
        assert_eq!(q.outputs, vec![expect.clone(), expect]);

        let mut e = actor(ActorDecl::new("E", "errmag"));
        let mut q = Queues::new(e.layout());
        q.inputs[0].extend([Token::F64(3.0), Token::F64(1.0)]);
        q.inputs[1].extend([Token::F64(0.0), Token::F64(-3.0)]);
        e.invoke(&mut q).unwrap();
        assert_eq!(q.outputs[0], vec![Token::F64(25.0)]);
    }

    #[test]
    fn window_average_rejects_zero_length() {
        let mut avg = actor(ActorDecl::new("A", "avg"));
        let mut q = Queues::new(avg.layout());
        q.inputs[0].push_back(Token::I64(0));
        assert!(matches!(avg.invoke(&mut q), Err(ActorError::InvalidToken(_))));
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let lib = ActorLibrary::standard();
        assert!(matches!(
            lib.layout(&ActorDecl::new("F", "fork").param("fanout", 0)),
            Err(ModelError::BadParam { .. })
        ));
        assert!(matches!(
            lib.layout(&ActorDecl::new("G", "gainfork").param("k", "x")),
            Err(ModelError::BadParam { .. })
        ));
    }
}
