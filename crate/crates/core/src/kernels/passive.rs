use std::ops::Mul;

use super::{KernelError, MultiReadRingBuffer};
use crate::model::{ActorDecl, PortLayout, Token};

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind<T> {
    /// One write port, one read port.
    SimpleFifo,
    /// One write port, `m` read ports sharing one ring.
    Fork,
    /// Like `Fork`, but every written value is multiplied by `gain` before
    /// it is stored.
    GainFork { gain: T },
    /// Write ports `re` and `im` fill even and odd global indices in strict
    /// alternation; readers only see complete pairs.
    Interleave,
}

impl<T> KernelKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::SimpleFifo => "simple-fifo",
            KernelKind::Fork => "passive-fork",
            KernelKind::GainFork { .. } => "gain-fork",
            KernelKind::Interleave => "passive-interleave",
        }
    }
}

/// A passive block: used only through its read and write ports.
#[derive(Debug, Clone, PartialEq)]
pub struct PassiveKernel<T> {
    kind: KernelKind<T>,
    ring: MultiReadRingBuffer<T>,
    write_ports: Vec<String>,
    read_ports: Vec<String>,
}

impl<T: Copy + Default + Mul<Output = T>> PassiveKernel<T> {
    pub fn simple_fifo(capacity: usize) -> Result<Self, KernelError> {
        Ok(PassiveKernel {
            kind: KernelKind::SimpleFifo,
            ring: MultiReadRingBuffer::new(capacity, 1)?,
            write_ports: vec!["in".into()],
            read_ports: vec!["out".into()],
        })
    }

    pub fn passive_fork(capacity: usize, fanout: usize) -> Result<Self, KernelError> {
        Self::with_outputs(KernelKind::Fork, capacity, vec!["in".into()], fanout)
    }

    pub fn gain_fork(capacity: usize, fanout: usize, gain: T) -> Result<Self, KernelError> {
        Self::with_outputs(KernelKind::GainFork { gain }, capacity, vec!["in".into()], fanout)
    }

    pub fn interleave(capacity: usize, fanout: usize) -> Result<Self, KernelError> {
        Self::with_outputs(
            KernelKind::Interleave,
            capacity,
            vec!["re".into(), "im".into()],
            fanout,
        )
    }

    fn with_outputs(
        kind: KernelKind<T>,
        capacity: usize,
        write_ports: Vec<String>,
        fanout: usize,
    ) -> Result<Self, KernelError> {
        Ok(PassiveKernel {
            kind,
            ring: MultiReadRingBuffer::new(capacity, fanout)?,
            write_ports,
            read_ports: (0..fanout).map(|i| format!("out{i}")).collect(),
        })
    }

    pub fn kind(&self) -> &KernelKind<T> {
        &self.kind
    }

    pub fn capacity(&self) -> usize {
        self.ring.capacity()
    }

    pub fn ring(&self) -> &MultiReadRingBuffer<T> {
        &self.ring
    }

    pub fn write_ports(&self) -> &[String] {
        &self.write_ports
    }

    pub fn read_ports(&self) -> &[String] {
        &self.read_ports
    }

    pub fn write_port(&self, name: &str) -> Result<usize, KernelError> {
        self.write_ports
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| KernelError::UnknownPortName(name.to_string()))
    }

    pub fn read_port(&self, name: &str) -> Result<usize, KernelError> {
        self.read_ports
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| KernelError::UnknownPortName(name.to_string()))
    }

    // highest global index visible to readers
    fn visible(&self) -> u64 {
        match self.kind {
            KernelKind::Interleave => self.ring.wptr() & !1,
            _ => self.ring.wptr(),
        }
    }

    pub fn population(&self, read_port: usize) -> Result<usize, KernelError> {
        let r = self.ring.rptr(read_port)?;
        Ok((self.visible() - r) as usize)
    }

    /// `capacity - (wptr - min rptr)`.
    pub fn free_space(&self) -> usize {
        self.ring.free_space()
    }

    /// Number of tokens that may be written on `write_port` right now.
    /// For the interleaver this is at most 1 and 0 when it is the other
    /// port's turn.
    pub fn write_space(&self, write_port: usize) -> Result<usize, KernelError> {
        if write_port >= self.write_ports.len() {
            return Err(KernelError::UnknownWritePort(write_port));
        }
        Ok(match self.kind {
            KernelKind::Interleave => {
                usize::from(self.ring.wptr() % 2 == write_port as u64 && self.free_space() > 0)
            }
            _ => self.free_space(),
        })
    }

    pub fn write(&mut self, write_port: usize, token: T) -> Result<(), KernelError> {
        if write_port >= self.write_ports.len() {
            return Err(KernelError::UnknownWritePort(write_port));
        }
        let stored = match &self.kind {
            KernelKind::GainFork { gain } => *gain * token,
            KernelKind::Interleave => {
                let turn = (self.ring.wptr() % 2) as usize;
                if turn != write_port {
                    return Err(KernelError::OutOfTurn {
                        port: self.write_ports[write_port].clone(),
                        expected: self.write_ports[turn].clone(),
                    });
                }
                token
            }
            _ => token,
        };
        self.ring.write(stored)
    }

    pub fn read(&mut self, read_port: usize) -> Result<T, KernelError> {
        let limit = self.visible();
        self.ring.read_bounded(read_port, limit)
    }

    pub fn write_named(&mut self, port: &str, token: T) -> Result<(), KernelError> {
        let p = self.write_port(port)?;
        self.write(p, token)
    }

    pub fn read_named(&mut self, port: &str) -> Result<T, KernelError> {
        let p = self.read_port(port)?;
        self.read(p)
    }

    pub fn population_named(&self, port: &str) -> Result<usize, KernelError> {
        self.population(self.read_port(port)?)
    }
}

/// Capacity assigned to a freshly passivized block, from the capacities of
/// the simple buffers feeding it that passivization removed.
///
/// Forks (plain or gain) and simple FIFOs keep the capacity of their input
/// buffer; the interleaver holds both inputs' worth of tokens.
pub fn capacity_rule(kind: &str, removed_input_capacities: &[usize]) -> usize {
    let sum: usize = removed_input_capacities.iter().sum();
    let cap = match kind {
        "fork" | "gainfork" | "simple" => removed_input_capacities.first().copied().unwrap_or(0),
        "interleave" => sum,
        _ => sum,
    };
    cap.max(1)
}

fn config_err(e: impl std::fmt::Display) -> KernelError {
    KernelError::Config(e.to_string())
}

pub fn passive_fork(
    _decl: &ActorDecl,
    layout: &PortLayout,
    capacity: usize,
) -> Result<PassiveKernel<Token>, KernelError> {
    PassiveKernel::passive_fork(capacity, layout.outputs.len())
}

pub fn passive_gainfork(
    decl: &ActorDecl,
    layout: &PortLayout,
    capacity: usize,
) -> Result<PassiveKernel<Token>, KernelError> {
    let k: f64 = decl
        .params
        .parse_or(&decl.name, "k", 1.0)
        .map_err(config_err)?;
    PassiveKernel::gain_fork(capacity, layout.outputs.len(), Token::F64(k))
}

pub fn passive_interleave(
    _decl: &ActorDecl,
    layout: &PortLayout,
    capacity: usize,
) -> Result<PassiveKernel<Token>, KernelError> {
    PassiveKernel::interleave(capacity, layout.outputs.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passive_fork_write_reaches_all_readers() {
        let mut k = PassiveKernel::passive_fork(4, 2).unwrap();
        k.write_named("in", 7.0).unwrap();
        assert_eq!(k.population_named("out0").unwrap(), 1);
        assert_eq!(k.population_named("out1").unwrap(), 1);
    }

    #[test]
    fn gain_fork_scales_at_write() {
        let mut k = PassiveKernel::gain_fork(4, 2, 2.0).unwrap();
        k.write(0, 3.0).unwrap();
        assert_eq!(k.read(0).unwrap(), 6.0);
        assert_eq!(k.read(1).unwrap(), 6.0);
    }

    #[test]
    fn interleave_alternates_re_im() {
        let mut k = PassiveKernel::interleave(4, 1).unwrap();
        k.write_named("re", 1.0).unwrap();
        assert_eq!(k.population(0).unwrap(), 0, "half a pair is not visible");
        assert!(matches!(
            k.write_named("re", 5.0),
            Err(KernelError::OutOfTurn { .. })
        ));
        assert_eq!(k.write_space(0).unwrap(), 0);
        assert_eq!(k.write_space(1).unwrap(), 1);
        k.write_named("im", 10.0).unwrap();
        k.write_named("re", 2.0).unwrap();
        k.write_named("im", 20.0).unwrap();
        let got: Vec<f64> = (0..4).map(|_| k.read(0).unwrap()).collect();
        assert_eq!(got, [1.0, 10.0, 2.0, 20.0]);
    }

    #[test]
    fn population_and_free_space() {
        let mut k = PassiveKernel::passive_fork(4, 2).unwrap();
        assert_eq!(k.free_space(), 4);
        for x in [1.0, 2.0, 3.0] {
            k.write(0, x).unwrap();
        }
        k.read(0).unwrap();
        assert_eq!(k.population(0).unwrap(), 2);
        assert_eq!(k.population(1).unwrap(), 3);
        assert_eq!(k.free_space(), 1);
    }

    #[test]
    fn empty_read_and_bad_ports() {
        let mut k = PassiveKernel::<f64>::simple_fifo(2).unwrap();
        assert_eq!(k.read(0), Err(KernelError::Empty(0)));
        assert!(matches!(
            k.read_named("out7"),
            Err(KernelError::UnknownPortName(_))
        ));
        assert_eq!(k.write(3, 1.0), Err(KernelError::UnknownWritePort(3)));
        k.write(0, 1.0).unwrap();
        k.write(0, 2.0).unwrap();
        assert_eq!(k.write(0, 3.0), Err(KernelError::Full));
    }

    #[test]
    fn capacity_rule_cases() {
        assert_eq!(capacity_rule("fork", &[100]), 100);
        assert_eq!(capacity_rule("interleave", &[100, 100]), 200);
        assert_eq!(capacity_rule("gainfork", &[1]), 1);
    }
}
