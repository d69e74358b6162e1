#![allow(dead_code)]

use pafg::runtime::IoBindings;
use pafg::{ActorDecl, ActorLibrary, ApplicationGraph, Token, TokenType};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// The ten-computational, four-buffer example graph. Edge `k` (1-based)
/// of the returned list is `L_k`.
pub fn example_graph(lib: &ActorLibrary) -> (ApplicationGraph, Vec<String>) {
    let mut g = ApplicationGraph::new();
    let kinds = [
        ("H1", "src"),
        ("H2", "gain"),
        ("H3", "gain"),
        ("H4", "gain"),
        ("H5", "gain"),
        ("H6", "snk"),
        ("H7", "snk"),
        ("H8", "sub"),
        ("H9", "sub"),
        ("H10", "snk"),
        ("J1", "fork"),
        ("J2", "fork"),
        ("J3", "fork"),
        ("J4", "fork"),
    ];
    for (name, kind) in kinds {
        g.add_actor(lib, ActorDecl::new(name, kind)).unwrap();
    }
    let edges = [
        ("H1", "out", "J1", "in"),
        ("J1", "out0", "H2", "in"),
        ("J1", "out1", "H3", "in"),
        ("H2", "out", "J2", "in"),
        ("H3", "out", "J3", "in"),
        ("J2", "out0", "H4", "in"),
        ("J2", "out1", "H8", "a"),
        ("J3", "out0", "H5", "in"),
        ("J3", "out1", "H8", "b"),
        ("H8", "out", "J4", "in"),
        ("J4", "out0", "H9", "a"),
        ("J4", "out1", "H6", "in"),
        ("H4", "out", "H9", "b"),
        ("H5", "out", "H7", "in"),
        ("H9", "out", "H10", "in"),
    ];
    let mut labels = Vec::new();
    for (s, sp, t, tp) in edges {
        g.connect(lib, s, sp, t, tp, 4, TokenType::F64).unwrap();
        labels.push(format!("{s}.{sp}->{t}.{tp}"));
    }
    (g, labels)
}

struct Open {
    actor: String,
    port: String,
    /// Tokens per firing on this port.
    rate: usize,
}

/// Random acyclic graph of at most `max_actors` actors. Every input is
/// connected, every output ends in a sink, and no actor pair has two edges.
pub fn random_graph(rng: &mut ChaCha8Rng, lib: &ActorLibrary, max_actors: usize) -> ApplicationGraph {
    loop {
        if let Some(g) = try_random_graph(rng, lib, max_actors) {
            return g;
        }
    }
}

fn try_random_graph(rng: &mut ChaCha8Rng, lib: &ActorLibrary, max_actors: usize) -> Option<ApplicationGraph> {
    let mut g = ApplicationGraph::new();
    let mut open: Vec<Open> = Vec::new();
    let mut next_src = 0;
    let mut edges = Vec::new();
    let core = rng.gen_range(1..=8);
    for i in 0..core {
        let name = format!("N{i:02}");
        let decl = match rng.gen_range(0..7) {
            0 => ActorDecl::new(&name, "gain").param("k", rng.gen_range(-3..=3) as f64 * 0.5),
            1 => ActorDecl::new(&name, "sub"),
            2 => ActorDecl::new(&name, "fork").param("fanout", rng.gen_range(1..=3)),
            3 => ActorDecl::new(&name, "gainfork")
                .param("fanout", rng.gen_range(1..=3))
                .param("k", 1.5),
            4 => ActorDecl::new(&name, "interleave").param("fanout", rng.gen_range(1..=2)),
            5 => ActorDecl::new(&name, "mag"),
            _ => ActorDecl::new(&name, "acc"),
        };
        let layout = lib.layout(&decl).unwrap();
        let interleave = decl.kind == "interleave";
        let mut producers: Vec<String> = Vec::new();
        for p in &layout.inputs {
            // the passive interleaver admits one token per write turn
            let usable: Vec<usize> = (0..open.len())
                .filter(|&j| !producers.contains(&open[j].actor))
                .filter(|&j| !interleave || open[j].rate == 1)
                .collect();
            let (actor, port) = if !usable.is_empty() && rng.gen_bool(0.7) {
                let j = *usable.choose(rng).unwrap();
                let o = open.swap_remove(j);
                (o.actor, o.port)
            } else {
                let s = format!("S{next_src}");
                next_src += 1;
                g.add_actor(lib, ActorDecl::new(&s, "src")).ok()?;
                (s, "out".to_string())
            };
            producers.push(actor.clone());
            edges.push((actor, port, name.clone(), p.name.clone()));
        }
        g.add_actor(lib, decl).ok()?;
        for p in &layout.outputs {
            let rate = if interleave { 2 } else { 1 };
            open.push(Open {
                actor: name.clone(),
                port: p.name.clone(),
                rate,
            });
        }
    }
    for (k, o) in open.into_iter().enumerate() {
        let t = format!("T{k}");
        g.add_actor(lib, ActorDecl::new(&t, "snk")).ok()?;
        edges.push((o.actor, o.port, t, "in".into()));
    }
    if g.actor_count() > max_actors {
        return None;
    }
    for (s, sp, t, tp) in edges {
        let cap = rng.gen_range(2..=6);
        g.connect(lib, &s, &sp, &t, &tp, cap, TokenType::F64).ok()?;
    }
    Some(g)
}

/// Random finite streams for every source actor.
pub fn random_inputs(rng: &mut ChaCha8Rng, g: &ApplicationGraph) -> IoBindings {
    let mut io = IoBindings::new();
    for a in g.actors().filter(|a| a.kind == "src") {
        let n = rng.gen_range(1..=24);
        let data = (0..n)
            .map(|_| Token::F64(rng.gen_range(-8..=8) as f64 * 0.25))
            .collect();
        io = io.input(a.name.clone(), data);
    }
    io
}

/// EVM BMR from the edge capacities alone: every data edge holds
/// `max(max N, 2)` tokens, every length edge one; passivizing FA merges
/// its unit buffers into one, RFC's four data buffers into one of twice
/// the size, and RCC's three likewise.
pub fn evm_bmr_oracle(max_window: usize, fanout: usize) -> (u64, u64) {
    let d = max_window.max(2) as u64;
    let f = fanout as u64;
    let direct = 8 * (12 * d + (1 + f));
    let fa = 1;
    let rfc = 2 * d;
    let rcc = 2 * d;
    let untouched = 12 * d - 4 * d - 3 * d;
    (direct, 8 * (untouched + fa + rfc + rcc))
}
