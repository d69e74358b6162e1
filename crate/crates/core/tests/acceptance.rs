//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use pafg::apps::evm::{self, EvmConfig, EvmInputs};
use pafg::apps::forkcascade::{self, ForkCascadeConfig, STANDARD_WINDOWS};
use pafg::apps::{run_direct_and_optimized, Lcg};
use pafg::kernels::{check_mapping_equivalence, ActiveCluster};
use pafg::pafg::{check_abc, check_association, is_alternating, is_simply_surrounded, BlockCategory};
use pafg::runtime::{compare_streams, instantiate, StopCondition};
use pafg::transform::{
    compute_bmr, derive_direct_pafg, estimate_copy_count, find_candidates, passivize,
    passivize_fixpoint, PassivizationPolicy,
};
use pafg::{ActorDecl, ActorLibrary, ApplicationGraph, Coord, MultiReadRingBuffer, PassiveKernel, Token, TokenType};
use rand::{Rng, SeedableRng};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

/// Relative error allowed between graph EVM values and the oracle.
const EVM_REL_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn criterion_1() -> Outcome {
    let lib = ActorLibrary::standard();
    let (g, labels) = common::example_graph(&lib);
    let z = derive_direct_pafg(g, &lib).map_err(|e| e.to_string())?;
    let count = |cat: BlockCategory, c: Coord| {
        z.blocks_with(c).filter(|b| b.category == cat).count()
    };
    let comp = count(BlockCategory::Computational, Coord::Actv);
    let buf = count(BlockCategory::NonSimpleBuffer, Coord::Actv);
    let simple = count(BlockCategory::SimplePassiveBuffer, Coord::Pssv);
    ensure!(
        (comp, buf, simple) == (10, 4, 15),
        "blocks: {comp} computational, {buf} buffer, {simple} simple"
    );
    ensure!(z.pafg().block_count() == 29, "block count {}", z.pafg().block_count());
    ensure!(z.pafg().edge_count() == 30, "edge count {}", z.pafg().edge_count());
    for i in 1..=10 {
        ensure!(z.coord_of(&format!("H{i}")) == Ok(Coord::Actv), "Y_{i} not actv");
    }
    for j in 1..=4 {
        ensure!(z.coord_of(&format!("J{j}")) == Ok(Coord::Actv), "Z_{j} not actv");
    }
    for (k, l) in labels.iter().enumerate() {
        ensure!(z.coord_of(l) == Ok(Coord::Pssv), "L_{} not pssv", k + 1);
    }
    Ok("10/4/15 blocks, 30 edges, coordination checked".into())
}

fn criterion_2() -> Outcome {
    let lib = ActorLibrary::standard();
    let (g, labels) = common::example_graph(&lib);
    let mut z = derive_direct_pafg(g, &lib).map_err(|e| e.to_string())?;
    let surrounded = |z: &pafg::CoordinatedPafg, b: &str| is_simply_surrounded(z.pafg(), b).unwrap();
    ensure!(surrounded(&z, "J1") && surrounded(&z, "J2"), "Z_1/Z_2 not simply surrounded");
    ensure!(
        !surrounded(&z, &labels[0]) && !surrounded(&z, &labels[1]),
        "L_1/L_2 reported simply surrounded"
    );
    let mut removed_all = Vec::new();
    for beta in ["J1", "J2", "J3"] {
        let f = z.pafg();
        let vz: Vec<String> = f.graph().pred(beta).unwrap().iter()
            .chain(f.graph().succ(beta).unwrap())
            .cloned()
            .collect();
        let er: usize = vz
            .iter()
            .map(|x| f.graph().pred(x).unwrap().len() + f.graph().succ(x).unwrap().len())
            .sum();
        let yp: usize = f.graph().pred(beta).unwrap().iter().map(|x| f.graph().pred(x).unwrap().len()).sum();
        let ys: usize = f.graph().succ(beta).unwrap().iter().map(|x| f.graph().succ(x).unwrap().len()).sum();
        let (blocks0, edges0) = (f.block_count(), f.edge_count());
        let (next, step) = passivize(&z, beta).map_err(|e| e.to_string())?;
        let nf = next.pafg();
        ensure!(next.coord_of(beta) == Ok(Coord::Pssv), "{beta} not pssv");
        ensure!(
            nf.block_count() == blocks0 - vz.len(),
            "{beta}: |V_b| = {} != {} - {}",
            nf.block_count(),
            blocks0,
            vz.len()
        );
        ensure!(
            nf.edge_count() == edges0 - er + yp + ys,
            "{beta}: |E_b| = {} != {edges0} - {er} + {}",
            nf.edge_count(),
            yp + ys
        );
        ensure!(step.removed_edges == er, "{beta}: step reports {} removed edges", step.removed_edges);
        ensure!(is_alternating(&next) && check_abc(&next), "{beta}: not alternating");
        ensure!(check_association(next.source(), nf), "{beta}: association lost");
        removed_all.extend(vz);
        z = next;
    }
    for x in &removed_all {
        ensure!(z.pafg().block(x).is_err(), "{x} still present");
    }
    // L_1 .. L_9 surround J1, J2 and J3
    let mut want: Vec<&String> = labels[..9].iter().collect();
    want.sort();
    let mut got: Vec<&String> = removed_all.iter().collect();
    got.sort();
    ensure!(got == want, "removed {got:?}");
    Ok(format!(
        "Z_1..Z_3 passivized, {} blocks / {} edges left",
        z.pafg().block_count(),
        z.pafg().edge_count()
    ))
}

fn criterion_3() -> Outcome {
    let lib = ActorLibrary::standard();
    let mut worst = 0.0f64;
    for seed in 0..100u64 {
        let mut rng = Lcg::new(seed);
        let count = rng.next_in(1, 3) as usize;
        let cfg = EvmConfig::new(evm::random_windows(&mut rng, count, 1, 4096));
        let inputs = EvmInputs::random(&cfg, &mut rng);
        let g = evm::build_evm_graph(&cfg, &lib).map_err(|e| e.to_string())?;
        let io = evm::io_bindings(&cfg, &inputs).map_err(|e| e.to_string())?;
        let stop = StopCondition::SinkTokens(evm::expected_sink_tokens(&cfg));
        let r = run_direct_and_optimized(g, &lib, &io, stop).map_err(|e| e.to_string())?;
        ensure!(r.comparison.equal, "seed {seed}: {:?}", r.comparison.divergence);
        let oracle = evm::evm_oracle_windows(&cfg, &inputs).map_err(|e| e.to_string())?;
        let got = &r.optimized_streams["SNK"];
        ensure!(got.len() == oracle.len(), "seed {seed}: {} values", got.len());
        for (i, (t, want)) in got.iter().zip(&oracle).enumerate() {
            let y = t.as_f64().ok_or("non-f64 EVM value")?;
            let rel = ((y - want) / want).abs();
            worst = worst.max(rel);
            ensure!(rel <= EVM_REL_TOL, "seed {seed} window {i}: {y} vs {want}");
        }
    }
    Ok(format!("100 input sets bit-identical, worst oracle rel err {worst:e}"))
}

fn criterion_4() -> Outcome {
    let lib = ActorLibrary::standard();
    for (windows, fanout) in [
        (vec![1], 2),
        (vec![2], 2),
        (vec![3, 1], 2),
        (vec![64], 3),
        (vec![1000, 17], 2),
        (vec![4096], 4),
    ] {
        let mut cfg = EvmConfig::new(windows.clone());
        cfg.length_fanout = fanout;
        let g = evm::build_evm_graph(&cfg, &lib).map_err(|e| e.to_string())?;
        let direct = derive_direct_pafg(g, &lib).map_err(|e| e.to_string())?;
        let (opt, _) = passivize_fixpoint(&direct, &PassivizationPolicy::Auto).map_err(|e| e.to_string())?;
        let d = compute_bmr(&direct).unwrap().total_bytes;
        let o = compute_bmr(&opt).unwrap().total_bytes;
        let (od, oo) = common::evm_bmr_oracle(cfg.max_window(), fanout);
        ensure!(o < d, "{windows:?}: optimized {o} >= direct {d}");
        ensure!((d, o) == (od, oo), "{windows:?}: ({d}, {o}) vs oracle ({od}, {oo})");
    }
    let mut ratios = Vec::new();
    for w in STANDARD_WINDOWS {
        let cfg = ForkCascadeConfig::new(w);
        let g = forkcascade::build_fork_cascade(&cfg, &lib).map_err(|e| e.to_string())?;
        let direct = derive_direct_pafg(g, &lib).map_err(|e| e.to_string())?;
        let (opt, _) = passivize_fixpoint(&direct, &PassivizationPolicy::Auto).map_err(|e| e.to_string())?;
        let d = compute_bmr(&direct).unwrap().total_bytes;
        let o = compute_bmr(&opt).unwrap().total_bytes;
        // 25 edges of W tokens; each of 6 forks trades 3 buffers for 1
        ensure!(d == 25 * w as u64 * 8, "W={w}: direct {d}");
        ensure!(d - o == 12 * w as u64 * 8, "W={w}: reduction {}", d - o);
        ratios.push((d - o) as f64 / d as f64);
    }
    let first = ratios[0].to_bits();
    ensure!(ratios.iter().all(|r| r.to_bits() == first), "ratios differ: {ratios:?}");
    ensure!(ratios[0] == 12.0 / 25.0, "ratio {}", ratios[0]);
    Ok(format!("EVM matches oracle; fork-cascade ratio {} at all 5 windows", ratios[0]))
}

fn criterion_5() -> Outcome {
    let lib = ActorLibrary::standard();
    for windows in [vec![1], vec![7, 300], vec![4096]] {
        let cfg = EvmConfig::new(windows.clone());
        let g = evm::build_evm_graph(&cfg, &lib).map_err(|e| e.to_string())?;
        let inputs = EvmInputs::random(&cfg, &mut Lcg::new(11));
        let io = evm::io_bindings(&cfg, &inputs).map_err(|e| e.to_string())?;
        let direct = derive_direct_pafg(g, &lib).map_err(|e| e.to_string())?;
        let (opt, _) = passivize_fixpoint(&direct, &PassivizationPolicy::Auto).map_err(|e| e.to_string())?;
        let prof = evm::token_profile(&cfg);
        let stop = StopCondition::SinkTokens(evm::expected_sink_tokens(&cfg));
        let mut measured = Vec::new();
        for z in [&direct, &opt] {
            let mut inst = instantiate(z, &lib, &io).map_err(|e| e.to_string())?;
            let s = inst.run(stop).map_err(|e| e.to_string())?;
            let est = estimate_copy_count(z, &prof).map_err(|e| e.to_string())?;
            ensure!(s.token_stores == est, "{windows:?}: measured {} vs estimate {est}", s.token_stores);
            measured.push(s.token_stores);
        }
        // stores by hand: per window, SRC1 + FA(2) + EA, RFA, RMS; per sample,
        // 4 sources, RFC 4, RCC 2, E and RFM one each
        let k = windows.len() as u64;
        let n: u64 = windows.iter().map(|&x| x as u64).sum();
        ensure!(measured[0] == 6 * k + 12 * n, "direct stores {}", measured[0]);
        ensure!(measured[1] == 4 * k + 6 * n, "optimized stores {}", measured[1]);
        ensure!(measured[1] < measured[0], "no saving");
    }

    for (w, fanout) in [(16384, 2), (4096, 1), (4096, 3)] {
        let mut cfg = ForkCascadeConfig::new(w);
        cfg.fanout = fanout;
        let g = forkcascade::build_fork_cascade(&cfg, &lib).map_err(|e| e.to_string())?;
        let io = forkcascade::io_bindings(w, &mut Lcg::new(5));
        let stop = StopCondition::SinkTokens((cfg.sink_count() * w) as u64);
        let mut z = derive_direct_pafg(g, &lib).map_err(|e| e.to_string())?;
        let mut prev = None;
        for f in std::iter::once(None).chain(cfg.fork_names().into_iter().map(Some)) {
            if let Some(f) = f {
                z = passivize(&z, &f).map_err(|e| e.to_string())?.0;
            }
            let mut inst = instantiate(&z, &lib, &io).map_err(|e| e.to_string())?;
            let stores = inst.run(stop).map_err(|e| e.to_string())?.token_stores;
            if let Some(p) = prev {
                ensure!(
                    p - stores == (fanout * w) as u64,
                    "W={w} m={fanout}: saving {} per fork",
                    p - stores
                );
            }
            prev = Some(stores);
        }
    }
    Ok("EVM stores equal static estimate; fork saving = m*W".into())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for trial in 0..20 {
        let cap = rng.gen_range(1..=8);
        let readers = rng.gen_range(1..=4);
        let mut ring = MultiReadRingBuffer::<u64>::new(cap, readers).unwrap();
        let mut next = 0u64;
        let mut expect = vec![0u64; readers];
        for op in 0..10_000 {
            if rng.gen_bool(0.5) {
                if ring.free_space() > 0 {
                    ring.write(next).unwrap();
                    next += 1;
                } else {
                    ensure!(ring.write(0).is_err(), "trial {trial} op {op}: write to full ring");
                }
            } else {
                let r = rng.gen_range(0..readers);
                if ring.population(r).unwrap() > 0 {
                    let v = ring.read(r).unwrap();
                    ensure!(v == expect[r], "trial {trial} op {op}: reader {r} got {v}");
                    expect[r] += 1;
                } else {
                    ensure!(ring.read(r).is_err(), "trial {trial} op {op}: read from empty");
                }
            }
            let w = ring.wptr();
            let min = (0..readers).map(|r| ring.rptr(r).unwrap()).min().unwrap();
            ensure!(w == next, "wptr drift");
            ensure!((0..readers).all(|r| ring.rptr(r).unwrap() <= w), "rptr > wptr");
            ensure!(w - min <= cap as u64, "overfull");
            ensure!(ring.free_space() as u64 == cap as u64 - (w - min), "free space");
        }
    }

    let lib = ActorLibrary::standard();
    let stream = |rng: &mut ChaCha8Rng, n: usize| -> Vec<Token> {
        (0..n).map(|_| Token::F64(rng.gen_range(-1.0..1.0))).collect()
    };
    for _ in 0..30 {
        let m = rng.gen_range(1..=4);
        let cap = rng.gen_range(1..=6);
        let n = rng.gen_range(0..50);
        let outs: Vec<String> = (0..m).map(|j| format!("out{j}")).collect();
        let out_refs: Vec<(&str, &str)> = outs.iter().map(|o| ("F", o.as_str())).collect();

        let mut g = ApplicationGraph::new();
        g.add_actor(&lib, ActorDecl::new("F", "fork").param("fanout", m)).unwrap();
        let mut active = ActiveCluster::from_graph(&lib, &g, &[("F", "in")], &out_refs).map_err(|e| e.to_string())?;
        let mut passive = PassiveKernel::passive_fork(cap, m).unwrap();
        let r = check_mapping_equivalence(&mut active, &mut passive, &[stream(&mut rng, n)]).map_err(|e| e.to_string())?;
        ensure!(r.equivalent(), "fork: {:?}", r.divergence);

        let k: f64 = rng.gen_range(-4.0..4.0);
        let mut g = ApplicationGraph::new();
        g.add_actor(&lib, ActorDecl::new("G", "gain").param("k", k)).unwrap();
        g.add_actor(&lib, ActorDecl::new("F", "fork").param("fanout", m)).unwrap();
        g.connect(&lib, "G", "out", "F", "in", cap, TokenType::F64).unwrap();
        let mut active = ActiveCluster::from_graph(&lib, &g, &[("G", "in")], &out_refs).map_err(|e| e.to_string())?;
        let mut passive = PassiveKernel::gain_fork(cap, m, Token::F64(k)).unwrap();
        let r = check_mapping_equivalence(&mut active, &mut passive, &[stream(&mut rng, n)]).map_err(|e| e.to_string())?;
        ensure!(r.equivalent(), "gain-fork: {:?}", r.divergence);

        let mut g = ApplicationGraph::new();
        g.add_actor(&lib, ActorDecl::new("F", "interleave").param("fanout", m)).unwrap();
        let mut active =
            ActiveCluster::from_graph(&lib, &g, &[("F", "re"), ("F", "im")], &out_refs).map_err(|e| e.to_string())?;
        let mut passive = PassiveKernel::interleave(2 * cap, m).unwrap();
        let n_im = rng.gen_range(0..50);
        let (re, im) = (stream(&mut rng, n), stream(&mut rng, n_im));
        let r = check_mapping_equivalence(&mut active, &mut passive, &[re, im]).map_err(|e| e.to_string())?;
        ensure!(r.equivalent(), "interleave: {:?}", r.divergence);
    }
    Ok("20 x 10^4 ring operations; 30 randomized mapping checks per pair".into())
}

fn criterion_7() -> Outcome {
    let lib = ActorLibrary::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut steps = 0;
    for i in 0..500 {
        let g = common::random_graph(&mut rng, &lib, 20);
        let z = derive_direct_pafg(g, &lib).map_err(|e| format!("graph {i}: {e}"))?;
        ensure!(is_alternating(&z) && check_abc(&z), "graph {i}: direct PAFG not alternating");
        ensure!(check_association(z.source(), z.pafg()), "graph {i}: direct PAFG not associated");
        for c in find_candidates(&z) {
            let (p, _) = passivize(&z, &c.block).map_err(|e| format!("graph {i}: {e}"))?;
            ensure!(is_alternating(&p) && check_abc(&p), "graph {i}/{}: alternation lost", c.block);
            ensure!(check_association(p.source(), p.pafg()), "graph {i}/{}: association lost", c.block);
            steps += 1;
        }
        let (fix, _) = passivize_fixpoint(&z, &PassivizationPolicy::Auto).map_err(|e| e.to_string())?;
        let (again, log) = passivize_fixpoint(&fix, &PassivizationPolicy::Auto).map_err(|e| e.to_string())?;
        ensure!(again == fix && log.steps.is_empty(), "graph {i}: fixpoint not idempotent");
        ensure!(is_alternating(&fix) && check_abc(&fix), "graph {i}: fixpoint not alternating");
    }
    Ok(format!("500 graphs, {steps} single passivizations checked"))
}

fn criterion_8() -> Outcome {
    let lib = ActorLibrary::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut runs = 0;
    for i in 0..50 {
        let g = common::random_graph(&mut rng, &lib, 20);
        let io = common::random_inputs(&mut rng, &g);
        let direct = derive_direct_pafg(g, &lib).map_err(|e| e.to_string())?;
        let (opt, _) = passivize_fixpoint(&direct, &PassivizationPolicy::Auto).map_err(|e| e.to_string())?;
        for z in [&direct, &opt] {
            let mut base = instantiate(z, &lib, &io).map_err(|e| e.to_string())?;
            base.run(StopCondition::Quiescence).map_err(|e| format!("graph {i}: {e}"))?;
            let want = base.sink_streams();
            let names: Vec<String> = base.actor_names().iter().map(|s| s.to_string()).collect();
            for _ in 0..4 {
                let mut order: Vec<&str> = names.iter().map(String::as_str).collect();
                order.shuffle(&mut rng);
                let mut inst = instantiate(z, &lib, &io).map_err(|e| e.to_string())?;
                inst.set_order(&order).map_err(|e| e.to_string())?;
                inst.run(StopCondition::Quiescence).map_err(|e| format!("graph {i}: {e}"))?;
                let c = compare_streams(&want, &inst.sink_streams()).map_err(|e| e.to_string())?;
                ensure!(c.equal, "graph {i} order {order:?}: {:?}", c.divergence);
                runs += 1;
            }
        }
    }
    Ok(format!("50 graphs, {runs} permuted runs identical"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("1 construction regression", criterion_1, Duration::from_secs(1)),
        ("2 transformation regression", criterion_2, Duration::from_secs(1)),
        ("3 stream equivalence", criterion_3, Duration::from_secs(60)),
        ("4 BMR reduction", criterion_4, Duration::from_secs(30)),
        ("5 copy-count dominance", criterion_5, Duration::from_secs(30)),
        ("6 kernel properties", criterion_6, Duration::from_secs(30)),
        ("7 IR properties", criterion_7, Duration::from_secs(60)),
        ("8 determinacy", criterion_8, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > limit => Err(format!("{msg}; took {took:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {name} ({took:.2?} / {limit:?}): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} ({took:.2?} / {limit:?}): {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all criteria passed");
        ExitCode::SUCCESS
    }
}
