//! Line-oriented text formats for application graphs, coordinated PAFGs and
//! sample streams.
//!
//! ```text
//! # comment
//! actor A gain k=2.0
//! actor B snk
//! edge A.out -> B.in capacity=16 type=f64
//! block A kind=gain coord=actv from=actor:A
//! block A.out->B.in kind=simple coord=pssv from=edge:A.out->B.in capacity=16
//! bedge A -> A.out->B.in
//! ```
//!
//! A PAFG file is a graph file followed by `block` and `bedge` lines.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::model::{ActorDecl, ActorLibrary, ApplicationGraph, DataflowEdge, EdgeRef, Token, TokenType};
use crate::pafg::{Block, BlockCategory, Coord, CoordinatedPafg, CoordinationFunction, Pafg, Provenance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
    #[error("invalid PAFG: {0}")]
    Invalid(String),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn semantic(line: usize, e: impl std::fmt::Display) -> FormatError {
    FormatError::Semantic {
        line,
        message: e.to_string(),
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn key_values<'a>(line: usize, words: &[&'a str]) -> Result<Vec<(&'a str, &'a str)>, FormatError> {
    words
        .iter()
        .map(|w| {
            w.split_once('=')
                .filter(|(k, _)| !k.is_empty())
                .ok_or_else(|| syntax(line, format!("expected key=value, got `{w}`")))
        })
        .collect()
}

fn parse_value<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T, FormatError> {
    v.parse()
        .map_err(|_| syntax(line, format!("invalid value `{v}` for `{key}`")))
}

fn parse_endpoint(line: usize, s: &str) -> Result<(String, String), FormatError> {
    s.split_once('.')
        .filter(|(a, p)| !a.is_empty() && !p.is_empty())
        .map(|(a, p)| (a.to_string(), p.to_string()))
        .ok_or_else(|| syntax(line, format!("expected <actor>.<port>, got `{s}`")))
}

/// Applies one `actor` or `edge` line; returns `false` for other keywords.
fn graph_line(
    g: &mut ApplicationGraph,
    lib: &ActorLibrary,
    line: usize,
    words: &[&str],
) -> Result<bool, FormatError> {
    match words[0] {
        "actor" => {
            if words.len() < 3 {
                return Err(syntax(line, "expected `actor <name> <kind> [key=value]*`"));
            }
            let mut decl = ActorDecl::new(words[1], words[2]);
            for (k, v) in key_values(line, &words[3..])? {
                if decl.params.insert(k, v).is_some() {
                    return Err(syntax(line, format!("parameter `{k}` given twice")));
                }
            }
            g.add_actor(lib, decl).map_err(|e| semantic(line, e))?;
        }
        "edge" => {
            if words.len() != 6 || words[2] != "->" {
                return Err(syntax(
                    line,
                    "expected `edge <src>.<port> -> <dst>.<port> capacity=<int> type=<f64|i64>`",
                ));
            }
            let (src, sp) = parse_endpoint(line, words[1])?;
            let (snk, tp) = parse_endpoint(line, words[3])?;
            let (mut cap, mut ty) = (None, None);
            for (k, v) in key_values(line, &words[4..])? {
                match k {
                    "capacity" => cap = Some(parse_value::<usize>(line, k, v)?),
                    "type" => ty = Some(parse_value::<TokenType>(line, k, v)?),
                    _ => return Err(syntax(line, format!("unknown edge attribute `{k}`"))),
                }
            }
            let (Some(cap), Some(ty)) = (cap, ty) else {
                return Err(syntax(line, "edge needs capacity= and type="));
            };
            let e = DataflowEdge::new(EdgeRef::new(src, sp, snk, tp), cap, ty);
            g.add_edge(lib, e).map_err(|e| semantic(line, e))?;
        }
        _ => return Ok(false),
    }
    Ok(true)
}

pub fn parse_graph_file(text: &str, lib: &ActorLibrary) -> Result<ApplicationGraph, FormatError> {
    let mut g = ApplicationGraph::new();
    for (line, words) in content_lines(text) {
        if !graph_line(&mut g, lib, line, &words)? {
            return Err(syntax(line, format!("unknown keyword `{}`", words[0])));
        }
    }
    Ok(g)
}

pub fn serialize_graph(g: &ApplicationGraph) -> String {
    let mut out = String::new();
    for a in g.actors() {
        write!(out, "actor {} {}", a.name, a.kind).unwrap();
        for (k, v) in a.params.iter() {
            write!(out, " {k}={v}").unwrap();
        }
        out.push('\n');
    }
    for e in g.edges() {
        let r = &e.endpoints;
        writeln!(
            out,
            "edge {}.{} -> {}.{} capacity={} type={}",
            r.src, r.src_port, r.snk, r.snk_port, e.capacity, e.token_type
        )
        .unwrap();
    }
    out
}

pub fn parse_pafg_file(text: &str, lib: &ActorLibrary) -> Result<CoordinatedPafg, FormatError> {
    let mut g = ApplicationGraph::new();
    let mut blocks = Vec::new();
    let mut bedges = Vec::new();
    for (line, words) in content_lines(text) {
        if graph_line(&mut g, lib, line, &words)? {
            continue;
        }
        match words[0] {
            "block" => blocks.push((line, words)),
            "bedge" => {
                if words.len() != 4 || words[2] != "->" {
                    return Err(syntax(line, "expected `bedge <a> -> <b>`"));
                }
                bedges.push((line, words[1].to_string(), words[3].to_string()));
            }
            w => return Err(syntax(line, format!("unknown keyword `{w}`"))),
        }
    }

    let mut f = Pafg::new();
    let mut coord = CoordinationFunction::new();
    for (line, words) in blocks {
        if words.len() < 2 {
            return Err(syntax(line, "expected `block <name> kind=.. coord=.. from=..`"));
        }
        let (mut kind, mut c, mut from, mut cap) = (None, None, None, None);
        for (k, v) in key_values(line, &words[2..])? {
            match k {
                "kind" => kind = Some(v),
                "coord" => c = Some(parse_value::<Coord>(line, k, v)?),
                "from" => from = Some(parse_value::<Provenance>(line, k, v)?),
                "capacity" => cap = Some(parse_value::<usize>(line, k, v)?),
                _ => return Err(syntax(line, format!("unknown block attribute `{k}`"))),
            }
        }
        let (Some(kind), Some(c), Some(from)) = (kind, c, from) else {
            return Err(syntax(line, "block needs kind=, coord= and from="));
        };
        let category = match &from {
            Provenance::Edge(_) if kind == Block::SIMPLE_KIND => BlockCategory::SimplePassiveBuffer,
            Provenance::Edge(_) => {
                return Err(semantic(line, "edge-derived blocks must have kind=simple"))
            }
            Provenance::Actor(a) => {
                if let Some(decl) = g.actor(a) {
                    if decl.kind != kind {
                        return Err(semantic(
                            line,
                            format!("actor `{a}` has kind `{}`, block says `{kind}`", decl.kind),
                        ));
                    }
                }
                if lib.is_buffer_actor(kind).map_err(|e| semantic(line, e))? {
                    BlockCategory::NonSimpleBuffer
                } else {
                    BlockCategory::Computational
                }
            }
        };
        let b = Block {
            name: words[1].to_string(),
            provenance: from,
            category,
            kind: kind.to_string(),
            capacity: cap,
        };
        coord.set(b.name.clone(), c);
        f.add_block(b).map_err(|e| semantic(line, e))?;
    }
    for (line, a, b) in bedges {
        f.add_edge(&a, &b).map_err(|e| semantic(line, e))?;
    }
    CoordinatedPafg::new(Arc::new(g), f, coord).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn serialize_pafg(z: &CoordinatedPafg) -> String {
    let mut out = serialize_graph(z.source());
    for b in z.pafg().blocks() {
        let c = z.coord_of(&b.name).expect("coordination is total");
        write!(out, "block {} kind={} coord={} from={}", b.name, b.kind, c, b.provenance).unwrap();
        if let Some(cap) = b.capacity {
            write!(out, " capacity={cap}").unwrap();
        }
        out.push('\n');
    }
    for e in z.pafg().graph().edges() {
        writeln!(out, "bedge {} -> {}", e.src, e.snk).unwrap();
    }
    out
}

/// `printf("%.17g", x)`.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{x:.*}", (16 - exp) as usize))
    }
}

/// One token per line: integers for `i64`, `%.17g` for `f64`.
pub fn write_samples(tokens: &[Token]) -> String {
    let mut out = String::new();
    for t in tokens {
        match t {
            Token::F64(x) => out.push_str(&format_g17(*x)),
            Token::I64(n) => write!(out, "{n}").unwrap(),
        }
        out.push('\n');
    }
    out
}

pub fn write_f64_samples(xs: &[f64]) -> String {
    xs.iter().map(|&x| format_g17(x) + "\n").collect()
}

/// Parses one token per non-blank line.
pub fn read_samples(text: &str, ty: TokenType) -> Result<Vec<Token>, FormatError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let l = l.trim();
            let bad = || syntax(i + 1, format!("invalid {ty} sample `{l}`"));
            match ty {
                TokenType::F64 => l.parse::<f64>().map(Token::F64).map_err(|_| bad()),
                TokenType::I64 => l.parse::<i64>().map(Token::I64).map_err(|_| bad()),
            }
        })
        .collect()
}
