//! Text format for manifold presentations and tensor networks.
//!
//! Both document kinds share the lexical rules: one statement per
//! line, tokens separated by whitespace, `#` starting a comment that
//! runs to the end of the line. The first statement is `level <k>`.
//!
//! Manifold grammar:
//!
//! ```text
//! level <k>
//! component <name> boundary [rep <j>]
//! component <name> surgery
//! link <name> <name> <int>
//! frame <name> <int>
//! ```
//!
//! Linking is symmetric, so `link a b v` and `link b a v` say the same
//! thing; repeating a pair with the same value is accepted and
//! repeating it with a different value is an error. `link a a v` and
//! `frame a v` both set the framing. Unset framings and linking
//! numbers default to 0.
//!
//! Network grammar:
//!
//! ```text
//! level <k>
//! node <name> <kind> [<label>]
//! wire <name>.<port> <name>.<port>
//! open <name>.<port> [<name>.<port> ...]
//! ```
//!
//! Node kinds are `fusion`, `cofusion`, `S`, `Sdag`, `T`, `Tdag`, `X`,
//! `Z`, `P`, `ket <j>`, `bra <j>`, `cup`, and `cap`; only `ket` and
//! `bra` take a label. Wires run from an output port to an input
//! port, every port must be wired or open, and the order of `open`
//! references fixes the site order of the contracted state.
//!
//! [`manifold_text`] and [`network_text`] print canonical documents;
//! parsing a printed document reproduces the original value exactly.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cyclo::Level;
use crate::error::{Error, Result};
use crate::surgery::{ComponentRole, SurgeryPresentation};
use crate::tensornet::{NodeKind, TensorNetwork};

#[derive(Debug, Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

/// Splits the text into statements, dropping comments and blank lines.
/// Columns count characters and start at 1.
fn tokenize(text: &str) -> Vec<Vec<Tok<'_>>> {
    let mut stmts = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let mut toks = Vec::new();
        let mut start: Option<(usize, usize)> = None;
        let mut col = 0;
        for (bi, ch) in body.char_indices() {
            col += 1;
            if ch.is_whitespace() {
                if let Some((sb, sc)) = start.take() {
                    toks.push(Tok {
                        text: &body[sb..bi],
                        line: li + 1,
                        col: sc,
                    });
                }
            } else if start.is_none() {
                start = Some((bi, col));
            }
        }
        if let Some((sb, sc)) = start {
            toks.push(Tok {
                text: &body[sb..],
                line: li + 1,
                col: sc,
            });
        }
        if !toks.is_empty() {
            stmts.push(toks);
        }
    }
    stmts
}

/// The token at `idx`, or a parse error just past the end of the
/// statement naming what was expected.
fn expect_arg<'a, 'b>(stmt: &'b [Tok<'a>], idx: usize, what: &str) -> Result<&'b Tok<'a>> {
    stmt.get(idx).ok_or_else(|| {
        let last = stmt.last().expect("statements are nonempty");
        Error::parse(
            last.line,
            last.col + last.text.chars().count(),
            format!("expected {what}"),
        )
    })
}

fn no_extra(stmt: &[Tok<'_>], len: usize) -> Result<()> {
    match stmt.get(len) {
        Some(t) => Err(Error::parse(
            t.line,
            t.col,
            format!("unexpected token `{}`", t.text),
        )),
        None => Ok(()),
    }
}

fn parse_int(t: &Tok<'_>, what: &str) -> Result<i64> {
    t.text.parse::<i64>().map_err(|_| {
        Error::parse(t.line, t.col, format!("expected {what}, got `{}`", t.text))
    })
}

fn wrap(t: &Tok<'_>, e: Error) -> Error {
    Error::parse(t.line, t.col, e.to_string())
}

/// Parses the mandatory leading `level <k>` statement.
fn parse_level(stmts: &[Vec<Tok<'_>>]) -> Result<Level> {
    let Some(first) = stmts.first() else {
        return Err(Error::parse(1, 1, "empty document"));
    };
    let kw = &first[0];
    if kw.text != "level" {
        return Err(Error::parse(
            kw.line,
            kw.col,
            format!("expected a `level` statement first, got `{}`", kw.text),
        ));
    }
    let v = expect_arg(first, 1, "a level")?;
    let n = parse_int(v, "a level")?;
    no_extra(first, 2)?;
    if n < 0 {
        return Err(Error::parse(
            v.line,
            v.col,
            format!("level must be an odd prime, got {n}"),
        ));
    }
    Level::new(n as u64).map_err(|e| wrap(v, e))
}

fn unordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn check_component<'a, 'b>(
    p: &SurgeryPresentation,
    t: &'b Tok<'a>,
) -> Result<&'b Tok<'a>> {
    if p.names().iter().any(|n| n == t.text) {
        Ok(t)
    } else {
        Err(Error::parse(
            t.line,
            t.col,
            format!("unknown component `{}`", t.text),
        ))
    }
}

/// Records a linking declaration, rejecting a redeclaration of the
/// same (unordered) pair with a different value.
fn record_link(
    seen: &mut HashMap<(String, String), i64>,
    a: &str,
    b: &str,
    value: i64,
    at: &Tok<'_>,
) -> Result<()> {
    match seen.insert(unordered(a, b), value) {
        Some(old) if old != value => Err(Error::parse(
            at.line,
            at.col,
            format!("link {a} {b} redeclared with a different value ({old} vs {value})"),
        )),
        _ => Ok(()),
    }
}

/// Document kind, decided by the statement keywords that appear.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DocKind {
    Manifold,
    Network,
}

/// Guesses the kind from the first discriminating keyword; a document
/// with nothing but a level statement reads as an (empty) manifold.
pub fn sniff(text: &str) -> DocKind {
    for stmt in tokenize(text) {
        match stmt[0].text {
            "component" | "link" | "frame" => return DocKind::Manifold,
            "node" | "wire" | "open" => return DocKind::Network,
            _ => {}
        }
    }
    DocKind::Manifold
}

/// Parses a manifold document into a surgery presentation.
pub fn parse_manifold(text: &str) -> Result<SurgeryPresentation> {
    let stmts = tokenize(text);
    let level = parse_level(&stmts)?;
    let mut p = SurgeryPresentation::new(level);
    let mut seen_links = HashMap::new();
    for stmt in &stmts[1..] {
        let kw = &stmt[0];
        match kw.text {
            "level" => {
                return Err(Error::parse(kw.line, kw.col, "duplicate level statement"));
            }
            "component" => {
                let name = expect_arg(stmt, 1, "a component name")?;
                let role = expect_arg(stmt, 2, "`boundary` or `surgery`")?;
                match role.text {
                    "boundary" => match stmt.get(3) {
                        None => p.add_boundary(name.text).map_err(|e| wrap(name, e))?,
                        Some(t) if t.text == "rep" => {
                            let label = expect_arg(stmt, 4, "a representation label")?;
                            let j = parse_int(label, "a representation label")?;
                            no_extra(stmt, 5)?;
                            p.add_labeled_boundary(name.text, j)
                                .map_err(|e| wrap(if matches!(e, Error::DuplicateName(_)) { name } else { label }, e))?;
                        }
                        Some(t) => {
                            return Err(Error::parse(
                                t.line,
                                t.col,
                                format!("unexpected token `{}`", t.text),
                            ));
                        }
                    },
                    "surgery" => {
                        match stmt.get(3) {
                            Some(t) if t.text == "rep" => {
                                return Err(Error::parse(
                                    t.line,
                                    t.col,
                                    "rep label only on boundary",
                                ));
                            }
                            _ => no_extra(stmt, 3)?,
                        }
                        p.add_surgery(name.text).map_err(|e| wrap(name, e))?;
                    }
                    other => {
                        return Err(Error::parse(
                            role.line,
                            role.col,
                            format!("expected `boundary` or `surgery`, got `{other}`"),
                        ));
                    }
                }
            }
            "link" => {
                let a = expect_arg(stmt, 1, "a component name")?;
                let b = expect_arg(stmt, 2, "a component name")?;
                let v = expect_arg(stmt, 3, "a linking number")?;
                let lk = parse_int(v, "a linking number")?;
                no_extra(stmt, 4)?;
                check_component(&p, a)?;
                check_component(&p, b)?;
                record_link(&mut seen_links, a.text, b.text, lk, v)?;
                p.set_link(a.text, b.text, lk).map_err(|e| wrap(a, e))?;
            }
            "frame" => {
                let name = expect_arg(stmt, 1, "a component name")?;
                let v = expect_arg(stmt, 2, "a framing")?;
                let f = parse_int(v, "a framing")?;
                no_extra(stmt, 3)?;
                check_component(&p, name)?;
                record_link(&mut seen_links, name.text, name.text, f, v)?;
                p.set_framing(name.text, f).map_err(|e| wrap(name, e))?;
            }
            other => {
                return Err(Error::parse(
                    kw.line,
                    kw.col,
                    format!("unknown statement `{other}`"),
                ));
            }
        }
    }
    Ok(p)
}

fn parse_kind(level: Level, stmt: &[Tok<'_>]) -> Result<NodeKind> {
    let kindt = expect_arg(stmt, 2, "a node kind")?;
    let plain = match kindt.text {
        "fusion" => Some(NodeKind::Fusion),
        "cofusion" => Some(NodeKind::Cofusion),
        "S" => Some(NodeKind::S),
        "Sdag" => Some(NodeKind::Sdag),
        "T" => Some(NodeKind::T),
        "Tdag" => Some(NodeKind::Tdag),
        "X" => Some(NodeKind::X),
        "Z" => Some(NodeKind::Z),
        "P" => Some(NodeKind::P),
        "cup" => Some(NodeKind::Cup),
        "cap" => Some(NodeKind::Cap),
        _ => None,
    };
    if let Some(kind) = plain {
        no_extra(stmt, 3)?;
        return Ok(kind);
    }
    if kindt.text != "ket" && kindt.text != "bra" {
        return Err(Error::parse(
            kindt.line,
            kindt.col,
            format!("unknown node kind `{}`", kindt.text),
        ));
    }
    let labelt = expect_arg(stmt, 3, "a basis label")?;
    let j = parse_int(labelt, "a basis label")?;
    no_extra(stmt, 4)?;
    if j < 0 || j >= level.k() as i64 {
        let e = Error::InvalidRep { rep: j, k: level.k() };
        return Err(wrap(labelt, e));
    }
    Ok(if kindt.text == "ket" {
        NodeKind::Ket(j as u64)
    } else {
        NodeKind::Bra(j as u64)
    })
}

/// Attributes a network error to whichever reference token its
/// message names, falling back to the first.
fn wrap_ref(toks: &[&Tok<'_>], e: Error) -> Error {
    let msg = e.to_string();
    let t = toks
        .iter()
        .find(|t| msg.contains(&format!("`{}`", t.text)))
        .unwrap_or(&toks[0]);
    Error::parse(t.line, t.col, msg)
}

/// Parses a network document into a tensor network. The result is
/// validated: every port is wired or open.
pub fn parse_network(text: &str) -> Result<TensorNetwork> {
    let stmts = tokenize(text);
    let level = parse_level(&stmts)?;
    let mut tn = TensorNetwork::new(level);
    let mut decl: HashMap<String, (usize, usize)> = HashMap::new();
    for stmt in &stmts[1..] {
        let kw = &stmt[0];
        match kw.text {
            "level" => {
                return Err(Error::parse(kw.line, kw.col, "duplicate level statement"));
            }
            "node" => {
                let name = expect_arg(stmt, 1, "a node name")?;
                let kind = parse_kind(level, stmt)?;
                tn.add_node(name.text, kind).map_err(|e| wrap(name, e))?;
                decl.insert(name.text.to_string(), (name.line, name.col));
            }
            "wire" => {
                let a = expect_arg(stmt, 1, "an output port reference")?;
                let b = expect_arg(stmt, 2, "an input port reference")?;
                no_extra(stmt, 3)?;
                tn.wire(a.text, b.text).map_err(|e| wrap_ref(&[a, b], e))?;
            }
            "open" => {
                expect_arg(stmt, 1, "a port reference")?;
                for t in &stmt[1..] {
                    tn.open_leg(t.text).map_err(|e| wrap(t, e))?;
                }
            }
            other => {
                return Err(Error::parse(
                    kw.line,
                    kw.col,
                    format!("unknown statement `{other}`"),
                ));
            }
        }
    }
    tn.validate().map_err(|e| {
        let msg = e.to_string();
        let at = decl
            .iter()
            .find(|(name, _)| msg.contains(&format!("`{name}.")))
            .map(|(_, &pos)| pos)
            .unwrap_or((1, 1));
        Error::parse(at.0, at.1, msg)
    })?;
    Ok(tn)
}

/// Prints a presentation in canonical form: components in declaration
/// order, then nonzero framings, then nonzero linking numbers with
/// the earlier-declared component first.
pub fn manifold_text(p: &SurgeryPresentation) -> String {
    let mut out = String::new();
    writeln!(out, "level {}", p.level().k()).unwrap();
    let names = p.names();
    for (i, name) in names.iter().enumerate() {
        match p.role_at(i) {
            ComponentRole::Boundary { rep: None } => {
                writeln!(out, "component {name} boundary").unwrap();
            }
            ComponentRole::Boundary { rep: Some(j) } => {
                writeln!(out, "component {name} boundary rep {j}").unwrap();
            }
            ComponentRole::Surgery => {
                writeln!(out, "component {name} surgery").unwrap();
            }
        }
    }
    for (i, name) in names.iter().enumerate() {
        let f = p.framing_at(i);
        if f != 0 {
            writeln!(out, "frame {name} {f}").unwrap();
        }
    }
    for i in 0..names.len() {
        for j in (i + 1)..names.len() {
            let v = p.linking_at(i, j);
            if v != 0 {
                writeln!(out, "link {} {} {v}", names[i], names[j]).unwrap();
            }
        }
    }
    out
}

/// Prints a network in canonical form: nodes, wires, and open legs in
/// declaration order.
pub fn network_text(tn: &TensorNetwork) -> String {
    let mut out = String::new();
    writeln!(out, "level {}", tn.level().k()).unwrap();
    for (name, kind) in tn.nodes() {
        match kind {
            NodeKind::Ket(j) => writeln!(out, "node {name} ket {j}").unwrap(),
            NodeKind::Bra(j) => writeln!(out, "node {name} bra {j}").unwrap(),
            other => writeln!(out, "node {name} {}", other.keyword()).unwrap(),
        }
    }
    for (a, b) in tn.wires() {
        writeln!(out, "wire {a} {b}").unwrap();
    }
    let open = tn.open_legs();
    if !open.is_empty() {
        writeln!(out, "open {}", open.join(" ")).unwrap();
    }
    out
}
