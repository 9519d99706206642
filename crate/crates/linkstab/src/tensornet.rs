//! Tensor networks over the node alphabet fusion / cofusion / gates /
//! ket / bra / cup / cap, with exact contraction to a [`DenseState`].
//!
//! Wires always run from an output port to an input port and carry a
//! summed `Z_k` index. Open ports become the sites of the contracted
//! state, in the order they were declared open, with input ports
//! appearing as `Bra` sites and output ports as `Ket` sites.

use crate::cyclo::{CycScalar, Level};
use crate::error::{Error, Result};
use crate::gates::{self, GateMatrix};
use crate::state::DenseState;

/// Node species. `Ket`/`Bra` carry a basis label in `0..k`; `Cup` is
/// the pair `Σ_j |j, -j⟩` and `Cap` its adjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Fusion,
    Cofusion,
    S,
    Sdag,
    T,
    Tdag,
    X,
    Z,
    P,
    Ket(u64),
    Bra(u64),
    Cup,
    Cap,
}

/// Port labels; which of them a node carries is fixed by its kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    In1,
    In2,
    Out,
    Out1,
    Out2,
}

impl Port {
    pub fn name(self) -> &'static str {
        match self {
            Port::In1 => "in1",
            Port::In2 => "in2",
            Port::Out => "out",
            Port::Out1 => "out1",
            Port::Out2 => "out2",
        }
    }

    fn parse(s: &str) -> Option<Port> {
        match s {
            "in1" => Some(Port::In1),
            "in2" => Some(Port::In2),
            "out" => Some(Port::Out),
            "out1" => Some(Port::Out1),
            "out2" => Some(Port::Out2),
            _ => None,
        }
    }
}

impl NodeKind {
    pub fn input_ports(self) -> &'static [Port] {
        match self {
            NodeKind::Fusion | NodeKind::Cap => &[Port::In1, Port::In2],
            NodeKind::Cofusion
            | NodeKind::S
            | NodeKind::Sdag
            | NodeKind::T
            | NodeKind::Tdag
            | NodeKind::X
            | NodeKind::Z
            | NodeKind::P
            | NodeKind::Bra(_) => &[Port::In1],
            NodeKind::Ket(_) | NodeKind::Cup => &[],
        }
    }

    pub fn output_ports(self) -> &'static [Port] {
        match self {
            NodeKind::Fusion
            | NodeKind::S
            | NodeKind::Sdag
            | NodeKind::T
            | NodeKind::Tdag
            | NodeKind::X
            | NodeKind::Z
            | NodeKind::P
            | NodeKind::Ket(_) => &[Port::Out],
            NodeKind::Cofusion | NodeKind::Cup => &[Port::Out1, Port::Out2],
            NodeKind::Bra(_) | NodeKind::Cap => &[],
        }
    }

    /// Grammar keyword for this kind.
    pub fn keyword(self) -> &'static str {
        match self {
            NodeKind::Fusion => "fusion",
            NodeKind::Cofusion => "cofusion",
            NodeKind::S => "S",
            NodeKind::Sdag => "Sdag",
            NodeKind::T => "T",
            NodeKind::Tdag => "Tdag",
            NodeKind::X => "X",
            NodeKind::Z => "Z",
            NodeKind::P => "P",
            NodeKind::Ket(_) => "ket",
            NodeKind::Bra(_) => "bra",
            NodeKind::Cup => "cup",
            NodeKind::Cap => "cap",
        }
    }

    fn matrix(self, level: Level) -> GateMatrix {
        let k = level.k();
        match self {
            NodeKind::Fusion => gates::fusion_tensor(level),
            NodeKind::Cofusion => gates::cofusion_tensor(level),
            NodeKind::S => gates::s_gate(level),
            NodeKind::Sdag => gates::s_gate(level).dagger(),
            NodeKind::T => gates::t_gate(level),
            NodeKind::Tdag => gates::t_gate(level).dagger(),
            NodeKind::X => gates::x_gate(level),
            NodeKind::Z => gates::z_gate(level),
            NodeKind::P => gates::p_gate(level),
            NodeKind::Ket(j) => GateMatrix::from_fn(level, 1, 0, |o, _| {
                if o[0] == j {
                    CycScalar::one(level)
                } else {
                    CycScalar::zero(level)
                }
            }),
            NodeKind::Bra(j) => GateMatrix::from_fn(level, 0, 1, |_, i| {
                if i[0] == j {
                    CycScalar::one(level)
                } else {
                    CycScalar::zero(level)
                }
            }),
            NodeKind::Cup => GateMatrix::from_fn(level, 2, 0, |o, _| {
                if (o[0] + o[1]) % k == 0 {
                    CycScalar::one(level)
                } else {
                    CycScalar::zero(level)
                }
            }),
            NodeKind::Cap => GateMatrix::from_fn(level, 0, 2, |_, i| {
                if (i[0] + i[1]) % k == 0 {
                    CycScalar::one(level)
                } else {
                    CycScalar::zero(level)
                }
            }),
        }
    }
}

#[derive(Debug, Clone)]
struct Node {
    name: String,
    kind: NodeKind,
}

type PortRef = (usize, Port);

/// A directed tensor network; wires run out-port to in-port.
#[derive(Debug, Clone)]
pub struct TensorNetwork {
    level: Level,
    nodes: Vec<Node>,
    wires: Vec<(PortRef, PortRef)>,
    open: Vec<PortRef>,
}

impl TensorNetwork {
    pub fn new(level: Level) -> TensorNetwork {
        TensorNetwork {
            level,
            nodes: Vec::new(),
            wires: Vec::new(),
            open: Vec::new(),
        }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Declared nodes in order, as `(name, kind)` pairs.
    pub fn nodes(&self) -> Vec<(String, NodeKind)> {
        self.nodes
            .iter()
            .map(|n| (n.name.clone(), n.kind))
            .collect()
    }

    /// Wires in declaration order, as `node.port` reference strings.
    pub fn wires(&self) -> Vec<(String, String)> {
        self.wires
            .iter()
            .map(|(a, b)| (self.ref_name(*a), self.ref_name(*b)))
            .collect()
    }

    /// Open legs in declaration order, as `node.port` strings; this is
    /// also the site order of [`TensorNetwork::contract`].
    pub fn open_legs(&self) -> Vec<String> {
        self.open.iter().map(|&r| self.ref_name(r)).collect()
    }

    fn ref_name(&self, r: PortRef) -> String {
        format!("{}.{}", self.nodes[r.0].name, r.1.name())
    }

    pub fn add_node(&mut self, name: &str, kind: NodeKind) -> Result<()> {
        if self.nodes.iter().any(|n| n.name == name) {
            return Err(Error::DuplicateName(name.to_string()));
        }
        match kind {
            NodeKind::Ket(j) | NodeKind::Bra(j) if j >= self.level.k() => {
                return Err(Error::InvalidRep {
                    rep: j as i64,
                    k: self.level.k(),
                });
            }
            _ => {}
        }
        self.nodes.push(Node {
            name: name.to_string(),
            kind,
        });
        Ok(())
    }

    fn parse_ref(&self, s: &str) -> Result<PortRef> {
        let Some((node, port)) = s.split_once('.') else {
            return Err(Error::Network(format!(
                "malformed port reference `{s}` (expected node.port)"
            )));
        };
        let Some(idx) = self.nodes.iter().position(|n| n.name == node) else {
            return Err(Error::Network(format!("unknown node in `{s}`")));
        };
        let kind = self.nodes[idx].kind;
        let Some(p) = Port::parse(port) else {
            return Err(Error::Network(format!("unknown port `{s}`")));
        };
        if !kind.input_ports().contains(&p) && !kind.output_ports().contains(&p) {
            return Err(Error::Network(format!(
                "unknown port `{s}` (a {} node has no such port)",
                kind.keyword()
            )));
        }
        Ok((idx, p))
    }

    fn claim(&mut self, r: PortRef, text: &str) -> Result<()> {
        let taken = self.open.contains(&r)
            || self.wires.iter().any(|(a, b)| *a == r || *b == r);
        if taken {
            return Err(Error::Network(format!("port already wired: `{text}`")));
        }
        Ok(())
    }

    /// Connects an output port to an input port; both given as
    /// `node.port` strings.
    pub fn wire(&mut self, from: &str, to: &str) -> Result<()> {
        let a = self.parse_ref(from)?;
        let b = self.parse_ref(to)?;
        if !self.nodes[a.0].kind.output_ports().contains(&a.1) {
            return Err(Error::Network(format!(
                "`{from}` is not an output port; wires run out to in"
            )));
        }
        if !self.nodes[b.0].kind.input_ports().contains(&b.1) {
            return Err(Error::Network(format!(
                "`{to}` is not an input port; wires run out to in"
            )));
        }
        self.claim(a, from)?;
        self.claim(b, to)?;
        self.wires.push((a, b));
        Ok(())
    }

    /// Declares a port open; declaration order fixes the site order of
    /// the contracted state.
    pub fn open_leg(&mut self, port: &str) -> Result<()> {
        let r = self.parse_ref(port)?;
        self.claim(r, port)?;
        self.open.push(r);
        Ok(())
    }

    /// Checks that every port of every node is either wired or open.
    pub fn validate(&self) -> Result<()> {
        for (i, node) in self.nodes.iter().enumerate() {
            let ports = node
                .kind
                .input_ports()
                .iter()
                .chain(node.kind.output_ports());
            for &p in ports {
                let r = (i, p);
                let used = self.open.contains(&r)
                    || self.wires.iter().any(|(a, b)| *a == r || *b == r);
                if !used {
                    return Err(Error::Network(format!(
                        "unwired port `{}`",
                        self.ref_name(r)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Contracts the network exactly. Nodes are absorbed one at a
    /// time, greedily preferring whichever remaining node closes the
    /// most wires against the partial result, and every wire is summed
    /// as soon as both of its ends are present; the partial state then
    /// never grows far past the open frontier. The value is
    /// independent of the declaration order.
    pub fn contract(&self) -> Result<DenseState> {
        self.validate()?;
        let level = self.level;
        let mut acc = DenseState::new(level, Vec::new(), vec![CycScalar::one(level)])?;
        let mut pending = self.wires.clone();
        let mut remaining: Vec<usize> = (0..self.nodes.len()).collect();
        while !remaining.is_empty() {
            let closable = |&node: &usize| {
                pending
                    .iter()
                    .filter(|(a, b)| {
                        (a.0 == node && acc.site_position(&self.ref_name(*b)).is_ok())
                            || (b.0 == node && acc.site_position(&self.ref_name(*a)).is_ok())
                    })
                    .count()
            };
            let best = remaining
                .iter()
                .enumerate()
                .max_by_key(|(pos, node)| (closable(node), usize::MAX - pos))
                .map(|(pos, _)| pos)
                .expect("nonempty");
            let i = remaining.remove(best);
            let node = &self.nodes[i];
            let g = node.kind.matrix(level);
            let out_names: Vec<String> = node
                .kind
                .output_ports()
                .iter()
                .map(|&p| self.ref_name((i, p)))
                .collect();
            let in_names: Vec<String> = node
                .kind
                .input_ports()
                .iter()
                .map(|&p| self.ref_name((i, p)))
                .collect();
            let outs: Vec<&str> = out_names.iter().map(String::as_str).collect();
            let ins: Vec<&str> = in_names.iter().map(String::as_str).collect();
            acc = acc.tensor_product(&g.as_state(&outs, &ins)?)?;
            loop {
                let hit = pending.iter().position(|(a, b)| {
                    acc.site_position(&self.ref_name(*a)).is_ok()
                        && acc.site_position(&self.ref_name(*b)).is_ok()
                });
                let Some(pos) = hit else { break };
                let (a, b) = pending.remove(pos);
                acc = acc.contract_pair(&self.ref_name(a), &self.ref_name(b))?;
            }
        }
        let order: Vec<String> = self.open_legs();
        let refs: Vec<&str> = order.iter().map(String::as_str).collect();
        acc.permuted(&refs)
    }
}

/// One letter of a Clifford word; site indices are zero-based and the
/// first letter of a word acts first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliffordLetter {
    S(usize),
    P(usize),
    X(usize),
    Z(usize),
    CAdd(usize, usize),
}

/// Builds the operator network of a Clifford word on `n` sites: open
/// output legs for every site first, then open input legs, so the
/// contraction is the word's matrix as a state. Controlled addition is
/// expanded into its defining five-node gadget (a copy vertex on the
/// control feeding a fusion vertex on the target); sites no letter
/// touches pass through a cup/cap bend.
pub fn clifford_word(
    level: Level,
    n: usize,
    word: &[CliffordLetter],
) -> Result<TensorNetwork> {
    word_network(level, n, word, false)
}

/// Contracts the word applied to `|0⟩^⊗n`; sites are renamed `q0..`.
pub fn stabilizer_state_from_word(
    level: Level,
    n: usize,
    word: &[CliffordLetter],
) -> Result<DenseState> {
    let net = word_network(level, n, word, true)?;
    let mut state = net.contract()?;
    let old: Vec<String> = state.sites().iter().map(|s| s.name.clone()).collect();
    for (i, name) in old.iter().enumerate() {
        state = state.renamed(name, &format!("q{i}"))?;
    }
    Ok(state)
}

fn word_network(
    level: Level,
    n: usize,
    word: &[CliffordLetter],
    with_kets: bool,
) -> Result<TensorNetwork> {
    let site = |i: usize| -> Result<usize> {
        if i < n {
            Ok(i)
        } else {
            Err(Error::Network(format!(
                "letter site index {i} out of range for a word on {n} sites"
            )))
        }
    };
    let mut net = TensorNetwork::new(level);
    // frontier[i]: current producing out-port; inputs[i]: the open
    // input port once known (operator networks only).
    let mut frontier: Vec<Option<String>> = vec![None; n];
    let mut inputs: Vec<Option<String>> = vec![None; n];
    if with_kets {
        for (i, f) in frontier.iter_mut().enumerate() {
            net.add_node(&format!("ket{i}"), NodeKind::Ket(0))?;
            *f = Some(format!("ket{i}.out"));
        }
    }
    // Feeds the current frontier of site `i` into input port `inp` of
    // a freshly added node; an untouched site's first consumer becomes
    // its open input.
    let feed = |net: &mut TensorNetwork,
                    frontier: &mut [Option<String>],
                    inputs: &mut [Option<String>],
                    i: usize,
                    inp: &str|
     -> Result<()> {
        match frontier[i].take() {
            Some(src) => net.wire(&src, inp)?,
            None => inputs[i] = Some(inp.to_string()),
        }
        Ok(())
    };
    for (idx, letter) in word.iter().enumerate() {
        match *letter {
            CliffordLetter::S(i) | CliffordLetter::P(i) | CliffordLetter::X(i)
            | CliffordLetter::Z(i) => {
                let i = site(i)?;
                let kind = match letter {
                    CliffordLetter::S(_) => NodeKind::S,
                    CliffordLetter::P(_) => NodeKind::P,
                    CliffordLetter::X(_) => NodeKind::X,
                    _ => NodeKind::Z,
                };
                let g = format!("g{idx}");
                net.add_node(&g, kind)?;
                feed(&mut net, &mut frontier, &mut inputs, i, &format!("{g}.in1"))?;
                frontier[i] = Some(format!("{g}.out"));
            }
            CliffordLetter::CAdd(c, t) => {
                let c = site(c)?;
                let t = site(t)?;
                if c == t {
                    return Err(Error::Network(
                        "controlled addition needs distinct control and target".into(),
                    ));
                }
                let pre = format!("g{idx}pre");
                let split = format!("g{idx}split");
                let keep = format!("g{idx}keep");
                let rot = format!("g{idx}rot");
                let add = format!("g{idx}add");
                net.add_node(&pre, NodeKind::Sdag)?;
                net.add_node(&split, NodeKind::Cofusion)?;
                net.add_node(&keep, NodeKind::S)?;
                net.add_node(&rot, NodeKind::S)?;
                net.add_node(&add, NodeKind::Fusion)?;
                feed(&mut net, &mut frontier, &mut inputs, c, &format!("{pre}.in1"))?;
                net.wire(&format!("{pre}.out"), &format!("{split}.in1"))?;
                net.wire(&format!("{split}.out1"), &format!("{keep}.in1"))?;
                net.wire(&format!("{split}.out2"), &format!("{rot}.in1"))?;
                net.wire(&format!("{rot}.out"), &format!("{add}.in2"))?;
                feed(&mut net, &mut frontier, &mut inputs, t, &format!("{add}.in1"))?;
                frontier[c] = Some(format!("{keep}.out"));
                frontier[t] = Some(format!("{add}.out"));
            }
        }
    }
    for i in 0..n {
        if frontier[i].is_none() {
            // Untouched site of an operator network: bend the line
            // through a cup/cap pair, which contracts to the identity.
            let cup = format!("pass{i}cup");
            let cap = format!("pass{i}cap");
            net.add_node(&cup, NodeKind::Cup)?;
            net.add_node(&cap, NodeKind::Cap)?;
            net.wire(&format!("{cup}.out2"), &format!("{cap}.in1"))?;
            frontier[i] = Some(format!("{cup}.out1"));
            inputs[i] = Some(format!("{cap}.in2"));
        }
    }
    for f in &frontier {
        net.open_leg(f.as_deref().expect("every frontier filled"))?;
    }
    if !with_kets {
        for inp in &inputs {
            net.open_leg(inp.as_deref().expect("operator inputs filled"))?;
        }
    }
    Ok(net)
}
