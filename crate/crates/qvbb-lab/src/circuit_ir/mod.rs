//! Classical circuits: a Boolean netlist IR, its evaluation and depth, the
//! textual netlist format, reversible compilation, and builders for point,
//! zero and compute-and-compare functions.

pub mod builder;
mod functions;
mod reversible;

pub use functions::{build_function, FunctionKind, FunctionSpec};
pub use reversible::{compile_reversible, RevGate, ReversibleCircuit, REVERSIBLE_DEPTH_FACTOR};

use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("input arity: expected {expected} bits, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("netlist line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed circuit: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Xor,
    Not,
    Const0,
    Const1,
    Copy,
}

impl GateKind {
    pub const ALL: [GateKind; 6] = [
        GateKind::And,
        GateKind::Xor,
        GateKind::Not,
        GateKind::Const0,
        GateKind::Const1,
        GateKind::Copy,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::And | GateKind::Xor => 2,
            GateKind::Not | GateKind::Copy => 1,
            GateKind::Const0 | GateKind::Const1 => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Xor => "XOR",
            GateKind::Not => "NOT",
            GateKind::Const0 => "CONST0",
            GateKind::Const1 => "CONST1",
            GateKind::Copy => "COPY",
        }
    }

    fn parse(s: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Evaluates the gate; unused operands are ignored.
    #[inline]
    pub fn apply(self, x: bool, y: bool) -> bool {
        match self {
            GateKind::And => x & y,
            GateKind::Xor => x ^ y,
            GateKind::Not => !x,
            GateKind::Const0 => false,
            GateKind::Const1 => true,
            GateKind::Copy => x,
        }
    }
}

/// One gate. For unary gates `inputs[1]` is unused, for constants both are.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: [usize; 2],
    pub output: usize,
}

impl Gate {
    pub fn new(kind: GateKind, ins: &[usize], output: usize) -> Gate {
        assert_eq!(ins.len(), kind.arity(), "{} takes {} inputs", kind.name(), kind.arity());
        let mut inputs = [0; 2];
        inputs[..ins.len()].copy_from_slice(ins);
        Gate { kind, inputs, output }
    }

    pub fn used_inputs(&self) -> &[usize] {
        &self.inputs[..self.kind.arity()]
    }
}

/// A Boolean circuit over `{AND, XOR, NOT, CONST0, CONST1, COPY}`.
///
/// Wires `0..n_inputs` are the inputs; every gate defines one new wire and
/// reads only wires defined before it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanCircuit {
    n_inputs: usize,
    n_wires: usize,
    gates: Vec<Gate>,
    output_wires: Vec<usize>,
}

impl BooleanCircuit {
    pub fn new(
        n_inputs: usize,
        n_wires: usize,
        gates: Vec<Gate>,
        output_wires: Vec<usize>,
    ) -> Result<BooleanCircuit, CircuitError> {
        let mut defined = vec![false; n_wires];
        if n_inputs > n_wires {
            return Err(CircuitError::Malformed("more inputs than wires".into()));
        }
        defined[..n_inputs].iter_mut().for_each(|d| *d = true);
        for (i, g) in gates.iter().enumerate() {
            for &w in g.used_inputs() {
                if w >= n_wires || !defined[w] {
                    return Err(CircuitError::Malformed(format!(
                        "gate {i} reads undefined wire {w}"
                    )));
                }
            }
            if g.output >= n_wires || defined[g.output] {
                return Err(CircuitError::Malformed(format!(
                    "gate {i} redefines or overruns wire {}",
                    g.output
                )));
            }
            defined[g.output] = true;
        }
        if let Some(&w) = output_wires.iter().find(|&&w| w >= n_wires || !defined[w]) {
            return Err(CircuitError::Malformed(format!("output wire {w} undefined")));
        }
        Ok(BooleanCircuit { n_inputs, n_wires, gates, output_wires })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }
    pub fn n_outputs(&self) -> usize {
        self.output_wires.len()
    }
    pub fn n_wires(&self) -> usize {
        self.n_wires
    }
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
    pub fn output_wires(&self) -> &[usize] {
        &self.output_wires
    }

    /// Values of every wire on input `x`.
    pub fn eval_wires(&self, x: &[bool]) -> Result<Vec<bool>, CircuitError> {
        if x.len() != self.n_inputs {
            return Err(CircuitError::Arity { expected: self.n_inputs, got: x.len() });
        }
        let mut v = vec![false; self.n_wires];
        v[..x.len()].copy_from_slice(x);
        for g in &self.gates {
            v[g.output] = g.kind.apply(v[g.inputs[0]], v[g.inputs[1]]);
        }
        Ok(v)
    }

    pub fn eval(&self, x: &[bool]) -> Result<Vec<bool>, CircuitError> {
        let v = self.eval_wires(x)?;
        Ok(self.output_wires.iter().map(|&w| v[w]).collect())
    }

    /// Gate depth of every wire; inputs sit at 0, constants at 1.
    pub fn wire_depths(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.n_wires];
        for g in &self.gates {
            d[g.output] = 1 + g.used_inputs().iter().map(|&w| d[w]).max().unwrap_or(0);
        }
        d
    }

    /// Longest gate path ending at an output wire.
    pub fn depth(&self) -> usize {
        let d = self.wire_depths();
        self.output_wires.iter().map(|&w| d[w]).max().unwrap_or(0)
    }

    /// Same function with every multiply-read wire fanned out through
    /// private COPY gates, one per reader, emitted right after the wire is
    /// defined. Reversibly compiled, the copies are CNOTs and no Toffoli has
    /// to wait for another one sharing its control.
    pub fn split_fanout(&self) -> BooleanCircuit {
        let mut readers = vec![0usize; self.n_wires];
        for g in &self.gates {
            g.used_inputs().iter().for_each(|&w| readers[w] += 1);
        }
        let mut gates = Vec::new();
        let mut next = self.n_inputs;
        let mut map: Vec<usize> = (0..self.n_wires).collect();
        let mut copies: Vec<Vec<usize>> = vec![Vec::new(); self.n_wires];
        let fan = |w: usize, at: usize, gates: &mut Vec<Gate>, next: &mut usize, copies: &mut Vec<Vec<usize>>| {
            if readers[w] > 1 {
                for _ in 0..readers[w] {
                    gates.push(Gate::new(GateKind::Copy, &[at], *next));
                    copies[w].push(*next);
                    *next += 1;
                }
            }
        };
        for w in 0..self.n_inputs {
            fan(w, w, &mut gates, &mut next, &mut copies);
        }
        for g in &self.gates {
            let ins: Vec<usize> = g
                .used_inputs()
                .iter()
                .map(|&w| copies[w].pop().unwrap_or(map[w]))
                .collect();
            gates.push(Gate::new(g.kind, &ins, next));
            map[g.output] = next;
            next += 1;
            fan(g.output, map[g.output], &mut gates, &mut next, &mut copies);
        }
        let outs = self.output_wires.iter().map(|&w| map[w]).collect();
        BooleanCircuit::new(self.n_inputs, next, gates, outs).expect("fan-out split preserves structure")
    }

    pub fn to_netlist(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "inputs {} outputs {} wires {}",
            self.n_inputs,
            self.n_outputs(),
            self.n_wires
        )
        .unwrap();
        for g in &self.gates {
            s.push_str(g.kind.name());
            for w in g.used_inputs() {
                write!(s, " {w}").unwrap();
            }
            writeln!(s, " {}", g.output).unwrap();
        }
        s.push_str("outwires");
        for w in &self.output_wires {
            write!(s, " {w}").unwrap();
        }
        s.push('\n');
        s
    }

    pub fn from_netlist(text: &str) -> Result<BooleanCircuit, CircuitError> {
        let perr = |line: usize, msg: &str| CircuitError::Parse { line, msg: msg.to_string() };
        let num = |line: usize, t: &str| -> Result<usize, CircuitError> {
            t.parse::<usize>().map_err(|_| perr(line, &format!("bad number {t:?}")))
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| perr(1, "empty netlist"))?;
        let h: Vec<&str> = header.split(' ').collect();
        if h.len() != 6 || h[0] != "inputs" || h[2] != "outputs" || h[4] != "wires" {
            return Err(perr(1, "expected `inputs N outputs M wires W`"));
        }
        let (n_in, n_out, n_wires) = (num(1, h[1])?, num(1, h[3])?, num(1, h[5])?);
        let mut gates = Vec::new();
        let mut outs = None;
        for (i, line) in lines {
            let ln = i + 1;
            if outs.is_some() {
                return Err(perr(ln, "content after outwires"));
            }
            let t: Vec<&str> = line.split(' ').collect();
            if t[0] == "outwires" {
                let ws = t[1..]
                    .iter()
                    .filter(|s| !s.is_empty())
                    .map(|s| num(ln, s))
                    .collect::<Result<Vec<_>, _>>()?;
                outs = Some(ws);
                continue;
            }
            let kind = GateKind::parse(t[0]).ok_or_else(|| perr(ln, "unknown gate"))?;
            if t.len() != kind.arity() + 2 {
                return Err(perr(ln, "wrong operand count"));
            }
            let ins = t[1..t.len() - 1]
                .iter()
                .map(|s| num(ln, s))
                .collect::<Result<Vec<_>, _>>()?;
            gates.push(Gate::new(kind, &ins, num(ln, t[t.len() - 1])?));
        }
        let outs = outs.ok_or_else(|| perr(0, "missing outwires line"))?;
        if outs.len() != n_out {
            return Err(perr(0, "output count disagrees with header"));
        }
        BooleanCircuit::new(n_in, n_wires, gates, outs)
    }
}

#[cfg(test)]
mod tests;

/// A random circuit whose gates read uniformly from already-defined wires;
/// outputs are the last `n_outputs` wires (or inputs when there are no gates).
pub fn random_circuit(
    rng: &mut impl rand::Rng,
    n_inputs: usize,
    n_gates: usize,
    n_outputs: usize,
) -> BooleanCircuit {
    let mut gates = Vec::with_capacity(n_gates);
    for i in 0..n_gates {
        let w = n_inputs + i;
        let kind = if w == 0 {
            [GateKind::Const0, GateKind::Const1][rng.gen_range(0..2)]
        } else {
            GateKind::ALL[rng.gen_range(0..GateKind::ALL.len())]
        };
        let ins: Vec<usize> = (0..kind.arity()).map(|_| rng.gen_range(0..w)).collect();
        gates.push(Gate::new(kind, &ins, w));
    }
    let n_wires = n_inputs + n_gates;
    let outs = (0..n_outputs).map(|k| n_wires - 1 - (k % n_wires.max(1))).collect();
    BooleanCircuit::new(n_inputs, n_wires, gates, outs).unwrap()
}
