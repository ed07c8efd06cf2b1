//! Incremental circuit construction with constant folding.

use super::{BooleanCircuit, Gate, GateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bit {
    Const(bool),
    Wire(usize),
}

impl Bit {
    pub const ZERO: Bit = Bit::Const(false);
    pub const ONE: Bit = Bit::Const(true);
}

#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    n_inputs: usize,
    next: usize,
    gates: Vec<Gate>,
    consts: [Option<usize>; 2],
}

impl CircuitBuilder {
    pub fn new(n_inputs: usize) -> CircuitBuilder {
        CircuitBuilder { n_inputs, next: n_inputs, gates: Vec::new(), consts: [None, None] }
    }

    /// Emits the two CONST gates first, so constant outputs of the finished
    /// circuit use wires whose position does not depend on later gates.
    pub fn with_leading_consts(n_inputs: usize) -> CircuitBuilder {
        let mut b = CircuitBuilder::new(n_inputs);
        b.consts = [Some(b.emit(GateKind::Const0, &[])), Some(b.emit(GateKind::Const1, &[]))];
        b
    }

    pub fn inputs(&self) -> Vec<Bit> {
        (0..self.n_inputs).map(Bit::Wire).collect()
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Emits a gate unconditionally and returns its wire.
    pub fn emit(&mut self, kind: GateKind, ins: &[usize]) -> usize {
        let w = self.next;
        self.next += 1;
        self.gates.push(Gate::new(kind, ins, w));
        w
    }

    pub fn and(&mut self, x: Bit, y: Bit) -> Bit {
        match (x, y) {
            (Bit::Const(false), _) | (_, Bit::Const(false)) => Bit::ZERO,
            (Bit::Const(true), o) | (o, Bit::Const(true)) => o,
            (Bit::Wire(a), Bit::Wire(b)) if a == b => x,
            (Bit::Wire(a), Bit::Wire(b)) => Bit::Wire(self.emit(GateKind::And, &[a, b])),
        }
    }

    pub fn xor(&mut self, x: Bit, y: Bit) -> Bit {
        match (x, y) {
            (Bit::Const(a), Bit::Const(b)) => Bit::Const(a ^ b),
            (Bit::Const(false), o) | (o, Bit::Const(false)) => o,
            (Bit::Const(true), o) | (o, Bit::Const(true)) => self.not(o),
            (Bit::Wire(a), Bit::Wire(b)) if a == b => Bit::ZERO,
            (Bit::Wire(a), Bit::Wire(b)) => Bit::Wire(self.emit(GateKind::Xor, &[a, b])),
        }
    }

    pub fn not(&mut self, x: Bit) -> Bit {
        match x {
            Bit::Const(a) => Bit::Const(!a),
            Bit::Wire(a) => Bit::Wire(self.emit(GateKind::Not, &[a])),
        }
    }

    pub fn or(&mut self, x: Bit, y: Bit) -> Bit {
        let a = self.xor(x, y);
        let b = self.and(x, y);
        self.xor(a, b)
    }

    /// `s ? y : x`
    pub fn mux(&mut self, s: Bit, x: Bit, y: Bit) -> Bit {
        let d = self.xor(x, y);
        let t = self.and(s, d);
        self.xor(x, t)
    }

    /// Balanced AND tree.
    pub fn and_all(&mut self, xs: &[Bit]) -> Bit {
        self.tree(xs, Bit::ONE, |b, x, y| b.and(x, y))
    }

    /// Balanced XOR tree.
    pub fn xor_all(&mut self, xs: &[Bit]) -> Bit {
        self.tree(xs, Bit::ZERO, |b, x, y| b.xor(x, y))
    }

    fn tree(
        &mut self,
        xs: &[Bit],
        unit: Bit,
        op: impl Fn(&mut Self, Bit, Bit) -> Bit + Copy,
    ) -> Bit {
        let mut layer: Vec<Bit> = xs.to_vec();
        if layer.is_empty() {
            return unit;
        }
        while layer.len() > 1 {
            layer = layer
                .chunks(2)
                .map(|p| if p.len() == 2 { op(self, p[0], p[1]) } else { p[0] })
                .collect();
        }
        layer[0]
    }

    /// 1 iff `xs` equals the constant pattern `target`.
    pub fn eq_const(&mut self, xs: &[Bit], target: &[bool]) -> Bit {
        assert_eq!(xs.len(), target.len());
        let lits: Vec<Bit> = xs
            .iter()
            .zip(target)
            .map(|(&x, &t)| if t { x } else { self.not(x) })
            .collect();
        self.and_all(&lits)
    }

    /// Finalizes; constant outputs are materialized by shared CONST gates.
    pub fn finish(mut self, outputs: &[Bit]) -> BooleanCircuit {
        let mut consts = self.consts;
        let mut ow = Vec::with_capacity(outputs.len());
        for &o in outputs {
            let w = match o {
                Bit::Wire(w) => w,
                Bit::Const(v) => match consts[v as usize] {
                    Some(w) => w,
                    None => {
                        let k = if v { GateKind::Const1 } else { GateKind::Const0 };
                        let w = self.emit(k, &[]);
                        consts[v as usize] = Some(w);
                        w
                    }
                },
            };
            ow.push(w);
        }
        BooleanCircuit::new(self.n_inputs, self.next, self.gates, ow)
            .expect("builder emits well-formed circuits")
    }
}

impl CircuitBuilder {
    /// Replays `c` on the given input bits and returns its output bits.
    pub fn append(&mut self, c: &BooleanCircuit, inputs: &[Bit]) -> Vec<Bit> {
        assert_eq!(inputs.len(), c.n_inputs());
        let mut map = vec![Bit::ZERO; c.n_wires()];
        map[..inputs.len()].copy_from_slice(inputs);
        for g in c.gates() {
            let (x, y) = (map[g.inputs[0]], map[g.inputs[1]]);
            map[g.output] = match g.kind {
                GateKind::And => self.and(x, y),
                GateKind::Xor => self.xor(x, y),
                GateKind::Not => self.not(x),
                GateKind::Const0 => Bit::ZERO,
                GateKind::Const1 => Bit::ONE,
                GateKind::Copy => x,
            };
        }
        c.output_wires().iter().map(|&w| map[w]).collect()
    }
}
