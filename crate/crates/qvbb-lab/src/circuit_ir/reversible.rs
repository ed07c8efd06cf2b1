use super::{BooleanCircuit, CircuitError, GateKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RevGate {
    X(usize),
    Cnot(usize, usize),
    Ccx(usize, usize, usize),
}

impl RevGate {
    pub fn target(&self) -> usize {
        match *self {
            RevGate::X(t) | RevGate::Cnot(_, t) | RevGate::Ccx(_, _, t) => t,
        }
    }

    #[inline]
    pub fn apply(&self, s: &mut [bool]) {
        match *self {
            RevGate::X(t) => s[t] ^= true,
            RevGate::Cnot(c, t) => s[t] ^= s[c],
            RevGate::Ccx(a, b, t) => s[t] ^= s[a] & s[b],
        }
    }
}

/// Depth bound of [`compile_reversible`]: each Boolean gate costs at most two
/// reversible layers (XOR and NOT are two gates onto one fresh target).
pub const REVERSIBLE_DEPTH_FACTOR: usize = 2;

/// A circuit over `{X, CNOT, CCX}`. Wires `0..n_inputs` carry the input,
/// `ancilla_wires` start at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReversibleCircuit {
    pub n_wires: usize,
    pub n_inputs: usize,
    pub gates: Vec<RevGate>,
    pub ancilla_wires: Vec<usize>,
    pub output_wires: Vec<usize>,
}

impl ReversibleCircuit {
    pub fn apply(&self, state: &mut [bool]) {
        assert_eq!(state.len(), self.n_wires);
        for g in &self.gates {
            g.apply(state);
        }
    }

    pub fn inverse(&self) -> ReversibleCircuit {
        let mut r = self.clone();
        r.gates.reverse();
        r
    }

    pub fn eval(&self, x: &[bool]) -> Result<Vec<bool>, CircuitError> {
        if x.len() != self.n_inputs {
            return Err(CircuitError::Arity { expected: self.n_inputs, got: x.len() });
        }
        let mut s = vec![false; self.n_wires];
        s[..x.len()].copy_from_slice(x);
        self.apply(&mut s);
        Ok(self.output_wires.iter().map(|&w| s[w]).collect())
    }

    /// Layer count where a layer may share read-only control wires but each
    /// target is touched by one gate.
    pub fn depth(&self) -> usize {
        let mut last_write = vec![0usize; self.n_wires];
        let mut last_read = vec![0usize; self.n_wires];
        let mut depth = 0;
        for g in &self.gates {
            let (ctrl, t): (&[usize], usize) = match g {
                RevGate::X(t) => (&[], *t),
                RevGate::Cnot(c, t) => (std::slice::from_ref(c), *t),
                RevGate::Ccx(a, b, t) => (&[*a, *b][..], *t),
            };
            let start = ctrl
                .iter()
                .map(|&c| last_write[c])
                .chain([last_write[t], last_read[t]])
                .max()
                .unwrap();
            let at = start + 1;
            last_write[t] = at;
            for &c in ctrl {
                last_read[c] = last_read[c].max(at);
            }
            depth = depth.max(at);
        }
        depth
    }
}

/// Toffoli-style compilation: every Boolean wire gets its own reversible
/// wire; gate outputs are computed onto fresh 0-ancillas.
pub fn compile_reversible(c: &BooleanCircuit) -> ReversibleCircuit {
    let mut gates = Vec::with_capacity(c.gates().len() * 2);
    for g in c.gates() {
        let t = g.output;
        let [a, b] = g.inputs;
        match g.kind {
            GateKind::And if a == b => gates.push(RevGate::Cnot(a, t)),
            GateKind::And => gates.push(RevGate::Ccx(a, b, t)),
            GateKind::Xor => {
                gates.push(RevGate::Cnot(a, t));
                gates.push(RevGate::Cnot(b, t));
            }
            GateKind::Not => {
                gates.push(RevGate::Cnot(a, t));
                gates.push(RevGate::X(t));
            }
            GateKind::Const0 => {}
            GateKind::Const1 => gates.push(RevGate::X(t)),
            GateKind::Copy => gates.push(RevGate::Cnot(a, t)),
        }
    }
    ReversibleCircuit {
        n_wires: c.n_wires(),
        n_inputs: c.n_inputs(),
        gates,
        ancilla_wires: (c.n_inputs()..c.n_wires()).collect(),
        output_wires: c.output_wires().to_vec(),
    }
}
