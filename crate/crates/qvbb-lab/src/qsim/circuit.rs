use super::state::{DensityMatrix, StateVector};
use super::QsimError;
use crate::circuit_ir::{compile_reversible, BooleanCircuit, RevGate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    X(usize),
    Z(usize),
    H(usize),
    Cnot(usize, usize),
    Ccx(usize, usize, usize),
    Measure(usize),
    Init0(usize),
}

impl Op {
    pub fn wires(&self) -> Vec<usize> {
        match *self {
            Op::X(w) | Op::Z(w) | Op::H(w) | Op::Measure(w) | Op::Init0(w) => vec![w],
            Op::Cnot(c, t) => vec![c, t],
            Op::Ccx(a, b, t) => vec![a, b, t],
        }
    }

    /// Ops that a Pauli-key-updating evaluator cannot absorb for free.
    pub fn is_sealed(&self) -> bool {
        matches!(self, Op::H(_) | Op::Ccx(..) | Op::Measure(_))
    }

    pub fn is_unitary(&self) -> bool {
        !matches!(self, Op::Measure(_) | Op::Init0(_))
    }
}

impl From<RevGate> for Op {
    fn from(g: RevGate) -> Op {
        match g {
            RevGate::X(t) => Op::X(t),
            RevGate::Cnot(c, t) => Op::Cnot(c, t),
            RevGate::Ccx(a, b, t) => Op::Ccx(a, b, t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumCircuit {
    n_qubits: usize,
    ops: Vec<Op>,
}

impl QuantumCircuit {
    pub fn new(n_qubits: usize, ops: Vec<Op>) -> Result<QuantumCircuit, QsimError> {
        let mut used = vec![false; n_qubits];
        for (i, op) in ops.iter().enumerate() {
            let ws = op.wires();
            if ws.iter().any(|&w| w >= n_qubits) {
                return Err(QsimError::Structure(format!("op {i} wire out of range")));
            }
            for a in 0..ws.len() {
                if ws[a + 1..].contains(&ws[a]) {
                    return Err(QsimError::Structure(format!("op {i} repeats a wire")));
                }
            }
            if let Op::Init0(w) = op {
                if used[*w] {
                    return Err(QsimError::Structure(format!("op {i} initializes used wire {w}")));
                }
            }
            ws.iter().for_each(|&w| used[w] = true);
        }
        Ok(QuantumCircuit { n_qubits, ops })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }
    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn init_wires(&self) -> Vec<usize> {
        self.ops
            .iter()
            .filter_map(|op| if let Op::Init0(w) = op { Some(*w) } else { None })
            .collect()
    }

    /// Wires fed by the caller: everything not initialized inside.
    pub fn input_wires(&self) -> Vec<usize> {
        let init = self.init_wires();
        (0..self.n_qubits).filter(|w| !init.contains(w)).collect()
    }

    pub fn measure_count(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, Op::Measure(_))).count()
    }

    fn weighted_depth(&self, weight: impl Fn(&Op) -> usize) -> usize {
        let mut t = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for op in &self.ops {
            let ws = op.wires();
            let at = ws.iter().map(|&w| t[w]).max().unwrap_or(0) + weight(op);
            ws.iter().for_each(|&w| t[w] = at);
            depth = depth.max(at);
        }
        depth
    }

    /// Layer depth; `INIT0` is free.
    pub fn depth(&self) -> usize {
        self.weighted_depth(|op| !matches!(op, Op::Init0(_)) as usize)
    }

    /// Longest path counting only `H`, `CCX` and `MEASURE`; this is the
    /// number of levels a homomorphic evaluation of the circuit consumes.
    pub fn sealed_depth(&self) -> usize {
        self.weighted_depth(|op| op.is_sealed() as usize)
    }

    pub fn inverse(&self) -> Result<QuantumCircuit, QsimError> {
        if self.ops.iter().any(|o| !o.is_unitary()) {
            return Err(QsimError::Structure("only unitary circuits invert".into()));
        }
        let mut ops = self.ops.clone();
        ops.reverse();
        Ok(QuantumCircuit { n_qubits: self.n_qubits, ops })
    }

    /// Applies ops to a state already holding every wire.
    pub fn apply_dm(&self, rho: &mut DensityMatrix) {
        for op in &self.ops {
            match *op {
                Op::X(w) => rho.apply_x(w),
                Op::Z(w) => rho.apply_z(w),
                Op::H(w) => rho.apply_h(w),
                Op::Cnot(c, t) => rho.apply_cnot(c, t),
                Op::Ccx(a, b, t) => rho.apply_ccx(a, b, t),
                Op::Measure(w) => rho.dephase(w),
                Op::Init0(_) => {}
            }
        }
    }

    pub fn apply_sv(&self, psi: &mut StateVector) -> Result<(), QsimError> {
        for op in &self.ops {
            match *op {
                Op::X(w) => psi.apply_x(w),
                Op::Z(w) => psi.apply_z(w),
                Op::H(w) => psi.apply_h(w),
                Op::Cnot(c, t) => psi.apply_cnot(c, t),
                Op::Ccx(a, b, t) => psi.apply_ccx(a, b, t),
                Op::Measure(_) => {
                    return Err(QsimError::Structure("measurement on a pure state".into()))
                }
                Op::Init0(_) => {}
            }
        }
        Ok(())
    }

    /// The circuit's channel: `input` holds the non-`INIT0` wires in order.
    pub fn run(&self, input: &DensityMatrix) -> Result<DensityMatrix, QsimError> {
        let inw = self.input_wires();
        if input.n_qubits() != inw.len() {
            return Err(QsimError::Dimension(inw.len(), input.n_qubits()));
        }
        let mut rho = input.embed(self.n_qubits, &inw)?;
        self.apply_dm(&mut rho);
        Ok(rho)
    }
}

/// A measurement-free circuit whose `aux_inputs` must start in `|0>`;
/// `record_wires` receive the CNOT copies of deferred measurements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherentUnitary {
    pub base: QuantumCircuit,
    pub input_wires: Vec<usize>,
    pub record_wires: Vec<usize>,
    pub aux_inputs: Vec<usize>,
}

impl CoherentUnitary {
    pub fn n_qubits(&self) -> usize {
        self.base.n_qubits
    }

    /// `U (input ⊗ |0><0|_aux) U^dagger` on every wire.
    pub fn apply(&self, input: &DensityMatrix) -> Result<DensityMatrix, QsimError> {
        if input.n_qubits() != self.input_wires.len() {
            return Err(QsimError::Dimension(self.input_wires.len(), input.n_qubits()));
        }
        let mut rho = input.embed(self.n_qubits(), &self.input_wires)?;
        self.base.apply_dm(&mut rho);
        Ok(rho)
    }

    /// Apply, then dephase and discard the record wires.
    pub fn channel(&self, input: &DensityMatrix) -> Result<DensityMatrix, QsimError> {
        let mut rho = self.apply(input)?;
        for &w in &self.record_wires {
            rho.dephase(w);
        }
        let keep: Vec<usize> = (0..self.n_qubits()).filter(|w| !self.record_wires.contains(w)).collect();
        rho.partial_trace(&keep)
    }

    pub fn inverse(&self) -> CoherentUnitary {
        CoherentUnitary { base: self.base.inverse().expect("unitary"), ..self.clone() }
    }

    /// Full matrix, column `j` is `U|j>`.
    pub fn matrix(&self) -> Result<Vec<Vec<super::C64>>, QsimError> {
        let n = self.n_qubits();
        if n > super::MAX_DENSITY_QUBITS {
            return Err(QsimError::TooLarge { kind: "unitary matrix", n, limit: super::MAX_DENSITY_QUBITS });
        }
        (0..1usize << n)
            .map(|j| {
                let mut psi = StateVector::basis(n, j)?;
                self.base.apply_sv(&mut psi)?;
                Ok(psi.amplitudes().to_vec())
            })
            .collect()
    }
}

/// Every `MEASURE(w)` becomes `CNOT(w, r)` onto a fresh record wire `r`;
/// `INIT0` wires become `|0>`-initialized auxiliary inputs.
pub fn make_coherent(c: &QuantumCircuit) -> CoherentUnitary {
    let n = c.n_qubits;
    let mut next = n;
    let mut ops = Vec::with_capacity(c.ops.len());
    let mut records = Vec::new();
    for op in &c.ops {
        match *op {
            Op::Measure(w) => {
                ops.push(Op::Cnot(w, next));
                records.push(next);
                next += 1;
            }
            Op::Init0(_) => {}
            other => ops.push(other),
        }
    }
    let mut aux = c.init_wires();
    aux.extend(&records);
    CoherentUnitary {
        base: QuantumCircuit { n_qubits: next, ops },
        input_wires: c.input_wires(),
        record_wires: records,
        aux_inputs: aux,
    }
}

/// `|x>|y> -> |x>|y ⊕ f(x)>` on wires `x = 0..n`, `y = n..n+m`; the
/// reversible compilation of `f` runs on work wires above and is uncomputed.
pub fn oracle_unitary(f: &BooleanCircuit) -> CoherentUnitary {
    let r = compile_reversible(f);
    let (n, m) = (f.n_inputs(), f.n_outputs());
    let map = |w: usize| if w < n { w } else { w + m };
    let mapped: Vec<Op> = r
        .gates
        .iter()
        .map(|g| match *g {
            RevGate::X(t) => Op::X(map(t)),
            RevGate::Cnot(c, t) => Op::Cnot(map(c), map(t)),
            RevGate::Ccx(a, b, t) => Op::Ccx(map(a), map(b), map(t)),
        })
        .collect();
    let mut ops = mapped.clone();
    for (k, &w) in r.output_wires.iter().enumerate() {
        ops.push(Op::Cnot(map(w), n + k));
    }
    ops.extend(mapped.into_iter().rev());
    let total = r.n_wires + m;
    CoherentUnitary {
        base: QuantumCircuit { n_qubits: total, ops },
        input_wires: (0..n + m).collect(),
        record_wires: vec![],
        aux_inputs: (n + m..total).collect(),
    }
}
