use super::builder::{Bit, CircuitBuilder};
use super::BooleanCircuit;
use crate::bits::Bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionKind {
    Point,
    MultibitPoint,
    Zero,
    Cc,
    MultibitCc,
}

/// A point, zero or compute-and-compare function over `input_len` bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSpec {
    pub kind: FunctionKind,
    pub input_len: usize,
    pub target: Bits,
    pub payload: Bits,
    pub inner: Option<BooleanCircuit>,
}

impl FunctionSpec {
    pub fn point(y: &[bool]) -> FunctionSpec {
        FunctionSpec {
            kind: FunctionKind::Point,
            input_len: y.len(),
            target: y.to_vec(),
            payload: vec![],
            inner: None,
        }
    }

    pub fn multibit_point(y: &[bool], z: &[bool]) -> FunctionSpec {
        FunctionSpec {
            kind: FunctionKind::MultibitPoint,
            input_len: y.len(),
            target: y.to_vec(),
            payload: z.to_vec(),
            inner: None,
        }
    }

    /// The all-zero function on `n` bits, with `n` output bits.
    pub fn zero(n: usize) -> FunctionSpec {
        FunctionSpec {
            kind: FunctionKind::Zero,
            input_len: n,
            target: vec![],
            payload: vec![false; n],
            inner: None,
        }
    }

    pub fn cc(f: BooleanCircuit, y: &[bool]) -> FunctionSpec {
        assert_eq!(f.n_outputs(), y.len(), "target length must match f's output");
        FunctionSpec {
            kind: FunctionKind::Cc,
            input_len: f.n_inputs(),
            target: y.to_vec(),
            payload: vec![],
            inner: Some(f),
        }
    }

    pub fn multibit_cc(f: BooleanCircuit, y: &[bool], z: &[bool]) -> FunctionSpec {
        assert_eq!(f.n_outputs(), y.len(), "target length must match f's output");
        FunctionSpec {
            kind: FunctionKind::MultibitCc,
            input_len: f.n_inputs(),
            target: y.to_vec(),
            payload: z.to_vec(),
            inner: Some(f),
        }
    }

    /// Direct evaluation, independent of any circuit.
    pub fn evaluate(&self, x: &[bool]) -> Bits {
        let hit = match self.kind {
            FunctionKind::Point | FunctionKind::MultibitPoint => x == self.target.as_slice(),
            FunctionKind::Zero => false,
            FunctionKind::Cc | FunctionKind::MultibitCc => {
                self.inner.as_ref().unwrap().eval(x).unwrap() == self.target
            }
        };
        match self.kind {
            FunctionKind::Point | FunctionKind::Cc => vec![hit],
            _ => self.payload.iter().map(|&z| z && hit).collect(),
        }
    }
}

pub fn build_function(spec: &FunctionSpec) -> BooleanCircuit {
    let mut b = CircuitBuilder::new(spec.input_len);
    let x = b.inputs();
    let hit = match spec.kind {
        FunctionKind::Point | FunctionKind::MultibitPoint => b.eq_const(&x, &spec.target),
        FunctionKind::Zero => Bit::ZERO,
        FunctionKind::Cc | FunctionKind::MultibitCc => {
            let fx = b.append(spec.inner.as_ref().unwrap(), &x);
            b.eq_const(&fx, &spec.target)
        }
    };
    let outs: Vec<Bit> = match spec.kind {
        FunctionKind::Point | FunctionKind::Cc => vec![hit],
        _ => spec.payload.iter().map(|&z| if z { hit } else { Bit::ZERO }).collect(),
    };
    b.finish(&outs)
}
