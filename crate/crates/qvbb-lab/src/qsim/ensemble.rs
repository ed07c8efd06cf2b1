use super::state::DensityMatrix;
use super::QsimError;
use crate::bits::Bits;
use crate::circuit_ir::RevGate;
use rand::Rng;
use std::collections::HashMap;

/// A classical mixture of computational-basis states: a density matrix that
/// is diagonal in the computational basis, stored sparsely. Wide registers
/// that dense simulation cannot hold live here.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisEnsemble {
    n: usize,
    comps: Vec<(Bits, f64)>,
}

impl BasisEnsemble {
    pub fn pure(bits: Bits) -> BasisEnsemble {
        BasisEnsemble { n: bits.len(), comps: vec![(bits, 1.0)] }
    }

    /// Merges repeated basis states; weights must sum to 1.
    pub fn from_components(parts: Vec<(Bits, f64)>) -> Result<BasisEnsemble, QsimError> {
        let n = parts.first().map(|p| p.0.len()).unwrap_or(0);
        let total: f64 = parts.iter().map(|p| p.1).sum();
        if (total - 1.0).abs() > 1e-9 || parts.iter().any(|p| p.1 < 0.0) {
            return Err(QsimError::InvalidState(format!("weights sum to {total}")));
        }
        let mut index: HashMap<Bits, usize> = HashMap::new();
        let mut comps: Vec<(Bits, f64)> = Vec::new();
        for (b, w) in parts {
            if b.len() != n {
                return Err(QsimError::Dimension(n, b.len()));
            }
            match index.get(&b) {
                Some(&i) => comps[i].1 += w,
                None => {
                    index.insert(b.clone(), comps.len());
                    comps.push((b, w));
                }
            }
        }
        comps.retain(|c| c.1 > 0.0);
        Ok(BasisEnsemble { n, comps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }
    pub fn components(&self) -> &[(Bits, f64)] {
        &self.comps
    }

    /// The single basis state, if the ensemble is pure.
    pub fn as_pure(&self) -> Option<&Bits> {
        (self.comps.len() == 1).then(|| &self.comps[0].0)
    }

    /// Applies a classical reversible map to every component.
    pub fn map(&self, f: impl Fn(&Bits) -> Bits) -> BasisEnsemble {
        let parts = self.comps.iter().map(|(b, w)| (f(b), *w)).collect();
        BasisEnsemble::from_components(parts).expect("weights preserved")
    }

    pub fn apply_gates(&self, gates: &[RevGate]) -> BasisEnsemble {
        self.map(|b| {
            let mut s = b.clone();
            gates.iter().for_each(|g| g.apply(&mut s));
            s
        })
    }

    pub fn tensor(&self, other: &BasisEnsemble) -> BasisEnsemble {
        let mut parts = Vec::with_capacity(self.comps.len() * other.comps.len());
        for (a, wa) in &self.comps {
            for (b, wb) in &other.comps {
                let mut ab = a.clone();
                ab.extend_from_slice(b);
                parts.push((ab, wa * wb));
            }
        }
        BasisEnsemble { n: self.n + other.n, comps: parts }
    }

    /// Distribution of the bits on `wires`.
    pub fn marginal(&self, wires: &[usize]) -> BasisEnsemble {
        let parts = self
            .comps
            .iter()
            .map(|(b, w)| (wires.iter().map(|&i| b[i]).collect(), *w))
            .collect();
        BasisEnsemble::from_components(parts).expect("weights preserved")
    }

    /// Samples the bits on `wires` and conditions the ensemble on them.
    pub fn measure(&self, wires: &[usize], rng: &mut impl Rng) -> (Bits, BasisEnsemble) {
        let marg = self.marginal(wires);
        let outcome = marg.sample(rng);
        let post = self
            .condition(|i| wires.iter().zip(&outcome).all(|(&w, &o)| self.comps[i].0[w] == o))
            .expect("sampled outcome has positive weight");
        (outcome, post)
    }

    /// Keeps the components whose index passes `keep`, renormalized; `None`
    /// if nothing with positive weight is left.
    pub fn condition(&self, keep: impl Fn(usize) -> bool) -> Option<BasisEnsemble> {
        let kept: Vec<(Bits, f64)> = self.comps.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, c)| c.clone()).collect();
        let z: f64 = kept.iter().map(|c| c.1).sum();
        (z > 0.0).then(|| BasisEnsemble { n: self.n, comps: kept.into_iter().map(|(b, w)| (b, w / z)).collect() })
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Bits {
        let mut u: f64 = rng.gen();
        for (b, w) in &self.comps {
            if u < *w {
                return b.clone();
            }
            u -= w;
        }
        self.comps.last().expect("non-empty ensemble").0.clone()
    }

    pub fn probability(&self, bits: &[bool]) -> f64 {
        self.comps.iter().filter(|c| c.0 == bits).map(|c| c.1).sum()
    }

    /// Exact trace distance: total variation of the two diagonals.
    pub fn trace_distance(&self, other: &BasisEnsemble) -> Result<f64, QsimError> {
        if self.n != other.n {
            return Err(QsimError::Dimension(self.n, other.n));
        }
        let mut diff: HashMap<&Bits, f64> = HashMap::new();
        for (b, w) in &self.comps {
            *diff.entry(b).or_default() += w;
        }
        for (b, w) in &other.comps {
            *diff.entry(b).or_default() -= w;
        }
        Ok((0.5 * diff.values().map(|d| d.abs()).sum::<f64>()).clamp(0.0, 1.0))
    }

    pub fn to_density(&self) -> Result<DensityMatrix, QsimError> {
        let d = 1usize << self.n;
        let mut entries = vec![super::C64::new(0.0, 0.0); d * d];
        for (b, w) in &self.comps {
            let i = b.iter().enumerate().fold(0, |a, (k, &x)| a | ((x as usize) << k));
            entries[i * d + i] += w;
        }
        Ok(DensityMatrix::basis(self.n, 0)?.with_entries(entries))
    }
}
