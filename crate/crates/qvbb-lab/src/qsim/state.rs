use super::{QsimError, MAX_DENSITY_QUBITS, MAX_STATEVECTOR_QUBITS, PSD_FLOOR};
use num_complex::Complex64;
use rand::Rng;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub(crate) fn h_matrix() -> [[C64; 2]; 2] {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[s, s], [s, -s]]
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn basis(n: usize, index: usize) -> Result<StateVector, QsimError> {
        if n > MAX_STATEVECTOR_QUBITS {
            return Err(QsimError::TooLarge { kind: "statevector", n, limit: MAX_STATEVECTOR_QUBITS });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(StateVector { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<StateVector, QsimError> {
        if n > MAX_STATEVECTOR_QUBITS {
            return Err(QsimError::TooLarge { kind: "statevector", n, limit: MAX_STATEVECTOR_QUBITS });
        }
        if amps.len() != 1 << n {
            return Err(QsimError::InvalidState("amplitude count".into()));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(QsimError::InvalidState(format!("norm {norm}")));
        }
        Ok(StateVector { n, amps })
    }

    /// Normalized complex Gaussian vector, i.e. a Haar-random pure state.
    pub fn random(n: usize, rng: &mut impl Rng) -> StateVector {
        let mut amps: Vec<C64> = (0..1usize << n)
            .map(|_| C64::new(gaussian(rng), gaussian(rng)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector { n, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }
    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn apply_x(&mut self, w: usize) {
        self.permute(|i| i ^ (1 << w));
    }

    pub fn apply_z(&mut self, w: usize) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i >> w) & 1 == 1 {
                *a = -*a;
            }
        }
    }

    pub fn apply_h(&mut self, w: usize) {
        self.apply_1q(w, h_matrix());
    }

    pub fn apply_cnot(&mut self, c: usize, t: usize) {
        self.permute(|i| if (i >> c) & 1 == 1 { i ^ (1 << t) } else { i });
    }

    pub fn apply_ccx(&mut self, a: usize, b: usize, t: usize) {
        self.permute(|i| if (i >> a) & (i >> b) & 1 == 1 { i ^ (1 << t) } else { i });
    }

    /// Applies the involutive basis permutation `f`.
    pub fn permute(&mut self, f: impl Fn(usize) -> usize) {
        for i in 0..self.amps.len() {
            let j = f(i);
            if j > i {
                self.amps.swap(i, j);
            }
        }
    }

    pub fn apply_1q(&mut self, w: usize, u: [[C64; 2]; 2]) {
        let bit = 1 << w;
        for i0 in 0..self.amps.len() {
            if i0 & bit == 0 {
                let i1 = i0 | bit;
                let (a, b) = (self.amps[i0], self.amps[i1]);
                self.amps[i0] = u[0][0] * a + u[0][1] * b;
                self.amps[i1] = u[1][0] * a + u[1][1] * b;
            }
        }
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn to_density(&self) -> Result<DensityMatrix, QsimError> {
        DensityMatrix::from_pure(self)
    }

    /// Little-endian dump: per amplitude, real then imaginary `f64`.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.amps.len() * 16);
        for a in &self.amps {
            out.extend_from_slice(&a.re.to_le_bytes());
            out.extend_from_slice(&a.im.to_le_bytes());
        }
        out
    }
}

/// Dense density matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    m: Vec<C64>,
}

impl DensityMatrix {
    fn check(n: usize) -> Result<(), QsimError> {
        if n > MAX_DENSITY_QUBITS {
            return Err(QsimError::TooLarge { kind: "density matrix", n, limit: MAX_DENSITY_QUBITS });
        }
        Ok(())
    }

    pub fn basis(n: usize, index: usize) -> Result<DensityMatrix, QsimError> {
        Self::check(n)?;
        let d = 1 << n;
        let mut m = vec![ZERO; d * d];
        m[index * d + index] = ONE;
        Ok(DensityMatrix { n, m })
    }

    pub fn from_bits(bits: &[bool]) -> Result<DensityMatrix, QsimError> {
        let idx = bits.iter().enumerate().fold(0, |a, (k, &b)| a | ((b as usize) << k));
        Self::basis(bits.len(), idx)
    }

    pub fn maximally_mixed(n: usize) -> Result<DensityMatrix, QsimError> {
        Self::check(n)?;
        let d = 1 << n;
        let mut m = vec![ZERO; d * d];
        for i in 0..d {
            m[i * d + i] = C64::new(1.0 / d as f64, 0.0);
        }
        Ok(DensityMatrix { n, m })
    }

    pub fn from_pure(psi: &StateVector) -> Result<DensityMatrix, QsimError> {
        Self::check(psi.n)?;
        let d = 1 << psi.n;
        let mut m = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = psi.amps[i] * psi.amps[j].conj();
            }
        }
        Ok(DensityMatrix { n: psi.n, m })
    }

    /// Convex combination of pure states.
    pub fn mixture(parts: &[(f64, StateVector)]) -> Result<DensityMatrix, QsimError> {
        let n = parts.first().map(|p| p.1.n).unwrap_or(0);
        Self::check(n)?;
        let d = 1 << n;
        let mut m = vec![ZERO; d * d];
        for (w, psi) in parts {
            if psi.n != n {
                return Err(QsimError::Dimension(n, psi.n));
            }
            for i in 0..d {
                for j in 0..d {
                    m[i * d + j] += psi.amps[i] * psi.amps[j].conj() * *w;
                }
            }
        }
        Ok(DensityMatrix { n, m })
    }

    /// Random mixed state of rank `rank`.
    pub fn random(n: usize, rank: usize, rng: &mut impl Rng) -> Result<DensityMatrix, QsimError> {
        let ws: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = ws.iter().sum();
        let parts: Vec<(f64, StateVector)> =
            ws.iter().map(|w| (w / total, StateVector::random(n, rng))).collect();
        Self::mixture(&parts)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }
    pub fn dim(&self) -> usize {
        1 << self.n
    }
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[i * self.dim() + j]
    }
    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    pub fn apply_x(&mut self, w: usize) {
        self.permute(|i| i ^ (1 << w));
    }
    pub fn apply_cnot(&mut self, c: usize, t: usize) {
        self.permute(|i| if (i >> c) & 1 == 1 { i ^ (1 << t) } else { i });
    }
    pub fn apply_ccx(&mut self, a: usize, b: usize, t: usize) {
        self.permute(|i| if (i >> a) & (i >> b) & 1 == 1 { i ^ (1 << t) } else { i });
    }

    pub fn apply_z(&mut self, w: usize) {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if ((i >> w) ^ (j >> w)) & 1 == 1 {
                    self.m[i * d + j] = -self.m[i * d + j];
                }
            }
        }
    }

    pub fn apply_h(&mut self, w: usize) {
        self.apply_1q(w, h_matrix());
    }

    /// `rho -> P rho P^T` for an involutive basis permutation `P`.
    pub fn permute(&mut self, f: impl Fn(usize) -> usize) {
        let d = self.dim();
        let perm: Vec<usize> = (0..d).map(f).collect();
        let mut out = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                out[perm[i] * d + perm[j]] = self.m[i * d + j];
            }
        }
        self.m = out;
    }

    /// `rho -> U rho U^dagger` for a single-qubit `U` on wire `w`.
    pub fn apply_1q(&mut self, w: usize, u: [[C64; 2]; 2]) {
        let d = self.dim();
        let bit = 1 << w;
        for j in 0..d {
            for i0 in (0..d).filter(|i| i & bit == 0) {
                let i1 = i0 | bit;
                let (a, b) = (self.m[i0 * d + j], self.m[i1 * d + j]);
                self.m[i0 * d + j] = u[0][0] * a + u[0][1] * b;
                self.m[i1 * d + j] = u[1][0] * a + u[1][1] * b;
            }
        }
        for i in 0..d {
            for j0 in (0..d).filter(|j| j & bit == 0) {
                let j1 = j0 | bit;
                let (a, b) = (self.m[i * d + j0], self.m[i * d + j1]);
                self.m[i * d + j0] = a * u[0][0].conj() + b * u[0][1].conj();
                self.m[i * d + j1] = a * u[1][0].conj() + b * u[1][1].conj();
            }
        }
    }

    /// Non-selective computational-basis measurement of wire `w`.
    pub fn dephase(&mut self, w: usize) {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if ((i >> w) ^ (j >> w)) & 1 == 1 {
                    self.m[i * d + j] = ZERO;
                }
            }
        }
    }

    /// Reduced state on `keep` (new qubit `k` is old qubit `keep[k]`).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix, QsimError> {
        let traced: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let nk = keep.len();
        let dk = 1usize << nk;
        let scatter = |small: usize, qs: &[usize]| {
            qs.iter().enumerate().fold(0usize, |acc, (k, &q)| acc | (((small >> k) & 1) << q))
        };
        let d = self.dim();
        let mut out = vec![ZERO; dk * dk];
        for e in 0..1usize << traced.len() {
            let base = scatter(e, &traced);
            for a in 0..dk {
                let ia = base | scatter(a, keep);
                for b in 0..dk {
                    let ib = base | scatter(b, keep);
                    out[a * dk + b] += self.m[ia * d + ib];
                }
            }
        }
        Ok(DensityMatrix { n: nk, m: out })
    }

    /// Embeds this state into `total` qubits, qubit `k` on wire
    /// `positions[k]`, every other wire in `|0>`.
    pub fn embed(&self, total: usize, positions: &[usize]) -> Result<DensityMatrix, QsimError> {
        Self::check(total)?;
        assert_eq!(positions.len(), self.n);
        let scatter = |small: usize| {
            positions.iter().enumerate().fold(0usize, |acc, (k, &q)| acc | (((small >> k) & 1) << q))
        };
        let d = 1usize << total;
        let mut out = vec![ZERO; d * d];
        let ds = self.dim();
        for a in 0..ds {
            for b in 0..ds {
                out[scatter(a) * d + scatter(b)] = self.m[a * ds + b];
            }
        }
        Ok(DensityMatrix { n: total, m: out })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix, QsimError> {
        let n = self.n + other.n;
        Self::check(n)?;
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        let mut out = vec![ZERO; d * d];
        // self occupies the low qubits
        for ia in 0..da {
            for ja in 0..da {
                let x = self.m[ia * da + ja];
                if x == ZERO {
                    continue;
                }
                for ib in 0..db {
                    for jb in 0..db {
                        out[(ib * da + ia) * d + (jb * da + ja)] = x * other.m[ib * db + jb];
                    }
                }
            }
        }
        Ok(DensityMatrix { n, m: out })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim();
        let mat = nalgebra::DMatrix::from_row_slice(d, d, &self.m);
        mat.symmetric_eigenvalues().iter().copied().collect()
    }

    /// Checks Hermiticity, unit trace and the PSD floor.
    pub fn validate(&self) -> Result<(), QsimError> {
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                if (self.m[i * d + j] - self.m[j * d + i].conj()).norm() > 1e-9 {
                    return Err(QsimError::InvalidState("not Hermitian".into()));
                }
            }
        }
        if (self.trace() - ONE).norm() > 1e-9 {
            return Err(QsimError::InvalidState(format!("trace {}", self.trace())));
        }
        if let Some(e) = self.eigenvalues().into_iter().find(|&e| e < PSD_FLOOR) {
            return Err(QsimError::InvalidState(format!("negative eigenvalue {e}")));
        }
        Ok(())
    }

    pub(crate) fn raw(&self) -> &[C64] {
        &self.m
    }
}

/// `1/2 * sum |eig(rho - sigma)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, QsimError> {
    if rho.n != sigma.n {
        return Err(QsimError::Dimension(rho.n, sigma.n));
    }
    let diff: Vec<C64> = rho.m.iter().zip(&sigma.m).map(|(a, b)| a - b).collect();
    let d = rho.dim();
    let mat = nalgebra::DMatrix::from_row_slice(d, d, &diff);
    let s: f64 = mat.symmetric_eigenvalues().iter().map(|e| e.abs()).sum();
    Ok((0.5 * s).clamp(0.0, 1.0))
}

impl DensityMatrix {
    pub(crate) fn with_entries(mut self, m: Vec<C64>) -> DensityMatrix {
        assert_eq!(m.len(), self.m.len());
        self.m = m;
        self
    }
}
