//! A laboratory for the impossibility of quantum virtual-black-box obfuscation
//! of classical circuits.
//!
//! The crate builds every ingredient of the attack from scratch at toy scale:
//! a classical circuit IR, dense and sparse quantum simulation, a leveled FHE
//! reference backend with decomposable public keys, garbled circuits, a
//! quantum one-time-pad layer on top of the FHE, compute-and-compare
//! obfuscation, the unobfuscatable circuit families, candidate obfuscators
//! with their public interpreter, the two adversaries, and the black-box
//! baselines that fail where the adversaries succeed.
//!
//! Start with the `examples/` directory; each example drives one capability.

pub mod bits;
pub mod prf;

pub mod circuit_ir;
pub mod qsim;
pub mod fhe_core;
pub mod garbling;
pub mod pk_decompose;
pub mod qfhe;
pub mod cc_obf;
pub mod families;
pub mod candidates;
pub mod attack;
pub mod oracle_sim;
pub mod stats;
pub mod cli;
