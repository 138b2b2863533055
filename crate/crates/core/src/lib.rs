//! Cirquents of propositional independence-friendly logic: syntax,
//! metaselection semantics, a deep-inference calculus with a proof
//! checker, and a decision procedure that emits proofs or countermodels.

pub mod calculus;
pub mod cirquent;
pub mod cli;
pub mod prover;
pub mod semantics;
pub mod syntax;

pub use calculus::{check_proof, ProofScript, RuleApp, RuleKind};
pub use cirquent::{Cirquent, ClusterId, Dir, Path};
pub use prover::{decide, prove, reduce_to_classical, Decision};
pub use semantics::{true_under, valid, Interpretation, Limits, Metaselection, Side};
pub use syntax::{parse, print};
