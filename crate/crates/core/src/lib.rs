//! Exact-arithmetic construction and verification of the quantum-group
//! objects attached to the SU(n) WZNW chiral model: R-matrices, deformed
//! epsilon tensors and antisymmetrizers, the zero-mode exchange algebra,
//! and the renormalized monodromy matrices with their quantum
//! determinant factorization identities.
//!
//! Everything is computed over an exact coefficient field (cyclotomic or
//! rational-function), so every check is a zero-tolerance identity test.

pub mod epsilon;
pub mod field;
pub mod frt;
pub mod monodromy;
pub mod report;
pub mod rmatrix;
pub mod suites;
pub mod tensor;
pub mod weight;
pub mod zeromodes;

/// Deliberate convention corruptions used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Corruption {
    /// No corruption (normal operation).
    None,
    /// Perturb one entry of the braid R-matrix by 1.
    PerturbRhat,
    /// Omit the q^{1/n} prefactor when forming the Hecke combination.
    DropRhatPrefactor,
    /// Omit the q^{-n(n-1)/4} normalization of the epsilon tensors.
    DropEpsPrefactor,
    /// Omit the q^{1/n - n} prefactor of the monodromy matrix M.
    DropMPrefactor,
    /// Omit the q^{1 - 1/n} entry factor of the diagonal monodromy M_p.
    DropMpPrefactor,
}

impl std::fmt::Display for Corruption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Corruption::None => "none",
            Corruption::PerturbRhat => "perturb-rhat",
            Corruption::DropRhatPrefactor => "drop-rhat-prefactor",
            Corruption::DropEpsPrefactor => "drop-eps-prefactor",
            Corruption::DropMPrefactor => "drop-m-prefactor",
            Corruption::DropMpPrefactor => "drop-mp-prefactor",
        };
        write!(f, "{s}")
    }
}
