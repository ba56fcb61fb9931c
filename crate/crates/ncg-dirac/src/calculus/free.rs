//! Free-module backend: Ω¹ free over A with a central basis s¹,…,sᵏ.
//!
//! Basis conventions (nA = dim A, basis-form-major, algebra index fastest):
//!   Ω¹        e_a sⁱ           index i·nA + a
//!   Ω¹⊗Ω¹     e_a sⁱ⊗sʲ        index (i·k + j)·nA + a
//!   Ω¹⊗Ω¹⊗Ω¹  e_a sⁱ⊗sʲ⊗sˡ     index ((i·k + j)·k + l)·nA + a
//!
//! Centrality `a·sⁱ = sⁱ·a` lets every coefficient be pulled to the far
//! left, so these bases are honest ℂ-bases of the tensor powers over A.

use crate::linalg::{CMat, CVec};

#[derive(Debug, Clone)]
pub struct FreeData {
    pub k: usize,
    pub labels: Vec<String>,
    /// θ = Σᵢ theta_coeffs[i]·sⁱ with `da = [θ, a]`.
    pub theta_coeffs: Vec<CVec>,
    /// k×k matrix S with `(Σ aᵢsⁱ)* = Σ (aᵢ)* S[i][j] sʲ`.
    pub star_k: CMat,
    pub wedge: Option<WedgeData>,
}

/// Optional degree-2 exterior data for the torsion check: a basis of Ω²_ext,
/// the expansion of each sⁱ∧sʲ in that basis, and the exterior derivative of
/// the basis 1-forms.
#[derive(Debug, Clone)]
pub struct WedgeData {
    pub ext_labels: Vec<String>,
    /// `wedge_coeffs[i][j][e]` = coefficient of the e-th exterior basis
    /// 2-form in sⁱ∧sʲ (scalar relations).
    pub wedge_coeffs: Vec<Vec<Vec<crate::linalg::C64>>>,
    /// `d_one_forms[i]` = dsⁱ as an Ω²_ext element with algebra
    /// coefficients, length ext_dim·nA (exterior index major).
    pub d_one_forms: Vec<CVec>,
}
