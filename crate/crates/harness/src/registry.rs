//! Every checked identity, with its suite, anchor and default tolerance.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Euler,
    Frame,
    Brackets,
    Forms,
    Operators,
    Transitions,
    Poincare,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Euler,
        Suite::Frame,
        Suite::Brackets,
        Suite::Forms,
        Suite::Operators,
        Suite::Transitions,
        Suite::Poincare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Euler => "euler",
            Suite::Frame => "frame",
            Suite::Brackets => "brackets",
            Suite::Forms => "forms",
            Suite::Operators => "operators",
            Suite::Transitions => "transitions",
            Suite::Poincare => "poincare",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityDef {
    pub suite: Suite,
    pub anchor: &'static str,
    pub identity: &'static str,
    pub tolerance: f64,
}

const fn def(suite: Suite, anchor: &'static str, identity: &'static str, tolerance: f64) -> IdentityDef {
    IdentityDef {
        suite,
        anchor,
        identity,
        tolerance,
    }
}

use Suite::*;

pub const REGISTRY: &[IdentityDef] = &[
    // euler
    def(Euler, "euler/f2-quadratic", "F² = yⁱyʲg_ij", 1e-9),
    def(Euler, "euler/df-from-g", "∂F/∂yᵏ = yⁱg_ki / F", 1e-9),
    def(Euler, "euler/dg-contract-y", "yⁱ ∂g_ij/∂yᵏ = 0", 1e-9),
    def(Euler, "euler/sasaki-zz", "G(Z,Z) = F²", 1e-9),
    def(Euler, "euler/homogeneity", "F(x,λy) = λF(x,y), λ > 0", 1e-10),
    def(
        Euler,
        "euler/g-positive",
        "g positive definite at admissible points",
        1e-12,
    ),
    def(
        Euler,
        "euler/euclidean-g",
        "g = I for the euclidean metric",
        1e-12,
    ),
    def(Euler, "euler/g-inverse", "g⁻¹g = I", 1e-10),
    def(
        Euler,
        "euler/dg-symmetric",
        "∂g_ij/∂yᵏ symmetric in i, j, k",
        1e-12,
    ),
    def(
        Euler,
        "euler/spray-homogeneity",
        "Gⁱ(x,2y) = 4Gⁱ(x,y), Gⁱ_j(x,2y) = 2Gⁱ_j(x,y)",
        1e-9,
    ),
    def(
        Euler,
        "jets/polynomial-exact",
        "jet coefficients of cubic polynomials are exact",
        1e-12,
    ),
    def(
        Euler,
        "jets/chain-rule",
        "jet of φ∘f matches the third-order chain rule",
        1e-12,
    ),
    def(
        Euler,
        "oracle/grad-f",
        "∂F/∂(x,y) against central differences",
        1e-5,
    ),
    def(
        Euler,
        "oracle/hess-f2",
        "∂²F²/∂(x,y)² against central differences",
        1e-5,
    ),
    def(
        Euler,
        "oracle/dg-dy",
        "∂g_ij/∂yᵏ against central differences of g",
        1e-5,
    ),
    def(
        Euler,
        "oracle/spray-conn",
        "Gⁱ_j = ∂Gⁱ/∂yʲ against central differences",
        1e-5,
    ),
    def(
        Euler,
        "oracle/christoffel",
        "riemannian Gⁱ = ½Γⁱ_jk yʲyᵏ, Γ from differenced a_ij",
        1e-5,
    ),
    // frame
    def(Frame, "frame/g-orthogonal", "G(X_k, Z) = 0", 1e-9),
    def(Frame, "frame/t-two-formulas", "yⁱg_ki / F² = (1/F) ∂F/∂yᵏ", 1e-10),
    def(Frame, "frame/y-dot-t", "yⁱt_i = 1", 1e-9),
    def(Frame, "frame/y-sum-x", "yⁱX_i = 0", 1e-9),
    def(Frame, "frame/dt-formula", "∂t_l/∂yᵏ = −2t_kt_l + g_kl / F²", 1e-9),
    def(Frame, "frame/z-t", "Z t_k = −t_k", 1e-9),
    def(Frame, "frame/y-contract-dt", "yʲ ∂t_j/∂yⁱ = −t_i", 1e-9),
    def(Frame, "frame/y-z-t", "yⁱ Z t_i = −1", 1e-9),
    def(Frame, "frame/y-z-x", "yⁱ Z X_i = 0", 1e-9),
    def(
        Frame,
        "frame/dependent-vector",
        "X_k = −(1/yᵏ) Σ_{a≠k} yᵃX_a",
        1e-9,
    ),
    def(
        Frame,
        "frame/basis-certificate",
        "{X_a, Z} is a basis (σ_min ≥ 1e-8)",
        1.0,
    ),
    def(
        Frame,
        "oracle/dt-dy",
        "∂t_k/∂yʲ against central differences of t",
        1e-5,
    ),
    // brackets
    def(Brackets, "brackets/xx", "[X_i, X_j] = t_iX_j − t_jX_i", 1e-8),
    def(Brackets, "brackets/xz", "[X_i, Z] = X_i", 1e-8),
    // forms
    def(Forms, "forms/omega0-z", "ω₀(Z) = 1", 1e-10),
    def(Forms, "forms/omega0-leaf", "ω₀(X_k) = 0", 1e-10),
    def(Forms, "forms/omega0-dlnf", "ω₀ = d₀₁ ln F", 1e-10),
    def(Forms, "forms/dy-z", "δyⁱ(Z) = yⁱ", 1e-10),
    def(
        Forms,
        "forms/pure-iff-iz",
        "i_Zω = 0 ⟺ ω vanishes with Z as an argument",
        1e-10,
    ),
    def(
        Forms,
        "forms/iz-iz",
        "i_Z i_Z ω = 0, so i_Zω is tangential",
        1e-10,
    ),
    def(
        Forms,
        "forms/mixed-iz-nonzero",
        "ω radial and nonzero ⟹ i_Zω ≠ 0",
        1e-10,
    ),
    def(
        Forms,
        "forms/mixed-wedge-omega0",
        "ω₀ ∧ α is radial for tangential α",
        1e-10,
    ),
    def(
        Forms,
        "forms/eval-criterion",
        "radial ⟺ vanishes on all tuples from {X_a}",
        1e-10,
    ),
    def(Forms, "forms/split-reconstruct", "ξ₁ω + ξ₂ω = ω", 1e-10),
    def(
        Forms,
        "forms/split-unique",
        "ξ₁(a + b) = a, ξ₂(a + b) = b for a tangential, b radial",
        1e-10,
    ),
    def(
        Forms,
        "forms/projector-laws",
        "ξ₁² = ξ₁, ξ₂² = ξ₂, ξ₁ξ₂ = ξ₂ξ₁ = 0",
        1e-10,
    ),
    def(
        Forms,
        "forms/mixed-equivalence",
        "ω radial ⟺ ω = ω₀ ∧ i_Zω",
        1e-10,
    ),
    def(
        Forms,
        "forms/wedge-tangential",
        "tangential ∧ tangential is tangential",
        1e-10,
    ),
    def(Forms, "forms/wedge-mixed", "radial ∧ tangential is radial", 1e-10),
    def(Forms, "forms/wedge-mixed-mixed", "radial ∧ radial = 0", 1e-10),
    def(Forms, "forms/omega0-type", "ω₀ = ω₀ ∧ 1 is radial", 1e-10),
    def(Forms, "forms/theta-z", "θ_i(Z) = 0", 1e-10),
    def(Forms, "forms/theta-dependence", "Σ t_iθ_i = 0", 1e-10),
    def(Forms, "forms/theta-wedge", "i_Z(θ_i ∧ θ_j) = 0", 1e-10),
    // operators
    def(
        Operators,
        "ops/d01-stability",
        "d₀₁ maps radial forms to radial forms",
        1e-8,
    ),
    def(Operators, "ops/xi1-commutation", "ξ₁(d₀₁ω) = ξ₁(d₀₁ξ₁ω)", 1e-8),
    def(
        Operators,
        "ops/d01-split",
        "d′ + d″ = d₀₁ on tangential forms",
        1e-8,
    ),
    def(Operators, "ops/dprime-function", "d′f = (X_i f) θ_i", 1e-8),
    def(Operators, "ops/dprime-coordinate", "d′yʲ = θ_j", 1e-8),
    def(Operators, "ops/dsecond-function", "d″f = (Zf) ω₀", 1e-8),
    def(Operators, "ops/leibniz", "d′(ω∧θ) = d′ω∧θ + (−1)^q ω∧d′θ", 1e-8),
    def(Operators, "ops/dprime-squared", "d′∘d′ = 0", 1e-8),
    def(Operators, "ops/anticommutation", "d₀₁∘d″ + d″∘d′ = 0", 1e-8),
    def(
        Operators,
        "ops/one-form-representation",
        "Σ a_i δyⁱ = Σ a_i d′yⁱ for tangential 1-forms",
        1e-8,
    ),
    def(Operators, "ops/dy-wedge-closed", "d′(d′yⁱ ∧ d′yʲ) = 0", 1e-8),
    def(Operators, "ops/d01-squared", "d₀₁∘d₀₁ = 0", 1e-8),
    // transitions
    def(
        Transitions,
        "trans/round-trip",
        "φ∘φ⁻¹ = id and Jacobians mutually inverse",
        1e-9,
    ),
    def(Transitions, "trans/t-covariance", "t̃_k = (∂xʲ/∂x̃ᵏ) t_j", 1e-8),
    def(Transitions, "trans/x-covariance", "X̃_i = (∂xᵏ/∂x̃ⁱ) X_k", 1e-8),
    def(
        Transitions,
        "trans/omega0-invariance",
        "pullback of ω̃₀ is ω₀",
        1e-8,
    ),
    def(
        Transitions,
        "trans/one-form-law",
        "ã_i = (∂xʲ/∂x̃ⁱ) a_j for d′f",
        1e-8,
    ),
    def(
        Transitions,
        "trans/determinant",
        "frame change determinant: solve vs closed form",
        1e-7,
    ),
    // poincare
    def(
        Poincare,
        "leaf/reconstruction",
        "d′f = ω for the path-integral primitive",
        1e-6,
    ),
    def(
        Poincare,
        "leaf/path-independence",
        "direct and detour path integrals agree",
        1e-7,
    ),
    def(
        Poincare,
        "leaf/primitive-values",
        "primitive matches the known one up to a constant",
        1e-7,
    ),
    def(Poincare, "leaf/containment", "|F − c| on every path sample", 1e-9),
    def(
        Poincare,
        "leaf/non-closed-rejected",
        "non-closed 1-forms are refused (count accepted)",
        0.5,
    ),
    def(Poincare, "leaf/basic", "d′φ(F) = 0 and d′(const) = 0", 1e-9),
    def(Poincare, "leaf/semiexact", "im d′ ⊂ ker d′", 1e-8),
    def(
        Poincare,
        "leaf/exact-closed",
        "d′-exact 1- and 2-forms are d′-closed",
        1e-8,
    ),
];

pub fn lookup(anchor: &str) -> Option<&'static IdentityDef> {
    REGISTRY.iter().find(|d| d.anchor == anchor)
}

pub fn for_suite(suite: Suite) -> impl Iterator<Item = &'static IdentityDef> {
    REGISTRY.iter().filter(move |d| d.suite == suite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn anchors_are_unique_and_tolerances_positive() {
        let set: BTreeSet<_> = REGISTRY.iter().map(|d| d.anchor).collect();
        assert_eq!(set.len(), REGISTRY.len());
        assert!(REGISTRY.iter().all(|d| d.tolerance > 0.0));
        for s in Suite::ALL {
            assert!(for_suite(s).count() > 0, "{s} has no identities");
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
    }
}
