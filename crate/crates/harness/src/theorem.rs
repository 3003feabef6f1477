use crate::error::HarnessError;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The commutation results the harness knows how to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    AbelianisationCoproduct,
    FreeModuleCoproduct,
    TensorCoproduct,
    TorCoproduct,
    InductionCoproduct,
    RestrictionCoproduct,
    DualityInvolution,
    DualityEquivalence,
    ColimitCoequaliser,
    DiscreteColimitAgreement,
    RelativeAdjunction,
    FourSquare,
}

impl TheoremId {
    pub const ALL: [TheoremId; 12] = [
        TheoremId::AbelianisationCoproduct,
        TheoremId::FreeModuleCoproduct,
        TheoremId::TensorCoproduct,
        TheoremId::TorCoproduct,
        TheoremId::InductionCoproduct,
        TheoremId::RestrictionCoproduct,
        TheoremId::DualityInvolution,
        TheoremId::DualityEquivalence,
        TheoremId::ColimitCoequaliser,
        TheoremId::DiscreteColimitAgreement,
        TheoremId::RelativeAdjunction,
        TheoremId::FourSquare,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::AbelianisationCoproduct => "abelianisation-coproduct",
            TheoremId::FreeModuleCoproduct => "free-module-coproduct",
            TheoremId::TensorCoproduct => "tensor-coproduct",
            TheoremId::TorCoproduct => "tor-coproduct",
            TheoremId::InductionCoproduct => "induction-coproduct",
            TheoremId::RestrictionCoproduct => "restriction-coproduct",
            TheoremId::DualityInvolution => "duality-involution",
            TheoremId::DualityEquivalence => "duality-equivalence",
            TheoremId::ColimitCoequaliser => "colimit-coequaliser",
            TheoremId::DiscreteColimitAgreement => "discrete-colimit-agreement",
            TheoremId::RelativeAdjunction => "relative-adjunction",
            TheoremId::FourSquare => "four-square",
        }
    }

    /// Position in [`TheoremId::ALL`]; mixed into instance seeds.
    pub fn index(self) -> usize {
        TheoremId::ALL.iter().position(|&t| t == self).expect("listed")
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TheoremId::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| HarnessError::UnknownTheorem(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
            assert_eq!(serde_json::to_string(&t).unwrap(), format!("\"{t}\""));
        }
        assert_eq!(TheoremId::ALL.len(), 12);
    }

    #[test]
    fn unknown_ids_are_rejected() {
        assert!(matches!("tor".parse::<TheoremId>(), Err(HarnessError::UnknownTheorem(_))));
        assert!(serde_json::from_str::<TheoremId>("\"hom-coproduct\"").is_err());
    }
}
