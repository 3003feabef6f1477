use crate::instance::Payload;
use crate::theorem::TheoremId;
use bundlecalc_core::finmod::ModuleHom;
use bundlecalc_core::protower::{AdjunctionReport, FourSquareReport};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Combines verdicts: any failure wins, then any inconclusive result.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    /// Process exit code: 0 pass, 1 fail, 2 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

/// A labelled comparison map that was checked to be an isomorphism.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedIso {
    pub label: String,
    pub map: ModuleHom,
}

/// One sampled element of a bijection: an element on the left and its image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePair {
    pub left: Vec<Vec<i64>>,
    pub right: Vec<Vec<i64>>,
}

/// The two Hom-sets compared against one test object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeBijection {
    pub probe: String,
    pub left: u128,
    pub right: u128,
    /// `enumerated` when every element was mapped and compared,
    /// `blockwise` when each factor of a product was.
    pub certified: String,
    pub sample: Vec<SamplePair>,
}

/// A concrete mismatch together with the smallest payload still showing it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Counterexample {
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<serde_json::Value>,
    /// The payload to replay; minimized by dropping base points.
    pub instance: Payload,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
/// Tagged as `{"type": ..., "data": ...}`. Hom counts are `u128`, which
/// an internally tagged enum cannot carry through deserialization.
#[serde(tag = "type", content = "data", rename_all = "kebab-case")]
pub enum Witness {
    /// Comparison maps, each a bijective homomorphism.
    Isomorphisms {
        maps: Vec<NamedIso>,
        #[serde(default)]
        naturality_squares: usize,
    },
    /// Explicit bijections between Hom-sets, one per test object.
    HomBijections {
        probes: Vec<ProbeBijection>,
    },
    Adjunction {
        reports: Vec<AdjunctionReport>,
        naturality: Option<bool>,
    },
    FourSquare {
        report: FourSquareReport,
    },
    Counterexample(Box<Counterexample>),
    /// A search or enumeration budget ran out.
    Budget {
        what: String,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub theorem: TheoremId,
    pub seed: u64,
    pub verdict: Verdict,
    pub witness: Witness,
    /// Wall-clock time, only when timing was requested.
    pub timing_ms: Option<u64>,
    /// SHA-256 of the instance JSON.
    pub instance: String,
}

impl Report {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Re-checks a pass report from its witness alone. Isomorphism
    /// witnesses were already revalidated as homomorphisms if the report
    /// came from JSON; here bijectivity is checked as well.
    pub fn reverify(&self) -> bool {
        match (&self.verdict, &self.witness) {
            (Verdict::Pass, Witness::Isomorphisms { maps, .. }) => maps.iter().all(|m| {
                ModuleHom::new(m.map.domain().clone(), m.map.codomain().clone(), m.map.matrix().clone())
                    .map(|f| f.is_bijective())
                    .unwrap_or(false)
            }),
            (Verdict::Pass, Witness::HomBijections { probes }) => probes.iter().all(|p| p.left == p.right),
            (Verdict::Pass, Witness::Adjunction { reports, naturality }) => {
                reports.iter().all(|r| r.bijective && r.left_count == r.right_count) && *naturality != Some(false)
            }
            (Verdict::Pass, Witness::FourSquare { report }) => report.right_agree && report.left_iso,
            (Verdict::Fail, Witness::Counterexample(_)) => true,
            (Verdict::Inconclusive, Witness::Budget { .. }) => true,
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts_combine() {
        use Verdict::*;
        assert_eq!(Pass.combine(Pass), Pass);
        assert_eq!(Pass.combine(Inconclusive), Inconclusive);
        assert_eq!(Inconclusive.combine(Fail), Fail);
        assert_eq!(serde_json::to_string(&Inconclusive).unwrap(), "\"inconclusive\"");
        assert_eq!([Pass, Fail, Inconclusive].map(Verdict::exit_code), [0, 1, 2]);
    }

    #[test]
    fn mismatched_witnesses_do_not_reverify() {
        let r = Report {
            theorem: TheoremId::FourSquare,
            seed: 0,
            verdict: Verdict::Pass,
            witness: Witness::Budget { what: "x".into() },
            timing_ms: None,
            instance: String::new(),
        };
        assert!(!r.reverify());
    }
}
