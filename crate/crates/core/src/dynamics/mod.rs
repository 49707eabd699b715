//! Orbits of convolution operators and the certificates built from them.
//!
//! Every "infinite" statement (a subsequence tending to zero, a sequence
//! not tending to zero) is reported as finite checkpoint evidence with
//! explicit bounds. Verdicts from the empirical detectors are
//! horizon-bounded and never a disproof.

mod certificates;
mod confinement;
mod li_yorke;
mod orbit;
mod semi_irregular;

use serde::{Deserialize, Serialize};

pub use certificates::{
    non_cyclicity_certificate, subspace_orbit_certificate, verify_non_cyclicity, NonCyclicityCertificate,
    SubspaceConfinementCertificate,
};
pub use confinement::{
    confinement_certificate, ConfinementBound, ConfinementCertificate, LinearOperator, VariableRaising,
};
pub use li_yorke::{
    li_yorke_pair_certificate, scrambled_family, scrambled_family_with, LiYorkePairCertificate, ScrambledFamily,
};
pub use orbit::{orbit_trace, orbit_trace_with, OrbitRecord, OrbitTrace, DEFAULT_GRID_SAMPLES};
pub use semi_irregular::{
    gap_checkpoint_candidates, gap_small_bound, lift_semi_irregular, proximal_asymptotic_check,
    semi_irregular_gap_witness, semi_irregularity_detector, BigCheckpoint, Detection, DetectorDiagnostics, PairVerdict,
    SemiIrregularityWitness, SmallCheckpoint, WitnessValidation,
};

/// Any certificate, tagged by `"kind"` in JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    NonCyclicity(NonCyclicityCertificate),
    SubspaceConfinement(SubspaceConfinementCertificate),
    SemiIrregularity(SemiIrregularityWitness),
    LiYorkePair(LiYorkePairCertificate),
    Confinement(ConfinementCertificate),
}

impl Certificate {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serialization is infallible")
    }
}
