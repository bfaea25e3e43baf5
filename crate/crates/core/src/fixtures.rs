//! The bundled example models.

use crate::model::Nscm;

pub const LATE_PREEMPTION: &str = include_str!("../../../models/lp.json");
pub const TREATMENT: &str = include_str!("../../../models/ex2.json");
pub const ACCURACY_VARIANT: &str = include_str!("../../../models/accuracy-variant.json");
pub const ANCESTRY_WITHOUT_DEPENDENCE: &str = include_str!("../../../models/thm1-counterexample.json");

pub const BUNDLED: [&str; 4] = [LATE_PREEMPTION, TREATMENT, ACCURACY_VARIANT, ANCESTRY_WITHOUT_DEPENDENCE];

/// Rock throwing with late preemption: ST, BT, SH = ST, BH = BT ∧ ¬SH, BS = SH ∨ BH.
pub fn late_preemption() -> Nscm {
    Nscm::from_json(LATE_PREEMPTION).expect("bundled model is valid")
}

/// X = 1 and Y ∈ {0,1} whatever X is.
pub fn treatment() -> Nscm {
    Nscm::from_json(TREATMENT).expect("bundled model is valid")
}

/// Late preemption where Suzy does not throw and her accuracy SA is endogenous.
pub fn accuracy_variant() -> Nscm {
    Nscm::from_json(ACCURACY_VARIANT).expect("bundled model is valid")
}

/// Y = |X|, X = A if Z = 1 else -A: Z is an ancestor of Y without Y depending on it.
pub fn ancestry_without_dependence() -> Nscm {
    Nscm::from_json(ANCESTRY_WITHOUT_DEPENDENCE).expect("bundled model is valid")
}
