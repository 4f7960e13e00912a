//! Verdicts, credal modalities and the hexagon of oppositions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModalityError {
    #[error("unknown verdict `{0}` (expected accept, agnostic, reject, 0, 0.5 or 1)")]
    UnknownVerdict(String),
    #[error("unknown modality `{0}` (expected one of A, E, I, O, U, Y)")]
    UnknownModality(String),
}

/// Three-valued output of an agnostic test for a single hypothesis.
///
/// The numerals 0, 0.5 and 1 are labels only and are exposed through
/// [`ModalVerdict::numeral`] for display and serialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModalVerdict {
    Accept,
    Agnostic,
    Reject,
}

impl ModalVerdict {
    pub const ALL: [ModalVerdict; 3] = [ModalVerdict::Accept, ModalVerdict::Agnostic, ModalVerdict::Reject];

    pub fn numeral(self) -> f64 {
        match self {
            ModalVerdict::Accept => 0.0,
            ModalVerdict::Agnostic => 0.5,
            ModalVerdict::Reject => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModalVerdict::Accept => "accept",
            ModalVerdict::Agnostic => "agnostic",
            ModalVerdict::Reject => "reject",
        }
    }

    /// True for accept and reject (the Δ modality).
    pub fn is_decided(self) -> bool {
        self != ModalVerdict::Agnostic
    }

    /// Whether `modality` holds for this verdict.
    pub fn satisfies(self, modality: Modality) -> bool {
        modality.holds(self)
    }
}

impl fmt::Display for ModalVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModalVerdict {
    type Err = ModalityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "accept" | "0" | "0.0" => Ok(ModalVerdict::Accept),
            "agnostic" | "0.5" | ".5" => Ok(ModalVerdict::Agnostic),
            "reject" | "1" | "1.0" => Ok(ModalVerdict::Reject),
            other => Err(ModalityError::UnknownVerdict(other.to_string())),
        }
    }
}

/// The six vertices of the hexagon of oppositions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Modality {
    /// Necessity: H is accepted.
    A,
    /// Impossibility: H is rejected.
    E,
    /// Contingency: H is not decided.
    Y,
    /// Possibility: H is not rejected.
    I,
    /// Non-necessity: H is not accepted.
    O,
    /// Non-contingency: H is decided.
    U,
}

impl Modality {
    pub const ALL: [Modality; 6] = [Modality::A, Modality::E, Modality::Y, Modality::I, Modality::O, Modality::U];

    pub fn letter(self) -> char {
        match self {
            Modality::A => 'A',
            Modality::E => 'E',
            Modality::Y => 'Y',
            Modality::I => 'I',
            Modality::O => 'O',
            Modality::U => 'U',
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Modality::A => "necessity",
            Modality::E => "impossibility",
            Modality::Y => "contingency",
            Modality::I => "possibility",
            Modality::O => "non-necessity",
            Modality::U => "non-contingency",
        }
    }

    /// Definition predicate on the verdict label L(H).
    pub fn holds(self, verdict: ModalVerdict) -> bool {
        use ModalVerdict::*;
        match self {
            Modality::A => verdict == Accept,
            Modality::E => verdict == Reject,
            Modality::Y => verdict == Agnostic,
            Modality::I => verdict != Reject,
            Modality::O => verdict != Accept,
            Modality::U => verdict != Agnostic,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Modality {
    type Err = ModalityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" => Ok(Modality::A),
            "E" => Ok(Modality::E),
            "Y" => Ok(Modality::Y),
            "I" => Ok(Modality::I),
            "O" => Ok(Modality::O),
            "U" => Ok(Modality::U),
            other => Err(ModalityError::UnknownModality(other.to_string())),
        }
    }
}

/// Truth values for the six modalities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModalAssignment([bool; 6]);

impl ModalAssignment {
    pub fn new(values: [bool; 6]) -> Self {
        ModalAssignment(values)
    }

    /// Assignment number `bits` out of the 64, bit i being `Modality::ALL[i]`.
    pub fn from_bits(bits: u8) -> Self {
        let mut values = [false; 6];
        for (i, v) in values.iter_mut().enumerate() {
            *v = bits >> i & 1 == 1;
        }
        ModalAssignment(values)
    }

    pub fn get(&self, modality: Modality) -> bool {
        self.0[modality.index()]
    }

    pub fn set(&mut self, modality: Modality, value: bool) {
        self.0[modality.index()] = value;
    }

    pub fn holding(&self) -> Vec<Modality> {
        Modality::ALL.iter().copied().filter(|m| self.get(*m)).collect()
    }

    /// The verdict whose image this is, if any.
    pub fn verdict(&self) -> Option<ModalVerdict> {
        ModalVerdict::ALL.into_iter().find(|v| modalities_of(*v) == *self)
    }
}

impl Serialize for ModalAssignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.holding().serialize(serializer)
    }
}

impl FromIterator<Modality> for ModalAssignment {
    fn from_iter<T: IntoIterator<Item = Modality>>(iter: T) -> Self {
        let mut out = ModalAssignment::default();
        for m in iter {
            out.set(m, true);
        }
        out
    }
}

/// The modalities that hold for `verdict`. Always exactly three.
pub fn modalities_of(verdict: ModalVerdict) -> ModalAssignment {
    Modality::ALL.iter().copied().filter(|m| m.holds(verdict)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Implication,
    Contrariety,
    Subcontrariety,
    Contradiction,
}

/// An edge of the hexagon. For implications `from` implies `to`; the
/// other kinds are symmetric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OppositionRelation {
    pub kind: RelationKind,
    pub from: Modality,
    pub to: Modality,
}

impl OppositionRelation {
    const fn new(kind: RelationKind, from: Modality, to: Modality) -> Self {
        OppositionRelation { kind, from, to }
    }

    pub fn satisfied_by(&self, assignment: &ModalAssignment) -> bool {
        let (j, k) = (assignment.get(self.from), assignment.get(self.to));
        match self.kind {
            RelationKind::Implication => !j || k,
            RelationKind::Contrariety => !(j && k),
            RelationKind::Subcontrariety => j || k,
            RelationKind::Contradiction => j != k,
        }
    }

    /// Same edge regardless of endpoint order for the symmetric kinds.
    pub fn same_edge(&self, other: &OppositionRelation) -> bool {
        if self.kind != other.kind {
            return false;
        }
        match self.kind {
            RelationKind::Implication => self.from == other.from && self.to == other.to,
            _ => (self.from == other.from && self.to == other.to) || (self.from == other.to && self.to == other.from),
        }
    }
}

impl fmt::Display for OppositionRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            RelationKind::Implication => write!(f, "implication {} -> {}", self.from, self.to),
            RelationKind::Contrariety => write!(f, "contrariety {{{}, {}}}", self.from, self.to),
            RelationKind::Subcontrariety => write!(f, "subcontrariety {{{}, {}}}", self.from, self.to),
            RelationKind::Contradiction => write!(f, "contradiction {{{}, {}}}", self.from, self.to),
        }
    }
}

const HEXAGON: [OppositionRelation; 15] = {
    use Modality::*;
    use RelationKind::*;
    [
        OppositionRelation::new(Implication, A, I),
        OppositionRelation::new(Implication, E, O),
        OppositionRelation::new(Implication, A, U),
        OppositionRelation::new(Implication, E, U),
        OppositionRelation::new(Implication, Y, I),
        OppositionRelation::new(Implication, Y, O),
        OppositionRelation::new(Contrariety, A, E),
        OppositionRelation::new(Contrariety, A, Y),
        OppositionRelation::new(Contrariety, E, Y),
        OppositionRelation::new(Subcontrariety, I, O),
        OppositionRelation::new(Subcontrariety, I, U),
        OppositionRelation::new(Subcontrariety, O, U),
        OppositionRelation::new(Contradiction, A, O),
        OppositionRelation::new(Contradiction, E, I),
        OppositionRelation::new(Contradiction, U, Y),
    ]
};

/// The full edge set of the hexagon of oppositions.
pub fn hexagon_relations() -> &'static [OppositionRelation] {
    &HEXAGON
}

/// Relations of the hexagon violated by `assignment`; empty iff it is coherent.
pub fn check_hexagon(assignment: &ModalAssignment) -> Vec<OppositionRelation> {
    HEXAGON.iter().copied().filter(|r| !r.satisfied_by(assignment)).collect()
}

/// Modalities whose value disagrees with their definition in terms of the
/// others (A = U ∧ I, E = U ∧ O, Y = I ∧ O, U = A ∨ E).
///
/// The pairwise edges alone admit one extra model, A = E = Y = false with
/// I = O = U = true; this check rules it out.
pub fn check_equivalences(assignment: &ModalAssignment) -> Vec<Modality> {
    use Modality::*;
    let h = |m| assignment.get(m);
    [(A, h(U) && h(I)), (E, h(U) && h(O)), (Y, h(I) && h(O)), (I, h(A) || h(Y)), (O, h(E) || h(Y)), (U, h(A) || h(E))]
        .into_iter()
        .filter(|(m, expected)| h(*m) != *expected)
        .map(|(m, _)| m)
        .collect()
}
