//! Abstract generators, words, presentations, Fuchsian signatures, and
//! validated epimorphisms onto a [`FiniteGroup`].
//!
//! The source group of an epimorphism is infinite in every interesting case,
//! so it exists here only as a presentation plus designated torsion data; all
//! actual computation happens in the finite image.

use std::collections::HashSet;

use num_rational::Rational64;
use thiserror::Error;

use crate::perm::{ElementId, FiniteGroup};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("generator index {index} out of range for {generators} generators")]
    IndexOutOfRange { index: usize, generators: usize },
    #[error("duplicate generator name {name:?}")]
    DuplicateGenerator { name: String },
    #[error("signature period {period} is below 2")]
    PeriodTooSmall { period: usize },
    #[error("Riemann-Hurwitz datum 2g-2 = {value} is not an even integer >= -2")]
    NonIntegralGenus { value: String },
    #[error("expected {expected} generator images, found {found}")]
    ImageCountMismatch { expected: usize, found: usize },
    #[error("torsion entry index {index} appears more than once")]
    DuplicateEcsIndex { index: usize },
    #[error("torsion entry {index} declares order {order}; orders must be at least 2")]
    InvalidEcsOrder { index: usize, order: usize },
    #[error("torsion entries do not mirror the signature periods: {detail}")]
    SignatureEcsMismatch { detail: String },
}

/// A word in abstract generators: a sequence of (generator index, exponent)
/// letters, kept normalized (no zero exponents, no adjacent letters on the
/// same generator).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word {
    letters: Vec<(usize, i64)>,
}

impl Word {
    pub fn new(letters: impl IntoIterator<Item = (usize, i64)>) -> Word {
        let mut out: Vec<(usize, i64)> = Vec::new();
        for (g, e) in letters {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.0 == g => {
                    last.1 += e;
                    if last.1 == 0 {
                        out.pop();
                    }
                }
                _ => out.push((g, e)),
            }
        }
        Word { letters: out }
    }

    /// The empty word, denoting the identity.
    pub fn identity() -> Word {
        Word::default()
    }

    pub fn generator_power(index: usize, exponent: i64) -> Word {
        Word::new([(index, exponent)])
    }

    pub fn letters(&self) -> &[(usize, i64)] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.letters.iter().chain(other.letters.iter()).copied())
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn max_index(&self) -> Option<usize> {
        self.letters.iter().map(|&(g, _)| g).max()
    }
}

/// Named generators plus relator words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Presentation {
    generator_names: Vec<String>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(generator_names: Vec<String>, relators: Vec<Word>) -> Result<Self, WordError> {
        let mut seen = HashSet::new();
        for name in &generator_names {
            if !seen.insert(name.clone()) {
                return Err(WordError::DuplicateGenerator { name: name.clone() });
            }
        }
        for r in &relators {
            if let Some(max) = r.max_index() {
                if max >= generator_names.len() {
                    return Err(WordError::IndexOutOfRange {
                        index: max,
                        generators: generator_names.len(),
                    });
                }
            }
        }
        Ok(Presentation {
            generator_names,
            relators,
        })
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn generator_count(&self) -> usize {
        self.generator_names.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generator_names.iter().position(|n| n == name)
    }
}

/// Orbit genus h plus branching periods m_i >= 2: the signature
/// (h; m_1, ..., m_r) of a cocompact Fuchsian group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FuchsianSignature {
    orbit_genus: usize,
    periods: Vec<usize>,
}

impl FuchsianSignature {
    pub fn new(orbit_genus: usize, periods: Vec<usize>) -> Result<Self, WordError> {
        for &m in &periods {
            if m < 2 {
                return Err(WordError::PeriodTooSmall { period: m });
            }
        }
        Ok(FuchsianSignature {
            orbit_genus,
            periods,
        })
    }

    pub fn orbit_genus(&self) -> usize {
        self.orbit_genus
    }

    pub fn periods(&self) -> &[usize] {
        &self.periods
    }

    /// Canonical presentation on x_1..x_r, a_1, b_1, .., a_h, b_h with
    /// relators x_i^{m_i} and the long relation
    /// x_1 ... x_r [a_1,b_1] ... [a_h,b_h].
    pub fn to_presentation(&self) -> Presentation {
        let r = self.periods.len();
        let h = self.orbit_genus;
        let mut names: Vec<String> = (1..=r).map(|i| format!("x{i}")).collect();
        for j in 1..=h {
            names.push(format!("a{j}"));
            names.push(format!("b{j}"));
        }
        let mut relators: Vec<Word> = self
            .periods
            .iter()
            .enumerate()
            .map(|(i, &m)| Word::generator_power(i, m as i64))
            .collect();
        let mut long = Vec::new();
        for i in 0..r {
            long.push((i, 1));
        }
        for j in 0..h {
            let (a, b) = (r + 2 * j, r + 2 * j + 1);
            long.extend([(a, 1), (b, 1), (a, -1), (b, -1)]);
        }
        relators.push(Word::new(long));
        Presentation::new(names, relators).expect("canonical presentation is well formed")
    }

    /// Genus g of the covering surface with deck group of the given order,
    /// from 2g - 2 = order * (2h - 2 + sum(1 - 1/m_i)). Fails unless the
    /// right side is an even integer >= -2.
    pub fn riemann_hurwitz_genus(&self, group_order: usize) -> Result<usize, WordError> {
        let mut chi = Rational64::from_integer(2 * self.orbit_genus as i64 - 2);
        for &m in &self.periods {
            chi += Rational64::from_integer(1) - Rational64::new(1, m as i64);
        }
        let rhs = Rational64::from_integer(group_order as i64) * chi;
        let fail = || WordError::NonIntegralGenus {
            value: rhs.to_string(),
        };
        if !rhs.is_integer() {
            return Err(fail());
        }
        let rhs = rhs.to_integer();
        if rhs < -2 || rhs % 2 != 0 {
            return Err(fail());
        }
        Ok(((rhs + 2) / 2) as usize)
    }
}

/// Whether a torsion element acts preserving or reversing orientation.
/// Recorded as declared; the group data cannot distinguish the two.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Orientation {
    Preserving,
    Reversing,
    #[default]
    Unspecified,
}

/// One entry of the elliptic complete system: the designated torsion element
/// kappa_i of the source group, via its order and its image in the target.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EcsEntry {
    /// User-facing label; catalog and document files number entries from 1.
    pub index: usize,
    pub order: usize,
    pub image: ElementId,
    pub orientation: Orientation,
}

/// How an instance was built: from a Fuchsian signature (surface case, with
/// the canonical presentation) or from arbitrary presentation data.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum InstanceKind {
    FuchsianSignature(FuchsianSignature),
    General,
}

/// An epimorphism from a finitely presented group onto a finite permutation
/// group, with its elliptic complete system.
///
/// Construction checks structure only (index ranges, counts, signature
/// mirroring); the semantic conditions — relators dying, surjectivity, order
/// preservation — are checked by [`EpimorphismInstance::validate`], which
/// reports violations instead of erroring so a CLI can show all of them.
#[derive(Clone, Debug)]
pub struct EpimorphismInstance {
    presentation: Presentation,
    target: FiniteGroup,
    images: Vec<ElementId>,
    ecs: Vec<EcsEntry>,
    kind: InstanceKind,
}

/// Equality is structural: two instances over separately enumerated copies
/// of the same group are equal when the groups list the same permutations
/// and all element references point at the same positions.
impl PartialEq for EpimorphismInstance {
    fn eq(&self, other: &Self) -> bool {
        self.presentation == other.presentation
            && self.target == other.target
            && self.images.len() == other.images.len()
            && self
                .images
                .iter()
                .zip(&other.images)
                .all(|(a, b)| a.index() == b.index())
            && self.ecs.len() == other.ecs.len()
            && self.ecs.iter().zip(&other.ecs).all(|(a, b)| {
                a.index == b.index
                    && a.order == b.order
                    && a.image.index() == b.image.index()
                    && a.orientation == b.orientation
            })
            && self.kind == other.kind
    }
}

impl Eq for EpimorphismInstance {}

impl EpimorphismInstance {
    pub fn new(
        presentation: Presentation,
        target: FiniteGroup,
        images: Vec<ElementId>,
        ecs: Vec<EcsEntry>,
        kind: InstanceKind,
    ) -> Result<Self, WordError> {
        if images.len() != presentation.generator_count() {
            return Err(WordError::ImageCountMismatch {
                expected: presentation.generator_count(),
                found: images.len(),
            });
        }
        let mut seen = HashSet::new();
        for entry in &ecs {
            if !seen.insert(entry.index) {
                return Err(WordError::DuplicateEcsIndex { index: entry.index });
            }
            if entry.order < 2 {
                return Err(WordError::InvalidEcsOrder {
                    index: entry.index,
                    order: entry.order,
                });
            }
        }
        if let InstanceKind::FuchsianSignature(sig) = &kind {
            let periods = sig.periods();
            if ecs.len() != periods.len() {
                return Err(WordError::SignatureEcsMismatch {
                    detail: format!("{} entries for {} periods", ecs.len(), periods.len()),
                });
            }
            for (pos, (entry, &m)) in ecs.iter().zip(periods).enumerate() {
                if entry.order != m {
                    return Err(WordError::SignatureEcsMismatch {
                        detail: format!(
                            "entry {} declares order {}, period is {}",
                            entry.index, entry.order, m
                        ),
                    });
                }
                if entry.image != images[pos] {
                    return Err(WordError::SignatureEcsMismatch {
                        detail: format!(
                            "entry {} image differs from the image of x{}",
                            entry.index,
                            pos + 1
                        ),
                    });
                }
            }
        }
        Ok(EpimorphismInstance {
            presentation,
            target,
            images,
            ecs,
            kind,
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn target(&self) -> &FiniteGroup {
        &self.target
    }

    pub fn images(&self) -> &[ElementId] {
        &self.images
    }

    pub fn ecs(&self) -> &[EcsEntry] {
        &self.ecs
    }

    pub fn ecs_entry(&self, index: usize) -> Option<&EcsEntry> {
        self.ecs.iter().find(|e| e.index == index)
    }

    pub fn kind(&self) -> &InstanceKind {
        &self.kind
    }

    pub fn signature(&self) -> Option<&FuchsianSignature> {
        match &self.kind {
            InstanceKind::FuchsianSignature(sig) => Some(sig),
            InstanceKind::General => None,
        }
    }

    /// Image of a word under the epimorphism: the product of generator
    /// images with exponents, left to right.
    pub fn evaluate_word(&self, w: &Word) -> Result<ElementId, WordError> {
        let mut acc = self.target.identity();
        for &(g, e) in w.letters() {
            let image = *self.images.get(g).ok_or(WordError::IndexOutOfRange {
                index: g,
                generators: self.images.len(),
            })?;
            acc = self.target.compose(acc, self.target.power(image, e));
        }
        Ok(acc)
    }

    /// Runs the three semantic checks: relators map to the identity, the
    /// images generate the target, and each torsion entry's image has
    /// exactly the declared order (the torsion-free-kernel criterion in the
    /// signature case; for general instances this is necessary, not
    /// sufficient, since the supplied system need not exhaust the torsion).
    pub fn validate(&self) -> ValidationReport {
        let mut entries = Vec::new();
        for (pos, relator) in self.presentation.relators().iter().enumerate() {
            let value = self
                .evaluate_word(relator)
                .expect("relator indices are range-checked at construction");
            entries.push(ValidationEntry {
                check: ValidationCheck::Relator { position: pos + 1 },
                passed: value == self.target.identity(),
                detail: if value == self.target.identity() {
                    "maps to the identity".to_string()
                } else {
                    format!("maps to {}", self.target.perm(value))
                },
            });
        }
        let generated = self.target.subgroup_generated(&self.images);
        entries.push(ValidationEntry {
            check: ValidationCheck::Surjectivity,
            passed: generated.order() == self.target.order(),
            detail: format!(
                "images generate a subgroup of order {} in a group of order {}",
                generated.order(),
                self.target.order()
            ),
        });
        for entry in &self.ecs {
            let found = self.target.element_order(entry.image);
            entries.push(ValidationEntry {
                check: ValidationCheck::OrderPreservation { index: entry.index },
                passed: found == entry.order,
                detail: format!("declared order {}, image has order {}", entry.order, found),
            });
        }
        ValidationReport { entries }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ValidationCheck {
    /// The relator at this 1-based position must map to the identity.
    Relator { position: usize },
    /// The generator images must generate the whole target.
    Surjectivity,
    /// The torsion entry with this label must keep its declared order.
    OrderPreservation { index: usize },
}

impl std::fmt::Display for ValidationCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidationCheck::Relator { position } => write!(f, "relator {position}"),
            ValidationCheck::Surjectivity => write!(f, "surjectivity"),
            ValidationCheck::OrderPreservation { index } => {
                write!(f, "order check (entry {index})")
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValidationEntry {
    pub check: ValidationCheck,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of [`EpimorphismInstance::validate`]: one entry per check, in a
/// fixed order, so failures carry their position.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValidationReport {
    pub entries: Vec<ValidationEntry>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn first_failure(&self) -> Option<&ValidationEntry> {
        self.entries.iter().find(|e| !e.passed)
    }
}
