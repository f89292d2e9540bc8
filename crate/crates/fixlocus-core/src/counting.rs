//! Component counts for the fixed-point locus of a finite-order isometry,
//! in any dimension.
//!
//! For a non-trivial g in the target group, the count is
//! |N_G⟨g⟩| · Σ_{i ∈ I(g)} 1/n_i, where J(g) collects the torsion entries
//! whose image has a conjugate power equal to g, I(g) picks one
//! representative per merge class, and n_i is the order of the image of the
//! source-group normalizer of the relevant cyclic subgroup. The n_i and the
//! merge classes depend on geometry the finite quotient cannot see, so both
//! arrive as explicit input data and are cross-checked for the divisibility
//! relations they must satisfy.

use num_rational::Rational64;
use thiserror::Error;

use crate::perm::ElementId;
use crate::words::{EpimorphismInstance, InstanceKind, Word, WordError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CountError {
    #[error("counts are defined for non-trivial elements only")]
    TrivialElement,
    #[error("no normalizer-image spec covers entry {ecs_index} at power divisor {divisor}")]
    MissingSpec { ecs_index: usize, divisor: usize },
    #[error("spec references unknown torsion entry {index}")]
    UnknownEcsIndex { index: usize },
    #[error("entry {ecs_index}: term |N|/n = {term} is not a positive integer")]
    NonIntegralTerm { ecs_index: usize, term: String },
    #[error("entry {ecs_index}: {detail}")]
    DivisibilityViolation { ecs_index: usize, detail: String },
    #[error("merge data does not fit J(g): {detail}")]
    MergeMismatch { detail: String },
    #[error("count is not a non-negative integer: {detail}")]
    NonIntegralResult { detail: String },
    #[error("entry {ecs_index}: fiber fixed-set size {detail}")]
    NonIntegralFiber { ecs_index: usize, detail: String },
    #[error("element has order {order}, not an involution")]
    NotInvolution { order: usize },
    #[error("reflection class {class_position}: centralizer word {word_position} does not commute with the reflection image")]
    CentralizerImageNotContained {
        class_position: usize,
        word_position: usize,
    },
    #[error("operation requires a Fuchsian-signature instance")]
    NotSignatureInstance,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// Where the order n_i comes from: a directly supplied value, or generator
/// words whose images generate the normalizer image inside the target.
/// Words are the preferred form; they make the containment and divisibility
/// cross-checks possible.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum NormalizerImageSource {
    Value(usize),
    GeneratorWords(Vec<Word>),
}

/// Order data for the image of N_K⟨κ_i^{m_i/d}⟩, where d is the order of
/// the power being normalized. A count for an element g of order n consumes
/// the spec with `power_divisor` equal to n.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NormalizerImageSpec {
    pub ecs_index: usize,
    pub power_divisor: usize,
    pub source: NormalizerImageSource,
}

/// One class of the merge partition of J(g), with a provenance note
/// explaining any genuinely geometric identification.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MergeBlock {
    indices: Vec<usize>,
    note: Option<String>,
}

impl MergeBlock {
    /// `indices` are torsion-entry labels; non-singleton blocks must say
    /// where the identification comes from, since the group data alone can
    /// never justify one.
    pub fn new(indices: Vec<usize>, note: Option<String>) -> Result<Self, CountError> {
        let mut sorted = indices;
        sorted.sort_unstable();
        if sorted.is_empty() {
            return Err(CountError::MergeMismatch {
                detail: "empty merge block".into(),
            });
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(CountError::MergeMismatch {
                detail: format!("repeated index in merge block {sorted:?}"),
            });
        }
        if sorted.len() > 1 && note.is_none() {
            return Err(CountError::MergeMismatch {
                detail: format!("non-singleton merge block {sorted:?} lacks a provenance note"),
            });
        }
        Ok(MergeBlock {
            indices: sorted,
            note,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn note(&self) -> Option<&str> {
        self.note.as_deref()
    }
}

/// Merge partition for one conjugacy class of target elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MergeEntry {
    pub element: ElementId,
    pub blocks: Vec<MergeBlock>,
}

/// Element-keyed merge data. The default, [`MergeSpec::discrete`], merges
/// nothing; every count computed under it records that assumption.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MergeSpec {
    entries: Vec<MergeEntry>,
}

impl MergeSpec {
    pub fn discrete() -> MergeSpec {
        MergeSpec::default()
    }

    pub fn new(entries: Vec<MergeEntry>) -> Result<Self, CountError> {
        for entry in &entries {
            let mut all: Vec<usize> = entry
                .blocks
                .iter()
                .flat_map(|b| b.indices.iter().copied())
                .collect();
            let before = all.len();
            all.sort_unstable();
            all.dedup();
            if all.len() != before {
                return Err(CountError::MergeMismatch {
                    detail: "merge blocks overlap".into(),
                });
            }
        }
        Ok(MergeSpec { entries })
    }

    pub fn is_discrete(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[MergeEntry] {
        &self.entries
    }

    /// Blocks declared for the conjugacy class of `g`, first matching entry
    /// in declaration order.
    pub fn blocks_for(&self, epi: &EpimorphismInstance, g: ElementId) -> Option<&[MergeBlock]> {
        self.entries
            .iter()
            .find(|e| epi.target().is_conjugate(e.element, g))
            .map(|e| e.blocks.as_slice())
    }
}

/// Everything the count of one element produces: the index sets, the
/// resolved n_i per representative, the count itself, the upper bound that
/// needs no merge or normalizer data, and the assumptions the numbers rest
/// on.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FixReport {
    pub element: ElementId,
    pub order: usize,
    pub j_set: Vec<usize>,
    pub i_set: Vec<usize>,
    /// (representative index, n_i), aligned with `i_set`.
    pub n_values: Vec<(usize, usize)>,
    pub count: u64,
    pub upper_bound: Rational64,
    pub assumptions: Vec<String>,
}

/// J(g): labels of the torsion entries whose image has a power conjugate
/// to `g`. Sorted ascending.
pub fn compute_j(epi: &EpimorphismInstance, g: ElementId) -> Result<Vec<usize>, CountError> {
    let group = epi.target();
    if g == group.identity() {
        return Err(CountError::TrivialElement);
    }
    let conjugates = group.conjugates(g);
    let mut out = Vec::new();
    for entry in epi.ecs() {
        let mask = group.member_mask(&group.cyclic_subgroup(entry.image));
        if conjugates.iter().any(|c| mask[c.index()]) {
            out.push(entry.index);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// I(g): the least label of each merge block, sorted. With discrete merge
/// data this is J(g) itself.
pub fn compute_i(
    epi: &EpimorphismInstance,
    g: ElementId,
    merge: &MergeSpec,
) -> Result<Vec<usize>, CountError> {
    let blocks = resolved_blocks(epi, g, merge)?;
    Ok(blocks.iter().map(|b| b[0]).collect())
}

/// The merge partition of J(g) as sorted index blocks, sorted by least
/// member; discrete (all singletons) when no entry covers g's class.
fn resolved_blocks(
    epi: &EpimorphismInstance,
    g: ElementId,
    merge: &MergeSpec,
) -> Result<Vec<Vec<usize>>, CountError> {
    let j = compute_j(epi, g)?;
    let Some(blocks) = merge.blocks_for(epi, g) else {
        return Ok(j.iter().map(|&i| vec![i]).collect());
    };
    let mut union: Vec<usize> = blocks
        .iter()
        .flat_map(|b| b.indices().iter().copied())
        .collect();
    union.sort_unstable();
    if union != j {
        return Err(CountError::MergeMismatch {
            detail: format!("blocks cover {union:?} but J(g) = {j:?}"),
        });
    }
    let mut out: Vec<Vec<usize>> = blocks.iter().map(|b| b.indices().to_vec()).collect();
    out.sort();
    Ok(out)
}

/// Resolves n_i from a spec, for the element `g` the spec is consumed for.
///
/// Cross-checks: the spec's power divisor is ord(g) and divides m_i; a
/// word-specified subgroup contains θ(κ_i); m_i | n_i; n_i | |N_G⟨g⟩|.
/// All are forced for data describing a genuine action, so a failure means
/// the supplied normalizer data is inconsistent.
pub fn resolve_n(
    epi: &EpimorphismInstance,
    spec: &NormalizerImageSpec,
    g: ElementId,
) -> Result<usize, CountError> {
    let normalizer_order = epi.target().normalizer_of_cyclic(g).order();
    resolve_n_with(epi, spec, g, normalizer_order)
}

fn resolve_n_with(
    epi: &EpimorphismInstance,
    spec: &NormalizerImageSpec,
    g: ElementId,
    normalizer_order: usize,
) -> Result<usize, CountError> {
    let group = epi.target();
    let entry = epi
        .ecs_entry(spec.ecs_index)
        .ok_or(CountError::UnknownEcsIndex {
            index: spec.ecs_index,
        })?;
    let order_g = group.element_order(g);
    if spec.power_divisor != order_g {
        return Err(CountError::MissingSpec {
            ecs_index: spec.ecs_index,
            divisor: order_g,
        });
    }
    if entry.order % spec.power_divisor != 0 {
        return Err(CountError::DivisibilityViolation {
            ecs_index: spec.ecs_index,
            detail: format!(
                "power divisor {} does not divide the entry order {}",
                spec.power_divisor, entry.order
            ),
        });
    }
    let n = match &spec.source {
        NormalizerImageSource::Value(n) => *n,
        NormalizerImageSource::GeneratorWords(words) => {
            let mut ids = Vec::with_capacity(words.len());
            for w in words {
                ids.push(epi.evaluate_word(w)?);
            }
            let sub = group.subgroup_generated(&ids);
            if !sub.contains(entry.image) {
                return Err(CountError::DivisibilityViolation {
                    ecs_index: spec.ecs_index,
                    detail: "normalizer image does not contain the torsion image itself".into(),
                });
            }
            sub.order()
        }
    };
    if n == 0 || n % entry.order != 0 {
        return Err(CountError::DivisibilityViolation {
            ecs_index: spec.ecs_index,
            detail: format!("m_i = {} does not divide n_i = {}", entry.order, n),
        });
    }
    if !normalizer_order.is_multiple_of(n) {
        return Err(CountError::DivisibilityViolation {
            ecs_index: spec.ecs_index,
            detail: format!(
                "n_i = {} does not divide |N_G<g>| = {}",
                n, normalizer_order
            ),
        });
    }
    Ok(n)
}

/// The component count |N_G⟨g⟩| · Σ_{i ∈ I(g)} 1/n_i, with every term
/// checked to be a positive integer (each is an index of subgroups).
pub fn component_count(
    epi: &EpimorphismInstance,
    g: ElementId,
    merge: &MergeSpec,
    specs: &[NormalizerImageSpec],
) -> Result<FixReport, CountError> {
    let group = epi.target();
    if g == group.identity() {
        return Err(CountError::TrivialElement);
    }
    let order = group.element_order(g);
    let blocks = resolved_blocks(epi, g, merge)?;
    let j_set = compute_j(epi, g)?;
    let normalizer_order = group.normalizer_of_cyclic(g).order();

    let find_spec = |index: usize| {
        specs
            .iter()
            .find(|s| s.ecs_index == index && s.power_divisor == order)
    };

    let mut i_set = Vec::with_capacity(blocks.len());
    let mut n_values = Vec::with_capacity(blocks.len());
    let mut count: u64 = 0;
    for block in &blocks {
        let rep = block[0];
        let spec = find_spec(rep).ok_or(CountError::MissingSpec {
            ecs_index: rep,
            divisor: order,
        })?;
        let n = resolve_n_with(epi, spec, g, normalizer_order)?;
        // members of one block must agree on the term wherever data exists;
        // the representative choice must not change the count
        for &other in &block[1..] {
            if let Some(other_spec) = find_spec(other) {
                let other_n = resolve_n_with(epi, other_spec, g, normalizer_order)?;
                if other_n != n {
                    return Err(CountError::MergeMismatch {
                        detail: format!(
                            "merge block {block:?} resolves unequal orders {n} and {other_n}"
                        ),
                    });
                }
            }
        }
        if !normalizer_order.is_multiple_of(n) {
            return Err(CountError::NonIntegralTerm {
                ecs_index: rep,
                term: format!("{normalizer_order}/{n}"),
            });
        }
        count += (normalizer_order / n) as u64;
        i_set.push(rep);
        n_values.push((rep, n));
    }

    let upper_bound = upper_bound_over(epi, &j_set, normalizer_order);
    assert!(i_set.len() <= j_set.len());
    assert!(
        Rational64::from_integer(count as i64) <= upper_bound,
        "count exceeds its upper bound"
    );

    Ok(FixReport {
        element: g,
        order,
        j_set,
        i_set,
        n_values,
        count,
        upper_bound,
        assumptions: assumptions_for(epi, merge, g),
    })
}

/// The bound |N_G⟨g⟩| · Σ_{j ∈ J(g)} 1/m_j. Needs no merge or normalizer
/// data; an empty J(g) gives 0 (the element acts freely).
pub fn component_upper_bound(
    epi: &EpimorphismInstance,
    g: ElementId,
) -> Result<Rational64, CountError> {
    let j_set = compute_j(epi, g)?;
    let normalizer_order = epi.target().normalizer_of_cyclic(g).order();
    Ok(upper_bound_over(epi, &j_set, normalizer_order))
}

fn upper_bound_over(
    epi: &EpimorphismInstance,
    j_set: &[usize],
    normalizer_order: usize,
) -> Rational64 {
    let mut sum = Rational64::from_integer(0);
    for &j in j_set {
        let entry = epi.ecs_entry(j).expect("J(g) holds known entries");
        sum += Rational64::new(1, entry.order as i64);
    }
    Rational64::from_integer(normalizer_order as i64) * sum
}

fn assumptions_for(epi: &EpimorphismInstance, merge: &MergeSpec, g: ElementId) -> Vec<String> {
    let mut out = Vec::new();
    match merge.blocks_for(epi, g) {
        None => out.push("merge = discrete (assumed)".to_string()),
        Some(blocks) => {
            out.push("merge = supplied partition".to_string());
            for block in blocks {
                if let Some(note) = block.note() {
                    out.push(format!("merge block {:?}: {note}", block.indices()));
                }
            }
        }
    }
    out.push(
        "normalizer image orders taken from supplied data, not derived from the source presentation"
            .to_string(),
    );
    if matches!(epi.kind(), InstanceKind::General) {
        out.push(
            "torsion system taken as given; order preservation is necessary but not sufficient for a torsion-free kernel"
                .to_string(),
        );
    }
    out
}
