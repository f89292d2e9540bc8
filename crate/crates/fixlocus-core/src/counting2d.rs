//! The surface specialization: fixed-point counts for conformal
//! automorphisms via the classical normalizer formula, an independent
//! brute-force oracle over coset fibers, and the oval count for symmetries.
//!
//! The formula and the oracle compute the same number along different
//! routes. The formula is |N_G⟨g⟩| · Σ 1/m_i over the cone points whose
//! local rotation has a conjugate power equal to g. The oracle never forms
//! the normalizer: over each cone point it counts the cosets of G/⟨θ(x_i)⟩
//! fixed by g, which is where the fixed points of the covering surface sit,
//! one per fixed coset. Their agreement on every instance is the strongest
//! cross-check this crate has, and the acceptance suite leans on it.

use num_rational::Rational64;

use crate::counting::{CountError, NormalizerImageSource, NormalizerImageSpec};
use crate::perm::ElementId;
use crate::words::{EpimorphismInstance, Word};

/// Outcome of the formula count: the contributing cone points and the
/// number of fixed points. The count is zero exactly when nothing
/// contributes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FixCount2D {
    pub element: ElementId,
    pub contributing_indices: Vec<usize>,
    pub count: u64,
}

/// One conjugacy class of reflections of the source group: the image of a
/// representative and words generating the image of its source-group
/// centralizer. The word list is trusted to generate the full image; the
/// group data can verify containment but not completeness.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReflectionClassData {
    pub reflection_image: ElementId,
    pub centralizer_image_generators: Vec<Word>,
}

fn require_signature(epi: &EpimorphismInstance) -> Result<(), CountError> {
    if epi.signature().is_none() {
        return Err(CountError::NotSignatureInstance);
    }
    Ok(())
}

/// Fixed points of the non-trivial automorphism `g`:
/// |N_G⟨g⟩| · Σ_{i : g ~ power of θ(x_i)} 1/m_i, in exact rationals, with
/// the integrality of the result asserted. A non-integral value cannot
/// arise from an actual action, so it is reported as an input-data error.
pub fn macbeath_count(epi: &EpimorphismInstance, g: ElementId) -> Result<FixCount2D, CountError> {
    require_signature(epi)?;
    let group = epi.target();
    if g == group.identity() {
        return Err(CountError::TrivialElement);
    }
    let conjugates = group.conjugates(g);
    let mut contributing = Vec::new();
    let mut sum = Rational64::from_integer(0);
    for entry in epi.ecs() {
        let mask = group.member_mask(&group.cyclic_subgroup(entry.image));
        if conjugates.iter().any(|c| mask[c.index()]) {
            contributing.push(entry.index);
            sum += Rational64::new(1, entry.order as i64);
        }
    }
    contributing.sort_unstable();
    let total = Rational64::from_integer(group.normalizer_of_cyclic(g).order() as i64) * sum;
    if !total.is_integer() || total < Rational64::from_integer(0) {
        return Err(CountError::NonIntegralResult {
            detail: total.to_string(),
        });
    }
    let count = total.to_integer() as u64;
    assert_eq!(count == 0, contributing.is_empty());
    Ok(FixCount2D {
        element: g,
        contributing_indices: contributing,
        count,
    })
}

/// The independent oracle: Σ_i #{ω ∈ G : ω⁻¹gω ∈ ⟨θ(x_i)⟩} / m_i, the
/// total number of g-fixed cosets across the fibers over the cone points.
/// Each fiber's fixed set has size divisible by the true order of θ(x_i),
/// so a non-divisible size betrays a declared order the image does not
/// have.
pub fn fiber_oracle_count(epi: &EpimorphismInstance, g: ElementId) -> Result<u64, CountError> {
    require_signature(epi)?;
    let group = epi.target();
    if g == group.identity() {
        return Err(CountError::TrivialElement);
    }
    let conjugates = group.conjugates(g);
    let mut total: u64 = 0;
    for entry in epi.ecs() {
        let mask = group.member_mask(&group.cyclic_subgroup(entry.image));
        let fixed = conjugates.iter().filter(|c| mask[c.index()]).count();
        if fixed % entry.order != 0 {
            return Err(CountError::NonIntegralFiber {
                ecs_index: entry.index,
                detail: format!(
                    "{fixed} is not divisible by the declared order {}",
                    entry.order
                ),
            });
        }
        total += (fixed / entry.order) as u64;
    }
    Ok(total)
}

/// Normalizer data for the surface case, where no input is needed: the
/// source normalizer of every power subgroup ⟨x_i^{m_i/d}⟩ is ⟨x_i⟩
/// itself, so n_i = m_i at every power divisor d ≥ 2 of m_i. Feeding these
/// specs into the general count with discrete merge reproduces
/// [`macbeath_count`] exactly.
pub fn fuchsian_default_specs(
    epi: &EpimorphismInstance,
) -> Result<Vec<NormalizerImageSpec>, CountError> {
    require_signature(epi)?;
    let mut specs = Vec::new();
    for entry in epi.ecs() {
        for d in 2..=entry.order {
            if entry.order % d == 0 {
                specs.push(NormalizerImageSpec {
                    ecs_index: entry.index,
                    power_divisor: d,
                    source: NormalizerImageSource::Value(entry.order),
                });
            }
        }
    }
    Ok(specs)
}

/// Ovals of the symmetry `sigma`: Σ [C(G, θ(c_i)) : image of C(K, c_i)]
/// over the reflection classes whose image is conjugate to `sigma`.
pub fn oval_count(
    epi: &EpimorphismInstance,
    sigma: ElementId,
    classes: &[ReflectionClassData],
) -> Result<u64, CountError> {
    let group = epi.target();
    let sigma_order = group.element_order(sigma);
    if sigma_order != 2 {
        return Err(CountError::NotInvolution { order: sigma_order });
    }
    let mut total: u64 = 0;
    for (pos, class) in classes.iter().enumerate() {
        let image_order = group.element_order(class.reflection_image);
        if image_order > 2 {
            return Err(CountError::NotInvolution { order: image_order });
        }
        let centralizer = group.centralizer(class.reflection_image);
        let mut generators = Vec::with_capacity(class.centralizer_image_generators.len());
        for (wpos, word) in class.centralizer_image_generators.iter().enumerate() {
            let value = epi.evaluate_word(word)?;
            if !centralizer.contains(value) {
                return Err(CountError::CentralizerImageNotContained {
                    class_position: pos + 1,
                    word_position: wpos + 1,
                });
            }
            generators.push(value);
        }
        if !group.is_conjugate(class.reflection_image, sigma) {
            continue;
        }
        let image = group.subgroup_generated(&generators);
        // image ⊆ C by the commutation checks, so the index is exact
        assert_eq!(centralizer.order() % image.order(), 0);
        total += (centralizer.order() / image.order()) as u64;
    }
    Ok(total)
}
