//! Prefilled regression instances: the torsion-generated orbifold groups
//! whose component counts are known in closed form. Both come with their
//! normalizer data and expected counts, so they double as end-to-end
//! fixtures for the counting pipeline.

use thiserror::Error;

use crate::counting::{MergeSpec, NormalizerImageSource, NormalizerImageSpec};
use crate::perm::{ElementId, FiniteGroup, GroupError, Permutation};
use crate::words::{EcsEntry, EpimorphismInstance, InstanceKind, Orientation, Presentation, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("fermat instances require m >= 3 and k >= 3 (got m = {m}, k = {k})")]
    BadParameters { m: usize, k: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// One element with a known component count, referred to by the label used
/// in rendered output.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExpectedCount {
    pub label: String,
    pub element: ElementId,
    pub count: u64,
}

/// A ready-to-run instance: epimorphism, normalizer data, merge data, and
/// the counts it must reproduce.
#[derive(Clone, Debug)]
pub struct CatalogInstance {
    pub name: String,
    pub epi: EpimorphismInstance,
    pub specs: Vec<NormalizerImageSpec>,
    pub merge: MergeSpec,
    pub expected: Vec<ExpectedCount>,
}

/// The order-m^k abelian action with k torsion generators of order m, one
/// per loop of the branching locus. Each generator's fixed locus has
/// exactly m^{k-1} components: the normalizer is the whole group (order
/// m^k) and n_i = m, since the source normalizer of ⟨x_i⟩ is ⟨x_i⟩ itself.
///
/// The group is realized on k disjoint m-cycles, the smallest faithful
/// degree. The source group is infinite; only its presentation travels
/// with the instance, and the normalizer words {x_i} encode the supplied
/// normalizer structure.
pub fn fermat_instance(m: usize, k: usize) -> Result<CatalogInstance, CatalogError> {
    if m < 3 || k < 3 {
        return Err(CatalogError::BadParameters { m, k });
    }
    let degree = m * k;
    let generators: Vec<Permutation> = (0..k)
        .map(|i| {
            let block: Vec<usize> = (i * m..(i + 1) * m).collect();
            Permutation::from_cycles(degree, &[block]).expect("blocks are disjoint")
        })
        .collect();
    let target = FiniteGroup::enumerate(degree, generators.clone())?;
    let images: Vec<ElementId> = generators
        .iter()
        .map(|p| target.id_of(p).expect("generators lie in their closure"))
        .collect();

    let names: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let mut relators: Vec<Word> = (0..k).map(|i| Word::generator_power(i, m as i64)).collect();
    // consecutive commutator identifications, indices cyclic:
    // [x_i, x_{i+1}^{-1}] = [x_{i+1}, x_{i+2}^{-1}]
    let comm = |i: usize, j: usize| Word::new([(i, 1), (j, -1), (i, -1), (j, 1)]);
    for i in 0..k {
        let (a, b, c) = (i, (i + 1) % k, (i + 2) % k);
        relators.push(comm(a, b).concat(&comm(b, c).inverse()));
    }
    let presentation = Presentation::new(names, relators).expect("indices in range");

    let ecs: Vec<EcsEntry> = images
        .iter()
        .enumerate()
        .map(|(i, &image)| EcsEntry {
            index: i + 1,
            order: m,
            image,
            orientation: Orientation::Preserving,
        })
        .collect();
    let epi = EpimorphismInstance::new(
        presentation,
        target,
        images.clone(),
        ecs,
        InstanceKind::General,
    )
    .expect("structurally consistent by construction");

    let specs = (0..k)
        .map(|i| NormalizerImageSpec {
            ecs_index: i + 1,
            power_divisor: m,
            source: NormalizerImageSource::GeneratorWords(vec![Word::generator_power(i, 1)]),
        })
        .collect();
    let count = (m as u64).pow(k as u32 - 1);
    let expected = images
        .iter()
        .enumerate()
        .map(|(i, &element)| ExpectedCount {
            label: format!("a{}", i + 1),
            element,
            count,
        })
        .collect();

    Ok(CatalogInstance {
        name: format!("fermat({m},{k})"),
        epi,
        specs,
        merge: MergeSpec::discrete(),
        expected,
    })
}

/// The rank-5 handlebody action: source group a free product of three
/// Z_2's generated by reflections, target Z_2^3 on six points. Each
/// reflection image fixes 4 components: |N| = 8, n_i = 2.
pub fn schottky_instance() -> CatalogInstance {
    let generators: Vec<Permutation> = (0..3)
        .map(|i| Permutation::from_cycles(6, &[vec![2 * i, 2 * i + 1]]).expect("disjoint"))
        .collect();
    let target =
        FiniteGroup::enumerate(6, generators.clone()).expect("order 8 is far below the cap");
    let images: Vec<ElementId> = generators
        .iter()
        .map(|p| target.id_of(p).expect("generators lie in their closure"))
        .collect();

    let names: Vec<String> = (1..=3).map(|i| format!("k{i}")).collect();
    let relators: Vec<Word> = (0..3).map(|i| Word::generator_power(i, 2)).collect();
    let presentation = Presentation::new(names, relators).expect("indices in range");

    let ecs: Vec<EcsEntry> = images
        .iter()
        .enumerate()
        .map(|(i, &image)| EcsEntry {
            index: i + 1,
            order: 2,
            image,
            orientation: Orientation::Reversing,
        })
        .collect();
    let epi = EpimorphismInstance::new(
        presentation,
        target,
        images.clone(),
        ecs,
        InstanceKind::General,
    )
    .expect("structurally consistent by construction");

    let specs = (0..3)
        .map(|i| NormalizerImageSpec {
            ecs_index: i + 1,
            power_divisor: 2,
            source: NormalizerImageSource::GeneratorWords(vec![Word::generator_power(i, 1)]),
        })
        .collect();
    let expected = images
        .iter()
        .enumerate()
        .map(|(i, &element)| ExpectedCount {
            label: format!("a{}", i + 1),
            element,
            count: 4,
        })
        .collect();

    CatalogInstance {
        name: "schottky".to_string(),
        epi,
        specs,
        merge: MergeSpec::discrete(),
        expected,
    }
}
