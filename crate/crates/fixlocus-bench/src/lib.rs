//! Instance builders for the benchmarks: a hyperelliptic-type action and a
//! dihedral quadrilateral action, both small enough to set up cheaply but
//! large enough that the counting sweeps dominate.

use fixlocus_core::{
    EcsEntry, EpimorphismInstance, FiniteGroup, FuchsianSignature, InstanceKind, Orientation,
    Permutation, Presentation, Word,
};

fn signature_presentation(periods: &[usize]) -> Presentation {
    let names = (1..=periods.len()).map(|i| format!("x{i}")).collect();
    let mut relators: Vec<Word> = periods
        .iter()
        .enumerate()
        .map(|(i, &m)| Word::new([(i, m as i64)]))
        .collect();
    relators.push(Word::new((0..periods.len()).map(|i| (i, 1))));
    Presentation::new(names, relators).expect("generator names are distinct")
}

fn surface_instance(
    periods: &[usize],
    target: FiniteGroup,
    images: Vec<Permutation>,
) -> EpimorphismInstance {
    let ids: Vec<_> = images
        .iter()
        .map(|p| target.id_of(p).expect("image lies in the target"))
        .collect();
    let ecs = ids
        .iter()
        .zip(periods)
        .enumerate()
        .map(|(i, (&image, &m))| EcsEntry {
            index: i + 1,
            order: m,
            image,
            orientation: Orientation::Preserving,
        })
        .collect();
    let sig = FuchsianSignature::new(0, periods.to_vec()).expect("periods are at least 2");
    let epi = EpimorphismInstance::new(
        signature_presentation(periods),
        target,
        ids,
        ecs,
        InstanceKind::FuchsianSignature(sig),
    )
    .expect("structure is consistent");
    assert!(epi.validate().passed());
    epi
}

/// (0; 2, ..., 2) with 2g+2 periods onto the order-2 group: the
/// hyperelliptic involution picture, whose fixed-point count is 2g+2.
pub fn hyperelliptic_instance(genus: usize) -> EpimorphismInstance {
    let flip = Permutation::from_cycles(2, &[vec![0, 1]]).unwrap();
    let target = FiniteGroup::enumerate(2, vec![flip.clone()]).unwrap();
    let periods = vec![2; 2 * genus + 2];
    let images = vec![flip; 2 * genus + 2];
    surface_instance(&periods, target, images)
}

/// (0; 2, 2, 2, 2) onto the dihedral group of order 2n, via four
/// reflections with product one. Conjugacy classes are rich enough here to
/// exercise the normalizer and orbit scans.
pub fn dihedral_quadrilateral_instance(n: usize) -> EpimorphismInstance {
    assert!(
        n >= 3 && n.is_multiple_of(2),
        "even n keeps two reflection classes"
    );
    let rotation = Permutation::new((0..n).map(|p| (p + 1) % n).collect()).unwrap();
    let mirror = Permutation::new((0..n).map(|p| (n - p) % n).collect()).unwrap();
    let target = FiniteGroup::enumerate(n, vec![rotation.clone(), mirror.clone()]).unwrap();
    // s, s r, s, s r^{-1}: involutions with product identity generating D_n
    let images = vec![
        mirror.clone(),
        mirror.compose(&rotation),
        mirror.clone(),
        mirror.compose(&rotation.inverse()),
    ];
    surface_instance(&[2, 2, 2, 2], target, images)
}
