//! Corpus machinery shared by the integration suites: target-group
//! constructors, a deterministic search for smooth signature epimorphisms,
//! a curated sweep over signature shapes and small target groups, and a
//! seeded randomized batch.
//!
//! Smoothness is arranged by construction (torsion generators are mapped to
//! elements of exactly the period order, the last one solved from the long
//! relation) and then re-checked through the public validation report, so
//! every instance the corpus hands out is a certified smooth epimorphism.

#![allow(dead_code)]

use fixlocus_core::{
    EcsEntry, ElementId, EpimorphismInstance, FiniteGroup, FuchsianSignature, InstanceKind,
    Orientation, Permutation,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub struct CorpusInstance {
    pub name: String,
    pub epi: EpimorphismInstance,
}

/// Cyclic group of order n, one generator, realized on one cycle per
/// maximal prime-power factor (the smallest faithful degree).
pub fn cyclic_group(n: usize) -> FiniteGroup {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut next_point = 0;
    let mut rest = n;
    let mut p = 2;
    while rest > 1 {
        if rest.is_multiple_of(p) {
            let mut q = 1;
            while rest.is_multiple_of(p) {
                q *= p;
                rest /= p;
            }
            blocks.push((next_point..next_point + q).collect());
            next_point += q;
        }
        p += 1;
    }
    if blocks.is_empty() {
        // n = 1: trivial group on one point
        return FiniteGroup::enumerate(1, vec![Permutation::identity(1)]).unwrap();
    }
    let degree = next_point;
    let gen = Permutation::from_cycles(degree, &blocks).unwrap();
    let group = FiniteGroup::enumerate(degree, vec![gen]).unwrap();
    assert_eq!(group.order(), n);
    group
}

/// Dihedral group of order 2n on the n vertices of the regular n-gon.
pub fn dihedral_group(n: usize) -> FiniteGroup {
    assert!(n >= 3);
    let rotation = Permutation::from_cycles(n, &[(0..n).collect()]).unwrap();
    let reflection = Permutation::new((0..n).map(|i| (n - i) % n).collect()).unwrap();
    let group = FiniteGroup::enumerate(n, vec![rotation, reflection]).unwrap();
    assert_eq!(group.order(), 2 * n);
    group
}

/// Direct product of cyclic factors, one cycle per factor.
pub fn abelian_group(factors: &[usize]) -> FiniteGroup {
    let degree: usize = factors.iter().sum();
    let mut gens = Vec::new();
    let mut start = 0;
    for &f in factors {
        gens.push(Permutation::from_cycles(degree, &[(start..start + f).collect()]).unwrap());
        start += f;
    }
    let group = FiniteGroup::enumerate(degree, gens).unwrap();
    assert_eq!(group.order(), factors.iter().product::<usize>());
    group
}

/// Element orders indexed by canonical position.
pub fn order_table(group: &FiniteGroup) -> Vec<usize> {
    group.elements().map(|g| group.element_order(g)).collect()
}

fn elements_of_exact_order(
    group: &FiniteGroup,
    orders: &[usize],
    want: usize,
    cap: usize,
) -> Vec<ElementId> {
    group
        .elements()
        .filter(|id| orders[id.index()] == want)
        .take(cap)
        .collect()
}

/// A thin, evenly spread element sample used for the handle slots of
/// positive-genus shapes, where any element is admissible. The declared
/// generators are always included so generation stays within reach even
/// when the spread misses every generating element.
fn spread_sample(group: &FiniteGroup, cap: usize) -> Vec<ElementId> {
    let n = group.order();
    let step = (n / cap).max(1);
    let mut indices: Vec<usize> = (0..n).step_by(step).take(cap).collect();
    for perm in group.generators() {
        let id = group.id_of(perm).unwrap();
        if !indices.contains(&id.index()) {
            indices.push(id.index());
        }
    }
    indices.sort_unstable();
    indices
        .into_iter()
        .map(|i| group.element(i).unwrap())
        .collect()
}

/// Builds the instance for a full image assignment, or returns None when
/// the assignment is not a smooth epimorphism.
fn instance_from_images(
    sig: &FuchsianSignature,
    target: &FiniteGroup,
    images: &[ElementId],
    orders: &[usize],
) -> Option<EpimorphismInstance> {
    let periods = sig.periods();
    for (i, &m) in periods.iter().enumerate() {
        if orders[images[i].index()] != m {
            return None;
        }
    }
    if target.subgroup_generated(images).order() != target.order() {
        return None;
    }
    let ecs = periods
        .iter()
        .enumerate()
        .map(|(i, &m)| EcsEntry {
            index: i + 1,
            order: m,
            image: images[i],
            orientation: Orientation::Preserving,
        })
        .collect();
    let epi = EpimorphismInstance::new(
        sig.to_presentation(),
        target.clone(),
        images.to_vec(),
        ecs,
        InstanceKind::FuchsianSignature(sig.clone()),
    )
    .ok()?;
    epi.validate().passed().then_some(epi)
}

/// Product of commutators [a_1,b_1]...[a_h,b_h] for the handle images.
fn commutator_product(group: &FiniteGroup, handles: &[ElementId]) -> ElementId {
    let mut acc = group.identity();
    for pair in handles.chunks(2) {
        let (a, b) = (pair[0], pair[1]);
        let comm = group.compose(
            group.compose(a, b),
            group.compose(group.inverse(a), group.inverse(b)),
        );
        acc = group.compose(acc, comm);
    }
    acc
}

/// Deterministic search for smooth epimorphisms of the given signature
/// onto the target: handles and all torsion slots but the last are chosen
/// from capped candidate lists in canonical order, the last torsion image
/// is solved from the long relation, and candidates are checked for exact
/// order and joint generation. Returns up to `limit` instances.
pub fn find_smooth_epimorphisms(
    sig: &FuchsianSignature,
    target: &FiniteGroup,
    limit: usize,
) -> Vec<EpimorphismInstance> {
    let orders = order_table(target);
    let periods = sig.periods();
    let r = periods.len();
    let h = sig.orbit_genus();
    let slot_cap = if target.order() > 120 { 10 } else { 24 };
    let handle_cap = if target.order() > 120 { 6 } else { 10 };

    let free_slots = r.saturating_sub(1);
    let slot_candidates: Vec<Vec<ElementId>> = (0..free_slots)
        .map(|i| elements_of_exact_order(target, &orders, periods[i], slot_cap))
        .collect();
    let handle_candidates = if h > 0 {
        spread_sample(target, handle_cap)
    } else {
        vec![target.identity()]
    };

    let mut found = Vec::new();
    let mut budget: usize = 50_000;

    // one assignment of all 2h handle slots per index vector
    let handle_count = 2 * h;
    let mut handle_idx = vec![0usize; handle_count];
    loop {
        let handles: Vec<ElementId> = handle_idx.iter().map(|&i| handle_candidates[i]).collect();
        let commutators = commutator_product(target, &handles);

        let mut stack: Vec<ElementId> = Vec::new();
        dfs_slots(
            sig,
            target,
            &orders,
            &slot_candidates,
            &handles,
            commutators,
            &mut stack,
            &mut found,
            limit,
            &mut budget,
        );
        if found.len() >= limit || budget == 0 {
            break;
        }

        // advance the handle index vector; done when it wraps
        let mut pos = 0;
        loop {
            if pos == handle_count {
                return found;
            }
            handle_idx[pos] += 1;
            if handle_idx[pos] < handle_candidates.len() {
                break;
            }
            handle_idx[pos] = 0;
            pos += 1;
        }
        if handle_count == 0 {
            break;
        }
    }
    found
}

#[allow(clippy::too_many_arguments)]
fn dfs_slots(
    sig: &FuchsianSignature,
    target: &FiniteGroup,
    orders: &[usize],
    slot_candidates: &[Vec<ElementId>],
    handles: &[ElementId],
    commutators: ElementId,
    stack: &mut Vec<ElementId>,
    found: &mut Vec<EpimorphismInstance>,
    limit: usize,
    budget: &mut usize,
) {
    if found.len() >= limit || *budget == 0 {
        return;
    }
    *budget -= 1;
    let r = sig.periods().len();
    if stack.len() == slot_candidates.len() {
        let mut images = stack.clone();
        if r > 0 {
            // long relation: x_1 .. x_r [a_1,b_1] .. [a_h,b_h] = 1
            let mut prefix = target.identity();
            for &x in stack.iter() {
                prefix = target.compose(prefix, x);
            }
            let last = target.compose(target.inverse(prefix), target.inverse(commutators));
            images.push(last);
        } else if commutators != target.identity() {
            return;
        }
        images.extend_from_slice(handles);
        if let Some(epi) = instance_from_images(sig, target, &images, orders) {
            found.push(epi);
        }
        return;
    }
    for &cand in &slot_candidates[stack.len()] {
        stack.push(cand);
        dfs_slots(
            sig,
            target,
            orders,
            slot_candidates,
            handles,
            commutators,
            stack,
            found,
            limit,
            budget,
        );
        stack.pop();
        if found.len() >= limit || *budget == 0 {
            return;
        }
    }
}

/// Signature shapes (h, periods) admissible for a group with the given set
/// of available element orders: r <= 6, periods <= 12, and non-spherical
/// orbifold curvature (2h - 2 + sum(1 - 1/m) >= 0).
fn shapes_for(available: &[usize]) -> Vec<(usize, Vec<usize>)> {
    let mut shapes: Vec<(usize, Vec<usize>)> = Vec::new();
    let has = |d: usize| available.contains(&d);
    for &d in available {
        if d >= 3 {
            shapes.push((0, vec![d, d, d]));
        }
        shapes.push((0, vec![d, d, d, d]));
        if has(2) {
            shapes.push((0, vec![2, 2, d, d]));
            shapes.push((0, vec![2, 2, 2, d]));
        }
        shapes.push((1, vec![d]));
    }
    if has(2) {
        shapes.push((0, vec![2; 5]));
        shapes.push((0, vec![2; 6]));
        shapes.push((1, vec![2, 2]));
    }
    if has(2) && has(4) {
        shapes.push((0, vec![2, 4, 4]));
    }
    if has(2) && has(3) && has(6) {
        shapes.push((0, vec![2, 3, 6]));
    }
    if has(3) && has(6) {
        shapes.push((0, vec![3, 6, 6]));
    }
    shapes.push((1, vec![]));
    shapes.push((2, vec![]));

    shapes.retain(|(h, periods)| {
        let r = periods.len();
        if r > 6 || periods.iter().any(|&m| m > 12) {
            return false;
        }
        // curvature numerator of 2h - 2 + sum(1 - 1/m), over denominator lcm:
        // test the sign with exact rationals avoided via f64-free arithmetic
        let mut num: i64 = (2 * *h as i64 - 2) + r as i64;
        let mut scaled: i64 = 0;
        let lcm = periods.iter().fold(1i64, |acc, &m| {
            let m = m as i64;
            acc / gcd(acc, m) * m
        });
        num *= lcm;
        for &m in periods.iter() {
            scaled += lcm / m as i64;
        }
        num - scaled >= 0
    });
    shapes.sort();
    shapes.dedup();
    shapes
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn available_orders(group: &FiniteGroup, orders: &[usize]) -> Vec<usize> {
    let _ = group;
    let mut out: Vec<usize> = (2..=12).filter(|d| orders.contains(d)).collect();
    out.dedup();
    out
}

/// The target pool: cyclic, dihedral, and abelian groups up to order 500.
/// The flag marks groups big enough that only a couple of shapes are
/// sampled, to keep full-group sweeps inside the time budget.
pub fn group_pool() -> Vec<(String, FiniteGroup, bool)> {
    let mut pool: Vec<(String, FiniteGroup, bool)> = Vec::new();
    for n in [2usize, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 30, 48, 105] {
        pool.push((format!("Z{n}"), cyclic_group(n), false));
    }
    for n in [256usize, 420, 500] {
        pool.push((format!("Z{n}"), cyclic_group(n), true));
    }
    for n in [3usize, 4, 5, 6, 7, 9, 12, 24, 48] {
        pool.push((format!("D{n}"), dihedral_group(n), false));
    }
    pool.push(("D250".to_string(), dihedral_group(250), true));
    for factors in [
        vec![2, 2],
        vec![2, 4],
        vec![3, 3],
        vec![2, 6],
        vec![4, 4],
        vec![2, 2, 2],
        vec![3, 9],
        vec![6, 6],
        vec![10, 10],
    ] {
        let label = factors
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join("x");
        pool.push((format!("Z{label}"), abelian_group(&factors), false));
    }
    pool.push(("Z12x12".to_string(), abelian_group(&[12, 12]), true));
    pool.push(("Z2x250".to_string(), abelian_group(&[2, 250]), true));
    pool
}

/// The curated corpus: a deterministic sweep of every admissible shape
/// against every pool group, one instance per solvable pairing (two
/// shapes only for the big groups).
pub fn curated_corpus() -> Vec<CorpusInstance> {
    let mut out = Vec::new();
    for (name, group, big) in group_pool() {
        let orders = order_table(&group);
        let available = available_orders(&group, &orders);
        let mut shapes = shapes_for(&available);
        if big {
            // keep the sweep affordable: two planar shapes plus the
            // genus-one shapes whose handles can carry the generators
            let planar: Vec<_> = shapes
                .iter()
                .filter(|(h, periods)| *h == 0 && periods.len() <= 4)
                .take(2)
                .cloned()
                .collect();
            let genus_one: Vec<_> = shapes
                .iter()
                .filter(|(h, periods)| *h == 1 && periods.len() <= 2)
                .cloned()
                .collect();
            shapes = planar;
            shapes.extend(genus_one);
        }
        for (h, periods) in shapes {
            let sig = FuchsianSignature::new(h, periods.clone()).unwrap();
            for (i, epi) in find_smooth_epimorphisms(&sig, &group, 1)
                .into_iter()
                .enumerate()
            {
                out.push(CorpusInstance {
                    name: format!("{name} ({h}; {periods:?}) #{i}"),
                    epi,
                });
            }
        }
    }
    out
}

/// Randomized instances over the small end of the pool, seeded, accepted
/// only when validation passes.
pub fn randomized_corpus(count: usize) -> Vec<CorpusInstance> {
    type PoolEntry = (String, FiniteGroup, Vec<usize>, Vec<(usize, Vec<usize>)>);
    let pool: Vec<PoolEntry> = group_pool()
        .into_iter()
        .filter(|(_, g, big)| !big && g.order() <= 120 && g.order() > 1)
        .map(|(name, group, _)| {
            let orders = order_table(&group);
            let available = available_orders(&group, &orders);
            let shapes = shapes_for(&available);
            (name, group, orders, shapes)
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(0xF1C5_0C05);
    let mut out = Vec::new();
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 200_000, "randomized corpus generation stalled");
        let (name, group, orders, shapes) = &pool[rng.gen_range(0..pool.len())];
        if shapes.is_empty() {
            continue;
        }
        let (h, periods) = shapes[rng.gen_range(0..shapes.len())].clone();
        let sig = FuchsianSignature::new(h, periods.clone()).unwrap();
        let r = periods.len();

        let mut images: Vec<ElementId> = Vec::new();
        let mut ok = true;
        for &m in periods.iter().take(r.saturating_sub(1)) {
            let candidates: Vec<ElementId> = group
                .elements()
                .filter(|id| orders[id.index()] == m)
                .collect();
            if candidates.is_empty() {
                ok = false;
                break;
            }
            images.push(candidates[rng.gen_range(0..candidates.len())]);
        }
        if !ok {
            continue;
        }
        let handles: Vec<ElementId> = (0..2 * h)
            .map(|_| group.element(rng.gen_range(0..group.order())).unwrap())
            .collect();
        let commutators = commutator_product(group, &handles);
        if r > 0 {
            let mut prefix = group.identity();
            for &x in &images {
                prefix = group.compose(prefix, x);
            }
            images.push(group.compose(group.inverse(prefix), group.inverse(commutators)));
        } else if commutators != group.identity() {
            continue;
        }
        images.extend_from_slice(&handles);
        if let Some(epi) = instance_from_images(&sig, group, &images, orders) {
            out.push(CorpusInstance {
                name: format!("{name} ({h}; {periods:?}) random #{}", out.len()),
                epi,
            });
        }
    }
    out
}

/// The full corpus for the oracle-equivalence and specialization sweeps.
pub fn full_corpus() -> Vec<CorpusInstance> {
    let mut corpus = curated_corpus();
    corpus.extend(randomized_corpus(50));
    corpus
}
