//! Exact finite-group engine over permutations.
//!
//! Groups are materialized as their full element list, canonically ordered
//! (lexicographic on image arrays), and every query below is a plain scan in
//! that order. This keeps all outputs bit-reproducible across runs, which the
//! reporting layer relies on. No stabilizer chains: the groups this tool
//! meets are small enough that full enumeration wins on simplicity.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering};

use thiserror::Error;

/// Default ceiling on the order of an enumerated group.
pub const DEFAULT_GROUP_CAP: usize = 100_000;

static NEXT_STAMP: AtomicU32 = AtomicU32::new(0);

/// Identifies one enumerated group instance, so that element handles from
/// different groups cannot be mixed up silently.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
struct GroupStamp(u32);

impl GroupStamp {
    fn fresh() -> Self {
        GroupStamp(NEXT_STAMP.fetch_add(1, Ordering::Relaxed))
    }
}

/// Handle to an element of a specific [`FiniteGroup`].
///
/// The handle remembers which group issued it; passing it to a different
/// group is a caller bug and panics rather than being coerced.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ElementId {
    group: GroupStamp,
    index: u32,
}

impl ElementId {
    /// Position of the element in the canonical (lexicographic) element list.
    pub fn index(self) -> usize {
        self.index as usize
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.index)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("malformed permutation: {detail}")]
    MalformedPermutation { detail: String },
    #[error("generator degree {found} does not match group degree {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("cannot enumerate a group from an empty generator list")]
    EmptyGenerators,
    #[error("group closure exceeded the configured order cap of {cap}")]
    CapExceeded { cap: usize },
}

/// A bijection of `{0, .., degree-1}`, stored as its image array.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its image array, rejecting non-bijections.
    pub fn new(images: Vec<usize>) -> Result<Self, GroupError> {
        let degree = images.len();
        let mut seen = vec![false; degree];
        for &img in &images {
            if img >= degree || seen[img] {
                return Err(GroupError::MalformedPermutation {
                    detail: format!("image array {images:?} is not a bijection"),
                });
            }
            seen[img] = true;
        }
        Ok(Permutation { images })
    }

    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    /// Builds a permutation from disjoint cycles of 0-based points.
    pub fn from_cycles(degree: usize, cycles: &[Vec<usize>]) -> Result<Self, GroupError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut used = vec![false; degree];
        for cycle in cycles {
            for (pos, &pt) in cycle.iter().enumerate() {
                if pt >= degree {
                    return Err(GroupError::MalformedPermutation {
                        detail: format!("point {pt} exceeds degree {degree}"),
                    });
                }
                if used[pt] {
                    return Err(GroupError::MalformedPermutation {
                        detail: format!("point {pt} appears in more than one cycle"),
                    });
                }
                used[pt] = true;
                images[pt] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn image_of(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &img)| i == img)
    }

    /// `(self ∘ other)(x) = self(other(x))`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(
            self.degree(),
            other.degree(),
            "composing permutations of different degrees"
        );
        Permutation {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &img) in self.images.iter().enumerate() {
            images[img] = i;
        }
        Permutation { images }
    }

    /// Nontrivial cycles, each rotated to start at its least point and
    /// sorted by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut next = self.images[start];
            while next != start {
                seen[next] = true;
                cycle.push(next);
                next = self.images[next];
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// Cycle notation on 0-based points; identity renders as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cycle in cycles {
            write!(f, "(")?;
            for (i, pt) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{pt}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// A finite permutation group with its full element list materialized.
///
/// Elements are canonically ordered lexicographically on image arrays and
/// referred to by [`ElementId`]. The identity is always element 0 (the
/// identity image array is the lexicographic minimum over all bijections).
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    stamp: GroupStamp,
    degree: usize,
    generators: Vec<Permutation>,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, u32>,
    inverses: Vec<u32>,
}

/// Two groups are equal when they hold the same elements of the same
/// degree; the generating sets they were built from do not matter.
impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Closes the generators under composition, with the default order cap.
    pub fn enumerate(degree: usize, generators: Vec<Permutation>) -> Result<Self, GroupError> {
        Self::enumerate_capped(degree, generators, DEFAULT_GROUP_CAP)
    }

    /// Closes the generators under composition, erroring out as soon as the
    /// closure passes `cap` elements.
    pub fn enumerate_capped(
        degree: usize,
        generators: Vec<Permutation>,
        cap: usize,
    ) -> Result<Self, GroupError> {
        if generators.is_empty() {
            return Err(GroupError::EmptyGenerators);
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(GroupError::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }

        let identity = Permutation::identity(degree);
        let mut seen: HashSet<Permutation> = HashSet::new();
        seen.insert(identity.clone());
        let mut queue: VecDeque<Permutation> = VecDeque::new();
        queue.push_back(identity);
        while let Some(p) = queue.pop_front() {
            for g in &generators {
                let q = p.compose(g);
                if !seen.contains(&q) {
                    if seen.len() >= cap {
                        return Err(GroupError::CapExceeded { cap });
                    }
                    seen.insert(q.clone());
                    queue.push_back(q);
                }
            }
        }

        let mut elements: Vec<Permutation> = seen.into_iter().collect();
        elements.sort();
        assert!(
            elements[0].is_identity(),
            "identity must be the lexicographic minimum"
        );

        let index: HashMap<Permutation, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();
        let inverses: Vec<u32> = elements.iter().map(|p| index[&p.inverse()]).collect();

        Ok(FiniteGroup {
            stamp: GroupStamp::fresh(),
            degree,
            generators,
            elements,
            index,
            inverses,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn identity(&self) -> ElementId {
        self.id_at(0)
    }

    /// Element handles in canonical order.
    pub fn elements(&self) -> impl ExactSizeIterator<Item = ElementId> + '_ {
        (0..self.order()).map(|i| self.id_at(i))
    }

    /// Handle for the element at a canonical position.
    pub fn element(&self, index: usize) -> Option<ElementId> {
        (index < self.order()).then(|| self.id_at(index))
    }

    fn id_at(&self, index: usize) -> ElementId {
        ElementId {
            group: self.stamp,
            index: index as u32,
        }
    }

    fn pos(&self, id: ElementId) -> usize {
        assert_eq!(
            id.group, self.stamp,
            "element handle does not belong to this group"
        );
        id.index as usize
    }

    pub fn perm(&self, id: ElementId) -> &Permutation {
        &self.elements[self.pos(id)]
    }

    /// Looks up the handle of a permutation, if it lies in the group.
    pub fn id_of(&self, p: &Permutation) -> Option<ElementId> {
        self.index.get(p).map(|&i| self.id_at(i as usize))
    }

    pub fn compose(&self, a: ElementId, b: ElementId) -> ElementId {
        let p = self.elements[self.pos(a)].compose(&self.elements[self.pos(b)]);
        self.id_at(self.index[&p] as usize)
    }

    pub fn inverse(&self, a: ElementId) -> ElementId {
        self.id_at(self.inverses[self.pos(a)] as usize)
    }

    /// `w⁻¹ · g · w`.
    pub fn conjugated(&self, g: ElementId, w: ElementId) -> ElementId {
        let wp = &self.elements[self.pos(w)];
        let conj = wp
            .inverse()
            .compose(&self.elements[self.pos(g)])
            .compose(wp);
        self.id_at(self.index[&conj] as usize)
    }

    /// `g^e` by binary exponentiation; negative exponents go through the inverse.
    pub fn power(&self, g: ElementId, e: i64) -> ElementId {
        let (mut base, mut e) = if e < 0 {
            (self.inverse(g), e.unsigned_abs())
        } else {
            (g, e as u64)
        };
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.compose(acc, base);
            }
            base = self.compose(base, base);
            e >>= 1;
        }
        acc
    }

    /// Least `k >= 1` with `g^k = identity`.
    pub fn element_order(&self, g: ElementId) -> usize {
        let mut k = 1;
        let mut cur = g;
        while cur != self.identity() {
            cur = self.compose(cur, g);
            k += 1;
        }
        k
    }

    pub fn cyclic_subgroup(&self, g: ElementId) -> Subgroup {
        let mut members = Vec::new();
        let mut cur = self.identity();
        loop {
            members.push(cur);
            cur = self.compose(cur, g);
            if cur == self.identity() {
                break;
            }
        }
        self.subgroup_from_members(members)
    }

    /// `{ω ∈ G : ω⟨g⟩ω⁻¹ = ⟨g⟩}`, by full scan in canonical order.
    pub fn normalizer_of_cyclic(&self, g: ElementId) -> Subgroup {
        let cyc = self.member_mask(&self.cyclic_subgroup(g));
        let members = self
            .elements()
            .filter(|&w| cyc[self.conjugated(g, w).index()])
            .collect();
        self.subgroup_from_members(members)
    }

    /// `{ω ∈ G : ωg = gω}`, by full scan in canonical order.
    pub fn centralizer(&self, g: ElementId) -> Subgroup {
        let gp = &self.elements[self.pos(g)];
        let members = self
            .elements()
            .filter(|&w| {
                let wp = &self.elements[w.index()];
                wp.compose(gp) == gp.compose(wp)
            })
            .collect();
        self.subgroup_from_members(members)
    }

    /// `ω⁻¹gω` for every `ω`, in canonical `ω` order. Counting scans that
    /// test several subgroups against the same `g` share this one sweep.
    pub fn conjugates(&self, g: ElementId) -> Vec<ElementId> {
        self.elements().map(|w| self.conjugated(g, w)).collect()
    }

    /// Whether some conjugate of `g` is a power of `h`, i.e. `ω⁻¹gω ∈ ⟨h⟩`
    /// for some `ω`. The identity is a power of anything (`t = 0`).
    pub fn is_conjugate_to_power(&self, g: ElementId, h: ElementId) -> bool {
        let cyc = self.member_mask(&self.cyclic_subgroup(h));
        self.elements().any(|w| cyc[self.conjugated(g, w).index()])
    }

    /// Whether `g` and `h` are conjugate as elements.
    pub fn is_conjugate(&self, g: ElementId, h: ElementId) -> bool {
        let _ = self.pos(h);
        self.elements().any(|w| self.conjugated(g, w) == h)
    }

    /// Least element (in canonical order) of the conjugacy class of `g`,
    /// used as the deterministic class representative.
    pub fn conjugacy_class_min(&self, g: ElementId) -> ElementId {
        self.elements()
            .map(|w| self.conjugated(g, w))
            .min()
            .expect("group is never empty")
    }

    /// Closure of `elems` inside this group. The empty set generates the
    /// trivial subgroup.
    pub fn subgroup_generated(&self, elems: &[ElementId]) -> Subgroup {
        let mut mask = vec![false; self.order()];
        mask[self.identity().index()] = true;
        let mut queue: VecDeque<ElementId> = VecDeque::new();
        queue.push_back(self.identity());
        while let Some(x) = queue.pop_front() {
            for &e in elems {
                let y = self.compose(x, e);
                if !mask[y.index()] {
                    mask[y.index()] = true;
                    queue.push_back(y);
                }
            }
        }
        let members = self.elements().filter(|id| mask[id.index()]).collect();
        self.subgroup_from_members(members)
    }

    /// Membership mask over canonical element positions.
    pub fn member_mask(&self, sub: &Subgroup) -> Vec<bool> {
        assert_eq!(
            sub.parent, self.stamp,
            "subgroup does not belong to this group"
        );
        let mut mask = vec![false; self.order()];
        for &m in &sub.members {
            mask[m.index()] = true;
        }
        mask
    }

    fn subgroup_from_members(&self, mut members: Vec<ElementId>) -> Subgroup {
        members.sort();
        members.dedup();
        assert!(
            self.order().is_multiple_of(members.len()),
            "subgroup order {} does not divide group order {}",
            members.len(),
            self.order()
        );
        Subgroup {
            parent: self.stamp,
            members,
        }
    }
}

/// A subgroup of a [`FiniteGroup`], stored as the sorted list of member
/// handles. Only constructed by group queries, so closure and the Lagrange
/// divisibility condition hold by construction.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subgroup {
    parent: GroupStamp,
    members: Vec<ElementId>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[ElementId] {
        &self.members
    }

    pub fn contains(&self, id: ElementId) -> bool {
        self.members.binary_search(&id).is_ok()
    }

    /// Subset test against another subgroup of the same parent.
    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        assert_eq!(self.parent, other.parent, "subgroups of different groups");
        self.members.iter().all(|&m| other.contains(m))
    }
}
