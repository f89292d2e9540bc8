//! Counts the connected components of fixed-point loci for finite group
//! actions described by an epimorphism from a finitely presented group onto
//! a finite permutation group.
//!
//! The pipeline: [`perm`] supplies the exact finite-group engine, [`words`]
//! the presentations and validated epimorphisms, [`counting`] the
//! general component count and its upper bound, [`counting2d`] the surface
//! specialization with its independent coset-fiber oracle, and [`catalog`]
//! two ready-made instances with known counts.
//!
//! Everything is exact (integer and rational arithmetic), deterministic
//! (canonical element order, full scans), and pure (no internal mutability
//! after construction).

pub mod catalog;
pub mod counting;
pub mod counting2d;
pub mod perm;
pub mod words;

pub use catalog::{
    fermat_instance, schottky_instance, CatalogError, CatalogInstance, ExpectedCount,
};
pub use counting::{
    component_count, component_upper_bound, compute_i, compute_j, resolve_n, CountError, FixReport,
    MergeBlock, MergeEntry, MergeSpec, NormalizerImageSource, NormalizerImageSpec,
};
pub use counting2d::{
    fiber_oracle_count, fuchsian_default_specs, macbeath_count, oval_count, FixCount2D,
    ReflectionClassData,
};
pub use num_rational::Rational64;
pub use perm::{ElementId, FiniteGroup, GroupError, Permutation, Subgroup, DEFAULT_GROUP_CAP};
pub use words::{
    EcsEntry, EpimorphismInstance, FuchsianSignature, InstanceKind, Orientation, Presentation,
    ValidationCheck, ValidationEntry, ValidationReport, Word, WordError,
};
