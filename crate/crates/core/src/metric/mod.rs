//! Exact finite (pseudo)metric spaces and the standard constructions on them.

mod colimit;
mod construct;
pub mod sample;
mod space;

pub use colimit::{
    check_colimit_conditions, directed_colimit, precongruence, Colimit, PrecongruenceDiagram, PrecongruenceLevel,
};
pub use construct::{
    check_ultrametric, hausdorff_by, hausdorff_distance, hom_space, hom_space_with_limit, metric_reflection,
    nonexpanding_maps, power, product, smallest_pseudometric, sup_distance, tensor, HomSpace, Reflection,
    DEFAULT_HOM_LIMIT,
};
pub use space::{find_isometry, is_isometric, MetricSpace, NonexpandingMap, Pseudometric};
