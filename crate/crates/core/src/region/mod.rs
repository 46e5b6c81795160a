//! Rasterized deviation regions over the opponents' probability simplex.
//!
//! For player `i` told to play `s_i`, the set `C(i, s_i, d_i)` collects the
//! opponent distributions under which obeying is weakly better than
//! deviating to `d_i`; `C(i, s_i)` intersects these over all `d_i`. Regions
//! are sampled on a [`SimplexGrid`] and split into connected components
//! under single-unit mass transfers.

mod export;
mod grid;
mod lcoords;
mod lift;
mod mask;
mod probe;

pub use export::{mask_to_csv, mask_to_svg, PALETTE};
pub use grid::SimplexGrid;
pub use lcoords::{from_l_coordinates, linear_form, to_l_coordinates, LCoordinates, CHAIN_TOLERANCE};
pub use lift::{check_joint_in_c_i, decompose, lift_to_joint, Decomposition};
pub use mask::{
    check_resolution, component_count, intersect_regions, rasterize_deviation_region,
    rasterize_signal_region, RegionMask, ResolutionCheck, FUZZY_BAND, MEMBERSHIP_TOLERANCE,
};
pub use probe::{
    convexity_probe, support_reduction_depth, ConvexityReport, MidpointCheck, MIDPOINT_SAMPLES,
};

/// Default grid resolution for 2-simplices.
pub const DEFAULT_RESOLUTION: usize = 200;
