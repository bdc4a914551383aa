use crate::render::{grid_ops, DrawList, GridSpec, OffAxisCamera};

/// One grid draw list per display camera. The grid anchor is fixed by the caller.
pub fn balance_update(grid: &GridSpec, cameras: &[OffAxisCamera]) -> Vec<DrawList> {
    cameras.iter().map(|c| grid_ops(grid, c)).collect()
}
