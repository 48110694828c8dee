#![allow(dead_code)]

use std::sync::Arc;

use isoprod::cli_io::{parse, Workspace};
use isoprod::finite_group::{FiniteGroup, DEFAULT_GROUP_CAP};
use isoprod::product_surface::SurfaceDescriptor;
use isoprod::random::{small_group, ActionGenerator, ActionParams, SMALL_GROUPS};
use isoprod::CurveAction;
use rand::Rng;

pub const QUARTIC: &str = include_str!("../../examples/quartic_node.json");
pub const SURFACES: &str = include_str!("../../examples/surfaces.json");

pub fn workspace(text: &str) -> Workspace {
    let doc = parse(text).expect("example parses");
    Workspace::load(&doc, DEFAULT_GROUP_CAP)
}

pub fn action(ws: &Workspace, name: &str) -> CurveAction {
    ws.actions[name].clone().expect("example action validates")
}

pub fn surface(ws: &Workspace, name: &str) -> SurfaceDescriptor {
    ws.surfaces[name].clone().expect("example surface validates")
}

/// Groups of order 1, 2, 3, 4 and 6.
pub fn groups() -> Vec<Arc<FiniteGroup>> {
    SMALL_GROUPS
        .iter()
        .map(|n| Arc::new(small_group(n).unwrap()))
        .collect()
}

/// A surface over a random small group, or `None` if a factor has genus
/// below 2. Factors are smooth with probability one half each.
pub fn random_surface<R: Rng>(rng: &mut R, groups: &[Arc<FiniteGroup>]) -> Option<SurfaceDescriptor> {
    let g = groups[rng.gen_range(0..groups.len())].clone();
    let factor = |rng: &mut R| {
        let params = if rng.gen_bool(0.5) {
            ActionParams::smooth()
        } else {
            ActionParams::default()
        };
        ActionGenerator::with_params(g.clone(), params).sample(rng)
    };
    let a = factor(rng);
    let b = factor(rng);
    SurfaceDescriptor::new(a, b, true).ok()
}
