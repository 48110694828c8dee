//! Worked examples, checked through the bundled documents.

mod common;

use std::sync::Arc;

use common::{action, surface, workspace, QUARTIC, SURFACES};
use isoprod::family_checker::{
    check_constancy, smooth_node_orbit, smoothing_chain, ChainEnd, FamilyStratum, LocalModel, Verdict,
};
use isoprod::finite_group::{FiniteGroup, Perm, RotationChar};
use isoprod::product_surface::{
    certify_degeneration, check_free_action, check_free_codim1, fixed_point_profile, kuranishi_dimension,
    surface_invariants, SurfaceDescriptor,
};
use isoprod::{ActionData, CurveAction, DualGraph, EquivariantT1, GraphData};

fn t1(node_inv: i64, branch_inv: i64, minus_chi_inv: i64) -> EquivariantT1 {
    EquivariantT1 { node_inv, branch_inv, minus_chi_inv, total: node_inv + branch_inv + minus_chi_inv }
}

#[test]
fn quartic_node_document() {
    let ws = workspace(QUARTIC);
    let nodal = action(&ws, "nodal");
    let g = nodal.graph();
    assert_eq!(g.arithmetic_genus().unwrap(), 3);
    let b = g.t1_dimension().unwrap();
    assert_eq!((b.delta, b.branch_term, b.minus_chi, b.total), (1, 2, 3, 6));
    assert_eq!(nodal.t1_equivariant().unwrap(), t1(1, 1, 2));
    assert_eq!(nodal.t1_equivariant_oracle().unwrap(), t1(1, 1, 2));
    let s = nodal.quotient_signatures().unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!((s[0].g_prime, s[0].b, s[0].contribution), (1, 2, 2));
}

#[test]
fn smoothing_the_quartic_node() {
    let ws = workspace(QUARTIC);
    let nodal = action(&ws, "nodal");
    let smoothed = smooth_node_orbit(&nodal, 0).unwrap();
    assert_eq!(smoothed.graph().num_vertices(), 1);
    assert_eq!(smoothed.graph().num_edges(), 0);
    assert_eq!(smoothed.graph().genus(0), 3);
    let orders: Vec<u32> = smoothed.ramification_at(0).iter().map(|r| r.order).collect();
    assert_eq!(orders, vec![2, 2, 2, 2]);
    assert_eq!(smoothed.t1_equivariant().unwrap(), t1(0, 0, 4));
    // the bundled smooth fiber is the same action
    assert_eq!(action(&ws, "smoothed").t1_equivariant().unwrap(), t1(0, 0, 4));

    let chain = smoothing_chain(&nodal);
    assert_eq!(chain.strata.len(), 2);
    assert_eq!(chain.steps[0].model, LocalModel::Swap);
    assert_eq!(chain.end, ChainEnd::Smooth);
}

#[test]
fn quartic_family_is_constant() {
    let ws = workspace(QUARTIC);
    let strata: Vec<FamilyStratum> = ws.families["quartic"]
        .iter()
        .map(|n| FamilyStratum::new(n.clone(), action(&ws, n)))
        .collect();
    let r = check_constancy(&strata).unwrap();
    assert_eq!(r.verdict, Verdict::Constant { value: 4 });
    assert!(r.semicontinuity.iter().all(|s| s.holds));
}

#[test]
fn dropping_a_ramification_orbit_from_a_fiber() {
    // Dropping any of the four orbits breaks Riemann-Hurwitz; only the free
    // action with all four gone is consistent, and then the family jumps.
    let ws = workspace(QUARTIC);
    let good = action(&ws, "smoothed");
    let mut data = good.data().clone();
    data.ramification.pop();
    let one = CurveAction::new(good.group().clone(), good.graph().clone(), data.clone()).unwrap();
    assert!(one.t1_equivariant().is_err());
    let r = check_constancy(&[
        FamilyStratum::new("nodal", action(&ws, "nodal")),
        FamilyStratum::new("corrupted", one),
    ])
    .unwrap();
    assert_eq!(r.verdict, Verdict::Failed { labels: vec!["corrupted".into()] });

    for _ in 1..3 {
        data.ramification.pop();
        let a = CurveAction::new(good.group().clone(), good.graph().clone(), data.clone()).unwrap();
        assert!(a.quotient_signature(0).is_err());
    }
    data.ramification.pop();
    let free = CurveAction::new(good.group().clone(), good.graph().clone(), data).unwrap();
    assert_eq!(free.quotient_signature(0).unwrap().g_prime, 2);
    let r = check_constancy(&[
        FamilyStratum::new("nodal", action(&ws, "nodal")),
        FamilyStratum::new("corrupted", free),
    ])
    .unwrap();
    assert!(matches!(r.verdict, Verdict::Violation { first_value: 4, second_value: 3, .. }));
}

#[test]
fn surfaces_document() {
    let ws = workspace(SURFACES);

    let quartic = action(&ws, "quartic");
    assert!(fixed_point_profile(&quartic).iter().all(|p| p.has_fixed_point && !p.fixes_component));
    let fixed = action(&ws, "fixed_component");
    assert!(fixed_point_profile(&fixed).iter().all(|p| p.fixes_component));

    let codim1 = surface(&ws, "codim1_free");
    assert!(!check_free_action(&codim1).pass);
    assert!(check_free_codim1(&codim1).pass);
    let cert = certify_degeneration(&codim1);
    assert!(cert.pass);
    assert_eq!(cert.conditions.iter().map(|c| c.id).collect::<String>(), "abcde");

    let failing = surface(&ws, "fixed_curve");
    let cert = certify_degeneration(&failing);
    assert!(!cert.pass);
    assert_eq!(cert.first_failure().unwrap().id, 'b');

    let iso = surface(&ws, "isogenous");
    assert!(check_free_action(&iso).pass);
    let inv = surface_invariants(&iso).unwrap();
    assert_eq!(
        (*inv.chi.numer(), *inv.k_squared.numer(), *inv.euler.numer(), inv.q),
        (1, 8, 4, Some(3))
    );
    assert_eq!(inv.p_g.unwrap(), 3.into());
}

fn smooth_curve(genus: u32) -> DualGraph {
    DualGraph::validate(GraphData { genera: vec![genus], ..Default::default() }).unwrap()
}

#[test]
fn kuranishi_examples() {
    let trivial = || CurveAction::trivial(smooth_curve(2));
    let s = SurfaceDescriptor::new(trivial(), trivial(), true).unwrap();
    assert_eq!(kuranishi_dimension(&s).unwrap().total, 6);

    let ws = workspace(QUARTIC);
    let fiber = action(&ws, "smoothed");
    let s = SurfaceDescriptor::new(fiber.clone(), fiber.clone(), true).unwrap();
    assert_eq!(kuranishi_dimension(&s).unwrap().total, 8);
    let s = SurfaceDescriptor::new(action(&ws, "nodal"), fiber, true).unwrap();
    let k = kuranishi_dimension(&s).unwrap();
    assert_eq!((k.factor1.total, k.factor2.total, k.total), (4, 4, 8));
}

#[test]
fn trivial_group_reduces_to_graph_count() {
    let theta = DualGraph::validate(GraphData {
        genera: vec![0, 0],
        half_edges: vec![0, 1, 0, 1, 0, 1],
        edges: vec![[0, 1], [2, 3], [4, 5]],
        marks: vec![],
    })
    .unwrap();
    let b = theta.t1_dimension().unwrap();
    let a = CurveAction::trivial(theta);
    assert_eq!(a.t1_equivariant().unwrap(), EquivariantT1::from(b));
    assert_eq!(a.t1_equivariant().unwrap(), t1(3, 6, -6));

    let chain = smoothing_chain(&a);
    assert_eq!(chain.strata.len(), 4);
    assert!(chain.strata.iter().all(|s| s.graph().arithmetic_genus().unwrap() == 2));
    assert!(chain.strata.iter().all(|s| s.t1_equivariant().unwrap().total == 3));
}

#[test]
fn branch_preserving_node_with_opposite_characters() {
    // Z2 fixes both branches of a self-node with tangent characters (-1, -1).
    let z2 = Arc::new(FiniteGroup::cyclic(2));
    let sigma = Perm::from_cycles(2, &[vec![0, 1]]).unwrap();
    let half = RotationChar::new(1, 2).unwrap();
    let graph = DualGraph::validate(GraphData {
        genera: vec![2],
        half_edges: vec![0, 0],
        edges: vec![[0, 1]],
        marks: vec![],
    })
    .unwrap();
    let mut data = ActionData::identity(&z2, &graph);
    data.tangent_chars = (0..2)
        .map(|h| isoprod::equivariant_action::TangentCharDecl { element: sigma.clone(), half_edge: h, value: half })
        .collect();
    let a = CurveAction::new(z2.clone(), graph.clone(), data.clone()).unwrap();
    assert_eq!(a.smoothing_char(1, 0), Some(RotationChar::TRIVIAL));
    assert_eq!((a.node_invariants(), a.branch_invariants()), (1, 0));
    let smoothed = smooth_node_orbit(&a, 0).unwrap();
    assert_eq!(smoothed.graph().genus(0), 3);
    assert!(smoothed.ramification_at(0).len() == a.ramification_at(0).len());
    assert_eq!(
        smoothed.t1_equivariant().unwrap().total,
        a.t1_equivariant().unwrap().total
    );

    // declaring the smoothing character -1 contradicts the product rule
    data.smoothing_chars = vec![isoprod::equivariant_action::SmoothingCharDecl { element: sigma, edge: 0, value: half }];
    assert!(CurveAction::new(z2, graph, data).is_err());
}

#[test]
fn trivial_surface_invariants() {
    let a = CurveAction::trivial(smooth_curve(2));
    let s = SurfaceDescriptor::new(a.clone(), a, true).unwrap();
    let inv = surface_invariants(&s).unwrap();
    assert_eq!(inv.chi, 1.into());
    assert_eq!(inv.k_squared, 8.into());
    assert_eq!(inv.euler, 4.into());
    assert_eq!(inv.q, Some(4));
    assert_eq!(inv.p_g, Some(4.into()));
}
