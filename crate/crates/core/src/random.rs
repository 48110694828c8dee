//! Random stable graphs and random valid group actions for property tests,
//! acceptance runs and benchmarks.
//!
//! Actions are assembled from coset data: a vertex orbit is `G/S` with a
//! kernel `K ⊴ S`, and an edge orbit is either two half-edge orbits `G/P`
//! glued pointwise, or one half-edge orbit `G/P` whose points are paired by
//! an element `σ` normalizing `P` with `σ² ∈ P`. Genera are then chosen by
//! Riemann–Hurwitz so every sample passes validation.

use std::sync::Arc;

use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::curve_graph::{DualGraph, GraphData};
use crate::equivariant_action::{
    ActionData, CurveAction, KernelDecl, RamificationDecl, SmoothingCharDecl, TangentCharDecl,
};
use crate::finite_group::{CharTable, FiniteGroup, Perm, RotationChar, Subgroup};

/// Names of the small groups used by the random suites.
pub const SMALL_GROUPS: [&str; 7] = ["Z1", "Z2", "Z3", "Z4", "Z2xZ2", "Z6", "S3"];

/// One of [`SMALL_GROUPS`] as a permutation group.
pub fn small_group(name: &str) -> Option<FiniteGroup> {
    let cyc = |n: usize, c: &[usize]| Perm::from_cycles(n, &[c.to_vec()]).expect("cycle");
    let g = match name {
        "Z1" => FiniteGroup::trivial(),
        "Z2" => FiniteGroup::cyclic(2),
        "Z3" => FiniteGroup::cyclic(3),
        "Z4" => FiniteGroup::cyclic(4),
        "Z6" => FiniteGroup::cyclic(6),
        "Z2xZ2" => FiniteGroup::enumerate(vec![cyc(4, &[0, 1]), cyc(4, &[2, 3])], 4).ok()?,
        "S3" => FiniteGroup::enumerate(vec![cyc(3, &[0, 1, 2]), cyc(3, &[0, 1])], 3).ok()?,
        _ => return None,
    };
    Some(g)
}

/// A connected stable graph with at most `max_vertices` vertices and
/// `max_edges` edges; vertex genera start below `max_genus` and are raised
/// only as far as stability requires.
pub fn random_stable_graph<R: Rng + ?Sized>(
    rng: &mut R,
    max_vertices: usize,
    max_genus: u32,
    max_edges: usize,
) -> DualGraph {
    let nv = rng.gen_range(1..=max_vertices.max(1));
    let min_edges = nv - 1;
    let ne = rng.gen_range(min_edges..=max_edges.max(min_edges));
    let mut ends: Vec<(usize, usize)> = (1..nv).map(|i| (rng.gen_range(0..i), i)).collect();
    while ends.len() < ne {
        ends.push((rng.gen_range(0..nv), rng.gen_range(0..nv)));
    }
    let mut data = GraphData {
        genera: (0..nv).map(|_| rng.gen_range(0..=max_genus)).collect(),
        ..Default::default()
    };
    for (u, v) in ends {
        let h = data.half_edges.len();
        data.half_edges.extend([u, v]);
        data.edges.push([h, h + 1]);
    }
    let mut valence = vec![0i64; nv];
    for &v in &data.half_edges {
        valence[v] += 1;
    }
    for v in 0..nv {
        while 2 * data.genera[v] as i64 - 2 + valence[v] <= 0 {
            data.genera[v] += 1;
        }
    }
    DualGraph::validate(data).expect("connected and stable by construction")
}

/// Left cosets `xS`, indexed in order of their least element.
#[derive(Debug, Clone)]
struct Cosets {
    reps: Vec<usize>,
    of: Vec<usize>,
}

impl Cosets {
    fn new(g: &FiniteGroup, s: &Subgroup) -> Self {
        let mut of = vec![usize::MAX; g.order()];
        let mut reps = Vec::new();
        for x in 0..g.order() {
            if of[x] == usize::MAX {
                for &h in s.elements() {
                    of[g.mul(x, h)] = reps.len();
                }
                reps.push(x);
            }
        }
        Cosets { reps, of }
    }

    fn len(&self) -> usize {
        self.reps.len()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ActionParams {
    pub max_vertex_orbits: usize,
    pub max_edge_orbits: usize,
    pub max_quotient_genus: u64,
    pub max_extra_branch: usize,
    /// Probability of choosing characters that make a node orbit smoothable.
    pub smoothable_bias: f64,
    /// One vertex fixed by the whole group acting faithfully, no nodes.
    pub smooth: bool,
}

impl Default for ActionParams {
    fn default() -> Self {
        ActionParams {
            max_vertex_orbits: 3,
            max_edge_orbits: 4,
            max_quotient_genus: 2,
            max_extra_branch: 3,
            smoothable_bias: 0.5,
            smooth: false,
        }
    }
}

impl ActionParams {
    pub fn smooth() -> Self {
        ActionParams {
            max_vertex_orbits: 1,
            max_edge_orbits: 0,
            smooth: true,
            ..Default::default()
        }
    }
}

struct VertexOrbit {
    stab: Subgroup,
    kernel: Subgroup,
    cosets: Cosets,
    offset: usize,
}

struct HalfEdgeOrbit {
    cosets: Cosets,
    offset: usize,
    vertex_orbit: usize,
    /// The base half-edge sits at `base · v_i`.
    base: usize,
    chars: CharTable,
}

enum EdgeOrbit {
    Pair { a: usize, b: usize },
    Swap { a: usize, sigma: usize, cosets: Cosets, psi: RotationChar },
}

/// Samples valid actions of a fixed group.
#[derive(Debug, Clone)]
pub struct ActionGenerator {
    group: Arc<FiniteGroup>,
    subgroups: Vec<Subgroup>,
    pub params: ActionParams,
}

const MAX_ATTEMPTS: usize = 100_000;

impl ActionGenerator {
    pub fn new(group: Arc<FiniteGroup>) -> Self {
        Self::with_params(group, ActionParams::default())
    }

    pub fn with_params(group: Arc<FiniteGroup>, params: ActionParams) -> Self {
        let subgroups = group.all_subgroups();
        ActionGenerator {
            group,
            subgroups,
            params,
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// A valid action on a connected unmarked stable curve.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> CurveAction {
        for _ in 0..MAX_ATTEMPTS {
            if let Some(a) = self.try_sample(rng) {
                if a.t1_equivariant().is_ok() {
                    return a;
                }
            }
        }
        panic!("no valid action found after {MAX_ATTEMPTS} attempts");
    }

    fn characters_with_kernel(&self, p: &Subgroup, kernel: &Subgroup) -> Vec<CharTable> {
        self.group
            .linear_characters(p)
            .into_iter()
            .filter(|t| {
                let ker: Vec<usize> = t.iter().filter(|(_, c)| c.is_trivial()).map(|(&h, _)| h).collect();
                ker == kernel.elements()
            })
            .collect()
    }

    fn try_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<CurveAction> {
        let g = &*self.group;
        let p = self.params;

        // vertex orbits
        let n_vorb = rng.gen_range(1..=p.max_vertex_orbits.max(1));
        let mut vorbs: Vec<VertexOrbit> = Vec::new();
        let mut nv = 0;
        for i in 0..n_vorb {
            let stab = if p.smooth || (i == 0 && rng.gen_bool(0.5)) {
                g.whole()
            } else {
                self.subgroups.choose(rng)?.clone()
            };
            let kernel = if p.smooth {
                g.trivial_subgroup()
            } else {
                let normal: Vec<&Subgroup> = self
                    .subgroups
                    .iter()
                    .filter(|k| k.is_subset_of(&stab) && g.is_normal_in(k, &stab))
                    .collect();
                if rng.gen_bool(0.6) {
                    g.trivial_subgroup()
                } else {
                    (*normal.choose(rng)?).clone()
                }
            };
            let cosets = Cosets::new(g, &stab);
            let len = cosets.len();
            vorbs.push(VertexOrbit { stab, kernel, cosets, offset: nv });
            nv += len;
        }

        // edge orbits
        let mut horbs: Vec<HalfEdgeOrbit> = Vec::new();
        let mut eorbs: Vec<EdgeOrbit> = Vec::new();
        let mut nh = 0;
        let n_eorb = if p.max_edge_orbits == 0 {
            0
        } else {
            rng.gen_range((n_vorb - 1)..=p.max_edge_orbits.max(n_vorb - 1))
        };
        for k in 0..n_eorb {
            // the first edge orbits join orbit k + 1 to an earlier one
            let i = if k + 1 < n_vorb { rng.gen_range(0..=k) } else { rng.gen_range(0..n_vorb) };
            let vi = &vorbs[i];
            let swap = k + 1 >= n_vorb && rng.gen_bool(0.35);
            if swap {
                let cands: Vec<(&Subgroup, usize)> = self
                    .subgroups
                    .iter()
                    .filter(|s| s.is_subset_of(&vi.stab) && vi.kernel.is_subset_of(s))
                    .flat_map(|s| {
                        (0..g.order())
                            .filter(move |&x| {
                                !s.contains(x)
                                    && s.contains(g.mul(x, x))
                                    && g.conjugate_subgroup(s, x) == *s
                            })
                            .map(move |x| (s, x))
                    })
                    .collect();
                let &(pp, sigma) = cands.choose(rng)?;
                let chars = self.characters_with_kernel(pp, &vi.kernel);
                let chi = chars.choose(rng)?.clone();
                let sq = chi[&g.mul(sigma, sigma)];
                let psi = if rng.gen_bool(p.smoothable_bias) {
                    sq
                } else {
                    sq.mul(RotationChar::new(1, 2).expect("1/2"))
                };
                let mut e_gens = g.generating_set(pp);
                e_gens.push(sigma);
                let e = g.generated(&e_gens);
                let cosets = Cosets::new(g, pp);
                let len = cosets.len();
                horbs.push(HalfEdgeOrbit {
                    cosets,
                    offset: nh,
                    vertex_orbit: i,
                    base: g.identity(),
                    chars: chi,
                });
                nh += len;
                eorbs.push(EdgeOrbit::Swap {
                    a: horbs.len() - 1,
                    sigma,
                    cosets: Cosets::new(g, &e),
                    psi,
                });
            } else {
                let j = if k + 1 < n_vorb { k + 1 } else { rng.gen_range(0..n_vorb) };
                let vj = &vorbs[j];
                let c2 = rng.gen_range(0..g.order());
                let sj = g.conjugate_subgroup(&vj.stab, c2);
                let kb = g.conjugate_subgroup(&vj.kernel, c2);
                let cands: Vec<&Subgroup> = self
                    .subgroups
                    .iter()
                    .filter(|s| {
                        s.is_subset_of(&vi.stab)
                            && s.is_subset_of(&sj)
                            && vi.kernel.is_subset_of(s)
                            && kb.is_subset_of(s)
                    })
                    .collect();
                let pp = *cands.choose(rng)?;
                let chi_a = self.characters_with_kernel(pp, &vi.kernel).choose(rng)?.clone();
                let chi_b = if kb == vi.kernel && rng.gen_bool(p.smoothable_bias) {
                    chi_a.iter().map(|(&h, c)| (h, c.inverse())).collect()
                } else {
                    self.characters_with_kernel(pp, &kb).choose(rng)?.clone()
                };
                for (vo, base, chars) in [(i, g.identity(), chi_a), (j, c2, chi_b)] {
                    let cosets = Cosets::new(g, pp);
                    let len = cosets.len();
                    horbs.push(HalfEdgeOrbit {
                        cosets,
                        offset: nh,
                        vertex_orbit: vo,
                        base,
                        chars,
                    });
                    nh += len;
                }
                eorbs.push(EdgeOrbit::Pair {
                    a: horbs.len() - 2,
                    b: horbs.len() - 1,
                });
            }
        }

        // half-edge of coset x·P in orbit o, and its vertex
        let half_edge = |o: &HalfEdgeOrbit, x: usize| o.offset + o.cosets.of[x];
        let vertex_of_half_edge = |o: &HalfEdgeOrbit, x: usize| {
            let vo = &vorbs[o.vertex_orbit];
            vo.offset + vo.cosets.of[g.mul(x, o.base)]
        };

        let mut data = GraphData {
            genera: vec![0; nv],
            half_edges: vec![0; nh],
            ..Default::default()
        };
        for o in &horbs {
            for &x in &o.cosets.reps {
                data.half_edges[half_edge(o, x)] = vertex_of_half_edge(o, x);
            }
        }
        for e in &eorbs {
            match e {
                EdgeOrbit::Pair { a, b } => {
                    let (oa, ob) = (&horbs[*a], &horbs[*b]);
                    for &x in &oa.cosets.reps {
                        data.edges.push([half_edge(oa, x), half_edge(ob, x)]);
                    }
                }
                EdgeOrbit::Swap { a, sigma, cosets, .. } => {
                    let oa = &horbs[*a];
                    for &x in &cosets.reps {
                        data.edges.push([half_edge(oa, x), half_edge(oa, g.mul(x, *sigma))]);
                    }
                }
            }
        }

        // ramification and genera
        let mut ramification = Vec::new();
        for vo in &vorbs {
            let v = vo.offset;
            let effective = vo.stab.order() / vo.kernel.order();
            let mut orders: Vec<usize> = Vec::new();
            if effective > 1 {
                let off: Vec<usize> = vo
                    .stab
                    .elements()
                    .iter()
                    .copied()
                    .filter(|&h| !vo.kernel.contains(h))
                    .collect();
                for _ in 0..rng.gen_range(0..=p.max_extra_branch) {
                    let h = *off.choose(rng)?;
                    let e = g.order_modulo(h, &vo.kernel);
                    let a = loop {
                        let a = rng.gen_range(1..e as u64);
                        if a.gcd(&(e as u64)) == 1 {
                            break a;
                        }
                    };
                    ramification.push(RamificationDecl {
                        vertex: v,
                        element: g.perm(h).clone(),
                        value: RotationChar::new(a, e as u64).expect("reduced"),
                        order: e as u32,
                    });
                    orders.push(e);
                }
            }
            // stabilizer orbits of branches at v
            let mut seen = std::collections::BTreeSet::new();
            for o in &horbs {
                for &x in &o.cosets.reps {
                    if vertex_of_half_edge(o, x) != v || seen.contains(&half_edge(o, x)) {
                        continue;
                    }
                    for &s in vo.stab.elements() {
                        seen.insert(half_edge(o, g.mul(s, x)));
                    }
                    let e = o.chars.len() / vo.kernel.order();
                    if e >= 2 {
                        orders.push(e);
                    }
                }
            }
            let r: i64 = orders
                .iter()
                .map(|&e| (effective / e) as i64 * (e as i64 - 1))
                .sum();
            let g_prime = rng.gen_range(0..=p.max_quotient_genus) as i64;
            let twice = effective as i64 * (2 * g_prime - 2) + r;
            if twice % 2 != 0 || twice < -2 {
                return None;
            }
            let genus = (twice / 2 + 1) as u32;
            for w in vo.offset..vo.offset + vo.cosets.len() {
                data.genera[w] = genus;
            }
        }

        let graph = DualGraph::validate(data).ok()?;

        let gens = g.generator_indices();
        let mut action = ActionData {
            ramification,
            ..Default::default()
        };
        for &s in gens {
            let mut vimg = vec![0; nv];
            for vo in &vorbs {
                for (k, &x) in vo.cosets.reps.iter().enumerate() {
                    vimg[vo.offset + k] = vo.offset + vo.cosets.of[g.mul(s, x)];
                }
            }
            let mut himg = vec![0; nh];
            for o in &horbs {
                for &x in &o.cosets.reps {
                    himg[half_edge(o, x)] = half_edge(o, g.mul(s, x));
                }
            }
            action.vertex_images.push(Perm::from_images(vimg).ok()?);
            action.half_edge_images.push(Perm::from_images(himg).ok()?);
        }
        for vo in &vorbs {
            if !vo.kernel.is_trivial() {
                action.kernels.push(KernelDecl {
                    vertex: vo.offset,
                    generators: g.generating_set(&vo.kernel).iter().map(|&k| g.perm(k).clone()).collect(),
                });
            }
        }
        for o in &horbs {
            for (&h, &c) in &o.chars {
                if h != g.identity() {
                    action.tangent_chars.push(TangentCharDecl {
                        element: g.perm(h).clone(),
                        half_edge: o.offset,
                        value: c,
                    });
                }
            }
        }
        let mut edge_offset = 0;
        for e in &eorbs {
            match e {
                EdgeOrbit::Pair { a, .. } => edge_offset += horbs[*a].cosets.len(),
                EdgeOrbit::Swap { sigma, cosets, psi, .. } => {
                    action.smoothing_chars.push(SmoothingCharDecl {
                        element: g.perm(*sigma).clone(),
                        edge: edge_offset,
                        value: *psi,
                    });
                    edge_offset += cosets.len();
                }
            }
        }

        CurveAction::new(self.group.clone(), graph, action).ok()
    }
}

/// Uniformly chosen group from the given names.
pub fn random_group<R: Rng + ?Sized>(rng: &mut R, names: &[&str]) -> Arc<FiniteGroup> {
    let name = names.choose(rng).expect("nonempty list");
    Arc::new(small_group(name).expect("known group"))
}
