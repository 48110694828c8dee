//! One pass/fail line per acceptance criterion. Runs without the libtest
//! harness so the lines always show up in `cargo test` output.

mod common;

use std::time::{Duration, Instant};

use common::{action, groups, random_surface, surface, workspace, QUARTIC, SURFACES};
use isoprod::cli_io::{render_human, run, Command, RunOptions};
use isoprod::family_checker::{local_model, smooth_node_orbit};
use isoprod::product_surface::{
    certify_degeneration, check_free_action, check_free_codim1, surface_invariants, SurfaceDescriptor,
};
use isoprod::random::{random_stable_graph, ActionGenerator};
use isoprod::{ActionError, CurveAction, DualGraph, EquivariantT1, GraphData};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden() -> Check {
    let ws = workspace(QUARTIC);
    let a = action(&ws, "nodal");
    let genus = a.graph().arithmetic_genus().map_err(|e| e.to_string())?;
    let t = a.graph().t1_dimension().map_err(|e| e.to_string())?;
    let e = a.t1_equivariant().map_err(|e| e.to_string())?;
    let s = a.quotient_signatures().map_err(|e| e.to_string())?;
    ensure(genus == 3, || format!("genus {genus}"))?;
    ensure((t.delta, t.branch_term, t.minus_chi, t.total) == (1, 2, 3, 6), || format!("T1 {t:?}"))?;
    let want = EquivariantT1 { node_inv: 1, branch_inv: 1, minus_chi_inv: 2, total: 4 };
    ensure(e == want, || format!("T1^G {e:?}"))?;
    ensure(s.len() == 1 && (s[0].g_prime, s[0].b) == (1, 2), || format!("signatures {s:?}"))?;
    Ok("g=3, T1=(1,2,3)=6, T1^G=(1,1,2)=4, g'=1 b=2".into())
}

fn smoothed_fiber() -> Check {
    let ws = workspace(QUARTIC);
    let s = smooth_node_orbit(&action(&ws, "nodal"), 0).map_err(|e| e.to_string())?;
    let orders: Vec<u32> = s.ramification_at(0).iter().map(|r| r.order).collect();
    ensure(s.graph().num_vertices() == 1 && s.graph().genus(0) == 3, || format!("{:?}", s.graph().data()))?;
    ensure(orders == [2, 2, 2, 2], || format!("ramification orders {orders:?}"))?;
    let t = s.t1_equivariant().map_err(|e| e.to_string())?;
    ensure(t.total == 4, || format!("T1^G {t:?}"))?;
    let report = run(QUARTIC, &RunOptions::new(Command::CheckFamily));
    let text = render_human(&report);
    ensure(text.contains("constant at 4") && report.status.exit_code() == 0, || text.clone())?;
    Ok("genus 3, four order-2 orbits, T1^G=4, family constant at 4".into())
}

fn three_g_minus_three() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..1000 {
        let g = random_stable_graph(&mut rng, 8, 5, 12);
        let d = g.data();
        ensure(d.genera.len() <= 8 && d.edges.len() <= 12 && d.genera.iter().all(|&x| x <= 5), || {
            format!("graph {i} out of range: {d:?}")
        })?;
        let t = g.t1_dimension().map_err(|e| e.to_string())?;
        let genus = g.arithmetic_genus().map_err(|e| e.to_string())? as i64;
        ensure(t.total == 3 * genus - 3, || format!("graph {i}: total {} for genus {genus}", t.total))?;
    }
    Ok("1000 graphs".into())
}

fn oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let gens: Vec<ActionGenerator> = groups().into_iter().map(ActionGenerator::new).collect();
    let mut orders = std::collections::BTreeSet::new();
    for i in 0..600 {
        let gen = &gens[i % gens.len()];
        let a = gen.sample(&mut rng);
        orders.insert(a.group().order());
        let p = a.t1_equivariant().map_err(|e| e.to_string())?;
        let o = a.t1_equivariant_oracle().map_err(|e| e.to_string())?;
        ensure(p == o, || format!("instance {i}: {p:?} vs oracle {o:?}"))?;
    }
    ensure(orders.iter().eq([1, 2, 3, 4, 6].iter()), || format!("orders {orders:?}"))?;
    Ok("600 actions, |G| in {1,2,3,4,6}".into())
}

fn constancy() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let gens: Vec<ActionGenerator> = groups().into_iter().map(ActionGenerator::new).collect();
    let mut count = 0;
    let mut attempts = 0;
    while count < 250 {
        attempts += 1;
        ensure(attempts < 20_000, || format!("only {count} supported smoothings found"))?;
        let a = gens[rng.gen_range(0..gens.len())].sample(&mut rng);
        let before = a.t1_equivariant().map_err(|e| e.to_string())?.total;
        let genus = a.graph().arithmetic_genus().map_err(|e| e.to_string())?;
        for orbit in a.edge_orbits() {
            let e = orbit.representative;
            if local_model(&a, e).is_err() {
                continue;
            }
            let s = smooth_node_orbit(&a, e).map_err(|e| e.to_string())?;
            let after = s.t1_equivariant().map_err(|err| format!("edge {e}: {err}"))?.total;
            let g2 = s.graph().arithmetic_genus().map_err(|e| e.to_string())?;
            ensure(after == before && g2 == genus, || {
                format!("edge {e}: T1^G {before} -> {after}, genus {genus} -> {g2}")
            })?;
            count += 1;
        }
    }
    Ok(format!("{count} smoothings"))
}

fn riemann_hurwitz() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let gens: Vec<ActionGenerator> = groups().into_iter().map(ActionGenerator::new).collect();
    let mut accepted = 0;
    let mut corrupted = 0;
    while corrupted < 150 {
        let a = gens[rng.gen_range(0..gens.len())].sample(&mut rng);
        for s in a.quotient_signatures().map_err(|e| e.to_string())? {
            let want = 2 * a.graph().genus(s.vertex_orbit) as i64 - 2;
            ensure(s.reconstructed_euler() == want, || format!("{s:?} does not reconstruct {want}"))?;
            accepted += 1;
        }
        let n = a.data().ramification.len();
        if n == 0 {
            continue;
        }
        // drop one declared orbit, or declare one twice
        let mut data = a.data().clone();
        let i = rng.gen_range(0..n);
        if rng.gen_bool(0.5) {
            data.ramification.remove(i);
        } else {
            let r = data.ramification[i].clone();
            data.ramification.push(r);
        }
        let bad = CurveAction::new(a.group().clone(), a.graph().clone(), data).and_then(|b| b.quotient_signatures());
        match bad {
            Err(ActionError::InconsistentRamification { .. }) => corrupted += 1,
            other => return Err(format!("corrupted list not rejected as documented: {other:?}")),
        }
    }
    Ok(format!("{accepted} signatures reconstruct, {corrupted} corrupted lists rejected"))
}

fn surface_formulas() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let gs = groups();
    let mut free = 0;
    let mut attempts = 0;
    while free < 120 {
        attempts += 1;
        ensure(attempts < 50_000, || format!("only {free} free instances found"))?;
        let Some(s) = random_surface(&mut rng, &gs) else { continue };
        if !check_free_action(&s).pass {
            continue;
        }
        let inv = surface_invariants(&s).map_err(|e| e.to_string())?;
        ensure(inv.k_squared == inv.chi * 8 && inv.euler == inv.chi * 4, || format!("{inv:?}"))?;
        free += 1;
    }
    let a = CurveAction::trivial(
        DualGraph::validate(GraphData { genera: vec![2], ..Default::default() }).map_err(|e| e.to_string())?,
    );
    let s = SurfaceDescriptor::new(a.clone(), a, true).map_err(|e| e.to_string())?;
    let inv = surface_invariants(&s).map_err(|e| e.to_string())?;
    ensure(
        inv.chi == 1.into() && inv.k_squared == 8.into() && inv.q == Some(4),
        || format!("trivial 2x2: {inv:?}"),
    )?;
    Ok(format!("{free} free instances; trivial 2x2 gives chi=1, K^2=8, q=4"))
}

fn implication() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let gs = groups();
    let mut checked = 0;
    let mut separating = 0;
    while checked < 250 {
        let Some(s) = random_surface(&mut rng, &gs) else { continue };
        let free = check_free_action(&s).pass;
        let codim1 = check_free_codim1(&s).pass;
        ensure(!free || codim1, || "a free action failed the codimension-1 check".into())?;
        if codim1 && !free {
            separating += 1;
        }
        checked += 1;
    }
    let ws = workspace(SURFACES);
    let s = surface(&ws, "codim1_free");
    ensure(!check_free_action(&s).pass && check_free_codim1(&s).pass, || "example does not separate".into())?;
    let cert = certify_degeneration(&s);
    let ids: String = cert.conditions.iter().filter(|c| c.pass).map(|c| c.id).collect();
    ensure(cert.pass && ids == "abcde", || format!("certificate passes only {ids}"))?;
    Ok(format!("{checked} surfaces ({separating} random separating); constructed witness certifies (a)-(e)"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden example", golden, Duration::from_secs(1)),
        ("smoothed fiber", smoothed_fiber, Duration::from_secs(1)),
        ("3g-3 suite", three_g_minus_three, Duration::from_secs(10)),
        ("oracle equivalence", oracle_equivalence, Duration::from_secs(60)),
        ("constancy suite", constancy, Duration::from_secs(30)),
        ("Riemann-Hurwitz integrality", riemann_hurwitz, Duration::from_secs(60)),
        ("surface formulas", surface_formulas, Duration::from_secs(60)),
        ("implication test", implication, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let (status, detail) = match result {
            Ok(d) if took <= *budget => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over the {budget:?} budget")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {}: {status} {name} ({:.3} s): {detail}", i + 1, took.as_secs_f64());
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
