use klm_core::engine::{decide, DecideOptions};
use klm_core::syntax::{Formula, Logic};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::Instant;

fn prop(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    let names = ["a", "b", "c"];
    if depth == 0 || rng.gen_bool(0.4) {
        return Formula::atom(names[rng.gen_range(0..3)]);
    }
    match rng.gen_range(0..3) {
        0 => prop(rng, depth - 1).neg(),
        1 => prop(rng, depth - 1).and(prop(rng, depth - 1)),
        _ => prop(rng, depth - 1).or(prop(rng, depth - 1)),
    }
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases: Vec<(&str, Vec<BTreeSet<Formula>>)> = Vec::new();
    for depth in [1usize, 2] {
        let mut and_like = Vec::new();
        let mut cm_like = Vec::new();
        let mut rm_like = Vec::new();
        let mut loop_like = Vec::new();
        for _ in 0..10 {
            let (a, b, c) = (prop(&mut rng, depth), prop(&mut rng, depth), prop(&mut rng, depth));
            and_like.push(
                [a.clone().cond(b.clone()), a.clone().cond(c.clone()), a.clone().cond(b.clone().and(c.clone())).neg()]
                    .into_iter().collect(),
            );
            cm_like.push(
                [a.clone().cond(b.clone()), a.clone().cond(c.clone()), a.clone().and(b.clone()).cond(c.clone()).neg()]
                    .into_iter().collect(),
            );
            rm_like.push(
                [a.clone().cond(b.clone()), a.clone().cond(c.clone().neg()).neg(), a.clone().and(c.clone()).cond(b.clone()).neg()]
                    .into_iter().collect(),
            );
            let links: Vec<Formula> = (0..4).map(|_| prop(&mut rng, 1)).collect();
            let mut g: BTreeSet<Formula> = (0..4).map(|k| links[k].clone().cond(links[(k + 1) % 4].clone())).collect();
            g.insert(links[0].clone().cond(links[3].clone()).neg());
            loop_like.push(g);
        }
        cases.push((if depth == 1 { "AND d1" } else { "AND d2" }, and_like));
        cases.push((if depth == 1 { "CM d1" } else { "CM d2" }, cm_like));
        cases.push((if depth == 1 { "RM d1" } else { "RM d2" }, rm_like));
        cases.push((if depth == 1 { "LOOP3 d1" } else { "LOOP3 d2" }, loop_like));
    }
    for (name, batch) in &cases {
        for logic in [Logic::C, Logic::Cl, Logic::P, Logic::R] {
            if name.starts_with("RM") && logic != Logic::R {
                continue;
            }
            if name.starts_with("LOOP") && logic != Logic::Cl {
                continue;
            }
            let start = Instant::now();
            let mut nodes = 0u64;
            for g in batch {
                nodes += decide(g, logic, &DecideOptions::default()).unwrap().stats.nodes;
            }
            println!("{name:9} {logic:2}: {:7.1} ms/case  ({nodes} nodes)", start.elapsed().as_secs_f64() * 100.0);
        }
    }
}
