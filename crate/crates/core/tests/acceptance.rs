//! Acceptance run: one line per criterion, nonzero exit if any fails.
//! Built with `harness = false` so the lines print under `cargo test`.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use discrarr::arrangement::deleted_circuits;
use discrarr::classify::{audit_arrangement, enumerate_candidates, family_name};
use discrarr::discriminantal::{intersection_rank, intersection_rank_of};
use discrarr::presentation::{merge_closure, DEFAULT_SEARCH_BUDGET};
use discrarr::varieties::{
    crapo_poly, default_r, membership, solve_on_variety, wheel_poly, Family, VarietyQuery,
    WheelLabeling,
};
use discrarr::{Arrangement, FieldMode, Matrix, Presentation, Scalar, Subset};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn lines(rows: &[&[i64]]) -> Arrangement {
    Arrangement::from_int_matrix(rows).expect("valid matrix")
}

fn crapo(lambda: i64) -> Arrangement {
    lines(&[&[1, 2, 1, 1, 0, lambda], &[0, 1, 1, 2, 1, 1]])
}

fn parse(text: &str, n: usize) -> Presentation {
    Presentation::parse(text, Some(n), 2).expect("valid presentation")
}

fn member(a: &Arrangement, t: &Presentation, r: usize) -> Result<bool, String> {
    let q = VarietyQuery::new(t.clone(), r);
    Ok(ok(membership(a, &q, FieldMode::Rational))?.member)
}

fn criterion_1() -> Outcome {
    let w6 = Presentation::wheel(6).unwrap();
    let mut detail = Vec::new();
    for (lambda, want) in [(-1, 3), (3, 4)] {
        let a = crapo(lambda);
        let rank = ok(intersection_rank(&a, &w6))?;
        ensure!(
            rank == want,
            "lambda = {lambda}: rank {rank}, expected {want}"
        );
        let poly = ok(crapo_poly(&a, [1, 2, 3, 4, 5, 6]))?;
        ensure!(
            poly == Scalar::from_int(1 + lambda),
            "lambda = {lambda}: crapo_poly = {poly}"
        );
        detail.push(format!("lambda={lambda}: rank {rank}, poly {poly}"));
    }
    Ok(detail.join("; "))
}

fn criterion_2() -> Outcome {
    let mut rows: Vec<Vec<i64>> = vec![
        vec![0, 20, 2, 3, 0, 1, 1, 4, 314, 139],
        vec![10, 0, -3, 1, 0, -1, 2, -1, -40, 30],
        vec![3, -9, 0, 0, 1, 1, 2, -3, -197, -43],
    ];
    let t = Presentation::parse(
        "[1 2 3 4],[1 5 6 7],[2 5 8 9],[3 6 8 10],[4 7 9 10]",
        Some(10),
        3,
    )
    .unwrap();
    let rank_of = |rows: &[Vec<i64>]| -> Result<usize, String> {
        let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
        let a = ok(Arrangement::from_int_matrix(&refs))?;
        ensure!(a.is_generic(), "the ten normals are not generic");
        ok(intersection_rank(&a, &t))
    };
    let special = rank_of(&rows)?;
    ensure!(special == 4, "special rank {special}, expected 4");
    rows[0][8] += 1;
    let perturbed = rank_of(&rows)?;
    ensure!(perturbed == 5, "perturbed rank {perturbed}, expected 5");
    Ok(format!("rank {special}, perturbed rank {perturbed}"))
}

/// 200 on-variety and 200 generic samples of `2n` lines. Generic draws that
/// land on the variety by coincidence are redrawn and counted.
fn wheel_samples(n: usize) -> Result<(Vec<Arrangement>, Vec<Arrangement>, usize), String> {
    let w = WheelLabeling::wheel(2 * n).unwrap();
    let on = (0..200)
        .map(|seed| ok(solve_on_variety(&Family::Wheel(2 * n), seed)).map(|s| s.arrangement))
        .collect::<Result<Vec<_>, _>>()?;
    let mut off = Vec::new();
    let mut reseeds = 0;
    let mut seed = 10_000;
    while off.len() < 200 {
        seed += 1;
        let a = ok(Arrangement::random_generic(2 * n, 2, seed, 50))?.arrangement;
        if ok(wheel_poly(&a, &w, true))?.is_zero() {
            reseeds += 1;
            continue;
        }
        off.push(a);
    }
    Ok((on, off, reseeds))
}

fn criterion_3() -> Outcome {
    let mut detail = Vec::new();
    for n in 3..=5 {
        let w = WheelLabeling::wheel(2 * n).unwrap();
        let t = Presentation::wheel(2 * n).unwrap();
        let (on, off, reseeds) = wheel_samples(n)?;
        for (i, a) in on.iter().enumerate() {
            ensure!(
                ok(wheel_poly(a, &w, true))?.is_zero(),
                "W{}: on-variety sample {i} has nonzero poly",
                2 * n
            );
            let rank = ok(intersection_rank(a, &t))?;
            ensure!(
                rank == 2 * n - 3,
                "W{}: on-variety sample {i} has rank {rank}",
                2 * n
            );
        }
        for (i, a) in off.iter().enumerate() {
            let rank = ok(intersection_rank(a, &t))?;
            ensure!(
                rank == 2 * n - 2,
                "W{}: generic sample {i} has rank {rank}",
                2 * n
            );
        }
        detail.push(format!("W{}: 200+200 ok, {reseeds} reseeds", 2 * n));
    }
    Ok(detail.join("; "))
}

fn criterion_4() -> Outcome {
    let mut detail = Vec::new();
    for n in 3..=4 {
        let w = Presentation::wheel(2 * n).unwrap();
        let twin = Presentation::twin_wheel(2 * n).unwrap();
        let (on, off, _) = wheel_samples(n)?;
        let mut members = 0;
        for a in on.iter().chain(&off) {
            let (x, y) = (member(a, &w, 2 * n - 3)?, member(a, &twin, 2 * n - 3)?);
            ensure!(x == y, "W{} and its twin disagree", 2 * n);
            members += x as usize;
        }
        ensure!(
            members == 200,
            "W{}: {members} members among 400 samples",
            2 * n
        );
        detail.push(format!("W{}: 400 agree ({members} members)", 2 * n));
    }
    Ok(detail.join("; "))
}

fn criterion_5() -> Outcome {
    let w = WheelLabeling::wheel(6).unwrap();
    let mut samples = Vec::new();
    for seed in 0..500 {
        samples.push(ok(solve_on_variety(&Family::Wheel(6), 20_000 + seed))?.arrangement);
        samples.push(ok(Arrangement::random_generic(6, 2, 30_000 + seed, 30))?.arrangement);
    }
    let mut zeros = 0;
    for (i, a) in samples.iter().enumerate() {
        let c = ok(crapo_poly(a, [1, 2, 3, 4, 5, 6]))?.is_zero();
        let p = ok(wheel_poly(a, &w, true))?.is_zero();
        ensure!(c == p, "sample {i}: crapo zero {c}, wheel zero {p}");
        zeros += c as usize;
    }
    ensure!(zeros >= 500, "only {zeros} vanishing samples");
    Ok(format!("1000 samples agree, {zeros} on the variety"))
}

/// `a` with a copy of normal `i` appended as a parallel hyperplane.
fn with_parallel_copy(a: &Arrangement, i: usize) -> Result<Arrangement, String> {
    ok(a.push(ok(a.normal(i))?.to_vec()))
}

fn criterion_6() -> Outcome {
    let w8 = Presentation::wheel(8).unwrap();
    let deg = ok(w8.degenerate(8, 4))?;
    ensure!(
        deg.presentation == parse("123,147,246,345,567", 7),
        "W8 8->4 is {}",
        deg.presentation
    );
    let (_, wd) = Family::eight_line_families()
        .into_iter()
        .find(|(n, _)| *n == "Wd8_4")
        .unwrap();
    let seven = Presentation::parse("123,147,156,246,357", Some(7), 2).unwrap();
    let seven_deg = ok(seven.degenerate(7, 4))?;
    ensure!(
        seven_deg.presentation == parse("123,156,246,345", 6) && seven_deg.gamma == 1,
        "seven-line degeneration gave {} with gamma {}",
        seven_deg.presentation,
        seven_deg.gamma
    );
    for seed in 0..50 {
        // On the variety: the augmented arrangement is a member of V_(W8, 5)
        // and its deletion a member of the degenerated variety.
        let b = ok(solve_on_variety(&wd, seed))?.arrangement;
        let a = with_parallel_copy(&b, 4)?;
        ensure!(
            member(&a, &w8, 5)?,
            "seed {seed}: augmented sample not in V_(W8, 5)"
        );
        ensure!(
            ok(a.delete(8))? == b,
            "seed {seed}: deletion does not undo the copy"
        );
        ensure!(
            member(&b, &deg.presentation, 4)?,
            "seed {seed}: deletion not in the degenerated variety"
        );
        let b = ok(solve_on_variety(&Family::Wheel(6), 100 + seed))?.arrangement;
        let a = with_parallel_copy(&b, 4)?;
        ensure!(
            member(&a, &seven, 4)?,
            "seed {seed}: seven-line sample not a member"
        );
        ensure!(
            member(&b, &seven_deg.presentation, 3)?,
            "seed {seed}: six-wheel deletion not a member"
        );
        // Off the variety both sides fail together.
        let g = ok(Arrangement::random_generic(7, 2, 500 + seed, 40))?.arrangement;
        let a = with_parallel_copy(&g, 4)?;
        ensure!(
            member(&a, &w8, 5)? == member(&g, &deg.presentation, 4)?,
            "seed {seed}: generic sample breaks the equivalence"
        );
    }
    Ok("50 samples each for W8 8->4 and the seven-line family, both directions".into())
}

fn criterion_7() -> Outcome {
    let candidates = ok(enumerate_candidates(8, 2, 8))?;
    ensure!(candidates.len() == 5, "{} classes", candidates.len());
    let mut detail = Vec::new();
    for (name, family) in Family::eight_line_families() {
        let t = ok(family.presentation())?;
        let found = candidates
            .iter()
            .find(|c| discrarr::canonical::is_isomorphic(c, &t).unwrap_or(false))
            .ok_or_else(|| format!("{name} is not among the candidates"))?;
        ensure!(
            ok(family_name(found))? == name,
            "class of {name} is named {}",
            family_name(found).unwrap()
        );
        let r = ok(default_r(&t, DEFAULT_SEARCH_BUDGET))?;
        let witness = ok(solve_on_variety(&family, 1))?.arrangement;
        ensure!(
            member(&witness, &t, r)?,
            "{name}: witness is not a member of V_(T, {r})"
        );
        let generic = ok(Arrangement::random_generic(family.ground(), 2, 77, 60))?.arrangement;
        ensure!(
            !member(&generic, &t, r)?,
            "{name}: a generic arrangement is a member"
        );
        detail.push(format!("{name} r={r}"));
    }
    Ok(format!("5 classes; {}", detail.join(", ")))
}

/// Rim and hubs of the degenerated wheel whose triangles are `triangles` and
/// whose hub set is `hubs`, found by walking the rim cycle.
fn degenerated_labeling(triangles: &[Subset], hubs: Subset) -> Result<WheelLabeling, String> {
    let edges: Vec<(usize, usize, usize)> = triangles
        .iter()
        .map(|s| {
            let rim = (*s - hubs).to_vec();
            let hub = (*s & hubs).to_vec();
            (rim[0], rim[1], hub[0])
        })
        .collect();
    let mut rim = vec![edges[0].0];
    let mut hub_list = Vec::new();
    let mut used = vec![false; edges.len()];
    while hub_list.len() < edges.len() {
        let cur = *rim.last().unwrap();
        let e = (0..edges.len())
            .find(|&e| !used[e] && (edges[e].0 == cur || edges[e].1 == cur))
            .ok_or("the rim is not a cycle")?;
        used[e] = true;
        let (x, y, h) = edges[e];
        hub_list.push(h);
        rim.push(if x == cur { y } else { x });
    }
    ensure!(rim.pop() == Some(rim[0]), "the rim does not close up");
    ok(WheelLabeling::new(rim, hub_list))
}

fn criterion_8() -> Outcome {
    let a = lines(&[&[-4, -3, -2, -1, 0, 1, 2, 3, 4], &[1; 9]]);
    let t0 = parse("123,456,789,147,258,369", 9);
    let rank = ok(intersection_rank(&a, &t0))?;
    ensure!(rank == 5, "T0 has rank {rank}");
    for i in 1..=9 {
        let dropped: Vec<Subset> = t0
            .members()
            .iter()
            .copied()
            .filter(|s| !s.contains(i))
            .collect();
        let r = ok(intersection_rank_of(&a, &dropped))?;
        ensure!(r == 4, "dropping the members through {i} leaves rank {r}");
    }
    let wheels = [
        "123,456,147,258,3678",
        "123,789,147,258,3459",
        "123,456,147,369,2579",
        "123,789,147,369,2468",
        "123,456,258,369,1489",
        "123,789,258,369,1567",
        "456,789,147,258,1269",
        "456,789,147,369,1358",
        "456,789,258,369,2347",
    ];
    let extra = ["159", "168", "249", "267", "348", "357"];
    let mut varieties: Vec<Presentation> = wheels.iter().map(|w| parse(w, 9)).collect();
    for e in extra {
        varieties.push(parse(&format!("{},{e}", t0.to_text()), 9));
    }
    let mut rs = Vec::new();
    for (i, t) in varieties.iter().enumerate() {
        let r = ok(default_r(t, DEFAULT_SEARCH_BUDGET))?;
        let rank = ok(intersection_rank(&a, t))?;
        ensure!(rank <= r, "T{}: rank {rank} > r = {r}", i + 1);
        rs.push(r);
    }
    // The six degenerated 12-wheels: T0 minus its hub is the triangle set,
    // and the wheel binomial vanishes.
    for e in extra {
        let hubs = parse(e, 9).members()[0];
        let w = degenerated_labeling(t0.members(), hubs)?;
        ensure!(
            ok(w.presentation(9))? == parse(&format!("{},{e}", t0.to_text()), 9),
            "labeling for {e}"
        );
        ensure!(
            ok(wheel_poly(&a, &w, false))?.is_zero(),
            "wheel binomial for hub set {e} is nonzero"
        );
    }
    Ok(format!(
        "T0 rank 5, T0 minus i rank 4, T1..T15 members with r = {rs:?}"
    ))
}

/// A generic arrangement with one extra hyperplane parallel to another,
/// relabeled at random. Returns the arrangement and the parallel pair.
fn multiarrangement(rng: &mut ChaCha8Rng) -> Result<(Arrangement, usize, usize), String> {
    let k = rng.gen_range(2..=3);
    let n = rng.gen_range(k + 2..=7);
    let base = ok(Arrangement::random_generic(n - 1, k, rng.gen(), 9))?.arrangement;
    let j = rng.gen_range(1..n);
    let c = *[-3i64, -2, -1, 2, 3].choose(rng).unwrap();
    let copy: Vec<Scalar> = ok(base.normal(j))?
        .iter()
        .map(|x| x * &Scalar::from_int(c))
        .collect();
    let a = ok(base.push(copy))?;
    let mut sigma: Vec<usize> = (1..=n).collect();
    sigma.shuffle(rng);
    Ok((ok(a.permute(&sigma))?, sigma[n - 1], sigma[j - 1]))
}

/// Inverse of renumbering after removing `i`.
fn lift(s: Subset, i: usize) -> Subset {
    let low = s.bits() & ((1u64 << (i - 1)) - 1);
    let high = (s.bits() >> (i - 1)) << i;
    Subset::from_bits(low | high)
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pairs = 0;
    for sample in 0..20 {
        let (a, i, j) = multiarrangement(&mut rng)?;
        let pair = Subset::from_indices([i, j]).unwrap();
        let circuits = a.circuits();
        ensure!(
            circuits.iter().any(|c| c.indices() == pair),
            "sample {sample}: {pair} is not a circuit"
        );
        let deleted = ok(a.delete(i))?;
        let del_circuits: Vec<Subset> = {
            let mut c: Vec<Subset> = deleted
                .circuits()
                .into_iter()
                .map(|c| c.indices())
                .collect();
            c.sort();
            c
        };
        ensure!(
            del_circuits == deleted_circuits(&circuits, i),
            "sample {sample}: circuit sets differ"
        );
        for (x, c) in del_circuits.iter().enumerate() {
            for d in &del_circuits[x..] {
                let direct = ok(intersection_rank_of(&deleted, &[*c, *d]))?;
                let restricted =
                    ok(intersection_rank_of(&a, &[pair, lift(*c, i), lift(*d, i)]))? - 1;
                ensure!(
                    direct == restricted,
                    "sample {sample}: {c} and {d} have rank {direct} after deletion, {restricted} on D_{pair}"
                );
                pairs += 1;
            }
        }
    }
    Ok(format!("20 multiarrangements, {pairs} rank pairs agree"))
}

/// A random member of Q(n, k) with up to four members.
fn random_family(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Presentation {
    loop {
        let count = rng.gen_range(1..=4);
        let mut members: Vec<Subset> = Vec::new();
        for _ in 0..count {
            let size = rng.gen_range(k + 1..=(k + 3).min(n));
            let mut points: Vec<usize> = (1..=n).collect();
            points.shuffle(rng);
            let s = Subset::from_indices(points[..size].iter().copied()).unwrap();
            if members.iter().all(|m| (*m & s).len() < k) {
                members.push(s);
            }
        }
        if let Ok(t) = Presentation::new(n, k, members) {
            if t.validate_q() {
                return t;
            }
        }
    }
}

/// A strictly coarser family: one member gains a point, then the family is
/// closed again.
fn coarsen(rng: &mut ChaCha8Rng, t: &Presentation) -> Option<Presentation> {
    let mut members = t.members().to_vec();
    let i = rng.gen_range(0..members.len());
    let outside = (Subset::full(t.n()) - members[i]).to_vec();
    let x = *outside.choose(rng)?;
    members[i] = members[i].with(x);
    Presentation::new(t.n(), t.k(), merge_closure(members, t.k())).ok()
}

fn random_arrangement(rng: &mut ChaCha8Rng) -> Result<Arrangement, String> {
    let k = rng.gen_range(2..=3);
    let n = rng.gen_range(k + 3..=8);
    Ok(ok(Arrangement::random_generic(n, k, rng.gen(), 12))?.arrangement)
}

fn all_line_families_on_six() -> Vec<Vec<Subset>> {
    let sets: Vec<Subset> = (0u64..64)
        .map(Subset::from_bits)
        .filter(|s| s.len() >= 3)
        .collect();
    fn go(sets: &[Subset], from: usize, cur: &mut Vec<Subset>, out: &mut Vec<Vec<Subset>>) {
        if !cur.is_empty() {
            out.push(cur.clone());
        }
        for i in from..sets.len() {
            if cur.iter().all(|s| (*s & sets[i]).len() <= 1) {
                cur.push(sets[i]);
                go(sets, i + 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(&sets, 0, &mut Vec::new(), &mut out);
    out
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..1000 {
        let a = random_arrangement(&mut rng)?;
        let t = random_family(&mut rng, a.n(), a.k());
        let rank = ok(intersection_rank(&a, &t))?;
        ensure!(
            rank <= t.nu(),
            "bound case {case}: rank {rank} > nu {}",
            t.nu()
        );
    }
    for case in 0..1000 {
        let a = random_arrangement(&mut rng)?;
        let mut t = random_family(&mut rng, a.n(), a.k());
        let mut rank = ok(intersection_rank(&a, &t))?;
        for _ in 0..3 {
            let Some(up) = coarsen(&mut rng, &t) else {
                break;
            };
            ensure!(t.leq(&up), "chain case {case}: coarsening is not above");
            let r = ok(intersection_rank(&a, &up))?;
            ensure!(
                rank <= r,
                "chain case {case}: rank drops from {rank} to {r} along {t} <= {up}"
            );
            (t, rank) = (up, r);
        }
    }
    for case in 0..500 {
        let a = random_arrangement(&mut rng)?;
        let t = random_family(&mut rng, a.n(), a.k());
        let rank = ok(intersection_rank(&a, &t))?;
        let mut sigma: Vec<usize> = (1..=a.n()).collect();
        sigma.shuffle(&mut rng);
        let moved = ok(intersection_rank(
            &ok(a.permute(&sigma))?,
            &ok(t.permute(&sigma))?,
        ))?;
        let i = rng.gen_range(1..=a.n());
        let c = Scalar::from_ratio(
            rng.gen_range(1..=7) * [-1, 1][rng.gen_range(0..2)],
            rng.gen_range(1..=5),
        )
        .unwrap();
        let scaled = ok(intersection_rank(&ok(a.scale_normal(i, &c))?, &t))?;
        let g = loop {
            let entries: Vec<Scalar> = (0..a.k() * a.k())
                .map(|_| Scalar::from_int(rng.gen_range(-5..=5)))
                .collect();
            let g = Matrix::new(a.k(), a.k(), entries).unwrap();
            if !g.det().unwrap().is_zero() {
                break g;
            }
        };
        let transformed = ok(intersection_rank(&ok(a.transform(&g))?, &t))?;
        ensure!(
            (moved, scaled, transformed) == (rank, rank, rank),
            "invariance case {case}: {rank} vs {moved}, {scaled}, {transformed}"
        );
    }
    let families = all_line_families_on_six();
    let mut samples = vec![crapo(-1), crapo(3)];
    for seed in 0..4 {
        let w = ok(solve_on_variety(&Family::Wheel(6), seed))?.arrangement;
        samples.push(ok(w.permute(&[3, 6, 1, 5, 2, 4]))?);
        samples.push(ok(Arrangement::random_generic(6, 2, 100 + seed, 30))?.arrangement);
    }
    let mut hits = 0;
    for (s, a) in samples.iter().enumerate() {
        let mut oracle = BTreeMap::new();
        for family in &families {
            let nu: usize = family.iter().map(|s| s.len() - 2).sum();
            let rank = ok(intersection_rank_of(a, family))?;
            if rank < nu {
                oracle.insert(Presentation::new(6, 2, family.clone()).unwrap(), rank);
            }
        }
        let audit: BTreeMap<Presentation, usize> =
            ok(audit_arrangement(a, 6, FieldMode::Rational))?
                .hits
                .into_iter()
                .map(|h| (h.presentation, h.rank))
                .collect();
        ensure!(
            audit == oracle,
            "oracle sample {s}: audit and brute force differ"
        );
        hits += audit.len();
    }
    Ok(format!(
        "1000 bound, 1000 chains, 500 invariance, {} oracle samples over {} families ({hits} hits)",
        samples.len(),
        families.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(fn() -> Outcome, u64); 10] = [
        (criterion_1, 1),
        (criterion_2, 1),
        (criterion_3, 30),
        (criterion_4, 10),
        (criterion_5, 10),
        (criterion_6, 10),
        (criterion_7, 300),
        (criterion_8, 30),
        (criterion_9, 30),
        (criterion_10, 120),
    ];
    let mut failed = 0;
    for (number, (run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{detail}; exceeded {limit} s"))
            }
            other => other,
        };
        let (verdict, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {}: {verdict} ({detail}, {:.2} s)",
            number + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
