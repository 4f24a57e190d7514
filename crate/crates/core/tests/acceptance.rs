//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use blaschke::affine::{assemble_reduced_c, expand_full, full_null_matrix, ReducedAffine};
use blaschke::instances::{gen_disk, Family, InstanceSpec};
use blaschke::solver::{build_constraints, solve, SolveOptions, SolveResult};
use blaschke::structure::{
    coeff_positions, dense_system, index_vectors, wronskian_from_coeffs, wronskian_from_tables, DegreeLayout,
    Structure,
};
use blaschke::verify::{bottleneck_assign, computed_critical_points, distance_matrix, report, ACCURACY_THRESHOLD};
use blaschke::Complex64;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CLOSED_FORM_TOL: f64 = 1e-10;
const WRONSKIAN_REL_TOL: f64 = 1e-12;
const NULL_SPACE_REL_TOL: f64 = 1e-8;
const SELF_INVERSIVE_TOL: f64 = 1e-9;
const FORM_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lower_median(v: &mut [usize]) -> usize {
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

/// A solved instance kept for the self-inversive check.
struct Solved {
    points: Vec<Complex64>,
    result: SolveResult,
}

fn closed_form_n1() -> Outcome {
    let opts = SolveOptions::default();
    let mut worst = 0.0f64;
    for seed in 0..100 {
        let z = gen_disk(1, 1.0, seed)[0];
        let res = solve(&[z], &opts).map_err(|e| format!("seed {seed}: {e}"))?;
        let want = -2.0 * z / (1.0 + z.norm_sqr());
        worst = worst.max((res.a[0] - want).norm());
    }
    ensure(worst <= CLOSED_FORM_TOL, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e}"))
}

fn wronskian_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for n in 2..=8 {
        let s = Structure::new(n);
        for _ in 0..20 {
            let a: Vec<Complex64> = (0..n).map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
            let direct = wronskian_from_coeffs(&a);
            let tables = wronskian_from_tables(&a, &s);
            let scale = direct.max_abs_coeff();
            ensure(direct.coeffs().len() == tables.coeffs().len(), || format!("n={n}: length mismatch"))?;
            let err = direct.coeffs().iter().zip(tables.coeffs()).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
            worst = worst.max(err / scale);
        }
    }
    ensure(worst <= WRONSKIAN_REL_TOL, || format!("max relative deviation {worst:e}"))?;
    Ok(format!("max relative deviation {worst:.1e}"))
}

fn rel_residual(a: &DMatrix<Complex64>, x: &[Complex64], b: &DVector<Complex64>) -> f64 {
    let xv = DVector::from_column_slice(x);
    (a * &xv - b).norm() / (a.norm() * xv.norm() + b.norm())
}

fn null_space_identities() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=8 {
        let layout = DegreeLayout::new(n);
        let full_null = full_null_matrix(n).map(|v| c(v, 0.0));
        let c_hat = assemble_reduced_c(n);
        for k in 0..5u64 {
            let pts = gen_disk(n, 0.9, 1000 * n as u64 + k);
            let (a, b) = dense_system(&pts).map_err(|e| e.to_string())?;
            let aff = ReducedAffine::new(&pts).map_err(|e| e.to_string())?;
            let zero = DVector::zeros(2 * n);
            let expand = |v: &[Complex64]| expand_full(v, &layout).map_err(|e| e.to_string());

            for j in 0..c_hat.ncols() {
                let col: Vec<Complex64> = c_hat.column(j).iter().map(|&v| c(v, 0.0)).collect();
                let r = rel_residual(&a, &expand(&col)?, &zero);
                ensure(r <= NULL_SPACE_REL_TOL, || format!("n={n} instance {k}: C column {j} residual {r:e}"))?;
                worst = worst.max(r);
            }
            let beta = expand(&aff.beta_hat)?;
            let r = rel_residual(&a, &beta, &zero);
            ensure(r <= NULL_SPACE_REL_TOL, || format!("n={n} instance {k}: beta residual {r:e}"))?;
            worst = worst.max(r);
            let alpha = expand(&aff.alpha_hat)?;
            let r = rel_residual(&a, &alpha, &b);
            ensure(r <= NULL_SPACE_REL_TOL, || format!("n={n} instance {k}: alpha residual {r:e}"))?;
            worst = worst.max(r);

            for j in 0..full_null.ncols() {
                let col: Vec<Complex64> = full_null.column(j).iter().copied().collect();
                let r = rel_residual(&a, &col, &zero);
                ensure(r <= NULL_SPACE_REL_TOL, || format!("n={n} instance {k}: null column {j} residual {r:e}"))?;
            }

            // weight-only blocks plus the data direction span the whole null space
            let mut basis = full_null.clone().insert_column(full_null.ncols(), c(0.0, 0.0));
            basis.set_column(full_null.ncols(), &DVector::from_vec(beta));
            let sv = basis.singular_values();
            let tol = sv.max() * 1e-10;
            let rank = sv.iter().filter(|&&s| s > tol).count();
            ensure(rank == n * n - n, || format!("n={n} instance {k}: rank {rank}, expected {}", n * n - n))?;
        }
    }
    Ok(format!("max relative residual {worst:.1e}, ranks n^2-n"))
}

fn index_tables() -> Outcome {
    let t = index_vectors(3);
    // per-degree blocks, concatenated
    let index = [vec![1], vec![2], vec![3, 1, 2], vec![1, 3], vec![3, 2, 0], vec![0], vec![0]].concat();
    let conj_index = [vec![0], vec![0], vec![0, 2, 3], vec![1, 3], vec![2, 1, 3], vec![2], vec![1]].concat();
    ensure(t.index == index, || format!("I = {:?}", t.index))?;
    ensure(t.conj_index == conj_index, || format!("Ibar = {:?}", t.conj_index))?;
    ensure(t.positions == [0, 1, 2, 3], || format!("J = {:?}", t.positions))?;

    for n in 1..=30 {
        let t = index_vectors(n);
        let j = coeff_positions(n);
        ensure(j[0] == 0 && t.positions == j, || format!("n={n}: tables disagree with J"))?;
        for i in 1..=n {
            // a_i alone occupies exactly one slot of x
            let slots: Vec<usize> =
                (0..t.index.len()).filter(|&p| t.index[p] == i && t.conj_index[p] == 0).map(|p| p + 1).collect();
            ensure(slots == [j[i]], || format!("n={n} i={i}: scan {slots:?}, formula {}", j[i]))?;
        }
    }
    Ok("n=3 tables exact, J matches scan for n<=30".into())
}

fn example_structure() -> Outcome {
    let s = Structure::new(3);
    let got: Vec<(usize, usize, usize)> =
        build_constraints(&s.tables, &s.layout).iter().map(|q| (q.i, q.j, q.k)).collect();
    ensure(got == [(4, 1, 2), (5, 2, 3), (6, 1, 1), (7, 3, 3)], || format!("constraints {got:?}"))?;
    #[rustfmt::skip]
    let pattern = DMatrix::from_row_slice(7, 3, &[
        0.0, 0.0, 0.0,
        0.0, 0.0, 0.0,
        1.0, 0.0, 0.0,
        3.0, 1.0, 0.0,
        0.0, 1.0, 0.0,
        0.0, 0.0, 1.0,
        0.0, 0.0, 1.0,
    ]);
    let c_hat = assemble_reduced_c(3);
    ensure(c_hat == pattern, || format!("C_hat = {c_hat}"))?;
    Ok("4 constraints, 7x3 C_hat".into())
}

struct Batch {
    solved: usize,
    total: usize,
    median_iterations: usize,
    worst_solved_error: f64,
}

fn run_batch(family: Family, n: usize, r: f64, seeds: std::ops::Range<u64>, keep: &mut Vec<Solved>) -> Result<Batch, String> {
    let mut iterations = Vec::new();
    let mut solved = 0;
    let mut worst_solved_error = 0.0f64;
    let total = seeds.end.saturating_sub(seeds.start) as usize;
    for seed in seeds {
        let points = InstanceSpec { family, n, r, seed }.generate().map_err(|e| e.to_string())?;
        let opts = SolveOptions { rng_seed: seed, ..SolveOptions::default() };
        let Ok(result) = solve(&points, &opts) else { continue };
        iterations.push(result.iterations);
        let rep = report(&points, &result).map_err(|e| e.to_string())?;
        if rep.accurately_solved {
            solved += 1;
            worst_solved_error = worst_solved_error.max(rep.max_error);
            keep.push(Solved { points, result });
        }
    }
    let median_iterations = if iterations.is_empty() { usize::MAX } else { lower_median(&mut iterations) };
    Ok(Batch { solved, total, median_iterations, worst_solved_error })
}

fn disk_n10(keep: &mut Vec<Solved>) -> Outcome {
    let b = run_batch(Family::Disk, 10, 0.999, 0..20, keep)?;
    let detail = format!("{}/{} solved, median iterations {}, worst error {:.1e}", b.solved, b.total, b.median_iterations, b.worst_solved_error);
    ensure(b.solved * 100 >= 95 * b.total && b.median_iterations <= 30 && b.worst_solved_error < ACCURACY_THRESHOLD, || detail.clone())?;
    Ok(detail)
}

fn disk_n20(keep: &mut Vec<Solved>) -> Outcome {
    let b = run_batch(Family::Disk, 20, 0.99, 0..10, keep)?;
    let detail = format!("{}/{} solved, median iterations {}", b.solved, b.total, b.median_iterations);
    ensure(b.solved * 100 >= 90 * b.total, || detail.clone())?;
    Ok(detail)
}

fn cluster_n10(keep: &mut Vec<Solved>) -> Outcome {
    let b = run_batch(Family::Cluster, 10, 0.0, 0..10, keep)?;
    let detail = format!("{}/{} solved, median iterations {}", b.solved, b.total, b.median_iterations);
    ensure(b.solved == b.total && b.median_iterations <= 15, || detail.clone())?;
    Ok(detail)
}

/// Minimum over all permutations of the largest matched entry.
fn brute_force_bottleneck(d: &DMatrix<f64>) -> f64 {
    fn go(d: &DMatrix<f64>, row: usize, used: &mut [bool], current: f64, best: &mut f64) {
        if current >= *best {
            return;
        }
        if row == d.nrows() {
            *best = current;
            return;
        }
        for col in 0..d.ncols() {
            if !used[col] {
                used[col] = true;
                go(d, row + 1, used, current.max(d[(row, col)]), best);
                used[col] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(d, 0, &mut vec![false; d.ncols()], 0.0, &mut best);
    best
}

fn bottleneck_optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for case in 0..100 {
        let d = if case % 2 == 0 {
            DMatrix::from_fn(7, 7, |_, _| rng.random::<f64>())
        } else {
            // ties exercise the threshold search
            DMatrix::from_fn(7, 7, |_, _| rng.random_range(0..5) as f64)
        };
        let res = bottleneck_assign(&d);
        let mut seen = [false; 7];
        for &j in &res.pairing {
            ensure(j < 7 && !seen[j], || format!("case {case}: pairing {:?} is not a bijection", res.pairing))?;
            seen[j] = true;
        }
        let achieved = res.pairing.iter().enumerate().map(|(i, &j)| d[(i, j)]).fold(0.0, f64::max);
        let best = brute_force_bottleneck(&d);
        ensure(achieved == best && res.max_distance == best, || {
            format!("case {case}: got {achieved} (reported {}), optimum {best}", res.max_distance)
        })?;
    }
    Ok("100/100 optimal".into())
}

fn self_inversive(solved: &[Solved]) -> Outcome {
    ensure(!solved.is_empty(), || "no solved instances".into())?;
    let mut worst = 0.0f64;
    for (k, s) in solved.iter().enumerate() {
        let w = s.result.product().wronskian();
        ensure(w.is_self_inversive(SELF_INVERSIVE_TOL), || format!("instance {k}: Wronskian not self-inversive"))?;
        let inside = computed_critical_points(&s.result.product()).map_err(|e| format!("instance {k}: {e}"))?;
        ensure(inside.iter().all(|z| z.norm() < 1.0), || format!("instance {k}: root outside the disk"))?;
        let err = bottleneck_assign(&distance_matrix(&s.points, &inside)).max_distance;
        ensure(err < ACCURACY_THRESHOLD, || format!("instance {k}: pairing error {err:e}"))?;
        worst = worst.max(err);
    }
    Ok(format!("{} instances, worst pairing error {worst:.1e}", solved.len()))
}

fn mobius_equivariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for k in 0..20u64 {
        let n = 1 + (k as usize % 6);
        // off-center data so the centering map is not trivial
        let shift = c(rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4));
        let points: Vec<Complex64> = gen_disk(n, 0.5, 500 + k).into_iter().map(|z| z + shift).collect();
        let opts = SolveOptions { rng_seed: k, ..SolveOptions::default() };
        let res = solve(&points, &opts).map_err(|e| format!("instance {k}: {e}"))?;
        ensure(n == 1 || res.center.is_some(), || format!("instance {k}: no centering applied"))?;
        let rep = report(&points, &res).map_err(|e| format!("instance {k}: {e}"))?;
        ensure(rep.accurately_solved && rep.max_error < ACCURACY_THRESHOLD, || {
            format!("instance {k}: error {:e}, solved {}", rep.max_error, rep.accurately_solved)
        })?;
        worst = worst.max(rep.max_error);

        let b = res.product();
        let p = b.numerator();
        let q = b.denominator();
        let (pc, qc) = (p.coeffs(), q.coeffs());
        let deg = pc.len() - 1;
        ensure(deg == n + 1 && pc[0].norm() <= FORM_TOL && (pc[deg] - 1.0).norm() <= FORM_TOL, || {
            format!("instance {k}: numerator not normalized")
        })?;
        ensure((qc[0] - 1.0).norm() <= FORM_TOL, || format!("instance {k}: denominator constant"))?;
        for j in 1..deg {
            ensure((qc[j] - pc[deg - j].conj()).norm() <= FORM_TOL, || format!("instance {k}: denominator not reciprocal"))?;
        }
        for t in 0..64 {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / 64.0);
            let m = b.eval(z).norm();
            ensure((m - 1.0).abs() <= FORM_TOL, || format!("instance {k}: |B| = {m} on the circle"))?;
        }
    }
    Ok(format!("20/20 matched, worst error {worst:.1e}"))
}

struct Gate {
    failures: usize,
}

impl Gate {
    fn check(&mut self, id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {:.2}s, limit {:.0}s", elapsed.as_secs_f64(), l.as_secs_f64())),
            (o, _) => o,
        };
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL {id:>2} {name}: {detail} [{secs:.2}s]");
            }
        }
    }
}

fn main() -> ExitCode {
    let secs = |s: u64| Some(Duration::from_secs(s));
    let mut gate = Gate { failures: 0 };
    let mut solved = Vec::new();
    gate.check(1, "closed form n=1", secs(1), closed_form_n1);
    gate.check(2, "Wronskian from tables", secs(1), wronskian_equivalence);
    gate.check(3, "null-space identities", secs(10), null_space_identities);
    gate.check(4, "index tables", secs(1), index_tables);
    gate.check(5, "n=3 constraints and C_hat", secs(1), example_structure);
    gate.check(6, "disk n=10 r=0.999", secs(30), || disk_n10(&mut solved));
    gate.check(7, "disk n=20 r=0.99", secs(60), || disk_n20(&mut solved));
    gate.check(8, "cluster n=10", secs(20), || cluster_n10(&mut solved));
    gate.check(9, "bottleneck optimality", secs(5), bottleneck_optimality);
    gate.check(10, "self-inversive Wronskians", None, || self_inversive(&solved));
    gate.check(11, "Mobius equivariance", None, mobius_equivariance);
    if gate.failures == 0 {
        println!("acceptance: all 11 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", gate.failures);
        ExitCode::FAILURE
    }
}
