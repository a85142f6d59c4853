//! Acceptance suite: one line per criterion with the measured values, the
//! tolerance and the runtime limit. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use nusample::balayage::{
    balayage_constant, default_epsilon, fundamental_identity_residual, BalayageParams, BalayageSolver, InghamWindow,
};
use nusample::frames::{
    covering_frame_experiment, frame_bounds, three_dilate_check, weighted_frame_check, CoveringFrameParams, FrameSystem,
    TestSubspace, ThreeDilateConstants, WeightedConstants,
};
use nusample::geometry::{AxisBox, SpectralGrid, SpectrumSet};
use nusample::psido::{psido_frame_check, KNSymbol, PsidoConstants};
use nusample::sampling::{generate_jittered_grid, SamplingSet};
use nusample::spectral::{random_pw_signal, BandlimitedSignal, TrigPolynomial};
use nusample::stft::{
    default_omega_grid, default_time_grid, gabor_reconstruct, gaussian_window, isometry_check, pw_stft_frame_check,
    stft_fourier_closed_form, tf_identity_check, GaborSystem, PhaseSpaceSamples, StftSetup, TimeSignal, UniformGrid,
    WindowFunction,
};
use nusample::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), String>;

/// Name, runtime limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn integers(delta: f64, half: f64) -> SamplingSet {
    SamplingSet::uniform(delta, AxisBox::centered(1, half)).unwrap()
}

fn band(h: f64, nodes: usize) -> Arc<SpectralGrid> {
    Arc::new(SpectralGrid::midpoint(&SpectrumSet::cube(1, h).unwrap(), nodes).unwrap())
}

fn nyquist() -> Outcome {
    let grid = band(0.5, 512);
    let sub = TestSubspace::concentrated(grid.clone(), &AxisBox::centered(1, 30.0), 1e-8).map_err(|e| e.to_string())?;
    let bounds = |delta: f64| FrameSystem::new(&integers(delta, 40.0), grid.clone()).and_then(|s| s.bounds_on(&sub));
    let one = bounds(1.0).map_err(|e| e.to_string())?;
    let half = bounds(0.5).map_err(|e| e.to_string())?;
    let two = bounds(2.0).map_err(|e| e.to_string())?;
    let inside = |r: &nusample::frames::FrameReport, lo: f64, hi: f64| (lo..=hi).contains(&r.lower) && (lo..=hi).contains(&r.upper);
    let pass = inside(&one, 0.95, 1.05) && inside(&half, 1.9, 2.1) && two.lower <= 1e-6;
    Ok((
        pass,
        format!(
            "Z: A={:.4} B={:.4}; Z/2: A={:.4} B={:.4}; 2Z: A={:.1e} (subspace dim {})",
            one.lower,
            one.upper,
            half.lower,
            half.upper,
            two.lower,
            sub.dim()
        ),
    ))
}

fn identity() -> Outcome {
    let l = SpectrumSet::cube(1, 0.25).unwrap();
    let e = integers(0.5, 20.0);
    let eps = default_epsilon(&l);
    let solver = BalayageSolver::for_spectrum(&e, &l, eps, 256, BalayageParams::default()).map_err(|e| e.to_string())?;
    let window = InghamWindow::new(eps, 1, 32).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let trials = 10;
    for seed in 0..trials {
        let f = TrigPolynomial::random(&l, 5, seed);
        let ys: Vec<Vec<f64>> = (0..25).map(|_| vec![rng.random_range(-15.0..15.0)]).collect();
        let r = fundamental_identity_residual(&f, &solver, &window, &ys).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_residual);
    }
    let on_e: Vec<Vec<f64>> = [-10.0, -0.5, 0.0, 3.5, 17.0].iter().map(|&y| vec![y]).collect();
    let exact = fundamental_identity_residual(&TrigPolynomial::random(&l, 5, 99), &solver, &window, &on_e)
        .map_err(|e| e.to_string())?
        .max_residual;
    Ok((worst <= 1e-2 && exact <= 1e-12, format!("max residual {worst:.2e} over {trials}x25 centres (≤1e-2); y∈E {exact:.1e} (≤1e-12)")))
}

fn reconstruction() -> Outcome {
    // 256 nodes on [−½, ½] give period 256; E covers one full period.
    let grid = band(0.5, 256);
    let l = SpectrumSet::cube(1, 0.5).unwrap();
    let (mut worst, mut most_iter, mut passed): (f64, usize, usize) = (0.0, 0, 0);
    for seed in 0..10u64 {
        let e = generate_jittered_grid(0.4, 0.1, AxisBox::centered(1, 128.0), seed).map_err(|e| e.to_string())?;
        let f = random_pw_signal(&l, 256, seed).map_err(|e| e.to_string())?;
        let sys = FrameSystem::new(&e, grid.clone()).map_err(|e| e.to_string())?;
        let rec = sys.reconstruct(&sys.analyze(f.coeffs()), 1e-12, 200).map_err(|e| e.to_string())?;
        let err = rec.signal.combine(C64::new(1.0, 0.0), &f, C64::new(-1.0, 0.0)).map_err(|e| e.to_string())?.norm() / f.norm();
        worst = worst.max(err);
        most_iter = most_iter.max(rec.iterations);
        if err <= 1e-5 && rec.iterations <= 200 {
            passed += 1;
        }
    }
    Ok((passed == 10, format!("{passed}/10 seeds, max rel error {worst:.2e} (≤1e-5), max iterations {most_iter} (≤200)")))
}

fn covering() -> Outcome {
    let l = SpectrumSet::cube(1, 1.0).unwrap();
    let region = AxisBox::centered(1, 30.0);
    let params = CoveringFrameParams { nodes: 128, subspace_region: AxisBox::centered(1, 30.0), leakage: 1e-8 };
    let (mut ok, mut worst_cond, mut min_lower) = (0, 0.0f64, f64::INFINITY);
    // Gaps are at most 1.5 + 2·0.2 < 2, the width of Λ* = [−1, 1].
    for seed in 0..20u64 {
        let e = generate_jittered_grid(1.5, 0.2, AxisBox::centered(1, 40.0), seed).map_err(|e| e.to_string())?;
        let r = covering_frame_experiment(&l, &e, 0.2, &region, 0.05, &params).map_err(|e| e.to_string())?;
        if !r.covered {
            return Ok((false, format!("seed {seed}: generated set does not pass the covering check")));
        }
        worst_cond = worst_cond.max(r.report.condition);
        min_lower = min_lower.min(r.report.lower);
        if r.confirmed == Some(true) && r.report.condition < 1e6 {
            ok += 1;
        }
    }
    let sparse = integers(3.0, 120.0);
    let params = CoveringFrameParams { nodes: 256, subspace_region: AxisBox::centered(1, 100.0), leakage: 1e-8 };
    let control = covering_frame_experiment(&l, &sparse, 0.2, &region, 0.05, &params).map_err(|e| e.to_string())?;
    let pass = ok == 20 && !control.covered && control.report.lower <= 1e-6;
    Ok((
        pass,
        format!(
            "{ok}/20 frames, min A {min_lower:.3e}, max condition {worst_cond:.2e} (<1e6); control covered={} A={:.1e} (≤1e-6)",
            control.covered, control.report.lower
        ),
    ))
}

fn stft_identities() -> Outcome {
    let box_ = UniformGrid::symmetric(0.5, 1.0 / 16.0).unwrap();
    let measure = |setup: StftSetup| -> Result<[f64; 3], String> {
        let g = WindowFunction::gaussian_on(setup.time);
        let f = g.signal.clone();
        let iso = isometry_check(&f, &g, &setup.tf).map_err(|e| e.to_string())?.deviation;
        let tf = tf_identity_check(&f, &g, &setup).map_err(|e| e.to_string())?.max_deviation;
        let cf = stft_fourier_closed_form(&f, &g, &setup, &box_, &box_).map_err(|e| e.to_string())?.deviation;
        Ok([iso, tf, cf])
    };
    let coarse = measure(StftSetup::default())?;
    let fine = measure(StftSetup::default().refined())?;
    let limits = [1e-3, 1e-3, 1e-2];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, name) in ["isometry", "tf identity", "closed form"].iter().enumerate() {
        let ratio = coarse[i] / fine[i].max(f64::MIN_POSITIVE);
        pass &= coarse[i] <= limits[i] && ratio >= 2.0;
        parts.push(format!("{name} {:.1e} (≤{:.0e}) refined {:.1e} ratio {:.1e}", coarse[i], limits[i], fine[i], ratio));
    }
    Ok((pass, parts.join("; ")))
}

fn stft_bound() -> Outcome {
    let l = SpectrumSet::cube(1, 0.25).unwrap();
    let e = integers(0.5, 20.0).symmetrize();
    let g = gaussian_window(1).map_err(|e| e.to_string())?;
    let omega = default_omega_grid(0.25);
    let tf = StftSetup::default().tf;
    let (mut ok, mut worst) = (0, 0.0f64);
    let mut b = 0.0;
    for seed in 0..10u64 {
        let f = random_pw_signal(&l, 512, seed).map_err(|e| e.to_string())?;
        let r = pw_stft_frame_check(&f, &g, &e, &omega, &tf).map_err(|e| e.to_string())?;
        worst = worst.max(r.upper_ratio);
        b = r.b_formula;
        if r.holds {
            ok += 1;
        }
    }
    Ok((ok == 10, format!("{ok}/10 signals, max energy/‖f‖² {worst:.4} ≤ B {b:.4}")))
}

fn gabor() -> Outcome {
    let grid = UniformGrid::half_open(6.0, 0.125).unwrap();
    let g = WindowFunction::gaussian_on(grid);
    let lattice = PhaseSpaceSamples::lattice(0.5, 0.5, (-7.0, 7.0), (-4.0, 4.0)).map_err(|e| e.to_string())?;
    let jittered = lattice.jittered(0.1, 2).map_err(|e| e.to_string())?;
    let f = TimeSignal::random_atoms(grid, 4, 2.0, 11);
    let r = gabor_reconstruct(&f, &g, &lattice, 1e-12, 500).map_err(|e| e.to_string())?;
    let rj = gabor_reconstruct(&f, &g, &jittered, 1e-12, 500).map_err(|e| e.to_string())?;
    let sparse = PhaseSpaceSamples::lattice(1.5, 1.5, (-7.0, 7.0), (-4.0, 4.0)).map_err(|e| e.to_string())?;
    let cond = GaborSystem::new(grid, &g, &sparse).and_then(|s| s.bounds()).map_err(|e| e.to_string())?.condition;
    let pass = r.error <= 1e-3 && rj.error <= 1e-3 && cond > 1e6;
    Ok((pass, format!("lattice error {:.1e}, jittered {:.1e} (≤1e-3); a=b=1.5 condition {cond:.1e} (>1e6)", r.error, rj.error)))
}

fn psido() -> Outcome {
    let l = SpectrumSet::cube(1, 0.25).unwrap();
    let s = KNSymbol::two_term(l.clone(), 0.1, 0.05, 0.09).map_err(|e| e.to_string())?;
    let e = integers(0.5, 20.0).symmetrize();
    let eps = default_epsilon(&l);
    let solver = BalayageSolver::for_spectrum(&e, &l, eps, 256, BalayageParams::default()).map_err(|e| e.to_string())?;
    let window = InghamWindow::new(eps, 1, 32).map_err(|e| e.to_string())?;
    let tg = default_time_grid();
    let ys: Vec<Vec<f64>> = tg.nodes().into_iter().map(|y| vec![y]).collect();
    let c = PsidoConstants::new(&s, &e, &solver, &window, &ys, band(0.25, 512), 256).map_err(|e| e.to_string())?;
    let gamma = s.gamma_grid(256).map_err(|e| e.to_string())?;
    let (mut ok, mut lower_gap, mut upper_gap) = (0, f64::INFINITY, f64::INFINITY);
    for seed in 0..10u64 {
        let f = TimeSignal::random_atoms(tg, 3, 1.0, seed);
        let r = psido_frame_check(&s, &f, &e, &c, &gamma).map_err(|e| e.to_string())?;
        if r.chain.holds(0.0) && r.mid_adjoint >= r.chain.lhs {
            ok += 1;
        } else {
            eprintln!("psido seed {seed}: {:?}", r);
        }
        lower_gap = lower_gap.min(r.chain.mid / r.chain.lhs);
        upper_gap = upper_gap.min(r.chain.rhs / r.chain.mid);
    }
    Ok((
        ok == 10,
        format!(
            "{ok}/10 chains, min mid/lhs {lower_gap:.2e}, min rhs/mid {upper_gap:.2}; A={:.3e} (K̂={:.3}, ‖h‖={:.3}), B̂={:.3}",
            c.a, c.k_hat, c.h_norm, c.b_hat
        ),
    ))
}

fn geometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (a, b) = (0.7, 1.3);
    let boxed = SpectrumSet::new_box(vec![a, b]).unwrap();
    let cross = SpectrumSet::new_polytope(vec![vec![1.0 / a, 0.0], vec![0.0, 1.0 / b], vec![-1.0 / a, 0.0], vec![0.0, -1.0 / b]]).unwrap();
    let polar = boxed.polar();
    let back = cross.polar();
    let mut mismatches = 0;
    for _ in 0..1000 {
        let p: Vec<f64> = vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        // Oracle memberships: |x|/a⁻¹ + |y|/b⁻¹ ≤ 1 and the box itself.
        let in_cross = a * p[0].abs() + b * p[1].abs() <= 1.0;
        let in_box = p[0].abs() <= a && p[1].abs() <= b;
        if polar.contains(&p) != in_cross || cross.contains(&p) != in_cross || back.contains(&p) != in_box {
            mismatches += 1;
        }
    }
    let mut scale_dev: f64 = 0.0;
    let mut homog_dev: f64 = 0.0;
    for shape in [boxed.clone(), cross.clone(), SpectrumSet::new_ball(2, 0.8).unwrap()] {
        for rho in [0.3, 2.0, 5.5] {
            let lhs = shape.scale(rho).unwrap().polar();
            let rhs = shape.polar().scale(1.0 / rho).unwrap();
            for _ in 0..50 {
                let p: Vec<f64> = vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
                if lhs.contains(&p) != rhs.contains(&p) {
                    mismatches += 1;
                }
                let (x, y) = (lhs.lambda_norm(&p), rhs.lambda_norm(&p));
                scale_dev = scale_dev.max((x - y).abs() / x.max(1e-300));
                let t: f64 = rng.random_range(-4.0..4.0);
                let tp: Vec<f64> = p.iter().map(|v| t * v).collect();
                homog_dev = homog_dev.max((shape.lambda_norm(&tp) - t.abs() * shape.lambda_norm(&p)).abs() / shape.lambda_norm(&p).max(1e-300));
            }
        }
    }
    Ok((
        mismatches == 0 && homog_dev <= 1e-12 && scale_dev <= 1e-12,
        format!("{mismatches} membership mismatches; scaling-polarity gauge deviation {scale_dev:.1e}; homogeneity {homog_dev:.1e} (≤1e-12)"),
    ))
}

fn nested_chains() -> Outcome {
    let l = SpectrumSet::cube(1, 0.25).unwrap();
    // Half-node count 96 is a multiple of 6, so 2γ and 3γ are grid nodes.
    let grid = Arc::new(SpectralGrid::lattice(&l, 96).map_err(|e| e.to_string())?);
    let e = integers(0.5, 20.0);
    let eps = default_epsilon(&l);
    let solver = BalayageSolver::for_spectrum(&e, &l, eps, 256, BalayageParams::default()).map_err(|e| e.to_string())?;
    let window = InghamWindow::new(eps, 1, 32).map_err(|e| e.to_string())?;
    let ys: Vec<Vec<f64>> = (-80..=80).map(|i| vec![i as f64 * 0.25]).collect();
    let k_hat = balayage_constant(&solver, &ys).map_err(|e| e.to_string())?.k_hat;
    let h_norm = window.l2_norm();
    let three = ThreeDilateConstants::new(&e, grid.clone(), k_hat, h_norm).map_err(|e| e.to_string())?;
    let weighted = WeightedConstants::new(&e, grid.clone(), k_hat, h_norm).map_err(|e| e.to_string())?;
    let (mut ok3, mut okw) = (0, 0);
    for seed in 0..10u64 {
        let f = BandlimitedSignal::random(grid.clone(), seed);
        let t = three_dilate_check(&f, &e, &three).map_err(|e| e.to_string())?;
        if t.chain.holds(0.0) {
            ok3 += 1;
        } else {
            eprintln!("three-dilate seed {seed}: {:?}", t.chain);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let g: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(0.0..1.0)).collect();
        let w = weighted_frame_check(&f, &g, &e, &weighted).map_err(|e| e.to_string())?;
        if w.holds(0.0) {
            okw += 1;
        } else {
            eprintln!("weighted seed {seed}: {w:?}");
        }
    }
    let bessel = frame_bounds(&e, grid).map_err(|e| e.to_string())?.upper;
    Ok((
        ok3 == 10 && okw == 10,
        format!("three-dilate {ok3}/10, weighted {okw}/10; K̂={k_hat:.3}, ‖h‖={h_norm:.3}, B₁={bessel:.3}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Nyquist tightness", 10, nyquist),
        ("fundamental identity", 30, identity),
        ("jittered reconstruction", 20, reconstruction),
        ("covering theorem", 60, covering),
        ("STFT identities", 30, stft_identities),
        ("explicit STFT frame bound", 60, stft_bound),
        ("Gabor reconstruction", 60, gabor),
        ("pseudo-differential chain", 60, psido),
        ("geometry exactness", 5, geometry),
        ("three-dilate and weighted chains", 60, nested_chains),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*limit);
        let (pass, detail) = match outcome {
            Ok((pass, detail)) => (pass && in_time, detail),
            Err(err) => (false, format!("error: {err}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] criterion {} {name}: {detail}; runtime {:.2}s (<{limit}s)",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {}/10 criteria passed", 10 - failures);
    if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
