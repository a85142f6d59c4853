//! One function per subcommand. Each returns whether every asserted claim
//! held; reports land in the output directory.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use nusample::balayage::{
    default_epsilon, fundamental_identity_residual, write_batch_csv, BalayageParams, BalayageSolver, InghamWindow,
};
use nusample::frames::{analysis, covering_frame_experiment, CoveringFrameParams, FrameSystem, TestSubspace};
use nusample::geometry::{AxisBox, SpectralGrid, SpectrumSet};
use nusample::psido::{psido_frame_check, validate_symbol_class, KNSymbol, PsidoConstants};
use nusample::spectral::{random_pw_signal, BandlimitedSignal, TrigPolynomial};
use nusample::stft::{
    default_omega_grid, default_time_grid, gabor_reconstruct, gaussian_window, isometry_check, pw_stft_frame_check,
    stft, stft_fourier_closed_form, tf_identity_check, PhaseSpaceSamples, StftSetup, TimeSignal, UniformGrid,
    WindowFunction,
};
use nusample::C64;

use crate::config::*;
use crate::output::Output;
use crate::CliError;

fn numeric(e: nusample::Error) -> CliError {
    CliError::Numeric(e.to_string())
}

fn grid_for(spectrum: &SpectrumSet, nodes: usize) -> Result<Arc<SpectralGrid>, CliError> {
    SpectralGrid::midpoint(spectrum, nodes).map(Arc::new).map_err(|e| CliError::Config(e.to_string()))
}

pub fn covering(cfg: &Loaded<CoveringConfig>, out: &Output) -> Result<bool, CliError> {
    let c = &cfg.config;
    let spectrum = c.spectrum.build()?;
    let set = c.sampling.build(&cfg.base_dir, cfg.seed)?;
    let dim = spectrum.dim();
    let params = CoveringFrameParams {
        nodes: c.nodes,
        subspace_region: AxisBox::centered(dim, c.subspace.half),
        leakage: c.subspace.leakage,
    };
    let exp = covering_frame_experiment(&spectrum, &set, c.rho, &AxisBox::centered(dim, c.region_half), c.resolution, &params)
        .map_err(numeric)?;
    let header: Vec<String> = (1..=dim).map(|i| format!("x_{i}")).collect();
    out.csv("witnesses.csv", &header, exp.witnesses.iter().map(|w| w.iter().map(|v| v.to_string()).collect()))?;
    let ok = exp.confirmed != Some(false);
    out.report(&exp, ok)?;
    Ok(ok)
}

pub fn frame_bounds(cfg: &Loaded<FrameBoundsConfig>, out: &Output) -> Result<bool, CliError> {
    let c = &cfg.config;
    let spectrum = c.spectrum.build()?;
    let set = c.sampling.build(&cfg.base_dir, cfg.seed)?;
    let grid = grid_for(&spectrum, c.nodes)?;
    let sys = FrameSystem::new(&set, grid.clone()).map_err(numeric)?;
    let subspace = match &c.subspace {
        Some(s) => Some(TestSubspace::concentrated(grid.clone(), &AxisBox::centered(spectrum.dim(), s.half), s.leakage).map_err(numeric)?),
        None => None,
    };
    let report = match &subspace {
        Some(sub) => sys.bounds_on(sub),
        None => sys.bounds(),
    }
    .map_err(numeric)?;
    let rows = (0..c.trials).map(|t| {
        let seed = cfg.seed.wrapping_add(t as u64);
        let f = match &subspace {
            Some(sub) => sub.random_signal(seed),
            None => BandlimitedSignal::random(grid.clone(), seed),
        };
        let q = analysis(&f, &set).energy() / f.norm_sqr();
        vec![t.to_string(), q.to_string()]
    });
    out.csv("rayleigh.csv", &["trial", "rayleigh"], rows)?;
    let ok = !c.require_frame || report.is_frame();
    #[derive(Serialize)]
    struct Report<'a> {
        frame: &'a nusample::frames::FrameReport,
        is_frame: bool,
        subspace_dim: Option<usize>,
    }
    out.report(&Report { frame: &report, is_frame: report.is_frame(), subspace_dim: subspace.as_ref().map(|s| s.dim()) }, ok)?;
    Ok(ok)
}

pub fn reconstruct(cfg: &Loaded<ReconstructConfig>, out: &Output) -> Result<bool, CliError> {
    let c = &cfg.config;
    let spectrum = c.spectrum.build()?;
    let set = c.sampling.build(&cfg.base_dir, cfg.seed)?;
    let grid = grid_for(&spectrum, c.nodes)?;
    let f = if c.zero_signal {
        BandlimitedSignal::zero(grid.clone())
    } else {
        let mut f = BandlimitedSignal::random(grid.clone(), cfg.seed);
        f.normalize();
        f
    };
    let sys = FrameSystem::new(&set, grid).map_err(numeric)?;
    let rec = sys.reconstruct(&sys.analyze(f.coeffs()), c.cg_tolerance, c.max_iter).map_err(numeric)?;
    let diff = rec.signal.combine(C64::new(1.0, 0.0), &f, C64::new(-1.0, 0.0)).map_err(numeric)?.norm();
    let error = if f.norm() > 0.0 { diff / f.norm() } else { diff };
    out.csv(
        "history.csv",
        &["iteration", "residual"],
        rec.history.iter().enumerate().map(|(i, r)| vec![i.to_string(), r.to_string()]),
    )?;
    if !rec.converged {
        eprintln!("unconverged after {} iterations (residual {:e})", rec.iterations, rec.residual);
    }
    let ok = rec.converged && error <= c.error_tolerance;
    #[derive(Serialize)]
    struct Report<'a> {
        relative_error: f64,
        iterations: usize,
        residual: f64,
        converged: bool,
        space: &'a str,
        samples: usize,
    }
    out.report(
        &Report {
            relative_error: error,
            iterations: rec.iterations,
            residual: rec.residual,
            converged: rec.converged,
            space: &rec.space,
            samples: set.len(),
        },
        ok,
    )?;
    Ok(ok)
}

pub fn identity(cfg: &Loaded<IdentityConfig>, out: &Output) -> Result<bool, CliError> {
    let c = &cfg.config;
    let spectrum = c.spectrum.build()?;
    let set = c.sampling.build(&cfg.base_dir, cfg.seed)?;
    let eps = c.epsilon.unwrap_or_else(|| default_epsilon(&spectrum));
    let params = BalayageParams { tolerance: c.balayage_tolerance, ..BalayageParams::default() };
    let solver = BalayageSolver::for_spectrum(&set, &spectrum, eps, c.nodes, params).map_err(numeric)?;
    let window = InghamWindow::new(eps, spectrum.dim(), c.profile_nodes).map_err(|e| CliError::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let dim = spectrum.dim();
    let mut rows = Vec::new();
    let mut trials = Vec::new();
    let mut all_centres = Vec::new();
    for t in 0..c.trials {
        let f = TrigPolynomial::random(&spectrum, c.terms, cfg.seed.wrapping_add(t as u64));
        let ys: Vec<Vec<f64>> =
            (0..c.centres).map(|_| (0..dim).map(|_| rng.random_range(-c.centre_half..=c.centre_half)).collect()).collect();
        let r = fundamental_identity_residual(&f, &solver, &window, &ys).map_err(numeric)?;
        for (y, res) in ys.iter().zip(&r.residuals) {
            let mut row = vec![t.to_string()];
            row.extend(y.iter().map(|v| v.to_string()));
            row.push(res.to_string());
            rows.push(row);
        }
        trials.push(r.max_residual);
        all_centres.extend(ys);
    }
    let mut header = vec!["trial".to_string()];
    header.extend((1..=dim).map(|i| format!("y_{i}")));
    header.push("residual".into());
    out.csv("residuals.csv", &header, rows.into_iter())?;
    let solutions = all_centres.iter().map(|y| solver.solve(y)).collect::<Result<Vec<_>, _>>().map_err(numeric)?;
    write_batch_csv(&solutions, out.create("balayage.csv")?).map_err(numeric)?;
    let max_residual = trials.iter().copied().fold(0.0, f64::max);
    let ok = max_residual <= c.tolerance;
    #[derive(Serialize)]
    struct Report {
        epsilon: f64,
        max_residual: f64,
        trial_max_residuals: Vec<f64>,
        max_l1_mass: f64,
        max_fit_residual: f64,
    }
    out.report(
        &Report {
            epsilon: eps,
            max_residual,
            trial_max_residuals: trials,
            max_l1_mass: solutions.iter().map(|s| s.l1_mass).fold(0.0, f64::max),
            max_fit_residual: solutions.iter().map(|s| s.fit_residual).fold(0.0, f64::max),
        },
        ok,
    )?;
    Ok(ok)
}

pub fn stft_checks(cfg: &Loaded<StftConfig>, out: &Output) -> Result<bool, CliError> {
    let c = &cfg.config;
    let mut setup = StftSetup::default();
    for _ in 0..c.refinements {
        setup = setup.refined();
    }
    let g = WindowFunction::gaussian_on(setup.time);
    let f = g.signal.clone();
    let iso = isometry_check(&f, &g, &setup.tf).map_err(numeric)?;
    let tfi = tf_identity_check(&f, &g, &setup).map_err(numeric)?;
    let zeta = UniformGrid::symmetric(c.closed_form_half, setup.spectral.step / 2.0).map_err(|e| CliError::Config(e.to_string()))?;
    let cf = stft_fourier_closed_form(&f, &g, &setup, &zeta, &zeta).map_err(numeric)?;
    stft(&f, &g, &setup.tf).map_err(numeric)?.write_spectrogram_csv(out.create("spectrogram.csv")?).map_err(numeric)?;
    let mut ok = iso.deviation <= c.tolerances.isometry
        && tfi.max_deviation <= c.tolerances.tf_identity
        && cf.deviation <= c.tolerances.closed_form;
    let mut bound = Vec::new();
    if let Some(b) = &c.bound {
        let spectrum = SpectrumSet::cube(1, b.half_width).map_err(|e| CliError::Config(e.to_string()))?;
        let set = b.sampling.build(&cfg.base_dir, cfg.seed)?;
        let window = gaussian_window(1).map_err(numeric)?;
        let omega = default_omega_grid(b.half_width);
        let tf = StftSetup::default().tf;
        for s in 0..b.signals {
            let sig = random_pw_signal(&spectrum, b.nodes, cfg.seed.wrapping_add(s as u64)).map_err(numeric)?;
            let r = pw_stft_frame_check(&sig, &window, &set, &omega, &tf).map_err(numeric)?;
            ok &= r.holds;
            bound.push(r);
        }
        out.csv(
            "bound.csv",
            &["signal", "energy", "signal_energy", "b_formula", "holds"],
            bound.iter().enumerate().map(|(i, r)| {
                vec![i.to_string(), r.energy.to_string(), r.signal_energy.to_string(), r.b_formula.to_string(), r.holds.to_string()]
            }),
        )?;
    }
    #[derive(Serialize)]
    struct Report<'a> {
        setup: &'a StftSetup,
        isometry: nusample::stft::IsometryReport,
        tf_identity: nusample::stft::TfIdentityReport,
        closed_form: nusample::stft::ClosedFormReport,
        bound: Vec<nusample::stft::PwStftReport>,
    }
    out.report(&Report { setup: &setup, isometry: iso, tf_identity: tfi, closed_form: cf, bound }, ok)?;
    Ok(ok)
}

pub fn gabor(cfg: &Loaded<GaborConfig>, out: &Output) -> Result<bool, CliError> {
    let c = &cfg.config;
    let grid = UniformGrid::half_open(c.time_half, c.time_step).map_err(|e| CliError::Config(e.to_string()))?;
    let g = WindowFunction::gaussian_on(grid);
    let l = &c.lattice;
    let mut samples = PhaseSpaceSamples::lattice(l.a, l.b, l.times, l.freqs).map_err(|e| CliError::Config(e.to_string()))?;
    if c.jitter > 0.0 {
        samples = samples.jittered(c.jitter, cfg.seed).map_err(|e| CliError::Config(e.to_string()))?;
    }
    let f = TimeSignal::random_atoms(grid, c.terms, c.reach, cfg.seed);
    let r = gabor_reconstruct(&f, &g, &samples, c.cg_tolerance, c.max_iter).map_err(numeric)?;
    let ts = grid.nodes();
    out.csv(
        "reconstruction.csv",
        &["t", "re", "im", "original_re", "original_im"],
        ts.iter().zip(&r.signal.values).zip(&f.values).map(|((t, v), o)| {
            vec![t.to_string(), v.re.to_string(), v.im.to_string(), o.re.to_string(), o.im.to_string()]
        }),
    )?;
    if !r.converged {
        eprintln!("unconverged after {} iterations", r.iterations);
    }
    let ok = r.converged && r.error <= c.error_tolerance;
    #[derive(Serialize)]
    struct Report {
        relative_error: f64,
        iterations: usize,
        converged: bool,
        bounds: nusample::stft::GaborBounds,
        atoms: usize,
    }
    out.report(&Report { relative_error: r.error, iterations: r.iterations, converged: r.converged, bounds: r.bounds, atoms: samples.len() }, ok)?;
    Ok(ok)
}

pub fn psido(cfg: &Loaded<PsidoConfig>, out: &Output) -> Result<bool, CliError> {
    let c = &cfg.config;
    let spectrum = SpectrumSet::cube(1, c.half_width).map_err(|e| CliError::Config(e.to_string()))?;
    let symbol = KNSymbol::two_term(spectrum.clone(), c.lambda, c.epsilon, c.rho).map_err(|e| CliError::Config(e.to_string()))?;
    let validation = validate_symbol_class(&symbol);
    if !validation.ok() {
        return Err(CliError::Config(validation.violations.join("; ")));
    }
    let set = c.sampling.build(&cfg.base_dir, cfg.seed)?.symmetrize();
    let eps = default_epsilon(&spectrum);
    let solver = BalayageSolver::for_spectrum(&set, &spectrum, eps, c.balayage_nodes, BalayageParams::default()).map_err(numeric)?;
    let window = InghamWindow::new(eps, 1, 32).map_err(numeric)?;
    let tg = default_time_grid();
    let ys: Vec<Vec<f64>> = tg.nodes().into_iter().map(|y| vec![y]).collect();
    let lambda_grid = grid_for(&spectrum, c.spectrum_nodes)?;
    let constants = PsidoConstants::new(&symbol, &set, &solver, &window, &ys, lambda_grid, c.gamma_nodes).map_err(numeric)?;
    let gamma = symbol.gamma_grid(c.gamma_nodes).map_err(numeric)?;
    let mut chains = Vec::new();
    for s in 0..c.signals {
        let f = TimeSignal::random_atoms(tg, c.atoms, c.reach, cfg.seed.wrapping_add(s as u64));
        chains.push(psido_frame_check(&symbol, &f, &set, &constants, &gamma).map_err(numeric)?);
    }
    out.csv(
        "chains.csv",
        &["trial", "lhs", "mid", "rhs", "mid_adjoint"],
        chains.iter().enumerate().map(|(i, r)| {
            vec![i.to_string(), r.chain.lhs.to_string(), r.chain.mid.to_string(), r.chain.rhs.to_string(), r.mid_adjoint.to_string()]
        }),
    )?;
    let ok = chains.iter().all(|r| r.chain.holds(c.slack));
    #[derive(Serialize)]
    struct Report<'a> {
        symbol: &'a KNSymbol,
        validation: nusample::psido::SymbolClassReport,
        constants: PsidoConstants,
        chains: Vec<nusample::psido::PsidoChain>,
    }
    out.report(&Report { symbol: &symbol, validation, constants, chains }, ok)?;
    Ok(ok)
}
