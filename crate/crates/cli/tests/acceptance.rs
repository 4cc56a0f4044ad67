//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use qnoise_cli::analysis::{even_harmonic_margin_db, normalized_autocorrelation, peak_to_median};
use qnoise_cli::commands::{
    cmd_compare, cmd_simulate, cmd_spectrum, cmd_sweep, compare, simulate, SweepParam,
};
use qnoise_cli::config::{FileConfig, NoiseSource, Overrides};
use qnoise_cli::RunConfig;
use qnoise_core::errormodel::{
    amplitude_rel_error, phase_error_fundamental, phase_fundamental_exact, qnp_worst_case, qnsd,
    sign_model_spectrum, AnalyticContext,
};
use qnoise_core::quantizer::{quantize, sign_model_noise, AdcConfig};
use qnoise_core::signalgen::{synthesize, SampledSignal, SamplingSpec, SignalSpec, ToneSpec};
use qnoise_core::spectral::{amplitude_spectrum, dft};
use rand::{rngs::StdRng, Rng, SeedableRng};

const Q12: f64 = 1.0 / 2048.0;

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn recipe(name: &str, out: &Path, flags: Overrides) -> RunConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../recipes")
        .join(name);
    let mut cfg = FileConfig::load(&path).unwrap().resolve(&flags).unwrap();
    cfg.output.dir = out.join(name.trim_end_matches(".toml"));
    cfg
}

fn one_period_sine(n: usize) -> SampledSignal {
    let tone = ToneSpec::new(1.0, 50.0, 0.0).unwrap();
    synthesize(
        &SignalSpec::single(tone),
        &SamplingSpec::new(50.0 * n as f64, n).unwrap(),
    )
    .unwrap()
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn ac1_quantization_bound() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = 0.0f64;
    let mut violations = 0usize;
    let mut clipped = 0usize;
    for bits in [8, 12, 16] {
        let cfg = AdcConfig::bipolar_unit(bits).unwrap();
        let q = cfg.step();
        let xs: Vec<f64> = (0..100_000)
            .map(|_| rng.gen_range(cfg.v_min..=cfg.v_max - q))
            .collect();
        let rec = quantize(&SampledSignal::new(xs, 1.0), &cfg).unwrap();
        clipped += rec.clipped_count;
        for &e in &rec.error {
            if !(-0.5 * q <= e && e <= 0.5 * q) {
                violations += 1;
            }
            worst = worst.max(e.abs() / q);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        violations == 0 && clipped == 0 && secs < 1.0,
        format!(
            "3x1e5 inputs, max |err|/q = {worst}, violations {violations}, {secs:.3} s (< 1 s)"
        ),
    )
}

fn ac2_closed_form_vs_direct_dft() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in [8, 50, 200, 1024] {
        let ctx = AnalyticContext::one_period(Q12, n, 1.0).unwrap();
        let noise = sign_model_noise(&one_period_sine(n), Q12).unwrap();
        let sp = dft(&SampledSignal::new(noise, 1.0));
        for k in 1..n {
            let closed = sign_model_spectrum(&ctx, k).unwrap();
            worst = worst.max((closed - sp.bins[k]).norm());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-12 && secs < 10.0,
        format!("max |closed - DFT| = {worst:e} (<= 1e-12), {secs:.3} s (< 10 s)"),
    )
}

fn ac3_even_harmonic_nulls() -> Outcome {
    let mut analytic_nonzero = 0usize;
    let mut worst_sim = 0.0f64;
    for n in [8, 50, 200, 1024] {
        let ctx = AnalyticContext::one_period(Q12, n, 1.0).unwrap();
        for k in (2..n).step_by(2) {
            if amplitude_rel_error(&ctx, k).unwrap() != 0.0
                || sign_model_spectrum(&ctx, k).unwrap().norm() != 0.0
            {
                analytic_nonzero += 1;
            }
        }
        let x = one_period_sine(n);
        let noise = sign_model_noise(&x, Q12).unwrap();
        let y: Vec<f64> = x.samples.iter().zip(&noise).map(|(a, b)| a + b).collect();
        let amp = amplitude_spectrum(&dft(&SampledSignal::new(y, x.sample_rate_hz)));
        for k in (2..=n / 2).step_by(2) {
            worst_sim = worst_sim.max(amp[k]);
        }
    }
    outcome(
        analytic_nonzero == 0 && worst_sim <= 1e-12,
        format!(
            "analytic nonzero even bins {analytic_nonzero} (== 0), simulated max even |Y|/X_m = {worst_sim:e} (<= 1e-12)"
        ),
    )
}

fn ac4_square_wave_asymptotics() -> Outcome {
    let ctx = AnalyticContext::one_period(Q12, 2000, 1.0).unwrap();
    let ratios: Vec<f64> = (1..=9)
        .step_by(2)
        .map(|k| sign_model_spectrum(&ctx, k).unwrap().norm() * k as f64 * PI / (2.0 * Q12))
        .collect();
    let pass = ratios.iter().all(|r| (0.99..=1.01).contains(r));
    outcome(
        pass,
        format!("|dX[k]|*k*pi/(2q), k=1,3,..,9: {ratios:.6?} (in [0.99, 1.01])"),
    )
}

fn ac5_phase_error_law() -> Outcome {
    let ctx = AnalyticContext::one_period(Q12, 200, 1.0).unwrap();
    let delta = phase_error_fundamental(&ctx).unwrap();
    let law = 2.0 * Q12 / 200.0;
    let exact = phase_fundamental_exact(&ctx).unwrap();
    let gap = (exact - (-FRAC_PI_2 + delta)).abs();
    let bound = 4.0 * Q12 * Q12;
    let rel = (delta / 4.882_812_5e-6 - 1.0).abs();
    outcome(
        rel < 1e-13 && law == 4.882_812_5e-6 && gap <= bound,
        format!(
            "dphi = {delta:e} rad (4.8828125e-6, rel {rel:e} < 1e-13), |exact - linear| = {gap:e} (<= {bound:e})"
        ),
    )
}

fn ac6_rms_convergence(out: &Path) -> Outcome {
    let mut cfg = RunConfig::defaults().unwrap();
    cfg.signal = SignalSpec::single(ToneSpec::new(0.9, 50.0 * 2f64.sqrt(), 0.0).unwrap());
    cfg.sampling = SamplingSpec::new(10240.0, 16_384).unwrap();
    cfg.output.dir = out.join("ac6");
    let trace = simulate(&cfg).unwrap();
    let rms = (trace.err.iter().map(|e| e * e).sum::<f64>() / trace.len() as f64).sqrt();
    let target = Q12 / 12f64.sqrt();
    let rel = (rms / target - 1.0).abs();
    outcome(
        rel <= 0.02 && trace.clipped_count == 0,
        format!(
            "N = 16384, f/fs = 50*sqrt(2)/10240, rms/(q/sqrt(12)) - 1 = {rel:.4} (|.| <= 0.02)"
        ),
    )
}

fn ac7_constants() -> Outcome {
    let mut worst = 0.0f64;
    for q in [1.0, Q12, 1e-6, 3.7] {
        worst = worst.max((qnp_worst_case(q).unwrap() / q - 0.408_248_290_463_863).abs());
        worst = worst.max((qnsd(q).unwrap() / q - 0.288_675_134_594_812_9).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("max constant deviation {worst:e} (<= 1e-12)"),
    )
}

fn ac8_figures(out: &Path) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;

    // Figure 1 records with the reference 0.0201 s interval.
    let a = cmd_simulate(&recipe("fig1a.toml", out, Overrides::default())).unwrap();
    let b = cmd_simulate(&recipe("fig1b.toml", out, Overrides::default())).unwrap();
    let written =
        out.join("fig1a/simulate.csv").exists() && out.join("fig1b/simulate_err.svg").exists();
    pass &= a.len() == 205 && b.len() == 201 && written;
    notes.push(format!("N(a) = {}, N(b) = {}", a.len(), b.len()));

    // Lag-200 periodicity over 0.1 s records with the same f, fs and bits.
    let long = Overrides {
        interval: Some(0.1),
        ..Overrides::default()
    };
    let la = simulate(&recipe("fig1a.toml", out, long.clone())).unwrap();
    let lb = simulate(&recipe("fig1b.toml", out, long)).unwrap();
    let ra = normalized_autocorrelation(&la.err, 200).unwrap();
    let rb = normalized_autocorrelation(&lb.err, 200).unwrap();
    pass &= rb >= 0.99 && ra <= 0.5;
    notes.push(format!(
        "rho200(b) = {rb:.4} (>= 0.99), rho200(a) = {ra:.4} (<= 0.5)"
    ));

    // Figure 2a: no dominant error harmonic without frequency matching.
    let sa = cmd_spectrum(&recipe("fig2a.toml", out, Overrides::default())).unwrap();
    let amps: Vec<f64> = sa.error.iter().map(|r| r.amplitude).collect();
    let ratio = peak_to_median(&amps, 2..=amps.len() - 1);
    pass &= ratio <= 5.0;
    notes.push(format!("fig2a max/median = {ratio:.3} (<= 5)"));

    // Figure 2b: even error harmonics vanish with frequency matching.
    let sb = cmd_spectrum(&recipe("fig2b.toml", out, Overrides::default())).unwrap();
    let mut full: Vec<f64> = sb.error.iter().map(|r| r.amplitude).collect();
    full.resize(200, 0.0);
    let margin = even_harmonic_margin_db(&full, 1).unwrap();
    pass &= margin >= 40.0;
    notes.push(format!(
        "fig2b even-harmonic margin = {margin:.1} dB (>= 40)"
    ));

    let rail = recipe(
        "fig2b.toml",
        out,
        Overrides {
            amp: Some(1.0),
            ..Overrides::default()
        },
    );
    let trace = simulate(&rail).unwrap();
    let mut rail_amps =
        amplitude_spectrum(&dft(&SampledSignal::new(trace.err, trace.sample_rate_hz)));
    rail_amps.truncate(200);
    let rail_margin = even_harmonic_margin_db(&rail_amps, 1).unwrap();
    notes.push(format!(
        "[info: unit amplitude touches the +1 rail, margin {rail_margin:.1} dB]"
    ));

    // Figure 3 recipe stays within the compare tolerance.
    let cmp = cmd_compare(&recipe("fig3.toml", out, Overrides::default()));
    pass &= cmp.is_ok();
    if let Ok(c) = &cmp {
        notes.push(format!("fig3 max deviation {:e}", c.max_abs_dev()));
    }

    outcome(pass, notes.join("; "))
}

fn ac9_scaling_sweeps(out: &Path) -> Outcome {
    let mut base = recipe("fig3.toml", out, Overrides::default());
    base.output.dir = out.join("sweep_bits");
    let bits = [8u64, 10, 12, 14, 16];
    let points = cmd_sweep(&base, SweepParam::Bits, &bits).unwrap();
    let xs: Vec<f64> = bits.iter().map(|&b| b as f64).collect();
    let sim: Vec<f64> = points
        .iter()
        .map(|p| {
            p.comparison
                .fundamental()
                .simulated_amplitude_rel_error
                .log2()
        })
        .collect();
    let ana: Vec<f64> = points
        .iter()
        .map(|p| {
            p.comparison
                .fundamental()
                .analytic_amplitude_rel_error
                .log2()
        })
        .collect();
    let (s_sim, s_ana) = (slope(&xs, &sim), slope(&xs, &ana));

    base.output.dir = out.join("sweep_n");
    let ns = [100u64, 200, 400];
    let points = cmd_sweep(&base, SweepParam::NSamples, &ns).unwrap();
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).log2()).collect();
    let psim: Vec<f64> = points
        .iter()
        .map(|p| {
            p.comparison
                .fundamental()
                .simulated_phase_error
                .unwrap()
                .log2()
        })
        .collect();
    let pana: Vec<f64> = points
        .iter()
        .map(|p| {
            p.comparison
                .fundamental()
                .analytic_phase_error
                .unwrap()
                .log2()
        })
        .collect();
    let (p_sim, p_ana) = (slope(&xs, &psim), slope(&xs, &pana));

    let within = |s: f64| (s + 1.0).abs() <= 0.01;
    outcome(
        [s_sim, s_ana, p_sim, p_ana].into_iter().all(within),
        format!(
            "amplitude vs bits slope sim {s_sim:.5} / analytic {s_ana:.5}; phase vs N slope sim {p_sim:.5} / analytic {p_ana:.5} (each -1 +/- 1%)"
        ),
    )
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(RunConfig::defaults().unwrap().noise, NoiseSource::Real);
    // Sanity: the reference comparison must be computable at all.
    compare(&recipe("fig3.toml", out, Overrides::default())).unwrap();

    let criteria: Vec<(&str, Check)> = vec![
        ("AC1 quantization bound", Box::new(ac1_quantization_bound)),
        (
            "AC2 closed form vs direct DFT",
            Box::new(ac2_closed_form_vs_direct_dft),
        ),
        ("AC3 even-harmonic nulls", Box::new(ac3_even_harmonic_nulls)),
        (
            "AC4 square-wave asymptotics",
            Box::new(ac4_square_wave_asymptotics),
        ),
        ("AC5 phase-error law", Box::new(ac5_phase_error_law)),
        ("AC6 RMS convergence", Box::new(|| ac6_rms_convergence(out))),
        ("AC7 QNP/QNSD constants", Box::new(ac7_constants)),
        ("AC8 figure reproduction", Box::new(|| ac8_figures(out))),
        ("AC9 scaling sweeps", Box::new(|| ac9_scaling_sweeps(out))),
    ];

    let mut failed = 0;
    for (name, check) in &criteria {
        let result = check();
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {}", result.detail);
        failed += usize::from(!result.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
