//! Acceptance criteria, one pass/fail line each. Exits nonzero if any fail.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use raman_vortex::beam::{decompose, lg_mode_field, ring_radius, BeamParams, GridSpec, LGModeIndex};
use raman_vortex::interferometry::{analyze_fig3_panel, extract_charge, synthesize_interferogram};
use raman_vortex::optics::{apply_spp, SppSpec};
use raman_vortex::raman::{
    build_comb, cascade_phase_recursion, conservation_check, label_range, sideband_charge,
    sideband_frequency, AmplitudeModel, LadderIndex, RamanConfig, SidebandLabel,
};
use raman_vortex::units::{omega_from_wavenumber_cm, wavelength_from_omega};
use raman_vortex_cli::commands::{self, interferogram_image, with_noise};
use raman_vortex_cli::RunConfig;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn config(overrides: &[&str]) -> RunConfig {
    let owned: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    RunConfig::load(None, &owned).expect("acceptance config")
}

fn selection_rules() -> Check {
    let mut cases = 0;
    for ell_p in -10..=10 {
        for ell_s in -10..=10 {
            let cfg = RamanConfig::new(12500.0, 12180.0, ell_p, ell_s, 320.0, 25, 25)
                .map_err(|e| e.to_string())?;
            for k in -25..=25 {
                let label = SidebandLabel::from_index(LadderIndex(k));
                let (omega, ell) = cascade_phase_recursion(&cfg, label);
                let closed = sideband_frequency(&cfg, label).map_err(|e| e.to_string())?;
                if ell != sideband_charge(&cfg, label) || (omega - closed).abs() > 1e-9 * closed {
                    return Err(format!("{label} with ell_p={ell_p}, ell_s={ell_s}"));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases agree"))
}

fn figure3_sequence() -> Check {
    let orders = label_range(SidebandLabel::AntiStokes(2), SidebandLabel::StokesOrder(2));
    let mut detail = Vec::new();
    let mut ok = true;
    for (m5, expect) in [(false, vec![5, 3, 1, -1, -3, -5]), (true, vec![1; 6])] {
        let cfg = config(&[if m5 { "m5_in=true" } else { "m5_in=false" }]);
        let raman = cfg.raman().map_err(|e| e.to_string())?;
        let setup = cfg.panel().map_err(|e| e.to_string())?;
        let start = Instant::now();
        let entries = analyze_fig3_panel(&raman, &setup, &orders);
        let secs = start.elapsed().as_secs_f64();
        let got: Vec<Option<i64>> = entries
            .iter()
            .map(|e| e.as_ref().ok().map(|e| e.reading.ell))
            .collect();
        ok &= got.iter().copied().eq(expect.iter().map(|&e| Some(e))) && secs < 60.0;
        let shown: Vec<String> = got
            .iter()
            .map(|e| e.map_or_else(|| "error".to_string(), |v| format!("{v:+}")))
            .collect();
        detail.push(format!(
            "ell_p={},ell_s={} -> ({}) in {secs:.1} s",
            raman.ell_p,
            raman.ell_s,
            shown.join(", ")
        ));
    }
    ensure(ok, format!("512x512; {}", detail.join("; ")))
}

fn conservation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let ell_p = rng.random_range(-50..=50);
        let ell_s = rng.random_range(-50..=50);
        let n = rng.random_range(1..=25u32);
        let cfg = RamanConfig::new(12500.0, 12180.0, ell_p, ell_s, 320.0, 25, 25)
            .map_err(|e| e.to_string())?;
        let sum = sideband_charge(&cfg, SidebandLabel::StokesOrder(n))
            + sideband_charge(&cfg, SidebandLabel::AntiStokes(n));
        if !conservation_check(&cfg, n) || sum != ell_p + ell_s {
            return Err(format!("ell_p={ell_p}, ell_s={ell_s}, n={n}"));
        }
    }
    Ok("10000 random triples".into())
}

fn frequency_ladder() -> Check {
    let cfg = RamanConfig::from_pump_and_shift(800e-9, omega_from_wavenumber_cm(320.0), 1, -1, 20, 20)
        .map_err(|e| e.to_string())?;
    let comb = build_comb(&cfg, AmplitudeModel::Uniform).map_err(|e| e.to_string())?;
    let nm = |label| {
        comb.get(label)
            .map(|c| wavelength_from_omega(c.omega) * 1e9)
            .unwrap_or(f64::NAN)
    };
    let pump_cm = 1e7 / 800.0;
    let as1 = nm(SidebandLabel::AntiStokes(1));
    let s1 = nm(SidebandLabel::StokesOrder(1));
    let as1_oracle = 1e7 / (pump_cm + 320.0);
    let s1_oracle = 1e7 / (pump_cm - 2.0 * 320.0);
    let as20 = comb.get(SidebandLabel::AntiStokes(20)).map(|c| c.omega);
    let positive = comb.channels().iter().all(|c| c.omega > 0.0);
    ensure(
        (as1 - as1_oracle).abs() < 0.1
            && (s1 - s1_oracle).abs() < 0.1
            && (as1 - 780.0).abs() < 0.1
            && (s1 - 843.2).abs() < 0.1
            && as20.is_some_and(|w| w > 0.0)
            && positive,
        format!(
            "AS1 {as1:.3} nm (oracle {as1_oracle:.3}), S1 {s1:.3} nm (oracle {s1_oracle:.3}), {} lines to AS20",
            comb.len()
        ),
    )
}

fn ring_scaling() -> Check {
    let spec = GridSpec::square(512, 1.0).map_err(|e| e.to_string())?;
    let beam = BeamParams::new(24.0, 0.5).map_err(|e| e.to_string())?;
    let charges = [1i64, 2, 3, 4, 6, 9];
    let pts: Vec<(f64, f64)> = charges
        .iter()
        .map(|&l| {
            let u = lg_mode_field(LGModeIndex::new(0, l), beam, spec, 0.0).unwrap();
            ((l as f64).ln(), ring_radius(&u).ln())
        })
        .collect();
    let n = pts.len() as f64;
    let (mx, my) = (
        pts.iter().map(|p| p.0).sum::<f64>() / n,
        pts.iter().map(|p| p.1).sum::<f64>() / n,
    );
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();

    let cfg = config(&["m5_in=false"]);
    let raman = cfg.raman().map_err(|e| e.to_string())?;
    let setup = cfg.panel().map_err(|e| e.to_string())?;
    let mut growth = Vec::new();
    let mut grows = true;
    for side in [
        [SidebandLabel::Pump, SidebandLabel::AntiStokes(1), SidebandLabel::AntiStokes(2)],
        [SidebandLabel::Stokes, SidebandLabel::StokesOrder(1), SidebandLabel::StokesOrder(2)],
    ] {
        let radii: Vec<f64> = analyze_fig3_panel(&raman, &setup, &side)
            .into_iter()
            .map(|e| e.map(|e| e.ring_radius * 1e6).unwrap_or(f64::NAN))
            .collect();
        grows &= radii.windows(2).all(|w| w[1] > w[0]);
        growth.push(format!(
            "{}: {}",
            side.iter().map(|l| l.to_string()).collect::<Vec<_>>().join("<"),
            radii.iter().map(|r| format!("{r:.1}")).collect::<Vec<_>>().join(" < ")
        ));
    }
    ensure(
        (slope - 0.5).abs() <= 0.05 && grows,
        format!("slope {slope:.4}; detection-plane radii (um) {}", growth.join("; ")),
    )
}

fn charge_round_trip(scratch: &Path) -> Check {
    const LAMBDA: f64 = 800e-9;
    const PITCH: f64 = 2e-6;
    let lg = |n: usize, ell: i64, waist_px: f64| {
        let spec = GridSpec::square(n, PITCH).unwrap();
        let beam = BeamParams::new(waist_px * PITCH, LAMBDA).unwrap();
        lg_mode_field(LGModeIndex::new(0, ell), beam, spec, 0.0).unwrap()
    };
    let tilt = |n: usize, fringes: f64| (fringes * LAMBDA / (n as f64 * PITCH)).asin();
    let via_file = |gram: &raman_vortex::interferometry::Interferogram, name: &str| {
        let path = scratch.join(name);
        fs::write(&path, interferogram_image(gram, SidebandLabel::Pump).encode()).unwrap();
        commands::analyze(&path, None).map(|r| r.reading.ell)
    };

    let reference = lg(512, 0, 200.0);
    let mut exact = 0;
    for ell in -5..=5 {
        for fringes in [32.0, -32.0] {
            let gram = synthesize_interferogram(&lg(512, ell, 64.0), &reference, tilt(512, fringes), 0.0)
                .map_err(|e| e.to_string())?;
            let direct = extract_charge(&gram).ell;
            let filed = via_file(&gram, "exact.pgm").map_err(|e| e.to_string())?;
            if direct != ell || filed != ell {
                return Err(format!("ell={ell}, fringes={fringes}: direct {direct}, file {filed}"));
            }
            exact += 1;
        }
    }

    let reference = lg(256, 0, 100.0);
    let trials = 500;
    let mut hits = 0;
    for trial in 0..trials {
        let ell = (trial % 11) as i64 - 5;
        let fringes = if trial % 2 == 0 { 20.0 } else { -20.0 };
        let gram = synthesize_interferogram(&lg(256, ell, 32.0), &reference, tilt(256, fringes), 0.0)
            .map_err(|e| e.to_string())?;
        let noisy = with_noise(&gram, 0.05, 1000 + trial as u64).map_err(|e| e.to_string())?;
        if via_file(&noisy, "noisy.pgm").map_err(|e| e.to_string())? == ell {
            hits += 1;
        }
    }
    let rate = hits as f64 / trials as f64;
    ensure(
        rate >= 0.99,
        format!("{exact}/22 exact through PGM; {hits}/{trials} noisy trials ({:.1}%)", 100.0 * rate),
    )
}

/// ell = 1 Fourier coefficient of a 16-level staircase phase, summed on a
/// fine azimuthal grid.
fn staircase_oracle(steps: u32) -> f64 {
    let m = 1 << 16;
    let mut c = Complex64::new(0.0, 0.0);
    for j in 0..m {
        let theta = 2.0 * PI * (j as f64 + 0.5) / m as f64;
        let level = (theta * steps as f64 / (2.0 * PI)).floor();
        let phase = 2.0 * PI * level / steps as f64;
        c += Complex64::from_polar(1.0, phase - theta);
    }
    (c / m as f64).norm_sqr()
}

fn spp_quantization() -> Check {
    let spec = GridSpec::square(512, 1.0).map_err(|e| e.to_string())?;
    let beam = BeamParams::new(64.0, 1.0).map_err(|e| e.to_string())?;
    let g = lg_mode_field(LGModeIndex::new(0, 0), beam, spec, 0.0).map_err(|e| e.to_string())?;
    let fraction = |spp: SppSpec| {
        decompose(&apply_spp(&g, &spp), beam, 16, 1..=1).map(|d| d.power_in_ell(1))
    };
    let cont = fraction(SppSpec::continuous(1, 1.0).unwrap()).map_err(|e| e.to_string())?;
    let stepped = fraction(SppSpec::stepped(1, 16, 1.0).unwrap()).map_err(|e| e.to_string())?;
    let ratio = stepped / cont;
    let oracle = staircase_oracle(16);
    let agree = (ratio - oracle).abs() < 1e-3;
    ensure(
        ratio >= 0.99 && agree,
        format!(
            "retained {ratio:.5} (threshold 0.99); 1-D oracle {oracle:.5}, agreement {} ({:.1e})",
            if agree { "ok" } else { "FAILED" },
            (ratio - oracle).abs()
        ),
    )
}

fn chirp_matching(scratch: &Path) -> Check {
    let cfg = config(&[
        "match=true",
        "chirp_rate=3e26",
        "raman_shift_cm=320",
        &format!("output_dir={}", scratch.join("pulse").display()),
    ]);
    let report = commands::pulse(&cfg).map_err(|e| e.to_string())?;
    let oracle = 1.0 / (raman_vortex::units::SPEED_OF_LIGHT * 320.0e2);
    let beat = report.beat_period.ok_or("no beat periodicity")?;
    let comb = report.comb_period.ok_or("no comb periodicity")?;
    let dt = cfg.time_step_fs * 1e-15;
    ensure(
        (beat / oracle - 1.0).abs() <= 0.01
            && (comb - oracle).abs() <= dt
            && report.comb_labels.len() == 5,
        format!(
            "oracle {:.3} fs; beat {:.3} fs ({:+.2}%); 5-line comb {:.3} fs (|diff| {:.3} fs, dt {:.1} fs)",
            oracle * 1e15,
            beat * 1e15,
            100.0 * (beat / oracle - 1.0),
            comb * 1e15,
            (comb - oracle).abs() * 1e15,
            dt * 1e15
        ),
    )
}

fn determinism(scratch: &Path) -> Check {
    let bin = env!("CARGO_BIN_EXE_raman-vortex");
    let run = |dir: &Path| {
        Command::new(bin)
            .args(["--seed", "11", "--set", "noise=0.05", "--out"])
            .arg(dir)
            .arg("figure3")
            .output()
            .map_err(|e| e.to_string())
            .and_then(|o| {
                if o.status.success() {
                    Ok(())
                } else {
                    Err(String::from_utf8_lossy(&o.stderr).into_owned())
                }
            })
    };
    let (a, b) = (scratch.join("run_a"), scratch.join("run_b"));
    run(&a)?;
    run(&b)?;
    let mut names: Vec<_> = fs::read_dir(&a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let mut compared = 0;
    for name in &names {
        let x = fs::read(a.join(name)).map_err(|e| e.to_string())?;
        let y = fs::read(b.join(name)).map_err(|e| format!("{}: {e}", name.to_string_lossy()))?;
        if x != y {
            return Err(format!("{} differs", name.to_string_lossy()));
        }
        compared += 1;
    }
    let pgm = names.iter().filter(|n| n.to_string_lossy().ends_with(".pgm")).count();
    ensure(
        pgm == 12 && names.iter().any(|n| n == "readings.csv"),
        format!("{compared} files byte-identical ({pgm} PGM)"),
    )
}

fn main() {
    let scratch = tempfile::tempdir().expect("scratch directory");
    let dir = scratch.path();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check + '_>)> = vec![
        ("selection-rule exactness", Box::new(selection_rules)),
        ("sideband-order sequence", Box::new(figure3_sequence)),
        ("charge conservation", Box::new(conservation)),
        ("frequency ladder", Box::new(frequency_ladder)),
        ("ring-radius scaling", Box::new(ring_scaling)),
        ("charge round trip", Box::new(|| charge_round_trip(dir))),
        ("SPP quantization", Box::new(spp_quantization)),
        ("chirp matching", Box::new(|| chirp_matching(dir))),
        ("determinism", Box::new(|| determinism(dir))),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {} {name}: {detail} ({secs:.2} s)", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
