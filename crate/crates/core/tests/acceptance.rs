//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use eit_core::atomic::{micros, LevelScheme};
use eit_core::calibration::{calibrate, default_grid};
use eit_core::config::{LoadedConfig, PRESETS};
use eit_core::drive::{DriveConfig, Envelope, Window};
use eit_core::medium::MediumConfig;
use eit_core::run::{run_scenario, scenario_grid, Command};
use eit_core::scenarios::ScenarioResult;
use eit_core::solver::{Propagator, SimulationGrid};
use eit_core::spectra::{find_peak, transmission_homogeneous, transmission_inhomogeneous, QuadratureSpec};
use rayon::prelude::*;
use toml::Value;

type Check = Result<(bool, String), String>;

struct Criterion {
    id: &'static str,
    name: &'static str,
    run: fn() -> Check,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn preset(name: &str) -> LoadedConfig {
    LoadedConfig::from_preset(name).expect("shipped preset")
}

fn scenario(command: Command, loaded: &LoadedConfig) -> Result<ScenarioResult, String> {
    let (grid, _) = scenario_grid(command, loaded);
    run_scenario(command, loaded, &grid).map_err(err)
}

fn with(loaded: &LoadedConfig, overrides: &[(&str, f64)]) -> LoadedConfig {
    overrides.iter().fold(loaded.clone(), |c, (k, v)| {
        c.with_override(k, Value::Float(*v)).expect("override")
    })
}

/// Steady-state transmission of a constant probe, integrating until the
/// output stops changing.
fn cw_transmission(drive: &DriveConfig, medium: &MediumConfig, scheme: &LevelScheme, nz: usize) -> Result<f64, String> {
    const AMPLITUDE: f64 = 1e-3;
    let drive = DriveConfig {
        omega_p_input: Envelope::Constant { amplitude: AMPLITUDE },
        ..drive.clone()
    };
    let grid = SimulationGrid {
        nz,
        dt: 0.02,
        t_end: 600.0,
        ..SimulationGrid::default()
    };
    let p = Propagator::new(&drive, medium, scheme, &grid).map_err(err)?;
    let mut state = p.zero_state();
    let per_unit = (1.0 / grid.dt).round() as usize;
    let (mut last, mut settled) = (f64::NAN, 0);
    for k in 0..grid.steps() {
        let t = k as f64 * grid.dt;
        let f = p.step(&mut state, t).map_err(err)?;
        if k % per_unit == 0 {
            let tr = f.forward_output() / (AMPLITUDE * AMPLITUDE);
            settled = if (tr - last).abs() < 1e-10 { settled + 1 } else { 0 };
            last = tr;
            if settled >= 5 {
                return Ok(tr);
            }
        }
    }
    Err(format!("no steady state within t = {}", grid.t_end))
}

fn c1_spectral_oracle() -> Check {
    let scheme = LevelScheme::rb87_d2();
    let detunings: Vec<f64> = (0..21).map(|i| -4.0 + 0.4 * i as f64).collect();
    let mut cases = Vec::new();
    for od in [5.0, 50.0] {
        for omega in [0.0, 3.0] {
            for &dp in &detunings {
                cases.push((od, omega, dp));
            }
        }
    }
    let worst = cases
        .par_iter()
        .map(|&(od, omega, dp)| {
            let medium = MediumConfig {
                gamma_trd: 0.01,
                ..MediumConfig::homogeneous(od)
            };
            let drive = DriveConfig::cw(omega, 0.0, dp);
            let pde = cw_transmission(&drive, &medium, &scheme, 401)?;
            let exact = transmission_homogeneous(dp, &medium, &drive, &scheme).map_err(err)?;
            Ok(((pde - exact).abs(), od, omega, dp))
        })
        .collect::<Result<Vec<_>, String>>()?
        .into_iter()
        .fold((0.0, 0.0, 0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    Ok((
        worst.0 < 1e-3,
        format!(
            "max |T_pde - T_hom| = {:.2e} (OD {}, Omega_c {}, Delta_p {:.1}) over 84 points, nz 401",
            worst.0, worst.1, worst.2, worst.3
        ),
    ))
}

fn c2_beer_lambert() -> Check {
    let scheme = LevelScheme::two_level();
    let drive = DriveConfig::cw(0.0, 0.0, 0.0);
    let rows = [0.5, 1.0, 2.0, 5.0]
        .par_iter()
        .map(|&od| {
            let medium = MediumConfig::homogeneous(od);
            let exact = (-od).exp();
            let analytic = transmission_homogeneous(0.0, &medium, &drive, &scheme).map_err(err)?;
            let pde = cw_transmission(&drive, &medium, &scheme, 2001)?;
            Ok(((analytic / exact - 1.0).abs(), (pde / exact - 1.0).abs()))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let a = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let p = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok((
        a < 1e-6 && p < 1e-6,
        format!("OD 0.5..5: analytic rel err {a:.1e}, PDE rel err {p:.1e} (nz 2001)"),
    ))
}

fn c3_ideal_eit() -> Check {
    let scheme = LevelScheme::three_level();
    let drive = DriveConfig::cw(3.0, 0.0, 0.0);
    let medium = MediumConfig::homogeneous(10.0);
    let analytic = transmission_homogeneous(0.0, &medium, &drive, &scheme).map_err(err)?;
    let pde = cw_transmission(&drive, &medium, &scheme, 201)?;
    let (ea, ep) = ((analytic - 1.0).abs(), (pde - 1.0).abs());
    Ok((
        ea < 1e-6 && ep < 1e-4,
        format!("OD 10, Omega_c 3: |T-1| analytic {ea:.1e}, PDE {ep:.1e}"),
    ))
}

fn c4_delay_law() -> Check {
    let base = preset("fig3a");
    let omega = base.config.slowlight.unwrap().omega_c * base.config.effective.beta;
    let ods = [25.0, 50.0, 100.0];
    let delays = ods
        .par_iter()
        .map(|&od| {
            let r = scenario(Command::Slowlight, &with(&base, &[("medium.od", od)]))?;
            r.delay.ok_or_else(|| "no delay".to_string())
        })
        .collect::<Result<Vec<_>, String>>()?;
    let xs: Vec<f64> = ods.iter().map(|od| od / (omega * omega)).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, delays.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&delays).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let largest = delays.iter().cloned().fold(0.0, f64::max);
    let rel = intercept.abs() / largest;
    Ok((
        (slope - 1.0).abs() < 0.10 && rel < 0.05,
        format!(
            "delays {:.3?} vs OD/Omega^2 {:.3?}: slope {slope:.4}, intercept {intercept:.3} ({:.1} % of largest)",
            delays,
            xs,
            100.0 * rel
        ),
    ))
}

fn c5_high_od_peak() -> Check {
    let cfg = preset("fig2c").config;
    let s = cfg.spectrum.clone().unwrap();
    let medium = cfg.medium().map_err(err)?;
    let scheme = cfg.scheme().map_err(err)?;
    let drive = DriveConfig::cw(s.omega_c, s.delta_c, 0.0);
    let quad = QuadratureSpec::default();
    let t = |dp: f64, sch: &LevelScheme| -> eit_core::Result<f64> {
        Ok(transmission_inhomogeneous(dp, &medium, &drive, sch, &quad)?.transmission)
    };
    let (at, peak) = find_peak(|dp| t(dp, &scheme), -s.half_span, s.half_span).map_err(err)?;
    let without = t(at, &scheme.without_f0_channel()).map_err(err)?;
    let share = (peak.ln() - without.ln()) / peak.ln();
    Ok((
        (peak - 0.25).abs() <= 0.10 && share >= 0.25,
        format!(
            "peak T = {peak:.4} at Delta_p = {at:.3}; removing the F'=0 channel recovers {:.1} % of the on-peak optical depth",
            100.0 * share
        ),
    ))
}

fn c6_storage_decay() -> Check {
    let base = preset("fig3b");
    let gamma = base.config.medium.gamma_trd;
    let times = [0.2, 0.6, 1.0];
    let etas = times
        .par_iter()
        .map(|&us| {
            let r = scenario(Command::Storage, &with(&base, &[("storage.storage_time", micros(us))]))?;
            r.efficiency.ok_or_else(|| "no efficiency".to_string())
        })
        .collect::<Result<Vec<_>, String>>()?;
    let xs: Vec<f64> = times.iter().map(|&us| micros(us)).collect();
    let ys: Vec<f64> = etas.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let rate = -slope;
    let eta = etas[1];
    Ok((
        (rate / gamma - 1.0).abs() < 0.10 && (eta - 0.23).abs() <= 0.08,
        format!(
            "eta(0.2, 0.6, 1.0 us) = {etas:.4?}; fitted decay {rate:.5} vs gamma_trd {gamma} ({:+.1} %); eta(0.6 us) = {eta:.3}",
            100.0 * (rate / gamma - 1.0)
        ),
    ))
}

fn slp_efficiency(loaded: &LoadedConfig) -> Result<f64, String> {
    scenario(Command::Slp, loaded)?
        .efficiency
        .ok_or_else(|| "no efficiency".into())
}

fn c7a_reduces_to_slow_light() -> Check {
    let base = with(&preset("fig3c_slp"), &[("slp.omega_c_minus", 0.0)]);
    let slp = base.config.slp.unwrap();
    let sl = base
        .with_override(
            "slowlight",
            Value::try_from(eit_core::scenarios::SlowLightSpec {
                omega_c: slp.omega_c_plus,
                delta_c: slp.delta_c_plus,
                delta_p: slp.delta_p_plus,
                pulse: slp.pulse,
            })
            .map_err(err)?,
        )
        .map_err(err)?;
    let grid = scenario_grid(Command::Slp, &base).0;
    let a = run_scenario(Command::Slp, &base, &grid).map_err(err)?;
    let b = run_scenario(Command::Slowlight, &sl, &grid).map_err(err)?;
    let (ra, rb) = (a.record.unwrap(), b.record.unwrap());
    let scale = rb.forward.iter().cloned().fold(0.0, f64::max);
    let diff = ra
        .forward
        .iter()
        .zip(&rb.forward)
        .chain(ra.backward.iter().zip(&rb.backward))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale;
    let de = (a.output_energy_forward / b.output_energy_forward - 1.0).abs();
    Ok((
        diff < 1e-6 && de < 1e-6,
        format!("max trace difference {diff:.1e} of peak, output energy difference {de:.1e}"),
    ))
}

fn c7b_matched_detunings() -> Check {
    let base = preset("fig3c_slp");
    let dc = base.config.slp.unwrap().delta_c_plus;
    let eta = slp_efficiency(&base)?;
    let matched = slp_efficiency(&with(&base, &[("slp.delta_c_minus", dc), ("medium.theta", 0.0)]))?;
    Ok((
        matched < 0.10 * eta,
        format!(
            "zeta = 0, cold: eta = {matched:.2e} = {:.1} % of preset {eta:.4}",
            100.0 * matched / eta
        ),
    ))
}

fn c7c_zero_two_photon() -> Check {
    let base = preset("fig3c_slp");
    let dc = base.config.slp.unwrap().delta_c_plus;
    let eta = slp_efficiency(&base)?;
    let zero = slp_efficiency(&with(&base, &[("slp.delta_p_plus", dc)]))?;
    Ok((
        zero < 0.25 * eta,
        format!(
            "Delta_p+ = Delta_c+: eta = {zero:.2e} = {:.1} % of preset {eta:.4}",
            100.0 * zero / eta
        ),
    ))
}

fn argmax_backward(base: &LoadedConfig, grid: &[f64]) -> Result<(f64, Vec<f64>), String> {
    let etas = grid
        .par_iter()
        .map(|&w| slp_efficiency(&with(base, &[("slp.omega_c_minus", w)])))
        .collect::<Result<Vec<_>, String>>()?;
    let i = (0..etas.len()).max_by(|&a, &b| etas[a].total_cmp(&etas[b])).unwrap();
    Ok((grid[i], etas))
}

fn c7d_unbalanced_optimum() -> Check {
    let base = preset("fig3c_slp");
    let plus = base.config.slp.unwrap().omega_c_plus;
    let grid = [2.6, 3.2, 3.8, 4.4, 5.0];
    let (ideal, e0) = argmax_backward(&with(&base, &[("medium.phase_mismatch", 0.0)]), &grid)?;
    let (physical, e1) = argmax_backward(&base, &grid)?;
    let eta = e1[grid.iter().position(|&w| w == 3.8).unwrap()];
    let absolute = (eta - 0.028).abs() <= 0.015;
    Ok((
        (ideal - plus).abs() < 1e-9 && (physical - plus).abs() > 1e-9 && absolute,
        format!(
            "argmax Omega_c- over {grid:?}: {ideal} without mismatch (eta {e0:.4?}), {physical} at preset (eta {e1:.4?}); preset eta {eta:.4} vs 0.028 +- 0.015"
        ),
    ))
}

fn time_domain_presets() -> Vec<(&'static str, Command)> {
    vec![
        ("fig3a", Command::Slowlight),
        ("fig3b", Command::Storage),
        ("fig3c_slp", Command::Slp),
    ]
}

fn energies(r: &ScenarioResult) -> Vec<(String, f64)> {
    let mut v = vec![
        ("forward".to_string(), r.output_energy_forward),
        ("backward".to_string(), r.output_energy_backward),
    ];
    for w in &r.windows {
        v.push((format!("{}.forward", w.name), w.forward_energy));
        v.push((format!("{}.backward", w.name), w.backward_energy));
    }
    v
}

fn c8_truncation() -> Check {
    let rows = time_domain_presets()
        .par_iter()
        .map(|&(name, cmd)| {
            let base = preset(name);
            let a = scenario(cmd, &base)?;
            let b = scenario(cmd, &base.with_override("grid.n_max", Value::Integer(4)).map_err(err)?)?;
            // energies far below the input are noise for this purpose
            let floor = 1e-6 * a.input_energy;
            let worst = energies(&a)
                .into_iter()
                .zip(energies(&b))
                .filter(|((_, x), (_, y))| x.max(*y) > floor)
                .map(|((k, x), (_, y))| ((y / x - 1.0).abs(), k))
                .fold((0.0, String::new()), |m, c| if c.0 > m.0 { c } else { m });
            Ok((name, worst))
        })
        .collect::<Result<Vec<_>, String>>()?;
    let ok = rows.iter().all(|(_, w)| w.0 < 0.01);
    let detail = rows
        .iter()
        .map(|(n, w)| format!("{n}: {:.2e} ({})", w.0, if w.1.is_empty() { "-" } else { &w.1 }))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((ok, format!("largest relative energy change n_max 3 -> 4: {detail}")))
}

fn c9_calibration() -> Check {
    let cfg = preset("fig3b").config;
    let section = cfg.calibration.clone().unwrap();
    let scheme = cfg.scheme().map_err(err)?;
    let drive = DriveConfig::cw(section.omega_c, section.delta_c, 0.0);
    let medium = cfg.medium().map_err(err)?;
    let flat = MediumConfig {
        sigma_pc: 1e3,
        ..medium
    };
    let f = calibrate(
        &flat,
        &drive,
        &scheme,
        &default_grid(&flat, &drive, &scheme).map_err(err)?,
    )
    .map_err(err)?;
    let g = calibrate(
        &medium,
        &drive,
        &scheme,
        &default_grid(&medium, &drive, &scheme).map_err(err)?,
    )
    .map_err(err)?;
    Ok((
        (f.beta - 1.0).abs() <= 0.02 && f.gamma_inh < 1e-3 && (g.gamma_inh - 0.015).abs() <= 0.005 && g.residual < 0.01,
        format!(
            "flat beam: beta {:.4}, gamma_inh {:.1e}; fiber geometry: beta {:.4}, gamma_inh {:.4}, residual {:.2} %",
            f.beta,
            f.gamma_inh,
            g.beta,
            g.gamma_inh,
            100.0 * g.residual
        ),
    ))
}

fn c10_linearity_passivity() -> Check {
    // superposition on the full dual-drive system
    let cfg = preset("fig3c_slp").config;
    let slp = cfg.slp.unwrap();
    let medium = cfg.medium().map_err(err)?;
    let scheme = cfg.scheme().map_err(err)?;
    let a = Window {
        start: 2.0,
        end: 22.0,
        amplitude: 0.01,
        ramp: 8.0,
    };
    let b = Window {
        start: 12.0,
        end: 26.0,
        amplitude: -0.023,
        ramp: 5.0,
    };
    let drive_with = |ws: Vec<Window>| DriveConfig {
        omega_p_input: Envelope::Windows { windows: ws },
        ..slp.drive()
    };
    let grid = SimulationGrid {
        t_end: 45.0,
        ..cfg.grid.clone()
    };
    let outputs = [vec![a], vec![b], vec![a, b]]
        .par_iter()
        .map(|ws| {
            let p = Propagator::new(&drive_with(ws.clone()), &medium, &scheme, &grid).map_err(err)?;
            let mut state = p.zero_state();
            let mut out = Vec::with_capacity(grid.steps());
            for k in 0..grid.steps() {
                let f = p.step(&mut state, k as f64 * grid.dt).map_err(err)?;
                out.push((*f.omega_p_plus.last().unwrap(), f.omega_p_minus[0]));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, String>>()?;
    let scale = outputs[2]
        .iter()
        .map(|(f, b)| f.norm().max(b.norm()))
        .fold(0.0, f64::max);
    let lin = (0..outputs[2].len())
        .map(|k| {
            let (f, b) = outputs[2][k];
            (f - outputs[0][k].0 - outputs[1][k].0)
                .norm()
                .max((b - outputs[0][k].1 - outputs[1][k].1).norm())
        })
        .fold(0.0, f64::max)
        / scale;

    let mut passive = Vec::new();
    for (name, _) in PRESETS {
        let loaded = preset(name);
        let ratio = if let Some((_, cmd)) = time_domain_presets().into_iter().find(|p| p.0 == *name) {
            let r = scenario(cmd, &loaded)?;
            (r.output_energy_forward + r.output_energy_backward) / r.input_energy
        } else {
            let c = &loaded.config;
            let s = c.spectrum.clone().unwrap();
            let m = c.medium().map_err(err)?;
            let d = DriveConfig::cw(s.omega_c, s.delta_c, 0.0);
            let sch = c.scheme().map_err(err)?;
            let mut worst: f64 = 0.0;
            for i in 0..s.points {
                let dp = s.center - s.half_span + 2.0 * s.half_span * i as f64 / (s.points - 1) as f64;
                worst = worst.max(
                    transmission_inhomogeneous(dp, &m, &d, &sch, &s.quadrature)
                        .map_err(err)?
                        .transmission,
                );
            }
            worst
        };
        passive.push((*name, ratio));
    }
    let ok = lin < 1e-10 && passive.iter().all(|p| p.1 <= 1.0);
    let p = passive
        .iter()
        .map(|(n, r)| format!("{n} {r:.3}"))
        .collect::<Vec<_>>()
        .join(", ");
    Ok((
        ok,
        format!("superposition error {lin:.1e}; output/input energy (max T for spectra): {p}"),
    ))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: "1",
            name: "spectral oracle equivalence",
            run: c1_spectral_oracle,
        },
        Criterion {
            id: "2",
            name: "Beer-Lambert limit",
            run: c2_beer_lambert,
        },
        Criterion {
            id: "3",
            name: "ideal EIT transparency",
            run: c3_ideal_eit,
        },
        Criterion {
            id: "4",
            name: "group-delay law",
            run: c4_delay_law,
        },
        Criterion {
            id: "5",
            name: "high-OD EIT peak",
            run: c5_high_od_peak,
        },
        Criterion {
            id: "6",
            name: "storage decay",
            run: c6_storage_decay,
        },
        Criterion {
            id: "7a",
            name: "SLP without backward control",
            run: c7a_reduces_to_slow_light,
        },
        Criterion {
            id: "7b",
            name: "SLP matched detunings",
            run: c7b_matched_detunings,
        },
        Criterion {
            id: "7c",
            name: "SLP zero two-photon detuning",
            run: c7c_zero_two_photon,
        },
        Criterion {
            id: "7d",
            name: "SLP backward-control optimum",
            run: c7d_unbalanced_optimum,
        },
        Criterion {
            id: "8",
            name: "truncation convergence",
            run: c8_truncation,
        },
        Criterion {
            id: "9",
            name: "calibration",
            run: c9_calibration,
        },
        Criterion {
            id: "10",
            name: "linearity and passivity",
            run: c10_linearity_passivity,
        },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected: Vec<&Criterion> = criteria
        .iter()
        .filter(|c| filter.is_empty() || filter.iter().any(|f| f == c.id))
        .collect();
    let results: Vec<(bool, String)> = selected
        .par_iter()
        .map(|c| {
            let start = Instant::now();
            let (pass, detail) = match (c.run)() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            let line = format!(
                "{} {:>3} {}: {} [{:.1} s]",
                if pass { "PASS" } else { "FAIL" },
                c.id,
                c.name,
                detail,
                start.elapsed().as_secs_f64()
            );
            (pass, line)
        })
        .collect();
    for (_, line) in &results {
        println!("{line}");
    }
    let failed = results.iter().filter(|r| !r.0).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
