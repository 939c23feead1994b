//! Slow light, storage and stationary-light protocols and their metrics.

use serde::{Deserialize, Serialize};

use crate::atomic::LevelScheme;
use crate::drive::{DriveConfig, Envelope, ProbePulseSpec, Window};
use crate::error::Result;
use crate::medium::MediumConfig;
use crate::solver::{propagate, SimulationGrid, TimeSeriesRecord};

/// EIT transparency width Omega_eff^2 / (Gamma sqrt(OD)).
pub fn eit_window_width(od: f64, omega_c_eff: f64, scheme: &LevelScheme) -> f64 {
    omega_c_eff * omega_c_eff / (scheme.gamma * od.sqrt())
}

/// Two-photon detuning -Delta_omega_21 v_g / c that compensates the
/// backward-pathway phase mismatch at group velocity `vg_over_c`.
pub fn phase_matching_detuning(vg_over_c: f64, scheme: &LevelScheme) -> f64 {
    -scheme.delta_omega_21 * vg_over_c
}

/// Ideal Lambda-system group delay OD Gamma / Omega_c^2.
pub fn group_delay_estimate(od: f64, omega_c: f64, scheme: &LevelScheme) -> f64 {
    od * scheme.gamma / (omega_c * omega_c)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyWindow {
    pub name: String,
    pub start: f64,
    pub end: f64,
    pub forward_energy: f64,
    pub backward_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub input_energy: f64,
    pub output_energy_forward: f64,
    pub output_energy_backward: f64,
    /// Centroid delay against the vacuum reference.
    pub delay: Option<f64>,
    /// Forward output over input energy.
    pub transmission: f64,
    /// Retrieved forward energy over input energy.
    pub efficiency: Option<f64>,
    pub windows: Vec<EnergyWindow>,
    /// Retrieval clearly exceeds what a slow-light pulse leaves behind.
    pub slp_signature: Option<bool>,
    pub truncation_ratio: Option<f64>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub record: Option<TimeSeriesRecord>,
}

impl ScenarioResult {
    fn from_record(record: TimeSeriesRecord, bounds: &[(&str, f64)], mut warnings: Vec<String>) -> Self {
        let mut windows = Vec::with_capacity(bounds.len());
        for (i, &(name, start)) in bounds.iter().enumerate() {
            let end = bounds.get(i + 1).map_or(f64::INFINITY, |b| b.1);
            windows.push(EnergyWindow {
                name: name.to_string(),
                start,
                end,
                forward_energy: record.energy_between(&record.forward, start, end),
                backward_energy: record.energy_between(&record.backward, start, end),
            });
        }
        let input_energy = record.input_energy();
        let forward = record.forward_energy();
        warnings.extend(record.warnings.iter().cloned());
        ScenarioResult {
            input_energy,
            output_energy_forward: forward,
            output_energy_backward: record.backward_energy(),
            delay: None,
            transmission: if input_energy > 0.0 {
                forward / input_energy
            } else {
                0.0
            },
            efficiency: None,
            windows,
            slp_signature: None,
            truncation_ratio: record.truncation_ratio,
            warnings,
            record: Some(record),
        }
    }

    pub fn window(&self, name: &str) -> Option<&EnergyWindow> {
        self.windows.iter().find(|w| w.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlowLightSpec {
    pub omega_c: f64,
    #[serde(default)]
    pub delta_c: f64,
    #[serde(default)]
    pub delta_p: f64,
    pub pulse: ProbePulseSpec,
}

impl SlowLightSpec {
    pub fn drive(&self) -> DriveConfig {
        DriveConfig {
            omega_p_input: self.pulse.envelope(),
            ..DriveConfig::cw(self.omega_c, self.delta_c, self.delta_p)
        }
    }
}

fn bandwidth_warning(pulse: &ProbePulseSpec, od: f64, omega_eff: f64, scheme: &LevelScheme) -> Option<String> {
    let width = eit_window_width(od, omega_eff, scheme);
    (od > 0.0 && pulse.bandwidth() > 0.5 * width).then(|| {
        format!(
            "pulse bandwidth {:.3} exceeds half the EIT window {:.3}",
            pulse.bandwidth(),
            width
        )
    })
}

/// Centroid of the input pulse seen through an empty medium.
fn vacuum_centroid(
    drive: &DriveConfig,
    medium: &MediumConfig,
    scheme: &LevelScheme,
    grid: &SimulationGrid,
) -> Result<f64> {
    let vacuum = MediumConfig { od: 0.0, ..*medium };
    let r = propagate(drive, &vacuum, scheme, grid)?;
    Ok(r.centroid(&r.forward))
}

/// Gaussian pulse through a medium under a constant forward control.
pub fn run_slow_light(
    spec: &SlowLightSpec,
    medium: &MediumConfig,
    scheme: &LevelScheme,
    grid: &SimulationGrid,
) -> Result<ScenarioResult> {
    let drive = spec.drive();
    let record = propagate(&drive, medium, scheme, grid)?;
    let warnings = bandwidth_warning(&spec.pulse, medium.od, spec.omega_c, scheme)
        .into_iter()
        .collect();
    let mut result = ScenarioResult::from_record(record, &[("output", 0.0)], warnings);
    let rec = result.record.as_ref().expect("record");
    let delay = rec.centroid(&rec.forward) - vacuum_centroid(&drive, medium, scheme, grid)?;
    result.delay = Some(if delay.is_nan() { 0.0 } else { delay });
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StorageSpec {
    pub omega_c: f64,
    #[serde(default)]
    pub delta_c: f64,
    #[serde(default)]
    pub delta_p: f64,
    pub pulse: ProbePulseSpec,
    /// Time at which the control has fully ramped down.
    pub switch_off: f64,
    /// Interval with the control fully off.
    pub storage_time: f64,
    #[serde(default)]
    pub ramp: f64,
}

impl StorageSpec {
    pub fn retrieval_start(&self) -> f64 {
        self.switch_off + self.storage_time
    }

    pub fn drive(&self) -> DriveConfig {
        let control = Envelope::Windows {
            windows: vec![
                Window {
                    start: f64::NEG_INFINITY,
                    end: self.switch_off,
                    amplitude: self.omega_c,
                    ramp: self.ramp,
                },
                Window {
                    start: self.retrieval_start(),
                    end: f64::INFINITY,
                    amplitude: self.omega_c,
                    ramp: self.ramp,
                },
            ],
        };
        DriveConfig {
            omega_c_plus: control,
            omega_p_input: self.pulse.envelope(),
            ..DriveConfig::cw(0.0, self.delta_c, self.delta_p)
        }
    }
}

/// Stores the pulse by switching the control off and retrieves it by
/// switching it back on. Windows: leakage (before switch-off), storage,
/// retrieval (from re-activation to the end of the run).
pub fn run_storage(
    spec: &StorageSpec,
    medium: &MediumConfig,
    scheme: &LevelScheme,
    grid: &SimulationGrid,
) -> Result<ScenarioResult> {
    let drive = spec.drive();
    let record = propagate(&drive, medium, scheme, grid)?;
    let mut warnings = Vec::new();
    let tau = group_delay_estimate(medium.od, spec.omega_c, scheme);
    if tau < spec.pulse.fwhm {
        warnings.push(format!(
            "group delay {tau:.3} is shorter than the pulse width {:.3}; the pulse does not fit inside the medium",
            spec.pulse.fwhm
        ));
    }
    let mut result = ScenarioResult::from_record(
        record,
        &[
            ("leakage", 0.0),
            ("storage", spec.switch_off),
            ("retrieval", spec.retrieval_start()),
        ],
        warnings,
    );
    let retrieved = result.window("retrieval").map_or(0.0, |w| w.forward_energy);
    result.efficiency = Some(retrieved / result.input_energy);
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlpSpec {
    pub omega_c_plus: f64,
    pub omega_c_minus: f64,
    pub delta_c_plus: f64,
    pub delta_c_minus: f64,
    pub delta_p_plus: f64,
    pub pulse: ProbePulseSpec,
    /// Backward control fully on from here ...
    pub backward_on: f64,
    /// ... until it has ramped down at this time.
    pub backward_off: f64,
    #[serde(default)]
    pub ramp: f64,
}

impl SlpSpec {
    pub fn drive(&self) -> DriveConfig {
        let backward = if self.omega_c_minus == 0.0 {
            Envelope::Zero
        } else {
            Envelope::Windows {
                windows: vec![Window {
                    start: self.backward_on - self.ramp,
                    end: self.backward_off,
                    amplitude: self.omega_c_minus,
                    ramp: self.ramp,
                }],
            }
        };
        DriveConfig {
            omega_c_plus: Envelope::Constant {
                amplitude: self.omega_c_plus,
            },
            omega_c_minus: backward,
            omega_p_input: self.pulse.envelope(),
            delta_c_plus: self.delta_c_plus,
            delta_c_minus: self.delta_c_minus,
            delta_p_plus: self.delta_p_plus,
        }
    }

    /// Same protocol without the backward control.
    pub fn slow_light_reference(&self) -> SlpSpec {
        SlpSpec {
            omega_c_minus: 0.0,
            ..*self
        }
    }

    /// Window starts: before, during and after the dual drive.
    fn bounds(&self) -> [(&'static str, f64); 3] {
        [
            ("pre", 0.0),
            ("leakage", self.backward_on - self.ramp),
            ("retrieval", self.backward_off),
        ]
    }
}

/// Retrieval must exceed the slow-light remainder in the same window by this
/// factor to count as a stationary-light signature.
pub const SLP_SIGNATURE_FACTOR: f64 = 2.0;

/// Stationary light pulse: a backward control is switched on while the
/// pulse is inside the medium and switched off again for retrieval.
pub fn run_slp(
    spec: &SlpSpec,
    medium: &MediumConfig,
    scheme: &LevelScheme,
    grid: &SimulationGrid,
) -> Result<ScenarioResult> {
    let drive = spec.drive();
    let record = propagate(&drive, medium, scheme, grid)?;
    let mut warnings = Vec::new();
    let omega_eff = spec.omega_c_plus.hypot(spec.omega_c_minus);
    let width = eit_window_width(medium.od, omega_eff, scheme);
    if spec.omega_c_minus != 0.0 && drive.zeta().abs() <= width {
        warnings.push(format!(
            "|zeta| = {:.3} is within the EIT width {:.3}; ground-state gratings will suppress the stationary pulse",
            drive.zeta().abs(),
            width
        ));
    }
    let mut result = ScenarioResult::from_record(record, &spec.bounds(), warnings);
    let retrieved = result.window("retrieval").map_or(0.0, |w| w.forward_energy);
    result.efficiency = Some(retrieved / result.input_energy);
    if spec.omega_c_minus != 0.0 {
        let reference = propagate(&spec.slow_light_reference().drive(), medium, scheme, grid)?;
        let leftover = reference.energy_between(&reference.forward, spec.backward_off, f64::INFINITY);
        result.slp_signature = Some(retrieved > SLP_SIGNATURE_FACTOR * leftover);
    }
    let rec = result.record.as_ref().expect("record");
    let delay = rec.centroid(&rec.forward) - vacuum_centroid(&drive, medium, scheme, grid)?;
    result.delay = (!delay.is_nan()).then_some(delay);
    Ok(result)
}
