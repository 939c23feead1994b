//! Time-dependent probe and control envelopes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Raised-cosine switching window: zero before `start`, ramps up over `ramp`,
/// holds `amplitude`, and ramps down to zero so that it vanishes at `end`.
/// Infinite `start`/`end` give a field that is on from the beginning or stays on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub start: f64,
    pub end: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub ramp: f64,
}

impl Window {
    pub fn always(amplitude: f64) -> Self {
        Window {
            start: f64::NEG_INFINITY,
            end: f64::INFINITY,
            amplitude,
            ramp: 0.0,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.amplitude * ramp_up(t - self.start, self.ramp) * ramp_up(self.end - t, self.ramp)
    }
}

fn ramp_up(s: f64, ramp: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if ramp <= 0.0 || s >= ramp {
        1.0
    } else {
        0.5 * (1.0 - (std::f64::consts::PI * s / ramp).cos())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Envelope {
    #[default]
    Zero,
    Constant {
        amplitude: f64,
    },
    /// Gaussian with intensity full width at half maximum `fwhm`.
    Gaussian {
        peak: f64,
        center: f64,
        fwhm: f64,
    },
    /// Sum of switching windows.
    Windows {
        windows: Vec<Window>,
    },
}

impl Envelope {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Envelope::Zero => 0.0,
            Envelope::Constant { amplitude } => *amplitude,
            Envelope::Gaussian { peak, center, fwhm } => {
                let x = (t - center) / fwhm;
                peak * (-2.0 * std::f64::consts::LN_2 * x * x).exp()
            }
            Envelope::Windows { windows } => windows.iter().map(|w| w.value(t)).sum(),
        }
    }

    pub fn complex(&self, t: f64) -> Complex64 {
        Complex64::new(self.value(t), 0.0)
    }

    /// Largest |value| the envelope can take.
    pub fn peak(&self) -> f64 {
        match self {
            Envelope::Zero => 0.0,
            Envelope::Constant { amplitude } => amplitude.abs(),
            Envelope::Gaussian { peak, .. } => peak.abs(),
            Envelope::Windows { windows } => windows.iter().map(|w| w.amplitude.abs()).fold(0.0, f64::max),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.peak() == 0.0
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: f64) -> Envelope {
        match self {
            Envelope::Zero => Envelope::Zero,
            Envelope::Constant { amplitude } => Envelope::Constant {
                amplitude: amplitude * factor,
            },
            Envelope::Gaussian { peak, center, fwhm } => Envelope::Gaussian {
                peak: peak * factor,
                center: *center,
                fwhm: *fwhm,
            },
            Envelope::Windows { windows } => Envelope::Windows {
                windows: windows
                    .iter()
                    .map(|w| Window {
                        amplitude: w.amplitude * factor,
                        ..*w
                    })
                    .collect(),
            },
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        match self {
            Envelope::Gaussian { fwhm, .. } if !(*fwhm > 0.0) => {
                Err(Error::invalid(name, "gaussian fwhm must be positive"))
            }
            Envelope::Windows { windows } => {
                for w in windows {
                    if !(w.end > w.start) || !(w.ramp >= 0.0) {
                        return Err(Error::invalid(name, "window needs end > start and ramp >= 0"));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Gaussian probe pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbePulseSpec {
    pub peak: f64,
    pub fwhm: f64,
    pub center: f64,
}

impl ProbePulseSpec {
    pub fn envelope(&self) -> Envelope {
        Envelope::Gaussian {
            peak: self.peak,
            center: self.center,
            fwhm: self.fwhm,
        }
    }

    /// Spectral FWHM of the intensity (angular frequency units).
    pub fn bandwidth(&self) -> f64 {
        4.0 * std::f64::consts::LN_2 / self.fwhm
    }

    pub fn energy(&self) -> f64 {
        // integral of |peak exp(-2 ln2 x^2 / w^2)|^2
        self.peak * self.peak * self.fwhm * (std::f64::consts::PI / (4.0 * std::f64::consts::LN_2)).sqrt()
    }
}

/// Probe and control fields driving the medium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    pub omega_c_plus: Envelope,
    pub omega_c_minus: Envelope,
    pub omega_p_input: Envelope,
    pub delta_c_plus: f64,
    pub delta_c_minus: f64,
    pub delta_p_plus: f64,
}

impl DriveConfig {
    /// Single constant forward control, no probe envelope.
    pub fn cw(omega_c: f64, delta_c: f64, delta_p: f64) -> Self {
        DriveConfig {
            omega_c_plus: if omega_c == 0.0 {
                Envelope::Zero
            } else {
                Envelope::Constant { amplitude: omega_c }
            },
            omega_c_minus: Envelope::Zero,
            omega_p_input: Envelope::Zero,
            delta_c_plus: delta_c,
            delta_c_minus: delta_c,
            delta_p_plus: delta_p,
        }
    }

    /// Relative detuning of the counterpropagating controls.
    pub fn zeta(&self) -> f64 {
        self.delta_c_minus - self.delta_c_plus
    }

    pub fn delta_two_photon(&self) -> f64 {
        self.delta_p_plus - self.delta_c_plus
    }

    /// Backward probe detuning fixed by energy conservation.
    pub fn delta_p_minus(&self) -> f64 {
        self.delta_p_plus + self.zeta()
    }

    /// Steady forward control amplitude used by the spectral routines.
    pub fn cw_control(&self) -> f64 {
        self.omega_c_plus.peak()
    }

    /// Peak probe over peak control; the linear model assumes this is small.
    pub fn weak_probe_ratio(&self) -> f64 {
        let control = self.omega_c_plus.peak().max(self.omega_c_minus.peak());
        let probe = self.omega_p_input.peak();
        if probe == 0.0 {
            0.0
        } else if control == 0.0 {
            f64::INFINITY
        } else {
            probe / control
        }
    }

    pub fn with_control_scale(&self, beta: f64) -> DriveConfig {
        DriveConfig {
            omega_c_plus: self.omega_c_plus.scaled(beta),
            omega_c_minus: self.omega_c_minus.scaled(beta),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.omega_c_plus.validate("drive.omega_c_plus")?;
        self.omega_c_minus.validate("drive.omega_c_minus")?;
        self.omega_p_input.validate("drive.omega_p_input")?;
        for (name, v) in [
            ("drive.delta_c_plus", self.delta_c_plus),
            ("drive.delta_c_minus", self.delta_c_minus),
            ("drive.delta_p_plus", self.delta_p_plus),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(())
    }
}
