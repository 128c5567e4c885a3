// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Step list of the Bell sequence, shared by the numeric and analytic solvers.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix4;

use super::config::GateConfig;
use super::hamiltonian::GatePulse;
use super::pulse::PulseShape;
use crate::qdyn::C64;
use crate::spinecho::{rotation, two_ion_pulse, SpinEchoConfig, BELL_PULSE_PHASES};

/// Treatment of the π/2, π, π/2 microwave pulses.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum EchoModel {
    /// Instantaneous ideal rotations with the default phases.
    #[default]
    Ideal,
    /// Finite detuned pulses and static ±δf/2 precession from the spin-echo model.
    Microwave(SpinEchoConfig),
}

impl EchoModel {
    /// Static qubit-frequency difference δf, Hz.
    pub fn delta_f(&self) -> f64 {
        match self {
            Self::Ideal => 0.0,
            Self::Microwave(c) => c.delta_f,
        }
    }

    pub fn swapped(&self) -> Self {
        match self {
            Self::Ideal => Self::Ideal,
            Self::Microwave(c) => Self::Microwave(c.swapped()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Step {
    /// Spin-only unitary of the given duration.
    Spin {
        unitary: Matrix4<C64>,
        duration: f64,
    },
    Gate(GatePulse),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequencePlan {
    pub steps: Vec<Step>,
    /// Static qubit-frequency difference active between pulses, Hz.
    pub delta_f: f64,
}

fn spin_pulse(echo: &EchoModel, angle: f64, k: usize) -> Step {
    match echo {
        EchoModel::Ideal => {
            let r = rotation(angle, BELL_PULSE_PHASES[k]);
            Step::Spin { unitary: r.kronecker(&r), duration: 0.0 }
        }
        EchoModel::Microwave(c) => {
            Step::Spin { unitary: two_ion_pulse(c, angle, c.phases[k]), duration: c.pulse_duration(angle) }
        }
    }
}

/// π/2 — gate pulse — π — gate pulse — π/2 with total Raman duration `t_r`.
///
/// The second gate pulse continues the first on the gate clock with an extra force
/// phase πK, which closes the phase-space trajectory for any K.
pub fn bell_plan(cfg: &GateConfig, t_r: f64, echo: &EchoModel) -> SequencePlan {
    let shape = PulseShape::new(cfg.shape, cfg.ramp_time, t_r / 2.0);
    let mut steps = Vec::with_capacity(5);
    let mut t = 0.0;
    let mut clock_offset = 0.0;
    let push_spin = |steps: &mut Vec<Step>, t: &mut f64, off: &mut f64, angle: f64, k: usize| {
        let s = spin_pulse(echo, angle, k);
        if let Step::Spin { duration, .. } = &s {
            *t += duration;
            *off += duration;
        }
        steps.push(s);
    };
    push_spin(&mut steps, &mut t, &mut clock_offset, FRAC_PI_2, 0);
    steps.push(Step::Gate(GatePulse { start: t, shape, phase: 0.0, clock_offset }));
    t += shape.duration;
    push_spin(&mut steps, &mut t, &mut clock_offset, PI, 1);
    steps.push(Step::Gate(GatePulse { start: t, shape, phase: PI * cfg.loops as f64, clock_offset }));
    t += shape.duration;
    push_spin(&mut steps, &mut t, &mut clock_offset, FRAC_PI_2, 2);
    SequencePlan { steps, delta_f: echo.delta_f() }
}

impl SequencePlan {
    pub fn gate_pulses(&self) -> impl Iterator<Item = &GatePulse> {
        self.steps.iter().filter_map(|s| match s {
            Step::Gate(p) => Some(p),
            _ => None,
        })
    }
}
