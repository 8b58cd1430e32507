//! Splitting steps: exact linear flow plus exact noise, composed with a
//! velocity kick v <- v - h pi_N F(pi_N u).

use std::sync::Arc;

use field_core::{pointwise_map, pointwise_map_pair, FieldError, Lattice, PhaseState, RngStream};

use crate::force::HermiteForce;
use crate::kernels::ModeKernels;
use crate::{DynamicsError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Lie,
    Strang,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    ExactCovariance,
    Euler,
    /// No stochastic forcing (deterministic damped flow).
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepScheme {
    pub dt: f64,
    pub splitting: Splitting,
    pub noise_mode: NoiseMode,
}

impl StepScheme {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DynamicsError::InvalidScheme(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { dt, splitting: Splitting::Strang, noise_mode: NoiseMode::ExactCovariance })
    }

    /// dt = 0.1 / [[N]], a tenth of the period scale of the fastest mode.
    pub fn default_for(lat: &Lattice) -> Self {
        let w = field_core::bracket_symbol([lat.trunc_n() as i32, 0, 0], lat.alpha());
        Self { dt: 0.1 / w, splitting: Splitting::Strang, noise_mode: NoiseMode::ExactCovariance }
    }

    pub fn with_splitting(self, splitting: Splitting) -> Self {
        Self { splitting, ..self }
    }

    pub fn with_noise(self, noise_mode: NoiseMode) -> Self {
        Self { noise_mode, ..self }
    }
}

/// A fixed equation (lattice, force, scheme) ready to be stepped.
#[derive(Debug, Clone)]
pub struct Integrator {
    kernels: ModeKernels,
    force: Option<HermiteForce>,
    scheme: StepScheme,
}

impl Integrator {
    pub fn new(lat: &Arc<Lattice>, scheme: StepScheme, force: Option<HermiteForce>) -> Result<Self> {
        if !(scheme.dt > 0.0 && scheme.dt.is_finite()) {
            return Err(DynamicsError::InvalidScheme(format!("dt must be positive, got {}", scheme.dt)));
        }
        let force = force.filter(|f| !f.is_zero());
        if let Some(f) = &force {
            let need = (f.degree() + 1) * lat.trunc_n() + 1;
            if lat.grid_m() < need {
                return Err(FieldError::GridTooSmall { need, have: lat.grid_m() }.into());
            }
        }
        Ok(Self { kernels: ModeKernels::new(lat, scheme.dt), force, scheme })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        self.kernels.lattice()
    }

    pub fn scheme(&self) -> StepScheme {
        self.scheme
    }

    pub fn kernels(&self) -> &ModeKernels {
        &self.kernels
    }

    pub fn force(&self) -> Option<&HermiteForce> {
        self.force.as_ref()
    }

    pub(crate) fn kick(&self, s: &mut PhaseState, h: f64) -> Result<()> {
        if let Some(f) = &self.force {
            let lat = Arc::clone(self.lattice());
            let g = pointwise_map(&s.pos, f.degree(), &lat, |x| f.eval(x))?;
            s.vel.axpy(-h, &g)?;
        }
        Ok(())
    }

    pub(crate) fn kick_pair(&self, a: &mut PhaseState, b: &mut PhaseState, h: f64) -> Result<()> {
        if let Some(f) = &self.force {
            let lat = Arc::clone(self.lattice());
            let (ga, gb) = pointwise_map_pair(&a.pos, &b.pos, f.degree(), &lat, |x| f.eval(x))?;
            a.vel.axpy(-h, &ga)?;
            b.vel.axpy(-h, &gb)?;
        }
        Ok(())
    }

    pub(crate) fn linear(&self, s: &mut PhaseState, rng: &mut RngStream) {
        self.kernels.propagate(s);
        match self.scheme.noise_mode {
            NoiseMode::ExactCovariance => self.kernels.add_noise(s, rng),
            NoiseMode::Euler => self.kernels.add_euler_noise(s, rng),
            NoiseMode::Off => {}
        }
    }

    pub(crate) fn check(&self, s: &PhaseState, time: f64) -> Result<()> {
        let bad = s.pos.coeffs().iter().chain(s.vel.coeffs()).any(|z| !(z.re.is_finite() && z.im.is_finite()));
        if bad {
            Err(DynamicsError::NonFinite { time })
        } else {
            Ok(())
        }
    }

    /// One step using `rng` for the noise.
    pub fn step_with(&self, s: &mut PhaseState, rng: &mut RngStream) -> Result<()> {
        let h = self.scheme.dt;
        match self.scheme.splitting {
            Splitting::Lie => {
                self.linear(s, rng);
                self.kick(s, h)?;
            }
            Splitting::Strang => {
                self.kick(s, 0.5 * h)?;
                self.linear(s, rng);
                self.kick(s, 0.5 * h)?;
            }
        }
        Ok(())
    }

    /// One step with a prescribed noise increment (position, velocity) added
    /// after the linear flow. Used to build coarse paths from fine noise.
    pub fn step_with_increment(&self, s: &mut PhaseState, xi: &PhaseState) -> Result<()> {
        let h = self.scheme.dt;
        let lin = |s: &mut PhaseState| -> Result<()> {
            self.kernels.propagate(s);
            s.pos.axpy(1.0, &xi.pos)?;
            s.vel.axpy(1.0, &xi.vel)?;
            Ok(())
        };
        match self.scheme.splitting {
            Splitting::Lie => {
                lin(s)?;
                self.kick(s, h)?;
            }
            Splitting::Strang => {
                self.kick(s, 0.5 * h)?;
                lin(s)?;
                self.kick(s, 0.5 * h)?;
            }
        }
        Ok(())
    }

    /// Step number `step` of the trajectory driven by `stream`: the noise is
    /// drawn from `stream.fork(step)`, so any step can be replayed alone.
    pub fn step(&self, s: &mut PhaseState, stream: &RngStream, step: u64) -> Result<()> {
        let mut rng = stream.fork(step);
        self.step_with(s, &mut rng)?;
        self.check(s, (step + 1) as f64 * self.scheme.dt)
    }

    /// Two independent trajectories advanced together (one transform per kick).
    pub fn step_pair(
        &self,
        a: &mut PhaseState,
        sa: &RngStream,
        b: &mut PhaseState,
        sb: &RngStream,
        step: u64,
    ) -> Result<()> {
        let h = self.scheme.dt;
        let (mut ra, mut rb) = (sa.fork(step), sb.fork(step));
        match self.scheme.splitting {
            Splitting::Lie => {
                self.linear(a, &mut ra);
                self.linear(b, &mut rb);
                self.kick_pair(a, b, h)?;
            }
            Splitting::Strang => {
                self.kick_pair(a, b, 0.5 * h)?;
                self.linear(a, &mut ra);
                self.linear(b, &mut rb);
                self.kick_pair(a, b, 0.5 * h)?;
            }
        }
        let t = (step + 1) as f64 * h;
        self.check(a, t)?;
        self.check(b, t)
    }

    /// Advances `steps` steps starting at step index `start`, calling
    /// `observe(step_index_after, state)` after each.
    pub fn run(
        &self,
        s: &mut PhaseState,
        stream: &RngStream,
        start: u64,
        steps: u64,
        mut observe: impl FnMut(u64, &PhaseState),
    ) -> Result<()> {
        for k in start..start + steps {
            self.step(s, stream, k)?;
            observe(k + 1, s);
        }
        Ok(())
    }
}
