//! Particle swarm optimization over task-to-processor assignments.
//!
//! Each particle carries a real position in `[1, m]^n` coordinates (processor
//! numbers are one-based here, as in the classic encoding). Positions are
//! decoded into assignments by rounding half away from zero and clamping to
//! `[1, m]`; the unrounded position is kept so velocities retain their meaning.
//!
//! The loop is synchronous: every iteration evaluates all particles, updates
//! personal bests, then the global best, and only then moves the swarm.
//! Heuristic solutions can be injected as initial particles, which makes the
//! final answer never worse than the best injected solution.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::{self, Assignment, CostSpec, LoadVector};
use crate::error::{Error, Result};
use crate::heuristics;
use crate::model::{DvfsMode, UtilizationMatrix};
use crate::rng;

/// Inertia weight schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "schedule")]
pub enum Inertia {
    Fixed {
        w: f64,
    },
    /// Linear ramp from `start` at the first iteration to `end` at the last.
    LinearDecay {
        start: f64,
        end: f64,
    },
    /// Sawtooth: decays linearly from `start` towards 0 and jumps back to
    /// `start` every `cycle_len` iterations.
    ReExcited {
        start: f64,
        cycle_len: usize,
    },
}

impl Inertia {
    /// Weight at iteration `t` of `total` (`0 <= t < total`).
    pub fn at(&self, t: usize, total: usize) -> f64 {
        match *self {
            Inertia::Fixed { w } => w,
            Inertia::LinearDecay { start, end } => {
                if total <= 1 {
                    start
                } else {
                    start + (end - start) * t as f64 / (total - 1) as f64
                }
            }
            Inertia::ReExcited { start, cycle_len } => {
                let phase = (t % cycle_len) as f64 / cycle_len as f64;
                start * (1.0 - phase)
            }
        }
    }
}

pub fn inertia_at(schedule: &Inertia, t: usize, total: usize) -> f64 {
    schedule.at(t, total)
}

/// Default re-excitation period: four cycles over the iteration budget.
pub fn default_cycle_len(iterations: usize) -> usize {
    iterations.div_ceil(4).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    pub swarm_size: usize,
    pub iterations: usize,
    pub c1: f64,
    pub c2: f64,
    pub inertia: Inertia,
    /// Bound on each velocity component. `None` uses the processor count.
    pub v_max: Option<f64>,
    /// Solutions placed at the front of the initial population.
    pub seed_particles: Vec<Assignment>,
    pub rng_seed: u64,
    /// Draw fresh `r1`, `r2` for every vector component. When false, one pair
    /// per particle per iteration is shared by all components.
    pub per_component_random: bool,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        Self {
            swarm_size: 100,
            iterations: 100,
            c1: 2.0,
            c2: 2.0,
            inertia: Inertia::LinearDecay {
                start: 1.0,
                end: 0.0,
            },
            v_max: None,
            seed_particles: Vec::new(),
            rng_seed: 0,
            per_component_random: true,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self, matrix: &UtilizationMatrix) -> Result<()> {
        if self.swarm_size == 0 {
            return Err(Error::Config("swarm size must be at least 1".into()));
        }
        if self.iterations == 0 {
            return Err(Error::Config("iteration count must be at least 1".into()));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(Error::Config(format!(
                "acceleration constants must be positive (c1={}, c2={})",
                self.c1, self.c2
            )));
        }
        if let Some(v) = self.v_max {
            if !(v > 0.0) {
                return Err(Error::Config(format!("v_max must be positive, got {v}")));
            }
        }
        if let Inertia::ReExcited { cycle_len: 0, .. } = self.inertia {
            return Err(Error::Config(
                "re-excitation cycle length must be at least 1".into(),
            ));
        }
        if self.seed_particles.len() > self.swarm_size {
            return Err(Error::Config(format!(
                "{} seed particles do not fit in a swarm of {}",
                self.seed_particles.len(),
                self.swarm_size
            )));
        }
        for seed in &self.seed_particles {
            seed.validate_for(matrix)?;
        }
        Ok(())
    }

    fn v_max_for(&self, m: usize) -> f64 {
        self.v_max.unwrap_or(m as f64)
    }
}

/// Named swarm presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PsoVariant {
    /// Fixed inertia 1.
    FixedInertia,
    /// Inertia decaying linearly from 1 to 0.
    VariedInertia,
    /// Sawtooth inertia restarting at 1.
    ReExcitedInertia,
    /// Varied inertia with the Min-min solution in the initial population.
    MinMinSeeded,
    /// Varied inertia seeded with both the Min-min and Max-min solutions.
    MinMaxSeeded,
}

impl PsoVariant {
    pub const ALL: [PsoVariant; 5] = [
        PsoVariant::FixedInertia,
        PsoVariant::VariedInertia,
        PsoVariant::ReExcitedInertia,
        PsoVariant::MinMinSeeded,
        PsoVariant::MinMaxSeeded,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            PsoVariant::FixedInertia => "pso-fi",
            PsoVariant::VariedInertia => "pso-vi",
            PsoVariant::ReExcitedInertia => "pso-re",
            PsoVariant::MinMinSeeded => "pso-m",
            PsoVariant::MinMaxSeeded => "pso-mm",
        }
    }

    pub fn inertia(self, iterations: usize) -> Inertia {
        match self {
            PsoVariant::FixedInertia => Inertia::Fixed { w: 1.0 },
            PsoVariant::ReExcitedInertia => Inertia::ReExcited {
                start: 1.0,
                cycle_len: default_cycle_len(iterations),
            },
            PsoVariant::VariedInertia | PsoVariant::MinMinSeeded | PsoVariant::MinMaxSeeded => {
                Inertia::LinearDecay {
                    start: 1.0,
                    end: 0.0,
                }
            }
        }
    }

    pub fn seeds(self, matrix: &UtilizationMatrix) -> Vec<Assignment> {
        match self {
            PsoVariant::MinMinSeeded => vec![heuristics::min_min(matrix).assignment],
            PsoVariant::MinMaxSeeded => vec![
                heuristics::min_min(matrix).assignment,
                heuristics::max_min(matrix).assignment,
            ],
            _ => Vec::new(),
        }
    }

    /// Full configuration for this preset on `matrix`.
    pub fn config(
        self,
        matrix: &UtilizationMatrix,
        swarm_size: usize,
        iterations: usize,
        rng_seed: u64,
    ) -> SwarmConfig {
        SwarmConfig {
            swarm_size,
            iterations,
            inertia: self.inertia(iterations),
            seed_particles: self.seeds(matrix),
            rng_seed,
            ..SwarmConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    /// Zero-based decoding of `position`.
    pub current: Vec<usize>,
    pub cost: f64,
    pub pbest_position: Assignment,
    pub pbest_cost: f64,
}

/// The `r1`, `r2` factors for one particle update.
#[derive(Debug, Clone, PartialEq)]
pub enum Draws {
    Shared { r1: f64, r2: f64 },
    PerComponent { r1: Vec<f64>, r2: Vec<f64> },
}

impl Draws {
    fn sample(rng: &mut ChaCha8Rng, n: usize, per_component: bool) -> Self {
        if per_component {
            let r1 = (0..n).map(|_| rng.gen::<f64>()).collect();
            let r2 = (0..n).map(|_| rng.gen::<f64>()).collect();
            Draws::PerComponent { r1, r2 }
        } else {
            Draws::Shared {
                r1: rng.gen(),
                r2: rng.gen(),
            }
        }
    }

    #[inline]
    fn at(&self, i: usize) -> (f64, f64) {
        match self {
            Draws::Shared { r1, r2 } => (*r1, *r2),
            Draws::PerComponent { r1, r2 } => (r1[i], r2[i]),
        }
    }
}

/// Weights of the velocity update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
    pub v_max: f64,
}

/// `V' = w V + c1 r1 (pbest - X) + c2 r2 (gbest - X)`, clamped to `[-v_max, v_max]`.
///
/// `pbest` and `gbest` are zero-based assignments; `position` is in one-based
/// coordinates.
pub fn step_velocity(
    velocity: &[f64],
    position: &[f64],
    pbest: &[usize],
    gbest: &[usize],
    coeff: Coefficients,
    draws: &Draws,
) -> Vec<f64> {
    debug_assert!(velocity.len() == position.len() && pbest.len() == position.len());
    velocity
        .iter()
        .zip(position)
        .zip(pbest.iter().zip(gbest))
        .enumerate()
        .map(|(i, ((&v, &x), (&pb, &gb)))| {
            let (r1, r2) = draws.at(i);
            let cognitive = coeff.c1 * r1 * ((pb + 1) as f64 - x);
            let social = coeff.c2 * r2 * ((gb + 1) as f64 - x);
            (coeff.w * v + cognitive + social).clamp(-coeff.v_max, coeff.v_max)
        })
        .collect()
}

/// Processor (zero-based) encoded by a one-based real coordinate.
#[inline]
pub fn decode_component(x: f64, m: usize) -> usize {
    // f64::round rounds half away from zero.
    x.round().clamp(1.0, m as f64) as usize - 1
}

/// `X' = X + V'` and its decoded assignment.
pub fn step_position(position: &[f64], velocity: &[f64], m: usize) -> (Vec<f64>, Assignment) {
    let next: Vec<f64> = position.iter().zip(velocity).map(|(x, v)| x + v).collect();
    let decoded = next.iter().map(|&x| decode_component(x, m)).collect();
    (next, Assignment::from_vec_unchecked(decoded))
}

#[derive(Debug, Clone)]
pub struct Swarm<'a> {
    matrix: &'a UtilizationMatrix,
    cost: CostSpec,
    pub particles: Vec<Particle>,
    pub gbest: Assignment,
    pub gbest_cost: f64,
    pub evaluations: usize,
    scratch: LoadVector,
}

/// Population with seeds first and uniformly random integer positions for the
/// rest. Velocities start at zero; every particle is evaluated once.
pub fn initialize_swarm<'a>(
    matrix: &'a UtilizationMatrix,
    cost: CostSpec,
    config: &SwarmConfig,
) -> Result<Swarm<'a>> {
    config.validate(matrix)?;
    let (n, m) = (matrix.tasks(), matrix.processors());
    let mut rng = rng::generator(rng::derive(config.rng_seed, rng::stream::SWARM_INIT));
    let mut scratch = LoadVector(vec![0.0; m]);

    let mut particles = Vec::with_capacity(config.swarm_size);
    for k in 0..config.swarm_size {
        let current: Vec<usize> = match config.seed_particles.get(k) {
            Some(seed) => seed.as_slice().to_vec(),
            None => (0..n).map(|_| rng.gen_range(0..m)).collect(),
        };
        let position = current.iter().map(|&p| (p + 1) as f64).collect();
        let c = cost.evaluate_into(matrix, &current, &mut scratch);
        particles.push(Particle {
            position,
            velocity: vec![0.0; n],
            pbest_position: Assignment::from_vec_unchecked(current.clone()),
            pbest_cost: c,
            current,
            cost: c,
        });
    }

    let best = best_particle(&particles);
    Ok(Swarm {
        matrix,
        cost,
        gbest: particles[best].pbest_position.clone(),
        gbest_cost: particles[best].pbest_cost,
        evaluations: particles.len(),
        particles,
        scratch,
    })
}

// Lowest pbest cost, lowest index on ties.
fn best_particle(particles: &[Particle]) -> usize {
    let mut best = 0;
    for (k, p) in particles.iter().enumerate().skip(1) {
        if p.pbest_cost < particles[best].pbest_cost {
            best = k;
        }
    }
    best
}

impl Swarm<'_> {
    /// Evaluate current positions, refresh personal bests, then the global best.
    pub fn evaluate(&mut self) {
        for p in &mut self.particles {
            p.cost = self
                .cost
                .evaluate_into(self.matrix, &p.current, &mut self.scratch);
            if p.cost < p.pbest_cost {
                p.pbest_cost = p.cost;
                p.pbest_position = Assignment::from_vec_unchecked(p.current.clone());
            }
        }
        self.evaluations += self.particles.len();
        let best = best_particle(&self.particles);
        if self.particles[best].pbest_cost < self.gbest_cost {
            self.gbest_cost = self.particles[best].pbest_cost;
            self.gbest = self.particles[best].pbest_position.clone();
        }
    }

    /// Move every particle with inertia `w`.
    pub fn advance(
        &mut self,
        w: f64,
        c1: f64,
        c2: f64,
        v_max: f64,
        per_component: bool,
        rng: &mut ChaCha8Rng,
    ) {
        let m = self.matrix.processors();
        let coeff = Coefficients { w, c1, c2, v_max };
        for p in &mut self.particles {
            let draws = Draws::sample(rng, p.position.len(), per_component);
            p.velocity = step_velocity(
                &p.velocity,
                &p.position,
                p.pbest_position.as_slice(),
                self.gbest.as_slice(),
                coeff,
                &draws,
            );
            for ((x, v), slot) in p.position.iter_mut().zip(&p.velocity).zip(&mut p.current) {
                *x += v;
                *slot = decode_component(*x, m);
            }
        }
    }
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub best_assignment: Assignment,
    pub best_cost: f64,
    pub feasible: bool,
    /// Global best cost after each iteration.
    pub cost_trace: Vec<f64>,
    pub evaluations: usize,
    /// Reported only for feasible results.
    pub energy_per_core: Option<f64>,
    pub energy_full_chip: Option<f64>,
}

impl RunRecord {
    /// Record for a single assignment, as produced by non-iterative methods.
    pub fn for_assignment(
        matrix: &UtilizationMatrix,
        cost: CostSpec,
        assignment: Assignment,
        evaluations: usize,
    ) -> Result<Self> {
        let c = cost.evaluate(matrix, &assignment)?;
        Self::finish(matrix, assignment, c, vec![c], evaluations)
    }

    fn finish(
        matrix: &UtilizationMatrix,
        assignment: Assignment,
        best_cost: f64,
        cost_trace: Vec<f64>,
        evaluations: usize,
    ) -> Result<Self> {
        let loads = cost::loads(matrix, &assignment)?;
        let feasible = loads.is_feasible();
        let energy = |mode| cost::energy_metric(&loads, mode).ok();
        Ok(Self {
            best_assignment: assignment,
            best_cost,
            feasible,
            cost_trace,
            evaluations,
            energy_per_core: energy(DvfsMode::PerCore),
            energy_full_chip: energy(DvfsMode::FullChip),
        })
    }
}

/// Run the swarm for exactly `config.iterations` iterations.
pub fn run_pso(
    matrix: &UtilizationMatrix,
    cost: CostSpec,
    config: &SwarmConfig,
) -> Result<RunRecord> {
    let mut swarm = initialize_swarm(matrix, cost, config)?;
    let mut rng = rng::generator(rng::derive(config.rng_seed, rng::stream::SWARM_STEP));
    let v_max = config.v_max_for(matrix.processors());
    let total = config.iterations;

    let mut trace = Vec::with_capacity(total);
    for t in 0..total {
        // Initial positions were evaluated during initialization.
        if t > 0 {
            swarm.evaluate();
        }
        trace.push(swarm.gbest_cost);
        if t + 1 < total {
            let w = config.inertia.at(t, total);
            swarm.advance(
                w,
                config.c1,
                config.c2,
                v_max,
                config.per_component_random,
                &mut rng,
            );
        }
    }

    let best = swarm.gbest.clone();
    let best_cost = swarm.gbest_cost;
    RunRecord::finish(matrix, best, best_cost, trace, swarm.evaluations)
}
