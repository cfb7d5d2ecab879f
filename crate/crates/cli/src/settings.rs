//! Every tolerance the pipelines use, exposed as flags and echoed in reports.

use clap::Args;
use serde::{Deserialize, Serialize};
use sle0::locus::TraceOptions;
use sle0::loewner::EvolveOptions;
use sle0::solver::SolverOptions;

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Solver: Newton stops below this residual.
    #[arg(long, global = true, default_value_t = SolverOptions::default().newton_tol)]
    pub newton_tol: f64,
    #[arg(long, global = true, default_value_t = SolverOptions::default().max_newton_iter)]
    pub max_newton_iter: usize,
    #[arg(long, global = true, default_value_t = SolverOptions::default().restart_budget)]
    pub restart_budget: usize,
    #[arg(long, global = true, default_value_t = SolverOptions::default().fallback_starts)]
    pub fallback_starts: usize,
    #[arg(long, global = true, default_value_t = SolverOptions::default().homotopy_steps)]
    pub homotopy_steps: usize,
    /// Solver: solutions closer than this are identified.
    #[arg(long, global = true, default_value_t = SolverOptions::default().dedup_tol)]
    pub dedup_tol: f64,
    /// Largest stationary residual accepted for a solution.
    #[arg(long, global = true, default_value_t = SolverOptions::default().accept_tol)]
    pub accept_tol: f64,

    /// Tracer: seed offset as a fraction of the smallest feature separation.
    #[arg(long, global = true, default_value_t = TraceOptions::default().seed_fraction)]
    pub seed_fraction: f64,
    #[arg(long, global = true, default_value_t = TraceOptions::default().step_fraction)]
    pub step_fraction: f64,
    #[arg(long, global = true, default_value_t = TraceOptions::default().min_step)]
    pub min_step: f64,
    #[arg(long, global = true, default_value_t = TraceOptions::default().max_step)]
    pub max_step: f64,
    #[arg(long, global = true, default_value_t = TraceOptions::default().escape_radius)]
    pub escape_radius: f64,
    #[arg(long, global = true, default_value_t = TraceOptions::default().snap_multiple)]
    pub snap_multiple: f64,
    #[arg(long, global = true, default_value_t = TraceOptions::default().max_steps)]
    pub max_trace_steps: usize,
    /// Largest accepted |Im R - level| / (1 + |Re R|) along a trace.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub level_tol: f64,

    /// Loewner: halt once two boundary points come this close.
    #[arg(long, global = true, default_value_t = EvolveOptions::default().collision_gap)]
    pub collision_gap: f64,
    #[arg(long, global = true, default_value_t = EvolveOptions::default().swallow_tol)]
    pub swallow_tol: f64,
    /// Loewner: largest stationary residual accepted at t = 0.
    #[arg(long, global = true, default_value_t = EvolveOptions::default().stationary_tol)]
    pub stationary_tol: f64,

    /// Verification thresholds.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub null_vector_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub residue_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub critical_point_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub iom_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub drift_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub hamiltonian_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-7)]
    pub conservation_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub energy_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let s = SolverOptions::default();
        let t = TraceOptions::default();
        let e = EvolveOptions::default();
        Tolerances {
            newton_tol: s.newton_tol,
            max_newton_iter: s.max_newton_iter,
            restart_budget: s.restart_budget,
            fallback_starts: s.fallback_starts,
            homotopy_steps: s.homotopy_steps,
            dedup_tol: s.dedup_tol,
            accept_tol: s.accept_tol,
            seed_fraction: t.seed_fraction,
            step_fraction: t.step_fraction,
            min_step: t.min_step,
            max_step: t.max_step,
            escape_radius: t.escape_radius,
            snap_multiple: t.snap_multiple,
            max_trace_steps: t.max_steps,
            level_tol: 1e-6,
            collision_gap: e.collision_gap,
            swallow_tol: e.swallow_tol,
            stationary_tol: e.stationary_tol,
            null_vector_tol: 1e-9,
            residue_tol: 1e-9,
            critical_point_tol: 1e-8,
            iom_tol: 1e-6,
            drift_tol: 1e-6,
            hamiltonian_tol: 1e-8,
            conservation_tol: 1e-7,
            energy_tol: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn solver(&self, seed: u64) -> SolverOptions {
        SolverOptions {
            seed,
            newton_tol: self.newton_tol,
            max_newton_iter: self.max_newton_iter,
            restart_budget: self.restart_budget,
            fallback_starts: self.fallback_starts,
            homotopy_steps: self.homotopy_steps,
            dedup_tol: self.dedup_tol,
            accept_tol: self.accept_tol,
        }
    }

    pub fn trace(&self) -> TraceOptions {
        TraceOptions {
            seed_fraction: self.seed_fraction,
            step_fraction: self.step_fraction,
            min_step: self.min_step,
            max_step: self.max_step,
            escape_radius: self.escape_radius,
            snap_multiple: self.snap_multiple,
            max_steps: self.max_trace_steps,
        }
    }

    pub fn evolve(&self) -> EvolveOptions {
        EvolveOptions {
            collision_gap: self.collision_gap,
            swallow_tol: self.swallow_tol,
            stationary_tol: self.stationary_tol,
            ..EvolveOptions::default()
        }
    }
}
