//! The outer imaginary-time loop: step-size rule, Euler updates and
//! per-iteration bookkeeping.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::ansatz::AnsatzKind;
use crate::cmf::{lift_pure, EffectiveHamiltonian};
use crate::error::{Error, Result};
use crate::mclachlan::{compute_system, max_abs, solve_update, Route};
use crate::pauli::{Pauli, PauliHamiltonian};
use crate::scalar::{abs, real, to_f64, Real};
use crate::simulator::{fidelity, DensityMatrix, StateVector};
use crate::spectra::exact_spectrum;

/// `B` below this at the first iteration marks a run that cannot move.
pub const STATIONARY_TOL: f64 = 1e-10;
/// Allowed energy rise per step before a warning is raised.
pub const MONOTONICITY_TOL: f64 = 1e-6;
/// A scan point counts as converged within this distance of the ground energy.
pub const CONVERGENCE_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtauRule {
    /// `c / (|h_z| l)` with `h_z` the mean single-qubit Z coefficient.
    Auto { c: f64 },
    Fixed(f64),
}

impl Default for DtauRule {
    fn default() -> Self {
        DtauRule::Auto { c: 0.8 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QiteConfig<T: Real> {
    pub iterations: usize,
    pub dtau_rule: DtauRule,
    pub route: Route,
    pub initial_theta: Vec<T>,
    /// Keep `A` and `B` of every step; intermediate energies are always kept.
    pub record_intermediate: bool,
}

impl<T: Real> QiteConfig<T> {
    /// Four exact-route steps with the automatic step rule.
    pub fn new(initial_theta: Vec<T>) -> Self {
        Self {
            iterations: 4,
            dtau_rule: DtauRule::default(),
            route: Route::Exact,
            initial_theta,
            record_intermediate: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord<T: Real> {
    pub iteration: usize,
    pub theta: Vec<T>,
    pub energy: T,
    /// `None` when the reference ground state is degenerate.
    pub fidelity: Option<T>,
    /// The system solved at this point; absent on the last record.
    pub a_matrix: Option<DMatrix<T>>,
    pub b_vector: Option<DVector<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QiteTrajectory<T: Real> {
    /// `iterations + 1` entries, the starting point first.
    pub records: Vec<IterationRecord<T>>,
    /// Final state in the space energies are measured in.
    pub final_state: DensityMatrix<T>,
    pub converged_energy: T,
    pub exact_ground_energy: T,
    pub dtau: T,
    /// `B` vanished at the start, so the parameters never moved.
    pub stationary: bool,
    /// Reference ground level is degenerate; fidelities are suppressed.
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

impl<T: Real> QiteTrajectory<T> {
    pub fn final_theta(&self) -> &[T] {
        &self.records[self.records.len() - 1].theta
    }

    pub fn final_fidelity(&self) -> Option<T> {
        self.records[self.records.len() - 1].fidelity
    }

    pub fn initial_fidelity(&self) -> Option<T> {
        self.records[0].fidelity
    }

    pub fn iterations(&self) -> usize {
        self.records.len() - 1
    }
}

/// Mean coefficient of the weight-one Z strings.
pub fn average_z_coefficient<T: Real>(h: &PauliHamiltonian<T>) -> Result<T> {
    let zs: Vec<T> = h
        .terms()
        .iter()
        .filter(|(_, s)| s.weight() == 1 && s.support().all(|(_, p)| p == Pauli::Z))
        .map(|(c, _)| *c)
        .collect();
    if zs.is_empty() {
        return Err(Error::NoSingleZTerms);
    }
    let sum = zs.iter().fold(T::zero(), |a, &c| a + c);
    Ok(sum / real::<T>(zs.len() as f64))
}

/// Imaginary time step for `iterations` steps under `rule`.
pub fn resolve_dtau<T: Real>(rule: DtauRule, h: &PauliHamiltonian<T>, iterations: usize) -> Result<T> {
    let dtau = match rule {
        DtauRule::Fixed(v) => v,
        DtauRule::Auto { c } => {
            let hz = to_f64(abs(average_z_coefficient(h)?));
            c / (hz * iterations.max(1) as f64)
        }
    };
    if dtau <= 0.0 || !dtau.is_finite() {
        return Err(Error::InvalidTimeStep(dtau));
    }
    Ok(real(dtau))
}

/// Independent seed per iteration so sampled steps do not repeat their noise.
fn iteration_route(route: Route, iteration: usize) -> Route {
    match route {
        Route::Exact => Route::Exact,
        Route::Hadamard { shots, seed } => Route::Hadamard {
            shots,
            seed: seed ^ (iteration as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        },
    }
}

/// Runs `config.iterations` Euler steps of `theta += dtau A^+ B` for the
/// ansatz family `kind` against `h`.
///
/// With `energy_map` the circuit lives in the reduced space of `h` (the
/// effective Hamiltonian); energies and fidelities are evaluated on the lifted
/// state against the map's original Hamiltonian, and the automatic step rule
/// reads its Z coefficients from that original too.
pub fn run_qite<T: Real>(
    h: &PauliHamiltonian<T>,
    kind: AnsatzKind,
    config: &QiteConfig<T>,
    energy_map: Option<&EffectiveHamiltonian<T>>,
) -> Result<QiteTrajectory<T>> {
    if config.iterations == 0 {
        return Err(Error::Manifest("iteration count must be positive".into()));
    }
    if config.initial_theta.len() != kind.n_parameters() {
        return Err(Error::ParameterCount {
            expected: kind.n_parameters(),
            actual: config.initial_theta.len(),
        });
    }
    if let Some(map) = energy_map {
        if map.h_eff.n_qubits() != h.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected: map.h_eff.n_qubits(),
                actual: h.n_qubits(),
            });
        }
    }
    let reference = energy_map.map_or(h, |m| &m.original);
    let dtau = resolve_dtau(config.dtau_rule, reference, config.iterations)?;
    let oracle = exact_spectrum(reference)?;
    let degenerate = oracle.ground_is_degenerate();
    let ground = oracle.ground_state();

    let measured = |psi: &StateVector<T>| -> Result<StateVector<T>> {
        match energy_map {
            Some(map) => lift_pure(map, psi),
            None => Ok(psi.clone()),
        }
    };

    let mut theta = config.initial_theta.clone();
    let mut records = Vec::with_capacity(config.iterations + 1);
    let mut warnings = Vec::new();
    let mut stationary = false;
    let mut last_state = None;
    for it in 0..=config.iterations {
        let ansatz = kind.build(&theta)?;
        let psi = measured(&ansatz.state())?;
        let energy = reference.expectation(&psi)?;
        let fid = if degenerate {
            None
        } else {
            Some(fidelity(&psi, &ground)?)
        };
        if let Some(prev) = records.last().map(|r: &IterationRecord<T>| r.energy) {
            if energy > prev + real::<T>(MONOTONICITY_TOL) {
                warnings.push(format!(
                    "energy rose by {:.3e} at iteration {it}",
                    to_f64(energy - prev)
                ));
            }
        }
        let mut record = IterationRecord {
            iteration: it,
            theta: theta.clone(),
            energy,
            fidelity: fid,
            a_matrix: None,
            b_vector: None,
        };
        if it < config.iterations {
            let sys = compute_system(&ansatz, h, iteration_route(config.route, it))?;
            let update = solve_update(&sys, dtau)?;
            if it == 0 && (update.stationary || max_abs(&sys.b_vector) < real::<T>(STATIONARY_TOL)) {
                stationary = true;
                warnings.push("B vanishes at the initial point; parameters cannot evolve".into());
            }
            for (t, d) in theta.iter_mut().zip(update.delta.iter()) {
                *t += *d;
            }
            if config.record_intermediate {
                record.a_matrix = Some(sys.a_matrix);
                record.b_vector = Some(sys.b_vector);
            }
        }
        records.push(record);
        last_state = Some(psi);
    }
    let final_state = DensityMatrix::from_pure(&last_state.expect("at least one record"));
    let converged_energy = records[records.len() - 1].energy;
    Ok(QiteTrajectory {
        records,
        final_state,
        converged_energy,
        exact_ground_energy: oracle.ground_energy(),
        dtau,
        stationary,
        degenerate,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaScanPoint<T: Real> {
    pub theta0: T,
    pub final_energy: T,
    pub final_fidelity: Option<T>,
    pub stationary: bool,
    /// Final energy within [`CONVERGENCE_TOL`] of the exact ground energy.
    pub converged: bool,
}

/// `run_qite` from every starting angle of a one-parameter ansatz.
pub fn theta_scan<T: Real>(
    h: &PauliHamiltonian<T>,
    kind: AnsatzKind,
    grid: &[T],
    config: &QiteConfig<T>,
) -> Result<Vec<ThetaScanPoint<T>>> {
    if kind.n_parameters() != 1 {
        return Err(Error::Ansatz(format!(
            "initial-angle scans need a one-parameter ansatz, {kind} has {}",
            kind.n_parameters()
        )));
    }
    grid.par_iter()
        .map(|&theta0| {
            let cfg = QiteConfig {
                initial_theta: vec![theta0],
                ..config.clone()
            };
            let t = run_qite(h, kind, &cfg, None)?;
            Ok(ThetaScanPoint {
                theta0,
                final_energy: t.converged_energy,
                final_fidelity: t.final_fidelity(),
                stationary: t.stationary,
                converged: abs(t.converged_energy - t.exact_ground_energy) <= real::<T>(CONVERGENCE_TOL),
            })
        })
        .collect()
}
