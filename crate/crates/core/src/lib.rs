//! Variational imaginary-time evolution on a statevector simulator.
//!
//! Pauli Hamiltonians, parameterized circuits for H₂ and LiH, the
//! McLachlan linear system (exact or via Hadamard-test circuits), cluster
//! mean-field reduction, Gershgorin-based excited-state lifting and
//! bond-distance scans. Everything is generic over `f32`/`f64`; the aliases
//! at the crate root fix `f64`.

pub mod error;
pub mod scalar;
pub mod pauli;
pub mod simulator;
pub mod ansatz;
pub mod mclachlan;
pub mod engine;
pub mod spectra;
pub mod cmf;
pub mod tables;
pub mod scan;

pub use ansatz::{AnsatzKind, Molecule};
pub use cmf::{cmf_reduce, CmfPartition, SelectionRecord};
pub use engine::{run_qite, theta_scan, DtauRule};
pub use error::{Error, Result};
pub use mclachlan::{compute_exact, compute_hadamard, compute_system, solve_update, Route};
pub use pauli::{Pauli, PauliString};
pub use scalar::Real;
pub use simulator::{fidelity, Gate, Shots};
pub use spectra::{exact_spectrum, gershgorin_emax, lift_ground_state};
pub use tables::{Interpolation, MoleculeTable};

pub type Hamiltonian = pauli::PauliHamiltonian<f64>;
pub type State = simulator::StateVector<f64>;
pub type Density = simulator::DensityMatrix<f64>;
pub type Circuit = ansatz::AnsatzCircuit<f64>;
pub type LinearSystem = mclachlan::McLachlanSystem<f64>;
pub type Config = engine::QiteConfig<f64>;
pub type Trajectory = engine::QiteTrajectory<f64>;
pub type Spectrum = spectra::SpectrumResult<f64>;
pub type Effective = cmf::EffectiveHamiltonian<f64>;
