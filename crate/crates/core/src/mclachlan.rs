//! The linear system `A theta_dot = B` of the McLachlan principle.
//!
//! `A_ij = Re sum_kl conj(p_ki) p_lj <W_ki psi0|W_lj psi0>` and
//! `B_i = -Re sum_kl conj(p_ki) h_l <W_ki psi0|sigma_l V psi0>`, evaluated either
//! by direct inner products or through ancilla interference circuits.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::ansatz::AnsatzCircuit;
use crate::error::{Error, Result};
use crate::pauli::{PauliHamiltonian, PauliString};
use crate::scalar::{abs, cabs, cplx, real, to_f64, Real, C};
use crate::simulator::{measure_z_expectation, shot_rng, Control, Gate, Shots, StateVector};

/// Relative eigenvalue cutoff for the pseudo-inverse on noiseless routes.
pub const EXACT_CUTOFF: f64 = 1e-8;
/// Relative eigenvalue cutoff when entries carry shot noise.
pub const SAMPLED_CUTOFF: f64 = 1e-3;
/// Below this largest eigenvalue `A` is treated as zero.
pub const ABSOLUTE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Statevector inner products.
    Exact,
    /// Interference circuits read out on the ancilla.
    Hadamard { shots: Shots, seed: u64 },
}

impl Route {
    pub fn is_noisy(&self) -> bool {
        matches!(
            self,
            Route::Hadamard {
                shots: Shots::Finite(_),
                ..
            }
        )
    }

    pub fn relative_cutoff(&self) -> f64 {
        if self.is_noisy() {
            SAMPLED_CUTOFF
        } else {
            EXACT_CUTOFF
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McLachlanSystem<T: Real> {
    pub a_matrix: DMatrix<T>,
    pub b_vector: DVector<T>,
    pub route: Route,
    /// Pooled standard errors, present for sampled estimates only.
    pub a_stderr: Option<DMatrix<T>>,
    pub b_stderr: Option<DVector<T>>,
}

impl<T: Real> McLachlanSystem<T> {
    pub fn n_parameters(&self) -> usize {
        self.b_vector.len()
    }

    /// Largest `|A_ij - A_ji|`.
    pub fn asymmetry(&self) -> T {
        let a = &self.a_matrix;
        (a - a.transpose()).amax()
    }
}

fn check_dims<T: Real>(ansatz: &AnsatzCircuit<T>, h: &PauliHamiltonian<T>) -> Result<()> {
    if h.n_qubits() != ansatz.n_system_qubits {
        return Err(Error::DimensionMismatch {
            expected: ansatz.n_system_qubits,
            actual: h.n_qubits(),
        });
    }
    Ok(())
}

/// Both matrices from statevector inner products; only `i <= j` is computed.
pub fn compute_exact<T: Real>(
    ansatz: &AnsatzCircuit<T>,
    h: &PauliHamiltonian<T>,
) -> Result<McLachlanSystem<T>> {
    check_dims(ansatz, h)?;
    let n = ansatz.n_parameters();
    let branches: Vec<Vec<StateVector<T>>> = (0..n)
        .map(|i| {
            (0..ansatz.descriptors[i].factors.len())
                .map(|k| ansatz.branch(i, k))
                .collect()
        })
        .collect();
    let h_psi = h.apply(ansatz.state().amplitudes())?;

    let mut a = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);
    for i in 0..n {
        let fi = &ansatz.descriptors[i].factors;
        for j in i..n {
            let fj = &ansatz.descriptors[j].factors;
            let mut acc = cplx(T::zero(), T::zero());
            for (k, pk) in fi.iter().enumerate() {
                for (l, pl) in fj.iter().enumerate() {
                    let overlap = branches[i][k].inner(&branches[j][l])?;
                    acc += pk.p.conj() * pl.p * overlap;
                }
            }
            a[(i, j)] = acc.re;
            a[(j, i)] = acc.re;
        }
        let mut acc = cplx(T::zero(), T::zero());
        for (k, pk) in fi.iter().enumerate() {
            acc += pk.p.conj() * branches[i][k].amplitudes().dotc(&h_psi);
        }
        b[i] = -acc.re;
    }
    Ok(McLachlanSystem {
        a_matrix: a,
        b_vector: b,
        route: Route::Exact,
        a_stderr: None,
        b_stderr: None,
    })
}

/// Matrix entry a circuit contributes to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Destination {
    A(usize, usize),
    B(usize),
}

/// Interference circuit on the system register plus one trailing ancilla.
/// Running it on `|psi0>|0>` yields `<Z_anc> = Re[e^{i phi} <branch0|branch1>]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardTestCircuit<T: Real> {
    pub gates: Vec<Gate<T>>,
    pub ancilla_phase: T,
    pub measured_qubit: usize,
    pub n_qubits: usize,
}

impl<T: Real> HadamardTestCircuit<T> {
    /// `|psi0> (x) |0>_anc`.
    pub fn initial_state(&self, reference: &StateVector<T>) -> StateVector<T> {
        reference.tensor(&StateVector::basis(1, 0).expect("one qubit"))
    }

    /// Ancilla `<Z>` after running on `reference`.
    pub fn evaluate(
        &self,
        reference: &StateVector<T>,
        shots: Shots,
        rng: &mut crate::simulator::ShotRng,
    ) -> Result<T> {
        let mut psi = self.initial_state(reference);
        psi.apply_all(&self.gates)?;
        measure_z_expectation(&psi, self.measured_qubit, shots, rng)
    }

    /// Peephole rewrite that leaves the ancilla readout unchanged:
    /// system-only gates after the last ancilla interaction are dropped,
    /// an open and a closed control of the same string fuse into the bare
    /// string, and adjacent identical self-inverse gates cancel.
    pub fn simplified(&self) -> Self {
        let anc = self.measured_qubit;
        let touches = |g: &Gate<T>| g.qubits().contains(&anc);
        let (body, tail) = self.gates.split_at(self.gates.len() - 1);
        let last = body.iter().rposition(touches).map_or(0, |p| p + 1);

        let mut out: Vec<Gate<T>> = Vec::with_capacity(body.len());
        for g in &body[..last] {
            let fused = match (out.last(), g) {
                (
                    Some(Gate::ControlledPauliString {
                        control: c0,
                        string: s0,
                    }),
                    Gate::ControlledPauliString {
                        control: c1,
                        string: s1,
                    },
                ) if c0.qubit == c1.qubit && c0.on_one != c1.on_one && s0 == s1 => {
                    Some(pauli_gates(s0))
                }
                _ => None,
            };
            match fused {
                Some(gs) => {
                    out.pop();
                    for g in gs {
                        push_cancelling(&mut out, g);
                    }
                }
                None => push_cancelling(&mut out, g.clone()),
            }
        }
        out.extend_from_slice(tail);
        Self {
            gates: out,
            ..self.clone()
        }
    }
}

fn push_cancelling<T: Real>(out: &mut Vec<Gate<T>>, g: Gate<T>) {
    if g.is_self_inverse() && out.last() == Some(&g) {
        out.pop();
    } else {
        out.push(g);
    }
}

/// Uncontrolled single-qubit factors of a Pauli string.
fn pauli_gates<T: Real>(s: &PauliString) -> Vec<Gate<T>> {
    use crate::pauli::Pauli;
    s.support()
        .map(|(q, p)| match p {
            Pauli::X => Gate::X(q),
            Pauli::Y => Gate::Y(q),
            _ => Gate::Z(q),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCircuit<T: Real> {
    pub circuit: HadamardTestCircuit<T>,
    pub weight: T,
    pub destination: Destination,
}

fn controlled<T: Real>(gates: &mut Vec<Gate<T>>, anc: usize, on_one: bool, s: &PauliString) {
    if !s.is_identity() {
        gates.push(Gate::ControlledPauliString {
            control: Control { qubit: anc, on_one },
            string: s.widened(1),
        });
    }
}

fn assemble<T: Real>(
    ansatz: &AnsatzCircuit<T>,
    anc: usize,
    prefactor: C<T>,
    open: (usize, &PauliString),
    closed: (usize, &PauliString),
) -> (HadamardTestCircuit<T>, T) {
    let phase = prefactor.im.atan2(prefactor.re);
    let mut gates = vec![
        Gate::H(anc),
        Gate::Phase {
            qubit: anc,
            angle: phase,
        },
    ];
    gates.extend_from_slice(&ansatz.gates[..open.0]);
    controlled(&mut gates, anc, false, open.1);
    gates.extend_from_slice(&ansatz.gates[open.0..closed.0]);
    controlled(&mut gates, anc, true, closed.1);
    gates.extend_from_slice(&ansatz.gates[closed.0..]);
    gates.push(Gate::H(anc));
    let circuit = HadamardTestCircuit {
        gates,
        ancilla_phase: phase,
        measured_qubit: anc,
        n_qubits: anc + 1,
    };
    (circuit, cabs(prefactor))
}

/// One circuit per factor pair of every `A_ij` with `i <= j`, then one per
/// factor and nonzero Hamiltonian term of every `B_i`.
pub fn build_hadamard_circuits<T: Real>(
    ansatz: &AnsatzCircuit<T>,
    h: &PauliHamiltonian<T>,
) -> Result<Vec<WeightedCircuit<T>>> {
    check_dims(ansatz, h)?;
    let anc = ansatz.n_system_qubits;
    let end = ansatz.gates.len();
    let n = ansatz.n_parameters();
    let mut out = Vec::new();
    for i in 0..n {
        let di = &ansatz.descriptors[i];
        for j in i..n {
            let dj = &ansatz.descriptors[j];
            let ((lo, hi), swapped) = if di.insertion_point <= dj.insertion_point {
                ((di, dj), false)
            } else {
                ((dj, di), true)
            };
            for fk in &lo.factors {
                for fl in &hi.factors {
                    // branch 0 carries the earlier insertion; conjugate the
                    // prefactor when that is parameter j so Re[...] is unchanged
                    let pre = fk.p.conj() * fl.p;
                    let pre = if swapped { pre.conj() } else { pre };
                    let (circuit, weight) = assemble(
                        ansatz,
                        anc,
                        pre,
                        (lo.insertion_point, &fk.sigma),
                        (hi.insertion_point, &fl.sigma),
                    );
                    out.push(WeightedCircuit {
                        circuit,
                        weight,
                        destination: Destination::A(i, j),
                    });
                }
            }
        }
    }
    for (i, d) in ansatz.descriptors.iter().enumerate() {
        for f in &d.factors {
            for (c, s) in h.terms() {
                let pre = -(f.p.conj() * cplx(*c, T::zero()));
                let (circuit, weight) =
                    assemble(ansatz, anc, pre, (d.insertion_point, &f.sigma), (end, s));
                out.push(WeightedCircuit {
                    circuit,
                    weight,
                    destination: Destination::B(i),
                });
            }
        }
    }
    Ok(out)
}

/// Evaluates every interference circuit and assembles `A` and `B`.
/// Circuit `c` draws from stream `c` of `seed`, so the result does not depend
/// on scheduling.
pub fn compute_hadamard<T: Real>(
    ansatz: &AnsatzCircuit<T>,
    h: &PauliHamiltonian<T>,
    shots: Shots,
    seed: u64,
) -> Result<McLachlanSystem<T>> {
    if shots == Shots::Finite(0) {
        return Err(Error::ZeroShots);
    }
    let circuits = build_hadamard_circuits(ansatz, h)?;
    let readings = circuits
        .par_iter()
        .enumerate()
        .map(|(c, wc)| {
            let mut rng = shot_rng(seed, c as u64);
            wc.circuit.evaluate(&ansatz.reference_state, shots, &mut rng)
        })
        .collect::<Result<Vec<T>>>()?;

    let n = ansatz.n_parameters();
    let mut a = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);
    let mut a_var = DMatrix::<T>::zeros(n, n);
    let mut b_var = DVector::<T>::zeros(n);
    for (wc, z) in circuits.iter().zip(&readings) {
        let w = wc.weight;
        let var = w * w * (T::one() - *z * *z).max(T::zero());
        match wc.destination {
            Destination::A(i, j) => {
                a[(i, j)] += w * *z;
                a_var[(i, j)] += var;
            }
            Destination::B(i) => {
                b[i] += w * *z;
                b_var[i] += var;
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            a[(i, j)] = a[(j, i)];
            a_var[(i, j)] = a_var[(j, i)];
        }
    }
    let (a_stderr, b_stderr) = match shots {
        Shots::Exact => (None, None),
        Shots::Finite(count) => {
            let inv = T::one() / real::<T>(count as f64);
            (
                Some(a_var.map(|v| (v * inv).sqrt())),
                Some(b_var.map(|v| (v * inv).sqrt())),
            )
        }
    };
    Ok(McLachlanSystem {
        a_matrix: a,
        b_vector: b,
        route: Route::Hadamard { shots, seed },
        a_stderr,
        b_stderr,
    })
}

/// Shot-sampled estimate with `shots` readouts per circuit.
pub fn compute_sampled<T: Real>(
    ansatz: &AnsatzCircuit<T>,
    h: &PauliHamiltonian<T>,
    shots: u64,
    seed: u64,
) -> Result<McLachlanSystem<T>> {
    compute_hadamard(ansatz, h, Shots::Finite(shots), seed)
}

/// Dispatches on `route`.
pub fn compute_system<T: Real>(
    ansatz: &AnsatzCircuit<T>,
    h: &PauliHamiltonian<T>,
    route: Route,
) -> Result<McLachlanSystem<T>> {
    match route {
        Route::Exact => compute_exact(ansatz, h),
        Route::Hadamard { shots, seed } => compute_hadamard(ansatz, h, shots, seed),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Update<T: Real> {
    pub delta: DVector<T>,
    /// `A` had no eigenvalue above the absolute floor.
    pub stationary: bool,
    /// Eigen-directions removed by the relative cutoff.
    pub dropped: usize,
}

/// `dtau * A^+ B`, with the pseudo-inverse taken over eigenvalues above
/// the route's relative cutoff.
pub fn solve_update<T: Real>(sys: &McLachlanSystem<T>, dtau: T) -> Result<Update<T>> {
    if dtau <= T::zero() || !dtau.is_finite() {
        return Err(Error::InvalidTimeStep(to_f64(dtau)));
    }
    let n = sys.n_parameters();
    let a = (&sys.a_matrix + sys.a_matrix.transpose()) * real::<T>(0.5);
    let eig = a.symmetric_eigen();
    let top = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(T::zero(), |m, l| if l > m { l } else { m });
    if top <= real::<T>(ABSOLUTE_FLOOR) {
        return Ok(Update {
            delta: DVector::zeros(n),
            stationary: true,
            dropped: n,
        });
    }
    let cut = top * real::<T>(sys.route.relative_cutoff());
    let v = &eig.eigenvectors;
    let vt_b = v.transpose() * &sys.b_vector;
    let mut scaled = DVector::zeros(n);
    let mut dropped = 0;
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l > cut {
            scaled[k] = vt_b[k] / l;
        } else {
            dropped += 1;
        }
    }
    Ok(Update {
        delta: v * scaled * dtau,
        stationary: false,
        dropped,
    })
}

/// Largest `|b_i|`.
pub fn max_abs<T: Real>(v: &DVector<T>) -> T {
    v.iter().fold(T::zero(), |m, &x| if abs(x) > m { abs(x) } else { m })
}
