//! Parameterized circuits and their derivative descriptors.
//!
//! Gate lists are stored in application order. A descriptor for parameter
//! `i` records where `sigma_k` is spliced into the list so that
//! `d|psi>/d theta_i = sum_k p_k W_k |psi0>`, with `W_k` the circuit carrying
//! the extra Pauli.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::scalar::{cplx, real, Real, C};
use crate::simulator::{Gate, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Molecule {
    H2,
    LiH,
}

impl FromStr for Molecule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "h2" => Ok(Molecule::H2),
            "lih" => Ok(Molecule::LiH),
            other => Err(Error::Ansatz(format!("unknown molecule {other:?}"))),
        }
    }
}

/// Reduced Hartree-Fock reference: `|10>` for H2, `|100>` for LiH.
pub fn hartree_fock_state<T: Real>(molecule: Molecule) -> StateVector<T> {
    let bits = match molecule {
        Molecule::H2 => "10",
        Molecule::LiH => "100",
    };
    StateVector::from_bits(bits).expect("static label")
}

/// One term `p * sigma` of a gate derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeFactor<T: Real> {
    pub p: C<T>,
    /// Acts on the full system register.
    pub sigma: PauliString,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeDescriptor<T: Real> {
    pub parameter_index: usize,
    /// Number of gates applied before `sigma` is inserted.
    pub insertion_point: usize,
    pub factors: Vec<DerivativeFactor<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnsatzKind {
    UccH2,
    UccLiH,
    HardwareEfficient { depth: usize },
}

impl AnsatzKind {
    pub fn n_system_qubits(&self) -> usize {
        match self {
            AnsatzKind::UccH2 | AnsatzKind::HardwareEfficient { .. } => 2,
            AnsatzKind::UccLiH => 3,
        }
    }

    pub fn n_parameters(&self) -> usize {
        match self {
            AnsatzKind::UccH2 => 1,
            AnsatzKind::UccLiH => 2,
            AnsatzKind::HardwareEfficient { depth } => 2 * depth + 4,
        }
    }

    /// Builds the circuit at `theta`. Depths other than one are accepted here
    /// because a kind with such a depth can only come from an explicit request.
    pub fn build<T: Real>(&self, theta: &[T]) -> Result<AnsatzCircuit<T>> {
        match self {
            AnsatzKind::UccH2 => {
                check_len(theta, 1)?;
                Ok(build_ucc_h2(theta[0]))
            }
            AnsatzKind::UccLiH => {
                check_len(theta, 2)?;
                Ok(build_ucc_lih([theta[0], theta[1]]))
            }
            AnsatzKind::HardwareEfficient { depth } => {
                build_hardware_efficient(theta, *depth, true)
            }
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnsatzKind::UccH2 => write!(f, "ucc-h2"),
            AnsatzKind::UccLiH => write!(f, "ucc-lih"),
            AnsatzKind::HardwareEfficient { depth: 1 } => write!(f, "he"),
            AnsatzKind::HardwareEfficient { depth } => write!(f, "he:{depth}"),
        }
    }
}

/// Accepts `ucc-h2`, `ucc-lih`, `he` and the extended `he:D`.
impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "ucc-h2" => Ok(AnsatzKind::UccH2),
            "ucc-lih" => Ok(AnsatzKind::UccLiH),
            "he" => Ok(AnsatzKind::HardwareEfficient { depth: 1 }),
            other => match other.strip_prefix("he:").map(str::parse::<usize>) {
                Some(Ok(depth)) if depth >= 1 => Ok(AnsatzKind::HardwareEfficient { depth }),
                _ => Err(Error::Ansatz(format!("unknown ansatz {other:?}"))),
            },
        }
    }
}

fn check_len<T>(theta: &[T], expected: usize) -> Result<()> {
    if theta.len() != expected {
        return Err(Error::ParameterCount {
            expected,
            actual: theta.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzCircuit<T: Real> {
    pub kind: AnsatzKind,
    pub gates: Vec<Gate<T>>,
    pub parameters: Vec<T>,
    pub descriptors: Vec<DerivativeDescriptor<T>>,
    pub reference_state: StateVector<T>,
    pub n_system_qubits: usize,
}

impl<T: Real> AnsatzCircuit<T> {
    pub fn n_parameters(&self) -> usize {
        self.parameters.len()
    }

    /// Same ansatz family at new parameters.
    pub fn rebind(&self, theta: &[T]) -> Result<Self> {
        self.kind.build(theta)
    }

    /// `V(theta)|psi0>`.
    pub fn state(&self) -> StateVector<T> {
        let mut psi = self.reference_state.clone();
        psi.apply_all(&self.gates).expect("builder emits valid gates");
        psi
    }

    /// `W_{k,i}|psi0>` for factor `k` of parameter `i`.
    pub fn branch(&self, i: usize, k: usize) -> StateVector<T> {
        let d = &self.descriptors[i];
        let mut psi = self.reference_state.clone();
        psi.apply_all(&self.gates[..d.insertion_point])
            .expect("builder emits valid gates");
        psi.apply_pauli(&d.factors[k].sigma)
            .expect("descriptor matches register");
        psi.apply_all(&self.gates[d.insertion_point..])
            .expect("builder emits valid gates");
        psi
    }

    /// `d|psi>/d theta_i = sum_k p_k W_{k,i}|psi0>` (not normalized).
    pub fn derivative_state(&self, i: usize) -> DVector<C<T>> {
        let mut out = DVector::zeros(self.reference_state.dim());
        for (k, f) in self.descriptors[i].factors.iter().enumerate() {
            out += self.branch(i, k).amplitudes() * f.p;
        }
        out
    }

    /// Dense `V(theta)`.
    pub fn unitary(&self) -> Result<DMatrix<C<T>>> {
        let n = self.n_system_qubits;
        let mut v = DMatrix::identity(1 << n, 1 << n);
        for g in &self.gates {
            v = g.dense(n)? * v;
        }
        Ok(v)
    }
}

/// Descriptor for a rotation `exp(-i a/2 sigma)` at list position `at`.
fn rotation_descriptor<T: Real>(
    parameter_index: usize,
    at: usize,
    n_qubits: usize,
    qubit: usize,
    pauli: Pauli,
) -> DerivativeDescriptor<T> {
    DerivativeDescriptor {
        parameter_index,
        insertion_point: at + 1,
        factors: vec![DerivativeFactor {
            p: cplx(T::zero(), real(-0.5)),
            sigma: PauliString::single(n_qubits, qubit, pauli),
        }],
    }
}

/// The basis-change, CNOT ladder and central `Rz(theta)` of one UCC
/// exponential between qubits `a` and `b`. Returns the position of the `Rz`.
fn ucc_block<T: Real>(gates: &mut Vec<Gate<T>>, a: usize, b: usize, theta: T) -> usize {
    let quarter = real::<T>(FRAC_PI_2);
    gates.push(Gate::Ry {
        qubit: b,
        angle: -quarter,
    });
    gates.push(Gate::Rx {
        qubit: a,
        angle: quarter,
    });
    gates.push(Gate::Cnot {
        control: a,
        target: b,
    });
    let at = gates.len();
    gates.push(Gate::Rz {
        qubit: b,
        angle: theta,
    });
    gates.push(Gate::Cnot {
        control: a,
        target: b,
    });
    gates.push(Gate::Rx {
        qubit: a,
        angle: -quarter,
    });
    gates.push(Gate::Ry {
        qubit: b,
        angle: quarter,
    });
    at
}

/// Two-qubit UCC circuit for H2 on reference `|10>`, one parameter.
pub fn build_ucc_h2<T: Real>(theta: T) -> AnsatzCircuit<T> {
    let mut gates = Vec::with_capacity(7);
    let at = ucc_block(&mut gates, 0, 1, theta);
    AnsatzCircuit {
        kind: AnsatzKind::UccH2,
        gates,
        parameters: vec![theta],
        descriptors: vec![rotation_descriptor(0, at, 2, 1, Pauli::Z)],
        reference_state: hartree_fock_state(Molecule::H2),
        n_system_qubits: 2,
    }
}

/// Three-qubit UCC circuit for LiH on reference `|100>`. The `(q0, q1)`
/// exponential with `theta[0]` is applied first.
pub fn build_ucc_lih<T: Real>(theta: [T; 2]) -> AnsatzCircuit<T> {
    let mut gates = Vec::with_capacity(14);
    let first = ucc_block(&mut gates, 0, 1, theta[0]);
    let second = ucc_block(&mut gates, 0, 2, theta[1]);
    AnsatzCircuit {
        kind: AnsatzKind::UccLiH,
        gates,
        parameters: theta.to_vec(),
        descriptors: vec![
            rotation_descriptor(0, first, 3, 1, Pauli::Z),
            rotation_descriptor(1, second, 3, 2, Pauli::Z),
        ],
        reference_state: hartree_fock_state(Molecule::LiH),
        n_system_qubits: 3,
    }
}

/// Two-qubit hardware-efficient circuit on reference `|00>`.
///
/// Depth one applies `Rx q0(t1), Rx q1(t2), CNOT, Rz q0(t3), Rz q1(t4),
/// Rx q0(t5), Rx q1(t6)`. Larger depths repeat the leading `Rx, Rx, CNOT`
/// block and need `allow_extension`; they take `2 * depth + 4` angles.
pub fn build_hardware_efficient<T: Real>(
    theta: &[T],
    depth: usize,
    allow_extension: bool,
) -> Result<AnsatzCircuit<T>> {
    if depth == 0 || (depth != 1 && !allow_extension) {
        return Err(Error::Ansatz(format!(
            "hardware-efficient depth {depth} requires the extension flag"
        )));
    }
    let kind = AnsatzKind::HardwareEfficient { depth };
    check_len(theta, kind.n_parameters())?;

    let mut gates = Vec::new();
    let mut descriptors = Vec::new();
    let mut angles = theta.iter().copied().enumerate();
    let mut rotation = |gates: &mut Vec<Gate<T>>, qubit: usize, pauli: Pauli| {
        let (i, angle) = angles.next().expect("length checked");
        descriptors.push(rotation_descriptor(i, gates.len(), 2, qubit, pauli));
        gates.push(match pauli {
            Pauli::X => Gate::Rx { qubit, angle },
            _ => Gate::Rz { qubit, angle },
        });
    };
    for _ in 0..depth {
        rotation(&mut gates, 0, Pauli::X);
        rotation(&mut gates, 1, Pauli::X);
        gates.push(Gate::Cnot {
            control: 0,
            target: 1,
        });
    }
    rotation(&mut gates, 0, Pauli::Z);
    rotation(&mut gates, 1, Pauli::Z);
    rotation(&mut gates, 0, Pauli::X);
    rotation(&mut gates, 1, Pauli::X);

    Ok(AnsatzCircuit {
        kind,
        gates,
        parameters: theta.to_vec(),
        descriptors,
        reference_state: StateVector::basis(2, 0)?,
        n_system_qubits: 2,
    })
}
