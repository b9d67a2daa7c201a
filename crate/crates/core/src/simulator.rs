//! Exact statevector and density-matrix simulation.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::pauli::{bit_of, check_dense_cap, hermitian_deviation, qubit_bit, Pauli, PauliString};
use crate::scalar::{abs, cis, cplx, real, to_f64, tol, Real, C};

/// Seedable generator behind every shot-mode estimate.
pub type ShotRng = ChaCha8Rng;

/// Generator for stream `stream` of run `seed`; streams never overlap.
pub fn shot_rng(seed: u64, stream: u64) -> ShotRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    n_qubits: usize,
    amplitudes: DVector<C<T>>,
}

impl<T: Real> StateVector<T> {
    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_dense_cap(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[index] = cplx(T::one(), T::zero());
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Basis state from a bit label such as `"10"` (leftmost bit is `q0`).
    pub fn from_bits(bits: &str) -> Result<Self> {
        let n = bits.len();
        let mut index = 0usize;
        for (q, ch) in bits.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => index |= 1 << qubit_bit(n, q),
                _ => {
                    return Err(Error::InvalidState(format!(
                        "bad bit {ch:?} in label {bits:?}"
                    )))
                }
            }
        }
        Self::basis(n, index)
    }

    /// Normalized state from raw amplitudes; the norm must already be 1.
    pub fn from_amplitudes(amplitudes: DVector<C<T>>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "length {dim} is not a power of two"
            )));
        }
        let norm2 = amplitudes.norm_squared();
        if abs(norm2 - T::one()) > tol::<T>(1e-10) {
            return Err(Error::InvalidState(format!(
                "squared norm {} differs from 1",
                to_f64(norm2)
            )));
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: DVector<C<T>>) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm <= T::default_epsilon() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::from_amplitudes(amplitudes.unscale(norm))
    }

    /// `(|0> + |1>)/sqrt(2)`.
    pub fn plus() -> Self {
        let h = real::<T>(std::f64::consts::FRAC_1_SQRT_2);
        Self {
            n_qubits: 1,
            amplitudes: DVector::from_vec(vec![cplx(h, T::zero()), cplx(h, T::zero())]),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C<T>> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C<T>> {
        self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn norm(&self) -> T {
        self.amplitudes.norm()
    }

    /// `|self> (x) |other>`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        }
    }

    pub fn apply(&mut self, gate: &Gate<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        apply_unchecked(&mut self.amplitudes, self.n_qubits, gate);
        Ok(())
    }

    pub fn apply_all(&mut self, gates: &[Gate<T>]) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// `P|psi>` for a Pauli string on this register.
    pub fn apply_pauli(&mut self, s: &PauliString) -> Result<()> {
        if s.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: s.n_qubits(),
            });
        }
        self.amplitudes = s.apply(&self.amplitudes);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    n_qubits: usize,
    elements: DMatrix<C<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// `|psi><psi|`.
    pub fn from_pure(psi: &StateVector<T>) -> Self {
        let a = psi.amplitudes();
        Self {
            n_qubits: psi.n_qubits(),
            elements: a * a.adjoint(),
        }
    }

    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(elements: DMatrix<C<T>>) -> Result<Self> {
        let dim = elements.nrows();
        if dim != elements.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "{}x{} is not a qubit density matrix shape",
                elements.nrows(),
                elements.ncols()
            )));
        }
        let dev = hermitian_deviation(&elements);
        if dev > tol::<T>(1e-10) {
            return Err(Error::NotHermitian {
                deviation: to_f64(dev),
            });
        }
        let tr = elements.trace();
        if abs(tr.re - T::one()) > tol::<T>(1e-10) || abs(tr.im) > tol::<T>(1e-10) {
            return Err(Error::InvalidState(format!(
                "trace {} differs from 1",
                to_f64(tr.re)
            )));
        }
        let lowest = elements
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(T::max_value().unwrap(), |a, b| if b < a { b } else { a });
        if lowest < -tol::<T>(1e-9) {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {}",
                to_f64(lowest)
            )));
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            elements,
        })
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let w = cplx(T::one() / real::<T>(dim as f64), T::zero());
        Self {
            n_qubits,
            elements: DMatrix::from_diagonal_element(dim, dim, w),
        }
    }

    /// Convex combination of pure states; weights must sum to one.
    pub fn mixture(parts: &[(T, StateVector<T>)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let dim = first.1.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (w, psi) in parts {
            if psi.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: psi.dim(),
                });
            }
            let a = psi.amplitudes();
            m += (a * a.adjoint()) * cplx(*w, T::zero());
        }
        Self::from_matrix(m)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.elements.nrows()
    }

    pub fn elements(&self) -> &DMatrix<C<T>> {
        &self.elements
    }

    pub fn trace(&self) -> T {
        self.elements.trace().re
    }

    pub fn purity(&self) -> T {
        (&self.elements * &self.elements).trace().re
    }
}

/// Either kind of state, for operations that accept both.
#[derive(Debug, Clone, Copy)]
pub enum StateRef<'a, T: Real> {
    Pure(&'a StateVector<T>),
    Mixed(&'a DensityMatrix<T>),
}

impl<'a, T: Real> From<&'a StateVector<T>> for StateRef<'a, T> {
    fn from(s: &'a StateVector<T>) -> Self {
        StateRef::Pure(s)
    }
}

impl<'a, T: Real> From<&'a DensityMatrix<T>> for StateRef<'a, T> {
    fn from(s: &'a DensityMatrix<T>) -> Self {
        StateRef::Mixed(s)
    }
}

impl<T: Real> StateRef<'_, T> {
    fn dim(&self) -> usize {
        match self {
            StateRef::Pure(s) => s.dim(),
            StateRef::Mixed(r) => r.dim(),
        }
    }
}

/// Control qubit of a controlled gate; `on_one = false` is an open control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub on_one: bool,
}

impl Control {
    pub fn on_one(qubit: usize) -> Self {
        Self {
            qubit,
            on_one: true,
        }
    }

    pub fn on_zero(qubit: usize) -> Self {
        Self {
            qubit,
            on_one: false,
        }
    }
}

/// Rotation gates follow `R_n(a) = exp(-i a/2 sigma_n)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate<T: Real> {
    Rx { qubit: usize, angle: T },
    Ry { qubit: usize, angle: T },
    Rz { qubit: usize, angle: T },
    /// `diag(1, e^{i angle})`.
    Phase { qubit: usize, angle: T },
    H(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Cnot { control: usize, target: usize },
    Cz { control: usize, target: usize },
    ControlledPauli { control: Control, target: usize, pauli: Pauli },
    /// Controlled product of Paulis, applied as a chain of single
    /// controlled-Pauli factors. `string` spans the whole register and must
    /// carry `I` at the control qubit.
    ControlledPauliString { control: Control, string: PauliString },
}

impl<T: Real> Gate<T> {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::Rx { qubit, .. }
            | Gate::Ry { qubit, .. }
            | Gate::Rz { qubit, .. }
            | Gate::Phase { qubit, .. } => vec![*qubit],
            Gate::H(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => vec![*q],
            Gate::Cnot { control, target } | Gate::Cz { control, target } => {
                vec![*control, *target]
            }
            Gate::ControlledPauli {
                control, target, ..
            } => vec![control.qubit, *target],
            Gate::ControlledPauliString { control, string } => std::iter::once(control.qubit)
                .chain(string.support().map(|(q, _)| q))
                .collect(),
        }
    }

    pub fn angle(&self) -> Option<T> {
        match self {
            Gate::Rx { angle, .. }
            | Gate::Ry { angle, .. }
            | Gate::Rz { angle, .. }
            | Gate::Phase { angle, .. } => Some(*angle),
            _ => None,
        }
    }

    pub fn is_self_inverse(&self) -> bool {
        !matches!(
            self,
            Gate::Rx { .. } | Gate::Ry { .. } | Gate::Rz { .. } | Gate::Phase { .. }
        )
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        if let Gate::ControlledPauliString { string, control } = self {
            if string.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    actual: string.n_qubits(),
                });
            }
            if control.qubit < n_qubits && string.letter(control.qubit) != Pauli::I {
                return Err(Error::QubitCollision(control.qubit));
            }
        }
        let qs = self.qubits();
        for (i, &q) in qs.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            if qs[..i].contains(&q) {
                return Err(Error::QubitCollision(q));
            }
        }
        Ok(())
    }

    /// Dense unitary on an `n_qubits` register, built column by column.
    pub fn dense(&self, n_qubits: usize) -> Result<DMatrix<C<T>>> {
        self.validate(n_qubits)?;
        check_dense_cap(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for x in 0..dim {
            let mut col = DVector::zeros(dim);
            col[x] = cplx(T::one(), T::zero());
            apply_unchecked(&mut col, n_qubits, self);
            m.set_column(x, &col);
        }
        Ok(m)
    }
}

/// 2x2 unitary `[[a, b], [c, d]]` on one qubit.
fn apply_single<T: Real>(amps: &mut DVector<C<T>>, n: usize, q: usize, u: [C<T>; 4]) {
    let bit = 1usize << qubit_bit(n, q);
    for x in 0..amps.len() {
        if x & bit == 0 {
            let (a0, a1) = (amps[x], amps[x | bit]);
            amps[x] = u[0] * a0 + u[1] * a1;
            amps[x | bit] = u[2] * a0 + u[3] * a1;
        }
    }
}

fn pauli_unitary<T: Real>(p: Pauli) -> [C<T>; 4] {
    let o = cplx(T::zero(), T::zero());
    let l = cplx(T::one(), T::zero());
    let i = cplx(T::zero(), T::one());
    match p {
        Pauli::I => [l, o, o, l],
        Pauli::X => [o, l, l, o],
        Pauli::Y => [o, -i, i, o],
        Pauli::Z => [l, o, o, -l],
    }
}

fn apply_controlled<T: Real>(
    amps: &mut DVector<C<T>>,
    n: usize,
    control: Control,
    target: usize,
    u: [C<T>; 4],
) {
    let cbit = 1usize << qubit_bit(n, control.qubit);
    let tbit = 1usize << qubit_bit(n, target);
    for x in 0..amps.len() {
        let active = (x & cbit != 0) == control.on_one;
        if active && x & tbit == 0 {
            let (a0, a1) = (amps[x], amps[x | tbit]);
            amps[x] = u[0] * a0 + u[1] * a1;
            amps[x | tbit] = u[2] * a0 + u[3] * a1;
        }
    }
}

fn apply_unchecked<T: Real>(amps: &mut DVector<C<T>>, n: usize, gate: &Gate<T>) {
    let o = cplx(T::zero(), T::zero());
    let half = real::<T>(0.5);
    match gate {
        Gate::Rx { qubit, angle } => {
            let (c, s) = ((*angle * half).cos(), (*angle * half).sin());
            let (c, ms) = (cplx(c, T::zero()), cplx(T::zero(), -s));
            apply_single(amps, n, *qubit, [c, ms, ms, c]);
        }
        Gate::Ry { qubit, angle } => {
            let (c, s) = ((*angle * half).cos(), (*angle * half).sin());
            let (c, s) = (cplx(c, T::zero()), cplx(s, T::zero()));
            apply_single(amps, n, *qubit, [c, -s, s, c]);
        }
        Gate::Rz { qubit, angle } => {
            let a = *angle * half;
            apply_single(amps, n, *qubit, [cis(-a), o, o, cis(a)]);
        }
        Gate::Phase { qubit, angle } => {
            apply_single(amps, n, *qubit, [cplx(T::one(), T::zero()), o, o, cis(*angle)]);
        }
        Gate::H(q) => {
            let h = cplx(real::<T>(std::f64::consts::FRAC_1_SQRT_2), T::zero());
            apply_single(amps, n, *q, [h, h, h, -h]);
        }
        Gate::X(q) => apply_single(amps, n, *q, pauli_unitary(Pauli::X)),
        Gate::Y(q) => apply_single(amps, n, *q, pauli_unitary(Pauli::Y)),
        Gate::Z(q) => apply_single(amps, n, *q, pauli_unitary(Pauli::Z)),
        Gate::Cnot { control, target } => apply_controlled(
            amps,
            n,
            Control::on_one(*control),
            *target,
            pauli_unitary(Pauli::X),
        ),
        Gate::Cz { control, target } => apply_controlled(
            amps,
            n,
            Control::on_one(*control),
            *target,
            pauli_unitary(Pauli::Z),
        ),
        Gate::ControlledPauli {
            control,
            target,
            pauli,
        } => apply_controlled(amps, n, *control, *target, pauli_unitary(*pauli)),
        Gate::ControlledPauliString { control, string } => {
            for (q, p) in string.support() {
                apply_controlled(amps, n, *control, q, pauli_unitary(p));
            }
        }
    }
}

/// Applies one gate to a copy of `state`.
pub fn apply_gate<T: Real>(state: &StateVector<T>, gate: &Gate<T>) -> Result<StateVector<T>> {
    let mut out = state.clone();
    out.apply(gate)?;
    Ok(out)
}

/// Applies `gates` in list order.
pub fn run_circuit<T: Real>(initial: &StateVector<T>, gates: &[Gate<T>]) -> Result<StateVector<T>> {
    let mut out = initial.clone();
    out.apply_all(gates)?;
    Ok(out)
}

/// Expands a controlled Pauli string into its chain of controlled-Pauli factors.
pub fn controlled_pauli_chain<T: Real>(control: Control, string: &PauliString) -> Vec<Gate<T>> {
    string
        .support()
        .map(|(q, p)| Gate::ControlledPauli {
            control,
            target: q,
            pauli: p,
        })
        .collect()
}

/// State fidelity. With at least one pure argument this is `<b|rho_a|b>`;
/// for two mixed states it is the Uhlmann fidelity.
pub fn fidelity<'a, 'b, T: Real>(
    a: impl Into<StateRef<'a, T>>,
    b: impl Into<StateRef<'b, T>>,
) -> Result<T> {
    let (a, b) = (a.into(), b.into());
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let f = match (a, b) {
        (StateRef::Pure(x), StateRef::Pure(y)) => x.inner(y)?.norm_sqr(),
        (StateRef::Mixed(rho), StateRef::Pure(psi)) | (StateRef::Pure(psi), StateRef::Mixed(rho)) => {
            let v = psi.amplitudes();
            v.dotc(&(rho.elements() * v)).re
        }
        (StateRef::Mixed(r), StateRef::Mixed(s)) => {
            let sr = psd_sqrt(r.elements());
            let inner = &sr * s.elements() * &sr;
            let tr = inner
                .symmetric_eigenvalues()
                .iter()
                .map(|&l| if l > T::zero() { l.sqrt() } else { T::zero() })
                .fold(T::zero(), |acc, x| acc + x);
            tr * tr
        }
    };
    Ok(f.max(T::zero()).min(T::one()))
}

fn psd_sqrt<T: Real>(m: &DMatrix<C<T>>) -> DMatrix<C<T>> {
    let eig = m.clone().symmetric_eigen();
    let roots = eig.eigenvalues.map(|l| {
        let r = if l > T::zero() { l.sqrt() } else { T::zero() };
        cplx(r, T::zero())
    });
    let v = &eig.eigenvectors;
    v * DMatrix::from_diagonal(&roots) * v.adjoint()
}

/// How a Z expectation is read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    Exact,
    Finite(u64),
}

/// Exact `<Z_q>`.
pub fn z_expectation<T: Real>(state: &StateVector<T>, qubit: usize) -> Result<T> {
    let n = state.n_qubits();
    if qubit >= n {
        return Err(Error::QubitOutOfRange {
            index: qubit,
            n_qubits: n,
        });
    }
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (x, a)| {
            if bit_of(x, n, qubit) == 0 {
                acc + a.norm_sqr()
            } else {
                acc - a.norm_sqr()
            }
        }))
}

/// `<Z_q>`, exactly or estimated from a binomial sample of `shots` readouts.
pub fn measure_z_expectation<T: Real, R: Rng + ?Sized>(
    state: &StateVector<T>,
    qubit: usize,
    shots: Shots,
    rng: &mut R,
) -> Result<T> {
    let exact = z_expectation(state, qubit)?;
    match shots {
        Shots::Exact => Ok(exact),
        Shots::Finite(0) => Err(Error::ZeroShots),
        Shots::Finite(n) => {
            let p = (0.5 * (1.0 + to_f64(exact))).clamp(0.0, 1.0);
            let count = Binomial::new(n, p)
                .expect("probability clamped to [0, 1]")
                .sample(rng);
            Ok(real(2.0 * count as f64 / n as f64 - 1.0))
        }
    }
}

/// Probability of reading the ground outcome given its true probability
/// `p_truth` and per-level assignment fidelities.
pub fn apply_readout_error<T: Real>(p_truth: T, f_g: T, f_e: T) -> T {
    f_g * p_truth + (T::one() - f_e) * (T::one() - p_truth)
}

/// Inverse of [`apply_readout_error`], clamped to `[0, 1]`. `None` when the
/// assignment matrix is singular (`f_g + f_e = 1`).
pub fn correct_readout<T: Real>(p_measured: T, f_g: T, f_e: T) -> Option<T> {
    let det = f_g + f_e - T::one();
    if abs(det) <= T::default_epsilon() {
        return None;
    }
    let p = (p_measured - (T::one() - f_e)) / det;
    Some(p.max(T::zero()).min(T::one()))
}
