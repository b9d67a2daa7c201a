//! Pauli strings and weighted Pauli sums.
//!
//! Qubit ordering is fixed once, in [`qubit_bit`]: the leftmost letter of a
//! label acts on qubit `q0`, which occupies the most significant bit of the
//! computational-basis index. Every module that touches basis indices goes
//! through that function.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{abs, cabs, cplx, real, to_f64, tol, Real, C};
use crate::simulator::{DensityMatrix, StateRef};

/// Largest register for which dense `2^n x 2^n` matrices are built.
pub const DENSE_QUBIT_CAP: usize = 12;

/// Coefficients below this magnitude are dropped on canonicalization.
pub const COEFFICIENT_FLOOR: f64 = 1e-14;

/// Bit position of qubit `q` inside a basis index of an `n_qubits` register.
#[inline]
pub const fn qubit_bit(n_qubits: usize, q: usize) -> usize {
    n_qubits - 1 - q
}

#[inline]
pub(crate) fn bit_of(index: usize, n_qubits: usize, q: usize) -> usize {
    (index >> qubit_bit(n_qubits, q)) & 1
}

pub(crate) fn check_dense_cap(n_qubits: usize) -> Result<()> {
    if n_qubits > DENSE_QUBIT_CAP {
        return Err(Error::SizeCap {
            n_qubits,
            cap: DENSE_QUBIT_CAP,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// The 2x2 matrix of this operator.
    pub fn matrix<T: Real>(self) -> DMatrix<C<T>> {
        let o = C::<T>::new(T::zero(), T::zero());
        let l = C::<T>::new(T::one(), T::zero());
        let i = C::<T>::new(T::zero(), T::one());
        match self {
            Pauli::I => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
            Pauli::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            Pauli::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Pauli::Z => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Tensor product of single-qubit Paulis, one letter per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidPauli {
                label: String::new(),
                reason: "empty string".into(),
            });
        }
        Ok(Self { letters })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            letters: vec![Pauli::I; n_qubits.max(1)],
        }
    }

    /// `pauli` on qubit `q`, identity elsewhere.
    pub fn single(n_qubits: usize, q: usize, pauli: Pauli) -> Self {
        let mut s = Self::identity(n_qubits);
        s.letters[q] = pauli;
        s
    }

    pub fn from_sparse(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n_qubits);
        for &(q, p) in ops {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            s.letters[q] = p;
        }
        Ok(s)
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letter(&self, q: usize) -> Pauli {
        self.letters[q]
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Non-identity letters with their qubit indices.
    pub fn support(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, &p)| (q, p))
    }

    /// Letters at the given qubits, in the given order.
    pub fn restrict(&self, qubits: &[usize]) -> PauliString {
        PauliString {
            letters: qubits.iter().map(|&q| self.letters[q]).collect(),
        }
    }

    /// The same string on a register widened by `extra` trailing identity qubits.
    pub fn widened(&self, extra: usize) -> PauliString {
        let mut letters = self.letters.clone();
        letters.extend(std::iter::repeat_n(Pauli::I, extra));
        PauliString { letters }
    }

    /// Bit flips (X/Y), sign bits (Y/Z) and number of Y letters.
    fn masks(&self) -> (usize, usize, usize) {
        let n = self.n_qubits();
        let (mut flip, mut sign, mut ys) = (0usize, 0usize, 0usize);
        for (q, &p) in self.letters.iter().enumerate() {
            let bit = 1usize << qubit_bit(n, q);
            match p {
                Pauli::I => {}
                Pauli::X => flip |= bit,
                Pauli::Y => {
                    flip |= bit;
                    sign |= bit;
                    ys += 1;
                }
                Pauli::Z => sign |= bit,
            }
        }
        (flip, sign, ys)
    }

    /// Sparse action on the register: `P|x> = phase(x) |x ^ flip>`.
    pub(crate) fn action<T: Real>(&self) -> PauliAction<T> {
        let (flip, sign, ys) = self.masks();
        // Y = i X Z
        let base = match ys % 4 {
            0 => cplx(T::one(), T::zero()),
            1 => cplx(T::zero(), T::one()),
            2 => cplx(-T::one(), T::zero()),
            _ => cplx(T::zero(), -T::one()),
        };
        PauliAction { flip, sign, base }
    }

    /// `P |psi>` for an amplitude vector of matching length.
    pub fn apply<T: Real>(&self, amplitudes: &DVector<C<T>>) -> DVector<C<T>> {
        let act = self.action::<T>();
        let mut out = DVector::zeros(amplitudes.len());
        for (x, a) in amplitudes.iter().enumerate() {
            out[x ^ act.flip] = act.phase(x) * a;
        }
        out
    }

    /// Dense `2^n x 2^n` matrix.
    pub fn to_dense<T: Real>(&self) -> Result<DMatrix<C<T>>> {
        check_dense_cap(self.n_qubits())?;
        let dim = 1usize << self.n_qubits();
        let act = self.action::<T>();
        let mut m = DMatrix::zeros(dim, dim);
        for x in 0..dim {
            m[(x ^ act.flip, x)] = act.phase(x);
        }
        Ok(m)
    }

    /// `Tr(rho P)` for a square matrix `rho` on the same register.
    pub(crate) fn trace_with<T: Real>(&self, rho: &DMatrix<C<T>>) -> C<T> {
        let act = self.action::<T>();
        let mut acc = C::<T>::new(T::zero(), T::zero());
        for x in 0..rho.nrows() {
            acc += rho[(x, x ^ act.flip)] * act.phase(x);
        }
        acc
    }

    /// All `4^n` strings on `n` qubits in lexicographic `I < X < Y < Z` order.
    pub fn enumerate(n_qubits: usize) -> impl Iterator<Item = PauliString> {
        let count = 1usize << (2 * n_qubits);
        (0..count).map(move |mut code| {
            let mut letters = vec![Pauli::I; n_qubits];
            for q in (0..n_qubits).rev() {
                letters[q] = Pauli::ALL[code & 3];
                code >>= 2;
            }
            PauliString { letters }
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct PauliAction<T: Real> {
    pub flip: usize,
    sign: usize,
    base: C<T>,
}

impl<T: Real> PauliAction<T> {
    #[inline]
    pub fn phase(&self, x: usize) -> C<T> {
        if (x & self.sign).count_ones() % 2 == 1 {
            -self.base
        } else {
            self.base
        }
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let letters = s
            .chars()
            .map(|c| {
                Pauli::from_char(c).ok_or_else(|| Error::InvalidPauli {
                    label: s.to_string(),
                    reason: format!("unexpected letter {c:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::InvalidPauli {
                label: s.to_string(),
                reason: "empty string".into(),
            });
        }
        Ok(Self { letters })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// `H = sum_l h_l sigma_l` with real coefficients, kept in canonical form:
/// one entry per distinct string, in order of first appearance, no
/// coefficient smaller than [`COEFFICIENT_FLOOR`].
#[derive(Debug, Clone, PartialEq)]
pub struct PauliHamiltonian<T: Real> {
    n_qubits: usize,
    terms: Vec<(T, PauliString)>,
}

impl<T: Real> PauliHamiltonian<T> {
    /// The zero operator.
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, PauliString)>,
    {
        let mut h = Self::zero(n_qubits);
        for (c, s) in terms {
            h.add_term(c, s)?;
        }
        h.prune();
        Ok(h)
    }

    /// Convenience constructor from `(coefficient, label)` pairs.
    pub fn from_labels(terms: &[(f64, &str)]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|&(c, l)| Ok((real::<T>(c), l.parse::<PauliString>()?)))
            .collect::<Result<Vec<_>>>()?;
        let n = parsed.first().map(|(_, s)| s.n_qubits()).ok_or_else(|| {
            Error::InvalidPauli {
                label: String::new(),
                reason: "no terms".into(),
            }
        })?;
        Self::from_terms(n, parsed)
    }

    /// Adds `c * s`, merging with an existing entry for `s`.
    pub fn add_term(&mut self, c: T, s: PauliString) -> Result<()> {
        if s.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: s.n_qubits(),
            });
        }
        match self.terms.iter_mut().find(|(_, t)| *t == s) {
            Some((existing, _)) => *existing += c,
            None => self.terms.push((c, s)),
        }
        Ok(())
    }

    fn prune(&mut self) {
        let floor = real::<T>(COEFFICIENT_FLOOR);
        self.terms.retain(|(c, _)| abs(*c) >= floor);
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Coefficient of `s`, zero if absent.
    pub fn coefficient(&self, s: &PauliString) -> T {
        self.terms
            .iter()
            .find(|(_, t)| t == s)
            .map(|(c, _)| *c)
            .unwrap_or_else(T::zero)
    }

    pub fn scaled(&self, factor: T) -> Self {
        let mut h = Self {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(c, s)| (*c * factor, s.clone())).collect(),
        };
        h.prune();
        h
    }

    /// Sum of absolute coefficients; an operator-norm bound.
    pub fn one_norm(&self) -> T {
        self.terms.iter().fold(T::zero(), |acc, (c, _)| acc + abs(*c))
    }

    /// `H |psi>` without forming the dense matrix.
    pub fn apply(&self, amplitudes: &DVector<C<T>>) -> Result<DVector<C<T>>> {
        if amplitudes.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: amplitudes.len(),
            });
        }
        let mut out = DVector::zeros(amplitudes.len());
        for (c, s) in &self.terms {
            let act = s.action::<T>();
            let c = cplx(*c, T::zero());
            for (x, a) in amplitudes.iter().enumerate() {
                out[x ^ act.flip] += c * act.phase(x) * a;
            }
        }
        Ok(out)
    }

    /// Dense Hermitian matrix `sum_l h_l sigma_l`.
    pub fn to_dense_matrix(&self) -> Result<DMatrix<C<T>>> {
        check_dense_cap(self.n_qubits)?;
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for (c, s) in &self.terms {
            let act = s.action::<T>();
            let c = cplx(*c, T::zero());
            for x in 0..dim {
                m[(x ^ act.flip, x)] += c * act.phase(x);
            }
        }
        Ok(m)
    }

    /// `<psi|H|psi>` or `Tr(rho H)`.
    pub fn expectation<'a>(&self, state: impl Into<StateRef<'a, T>>) -> Result<T> {
        let value = match state.into() {
            StateRef::Pure(psi) => {
                let h_psi = self.apply(psi.amplitudes())?;
                psi.amplitudes().dotc(&h_psi)
            }
            StateRef::Mixed(rho) => {
                let m = rho.elements();
                if m.nrows() != self.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: self.dim(),
                        actual: m.nrows(),
                    });
                }
                self.terms.iter().fold(C::new(T::zero(), T::zero()), |acc, (c, s)| {
                    acc + s.trace_with(m) * cplx(*c, T::zero())
                })
            }
        };
        if abs(value.im) > tol::<T>(1e-10) * (T::one() + self.one_norm()) {
            return Err(Error::ImaginaryResidual(to_f64(value.im)));
        }
        Ok(value.re)
    }

    /// Traces out the complement of `subsystem` against `weight`:
    /// each `h_l sigma_l` becomes `h_l Tr(weight sigma_l|comp) sigma_l|sub`.
    ///
    /// `subsystem` must be strictly increasing; the complement is taken in
    /// increasing order and `weight` must live on it.
    pub fn weighted_partial_trace(
        &self,
        subsystem: &[usize],
        weight: &DensityMatrix<T>,
    ) -> Result<PauliHamiltonian<T>> {
        let complement = complement_of(self.n_qubits, subsystem)?;
        if weight.n_qubits() != complement.len() {
            return Err(Error::Partition(format!(
                "weight acts on {} qubits but the complement has {}",
                weight.n_qubits(),
                complement.len()
            )));
        }
        let mut reduced = PauliHamiltonian::zero(subsystem.len());
        for (c, s) in &self.terms {
            let scalar = s.restrict(&complement).trace_with(weight.elements());
            if abs(scalar.im) > tol::<T>(1e-10) {
                return Err(Error::ImaginaryResidual(to_f64(scalar.im)));
            }
            reduced.add_term(*c * scalar.re, s.restrict(subsystem))?;
        }
        reduced.prune();
        Ok(reduced)
    }

    /// Pauli decomposition `h_l = Tr(sigma_l m) / 2^k` of a Hermitian matrix.
    pub fn pauli_decompose(m: &DMatrix<C<T>>) -> Result<PauliHamiltonian<T>> {
        let dim = m.nrows();
        if dim != m.ncols() || !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(2),
                actual: m.ncols(),
            });
        }
        let k = dim.trailing_zeros() as usize;
        check_dense_cap(k)?;
        let deviation = hermitian_deviation(m);
        if deviation > tol::<T>(1e-9) {
            return Err(Error::NotHermitian {
                deviation: to_f64(deviation),
            });
        }
        let norm = real::<T>(dim as f64);
        let mut h = PauliHamiltonian::zero(k);
        for s in PauliString::enumerate(k) {
            let act = s.action::<T>();
            // Tr(sigma m) = sum_y phase(y) m[y, y ^ flip]
            let mut tr = C::<T>::new(T::zero(), T::zero());
            for y in 0..dim {
                tr += act.phase(y) * m[(y, y ^ act.flip)];
            }
            h.terms.push((tr.re / norm, s));
        }
        h.prune();
        Ok(h)
    }
}

impl<T: Real> fmt::Display for PauliHamiltonian<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, s)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", to_f64(*c), s)?;
        }
        Ok(())
    }
}

/// Largest `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation<T: Real>(m: &DMatrix<C<T>>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = cabs(m[(i, j)] - m[(j, i)].conj());
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Sorted complement of a strictly increasing, in-range, nonempty qubit subset.
pub(crate) fn complement_of(n_qubits: usize, subsystem: &[usize]) -> Result<Vec<usize>> {
    if subsystem.is_empty() {
        return Err(Error::Partition("empty subsystem".into()));
    }
    if subsystem.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Partition(format!(
            "subsystem {subsystem:?} must be strictly increasing"
        )));
    }
    if let Some(&q) = subsystem.iter().find(|&&q| q >= n_qubits) {
        return Err(Error::QubitOutOfRange { index: q, n_qubits });
    }
    let complement: Vec<usize> = (0..n_qubits).filter(|q| !subsystem.contains(q)).collect();
    if complement.is_empty() {
        return Err(Error::Partition("subsystem covers every qubit".into()));
    }
    Ok(complement)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::StateVector;

    fn kron(a: &DMatrix<C<f64>>, b: &DMatrix<C<f64>>) -> DMatrix<C<f64>> {
        a.kronecker(b)
    }

    #[test]
    fn single_z_is_diagonal() {
        let h = PauliHamiltonian::<f64>::from_labels(&[(1.0, "Z")]).unwrap();
        let m = h.to_dense_matrix().unwrap();
        assert_eq!(m[(0, 0)].re, 1.0);
        assert_eq!(m[(1, 1)].re, -1.0);
        assert_eq!(m[(0, 1)].norm(), 0.0);
    }

    #[test]
    fn leftmost_letter_is_most_significant() {
        let h = PauliHamiltonian::<f64>::from_labels(&[(1.0, "XI")]).unwrap();
        let expected = kron(&Pauli::X.matrix(), &Pauli::I.matrix());
        assert!((h.to_dense_matrix().unwrap() - expected).norm() < 1e-15);
        // Z on q0 reads the high bit: |10> has index 2.
        let z0 = PauliHamiltonian::<f64>::from_labels(&[(1.0, "ZI")]).unwrap();
        let psi = StateVector::<f64>::from_bits("10").unwrap();
        assert_eq!(z0.expectation(&psi).unwrap(), -1.0);
    }

    #[test]
    fn dense_matches_kronecker_products() {
        let s: PauliString = "XYZ".parse().unwrap();
        let expected = kron(
            &kron(&Pauli::X.matrix(), &Pauli::Y.matrix()),
            &Pauli::Z.matrix(),
        );
        assert!((s.to_dense::<f64>().unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn canonical_form_merges_and_drops() {
        let h = PauliHamiltonian::<f64>::from_labels(&[
            (0.5, "XZ"),
            (0.25, "XZ"),
            (1.0, "II"),
            (-1.0, "II"),
            (1e-16, "ZZ"),
        ])
        .unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.coefficient(&"XZ".parse().unwrap()), 0.75);
    }

    #[test]
    fn basis_expectations() {
        let z = PauliHamiltonian::<f64>::from_labels(&[(1.0, "Z")]).unwrap();
        let x = PauliHamiltonian::<f64>::from_labels(&[(1.0, "X")]).unwrap();
        let zero = StateVector::<f64>::basis(1, 0).unwrap();
        assert_eq!(z.expectation(&zero).unwrap(), 1.0);
        assert_eq!(x.expectation(&zero).unwrap(), 0.0);
        let rho = DensityMatrix::from_pure(&zero);
        assert_eq!(z.expectation(&rho).unwrap(), 1.0);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let z = PauliHamiltonian::<f64>::from_labels(&[(1.0, "ZZ")]).unwrap();
        let psi = StateVector::<f64>::basis(1, 0).unwrap();
        assert!(matches!(
            z.expectation(&psi),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dense_cap_enforced() {
        let h = PauliHamiltonian::<f64>::zero(13);
        assert!(matches!(h.to_dense_matrix(), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn partial_trace_keeps_x_and_kills_z() {
        let plus = DensityMatrix::<f64>::from_pure(&StateVector::plus());
        let zx = PauliHamiltonian::<f64>::from_labels(&[(1.0, "ZX")]).unwrap();
        let reduced = zx.weighted_partial_trace(&[0], &plus).unwrap();
        assert_eq!(reduced.n_qubits(), 1);
        assert_eq!(reduced.terms().len(), 1);
        assert!((reduced.coefficient(&"Z".parse().unwrap()) - 1.0).abs() < 1e-15);

        let zz = PauliHamiltonian::<f64>::from_labels(&[(1.0, "ZZ")]).unwrap();
        assert!(zz.weighted_partial_trace(&[0], &plus).unwrap().is_empty());
    }

    #[test]
    fn partial_trace_rejects_bad_partitions() {
        let h = PauliHamiltonian::<f64>::from_labels(&[(1.0, "ZZZ")]).unwrap();
        let one = DensityMatrix::<f64>::maximally_mixed(1);
        assert!(h.weighted_partial_trace(&[1, 0], &one).is_err());
        assert!(h.weighted_partial_trace(&[0, 1, 2], &one).is_err());
        assert!(h.weighted_partial_trace(&[0, 5], &one).is_err());
        // weight has the wrong size for a 2-qubit complement
        assert!(h.weighted_partial_trace(&[0], &one).is_err());
    }

    #[test]
    fn decompose_simple_matrices() {
        let id = DMatrix::<C<f64>>::identity(4, 4);
        let h = PauliHamiltonian::pauli_decompose(&id).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.coefficient(&"II".parse().unwrap()), 1.0);

        let z = Pauli::Z.matrix::<f64>();
        let h = PauliHamiltonian::pauli_decompose(&z).unwrap();
        assert_eq!(h.terms(), &[(1.0, "Z".parse().unwrap())]);
    }

    #[test]
    fn decompose_rejects_non_hermitian() {
        let mut m = DMatrix::<C<f64>>::zeros(2, 2);
        m[(0, 1)] = C::new(1.0, 0.0);
        assert!(matches!(
            PauliHamiltonian::pauli_decompose(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn enumerate_is_lexicographic() {
        let all: Vec<String> = PauliString::enumerate(1).map(|s| s.to_string()).collect();
        assert_eq!(all, ["I", "X", "Y", "Z"]);
        let two: Vec<String> = PauliString::enumerate(2).map(|s| s.to_string()).collect();
        assert_eq!(two[0], "II");
        assert_eq!(two[1], "IX");
        assert_eq!(two[4], "XI");
        assert_eq!(two.len(), 16);
    }

    #[test]
    fn invalid_labels() {
        assert!("ZQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
        assert!(PauliHamiltonian::<f64>::from_labels(&[(1.0, "Z"), (1.0, "ZZ")]).is_err());
    }
}
