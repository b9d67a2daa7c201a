//! One-layer cluster mean-field reduction of a three-qubit Hamiltonian to a
//! two-qubit effective Hamiltonian, with the isometry that maps reduced
//! states back.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::pauli::{bit_of, complement_of, PauliHamiltonian};
use crate::scalar::{abs, real, to_f64, tol, Real, C};
use crate::simulator::{DensityMatrix, StateVector};
use crate::spectra::{exact_spectrum, SpectrumResult};

/// Candidates whose residual norm falls below this are linearly dependent.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct CmfPartition<T: Real> {
    pub subsystem_a: Vec<usize>,
    pub subsystem_b: Vec<usize>,
    pub initial_rho_b: DensityMatrix<T>,
}

impl<T: Real> CmfPartition<T> {
    /// Splits a three-qubit register into a two-qubit `a` and one-qubit `b`.
    pub fn new(n_qubits: usize, subsystem_a: Vec<usize>, initial_rho_b: DensityMatrix<T>) -> Result<Self> {
        if n_qubits != 3 || subsystem_a.len() != 2 {
            return Err(Error::Partition(format!(
                "only a two-plus-one split of three qubits is supported, got {subsystem_a:?} of {n_qubits}"
            )));
        }
        let subsystem_b = complement_of(n_qubits, &subsystem_a)?;
        if initial_rho_b.n_qubits() != subsystem_b.len() {
            return Err(Error::Partition(format!(
                "initial b state acts on {} qubits, b has {}",
                initial_rho_b.n_qubits(),
                subsystem_b.len()
            )));
        }
        Ok(Self {
            subsystem_a,
            subsystem_b,
            initial_rho_b,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.subsystem_a.len() + self.subsystem_b.len()
    }
}

/// `a = {q0, q1}`, `b = {q2}` starting from `(I + X)/2`.
impl<T: Real> Default for CmfPartition<T> {
    fn default() -> Self {
        Self::new(3, vec![0, 1], DensityMatrix::from_pure(&StateVector::plus()))
            .expect("static partition")
    }
}

/// Audit trail of the basis selection.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRecord {
    pub subsystem_a: Vec<usize>,
    pub subsystem_b: Vec<usize>,
    pub a0_energies: Vec<f64>,
    pub b_energies: Vec<f64>,
    pub candidate_energies: Vec<f64>,
    /// Candidate indices in Gram-Schmidt order; `4..` are fallbacks.
    pub gram_order: Vec<usize>,
    pub fallbacks_used: usize,
    pub rank: usize,
    pub degenerate_steps: Vec<String>,
}

impl fmt::Display for SelectionRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<D: fmt::Display>(v: &[D]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        fn energies(v: &[f64]) -> String {
            v.iter().map(|x| format!("{x:.12e}")).collect::<Vec<_>>().join(",")
        }
        writeln!(f, "subsystem_a={}", list(&self.subsystem_a))?;
        writeln!(f, "subsystem_b={}", list(&self.subsystem_b))?;
        writeln!(f, "a0_energies={}", energies(&self.a0_energies))?;
        writeln!(f, "b_energies={}", energies(&self.b_energies))?;
        writeln!(f, "candidate_energies={}", energies(&self.candidate_energies))?;
        writeln!(f, "gram_order={}", list(&self.gram_order))?;
        writeln!(f, "fallbacks_used={}", self.fallbacks_used)?;
        writeln!(f, "rank={}", self.rank)?;
        writeln!(f, "degenerate_steps={}", self.degenerate_steps.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian<T: Real> {
    pub h_eff: PauliHamiltonian<T>,
    /// The three-qubit Hamiltonian that was reduced.
    pub original: PauliHamiltonian<T>,
    /// `8 x 4`, orthonormal columns.
    pub isometry: DMatrix<C<T>>,
    pub partition: CmfPartition<T>,
    pub record: SelectionRecord,
}

impl<T: Real> EffectiveHamiltonian<T> {
    pub fn n_qubits(&self) -> usize {
        self.h_eff.n_qubits()
    }
}

/// Product state with `a` on `a_qubits` and `b` on `b_qubits`.
fn embed<T: Real>(
    n: usize,
    a_qubits: &[usize],
    a: &DVector<C<T>>,
    b_qubits: &[usize],
    b: &DVector<C<T>>,
) -> DVector<C<T>> {
    let sub_index = |x: usize, qs: &[usize]| {
        qs.iter()
            .fold(0usize, |acc, &q| (acc << 1) | bit_of(x, n, q))
    };
    DVector::from_iterator(
        1 << n,
        (0..1usize << n).map(|x| a[sub_index(x, a_qubits)] * b[sub_index(x, b_qubits)]),
    )
}

fn mean_energy<T: Real>(h: &DMatrix<C<T>>, v: &DVector<C<T>>) -> T {
    v.dotc(&(h * v)).re
}

/// Ascending energy, then lexicographic on `(re, im)` of the coefficients.
fn candidate_order<T: Real>(a: &(T, DVector<C<T>>), b: &(T, DVector<C<T>>)) -> Ordering {
    let cmp = |x: T, y: T| x.partial_cmp(&y).unwrap_or(Ordering::Equal);
    if abs(a.0 - b.0) > tol::<T>(1e-12) {
        return cmp(a.0, b.0);
    }
    a.1.iter()
        .zip(b.1.iter())
        .map(|(x, y)| cmp(x.re, y.re).then(cmp(x.im, y.im)))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

fn note_degeneracy<T: Real>(s: &SpectrumResult<T>, levels: usize, step: String, notes: &mut Vec<String>) {
    // a tie across the selection boundary is what makes the choice arbitrary
    let upto = levels.min(s.len() - 1);
    if s.degeneracy_flags[..=upto].iter().any(|&f| f) {
        notes.push(step);
    }
}

/// Layered mean-field basis selection followed by projection of `h`.
pub fn cmf_reduce<T: Real>(
    h: &PauliHamiltonian<T>,
    partition: &CmfPartition<T>,
) -> Result<EffectiveHamiltonian<T>> {
    let n = partition.n_qubits();
    if h.n_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: h.n_qubits(),
        });
    }
    let (qa, qb) = (&partition.subsystem_a, &partition.subsystem_b);
    let full = h.to_dense_matrix()?;
    let mut notes = Vec::new();

    let ha0 = exact_spectrum(&h.weighted_partial_trace(qa, &partition.initial_rho_b)?)?;
    note_degeneracy(&ha0, 2, "a0".into(), &mut notes);

    let mut b_states = Vec::with_capacity(4);
    let mut b_energies = Vec::with_capacity(4);
    for i in 0..2 {
        let rho_a = DensityMatrix::from_pure(&ha0.state(i));
        let hb = exact_spectrum(&h.weighted_partial_trace(qb, &rho_a)?)?;
        note_degeneracy(&hb, 2, format!("b|a{i}"), &mut notes);
        for j in 0..2 {
            b_states.push(hb.state(j));
            b_energies.push(to_f64(hb.eigenvalues[j]));
        }
    }

    let mut primary = Vec::with_capacity(4);
    let mut fallback = Vec::with_capacity(4);
    for (j, b) in b_states.iter().enumerate() {
        let ha1 = exact_spectrum(&h.weighted_partial_trace(qa, &DensityMatrix::from_pure(b))?)?;
        note_degeneracy(&ha1, 2, format!("a1|b{j}"), &mut notes);
        for (level, pool) in [(0, &mut primary), (1, &mut fallback)] {
            let v = embed(n, qa, ha1.state(level).amplitudes(), qb, b.amplitudes());
            pool.push((mean_energy(&full, &v), v));
        }
    }
    let candidate_energies = primary.iter().map(|(e, _)| to_f64(*e)).collect();

    let mut order: Vec<usize> = (0..primary.len()).collect();
    order.sort_by(|&x, &y| candidate_order(&primary[x], &primary[y]));
    let mut fb_order: Vec<usize> = (0..fallback.len()).collect();
    fb_order.sort_by(|&x, &y| candidate_order(&fallback[x], &fallback[y]));

    let target = 1usize << qa.len();
    let mut basis: Vec<DVector<C<T>>> = Vec::with_capacity(target);
    let mut gram_order = Vec::with_capacity(target);
    let mut fallbacks_used = 0;
    let queue = order
        .iter()
        .map(|&i| (i, &primary[i].1))
        .chain(fb_order.iter().map(|&i| (i + primary.len(), &fallback[i].1)));
    for (tag, v) in queue {
        if basis.len() == target {
            break;
        }
        let mut x = v.clone();
        for q in &basis {
            let c = q.dotc(&x);
            x -= q * c;
        }
        let norm = x.norm();
        if norm > real::<T>(RANK_TOL) {
            basis.push(x.unscale(norm));
            gram_order.push(tag);
            if tag >= primary.len() {
                fallbacks_used += 1;
            }
        }
    }
    if basis.len() < target {
        return Err(Error::RankDeficient(basis.len()));
    }

    let isometry = DMatrix::from_columns(&basis);
    let projected = isometry.adjoint() * &full * &isometry;
    let projected = (&projected + projected.adjoint()) * C::new(real::<T>(0.5), T::zero());
    let h_eff = PauliHamiltonian::pauli_decompose(&projected)?;

    Ok(EffectiveHamiltonian {
        h_eff,
        original: h.clone(),
        isometry,
        partition: partition.clone(),
        record: SelectionRecord {
            subsystem_a: qa.clone(),
            subsystem_b: qb.clone(),
            a0_energies: ha0.eigenvalues[..2].iter().map(|&e| to_f64(e)).collect(),
            b_energies,
            candidate_energies,
            gram_order,
            fallbacks_used,
            rank: basis.len(),
            degenerate_steps: notes,
        },
    })
}

/// `Q rho Q^dagger`.
pub fn lift_state<T: Real>(
    e: &EffectiveHamiltonian<T>,
    reduced: &DensityMatrix<T>,
) -> Result<DensityMatrix<T>> {
    if reduced.dim() != e.isometry.ncols() {
        return Err(Error::DimensionMismatch {
            expected: e.isometry.ncols(),
            actual: reduced.dim(),
        });
    }
    let q = &e.isometry;
    DensityMatrix::from_matrix(q * reduced.elements() * q.adjoint())
}

/// `Q |phi>`.
pub fn lift_pure<T: Real>(e: &EffectiveHamiltonian<T>, reduced: &StateVector<T>) -> Result<StateVector<T>> {
    if reduced.dim() != e.isometry.ncols() {
        return Err(Error::DimensionMismatch {
            expected: e.isometry.ncols(),
            actual: reduced.dim(),
        });
    }
    StateVector::normalized(&e.isometry * reduced.amplitudes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::exact_spectrum_dense;

    fn sample() -> PauliHamiltonian<f64> {
        PauliHamiltonian::from_labels(&[
            (-7.0, "III"),
            (0.06, "ZII"),
            (-0.29, "IZI"),
            (-0.32, "IIZ"),
            (0.006, "XXI"),
            (0.006, "YYI"),
            (0.012, "XIX"),
            (0.012, "YIY"),
            (0.22, "ZZI"),
            (0.26, "ZIZ"),
            (0.02, "IXX"),
            (0.02, "IYY"),
            (0.26, "IZZ"),
        ])
        .unwrap()
    }

    #[test]
    fn isometry_is_orthonormal_and_projects() {
        let h = sample();
        let e = cmf_reduce(&h, &CmfPartition::default()).unwrap();
        let q = &e.isometry;
        assert_eq!(q.shape(), (8, 4));
        assert!((q.adjoint() * q - DMatrix::identity(4, 4)).camax() < 1e-10);
        let proj = q.adjoint() * h.to_dense_matrix().unwrap() * q;
        assert!((e.h_eff.to_dense_matrix().unwrap() - proj).camax() < 1e-9);
        assert_eq!(e.record.rank, 4);
    }

    #[test]
    fn product_hamiltonian_is_reproduced() {
        // H_a (x) I + 0.7 I (x) X: mean field is exact
        let h = PauliHamiltonian::<f64>::from_labels(&[
            (0.4, "ZII"),
            (-0.9, "IZI"),
            (0.3, "XXI"),
            (0.2, "ZZI"),
            (0.7, "IIX"),
        ])
        .unwrap();
        let e = cmf_reduce(&h, &CmfPartition::default()).unwrap();
        let full = exact_spectrum(&h).unwrap();
        let eff = exact_spectrum(&e.h_eff).unwrap();
        for k in 0..2 {
            assert!((full.eigenvalues[k] - eff.eigenvalues[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn lifting_reduced_states() {
        let h = sample();
        let e = cmf_reduce(&h, &CmfPartition::default()).unwrap();
        let first = DensityMatrix::from_pure(&StateVector::basis(2, 0).unwrap());
        let lifted = lift_state(&e, &first).unwrap();
        let col = e.isometry.column(0).into_owned();
        assert!((lifted.elements() - &col * col.adjoint()).camax() < 1e-12);

        let mixed = lift_state(&e, &DensityMatrix::maximally_mixed(2)).unwrap();
        assert!((mixed.trace() - 1.0).abs() < 1e-10);
        let ranks = exact_spectrum_dense(mixed.elements())
            .unwrap()
            .eigenvalues
            .iter()
            .filter(|&&l| l > 1e-9)
            .count();
        assert_eq!(ranks, 4);

        let eff = exact_spectrum(&e.h_eff).unwrap();
        let g = lift_state(&e, &eff.ground_projector()).unwrap();
        assert!((h.expectation(&g).unwrap() - eff.ground_energy()).abs() < 1e-10);
        assert!(lift_state(&e, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn reduction_is_deterministic() {
        let h = sample();
        let a = cmf_reduce(&h, &CmfPartition::default()).unwrap();
        let b = cmf_reduce(&h, &CmfPartition::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.record.to_string(), b.record.to_string());
        assert!(a.record.to_string().contains("gram_order="));
    }

    #[test]
    fn partition_validation() {
        let rho = DensityMatrix::<f64>::maximally_mixed(1);
        assert!(CmfPartition::new(3, vec![0, 2], rho.clone()).is_ok());
        assert!(CmfPartition::new(3, vec![0], rho.clone()).is_err());
        assert!(CmfPartition::new(4, vec![0, 1], rho.clone()).is_err());
        assert!(CmfPartition::new(3, vec![1, 0], rho).is_err());
        let two = PauliHamiltonian::<f64>::from_labels(&[(1.0, "ZZ")]).unwrap();
        assert!(cmf_reduce(&two, &CmfPartition::default()).is_err());
    }

    #[test]
    fn non_default_split_embeds_correctly() {
        let h = sample();
        let p = CmfPartition::new(3, vec![0, 2], DensityMatrix::from_pure(&StateVector::plus())).unwrap();
        let e = cmf_reduce(&h, &p).unwrap();
        let q = &e.isometry;
        assert!((q.adjoint() * q - DMatrix::identity(4, 4)).camax() < 1e-10);
        let full = exact_spectrum(&h).unwrap();
        let eff = exact_spectrum(&e.h_eff).unwrap();
        assert!(eff.ground_energy() >= full.ground_energy() - 1e-12);
    }
}
