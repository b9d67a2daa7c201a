//! Exact diagonalization, Gershgorin bounds and the ground-state lift used
//! to target the first excited level.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::pauli::{hermitian_deviation, PauliHamiltonian};
use crate::scalar::{abs, cabs, cplx, real, to_f64, tol, Real, C};
use crate::simulator::{DensityMatrix, StateVector};

/// Levels closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult<T: Real> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Column `n` belongs to `eigenvalues[n]`.
    pub eigenvectors: DMatrix<C<T>>,
    /// Level shares its energy with a neighbour.
    pub degeneracy_flags: Vec<bool>,
}

impl<T: Real> SpectrumResult<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn state(&self, n: usize) -> StateVector<T> {
        StateVector::from_amplitudes(self.eigenvectors.column(n).into_owned())
            .expect("eigenvectors are normalized")
    }

    pub fn ground_energy(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn ground_state(&self) -> StateVector<T> {
        self.state(0)
    }

    pub fn ground_is_degenerate(&self) -> bool {
        self.degeneracy_flags[0]
    }

    pub fn ground_projector(&self) -> DensityMatrix<T> {
        DensityMatrix::from_pure(&self.ground_state())
    }
}

/// Full spectrum of a Pauli Hamiltonian.
pub fn exact_spectrum<T: Real>(h: &PauliHamiltonian<T>) -> Result<SpectrumResult<T>> {
    exact_spectrum_dense(&h.to_dense_matrix()?)
}

/// Full spectrum of a Hermitian matrix. Each eigenvector has its
/// largest-magnitude entry real and positive; inside a degenerate level the
/// basis is fixed by projecting `e_0, e_1, ...` and orthonormalizing.
pub fn exact_spectrum_dense<T: Real>(m: &DMatrix<C<T>>) -> Result<SpectrumResult<T>> {
    let dev = hermitian_deviation(m);
    if dev > tol::<T>(1e-9) {
        return Err(Error::NotHermitian {
            deviation: to_f64(dev),
        });
    }
    let dim = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<T> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(dim, dim);
    for (n, &k) in order.iter().enumerate() {
        vectors.set_column(n, &eig.eigenvectors.column(k));
    }

    let gap = tol::<T>(DEGENERACY_TOL);
    let mut flags = vec![false; dim];
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && eigenvalues[end] - eigenvalues[end - 1] < gap {
            end += 1;
        }
        if end - start > 1 {
            flags[start..end].iter_mut().for_each(|f| *f = true);
            let block = vectors.columns(start, end - start).into_owned();
            let canon = canonical_basis(&block);
            vectors.columns_mut(start, end - start).copy_from(&canon);
        }
        start = end;
    }
    for n in 0..dim {
        let mut col = vectors.column(n).into_owned();
        normalize_phase(&mut col);
        vectors.set_column(n, &col);
    }
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors: vectors,
        degeneracy_flags: flags,
    })
}

/// Multiplies `v` by the phase that makes its largest entry real-positive.
/// The earliest index wins among entries of equal magnitude.
pub fn normalize_phase<T: Real>(v: &mut DVector<C<T>>) {
    let eps = tol::<T>(1e-12);
    let mut best = 0;
    let mut best_mag = T::zero();
    for (i, z) in v.iter().enumerate() {
        let mag = cabs(*z);
        if mag > best_mag + eps {
            best = i;
            best_mag = mag;
        }
    }
    if best_mag > T::zero() {
        let phase = v[best].conj().unscale(best_mag);
        *v *= phase;
    }
}

/// Deterministic orthonormal basis of the span of `block`'s columns.
fn canonical_basis<T: Real>(block: &DMatrix<C<T>>) -> DMatrix<C<T>> {
    let (dim, k) = block.shape();
    let projector = block * block.adjoint();
    let mut out: Vec<DVector<C<T>>> = Vec::with_capacity(k);
    for e in 0..dim {
        if out.len() == k {
            break;
        }
        let mut v = projector.column(e).into_owned();
        for u in &out {
            let c = u.dotc(&v);
            v -= u * c;
        }
        let norm = v.norm();
        if norm > real::<T>(1e-6) {
            out.push(v.unscale(norm));
        }
    }
    DMatrix::from_columns(&out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GershgorinBound<T: Real> {
    /// `(center, radius)` per row.
    pub discs: Vec<(T, T)>,
    pub e_max: T,
}

impl<T: Real> GershgorinBound<T> {
    /// Whether `lambda` lies in the union of the closed discs.
    pub fn contains(&self, lambda: T) -> bool {
        let slack = tol::<T>(1e-12);
        self.discs
            .iter()
            .any(|&(c, r)| abs(lambda - c) <= r + slack)
    }

    pub fn e_min(&self) -> T {
        self.discs
            .iter()
            .map(|&(c, r)| c - r)
            .fold(T::max_value().unwrap(), |m, x| if x < m { x } else { m })
    }
}

/// Row discs of a Hermitian matrix and the resulting upper bound.
pub fn gershgorin_emax<T: Real>(m: &DMatrix<C<T>>) -> Result<GershgorinBound<T>> {
    let dev = hermitian_deviation(m);
    if dev > tol::<T>(1e-9) {
        return Err(Error::NotHermitian {
            deviation: to_f64(dev),
        });
    }
    let discs: Vec<(T, T)> = (0..m.nrows())
        .map(|i| {
            let radius = (0..m.ncols())
                .filter(|&j| j != i)
                .fold(T::zero(), |acc, j| acc + cabs(m[(i, j)]));
            (m[(i, i)].re, radius)
        })
        .collect();
    let e_max = discs
        .iter()
        .map(|&(c, r)| c + r)
        .fold(T::min_value().unwrap(), |m, x| if x > m { x } else { m });
    Ok(GershgorinBound { discs, e_max })
}

/// Looser bound `h_I + sum_{l != I} |h_l|` read off the Pauli coefficients
/// alone; avoids the dense matrix for large registers.
pub fn pauli_emax<T: Real>(h: &PauliHamiltonian<T>) -> T {
    h.terms().iter().fold(T::zero(), |acc, (c, s)| {
        if s.is_identity() {
            acc + *c
        } else {
            acc + abs(*c)
        }
    })
}

/// `H' = H + (e_max - E_0) rho_g` with `E_0 = Tr(rho_g H)`, returned in Pauli
/// form. With the exact ground projector the old first excited level becomes
/// the ground level of `H'`.
pub fn lift_ground_state<T: Real>(
    h: &PauliHamiltonian<T>,
    ground: &DensityMatrix<T>,
    e_max: T,
) -> Result<PauliHamiltonian<T>> {
    let e0 = h.expectation(ground)?;
    if e_max < e0 {
        return Err(Error::BoundBelowGround {
            e_max: to_f64(e_max),
            ground: to_f64(e0),
        });
    }
    let shift = cplx(e_max - e0, T::zero());
    let lifted = h.to_dense_matrix()? + ground.elements() * shift;
    PauliHamiltonian::pauli_decompose(&lifted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(values: &[f64]) -> DMatrix<C<f64>> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            values.len(),
            values.iter().map(|&v| C::new(v, 0.0)),
        ))
    }

    #[test]
    fn z_and_x_spectra() {
        let z = PauliHamiltonian::<f64>::from_labels(&[(1.0, "Z")]).unwrap();
        let s = exact_spectrum(&z).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 1.0]);

        let x = PauliHamiltonian::<f64>::from_labels(&[(1.0, "X")]).unwrap();
        let s = exact_spectrum(&x).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let minus = DVector::from_vec(vec![C::new(h, 0.0), C::new(-h, 0.0)]);
        assert!((s.eigenvectors.column(0) - minus).norm() < 1e-12);
        assert_eq!(s.degeneracy_flags, vec![false, false]);
    }

    #[test]
    fn eigenpairs_satisfy_definition() {
        let h = PauliHamiltonian::<f64>::from_labels(&[
            (0.3, "XZY"),
            (-0.8, "ZZI"),
            (0.4, "IYY"),
            (0.1, "XII"),
        ])
        .unwrap();
        let m = h.to_dense_matrix().unwrap();
        let s = exact_spectrum(&h).unwrap();
        for n in 0..s.len() {
            let v = s.eigenvectors.column(n);
            let r = &m * v - v * C::new(s.eigenvalues[n], 0.0);
            assert!(r.norm() < 1e-9);
        }
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn degenerate_levels_are_canonical() {
        let h = PauliHamiltonian::<f64>::from_labels(&[(1.0, "ZI")]).unwrap();
        let s = exact_spectrum(&h).unwrap();
        assert!(s.degeneracy_flags.iter().all(|&f| f));
        // the -1 level is spanned by |10>, |11>; canonical basis picks them in order
        assert!((s.eigenvectors[(2, 0)] - C::new(1.0, 0.0)).norm() < 1e-12);
        assert!((s.eigenvectors[(3, 1)] - C::new(1.0, 0.0)).norm() < 1e-12);
        assert!(s.ground_is_degenerate());
    }

    #[test]
    fn gershgorin_examples() {
        let g = gershgorin_emax(&diag(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(g.e_max, 3.0);
        assert!(g.discs.iter().all(|&(_, r)| r == 0.0));

        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(2.0, 0.0)],
        );
        let g = gershgorin_emax(&m).unwrap();
        assert_eq!(g.e_max, 3.0);
        let top = exact_spectrum_dense(&m).unwrap().eigenvalues[1];
        assert!((top - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!(g.e_max >= top);
        assert!(g.contains(top));

        let mut bad = m.clone();
        bad[(0, 1)] = C::new(5.0, 0.0);
        assert!(gershgorin_emax(&bad).is_err());
    }

    #[test]
    fn pauli_bound_is_looser() {
        let h = PauliHamiltonian::<f64>::from_labels(&[
            (-1.0, "II"),
            (0.5, "ZI"),
            (0.25, "XX"),
        ])
        .unwrap();
        let dense = gershgorin_emax(&h.to_dense_matrix().unwrap()).unwrap();
        assert!(pauli_emax(&h) >= dense.e_max - 1e-12);
        assert!((pauli_emax(&h) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn lift_collapses_z() {
        let z = PauliHamiltonian::<f64>::from_labels(&[(1.0, "Z")]).unwrap();
        let ground = DensityMatrix::from_pure(&StateVector::basis(1, 1).unwrap());
        let lifted = lift_ground_state(&z, &ground, 1.0).unwrap();
        assert_eq!(lifted.terms().len(), 1);
        assert!((lifted.coefficient(&"I".parse().unwrap()) - 1.0).abs() < 1e-12);
        let s = exact_spectrum(&lifted).unwrap();
        assert!(s.degeneracy_flags.iter().all(|&f| f));
    }

    #[test]
    fn lift_diagonal_bookkeeping() {
        let h = PauliHamiltonian::pauli_decompose(&diag(&[0.0, 1.0, 2.0, 3.0])).unwrap();
        let s = exact_spectrum(&h).unwrap();
        let lifted = lift_ground_state(&h, &s.ground_projector(), 3.0).unwrap();
        let t = exact_spectrum(&lifted).unwrap();
        for (a, b) in t.eigenvalues.iter().zip([1.0, 2.0, 3.0, 3.0]) {
            assert!((a - b).abs() < 1e-9);
        }
        let overlap = t.ground_state().inner(&s.state(1)).unwrap().norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        assert!(matches!(
            lift_ground_state(&h, &s.ground_projector(), -1.0),
            Err(Error::BoundBelowGround { .. })
        ));
    }
}
