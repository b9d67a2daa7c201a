//! Reference implementations that share no code with the library: dense
//! Kronecker products, a real-symmetric embedding for Hermitian spectra and
//! a plain-text reader for the bundled table.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use nalgebra::Complex;

pub type Complex64 = Complex<f64>;

pub type CMat = DMatrix<Complex64>;

pub const LIH_TABLE: &str = include_str!("../../data/lih_sto6g.csv");

/// Ground and first excited energies of the LiH rows, from an independent
/// dense diagonalization.
pub const LIH_LEVELS: [(f64, f64, f64); 6] = [
    (0.5, -7.122269807905914, -6.808343578983173),
    (1.0, -7.859708437377939, -7.3745840474579705),
    (1.5, -7.954370067642635, -7.465855131807604),
    (2.0, -7.921516355694301, -7.451789548022329),
    (3.0, -7.8087907517867325, -7.416043587104154),
    (4.0, -7.814775622946407, -7.491626821191746),
];

/// `<100|H|100>` at R = 1.5.
pub const LIH_HF_ENERGY_1_5: f64 = -7.9534;

pub const H2_SYNTHETIC_LEVELS: [f64; 4] = [-1.3, -0.6472135954999579, -0.3, 0.2472135954999579];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(letter: char) -> CMat {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match letter {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        other => panic!("not a Pauli letter: {other}"),
    }
}

/// Leftmost letter is the most significant tensor factor.
pub fn kron_label(label: &str) -> CMat {
    label
        .chars()
        .fold(DMatrix::from_element(1, 1, c(1.0, 0.0)), |acc, l| acc.kronecker(&pauli(l)))
}

pub fn dense(terms: &[(f64, String)]) -> CMat {
    let n = terms[0].1.len();
    let mut m = DMatrix::zeros(1 << n, 1 << n);
    for (coef, label) in terms {
        m += kron_label(label) * c(*coef, 0.0);
    }
    m
}

/// `(R, [(coefficient, label)])` for every row of the bundled LiH table.
pub fn lih_rows() -> Vec<(f64, Vec<(f64, String)>)> {
    let mut lines = LIH_TABLE.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| {
            let cells: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            let terms = header[1..]
                .iter()
                .zip(&cells[1..])
                .map(|(lab, v)| (*v, lab.to_string()))
                .collect();
            (cells[0], terms)
        })
        .collect()
}

pub fn lih_row(r: f64) -> Vec<(f64, String)> {
    lih_rows()
        .into_iter()
        .find(|(x, _)| (x - r).abs() < 1e-9)
        .map(|(_, t)| t)
        .expect("tabulated distance")
}

/// Eigenvalues (ascending) and matching eigenvectors of a Hermitian matrix
/// through the real symmetric embedding `[[Re, -Im], [Im, Re]]`, whose
/// spectrum is the original one with every level doubled.
pub fn eigh(m: &CMat) -> (Vec<f64>, Vec<DVector<Complex64>>) {
    let n = m.nrows();
    let mut big = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            big[(i, j)] = z.re;
            big[(i + n, j + n)] = z.re;
            big[(i, j + n)] = -z.im;
            big[(i + n, j)] = z.im;
        }
    }
    let eig = big.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for pair in order.chunks(2) {
        let k = pair[0];
        values.push(eig.eigenvalues[k]);
        let col = eig.eigenvectors.column(k);
        let v = DVector::from_fn(n, |i, _| c(col[i], col[i + n]));
        vectors.push(v.normalize());
    }
    (values, vectors)
}

pub fn eigenvalues(m: &CMat) -> Vec<f64> {
    eigh(m).0
}

/// `Tr_b((I_a (x) rho_b) H)` by explicit index bookkeeping. `keep` lists the
/// qubits of `a` in ascending order; `rho` acts on the rest in ascending order.
pub fn dense_partial_trace(h: &CMat, n: usize, keep: &[usize], rho: &CMat) -> CMat {
    let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let compose = |a: usize, b: usize| {
        let mut idx = 0usize;
        for (k, &q) in keep.iter().enumerate() {
            if (a >> (keep.len() - 1 - k)) & 1 == 1 {
                idx |= 1 << (n - 1 - q);
            }
        }
        for (k, &q) in rest.iter().enumerate() {
            if (b >> (rest.len() - 1 - k)) & 1 == 1 {
                idx |= 1 << (n - 1 - q);
            }
        }
        idx
    };
    let da = 1 << keep.len();
    let db = 1 << rest.len();
    DMatrix::from_fn(da, da, |x, y| {
        let mut acc = c(0.0, 0.0);
        for b in 0..db {
            for b2 in 0..db {
                acc += rho[(b, b2)] * h[(compose(x, b2), compose(y, b))];
            }
        }
        acc
    })
}

/// Central-difference derivative of a state-valued function.
pub fn central_difference<F>(f: F, theta: &[f64], i: usize, step: f64) -> DVector<Complex64>
where
    F: Fn(&[f64]) -> DVector<Complex64>,
{
    let mut plus = theta.to_vec();
    let mut minus = theta.to_vec();
    plus[i] += step;
    minus[i] -= step;
    (f(&plus) - f(&minus)) / c(2.0 * step, 0.0)
}

pub fn gershgorin_upper(m: &CMat) -> f64 {
    (0..m.nrows())
        .map(|i| {
            let radius: f64 = (0..m.ncols()).filter(|&j| j != i).map(|j| m[(i, j)].norm()).sum();
            m[(i, i)].re + radius
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
