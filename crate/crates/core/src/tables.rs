//! Delimited Pauli-coefficient tables indexed by bond distance.
//!
//! Format: optional `#` comment lines (a `# molecule: NAME` comment names the
//! table), a header whose first cell is `R` followed by Pauli labels, then one
//! row per bond distance. Cells are separated by commas, or by tabs when the
//! header contains a tab. Distances are in Angstrom, coefficients in Hartree.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pauli::{PauliHamiltonian, PauliString};
use crate::scalar::{real, Real};

/// Bundled LiH coefficients at 50 bond distances.
pub const LIH_STO6G: &str = include_str!("../data/lih_sto6g.csv");
/// Synthetic two-qubit table for structural H2 checks.
pub const H2_SYNTHETIC: &str = include_str!("../data/h2_synthetic.csv");

/// Coefficient jump between neighbouring rows that marks a discontinuity.
pub const DISCONTINUITY_THRESHOLD: f64 = 0.05;

const R_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub r: f64,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeTable {
    pub molecule_name: String,
    pub n_qubits: usize,
    pub pauli_labels: Vec<PauliString>,
    pub rows: Vec<TableRow>,
    /// Decimal places used when writing distances and coefficients.
    pub r_decimals: usize,
    pub coefficient_decimals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// Closest tabulated distance; ties go to the smaller one.
    Nearest,
    /// The distance must be tabulated.
    Exact,
}

fn decimals(cell: &str) -> usize {
    cell.split_once('.').map_or(0, |(_, frac)| {
        frac.chars().take_while(|c| c.is_ascii_digit()).count()
    })
}

fn table_err(line: usize, message: impl Into<String>) -> Error {
    Error::Table {
        line,
        message: message.into(),
    }
}

/// Parses and validates a table.
pub fn parse_table(source: &str) -> Result<MoleculeTable> {
    let mut name = String::from("unknown");
    let mut header_line = None;
    for (i, line) in source.lines().enumerate() {
        let t = line.trim();
        if let Some(comment) = t.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once(':') {
                if key.trim().eq_ignore_ascii_case("molecule") {
                    name = value.trim().to_string();
                }
            }
        } else if !t.is_empty() && header_line.is_none() {
            header_line = Some((i + 1, t.to_string()));
        }
    }
    let (_, header_text) = header_line.ok_or_else(|| table_err(0, "no header line"))?;
    let delimiter = if header_text.contains('\t') { b'\t' } else { b',' };

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .comment(Some(b'#'))
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source.as_bytes());

    let mut labels: Vec<PauliString> = Vec::new();
    let mut rows: Vec<TableRow> = Vec::new();
    let (mut r_dec, mut c_dec) = (0usize, 0usize);
    let mut seen_header = false;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            table_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if !seen_header {
            seen_header = true;
            if record.get(0) != Some("R") {
                return Err(table_err(line, "first header cell must be `R`"));
            }
            for (col, cell) in record.iter().enumerate().skip(1) {
                let s: PauliString = cell.parse().map_err(|e| {
                    table_err(line, format!("column {}: {e}", col + 1))
                })?;
                if let Some(first) = labels.first() {
                    if s.n_qubits() != first.n_qubits() {
                        return Err(table_err(
                            line,
                            format!("column {}: label {cell} has the wrong length", col + 1),
                        ));
                    }
                }
                if labels.contains(&s) {
                    return Err(table_err(line, format!("column {}: duplicate label {cell}", col + 1)));
                }
                labels.push(s);
            }
            if labels.is_empty() {
                return Err(table_err(line, "header has no Pauli labels"));
            }
            continue;
        }
        if record.len() != labels.len() + 1 {
            return Err(table_err(
                line,
                format!("expected {} cells, found {}", labels.len() + 1, record.len()),
            ));
        }
        let mut values = Vec::with_capacity(labels.len() + 1);
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| table_err(line, format!("column {}: {cell:?} is not a number", col + 1)))?;
            if col == 0 {
                r_dec = r_dec.max(decimals(cell));
            } else {
                c_dec = c_dec.max(decimals(cell));
            }
            values.push(v);
        }
        let r = values.remove(0);
        if let Some(prev) = rows.last() {
            if (r - prev.r).abs() < R_MATCH_TOL {
                return Err(table_err(line, format!("duplicate R {r}")));
            }
            if r < prev.r {
                return Err(table_err(line, format!("R {r} is not increasing")));
            }
        }
        rows.push(TableRow {
            r,
            coefficients: values,
        });
    }
    if rows.is_empty() {
        return Err(table_err(0, "table has no rows"));
    }
    Ok(MoleculeTable {
        molecule_name: name,
        n_qubits: labels[0].n_qubits(),
        pauli_labels: labels,
        rows,
        r_decimals: r_dec,
        coefficient_decimals: c_dec,
    })
}

impl MoleculeTable {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        parse_table(&text)
    }

    pub fn bundled_lih() -> Self {
        parse_table(LIH_STO6G).expect("bundled table is valid")
    }

    pub fn bundled_h2_synthetic() -> Self {
        parse_table(H2_SYNTHETIC).expect("bundled table is valid")
    }

    pub fn distances(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.r).collect()
    }

    /// Canonical comma-separated text with fixed decimals.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# molecule: {}", self.molecule_name);
        out.push('R');
        for l in &self.pauli_labels {
            let _ = write!(out, ",{l}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:.*}", self.r_decimals, row.r);
            for c in &row.coefficients {
                let _ = write!(out, ",{:.*}", self.coefficient_decimals, c);
            }
            out.push('\n');
        }
        out
    }

    /// Hamiltonian of row `index`.
    pub fn row_hamiltonian<T: Real>(&self, index: usize) -> Result<PauliHamiltonian<T>> {
        let row = &self.rows[index];
        PauliHamiltonian::from_terms(
            self.n_qubits,
            row.coefficients
                .iter()
                .zip(&self.pauli_labels)
                .map(|(&c, s)| (real::<T>(c), s.clone())),
        )
    }

    /// Index of the row selected for distance `r`.
    pub fn row_index(&self, r: f64, mode: Interpolation) -> Result<usize> {
        let (min, max) = (self.rows[0].r, self.rows[self.rows.len() - 1].r);
        match mode {
            Interpolation::Exact => self
                .rows
                .iter()
                .position(|row| (row.r - r).abs() < R_MATCH_TOL)
                .ok_or(Error::DistanceNotFound(r)),
            Interpolation::Nearest => {
                if r < min - R_MATCH_TOL || r > max + R_MATCH_TOL || !r.is_finite() {
                    return Err(Error::DistanceOutOfRange { r, min, max });
                }
                let mut best = 0;
                for (i, row) in self.rows.iter().enumerate() {
                    // strict comparison keeps the lower distance on ties
                    if (row.r - r).abs() < (self.rows[best].r - r).abs() - 1e-12 {
                        best = i;
                    }
                }
                Ok(best)
            }
        }
    }

    /// Hamiltonian at distance `r`.
    pub fn hamiltonian_at<T: Real>(&self, r: f64, mode: Interpolation) -> Result<PauliHamiltonian<T>> {
        self.row_hamiltonian(self.row_index(r, mode)?)
    }

    /// Distances whose non-identity coefficients move by more than
    /// [`DISCONTINUITY_THRESHOLD`] relative to the previous row.
    pub fn discontinuity_rows(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .filter(|w| {
                w[0].coefficients
                    .iter()
                    .zip(&w[1].coefficients)
                    .zip(&self.pauli_labels)
                    .filter(|(_, s)| !s.is_identity())
                    .any(|((a, b), _)| (a - b).abs() > DISCONTINUITY_THRESHOLD)
            })
            .map(|w| w[1].r)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_lih_shape() {
        let t = MoleculeTable::bundled_lih();
        assert_eq!(t.molecule_name, "LiH");
        assert_eq!(t.rows.len(), 50);
        assert_eq!(t.n_qubits, 3);
        let labels: Vec<String> = t.pauli_labels.iter().map(|s| s.to_string()).collect();
        assert_eq!(
            labels,
            ["III", "ZII", "IZI", "IIZ", "YYI", "XXI", "YIY", "XIX", "ZZI", "ZIZ", "IYY", "IXX", "IZZ"]
        );
        assert!((t.rows[0].r - 0.1).abs() < 1e-12);
        assert!((t.rows[49].r - 5.0).abs() < 1e-12);
    }

    #[test]
    fn bundled_values() {
        let t = MoleculeTable::bundled_lih();
        let h = t.hamiltonian_at::<f64>(0.7, Interpolation::Exact).unwrap();
        assert_eq!(h.coefficient(&"IZI".parse().unwrap()), -0.2332);
        let h = t.hamiltonian_at::<f64>(5.0, Interpolation::Exact).unwrap();
        assert_eq!(h.coefficient(&"YYI".parse().unwrap()), 0.0);
        let h = t.hamiltonian_at::<f64>(1.5, Interpolation::Exact).unwrap();
        assert_eq!(h.len(), 13);
        assert_eq!(h.coefficient(&"III".parse().unwrap()), -7.0632);
    }

    #[test]
    fn nearest_and_range() {
        let t = MoleculeTable::bundled_lih();
        assert_eq!(t.row_index(1.49, Interpolation::Nearest).unwrap(), t.row_index(1.5, Interpolation::Exact).unwrap());
        // halfway between 1.4 and 1.5 goes to the lower row
        let i = t.row_index(1.45, Interpolation::Nearest).unwrap();
        assert!((t.rows[i].r - 1.4).abs() < 1e-12);
        assert!(matches!(
            t.hamiltonian_at::<f64>(9.0, Interpolation::Nearest),
            Err(Error::DistanceOutOfRange { .. })
        ));
        assert!(matches!(
            t.hamiltonian_at::<f64>(1.49, Interpolation::Exact),
            Err(Error::DistanceNotFound(_))
        ));
    }

    #[test]
    fn toy_tables() {
        let ok = parse_table("R,I,Z\n0.5,1.0,2.0\n0.6,1.5,-2.0\n").unwrap();
        assert_eq!(ok.rows.len(), 2);
        assert_eq!(ok.n_qubits, 1);
        match parse_table("R,Z,Q\n0.5,1.0,2.0\n") {
            Err(Error::Table { line: 1, message }) => assert!(message.contains("column 3"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn error_lines() {
        let cases = [
            ("# c\nR,ZZ\n0.5,1.0\n0.5,2.0\n", 4, "duplicate"),
            ("R,ZZ\n0.5,1.0\n0.4,2.0\n", 3, "increasing"),
            ("R,ZZ,XX\n0.5,1.0\n", 2, "expected 3"),
            ("R,ZZ\n0.5,abc\n", 2, "not a number"),
            ("R,ZZ,X\n", 1, "wrong length"),
            ("Q,ZZ\n0.5,1\n", 1, "first header"),
        ];
        for (text, line, needle) in cases {
            match parse_table(text) {
                Err(Error::Table { line: l, message }) => {
                    assert_eq!(l, line, "{text:?}");
                    assert!(message.contains(needle), "{message}");
                }
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn tab_delimited_and_directive() {
        let t = parse_table("# molecule: H2\nR\tII\tZI\n0.70\t-0.5\t0.25\n").unwrap();
        assert_eq!(t.molecule_name, "H2");
        assert_eq!(t.rows[0].coefficients, vec![-0.5, 0.25]);
        assert_eq!(t.r_decimals, 2);
    }

    #[test]
    fn bundled_round_trip() {
        assert_eq!(MoleculeTable::bundled_lih().serialize(), LIH_STO6G);
        assert_eq!(MoleculeTable::bundled_h2_synthetic().serialize(), H2_SYNTHETIC);
    }

    #[test]
    fn discontinuities_are_the_last_two_rows() {
        let flagged = MoleculeTable::bundled_lih().discontinuity_rows();
        assert_eq!(flagged.len(), 2);
        assert!((flagged[0] - 4.9).abs() < 1e-12);
        assert!((flagged[1] - 5.0).abs() < 1e-12);
    }
}
