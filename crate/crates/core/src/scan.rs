//! Bond-distance scans: manifest validation, per-point runs and CSV output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::ansatz::AnsatzKind;
use crate::cmf::{cmf_reduce, CmfPartition, SelectionRecord};
use crate::engine::{run_qite, DtauRule, QiteConfig, QiteTrajectory};
use crate::error::{Error, Result};
use crate::mclachlan::Route;
use crate::pauli::PauliHamiltonian;
use crate::simulator::{DensityMatrix, Shots, StateVector};
use crate::spectra::{exact_spectrum, gershgorin_emax, lift_ground_state};
use crate::tables::{Interpolation, MoleculeTable};

/// Where the coefficient table comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TableSource {
    Path(PathBuf),
    BundledLih,
    BundledH2Synthetic,
}

impl TableSource {
    /// `bundled:lih`, `bundled:h2-synthetic`, or a file path.
    pub fn parse(text: &str) -> Self {
        match text {
            "bundled:lih" => TableSource::BundledLih,
            "bundled:h2-synthetic" => TableSource::BundledH2Synthetic,
            path => TableSource::Path(PathBuf::from(path)),
        }
    }

    pub fn load(&self) -> Result<MoleculeTable> {
        match self {
            TableSource::Path(p) => MoleculeTable::load(p),
            TableSource::BundledLih => Ok(MoleculeTable::bundled_lih()),
            TableSource::BundledH2Synthetic => Ok(MoleculeTable::bundled_h2_synthetic()),
        }
    }
}

impl std::fmt::Display for TableSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TableSource::Path(p) => write!(f, "{}", p.display()),
            TableSource::BundledLih => write!(f, "bundled:lih"),
            TableSource::BundledH2Synthetic => write!(f, "bundled:h2-synthetic"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RSelection {
    All,
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub table: TableSource,
    pub ansatz: AnsatzKind,
    pub cmf: bool,
    /// Subsystem `a` of the reduction; `b` is its complement.
    pub cmf_subsystem_a: Vec<usize>,
    pub r_selection: RSelection,
    pub interpolation: Interpolation,
    pub iterations: usize,
    pub dtau_rule: DtauRule,
    /// Shot count for the sampled route; `None` is the exact route.
    pub shots: Option<u64>,
    pub seed: u64,
    /// Defaults per ansatz when absent.
    pub theta0: Option<Vec<f64>>,
    pub record_intermediate: bool,
    pub parallel: bool,
}

impl RunManifest {
    pub fn new(table: TableSource, ansatz: AnsatzKind) -> Self {
        Self {
            table,
            ansatz,
            cmf: false,
            cmf_subsystem_a: vec![0, 1],
            r_selection: RSelection::All,
            interpolation: Interpolation::Nearest,
            iterations: 4,
            dtau_rule: DtauRule::default(),
            shots: None,
            seed: 0,
            theta0: None,
            record_intermediate: false,
            parallel: true,
        }
    }

    /// Starting angles: the given ones, else 2.0 for UCC-H2, 1.0 per
    /// UCC-LiH angle and 0.5 per hardware-efficient angle.
    pub fn resolved_theta0(&self) -> Vec<f64> {
        self.theta0.clone().unwrap_or_else(|| {
            let fill = match self.ansatz {
                AnsatzKind::UccH2 => 2.0,
                AnsatzKind::UccLiH => 1.0,
                AnsatzKind::HardwareEfficient { .. } => 0.5,
            };
            vec![fill; self.ansatz.n_parameters()]
        })
    }

    pub fn route(&self, point_index: usize) -> Route {
        match self.shots {
            None => Route::Exact,
            Some(n) => Route::Hadamard {
                shots: Shots::Finite(n),
                seed: self.seed.wrapping_add((point_index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)),
            },
        }
    }

    pub fn partition(&self) -> Result<CmfPartition<f64>> {
        CmfPartition::new(
            3,
            self.cmf_subsystem_a.clone(),
            DensityMatrix::from_pure(&StateVector::plus()),
        )
    }

    /// Checks everything that can be known before any point runs.
    pub fn validate(&self, table: &MoleculeTable) -> Result<Vec<usize>> {
        let bad = |m: String| Err(Error::Manifest(m));
        if self.iterations == 0 {
            return bad("iteration count must be positive".into());
        }
        if self.shots == Some(0) {
            return bad("shot count must be positive".into());
        }
        if let DtauRule::Fixed(v) = self.dtau_rule {
            if v <= 0.0 || !v.is_finite() {
                return bad(format!("fixed time step {v} must be positive"));
            }
        }
        let theta = self.resolved_theta0();
        if theta.len() != self.ansatz.n_parameters() {
            return bad(format!(
                "{} takes {} starting angles, got {}",
                self.ansatz,
                self.ansatz.n_parameters(),
                theta.len()
            ));
        }
        let circuit_qubits = if self.cmf {
            if table.n_qubits != 3 {
                return bad(format!(
                    "the reduction needs a three-qubit table, this one has {}",
                    table.n_qubits
                ));
            }
            self.partition()?;
            self.cmf_subsystem_a.len()
        } else {
            table.n_qubits
        };
        if self.ansatz.n_system_qubits() != circuit_qubits {
            let hint = if matches!(self.ansatz, AnsatzKind::HardwareEfficient { .. }) && !self.cmf {
                "; enable --cmf for three-qubit tables"
            } else {
                ""
            };
            return bad(format!(
                "{} acts on {} qubits but the Hamiltonian has {}{hint}",
                self.ansatz,
                self.ansatz.n_system_qubits(),
                circuit_qubits
            ));
        }
        let indices = match &self.r_selection {
            RSelection::All => (0..table.rows.len()).collect(),
            RSelection::List(rs) if rs.is_empty() => return bad("empty R selection".into()),
            RSelection::List(rs) => rs
                .iter()
                .map(|&r| table.row_index(r, self.interpolation))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::Manifest(e.to_string()))?,
        };
        Ok(indices)
    }

    /// Resolved configuration as `key=value` lines.
    pub fn echo(&self, table: &MoleculeTable) -> String {
        let mut s = String::new();
        let theta: Vec<String> = self.resolved_theta0().iter().map(|t| t.to_string()).collect();
        let rs = match &self.r_selection {
            RSelection::All => "all".to_string(),
            RSelection::List(v) => v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(","),
        };
        let _ = writeln!(s, "table={}", self.table);
        let _ = writeln!(s, "molecule={}", table.molecule_name);
        let _ = writeln!(s, "ansatz={}", self.ansatz);
        let _ = writeln!(s, "cmf={}", self.cmf);
        if self.cmf {
            let a: Vec<String> = self.cmf_subsystem_a.iter().map(|q| q.to_string()).collect();
            let _ = writeln!(s, "cmf_subsystem_a={}", a.join(","));
            let _ = writeln!(s, "cmf_initial_rho_b=(I+X)/2");
        }
        let _ = writeln!(s, "r={rs}");
        let _ = writeln!(s, "interpolation={:?}", self.interpolation);
        let _ = writeln!(s, "iterations={}", self.iterations);
        let _ = match self.dtau_rule {
            DtauRule::Auto { c } => writeln!(s, "dtau=auto({c})"),
            DtauRule::Fixed(v) => writeln!(s, "dtau={v}"),
        };
        let _ = match self.shots {
            None => writeln!(s, "route=exact"),
            Some(n) => writeln!(s, "route=shots:{n}"),
        };
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "theta0={}", theta.join(","));
        let _ = writeln!(s, "trace={}", self.record_intermediate);
        s
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointFlags {
    pub stationary: bool,
    pub degenerate: bool,
    pub discontinuity: bool,
    pub warnings: usize,
    pub error: Option<String>,
}

impl PointFlags {
    /// `;`-joined flag names, `none` when clear.
    pub fn label(&self) -> String {
        let mut names = Vec::new();
        if self.stationary {
            names.push("stationary");
        }
        if self.degenerate {
            names.push("degenerate");
        }
        if self.discontinuity {
            names.push("discontinuity");
        }
        if self.warnings > 0 {
            names.push("warning");
        }
        if self.error.is_some() {
            names.push("error");
        }
        if names.is_empty() {
            "none".into()
        } else {
            names.join(";")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub r: f64,
    /// Absent when the point failed.
    pub e_qite: Option<f64>,
    pub e_exact: f64,
    pub fidelity: Option<f64>,
    pub iterations: usize,
    pub flags: PointFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub point: CurvePoint,
    pub trajectory: Option<QiteTrajectory<f64>>,
    pub selection: Option<SelectionRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutput {
    pub results: Vec<PointResult>,
    pub manifest_echo: String,
    pub record_intermediate: bool,
}

impl ScanOutput {
    pub fn points(&self) -> Vec<&CurvePoint> {
        self.results.iter().map(|r| &r.point).collect()
    }

    pub fn any_failed(&self) -> bool {
        self.results.iter().any(|r| r.point.flags.error.is_some())
    }
}

fn run_point(manifest: &RunManifest, table: &MoleculeTable, index: usize, discontinuities: &[f64]) -> PointResult {
    let r = table.rows[index].r;
    let mut flags = PointFlags {
        discontinuity: discontinuities.iter().any(|&d| (d - r).abs() < 1e-9),
        ..PointFlags::default()
    };
    let h: PauliHamiltonian<f64> = match table.row_hamiltonian(index) {
        Ok(h) => h,
        Err(e) => return failed(r, f64::NAN, flags, e),
    };
    let e_exact = match exact_spectrum(&h) {
        Ok(s) => s.ground_energy(),
        Err(e) => return failed(r, f64::NAN, flags, e),
    };
    let outcome = (|| -> Result<(QiteTrajectory<f64>, Option<SelectionRecord>)> {
        let config = QiteConfig {
            iterations: manifest.iterations,
            dtau_rule: manifest.dtau_rule,
            route: manifest.route(index),
            initial_theta: manifest.resolved_theta0(),
            record_intermediate: manifest.record_intermediate,
        };
        if manifest.cmf {
            let e = cmf_reduce(&h, &manifest.partition()?)?;
            let t = run_qite(&e.h_eff, manifest.ansatz, &config, Some(&e))?;
            Ok((t, Some(e.record)))
        } else {
            Ok((run_qite(&h, manifest.ansatz, &config, None)?, None))
        }
    })();
    match outcome {
        Ok((t, selection)) => {
            flags.stationary = t.stationary;
            flags.degenerate = t.degenerate;
            flags.warnings = t.warnings.len();
            PointResult {
                point: CurvePoint {
                    r,
                    e_qite: Some(t.converged_energy),
                    e_exact,
                    fidelity: t.final_fidelity(),
                    iterations: t.iterations(),
                    flags,
                },
                trajectory: Some(t),
                selection,
            }
        }
        Err(e) => failed(r, e_exact, flags, e),
    }
}

fn failed(r: f64, e_exact: f64, mut flags: PointFlags, e: Error) -> PointResult {
    flags.error = Some(e.to_string());
    PointResult {
        point: CurvePoint {
            r,
            e_qite: None,
            e_exact,
            fidelity: None,
            iterations: 0,
            flags,
        },
        trajectory: None,
        selection: None,
    }
}

/// Loads the table, validates the manifest and runs every selected point.
/// Manifest problems abort before any work; per-point failures are recorded
/// in the point's flags. Results are in table order either way.
pub fn run_scan(manifest: &RunManifest) -> Result<ScanOutput> {
    let table = manifest
        .table
        .load()
        .map_err(|e| Error::Manifest(e.to_string()))?;
    run_scan_on(manifest, &table)
}

/// [`run_scan`] against an already loaded table.
pub fn run_scan_on(manifest: &RunManifest, table: &MoleculeTable) -> Result<ScanOutput> {
    let mut indices = manifest.validate(table)?;
    indices.sort_unstable();
    indices.dedup();
    let discontinuities = table.discontinuity_rows();
    let results: Vec<PointResult> = if manifest.parallel {
        indices
            .par_iter()
            .map(|&i| run_point(manifest, table, i, &discontinuities))
            .collect()
    } else {
        indices
            .iter()
            .map(|&i| run_point(manifest, table, i, &discontinuities))
            .collect()
    };
    Ok(ScanOutput {
        results,
        manifest_echo: manifest.echo(table),
        record_intermediate: manifest.record_intermediate,
    })
}

/// `x` with ten significant digits in plain decimal notation.
pub fn sig10(x: f64) -> String {
    if !x.is_finite() {
        return "nan".into();
    }
    if x == 0.0 {
        return format!("{:.9}", 0.0);
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (9 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), sig10)
}

/// Label used in per-point file names.
pub fn r_label(r: f64) -> String {
    format!("{r}")
}

pub fn curve_csv(points: &[&CurvePoint]) -> String {
    let mut s = String::from("R,e_qite,e_exact,fidelity,iterations,flags\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            sig10(p.r),
            opt(p.e_qite),
            sig10(p.e_exact),
            opt(p.fidelity),
            p.iterations,
            p.flags.label()
        );
    }
    s
}

pub fn trace_csv(t: &QiteTrajectory<f64>) -> String {
    let n = t.records[0].theta.len();
    let mut s = String::from("iter");
    for k in 1..=n {
        let _ = write!(s, ",theta_{k}");
    }
    s.push_str(",energy,fidelity\n");
    for rec in &t.records {
        let _ = write!(s, "{}", rec.iteration);
        for th in &rec.theta {
            let _ = write!(s, ",{}", sig10(*th));
        }
        let _ = writeln!(s, ",{},{}", sig10(rec.energy), opt(rec.fidelity));
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Writes `curve.csv`, `manifest.echo`, one `trace_R<r>.csv` per point when
/// intermediate records were kept, and one `cmf_R<r>.txt` selection record
/// per reduced point. Returns the paths written.
pub fn emit_outputs(output: &ScanOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    let mut written = Vec::new();
    let mut put = |name: String, contents: &str| -> Result<()> {
        let path = dir.join(name);
        write_file(&path, contents)?;
        written.push(path);
        Ok(())
    };
    put("curve.csv".into(), &curve_csv(&output.points()))?;
    put("manifest.echo".into(), &output.manifest_echo)?;
    for res in &output.results {
        let label = r_label(res.point.r);
        if output.record_intermediate {
            if let Some(t) = &res.trajectory {
                put(format!("trace_R{label}.csv"), &trace_csv(t))?;
            }
        }
        if let Some(rec) = &res.selection {
            put(format!("cmf_R{label}.txt"), &rec.to_string())?;
        }
    }
    Ok(written)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcitedOutcome {
    pub e_max: f64,
    pub lifted: PauliHamiltonian<f64>,
    /// Ground energy of the input effective Hamiltonian used for the lift.
    pub ground_energy_used: f64,
    /// Oracle first excited energy of the effective Hamiltonian.
    pub target_energy: f64,
    pub trajectory: QiteTrajectory<f64>,
}

impl ExcitedOutcome {
    pub fn error(&self) -> f64 {
        (self.trajectory.converged_energy - self.target_energy).abs()
    }
}

/// First excited level of a two-qubit effective Hamiltonian: lift its
/// ground state (exact, or found by a preliminary run with `ground_config`)
/// above the Gershgorin bound, then search for the new ground state.
pub fn run_excited(
    h_eff: &PauliHamiltonian<f64>,
    kind: AnsatzKind,
    ground_config: Option<&QiteConfig<f64>>,
    excited_config: &QiteConfig<f64>,
) -> Result<ExcitedOutcome> {
    let spectrum = exact_spectrum(h_eff)?;
    let ground = match ground_config {
        None => spectrum.ground_projector(),
        Some(cfg) => run_qite(h_eff, kind, cfg, None)?.final_state,
    };
    let e_max = gershgorin_emax(&h_eff.to_dense_matrix()?)?.e_max;
    let lifted = lift_ground_state(h_eff, &ground, e_max)?;
    let trajectory = run_qite(&lifted, kind, excited_config, None)?;
    Ok(ExcitedOutcome {
        e_max,
        ground_energy_used: h_eff.expectation(&ground)?,
        lifted,
        target_energy: spectrum.eigenvalues[1],
        trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig10(1.5), "1.500000000");
        assert_eq!(sig10(-7.953636), "-7.953636000");
        assert_eq!(sig10(0.0), "0.000000000");
        assert_eq!(sig10(0.000123456789012), "0.0001234567890");
        assert_eq!(sig10(12345678901.0), "12345678901");
    }

    #[test]
    fn manifest_validation() {
        let table = MoleculeTable::bundled_lih();
        let mut m = RunManifest::new(TableSource::BundledLih, AnsatzKind::HardwareEfficient { depth: 1 });
        assert!(matches!(m.validate(&table), Err(Error::Manifest(_))));
        m.cmf = true;
        assert_eq!(m.validate(&table).unwrap().len(), 50);
        m.r_selection = RSelection::List(vec![]);
        assert!(m.validate(&table).is_err());
        m.r_selection = RSelection::List(vec![9.0]);
        assert!(m.validate(&table).is_err());
        m.r_selection = RSelection::List(vec![1.5]);
        m.theta0 = Some(vec![0.5; 5]);
        assert!(m.validate(&table).is_err());

        let mut u = RunManifest::new(TableSource::BundledLih, AnsatzKind::UccLiH);
        assert!(u.validate(&table).is_ok());
        u.cmf = true;
        assert!(u.validate(&table).is_err());
        u.cmf = false;
        u.shots = Some(0);
        assert!(u.validate(&table).is_err());
    }

    #[test]
    fn flag_labels() {
        assert_eq!(PointFlags::default().label(), "none");
        let f = PointFlags {
            stationary: true,
            discontinuity: true,
            ..PointFlags::default()
        };
        assert_eq!(f.label(), "stationary;discontinuity");
    }

    #[test]
    fn point_failures_are_recorded() {
        // no single-Z terms, so the automatic step rule fails at run time
        let table = crate::tables::parse_table("R,II,XX,YY\n0.5,-1.0,0.2,0.1\n0.6,-1.0,0.3,0.1\n").unwrap();
        let m = RunManifest::new(TableSource::BundledH2Synthetic, AnsatzKind::UccH2);
        let out = run_scan_on(&m, &table).unwrap();
        assert!(out.any_failed());
        assert!(out.results[0].point.e_qite.is_none());
        assert!(curve_csv(&out.points()).contains("error"));
    }
}
