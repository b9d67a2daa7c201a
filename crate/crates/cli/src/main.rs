use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qite::engine::QiteConfig;
use qite::scan::{self, RSelection, RunManifest, TableSource};
use qite::{AnsatzKind, DtauRule, Error, Hamiltonian, Interpolation, MoleculeTable};

#[derive(Parser)]
#[command(name = "qite", version, about = "Variational imaginary-time evolution for small molecules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every selected bond distance and write curve.csv.
    Scan(RunArgs),
    /// Run one bond distance and print its trajectory.
    Point(RunArgs),
    /// Print the exact spectrum at one bond distance.
    Spectrum(SpectrumArgs),
    /// Lift the ground state of the reduced Hamiltonian and search for the next level.
    Excited(ExcitedArgs),
    /// Lint a coefficient table.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct TableArg {
    /// CSV path, `bundled:lih` or `bundled:h2-synthetic`.
    #[arg(long, default_value = "bundled:lih")]
    table: String,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    table: TableArg,
    /// ucc-h2, ucc-lih, he or he:DEPTH.
    #[arg(long, default_value = "he")]
    ansatz: String,
    /// Reduce three qubits to two before evolving.
    #[arg(long)]
    cmf: bool,
    /// Qubits kept as subsystem a of the reduction.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    cmf_a: Vec<usize>,
    /// Comma-separated distances or `all`.
    #[arg(long, default_value = "all")]
    r: String,
    #[arg(long, default_value_t = 4)]
    iters: usize,
    /// `auto`, `auto:C` or a fixed step.
    #[arg(long, default_value = "auto")]
    dtau: String,
    /// `exact` or `shots:N`.
    #[arg(long, default_value = "exact")]
    route: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated starting angles.
    #[arg(long)]
    theta0: Option<String>,
    #[arg(long, default_value = "qite-out")]
    out: PathBuf,
    /// Keep per-iteration records and write trace files.
    #[arg(long)]
    trace: bool,
    /// Evaluate points one after another.
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    table: TableArg,
    #[arg(long)]
    r: f64,
    /// Also print the reduced two-qubit Hamiltonian.
    #[arg(long)]
    cmf: bool,
}

#[derive(Args)]
struct ExcitedArgs {
    #[command(flatten)]
    table: TableArg,
    #[arg(long, default_value_t = 1.5)]
    r: f64,
    #[arg(long, default_value = "he")]
    ansatz: String,
    #[arg(long, default_value_t = 20)]
    iters: usize,
    #[arg(long, default_value = "2.0")]
    dtau: String,
    /// Starting angles for the excited-state search.
    #[arg(long)]
    theta0: Option<String>,
    /// Lift the exact ground state instead of a preliminary evolution.
    #[arg(long)]
    exact_ground: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    table: TableArg,
}

enum Failure {
    Points,
    Manifest(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Manifest(e.to_string())
    }
}

fn bad(msg: impl Into<String>) -> Failure {
    Failure::Manifest(msg.into())
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad(format!("bad {what} value {t:?}"))))
        .collect()
}

fn parse_dtau(text: &str) -> Result<DtauRule, Failure> {
    match text {
        "auto" => Ok(DtauRule::default()),
        t => match t.strip_prefix("auto:") {
            Some(c) => c
                .parse()
                .map(|c| DtauRule::Auto { c })
                .map_err(|_| bad(format!("bad --dtau {t:?}"))),
            None => t
                .parse()
                .map(DtauRule::Fixed)
                .map_err(|_| bad(format!("bad --dtau {t:?}"))),
        },
    }
}

fn parse_route(text: &str) -> Result<Option<u64>, Failure> {
    match text {
        "exact" => Ok(None),
        t => t
            .strip_prefix("shots:")
            .and_then(|n| n.parse().ok())
            .map(Some)
            .ok_or_else(|| bad(format!("bad --route {t:?}"))),
    }
}

fn manifest(args: &RunArgs) -> Result<RunManifest, Failure> {
    let ansatz: AnsatzKind = args.ansatz.parse()?;
    let mut m = RunManifest::new(TableSource::parse(&args.table.table), ansatz);
    m.cmf = args.cmf;
    m.cmf_subsystem_a = args.cmf_a.clone();
    m.r_selection = match args.r.trim() {
        "all" => RSelection::All,
        "" => RSelection::List(Vec::new()),
        list => RSelection::List(parse_list(list, "--r")?),
    };
    m.interpolation = Interpolation::Nearest;
    m.iterations = args.iters;
    m.dtau_rule = parse_dtau(&args.dtau)?;
    m.shots = parse_route(&args.route)?;
    m.seed = args.seed;
    m.theta0 = args.theta0.as_deref().map(|t| parse_list(t, "--theta0")).transpose()?;
    m.record_intermediate = args.trace;
    m.parallel = !args.serial;
    Ok(m)
}

fn load(table: &TableArg) -> Result<MoleculeTable, Failure> {
    Ok(TableSource::parse(&table.table).load()?)
}

fn cmd_scan(args: &RunArgs) -> Result<(), Failure> {
    let m = manifest(args)?;
    let out = scan::run_scan(&m)?;
    let written = scan::emit_outputs(&out, &args.out)?;
    print!("{}", scan::curve_csv(&out.points()));
    eprintln!("wrote {} files to {}", written.len(), args.out.display());
    report_failures(&out)
}

fn cmd_point(args: &RunArgs) -> Result<(), Failure> {
    let mut m = manifest(args)?;
    match &m.r_selection {
        RSelection::List(v) if v.len() == 1 => {}
        _ => return Err(bad("point takes exactly one --r value")),
    }
    m.record_intermediate = true;
    let out = scan::run_scan(&m)?;
    let res = &out.results[0];
    print!("{}", scan::curve_csv(&out.points()));
    if let Some(t) = &res.trajectory {
        println!();
        print!("{}", scan::trace_csv(t));
    }
    if let Some(rec) = &res.selection {
        println!();
        print!("{rec}");
    }
    report_failures(&out)
}

fn report_failures(out: &scan::ScanOutput) -> Result<(), Failure> {
    let mut failed = false;
    for p in out.points() {
        if let Some(e) = &p.flags.error {
            eprintln!("R={}: {e}", p.r);
            failed = true;
        }
    }
    if failed {
        Err(Failure::Points)
    } else {
        Ok(())
    }
}

fn print_levels(h: &Hamiltonian) -> Result<(), Failure> {
    let s = qite::exact_spectrum(h)?;
    println!("level,energy,degenerate");
    for (k, e) in s.eigenvalues.iter().enumerate() {
        println!("{k},{},{}", scan::sig10(*e), s.degeneracy_flags[k]);
    }
    Ok(())
}

fn cmd_spectrum(args: &SpectrumArgs) -> Result<(), Failure> {
    let table = load(&args.table)?;
    let h: Hamiltonian = table.hamiltonian_at(args.r, Interpolation::Nearest)?;
    print_levels(&h)?;
    if args.cmf {
        let partition = qite::CmfPartition::default();
        let e = qite::cmf_reduce(&h, &partition)?;
        println!();
        println!("h_eff");
        println!("{}", e.h_eff);
        print_levels(&e.h_eff)?;
        println!();
        print!("{}", e.record);
    }
    Ok(())
}

fn cmd_excited(args: &ExcitedArgs) -> Result<(), Failure> {
    let table = load(&args.table)?;
    if table.n_qubits != 3 {
        return Err(bad("excited needs a three-qubit table"));
    }
    let kind: AnsatzKind = args.ansatz.parse()?;
    if kind.n_system_qubits() != 2 {
        return Err(bad("excited runs a two-qubit ansatz on the reduced Hamiltonian"));
    }
    let theta0 = match &args.theta0 {
        Some(t) => parse_list(t, "--theta0")?,
        None => vec![0.5; kind.n_parameters()],
    };
    if theta0.len() != kind.n_parameters() {
        return Err(bad(format!("{kind} takes {} starting angles", kind.n_parameters())));
    }
    let h: Hamiltonian = table.hamiltonian_at(args.r, Interpolation::Nearest)?;
    let partition = qite::CmfPartition::default();
    let e = qite::cmf_reduce(&h, &partition)?;

    let mut excited = QiteConfig::new(theta0.clone());
    excited.iterations = args.iters;
    excited.dtau_rule = parse_dtau(&args.dtau)?;
    let ground = QiteConfig::new(theta0);
    let outcome = scan::run_excited(
        &e.h_eff,
        kind,
        (!args.exact_ground).then_some(&ground),
        &excited,
    )?;
    println!("R={}", args.r);
    println!("e_max={}", scan::sig10(outcome.e_max));
    println!("lifted_ground_energy={}", scan::sig10(outcome.ground_energy_used));
    println!("e_qite={}", scan::sig10(outcome.trajectory.converged_energy));
    println!("e_target={}", scan::sig10(outcome.target_energy));
    println!("error={}", scan::sig10(outcome.error()));
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), Failure> {
    let table = load(&args.table)?;
    println!("molecule={}", table.molecule_name);
    println!("qubits={}", table.n_qubits);
    println!("terms={}", table.pauli_labels.len());
    println!("rows={}", table.rows.len());
    let d = table.distances();
    if let (Some(lo), Some(hi)) = (d.first(), d.last()) {
        println!("r_range={lo}..{hi}");
    }
    for i in 0..table.rows.len() {
        let h: Hamiltonian = table.row_hamiltonian(i)?;
        if h.terms().iter().all(|(_, s)| s.weight() != 1 || !s.letters().contains(&qite::Pauli::Z)) {
            eprintln!("R={}: no single-Z terms, the automatic step rule will fail", table.rows[i].r);
        }
    }
    let flagged: Vec<String> = table.discontinuity_rows().iter().map(|r| r.to_string()).collect();
    println!(
        "discontinuities={}",
        if flagged.is_empty() { "none".into() } else { flagged.join(",") }
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Scan(a) => cmd_scan(a),
        Command::Point(a) => cmd_point(a),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Excited(a) => cmd_excited(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Points) => ExitCode::from(1),
        Err(Failure::Manifest(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
