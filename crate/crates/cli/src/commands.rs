//! One function per subcommand. Each resolves its parameters from
//! flags, the optional config file, and defaults (in that order), runs
//! the computation, and returns the resolved config, a JSON results
//! payload, and the CSV rendering.

use clap::Args;
use serde::Serialize;
use serde_json::Value;

use cfsk_core::alphabet::{Constellation, ConstellationKind, ProtocolParams};
use cfsk_core::bounds::{
    ppm_helstrom_closed, psk_helstrom_circulant, sql_error_mc, srm_error, BoundMethod,
};
use cfsk_core::receiver::{estimate_ser, InitialHypothesis, ReceiverModel, SerEstimate};
use cfsk_core::sweep::{
    default_optimization_grid, find_minima, hb_ratio_map, optimize_cfsk_hb, scan_alphabet,
    scan_energy, sweep_hb_map, sweep_ser_map, AlphabetScanRow, EnergyScanRow, GridAxis, GridSpec,
    MinimaReport, SweepMap,
};

use crate::config::{expect_one, FileConfig};
use crate::error::CliError;
use crate::output::{csv_table, fmt_float, fmt_opt};

pub struct CommandOutput {
    pub config: Value,
    pub results: Value,
    pub csv: String,
    /// Human-oriented summary lines, printed to stderr in CSV mode.
    pub notes: Vec<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payloads are plain data")
}

/// Receiver imperfection flags shared by the simulating commands.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Displacement interference visibility, in [0, 1]
    #[arg(long)]
    visibility: Option<f64>,
    /// Detection efficiency, in (0, 1]
    #[arg(long)]
    efficiency: Option<f64>,
    /// Signal transmittance of the displacement tap, in (0, 1]
    #[arg(long)]
    transmittance: Option<f64>,
    /// Starting hypothesis: a symbol index, or "random"
    #[arg(long, value_name = "INDEX|random")]
    init_hypothesis: Option<String>,
    /// Safety cap on detector clicks per trial
    #[arg(long)]
    max_events: Option<u64>,
}

fn parse_init_hypothesis(s: &str) -> Result<InitialHypothesis, CliError> {
    if s.eq_ignore_ascii_case("random") {
        return Ok(InitialHypothesis::RandomUniform);
    }
    s.parse::<usize>().map(InitialHypothesis::Fixed).map_err(|_| {
        CliError::Config(format!(
            "invalid init hypothesis {s:?}: expected a symbol index or \"random\""
        ))
    })
}

fn resolve_model(args: &ModelArgs, file: &FileConfig) -> Result<ReceiverModel, CliError> {
    let defaults = ReceiverModel::default();
    let init = args
        .init_hypothesis
        .as_deref()
        .or(file.init_hypothesis.as_deref());
    Ok(ReceiverModel {
        visibility: args
            .visibility
            .or(file.visibility)
            .unwrap_or(defaults.visibility),
        efficiency: args
            .efficiency
            .or(file.efficiency)
            .unwrap_or(defaults.efficiency),
        signal_transmittance: args
            .transmittance
            .or(file.transmittance)
            .unwrap_or(defaults.signal_transmittance),
        initial_hypothesis: match init {
            Some(s) => parse_init_hypothesis(s)?,
            None => defaults.initial_hypothesis,
        },
        max_events: args.max_events.or(file.max_events).unwrap_or(defaults.max_events),
    })
}

fn parse_kinds(names: &[String]) -> Result<Vec<ConstellationKind>, CliError> {
    names
        .iter()
        .map(|s| s.parse::<ConstellationKind>().map_err(CliError::from))
        .collect()
}

fn file_list<T: Clone>(v: &Option<crate::config::OneOrMany<T>>) -> Option<Vec<T>> {
    v.as_ref().map(|x| x.to_vec())
}

/// CFSK operating point: explicit when both separations were given,
/// bound-optimal when both were omitted.
fn resolve_cfsk_point(
    m: usize,
    n_bar: f64,
    dwt: Option<f64>,
    dtheta: Option<f64>,
) -> Result<(ProtocolParams, bool), CliError> {
    match (dwt, dtheta) {
        (Some(w), Some(t)) => Ok((ProtocolParams::new(m, n_bar, w, t)?, false)),
        (None, None) => Ok((optimize_cfsk_hb(m, n_bar)?.0, true)),
        _ => Err(CliError::Config(
            "provide both --dwt and --dtheta, or neither to use the bound-optimal point".into(),
        )),
    }
}

// ---------------------------------------------------------------- bounds

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Constellations to evaluate (comma separated: cfsk, psk, qam16, ppm)
    #[arg(long, value_delimiter = ',')]
    kind: Vec<String>,
    /// Alphabet size
    #[arg(long = "M")]
    m: Option<usize>,
    /// Mean photon numbers (comma separated)
    #[arg(long, value_delimiter = ',')]
    nbar: Vec<f64>,
    /// CFSK frequency separation; omit with --dtheta to optimize
    #[arg(long)]
    dwt: Option<f64>,
    /// CFSK phase separation; omit with --dwt to optimize
    #[arg(long)]
    dtheta: Option<f64>,
    /// Monte Carlo trials behind each SQL estimate
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Serialize)]
struct BoundsConfig {
    kinds: Vec<String>,
    m: usize,
    n_bars: Vec<f64>,
    dwt: Option<f64>,
    dtheta: Option<f64>,
    trials: u64,
    seed: u64,
    threads: Option<usize>,
}

#[derive(Serialize)]
struct BoundsRow {
    kind: String,
    m: usize,
    n_bar: f64,
    dwt: Option<f64>,
    dtheta: Option<f64>,
    hb: f64,
    hb_method: BoundMethod,
    sql: f64,
    sql_ci95_halfwidth: f64,
}

const BOUNDS_HEADER: &[&str] = &[
    "kind",
    "m",
    "n_bar",
    "dwt",
    "dtheta",
    "hb",
    "hb_method",
    "sql",
    "sql_ci95_halfwidth",
];

fn method_name(method: BoundMethod) -> String {
    match to_value(&method) {
        Value::String(s) => s,
        _ => unreachable!("methods serialize as strings"),
    }
}

pub fn bounds(
    args: &BoundsArgs,
    file: &FileConfig,
    seed: u64,
    threads: Option<usize>,
) -> Result<CommandOutput, CliError> {
    let kind_names = if !args.kind.is_empty() {
        args.kind.clone()
    } else {
        file_list(&file.kind).unwrap_or_else(|| vec!["cfsk".into(), "psk".into()])
    };
    let kinds = parse_kinds(&kind_names)?;
    let m = match (args.m, &file.m) {
        (Some(m), _) => m,
        (None, Some(v)) => expect_one(v, "m")?,
        (None, None) => 16,
    };
    let n_bars = if !args.nbar.is_empty() {
        args.nbar.clone()
    } else {
        file_list(&file.nbar).unwrap_or_else(|| vec![2.0, 4.0, 8.0, 12.0])
    };
    let dwt = args.dwt.or(file.dwt);
    let dtheta = args.dtheta.or(file.dtheta);
    let trials = args.trials.or(file.trials).unwrap_or(1_000_000);

    let mut rows = Vec::new();
    for &n_bar in &n_bars {
        for &kind in &kinds {
            let row_seed = seed.wrapping_add(rows.len() as u64);
            let row = match kind {
                ConstellationKind::Cfsk => {
                    let (params, _) = resolve_cfsk_point(m, n_bar, dwt, dtheta)?;
                    let constellation = Constellation::cfsk(params);
                    let hb = srm_error(&constellation.gram_matrix())?;
                    let sql = sql_error_mc(&constellation, trials, row_seed)?;
                    BoundsRow {
                        kind: kind.to_string(),
                        m,
                        n_bar,
                        dwt: Some(params.delta_omega_t),
                        dtheta: Some(params.delta_theta),
                        hb: hb.p_error,
                        hb_method: hb.method,
                        sql: sql.p_error,
                        sql_ci95_halfwidth: sql.ci95_halfwidth,
                    }
                }
                ConstellationKind::Psk => {
                    let hb = psk_helstrom_circulant(m, n_bar)?;
                    let constellation = Constellation::psk(m, n_bar)?;
                    let sql = sql_error_mc(&constellation, trials, row_seed)?;
                    BoundsRow {
                        kind: kind.to_string(),
                        m,
                        n_bar,
                        dwt: Some(0.0),
                        dtheta: Some(constellation.params().delta_theta),
                        hb: hb.p_error,
                        hb_method: hb.method,
                        sql: sql.p_error,
                        sql_ci95_halfwidth: sql.ci95_halfwidth,
                    }
                }
                ConstellationKind::Qam16 => {
                    let constellation =
                        Constellation::new(ConstellationKind::Qam16, ProtocolParams::new(m, n_bar, 0.0, 0.0)?)?;
                    let hb = srm_error(&constellation.gram_matrix())?;
                    let sql = sql_error_mc(&constellation, trials, row_seed)?;
                    BoundsRow {
                        kind: kind.to_string(),
                        m,
                        n_bar,
                        dwt: None,
                        dtheta: None,
                        hb: hb.p_error,
                        hb_method: hb.method,
                        sql: sql.p_error,
                        sql_ci95_halfwidth: sql.ci95_halfwidth,
                    }
                }
                ConstellationKind::Ppm => {
                    let hb = ppm_helstrom_closed(m, n_bar)?;
                    let constellation = Constellation::ppm(m, n_bar)?;
                    let sql = sql_error_mc(&constellation, trials, row_seed)?;
                    BoundsRow {
                        kind: kind.to_string(),
                        m,
                        n_bar,
                        dwt: None,
                        dtheta: None,
                        hb: hb.p_error,
                        hb_method: hb.method,
                        sql: sql.p_error,
                        sql_ci95_halfwidth: sql.ci95_halfwidth,
                    }
                }
            };
            rows.push(row);
        }
    }

    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.kind.clone(),
                r.m.to_string(),
                fmt_float(r.n_bar),
                fmt_opt(r.dwt),
                fmt_opt(r.dtheta),
                fmt_float(r.hb),
                method_name(r.hb_method),
                fmt_float(r.sql),
                fmt_float(r.sql_ci95_halfwidth),
            ]
        })
        .collect();

    Ok(CommandOutput {
        config: to_value(&BoundsConfig {
            kinds: kind_names,
            m,
            n_bars,
            dwt,
            dtheta,
            trials,
            seed,
            threads,
        }),
        results: to_value(&rows),
        csv: csv_table(BOUNDS_HEADER, &csv_rows),
        notes: Vec::new(),
    })
}

// ------------------------------------------------------------------- ser

#[derive(Debug, Args)]
pub struct SerArgs {
    /// Alphabet size
    #[arg(long = "M")]
    m: Option<usize>,
    /// Mean photon number
    #[arg(long)]
    nbar: Option<f64>,
    /// Frequency separation; omit with --dtheta to use the bound-optimal point
    #[arg(long)]
    dwt: Option<f64>,
    /// Phase separation; omit with --dwt to use the bound-optimal point
    #[arg(long)]
    dtheta: Option<f64>,
    /// Monte Carlo trials
    #[arg(long)]
    trials: Option<u64>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Serialize)]
struct SerConfig {
    m: usize,
    n_bar: f64,
    dwt: f64,
    dtheta: f64,
    parameters_optimized: bool,
    trials: u64,
    seed: u64,
    threads: Option<usize>,
    model: ReceiverModel,
}

#[derive(Serialize)]
struct SerResults {
    dwt: f64,
    dtheta: f64,
    estimate: SerEstimate,
}

const SER_HEADER: &[&str] = &[
    "m",
    "n_bar",
    "dwt",
    "dtheta",
    "trials",
    "errors",
    "ser",
    "ci95_low",
    "ci95_high",
    "flagged_trials",
];

pub fn ser(
    args: &SerArgs,
    file: &FileConfig,
    seed: u64,
    threads: Option<usize>,
) -> Result<CommandOutput, CliError> {
    let m = match (args.m, &file.m) {
        (Some(m), _) => m,
        (None, Some(v)) => expect_one(v, "m")?,
        (None, None) => 16,
    };
    let n_bar = match (args.nbar, &file.nbar) {
        (Some(n), _) => n,
        (None, Some(v)) => expect_one(v, "nbar")?,
        (None, None) => 12.0,
    };
    let trials = args.trials.or(file.trials).unwrap_or(100_000);
    let model = resolve_model(&args.model, file)?;
    let (params, optimized) = resolve_cfsk_point(
        m,
        n_bar,
        args.dwt.or(file.dwt),
        args.dtheta.or(file.dtheta),
    )?;
    let estimate = estimate_ser(&params, &model, trials, seed)?;

    let row = vec![
        m.to_string(),
        fmt_float(n_bar),
        fmt_float(params.delta_omega_t),
        fmt_float(params.delta_theta),
        trials.to_string(),
        estimate.errors.to_string(),
        fmt_float(estimate.p_hat),
        fmt_float(estimate.ci95_low),
        fmt_float(estimate.ci95_high),
        estimate.flagged_trials.to_string(),
    ];
    Ok(CommandOutput {
        config: to_value(&SerConfig {
            m,
            n_bar,
            dwt: params.delta_omega_t,
            dtheta: params.delta_theta,
            parameters_optimized: optimized,
            trials,
            seed,
            threads,
            model,
        }),
        results: to_value(&SerResults {
            dwt: params.delta_omega_t,
            dtheta: params.delta_theta,
            estimate,
        }),
        csv: csv_table(SER_HEADER, &[row]),
        notes: Vec::new(),
    })
}

// ----------------------------------------------------------------- sweep

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Alphabet size
    #[arg(long = "M")]
    m: Option<usize>,
    /// Mean photon number
    #[arg(long)]
    nbar: Option<f64>,
    /// Map the Helstrom bound instead of simulating the receiver
    #[arg(long)]
    hb: bool,
    /// Monte Carlo trials per grid cell (SER maps)
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    dwt_start: Option<f64>,
    #[arg(long)]
    dwt_stop: Option<f64>,
    #[arg(long)]
    dwt_points: Option<usize>,
    #[arg(long)]
    dtheta_start: Option<f64>,
    #[arg(long)]
    dtheta_stop: Option<f64>,
    #[arg(long)]
    dtheta_points: Option<usize>,
    /// Refuse grids with more cells than this
    #[arg(long)]
    max_cells: Option<u64>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Serialize)]
struct SweepConfig {
    m: usize,
    n_bar: f64,
    quantity: &'static str,
    grid: GridSpec,
    trials_per_cell: Option<u64>,
    max_cells: u64,
    seed: u64,
    threads: Option<usize>,
    model: Option<ReceiverModel>,
}

#[derive(Serialize)]
struct SweepResults {
    map: SweepMap,
    minima: MinimaReport,
}

const SWEEP_HEADER: &[&str] = &["dwt", "dtheta", "value"];

pub fn sweep(
    args: &SweepArgs,
    file: &FileConfig,
    seed: u64,
    threads: Option<usize>,
) -> Result<CommandOutput, CliError> {
    let m = match (args.m, &file.m) {
        (Some(m), _) => m,
        (None, Some(v)) => expect_one(v, "m")?,
        (None, None) => 16,
    };
    let n_bar = match (args.nbar, &file.nbar) {
        (Some(n), _) => n,
        (None, Some(v)) => expect_one(v, "nbar")?,
        (None, None) => 8.0,
    };
    let hb = args.hb || file.hb.unwrap_or(false);
    let defaults = default_optimization_grid();
    let grid = GridSpec {
        x: GridAxis::new(
            "dwt",
            args.dwt_start.or(file.dwt_start).unwrap_or(defaults.x.start),
            args.dwt_stop.or(file.dwt_stop).unwrap_or(defaults.x.stop),
            args.dwt_points.or(file.dwt_points).unwrap_or(defaults.x.points),
        )?,
        y: GridAxis::new(
            "dtheta",
            args.dtheta_start
                .or(file.dtheta_start)
                .unwrap_or(defaults.y.start),
            args.dtheta_stop.or(file.dtheta_stop).unwrap_or(defaults.y.stop),
            args.dtheta_points
                .or(file.dtheta_points)
                .unwrap_or(defaults.y.points),
        )?,
    };
    let max_cells = args.max_cells.or(file.max_cells).unwrap_or(100_000);
    if grid.cells() as u64 > max_cells {
        return Err(CliError::Config(format!(
            "grid has {} cells, over the --max-cells guard of {max_cells}; \
             reduce the point counts or raise the guard",
            grid.cells()
        )));
    }
    let trials = args.trials.or(file.trials).unwrap_or(10_000);
    let model = resolve_model(&args.model, file)?;
    let map = if hb {
        sweep_hb_map(m, n_bar, &grid)?
    } else {
        sweep_ser_map(m, n_bar, &grid, &model, trials, seed)?
    };
    let minima = find_minima(&map);

    let mut notes = Vec::new();
    if let Some(g) = &minima.global {
        notes.push(format!(
            "global minimum: dwt={:.6} dtheta={:.6} value={}",
            g.x,
            g.y,
            fmt_float(g.value)
        ));
    }
    if let Some(s) = &minima.secondary {
        notes.push(format!(
            "secondary minimum: dwt={:.6} dtheta={:.6} value={}",
            s.x,
            s.y,
            fmt_float(s.value)
        ));
    }

    let mut csv_rows = Vec::with_capacity(grid.cells());
    for ix in 0..grid.x.points {
        for iy in 0..grid.y.points {
            csv_rows.push(vec![
                fmt_float(grid.x.value(ix)),
                fmt_float(grid.y.value(iy)),
                fmt_float(map.value(ix, iy)),
            ]);
        }
    }

    Ok(CommandOutput {
        config: to_value(&SweepConfig {
            m,
            n_bar,
            quantity: if hb { "hb" } else { "ser" },
            grid,
            trials_per_cell: (!hb).then_some(trials),
            max_cells,
            seed,
            threads,
            model: (!hb).then_some(model),
        }),
        results: to_value(&SweepResults { map, minima }),
        csv: csv_table(SWEEP_HEADER, &csv_rows),
        notes,
    })
}

// ----------------------------------------------------------- scan-energy

#[derive(Debug, Args)]
pub struct ScanEnergyArgs {
    /// Alphabet size
    #[arg(long = "M")]
    m: Option<usize>,
    /// Mean photon numbers (comma separated)
    #[arg(long, value_delimiter = ',')]
    nbar: Vec<f64>,
    /// Reference constellations (comma separated: psk, qam16, ppm)
    #[arg(long, value_delimiter = ',')]
    kinds: Vec<String>,
    /// Monte Carlo trials per estimate
    #[arg(long)]
    trials: Option<u64>,
    /// Also emit the CFSK SER advantage in dB against this column
    #[arg(long = "ref", value_name = "COLUMN")]
    reference: Option<String>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Serialize)]
struct ScanEnergyConfig {
    m: usize,
    kinds: Vec<String>,
    n_bars: Vec<f64>,
    trials: u64,
    reference: Option<String>,
    seed: u64,
    threads: Option<usize>,
    model: ReceiverModel,
}

#[derive(Serialize)]
struct ScanEnergyResults {
    rows: Vec<EnergyScanRow>,
    reference: Option<String>,
    advantage_db: Option<Vec<f64>>,
}

const SCAN_ENERGY_HEADER: &[&str] = &[
    "n_bar",
    "dwt_opt",
    "dtheta_opt",
    "cfsk_ser",
    "cfsk_ser_ci_low",
    "cfsk_ser_ci_high",
    "cfsk_hb",
    "cfsk_sql",
    "psk_hb",
    "psk_sql",
    "qam16_hb",
    "ppm_hb",
];

/// Advantage of an error probability over a reference one, in dB.
fn advantage_db(reference: f64, p: f64) -> f64 {
    10.0 * (reference / p).log10()
}

fn energy_ref_column(row: &EnergyScanRow, name: &str) -> Option<f64> {
    match name {
        "cfsk_hb" => Some(row.cfsk_hb),
        "cfsk_sql" => Some(row.cfsk_sql),
        "psk_hb" => row.psk_hb,
        "psk_sql" => row.psk_sql,
        "qam16_hb" => row.qam16_hb,
        "ppm_hb" => row.ppm_hb,
        _ => None,
    }
}

pub fn scan_energy_cmd(
    args: &ScanEnergyArgs,
    file: &FileConfig,
    seed: u64,
    threads: Option<usize>,
) -> Result<CommandOutput, CliError> {
    let m = match (args.m, &file.m) {
        (Some(m), _) => m,
        (None, Some(v)) => expect_one(v, "m")?,
        (None, None) => 16,
    };
    let kind_names = if !args.kinds.is_empty() {
        args.kinds.clone()
    } else {
        file_list(&file.kinds).unwrap_or_else(|| {
            let mut ks = vec!["psk".to_string(), "ppm".to_string()];
            if m == 16 {
                ks.insert(1, "qam16".to_string());
            }
            ks
        })
    };
    let kinds = parse_kinds(&kind_names)?;
    let n_bars = if !args.nbar.is_empty() {
        args.nbar.clone()
    } else {
        file_list(&file.nbar).unwrap_or_else(|| vec![2.0, 4.0, 8.0, 12.0])
    };
    let trials = args.trials.or(file.trials).unwrap_or(100_000);
    let reference = args.reference.clone().or(file.reference.clone());
    let model = resolve_model(&args.model, file)?;

    let rows = scan_energy(m, &kinds, &n_bars, &model, trials, seed)?;
    let advantage: Option<Vec<f64>> = match &reference {
        None => None,
        Some(name) => Some(
            rows.iter()
                .map(|row| {
                    energy_ref_column(row, name).map(|r| advantage_db(r, row.cfsk_ser)).ok_or_else(
                        || {
                            CliError::Config(format!(
                                "reference column {name:?} is not emitted by this scan; \
                                 pick one of cfsk_hb, cfsk_sql, psk_hb, psk_sql, qam16_hb, ppm_hb \
                                 and include its kind in --kinds"
                            ))
                        },
                    )
                })
                .collect::<Result<_, _>>()?,
        ),
    };

    let mut header: Vec<&str> = SCAN_ENERGY_HEADER.to_vec();
    if reference.is_some() {
        header.push("cfsk_advantage_db");
    }
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = vec![
                fmt_float(r.n_bar),
                fmt_float(r.dwt_opt),
                fmt_float(r.dtheta_opt),
                fmt_float(r.cfsk_ser),
                fmt_float(r.cfsk_ser_ci_low),
                fmt_float(r.cfsk_ser_ci_high),
                fmt_float(r.cfsk_hb),
                fmt_float(r.cfsk_sql),
                fmt_opt(r.psk_hb),
                fmt_opt(r.psk_sql),
                fmt_opt(r.qam16_hb),
                fmt_opt(r.ppm_hb),
            ];
            if let Some(adv) = &advantage {
                row.push(fmt_float(adv[i]));
            }
            row
        })
        .collect();

    Ok(CommandOutput {
        config: to_value(&ScanEnergyConfig {
            m,
            kinds: kind_names,
            n_bars,
            trials,
            reference: reference.clone(),
            seed,
            threads,
            model,
        }),
        results: to_value(&ScanEnergyResults {
            rows,
            reference,
            advantage_db: advantage,
        }),
        csv: csv_table(&header, &csv_rows),
        notes: Vec::new(),
    })
}

// --------------------------------------------------------- scan-alphabet

#[derive(Debug, Args)]
pub struct ScanAlphabetArgs {
    /// Alphabet sizes, powers of two (comma separated)
    #[arg(long = "M", value_delimiter = ',')]
    m: Vec<usize>,
    /// Input energy per bit; n_bar = photons_per_bit * log2(M)
    #[arg(long)]
    photons_per_bit: Option<f64>,
    /// Monte Carlo trials per estimate
    #[arg(long)]
    trials: Option<u64>,
    /// Also emit the CFSK SER advantage in dB against this column
    #[arg(long = "ref", value_name = "COLUMN")]
    reference: Option<String>,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Serialize)]
struct ScanAlphabetConfig {
    ms: Vec<usize>,
    photons_per_bit: f64,
    trials: u64,
    reference: Option<String>,
    seed: u64,
    threads: Option<usize>,
    model: ReceiverModel,
}

#[derive(Serialize)]
struct ScanAlphabetResults {
    rows: Vec<AlphabetScanRow>,
    reference: Option<String>,
    advantage_db: Option<Vec<f64>>,
}

const SCAN_ALPHABET_HEADER: &[&str] = &[
    "m",
    "n_bar",
    "dwt_opt",
    "dtheta_opt",
    "cfsk_ser",
    "cfsk_ser_ci_low",
    "cfsk_ser_ci_high",
    "cfsk_hb",
    "cfsk_sql",
    "psk_ser",
    "psk_ser_ci_low",
    "psk_ser_ci_high",
    "psk_hb",
    "psk_sql",
];

fn alphabet_ref_column(row: &AlphabetScanRow, name: &str) -> Option<f64> {
    match name {
        "cfsk_hb" => Some(row.cfsk_hb),
        "cfsk_sql" => Some(row.cfsk_sql),
        "psk_ser" => Some(row.psk_ser),
        "psk_hb" => Some(row.psk_hb),
        "psk_sql" => Some(row.psk_sql),
        _ => None,
    }
}

pub fn scan_alphabet_cmd(
    args: &ScanAlphabetArgs,
    file: &FileConfig,
    seed: u64,
    threads: Option<usize>,
) -> Result<CommandOutput, CliError> {
    let ms = if !args.m.is_empty() {
        args.m.clone()
    } else {
        file_list(&file.m).unwrap_or_else(|| vec![4, 8, 16, 32, 64])
    };
    let photons_per_bit = args
        .photons_per_bit
        .or(file.photons_per_bit)
        .unwrap_or(2.0);
    let trials = args.trials.or(file.trials).unwrap_or(100_000);
    let reference = args.reference.clone().or(file.reference.clone());
    let model = resolve_model(&args.model, file)?;

    let rows = scan_alphabet(&ms, photons_per_bit, &model, trials, seed)?;
    let advantage: Option<Vec<f64>> = match &reference {
        None => None,
        Some(name) => Some(
            rows.iter()
                .map(|row| {
                    alphabet_ref_column(row, name)
                        .map(|r| advantage_db(r, row.cfsk_ser))
                        .ok_or_else(|| {
                            CliError::Config(format!(
                                "reference column {name:?} is not emitted by this scan; \
                                 pick one of cfsk_hb, cfsk_sql, psk_ser, psk_hb, psk_sql"
                            ))
                        })
                })
                .collect::<Result<_, _>>()?,
        ),
    };

    let mut header: Vec<&str> = SCAN_ALPHABET_HEADER.to_vec();
    if reference.is_some() {
        header.push("cfsk_advantage_db");
    }
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = vec![
                r.m.to_string(),
                fmt_float(r.n_bar),
                fmt_float(r.dwt_opt),
                fmt_float(r.dtheta_opt),
                fmt_float(r.cfsk_ser),
                fmt_float(r.cfsk_ser_ci_low),
                fmt_float(r.cfsk_ser_ci_high),
                fmt_float(r.cfsk_hb),
                fmt_float(r.cfsk_sql),
                fmt_float(r.psk_ser),
                fmt_float(r.psk_ser_ci_low),
                fmt_float(r.psk_ser_ci_high),
                fmt_float(r.psk_hb),
                fmt_float(r.psk_sql),
            ];
            if let Some(adv) = &advantage {
                row.push(fmt_float(adv[i]));
            }
            row
        })
        .collect();

    Ok(CommandOutput {
        config: to_value(&ScanAlphabetConfig {
            ms,
            photons_per_bit,
            trials,
            reference: reference.clone(),
            seed,
            threads,
            model,
        }),
        results: to_value(&ScanAlphabetResults {
            rows,
            reference,
            advantage_db: advantage,
        }),
        csv: csv_table(&header, &csv_rows),
        notes: Vec::new(),
    })
}

// ------------------------------------------------------------- ratio-map

#[derive(Debug, Args)]
pub struct RatioMapArgs {
    #[arg(long)]
    nbar_start: Option<f64>,
    #[arg(long)]
    nbar_stop: Option<f64>,
    #[arg(long)]
    nbar_points: Option<usize>,
    /// Smallest log2(M) on the alphabet axis
    #[arg(long)]
    log2m_min: Option<u32>,
    /// Largest log2(M) on the alphabet axis
    #[arg(long)]
    log2m_max: Option<u32>,
}

#[derive(Serialize)]
struct RatioMapConfig {
    nbar_start: f64,
    nbar_stop: f64,
    nbar_points: usize,
    log2m_min: u32,
    log2m_max: u32,
    seed: u64,
    threads: Option<usize>,
}

const RATIO_HEADER: &[&str] = &["n_bar", "log2_m", "m", "ratio"];

pub fn ratio_map(
    args: &RatioMapArgs,
    file: &FileConfig,
    seed: u64,
    threads: Option<usize>,
) -> Result<CommandOutput, CliError> {
    let nbar_start = args.nbar_start.or(file.nbar_start).unwrap_or(1.0);
    let nbar_stop = args.nbar_stop.or(file.nbar_stop).unwrap_or(16.0);
    let nbar_points = args.nbar_points.or(file.nbar_points).unwrap_or(6);
    let log2m_min = args.log2m_min.or(file.log2m_min).unwrap_or(1);
    let log2m_max = args.log2m_max.or(file.log2m_max).unwrap_or(4);
    if log2m_max <= log2m_min {
        return Err(CliError::Config(
            "the alphabet axis needs at least two sizes: log2m_max must exceed log2m_min".into(),
        ));
    }
    let n_axis = GridAxis::new("n_bar", nbar_start, nbar_stop, nbar_points)?;
    let m_axis = GridAxis::new(
        "log2_m",
        log2m_min as f64,
        log2m_max as f64,
        (log2m_max - log2m_min + 1) as usize,
    )?;
    let map = hb_ratio_map(&n_axis, &m_axis)?;

    let mut csv_rows = Vec::with_capacity(map.grid().cells());
    for ix in 0..n_axis.points {
        for iy in 0..m_axis.points {
            let log2_m = log2m_min + iy as u32;
            csv_rows.push(vec![
                fmt_float(n_axis.value(ix)),
                log2_m.to_string(),
                (1u64 << log2_m).to_string(),
                fmt_float(map.value(ix, iy)),
            ]);
        }
    }

    Ok(CommandOutput {
        config: to_value(&RatioMapConfig {
            nbar_start,
            nbar_stop,
            nbar_points,
            log2m_min,
            log2m_max,
            seed,
            threads,
        }),
        results: to_value(&map),
        csv: csv_table(RATIO_HEADER, &csv_rows),
        notes: Vec::new(),
    })
}
