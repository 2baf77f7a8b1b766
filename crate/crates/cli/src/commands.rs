//! One function per subcommand; each returns record tables and an exit code.

use crate::config::{ScenarioConfig, Settings, SweepParameter};
use crate::error::CliError;
use crate::output::Table;
use crate::row;
use polariton::fock::{enumerate_sectors, AmplitudeTensor};
use polariton::reduce::{
    analyze, entangled_pair_eigenproblem, one_polariton, partial_trace_oracle, reduced_density, two_polariton,
    DecoherenceReport,
};
use polariton::{BlockScatteringMatrix, Character, ScatteringScenario, Signature, C64};

pub struct Report {
    pub tables: Vec<Table>,
    pub status: i32,
}

impl Report {
    fn ok(tables: Vec<Table>) -> Self {
        Self { tables, status: 0 }
    }
}

fn sig_cells(sig: Signature) -> [usize; 3] {
    [sig.p, sig.q, sig.r]
}

fn eigenvalue_table(record: &'static str, values: &[f64]) -> Table {
    let mut t = Table::new(record, &["index", "value"]);
    for (i, &v) in values.iter().enumerate() {
        t.push(row![i, v]);
    }
    t
}

fn report_table(rep: &DecoherenceReport<f64>, extra: Option<f64>) -> Table {
    let mut cols = vec!["trace", "purity", "entropy", "schmidt_rank"];
    if extra.is_some() {
        cols.push("max_oracle_deviation");
    }
    let mut t = Table::new("report", &cols);
    let mut r = row![rep.trace, rep.purity, rep.von_neumann_entropy, rep.schmidt_rank_estimate];
    if let Some(x) = extra {
        r.push(x.into());
    }
    t.push(r);
    t
}

pub fn validate(cfg: &ScenarioConfig, settings: &Settings) -> Result<Report, CliError> {
    let (space, mats) = cfg.matrices(settings)?;
    let tau = settings.tolerances.unitary;
    let mut sectors = Table::new(
        "sector",
        &[
            "sector",
            "frequency",
            "n_s",
            "n_e",
            "n_m",
            "max_residual",
            "is_unitary",
            "is_lossless",
            "kernel_sum_residual",
            "kernel_min_eigenvalue",
        ],
    );
    let mut all_unitary = true;
    let mut all_lossless = true;
    for (k, (z, sec)) in mats.iter().zip(space.sectors()).enumerate() {
        let v = z.validate(tau);
        let kern = z.kernels();
        all_unitary &= v.is_unitary;
        all_lossless &= v.is_lossless;
        sectors.push(row![
            k,
            sec.frequency,
            sec.n_s,
            sec.n_e,
            sec.n_m,
            v.max_residual,
            v.is_unitary,
            v.is_lossless,
            kern.sum_residual(),
            kern.min_eigenvalue()
        ]);
    }
    let mut summary = Table::new("summary", &["all_unitary", "all_lossless", "tolerance"]);
    summary.push(row![all_unitary, all_lossless, tau]);
    let mut tables = vec![sectors, summary];
    if all_unitary && cfg.input.is_some() {
        let sc = cfg.scenario_with(space, mats, settings)?;
        let rep = sc.ingest_report();
        let mut input = Table::new("input", &["norm_before", "renormalized", "max_n", "s_only"]);
        input.push(row![rep.norm_before, rep.renormalized, sc.psi_in().max_n(), sc.psi_in().is_s_only()]);
        tables.push(input);
    }
    Ok(Report { tables, status: if all_unitary { 0 } else { 2 } })
}

fn amplitude_rows(t: &mut Table, tensor: &AmplitudeTensor<f64>) {
    let [p, q, r] = sig_cells(tensor.signature());
    for (tuple, v) in tensor.iter() {
        t.push(row![p, q, r, tuple.s.clone(), tuple.e.clone(), tuple.m.clone(), v.re, v.im]);
    }
}

pub fn scatter(cfg: &ScenarioConfig, settings: &Settings, tensors: bool) -> Result<Report, CliError> {
    let sc = cfg.scenario(settings)?;
    let state = sc.full_output_state()?;
    let s_only = sc.psi_in().is_s_only();
    let mut sectors = Table::new(
        "sector",
        &["N", "P", "Q", "R", "probability", "kernel_route", "amplitude_route", "route_deviation"],
    );
    let mut amps = Table::new("amplitude", &["P", "Q", "R", "s", "e", "m", "re", "im"]);
    let (mut total_kernel, mut total_amp, mut worst) = (0.0, 0.0, 0.0f64);
    for n in sc.psi_in().numbers() {
        for sig in enumerate_sectors(n, sc.mode_space()) {
            let amp = state.get(&sig).map_or(0.0, AmplitudeTensor::norm_sqr);
            total_amp += amp;
            let kernel = if s_only { Some(sc.sector_probability(sig)?) } else { None };
            let (prob, dev) = match kernel {
                Some(k) => {
                    total_kernel += k.probability;
                    worst = worst.max((k.raw - amp).abs());
                    (k.probability, Some((k.raw - amp).abs()))
                }
                None => (amp, None),
            };
            let [p, q, r] = sig_cells(sig);
            sectors.push(row![n, p, q, r, prob, kernel.map(|k| k.raw), amp, dev]);
            if tensors {
                if let Some(t) = state.get(&sig) {
                    amplitude_rows(&mut amps, t);
                }
            }
        }
    }
    let mut norm = Table::new("norm", &["kernel_total", "amplitude_total", "max_route_deviation"]);
    norm.push(row![s_only.then_some(total_kernel), total_amp, s_only.then_some(worst)]);
    let mut tables = vec![sectors, norm];
    if tensors {
        tables.push(amps);
    }
    Ok(Report::ok(tables))
}

pub fn reduce(cfg: &ScenarioConfig, settings: &Settings, oracle: bool) -> Result<Report, CliError> {
    let sc = cfg.scenario(settings)?;
    let rho = reduced_density(&sc)?;
    let rep = analyze(&rho)?;
    let reference = if oracle { Some(partial_trace_oracle(&sc)?) } else { None };
    let mut cols = vec!["P", "P'", "tuple_row", "tuple_col", "re", "im"];
    if oracle {
        cols.extend(["oracle_re", "oracle_im", "deviation"]);
    }
    let mut entries = Table::new("rho", &cols);
    let records = rho.to_records();
    let others = reference.as_ref().map(|r| r.to_records());
    for (i, rec) in records.iter().enumerate() {
        let mut r = row![rec.p, rec.p_prime, rec.tuple_row.clone(), rec.tuple_col.clone(), rec.re, rec.im];
        if let Some(o) = &others {
            let o = &o[i];
            let dev = (C64::new(rec.re, rec.im) - C64::new(o.re, o.im)).norm();
            r.extend(row![o.re, o.im, dev]);
        }
        entries.push(r);
    }
    let max_dev = reference.as_ref().map(|r| rho.max_deviation(r));
    Ok(Report::ok(vec![entries, report_table(&rep, max_dev), eigenvalue_table("eigenvalue", &rep.eigenvalues)]))
}

pub fn one_photon(cfg: &ScenarioConfig, settings: &Settings) -> Result<Report, CliError> {
    let sc = cfg.scenario(settings)?;
    let one = one_polariton(&sc)?;
    let rho = reduced_density(&sc)?;
    let rep = analyze(&rho)?;
    let mut probs = Table::new("one_polariton", &["p_s", "p_e", "p_m", "sum", "reconstruction_deviation"]);
    let dev = one.reconstruct(sc.mode_space()).max_deviation(&rho);
    probs.push(row![one.p_s, one.p_e, one.p_m, one.p_s + one.p_e + one.p_m, dev]);
    let mut phi = Table::new("phi_1s", &["mode", "re", "im"]);
    if let Some(t) = &one.phi_1s {
        for (tuple, v) in t.iter() {
            phi.push(row![tuple.s[0], v.re, v.im]);
        }
    }
    Ok(Report::ok(vec![probs, phi, eigenvalue_table("eigenvalue", &rep.eigenvalues)]))
}

pub fn two_photon(cfg: &ScenarioConfig, settings: &Settings) -> Result<Report, CliError> {
    let sc = cfg.scenario(settings)?;
    let two = two_polariton(&sc)?;
    let rho = reduced_density(&sc)?;
    let mut pairs = Table::new("pair_probability", &["channel", "probability"]);
    for (name, p) in two.probabilities.as_array() {
        pairs.push(row![name, p]);
    }
    let mut summary = Table::new("two_polariton", &["sum", "vacuum_weight", "reconstruction_deviation"]);
    let dev = two.reconstruct(sc.mode_space()).max_deviation(&rho);
    summary.push(row![two.probabilities.sum(), two.vacuum_weight, dev]);
    let direct: Vec<f64> = two.rho_1s.as_ref().map(|r| r.eigenvalues.clone()).unwrap_or_default();
    let mut vectors = Table::new("rho_1s_eigenvector", &["index", "mode", "re", "im"]);
    if let Some(r) = &two.rho_1s {
        let modes = sc.mode_space().modes(Character::S);
        for k in 0..r.eigenvalues.len().min(2) {
            for (i, &mode) in modes.iter().enumerate() {
                let v = r.eigenvectors[(i, k)];
                vectors.push(row![k, mode, v.re, v.im]);
            }
        }
    }
    let mut tables = vec![pairs, summary, eigenvalue_table("rho_1s_eigenvalue", &direct), vectors];

    if let Some((phi1, phi2)) = cfg.input.as_ref().and_then(|i| i.entangled_vectors()) {
        let eig = entangled_pair_eigenproblem(&sc, &phi1, &phi2)?;
        let mut t = Table::new("entangled_eigen", &["index", "eigenvalue", "direct", "deviation"]);
        for k in 0..2 {
            let d = direct.get(k).copied().unwrap_or(0.0);
            t.push(row![k, eig.eigenvalues[k], d, (eig.eigenvalues[k] - d).abs()]);
        }
        let mut states = Table::new("entangled_state", &["index", "mode", "re", "im"]);
        let modes = sc.mode_space().modes(Character::S);
        for (k, s) in eig.states.iter().enumerate() {
            for (i, &mode) in modes.iter().enumerate() {
                states.push(row![k, mode, s[i].re, s[i].im]);
            }
        }
        tables.push(t);
        tables.push(states);
    }
    Ok(Report::ok(tables))
}

fn swept_matrices(
    base: &[BlockScatteringMatrix],
    parameter: SweepParameter,
    value: f64,
    fixed_eta: f64,
    fixed_loss: f64,
    tau: f64,
) -> Result<Vec<BlockScatteringMatrix>, CliError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(CliError::Validation(format!("sweep value {value} outside [0, 1]")));
    }
    let (loss, eta) = match parameter {
        SweepParameter::Loss => (value, fixed_eta),
        SweepParameter::EtaE => (fixed_loss, value),
    };
    base.iter()
        .map(|z| {
            let t = z.t() * C64::new((1.0 - loss).sqrt(), 0.0);
            Ok(BlockScatteringMatrix::dilate_transmission(&t, eta, tau)?.with_sector(z.sector()))
        })
        .collect()
}

pub fn sweep(
    cfg: &ScenarioConfig,
    settings: &Settings,
    parameter: Option<SweepParameter>,
    grid: Option<Vec<f64>>,
) -> Result<Report, CliError> {
    let spec = cfg.sweep.as_ref();
    let parameter = parameter
        .or(spec.map(|s| s.parameter))
        .ok_or_else(|| CliError::Parse("sweep needs a parameter ([sweep] parameter or --parameter)".into()))?;
    let grid = match grid {
        Some(g) => g,
        None => spec
            .ok_or_else(|| CliError::Parse("sweep needs a grid ([sweep] section or --grid)".into()))?
            .grid()?,
    };
    let fixed_eta = spec.map_or(0.5, |s| s.eta_e);
    let fixed_loss = spec.map_or(0.0, |s| s.loss);
    let (space, base) = cfg.matrices(settings)?;
    let tau = settings.tolerances.unitary;

    let mut main = Table::new("sweep", &["parameter", "value", "purity", "entropy", "schmidt_rank", "trace"]);
    let mut sectors = Table::new("sweep_sector", &["value", "P", "Q", "R", "probability"]);
    let mut eig = Table::new("sweep_rho_1s", &["value", "index", "eigenvalue"]);
    for &value in &grid {
        let mats = swept_matrices(&base, parameter, value, fixed_eta, fixed_loss, tau)
            .map_err(|e| e.context(format!("{}={value}", parameter.name())))?;
        let sc: ScatteringScenario = cfg.scenario_with(space.clone(), mats, settings)?;
        let rep = analyze(&reduced_density(&sc)?)?;
        main.push(row![parameter.name(), value, rep.purity, rep.von_neumann_entropy, rep.schmidt_rank_estimate, rep.trace]);
        for n in sc.psi_in().numbers() {
            for sig in enumerate_sectors(n, sc.mode_space()) {
                let [a, b, c] = sig_cells(sig);
                sectors.push(row![value, a, b, c, sc.sector_probability(sig)?.probability]);
            }
        }
        if sc.psi_in().components().len() == 1 && sc.psi_in().s_component(2).is_some() {
            if let Some(r) = two_polariton(&sc)?.rho_1s {
                for (k, l) in r.eigenvalues.iter().enumerate() {
                    eig.push(row![value, k, *l]);
                }
            }
        }
    }
    Ok(Report::ok(vec![main, sectors, eig]))
}
