use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use qsampler_core::classical::{
    h0_energy, libration_ratio, poincare_section, Integrator, PhasePoint, Scheme,
    DEFAULT_STEPS_PER_PERIOD,
};
use qsampler_core::diagnostics::{
    cue_surmise_cdf, husimi_grid, ipr_set, ks_distance, porter_thomas_cdf, scaled_moments,
    spacing_sample, trans_moments, transition_matrix,
};
use qsampler_core::harper::{
    drift_propagator, floquet_propagator, h0_eigenbasis, Basis, HarperParams,
};
use qsampler_core::io::{to_pair_rows, write_c128};
use qsampler_core::linalg::{eig_unitary, eigenphases, unitarity_defect, DEFAULT_UNITARY_TOL};
use qsampler_core::samplers::{
    builtin_samplers, epsilon_report, estimate_records, factorial, frame_potentials, haar_unitary,
    sample_pair_traces, sampler_by_name, substream, Sampler, DEFAULT_KS, HAAR_CONTROL,
};
use qsampler_core::weyl::op_decompose;
use qsampler_core::{Unitary, C64, VERSION};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    self, BasisChoice, Diagnostic, DiagnosticsConfig, FrameConfig, MatrixFormat, PoincareConfig,
    PropagatorConfig, Source,
};
use crate::error::CliError;
use crate::{Common, Format};

type Res = Result<(), CliError>;

fn create(out: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    fs::create_dir_all(out)?;
    Ok(BufWriter::new(File::create(out.join(name))?))
}

fn write_json<T: Serialize + ?Sized>(out: &Path, name: &str, value: &T) -> Res {
    let mut w = create(out, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Writes a table as CSV (header plus rows) or as a JSON array of objects.
fn write_table(out: &Path, stem: &str, format: Format, columns: &[&str], rows: &[Vec<Value>]) -> Res {
    match format {
        Format::Csv => {
            let mut w = create(out, &format!("{stem}.csv"))?;
            writeln!(w, "{}", columns.join(","))?;
            for row in rows {
                let cells: Vec<String> = row.iter().map(Value::to_string).collect();
                writeln!(w, "{}", cells.join(","))?;
            }
            w.flush()?;
            Ok(())
        }
        Format::Json => {
            let objects: Vec<Value> = rows
                .iter()
                .map(|row| {
                    Value::Object(
                        columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.clone()))
                            .collect(),
                    )
                })
                .collect();
            write_json(out, &format!("{stem}.json"), &objects)
        }
    }
}

fn build(source: &Source, n_tau: usize, seed: u64) -> Result<Unitary, CliError> {
    Ok(match source {
        Source::Floquet { params, .. } => floquet_propagator(params, n_tau)?,
        Source::Drift { schedule, .. } => drift_propagator(schedule, n_tau)?,
        Source::Haar { n } => haar_unitary(*n, &mut substream(seed, 0)),
    })
}

fn check_unitary(u: &Unitary) -> Result<f64, CliError> {
    let defect = unitarity_defect(u.matrix());
    if defect.is_nan() || defect >= DEFAULT_UNITARY_TOL {
        return Err(CliError::Contract(format!("propagator unitarity defect {defect:e}")));
    }
    Ok(defect)
}

fn source_json(source: &Source) -> Value {
    match source {
        Source::Floquet { params, .. } => json!({ "params": params }),
        Source::Drift { schedule, .. } => json!({ "drift": schedule }),
        Source::Haar { n } => json!({ "N": n }),
    }
}

pub fn propagator(c: &Common) -> Res {
    let cfg: PropagatorConfig = config::load(c.config.as_deref())?;
    let seed = c.seed.or(cfg.seed).unwrap_or(0);
    let source = cfg.source.resolve()?;
    let n_tau = cfg.source.n_tau(source.dim())?;
    let u = build(&source, n_tau, seed)?;
    let defect = check_unitary(&u)?;

    let matrix_file = match cfg.matrix_format {
        MatrixFormat::Binary => {
            let mut w = create(&c.out, "propagator.c128")?;
            let header = write_c128(u.matrix(), &mut w)?;
            w.flush()?;
            write_json(&c.out, "propagator.c128.json", &header)?;
            "propagator.c128"
        }
        MatrixFormat::Json => {
            write_json(&c.out, "propagator.json", &to_pair_rows(u.matrix()))?;
            "propagator.json"
        }
    };
    let rows: Vec<Vec<Value>> = eigenphases(&u)
        .into_iter()
        .enumerate()
        .map(|(i, t)| vec![json!(i), json!(t)])
        .collect();
    write_table(&c.out, "eigenphases", c.format, &["index", "theta"], &rows)?;
    write_json(
        &c.out,
        "metadata.json",
        &json!({
            "command": "propagator",
            "version": VERSION,
            "seed": seed,
            "source": source.name(),
            "N": source.dim(),
            "definition": source_json(&source),
            "n_tau": n_tau,
            "defect": defect,
            "matrix": matrix_file,
        }),
    )
}

fn resolve_sampler(cfg: &FrameConfig) -> Result<Sampler, CliError> {
    let mut sampler = match (&cfg.sampler, &cfg.spec) {
        (Some(name), None) => sampler_by_name(name)?,
        (None, Some(spec)) => Sampler::Harper(spec.clone()),
        _ => return Err(CliError::Config("exactly one of `sampler` or `spec` is required".into())),
    };
    if let Some(n) = cfg.n {
        match &mut sampler {
            Sampler::Haar { n: dim } => *dim = n,
            Sampler::Harper(spec) => spec.n = n,
        }
    }
    sampler.validate()?;
    Ok(sampler)
}

pub fn frame_potential(c: &Common) -> Res {
    let cfg: FrameConfig = config::load(c.config.as_deref())?;
    let seed = c.seed.or(cfg.seed).unwrap_or(0);
    let sampler = resolve_sampler(&cfg)?;
    let n_pairs = cfg.n_pairs.unwrap_or(500);
    let n_tau = cfg.n_tau.unwrap_or_else(|| sampler.default_n_tau());
    if n_tau == 0 {
        return Err(CliError::Config("n_tau must be positive".into()));
    }
    let ks = cfg.ks.clone().unwrap_or_else(|| DEFAULT_KS.to_vec());

    let start = Instant::now();
    let z = sample_pair_traces(&sampler, n_pairs, seed, n_tau)?;
    let estimates = frame_potentials(&z, &ks)?;
    let runtime = start.elapsed().as_secs_f64();
    let eps = epsilon_report(&estimates);

    let rows: Vec<Vec<Value>> = z.iter().enumerate().map(|(i, z)| vec![json!(i), json!(z)]).collect();
    write_table(&c.out, "pair_traces", c.format, &["pair", "z"], &rows)?;
    let rows: Vec<Vec<Value>> = estimates
        .iter()
        .zip(&eps.entries)
        .map(|(e, x)| {
            vec![json!(e.k), json!(e.value), json!(e.std_err), json!(factorial(e.k)), json!(x.epsilon), json!(x.error_floor)]
        })
        .collect();
    write_table(
        &c.out,
        "frame_potentials",
        c.format,
        &["k", "F", "sigma", "haar", "epsilon", "error_floor"],
        &rows,
    )?;
    let definition = match &sampler {
        Sampler::Haar { n } => json!({ "name": HAAR_CONTROL, "N": n }),
        Sampler::Harper(spec) => json!(spec),
    };
    write_json(
        &c.out,
        "report.json",
        &json!({
            "command": "frame-potential",
            "version": VERSION,
            "seed": seed,
            "sampler": sampler.name(),
            "N": sampler.dim(),
            "n_pairs": n_pairs,
            "n_tau": n_tau,
            "spec": definition,
            "estimates": estimate_records(sampler.name(), seed, &estimates),
            "epsilon": eps,
            "runtime_s": runtime,
        }),
    )
}

pub fn diagnostics(c: &Common) -> Res {
    let cfg: DiagnosticsConfig = config::load(c.config.as_deref())?;
    let seed = c.seed.or(cfg.seed).unwrap_or(0);
    let source = cfg.source.resolve()?;
    let n = source.dim();
    let n_tau = cfg.source.n_tau(n)?;
    if cfg.diagnostics.is_empty() {
        return Err(CliError::Config("`diagnostics` must list at least one diagnostic".into()));
    }
    let u = build(&source, n_tau, seed)?;
    let defect = check_unitary(&u)?;
    let basis = match cfg.basis {
        BasisChoice::Angle => Basis::angle(n),
        BasisChoice::H0 => {
            let p = match (cfg.h0_params, &source) {
                (Some(p), _) => p,
                (None, Source::Floquet { params, .. }) => *params,
                (None, Source::Drift { schedule, .. }) => schedule.initial,
                (None, Source::Haar { n }) => HarperParams::u_ta(*n),
            };
            if p.n != n {
                return Err(CliError::Config(format!("h0_params.N = {} but the source has N = {n}", p.n)));
            }
            h0_eigenbasis(&p)?
        }
    };

    let mut results = serde_json::Map::new();
    for d in &cfg.diagnostics {
        let (key, value) = match d {
            Diagnostic::Spacing => {
                let s = spacing_sample(&eigenphases(&u))?;
                let rows: Vec<Vec<Value>> = s.spacings.iter().enumerate().map(|(i, x)| vec![json!(i), json!(x)]).collect();
                write_table(&c.out, "spacings", c.format, &["index", "s"], &rows)?;
                let ks = ks_distance(&s.spacings, cue_surmise_cdf);
                ("spacing", json!({ "count": s.spacings.len(), "ks_surmise": ks, "surmise_form": cfg.surmise_form }))
            }
            Diagnostic::Moments => {
                let t = transition_matrix(&u, &basis)?;
                let mut rows = Vec::with_capacity(n * n);
                for j in 0..n {
                    for k in 0..n {
                        rows.push(vec![json!(j), json!(k), json!(t.z[(j, k)])]);
                    }
                }
                write_table(&c.out, "transitions", c.format, &["j", "k", "z"], &rows)?;
                let zs: Vec<f64> = t.z.iter().copied().collect();
                let pt = ks_distance(&zs, |z| porter_thomas_cdf(z.max(0.0), n));
                ("moments", json!({ "basis": basis.label, "report": trans_moments(&t), "porter_thomas_sup": pt }))
            }
            Diagnostic::Ipr => {
                let qs = cfg.q.clone().unwrap_or_else(|| vec![2, 3]);
                let mut rows = Vec::new();
                let mut summary = Vec::new();
                for &q in &qs {
                    let s = ipr_set(&u, &basis, q)?;
                    let len = s.len() as f64;
                    let mean = s.iter().sum::<f64>() / len;
                    let se = (s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / len / len).sqrt();
                    summary.push(json!({
                        "q": q,
                        "mean": mean,
                        "se": se,
                        "haar": factorial(q) * (n as f64).powi(1 - q as i32),
                    }));
                    rows.extend(s.iter().enumerate().map(|(j, v)| vec![json!(j), json!(q), json!(v)]));
                }
                write_table(&c.out, "ipr", c.format, &["j", "q", "value"], &rows)?;
                ("ipr", json!({ "basis": basis.label, "sets": summary }))
            }
            Diagnostic::OpCoefficients => {
                let w = op_decompose(u.matrix())?;
                let weights = w.weights();
                let mut rows = Vec::with_capacity(n * n);
                for j in 0..n {
                    for k in 0..n {
                        rows.push(vec![json!(j), json!(k), json!(weights[j * n + k])]);
                    }
                }
                write_table(&c.out, "op_coefficients", c.format, &["j", "k", "weight"], &rows)?;
                let sum = w.parseval_sum();
                let moments = scaled_moments(&w.scaled_weights())?;
                ("op-coefficients", json!({ "parseval_sum": sum, "parseval_defect": (sum - n as f64).abs(), "moments": moments }))
            }
            Diagnostic::Husimi => {
                let r = cfg.husimi_resolution.unwrap_or(n);
                let count = cfg.husimi_states.unwrap_or(1).min(n);
                let eig = eig_unitary(&u);
                let mut states = Vec::with_capacity(count);
                for i in 0..count {
                    let v = eig.eigenvectors.column(i).into_owned();
                    let psi = &v / C64::new(v.norm(), 0.0);
                    let g = husimi_grid(&psi, r)?;
                    let mut rows = Vec::with_capacity(r * r);
                    for row in 0..r {
                        for col in 0..r {
                            rows.push(vec![json!(row), json!(col), json!(g.get(row, col))]);
                        }
                    }
                    write_table(&c.out, &format!("husimi_{i}"), c.format, &["row", "col", "q"], &rows)?;
                    states.push(json!({ "state": i, "quasi_energy": eig.phases[i], "occupancy": g.occupancy(0.1) }));
                }
                ("husimi", json!({ "resolution": r, "states": states }))
            }
        };
        results.insert(key.to_string(), value);
    }
    write_json(
        &c.out,
        "diagnostics.json",
        &json!({
            "command": "diagnostics",
            "version": VERSION,
            "seed": seed,
            "source": source.name(),
            "N": n,
            "n_tau": n_tau,
            "defect": defect,
            "results": results,
        }),
    )
}

pub fn poincare(c: &Common) -> Res {
    let cfg: PoincareConfig = config::load(c.config.as_deref())?;
    let seed = c.seed.or(cfg.seed).unwrap_or(0);
    let params = cfg.classical_params()?;
    params.validate()?;
    let initials: Vec<PhasePoint> = match &cfg.initials {
        Some(list) => list.iter().map(|&[phi, p]| PhasePoint::new(phi, p)).collect(),
        None => {
            let mut rng = substream(seed, 0);
            (0..cfg.n_orbits.unwrap_or(10))
                .map(|_| {
                    let phi = rng.random_range(0.0..std::f64::consts::TAU);
                    let p = rng.random_range(0.0..std::f64::consts::TAU);
                    PhasePoint::new(phi, p)
                })
                .collect()
        }
    };
    if initials.is_empty() {
        return Err(CliError::Config("no initial conditions".into()));
    }
    let n_periods = cfg.n_periods.unwrap_or(500);
    let steps = cfg.steps_per_period.unwrap_or(DEFAULT_STEPS_PER_PERIOD);
    let section = poincare_section(&initials, &params, n_periods, steps)?;

    let mut rows = Vec::with_capacity(section.n_points());
    for (id, orbit) in section.orbits.iter().enumerate() {
        for (i, x) in orbit.points.iter().enumerate() {
            rows.push(vec![json!(id), json!(i + 1), json!(x.phi), json!(x.p)]);
        }
    }
    write_table(&c.out, "section", c.format, &["orbit_id", "n", "phi", "p"], &rows)?;

    let (omega0, lambda) = match libration_ratio(&params) {
        Ok((w, l)) => (Some(w), Some(l)),
        Err(_) => (None, None),
    };
    // H₀ is only conserved without the time-dependent perturbation
    let max_h0_drift = (params.mu == 0.0 && params.mu_prime == 0.0).then(|| {
        let integ = Integrator::new(params, steps).expect("step count already validated");
        initials
            .iter()
            .map(|&x| integ.max_h0_drift(x, n_periods))
            .fold(0.0, f64::max)
    });
    let energies: Vec<f64> = initials.iter().map(|&x| h0_energy(x, &params)).collect();
    write_json(
        &c.out,
        "metadata.json",
        &json!({
            "command": "poincare",
            "version": VERSION,
            "seed": seed,
            "params": {
                "a": params.a, "b": params.b, "epsilon": params.epsilon, "mu": params.mu,
                "mu_prime": params.mu_prime, "phi0": params.phi0, "tau0": params.tau0,
            },
            "omega0": omega0,
            "lambda": lambda,
            "n_orbits": initials.len(),
            "n_periods": n_periods,
            "steps_per_period": steps,
            "scheme": Scheme::default(),
            "rows": section.n_points(),
            "initial_h0": energies,
            "max_h0_drift": max_h0_drift,
        }),
    )
}

pub fn list_samplers(c: &Common) -> Res {
    let specs = builtin_samplers();
    let mut text = String::new();
    match c.format {
        Format::Csv => {
            text.push_str("name,mode,N,distributed\n");
            text.push_str(&format!("{HAAR_CONTROL},haar,51,\n"));
            for s in &specs {
                let targets: Vec<String> = s.distributions.iter().map(|d| d.target.to_string()).collect();
                let mode = serde_json::to_value(s.mode)?;
                text.push_str(&format!(
                    "{},{},{},{}\n",
                    s.name,
                    mode.as_str().unwrap_or_default(),
                    s.n,
                    targets.join(" ")
                ));
            }
        }
        Format::Json => {
            text = serde_json::to_string_pretty(&specs)?;
            text.push('\n');
        }
    }
    // a closed pipe (`| head`) is not an error for a listing
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}
