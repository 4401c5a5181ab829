use std::path::{Path, PathBuf};

use pe_excite::ddctl::{lift_trajectory, table1_experiment, Table1Config};
use pe_excite::excite::{
    flat_design, hammerstein_train, impulse_train, random_eta_heuristic, solve_lambda_feasibility,
    DEFAULT_COND_CAP,
};
use pe_excite::io::{read_time_series, write_json, write_records, write_time_series};
use pe_excite::plant::{simulate, AnyPlant, Plant, PlantSpec};
use pe_excite::{
    build_dictionary, build_mosaic_hankel, membership, pe_check, predict, BasisSet, ExcitationPlan,
    PeDefinition, PeReport, TimeSeries,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{DefinitionKind, DesignKind, LiftKind, ScenarioConfig as Cfg};
use crate::error::CliError;

type Res<T> = Result<T, CliError>;

/// Default residual tolerance for membership queries.
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-6;

fn seed_of(cfg: &Cfg) -> u64 {
    cfg.seed.unwrap_or_else(|| {
        let s = rand::random();
        eprintln!("seed: {s}");
        s
    })
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Res<()> {
    match out {
        Some(p) => Ok(write_json(p, value)?),
        None => {
            let s = serde_json::to_string_pretty(value)
                .map_err(|e| CliError::Io(e.to_string()))?;
            println!("{s}");
            Ok(())
        }
    }
}

fn load_plant(path: &Path) -> Res<AnyPlant> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let spec: PlantSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("plant {}: {e}", path.display())))?;
    Ok(spec.build()?)
}

fn read_all(paths: &[PathBuf], flag: &str) -> Res<Vec<TimeSeries>> {
    if paths.is_empty() {
        return Err(CliError::Usage(format!("missing required --{flag}")));
    }
    paths
        .iter()
        .map(|p| {
            read_time_series(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        })
        .collect()
}

fn read_one(path: &Option<PathBuf>, flag: &str) -> Res<TimeSeries> {
    let p = Cfg::require(path, flag)?;
    read_time_series(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
}

/// Columns separated by `;`, coordinates by `,`.
fn parse_amplitudes(text: &str) -> Res<Vec<Vec<f64>>> {
    text.split(';')
        .map(|col| {
            col.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("invalid amplitude {v:?}")))
                })
                .collect()
        })
        .collect()
}

#[derive(Serialize)]
struct DesignSummary<'a> {
    plan: &'a ExcitationPlan,
    claim: String,
    minimum_horizon: usize,
    files: Vec<PathBuf>,
}

pub fn design(cfg: &Cfg) -> Res<()> {
    let kind = Cfg::require(&cfg.kind, "kind")?;
    let (plan, claim, min_n) = match kind {
        DesignKind::Lti => {
            let m = Cfg::require(&cfg.m, "m")?;
            let l = Cfg::require(&cfg.order, "L")?;
            let alpha = cfg.alpha.unwrap_or(1.0);
            let min_n = (m + 1) * l - 1;
            let plan = impulse_train(m, l, cfg.horizon.unwrap_or(min_n), alpha)?;
            let claim = format!(
                "rank H_{l}(u) = {} with every singular value equal to {alpha}",
                m * l
            );
            (plan, claim, min_n)
        }
        DesignKind::Hammerstein => {
            let m = cfg.m.unwrap_or(1);
            let t = Cfg::require(&cfg.t, "t")?;
            let l = Cfg::require(&cfg.order, "L")?;
            let basis = BasisSet::monomial(0, m, t)?;
            let r = basis.len();
            let amplitudes = match &cfg.amplitudes {
                Some(text) => parse_amplitudes(text)?,
                None => {
                    let a = cfg.alpha.unwrap_or(1.0);
                    let mut rng = ChaCha8Rng::seed_from_u64(seed_of(cfg));
                    let budget = cfg.attempts.unwrap_or(1000);
                    solve_lambda_feasibility(&basis, (-a, a), budget, DEFAULT_COND_CAP, &mut rng)?
                        .amplitudes
                }
            };
            let min_n = (r + 1) * l - 1;
            let plan = hammerstein_train(&basis, &amplitudes, l, cfg.horizon.unwrap_or(min_n))?;
            (plan, format!("rank H_{l}(Theta(u)) = {}", r * l), min_n)
        }
        DesignKind::Flat => {
            let n = Cfg::require(&cfg.n, "n")?;
            let t = cfg.t.unwrap_or(1);
            let l = cfg.order.unwrap_or(1);
            let min_n = 2 * l + n - 1;
            let plan = flat_design(n, t as usize, &cfg.deltas, l, cfg.horizon.unwrap_or(min_n))?;
            let r = t as usize * (n + 1);
            (plan, format!("rank H_1(Theta) = {r} with the flat monomial basis"), min_n)
        }
        DesignKind::RandomEta => {
            let plant = load_plant(&Cfg::require(&cfg.plant, "plant")?)?;
            let t = Cfg::require(&cfg.t, "t")?;
            let basis = BasisSet::monomial(plant.state_dim(), plant.input_dim(), t)?;
            let r = basis.len();
            let mu = cfg.mu.unwrap_or(plant.state_dim());
            let l = cfg.order.unwrap_or(1);
            let a = cfg.alpha.unwrap_or(1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed_of(cfg));
            let attempts = cfg.attempts.unwrap_or(1000);
            let (plan, w) =
                random_eta_heuristic(r, mu, (-a, a), &plant, &basis, l, attempts, &mut rng)?;
            let inv = pe_excite::check_invertible(&w, cfg.tolerance());
            let claim = format!(
                "W invertible (condition {:e}); rank H_1(Theta) = {r}",
                inv.condition
            );
            (plan, claim, 2 * l + mu - 1)
        }
    };

    let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for (j, u) in plan.experiments.iter().enumerate() {
        let p = dir.join(format!("experiment_{}.csv", j + 1));
        write_time_series(&p, u)?;
        files.push(p);
    }
    let plan_path = dir.join("plan.json");
    write_json(&plan_path, &plan)?;
    println!("{claim}");
    println!("minimum horizon {min_n}, used {:?}", plan.horizons());
    println!("wrote {} and {} experiment file(s)", plan_path.display(), files.len());
    if let Some(out) = &cfg.out {
        let summary = DesignSummary {
            plan: &plan,
            claim,
            minimum_horizon: min_n,
            files,
        };
        write_json(out, &summary)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct VerifyReport {
    definition: DefinitionKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    warning: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    basis: Vec<String>,
    report: PeReport,
}

fn lift(cfg: &Cfg, data: Vec<TimeSeries>) -> Res<(Vec<TimeSeries>, Vec<String>)> {
    match cfg.lift.unwrap_or(LiftKind::None) {
        LiftKind::None => Ok((data, Vec::new())),
        LiftKind::Input => {
            let t = Cfg::require(&cfg.t, "t")?;
            let basis = BasisSet::monomial(0, data[0].dim(), t)?;
            let lifted = data
                .iter()
                .map(|u| pe_excite::excite::lift_inputs(&basis, u))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((lifted, basis.labels()))
        }
        LiftKind::State => {
            let plant = load_plant(&Cfg::require(&cfg.plant, "plant")?)?;
            let t = Cfg::require(&cfg.t, "t")?;
            let basis = BasisSet::monomial(plant.state_dim(), plant.input_dim(), t)?;
            let x0 = vec![0.0; plant.state_dim()];
            let mut lifted = Vec::with_capacity(data.len());
            for u in &data {
                let traj = simulate(&plant, &x0, u)?;
                if traj.diverged() {
                    return Err(CliError::Failed("simulation diverged".into()));
                }
                lifted.push(lift_trajectory(&traj, &basis)?);
            }
            Ok((lifted, basis.labels()))
        }
    }
}

pub fn verify(cfg: &Cfg) -> Res<()> {
    let l = Cfg::require(&cfg.order, "L")?;
    let definition = cfg.definition.unwrap_or(DefinitionKind::Order);
    let data = read_all(&cfg.input, "input")?;
    let (series, basis) = lift(cfg, data)?;
    let view = build_mosaic_hankel(&series, l)?;
    let report = pe_check(&view, cfg.tolerance());
    let alpha = match definition {
        DefinitionKind::Alpha => Some(Cfg::require(&cfg.alpha, "alpha")?),
        _ => None,
    };
    let def = match definition {
        DefinitionKind::Order => PeDefinition::Order,
        DefinitionKind::Exciting => PeDefinition::Exciting,
        DefinitionKind::Alpha => PeDefinition::Alpha(alpha.unwrap_or_default()),
    };
    let passed = report.passes(def);
    let warning = (!report.shape_ok).then(|| {
        format!(
            "Hankel matrix has {} rows but only {} columns; order {l} needs more samples",
            report.rows, report.cols
        )
    });
    if let Some(w) = &warning {
        eprintln!("warning: {w}");
    }
    println!(
        "{}: rank {} of {} rows, sigma_min {:e}",
        if passed { "PASS" } else { "FAIL" },
        report.rank,
        report.rows,
        report.sigma_min
    );
    let out = VerifyReport {
        definition,
        alpha,
        passed,
        warning,
        basis,
        report,
    };
    emit_json(cfg.out.as_deref(), &out)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed("requested excitation definition not met".into()))
    }
}

#[derive(Serialize)]
struct MembershipReport {
    is_member: bool,
    residual: f64,
    threshold: f64,
    dictionary_rank: usize,
}

fn dictionary(cfg: &Cfg) -> Res<pe_excite::DataDictionary> {
    let l = Cfg::require(&cfg.order, "L")?;
    let u = read_all(&cfg.input, "input")?;
    let y = read_all(&cfg.output, "output")?;
    let dict = build_dictionary(&u, &y, l, cfg.tolerance())?;
    if let Some(p) = &cfg.out_csv {
        pe_excite::io::write_dictionary(p, &dict)?;
    }
    Ok(dict)
}

pub fn membership_cmd(cfg: &Cfg) -> Res<()> {
    let dict = dictionary(cfg)?;
    let qu = read_one(&cfg.query_u, "query-u")?;
    let qy = read_one(&cfg.query_y, "query-y")?;
    let m = membership(&dict, &qu, &qy, cfg.residual_tol.unwrap_or(DEFAULT_MEMBERSHIP_TOL))?;
    println!(
        "{}: residual {:e} (threshold {:e})",
        if m.is_member { "MEMBER" } else { "NOT A MEMBER" },
        m.residual,
        m.threshold
    );
    let report = MembershipReport {
        is_member: m.is_member,
        residual: m.residual,
        threshold: m.threshold,
        dictionary_rank: dict.rank(),
    };
    emit_json(cfg.out.as_deref(), &report)?;
    if m.is_member {
        Ok(())
    } else {
        Err(CliError::Failed("query is not a trajectory of the data".into()))
    }
}

pub fn predict_cmd(cfg: &Cfg) -> Res<()> {
    let dict = dictionary(cfg)?;
    let qu = read_one(&cfg.query_u, "query-u")?;
    let y0 = read_one(&cfg.y_init, "y-init")?;
    let p = predict(&dict, &qu, &y0)?;
    if let Some(w) = &p.pe_warning {
        eprintln!("warning: {w}");
    }
    match &cfg.out {
        Some(path) => write_time_series(path, &p.outputs)?,
        None => {
            let bytes = pe_excite::io::time_series_to_csv(&p.outputs)?;
            print!("{}", String::from_utf8_lossy(&bytes));
        }
    }
    Ok(())
}

pub fn table1(cfg: &Cfg) -> Res<()> {
    let defaults = Table1Config::default();
    let tc = Table1Config {
        seed: seed_of(cfg),
        trials: cfg.trials.unwrap_or(defaults.trials),
        pole_radius: cfg.pole_radius.unwrap_or(defaults.pole_radius),
        ..defaults
    };
    let report = table1_experiment(&tc)?;
    eprintln!("controller: {}", report.controller);
    for (name, s) in &report.strategies {
        eprintln!(
            "{name}: avg sigma_min {:.4}, avg E {:.4?}, diverged {}, failed {}",
            s.avg_sigma_min, s.avg_errors, s.diverged, s.failed
        );
    }
    emit_json(cfg.out.as_deref(), &report)?;
    if let Some(p) = &cfg.out_csv {
        write_records(p, &report.rows)?;
    }
    Ok(())
}
