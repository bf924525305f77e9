//! Trial pipelines for each mode.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pentagon_core::directsum::{branch_from_mask, kashaev_angles, kashaev_flips_search};
use pentagon_core::exotic::{
    check_constraint_u, determinant_a, hat_p, lm_isotropic_flips, LambdaMuParams,
};
use pentagon_core::metric::{isotropic_flips, orthonormal_flips, split_form};
use pentagon_core::weights::{
    extract_weights, faces_for, gaussian_isotropic_flips, pentagon_sides, proportionality,
    verify_canonical, weight_from_matrix, wiring_table,
};
use pentagon_core::{check_pentagon, Flip, ZetaFamily64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::config::{CliError, ConfigEcho, Mode, TrialConfig, ZetaSource};
use crate::io::load_zeta;
use crate::report::{digest, Report, Residual, TrialRecord};

/// Largest condition number accepted for random zeta differences.
const MAX_COND: f64 = 1e6;

/// Measurements of one trial before the pass verdict.
#[derive(Debug, Default)]
pub struct Outcome {
    pub digest_input: Vec<f64>,
    pub residuals: BTreeMap<String, f64>,
    pub values: BTreeMap<String, Complex64>,
}

impl Outcome {
    fn residual(&mut self, key: &str, v: f64) {
        self.residuals.insert(key.into(), v);
    }

    fn value(&mut self, key: &str, z: Complex64) {
        self.values.insert(key.into(), z);
    }

    fn family(&mut self, zf: &ZetaFamily64) {
        for m in zf.members() {
            for z in m.entries() {
                self.digest_input.extend([z.re, z.im]);
            }
        }
    }
}

type Step = Result<Outcome, pentagon_core::Error>;

/// Generator for one trial: the seed selects the key, the trial index the stream.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn direct_sum(rng: &mut ChaCha20Rng, n: usize, fixed: Option<&ZetaFamily64>) -> Step {
    let zf = fixed
        .cloned()
        .unwrap_or_else(|| ZetaFamily64::random_general(rng, n, MAX_COND));
    let mut out = Outcome::default();
    out.family(&zf);
    out.residual(
        "pentagon",
        check_pentagon(&pentagon_core::build_flips(&zf)?),
    );
    Ok(out)
}

fn symmetric(rng: &mut ChaCha20Rng, n: usize, fixed: Option<&ZetaFamily64>) -> ZetaFamily64 {
    fixed
        .cloned()
        .unwrap_or_else(|| ZetaFamily64::random_symmetric(rng, n, MAX_COND))
}

fn orthogonal(rng: &mut ChaCha20Rng, n: usize, fixed: Option<&ZetaFamily64>) -> Step {
    let zf = symmetric(rng, n, fixed);
    let fs = orthonormal_flips(&zf)?;
    let mut out = Outcome::default();
    out.family(&zf);
    out.residual("pentagon", check_pentagon(&fs));
    out.residual("orthogonality", fs.orthogonality_residual());
    Ok(out)
}

fn isotropic(rng: &mut ChaCha20Rng, fixed: Option<&ZetaFamily64>) -> Step {
    let zf = symmetric(rng, 2, fixed);
    let fs = isotropic_flips(&zf)?.flips;
    let mut out = Outcome::default();
    out.family(&zf);
    out.residual("pentagon", check_pentagon(&fs));
    out.residual("j_orthogonality", fs.form_residual(&split_form(3)));
    Ok(out)
}

fn grassmann(rng: &mut ChaCha20Rng, fixed: Option<&ZetaFamily64>) -> Step {
    let zf = symmetric(rng, 2, fixed);
    let mut out = Outcome::default();
    out.family(&zf);
    let fs = gaussian_isotropic_flips(&zf)?.flips;
    out.residual("pentagon", check_pentagon(&fs));
    let weights = extract_weights(&fs)?;
    let mut canonical = 0.0f64;
    for w in &weights {
        canonical = canonical.max(verify_canonical(w)?);
    }
    out.residual("canonical", canonical);
    let (left, right) = pentagon_sides(&weights)?;
    let ratio = proportionality(&left, &right)?;
    out.residual("grassmann", ratio.residual);
    out.value("const", ratio.constant);
    Ok(out)
}

fn scalars(rng: &mut ChaCha20Rng, fixed: Option<&ZetaFamily64>) -> [Complex64; 5] {
    match fixed {
        Some(zf) => std::array::from_fn(|i| zf.members()[i][(0, 0)]),
        None => {
            let mut z = [Complex64::new(0.0, 0.0); 5];
            for i in 0..5 {
                loop {
                    let c = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                    if z[..i].iter().all(|w| (w - c).norm() > 0.2) {
                        z[i] = c;
                        break;
                    }
                }
            }
            z
        }
    }
}

fn kashaev(rng: &mut ChaCha20Rng, fixed: Option<&ZetaFamily64>) -> Step {
    let z = scalars(rng, fixed);
    let mut out = Outcome {
        digest_input: z.iter().flat_map(|c| [c.re, c.im]).collect(),
        ..Default::default()
    };
    // residuals are measured on the flips; the search only needs a loose cut
    let (mask, fs) = kashaev_flips_search(z, 1e-6)?;
    out.residual("pentagon", check_pentagon(&fs));
    out.residual("orthogonality", fs.orthogonality_residual());
    out.value("branch_mask", Complex64::new(f64::from(mask), 0.0));
    let branch = branch_from_mask(mask);
    for f in Flip::ALL {
        let tet = f.tetrahedron().map(|v| z[usize::from(v) - 1]);
        let (c, _) = kashaev_angles(tet, branch(f))?;
        out.value(&format!("cos2_{}", f.label()), c * c);
    }
    Ok(out)
}

fn exotic(rng: &mut ChaCha20Rng) -> Step {
    let p = LambdaMuParams::<f64>::random_real(rng);
    let mut out = Outcome {
        digest_input: p.lambda.iter().chain(&p.mu).map(|c| c.re).collect(),
        ..Default::default()
    };
    let h = hat_p(&p)?;
    let zeros = [(0, 1), (0, 3), (2, 1), (2, 3)]
        .iter()
        .map(|&ij| h[ij].norm())
        .fold(0.0, f64::max);
    out.residual("zero_pattern", zeros);
    let w = weight_from_matrix(&h, faces_for(Flip::P))?;
    out.residual("constraint_u", check_constraint_u(&w));
    let fs = lm_isotropic_flips(&p, |_| Complex64::new(1.0, 0.0))?.flips;
    out.residual(
        "hat_p_match",
        fs.block(Flip::P).dist(&h) / (1.0 + h.max_abs()),
    );
    out.residual("pentagon", check_pentagon(&fs));
    out.residual("j_orthogonality", fs.form_residual(&split_form(3)));
    out.value("A", determinant_a(&p));
    Ok(out)
}

/// Run one mode's pipeline for one trial.
pub fn run_mode(mode: Mode, n: usize, rng: &mut ChaCha20Rng, fixed: Option<&ZetaFamily64>) -> Step {
    match mode {
        Mode::DirectSum => direct_sum(rng, n, fixed),
        Mode::Orthogonal => orthogonal(rng, n, fixed),
        Mode::Isotropic => isotropic(rng, fixed),
        Mode::GrassmannPentagon => grassmann(rng, fixed),
        Mode::Kashaev => kashaev(rng, fixed),
        Mode::Exotic => exotic(rng),
        Mode::All => {
            let mut all = Outcome::default();
            for m in Mode::SINGLE {
                let sub_n = m.fixed_n().unwrap_or(n);
                let o = run_mode(m, sub_n, rng, None)?;
                all.digest_input.extend(o.digest_input);
                for (k, v) in o.residuals {
                    all.residuals.insert(format!("{m}/{k}"), v);
                }
                for (k, v) in o.values {
                    all.values.insert(format!("{m}/{k}"), v);
                }
            }
            Ok(all)
        }
    }
}

fn record(trial: usize, step: Step, tol: f64) -> TrialRecord {
    match step {
        Ok(o) => {
            let pass = o.residuals.values().all(|&r| r <= tol);
            TrialRecord {
                trial,
                digest: digest(o.digest_input),
                residuals: o
                    .residuals
                    .into_iter()
                    .map(|(k, v)| (k, Residual::new(v)))
                    .collect(),
                values: o
                    .values
                    .into_iter()
                    .map(|(k, z)| (k, [z.re, z.im]))
                    .collect(),
                pass,
                error: None,
            }
        }
        Err(e) => TrialRecord {
            trial,
            digest: digest([]),
            residuals: BTreeMap::new(),
            values: BTreeMap::new(),
            pass: false,
            error: Some(e.to_string()),
        },
    }
}

/// Face wiring of the five tetrahedra, one line each.
pub fn wiring_lines() -> Vec<String> {
    wiring_table()
        .iter()
        .map(|(f, [x1, x2, y1, y2])| format!("{}: x1={x1} x2={x2} y1={y1} y2={y2}", f.label()))
        .collect()
}

/// Execute a campaign. A family from a file or inline source is a single
/// fixed input, so it runs exactly one trial.
pub fn run(cfg: &TrialConfig) -> Result<Report, CliError> {
    cfg.validate()?;
    let fixed = match &cfg.zeta_source {
        ZetaSource::Random => None,
        ZetaSource::File(p) => Some(load_zeta(p, cfg.mode.strict_symmetry())?),
        ZetaSource::Inline(zf) => Some((**zf).clone()),
    };
    if let Some(zf) = &fixed {
        if zf.n() != cfg.n {
            return Err(CliError::Config(format!(
                "zeta family has n = {}, mode {} runs with n = {}",
                zf.n(),
                cfg.mode,
                cfg.n
            )));
        }
        if cfg.mode.strict_symmetry() && !zf.is_symmetric() {
            return Err(CliError::Config(format!(
                "mode {} needs a symmetric zeta family",
                cfg.mode
            )));
        }
    }
    let mut echo = ConfigEcho::from(cfg);
    let trials = if fixed.is_some() { 1 } else { cfg.trials };
    echo.trials = trials;
    let records = (0..trials)
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            record(
                t,
                run_mode(cfg.mode, cfg.n, &mut rng, fixed.as_ref()),
                cfg.tolerance,
            )
        })
        .collect();
    let wiring = if matches!(cfg.mode, Mode::GrassmannPentagon | Mode::All) {
        wiring_lines()
    } else {
        Vec::new()
    };
    Ok(Report::new(echo, records, wiring))
}
