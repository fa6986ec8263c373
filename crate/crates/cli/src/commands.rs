//! The four subcommands, each producing a [`Report`].

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use skeinlab::classify::{self, Case, Outcome};
use skeinlab::threebox::{self, Basis14};
use skeinlab::twobox::{self, Sign, TwoBoxModel};
use skeinlab::{skein, Scalar, Tolerance};

use crate::diagram_file::{self, FileError};
use crate::report::{complex, num, Report};

pub const TOL_ENV: &str = "SKEINLAB_TOL";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] skeinlab::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    File { path: PathBuf, source: FileError },
    #[error("bad tolerance {0:?}")]
    Tolerance(String),
}

/// Which loop value to work at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selector {
    Delta(f64),
    L(u32),
    Depth3,
}

impl Selector {
    pub fn delta(self) -> f64 {
        match self {
            Selector::Delta(d) => d,
            Selector::L(l) => classify::sp4_delta(l),
            Selector::Depth3 => skeinlab::scalar::depth3_delta(),
        }
    }

    fn describe(self) -> (&'static str, Value) {
        match self {
            Selector::Delta(d) => ("delta", num(d)),
            Selector::L(l) => ("l", json!(l)),
            Selector::Depth3 => ("depth3", json!(true)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Common {
    pub selector: Selector,
    pub sigma: Option<Sign>,
    pub tol: Tolerance,
}

/// Flag beats environment beats default; the value sets the equality threshold.
pub fn resolve_tolerance(flag: Option<f64>, env: Option<&str>) -> Result<Tolerance, CliError> {
    let eq = match (flag, env) {
        (Some(t), _) => t,
        (None, Some(s)) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::Tolerance(s.to_string()))?,
        (None, None) => return Ok(Tolerance::default()),
    };
    Tolerance::default()
        .with_eq(eq)
        .map_err(|_| CliError::Tolerance(eq.to_string()))
}

fn base_report(command: &str, c: &Common) -> Report {
    let mut r = Report::new(command);
    let (k, v) = c.selector.describe();
    r.input(k, v);
    r.input("tol", tolerances(&c.tol));
    if let Some(s) = c.sigma {
        r.input("sigma", json!(s.value() as i32));
    }
    r
}

fn tolerances(t: &Tolerance) -> Value {
    json!({"eq_tol": num(t.eq_tol), "rank_tol": num(t.rank_tol), "residual_tol": num(t.residual_tol), "root_tol": num(t.root_tol)})
}

fn default_sigma(c: &Common) -> Sign {
    if let Some(s) = c.sigma {
        return s;
    }
    match c.selector {
        Selector::Depth3 => Sign::Plus,
        Selector::L(_) => Sign::Minus,
        Selector::Delta(d) => classify::admissible_check(d, &c.tol)
            .map(Case::sigma)
            .unwrap_or(Sign::Minus),
    }
}

fn model(c: &Common) -> Result<TwoBoxModel, CliError> {
    Ok(TwoBoxModel::from_classification_data(
        c.selector.delta(),
        default_sigma(c),
        &c.tol,
    )?)
}

pub fn classify(c: &Common) -> Result<Report, CliError> {
    let mut rep = base_report("classify", c);
    let delta = c.selector.delta();
    rep.output("delta", num(delta));
    match classify::classify(delta, &c.tol)? {
        Outcome::Rejected(rej) => {
            rep.output("reason", Value::String(rej.reason));
            rep.reject();
        }
        Outcome::Classified(res) => {
            if let Some(s) = c.sigma {
                if s != res.sigma {
                    return Err(skeinlab::Error::ChiralityMismatch(delta).into());
                }
            }
            let (rn, qn) = classify::normalize_bmw_params(res.r, res.q, &c.tol)?;
            rep.output("case", Value::String(res.case.name().into()))
                .output("sigma", json!(res.sigma.value() as i32))
                .output("y", complex(res.y))
                .output("a", complex(res.a))
                .output("b", complex(res.b))
                .output("q", complex(res.q))
                .output("r", complex(res.r))
                .output("q_normalized", complex(qn))
                .output("r_normalized", complex(rn))
                .output("gram_rank", json!(res.gram_rank))
                .output("gram_min_eigenvalue", num(res.gram_min_eigenvalue))
                .output("gram_max_eigenvalue", num(res.gram_max_eigenvalue));
            if let Some(l) = res.l {
                rep.output("l", json!(l));
            }
            for (k, v) in &res.residuals {
                rep.residual(k, *v, res.thresholds[k]);
            }
        }
    }
    Ok(rep)
}

pub fn evaluate(c: &Common, path: &Path) -> Result<Report, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    let d = diagram_file::parse(&text).map_err(|source| CliError::File {
        path: path.into(),
        source,
    })?;
    let m = model(c)?;
    let mut rep = base_report("evaluate", c);
    rep.input("diagram", Value::String(path.display().to_string()));
    let ev = match skein::evaluate_traced(&d, &m, None) {
        Err(skeinlab::Error::TriangleTableRequired) => {
            let basis = Basis14::new()?;
            let g = threebox::gram(&m, &basis)?;
            let table = threebox::solve_triangle(&m, &basis, &g)?;
            skein::evaluate_traced(&d, &m, Some(&table))?
        }
        other => other?,
    };
    rep.output("value", complex(ev.value))
        .output("steps", json!(ev.steps))
        .output("vertices", json!(d.vertices.len()));
    Ok(rep)
}

pub fn gram(c: &Common) -> Result<Report, CliError> {
    let m = model(c)?;
    let basis = Basis14::new()?;
    let g = threebox::gram(&m, &basis)?;
    let s = g.spectrum(&c.tol);
    let mut rep = base_report("gram", c);
    let rows: Vec<Value> = g
        .entries
        .row_iter()
        .map(|row| Value::Array(row.iter().map(|&z| complex(z)).collect()))
        .collect();
    rep.output("matrix", Value::Array(rows))
        .output(
            "eigenvalues",
            Value::Array(s.eigenvalues.iter().map(|&x| num(x)).collect()),
        )
        .output("rank", json!(s.rank))
        .output("min_eigenvalue", num(s.min))
        .output("max_eigenvalue", num(s.max));
    rep.residual("psd_violation", s.psd_violation(), c.tol.rank_tol)
        .residual("rank_deficit", (threebox::DIM - s.rank.min(threebox::DIM)) as f64, 0.5)
        .residual(
            "hermitian_defect",
            s.hermitian_defect / s.max.abs().max(1.0),
            c.tol.eq_tol,
        );
    Ok(rep)
}

pub fn ybe(c: &Common, perturb_q: f64) -> Result<Report, CliError> {
    let m = model(c)?;
    let tol = &c.tol;
    let factor = Scalar::new(perturb_q, 0.0);
    let braid = match m.sigma() {
        Sign::Plus => {
            let q0 = Scalar::from_polar(1.0, 2.0 * std::f64::consts::PI / 7.0);
            twobox::so3_braid_pair_at(&m, q0 * factor)?
        }
        Sign::Minus => {
            let (q, r) = classify::recover_qr(m.delta(), m.a(), m.b(), tol)?;
            if perturb_q == 1.0 {
                twobox::braid_pair(&m, q, r)?
            } else {
                twobox::braid_from_q(&m, q * factor)?
            }
        }
    };
    let basis = Basis14::new()?;
    let g = threebox::gram(&m, &basis)?;
    let table = threebox::solve_triangle(&m, &basis, &g)?;
    let rel = threebox::reidemeister_residuals(&m, &braid, &table)?;
    let y = threebox::ybe_residual(&m, &braid, &table)?;
    let mut rep = base_report("ybe", c);
    rep.input("perturb_q", num(perturb_q));
    rep.output("q", complex(braid.q))
        .output("r", complex(braid.r))
        .output("u", json!(braid.u.coeffs.map(complex)));
    let rt = tol.residual_tol;
    rep.residual("ybe", y, rt)
        .residual("r1", rel.r1, rt)
        .residual("r2", rel.r2, rt)
        .residual("quad", rel.quad, rt);
    Ok(rep)
}
