//! Verification reports: a fixed JSON shape plus a plain-text rendering.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{Map, Number, Value};
use skeinlab::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Rejected,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Rejected => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Rejected => "REJECTED",
        })
    }
}

/// Number with 17 significant digits; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let s = format!("{x:.16e}");
    Value::Number(s.parse::<Number>().expect("formatted float is a JSON number"))
}

pub fn complex(z: Scalar) -> Value {
    let mut m = Map::new();
    m.insert("im".into(), num(z.im));
    m.insert("re".into(), num(z.re));
    Value::Object(m)
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub outputs: Map<String, Value>,
    pub residuals: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    rejected: bool,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            inputs: Map::new(),
            outputs: Map::new(),
            residuals: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            rejected: false,
        }
    }

    pub fn input(&mut self, key: &str, v: Value) -> &mut Self {
        self.inputs.insert(key.into(), v);
        self
    }

    pub fn output(&mut self, key: &str, v: Value) -> &mut Self {
        self.outputs.insert(key.into(), v);
        self
    }

    pub fn residual(&mut self, key: &str, value: f64, tol: f64) -> &mut Self {
        self.residuals.insert(key.into(), value);
        self.tolerances.insert(key.into(), tol);
        self
    }

    pub fn reject(&mut self) {
        self.rejected = true;
    }

    /// PASS iff every residual is finite and below its tolerance.
    pub fn verdict(&self) -> Verdict {
        if self.rejected {
            return Verdict::Rejected;
        }
        let ok = self
            .residuals
            .iter()
            .all(|(k, v)| v.is_finite() && *v < self.tolerances[k]);
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn to_json(&self) -> Value {
        let nums = |m: &BTreeMap<String, f64>| Value::Object(m.iter().map(|(k, v)| (k.clone(), num(*v))).collect());
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert("inputs".into(), Value::Object(self.inputs.clone()));
        m.insert("outputs".into(), Value::Object(self.outputs.clone()));
        m.insert("residuals".into(), nums(&self.residuals));
        m.insert("tolerances".into(), nums(&self.tolerances));
        m.insert("verdict".into(), Value::String(self.verdict().to_string()));
        Value::Object(m)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("values serialize");
        s.push('\n');
        s
    }
}

fn short(v: &Value) -> String {
    match v {
        Value::Object(m) if m.len() == 2 && m.contains_key("re") && m.contains_key("im") => {
            let f = |k: &str| m[k].as_f64().unwrap_or(f64::NAN);
            format!("{:.12} {:+.12}i", f("re"), f("im"))
        }
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.to_string().contains('e') => format!("{x:.12}"),
            _ => n.to_string(),
        },
        Value::Array(a) if a.len() > 6 => format!("[{} entries]", a.len()),
        Value::Array(a) => format!("[{}]", a.iter().map(short).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.command, self.verdict())?;
        for (k, v) in &self.outputs {
            writeln!(f, "  {k:<24} {}", short(v))?;
        }
        for (k, v) in &self.residuals {
            let t = self.tolerances[k];
            let mark = if v.is_finite() && *v < t { "ok" } else { "FAIL" };
            writeln!(f, "  residual {k:<24} {v:.3e}  (tol {t:.0e})  {mark}")?;
        }
        Ok(())
    }
}
