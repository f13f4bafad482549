use std::io::Write;

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

/// What a subcommand hands back before it is wrapped in the envelope.
#[derive(Debug, Default)]
pub struct Outcome {
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub provenance: Vec<String>,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn method(&mut self, id: &str) -> &mut Self {
        self.provenance.push(id.to_string());
        self
    }

    pub fn warn(&mut self, msg: impl Into<String>) -> &mut Self {
        self.warnings.push(msg.into());
        self
    }
}

pub fn envelope(command: &str, outcome: Outcome, error: Option<Value>) -> Value {
    let mut top = Map::new();
    top.insert("command".into(), command.into());
    top.insert("inputs".into(), Value::Object(outcome.inputs));
    top.insert("result".into(), outcome.result);
    top.insert("provenance".into(), outcome.provenance.into());
    top.insert("warnings".into(), outcome.warnings.into());
    if let Some(e) = error {
        top.insert("error".into(), e);
    }
    reformat_floats(Value::Object(top))
}

/// Rewrites every non-integer number with 17 significant digits, which is
/// enough for any f64 to parse back to itself.
fn reformat_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => match n.as_f64() {
            Some(x) if x.is_finite() => Value::Number(float_number(x)),
            _ => Value::Null,
        },
        Value::Array(xs) => Value::Array(xs.into_iter().map(reformat_floats).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, reformat_floats(v))).collect()),
        other => other,
    }
}

fn float_number(x: f64) -> Number {
    serde_json::from_str(&format!("{x:.16e}")).expect("exponent notation is valid JSON")
}

/// Integer text (possibly beyond 64 bits) as a JSON number.
pub fn big_integer(digits: &str) -> Value {
    serde_json::from_str(digits).unwrap_or_else(|_| Value::String(digits.to_string()))
}

/// `x` with six significant digits, fixed notation for moderate magnitudes.
pub fn six_digits(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let s = format!("{:.*}", (5 - exp).max(0) as usize, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mant, e) = s.split_once('e').expect("exponent form");
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{e}")
    }
}

/// Leaves of the envelope as `(dotted.path, value)` pairs in key order.
pub fn flatten(v: &Value) -> Vec<(String, Value)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
        let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(m) if !m.is_empty() => m.iter().for_each(|(k, x)| walk(&join(k), x, out)),
            Value::Array(xs) if !xs.is_empty() => {
                xs.iter().enumerate().for_each(|(i, x)| walk(&join(&i.to_string()), x, out))
            }
            other => out.push((prefix.to_string(), other.clone())),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

fn leaf_text(v: &Value, plain: bool) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) if plain && n.is_f64() => six_digits(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(_) => "[]".into(),
        Value::Object(_) => "{}".into(),
        other => other.to_string(),
    }
}

pub fn render(env: &Value, format: Format, out: &mut impl Write) -> std::io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, env)?;
            writeln!(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["field", "value"])?;
            for (k, v) in flatten(env) {
                w.write_record([k, leaf_text(&v, false)])?;
            }
            w.flush()
        }
        Format::Plain => {
            for (k, v) in flatten(env) {
                writeln!(out, "{k}: {}", leaf_text(&v, true))?;
            }
            Ok(())
        }
    }
}
