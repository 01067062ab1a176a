//! Stdout rendering. JSON is canonical; text is a flattened view of the
//! same value, one `path = value` line per leaf.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

pub fn emit<T: Serialize>(fmt: Format, value: &T) {
    print!("{}", render(fmt, value));
}

pub fn render<T: Serialize>(fmt: Format, value: &T) -> String {
    match fmt {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("output serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            flatten("", &serde_json::to_value(value).expect("output serializes"), &mut out);
            out
        }
    }
}

fn leaf(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    if leaf(v) {
        let shown = match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        out.push_str(&format!("{prefix} = {shown}\n"));
        return;
    }
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        _ => unreachable!(),
    }
}
