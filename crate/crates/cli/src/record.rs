use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use wakimoto::exact::CharacterSeries;
use wakimoto::fock::FockVector;
use wakimoto::{format_rat, Rat};

use crate::config::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Error,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
            Status::Error => "error",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub status: Status,
    pub payload: Value,
    pub engine_version: String,
}

pub fn rat_value(x: &Rat) -> Value {
    Value::String(format_rat(x))
}

pub fn series_value(s: &CharacterSeries) -> Value {
    json!({
        "offset": format_rat(&s.offset),
        "order": s.order(),
        "coefficients": s.coeffs.iter().map(format_rat).collect::<Vec<_>>(),
    })
}

pub fn vector_value(v: &FockVector) -> Value {
    let terms: Vec<Value> = v
        .terms()
        .iter()
        .map(|(m, c)| json!({ "monomial": m.to_string(), "coefficient": format_rat(c) }))
        .collect();
    json!({ "j": format_rat(&v.sector().j), "terms": terms })
}

/// `(path, scalar)` leaves in document order; arrays are indexed.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |key: &str| if prefix.is_empty() { key.to_string() } else { format!("{prefix}.{key}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&join(k), x, out);
            }
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push((prefix.to_string(), String::new()));
            }
            for (i, x) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ResultRecord {
    fn header(&self) -> Vec<(String, String)> {
        let mut rows = vec![("command".to_string(), self.command.clone()), ("status".to_string(), self.status.to_string())];
        rows.extend(self.params.iter().map(|(k, v)| (format!("params.{k}"), v.clone())));
        rows.push(("engine_version".to_string(), self.engine_version.clone()));
        rows
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("records serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut rows = self.header();
                flatten("payload", &self.payload, &mut rows);
                let mut s = String::from("key,value\n");
                for (k, v) in rows {
                    s.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&v)));
                }
                s
            }
            Format::Text => {
                let mut rows = self.header();
                flatten("", &self.payload, &mut rows);
                rows.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wakimoto::exact::{int, rat};
    use wakimoto::parse_rat;

    fn record() -> ResultRecord {
        ResultRecord {
            command: "characters".into(),
            params: [("k".to_string(), "1/1".to_string())].into_iter().collect(),
            status: Status::Pass,
            payload: json!({ "series": series_value(&CharacterSeries::new(rat(1, 8), vec![int(1), int(2)])) }),
            engine_version: "0.1.0".into(),
        }
    }

    #[test]
    fn json_round_trip() {
        let r = record();
        let back: ResultRecord = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.payload["series"]["offset"], "1/8");
        assert_eq!(parse_rat(back.payload["series"]["coefficients"][1].as_str().unwrap()), Some(int(2)));
    }

    #[test]
    fn csv_and_text_layout() {
        let csv = record().render(Format::Csv);
        assert!(csv.starts_with("key,value\ncommand,characters\nstatus,pass\n"));
        assert!(csv.contains("payload.series.coefficients.1,2/1\n"));
        let text = record().render(Format::Text);
        assert!(text.contains("series.order: 1\n"));
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }
}
