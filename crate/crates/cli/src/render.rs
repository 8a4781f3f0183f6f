//! Text, JSON and CSV emitters. Every rational is printed exactly as `p/q`;
//! `--decimal k` adds a rounded rendering next to it.

use std::io::{self, Write};
use std::path::Path;

use floorsum::range::MethodTiming;
use floorsum::{ApproxResult, CheckResult, Classification, EvalDetail, RangeReport, Rat};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::{Config, Format};

/// Bumped whenever a JSON field is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

pub struct Renderer {
    format: Format,
    decimal: Option<usize>,
}

impl Renderer {
    pub fn new(config: &Config) -> Self {
        Renderer {
            format: config.format,
            decimal: config.decimal,
        }
    }

    fn exact(&self, v: &Rat) -> String {
        match self.decimal {
            Some(k) => format!("{v} ({})", v.to_decimal(k)),
            None => v.to_string(),
        }
    }

    /// Wraps a serialized record with the schema header and the optional
    /// decimal renderings of the named fields.
    fn envelope<T: Serialize>(&self, command: &str, body: &T, fields: &[(&str, &Rat)]) -> Value {
        let mut map = Map::new();
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
        map.insert("command".into(), json!(command));
        match serde_json::to_value(body).expect("serializable") {
            Value::Object(inner) => map.extend(inner),
            other => {
                map.insert("result".into(), other);
            }
        }
        if let Some(k) = self.decimal {
            let dec: Map<String, Value> = fields
                .iter()
                .map(|(name, v)| (name.to_string(), json!(v.to_decimal(k))))
                .collect();
            map.insert("decimal".into(), Value::Object(dec));
        }
        Value::Object(map)
    }

    fn print_json(&self, v: &Value) -> io::Result<()> {
        let mut out = io::stdout().lock();
        serde_json::to_writer_pretty(&mut out, v)?;
        writeln!(out)
    }

    fn print_csv(&self, header: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(io::stdout().lock());
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()
    }

    fn print_lines(&self, lines: &[String]) -> io::Result<()> {
        let mut out = io::stdout().lock();
        for l in lines {
            writeln!(out, "{l}")?;
        }
        Ok(())
    }

    /// Extra CSV columns holding decimal renderings, when requested.
    fn dec_cols(&self, values: &[&Rat]) -> Vec<String> {
        match self.decimal {
            Some(k) => values.iter().map(|v| v.to_decimal(k)).collect(),
            None => Vec::new(),
        }
    }

    fn dec_header<'a>(&self, base: &[&'a str], names: &[&'a str]) -> Vec<&'a str> {
        let mut h = base.to_vec();
        if self.decimal.is_some() {
            h.extend_from_slice(names);
        }
        h
    }

    pub fn eval(&self, d: &EvalDetail) -> crate::CliResult<()> {
        match self.format {
            Format::Json => {
                self.print_json(&self.envelope("eval", d, &[("f", &d.f), ("x_n", &d.x_n)]))?
            }
            Format::Csv => {
                let header =
                    self.dec_header(&["n", "x", "f", "x_n", "d", "r", "jump"], &["f_decimal"]);
                let mut row = vec![
                    d.n.to_string(),
                    d.x.to_string(),
                    d.f.to_string(),
                    d.x_n.to_string(),
                    d.d.to_string(),
                    d.r.to_string(),
                    d.jump.to_string(),
                ];
                row.extend(self.dec_cols(&[&d.f]));
                self.print_csv(&header, &[row])?;
            }
            Format::Text => self.print_lines(&[
                format!("n = {}", d.n),
                format!("x = {}", d.x),
                format!("f = {}", self.exact(&d.f)),
                format!("x_n = {}", d.x_n),
                format!("d = {}", d.d),
                format!("r = {}", d.r),
                format!("jump = {}", d.jump),
            ])?,
        }
        Ok(())
    }

    pub fn range(&self, r: &RangeReport) -> crate::CliResult<()> {
        match self.format {
            Format::Json => {
                let mut fields = vec![("max_value", &r.max_value)];
                if let Some(m) = &r.min_nonzero {
                    fields.push(("min_nonzero", m));
                }
                self.print_json(&self.envelope("range", r, &fields))?;
            }
            Format::Csv => {
                let header = self.dec_header(&["left", "right", "value"], &["value_decimal"]);
                let rows: Vec<Vec<String>> = r
                    .gaps()
                    .iter()
                    .map(|g| {
                        let mut row =
                            vec![g.left.to_string(), g.right.to_string(), g.value.to_string()];
                        row.extend(self.dec_cols(&[g.value]));
                        row
                    })
                    .collect();
                self.print_csv(&header, &rows)?;
            }
            Format::Text => {
                let mut lines = vec![format!(
                    "n = {}: {} values over {} gaps",
                    r.n,
                    r.entries.len(),
                    r.gap_count()
                )];
                for e in &r.entries {
                    let intervals: Vec<String> = e
                        .witnesses
                        .iter()
                        .map(|w| format!("[{}, {})", w.left, w.right))
                        .collect();
                    lines.push(format!(
                        "{}  on {}",
                        self.exact(&e.value),
                        intervals.join(" ")
                    ));
                }
                if let Some(m) = &r.min_nonzero {
                    lines.push(format!("min nonzero = {}", self.exact(m)));
                }
                lines.push(format!("max = {}", self.exact(&r.max_value)));
                let below: Vec<String> = r.below_lambda.iter().map(Rat::to_string).collect();
                lines.push(format!("below lambda = {{{}}}", below.join(", ")));
                self.print_lines(&lines)?;
            }
        }
        Ok(())
    }

    pub fn classify(&self, c: &Classification) -> crate::CliResult<()> {
        match self.format {
            Format::Json => {
                self.print_json(&self.envelope("classify", c, &[("value", &c.value)]))?
            }
            Format::Csv => {
                let header = self.dec_header(
                    &["n", "x", "tag", "m", "value", "d", "x_n"],
                    &["value_decimal"],
                );
                let m = match c.tag {
                    floorsum::Tag::PartialSum(m) => m.to_string(),
                    _ => String::new(),
                };
                let mut row = vec![
                    c.certificate.n.to_string(),
                    c.certificate.x.to_string(),
                    c.tag.name().to_string(),
                    m,
                    c.value.to_string(),
                    c.certificate.d.to_string(),
                    c.certificate.x_n.to_string(),
                ];
                row.extend(self.dec_cols(&[&c.value]));
                self.print_csv(&header, &[row])?;
            }
            Format::Text => self.print_lines(&[
                format!("tag = {}", c.tag),
                format!("value = {}", self.exact(&c.value)),
                format!("d = {}", c.certificate.d),
                format!("x_n = {}", c.certificate.x_n),
                format!("jump = {}", c.certificate.jump),
            ])?,
        }
        Ok(())
    }

    pub fn approx(&self, a: &ApproxResult) -> crate::CliResult<()> {
        match self.format {
            Format::Json => {
                self.print_json(&self.envelope("approx", a, &[("s", &a.s), ("err", &a.err)]))?
            }
            Format::Csv => {
                let header = self.dec_header(
                    &["u", "t", "m_hat", "n_hat", "s", "err"],
                    &["s_decimal", "err_decimal"],
                );
                let mut row = vec![
                    a.u.to_string(),
                    a.t.to_string(),
                    a.m_hat.to_string(),
                    a.n_hat.to_string(),
                    a.s.to_string(),
                    a.err.to_string(),
                ];
                row.extend(self.dec_cols(&[&a.s, &a.err]));
                self.print_csv(&header, &[row])?;
            }
            Format::Text => self.print_lines(&[
                format!("u = {}", a.u),
                format!("t = {}", a.t),
                format!("m_hat = {}", a.m_hat),
                format!("n_hat = {}", a.n_hat),
                format!("s = f_{}(1/{}) = {}", a.n_hat, a.t, self.exact(&a.s)),
                format!("err = {}", self.exact(&a.err)),
            ])?,
        }
        Ok(())
    }

    pub fn verify(&self, results: &[CheckResult], certificate: &Path) -> crate::CliResult<()> {
        match self.format {
            Format::Json => {
                let v = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "verify",
                    "certificate": certificate.display().to_string(),
                    "passed": results.iter().all(CheckResult::passed),
                    "checks": results,
                });
                self.print_json(&v)?;
            }
            Format::Csv => {
                let rows: Vec<Vec<String>> = results
                    .iter()
                    .map(|r| {
                        vec![
                            r.name.clone(),
                            r.passed().to_string(),
                            r.cases.to_string(),
                            r.failure_count.to_string(),
                            format!("{:.3}", r.elapsed.as_secs_f64() * 1e3),
                            r.domain.clone(),
                        ]
                    })
                    .collect();
                self.print_csv(
                    &[
                        "check",
                        "passed",
                        "cases",
                        "failures",
                        "elapsed_ms",
                        "domain",
                    ],
                    &rows,
                )?;
            }
            Format::Text => {
                let mut lines = Vec::new();
                for r in results {
                    let status = if r.passed() { "PASS" } else { "FAIL" };
                    let mut line = format!(
                        "{status} {:<18} cases={:<8} failures={:<4} {:>9.1} ms",
                        r.name,
                        r.cases,
                        r.failure_count,
                        r.elapsed.as_secs_f64() * 1e3
                    );
                    if let Some(o) = &r.observed {
                        line.push_str(&format!("  ({o})"));
                    }
                    lines.push(line);
                    for f in r.failures.iter().take(5) {
                        lines.push(format!(
                            "    n = {}, x = {}: observed {}, expected {}",
                            f.n, f.x, f.observed, f.expected
                        ));
                    }
                }
                lines.push(format!("certificate written to {}", certificate.display()));
                self.print_lines(&lines)?;
            }
        }
        Ok(())
    }

    pub fn bench(&self, rows: &[MethodTiming]) -> crate::CliResult<()> {
        let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
        match self.format {
            Format::Json => {
                let rows: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "n": r.n,
                            "gaps": r.gaps,
                            "values": r.values,
                            "naive_ms": ms(r.naive),
                            "delta_walk_ms": ms(r.delta_walk),
                            "speedup": r.speedup(),
                        })
                    })
                    .collect();
                self.print_json(&json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": "bench",
                    "rows": rows,
                }))?;
            }
            Format::Csv => {
                let rows: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.n.to_string(),
                            r.gaps.to_string(),
                            r.values.to_string(),
                            format!("{:.3}", ms(r.naive)),
                            format!("{:.3}", ms(r.delta_walk)),
                            format!("{:.2}", r.speedup()),
                        ]
                    })
                    .collect();
                self.print_csv(
                    &[
                        "n",
                        "gaps",
                        "values",
                        "naive_ms",
                        "delta_walk_ms",
                        "speedup",
                    ],
                    &rows,
                )?;
            }
            Format::Text => {
                let mut lines = vec![format!(
                    "{:>6} {:>8} {:>8} {:>12} {:>12} {:>8}",
                    "n", "gaps", "values", "naive ms", "delta ms", "speedup"
                )];
                for r in rows {
                    lines.push(format!(
                        "{:>6} {:>8} {:>8} {:>12.3} {:>12.3} {:>7.1}x",
                        r.n,
                        r.gaps,
                        r.values,
                        ms(r.naive),
                        ms(r.delta_walk),
                        r.speedup()
                    ));
                }
                self.print_lines(&lines)?;
            }
        }
        Ok(())
    }
}
