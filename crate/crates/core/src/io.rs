//! JSON run configuration, CSV result tables and run manifests.
//!
//! A configuration document describes one ensemble, or a sweep when any
//! axis key holds an array:
//!
//! ```json
//! {"scheme": "nonadaptive", "K": [1, 2, 3, 4], "M_K": 6, "F": 2,
//!  "T2_over_tau": 1000, "f_d": [0.82, 0.9, 0.98], "S": 2000, "seed": 7}
//! ```
//!
//! | key | type | notes |
//! |-----|------|-------|
//! | `scheme` | `"adaptive"` \| `"nonadaptive"` | required |
//! | `K` | int or int array | required |
//! | `M` | int or int array | adaptive only, required there |
//! | `M_K`, `F` | int or int array | nonadaptive only |
//! | `MK_F` | array of `[M_K, F]` | nonadaptive, replaces `M_K`/`F` |
//! | `T2_over_tau` | number or `"inf"` | default `"inf"` |
//! | `tau_over_T2` | number | alternative to `T2_over_tau` |
//! | `f_d` | number or array | symmetric contrast |
//! | `f_a`, `f_i` | number or array | default 1 and 0 |
//! | `contrast` | array of `[f_a, f_i]` | paired contrast axis |
//! | `S` | int | default 1000 |
//! | `seed` | u64 | default 0 |
//! | `initial_phase` | number | default 0 |
//! | `stage_order` | `"descending"` or int array | nonadaptive only |
//! | `high_memory` | bool | allows `K` above 14 |
//!
//! Unknown keys are rejected.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::control::StageOrder;
use crate::engine::{
    Detections, Scheme, SweepAxes, SweepRow, TrialConfig, DEFAULT_MAX_EXPONENT_CAP, HIGH_MEMORY_MAX_EXPONENT_CAP,
};
use crate::error::{QpeError, Result};
use crate::posterior::Contrast;

pub const CSV_HEADER: &str =
    "scheme,K,M,M_K,F,f_a,f_i,T2_over_tau,S,seed,T_tilde,V_H,V_H_err,V_H_T,stderr_V_H,invalid_trials";

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }

    fn is_many(&self) -> bool {
        matches!(self, OneOrMany::Many(_))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum NumberOrText {
    Number(f64),
    Text(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scheme: Option<String>,
    #[serde(rename = "K")]
    k: Option<OneOrMany<i64>>,
    #[serde(rename = "M")]
    m: Option<OneOrMany<i64>>,
    #[serde(rename = "M_K")]
    m_k: Option<OneOrMany<i64>>,
    #[serde(rename = "F")]
    f: Option<OneOrMany<i64>>,
    #[serde(rename = "MK_F")]
    mk_f: Option<Vec<[i64; 2]>>,
    #[serde(rename = "T2_over_tau")]
    t2_over_tau: Option<NumberOrText>,
    #[serde(rename = "tau_over_T2")]
    tau_over_t2: Option<f64>,
    f_d: Option<OneOrMany<f64>>,
    f_a: Option<OneOrMany<f64>>,
    f_i: Option<OneOrMany<f64>>,
    contrast: Option<Vec<[f64; 2]>>,
    #[serde(rename = "S")]
    s: Option<i64>,
    seed: Option<u64>,
    initial_phase: Option<f64>,
    stage_order: Option<Value>,
    high_memory: Option<bool>,
}

/// A resolved configuration: the base cell plus sweep axes.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub base: TrialConfig,
    pub axes: SweepAxes,
    pub high_memory: bool,
}

impl RunSpec {
    pub fn is_sweep(&self) -> bool {
        !self.axes.is_empty()
    }

    pub fn cells(&self) -> Vec<TrialConfig> {
        self.axes.cells(&self.base)
    }

    /// Overrides the master seed.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base.master_seed = seed;
        self
    }

    /// Re-checks the `K` cap after flags have been applied.
    pub fn validate(&self) -> Result<()> {
        let cap = if self.high_memory {
            HIGH_MEMORY_MAX_EXPONENT_CAP
        } else {
            DEFAULT_MAX_EXPONENT_CAP
        };
        for cell in self.cells() {
            if cell.max_exponent > cap {
                let hint = if self.high_memory {
                    ""
                } else {
                    " (set high_memory or pass --full-scale)"
                };
                return Err(QpeError::config(
                    "K",
                    format!("K = {} exceeds the cap {cap}{hint}", cell.max_exponent),
                ));
            }
            cell.validate().map_err(|e| QpeError::config("$", e.to_string()))?;
        }
        Ok(())
    }

    /// Canonical JSON document; [`parse_config`] maps it back to an equal
    /// `RunSpec`.
    pub fn to_document(&self) -> Value {
        let b = &self.base;
        let mut doc = serde_json::Map::new();
        doc.insert("scheme".into(), json!(b.scheme.name()));
        if self.axes.max_exponents.is_empty() {
            doc.insert("K".into(), json!(b.max_exponent));
        } else {
            doc.insert("K".into(), json!(self.axes.max_exponents));
        }
        match &b.scheme {
            Scheme::Adaptive { clicks_per_stage } => {
                let ms: Vec<u64> = self
                    .axes
                    .detections
                    .iter()
                    .filter_map(|d| match d {
                        Detections::Adaptive { clicks_per_stage } => Some(*clicks_per_stage),
                        _ => None,
                    })
                    .collect();
                if ms.is_empty() {
                    doc.insert("M".into(), json!(clicks_per_stage));
                } else {
                    doc.insert("M".into(), json!(ms));
                }
            }
            Scheme::Nonadaptive {
                top_clicks,
                growth,
                order,
            } => {
                let pairs: Vec<[u64; 2]> = self
                    .axes
                    .detections
                    .iter()
                    .filter_map(|d| match d {
                        Detections::Nonadaptive { top_clicks, growth } => Some([*top_clicks, *growth]),
                        _ => None,
                    })
                    .collect();
                if pairs.is_empty() {
                    doc.insert("M_K".into(), json!(top_clicks));
                    doc.insert("F".into(), json!(growth));
                } else {
                    doc.insert("MK_F".into(), json!(pairs));
                }
                if let StageOrder::Explicit(list) = order {
                    doc.insert("stage_order".into(), json!(list));
                }
            }
        }
        doc.insert("tau_over_T2".into(), json!(b.tau_over_t2));
        if self.axes.contrasts.is_empty() {
            doc.insert("f_a".into(), json!(b.contrast.f_a()));
            doc.insert("f_i".into(), json!(b.contrast.f_i()));
        } else {
            let pairs: Vec<[f64; 2]> = self.axes.contrasts.iter().map(|c| [c.f_a(), c.f_i()]).collect();
            doc.insert("contrast".into(), json!(pairs));
        }
        doc.insert("S".into(), json!(b.trials));
        doc.insert("seed".into(), json!(b.master_seed));
        doc.insert("initial_phase".into(), json!(b.initial_phase));
        doc.insert("high_memory".into(), json!(self.high_memory));
        Value::Object(doc)
    }
}

fn positive(path: &str, v: i64) -> Result<u64> {
    if v < 1 {
        return Err(QpeError::config(path, format!("must be >= 1, got {v}")));
    }
    Ok(v as u64)
}

fn non_negative(path: &str, v: i64) -> Result<u64> {
    if v < 0 {
        return Err(QpeError::config(path, format!("must be >= 0, got {v}")));
    }
    Ok(v as u64)
}

fn nonempty<T>(path: &str, v: Vec<T>) -> Result<Vec<T>> {
    if v.is_empty() {
        return Err(QpeError::config(path, "axis must not be empty"));
    }
    Ok(v)
}

fn contrast_at(path: &str, f_a: f64, f_i: f64) -> Result<Contrast> {
    Contrast::new(f_a, f_i).map_err(|e| QpeError::config(path, e.to_string()))
}

/// Parses and validates a JSON configuration document.
pub fn parse_config(document: &str) -> Result<RunSpec> {
    let raw: RawConfig =
        serde_json::from_str(document).map_err(|e| QpeError::config("$", e.to_string()))?;
    resolve(raw)
}

pub fn parse_config_value(value: Value) -> Result<RunSpec> {
    let raw: RawConfig = serde_json::from_value(value).map_err(|e| QpeError::config("$", e.to_string()))?;
    resolve(raw)
}

pub fn load_config(path: &Path) -> Result<RunSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        QpeError::config(path.display().to_string(), format!("cannot read config: {e}"))
    })?;
    parse_config(&text)
}

fn resolve(raw: RawConfig) -> Result<RunSpec> {
    let adaptive = match raw.scheme.as_deref() {
        Some("adaptive") => true,
        Some("nonadaptive") => false,
        Some(other) => {
            return Err(QpeError::config(
                "scheme",
                format!("expected \"adaptive\" or \"nonadaptive\", got {other:?}"),
            ))
        }
        None => return Err(QpeError::config("scheme", "missing required key")),
    };

    let k_field = raw.k.ok_or_else(|| QpeError::config("K", "missing required key"))?;
    let k_is_axis = k_field.is_many();
    let ks = nonempty("K", k_field.into_vec())?
        .into_iter()
        .enumerate()
        .map(|(i, k)| {
            let path = if k_is_axis { format!("K[{i}]") } else { "K".into() };
            u32::try_from(k)
                .map_err(|_| QpeError::config(path, format!("must be a nonnegative integer, got {k}")))
        })
        .collect::<Result<Vec<u32>>>()?;

    let mut axes = SweepAxes::default();
    if k_is_axis {
        axes.max_exponents = ks.clone();
    }

    // detections
    let scheme;
    if adaptive {
        for (present, key) in [
            (raw.m_k.is_some(), "M_K"),
            (raw.f.is_some(), "F"),
            (raw.mk_f.is_some(), "MK_F"),
            (raw.stage_order.is_some(), "stage_order"),
        ] {
            if present {
                return Err(QpeError::config(key, "only valid for the nonadaptive scheme"));
            }
        }
        let m_field = raw.m.ok_or_else(|| QpeError::config("M", "missing required key for adaptive scheme"))?;
        let m_axis = m_field.is_many();
        let ms = nonempty("M", m_field.into_vec())?
            .into_iter()
            .map(|m| positive("M", m))
            .collect::<Result<Vec<u64>>>()?;
        if m_axis {
            axes.detections = ms
                .iter()
                .map(|&clicks_per_stage| Detections::Adaptive { clicks_per_stage })
                .collect();
        }
        scheme = Scheme::Adaptive { clicks_per_stage: ms[0] };
    } else {
        if raw.m.is_some() {
            return Err(QpeError::config("M", "not valid for the nonadaptive scheme; use M_K and F"));
        }
        let order = match raw.stage_order {
            None => StageOrder::Descending,
            Some(Value::String(s)) if s == "descending" => StageOrder::Descending,
            Some(v) => {
                let list: Vec<u32> = serde_json::from_value(v).map_err(|_| {
                    QpeError::config("stage_order", "expected \"descending\" or an array of exponents")
                })?;
                StageOrder::Explicit(list)
            }
        };
        let pairs: Vec<(u64, u64)> = if let Some(list) = raw.mk_f {
            if raw.m_k.is_some() || raw.f.is_some() {
                return Err(QpeError::config("MK_F", "conflicts with M_K / F"));
            }
            nonempty("MK_F", list)?
                .into_iter()
                .enumerate()
                .map(|(i, [m, f])| {
                    Ok((
                        positive(&format!("MK_F[{i}][0]"), m)?,
                        non_negative(&format!("MK_F[{i}][1]"), f)?,
                    ))
                })
                .collect::<Result<_>>()?
        } else {
            let mk = raw
                .m_k
                .ok_or_else(|| QpeError::config("M_K", "missing required key for nonadaptive scheme"))?;
            let f = raw
                .f
                .ok_or_else(|| QpeError::config("F", "missing required key for nonadaptive scheme"))?;
            let mks = nonempty("M_K", mk.into_vec())?
                .into_iter()
                .map(|m| positive("M_K", m))
                .collect::<Result<Vec<u64>>>()?;
            let fs = nonempty("F", f.into_vec())?
                .into_iter()
                .map(|g| non_negative("F", g))
                .collect::<Result<Vec<u64>>>()?;
            mks.iter().flat_map(|&m| fs.iter().map(move |&g| (m, g))).collect()
        };
        if pairs.len() > 1 {
            axes.detections = pairs
                .iter()
                .map(|&(top_clicks, growth)| Detections::Nonadaptive { top_clicks, growth })
                .collect();
        }
        scheme = Scheme::Nonadaptive {
            top_clicks: pairs[0].0,
            growth: pairs[0].1,
            order,
        };
    }

    // dephasing
    let tau_over_t2 = match (raw.t2_over_tau, raw.tau_over_t2) {
        (Some(_), Some(_)) => {
            return Err(QpeError::config(
                "T2_over_tau",
                "conflicts with tau_over_T2; give only one",
            ))
        }
        (None, None) => 0.0,
        (None, Some(r)) => {
            if !(r >= 0.0) || !r.is_finite() {
                return Err(QpeError::config("tau_over_T2", format!("must be finite and >= 0, got {r}")));
            }
            r
        }
        (Some(NumberOrText::Number(t)), None) => {
            if !(t > 0.0) {
                return Err(QpeError::config("T2_over_tau", format!("must be > 0, got {t}")));
            }
            1.0 / t
        }
        (Some(NumberOrText::Text(s)), None) => match s.as_str() {
            "inf" | "infinity" | "Infinity" => 0.0,
            _ => return Err(QpeError::config("T2_over_tau", format!("expected a number or \"inf\", got {s:?}"))),
        },
    };

    // contrast
    let contrast_axis: Vec<Contrast>;
    if let Some(fd) = raw.f_d {
        let mut clash = Vec::new();
        if raw.f_a.is_some() {
            clash.push("f_a");
        }
        if raw.f_i.is_some() {
            clash.push("f_i");
        }
        if raw.contrast.is_some() {
            clash.push("contrast");
        }
        if !clash.is_empty() {
            return Err(QpeError::config(
                "f_d",
                format!("conflicts with {}; give either f_d or (f_a, f_i)", clash.join(", ")),
            ));
        }
        contrast_axis = nonempty("f_d", fd.into_vec())?
            .into_iter()
            .map(|v| Contrast::from_visibility(v).map_err(|e| QpeError::config("f_d", e.to_string())))
            .collect::<Result<_>>()?;
    } else if let Some(pairs) = raw.contrast {
        if raw.f_a.is_some() || raw.f_i.is_some() {
            return Err(QpeError::config("contrast", "conflicts with f_a / f_i"));
        }
        contrast_axis = nonempty("contrast", pairs)?
            .into_iter()
            .enumerate()
            .map(|(i, [a, b])| contrast_at(&format!("contrast[{i}]"), a, b))
            .collect::<Result<_>>()?;
    } else {
        let fas = raw.f_a.map_or(vec![1.0], OneOrMany::into_vec);
        let fis = raw.f_i.map_or(vec![0.0], OneOrMany::into_vec);
        let fas = nonempty("f_a", fas)?;
        let fis = nonempty("f_i", fis)?;
        let mut out = Vec::new();
        for &a in &fas {
            for &b in &fis {
                out.push(contrast_at("f_a/f_i", a, b)?);
            }
        }
        contrast_axis = out;
    }
    if contrast_axis.len() > 1 {
        axes.contrasts = contrast_axis.clone();
    }

    let trials = match raw.s {
        None => 1000,
        Some(s) => positive("S", s)?,
    };
    let initial_phase = raw.initial_phase.unwrap_or(0.0);
    if !initial_phase.is_finite() {
        return Err(QpeError::config("initial_phase", "must be finite"));
    }

    let spec = RunSpec {
        base: TrialConfig {
            scheme,
            max_exponent: ks[0],
            tau_over_t2,
            contrast: contrast_axis[0],
            trials,
            master_seed: raw.seed.unwrap_or(0),
            initial_phase,
        },
        axes,
        high_memory: raw.high_memory.unwrap_or(false),
    };
    spec.validate()?;
    Ok(spec)
}

/// 17 significant digits; infinities as `inf`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

fn csv_row(row: &SweepRow) -> String {
    let c = &row.config;
    let mut line = String::new();
    let (m, mk, f) = match &c.scheme {
        Scheme::Adaptive { clicks_per_stage } => (clicks_per_stage.to_string(), String::new(), String::new()),
        Scheme::Nonadaptive { top_clicks, growth, .. } => (String::new(), top_clicks.to_string(), growth.to_string()),
    };
    let t2 = if c.tau_over_t2 == 0.0 {
        f64::INFINITY
    } else {
        1.0 / c.tau_over_t2
    };
    let t_tilde = c.schedule().map(|s| s.resource_time().to_string()).unwrap_or_default();
    let _ = write!(
        line,
        "{},{},{m},{mk},{f},{},{},{},{},{},{t_tilde}",
        c.scheme.name(),
        c.max_exponent,
        format_float(c.contrast.f_a()),
        format_float(c.contrast.f_i()),
        format_float(t2),
        c.trials,
        c.master_seed,
    );
    match &row.outcome {
        Ok(a) => {
            let _ = write!(
                line,
                ",{},{},{},{},{}",
                format_float(a.v_h),
                format_float(a.v_h_err),
                format_float(a.product),
                format_float(a.stderr_v_h),
                a.invalid_trials
            );
        }
        Err(_) => line.push_str(",nan,nan,nan,nan,"),
    }
    line
}

/// Writes the header and one line per row.
pub fn emit_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(QpeError::arg("refusing to write an empty result table"));
    }
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", csv_row(row))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_csv_file(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    emit_csv(rows, &mut buf)?;
    std::fs::write(path, buf)?;
    Ok(())
}

/// Sidecar describing how a CSV was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub master_seed: u64,
    pub rows: usize,
    pub cell_errors: Vec<CellError>,
    /// Omitted when timing is disabled so the manifest is byte-reproducible.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_clock_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellError {
    pub row: usize,
    pub message: String,
}

impl RunManifest {
    pub fn new(command: &str, spec: &RunSpec, rows: &[SweepRow], wall_clock_seconds: Option<f64>) -> Self {
        RunManifest {
            tool: "qpe".into(),
            version: crate::VERSION.into(),
            command: command.into(),
            config: spec.to_document(),
            master_seed: spec.base.master_seed,
            rows: rows.len(),
            cell_errors: rows
                .iter()
                .enumerate()
                .filter_map(|(row, r)| {
                    r.outcome.as_ref().err().map(|m| CellError {
                        row,
                        message: m.clone(),
                    })
                })
                .collect(),
            wall_clock_seconds,
        }
    }

    pub fn resolved_config(&self) -> Result<RunSpec> {
        parse_config_value(self.config.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// `<csv path>.manifest.json`.
pub fn manifest_path(csv: &Path) -> std::path::PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".manifest.json");
    name.into()
}

/// Built-in sweeps reproducing the published figure layouts at desk scale;
/// `full_scale` restores the published `K` range and sample counts.
pub fn figure_preset(name: &str, full_scale: bool) -> Result<RunSpec> {
    let k_top = if full_scale { 20 } else { 10 };
    let doc = match name {
        "fig2" => json!({
            "scheme": "adaptive", "K": (1..=k_top).collect::<Vec<u32>>(), "M": 6,
            "T2_over_tau": 1000.0, "f_d": 1.0, "S": 1000, "seed": 0,
            "high_memory": full_scale,
        }),
        "fig3" => json!({
            "scheme": "nonadaptive", "K": (1..=k_top).collect::<Vec<u32>>(), "M_K": 6, "F": 2,
            "T2_over_tau": 1000.0, "f_d": [0.82, 0.86, 0.90, 0.94, 0.98],
            "S": if full_scale { 5000 } else { 1000 }, "seed": 0,
            "high_memory": full_scale,
        }),
        "fig4" => json!({
            "scheme": "nonadaptive", "K": (1..=8).collect::<Vec<u32>>(),
            "MK_F": [[8, 8], [12, 8], [16, 8], [8, 12], [12, 12], [16, 12]],
            "T2_over_tau": 1000.0,
            "contrast": [[0.55, 0.05], [0.65, 0.05], [0.75, 0.05], [0.85, 0.05]],
            "S": if full_scale { 10000 } else { 2000 }, "seed": 0,
            "high_memory": full_scale,
        }),
        other => {
            return Err(QpeError::config(
                "figure",
                format!("unknown figure {other:?}; expected fig2, fig3 or fig4"),
            ))
        }
    };
    parse_config_value(doc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::AggregateResult;

    #[test]
    fn adaptive_happy_path() {
        let spec = parse_config(
            r#"{"scheme":"adaptive","K":8,"M":6,"T2_over_tau":1000,"f_d":1.0,"S":1000,"seed":42}"#,
        )
        .unwrap();
        assert!(!spec.is_sweep());
        assert_eq!(spec.base.scheme, Scheme::Adaptive { clicks_per_stage: 6 });
        assert_eq!(spec.base.max_exponent, 8);
        assert_eq!(spec.base.tau_over_t2, 1e-3);
        assert_eq!(spec.base.contrast, Contrast::IDEAL);
        assert_eq!(spec.base.trials, 1000);
        assert_eq!(spec.base.master_seed, 42);
    }

    #[test]
    fn optimized_nonadaptive_cell() {
        let spec = parse_config(
            r#"{"scheme":"nonadaptive","M_K":16,"F":12,"f_a":0.85,"f_i":0.05,"K":8,"S":2000,"seed":7}"#,
        )
        .unwrap();
        assert_eq!(
            spec.base.scheme,
            Scheme::Nonadaptive {
                top_clicks: 16,
                growth: 12,
                order: StageOrder::Descending
            }
        );
        assert_eq!(spec.base.contrast, Contrast::new(0.85, 0.05).unwrap());
        assert_eq!(spec.base.tau_over_t2, 0.0);
    }

    fn config_err(doc: &str) -> (String, String) {
        match parse_config(doc) {
            Err(QpeError::Config { path, message }) => (path, message),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn contradictory_contrast() {
        let (path, msg) = config_err(r#"{"scheme":"adaptive","K":3,"M":6,"f_d":0.9,"f_a":0.8}"#);
        assert_eq!(path, "f_d");
        assert!(msg.contains("f_a"), "{msg}");
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(config_err(r#"{"scheme":"adaptive","K":3,"M":6,"bogus":1}"#).1.contains("bogus"));
        assert_eq!(config_err(r#"{"scheme":"adaptive","K":-1,"M":6}"#).0, "K");
        assert_eq!(config_err(r#"{"scheme":"adaptive","K":[1,-2],"M":6}"#).0, "K[1]");
        assert_eq!(config_err(r#"{"scheme":"adaptive","K":3,"M":6,"f_a":0.2,"f_i":0.5}"#).0, "f_a/f_i");
        assert_eq!(config_err(r#"{"scheme":"adaptive","K":3}"#).0, "M");
        assert_eq!(config_err(r#"{"scheme":"adaptive","K":3,"M":6,"F":2}"#).0, "F");
        assert_eq!(config_err(r#"{"scheme":"nonadaptive","K":3,"M":6}"#).0, "M");
        assert_eq!(config_err(r#"{"scheme":"sideways","K":3}"#).0, "scheme");
        assert_eq!(
            config_err(r#"{"scheme":"adaptive","K":3,"M":6,"T2_over_tau":10,"tau_over_T2":0.1}"#).0,
            "T2_over_tau"
        );
        assert_eq!(config_err(r#"{"scheme":"adaptive","K":16,"M":6}"#).0, "K");
        assert!(parse_config(r#"{"scheme":"adaptive","K":16,"M":6,"high_memory":true}"#).is_ok());
    }

    #[test]
    fn sweep_axes_from_arrays() {
        let spec = parse_config(
            r#"{"scheme":"nonadaptive","K":[1,2,3],"M_K":6,"F":2,"T2_over_tau":1000,
                "f_d":[0.82,0.9,0.98],"S":10}"#,
        )
        .unwrap();
        assert!(spec.is_sweep());
        assert_eq!(spec.cells().len(), 9);
        let fig4 = figure_preset("fig4", false).unwrap();
        assert_eq!(fig4.cells().len(), 4 * 6 * 8);
        assert_eq!(figure_preset("fig3", true).unwrap().cells().len(), 5 * 20);
        assert!(figure_preset("fig9", false).is_err());
    }

    #[test]
    fn manifest_round_trips_config() {
        for spec in [
            figure_preset("fig2", false).unwrap(),
            figure_preset("fig3", false).unwrap(),
            figure_preset("fig4", false).unwrap(),
            parse_config(r#"{"scheme":"nonadaptive","K":2,"M_K":3,"F":1,"stage_order":[0,2,1],"tau_over_T2":0.01}"#)
                .unwrap(),
        ] {
            let manifest = RunManifest::new("sweep", &spec, &[], None);
            let text = manifest.to_json().unwrap();
            let back: RunManifest = serde_json::from_str(&text).unwrap();
            assert_eq!(back.resolved_config().unwrap(), spec);
        }
    }

    #[test]
    fn csv_layout() {
        let config = TrialConfig::adaptive(2, 6).with_trials(3).with_seed(1);
        let agg = AggregateResult {
            v_h: f64::INFINITY,
            v_h_err: 0.25,
            resource_time: 42,
            product: f64::INFINITY,
            stderr_v_h: 0.0,
            stderr_v_h_err: 0.0,
            mean_sharpness: 0.0,
            trials: 3,
            invalid_trials: 3,
        };
        let rows = vec![
            SweepRow {
                config: config.clone(),
                outcome: Ok(agg),
            },
            SweepRow {
                config,
                outcome: Err("boom".into()),
            },
        ];
        let mut buf = Vec::new();
        emit_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        for line in &lines {
            assert_eq!(line.split(',').count(), 16, "{line}");
        }
        assert!(lines[1].starts_with("adaptive,2,6,,,1.0000000000000000e0,0.0000000000000000e0,inf,3,1,42,inf,"));
        assert!(lines[2].ends_with(",nan,nan,nan,nan,"));
        assert!(emit_csv(&[], Vec::new()).is_err());
    }

    #[test]
    fn float_format() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(f64::INFINITY), "inf");
        let x = 1.0 / 3.0;
        assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }
}
