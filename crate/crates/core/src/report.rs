//! Artifact provenance and the merged comparison report.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::experiments::{ChiReport, HistogramData};
use crate::games::GameResult;
use crate::geometry::IncidenceGeometry;
use crate::quantum::NoiseParams;

pub const TOOL: &str = "contextuality";

const REFERENCE_JSON: &str = include_str!("../data/published_reference.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceChi {
    pub geometry: String,
    pub degree: usize,
    pub lines: usize,
    pub chi_sim: f64,
    pub chi_sim_noisy: f64,
    pub chi_hardware: f64,
    pub nchv_bound: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceGame {
    pub kind: String,
    pub geometry: String,
    pub backend: String,
    pub sigma_sim: f64,
    pub sigma_sim_noisy: f64,
    pub sigma_hardware: f64,
    pub classical_value: String,
}

/// Published hardware numbers shipped with the crate. They are device
/// specific and only ever shown next to computed values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceData {
    pub label: String,
    pub notes: String,
    pub rio_negro: Vec<ReferenceChi>,
    pub games: Vec<ReferenceGame>,
}

pub fn reference_data() -> ReferenceData {
    serde_json::from_str(REFERENCE_JSON).expect("bundled reference data parses")
}

/// Reference row name for a geometry or subgeometry family.
pub fn reference_class(name: &str) -> String {
    match name {
        "squares" => "square".into(),
        "doilies" => "doily".into(),
        n if n.starts_with("E_") => "elliptic".into(),
        n if n.starts_with("H_") => "hyperbolic".into(),
        n => n.into(),
    }
}

/// SHA-256 of the compact JSON form; `Value` objects keep their keys sorted,
/// so equal configs hash equally.
pub fn config_hash(config: &Value) -> String {
    hex::encode(Sha256::digest(config.to_string().as_bytes()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub config_hash: String,
    pub geometry: String,
    pub geometry_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseParams>,
}

impl Provenance {
    pub fn new(command: &str, seed: u64, config: Value, geom: &IncidenceGeometry, noise: Option<NoiseParams>) -> Self {
        Self {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            config_hash: config_hash(&config),
            config,
            geometry: geom.name().into(),
            geometry_hash: geom.content_hash(),
            noise,
        }
    }
}

/// What every JSON artifact looks like on disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact<R> {
    pub provenance: Provenance,
    pub result: R,
}

impl<R: Serialize> Artifact<R> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("artifacts serialize");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChiRow {
    pub geometry: String,
    /// `run` for a dedicated run, or the ambient geometry the best member was
    /// read out of.
    pub source: String,
    pub degree: usize,
    pub lines: usize,
    pub nchv_bound: i64,
    pub chi_noiseless: Option<f64>,
    pub chi_noisy: Option<f64>,
    pub chi_noisy_stderr: Option<f64>,
    pub reference_chi_sim: Option<f64>,
    pub reference_chi_sim_noisy: Option<f64>,
    pub reference_chi_hardware: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GameRow {
    pub kind: String,
    pub geometry: String,
    pub sigma_noiseless: Option<f64>,
    pub sigma_noisy: Option<f64>,
    /// Best classical rate produced by a classical run, as `"a/b"`.
    pub classical: Option<String>,
    pub reference_sigma_sim: Option<f64>,
    pub reference_sigma_sim_noisy: Option<f64>,
    pub reference_sigma_hardware: Option<f64>,
    pub reference_classical_value: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceRef {
    pub path: String,
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleProvenance {
    pub tool: String,
    pub version: String,
    pub sources: Vec<SourceRef>,
    /// Hash over the source list.
    pub config_hash: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub reference_label: String,
    pub chi_rows: Vec<ChiRow>,
    pub game_rows: Vec<GameRow>,
    pub warnings: Vec<String>,
    pub provenance: BundleProvenance,
}

fn parse_result<R: DeserializeOwned>(path: &str, v: Value, warnings: &mut Vec<String>) -> Option<R> {
    match serde_json::from_value(v) {
        Ok(r) => Some(r),
        Err(e) => {
            warnings.push(format!("{path}: missing or malformed columns ({e}); skipped"));
            None
        }
    }
}

/// Merges already-parsed artifacts. Artifacts naming the same geometry must
/// agree on its content hash.
pub fn merge(artifacts: Vec<(String, Artifact<Value>)>) -> Result<ReportBundle> {
    let reference = reference_data();
    let mut warnings = Vec::new();
    let mut hashes: BTreeMap<String, (String, String)> = BTreeMap::new();
    for (path, a) in &artifacts {
        let p = &a.provenance;
        match hashes.get(&p.geometry) {
            Some((h, first)) if *h != p.geometry_hash => {
                return Err(Error::Config(format!(
                    "{path} and {first} describe different geometries under the name {:?}; refusing to merge",
                    p.geometry
                )))
            }
            Some(_) => {}
            None => {
                hashes.insert(p.geometry.clone(), (p.geometry_hash.clone(), path.clone()));
            }
        }
    }

    let mut chi: BTreeMap<(String, String), ChiRow> = BTreeMap::new();
    let mut games: BTreeMap<(String, String), GameRow> = BTreeMap::new();
    let mut sources = Vec::new();
    for (path, a) in artifacts {
        let prov = a.provenance;
        sources.push(SourceRef {
            path: path.clone(),
            command: prov.command.clone(),
            seed: prov.seed,
            config_hash: prov.config_hash.clone(),
        });
        let noiseless = prov.noise.is_none_or(|n| n.is_noiseless());
        let obj = a.result.as_object();
        let has = |k: &str| obj.is_some_and(|o| o.contains_key(k));
        if has("chi") {
            let Some(r) = parse_result::<ChiReport>(&path, a.result, &mut warnings) else { continue };
            let row = chi.entry((r.geometry.clone(), "run".into())).or_insert_with(|| ChiRow {
                geometry: r.geometry.clone(),
                source: "run".into(),
                degree: r.degree,
                lines: r.lines,
                nchv_bound: r.nchv_bound,
                ..ChiRow::default()
            });
            fill_chi(row, r.noise.is_noiseless(), r.chi, r.stderr, &path, &mut warnings);
        } else if has("family") {
            let Some(h) = parse_result::<HistogramData>(&path, a.result, &mut warnings) else { continue };
            let best = h.members.iter().find(|m| m.label == h.best);
            let name = reference_class(&h.family.to_string());
            let row = chi.entry((name.clone(), h.ambient.clone())).or_insert_with(|| ChiRow {
                geometry: name,
                source: h.ambient.clone(),
                degree: h.degree,
                lines: h.lines,
                nchv_bound: h.nchv_bound,
                ..ChiRow::default()
            });
            let stderr = best.map_or(0.0, |m| m.stderr);
            fill_chi(row, noiseless, h.max, stderr, &path, &mut warnings);
        } else if has("rate") && has("kind") {
            let Some(g) = parse_result::<GameResult>(&path, a.result, &mut warnings) else { continue };
            let row = games
                .entry((g.kind.to_string(), g.geometry.clone()))
                .or_insert_with(|| GameRow {
                    kind: g.kind.to_string(),
                    geometry: g.geometry.clone(),
                    ..GameRow::default()
                });
            if g.strategy == "quantum" {
                let cell = if noiseless { &mut row.sigma_noiseless } else { &mut row.sigma_noisy };
                if cell.replace(g.rate_value).is_some() {
                    warnings.push(format!("{path}: repeats a quantum {} result; keeping the later one", g.kind));
                }
            } else {
                let rate = format!("{}/{}", g.rate.numer(), g.rate.denom());
                let better = row.classical.as_deref().is_none_or(|old| ratio_value(old) < g.rate_value);
                if better {
                    row.classical = Some(rate);
                }
            }
        } else {
            warnings.push(format!("{path}: not a χ, histogram or game artifact; skipped"));
        }
    }

    let mut chi_rows: Vec<ChiRow> = chi.into_values().collect();
    for row in &mut chi_rows {
        if row.nchv_bound != row.lines as i64 - 2 * row.degree as i64 {
            return Err(Error::Internal(format!("bound of {} is not L − 2d", row.geometry)));
        }
        if let Some(r) = reference.rio_negro.iter().find(|r| r.geometry == reference_class(&row.geometry)) {
            if r.lines == row.lines {
                row.reference_chi_sim = Some(r.chi_sim);
                row.reference_chi_sim_noisy = Some(r.chi_sim_noisy);
                row.reference_chi_hardware = Some(r.chi_hardware);
            }
        }
    }
    let mut game_rows: Vec<GameRow> = games.into_values().collect();
    for row in &mut game_rows {
        let class = reference_class(&row.geometry);
        if let Some(r) = reference.games.iter().find(|r| r.kind == row.kind && r.geometry == class) {
            row.reference_sigma_sim = Some(r.sigma_sim);
            row.reference_sigma_sim_noisy = Some(r.sigma_sim_noisy);
            row.reference_sigma_hardware = Some(r.sigma_hardware);
            row.reference_classical_value = Some(r.classical_value.clone());
        }
    }
    let listing = serde_json::to_value(&sources)?;
    Ok(ReportBundle {
        reference_label: reference.label,
        chi_rows,
        game_rows,
        warnings,
        provenance: BundleProvenance {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config_hash(&listing),
            sources,
        },
    })
}

fn fill_chi(row: &mut ChiRow, noiseless: bool, chi: f64, stderr: f64, path: &str, warnings: &mut Vec<String>) {
    let cell = if noiseless {
        &mut row.chi_noiseless
    } else {
        row.chi_noisy_stderr = Some(stderr);
        &mut row.chi_noisy
    };
    if cell.replace(chi).is_some() {
        warnings.push(format!("{path}: repeats a χ value for {}; keeping the later one", row.geometry));
    }
}

fn ratio_value(s: &str) -> f64 {
    s.split_once('/')
        .and_then(|(a, b)| Some(a.parse::<f64>().ok()? / b.parse::<f64>().ok()?))
        .unwrap_or(f64::NEG_INFINITY)
}

/// Reads artifacts from files, and from the `.json` files directly inside
/// any directory given. Unparseable files become warnings.
pub fn report(paths: &[impl AsRef<Path>]) -> Result<ReportBundle> {
    let mut files = Vec::new();
    for p in paths {
        let p = p.as_ref();
        if p.is_dir() {
            let mut inner: Vec<_> = std::fs::read_dir(p)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            inner.sort();
            files.extend(inner);
        } else {
            files.push(p.to_path_buf());
        }
    }
    let mut artifacts = Vec::new();
    let mut skipped = Vec::new();
    for f in files {
        let name = f.display().to_string();
        let text = std::fs::read_to_string(&f)?;
        match serde_json::from_str::<Artifact<Value>>(&text) {
            Ok(a) => artifacts.push((name, a)),
            Err(e) => skipped.push(format!("{name}: not an artifact ({e}); skipped")),
        }
    }
    let mut bundle = merge(artifacts)?;
    skipped.append(&mut bundle.warnings);
    bundle.warnings = skipped;
    Ok(bundle)
}

impl ReportBundle {
    /// Plain-text tables.
    pub fn to_markdown(&self) -> String {
        let f = |v: Option<f64>| v.map_or("–".to_string(), |x| format!("{x:.4}"));
        let mut s = String::new();
        if !self.chi_rows.is_empty() {
            s.push_str("| geometry | source | d | L | χ noiseless | χ noisy | L − 2d | ref χ sim | ref χ noisy sim | ref χ hardware |\n");
            s.push_str("|---|---|---|---|---|---|---|---|---|---|\n");
            for r in &self.chi_rows {
                writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                    r.geometry,
                    r.source,
                    r.degree,
                    r.lines,
                    f(r.chi_noiseless),
                    f(r.chi_noisy),
                    r.nchv_bound,
                    f(r.reference_chi_sim),
                    f(r.reference_chi_sim_noisy),
                    f(r.reference_chi_hardware)
                )
                .unwrap();
            }
            s.push('\n');
        }
        if !self.game_rows.is_empty() {
            s.push_str("| game | geometry | σ noiseless | σ noisy | classical | ref σ sim | ref σ noisy sim | ref σ hardware | ref ω |\n");
            s.push_str("|---|---|---|---|---|---|---|---|---|\n");
            for r in &self.game_rows {
                writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
                    r.kind,
                    r.geometry,
                    f(r.sigma_noiseless),
                    f(r.sigma_noisy),
                    r.classical.as_deref().unwrap_or("–"),
                    f(r.reference_sigma_sim),
                    f(r.reference_sigma_sim_noisy),
                    f(r.reference_sigma_hardware),
                    r.reference_classical_value.as_deref().unwrap_or("–")
                )
                .unwrap();
            }
            s.push('\n');
        }
        if !self.chi_rows.is_empty() || !self.game_rows.is_empty() {
            writeln!(s, "ref columns: {}", self.reference_label).unwrap();
        }
        for w in &self.warnings {
            writeln!(s, "warning: {w}").unwrap();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{rio_negro_run, RioNegroConfig};
    use crate::games::{play_quantum, GameKind, PlayMode};
    use crate::geometry::{build_doily, build_mermin_square};
    use serde_json::json;

    fn wrap<R: Serialize>(command: &str, geom: &IncidenceGeometry, noise: NoiseParams, r: &R) -> Artifact<Value> {
        Artifact {
            provenance: Provenance::new(command, 0, json!({"geometry": geom.name()}), geom, Some(noise)),
            result: serde_json::to_value(r).unwrap(),
        }
    }

    #[test]
    fn reference_data_is_labelled() {
        let r = reference_data();
        assert_eq!(r.label, "reference — hardware results, not reproducible offline");
        assert_eq!(r.rio_negro.len(), 5);
        assert!(r.rio_negro.iter().all(|x| x.nchv_bound == x.lines as i64 - 2 * x.degree as i64));
        assert_eq!(r.games.len(), 6);
    }

    #[test]
    fn config_hash_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"a":1,"b":[2,3]}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"b":[2,3],"a":1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_ne!(config_hash(&a), config_hash(&json!({"a": 2, "b": [2, 3]})));
    }

    #[test]
    fn empty_report() {
        let b = merge(vec![]).unwrap();
        assert!(b.chi_rows.is_empty() && b.game_rows.is_empty() && b.warnings.is_empty());
        assert_eq!(b.to_markdown(), "");
    }

    #[test]
    fn merges_runs_and_references() {
        let d = build_doily();
        let sq = build_mermin_square();
        let config = RioNegroConfig {
            shots: 10,
            ..RioNegroConfig::default()
        };
        let run = rio_negro_run::<f64>(&d, &config, None).unwrap();
        let game = play_quantum::<f64>(&sq, GameKind::Ll, &NoiseParams::noiseless(), PlayMode::Exhaustive).unwrap();
        let b = merge(vec![
            ("a.json".into(), wrap("rio-negro", &d, config.noise, &run.report)),
            ("b.json".into(), wrap("game", &sq, NoiseParams::noiseless(), &game.result)),
            ("c.json".into(), wrap("degree", &sq, NoiseParams::noiseless(), &json!({"degree": 1}))),
        ])
        .unwrap();
        assert_eq!(b.chi_rows.len(), 1);
        let row = &b.chi_rows[0];
        assert_eq!((row.chi_noiseless, row.reference_chi_sim, row.chi_noisy), (Some(15.0), Some(15.0), None));
        assert_eq!(b.game_rows[0].sigma_noiseless, Some(1.0));
        assert_eq!(b.game_rows[0].reference_classical_value.as_deref(), Some("8/9"));
        assert_eq!(b.warnings.len(), 1, "{:?}", b.warnings);
        assert!(b.to_markdown().contains("| doily | run | 3 | 15 | 15.0000 |"));
    }

    #[test]
    fn refuses_mismatched_geometry() {
        let d = build_doily();
        let fake = build_mermin_square().with_name("doily");
        let r = json!({"chi": 1.0});
        let err = merge(vec![
            ("a.json".into(), wrap("rio-negro", &d, NoiseParams::noiseless(), &r)),
            ("b.json".into(), wrap("rio-negro", &fake, NoiseParams::noiseless(), &r)),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn partial_artifacts_become_warnings() {
        let d = build_doily();
        let b = merge(vec![("a.json".into(), wrap("rio-negro", &d, NoiseParams::noiseless(), &json!({"chi": 1.0})))]).unwrap();
        assert!(b.chi_rows.is_empty());
        assert_eq!(b.warnings.len(), 1);
    }
}
