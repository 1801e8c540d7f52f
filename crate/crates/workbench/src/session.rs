//! On-disk session store.
//!
//! ```text
//! <root>/<id>/session.json     manifest, replaced atomically
//! <root>/<id>/source.{png,jpg} upload, verbatim
//! <root>/<id>/runs/<n>/        artifacts of the committed run
//! ```
//!
//! Runs are built in a `.staging-*` directory and renamed into place before
//! the manifest is swapped, so readers only ever see complete runs.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use lulc_core::featurespace::cluster_points;
use lulc_core::{
    bar_chart_series, ellipsoid_mesh, overlap_mesh, pick_seed, pick_seed_mean, render_indexed, AxisOrder,
    ClusterGaussian, ClusterStats, FeaturePoint, IndexedImage, RgbColor, RgbImage, Seed, SeedPalette,
};
use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::error::{Result, WorkbenchError};
use crate::formats;
use crate::imageio;
use crate::pipeline::{self, KMeansSummary, PipelineOptions};

const MANIFEST: &str = "session.json";
const STAGING_PREFIX: &str = ".staging-";
const ELLIPSOID_SUBDIVISIONS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceInfo {
    pub file: String,
    pub format: String,
    pub width: usize,
    pub height: usize,
    pub pixels: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedPick {
    pub x: usize,
    pub y: usize,
    pub label: String,
    pub rgb: RgbColor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub number: u32,
    /// Relative to the session directory.
    pub dir: String,
    pub finished_at: u64,
    pub palette: SeedPalette,
    pub options: PipelineOptions,
    pub kmeans: KMeansSummary,
    /// Training pixels for clusters 2..=k.
    pub samples: Vec<Vec<FeaturePoint>>,
}

impl RunInfo {
    pub fn cluster_count(&self) -> usize {
        self.palette.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub created_at: u64,
    pub modified_at: u64,
    pub source: SourceInfo,
    /// Draft palette built from picks; the first pick is background.
    pub seeds: Vec<SeedPick>,
    pub runs_started: u32,
    pub run: Option<RunInfo>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRequest {
    pub x: usize,
    pub y: usize,
    pub label: Option<String>,
    /// Average the 3×3 neighborhood instead of taking the single pixel.
    #[serde(default)]
    pub neighborhood: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineRequest {
    pub palette: Option<SeedPalette>,
    pub options: Option<PipelineOptions>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArtifactKind {
    Source,
    Stats,
    Report,
    Bars,
    Kmeans,
    Clustered,
    ClusteredMap,
    Segmented,
    Mask,
    Colormap,
    Masked,
    Mesh,
    Ellipsoid,
    Overlap,
    Samples,
}

impl ArtifactKind {
    pub fn parse(s: &str) -> Option<Self> {
        use ArtifactKind::*;
        Some(match s {
            "source" => Source,
            "stats" => Stats,
            "report" => Report,
            "bars" => Bars,
            "kmeans" => Kmeans,
            "clustered" => Clustered,
            "clustered_map" => ClusteredMap,
            "segmented" => Segmented,
            "mask" => Mask,
            "colormap" => Colormap,
            "masked" => Masked,
            "mesh" => Mesh,
            "ellipsoid" => Ellipsoid,
            "overlap" => Overlap,
            "samples" => Samples,
            _ => return None,
        })
    }

    pub fn per_cluster(self) -> bool {
        use ArtifactKind::*;
        matches!(self, Mask | Colormap | Masked | Mesh | Ellipsoid | Overlap | Samples)
    }

    /// Feature-space artifacts exclude the background cluster.
    fn thematic_only(self) -> bool {
        use ArtifactKind::*;
        matches!(self, Mesh | Ellipsoid | Overlap | Samples)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct ArtifactQuery {
    /// `obj` for Wavefront meshes.
    pub format: Option<String>,
    /// Re-extract the mesh at this fraction of the density peak.
    pub level_frac: Option<f64>,
    /// Second cluster number for `overlap`.
    pub with: Option<usize>,
    /// Ellipsoid radius in standard deviations.
    pub scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub content_type: &'static str,
    pub body: Vec<u8>,
}

impl Artifact {
    fn json(body: Vec<u8>) -> Self {
        Artifact { content_type: "application/json", body }
    }

    fn png(body: Vec<u8>) -> Self {
        Artifact { content_type: "image/png", body }
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, bytes)?;
    fs::File::open(&tmp)?.sync_all()?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn staging_dir(parent: &Path) -> PathBuf {
    parent.join(format!("{STAGING_PREFIX}{}", Uuid::new_v4().simple()))
}

fn remove_stale_staging(dir: &Path) -> Result<()> {
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_name().to_string_lossy().starts_with(STAGING_PREFIX) {
            fs::remove_dir_all(entry.path())?;
        }
    }
    Ok(())
}

pub struct SessionStore {
    root: PathBuf,
    writers: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl SessionStore {
    /// Open (creating if needed) a store and discard half-built directories
    /// left by an interrupted process.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        remove_stale_staging(&root)?;
        for entry in fs::read_dir(&root)? {
            let runs = entry?.path().join("runs");
            if runs.is_dir() {
                remove_stale_staging(&runs)?;
            }
        }
        Ok(SessionStore {
            root,
            writers: Mutex::new(HashMap::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn session_dir(&self, id: &str) -> Result<PathBuf> {
        let parsed = Uuid::parse_str(id).map_err(|_| WorkbenchError::NotFound(format!("session {id}")))?;
        let dir = self.root.join(parsed.hyphenated().to_string());
        if dir.join(MANIFEST).is_file() {
            Ok(dir)
        } else {
            Err(WorkbenchError::NotFound(format!("session {id}")))
        }
    }

    fn writer(&self, id: &str) -> Arc<Mutex<()>> {
        let mut map = self.writers.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(id.to_string()).or_default().clone()
    }

    pub fn create(&self, bytes: &[u8]) -> Result<Session> {
        let img = imageio::load_image(bytes)?;
        let format = imageio::sniff_format(bytes)
            .ok_or_else(|| WorkbenchError::Decode("only PNG and JPEG uploads are accepted".into()))?;
        let id = Uuid::new_v4().hyphenated().to_string();
        let t = now();
        let session = Session {
            id: id.clone(),
            created_at: t,
            modified_at: t,
            source: SourceInfo {
                file: format!("source.{format}"),
                format: format.to_string(),
                width: img.width(),
                height: img.height(),
                pixels: img.len() as u64,
            },
            seeds: Vec::new(),
            runs_started: 0,
            run: None,
        };
        let staging = staging_dir(&self.root);
        fs::create_dir_all(staging.join("runs"))?;
        fs::write(staging.join(&session.source.file), bytes)?;
        fs::write(staging.join(MANIFEST), serde_json::to_vec_pretty(&session)?)?;
        fs::rename(&staging, self.root.join(&id))?;
        tracing::info!(%id, width = img.width(), height = img.height(), "session created");
        Ok(session)
    }

    pub fn get(&self, id: &str) -> Result<Session> {
        let dir = self.session_dir(id)?;
        Ok(serde_json::from_slice(&fs::read(dir.join(MANIFEST))?)?)
    }

    fn save(&self, dir: &Path, session: &Session) -> Result<()> {
        write_atomic(&dir.join(MANIFEST), &serde_json::to_vec_pretty(session)?)
    }

    pub fn source_image(&self, id: &str) -> Result<RgbImage> {
        let session = self.get(id)?;
        imageio::load_image_path(&self.session_dir(id)?.join(&session.source.file))
    }

    pub fn add_seed(&self, id: &str, req: &SeedRequest) -> Result<Session> {
        let dir = self.session_dir(id)?;
        let lock = self.writer(id);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut session = self.get(id)?;
        let img = self.source_image(id)?;
        let rgb = if req.neighborhood {
            pick_seed_mean(&img, req.x, req.y)?
        } else {
            pick_seed(&img, req.x, req.y)?
        };
        let label = req.label.clone().unwrap_or_else(|| {
            if session.seeds.is_empty() {
                "background".to_string()
            } else {
                format!("Cluster{}", session.seeds.len() + 1)
            }
        });
        session.seeds.push(SeedPick { x: req.x, y: req.y, label, rgb });
        session.modified_at = now();
        self.save(&dir, &session)?;
        Ok(session)
    }

    pub fn clear_seeds(&self, id: &str) -> Result<Session> {
        let dir = self.session_dir(id)?;
        let lock = self.writer(id);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut session = self.get(id)?;
        session.seeds.clear();
        session.modified_at = now();
        self.save(&dir, &session)?;
        Ok(session)
    }

    /// Run the full pipeline and commit its artifacts. On any error the
    /// previously committed run stays in place.
    pub fn run_pipeline(&self, id: &str, req: PipelineRequest) -> Result<Session> {
        let dir = self.session_dir(id)?;
        let lock = self.writer(id);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut session = self.get(id)?;

        let palette = match req.palette {
            Some(p) => p,
            None if session.seeds.is_empty() => {
                return Err(WorkbenchError::BadRequest(
                    "no palette given and no seeds picked for this session".into(),
                ))
            }
            None => SeedPalette::new(session.seeds.iter().map(|s| Seed::new(s.label.clone(), s.rgb)).collect())?,
        };
        let options = req.options.unwrap_or_default();
        let img = self.source_image(id)?;
        let out = pipeline::run_pipeline(&img, &palette, &options)?;

        let runs = dir.join("runs");
        fs::create_dir_all(&runs)?;
        let staging = staging_dir(&runs);
        fs::create_dir(&staging)?;
        if let Err(e) = pipeline::write_artifacts(&staging, &out) {
            let _ = fs::remove_dir_all(&staging);
            return Err(e);
        }
        let number = session.runs_started + 1;
        let target = runs.join(number.to_string());
        if target.exists() {
            // left behind by a process that died before its manifest swap
            fs::remove_dir_all(&target)?;
        }
        fs::rename(&staging, &target)?;

        let previous = session.run.take();
        session.runs_started = number;
        session.run = Some(RunInfo {
            number,
            dir: format!("runs/{number}"),
            finished_at: now(),
            palette,
            options,
            kmeans: KMeansSummary::from(&out.kmeans),
            samples: out.samples,
        });
        session.modified_at = now();
        self.save(&dir, &session)?;
        if let Some(prev) = previous {
            let _ = fs::remove_dir_all(dir.join(prev.dir));
        }
        tracing::info!(%id, run = number, clusters = session.run.as_ref().map_or(0, RunInfo::cluster_count), "pipeline committed");
        Ok(session)
    }

    fn run_file(&self, id: &str, run: &RunInfo, name: &str) -> Result<Vec<u8>> {
        let path = self.session_dir(id)?.join(&run.dir).join(name);
        fs::read(&path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => WorkbenchError::NotFound(format!("artifact {name}")),
            _ => e.into(),
        })
    }

    fn indexed(&self, id: &str, run: &RunInfo) -> Result<IndexedImage> {
        let map = formats::parse_colormap(&self.run_file(id, run, formats::CLUSTERED_MAP)?)?;
        imageio::decode_label_png(&self.run_file(id, run, formats::CLUSTERED_PNG)?, map)
    }

    fn stats(&self, id: &str, run: &RunInfo) -> Result<ClusterStats> {
        Ok(serde_json::from_slice(&self.run_file(id, run, formats::STATS_JSON)?)?)
    }

    /// Fetch one artifact. `k` is the 1-based cluster number.
    pub fn artifact(&self, id: &str, kind: &str, k: Option<usize>, query: &ArtifactQuery) -> Result<Artifact> {
        let session = self.get(id)?;
        let kind = ArtifactKind::parse(kind).ok_or_else(|| WorkbenchError::NotFound(format!("artifact kind {kind}")))?;
        match (kind.per_cluster(), k) {
            (true, None) => {
                return Err(WorkbenchError::BadRequest(format!("{kind:?} artifacts need a cluster number")))
            }
            (false, Some(_)) => return Err(WorkbenchError::NotFound(format!("{kind:?} is not per cluster"))),
            _ => {}
        }
        if kind == ArtifactKind::Source {
            let body = fs::read(self.session_dir(id)?.join(&session.source.file))?;
            let content_type = if session.source.format == "png" { "image/png" } else { "image/jpeg" };
            return Ok(Artifact { content_type, body });
        }
        let run = session
            .run
            .as_ref()
            .ok_or_else(|| WorkbenchError::Conflict("pipeline has not been run for this session".into()))?;
        let clusters = run.cluster_count();
        let k = match k {
            Some(n) if n == 0 || n > clusters => {
                return Err(WorkbenchError::NotFound(format!("cluster {n} (run has {clusters})")))
            }
            Some(1) if kind.thematic_only() => {
                return Err(WorkbenchError::Rejected(
                    "cluster 1 is background and has no feature-space geometry".into(),
                ))
            }
            other => other.unwrap_or(0),
        };

        use ArtifactKind::*;
        Ok(match kind {
            Source => unreachable!(),
            Stats => Artifact::json(self.run_file(id, run, formats::STATS_JSON)?),
            Report => Artifact {
                content_type: "text/plain; charset=utf-8",
                body: self.stats(id, run)?.format_report().into_bytes(),
            },
            Bars => Artifact::json(serde_json::to_vec(&bar_chart_series(&self.stats(id, run)?))?),
            Kmeans => Artifact::json(serde_json::to_vec(&run.kmeans)?),
            Clustered => Artifact::png(self.run_file(id, run, formats::CLUSTERED_PNG)?),
            ClusteredMap => Artifact::json(self.run_file(id, run, formats::CLUSTERED_MAP)?),
            Segmented => {
                let idx = self.indexed(id, run)?;
                Artifact::png(imageio::encode_rgb_png(&render_indexed(&idx, idx.colormap())?)?)
            }
            Mask => Artifact::png(self.run_file(id, run, &formats::mask_file(k))?),
            Colormap => Artifact::json(self.run_file(id, run, &formats::colormap_file(k))?),
            Masked => {
                let map = formats::parse_colormap(&self.run_file(id, run, &formats::colormap_file(k))?)?;
                let idx = self.indexed(id, run)?;
                Artifact::png(imageio::encode_rgb_png(&render_indexed(&idx, &map)?)?)
            }
            Mesh => {
                let mesh = match query.level_frac {
                    None => formats::parse_mesh(&self.run_file(id, run, &formats::mesh_file(k))?)?,
                    Some(f) => {
                        let options = PipelineOptions { iso_level_fraction: f, ..run.options.clone() };
                        options.validate()?;
                        let idx = self.indexed(id, run)?;
                        let color = run.palette.seeds()[k - 1].color;
                        pipeline::cluster_mesh(&self.source_image(id)?, &idx, k - 1, &options, color)?
                    }
                };
                mesh_artifact(&mesh, query)?
            }
            Ellipsoid => {
                let scale = query.scale.unwrap_or(1.0);
                let points = cluster_points(&self.source_image(id)?, &self.indexed(id, run)?, k - 1, AxisOrder::RGB)?;
                let g = ClusterGaussian::from_points(&points)?;
                let mesh = ellipsoid_mesh(&g, scale, ELLIPSOID_SUBDIVISIONS)?
                    .with_style(run.palette.seeds()[k - 1].color, k);
                mesh_artifact(&mesh, query)?
            }
            Overlap => {
                let b = query
                    .with
                    .ok_or_else(|| WorkbenchError::BadRequest("overlap needs ?with=<cluster>".into()))?;
                if b == 0 || b > clusters {
                    return Err(WorkbenchError::NotFound(format!("cluster {b} (run has {clusters})")));
                }
                if b == 1 {
                    return Err(WorkbenchError::Rejected(
                        "cluster 1 is background and has no feature-space geometry".into(),
                    ));
                }
                let options = PipelineOptions {
                    iso_level_fraction: query.level_frac.unwrap_or(run.options.iso_level_fraction),
                    ..run.options.clone()
                };
                options.validate()?;
                let img = self.source_image(id)?;
                let idx = self.indexed(id, run)?;
                let fa = pipeline::cluster_field(&img, &idx, k - 1, &options)?;
                let fb = pipeline::cluster_field(&img, &idx, b - 1, &options)?;
                let level = options.iso_level_fraction * fa.max().min(fb.max());
                let mesh = if level > 0.0 {
                    overlap_mesh(&fa, &fb, level)?
                } else {
                    Default::default()
                };
                mesh_artifact(&mesh.with_style(blend(run, k, b), k), query)?
            }
            Samples => Artifact::json(serde_json::to_vec(&run.samples[k - 2])?),
        })
    }
}

fn blend(run: &RunInfo, a: usize, b: usize) -> RgbColor {
    let (ca, cb) = (run.palette.seeds()[a - 1].color, run.palette.seeds()[b - 1].color);
    RgbColor::new((ca.r + cb.r) / 2.0, (ca.g + cb.g) / 2.0, (ca.b + cb.b) / 2.0)
}

fn mesh_artifact(mesh: &lulc_core::IsoMesh, query: &ArtifactQuery) -> Result<Artifact> {
    match query.format.as_deref() {
        None | Some("json") => Ok(Artifact::json(formats::mesh_json(mesh)?)),
        Some("obj") => Ok(Artifact {
            content_type: "model/obj",
            body: formats::mesh_obj(mesh).into_bytes(),
        }),
        Some(other) => Err(WorkbenchError::BadRequest(format!("unknown mesh format {other}"))),
    }
}
