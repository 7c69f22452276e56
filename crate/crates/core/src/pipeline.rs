//! End-to-end run: sample or load, halve, certify, ball, cover, cutsets,
//! walls, dual complex, verification. Produces a report and an artifact
//! bundle; the exit status follows the 0/2/3/4 contract.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::cayley::{make_oracle, CayleyBall, OracleKind};
use crate::cover::Cover;
use crate::cubecomplex::{build_dual, growth_witness, GrowthWitness, MedianReport, DEFAULT_MAX_DIM, DEFAULT_VERTEX_BUDGET};
use crate::error::{Error, Result};
use crate::presentation::{halve, HalvedPresentation, Presentation};
use crate::relhom::HalfGroup;
use crate::sampler::{sample, ModelSpec};
use crate::smallcancel::{asphericity_checks, check_metric, max_piece_length, PieceReport, Violation};
use crate::walls::{
    compute_a, compute_l, cover_components, enumerate_walls, Branch, CutsetA, CutsetView, PointGraph, DEFAULT_WALL_CAP,
};
use crate::words::Word;

/// A presentation file path, or the same JSON inline.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PresentationSource {
    Path(PathBuf),
    Inline(serde_json::Value),
}

fn default_oracle() -> OracleKind {
    OracleKind::Dehn
}
fn default_cap() -> usize {
    DEFAULT_WALL_CAP
}
fn default_dim() -> usize {
    DEFAULT_MAX_DIM
}
fn default_budget() -> usize {
    DEFAULT_VERTEX_BUDGET
}
fn default_growth() -> usize {
    3
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub model: Option<ModelSpec>,
    #[serde(default)]
    pub presentation: Option<PresentationSource>,
    pub ball_radius: usize,
    pub inner_radius: usize,
    /// Width of the certification annulus; defaults to `ball − inner`.
    #[serde(default)]
    pub margin: Option<usize>,
    #[serde(default = "default_oracle")]
    pub oracle: OracleKind,
    #[serde(default = "default_cap")]
    pub wall_cap: usize,
    #[serde(default = "default_dim")]
    pub max_dim: usize,
    #[serde(default = "default_budget")]
    pub vertex_budget: usize,
    #[serde(default = "default_growth")]
    pub growth_n: usize,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<PipelineConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        PipelineConfig::from_json(&text)
    }

    /// The genus-2 surface group at ball radius 6, inner radius 3.
    pub fn surface_fixture() -> PipelineConfig {
        PipelineConfig {
            model: None,
            presentation: Some(PresentationSource::Inline(serde_json::json!({
                "n": 4,
                "relators": ["abABcdCD"],
            }))),
            ball_radius: 6,
            inner_radius: 3,
            margin: None,
            oracle: OracleKind::Exact,
            wall_cap: DEFAULT_WALL_CAP,
            max_dim: DEFAULT_MAX_DIM,
            vertex_budget: DEFAULT_VERTEX_BUDGET,
            growth_n: 3,
            out_dir: None,
            seed: None,
        }
    }

    pub fn margin(&self) -> usize {
        self.margin.unwrap_or(self.ball_radius.saturating_sub(self.inner_radius))
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.model, &self.presentation) {
            (Some(_), Some(_)) => return Err(Error::Config("give a model or a presentation, not both".into())),
            (None, None) => return Err(Error::Config("no model and no presentation".into())),
            (Some(m), None) => {
                if self.seed.is_none() && m.seed == 0 {
                    return Err(Error::Config("sampling needs a seed".into()));
                }
                m.validate().map_err(|e| Error::Config(e.to_string()))?;
            }
            _ => {}
        }
        if self.inner_radius + self.margin() > self.ball_radius {
            return Err(Error::Config(format!(
                "inner radius {} + margin {} exceeds ball radius {}",
                self.inner_radius,
                self.margin(),
                self.ball_radius
            )));
        }
        if self.inner_radius == 0 {
            return Err(Error::Config("inner radius must be positive".into()));
        }
        Ok(())
    }

    fn halved(&self) -> Result<HalvedPresentation> {
        match (&self.model, &self.presentation) {
            (Some(m), _) => {
                let mut m = *m;
                if let Some(s) = self.seed {
                    m.seed = s;
                }
                halve(&sample(&m)?.presentation)
            }
            (_, Some(PresentationSource::Path(p))) => HalvedPresentation::load(p),
            (_, Some(PresentationSource::Inline(v))) => HalvedPresentation::from_json(&v.to_string()),
            _ => Err(Error::Config("no presentation".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Presentation,
    Certified,
    Ball,
    Cover,
    Walls,
    Complex,
    Verified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Uncertified,
    Falsified,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Uncertified => 3,
            Status::Falsified => 4,
        }
    }
}

/// Exit code of a pipeline error.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 2,
        Error::Budget(_) | Error::Canonicalization(_) => 3,
        _ => 1,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificates {
    pub asphericity_t: Vec<Violation>,
    pub asphericity_r: Vec<Violation>,
    pub pieces_t: PieceReport,
    pub pieces_r: PieceReport,
    pub c16_t: bool,
    pub c16_r: bool,
}

impl Certificates {
    pub fn compute(hp: &HalvedPresentation) -> Certificates {
        let r = hp.half_presentation();
        let sixth = Rational64::new(1, 6);
        Certificates {
            asphericity_t: asphericity_checks(&hp.base),
            asphericity_r: asphericity_checks(&r),
            pieces_t: max_piece_length(&hp.base),
            pieces_r: max_piece_length(&r),
            c16_t: check_metric(&hp.base, sixth),
            c16_r: check_metric(&r, sixth),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CutsetSummary {
    pub pair: usize,
    pub k: Word,
    pub branch: Branch,
    pub size: usize,
    pub diameter: usize,
    pub certified: bool,
    pub l_size: usize,
    pub l_certified: bool,
    /// Components among inner cover points, by exact labels.
    pub cover_components: usize,
    /// Components among inner base points.
    pub base_components: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Verification {
    pub median: Option<MedianReport>,
    pub dim_within_transverse_bound: bool,
    pub distance_pairs: usize,
    pub distance_mismatches: usize,
    pub growth: Option<GrowthWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub stage: Stage,
    pub status: Status,
    pub presentation: Presentation,
    pub halves: Vec<Word>,
    pub certificates: Option<Certificates>,
    pub ball_vertices: usize,
    pub cover_vertices: usize,
    /// Walls live on base points when any pair is in the alternative branch.
    pub wall_space: Option<String>,
    pub cutsets: Vec<CutsetSummary>,
    pub walls: usize,
    pub transverse_pairs: usize,
    pub max_transverse: usize,
    pub complex_vertices: usize,
    pub complex_cubes: Vec<usize>,
    pub complex_dim: usize,
    pub complex_truncated: bool,
    pub verification: Option<Verification>,
    pub warnings: Vec<String>,
    pub falsifications: Vec<String>,
}

pub struct PipelineOutcome {
    pub report: PipelineReport,
    /// File name → contents.
    pub artifacts: BTreeMap<String, String>,
}

impl PipelineOutcome {
    pub fn exit_code(&self) -> i32 {
        self.report.status.exit_code()
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, body) in &self.artifacts {
            std::fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

fn finish(mut report: PipelineReport, mut artifacts: BTreeMap<String, String>) -> PipelineOutcome {
    report.status = if !report.falsifications.is_empty() {
        Status::Falsified
    } else if report.stage < Stage::Verified {
        Status::Uncertified
    } else {
        Status::Pass
    };
    artifacts.insert("report.json".into(), json(&report));
    PipelineOutcome { report, artifacts }
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let hp = cfg.halved()?;
    let mut artifacts = BTreeMap::new();
    artifacts.insert("presentation.json".into(), hp.base.to_json());
    artifacts.insert("halved.json".into(), hp.to_json());
    let mut report = PipelineReport {
        stage: Stage::Presentation,
        status: Status::Uncertified,
        presentation: hp.base.clone(),
        halves: hp.halves().to_vec(),
        certificates: None,
        ball_vertices: 0,
        cover_vertices: 0,
        wall_space: None,
        cutsets: Vec::new(),
        walls: 0,
        transverse_pairs: 0,
        max_transverse: 0,
        complex_vertices: 0,
        complex_cubes: Vec::new(),
        complex_dim: 0,
        complex_truncated: false,
        verification: None,
        warnings: Vec::new(),
        falsifications: Vec::new(),
    };

    let certs = Certificates::compute(&hp);
    artifacts.insert("certificates.json".into(), json(&certs));
    let mut blockers = Vec::new();
    if !certs.asphericity_t.is_empty() {
        blockers.push("T fails the asphericity checks".to_string());
    }
    if !certs.asphericity_r.is_empty() {
        blockers.push("R fails the asphericity checks".to_string());
    }
    if !certs.c16_t {
        blockers.push(format!("T is not C'(1/6) (max piece {})", certs.pieces_t.max_piece_length));
    }
    if cfg.oracle == OracleKind::Dehn && !certs.c16_r {
        blockers.push(format!(
            "R is not C'(1/6) (max piece {}), so Dehn's algorithm is not a certified solution",
            certs.pieces_r.max_piece_length
        ));
    }
    report.certificates = Some(certs);
    if !blockers.is_empty() {
        report.warnings.extend(blockers);
        return Ok(finish(report, artifacts));
    }
    report.stage = Stage::Certified;

    let r = hp.half_presentation();
    let oracle = match make_oracle(cfg.oracle, &r) {
        Ok(o) => o,
        Err(e) => {
            report.warnings.push(format!("no oracle: {e}"));
            return Ok(finish(report, artifacts));
        }
    };
    let ball = match CayleyBall::build(oracle.as_ref(), cfg.ball_radius) {
        Ok(b) => Arc::new(b),
        Err(e @ (Error::Canonicalization(_) | Error::Budget(_))) => {
            report.warnings.push(format!("ball: {e}"));
            return Ok(finish(report, artifacts));
        }
        Err(e) => return Err(e),
    };
    report.ball_vertices = ball.len();
    artifacts.insert("ball.json".into(), ball.to_json());
    report.stage = Stage::Ball;

    let k = HalfGroup::new(&hp, oracle.as_ref(), Some(&ball));
    let cover = Cover::build(ball.clone(), &k, cfg.inner_radius)?;
    report.cover_vertices = cover.len();
    artifacts.insert("cover.json".into(), cover.to_json());
    report.stage = Stage::Cover;

    // cutsets at every inner translate
    let margin = cfg.margin();
    let mut branches = Vec::new();
    for i in 0..hp.pairs() {
        branches.push(compute_a(&hp, i, &Word::empty(), &ball, margin)?.branch);
    }
    if branches.contains(&Branch::Degenerate) {
        report.warnings.push("a cutset complement misses the ball boundary".into());
        return Ok(finish(report, artifacts));
    }
    let alternative = branches.contains(&Branch::Alternative);
    let pairs: Vec<usize> = (0..hp.pairs())
        .filter(|&i| !alternative || branches[i] == Branch::Alternative)
        .collect();
    let base_graph = PointGraph::from_ball(&ball, cfg.inner_radius);
    let cover_graph = PointGraph::from_cover(&cover, cfg.inner_radius);
    let mut certified: Vec<CutsetA> = Vec::new();
    for v in ball.within(cfg.inner_radius) {
        for &i in &pairs {
            let a = match compute_a(&hp, i, ball.vertex(v), &ball, margin) {
                Ok(a) => a,
                Err(Error::Range(_)) => continue,
                Err(e) => return Err(e),
            };
            let l = compute_l(&hp, &a, &ball);
            let base_view = CutsetView::from_base(&a, &base_graph);
            let mut summary = CutsetSummary {
                pair: i,
                k: a.k.clone(),
                branch: a.branch,
                size: a.vertices.len(),
                diameter: a.diameter,
                certified: a.finite_certified,
                l_size: l.loops.len(),
                l_certified: l.certified,
                cover_components: 0,
                base_components: base_view.components,
            };
            if a.finite_certified {
                let comps = cover_components(&cover, &hp, &a);
                let mut labels: Vec<usize> = cover_graph.points.iter().filter_map(|&p| comps[p]).collect();
                labels.sort_unstable();
                labels.dedup();
                summary.cover_components = labels.len();
                if labels.len() < 2 {
                    report.falsifications.push(format!("cutset ({i}, {}) leaves one cover component", a.k));
                }
                if l.certified && l.loops.len() < 64 && labels.len() as u128 > 1u128 << l.loops.len() {
                    report.falsifications.push(format!("cutset ({i}, {}) exceeds 2^|L| components", a.k));
                }
                certified.push(a);
            }
            report.cutsets.push(summary);
        }
    }
    if certified.is_empty() {
        report.warnings.push("no certified cutset in the inner region".into());
        return Ok(finish(report, artifacts));
    }

    let (graph, views): (&PointGraph, Vec<CutsetView>) = if alternative {
        report.wall_space = Some("base".into());
        (&base_graph, certified.iter().map(|a| CutsetView::from_base(a, &base_graph)).collect())
    } else {
        report.wall_space = Some("cover".into());
        (
            &cover_graph,
            certified.iter().map(|a| CutsetView::from_cover(a, &cover, &hp, &cover_graph)).collect(),
        )
    };
    let ws = enumerate_walls(graph, views, cfg.wall_cap);
    report.walls = ws.walls.len();
    report.transverse_pairs = ws.transverse.len();
    report.max_transverse = ws.max_transverse;
    if ws.capped {
        report.warnings.push(format!("wall partitions capped at {} components", cfg.wall_cap));
    }
    artifacts.insert("walls.json".into(), json(&ws));
    report.stage = Stage::Walls;
    if ws.walls.is_empty() {
        report.warnings.push("no walls".into());
        return Ok(finish(report, artifacts));
    }

    let dc = build_dual(&ws, cfg.max_dim, cfg.vertex_budget)?;
    report.complex_vertices = dc.len();
    report.complex_cubes = dc.cubes.clone();
    report.complex_dim = dc.dim;
    report.complex_truncated = dc.truncated;
    artifacts.insert("complex.json".into(), json(&dc));
    report.stage = Stage::Complex;
    if dc.truncated {
        report.warnings.push(format!("dual complex truncated at {} vertices", cfg.vertex_budget));
        return Ok(finish(report, artifacts));
    }

    let seed = cfg.seed.unwrap_or(0);
    let median = dc.is_median(seed)?;
    if !median.median {
        report.falsifications.push(format!("dual 1-skeleton is not median at {:?}", median.failure));
    }
    let dim_ok = dc.dim <= ws.max_transverse;
    if !dim_ok {
        report.falsifications.push(format!("complex dimension {} exceeds {}", dc.dim, ws.max_transverse));
    }
    let pairs: Vec<(usize, usize)> = (0..ws.points).flat_map(|x| (x + 1..ws.points).map(move |y| (x, y))).collect();
    let bad = dc.verify_distance(&ws, &pairs)?;
    if !bad.is_empty() {
        report.falsifications.push(format!("{} pairs with distance ≠ separation, e.g. {:?}", bad.len(), bad[0]));
    }
    let cutset_ids: Vec<usize> = (0..ws.cutsets.len()).collect();
    let growth = match growth_witness(graph, &ws, &cutset_ids, cfg.growth_n) {
        Ok(w) => {
            if w.separation < cfg.growth_n {
                report.falsifications.push(format!("growth witness separates by {} < {}", w.separation, cfg.growth_n));
            }
            Some(w)
        }
        Err(e) => {
            report.warnings.push(format!("growth witness: {e}"));
            None
        }
    };
    report.verification = Some(Verification {
        median: Some(median),
        dim_within_transverse_bound: dim_ok,
        distance_pairs: pairs.len(),
        distance_mismatches: bad.len(),
        growth,
    });
    report.stage = Stage::Verified;
    Ok(finish(report, artifacts))
}
