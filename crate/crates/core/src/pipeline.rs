//! End-to-end arrangement of planar segments or spatial polygons.

use std::time::Instant;

use log::{info, warn};

use crate::congruence::{prune_open_faces, quotient_complex};
use crate::error::{Error, Result};
use crate::fragment::{fragment_all, FaceSoup};
use crate::geom::bbox_diagonal;
use crate::lar::{euler_characteristic, ChainComplexResult, GeometricComplex};
use crate::planar::{arrangement2d_with, vertex_supports, Segment, SegmentSet};
use crate::shells::wrap_top_cells;
use crate::tgw::SeedPolicy;

/// Snap tolerance relative to the input's bounding-box diagonal.
pub const DEFAULT_RELATIVE_EPS: f64 = 1e-8;

/// Snap tolerance, either absolute or a fraction of the bounding-box diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Relative(f64),
    Absolute(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrangeOptions {
    pub tolerance: Tolerance,
    pub policy: SeedPolicy,
}

impl Default for ArrangeOptions {
    fn default() -> Self {
        Self {
            tolerance: Tolerance::Relative(DEFAULT_RELATIVE_EPS),
            policy: SeedPolicy::LowestIndex,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageTime {
    pub stage: &'static str,
    pub seconds: f64,
}

/// Diagnostics of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub eps: f64,
    pub stages: Vec<StageTime>,
    /// Cell counts per dimension, bounded top cells only.
    pub counts: Vec<usize>,
    pub euler_bounded: i64,
    pub euler_with_outer: i64,
    pub chain_complex: bool,
    pub eq1: bool,
}

impl Report {
    fn new(eps: f64, stages: Vec<StageTime>, result: &ChainComplexResult) -> Result<Self> {
        Ok(Self {
            eps,
            stages,
            counts: result.cell_counts(),
            euler_bounded: euler_characteristic(result, false),
            euler_with_outer: euler_characteristic(result, true),
            chain_complex: result.is_chain_complex()?,
            eq1: result.satisfies_eq1()?,
        })
    }

    pub fn total_seconds(&self) -> f64 {
        self.stages.iter().map(|s| s.seconds).sum()
    }
}

struct Stopwatch {
    last: Instant,
    stages: Vec<StageTime>,
}

impl Stopwatch {
    fn new() -> Self {
        Self {
            last: Instant::now(),
            stages: Vec::new(),
        }
    }

    fn lap(&mut self, stage: &'static str) {
        let now = Instant::now();
        let seconds = (now - self.last).as_secs_f64();
        info!("stage {stage}: {seconds:.4}s");
        self.stages.push(StageTime { stage, seconds });
        self.last = now;
    }
}

fn resolve_eps(opts: &ArrangeOptions, diagonal: f64) -> Result<f64> {
    let eps = match opts.tolerance {
        Tolerance::Absolute(e) => e,
        Tolerance::Relative(r) => r * if diagonal > 0.0 { diagonal } else { 1.0 },
    };
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Validation(format!(
            "tolerance must be positive and finite, got {eps}"
        )));
    }
    Ok(eps)
}

/// Arrangement of raw 2D segments.
pub fn arrange_segments(
    raw: Vec<Segment>,
    opts: &ArrangeOptions,
) -> Result<(ChainComplexResult, Report)> {
    let mut clock = Stopwatch::new();
    let set = SegmentSet::new(raw)?;
    if set.dropped() > 0 {
        warn!(
            "dropped {} zero-length or duplicate segments",
            set.dropped()
        );
    }
    let eps = resolve_eps(opts, set.bbox_diagonal())?;
    clock.lap("input");
    let result = arrangement2d_with(&set, eps, opts.policy)?;
    clock.lap("arrangement");
    let report = Report::new(eps, Vec::new(), &result)?;
    clock.lap("check");
    Ok((
        result,
        Report {
            stages: clock.stages,
            ..report
        },
    ))
}

/// Arrangement of the polygons of a 3D complex (its `FV` with `EV`).
pub fn arrange_faces(
    input: &GeometricComplex,
    opts: &ArrangeOptions,
) -> Result<(ChainComplexResult, Report)> {
    let mut clock = Stopwatch::new();
    let soup = FaceSoup::from_complex(input)?;
    if soup.face_count() == 0 {
        return Err(Error::EmptyArrangement);
    }
    let eps = resolve_eps(opts, bbox_diagonal(input.verts()))?;
    clock.lap("input");
    let index = soup.index();
    clock.lap("indexing");
    let fragments = fragment_all(&soup, &index, eps)?;
    clock.lap("decomposition");
    let (glued, _) = quotient_complex(&fragments, eps)?;
    let glued = prune_open_faces(&glued)?;
    if glued.faces.cols() == 0 {
        return Err(Error::EmptyArrangement);
    }
    clock.lap("congruence");
    let skeleton = GeometricComplex::new(
        3,
        glued.verts.clone(),
        glued.ev.clone(),
        Vec::new(),
        Vec::new(),
    )?;
    let top = wrap_top_cells(&skeleton, &glued.faces, opts.policy)?;
    if top.boundary.cols() == 0 {
        return Err(Error::EmptyArrangement);
    }
    clock.lap("wrapping");
    let fv = vertex_supports(&glued.faces, &glued.ev);
    let cv: Vec<Vec<usize>> = (0..top.boundary.cols())
        .map(|c| {
            let mut vs: Vec<usize> = top
                .boundary
                .column_rows(c)
                .iter()
                .flat_map(|&f| fv[f].iter().copied())
                .collect();
            vs.sort_unstable();
            vs.dedup();
            vs
        })
        .collect();
    let complex = GeometricComplex::from_parts(3, glued.verts, glued.ev, fv, cv);
    let d1 = complex.signed_boundary_1()?;
    let result = ChainComplexResult {
        complex,
        boundaries: vec![d1, glued.faces, top.boundary],
        outer: top.outer,
    };
    let report = Report::new(eps, Vec::new(), &result)?;
    clock.lap("check");
    Ok((
        result,
        Report {
            stages: clock.stages,
            ..report
        },
    ))
}

/// Dispatches on the ambient dimension; 2D inputs contribute their edges.
pub fn arrange(
    input: &GeometricComplex,
    opts: &ArrangeOptions,
) -> Result<(ChainComplexResult, Report)> {
    match input.dim() {
        2 => {
            let v = input.verts();
            let raw = input
                .ev()
                .iter()
                .map(|&[a, b]| [[v[a][0], v[a][1]], [v[b][0], v[b][1]]])
                .collect();
            arrange_segments(raw, opts)
        }
        _ => arrange_faces(input, opts),
    }
}
