//! WebAssembly bindings for the demo page in `www/`.
//!
//! Everything works on `[-1, 1]` with the uniform probability measure. The
//! functions return plain vectors or JSON strings so they run natively too.

use momentcone::domain::{DomainSpec, MeasureSpec};
use momentcone::quadrature::{build_box_rule, default_box_points};
use momentcone::reconstruct::{concentration_curve, density_at, distance_to_point, DensityModel};
use momentcone::solver::fenchel_solve;
use momentcone::{BasisSpec, MomentSequence, ObjectiveContext, PolyCoeffs, SolveStatus, SolverConfig};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Fine enough to resolve the peaks drawn by [`concentration`].
const CONCENTRATION_POINTS: usize = 200;

fn interval_ctx(degree: u32, points: usize) -> Result<ObjectiveContext, String> {
    let rule = build_box_rule(&DomainSpec::unit_box(1), &MeasureSpec::uniform(), points)
        .map_err(|e| e.to_string())?;
    ObjectiveContext::new(BasisSpec::all_degrees(1, degree), rule).map_err(|e| e.to_string())
}

fn grid(samples: usize) -> Vec<f64> {
    let samples = samples.max(2);
    (0..samples)
        .map(|i| -1.0 + 2.0 * i as f64 / (samples - 1) as f64)
        .collect()
}

/// `f*(1, y1, y2)` on a `size x size` grid over `[y1_min, y1_max] x [y2_min,
/// y2_max]`, row-major with `y2` along rows. Points not certified interior
/// are `NaN`.
#[wasm_bindgen]
pub fn barrier_map(size: usize, y1_min: f64, y1_max: f64, y2_min: f64, y2_max: f64) -> Vec<f64> {
    let Ok(ctx) = interval_ctx(2, default_box_points(2)) else {
        return Vec::new();
    };
    let cfg = SolverConfig {
        max_iters: 100,
        ..SolverConfig::default()
    };
    let step = |lo: f64, hi: f64, i: usize| {
        if size < 2 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (size - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(size * size);
    for r in 0..size {
        let y2 = step(y2_min, y2_max, r);
        for c in 0..size {
            let y1 = step(y1_min, y1_max, c);
            let value = MomentSequence::new(*ctx.spec(), vec![1.0, y1, y2])
                .ok()
                .and_then(|y| fenchel_solve(&ctx, &y, &cfg).ok())
                .and_then(|rep| rep.fstar)
                .unwrap_or(f64::NAN);
            out.push(value);
        }
    }
    out
}

#[derive(Serialize)]
struct Reconstruction {
    status: SolveStatus,
    fstar: Option<f64>,
    p_star: Option<Vec<f64>>,
    iterations: usize,
    message: String,
    xs: Vec<f64>,
    /// Density with respect to Lebesgue measure; empty unless interior.
    density: Vec<f64>,
}

/// Maximum-entropy density on `[-1, 1]` matching `moments` (`y_0 .. y_2d`),
/// sampled at `samples` equally spaced points. Returns JSON.
#[wasm_bindgen]
pub fn reconstruct_density(moments: Vec<f64>, samples: usize) -> String {
    match reconstruct_inner(moments, samples) {
        Ok(r) => serde_json::to_string(&r).unwrap_or_default(),
        Err(e) => serde_json::json!({ "error": e }).to_string(),
    }
}

fn reconstruct_inner(moments: Vec<f64>, samples: usize) -> Result<Reconstruction, String> {
    if moments.len() < 3 || moments.len().is_multiple_of(2) {
        return Err("need y_0 .. y_2d for an even 2d >= 2".into());
    }
    let degree = (moments.len() - 1) as u32;
    let ctx = interval_ctx(degree, default_box_points(degree))?;
    let y = MomentSequence::new(*ctx.spec(), moments).map_err(|e| e.to_string())?;
    let rep = fenchel_solve(&ctx, &y, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let xs = grid(samples);
    let density = match &rep.p_star {
        Some(p) => {
            let model = DensityModel::new(p.clone(), ctx.rule()).map_err(|e| e.to_string())?;
            xs.iter()
                .map(|&x| density_at(&model, &[x]).map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?
        }
        None => Vec::new(),
    };
    Ok(Reconstruction {
        status: rep.status,
        fstar: rep.fstar,
        p_star: rep.p_star.map(|p| p.into_coeffs()),
        iterations: rep.iterations,
        message: rep.message,
        xs,
        density,
    })
}

#[derive(Serialize)]
struct Concentration {
    betas: Vec<f64>,
    /// `max_a |s_beta,a - center^a|` for each beta.
    distances: Vec<f64>,
    /// First moment of each tilted measure.
    means: Vec<f64>,
    xs: Vec<f64>,
    /// Lebesgue density of `e^(beta p) dmu / f(beta p)`, one row per beta.
    densities: Vec<Vec<f64>>,
}

/// Tilts the uniform measure by `beta * -(x - center)^2` for each beta.
/// Returns JSON.
#[wasm_bindgen]
pub fn concentration(center: f64, betas: Vec<f64>, samples: usize) -> String {
    match concentration_inner(center, betas, samples) {
        Ok(c) => serde_json::to_string(&c).unwrap_or_default(),
        Err(e) => serde_json::json!({ "error": e }).to_string(),
    }
}

fn concentration_inner(center: f64, betas: Vec<f64>, samples: usize) -> Result<Concentration, String> {
    if !(-1.0..=1.0).contains(&center) {
        return Err("center must lie in [-1, 1]".into());
    }
    let ctx = interval_ctx(2, CONCENTRATION_POINTS)?;
    let p = PolyCoeffs::new(*ctx.spec(), vec![-center * center, 2.0 * center, -1.0])
        .map_err(|e| e.to_string())?;
    let curve = concentration_curve(&ctx, &p, &betas).map_err(|e| e.to_string())?;
    let distances = curve
        .iter()
        .map(|s| distance_to_point(s, &[center]).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let xs = grid(samples);
    let mut densities = Vec::with_capacity(betas.len());
    for &b in &betas {
        let bp = p.scaled(b);
        let log_f = ctx.eval_logf(&bp).map_err(|e| e.to_string())?.log_f;
        // uniform probability on [-1, 1] has Lebesgue density 1/2
        densities.push(
            xs.iter()
                .map(|&x| 0.5 * (b * -(x - center) * (x - center) - log_f).exp())
                .collect(),
        );
    }
    Ok(Concentration {
        means: curve.iter().map(|s| s.values()[1]).collect(),
        betas,
        distances,
        xs,
        densities,
    })
}
