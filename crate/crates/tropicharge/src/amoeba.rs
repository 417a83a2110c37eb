//! Floating-point amoeba sampling for two-dimensional fans and
//! convergence checks against the (reflected) tropical skeleton.
//!
//! The only non-exact module in the crate.  The superpotential
//! `W = 1 + sum_j t^{lambda_j} z^{v_j}` is sampled on a log-modulus grid
//! with a phase family; the rescaled `Log_t` image of its zero locus is
//! compared against the reflection of the tropical hypersurface of
//! `max(0, max_j(<v_j, x> - lambda_j))`, to which it converges as
//! `t -> 0`.

use num::complex::Complex64;
use num::ToPrimitive;

use crate::error::{Error, Result};
use crate::fano::FanData;
use crate::linalg::Q;
use crate::tropical::{hypersurface_skeleton, TropicalPolynomial, TropicalSkeleton};

/// Tolerances and grid sizes, centralized.
#[derive(Debug, Clone)]
pub struct AmoebaConfig {
    /// Number of log-modulus grid columns.
    pub resolution: usize,
    /// Number of phases sampled per column.
    pub phases: usize,
    /// Relative residual bound for accepting a numerical root.
    pub residual_tol: f64,
    /// Extra margin around the skeleton's vertex box for the grid range.
    pub padding: f64,
}

impl Default for AmoebaConfig {
    fn default() -> Self {
        Self {
            resolution: 64,
            phases: 32,
            residual_tol: 1e-8,
            padding: 2.0,
        }
    }
}

/// Rescaled amoeba sample at a fixed parameter `t`.
#[derive(Debug, Clone)]
pub struct AmoebaSample {
    pub t: f64,
    /// Rescaled `Log_t` images `(log|z1|, log|z2|) / log t`, sorted.
    pub points: Vec<[f64; 2]>,
    pub resolution: usize,
}

/// Skeleton in floating point: bounded segments and rays.
#[derive(Debug, Clone)]
pub struct SkeletonF64 {
    pub segments: Vec<([f64; 2], [f64; 2])>,
    pub rays: Vec<([f64; 2], [f64; 2])>,
}

/// One row of the convergence table.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub t: f64,
    /// One-sided distance from the sample to the reflected skeleton.
    pub distance: f64,
    /// Same distance against the unreflected skeleton (frame check).
    pub unreflected_distance: f64,
    /// Skeleton-sampled reverse estimate (evidence for the other
    /// Hausdorff side).
    pub reverse_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    pub monotone: bool,
    /// True when no sample point of the final row enters the interior of
    /// the tropical region by more than the final distance margin.
    pub compact_component_ok: bool,
}

fn q_to_f64(q: &Q) -> f64 {
    q.numer().to_f64().unwrap() / q.denom().to_f64().unwrap()
}

/// The max-plus tropicalization of the superpotential
/// `1 + sum_j t^{lambda_j} z^{v_j}`: under the rescaled logarithm the
/// coefficient `t^{lambda_j}` has valuation `lambda_j` in the min-plus
/// convention, hence `-lambda_j` here, giving
/// `max(0, max_j(<v_j, x> - lambda_j))`.
pub fn superpotential_tropical(fan: &FanData, lambda: &[Q]) -> Result<TropicalPolynomial> {
    let n = fan.dim;
    let mut terms = vec![(vec![num::BigInt::from(0); n], Q::from_integer(0.into()))];
    for (j, v) in fan.rays.iter().enumerate() {
        terms.push((v.clone(), -lambda[j].clone()));
    }
    TropicalPolynomial::new(n, terms)
}

/// Skeleton converted to floating point for distance queries.
pub fn skeleton_f64(skel: &TropicalSkeleton) -> SkeletonF64 {
    let verts: Vec<[f64; 2]> = skel
        .vertices
        .iter()
        .map(|v| [q_to_f64(&v[0]), q_to_f64(&v[1])])
        .collect();
    let segments = skel
        .edges
        .iter()
        .map(|&(a, b)| (verts[a], verts[b]))
        .collect();
    let rays = skel
        .rays
        .iter()
        .map(|(a, d)| {
            (
                verts[*a],
                [d[0].to_f64().unwrap(), d[1].to_f64().unwrap()],
            )
        })
        .collect();
    SkeletonF64 { segments, rays }
}

fn dist_point_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    let q = [a[0] + s * d[0], a[1] + s * d[1]];
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

fn dist_point_ray(p: [f64; 2], a: [f64; 2], d: [f64; 2]) -> f64 {
    let len2 = d[0] * d[0] + d[1] * d[1];
    let s = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).max(0.0);
    let q = [a[0] + s * d[0], a[1] + s * d[1]];
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

fn dist_to_skeleton_point(p: [f64; 2], skel: &SkeletonF64) -> f64 {
    let mut best = f64::INFINITY;
    for &(a, b) in &skel.segments {
        best = best.min(dist_point_segment(p, a, b));
    }
    for &(a, d) in &skel.rays {
        best = best.min(dist_point_ray(p, a, d));
    }
    best
}

/// One-sided distance: the maximum over sample points of the distance to
/// the skeleton.
pub fn distance_to_skeleton(sample: &AmoebaSample, skel: &SkeletonF64) -> f64 {
    sample
        .points
        .iter()
        .map(|&p| dist_to_skeleton_point(p, skel))
        .fold(0.0, f64::max)
}

/// Reverse estimate: sample points along the skeleton (rays truncated at
/// `reach`) and take the maximum distance to the nearest amoeba point.
pub fn reverse_distance_estimate(sample: &AmoebaSample, skel: &SkeletonF64, reach: f64) -> f64 {
    let mut skeleton_points = Vec::new();
    let steps = 24;
    for &(a, b) in &skel.segments {
        for i in 0..=steps {
            let s = i as f64 / steps as f64;
            skeleton_points.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
        }
    }
    for &(a, d) in &skel.rays {
        let norm = (d[0] * d[0] + d[1] * d[1]).sqrt();
        for i in 0..=steps {
            let s = reach * i as f64 / steps as f64 / norm;
            skeleton_points.push([a[0] + s * d[0], a[1] + s * d[1]]);
        }
    }
    skeleton_points
        .iter()
        .map(|&q| {
            sample
                .points
                .iter()
                .map(|&p| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Monic-normalized polynomial roots by Durand-Kerner iteration with one
/// Newton polishing step per root.  Coefficients ascending; leading and
/// trailing zero coefficients must already be stripped.
fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |zs: &[Complex64], x: Complex64| -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        for c in zs.iter().rev() {
            v = v * x + c;
        }
        v
    };
    // Deterministic non-real starting points on a spiral.
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..200 {
        let mut delta: f64 = 0.0;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                continue;
            }
            let step = eval(&monic, roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    // Newton polish on the original coefficients.
    let deriv: Vec<Complex64> = (1..=deg)
        .map(|k| coeffs[k] * Complex64::new(k as f64, 0.0))
        .collect();
    for root in roots.iter_mut() {
        let d = eval(&deriv, *root);
        if d.norm() > 0.0 {
            *root -= eval(coeffs, *root) / d;
        }
    }
    roots
}

/// Sample the rescaled amoeba of `W = 1 + sum_j t^{lambda_j} z^{v_j}`.
///
/// For each grid modulus of one variable and each phase, the
/// superpotential restricts to a Laurent polynomial in the other
/// variable; its roots contribute rescaled log-modulus points.  Both
/// variable roles are sampled to catch vertical tangencies.  Every stored
/// point passes a relative residual test; non-converged roots are
/// discarded.
///
/// # Errors
///
/// `DimensionUnsupported` unless `n = 2`; `ConfigInvalid` for `t`
/// outside `(0, 1)`.
pub fn sample_amoeba(
    fan: &FanData,
    lambda: &[Q],
    t: f64,
    cfg: &AmoebaConfig,
) -> Result<AmoebaSample> {
    if fan.dim != 2 {
        return Err(Error::DimensionUnsupported(fan.dim));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::ConfigInvalid(format!(
            "amoeba rescaling needs 0 < t < 1, got {t}"
        )));
    }
    let skel = skeleton_f64(&hypersurface_skeleton(&superpotential_tropical(fan, lambda)?)?);
    // Grid range: bounding box of the skeleton vertices (both frames)
    // plus padding.
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for &(a, b) in &skel.segments {
        for p in [a, b] {
            for i in 0..2 {
                lo[i] = lo[i].min(p[i].min(-p[i]));
                hi[i] = hi[i].max(p[i].max(-p[i]));
            }
        }
    }
    for &(a, _) in &skel.rays {
        for i in 0..2 {
            lo[i] = lo[i].min(a[i].min(-a[i]));
            hi[i] = hi[i].max(a[i].max(-a[i]));
        }
    }
    let lo = [lo[0] - cfg.padding, lo[1] - cfg.padding];
    let hi = [hi[0] + cfg.padding, hi[1] + cfg.padding];

    let log_t = t.ln();
    // Monomials: constant 1 plus the ray terms with coefficients
    // t^{lambda_j}.
    let mut monomials: Vec<([i64; 2], f64)> = vec![([0, 0], 1.0)];
    for (j, v) in fan.rays.iter().enumerate() {
        monomials.push((
            [v[0].to_f64().unwrap() as i64, v[1].to_f64().unwrap() as i64],
            t.powf(q_to_f64(&lambda[j])),
        ));
    }

    let mut points: Vec<[f64; 2]> = Vec::new();
    for swap in [false, true] {
        let (fixed_axis, free_axis) = if swap { (1, 0) } else { (0, 1) };
        let (lo_f, hi_f) = (lo[fixed_axis], hi[fixed_axis]);
        for gi in 0..cfg.resolution {
            let x_fixed = lo_f + (hi_f - lo_f) * gi as f64 / (cfg.resolution - 1) as f64;
            let modulus = (x_fixed * log_t).exp();
            for ph in 0..cfg.phases {
                let theta = 2.0 * std::f64::consts::PI * ph as f64 / cfg.phases as f64;
                let z_fixed = Complex64::from_polar(modulus, theta);
                // Build the Laurent polynomial in the free variable.
                let min_exp = monomials
                    .iter()
                    .map(|(e, _)| e[free_axis])
                    .min()
                    .unwrap();
                let max_exp = monomials
                    .iter()
                    .map(|(e, _)| e[free_axis])
                    .max()
                    .unwrap();
                let deg = (max_exp - min_exp) as usize;
                let mut coeffs = vec![Complex64::new(0.0, 0.0); deg + 1];
                for (e, c) in &monomials {
                    let idx = (e[free_axis] - min_exp) as usize;
                    coeffs[idx] += Complex64::new(*c, 0.0) * z_fixed.powi(e[fixed_axis] as i32);
                }
                while coeffs.len() > 1 && coeffs.last().unwrap().norm() == 0.0 {
                    coeffs.pop();
                }
                if coeffs.len() < 2 {
                    continue;
                }
                for root in polynomial_roots(&coeffs) {
                    if root.norm() == 0.0 {
                        continue;
                    }
                    // Residual of the full superpotential, relative to the
                    // term scale.
                    let (z1, z2) = if swap {
                        (root, z_fixed)
                    } else {
                        (z_fixed, root)
                    };
                    let mut value = Complex64::new(0.0, 0.0);
                    let mut scale = 0.0;
                    for (e, c) in &monomials {
                        let term =
                            Complex64::new(*c, 0.0) * z1.powi(e[0] as i32) * z2.powi(e[1] as i32);
                        value += term;
                        scale += term.norm();
                    }
                    if value.norm() >= cfg.residual_tol * scale {
                        continue;
                    }
                    points.push([z1.norm().ln() / log_t, z2.norm().ln() / log_t]);
                }
            }
        }
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    points.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
    Ok(AmoebaSample {
        t,
        points,
        resolution: cfg.resolution,
    })
}

/// Run the convergence experiment over a decreasing `t` sequence.
pub fn convergence_report(
    fan: &FanData,
    lambda: &[Q],
    t_sequence: &[f64],
    cfg: &AmoebaConfig,
) -> Result<ConvergenceReport> {
    let phi = superpotential_tropical(fan, lambda)?;
    let skel = hypersurface_skeleton(&phi)?;
    let reflected = skeleton_f64(&skel.reflect());
    let unreflected = skeleton_f64(&skel);
    let mut rows = Vec::new();
    let mut last_sample: Option<AmoebaSample> = None;
    for &t in t_sequence {
        let sample = sample_amoeba(fan, lambda, t, cfg)?;
        let distance = distance_to_skeleton(&sample, &reflected);
        let unreflected_distance = distance_to_skeleton(&sample, &unreflected);
        let reverse_estimate = reverse_distance_estimate(&sample, &reflected, cfg.padding * 2.0);
        rows.push(ConvergenceRow {
            t,
            distance,
            unreflected_distance,
            reverse_estimate,
        });
        last_sample = Some(sample);
    }
    let monotone = rows.windows(2).all(|w| w[1].distance <= w[0].distance);
    // Compact complement component: the final amoeba stays out of the
    // interior of the tropical region by the final distance margin.
    let compact_component_ok = match (&last_sample, rows.last()) {
        (Some(sample), Some(row)) => {
            let g = fan.g_trop(lambda)?;
            let margin = row.distance;
            sample.points.iter().all(|p| {
                !g.facets.iter().all(|f| {
                    let nv: Vec<f64> = f.normal.iter().map(|x| x.to_f64().unwrap()).collect();
                    let norm = (nv[0] * nv[0] + nv[1] * nv[1]).sqrt();
                    let slack = nv[0] * p[0] + nv[1] * p[1] + q_to_f64(&f.offset);
                    slack > margin * norm
                })
            })
        }
        _ => true,
    };
    Ok(ConvergenceReport {
        rows,
        monotone,
        compact_component_ok,
    })
}
