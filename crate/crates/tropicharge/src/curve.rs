//! Tropical curves cut out by families of tropical hypersurfaces on the
//! tropical region of a toric Fano variety.
//!
//! A nice family consists of `n - 1` tropical polynomials whose Newton
//! polytopes are ample divisor polytopes and whose mixed subdivision is
//! transverse.  The intersection curve is read off combinatorially: its
//! vertices are dual to the mixed cells of type `(1, ..., 2, ..., 1)` and
//! its edges to the codimension-one cells of type `(1, ..., 1)`.  The
//! curve is computed in the max-plus frame, where an unbounded edge dual
//! to a cell in the facet of the total Newton polytope with inner normal
//! `v_j` leaves along `-v_j` and lands on the matching facet of the
//! tropical region.

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::fano::FanData;
use crate::lattice::{facet_projection, LatticePolytope};
use crate::linalg::*;
use crate::tropical::{
    cayley_mixed_subdivision, check_transverse, MixedCell, MixedSubdivision,
    TropicalPolynomial,
};

/// A family of `n - 1` tropical hypersurfaces on a toric Fano fan with an
/// ample tropical region.
#[derive(Debug, Clone)]
pub struct NiceFamily {
    pub fan: FanData,
    /// Region coefficients: zero on the first `n` rays, ample overall.
    pub lambda: Vec<Q>,
    /// Divisor coefficient vectors, one per family member.
    pub divisors: Vec<Vec<Q>>,
    /// Tropical polynomials, Newton polytope of the k-th equal to the
    /// polytope of `divisors[k]`.
    pub polys: Vec<TropicalPolynomial>,
}

/// Validate a nice family.
///
/// # Errors
///
/// Propagates fan validation; `NotAmple` for non-ample members or region,
/// `ConfigInvalid` when the region coefficients are nonzero on basis rays,
/// `NewtonPolytopeMismatch` when a polynomial's support does not span its
/// divisor polytope, `NotTransverse` when the induced mixed subdivision is
/// degenerate.
pub fn check_nice_family(family: &NiceFamily) -> Result<MixedSubdivision> {
    let fan = &family.fan;
    fan.validate()?;
    let n = fan.dim;
    if family.polys.len() != n - 1 || family.divisors.len() != n - 1 {
        return Err(Error::ConfigInvalid(format!(
            "a nice family in dimension {n} consists of {} hypersurfaces",
            n - 1
        )));
    }
    if family.lambda.len() != fan.p() {
        return Err(Error::ConfigInvalid("lambda length".into()));
    }
    if family.lambda[..n].iter().any(|l| !l.is_zero()) {
        return Err(Error::ConfigInvalid(
            "region coefficients on the basis rays must vanish".into(),
        ));
    }
    fan.g_trop(&family.lambda)?;
    for (k, (a, phi)) in family.divisors.iter().zip(&family.polys).enumerate() {
        if !fan.is_ample(a)? {
            return Err(Error::NotAmple(format!("family member {k}")));
        }
        let g = fan.divisor_polytope(a)?;
        let newton = phi.newton_polytope()?;
        if newton.vertices != g.vertices {
            return Err(Error::NewtonPolytopeMismatch(format!(
                "member {k}: support hull differs from the divisor polytope"
            )));
        }
    }
    let ms = cayley_mixed_subdivision(&family.polys)?;
    check_transverse(&ms)?;
    Ok(ms)
}

/// A vertex of the tropical curve: dual to a mixed cell with exactly one
/// two-dimensional summand.
#[derive(Debug, Clone)]
pub struct CurveVertex {
    pub position: Vec<Q>,
    pub cell: MixedCell,
    /// Euclidean volume of the dual cell.
    pub volume: Q,
}

/// An edge of the tropical curve: dual to an all-ones codimension-one cell.
#[derive(Debug, Clone)]
pub struct CurveEdge {
    pub cell: MixedCell,
    /// Lattice-intrinsic volume of the dual cell.
    pub weight: Q,
    /// Primitive direction of the edge (for unbounded edges: pointing away
    /// from the vertex, equal to minus the dual facet's inner normal).
    pub direction: Vec<Z>,
    /// Vertex indices: bounded edges have two, unbounded edges one.
    pub ends: (usize, Option<usize>),
    /// For unbounded edges, the 1-based ray index of the facet the dual
    /// cell lies in.
    pub dual_facet: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct TropicalCurve {
    pub n: usize,
    pub vertices: Vec<CurveVertex>,
    pub edges: Vec<CurveEdge>,
}

/// Aggregate invariants of the curve: total vertex-cell volume and, per
/// ray, the summed weights of the unbounded edges on that facet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveInvariants {
    /// `V = sum_v vol(sigma_v)` (Euclidean volumes of the dual cells).
    pub v_total: Q,
    /// `E_j = sum of w(e)` over unbounded edges dual to facet `j`
    /// (1-based ray indexing shifted down by one).
    pub e_j: Vec<Q>,
}

fn is_vertex_type(t: &[usize], n: usize) -> bool {
    let sum: usize = t.iter().sum();
    sum == n && t.iter().filter(|&&d| d == 2).count() == 1 && t.iter().all(|&d| d == 1 || d == 2)
}

fn is_edge_type(t: &[usize]) -> bool {
    t.iter().all(|&d| d == 1)
}

/// Extract the tropical curve from a validated nice family.
pub fn build_curve(family: &NiceFamily) -> Result<TropicalCurve> {
    let ms = check_nice_family(family)?;
    let fan = &family.fan;
    let n = fan.dim;

    let mut vertices = Vec::new();
    let mut cell_to_vertex = vec![None::<usize>; ms.cells.len()];
    for (ci, c) in ms.cells.iter().enumerate() {
        if is_vertex_type(&c.cell_type, n) {
            cell_to_vertex[ci] = Some(vertices.len());
            vertices.push(CurveVertex {
                position: c.dual_point.clone(),
                cell: c.clone(),
                volume: c.total.euclidean_volume()?,
            });
        }
    }

    let mut edges = Vec::new();
    for r in &ms.ridges {
        if !is_edge_type(&r.cell.cell_type) {
            continue;
        }
        // Lattice-intrinsic volume: project along the cell's primitive
        // normal direction.
        let normal = edge_cell_normal(&r.cell.total)?;
        let psi = facet_projection(&normal)?;
        let weight = r.cell.total.intrinsic_volume(&psi)?;
        match r.cells.as_slice() {
            [a, b] => {
                let va = cell_to_vertex[*a].ok_or_else(|| {
                    Error::NotTransverse("curve edge adjacent to a non-vertex cell".into())
                })?;
                let vb = cell_to_vertex[*b].ok_or_else(|| {
                    Error::NotTransverse("curve edge adjacent to a non-vertex cell".into())
                })?;
                let delta = vec_sub(&vertices[vb].position, &vertices[va].position);
                if is_zero_vec(&delta) {
                    return Err(Error::NotTransverse(
                        "bounded curve edge of zero length (degenerate dual points)".into(),
                    ));
                }
                let dir = primitive_integer(&delta)?;
                // The edge is orthogonal to its dual cell.
                debug_assert!(r
                    .cell
                    .total
                    .vertices
                    .windows(2)
                    .all(|w| dot_zq(&dir, &vec_sub(&w[1], &w[0])).is_zero()));
                edges.push(CurveEdge {
                    cell: r.cell.clone(),
                    weight,
                    direction: dir,
                    ends: (va, Some(vb)),
                    dual_facet: None,
                });
            }
            [a] => {
                let va = cell_to_vertex[*a].ok_or_else(|| {
                    Error::NotTransverse("curve end adjacent to a non-vertex cell".into())
                })?;
                let bf = r
                    .ray_direction
                    .as_ref()
                    .zip(r.base_facet_normal.as_ref())
                    .expect("boundary ridge carries ray data");
                let (dir, facet_normal) = bf;
                let j = fan
                    .rays
                    .iter()
                    .position(|v| v == facet_normal)
                    .ok_or_else(|| {
                        Error::WrongFacet(format!(
                            "boundary facet normal {facet_normal:?} is not a ray of the fan"
                        ))
                    })?
                    + 1;
                edges.push(CurveEdge {
                    cell: r.cell.clone(),
                    weight,
                    direction: dir.clone(),
                    ends: (va, None),
                    dual_facet: Some(j),
                });
            }
            _ => unreachable!("ridge adjacency validated during subdivision"),
        }
    }
    Ok(TropicalCurve {
        n,
        vertices,
        edges,
    })
}

/// Primitive normal of a codimension-one cell.
fn edge_cell_normal(total: &LatticePolytope) -> Result<Vec<Z>> {
    let n = total.ambient_dim;
    if total.intrinsic_dim + 1 != n {
        return Err(Error::NotFullDimensional {
            intrinsic: total.intrinsic_dim,
            ambient: n,
        });
    }
    let p0 = &total.vertices[0];
    let dirs: Vec<Vec<Q>> = total.vertices[1..].iter().map(|v| vec_sub(v, p0)).collect();
    let kern = kernel_basis(&dirs);
    debug_assert_eq!(kern.len(), 1);
    primitive_integer(&kern[0])
}

/// Check the balancing condition at every vertex: the weighted primitive
/// directions pointing away from the vertex sum to zero.
///
/// # Errors
///
/// `Unbalanced` with the offending vertex and the defect vector.
pub fn check_balanced(curve: &TropicalCurve) -> Result<()> {
    for vi in 0..curve.vertices.len() {
        let mut defect = vec![Q::zero(); curve.n];
        for e in &curve.edges {
            let away: Option<Vec<Q>> = match e.ends {
                (a, Some(b)) => {
                    if a == vi {
                        Some(to_q_vec(&e.direction))
                    } else if b == vi {
                        Some(vec_neg(&to_q_vec(&e.direction)))
                    } else {
                        None
                    }
                }
                (a, None) => {
                    if a == vi {
                        Some(to_q_vec(&e.direction))
                    } else {
                        None
                    }
                }
            };
            if let Some(dir) = away {
                for (d, x) in defect.iter_mut().zip(&dir) {
                    *d += &e.weight * x;
                }
            }
        }
        if !is_zero_vec(&defect) {
            return Err(Error::Unbalanced {
                vertex: vi,
                defect: format!("{defect:?}"),
            });
        }
    }
    Ok(())
}

/// Compute the aggregate invariants of a curve over a fan with `p` rays.
pub fn curve_invariants(curve: &TropicalCurve, fan: &FanData) -> CurveInvariants {
    let v_total = curve.vertices.iter().map(|v| v.volume.clone()).sum();
    let mut e_j = vec![Q::zero(); fan.p()];
    for e in &curve.edges {
        if let Some(j) = e.dual_facet {
            e_j[j - 1] += &e.weight;
        }
    }
    CurveInvariants { v_total, e_j }
}

/// A curve placed inside the tropical region: vertex positions after
/// scaling and translation, with each unbounded edge traced to its exit
/// point on the matching facet.
#[derive(Debug, Clone)]
pub struct PlacedCurve {
    pub g_trop: LatticePolytope,
    /// Transformed vertex positions.
    pub positions: Vec<Vec<Q>>,
    /// For every edge index with `dual_facet = Some(j)`: the point where
    /// the edge meets the facet `{lambda_j + <v_j, x> = 0}`.
    pub exits: Vec<(usize, Vec<Q>)>,
}

/// Scale the curve by `shrink` about its vertex centroid, translate the
/// centroid to the region's vertex centroid, and trace every unbounded
/// edge to the boundary.
///
/// # Errors
///
/// `DoesNotFit` when a vertex is not strictly interior (choose a smaller
/// shrink), `WrongFacet` when an unbounded edge reaches a different facet
/// than its dual cell prescribes.
pub fn clip_to_g_trop(curve: &TropicalCurve, family: &NiceFamily, shrink: &Q) -> Result<PlacedCurve> {
    let fan = &family.fan;
    let g = fan.g_trop(&family.lambda)?;
    if curve.vertices.is_empty() {
        return Err(Error::ConfigInvalid("curve without vertices".into()));
    }
    let centroid = |pts: &[Vec<Q>]| -> Vec<Q> {
        let n = pts[0].len();
        let mut c = vec![Q::zero(); n];
        for p in pts {
            for (ci, x) in c.iter_mut().zip(p) {
                *ci += x;
            }
        }
        let k = qi(pts.len() as i64);
        c.into_iter().map(|x| x / &k).collect()
    };
    let curve_pos: Vec<Vec<Q>> = curve.vertices.iter().map(|v| v.position.clone()).collect();
    let c_curve = centroid(&curve_pos);
    let c_g = centroid(&g.vertices);
    let place = |x: &[Q]| -> Vec<Q> {
        vec_add(&vec_scale(&vec_sub(x, &c_curve), shrink), &c_g)
    };
    let positions: Vec<Vec<Q>> = curve_pos.iter().map(|x| place(x)).collect();
    let chi = |j: usize, x: &[Q]| -> Q { &family.lambda[j - 1] + dot_zq(&fan.rays[j - 1], x) };
    for (vi, pos) in positions.iter().enumerate() {
        for j in 1..=fan.p() {
            if !chi(j, pos).is_positive() {
                return Err(Error::DoesNotFit(format!(
                    "vertex {vi} is not strictly inside the region"
                )));
            }
        }
    }
    let mut exits = Vec::new();
    for (ei, e) in curve.edges.iter().enumerate() {
        let j = match e.dual_facet {
            Some(j) => j,
            None => continue,
        };
        let x0 = &positions[e.ends.0];
        // The edge leaves along -v_j; it meets the facet at the step where
        // the supporting coordinate chi_j vanishes.
        let vj = &fan.rays[j - 1];
        debug_assert_eq!(e.direction, vj.iter().map(|x| -x).collect::<Vec<Z>>());
        let norm2 = dot_zz(vj, vj);
        let t = chi(j, x0) / Q::from_integer(norm2);
        if !t.is_positive() {
            return Err(Error::DoesNotFit(format!("edge {ei} cannot reach its facet")));
        }
        let exit: Vec<Q> = x0
            .iter()
            .zip(vj)
            .map(|(x, v)| x - Q::from_integer(v.clone()) * &t)
            .collect();
        for k in 1..=fan.p() {
            let c = chi(k, &exit);
            if k == j {
                debug_assert!(c.is_zero());
            } else if !c.is_positive() {
                return Err(Error::WrongFacet(format!(
                    "edge {ei} meets facet {k} before its dual facet {j}"
                )));
            }
        }
        exits.push((ei, exit));
    }
    Ok(PlacedCurve {
        g_trop: g,
        positions,
        exits,
    })
}

/// Bundled example families used by tests and the sample configurations.
pub mod examples {
    use super::*;
    use crate::fano::examples::*;

    /// Line on the projective plane with the anticanonical region.
    pub fn p2_line() -> NiceFamily {
        NiceFamily {
            fan: k_p2(),
            lambda: qvec(&[0, 0, 1]),
            divisors: vec![qvec(&[0, 0, 1])],
            polys: vec![TropicalPolynomial::new(
                2,
                vec![
                    (zvec(&[0, 0]), qi(0)),
                    (zvec(&[1, 0]), qi(0)),
                    (zvec(&[0, 1]), qi(0)),
                ],
            )
            .unwrap()],
        }
    }

    /// Two generic hyperplanes on projective 3-space.
    pub fn p3_hyperplanes() -> NiceFamily {
        NiceFamily {
            fan: k_p3(),
            lambda: qvec(&[0, 0, 0, 1]),
            divisors: vec![qvec(&[0, 0, 0, 1]), qvec(&[0, 0, 0, 1])],
            polys: vec![
                TropicalPolynomial::new(
                    3,
                    vec![
                        (zvec(&[0, 0, 0]), qi(0)),
                        (zvec(&[1, 0, 0]), qi(0)),
                        (zvec(&[0, 1, 0]), qi(0)),
                        (zvec(&[0, 0, 1]), qi(0)),
                    ],
                )
                .unwrap(),
                TropicalPolynomial::new(
                    3,
                    vec![
                        (zvec(&[0, 0, 0]), qi(-1)),
                        (zvec(&[1, 0, 0]), qi(1)),
                        (zvec(&[0, 1, 0]), qi(0)),
                        (zvec(&[0, 0, 1]), qi(-2)),
                    ],
                )
                .unwrap(),
            ],
        }
    }

    /// A (1,1)-divisor on the product of two projective lines.
    pub fn p1p1_bidegree() -> NiceFamily {
        NiceFamily {
            fan: k_p1p1(),
            lambda: qvec(&[0, 0, 1, 1]),
            divisors: vec![qvec(&[0, 0, 1, 1])],
            polys: vec![TropicalPolynomial::new(
                2,
                vec![
                    (zvec(&[0, 0]), qi(0)),
                    (zvec(&[1, 0]), qi(0)),
                    (zvec(&[0, 1]), qi(0)),
                    (zvec(&[1, 1]), qi(-1)),
                ],
            )
            .unwrap()],
        }
    }
}
