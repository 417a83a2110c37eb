//! Tropical polynomials in the max-plus convention, their regular
//! subdivisions and the mixed subdivisions of products.
//!
//! A term `(v, a_v)` contributes `a_v + <v, x>`; the polynomial evaluates
//! to the maximum over its terms.  The induced regular subdivision of the
//! Newton polytope is the projection of the lower hull of the lifted
//! points `(v, -a_v)`, and the vertices of the tropical hypersurface are
//! the gradients of the lower supporting hyperplanes.  Products of
//! polynomials are subdivided in the base space directly: the Minkowski
//! decomposition of every cell is recovered from its supporting
//! functional, which is the Cayley-trick bookkeeping without leaving the
//! base dimension.

use num::{One, Signed};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{Facet, LatticePolytope};
use crate::linalg::*;

/// A tropical (max-plus) Laurent polynomial with rational coefficients and
/// integer exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalPolynomial {
    pub nvars: usize,
    /// Exponent vector -> coefficient.  Deterministically ordered.
    pub terms: BTreeMap<Vec<Z>, Q>,
}

impl TropicalPolynomial {
    /// Build from a term list; duplicate exponents keep the larger
    /// coefficient (tropical addition).
    pub fn new(nvars: usize, terms: impl IntoIterator<Item = (Vec<Z>, Q)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<Z>, Q> = BTreeMap::new();
        for (v, a) in terms {
            if v.len() != nvars {
                return Err(Error::DimensionMismatch(
                    "tropical term exponent length".into(),
                ));
            }
            map.entry(v)
                .and_modify(|old| {
                    if a > *old {
                        *old = a.clone();
                    }
                })
                .or_insert(a);
        }
        if map.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        Ok(TropicalPolynomial { nvars, terms: map })
    }

    /// Max-plus evaluation.
    pub fn eval(&self, x: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|(v, a)| a + dot_zq(v, x))
            .max()
            .expect("tropical polynomial has at least one term")
    }

    /// Terms attaining the maximum at `x`.
    pub fn argmax(&self, x: &[Q]) -> Vec<Vec<Z>> {
        let m = self.eval(x);
        self.terms
            .iter()
            .filter(|(v, a)| *a + dot_zq(v, x) == m)
            .map(|(v, _)| v.clone())
            .collect()
    }

    /// Newton polytope (hull of the exponents).
    pub fn newton_polytope(&self) -> Result<LatticePolytope> {
        let pts: Vec<Vec<Q>> = self.terms.keys().map(|v| to_q_vec(v)).collect();
        LatticePolytope::convex_hull(&pts)
    }

    /// Tropical product: exponents add, coefficients add, ties resolved by
    /// the maximum over decompositions.
    pub fn product(factors: &[TropicalPolynomial]) -> Result<TropicalPolynomial> {
        let mut it = factors.iter();
        let first = it.next().ok_or(Error::EmptyPointSet)?.clone();
        let mut acc = first;
        for f in it {
            if f.nvars != acc.nvars {
                return Err(Error::DimensionMismatch("tropical product nvars".into()));
            }
            let mut map: BTreeMap<Vec<Z>, Q> = BTreeMap::new();
            for (v, a) in &acc.terms {
                for (w, b) in &f.terms {
                    let u: Vec<Z> = v.iter().zip(w).map(|(x, y)| x + y).collect();
                    let c = a + b;
                    map.entry(u)
                        .and_modify(|old| {
                            if c > *old {
                                *old = c.clone();
                            }
                        })
                        .or_insert(c);
                }
            }
            acc = TropicalPolynomial {
                nvars: acc.nvars,
                terms: map,
            };
        }
        Ok(acc)
    }

    /// The reflected polynomial with `V(reflect(f)) = -V(f)`: exponents are
    /// negated, coefficients kept.
    pub fn reflect(&self) -> TropicalPolynomial {
        TropicalPolynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(v, a)| (v.iter().map(|x| -x).collect(), a.clone()))
                .collect(),
        }
    }
}

/// A maximal cell of a regular subdivision.
#[derive(Debug, Clone)]
pub struct SubdivisionCell {
    /// Hull of the supporting exponents.
    pub polytope: LatticePolytope,
    /// Exponents on the corresponding lower face, sorted.
    pub support: Vec<Vec<Z>>,
    /// Dual point: the maximum of the polynomial at `dual_point` is
    /// attained exactly by `support`, with value `dual_value`.
    pub dual_point: Vec<Q>,
    pub dual_value: Q,
}

/// A codimension-one face of a regular subdivision.
#[derive(Debug, Clone)]
pub struct SubdivisionRidge {
    pub polytope: LatticePolytope,
    pub support: Vec<Vec<Z>>,
    /// Indices of the adjacent maximal cells: two for interior ridges, one
    /// for ridges on the boundary of the Newton polytope.
    pub cells: Vec<usize>,
    /// A point in the relative interior of the dual (edge or ray) cell.
    pub dual_point: Vec<Q>,
    /// For boundary ridges: the primitive direction of the dual ray.
    pub ray_direction: Option<Vec<Z>>,
    /// For boundary ridges: the inner normal of the Newton-polytope facet
    /// containing the ridge.
    pub base_facet_normal: Option<Vec<Z>>,
}

/// The regular subdivision of a Newton polytope induced by the
/// coefficients of a tropical polynomial.
#[derive(Debug, Clone)]
pub struct RegularSubdivision {
    pub base: LatticePolytope,
    pub cells: Vec<SubdivisionCell>,
    pub ridges: Vec<SubdivisionRidge>,
}

/// Compute the regular subdivision induced by `phi` (projection of the
/// lower hull of the lifted exponents `(v, -a_v)`).
///
/// # Errors
///
/// Requires the Newton polytope to be full-dimensional; lifts live in one
/// dimension higher, so `nvars` is capped at [`crate::lattice::MAX_DIM`]` - 1`.
pub fn regular_subdivision(phi: &TropicalPolynomial) -> Result<RegularSubdivision> {
    let n = phi.nvars;
    let base = phi.newton_polytope()?;
    if base.intrinsic_dim != n {
        return Err(Error::NotFullDimensional {
            intrinsic: base.intrinsic_dim,
            ambient: n,
        });
    }
    // Lift and hull.
    let lifted: Vec<Vec<Q>> = phi
        .terms
        .iter()
        .map(|(v, a)| {
            let mut p = to_q_vec(v);
            p.push(-a.clone());
            p
        })
        .collect();
    let hull = LatticePolytope::convex_hull(&lifted)?;

    let mut cells: Vec<SubdivisionCell> = Vec::new();
    if hull.intrinsic_dim <= n {
        // Degenerate lift: every term lies on one non-vertical hyperplane,
        // so the subdivision is trivial.  Solve <w, v> + c = -a_v.
        let rows: Vec<Vec<Q>> = phi
            .terms
            .keys()
            .map(|v| {
                let mut r = to_q_vec(v);
                r.push(Q::one());
                r
            })
            .collect();
        let rhs: Vec<Q> = phi.terms.values().map(|a| -a.clone()).collect();
        let sol = solve_any(&rows, &rhs).ok_or_else(|| {
            Error::DimensionMismatch("degenerate lift is not affine".into())
        })?;
        let (w, c) = (sol[..n].to_vec(), sol[n].clone());
        cells.push(SubdivisionCell {
            polytope: base.clone(),
            support: phi.terms.keys().cloned().collect(),
            dual_point: w,
            dual_value: -c,
        });
    } else {
        for f in &hull.facets {
            // Lower facets: inner normal with positive last coordinate.
            if !f.normal[n].is_positive() {
                continue;
            }
            // On the facet: <w~, v> + w_h * (-a_v) = -offset, so the
            // supporting gradient is w = -w~ / w_h and the tie value is
            // offset / w_h.
            let wh = Q::from_integer(f.normal[n].clone());
            let w: Vec<Q> = (0..n)
                .map(|i| -Q::from_integer(f.normal[i].clone()) / &wh)
                .collect();
            let value = &f.offset / &wh;
            let support: Vec<Vec<Z>> = phi
                .terms
                .iter()
                .filter(|(v, a)| {
                    let mut p = to_q_vec(v);
                    p.push(-(*a).clone());
                    dot_zq(&f.normal, &p) == -f.offset.clone()
                })
                .map(|(v, _)| v.clone())
                .collect();
            let pts: Vec<Vec<Q>> = support.iter().map(|v| to_q_vec(v)).collect();
            let polytope = LatticePolytope::convex_hull(&pts)?;
            cells.push(SubdivisionCell {
                polytope,
                support,
                dual_point: w,
                dual_value: value,
            });
        }
        // Deterministic cell order: by dual point, then support.
        cells.sort_by(|a, b| {
            (&a.dual_point, &a.support).cmp(&(&b.dual_point, &b.support))
        });
    }

    // Ridges: facets of maximal cells, matched between adjacent cells.
    let mut ridge_map: BTreeMap<Vec<Vec<Z>>, Vec<usize>> = BTreeMap::new();
    for (ci, cell) in cells.iter().enumerate() {
        if cell.polytope.intrinsic_dim < 1 {
            continue;
        }
        for cf in facet_supports(&cell.polytope, &cell.support) {
            ridge_map.entry(cf).or_default().push(ci);
        }
    }
    let mut ridges = Vec::new();
    for (support, adj) in ridge_map {
        let pts: Vec<Vec<Q>> = support.iter().map(|v| to_q_vec(v)).collect();
        let polytope = LatticePolytope::convex_hull(&pts)?;
        match adj.len() {
            2 => {
                let mid: Vec<Q> = cells[adj[0]]
                    .dual_point
                    .iter()
                    .zip(&cells[adj[1]].dual_point)
                    .map(|(a, b)| (a + b) / qi(2))
                    .collect();
                ridges.push(SubdivisionRidge {
                    polytope,
                    support,
                    cells: adj,
                    dual_point: mid,
                    ray_direction: None,
                    base_facet_normal: None,
                });
            }
            1 => {
                // Boundary ridge: it must lie in a facet of the Newton
                // polytope; the dual ray direction is the negated inner
                // normal of that facet.
                let facet = base
                    .facets
                    .iter()
                    .find(|bf| {
                        support
                            .iter()
                            .all(|v| dot_zq(&bf.normal, &to_q_vec(v)) == -bf.offset.clone())
                    })
                    .ok_or_else(|| {
                        Error::NotTransverse(
                            "subdivision ridge adjacent to a single cell is not on the \
                             Newton polytope boundary"
                                .into(),
                        )
                    })?;
                let delta: Vec<Z> = facet.normal.iter().map(|x| -x).collect();
                let w0 = &cells[adj[0]].dual_point;
                // Largest step along the ray keeping the tie system of the
                // ridge dominant; any smaller positive step is interior.
                let v0 = &support[0];
                let a0 = &phi.terms[v0];
                let mut t_max: Option<Q> = None;
                for (v, a) in &phi.terms {
                    if support.contains(v) {
                        continue;
                    }
                    let slack = (a0 + dot_zq(v0, w0)) - (a + dot_zq(v, w0));
                    let drift = dot_zz(v, &delta) - dot_zz(v0, &delta);
                    if drift.is_positive() {
                        let t = slack / Q::from_integer(drift);
                        if t_max.as_ref().map_or(true, |m| t < *m) {
                            t_max = Some(t);
                        }
                    }
                }
                let step = t_max.map_or(Q::one(), |t| t / qi(2));
                let dual_point: Vec<Q> = w0
                    .iter()
                    .zip(&delta)
                    .map(|(x, d)| x + Q::from_integer(d.clone()) * &step)
                    .collect();
                // The argmax at the interior point must be exactly the
                // ridge support.
                let mut am = phi.argmax(&dual_point);
                am.sort();
                let mut sup_sorted = support.clone();
                sup_sorted.sort();
                if am != sup_sorted {
                    return Err(Error::NotTransverse(
                        "dual ray point does not reproduce the ridge tie system".into(),
                    ));
                }
                ridges.push(SubdivisionRidge {
                    polytope,
                    support,
                    cells: adj,
                    dual_point,
                    ray_direction: Some(delta),
                    base_facet_normal: Some(facet.normal.clone()),
                });
            }
            _ => {
                return Err(Error::NotTransverse(format!(
                    "subdivision ridge adjacent to {} maximal cells",
                    adj.len()
                )))
            }
        }
    }
    Ok(RegularSubdivision {
        base,
        cells,
        ridges,
    })
}

/// Supports of the facets of a cell polytope, as sorted exponent lists
/// drawn from the cell's own support set.
fn facet_supports(polytope: &LatticePolytope, support: &[Vec<Z>]) -> Vec<Vec<Vec<Z>>> {
    let on_facet = |f: &Facet, v: &Vec<Z>| dot_zz(&f.normal, v) == {
        // Facet offsets of hulls of lattice points are integers only when
        // the normal is primitive integer and the vertices are integral,
        // which holds here; still, compare exactly through rationals.
        let q = -f.offset.clone();
        debug_assert!(q.denom().is_one());
        q.numer().clone()
    };
    polytope
        .facets
        .iter()
        .map(|f| {
            let mut s: Vec<Vec<Z>> = support
                .iter()
                .filter(|v| on_facet(f, v))
                .cloned()
                .collect();
            s.sort();
            s
        })
        .collect()
}

/// A cell of a mixed subdivision: the total polytope together with its
/// Minkowski decomposition into cells of the factor subdivisions.
#[derive(Debug, Clone)]
pub struct MixedCell {
    pub total: LatticePolytope,
    pub summands: Vec<LatticePolytope>,
    /// Intrinsic dimensions of the summands.
    pub cell_type: Vec<usize>,
    /// A point where the tie systems of all summands are active.
    pub dual_point: Vec<Q>,
}

/// Codimension-one cell of a mixed subdivision with its adjacency data.
#[derive(Debug, Clone)]
pub struct MixedRidge {
    pub cell: MixedCell,
    /// Indices of adjacent maximal mixed cells (two interior, one boundary).
    pub cells: Vec<usize>,
    /// Dual ray direction for boundary ridges.
    pub ray_direction: Option<Vec<Z>>,
    /// Inner normal of the facet of the total Newton polytope containing a
    /// boundary ridge.
    pub base_facet_normal: Option<Vec<Z>>,
}

/// Mixed subdivision of a product of tropical polynomials.
#[derive(Debug, Clone)]
pub struct MixedSubdivision {
    /// Newton polytope of the product (the Minkowski sum of the factors').
    pub base: LatticePolytope,
    pub cells: Vec<MixedCell>,
    pub ridges: Vec<MixedRidge>,
}

/// Compute the mixed subdivision induced by the factors' coefficients.
/// The decomposition of each cell is recovered by evaluating each factor's
/// tie system at the cell's dual point, which is the Cayley construction
/// carried out in the base space.
pub fn cayley_mixed_subdivision(factors: &[TropicalPolynomial]) -> Result<MixedSubdivision> {
    if factors.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let product = TropicalPolynomial::product(factors)?;
    let sub = regular_subdivision(&product)?;

    let decompose = |w: &[Q]| -> Result<(Vec<LatticePolytope>, Vec<usize>)> {
        let mut summands = Vec::with_capacity(factors.len());
        let mut ctype = Vec::with_capacity(factors.len());
        for f in factors {
            let am = f.argmax(w);
            let pts: Vec<Vec<Q>> = am.iter().map(|v| to_q_vec(v)).collect();
            let p = LatticePolytope::convex_hull(&pts)?;
            ctype.push(p.intrinsic_dim);
            summands.push(p);
        }
        Ok((summands, ctype))
    };
    let check_sum = |total: &LatticePolytope, summands: &[LatticePolytope]| -> Result<()> {
        let mut acc = summands[0].clone();
        for s in &summands[1..] {
            acc = acc.minkowski_sum(s)?;
        }
        if acc.vertices != total.vertices {
            return Err(Error::NotTransverse(
                "cell does not decompose as the Minkowski sum of its factor cells".into(),
            ));
        }
        Ok(())
    };

    let mut cells = Vec::with_capacity(sub.cells.len());
    for c in &sub.cells {
        let (summands, ctype) = decompose(&c.dual_point)?;
        check_sum(&c.polytope, &summands)?;
        cells.push(MixedCell {
            total: c.polytope.clone(),
            summands,
            cell_type: ctype,
            dual_point: c.dual_point.clone(),
        });
    }
    let mut ridges = Vec::with_capacity(sub.ridges.len());
    for r in &sub.ridges {
        let (summands, ctype) = decompose(&r.dual_point)?;
        check_sum(&r.polytope, &summands)?;
        ridges.push(MixedRidge {
            cell: MixedCell {
                total: r.polytope.clone(),
                summands,
                cell_type: ctype,
                dual_point: r.dual_point.clone(),
            },
            cells: r.cells.clone(),
            ray_direction: r.ray_direction.clone(),
            base_facet_normal: r.base_facet_normal.clone(),
        });
    }
    Ok(MixedSubdivision {
        base: sub.base,
        cells,
        ridges,
    })
}

/// Check the transversality condition: on every cell (maximal and
/// codimension one) the dimension of the total equals the sum of the
/// dimensions of the summands.
pub fn check_transverse(ms: &MixedSubdivision) -> Result<()> {
    for c in &ms.cells {
        let s: usize = c.cell_type.iter().sum();
        if c.total.intrinsic_dim != s {
            return Err(Error::NotTransverse(format!(
                "maximal cell of dimension {} with type {:?}",
                c.total.intrinsic_dim, c.cell_type
            )));
        }
    }
    for r in &ms.ridges {
        let s: usize = r.cell.cell_type.iter().sum();
        if r.cell.total.intrinsic_dim != s {
            return Err(Error::NotTransverse(format!(
                "codimension-one cell of dimension {} with type {:?}",
                r.cell.total.intrinsic_dim, r.cell.cell_type
            )));
        }
    }
    Ok(())
}

/// The 1-skeleton of a tropical hypersurface: vertices dual to maximal
/// cells, bounded edges dual to interior ridges, rays dual to boundary
/// ridges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalSkeleton {
    pub vertices: Vec<Vec<Q>>,
    /// Pairs of vertex indices.
    pub edges: Vec<(usize, usize)>,
    /// (vertex index, primitive direction).
    pub rays: Vec<(usize, Vec<Z>)>,
}

impl TropicalSkeleton {
    /// The skeleton of the reflected hypersurface `-V(f)`.
    pub fn reflect(&self) -> TropicalSkeleton {
        TropicalSkeleton {
            vertices: self.vertices.iter().map(|v| vec_neg(v)).collect(),
            edges: self.edges.clone(),
            rays: self
                .rays
                .iter()
                .map(|(i, d)| (*i, d.iter().map(|x| -x).collect()))
                .collect(),
        }
    }
}

/// Dual 1-skeleton of `V(phi)` for a polynomial with full-dimensional
/// Newton polytope.
pub fn hypersurface_skeleton(phi: &TropicalPolynomial) -> Result<TropicalSkeleton> {
    let sub = regular_subdivision(phi)?;
    let vertices: Vec<Vec<Q>> = sub.cells.iter().map(|c| c.dual_point.clone()).collect();
    let mut edges = Vec::new();
    let mut rays = Vec::new();
    for r in &sub.ridges {
        match r.cells.as_slice() {
            [a, b] => edges.push((*a.min(b), *a.max(b))),
            [a] => rays.push((
                *a,
                r.ray_direction
                    .clone()
                    .expect("boundary ridge carries a ray direction"),
            )),
            _ => unreachable!("ridge adjacency validated during subdivision"),
        }
    }
    edges.sort_unstable();
    edges.dedup();
    rays.sort();
    Ok(TropicalSkeleton {
        vertices,
        edges,
        rays,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> TropicalPolynomial {
        TropicalPolynomial::new(
            2,
            vec![
                (zvec(&[0, 0]), qi(0)),
                (zvec(&[1, 0]), qi(0)),
                (zvec(&[0, 1]), qi(0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn eval_max_plus() {
        let f = line();
        assert_eq!(f.eval(&qvec(&[3, 5])), qi(5));
        assert_eq!(f.eval(&qvec(&[-1, -2])), qi(0));
        assert_eq!(f.argmax(&qvec(&[0, 0])).len(), 3);
    }

    #[test]
    fn product_coefficients_take_max_decomposition() {
        let f = line();
        let g = TropicalPolynomial::new(
            2,
            vec![
                (zvec(&[0, 0]), qi(-3)),
                (zvec(&[1, 0]), qi(-1)),
                (zvec(&[0, 1]), qi(-2)),
            ],
        )
        .unwrap();
        let p = TropicalPolynomial::product(&[f.clone(), g.clone()]).unwrap();
        // Coefficient of (1,1): max over decompositions (1,0)+(0,1) vs
        // (0,1)+(1,0): max(0 + -2, 0 + -1) = -1.
        assert_eq!(p.terms[&zvec(&[1, 1])], qi(-1));
        assert_eq!(p.terms.len(), 6);
    }

    #[test]
    fn subdivision_of_line_single_cell() {
        let sub = regular_subdivision(&line()).unwrap();
        assert_eq!(sub.cells.len(), 1);
        assert_eq!(sub.cells[0].dual_point, qvec(&[0, 0]));
        assert_eq!(sub.ridges.len(), 3);
        let mut dirs: Vec<Vec<Z>> = sub
            .ridges
            .iter()
            .map(|r| r.ray_direction.clone().unwrap())
            .collect();
        dirs.sort();
        assert_eq!(dirs, vec![zvec(&[-1, 0]), zvec(&[0, -1]), zvec(&[1, 1])]);
    }

    #[test]
    fn subdivision_split_square() {
        // A square with one lifted corner splits into two triangles.
        let f = TropicalPolynomial::new(
            2,
            vec![
                (zvec(&[0, 0]), qi(0)),
                (zvec(&[1, 0]), qi(0)),
                (zvec(&[0, 1]), qi(0)),
                (zvec(&[1, 1]), qi(-1)),
            ],
        )
        .unwrap();
        let sub = regular_subdivision(&f).unwrap();
        assert_eq!(sub.cells.len(), 2);
        let duals: Vec<Vec<Q>> = sub.cells.iter().map(|c| c.dual_point.clone()).collect();
        assert!(duals.contains(&qvec(&[0, 0])));
        assert!(duals.contains(&qvec(&[1, 1])));
        let interior: Vec<&SubdivisionRidge> =
            sub.ridges.iter().filter(|r| r.cells.len() == 2).collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(interior[0].support.len(), 2);
        // Skeleton: one bounded edge, four rays.
        let sk = hypersurface_skeleton(&f).unwrap();
        assert_eq!(sk.vertices.len(), 2);
        assert_eq!(sk.edges.len(), 1);
        assert_eq!(sk.rays.len(), 4);
        // Reflection negates positions and directions.
        let rk = sk.reflect();
        assert_eq!(rk.vertices[0], vec_neg(&sk.vertices[0]));
    }

    #[test]
    fn mixed_subdivision_two_generic_lines() {
        let f = line();
        let g = TropicalPolynomial::new(
            2,
            vec![
                (zvec(&[0, 0]), qi(-3)),
                (zvec(&[1, 0]), qi(-1)),
                (zvec(&[0, 1]), qi(-2)),
            ],
        )
        .unwrap();
        let ms = cayley_mixed_subdivision(&[f, g]).unwrap();
        check_transverse(&ms).unwrap();
        // Exactly one mixed (1,1) maximal cell of total area 1 for two
        // generic lines (Bernstein count 1).
        let mixed: Vec<&MixedCell> = ms
            .cells
            .iter()
            .filter(|c| c.cell_type == vec![1, 1])
            .collect();
        let area: Q = mixed
            .iter()
            .map(|c| c.total.euclidean_volume().unwrap())
            .sum();
        assert_eq!(area, qi(1));
        // All maximal cells are transverse and tile the sum of the Newton
        // polytopes.
        let total_area: Q = ms
            .cells
            .iter()
            .map(|c| c.total.euclidean_volume().unwrap())
            .sum();
        assert_eq!(total_area, ms.base.euclidean_volume().unwrap());
    }

    #[test]
    fn identical_lines_are_not_transverse() {
        let f = line();
        let ms = cayley_mixed_subdivision(&[f.clone(), f]).unwrap();
        assert!(matches!(
            check_transverse(&ms),
            Err(Error::NotTransverse(_))
        ));
    }
}
