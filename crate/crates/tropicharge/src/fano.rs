//! Smooth toric Fano data: ray validation, divisor polytopes, ampleness,
//! Mori-cone generators and intersection numbers.
//!
//! The variety is encoded by its ray list `v_1, ..., v_p` with the first
//! `n` rays fixed to the standard basis.  The total space under study is
//! the canonical bundle over the toric variety, which is why every extra
//! ray must have coordinate sum strictly below one: that inequality is the
//! Fano condition seen from the bundle.

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{facet_projection, mixed_volume, LatticePolytope};
use crate::linalg::*;

/// Rays of a complete smooth Fano fan, first `dim` rays the standard basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanData {
    pub dim: usize,
    pub rays: Vec<Vec<Z>>,
}

/// Intersection numbers of a family of ample divisors `Q_1, ..., Q_{n-1}`:
/// `n_j = [D_j] . prod_k [Q_k]` for each ray divisor and
/// `n_tot = (sum_k [Q_k]) . prod_k [Q_k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionNumbers {
    /// Indexed by ray (so `n_j[j]` belongs to ray `j+1` in 1-based terms).
    pub n_j: Vec<Q>,
    pub n_tot: Q,
}

impl FanData {
    pub fn new(dim: usize, rays: Vec<Vec<Z>>) -> Self {
        FanData { dim, rays }
    }

    /// Number of rays.
    pub fn p(&self) -> usize {
        self.rays.len()
    }

    /// Number of extra rays (rays beyond the standard basis), which is
    /// also the Picard number and the number of Mori generators.
    pub fn extra(&self) -> usize {
        self.p() - self.dim
    }

    /// `sum_i v_{n+s,i} - 1` for the 1-based extra-ray index `s`; strictly
    /// negative on valid data.
    pub fn canonical_degree(&self, s: usize) -> Z {
        let v = &self.rays[self.dim + s - 1];
        let mut sum = Z::zero();
        for x in v {
            sum += x;
        }
        sum - Z::one()
    }

    /// Full structural validation.
    ///
    /// # Errors
    ///
    /// `InvalidFan` describing the first failed check: standard-basis
    /// prefix, primitivity, distinctness, boundedness and reflexivity of
    /// the anticanonical polytope, strict vertex convexity of the ray
    /// polytope, the extra-ray degree inequality, and smoothness
    /// (unimodularity of every maximal cone of the normal fan).
    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        let p = self.p();
        if n == 0 || n > crate::lattice::MAX_DIM {
            return Err(Error::DimensionUnsupported(n));
        }
        if p <= n {
            return Err(Error::InvalidFan(format!(
                "need more than {n} rays, got {p}"
            )));
        }
        for (j, v) in self.rays.iter().enumerate() {
            if v.len() != n {
                return Err(Error::InvalidFan(format!("ray {} has wrong length", j + 1)));
            }
            if v.iter().all(|x| x.is_zero()) {
                return Err(Error::InvalidFan(format!("ray {} is zero", j + 1)));
            }
            let prim = primitive_integer(&to_q_vec(v))?;
            if &prim != v {
                return Err(Error::InvalidFan(format!("ray {} is not primitive", j + 1)));
            }
        }
        for i in 0..n {
            let mut e = vec![Z::zero(); n];
            e[i] = Z::one();
            if self.rays[i] != e {
                return Err(Error::InvalidFan(format!(
                    "ray {} must be the standard basis vector e_{}",
                    i + 1,
                    i + 1
                )));
            }
        }
        for i in 0..p {
            for j in (i + 1)..p {
                if self.rays[i] == self.rays[j] {
                    return Err(Error::InvalidFan(format!(
                        "rays {} and {} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        // Anticanonical polytope: bounded and reflexive.
        let ones = vec![Q::one(); p];
        let gcan = self
            .divisor_polytope(&ones)
            .map_err(|e| Error::InvalidFan(format!("anticanonical polytope: {e}")))?;
        if gcan.intrinsic_dim != n {
            return Err(Error::InvalidFan(
                "anticanonical polytope is not full-dimensional".into(),
            ));
        }
        if !gcan.is_lattice() {
            return Err(Error::InvalidFan(
                "anticanonical polytope has non-integral vertices (not reflexive)".into(),
            ));
        }
        if gcan.interior_lattice_points() != vec![vec![Z::zero(); n]] {
            return Err(Error::InvalidFan(
                "anticanonical polytope does not have the origin as its unique interior \
                 lattice point"
                    .into(),
            ));
        }
        // Strict convexity of the ray polytope at every ray.
        let ray_pts: Vec<Vec<Q>> = self.rays.iter().map(|v| to_q_vec(v)).collect();
        let pv = LatticePolytope::convex_hull(&ray_pts)?;
        for (j, v) in self.rays.iter().enumerate() {
            if !pv.vertices.contains(&to_q_vec(v)) {
                return Err(Error::InvalidFan(format!(
                    "ray {} is not a vertex of the ray polytope",
                    j + 1
                )));
            }
        }
        // Extra rays have coordinate sum strictly below 1.
        for s in 1..=self.extra() {
            if !self.canonical_degree(s).is_negative() {
                return Err(Error::InvalidFan(format!(
                    "extra ray {} has coordinate sum >= 1",
                    n + s
                )));
            }
        }
        // Smoothness: at every vertex of the anticanonical polytope exactly
        // n facets meet and their normals form a unimodular basis.
        for (vi, m) in gcan.vertices.iter().enumerate() {
            let cone: Vec<&Vec<Z>> = self
                .rays
                .iter()
                .filter(|v| dot_zq(v, m) == -Q::one())
                .collect();
            if cone.len() != n {
                return Err(Error::InvalidFan(format!(
                    "vertex {vi} of the anticanonical polytope lies on {} facets (fan \
                     not simplicial/smooth)",
                    cone.len()
                )));
            }
            let mat: Vec<Vec<Q>> = cone.iter().map(|v| to_q_vec(v)).collect();
            if det(&mat).abs() != Q::one() {
                return Err(Error::InvalidFan(format!(
                    "maximal cone at vertex {vi} is not unimodular"
                )));
            }
        }
        Ok(())
    }

    /// The polytope `G_D = { m : <m, v_j> >= -a_j }` of a torus-invariant
    /// divisor with coefficient vector `a`.
    pub fn divisor_polytope(&self, a: &[Q]) -> Result<LatticePolytope> {
        if a.len() != self.p() {
            return Err(Error::DimensionMismatch(
                "divisor coefficient vector length".into(),
            ));
        }
        LatticePolytope::from_halfspaces(&self.rays, a)
    }

    /// Ampleness of the divisor with coefficients `a`: its polytope must be
    /// full-dimensional with exactly one facet per ray, each cut out with
    /// offset exactly `a_j` (strict convexity of the support function).
    pub fn is_ample(&self, a: &[Q]) -> Result<bool> {
        let g = match self.divisor_polytope(a) {
            Ok(g) => g,
            Err(Error::UnboundedOrEmpty(_)) => return Ok(false),
            Err(e) => return Err(e),
        };
        if g.intrinsic_dim != self.dim || g.facets.len() != self.p() {
            return Ok(false);
        }
        for (v, aj) in self.rays.iter().zip(a) {
            let found = g
                .facets
                .iter()
                .any(|f| &f.normal == v && f.offset == *aj);
            if !found {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Mori-cone generators of the canonical bundle, one per extra ray.
    /// Coordinates are indexed over the `p + 1` divisors: slot 0 is the
    /// compactifying divisor, slot `j` the closure of the ray divisor.
    pub fn mori_generators(&self) -> Vec<Vec<Z>> {
        let n = self.dim;
        (1..=self.extra())
            .map(|s| {
                let mut l = Vec::with_capacity(self.p() + 1);
                l.push(self.canonical_degree(s));
                let vs = &self.rays[n + s - 1];
                for j in 0..n {
                    l.push(-vs[j].clone());
                }
                for k in 1..=self.extra() {
                    l.push(if k == s { Z::one() } else { Z::zero() });
                }
                l
            })
            .collect()
    }

    /// The tropical region `{ x : lambda_j + <v_j, x> >= 0 }` for an ample
    /// coefficient vector `lambda`.
    ///
    /// # Errors
    ///
    /// `NotAmple` when the coefficients do not define an ample divisor.
    pub fn g_trop(&self, lambda: &[Q]) -> Result<LatticePolytope> {
        if !self.is_ample(lambda)? {
            return Err(Error::NotAmple(
                "tropical region requires ample coefficients".into(),
            ));
        }
        self.divisor_polytope(lambda)
    }

    /// Facet of an ample divisor polytope on the ray `v_j` (1-based `j`).
    pub fn polytope_facet(&self, g: &LatticePolytope, j: usize) -> Result<LatticePolytope> {
        let v = &self.rays[j - 1];
        let f = g
            .facets
            .iter()
            .find(|f| &f.normal == v)
            .ok_or_else(|| Error::NotAmple(format!("no facet with inner normal of ray {j}")))?;
        let pts: Vec<Vec<Q>> = f.vertex_set.iter().map(|&i| g.vertices[i].clone()).collect();
        LatticePolytope::convex_hull(&pts)
    }
}

/// Intersection numbers of an ample family `G_1, ..., G_{n-1}` against the
/// ray divisors and against the family itself:
///
/// * `n_j = (n-1)! * MV(Psi_j(F_{j,1}), ..., Psi_j(F_{j,n-1}))`, with
///   `F_{j,k}` the facet of `G_k` on the ray `v_j` and `Psi_j` the
///   canonical lattice chart of that facet's hyperplane;
/// * `n_tot = n! * sum_k MV(G_k, G_1, ..., G_{n-1})`.
pub fn intersection_numbers(fan: &FanData, family: &[LatticePolytope]) -> Result<IntersectionNumbers> {
    let n = fan.dim;
    if family.len() + 1 != n {
        return Err(Error::DimensionMismatch(format!(
            "family of {} divisors in dimension {} (need n - 1)",
            family.len(),
            n
        )));
    }
    let mut n_j = Vec::with_capacity(fan.p());
    for j in 1..=fan.p() {
        let psi = facet_projection(&fan.rays[j - 1])?;
        let mut projected = Vec::with_capacity(family.len());
        for g in family {
            let facet = fan.polytope_facet(g, j)?;
            projected.push(psi.apply_polytope(&facet)?);
        }
        let mv = mixed_volume(&projected)?;
        let mut fact = Q::one();
        for k in 1..n {
            fact *= qi(k as i64);
        }
        n_j.push(mv * fact);
    }
    let mut n_tot = Q::zero();
    let mut nfact = Q::one();
    for k in 1..=n {
        nfact *= qi(k as i64);
    }
    for k in 0..family.len() {
        let mut args = Vec::with_capacity(n);
        args.push(family[k].clone());
        for g in family {
            args.push(g.clone());
        }
        n_tot += mixed_volume(&args)? * &nfact;
    }
    Ok(IntersectionNumbers { n_j, n_tot })
}

/// Bundled example fans used by tests and the sample configurations.
pub mod examples {
    use super::*;

    /// Canonical bundle of the projective plane.
    pub fn k_p2() -> FanData {
        FanData::new(2, vec![zvec(&[1, 0]), zvec(&[0, 1]), zvec(&[-1, -1])])
    }

    /// Canonical bundle of the product of two projective lines.
    pub fn k_p1p1() -> FanData {
        FanData::new(
            2,
            vec![
                zvec(&[1, 0]),
                zvec(&[0, 1]),
                zvec(&[-1, 0]),
                zvec(&[0, -1]),
            ],
        )
    }

    /// Canonical bundle of projective 3-space.
    pub fn k_p3() -> FanData {
        FanData::new(
            3,
            vec![
                zvec(&[1, 0, 0]),
                zvec(&[0, 1, 0]),
                zvec(&[0, 0, 1]),
                zvec(&[-1, -1, -1]),
            ],
        )
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;

    #[test]
    fn validates_standard_fanos() {
        k_p2().validate().unwrap();
        k_p1p1().validate().unwrap();
        k_p3().validate().unwrap();
        // Blowup of the plane at a point is also smooth Fano.
        let f1 = FanData::new(
            2,
            vec![
                zvec(&[1, 0]),
                zvec(&[0, 1]),
                zvec(&[-1, 1]),
                zvec(&[0, -1]),
            ],
        );
        f1.validate().unwrap();
    }

    #[test]
    fn rejects_bad_fans() {
        // Singular: the cone at one vertex is not unimodular.
        let sing = FanData::new(2, vec![zvec(&[1, 0]), zvec(&[0, 1]), zvec(&[-2, -1])]);
        assert!(matches!(sing.validate(), Err(Error::InvalidFan(_))));
        // Incomplete: normals do not positively span.
        let incomplete = FanData::new(2, vec![zvec(&[1, 0]), zvec(&[0, 1]), zvec(&[1, 1])]);
        assert!(matches!(incomplete.validate(), Err(Error::InvalidFan(_))));
        // Non-primitive ray.
        let nonprim = FanData::new(2, vec![zvec(&[1, 0]), zvec(&[0, 1]), zvec(&[-2, -2])]);
        assert!(matches!(nonprim.validate(), Err(Error::InvalidFan(_))));
        // Standard-basis prefix violated.
        let swapped = FanData::new(2, vec![zvec(&[0, 1]), zvec(&[1, 0]), zvec(&[-1, -1])]);
        assert!(matches!(swapped.validate(), Err(Error::InvalidFan(_))));
    }

    #[test]
    fn divisor_polytopes_and_ampleness() {
        let fan = k_p2();
        let line = fan.divisor_polytope(&qvec(&[0, 0, 1])).unwrap();
        assert_eq!(
            line.vertices,
            vec![qvec(&[0, 0]), qvec(&[0, 1]), qvec(&[1, 0])]
        );
        assert!(fan.is_ample(&qvec(&[0, 0, 1])).unwrap());
        assert!(!fan.is_ample(&qvec(&[0, 0, 0])).unwrap());
        // On the product of lines the class (1,0) is nef but not ample.
        let fan2 = k_p1p1();
        assert!(fan2.is_ample(&qvec(&[0, 0, 1, 1])).unwrap());
        assert!(!fan2.is_ample(&qvec(&[0, 0, 1, 0])).unwrap());
        // Tropical region for the anticanonical coefficients.
        let g = fan.g_trop(&qvec(&[0, 0, 1])).unwrap();
        assert_eq!(g.vertices.len(), 3);
        assert!(matches!(
            fan.g_trop(&qvec(&[0, 0, 0])),
            Err(Error::NotAmple(_))
        ));
    }

    #[test]
    fn mori_generators_match_known_values() {
        assert_eq!(k_p2().mori_generators(), vec![zvec(&[-3, 1, 1, 1])]);
        assert_eq!(
            k_p1p1().mori_generators(),
            vec![zvec(&[-2, 1, 0, 1, 0]), zvec(&[-2, 0, 1, 0, 1])]
        );
        assert_eq!(k_p3().mori_generators(), vec![zvec(&[-4, 1, 1, 1, 1])]);
        // Rows sum to zero.
        for fan in [k_p2(), k_p1p1(), k_p3()] {
            for l in fan.mori_generators() {
                let s: Z = l.iter().sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn intersection_numbers_line_on_p2() {
        let fan = k_p2();
        let line = fan.divisor_polytope(&qvec(&[0, 0, 1])).unwrap();
        let nums = intersection_numbers(&fan, &[line]).unwrap();
        assert_eq!(nums.n_j, vec![qi(1), qi(1), qi(1)]);
        assert_eq!(nums.n_tot, qi(1));
    }

    #[test]
    fn intersection_numbers_hyperplanes_on_p3() {
        let fan = k_p3();
        let h = fan.divisor_polytope(&qvec(&[0, 0, 0, 1])).unwrap();
        let nums = intersection_numbers(&fan, &[h.clone(), h]).unwrap();
        assert_eq!(nums.n_j, vec![qi(1), qi(1), qi(1), qi(1)]);
        assert_eq!(nums.n_tot, qi(2));
    }

    #[test]
    fn intersection_numbers_bidegree_on_p1p1() {
        let fan = k_p1p1();
        let d11 = fan.divisor_polytope(&qvec(&[0, 0, 1, 1])).unwrap();
        let nums = intersection_numbers(&fan, &[d11]).unwrap();
        assert_eq!(nums.n_j, vec![qi(1), qi(1), qi(1), qi(1)]);
        assert_eq!(nums.n_tot, qi(2));
    }
}
