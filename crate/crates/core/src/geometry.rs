//! Orbit and barycentric geometry of symmetric triangle rules.
//!
//! A symmetric rule never stores its points directly: it stores orbits, the
//! equivalence classes of points under the six-element symmetry group of the
//! triangle. The three orbit kinds carry 1, 3, and 6 points and 1, 2, and 3
//! unknowns respectively. Expansion produces explicit barycentric points,
//! and an affine map transports a rule onto an arbitrary physical triangle
//! with weights scaled by twice its area.

use crate::real::{Ctx, Real};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("degenerate {kind:?} orbit: {detail}")]
    DegenerateOrbit { kind: OrbitKind, detail: String },
    #[error("degenerate domain: triangle has zero area")]
    DegenerateDomain,
}

/// Barycentric coordinates. Components may leave [0, 1]: rules with
/// exterior points are representable and are reported, not rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct BaryPoint {
    pub a: Real,
    pub b: Real,
    pub c: Real,
}

impl BaryPoint {
    /// Build from the two leading coordinates; the third is recomputed so
    /// a + b + c = 1 holds exactly at working precision.
    pub fn from_ab(a: Real, b: Real, ctx: &Ctx) -> Self {
        let c = ctx.one() - a.clone() - b.clone();
        BaryPoint { a, b, c }
    }

    /// Planar coordinates under the identification (x, y) = (a, b) on the
    /// unit right triangle.
    pub fn xy(&self) -> (Real, Real) {
        (self.a.clone(), self.b.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OrbitKind {
    /// One point at the centroid; one unknown (the weight).
    Centroid,
    /// Three points on the medians; unknowns (alpha, weight).
    Median,
    /// Six points off the medians; unknowns (alpha, beta, weight).
    General,
}

impl OrbitKind {
    pub fn points(&self) -> usize {
        match self {
            OrbitKind::Centroid => 1,
            OrbitKind::Median => 3,
            OrbitKind::General => 6,
        }
    }

    pub fn unknowns(&self) -> usize {
        match self {
            OrbitKind::Centroid => 1,
            OrbitKind::Median => 2,
            OrbitKind::General => 3,
        }
    }
}

/// One orbit of a symmetric rule. The weight is the reference weight per
/// point (all points of an orbit share it).
#[derive(Debug, Clone, PartialEq)]
pub enum Orbit {
    Centroid {
        weight: Real,
    },
    /// Points are the three unique permutations of (alpha, h, h) with
    /// h = (1 - alpha)/2.
    Median {
        alpha: Real,
        weight: Real,
    },
    /// Points are the six unique permutations of (alpha, beta, 1-alpha-beta).
    General {
        alpha: Real,
        beta: Real,
        weight: Real,
    },
}

impl Orbit {
    pub fn kind(&self) -> OrbitKind {
        match self {
            Orbit::Centroid { .. } => OrbitKind::Centroid,
            Orbit::Median { .. } => OrbitKind::Median,
            Orbit::General { .. } => OrbitKind::General,
        }
    }

    pub fn weight(&self) -> &Real {
        match self {
            Orbit::Centroid { weight } => weight,
            Orbit::Median { weight, .. } => weight,
            Orbit::General { weight, .. } => weight,
        }
    }

    /// Expand to explicit barycentric points, each carrying the orbit weight.
    ///
    /// A `General` orbit whose coordinates coincide (fewer than six distinct
    /// permutations) is rejected, as is a `Median` orbit sitting at the
    /// centroid: both signal an orbit kind inconsistent with the point's
    /// actual symmetry, which would corrupt unknown counting.
    pub fn expand(&self, ctx: &Ctx) -> Result<Vec<(BaryPoint, Real)>, GeometryError> {
        match self {
            Orbit::Centroid { weight } => {
                let third = ctx.ratio(1, 3);
                Ok(vec![(
                    BaryPoint {
                        a: third.clone(),
                        b: third.clone(),
                        c: third,
                    },
                    weight.clone(),
                )])
            }
            Orbit::Median { alpha, weight } => {
                let h = (ctx.one() - alpha.clone()) / ctx.real(2);
                if *alpha == h {
                    return Err(GeometryError::DegenerateOrbit {
                        kind: OrbitKind::Median,
                        detail: format!("alpha = {} coincides with the centroid", alpha.to_f64()),
                    });
                }
                let mk = |a: &Real, b: &Real| BaryPoint::from_ab(a.clone(), b.clone(), ctx);
                Ok(vec![
                    (mk(alpha, &h), weight.clone()),
                    (mk(&h, alpha), weight.clone()),
                    (mk(&h, &h), weight.clone()),
                ])
            }
            Orbit::General {
                alpha,
                beta,
                weight,
            } => {
                let gamma = ctx.one() - alpha.clone() - beta.clone();
                if *alpha == *beta || *alpha == gamma || *beta == gamma {
                    return Err(GeometryError::DegenerateOrbit {
                        kind: OrbitKind::General,
                        detail: format!(
                            "coordinates ({}, {}, {}) are not pairwise distinct",
                            alpha.to_f64(),
                            beta.to_f64(),
                            gamma.to_f64()
                        ),
                    });
                }
                let mk = |a: &Real, b: &Real| BaryPoint::from_ab(a.clone(), b.clone(), ctx);
                Ok(vec![
                    (mk(alpha, beta), weight.clone()),
                    (mk(beta, &gamma), weight.clone()),
                    (mk(&gamma, alpha), weight.clone()),
                    (mk(beta, alpha), weight.clone()),
                    (mk(alpha, &gamma), weight.clone()),
                    (mk(&gamma, beta), weight.clone()),
                ])
            }
        }
    }
}

/// Orbit counts (n0, n1, n2) of a rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrbitCounts {
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
}

impl OrbitCounts {
    pub fn point_count(&self) -> usize {
        self.n0 + 3 * self.n1 + 6 * self.n2
    }

    pub fn unknown_count(&self) -> usize {
        self.n0 + 2 * self.n1 + 3 * self.n2
    }
}

/// A symmetric triangle rule stored as orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricRule {
    pub orbits: Vec<Orbit>,
    pub precision_digits: u32,
}

impl SymmetricRule {
    pub fn new(orbits: Vec<Orbit>, precision_digits: u32) -> Self {
        SymmetricRule {
            orbits,
            precision_digits,
        }
    }

    pub fn counts(&self) -> OrbitCounts {
        let mut counts = OrbitCounts {
            n0: 0,
            n1: 0,
            n2: 0,
        };
        for orbit in &self.orbits {
            match orbit.kind() {
                OrbitKind::Centroid => counts.n0 += 1,
                OrbitKind::Median => counts.n1 += 1,
                OrbitKind::General => counts.n2 += 1,
            }
        }
        counts
    }

    pub fn point_count(&self) -> usize {
        self.counts().point_count()
    }

    pub fn unknown_count(&self) -> usize {
        self.counts().unknown_count()
    }

    /// Expand every orbit; length is n0 + 3 n1 + 6 n2.
    pub fn expand(&self, ctx: &Ctx) -> Result<Vec<(BaryPoint, Real)>, GeometryError> {
        let mut points = Vec::with_capacity(self.point_count());
        for orbit in &self.orbits {
            points.extend(orbit.expand(ctx)?);
        }
        Ok(points)
    }

    /// Sum of reference weights over all expanded points.
    pub fn weight_sum(&self, ctx: &Ctx) -> Real {
        let mut acc = ctx.zero();
        for orbit in &self.orbits {
            acc += orbit.weight().clone() * ctx.real(orbit.kind().points() as u32);
        }
        acc
    }
}

/// All six coordinate permutations of a barycentric point, with duplicates
/// removed at working-precision tolerance (the centroid maps to itself;
/// median points have a three-element image set even when their repeated
/// coordinate was recomputed and differs in the last bits).
pub fn symmetry_images(p: &BaryPoint, ctx: &Ctx) -> Vec<BaryPoint> {
    let mut eps = ctx.one();
    eps >>= ctx.bits().saturating_sub(12);
    let close = |x: &Real, y: &Real| (x.clone() - y).abs() <= eps;
    let BaryPoint { a, b, c } = p;
    let perms = [
        (a, b, c),
        (a, c, b),
        (b, a, c),
        (b, c, a),
        (c, a, b),
        (c, b, a),
    ];
    let mut out: Vec<BaryPoint> = Vec::with_capacity(6);
    for (x, y, z) in perms {
        let candidate = BaryPoint {
            a: x.clone(),
            b: y.clone(),
            c: z.clone(),
        };
        if !out
            .iter()
            .any(|q| close(&q.a, &candidate.a) && close(&q.b, &candidate.b) && close(&q.c, &candidate.c))
        {
            out.push(candidate);
        }
    }
    out
}

/// A planar triangle at extended precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    pub vertices: [[Real; 2]; 3],
}

impl Triangle {
    pub fn new(vertices: [[Real; 2]; 3]) -> Self {
        Triangle { vertices }
    }

    pub fn from_f64(v: [[f64; 2]; 3], ctx: &Ctx) -> Self {
        Triangle {
            vertices: [
                [ctx.real(v[0][0]), ctx.real(v[0][1])],
                [ctx.real(v[1][0]), ctx.real(v[1][1])],
                [ctx.real(v[2][0]), ctx.real(v[2][1])],
            ],
        }
    }

    /// The unit right triangle (0,0), (1,0), (0,1) on which reference
    /// integrals are defined. Vertex order matches the barycentric
    /// identification (x, y) = (a, b): vertex 1 is (1,0), vertex 2 is (0,1),
    /// vertex 3 is the origin.
    pub fn reference(ctx: &Ctx) -> Self {
        Triangle {
            vertices: [
                [ctx.one(), ctx.zero()],
                [ctx.zero(), ctx.one()],
                [ctx.zero(), ctx.zero()],
            ],
        }
    }

    pub fn signed_area(&self, ctx: &Ctx) -> Real {
        let [v1, v2, v3] = &self.vertices;
        let ux = v2[0].clone() - &v1[0];
        let uy = v2[1].clone() - &v1[1];
        let vx = v3[0].clone() - &v1[0];
        let vy = v3[1].clone() - &v1[1];
        (ux * vy - uy * vx) / ctx.real(2)
    }

    pub fn area(&self, ctx: &Ctx) -> Real {
        self.signed_area(ctx).abs()
    }

    /// Map a barycentric point to the plane: a v1 + b v2 + c v3.
    pub fn map_bary(&self, p: &BaryPoint) -> [Real; 2] {
        let [v1, v2, v3] = &self.vertices;
        [
            p.a.clone() * &v1[0] + p.b.clone() * &v2[0] + p.c.clone() * &v3[0],
            p.a.clone() * &v1[1] + p.b.clone() * &v2[1] + p.c.clone() * &v3[1],
        ]
    }

    pub fn to_f64(&self) -> [[f64; 2]; 3] {
        let v = &self.vertices;
        [
            [v[0][0].to_f64(), v[0][1].to_f64()],
            [v[1][0].to_f64(), v[1][1].to_f64()],
            [v[2][0].to_f64(), v[2][1].to_f64()],
        ]
    }
}

/// Which construction produced a physical rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Approach {
    Polynomial,
    OrbitOptimized,
    Subdivision,
    External,
}

impl Approach {
    pub fn tag(&self) -> &'static str {
        match self {
            Approach::Polynomial => "polynomial",
            Approach::OrbitOptimized => "approach1",
            Approach::Subdivision => "approach2",
            Approach::External => "external",
        }
    }
}

/// Provenance metadata carried by exported rules.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleSource {
    pub approach: Approach,
    pub n: usize,
    pub sequence: String,
    pub residual_max: Option<Real>,
}

/// Explicit points and weights on a physical triangle; weights carry area
/// units (they sum to the triangle area when the constant is integrated
/// exactly).
#[derive(Debug, Clone)]
pub struct PhysicalRule {
    pub points: Vec<[Real; 2]>,
    pub weights: Vec<Real>,
    pub source: RuleSource,
}

impl PhysicalRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight_sum(&self, ctx: &Ctx) -> Real {
        let mut acc = ctx.zero();
        for w in &self.weights {
            acc += w;
        }
        acc
    }

    pub fn to_f64(&self) -> (Vec<[f64; 2]>, Vec<f64>) {
        (
            self.points
                .iter()
                .map(|p| [p[0].to_f64(), p[1].to_f64()])
                .collect(),
            self.weights.iter().map(|w| w.to_f64()).collect(),
        )
    }
}

/// Map a symmetric rule onto an arbitrary triangle: points affinely, each
/// weight scaled to w = 2 A w' with A the unsigned area.
pub fn map_to_physical(
    rule: &SymmetricRule,
    tri: &Triangle,
    source: RuleSource,
    ctx: &Ctx,
) -> Result<PhysicalRule, GeometryError> {
    let area = tri.area(ctx);
    if area.is_zero() {
        return Err(GeometryError::DegenerateDomain);
    }
    let scale = ctx.real(2) * &area;
    let expanded = rule.expand(ctx)?;
    let mut points = Vec::with_capacity(expanded.len());
    let mut weights = Vec::with_capacity(expanded.len());
    for (bary, w) in expanded {
        points.push(tri.map_bary(&bary));
        weights.push(w * &scale);
    }
    Ok(PhysicalRule {
        points,
        weights,
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Ctx {
        Ctx::from_digits(64)
    }

    #[test]
    fn centroid_orbit_expands_to_single_point() {
        let ctx = ctx();
        let orbit = Orbit::Centroid {
            weight: ctx.ratio(1, 2),
        };
        let pts = orbit.expand(&ctx).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].0.a, ctx.ratio(1, 3));
        assert_eq!(pts[0].1, ctx.ratio(1, 2));
    }

    #[test]
    fn median_orbit_expands_to_three_permutations() {
        let ctx = ctx();
        let orbit = Orbit::Median {
            alpha: ctx.ratio(2, 3),
            weight: ctx.ratio(1, 6),
        };
        let pts = orbit.expand(&ctx).unwrap();
        assert_eq!(pts.len(), 3);
        let sixth = ctx.ratio(1, 6);
        let two_thirds = ctx.ratio(2, 3);
        let tol = ctx.pow10(-60);
        assert_eq!(pts[0].0.a, two_thirds);
        assert!((pts[0].0.b.clone() - &sixth).abs() < tol);
        assert_eq!(pts[1].0.b, two_thirds);
        assert!((pts[2].0.c.clone() - &two_thirds).abs() < tol);
        for (_, w) in &pts {
            assert_eq!(*w, sixth);
        }
    }

    #[test]
    fn general_orbit_expands_to_six_permutations() {
        let ctx = ctx();
        let orbit = Orbit::General {
            alpha: ctx.ratio(1, 10),
            beta: ctx.ratio(1, 5),
            weight: ctx.one(),
        };
        let pts = orbit.expand(&ctx).unwrap();
        assert_eq!(pts.len(), 6);
        // every permutation of (0.1, 0.2, 0.7) appears exactly once
        let mut seen: Vec<(f64, f64, f64)> = pts
            .iter()
            .map(|(p, _)| (p.a.to_f64(), p.b.to_f64(), p.c.to_f64()))
            .collect();
        seen.sort_by(|x, y| x.partial_cmp(y).unwrap());
        seen.dedup();
        assert_eq!(seen.len(), 6);
    }

    #[test]
    fn degenerate_orbits_are_rejected() {
        let ctx = ctx();
        // 1/3 rounds, so h = (1-alpha)/2 differs from alpha in the last bit
        // and expansion still succeeds at working precision.
        let near_centroid = Orbit::Median {
            alpha: ctx.ratio(1, 3),
            weight: ctx.one(),
        };
        assert!(near_centroid.expand(&ctx).is_ok());

        let coincident = Orbit::General {
            alpha: ctx.ratio(1, 5),
            beta: ctx.ratio(1, 5),
            weight: ctx.one(),
        };
        assert!(matches!(
            coincident.expand(&ctx),
            Err(GeometryError::DegenerateOrbit { .. })
        ));

        // gamma = 1 - 1/2 - 1/4 = 1/4 collides with beta
        let gamma_clash = Orbit::General {
            alpha: ctx.ratio(1, 2),
            beta: ctx.ratio(1, 4),
            weight: ctx.one(),
        };
        assert!(gamma_clash.expand(&ctx).is_err());
    }

    #[test]
    fn rule_point_and_unknown_counts() {
        let ctx = ctx();
        let rule = SymmetricRule::new(
            vec![
                Orbit::Centroid { weight: ctx.one() },
                Orbit::Median {
                    alpha: ctx.ratio(1, 2),
                    weight: ctx.one(),
                },
                Orbit::Median {
                    alpha: ctx.ratio(4, 5),
                    weight: ctx.one(),
                },
                Orbit::General {
                    alpha: ctx.ratio(1, 10),
                    beta: ctx.ratio(1, 5),
                    weight: ctx.one(),
                },
            ],
            64,
        );
        assert_eq!(rule.point_count(), 13);
        assert_eq!(rule.unknown_count(), 8);
        assert_eq!(rule.expand(&ctx).unwrap().len(), 13);

        let twelve = SymmetricRule::new(
            vec![
                Orbit::Median {
                    alpha: ctx.ratio(1, 2),
                    weight: ctx.one(),
                },
                Orbit::Median {
                    alpha: ctx.ratio(4, 5),
                    weight: ctx.one(),
                },
                Orbit::General {
                    alpha: ctx.ratio(1, 10),
                    beta: ctx.ratio(1, 5),
                    weight: ctx.one(),
                },
            ],
            64,
        );
        assert_eq!(twelve.point_count(), 12);

        let empty = SymmetricRule::new(vec![], 64);
        assert_eq!(empty.expand(&ctx).unwrap().len(), 0);
    }

    #[test]
    fn symmetry_image_counts_follow_stabilizers() {
        let ctx = ctx();
        let third = ctx.ratio(1, 3);
        let centroid = BaryPoint {
            a: third.clone(),
            b: third.clone(),
            c: third,
        };
        assert_eq!(symmetry_images(&centroid, &ctx).len(), 1);

        let median = BaryPoint::from_ab(ctx.ratio(2, 3), ctx.ratio(1, 6), &ctx);
        assert_eq!(symmetry_images(&median, &ctx).len(), 3);

        let generic = BaryPoint::from_ab(ctx.ratio(1, 10), ctx.ratio(1, 5), &ctx);
        assert_eq!(symmetry_images(&generic, &ctx).len(), 6);
    }

    #[test]
    fn map_to_physical_scales_weights_by_twice_the_area() {
        let ctx = ctx();
        let rule = SymmetricRule::new(
            vec![Orbit::Centroid {
                weight: ctx.ratio(1, 2),
            }],
            64,
        );
        let source = RuleSource {
            approach: Approach::Polynomial,
            n: 1,
            sequence: "poly2d d=1".into(),
            residual_max: None,
        };

        let unit = Triangle::from_f64([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &ctx);
        let phys = map_to_physical(&rule, &unit, source.clone(), &ctx).unwrap();
        assert_eq!(phys.len(), 1);
        let tol = ctx.pow10(-60);
        assert!((phys.points[0][0].clone() - ctx.ratio(1, 3)).abs() < tol);
        assert!((phys.weights[0].clone() - ctx.ratio(1, 2)).abs() < tol);

        let tripled = Triangle::from_f64([[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]], &ctx);
        let phys = map_to_physical(&rule, &tripled, source.clone(), &ctx).unwrap();
        assert!((phys.points[0][0].clone() - ctx.one()).abs() < tol);
        assert!((phys.weights[0].clone() - ctx.ratio(9, 2)).abs() < tol);

        let degenerate = Triangle::from_f64([[1.0, 1.0], [1.0, 1.0], [0.0, 3.0]], &ctx);
        assert!(matches!(
            map_to_physical(&rule, &degenerate, source, &ctx),
            Err(GeometryError::DegenerateDomain)
        ));
    }

    #[test]
    fn mapping_preserves_relative_weights() {
        let ctx = ctx();
        let rule = SymmetricRule::new(
            vec![
                Orbit::Centroid {
                    weight: ctx.ratio(9, 40),
                },
                Orbit::Median {
                    alpha: ctx.ratio(3, 5),
                    weight: ctx.ratio(25, 48),
                },
            ],
            64,
        );
        let tri = Triangle::from_f64([[0.2, -0.1], [1.7, 0.4], [0.3, 2.2]], &ctx);
        let source = RuleSource {
            approach: Approach::Polynomial,
            n: 4,
            sequence: "poly2d d=3".into(),
            residual_max: None,
        };
        let phys = map_to_physical(&rule, &tri, source, &ctx).unwrap();
        let before = ctx.ratio(9, 40) / ctx.ratio(25, 48);
        let after = phys.weights[0].clone() / &phys.weights[1];
        assert!((before - after).abs() < ctx.pow10(-60));
    }
}
