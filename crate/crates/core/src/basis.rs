//! Function sequences to be integrated exactly: monomials interleaved with
//! logarithmic singularities, in one and two dimensions.
//!
//! Two-dimensional functions live on the unit right triangle
//! {x, y >= 0, x + y <= 1}, with (x, y) identified with the first two
//! barycentric coordinates, so the built-in singular loci (the edge x = 0
//! and the corner at the origin) sit on boundary entities of the triangle.
//! One-dimensional functions live on [0, 1] with singularities at x = 0.
//!
//! The two log families are
//!
//! * edge: x^a ln(y - 1 + sqrt(x^2 + (y-1)^2)), singular along x = 0,
//! * corner: x^a ln(y + sqrt(x^2 + y^2)), singular at the origin,
//!
//! with the x-power `a` stored explicitly. Function groups collect either
//! one singularity or all symmetry-reduced monomials of one total degree;
//! rules integrate groups as prefixes of the sequence.

use crate::real::{Ctx, Real};
use rug::ops::Pow;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    One,
    Two,
}

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("singular evaluation of {tag} at ({point})")]
    SingularEvaluation { tag: String, point: String },
    #[error("{tag} is not defined for {dim:?}-dimensional arguments")]
    DimensionMismatch { tag: String, dim: Dim },
    #[error("function group index {nu} exceeds the built-in limit {max}")]
    GroupRange { nu: u32, max: u32 },
    #[error("custom function {name} provides no gradient")]
    MissingGradient { name: String },
}

/// Where a function is singular, expressed on its reference domain. The
/// certified integration oracles grade their subdivisions toward these loci.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularLocus {
    /// Smooth on the closed domain.
    None,
    /// 1-D: endpoint x = 0.
    Endpoint,
    /// 2-D: the edge x = 0.
    EdgeX0,
    /// 2-D: the corner at the origin.
    CornerOrigin,
}

type CustomEval = Arc<dyn Fn(&Ctx, &[Real]) -> Result<Real, BasisError> + Send + Sync>;
type CustomGrad = Arc<dyn Fn(&Ctx, &[Real]) -> Result<Vec<Real>, BasisError> + Send + Sync>;

/// How a custom function's reference integral is obtained.
#[derive(Clone)]
pub enum CustomIntegral {
    /// Exact value as a decimal string.
    Analytic(String),
    /// Defer to the numeric oracle, grading toward the declared locus.
    Oracle,
}

/// A user-supplied basis function. Identity (equality, table keys) is by
/// name, so names must be unique within a sequence.
#[derive(Clone)]
pub struct CustomFunction {
    pub name: String,
    pub dim: Dim,
    pub locus: SingularLocus,
    pub eval: CustomEval,
    pub gradient: Option<CustomGrad>,
    pub integral: CustomIntegral,
}

impl fmt::Debug for CustomFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFunction")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("locus", &self.locus)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum BasisFunction {
    /// x^k on [0, 1].
    Monomial1D { k: u32 },
    /// x^k ln x on [0, 1]; the value at x = 0 is the limit 0 for k >= 1.
    LogMono1D { k: u32 },
    /// x^p y^q on the reference triangle.
    Monomial2D { p: u32, q: u32 },
    /// x^xpow ln(y - 1 + sqrt(x^2 + (y-1)^2)), xpow >= 1.
    LogEdge2D { xpow: u32 },
    /// x^xpow ln(y + sqrt(x^2 + y^2)), xpow >= 1.
    LogCorner2D { xpow: u32 },
    Custom(Arc<CustomFunction>),
}

impl PartialEq for BasisFunction {
    fn eq(&self, other: &Self) -> bool {
        self.tag() == other.tag()
    }
}
impl Eq for BasisFunction {}

impl BasisFunction {
    /// Edge singularity by sequence index (odd i): x^i ln(y-1+sqrt(...)).
    pub fn log_edge_from_index(i: u32) -> Self {
        debug_assert!(i % 2 == 1, "edge singularities carry odd indices");
        BasisFunction::LogEdge2D { xpow: i }
    }

    /// Corner singularity by sequence index (even i): x^(i-1) ln(y+sqrt(...)).
    pub fn log_corner_from_index(i: u32) -> Self {
        debug_assert!(
            i % 2 == 0 && i >= 2,
            "corner singularities carry even indices"
        );
        BasisFunction::LogCorner2D { xpow: i - 1 }
    }

    pub fn dim(&self) -> Dim {
        match self {
            BasisFunction::Monomial1D { .. } | BasisFunction::LogMono1D { .. } => Dim::One,
            BasisFunction::Monomial2D { .. }
            | BasisFunction::LogEdge2D { .. }
            | BasisFunction::LogCorner2D { .. } => Dim::Two,
            BasisFunction::Custom(c) => c.dim,
        }
    }

    pub fn locus(&self) -> SingularLocus {
        match self {
            BasisFunction::Monomial1D { .. } | BasisFunction::Monomial2D { .. } => {
                SingularLocus::None
            }
            BasisFunction::LogMono1D { .. } => SingularLocus::Endpoint,
            BasisFunction::LogEdge2D { .. } => SingularLocus::EdgeX0,
            BasisFunction::LogCorner2D { .. } => SingularLocus::CornerOrigin,
            BasisFunction::Custom(c) => c.locus,
        }
    }

    /// Canonical identifier used for table keys and serialization.
    pub fn tag(&self) -> String {
        match self {
            BasisFunction::Monomial1D { k } => format!("mono1d {k}"),
            BasisFunction::LogMono1D { k } => format!("logmono1d {k}"),
            BasisFunction::Monomial2D { p, q } => format!("mono2d {p} {q}"),
            BasisFunction::LogEdge2D { xpow } => format!("logedge2d {xpow}"),
            BasisFunction::LogCorner2D { xpow } => format!("logcorner2d {xpow}"),
            BasisFunction::Custom(c) => format!("custom {}", c.name),
        }
    }

    /// Human-readable formula.
    pub fn describe(&self) -> String {
        match self {
            BasisFunction::Monomial1D { k: 0 } => "1".into(),
            BasisFunction::Monomial1D { k } => format!("x^{k}"),
            BasisFunction::LogMono1D { k } => format!("x^{k} ln x"),
            BasisFunction::Monomial2D { p: 0, q: 0 } => "1".into(),
            BasisFunction::Monomial2D { p, q } => match (p, q) {
                (p, 0) => format!("x^{p}"),
                (0, q) => format!("y^{q}"),
                (p, q) => format!("x^{p} y^{q}"),
            },
            BasisFunction::LogEdge2D { xpow } => {
                format!("x^{xpow} ln(y-1+sqrt(x^2+(y-1)^2))")
            }
            BasisFunction::LogCorner2D { xpow } => format!("x^{xpow} ln(y+sqrt(x^2+y^2))"),
            BasisFunction::Custom(c) => c.name.clone(),
        }
    }

    fn err_singular(&self, coords: &[&Real]) -> BasisError {
        BasisError::SingularEvaluation {
            tag: self.tag(),
            point: coords
                .iter()
                .map(|c| format!("{:.6e}", c.to_f64()))
                .collect::<Vec<_>>()
                .join(", "),
        }
    }

    /// Evaluate a 1-D function at x.
    pub fn eval_1d(&self, x: &Real, ctx: &Ctx) -> Result<Real, BasisError> {
        match self {
            BasisFunction::Monomial1D { k } => Ok(x.clone().pow(*k)),
            BasisFunction::LogMono1D { k } => {
                if x.is_zero() {
                    if *k >= 1 {
                        return Ok(ctx.zero()); // limit of x^k ln x
                    }
                    return Err(self.err_singular(&[x]));
                }
                if x.is_sign_negative() {
                    return Err(self.err_singular(&[x]));
                }
                Ok(x.clone().pow(*k) * x.clone().ln())
            }
            BasisFunction::Custom(c) if c.dim == Dim::One => {
                (c.eval)(ctx, std::slice::from_ref(x))
            }
            _ => Err(BasisError::DimensionMismatch {
                tag: self.tag(),
                dim: Dim::One,
            }),
        }
    }

    /// Derivative of a 1-D function at x (off singular loci).
    pub fn grad_1d(&self, x: &Real, ctx: &Ctx) -> Result<Real, BasisError> {
        match self {
            BasisFunction::Monomial1D { k } => {
                if *k == 0 {
                    return Ok(ctx.zero());
                }
                Ok(ctx.real(*k) * x.clone().pow(*k - 1))
            }
            BasisFunction::LogMono1D { k } => {
                if x.is_zero() || x.is_sign_negative() {
                    return Err(self.err_singular(&[x]));
                }
                // d/dx x^k ln x = k x^(k-1) ln x + x^(k-1)
                let xk1 = x.clone().pow(k.saturating_sub(1));
                Ok(ctx.real(*k) * &xk1 * x.clone().ln() + xk1)
            }
            BasisFunction::Custom(c) if c.dim == Dim::One => {
                let g = c
                    .gradient
                    .as_ref()
                    .ok_or_else(|| BasisError::MissingGradient {
                        name: c.name.clone(),
                    })?;
                let v = g(ctx, std::slice::from_ref(x))?;
                Ok(v[0].clone())
            }
            _ => Err(BasisError::DimensionMismatch {
                tag: self.tag(),
                dim: Dim::One,
            }),
        }
    }

    /// Evaluate a 2-D function at (x, y).
    pub fn eval_2d(&self, x: &Real, y: &Real, ctx: &Ctx) -> Result<Real, BasisError> {
        match self {
            BasisFunction::Monomial2D { p, q } => Ok(x.clone().pow(*p) * y.clone().pow(*q)),
            BasisFunction::LogEdge2D { xpow } => {
                let log_arg = edge_log_argument(x, y, ctx);
                if log_arg.is_zero() || log_arg.is_sign_negative() {
                    return Err(self.err_singular(&[x, y]));
                }
                Ok(x.clone().pow(*xpow) * log_arg.ln())
            }
            BasisFunction::LogCorner2D { xpow } => {
                let log_arg = corner_log_argument(x, y, ctx);
                if log_arg.is_zero() || log_arg.is_sign_negative() {
                    return Err(self.err_singular(&[x, y]));
                }
                Ok(x.clone().pow(*xpow) * log_arg.ln())
            }
            BasisFunction::Custom(c) if c.dim == Dim::Two => {
                (c.eval)(ctx, &[x.clone(), y.clone()])
            }
            _ => Err(BasisError::DimensionMismatch {
                tag: self.tag(),
                dim: Dim::Two,
            }),
        }
    }

    /// Analytic gradient of a 2-D function at (x, y), strictly off singular
    /// loci.
    pub fn grad_2d(&self, x: &Real, y: &Real, ctx: &Ctx) -> Result<[Real; 2], BasisError> {
        match self {
            BasisFunction::Monomial2D { p, q } => {
                let dx = if *p == 0 {
                    ctx.zero()
                } else {
                    ctx.real(*p) * x.clone().pow(*p - 1) * y.clone().pow(*q)
                };
                let dy = if *q == 0 {
                    ctx.zero()
                } else {
                    ctx.real(*q) * x.clone().pow(*p) * y.clone().pow(*q - 1)
                };
                Ok([dx, dy])
            }
            BasisFunction::LogEdge2D { xpow } => {
                let log_arg = edge_log_argument(x, y, ctx);
                if x.is_zero() || log_arg.is_zero() || log_arg.is_sign_negative() {
                    return Err(self.err_singular(&[x, y]));
                }
                let u = y.clone() - ctx.one();
                let r = (x.clone() * x + u.clone() * &u).sqrt();
                let ln_val = log_arg.ln();
                let xk1 = x.clone().pow(*xpow - 1);
                // d/dx [x^a L] = a x^(a-1) L + x^(a-1) (r - u)/r, using
                // (u + r)(r - u) = x^2 to avoid the cancellation in u + r
                let dx = ctx.real(*xpow) * &xk1 * &ln_val + xk1.clone() * (r.clone() - &u) / &r;
                let dy = x.clone().pow(*xpow) / r;
                Ok([dx, dy])
            }
            BasisFunction::LogCorner2D { xpow } => {
                let log_arg = corner_log_argument(x, y, ctx);
                if x.is_zero() || log_arg.is_zero() || log_arg.is_sign_negative() {
                    return Err(self.err_singular(&[x, y]));
                }
                let r = (x.clone() * x + y.clone() * y).sqrt();
                let ln_val = log_arg.ln();
                let xk1 = x.clone().pow(*xpow - 1);
                let dx = ctx.real(*xpow) * &xk1 * &ln_val + xk1.clone() * (r.clone() - y) / &r;
                let dy = x.clone().pow(*xpow) / r;
                Ok([dx, dy])
            }
            BasisFunction::Custom(c) if c.dim == Dim::Two => {
                let g = c
                    .gradient
                    .as_ref()
                    .ok_or_else(|| BasisError::MissingGradient {
                        name: c.name.clone(),
                    })?;
                let v = g(ctx, &[x.clone(), y.clone()])?;
                Ok([v[0].clone(), v[1].clone()])
            }
            _ => Err(BasisError::DimensionMismatch {
                tag: self.tag(),
                dim: Dim::Two,
            }),
        }
    }
}

/// y - 1 + sqrt(x^2 + (y-1)^2), computed as x^2 / (sqrt(..) - (y-1)) when
/// y < 1 to avoid catastrophic cancellation near the singular edge.
fn edge_log_argument(x: &Real, y: &Real, ctx: &Ctx) -> Real {
    let u = y.clone() - ctx.one();
    let r = (x.clone() * x + u.clone() * &u).sqrt();
    if u.is_sign_negative() && !u.is_zero() {
        if x.is_zero() {
            return ctx.zero();
        }
        x.clone() * x / (r - u)
    } else {
        u + r
    }
}

/// y + sqrt(x^2 + y^2), with the same stabilization for y < 0.
fn corner_log_argument(x: &Real, y: &Real, ctx: &Ctx) -> Real {
    let r = (x.clone() * x + y.clone() * y).sqrt();
    if y.is_sign_negative() && !y.is_zero() {
        if x.is_zero() {
            return ctx.zero();
        }
        x.clone() * x / (r - y.clone())
    } else {
        y.clone() + r
    }
}

/// One function group: either a single singularity or all symmetry-reduced
/// monomials of one total degree.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionGroup {
    pub index: u32,
    pub members: Vec<BasisFunction>,
    /// Maximum polynomial degree integrated once this group is included.
    pub d_after: u32,
    /// Number of singular functions included through this group.
    pub ms_after: u32,
}

/// An ordered, prefix-closed sequence of function groups.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSequence {
    pub groups: Vec<FunctionGroup>,
    pub dim: Dim,
}

impl GroupSequence {
    pub fn functions(&self) -> impl Iterator<Item = &BasisFunction> {
        self.groups.iter().flat_map(|g| g.members.iter())
    }

    pub fn function_count(&self) -> usize {
        self.groups.iter().map(|g| g.members.len()).sum()
    }

    pub fn max_index(&self) -> Option<u32> {
        self.groups.last().map(|g| g.index)
    }

    /// The subsequence of groups with index <= nu.
    pub fn prefix(&self, nu: u32) -> GroupSequence {
        GroupSequence {
            groups: self
                .groups
                .iter()
                .filter(|g| g.index <= nu)
                .cloned()
                .collect(),
            dim: self.dim,
        }
    }
}

/// Symmetry-reduced monomials of total degree exactly `degree`:
/// one representative x^p y^q with p >= q per swap pair, p descending.
pub fn monomial_group_members_2d(degree: u32) -> Vec<BasisFunction> {
    let mut members = Vec::new();
    let mut p = degree;
    loop {
        let q = degree - p;
        if p < q {
            break;
        }
        members.push(BasisFunction::Monomial2D { p, q });
        if p == 0 {
            break;
        }
        p -= 1;
    }
    members
}

/// The symmetry-reduced monomial sequence through total degree `d`,
/// ordered by degree then descending leading power. Its length is
/// floor((d+2)^2 / 4).
pub fn monomial_sequence_2d(d: u32) -> Vec<BasisFunction> {
    (0..=d).flat_map(monomial_group_members_2d).collect()
}

/// Monomial-only group sequence through degree `d`; group index = degree.
pub fn polynomial_groups_2d(d: u32) -> GroupSequence {
    let groups = (0..=d)
        .map(|degree| FunctionGroup {
            index: degree,
            members: monomial_group_members_2d(degree),
            d_after: degree,
            ms_after: 0,
        })
        .collect();
    GroupSequence {
        groups,
        dim: Dim::Two,
    }
}

/// Largest group index the built-in 2-D sequence generator accepts.
pub const MAX_BUILTIN_GROUP: u32 = 63;

/// The built-in 2-D sequence: monomial degree groups interleaved with
/// edge/corner log singularities whose x-power matches the preceding odd
/// degree. Blocks of four groups follow the pattern
/// (degree 2m, degree 2m+1, edge x^(2m+1), corner x^(2m+1)).
pub fn build_group_sequence_2d(nu_max: u32) -> Result<GroupSequence, BasisError> {
    if nu_max > MAX_BUILTIN_GROUP {
        return Err(BasisError::GroupRange {
            nu: nu_max,
            max: MAX_BUILTIN_GROUP,
        });
    }
    let mut groups = Vec::with_capacity(nu_max as usize + 1);
    let mut d_after = 0;
    let mut ms_after = 0;
    for nu in 0..=nu_max {
        let block = nu / 4;
        let members = match nu % 4 {
            0 => {
                d_after = 2 * block;
                monomial_group_members_2d(d_after)
            }
            1 => {
                d_after = 2 * block + 1;
                monomial_group_members_2d(d_after)
            }
            2 => {
                ms_after += 1;
                vec![BasisFunction::LogEdge2D {
                    xpow: 2 * block + 1,
                }]
            }
            _ => {
                ms_after += 1;
                vec![BasisFunction::LogCorner2D {
                    xpow: 2 * block + 1,
                }]
            }
        };
        groups.push(FunctionGroup {
            index: nu,
            members,
            d_after,
            ms_after,
        });
    }
    Ok(GroupSequence {
        groups,
        dim: Dim::Two,
    })
}

/// First 2 n' functions of the cumulative 1-D sequence
/// {1, x, x ln x, x^2, x^3, x^3 ln x, x^4, x^5, x^5 ln x, ...}.
pub fn build_sequence_1d(n_prime: usize) -> Vec<BasisFunction> {
    let want = 2 * n_prime;
    let mut seq = vec![
        BasisFunction::Monomial1D { k: 0 },
        BasisFunction::Monomial1D { k: 1 },
        BasisFunction::LogMono1D { k: 1 },
    ];
    let mut i = 1;
    while seq.len() < want {
        seq.push(BasisFunction::Monomial1D { k: 2 * i });
        seq.push(BasisFunction::Monomial1D { k: 2 * i + 1 });
        seq.push(BasisFunction::LogMono1D { k: 2 * i + 1 });
        i += 1;
    }
    seq.truncate(want);
    seq
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Ctx {
        Ctx::from_digits(64)
    }

    #[test]
    fn monomial_sequence_sizes_follow_floor_formula() {
        for d in 0..=30u32 {
            let expected = ((d + 2) * (d + 2) / 4) as usize;
            assert_eq!(monomial_sequence_2d(d).len(), expected, "d={d}");
        }
    }

    #[test]
    fn monomial_sequence_degree_three_matches_reduced_set() {
        let seq = monomial_sequence_2d(3);
        let tags: Vec<String> = seq.iter().map(|f| f.describe()).collect();
        assert_eq!(tags, vec!["1", "x^1", "x^2", "x^1 y^1", "x^3", "x^2 y^1"]);
        assert_eq!(monomial_sequence_2d(0).len(), 1);
        assert_eq!(monomial_sequence_2d(2).len(), 4);
    }

    #[test]
    fn builtin_group_sequence_reproduces_the_interleaving() {
        let seq = build_group_sequence_2d(20).unwrap();
        assert_eq!(seq.groups.len(), 21);

        // group sizes per index
        let sizes: Vec<usize> = seq.groups.iter().map(|g| g.members.len()).collect();
        assert_eq!(
            sizes,
            vec![1, 1, 1, 1, 2, 2, 1, 1, 3, 3, 1, 1, 4, 4, 1, 1, 5, 5, 1, 1, 6]
        );

        // selected rows
        assert_eq!(seq.groups[0].members[0].describe(), "1");
        assert_eq!(seq.groups[2].members[0].tag(), "logedge2d 1");
        assert_eq!(seq.groups[3].members[0].tag(), "logcorner2d 1");
        assert_eq!(
            seq.groups[4]
                .members
                .iter()
                .map(|f| f.describe())
                .collect::<Vec<_>>(),
            vec!["x^2", "x^1 y^1"]
        );
        assert_eq!(seq.groups[4].d_after, 2);
        assert_eq!(seq.groups[4].ms_after, 2);
        assert_eq!(seq.groups[10].members[0].tag(), "logedge2d 5");
        assert_eq!(seq.groups[11].members[0].tag(), "logcorner2d 5");
        assert_eq!(seq.groups[19].members[0].tag(), "logcorner2d 9");
        assert_eq!(seq.groups[20].members.len(), 6);
        assert_eq!(seq.groups[20].d_after, 10);
        assert_eq!(seq.groups[20].ms_after, 10);

        // cumulative function counts
        assert_eq!(seq.prefix(7).function_count(), 10);
        assert_eq!(seq.prefix(11).function_count(), 18);
        assert_eq!(seq.prefix(20).function_count(), 46);

        assert!(build_group_sequence_2d(MAX_BUILTIN_GROUP + 1).is_err());
    }

    #[test]
    fn group_sequences_are_prefix_consistent() {
        for k in 0..16 {
            let small = build_group_sequence_2d(k).unwrap();
            let big = build_group_sequence_2d(k + 1).unwrap();
            assert_eq!(small.groups[..], big.groups[..small.groups.len()]);
        }
    }

    #[test]
    fn one_dimensional_sequence_matches_cumulative_table() {
        let descr =
            |n: usize| -> Vec<String> { build_sequence_1d(n).iter().map(|f| f.describe()).collect() };
        assert_eq!(descr(1), vec!["1", "x^1"]);
        assert_eq!(descr(2), vec!["1", "x^1", "x^1 ln x", "x^2"]);
        assert_eq!(
            descr(3),
            vec!["1", "x^1", "x^1 ln x", "x^2", "x^3", "x^3 ln x"]
        );
        assert_eq!(
            descr(6),
            vec![
                "1",
                "x^1",
                "x^1 ln x",
                "x^2",
                "x^3",
                "x^3 ln x",
                "x^4",
                "x^5",
                "x^5 ln x",
                "x^6",
                "x^7",
                "x^7 ln x"
            ]
        );
    }

    #[test]
    fn evaluation_special_values() {
        let ctx = ctx();
        let f = BasisFunction::LogMono1D { k: 1 };
        assert_eq!(f.eval_1d(&ctx.one(), &ctx).unwrap(), ctx.zero()); // ln 1 = 0
        assert_eq!(f.eval_1d(&ctx.zero(), &ctx).unwrap(), ctx.zero()); // limit

        let f0 = BasisFunction::LogMono1D { k: 0 };
        assert!(f0.eval_1d(&ctx.zero(), &ctx).is_err());

        let m = BasisFunction::Monomial2D { p: 2, q: 1 };
        let half = ctx.ratio(1, 2);
        let v = m.eval_2d(&half, &half, &ctx).unwrap();
        assert!((v - ctx.ratio(1, 8)).abs() < ctx.pow10(-60));

        // corner log on the axis x = 0, y = 1/2: ln(2y) = ln 1 = 0
        let c = BasisFunction::LogCorner2D { xpow: 1 };
        let v = c.eval_2d(&ctx.zero(), &half, &ctx).unwrap();
        assert!(v.is_zero());

        // at the origin the corner function is singular
        assert!(c.eval_2d(&ctx.zero(), &ctx.zero(), &ctx).is_err());

        // the edge function is singular anywhere on x = 0 below y = 1
        let e = BasisFunction::LogEdge2D { xpow: 1 };
        assert!(e.eval_2d(&ctx.zero(), &half, &ctx).is_err());
        assert!(e.eval_2d(&half, &half, &ctx).is_ok());
    }

    #[test]
    fn gradient_matches_power_rule_examples() {
        let ctx = ctx();
        let m = BasisFunction::Monomial2D { p: 2, q: 1 };
        let half = ctx.ratio(1, 2);
        let [dx, dy] = m.grad_2d(&half, &half, &ctx).unwrap();
        assert!((dx - ctx.ratio(1, 2)).abs() < ctx.pow10(-60));
        assert!((dy - ctx.ratio(1, 4)).abs() < ctx.pow10(-60));

        let m1 = BasisFunction::Monomial1D { k: 3 };
        let d = m1.grad_1d(&ctx.real(2), &ctx).unwrap();
        assert!((d - ctx.real(12)).abs() < ctx.pow10(-60));

        let lm = BasisFunction::LogMono1D { k: 1 };
        let d = lm.grad_1d(&ctx.one(), &ctx).unwrap();
        assert!((d - ctx.one()).abs() < ctx.pow10(-60)); // ln 1 + 1
    }

    #[test]
    fn gradients_match_central_differences_on_grid() {
        let ctx = ctx();
        let step = ctx.pow10(-32);
        let rel_tol = ctx.pow10(-20);
        let fns = [
            BasisFunction::Monomial2D { p: 3, q: 2 },
            BasisFunction::LogEdge2D { xpow: 1 },
            BasisFunction::LogEdge2D { xpow: 3 },
            BasisFunction::LogCorner2D { xpow: 1 },
            BasisFunction::LogCorner2D { xpow: 5 },
        ];
        let grid = [(0.17, 0.23), (0.41, 0.11), (0.05, 0.83), (0.33, 0.33)];
        for f in &fns {
            for (gx, gy) in grid {
                let x = ctx.real(gx);
                let y = ctx.real(gy);
                let [dx, dy] = f.grad_2d(&x, &y, &ctx).unwrap();
                let fd_x = (f.eval_2d(&(x.clone() + &step), &y, &ctx).unwrap()
                    - f.eval_2d(&(x.clone() - &step), &y, &ctx).unwrap())
                    / (ctx.real(2) * &step);
                let fd_y = (f.eval_2d(&x, &(y.clone() + &step), &ctx).unwrap()
                    - f.eval_2d(&x, &(y.clone() - &step), &ctx).unwrap())
                    / (ctx.real(2) * &step);
                let scale_x = dx.clone().abs() + ctx.pow10(-40);
                let scale_y = dy.clone().abs() + ctx.pow10(-40);
                assert!(
                    ((dx - fd_x).abs() / scale_x) < rel_tol,
                    "df/dx mismatch for {} at ({gx}, {gy})",
                    f.tag()
                );
                assert!(
                    ((dy - fd_y).abs() / scale_y) < rel_tol,
                    "df/dy mismatch for {} at ({gx}, {gy})",
                    f.tag()
                );
            }
        }

        // 1-D families
        let fns1 = [
            BasisFunction::Monomial1D { k: 4 },
            BasisFunction::LogMono1D { k: 1 },
            BasisFunction::LogMono1D { k: 7 },
        ];
        for f in &fns1 {
            for gx in [0.07, 0.31, 0.64, 0.93] {
                let x = ctx.real(gx);
                let d = f.grad_1d(&x, &ctx).unwrap();
                let fd = (f.eval_1d(&(x.clone() + &step), &ctx).unwrap()
                    - f.eval_1d(&(x.clone() - &step), &ctx).unwrap())
                    / (ctx.real(2) * &step);
                let scale = d.clone().abs() + ctx.pow10(-40);
                assert!(((d - fd).abs() / scale) < rel_tol, "{} at {gx}", f.tag());
            }
        }
    }

    #[test]
    fn stable_log_argument_form_agrees_with_direct_evaluation() {
        let ctx = ctx();
        // direct form at generous precision vs stable form at working precision
        let wide = Ctx::from_digits(200);
        for (fx, fy) in [(1e-8, 0.3), (1e-4, 0.9), (0.2, 0.4)] {
            let stable = edge_log_argument(&ctx.real(fx), &ctx.real(fy), &ctx);
            let xw = wide.real(fx);
            let yw = wide.real(fy);
            let u = yw.clone() - wide.one();
            let direct = u.clone() + (xw.clone() * &xw + u.clone() * &u).sqrt();
            let rel = ((ctx.real(direct) - &stable) / &stable).abs();
            assert!(rel < ctx.pow10(-58), "x={fx} y={fy} rel={rel}");
        }
    }
}
