//! Certified reference integrals over the reference domains.
//!
//! Every basis function needs the exact value of its integral over [0, 1]
//! (1-D) or the unit right triangle (2-D). Monomials and log-monomials have
//! closed forms. The 2-D log singularities are integrated numerically by two
//! independent routes:
//!
//! * the table builder integrates the inner (y) variable in closed form and
//!   feeds the resulting 1-D integrand to a graded-panel oracle;
//! * [`oracle_integrate_2d`] integrates the raw 2-D function over a
//!   square-mapped tensor grid, grading toward the declared singular locus.
//!
//! Both routes certify themselves by doubling the subdivision depth until
//! two successive results agree to the requested digit count; disagreement
//! is an error, never a silent loss of digits.

use crate::basis::{BasisError, BasisFunction, CustomIntegral, Dim, SingularLocus};
use crate::gauss::gauss_legendre_01;
use crate::geometry::Triangle;
use crate::real::{Ctx, Real};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntegralError {
    #[error("oracle failed to certify {target} digits for {tag} (achieved {achieved})")]
    PrecisionFailure {
        tag: String,
        target: u32,
        achieved: u32,
    },
    #[error(transparent)]
    Eval(#[from] BasisError),
    #[error("integral table has no entry for {tag}")]
    MissingEntry { tag: String },
    #[error("malformed table record at line {line}: {text}")]
    MalformedRecord { line: usize, text: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Numeric,
}

impl Provenance {
    fn tag(&self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::Numeric => "numeric",
        }
    }

    fn from_tag(s: &str) -> Option<Self> {
        match s {
            "analytic" => Some(Provenance::Analytic),
            "numeric" => Some(Provenance::Numeric),
            _ => None,
        }
    }
}

/// A reference-integral value with its certification.
#[derive(Debug, Clone)]
pub struct TableEntry {
    pub value: Real,
    pub provenance: Provenance,
    pub certified_digits: u32,
}

/// A self-certified numeric integral.
#[derive(Debug, Clone)]
pub struct Certified {
    pub value: Real,
    pub certified_digits: u32,
    /// Gap between the two agreeing refinement levels, relative.
    pub gap: Real,
}

/// Which interval ends a graded subdivision clusters toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Grading {
    pub toward_lo: bool,
    pub toward_hi: bool,
}

impl Grading {
    pub fn none() -> Self {
        Grading::default()
    }

    pub fn lo() -> Self {
        Grading {
            toward_lo: true,
            toward_hi: false,
        }
    }

    pub fn hi() -> Self {
        Grading {
            toward_lo: false,
            toward_hi: true,
        }
    }
}

/// Panel boundaries on [a, b]. Graded ends receive a geometric cascade with
/// ratio 1/4 per level; ungraded intervals are split uniformly.
fn graded_panels(a: &Real, b: &Real, grading: Grading, levels: u32, ctx: &Ctx) -> Vec<(Real, Real)> {
    use rug::ops::Pow;
    let length = b.clone() - a;
    let quarter_pow = |j: u32| ctx.real(4).pow(j as i32 - levels as i32);
    let mut cuts: Vec<Real> = Vec::new();
    cuts.push(a.clone());
    match (grading.toward_lo, grading.toward_hi) {
        (false, false) => {
            let n = levels.max(1);
            for j in 1..n {
                cuts.push(a.clone() + length.clone() * ctx.real(j) / ctx.real(n));
            }
        }
        (true, false) => {
            for j in 0..levels {
                cuts.push(a.clone() + length.clone() * quarter_pow(j));
            }
        }
        (false, true) => {
            for j in (0..levels).rev() {
                cuts.push(b.clone() - length.clone() * quarter_pow(j));
            }
        }
        (true, true) => {
            let mid = a.clone() + length.clone() / ctx.real(2);
            let half = length.clone() / ctx.real(2);
            for j in 0..levels {
                cuts.push(a.clone() + half.clone() * quarter_pow(j));
            }
            cuts.push(mid);
            for j in (0..levels).rev() {
                cuts.push(b.clone() - half.clone() * quarter_pow(j));
            }
        }
    }
    cuts.push(b.clone());
    cuts.windows(2)
        .filter(|w| w[0] < w[1])
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect()
}

fn sum_over_panels<F>(
    f: &F,
    panels: &[(Real, Real)],
    nodes: &[Real],
    weights: &[Real],
    ctx: &Ctx,
) -> Result<Real, IntegralError>
where
    F: Fn(&Real) -> Result<Real, IntegralError>,
{
    let mut acc = ctx.zero();
    for (lo, hi) in panels {
        let h = hi.clone() - lo;
        let mut panel_acc = ctx.zero();
        for (node, weight) in nodes.iter().zip(weights) {
            let x = lo.clone() + h.clone() * node;
            panel_acc += weight.clone() * f(&x)?;
        }
        acc += panel_acc * h;
    }
    Ok(acc)
}

fn certify(
    tag: &str,
    target_digits: u32,
    mut run: impl FnMut(u32) -> Result<Real, IntegralError>,
    levels0: u32,
    ctx: &Ctx,
) -> Result<Certified, IntegralError> {
    let tol = ctx.pow10(-(target_digits as i32));
    let mut levels = levels0;
    let mut prev = run(levels)?;
    let mut best_gap = ctx.real(f64::INFINITY);
    for _ in 0..3 {
        levels *= 2;
        let next = run(levels)?;
        let scale = {
            let mag = next.clone().abs();
            if mag > ctx.pow10(-(target_digits as i32 / 2)) {
                mag
            } else {
                ctx.one()
            }
        };
        let gap = (next.clone() - &prev).abs() / scale;
        if gap <= tol {
            let achieved = if gap.is_zero() {
                ctx.digits()
            } else {
                (-gap.clone().log10().to_f64()).floor() as u32
            };
            return Ok(Certified {
                value: next,
                certified_digits: achieved.min(ctx.digits()),
                gap,
            });
        }
        best_gap = gap;
        prev = next;
    }
    let achieved = if best_gap.is_zero() {
        ctx.digits()
    } else {
        (-best_gap.log10().to_f64()).floor().max(0.0) as u32
    };
    Err(IntegralError::PrecisionFailure {
        tag: tag.to_owned(),
        target: target_digits,
        achieved,
    })
}

fn base_levels(target_digits: u32, graded: bool) -> u32 {
    if graded {
        // truncation sliver shrinks like 4^(-2L) for integrands vanishing
        // at least linearly at the graded end
        (target_digits as f64 / 1.2).ceil() as u32 + 6
    } else {
        4
    }
}

fn panel_nodes(target_digits: u32) -> usize {
    target_digits as usize + 8
}

/// Integrate f over [a, b] with a self-certified graded-panel scheme.
///
/// Grading must point at every endpoint where f (or a derivative) is
/// singular; f itself must be finite on the open interval.
pub fn oracle_integrate_1d<F>(
    f: F,
    a: &Real,
    b: &Real,
    grading: Grading,
    target_digits: u32,
) -> Result<Certified, IntegralError>
where
    F: Fn(&Ctx, &Real) -> Result<Real, IntegralError>,
{
    let ctx = Ctx::from_digits(target_digits + 16);
    let (nodes, weights) = gauss_legendre_01(panel_nodes(target_digits), &ctx);
    let graded = grading.toward_lo || grading.toward_hi;
    let eval = |x: &Real| f(&ctx, x);
    certify(
        "1d-oracle",
        target_digits,
        |levels| {
            let panels = graded_panels(a, b, grading, levels, &ctx);
            sum_over_panels(&eval, &panels, &nodes, &weights, &ctx)
        },
        base_levels(target_digits, graded),
        &ctx,
    )
}

/// Integrate a 2-D function over an arbitrary triangle with a self-certified
/// graded tensor scheme.
///
/// The triangle is mapped affinely onto the reference triangle and then onto
/// the unit square via x = (1 - y) u; `locus` (given in reference
/// coordinates) decides which square edges the panels grade toward.
/// Singularities must be confined to the domain boundary.
pub fn oracle_integrate_2d<F>(
    f: F,
    locus: SingularLocus,
    tri: &Triangle,
    target_digits: u32,
) -> Result<Certified, IntegralError>
where
    F: Fn(&Ctx, &Real, &Real) -> Result<Real, IntegralError>,
{
    let ctx = Ctx::from_digits(target_digits + 16);
    let (nodes, weights) = gauss_legendre_01(panel_nodes(target_digits), &ctx);
    let (grade_u, grade_y) = match locus {
        SingularLocus::None => (Grading::none(), Grading::none()),
        SingularLocus::Endpoint => (Grading::lo(), Grading::none()),
        SingularLocus::EdgeX0 => (Grading::lo(), Grading::hi()),
        SingularLocus::CornerOrigin => (Grading::lo(), Grading::lo()),
    };
    let graded = !matches!(locus, SingularLocus::None);
    // affine scale: reference triangle has area 1/2
    let scale = ctx.real(2) * tri.area(&ctx);
    let [v1, v2, v3] = &tri.vertices;
    let zero = ctx.zero();
    let one = ctx.one();
    certify(
        "2d-oracle",
        target_digits,
        |levels| {
            let u_panels = graded_panels(&zero, &one, grade_u, levels, &ctx);
            let y_panels = graded_panels(&zero, &one, grade_y, levels, &ctx);
            let mut acc = ctx.zero();
            for (ylo, yhi) in &y_panels {
                let hy = yhi.clone() - ylo;
                for (ynode, yweight) in nodes.iter().zip(&weights) {
                    let y = ylo.clone() + hy.clone() * ynode;
                    let jac = one.clone() - &y;
                    let mut row = ctx.zero();
                    for (ulo, uhi) in &u_panels {
                        let hu = uhi.clone() - ulo;
                        let mut panel = ctx.zero();
                        for (unode, uweight) in nodes.iter().zip(&weights) {
                            let u = ulo.clone() + hu.clone() * unode;
                            let x = jac.clone() * &u;
                            // reference -> physical
                            let px = x.clone() * &v1[0] + y.clone() * &v2[0]
                                + (one.clone() - &x - &y) * &v3[0];
                            let py = x.clone() * &v1[1] + y.clone() * &v2[1]
                                + (one.clone() - &x - &y) * &v3[1];
                            panel += uweight.clone() * f(&ctx, &px, &py)?;
                        }
                        row += panel * hu;
                    }
                    acc += yweight.clone() * &jac * row * &hy;
                }
            }
            Ok(acc * &scale)
        },
        base_levels(target_digits, graded),
        &ctx,
    )
}

/// Closed-form inner integral of the edge-log family:
/// int_0^(1-x) ln(y - 1 + sqrt(x^2 + (y-1)^2)) dy, written in a form free of
/// cancellation near x = 0. Multiplying by x^a gives the 1-D integrand whose
/// integral over [0, 1] is the triangle integral of x^a ln(...).
fn edge_inner_closed_form(x: &Real, ctx: &Ctx) -> Real {
    // antiderivative of ln(u + sqrt(u^2 + x^2)) is
    // u ln(u + sqrt(u^2 + x^2)) - sqrt(u^2 + x^2); evaluate from u = -1 to -x.
    let x2 = x.clone() * x;
    let sqrt1px2 = (ctx.one() + &x2).sqrt();
    let ln_x = x.clone().ln();
    let sqrt2m1 = ctx.real(2).sqrt() - ctx.one();
    // ln(sqrt(1+x^2) - 1) = 2 ln x - ln(sqrt(1+x^2) + 1)
    let ln_low = ctx.real(2) * &ln_x - (sqrt1px2.clone() + ctx.one()).ln();
    -(x.clone() * (ln_x + sqrt2m1.ln())) - ctx.real(2).sqrt() * x + ln_low + sqrt1px2
}

/// Closed-form inner integral of the corner-log family:
/// int_0^(1-x) ln(y + sqrt(x^2 + y^2)) dy. Analytic on [0, 1].
fn corner_inner_closed_form(x: &Real, ctx: &Ctx) -> Real {
    let one_minus_x = ctx.one() - x.clone();
    let s = (one_minus_x.clone() * &one_minus_x + x.clone() * x).sqrt();
    one_minus_x.clone() * (one_minus_x + &s).ln() - s + x.clone()
}

/// Reference integral by the fast route: analytic where closed forms exist,
/// else the closed-form inner integral composed with the 1-D graded oracle.
pub fn integrate_reference(
    f: &BasisFunction,
    precision_digits: u32,
    target_digits: u32,
) -> Result<TableEntry, IntegralError> {
    let ctx = Ctx::from_digits(precision_digits);
    match f {
        BasisFunction::Monomial1D { k } => Ok(TableEntry {
            value: ctx.ratio(1, *k as i64 + 1),
            provenance: Provenance::Analytic,
            certified_digits: precision_digits,
        }),
        BasisFunction::LogMono1D { k } => {
            let kp1 = *k as i64 + 1;
            Ok(TableEntry {
                value: ctx.ratio(-1, kp1 * kp1),
                provenance: Provenance::Analytic,
                certified_digits: precision_digits,
            })
        }
        BasisFunction::Monomial2D { p, q } => {
            // p! q! / (p + q + 2)!
            let num = rug::Integer::from(rug::Integer::factorial(*p))
                * rug::Integer::from(rug::Integer::factorial(*q));
            let den = rug::Integer::from(rug::Integer::factorial(p + q + 2));
            Ok(TableEntry {
                value: ctx.real(num) / ctx.real(den),
                provenance: Provenance::Analytic,
                certified_digits: precision_digits,
            })
        }
        BasisFunction::LogEdge2D { xpow } => {
            let a = *xpow;
            let certified = oracle_integrate_1d(
                move |c: &Ctx, x: &Real| {
                    use rug::ops::Pow;
                    Ok(x.clone().pow(a) * edge_inner_closed_form(x, c))
                },
                &ctx.zero(),
                &ctx.one(),
                Grading::lo(),
                target_digits,
            )?;
            Ok(TableEntry {
                value: ctx.real(certified.value),
                provenance: Provenance::Numeric,
                certified_digits: certified.certified_digits,
            })
        }
        BasisFunction::LogCorner2D { xpow } => {
            let a = *xpow;
            let certified = oracle_integrate_1d(
                move |c: &Ctx, x: &Real| {
                    use rug::ops::Pow;
                    Ok(x.clone().pow(a) * corner_inner_closed_form(x, c))
                },
                &ctx.zero(),
                &ctx.one(),
                Grading::lo(),
                target_digits,
            )?;
            Ok(TableEntry {
                value: ctx.real(certified.value),
                provenance: Provenance::Numeric,
                certified_digits: certified.certified_digits,
            })
        }
        BasisFunction::Custom(c) => match &c.integral {
            CustomIntegral::Analytic(text) => {
                let value = ctx.parse(text).map_err(|_| IntegralError::MalformedRecord {
                    line: 0,
                    text: text.clone(),
                })?;
                Ok(TableEntry {
                    value,
                    provenance: Provenance::Analytic,
                    certified_digits: precision_digits,
                })
            }
            CustomIntegral::Oracle => {
                let certified = match c.dim {
                    Dim::One => {
                        let eval = c.eval.clone();
                        let grading = if c.locus == SingularLocus::Endpoint {
                            Grading::lo()
                        } else {
                            Grading::none()
                        };
                        let guard = Ctx::from_digits(target_digits + 16);
                        oracle_integrate_1d(
                            move |cc: &Ctx, x: &Real| Ok(eval(cc, std::slice::from_ref(x))?),
                            &guard.zero(),
                            &guard.one(),
                            grading,
                            target_digits,
                        )?
                    }
                    Dim::Two => {
                        let eval = c.eval.clone();
                        oracle_integrate_2d(
                            move |cc: &Ctx, x: &Real, y: &Real| {
                                Ok(eval(cc, &[x.clone(), y.clone()])?)
                            },
                            c.locus,
                            &Triangle::reference(&ctx),
                            target_digits,
                        )?
                    }
                };
                Ok(TableEntry {
                    value: ctx.real(certified.value),
                    provenance: Provenance::Numeric,
                    certified_digits: certified.certified_digits,
                })
            }
        },
    }
}

/// High-precision reference integrals of a set of basis functions, keyed by
/// canonical tag. Deterministic: identical inputs rebuild identical tables.
#[derive(Debug, Clone)]
pub struct IntegralTable {
    pub precision_digits: u32,
    pub target_digits: u32,
    entries: BTreeMap<String, TableEntry>,
}

impl IntegralTable {
    pub fn new(precision_digits: u32, target_digits: u32) -> Self {
        IntegralTable {
            precision_digits,
            target_digits,
            entries: BTreeMap::new(),
        }
    }

    /// Build a table covering `functions`.
    pub fn build<'a>(
        functions: impl IntoIterator<Item = &'a BasisFunction>,
        precision_digits: u32,
        target_digits: u32,
    ) -> Result<Self, IntegralError> {
        let mut table = IntegralTable::new(precision_digits, target_digits);
        table.ensure(functions)?;
        Ok(table)
    }

    /// Compute any entries not yet present.
    pub fn ensure<'a>(
        &mut self,
        functions: impl IntoIterator<Item = &'a BasisFunction>,
    ) -> Result<(), IntegralError> {
        for f in functions {
            let tag = f.tag();
            if !self.entries.contains_key(&tag) {
                let entry = integrate_reference(f, self.precision_digits, self.target_digits)?;
                self.entries.insert(tag, entry);
            }
        }
        Ok(())
    }

    pub fn get(&self, f: &BasisFunction) -> Result<&TableEntry, IntegralError> {
        self.entries
            .get(&f.tag())
            .ok_or_else(|| IntegralError::MissingEntry { tag: f.tag() })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &TableEntry)> {
        self.entries.iter()
    }

    /// Write the cache format: one record per line,
    /// `tag params.. provenance precision value certified_digits`.
    pub fn save<W: Write>(&self, mut w: W) -> Result<(), IntegralError> {
        let ctx = Ctx::from_digits(self.precision_digits);
        for (tag, entry) in &self.entries {
            writeln!(
                w,
                "{} {} {} {} {}",
                tag,
                entry.provenance.tag(),
                self.precision_digits,
                ctx.render(&entry.value),
                entry.certified_digits
            )?;
        }
        Ok(())
    }

    /// Read records produced by [`save`](Self::save). Entries recorded at a
    /// different precision are ignored so they will be recomputed.
    pub fn load<R: BufRead>(&mut self, r: R) -> Result<usize, IntegralError> {
        let ctx = Ctx::from_digits(self.precision_digits);
        let mut merged = 0;
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = text.split_whitespace().collect();
            if fields.len() < 5 {
                return Err(IntegralError::MalformedRecord {
                    line: idx + 1,
                    text: text.to_owned(),
                });
            }
            let certified: u32 = fields[fields.len() - 1].parse().map_err(|_| {
                IntegralError::MalformedRecord {
                    line: idx + 1,
                    text: text.to_owned(),
                }
            })?;
            let value = ctx.parse(fields[fields.len() - 2]).map_err(|_| {
                IntegralError::MalformedRecord {
                    line: idx + 1,
                    text: text.to_owned(),
                }
            })?;
            let precision: u32 = fields[fields.len() - 3].parse().map_err(|_| {
                IntegralError::MalformedRecord {
                    line: idx + 1,
                    text: text.to_owned(),
                }
            })?;
            let provenance =
                Provenance::from_tag(fields[fields.len() - 4]).ok_or_else(|| {
                    IntegralError::MalformedRecord {
                        line: idx + 1,
                        text: text.to_owned(),
                    }
                })?;
            let tag = fields[..fields.len() - 4].join(" ");
            if precision != self.precision_digits {
                continue;
            }
            self.entries.insert(
                tag,
                TableEntry {
                    value,
                    provenance,
                    certified_digits: certified,
                },
            );
            merged += 1;
        }
        Ok(merged)
    }
}
