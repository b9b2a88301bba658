//! Symbols `a(x, ξ)` of finite regularity in `x`.
//!
//! A symbol is stored in one of three shapes:
//! * separable, `Σ_t c_t(x) m_t(ξ)` with Fourier-represented coefficients;
//! * a slab evaluator returning the grid values of `x ↦ a(x, ξ)`;
//! * a coefficient evaluator returning `â(·, ξ)` on the mode set.
//!
//! All three answer the two questions quantization needs: grid values at a
//! given `ξ`, and `â(n, ξ)` for a list of `n`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldFlags, FourierField};
use crate::grid::{Mode, TorusGrid, Xi};
use crate::norms::{holder_norm_estimate, sobolev_norm};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Finite-difference step for `ξ`-derivatives: half the lattice spacing.
pub const FD_STEP: f64 = 0.5;

type ValueFn = Arc<dyn Fn(Xi) -> Complex64 + Send + Sync>;
type GradFn = Arc<dyn Fn(Xi) -> [Complex64; 2] + Send + Sync>;
type SlabFn = Arc<dyn Fn(Xi) -> Result<Vec<Complex64>> + Send + Sync>;
type HatFn = Arc<dyn Fn(Xi) -> Result<Vec<Complex64>> + Send + Sync>;

/// A Fourier multiplier `m(ξ)` with an optional analytic gradient.
#[derive(Clone)]
pub struct Multiplier {
    value: ValueFn,
    grad: Option<GradFn>,
}

impl fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Multiplier")
            .field("analytic_grad", &self.grad.is_some())
            .finish()
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl Multiplier {
    pub fn new(
        value: impl Fn(Xi) -> Complex64 + Send + Sync + 'static,
        grad: Option<GradFn>,
    ) -> Self {
        Self {
            value: Arc::new(value),
            grad,
        }
    }

    pub fn constant(v: Complex64) -> Self {
        Self::new(move |_| v, Some(Arc::new(|_| [ZERO, ZERO])))
    }

    pub fn one() -> Self {
        Self::constant(c(1.0))
    }

    /// `|ξ|²`.
    pub fn xi_sq() -> Self {
        Self::new(
            |xi| c(xi[0] * xi[0] + xi[1] * xi[1]),
            Some(Arc::new(|xi| [c(2.0 * xi[0]), c(2.0 * xi[1])])),
        )
    }

    /// `ξ_r`.
    pub fn xi_component(r: usize) -> Self {
        Self::new(
            move |xi| c(xi[r]),
            Some(Arc::new(move |_| {
                let mut g = [ZERO, ZERO];
                g[r] = c(1.0);
                g
            })),
        )
    }

    /// `|ξ|^p`, `p >= 0`; the gradient is taken as zero at the origin.
    pub fn abs_pow(p: f64) -> Self {
        Self::new(
            move |xi| c((xi[0] * xi[0] + xi[1] * xi[1]).powf(0.5 * p)),
            Some(Arc::new(move |xi| {
                let r2 = xi[0] * xi[0] + xi[1] * xi[1];
                if r2 == 0.0 {
                    return [ZERO, ZERO];
                }
                let f = p * r2.powf(0.5 * p - 1.0);
                [c(f * xi[0]), c(f * xi[1])]
            })),
        )
    }

    /// `(1 + |ξ|²)^{m/2}`.
    pub fn japanese(m: f64) -> Self {
        Self::new(
            move |xi| c((1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(0.5 * m)),
            Some(Arc::new(move |xi| {
                let f = m * (1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(0.5 * m - 1.0);
                [c(f * xi[0]), c(f * xi[1])]
            })),
        )
    }

    pub fn eval(&self, xi: Xi) -> Complex64 {
        (self.value)(xi)
    }

    pub fn has_analytic_grad(&self) -> bool {
        self.grad.is_some()
    }

    /// `∂_{ξ_r} m`, analytic when available, central difference otherwise.
    pub fn d(&self, xi: Xi, r: usize) -> Complex64 {
        match &self.grad {
            Some(g) => g(xi)[r],
            None => {
                let mut p = xi;
                let mut q = xi;
                p[r] += FD_STEP;
                q[r] -= FD_STEP;
                (self.eval(p) - self.eval(q)) / (2.0 * FD_STEP)
            }
        }
    }

    pub fn product(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let grad: Option<GradFn> = match (&self.grad, &other.grad) {
            (Some(_), Some(_)) => {
                let (a, b) = (self.clone(), other.clone());
                Some(Arc::new(move |xi| {
                    let (va, vb) = (a.eval(xi), b.eval(xi));
                    [
                        a.d(xi, 0) * vb + va * b.d(xi, 0),
                        a.d(xi, 1) * vb + va * b.d(xi, 1),
                    ]
                }))
            }
            _ => None,
        };
        Self::new(move |xi| a.eval(xi) * b.eval(xi), grad)
    }

    /// The multiplier `∂_{ξ_r} m` (its own gradient falls back to differences).
    pub fn partial(&self, r: usize) -> Self {
        let a = self.clone();
        Self::new(move |xi| a.d(xi, r), None)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let a = self.clone();
        let grad: Option<GradFn> = self.grad.as_ref().map(|g| {
            let g = g.clone();
            Arc::new(move |xi: Xi| {
                let v = g(xi);
                [v[0] * s, v[1] * s]
            }) as GradFn
        });
        Self::new(move |xi| a.eval(xi) * s, grad)
    }
}

/// Regularity of a symbol in `x`, also used to select the `x`-norm in
/// seminorms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regularity {
    LInf,
    Sobolev(f64),
    Holder(f64),
}

impl Regularity {
    /// Number of classical `x`-derivatives the tag guarantees (fractional).
    pub fn x_smoothness(&self, dim: usize) -> f64 {
        match *self {
            Regularity::LInf => 0.0,
            Regularity::Sobolev(s) => s - dim as f64 / 2.0,
            Regularity::Holder(r) => r,
        }
    }

    /// Regularity left after `k` derivatives.
    pub fn lowered(&self, k: f64) -> Self {
        match *self {
            Regularity::LInf => Regularity::LInf,
            Regularity::Sobolev(s) => Regularity::Sobolev(s - k),
            Regularity::Holder(r) if r - k > 0.0 => Regularity::Holder(r - k),
            Regularity::Holder(_) => Regularity::LInf,
        }
    }

    /// The weaker of two tags, compared through `x_smoothness`.
    pub fn weaker(&self, other: &Self, dim: usize) -> Self {
        if self.x_smoothness(dim) <= other.x_smoothness(dim) {
            *self
        } else {
            *other
        }
    }

    /// The `x`-norm attached to the tag.
    pub fn norm(&self, f: &FourierField) -> f64 {
        match *self {
            Regularity::LInf => f.sup(),
            Regularity::Sobolev(s) => sobolev_norm(f, s),
            Regularity::Holder(r) => holder_norm_estimate(f, r).expect("Holder index is nonnegative"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    coeff: FourierField,
    values: Arc<Vec<Complex64>>,
    mult: Multiplier,
}

impl Term {
    pub fn new(coeff: FourierField, mult: Multiplier) -> Self {
        let values = Arc::new(coeff.values());
        Self {
            coeff,
            values,
            mult,
        }
    }

    pub fn coeff(&self) -> &FourierField {
        &self.coeff
    }

    pub fn multiplier(&self) -> &Multiplier {
        &self.mult
    }
}

#[derive(Clone)]
enum Repr {
    Separable(Vec<Term>),
    Slab { f: SlabFn, xi_grad: Option<[SlabFn; 2]> },
    Coefficients(HatFn),
}

/// An order-`m` symbol on a fixed grid.
#[derive(Clone)]
pub struct Symbol {
    grid: TorusGrid,
    order: f64,
    regularity: Regularity,
    repr: Repr,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shape = match &self.repr {
            Repr::Separable(t) => format!("separable({} terms)", t.len()),
            Repr::Slab { .. } => "slab".to_string(),
            Repr::Coefficients(_) => "coefficients".to_string(),
        };
        f.debug_struct("Symbol")
            .field("grid", &self.grid)
            .field("order", &self.order)
            .field("regularity", &self.regularity)
            .field("shape", &shape)
            .finish()
    }
}

impl Symbol {
    pub fn separable(grid: TorusGrid, order: f64, regularity: Regularity, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.coeff.grid() != grid {
                return Err(Error::GridMismatch {
                    left: grid.to_string(),
                    right: t.coeff.grid().to_string(),
                });
            }
        }
        Ok(Self {
            grid,
            order,
            regularity,
            repr: Repr::Separable(terms),
        })
    }

    /// `x`-independent symbol `m(ξ)`; smooth in `x` trivially.
    pub fn multiplier(grid: TorusGrid, order: f64, m: Multiplier) -> Self {
        Self {
            grid,
            order,
            regularity: Regularity::Holder(f64::INFINITY),
            repr: Repr::Separable(vec![Term::new(FourierField::constant(grid, 1.0), m)]),
        }
    }

    /// Order-zero symbol `a(x)`.
    pub fn function(a: &FourierField, regularity: Regularity) -> Self {
        Self {
            grid: a.grid(),
            order: 0.0,
            regularity,
            repr: Repr::Separable(vec![Term::new(a.clone(), Multiplier::one())]),
        }
    }

    /// `a(x) m(ξ)`.
    pub fn product_form(a: &FourierField, m: Multiplier, order: f64, regularity: Regularity) -> Self {
        Self {
            grid: a.grid(),
            order,
            regularity,
            repr: Repr::Separable(vec![Term::new(a.clone(), m)]),
        }
    }

    /// Symbol given by the grid values of `x ↦ a(x, ξ)`, with optional
    /// analytic `ξ`-gradient slabs.
    pub fn from_slab(
        grid: TorusGrid,
        order: f64,
        regularity: Regularity,
        f: impl Fn(Xi) -> Result<Vec<Complex64>> + Send + Sync + 'static,
        xi_grad: Option<[SlabFn; 2]>,
    ) -> Self {
        Self {
            grid,
            order,
            regularity,
            repr: Repr::Slab {
                f: Arc::new(f),
                xi_grad,
            },
        }
    }

    /// Symbol from a pointwise evaluator `(x, ξ) ↦ a(x, ξ)`.
    pub fn from_pointwise(
        grid: TorusGrid,
        order: f64,
        regularity: Regularity,
        f: impl Fn([f64; 2], Xi) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::from_slab(
            grid,
            order,
            regularity,
            move |xi| Ok((0..grid.num_points()).map(|p| f(grid.point(p), xi)).collect()),
            None,
        )
    }

    /// Symbol given directly by `ξ ↦ â(·, ξ)` on the mode set.
    pub fn from_coefficients(
        grid: TorusGrid,
        order: f64,
        regularity: Regularity,
        hat: impl Fn(Xi) -> Result<Vec<Complex64>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            grid,
            order,
            regularity,
            repr: Repr::Coefficients(Arc::new(hat)),
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    pub fn with_order(mut self, order: f64) -> Self {
        self.order = order;
        self
    }

    pub fn with_regularity(mut self, r: Regularity) -> Self {
        self.regularity = r;
        self
    }

    pub fn terms(&self) -> Option<&[Term]> {
        match &self.repr {
            Repr::Separable(t) => Some(t),
            _ => None,
        }
    }

    /// True when every coefficient is constant in `x` (separable shape only).
    pub fn is_x_independent(&self) -> bool {
        let z = self.grid.zero_index();
        match &self.repr {
            Repr::Separable(terms) => terms.iter().all(|t| {
                t.coeff
                    .coeffs()
                    .iter()
                    .enumerate()
                    .all(|(i, v)| i == z || *v == ZERO)
            }),
            _ => false,
        }
    }

    fn check(&self, xi: Xi, vals: &[Complex64]) -> Result<()> {
        if let Some(p) = vals.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::SymbolEvaluation {
                x: self.grid.point(p),
                xi,
            });
        }
        Ok(())
    }

    /// Grid values of `x ↦ a(x, ξ)`.
    pub fn slab(&self, xi: Xi) -> Result<Vec<Complex64>> {
        let vals = match &self.repr {
            Repr::Separable(terms) => {
                let mut out = vec![ZERO; self.grid.num_points()];
                for t in terms {
                    let m = t.mult.eval(xi);
                    for (o, v) in out.iter_mut().zip(t.values.iter()) {
                        *o += v * m;
                    }
                }
                out
            }
            Repr::Slab { f, .. } => f(xi)?,
            Repr::Coefficients(h) => self.grid.inverse(&h(xi)?)?,
        };
        self.check(xi, &vals)?;
        Ok(vals)
    }

    /// `â(·, ξ)` on the whole mode set.
    pub fn hat(&self, xi: Xi) -> Result<Vec<Complex64>> {
        match &self.repr {
            Repr::Separable(terms) => {
                let mut out = vec![ZERO; self.grid.num_modes()];
                for t in terms {
                    let m = t.mult.eval(xi);
                    if !(m.re.is_finite() && m.im.is_finite()) {
                        return Err(Error::SymbolEvaluation {
                            x: self.grid.point(0),
                            xi,
                        });
                    }
                    for (o, v) in out.iter_mut().zip(t.coeff.coeffs()) {
                        *o += v * m;
                    }
                }
                Ok(out)
            }
            Repr::Slab { .. } => self.grid.forward(&self.slab(xi)?),
            Repr::Coefficients(h) => {
                let out = h(xi)?;
                self.check(xi, &out)?;
                Ok(out)
            }
        }
    }

    /// `â(n, ξ)` for each requested `n`; zero outside the mode set.
    pub fn hat_at(&self, xi: Xi, ns: &[Mode]) -> Result<Vec<Complex64>> {
        let g = self.grid;
        match &self.repr {
            Repr::Separable(terms) => {
                let ms: Vec<Complex64> = terms.iter().map(|t| t.mult.eval(xi)).collect();
                if ms.iter().any(|m| !(m.re.is_finite() && m.im.is_finite())) {
                    return Err(Error::SymbolEvaluation { x: g.point(0), xi });
                }
                Ok(ns
                    .iter()
                    .map(|&n| match g.mode_index(n) {
                        Some(i) => terms.iter().zip(&ms).map(|(t, m)| t.coeff.coeffs()[i] * m).sum(),
                        None => ZERO,
                    })
                    .collect())
            }
            _ => {
                let h = self.hat(xi)?;
                Ok(ns
                    .iter()
                    .map(|&n| g.mode_index(n).map_or(ZERO, |i| h[i]))
                    .collect())
            }
        }
    }

    /// Pointwise value at grid point `p`.
    pub fn evaluate(&self, p: usize, xi: Xi) -> Result<Complex64> {
        Ok(self.slab(xi)?[p])
    }

    /// `x ↦ a(x, ξ)` as a field.
    pub fn field_at(&self, xi: Xi) -> Result<FourierField> {
        FourierField::from_coeffs(self.grid, self.hat(xi)?, FieldFlags::COMPLEX)
    }

    /// `∂_{ξ_r} a`, of order `m - 1`.
    pub fn xi_partial(&self, r: usize) -> Symbol {
        let repr = match &self.repr {
            Repr::Separable(terms) => Repr::Separable(
                terms
                    .iter()
                    .map(|t| Term {
                        coeff: t.coeff.clone(),
                        values: t.values.clone(),
                        mult: t.mult.partial(r),
                    })
                    .collect(),
            ),
            Repr::Slab {
                xi_grad: Some(g), ..
            } => Repr::Slab {
                f: g[r].clone(),
                xi_grad: None,
            },
            _ => {
                let me = self.clone();
                Repr::Slab {
                    f: Arc::new(move |xi| {
                        let mut p = xi;
                        let mut q = xi;
                        p[r] += FD_STEP;
                        q[r] -= FD_STEP;
                        let a = me.slab(p)?;
                        let b = me.slab(q)?;
                        Ok(a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * FD_STEP)).collect())
                    }),
                    xi_grad: None,
                }
            }
        };
        Symbol {
            grid: self.grid,
            order: self.order - 1.0,
            regularity: self.regularity,
            repr,
        }
    }

    /// `∂_{x_r} a`, computed spectrally.
    pub fn x_partial(&self, r: usize) -> Symbol {
        let grid = self.grid;
        let repr = match &self.repr {
            Repr::Separable(terms) => Repr::Separable(
                terms
                    .iter()
                    .map(|t| Term::new(t.coeff.partial(r), t.mult.clone()))
                    .collect(),
            ),
            _ => {
                let me = self.clone();
                Repr::Coefficients(Arc::new(move |xi| {
                    let h = me.hat(xi)?;
                    Ok(h.iter()
                        .enumerate()
                        .map(|(i, v)| v * Complex64::new(0.0, grid.mode(i)[r] as f64))
                        .collect())
                }))
            }
        };
        Symbol {
            grid,
            order: self.order,
            regularity: self.regularity.lowered(1.0),
            repr,
        }
    }

    pub fn scale(&self, s: Complex64) -> Symbol {
        let repr = match &self.repr {
            Repr::Separable(terms) => Repr::Separable(
                terms
                    .iter()
                    .map(|t| Term {
                        coeff: t.coeff.clone(),
                        values: t.values.clone(),
                        mult: t.mult.scaled(s),
                    })
                    .collect(),
            ),
            Repr::Slab { f, xi_grad } => {
                let f = f.clone();
                let scale_slab = |g: SlabFn| -> SlabFn {
                    Arc::new(move |xi| Ok(g(xi)?.into_iter().map(|v| v * s).collect()))
                };
                Repr::Slab {
                    f: scale_slab(f),
                    xi_grad: xi_grad
                        .as_ref()
                        .map(|[a, b]| [scale_slab(a.clone()), scale_slab(b.clone())]),
                }
            }
            Repr::Coefficients(h) => {
                let h = h.clone();
                Repr::Coefficients(Arc::new(move |xi| {
                    Ok(h(xi)?.into_iter().map(|v| v * s).collect())
                }))
            }
        };
        Symbol {
            grid: self.grid,
            order: self.order,
            regularity: self.regularity,
            repr,
        }
    }

    pub fn add(&self, other: &Symbol) -> Result<Symbol> {
        self.same_grid(other)?;
        let order = self.order.max(other.order);
        let regularity = self.regularity.weaker(&other.regularity, self.grid.dim());
        let repr = match (&self.repr, &other.repr) {
            (Repr::Separable(a), Repr::Separable(b)) => {
                Repr::Separable(a.iter().chain(b.iter()).cloned().collect())
            }
            _ => {
                let (a, b) = (self.clone(), other.clone());
                Repr::Coefficients(Arc::new(move |xi| {
                    let x = a.hat(xi)?;
                    let y = b.hat(xi)?;
                    Ok(x.iter().zip(&y).map(|(p, q)| p + q).collect())
                }))
            }
        };
        Ok(Symbol {
            grid: self.grid,
            order,
            regularity,
            repr,
        })
    }

    pub fn sub(&self, other: &Symbol) -> Result<Symbol> {
        self.add(&other.scale(c(-1.0)))
    }

    /// Pointwise product `a(x, ξ) b(x, ξ)`; coefficient products are
    /// dealiased.
    pub fn mul(&self, other: &Symbol) -> Result<Symbol> {
        self.same_grid(other)?;
        let order = self.order + other.order;
        let regularity = self.regularity.weaker(&other.regularity, self.grid.dim());
        let repr = match (&self.repr, &other.repr) {
            (Repr::Separable(a), Repr::Separable(b)) => {
                let mut terms = Vec::with_capacity(a.len() * b.len());
                for s in a {
                    for t in b {
                        let coeff = match (constant_value(&s.coeff), constant_value(&t.coeff)) {
                            (Some(c), _) => t.coeff.scale_complex(c),
                            (_, Some(c)) => s.coeff.scale_complex(c),
                            _ => s.coeff.mul(&t.coeff)?,
                        };
                        terms.push(Term::new(coeff, s.mult.product(&t.mult)));
                    }
                }
                Repr::Separable(terms)
            }
            _ => {
                let (a, b) = (self.clone(), other.clone());
                Repr::Slab {
                    f: Arc::new(move |xi| {
                        let x = a.slab(xi)?;
                        let y = b.slab(xi)?;
                        Ok(x.iter().zip(&y).map(|(p, q)| p * q).collect())
                    }),
                    xi_grad: None,
                }
            }
        };
        Ok(Symbol {
            grid: self.grid,
            order,
            regularity,
            repr,
        })
    }

    fn same_grid(&self, other: &Symbol) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch {
                left: self.grid.to_string(),
                right: other.grid.to_string(),
            });
        }
        Ok(())
    }
}

/// The value of a field that is constant in `x`.
fn constant_value(f: &FourierField) -> Option<Complex64> {
    let z = f.grid().zero_index();
    f.coeffs()
        .iter()
        .enumerate()
        .all(|(i, v)| i == z || *v == ZERO)
        .then(|| f.coeffs()[z])
}

/// A 2×2 matrix of symbols; `None` entries are zero.
#[derive(Clone, Debug)]
pub struct MatrixSymbol {
    pub entries: [[Option<Symbol>; 2]; 2],
}

impl MatrixSymbol {
    pub fn diagonal(a: Symbol, b: Symbol) -> Self {
        Self {
            entries: [[Some(a), None], [None, Some(b)]],
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut entries: [[Option<Symbol>; 2]; 2] = Default::default();
        for r in 0..2 {
            for c in 0..2 {
                entries[r][c] = match (&self.entries[r][c], &other.entries[r][c]) {
                    (Some(a), Some(b)) => Some(a.add(b)?),
                    (Some(a), None) => Some(a.clone()),
                    (None, Some(b)) => Some(b.clone()),
                    (None, None) => None,
                };
            }
        }
        Ok(Self { entries })
    }

    /// Entry `(r, c)` evaluated at grid point `p`.
    pub fn evaluate(&self, r: usize, c: usize, p: usize, xi: Xi) -> Result<Complex64> {
        match &self.entries[r][c] {
            Some(s) => s.evaluate(p, xi),
            None => Ok(ZERO),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> TorusGrid {
        TorusGrid::new(1, 16).unwrap()
    }

    #[test]
    fn multiplier_gradients_match_differences() {
        let ms = [
            Multiplier::xi_sq(),
            Multiplier::japanese(1.5),
            Multiplier::abs_pow(3.0),
            Multiplier::xi_sq().product(&Multiplier::xi_component(1)),
        ];
        for m in &ms {
            let stripped = Multiplier {
                value: m.value.clone(),
                grad: None,
            };
            let xi = [3.5, -2.0];
            for r in 0..2 {
                let a = m.d(xi, r);
                let b = stripped.d(xi, r);
                assert!((a - b).norm() < 0.2 * (1.0 + a.norm()), "{a} vs {b}");
            }
        }
        // |ξ|² is exact under central differences
        let m = Multiplier::xi_sq();
        let fd = Multiplier::new(|xi| c(xi[0] * xi[0] + xi[1] * xi[1]), None);
        assert_eq!(m.d([2.5, 1.0], 0), fd.d([2.5, 1.0], 0));
    }

    #[test]
    fn shapes_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = grid();
        let a = random_field(&mut rng, g, 2.0, FieldFlags::REAL);
        let sep = Symbol::product_form(&a, Multiplier::xi_sq(), 2.0, Regularity::Sobolev(2.0));
        let vals = a.values();
        let slab = Symbol::from_slab(
            g,
            2.0,
            Regularity::Sobolev(2.0),
            move |xi| Ok(vals.iter().map(|v| v * (xi[0] * xi[0])).collect()),
            None,
        );
        let coef = {
            let a = a.clone();
            Symbol::from_coefficients(g, 2.0, Regularity::Sobolev(2.0), move |xi| {
                Ok(a.coeffs().iter().map(|v| v * (xi[0] * xi[0])).collect())
            })
        };
        for xi in [[0.0, 0.0], [1.5, 0.0], [-4.0, 0.0]] {
            let h = sep.hat(xi).unwrap();
            for other in [&slab, &coef] {
                let h2 = other.hat(xi).unwrap();
                for (p, q) in h.iter().zip(&h2) {
                    assert!((p - q).norm() < 1e-12);
                }
            }
            let ns = [[1, 0], [-3, 0], [40, 0]];
            let picked = sep.hat_at(xi, &ns).unwrap();
            assert_eq!(picked[2], ZERO);
            assert!((picked[0] - a.coeff([1, 0]) * xi[0] * xi[0]).norm() < 1e-14);
        }
        assert!(!sep.is_x_independent());
        assert!(Symbol::multiplier(g, 2.0, Multiplier::xi_sq()).is_x_independent());
    }

    #[test]
    fn nan_is_reported_with_location() {
        let g = grid();
        let s = Symbol::from_pointwise(g, 0.0, Regularity::LInf, |x, _| {
            if x[0] > 3.0 {
                c(f64::NAN)
            } else {
                c(1.0)
            }
        });
        match s.hat([0.5, 0.0]) {
            Err(Error::SymbolEvaluation { x, xi }) => {
                assert!(x[0] > 3.0);
                assert_eq!(xi, [0.5, 0.0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn derivatives() {
        let g = grid();
        let a = FourierField::from_fn(g, FieldFlags::REAL, |x| x[0].sin());
        let s = Symbol::product_form(&a, Multiplier::xi_sq(), 2.0, Regularity::Holder(5.0));
        // ∂_x: cos x |ξ|²
        let dx = s.x_partial(0);
        let cos = FourierField::from_fn(g, FieldFlags::REAL, |x| x[0].cos());
        let h = dx.hat([2.0, 0.0]).unwrap();
        for (p, q) in h.iter().zip(cos.coeffs()) {
            assert!((p - q * 4.0).norm() < 1e-14);
        }
        // ∂_ξ: 2ξ sin x
        let dxi = s.xi_partial(0);
        assert_eq!(dxi.order(), 1.0);
        let v = dxi.slab([3.0, 0.0]).unwrap();
        for (p, w) in v.iter().zip(a.values()) {
            assert!((p - w * 6.0).norm() < 1e-13);
        }
        // slab shape falls back to central differences, exact on quadratics
        let slab = Symbol::from_pointwise(g, 2.0, Regularity::Holder(5.0), |x, xi| c(x[0].sin() * xi[0] * xi[0]));
        let v2 = slab.xi_partial(0).slab([3.0, 0.0]).unwrap();
        for (p, q) in v.iter().zip(&v2) {
            assert!((p - q).norm() < 1e-12);
        }
        let dx2 = slab.x_partial(0).hat([2.0, 0.0]).unwrap();
        for (p, q) in h.iter().zip(&dx2) {
            assert!((p - q).norm() < 1e-13);
        }
    }
}
