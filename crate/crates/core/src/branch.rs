//! Parametrization of plane branches by repeated blowing up.
//!
//! Each stage has a tangent cone `c·L^m`. For `L = B − θA` the chart
//! `B = A(B₁ + θ)` gives `F = A^m F₁`; for `L = A` the chart `A = B·A₁`
//! gives `F = B^m F₁`. Once the strict transform is smooth, its points are
//! solved by Newton iteration and pushed back through the charts.

use std::sync::Arc;

use crate::algebra::poly::{Poly, Var};
use crate::algebra::series::UniSeries;
use crate::error::{Error, Result};
use crate::field::{Elem, Field};

/// The linear form `a·X + b·Y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    pub a: Elem,
    pub b: Elem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tangent {
    /// The degree-`mult` form is a multiple of `line^mult`.
    Line { mult: u32, line: LinearForm },
    /// The degree-`mult` form is not a power of one linear form.
    Split { mult: u32 },
}

/// `θ` with `u = (Y − θ)^m`, for `u` monic of degree `m` given low to high.
fn power_root(k: &Field, u: &[Elem]) -> Option<Elem> {
    let m = u.len() - 1;
    let p = k.characteristic() as usize;
    let theta = if p != 0 && m % p == 0 {
        if u.iter().enumerate().any(|(i, c)| i % p != 0 && !k.is_zero(c)) {
            return None;
        }
        let v: Vec<Elem> = u.iter().step_by(p).cloned().collect();
        k.frobenius_root(&power_root(k, &v)?).ok()?
    } else {
        let c = k.div(&u[m - 1], &k.from_i64(m as i64)).ok()?;
        k.neg(&c)
    };
    // compare against the binomial expansion of (Y − θ)^m
    let neg = k.neg(&theta);
    for (i, c) in u.iter().enumerate() {
        let expect = k.mul(&k.binomial(m as u64, i as u64), &k.pow(&neg, (m - i) as u64));
        if &expect != c && !(k.is_zero(c) && k.is_zero(&expect)) {
            return None;
        }
    }
    Some(theta)
}

/// Multiplicity and tangent line of `f` at the origin.
pub fn tangent_data(f: &Poly) -> Result<Tangent> {
    let k = f.field();
    let mult = match f.order() {
        None => return Err(Error::InvalidInput("zero polynomial".into())),
        Some(0) => return Err(Error::InvalidInput("polynomial does not vanish at the origin".into())),
        Some(m) => m,
    };
    let cone = f.homogeneous_part(mult);
    // coefficients of cone(1, Y) from Y^0 to Y^mult
    let u: Vec<Elem> = (0..=mult).map(|j| cone.coeff(mult - j, j)).collect();
    let top = &u[mult as usize];
    if k.is_zero(top) {
        if cone.num_terms() == 1 {
            return Ok(Tangent::Line { mult, line: LinearForm { a: k.one(), b: k.zero() } });
        }
        return Ok(Tangent::Split { mult });
    }
    let inv = k.inv(top)?;
    let monic: Vec<Elem> = u.iter().map(|c| k.mul(c, &inv)).collect();
    Ok(match power_root(k, &monic) {
        Some(theta) => Tangent::Line { mult, line: LinearForm { a: k.neg(&theta), b: k.one() } },
        None => Tangent::Split { mult },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Chart {
    /// `B = A(B₁ + θ)`.
    X,
    /// `A = B·A₁`.
    Y,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupStep {
    pub multiplicity: u32,
    pub chart: Chart,
    pub theta: Elem,
}

#[derive(Clone, Debug)]
pub struct BlowupChain {
    field: Field,
    original: Poly,
    swapped: bool,
    steps: Vec<BlowupStep>,
    terminal: Poly,
}

/// Strict transform in the given chart.
fn strict_transform(f: &Poly, m: u32, chart: Chart, theta: &Elem) -> Poly {
    let k = f.field();
    match chart {
        Chart::X => {
            let g = Poly::from_terms(k, f.terms().map(|(&(i, j), c)| ((i + j - m, j), c.clone())));
            let shift = &Poly::y(k) + &Poly::constant(k, theta.clone());
            g.compose(&Poly::x(k), &shift, u32::MAX)
        }
        Chart::Y => Poly::from_terms(k, f.terms().map(|(&(i, j), c)| ((i, i + j - m), c.clone()))),
    }
}

/// Blows up until the strict transform is smooth.
pub fn blowup_chain(f: &Poly) -> Result<BlowupChain> {
    let k = f.field().clone();
    let (mult, line) = match tangent_data(f)? {
        Tangent::Line { mult, line } => (mult, line),
        Tangent::Split { mult } => {
            return Err(Error::Reducible(format!("tangent cone of multiplicity {mult} has several lines")))
        }
    };
    let swapped = mult > 1 && k.is_zero(&line.b);
    let start = if swapped { f.swap_xy() } else { f.clone() };
    let d = f.total_degree();
    let cap = (d * d + 4) as usize;
    let mut steps = Vec::new();
    let mut cur = start;
    loop {
        let (m, line) = match tangent_data(&cur)? {
            Tangent::Line { mult, line } => (mult, line),
            Tangent::Split { mult } => {
                return Err(Error::Reducible(format!(
                    "strict transform after {} blowups has a split tangent cone of multiplicity {mult}",
                    steps.len()
                )))
            }
        };
        if m == 1 {
            break;
        }
        if steps.len() >= cap {
            return Err(Error::Reducible(format!("multiplicity {m} persists after {cap} blowups (not reduced)")));
        }
        let (chart, theta) = if k.is_zero(&line.b) {
            (Chart::Y, k.zero())
        } else {
            (Chart::X, k.neg(&k.div(&line.a, &line.b)?))
        };
        cur = strict_transform(&cur, m, chart, &theta);
        steps.push(BlowupStep { multiplicity: m, chart, theta });
    }
    Ok(BlowupChain { field: k, original: f.clone(), swapped, steps, terminal: cur })
}

impl BlowupChain {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn original(&self) -> &Poly {
        &self.original
    }

    /// Whether `X` and `Y` were exchanged so that `X` is transversal.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    pub fn steps(&self) -> &[BlowupStep] {
        &self.steps
    }

    /// Multiplicities of the singular stages, ending before the first 1.
    pub fn multiplicity_sequence(&self) -> Vec<u32> {
        self.steps.iter().map(|s| s.multiplicity).collect()
    }

    pub fn multiplicity(&self) -> u32 {
        self.steps.first().map_or(1, |s| s.multiplicity)
    }

    /// Points of the smooth terminal stage, solved to `prec` by Newton iteration.
    fn terminal_points(&self, prec: usize) -> Result<(UniSeries, UniSeries)> {
        let k = &self.field;
        let f = &self.terminal;
        let b_transversal = !k.is_zero(&f.coeff(0, 1));
        let (g, dv) = if b_transversal { (f.clone(), Var::Y) } else { (f.swap_xy(), Var::Y) };
        let dg = g.derivative(dv);
        let t = UniSeries::monomial(k, 1, prec);
        let mut s = UniSeries::zero(k, prec);
        let mut correct = 1usize;
        loop {
            let r = g.eval_series(&t, &s);
            if r.is_zero() {
                break;
            }
            if correct > 2 * prec + 2 {
                return Err(Error::PrecisionExhausted("Newton iteration did not settle".into()));
            }
            let d = dg.eval_series(&t, &s).inverse()?;
            s = s.sub(&r.mul(&d)).with_precision(prec);
            correct *= 2;
        }
        Ok(if b_transversal { (t, s) } else { (s, t) })
    }

    /// Primitive parametrization to `t`-precision `prec`.
    pub fn parametrize(self: &Arc<Self>, prec: usize) -> Result<Parametrization> {
        let (mut a, mut b) = self.terminal_points(prec)?;
        for step in self.steps.iter().rev() {
            match step.chart {
                Chart::X => {
                    let shifted = b.add(&UniSeries::constant(&self.field, step.theta.clone(), b.precision()));
                    b = a.mul(&shifted);
                }
                Chart::Y => a = b.mul(&a),
            }
        }
        Ok(Parametrization {
            chain: Arc::clone(self),
            x_of_t: a.with_precision(prec),
            y_of_t: b.with_precision(prec),
        })
    }
}

/// `(x(t), y(t))` in normalized coordinates, where `ord x(t)` is the multiplicity.
#[derive(Clone, Debug)]
pub struct Parametrization {
    chain: Arc<BlowupChain>,
    pub x_of_t: UniSeries,
    pub y_of_t: UniSeries,
}

/// `ord_t`, or infinite when the series vanishes identically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl std::fmt::Display for Valuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "infinite"),
        }
    }
}

impl Parametrization {
    pub fn chain(&self) -> &BlowupChain {
        &self.chain
    }

    pub fn field(&self) -> &Field {
        &self.chain.field
    }

    pub fn precision(&self) -> usize {
        self.x_of_t.precision().min(self.y_of_t.precision())
    }

    pub fn swapped(&self) -> bool {
        self.chain.swapped
    }

    /// Same branch, recomputed at a higher precision.
    pub fn refine(&self, prec: usize) -> Result<Parametrization> {
        self.chain.parametrize(prec)
    }

    /// `g(x(t), y(t))` for `g` in the input coordinates.
    pub fn substitute(&self, g: &Poly) -> UniSeries {
        if self.chain.swapped {
            g.eval_series(&self.y_of_t, &self.x_of_t)
        } else {
            g.eval_series(&self.x_of_t, &self.y_of_t)
        }
    }

    /// Upper bound for a finite `I(f, g)`: the product of the degrees.
    fn bezout_bound(&self, g: &Poly) -> usize {
        (self.chain.original.total_degree() as usize) * (g.total_degree().max(1) as usize)
    }

    /// Series `φ(g(x(t), y(t)))` at increasing precision until its order is visible.
    fn order_of<F>(&self, g: &Poly, op: F) -> Result<Valuation>
    where
        F: Fn(&UniSeries) -> UniSeries,
    {
        if g.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        let bound = self.bezout_bound(g) + 2;
        let mut par = self.clone();
        loop {
            let s = op(&par.substitute(g));
            if let Some(o) = s.order() {
                return Ok(Valuation::Finite(o as u64));
            }
            if par.precision() > bound {
                return Ok(Valuation::Infinite);
            }
            par = par.refine((2 * par.precision()).max(bound + 2))?;
        }
    }
}

/// `v(g) = ord_t g(x(t), y(t))`.
pub fn valuation(par: &Parametrization, g: &Poly) -> Result<Valuation> {
    if g.is_zero() {
        return Ok(Valuation::Infinite);
    }
    par.order_of(g, |s| s.clone())
}

/// `ord_t` of `d/dt g(x(t), y(t))`.
pub fn t_derivative_order(par: &Parametrization, g: &Poly) -> Result<Valuation> {
    if g.is_zero() {
        return Ok(Valuation::Infinite);
    }
    par.order_of(g, |s| s.derivative())
}

/// Starting `t`-precision read off the chain: `c = Σ m_i(m_i − 1)` and the
/// top generator is below `c + m_0`, so `3c + 2m_0` covers subduction.
pub fn default_precision(chain: &BlowupChain) -> usize {
    let c: usize = chain.steps.iter().map(|s| (s.multiplicity * (s.multiplicity - 1)) as usize).sum();
    3 * c + 2 * chain.multiplicity() as usize + 32
}

/// Blowup chain and parametrization of the branch `f`.
pub fn hn_expand(f: &Poly, target_precision: usize) -> Result<(Arc<BlowupChain>, Parametrization)> {
    let chain = Arc::new(blowup_chain(f)?);
    let par = chain.parametrize(target_precision)?;
    Ok((chain, par))
}

/// [`hn_expand`] at [`default_precision`].
pub fn hn_expand_auto(f: &Poly) -> Result<(Arc<BlowupChain>, Parametrization)> {
    let chain = Arc::new(blowup_chain(f)?);
    let par = chain.parametrize(default_precision(&chain))?;
    Ok((chain, par))
}

pub fn is_irreducible(f: &Poly) -> Result<bool> {
    match blowup_chain(f) {
        Ok(_) => Ok(true),
        Err(Error::Reducible(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// `I(f, g)` for a branch `f`.
pub fn intersection_multiplicity(f: &Poly, g: &Poly) -> Result<Valuation> {
    let (_, par) = hn_expand_auto(f)?;
    valuation(&par, g)
}
