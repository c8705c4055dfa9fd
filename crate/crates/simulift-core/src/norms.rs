//! Norm kernels on R^d and on products of copies of R^d, with subgradients
//! and dual norms.
//!
//! Every kernel provides three things: the norm value, one element of the
//! subdifferential (a fixed canonical selection at nonsmooth points, so that
//! optimality certificates are deterministic), and the dual norm used to
//! measure those certificates.

use crate::error::{Error, Result};

/// Sign with the convention `sgn(0) = 0` (also for negative zero, unlike
/// `f64::signum`).
#[inline]
pub(crate) fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `t^m` with exact fast paths for the common exponents, shared by every
/// objective evaluation so that algebraically equal routes stay bit-equal.
#[inline]
pub(crate) fn pow_m(t: f64, m: f64) -> f64 {
    if m == 1.0 {
        t
    } else if m == 2.0 {
        t * t
    } else {
        t.powf(m)
    }
}

/// An l_q exponent; infinity is a distinguished value rather than a large
/// float so that power evaluations never overflow.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(q: f64) -> Result<Self> {
        if q.is_infinite() && q > 0.0 {
            Ok(Exponent::Infinity)
        } else if q.is_finite() && q >= 1.0 {
            Ok(Exponent::Finite(q))
        } else {
            Err(Error::InvalidParameter(format!(
                "norm exponent must be in [1, inf], got {q}"
            )))
        }
    }

    /// Conjugate exponent: 1/q + 1/q* = 1.
    pub fn dual(self) -> Exponent {
        match self {
            Exponent::Finite(q) if q == 1.0 => Exponent::Infinity,
            Exponent::Finite(q) => Exponent::Finite(q / (q - 1.0)),
            Exponent::Infinity => Exponent::Finite(1.0),
        }
    }
}

/// Common interface of the vector and product norm kernels.
pub trait NormKernel {
    fn eval(&self, x: &[f64]) -> Result<f64>;
    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>>;
    /// Norm of `x` in the dual space (standard pairing).
    fn dual_eval(&self, x: &[f64]) -> Result<f64>;
}

/// Which norm equips the ambient space: an l_q norm, optionally after a
/// positive coordinatewise scaling.
#[derive(Clone, Debug, PartialEq)]
pub struct NormSpec {
    q: Exponent,
    weights: Option<Vec<f64>>,
}

impl NormSpec {
    pub fn lq(q: f64) -> Result<Self> {
        Ok(NormSpec {
            q: Exponent::new(q)?,
            weights: None,
        })
    }

    pub fn euclidean() -> Self {
        NormSpec {
            q: Exponent::Finite(2.0),
            weights: None,
        }
    }

    pub fn l1() -> Self {
        NormSpec {
            q: Exponent::Finite(1.0),
            weights: None,
        }
    }

    pub fn linf() -> Self {
        NormSpec {
            q: Exponent::Infinity,
            weights: None,
        }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput("norm weight vector"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidParameter(
                "norm weights must be strictly positive and finite".into(),
            ));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn exponent(&self) -> Exponent {
        self.q
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    /// True when the unit ball is an ellipsoid, i.e. the norm comes from an
    /// inner product. For diagonal scalings that is exactly q = 2.
    pub fn is_inner_product(&self) -> bool {
        matches!(self.q, Exponent::Finite(q) if q == 2.0)
    }

    /// Diagonal metric `d` with `norm(x)^2 = sum d_i x_i^2` when the norm is
    /// an inner-product norm, for the given ambient dimension.
    pub fn quadratic_diag(&self, dim: usize) -> Option<Vec<f64>> {
        if !self.is_inner_product() {
            return None;
        }
        Some(match &self.weights {
            Some(w) if w.len() == dim => w.iter().map(|wi| wi * wi).collect(),
            Some(_) => return None,
            None => vec![1.0; dim],
        })
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if let Some(w) = &self.weights {
            if w.len() != x.len() {
                return Err(Error::DimensionMismatch {
                    context: "weighted norm evaluation",
                    expected: w.len(),
                    actual: x.len(),
                });
            }
        }
        Ok(())
    }

    #[inline]
    fn weight(&self, i: usize) -> f64 {
        match &self.weights {
            Some(w) => w[i],
            None => 1.0,
        }
    }

    pub(crate) fn eval_raw(&self, x: &[f64]) -> f64 {
        match self.q {
            Exponent::Finite(q) if q == 1.0 => {
                (0..x.len()).map(|i| self.weight(i) * x[i].abs()).sum()
            }
            Exponent::Finite(q) if q == 2.0 => (0..x.len())
                .map(|i| {
                    let t = self.weight(i) * x[i];
                    t * t
                })
                .sum::<f64>()
                .sqrt(),
            Exponent::Finite(q) => (0..x.len())
                .map(|i| (self.weight(i) * x[i].abs()).powf(q))
                .sum::<f64>()
                .powf(1.0 / q),
            Exponent::Infinity => (0..x.len())
                .map(|i| self.weight(i) * x[i].abs())
                .fold(0.0, f64::max),
        }
    }

    pub(crate) fn subgradient_raw(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        match self.q {
            Exponent::Finite(q) if q == 1.0 => {
                (0..n).map(|i| self.weight(i) * sgn(x[i])).collect()
            }
            Exponent::Finite(q) => {
                let t = self.eval_raw(x);
                if t == 0.0 {
                    return vec![0.0; n];
                }
                if q == 2.0 {
                    (0..n)
                        .map(|i| {
                            let w = self.weight(i);
                            w * w * x[i] / t
                        })
                        .collect()
                } else {
                    (0..n)
                        .map(|i| {
                            let w = self.weight(i);
                            let s = w * x[i].abs() / t;
                            w * sgn(x[i]) * s.powf(q - 1.0)
                        })
                        .collect()
                }
            }
            Exponent::Infinity => {
                let t = self.eval_raw(x);
                if t == 0.0 {
                    return vec![0.0; n];
                }
                // equal split over the coordinates attaining the max
                let tied: Vec<usize> = (0..n)
                    .filter(|&i| self.weight(i) * x[i].abs() == t)
                    .collect();
                let share = 1.0 / tied.len() as f64;
                let mut g = vec![0.0; n];
                for i in tied {
                    g[i] = self.weight(i) * sgn(x[i]) * share;
                }
                g
            }
        }
    }

    pub(crate) fn dual_eval_raw(&self, x: &[f64]) -> f64 {
        // dual of x -> |Wx|_q is y -> |W^{-1} y|_{q*}
        let scaled: Vec<f64> = (0..x.len()).map(|i| x[i] / self.weight(i)).collect();
        let dual = NormSpec {
            q: self.q.dual(),
            weights: None,
        };
        dual.eval_raw(&scaled)
    }
}

impl NormKernel for NormSpec {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.eval_raw(x))
    }

    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.subgradient_raw(x))
    }

    fn dual_eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.dual_eval_raw(x))
    }
}

/// The norm `(sum_i |x_i|^m)^(1/m)` on n-tuples of vectors measured by a
/// base norm. Simultaneous approximation of n points is best approximation
/// of the tuple from the diagonal subspace under this norm.
#[derive(Clone, Debug)]
pub struct TupleNorm {
    base: NormSpec,
    n: usize,
    m: f64,
}

impl TupleNorm {
    pub fn new(base: NormSpec, n: usize, m: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput("tuple length"));
        }
        if !(m.is_finite() && m >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tuple exponent must be a finite real >= 1, got {m}"
            )));
        }
        Ok(TupleNorm { base, n, m })
    }

    /// `sum_i |x_i|^m`, the m-th power of the tuple norm. Kept as its own
    /// entry point because the relative-center objective is exactly this
    /// sum, in the same summation order.
    pub fn power_sum(&self, xs: &[Vec<f64>]) -> Result<f64> {
        if xs.len() != self.n {
            return Err(Error::DimensionMismatch {
                context: "tuple norm evaluation",
                expected: self.n,
                actual: xs.len(),
            });
        }
        let mut acc = 0.0;
        for x in xs {
            acc += pow_m(self.base.eval(x)?, self.m);
        }
        Ok(acc)
    }

    pub fn eval(&self, xs: &[Vec<f64>]) -> Result<f64> {
        // n = 1 reduces to the base norm exactly, with no power round trip
        if self.n == 1 {
            return self.base.eval(&xs[0]);
        }
        Ok(self.power_sum(xs)?.powf(1.0 / self.m))
    }
}

/// Norm kernel of L_p over a finite atomic measure, viewed as a norm on the
/// flattened value array: `(sum_j w_j * fiber(x_j)^p)^(1/p)` with one block
/// of `block_dim` coordinates per atom. The `Infinity` exponent variant
/// (`max_j w_j * fiber(x_j)`) arises as the dual of p = 1.
#[derive(Clone, Debug)]
pub struct LpProductNorm {
    exponent: Exponent,
    weights: Vec<f64>,
    block_dim: usize,
    fiber: NormSpec,
}

impl LpProductNorm {
    pub fn new(exponent: Exponent, weights: Vec<f64>, block_dim: usize, fiber: NormSpec) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput("product norm weights"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidParameter(
                "product norm weights must be strictly positive and finite".into(),
            ));
        }
        if block_dim == 0 {
            return Err(Error::InvalidParameter("block dimension must be positive".into()));
        }
        Ok(LpProductNorm {
            exponent,
            weights,
            block_dim,
            fiber,
        })
    }

    pub fn blocks(&self) -> usize {
        self.weights.len()
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn dim(&self) -> usize {
        self.weights.len() * self.block_dim
    }

    pub fn exponent(&self) -> Exponent {
        self.exponent
    }

    pub fn fiber(&self) -> &NormSpec {
        &self.fiber
    }

    /// Diagonal metric when this kernel is an inner-product norm
    /// (p = 2 with an inner-product fiber).
    pub fn quadratic_diag(&self) -> Option<Vec<f64>> {
        if self.exponent != Exponent::Finite(2.0) {
            return None;
        }
        let fiber_diag = self.fiber.quadratic_diag(self.block_dim)?;
        let mut diag = Vec::with_capacity(self.dim());
        for w in &self.weights {
            diag.extend(fiber_diag.iter().map(|f| w * f));
        }
        Some(diag)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "product norm evaluation",
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    fn block<'a>(&self, x: &'a [f64], j: usize) -> &'a [f64] {
        &x[j * self.block_dim..(j + 1) * self.block_dim]
    }

    pub(crate) fn eval_raw(&self, x: &[f64]) -> f64 {
        match self.exponent {
            Exponent::Finite(p) => {
                let mut acc = 0.0;
                for (j, w) in self.weights.iter().enumerate() {
                    acc += w * pow_m(self.fiber.eval_raw(self.block(x, j)), p);
                }
                if p == 1.0 {
                    acc
                } else {
                    acc.powf(1.0 / p)
                }
            }
            Exponent::Infinity => self
                .weights
                .iter()
                .enumerate()
                .map(|(j, w)| w * self.fiber.eval_raw(self.block(x, j)))
                .fold(0.0, f64::max),
        }
    }

    pub(crate) fn subgradient_raw(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        let t = self.eval_raw(x);
        if t == 0.0 {
            return g;
        }
        match self.exponent {
            Exponent::Finite(p) => {
                for (j, w) in self.weights.iter().enumerate() {
                    let block = self.block(x, j);
                    let coeff = if p == 1.0 {
                        *w
                    } else {
                        let bn = self.fiber.eval_raw(block);
                        if bn == 0.0 {
                            continue;
                        }
                        w * (bn / t).powf(p - 1.0)
                    };
                    let fiber_g = self.fiber.subgradient_raw(block);
                    for (slot, gi) in g[j * self.block_dim..(j + 1) * self.block_dim]
                        .iter_mut()
                        .zip(fiber_g)
                    {
                        *slot = coeff * gi;
                    }
                }
                g
            }
            Exponent::Infinity => {
                let tied: Vec<usize> = (0..self.weights.len())
                    .filter(|&j| self.weights[j] * self.fiber.eval_raw(self.block(x, j)) == t)
                    .collect();
                let share = 1.0 / tied.len() as f64;
                for j in tied {
                    let fiber_g = self.fiber.subgradient_raw(self.block(x, j));
                    for (slot, gi) in g[j * self.block_dim..(j + 1) * self.block_dim]
                        .iter_mut()
                        .zip(fiber_g)
                    {
                        *slot = self.weights[j] * share * gi;
                    }
                }
                g
            }
        }
    }

    pub(crate) fn dual_eval_raw(&self, x: &[f64]) -> f64 {
        // dual of (sum_j w_j N(x_j)^p)^(1/p) is
        // (sum_j w_j^(1-p*) N*(y_j)^(p*))^(1/p*), closed under this family
        let dual_weights: Vec<f64> = match self.exponent {
            Exponent::Finite(p) if p == 1.0 => self.weights.iter().map(|w| 1.0 / w).collect(),
            Exponent::Finite(p) => {
                let pd = p / (p - 1.0);
                self.weights.iter().map(|w| w.powf(1.0 - pd)).collect()
            }
            Exponent::Infinity => self.weights.iter().map(|w| 1.0 / w).collect(),
        };
        match self.exponent.dual() {
            Exponent::Finite(pd) => {
                let mut acc = 0.0;
                for (j, w) in dual_weights.iter().enumerate() {
                    acc += w * pow_m(self.fiber.dual_eval_raw(self.block(x, j)), pd);
                }
                if pd == 1.0 {
                    acc
                } else {
                    acc.powf(1.0 / pd)
                }
            }
            Exponent::Infinity => dual_weights
                .iter()
                .enumerate()
                .map(|(j, w)| w * self.fiber.dual_eval_raw(self.block(x, j)))
                .fold(0.0, f64::max),
        }
    }
}

impl NormKernel for LpProductNorm {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.eval_raw(x))
    }

    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.subgradient_raw(x))
    }

    fn dual_eval(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.dual_eval_raw(x))
    }
}

/// The norm equipping the space a center problem lives in: either a plain
/// vector norm on R^d or the L_p product kernel on a flattened value array.
#[derive(Clone, Debug)]
pub enum AmbientNorm {
    Vector(NormSpec),
    Product(LpProductNorm),
}

impl AmbientNorm {
    /// Dimension the kernel pins down, if any.
    pub fn known_dim(&self) -> Option<usize> {
        match self {
            AmbientNorm::Vector(spec) => spec.weights().map(|w| w.len()),
            AmbientNorm::Product(p) => Some(p.dim()),
        }
    }

    pub fn quadratic_diag(&self, dim: usize) -> Option<Vec<f64>> {
        match self {
            AmbientNorm::Vector(spec) => spec.quadratic_diag(dim),
            AmbientNorm::Product(p) => {
                if p.dim() != dim {
                    return None;
                }
                p.quadratic_diag()
            }
        }
    }

    pub(crate) fn eval_raw(&self, x: &[f64]) -> f64 {
        match self {
            AmbientNorm::Vector(spec) => spec.eval_raw(x),
            AmbientNorm::Product(p) => p.eval_raw(x),
        }
    }

    pub(crate) fn subgradient_raw(&self, x: &[f64]) -> Vec<f64> {
        match self {
            AmbientNorm::Vector(spec) => spec.subgradient_raw(x),
            AmbientNorm::Product(p) => p.subgradient_raw(x),
        }
    }

    pub(crate) fn dual_eval_raw(&self, x: &[f64]) -> f64 {
        match self {
            AmbientNorm::Vector(spec) => spec.dual_eval_raw(x),
            AmbientNorm::Product(p) => p.dual_eval_raw(x),
        }
    }
}

impl NormKernel for AmbientNorm {
    fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            AmbientNorm::Vector(spec) => spec.eval(x),
            AmbientNorm::Product(p) => p.eval(x),
        }
    }

    fn subgradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            AmbientNorm::Vector(spec) => spec.subgradient(x),
            AmbientNorm::Product(p) => p.subgradient(x),
        }
    }

    fn dual_eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            AmbientNorm::Vector(spec) => spec.dual_eval(x),
            AmbientNorm::Product(p) => p.dual_eval(x),
        }
    }
}

impl From<NormSpec> for AmbientNorm {
    fn from(spec: NormSpec) -> Self {
        AmbientNorm::Vector(spec)
    }
}

impl From<LpProductNorm> for AmbientNorm {
    fn from(p: LpProductNorm) -> Self {
        AmbientNorm::Product(p)
    }
}
