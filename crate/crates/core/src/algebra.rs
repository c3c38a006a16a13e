//! Superoperator expressions with matrix coefficients.
//!
//! An expression is a linear combination
//!
//! ```text
//! N(-)_A + K(0)_B + K(+)_C + K(-)_D + s * Id
//! ```
//!
//! where each family symbol stands for the sum over mode indices
//! `sum_{n,m} A_{nm} X_{nm}` of the two-index superoperators
//!
//! ```text
//! N(-)_{nm} rho = a+_n a_m rho - rho a+_n a_m
//! K(+)_{nm} rho = a+_n rho a_m
//! K(-)_{nm} rho = a_m rho a+_n
//! K(0)_{nm} rho = (a+_n a_m rho + rho a_m a+_n) / 2
//! ```
//!
//! The span of these four families plus the identity is closed under
//! commutation, and conjugation by `exp(K(+)_B)` or `exp(K(-)_B)` has a
//! terminating series, so both operations are exact rewrites on the
//! coefficient matrices.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::ComplexField;
use num_complex::Complex;
use num_traits::Zero;

use crate::coeff::{half_anticommutator, half_commutator, CoeffMatrix};
use crate::error::{ensure_dim, Result};
use crate::scalar::{lit, Real};

/// Default tolerance for [`SuperOpExpr::approx_eq`].
pub const DEFAULT_EQ_TOLERANCE: f64 = 1e-12;

/// Generator families; `Identity` carries only a scalar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorKind {
    NMinus,
    KZero,
    KPlus,
    KMinus,
    Identity,
}

impl GeneratorKind {
    /// The four matrix-valued families.
    pub const FAMILIES: [GeneratorKind; 4] = [
        GeneratorKind::NMinus,
        GeneratorKind::KZero,
        GeneratorKind::KPlus,
        GeneratorKind::KMinus,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            GeneratorKind::NMinus => "N-",
            GeneratorKind::KZero => "K0",
            GeneratorKind::KPlus => "K+",
            GeneratorKind::KMinus => "K-",
            GeneratorKind::Identity => "I",
        }
    }
}

/// Which raising/lowering family generates a similarity transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn family(self) -> GeneratorKind {
        match self {
            Sign::Plus => GeneratorKind::KPlus,
            Sign::Minus => GeneratorKind::KMinus,
        }
    }
}

/// Element of the superoperator algebra.
///
/// Zero coefficient matrices are never stored, so two expressions built along
/// different routes compare equal under `==` whenever their arithmetic agrees
/// exactly.
#[derive(Clone, PartialEq)]
pub struct SuperOpExpr<T: Real> {
    mode_count: usize,
    terms: BTreeMap<GeneratorKind, CoeffMatrix<T>>,
    scalar: Complex<T>,
}

impl<T: Real> SuperOpExpr<T> {
    pub fn zero(mode_count: usize) -> Self {
        assert!(mode_count > 0, "mode count must be positive");
        Self {
            mode_count,
            terms: BTreeMap::new(),
            scalar: Complex::zero(),
        }
    }

    /// `c * Id`.
    pub fn scalar_term(mode_count: usize, c: Complex<T>) -> Self {
        let mut e = Self::zero(mode_count);
        e.scalar = c;
        e
    }

    /// A single family term. `Identity` stores the trace of `coeff`.
    pub fn single(kind: GeneratorKind, coeff: CoeffMatrix<T>) -> Self {
        let mut e = Self::zero(coeff.dim());
        e.accumulate(kind, coeff);
        e
    }

    pub fn n_minus(coeff: CoeffMatrix<T>) -> Self {
        Self::single(GeneratorKind::NMinus, coeff)
    }

    pub fn k_zero(coeff: CoeffMatrix<T>) -> Self {
        Self::single(GeneratorKind::KZero, coeff)
    }

    pub fn k_plus(coeff: CoeffMatrix<T>) -> Self {
        Self::single(GeneratorKind::KPlus, coeff)
    }

    pub fn k_minus(coeff: CoeffMatrix<T>) -> Self {
        Self::single(GeneratorKind::KMinus, coeff)
    }

    /// Builder-style accumulation of one more term.
    pub fn with(mut self, kind: GeneratorKind, coeff: CoeffMatrix<T>) -> Result<Self> {
        ensure_dim(self.mode_count, coeff.dim())?;
        self.accumulate(kind, coeff);
        Ok(self)
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn scalar(&self) -> Complex<T> {
        self.scalar
    }

    pub fn term(&self, kind: GeneratorKind) -> Option<&CoeffMatrix<T>> {
        self.terms.get(&kind)
    }

    /// Coefficient of a family, zero when absent.
    pub fn coefficient(&self, kind: GeneratorKind) -> CoeffMatrix<T> {
        self.terms
            .get(&kind)
            .cloned()
            .unwrap_or_else(|| CoeffMatrix::zeros(self.mode_count))
    }

    pub fn contains(&self, kind: GeneratorKind) -> bool {
        match kind {
            GeneratorKind::Identity => !self.scalar.is_zero(),
            _ => self.terms.contains_key(&kind),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (GeneratorKind, &CoeffMatrix<T>)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.scalar.is_zero()
    }

    fn accumulate(&mut self, kind: GeneratorKind, coeff: CoeffMatrix<T>) {
        debug_assert_eq!(coeff.dim(), self.mode_count);
        if kind == GeneratorKind::Identity {
            self.scalar += coeff.trace();
            return;
        }
        match self.terms.remove(&kind) {
            Some(existing) => {
                let sum = existing + coeff;
                if !sum.is_zero() {
                    self.terms.insert(kind, sum);
                }
            }
            None => {
                if !coeff.is_zero() {
                    self.terms.insert(kind, coeff);
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        ensure_dim(self.mode_count, rhs.mode_count)?;
        let mut out = self.clone();
        for (kind, coeff) in rhs.terms() {
            out.accumulate(kind, coeff.clone());
        }
        out.scalar += rhs.scalar;
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(-Complex::<T>::new(T::one(), T::zero()))
    }

    /// `c * self`, applied to every coefficient and the scalar.
    pub fn scale(&self, c: Complex<T>) -> Self {
        let mut out = Self::zero(self.mode_count);
        for (kind, coeff) in self.terms() {
            out.accumulate(kind, coeff.scale(c));
        }
        out.scalar = self.scalar * c;
        out
    }

    /// `[self, rhs]`, expanded bilinearly over families.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        ensure_dim(self.mode_count, rhs.mode_count)?;
        let mut out = Self::zero(self.mode_count);
        for (ka, a) in self.terms() {
            for (kb, b) in rhs.terms() {
                for (kind, coeff) in family_bracket(ka, a, kb, b) {
                    out.accumulate(kind, coeff);
                }
            }
        }
        Ok(out)
    }

    /// `exp(K(sign)_B) self exp(-K(sign)_B)` as a closed-form rewrite.
    pub fn similarity(&self, sign: Sign, b: &CoeffMatrix<T>) -> Result<Self> {
        ensure_dim(self.mode_count, b.dim())?;
        let mut out = Self::scalar_term(self.mode_count, self.scalar);
        for (kind, a) in self.terms() {
            for (k, c) in similarity_of_family(sign, kind, a, b) {
                out.accumulate(k, c);
            }
        }
        Ok(out)
    }

    /// Drops families whose coefficient is below `tol` in max-abs norm; the
    /// scalar is zeroed the same way.
    pub fn prune(&self, tol: T) -> Self {
        let mut out = self.clone();
        out.terms.retain(|_, c| c.max_abs() > tol);
        if out.scalar.modulus() <= tol {
            out.scalar = Complex::zero();
        }
        out
    }

    /// Copy with one family (or the scalar, for `Identity`) removed.
    pub fn without(&self, kind: GeneratorKind) -> Self {
        let mut out = self.clone();
        match kind {
            GeneratorKind::Identity => out.scalar = Complex::zero(),
            _ => {
                out.terms.remove(&kind);
            }
        }
        out
    }

    /// Largest entrywise difference across all families and the scalar.
    pub fn max_abs_diff(&self, rhs: &Self) -> Result<T> {
        ensure_dim(self.mode_count, rhs.mode_count)?;
        let mut worst = (self.scalar - rhs.scalar).modulus();
        for kind in GeneratorKind::FAMILIES {
            let d = match (self.term(kind), rhs.term(kind)) {
                (Some(a), Some(b)) => a.max_abs_diff(b),
                (Some(a), None) | (None, Some(a)) => a.max_abs(),
                (None, None) => T::zero(),
            };
            worst = worst.max(d);
        }
        Ok(worst)
    }

    pub fn approx_eq(&self, rhs: &Self, tol: T) -> bool {
        matches!(self.max_abs_diff(rhs), Ok(d) if d < tol)
    }
}

impl<T: Real> fmt::Debug for SuperOpExpr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = f.debug_struct("SuperOpExpr");
        s.field("mode_count", &self.mode_count);
        for (kind, c) in self.terms() {
            s.field(kind.symbol(), c);
        }
        s.field("scalar", &self.scalar).finish()
    }
}

/// `lhs + rhs`, family by family.
pub fn expr_add<T: Real>(lhs: &SuperOpExpr<T>, rhs: &SuperOpExpr<T>) -> Result<SuperOpExpr<T>> {
    lhs.add(rhs)
}

pub fn expr_scale<T: Real>(c: Complex<T>, x: &SuperOpExpr<T>) -> SuperOpExpr<T> {
    x.scale(c)
}

pub fn commutator<T: Real>(lhs: &SuperOpExpr<T>, rhs: &SuperOpExpr<T>) -> Result<SuperOpExpr<T>> {
    lhs.commutator(rhs)
}

pub fn similarity_kpm<T: Real>(
    sign: Sign,
    b: &CoeffMatrix<T>,
    x: &SuperOpExpr<T>,
) -> Result<SuperOpExpr<T>> {
    x.similarity(sign, b)
}

/// `[X_A, Y_B]` for two single-family terms.
fn family_bracket<T: Real>(
    ka: GeneratorKind,
    a: &CoeffMatrix<T>,
    kb: GeneratorKind,
    b: &CoeffMatrix<T>,
) -> Vec<(GeneratorKind, CoeffMatrix<T>)> {
    use GeneratorKind::*;
    match (ka, kb) {
        (Identity, _) | (_, Identity) => vec![],
        // N(-) acts as a derivation: [N_A, X_B] = X_[A,B] for every family.
        (NMinus, _) => vec![(kb, a.commutator(b))],
        (_, NMinus) => vec![(ka, a.commutator(b))],
        (KZero, KZero) => vec![(NMinus, a.commutator(b).scale_real(lit(0.25)))],
        (KZero, KPlus) => vec![(KPlus, half_anticommutator(a, b))],
        (KZero, KMinus) => vec![(KMinus, -half_anticommutator(a, b))],
        (KPlus, KZero) => vec![(KPlus, -half_anticommutator(a, b))],
        (KMinus, KZero) => vec![(KMinus, half_anticommutator(a, b))],
        (KPlus, KPlus) | (KMinus, KMinus) => vec![],
        (KMinus, KPlus) => vec![
            (KZero, a.anticommutator(b)),
            (NMinus, -half_commutator(a, b)),
        ],
        (KPlus, KMinus) => vec![
            (KZero, -a.anticommutator(b)),
            (NMinus, -half_commutator(a, b)),
        ],
    }
}

/// `exp(K(sign)_B) X_A exp(-K(sign)_B)` for a single family term.
fn similarity_of_family<T: Real>(
    sign: Sign,
    kind: GeneratorKind,
    a: &CoeffMatrix<T>,
    b: &CoeffMatrix<T>,
) -> Vec<(GeneratorKind, CoeffMatrix<T>)> {
    use GeneratorKind::*;
    let raise = sign.family();
    let lower = match sign {
        Sign::Plus => KMinus,
        Sign::Minus => KPlus,
    };
    // The K(0) and cross terms flip sign between the two transforms.
    let s: T = match sign {
        Sign::Plus => T::one(),
        Sign::Minus => -T::one(),
    };
    match kind {
        NMinus => vec![(NMinus, a.clone()), (raise, -a.commutator(b))],
        KZero => vec![(KZero, a.clone()), (raise, half_anticommutator(a, b).scale_real(-s))],
        k if k == raise => vec![(raise, a.clone())],
        k if k == lower => vec![
            (lower, a.clone()),
            (KZero, a.anticommutator(b).scale_real(-s)),
            (NMinus, half_commutator(a, b)),
            (raise, &(b * a) * b),
        ],
        _ => vec![],
    }
}
