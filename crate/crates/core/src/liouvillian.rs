//! Multi-mode thermal Liouvillian, its two-step similarity diagonalization,
//! the zero-order (pure relaxation) generator and the conjugate generator.
//!
//! The Liouvillian in algebra form is
//!
//! ```text
//! L = N(-)_{-i Omega} - K(0)_{(2n+1) Gamma} + K(+)_{n Gamma} + K(-)_{(n+1) Gamma} + Tr(Gamma)/2
//! ```
//!
//! Conjugating first by `exp(K(+)_B)` and then by `exp(K(-)_A)` with
//! `B = -n/(n+1) I` and `A = (n+1) I` removes both raising and lowering
//! families, leaving `L_d = N(-)_{-i Omega} + K(0)_{-Gamma} + Tr(Gamma)/2`.

use num_complex::Complex;

use crate::algebra::{GeneratorKind, Sign, SuperOpExpr};
use crate::coeff::CoeffMatrix;
use crate::error::{ensure_dim, Error, Result, SpecViolation};
use crate::scalar::{imag_unit, lit, real, to_f64, Real};

/// Relative tolerance for the Hermiticity checks on the frequency and
/// relaxation matrices.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
/// Relative floor on the smallest eigenvalue of the relaxation matrix.
pub const POSITIVITY_FLOOR: f64 = 1e-14;

/// Physical input: frequency matrix, relaxation matrix, thermal occupation.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec<T: Real> {
    omega: CoeffMatrix<T>,
    gamma: CoeffMatrix<T>,
    n_thermal: T,
}

impl<T: Real> SystemSpec<T> {
    /// Validates and builds a specification. The mode count is the dimension
    /// of `omega`.
    pub fn new(omega: CoeffMatrix<T>, gamma: CoeffMatrix<T>, n_thermal: T) -> Result<Self> {
        let m = omega.dim();
        if m == 0 {
            return Err(SpecViolation::NoModes.into());
        }
        if gamma.dim() != m {
            return Err(SpecViolation::Shape {
                name: "gamma",
                expected: m,
                rows: gamma.dim(),
                cols: gamma.dim(),
            }
            .into());
        }
        if !omega.is_finite() {
            return Err(SpecViolation::NonFinite { name: "omega" }.into());
        }
        if !gamma.is_finite() {
            return Err(SpecViolation::NonFinite { name: "gamma" }.into());
        }
        let rel_tol = lit::<T>(HERMITICITY_TOLERANCE).max(T::default_epsilon() * lit(16.0));
        let dev = omega.hermiticity_deviation();
        if dev > rel_tol * omega.max_abs() {
            return Err(SpecViolation::OmegaNotHermitian { deviation: to_f64(dev) }.into());
        }
        let dev = gamma.hermiticity_deviation();
        if dev > rel_tol * gamma.max_abs() {
            return Err(SpecViolation::GammaNotHermitian { deviation: to_f64(dev) }.into());
        }
        let min_eig = gamma.hermitian_eigenvalues()[0];
        if !min_eig.is_finite() || min_eig <= lit::<T>(POSITIVITY_FLOOR) * gamma.max_abs() {
            return Err(SpecViolation::GammaNotPositiveDefinite {
                min_eigenvalue: to_f64(min_eig),
            }
            .into());
        }
        if !n_thermal.is_finite() || n_thermal < T::zero() {
            return Err(SpecViolation::NegativeThermalOccupation {
                value: to_f64(n_thermal),
            }
            .into());
        }
        Ok(Self {
            omega,
            gamma,
            n_thermal,
        })
    }

    /// Single mode with frequency `omega` and damping rate `gamma`.
    pub fn single_mode(omega: T, gamma: T, n_thermal: T) -> Result<Self> {
        Self::new(
            CoeffMatrix::from_real_diagonal(&[omega]),
            CoeffMatrix::from_real_diagonal(&[gamma]),
            n_thermal,
        )
    }

    pub fn mode_count(&self) -> usize {
        self.omega.dim()
    }

    pub fn omega(&self) -> &CoeffMatrix<T> {
        &self.omega
    }

    pub fn gamma(&self) -> &CoeffMatrix<T> {
        &self.gamma
    }

    pub fn n_thermal(&self) -> T {
        self.n_thermal
    }

    /// Same matrices, different thermal occupation.
    pub fn with_thermal(&self, n_thermal: T) -> Result<Self> {
        Self::new(self.omega.clone(), self.gamma.clone(), n_thermal)
    }

    /// `-i Omega`.
    pub fn hamiltonian_coefficient(&self) -> CoeffMatrix<T> {
        self.omega.scale(-imag_unit::<T>())
    }

    /// `Tr(Gamma) / 2`, the identity term shared by every generator here.
    pub fn identity_scalar(&self) -> Complex<T> {
        self.gamma.trace() * real(lit::<T>(0.5))
    }

    fn identity_matrix(&self) -> CoeffMatrix<T> {
        CoeffMatrix::identity(self.mode_count())
    }
}

/// Assembles the Liouvillian in algebra form.
pub fn build_liouvillian<T: Real>(spec: &SystemSpec<T>) -> SuperOpExpr<T> {
    let n = spec.n_thermal();
    let one = T::one();
    let two = lit::<T>(2.0);
    let g = spec.gamma();
    let mut l = SuperOpExpr::scalar_term(spec.mode_count(), spec.identity_scalar());
    for (kind, c) in [
        (GeneratorKind::NMinus, spec.hamiltonian_coefficient()),
        (GeneratorKind::KZero, g.scale_real(-(two * n + one))),
        (GeneratorKind::KPlus, g.scale_real(n)),
        (GeneratorKind::KMinus, g.scale_real(n + one)),
    ] {
        l = l.with(kind, c).expect("coefficients share the mode count");
    }
    l
}

/// Coefficients after `exp(K(+)_B) L exp(-K(+)_B) = N(-)_P - K(0)_Q + K(+)_R + ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstTransform<T: Real> {
    pub p: CoeffMatrix<T>,
    pub q: CoeffMatrix<T>,
    pub r: CoeffMatrix<T>,
}

/// Coefficients after the second transform, `N(-)_X + K(0)_Y + K(+)_R + K(-)_Z + ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformIntermediate<T: Real> {
    pub p: CoeffMatrix<T>,
    pub q: CoeffMatrix<T>,
    pub r: CoeffMatrix<T>,
    pub x: CoeffMatrix<T>,
    pub y: CoeffMatrix<T>,
    pub z: CoeffMatrix<T>,
}

/// Applies `exp(K(+)_B) . exp(-K(+)_B)` with the algebra engine and reads
/// `P`, `Q`, `R` off the result.
pub fn transform_once<T: Real>(
    l: &SuperOpExpr<T>,
    b: &CoeffMatrix<T>,
) -> Result<(SuperOpExpr<T>, FirstTransform<T>)> {
    let out = l.similarity(Sign::Plus, b)?;
    let pqr = FirstTransform {
        p: out.coefficient(GeneratorKind::NMinus),
        q: -out.coefficient(GeneratorKind::KZero),
        r: out.coefficient(GeneratorKind::KPlus),
    };
    Ok((out, pqr))
}

/// Applies `exp(K(-)_A) exp(K(+)_B) . exp(-K(+)_B) exp(-K(-)_A)`.
pub fn transform_twice<T: Real>(
    l: &SuperOpExpr<T>,
    a: &CoeffMatrix<T>,
    b: &CoeffMatrix<T>,
) -> Result<(SuperOpExpr<T>, TransformIntermediate<T>)> {
    ensure_dim(l.mode_count(), a.dim())?;
    let (once, first) = transform_once(l, b)?;
    let twice = once.similarity(Sign::Minus, a)?;
    let inter = TransformIntermediate {
        p: first.p,
        q: first.q,
        r: first.r,
        x: twice.coefficient(GeneratorKind::NMinus),
        y: twice.coefficient(GeneratorKind::KZero),
        z: twice.coefficient(GeneratorKind::KMinus),
    };
    Ok((twice, inter))
}

/// Hand-derived `P`, `Q`, `R` for the standard Liouvillian:
///
/// ```text
/// P = -i Omega + (n+1)/2 [Gamma, B]
/// Q = (2n+1) Gamma + (n+1) {Gamma, B}
/// R = i [Omega, B] + (2n+1)/2 {Gamma, B} + n Gamma + (n+1) B Gamma B
/// ```
pub fn first_transform_coefficients<T: Real>(
    spec: &SystemSpec<T>,
    b: &CoeffMatrix<T>,
) -> Result<FirstTransform<T>> {
    ensure_dim(spec.mode_count(), b.dim())?;
    let n = spec.n_thermal();
    let (one, two, half) = (T::one(), lit::<T>(2.0), lit::<T>(0.5));
    let (om, g) = (spec.omega(), spec.gamma());
    let p = &spec.hamiltonian_coefficient() + &g.commutator(b).scale_real(half * (n + one));
    let q = &g.scale_real(two * n + one) + &g.anticommutator(b).scale_real(n + one);
    let r = &om.commutator(b).scale(imag_unit())
        + &g.anticommutator(b).scale_real(half * (two * n + one));
    let r = &(&r + &g.scale_real(n)) + &(&(b * g) * b).scale_real(n + one);
    Ok(FirstTransform { p, q, r })
}

/// Hand-derived `X = P + [R,A]/2`, `Y = {R,A} - Q`,
/// `Z = [A,P] - {Q,A}/2 + ARA + (n+1) Gamma`.
pub fn second_transform_coefficients<T: Real>(
    spec: &SystemSpec<T>,
    a: &CoeffMatrix<T>,
    b: &CoeffMatrix<T>,
) -> Result<TransformIntermediate<T>> {
    ensure_dim(spec.mode_count(), a.dim())?;
    let FirstTransform { p, q, r } = first_transform_coefficients(spec, b)?;
    let half = lit::<T>(0.5);
    let n = spec.n_thermal();
    let x = &p + &r.commutator(a).scale_real(half);
    let y = &r.anticommutator(a) - &q;
    let z = &a.commutator(&p) - &q.anticommutator(a).scale_real(half);
    let z = &(&z + &(&(a * &r) * a)) + &spec.gamma().scale_real(n + T::one());
    Ok(TransformIntermediate { p, q, r, x, y, z })
}

/// Closed-form solution of `R(B) = 0`, `Z(A, B) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RiccatiSolution<T: Real> {
    pub a_matrix: CoeffMatrix<T>,
    pub b_matrix: CoeffMatrix<T>,
    pub linear_check: LinearAnsatzCheck<T>,
}

/// Perturbative cross-check `B ~ B0 + n B1` with `B0 = 0`, `B1 = -I`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearAnsatzCheck<T: Real> {
    pub b0: CoeffMatrix<T>,
    pub b1: CoeffMatrix<T>,
    /// `max |(i Omega + Gamma/2) B0 + B0 (-i Omega + Gamma/2) + B0 Gamma B0|`
    pub zero_order_residual: T,
    /// `max |(i Omega + Gamma/2) B1 + B1 (-i Omega + Gamma/2) + Gamma|`
    pub first_order_residual: T,
    /// `max |B_exact - (B0 + n B1)|`, which must be `O(n^2)`.
    pub second_order_gap: T,
}

/// Evaluates the first-order expansion of `R(B) = 0` around `n = 0`.
pub fn linear_ansatz_check<T: Real>(spec: &SystemSpec<T>, b_exact: &CoeffMatrix<T>) -> LinearAnsatzCheck<T> {
    let m = spec.mode_count();
    let half = lit::<T>(0.5);
    let i = imag_unit::<T>();
    let left = &spec.omega().scale(i) + &spec.gamma().scale_real(half);
    let right = &spec.omega().scale(-i) + &spec.gamma().scale_real(half);
    let b0 = CoeffMatrix::zeros(m);
    let b1 = -CoeffMatrix::identity(m);
    let zero_eq = &(&(&left * &b0) + &(&b0 * &right)) + &(&(&b0 * spec.gamma()) * &b0);
    let first_eq = &(&(&left * &b1) + &(&b1 * &right)) + spec.gamma();
    let approx = &b0 + &b1.scale_real(spec.n_thermal());
    LinearAnsatzCheck {
        zero_order_residual: zero_eq.max_abs(),
        first_order_residual: first_eq.max_abs(),
        second_order_gap: b_exact.max_abs_diff(&approx),
        b0,
        b1,
    }
}

/// Returns `A = (n+1) I`, `B = -n/(n+1) I`, after checking the linear-in-`n`
/// ansatz agrees with it to first order.
pub fn solve_riccati<T: Real>(spec: &SystemSpec<T>) -> Result<RiccatiSolution<T>> {
    let n = spec.n_thermal();
    let one = T::one();
    let a_matrix = spec.identity_matrix().scale_real(n + one);
    let b_matrix = spec.identity_matrix().scale_real(-n / (n + one));
    let linear_check = linear_ansatz_check(spec, &b_matrix);
    let tol = consistency_tolerance(spec);
    let worst = linear_check.zero_order_residual.max(linear_check.first_order_residual);
    if worst > tol {
        return Err(Error::Consistency {
            what: "linear Riccati ansatz",
            residual: to_f64(worst),
            tolerance: to_f64(tol),
        });
    }
    // |B_exact - B_linear| = n^2 / (n+1) <= n^2
    if linear_check.second_order_gap > n * n + tol {
        return Err(Error::Consistency {
            what: "second-order gap of the Riccati ansatz",
            residual: to_f64(linear_check.second_order_gap),
            tolerance: to_f64(n * n),
        });
    }
    Ok(RiccatiSolution {
        a_matrix,
        b_matrix,
        linear_check,
    })
}

/// Output of [`diagonalize`].
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalizationResult<T: Real> {
    pub a_matrix: CoeffMatrix<T>,
    pub b_matrix: CoeffMatrix<T>,
    /// Contains only `N(-)`, `K(0)` and identity terms.
    pub l_diag: SuperOpExpr<T>,
    /// `max |R(B)|` from the hand-derived formula.
    pub residual_r: T,
    /// `max |Z(A, B)|` from the hand-derived formula.
    pub residual_z: T,
    pub intermediate: TransformIntermediate<T>,
}

/// Absolute tolerance for internal-consistency checks, scaled by the input
/// magnitude.
pub fn consistency_tolerance<T: Real>(spec: &SystemSpec<T>) -> T {
    let base = lit::<T>(1e-10).max(T::default_epsilon() * lit(1e4));
    let scale = T::one().max(spec.omega().max_abs()).max(spec.gamma().max_abs());
    let n1 = spec.n_thermal() + T::one();
    base * scale * n1 * n1
}

/// `N(-)_{-i Omega} + K(0)_{-Gamma} + Tr(Gamma)/2`.
pub fn diagonal_form<T: Real>(spec: &SystemSpec<T>) -> SuperOpExpr<T> {
    SuperOpExpr::n_minus(spec.hamiltonian_coefficient())
        .with(GeneratorKind::KZero, -spec.gamma())
        .expect("dimensions agree")
        .add(&SuperOpExpr::scalar_term(spec.mode_count(), spec.identity_scalar()))
        .expect("dimensions agree")
}

/// Runs both similarity transforms with the Riccati solution and returns the
/// diagonal Liouvillian with its residuals.
pub fn diagonalize<T: Real>(spec: &SystemSpec<T>) -> Result<DiagonalizationResult<T>> {
    let sol = solve_riccati(spec)?;
    let l = build_liouvillian(spec);
    let (twice, engine) = transform_twice(&l, &sol.a_matrix, &sol.b_matrix)?;
    let closed = second_transform_coefficients(spec, &sol.a_matrix, &sol.b_matrix)?;
    let residual_r = closed.r.max_abs();
    let residual_z = closed.z.max_abs();
    let tol = consistency_tolerance(spec);

    let engine_residual = engine.r.max_abs().max(engine.z.max_abs());
    for (what, residual) in [
        ("Riccati residual R", residual_r),
        ("Riccati residual Z", residual_z),
        ("engine K+/K- residual", engine_residual),
    ] {
        if residual > tol {
            return Err(Error::Consistency {
                what,
                residual: to_f64(residual),
                tolerance: to_f64(tol),
            });
        }
    }

    let l_diag = twice.without(GeneratorKind::KPlus).without(GeneratorKind::KMinus);
    let gap = l_diag.max_abs_diff(&diagonal_form(spec))?;
    if gap > tol {
        return Err(Error::Consistency {
            what: "diagonal Liouvillian",
            residual: to_f64(gap),
            tolerance: to_f64(tol),
        });
    }
    Ok(DiagonalizationResult {
        a_matrix: sol.a_matrix,
        b_matrix: sol.b_matrix,
        l_diag,
        residual_r,
        residual_z,
        intermediate: engine,
    })
}

/// Pure-relaxation generator `N(-)_{-i Omega} + K(0)_{-Gamma} + K(-)_{Gamma} + Tr(Gamma)/2`,
/// checked against `exp(-K(-)_I) L_d exp(K(-)_I)`.
pub fn zero_order<T: Real>(spec: &SystemSpec<T>) -> Result<SuperOpExpr<T>> {
    let l0 = diagonal_form(spec).with(GeneratorKind::KMinus, spec.gamma().clone())?;
    let via_similarity = diagonal_form(spec).similarity(Sign::Minus, &-spec.identity_matrix())?;
    let gap = via_similarity.max_abs_diff(&l0)?;
    let tol = consistency_tolerance(spec);
    if gap > tol {
        return Err(Error::Consistency {
            what: "zero-order similarity",
            residual: to_f64(gap),
            tolerance: to_f64(tol),
        });
    }
    Ok(l0)
}

/// Dual generator under the trace pairing `Tr(A (L rho)) = Tr((L+ A) rho)`.
///
/// Left and right multiplications trade places, so `K(+)` and `K(-)` swap
/// coefficients, `N(-)_C` becomes `N(-)_{-C}`, and `K(0)` and the scalar are
/// unchanged. No transposition of the coefficients is involved.
pub fn conjugate<T: Real>(l: &SuperOpExpr<T>) -> SuperOpExpr<T> {
    let m = l.mode_count();
    let mut out = SuperOpExpr::scalar_term(m, l.scalar());
    for (kind, c) in l.terms() {
        let (k, c) = match kind {
            GeneratorKind::NMinus => (GeneratorKind::NMinus, -c),
            GeneratorKind::KPlus => (GeneratorKind::KMinus, c.clone()),
            GeneratorKind::KMinus => (GeneratorKind::KPlus, c.clone()),
            other => (other, c.clone()),
        };
        out = out.with(k, c).expect("same mode count");
    }
    out
}

/// One root pair `(alpha, beta)` of the single-mode diagonalization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleModeBranch<T: Real> {
    pub alpha: T,
    pub beta: T,
    /// Coefficient of `K(0)` left after both transforms.
    pub k_zero: T,
    /// `|c beta^2 - a beta + b|`
    pub plus_residual: T,
    /// `|(a - 2 c beta) alpha + c|`
    pub minus_residual: T,
}

/// Both roots of the single-mode problem
/// `exp(alpha K-) exp(beta K+) (a K0 + b K+ + c K-) exp(-beta K+) exp(-alpha K-)`
/// with `a = 2n+1`, `b = -n`, `c = -(n+1)`. The first entry is the
/// relaxation branch `(n+1, -n/(n+1))`, the second the pump branch
/// `(-(n+1), -1)`.
pub fn single_mode_branches<T: Real>(n_thermal: T) -> [SingleModeBranch<T>; 2] {
    let one = T::one();
    let two = lit::<T>(2.0);
    let (a, b, c) = (two * n_thermal + one, -n_thermal, -(n_thermal + one));
    let branch = |alpha: T, beta: T| {
        let k_zero = a + two * (b * alpha - c * beta - a * alpha * beta + c * alpha * beta * beta);
        SingleModeBranch {
            alpha,
            beta,
            k_zero,
            plus_residual: (c * beta * beta - a * beta + b).abs(),
            minus_residual: ((a - two * c * beta) * alpha + c).abs(),
        }
    };
    [
        branch(n_thermal + one, -n_thermal / (n_thermal + one)),
        branch(-(n_thermal + one), -one),
    ]
}
