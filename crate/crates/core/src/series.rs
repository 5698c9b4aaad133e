//! Truncated formal power series in one and two variables over an exact
//! coefficient ring, and the generating-function checks built from them.

use std::fmt;

use num_traits::{One, Zero};

use crate::exact::{
    int_binomial, lpoly_binomial, lpoly_exact_div, rat, rat_int, ExactError, LPoly, Rat,
};
use crate::identities::{CheckContext, CheckReport, IdentityId, Params};

/// Exact coefficient ring for series.
pub trait Coeff: Clone + PartialEq + fmt::Display + Zero + One {
    fn add_assign_ref(&mut self, other: &Self);
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn scale(&self, k: &Rat) -> Self;
    fn from_rat(k: Rat) -> Self;
}

impl Coeff for Rat {
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn scale(&self, k: &Rat) -> Self {
        self * k
    }

    fn from_rat(k: Rat) -> Self {
        k
    }
}

impl Coeff for LPoly {
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn scale(&self, k: &Rat) -> Self {
        LPoly::scale(self, k)
    }

    fn from_rat(k: Rat) -> Self {
        LPoly::constant(k)
    }
}

/// `sum_{n=0}^{N} c_n t^n + O(t^{N+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series1<R> {
    coeffs: Vec<R>,
}

impl<R: Coeff> Series1<R> {
    /// Pads with zeros or truncates so that exactly `order + 1` coefficients
    /// are kept.
    pub fn new(order: usize, mut coeffs: Vec<R>) -> Self {
        coeffs.resize(order + 1, R::zero());
        Series1 { coeffs }
    }

    pub fn from_fn(order: usize, f: impl FnMut(usize) -> R) -> Self {
        Series1 {
            coeffs: (0..=order).map(f).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, n: usize) -> &R {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot extend a truncated series");
        Series1 {
            coeffs: self.coeffs[..=order].to_vec(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Series1::from_fn(order, |n| {
            let mut c = self.coeffs[n].clone();
            c.add_assign_ref(&other.coeffs[n]);
            c
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Series1::from_fn(order, |n| self.coeffs[n].sub_ref(&other.coeffs[n]))
    }

    /// Cauchy product, truncated at the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        Series1::from_fn(order, |n| {
            let mut c = R::zero();
            for i in 0..=n {
                let (a, b) = (&self.coeffs[i], &other.coeffs[n - i]);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                c.add_assign_ref(&a.mul_ref(b));
            }
            c
        })
    }

    pub fn scale(&self, k: &Rat) -> Self {
        Series1 {
            coeffs: self.coeffs.iter().map(|c| c.scale(k)).collect(),
        }
    }

    /// First index where the coefficients disagree.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        (0..=self.order().min(other.order())).find(|&n| self.coeffs[n] != other.coeffs[n])
    }
}

impl Series1<Rat> {
    /// The same series with constant λ-polynomial coefficients.
    pub fn lift(&self) -> Series1<LPoly> {
        Series1 {
            coeffs: self.coeffs.iter().cloned().map(LPoly::constant).collect(),
        }
    }
}

impl Series1<LPoly> {
    /// Coefficientwise constant λ-term (the λ → 0 limit).
    pub fn constant_terms(&self) -> Series1<Rat> {
        Series1 {
            coeffs: self.coeffs.iter().map(LPoly::constant_term).collect(),
        }
    }
}

/// `1/(1-t)`.
pub fn geometric(order: usize) -> Series1<Rat> {
    Series1::from_fn(order, |_| Rat::one())
}

/// `(1/(1-t))^r`, coefficient `n` equal to `binom(n+r-1, n)`.
pub fn pow_inv_one_minus_t(r: u64, order: usize) -> Series1<Rat> {
    Series1::from_fn(order, |n| {
        Rat::from_integer(int_binomial(n as i64 + r as i64 - 1, n as u64))
    })
}

/// `log(1/(1-t)) = sum_{n>=1} t^n / n`.
pub fn log_inv_one_minus_t(order: usize) -> Series1<Rat> {
    Series1::from_fn(order, |n| {
        if n == 0 {
            Rat::zero()
        } else {
            rat(1, n as i64)
        }
    })
}

/// `e^{-t}`.
pub fn exp_neg_t(order: usize) -> Series1<Rat> {
    let mut c = Rat::one();
    Series1::from_fn(order, |n| {
        if n > 0 {
            c = -c.clone() / rat_int(n as u64);
        }
        c.clone()
    })
}

/// `(1-t)^λ`, coefficient `n` equal to `(-1)^n binom(λ, n)`.
pub fn one_minus_t_pow_lambda(order: usize) -> Series1<LPoly> {
    let lam = LPoly::lambda();
    Series1::from_fn(order, |n| {
        let b = lpoly_binomial(&lam, n as u64);
        if n % 2 == 1 {
            -b
        } else {
            b
        }
    })
}

/// `log_{-λ}(1/(1-t)) = (1 - (1-t)^λ) / λ`, each coefficient divided by λ
/// exactly.
pub fn deg_log_series(order: usize) -> Result<Series1<LPoly>, ExactError> {
    let lam = LPoly::lambda();
    let pow = one_minus_t_pow_lambda(order);
    let mut coeffs = Vec::with_capacity(order + 1);
    for n in 0..=order {
        let numer = if n == 0 {
            LPoly::one() - pow.coeff(0).clone()
        } else {
            -pow.coeff(n)
        };
        coeffs.push(lpoly_exact_div(&numer, &lam)?);
    }
    Ok(Series1::new(order, coeffs))
}

fn series_report<R: Coeff>(
    id: IdentityId,
    params: Params,
    generated: &Series1<R>,
    sequence: &Series1<R>,
) -> CheckReport {
    match generated.first_difference(sequence) {
        None => {
            let top = generated.order();
            CheckReport {
                identity: id,
                params,
                lhs: generated.coeff(top).to_string(),
                rhs: sequence.coeff(top).to_string(),
                pass: true,
                first_diff: None,
                note: None,
            }
        }
        Some(n) => CheckReport {
            identity: id,
            params,
            lhs: generated.coeff(n).to_string(),
            rhs: sequence.coeff(n).to_string(),
            pass: false,
            first_diff: Some(n),
            note: Some(format!("coefficient of t^{n} differs")),
        },
    }
}

fn order_params(order: usize, r: Option<u64>) -> Params {
    Params {
        order: Some(order as u64),
        r,
        ..Default::default()
    }
}

/// `e^{-t}/(1-t) = sum D_n t^n/n!`: `n!` times each coefficient of the product
/// must equal `D_n`.
pub fn gf_derangement_check(ctx: &CheckContext, order: usize) -> CheckReport {
    let product = geometric(order).mul(&exp_neg_t(order));
    let generated = Series1::from_fn(order, |n| {
        product.coeff(n) * Rat::from_integer(ctx.factorial(n))
    });
    let sequence = Series1::from_fn(order, |n| Rat::from_integer(ctx.seq.derangement(n).clone()));
    series_report(
        IdentityId::GfDerangement,
        order_params(order, None),
        &generated,
        &sequence,
    )
}

/// `(1/(1-t)) log(1/(1-t)) = sum H_n t^n`.
pub fn gf_harmonic_check(ctx: &CheckContext, order: usize) -> CheckReport {
    let generated = geometric(order).mul(&log_inv_one_minus_t(order));
    let sequence = Series1::from_fn(order, |n| ctx.seq.harmonic(n).clone());
    series_report(
        IdentityId::GfHarmonic,
        order_params(order, None),
        &generated,
        &sequence,
    )
}

/// `(1/(1-t))^r log(1/(1-t)) = sum H_n^{(r)} t^n`.
pub fn gf_hyperharmonic_check(ctx: &CheckContext, order: usize, r: u32) -> CheckReport {
    let generated = pow_inv_one_minus_t(r as u64, order).mul(&log_inv_one_minus_t(order));
    let sequence = Series1::from_fn(order, |n| ctx.seq.hyperharmonic(n, r).clone());
    series_report(
        IdentityId::GfHyperharmonic,
        order_params(order, Some(r as u64)),
        &generated,
        &sequence,
    )
}

fn deg_log_or_failure(
    id: IdentityId,
    params: &Params,
    order: usize,
) -> Result<Series1<LPoly>, Box<CheckReport>> {
    deg_log_series(order).map_err(|e| {
        Box::new(CheckReport {
            identity: id,
            params: params.clone(),
            lhs: String::new(),
            rhs: String::new(),
            pass: false,
            first_diff: None,
            note: Some(e.to_string()),
        })
    })
}

/// `(1/(1-t)) log_{-λ}(1/(1-t)) = sum H_{n,λ} t^n`.
pub fn gf_deg_harmonic_check(ctx: &CheckContext, order: usize) -> CheckReport {
    let params = order_params(order, None);
    let log = match deg_log_or_failure(IdentityId::GfDegHarmonic, &params, order) {
        Ok(s) => s,
        Err(report) => return *report,
    };
    let generated = geometric(order).lift().mul(&log);
    let sequence = Series1::from_fn(order, |n| ctx.seq.deg_harmonic(n).clone());
    series_report(IdentityId::GfDegHarmonic, params, &generated, &sequence)
}

/// `(1/(1-t))^r log_{-λ}(1/(1-t)) = sum H_{n,λ}^{(r)} t^n`.
pub fn gf_deg_hyperharmonic_check(ctx: &CheckContext, order: usize, r: u32) -> CheckReport {
    let params = order_params(order, Some(r as u64));
    let log = match deg_log_or_failure(IdentityId::GfDegHyperharmonic, &params, order) {
        Ok(s) => s,
        Err(report) => return *report,
    };
    let generated = pow_inv_one_minus_t(r as u64, order).lift().mul(&log);
    let sequence = Series1::from_fn(order, |n| ctx.seq.deg_hyperharmonic(n, r).clone());
    series_report(
        IdentityId::GfDegHyperharmonic,
        params,
        &generated,
        &sequence,
    )
}

/// `sum_{i+j<=N} c[i][j] x^i y^j`, truncated by total degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series2<R> {
    order: usize,
    // rows[i][j] is the coefficient of x^i y^j, j <= order - i
    rows: Vec<Vec<R>>,
}

impl<R: Coeff> Series2<R> {
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let rows = (0..=order)
            .map(|i| (0..=order - i).map(|j| f(i, j)).collect())
            .collect();
        Series2 { order, rows }
    }

    pub fn zero(order: usize) -> Self {
        Self::from_fn(order, |_, _| R::zero())
    }

    pub fn one(order: usize) -> Self {
        Self::from_fn(order, |i, j| if i + j == 0 { R::one() } else { R::zero() })
    }

    /// A series in `x` alone.
    pub fn in_x(s: &Series1<R>, order: usize) -> Self {
        Self::from_fn(order, |i, j| {
            if j == 0 {
                s.coeff(i).clone()
            } else {
                R::zero()
            }
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficient of `x^i y^j`.
    pub fn coeff(&self, i: usize, j: usize) -> &R {
        &self.rows[i][j]
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        Self::from_fn(order, |i, j| {
            let mut c = self.rows[i][j].clone();
            c.add_assign_ref(&other.rows[i][j]);
            c
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let mut out = Self::zero(order);
        for i1 in 0..=order {
            for j1 in 0..=order - i1 {
                let a = &self.rows[i1][j1];
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..=order - i1 - j1 {
                    for j2 in 0..=order - i1 - j1 - i2 {
                        let b = &other.rows[i2][j2];
                        if b.is_zero() {
                            continue;
                        }
                        out.rows[i1 + i2][j1 + j2].add_assign_ref(&a.mul_ref(b));
                    }
                }
            }
        }
        out
    }

    /// `sum_k weights[k] * self^k` for `k <= order`; `self` must have zero
    /// constant term.
    pub fn compose_into(&self, weights: &Series1<R>) -> Self {
        assert!(
            self.rows[0][0].is_zero(),
            "inner series must vanish at the origin"
        );
        let order = self.order.min(weights.order());
        let mut acc = Self::zero(order);
        let mut power = Self::one(order);
        for k in 0..=order {
            let w = weights.coeff(k);
            if !w.is_zero() {
                acc = acc.add(&Self::from_fn(order, |i, j| w.mul_ref(&power.rows[i][j])));
            }
            power = power.mul(self);
        }
        acc
    }

    /// First `(i, j)` in total-degree order where the coefficients differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        let order = self.order.min(other.order);
        (0..=order)
            .flat_map(|d| (0..=d).map(move |i| (i, d - i)))
            .find(|&(i, j)| self.rows[i][j] != other.rows[i][j])
    }
}

impl Series2<LPoly> {
    pub fn constant_terms(&self) -> Series2<Rat> {
        Series2::from_fn(self.order, |i, j| self.rows[i][j].constant_term())
    }
}

/// `1/(1-x-y)`, coefficient `binom(i+j, i)`.
pub fn bivariate_geometric<R: Coeff>(order: usize) -> Series2<R> {
    Series2::from_fn(order, |i, j| {
        R::from_rat(Rat::from_integer(int_binomial((i + j) as i64, i as u64)))
    })
}

/// `u = y/(1-x)`, the argument that the split forms expand in.
fn y_over_one_minus_x<R: Coeff>(geometric: &Series1<R>, order: usize) -> Series2<R> {
    let y = Series2::from_fn(order, |i, j| {
        if (i, j) == (0, 1) {
            R::one()
        } else {
            R::zero()
        }
    });
    y.mul(&Series2::in_x(geometric, order))
}

fn bivariate_report<R: Coeff>(
    id: IdentityId,
    order: usize,
    lhs: &Series2<R>,
    closed: &Series2<R>,
    split: &Series2<R>,
) -> CheckReport {
    let params = order_params(order, None);
    let mismatch = lhs
        .first_difference(closed)
        .map(|ij| (ij, closed, "closed form"))
        .or_else(|| {
            lhs.first_difference(split)
                .map(|ij| (ij, split, "split form"))
        });
    match mismatch {
        None => CheckReport {
            identity: id,
            params,
            lhs: lhs.coeff(order, 0).to_string(),
            rhs: closed.coeff(order, 0).to_string(),
            pass: true,
            first_diff: None,
            note: None,
        },
        Some(((i, j), other, which)) => CheckReport {
            identity: id,
            params,
            lhs: lhs.coeff(i, j).to_string(),
            rhs: other.coeff(i, j).to_string(),
            pass: false,
            first_diff: Some(i + j),
            note: Some(format!("{which} differs at x^{i} y^{j}")),
        },
    }
}

/// `sum D_{n+m} x^n/n! y^m/m!` against `e^{-(x+y)}/(1-x-y)` and against the
/// split form `(e^{-x}/(1-x)) * 1/(1 - y/(1-x)) * e^{-y}`.
pub fn bivariate_derangement_check(ctx: &CheckContext, order: usize) -> CheckReport {
    let lhs: Series2<Rat> = Series2::from_fn(order, |i, j| {
        Rat::new(
            ctx.seq.derangement(i + j).clone(),
            ctx.factorial(i) * ctx.factorial(j),
        )
    });
    let e = exp_neg_t(order);
    let exp_both = Series2::from_fn(order, |i, j| e.coeff(i) * e.coeff(j));
    let closed = bivariate_geometric::<Rat>(order).mul(&exp_both);

    let front = Series2::in_x(&geometric(order).mul(&e), order);
    let geometric_in_u =
        y_over_one_minus_x(&geometric(order), order).compose_into(&geometric(order));
    let exp_y = Series2::from_fn(order, |i, j| {
        if i == 0 {
            e.coeff(j).clone()
        } else {
            Rat::zero()
        }
    });
    let split = front.mul(&geometric_in_u).mul(&exp_y);

    bivariate_report(IdentityId::BivDerangement, order, &lhs, &closed, &split)
}

/// `sum binom(m+n,m) H_{n+m} x^n y^m` against `(1/(1-x-y)) log(1/(1-x-y))`
/// and against the split form
/// `(1/(1-x)) log(1/(1-x)) / (1-u) + (1/(1-x)) log(1/(1-u)) / (1-u)`,
/// `u = y/(1-x)`.
pub fn bivariate_harmonic_check(ctx: &CheckContext, order: usize) -> CheckReport {
    let lhs: Series2<Rat> = Series2::from_fn(order, |i, j| {
        ctx.seq.harmonic(i + j) * Rat::from_integer(int_binomial((i + j) as i64, j as u64))
    });
    // log(1/(1-x-y)) = sum_k (x+y)^k / k
    let log_xy = Series2::from_fn(order, |i, j| {
        let d = i + j;
        if d == 0 {
            Rat::zero()
        } else {
            Rat::from_integer(int_binomial(d as i64, i as u64)) / rat_int(d as u64)
        }
    });
    let closed = bivariate_geometric::<Rat>(order).mul(&log_xy);

    let g = geometric(order);
    let u = y_over_one_minus_x(&g, order);
    let inv_one_minus_u = u.compose_into(&g);
    let log_u = u.compose_into(&log_inv_one_minus_t(order));
    let gx = Series2::in_x(&g, order);
    let harmonic_x = Series2::in_x(&g.mul(&log_inv_one_minus_t(order)), order);
    let split = harmonic_x
        .mul(&inv_one_minus_u)
        .add(&gx.mul(&inv_one_minus_u).mul(&log_u));

    bivariate_report(IdentityId::BivHarmonic, order, &lhs, &closed, &split)
}

/// `sum binom(n+m,m) H_{n+m,λ} x^n y^m` against
/// `(1/(1-x-y)) log_{-λ}(1/(1-x-y))` with `(1-x-y)^λ` built from its closed
/// coefficients, and against the split form
/// `(1/(1-x)) log_{-λ}(1/(1-x)) / (1-u) + (1/(1-x))^{1-λ} log_{-λ}(1/(1-u)) / (1-u)`.
pub fn bivariate_deg_harmonic_check(ctx: &CheckContext, order: usize) -> CheckReport {
    let failure = |e: ExactError| CheckReport {
        identity: IdentityId::BivDegHarmonic,
        params: order_params(order, None),
        lhs: String::new(),
        rhs: String::new(),
        pass: false,
        first_diff: None,
        note: Some(e.to_string()),
    };
    let lam = LPoly::lambda();
    let lhs: Series2<LPoly> = Series2::from_fn(order, |i, j| {
        ctx.seq
            .deg_harmonic(i + j)
            .scale(&Rat::from_integer(int_binomial((i + j) as i64, j as u64)))
    });

    // (1-x-y)^λ: coefficient (-1)^{i+j} binom(λ, i+j) binom(i+j, i)
    let lambda_binomials: Vec<LPoly> = (0..=order)
        .map(|d| lpoly_binomial(&lam, d as u64))
        .collect();
    let mut log_coeffs = Vec::with_capacity(order + 1);
    for i in 0..=order {
        let mut row = Vec::with_capacity(order + 1 - i);
        for j in 0..=order - i {
            let d = i + j;
            let sign = if d % 2 == 0 { 1 } else { -1 };
            let pow = lambda_binomials[d]
                .scale(&(rat_int(sign) * Rat::from_integer(int_binomial(d as i64, i as u64))));
            let numer = if d == 0 { LPoly::one() - pow } else { -pow };
            match lpoly_exact_div(&numer, &lam) {
                Ok(q) => row.push(q),
                Err(e) => return failure(e),
            }
        }
        log_coeffs.push(row);
    }
    let log_xy = Series2::from_fn(order, |i, j| log_coeffs[i][j].clone());
    let closed = bivariate_geometric::<LPoly>(order).mul(&log_xy);

    let deg_log = match deg_log_series(order) {
        Ok(s) => s,
        Err(e) => return failure(e),
    };
    let g = geometric(order).lift();
    let u = y_over_one_minus_x(&g, order);
    let inv_one_minus_u = u.compose_into(&g);
    let deg_log_u = u.compose_into(&deg_log);
    let deg_harmonic_x = Series2::in_x(&g.mul(&deg_log), order);
    // (1/(1-x))^{1-λ}: coefficient binom(k-λ, k)
    let gen_power = Series1::from_fn(order, |k| {
        lpoly_binomial(&LPoly::affine(rat_int(k as u64), rat_int(-1)), k as u64)
    });
    let split = deg_harmonic_x.mul(&inv_one_minus_u).add(
        &Series2::in_x(&gen_power, order)
            .mul(&inv_one_minus_u)
            .mul(&deg_log_u),
    );

    bivariate_report(IdentityId::BivDegHarmonic, order, &lhs, &closed, &split)
}
