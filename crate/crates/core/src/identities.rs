//! Both sides of every recurrence and closed form, evaluated exactly.
//!
//! Each check returns a [`CheckReport`] carrying the two sides as exact text.
//! Checks read from a prepared [`CheckContext`]; call
//! [`CheckContext::prepare`] with the sweep bounds first, after which the
//! context can be shared across threads.

use std::fmt;

use num_traits::{One, Zero};

use crate::exact::{
    deg_log_rational, factorial, lpoly_binomial, rat_binomial, rat_int, rat_pow, BinomialTable,
    ExactError, ExactValue, Int, LPoly, Rat,
};
use crate::sequences::SequenceCache;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdentityId {
    DerangementRecurrence,
    HarmonicRecurrence,
    DegHarmonicRecurrence,
    DegHarmonicRecurrenceAt,
    HyperharmonicClosedForm,
    DegHyperharmonicClosedForm,
    HyperharmonicSum,
    DegHyperharmonicSum,
    DegLogProduct,
    GfDerangement,
    GfHarmonic,
    GfHyperharmonic,
    GfDegHarmonic,
    GfDegHyperharmonic,
    BivDerangement,
    BivHarmonic,
    BivDegHarmonic,
}

impl IdentityId {
    pub const ALL: [IdentityId; 17] = [
        IdentityId::DerangementRecurrence,
        IdentityId::HarmonicRecurrence,
        IdentityId::DegHarmonicRecurrence,
        IdentityId::DegHarmonicRecurrenceAt,
        IdentityId::HyperharmonicClosedForm,
        IdentityId::DegHyperharmonicClosedForm,
        IdentityId::HyperharmonicSum,
        IdentityId::DegHyperharmonicSum,
        IdentityId::DegLogProduct,
        IdentityId::GfDerangement,
        IdentityId::GfHarmonic,
        IdentityId::GfHyperharmonic,
        IdentityId::GfDegHarmonic,
        IdentityId::GfDegHyperharmonic,
        IdentityId::BivDerangement,
        IdentityId::BivHarmonic,
        IdentityId::BivDegHarmonic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityId::DerangementRecurrence => "thm1",
            IdentityId::HarmonicRecurrence => "thm2",
            IdentityId::DegHarmonicRecurrence => "thm3",
            IdentityId::DegHarmonicRecurrenceAt => "thm3-at",
            IdentityId::HyperharmonicClosedForm => "eq10",
            IdentityId::DegHyperharmonicClosedForm => "eq13",
            IdentityId::HyperharmonicSum => "cor-hyper",
            IdentityId::DegHyperharmonicSum => "eq13-corollary",
            IdentityId::DegLogProduct => "eq6",
            IdentityId::GfDerangement => "gf-derangement",
            IdentityId::GfHarmonic => "gf-harmonic",
            IdentityId::GfHyperharmonic => "gf-hyperharmonic",
            IdentityId::GfDegHarmonic => "gf-deg-harmonic",
            IdentityId::GfDegHyperharmonic => "gf-deg-hyperharmonic",
            IdentityId::BivDerangement => "biv-thm1",
            IdentityId::BivHarmonic => "biv-thm2",
            IdentityId::BivDegHarmonic => "biv-thm3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|id| id.name() == name)
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters a check was run at. Field order defines the canonical report
/// ordering.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Params {
    pub m: Option<u64>,
    pub n: Option<u64>,
    pub r: Option<u64>,
    pub order: Option<u64>,
    pub lambda: Option<Rat>,
    pub x: Option<Rat>,
    pub y: Option<Rat>,
}

impl Params {
    pub fn mn(m: u64, n: u64) -> Self {
        Params {
            m: Some(m),
            n: Some(n),
            ..Default::default()
        }
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let ints = [
            ("m", self.m),
            ("n", self.n),
            ("r", self.r),
            ("N", self.order),
        ];
        for (k, v) in ints {
            if let Some(v) = v {
                parts.push(format!("{k}={v}"));
            }
        }
        let rats = [("lambda", &self.lambda), ("x", &self.x), ("y", &self.y)];
        for (k, v) in rats {
            if let Some(v) = v {
                parts.push(format!("{k}={v}"));
            }
        }
        f.write_str(&parts.join(" "))
    }
}

/// Outcome of one exact identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub identity: IdentityId,
    pub params: Params,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
    /// First differing λ-coefficient (polynomial identities) or first
    /// differing series coefficient (generating-function checks).
    pub first_diff: Option<usize>,
    pub note: Option<String>,
}

impl CheckReport {
    pub fn compare(identity: IdentityId, params: Params, lhs: ExactValue, rhs: ExactValue) -> Self {
        let pass = lhs == rhs;
        CheckReport {
            identity,
            params,
            first_diff: if pass {
                None
            } else {
                lhs.first_difference(&rhs)
            },
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            pass,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "ok" } else { "FAIL" };
        write!(
            f,
            "{} {} {verdict}: lhs={} rhs={}",
            self.identity, self.params, self.lhs, self.rhs
        )?;
        if let Some(i) = self.first_diff {
            write!(f, " first_diff={i}")?;
        }
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

/// Sequence tables, binomials and factorials shared by a sweep.
#[derive(Clone, Debug, Default)]
pub struct CheckContext {
    pub seq: SequenceCache,
    binom: BinomialTable,
    factorials: Vec<Int>,
}

impl CheckContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// A context with everything `id` needs for `m <= m_max`, `n <= n_max`,
    /// hyperharmonic order `r <= r_max` and truncation order `order`.
    pub fn prepared(id: IdentityId, m_max: u64, n_max: u64, r_max: u64, order: u64) -> Self {
        let mut ctx = Self::new();
        ctx.prepare(id, m_max, n_max, r_max, order);
        ctx
    }

    pub fn prepare(&mut self, id: IdentityId, m_max: u64, n_max: u64, r_max: u64, order: u64) {
        let (m, n, r, order) = (m_max as usize, n_max as usize, r_max as u32, order as usize);
        let top = m + n;
        self.binom.ensure(top.max(order));
        self.ensure_factorials(top.max(order));
        let seq = &mut self.seq;
        match id {
            IdentityId::DerangementRecurrence => seq.ensure_derangements(top),
            IdentityId::HarmonicRecurrence => seq.ensure_harmonics(top),
            IdentityId::DegHarmonicRecurrence | IdentityId::DegHarmonicRecurrenceAt => {
                seq.ensure_deg_harmonics(top)
            }
            IdentityId::HyperharmonicClosedForm | IdentityId::HyperharmonicSum => {
                seq.ensure_harmonics(top);
                seq.ensure_hyperharmonic(n, m as u32 + 1);
            }
            IdentityId::DegHyperharmonicClosedForm | IdentityId::DegHyperharmonicSum => {
                seq.ensure_deg_harmonics(top);
                seq.ensure_deg_hyperharmonic(n, m as u32 + 1);
            }
            IdentityId::DegLogProduct => {}
            IdentityId::GfDerangement | IdentityId::BivDerangement => {
                seq.ensure_derangements(order)
            }
            IdentityId::GfHarmonic | IdentityId::BivHarmonic => seq.ensure_harmonics(order),
            IdentityId::GfHyperharmonic => seq.ensure_hyperharmonic(order, r),
            IdentityId::GfDegHarmonic | IdentityId::BivDegHarmonic => {
                seq.ensure_deg_harmonics(order)
            }
            IdentityId::GfDegHyperharmonic => seq.ensure_deg_hyperharmonic(order, r),
        }
    }

    fn ensure_factorials(&mut self, n_max: usize) {
        if self.factorials.is_empty() {
            self.factorials.push(Int::one());
        }
        for k in self.factorials.len()..=n_max {
            let next = &self.factorials[k - 1] * k;
            self.factorials.push(next);
        }
    }

    pub fn factorial(&self, n: usize) -> Int {
        self.factorials
            .get(n)
            .cloned()
            .unwrap_or_else(|| factorial(n as u64))
    }

    pub fn binomial(&self, a: i64, b: u64) -> Int {
        self.binom.get(a, b)
    }

    /// The weights `binom(top, bottom)` occurring in the recurrences.
    ///
    /// The only negative top that can arise is `-1` over `0` (the `k = 0,
    /// l = n` corner), which product semantics evaluate to 1.
    fn sum_binomial(&self, top: i64, bottom: u64) -> Int {
        debug_assert!(
            top >= 0 || bottom == 0,
            "binom({top},{bottom}) with negative top outside the empty-product case"
        );
        self.binom.get(top, bottom)
    }
}

fn sign(e: u64) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn mul_int(r: &Rat, k: &Int) -> Rat {
    r * Rat::from_integer(k.clone())
}

/// `D_{m+n}/n! = sum_l sum_k binom(k+n-l-1, n-l) binom(m,k) (-1)^{m-k} (k!/l!) D_l`.
pub fn derangement_recurrence_check(ctx: &CheckContext, m: u64, n: u64) -> CheckReport {
    let (mu, nu) = (m as usize, n as usize);
    let lhs = Rat::new(ctx.seq.derangement(mu + nu).clone(), ctx.factorial(nu));
    let mut rhs = Rat::zero();
    for l in 0..=n {
        // D_l / l! does not depend on k, so the inner sum stays integral.
        let mut inner = Int::zero();
        for k in 0..=m {
            let w = ctx.sum_binomial(k as i64 + n as i64 - l as i64 - 1, n - l)
                * ctx.binomial(m as i64, k)
                * ctx.factorial(k as usize);
            inner += w * sign(m - k);
        }
        if !inner.is_zero() {
            rhs += Rat::new(
                inner * ctx.seq.derangement(l as usize),
                ctx.factorial(l as usize),
            );
        }
    }
    CheckReport::compare(
        IdentityId::DerangementRecurrence,
        Params::mn(m, n),
        lhs.into(),
        rhs.into(),
    )
}

/// `sum_{k=0}^n H_k binom(m+n-k-1, n-k)`, the weighted sum shared by the harmonic
/// recurrence and the hyperharmonic sum identity.
fn weighted_harmonic_sum(ctx: &CheckContext, m: u64, n: u64) -> Rat {
    let (denominator, numerators) = ctx.seq.harmonic_numerators();
    let mut acc = Int::zero();
    for k in 0..=n {
        let w = ctx.sum_binomial(m as i64 + n as i64 - k as i64 - 1, n - k);
        if w.is_zero() {
            continue;
        }
        acc += w * &numerators[k as usize];
    }
    Rat::new(acc, denominator.clone())
}

/// `binom(m+n,n) H_{n+m} = sum_k H_k binom(m+n-k-1, n-k) + H_m binom(n+m,n)`.
pub fn harmonic_recurrence_check(ctx: &CheckContext, m: u64, n: u64) -> CheckReport {
    let total = (m + n) as i64;
    let lhs = mul_int(ctx.seq.harmonic(total as usize), &ctx.binomial(total, n));
    let rhs = weighted_harmonic_sum(ctx, m, n)
        + mul_int(ctx.seq.harmonic(m as usize), &ctx.binomial(total, n));
    CheckReport::compare(
        IdentityId::HarmonicRecurrence,
        Params::mn(m, n),
        lhs.into(),
        rhs.into(),
    )
}

/// `binom(m+n-λ, n)`.
fn shifted_lambda_binomial(m: u64, n: u64) -> LPoly {
    let top = LPoly::affine(rat_int(m + n), rat_int(-1));
    lpoly_binomial(&top, n)
}

fn deg_harmonic_recurrence_sides(ctx: &CheckContext, m: u64, n: u64) -> (LPoly, LPoly) {
    let total = m + n;
    let lhs = ctx
        .seq
        .deg_harmonic(total as usize)
        .scale(&Rat::from_integer(ctx.binomial(total as i64, n)));
    let mut rhs = LPoly::zero();
    for l in 0..=n {
        let w = ctx.sum_binomial(total as i64 - l as i64 - 1, n - l);
        if !w.is_zero() {
            rhs += ctx
                .seq
                .deg_harmonic(l as usize)
                .scale(&Rat::from_integer(w));
        }
    }
    let h_m = ctx.seq.deg_harmonic(m as usize);
    if !h_m.is_zero() {
        rhs += h_m * &shifted_lambda_binomial(m, n);
    }
    (lhs, rhs)
}

/// `binom(n+m,n) H_{n+m,λ} = sum_l H_{l,λ} binom(m+n-l-1, n-l) + H_{m,λ} binom(m+n-λ, n)`
/// as an identity of λ-polynomials.
pub fn deg_harmonic_recurrence_check(ctx: &CheckContext, m: u64, n: u64) -> CheckReport {
    let (lhs, rhs) = deg_harmonic_recurrence_sides(ctx, m, n);
    CheckReport::compare(
        IdentityId::DegHarmonicRecurrence,
        Params::mn(m, n),
        lhs.into(),
        rhs.into(),
    )
}

/// `H_{n,λ}` at a rational λ straight from `sum_k binom(λ-1,k-1)(-1)^{k-1}/k`,
/// without going through any polynomial.
pub fn deg_harmonic_at(n: u64, lam: &Rat) -> Rat {
    let shifted = lam - Rat::one();
    (1..=n)
        .map(|k| rat_binomial(&shifted, k - 1) * rat_int(sign(k - 1)) / rat_int(k))
        .fold(Rat::zero(), |a, b| a + b)
}

/// The degenerate harmonic recurrence at a rational λ: both polynomial sides
/// evaluated at λ must match a direct rational recomputation of each side.
pub fn deg_harmonic_recurrence_at_check(
    ctx: &CheckContext,
    m: u64,
    n: u64,
    lam: &Rat,
) -> CheckReport {
    let (lhs, rhs) = deg_harmonic_recurrence_sides(ctx, m, n);
    let total = m + n;
    let direct_lhs = deg_harmonic_at(total, lam) * Rat::from_integer(ctx.binomial(total as i64, n));
    let mut direct_rhs = Rat::zero();
    for l in 0..=n {
        let w = ctx.sum_binomial(total as i64 - l as i64 - 1, n - l);
        direct_rhs += deg_harmonic_at(l, lam) * Rat::from_integer(w);
    }
    direct_rhs += deg_harmonic_at(m, lam) * rat_binomial(&(rat_int(total) - lam), n);

    let poly_lhs = lhs.eval(lam);
    let poly_rhs = rhs.eval(lam);
    let pass = poly_lhs == direct_lhs && poly_rhs == direct_rhs && direct_lhs == direct_rhs;
    let params = Params {
        lambda: Some(lam.clone()),
        ..Params::mn(m, n)
    };
    let mut report = CheckReport::compare(
        IdentityId::DegHarmonicRecurrenceAt,
        params,
        direct_lhs.into(),
        direct_rhs.into(),
    );
    if !pass {
        report.pass = false;
        report = report.with_note(format!(
            "polynomial sides at lambda: {poly_lhs} / {poly_rhs}"
        ));
    }
    report
}

/// `H_n^{(m+1)} = binom(n+m,m) (H_{n+m} - H_m)`.
pub fn hyperharmonic_closed_form_check(ctx: &CheckContext, n: u64, m: u64) -> CheckReport {
    let lhs = ctx.seq.hyperharmonic(n as usize, m as u32 + 1).clone();
    let diff = ctx.seq.harmonic((n + m) as usize) - ctx.seq.harmonic(m as usize);
    let rhs = mul_int(&diff, &ctx.binomial((n + m) as i64, m));
    CheckReport::compare(
        IdentityId::HyperharmonicClosedForm,
        Params::mn(m, n),
        lhs.into(),
        rhs.into(),
    )
}

/// `H_n^{(m+1)} = sum_{k=0}^n H_k binom(m+n-k-1, n-k)`.
pub fn hyperharmonic_sum_check(ctx: &CheckContext, n: u64, m: u64) -> CheckReport {
    let lhs = ctx.seq.hyperharmonic(n as usize, m as u32 + 1).clone();
    let rhs = weighted_harmonic_sum(ctx, m, n);
    CheckReport::compare(
        IdentityId::HyperharmonicSum,
        Params::mn(m, n),
        lhs.into(),
        rhs.into(),
    )
}

fn lambda_minus_one_binomial(m: u64) -> LPoly {
    lpoly_binomial(&LPoly::affine(rat_int(-1), rat_int(1)), m)
}

/// `(-1)^m binom(λ-1,m) H_{n,λ}^{(m+1)} = binom(n+m,m) (H_{n+m,λ} - H_{m,λ})`.
pub fn deg_hyperharmonic_closed_form_check(ctx: &CheckContext, n: u64, m: u64) -> CheckReport {
    let lhs = (&lambda_minus_one_binomial(m) * ctx.seq.deg_hyperharmonic(n as usize, m as u32 + 1))
        .scale(&rat_int(sign(m)));
    let diff = ctx.seq.deg_harmonic((n + m) as usize) - ctx.seq.deg_harmonic(m as usize);
    let rhs = diff.scale(&Rat::from_integer(ctx.binomial((n + m) as i64, m)));
    CheckReport::compare(
        IdentityId::DegHyperharmonicClosedForm,
        Params::mn(m, n),
        lhs.into(),
        rhs.into(),
    )
}

/// `H_{n,λ}^{(m+1)} = (-1)^m / binom(λ-1,m) * [sum_l H_{l,λ} binom(m+n-l-1,n-l)
/// + binom(m+n-λ,n) H_{m,λ} - binom(n+m,n) H_{m,λ}]`.
///
/// Divisibility of the bracket by `binom(λ-1,m)` is checked first; a nonzero
/// remainder fails the check with the division error as its note.
pub fn deg_hyperharmonic_sum_check(ctx: &CheckContext, n: u64, m: u64) -> CheckReport {
    let total = m + n;
    let h_m = ctx.seq.deg_harmonic(m as usize);
    let mut bracket = LPoly::zero();
    for l in 0..=n {
        let w = ctx.sum_binomial(total as i64 - l as i64 - 1, n - l);
        if !w.is_zero() {
            bracket += ctx
                .seq
                .deg_harmonic(l as usize)
                .scale(&Rat::from_integer(w));
        }
    }
    bracket += h_m * &shifted_lambda_binomial(m, n);
    bracket -= &h_m.scale(&Rat::from_integer(ctx.binomial(total as i64, n)));

    let expected = ctx.seq.deg_hyperharmonic(n as usize, m as u32 + 1).clone();
    let params = Params::mn(m, n);
    match bracket.exact_div(&lambda_minus_one_binomial(m)) {
        Ok(q) => {
            let quotient = q.scale(&rat_int(sign(m)));
            CheckReport::compare(
                IdentityId::DegHyperharmonicSum,
                params,
                expected.into(),
                quotient.into(),
            )
        }
        Err(e) => CheckReport {
            identity: IdentityId::DegHyperharmonicSum,
            params,
            lhs: expected.to_string(),
            rhs: bracket.to_string(),
            pass: false,
            first_diff: None,
            note: Some(e.to_string()),
        },
    }
}

/// `log_λ(xy) = log_λ(x) + x^λ log_λ(y) = log_λ(y) + y^λ log_λ(x)` at
/// positive rationals and a nonzero integer λ.
pub fn deg_log_product_check(x: &Rat, y: &Rat, lam: i64) -> Result<CheckReport, ExactError> {
    let lhs = deg_log_rational(&(x * y), lam)?;
    let log_x = deg_log_rational(x, lam)?;
    let log_y = deg_log_rational(y, lam)?;
    let first = &log_x + rat_pow(x, lam) * &log_y;
    let second = &log_y + rat_pow(y, lam) * &log_x;
    let params = Params {
        lambda: Some(rat_int(lam)),
        x: Some(x.clone()),
        y: Some(y.clone()),
        ..Default::default()
    };
    let second_ok = second == lhs;
    let mut report =
        CheckReport::compare(IdentityId::DegLogProduct, params, lhs.into(), first.into());
    if !second_ok {
        report.pass = false;
        report = report.with_note(format!("symmetric form gives {second}"));
    }
    Ok(report)
}

/// Context holding every table needed for the grid `0..=m_max x 0..=n_max`.
pub fn context_for_grid(id: IdentityId, m_max: u64, n_max: u64) -> CheckContext {
    CheckContext::prepared(id, m_max, n_max, 0, 0)
}
