//! Derangement, harmonic, hyperharmonic and degenerate (λ-deformed) harmonic
//! and hyperharmonic numbers, each generated from its defining formula.
//!
//! [`SequenceCache`] memoizes every family. Requesting entry `n` forces entries
//! `0..=n`; tables only ever grow, so an entry never changes once computed.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exact::{lpoly_binomial, lpoly_exact_div, rat, rat_int, Int, LPoly, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SequenceKind {
    Derangement,
    Harmonic,
    Hyperharmonic(u32),
    DegHarmonic,
    DegHyperharmonic(u32),
}

impl SequenceKind {
    /// Name used on the command line and in table files.
    pub fn name(&self) -> &'static str {
        match self {
            SequenceKind::Derangement => "derangement",
            SequenceKind::Harmonic => "harmonic",
            SequenceKind::Hyperharmonic(_) => "hyperharmonic",
            SequenceKind::DegHarmonic => "deg-harmonic",
            SequenceKind::DegHyperharmonic(_) => "deg-hyperharmonic",
        }
    }

    pub fn order(&self) -> Option<u32> {
        match self {
            SequenceKind::Hyperharmonic(r) | SequenceKind::DegHyperharmonic(r) => Some(*r),
            _ => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            SequenceKind::DegHarmonic | SequenceKind::DegHyperharmonic(_)
        )
    }
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.order() {
            Some(r) => write!(f, "{}(r={r})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

/// A materialized prefix `0..=N` of one sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceTable<T> {
    pub kind: SequenceKind,
    values: Vec<T>,
}

impl<T> SequenceTable<T> {
    pub fn new(kind: SequenceKind, values: Vec<T>) -> Self {
        SequenceTable { kind, values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Option<&T> {
        self.values.get(n)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

/// Memo of every sequence family.
///
/// The `ensure_*` methods grow a table; the accessors read an entry that must
/// already be present and panic otherwise. Build once, then share `&self`
/// freely across threads.
#[derive(Clone, Debug, Default)]
pub struct SequenceCache {
    derangements: Vec<Int>,
    harmonics: Vec<Rat>,
    // harmonics[k] = harmonic_numerators[k] / harmonic_denominator
    harmonic_denominator: Int,
    harmonic_numerators: Vec<Int>,
    // hyper[r][n] = H_n^{(r)}
    hyper: Vec<Vec<Rat>>,
    // running sums of binom(λ,k)(-1)^{k-1}; H_{n,λ} is this divided by λ
    deg_harmonic_numerators: Vec<LPoly>,
    deg_harmonics: Vec<LPoly>,
    deg_hyper: Vec<Vec<LPoly>>,
}

impl SequenceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn ensure_derangements(&mut self, n_max: usize) {
        for n in self.derangements.len()..=n_max {
            self.derangements.push(derangement_by_definition(n as u64));
        }
    }

    pub fn ensure_harmonics(&mut self, n_max: usize) {
        if self.harmonics.is_empty() {
            self.harmonics.push(Rat::zero());
        }
        for n in self.harmonics.len()..=n_max {
            let next = &self.harmonics[n - 1] + rat(1, n as i64);
            self.harmonics.push(next);
        }
        self.rescale_harmonics();
    }

    fn rescale_harmonics(&mut self) {
        let common = self
            .harmonics
            .iter()
            .fold(Int::one(), |acc, h| acc.lcm(h.denom()));
        self.harmonic_numerators = self
            .harmonics
            .iter()
            .map(|h| h.numer() * (&common / h.denom()))
            .collect();
        self.harmonic_denominator = common;
    }

    pub fn ensure_hyperharmonic(&mut self, n_max: usize, r: u32) {
        let r = r as usize;
        while self.hyper.len() <= r {
            self.hyper.push(Vec::new());
        }
        for level in 0..=r {
            let table_len = self.hyper[level].len();
            if table_len > n_max {
                continue;
            }
            for n in table_len..=n_max {
                let v = if n == 0 {
                    Rat::zero()
                } else if level == 0 {
                    rat(1, n as i64)
                } else {
                    &self.hyper[level][n - 1] + &self.hyper[level - 1][n]
                };
                self.hyper[level].push(v);
            }
        }
    }

    pub fn ensure_deg_harmonics(&mut self, n_max: usize) {
        if self.deg_harmonics.is_empty() {
            self.deg_harmonic_numerators.push(LPoly::zero());
            self.deg_harmonics.push(LPoly::zero());
        }
        let lam = LPoly::lambda();
        for n in self.deg_harmonics.len()..=n_max {
            let mut term = lpoly_binomial(&lam, n as u64);
            if n.is_multiple_of(2) {
                term = -term;
            }
            let numer = &self.deg_harmonic_numerators[n - 1] + &term;
            let value = lpoly_exact_div(&numer, &lam)
                .expect("binom(λ,k) has zero constant term, so λ divides the sum");
            self.deg_harmonic_numerators.push(numer);
            self.deg_harmonics.push(value);
        }
    }

    pub fn ensure_deg_hyperharmonic(&mut self, n_max: usize, r: u32) {
        let r = r as usize;
        while self.deg_hyper.len() <= r {
            self.deg_hyper.push(Vec::new());
        }
        for level in 0..=r {
            let table_len = self.deg_hyper[level].len();
            if table_len > n_max {
                continue;
            }
            for n in table_len..=n_max {
                let v = if n == 0 {
                    LPoly::zero()
                } else if level == 0 {
                    deg_hyperharmonic_base(n as u64)
                } else {
                    &self.deg_hyper[level][n - 1] + &self.deg_hyper[level - 1][n]
                };
                self.deg_hyper[level].push(v);
            }
        }
    }

    pub fn derangement(&self, n: usize) -> &Int {
        lookup(&self.derangements, n, "derangement")
    }

    pub fn harmonic(&self, n: usize) -> &Rat {
        lookup(&self.harmonics, n, "harmonic")
    }

    pub fn hyperharmonic(&self, n: usize, r: u32) -> &Rat {
        let table = self.hyper.get(r as usize).map_or(&[][..], Vec::as_slice);
        lookup(table, n, "hyperharmonic")
    }

    pub fn deg_harmonic(&self, n: usize) -> &LPoly {
        lookup(&self.deg_harmonics, n, "deg-harmonic")
    }

    pub fn deg_hyperharmonic(&self, n: usize, r: u32) -> &LPoly {
        let table = self
            .deg_hyper
            .get(r as usize)
            .map_or(&[][..], Vec::as_slice);
        lookup(table, n, "deg-hyperharmonic")
    }

    pub fn derangement_table(&self) -> &[Int] {
        &self.derangements
    }

    pub fn harmonic_table(&self) -> &[Rat] {
        &self.harmonics
    }

    /// The harmonic table over one common denominator: `(d, a)` with
    /// `H_k = a[k] / d`.
    pub fn harmonic_numerators(&self) -> (&Int, &[Int]) {
        (&self.harmonic_denominator, &self.harmonic_numerators)
    }

    pub fn deg_harmonic_table(&self) -> &[LPoly] {
        &self.deg_harmonics
    }

    /// Replaces the harmonic table wholesale. Used to inject faults when
    /// exercising the failure path of verification sweeps.
    pub fn override_harmonics(&mut self, values: Vec<Rat>) {
        self.harmonics = values;
        self.rescale_harmonics();
    }

    pub fn override_deg_harmonics(&mut self, values: Vec<LPoly>) {
        self.deg_harmonics = values;
    }

    pub fn override_derangements(&mut self, values: Vec<Int>) {
        self.derangements = values;
    }
}

fn lookup<'a, T>(table: &'a [T], n: usize, what: &str) -> &'a T {
    table.get(n).unwrap_or_else(|| {
        panic!(
            "{what} entry {n} requested but only {} computed",
            table.len()
        )
    })
}

/// `n! * sum_{k=0}^n (-1)^k / k!`, evaluated with integers: the k-th term is
/// `(-1)^k * n!/k!`.
fn derangement_by_definition(n: u64) -> Int {
    let mut sum = Int::zero();
    let mut ratio = Int::one(); // n!/k!, starting from k = n
    for k in (0..=n).rev() {
        if k % 2 == 0 {
            sum += &ratio;
        } else {
            sum -= &ratio;
        }
        ratio *= k.max(1);
    }
    sum
}

/// `(1/λ) binom(λ,n) (-1)^{n-1}` for `n >= 1`.
fn deg_hyperharmonic_base(n: u64) -> LPoly {
    let lam = LPoly::lambda();
    let q = lpoly_exact_div(&lpoly_binomial(&lam, n), &lam)
        .expect("binom(λ,n) has zero constant term for n >= 1");
    if n.is_multiple_of(2) {
        -q
    } else {
        q
    }
}

pub fn derangements(n_max: usize) -> SequenceTable<Int> {
    let mut cache = SequenceCache::new();
    cache.ensure_derangements(n_max);
    SequenceTable::new(SequenceKind::Derangement, cache.derangements)
}

pub fn harmonics(n_max: usize) -> SequenceTable<Rat> {
    let mut cache = SequenceCache::new();
    cache.ensure_harmonics(n_max);
    SequenceTable::new(SequenceKind::Harmonic, cache.harmonics)
}

pub fn hyperharmonic_table(n_max: usize, r: u32) -> SequenceTable<Rat> {
    let mut cache = SequenceCache::new();
    cache.ensure_hyperharmonic(n_max, r);
    let values = cache.hyper.swap_remove(r as usize);
    SequenceTable::new(SequenceKind::Hyperharmonic(r), values)
}

pub fn hyperharmonic(n: usize, r: u32) -> Rat {
    hyperharmonic_table(n, r).into_values().swap_remove(n)
}

pub fn degenerate_harmonics(n_max: usize) -> SequenceTable<LPoly> {
    let mut cache = SequenceCache::new();
    cache.ensure_deg_harmonics(n_max);
    SequenceTable::new(SequenceKind::DegHarmonic, cache.deg_harmonics)
}

/// The second expression for `H_{n,λ}`: `sum_{k=1}^n binom(λ-1,k-1) (-1)^{k-1} / k`.
pub fn degenerate_harmonic_alt(n: usize) -> LPoly {
    let lam_minus_one = LPoly::affine(rat_int(-1), rat_int(1));
    let mut acc = LPoly::zero();
    for k in 1..=n as u64 {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc += lpoly_binomial(&lam_minus_one, k - 1).scale(&rat(sign, k as i64));
    }
    acc
}

pub fn degenerate_hyperharmonic_table(n_max: usize, r: u32) -> SequenceTable<LPoly> {
    let mut cache = SequenceCache::new();
    cache.ensure_deg_hyperharmonic(n_max, r);
    let values = cache.deg_hyper.swap_remove(r as usize);
    SequenceTable::new(SequenceKind::DegHyperharmonic(r), values)
}

pub fn degenerate_hyperharmonic(n: usize, r: u32) -> LPoly {
    degenerate_hyperharmonic_table(n, r)
        .into_values()
        .swap_remove(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{factorial, falling_factorial};

    fn count_derangements(n: usize) -> u64 {
        fn go(pos: usize, used: &mut Vec<bool>) -> u64 {
            let n = used.len();
            if pos == n {
                return 1;
            }
            let mut total = 0;
            for v in 0..n {
                if v != pos && !used[v] {
                    used[v] = true;
                    total += go(pos + 1, used);
                    used[v] = false;
                }
            }
            total
        }
        go(0, &mut vec![false; n])
    }

    #[test]
    fn derangement_examples() {
        assert_eq!(derangements(0).values(), &[Int::one()]);
        let d = derangements(6);
        assert_eq!(d.get(4), Some(&Int::from(9)));
        assert_eq!(d.get(6), Some(&Int::from(265)));
    }

    #[test]
    fn derangements_match_enumeration() {
        let d = derangements(8);
        for n in 0..=8 {
            assert_eq!(d.values()[n], Int::from(count_derangements(n)), "n={n}");
        }
    }

    #[test]
    fn derangements_match_classical_recurrence() {
        let d = derangements(200);
        let mut prev = Int::one();
        for n in 1..=200usize {
            let sign = if n.is_multiple_of(2) { 1 } else { -1 };
            prev = prev * n + sign;
            assert_eq!(d.values()[n], prev, "n={n}");
        }
    }

    #[test]
    fn harmonic_examples() {
        let h = harmonics(4);
        assert_eq!(h.values()[0], rat_int(0));
        assert_eq!(h.values()[1], rat_int(1));
        assert_eq!(h.values()[4], rat(25, 12));
    }

    #[test]
    fn hyperharmonic_examples() {
        assert_eq!(hyperharmonic(3, 0), rat(1, 3));
        assert_eq!(hyperharmonic(2, 2), rat(5, 2));
        assert_eq!(hyperharmonic(3, 2), rat(13, 3));
        for r in 0..5 {
            assert_eq!(hyperharmonic(0, r), rat_int(0));
        }
    }

    #[test]
    fn hyperharmonic_order_one_is_harmonic() {
        let h = harmonics(200);
        assert_eq!(hyperharmonic_table(200, 1).values(), h.values());
    }

    #[test]
    fn degenerate_harmonic_examples() {
        let h = degenerate_harmonics(3);
        assert!(h.values()[0].is_zero());
        assert_eq!(h.values()[1], LPoly::one());
        assert_eq!(h.values()[2], LPoly::affine(rat(3, 2), rat(-1, 2)));
        assert_eq!(
            h.values()[3],
            LPoly::from_coeffs(vec![rat(11, 6), rat(-1, 1), rat(1, 6)])
        );
    }

    #[test]
    fn degenerate_harmonic_forms_agree_and_degenerate() {
        let h = degenerate_harmonics(60);
        let plain = harmonics(60);
        for n in 0..=60 {
            let v = &h.values()[n];
            assert_eq!(v, &degenerate_harmonic_alt(n), "n={n}");
            assert_eq!(&v.constant_term(), &plain.values()[n]);
            if n >= 1 {
                assert_eq!(v.degree(), Some(n - 1), "n={n}");
            }
        }
    }

    #[test]
    fn degenerate_hyperharmonic_examples() {
        assert_eq!(degenerate_hyperharmonic(1, 0), LPoly::one());
        assert_eq!(
            degenerate_hyperharmonic(2, 0),
            LPoly::affine(rat(1, 2), rat(-1, 2))
        );
        assert_eq!(
            degenerate_hyperharmonic(2, 1),
            LPoly::affine(rat(3, 2), rat(-1, 2))
        );
    }

    #[test]
    fn degenerate_hyperharmonic_order_one_is_degenerate_harmonic() {
        assert_eq!(
            degenerate_hyperharmonic_table(40, 1).values(),
            degenerate_harmonics(40).values()
        );
    }

    #[test]
    fn degenerate_hyperharmonic_constant_terms() {
        let mut cache = SequenceCache::new();
        cache.ensure_hyperharmonic(60, 6);
        cache.ensure_deg_hyperharmonic(60, 6);
        for r in 0..=6 {
            for n in 0..=60 {
                assert_eq!(
                    cache.deg_hyperharmonic(n, r).constant_term(),
                    *cache.hyperharmonic(n, r),
                    "n={n} r={r}"
                );
            }
        }
    }

    // Base case through the falling factorial (1)_{n,1/λ} at rational λ.
    #[test]
    fn degenerate_base_matches_falling_factorial_form() {
        for lam in [rat(1, 3), rat(-2, 5), rat(7, 1), rat(-1, 1)] {
            for n in 1..=12u64 {
                let sign = if n % 2 == 1 { 1 } else { -1 };
                let direct = crate::exact::rat_pow(&lam, n as i64 - 1)
                    * falling_factorial(&rat_int(1), n, &lam.recip())
                    * rat_int(sign)
                    / Rat::from_integer(factorial(n));
                assert_eq!(
                    degenerate_hyperharmonic(n as usize, 0).eval(&lam),
                    direct,
                    "n={n} lam={lam}"
                );
            }
        }
    }

    #[test]
    fn cache_is_append_only() {
        let mut cache = SequenceCache::new();
        cache.ensure_deg_hyperharmonic(5, 2);
        let before = cache.deg_hyperharmonic(5, 2).clone();
        cache.ensure_deg_hyperharmonic(20, 3);
        assert_eq!(cache.deg_hyperharmonic(5, 2), &before);
        cache.ensure_deg_hyperharmonic(3, 2);
        assert_eq!(
            cache.deg_hyperharmonic(20, 2),
            &degenerate_hyperharmonic(20, 2)
        );
    }

    #[test]
    #[should_panic(expected = "harmonic entry 3")]
    fn reading_unbuilt_entry_panics() {
        let mut cache = SequenceCache::new();
        cache.ensure_harmonics(2);
        let _ = cache.harmonic(3);
    }
}
