//! Exact symbolic algebra for polynomials in bosonic creation/annihilation
//! operators, with normal ordering and vibrational-Hamiltonian builders.
//!
//! All coefficients are real. A normal-ordered monomial keeps every creation
//! operator to the left of every annihilation operator, modes in ascending
//! index order; polynomials are sparse maps from monomials to coefficients.

use std::collections::BTreeMap;
use std::fmt;

use crate::{Error, Result};

/// Energy unit conversion: 1 hartree in cm^-1 (CODATA).
pub const CM1_PER_HARTREE: f64 = 219_474.631_363_2;

/// Time unit conversion: 1 atomic unit of time in femtoseconds.
pub const AU_TIME_FS: f64 = 0.024_188_842_54;

/// Coefficients below this magnitude are dropped after every ring operation.
pub const PRUNE_TOL: f64 = 1e-14;

/// One creation or annihilation operator acting on a mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderOp {
    Create(usize),
    Annihilate(usize),
}

impl LadderOp {
    pub fn mode(&self) -> usize {
        match *self {
            LadderOp::Create(m) | LadderOp::Annihilate(m) => m,
        }
    }
}

/// Normal-ordered product of ladder operators: per mode, a creation power and
/// an annihilation power. The all-zero monomial is the identity operator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    /// (creation power, annihilation power) per mode; length = mode count.
    exps: Vec<(u8, u8)>,
}

impl Monomial {
    pub fn identity(n_modes: usize) -> Self {
        Monomial {
            exps: vec![(0, 0); n_modes],
        }
    }

    pub fn from_exps(exps: Vec<(u8, u8)>) -> Self {
        Monomial { exps }
    }

    pub fn n_modes(&self) -> usize {
        self.exps.len()
    }

    pub fn exps(&self) -> &[(u8, u8)] {
        &self.exps
    }

    pub fn creation(&self, mode: usize) -> u8 {
        self.exps[mode].0
    }

    pub fn annihilation(&self, mode: usize) -> u8 {
        self.exps[mode].1
    }

    /// Total degree: sum of all creation and annihilation powers.
    pub fn degree(&self) -> usize {
        self.exps
            .iter()
            .map(|&(c, a)| c as usize + a as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&(c, a)| c == 0 && a == 0)
    }

    /// Adjoint monomial: creation and annihilation powers swapped.
    pub fn adjoint(&self) -> Monomial {
        Monomial {
            exps: self.exps.iter().map(|&(c, a)| (a, c)).collect(),
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded lexicographic order: total degree first, then creation exponents,
/// then annihilation exponents. Fixes the coefficient-vector layout.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| {
                let a = self.exps.iter().map(|e| e.0);
                let b = other.exps.iter().map(|e| e.0);
                a.cmp(b)
            })
            .then_with(|| {
                let a = self.exps.iter().map(|e| e.1);
                let b = other.exps.iter().map(|e| e.1);
                a.cmp(b)
            })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        let mut first = true;
        for (m, &(c, _)) in self.exps.iter().enumerate() {
            if c > 0 {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "b{m}†")?;
                if c > 1 {
                    write!(f, "^{c}")?;
                }
            }
        }
        for (m, &(_, a)) in self.exps.iter().enumerate() {
            if a > 0 {
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "b{m}")?;
                if a > 1 {
                    write!(f, "^{a}")?;
                }
            }
        }
        Ok(())
    }
}

/// Sparse normal-ordered polynomial in ladder operators with real
/// coefficients over a fixed number of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonPolynomial {
    n_modes: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl BosonPolynomial {
    pub fn zero(n_modes: usize) -> Self {
        BosonPolynomial {
            n_modes,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n_modes: usize, value: f64) -> Self {
        let mut p = Self::zero(n_modes);
        if value.abs() > PRUNE_TOL {
            p.terms.insert(Monomial::identity(n_modes), value);
        }
        p
    }

    pub fn identity(n_modes: usize) -> Self {
        Self::constant(n_modes, 1.0)
    }

    /// Single ladder operator as a polynomial.
    pub fn ladder(n_modes: usize, op: LadderOp) -> Result<Self> {
        if op.mode() >= n_modes {
            return Err(Error::ModeOutOfRange {
                mode: op.mode(),
                n_modes,
            });
        }
        let mut exps = vec![(0u8, 0u8); n_modes];
        match op {
            LadderOp::Create(m) => exps[m].0 = 1,
            LadderOp::Annihilate(m) => exps[m].1 = 1,
        }
        let mut p = Self::zero(n_modes);
        p.terms.insert(Monomial::from_exps(exps), 1.0);
        Ok(p)
    }

    /// Dimensionless position q = (b† + b)/√2.
    pub fn position(n_modes: usize, mode: usize) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut p = Self::ladder(n_modes, LadderOp::Create(mode))?;
        p.scale_mut(s);
        p.add_term_raw(single_exp(n_modes, mode, 0, 1), s);
        Ok(p)
    }

    /// Momentum squared p² = -(b† - b)²/2 = -b†²/2 - b²/2 + b†b + 1/2.
    pub fn momentum_squared(n_modes: usize, mode: usize) -> Result<Self> {
        if mode >= n_modes {
            return Err(Error::ModeOutOfRange { mode, n_modes });
        }
        let mut p = Self::zero(n_modes);
        p.add_term_raw(single_exp(n_modes, mode, 2, 0), -0.5);
        p.add_term_raw(single_exp(n_modes, mode, 0, 2), -0.5);
        p.add_term_raw(single_exp(n_modes, mode, 1, 1), 1.0);
        p.add_term_raw(Monomial::identity(n_modes), 0.5);
        Ok(p)
    }

    /// Number operator b†b for a mode.
    pub fn number(n_modes: usize, mode: usize) -> Result<Self> {
        if mode >= n_modes {
            return Err(Error::ModeOutOfRange { mode, n_modes });
        }
        let mut p = Self::zero(n_modes);
        p.add_term_raw(single_exp(n_modes, mode, 1, 1), 1.0);
        Ok(p)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    /// Highest total degree among stored monomials (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: f64) {
        debug_assert_eq!(m.n_modes(), self.n_modes);
        let entry = self.terms.entry(m.clone()).or_insert(0.0);
        *entry += c;
        if entry.abs() <= PRUNE_TOL {
            self.terms.remove(&m);
        }
    }

    fn add_term_raw(&mut self, m: Monomial, c: f64) {
        *self.terms.entry(m).or_insert(0.0) += c;
    }

    pub fn scale_mut(&mut self, s: f64) {
        for v in self.terms.values_mut() {
            *v *= s;
        }
        self.prune();
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut p = self.clone();
        p.scale_mut(s);
        p
    }

    /// Drop coefficients with magnitude at or below the pruning tolerance.
    pub fn prune(&mut self) {
        self.terms.retain(|_, v| v.abs() > PRUNE_TOL);
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::ModeCountMismatch(self.n_modes, other.n_modes));
        }
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term_raw(m.clone(), *c);
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n_modes != other.n_modes {
            return Err(Error::ModeCountMismatch(self.n_modes, other.n_modes));
        }
        let mut out = Self::zero(self.n_modes);
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in other.terms.iter() {
                for (m, w) in monomial_mul(m1, m2) {
                    out.add_term_raw(m, c1 * c2 * w);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    /// Adjoint polynomial (real coefficients: swap creation/annihilation).
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.n_modes);
        for (m, c) in self.terms.iter() {
            out.add_term_raw(m.adjoint(), *c);
        }
        out
    }

    /// Exact Hermiticity test on the stored map: every monomial's adjoint must
    /// carry a bit-identical coefficient.
    pub fn is_hermitian(&self) -> bool {
        self.terms
            .iter()
            .all(|(m, c)| self.terms.get(&m.adjoint()) == Some(c))
    }

    /// Max |c(m) - c(adjoint m)| over stored monomials: zero for a Hermitian
    /// operator up to floating accumulation order.
    pub fn hermiticity_error(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| (c - self.coeff(&m.adjoint())).abs())
            .fold(0.0, f64::max)
    }

    /// Keep only monomials with total degree in [lo, hi].
    pub fn degree_part(&self, lo: usize, hi: usize) -> Self {
        let mut out = Self::zero(self.n_modes);
        for (m, c) in self.terms.iter() {
            let d = m.degree();
            if d >= lo && d <= hi {
                out.add_term_raw(m.clone(), *c);
            }
        }
        out
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Max-norm distance between coefficient maps.
    pub fn coeff_distance(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for (m, c) in self.terms.iter() {
            d = d.max((c - other.coeff(m)).abs());
        }
        for (m, c) in other.terms.iter() {
            d = d.max((c - self.coeff(m)).abs());
        }
        d
    }
}

impl fmt::Display for BosonPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c:.6}·{m}")?;
        }
        Ok(())
    }
}

fn single_exp(n_modes: usize, mode: usize, cre: u8, ann: u8) -> Monomial {
    let mut exps = vec![(0u8, 0u8); n_modes];
    exps[mode] = (cre, ann);
    Monomial::from_exps(exps)
}

fn binomial(n: u8, k: u8) -> f64 {
    let (n, k) = (n as u64, k as u64);
    if k > n {
        return 0.0;
    }
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

fn factorial(k: u8) -> f64 {
    (1..=k as u64).map(|i| i as f64).product()
}

/// Product of two normal-ordered monomials as a list of (monomial, weight).
///
/// Per mode, b^m b†^n = Σ_k C(m,k) C(n,k) k! b†^{n-k} b^{m-k}; different
/// modes commute, so the result is the cross product of per-mode expansions.
pub fn monomial_mul(m1: &Monomial, m2: &Monomial) -> Vec<(Monomial, f64)> {
    let n = m1.n_modes();
    debug_assert_eq!(n, m2.n_modes());
    let mut acc: Vec<(Vec<(u8, u8)>, f64)> = vec![(Vec::with_capacity(n), 1.0)];
    for mode in 0..n {
        let (a1, b1) = (m1.creation(mode), m1.annihilation(mode));
        let (a2, b2) = (m2.creation(mode), m2.annihilation(mode));
        let kmax = b1.min(a2);
        let mut next = Vec::with_capacity(acc.len() * (kmax as usize + 1));
        for (exps, w) in acc.iter() {
            for k in 0..=kmax {
                let wk = binomial(b1, k) * binomial(a2, k) * factorial(k);
                let mut e = exps.clone();
                e.push((a1 + a2 - k, b1 + b2 - k));
                next.push((e, w * wk));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(e, w)| (Monomial::from_exps(e), w))
        .collect()
}

/// Normal-order a word of ladder operators into the unique equivalent
/// polynomial; coefficients are exact integer combinations.
pub fn normal_order(n_modes: usize, word: &[LadderOp]) -> Result<BosonPolynomial> {
    let mut acc = BosonPolynomial::identity(n_modes);
    for &op in word {
        let f = BosonPolynomial::ladder(n_modes, op)?;
        acc = acc.mul(&f)?;
    }
    Ok(acc)
}

/// Enumerate all normal-ordered monomials over `n_modes` with total degree in
/// `degrees`, in canonical (graded lexicographic) order.
pub fn monomial_basis(n_modes: usize, degrees: &[usize]) -> Vec<Monomial> {
    let mut degs: Vec<usize> = degrees.to_vec();
    degs.sort_unstable();
    degs.dedup();
    let mut out = Vec::new();
    for &d in &degs {
        let mut slot_exps = vec![0u8; 2 * n_modes];
        enumerate_compositions(d, 0, &mut slot_exps, &mut out, n_modes);
    }
    out.sort();
    out
}

fn enumerate_compositions(
    remaining: usize,
    slot: usize,
    slot_exps: &mut Vec<u8>,
    out: &mut Vec<Monomial>,
    n_modes: usize,
) {
    let n_slots = 2 * n_modes;
    if slot == n_slots {
        if remaining == 0 {
            // Slots 0..n are creation powers, n..2n annihilation powers.
            let exps = (0..n_modes)
                .map(|m| (slot_exps[m], slot_exps[n_modes + m]))
                .collect();
            out.push(Monomial::from_exps(exps));
        }
        return;
    }
    for e in 0..=remaining {
        slot_exps[slot] = e as u8;
        enumerate_compositions(remaining - e, slot + 1, slot_exps, out, n_modes);
    }
    slot_exps[slot] = 0;
}

/// Coefficients of all monomials with degree in `degrees`, laid out in the
/// canonical `monomial_basis` order (zeros included).
pub fn extract_coeffs(p: &BosonPolynomial, degrees: &[usize]) -> Vec<f64> {
    monomial_basis(p.n_modes(), degrees)
        .iter()
        .map(|m| p.coeff(m))
        .collect()
}

/// Harmonic frequencies plus symmetrized cubic/quartic force constants, all
/// in cm^-1.
#[derive(Debug, Clone, PartialEq)]
pub struct VibrationalHamiltonian {
    n_modes: usize,
    omega: Vec<f64>,
    /// Symmetrized: keyed by sorted index triple; value = (sum of raw
    /// permutation entries) / (permutation count of the multiset).
    cubic: BTreeMap<[usize; 3], f64>,
    quartic: BTreeMap<[usize; 4], f64>,
}

impl VibrationalHamiltonian {
    pub fn new(
        omega: Vec<f64>,
        raw_cubic: &[(usize, usize, usize, f64)],
        raw_quartic: &[(usize, usize, usize, usize, f64)],
    ) -> Result<Self> {
        let n = omega.len();
        let mut cubic: BTreeMap<[usize; 3], f64> = BTreeMap::new();
        for &(i, j, k, v) in raw_cubic {
            for &m in &[i, j, k] {
                if m >= n {
                    return Err(Error::ModeOutOfRange { mode: m, n_modes: n });
                }
            }
            let mut key = [i, j, k];
            key.sort_unstable();
            *cubic.entry(key).or_insert(0.0) += v;
        }
        for (key, v) in cubic.iter_mut() {
            *v /= permutation_count(key) as f64;
        }
        let mut quartic: BTreeMap<[usize; 4], f64> = BTreeMap::new();
        for &(i, j, k, l, v) in raw_quartic {
            for &m in &[i, j, k, l] {
                if m >= n {
                    return Err(Error::ModeOutOfRange { mode: m, n_modes: n });
                }
            }
            let mut key = [i, j, k, l];
            key.sort_unstable();
            *quartic.entry(key).or_insert(0.0) += v;
        }
        for (key, v) in quartic.iter_mut() {
            *v /= permutation_count(key) as f64;
        }
        cubic.retain(|_, v| v.abs() > PRUNE_TOL);
        quartic.retain(|_, v| v.abs() > PRUNE_TOL);
        Ok(VibrationalHamiltonian {
            n_modes: n,
            omega,
            cubic,
            quartic,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// Symmetrized cubic coefficient; lookups agree for any index permutation.
    pub fn cubic(&self, i: usize, j: usize, k: usize) -> f64 {
        let mut key = [i, j, k];
        key.sort_unstable();
        self.cubic.get(&key).copied().unwrap_or(0.0)
    }

    pub fn quartic(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let mut key = [i, j, k, l];
        key.sort_unstable();
        self.quartic.get(&key).copied().unwrap_or(0.0)
    }

    pub fn cubic_entries(&self) -> impl Iterator<Item = ([usize; 3], f64)> + '_ {
        self.cubic.iter().map(|(k, &v)| (*k, v))
    }

    pub fn quartic_entries(&self) -> impl Iterator<Item = ([usize; 4], f64)> + '_ {
        self.quartic.iter().map(|(k, &v)| (*k, v))
    }
}

fn permutation_count(key: &[usize]) -> usize {
    // key is sorted; count distinct permutations n!/Π(mult!)
    let n = key.len();
    let mut total: usize = (1..=n).product();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j < n && key[j] == key[i] {
            j += 1;
        }
        let mult = j - i;
        total /= (1..=mult).product::<usize>();
        i = j;
    }
    total
}

/// Build the normal-ordered quartic vibrational Hamiltonian
/// Σ ω(b†b + 1/2) + Σ V3 q q q + Σ V4 q q q q (full ordered index sums),
/// with q = (b† + b)/√2. Includes the zero-point constant.
pub fn build_hamiltonian(h: &VibrationalHamiltonian) -> Result<BosonPolynomial> {
    let n = h.n_modes();
    let mut out = BosonPolynomial::zero(n);
    for (m, &w) in h.omega().iter().enumerate() {
        let num = BosonPolynomial::number(n, m)?;
        out = out.add(&num.scaled(w))?;
        out = out.add(&BosonPolynomial::constant(n, 0.5 * w))?;
    }
    let q: Vec<BosonPolynomial> = (0..n)
        .map(|m| BosonPolynomial::position(n, m))
        .collect::<Result<_>>()?;
    for (key, v) in h.cubic_entries() {
        let weight = v * permutation_count(&key) as f64;
        let prod = q[key[0]].mul(&q[key[1]])?.mul(&q[key[2]])?;
        out = out.add(&prod.scaled(weight))?;
    }
    for (key, v) in h.quartic_entries() {
        let weight = v * permutation_count(&key) as f64;
        let prod = q[key[0]].mul(&q[key[1]])?.mul(&q[key[2]])?.mul(&q[key[3]])?;
        out = out.add(&prod.scaled(weight))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(m: usize) -> LadderOp {
        LadderOp::Annihilate(m)
    }
    fn bd(m: usize) -> LadderOp {
        LadderOp::Create(m)
    }

    #[test]
    fn single_commutator() {
        // b b† = b†b + 1
        let p = normal_order(1, &[b(0), bd(0)]).unwrap();
        assert_eq!(p.coeff(&single_exp(1, 0, 1, 1)), 1.0);
        assert_eq!(p.coeff(&Monomial::identity(1)), 1.0);
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn already_normal_ordered() {
        let p = normal_order(1, &[bd(0), b(0)]).unwrap();
        assert_eq!(p.coeff(&single_exp(1, 0, 1, 1)), 1.0);
        assert_eq!(p.num_terms(), 1);
    }

    #[test]
    fn double_commutator_word() {
        // b b b† b† = b†²b² + 4 b†b + 2
        let p = normal_order(1, &[b(0), b(0), bd(0), bd(0)]).unwrap();
        assert_eq!(p.coeff(&single_exp(1, 0, 2, 2)), 1.0);
        assert_eq!(p.coeff(&single_exp(1, 0, 1, 1)), 4.0);
        assert_eq!(p.coeff(&Monomial::identity(1)), 2.0);
        assert_eq!(p.num_terms(), 3);
    }

    #[test]
    fn number_squared() {
        // (b†b)(b†b) = b†²b² + b†b
        let n = BosonPolynomial::number(1, 0).unwrap();
        let p = n.mul(&n).unwrap();
        assert_eq!(p.coeff(&single_exp(1, 0, 2, 2)), 1.0);
        assert_eq!(p.coeff(&single_exp(1, 0, 1, 1)), 1.0);
        assert_eq!(p.num_terms(), 2);
    }

    #[test]
    fn mode_index_out_of_range() {
        assert!(normal_order(1, &[b(1)]).is_err());
    }

    #[test]
    fn add_cancellation_and_identity() {
        let n = BosonPolynomial::number(2, 1).unwrap();
        let z = n.sub(&n).unwrap();
        assert!(z.is_zero());
        let id = BosonPolynomial::identity(2);
        assert_eq!(id.mul(&n).unwrap(), n);
    }

    #[test]
    fn harmonic_hamiltonian() {
        let h = VibrationalHamiltonian::new(vec![1500.0], &[], &[]).unwrap();
        let p = build_hamiltonian(&h).unwrap();
        assert_eq!(p.coeff(&single_exp(1, 0, 1, 1)), 1500.0);
        assert_eq!(p.coeff(&Monomial::identity(1)), 750.0);
        assert_eq!(p.num_terms(), 2);
        assert!(p.is_hermitian());
    }

    #[test]
    fn quartic_diagonal_expansion() {
        // v q^4 with q = (b†+b)/√2: coefficient of b†²b² is v·6/4·... check
        // against direct expansion of the word (b†+b)^4 / 4.
        let v = 3.0;
        let h = VibrationalHamiltonian::new(vec![0.0], &[], &[(0, 0, 0, 0, v)]).unwrap();
        let p = build_hamiltonian(&h).unwrap();
        // (b†+b)^4 = Σ over the 16 length-4 words; v/4 overall.
        let mut expect = BosonPolynomial::zero(1);
        for bits in 0..16u32 {
            let word: Vec<LadderOp> = (0..4)
                .map(|i| if bits >> i & 1 == 1 { bd(0) } else { b(0) })
                .collect();
            expect = expect.add(&normal_order(1, &word).unwrap()).unwrap();
        }
        expect.scale_mut(v / 4.0);
        assert!(p.coeff_distance(&expect) < 1e-12);
    }

    #[test]
    fn symmetrization_lookup_agrees() {
        // Raw entries spread over permutations collapse to one symmetric value.
        let h = VibrationalHamiltonian::new(
            vec![1.0, 1.0, 1.0],
            &[(0, 1, 2, 6.0)],
            &[],
        )
        .unwrap();
        assert_eq!(h.cubic(0, 1, 2), 1.0);
        assert_eq!(h.cubic(2, 0, 1), 1.0);
        assert_eq!(h.cubic(1, 2, 0), 1.0);
        // Full ordered sum contributes 6 · q0q1q2 → same Hamiltonian as the
        // raw line: one entry of 6.0 at (0,1,2).
        let p = build_hamiltonian(&h).unwrap();
        let key = Monomial::from_exps(vec![(1, 0), (1, 0), (1, 0)]);
        // q0q1q2 has coefficient (1/√2)^3 on b†b†b†.
        assert!((p.coeff(&key) - 6.0 / (2.0 * std::f64::consts::SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn extract_coeffs_layouts() {
        let h = VibrationalHamiltonian::new(vec![1500.0], &[], &[]).unwrap();
        let p = build_hamiltonian(&h).unwrap();
        let v = extract_coeffs(&p, &[3, 4]);
        assert!(v.iter().all(|&c| c == 0.0));
        // b†²b² with degrees {4}: one slot carries 1.0
        let mut q = BosonPolynomial::zero(1);
        q.add_term(single_exp(1, 0, 2, 2), 1.0);
        let v4 = extract_coeffs(&q, &[4]);
        assert_eq!(v4.iter().filter(|&&c| c != 0.0).count(), 1);
        assert_eq!(v4.iter().copied().sum::<f64>(), 1.0);
    }

    #[test]
    fn cubic_coefficient_classes() {
        // Single mode, one V3: all 4 normal-ordered cubic classes appear with
        // weights from (b†+b)³/(2√2).
        let v = 2.0;
        let h = VibrationalHamiltonian::new(vec![0.0], &[(0, 0, 0, v)], &[]).unwrap();
        let p = build_hamiltonian(&h).unwrap();
        let mut expect = BosonPolynomial::zero(1);
        for bits in 0..8u32 {
            let word: Vec<LadderOp> = (0..3)
                .map(|i| if bits >> i & 1 == 1 { bd(0) } else { b(0) })
                .collect();
            expect = expect.add(&normal_order(1, &word).unwrap()).unwrap();
        }
        expect.scale_mut(v / (2.0 * std::f64::consts::SQRT_2));
        assert!(p.coeff_distance(&expect) < 1e-12);
        let cubic = extract_coeffs(&p.degree_part(3, 3), &[3]);
        assert_eq!(cubic.iter().filter(|&&c| c != 0.0).count(), 4);
    }

    #[test]
    fn monomial_order_graded_lex() {
        let basis = monomial_basis(1, &[0, 1, 2]);
        let mut sorted = basis.clone();
        sorted.sort();
        // degree-0 first, then degree 1, then 2; within degree, creation
        // exponents dominate.
        assert_eq!(sorted[0], Monomial::identity(1));
        assert!(sorted.iter().map(|m| m.degree()).is_sorted());
    }
}
