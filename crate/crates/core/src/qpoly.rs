//! Truncated polynomials in the Boltzmann base `q` with exact integer
//! exponents.
//!
//! Cold spectra make the alternating Fermi recursion catastrophically
//! ill-conditioned in plain floating point: the partition function of two
//! fermions in a half well is `z1(q^4)^2 - z1(q^8) ~ 2 q^20`, a difference of
//! two numbers that agree to `O(q^12)`. Representing every intermediate as a
//! polynomial `sum_e c_e q^e` sidesteps this entirely — the cancellations
//! happen coefficient-wise between small state-count rationals and the final
//! coefficients are non-negative multiplicities, so evaluating at `q` sums
//! positive terms only.
//!
//! A [`QPoly`] stores coefficients densely from an exponent `offset` and
//! drops every exponent above its `cap`; since all series involved have
//! non-negative exponents, capped arithmetic agrees exactly with exact
//! arithmetic followed by a final truncation at `cap`. The discarded tail is
//! certified by [`tuple_tail_bound`].

use core::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use crate::{cast, Float};

/// Nonzero-count below which a factor is multiplied term-by-term instead of
/// via dense convolution.
const SPARSE_FACTOR_LIMIT: usize = 96;

/// Polynomial `sum_j coeffs[j] * q^(offset + j)`, truncated above `cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct QPoly<F> {
    offset: u64,
    coeffs: Vec<F>,
    cap: u64,
}

impl<F: Float> QPoly<F> {
    /// The single-particle series `z1(q^m) = sum_{n>=1} q^(m n^2)` truncated
    /// at `cap`.
    pub fn z1_leaf(m: u64, cap: u64) -> Self {
        if m == 0 || m > cap {
            return Self::zero_with_cap(cap);
        }
        let mut coeffs = Vec::new();
        let mut n = 1u64;
        loop {
            let e = m * n * n;
            if e > cap {
                break;
            }
            let idx = (e - m) as usize;
            if coeffs.len() <= idx {
                coeffs.resize(idx + 1, F::zero());
            }
            coeffs[idx] = F::one();
            n += 1;
        }
        Self {
            offset: m,
            coeffs,
            cap,
        }
        .normalized()
    }

    fn zero_with_cap(cap: u64) -> Self {
        Self {
            offset: 0,
            coeffs: Vec::new(),
            cap,
        }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn offset(&self) -> u64 {
        self.offset
    }

    /// Drop leading/trailing zero coefficients so `offset` points at a real
    /// term.
    fn normalized(mut self) -> Self {
        let leading = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len());
        if leading > 0 {
            self.coeffs.drain(..leading);
            self.offset += leading as u64;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.offset = 0;
        }
        self
    }

    pub(crate) fn nonzero_terms(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Evaluate value-level sums at `q = exp(ln_q)`. Returns the mantissa
    /// sums relative to `offset`, which callers recombine without ever
    /// forming `q^offset` unless they need the raw value.
    pub fn eval(&self, ln_q: F) -> PolyEval<F> {
        let q = ln_q.exp();
        let mut plain = KahanSum::default();
        let mut weighted = KahanSum::default();
        let mut power = F::one(); // q^j
        for (j, &c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                power = power * q;
            }
            if !c.is_zero() {
                let term = c * power;
                plain.add(term);
                weighted.add(term * cast::<F>(j as f64));
            }
        }
        PolyEval {
            offset: self.offset,
            mantissa: plain.value(),
            weighted_mantissa: weighted.value(),
        }
    }
}

/// Result of evaluating a [`QPoly`]: `Z = q^offset * mantissa` and
/// `sum_e c_e e q^e = q^offset * (offset * mantissa + weighted_mantissa)`.
#[derive(Clone, Copy, Debug)]
pub struct PolyEval<F> {
    pub offset: u64,
    pub mantissa: F,
    pub weighted_mantissa: F,
}

impl<F: Float> PolyEval<F> {
    /// `ln Z`, finite even when `q^offset` underflows.
    pub fn log_value(&self, ln_q: F) -> F {
        cast::<F>(self.offset as f64) * ln_q + self.mantissa.ln()
    }

    /// Raw value `q^offset * mantissa`; may underflow to 0 for very cold
    /// spectra.
    pub fn value(&self, ln_q: F) -> F {
        (cast::<F>(self.offset as f64) * ln_q).exp() * self.mantissa
    }

    /// Mean exponent `<e> = offset + <j>`.
    pub fn mean_exponent(&self) -> F {
        cast::<F>(self.offset as f64) + self.weighted_mantissa / self.mantissa
    }

    /// Mean excess exponent `<j>` above the offset; entropy assembles from
    /// this so the large `offset` part cancels analytically.
    pub fn mean_excess_exponent(&self) -> F {
        self.weighted_mantissa / self.mantissa
    }
}

#[derive(Clone, Copy)]
struct KahanSum<F> {
    sum: F,
    carry: F,
}

impl<F: Float> Default for KahanSum<F> {
    fn default() -> Self {
        Self {
            sum: F::zero(),
            carry: F::zero(),
        }
    }
}

impl<F: Float> KahanSum<F> {
    fn add(&mut self, term: F) {
        let y = term - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> F {
        self.sum
    }
}

impl<F: Float> Add for QPoly<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let cap = self.cap.min(rhs.cap);
        if self.coeffs.is_empty() {
            let mut out = rhs;
            out.cap = cap;
            return out;
        }
        if rhs.coeffs.is_empty() {
            let mut out = self;
            out.cap = cap;
            return out;
        }
        let offset = self.offset.min(rhs.offset);
        let hi = (self.offset + self.coeffs.len() as u64)
            .max(rhs.offset + rhs.coeffs.len() as u64)
            .min(cap + 1);
        let mut coeffs = vec![F::zero(); (hi - offset) as usize];
        for (j, &c) in self.coeffs.iter().enumerate() {
            let e = self.offset + j as u64;
            if e <= cap {
                coeffs[(e - offset) as usize] = coeffs[(e - offset) as usize] + c;
            }
        }
        for (j, &c) in rhs.coeffs.iter().enumerate() {
            let e = rhs.offset + j as u64;
            if e <= cap {
                coeffs[(e - offset) as usize] = coeffs[(e - offset) as usize] + c;
            }
        }
        Self {
            offset,
            coeffs,
            cap,
        }
        .normalized()
    }
}

impl<F: Float> Sub for QPoly<F> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs * -F::one()
    }
}

impl<F: Float> Mul<F> for QPoly<F> {
    type Output = Self;
    fn mul(mut self, rhs: F) -> Self {
        for c in &mut self.coeffs {
            *c = *c * rhs;
        }
        self.normalized()
    }
}

impl<F: Float> Mul for QPoly<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let cap = self.cap.min(rhs.cap);
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Self::zero_with_cap(cap);
        }
        let offset = self.offset + rhs.offset;
        if offset > cap {
            return Self::zero_with_cap(cap);
        }
        let width = ((cap - offset + 1) as usize).min(self.coeffs.len() + rhs.coeffs.len() - 1);
        let mut coeffs = vec![F::zero(); width];
        // Term-by-term through the sparser factor when one is lacunary
        // (single-particle leaves are), dense convolution otherwise.
        let (a, b) = if self.nonzero_terms() <= rhs.nonzero_terms() {
            (&self, &rhs)
        } else {
            (&rhs, &self)
        };
        if a.nonzero_terms() <= SPARSE_FACTOR_LIMIT {
            for (ja, &ca) in a.coeffs.iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                let upper = width.saturating_sub(ja).min(b.coeffs.len());
                for jb in 0..upper {
                    coeffs[ja + jb] = coeffs[ja + jb] + ca * b.coeffs[jb];
                }
            }
        } else {
            for (ja, &ca) in a.coeffs.iter().enumerate() {
                if ja >= width {
                    break;
                }
                let upper = (width - ja).min(b.coeffs.len());
                for jb in 0..upper {
                    coeffs[ja + jb] = coeffs[ja + jb] + ca * b.coeffs[jb];
                }
            }
        }
        Self {
            offset,
            coeffs,
            cap,
        }
        .normalized()
    }
}

impl<F: Float> Zero for QPoly<F> {
    fn zero() -> Self {
        Self {
            offset: 0,
            coeffs: Vec::new(),
            cap: u64::MAX,
        }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl<F: Float> One for QPoly<F> {
    fn one() -> Self {
        Self {
            offset: 0,
            coeffs: vec![F::one()],
            cap: u64::MAX,
        }
    }
}

/// Certified upper bound on the discarded tail `sum_{e > cap} c_e q^e` of an
/// `n`-particle partition polynomial over a well with nome power `base`.
///
/// Any many-body state maps injectively to (level tuple, side labels), so
/// `c_e <= 2^n (sqrt(e/base) + 1)^(n-1)`. The majorizing terms shrink by at
/// least `r = q * ((sqrt((cap+2)/base)+1)/(sqrt((cap+1)/base)+1))^(n-1)` per
/// step, giving a geometric bound.
pub fn tuple_tail_bound<F: Float>(n: u32, base: u32, cap: u64, ln_q: F) -> F {
    let nf = n as f64;
    let basef = base as f64;
    let e1 = cap as f64 + 1.0;
    let ln_head = cast::<F>(nf * core::f64::consts::LN_2)
        + cast::<F>((nf - 1.0) * ((e1 / basef).sqrt() + 1.0).ln())
        + cast::<F>(e1) * ln_q;
    let growth = (((e1 + 1.0) / basef).sqrt() + 1.0) / ((e1 / basef).sqrt() + 1.0);
    let r = cast::<F>(growth.powf(nf - 1.0)) * ln_q.exp();
    if r >= F::one() {
        return F::infinity();
    }
    let head = ln_head.exp();
    if head.is_zero() {
        // True tail is below the smallest positive float; that float is
        // still a valid upper bound.
        return F::min_positive_value();
    }
    head / (F::one() - r)
}

/// Smallest exponent cap that pushes [`tuple_tail_bound`] below
/// `tol_rel * q^ground`, where `ground` is the coldest many-body exponent of
/// the system. Control-plane math, done in `f64` log space so nothing
/// under- or overflows.
pub(crate) fn required_cap(n: u32, base: u32, u: f64, ground: u64, tol_rel: f64) -> u64 {
    let nf = n as f64;
    let basef = base as f64;
    let target = tol_rel.ln() - u * ground as f64;
    let ln_tail = |cap: u64| -> f64 {
        let e1 = cap as f64 + 1.0;
        let growth = (((e1 + 1.0) / basef).sqrt() + 1.0) / ((e1 / basef).sqrt() + 1.0);
        let r = growth.powf(nf - 1.0) * (-u).exp();
        let geometric = if r < 1.0 { -(1.0 - r).ln() } else { f64::INFINITY };
        nf * core::f64::consts::LN_2
            + (nf - 1.0).max(0.0) * ((e1 / basef).sqrt() + 1.0).ln()
            - e1 * u
            + geometric
    };
    let mut cap = ground + 16;
    for _ in 0..256 {
        let excess = ln_tail(cap) - target;
        if excess <= 0.0 {
            return cap;
        }
        let step = if excess.is_finite() {
            (excess / u).ceil().max(8.0) as u64
        } else {
            cap.max(8)
        };
        cap += step;
    }
    cap
}
