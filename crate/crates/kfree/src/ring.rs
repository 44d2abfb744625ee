//! Exact arithmetic in five Euclidean quadratic integer rings and in Z.
//!
//! Every ring is presented on the integer basis {1, ω}, so an element is a
//! coordinate pair (a, b) meaning a + b·ω. The table driving the arithmetic
//! stores ω² = s + t·ω, the norm form, the unit group and the residue
//! classes that decide how a rational prime behaves (ramified, inert or
//! split). All coordinate arithmetic is checked `i64`; overflow is an
//! error, never a wrapped value.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier for the supported coefficient rings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingId {
    /// Z[i], the Gaussian integers.
    Gauss,
    /// Z[ρ] with ρ = e^{2πi/3}, the Eisenstein integers.
    Eisenstein,
    /// Z[√2].
    Sqrt2,
    /// Z[τ] with τ the golden ratio.
    Golden,
    /// Z[√3].
    Sqrt3,
    /// Z itself, the degenerate rank-1 carrier.
    Rational,
}

impl RingId {
    pub const ALL: [RingId; 6] = [
        RingId::Gauss,
        RingId::Eisenstein,
        RingId::Sqrt2,
        RingId::Golden,
        RingId::Sqrt3,
        RingId::Rational,
    ];

    /// The five quadratic rings, without the rational degenerate case.
    pub const QUADRATIC: [RingId; 5] = [
        RingId::Gauss,
        RingId::Eisenstein,
        RingId::Sqrt2,
        RingId::Golden,
        RingId::Sqrt3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RingId::Gauss => "gauss",
            RingId::Eisenstein => "eisenstein",
            RingId::Sqrt2 => "sqrt2",
            RingId::Golden => "golden",
            RingId::Sqrt3 => "sqrt3",
            RingId::Rational => "rational",
        }
    }

    pub fn parse(s: &str) -> Result<RingId> {
        match s {
            "gauss" => Ok(RingId::Gauss),
            "eisenstein" => Ok(RingId::Eisenstein),
            "sqrt2" => Ok(RingId::Sqrt2),
            "golden" => Ok(RingId::Golden),
            "sqrt3" => Ok(RingId::Sqrt3),
            "rational" => Ok(RingId::Rational),
            other => Err(Error::UnknownRing(other.to_string())),
        }
    }
}

impl fmt::Display for RingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Full description of one ring: basis element, multiplication rule,
/// norm form, units and prime-splitting residues.
#[derive(Debug)]
pub struct RingSpec {
    pub id: RingId,
    /// Symbolic name of ω; `None` for the rational integers.
    pub omega: Option<&'static str>,
    /// ω² = omega_sq.0 + omega_sq.1 · ω.
    pub omega_sq: (i64, i64),
    /// N(a + bω) = p·a² + q·ab + r·b² as (p, q, r). Unused for `Rational`,
    /// where N(a) = a.
    pub norm_coeffs: (i64, i64, i64),
    /// Coordinates of the fundamental unit; `None` when the unit group is
    /// finite (gauss, eisenstein) or trivial (rational).
    pub fundamental_unit: Option<(i64, i64)>,
    /// The fundamental unit u satisfies u² = unit_rec.0 · u + unit_rec.1,
    /// which drives the two-term coefficient recursion for u^n.
    pub unit_rec: Option<(i64, i64)>,
    /// The torsion units, explicitly.
    pub torsion_units: &'static [(i64, i64)],
    /// Ramified rational primes with a defining generator of the prime over
    /// each (not necessarily in canonical form).
    pub ramified: &'static [(i64, (i64, i64))],
    /// Residue classes mod `residue_mod` deciding split/inert for
    /// unramified rational primes.
    pub residue_mod: i64,
    pub split_residues: &'static [i64],
    pub inert_residues: &'static [i64],
}

static GAUSS: RingSpec = RingSpec {
    id: RingId::Gauss,
    omega: Some("i"),
    omega_sq: (-1, 0),
    norm_coeffs: (1, 0, 1),
    fundamental_unit: None,
    unit_rec: None,
    torsion_units: &[(1, 0), (0, 1), (-1, 0), (0, -1)],
    ramified: &[(2, (1, 1))],
    residue_mod: 4,
    split_residues: &[1],
    inert_residues: &[3],
};

static EISENSTEIN: RingSpec = RingSpec {
    id: RingId::Eisenstein,
    omega: Some("ρ"),
    omega_sq: (-1, -1),
    norm_coeffs: (1, -1, 1),
    fundamental_unit: None,
    unit_rec: None,
    // (-ρ)^m for m = 0..5
    torsion_units: &[(1, 0), (0, -1), (-1, -1), (-1, 0), (0, 1), (1, 1)],
    ramified: &[(3, (1, -1))],
    residue_mod: 3,
    split_residues: &[1],
    inert_residues: &[2],
};

static SQRT2: RingSpec = RingSpec {
    id: RingId::Sqrt2,
    omega: Some("√2"),
    omega_sq: (2, 0),
    norm_coeffs: (1, 0, -2),
    fundamental_unit: Some((1, 1)), // λ = 1 + √2
    unit_rec: Some((2, 1)),         // λ² = 2λ + 1
    torsion_units: &[(1, 0), (-1, 0)],
    ramified: &[(2, (0, 1))],
    residue_mod: 8,
    split_residues: &[1, 7],
    inert_residues: &[3, 5],
};

static GOLDEN: RingSpec = RingSpec {
    id: RingId::Golden,
    omega: Some("τ"),
    omega_sq: (1, 1),
    norm_coeffs: (1, 1, -1),
    fundamental_unit: Some((0, 1)), // τ itself
    unit_rec: Some((1, 1)),         // τ² = τ + 1
    torsion_units: &[(1, 0), (-1, 0)],
    ramified: &[(5, (-1, 2))], // √5 = 2τ - 1
    residue_mod: 5,
    split_residues: &[1, 4],
    inert_residues: &[2, 3],
};

static SQRT3: RingSpec = RingSpec {
    id: RingId::Sqrt3,
    omega: Some("√3"),
    omega_sq: (3, 0),
    norm_coeffs: (1, 0, -3),
    fundamental_unit: Some((2, 1)), // η = 2 + √3
    unit_rec: Some((4, -1)),        // η² = 4η - 1
    torsion_units: &[(1, 0), (-1, 0)],
    ramified: &[(2, (1, 1)), (3, (0, 1))],
    residue_mod: 12,
    split_residues: &[1, 11],
    inert_residues: &[5, 7],
};

static RATIONAL: RingSpec = RingSpec {
    id: RingId::Rational,
    omega: None,
    omega_sq: (0, 0),
    norm_coeffs: (1, 0, 0),
    fundamental_unit: None,
    unit_rec: None,
    torsion_units: &[(1, 0), (-1, 0)],
    ramified: &[],
    residue_mod: 1,
    split_residues: &[],
    inert_residues: &[],
};

/// Looks up the static specification of a ring.
pub fn make_ring(id: RingId) -> &'static RingSpec {
    match id {
        RingId::Gauss => &GAUSS,
        RingId::Eisenstein => &EISENSTEIN,
        RingId::Sqrt2 => &SQRT2,
        RingId::Golden => &GOLDEN,
        RingId::Sqrt3 => &SQRT3,
        RingId::Rational => &RATIONAL,
    }
}

/// Looks up a ring by its string identifier.
pub fn make_ring_by_name(name: &str) -> Result<&'static RingSpec> {
    Ok(make_ring(RingId::parse(name)?))
}

fn cadd(x: i64, y: i64) -> Result<i64> {
    x.checked_add(y).ok_or(Error::Overflow("addition"))
}

fn csub(x: i64, y: i64) -> Result<i64> {
    x.checked_sub(y).ok_or(Error::Overflow("subtraction"))
}

fn cmul(x: i64, y: i64) -> Result<i64> {
    x.checked_mul(y).ok_or(Error::Overflow("multiplication"))
}

/// An element a + b·ω of one of the supported rings.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadInt {
    pub a: i64,
    pub b: i64,
    pub ring: RingId,
}

impl fmt::Debug for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self, self.ring)
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let omega = make_ring(self.ring).omega.unwrap_or("");
        match (self.a, self.b) {
            (a, 0) => write!(f, "{a}"),
            (0, 1) => write!(f, "{omega}"),
            (0, -1) => write!(f, "-{omega}"),
            (0, b) => write!(f, "{b}{omega}"),
            (a, 1) => write!(f, "{a}+{omega}"),
            (a, -1) => write!(f, "{a}-{omega}"),
            (a, b) if b > 0 => write!(f, "{a}+{b}{omega}"),
            (a, b) => write!(f, "{a}{b}{omega}"),
        }
    }
}

impl QuadInt {
    /// Builds an element, rejecting a nonzero ω-coordinate in Z.
    pub fn new(ring: RingId, a: i64, b: i64) -> Result<QuadInt> {
        if ring == RingId::Rational && b != 0 {
            return Err(Error::domain("rational integers have no ω-coordinate"));
        }
        Ok(QuadInt { a, b, ring })
    }

    pub const fn raw(ring: RingId, a: i64, b: i64) -> QuadInt {
        QuadInt { a, b, ring }
    }

    pub fn zero(ring: RingId) -> QuadInt {
        QuadInt { a: 0, b: 0, ring }
    }

    pub fn one(ring: RingId) -> QuadInt {
        QuadInt { a: 1, b: 0, ring }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    fn check_ring(&self, other: &QuadInt) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    pub fn add(&self, other: &QuadInt) -> Result<QuadInt> {
        self.check_ring(other)?;
        Ok(QuadInt {
            a: cadd(self.a, other.a)?,
            b: cadd(self.b, other.b)?,
            ring: self.ring,
        })
    }

    pub fn sub(&self, other: &QuadInt) -> Result<QuadInt> {
        self.check_ring(other)?;
        Ok(QuadInt {
            a: csub(self.a, other.a)?,
            b: csub(self.b, other.b)?,
            ring: self.ring,
        })
    }

    pub fn neg(&self) -> QuadInt {
        QuadInt { a: -self.a, b: -self.b, ring: self.ring }
    }

    /// (a+bω)(c+dω) with ω² = s + tω. Intermediates are 128-bit, so this
    /// errors only when a result coordinate does not fit in `i64`.
    pub fn mul(&self, other: &QuadInt) -> Result<QuadInt> {
        self.check_ring(other)?;
        let (s, t) = make_ring(self.ring).omega_sq;
        let (a, b) = (self.a as i128, self.b as i128);
        let (c, d) = (other.a as i128, other.b as i128);
        let over = Error::Overflow("multiplication");
        let bd = b.checked_mul(d).ok_or(over)?;
        let re = a
            .checked_mul(c)
            .and_then(|ac| (s as i128).checked_mul(bd).and_then(|sbd| ac.checked_add(sbd)))
            .ok_or(Error::Overflow("multiplication"))?;
        let im = a
            .checked_mul(d)
            .and_then(|ad| b.checked_mul(c).and_then(|bc| ad.checked_add(bc)))
            .and_then(|x| (t as i128).checked_mul(bd).and_then(|tbd| x.checked_add(tbd)))
            .ok_or(Error::Overflow("multiplication"))?;
        let fit = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("multiplication"));
        Ok(QuadInt { a: fit(re)?, b: fit(im)?, ring: self.ring })
    }

    /// The nontrivial ring automorphism: ω ↦ t − ω. Identity on Z.
    pub fn conj(&self) -> QuadInt {
        let (_, t) = make_ring(self.ring).omega_sq;
        QuadInt {
            a: self.a + t * self.b,
            b: -self.b,
            ring: self.ring,
        }
    }

    /// Field norm N(x) = x·conj(x). May be negative in the real rings;
    /// equals the element itself in Z. Evaluated exactly in 128 bits, so
    /// it only errors when the value itself does not fit in `i64`.
    pub fn norm(&self) -> Result<i64> {
        i64::try_from(self.norm_wide()).map_err(|_| Error::Overflow("norm"))
    }

    fn norm_wide(&self) -> i128 {
        if self.ring == RingId::Rational {
            return self.a as i128;
        }
        let (p, q, r) = make_ring(self.ring).norm_coeffs;
        let (a, b) = (self.a as i128, self.b as i128);
        p as i128 * a * a + q as i128 * a * b + r as i128 * b * b
    }

    pub fn abs_norm(&self) -> Result<u64> {
        Ok(self.norm()?.unsigned_abs())
    }

    pub fn is_unit(&self) -> bool {
        self.norm_wide().unsigned_abs() == 1
    }

    /// x^k by repeated multiplication; k is small everywhere we use this.
    pub fn pow(&self, k: u32) -> Result<QuadInt> {
        let mut acc = QuadInt::one(self.ring);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Exact division; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &QuadInt) -> Result<Option<QuadInt>> {
        self.check_ring(other)?;
        if other.is_zero() {
            return Err(Error::domain("division by zero"));
        }
        let n = other.norm()?;
        let num = self.mul(&other.conj())?;
        if num.a % n != 0 || num.b % n != 0 {
            return Ok(None);
        }
        Ok(Some(QuadInt { a: num.a / n, b: num.b / n, ring: self.ring }))
    }

    pub fn divides(&self, other: &QuadInt) -> Result<bool> {
        Ok(other.div_exact(self)?.is_some())
    }

    /// Nearest-integer rounding of each coordinate of self/other. All five
    /// quadratic rings are norm-Euclidean for this quotient: the remainder
    /// self − q·other has |N| < |N(other)|.
    fn div_round(&self, other: &QuadInt) -> Result<QuadInt> {
        let n = other.norm()?;
        let num = self.mul(&other.conj())?;
        Ok(QuadInt {
            a: round_div(num.a, n),
            b: round_div(num.b, n),
            ring: self.ring,
        })
    }

    pub(crate) fn max_coord(&self) -> u64 {
        self.a.unsigned_abs().max(self.b.unsigned_abs())
    }
}

/// Nearest integer to n/d (d ≠ 0); any fixed tie rule keeps the rounding
/// error ≤ 1/2, which is all the Euclidean step needs.
fn round_div(n: i64, d: i64) -> i64 {
    let (n, d) = if d < 0 { (-n, -d) } else { (n, d) };
    let q = n.div_euclid(d);
    let r = n.rem_euclid(d);
    if 2 * r > d {
        q + 1
    } else {
        q
    }
}

/// How a rational prime sits in the ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PrimeClass {
    /// p = unit · π² with π the canonical generator.
    Ramified(QuadInt),
    /// p stays prime; the generator is p itself.
    Inert(QuadInt),
    /// p = ±π·π*; `0` is the canonical representative, `1` its exact
    /// conjugate, so the product of the pair is ±p.
    Split(QuadInt, QuadInt),
}

impl PrimeClass {
    /// Canonical representatives of the distinct prime classes over p:
    /// one for ramified/inert, two (non-associate) for split.
    pub fn canonical_primes(&self) -> Result<Vec<QuadInt>> {
        match self {
            PrimeClass::Ramified(g) | PrimeClass::Inert(g) => Ok(vec![*g]),
            PrimeClass::Split(pi, pi_star) => {
                Ok(vec![*pi, canonical_associate(pi_star)?.rep])
            }
        }
    }
}

/// Unit-times-canonical-prime-powers decomposition of an element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub unit: QuadInt,
    /// (canonical prime, exponent ≥ 1), sorted by (|N|, b, a).
    pub factors: Vec<(QuadInt, u32)>,
}

impl Factorization {
    /// Re-multiplies unit · Π πᵢ^eᵢ.
    pub fn product(&self) -> Result<QuadInt> {
        let mut acc = self.unit;
        for (p, e) in &self.factors {
            acc = acc.mul(&p.pow(*e)?)?;
        }
        Ok(acc)
    }
}

/// Result of [`canonical_associate`]: x = unit · rep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub unit: QuadInt,
    pub rep: QuadInt,
}

/// Deterministic representative of the unit orbit of x ≠ 0.
///
/// gauss: the associate with a > 0, b ≥ 0 (quarter sector);
/// eisenstein: a > 0, 0 ≤ b < a (sector of angle π/3);
/// real rings: among ±λ^j·x the associate minimising max(|a|,|b|),
/// ties broken by a > 0, then b ≥ 0, then lexicographic (a, b);
/// rational: the absolute value.
pub fn canonical_associate(x: &QuadInt) -> Result<CanonicalForm> {
    if x.is_zero() {
        return Err(Error::domain("zero has no canonical associate"));
    }
    match x.ring {
        RingId::Rational => {
            let sign = if x.a < 0 { -1 } else { 1 };
            Ok(CanonicalForm {
                unit: QuadInt::raw(x.ring, sign, 0),
                rep: QuadInt::raw(x.ring, x.a.abs(), 0),
            })
        }
        RingId::Gauss | RingId::Eisenstein => canonical_torsion(x),
        RingId::Sqrt2 | RingId::Golden | RingId::Sqrt3 => canonical_real(x),
    }
}

fn in_sector(ring: RingId, c: &QuadInt) -> bool {
    match ring {
        RingId::Gauss => c.a > 0 && c.b >= 0,
        RingId::Eisenstein => c.a > 0 && 0 <= c.b && c.b < c.a,
        _ => unreachable!(),
    }
}

fn canonical_torsion(x: &QuadInt) -> Result<CanonicalForm> {
    let spec = make_ring(x.ring);
    let mut found: Option<(QuadInt, QuadInt)> = None;
    for &(ua, ub) in spec.torsion_units {
        let u = QuadInt::raw(x.ring, ua, ub);
        let cand = x.mul(&u)?;
        if in_sector(x.ring, &cand) {
            if found.is_some() {
                return Err(Error::internal(format!("sector not unique for {x:?}")));
            }
            // x = u⁻¹ · cand, and u⁻¹ = conj-of-unit trick is not uniform;
            // search the torsion list for the inverse instead.
            let inv = spec
                .torsion_units
                .iter()
                .map(|&(ia, ib)| QuadInt::raw(x.ring, ia, ib))
                .find(|v| {
                    v.mul(&u).map(|p| p == QuadInt::one(x.ring)).unwrap_or(false)
                })
                .ok_or_else(|| Error::internal("torsion inverse missing"))?;
            found = Some((inv, cand));
        }
    }
    let (unit, rep) = found
        .ok_or_else(|| Error::internal(format!("no sector representative for {x:?}")))?;
    Ok(CanonicalForm { unit, rep })
}

/// sign(|σ₁(x)|² − |σ₂(x)|²) = sign((2a + tb)·b), since σ₁ − σ₂ = b√(t² + 4s)
/// and σ₁ + σ₂ = 2a + tb.
fn embedding_gap(x: &QuadInt) -> i128 {
    let t = make_ring(x.ring).omega_sq.1;
    let trace = 2 * (x.a as i128) + (t as i128) * (x.b as i128);
    trace * (x.b as i128)
}

fn canonical_real(x: &QuadInt) -> Result<CanonicalForm> {
    let ring = x.ring;
    let lam = {
        let (a, b) = make_ring(ring).fundamental_unit.unwrap();
        QuadInt::raw(ring, a, b)
    };
    let lam_inv = unit_power(ring, -1)?;

    // Walk ±λ^j·x in both directions. Past the embedding crossing the
    // coordinate max can shrink below c/8 no more, so stopping once the
    // current max exceeds 8·best + 8 cannot lose the minimum.
    let mut cands: Vec<(i64, QuadInt)> = vec![(0, *x)];
    for (dir, step) in [(1i64, lam), (-1i64, lam_inv)] {
        let mut cur = *x;
        let mut best = x.max_coord();
        for i in 1..=400i64 {
            match cur.mul(&step) {
                Ok(next) => cur = next,
                Err(_) => break, // beyond any possible minimum
            }
            cands.push((dir * i, cur));
            let c = cur.max_coord();
            if c < best {
                best = c;
            }
            // multiplying by λ grows σ₁; by λ⁻¹ grows σ₂
            let past = if dir == 1 {
                embedding_gap(&cur) >= 0
            } else {
                embedding_gap(&cur) <= 0
            };
            if past && c > 8 * best + 8 {
                break;
            }
        }
    }

    let key = |c: &QuadInt| (c.max_coord(), c.a <= 0, c.b < 0, c.a, c.b);
    let mut sel: Option<(i64, bool, QuadInt)> = None;
    for &(j, cand) in &cands {
        for (neg, c) in [(false, cand), (true, cand.neg())] {
            let better = match &sel {
                None => true,
                Some((_, _, cur)) => key(&c) < key(cur),
            };
            if better {
                sel = Some((j, neg, c));
            }
        }
    }
    let (j, neg, rep) = sel.unwrap();
    // rep = ±λ^j·x, so x = ±λ^{−j}·rep.
    let mut unit = unit_power(ring, -j)?;
    if neg {
        unit = unit.neg();
    }
    debug_assert_eq!(unit.mul(&rep).unwrap(), *x);
    Ok(CanonicalForm { unit, rep })
}

/// n-th power of the fundamental unit via the two-term coefficient
/// recursion c_{m+1} = t·c_m + s·c_{m−1}, c₀ = 0, c₁ = 1, which gives
/// u^n = c_n·u + s·c_{n−1}.
pub fn unit_power(ring: RingId, n: i64) -> Result<QuadInt> {
    let spec = make_ring(ring);
    let (t, s) = spec
        .unit_rec
        .ok_or_else(|| Error::domain(format!("ring {ring} has a finite unit group")))?;
    if n.abs() > 80 {
        return Err(Error::precondition("unit exponent |n| ≤ 80"));
    }
    // (c_{m−1}, c_m), starting at m = 0 from (c_{−1}, c₀) = (s, 0).
    let mut pair = (s, 0i64);
    if n >= 0 {
        for _ in 0..n {
            let next = cadd(cmul(t, pair.1)?, cmul(s, pair.0)?)?;
            pair = (pair.1, next);
        }
    } else {
        for _ in 0..(-n) {
            // step backward: c_{m−1} = s·(c_{m+1} − t·c_m)
            let prev_c = cmul(s, csub(pair.1, cmul(t, pair.0)?)?)?;
            pair = (prev_c, pair.0);
        }
    }
    let (prev, cur) = pair;
    let (ua, ub) = spec.fundamental_unit.unwrap();
    let res = QuadInt::raw(
        ring,
        cadd(cmul(cur, ua)?, cmul(s, prev)?)?,
        cmul(cur, ub)?,
    );
    if !res.is_unit() {
        return Err(Error::internal(format!("unit_power({ring},{n}) not a unit")));
    }
    Ok(res)
}

/// Trial-division primality for the desk-scale ranges we need.
pub fn is_rational_prime(n: i64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5i64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % modulus as u128) as u64;
        }
        base = ((base as u128 * base as u128) % modulus as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Tonelli–Shanks square root mod an odd prime.
fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    // write p − 1 = q·2^s with q odd
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    // find a quadratic non-residue
    let mut z = 2u64;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = ((t2 as u128 * t2 as u128) % p as u128) as u64;
            i += 1;
            if i == m {
                return None;
            }
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = ((b as u128 * b as u128) % p as u128) as u64;
        t = ((t as u128 * c as u128) % p as u128) as u64;
        r = ((r as u128 * b as u128) % p as u128) as u64;
    }
    Some(r)
}

/// Residue-only classification (no generator search). Cheap enough for
/// Euler-product truncations over millions of primes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitKind {
    Ramified,
    Inert,
    Split,
}

pub fn split_kind(ring: RingId, p: i64) -> Result<SplitKind> {
    let spec = make_ring(ring);
    if ring == RingId::Rational {
        return Ok(SplitKind::Inert);
    }
    if spec.ramified.iter().any(|&(rp, _)| rp == p) {
        return Ok(SplitKind::Ramified);
    }
    let r = p % spec.residue_mod;
    if spec.split_residues.contains(&r) {
        Ok(SplitKind::Split)
    } else if spec.inert_residues.contains(&r) {
        Ok(SplitKind::Inert)
    } else {
        Err(Error::internal(format!("residue table gap: {p} mod {}", spec.residue_mod)))
    }
}

/// Classifies a rational prime and produces generators: the table decides
/// the tag, and a split p is factored by Euclidean descent from a root of
/// x² − tx − s mod p.
pub fn classify_prime(ring: RingId, p: i64) -> Result<PrimeClass> {
    if !is_rational_prime(p) {
        return Err(Error::domain(format!("{p} is not a rational prime")));
    }
    let spec = make_ring(ring);
    if ring == RingId::Rational {
        return Ok(PrimeClass::Inert(QuadInt::raw(ring, p, 0)));
    }
    if let Some(&(_, (ga, gb))) = spec.ramified.iter().find(|&&(rp, _)| rp == p) {
        let gen = QuadInt::raw(ring, ga, gb);
        return Ok(PrimeClass::Ramified(canonical_associate(&gen)?.rep));
    }
    match split_kind(ring, p)? {
        SplitKind::Inert => {
            let rep = canonical_associate(&QuadInt::raw(ring, p, 0))?.rep;
            Ok(PrimeClass::Inert(rep))
        }
        SplitKind::Split => {
            let (s, t) = spec.omega_sq;
            let pu = p as u64;
            let disc = ((t as i128 * t as i128 + 4 * s as i128).rem_euclid(p as i128)) as u64;
            let root_d = sqrt_mod(disc, pu)
                .ok_or_else(|| Error::internal(format!("disc not a QR mod split {p}")))?;
            // root of x² − tx − s: (t + √disc)/2 mod p
            let inv2 = pow_mod(2, pu - 2, pu);
            let root =
                ((((t as i128).rem_euclid(p as i128) as u64 + root_d) as u128 * inv2 as u128)
                    % pu as u128) as i64;
            let g = gcd(
                &QuadInt::raw(ring, p, 0),
                &QuadInt::raw(ring, -root, 1),
            )?;
            if g.abs_norm()? != p as u64 {
                return Err(Error::internal(format!("descent failed over {p}")));
            }
            let c1 = canonical_associate(&g)?.rep;
            let c2 = canonical_associate(&g.conj())?.rep;
            let pi = if (c1.b, c1.a) <= (c2.b, c2.a) { c1 } else { c2 };
            Ok(PrimeClass::Split(pi, pi.conj()))
        }
        SplitKind::Ramified => unreachable!(),
    }
}

/// Greatest common divisor as the canonical representative, by the
/// nearest-rounding Euclidean algorithm. Intermediate values are reduced
/// to their canonical associates so coordinates stay near √|N|.
pub fn gcd(x: &QuadInt, y: &QuadInt) -> Result<QuadInt> {
    x.check_ring(y)?;
    if x.is_zero() && y.is_zero() {
        return Err(Error::domain("gcd(0, 0) is undefined"));
    }
    if x.ring == RingId::Rational {
        let g = gcd_i64(x.a, y.a);
        return Ok(QuadInt::raw(x.ring, g, 0));
    }
    let mut a = *x;
    let mut b = *y;
    while !b.is_zero() {
        let q = a.div_round(&b)?;
        let r = a.sub(&q.mul(&b)?)?;
        debug_assert!(r.abs_norm()? < b.abs_norm()?);
        a = b;
        b = if r.is_zero() { r } else { canonical_associate(&r)?.rep };
    }
    Ok(canonical_associate(&a)?.rep)
}

pub fn gcd_i64(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub const MAX_FACTOR_NORM: u64 = 1_000_000_000_000;

/// Canonical factorization: factor |N(x)| over Z by trial division, lift
/// each rational prime through [`classify_prime`], and divide out.
pub fn factor(x: &QuadInt) -> Result<Factorization> {
    if x.is_zero() {
        return Err(Error::domain("zero has no factorization"));
    }
    if x.ring == RingId::Rational {
        return factor_rational(x);
    }
    let n = x.abs_norm()?;
    if n > MAX_FACTOR_NORM {
        return Err(Error::resource(format!("|N(x)| = {n} exceeds {MAX_FACTOR_NORM}")));
    }
    let mut factors: Vec<(QuadInt, u32)> = Vec::new();
    let mut rem = *x;
    for p in trial_factor_primes(n) {
        let class = classify_prime(x.ring, p)?;
        for prime in class.canonical_primes()? {
            let mut e = 0u32;
            while let Some(q) = rem.div_exact(&prime)? {
                rem = q;
                e += 1;
            }
            if e > 0 {
                factors.push((prime, e));
            }
        }
    }
    if rem.abs_norm()? != 1 {
        return Err(Error::internal(format!("non-unit remainder {rem:?} factoring {x:?}")));
    }
    factors.sort_by_key(|(p, _)| (p.abs_norm().unwrap(), p.b, p.a));
    let f = Factorization { unit: rem, factors };
    debug_assert_eq!(f.product()?, *x);
    Ok(f)
}

fn factor_rational(x: &QuadInt) -> Result<Factorization> {
    let n = x.a.unsigned_abs();
    if n > MAX_FACTOR_NORM {
        return Err(Error::resource(format!("|x| = {n} exceeds {MAX_FACTOR_NORM}")));
    }
    let unit = QuadInt::raw(x.ring, if x.a < 0 { -1 } else { 1 }, 0);
    let factors = trial_factor(n)
        .into_iter()
        .map(|(p, e)| (QuadInt::raw(x.ring, p as i64, 0), e))
        .collect();
    Ok(Factorization { unit, factors })
}

/// Distinct rational primes dividing n, ascending.
fn trial_factor_primes(n: u64) -> Vec<i64> {
    trial_factor(n).into_iter().map(|(p, _)| p as i64).collect()
}

pub fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while (*n).is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut d = 5u64;
    while d * d <= n {
        push(d, &mut n);
        push(d + 2, &mut n);
        d += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// True iff no canonical prime divides x to the k-th power. Units are
/// k-free; zero is rejected (call sites exclude 0 from every V).
pub fn is_k_free(x: &QuadInt, k: u32) -> Result<bool> {
    if k < 2 {
        return Err(Error::domain("k-freeness needs k ≥ 2"));
    }
    Ok(factor(x)?.factors.iter().all(|&(_, e)| e < k))
}
