//! Finite windows of the point sets V: visible points, B-free lattice
//! sets, k-free lattice points and k-free quadratic integers.
//!
//! Sieving marks the excluded sublattices in a bitmap over the box, so the
//! output is exact and deterministic. The box may be partitioned into
//! slabs along the first axis and sieved on several threads; membership is
//! decided pointwise, so the result is identical for every partition.

use std::fmt;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lattice::{ModulusLattice, Point};
use crate::ring::{
    self, gcd_i64, make_ring, split_kind, trial_factor, QuadInt, RingId, SplitKind,
};

/// Hard cap on how many lattice points a window may contain.
pub const MAX_BOX_POINTS: u64 = 100_000_000;

/// The window [−R, R]^d, integer points inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxWindow {
    #[serde(rename = "d")]
    pub dim: u8,
    pub half_width: i64,
}

impl BoxWindow {
    pub fn new(dim: u8, half_width: i64) -> Result<BoxWindow> {
        let w = BoxWindow { dim, half_width };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::invalid("box dimension must be 1, 2 or 3"));
        }
        if self.half_width < 1 {
            return Err(Error::invalid("box half-width must be ≥ 1"));
        }
        let side = 2 * self.half_width as u64 + 1;
        let mut total: u64 = 1;
        for _ in 0..self.dim {
            total = total
                .checked_mul(side)
                .ok_or_else(|| Error::resource("box larger than the point cap"))?;
            if total > MAX_BOX_POINTS {
                return Err(Error::resource(format!(
                    "box has more than {MAX_BOX_POINTS} points"
                )));
            }
        }
        Ok(())
    }

    pub fn side(&self) -> i64 {
        2 * self.half_width + 1
    }

    pub fn point_count(&self) -> u64 {
        (self.side() as u64).pow(self.dim as u32)
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim && p.coords().iter().all(|c| c.abs() <= self.half_width)
    }

    fn rank(&self, p: &Point) -> usize {
        let side = self.side();
        let mut rank: i64 = 0;
        for i in 0..self.dim as usize {
            rank = rank * side + (p.get(i) + self.half_width);
        }
        rank as usize
    }

    fn point_by_rank(&self, mut rank: usize) -> Point {
        let side = self.side() as usize;
        let mut coords = [0i64; crate::lattice::MAX_DIM];
        for i in (0..self.dim as usize).rev() {
            coords[i] = (rank % side) as i64 - self.half_width;
            rank /= side;
        }
        Point::new(&coords[..self.dim as usize]).unwrap()
    }
}

/// Which point set to construct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VSpec {
    /// Lattice points with coprime coordinates.
    Visible { d: u8 },
    /// Z^d minus all p^k·Z^d; the B-free special case B = {p^k}.
    KfreeLattice { d: u8, k: u32 },
    /// Z^d minus the dilations b·Z^d for b in an explicit primitive list.
    BfreeLattice { d: u8, moduli: Vec<i64> },
    /// k-free elements of a quadratic ring on the basis {1, ω}.
    KfreeRing { ring: RingId, k: u32 },
}

impl VSpec {
    pub fn dim(&self) -> u8 {
        match self {
            VSpec::Visible { d } | VSpec::KfreeLattice { d, .. } | VSpec::BfreeLattice { d, .. } => *d,
            VSpec::KfreeRing { .. } => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            VSpec::Visible { d } => {
                if !(1..=3).contains(d) {
                    return Err(Error::invalid("visible: dimension must be 1, 2 or 3"));
                }
            }
            VSpec::KfreeLattice { d, k } => {
                if !(1..=3).contains(d) {
                    return Err(Error::invalid("kfree: dimension must be 1, 2 or 3"));
                }
                if *k < 2 {
                    return Err(Error::invalid("kfree: k must be ≥ 2"));
                }
            }
            VSpec::BfreeLattice { d, moduli } => {
                if !(1..=3).contains(d) {
                    return Err(Error::invalid("bfree: dimension must be 1, 2 or 3"));
                }
                if moduli.is_empty() {
                    return Err(Error::invalid("bfree: modulus list is empty"));
                }
                for &b in moduli {
                    if b < 2 {
                        return Err(Error::invalid("bfree: moduli must be ≥ 2"));
                    }
                }
                for (i, &bi) in moduli.iter().enumerate() {
                    for (j, &bj) in moduli.iter().enumerate() {
                        if i != j && bj % bi == 0 {
                            return Err(Error::invalid(format!(
                                "bfree: list not primitive ({bi} divides {bj})"
                            )));
                        }
                    }
                }
            }
            VSpec::KfreeRing { ring, k } => {
                if *ring == RingId::Rational {
                    return Err(Error::invalid(
                        "kfree_ring: use kfree_lattice d=1 for rational integers",
                    ));
                }
                if *k < 2 {
                    return Err(Error::invalid("kfree_ring: k must be ≥ 2"));
                }
            }
        }
        Ok(())
    }

    /// Pairwise-coprimality of the modulus family (the summability half of
    /// the Erdős condition holds for every family we can represent).
    pub fn is_erdos(&self) -> bool {
        match self {
            VSpec::Visible { d } => *d >= 2,
            VSpec::KfreeLattice { d, k } => (*d as u32) * k >= 2,
            VSpec::BfreeLattice { moduli, .. } => {
                moduli.iter().enumerate().all(|(i, &bi)| {
                    moduli[i + 1..].iter().all(|&bj| gcd_i64(bi, bj) == 1)
                })
            }
            VSpec::KfreeRing { .. } => true,
        }
    }
}

impl fmt::Display for VSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VSpec::Visible { d } => write!(f, "visible({d})"),
            VSpec::KfreeLattice { d, k } => write!(f, "kfree({d},{k})"),
            VSpec::BfreeLattice { d, moduli } => {
                let list: Vec<String> = moduli.iter().map(|b| b.to_string()).collect();
                write!(f, "bfree({d};{})", list.join(","))
            }
            VSpec::KfreeRing { ring, k } => write!(f, "kfree({ring},{k})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    fn zeros(len: usize) -> BitVec {
        BitVec { words: vec![0; len.div_ceil(64)], len }
    }

    #[inline]
    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn count_ones(&self) -> u64 {
        let mut total: u64 = self.words.iter().map(|w| w.count_ones() as u64).sum();
        // mask out bits beyond len
        let tail = self.len % 64;
        if tail != 0 {
            let last = *self.words.last().unwrap();
            total -= (last >> tail).count_ones() as u64;
        }
        total
    }

    /// Appends another bit vector (bit-level concatenation).
    fn append(&mut self, other: &BitVec) {
        let shift = self.len % 64;
        if shift == 0 {
            self.words.extend_from_slice(&other.words);
        } else {
            for &w in &other.words {
                let last = self.words.len() - 1;
                self.words[last] |= w << shift;
                self.words.push(w >> (64 - shift));
            }
        }
        self.len += other.len;
        self.words.truncate(self.len.div_ceil(64));
    }
}

/// Exact membership bitmap of a sieved window. Bits mark *excluded*
/// points.
#[derive(Clone, Debug)]
pub struct SieveGrid {
    pub spec: VSpec,
    pub window: BoxWindow,
    struck: BitVec,
}

impl SieveGrid {
    /// Membership of a point; `None` when it lies outside the window.
    pub fn contains(&self, p: &Point) -> Option<bool> {
        if !self.window.contains(p) {
            return None;
        }
        Some(!self.struck.get(self.window.rank(p)))
    }

    pub fn member_count(&self) -> u64 {
        self.window.point_count() - self.struck.count_ones()
    }
}

enum Strike {
    Scalar(i64),
    Lattice(ModulusLattice),
}

/// The sublattices that must be removed from the box for a spec. Only
/// moduli that can strike a nonzero box point are generated; the origin is
/// struck unconditionally.
fn build_strikes(spec: &VSpec, window: &BoxWindow) -> Result<Vec<Strike>> {
    let r = window.half_width;
    Ok(match spec {
        VSpec::Visible { .. } => primes_up_to(r as u64)
            .into_iter()
            .map(|p| Strike::Scalar(p as i64))
            .collect(),
        VSpec::KfreeLattice { k, .. } => {
            let mut out = Vec::new();
            for p in primes_up_to(r as u64) {
                if let Some(pk) = p.checked_pow(*k) {
                    if pk <= r as u64 {
                        out.push(Strike::Scalar(pk as i64));
                    }
                }
            }
            out
        }
        VSpec::BfreeLattice { moduli, .. } => moduli
            .iter()
            .filter(|&&b| b <= 2 * r + 1)
            .map(|&b| Strike::Scalar(b))
            .collect(),
        VSpec::KfreeRing { ring, k } => ring_prime_power_lattices(*ring, *k, r)?
            .into_iter()
            .map(Strike::Lattice)
            .collect(),
    })
}

/// All lattices (π^k) over canonical primes with |N(π)|^k ≤ an upper bound
/// for max|N| over the box; larger primes cannot divide any box point to
/// the k-th power.
fn ring_prime_power_lattices(ring: RingId, k: u32, r: i64) -> Result<Vec<ModulusLattice>> {
    let norm_bound = norm_bound_over_box(ring, r);
    let mut out = Vec::new();
    for prime in canonical_primes_with_norm_up_to(ring, nth_root_floor(norm_bound, k))? {
        out.push(ModulusLattice::ideal(&prime, k)?);
    }
    Ok(out)
}

/// (1 + |q| + |r|)·R² ≥ max |N| over [−R,R]².
pub(crate) fn norm_bound_over_box(ring: RingId, r: i64) -> u64 {
    let (p, q, s) = make_ring(ring).norm_coeffs;
    (p.unsigned_abs() + q.unsigned_abs() + s.unsigned_abs()) * (r as u64) * (r as u64)
}

fn nth_root_floor(n: u64, k: u32) -> u64 {
    let mut lo = 0u64;
    let mut hi = n + 1;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        let mut pow = 1u128;
        let mut ok = true;
        for _ in 0..k {
            pow *= mid as u128;
            if pow > n as u128 {
                ok = false;
                break;
            }
        }
        if ok {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Canonical primes of the ring with |N(π)| ≤ limit, split pairs as two
/// separate entries, ordered by (|N|, b, a).
pub fn canonical_primes_with_norm_up_to(ring: RingId, limit: u64) -> Result<Vec<QuadInt>> {
    let mut out = Vec::new();
    for p in primes_up_to(limit) {
        let kind = split_kind(ring, p as i64)?;
        let include = match kind {
            SplitKind::Ramified | SplitKind::Split => p <= limit,
            SplitKind::Inert => p.checked_mul(p).is_some_and(|pp| pp <= limit),
        };
        if !include {
            continue;
        }
        out.extend(ring::classify_prime(ring, p as i64)?.canonical_primes()?);
    }
    out.sort_by_key(|pi| (pi.abs_norm().unwrap(), pi.b, pi.a));
    Ok(out)
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    primes
}

/// Sieve one slab x₁ ∈ [x_lo, x_hi] of the window.
fn sieve_slab(
    strikes: &[Strike],
    window: &BoxWindow,
    x_lo: i64,
    x_hi: i64,
) -> BitVec {
    let r = window.half_width;
    let side = window.side();
    let d = window.dim as usize;
    let inner: usize = (side as usize).pow(d as u32 - 1);
    let len = (x_hi - x_lo + 1) as usize * inner;
    let mut bits = BitVec::zeros(len);

    let local_rank = |p: &Point| -> usize {
        let mut rank = (p.get(0) - x_lo) as usize;
        for i in 1..d {
            rank = rank * side as usize + (p.get(i) + r) as usize;
        }
        rank
    };

    // the origin lies in every b·Z^d and every ideal, and is excluded from
    // every V by convention
    if x_lo <= 0 && 0 <= x_hi {
        bits.set(local_rank(&Point::zero(window.dim)));
    }

    let mut ranges = [(-r, r); crate::lattice::MAX_DIM];
    ranges[0] = (x_lo, x_hi);

    for strike in strikes {
        match strike {
            Strike::Scalar(b) => {
                let lat = ModulusLattice::scalar(*b, window.dim).unwrap();
                lat.for_each_in_ranges(&Point::zero(window.dim), &ranges[..d], |p| {
                    bits.set(local_rank(&p));
                });
            }
            Strike::Lattice(lat) => {
                lat.for_each_in_ranges(&Point::zero(window.dim), &ranges[..d], |p| {
                    bits.set(local_rank(&p));
                });
            }
        }
    }
    bits
}

/// Sieves the window into a membership bitmap. `threads` ≥ 2 partitions
/// the box into slabs along the first axis; the output is identical for
/// every thread count.
pub fn sieve_grid(spec: &VSpec, window: &BoxWindow, threads: usize) -> Result<SieveGrid> {
    spec.validate()?;
    window.validate()?;
    if spec.dim() != window.dim {
        return Err(Error::invalid(format!(
            "spec dimension {} does not match box dimension {}",
            spec.dim(),
            window.dim
        )));
    }
    let strikes = build_strikes(spec, window)?;
    let r = window.half_width;
    let threads = threads.clamp(1, window.side() as usize);
    let struck = if threads == 1 {
        sieve_slab(&strikes, window, -r, r)
    } else {
        let side = window.side();
        let chunk = (side + threads as i64 - 1) / threads as i64;
        let slabs: Vec<(i64, i64)> = (0..threads as i64)
            .map(|t| (-r + t * chunk, (-r + (t + 1) * chunk - 1).min(r)))
            .filter(|(lo, hi)| lo <= hi)
            .collect();
        let parts: Vec<BitVec> = std::thread::scope(|scope| {
            let handles: Vec<_> = slabs
                .iter()
                .map(|&(lo, hi)| {
                    let strikes = &strikes;
                    scope.spawn(move || sieve_slab(strikes, window, lo, hi))
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        let mut all = BitVec::zeros(0);
        for part in &parts {
            all.append(part);
        }
        all
    };
    Ok(SieveGrid { spec: spec.clone(), window: *window, struck })
}

/// Full sieve, single-threaded.
pub fn sieve(spec: &VSpec, window: &BoxWindow) -> Result<PointSet> {
    Ok(PointSet::from_grid(&sieve_grid(spec, window, 1)?))
}

pub fn sieve_with_threads(spec: &VSpec, window: &BoxWindow, threads: usize) -> Result<PointSet> {
    Ok(PointSet::from_grid(&sieve_grid(spec, window, threads)?))
}

/// Direct membership test of one point, by coordinate gcd or by
/// factorization; independent of any sieved grid.
pub fn point_in_v(spec: &VSpec, p: &Point) -> Result<bool> {
    if p.dim() != spec.dim() {
        return Err(Error::invalid("point dimension does not match spec"));
    }
    Ok(match spec {
        VSpec::Visible { .. } => {
            let g = p.coords().iter().fold(0i64, |acc, &c| gcd_i64(acc, c));
            g == 1
        }
        VSpec::KfreeLattice { k, .. } => {
            let g = p.coords().iter().fold(0i64, |acc, &c| gcd_i64(acc, c));
            if g == 0 {
                false
            } else {
                trial_factor(g as u64).into_iter().all(|(_, e)| e < *k)
            }
        }
        VSpec::BfreeLattice { moduli, .. } => {
            let g = p.coords().iter().fold(0i64, |acc, &c| gcd_i64(acc, c));
            moduli.iter().all(|&b| g % b != 0)
        }
        VSpec::KfreeRing { ring, k } => {
            let x = p.as_quadint(*ring)?;
            if x.is_zero() {
                false
            } else {
                ring::is_k_free(&x, *k)?
            }
        }
    })
}

/// Exact density of members in the window, as a reduced fraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Density {
    pub numerator: u64,
    pub denominator: u64,
    pub value: f64,
}

impl Density {
    pub fn new(numerator: u64, denominator: u64) -> Density {
        let g = {
            let mut a = numerator.max(1);
            let mut b = denominator;
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a
        };
        let g = if numerator == 0 { denominator } else { g };
        Density {
            numerator: numerator / g,
            denominator: denominator / g,
            value: numerator as f64 / denominator as f64,
        }
    }
}

/// Density of a spec over a window without materialising the points.
pub fn density_of(spec: &VSpec, window: &BoxWindow, threads: usize) -> Result<Density> {
    let grid = sieve_grid(spec, window, threads)?;
    Ok(Density::new(grid.member_count(), window.point_count()))
}

/// The sieved portion of a V inside a box: sorted, duplicate-free, origin
/// excluded.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    pub spec: VSpec,
    pub window: BoxWindow,
    coords: Vec<i64>,
}

impl PointSet {
    pub fn from_grid(grid: &SieveGrid) -> PointSet {
        let d = grid.window.dim as usize;
        let total = grid.window.point_count() as usize;
        let mut coords = Vec::with_capacity((total - grid.struck.count_ones() as usize) * d);
        for rank in 0..total {
            if !grid.struck.get(rank) {
                coords.extend_from_slice(grid.window.point_by_rank(rank).coords());
            }
        }
        PointSet { spec: grid.spec.clone(), window: grid.window, coords }
    }

    pub fn len(&self) -> usize {
        if self.coords.is_empty() {
            0
        } else {
            self.coords.len() / self.window.dim as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Point> + '_ {
        self.coords
            .chunks_exact(self.window.dim as usize)
            .map(|c| Point::new(c).unwrap())
    }

    pub fn contains(&self, p: &Point) -> bool {
        let d = self.window.dim as usize;
        if p.dim() as usize != d {
            return false;
        }
        let mut lo = 0usize;
        let mut hi = self.len();
        while lo < hi {
            let mid = (lo + hi) / 2;
            let cand = &self.coords[mid * d..(mid + 1) * d];
            match cand.cmp(p.coords()) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    /// The subset inside a smaller box, as its own point set.
    pub fn restrict(&self, half_width: i64) -> Result<PointSet> {
        let window = BoxWindow::new(self.window.dim, half_width)?;
        let points: Vec<Point> = self.iter().filter(|p| window.contains(p)).collect();
        let mut coords = Vec::with_capacity(points.len() * window.dim as usize);
        for p in &points {
            coords.extend_from_slice(p.coords());
        }
        Ok(PointSet { spec: self.spec.clone(), window, coords })
    }

    pub fn density(&self) -> Density {
        Density::new(self.len() as u64, self.window.point_count())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pointset serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<PointSet> {
        let raw: PointSetRaw = serde_json::from_str(text)?;
        raw.into_pointset()
    }

    /// Compact binary encoding; see the format notes on [`BIN_MAGIC`].
    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(BIN_MAGIC);
        out.push(1u8); // version
        match &self.spec {
            VSpec::Visible { d } => {
                out.push(0);
                out.push(*d);
            }
            VSpec::KfreeLattice { d, k } => {
                out.push(1);
                out.push(*d);
                out.push(*k as u8);
            }
            VSpec::BfreeLattice { d, moduli } => {
                out.push(2);
                out.push(*d);
                out.extend_from_slice(&(moduli.len() as u32).to_le_bytes());
                for b in moduli {
                    out.extend_from_slice(&b.to_le_bytes());
                }
            }
            VSpec::KfreeRing { ring, k } => {
                out.push(3);
                out.push(ring_tag(*ring));
                out.push(*k as u8);
            }
        }
        out.push(self.window.dim);
        out.extend_from_slice(&self.window.half_width.to_le_bytes());
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        for c in &self.coords {
            out.extend_from_slice(&(*c as i32).to_le_bytes());
        }
        out
    }

    pub fn from_binary(data: &[u8]) -> Result<PointSet> {
        let mut cur = Cursor { data, at: 0 };
        if cur.take(4)? != BIN_MAGIC {
            return Err(Error::invalid("bad pointset magic"));
        }
        if cur.u8()? != 1 {
            return Err(Error::invalid("unsupported pointset version"));
        }
        let spec = match cur.u8()? {
            0 => VSpec::Visible { d: cur.u8()? },
            1 => VSpec::KfreeLattice { d: cur.u8()?, k: cur.u8()? as u32 },
            2 => {
                let d = cur.u8()?;
                let n = cur.u32()? as usize;
                let mut moduli = Vec::with_capacity(n);
                for _ in 0..n {
                    moduli.push(cur.i64()?);
                }
                VSpec::BfreeLattice { d, moduli }
            }
            3 => VSpec::KfreeRing { ring: ring_from_tag(cur.u8()?)?, k: cur.u8()? as u32 },
            t => return Err(Error::invalid(format!("unknown spec tag {t}"))),
        };
        let window = BoxWindow::new(cur.u8()?, cur.i64()?)?;
        let n = cur.u64()? as usize;
        let d = window.dim as usize;
        let mut coords = Vec::with_capacity(n * d);
        for _ in 0..n * d {
            coords.push(cur.i32()? as i64);
        }
        spec.validate()?;
        let ps = PointSet { spec, window, coords };
        ps.check_sorted()?;
        Ok(ps)
    }

    fn check_sorted(&self) -> Result<()> {
        let d = self.window.dim as usize;
        let mut prev: Option<&[i64]> = None;
        for chunk in self.coords.chunks_exact(d) {
            if chunk.iter().any(|c| c.abs() > self.window.half_width) {
                return Err(Error::invalid("point outside the declared window"));
            }
            if let Some(p) = prev {
                if p >= chunk {
                    return Err(Error::invalid("points not sorted or not unique"));
                }
            }
            prev = Some(chunk);
        }
        Ok(())
    }
}

pub const BIN_MAGIC: &[u8; 4] = b"KPTS";

fn ring_tag(r: RingId) -> u8 {
    match r {
        RingId::Gauss => 0,
        RingId::Eisenstein => 1,
        RingId::Sqrt2 => 2,
        RingId::Golden => 3,
        RingId::Sqrt3 => 4,
        RingId::Rational => 5,
    }
}

fn ring_from_tag(t: u8) -> Result<RingId> {
    Ok(match t {
        0 => RingId::Gauss,
        1 => RingId::Eisenstein,
        2 => RingId::Sqrt2,
        3 => RingId::Golden,
        4 => RingId::Sqrt3,
        5 => RingId::Rational,
        other => return Err(Error::invalid(format!("unknown ring tag {other}"))),
    })
}

struct Cursor<'a> {
    data: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.at + n > self.data.len() {
            return Err(Error::invalid("truncated pointset data"));
        }
        let s = &self.data[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Points<'a>(&'a PointSet);
        impl Serialize for Points<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let d = self.0.window.dim as usize;
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for chunk in self.0.coords.chunks_exact(d) {
                    seq.serialize_element(chunk)?;
                }
                seq.end()
            }
        }
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("schema", "pointset/1")?;
        map.serialize_entry("spec", &self.spec)?;
        map.serialize_entry("box", &self.window)?;
        map.serialize_entry("points", &Points(self))?;
        map.end()
    }
}

#[derive(Deserialize)]
struct PointSetRaw {
    schema: String,
    spec: VSpec,
    #[serde(rename = "box")]
    window: BoxWindow,
    points: Vec<Vec<i64>>,
}

impl PointSetRaw {
    fn into_pointset(self) -> Result<PointSet> {
        if self.schema != "pointset/1" {
            return Err(Error::invalid(format!("unknown schema `{}`", self.schema)));
        }
        self.spec.validate()?;
        self.window.validate()?;
        let d = self.window.dim as usize;
        let mut coords = Vec::with_capacity(self.points.len() * d);
        for p in &self.points {
            if p.len() != d {
                return Err(Error::invalid("point dimension mismatch"));
            }
            coords.extend_from_slice(p);
        }
        let ps = PointSet { spec: self.spec, window: self.window, coords };
        ps.check_sorted()?;
        Ok(ps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn visible2() -> VSpec {
        VSpec::Visible { d: 2 }
    }

    #[test]
    fn visible_small_window() {
        let ps = sieve(&visible2(), &BoxWindow::new(2, 2).unwrap()).unwrap();
        for inc in [(1, 0), (2, 1), (1, 2)] {
            assert!(ps.contains(&Point::xy(inc.0, inc.1)), "{inc:?} should be visible");
        }
        for exc in [(0, 0), (2, 2), (2, 0)] {
            assert!(!ps.contains(&Point::xy(exc.0, exc.1)), "{exc:?} should be excluded");
        }
    }

    #[test]
    fn visible_r1_density() {
        // only the origin fails in [−1,1]²
        let d = density_of(&visible2(), &BoxWindow::new(2, 1).unwrap(), 1).unwrap();
        assert_eq!((d.numerator, d.denominator), (8, 9));
    }

    #[test]
    fn gauss_squarefree_window() {
        let spec = VSpec::KfreeRing { ring: RingId::Gauss, k: 2 };
        let ps = sieve(&spec, &BoxWindow::new(2, 3).unwrap()).unwrap();
        // 2+2i = −i(1+i)³ is divisible by (1+i)²
        assert!(!ps.contains(&Point::xy(2, 2)));
        assert!(ps.contains(&Point::xy(1, 1)));
        assert!(!ps.contains(&Point::xy(0, 0)));
    }

    #[test]
    fn sieve_matches_pointwise_membership() {
        let spec = VSpec::KfreeRing { ring: RingId::Sqrt2, k: 2 };
        let ps = sieve(&spec, &BoxWindow::new(2, 10).unwrap()).unwrap();
        for x in -10..=10 {
            for y in -10..=10 {
                let p = Point::xy(x, y);
                assert_eq!(
                    ps.contains(&p),
                    point_in_v(&spec, &p).unwrap(),
                    "disagreement at {p}"
                );
            }
        }
    }

    #[test]
    fn monotone_windows() {
        let spec = VSpec::KfreeLattice { d: 2, k: 2 };
        let big = sieve(&spec, &BoxWindow::new(2, 30).unwrap()).unwrap();
        let small = sieve(&spec, &BoxWindow::new(2, 11).unwrap()).unwrap();
        assert_eq!(big.restrict(11).unwrap().iter().collect::<Vec<_>>(),
                   small.iter().collect::<Vec<_>>());
    }

    #[test]
    fn bfree_prime_squares_is_squarefree_lattice() {
        let squares: Vec<i64> = primes_up_to(40).into_iter().map(|p| (p * p) as i64).collect();
        let bspec = VSpec::BfreeLattice { d: 2, moduli: squares };
        let kspec = VSpec::KfreeLattice { d: 2, k: 2 };
        let w = BoxWindow::new(2, 35).unwrap();
        let b = sieve(&bspec, &w).unwrap();
        let k = sieve(&kspec, &w).unwrap();
        assert_eq!(b.iter().collect::<Vec<_>>(), k.iter().collect::<Vec<_>>());
    }

    #[test]
    fn thread_partitioning_is_invisible() {
        for spec in [
            visible2(),
            VSpec::KfreeRing { ring: RingId::Eisenstein, k: 2 },
        ] {
            let w = BoxWindow::new(2, 23).unwrap();
            let a = sieve_with_threads(&spec, &w, 1).unwrap();
            let b = sieve_with_threads(&spec, &w, 3).unwrap();
            let c = sieve_with_threads(&spec, &w, 7).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(VSpec::BfreeLattice { d: 2, moduli: vec![2, 4] }.validate().is_err());
        assert!(VSpec::BfreeLattice { d: 2, moduli: vec![6, 10, 15] }.validate().is_ok());
        assert!(!VSpec::BfreeLattice { d: 2, moduli: vec![6, 10, 15] }.is_erdos());
        assert!(VSpec::BfreeLattice { d: 1, moduli: vec![4, 9, 25] }.is_erdos());
        assert!(VSpec::KfreeLattice { d: 2, k: 1 }.validate().is_err());
        assert!(VSpec::KfreeRing { ring: RingId::Rational, k: 2 }.validate().is_err());
        assert!(!VSpec::Visible { d: 1 }.is_erdos());
        assert!(BoxWindow::new(2, 0).is_err());
        assert!(BoxWindow::new(2, 6000).is_err());
        assert!(BoxWindow::new(1, 6000).is_ok());
    }

    #[test]
    fn serialization_roundtrips() {
        let spec = VSpec::KfreeRing { ring: RingId::Golden, k: 3 };
        let ps = sieve(&spec, &BoxWindow::new(2, 7).unwrap()).unwrap();
        let json = ps.to_json();
        assert!(json.starts_with("{\"schema\":\"pointset/1\""));
        let back = PointSet::from_json(&json).unwrap();
        assert_eq!(ps, back);
        let bin = ps.to_binary();
        let back2 = PointSet::from_binary(&bin).unwrap();
        assert_eq!(ps, back2);
        // byte-determinism
        assert_eq!(json, back.to_json());
        assert_eq!(bin, back2.to_binary());
    }

    #[test]
    fn bitvec_append_shifts() {
        let mut a = BitVec::zeros(3);
        a.set(1);
        let mut b = BitVec::zeros(130);
        b.set(0);
        b.set(64);
        b.set(129);
        a.append(&b);
        assert_eq!(a.len, 133);
        let expected: Vec<usize> = vec![1, 3, 67, 132];
        for i in 0..133 {
            assert_eq!(a.get(i), expected.contains(&i), "bit {i}");
        }
        assert_eq!(a.count_ones(), 4);
    }
}
