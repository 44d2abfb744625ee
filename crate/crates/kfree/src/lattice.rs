//! Finite-index sublattices of Z^d (d ≤ 3) and the lattice CRT.
//!
//! A modulus is either a scalar dilation b·Z^d or an ideal power (π^k) of a
//! quadratic ring viewed as a rank-2 sublattice of Z² in the basis {1, ω}.
//! Both are kept in Hermite normal form, which makes coset reduction, coset
//! ranking and box enumeration exact and cheap.

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;

use crate::error::{Error, Result};
use crate::ring::QuadInt;

pub const MAX_DIM: usize = 3;

/// A point of Z^d, d ≤ 3. Unused coordinates stay zero, so the derived
/// ordering is lexicographic on the active coordinates.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    coords: [i64; MAX_DIM],
    dim: u8,
}

impl Point {
    pub fn new(coords: &[i64]) -> Result<Point> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::invalid(format!("dimension {} not in 1..=3", coords.len())));
        }
        let mut c = [0i64; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Point { coords: c, dim: coords.len() as u8 })
    }

    pub fn xy(x: i64, y: i64) -> Point {
        Point { coords: [x, y, 0], dim: 2 }
    }

    pub fn zero(dim: u8) -> Point {
        Point { coords: [0; MAX_DIM], dim }
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords[..self.dim as usize]
    }

    pub fn get(&self, i: usize) -> i64 {
        self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords().iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim, other.dim);
        let mut c = self.coords;
        for i in 0..self.dim as usize {
            c[i] += other.coords[i];
        }
        Point { coords: c, dim: self.dim }
    }

    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim, other.dim);
        let mut c = self.coords;
        for i in 0..self.dim as usize {
            c[i] -= other.coords[i];
        }
        Point { coords: c, dim: self.dim }
    }

    pub fn norm_inf(&self) -> i64 {
        self.coords().iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// View a 2-point as the ring element x + y·ω.
    pub fn as_quadint(&self, ring: crate::ring::RingId) -> Result<QuadInt> {
        if self.dim != 2 {
            return Err(Error::invalid("ring elements need dimension 2"));
        }
        QuadInt::new(ring, self.coords[0], self.coords[1])
    }

    pub fn from_quadint(x: &QuadInt) -> Point {
        Point::xy(x.a, x.b)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Point, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        Point::new(&v).map_err(serde::de::Error::custom)
    }
}

/// What a modulus lattice came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModulusSource {
    Scalar { b: i64 },
    Ideal { prime: QuadInt, k: u32 },
    Composite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Basis {
    /// b_i·e_i per axis.
    Diagonal([i64; MAX_DIM]),
    /// Columns (a, b) and (0, c) with a, c > 0 and 0 ≤ b < c.
    Hnf2 { a: i64, b: i64, c: i64 },
}

/// A finite-index sublattice of Z^d in Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulusLattice {
    pub source: ModulusSource,
    dim: u8,
    basis: Basis,
    pub index: u64,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

fn mod_inv(a: i128, m: i128) -> Result<i128> {
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    if g != 1 {
        return Err(Error::internal(format!("no inverse of {a} mod {m}")));
    }
    Ok(x.rem_euclid(m))
}

/// Hermite normal form of the rank-2 lattice spanned by two integer columns.
fn hnf2(c1: (i64, i64), c2: (i64, i64)) -> Result<(i64, i64, i64)> {
    let det = c1.0 as i128 * c2.1 as i128 - c1.1 as i128 * c2.0 as i128;
    if det == 0 {
        return Err(Error::internal("rank-deficient lattice basis"));
    }
    let (g, p, q) = ext_gcd(c1.0 as i128, c2.0 as i128);
    let y1 = p * c1.1 as i128 + q * c2.1 as i128;
    let y2 = (c2.0 as i128 / g) * c1.1 as i128 - (c1.0 as i128 / g) * c2.1 as i128;
    let c = y2.abs();
    let a = g;
    let b = y1.rem_euclid(c);
    if a * c != det.abs() {
        return Err(Error::internal("HNF index mismatch"));
    }
    let fits = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("HNF entry"));
    Ok((fits(a)?, fits(b)?, fits(c)?))
}

impl ModulusLattice {
    /// The scalar lattice b·Z^d.
    pub fn scalar(b: i64, dim: u8) -> Result<ModulusLattice> {
        if !(1..=MAX_DIM as u8).contains(&dim) {
            return Err(Error::invalid("dimension must be 1, 2 or 3"));
        }
        if b < 1 {
            return Err(Error::invalid("scalar modulus must be ≥ 1"));
        }
        let mut index: u64 = 1;
        for _ in 0..dim {
            index = index
                .checked_mul(b as u64)
                .ok_or(Error::Overflow("lattice index"))?;
        }
        let mut diag = [1i64; MAX_DIM];
        for d in diag.iter_mut().take(dim as usize) {
            *d = b;
        }
        Ok(ModulusLattice {
            source: ModulusSource::Scalar { b },
            dim,
            basis: Basis::Diagonal(diag),
            index,
        })
    }

    /// The ideal power (π^k) as a sublattice of Z², columns π^k·1 and π^k·ω.
    pub fn ideal(prime: &QuadInt, k: u32) -> Result<ModulusLattice> {
        if k == 0 {
            return Err(Error::invalid("ideal exponent must be ≥ 1"));
        }
        let mut lat = ModulusLattice::principal(&prime.pow(k)?)?;
        lat.source = ModulusSource::Ideal { prime: *prime, k };
        Ok(lat)
    }

    /// The principal ideal (x) of a quadratic ring as a sublattice of Z²,
    /// columns x·1 and x·ω.
    pub fn principal(x: &QuadInt) -> Result<ModulusLattice> {
        if x.ring == crate::ring::RingId::Rational {
            return Err(Error::invalid("ideal moduli need a quadratic ring"));
        }
        if x.is_zero() {
            return Err(Error::invalid("the zero ideal is not a finite-index lattice"));
        }
        let omega = QuadInt::raw(x.ring, 0, 1);
        let col2 = x.mul(&omega)?;
        let (a, b, c) = hnf2((x.a, x.b), (col2.a, col2.b))?;
        let index = (a as u64)
            .checked_mul(c as u64)
            .ok_or(Error::Overflow("lattice index"))?;
        let expected = x.abs_norm()?;
        if index != expected {
            return Err(Error::internal(format!("ideal index {index} ≠ |N| {expected}")));
        }
        Ok(ModulusLattice {
            source: ModulusSource::Ideal { prime: *x, k: 1 },
            dim: 2,
            basis: Basis::Hnf2 { a, b, c },
            index,
        })
    }

    /// A rank-2 sublattice from two explicit integer columns.
    pub fn from_columns(c1: Point, c2: Point) -> Result<ModulusLattice> {
        let (a, b, c) = hnf2((c1.get(0), c1.get(1)), (c2.get(0), c2.get(1)))?;
        let index = (a as u64)
            .checked_mul(c as u64)
            .ok_or(Error::Overflow("lattice index"))?;
        Ok(ModulusLattice::composite2(a, b, c, index))
    }

    fn composite2(a: i64, b: i64, c: i64, index: u64) -> ModulusLattice {
        ModulusLattice {
            source: ModulusSource::Composite,
            dim: 2,
            basis: Basis::Hnf2 { a, b, c },
            index,
        }
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    /// The HNF basis as a d×d row-major matrix (columns are the basis
    /// vectors).
    pub fn basis_matrix(&self) -> Vec<Vec<i64>> {
        let d = self.dim as usize;
        match self.basis {
            Basis::Diagonal(diag) => (0..d)
                .map(|i| (0..d).map(|j| if i == j { diag[i] } else { 0 }).collect())
                .collect(),
            Basis::Hnf2 { a, b, c } => vec![vec![a, 0], vec![b, c]],
        }
    }

    pub fn basis_vectors(&self) -> Vec<Point> {
        let d = self.dim as usize;
        match self.basis {
            Basis::Diagonal(diag) => (0..d)
                .map(|i| {
                    let mut c = [0i64; MAX_DIM];
                    c[i] = diag[i];
                    Point { coords: c, dim: self.dim }
                })
                .collect(),
            Basis::Hnf2 { a, b, c } => vec![Point::xy(a, b), Point::xy(0, c)],
        }
    }

    /// Canonical coset representative of `p` in the fundamental domain.
    pub fn reduce(&self, p: &Point) -> Point {
        debug_assert_eq!(p.dim, self.dim);
        match self.basis {
            Basis::Diagonal(diag) => {
                let mut c = [0i64; MAX_DIM];
                for i in 0..self.dim as usize {
                    c[i] = p.coords[i].rem_euclid(diag[i]);
                }
                Point { coords: c, dim: self.dim }
            }
            Basis::Hnf2 { a, b, c } => {
                let x0 = p.coords[0].rem_euclid(a);
                let m = (p.coords[0] - x0) / a;
                let y = p.coords[1] as i128 - m as i128 * b as i128;
                let y0 = y.rem_euclid(c as i128) as i64;
                Point::xy(x0, y0)
            }
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.reduce(p).is_zero()
    }

    /// Rank of a reduced coset representative in lexicographic order of
    /// normal forms; inverse of [`Self::coset_by_rank`].
    pub fn coset_rank(&self, nf: &Point) -> u64 {
        match self.basis {
            Basis::Diagonal(diag) => {
                let mut rank: u64 = 0;
                for i in 0..self.dim as usize {
                    rank = rank * diag[i] as u64 + nf.coords[i] as u64;
                }
                rank
            }
            Basis::Hnf2 { c, .. } => nf.coords[0] as u64 * c as u64 + nf.coords[1] as u64,
        }
    }

    pub fn coset_by_rank(&self, mut rank: u64) -> Point {
        match self.basis {
            Basis::Diagonal(diag) => {
                let mut c = [0i64; MAX_DIM];
                for i in (0..self.dim as usize).rev() {
                    c[i] = (rank % diag[i] as u64) as i64;
                    rank /= diag[i] as u64;
                }
                Point { coords: c, dim: self.dim }
            }
            Basis::Hnf2 { c, .. } => {
                Point::xy((rank / c as u64) as i64, (rank % c as u64) as i64)
            }
        }
    }

    /// Visits every point of `t0 + L` with ∞-norm ≤ r, in lexicographic
    /// order.
    pub fn for_each_in_box<F: FnMut(Point)>(&self, t0: &Point, r: i64, f: F) {
        let ranges = [(-r, r); MAX_DIM];
        self.for_each_in_ranges(t0, &ranges[..self.dim as usize], f);
    }

    /// Visits every point of `t0 + L` whose i-th coordinate lies in
    /// `ranges[i]` (inclusive), in lexicographic order.
    pub fn for_each_in_ranges<F: FnMut(Point)>(
        &self,
        t0: &Point,
        ranges: &[(i64, i64)],
        mut f: F,
    ) {
        debug_assert_eq!(ranges.len(), self.dim as usize);
        // least value ≥ lo congruent to res mod step
        fn first_at_least(lo: i64, res: i64, step: i64) -> i64 {
            let diff = lo - res;
            res + step * (diff.div_euclid(step) + i64::from(diff.rem_euclid(step) != 0))
        }
        match self.basis {
            Basis::Diagonal(diag) => {
                let d = self.dim as usize;
                let mut axes: Vec<(i64, i64, i64)> = Vec::with_capacity(d);
                for i in 0..d {
                    let b = diag[i];
                    let res = t0.coords[i].rem_euclid(b);
                    axes.push((first_at_least(ranges[i].0, res, b), ranges[i].1, b));
                }
                let mut cur = [0i64; MAX_DIM];
                fn walk<F: FnMut(Point)>(
                    i: usize,
                    d: usize,
                    dimu: u8,
                    axes: &[(i64, i64, i64)],
                    cur: &mut [i64; MAX_DIM],
                    f: &mut F,
                ) {
                    if i == d {
                        f(Point { coords: *cur, dim: dimu });
                        return;
                    }
                    let (lo, hi, step) = axes[i];
                    let mut v = lo;
                    while v <= hi {
                        cur[i] = v;
                        walk(i + 1, d, dimu, axes, cur, f);
                        v += step;
                    }
                }
                walk(0, d, self.dim, &axes, &mut cur, &mut f);
            }
            Basis::Hnf2 { a, b, c } => {
                // x = t0.x + m·a, y = t0.y + m·b + n·c
                let (tx, ty) = (t0.coords[0], t0.coords[1]);
                let ((x_lo, x_hi), (y_lo, y_hi)) = (ranges[0], ranges[1]);
                let m_lo = {
                    let diff = x_lo - tx;
                    diff.div_euclid(a) + i64::from(diff.rem_euclid(a) != 0)
                };
                let m_hi = (x_hi - tx).div_euclid(a);
                for m in m_lo..=m_hi {
                    let base = ty as i128 + m as i128 * b as i128;
                    let n_lo_num = y_lo as i128 - base;
                    let n_lo = n_lo_num.div_euclid(c as i128)
                        + i128::from(n_lo_num.rem_euclid(c as i128) != 0);
                    let n_hi = (y_hi as i128 - base).div_euclid(c as i128);
                    let mut n = n_lo;
                    while n <= n_hi {
                        f(Point::xy(tx + m * a, (base + n * c as i128) as i64));
                        n += 1;
                    }
                }
            }
        }
    }
}

impl Serialize for ModulusLattice {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(4))?;
        map.serialize_entry("source", &self.source)?;
        map.serialize_entry("dim", &self.dim)?;
        map.serialize_entry("index", &self.index)?;
        map.serialize_entry("basis", &self.basis_matrix())?;
        map.end()
    }
}

impl fmt::Display for ModulusLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            ModulusSource::Scalar { b } => write!(f, "{b}Z^{}", self.dim),
            ModulusSource::Ideal { prime, k } => write!(f, "({prime})^{k}"),
            ModulusSource::Composite => write!(f, "lattice[index {}]", self.index),
        }
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// 2×2 Smith normal form P·M·Q = diag(d1, d2) over Z with unimodular P, Q.
fn snf2(m: [[i128; 2]; 2]) -> ([[i128; 2]; 2], [i128; 2], [[i128; 2]; 2]) {
    let mut m = m;
    let mut p = [[1i128, 0], [0, 1]];
    let mut q = [[1i128, 0], [0, 1]];
    loop {
        if m[1][0] != 0 {
            let (g, x, y) = ext_gcd(m[0][0], m[1][0]);
            let (r0, r1) = (m[0][0] / g, m[1][0] / g);
            let apply = |mat: &mut [[i128; 2]; 2]| {
                let top = [x * mat[0][0] + y * mat[1][0], x * mat[0][1] + y * mat[1][1]];
                let bot = [
                    -r1 * mat[0][0] + r0 * mat[1][0],
                    -r1 * mat[0][1] + r0 * mat[1][1],
                ];
                mat[0] = top;
                mat[1] = bot;
            };
            apply(&mut m);
            apply(&mut p);
        }
        if m[0][1] != 0 {
            let (g, x, y) = ext_gcd(m[0][0], m[0][1]);
            let (c0, c1) = (m[0][0] / g, m[0][1] / g);
            let apply = |mat: &mut [[i128; 2]; 2]| {
                let left = [x * mat[0][0] + y * mat[0][1], x * mat[1][0] + y * mat[1][1]];
                let right = [
                    -c1 * mat[0][0] + c0 * mat[0][1],
                    -c1 * mat[1][0] + c0 * mat[1][1],
                ];
                mat[0][0] = left[0];
                mat[1][0] = left[1];
                mat[0][1] = right[0];
                mat[1][1] = right[1];
            };
            apply(&mut m);
            apply(&mut q);
        }
        if m[1][0] == 0 && m[0][1] == 0 {
            break;
        }
    }
    // normalize signs through P
    for i in 0..2 {
        if m[i][i] < 0 {
            m[i][i] = -m[i][i];
            p[i][0] = -p[i][0];
            p[i][1] = -p[i][1];
        }
    }
    (p, [m[0][0], m[1][1]], q)
}

fn mat2_mul_vec(m: &[[i128; 2]; 2], v: &[i128; 2]) -> [i128; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

fn basis_as_cols(l: &ModulusLattice) -> [[i128; 2]; 2] {
    // row-major matrix whose columns are the basis vectors
    match l.basis {
        Basis::Diagonal(diag) => [[diag[0] as i128, 0], [0, diag[1] as i128]],
        Basis::Hnf2 { a, b, c } => [[a as i128, 0], [b as i128, c as i128]],
    }
}

/// One congruence t ≡ residue (mod lattice).
pub type Congruence = (Point, ModulusLattice);

/// Lattice Chinese remainder theorem: solves a system with pairwise
/// coprime indices, returning the canonical residue and the intersection
/// lattice (index = product of the indices). The result is verified by
/// substitution into every congruence.
pub fn crt_solve(congruences: &[Congruence]) -> Result<(Point, ModulusLattice)> {
    if congruences.is_empty() {
        return Err(Error::invalid("empty congruence system"));
    }
    let dim = congruences[0].1.dim;
    for (p, m) in congruences {
        if m.dim != dim || p.dim() != dim {
            return Err(Error::invalid("mixed dimensions in congruence system"));
        }
    }
    for i in 0..congruences.len() {
        for j in i + 1..congruences.len() {
            let g = gcd_u64(congruences[i].1.index, congruences[j].1.index);
            if g != 1 {
                return Err(Error::domain(format!(
                    "indices {} and {} are not coprime (gcd {g})",
                    congruences[i].1.index, congruences[j].1.index
                )));
            }
        }
    }

    let (first_r, first_m) = &congruences[0];
    let mut t = first_m.reduce(first_r);
    let mut lat = first_m.clone();
    for (r, m) in &congruences[1..] {
        (t, lat) = combine(&t, &lat, r, m)?;
    }

    // substitution check against every original congruence
    for (r, m) in congruences {
        if !m.contains(&t.sub(r)) {
            return Err(Error::internal("CRT solution fails substitution"));
        }
        for v in lat.basis_vectors() {
            if !m.contains(&v) {
                return Err(Error::internal("CRT lattice not contained in a modulus"));
            }
        }
    }
    let t0 = lat.reduce(&t);
    Ok((t0, lat))
}

fn combine(
    t: &Point,
    la: &ModulusLattice,
    r: &Point,
    lb: &ModulusLattice,
) -> Result<(Point, ModulusLattice)> {
    let index = la
        .index
        .checked_mul(lb.index)
        .ok_or(Error::Overflow("CRT index"))?;
    if la.dim != 2 {
        // only scalar moduli exist away from d = 2: per-axis CRT
        let (Basis::Diagonal(da), Basis::Diagonal(db)) = (&la.basis, &lb.basis) else {
            return Err(Error::internal("non-diagonal basis in d ≠ 2"));
        };
        let mut c = [0i64; MAX_DIM];
        let mut diag = [1i64; MAX_DIM];
        for i in 0..la.dim as usize {
            let (m1, m2) = (da[i] as i128, db[i] as i128);
            let (r1, r2) = (t.coords[i] as i128, r.coords[i] as i128);
            let inv = mod_inv(m1.rem_euclid(m2), m2)?;
            let k = ((r2 - r1).rem_euclid(m2) * inv).rem_euclid(m2);
            let x = r1 + m1 * k;
            let modulus = m1 * m2;
            c[i] = x.rem_euclid(modulus) as i64;
            diag[i] = modulus as i64;
        }
        return Ok((
            Point { coords: c, dim: la.dim },
            ModulusLattice {
                source: ModulusSource::Composite,
                dim: la.dim,
                basis: Basis::Diagonal(diag),
                index,
            },
        ));
    }

    // d = 2 general case. Want u with A·u ≡ r − t (mod B); with
    // A' = adj(B)·A and c' = adj(B)·(r − t) this is the componentwise
    // system A'·u ≡ c' (mod |det B|).
    let a = basis_as_cols(la);
    let b = basis_as_cols(lb);
    let det_b = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let adj_b = [[b[1][1], -b[0][1]], [-b[1][0], b[0][0]]];
    let n2 = det_b.abs();
    let diff = [
        r.coords[0] as i128 - t.coords[0] as i128,
        r.coords[1] as i128 - t.coords[1] as i128,
    ];
    let a_p = [
        [
            adj_b[0][0] * a[0][0] + adj_b[0][1] * a[1][0],
            adj_b[0][0] * a[0][1] + adj_b[0][1] * a[1][1],
        ],
        [
            adj_b[1][0] * a[0][0] + adj_b[1][1] * a[1][0],
            adj_b[1][0] * a[0][1] + adj_b[1][1] * a[1][1],
        ],
    ];
    let c_p = mat2_mul_vec(&adj_b, &diff);

    let (p, d, q) = snf2(a_p);
    let cc = mat2_mul_vec(&p, &c_p);
    let mut v = [0i128; 2];
    let mut kdiag = [0i128; 2];
    for i in 0..2 {
        let g = {
            let mut x = d[i].rem_euclid(n2);
            let mut y = n2;
            while y != 0 {
                (x, y) = (y, x.rem_euclid(y));
            }
            x.max(1)
        };
        if cc[i].rem_euclid(g) != 0 {
            return Err(Error::internal("CRT system unsolvable despite coprime indices"));
        }
        let nn = n2 / g;
        kdiag[i] = nn;
        if nn == 1 {
            v[i] = 0;
        } else {
            let inv = mod_inv((d[i] / g).rem_euclid(nn), nn)?;
            v[i] = ((cc[i] / g).rem_euclid(nn) * inv).rem_euclid(nn);
        }
    }
    let u = mat2_mul_vec(&q, &v);
    let au = mat2_mul_vec(&a, &u);
    let t_new = [t.coords[0] as i128 + au[0], t.coords[1] as i128 + au[1]];

    // intersection lattice = A · Q · diag(kdiag)
    let k1 = [q[0][0] * kdiag[0], q[1][0] * kdiag[0]];
    let k2 = [q[0][1] * kdiag[1], q[1][1] * kdiag[1]];
    let col1 = mat2_mul_vec(&a, &k1);
    let col2 = mat2_mul_vec(&a, &k2);
    let fits = |x: i128| i64::try_from(x).map_err(|_| Error::Overflow("CRT lattice entry"));
    let (ha, hb, hc) = hnf2(
        (fits(col1[0])?, fits(col1[1])?),
        (fits(col2[0])?, fits(col2[1])?),
    )?;
    if ha as u64 * hc as u64 != index {
        return Err(Error::internal("CRT intersection index mismatch"));
    }
    let lat = ModulusLattice::composite2(ha, hb, hc, index);
    let t_red = lat.reduce(&Point::xy(fits(t_new[0])?, fits(t_new[1])?));
    Ok((t_red, lat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::RingId;

    #[test]
    fn point_basics() {
        let p = Point::new(&[3, -2]).unwrap();
        assert_eq!(p.to_string(), "(3,-2)");
        assert_eq!(p.norm_inf(), 3);
        assert!(Point::new(&[]).is_err());
        assert!(Point::new(&[1, 2, 3, 4]).is_err());
        assert!(Point::xy(0, 1) < Point::xy(1, -5));
    }

    #[test]
    fn scalar_lattice_reduction() {
        let m = ModulusLattice::scalar(2, 2).unwrap();
        assert_eq!(m.index, 4);
        assert_eq!(m.reduce(&Point::xy(-3, 4)), Point::xy(1, 0));
        assert!(m.contains(&Point::xy(-2, 6)));
        assert_eq!(m.coset_rank(&Point::xy(1, 0)), 2);
        assert_eq!(m.coset_by_rank(3), Point::xy(1, 1));
    }

    #[test]
    fn ideal_lattice_of_ramified_square() {
        // (1+i)² = 2i generates the same lattice as 2Z[i]
        let pi = QuadInt::raw(RingId::Gauss, 1, 1);
        let m = ModulusLattice::ideal(&pi, 2).unwrap();
        assert_eq!(m.index, 4);
        assert_eq!(m.basis_matrix(), vec![vec![2, 0], vec![0, 2]]);
    }

    #[test]
    fn ideal_lattice_prime() {
        // (2+i) has index 5; the HNF is [[5,0],[r,1]] ~ columns (5,r),(0,1)
        let pi = QuadInt::raw(RingId::Gauss, 2, 1);
        let m = ModulusLattice::ideal(&pi, 1).unwrap();
        assert_eq!(m.index, 5);
        // every multiple of 2+i reduces to zero
        for (x, y) in [(2, 1), (-1, 2), (4, 2), (3, -1)] {
            let z = QuadInt::raw(RingId::Gauss, x, y);
            assert!(z.div_exact(&pi).unwrap().is_none() || {
                m.contains(&Point::from_quadint(&z))
            });
        }
        assert!(m.contains(&Point::xy(2, 1)));
        assert!(!m.contains(&Point::xy(1, 1)));
    }

    #[test]
    fn crt_spec_example() {
        // t ≡ (1,0) mod 2Z², t ≡ (0,2) mod 3Z² → t0 = (3,2), L = 6Z²
        let c1 = (Point::xy(1, 0), ModulusLattice::scalar(2, 2).unwrap());
        let c2 = (Point::xy(0, 2), ModulusLattice::scalar(3, 2).unwrap());
        let (t0, l) = crt_solve(&[c1, c2]).unwrap();
        assert_eq!(t0, Point::xy(3, 2));
        assert_eq!(l.index, 36);
        assert_eq!(l.basis_matrix(), vec![vec![6, 0], vec![0, 6]]);
    }

    #[test]
    fn crt_single_and_errors() {
        let c = (Point::xy(5, 1), ModulusLattice::scalar(3, 2).unwrap());
        let (t0, l) = crt_solve(&[c]).unwrap();
        assert_eq!(t0, Point::xy(2, 1));
        assert_eq!(l.index, 9);
        // 2Z² and 4Z² share factor 2
        let bad = [
            (Point::xy(0, 0), ModulusLattice::scalar(2, 2).unwrap()),
            (Point::xy(1, 1), ModulusLattice::scalar(4, 2).unwrap()),
        ];
        assert!(crt_solve(&bad).is_err());
    }

    #[test]
    fn crt_with_ideal_modulus() {
        let pi = QuadInt::raw(RingId::Gauss, 2, 1);
        let ideal = ModulusLattice::ideal(&pi, 2).unwrap(); // index 25
        let scalar = ModulusLattice::scalar(2, 2).unwrap(); // index 4
        let target = Point::xy(3, 4);
        let (t0, l) = crt_solve(&[
            (target, ideal.clone()),
            (Point::xy(1, 1), scalar.clone()),
        ])
        .unwrap();
        assert_eq!(l.index, 100);
        assert!(ideal.contains(&t0.sub(&target)));
        assert!(scalar.contains(&t0.sub(&Point::xy(1, 1))));
    }

    #[test]
    fn box_enumeration_matches_reduce() {
        let pi = QuadInt::raw(RingId::Gauss, 1, 2);
        let lat = ModulusLattice::ideal(&pi, 1).unwrap();
        let t0 = Point::xy(1, -1);
        let mut via_visit = Vec::new();
        lat.for_each_in_box(&t0, 6, |p| via_visit.push(p));
        let mut via_scan = Vec::new();
        for x in -6..=6 {
            for y in -6..=6 {
                let p = Point::xy(x, y);
                if lat.contains(&p.sub(&t0)) {
                    via_scan.push(p);
                }
            }
        }
        assert_eq!(via_visit, via_scan);
        let count = via_visit.len() as f64;
        let expected = 13.0f64 * 13.0 / 5.0;
        assert!((count - expected).abs() < 8.0);
    }
}
