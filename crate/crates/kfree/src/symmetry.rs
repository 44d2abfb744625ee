//! GL(2,Z) stabiliser search over the sieved point sets, with constructive
//! witnesses showing that a non-stabiliser matrix destroys admissibility.
//!
//! A matrix passes the patch-level test when it maps every member of
//! V ∩ [−r,r]² back into V, in both directions. Passing at finite radius
//! is a necessary condition; the searches are compared against the exact
//! group each set is known to have, and the witness pipeline turns any
//! failing matrix into an admissible set S whose image A(S) is
//! inadmissible.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::admissibility::{cosets_met, is_admissible, AdmissibilityReport};
use crate::error::{Error, Result};
use crate::lattice::{crt_solve, ModulusLattice, Point};
use crate::ring::{
    canonical_associate, factor, is_k_free, is_rational_prime, make_ring, split_kind, QuadInt,
    RingId, SplitKind,
};
use crate::sieve::{sieve_grid, BoxWindow, SieveGrid, VSpec};

/// An integer 2×2 matrix with determinant ±1, acting on column vectors.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UniMat {
    m: [[i64; 2]; 2],
}

impl UniMat {
    pub fn new(m: [[i64; 2]; 2]) -> Result<UniMat> {
        let det = det2(&m);
        if det != 1 && det != -1 {
            return Err(Error::invalid(format!("matrix has determinant {det}, not ±1")));
        }
        Ok(UniMat { m })
    }

    pub fn identity() -> UniMat {
        UniMat { m: [[1, 0], [0, 1]] }
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        self.m
    }

    pub fn det(&self) -> i64 {
        det2(&self.m)
    }

    pub fn max_entry(&self) -> i64 {
        self.m.iter().flatten().map(|e| e.abs()).max().unwrap()
    }

    pub fn mul(&self, other: &UniMat) -> Result<UniMat> {
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let v = self.m[i][0] as i128 * other.m[0][j] as i128
                    + self.m[i][1] as i128 * other.m[1][j] as i128;
                *cell = i64::try_from(v).map_err(|_| Error::Overflow("matrix product"))?;
            }
        }
        Ok(UniMat { m: out })
    }

    pub fn neg(&self) -> UniMat {
        UniMat { m: [[-self.m[0][0], -self.m[0][1]], [-self.m[1][0], -self.m[1][1]]] }
    }

    /// Exact inverse: det·adjugate, since det² = 1.
    pub fn inv(&self) -> UniMat {
        let d = self.det();
        UniMat {
            m: [
                [d * self.m[1][1], -d * self.m[0][1]],
                [-d * self.m[1][0], d * self.m[0][0]],
            ],
        }
    }

    pub fn apply(&self, p: &Point) -> Point {
        debug_assert_eq!(p.dim(), 2);
        Point::xy(
            self.m[0][0] * p.get(0) + self.m[0][1] * p.get(1),
            self.m[1][0] * p.get(0) + self.m[1][1] * p.get(1),
        )
    }

    pub fn apply_quad(&self, x: &QuadInt) -> QuadInt {
        QuadInt::raw(
            x.ring,
            self.m[0][0] * x.a + self.m[0][1] * x.b,
            self.m[1][0] * x.a + self.m[1][1] * x.b,
        )
    }

    pub fn parse(text: &str) -> Result<UniMat> {
        let nums: Vec<i64> = text
            .split(',')
            .map(|s| s.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::invalid(format!("matrix entries: {e}")))?;
        if nums.len() != 4 {
            return Err(Error::invalid("matrix needs 4 comma-separated entries (row-major)"));
        }
        UniMat::new([[nums[0], nums[1]], [nums[2], nums[3]]])
    }
}

fn det2(m: &[[i64; 2]; 2]) -> i64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

impl fmt::Debug for UniMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for UniMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]]",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}

impl Serialize for UniMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.m.serialize(s)
    }
}

/// All integer 2×2 matrices with |entries| ≤ bound and det ±1, in
/// lexicographic row-major order.
pub fn enumerate_glz(bound: i64) -> Result<Vec<UniMat>> {
    if !(1..=6).contains(&bound) {
        return Err(Error::resource("entry bound must be between 1 and 6"));
    }
    let mut out = Vec::new();
    for a in -bound..=bound {
        for b in -bound..=bound {
            for c in -bound..=bound {
                for d in -bound..=bound {
                    let m = [[a, b], [c, d]];
                    if det2(&m).abs() == 1 {
                        out.push(UniMat { m });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Multiplication-by-u as a matrix in the basis {1, ω}: columns are the
/// coordinates of u·1 and u·ω.
pub fn mult_matrix(u: &QuadInt) -> Result<UniMat> {
    let omega = QuadInt::raw(u.ring, 0, 1);
    let col2 = u.mul(&omega)?;
    UniMat::new([[u.a, col2.a], [u.b, col2.b]])
}

/// The ring conjugation ω ↦ t − ω as a matrix.
pub fn conj_matrix(ring: RingId) -> UniMat {
    let (_, t) = make_ring(ring).omega_sq;
    UniMat { m: [[1, t], [0, -1]] }
}

/// True iff A = ε·σ with ε a unit and σ ∈ {id, conj}: the exact membership
/// test in the predicted stabiliser of a ring k-free set, radius-free.
pub fn is_stab_member(a: &UniMat, ring: RingId) -> Result<bool> {
    for sigma in [UniMat::identity(), conj_matrix(ring)] {
        let m = a.mul(&sigma)?;
        let eps = QuadInt::raw(ring, m.m[0][0], m.m[1][0]);
        if eps.is_unit() && mult_matrix(&eps)? == m {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Generators of the predicted stabiliser: the unit action, the ring
/// conjugation, and −1; for the scalar-modulus sets, generators of the
/// whole of GL(2,Z).
pub fn expected_generators(spec: &VSpec) -> Result<Vec<UniMat>> {
    Ok(match spec {
        VSpec::Visible { .. } | VSpec::KfreeLattice { .. } | VSpec::BfreeLattice { .. } => vec![
            UniMat::new([[0, -1], [1, 0]])?,
            UniMat::new([[1, 1], [0, 1]])?,
            UniMat::new([[1, 0], [0, -1]])?,
        ],
        VSpec::KfreeRing { ring, .. } => match ring {
            RingId::Gauss => vec![
                mult_matrix(&QuadInt::raw(*ring, 0, 1))?, // ·i
                conj_matrix(*ring),
            ],
            RingId::Eisenstein => vec![
                mult_matrix(&QuadInt::raw(*ring, 0, -1))?, // ·(−ρ)
                conj_matrix(*ring),
            ],
            RingId::Sqrt2 | RingId::Golden | RingId::Sqrt3 => {
                let (ua, ub) = make_ring(*ring).fundamental_unit.unwrap();
                vec![
                    mult_matrix(&QuadInt::raw(*ring, ua, ub))?,
                    conj_matrix(*ring),
                    UniMat::identity().neg(),
                ]
            }
            RingId::Rational => return Err(Error::invalid("no 2d stabiliser for Z")),
        },
    })
}

/// The expected stabiliser sliced to the entry bound: every predicted
/// element with all |entries| ≤ bound, sorted.
pub fn expected_set(spec: &VSpec, bound: i64) -> Result<Vec<UniMat>> {
    let mut out: Vec<UniMat> = match spec {
        VSpec::Visible { .. } | VSpec::KfreeLattice { .. } | VSpec::BfreeLattice { .. } => {
            enumerate_glz(bound)?
        }
        VSpec::KfreeRing { ring, .. } => match ring {
            RingId::Gauss | RingId::Eisenstein => {
                // finite closure of the generators (8 or 12 elements)
                let gens = expected_generators(spec)?;
                let mut set: Vec<UniMat> = vec![UniMat::identity()];
                let mut frontier = set.clone();
                while !frontier.is_empty() {
                    let mut next = Vec::new();
                    for f in &frontier {
                        for g in &gens {
                            let prod = f.mul(g)?;
                            if !set.contains(&prod) {
                                set.push(prod);
                                next.push(prod);
                            }
                        }
                    }
                    frontier = next;
                }
                set.retain(|m| m.max_entry() <= bound);
                set
            }
            RingId::Sqrt2 | RingId::Golden | RingId::Sqrt3 => {
                // ±U^a·C^b; |a| ≤ 16 already exceeds any bound ≤ 6 because
                // the entries grow at least like Fibonacci numbers
                let (ua, ub) = make_ring(*ring).fundamental_unit.unwrap();
                let u = mult_matrix(&QuadInt::raw(*ring, ua, ub))?;
                let c = conj_matrix(*ring);
                let mut set = Vec::new();
                for dir in [u, u.inv()] {
                    let mut p = UniMat::identity();
                    for step in 0..=16 {
                        if step > 0 {
                            p = p.mul(&dir)?;
                        }
                        for cand in [p, p.mul(&c)?] {
                            if cand.max_entry() <= bound {
                                set.push(cand);
                                set.push(cand.neg());
                            }
                        }
                    }
                }
                set
            }
            RingId::Rational => return Err(Error::invalid("no 2d stabiliser for Z")),
        },
    };
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailDirection {
    /// M·w left V for some w ∈ V.
    Forward,
    /// M⁻¹·w left V for some w ∈ V.
    Inverse,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Counterexample {
    pub point: Point,
    pub image: Point,
    pub direction: FailDirection,
}

#[derive(Clone, Copy, Debug)]
pub enum StabOutcome {
    Pass,
    Fail(Counterexample),
}

/// Patch-level stabiliser test: every w ∈ V ∩ [−r,r]² must have M·w ∈ V
/// and M⁻¹·w ∈ V. The grid must cover radius r·(1 + 2·max|entry|), so
/// every image is decidable; otherwise this is a precondition error, never
/// a silent verdict. A failure reports the lexicographically least failing
/// point in the window.
pub fn stab_test(m: &UniMat, grid: &SieveGrid, r: i64) -> Result<StabOutcome> {
    let needed = r * (1 + 2 * m.max_entry());
    if grid.window.half_width < needed {
        return Err(Error::precondition(format!(
            "grid radius {} < required {needed}",
            grid.window.half_width
        )));
    }
    if grid.window.dim != 2 {
        return Err(Error::precondition("stabiliser tests run on 2d windows"));
    }
    let minv = m.inv();
    for x in -r..=r {
        for y in -r..=r {
            let w = Point::xy(x, y);
            if grid.contains(&w) != Some(true) {
                continue;
            }
            for (mat, direction) in [(m, FailDirection::Forward), (&minv, FailDirection::Inverse)] {
                let image = mat.apply(&w);
                match grid.contains(&image) {
                    Some(true) => {}
                    Some(false) => {
                        return Ok(StabOutcome::Fail(Counterexample { point: w, image, direction }))
                    }
                    None => {
                        return Err(Error::precondition(format!(
                            "image {image} of {w} fell outside the sieved window"
                        )))
                    }
                }
            }
        }
    }
    Ok(StabOutcome::Pass)
}

#[derive(Clone, Debug, Serialize)]
pub struct FailRecord {
    pub matrix: UniMat,
    pub counterexample: Counterexample,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupVerdict {
    /// Passed set equals the predicted group slice.
    Exact,
    /// Passed set strictly contains the prediction.
    Superset,
    /// Passed set misses predicted elements.
    Deficit,
    /// Extra and missing elements at once.
    Mixed,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupComparison {
    pub verdict: GroupVerdict,
    pub expected_order: usize,
    pub extra: Vec<UniMat>,
    pub missing: Vec<UniMat>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabReport {
    pub schema: &'static str,
    pub spec: VSpec,
    pub entry_bound: i64,
    pub radius: i64,
    pub sieve_radius: i64,
    pub tested: usize,
    pub passed: Vec<UniMat>,
    pub counterexamples: Vec<FailRecord>,
    pub group: GroupComparison,
}

/// Filters all candidate matrices at the entry bound through the patch
/// test and compares the passed set against the predicted group slice.
pub fn stab_search(spec: &VSpec, entry_bound: i64, radius: i64, threads: usize) -> Result<StabReport> {
    spec.validate()?;
    if spec.dim() != 2 {
        return Err(Error::invalid("stabiliser search needs a 2d spec"));
    }
    if radius < 1 {
        return Err(Error::invalid("radius must be ≥ 1"));
    }
    let sieve_radius = radius * (1 + 2 * entry_bound);
    let window = BoxWindow::new(2, sieve_radius)?;
    let grid = sieve_grid(spec, &window, threads)?;
    let candidates = enumerate_glz(entry_bound)?;

    let run = |cands: &[UniMat]| -> Result<Vec<(UniMat, StabOutcome)>> {
        cands
            .iter()
            .map(|m| stab_test(m, &grid, radius).map(|o| (*m, o)))
            .collect()
    };
    let outcomes: Vec<(UniMat, StabOutcome)> = if threads <= 1 || candidates.len() < 32 {
        run(&candidates)?
    } else {
        let chunk = candidates.len().div_ceil(threads);
        let results: Vec<Result<Vec<(UniMat, StabOutcome)>>> = std::thread::scope(|scope| {
            candidates
                .chunks(chunk)
                .map(|c| scope.spawn(move || run(c)))
                .collect::<Vec<_>>()
                .into_iter()
                .map(|h| h.join().unwrap())
                .collect()
        });
        let mut all = Vec::with_capacity(candidates.len());
        for r in results {
            all.extend(r?);
        }
        all
    };

    let mut passed = Vec::new();
    let mut counterexamples = Vec::new();
    for (m, outcome) in outcomes {
        match outcome {
            StabOutcome::Pass => passed.push(m),
            StabOutcome::Fail(ce) => counterexamples.push(FailRecord { matrix: m, counterexample: ce }),
        }
    }
    let expected = expected_set(spec, entry_bound)?;
    let extra: Vec<UniMat> = passed.iter().filter(|m| !expected.contains(m)).copied().collect();
    let missing: Vec<UniMat> = expected.iter().filter(|m| !passed.contains(m)).copied().collect();
    let verdict = match (extra.is_empty(), missing.is_empty()) {
        (true, true) => GroupVerdict::Exact,
        (false, true) => GroupVerdict::Superset,
        (true, false) => GroupVerdict::Deficit,
        (false, false) => GroupVerdict::Mixed,
    };
    Ok(StabReport {
        schema: "stabreport/1",
        spec: spec.clone(),
        entry_bound,
        radius,
        sieve_radius,
        tested: candidates.len(),
        passed,
        counterexamples,
        group: GroupComparison { verdict, expected_order: expected.len(), extra, missing },
    })
}

fn prime_kind(pi: &QuadInt) -> Result<SplitKind> {
    let n = pi.abs_norm()? as i64;
    if is_rational_prime(n) {
        split_kind(pi.ring, n)
    } else {
        let isqrt = (n as f64).sqrt().round() as i64;
        if isqrt * isqrt == n && is_rational_prime(isqrt) {
            Ok(SplitKind::Inert)
        } else {
            Err(Error::internal(format!("{pi:?} is not a canonical prime")))
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BadPrime {
    /// A k-free w with ρ^k | A(w).
    pub seed: Point,
    pub rho: QuadInt,
    pub image: QuadInt,
}

/// Scans V in expanding shells for a k-free w whose image under A is
/// divisible by the k-th power of some prime ρ. Such a ρ is never inert,
/// and never ramified when k is even; both exclusions are asserted on
/// every output.
pub fn bad_prime_witness(
    a: &UniMat,
    ring: RingId,
    k: u32,
    max_shell: i64,
) -> Result<BadPrime> {
    if k < 2 {
        return Err(Error::invalid("k must be ≥ 2"));
    }
    if is_stab_member(a, ring)? {
        return Err(Error::precondition(format!(
            "{a} stabilises the k-free set of {ring}; no bad prime exists"
        )));
    }
    for s in 1..=max_shell {
        for x in -s..=s {
            let ys: Vec<i64> = if x.abs() == s {
                (-s..=s).collect()
            } else {
                vec![-s, s]
            };
            for y in ys {
                let w = QuadInt::raw(ring, x, y);
                if !is_k_free(&w, k)? {
                    continue;
                }
                let image = a.apply_quad(&w);
                for (pi, e) in factor(&image)?.factors {
                    if e >= k {
                        let kind = prime_kind(&pi)?;
                        if kind == SplitKind::Inert {
                            return Err(Error::internal(format!(
                                "inert bad prime {pi:?}; contradicts the coset argument"
                            )));
                        }
                        if k.is_multiple_of(2) && kind == SplitKind::Ramified {
                            return Err(Error::internal(format!(
                                "ramified bad prime {pi:?} with even k"
                            )));
                        }
                        return Ok(BadPrime { seed: Point::xy(x, y), rho: pi, image });
                    }
                }
            }
        }
    }
    Err(Error::resource(format!(
        "no bad prime found within shell radius {max_shell}"
    )))
}

/// A full inadmissible-image witness: S admissible, A(S) inadmissible.
#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub schema: &'static str,
    pub matrix: UniMat,
    pub ring: RingId,
    pub k: u32,
    pub bad_prime: QuadInt,
    pub seed: Point,
    pub seed_image: QuadInt,
    /// The small primes whose k-th powers pin the helper lattice.
    pub small_primes: Vec<QuadInt>,
    pub helper_lattice: ModulusLattice,
    pub elements: Vec<Point>,
    pub image_elements: Vec<Point>,
    pub set_admissible: AdmissibilityReport,
    pub image_admissible: AdmissibilityReport,
}

const MAX_WITNESS_SIZE: u64 = 20_000;

/// The first `count` points of the coset t0 + L in (∞-shell, lex) order.
fn coset_points_ascending(t0: &Point, lat: &ModulusLattice, count: usize) -> Vec<Point> {
    let mut r = 4i64;
    loop {
        let mut pts: Vec<(i64, Point)> = Vec::new();
        lat.for_each_in_box(t0, r, |p| pts.push((p.norm_inf(), p)));
        if pts.len() >= count {
            pts.sort();
            return pts.into_iter().take(count).map(|(_, p)| p).collect();
        }
        r *= 2;
    }
}

/// Builds the set S of size |N(ρ)|^k from the coset-covering construction:
/// z₁ = w and z₂,…,z_n ∈ 1 + L chosen so that the images A(z_i) cover all
/// nonzero cosets of (ρ^k), followed by the two repair steps that vacate
/// one coset of (ρ^k) and one of (ρ̄^k) in S itself. The final checks are
/// made by the admissibility module, independent of this construction.
pub fn inadmissible_image_witness(
    a: &UniMat,
    ring: RingId,
    k: u32,
    max_shell: i64,
) -> Result<Witness> {
    let bad = bad_prime_witness(a, ring, k, max_shell)?;
    let rho = bad.rho;
    let w = bad.seed;
    let spec = VSpec::KfreeRing { ring, k };
    let n = rho.abs_norm()?.pow(k);
    if n > MAX_WITNESS_SIZE {
        return Err(Error::resource(format!("witness set of size {n} is too large")));
    }

    // P: all canonical primes of smaller norm; when ρ has the minimal norm
    // of the ring, the smallest inert prime instead.
    let rho_norm = rho.abs_norm()?;
    let mut small_primes = crate::sieve::canonical_primes_with_norm_up_to(ring, rho_norm - 1)?;
    if small_primes.is_empty() {
        let mut p = 2i64;
        loop {
            if is_rational_prime(p) && split_kind(ring, p)? == SplitKind::Inert {
                small_primes = vec![canonical_associate(&QuadInt::raw(ring, p, 0))?.rep];
                break;
            }
            p += 1;
        }
    }
    let mut helper = QuadInt::one(ring);
    for pi in &small_primes {
        helper = helper.mul(&pi.pow(k)?)?;
    }
    let helper_lattice = ModulusLattice::principal(&helper)?;

    let rho_lat = ModulusLattice::ideal(&rho, k)?;
    let a_inv = a.inv();
    // A(z) ≡ c (mod ρ^k) ⟺ z ≡ A⁻¹c (mod A⁻¹(ρ^k))
    let pulled = {
        let vs = rho_lat.basis_vectors();
        ModulusLattice::from_columns(a_inv.apply(&vs[0]), a_inv.apply(&vs[1]))?
    };

    let one = Point::xy(1, 0);
    for attempt in 0usize..4 {
        let mut elements: Vec<Point> = vec![w];
        for rank in 1..n {
            let target = rho_lat.coset_by_rank(rank);
            let (t0, joint) = crt_solve(&[
                (helper_lattice.reduce(&one), helper_lattice.clone()),
                (pulled.reduce(&a_inv.apply(&target)), pulled.clone()),
            ])?;
            // smallest-shell solution; later attempts advance to more
            // separated representatives
            let z = coset_points_ascending(&t0, &joint, attempt + 1)
                .pop()
                .ok_or_else(|| Error::internal("empty coset"))?;
            elements.push(z);
        }

        // repair 1: if S meets every coset of (ρ^k), move z₂ by w; the
        // image coset is unchanged because A(w) ≡ 0 there
        if cosets_met(&elements, &rho_lat)?.missed_example.is_none() {
            elements[1] = elements[1].add(&w);
        }
        // repair 2: the conjugate class, for split ρ
        if prime_kind(&rho)? == SplitKind::Split {
            let rho_bar_lat = ModulusLattice::ideal(&rho.conj(), k)?;
            if cosets_met(&elements, &rho_bar_lat)?.missed_example.is_none() {
                let z2 = elements[1];
                let idx = (2..elements.len())
                    .find(|&i| !rho_lat.contains(&elements[i].sub(&z2)))
                    .ok_or_else(|| Error::internal("no repairable element"))?;
                elements[idx] = elements[idx].add(&w);
            }
        }

        let image_elements: Vec<Point> = elements.iter().map(|p| a.apply(p)).collect();
        let set_admissible = is_admissible(&elements, &spec)?;
        let image_admissible = is_admissible(&image_elements, &spec)?;
        if set_admissible.admissible && !image_admissible.admissible {
            return Ok(Witness {
                schema: "witness/1",
                matrix: *a,
                ring,
                k,
                bad_prime: rho,
                seed: w,
                seed_image: bad.image,
                small_primes,
                helper_lattice,
                elements,
                image_elements,
                set_admissible,
                image_admissible,
            });
        }
    }
    Err(Error::resource(format!(
        "witness construction failed after shell advancement; matrix {a}, ρ = {rho}, w = {w}"
    )))
}
