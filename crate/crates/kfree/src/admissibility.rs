//! Coset-occupancy analysis and the admissibility predicate that
//! characterises the hull of each V, plus locator search: translations t
//! that realise a finite pattern P inside V while keeping Q outside.
//!
//! A finite set is admissible when it misses at least one coset of every
//! modulus in the family of the spec. Only moduli with index ≤ |U| can be
//! violated, so the check is finite and certified: for every checked
//! modulus the report carries one explicitly missed coset.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{crt_solve, Congruence, ModulusLattice, Point};
use crate::sieve::{
    canonical_primes_with_norm_up_to, point_in_v, primes_up_to, sieve_grid, BoxWindow, VSpec,
};

pub const MAX_SET_SIZE: usize = 1_000_000;

/// Occupancy of the cosets of one modulus by a finite set.
#[derive(Clone, Debug, Serialize)]
pub struct CosetProfile {
    pub modulus: ModulusLattice,
    pub met: u64,
    /// Lexicographically least missed coset normal form; absent iff every
    /// coset is met.
    pub missed_example: Option<Point>,
}

/// Exact coset count of `points` modulo `m`, with the least missed coset.
pub fn cosets_met(points: &[Point], m: &ModulusLattice) -> Result<CosetProfile> {
    if points.len() > MAX_SET_SIZE {
        return Err(Error::resource(format!("set larger than {MAX_SET_SIZE} points")));
    }
    let mut ranks: Vec<u64> = points.iter().map(|p| m.coset_rank(&m.reduce(p))).collect();
    ranks.sort_unstable();
    ranks.dedup();
    let met = ranks.len() as u64;
    let missed_example = if met == m.index {
        None
    } else {
        // first gap in the sorted rank list
        let mut expected = 0u64;
        for &r in &ranks {
            if r > expected {
                break;
            }
            expected = r + 1;
        }
        Some(m.coset_by_rank(expected))
    };
    Ok(CosetProfile { modulus: m.clone(), met, missed_example })
}

/// The family moduli of a spec with index ≤ `max_index`, ascending.
pub fn family_by_index(spec: &VSpec, max_index: u64) -> Result<Vec<ModulusLattice>> {
    let mut out = Vec::new();
    match spec {
        VSpec::Visible { d } => {
            for p in primes_up_to(nth_root_floor(max_index, *d as u32)) {
                out.push(ModulusLattice::scalar(p as i64, *d)?);
            }
        }
        VSpec::KfreeLattice { d, k } => {
            for p in primes_up_to(nth_root_floor(max_index, *k * *d as u32)) {
                out.push(ModulusLattice::scalar(p.pow(*k) as i64, *d)?);
            }
        }
        VSpec::BfreeLattice { d, moduli } => {
            let mut sorted = moduli.clone();
            sorted.sort_unstable();
            for b in sorted {
                if (b as u64).pow(*d as u32) <= max_index {
                    out.push(ModulusLattice::scalar(b, *d)?);
                }
            }
        }
        VSpec::KfreeRing { ring, k } => {
            for prime in
                canonical_primes_with_norm_up_to(*ring, nth_root_floor(max_index, *k))?
            {
                out.push(ModulusLattice::ideal(&prime, *k)?);
            }
        }
    }
    out.sort_by_key(|m| m.index);
    Ok(out)
}

/// The family moduli whose "size" in the paper's counting is ≤ `max_size`:
/// the value b for scalar families, the absolute norm (= index) for ideal
/// families.
pub fn family_by_size(spec: &VSpec, max_size: u64) -> Result<Vec<ModulusLattice>> {
    match spec {
        VSpec::Visible { d } => primes_up_to(max_size)
            .into_iter()
            .map(|p| ModulusLattice::scalar(p as i64, *d))
            .collect(),
        VSpec::KfreeLattice { d, k } => {
            let mut out = Vec::new();
            for p in primes_up_to(nth_root_floor(max_size, *k)) {
                let pk = p.pow(*k);
                if pk <= max_size {
                    out.push(ModulusLattice::scalar(pk as i64, *d)?);
                }
            }
            Ok(out)
        }
        VSpec::BfreeLattice { d, moduli } => {
            let mut sorted = moduli.clone();
            sorted.sort_unstable();
            sorted
                .into_iter()
                .filter(|&b| b as u64 <= max_size)
                .map(|b| ModulusLattice::scalar(b, *d))
                .collect()
        }
        VSpec::KfreeRing { .. } => family_by_index(spec, max_size),
    }
}

fn nth_root_floor(n: u64, k: u32) -> u64 {
    if k == 0 {
        return n;
    }
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

/// Per-modulus audit record: the missed coset certifying admissibility.
#[derive(Clone, Debug, Serialize)]
pub struct CosetCertificate {
    pub modulus: ModulusLattice,
    pub index: u64,
    pub missed_coset: Point,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub cardinality: usize,
    /// Moduli with index ≤ |U| that were checked; every larger modulus is
    /// missed automatically by cardinality.
    pub moduli_checked: usize,
    pub certificates: Vec<CosetCertificate>,
    /// The first modulus all of whose cosets are met, when inadmissible.
    pub violator: Option<ModulusLattice>,
}

/// Decides admissibility of a finite set for the modulus family of `spec`,
/// producing either per-modulus certificates or the violating modulus.
pub fn is_admissible(points: &[Point], spec: &VSpec) -> Result<AdmissibilityReport> {
    spec.validate()?;
    let mut set: Vec<Point> = points.to_vec();
    set.sort();
    set.dedup();
    for p in &set {
        if p.dim() != spec.dim() {
            return Err(Error::invalid("point dimension does not match spec"));
        }
    }
    let moduli = family_by_index(spec, set.len() as u64)?;
    let moduli_checked = moduli.len();
    let mut certificates = Vec::with_capacity(moduli_checked);
    for m in moduli {
        let profile = cosets_met(&set, &m)?;
        match profile.missed_example {
            Some(missed) => certificates.push(CosetCertificate {
                index: m.index,
                modulus: m,
                missed_coset: missed,
            }),
            None => {
                return Ok(AdmissibilityReport {
                    admissible: false,
                    cardinality: set.len(),
                    moduli_checked,
                    certificates: Vec::new(),
                    violator: Some(m),
                });
            }
        }
    }
    Ok(AdmissibilityReport {
        admissible: true,
        cardinality: set.len(),
        moduli_checked,
        certificates,
        violator: None,
    })
}

/// Lattice CRT over pairwise-coprime moduli; re-exported from the lattice
/// layer as the module-level operation.
pub fn crt(congruences: &[Congruence]) -> Result<(Point, ModulusLattice)> {
    crt_solve(congruences)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocateStrategy {
    /// Lexicographic scan over expanding ∞-norm shells.
    Scan,
    /// Solve the congruence system of the density proof first, then scan
    /// only the solution coset.
    CrtGuided,
}

#[derive(Clone, Debug)]
pub struct LocatorQuery {
    /// P: must land inside V.
    pub pattern: Vec<Point>,
    /// Q: must land outside V.
    pub forbidden: Vec<Point>,
    pub spec: VSpec,
    pub radius: i64,
    pub strategy: LocateStrategy,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum LocateOutcome {
    /// t with t+P ⊂ V and (t+Q) ∩ V = ∅, re-verified against a freshly
    /// sieved window.
    Found { t: Point, verified: bool },
    /// P is inadmissible, so no translate exists at any radius.
    Impossible { violator: ModulusLattice },
    /// Search radius exhausted; existence is still open.
    NotFound { radius: i64 },
}

fn validate_query(q: &LocatorQuery) -> Result<(Vec<Point>, Vec<Point>)> {
    q.spec.validate()?;
    let d = q.spec.dim();
    let mut pattern = q.pattern.clone();
    pattern.sort();
    pattern.dedup();
    let mut forbidden = q.forbidden.clone();
    forbidden.sort();
    forbidden.dedup();
    for p in pattern.iter().chain(forbidden.iter()) {
        if p.dim() != d {
            return Err(Error::invalid("pattern dimension does not match spec"));
        }
    }
    if pattern.iter().any(|p| forbidden.binary_search(p).is_ok()) {
        return Err(Error::invalid("P and Q must be disjoint"));
    }
    if q.radius < 0 {
        return Err(Error::invalid("search radius must be ≥ 0"));
    }
    Ok((pattern, forbidden))
}

fn locator_hit(spec: &VSpec, t: &Point, pattern: &[Point], forbidden: &[Point]) -> Result<bool> {
    for p in pattern {
        if !point_in_v(spec, &t.add(p))? {
            return Ok(false);
        }
    }
    for p in forbidden {
        if point_in_v(spec, &t.add(p))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Independent re-verification of a located t: sieve a fresh window around
/// t+P∪Q and test membership against the grid.
pub fn verify_locator(
    spec: &VSpec,
    t: &Point,
    pattern: &[Point],
    forbidden: &[Point],
) -> Result<bool> {
    let reach = pattern
        .iter()
        .chain(forbidden.iter())
        .map(|p| t.add(p).norm_inf())
        .max()
        .unwrap_or(t.norm_inf())
        .max(1);
    let window = BoxWindow::new(spec.dim(), reach)?;
    let grid = sieve_grid(spec, &window, 1)?;
    for p in pattern {
        if grid.contains(&t.add(p)) != Some(true) {
            return Ok(false);
        }
    }
    for p in forbidden {
        if grid.contains(&t.add(p)) != Some(false) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All points with ∞-norm exactly s, lexicographically ordered.
fn shell_points(dim: u8, s: i64) -> Vec<Point> {
    if s == 0 {
        return vec![Point::zero(dim)];
    }
    let mut out = Vec::new();
    match dim {
        1 => {
            out.push(Point::new(&[-s]).unwrap());
            out.push(Point::new(&[s]).unwrap());
        }
        2 => {
            for x in -s..=s {
                if x.abs() == s {
                    for y in -s..=s {
                        out.push(Point::xy(x, y));
                    }
                } else {
                    out.push(Point::xy(x, -s));
                    out.push(Point::xy(x, s));
                }
            }
        }
        3 => {
            for x in -s..=s {
                if x.abs() == s {
                    for y in -s..=s {
                        for z in -s..=s {
                            out.push(Point::new(&[x, y, z]).unwrap());
                        }
                    }
                } else {
                    for p in shell_points(2, s) {
                        out.push(Point::new(&[x, p.get(0), p.get(1)]).unwrap());
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    out
}

/// Finds the first t (by shell, then lexicographic order) with
/// t+P ⊂ V and (t+Q) ∩ V = ∅, or decides impossibility via admissibility
/// of P. Every returned t is re-verified against a fresh sieve.
pub fn find_locator(q: &LocatorQuery) -> Result<LocateOutcome> {
    let (pattern, forbidden) = validate_query(q)?;
    let report = is_admissible(&pattern, &q.spec)?;
    if !report.admissible {
        return Ok(LocateOutcome::Impossible { violator: report.violator.unwrap() });
    }
    match q.strategy {
        LocateStrategy::Scan => {
            for s in 0..=q.radius {
                for t in shell_points(q.spec.dim(), s) {
                    if locator_hit(&q.spec, &t, &pattern, &forbidden)? {
                        let verified = verify_locator(&q.spec, &t, &pattern, &forbidden)?;
                        if !verified {
                            return Err(Error::internal(format!(
                                "locator {t} failed re-verification"
                            )));
                        }
                        return Ok(LocateOutcome::Found { t, verified });
                    }
                }
            }
            Ok(LocateOutcome::NotFound { radius: q.radius })
        }
        LocateStrategy::CrtGuided => crt_guided_scan(q, &pattern, &forbidden),
    }
}

/// The congruence system from the positive-density proof: for every
/// modulus that could clash with P, force t into the complement of a
/// missed coset; for every q ∈ Q, force t+q into the zero coset of a
/// dedicated large modulus.
fn build_locator_congruences(
    spec: &VSpec,
    pattern: &[Point],
    forbidden: &[Point],
) -> Result<Vec<Congruence>> {
    let m = pattern.len() as u64;
    let s1 = locator_s1(spec, pattern)?;
    let mut congruences: Vec<Congruence> = Vec::new();
    let mut used: Vec<u64> = Vec::new();
    for lat in &s1 {
        let profile = cosets_met(pattern, lat)?;
        let missed = profile.missed_example.ok_or_else(|| {
            Error::domain("pattern inadmissible for a relevant modulus")
        })?;
        // t ≡ −p_b
        congruences.push((lat.reduce(&Point::zero(spec.dim()).sub(&missed)), lat.clone()));
        used.push(lat.index);
    }
    // distinct moduli b_q with the coset of q missed by P
    for qpt in forbidden {
        let mut size_limit = 64u64;
        let chosen = loop {
            let mut found = None;
            for lat in family_by_size(spec, size_limit)? {
                if lat.index <= m || used.contains(&lat.index) {
                    continue;
                }
                if s1.contains(&lat) {
                    continue;
                }
                let clash = pattern.iter().any(|p| lat.contains(&p.sub(qpt)));
                if !clash {
                    found = Some(lat);
                    break;
                }
            }
            if let Some(l) = found {
                break l;
            }
            size_limit *= 4;
            if size_limit > 1 << 40 {
                return Err(Error::resource("no usable modulus for a forbidden point"));
            }
        };
        used.push(chosen.index);
        congruences.push((chosen.reduce(&Point::zero(spec.dim()).sub(qpt)), chosen));
    }
    Ok(congruences)
}

/// S₁ of the proof: moduli where P collides with itself or is not small:
/// min(card(P mod b), index − 1) < |P|.
fn locator_s1(spec: &VSpec, pattern: &[Point]) -> Result<Vec<ModulusLattice>> {
    let m = pattern.len() as u64;
    if m == 0 {
        return Ok(Vec::new());
    }
    // a modulus can identify two pattern points only if it divides some
    // pairwise difference
    let mut diff_bound = 0u64;
    for (i, p) in pattern.iter().enumerate() {
        for q in &pattern[i + 1..] {
            let d = p.sub(q);
            let size = match spec {
                VSpec::KfreeRing { ring, k } => {
                    let n = d.as_quadint(*ring)?.abs_norm()?;
                    n.saturating_pow(*k)
                }
                _ => d
                    .coords()
                    .iter()
                    .filter(|c| **c != 0)
                    .map(|c| c.unsigned_abs())
                    .min()
                    .unwrap_or(0),
            };
            diff_bound = diff_bound.max(size);
        }
    }
    let size_bound = diff_bound.max(m);
    let mut out = Vec::new();
    for lat in family_by_size(spec, size_bound)? {
        let profile = cosets_met(pattern, &lat)?;
        if profile.met.min(lat.index - 1) < m {
            out.push(lat);
        }
    }
    Ok(out)
}

fn crt_guided_scan(
    q: &LocatorQuery,
    pattern: &[Point],
    forbidden: &[Point],
) -> Result<LocateOutcome> {
    let congruences = build_locator_congruences(&q.spec, pattern, forbidden)?;
    let (t0, lat) = if congruences.is_empty() {
        (Point::zero(q.spec.dim()), ModulusLattice::scalar(1, q.spec.dim())?)
    } else {
        crt_solve(&congruences)?
    };
    // scan the solution coset in doubling boxes; each batch is ordered by
    // (shell, lex) and every shell is complete once its box is
    let mut scanned = -1i64; // shells finished so far
    let mut box_r = 1i64;
    loop {
        let r = box_r.min(q.radius);
        let mut batch: Vec<(i64, Point)> = Vec::new();
        lat.for_each_in_box(&t0, r, |p| {
            let s = p.norm_inf();
            if s > scanned {
                batch.push((s, p));
            }
        });
        batch.sort();
        for (_, t) in batch {
            if locator_hit(&q.spec, &t, pattern, forbidden)? {
                let verified = verify_locator(&q.spec, &t, pattern, forbidden)?;
                if !verified {
                    return Err(Error::internal(format!("locator {t} failed re-verification")));
                }
                return Ok(LocateOutcome::Found { t, verified });
            }
        }
        if r >= q.radius {
            return Ok(LocateOutcome::NotFound { radius: q.radius });
        }
        scanned = r;
        box_r *= 2;
    }
}

/// The truncated density lower bound c^{−d}·Π_{b ∈ R_n} (1 − |P|/index_b)
/// from the positive-density proof, over relevant moduli of size ≤ n.
/// Monotone non-increasing in n.
pub fn locator_density_bound(pattern: &[Point], spec: &VSpec, truncation: u64) -> Result<f64> {
    spec.validate()?;
    if !spec.is_erdos() {
        return Err(Error::domain("density bound needs an Erdős family"));
    }
    let mut set: Vec<Point> = pattern.to_vec();
    set.sort();
    set.dedup();
    let report = is_admissible(&set, spec)?;
    if !report.admissible {
        return Err(Error::domain("pattern is inadmissible; the locator set is empty"));
    }
    let m = set.len() as u64;
    let s1 = locator_s1(spec, &set)?;
    let mut bound = 1.0f64;
    for lat in &s1 {
        bound /= lat.index as f64;
    }
    for lat in family_by_size(spec, truncation)? {
        if s1.contains(&lat) {
            continue;
        }
        bound *= 1.0 - m as f64 / lat.index as f64;
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{QuadInt, RingId};

    fn pts(raw: &[(i64, i64)]) -> Vec<Point> {
        raw.iter().map(|&(x, y)| Point::xy(x, y)).collect()
    }

    #[test]
    fn cosets_met_examples() {
        let m2 = ModulusLattice::scalar(2, 2).unwrap();
        let single = cosets_met(&pts(&[(0, 0)]), &m2).unwrap();
        assert_eq!(single.met, 1);
        assert_eq!(single.missed_example, Some(Point::xy(0, 1)));

        let full = cosets_met(&pts(&[(0, 0), (0, 1), (1, 0), (1, 1)]), &m2).unwrap();
        assert_eq!(full.met, 4);
        assert!(full.missed_example.is_none());

        // (1+i)² spans the same lattice as 2Z[i]
        let ram = QuadInt::raw(RingId::Gauss, 1, 1);
        let ideal = ModulusLattice::ideal(&ram, 2).unwrap();
        let two = cosets_met(&pts(&[(0, 0), (1, 1)]), &ideal).unwrap();
        assert_eq!(two.met, 2);
        assert_eq!(ideal.index, 4);
    }

    #[test]
    fn unit_square_admissibility() {
        let spec = VSpec::Visible { d: 2 };
        let square = pts(&[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let report = is_admissible(&square, &spec).unwrap();
        assert!(!report.admissible);
        let violator = report.violator.unwrap();
        assert_eq!(violator.index, 4);

        // all 16 subsets: exactly the full square is inadmissible
        let mut admissible_count = 0;
        for mask in 0u32..16 {
            let subset: Vec<Point> = square
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| *p)
                .collect();
            if is_admissible(&subset, &spec).unwrap().admissible {
                admissible_count += 1;
            }
        }
        assert_eq!(admissible_count, 15);

        let empty = is_admissible(&[], &spec).unwrap();
        assert!(empty.admissible);
        assert_eq!(empty.moduli_checked, 0);
    }

    #[test]
    fn hereditary_under_subsets() {
        let spec = VSpec::KfreeRing { ring: RingId::Gauss, k: 2 };
        let base = pts(&[(1, 0), (2, 1), (3, 2), (-1, 4), (5, 5), (0, 7)]);
        assert!(is_admissible(&base, &spec).unwrap().admissible);
        for mask in 0u32..64 {
            let subset: Vec<Point> = base
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, p)| *p)
                .collect();
            assert!(is_admissible(&subset, &spec).unwrap().admissible, "mask {mask}");
        }
    }

    #[test]
    fn finite_sufficiency() {
        // checking extra moduli with index > |U| never changes the verdict
        let spec = VSpec::Visible { d: 2 };
        let set = pts(&[(0, 0), (1, 2), (2, 1)]);
        let report = is_admissible(&set, &spec).unwrap();
        assert!(report.admissible);
        for lat in family_by_index(&spec, 1000).unwrap() {
            if lat.index > set.len() as u64 {
                let profile = cosets_met(&set, &lat).unwrap();
                assert!(profile.missed_example.is_some());
            }
        }
    }

    #[test]
    fn locator_scan_examples() {
        // P = {(0,0)}: first visible translate in (shell, lex) order
        let q = LocatorQuery {
            pattern: pts(&[(0, 0)]),
            forbidden: vec![],
            spec: VSpec::Visible { d: 2 },
            radius: 5,
            strategy: LocateStrategy::Scan,
        };
        match find_locator(&q).unwrap() {
            LocateOutcome::Found { t, verified } => {
                assert!(verified);
                assert_eq!(t, Point::xy(-1, -1));
            }
            other => panic!("expected Found, got {other:?}"),
        }

        // the full unit square is impossible
        let q2 = LocatorQuery {
            pattern: pts(&[(0, 0), (0, 1), (1, 0), (1, 1)]),
            forbidden: vec![],
            spec: VSpec::Visible { d: 2 },
            radius: 100,
            strategy: LocateStrategy::Scan,
        };
        assert!(matches!(find_locator(&q2).unwrap(), LocateOutcome::Impossible { .. }));

        // Q = unit square with empty P: a t with no visible point on t+Q
        let q3 = LocatorQuery {
            pattern: vec![],
            forbidden: pts(&[(0, 0), (0, 1), (1, 0), (1, 1)]),
            spec: VSpec::Visible { d: 2 },
            radius: 100,
            strategy: LocateStrategy::Scan,
        };
        match find_locator(&q3).unwrap() {
            LocateOutcome::Found { t, verified } => {
                assert!(verified);
                for dq in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let moved = t.add(&Point::xy(dq.0, dq.1));
                    assert!(!point_in_v(&q3.spec, &moved).unwrap());
                }
            }
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn crt_guided_agrees_with_direct_verification() {
        let q = LocatorQuery {
            pattern: pts(&[(0, 0), (1, 1)]),
            forbidden: pts(&[(0, 1)]),
            spec: VSpec::Visible { d: 2 },
            radius: 400,
            strategy: LocateStrategy::CrtGuided,
        };
        match find_locator(&q).unwrap() {
            LocateOutcome::Found { t, verified } => {
                assert!(verified);
                assert!(locator_hit(&q.spec, &t, &q.pattern, &q.forbidden).unwrap());
            }
            other => panic!("expected Found, got {other:?}"),
        }
    }

    #[test]
    fn disjointness_enforced() {
        let q = LocatorQuery {
            pattern: pts(&[(0, 0)]),
            forbidden: pts(&[(0, 0)]),
            spec: VSpec::Visible { d: 2 },
            radius: 5,
            strategy: LocateStrategy::Scan,
        };
        assert!(find_locator(&q).is_err());
    }

    #[test]
    fn density_bound_examples() {
        let spec = VSpec::Visible { d: 2 };
        // singleton P at truncation 2: the only factor is 1 − 1/4
        let b = locator_density_bound(&pts(&[(0, 0)]), &spec, 2).unwrap();
        assert!((b - 0.75).abs() < 1e-15);
        // empty pattern: empty product
        let e = locator_density_bound(&[], &spec, 100).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
        // monotone non-increasing in the truncation
        let b10 = locator_density_bound(&pts(&[(0, 0)]), &spec, 10).unwrap();
        let b100 = locator_density_bound(&pts(&[(0, 0)]), &spec, 100).unwrap();
        assert!(b10 >= b100);
        // inadmissible pattern is a domain error
        let square = pts(&[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert!(locator_density_bound(&square, &spec, 10).is_err());
    }

    #[test]
    fn shell_enumeration_is_lex_and_complete() {
        let s2 = shell_points(2, 2);
        assert_eq!(s2.len(), 16);
        let mut sorted = s2.clone();
        sorted.sort();
        assert_eq!(s2, sorted);
        assert!(s2.iter().all(|p| p.norm_inf() == 2));
        assert_eq!(shell_points(3, 1).len(), 26);
        assert_eq!(
            shell_points(1, 3),
            vec![Point::new(&[-3]).unwrap(), Point::new(&[3]).unwrap()]
        );
    }
}
