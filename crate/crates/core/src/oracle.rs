//! Ground truth by exhaustive enumeration, and the sweep harness that
//! recomputes every closed form against it.
//!
//! The scan engine steps the Dickson recurrence once per index across the
//! whole field at a time, so a full (a, n) grid costs O(q) field operations
//! per point instead of O(q log n).

use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::closed_form::{self, ResidueSumResult};
use crate::dickson::{dickson_eval_fast, DicksonParams};
use crate::error::{Error, Result};
use crate::ff::{make_extension, make_field, ExtCtx, FieldCtx, FieldElem};
use crate::numbers::as_prime_power;
use crate::partition::{self, ClassBreakdown, ClassLabel};

/// A distinct-value set: the image in canonical order, its cardinality, and
/// the sum of its elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageReport {
    pub image: Vec<FieldElem>,
    pub size: u64,
    pub sum: FieldElem,
}

/// Reusable bitset over element indices.
struct DistinctSet {
    words: Vec<u64>,
    members: Vec<u32>,
}

impl DistinctSet {
    fn new(universe: usize) -> Self {
        DistinctSet { words: vec![0; universe.div_ceil(64)], members: Vec::with_capacity(universe) }
    }

    fn clear(&mut self) {
        self.words.fill(0);
        self.members.clear();
    }

    fn insert(&mut self, idx: u32) {
        let (w, b) = ((idx / 64) as usize, idx % 64);
        if self.words[w] >> b & 1 == 0 {
            self.words[w] |= 1 << b;
            self.members.push(idx);
        }
    }

    fn contains(&self, idx: u32) -> bool {
        self.words[(idx / 64) as usize] >> (idx % 64) & 1 == 1
    }
}

fn finalize(ctx: &FieldCtx, members: &[u32]) -> ImageReport {
    let mut image: Vec<FieldElem> = members.iter().map(|&i| ctx.elem(i)).collect();
    ctx.sort_canonical(&mut image);
    let sum = members.iter().fold(0u32, |acc, &i| ctx.add_idx(acc, i));
    ImageReport { size: image.len() as u64, image, sum: ctx.elem(sum) }
}

/// Image of an arbitrary map on F_q by full enumeration.
pub fn brute_image(ctx: &FieldCtx, mut f: impl FnMut(FieldElem) -> FieldElem) -> ImageReport {
    let mut set = DistinctSet::new(ctx.q() as usize);
    for x in ctx.elements() {
        let y = f(x);
        ctx.expect_member(y);
        set.insert(y.idx());
    }
    finalize(ctx, &set.members)
}

/// Steps the recurrence `next = x·cur + mul·prev` across all of F_q at once,
/// calling `visit(n, values)` for n = 0..=n_max. `init0`/`init1` give the
/// value arrays at n = 0 and n = 1.
fn scan_recurrence(
    ctx: &FieldCtx,
    mul_idx: u32,
    init0: Vec<u32>,
    init1: Vec<u32>,
    n_max: u64,
    mut visit: impl FnMut(u64, &[u32]),
) {
    let q = ctx.q() as usize;
    let mut prev = init0;
    let mut cur = init1;
    visit(0, &prev);
    if n_max == 0 {
        return;
    }
    visit(1, &cur);
    for n in 2..=n_max {
        for x in 0..q {
            let next = ctx.add_idx(
                ctx.mul_idx(x as u32, cur[x]),
                ctx.mul_idx(mul_idx, prev[x]),
            );
            prev[x] = next;
        }
        std::mem::swap(&mut prev, &mut cur);
        visit(n, &cur);
    }
}

/// Visits `(n, D_n(x, a) for all x)` for n = 0..=n_max.
fn scan_dickson(ctx: &FieldCtx, a: FieldElem, n_max: u64, visit: impl FnMut(u64, &[u32])) {
    let q = ctx.q() as usize;
    let two = ctx.from_int(2).idx();
    let init0 = vec![two; q];
    let init1: Vec<u32> = (0..q as u32).collect();
    let neg_a = ctx.neg(a).idx();
    scan_recurrence(ctx, neg_a, init0, init1, n_max, visit);
}

/// Per-class images, sums, and overlaps for one (n, a) by enumeration, with
/// the inclusion-exclusion total checked against the plain brute-force sum.
pub fn brute_breakdown(ext: &ExtCtx, n: u64, a: FieldElem) -> Result<ClassBreakdown> {
    let base = ext.base();
    base.expect_member(a);
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    let q = base.q() as usize;
    let mut sets = [
        DistinctSet::new(q),
        DistinctSet::new(q),
        DistinctSet::new(q),
    ];
    for x in base.elements() {
        let label = partition::classify(base, x, a)?;
        let value = dickson_eval_fast(base, DicksonParams::new(n, a), x);
        let slot = match label {
            ClassLabel::Hyperbolic => 0,
            ClassLabel::Elliptic => 1,
            ClassLabel::Parabolic => 2,
        };
        sets[slot].insert(value.idx());
    }
    let breakdown = breakdown_from_sets(base, &sets[0], &sets[1], &sets[2]);
    let full = brute_image(base, |x| dickson_eval_fast(base, DicksonParams::new(n, a), x));
    assert_eq!(
        breakdown.total, full.sum,
        "inclusion-exclusion total must reproduce the brute-force sum"
    );
    Ok(breakdown)
}

fn breakdown_from_sets(
    ctx: &FieldCtx,
    h: &DistinctSet,
    e: &DistinctSet,
    p: &DistinctSet,
) -> ClassBreakdown {
    let canonical = |set: &DistinctSet| {
        let mut v: Vec<FieldElem> = set.members.iter().map(|&i| ctx.elem(i)).collect();
        ctx.sort_canonical(&mut v);
        v
    };
    let sum_of = |members: &[u32]| ctx.elem(members.iter().fold(0, |acc, &i| ctx.add_idx(acc, i)));
    let intersect2 = |a: &DistinctSet, b: &DistinctSet| {
        let mut v: Vec<FieldElem> = a
            .members
            .iter()
            .filter(|&&i| b.contains(i))
            .map(|&i| ctx.elem(i))
            .collect();
        ctx.sort_canonical(&mut v);
        v
    };
    let intersect3 = |a: &DistinctSet, b: &DistinctSet, c: &DistinctSet| {
        let mut v: Vec<FieldElem> = a
            .members
            .iter()
            .filter(|&&i| b.contains(i) && c.contains(i))
            .map(|&i| ctx.elem(i))
            .collect();
        ctx.sort_canonical(&mut v);
        v
    };
    let breakdown = ClassBreakdown {
        image_h: canonical(h),
        image_e: canonical(e),
        image_p: canonical(p),
        sum_h: sum_of(&h.members),
        sum_e: sum_of(&e.members),
        sum_p: sum_of(&p.members),
        he: intersect2(h, e),
        hp: intersect2(h, p),
        ep: intersect2(e, p),
        hep: intersect3(h, e, p),
        total: ctx.zero(),
    };
    let total = breakdown.inclusion_exclusion_total(ctx);
    ClassBreakdown { total, ..breakdown }
}

/// Which family of comparisons a mismatch came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckKind {
    ResidueSum,
    Membership,
    ImageSize,
    HyperbolicImage,
    HyperbolicSum,
    HyperbolicSize,
    EllipticImage,
    EllipticSum,
    EllipticSize,
    ParabolicImage,
    OverlapHE,
    OverlapHP,
    OverlapEP,
    OverlapHEP,
    InclusionExclusion,
}

impl CheckKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::ResidueSum => "residue_sum",
            CheckKind::Membership => "membership",
            CheckKind::ImageSize => "image_size",
            CheckKind::HyperbolicImage => "hyperbolic_image",
            CheckKind::HyperbolicSum => "hyperbolic_sum",
            CheckKind::HyperbolicSize => "hyperbolic_size",
            CheckKind::EllipticImage => "elliptic_image",
            CheckKind::EllipticSum => "elliptic_sum",
            CheckKind::EllipticSize => "elliptic_size",
            CheckKind::ParabolicImage => "parabolic_image",
            CheckKind::OverlapHE => "overlap_he",
            CheckKind::OverlapHP => "overlap_hp",
            CheckKind::OverlapEP => "overlap_ep",
            CheckKind::OverlapHEP => "overlap_hep",
            CheckKind::InclusionExclusion => "inclusion_exclusion",
        }
    }
}

/// A single disagreement between a closed form and the oracle, with enough
/// context to replay it.
#[derive(Clone, Debug)]
pub struct Mismatch {
    pub q: u64,
    pub a: String,
    pub n: u64,
    pub check: CheckKind,
    pub closed: String,
    pub oracle: String,
    pub trace: Option<String>,
}

/// How many checks of each family ran.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CheckCounts {
    pub residue_sum: u64,
    pub membership: u64,
    pub image_size: u64,
    pub per_class: u64,
}

/// Whether the per-class comparisons run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassChecks {
    /// On for q ≤ 27, off above.
    Auto,
    On,
    Off,
}

/// Random subsampling of (a, n) pairs for large fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sample {
    pub pairs_per_field: usize,
    pub seed: u64,
}

/// A verification grid: which fields, how far in n, whether to subsample,
/// and whether to run the per-class comparisons.
#[derive(Clone, Debug)]
pub struct SweepGrid {
    pub fields: Vec<(u64, u32)>,
    /// Per-field cap on n; defaults to q² - 1.
    pub n_max: Option<u64>,
    pub sample: Option<Sample>,
    pub class_checks: ClassChecks,
}

impl SweepGrid {
    /// The default desk-scale grid: q in {3, 5, 7, 9, 11, 13, 25, 27, 49},
    /// every nonzero a, n from 0 through q² - 1.
    pub fn full() -> SweepGrid {
        SweepGrid {
            fields: vec![(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2), (3, 3), (7, 2)],
            n_max: None,
            sample: None,
            class_checks: ClassChecks::Auto,
        }
    }

    /// Grid over explicit prime-power orders. Even or non-prime-power orders
    /// are rejected.
    pub fn for_q_values(qs: &[u64]) -> Result<SweepGrid> {
        let mut fields = Vec::new();
        for &q in qs {
            let (p, k) = as_prime_power(q).ok_or(Error::NotPrime(q))?;
            if p == 2 {
                return Err(Error::NotOdd(q));
            }
            fields.push((p, k));
        }
        Ok(SweepGrid { fields, ..SweepGrid::full() })
    }
}

/// Outcome of a sweep: the grid that ran, per-check counts, all mismatches
/// (empty means every closed form agreed with the oracle), and wall time.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub grid: SweepGrid,
    pub counts: CheckCounts,
    pub mismatches: Vec<Mismatch>,
    pub elapsed: Duration,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// The closed forms under test; swapped out in the harness self-test.
struct Forms {
    sum: fn(&FieldCtx, u64, FieldElem) -> ResidueSumResult,
    size: fn(&FieldCtx, u64, FieldElem) -> Result<u64>,
}

const STANDARD_FORMS: Forms = Forms { sum: closed_form::residue_sum, size: closed_form::image_size };

/// Runs every enabled comparison over the grid. Exact equality everywhere;
/// any disagreement lands in the mismatch list with a witness.
pub fn verify_sweep(grid: &SweepGrid) -> Result<SweepReport> {
    run_sweep(grid, &STANDARD_FORMS)
}

fn run_sweep(grid: &SweepGrid, forms: &Forms) -> Result<SweepReport> {
    let start = Instant::now();
    let mut counts = CheckCounts::default();
    let mut mismatches = Vec::new();
    for &(p, k) in &grid.fields {
        let ctx = make_field(p, k)?;
        let q = ctx.q();
        let per_class = match grid.class_checks {
            ClassChecks::Auto => q <= 27,
            ClassChecks::On => true,
            ClassChecks::Off => false,
        };
        let ext = if per_class { Some(make_extension(&ctx)?) } else { None };
        let ctx = ext.as_ref().map_or(&ctx, |e| e.base());
        let n_max = grid.n_max.unwrap_or(q * q - 1);
        match grid.sample {
            None => {
                for a in ctx.nonzero_elements() {
                    sweep_full(ctx, ext.as_ref(), a, n_max, forms, &mut counts, &mut mismatches)?;
                }
            }
            Some(sample) => {
                let mut rng = ChaCha8Rng::seed_from_u64(sample.seed);
                for _ in 0..sample.pairs_per_field {
                    let a = ctx.elem(rng.gen_range(1..q) as u32);
                    let n = rng.gen_range(0..=n_max);
                    sweep_point_sampled(ctx, ext.as_ref(), a, n, forms, &mut counts, &mut mismatches)?;
                }
            }
        }
    }
    mismatches.sort_by(|x, y| {
        (x.q, &x.a, x.n, x.check).cmp(&(y.q, &y.a, y.n, y.check))
    });
    Ok(SweepReport { grid: grid.clone(), counts, mismatches, elapsed: start.elapsed() })
}

/// All point checks against a precomputed oracle image for one (a, n).
#[allow(clippy::too_many_arguments)]
fn check_point(
    ctx: &FieldCtx,
    a: FieldElem,
    n: u64,
    oracle_sum: u32,
    oracle_size: u64,
    forms: &Forms,
    counts: &mut CheckCounts,
    mismatches: &mut Vec<Mismatch>,
) -> Result<()> {
    let q = ctx.q();
    let witness = |check: CheckKind, closed: String, oracle: String, trace: Option<String>| {
        Mismatch { q, a: ctx.render(a), n, check, closed, oracle, trace }
    };

    let closed = (forms.sum)(ctx, n, a);
    counts.residue_sum += 1;
    if closed.value.idx() != oracle_sum {
        mismatches.push(witness(
            CheckKind::ResidueSum,
            ctx.render(closed.value),
            ctx.render(ctx.elem(oracle_sum)),
            Some(closed.trace.render(ctx)),
        ));
    }

    counts.membership += 1;
    let half = ctx.powu(a, n / 2);
    let two_half = ctx.mul(ctx.from_int(2), half).expect("same context");
    let allowed =
        [ctx.zero(), half, ctx.neg(half), two_half, ctx.neg(two_half)];
    if !allowed.contains(&closed.value) {
        mismatches.push(witness(
            CheckKind::Membership,
            ctx.render(closed.value),
            "one of {0, ±a^(n/2), ±2a^(n/2)}".to_string(),
            Some(closed.trace.render(ctx)),
        ));
    }

    if n % 2 == 0 {
        counts.image_size += 1;
        let closed_size = (forms.size)(ctx, n, a)?;
        if closed_size != oracle_size {
            mismatches.push(witness(
                CheckKind::ImageSize,
                closed_size.to_string(),
                oracle_size.to_string(),
                None,
            ));
        }
    }
    Ok(())
}

/// Per-class comparisons for one even (a, n): closed images,
/// sums, overlaps, and the inclusion-exclusion assembly.
fn check_per_class(
    ext: &ExtCtx,
    a: FieldElem,
    n: u64,
    breakdown: &ClassBreakdown,
    oracle_sum: u32,
    counts: &mut CheckCounts,
    mismatches: &mut Vec<Mismatch>,
) -> Result<()> {
    let ctx = ext.base();
    let q = ctx.q();
    counts.per_class += 1;
    let witness = |check: CheckKind, closed: String, oracle: String| Mismatch {
        q,
        a: ctx.render(a),
        n,
        check,
        closed,
        oracle,
        trace: None,
    };
    let render_set = |set: &[FieldElem]| {
        let inner: Vec<String> = set.iter().map(|&v| ctx.render(v)).collect();
        format!("{{{}}}", inner.join(", "))
    };
    let mut compare_set = |kind: CheckKind, closed: &[FieldElem], oracle: &[FieldElem]| {
        if closed != oracle {
            mismatches.push(witness(kind, render_set(closed), render_set(oracle)));
        }
    };

    let closed_h = partition::hyperbolic_image_closed(ext, n, a)?;
    compare_set(CheckKind::HyperbolicImage, &closed_h, &breakdown.image_h);
    let closed_e = partition::elliptic_image_closed(ext, n, a)?;
    compare_set(CheckKind::EllipticImage, &closed_e, &breakdown.image_e);

    // parabolic image: {2a^(n/2)} for a residue, empty otherwise
    let two_half = ctx.mul(ctx.from_int(2), ctx.powu(a, n / 2)).expect("same context");
    let closed_p: Vec<FieldElem> =
        if ctx.quadratic_character(a) == 1 { vec![two_half] } else { Vec::new() };
    compare_set(CheckKind::ParabolicImage, &closed_p, &breakdown.image_p);

    let overlaps = partition::overlap_closed(ext, n, a)?;
    compare_set(CheckKind::OverlapHE, &overlaps.he, &breakdown.he);
    compare_set(CheckKind::OverlapHP, &overlaps.hp, &breakdown.hp);
    compare_set(CheckKind::OverlapEP, &overlaps.ep, &breakdown.ep);
    compare_set(CheckKind::OverlapHEP, &overlaps.hep, &breakdown.hep);

    let closed_sum_h = partition::hyperbolic_sum_closed(ctx, n, a)?;
    if closed_sum_h != breakdown.sum_h {
        mismatches.push(witness(
            CheckKind::HyperbolicSum,
            ctx.render(closed_sum_h),
            ctx.render(breakdown.sum_h),
        ));
    }
    let closed_sum_e = partition::elliptic_sum_closed(ctx, n, a)?;
    if closed_sum_e != breakdown.sum_e {
        mismatches.push(witness(
            CheckKind::EllipticSum,
            ctx.render(closed_sum_e),
            ctx.render(breakdown.sum_e),
        ));
    }

    // size corollaries: floor((q∓1)/2d) plus the extremal-value correction
    let size_h = partition::hyperbolic_image_size(ctx, n, a)?;
    if size_h != breakdown.image_h.len() as u64 {
        mismatches.push(witness(
            CheckKind::HyperbolicSize,
            size_h.to_string(),
            breakdown.image_h.len().to_string(),
        ));
    }
    let size_e = partition::elliptic_image_size(ctx, n, a)?;
    if size_e != breakdown.image_e.len() as u64 {
        mismatches.push(witness(
            CheckKind::EllipticSize,
            size_e.to_string(),
            breakdown.image_e.len().to_string(),
        ));
    }

    // assemble the total from the closed per-class pieces and compare with
    // the enumerated sum: Σ_H + Σ_E + Σ_P - Σ_HE - Σ_HP - Σ_EP + Σ_HEP
    let sum_of = |set: &[FieldElem]| set.iter().fold(0u32, |acc, v| ctx.add_idx(acc, v.idx()));
    let closed_sum_p = sum_of(&closed_p);
    let mut assembled = ctx.add_idx(closed_sum_h.idx(), closed_sum_e.idx());
    assembled = ctx.add_idx(assembled, closed_sum_p);
    for set in [&overlaps.he, &overlaps.hp, &overlaps.ep] {
        assembled = ctx.sub_idx(assembled, sum_of(set));
    }
    assembled = ctx.add_idx(assembled, sum_of(&overlaps.hep));
    if assembled != oracle_sum {
        mismatches.push(witness(
            CheckKind::InclusionExclusion,
            ctx.render(ctx.elem(assembled)),
            ctx.render(ctx.elem(oracle_sum)),
        ));
    }
    Ok(())
}

fn sweep_full(
    ctx: &FieldCtx,
    ext: Option<&ExtCtx>,
    a: FieldElem,
    n_max: u64,
    forms: &Forms,
    counts: &mut CheckCounts,
    mismatches: &mut Vec<Mismatch>,
) -> Result<()> {
    let q = ctx.q() as usize;
    let labels: Option<Vec<usize>> = ext.map(|_| {
        ctx.elements()
            .map(|x| match partition::classify(ctx, x, a).expect("a is nonzero") {
                ClassLabel::Hyperbolic => 0,
                ClassLabel::Elliptic => 1,
                ClassLabel::Parabolic => 2,
            })
            .collect()
    });
    let mut whole = DistinctSet::new(q);
    let mut classed =
        [DistinctSet::new(q), DistinctSet::new(q), DistinctSet::new(q)];
    let mut deferred: Result<()> = Ok(());
    scan_dickson(ctx, a, n_max, |n, values| {
        if deferred.is_err() {
            return;
        }
        whole.clear();
        for &v in values {
            whole.insert(v);
        }
        let oracle_sum = whole.members.iter().fold(0u32, |acc, &i| ctx.add_idx(acc, i));
        let oracle_size = whole.members.len() as u64;
        deferred =
            check_point(ctx, a, n, oracle_sum, oracle_size, forms, counts, mismatches);
        if deferred.is_err() {
            return;
        }
        if let (Some(ext), Some(labels)) = (ext, labels.as_ref()) {
            if n % 2 == 0 {
                for set in classed.iter_mut() {
                    set.clear();
                }
                for (x, &v) in values.iter().enumerate() {
                    classed[labels[x]].insert(v);
                }
                let breakdown = breakdown_from_sets(ctx, &classed[0], &classed[1], &classed[2]);
                deferred =
                    check_per_class(ext, a, n, &breakdown, oracle_sum, counts, mismatches);
            }
        }
    });
    deferred
}

fn sweep_point_sampled(
    ctx: &FieldCtx,
    ext: Option<&ExtCtx>,
    a: FieldElem,
    n: u64,
    forms: &Forms,
    counts: &mut CheckCounts,
    mismatches: &mut Vec<Mismatch>,
) -> Result<()> {
    let report = brute_image(ctx, |x| dickson_eval_fast(ctx, DicksonParams::new(n, a), x));
    check_point(ctx, a, n, report.sum.idx(), report.size, forms, counts, mismatches)?;
    if let Some(ext) = ext {
        if n % 2 == 0 {
            let breakdown = brute_breakdown(ext, n, a)?;
            check_per_class(ext, a, n, &breakdown, report.sum.idx(), counts, mismatches)?;
        }
    }
    Ok(())
}

/// Residue sums of the Fibonacci polynomials F_1..F_n_max by enumeration.
/// Even indices are odd polynomials, so their sums must vanish; the function
/// checks that and reports the odd-index table the way the survey prints it.
#[derive(Clone, Debug)]
pub struct FibonacciSurvey {
    /// (n, S_q(F_n)) for odd n.
    pub odd_rows: Vec<(u64, FieldElem)>,
    /// S_q(F_n) for every n starting at 1.
    pub sums: Vec<FieldElem>,
}

pub fn fibonacci_survey(ctx: &FieldCtx, n_max: u64) -> FibonacciSurvey {
    let q = ctx.q() as usize;
    let mut sums = Vec::new();
    let mut odd_rows = Vec::new();
    if n_max == 0 {
        return FibonacciSurvey { odd_rows, sums };
    }
    let init1 = vec![1u32; q]; // F_1 = 1
    let init2: Vec<u32> = (0..q as u32).collect(); // F_2 = x
    let mut set = DistinctSet::new(q);
    // reuse the dickson scanner shifted by one: visit(n) sees F_{n+1}
    scan_recurrence(ctx, 1, init1, init2, n_max - 1, |shifted, values| {
        let n = shifted + 1;
        set.clear();
        for &v in values {
            set.insert(v);
        }
        let sum = ctx.elem(set.members.iter().fold(0, |acc, &i| ctx.add_idx(acc, i)));
        if n % 2 == 0 {
            assert!(sum.is_zero(), "S_q(F_{n}) must vanish for even n");
        } else {
            odd_rows.push((n, sum));
        }
        sums.push(sum);
    });
    FibonacciSurvey { odd_rows, sums }
}

/// Residue sums S_q(P_n) of the generalized polynomials for n = 0..=n_max.
/// For A = B = 1 the sums are asserted to lie in {-C/2, 0, C/2, C}.
pub fn generalized_survey(
    ctx: &FieldCtx,
    a: i64,
    b: i64,
    c: i64,
    n_max: u64,
) -> Result<Vec<(u64, FieldElem)>> {
    if c % 2 != 0 {
        return Err(Error::OddC(c));
    }
    let q = ctx.q() as usize;
    let a_elem = ctx.from_int(a);
    let init0 = vec![ctx.from_int(c).idx(); q];
    let init1: Vec<u32> = (0..q as u32)
        .map(|x| ctx.mul_idx(ctx.mul_idx(a_elem.idx(), ctx.from_int(c / 2).idx()), x))
        .collect();
    let membership: Option<[FieldElem; 4]> = (a == 1 && b == 1).then(|| {
        [
            ctx.neg(ctx.from_int(c / 2)),
            ctx.zero(),
            ctx.from_int(c / 2),
            ctx.from_int(c),
        ]
    });
    let mut rows = Vec::new();
    let mut set = DistinctSet::new(q);
    // recurrence P_next = A·x·P_cur + B·P_prev: fold A into the x weight by
    // scanning with per-x multiplier; scan_recurrence multiplies by raw x, so
    // apply A by rescaling x up front only when A ≠ 1
    let mut prev = init0;
    let mut cur = init1;
    let b_idx = ctx.from_int(b).idx();
    let ax: Vec<u32> = (0..q as u32).map(|x| ctx.mul_idx(a_elem.idx(), x)).collect();
    let mut record = |n: u64, values: &[u32], set: &mut DistinctSet| {
        set.clear();
        for &v in values {
            set.insert(v);
        }
        let sum = ctx.elem(set.members.iter().fold(0, |acc, &i| ctx.add_idx(acc, i)));
        if let Some(allowed) = &membership {
            assert!(
                allowed.contains(&sum),
                "S_q(P_{n}) = {} outside {{-C/2, 0, C/2, C}}",
                ctx.render(sum)
            );
        }
        rows.push((n, sum));
    };
    record(0, &prev, &mut set);
    if n_max >= 1 {
        record(1, &cur, &mut set);
        for n in 2..=n_max {
            for x in 0..q {
                let next = ctx.add_idx(ctx.mul_idx(ax[x], cur[x]), ctx.mul_idx(b_idx, prev[x]));
                prev[x] = next;
            }
            std::mem::swap(&mut prev, &mut cur);
            record(n, &cur, &mut set);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dickson::lucas_eval;

    fn f7() -> FieldCtx {
        make_field(7, 1).unwrap()
    }

    #[test]
    fn brute_image_examples() {
        let ctx = f7();
        // constant D_0 = 2
        let d0 = brute_image(&ctx, |_| ctx.from_int(2));
        assert_eq!((d0.size, d0.sum), (1, ctx.from_int(2)));

        // L_6 over F_7: image {2, 3, 4}, sum 2
        let l6 = brute_image(&ctx, |x| lucas_eval(&ctx, 6, x));
        let mut expected = vec![ctx.from_int(2), ctx.from_int(3), ctx.from_int(4)];
        ctx.sort_canonical(&mut expected);
        assert_eq!(l6.image, expected);
        assert_eq!(l6.sum, ctx.from_int(2));

        // Gauss: squares sum to zero
        let squares = brute_image(&ctx, |x| ctx.mul(x, x).unwrap());
        assert_eq!(squares.sum, ctx.zero());
    }

    #[test]
    fn odd_indices_sum_to_zero_and_zero_parameter_counts_powers() {
        for (p, k) in [(5, 1), (7, 1), (3, 2)] {
            let ctx = make_field(p, k).unwrap();
            let q = ctx.q();
            for n in 1..=(2 * q) {
                for a in ctx.elements() {
                    let report =
                        brute_image(&ctx, |x| dickson_eval_fast(&ctx, DicksonParams::new(n, a), x));
                    if n % 2 == 1 {
                        assert!(report.sum.is_zero());
                    }
                    if a.is_zero() {
                        let expected =
                            if n % (q - 1) == 0 { ctx.one() } else { ctx.zero() };
                        assert_eq!(report.sum, expected, "n = {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn breakdown_examples() {
        let ext = make_extension(&f7()).unwrap();
        let base = ext.base();
        let a = base.from_int(-1);
        let b = brute_breakdown(&ext, 6, a).unwrap();
        // closed-form values at q=7, a=-1, n=6
        assert_eq!(b.sum_h, base.from_int(2));
        assert_eq!(b.sum_e, base.zero());
        assert!(b.image_p.is_empty() && b.hp.is_empty() && b.ep.is_empty() && b.hep.is_empty());
        assert_eq!(b.total, base.from_int(2));

        // non-residue parameter keeps every parabolic overlap empty
        for n in (2..=20u64).step_by(2) {
            let b = brute_breakdown(&ext, n, a).unwrap();
            assert!(b.image_p.is_empty());
            assert!(b.hp.is_empty() && b.ep.is_empty() && b.hep.is_empty());
            // hyperbolic-elliptic overlap is confined to ±2a^(n/2)
            let half = base.powu(a, n / 2);
            let two_half = base.mul(base.from_int(2), half).unwrap();
            for v in &b.he {
                assert!(*v == two_half || *v == base.neg(two_half));
            }
        }
    }

    #[test]
    fn breakdown_total_is_self_consistent_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let (p, k) = [(5, 1), (7, 1), (3, 2), (11, 1), (13, 1)][rng.gen_range(0..5)];
            let ext = make_extension(&make_field(p, k).unwrap()).unwrap();
            let base = ext.base();
            let q = base.q();
            let a = base.elem(rng.gen_range(1..q) as u32);
            let n = rng.gen_range(0..2 * q * q);
            // brute_breakdown already asserts total == brute sum
            brute_breakdown(&ext, n, a).unwrap();
        }
    }

    #[test]
    fn sweep_q7_full_grid_is_clean() {
        let grid = SweepGrid {
            fields: vec![(7, 1)],
            n_max: Some(96),
            sample: None,
            class_checks: ClassChecks::Auto,
        };
        let report = verify_sweep(&grid).unwrap();
        assert!(report.passed(), "mismatches: {:?}", report.mismatches);
        assert_eq!(report.counts.residue_sum, 6 * 97);
        assert!(report.counts.per_class > 0);
    }

    #[test]
    fn sweep_q3_is_clean() {
        let grid = SweepGrid {
            fields: vec![(3, 1)],
            n_max: Some(16),
            sample: None,
            class_checks: ClassChecks::On,
        };
        let report = verify_sweep(&grid).unwrap();
        assert!(report.passed(), "mismatches: {:?}", report.mismatches);
    }

    #[test]
    fn sampled_sweep_is_clean_and_seeded() {
        let grid = SweepGrid {
            fields: vec![(13, 1)],
            n_max: None,
            sample: Some(Sample { pairs_per_field: 60, seed: 42 }),
            class_checks: ClassChecks::Auto,
        };
        let report = verify_sweep(&grid).unwrap();
        assert!(report.passed(), "mismatches: {:?}", report.mismatches);
        let again = verify_sweep(&grid).unwrap();
        assert_eq!(report.counts, again.counts);
    }

    #[test]
    fn corrupted_closed_form_is_caught_with_witness() {
        // harness self-test: flip the sign of the residue sum
        fn flipped(ctx: &FieldCtx, n: u64, a: FieldElem) -> ResidueSumResult {
            let r = closed_form::residue_sum(ctx, n, a);
            ResidueSumResult { value: ctx.neg(r.value), trace: r.trace }
        }
        let forms = Forms { sum: flipped, size: closed_form::image_size };
        let grid = SweepGrid {
            fields: vec![(7, 1)],
            n_max: Some(48),
            sample: None,
            class_checks: ClassChecks::Off,
        };
        let report = run_sweep(&grid, &forms).unwrap();
        assert!(!report.passed());
        let m = &report.mismatches[0];
        assert_eq!(m.check, CheckKind::ResidueSum);
        assert_eq!(m.q, 7);
        assert!(m.trace.is_some(), "witness must carry the branch trace");
        assert_ne!(m.closed, m.oracle);
    }

    #[test]
    fn fibonacci_survey_matches_figures() {
        let ctx = f7();
        let survey = fibonacci_survey(&ctx, 96);
        let row = |n: u64| {
            survey
                .odd_rows
                .iter()
                .find(|(m, _)| *m == n)
                .map(|&(_, s)| s)
                .unwrap()
        };
        assert_eq!(row(3), ctx.from_int(4));
        assert_eq!(row(7), ctx.zero());
        assert_eq!(row(13), ctx.from_int(6));
        // palindromic about 24: S(n) = S(48 - n) on the odd table
        for n in (1..48u64).step_by(2) {
            assert_eq!(row(n), row(48 - n), "n = {n}");
        }
    }

    #[test]
    fn generalized_survey_examples() {
        let ctx = f7();
        // A = B = 1, C = 2 is the Lucas family
        let rows = generalized_survey(&ctx, 1, 1, 2, 48).unwrap();
        for &(n, sum) in &rows {
            let lucas =
                brute_image(&ctx, |x| lucas_eval(&ctx, n, x)).sum;
            assert_eq!(sum, lucas, "n = {n}");
        }
        // C = 0 collapses everything to zero
        for (n, sum) in generalized_survey(&ctx, 2, 3, 0, 20).unwrap() {
            assert!(sum.is_zero(), "n = {n}");
        }
        // C = 4 stays within the four admissible values (asserted internally)
        generalized_survey(&ctx, 1, 1, 4, 48).unwrap();
        assert_eq!(generalized_survey(&ctx, 1, 1, 3, 5).unwrap_err(), Error::OddC(3));
    }
}
