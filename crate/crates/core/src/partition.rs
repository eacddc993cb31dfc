//! The hyperbolic / elliptic / parabolic partition of F_q, divisor
//! bookkeeping for (n, q), and closed forms for the per-class images of
//! `D_n(·, a)`, their sums, and the overlaps between them.
//!
//! An element x is classified by the quadratic character of x² - 4a: +1 is
//! hyperbolic (ω lands in F_q), -1 elliptic (ω lives in F_{q²} \ F_q), 0
//! parabolic (ω = x/2 is a double root). The closed forms below case-split
//! on d = gcd(n, q-1) (resp. δ = gcd(n, q+1)), the parity of the exponent A
//! of a, and the parity of (q-1)/d (resp. (q+1)/δ), in that order; the cases
//! are disjoint once that order is fixed.

use crate::error::{Error, Result};
use crate::ff::{ExtCtx, FieldCtx, FieldElem};
use crate::numbers::{gcd, v2};

/// Which of the three classes an element of F_q falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    Hyperbolic,
    Elliptic,
    Parabolic,
}

/// Divisor data shared by every closed form: d = gcd(n, q-1),
/// δ = gcd(n, q+1), the quotients m = n/d and μ = n/δ, the 2-adic
/// valuations h, ℓ, r of q-1, q+1, q²-1, and the divisibility flags the
/// theorems branch on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivisorProfile {
    pub n: u64,
    pub q: u64,
    pub d: u64,
    pub delta: u64,
    pub m: u64,
    pub mu: u64,
    pub h: u32,
    pub l: u32,
    pub r: u32,
    pub divides_q_minus_1: bool,
    pub divides_q_plus_1: bool,
    pub two_pow_r_minus_1_divides: bool,
    pub two_pow_r_divides: bool,
}

impl DivisorProfile {
    /// True when 2^(r-1) divides n but 2^r does not (exact division).
    pub fn two_pow_r_minus_1_exact(&self) -> bool {
        self.two_pow_r_minus_1_divides && !self.two_pow_r_divides
    }
}

/// Computes the divisor profile of (n, q) with exact integer arithmetic.
/// Every flag is true for n = 0, which divides everything.
pub fn divisor_profile(n: u64, q: u64) -> DivisorProfile {
    assert!(q >= 3 && q % 2 == 1, "q must be an odd prime power");
    let d = gcd(n, q - 1);
    let delta = gcd(n, q + 1);
    let h = v2(q - 1);
    let l = v2(q + 1);
    let r = h + l;
    let divides = |modulus: u64| n % modulus == 0;
    DivisorProfile {
        n,
        q,
        d,
        delta,
        m: n / d,
        mu: n / delta,
        h,
        l,
        r,
        divides_q_minus_1: divides(q - 1),
        divides_q_plus_1: divides(q + 1),
        two_pow_r_minus_1_divides: divides(1 << (r - 1)),
        two_pow_r_divides: divides(1 << r),
    }
}

/// Classifies x by the character of x² - 4a.
pub fn classify(ctx: &FieldCtx, x: FieldElem, a: FieldElem) -> Result<ClassLabel> {
    ctx.expect_member(x);
    ctx.expect_member(a);
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    let disc = ctx.sub(ctx.mul(x, x)?, ctx.mul(ctx.from_int(4), a)?)?;
    Ok(match ctx.quadratic_character(disc) {
        1 => ClassLabel::Hyperbolic,
        -1 => ClassLabel::Elliptic,
        _ => ClassLabel::Parabolic,
    })
}

/// The three sets (H, E, P) in canonical order. They are computed twice — once
/// by classifying every x and once through the root-of-unity
/// parameterization — and the two constructions are required to agree.
pub fn partition_sets(
    ext: &ExtCtx,
    a: FieldElem,
) -> Result<(Vec<FieldElem>, Vec<FieldElem>, Vec<FieldElem>)> {
    let base = ext.base();
    base.expect_member(a);
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    let q = base.q();

    // route 1: direct classification
    let mut by_class: [Vec<FieldElem>; 3] = Default::default();
    for x in base.elements() {
        let slot = match classify(base, x, a)? {
            ClassLabel::Hyperbolic => 0,
            ClassLabel::Elliptic => 1,
            ClassLabel::Parabolic => 2,
        };
        by_class[slot].push(x);
    }

    // route 2: ζ-parameterization
    let big_a = base.smallest_positive_log(a)?;
    let mut hyp = Vec::new();
    for c in 1..=q - 1 {
        if (2 * c) % (q - 1) == big_a % (q - 1) {
            continue;
        }
        let e1 = c;
        let e2 = (big_a + (q - 1) - c) % (q - 1);
        hyp.push(base.elem(base.add_idx(base.exp_idx(e1), base.exp_idx(e2))));
    }
    let mut ell = Vec::new();
    let ord2 = ext.order();
    for k in 1..=q + 1 {
        if (2 * k) % (q + 1) == big_a % (q + 1) {
            continue;
        }
        let e1 = (big_a + k * (q - 1)) % ord2;
        let e2 = (big_a * q + ord2 - (k * (q - 1)) % ord2) % ord2;
        let lifted = ext.elem(ext.add_idx(ext.exp_idx(e1), ext.exp_idx(e2)));
        let x = ext
            .project(lifted)
            .expect("elliptic parameterization lands in the base field");
        ell.push(x);
    }
    let mut par = Vec::new();
    if base.quadratic_character(a) == 1 {
        let root = base.sqrt(a).expect("a is a residue");
        let two_root = base.mul(base.from_int(2), root)?;
        par.push(two_root);
        par.push(base.neg(two_root));
    }

    for set in [&mut hyp, &mut ell, &mut par] {
        base.sort_canonical(set);
        set.dedup();
    }
    for set in by_class.iter_mut() {
        base.sort_canonical(set);
    }
    let [h_direct, e_direct, p_direct] = by_class;
    assert_eq!(hyp, h_direct, "hyperbolic parameterization disagrees with classification");
    assert_eq!(ell, e_direct, "elliptic parameterization disagrees with classification");
    assert_eq!(par, p_direct, "parabolic description disagrees with classification");
    Ok((hyp, ell, par))
}

/// A ±1 character power as a field element: `(chi)^e`.
fn sign_pow(ctx: &FieldCtx, chi: i8, e: u64) -> FieldElem {
    if chi == 1 || e % 2 == 0 {
        ctx.one()
    } else {
        ctx.from_int(-1)
    }
}

fn sign_times(ctx: &FieldCtx, sign: FieldElem, x: FieldElem) -> FieldElem {
    ctx.mul(sign, x).expect("same context")
}

struct CaseData {
    prof: DivisorProfile,
    chi: i8,
    big_a: u64,
    /// a^(n/2)
    half_pow: FieldElem,
    /// 2·a^(n/2)
    two_half_pow: FieldElem,
}

fn case_data(ctx: &FieldCtx, n: u64, a: FieldElem) -> Result<CaseData> {
    ctx.expect_member(a);
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    if n % 2 != 0 {
        return Err(Error::OddIndex(n));
    }
    let prof = divisor_profile(n, ctx.q());
    let chi = ctx.quadratic_character(a);
    let half_pow = ctx.powu(a, n / 2);
    let two_half_pow = ctx.mul(ctx.from_int(2), half_pow)?;
    Ok(CaseData { prof, chi, big_a: ctx.smallest_positive_log(a)?, half_pow, two_half_pow })
}

/// Exponent-loop enumeration shared by both image closed forms: collects
/// `ζ_base^(n·c) + ζ_base^(n·(A-c))` over c = 1..=count, skipping residues in
/// `excluded` (mod count). `emit` maps a pair of exponents to a field element.
fn enumerate_pairs(
    count: u64,
    excluded: &[u64],
    mut emit: impl FnMut(u64) -> FieldElem,
) -> Vec<FieldElem> {
    let mut out = Vec::new();
    for c in 1..=count {
        if excluded.contains(&(c % count)) {
            continue;
        }
        out.push(emit(c));
    }
    out
}

/// Closed form for the hyperbolic image D_n(H_q(a), a), n even.
///
/// Returns the empty set when H_q(a) itself is empty, which happens exactly
/// for q = 3 with a residue parameter; the seven-case formula presumes a
/// nonempty hyperbolic set.
pub fn hyperbolic_image_closed(ext: &ExtCtx, n: u64, a: FieldElem) -> Result<Vec<FieldElem>> {
    let base = ext.base();
    let data = case_data(base, n, a)?;
    let q = base.q();
    if q == 3 && data.chi == 1 {
        return Ok(Vec::new());
    }
    let d = data.prof.d;
    if d == q - 1 {
        let sign = sign_pow(base, data.chi, data.prof.m);
        return Ok(vec![sign_times(base, sign, data.two_half_pow)]);
    }
    let qd = (q - 1) / d;
    let big_a = data.big_a;
    let mut excluded: Vec<u64> = Vec::new();
    let mut extras: Vec<FieldElem> = Vec::new();
    if big_a % 2 == 1 {
        if qd % 2 == 1 {
            excluded.push(((big_a + qd) / 2) % qd);
            let sign = sign_pow(base, -1, data.prof.m);
            extras.push(sign_times(base, sign, data.two_half_pow));
        }
        // A odd with (q-1)/d even: no solutions, nothing excluded or added
    } else {
        excluded.push((big_a / 2) % qd);
        if qd % 2 == 0 {
            excluded.push((big_a / 2 + qd / 2) % qd);
            extras.push(base.neg(data.two_half_pow));
            if d != 2 {
                extras.push(data.two_half_pow);
            }
        } else if d != 2 {
            extras.push(data.two_half_pow);
        }
    }
    let nm = n % (q - 1);
    let mut image = enumerate_pairs(qd, &excluded, |c| {
        let e1 = nm * (c % (q - 1));
        let e2 = nm * ((big_a + (q - 1) - (c % (q - 1))) % (q - 1));
        base.elem(base.add_idx(base.exp_idx(e1), base.exp_idx(e2)))
    });
    image.extend(extras);
    base.sort_canonical(&mut image);
    image.dedup();
    Ok(image)
}

/// Closed form for the elliptic image D_n(E_q(a), a), n even.
pub fn elliptic_image_closed(ext: &ExtCtx, n: u64, a: FieldElem) -> Result<Vec<FieldElem>> {
    let base = ext.base();
    let data = case_data(base, n, a)?;
    let q = base.q();
    let delta = data.prof.delta;
    if delta == q + 1 {
        let sign = sign_pow(base, data.chi, data.prof.mu);
        return Ok(vec![sign_times(base, sign, data.two_half_pow)]);
    }
    let qdelta = (q + 1) / delta;
    let big_a = data.big_a;
    let mut excluded: Vec<u64> = Vec::new();
    let mut extras: Vec<FieldElem> = Vec::new();
    if big_a % 2 == 1 {
        if qdelta % 2 == 1 {
            excluded.push(((big_a + qdelta) / 2) % qdelta);
            let sign = sign_pow(base, -1, data.prof.mu);
            extras.push(sign_times(base, sign, data.two_half_pow));
        }
    } else {
        excluded.push((big_a / 2) % qdelta);
        if qdelta % 2 == 0 {
            excluded.push((big_a / 2 + qdelta / 2) % qdelta);
            extras.push(base.neg(data.two_half_pow));
            if delta != 2 {
                extras.push(data.two_half_pow);
            }
        } else if delta != 2 {
            extras.push(data.two_half_pow);
        }
    }
    let ord2 = ext.order();
    let nm = n % ord2;
    let mut image = enumerate_pairs(qdelta, &excluded, |k| {
        let e1 = nm * ((big_a + k * (q - 1)) % ord2) % ord2;
        let e2 = nm * ((big_a * q + ord2 - (k * (q - 1)) % ord2) % ord2) % ord2;
        let lifted = ext.elem(ext.add_idx(ext.exp_idx(e1), ext.exp_idx(e2)));
        ext.project(lifted).expect("elliptic image lies in the base field")
    });
    image.extend(extras);
    base.sort_canonical(&mut image);
    image.dedup();
    Ok(image)
}

/// Closed form for the sum over the distinct hyperbolic image values.
pub fn hyperbolic_sum_closed(ctx: &FieldCtx, n: u64, a: FieldElem) -> Result<FieldElem> {
    let data = case_data(ctx, n, a)?;
    let q = ctx.q();
    if q == 3 && data.chi == 1 {
        return Ok(ctx.zero()); // empty hyperbolic set
    }
    let d = data.prof.d;
    if d == q - 1 {
        let sign = sign_pow(ctx, data.chi, data.prof.m);
        return Ok(sign_times(ctx, sign, data.two_half_pow));
    }
    let qd_odd = ((q - 1) / d) % 2 == 1;
    Ok(if data.big_a % 2 == 1 {
        if qd_odd {
            sign_times(ctx, sign_pow(ctx, -1, data.prof.m), data.half_pow)
        } else {
            ctx.zero()
        }
    } else if qd_odd {
        if d == 2 {
            ctx.neg(data.half_pow)
        } else {
            data.half_pow
        }
    } else if d == 2 {
        ctx.neg(data.two_half_pow)
    } else {
        ctx.zero()
    })
}

/// Closed form for the sum over the distinct elliptic image values.
pub fn elliptic_sum_closed(ctx: &FieldCtx, n: u64, a: FieldElem) -> Result<FieldElem> {
    let data = case_data(ctx, n, a)?;
    let q = ctx.q();
    let delta = data.prof.delta;
    if delta == q + 1 {
        let sign = sign_pow(ctx, data.chi, data.prof.mu);
        return Ok(sign_times(ctx, sign, data.two_half_pow));
    }
    let qdelta_odd = ((q + 1) / delta) % 2 == 1;
    Ok(if data.big_a % 2 == 1 {
        if qdelta_odd {
            sign_times(ctx, sign_pow(ctx, -1, data.prof.mu), data.half_pow)
        } else {
            ctx.zero()
        }
    } else if qdelta_odd {
        if delta == 2 {
            ctx.neg(data.half_pow)
        } else {
            data.half_pow
        }
    } else if delta == 2 {
        ctx.neg(data.two_half_pow)
    } else {
        ctx.zero()
    })
}

/// The four pairwise/triple image overlaps, in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapSets {
    pub he: Vec<FieldElem>,
    pub hp: Vec<FieldElem>,
    pub ep: Vec<FieldElem>,
    pub hep: Vec<FieldElem>,
}

/// Closed form for the overlaps between the class images, n even.
///
/// The hyperbolic-elliptic overlap is always a subset of {±2a^(n/2)}. For a
/// non-residue parameter it is {2a^(n/2)} exactly when 2^r | n and the
/// parabolic set is empty; for a residue it coincides with the triple
/// overlap, and the parabolic value 2a^(n/2) sits in the hyperbolic image
/// iff d ≠ 2 and in the elliptic image iff δ ≠ 2.
pub fn overlap_closed(ext: &ExtCtx, n: u64, a: FieldElem) -> Result<OverlapSets> {
    let base = ext.base();
    let data = case_data(base, n, a)?;
    let two_half = data.two_half_pow;
    let empty = Vec::new;
    if data.chi == -1 {
        let he = if data.prof.two_pow_r_divides { vec![two_half] } else { empty() };
        return Ok(OverlapSets { he, hp: empty(), ep: empty(), hep: empty() });
    }
    let in_h = data.prof.d != 2;
    let in_e = data.prof.delta != 2;
    let single = |yes: bool| if yes { vec![two_half] } else { empty() };
    Ok(OverlapSets {
        he: single(in_h && in_e),
        hp: single(in_h),
        ep: single(in_e),
        hep: single(in_h && in_e),
    })
}

/// Predicted size of the hyperbolic image: floor((q-1)/2d) plus one for the
/// extremal value present when A·(q-1)/d is odd or when A is even, d ≠ 2.
pub fn hyperbolic_image_size(ctx: &FieldCtx, n: u64, a: FieldElem) -> Result<u64> {
    let data = case_data(ctx, n, a)?;
    if ctx.q() == 3 && data.chi == 1 {
        return Ok(0);
    }
    let q = ctx.q();
    let d = data.prof.d;
    let extremal = data.big_a % 2 == 1 && ((q - 1) / d) % 2 == 1
        || data.big_a % 2 == 0 && d != 2;
    Ok((q - 1) / (2 * d) + u64::from(extremal))
}

/// Predicted size of the elliptic image, mirroring [`hyperbolic_image_size`].
pub fn elliptic_image_size(ctx: &FieldCtx, n: u64, a: FieldElem) -> Result<u64> {
    let data = case_data(ctx, n, a)?;
    let q = ctx.q();
    let delta = data.prof.delta;
    let extremal = data.big_a % 2 == 1 && ((q + 1) / delta) % 2 == 1
        || data.big_a % 2 == 0 && delta != 2;
    Ok((q + 1) / (2 * delta) + u64::from(extremal))
}

/// Per-class images, sums, overlaps, and the inclusion-exclusion total for
/// one (n, a). Produced by the oracle's exhaustive breakdown.
#[derive(Clone, Debug)]
pub struct ClassBreakdown {
    pub image_h: Vec<FieldElem>,
    pub image_e: Vec<FieldElem>,
    pub image_p: Vec<FieldElem>,
    pub sum_h: FieldElem,
    pub sum_e: FieldElem,
    pub sum_p: FieldElem,
    pub he: Vec<FieldElem>,
    pub hp: Vec<FieldElem>,
    pub ep: Vec<FieldElem>,
    pub hep: Vec<FieldElem>,
    pub total: FieldElem,
}

impl ClassBreakdown {
    /// Recomputes the total from the parts:
    /// ΣH + ΣE + ΣP - ΣHE - ΣHP - ΣEP + ΣHEP.
    pub fn inclusion_exclusion_total(&self, ctx: &FieldCtx) -> FieldElem {
        let sum_of = |set: &[FieldElem]| {
            set.iter().fold(ctx.zero(), |acc, &v| ctx.add(acc, v).expect("same context"))
        };
        let mut acc = ctx.add(self.sum_h, self.sum_e).expect("same context");
        acc = ctx.add(acc, self.sum_p).expect("same context");
        for neg_set in [&self.he, &self.hp, &self.ep] {
            acc = ctx.sub(acc, sum_of(neg_set)).expect("same context");
        }
        ctx.add(acc, sum_of(&self.hep)).expect("same context")
    }
}
