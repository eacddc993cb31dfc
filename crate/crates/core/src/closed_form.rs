//! Closed forms for the residue sum and image size of Dickson polynomials,
//! plus the classical quadratic and cubic formulas used as cross-checks.
//!
//! The residue sum `S_q(f)` of a polynomial is the sum in F_q over the
//! distinct values f takes; the image size is the count of those values.

use crate::error::{Error, Result};
use crate::ff::{FieldCtx, FieldElem};
use crate::numbers::is_prime;
use crate::partition::divisor_profile;

/// How [`residue_sum`] resolved its answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumDispatch {
    /// n odd: the image is symmetric about 0 and the sum vanishes.
    OddIndex,
    /// a = 0 and n ≥ 1: D_n degenerates to x^n.
    ZeroParameter,
    /// n = 0 and a = 0: D_0 is the constant 2.
    ConstantPolynomial,
    /// The three-addend formula.
    ThreeTerm,
}

/// Which branches of the three-addend formula fired, and the addends
/// themselves. For the non-formula dispatches the flags are false and the
/// addends zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchTrace {
    pub dispatch: SumDispatch,
    pub two_pow_r_minus_1_divides: bool,
    pub q_minus_1_divides: bool,
    pub q_plus_1_divides: bool,
    pub addends: [FieldElem; 3],
}

/// Residue sum together with the branch trace that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueSumResult {
    pub value: FieldElem,
    pub trace: BranchTrace,
}

impl BranchTrace {
    /// One-line rendering for witnesses and the CLI.
    pub fn render(&self, ctx: &FieldCtx) -> String {
        let dispatch = match self.dispatch {
            SumDispatch::OddIndex => "odd-index",
            SumDispatch::ZeroParameter => "zero-parameter",
            SumDispatch::ConstantPolynomial => "constant",
            SumDispatch::ThreeTerm => "three-term",
        };
        format!(
            "dispatch={dispatch} 2^(r-1)|n={} (q-1)|n={} (q+1)|n={} addends=[{}, {}, {}]",
            self.two_pow_r_minus_1_divides,
            self.q_minus_1_divides,
            self.q_plus_1_divides,
            ctx.render(self.addends[0]),
            ctx.render(self.addends[1]),
            ctx.render(self.addends[2]),
        )
    }
}

fn sign_of(ctx: &FieldCtx, chi: i8, parity_exponent: u64) -> FieldElem {
    if chi == 1 || parity_exponent % 2 == 0 {
        ctx.one()
    } else {
        ctx.from_int(-1)
    }
}

/// The residue sum `S_q(D_n(x, a))`.
///
/// Dispatch: odd n sums to zero; for a = 0 the polynomial degenerates to
/// x^n (n ≥ 1) whose image sums to 1 exactly when n = q-1, while n = 0
/// leaves the constant 2. Otherwise the sum is a three-addend expression in
/// d = gcd(n, q-1), δ = gcd(n, q+1), and the 2-adic valuation r of q²-1:
///
/// - 0 if 2^(r-1) | n, else -χ(a)^(n/d + n/δ)·a^(n/2);
/// - χ(a)^(n/d)·a^(n/2) if (q-1) | n, else 0;
/// - χ(a)^(n/δ)·a^(n/2) if (q+1) | n, else 0.
///
/// The formula applies uniformly to every odd prime power, q = 3 included.
pub fn residue_sum(ctx: &FieldCtx, n: u64, a: FieldElem) -> ResidueSumResult {
    ctx.expect_member(a);
    let zero = ctx.zero();
    let blank = |dispatch, value| ResidueSumResult {
        value,
        trace: BranchTrace {
            dispatch,
            two_pow_r_minus_1_divides: false,
            q_minus_1_divides: false,
            q_plus_1_divides: false,
            addends: [zero; 3],
        },
    };
    if n % 2 == 1 {
        return blank(SumDispatch::OddIndex, zero);
    }
    if a.is_zero() {
        if n == 0 {
            return blank(SumDispatch::ConstantPolynomial, ctx.from_int(2));
        }
        // x^n maps F_q^x onto the subgroup of order (q-1)/gcd(n, q-1), which
        // sums to zero unless it collapses to {1}
        let value = if n % (ctx.q() - 1) == 0 { ctx.one() } else { zero };
        return blank(SumDispatch::ZeroParameter, value);
    }

    let prof = divisor_profile(n, ctx.q());
    let chi = ctx.quadratic_character(a);
    let half_pow = ctx.powu(a, n / 2);
    let addend1 = if prof.two_pow_r_minus_1_divides {
        zero
    } else {
        let parity = (prof.m % 2 + prof.mu % 2) % 2;
        ctx.neg(ctx.mul(sign_of(ctx, chi, parity), half_pow).expect("same context"))
    };
    let addend2 = if prof.divides_q_minus_1 {
        ctx.mul(sign_of(ctx, chi, prof.m), half_pow).expect("same context")
    } else {
        zero
    };
    let addend3 = if prof.divides_q_plus_1 {
        ctx.mul(sign_of(ctx, chi, prof.mu), half_pow).expect("same context")
    } else {
        zero
    };
    let value = ctx
        .add(ctx.add(addend1, addend2).expect("same context"), addend3)
        .expect("same context");
    ResidueSumResult {
        value,
        trace: BranchTrace {
            dispatch: SumDispatch::ThreeTerm,
            two_pow_r_minus_1_divides: prof.two_pow_r_minus_1_divides,
            q_minus_1_divides: prof.divides_q_minus_1,
            q_plus_1_divides: prof.divides_q_plus_1,
            addends: [addend1, addend2, addend3],
        },
    }
}

/// Size of the value set of D_n(x, a) for even n and a ≠ 0:
///
/// floor((q-1)/2d) + floor((q+1)/2δ) + 1, plus 1 more exactly when a is a
/// non-residue and 2^(r-1) divides n to the first power and no further.
///
/// δ here is gcd(n, q+1). Odd n has no closed form; use the oracle.
pub fn image_size(ctx: &FieldCtx, n: u64, a: FieldElem) -> Result<u64> {
    ctx.expect_member(a);
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    if n % 2 == 1 {
        return Err(Error::OddIndex(n));
    }
    let q = ctx.q();
    let prof = divisor_profile(n, q);
    let correction =
        if ctx.quadratic_character(a) == -1 && prof.two_pow_r_minus_1_exact() { 1 } else { 0 };
    Ok((q - 1) / (2 * prof.d) + (q + 1) / (2 * prof.delta) + 1 + correction)
}

/// Residue sum of a quadratic `ax² + bx + c` with a ≠ 0:
/// `-(b² - 4ac)/(8a)`. Holds over every F_q with q > 3 odd.
pub fn classical_quadratic_sum(
    ctx: &FieldCtx,
    a: FieldElem,
    b: FieldElem,
    c: FieldElem,
) -> Result<FieldElem> {
    ctx.expect_member(a);
    ctx.expect_member(b);
    ctx.expect_member(c);
    if a.is_zero() {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let b2 = ctx.mul(b, b)?;
    let four_ac = ctx.mul(ctx.mul(ctx.from_int(4), a)?, c)?;
    let num = ctx.sub(b2, four_ac)?;
    let denom = ctx.mul(ctx.from_int(8), a)?;
    Ok(ctx.neg(ctx.div(num, denom)?))
}

/// Residue sum of a cubic `ax³ + bx² + cx + d` over a prime field F_p,
/// p > 3, a ≠ 0. Writing N = 27a²d - 9abc + 2b³:
///
/// - b² ≠ 3ac: N/81a² if p ≡ 1 (mod 3), else -N/81a²;
/// - b² = 3ac: 2N/81a² if p ≡ 1 (mod 3), else 0.
pub fn classical_cubic_sum(
    ctx: &FieldCtx,
    a: FieldElem,
    b: FieldElem,
    c: FieldElem,
    d: FieldElem,
) -> Result<FieldElem> {
    for e in [a, b, c, d] {
        ctx.expect_member(e);
    }
    if ctx.k() != 1 {
        return Err(Error::ExtensionField);
    }
    if ctx.p() == 3 {
        return Err(Error::CharacteristicThree);
    }
    if a.is_zero() {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let p = ctx.p();
    let int = |i: i64| ctx.from_int(i);
    let a2 = ctx.mul(a, a)?;
    let num = {
        let t1 = ctx.mul(ctx.mul(int(27), a2)?, d)?;
        let t2 = ctx.mul(ctx.mul(ctx.mul(int(9), a)?, b)?, c)?;
        let t3 = ctx.mul(int(2), ctx.mul(ctx.mul(b, b)?, b)?)?;
        ctx.add(ctx.sub(t1, t2)?, t3)?
    };
    let base = ctx.div(num, ctx.mul(int(81), a2)?)?;
    let critical = ctx.mul(b, b)? == ctx.mul(ctx.mul(int(3), a)?, c)?;
    Ok(match (critical, p % 3) {
        (false, 1) => base,
        (false, _) => ctx.neg(base),
        (true, 1) => ctx.mul(int(2), base)?,
        (true, _) => ctx.zero(),
    })
}

/// Size of the image of the monic cubic `x³ + ax² + bx + c` over F_p,
/// p > 3 prime (the constant term does not affect the size):
///
/// - a² = 3b: p if p ≡ -1 (mod 3), else (p+2)/3;
/// - a² ≠ 3b: (2p-1)/3 if p ≡ -1 (mod 3), else (2p+1)/3.
#[allow(clippy::manual_div_ceil)] // (p+2)/3 is exact division, not a ceiling
pub fn classical_cubic_image_size(p: u64, a: i64, b: i64) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::NotOdd(p));
    }
    if p == 3 {
        return Err(Error::CharacteristicThree);
    }
    let pi = p as i128;
    let critical = (a as i128 * a as i128 - 3 * b as i128).rem_euclid(pi) == 0;
    Ok(match (critical, p % 3) {
        (true, 2) => p,
        (true, _) => (p + 2) / 3,
        (false, 2) => (2 * p - 1) / 3,
        (false, _) => (2 * p + 1) / 3,
    })
}
