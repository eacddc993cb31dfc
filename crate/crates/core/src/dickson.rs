//! Evaluation of Dickson polynomials `D_n(x, a)` and their relatives: Lucas
//! polynomials, Chebyshev residue sums, Fibonacci polynomials, and the
//! generalized two-step recurrence, plus the root pair ω/ω̄ behind the Binet
//! expansion `D_n(x,a) = ω^n + ω̄^n`.

use crate::error::{Error, Result};
use crate::ff::{ExtCtx, FieldCtx, FieldElem};

/// Index and parameter of a Dickson polynomial `D_n(x, a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DicksonParams {
    pub n: u64,
    pub a: FieldElem,
}

impl DicksonParams {
    pub fn new(n: u64, a: FieldElem) -> Self {
        DicksonParams { n, a }
    }
}

/// Coefficients of the generalized recurrence
/// `P_n(x) = A·x·P_{n-1}(x) + B·P_{n-2}(x)` with `P_0 = C`,
/// `P_1 = (A·C/2)·x`; `C` must be even.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneralizedParams {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub n: u64,
}

/// `D_n(x, a)` by the defining recurrence; O(n) field operations.
pub fn dickson_eval_naive(ctx: &FieldCtx, params: DicksonParams, x: FieldElem) -> FieldElem {
    ctx.expect_member(x);
    ctx.expect_member(params.a);
    if params.n == 0 {
        return ctx.from_int(2);
    }
    let (xi, ai) = (x.idx(), params.a.idx());
    let mut prev = ctx.from_int(2).idx(); // D_0
    let mut cur = xi; // D_1
    for _ in 1..params.n {
        let next = ctx.sub_idx(ctx.mul_idx(xi, cur), ctx.mul_idx(ai, prev));
        prev = cur;
        cur = next;
    }
    ctx.elem(cur)
}

/// `D_n(x, a)` in O(log n) field operations, by powering the companion
/// matrix [[x, -a], [1, 0]] of the recurrence and applying it to (D_1, D_0).
pub fn dickson_eval_fast(ctx: &FieldCtx, params: DicksonParams, x: FieldElem) -> FieldElem {
    ctx.expect_member(x);
    ctx.expect_member(params.a);
    let xi = x.idx();
    let neg_a = ctx.neg(params.a).idx();
    let m = mat_pow(ctx, [xi, neg_a, 1, 0], params.n);
    // bottom row of M^n against (D_1, D_0) = (x, 2)
    let two = ctx.from_int(2).idx();
    ctx.elem(ctx.add_idx(ctx.mul_idx(m[2], xi), ctx.mul_idx(m[3], two)))
}

fn mat_mul(ctx: &FieldCtx, a: [u32; 4], b: [u32; 4]) -> [u32; 4] {
    [
        ctx.add_idx(ctx.mul_idx(a[0], b[0]), ctx.mul_idx(a[1], b[2])),
        ctx.add_idx(ctx.mul_idx(a[0], b[1]), ctx.mul_idx(a[1], b[3])),
        ctx.add_idx(ctx.mul_idx(a[2], b[0]), ctx.mul_idx(a[3], b[2])),
        ctx.add_idx(ctx.mul_idx(a[2], b[1]), ctx.mul_idx(a[3], b[3])),
    ]
}

fn mat_pow(ctx: &FieldCtx, mut m: [u32; 4], mut e: u64) -> [u32; 4] {
    let mut acc = [1, 0, 0, 1];
    while e > 0 {
        if e & 1 == 1 {
            acc = mat_mul(ctx, acc, m);
        }
        m = mat_mul(ctx, m, m);
        e >>= 1;
    }
    acc
}

/// The pair `(ω, ω̄)` in F_{q^2} with `ω + ω̄ = x` and `ω·ω̄ = a`;
/// ω = (x + √(x²-4a))/2 with the deterministic square-root branch, and
/// ω̄ = a·ω⁻¹. Every formula downstream is symmetric under swapping the pair.
pub fn omega(ext: &ExtCtx, x: FieldElem, a: FieldElem) -> Result<(FieldElem, FieldElem)> {
    let base = ext.base();
    base.expect_member(x);
    base.expect_member(a);
    if a.is_zero() {
        return Err(Error::ZeroParameter);
    }
    let x2 = base.mul(x, x)?;
    let disc = base.sub(x2, base.mul(base.from_int(4), a)?)?;
    let root = ext.sqrt_ext(disc);
    let half = ext.inv(ext.embed(base.from_int(2)))?;
    let w = ext.mul(ext.add(ext.embed(x), root)?, half)?;
    // a ≠ 0 forces ω ≠ 0
    let w_bar = ext.div(ext.embed(a), w)?;
    Ok((w, w_bar))
}

/// Lucas polynomial `L_n(x) = D_n(x, -1)`.
pub fn lucas_eval(ctx: &FieldCtx, n: u64, x: FieldElem) -> FieldElem {
    dickson_eval_fast(ctx, DicksonParams::new(n, ctx.from_int(-1)), x)
}

/// Residue sum of the n-th Chebyshev polynomial, `S_q(T_n) = ½·S_q(D_n(x,1))`.
/// Chebyshev polynomials are never evaluated pointwise; only this sum relation
/// is exposed.
pub fn chebyshev_sum(ctx: &FieldCtx, n: u64) -> FieldElem {
    let half = ctx.inv(ctx.from_int(2)).expect("2 is invertible in odd characteristic");
    let sum = crate::closed_form::residue_sum(ctx, n, ctx.one()).value;
    ctx.mul(half, sum).expect("same context")
}

/// Fibonacci polynomial `F_n(x)`: F_1 = 1, F_2 = x,
/// F_n = x·F_{n-1} + F_{n-2}. Indexing starts at 1.
pub fn fibonacci_eval(ctx: &FieldCtx, n: u64, x: FieldElem) -> Result<FieldElem> {
    ctx.expect_member(x);
    if n == 0 {
        return Err(Error::IndexZero);
    }
    if n == 1 {
        return Ok(ctx.one());
    }
    let xi = x.idx();
    let mut prev = 1u32; // F_1
    let mut cur = xi; // F_2
    for _ in 2..n {
        let next = ctx.add_idx(ctx.mul_idx(xi, cur), prev);
        prev = cur;
        cur = next;
    }
    Ok(ctx.elem(cur))
}

/// Value of the generalized polynomial `P_n(x)`.
pub fn generalized_eval(ctx: &FieldCtx, gp: GeneralizedParams, x: FieldElem) -> Result<FieldElem> {
    ctx.expect_member(x);
    if gp.c % 2 != 0 {
        return Err(Error::OddC(gp.c));
    }
    let p0 = ctx.from_int(gp.c);
    if gp.n == 0 {
        return Ok(p0);
    }
    let a = ctx.from_int(gp.a).idx();
    let b = ctx.from_int(gp.b).idx();
    let xi = x.idx();
    let ax = ctx.mul_idx(a, xi);
    // P_1 = (A·C/2)·x
    let p1 = ctx.mul_idx(ctx.mul_idx(a, ctx.from_int(gp.c / 2).idx()), xi);
    let mut prev = p0.idx();
    let mut cur = p1;
    for _ in 1..gp.n {
        let next = ctx.add_idx(ctx.mul_idx(ax, cur), ctx.mul_idx(b, prev));
        prev = cur;
        cur = next;
    }
    Ok(ctx.elem(cur))
}
