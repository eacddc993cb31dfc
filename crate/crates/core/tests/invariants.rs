//! Property tests over randomly drawn fields, elements, and indices. The
//! unit tests already sweep small grids exhaustively; these target the
//! algebraic laws at random points and the huge-index paths that no
//! exhaustive sweep can reach.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use proptest::prelude::*;

use dickson_core::closed_form::{image_size, residue_sum};
use dickson_core::dickson::{dickson_eval_fast, dickson_eval_naive, DicksonParams};
use dickson_core::ff::{make_extension, make_field, ExtCtx, FieldCtx};
use dickson_core::oracle::brute_image;

const FIELDS: [(u64, u32); 9] =
    [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2), (3, 3), (7, 2)];

/// Contexts are immutable and shareable, so build each once per process.
fn field(p: u64, k: u32) -> &'static FieldCtx {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), &'static FieldCtx>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().unwrap();
    cache
        .entry((p, k))
        .or_insert_with(|| Box::leak(Box::new(make_field(p, k).unwrap())))
}

fn extension(p: u64, k: u32) -> &'static ExtCtx {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), &'static ExtCtx>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().unwrap();
    cache
        .entry((p, k))
        .or_insert_with(|| Box::leak(Box::new(make_extension(field(p, k)).unwrap())))
}

fn any_field() -> impl Strategy<Value = (u64, u32)> {
    prop::sample::select(FIELDS.to_vec())
}

proptest! {
    #[test]
    fn log_is_additive_and_character_multiplicative(
        (p, k) in any_field(),
        ai in 1u64..2000,
        bi in 1u64..2000,
    ) {
        let ctx = field(p, k);
        let q = ctx.q();
        let a = ctx.powu(ctx.generator(), ai % (q - 1));
        let b = ctx.powu(ctx.generator(), bi % (q - 1));
        let ab = ctx.mul(a, b).unwrap();
        let (la, lb, lab) =
            (ctx.dlog(a).unwrap(), ctx.dlog(b).unwrap(), ctx.dlog(ab).unwrap());
        prop_assert_eq!(lab, (la + lb) % (q - 1));
        prop_assert_eq!(
            ctx.quadratic_character(ab),
            ctx.quadratic_character(a) * ctx.quadratic_character(b)
        );
        let parity = if la % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(ctx.quadratic_character(a), parity);
    }

    #[test]
    fn pow_is_a_homomorphism_on_exponents(
        (p, k) in any_field(),
        ai in 0u64..2000,
        e1 in 0u64..u64::MAX / 2,
        e2 in 0u64..u64::MAX / 2,
    ) {
        let ctx = field(p, k);
        let a = ctx.element_at(ai % ctx.q());
        let lhs = ctx.powu(a, e1 + e2);
        let rhs = ctx.mul(ctx.powu(a, e1), ctx.powu(a, e2)).unwrap();
        // 0^e collapses; the law holds whenever no zero base with zero
        // exponent sneaks in on one side only
        if !a.is_zero() {
            prop_assert_eq!(lhs, rhs);
            let inv = ctx.pow(a, -(e1.min(1 << 62) as i64)).unwrap();
            prop_assert_eq!(ctx.mul(inv, ctx.powu(a, e1.min(1 << 62))).unwrap(), ctx.one());
        }
    }

    #[test]
    fn sqrt_ext_squares_back_at_random_points(
        (p, k) in prop::sample::select(vec![(3u64, 1u32), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1)]),
        ai in 0u64..2000,
    ) {
        let ext = extension(p, k);
        let base = ext.base();
        let a = base.element_at(ai % base.q());
        let s = ext.sqrt_ext(a);
        prop_assert_eq!(ext.mul(s, s).unwrap(), ext.embed(a));
    }

    #[test]
    fn huge_indices_reduce_by_value_periodicity(
        (p, k) in any_field(),
        ai in 1u64..2000,
        xi in 0u64..2000,
        n in 1u64..,
    ) {
        // for a ≠ 0 the value sequence has exact period dividing q^2 - 1
        let ctx = field(p, k);
        let q = ctx.q();
        let a = ctx.powu(ctx.generator(), ai % (q - 1));
        let x = ctx.element_at(xi % q);
        let period = q * q - 1;
        let mut reduced = n % period;
        if reduced == 0 {
            reduced = period;
        }
        prop_assert_eq!(
            dickson_eval_fast(ctx, DicksonParams::new(n, a), x),
            dickson_eval_naive(ctx, DicksonParams::new(reduced, a), x)
        );
    }

    #[test]
    fn residue_sum_is_periodic_and_membership_holds(
        (p, k) in any_field(),
        ai in 1u64..2000,
        n in 1u64..,
    ) {
        let ctx = field(p, k);
        let q = ctx.q();
        let a = ctx.powu(ctx.generator(), ai % (q - 1));
        let period = q * q - 1;
        let mut reduced = n % period;
        if reduced == 0 {
            reduced = period;
        }
        let full = residue_sum(ctx, n, a).value;
        prop_assert_eq!(full, residue_sum(ctx, reduced, a).value);

        let half = ctx.powu(a, n / 2);
        let two_half = ctx.mul(ctx.from_int(2), half).unwrap();
        let allowed = [ctx.zero(), half, ctx.neg(half), two_half, ctx.neg(two_half)];
        prop_assert!(allowed.contains(&full));
    }

    #[test]
    fn image_size_matches_enumeration_at_huge_even_indices(
        (p, k) in any_field(),
        ai in 1u64..2000,
        n in 1u64..u64::MAX / 2,
    ) {
        let ctx = field(p, k);
        let q = ctx.q();
        let a = ctx.powu(ctx.generator(), ai % (q - 1));
        let n = n * 2;
        let closed = image_size(ctx, n, a).unwrap();
        let brute =
            brute_image(ctx, |x| dickson_eval_fast(ctx, DicksonParams::new(n, a), x));
        prop_assert_eq!(closed, brute.size);
        prop_assert_eq!(residue_sum(ctx, n, a).value, brute.sum);
    }
}
