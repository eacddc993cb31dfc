//! Residue-sum tables for the polynomial families the CLI exposes, plus the
//! (d, δ)-grouped view.

use dickson_core::closed_form::residue_sum;
use dickson_core::dickson::{chebyshev_sum, dickson_eval_fast, fibonacci_eval, DicksonParams};
use dickson_core::ff::{FieldCtx, FieldElem};
use dickson_core::numbers::gcd;
use dickson_core::oracle::brute_image;
use dickson_core::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Lucas,
    Dickson,
    Chebyshev,
    Fibonacci,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Lucas => "lucas",
            Family::Dickson => "dickson",
            Family::Chebyshev => "chebyshev",
            Family::Fibonacci => "fibonacci",
        }
    }
}

/// One table row: the index, its divisor pair, the closed-form sum when the
/// family has one, and the enumerated sum when requested.
pub struct Row {
    pub n: u64,
    pub d: u64,
    pub delta: u64,
    pub closed: Option<FieldElem>,
    pub oracle: Option<FieldElem>,
}

impl Row {
    pub fn matched(&self) -> Option<bool> {
        match (self.closed, self.oracle) {
            (Some(c), Some(o)) => Some(c == o),
            _ => None,
        }
    }
}

pub struct TableSpec<'a> {
    pub ctx: &'a FieldCtx,
    pub family: Family,
    /// Parameter a; fixed to -1 for Lucas and 1 for Chebyshev, unused for
    /// Fibonacci.
    pub a: Option<FieldElem>,
    pub lo: u64,
    pub hi: u64,
    pub odd_only: bool,
    pub even_only: bool,
    pub check: bool,
}

/// The closed-form (or survey) sum for one index, and optionally the
/// brute-force value next to it.
fn row_values(
    spec: &TableSpec<'_>,
    n: u64,
) -> Result<(Option<FieldElem>, Option<FieldElem>), Error> {
    let ctx = spec.ctx;
    let enumerate_dickson = |a: FieldElem| {
        brute_image(ctx, |x| dickson_eval_fast(ctx, DicksonParams::new(n, a), x)).sum
    };
    Ok(match spec.family {
        Family::Lucas | Family::Dickson => {
            let a = spec.a.expect("parameter fixed during validation");
            let closed = residue_sum(ctx, n, a).value;
            let oracle = spec.check.then(|| enumerate_dickson(a));
            (Some(closed), oracle)
        }
        Family::Chebyshev => {
            let closed = chebyshev_sum(ctx, n);
            let oracle = spec.check.then(|| {
                let half = ctx.inv(ctx.from_int(2)).expect("odd characteristic");
                ctx.mul(half, enumerate_dickson(ctx.one())).expect("same context")
            });
            (Some(closed), oracle)
        }
        Family::Fibonacci => {
            let sum = brute_image(ctx, |x| {
                fibonacci_eval(ctx, n, x).expect("n >= 1 validated")
            })
            .sum;
            (None, Some(sum))
        }
    })
}

pub fn build_rows(spec: &TableSpec<'_>) -> Result<Vec<Row>, Error> {
    let q = spec.ctx.q();
    let mut rows = Vec::new();
    for n in spec.lo..=spec.hi {
        if spec.odd_only && n % 2 == 0 || spec.even_only && n % 2 == 1 {
            continue;
        }
        let (closed, oracle) = row_values(spec, n)?;
        rows.push(Row { n, d: gcd(n, q - 1), delta: gcd(n, q + 1), closed, oracle });
    }
    Ok(rows)
}

/// A (d, δ) group and the single sum value shared by all of its indices.
pub struct Group {
    pub d: u64,
    pub delta: u64,
    pub value: FieldElem,
    pub count: u64,
}

/// Groups the rows by their divisor pair, using gcd(n, 2(q+1)) for δ when
/// `double_delta` is set. Fails if some group takes two different values,
/// which would contradict the closed form.
pub fn group_rows(
    spec: &TableSpec<'_>,
    double_delta: bool,
) -> Result<Result<Vec<Group>, String>, Error> {
    let q = spec.ctx.q();
    let mut groups: std::collections::BTreeMap<(u64, u64), (FieldElem, u64)> =
        std::collections::BTreeMap::new();
    for row in build_rows(spec)? {
        let value = row.closed.or(row.oracle).expect("every family yields a value");
        let delta = if double_delta { gcd(row.n, 2 * (q + 1)) } else { row.delta };
        match groups.entry((row.d, delta)) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert((value, 1));
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let (existing, count) = slot.get_mut();
                if *existing != value {
                    return Ok(Err(format!(
                        "group (d={}, delta={}) is not constant: {} vs {} at n={}",
                        row.d,
                        delta,
                        spec.ctx.render(*existing),
                        spec.ctx.render(value),
                        row.n
                    )));
                }
                *count += 1;
            }
        }
    }
    Ok(Ok(groups
        .into_iter()
        .map(|((d, delta), (value, count))| Group { d, delta, value, count })
        .collect()))
}
