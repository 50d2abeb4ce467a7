//! Full distributions of a marked statistic.
//!
//! Each coefficient `[z^n] P_i(z, u)` is a polynomial in `u`. Evaluating it at
//! `u = 2^S`, with `S` wider than any count, turns the bivariate recurrence
//! into the univariate one on bigger integers; the distribution is read back
//! from the `S`-bit slots.

use super::relaxed;
use super::CountTable;
use crate::family::{build_order, class_rules, MarkSpec};
use rug::integer::Order;
use rug::Integer;
use std::collections::BTreeMap;

/// Packed bivariate rows for every class up to the size of `counts`.
pub(crate) fn packed_rows(counts: &CountTable, mark: MarkSpec) -> (Vec<Vec<Integer>>, u32) {
    let spec = counts.spec;
    let widest = (0..spec.classes())
        .flat_map(|i| counts.row(i).iter())
        .map(|a| a.significant_bits())
        .max()
        .unwrap_or(0);
    let shift = (widest + 1).div_ceil(64) * 64;
    let rules = class_rules(spec, mark);
    let mut rows: Vec<Vec<Integer>> = vec![Vec::new(); spec.classes()];
    for i in build_order(spec) {
        let rule = rules[i];
        let row = {
            let child_row = rule.child.filter(|&c| c != i).map(|c| &rows[c]);
            relaxed::online_square(counts.max_size + 1, |n, conv, prev| {
                let mut v = if rule.binary { conv << shift } else { conv };
                if n == 1 {
                    let leaf = Integer::from(rule.colors);
                    v += if rule.leaf { leaf << shift } else { leaf };
                }
                if n >= 2 && rule.child.is_some() {
                    let c = child_row.map_or(&prev[n - 1], |r| &r[n - 1]);
                    if rule.unary {
                        v += Integer::from(c << shift);
                    } else {
                        v += c;
                    }
                }
                v
            })
        };
        rows[i] = row;
    }
    (rows, shift)
}

/// Splits a packed value into `{m: count}` for the nonzero slots.
pub(crate) fn unpack_histogram(packed: &Integer, shift: u32) -> BTreeMap<u64, Integer> {
    let limbs = (shift / 64) as usize;
    let digits = packed.to_digits::<u64>(Order::Lsf);
    let mut out = BTreeMap::new();
    for (m, chunk) in digits.chunks(limbs).enumerate() {
        let c = Integer::from_digits(chunk, Order::Lsf);
        if c != 0 {
            out.insert(m as u64, c);
        }
    }
    out
}
