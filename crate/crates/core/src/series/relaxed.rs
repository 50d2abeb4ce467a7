//! Products and online convolutions of non-negative big-integer sequences.
//!
//! Products of long sequences go through Kronecker substitution: each
//! sequence is packed into one integer with fixed-width slots, multiplied
//! once by GMP, and unpacked. Slots are wide enough that no carry crosses
//! a slot boundary because every coefficient is non-negative.
//!
//! The online solvers fill `x[n]` left to right when `x[n]` depends on a
//! convolution involving `x[0..n)`. They use the usual divide-and-conquer
//! scheme over aligned power-of-two blocks, so the work is a few full-size
//! products instead of a quadratic number of small ones.

use rug::integer::Order;
use rug::Integer;

/// Below this length a product is done coefficient by coefficient.
const SCHOOLBOOK: usize = 12;

fn max_bits(xs: &[Integer]) -> u32 {
    xs.iter().map(|x| x.significant_bits()).max().unwrap_or(0)
}

fn pack(xs: &[Integer], slot: usize) -> Integer {
    let mut buf = vec![0u64; xs.len() * slot];
    for (x, chunk) in xs.iter().zip(buf.chunks_mut(slot)) {
        if *x != 0 {
            x.write_digits(chunk, Order::Lsf);
        }
    }
    Integer::from_digits(&buf, Order::Lsf)
}

fn unpack(p: &Integer, slot: usize, count: usize) -> Vec<Integer> {
    let digits = p.to_digits::<u64>(Order::Lsf);
    (0..count)
        .map(|i| {
            let lo = (i * slot).min(digits.len());
            let hi = ((i + 1) * slot).min(digits.len());
            Integer::from_digits(&digits[lo..hi], Order::Lsf)
        })
        .collect()
}

fn slot_limbs(xbits: u32, ybits: u32, terms: usize) -> usize {
    let extra = usize::BITS - terms.leading_zeros();
    (xbits as usize + ybits as usize + extra as usize + 1).div_ceil(64)
}

/// Full product of two polynomials given by coefficient slices.
pub(crate) fn mul(x: &[Integer], y: &[Integer]) -> Vec<Integer> {
    if x.is_empty() || y.is_empty() {
        return Vec::new();
    }
    let len = x.len() + y.len() - 1;
    let (xb, yb) = (max_bits(x), max_bits(y));
    if xb == 0 || yb == 0 {
        return vec![Integer::new(); len];
    }
    if x.len().min(y.len()) <= SCHOOLBOOK {
        let mut out = vec![Integer::new(); len];
        for (i, a) in x.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        return out;
    }
    let slot = slot_limbs(xb, yb, x.len().min(y.len()));
    let p = pack(x, slot) * pack(y, slot);
    unpack(&p, slot, len)
}

/// `x * x`, using a squaring for the packed form.
pub(crate) fn square(x: &[Integer]) -> Vec<Integer> {
    if x.is_empty() {
        return Vec::new();
    }
    if x.len() <= SCHOOLBOOK {
        return mul(x, x);
    }
    let b = max_bits(x);
    if b == 0 {
        return vec![Integer::new(); 2 * x.len() - 1];
    }
    let slot = slot_limbs(b, b, x.len());
    let p = pack(x, slot).square();
    unpack(&p, slot, 2 * x.len() - 1)
}

/// Solves `x[n] = finish(n, Σ_{a+b=n-1} x[a]·x[b], &x[..n])` for `n < len`.
pub(crate) fn online_square<F>(len: usize, mut finish: F) -> Vec<Integer>
where
    F: FnMut(usize, Integer, &[Integer]) -> Integer,
{
    let mut x = vec![Integer::new(); len];
    let mut acc = vec![Integer::new(); len];
    if len > 0 {
        square_block(0, len.next_power_of_two(), &mut x, &mut acc, &mut finish);
    }
    x
}

fn square_block<F>(l: usize, r: usize, x: &mut [Integer], acc: &mut [Integer], finish: &mut F)
where
    F: FnMut(usize, Integer, &[Integer]) -> Integer,
{
    let len = x.len();
    if l >= len {
        return;
    }
    if r - l == 1 {
        let a = std::mem::take(&mut acc[l]);
        x[l] = finish(l, a, &x[..l]);
        return;
    }
    let m = (l + r) / 2;
    square_block(l, m, x, acc, finish);
    if m < len {
        let hi = r.min(len);
        if l == 0 {
            // pairs with both indices below m
            let p = square(&x[..m]);
            for (t, v) in p.into_iter().enumerate().skip(m - 1) {
                if t + 1 >= hi {
                    break;
                }
                acc[t + 1] += v;
            }
        } else {
            // one index in [l, m), the other below r - l <= l; both orders
            let p = mul(&x[l..m], &x[..r - l]);
            for (t, v) in p.into_iter().enumerate() {
                let n = l + t + 1;
                if n >= hi {
                    break;
                }
                if n >= m {
                    acc[n] += v << 1u32;
                }
            }
        }
    }
    square_block(m, r, x, acc, finish);
}

/// Solves `x[n] = finish(n, Σ_{a+b=n-1} x[a]·y[b], &x[..n])` for `n < len`,
/// where `y` is known in advance.
pub(crate) fn online_product<F>(y: &[Integer], len: usize, mut finish: F) -> Vec<Integer>
where
    F: FnMut(usize, Integer, &[Integer]) -> Integer,
{
    let mut x = vec![Integer::new(); len];
    let mut acc = vec![Integer::new(); len];
    if len > 0 {
        product_block(0, len.next_power_of_two(), y, &mut x, &mut acc, &mut finish);
    }
    x
}

fn product_block<F>(l: usize, r: usize, y: &[Integer], x: &mut [Integer], acc: &mut [Integer], finish: &mut F)
where
    F: FnMut(usize, Integer, &[Integer]) -> Integer,
{
    let len = x.len();
    if l >= len {
        return;
    }
    if r - l == 1 {
        let a = std::mem::take(&mut acc[l]);
        x[l] = finish(l, a, &x[..l]);
        return;
    }
    let m = (l + r) / 2;
    product_block(l, m, y, x, acc, finish);
    if m < len {
        let hi = r.min(len);
        let p = mul(&x[l..m], &y[..(r - l).min(y.len())]);
        for (t, v) in p.into_iter().enumerate() {
            let n = l + t + 1;
            if n >= hi {
                break;
            }
            if n >= m {
                acc[n] += v;
            }
        }
    }
    product_block(m, r, y, x, acc, finish);
}
