//! Independent oracles shared by the integration tests. None of them call
//! into the polynomial construction of the crate.

#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::Rng;

pub type Rows = Vec<Vec<u32>>;

/// Row indices of one column ordered by value; insertion sort keeps ties in
/// original order.
fn column_order(c: &Rows, col: usize) -> Vec<usize> {
    let mut order: Vec<usize> = Vec::new();
    for r in 0..c.len() {
        let at = order
            .iter()
            .position(|&o| c[o][col] > c[r][col])
            .unwrap_or(order.len());
        order.insert(at, r);
    }
    order
}

/// Direct evaluation of the per-column sum
/// `delta_1 + sum_k delta_k * prod_{r<k} y[pi_r]`, without any aggregation.
pub fn unaggregated_value(c: &Rows, y: &[bool]) -> u64 {
    let cols = c[0].len();
    let mut total = 0u64;
    for col in 0..cols {
        let order = column_order(c, col);
        let mut previous = 0u32;
        for (k, &row) in order.iter().enumerate() {
            let delta = c[row][col] - previous;
            previous = c[row][col];
            if order[..k].iter().all(|&r| y[r]) {
                total += u64::from(delta);
            }
        }
    }
    total
}

/// Closed form of the same function: each column contributes its smallest
/// entry among rows with `y = 0`, or its maximum when every `y` is 1.
pub fn min_open_value(c: &Rows, y: &[bool]) -> u64 {
    let cols = c[0].len();
    (0..cols)
        .map(|col| {
            let open = (0..c.len()).filter(|&r| !y[r]).map(|r| c[r][col]).min();
            u64::from(open.unwrap_or_else(|| c.iter().map(|row| row[col]).max().unwrap()))
        })
        .sum()
}

pub fn assignment(mask: usize, m: usize) -> Vec<bool> {
    (0..m).map(|i| mask >> i & 1 == 1).collect()
}

/// Multilinear coefficients recovered from all `2^m` function values by
/// Moebius inversion. Returns `(variables, coefficient)` for nonzero
/// coefficients in canonical order: degree first, then the largest variable.
pub fn moebius_terms(c: &Rows) -> Vec<(Vec<u32>, i64)> {
    let m = c.len();
    let mut coef: Vec<i64> = (0..1usize << m)
        .map(|mask| min_open_value(c, &assignment(mask, m)) as i64)
        .collect();
    for bit in 0..m {
        for mask in 0..1usize << m {
            if mask >> bit & 1 == 1 {
                coef[mask] -= coef[mask ^ (1 << bit)];
            }
        }
    }
    let mut terms: Vec<(Vec<u32>, i64)> = coef
        .iter()
        .enumerate()
        .filter(|(_, &a)| a != 0)
        .map(|(mask, &a)| ((0..m as u32).filter(|&i| mask >> i & 1 == 1).collect(), a))
        .collect();
    terms.sort_by(|(a, _), (b, _)| {
        a.len()
            .cmp(&b.len())
            .then_with(|| a.iter().rev().cmp(b.iter().rev()))
    });
    terms
}

pub fn moebius_text(c: &Rows) -> String {
    let terms = moebius_terms(c);
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|(vars, a)| {
            let mut s = a.to_string();
            for v in vars {
                s.push_str(&format!("*y{}", v + 1));
            }
            s
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn moebius_degree(c: &Rows) -> usize {
    moebius_terms(c)
        .iter()
        .map(|(v, _)| v.len())
        .max()
        .unwrap_or(0)
}

pub fn transpose(c: &Rows) -> Rows {
    (0..c[0].len())
        .map(|j| c.iter().map(|row| row[j]).collect())
        .collect()
}

/// `max` of the degrees of a patch and its transpose, from function values.
pub fn brute_patch_degree(c: &Rows) -> usize {
    moebius_degree(c).max(moebius_degree(&transpose(c)))
}

pub fn random_rows(rng: &mut StdRng, m: usize, n: usize, max: u32) -> Rows {
    (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(0..=max)).collect())
        .collect()
}
