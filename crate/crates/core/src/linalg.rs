//! Fraction-free (Bareiss) elimination over the integers.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::Rational;

/// Clears denominators row by row; the row space is unchanged.
pub fn integer_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect()
        })
        .collect()
}

/// Rank of an integer matrix given as rows of equal length.
///
/// Bareiss elimination with row pivoting: every intermediate entry is a minor
/// of the input, and every division is exact.
pub fn rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (head, tail) = rows.split_at_mut(rank + 1);
        let pivot_row = &head[rank];
        for row in tail.iter_mut() {
            for c in col + 1..cols {
                let value = &pivot_row[col] * &row[c] - &row[col] * &pivot_row[c];
                row[c] = value / &prev;
            }
            row[col] = BigInt::zero();
        }
        prev = pivot_row[col].clone();
        rank += 1;
    }
    rank
}

pub fn rational_rank(rows: &[Vec<Rational>]) -> usize {
    rank(integer_rows(rows))
}
