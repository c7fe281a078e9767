//! Pseudo-observations and the sample version of Kendall's tau.

use crate::data::DataMatrix;
use crate::error::{Error, Result};

/// Column ranks scaled by 1/(n+1); ties receive average ranks.
pub fn pobs(x: &DataMatrix) -> Result<DataMatrix> {
    let n = x.nrows();
    let d = x.ncols();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "pseudo-observations need n >= 2, got {n}"
        )));
    }
    let mut values = vec![0.0; n * d];
    let mut idx: Vec<usize> = Vec::with_capacity(n);
    for j in 0..d {
        let col = x.column(j);
        idx.clear();
        idx.extend(0..n);
        idx.sort_by(|&a, &b| col[a].partial_cmp(&col[b]).expect("NaN in data"));
        let mut i = 0;
        while i < n {
            let mut k = i;
            while k + 1 < n && col[idx[k + 1]] == col[idx[i]] {
                k += 1;
            }
            // ranks i+1 ..= k+1 averaged over the tie group
            let avg = (i + 1 + k + 1) as f64 / 2.0;
            for &row in &idx[i..=k] {
                values[row * d + j] = avg / (n as f64 + 1.0);
            }
            i = k + 1;
        }
    }
    DataMatrix::from_vec(n, d, values)
}

/// Sample Kendall's tau: the U-statistic over all pairs, with tied pairs
/// contributing zero. Counted in O(n log n) by merge sorting; exact integer
/// arithmetic throughout, so it equals the quadratic definition bit for bit.
pub fn sample_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::InvalidArgument(format!(
            "length mismatch: {} vs {}",
            n,
            y.len()
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "sample tau needs n >= 2, got {n}"
        )));
    }
    let mut ord: Vec<usize> = (0..n).collect();
    ord.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b])
            .expect("NaN in data")
            .then(y[a].partial_cmp(&y[b]).expect("NaN in data"))
    });

    let pairs = |t: u64| t * (t - 1) / 2;
    let n0 = pairs(n as u64);

    // tie counts in x and joint (x,y) tie groups
    let mut n1 = 0u64;
    let mut n3 = 0u64;
    let mut i = 0;
    while i < n {
        let mut k = i;
        while k + 1 < n && x[ord[k + 1]] == x[ord[i]] {
            k += 1;
        }
        n1 += pairs((k - i + 1) as u64);
        let mut a = i;
        while a <= k {
            let mut b = a;
            while b + 1 <= k && y[ord[b + 1]] == y[ord[a]] {
                b += 1;
            }
            n3 += pairs((b - a + 1) as u64);
            a = b + 1;
        }
        i = k + 1;
    }

    // discordant pairs = inversions of the y sequence in x-order
    let mut seq: Vec<f64> = ord.iter().map(|&i| y[i]).collect();
    let mut buf = vec![0.0; n];
    let swaps = count_inversions(&mut seq, &mut buf);

    // tie counts in y alone
    let mut ysort: Vec<f64> = y.to_vec();
    ysort.sort_by(|a, b| a.partial_cmp(b).expect("NaN in data"));
    let mut n2 = 0u64;
    let mut i = 0;
    while i < n {
        let mut k = i;
        while k + 1 < n && ysort[k + 1] == ysort[i] {
            k += 1;
        }
        n2 += pairs((k - i + 1) as u64);
        i = k + 1;
    }

    let numer = n0 as i128 - n1 as i128 - n2 as i128 + n3 as i128 - 2 * swaps as i128;
    Ok(numer as f64 / n0 as f64)
}

/// Merge-sort inversion count: pairs i < j with a[i] > a[j].
fn count_inversions(a: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = a.split_at_mut(mid);
    let mut inv = count_inversions(left, &mut buf[..mid]) + count_inversions(right, &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        if left[i] <= right[j] {
            buf[k] = left[i];
            i += 1;
        } else {
            inv += (left.len() - i) as u64;
            buf[k] = right[j];
            j += 1;
        }
        k += 1;
    }
    buf[k..k + left.len() - i].copy_from_slice(&left[i..]);
    buf[k + left.len() - i..n].copy_from_slice(&right[j..]);
    a.copy_from_slice(&buf[..n]);
    inv
}
