//! Increasing multi-indices and the skew-symmetric access rules.

/// Binomial coefficient, small arguments only.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All strictly increasing multi-indices of length `k` from {0..n-1}, in
/// lexicographic order.
pub fn increasing(n: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut idx: Vec<u8> = (0..k as u8).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        // advance combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < (n - k + i) as u8 {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Lexicographic rank of an increasing multi-index.
pub fn rank(n: usize, idx: &[u8]) -> usize {
    let k = idx.len();
    let mut r = 0usize;
    let mut prev: i32 = -1;
    for (pos, &c) in idx.iter().enumerate() {
        for v in (prev + 1)..(c as i32) {
            r += binomial(n - 1 - v as usize, k - 1 - pos);
        }
        prev = c as i32;
    }
    r
}

/// Sort an arbitrary index tuple; returns the permutation sign, or None when
/// an index repeats (the skew rule maps it to zero).
pub fn sort_signed(idx: &mut [u8]) -> Option<f64> {
    let mut sign = 1.0;
    // insertion sort, counting swaps
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in idx.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some(sign)
}

/// Insert `k` into the increasing list `rest`; returns the sign
/// (-1)^{#elements below k} and the sorted result, or None if k is present.
pub fn insert_signed(rest: &[u8], k: u8) -> Option<(f64, Vec<u8>)> {
    let mut below = 0usize;
    for &r in rest {
        if r == k {
            return None;
        }
        if r < k {
            below += 1;
        }
    }
    let mut out = Vec::with_capacity(rest.len() + 1);
    out.extend_from_slice(&rest[..below]);
    out.push(k);
    out.extend_from_slice(&rest[below..]);
    Some((if below % 2 == 0 { 1.0 } else { -1.0 }, out))
}

/// Merge two increasing lists; sign counts the inversions of the
/// concatenation, None on overlap.
pub fn merge_signed(a: &[u8], b: &[u8]) -> Option<(f64, Vec<u8>)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut sign = 1.0;
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i >= a.len() || b[j] < a[i] {
            // b[j] jumps over the remaining a-elements
            if (a.len() - i) % 2 == 1 {
                sign = -sign;
            }
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((sign, out))
}

/// Complement of an increasing list in {0..n-1}.
pub fn complement(n: usize, idx: &[u8]) -> Vec<u8> {
    (0..n as u8).filter(|v| !idx.contains(v)).collect()
}
