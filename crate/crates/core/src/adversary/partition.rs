//! Exhaustive enumeration of set partitions with a fixed block count.
//!
//! Partitions are visited in restricted-growth order: element 0 opens
//! block 0, and each later element either joins an existing block or
//! opens the next one. Blocks therefore come out sorted by their
//! smallest member, which keeps downstream searches deterministic.

/// Number of partitions of an `n`-set into exactly `k` non-empty blocks.
pub fn stirling2(n: usize, k: usize) -> u128 {
    if k == 0 || k > n {
        return if n == 0 && k == 0 { 1 } else { 0 };
    }
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for _ in 1..=n {
        for j in (1..=k).rev() {
            row[j] = j as u128 * row[j] + row[j - 1];
        }
        row[0] = 0;
    }
    row[k]
}

/// Number of partitions of an `n`-set into `k` blocks of equal size.
pub fn symmetric_partition_count(n: usize, k: usize) -> u128 {
    if k == 0 || !n.is_multiple_of(k) {
        return 0;
    }
    let s = n / k;
    let mut count: u128 = 1;
    let mut remaining = n;
    while remaining > 0 {
        count *= binomial(remaining - 1, s - 1);
        remaining -= s;
    }
    count
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut out: u128 = 1;
    for i in 0..r {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

/// Visits every partition of `0..n` into exactly `k` non-empty blocks.
pub fn for_each_partition<F: FnMut(&[Vec<usize>])>(n: usize, k: usize, mut f: F) {
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(k);
    extend(0, n, k, None, &mut blocks, &mut f);
}

/// Visits every partition of `0..n` into exactly `k` blocks of size `n/k`.
pub fn for_each_symmetric_partition<F: FnMut(&[Vec<usize>])>(n: usize, k: usize, mut f: F) {
    assert!(k >= 1 && k <= n, "need 1 <= k <= n");
    assert!(
        n.is_multiple_of(k),
        "symmetric partitions need k to divide n"
    );
    let mut blocks: Vec<Vec<usize>> = Vec::with_capacity(k);
    extend(0, n, k, Some(n / k), &mut blocks, &mut f);
}

fn extend<F: FnMut(&[Vec<usize>])>(
    e: usize,
    n: usize,
    k: usize,
    cap: Option<usize>,
    blocks: &mut Vec<Vec<usize>>,
    f: &mut F,
) {
    if e == n {
        if blocks.len() == k {
            f(blocks);
        }
        return;
    }
    // every still-unopened block needs at least one of the remaining elements
    if n - e < k - blocks.len() {
        return;
    }
    if let Some(c) = cap {
        let room: usize =
            blocks.iter().map(|b| c - b.len()).sum::<usize>() + (k - blocks.len()) * c;
        if room < n - e {
            return;
        }
    }
    for b in 0..blocks.len() {
        if cap.is_none_or(|c| blocks[b].len() < c) {
            blocks[b].push(e);
            extend(e + 1, n, k, cap, blocks, f);
            blocks[b].pop();
        }
    }
    if blocks.len() < k {
        blocks.push(vec![e]);
        extend(e + 1, n, k, cap, blocks, f);
        blocks.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stirling_small_values() {
        assert_eq!(stirling2(4, 2), 7);
        assert_eq!(stirling2(5, 3), 25);
        assert_eq!(stirling2(6, 1), 1);
        assert_eq!(stirling2(6, 6), 1);
        assert_eq!(stirling2(3, 4), 0);
        assert_eq!(stirling2(0, 0), 1);
    }

    #[test]
    fn enumeration_count_matches_stirling() {
        for n in 1..=8 {
            for k in 1..=n {
                let mut count = 0u128;
                for_each_partition(n, k, |_| count += 1);
                assert_eq!(count, stirling2(n, k), "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn partitions_are_valid_and_canonical() {
        for_each_partition(5, 3, |blocks| {
            assert_eq!(blocks.len(), 3);
            let mut seen = [false; 5];
            for b in blocks {
                assert!(!b.is_empty());
                for w in b.windows(2) {
                    assert!(w[0] < w[1]);
                }
                for &e in b {
                    assert!(!seen[e]);
                    seen[e] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
            // blocks appear ordered by smallest member
            for w in blocks.windows(2) {
                assert!(w[0][0] < w[1][0]);
            }
        });
    }

    #[test]
    fn first_partition_groups_prefix_together() {
        let mut first: Option<Vec<Vec<usize>>> = None;
        for_each_partition(4, 2, |blocks| {
            if first.is_none() {
                first = Some(blocks.to_vec());
            }
        });
        assert_eq!(first.unwrap(), vec![vec![0, 1, 2], vec![3]]);
    }

    #[test]
    fn symmetric_counts_match_formula() {
        assert_eq!(symmetric_partition_count(4, 2), 3);
        assert_eq!(symmetric_partition_count(6, 3), 15);
        assert_eq!(symmetric_partition_count(6, 2), 10);
        assert_eq!(symmetric_partition_count(5, 2), 0);
        for (n, k) in [(4, 2), (6, 2), (6, 3), (8, 4), (9, 3)] {
            let mut count = 0u128;
            for_each_symmetric_partition(n, k, |blocks| {
                assert!(blocks.iter().all(|b| b.len() == n / k));
                count += 1;
            });
            assert_eq!(count, symmetric_partition_count(n, k), "n = {n}, k = {k}");
        }
    }
}
