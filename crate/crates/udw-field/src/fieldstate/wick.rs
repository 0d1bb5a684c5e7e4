//! Enumeration of Gaussian-moment partitions.
//!
//! An n-point function of a Gaussian state with mean φ̄ and centered
//! covariance G expands as a sum over all ways of splitting the argument list
//! into singletons (each contributing a φ̄ factor) and ordered pairs `(i, j)`,
//! `i < j`, each contributing `G(x_i, x_j)`. Operator order is preserved by
//! always evaluating the pair kernel at `(earlier index, later index)`.

/// One term of the Gaussian moment expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub pairs: Vec<(usize, usize)>,
    pub singles: Vec<usize>,
}

/// All pair/singleton partitions of `0..n`. With `with_singles = false` only
/// perfect matchings are returned (empty for odd `n`).
pub fn partitions(n: usize, with_singles: bool) -> Vec<Partition> {
    let mut out = Vec::new();
    let mut pairs = Vec::new();
    let mut singles = Vec::new();
    let mut used = vec![false; n];
    recurse(n, with_singles, &mut used, &mut pairs, &mut singles, &mut out);
    out
}

fn recurse(
    n: usize,
    with_singles: bool,
    used: &mut Vec<bool>,
    pairs: &mut Vec<(usize, usize)>,
    singles: &mut Vec<usize>,
    out: &mut Vec<Partition>,
) {
    let first = match used.iter().position(|u| !u) {
        Some(i) => i,
        None => {
            out.push(Partition { pairs: pairs.clone(), singles: singles.clone() });
            return;
        }
    };
    used[first] = true;
    if with_singles {
        singles.push(first);
        recurse(n, with_singles, used, pairs, singles, out);
        singles.pop();
    }
    for j in first + 1..n {
        if used[j] {
            continue;
        }
        used[j] = true;
        pairs.push((first, j));
        recurse(n, with_singles, used, pairs, singles, out);
        pairs.pop();
        used[j] = false;
    }
    used[first] = false;
}

/// Number of perfect matchings of `n` points: (n-1)!! for even n, 0 for odd.
pub fn matching_count(n: usize) -> usize {
    if n % 2 == 1 {
        return 0;
    }
    let mut acc = 1usize;
    let mut k = n;
    while k > 1 {
        acc *= k - 1;
        k -= 2;
    }
    acc
}
