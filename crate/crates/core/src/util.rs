/// Advances `v` to the next permutation in lexicographic order.
pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Calls `f` with every restricted-growth string of length `n`, i.e. every
/// set partition of `0..n`; `admit(pos, class, assignment)` prunes early.
pub(crate) fn for_each_partition(
    n: usize,
    admit: &mut dyn FnMut(usize, usize, &[usize]) -> bool,
    f: &mut dyn FnMut(&[usize]),
) {
    fn go(
        pos: usize,
        n: usize,
        classes: usize,
        rgs: &mut Vec<usize>,
        admit: &mut dyn FnMut(usize, usize, &[usize]) -> bool,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if pos == n {
            f(rgs);
            return;
        }
        for c in 0..=classes {
            if !admit(pos, c, rgs) {
                continue;
            }
            rgs.push(c);
            go(pos + 1, n, classes.max(c + 1), rgs, admit, f);
            rgs.pop();
        }
    }
    go(0, n, 0, &mut Vec::with_capacity(n), admit, f);
}
