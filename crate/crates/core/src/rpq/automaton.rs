//! Regex compilation: Thompson NFA, subset construction, Hopcroft minimization.

use crate::query::Regex;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct Nfa {
    pub start: usize,
    pub accept: usize,
    eps: Vec<Vec<usize>>,
    trans: Vec<Vec<(Arc<str>, usize)>>,
}

impl Nfa {
    pub fn thompson(r: &Regex) -> Nfa {
        let mut nfa = Nfa {
            start: 0,
            accept: 0,
            eps: Vec::new(),
            trans: Vec::new(),
        };
        let (s, f) = nfa.build(r);
        nfa.start = s;
        nfa.accept = f;
        nfa
    }

    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.trans.push(Vec::new());
        self.eps.len() - 1
    }

    fn build(&mut self, r: &Regex) -> (usize, usize) {
        match r {
            Regex::Eps => {
                let (s, f) = (self.state(), self.state());
                self.eps[s].push(f);
                (s, f)
            }
            Regex::Sym(a) => {
                let (s, f) = (self.state(), self.state());
                self.trans[s].push((a.clone(), f));
                (s, f)
            }
            Regex::Concat(a, b) => {
                let (s1, f1) = self.build(a);
                let (s2, f2) = self.build(b);
                self.eps[f1].push(s2);
                (s1, f2)
            }
            Regex::Union(a, b) => {
                let (s, f) = (self.state(), self.state());
                let (s1, f1) = self.build(a);
                let (s2, f2) = self.build(b);
                self.eps[s].extend([s1, s2]);
                self.eps[f1].push(f);
                self.eps[f2].push(f);
                (s, f)
            }
            Regex::Star(a) => {
                let (s, f) = (self.state(), self.state());
                let (s1, f1) = self.build(a);
                self.eps[s].extend([s1, f]);
                self.eps[f1].extend([s1, f]);
                (s, f)
            }
        }
    }

    fn closure(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(s) = stack.pop() {
            for &t in &self.eps[s] {
                if set.insert(t) {
                    stack.push(t);
                }
            }
        }
    }

    fn step(&self, set: &BTreeSet<usize>, sym: &str) -> BTreeSet<usize> {
        let mut out: BTreeSet<usize> = set
            .iter()
            .flat_map(|&s| self.trans[s].iter().filter(|(a, _)| &**a == sym).map(|(_, t)| *t))
            .collect();
        self.closure(&mut out);
        out
    }

    /// Direct simulation, independent of the DFA pipeline.
    pub fn accepts(&self, word: &[&str]) -> bool {
        let mut cur: BTreeSet<usize> = [self.start].into_iter().collect();
        self.closure(&mut cur);
        for sym in word {
            cur = self.step(&cur, sym);
        }
        cur.contains(&self.accept)
    }
}

/// Deterministic automaton with partial transitions; every state other than
/// the initial one is reachable and can reach an accepting state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    alphabet: Vec<Arc<str>>,
    delta: Vec<Vec<Option<usize>>>,
    accepting: Vec<bool>,
    initial: usize,
}

impl Dfa {
    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn alphabet(&self) -> &[Arc<str>] {
        &self.alphabet
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn step(&self, q: usize, sym: &str) -> Option<usize> {
        let i = self.alphabet.binary_search_by(|a| (**a).cmp(sym)).ok()?;
        self.delta[q][i]
    }

    pub fn accepts(&self, word: &[&str]) -> bool {
        let mut q = self.initial;
        for sym in word {
            match self.step(q, sym) {
                Some(n) => q = n,
                None => return false,
            }
        }
        self.accepting[q]
    }

    pub fn accepts_empty(&self) -> bool {
        self.accepting[self.initial]
    }

    /// The language is finite iff the trimmed transition graph has no cycle.
    pub fn is_finite(&self) -> bool {
        let n = self.num_states();
        let mut color = vec![0u8; n];
        fn dfs(q: usize, dfa: &Dfa, color: &mut [u8]) -> bool {
            color[q] = 1;
            for t in dfa.delta[q].iter().flatten() {
                if color[*t] == 1 || (color[*t] == 0 && !dfs(*t, dfa, color)) {
                    return false;
                }
            }
            color[q] = 2;
            true
        }
        dfs(self.initial, self, &mut color)
    }
}

pub fn compile_regex(r: &Regex) -> Dfa {
    let nfa = Nfa::thompson(r);
    let alphabet: Vec<Arc<str>> = r.alphabet().into_iter().collect();
    let (delta, accepting) = subset_construction(&nfa, &alphabet);
    let (delta, accepting, initial) = hopcroft(&delta, &accepting, 0);
    trim(alphabet, delta, accepting, initial)
}

/// Complete DFA over `alphabet`; state 0 is initial, the empty set is a sink.
fn subset_construction(nfa: &Nfa, alphabet: &[Arc<str>]) -> (Vec<Vec<usize>>, Vec<bool>) {
    let mut start: BTreeSet<usize> = [nfa.start].into_iter().collect();
    nfa.closure(&mut start);
    let mut ids: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    let mut sets = vec![start.clone()];
    ids.insert(start, 0);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < sets.len() {
        let mut row = Vec::with_capacity(alphabet.len());
        for a in alphabet {
            let next = nfa.step(&sets[i], a);
            let id = *ids.entry(next.clone()).or_insert_with(|| {
                sets.push(next);
                sets.len() - 1
            });
            row.push(id);
        }
        delta.push(row);
        i += 1;
    }
    let accepting = sets.iter().map(|s| s.contains(&nfa.accept)).collect();
    (delta, accepting)
}

/// Hopcroft partition refinement on a complete DFA.
fn hopcroft(delta: &[Vec<usize>], accepting: &[bool], initial: usize) -> (Vec<Vec<usize>>, Vec<bool>, usize) {
    let n = delta.len();
    let k = delta.first().map_or(0, Vec::len);
    let mut inverse: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; k];
    for (q, row) in delta.iter().enumerate() {
        for (a, &t) in row.iter().enumerate() {
            inverse[a][t].push(q);
        }
    }
    let f: BTreeSet<usize> = (0..n).filter(|&q| accepting[q]).collect();
    let nf: BTreeSet<usize> = (0..n).filter(|&q| !accepting[q]).collect();
    let mut parts: Vec<BTreeSet<usize>> = [f, nf].into_iter().filter(|s| !s.is_empty()).collect();
    let mut work: VecDeque<BTreeSet<usize>> = parts.iter().cloned().collect();
    while let Some(splitter) = work.pop_front() {
        for inv in &inverse {
            let x: BTreeSet<usize> = splitter.iter().flat_map(|&t| inv[t].iter().copied()).collect();
            if x.is_empty() {
                continue;
            }
            let mut next_parts = Vec::with_capacity(parts.len());
            for y in parts.drain(..) {
                let inside: BTreeSet<usize> = y.intersection(&x).copied().collect();
                let outside: BTreeSet<usize> = y.difference(&x).copied().collect();
                if inside.is_empty() || outside.is_empty() {
                    next_parts.push(y);
                    continue;
                }
                if let Some(pos) = work.iter().position(|w| *w == y) {
                    work.remove(pos);
                    work.push_back(inside.clone());
                    work.push_back(outside.clone());
                } else if inside.len() <= outside.len() {
                    work.push_back(inside.clone());
                } else {
                    work.push_back(outside.clone());
                }
                next_parts.push(inside);
                next_parts.push(outside);
            }
            parts = next_parts;
        }
    }
    let mut class = vec![0; n];
    for (i, p) in parts.iter().enumerate() {
        for &q in p {
            class[q] = i;
        }
    }
    let m = parts.len();
    let mut mdelta = vec![vec![0; k]; m];
    let mut macc = vec![false; m];
    for q in 0..n {
        for a in 0..k {
            mdelta[class[q]][a] = class[delta[q][a]];
        }
        macc[class[q]] = accepting[q];
    }
    (mdelta, macc, class[initial])
}

/// Drops states that cannot reach acceptance (keeping the initial one) and
/// renumbers breadth-first from the initial state.
fn trim(alphabet: Vec<Arc<str>>, delta: Vec<Vec<usize>>, accepting: Vec<bool>, initial: usize) -> Dfa {
    let n = delta.len();
    let mut live = accepting.clone();
    loop {
        let mut changed = false;
        for q in 0..n {
            if !live[q] && delta[q].iter().any(|&t| live[t]) {
                live[q] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut order = vec![initial];
    let mut id = vec![usize::MAX; n];
    id[initial] = 0;
    let mut i = 0;
    while i < order.len() {
        let q = order[i];
        for &t in &delta[q] {
            if live[t] && id[t] == usize::MAX {
                id[t] = order.len();
                order.push(t);
            }
        }
        i += 1;
    }
    let new_delta = order
        .iter()
        .map(|&q| {
            delta[q]
                .iter()
                .map(|&t| if live[t] { Some(id[t]) } else { None })
                .collect()
        })
        .collect();
    let new_acc = order.iter().map(|&q| accepting[q]).collect();
    Dfa {
        alphabet,
        delta: new_delta,
        accepting: new_acc,
        initial: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_regex;

    fn dfa(text: &str) -> Dfa {
        compile_regex(&parse_regex(text).unwrap())
    }

    #[test]
    fn small_automata() {
        let star = dfa("R*");
        assert_eq!(star.num_states(), 1);
        assert!(star.accepts_empty());
        assert_eq!(star.step(0, "R"), Some(0));

        let chain = dfa("R.S");
        assert_eq!(chain.num_states(), 3);
        assert!(chain.accepts(&["R", "S"]));
        assert!(!chain.accepts(&["R"]));

        assert_eq!(dfa("(R|S).R").num_states(), 3);
        assert_eq!(dfa("R.R*|R+").num_states(), 2);
    }

    #[test]
    fn finiteness() {
        assert!(dfa("R|R.S").is_finite());
        assert!(!dfa("R+").is_finite());
        assert!(dfa("eps").is_finite());
        assert!(dfa("(R.S)?.T").is_finite());
    }

    #[test]
    fn agrees_with_nfa_on_short_words() {
        let r = parse_regex("(R|S.T)*.R?").unwrap();
        let d = compile_regex(&r);
        let nfa = Nfa::thompson(&r);
        let syms = ["R", "S", "T"];
        for len in 0..6u32 {
            for code in 0..3usize.pow(len) {
                let mut c = code;
                let word: Vec<&str> = (0..len)
                    .map(|_| {
                        let s = syms[c % 3];
                        c /= 3;
                        s
                    })
                    .collect();
                assert_eq!(d.accepts(&word), nfa.accepts(&word), "{word:?}");
            }
        }
    }
}
