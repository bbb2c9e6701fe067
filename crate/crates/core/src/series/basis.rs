use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

/// Exponent vector of a monomial `z^α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        MultiIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(vec![0; dim])
    }

    /// The unit index `e_i` (0-based `i`).
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise dominance `self >= other`.
    pub fn dominates(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All monomials in `dim` variables of total degree at most `cap`, in
/// lexicographic order, together with the lookup tables the series
/// arithmetic runs on.
///
/// Lexicographic order is compatible with componentwise dominance, so every
/// recurrence that only reads dominated indices can sweep the table once.
#[derive(Debug)]
pub struct Basis {
    dim: usize,
    cap: usize,
    monomials: Vec<MultiIndex>,
    lookup: HashMap<MultiIndex, usize>,
    /// `splits[t]` lists every `(a, b)` with `monomials[a] + monomials[b] == monomials[t]`.
    splits: Vec<Vec<(u32, u32)>>,
    /// `up[i][t]` is the index of `monomials[t] + e_i`, if it fits under the cap.
    up: Vec<Vec<Option<u32>>>,
    /// `down[i][t]` is the index of `monomials[t] - e_i`, if nonnegative.
    down: Vec<Vec<Option<u32>>>,
}

fn enumerate(dim: usize, cap: usize) -> Vec<MultiIndex> {
    fn rec(dim: usize, budget: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if prefix.len() == dim {
            out.push(MultiIndex(prefix.clone()));
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            rec(dim, budget - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, cap, &mut Vec::with_capacity(dim), &mut out);
    out
}

impl Basis {
    fn build(dim: usize, cap: usize) -> Basis {
        let monomials = enumerate(dim, cap);
        let lookup: HashMap<_, _> = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();

        let mut splits = vec![Vec::new(); monomials.len()];
        for (a, ma) in monomials.iter().enumerate() {
            for (b, mb) in monomials.iter().enumerate() {
                if ma.degree() + mb.degree() > cap {
                    continue;
                }
                let t = lookup[&ma.add(mb)];
                splits[t].push((a as u32, b as u32));
            }
        }

        let mut up = vec![vec![None; monomials.len()]; dim];
        let mut down = vec![vec![None; monomials.len()]; dim];
        for (t, m) in monomials.iter().enumerate() {
            for i in 0..dim {
                let mut e = m.0.clone();
                e[i] += 1;
                up[i][t] = lookup.get(&MultiIndex(e)).map(|&x| x as u32);
                if m.0[i] > 0 {
                    let mut e = m.0.clone();
                    e[i] -= 1;
                    down[i][t] = Some(lookup[&MultiIndex(e)] as u32);
                }
            }
        }

        Basis {
            dim,
            cap,
            monomials,
            lookup,
            splits,
            up,
            down,
        }
    }

    /// Shared basis for `(dim, cap)`; built once per process.
    pub fn get(dim: usize, cap: usize) -> Arc<Basis> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<Basis>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry((dim, cap))
            .or_insert_with(|| Arc::new(Basis::build(dim, cap)))
            .clone()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[MultiIndex] {
        &self.monomials
    }

    pub fn monomial(&self, t: usize) -> &MultiIndex {
        &self.monomials[t]
    }

    pub fn index_of(&self, m: &MultiIndex) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    pub(crate) fn splits(&self, t: usize) -> &[(u32, u32)] {
        &self.splits[t]
    }

    pub(crate) fn up(&self, var: usize, t: usize) -> Option<usize> {
        self.up[var][t].map(|x| x as usize)
    }

    pub(crate) fn down(&self, var: usize, t: usize) -> Option<usize> {
        self.down[var][t].map(|x| x as usize)
    }

    pub fn same_as(&self, other: &Basis) -> bool {
        self.dim == other.dim && self.cap == other.cap
    }
}
