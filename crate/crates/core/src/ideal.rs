//! Monomials, minimal generating sets, generator subsets and the lcm lattice.
//!
//! Everything downstream refers to generators by their index in
//! [`MonomialIdeal::generators`]; a [`GenSubset`] is a bit vector over those
//! indices and a [`TotalOrder`] is a permutation of them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default ceiling on the generator count for anything that walks the power set.
pub const DEFAULT_ENUMERATION_CAP: usize = 25;

/// Exponent vector over a fixed set of `d` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial {
    exps: Vec<u16>,
}

/// Values of the lcm map live in the same exponent space as monomials.
pub type Multidegree = Monomial;

impl Monomial {
    pub fn new(exps: Vec<u16>) -> Self {
        Monomial { exps }
    }

    /// The monomial 1 in `d` variables.
    pub fn one(d: usize) -> Self {
        Monomial { exps: vec![0; d] }
    }

    /// Squarefree monomial on the variables in `mask`.
    pub fn from_support(d: usize, mask: u64) -> Self {
        Monomial {
            exps: (0..d).map(|i| ((mask >> i) & 1) as u16).collect(),
        }
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Highest power of variable `i` dividing the monomial.
    pub fn ord(&self, i: usize) -> u16 {
        self.exps[i]
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| u32::from(e)).sum()
    }

    /// `self | other`, i.e. componentwise `<=`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(&a, &b)| a.max(b)).collect(),
        }
    }

    /// Bit mask of variables with positive exponent (first 64 variables).
    pub fn support(&self) -> u64 {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u64, |acc, (i, _)| acc | (1u64 << i))
    }

    pub fn is_squarefree(&self) -> bool {
        self.exps.iter().all(|&e| e <= 1)
    }

    /// Renders the monomial with the given variable names, `1` for the unit.
    pub fn format(&self, names: &[String]) -> String {
        let factors: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
                if e == 1 {
                    name
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        if factors.is_empty() {
            "1".to_string()
        } else {
            factors.join("*")
        }
    }
}

/// A set of generator indices, stored as a fixed-width bit vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GenSubset(pub u64);

impl GenSubset {
    pub const EMPTY: GenSubset = GenSubset(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            GenSubset(u64::MAX)
        } else {
            GenSubset((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        GenSubset(1u64 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        GenSubset(indices.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        (self.0 >> i) & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        GenSubset(self.0 | (1u64 << i))
    }

    pub fn without(self, i: usize) -> Self {
        GenSubset(self.0 & !(1u64 << i))
    }

    /// Symmetric difference with a single generator.
    pub fn toggle(self, i: usize) -> Self {
        GenSubset(self.0 ^ (1u64 << i))
    }

    pub fn union(self, other: GenSubset) -> Self {
        GenSubset(self.0 | other.0)
    }

    pub fn intersection(self, other: GenSubset) -> Self {
        GenSubset(self.0 & other.0)
    }

    pub fn difference(self, other: GenSubset) -> Self {
        GenSubset(self.0 & !other.0)
    }

    pub fn is_subset(self, other: GenSubset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Member indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    pub fn indices(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Display for GenSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for GenSubset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.indices().serialize(s)
    }
}

impl<'de> Deserialize<'de> for GenSubset {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if v.iter().any(|&i| i >= 64) {
            return Err(serde::de::Error::custom("generator index out of range"));
        }
        Ok(GenSubset::from_indices(v))
    }
}

/// A total order `≻` on generator indices. `ranking()[0]` is the largest.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TotalOrder {
    ranking: Vec<usize>,
    position: Vec<usize>,
}

impl TotalOrder {
    pub fn new(ranking: Vec<usize>) -> Result<Self> {
        let n = ranking.len();
        let mut position = vec![usize::MAX; n];
        for (pos, &g) in ranking.iter().enumerate() {
            if g >= n || position[g] != usize::MAX {
                return Err(Error::InvalidOrder(format!(
                    "{ranking:?} is not a permutation of 0..{n}"
                )));
            }
            position[g] = pos;
        }
        Ok(TotalOrder { ranking, position })
    }

    /// Index order: generator 0 is the largest.
    pub fn identity(n: usize) -> Self {
        TotalOrder {
            ranking: (0..n).collect(),
            position: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }

    /// Rank of generator `g`; 0 is the largest.
    pub fn position(&self, g: usize) -> usize {
        self.position[g]
    }

    pub fn positions(&self) -> &[usize] {
        &self.position
    }

    /// `a ≻ b`.
    pub fn succ(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }

    /// The `≻`-smallest member of `set`.
    pub fn min_of(&self, set: GenSubset) -> Option<usize> {
        set.iter().max_by_key(|&g| self.position[g])
    }

    /// The `≻`-largest member of `set`.
    pub fn max_of(&self, set: GenSubset) -> Option<usize> {
        set.iter().min_by_key(|&g| self.position[g])
    }

    /// Members of `set` sorted `m_1 ≻ m_2 ≻ …`.
    pub fn sorted_desc(&self, set: GenSubset) -> Vec<usize> {
        let mut v = set.indices();
        v.sort_by_key(|&g| self.position[g]);
        v
    }

    /// Generators strictly below `g`, as a mask.
    pub fn below(&self, g: usize) -> GenSubset {
        GenSubset::from_indices(self.ranking[self.position[g] + 1..].iter().copied())
    }

    /// Applies a generator permutation elementwise to the ranking.
    pub fn permuted(&self, perm: &[usize]) -> TotalOrder {
        TotalOrder::new(self.ranking.iter().map(|&g| perm[g]).collect()).expect("permutation of a permutation")
    }
}

impl Serialize for TotalOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.ranking.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TotalOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        TotalOrder::new(v).map_err(serde::de::Error::custom)
    }
}

/// A monomial ideal given by its minimal generators, with stable indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialIdeal {
    generators: Vec<Monomial>,
    names: Vec<String>,
}

impl MonomialIdeal {
    /// Keeps the divisibility-minimal, deduplicated generators in first-occurrence order.
    pub fn normalize_mingens(raw: Vec<Monomial>, names: Vec<String>) -> Result<Self> {
        let first = raw.first().ok_or(Error::EmptyGeneratingSet)?;
        let d = first.nvars();
        for m in &raw {
            if m.nvars() != d {
                return Err(Error::VariableCountMismatch {
                    expected: d,
                    found: m.nvars(),
                });
            }
            if m.is_one() {
                return Err(Error::UnitGenerator);
            }
        }
        let names = if names.len() == d {
            names
        } else {
            (1..=d).map(|i| format!("x{i}")).collect()
        };
        let mut generators: Vec<Monomial> = Vec::new();
        for (i, m) in raw.iter().enumerate() {
            let dominated = raw
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && other.divides(m) && (other != m || j < i));
            if !dominated {
                generators.push(m.clone());
            }
        }
        Ok(MonomialIdeal { generators, names })
    }

    /// Generators named `x1..xd`.
    pub fn from_exponents(raw: Vec<Vec<u16>>) -> Result<Self> {
        Self::normalize_mingens(raw.into_iter().map(Monomial::new).collect(), Vec::new())
    }

    /// Parses one monomial per line, e.g. `x1^2*x3`. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut names: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut rows: Vec<Vec<(usize, u16)>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut row = Vec::new();
            for factor in line.split('*') {
                let factor = factor.trim();
                let (name, exp) = match factor.split_once('^') {
                    Some((n, e)) => {
                        let e: u16 = e.trim().parse().map_err(|_| Error::Parse {
                            line: lineno + 1,
                            message: format!("bad exponent in `{factor}`"),
                        })?;
                        (n.trim(), e)
                    }
                    None => (factor, 1),
                };
                if !valid_name(name) {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        message: format!("bad variable name `{name}`"),
                    });
                }
                if exp == 0 {
                    continue;
                }
                let next = names.len();
                let var = *index.entry(name.to_string()).or_insert_with(|| {
                    names.push(name.to_string());
                    next
                });
                row.push((var, exp));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::EmptyGeneratingSet);
        }
        let d = names.len();
        let mut raw = Vec::with_capacity(rows.len());
        for row in rows {
            let mut exps = vec![0u16; d];
            for (var, e) in row {
                exps[var] = exps[var]
                    .checked_add(e)
                    .ok_or_else(|| Error::ExponentOverflow(names[var].clone()))?;
            }
            raw.push(Monomial::new(exps));
        }
        Self::normalize_mingens(raw, names)
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn generators(&self) -> &[Monomial] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Monomial {
        &self.generators[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn format_generator(&self, i: usize) -> String {
        self.generators[i].format(&self.names)
    }

    pub fn format_monomial(&self, m: &Monomial) -> String {
        m.format(&self.names)
    }

    pub fn full_set(&self) -> GenSubset {
        GenSubset::full(self.ngens())
    }

    pub fn is_squarefree(&self) -> bool {
        self.generators.iter().all(Monomial::is_squarefree)
    }

    /// Whether the monomial `b` lies in the ideal.
    pub fn contains(&self, b: &Monomial) -> bool {
        self.generators.iter().any(|g| g.divides(b))
    }

    pub fn check_subset(&self, sigma: GenSubset) -> Result<()> {
        if sigma.is_subset(self.full_set()) {
            Ok(())
        } else {
            Err(Error::InvalidSubset(sigma.bits()))
        }
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        if self.ngens() > cap.min(63) {
            Err(Error::EnumerationBudget {
                generators: self.ngens(),
                cap,
            })
        } else {
            Ok(())
        }
    }

    /// Componentwise maximum of the members' exponent vectors.
    pub fn lcm_of(&self, sigma: GenSubset) -> Multidegree {
        let mut out = Monomial::one(self.nvars());
        for i in sigma.iter() {
            for (o, &e) in out.exps.iter_mut().zip(&self.generators[i].exps) {
                *o = (*o).max(e);
            }
        }
        out
    }

    /// `{lcm(σ) : σ ⊆ mingens}`, including the unit for the empty set.
    pub fn lcm_lattice(&self, cap: usize) -> Result<BTreeSet<Multidegree>> {
        self.check_cap(cap)?;
        Ok(LcmTable::build(self, cap)?.classes.into_iter().collect())
    }

    /// Renders a subset as its generator strings.
    pub fn format_subset(&self, sigma: GenSubset) -> Vec<String> {
        sigma.iter().map(|i| self.format_generator(i)).collect()
    }

    /// Resolves generator strings (as rendered by `format_generator`) to indices.
    pub fn parse_order(&self, text: &str) -> Result<TotalOrder> {
        let mut ranking = Vec::new();
        for token in text.split(',') {
            let token = token.trim();
            let m = parse_with_names(token, &self.names)?;
            let idx = self
                .generators
                .iter()
                .position(|g| *g == m)
                .ok_or_else(|| Error::InvalidOrder(format!("`{token}` is not a generator")))?;
            ranking.push(idx);
        }
        if ranking.len() != self.ngens() {
            return Err(Error::InvalidOrder(format!(
                "order lists {} generators, the ideal has {}",
                ranking.len(),
                self.ngens()
            )));
        }
        TotalOrder::new(ranking)
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn parse_with_names(token: &str, names: &[String]) -> Result<Monomial> {
    let mut exps = vec![0u16; names.len()];
    for factor in token.split('*') {
        let factor = factor.trim();
        let (name, e) = match factor.split_once('^') {
            Some((n, e)) => (
                n.trim(),
                e.trim()
                    .parse::<u16>()
                    .map_err(|_| Error::InvalidOrder(format!("bad exponent in `{factor}`")))?,
            ),
            None => (factor, 1),
        };
        let var = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidOrder(format!("unknown variable `{name}`")))?;
        exps[var] = exps[var]
            .checked_add(e)
            .ok_or_else(|| Error::ExponentOverflow(name.to_string()))?;
    }
    Ok(Monomial::new(exps))
}

/// Precomputed lcm data over the whole power set of the generators.
///
/// `class[σ]` indexes into `classes`, which is sorted, so class ids follow the
/// lexicographic order of multidegrees. `bridges[σ]` is the bridge mask of σ.
#[derive(Clone, Debug)]
pub struct LcmTable {
    pub n: usize,
    pub class: Vec<u32>,
    pub classes: Vec<Multidegree>,
    pub bridges: Vec<u64>,
}

impl LcmTable {
    pub fn build(ideal: &MonomialIdeal, cap: usize) -> Result<Self> {
        ideal.check_cap(cap)?;
        let n = ideal.ngens();
        let d = ideal.nvars();
        let size = 1usize << n;
        let mut flat = vec![0u16; size * d];
        for s in 1..size {
            let low = s.trailing_zeros() as usize;
            let rest = s & (s - 1);
            let g = ideal.generator(low).exponents();
            for k in 0..d {
                flat[s * d + k] = flat[rest * d + k].max(g[k]);
            }
        }
        let mut ids: HashMap<&[u16], u32> = HashMap::new();
        let mut raw_class = vec![0u32; size];
        for s in 0..size {
            let key = &flat[s * d..(s + 1) * d];
            let next = ids.len() as u32;
            raw_class[s] = *ids.entry(key).or_insert(next);
        }
        let mut distinct: Vec<(Multidegree, u32)> =
            ids.iter().map(|(k, &id)| (Monomial::new(k.to_vec()), id)).collect();
        distinct.sort();
        let mut remap = vec![0u32; distinct.len()];
        for (new_id, (_, old)) in distinct.iter().enumerate() {
            remap[*old as usize] = new_id as u32;
        }
        let class: Vec<u32> = raw_class.iter().map(|&c| remap[c as usize]).collect();
        let classes: Vec<Multidegree> = distinct.into_iter().map(|(m, _)| m).collect();
        let bridges = (0..size)
            .map(|s| {
                let mut mask = 0u64;
                let mut rest = s as u64;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    if class[s ^ bit as usize] == class[s] {
                        mask |= bit;
                    }
                    rest ^= bit;
                }
                mask
            })
            .collect();
        Ok(LcmTable {
            n,
            class,
            classes,
            bridges,
        })
    }

    pub fn size(&self) -> usize {
        self.class.len()
    }

    pub fn lcm(&self, sigma: GenSubset) -> &Multidegree {
        &self.classes[self.class[sigma.bits() as usize] as usize]
    }

    pub fn class_of(&self, sigma: GenSubset) -> usize {
        self.class[sigma.bits() as usize] as usize
    }

    pub fn class_id(&self, m: &Multidegree) -> Option<usize> {
        self.classes.binary_search(m).ok()
    }

    pub fn bridges(&self, sigma: GenSubset) -> GenSubset {
        GenSubset(self.bridges[sigma.bits() as usize])
    }

    pub fn gaps(&self, sigma: GenSubset) -> GenSubset {
        let s = sigma.bits() as usize;
        let mut mask = 0u64;
        for g in 0..self.n {
            if s >> g & 1 == 0 && self.class[s | (1 << g)] == self.class[s] {
                mask |= 1 << g;
            }
        }
        GenSubset(mask)
    }

    /// Subsets grouped by lcm class.
    pub fn members_by_class(&self) -> Vec<Vec<GenSubset>> {
        let mut out = vec![Vec::new(); self.classes.len()];
        for (s, &c) in self.class.iter().enumerate() {
            out[c as usize].push(GenSubset(s as u64));
        }
        out
    }
}
