//! Finite permutation groups, their actions on finite sets, and the
//! one-dimensional rotation characters used for local data at fixed points.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cyclotomic::{lcm_all, RootSum};

/// Default bound on the order of an enumerated group.
pub const DEFAULT_GROUP_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("generator {index} has degree {found}, expected {expected}")]
    DegreeMismatch {
        index: usize,
        found: usize,
        expected: usize,
    },
    #[error("group too large: order exceeds the cap of {cap}")]
    TooLarge { cap: usize },
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("not a group action: {0}")]
    NotAnAction(String),
    #[error("inconsistent character data: {0}")]
    InconsistentCharacter(String),
}

/// A permutation of `{0, .., n-1}`, stored by its images.
///
/// Composition follows function notation: `a.compose(&b)` applies `b` first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, GroupError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(GroupError::InvalidPermutation(format!(
                    "{images:?} is not a bijection of 0..{n}"
                )));
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    /// Builds a permutation of degree `n` from disjoint cycles of 0-based points.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, GroupError> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                if a >= n {
                    return Err(GroupError::InvalidPermutation(format!(
                        "point {a} out of range for degree {n}"
                    )));
                }
                if used[a] {
                    return Err(GroupError::InvalidPermutation(format!(
                        "point {a} appears in more than one cycle position"
                    )));
                }
                used[a] = true;
                images[a] = cycle[(k + 1) % cycle.len()];
            }
        }
        Ok(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Disjoint cycles of length at least 2, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.0[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut j = self.0[start];
            while j != start {
                seen[j] = true;
                cycle.push(j);
                j = self.0[j];
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// A character value `exp(2πi·a/e)` of a finite-order element on a line,
/// stored as the reduced fraction `a/e` with `0 ≤ a < e`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RotationChar {
    num: u64,
    den: u64,
}

impl RotationChar {
    pub const TRIVIAL: RotationChar = RotationChar { num: 0, den: 1 };

    /// Accepts only reduced fractions in `[0, 1)`: `0/1` or `a/e` with `gcd(a, e) = 1`.
    pub fn new(num: u64, den: u64) -> Result<Self, CharParseError> {
        if den == 0 {
            return Err(CharParseError::ZeroDenominator);
        }
        if num >= den {
            return Err(CharParseError::OutOfRange(format!("{num}/{den}")));
        }
        let g = num.gcd(&den);
        if g != 1 {
            let (a, e) = (num / g, den / g);
            return Err(CharParseError::NotReduced {
                given: format!("{num}/{den}"),
                expected: format!("{a}/{e}"),
            });
        }
        Ok(RotationChar { num, den })
    }

    /// Reduces an arbitrary fraction modulo 1.
    pub fn from_fraction(num: i64, den: u64) -> Self {
        assert!(den > 0);
        let d = den as i64;
        let a = num.rem_euclid(d) as u64;
        let g = a.gcd(&den);
        if a == 0 {
            RotationChar::TRIVIAL
        } else {
            RotationChar {
                num: a / g,
                den: den / g,
            }
        }
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    /// The multiplicative order of the character value.
    pub fn order(self) -> u64 {
        self.den
    }

    pub fn is_trivial(self) -> bool {
        self.num == 0
    }

    /// The product of character values (sum of rotation numbers).
    pub fn mul(self, other: RotationChar) -> RotationChar {
        let den = self.den.lcm(&other.den);
        let num = self.num * (den / self.den) + other.num * (den / other.den);
        RotationChar::from_fraction(num as i64, den)
    }

    pub fn inverse(self) -> RotationChar {
        RotationChar::from_fraction(-(self.num as i64), self.den)
    }

    pub fn pow(self, k: i64) -> RotationChar {
        let num = (self.num as i128 * k as i128).rem_euclid(self.den as i128) as i64;
        RotationChar::from_fraction(num, self.den)
    }
}

impl fmt::Debug for RotationChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Display for RotationChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharParseError {
    #[error("malformed character {0:?}, expected \"a/e\"")]
    Malformed(String),
    #[error("character denominator must be positive")]
    ZeroDenominator,
    #[error("character {0} must satisfy 0 <= a < e")]
    OutOfRange(String),
    #[error("character {given} is not reduced (expected {expected})")]
    NotReduced { given: String, expected: String },
}

impl FromStr for RotationChar {
    type Err = CharParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, e) = s
            .split_once('/')
            .ok_or_else(|| CharParseError::Malformed(s.to_string()))?;
        let parse = |t: &str| {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(CharParseError::Malformed(s.to_string()));
            }
            t.parse::<u64>()
                .map_err(|_| CharParseError::Malformed(s.to_string()))
        };
        RotationChar::new(parse(a)?, parse(e)?)
    }
}

impl Serialize for RotationChar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RotationChar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A subgroup, as the sorted list of its element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup(Vec<usize>);

impl Subgroup {
    pub fn elements(&self) -> &[usize] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.0.binary_search(&g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.len() == 1
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.0.iter().all(|&g| other.contains(g))
    }
}

/// A character of a subgroup: element index to rotation number.
pub type CharTable = BTreeMap<usize, RotationChar>;

/// A borrowed view of one group element.
#[derive(Debug, Clone, Copy)]
pub struct GroupElement<'g> {
    pub index: usize,
    pub perm: &'g Perm,
}

/// A finite group of permutations with its full element table.
///
/// Element 0 is the identity; the remaining elements are listed breadth
/// first by word length in the generators, each level in lexicographic
/// order of the permutation images.
#[derive(Clone)]
pub struct FiniteGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
    lookup: HashMap<Perm, usize>,
    generator_index: Vec<usize>,
    inverse: Vec<usize>,
    // generator_mul[s][g] = index of generators[s] ∘ elements[g]
    generator_mul: Vec<Vec<usize>>,
    table: Option<Vec<u32>>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("degree", &self.degree)
            .field("generators", &self.generators)
            .field("order", &self.elements.len())
            .finish()
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.generators == other.generators
    }
}

impl Eq for FiniteGroup {}

const TABLE_LIMIT: usize = 1024;

impl FiniteGroup {
    pub fn enumerate(generators: Vec<Perm>, degree: usize) -> Result<Self, GroupError> {
        Self::enumerate_with_cap(generators, degree, DEFAULT_GROUP_CAP)
    }

    pub fn enumerate_with_cap(
        generators: Vec<Perm>,
        degree: usize,
        cap: usize,
    ) -> Result<Self, GroupError> {
        if degree == 0 {
            return Err(GroupError::ZeroDegree);
        }
        for (index, g) in generators.iter().enumerate() {
            if g.degree() != degree {
                return Err(GroupError::DegreeMismatch {
                    index,
                    found: g.degree(),
                    expected: degree,
                });
            }
        }
        let id = Perm::identity(degree);
        let mut elements = vec![id.clone()];
        let mut lookup = HashMap::new();
        lookup.insert(id, 0usize);
        let mut level = vec![0usize];
        while !level.is_empty() {
            let mut next: BTreeSet<Perm> = BTreeSet::new();
            for &g in &level {
                for s in &generators {
                    let h = s.compose(&elements[g]);
                    if !lookup.contains_key(&h) {
                        next.insert(h);
                    }
                }
            }
            level = Vec::with_capacity(next.len());
            for h in next {
                if elements.len() >= cap {
                    return Err(GroupError::TooLarge { cap });
                }
                lookup.insert(h.clone(), elements.len());
                level.push(elements.len());
                elements.push(h);
            }
        }
        let n = elements.len();
        let inverse = elements.iter().map(|p| lookup[&p.inverse()]).collect();
        let generator_mul: Vec<Vec<usize>> = generators
            .iter()
            .map(|s| elements.iter().map(|g| lookup[&s.compose(g)]).collect())
            .collect();
        let generator_index = generators.iter().map(|s| lookup[s]).collect();
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(n * n);
            for a in &elements {
                for b in &elements {
                    t.push(lookup[&a.compose(b)] as u32);
                }
            }
            t
        });
        Ok(FiniteGroup {
            degree,
            generators,
            elements,
            lookup,
            generator_index,
            inverse,
            generator_mul,
            table,
        })
    }

    pub fn trivial() -> Self {
        Self::enumerate(Vec::new(), 1).expect("trivial group")
    }

    /// The cyclic group of order `n` acting regularly on `n` points.
    pub fn cyclic(n: usize) -> Self {
        let gens = if n > 1 {
            vec![Perm::from_cycles(n, &[(0..n).collect()]).expect("cycle")]
        } else {
            Vec::new()
        };
        Self::enumerate(gens, n.max(1)).expect("cyclic group")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Element indices of the generators, in generator order.
    pub fn generator_indices(&self) -> &[usize] {
        &self.generator_index
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn element(&self, index: usize) -> GroupElement<'_> {
        GroupElement {
            index,
            perm: &self.elements[index],
        }
    }

    pub fn perm(&self, index: usize) -> &Perm {
        &self.elements[index]
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement<'_>> {
        self.elements
            .iter()
            .enumerate()
            .map(|(index, perm)| GroupElement { index, perm })
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    /// Index of `a ∘ b`.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.elements.len() + b] as usize,
            None => self.lookup[&self.elements[a].compose(&self.elements[b])],
        }
    }

    /// Index of `generators[s] ∘ g`.
    #[inline]
    pub fn generator_mul(&self, s: usize, g: usize) -> usize {
        self.generator_mul[s][g]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// `t ∘ h ∘ t⁻¹`.
    pub fn conjugate(&self, h: usize, t: usize) -> usize {
        self.mul(self.mul(t, h), self.inv(t))
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Least `k ≥ 1` with `a^k ∈ sub`.
    pub fn order_modulo(&self, a: usize, sub: &Subgroup) -> usize {
        let mut x = a;
        let mut k = 1;
        while !sub.contains(x) {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        let g = self.generator_indices();
        g.iter()
            .all(|&a| g.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// The subgroup generated by `gens`.
    pub fn generated(&self, gens: &[usize]) -> Subgroup {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![0];
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out.sort_unstable();
        Subgroup(out)
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup(vec![0])
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup((0..self.order()).collect())
    }

    /// Builds a subgroup from an explicit element list, checking closure.
    pub fn subgroup_from_elements(&self, mut elems: Vec<usize>) -> Option<Subgroup> {
        elems.sort_unstable();
        elems.dedup();
        let sub = self.generated(&elems);
        (sub.0 == elems).then_some(sub)
    }

    pub fn conjugate_subgroup(&self, sub: &Subgroup, t: usize) -> Subgroup {
        let mut v: Vec<usize> = sub.0.iter().map(|&h| self.conjugate(h, t)).collect();
        v.sort_unstable();
        Subgroup(v)
    }

    pub fn intersection(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        Subgroup(a.0.iter().copied().filter(|&g| b.contains(g)).collect())
    }

    /// Whether `sub` is normalized by every element of `ambient`.
    pub fn is_normal_in(&self, sub: &Subgroup, ambient: &Subgroup) -> bool {
        ambient
            .0
            .iter()
            .all(|&t| sub.0.iter().all(|&h| sub.contains(self.conjugate(h, t))))
    }

    pub fn normalizer(&self, sub: &Subgroup) -> Subgroup {
        Subgroup(
            (0..self.order())
                .filter(|&t| sub.0.iter().all(|&h| sub.contains(self.conjugate(h, t))))
                .collect(),
        )
    }

    /// A small generating set of `sub` chosen greedily in index order.
    pub fn generating_set(&self, sub: &Subgroup) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut current = self.trivial_subgroup();
        for &g in &sub.0 {
            if !current.contains(g) {
                gens.push(g);
                current = self.generated(&gens);
            }
        }
        gens
    }

    /// All subgroups, sorted by (order, elements).
    pub fn all_subgroups(&self) -> Vec<Subgroup> {
        let mut set: BTreeSet<Subgroup> = (0..self.order()).map(|g| self.generated(&[g])).collect();
        loop {
            let current: Vec<Subgroup> = set.iter().cloned().collect();
            let mut added = false;
            for (i, a) in current.iter().enumerate() {
                for b in &current[i + 1..] {
                    let mut gens = self.generating_set(a);
                    gens.extend(self.generating_set(b));
                    if set.insert(self.generated(&gens)) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        let mut v: Vec<Subgroup> = set.into_iter().collect();
        v.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
        v
    }

    /// Closes a partial assignment of rotation numbers under multiplication.
    ///
    /// Returns the unique character on the subgroup generated by the seed
    /// elements, or the first element at which two products disagree.
    pub fn extend_character(
        &self,
        seeds: &[(usize, RotationChar)],
    ) -> Result<CharTable, CharacterConflict> {
        let mut table = CharTable::new();
        table.insert(0, RotationChar::TRIVIAL);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let cx = table[&x];
            for &(d, v) in seeds {
                let y = self.mul(x, d);
                let val = cx.mul(v);
                match table.get(&y) {
                    Some(&old) if old != val => {
                        return Err(CharacterConflict {
                            element: y,
                            first: old,
                            second: val,
                        })
                    }
                    Some(_) => {}
                    None => {
                        table.insert(y, val);
                        queue.push_back(y);
                    }
                }
            }
        }
        Ok(table)
    }

    /// Every linear character of `sub` with values in the rotation numbers.
    pub fn linear_characters(&self, sub: &Subgroup) -> Vec<CharTable> {
        let gens = self.generating_set(sub);
        let orders: Vec<u64> = gens.iter().map(|&g| self.element_order(g) as u64).collect();
        let mut out = Vec::new();
        let mut choice = vec![0u64; gens.len()];
        loop {
            let seeds: Vec<(usize, RotationChar)> = gens
                .iter()
                .zip(&choice)
                .zip(&orders)
                .map(|((&g, &a), &e)| (g, RotationChar::from_fraction(a as i64, e)))
                .collect();
            if let Ok(t) = self.extend_character(&seeds) {
                out.push(t);
            }
            // odometer
            let mut i = 0;
            loop {
                if i == choice.len() {
                    return out;
                }
                choice[i] += 1;
                if choice[i] < orders[i] {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }

    /// Exhaustive check of closure, identity and inverses.
    pub fn check_axioms(&self) -> bool {
        let n = self.order();
        if !self.elements[0].is_identity() {
            return false;
        }
        for a in 0..n {
            if self.mul(a, self.inv(a)) != 0 {
                return false;
            }
            for b in 0..n {
                let c = self.elements[a].compose(&self.elements[b]);
                if self.lookup.get(&c) != Some(&self.mul(a, b)) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterConflict {
    pub element: usize,
    pub first: RotationChar,
    pub second: RotationChar,
}

/// A G-orbit with its canonical (least) representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub representative: usize,
    /// Sorted points of the orbit.
    pub points: Vec<usize>,
    /// `transversal[i]` maps the representative to `points[i]`.
    pub transversal: Vec<usize>,
    pub stabilizer: Subgroup,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// An element carrying the representative to `point`.
    pub fn transporter(&self, point: usize) -> Option<usize> {
        self.points
            .binary_search(&point)
            .ok()
            .map(|i| self.transversal[i])
    }
}

/// A permutation action of a group on `{0, .., n-1}`, materialized per element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermAction {
    points: usize,
    images: Vec<Perm>,
}

impl PermAction {
    /// The action of `group` on the points of its own degree.
    pub fn natural(group: &FiniteGroup) -> Self {
        PermAction {
            points: group.degree(),
            images: group.elements().map(|e| e.perm.clone()).collect(),
        }
    }

    pub fn trivial(group: &FiniteGroup, points: usize) -> Self {
        PermAction {
            points,
            images: vec![Perm::identity(points); group.order()],
        }
    }

    /// Extends generator images to every element, checking that the
    /// images define a homomorphism on the whole element table.
    pub fn from_generators(
        group: &FiniteGroup,
        generator_images: &[Perm],
        points: usize,
    ) -> Result<Self, GroupError> {
        if generator_images.len() != group.generators().len() {
            return Err(GroupError::NotAnAction(format!(
                "{} generator images given for {} generators",
                generator_images.len(),
                group.generators().len()
            )));
        }
        for (i, p) in generator_images.iter().enumerate() {
            if p.degree() != points {
                return Err(GroupError::NotAnAction(format!(
                    "image of generator {i} acts on {} points, expected {points}",
                    p.degree()
                )));
            }
        }
        let n = group.order();
        let mut images: Vec<Option<Perm>> = vec![None; n];
        images[0] = Some(Perm::identity(points));
        let mut queue = VecDeque::from([0usize]);
        while let Some(g) = queue.pop_front() {
            let img_g = images[g].clone().expect("assigned");
            for (s, img_s) in generator_images.iter().enumerate() {
                let h = group.generator_mul(s, g);
                let img_h = img_s.compose(&img_g);
                match &images[h] {
                    Some(existing) if *existing != img_h => {
                        return Err(GroupError::NotAnAction(format!(
                            "element {} receives two different images {} and {}",
                            group.perm(h),
                            existing,
                            img_h
                        )));
                    }
                    Some(_) => {}
                    None => {
                        images[h] = Some(img_h);
                        queue.push_back(h);
                    }
                }
            }
        }
        let images: Vec<Perm> = images.into_iter().map(|p| p.expect("connected Cayley graph")).collect();
        if !images[0].is_identity() {
            return Err(GroupError::NotAnAction("identity acts nontrivially".into()));
        }
        Ok(PermAction { points, images })
    }

    pub fn num_points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn image(&self, g: usize, x: usize) -> usize {
        self.images[g].apply(x)
    }

    pub fn perm_of(&self, g: usize) -> &Perm {
        &self.images[g]
    }

    pub fn fixes(&self, g: usize, x: usize) -> bool {
        self.image(g, x) == x
    }

    pub fn stabilizer(&self, x: usize) -> Subgroup {
        Subgroup((0..self.images.len()).filter(|&g| self.fixes(g, x)).collect())
    }

    /// Partition of `points` into orbits, ordered by representative.
    ///
    /// `points` must be a union of orbits.
    pub fn orbits_of(&self, group: &FiniteGroup, points: &[usize]) -> Vec<Orbit> {
        let mut done = vec![false; self.points];
        let mut sorted: Vec<usize> = points.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut out = Vec::new();
        for &rep in &sorted {
            if done[rep] {
                continue;
            }
            let mut found: BTreeMap<usize, usize> = BTreeMap::new();
            found.insert(rep, 0);
            let mut queue = VecDeque::from([rep]);
            while let Some(x) = queue.pop_front() {
                let t = found[&x];
                for s in 0..group.generators().len() {
                    let y = self.images[group.generator_indices()[s]].apply(x);
                    if let std::collections::btree_map::Entry::Vacant(e) = found.entry(y) {
                        e.insert(group.generator_mul(s, t));
                        queue.push_back(y);
                    }
                }
            }
            for &p in found.keys() {
                done[p] = true;
            }
            let (pts, trans): (Vec<usize>, Vec<usize>) = found.into_iter().unzip();
            out.push(Orbit {
                representative: rep,
                points: pts,
                transversal: trans,
                stabilizer: self.stabilizer(rep),
            });
        }
        out
    }

    pub fn orbits(&self, group: &FiniteGroup) -> Vec<Orbit> {
        let all: Vec<usize> = (0..self.points).collect();
        self.orbits_of(group, &all)
    }
}

/// Dimension of the invariants of a monomial representation with
/// one-dimensional fibers, computed as the trace average
/// `(1/|G|) Σ_g Σ_{p = g·p} χ(g, p)` in exact cyclotomic arithmetic.
///
/// `chars(g, p)` must be defined whenever `g` fixes `p`.
pub fn invariant_dimension_trace<F>(
    group: &FiniteGroup,
    action: &PermAction,
    chars: F,
) -> Result<usize, GroupError>
where
    F: Fn(usize, usize) -> Option<RotationChar>,
{
    let mut values: Vec<RotationChar> = Vec::new();
    for g in 0..group.order() {
        for p in 0..action.num_points() {
            if action.fixes(g, p) {
                let c = chars(g, p).ok_or_else(|| {
                    GroupError::InconsistentCharacter(format!(
                        "no character given for {} at fixed point {p}",
                        group.perm(g)
                    ))
                })?;
                values.push(c);
            }
        }
    }
    let n = lcm_all(values.iter().map(|c| c.order())) as usize;
    let mut sum = RootSum::new(n);
    for c in &values {
        sum.add_root(c.numerator(), c.order());
    }
    let total = sum.as_integer().ok_or_else(|| {
        GroupError::InconsistentCharacter("trace sum is not a rational integer".into())
    })?;
    let order = group.order() as i128;
    if total < 0 || total % order != 0 {
        return Err(GroupError::InconsistentCharacter(format!(
            "trace sum {total} is not a nonnegative multiple of |G| = {order}"
        )));
    }
    Ok((total / order) as usize)
}

/// Dimension of the invariants by orbit counting: an orbit contributes one
/// dimension exactly when the stabilizer of its representative acts
/// trivially on the fiber there.
pub fn invariant_dimension_orbits<F>(group: &FiniteGroup, action: &PermAction, chars: F) -> usize
where
    F: Fn(usize, usize) -> Option<RotationChar>,
{
    action
        .orbits(group)
        .iter()
        .filter(|o| {
            o.stabilizer
                .elements()
                .iter()
                .all(|&h| chars(h, o.representative).is_some_and(|c| c.is_trivial()))
        })
        .count()
}
