//! Multiset combinatorics of the cells of the complex of cycles for a fixed
//! primitive class x: membership in the characterized families, the 102
//! maximal multisets over a Lagrangian triple, face enumeration, the
//! relation-lattice taxonomy, and the n-weight.
//!
//! Membership in the cell set is certified only through the characterized
//! families (the rank-m summand criterion for vertices, the 102 maximal
//! multisets over a triple, and the five-element family {x, c1, x-c1, c2,
//! x-c2}); anything else is reported as outside the taxonomy.

use crate::homlattice::{combinations, intersection, is_isotropic_direct_summand, HClass};
use crate::zmat;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A sorted multiset of nonzero homology classes; at most one element may
/// have multiplicity 2 (a genus-3 multicurve contains at most one bounding
/// pair) and none may exceed it.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<HClass>", into = "Vec<HClass>")]
pub struct HMultiset {
    elems: Vec<HClass>,
}

impl std::fmt::Debug for HMultiset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.elems).finish()
    }
}

impl TryFrom<Vec<HClass>> for HMultiset {
    type Error = Error;
    fn try_from(v: Vec<HClass>) -> Result<Self> {
        HMultiset::new(v)
    }
}

impl From<HMultiset> for Vec<HClass> {
    fn from(m: HMultiset) -> Vec<HClass> {
        m.elems
    }
}

impl HMultiset {
    pub fn new(mut elems: Vec<HClass>) -> Result<Self> {
        if elems.iter().any(HClass::is_zero) {
            return Err(Error::ZeroClass);
        }
        elems.sort();
        let mut doubled = 0usize;
        for w in elems.windows(2) {
            if w[0] == w[1] {
                doubled += 1;
            }
        }
        for w in elems.windows(3) {
            if w[0] == w[2] {
                return Err(Error::Invalid("multiplicity above 2".into()));
            }
        }
        if doubled > 1 {
            return Err(Error::Invalid("more than one doubled element".into()));
        }
        Ok(HMultiset { elems })
    }

    pub fn elems(&self) -> &[HClass] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn distinct(&self) -> Vec<HClass> {
        let mut d = self.elems.clone();
        d.dedup();
        d
    }

    pub fn doubled_element(&self) -> Option<&HClass> {
        self.elems.windows(2).find(|w| w[0] == w[1]).map(|w| &w[0])
    }

    pub fn multiplicity(&self, c: &HClass) -> usize {
        self.elems.iter().filter(|e| *e == c).count()
    }

    pub fn contains(&self, c: &HClass) -> bool {
        self.elems.binary_search(c).is_ok()
    }

    /// Multiset inclusion.
    pub fn includes(&self, other: &HMultiset) -> bool {
        other
            .distinct()
            .iter()
            .all(|c| other.multiplicity(c) <= self.multiplicity(c))
    }

    pub fn union_with(&self, extra: &[HClass]) -> Result<HMultiset> {
        let mut v = self.elems.clone();
        v.extend(extra.iter().cloned());
        HMultiset::new(v)
    }

    pub fn remove_one(&self, c: &HClass) -> Option<HMultiset> {
        let idx = self.elems.iter().position(|e| e == c)?;
        let mut v = self.elems.clone();
        v.remove(idx);
        Some(HMultiset { elems: v })
    }

    pub fn rank(&self) -> usize {
        let d = self.distinct();
        if d.is_empty() {
            return 0;
        }
        zmat::rank(&d.iter().map(|c| c.0.to_vec()).collect())
    }

    /// dim P_M = |M| - rank M.
    pub fn dimension(&self) -> usize {
        self.len() - self.rank()
    }

    /// All nonempty sub-multisets.
    pub fn sub_multisets(&self) -> Vec<HMultiset> {
        let d = self.distinct();
        let mut out = Vec::new();
        let mut stack: Vec<Vec<HClass>> = vec![Vec::new()];
        for c in d {
            let mult = self.multiplicity(&c);
            let mut next = Vec::new();
            for partial in stack {
                for take in 0..=mult {
                    let mut p = partial.clone();
                    for _ in 0..take {
                        p.push(c.clone());
                    }
                    next.push(p);
                }
            }
            stack = next;
        }
        for v in stack {
            if !v.is_empty() {
                out.push(HMultiset { elems: v });
            }
        }
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Taxonomy {
    H0,
    H0Prime,
    H1Type1,
    H1Type2 { special: HClass },
    H2Prime { principal: HClass },
    BoundingPair { doubled: HClass },
    Other,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CellClass {
    pub multiset: HMultiset,
    pub taxonomy: Taxonomy,
    pub dimension: usize,
}

/// Positive-integer decomposition x = sum n_i a_i over the (independent)
/// elements; None when no positive integral solution exists.
pub fn positive_decomposition(classes: &[HClass], x: &HClass) -> Option<Vec<BigInt>> {
    let cols: Vec<Vec<BigInt>> = classes.iter().map(|c| c.0.to_vec()).collect();
    let t = zmat::solve_columns(&cols, &x.0)?;
    let mut out = Vec::with_capacity(t.len());
    for q in t {
        if !q.is_integer() {
            return None;
        }
        let n = q.to_integer();
        if n <= BigInt::zero() {
            return None;
        }
        out.push(n);
    }
    Some(out)
}

/// The rank-m vertex criterion: a basis of an isotropic direct summand with
/// x a strictly positive integer combination.
pub fn is_in_h0(classes: &[HClass], x: &HClass) -> Result<bool> {
    if !crate::homlattice::is_primitive(x)? {
        return Err(Error::NotPrimitive);
    }
    if classes.is_empty() || classes.len() > 3 {
        return Ok(false);
    }
    let mut sorted = classes.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != classes.len() {
        return Ok(false);
    }
    if !is_isotropic_direct_summand(classes)? {
        return Ok(false);
    }
    Ok(positive_decomposition(classes, x).is_some())
}

/// Vertex criterion restricted to three-element sets.
pub fn is_in_h0_prime(classes: &[HClass], x: &HClass) -> Result<bool> {
    Ok(classes.len() == 3 && is_in_h0(classes, x)?)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightN {
    pub parts: Vec<BigInt>,
    pub total: BigInt,
}

impl Serialize for WeightN {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("WeightN", 2)?;
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        st.serialize_field("parts", &parts)?;
        st.serialize_field("total", &self.total.to_string())?;
        st.end()
    }
}

/// n(A) = n1 + n2 + n3 for A in H0'.
pub fn n_weight(a: &[HClass], x: &HClass) -> Result<WeightN> {
    if !is_in_h0_prime(a, x)? {
        return Err(Error::NotInH0Prime);
    }
    let parts = positive_decomposition(a, x).expect("checked by membership");
    let total = parts.iter().sum();
    Ok(WeightN { parts, total })
}

/// The 102 maximal multisets over A = {a1, a2, a3}, instantiated from the 14
/// parametric families, deduplicated, in canonical order.
pub fn supersets_in_h(a: &[HClass], x: &HClass) -> Result<Vec<HMultiset>> {
    let (list, _) = supersets_with_family_counts(a, x)?;
    Ok(list)
}

/// Same as `supersets_in_h` but also reports how many distinct multisets
/// each of the 14 templates contributes.
pub fn supersets_with_family_counts(
    a: &[HClass],
    x: &HClass,
) -> Result<(Vec<HMultiset>, Vec<usize>)> {
    if !is_in_h0_prime(a, x)? {
        return Err(Error::NotInH0Prime);
    }
    let sum3 = &(&a[0] + &a[1]) + &a[2];
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let signs = [1i64, -1];

    let mut families: Vec<BTreeSet<HMultiset>> = vec![BTreeSet::new(); 14];
    let base = |extra: Vec<HClass>| -> HMultiset {
        let mut v = vec![a[0].clone(), a[1].clone(), a[2].clone()];
        v.extend(extra);
        HMultiset::new(v).expect("family instantiation")
    };
    let doubled_base = |i: usize, j: usize, k: usize, extra: Vec<HClass>| -> HMultiset {
        let mut v = vec![a[i].clone(), a[i].clone(), a[j].clone(), a[k].clone()];
        v.extend(extra);
        HMultiset::new(v).expect("family instantiation")
    };

    for [i, j, k] in perms {
        let (ai, aj, ak) = (&a[i], &a[j], &a[k]);
        families[0].insert(base(vec![ai + aj, aj + ak, sum3.clone()]));
        for e in signs {
            families[1].insert(base(vec![ai + aj, ak - aj, (&(ai + aj) - ak).scaled(e)]));
        }
        families[2].insert(base(vec![ai + aj, aj - ak, &(ai + aj) - ak]));
        for e1 in signs {
            for e2 in signs {
                families[3].insert(base(vec![
                    (ai - ak).scaled(e1),
                    (aj - ak).scaled(e2),
                    &(ai + aj) - ak,
                ]));
            }
        }
        families[4].insert(base(vec![ak - ai, ak - aj, &(ak - ai) - aj]));
        families[5].insert(base(vec![ai + aj, aj + ak, ai - ak]));
        families[6].insert(base(vec![ai - aj, aj - ak, ai - ak]));
        families[7].insert(base(vec![ai + aj, ai + aj, sum3.clone()]));
        for e in signs {
            families[8].insert(base(vec![ai + aj, ai + aj, (&(ai + aj) - ak).scaled(e)]));
            families[9].insert(base(vec![ai - aj, ai - aj, (&(aj - ai) + ak).scaled(e)]));
        }
        families[10].insert(base(vec![ai - aj, ai - aj, &(ai - aj) + ak]));
        families[11].insert(doubled_base(i, j, k, vec![ai + aj, ai + ak]));
        for e in signs {
            families[12].insert(doubled_base(i, j, k, vec![ai + aj, (ai - ak).scaled(e)]));
            for e2 in signs {
                families[13].insert(doubled_base(
                    i,
                    j,
                    k,
                    vec![(ai - aj).scaled(e), (ai - ak).scaled(e2)],
                ));
            }
        }
    }

    let counts: Vec<usize> = families.iter().map(BTreeSet::len).collect();
    let mut all: BTreeSet<HMultiset> = BTreeSet::new();
    for f in &families {
        all.extend(f.iter().cloned());
    }
    Ok((all.into_iter().collect(), counts))
}

fn one_sided_relation_free(c: &HMultiset) -> bool {
    // no nonempty selection of elements (respecting multiplicity) sums to 0
    let d = c.distinct();
    let mults: Vec<usize> = d.iter().map(|e| c.multiplicity(e)).collect();
    let mut choice = vec![0usize; d.len()];
    loop {
        let mut pos = 0;
        loop {
            if pos == d.len() {
                return true;
            }
            choice[pos] += 1;
            if choice[pos] <= mults[pos] {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
        let mut total = HClass::zero();
        for (idx, &m) in choice.iter().enumerate() {
            for _ in 0..m {
                total = &total + &d[idx];
            }
        }
        if total.is_zero() {
            return false;
        }
    }
}

fn basic_cycle_condition(c: &HMultiset, x: &HClass) -> bool {
    let d = c.distinct();
    let r = c.rank();
    d.iter().all(|elem| {
        for size in 1..=r.min(d.len()) {
            for subset in combinations(&d, size) {
                if !subset.contains(elem) {
                    continue;
                }
                if zmat::rank(&subset.iter().map(|s| s.0.to_vec()).collect()) < subset.len() {
                    continue;
                }
                if positive_decomposition(&subset, x).is_some() {
                    return true;
                }
            }
        }
        false
    })
}

/// Relative cell-set membership: C against a certified ambient D. True iff
/// every element of C lies in the support of a basic cycle for x inside C
/// and C has no one-sided relations.
pub fn is_in_m_relative(c: &HMultiset, d: &HMultiset, x: &HClass) -> Result<bool> {
    if !d.includes(c) {
        return Err(Error::NotASubset);
    }
    Ok(one_sided_relation_free(c) && basic_cycle_condition(c, x))
}

/// Search for a three-element H0' subset of C.
pub fn find_h0prime_subset(c: &HMultiset, x: &HClass) -> Option<Vec<HClass>> {
    let d = c.distinct();
    for subset in combinations(&d, 3) {
        if is_in_h0_prime(&subset, x).ok()? {
            return Some(subset);
        }
    }
    None
}

/// Detect the five-element family {x, c1, x-c1, c2, x-c2}: the distinct
/// elements of C other than x must pair up as (c, x-c), and {x, c1, c2}
/// must span a Lagrangian.
fn special_family_of(c: &HMultiset, x: &HClass) -> Option<HMultiset> {
    if c.doubled_element().is_some() {
        return None;
    }
    let mut rest: Vec<HClass> = c.distinct().into_iter().filter(|e| e != x).collect();
    let mut reps = Vec::new();
    while let Some(u) = rest.pop() {
        let partner = x - &u;
        let idx = rest.iter().position(|e| *e == partner)?;
        rest.remove(idx);
        reps.push(u);
    }
    if reps.len() != 2 {
        return None;
    }
    let lagrangian = [x.clone(), reps[0].clone(), reps[1].clone()];
    if !is_isotropic_direct_summand(&lagrangian).ok()? {
        return None;
    }
    let family = HMultiset::new(vec![
        x.clone(),
        reps[0].clone(),
        x - &reps[0],
        reps[1].clone(),
        x - &reps[1],
    ])
    .ok()?;
    if !family.includes(c) {
        return None;
    }
    let d = family.distinct();
    for (i, u) in d.iter().enumerate() {
        for v in &d[i..] {
            if !intersection(u, v).is_zero() {
                return None;
            }
        }
    }
    Some(family)
}

/// Certify membership through one of the characterized families; returns the
/// ambient maximal multiset used.
pub fn certify(c: &HMultiset, x: &HClass) -> Result<HMultiset> {
    if !crate::homlattice::is_primitive(x)? {
        return Err(Error::NotPrimitive);
    }
    if c.len() <= 3 && c.doubled_element().is_none() && is_in_h0(&c.distinct(), x)? {
        return Ok(c.clone());
    }
    if let Some(a) = find_h0prime_subset(c, x) {
        for e in supersets_in_h(&a, x)? {
            if e.includes(c) && is_in_m_relative(c, &e, x)? {
                return Ok(e);
            }
        }
        return Err(Error::OutsideTaxonomy);
    }
    if let Some(family) = special_family_of(c, x) {
        if is_in_m_relative(c, &family, x)? {
            return Ok(family);
        }
    }
    Err(Error::OutsideTaxonomy)
}

/// Supports of relation vectors of weight 3 with entries +-1 over the
/// distinct elements.
fn weight3_relations(d: &[HClass]) -> Vec<Vec<usize>> {
    let mut supports = Vec::new();
    let idx: Vec<usize> = (0..d.len()).collect();
    for subset in combinations(&idx, 3) {
        let rows: zmat::Mat = subset.iter().map(|&i| d[i].0.to_vec()).collect();
        if zmat::rank(&rows) != 2 {
            continue;
        }
        // relation among the three elements: kernel of the 6x3 column matrix
        let threecols: zmat::Mat = (0..6)
            .map(|coord| subset.iter().map(|&i| d[i].0[coord].clone()).collect())
            .collect();
        let rel = zmat::kernel(&threecols);
        if rel.len() != 1 {
            continue;
        }
        let v = &rel[0];
        if v.iter().all(|e| e.abs() == BigInt::one()) {
            supports.push(subset.clone());
        }
    }
    supports
}

fn classify_certified(c: &HMultiset) -> Result<CellClass> {
    let dimension = c.dimension();
    let d = c.distinct();
    let taxonomy = if let Some(doubled) = c.doubled_element() {
        Taxonomy::BoundingPair {
            doubled: doubled.clone(),
        }
    } else if dimension == 0 {
        if c.len() == 3 {
            Taxonomy::H0Prime
        } else {
            Taxonomy::H0
        }
    } else if c.len() == 4 && c.rank() == 3 {
        let cols: zmat::Mat = (0..6)
            .map(|coord| d.iter().map(|e| e.0[coord].clone()).collect())
            .collect();
        let rel = zmat::kernel(&cols);
        if rel.len() != 1 {
            return Err(Error::OutsideTaxonomy);
        }
        let v = &rel[0];
        if v.iter().any(|e| e.abs() > BigInt::one()) {
            return Err(Error::OutsideTaxonomy);
        }
        let zeros: Vec<usize> = (0..4).filter(|&i| v[i].is_zero()).collect();
        match zeros.len() {
            0 => Taxonomy::H1Type1,
            1 => Taxonomy::H1Type2 {
                special: d[zeros[0]].clone(),
            },
            _ => return Err(Error::OutsideTaxonomy),
        }
    } else if c.len() == 5 && c.rank() == 3 {
        let supports = weight3_relations(&d);
        if supports.len() != 2 {
            return Err(Error::OutsideTaxonomy);
        }
        let common: Vec<usize> = supports[0]
            .iter()
            .filter(|i| supports[1].contains(i))
            .copied()
            .collect();
        if common.len() != 1 {
            return Err(Error::OutsideTaxonomy);
        }
        Taxonomy::H2Prime {
            principal: d[common[0]].clone(),
        }
    } else {
        Taxonomy::Other
    };
    Ok(CellClass {
        multiset: c.clone(),
        taxonomy,
        dimension,
    })
}

/// Certify and classify a multiset.
pub fn classify(c: &HMultiset, x: &HClass) -> Result<CellClass> {
    certify(c, x)?;
    classify_certified(c)
}

/// Classification without re-certification, for multisets already known to
/// live inside a certified ambient cell.
pub fn classify_in_ambient(c: &HMultiset) -> Result<CellClass> {
    classify_certified(c)
}

/// Codimension-1 faces of a certified cell: sub-multisets in the cell set
/// with dimension one less.
pub fn faces(d: &HMultiset, x: &HClass) -> Result<Vec<CellClass>> {
    certify(d, x)?;
    let dim = d.dimension();
    if dim == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for c in d.sub_multisets() {
        if c.len() == d.len() {
            continue;
        }
        if c.dimension() + 1 != dim {
            continue;
        }
        if is_in_m_relative(&c, d, x)? {
            out.push(classify_certified(&c)?);
        }
    }
    out.sort_by(|l, r| l.multiset.cmp(&r.multiset));
    Ok(out)
}

/// All five-element H2' multisets containing A, enumerated inside the
/// 102-superset lattice.
pub fn h2prime_containing_a(a: &[HClass], x: &HClass) -> Result<Vec<HMultiset>> {
    let maximal = supersets_in_h(a, x)?;
    let a_set = HMultiset::new(a.to_vec())?;
    let mut out: BTreeSet<HMultiset> = BTreeSet::new();
    for e in &maximal {
        for candidate in e.sub_multisets() {
            if candidate.len() != 5
                || candidate.doubled_element().is_some()
                || !candidate.includes(&a_set)
                || candidate.rank() != 3
            {
                continue;
            }
            if is_in_m_relative(&candidate, e, x)? {
                out.insert(candidate);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// All H2' multisets containing a certified multiset C (of any of the
/// characterized shapes).
pub fn h2prime_containing(c: &HMultiset, x: &HClass) -> Result<Vec<HMultiset>> {
    if let Some(a) = find_h0prime_subset(c, x) {
        let list = h2prime_containing_a(&a, x)?;
        return Ok(list.into_iter().filter(|d| d.includes(c)).collect());
    }
    let Some(family) = special_family_of(c, x) else {
        return Err(Error::OutsideTaxonomy);
    };
    let mut out: BTreeSet<HMultiset> = BTreeSet::new();
    if is_in_m_relative(c, &family, x)? && family.len() == 5 {
        out.insert(family.clone());
    }
    // supersets outside the family contain a Lagrangian triple {e, u, v}
    // with u, v in C; the coefficient of e in x over such a triple is 1
    let d = c.distinct();
    for pair in combinations(&d, 2) {
        for nu in 1..=3i64 {
            for nv in 1..=3i64 {
                let e = &(x - &pair[0].scaled(nu)) - &pair[1].scaled(nv);
                if e.is_zero() || c.contains(&e) {
                    continue;
                }
                let a = vec![e.clone(), pair[0].clone(), pair[1].clone()];
                if !is_in_h0_prime(&a, x)? {
                    continue;
                }
                let Ok(candidate) = c.union_with(&[e.clone()]) else {
                    continue;
                };
                if candidate.len() != 5 || candidate.doubled_element().is_some() {
                    continue;
                }
                for amb in supersets_in_h(&a, x)? {
                    if amb.includes(&candidate) && is_in_m_relative(&candidate, &amb, x)? {
                        out.insert(candidate.clone());
                        break;
                    }
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Random H0' instances for property tests: a bounded weight vector and a
/// random symplectic image of the standard Lagrangian triple.
pub mod sampling {
    use super::*;
    use rand::Rng;

    #[derive(Clone)]
    pub struct H0PrimeInstance {
        pub x: HClass,
        pub a: Vec<HClass>,
        pub weight: u64,
    }

    pub fn random_h0prime(rng: &mut impl Rng, max_weight: u64, twists: usize) -> H0PrimeInstance {
        loop {
            let n1 = rng.gen_range(1..=max_weight - 2);
            let n2 = rng.gen_range(1..=(max_weight - 2).max(1));
            let n3 = rng.gen_range(1..=(max_weight - 2).max(1));
            if n1 + n2 + n3 > max_weight {
                continue;
            }
            let g = gcd3(n1, n2, n3);
            let (n1, n2, n3) = (n1 / g, n2 / g, n3 / g);
            let mut a = vec![HClass::a(0), HClass::a(1), HClass::a(2)];
            let mut x =
                &(&a[0].scaled(n1 as i64) + &a[1].scaled(n2 as i64)) + &a[2].scaled(n3 as i64);
            for _ in 0..twists {
                let v = HClass::from_coords(std::array::from_fn(|_| rng.gen_range(-1..=1)));
                if v.is_zero() {
                    continue;
                }
                for c in a.iter_mut() {
                    *c = c.transvect(&v);
                }
                x = x.transvect(&v);
            }
            return H0PrimeInstance {
                x,
                a,
                weight: n1 + n2 + n3,
            };
        }
    }

    fn gcd3(a: u64, b: u64, c: u64) -> u64 {
        fn gcd(a: u64, b: u64) -> u64 {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        gcd(gcd(a, b), c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_x() -> HClass {
        HClass::from_coords([1, 1, 1, 0, 0, 0])
    }

    fn std_a() -> Vec<HClass> {
        vec![HClass::a(0), HClass::a(1), HClass::a(2)]
    }

    #[test]
    fn h0_membership() {
        let x = std_x();
        assert!(is_in_h0(&[x.clone()], &x).unwrap());
        assert!(is_in_h0_prime(&std_a(), &x).unwrap());
        let x2 = HClass::from_coords([1, 2, 3, 0, 0, 0]);
        assert!(is_in_h0_prime(&std_a(), &x2).unwrap());
        let x3 = HClass::from_coords([1, 1, 0, 0, 0, 0]);
        assert!(is_in_h0(&[HClass::a(0), HClass::a(1)], &x3).unwrap());
        // negative coefficient fails: x = a1 - 2 a2 over {a1 - a2, a2}
        let neg = &HClass::a(0) - &HClass::a(1);
        let x_neg = HClass::from_coords([1, -2, 0, 0, 0, 0]);
        assert!(!is_in_h0(&[neg, HClass::a(1)], &x_neg).unwrap());
        let not_primitive = HClass::from_coords([2, 2, 0, 0, 0, 0]);
        assert_eq!(is_in_h0(&std_a(), &not_primitive), Err(Error::NotPrimitive));
    }

    #[test]
    fn membership_by_condition_solving() {
        // {a1, -a1 + x} with x = a1 + a2: the conditions reduce to {a1, a2}
        let x = HClass::from_coords([1, 1, 0, 0, 0, 0]);
        let second = &x - &HClass::a(0);
        assert!(is_in_h0(&[HClass::a(0), second], &x).unwrap());
    }

    #[test]
    fn n_weight_values() {
        let x = std_x();
        assert_eq!(n_weight(&std_a(), &x).unwrap().total, BigInt::from(3));
        // A2 = {a1 - a3, a2, a3}: n(A2) = 2 n1 + n2 + n3
        let x2 = HClass::from_coords([2, 3, 4, 0, 0, 0]);
        let a2 = vec![&HClass::a(0) - &HClass::a(2), HClass::a(1), HClass::a(2)];
        let w = n_weight(&a2, &x2).unwrap();
        assert_eq!(w.total, BigInt::from(2 * 2 + 3 + 4));
        assert_eq!(n_weight(&[x.clone()], &x), Err(Error::NotInH0Prime));
    }

    #[test]
    fn superset_count_and_family_breakdown() {
        let x = std_x();
        let (list, counts) = supersets_with_family_counts(&std_a(), &x).unwrap();
        assert_eq!(list.len(), 102);
        assert_eq!(counts, vec![3, 12, 6, 12, 3, 6, 6, 3, 6, 12, 6, 3, 12, 12]);
        for e in &list {
            assert_eq!(e.len(), 6);
            assert_eq!(e.rank(), 3);
            assert_eq!(e.dimension(), 3);
        }
    }

    #[test]
    fn supersets_pass_self_membership() {
        let x = HClass::from_coords([1, 2, 3, 0, 0, 0]);
        for e in supersets_in_h(&std_a(), &x).unwrap() {
            assert!(is_in_m_relative(&e, &e, &x).unwrap(), "{e:?}");
        }
    }

    #[test]
    fn relative_membership_examples() {
        let x = std_x();
        let a = HMultiset::new(std_a()).unwrap();
        assert!(is_in_m_relative(&a, &a, &x).unwrap());
        // a one-sided relation is rejected by condition (2)
        let one_sided = HMultiset::new(vec![HClass::a(0), -&HClass::a(0), HClass::a(1)]).unwrap();
        assert!(!is_in_m_relative(&one_sided, &one_sided, &x).unwrap());
        assert_eq!(
            is_in_m_relative(&a, &HMultiset::new(vec![HClass::a(0)]).unwrap(), &x),
            Err(Error::NotASubset)
        );
        let c = HMultiset::new(vec![
            HClass::a(0),
            HClass::a(1),
            HClass::a(2),
            &HClass::a(0) + &HClass::a(1),
        ])
        .unwrap();
        let ambient = supersets_in_h(&std_a(), &x)
            .unwrap()
            .into_iter()
            .find(|e| e.includes(&c))
            .unwrap();
        assert!(is_in_m_relative(&c, &ambient, &x).unwrap());
    }

    #[test]
    fn classify_examples() {
        let x = std_x();
        let sum = &(&HClass::a(0) + &HClass::a(1)) + &HClass::a(2);
        let t1 = HMultiset::new(vec![HClass::a(0), HClass::a(1), HClass::a(2), sum]).unwrap();
        assert_eq!(classify(&t1, &x).unwrap().taxonomy, Taxonomy::H1Type1);

        let t2 = HMultiset::new(vec![
            HClass::a(0),
            HClass::a(1),
            HClass::a(2),
            &HClass::a(0) + &HClass::a(1),
        ])
        .unwrap();
        assert_eq!(
            classify(&t2, &x).unwrap().taxonomy,
            Taxonomy::H1Type2 {
                special: HClass::a(2)
            }
        );

        let principal = &HClass::a(0) + &HClass::a(1);
        let h2 = HMultiset::new(vec![
            HClass::a(0),
            HClass::a(1),
            HClass::a(2),
            principal.clone(),
            &principal + &HClass::a(2),
        ])
        .unwrap();
        let cell = classify(&h2, &x).unwrap();
        assert_eq!(cell.taxonomy, Taxonomy::H2Prime { principal });
        assert_eq!(cell.dimension, 2);
    }

    #[test]
    fn classify_is_stable_under_global_sign_flip() {
        let x = std_x();
        let c = HMultiset::new(vec![
            HClass::a(0),
            HClass::a(1),
            HClass::a(2),
            &HClass::a(0) + &HClass::a(1),
        ])
        .unwrap();
        let flipped = HMultiset::new(c.elems().iter().map(|e| -e).collect()).unwrap();
        let neg_x = -&x;
        let lhs = classify(&c, &x).unwrap();
        let rhs = classify(&flipped, &neg_x).unwrap();
        match (lhs.taxonomy, rhs.taxonomy) {
            (Taxonomy::H1Type2 { special: s1 }, Taxonomy::H1Type2 { special: s2 }) => {
                assert_eq!(s2, -&s1);
            }
            other => panic!("unexpected taxonomy pair {other:?}"),
        }
    }

    #[test]
    fn four_element_submultisets_never_other() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..8 {
            let inst = sampling::random_h0prime(&mut rng, 20, 2);
            for e in supersets_in_h(&inst.a, &inst.x).unwrap() {
                for c in e.sub_multisets() {
                    if c.len() != 4 || !is_in_m_relative(&c, &e, &inst.x).unwrap() {
                        continue;
                    }
                    let cell = classify_certified(&c).unwrap();
                    assert!(
                        matches!(
                            cell.taxonomy,
                            Taxonomy::H1Type1
                                | Taxonomy::H1Type2 { .. }
                                | Taxonomy::BoundingPair { .. }
                        ),
                        "multiset {c:?} classified as {:?}",
                        cell.taxonomy
                    );
                }
            }
        }
    }

    #[test]
    fn h2prime_supersets_of_type2_cell() {
        // for C in H1^(2) with special d and non-special c, the supersets
        // with principal c are exactly C + {c+d}, C + {c-d}, C + {d-c}
        let x = std_x();
        let c_el = HClass::a(0);
        let d_el = HClass::a(2);
        let cell = HMultiset::new(vec![
            HClass::a(0),
            HClass::a(1),
            HClass::a(2),
            &HClass::a(0) + &HClass::a(1),
        ])
        .unwrap();
        let all = h2prime_containing(&cell, &x).unwrap();
        let with_principal: BTreeSet<HMultiset> = all
            .into_iter()
            .filter(|m| {
                matches!(
                    classify_certified(m).map(|c| c.taxonomy),
                    Ok(Taxonomy::H2Prime { principal }) if principal == c_el
                )
            })
            .collect();
        let expected: BTreeSet<HMultiset> = [
            cell.union_with(&[&c_el + &d_el]).unwrap(),
            cell.union_with(&[&c_el - &d_el]).unwrap(),
            cell.union_with(&[&d_el - &c_el]).unwrap(),
        ]
        .into_iter()
        .filter(|m| certify(m, &x).is_ok())
        .collect();
        assert_eq!(with_principal, expected);
        assert!(!expected.is_empty());
    }

    #[test]
    fn special_family_is_recognized() {
        let x = std_x();
        let c = HMultiset::new(vec![
            HClass::a(0),
            &x - &HClass::a(0),
            HClass::a(1),
            &x - &HClass::a(1),
        ])
        .unwrap();
        assert!(find_h0prime_subset(&c, &x).is_none());
        let ambient = certify(&c, &x).unwrap();
        assert_eq!(ambient.len(), 5);
        assert!(ambient.contains(&x));
        let ups = h2prime_containing(&c, &x).unwrap();
        assert!(ups.contains(&ambient));
    }

    #[test]
    fn uncharacterized_is_rejected() {
        let x = std_x();
        let c = HMultiset::new(vec![HClass::b(0), HClass::b(1)]).unwrap();
        assert_eq!(certify(&c, &x), Err(Error::OutsideTaxonomy));
    }

    #[test]
    fn faces_of_h2prime_cell() {
        let x = std_x();
        let principal = &HClass::a(0) + &HClass::a(1);
        let d = HMultiset::new(vec![
            HClass::a(0),
            HClass::a(1),
            HClass::a(2),
            principal.clone(),
            &principal + &HClass::a(2),
        ])
        .unwrap();
        let fs = faces(&d, &x).unwrap();
        assert!(!fs.is_empty());
        // a 2-cell is a polygon: both 4-component and 3-component 1-faces occur
        for f in &fs {
            assert_eq!(f.dimension, 1);
            assert!(f.multiset.len() == 4 || f.multiset.len() == 3);
        }
        assert!(fs.iter().any(|f| f.multiset.len() == 4));
    }
}
