//! The rank-6 lattice H = Z^6 with the standard symplectic intersection form,
//! its mod-2 reduction, and the subgroup predicates the cell taxonomy needs.
//!
//! The basis order is fixed once and for all as (a1, a2, a3, b1, b2, b3);
//! every serialization and every lexicographic tie-break uses it.

use crate::{zmat, Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// An integral homology class in the fixed symplectic basis.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HClass(pub [BigInt; 6]);

impl HClass {
    pub fn zero() -> Self {
        HClass(std::array::from_fn(|_| BigInt::zero()))
    }

    /// Basis class a_{i+1}, i in 0..3.
    pub fn a(i: usize) -> Self {
        assert!(i < 3);
        let mut c = Self::zero();
        c.0[i] = BigInt::one();
        c
    }

    /// Basis class b_{i+1}, i in 0..3.
    pub fn b(i: usize) -> Self {
        assert!(i < 3);
        let mut c = Self::zero();
        c.0[3 + i] = BigInt::one();
        c
    }

    pub fn from_coords(coords: [i64; 6]) -> Self {
        HClass(coords.map(BigInt::from))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn scaled(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        HClass(std::array::from_fn(|i| &self.0[i] * &k))
    }

    pub fn mod2(&self) -> Mod2Class {
        let mut bits = 0u8;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_odd() {
                bits |= Mod2Class::bit(i);
            }
        }
        Mod2Class(bits)
    }

    /// Symplectic transvection x -> x + (x . v) v; stays in Sp(6, Z).
    pub fn transvect(&self, v: &HClass) -> Self {
        let t = intersection(self, v);
        let mut out = self.clone();
        for i in 0..6 {
            out.0[i] += &t * &v.0[i];
        }
        out
    }
}

impl Add for &HClass {
    type Output = HClass;
    fn add(self, rhs: &HClass) -> HClass {
        HClass(std::array::from_fn(|i| &self.0[i] + &rhs.0[i]))
    }
}

impl Sub for &HClass {
    type Output = HClass;
    fn sub(self, rhs: &HClass) -> HClass {
        HClass(std::array::from_fn(|i| &self.0[i] - &rhs.0[i]))
    }
}

impl Neg for &HClass {
    type Output = HClass;
    fn neg(self) -> HClass {
        HClass(std::array::from_fn(|i| -&self.0[i]))
    }
}

impl fmt::Debug for HClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for HClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let coords: Vec<i64> = self
            .0
            .iter()
            .map(|c| {
                i64::try_from(c.clone())
                    .map_err(|_| serde::ser::Error::custom("coordinate out of i64 range"))
            })
            .collect::<std::result::Result<_, S::Error>>()?;
        coords.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords: Vec<i64> = Vec::deserialize(d)?;
        let arr: [i64; 6] = coords
            .try_into()
            .map_err(|_| D::Error::custom("expected 6 coordinates"))?;
        Ok(HClass::from_coords(arr))
    }
}

/// A mod-2 homology class, packed so that the numeric order of the `u8`
/// equals lexicographic order on the coordinate string (a1 a2 a3 b1 b2 b3).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mod2Class(pub u8);

impl Mod2Class {
    pub const COUNT: usize = 64;

    fn bit(i: usize) -> u8 {
        1 << (5 - i)
    }

    pub fn coord(&self, i: usize) -> bool {
        self.0 & Self::bit(i) != 0
    }

    pub fn from_bits(bits: [bool; 6]) -> Self {
        let mut v = 0u8;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v |= Self::bit(i);
            }
        }
        Mod2Class(v)
    }

    pub fn a(i: usize) -> Self {
        assert!(i < 3);
        Mod2Class(Self::bit(i))
    }

    pub fn b(i: usize) -> Self {
        assert!(i < 3);
        Mod2Class(Self::bit(3 + i))
    }

    pub fn zero() -> Self {
        Mod2Class(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }

    /// All 64 classes in lexicographic order.
    pub fn all() -> impl Iterator<Item = Mod2Class> {
        (0u8..64).map(Mod2Class)
    }

    pub fn bit_string(&self) -> String {
        (0..6)
            .map(|i| if self.coord(i) { '1' } else { '0' })
            .collect()
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.len() != 6 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Invalid(format!("bad mod-2 class string {s:?}")));
        }
        Ok(Mod2Class::from_bits(std::array::from_fn(|i| {
            s.as_bytes()[i] == b'1'
        })))
    }
}

impl Add for Mod2Class {
    type Output = Mod2Class;
    fn add(self, rhs: Mod2Class) -> Mod2Class {
        Mod2Class(self.0 ^ rhs.0)
    }
}

impl fmt::Debug for Mod2Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit_string())
    }
}

impl Serialize for Mod2Class {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.bit_string().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mod2Class {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Mod2Class::parse(&s).map_err(D::Error::custom)
    }
}

/// Six mod-2 classes (a1, a2, a3, b1, b2, b3) forming a symplectic basis.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SymplecticBasisZ2(pub [Mod2Class; 6]);

impl SymplecticBasisZ2 {
    pub fn standard() -> Self {
        SymplecticBasisZ2([
            Mod2Class::a(0),
            Mod2Class::a(1),
            Mod2Class::a(2),
            Mod2Class::b(0),
            Mod2Class::b(1),
            Mod2Class::b(2),
        ])
    }

    pub fn a(&self, i: usize) -> Mod2Class {
        self.0[i]
    }

    pub fn b(&self, i: usize) -> Mod2Class {
        self.0[3 + i]
    }

    /// Gram conditions: a_i.a_j = b_i.b_j = 0, a_i.b_j = delta_ij.
    pub fn is_valid(&self) -> bool {
        for i in 0..3 {
            for j in 0..3 {
                if intersection_mod2(self.a(i), self.a(j)) {
                    return false;
                }
                if intersection_mod2(self.b(i), self.b(j)) {
                    return false;
                }
                if intersection_mod2(self.a(i), self.b(j)) != (i == j) {
                    return false;
                }
            }
        }
        true
    }
}

/// The symplectic intersection form: a_i . b_i = 1, b_i . a_i = -1.
pub fn intersection(u: &HClass, v: &HClass) -> BigInt {
    let mut acc = BigInt::zero();
    for k in 0..3 {
        acc += &u.0[k] * &v.0[3 + k] - &u.0[3 + k] * &v.0[k];
    }
    acc
}

/// Mod-2 intersection number.
pub fn intersection_mod2(u: Mod2Class, v: Mod2Class) -> bool {
    let mut acc = false;
    for k in 0..3 {
        acc ^= u.coord(k) & v.coord(3 + k);
        acc ^= u.coord(3 + k) & v.coord(k);
    }
    acc
}

/// True iff the gcd of the coordinates is 1. Errors on the zero class.
pub fn is_primitive(u: &HClass) -> Result<bool> {
    if u.is_zero() {
        return Err(Error::ZeroClass);
    }
    let mut g = BigInt::zero();
    for c in &u.0 {
        g = g.gcd(c);
    }
    Ok(g.is_one())
}

fn coord_matrix(classes: &[HClass]) -> zmat::Mat {
    classes.iter().map(|c| c.0.to_vec()).collect()
}

/// True iff the classes are a basis of an isotropic direct summand: linearly
/// independent, pairwise orthogonal, and with all maximal minors coprime.
///
/// The minor-gcd route is deliberately different from the Smith-form oracle
/// used in tests.
pub fn is_isotropic_direct_summand(classes: &[HClass]) -> Result<bool> {
    if classes.is_empty() || classes.len() > 3 {
        return Err(Error::GenusBound);
    }
    for (i, u) in classes.iter().enumerate() {
        for v in &classes[i..] {
            if !intersection(u, v).is_zero() {
                return Ok(false);
            }
        }
    }
    let m = coord_matrix(classes);
    if zmat::rank(&m) < classes.len() {
        return Ok(false);
    }
    Ok(minor_gcd(&m).is_one())
}

/// gcd of all maximal minors of an m x 6 matrix, m <= 3.
fn minor_gcd(m: &zmat::Mat) -> BigInt {
    let k = m.len();
    let mut g = BigInt::zero();
    let cols: Vec<usize> = (0..6).collect();
    for subset in combinations(&cols, k) {
        let det = minor_det(m, &subset);
        g = g.gcd(&det);
        if g.is_one() {
            break;
        }
    }
    g
}

fn minor_det(m: &zmat::Mat, cols: &[usize]) -> BigInt {
    match cols.len() {
        1 => m[0][cols[0]].clone(),
        2 => &m[0][cols[0]] * &m[1][cols[1]] - &m[0][cols[1]] * &m[1][cols[0]],
        3 => {
            let mut det = BigInt::zero();
            const PERMS: [([usize; 3], i8); 6] = [
                ([0, 1, 2], 1),
                ([1, 2, 0], 1),
                ([2, 0, 1], 1),
                ([0, 2, 1], -1),
                ([2, 1, 0], -1),
                ([1, 0, 2], -1),
            ];
            for (p, sign) in PERMS {
                let term = &m[0][cols[p[0]]] * &m[1][cols[p[1]]] * &m[2][cols[p[2]]];
                if sign > 0 {
                    det += term;
                } else {
                    det -= term;
                }
            }
            det
        }
        _ => unreachable!(),
    }
}

pub fn combinations<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, head) in items.iter().enumerate() {
        for mut tail in combinations(&items[i + 1..], k - 1) {
            tail.insert(0, head.clone());
            out.push(tail);
        }
    }
    out
}

/// An orthogonal splitting of the rank-4 quotient gamma-perp / <gamma> into
/// two rank-2 summands, each given by an integral spanning pair. Splittings
/// are unordered: U + V and V + U are the same splitting.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct OrthogonalSplitting {
    pub gamma: HClass,
    pub u: [HClass; 2],
    pub v: [HClass; 2],
}

impl OrthogonalSplitting {
    pub fn new(gamma: HClass, u: [HClass; 2], v: [HClass; 2]) -> Result<Self> {
        let s = OrthogonalSplitting { gamma, u, v };
        if !s.is_valid() {
            return Err(Error::Invalid("not an orthogonal splitting".into()));
        }
        Ok(s)
    }

    fn is_valid(&self) -> bool {
        if self.gamma.is_zero() {
            return false;
        }
        let all = [&self.u[0], &self.u[1], &self.v[0], &self.v[1]];
        if all.iter().any(|c| !intersection(c, &self.gamma).is_zero()) {
            return false;
        }
        for x in &self.u {
            for y in &self.v {
                if !intersection(x, y).is_zero() {
                    return false;
                }
            }
        }
        // <u, v, gamma> must be all of gamma-perp: rank 5 and unit divisors
        let m: zmat::Mat = all
            .iter()
            .map(|c| c.0.to_vec())
            .chain(std::iter::once(self.gamma.0.to_vec()))
            .collect();
        if zmat::rank(&m) != 5 {
            return false;
        }
        zmat::elementary_divisors(&m).iter().all(|d| d.is_one())
    }

    fn summand_contains(pair: &[HClass; 2], gamma: &HClass, c: &HClass) -> bool {
        let cols = vec![pair[0].0.to_vec(), pair[1].0.to_vec(), gamma.0.to_vec()];
        match zmat::solve_columns(&cols, &c.0) {
            Some(t) => t.iter().all(|q| q.is_integer()),
            None => false,
        }
    }

    fn summand_eq(lhs: &[HClass; 2], rhs: &[HClass; 2], gamma: &HClass) -> bool {
        rhs.iter().all(|c| Self::summand_contains(lhs, gamma, c))
            && lhs.iter().all(|c| Self::summand_contains(rhs, gamma, c))
    }

    /// Equality as splittings of the same quotient; gamma may differ by sign.
    pub fn same_splitting(&self, other: &OrthogonalSplitting) -> bool {
        if self.gamma != other.gamma && self.gamma != -&other.gamma {
            return false;
        }
        let g = &self.gamma;
        (Self::summand_eq(&self.u, &other.u, g) && Self::summand_eq(&self.v, &other.v, g))
            || (Self::summand_eq(&self.u, &other.v, g) && Self::summand_eq(&self.v, &other.u, g))
    }
}

/// Extend three independent, pairwise orthogonal mod-2 classes to a full
/// symplectic basis, choosing the lexicographically least valid completion.
pub fn complete_symplectic_mod2(a: [Mod2Class; 3]) -> Result<SymplecticBasisZ2> {
    if crate::gf2::rank(&[a[0].0 as u64, a[1].0 as u64, a[2].0 as u64]) < 3 {
        return Err(Error::BadIsotropicInput);
    }
    for i in 0..3 {
        for j in 0..3 {
            if intersection_mod2(a[i], a[j]) {
                return Err(Error::BadIsotropicInput);
            }
        }
    }
    let mut basis = [
        a[0],
        a[1],
        a[2],
        Mod2Class::zero(),
        Mod2Class::zero(),
        Mod2Class::zero(),
    ];
    for slot in 0..3 {
        let mut found = false;
        for cand in Mod2Class::all() {
            // pairing with the a's
            if (0..3).any(|i| intersection_mod2(cand, a[i]) != (i == slot)) {
                continue;
            }
            // orthogonal to the b's chosen so far
            if (0..slot).any(|i| intersection_mod2(cand, basis[3 + i])) {
                continue;
            }
            basis[3 + slot] = cand;
            found = true;
            break;
        }
        // a valid prefix always extends (the five pairing conditions are
        // independent linear constraints on a nondegenerate space)
        debug_assert!(found);
        if !found {
            return Err(Error::BadIsotropicInput);
        }
    }
    let basis = SymplecticBasisZ2(basis);
    debug_assert!(basis.is_valid());
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hc(c: [i64; 6]) -> HClass {
        HClass::from_coords(c)
    }

    #[test]
    fn gram_entries() {
        assert_eq!(intersection(&HClass::a(0), &HClass::b(0)), BigInt::from(1));
        assert_eq!(intersection(&HClass::b(0), &HClass::a(0)), BigInt::from(-1));
        assert_eq!(intersection(&HClass::a(0), &HClass::a(1)), BigInt::zero());
    }

    #[test]
    fn bilinear_expansion_oracle() {
        // (2a1 + b2) . (3b1 - a2) expanded over basis pairs by brute force
        let u = hc([2, 0, 0, 0, 1, 0]);
        let v = hc([0, -1, 0, 3, 0, 0]);
        let mut expected = BigInt::zero();
        for i in 0..6 {
            for j in 0..6 {
                let ei = {
                    let mut e = HClass::zero();
                    e.0[i] = BigInt::one();
                    e
                };
                let ej = {
                    let mut e = HClass::zero();
                    e.0[j] = BigInt::one();
                    e
                };
                expected += &u.0[i] * &v.0[j] * intersection(&ei, &ej);
            }
        }
        assert_eq!(expected, BigInt::from(7));
        assert_eq!(intersection(&u, &v), BigInt::from(7));
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&hc([1, 2, 0, 0, 0, 0])).unwrap());
        assert!(!is_primitive(&hc([2, 2, 0, 0, 0, 0])).unwrap());
        // gcd(6, 10, 15) = 1
        assert!(is_primitive(&hc([6, 10, 15, 0, 0, 0])).unwrap());
        assert_eq!(is_primitive(&HClass::zero()), Err(Error::ZeroClass));
    }

    #[test]
    fn isotropic_direct_summand() {
        let std_lagrangian = [HClass::a(0), HClass::a(1), HClass::a(2)];
        assert!(is_isotropic_direct_summand(&std_lagrangian).unwrap());
        assert!(!is_isotropic_direct_summand(&[HClass::a(0), HClass::a(1).scaled(2)]).unwrap());
        let mixed = [
            &HClass::a(0) + &HClass::a(1),
            &HClass::a(1) - &HClass::a(2),
            HClass::a(2),
        ];
        assert!(is_isotropic_direct_summand(&mixed).unwrap());
        assert!(!is_isotropic_direct_summand(&[HClass::a(0), HClass::b(0)]).unwrap());
        let four = [HClass::a(0), HClass::a(1), HClass::a(2), HClass::b(0)];
        assert_eq!(is_isotropic_direct_summand(&four), Err(Error::GenusBound));
    }

    /// Smith-form oracle: a direct summand iff all elementary divisors are 1.
    fn summand_oracle(classes: &[HClass]) -> bool {
        for (i, u) in classes.iter().enumerate() {
            for v in &classes[i..] {
                if !intersection(u, v).is_zero() {
                    return false;
                }
            }
        }
        let m = coord_matrix(classes);
        if zmat::rank(&m) < classes.len() {
            return false;
        }
        zmat::elementary_divisors(&m).iter().all(|d| d.is_one())
    }

    #[test]
    fn summand_matches_smith_oracle_on_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let triple: Vec<HClass> = (0..3)
                .map(|_| hc(std::array::from_fn(|_| rng.gen_range(-5..=5))))
                .collect();
            if triple.iter().any(|c| c.is_zero()) {
                continue;
            }
            assert_eq!(
                is_isotropic_direct_summand(&triple).unwrap(),
                summand_oracle(&triple)
            );
        }
    }

    #[test]
    fn completion_standard() {
        let basis =
            complete_symplectic_mod2([Mod2Class::a(0), Mod2Class::a(1), Mod2Class::a(2)]).unwrap();
        assert_eq!(basis, SymplecticBasisZ2::standard());
    }

    #[test]
    fn completion_nonstandard_is_valid() {
        let a3 = Mod2Class::a(0) + Mod2Class::a(1) + Mod2Class::a(2);
        let basis = complete_symplectic_mod2([Mod2Class::a(0), Mod2Class::a(1), a3]).unwrap();
        assert!(basis.is_valid());
        assert_eq!(basis.a(2), a3);
    }

    #[test]
    fn completion_rejects_bad_input() {
        assert_eq!(
            complete_symplectic_mod2([Mod2Class::a(0), Mod2Class::b(0), Mod2Class::a(1)]),
            Err(Error::BadIsotropicInput)
        );
        assert_eq!(
            complete_symplectic_mod2([
                Mod2Class::a(0),
                Mod2Class::a(1),
                Mod2Class::a(0) + Mod2Class::a(1)
            ]),
            Err(Error::BadIsotropicInput)
        );
    }

    #[test]
    fn completion_is_lexicographically_least() {
        // exhaustive oracle over all valid triples (b1, b2, b3)
        let a = [Mod2Class::a(0), Mod2Class::a(1), Mod2Class::a(2)];
        let got = complete_symplectic_mod2(a).unwrap();
        let mut best: Option<[Mod2Class; 3]> = None;
        for b1 in Mod2Class::all() {
            for b2 in Mod2Class::all() {
                for b3 in Mod2Class::all() {
                    let cand = SymplecticBasisZ2([a[0], a[1], a[2], b1, b2, b3]);
                    if cand.is_valid() {
                        let key = [b1, b2, b3];
                        if best.map_or(true, |b| key < b) {
                            best = Some(key);
                        }
                    }
                }
            }
        }
        assert_eq!([got.b(0), got.b(1), got.b(2)], best.unwrap());
    }
}
