//! Sp-quadratic functions on the mod-2 homology space, the Arf invariant,
//! the form spaces Omega (all 64 forms) and Omega0 (the 36 with Arf = 0),
//! and the Boolean algebras B and B' = B/(Arf) with their degree filtration.
//!
//! B' is represented semantically: an element is its value table on Omega0,
//! 36 bits in a fixed enumeration order. Degree is recovered as span
//! membership against cached GF(2) filtration bases.

use crate::gf2::Gf2Span;
use crate::homlattice::{complete_symplectic_mod2, Mod2Class, SymplecticBasisZ2};
use crate::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul};
use std::sync::OnceLock;

/// An Sp-quadratic function, determined by its values on the fixed basis.
/// Packed like `Mod2Class`: numeric order equals lexicographic order on the
/// basis-value vector.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpQuadraticForm(pub u8);

impl SpQuadraticForm {
    pub fn basis_value(&self, i: usize) -> bool {
        self.0 & (1 << (5 - i)) != 0
    }

    pub fn from_basis_values(values: [bool; 6]) -> Self {
        let mut v = 0u8;
        for (i, &b) in values.iter().enumerate() {
            if b {
                v |= 1 << (5 - i);
            }
        }
        SpQuadraticForm(v)
    }

    /// All 64 forms, in basis-value order.
    pub fn all() -> impl Iterator<Item = SpQuadraticForm> {
        (0u8..64).map(SpQuadraticForm)
    }

    /// Evaluate by the quadratic law: omega(sum e_i) picks up a_k.b_k cross
    /// terms for every symplectic pair contained in the support.
    pub fn eval(&self, x: Mod2Class) -> bool {
        let mut acc = false;
        for i in 0..6 {
            acc ^= x.coord(i) & self.basis_value(i);
        }
        for k in 0..3 {
            acc ^= x.coord(k) & x.coord(3 + k);
        }
        acc
    }

    /// The unique Sp-quadratic function with the given values on an arbitrary
    /// symplectic basis, expressed back in the fixed basis.
    pub fn from_values_on(basis: &SymplecticBasisZ2, values: [bool; 6]) -> Result<Self> {
        if !basis.is_valid() {
            return Err(Error::BadIsotropicInput);
        }
        let rows: Vec<u64> = basis.0.iter().map(|c| c.0 as u64).collect();
        let mut out = [false; 6];
        for (j, slot) in out.iter_mut().enumerate() {
            let target = Mod2Class::from_bits(std::array::from_fn(|i| i == j));
            let comb = crate::gf2::solve(&rows, target.0 as u64)
                .expect("symplectic basis spans the space");
            let support: Vec<usize> = (0..6).filter(|i| comb & (1 << i) != 0).collect();
            let mut acc = false;
            for &i in &support {
                acc ^= values[i];
            }
            // cross terms c_i . c_j over pairs in the support; for a
            // symplectic basis only (a_k, b_k) pairs contribute
            for k in 0..3 {
                acc ^= support.contains(&k) & support.contains(&(3 + k));
            }
            *slot = acc;
        }
        Ok(SpQuadraticForm::from_basis_values(out))
    }
}

impl fmt::Debug for SpQuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..6 {
            write!(f, "{}", self.basis_value(i) as u8)?;
        }
        Ok(())
    }
}

impl Serialize for SpQuadraticForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        format!("{self:?}").serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpQuadraticForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s.len() != 6 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(D::Error::custom("expected a 6-bit string"));
        }
        Ok(SpQuadraticForm::from_basis_values(std::array::from_fn(
            |i| s.as_bytes()[i] == b'1',
        )))
    }
}

/// Arf invariant: sum of omega(a_k) omega(b_k) over a symplectic basis.
pub fn arf(omega: SpQuadraticForm) -> bool {
    let mut acc = false;
    for k in 0..3 {
        acc ^= omega.eval(Mod2Class::a(k)) & omega.eval(Mod2Class::b(k));
    }
    acc
}

/// The 36 forms with Arf = 0, sorted by basis-value vector.
pub fn omega0() -> &'static [SpQuadraticForm] {
    static CELL: OnceLock<Vec<SpQuadraticForm>> = OnceLock::new();
    CELL.get_or_init(|| SpQuadraticForm::all().filter(|w| !arf(*w)).collect())
}

pub fn omega0_index(omega: SpQuadraticForm) -> Option<usize> {
    omega0().binary_search(&omega).ok()
}

/// An element of B' = B/(Arf): its value table on Omega0, bit t = value at
/// the t-th form of the fixed enumeration.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BPrimeElement(pub u64);

pub const BPRIME_DIM: usize = 36;
const BPRIME_MASK: u64 = (1 << 36) - 1;

impl BPrimeElement {
    pub fn zero() -> Self {
        BPrimeElement(0)
    }

    pub fn one() -> Self {
        BPrimeElement(BPRIME_MASK)
    }

    pub fn is_zero(&self) -> bool {
        self.0 == 0
    }

    pub fn value_at(&self, omega: SpQuadraticForm) -> bool {
        omega0_index(omega).map_or(false, |t| self.0 & (1 << t) != 0)
    }

    pub fn scaled(&self, k: i64) -> Self {
        if k.rem_euclid(2) == 1 {
            *self
        } else {
            BPrimeElement::zero()
        }
    }

    pub fn hex(&self) -> String {
        format!("{:09x}", self.0)
    }

    pub fn parse_hex(s: &str) -> Result<Self> {
        if s.len() != 9 {
            return Err(Error::Invalid(format!("bad B' element {s:?}")));
        }
        let v = u64::from_str_radix(s, 16)
            .map_err(|_| Error::Invalid(format!("bad B' element {s:?}")))?;
        if v & !BPRIME_MASK != 0 {
            return Err(Error::Invalid(format!("bad B' element {s:?}")));
        }
        Ok(BPrimeElement(v))
    }
}

impl Add for BPrimeElement {
    type Output = BPrimeElement;
    fn add(self, rhs: BPrimeElement) -> BPrimeElement {
        BPrimeElement(self.0 ^ rhs.0)
    }
}

impl Mul for BPrimeElement {
    type Output = BPrimeElement;
    fn mul(self, rhs: BPrimeElement) -> BPrimeElement {
        BPrimeElement(self.0 & rhs.0)
    }
}

impl fmt::Debug for BPrimeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B'({})", self.hex())
    }
}

impl Serialize for BPrimeElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.hex().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BPrimeElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BPrimeElement::parse_hex(&s).map_err(D::Error::custom)
    }
}

/// The affine generator x-bar: omega |-> omega(x), as an element of B'.
pub fn affine_generator(x: Mod2Class) -> BPrimeElement {
    let mut v = 0u64;
    for (t, w) in omega0().iter().enumerate() {
        if w.eval(x) {
            v |= 1 << t;
        }
    }
    BPrimeElement(v)
}

/// Product of affine generators, one per class.
pub fn monomial(classes: &[Mod2Class]) -> BPrimeElement {
    classes
        .iter()
        .fold(BPrimeElement::one(), |acc, &x| acc * affine_generator(x))
}

/// Filtration span B'_k: products of at most k affine generators.
pub fn bprime_filtration(k: usize) -> &'static Gf2Span {
    static CELL: OnceLock<Vec<Gf2Span>> = OnceLock::new();
    let spans = CELL.get_or_init(|| {
        let gens: Vec<BPrimeElement> = (0..6)
            .map(|i| affine_generator(Mod2Class::from_bits(std::array::from_fn(|j| j == i))))
            .collect();
        (0..=4)
            .map(|k| {
                let mut span = Gf2Span::new();
                let idx: Vec<usize> = (0..6).collect();
                for size in 0..=k {
                    for subset in crate::homlattice::combinations(&idx, size) {
                        let m = subset
                            .iter()
                            .fold(BPrimeElement::one(), |acc, &i| acc * gens[i]);
                        span.insert(m.0);
                    }
                }
                span
            })
            .collect()
    });
    &spans[k.min(4)]
}

/// True iff the element lies in the degree filtration step B'_k.
pub fn in_bk(e: BPrimeElement, k: usize) -> bool {
    bprime_filtration(k).contains(e.0)
}

/// Filtration degree: least k with e in B'_k.
pub fn degree(e: BPrimeElement) -> usize {
    (0..=4).find(|&k| in_bk(e, k)).expect("B' = B'_4")
}

/// An element of B: value table on all 64 forms. Only used to exhibit the
/// quotient map B -> B' with kernel (Arf).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct BElement(pub u64);

impl BElement {
    pub fn affine_generator(x: Mod2Class) -> BElement {
        let mut v = 0u64;
        for (t, w) in SpQuadraticForm::all().enumerate() {
            if w.eval(x) {
                v |= 1 << t;
            }
        }
        BElement(v)
    }

    pub fn arf_polynomial() -> BElement {
        let mut v = 0u64;
        for (t, w) in SpQuadraticForm::all().enumerate() {
            if arf(w) {
                v |= 1 << t;
            }
        }
        BElement(v)
    }

    /// Restriction to the zero set of Arf.
    pub fn project(&self) -> BPrimeElement {
        let mut v = 0u64;
        for (t, w) in omega0().iter().enumerate() {
            let full_index = w.0 as u64;
            if self.0 & (1 << full_index) != 0 {
                v |= 1 << t;
            }
        }
        BPrimeElement(v)
    }
}

/// The four forms attached to an independent pairwise-orthogonal triple A:
/// Arf = 0 and omega(a_i) = 1, numbered by the b-value table over the
/// deterministic completion basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FormFamily {
    pub forms: [SpQuadraticForm; 4],
    pub basis: SymplecticBasisZ2,
}

impl FormFamily {
    /// Numbering: omega_i(b_j) = 0 iff i = 0 or i = j.
    pub fn new(a: [Mod2Class; 3]) -> Result<FormFamily> {
        let basis = complete_symplectic_mod2(a)?;
        let mut forms = [SpQuadraticForm(0); 4];
        for (i, slot) in forms.iter_mut().enumerate() {
            let values: [bool; 6] =
                std::array::from_fn(|p| if p < 3 { true } else { i != 0 && i != p - 2 });
            *slot = SpQuadraticForm::from_values_on(&basis, values)?;
        }
        for w in forms {
            debug_assert!(!arf(w));
        }
        Ok(FormFamily { forms, basis })
    }

    /// rho-vector of a B' element against this family.
    pub fn rho(&self, e: BPrimeElement) -> [bool; 4] {
        std::array::from_fn(|i| e.value_at(self.forms[i]))
    }
}

/// Exhaustive filter over all 64 forms; the independent oracle for
/// `FormFamily::new`.
pub fn four_forms_filter(a: [Mod2Class; 3]) -> Vec<SpQuadraticForm> {
    SpQuadraticForm::all()
        .filter(|w| !arf(*w) && a.iter().all(|&x| w.eval(x)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homlattice::intersection_mod2;

    #[test]
    fn arf_zero_form_count_is_36() {
        let count = SpQuadraticForm::all().filter(|w| !arf(*w)).count();
        assert_eq!(count, 36);
        assert_eq!(omega0().len(), 36);
    }

    #[test]
    fn quadratic_law_holds_everywhere() {
        for w in SpQuadraticForm::all() {
            for x in Mod2Class::all() {
                for y in Mod2Class::all() {
                    assert_eq!(
                        w.eval(x + y),
                        w.eval(x) ^ w.eval(y) ^ intersection_mod2(x, y)
                    );
                }
            }
        }
    }

    #[test]
    fn affine_relation() {
        // (x+y)-bar = x-bar + y-bar + x.y
        for x in Mod2Class::all().step_by(7) {
            for y in Mod2Class::all().step_by(5) {
                let lhs = affine_generator(x + y);
                let mut rhs = affine_generator(x) + affine_generator(y);
                if intersection_mod2(x, y) {
                    rhs = rhs + BPrimeElement::one();
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn filtration_dimensions() {
        assert_eq!(bprime_filtration(0).dim(), 1);
        assert_eq!(bprime_filtration(3).dim(), 35);
        assert_eq!(bprime_filtration(4).dim(), 36);
    }

    #[test]
    fn degree_four_monomial_spans_the_rest() {
        let m = monomial(&[
            Mod2Class::a(0),
            Mod2Class::b(0),
            Mod2Class::a(1),
            Mod2Class::b(1),
        ]);
        assert_eq!(degree(m), 4);
        let mut span = bprime_filtration(3).clone();
        assert!(span.insert(m.0));
        assert_eq!(span.dim(), 36);
    }

    #[test]
    fn idempotency() {
        for x in Mod2Class::all() {
            let g = affine_generator(x);
            assert_eq!(g * g, g);
        }
        let p = monomial(&[Mod2Class::a(0), Mod2Class::b(2)]);
        assert_eq!(p * p, p);
    }

    #[test]
    fn projection_kernel_is_arf_ideal() {
        let arf_poly = BElement::arf_polynomial();
        assert_eq!(arf_poly.project(), BPrimeElement::zero());
        // a multiple of Arf also projects to zero
        let q = BElement::affine_generator(Mod2Class::a(1));
        let prod = BElement(arf_poly.0 & q.0);
        assert_eq!(prod.project(), BPrimeElement::zero());
        // and something not in the ideal does not
        assert_ne!(q.project(), BPrimeElement::zero());
    }

    #[test]
    fn family_matches_exhaustive_filter() {
        let a = [Mod2Class::a(0), Mod2Class::a(1), Mod2Class::a(2)];
        let family = FormFamily::new(a).unwrap();
        let filtered = four_forms_filter(a);
        assert_eq!(filtered.len(), 4);
        let mut ours: Vec<SpQuadraticForm> = family.forms.to_vec();
        ours.sort();
        assert_eq!(ours, filtered);
        // numbering table: omega_0 vanishes on all b_j, omega_i on b_i only
        for i in 0..4 {
            for j in 0..3 {
                let expected = i != 0 && i != j + 1;
                assert_eq!(family.forms[i].eval(family.basis.b(j)), expected);
            }
        }
    }

    #[test]
    fn arf_invariant_under_basis_change() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            // random symplectic basis via random mod-2 transvections
            let mut basis = SymplecticBasisZ2::standard();
            for _ in 0..6 {
                let v = Mod2Class(rng.gen_range(1..64));
                for c in basis.0.iter_mut() {
                    if intersection_mod2(*c, v) {
                        *c = *c + v;
                    }
                }
            }
            assert!(basis.is_valid());
            for w in SpQuadraticForm::all().step_by(3) {
                let mut acc = false;
                for k in 0..3 {
                    acc ^= w.eval(basis.a(k)) & w.eval(basis.b(k));
                }
                assert_eq!(acc, arf(w));
            }
        }
    }
}
