//! Word-level models of the multicurve stabilizers: the F2 x F2 model of the
//! type-1 four-component stabilizer, the free five-curve stabilizer, and the
//! homomorphism tables nu, nu_W, mu, xi, psi evaluated on symbolic
//! generators.

use crate::bcj::{self, PairRel, SepSide, SymbolicGenerator};
use crate::homlattice::{HClass, OrthogonalSplitting, SymplecticBasisZ2};
use crate::quadbool::{affine_generator, monomial, BPrimeElement, FormFamily};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Letters of the type-1 stabilizer model. u/v letters live in F2 x F2; the
/// z letters are the stabilizer generators z1 = u1 u2^-1, z2 = v1 v2^-1,
/// z3 = [u1, v1].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum T1Letter {
    U1,
    V1,
    U2,
    V2,
    Z1,
    Z2,
    Z3,
}

/// A word over the type-1 alphabet with exponents.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct TypeOneWord(pub Vec<(T1Letter, i64)>);

/// Generators of one free factor: u or v with an exponent.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum FLetter {
    U(i64),
    V(i64),
}

impl TypeOneWord {
    pub fn letter(l: T1Letter, e: i64) -> Self {
        TypeOneWord(vec![(l, e)])
    }

    pub fn concat(words: &[&TypeOneWord]) -> Self {
        TypeOneWord(words.iter().flat_map(|w| w.0.iter().copied()).collect())
    }

    pub fn inverse(&self) -> Self {
        TypeOneWord(self.0.iter().rev().map(|&(l, e)| (l, -e)).collect())
    }

    pub fn conjugated_by(&self, c: &TypeOneWord) -> Self {
        TypeOneWord::concat(&[&c.inverse(), self, c])
    }

    pub fn commutator(a: &TypeOneWord, b: &TypeOneWord) -> Self {
        TypeOneWord::concat(&[&a.inverse(), &b.inverse(), a, b])
    }

    /// Expand z letters and project to the two free factors.
    fn factors(&self) -> (Vec<FLetter>, Vec<FLetter>) {
        let mut f1 = Vec::new();
        let mut f2 = Vec::new();
        for &(l, e) in &self.0 {
            if e == 0 {
                continue;
            }
            match l {
                T1Letter::U1 => f1.push(FLetter::U(e)),
                T1Letter::V1 => f1.push(FLetter::V(e)),
                T1Letter::U2 => f2.push(FLetter::U(e)),
                T1Letter::V2 => f2.push(FLetter::V(e)),
                // z1 = u1 u2^-1: the two letters live in different factors,
                // so a power expands coordinatewise
                T1Letter::Z1 => {
                    f1.push(FLetter::U(e));
                    f2.push(FLetter::U(-e));
                }
                T1Letter::Z2 => {
                    f1.push(FLetter::V(e));
                    f2.push(FLetter::V(-e));
                }
                // z3 = [u1, v1]; powers repeat the commutator word
                T1Letter::Z3 => {
                    for _ in 0..e.unsigned_abs() {
                        if e > 0 {
                            f1.extend([
                                FLetter::U(-1),
                                FLetter::V(-1),
                                FLetter::U(1),
                                FLetter::V(1),
                            ]);
                        } else {
                            f1.extend([
                                FLetter::V(-1),
                                FLetter::U(-1),
                                FLetter::V(1),
                                FLetter::U(1),
                            ]);
                        }
                    }
                }
            }
        }
        (f1, f2)
    }

    /// Freely reduced factor words; two words are equal in F2 x F2 iff these
    /// agree.
    pub fn reduced_factors(&self) -> (Vec<(char, i64)>, Vec<(char, i64)>) {
        let reduce = |letters: &[FLetter]| -> Vec<(char, i64)> {
            let mut out: Vec<(char, i64)> = Vec::new();
            for &l in letters {
                let (c, e) = match l {
                    FLetter::U(e) => ('u', e),
                    FLetter::V(e) => ('v', e),
                };
                if e == 0 {
                    continue;
                }
                if let Some(last) = out.last_mut() {
                    if last.0 == c {
                        last.1 += e;
                        if last.1 == 0 {
                            out.pop();
                        }
                        continue;
                    }
                }
                out.push((c, e));
            }
            out
        };
        let (f1, f2) = self.factors();
        (reduce(&f1), reduce(&f2))
    }

    /// Equality as elements of F2 x F2.
    pub fn same_element(&self, other: &TypeOneWord) -> bool {
        self.reduced_factors() == other.reduced_factors()
    }

    fn exponent_sums(&self) -> (i64, i64, i64, i64) {
        let (f1, f2) = self.factors();
        let mut t = (0i64, 0i64, 0i64, 0i64);
        for l in f1 {
            match l {
                FLetter::U(e) => t.0 += e,
                FLetter::V(e) => t.1 += e,
            }
        }
        for l in f2 {
            match l {
                FLetter::U(e) => t.2 += e,
                FLetter::V(e) => t.3 += e,
            }
        }
        t
    }

    /// Image under f: (total u count, total v count); zero iff the word
    /// lies in the stabilizer.
    pub fn f_image(&self) -> (i64, i64) {
        let (u1, v1, u2, v2) = self.exponent_sums();
        (u1 + u2, v1 + v2)
    }

    pub fn in_ker_f(&self) -> bool {
        self.f_image() == (0, 0)
    }
}

/// Magnus XY-coefficient of a free-factor word: the signed count of
/// (u-run, later v-run) pairs.
fn magnus_xy(word: &[(char, i64)]) -> i64 {
    let mut total = 0i64;
    for (i, &(ci, ei)) in word.iter().enumerate() {
        if ci != 'u' {
            continue;
        }
        for &(cj, ej) in &word[i + 1..] {
            if cj == 'v' {
                total += ei * ej;
            }
        }
    }
    total
}

/// xi = (algebraic u1 count, algebraic v1 count) of the first-factor
/// projection.
pub fn xi(w: &TypeOneWord) -> (i64, i64) {
    let (u1, v1, _, _) = w.exponent_sums();
    (u1, v1)
}

/// Difference of the two factor Magnus coefficients. The cross-term defects
/// of the factors cancel on ker f, so this is a homomorphism there; it takes
/// z1, z2 to 0 and z3 to 1.
pub fn magnus_invariant(w: &TypeOneWord) -> i64 {
    let (f1, f2) = w.reduced_factors();
    magnus_xy(&f1) - magnus_xy(&f2)
}

/// rho-vector of a stabilizer word, by the generator table
/// rho(z1) = (0,0,1,1), rho(z2) = (0,1,0,1), rho(z3) = (1,1,1,1).
pub fn rho_im(w: &TypeOneWord) -> Result<[bool; 4]> {
    if !w.in_ker_f() {
        return Err(Error::NotInKerF);
    }
    let (x1, x2) = xi(w);
    let g = magnus_invariant(w);
    let (x1, x2, g) = (
        x1.rem_euclid(2) == 1,
        x2.rem_euclid(2) == 1,
        g.rem_euclid(2) == 1,
    );
    Ok([g, g ^ x2, g ^ x1, g ^ x1 ^ x2])
}

/// sigma of a stabilizer word in a concrete basis context.
pub fn sigma_im(w: &TypeOneWord, basis: &SymplecticBasisZ2) -> Result<BPrimeElement> {
    if !w.in_ker_f() {
        return Err(Error::NotInKerF);
    }
    let [s1, s2, s3] = bcj::type1_sigma_z(basis);
    let (x1, x2) = xi(w);
    let g = magnus_invariant(w);
    Ok(s1.scaled(x1) + s2.scaled(x2) + s3.scaled(g))
}

pub fn in_c_m(w: &TypeOneWord) -> Result<bool> {
    Ok(rho_im(w)? == [false; 4])
}

/// Both lift identities: rho0 + rho1 = xi2 and rho0 + rho2 = xi1 mod 2.
pub fn liftrho_check(w: &TypeOneWord) -> Result<bool> {
    let rho = rho_im(w)?;
    let (x1, x2) = xi(w);
    Ok(
        (rho[0] ^ rho[1]) == (x2.rem_euclid(2) == 1)
            && (rho[0] ^ rho[2]) == (x1.rem_euclid(2) == 1),
    )
}

/// One item of a commutator/square decomposition, optionally conjugated.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommSqItem {
    Comm {
        left: TypeOneWord,
        right: TypeOneWord,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        conjugator: Option<TypeOneWord>,
    },
    Sq {
        word: TypeOneWord,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        conjugator: Option<TypeOneWord>,
    },
}

impl CommSqItem {
    pub fn comm(left: TypeOneWord, right: TypeOneWord) -> Self {
        CommSqItem::Comm {
            left,
            right,
            conjugator: None,
        }
    }

    pub fn sq(word: TypeOneWord) -> Self {
        CommSqItem::Sq {
            word,
            conjugator: None,
        }
    }

    pub fn conjugated(self, c: TypeOneWord) -> Self {
        match self {
            CommSqItem::Comm { left, right, .. } => CommSqItem::Comm {
                left,
                right,
                conjugator: Some(c),
            },
            CommSqItem::Sq { word, .. } => CommSqItem::Sq {
                word,
                conjugator: Some(c),
            },
        }
    }

    /// The group element this item denotes, as a word.
    pub fn expand(&self) -> TypeOneWord {
        let bare = match self {
            CommSqItem::Comm { left, right, .. } => TypeOneWord::commutator(left, right),
            CommSqItem::Sq { word, .. } => TypeOneWord::concat(&[word, word]),
        };
        match self {
            CommSqItem::Comm {
                conjugator: Some(c),
                ..
            }
            | CommSqItem::Sq {
                conjugator: Some(c),
                ..
            } => bare.conjugated_by(c),
            _ => bare,
        }
    }

    fn value(&self) -> Result<bool> {
        // conjugation leaves the value unchanged
        match self {
            CommSqItem::Comm { left, right, .. } => {
                let r1 = rho_im(left)?;
                let r2 = rho_im(right)?;
                let mut acc = false;
                for i in 0..4 {
                    for j in 0..4 {
                        if i != j {
                            acc ^= r1[i] & r2[j];
                        }
                    }
                }
                Ok(acc)
            }
            CommSqItem::Sq { word, .. } => {
                let r = rho_im(word)?;
                let mut acc = false;
                for i in 0..4 {
                    for j in i + 1..4 {
                        acc ^= r[i] & r[j];
                    }
                }
                Ok(acc)
            }
        }
    }
}

pub type CommSqDecomposition = Vec<CommSqItem>;

/// psi on a commutator/square decomposition:
/// psi([h1,h2]) = sum_{i!=j} rho_i(h1) rho_j(h2) and
/// psi(h^2) = sum_{i<j} rho_i(h) rho_j(h).
pub fn psi_m(d: &CommSqDecomposition) -> Result<bool> {
    let expanded: Vec<TypeOneWord> = d.iter().map(CommSqItem::expand).collect();
    let refs: Vec<&TypeOneWord> = expanded.iter().collect();
    let product = TypeOneWord::concat(&refs);
    if !in_c_m(&product)? {
        return Err(Error::NotInC);
    }
    let mut acc = false;
    for item in d {
        acc ^= item.value()?;
    }
    Ok(acc)
}

/// A word over the five-curve stabilizer generators w_k.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct FiveCurveWord(pub Vec<(i64, i64)>);

impl FiveCurveWord {
    pub fn letter(k: i64, e: i64) -> Self {
        FiveCurveWord(vec![(k, e)])
    }

    pub fn concat(words: &[&FiveCurveWord]) -> Self {
        FiveCurveWord(words.iter().flat_map(|w| w.0.iter().copied()).collect())
    }

    pub fn inverse(&self) -> Self {
        FiveCurveWord(self.0.iter().rev().map(|&(k, e)| (k, -e)).collect())
    }

    pub fn commutator(a: &FiveCurveWord, b: &FiveCurveWord) -> Self {
        FiveCurveWord::concat(&[&a.inverse(), &b.inverse(), a, b])
    }

    /// Conjugation by the index-shifting twist moves every generator index.
    pub fn shifted(&self, by: i64) -> Self {
        FiveCurveWord(self.0.iter().map(|&(k, e)| (k + by, e)).collect())
    }

    pub fn exponent_sum(&self) -> i64 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    fn weighted_sum(&self) -> i64 {
        self.0.iter().map(|&(k, e)| k * e).sum()
    }

    /// sigma of the word: sigma(w_k) = (a2 + a3 + 1) a1 b1 + k a1 a2 a3 in
    /// the configuration basis.
    pub fn sigma(&self, basis: &SymplecticBasisZ2) -> BPrimeElement {
        let x = sigma_w_generator(basis, 0);
        let y = monomial(&[basis.a(0), basis.a(1), basis.a(2)]);
        x.scaled(self.exponent_sum()) + y.scaled(self.weighted_sum())
    }

    pub fn in_c_k(&self, basis: &SymplecticBasisZ2) -> bool {
        self.sigma(basis).is_zero()
    }
}

/// sigma(w_k) as a bounding-pair twist value.
pub fn sigma_w_generator(basis: &SymplecticBasisZ2, k: i64) -> BPrimeElement {
    let c = basis.a(1) + basis.a(2);
    let side = affine_generator(basis.a(0))
        * (affine_generator(basis.b(0)) + affine_generator(basis.a(2)).scaled(k.rem_euclid(2)));
    (affine_generator(c) + BPrimeElement::one()) * side
}

/// nu of the principal curve on a five-curve word, with the evenness check,
/// returning psi = nu / 2 mod 2.
pub fn psi_on_ck(w: &FiveCurveWord, basis: &SymplecticBasisZ2) -> Result<bool> {
    if !w.in_c_k(basis) {
        return Err(Error::NotInC);
    }
    let nu = w.exponent_sum();
    if nu.rem_euclid(2) != 0 {
        return Err(Error::OddNu);
    }
    Ok((nu / 2).rem_euclid(2) == 1)
}

/// nu_{gamma2, W_k} on w_m is the Kronecker delta, extended additively.
pub fn nu_wk_table(k: i64, w: &FiveCurveWord) -> i64 {
    w.0.iter().filter(|&&(m, _)| m == k).map(|&(_, e)| e).sum()
}

/// The splitting W_k = <e2, f2 - k e3> + <e3, f3 - k e2> of the quotient by
/// the principal class e1, over an integral symplectic basis
/// (e1, e2, e3, f1, f2, f3).
pub fn splitting_w(basis_int: &[HClass; 6], k: i64) -> Result<OrthogonalSplitting> {
    let (e1, e2, e3) = (&basis_int[0], &basis_int[1], &basis_int[2]);
    let (f2, f3) = (&basis_int[4], &basis_int[5]);
    OrthogonalSplitting::new(
        e1.clone(),
        [e2.clone(), f2 - &e3.scaled(k)],
        [e3.clone(), f3 - &e2.scaled(k)],
    )
}

/// Tag key for one copy of a doubled class (the two curves of a bounding
/// pair share a class but answer different nu queries).
pub fn copy_key(c: &HClass, idx: usize) -> String {
    format!("{}#{idx}", bcj::class_key(c))
}

/// nu on a symbolic generator by tag key; scaled by the exponent.
pub fn nu_on_generator_key(g: &SymbolicGenerator, key: &str) -> Result<i64> {
    let base = match &g.kind {
        bcj::GenKind::SepTwist { .. } => match g.tags.sep_sides.get(key) {
            Some(SepSide::Genus2) => 1,
            Some(SepSide::Genus1) => 0,
            None => return Err(Error::MissingTag(format!("side of {key}"))),
        },
        bcj::GenKind::BpTwist { .. } => match g.tags.pair_rels.get(key) {
            Some(PairRel::First) => -1,
            Some(PairRel::Second) => 1,
            Some(PairRel::Disjoint) => 0,
            None => return Err(Error::MissingTag(format!("pair relation of {key}"))),
        },
        bcj::GenKind::Involution { .. } => {
            return Err(Error::MalformedGenerator(
                "nu is undefined on the involution",
            ))
        }
    };
    Ok(base * g.exponent)
}

/// nu_gamma on a symbolic generator, from its disjointness tags.
pub fn nu_on_generator(g: &SymbolicGenerator, gamma: &HClass) -> Result<i64> {
    nu_on_generator_key(g, &bcj::class_key(gamma))
}

/// mu on a symbolic generator: the half-sum of the nu values of the two pair
/// components (queried by tag key), which the tables force to be integral.
pub fn mu_on_generator_keys(g: &SymbolicGenerator, keys: (&str, &str)) -> Result<i64> {
    let n0 = nu_on_generator_key(g, keys.0)?;
    let n1 = nu_on_generator_key(g, keys.1)?;
    if (n0 + n1).rem_euclid(2) != 0 {
        return Err(Error::Invalid(
            "nu values of a bounding pair must agree mod 2".into(),
        ));
    }
    Ok((n0 + n1) / 2)
}

/// mu for the bounding pair in class c, using the copy keys of the class.
pub fn mu_on_generator(g: &SymbolicGenerator, c: &HClass) -> Result<i64> {
    mu_on_generator_keys(g, (&copy_key(c, 0), &copy_key(c, 1)))
}

/// nu_{gamma, W}: the nu table refined by the splitting the twist yields.
pub fn nu_w(g: &SymbolicGenerator, gamma: &HClass, w: &OrthogonalSplitting) -> Result<i64> {
    let base = nu_on_generator(g, gamma)?;
    if base == 0 {
        return Ok(0);
    }
    let Some(yielded) = &g.tags.splitting else {
        return Err(Error::MissingTag("splitting".into()));
    };
    Ok(if yielded.same_splitting(w) { base } else { 0 })
}

/// Word-level evaluation: sums of the generator tables.
pub fn nu_on_word(w: &bcj::GeneratorWord, gamma: &HClass) -> Result<i64> {
    w.iter().map(|g| nu_on_generator(g, gamma)).sum()
}

pub fn mu_on_word(w: &bcj::GeneratorWord, c: &HClass) -> Result<i64> {
    w.iter().map(|g| mu_on_generator(g, c)).sum()
}

/// Random word generation for the property suites.
pub mod sampling {
    use super::*;
    use rand::Rng;

    /// A random word over the full type-1 alphabet, balanced into ker f.
    pub fn random_ker_f_word(rng: &mut impl Rng) -> TypeOneWord {
        let letters = [
            T1Letter::U1,
            T1Letter::V1,
            T1Letter::U2,
            T1Letter::V2,
            T1Letter::Z1,
            T1Letter::Z2,
            T1Letter::Z3,
        ];
        let mut w = TypeOneWord::default();
        for _ in 0..rng.gen_range(0..8) {
            let l = letters[rng.gen_range(0..letters.len())];
            let e = [-2i64, -1, 1, 2][rng.gen_range(0..4)];
            w.0.push((l, e));
        }
        let (p, q) = w.f_image();
        if p != 0 {
            w.0.push((T1Letter::U2, -p));
        }
        if q != 0 {
            w.0.push((T1Letter::V2, -q));
        }
        w
    }

    /// A random product of conjugated generators of the five-curve kernel,
    /// together with the expected psi value.
    pub fn random_ck_word(rng: &mut impl Rng) -> (FiveCurveWord, bool) {
        let mut word = FiveCurveWord::default();
        let mut expected = false;
        for _ in 0..rng.gen_range(1..6) {
            let shift = rng.gen_range(-3..=3);
            let k = rng.gen_range(-3..=3i64);
            let m = rng.gen_range(-3..=3i64);
            let part = match rng.gen_range(0..3) {
                0 => {
                    expected ^= true;
                    FiveCurveWord(vec![(k, 2)])
                }
                1 => FiveCurveWord(vec![(k + 2, 1), (k, -1)]),
                _ => FiveCurveWord::commutator(
                    &FiveCurveWord::letter(k, 1),
                    &FiveCurveWord::letter(m, 1),
                ),
            }
            .shifted(shift);
            word = FiveCurveWord::concat(&[&word, &part]);
        }
        (word, expected)
    }
}

/// The type-2 four-component configuration: classes a1, a2, a1+a2, a3 with
/// special element a3, tagged generators T_{alpha', alpha_i}, and the
/// attached form family.
pub mod type2 {
    use super::*;

    pub struct Type2Config {
        pub basis: SymplecticBasisZ2,
        pub family: FormFamily,
        /// integral classes (alpha_1, alpha_2, alpha_0 = a1+a2, alpha_3)
        pub classes: [HClass; 4],
    }

    impl Type2Config {
        pub fn standard() -> Self {
            let basis = SymplecticBasisZ2::standard();
            let family =
                FormFamily::new([basis.a(0), basis.a(1), basis.a(2)]).expect("standard basis");
            Type2Config {
                basis,
                family,
                classes: [
                    HClass::a(0),
                    HClass::a(1),
                    &HClass::a(0) + &HClass::a(1),
                    HClass::a(2),
                ],
            }
        }

        /// T_{alpha', alpha_i} for i in {0, 1, 2} (0 = the a1+a2 component),
        /// with side parameters (m1, m2) for the i = 0 case and full
        /// disjointness tags against all four component classes.
        pub fn generator(&self, i: usize, m1: bool, m2: bool) -> SymbolicGenerator {
            let b = &self.basis;
            let (class2, side) = match i {
                0 => {
                    let mut y = b.b(2);
                    if m1 {
                        y = y + b.a(0);
                    }
                    if m2 {
                        y = y + b.a(1);
                    }
                    (b.a(0) + b.a(1), (b.a(2), y))
                }
                1 => (b.a(0), (b.a(2), b.b(2))),
                2 => (b.a(1), (b.a(2), b.b(2))),
                _ => panic!("type-2 generators are indexed by 0..3"),
            };
            let mut g = SymbolicGenerator::bp(class2, side);
            let int_class = match i {
                0 => self.classes[2].clone(),
                1 => self.classes[0].clone(),
                _ => self.classes[1].clone(),
            };
            for c in &self.classes {
                let rel = if *c == int_class {
                    PairRel::Second
                } else {
                    PairRel::Disjoint
                };
                g.tags.pair_rels.insert(bcj::class_key(c), rel);
            }
            if let bcj::GenKind::BpTwist { class_int, .. } = &mut g.kind {
                *class_int = Some(int_class.clone());
            }
            g.tags.component = Some(int_class);
            g
        }

        pub fn rho(&self, g: &SymbolicGenerator) -> Result<[bool; 4]> {
            Ok(self.family.rho(bcj::sigma(g)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homlattice::Mod2Class;
    use rand::{Rng, SeedableRng};

    fn z(i: usize) -> TypeOneWord {
        TypeOneWord::letter([T1Letter::Z1, T1Letter::Z2, T1Letter::Z3][i - 1], 1)
    }

    #[test]
    fn xi_table() {
        assert_eq!(xi(&z(1)), (1, 0));
        assert_eq!(xi(&z(2)), (0, 1));
        assert_eq!(xi(&z(3)), (0, 0));
        // conjugation preserves abelianized counts
        let w = TypeOneWord::concat(&[&z(2), &z(1), &z(2).inverse()]);
        assert_eq!(xi(&w), (1, 0));
        // the lantern bounding pair T_{eps1, eps2} = z2^-1 z1^-1
        let eps = TypeOneWord::concat(&[&z(2).inverse(), &z(1).inverse()]);
        assert_eq!(xi(&eps), (-1, -1));
    }

    #[test]
    fn rho_table_on_generators() {
        assert_eq!(rho_im(&z(1)).unwrap(), [false, false, true, true]);
        assert_eq!(rho_im(&z(2)).unwrap(), [false, true, false, true]);
        assert_eq!(rho_im(&z(3)).unwrap(), [true, true, true, true]);
        assert_eq!(rho_im(&TypeOneWord::default()).unwrap(), [false; 4]);
        let u = TypeOneWord::letter(T1Letter::U1, 1);
        assert_eq!(rho_im(&u), Err(Error::NotInKerF));
    }

    use super::sampling::random_ker_f_word;

    #[test]
    fn rho_sum_vanishes_and_lifts_hold_on_random_words() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..1000 {
            let w = random_ker_f_word(&mut rng);
            assert!(w.in_ker_f());
            let rho = rho_im(&w).unwrap();
            assert!(!(rho[0] ^ rho[1] ^ rho[2] ^ rho[3]));
            assert!(liftrho_check(&w).unwrap());
        }
    }

    #[test]
    fn magnus_rewrite_identity() {
        // [u1^m, v1] = z1^-m (z1 z3)^m as elements of F2 x F2
        for m in -5..=5i64 {
            let lhs = TypeOneWord::commutator(
                &TypeOneWord::letter(T1Letter::U1, m),
                &TypeOneWord::letter(T1Letter::V1, 1),
            );
            let mut rhs = TypeOneWord::letter(T1Letter::Z1, -m);
            for _ in 0..m.abs() {
                if m > 0 {
                    rhs.0.push((T1Letter::Z1, 1));
                    rhs.0.push((T1Letter::Z3, 1));
                } else {
                    rhs.0.push((T1Letter::Z3, -1));
                    rhs.0.push((T1Letter::Z1, -1));
                }
            }
            assert!(lhs.same_element(&rhs), "m = {m}");
            assert_eq!(magnus_invariant(&lhs), m);
            assert_eq!(rho_im(&lhs).unwrap(), rho_im(&rhs).unwrap());
        }
    }

    #[test]
    fn z4_relation_holds() {
        // z4 = [u2, v2] = z1 z2 z3^-1 z1^-1 z2^-1
        let z4 = TypeOneWord::commutator(
            &TypeOneWord::letter(T1Letter::U2, 1),
            &TypeOneWord::letter(T1Letter::V2, 1),
        );
        let rhs = TypeOneWord(vec![
            (T1Letter::Z1, 1),
            (T1Letter::Z2, 1),
            (T1Letter::Z3, -1),
            (T1Letter::Z1, -1),
            (T1Letter::Z2, -1),
        ]);
        assert!(z4.same_element(&rhs));
        assert_eq!(magnus_invariant(&z4), -1);
    }

    #[test]
    fn psi_values() {
        // Sq(z1) = 1 from rho(z1) = (0,0,1,1)
        assert!(psi_m(&vec![CommSqItem::sq(z(1))]).unwrap());
        // Comm(z1, z2): the ordered pairs (2,1), (2,3), (3,1) contribute
        assert!(psi_m(&vec![CommSqItem::comm(z(1), z(2))]).unwrap());
        // the [iota, z3] combination from the stabilizer analysis
        let d: CommSqDecomposition = vec![
            CommSqItem::comm(
                TypeOneWord::concat(&[&z(1).inverse(), &z(2).inverse()]),
                z(3).inverse(),
            ),
            CommSqItem::sq(z(3)),
            CommSqItem::comm(z(2).inverse(), z(1).inverse()).conjugated(z(3)),
        ];
        assert!(psi_m(&d).unwrap());
    }

    #[test]
    fn psi_is_additive_and_conjugation_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(47);
        for _ in 0..200 {
            let w1 = random_ker_f_word(&mut rng);
            let w2 = random_ker_f_word(&mut rng);
            let d1: CommSqDecomposition = vec![CommSqItem::comm(w1.clone(), w2.clone())];
            let d2: CommSqDecomposition = vec![CommSqItem::sq(w1.clone())];
            let both: CommSqDecomposition = d1.iter().chain(&d2).cloned().collect();
            let sum = psi_m(&d1).unwrap() ^ psi_m(&d2).unwrap();
            assert_eq!(psi_m(&both).unwrap(), sum);
            let conj = random_ker_f_word(&mut rng);
            let conjugated: CommSqDecomposition = both
                .iter()
                .cloned()
                .map(|i| i.conjugated(conj.clone()))
                .collect();
            assert_eq!(psi_m(&conjugated).unwrap(), psi_m(&both).unwrap());
        }
    }

    #[test]
    fn psi_rejects_items_outside_the_stabilizer() {
        let bad: CommSqDecomposition = vec![CommSqItem::sq(TypeOneWord::letter(T1Letter::U1, 1))];
        assert!(psi_m(&bad).is_err());
    }

    #[test]
    fn five_curve_psi_table() {
        let basis = SymplecticBasisZ2::standard();
        let w0 = FiveCurveWord::letter(0, 1);
        let w1 = FiveCurveWord::letter(1, 1);
        let w2 = FiveCurveWord::letter(2, 1);
        let sq = FiveCurveWord::concat(&[&w0, &w0]);
        assert!(psi_on_ck(&sq, &basis).unwrap());
        let comm = FiveCurveWord::commutator(&w0, &w1);
        assert!(!psi_on_ck(&comm, &basis).unwrap());
        let diff = FiveCurveWord::concat(&[&w2, &w0.inverse()]);
        assert!(!psi_on_ck(&diff, &basis).unwrap());
        assert_eq!(psi_on_ck(&w0, &basis), Err(Error::NotInC));
    }

    #[test]
    fn five_curve_sigma_values() {
        let basis = SymplecticBasisZ2::standard();
        let w0 = FiveCurveWord::letter(0, 1);
        let [s1, _, s3] = bcj::type1_sigma_z(&basis);
        assert_eq!(w0.sigma(&basis), s1);
        assert_eq!(FiveCurveWord::letter(1, 1).sigma(&basis), s1 + s3);
        assert_eq!(
            FiveCurveWord::letter(2, 1).sigma(&basis),
            sigma_w_generator(&basis, 2)
        );
    }

    #[test]
    fn psi_equals_half_nu_on_random_kernel_products() {
        let basis = SymplecticBasisZ2::standard();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        for _ in 0..1000 {
            let (word, expected) = sampling::random_ck_word(&mut rng);
            assert!(word.in_c_k(&basis));
            assert_eq!(psi_on_ck(&word, &basis).unwrap(), expected);
        }
    }

    #[test]
    fn nu_wk_is_kronecker_delta() {
        assert_eq!(nu_wk_table(3, &FiveCurveWord::letter(3, 1)), 1);
        assert_eq!(nu_wk_table(0, &FiveCurveWord::letter(5, 1)), 0);
        let word = FiveCurveWord(vec![(2, 1), (0, -1)]);
        assert_eq!(nu_wk_table(2, &word), 1);
        assert_eq!(nu_wk_table(0, &word), -1);
    }

    fn standard_int_basis() -> [HClass; 6] {
        [
            HClass::a(0),
            HClass::a(1),
            HClass::a(2),
            HClass::b(0),
            HClass::b(1),
            HClass::b(2),
        ]
    }

    /// Generator modeled on w_k in the e-basis convention: the pair class is
    /// e1 and the queried curve gamma2 is the second pair component.
    fn wk_generator(k: i64) -> SymbolicGenerator {
        let basis_int = standard_int_basis();
        let gamma = basis_int[0].clone();
        let mut g = SymbolicGenerator::bp(Mod2Class::a(0), (Mod2Class::a(1), Mod2Class::b(1)));
        g.tags.splitting = Some(splitting_w(&basis_int, k).unwrap());
        g.tags
            .pair_rels
            .insert(bcj::class_key(&gamma), PairRel::Second);
        g
    }

    #[test]
    fn wk_splittings_match_the_table() {
        let basis_int = standard_int_basis();
        let gamma = basis_int[0].clone();
        for k in -4..=4i64 {
            let g = wk_generator(k);
            for m in -4..=4i64 {
                let wm = splitting_w(&basis_int, m).unwrap();
                assert_eq!(
                    nu_w(&g, &gamma, &wm).unwrap(),
                    i64::from(k == m),
                    "k={k} m={m}"
                );
            }
        }
    }

    #[test]
    fn separating_family_detects_nonzero_abelianizations() {
        // cross-validate the delta table against the splitting machinery on
        // random words with support in |k| <= 10
        let basis_int = standard_int_basis();
        let gamma = basis_int[0].clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(59);
        for _ in 0..100 {
            let mut word = FiveCurveWord::default();
            for _ in 0..rng.gen_range(1..6) {
                word.0
                    .push((rng.gen_range(-10..=10), rng.gen_range(-2..=2)));
            }
            let as_generators: bcj::GeneratorWord = word
                .0
                .iter()
                .map(|&(k, e)| wk_generator(k).with_exponent(e))
                .collect();
            let mut any_nonzero = false;
            for k in -10..=10 {
                let wk = splitting_w(&basis_int, k).unwrap();
                let via_splitting: i64 = as_generators
                    .iter()
                    .map(|g| nu_w(g, &gamma, &wk).unwrap())
                    .sum();
                assert_eq!(via_splitting, nu_wk_table(k, &word), "k={k}");
                any_nonzero |= via_splitting != 0;
            }
            let abelianization_zero = (-10..=10).all(|k| nu_wk_table(k, &word) == 0);
            assert_eq!(any_nonzero, !abelianization_zero);
        }
    }

    #[test]
    fn nu_mu_generator_tables() {
        let gamma = HClass::a(0);
        let other = HClass::a(1);
        // separating twist: gamma on the genus-2 side, other on the genus-1
        let mut sep = SymbolicGenerator::sep(vec![(Mod2Class::a(2), Mod2Class::b(2))]);
        sep.tags
            .sep_sides
            .insert(bcj::class_key(&gamma), SepSide::Genus2);
        sep.tags
            .sep_sides
            .insert(bcj::class_key(&other), SepSide::Genus1);
        assert_eq!(nu_on_generator(&sep, &gamma).unwrap(), 1);
        assert_eq!(nu_on_generator(&sep, &other).unwrap(), 0);
        // bounding-pair twist about the pair (gamma copies): first/second
        let mut bp = SymbolicGenerator::bp(Mod2Class::a(0), (Mod2Class::a(2), Mod2Class::b(2)));
        bp.tags
            .pair_rels
            .insert(copy_key(&gamma, 0), PairRel::First);
        bp.tags
            .pair_rels
            .insert(copy_key(&gamma, 1), PairRel::Second);
        assert_eq!(nu_on_generator_key(&bp, &copy_key(&gamma, 0)).unwrap(), -1);
        assert_eq!(mu_on_generator(&bp, &gamma).unwrap(), 0);
        // a separating twist disjoint from the pair: mu = 1
        let mut sep_pair = SymbolicGenerator::sep(vec![(Mod2Class::a(2), Mod2Class::b(2))]);
        sep_pair
            .tags
            .sep_sides
            .insert(copy_key(&gamma, 0), SepSide::Genus2);
        sep_pair
            .tags
            .sep_sides
            .insert(copy_key(&gamma, 1), SepSide::Genus2);
        assert_eq!(mu_on_generator(&sep_pair, &gamma).unwrap(), 1);
        // another bounding-pair twist disjoint from the pair: mu = 0
        let mut disjoint =
            SymbolicGenerator::bp(Mod2Class::a(1), (Mod2Class::a(2), Mod2Class::b(2)));
        disjoint
            .tags
            .pair_rels
            .insert(copy_key(&gamma, 0), PairRel::Disjoint);
        disjoint
            .tags
            .pair_rels
            .insert(copy_key(&gamma, 1), PairRel::Disjoint);
        assert_eq!(mu_on_generator(&disjoint, &gamma).unwrap(), 0);
        // exponent scaling and missing tags
        assert_eq!(
            nu_on_generator(&sep.clone().with_exponent(-3), &gamma).unwrap(),
            -3
        );
        let untagged = SymbolicGenerator::sep(vec![(Mod2Class::a(2), Mod2Class::b(2))]);
        assert!(matches!(
            nu_on_generator(&untagged, &gamma),
            Err(Error::MissingTag(_))
        ));
    }

    #[test]
    fn bounding_pair_nu_identity() {
        // nu_{gamma+}(h) + nu_{gamma-}(h) = 2 mu(h) on both generator kinds
        let c = HClass::a(0);
        let keys = (copy_key(&c, 0), copy_key(&c, 1));
        let mut pair_twist =
            SymbolicGenerator::bp(Mod2Class::a(0), (Mod2Class::a(2), Mod2Class::b(2)));
        pair_twist
            .tags
            .pair_rels
            .insert(keys.0.clone(), PairRel::First);
        pair_twist
            .tags
            .pair_rels
            .insert(keys.1.clone(), PairRel::Second);
        let mut sep = SymbolicGenerator::sep(vec![(Mod2Class::a(1), Mod2Class::b(1))]);
        sep.tags.sep_sides.insert(keys.0.clone(), SepSide::Genus2);
        sep.tags.sep_sides.insert(keys.1.clone(), SepSide::Genus2);
        for g in [&pair_twist, &sep] {
            let np = nu_on_generator_key(g, &keys.0).unwrap();
            let nm = nu_on_generator_key(g, &keys.1).unwrap();
            assert_eq!(np + nm, 2 * mu_on_generator(g, &c).unwrap());
        }
    }

    #[test]
    fn type2_rho_tables() {
        let config = type2::Type2Config::standard();
        for i in 0..3 {
            for (m1, m2) in [(false, false), (true, false), (false, true), (true, true)] {
                let g = config.generator(i, m1, m2);
                let rho = config.rho(&g).unwrap();
                // rho0 = rho3 and rho1 = rho2
                assert_eq!(rho[0], rho[3], "i={i}");
                assert_eq!(rho[1], rho[2], "i={i}");
                // rho0 + rho1 = nu_{alpha0} mod 2, alpha0 the a1+a2 component
                let alpha0 = &config.classes[2];
                let nu = nu_on_generator(&g, alpha0).unwrap();
                assert_eq!(rho[0] ^ rho[1], nu.rem_euclid(2) == 1, "i={i}");
                if i == 0 {
                    // the displayed side dependence: rho0 = m1 + m2
                    assert_eq!(rho[0], m1 ^ m2);
                    assert_eq!(rho[1], !(m1 ^ m2));
                }
            }
        }
    }
}
