//! Evaluation of the Birman--Craggs--Johnson homomorphism on symbolic twist
//! generators, its degree-4 extension on the hyperelliptic involution, and
//! the scalar homomorphisms rho attached to quadratic forms.
//!
//! A generator is purely homological: a twist is specified by exactly the
//! splitting data its value formula consumes, never by a curve. Side
//! membership, pair relations, and splittings that the stabilizer tables
//! need are caller-supplied tags.

use crate::homlattice::{
    intersection_mod2, HClass, Mod2Class, OrthogonalSplitting, SymplecticBasisZ2,
};
use crate::quadbool::{affine_generator, BPrimeElement, SpQuadraticForm};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Which side of a separating curve a queried class lies on.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum SepSide {
    Genus1,
    Genus2,
}

/// Relation of a queried class to a bounding pair: the class of the first
/// component (the positive twist), the second (the inverse twist), or a
/// class disjoint from both.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum PairRel {
    First,
    Second,
    Disjoint,
}

/// Caller-supplied topological facts about a generator. These are not
/// derivable from homology alone; they are validated only for internal
/// consistency.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct Tags {
    /// sep twists: side membership per queried class
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sep_sides: BTreeMap<String, SepSide>,
    /// bounding-pair twists: pair relation per queried class
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub pair_rels: BTreeMap<String, PairRel>,
    /// the orthogonal splitting of gamma-perp/gamma the twist yields
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub splitting: Option<OrthogonalSplitting>,
    /// component tag for type-2 stabilizer projections
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<HClass>,
    /// lantern expansion of a separating twist into three bounding-pair twists
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lantern: Option<Vec<SymbolicGenerator>>,
}

/// Tag maps are keyed by the debug rendering of the queried class.
pub fn class_key(c: &HClass) -> String {
    format!("{c:?}")
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenKind {
    /// Twist about a separating curve; `side` holds the symplectic pairs of
    /// one of the two complementary subsurfaces (genus 1 or 2).
    SepTwist { side: Vec<(Mod2Class, Mod2Class)> },
    /// Twist about a bounding pair in mod-2 class `class2`; `side` holds the
    /// symplectic pair of one complementary genus-1 piece inside the
    /// orthogonal complement of `class2`.
    BpTwist {
        class2: Mod2Class,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        class_int: Option<HClass>,
        side: Vec<(Mod2Class, Mod2Class)>,
    },
    /// Hyperelliptic involution presented in a reference symplectic basis.
    Involution { basis: SymplecticBasisZ2 },
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SymbolicGenerator {
    #[serde(flatten)]
    pub kind: GenKind,
    #[serde(default = "one")]
    pub exponent: i64,
    #[serde(default, skip_serializing_if = "tags_empty")]
    pub tags: Tags,
}

fn one() -> i64 {
    1
}

fn tags_empty(t: &Tags) -> bool {
    *t == Tags::default()
}

impl SymbolicGenerator {
    pub fn sep(side: Vec<(Mod2Class, Mod2Class)>) -> Self {
        SymbolicGenerator {
            kind: GenKind::SepTwist { side },
            exponent: 1,
            tags: Tags::default(),
        }
    }

    pub fn bp(class2: Mod2Class, side: (Mod2Class, Mod2Class)) -> Self {
        SymbolicGenerator {
            kind: GenKind::BpTwist {
                class2,
                class_int: None,
                side: vec![side],
            },
            exponent: 1,
            tags: Tags::default(),
        }
    }

    pub fn involution(basis: SymplecticBasisZ2) -> Self {
        SymbolicGenerator {
            kind: GenKind::Involution { basis },
            exponent: 1,
            tags: Tags::default(),
        }
    }

    pub fn with_exponent(mut self, e: i64) -> Self {
        self.exponent = e;
        self
    }
}

fn validate_side(side: &[(Mod2Class, Mod2Class)]) -> Result<()> {
    if side.is_empty() || side.len() > 2 {
        return Err(Error::MalformedGenerator("side genus must be 1 or 2"));
    }
    for (i, (xi, yi)) in side.iter().enumerate() {
        for (j, (xj, yj)) in side.iter().enumerate() {
            if intersection_mod2(*xi, *xj) || intersection_mod2(*yi, *yj) {
                return Err(Error::MalformedGenerator("side pairs not symplectic"));
            }
            if intersection_mod2(*xi, *yj) != (i == j) {
                return Err(Error::MalformedGenerator("side pairs not symplectic"));
            }
        }
    }
    let rows: Vec<u64> = side
        .iter()
        .flat_map(|(x, y)| [x.0 as u64, y.0 as u64])
        .collect();
    if crate::gf2::rank(&rows) < rows.len() {
        return Err(Error::MalformedGenerator("side pairs are dependent"));
    }
    Ok(())
}

fn side_product(side: &[(Mod2Class, Mod2Class)]) -> BPrimeElement {
    side.iter().fold(BPrimeElement::zero(), |acc, (x, y)| {
        acc + affine_generator(*x) * affine_generator(*y)
    })
}

/// Value of the BCJ homomorphism on a single Torelli generator, scaled by
/// its exponent. Errors on the involution, which is outside the Torelli
/// group.
pub fn sigma(g: &SymbolicGenerator) -> Result<BPrimeElement> {
    match &g.kind {
        GenKind::SepTwist { side } => {
            validate_side(side)?;
            Ok(side_product(side).scaled(g.exponent))
        }
        GenKind::BpTwist { class2, side, .. } => {
            if class2.is_zero() {
                return Err(Error::MalformedGenerator("bounding pair class is zero"));
            }
            validate_side(side)?;
            let mut rows: Vec<u64> = side
                .iter()
                .flat_map(|(x, y)| [x.0 as u64, y.0 as u64])
                .collect();
            for (x, y) in side {
                if intersection_mod2(*x, *class2) || intersection_mod2(*y, *class2) {
                    return Err(Error::MalformedGenerator(
                        "side pair not orthogonal to class",
                    ));
                }
            }
            rows.push(class2.0 as u64);
            if crate::gf2::rank(&rows) < rows.len() {
                return Err(Error::MalformedGenerator("side pairs meet the pair class"));
            }
            let factor = affine_generator(*class2) + BPrimeElement::one();
            Ok((factor * side_product(side)).scaled(g.exponent))
        }
        GenKind::Involution { .. } => Err(Error::MalformedGenerator(
            "involution is outside the Torelli group",
        )),
    }
}

/// The extended homomorphism: agrees with `sigma` on twists and takes the
/// involution to the degree-4 element a1 b1 (a2 + 1) b2 of its reference
/// basis.
pub fn sigma_hat(g: &SymbolicGenerator) -> Result<BPrimeElement> {
    match &g.kind {
        GenKind::Involution { basis } => {
            if !basis.is_valid() {
                return Err(Error::MalformedGenerator("reference basis not symplectic"));
            }
            let a1 = affine_generator(basis.a(0));
            let b1 = affine_generator(basis.b(0));
            let a2 = affine_generator(basis.a(1));
            let b2 = affine_generator(basis.b(1));
            Ok((a1 * b1 * (a2 + BPrimeElement::one()) * b2).scaled(g.exponent))
        }
        _ => sigma(g),
    }
}

pub type GeneratorWord = Vec<SymbolicGenerator>;

/// Sum of letter values: the target is an elementary abelian 2-group, so a
/// word evaluates as the sum of its letters and inverses evaluate like the
/// letters themselves.
pub fn sigma_word(w: &GeneratorWord) -> Result<BPrimeElement> {
    w.iter()
        .map(sigma)
        .try_fold(BPrimeElement::zero(), |acc, v| Ok(acc + v?))
}

/// Like `sigma_word` but admits involution letters.
pub fn sigma_hat_word(w: &GeneratorWord) -> Result<BPrimeElement> {
    w.iter()
        .map(sigma_hat)
        .try_fold(BPrimeElement::zero(), |acc, v| Ok(acc + v?))
}

/// Birman--Craggs value of a word at one quadratic form.
pub fn rho(omega: SpQuadraticForm, w: &GeneratorWord) -> Result<bool> {
    Ok(sigma_word(w)?.value_at(omega))
}

/// Membership in the BCJ kernel.
pub fn in_c(w: &GeneratorWord) -> Result<bool> {
    Ok(sigma_word(w)?.is_zero())
}

/// Expand a separating twist adjacent to a type-2 stabilizer into its three
/// tagged bounding-pair twists (the lantern rewrite). The expansion is
/// caller-supplied data; this checks it against the value identity
/// sigma(T_delta) = sum sigma(T_{alpha_i', alpha_i}).
pub fn lantern_expand(g: &SymbolicGenerator) -> Result<Vec<SymbolicGenerator>> {
    let GenKind::SepTwist { .. } = &g.kind else {
        return Err(Error::MalformedGenerator(
            "lantern rewrite needs a separating twist",
        ));
    };
    let Some(parts) = &g.tags.lantern else {
        return Err(Error::MissingTag("lantern expansion".into()));
    };
    if parts.len() != 3 {
        return Err(Error::MalformedGenerator(
            "lantern expansion needs 3 twists",
        ));
    }
    let total = parts
        .iter()
        .map(sigma)
        .try_fold(BPrimeElement::zero(), |acc, v| Ok::<_, Error>(acc + v?))?;
    let plain = SymbolicGenerator {
        exponent: 1,
        ..g.clone()
    };
    if total != sigma(&plain)? {
        return Err(Error::Invalid(
            "lantern expansion disagrees with the separating twist".into(),
        ));
    }
    Ok(parts.clone())
}

/// The bounding-pair twists z1 and z2 of the standard type-1 stabilizer
/// presentation over a symplectic basis.
pub fn type1_z_generators(basis: &SymplecticBasisZ2) -> [SymbolicGenerator; 2] {
    let z1 = SymbolicGenerator::bp(basis.a(1) + basis.a(2), (basis.a(0), basis.b(0)));
    let z2 = SymbolicGenerator::bp(basis.a(0) + basis.a(2), (basis.a(1), basis.b(1)));
    [z1, z2]
}

/// sigma values of (z1, z2, z3) in the given basis; z3 enters through the
/// relation sigma(z3) = sigma(z1) + sigma(z1 z3).
pub fn type1_sigma_z(basis: &SymplecticBasisZ2) -> [BPrimeElement; 3] {
    let [z1, z2] = type1_z_generators(basis);
    let z1z3 = SymbolicGenerator::bp(
        basis.a(1) + basis.a(2),
        (basis.a(0), basis.b(0) + basis.a(2)),
    );
    let s1 = sigma(&z1).expect("valid by construction");
    let s2 = sigma(&z2).expect("valid by construction");
    let s13 = sigma(&z1z3).expect("valid by construction");
    [s1, s2, s1 + s13]
}
