//! Formal E^1 chains over the cell taxonomy, the d^1 differential against a
//! sign table, the sigma/nu/mu homomorphisms on chains, the theta pairings,
//! and the identity checker relating them across the differential.
//!
//! Orbit signs and incidence signs are explicit inputs: the orientation
//! choices are not canonical, so identity checks quantify over admissible
//! tables while a deterministic polygon-derived table serves as the default.

use crate::bcj::{self, GeneratorWord};
use crate::cyclecomplex::{
    classify_in_ambient, faces, positive_decomposition, CellClass, HMultiset, Taxonomy,
};
use crate::homlattice::HClass;
use crate::quadbool::{BPrimeElement, FormFamily};
use crate::stabrep::{self, FiveCurveWord};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which of the two stabilizer orbits a term's underlying multicurve lies in.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum OrbitSign {
    Plus,
    Minus,
}

impl OrbitSign {
    fn sign(self) -> i64 {
        match self {
            OrbitSign::Plus => 1,
            OrbitSign::Minus => -1,
        }
    }

    fn flipped_if(self, flip: bool) -> OrbitSign {
        if flip {
            match self {
                OrbitSign::Plus => OrbitSign::Minus,
                OrbitSign::Minus => OrbitSign::Plus,
            }
        } else {
            self
        }
    }
}

/// A stabilizer homology class, represented by the data its invariants are
/// computed from.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    /// A word of tagged twist generators.
    Generators(GeneratorWord),
    /// A word in the five-curve stabilizer model attached to the principal
    /// class of an H2' cell.
    FiveCurve {
        word: FiveCurveWord,
        basis: crate::homlattice::SymplecticBasisZ2,
        principal: HClass,
    },
}

impl Payload {
    pub fn sigma(&self) -> Result<BPrimeElement> {
        match self {
            Payload::Generators(w) => bcj::sigma_word(w),
            Payload::FiveCurve { word, basis, .. } => Ok(word.sigma(basis)),
        }
    }

    /// nu against a tag key (a class key, possibly with a copy suffix).
    pub fn nu_key(&self, key: &str, class: &HClass) -> Result<i64> {
        match self {
            Payload::Generators(w) => w.iter().map(|g| stabrep::nu_on_generator_key(g, key)).sum(),
            Payload::FiveCurve {
                word, principal, ..
            } => Ok(if class == principal {
                word.exponent_sum()
            } else {
                0
            }),
        }
    }

    pub fn mu(&self, c: &HClass) -> Result<i64> {
        match self {
            Payload::Generators(w) => stabrep::mu_on_word(w, c),
            Payload::FiveCurve { .. } => Err(Error::TaxonomyMismatch(
                "mu needs a bounding-pair stabilizer payload",
            )),
        }
    }

    /// The component projection: the sigma contribution of the letters tagged
    /// with the component class c, with separating twists expanded through
    /// the lantern rewrite.
    pub fn component_sigma(&self, c: &HClass) -> Result<BPrimeElement> {
        match self {
            Payload::FiveCurve {
                word,
                basis,
                principal,
            } => Ok(if c == principal {
                word.sigma(basis)
            } else {
                BPrimeElement::zero()
            }),
            Payload::Generators(w) => {
                let mut acc = BPrimeElement::zero();
                for g in w {
                    let letters: Vec<bcj::SymbolicGenerator> = match &g.kind {
                        bcj::GenKind::SepTwist { .. } => bcj::lantern_expand(g)?
                            .into_iter()
                            .map(|l| l.with_exponent(g.exponent))
                            .collect(),
                        _ => vec![g.clone()],
                    };
                    for l in &letters {
                        if l.tags.component.as_ref() == Some(c) {
                            acc = acc + bcj::sigma(l)?;
                        }
                    }
                }
                Ok(acc)
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct LabeledTerm {
    pub cell: CellClass,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit_sign: Option<OrbitSign>,
    pub orientation_sign: i8,
    pub payload: Payload,
    pub coefficient: i64,
    /// For faces obtained by breaking a bounding pair: which copy of the
    /// doubled class the face retained.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retained_copy: Option<(HClass, usize)>,
}

impl LabeledTerm {
    pub fn new(cell: CellClass, payload: Payload) -> Result<Self> {
        let orbit_sign = match cell.taxonomy {
            Taxonomy::H1Type2 { .. } | Taxonomy::H2Prime { .. } => Some(OrbitSign::Plus),
            _ => None,
        };
        Ok(LabeledTerm {
            cell,
            orbit_sign,
            orientation_sign: 1,
            payload,
            coefficient: 1,
            retained_copy: None,
        })
    }

    fn effective_coefficient(&self) -> i64 {
        self.coefficient * i64::from(self.orientation_sign)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
pub struct E1Chain(pub Vec<LabeledTerm>);

/// Incidence and orbit-coherence signs. The default derives incidence
/// coefficients from the cell polygons with a deterministic tie-break and
/// sets every epsilon to +1; seeded tables draw independent signs per pair,
/// which is exactly the admissible freedom the identities must survive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignTable {
    Default,
    Seeded(u64),
}

fn hash_sign(seed: u64, tag: &str, d: &HMultiset, c: &HMultiset) -> i8 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    seed.hash(&mut h);
    tag.hash(&mut h);
    format!("{d:?}|{c:?}").hash(&mut h);
    if h.finish() & 1 == 0 {
        1
    } else {
        -1
    }
}

impl SignTable {
    /// [D : C] for a codimension-1 face.
    pub fn incidence(&self, d: &HMultiset, c: &HMultiset, x: &HClass) -> Result<i8> {
        match self {
            SignTable::Seeded(s) => Ok(hash_sign(*s, "inc", d, c)),
            SignTable::Default => polytope::default_incidence(d, c, x),
        }
    }

    /// epsilon_{D, C} for a two-orbit face of a two-orbit cell.
    pub fn epsilon(&self, d: &HMultiset, c: &HMultiset) -> i8 {
        match self {
            SignTable::Seeded(s) => hash_sign(*s, "eps", d, c),
            SignTable::Default => 1,
        }
    }
}

/// The d^1 differential of a chain supported on 2-cells: the signed sum of
/// codimension-1 faces with payloads carried along unchanged.
pub fn d1(y: &E1Chain, signs: &SignTable, x: &HClass) -> Result<E1Chain> {
    let mut out = Vec::new();
    for term in &y.0 {
        if term.cell.dimension != 2 {
            return Err(Error::TaxonomyMismatch("d1 input cells must be 2-cells"));
        }
        let d = &term.cell.multiset;
        let coeff = term.effective_coefficient();
        for face in faces(d, x)? {
            let c = &face.multiset;
            let inc = i64::from(signs.incidence(d, c, x)?);
            let broken_pair = d.doubled_element().filter(|e| c.multiplicity(e) == 1);
            if let Some(pair_class) = broken_pair {
                // the two faces obtained by deleting one copy carry opposite
                // incidence signs and opposite orbit signs
                for (copy, s) in [(0usize, inc), (1usize, -inc)] {
                    out.push(LabeledTerm {
                        cell: face.clone(),
                        orbit_sign: Some(if copy == 0 {
                            OrbitSign::Plus
                        } else {
                            OrbitSign::Minus
                        }),
                        orientation_sign: 1,
                        payload: term.payload.clone(),
                        coefficient: coeff * s,
                        retained_copy: Some((pair_class.clone(), copy)),
                    });
                }
            } else {
                let orbit_sign = match face.taxonomy {
                    Taxonomy::H1Type2 { .. } => {
                        let parent_orbit = term.orbit_sign.ok_or(Error::TaxonomyMismatch(
                            "two-orbit cell term without an orbit sign",
                        ))?;
                        Some(parent_orbit.flipped_if(signs.epsilon(d, c) < 0))
                    }
                    _ => None,
                };
                out.push(LabeledTerm {
                    cell: face,
                    orbit_sign,
                    orientation_sign: 1,
                    payload: term.payload.clone(),
                    coefficient: coeff * inc,
                    retained_copy: None,
                });
            }
        }
    }
    Ok(E1Chain(out))
}

/// sigma_C of a chain: the mod-2 sum of sigma over the terms on C.
pub fn sigma_c(y: &E1Chain, c: &HMultiset) -> Result<BPrimeElement> {
    let mut acc = BPrimeElement::zero();
    for term in &y.0 {
        if &term.cell.multiset == c {
            acc = acc + term.payload.sigma()?.scaled(term.effective_coefficient());
        }
    }
    Ok(acc)
}

/// sigma_{C, c}: the component projection at a non-special element c of a
/// type-2 cell class.
pub fn sigma_cc(y: &E1Chain, c_cell: &HMultiset, c: &HClass) -> Result<BPrimeElement> {
    let special = match classify_in_ambient(c_cell)?.taxonomy {
        Taxonomy::H1Type2 { special } => special,
        _ => return Err(Error::TaxonomyMismatch("sigma_{C,c} needs a type-2 class")),
    };
    if *c == special || !c_cell.contains(c) {
        return Err(Error::TaxonomyMismatch("c must be a non-special element"));
    }
    let mut acc = BPrimeElement::zero();
    for term in &y.0 {
        if &term.cell.multiset == c_cell {
            acc = acc
                + term
                    .payload
                    .component_sigma(c)?
                    .scaled(term.effective_coefficient());
        }
    }
    Ok(acc)
}

fn nu_of_term(term: &LabeledTerm, c: &HClass) -> Result<i64> {
    let key = match &term.retained_copy {
        Some((cls, idx)) if cls == c => stabrep::copy_key(c, *idx),
        _ => bcj::class_key(c),
    };
    term.payload.nu_key(&key, c)
}

/// nu_{C, c} with the orbit-sign case split; c is a non-special element for
/// type-2 classes and the principal element for H2' classes.
pub fn nu_cc(y: &E1Chain, c_cell: &HMultiset, c: &HClass) -> Result<i64> {
    validate_nu_query(c_cell, c)?;
    let mut acc = 0i64;
    for term in &y.0 {
        if &term.cell.multiset != c_cell {
            continue;
        }
        let orbit = term
            .orbit_sign
            .ok_or(Error::TaxonomyMismatch("nu needs an orbit sign"))?;
        acc += orbit.sign() * term.effective_coefficient() * nu_of_term(term, c)?;
    }
    Ok(acc)
}

/// nu^+_{C, c}: only the plus-orbit terms contribute.
pub fn nu_cc_plus(y: &E1Chain, c_cell: &HMultiset, c: &HClass) -> Result<i64> {
    validate_nu_query(c_cell, c)?;
    let mut acc = 0i64;
    for term in &y.0 {
        if &term.cell.multiset != c_cell || term.orbit_sign != Some(OrbitSign::Plus) {
            continue;
        }
        acc += term.effective_coefficient() * nu_of_term(term, c)?;
    }
    Ok(acc)
}

fn validate_nu_query(c_cell: &HMultiset, c: &HClass) -> Result<()> {
    match classify_in_ambient(c_cell)?.taxonomy {
        Taxonomy::H1Type2 { special } => {
            if *c == special || !c_cell.contains(c) {
                return Err(Error::TaxonomyMismatch("c must be a non-special element"));
            }
        }
        Taxonomy::H2Prime { principal } => {
            if *c != principal {
                return Err(Error::TaxonomyMismatch("c must be the principal element"));
            }
        }
        _ => {
            return Err(Error::TaxonomyMismatch(
                "nu_{C,c} needs a type-2 or H2' class",
            ))
        }
    }
    Ok(())
}

/// mu_C: the bounding-pair homomorphism on terms over a doubled class.
pub fn mu_c(y: &E1Chain, c_cell: &HMultiset) -> Result<i64> {
    let Some(doubled) = c_cell.doubled_element() else {
        return Err(Error::TaxonomyMismatch("mu_C needs a doubled element"));
    };
    let mut acc = 0i64;
    for term in &y.0 {
        if &term.cell.multiset == c_cell {
            acc += term.effective_coefficient() * term.payload.mu(doubled)?;
        }
    }
    Ok(acc)
}

/// The abelian-cycle pairing sum_{i != j} rho_i(h1) rho_j(h2) against the
/// form family of A.
pub fn theta_pairing(family: &FormFamily, h1: &Payload, h2: &Payload) -> Result<bool> {
    let r1 = family.rho(h1.sigma()?);
    let r2 = family.rho(h2.sigma()?);
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

/// The numbered cochain value sum_{i<j} rho_i(h1) rho_j(h2) on a bar term
/// supported on a vertex cell; zero off the chosen vertex class.
pub fn theta_a(
    a: &HMultiset,
    family: &FormFamily,
    cell: &HMultiset,
    h1: &Payload,
    h2: &Payload,
) -> Result<bool> {
    if cell != a {
        return Ok(false);
    }
    let r1 = family.rho(h1.sigma()?);
    let r2 = family.rho(h2.sigma()?);
    let mut acc = false;
    for i in 0..4 {
        for j in i + 1..4 {
            acc ^= r1[i] & r2[j];
        }
    }
    Ok(acc)
}

/// One identity-check outcome.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub pass: bool,
}

/// Evaluate every applicable d^1 identity for a single-term chain on a
/// 2-cell: the sigma_C identity over 4-component faces, the sigma_{C,c} and
/// nu_{C,c} identities over type-2 faces (the latter with the 2 mu
/// correction on bounding-pair cells).
pub fn check_d1_identities(
    d_cell: &HMultiset,
    payload: Payload,
    signs: &SignTable,
    x: &HClass,
) -> Result<Vec<IdentityCheck>> {
    let cell = crate::cyclecomplex::classify(d_cell, x)?;
    if cell.dimension != 2 {
        return Err(Error::TaxonomyMismatch(
            "identity instances live on 2-cells",
        ));
    }
    let y = E1Chain(vec![LabeledTerm::new(cell.clone(), payload)?]);
    let dy = d1(&y, signs, x)?;
    let d_is_h2prime = matches!(cell.taxonomy, Taxonomy::H2Prime { .. });
    let mut checks = Vec::new();

    for face in faces(d_cell, x)? {
        let c = &face.multiset;
        if c.len() != 4 {
            continue;
        }
        match &face.taxonomy {
            Taxonomy::H1Type1 | Taxonomy::H1Type2 { .. } if c.doubled_element().is_none() => {
                // sigma_C(d1 y) = sum over H2' supersets of C in the support
                let lhs = sigma_c(&dy, c)?;
                let rhs = if d_is_h2prime {
                    sigma_d_of_support(&y)?
                } else {
                    BPrimeElement::zero()
                };
                checks.push(IdentityCheck {
                    name: format!("sigma_C at {c:?}"),
                    pass: lhs == rhs,
                });
            }
            _ => {}
        }
        if let Taxonomy::H1Type2 { special } = &face.taxonomy {
            if c.doubled_element().is_some() {
                continue;
            }
            for nonspecial in c.distinct() {
                if nonspecial == *special {
                    continue;
                }
                // sigma_{C,c}(d1 y) = sum over supersets with principal c
                let lhs = sigma_cc(&dy, c, &nonspecial)?;
                let principal_matches = matches!(
                    &cell.taxonomy,
                    Taxonomy::H2Prime { principal } if *principal == nonspecial
                );
                let rhs = if principal_matches {
                    sigma_d_of_support(&y)?
                } else {
                    BPrimeElement::zero()
                };
                checks.push(IdentityCheck {
                    name: format!("sigma_Cc at {c:?} / {nonspecial:?}"),
                    pass: lhs == rhs,
                });

                // nu_{C,c}(d1 y) = eps [D:C] nu_D(y) + 2 [D:C] mu_D(y)
                let lhs = nu_cc(&dy, c, &nonspecial)?;
                let rhs = if d_is_h2prime {
                    if principal_matches {
                        let eps = i64::from(signs.epsilon(d_cell, c));
                        let inc = i64::from(signs.incidence(d_cell, c, x)?);
                        eps * inc * nu_cc(&y, d_cell, &nonspecial)?
                    } else {
                        0
                    }
                } else {
                    let inc = i64::from(signs.incidence(d_cell, c, x)?);
                    2 * inc * mu_c(&y, d_cell)?
                };
                checks.push(IdentityCheck {
                    name: format!("nu_Cc at {c:?} / {nonspecial:?}"),
                    pass: lhs == rhs,
                });
            }
        }
    }
    Ok(checks)
}

fn sigma_d_of_support(y: &E1Chain) -> Result<BPrimeElement> {
    let mut acc = BPrimeElement::zero();
    for term in &y.0 {
        acc = acc + term.payload.sigma()?.scaled(term.effective_coefficient());
    }
    Ok(acc)
}

/// Geometric cell polygons over labeled components, used for the default
/// incidence signs and the d1 ∘ d1 check.
pub mod polytope {
    use super::*;
    use std::collections::BTreeMap;

    /// A sub-multicurve as a sorted set of labeled components.
    pub type Labeled = Vec<(HClass, usize)>;

    fn labeled_components(d: &HMultiset) -> Labeled {
        let mut out = Vec::new();
        for c in d.distinct() {
            for idx in 0..d.multiplicity(&c) {
                out.push((c.clone(), idx));
            }
        }
        out.sort();
        out
    }

    fn class_multiset(l: &Labeled) -> HMultiset {
        HMultiset::new(l.iter().map(|(c, _)| c.clone()).collect()).expect("valid submulticurve")
    }

    fn subsets(items: &Labeled) -> Vec<Labeled> {
        let mut out = vec![Vec::new()];
        for item in items {
            let mut next = Vec::new();
            for s in &out {
                next.push(s.clone());
                let mut t = s.clone();
                t.push(item.clone());
                next.push(t);
            }
            out = next;
        }
        out.into_iter().filter(|s| !s.is_empty()).collect()
    }

    /// Vertices of the cell of D: labeled supports of basic cycles.
    pub fn vertices(d: &HMultiset, x: &HClass) -> Vec<Labeled> {
        let comps = labeled_components(d);
        subsets(&comps)
            .into_iter()
            .filter(|s| {
                let classes: Vec<HClass> = s.iter().map(|(c, _)| c.clone()).collect();
                let mut dedup = classes.clone();
                dedup.sort();
                dedup.dedup();
                if dedup.len() != classes.len() {
                    return false;
                }
                if crate::zmat::rank(&classes.iter().map(|c| c.0.to_vec()).collect())
                    != classes.len()
                {
                    return false;
                }
                positive_decomposition(&classes, x).is_some()
            })
            .collect()
    }

    /// Edges: labeled sub-multicurves of dimension 1 that pass the relative
    /// membership test.
    pub fn edges(d: &HMultiset, x: &HClass) -> Result<Vec<Labeled>> {
        let comps = labeled_components(d);
        let mut out = Vec::new();
        for s in subsets(&comps) {
            let m = class_multiset(&s);
            if m.dimension() != 1 {
                continue;
            }
            if crate::cyclecomplex::is_in_m_relative(&m, d, x)? {
                out.push(s);
            }
        }
        Ok(out)
    }

    fn contains(big: &Labeled, small: &Labeled) -> bool {
        small.iter().all(|i| big.contains(i))
    }

    /// The boundary cycle of a 2-cell: edges in cyclic order with traversal
    /// signs relative to each edge's intrinsic (lexicographic) orientation.
    pub fn polygon(d: &HMultiset, x: &HClass) -> Result<Vec<(Labeled, i8)>> {
        let verts = vertices(d, x);
        let edges = edges(d, x)?;
        // each edge has exactly two endpoint vertices
        let mut endpoints: BTreeMap<usize, [usize; 2]> = BTreeMap::new();
        for (ei, e) in edges.iter().enumerate() {
            let vs: Vec<usize> = verts
                .iter()
                .enumerate()
                .filter(|(_, v)| contains(e, v))
                .map(|(i, _)| i)
                .collect();
            if vs.len() != 2 {
                return Err(Error::Invalid(format!(
                    "edge with {} endpoints in {d:?}",
                    vs.len()
                )));
            }
            endpoints.insert(ei, [vs[0], vs[1]]);
        }
        // walk the cycle starting from the lexicographically least edge
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_by(|&i, &j| edges[i].cmp(&edges[j]));
        let start = *order
            .first()
            .ok_or(Error::Invalid("empty polygon".into()))?;
        let mut cycle = Vec::new();
        let mut current_edge = start;
        // orient the starting edge by its intrinsic direction
        let mut entry_vertex = endpoints[&start][0];
        loop {
            let [v0, v1] = endpoints[&current_edge];
            let exit_vertex = if entry_vertex == v0 { v1 } else { v0 };
            // traversal from entry to exit; intrinsic direction is v0 -> v1
            let sign = if entry_vertex == v0 { 1 } else { -1 };
            cycle.push((edges[current_edge].clone(), sign));
            // find the other edge through exit_vertex
            let next = endpoints
                .iter()
                .find(|(ei, vs)| **ei != current_edge && vs.contains(&exit_vertex))
                .map(|(ei, _)| *ei)
                .ok_or(Error::Invalid("open polygon boundary".into()))?;
            entry_vertex = exit_vertex;
            current_edge = next;
            if current_edge == start {
                break;
            }
            if cycle.len() > edges.len() {
                return Err(Error::Invalid("polygon walk did not close".into()));
            }
        }
        if cycle.len() != edges.len() {
            return Err(Error::Invalid(
                "polygon boundary is not a single cycle".into(),
            ));
        }
        Ok(cycle)
    }

    /// Default incidence coefficient [D : C] for a 2-cell D over a face
    /// class C: the traversal sign of the labeled edge realizing C (the
    /// copy-0 edge when a bounding pair is broken).
    pub fn default_incidence(d: &HMultiset, c: &HMultiset, x: &HClass) -> Result<i8> {
        let broken = d.doubled_element().filter(|e| c.multiplicity(e) == 1);
        for (edge, sign) in polygon(d, x)? {
            if class_multiset(&edge) != *c {
                continue;
            }
            match &broken {
                None => return Ok(sign),
                Some(pair_class) => {
                    // the edge keeping copy 0 of the pair is the + face
                    if edge.contains(&((*pair_class).clone(), 0)) {
                        return Ok(sign);
                    }
                }
            }
        }
        Err(Error::Invalid(format!("{c:?} is not a face of {d:?}")))
    }

    /// d1 of d1 vanishes: the signed vertex boundary of the polygon cancels.
    pub fn d1_squared_is_zero(d: &HMultiset, x: &HClass) -> Result<bool> {
        let verts = vertices(d, x);
        let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
        for (edge, sign) in polygon(d, x)? {
            let vs: Vec<usize> = verts
                .iter()
                .enumerate()
                .filter(|(_, v)| contains(&edge, v))
                .map(|(i, _)| i)
                .collect();
            // intrinsic boundary: head (larger endpoint) minus tail
            let mut pair: Vec<usize> = vs;
            pair.sort_by(|&i, &j| verts[i].cmp(&verts[j]));
            *acc.entry(pair[1]).or_default() += i64::from(sign);
            *acc.entry(pair[0]).or_default() -= i64::from(sign);
        }
        Ok(acc.values().all(|&v| v == 0))
    }
}
