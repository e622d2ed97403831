//! Named verification suites with deterministic, seedable reports. Each
//! suite pins one group of checkable claims: Boolean-algebra dimensions, the
//! degree-4 obstruction, form families, the theta pairing, the stabilizer
//! generator tables, the psi tables, the taxonomy and superset lattice, the
//! d1 identities over random sign tables, the descent derivations, and
//! d1 composed with itself.

use crate::bcj::{self, SymbolicGenerator};
use crate::chainlab::{self, Payload, SignTable};
use crate::cyclecomplex::{self, sampling::random_h0prime, HMultiset};
use crate::descent::{self, FLinearForm, SystemKind};
use crate::homlattice::{intersection_mod2, HClass, Mod2Class, SymplecticBasisZ2};
use crate::quadbool::{self, FormFamily, SpQuadraticForm};
use crate::stabrep::{self, CommSqItem, FiveCurveWord, T1Letter, TypeOneWord};
use crate::{par_map, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteResult {
    fn new(suite: &str, seed: u64) -> Self {
        SuiteResult {
            suite: suite.to_string(),
            seed,
            pass: true,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.pass &= pass;
        self.checks.push(CheckOutcome {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }
}

pub const SUITES: [&str; 10] = [
    "boolalg-dims",
    "sigmahat-kernel",
    "form-family",
    "theta-pairing",
    "generator-tables",
    "psi-tables",
    "taxonomy-lattice",
    "d1-identities",
    "descent",
    "d1-squared",
];

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteResult> {
    match name {
        "boolalg-dims" => Ok(boolalg_dims(seed)),
        "sigmahat-kernel" => Ok(sigmahat_kernel(seed)),
        "form-family" => Ok(form_family(seed)),
        "theta-pairing" => Ok(theta_pairing(seed)),
        "generator-tables" => Ok(generator_tables(seed)),
        "psi-tables" => Ok(psi_tables(seed)),
        "taxonomy-lattice" => taxonomy_lattice(seed),
        "d1-identities" => d1_identities(seed),
        "descent" => descent_suite(seed),
        "d1-squared" => d1_squared(seed),
        other => Err(Error::Invalid(format!("unknown suite {other:?}"))),
    }
}

pub fn run_all(seed: u64) -> Result<Vec<SuiteResult>> {
    SUITES.iter().map(|s| run_suite(s, seed)).collect()
}

fn boolalg_dims(seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("boolalg-dims", seed);
    let d3 = quadbool::bprime_filtration(3).dim();
    r.check("dim B'_3 = 35", d3 == 35, format!("got {d3}"));
    let d4 = quadbool::bprime_filtration(4).dim();
    r.check("dim B' = 36", d4 == 36, format!("got {d4}"));
    let omega0 = SpQuadraticForm::all()
        .filter(|w| !quadbool::arf(*w))
        .count();
    r.check(
        "|Omega_0| = 36 by brute force",
        omega0 == 36,
        format!("got {omega0}"),
    );
    r
}

fn sigmahat_kernel(seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("sigmahat-kernel", seed);
    let iota = SymbolicGenerator::involution(SymplecticBasisZ2::standard());
    match bcj::sigma_hat(&iota) {
        Ok(v) => {
            r.check(
                "sigma_hat(iota) not in B'_3",
                !quadbool::in_bk(v, 3),
                format!("value {}", v.hex()),
            );
            let deg = quadbool::degree(v);
            r.check("degree 4", deg == 4, format!("got {deg}"));
        }
        Err(e) => r.check("sigma_hat(iota)", false, e.to_string()),
    }
    r
}

/// Random independent pairwise-orthogonal mod-2 triple via transvections.
fn random_mod2_triple(rng: &mut impl Rng) -> [Mod2Class; 3] {
    let mut a = [Mod2Class::a(0), Mod2Class::a(1), Mod2Class::a(2)];
    for _ in 0..rng.gen_range(0..7) {
        let v = Mod2Class(rng.gen_range(1..64));
        for c in a.iter_mut() {
            if intersection_mod2(*c, v) {
                *c = *c + v;
            }
        }
    }
    a
}

fn form_family(seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("form-family", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all_ok = true;
    let mut numbering_ok = true;
    for _ in 0..100 {
        let a = random_mod2_triple(&mut rng);
        let family = match FormFamily::new(a) {
            Ok(f) => f,
            Err(_) => {
                all_ok = false;
                break;
            }
        };
        let mut ours: Vec<SpQuadraticForm> = family.forms.to_vec();
        ours.sort();
        let filtered = quadbool::four_forms_filter(a);
        all_ok &= filtered.len() == 4 && ours == filtered;
        all_ok &= family.forms.iter().all(|w| !quadbool::arf(*w));
        all_ok &= family.forms.iter().all(|w| a.iter().all(|&ai| w.eval(ai)));
        for (i, w) in family.forms.iter().enumerate() {
            for j in 0..3 {
                numbering_ok &= w.eval(family.basis.b(j)) == (i != 0 && i != j + 1);
            }
        }
    }
    r.check(
        "exactly 4 forms matching the exhaustive filter x100",
        all_ok,
        "",
    );
    r.check("numbering table reproduced", numbering_ok, "");
    r
}

fn theta_pairing(seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("theta-pairing", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut ok = true;
    for _ in 0..100 {
        let a = random_mod2_triple(&mut rng);
        let Ok(family) = FormFamily::new(a) else {
            ok = false;
            break;
        };
        let t1 = Payload::Generators(vec![SymbolicGenerator::sep(vec![(
            family.basis.a(0),
            family.basis.b(0),
        )])]);
        let t2 = Payload::Generators(vec![SymbolicGenerator::sep(vec![(
            family.basis.a(1),
            family.basis.b(1),
        )])]);
        match chainlab::theta_pairing(&family, &t1, &t2) {
            Ok(v) => ok &= v,
            Err(_) => ok = false,
        }
    }
    r.check("disjoint separating twists pair to 1 x100", ok, "");
    r
}

fn generator_tables(seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("generator-tables", seed);
    let z = |i: usize| TypeOneWord::letter([T1Letter::Z1, T1Letter::Z2, T1Letter::Z3][i], 1);
    let tables = [
        (stabrep::rho_im(&z(0)), [false, false, true, true]),
        (stabrep::rho_im(&z(1)), [false, true, false, true]),
        (stabrep::rho_im(&z(2)), [true, true, true, true]),
    ];
    for (i, (got, want)) in tables.into_iter().enumerate() {
        let pass = got.as_ref() == Ok(&want);
        r.check(format!("rho(z{})", i + 1), pass, format!("{got:?}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut sums_ok = true;
    let mut lifts_ok = true;
    for _ in 0..1000 {
        let w = stabrep::sampling::random_ker_f_word(&mut rng);
        match stabrep::rho_im(&w) {
            Ok(rho) => sums_ok &= !(rho[0] ^ rho[1] ^ rho[2] ^ rho[3]),
            Err(_) => sums_ok = false,
        }
        lifts_ok &= stabrep::liftrho_check(&w).unwrap_or(false);
    }
    r.check("rho0+rho1+rho2+rho3 = 0 on 1000 random words", sums_ok, "");
    r.check(
        "both lift identities hold on 1000 random words",
        lifts_ok,
        "",
    );
    r
}

fn psi_tables(seed: u64) -> SuiteResult {
    let mut r = SuiteResult::new("psi-tables", seed);
    let basis = SymplecticBasisZ2::standard();
    let w0 = FiveCurveWord::letter(0, 1);
    let w1 = FiveCurveWord::letter(1, 1);
    let w2 = FiveCurveWord::letter(2, 1);
    let cases = [
        ("psi(w0^2) = 1", FiveCurveWord::concat(&[&w0, &w0]), true),
        (
            "psi([w0, w1]) = 0",
            FiveCurveWord::commutator(&w0, &w1),
            false,
        ),
        (
            "psi(w2 w0^-1) = 0",
            FiveCurveWord::concat(&[&w2, &w0.inverse()]),
            false,
        ),
    ];
    for (name, word, want) in cases {
        let got = stabrep::psi_on_ck(&word, &basis);
        r.check(name, got.as_ref() == Ok(&want), format!("{got:?}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let mut cross_ok = true;
    for _ in 0..1000 {
        let (word, expected) = stabrep::sampling::random_ck_word(&mut rng);
        cross_ok &= stabrep::psi_on_ck(&word, &basis) == Ok(expected);
    }
    r.check("psi = nu/2 on 1000 random kernel products", cross_ok, "");
    let z = |i: usize| TypeOneWord::letter([T1Letter::Z1, T1Letter::Z2, T1Letter::Z3][i], 1);
    let d = vec![
        CommSqItem::comm(
            TypeOneWord::concat(&[&z(0).inverse(), &z(1).inverse()]),
            z(2).inverse(),
        ),
        CommSqItem::sq(z(2)),
        CommSqItem::comm(z(1).inverse(), z(0).inverse()).conjugated(z(2)),
    ];
    let got = stabrep::psi_m(&d);
    r.check(
        "the commutator-with-involution decomposition evaluates to 1",
        got == Ok(true),
        format!("{got:?}"),
    );
    r
}

fn taxonomy_lattice(seed: u64) -> Result<SuiteResult> {
    let mut r = SuiteResult::new("taxonomy-lattice", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
    let instances: Vec<_> = (0..100)
        .map(|_| {
            let twists = rng.gen_range(0..3);
            random_h0prime(&mut rng, 20, twists)
        })
        .collect();
    let outcomes = par_map(&instances, |inst| {
        let (list, counts) = cyclecomplex::supersets_with_family_counts(&inst.a, &inst.x).ok()?;
        let count_ok =
            list.len() == 102 && counts == vec![3, 12, 6, 12, 3, 6, 6, 3, 6, 12, 6, 3, 12, 12];
        let dims_ok = list.iter().all(|e| e.dimension() == 3);
        Some(count_ok && dims_ok)
    });
    let lattice_ok = outcomes.iter().all(|o| *o == Some(true));
    r.check(
        "102 supersets of dimension 3 for 100 random A",
        lattice_ok,
        "",
    );

    // the nine- and fourteen-set enumerations, on the standard and two
    // random instances (the derivations compare against the explicit lists)
    let std_x = HClass::from_coords([1, 1, 1, 0, 0, 0]);
    let std_a = vec![HClass::a(0), HClass::a(1), HClass::a(2)];
    let mut probes = vec![(std_a, std_x)];
    for _ in 0..2 {
        let inst = random_h0prime(&mut rng, 12, 1);
        probes.push((inst.a, inst.x));
    }
    let mut nine_ok = true;
    let mut fourteen_ok = true;
    for (a, x) in &probes {
        let sigma = descent::verify_sigma_descent(a, x)?;
        nine_ok &= sigma.targets.len() == 9;
        let f = FLinearForm::canonical(x)?;
        let lambda = descent::verify_lambda_descent_case1(a, &f, x)?;
        fourteen_ok &= lambda.targets.len() == 14;
    }
    r.check("nine-set enumeration reproduced", nine_ok, "");
    r.check("fourteen-set enumeration reproduced", fourteen_ok, "");
    Ok(r)
}

/// One identity-check instance: a 2-cell class, a payload, and the ambient
/// primitive class.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct IdentityInstance {
    pub cell: HMultiset,
    pub payload: Payload,
    pub x: HClass,
}

/// Identity-check instances over the two 2-cell kinds, with payloads for
/// each generator kind.
pub fn identity_instances() -> Result<Vec<IdentityInstance>> {
    let x = HClass::from_coords([1, 1, 1, 0, 0, 0]);
    let principal = &HClass::a(0) + &HClass::a(1);
    let h2prime = HMultiset::new(vec![
        HClass::a(0),
        HClass::a(1),
        HClass::a(2),
        principal.clone(),
        &principal + &HClass::a(2),
    ])?;
    let basis = SymplecticBasisZ2::standard();
    let mut out: Vec<IdentityInstance> = Vec::new();
    for word in [
        FiveCurveWord::letter(0, 1),
        FiveCurveWord::letter(2, -1),
        FiveCurveWord(vec![(0, 1), (1, 2)]),
    ] {
        out.push(IdentityInstance {
            cell: h2prime.clone(),
            payload: Payload::FiveCurve {
                word,
                basis,
                principal: principal.clone(),
            },
            x: x.clone(),
        });
    }

    // the bounding-pair 2-cell [a1, a1, a2, a3, a1+a2]
    let bp_cell = HMultiset::new(vec![
        HClass::a(0),
        HClass::a(0),
        HClass::a(1),
        HClass::a(2),
        &HClass::a(0) + &HClass::a(1),
    ])?;
    let pair_class = HClass::a(0);
    let others = [HClass::a(1), HClass::a(2), &HClass::a(0) + &HClass::a(1)];
    // the twist about the pair itself
    let mut pair_twist = SymbolicGenerator::bp(Mod2Class::a(0), (Mod2Class::a(1), Mod2Class::b(1)));
    pair_twist
        .tags
        .pair_rels
        .insert(stabrep::copy_key(&pair_class, 0), bcj::PairRel::First);
    pair_twist
        .tags
        .pair_rels
        .insert(stabrep::copy_key(&pair_class, 1), bcj::PairRel::Second);
    for c in &others {
        pair_twist
            .tags
            .pair_rels
            .insert(bcj::class_key(c), bcj::PairRel::Disjoint);
    }
    pair_twist.tags.component = Some(pair_class.clone());
    // a separating twist disjoint from the five curves: its genus-1 side
    // holds the special component a3
    let mut sep = SymbolicGenerator::sep(vec![(Mod2Class::a(2), Mod2Class::b(2))]);
    for key in [
        stabrep::copy_key(&pair_class, 0),
        stabrep::copy_key(&pair_class, 1),
        bcj::class_key(&others[0]),
        bcj::class_key(&others[2]),
    ] {
        sep.tags.sep_sides.insert(key, bcj::SepSide::Genus2);
    }
    sep.tags
        .sep_sides
        .insert(bcj::class_key(&others[1]), bcj::SepSide::Genus1);
    // lantern expansion over the three non-special classes a1, a2, a1+a2
    let lantern: Vec<SymbolicGenerator> = [
        (Mod2Class::a(0) + Mod2Class::a(1), &principal),
        (Mod2Class::a(0), &pair_class),
        (Mod2Class::a(1), &others[0]),
    ]
    .into_iter()
    .map(|(class2, component)| {
        let mut g = SymbolicGenerator::bp(class2, (Mod2Class::a(2), Mod2Class::b(2)));
        g.tags.component = Some((*component).clone());
        g
    })
    .collect();
    sep.tags.lantern = Some(lantern);

    out.push(IdentityInstance {
        cell: bp_cell.clone(),
        payload: Payload::Generators(vec![pair_twist.clone()]),
        x: x.clone(),
    });
    out.push(IdentityInstance {
        cell: bp_cell.clone(),
        payload: Payload::Generators(vec![sep.clone()]),
        x: x.clone(),
    });
    out.push(IdentityInstance {
        cell: bp_cell,
        payload: Payload::Generators(vec![pair_twist, sep.with_exponent(-1)]),
        x,
    });
    Ok(out)
}

fn d1_identities(seed: u64) -> Result<SuiteResult> {
    run_d1_identities_with(&identity_instances()?, seed)
}

/// The d1-identity sweep over caller-supplied instances: the default sign
/// table first, then one thousand seeded admissible tables.
pub fn run_d1_identities_with(instances: &[IdentityInstance], seed: u64) -> Result<SuiteResult> {
    let mut r = SuiteResult::new("d1-identities", seed);
    // the default table first
    let mut default_ok = true;
    for inst in instances {
        for check in chainlab::check_d1_identities(
            &inst.cell,
            inst.payload.clone(),
            &SignTable::Default,
            &inst.x,
        )? {
            default_ok &= check.pass;
        }
    }
    r.check(
        "identities hold with the default sign table",
        default_ok,
        "",
    );

    let seeds: Vec<u64> = (0..1000).map(|i| seed.wrapping_add(i)).collect();
    let outcomes = par_map(&seeds, |s| {
        for inst in instances {
            let Ok(checks) = chainlab::check_d1_identities(
                &inst.cell,
                inst.payload.clone(),
                &SignTable::Seeded(*s),
                &inst.x,
            ) else {
                return false;
            };
            if checks.iter().any(|c| !c.pass) {
                return false;
            }
        }
        true
    });
    let all = outcomes.iter().all(|&b| b);
    r.check(
        "identities hold over 1000 random admissible sign tables",
        all,
        format!("{} tables passed", outcomes.iter().filter(|&&b| b).count()),
    );
    Ok(r)
}

fn descent_suite(seed: u64) -> Result<SuiteResult> {
    let mut r = SuiteResult::new("descent", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(5));
    let instances: Vec<_> = (0..50)
        .map(|_| {
            let twists = rng.gen_range(0..3);
            let inst = random_h0prime(&mut rng, 30, twists);
            let forms: Vec<FLinearForm> = (0..5)
                .map(|_| FLinearForm::random(&inst.x, &mut rng).expect("admissible form"))
                .collect();
            (inst, forms)
        })
        .collect();
    let outcomes = par_map(&instances, |(inst, forms)| {
        let ctx = descent::descent_context(&inst.a, &inst.x).ok()?;
        let sigma = descent::verify_sigma_descent_in(&inst.a, &inst.x, &ctx).ok()?;
        if !sigma.ok {
            return Some(false);
        }
        for f in forms {
            let lambda = descent::verify_lambda_descent_case1_in(&inst.a, f, &inst.x, &ctx).ok()?;
            if !lambda.ok {
                return Some(false);
            }
        }
        Some(true)
    });
    let batch_ok = outcomes.iter().all(|o| *o == Some(true));
    r.check(
        "sigma and lambda descents succeed for 50 random A0 x 5 forms",
        batch_ok,
        "",
    );

    let x = HClass::from_coords([1, 1, 1, 0, 0, 0]);
    let a = vec![HClass::a(0), HClass::a(1), HClass::a(2)];
    let sigma_kernel = descent::bounded_kernel_check(SystemKind::Sigma, 8, &a, &x)?;
    r.check(
        "bounded sigma system forces the covered variables at bound 8",
        sigma_kernel.ok,
        format!(
            "{} variables, {} covered, {} forced",
            sigma_kernel.variables, sigma_kernel.covered, sigma_kernel.forced
        ),
    );
    let lambda_kernel = descent::bounded_kernel_check(SystemKind::Lambda, 8, &a, &x)?;
    r.check(
        "bounded lambda system forces the covered variables at bound 8",
        lambda_kernel.ok,
        format!(
            "{} variables, {} covered, {} forced",
            lambda_kernel.variables, lambda_kernel.covered, lambda_kernel.forced
        ),
    );

    // one two-element step
    let x2 = HClass::from_coords([2, 3, 0, 0, 0, 0]);
    let f = FLinearForm::canonical(&x2)?;
    let step =
        descent::lambda_case2_step(&HClass::a(0), &HClass::a(1), &HClass::a(2), &f, &x2, true)?;
    r.check("two-element step certifies an enlargement", step.ok, "");
    Ok(r)
}

fn d1_squared(seed: u64) -> Result<SuiteResult> {
    let mut r = SuiteResult::new("d1-squared", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(6));
    let instances: Vec<_> = (0..20)
        .map(|_| {
            let twists = rng.gen_range(0..3);
            random_h0prime(&mut rng, 20, twists)
        })
        .collect();
    let outcomes = par_map(&instances, |inst| {
        let maximal = cyclecomplex::supersets_in_h(&inst.a, &inst.x).ok()?;
        let mut cells: std::collections::BTreeSet<HMultiset> = std::collections::BTreeSet::new();
        for e in &maximal {
            for c in e.sub_multisets() {
                if c.len() != 5 || c.dimension() != 2 {
                    continue;
                }
                if cyclecomplex::is_in_m_relative(&c, e, &inst.x).ok()? {
                    cells.insert(c);
                }
            }
        }
        let mut checked = 0usize;
        for c in &cells {
            if !chainlab::polytope::d1_squared_is_zero(c, &inst.x).ok()? {
                return Some((checked, false));
            }
            checked += 1;
        }
        Some((checked, true))
    });
    let all_ok = outcomes.iter().all(|o| matches!(o, Some((_, true))));
    let total: usize = outcomes.iter().filter_map(|o| o.map(|(n, _)| n)).sum();
    r.check(
        "d1 of d1 vanishes on all certified 2-cells of 20 random lattices",
        all_ok,
        format!("{total} cells checked"),
    );
    Ok(r)
}
