use std::collections::HashSet;

use centralaut::extension::*;
use centralaut::oracle::{self, builtin, e1, e1_json, e2};
use centralaut::{AbelianPGroup, Bounds, EndoMatrix, Error, MatrixJson, TableGroup};

fn theta(z: &AbelianPGroup, rows: &[&[i128]]) -> EndoMatrix {
    let raw: Vec<Vec<i128>> = rows.iter().map(|r| r.to_vec()).collect();
    centralaut::canonicalize(z, &raw).unwrap()
}

fn trivial_q() -> TableGroup {
    TableGroup::new(vec![vec![0]], None).unwrap()
}

#[test]
fn e1_structure() {
    let g = e1();
    assert_eq!(g.order_usize(), Some(243));
    let (a, b) = (g.t(1), g.t(3));
    assert_ne!(g.mul(&a, &b), g.mul(&b, &a));
    let center = g.center_of(729).unwrap();
    assert_eq!(center.elements.len(), 27);
    assert!(center.equals_z_factor);
    assert!(g.is_p_central(729).unwrap());
    assert!(g.is_p2_abelian(729).unwrap());
    let h = g.verify_hypotheses(&Bounds::default()).clone();
    assert!(h.all_hold());
    assert_eq!(h.mode, CheckMode::Exhaustive);
    let mut reduced = g.hypotheses_from_representatives();
    reduced.mode = CheckMode::Exhaustive;
    assert_eq!(reduced, h);
}

#[test]
fn trivial_and_split_extensions() {
    let z = AbelianPGroup::new(3, &[2]).unwrap();
    let g = CentralExtensionGroup::new(trivial_q(), z.clone(), CocycleTable::zero(1, &z)).unwrap();
    assert_eq!(g.center_of(729).unwrap().elements.len(), 9);
    let q = elementary_abelian(3, 2).unwrap();
    let split = CentralExtensionGroup::new(q.clone(), z.clone(), CocycleTable::zero(9, &z)).unwrap();
    assert_eq!(split.center_of(729).unwrap().elements.len(), 81);
    assert!(!split.center_of(729).unwrap().equals_z_factor);
    let t = oracle::table_from_extension(&split, 750).unwrap();
    assert!(t.is_abelian());
    assert!(split.center_of(10).is_err());
}

#[test]
fn cocycle_corruption_is_caught() {
    let g = e1();
    let z = g.center_factor().clone();
    let mut caught = 0;
    for x in 0..9 {
        for y in 0..9 {
            let mut mu = g.cocycle().clone();
            let v = z.add(mu.get(x, y), &z.basis(0)).unwrap();
            mu.set(x, y, v);
            let r = CentralExtensionGroup::new(g.quotient().clone(), z.clone(), mu);
            assert!(matches!(r, Err(Error::CocycleIdentityFailed { .. }) | Err(Error::NotNormalized { .. })));
            caught += 1;
        }
    }
    assert_eq!(caught, 81);
}

#[test]
fn dagger_needs_checked_hypotheses() {
    let g = e1();
    assert!(matches!(g.dagger_check(), Err(Error::PreconditionNotChecked)));
    g.verify_hypotheses(&Bounds::default());
    assert!(g.dagger_check().unwrap());
    let g2 = e2();
    g2.verify_hypotheses(&Bounds::default());
    assert!(g2.dagger_check().unwrap());
}

#[test]
fn star_coefficients_are_integer_identities() {
    for g in [e1(), e2()] {
        let z = g.center_factor().clone();
        let c = g.star_coefficients(0, 0).unwrap();
        assert!(c.alpha.iter().chain(&c.beta).chain(&c.gamma).chain(&c.delta).all(|&v| v == 0));
        for x in 0..9 {
            for y in 0..9 {
                assert!(g.star_coefficients(x, y).unwrap().holds(&z));
            }
        }
    }
    // E1, x = (1,0), y = (0,1): mu vanishes since x_2 = 0
    let c = e1().star_coefficients(1, 3).unwrap();
    assert_eq!(c.alpha, vec![0]);
}

#[test]
fn chi_construction() {
    let g = e2();
    let z = g.center_factor().clone();
    let id = EndoMatrix::identity(&z);
    assert!(g.construct_chi(&id).unwrap().iter().all(AbelianPGroup::is_zero));
    let th = theta(&z, &[&[10]]);
    let chi = g.construct_chi(&th).unwrap();
    for x in 0..9 {
        let beta = g.p_power_coords(x).unwrap();
        assert_eq!(chi[x].coords[0], 3 * beta.coords[0] % 27);
    }
    assert!(g.verify_star(&th, &chi));
    assert!(chi.iter().any(|c| !AbelianPGroup::is_zero(c)));
    assert!(matches!(g.construct_chi(&theta(&z, &[&[4]])), Err(Error::NotRestricted(_))));
}

#[test]
fn zero_chi_against_nontrivial_theta() {
    let z = AbelianPGroup::new(3, &[3]).unwrap();
    let th = theta(&z, &[&[10]]);
    let zero = vec![z.zero(); 9];
    // every cocycle value of E1 lies in 9Z/27, which theta - 1 = 9 kills
    assert!(e1().verify_star(&th, &zero));
    // E2 has cocycle value 1, so the correction term is needed
    assert!(!e2().verify_star(&th, &zero));
    assert!(e2().star_witness(&th, &zero).is_some());
}

#[test]
fn lifting_on_e1() {
    let g = e1();
    let bounds = Bounds::default();
    let z = g.center_factor().clone();
    let id = g.extend_automorphism(&EndoMatrix::identity(&z), &bounds).unwrap();
    assert!(id.is_identity());
    let gamma = g.extend_automorphism(&theta(&z, &[&[10]]), &bounds).unwrap();
    let v = gamma.verification.clone().unwrap();
    assert!(v.passed());
    assert_eq!(v.mode, CheckMode::Exhaustive);
    let center = g.central(z.basis(0));
    assert_eq!(gamma.apply(&g, &center), g.central(z.element(&[10]).unwrap()));
    assert!(matches!(g.extend_automorphism(&theta(&z, &[&[4]]), &bounds), Err(Error::NotRestricted(_))));
}

#[test]
fn family_of_e1_is_a_group_of_order_three() {
    let g = e1();
    let bounds = Bounds::default();
    let fam = g.extension_family(&bounds).unwrap();
    assert_eq!(fam.len(), 3);
    assert!(fam[0].is_identity());
    let set: HashSet<_> = fam.iter().cloned().collect();
    assert_eq!(set.len(), 3);
    for a in &fam {
        for b in &fam {
            assert!(set.contains(&a.compose(&g, b)));
        }
    }
    assert!(fam[1..].iter().all(|a| a.order(&g, 27) == Some(3)));
    let table = oracle::table_from_extension(&g, 750).unwrap();
    let search = oracle::brute_aut(&table, 750).unwrap();
    let (_, inn) = oracle::center_and_inn(&table, 750).unwrap();
    let inn: HashSet<_> = inn.into_iter().collect();
    for a in &fam {
        let m = oracle::map_from_lift(&g, a);
        assert!(search.contains(&m));
        assert!(m.is_automorphism(&table));
        assert_eq!(inn.contains(&m), a.is_identity());
    }
}

#[test]
fn family_of_e2_is_closed_as_a_subgroup() {
    let g = e2();
    let bounds = Bounds::default();
    let fam = g.extension_family(&bounds).unwrap();
    assert_eq!(fam.len(), 3);
    for a in &fam {
        assert_eq!(a.order(&g, 27).map(|o| 27 % o), Some(0));
        for b in &fam {
            let c = a.compose(&g, b);
            assert!(c.theta.satisfies_abc());
            assert!(g.verify_star(&c.theta, &c.chi));
            assert!(g.verify_automorphism(&c, &bounds).passed());
        }
    }
}

#[test]
fn family_sizes() {
    let bounds = Bounds::default();
    let z = AbelianPGroup::new(3, &[2]).unwrap();
    let g = CentralExtensionGroup::new(trivial_q(), z.clone(), CocycleTable::zero(1, &z)).unwrap();
    let fam = g.extension_family(&bounds).unwrap();
    assert_eq!(fam.len(), 1);
    assert!(fam[0].is_identity());
    let z = AbelianPGroup::new(3, &[3, 3, 3]).unwrap();
    let g = CentralExtensionGroup::new(trivial_q(), z.clone(), CocycleTable::zero(1, &z)).unwrap();
    let fam = g.extension_family(&bounds).unwrap();
    assert_eq!(fam.len(), 19683);
    assert!(fam.iter().all(|a| a.verification.as_ref().unwrap().passed()));
}

#[test]
fn even_prime_is_rejected_for_lifting() {
    let d8 = builtin("dihedral8").unwrap();
    let g = oracle::extension_from_table(&d8, 2, 2).unwrap();
    let z = g.center_factor().clone();
    let r = g.extend_automorphism(&EndoMatrix::identity(&z), &Bounds::default());
    assert!(matches!(r, Err(Error::EvenPrime(2))));
}

#[test]
fn hypothesis_failure_is_reported() {
    let z = AbelianPGroup::new(3, &[2]).unwrap();
    let q = elementary_abelian(3, 2).unwrap();
    let split = CentralExtensionGroup::new(q, z.clone(), CocycleTable::zero(9, &z)).unwrap();
    match split.extend_automorphism(&EndoMatrix::identity(&z), &Bounds::default()) {
        Err(Error::HypothesisViolation(v)) => assert!(v.iter().any(|s| s.contains("Z(G)"))),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn json_round_trip() {
    let js = serde_json::to_string(&e1_json()).unwrap();
    let back: ExtensionJson = serde_json::from_str(&js).unwrap();
    let g = back.build().unwrap();
    let again: ExtensionJson = serde_json::from_str(&serde_json::to_string(&g.to_json()).unwrap()).unwrap();
    let h = again.build().unwrap();
    assert_eq!(g.cocycle(), h.cocycle());
    let raw = r#"{"p":3,"q":{"type":"elementary","rank":2},"z":{"p":3,"exponents":[3]},
                  "cocycle":{"type":"bilinear","scale":9,"matrix":[[0,0],[1,0]]}}"#;
    let parsed: ExtensionJson = serde_json::from_str(raw).unwrap();
    assert_eq!(parsed.build().unwrap().cocycle(), e1().cocycle());
    let bad = raw.replace("\"p\":3,\"q\"", "\"p\":5,\"q\"");
    assert!(serde_json::from_str::<ExtensionJson>(&bad).unwrap().build().is_err());
    let m = MatrixJson { group: e1().center_factor().descriptor(), entries: vec![vec![10]] };
    let gamma = e1().extend_automorphism(&m.build().unwrap(), &Bounds::default()).unwrap();
    let report = serde_json::to_value(gamma.report(Some(true))).unwrap();
    assert_eq!(report["theta"]["entries"], serde_json::json!([[10]]));
    assert_eq!(report["verified"]["homomorphism"], serde_json::json!(true));
}
