use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use wakimoto::brst::{bgg_character, euler_character, module_character, ComplexDescriptor, ModuleKind};
use wakimoto::currents::{relation_suite, Realization};
use wakimoto::exact::{product_series, series_compare, CharacterSeries};
use wakimoto::fock::{apply_mode, enumerate_basis, fock_factors, Family, FockVector, GradedBasis, ModuleParams, SectorLabel, WeightLabel};
use wakimoto::structure::{annihilator_kernel, predicted_vertices, submodule_closure, VectorKind};
use wakimoto::{format_rat, int, parse_rat, rat, Rat};

fn degenerate() -> impl Strategy<Value = (u64, u64, i64, i64)> {
    (2u64..=7, 1u64..=4)
        .prop_filter("coprime, k != 0", |(p, pp)| p.gcd(pp) == 1 && *p != 2 * pp)
        .prop_flat_map(|(p, pp)| (Just(p), Just(pp), 1..p as i64, 0..pp as i64))
}

fn level() -> impl Strategy<Value = Rat> {
    (-9i64..=9, 1i64..=5)
        .prop_map(|(n, d)| rat(n, d))
        .prop_filter("k outside {0, -2}", |k| !k.is_zero() && *k != int(-2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rationals_are_reduced(n in -500i64..500, d in prop_oneof![-40i64..=-1, 1i64..=40]) {
        let x = rat(n, d);
        prop_assert!(x.denom().is_positive());
        prop_assert!(x.numer().gcd(x.denom()).is_one());
        prop_assert_eq!(parse_rat(&format_rat(&x)), Some(x));
    }

    #[test]
    fn series_compare_is_an_equivalence(a in prop::collection::vec(-3i64..3, 6), flip in 0usize..6) {
        let s = CharacterSeries::new(rat(1, 3), a.iter().map(|&c| int(c)).collect());
        let mut b = s.clone();
        b.coeffs[flip] += int(1);
        prop_assert!(series_compare(&s, &s).unwrap().equal);
        let ab = series_compare(&s, &b).unwrap();
        let ba = series_compare(&b, &s).unwrap();
        prop_assert!(!ab.equal && !ba.equal);
        prop_assert_eq!(ab.first_discrepancy.unwrap().degree, flip);
        prop_assert!(series_compare(&b, &b.clone()).unwrap().equal);
    }

    #[test]
    fn euler_matches_bgg((p, pp, m, mp) in degenerate()) {
        let params = ModuleParams::rational(p, pp).unwrap();
        let euler = euler_character(&ComplexDescriptor::new(params.clone(), m, mp).unwrap(), 12).unwrap();
        let bgg = bgg_character(&params, m, mp, 12).unwrap();
        prop_assert_eq!(euler, bgg);
    }

    #[test]
    fn diagram_degrees((p, pp, m, mp) in degenerate()) {
        let params = ModuleParams::rational(p, pp).unwrap();
        let vertices = predicted_vertices(&params, m, mp, 0, 200).unwrap();
        let degree = |kind, index| vertices.iter().find(|v| v.kind == kind && v.index == index).map(|v| v.degree);
        prop_assert_eq!(degree(VectorKind::U, 1), Some((p - m as u64) * (2 * pp - 2 * mp as u64 - 1)));
        prop_assert_eq!(degree(VectorKind::W, 0), Some(m as u64 * (2 * mp as u64 + 1)));
        prop_assert_eq!(degree(VectorKind::V, 0), Some(0));
    }

    #[test]
    fn mode_brackets(k in level(), f in 0usize..3, a in 1i64..=5, n in 0u64..=4, pick in any::<prop::sample::Index>()) {
        let family = Family::ALL[f];
        prop_assume!(family.carries(a));
        let sector = SectorLabel::new(ModuleParams::generic(k.clone()).unwrap(), rat(1, 2));
        let basis = GradedBasis::new(n);
        let m = pick.get(basis.monomials()).clone();
        let v = FockVector::monomial(sector, m, Rat::one());
        let lr = apply_mode(family, a, &apply_mode(family, -a, &v).unwrap()).unwrap();
        let rl = apply_mode(family, -a, &apply_mode(family, a, &v).unwrap()).unwrap();
        prop_assert_eq!(lr.sub(&rl), v.scale(&(family.bracket(&k) * int(a))));
        prop_assert_eq!(apply_mode(family, -a, &v).unwrap().homogeneous_degree(), Some(n + a as u64));
    }

    #[test]
    fn twisted_relations(k in level(), j in -4i64..=4) {
        let r = Realization::new(ModuleParams::generic(k).unwrap());
        let rep = relation_suite(&r, &rat(j, 2), 2, 2, true);
        prop_assert!(rep.passed(), "{:?}", rep.failures.first());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn kernel_vectors_are_fully_annihilated((p, pp, m, mp) in degenerate(), n in 1u64..=3) {
        let params = ModuleParams::rational(p, pp).unwrap();
        let r = Realization::new(params.clone());
        let sector = SectorLabel::labeled(params, &int(m), &rat(2 * mp + 1, 2));
        for kv in annihilator_kernel(&r, &sector, n, false).unwrap() {
            for a in 1..=n as i64 {
                prop_assert!(r.act_x(a, &kv.vector, false).is_zero());
                if a % 2 == 1 {
                    prop_assert!(r.act_beta(a, &kv.vector).unwrap().is_zero());
                }
            }
            prop_assert_eq!(r.act_x(0, &kv.vector, false), kv.vector.scale(&kv.x0_eigenvalue));
        }
    }

    #[test]
    fn closure_of_a_closure((p, pp, m, mp) in degenerate()) {
        let params = ModuleParams::rational(p, pp).unwrap();
        let r = Realization::new(params.clone());
        let sector = SectorLabel::labeled(params, &int(m), &rat(2 * mp + 1, 2));
        let first = submodule_closure(&r, &sector, &[FockVector::vacuum(sector.clone())], 3);
        let generators: Vec<FockVector> = (0..=3).flat_map(|d| {
            let basis = GradedBasis::new(d);
            let sector = sector.clone();
            first.span(d).basis().iter().map(move |c| FockVector::from_coords(sector.clone(), &basis, c)).collect::<Vec<_>>()
        }).collect();
        let again = submodule_closure(&r, &sector, &generators, 3);
        prop_assert_eq!(first.dims(), again.dims());
    }
}

#[test]
fn fock_counts_match_product() {
    let series = product_series(&fock_factors(), 12);
    let sector = SectorLabel::new(ModuleParams::generic(int(1)).unwrap(), Rat::zero());
    for n in 0..=12u64 {
        assert_eq!(int(enumerate_basis(&sector, n).len() as i64), series.coeffs[n as usize]);
    }
    let w = WeightLabel::new(&ModuleParams::generic(rat(1, 3)).unwrap(), rat(3, 2));
    let ch = module_character(ModuleKind::Fock, &w, 8);
    assert_eq!(ch.offset, w.h);
    for n in 0..=8u64 {
        assert_eq!(ch.coeffs[n as usize], int(GradedBasis::new(n).len() as i64));
    }
}
