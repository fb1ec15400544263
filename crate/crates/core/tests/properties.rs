use proptest::prelude::*;

use qlimit_core::boolfn::{compose, negate_bits, negate_output, rename_indices, restrict, PartialFunction};
use qlimit_core::lasvegas::{run_ak, sample_input, verify_recursive, Evaluator, EvaluatorKind};
use qlimit_core::measures::{self, Measure};
use qlimit_core::ratlp::int;
use qlimit_core::reductions::{decide, verify, Budget, Decision, Mode, ReductionWitness};

fn function(max_n: usize) -> impl Strategy<Value = PartialFunction> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop::option::of(any::<bool>()), 1usize << n).prop_filter_map("empty domain", move |vals| {
            let entries: Vec<(u64, bool)> =
                vals.iter().enumerate().filter_map(|(x, v)| v.map(|b| (x as u64, b))).collect();
            PartialFunction::new(n, entries).ok()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spec_round_trip(f in function(4)) {
        prop_assert_eq!(PartialFunction::from_json(&f.to_json()).unwrap(), f.clone());
        prop_assert_eq!(PartialFunction::from_text(&f.to_text()).unwrap(), f);
    }

    #[test]
    fn negations_preserve_measures(f in function(3), z in 0u64..8) {
        let g = negate_bits(&f, z & ((1 << f.arity()) - 1)).unwrap();
        let h = negate_output(&f);
        for m in [Measure::D, Measure::C, Measure::S, Measure::Bs, Measure::Deg] {
            let v = measures::value(m, &f, &int(0)).unwrap();
            prop_assert_eq!(&measures::value(m, &g, &int(0)).unwrap(), &v);
            prop_assert_eq!(&measures::value(m, &h, &int(0)).unwrap(), &v);
        }
    }

    #[test]
    fn renaming_is_found_by_search(f in function(3), seed in any::<u64>()) {
        let n = f.arity();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.rotate_left((seed % n as u64) as usize);
        let g = rename_indices(&f, &perm).unwrap();
        match decide(&g, &f, Mode::Weak, &Budget::default()).unwrap() {
            Decision::Reducible(w) => prop_assert!(verify(&w).unwrap()),
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn restriction_is_a_weak_reduction(f in function(3), keep in any::<u64>()) {
        let dom: Vec<u64> = f.domain().enumerate().filter(|(i, _)| keep >> (i % 64) & 1 == 1).map(|e| e.1).collect();
        prop_assume!(!dom.is_empty());
        let g = restrict(&f, &dom).unwrap();
        match decide(&g, &f, Mode::Weak, &Budget::default()).unwrap() {
            Decision::Reducible(w) => {
                prop_assert!(verify(&w).unwrap());
                let back = ReductionWitness::from_json(&w.to_json().to_string()).unwrap();
                prop_assert!(verify(&back).unwrap());
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn composition_arity_and_values(f in function(2), g in function(2)) {
        let m = g.arity();
        // Every block tuple from Dom(g)^n whose inner string lies in Dom(f).
        let mut expected = Vec::new();
        for x in 0u64..1 << (f.arity() * m) {
            let inner: Option<u64> = (0..f.arity())
                .map(|i| g.get((x >> (i * m)) & ((1 << m) - 1)).map(|b| (b as u64) << i))
                .sum();
            if let Some(v) = inner.and_then(|y| f.get(y)) {
                expected.push((x, v));
            }
        }
        match compose(&f, &g) {
            Ok(h) => {
                prop_assert_eq!(h.arity(), f.arity() * m);
                prop_assert_eq!(h.entries().to_vec(), expected);
            }
            Err(e) => {
                prop_assert!(matches!(e, qlimit_core::Error::EmptyDomain));
                prop_assert!(expected.is_empty());
            }
        }
    }

    #[test]
    fn las_vegas_runs_verify(seed in any::<u64>(), k in 1usize..6, root in any::<bool>()) {
        let f = qlimit_core::boolfn::nand2();
        let e = Evaluator::new(EvaluatorKind::DirectionalNand, &f).unwrap();
        let mut x = sample_input(&f, k, root, seed).unwrap();
        let run = run_ak(&f, k, &mut x, &e, seed ^ 0x5eed, false).unwrap();
        let c = run.certificate().unwrap();
        prop_assert_eq!(c.value, root);
        prop_assert!(verify_recursive(&f, k, c, &mut x));
        prop_assert!(x.is_consistent());
    }
}
