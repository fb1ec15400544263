mod common;

use qlimit_core::boolfn::{compose, nand2, pror, switch};
use qlimit_core::measures::{
    block_sensitivity, certificate_complexity, decision_tree_depth, fractional_block_sensitivity, sensitivity,
};
use qlimit_core::ratlp::int;

#[test]
fn measures_agree_with_brute_force_on_three_bits() {
    for n in 1..=3 {
        for f in common::all_functions(n) {
            assert_eq!(decision_tree_depth(&f), common::brute_d(&f), "D {}", f.to_json());
            let c = certificate_complexity(&f);
            assert_eq!((c.c0, c.c1), common::brute_c(&f), "C {}", f.to_json());
            assert_eq!(sensitivity(&f).0, common::brute_s(&f), "s {}", f.to_json());
            let bs = block_sensitivity(&f).unwrap().0;
            assert_eq!(bs, common::brute_bs(&f), "bs {}", f.to_json());
            let fbs = fractional_block_sensitivity(&f).unwrap().0;
            assert!(int(bs as i64) <= fbs && fbs <= int(c.c as i64), "bs ≤ fbs ≤ C {}", f.to_json());
        }
    }
}

#[test]
fn composed_functions_against_brute_force() {
    for f in [compose(&pror(2), &switch()).unwrap(), compose(&nand2(), &pror(3)).unwrap(), compose(&switch(), &nand2()).unwrap()] {
        assert_eq!(decision_tree_depth(&f), common::brute_d(&f));
        let c = certificate_complexity(&f);
        assert_eq!((c.c0, c.c1), common::brute_c(&f));
        assert_eq!(block_sensitivity(&f).unwrap().0, common::brute_bs(&f));
    }
}

#[test]
fn renaming_classes_are_counted_once() {
    // Burnside: 80 non-empty tables, 26 of them fixed by the swap.
    assert_eq!(common::all_functions(2).len(), (80 + 26) / 2);
    assert_eq!(common::all_functions(1).len(), 8);
}
