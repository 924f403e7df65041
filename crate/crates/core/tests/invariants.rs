//! Invariants over randomly generated presentations.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use reldoc::builtins::ValuedDoctrine;
use reldoc::completion::{check_sruc_section, ruc_doctrine, strongly_complete_objects};
use reldoc::doctrine::objects;
use reldoc::generate::{random_presentation, Shape};
use reldoc::monad::IdentityMonad;
use reldoc::quotients::is_equivalence;
use reldoc::relprops::check_discreteness;
use reldoc::topology::closure_phi;
use reldoc::{check_doctrine_laws, tabulate, Doctrine, FiniteDoctrine, Limits};

fn presentation(seed: u64) -> ValuedDoctrine {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = Shape { max_objects: 2, max_points: 2 };
    random_presentation(&mut rng, shape, &Limits::default()).unwrap().doctrine
}

fn quick() -> Limits {
    Limits { budget: 1 << 12, ..Limits::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_presentations_are_doctrines(seed in any::<u64>()) {
        let d = presentation(seed);
        let r = check_doctrine_laws(&d, &quick()).unwrap();
        prop_assert!(r.is_clean(), "{:?}", r.violations.first());
        prop_assert!(check_discreteness(&d, &quick()).unwrap().is_clean());
    }

    #[test]
    fn completion_is_strongly_complete(seed in any::<u64>()) {
        let r = ruc_doctrine(presentation(seed));
        prop_assert_eq!(strongly_complete_objects(&r).unwrap().len(), r.object_count());
        prop_assert!(check_sruc_section(&r).unwrap().all());
    }

    #[test]
    fn tabulation_round_trips(seed in any::<u64>()) {
        let d = presentation(seed);
        let fd = tabulate(&d, &Limits::default()).unwrap();
        let j = fd.to_json();
        let again = FiniteDoctrine::from_json(&j).unwrap().to_json();
        prop_assert_eq!(serde_json::to_string(&j).unwrap(), serde_json::to_string(&again).unwrap());
        prop_assert!(check_doctrine_laws(&FiniteDoctrine::from_json(&j).unwrap(), &quick()).unwrap().is_clean());
    }

    #[test]
    fn closure_is_a_closure(seed in any::<u64>()) {
        let d = presentation(seed);
        let m = IdentityMonad::new(d.clone());
        for x in objects(&d) {
            let id = d.identity(x);
            for a in d.fibre(x, x).unwrap().iter().take(64) {
                let c = closure_phi(&m, x, &id, a).unwrap().rel;
                prop_assert!(d.leq(x, x, a, &c));
                prop_assert_eq!(&closure_phi(&m, x, &id, &c).unwrap().rel, &c);
                let sym = d.join(x, x, a, &d.conv(x, x, a)).unwrap();
                prop_assert!(is_equivalence(&d, x, &closure_phi(&m, x, &id, &sym).unwrap().rel));
            }
        }
    }
}
