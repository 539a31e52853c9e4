use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use psimc_core::he::field::{add_mod, mul_mod, pow_mod, sub_mod};
use psimc_core::he::{
    ct_add, ct_mul, ct_pow, ct_sub, decrypt, deserialize_ct, encrypt, keygen, serialize_ct,
    SchemeParams,
};
use psimc_core::logic::{
    eval2, eval3, models, parse_formula, satisfaction_sequence, Formula, Interpretation,
    KnowledgeBase, Signature, ThreeValuedInterpretation, TriValue,
};
use psimc_core::measures::{combine3, contension, drastic, min_mismatch_oracle};
use psimc_core::runtime::frame::{encode_frame, read_frame};
use psimc_core::runtime::{Frame, Payload, ResultBody, ResultStage, Role, DEFAULT_MAX_FRAME};

const ATOMS: [&str; 4] = ["p", "q", "r", "s"];

fn sig(n: usize) -> Signature {
    Signature::from_names(&ATOMS[..n]).unwrap()
}

fn formula(n: usize) -> impl Strategy<Value = Formula> {
    let leaf = (0..n).prop_map(|i| Formula::atom(ATOMS[i]));
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

fn kb(n: usize) -> impl Strategy<Value = KnowledgeBase> {
    prop::collection::vec(formula(n), 1..4).prop_map(KnowledgeBase::new)
}

fn interpretation(n: usize) -> impl Strategy<Value = Interpretation> {
    prop::collection::vec(any::<bool>(), n).prop_map(Interpretation::new)
}

fn tri(n: usize) -> impl Strategy<Value = ThreeValuedInterpretation> {
    prop::collection::vec(
        prop_oneof![
            Just(TriValue::False),
            Just(TriValue::Both),
            Just(TriValue::True)
        ],
        n,
    )
    .prop_map(ThreeValuedInterpretation::new)
}

fn tri_satisfies(k: &KnowledgeBase, v: &ThreeValuedInterpretation, s: &Signature) -> bool {
    k.formulas()
        .all(|f| eval3(f, v, s).unwrap().is_designated())
}

proptest! {
    #[test]
    fn display_parses_back(f in formula(4)) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn models_are_exactly_the_satisfying_rows(k in kb(3)) {
        let s = sig(3);
        let ms = models(&k, &s).unwrap();
        let seq = satisfaction_sequence(&k, &s).unwrap();
        for i in 0..8u64 {
            let w = Interpretation::from_index(i, 3);
            let sat = k.formulas().all(|f| eval2(f, &w, &s).unwrap());
            prop_assert_eq!(sat, ms.contains(&w));
            prop_assert_eq!(sat, seq.bits()[i as usize]);
        }
        prop_assert_eq!(drastic(&k, &s).unwrap().value(), ms.is_empty() as u64);
    }

    #[test]
    fn three_valued_agrees_with_two_valued_on_classical_input(
        f in formula(4), w in interpretation(4)
    ) {
        let s = sig(4);
        let v = ThreeValuedInterpretation::from(&w);
        prop_assert_eq!(eval3(&f, &v, &s).unwrap(), TriValue::from(eval2(&f, &w, &s).unwrap()));
    }

    #[test]
    fn setting_one_atom_to_both_keeps_the_value_or_yields_both(
        f in formula(4), v in tri(4), atom in 0usize..4
    ) {
        let s = sig(4);
        let before = eval3(&f, &v, &s).unwrap();
        let mut j = v.clone();
        j.set(atom, TriValue::Both);
        let after = eval3(&f, &j, &s).unwrap();
        prop_assert!(after == before || after == TriValue::Both);
    }

    #[test]
    fn combined_models_satisfy_the_union(ka in kb(3), kb_ in kb(3)) {
        let s = sig(3);
        let ma = models(&ka, &s).unwrap();
        let mb = models(&kb_, &s).unwrap();
        let union = ka.union(&kb_);
        for a in &ma {
            for b in &mb {
                prop_assert!(tri_satisfies(&union, &combine3(a, b).unwrap(), &s));
            }
        }
    }

    #[test]
    fn min_mismatch_bounds_contension(ka in kb(3), kb_ in kb(3)) {
        let s = sig(3);
        let ma = models(&ka, &s).unwrap();
        let mb = models(&kb_, &s).unwrap();
        prop_assume!(!ma.is_empty() && !mb.is_empty());
        let union = ka.union(&kb_);
        let bound = min_mismatch_oracle(&ma, &mb).unwrap().value();
        prop_assert!(bound >= contension(&union, &s).unwrap().value());
        if drastic(&union, &s).unwrap().value() == 0 {
            prop_assert_eq!(bound, 0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homomorphic_ops_match_field_arithmetic(
        x in 0u64..1 << 40, y in 0u64..1 << 40, k in 0u64..1 << 20, e in 0u64..6, seed: u64
    ) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let kp = keygen(&SchemeParams::default(), &mut rng).unwrap();
        let q = kp.public.modulus();
        let cx = encrypt(&kp.public, x, &mut rng).unwrap();
        let cy = encrypt(&kp.public, y, &mut rng).unwrap();
        let d = |c| decrypt(&kp.secret, &c).unwrap();
        prop_assert_eq!(d(ct_add(&cx, &cy).unwrap()), add_mod(x, y, q));
        prop_assert_eq!(d(ct_sub(&cx, &cy).unwrap()), sub_mod(x, y, q));
        prop_assert_eq!(d(ct_sub(k, &cy).unwrap()), sub_mod(k, y, q));
        prop_assert_eq!(d(ct_mul(&cx, k).unwrap()), mul_mod(x, k, q));
        prop_assert_eq!(d(ct_mul(&cx, &cy).unwrap()), mul_mod(x, y, q));
        let p = ct_pow(&cx, ct_add(&cy, 0).unwrap()).unwrap();
        prop_assert_eq!(d(p), pow_mod(x, y, q));
        let squared = ct_pow(&ct_sub(&cx, &cy).unwrap(), e).unwrap();
        prop_assert_eq!(d(squared.clone()), pow_mod(sub_mod(x, y, q), e, q));
        let back = deserialize_ct(&serialize_ct(&squared)).unwrap();
        prop_assert_eq!(d(back.clone()), d(squared.clone()));
        prop_assert_eq!(back.shape_digest(), squared.shape_digest());
    }

    #[test]
    fn frames_survive_the_wire(seq: u64, value: Option<u64>, from_a: bool) {
        let from = if from_a { Role::A } else { Role::B };
        let frame = Frame::new(seq, from, Payload::Result(ResultBody { stage: ResultStage::Done, value }));
        let bytes = encode_frame(&frame, DEFAULT_MAX_FRAME).unwrap();
        prop_assert_eq!(u32::from_be_bytes(bytes[..4].try_into().unwrap()) as usize, bytes.len() - 4);
        let back = read_frame(&mut bytes.as_slice(), DEFAULT_MAX_FRAME).unwrap();
        prop_assert_eq!(back, frame);
    }
}
