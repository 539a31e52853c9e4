#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use psimc_core::he::{ct_add, ct_pow, ct_sub, encrypt, Ciphertext, PublicKey};
use psimc_core::logic::{models, Formula, KnowledgeBase, Signature};
use psimc_core::runtime::{CtBody, Payload, Transcript, WireCt};

/// Random formula over `sig` with nesting depth at most `depth`.
pub fn random_formula(rng: &mut impl Rng, sig: &Signature, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        let i = rng.gen_range(0..sig.len());
        return Formula::atom(sig.atoms()[i].name());
    }
    let sub = |rng: &mut _| random_formula(rng, sig, depth - 1);
    match rng.gen_range(0..4) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        _ => Formula::implies(sub(rng), sub(rng)),
    }
}

/// Random knowledge base with one to three formulas that has at least one model.
pub fn random_consistent_kb(rng: &mut impl Rng, sig: &Signature, depth: usize) -> KnowledgeBase {
    loop {
        let n = rng.gen_range(1..=3);
        let k = KnowledgeBase::new((0..n).map(|_| random_formula(rng, sig, depth)));
        if !models(&k, sig).unwrap().is_empty() {
            return k;
        }
    }
}

fn session_key(t: &Transcript) -> PublicKey {
    match &t.entries[0].frame.payload {
        Payload::Pubkey(b) => b.key.clone(),
        other => panic!("first frame is `{}`", other.kind()),
    }
}

/// The key holder's first vector carries a computed ciphertext hiding the scalar 1.
pub fn forge_plaintext_in_vector(mut t: Transcript) -> Transcript {
    let pk = session_key(&t);
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let forged = ct_add(encrypt(&pk, 0, &mut rng).unwrap(), 1).unwrap();
    let entry = t
        .entries
        .iter_mut()
        .find(|e| e.frame.kind() == "ct_vector")
        .expect("a vector frame");
    if let Payload::CtVector(b) = &mut entry.frame.payload {
        b.cts[0] = WireCt::from(&forged);
    }
    t
}

/// The key holder decrypted one value more than the protocol returns.
pub fn forge_extra_decryption(mut t: Transcript) -> Transcript {
    t.decrypted.push(1);
    t
}

/// The peer's Hamming reply uses its own bits `1,0,1,...` as public scalars.
pub fn forge_peer_bits_as_scalars(mut t: Transcript) -> Transcript {
    let pk = session_key(&t);
    let mut rng = ChaCha20Rng::seed_from_u64(10);
    let mut acc: Option<Ciphertext> = None;
    for i in 0..t.atoms {
        let x = encrypt(&pk, 1, &mut rng).unwrap();
        let bit = (i % 2 == 0) as u64;
        let sq = ct_pow(&ct_sub(&x, bit).unwrap(), 2).unwrap();
        acc = Some(match acc {
            None => ct_add(0, &sq).unwrap(),
            Some(a) => ct_add(&a, &sq).unwrap(),
        });
    }
    let entry = t
        .entries
        .iter_mut()
        .find(|e| e.frame.kind() == "ct")
        .expect("a reply frame");
    entry.frame.payload = Payload::Ct(CtBody {
        ct: WireCt::from(&acc.unwrap()),
    });
    t
}

/// One padded sub-round of an `alg4` transcript goes missing.
pub fn forge_missing_padding(mut t: Transcript) -> Transcript {
    let first = t
        .entries
        .iter()
        .position(|e| e.frame.kind() == "ct_vector")
        .expect("a vector frame");
    t.entries.remove(first);
    t
}
