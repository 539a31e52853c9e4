use super::{Formula, Interpretation, LogicError, Signature, ThreeValuedInterpretation, TriValue};

/// Formula with atoms resolved to signature positions; implication already desugared.
#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    Atom(usize),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    pub(crate) fn new(f: &Formula, sig: &Signature) -> Result<Self, LogicError> {
        Ok(match f {
            Formula::Atom(a) => Compiled::Atom(
                sig.index_of(a)
                    .ok_or_else(|| LogicError::AtomNotInSignature(a.name().to_string()))?,
            ),
            Formula::Not(x) => Compiled::Not(Box::new(Compiled::new(x, sig)?)),
            Formula::And(a, b) => Compiled::And(
                Box::new(Compiled::new(a, sig)?),
                Box::new(Compiled::new(b, sig)?),
            ),
            Formula::Or(a, b) => Compiled::Or(
                Box::new(Compiled::new(a, sig)?),
                Box::new(Compiled::new(b, sig)?),
            ),
            Formula::Implies(a, b) => Compiled::Or(
                Box::new(Compiled::Not(Box::new(Compiled::new(a, sig)?))),
                Box::new(Compiled::new(b, sig)?),
            ),
        })
    }

    /// `row` holds atom `j` at bit `n - 1 - j`.
    pub(crate) fn eval_row(&self, row: u64, n: usize) -> bool {
        match self {
            Compiled::Atom(j) => (row >> (n - 1 - j)) & 1 == 1,
            Compiled::Not(x) => !x.eval_row(row, n),
            Compiled::And(a, b) => a.eval_row(row, n) && b.eval_row(row, n),
            Compiled::Or(a, b) => a.eval_row(row, n) || b.eval_row(row, n),
        }
    }

    pub(crate) fn eval_bits(&self, bits: &[bool]) -> bool {
        match self {
            Compiled::Atom(j) => bits[*j],
            Compiled::Not(x) => !x.eval_bits(bits),
            Compiled::And(a, b) => a.eval_bits(bits) && b.eval_bits(bits),
            Compiled::Or(a, b) => a.eval_bits(bits) || b.eval_bits(bits),
        }
    }

    pub(crate) fn eval_tri(&self, values: &[TriValue]) -> TriValue {
        match self {
            Compiled::Atom(j) => values[*j],
            Compiled::Not(x) => x.eval_tri(values).negate(),
            Compiled::And(a, b) => a.eval_tri(values).min(b.eval_tri(values)),
            Compiled::Or(a, b) => a.eval_tri(values).max(b.eval_tri(values)),
        }
    }
}

/// Classical satisfaction `w |= f`.
pub fn eval2(f: &Formula, w: &Interpretation, sig: &Signature) -> Result<bool, LogicError> {
    w.check_len(sig)?;
    Ok(Compiled::new(f, sig)?.eval_bits(w.bits()))
}

/// Three-valued value of `f` under `v`: conjunction is min, disjunction max, negation swaps
/// 0 and 1 and fixes `both`. `f` is three-valued satisfied iff the result is designated.
pub fn eval3(
    f: &Formula,
    v: &ThreeValuedInterpretation,
    sig: &Signature,
) -> Result<TriValue, LogicError> {
    if v.len() != sig.len() {
        return Err(LogicError::LengthMismatch {
            expected: sig.len(),
            got: v.len(),
        });
    }
    Ok(Compiled::new(f, sig)?.eval_tri(v.values()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, parse_kb};

    fn sig(names: &[&str]) -> Signature {
        Signature::from_names(names).unwrap()
    }

    #[test]
    fn two_valued() {
        let ab = sig(&["a", "b"]);
        let f = parse_formula("a & b").unwrap();
        assert!(!eval2(&f, &"10".parse().unwrap(), &ab).unwrap());
        let g = parse_formula("!a").unwrap();
        assert!(eval2(&g, &"01".parse().unwrap(), &ab).unwrap());
        let only: Vec<String> = (0..4)
            .map(|i| Interpretation::from_index(i, 2))
            .filter(|w| eval2(&f, w, &ab).unwrap())
            .map(|w| w.to_string())
            .collect();
        assert_eq!(only, vec!["11"]);
    }

    #[test]
    fn implication_desugars() {
        let ab = sig(&["a", "b"]);
        let f = parse_formula("a -> b").unwrap();
        let truth: Vec<bool> = (0..4)
            .map(|i| eval2(&f, &Interpretation::from_index(i, 2), &ab).unwrap())
            .collect();
        assert_eq!(truth, vec![true, true, false, true]);
    }

    #[test]
    fn errors() {
        let f = parse_formula("a & z").unwrap();
        assert_eq!(
            eval2(&f, &"10".parse().unwrap(), &sig(&["a", "b"])),
            Err(LogicError::AtomNotInSignature("z".into()))
        );
        assert!(matches!(
            eval2(
                &parse_formula("a").unwrap(),
                &"101".parse().unwrap(),
                &sig(&["a", "b"])
            ),
            Err(LogicError::LengthMismatch {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn three_valued() {
        let s = sig(&["a", "b"]);
        let v = ThreeValuedInterpretation::new(vec![TriValue::Both, TriValue::False]);
        assert_eq!(
            eval3(&parse_formula("!a").unwrap(), &v, &s).unwrap(),
            TriValue::Both
        );
        let v = ThreeValuedInterpretation::new(vec![TriValue::True, TriValue::False]);
        assert_eq!(
            eval3(&parse_formula("a | b").unwrap(), &v, &s).unwrap(),
            TriValue::True
        );
    }

    #[test]
    fn both_both_true_satisfies_k1() {
        let s = sig(&["a", "b", "c"]);
        let k1 = parse_kb("a\na -> b\n!b & !a\nc").unwrap();
        let v =
            ThreeValuedInterpretation::new(vec![TriValue::Both, TriValue::Both, TriValue::True]);
        for f in k1.formulas() {
            assert!(eval3(f, &v, &s).unwrap().is_designated(), "{f}");
        }
    }
}
