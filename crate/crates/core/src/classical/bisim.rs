use crate::error::EvalError;
use crate::semantics::{state_map, Coalgebra, FunctorValue, Structure};

/// The quotient of a coalgebra by behavioural equivalence.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub coalgebra: Coalgebra,
    /// The quotient map, a coalgebra homomorphism onto `coalgebra`.
    pub map: Vec<usize>,
}

/// Partition refinement: states stay together while they agree on their
/// block and on the image of their transition value under the current
/// block map. Requires canonical (exactly comparable) transition values,
/// i.e. a finite classical fibre.
pub fn behavioural_quotient(st: &Structure, c: &Coalgebra) -> Result<Quotient, EvalError> {
    let n = c.len();
    let mut blocks = vec![0usize; n];
    let mut count = 1;
    loop {
        let lifted = st.lift_map(c.fibre(), state_map(&blocks))?;
        let mut keyed: Vec<((usize, FunctorValue), usize)> = (0..n)
            .map(|x| Ok(((blocks[x], lifted(&c.gamma()[x])?), x)))
            .collect::<Result<_, EvalError>>()?;
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        let mut next = vec![0usize; n];
        let mut id = 0;
        for i in 0..n {
            if i > 0 && keyed[i].0 != keyed[i - 1].0 {
                id += 1;
            }
            next[keyed[i].1] = id;
        }
        let next_count = id + 1;
        let stable = next_count == count;
        blocks = renumber(&next);
        count = next_count;
        if stable {
            break;
        }
    }
    let lifted = st.lift_map(c.fibre(), state_map(&blocks))?;
    let mut gamma = vec![None; count];
    for x in 0..n {
        if gamma[blocks[x]].is_none() {
            gamma[blocks[x]] = Some(lifted(&c.gamma()[x])?);
        }
    }
    let names = (0..count)
        .map(|b| {
            let members: Vec<&str> = (0..n).filter(|&x| blocks[x] == b).map(|x| c.name(x)).collect();
            format!("[{}]", members.join(","))
        })
        .collect();
    let coalgebra = Coalgebra::new(c.fibre().clone(), names, gamma.into_iter().map(Option::unwrap).collect())?;
    Ok(Quotient { coalgebra, map: blocks })
}

// Block ids in order of first occurrence, so the result does not depend on
// the sort order of transition values.
fn renumber(blocks: &[usize]) -> Vec<usize> {
    let mut seen = std::collections::BTreeMap::new();
    blocks
        .iter()
        .map(|b| {
            let next = seen.len();
            *seen.entry(*b).or_insert(next)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{classical_structure, obj};

    #[test]
    fn merges_bisimilar_deadlocks() {
        let st = classical_structure();
        let c = Coalgebra::indexed(
            obj("P"),
            vec![
                FunctorValue::states([1, 2]),
                FunctorValue::states([]),
                FunctorValue::states([]),
                FunctorValue::states([3]),
            ],
        )
        .unwrap();
        let q = behavioural_quotient(&st, &c).unwrap();
        assert_eq!(q.coalgebra.len(), 3);
        assert_eq!(q.map[1], q.map[2]);
        assert_ne!(q.map[0], q.map[3]);
        crate::semantics::check_homomorphism(&st, &c, &q.coalgebra, &q.map).unwrap();
    }
}
