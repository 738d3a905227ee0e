use crate::arm::{Anchor, BeliefChain, BeliefState, TransitionKernel};
use crate::error::Result;
use crate::index::whittle::InfiniteHorizonOracle;

/// Infinite-horizon indices for every belief-chain node an arm can visit.
///
/// Holds `4 * (lifetime + 1)` entries: both observation anchors and both
/// active anchors, `u = 0..=lifetime`. Immutable once built.
#[derive(Debug, Clone)]
pub struct IndexTable {
    kernel: TransitionKernel,
    values: [Vec<f64>; 4],
}

impl IndexTable {
    pub fn kernel(&self) -> &TransitionKernel {
        &self.kernel
    }

    /// Chain nodes per anchor.
    pub fn depth(&self) -> usize {
        self.values[0].len()
    }

    pub fn len(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, anchor: Anchor, u: usize) -> Option<f64> {
        self.values[anchor.slot()].get(u).copied()
    }

    pub fn lookup(&self, belief: &BeliefState) -> Option<f64> {
        self.get(belief.anchor, belief.u)
    }

    /// `(anchor, u, b, w_inf)` rows in anchor order.
    pub fn entries(&self) -> impl Iterator<Item = (Anchor, usize, f64, f64)> + '_ {
        let chain = BeliefChain::new(self.kernel, self.depth());
        Anchor::ALL.into_iter().flat_map(move |a| {
            let chain = chain.clone();
            self.values[a.slot()].iter().enumerate().map(move |(u, w)| (a, u, chain.get(a, u), *w))
        })
    }
}

pub fn precompute_index_table(
    kernel: &TransitionKernel,
    lifetime: usize,
    oracle: &dyn InfiniteHorizonOracle,
) -> Result<IndexTable> {
    let chain = BeliefChain::new(*kernel, lifetime + 1);
    let mut values: [Vec<f64>; 4] = Default::default();
    for anchor in Anchor::ALL {
        values[anchor.slot()] = (0..=lifetime).map(|u| oracle.index(kernel, chain.get(anchor, u))).collect::<Result<_>>()?;
    }
    Ok(IndexTable { kernel: *kernel, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arm::State;
    use crate::index::whittle::ConvergedFiniteHorizon;

    #[test]
    fn table_size_and_repeatability() {
        let k = TransitionKernel::reference();
        let oracle = ConvergedFiniteHorizon::default();
        let t = precompute_index_table(&k, 5, &oracle).unwrap();
        assert_eq!(t.len(), 4 * 6);
        assert!(t.len() <= 2 * 6 + 2 * 6);
        let a = t.get(Anchor::Observed(State::Good), 3).unwrap();
        let b = t.get(Anchor::Observed(State::Good), 3).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert!(t.get(Anchor::Observed(State::Good), 6).is_none());
        let direct = oracle.index(&k, BeliefState::at(&k, Anchor::Activated(State::Bad), 2).b).unwrap();
        assert_eq!(t.get(Anchor::Activated(State::Bad), 2).unwrap(), direct);
        assert_eq!(t.entries().count(), 24);
    }
}
