//! The corrected field theory attached to a formal minimal class.
//!
//! On the space of genus-h curves with n >= m markings, an insertion
//! tuple that is a permutation of (b_1, ..., b_m, a, ..., a) evaluates to
//! the topological value plus a signed gamma term; everywhere else the
//! theory equals its topological part. The sign is the Koszul sign of
//! the permutation from the canonical order, and the keep list records
//! which marking carries each b_j so that gamma transports correctly
//! under relabelling.
//!
//! The axiom checks compare two independently computed sides: the left
//! side pulls the evaluated class back along a boundary map using the
//! formal minimality rewrites, the right side contracts with the
//! bi-vector and re-evaluates on the pieces. For a separating map with
//! leg sets (s1 | s2) the right side carries the Koszul sign of
//! reordering the insertions into (s1 ascending, s2 ascending); the node
//! slots sit adjacent across the tensor, and summing both orientations
//! of each odd bi-vector term absorbs the remaining crossing signs.

use crate::error::{Error, Result};
use crate::formal_classes::{
    check_takes_value, pullback_gamma_q, pullback_gamma_r, ClassSymbol, FormalClass, FormalGamma,
    ProductClass, SpaceLabel,
};
use crate::stable_graphs::{IrrGraph, SepGraph};
use crate::state_space::{
    build_state_space, koszul_sign, BasisVector, BivectorTerm, Coeff, GradingMode, StateSpace,
};
use crate::topft::{evaluate_topft_closed, require_stable};

/// Which of the four separating configurations a gamma contribution
/// realizes: the corrected factor first with (a, d) or a skipped b_i
/// completed through (b_i, c_i), or their mirror images on the second
/// factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionCase {
    None,
    Case1,
    Case2(usize),
    Case3,
    Case4(usize),
}

/// Evaluator bundling a formal minimal class with its state space.
#[derive(Debug, Clone)]
pub struct Omega {
    gamma: FormalGamma,
    space: StateSpace,
}

impl Omega {
    pub fn new(gamma: FormalGamma) -> Omega {
        let space = build_state_space(gamma.m(), gamma.mode());
        Omega { gamma, space }
    }

    pub fn gamma(&self) -> &FormalGamma {
        &self.gamma
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    /// Full evaluation: topological part plus the gamma correction.
    pub fn evaluate(&self, g: usize, insertions: &[BasisVector]) -> Result<FormalClass> {
        if self.gamma.is_trivial() {
            return Err(Error::TrivialBranch);
        }
        let n = insertions.len();
        require_stable(g, n)?;
        self.space.check_indices(insertions)?;
        let space = SpaceLabel { g, n };
        let mut cls = FormalClass::zero(space);
        cls.add_term(
            ClassSymbol::Unit,
            evaluate_topft_closed(&self.space, g, insertions)?,
        );
        if g == self.gamma.h() && n >= self.gamma.m() {
            if let Some((sign, keep)) = self.correction_term(insertions) {
                cls.add_term(ClassSymbol::Gamma(keep), sign);
            }
        }
        Ok(cls)
    }

    /// The correction fires exactly when the insertion multiset is
    /// {b_1, ..., b_m} ∪ {a}^(n-m) with each b_j appearing once. Returns
    /// the Koszul sign from the canonical order together with the keep
    /// list keep[j] = marking carrying b_j.
    fn correction_term(&self, insertions: &[BasisVector]) -> Option<(Coeff, Vec<usize>)> {
        let m = self.gamma.m();
        let mut position_of_b = vec![0usize; m + 1];
        let mut b_order = Vec::with_capacity(m);
        for (slot, &v) in insertions.iter().enumerate() {
            match v {
                BasisVector::A => {}
                BasisVector::B(i) => {
                    if position_of_b[i] != 0 {
                        return None;
                    }
                    position_of_b[i] = slot + 1;
                    b_order.push(i);
                }
                _ => return None,
            }
        }
        if position_of_b[1..].iter().any(|&p| p == 0) {
            return None;
        }
        let sign = match self.space.mode() {
            GradingMode::Ungraded => 1,
            GradingMode::Graded => {
                // Sign of the permutation of b-indices in appearance
                // order; the a's are even and contribute nothing.
                let mut inversions = 0usize;
                for i in 0..b_order.len() {
                    for j in i + 1..b_order.len() {
                        if b_order[i] > b_order[j] {
                            inversions += 1;
                        }
                    }
                }
                if inversions % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
        };
        Some((Coeff::from_integer(sign), position_of_b[1..].to_vec()))
    }

    fn parities(&self, insertions: &[BasisVector]) -> Vec<u8> {
        insertions.iter().map(|&v| self.space.parity(v)).collect()
    }

    /// Koszul sign of regrouping the insertions as (s1 ascending, then
    /// s2 ascending) for a separating graph.
    pub fn reorder_sign(&self, insertions: &[BasisVector], graph: &SepGraph) -> Result<Coeff> {
        let perm: Vec<usize> = graph.s1.iter().chain(graph.s2.iter()).copied().collect();
        let sign = koszul_sign(&perm, &self.parities(insertions))?;
        Ok(Coeff::from_integer(sign))
    }

    fn split_insertions(
        &self,
        insertions: &[BasisVector],
        graph: &SepGraph,
    ) -> (Vec<BasisVector>, Vec<BasisVector>) {
        let pick = |legs: &[usize]| -> Vec<BasisVector> {
            legs.iter().map(|&k| insertions[k - 1]).collect()
        };
        (pick(&graph.s1), pick(&graph.s2))
    }

    /// Per-term contributions to the separating compatibility: for each
    /// bi-vector term, the node is appended last on factor 1 and first
    /// on factor 2, and the tensor is scaled by the term coefficient and
    /// the reordering sign.
    pub fn separating_rhs_terms(
        &self,
        insertions: &[BasisVector],
        graph: &SepGraph,
    ) -> Result<Vec<(BivectorTerm, ProductClass)>> {
        let (v1, v2) = self.split_insertions(insertions, graph);
        let eps = self.reorder_sign(insertions, graph)?;
        let mut out = Vec::new();
        for term in self.space.bivector() {
            let mut left = v1.clone();
            left.push(term.left);
            let mut right = vec![term.right];
            right.extend_from_slice(&v2);
            let f1 = self.evaluate(graph.g1, &left)?;
            let f2 = self.evaluate(graph.g2, &right)?;
            let mut contrib = ProductClass::zero((f1.space, f2.space));
            contrib.add_scaled(&ProductClass::tensor(&f1, &f2), term.coeff * eps);
            out.push((term, contrib));
        }
        Ok(out)
    }

    /// Right-hand side of the separating compatibility.
    pub fn separating_rhs(
        &self,
        insertions: &[BasisVector],
        graph: &SepGraph,
    ) -> Result<ProductClass> {
        let spaces = (
            SpaceLabel {
                g: graph.g1,
                n: graph.factor_size(1),
            },
            SpaceLabel {
                g: graph.g2,
                n: graph.factor_size(2),
            },
        );
        let mut rhs = ProductClass::zero(spaces);
        for (_, contrib) in self.separating_rhs_terms(insertions, graph)? {
            rhs.add_scaled(&contrib, Coeff::from_integer(1));
        }
        Ok(rhs)
    }

    /// Classifies the gamma contribution of one (graph, insertions,
    /// bi-vector term) configuration. The corrected factor must have the
    /// genus of the source of gamma, the other factor must be a genus-0
    /// piece that evaluates through its topological part.
    pub fn classify_correction_case(
        &self,
        graph: &SepGraph,
        insertions: &[BasisVector],
        term: &BivectorTerm,
    ) -> CorrectionCase {
        let h = self.gamma.h();
        let (v1, v2) = self.split_insertions(insertions, graph);
        if graph.g1 == h && graph.g2 == 0 {
            match (term.left, term.right) {
                (BasisVector::A, BasisVector::D)
                    if self.is_full_b_multiset(&v1, None) && all_a(&v2) =>
                {
                    return CorrectionCase::Case1;
                }
                (BasisVector::B(i), BasisVector::C(j))
                    if i == j
                        && self.is_full_b_multiset(&v1, Some(i))
                        && is_single_b_with_as(&v2, i) =>
                {
                    return CorrectionCase::Case2(i);
                }
                _ => {}
            }
        }
        if graph.g2 == h && graph.g1 == 0 {
            match (term.left, term.right) {
                (BasisVector::D, BasisVector::A)
                    if all_a(&v1) && self.is_full_b_multiset(&v2, None) =>
                {
                    return CorrectionCase::Case3;
                }
                (BasisVector::C(i), BasisVector::B(j))
                    if i == j
                        && is_single_b_with_as(&v1, i)
                        && self.is_full_b_multiset(&v2, Some(i)) =>
                {
                    return CorrectionCase::Case4(i);
                }
            _ => {}
            }
        }
        CorrectionCase::None
    }

    /// Multiset check: every b_j (except an optional skipped index) once,
    /// remaining entries a. With `skipped` set, b_skipped must be absent
    /// because the bi-vector supplies it.
    fn is_full_b_multiset(&self, tuple: &[BasisVector], skipped: Option<usize>) -> bool {
        let m = self.gamma.m();
        let mut seen = vec![false; m + 1];
        for &v in tuple {
            match v {
                BasisVector::A => {}
                BasisVector::B(i) => {
                    if Some(i) == skipped || seen[i] {
                        return false;
                    }
                    seen[i] = true;
                }
                _ => return false,
            }
        }
        (1..=m).all(|i| Some(i) == skipped || seen[i])
    }

    /// Graded symmetry of one evaluation under one reordering.
    pub fn check_axiom_i(
        &self,
        g: usize,
        insertions: &[BasisVector],
        perm: &[usize],
    ) -> Result<bool> {
        let permuted: Vec<BasisVector> = perm.iter().map(|&p| insertions[p - 1]).collect();
        let lhs = self.evaluate(g, &permuted)?;
        let sign = koszul_sign(perm, &self.parities(insertions))?;
        let rhs = transport_class(&self.evaluate(g, insertions)?, perm)
            .scaled(Coeff::from_integer(sign));
        Ok(lhs == rhs)
    }

    /// Nonseparating compatibility for one insertion tuple.
    pub fn check_axiom_ii_q(&self, g: usize, insertions: &[BasisVector]) -> Result<bool> {
        let n = insertions.len();
        require_stable(g, n)?;
        if g == 0 {
            return Err(Error::BadGraph {
                reason: "no nonseparating boundary map into genus 0".to_string(),
            });
        }
        let graph = IrrGraph { g, n };
        let lhs = pullback_gamma_q(&self.evaluate(g, insertions)?, &graph)?;
        let mut rhs = FormalClass::zero(SpaceLabel { g: g - 1, n: n + 2 });
        for term in self.space.bivector() {
            let mut extended = insertions.to_vec();
            extended.push(term.left);
            extended.push(term.right);
            rhs.add_scaled(&self.evaluate(g - 1, &extended)?, term.coeff);
        }
        Ok(lhs == rhs)
    }

    /// Separating compatibility for one insertion tuple and one graph.
    pub fn check_axiom_ii_r(
        &self,
        g: usize,
        insertions: &[BasisVector],
        graph: &SepGraph,
    ) -> Result<bool> {
        require_stable(g, insertions.len())?;
        if graph.g != g || graph.n != insertions.len() {
            return Err(Error::SpaceMismatch {
                class_g: g,
                class_n: insertions.len(),
                want_g: graph.g,
                want_n: graph.n,
            });
        }
        let lhs = pullback_gamma_r(&self.evaluate(g, insertions)?, graph)?;
        let rhs = self.separating_rhs(insertions, graph)?;
        Ok(lhs == rhs)
    }

    /// Forgetful compatibility: appending a unit insertion reproduces the
    /// same class one marking up.
    pub fn check_axiom_iii(&self, g: usize, insertions: &[BasisVector]) -> Result<bool> {
        let base = self.evaluate(g, insertions)?;
        let mut extended = insertions.to_vec();
        extended.push(BasisVector::A);
        let lifted = self.evaluate(g, &extended)?;
        Ok(lifted.same_terms(&base))
    }

    /// The three-pointed genus-0 unit identity against the pairing.
    pub fn check_unit_pairing(&self, x: BasisVector, y: BasisVector) -> Result<bool> {
        let value = self.evaluate(0, &[x, y, BasisVector::A])?;
        let expected = FormalClass::unit(SpaceLabel { g: 0, n: 3 }, self.space.eta(x, y)?);
        Ok(value == expected)
    }

    /// Whether the theory takes the value of its defining class: the
    /// canonical evaluation on (h, m) must span the gamma symbol.
    pub fn takes_value(&self) -> Result<bool> {
        let m = self.gamma.m();
        let canonical: Vec<BasisVector> = (1..=m).map(BasisVector::B).collect();
        let value = self.evaluate(self.gamma.h(), &canonical)?;
        let target = FormalClass::gamma(
            SpaceLabel {
                g: self.gamma.h(),
                n: m,
            },
            (1..=m).collect(),
            Coeff::from_integer(1),
        );
        Ok(check_takes_value(&[value], &target))
    }
}

fn all_a(tuple: &[BasisVector]) -> bool {
    tuple.iter().all(|&v| v == BasisVector::A)
}

fn is_single_b_with_as(tuple: &[BasisVector], index: usize) -> bool {
    let mut found = false;
    for &v in tuple {
        match v {
            BasisVector::A => {}
            BasisVector::B(i) if i == index && !found => found = true,
            _ => return false,
        }
    }
    found
}

/// Transport of a class under a reordering of the markings: keep lists
/// follow the markings to their new slots.
pub fn transport_class(cls: &FormalClass, perm: &[usize]) -> FormalClass {
    let mut inverse = vec![0usize; perm.len() + 1];
    for (slot, &p) in perm.iter().enumerate() {
        inverse[p] = slot + 1;
    }
    let mut out = FormalClass::zero(cls.space);
    for (symbol, coeff) in cls.terms() {
        let moved = match symbol {
            ClassSymbol::Unit => ClassSymbol::Unit,
            ClassSymbol::Gamma(keep) => {
                ClassSymbol::Gamma(keep.iter().map(|&k| inverse[k]).collect())
            }
        };
        out.add_term(moved, coeff);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable_graphs::{enumerate_one_edge_graphs, OneEdgeGraph};
    use crate::topft::evaluate_topft_oracle;
    use proptest::prelude::*;

    use BasisVector::{A, B, C, D};

    fn rat(n: i64) -> Coeff {
        Coeff::from_integer(n)
    }

    fn omega(h: usize, m: usize, deg: usize, mode: GradingMode) -> Omega {
        Omega::new(FormalGamma::new(h, m, deg, mode).unwrap())
    }

    fn space(g: usize, n: usize) -> SpaceLabel {
        SpaceLabel { g, n }
    }

    #[test]
    fn canonical_evaluation_takes_the_value() {
        let om = omega(1, 11, 11, GradingMode::Graded);
        let tuple: Vec<BasisVector> = (1..=11).map(B).collect();
        let value = om.evaluate(1, &tuple).unwrap();
        assert_eq!(
            value,
            FormalClass::gamma(space(1, 11), (1..=11).collect(), rat(1))
        );
        assert!(om.takes_value().unwrap());
    }

    #[test]
    fn odd_transposition_flips_the_sign() {
        let om = omega(1, 11, 11, GradingMode::Graded);
        let mut tuple: Vec<BasisVector> = (1..=11).map(B).collect();
        tuple.swap(0, 1);
        let value = om.evaluate(1, &tuple).unwrap();
        let mut keep: Vec<usize> = (1..=11).collect();
        keep.swap(0, 1);
        assert_eq!(value, FormalClass::gamma(space(1, 11), keep, rat(-1)));
    }

    #[test]
    fn interleaved_units_keep_the_sign() {
        let om = omega(1, 2, 2, GradingMode::Graded);
        let value = om.evaluate(1, &[B(1), A, B(2)]).unwrap();
        assert_eq!(value, FormalClass::gamma(space(1, 3), vec![1, 3], rat(1)));
    }

    #[test]
    fn no_correction_off_the_source_genus() {
        let om = omega(1, 2, 2, GradingMode::Graded);
        assert!(!om.evaluate(0, &[B(1), B(2), A]).unwrap().has_gamma());
        assert!(!om.evaluate(2, &[B(1), B(2)]).unwrap().has_gamma());
        assert!(!om.evaluate(3, &[B(1), B(2)]).unwrap().has_gamma());
    }

    #[test]
    fn no_correction_with_c_or_d_insertions() {
        let om = omega(1, 2, 2, GradingMode::Graded);
        assert!(om.evaluate(1, &[B(1), C(1)]).unwrap().is_zero());
        assert!(!om.evaluate(1, &[B(1), B(2), D]).unwrap().has_gamma());
        assert!(!om.evaluate(1, &[B(1), B(1)]).unwrap().has_gamma());
    }

    #[test]
    fn trivial_branch_has_no_evaluator() {
        let om = Omega::new(FormalGamma::new(0, 3, 0, GradingMode::Graded).unwrap());
        assert!(matches!(om.evaluate(0, &[A, A, A]), Err(Error::TrivialBranch)));
    }

    #[test]
    fn unit_part_matches_the_oracle() {
        let om = omega(1, 2, 2, GradingMode::Graded);
        for g in 0..=2 {
            for n in 0..=4 {
                if !crate::topft::is_stable(g, n) {
                    continue;
                }
                for tuple in all_tuples(om.space(), n) {
                    let value = om.evaluate(g, &tuple).unwrap();
                    let oracle = evaluate_topft_oracle(om.space(), g, &tuple).unwrap();
                    assert_eq!(value.unit_coeff(), oracle);
                }
            }
        }
    }

    #[test]
    fn separating_compatibility_hand_cases() {
        // Corrected factor second, single leg on the contracted side.
        let om = omega(1, 1, 1, GradingMode::Graded);
        let graph = SepGraph::new(0, vec![1, 2], 1, vec![], 2).unwrap();
        let lhs = pullback_gamma_r(&om.evaluate(1, &[B(1), A]).unwrap(), &graph).unwrap();
        let rhs = om.separating_rhs(&[B(1), A], &graph).unwrap();
        assert_eq!(lhs, rhs);
        let mut expected = ProductClass::zero((space(0, 3), space(1, 1)));
        expected.add_term((ClassSymbol::Unit, ClassSymbol::Gamma(vec![1])), rat(1));
        assert_eq!(lhs, expected);

        // Corrected factor first, with a genuinely negative sign.
        let om = omega(1, 2, 2, GradingMode::Graded);
        let graph = SepGraph::new(1, vec![3], 0, vec![1, 2], 3).unwrap();
        let tuple = [B(1), A, B(2)];
        let lhs = pullback_gamma_r(&om.evaluate(1, &tuple).unwrap(), &graph).unwrap();
        let rhs = om.separating_rhs(&tuple, &graph).unwrap();
        assert_eq!(lhs, rhs);
        let mut expected = ProductClass::zero((space(1, 2), space(0, 3)));
        expected.add_term((ClassSymbol::Gamma(vec![2, 1]), ClassSymbol::Unit), rat(1));
        assert_eq!(lhs, expected);
    }

    #[test]
    fn classification_hand_cases() {
        let om = omega(1, 2, 2, GradingMode::Graded);
        let one = rat(1);

        // Corrected factor first through (a, d).
        let graph = SepGraph::new(1, vec![1, 2], 0, vec![3, 4], 4).unwrap();
        let term = BivectorTerm {
            left: A,
            right: D,
            coeff: one,
        };
        assert_eq!(
            om.classify_correction_case(&graph, &[B(1), B(2), A, A], &term),
            CorrectionCase::Case1
        );

        // Skipped b_2 completed through (b_2, c_2).
        let term = BivectorTerm {
            left: B(2),
            right: C(2),
            coeff: -one,
        };
        assert_eq!(
            om.classify_correction_case(&graph, &[B(1), A, B(2), A], &term),
            CorrectionCase::Case2(2)
        );

        // Mirror images on the second factor.
        let graph = SepGraph::new(0, vec![1, 2], 1, vec![3, 4], 4).unwrap();
        let term = BivectorTerm {
            left: D,
            right: A,
            coeff: one,
        };
        assert_eq!(
            om.classify_correction_case(&graph, &[A, A, B(1), B(2)], &term),
            CorrectionCase::Case3
        );
        let term = BivectorTerm {
            left: C(1),
            right: B(1),
            coeff: one,
        };
        assert_eq!(
            om.classify_correction_case(&graph, &[B(1), A, B(2), A], &term),
            CorrectionCase::Case4(1)
        );

        // Both genera positive never carries a correction.
        let om2 = omega(2, 2, 2, GradingMode::Graded);
        let graph = SepGraph::new(1, vec![1, 2], 1, vec![3, 4], 4).unwrap();
        let term = BivectorTerm {
            left: A,
            right: D,
            coeff: one,
        };
        assert_eq!(
            om2.classify_correction_case(&graph, &[B(1), B(2), A, A], &term),
            CorrectionCase::None
        );
    }

    #[test]
    fn nonseparating_compatibility_small_sweep() {
        for (h, m, deg, mode) in [
            (1, 1, 1, GradingMode::Graded),
            (1, 2, 2, GradingMode::Graded),
            (2, 1, 2, GradingMode::Ungraded),
        ] {
            let om = omega(h, m, deg, mode);
            for g in 1..=h + 1 {
                for n in 0..=3 {
                    if !crate::topft::is_stable(g, n) {
                        continue;
                    }
                    for tuple in all_tuples(om.space(), n) {
                        assert!(
                            om.check_axiom_ii_q(g, &tuple).unwrap(),
                            "h={h} m={m} g={g} tuple={tuple:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn separating_compatibility_small_sweep() {
        for (h, m, deg, mode) in [
            (1, 1, 1, GradingMode::Graded),
            (1, 1, 2, GradingMode::Ungraded),
        ] {
            let om = omega(h, m, deg, mode);
            for g in 0..=h + 1 {
                for n in 0..=3 {
                    if !crate::topft::is_stable(g, n) {
                        continue;
                    }
                    let graphs = enumerate_one_edge_graphs(g, n).unwrap();
                    for tuple in all_tuples(om.space(), n) {
                        for graph in &graphs {
                            if let OneEdgeGraph::Sep(sep) = graph {
                                for oriented in [sep.clone(), sep.swapped()] {
                                    assert!(
                                        om.check_axiom_ii_r(g, &tuple, &oriented).unwrap(),
                                        "h={h} m={m} g={g} tuple={tuple:?} graph={oriented}"
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn forgetful_compatibility_and_unit_pairing() {
        let om = omega(1, 2, 2, GradingMode::Graded);
        for g in 0..=2 {
            for n in 0..=4 {
                if !crate::topft::is_stable(g, n) {
                    continue;
                }
                for tuple in all_tuples(om.space(), n) {
                    assert!(om.check_axiom_iii(g, &tuple).unwrap());
                }
            }
        }
        for &x in om.space().basis().to_vec().iter() {
            for &y in om.space().basis().to_vec().iter() {
                assert!(om.check_unit_pairing(x, y).unwrap());
            }
        }
    }

    #[test]
    fn symmetry_axiom_exhaustive_small() {
        let om = omega(1, 2, 2, GradingMode::Graded);
        for n in 1..=3 {
            for tuple in all_tuples(om.space(), n) {
                for perm in permutations(n) {
                    assert!(om.check_axiom_i(1, &tuple, &perm).unwrap());
                }
            }
        }
    }

    fn all_tuples(sp: &StateSpace, n: usize) -> Vec<Vec<BasisVector>> {
        let basis = sp.basis();
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|t| {
                    basis.iter().map(move |&v| {
                        let mut t2 = t.clone();
                        t2.push(v);
                        t2
                    })
                })
                .collect();
        }
        out
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for rest in permutations(n - 1) {
            for slot in 0..n {
                let mut perm = rest.clone();
                perm.insert(slot, n);
                out.push(perm);
            }
        }
        out
    }

    proptest! {
        /// The correction fires only for insertions in the isotropic
        /// span, and the class degree matches the insertion parity.
        #[test]
        fn correction_locality_and_evenness(
            raw in proptest::collection::vec(0usize..6, 1..6),
        ) {
            let om = omega(1, 2, 2, GradingMode::Graded);
            let basis = om.space().basis().to_vec();
            let tuple: Vec<BasisVector> = raw.iter().map(|&i| basis[i]).collect();
            if crate::topft::is_stable(1, tuple.len()) {
                let value = om.evaluate(1, &tuple).unwrap();
                if value.has_gamma() {
                    prop_assert!(tuple.iter().all(|v| matches!(v, A | B(_))));
                    let parity_sum: usize = tuple.iter().map(|v| v.z_grade()).sum();
                    prop_assert_eq!(parity_sum % 2, om.gamma().deg() % 2);
                }
            }
        }
    }
}
