//! First-order deformation calculus.
//!
//! A deformation assigns a formal class to each insertion tuple over a
//! declared bounded (g, n) range; everything outside the declared
//! entries but inside the bounds is zero, and anything outside the
//! bounds is undefined. The truncated axioms at order epsilon (with
//! epsilon^2 = 0) are: graded symmetry, the nonseparating contraction
//! identity, the separating identity with the two mixed base/deformation
//! sums and no deformation-squared term, and forgetful compatibility.
//! Axiom items that would read an entry outside the declared bounds are
//! reported as untested rather than passed.
//!
//! The isotropy test asks that every value with a c- or d-insertion
//! vanish; isotropic deformations that preserve the topological
//! structure have all-b values that restrict to zero on every boundary
//! divisor, which is exactly what `extract_minimal_candidates` verifies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cohft_gamma::Omega;
use crate::error::{Error, Result};
use crate::formal_classes::{
    pullback_gamma_q, pullback_gamma_r, ClassSymbol, FormalClass, FormalGamma, ProductClass,
    SpaceLabel,
};
use crate::stable_graphs::{enumerate_one_edge_graphs, IrrGraph, OneEdgeGraph, SepGraph};
use crate::state_space::{
    build_state_space, koszul_sign, BasisVector, Coeff, GradingMode, StateSpace,
};
use crate::topft::{evaluate_topft_closed, is_stable};
use crate::verification::{CheckSummary, Counterexample, SweepConfig, Totals};

/// A first-order deformation of the genus-m topological theory.
pub trait Deformation: Sync {
    fn m(&self) -> usize;
    fn mode(&self) -> GradingMode;
    /// Declared range: entries with g <= bounds.0 and n <= bounds.1.
    fn bounds(&self) -> (usize, usize);
    /// Value at one tuple; `None` outside the declared range.
    fn value(&self, g: usize, n: usize, insertions: &[BasisVector]) -> Option<FormalClass>;
    /// The entries whose insertions are all of b-kind, the candidates
    /// for minimality extraction. Implementations may cap the listing;
    /// the boolean reports whether it is complete.
    fn all_b_entries(&self, cap: usize) -> (Vec<(usize, usize, Vec<BasisVector>)>, bool);
    /// Exact isotropy verdict when the implementation can scan its whole
    /// support; `None` means unknown and the checker probes instead.
    fn isotropy_scan(&self) -> Option<bool> {
        None
    }
}

fn rational_from_str(text: &str) -> Result<Coeff> {
    text.trim().parse::<Coeff>().map_err(|_| Error::BadRational {
        text: text.to_string(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonGammaValue {
    coeff: String,
    keep: Vec<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct JsonValue {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    unit: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<JsonGammaValue>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonEntry {
    g: usize,
    n: usize,
    insertions: Vec<String>,
    value: JsonValue,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonTable {
    m: usize,
    mode: String,
    #[serde(default)]
    g_max: Option<usize>,
    #[serde(default)]
    n_max: Option<usize>,
    #[serde(default)]
    topft_preserving: Option<bool>,
    entries: Vec<JsonEntry>,
}

/// An explicit finite table of deformation values.
#[derive(Debug, Clone)]
pub struct ExplicitTable {
    m: usize,
    mode: GradingMode,
    g_max: usize,
    n_max: usize,
    entries: BTreeMap<(usize, usize, Vec<BasisVector>), FormalClass>,
}

impl ExplicitTable {
    pub fn new(m: usize, mode: GradingMode, g_max: usize, n_max: usize) -> ExplicitTable {
        ExplicitTable {
            m,
            mode,
            g_max,
            n_max,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(
        &mut self,
        g: usize,
        n: usize,
        insertions: Vec<BasisVector>,
        value: FormalClass,
    ) -> Result<()> {
        if g > self.g_max || n > self.n_max {
            return Err(Error::OutOfBounds {
                g,
                n,
                g_max: self.g_max,
                n_max: self.n_max,
            });
        }
        if !is_stable(g, n) {
            return Err(Error::Unstable { g, n });
        }
        if insertions.len() != n {
            return Err(Error::LengthMismatch {
                left: insertions.len(),
                right: n,
            });
        }
        let space = build_state_space(self.m, self.mode);
        space.check_indices(&insertions)?;
        if !value.is_zero() {
            self.entries.insert((g, n, insertions), value);
        }
        Ok(())
    }

    /// Flips the sign of one stored entry; used for mutation-detection
    /// checks.
    pub fn flip_sign(&mut self, g: usize, n: usize, insertions: &[BasisVector]) -> bool {
        if let Some(value) = self.entries.get_mut(&(g, n, insertions.to_vec())) {
            *value = value.scaled(Coeff::from_integer(-1));
            true
        } else {
            false
        }
    }

    /// Whether the deformation preserves the topological structure:
    /// every three-pointed genus-0 value vanishes.
    pub fn topft_preserving(&self) -> bool {
        !self
            .entries
            .keys()
            .any(|&(g, n, _)| g == 0 && n == 3)
    }

    pub fn entries(
        &self,
    ) -> impl Iterator<Item = (&(usize, usize, Vec<BasisVector>), &FormalClass)> + '_ {
        self.entries.iter()
    }

    pub fn from_json(text: &str) -> Result<ExplicitTable> {
        let parsed: JsonTable = serde_json::from_str(text).map_err(|e| Error::BadTable {
            reason: e.to_string(),
        })?;
        let mode = GradingMode::parse(&parsed.mode)?;
        let g_max = parsed
            .g_max
            .or_else(|| parsed.entries.iter().map(|e| e.g).max())
            .unwrap_or(0);
        let n_max = parsed
            .n_max
            .or_else(|| parsed.entries.iter().map(|e| e.n).max())
            .unwrap_or(3);
        let mut table = ExplicitTable::new(parsed.m, mode, g_max, n_max);
        for entry in parsed.entries {
            let tokens: Vec<&str> = entry.insertions.iter().map(|s| s.as_str()).collect();
            let space = build_state_space(parsed.m, mode);
            let insertions = space.parse_insertions(&tokens)?;
            let mut value = FormalClass::zero(SpaceLabel {
                g: entry.g,
                n: entry.n,
            });
            if let Some(unit) = entry.value.unit {
                value.add_term(ClassSymbol::Unit, rational_from_str(&unit)?);
            }
            if let Some(gamma) = entry.value.gamma {
                for &k in &gamma.keep {
                    if k == 0 || k > entry.n {
                        return Err(Error::InvalidMarking {
                            marking: k,
                            n: entry.n,
                        });
                    }
                }
                value.add_term(
                    ClassSymbol::Gamma(gamma.keep.clone()),
                    rational_from_str(&gamma.coeff)?,
                );
            }
            if let Some(declared) = parsed.topft_preserving {
                if declared && entry.g == 0 && entry.n == 3 && !value.is_zero() {
                    return Err(Error::BadTable {
                        reason: "declared TopFT-preserving but a (0,3) entry is nonzero"
                            .to_string(),
                    });
                }
            }
            table.insert(entry.g, entry.n, insertions, value)?;
        }
        Ok(table)
    }

    pub fn to_json(&self) -> String {
        let entries = self
            .entries
            .iter()
            .map(|((g, n, insertions), value)| {
                let mut unit = None;
                let mut gamma = None;
                for (symbol, coeff) in value.terms() {
                    match symbol {
                        ClassSymbol::Unit => unit = Some(coeff.to_string()),
                        ClassSymbol::Gamma(keep) => {
                            gamma = Some(JsonGammaValue {
                                coeff: coeff.to_string(),
                                keep: keep.clone(),
                            })
                        }
                    }
                }
                JsonEntry {
                    g: *g,
                    n: *n,
                    insertions: insertions.iter().map(|v| v.token()).collect(),
                    value: JsonValue { unit, gamma },
                }
            })
            .collect();
        let table = JsonTable {
            m: self.m,
            mode: self.mode.token().to_string(),
            g_max: Some(self.g_max),
            n_max: Some(self.n_max),
            topft_preserving: Some(self.topft_preserving()),
            entries,
        };
        serde_json::to_string_pretty(&table).expect("table serialization cannot fail")
    }
}

impl Deformation for ExplicitTable {
    fn m(&self) -> usize {
        self.m
    }

    fn mode(&self) -> GradingMode {
        self.mode
    }

    fn bounds(&self) -> (usize, usize) {
        (self.g_max, self.n_max)
    }

    fn value(&self, g: usize, n: usize, insertions: &[BasisVector]) -> Option<FormalClass> {
        if g > self.g_max || n > self.n_max || !is_stable(g, n) {
            return None;
        }
        Some(
            self.entries
                .get(&(g, n, insertions.to_vec()))
                .cloned()
                .unwrap_or_else(|| FormalClass::zero(SpaceLabel { g, n })),
        )
    }

    fn all_b_entries(&self, _cap: usize) -> (Vec<(usize, usize, Vec<BasisVector>)>, bool) {
        let out = self
            .entries
            .iter()
            .filter(|((_, _, insertions), value)| {
                !value.is_zero()
                    && insertions.iter().all(|v| matches!(v, BasisVector::B(_)))
            })
            .map(|((g, n, insertions), _)| (*g, *n, insertions.clone()))
            .collect();
        (out, true)
    }

    fn isotropy_scan(&self) -> Option<bool> {
        Some(!self.entries.iter().any(|((_, _, insertions), value)| {
            !value.is_zero()
                && insertions
                    .iter()
                    .any(|v| matches!(v, BasisVector::C(_) | BasisVector::D))
        }))
    }
}

/// The canonical deformation of the topological theory by a minimal
/// class: the gamma part of the corrected theory, computed on demand.
#[derive(Debug, Clone)]
pub struct CorrectionDeformation {
    omega: Omega,
    g_max: usize,
    n_max: usize,
}

impl CorrectionDeformation {
    pub fn new(gamma: FormalGamma, g_max: usize, n_max: usize) -> Result<CorrectionDeformation> {
        if gamma.is_trivial() {
            return Err(Error::TrivialBranch);
        }
        Ok(CorrectionDeformation {
            omega: Omega::new(gamma),
            g_max,
            n_max,
        })
    }

    pub fn omega(&self) -> &Omega {
        &self.omega
    }

    /// Materializes the full table; feasible only for small m.
    pub fn to_explicit(&self) -> Result<ExplicitTable> {
        let gamma = self.omega.gamma();
        let mut table = ExplicitTable::new(gamma.m(), gamma.mode(), self.g_max, self.n_max);
        let h = gamma.h();
        let m = gamma.m();
        if h > self.g_max {
            return Ok(table);
        }
        for n in m..=self.n_max {
            if !is_stable(h, n) {
                continue;
            }
            // All placements and orderings of the b-set among n slots.
            let slots: Vec<usize> = (0..n).collect();
            for placement in combinations(&slots, m) {
                for order in permutations_of(&placement) {
                    let mut tuple = vec![BasisVector::A; n];
                    for (j, &slot) in order.iter().enumerate() {
                        tuple[slot] = BasisVector::B(j + 1);
                    }
                    let value = self.omega.evaluate(h, &tuple)?.gamma_part();
                    table.insert(h, n, tuple, value)?;
                }
            }
        }
        Ok(table)
    }
}

fn combinations(xs: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if xs.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        for mut rest in combinations(&xs[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

fn permutations_of(xs: &[usize]) -> Vec<Vec<usize>> {
    if xs.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        let mut rest: Vec<usize> = xs.to_vec();
        rest.remove(i);
        for mut tail in permutations_of(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

impl Deformation for CorrectionDeformation {
    fn m(&self) -> usize {
        self.omega.gamma().m()
    }

    fn mode(&self) -> GradingMode {
        self.omega.gamma().mode()
    }

    fn bounds(&self) -> (usize, usize) {
        (self.g_max, self.n_max)
    }

    fn value(&self, g: usize, n: usize, insertions: &[BasisVector]) -> Option<FormalClass> {
        if g > self.g_max || n > self.n_max || !is_stable(g, n) {
            return None;
        }
        self.omega
            .evaluate(g, insertions)
            .ok()
            .map(|cls| cls.gamma_part())
    }

    fn all_b_entries(&self, cap: usize) -> (Vec<(usize, usize, Vec<BasisVector>)>, bool) {
        let gamma = self.omega.gamma();
        let h = gamma.h();
        let m = gamma.m();
        if h > self.g_max || m > self.n_max || !is_stable(h, m) {
            return (Vec::new(), true);
        }
        // The nonzero all-b entries are the orderings of the b-set at
        // (h, m); enumerate up to the cap.
        let mut out = Vec::new();
        let mut complete = true;
        let indices: Vec<usize> = (1..=m).collect();
        let mut stack = vec![(Vec::new(), indices)];
        while let Some((prefix, remaining)) = stack.pop() {
            if out.len() >= cap {
                complete = false;
                break;
            }
            if remaining.is_empty() {
                let tuple: Vec<BasisVector> =
                    prefix.iter().map(|&i| BasisVector::B(i)).collect();
                out.push((h, m, tuple));
                continue;
            }
            for (k, &i) in remaining.iter().enumerate() {
                let mut prefix = prefix.clone();
                prefix.push(i);
                let mut rest = remaining.clone();
                rest.remove(k);
                stack.push((prefix, rest));
            }
        }
        out.sort();
        (out, complete)
    }
}

/// A deformation with one value negated; detects whether the checker
/// actually reads that entry.
pub struct SignFlip<'a> {
    pub inner: &'a dyn Deformation,
    pub g: usize,
    pub n: usize,
    pub insertions: Vec<BasisVector>,
}

impl Deformation for SignFlip<'_> {
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn mode(&self) -> GradingMode {
        self.inner.mode()
    }

    fn bounds(&self) -> (usize, usize) {
        self.inner.bounds()
    }

    fn value(&self, g: usize, n: usize, insertions: &[BasisVector]) -> Option<FormalClass> {
        let value = self.inner.value(g, n, insertions)?;
        if (g, n) == (self.g, self.n) && insertions == self.insertions.as_slice() {
            Some(value.scaled(Coeff::from_integer(-1)))
        } else {
            Some(value)
        }
    }

    fn all_b_entries(&self, cap: usize) -> (Vec<(usize, usize, Vec<BasisVector>)>, bool) {
        self.inner.all_b_entries(cap)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeformationReport {
    pub m: usize,
    pub mode: String,
    pub bounds: (usize, usize),
    pub sweep: SweepConfig,
    pub isotropic: bool,
    pub topft_preserving: bool,
    pub checks: Vec<CheckSummary>,
    pub counterexamples: Vec<Counterexample>,
    pub totals: Totals,
}

impl DeformationReport {
    pub fn passed(&self) -> bool {
        self.totals.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "deformation: m={} mode={} bounds=(g<={}, n<={})\nisotropic: {}\ntopft_preserving: {}\n",
            self.m, self.mode, self.bounds.0, self.bounds.1, self.isotropic, self.topft_preserving
        );
        for row in &self.checks {
            out.push_str(&format!(
                "axiom {:7} (g={}, n={}): {} items, {} passed, {} failed, {} untested\n",
                row.axiom, row.g, row.n, row.items, row.passed, row.failed, row.untested
            ));
        }
        for cex in &self.counterexamples {
            out.push_str(&format!(
                "COUNTEREXAMPLE axiom {} (g={}, n={}) insertions [{}]{}: lhs = {} ; rhs = {}\n",
                cex.axiom,
                cex.g,
                cex.n,
                cex.insertions.join(","),
                cex.graph
                    .as_ref()
                    .map(|x| format!(" graph {x}"))
                    .unwrap_or_default(),
                cex.lhs,
                cex.rhs,
            ));
        }
        out.push_str(&format!(
            "totals: {} passed, {} failed, {} untested\n",
            self.totals.passed, self.totals.failed, self.totals.untested
        ));
        out
    }
}

struct LambdaChecker<'a> {
    lam: &'a dyn Deformation,
    space: StateSpace,
}

enum ItemOutcome {
    Pass,
    Fail(String, String),
    Untested,
}

impl<'a> LambdaChecker<'a> {
    fn new(lam: &'a dyn Deformation) -> LambdaChecker<'a> {
        LambdaChecker {
            lam,
            space: build_state_space(lam.m(), lam.mode()),
        }
    }

    fn value(&self, g: usize, insertions: &[BasisVector]) -> Option<FormalClass> {
        self.lam.value(g, insertions.len(), insertions)
    }

    fn base_value(&self, g: usize, insertions: &[BasisVector]) -> Result<Coeff> {
        evaluate_topft_closed(&self.space, g, insertions)
    }

    /// Graded symmetry of the deformation values.
    fn check_symmetry(&self, g: usize, tuple: &[BasisVector], perm: &[usize]) -> Result<ItemOutcome> {
        let permuted: Vec<BasisVector> = perm.iter().map(|&p| tuple[p - 1]).collect();
        let (Some(lhs), Some(base)) = (self.value(g, &permuted), self.value(g, tuple)) else {
            return Ok(ItemOutcome::Untested);
        };
        let parities: Vec<u8> = tuple.iter().map(|&v| self.space.parity(v)).collect();
        let sign = koszul_sign(perm, &parities)?;
        let rhs = crate::cohft_gamma::transport_class(&base, perm)
            .scaled(Coeff::from_integer(sign));
        if lhs == rhs {
            Ok(ItemOutcome::Pass)
        } else {
            Ok(ItemOutcome::Fail(lhs.to_string(), rhs.to_string()))
        }
    }

    /// Nonseparating identity: the pullback of the value equals the
    /// bi-vector contraction one genus down.
    fn check_iiq(&self, g: usize, tuple: &[BasisVector]) -> Result<ItemOutcome> {
        let n = tuple.len();
        let Some(value) = self.value(g, tuple) else {
            return Ok(ItemOutcome::Untested);
        };
        let graph = IrrGraph { g, n };
        let lhs = pullback_gamma_q(&value, &graph)?;
        let mut rhs = FormalClass::zero(SpaceLabel { g: g - 1, n: n + 2 });
        for term in self.space.bivector() {
            let mut extended = tuple.to_vec();
            extended.push(term.left);
            extended.push(term.right);
            let Some(contrib) = self.value(g - 1, &extended) else {
                return Ok(ItemOutcome::Untested);
            };
            rhs.add_scaled(&contrib, term.coeff);
        }
        if lhs == rhs {
            Ok(ItemOutcome::Pass)
        } else {
            Ok(ItemOutcome::Fail(lhs.to_string(), rhs.to_string()))
        }
    }

    /// Separating identity with the two mixed sums (no deformation
    /// tensor deformation term at first order).
    fn check_iir(&self, g: usize, tuple: &[BasisVector], graph: &SepGraph) -> Result<ItemOutcome> {
        let Some(value) = self.value(g, tuple) else {
            return Ok(ItemOutcome::Untested);
        };
        let lhs = pullback_gamma_r(&value, graph)?;
        let perm: Vec<usize> = graph.s1.iter().chain(graph.s2.iter()).copied().collect();
        let parities: Vec<u8> = tuple.iter().map(|&v| self.space.parity(v)).collect();
        let eps = Coeff::from_integer(koszul_sign(&perm, &parities)?);
        let v1: Vec<BasisVector> = graph.s1.iter().map(|&k| tuple[k - 1]).collect();
        let v2: Vec<BasisVector> = graph.s2.iter().map(|&k| tuple[k - 1]).collect();
        let mut rhs = ProductClass::zero(lhs.spaces);
        for term in self.space.bivector() {
            let mut left = v1.clone();
            left.push(term.left);
            let mut right = vec![term.right];
            right.extend_from_slice(&v2);
            let base_left = self.base_value(graph.g1, &left)?;
            let base_right = self.base_value(graph.g2, &right)?;
            let (Some(lam_left), Some(lam_right)) = (
                self.value(graph.g1, &left),
                self.value(graph.g2, &right),
            ) else {
                return Ok(ItemOutcome::Untested);
            };
            // base (x) deformation
            let base_cls = FormalClass::unit(
                SpaceLabel {
                    g: graph.g1,
                    n: left.len(),
                },
                base_left,
            );
            rhs.add_scaled(
                &ProductClass::tensor(&base_cls, &lam_right),
                term.coeff * eps,
            );
            // deformation (x) base
            let base_cls = FormalClass::unit(
                SpaceLabel {
                    g: graph.g2,
                    n: right.len(),
                },
                base_right,
            );
            rhs.add_scaled(
                &ProductClass::tensor(&lam_left, &base_cls),
                term.coeff * eps,
            );
        }
        if lhs == rhs {
            Ok(ItemOutcome::Pass)
        } else {
            Ok(ItemOutcome::Fail(lhs.to_string(), rhs.to_string()))
        }
    }

    /// Forgetful identity: appending a unit insertion reproduces the
    /// value.
    fn check_iii(&self, g: usize, tuple: &[BasisVector]) -> Result<ItemOutcome> {
        let mut extended = tuple.to_vec();
        extended.push(BasisVector::A);
        let (Some(base), Some(lifted)) = (self.value(g, tuple), self.value(g, &extended)) else {
            return Ok(ItemOutcome::Untested);
        };
        if lifted.same_terms(&base) {
            Ok(ItemOutcome::Pass)
        } else {
            Ok(ItemOutcome::Fail(lifted.to_string(), base.to_string()))
        }
    }
}

fn lambda_tuples(
    checker: &LambdaChecker,
    cfg: &SweepConfig,
    g: usize,
    n: usize,
) -> Vec<Vec<BasisVector>> {
    let basis = checker.space.basis().to_vec();
    let dim = basis.len();
    let total = {
        let mut out: Option<usize> = Some(1);
        for _ in 0..n {
            out = out.and_then(|t| t.checked_mul(dim));
        }
        out
    };
    let exhaustive = match total {
        Some(t) => (n <= cfg.n_exh && t <= cfg.tuple_cap) || t <= cfg.sample_count,
        None => false,
    };
    if exhaustive {
        let t = total.expect("count fits");
        let mut tuples = Vec::with_capacity(t);
        for mut index in 0..t {
            let mut tuple = Vec::with_capacity(n);
            for _ in 0..n {
                tuple.push(basis[index % dim]);
                index /= dim;
            }
            tuples.push(tuple);
        }
        return tuples;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(crate::verification::derive_seed(cfg.seed, g, n, 11));
    let mut seen: std::collections::HashSet<Vec<BasisVector>> = std::collections::HashSet::new();
    let mut tuples = Vec::new();
    let m = checker.lam.m();
    if n >= m {
        let canonical: Vec<BasisVector> = (1..=m)
            .map(BasisVector::B)
            .chain(std::iter::repeat(BasisVector::A).take(n - m))
            .collect();
        if seen.insert(canonical.clone()) {
            tuples.push(canonical.clone());
        }
        for _ in 0..cfg.orbit_samples {
            let mut shuffled = canonical.clone();
            shuffled.shuffle(&mut rng);
            if seen.insert(shuffled.clone()) {
                tuples.push(shuffled);
            }
        }
        if m >= 1 {
            let mut t = canonical.clone();
            t[m - 1] = BasisVector::C(m);
            if seen.insert(t.clone()) {
                tuples.push(t);
            }
        }
        if n > m {
            let mut t = canonical.clone();
            t[n - 1] = BasisVector::D;
            if seen.insert(t.clone()) {
                tuples.push(t);
            }
        }
    }
    let mut attempts = 0usize;
    let cap = cfg.sample_count.saturating_mul(8).max(64);
    while tuples.len() < cfg.sample_count && attempts < cap {
        attempts += 1;
        let tuple: Vec<BasisVector> = (0..n).map(|_| basis[rng.random_range(0..dim)]).collect();
        if seen.insert(tuple.clone()) {
            tuples.push(tuple);
        }
    }
    tuples
}

/// Runs the truncated axioms for a deformation over its declared range.
pub fn check_deformation_axioms(lam: &dyn Deformation, cfg: &SweepConfig) -> DeformationReport {
    let checker = LambdaChecker::new(lam);
    let (bg, bn) = lam.bounds();
    let cells: Vec<(usize, usize)> = {
        let mut cells = Vec::new();
        for g in 0..=bg.min(cfg.g_max) {
            for n in 0..=bn.min(cfg.n_max) {
                if is_stable(g, n) {
                    cells.push((g, n));
                }
            }
        }
        cells
    };

    struct Cell {
        rows: Vec<CheckSummary>,
        cex: Vec<Counterexample>,
    }

    let outcomes: Vec<Cell> = cells
        .par_iter()
        .map(|&(g, n)| {
            let tuples = lambda_tuples(&checker, cfg, g, n);
            let mut rows: Vec<CheckSummary> = Vec::new();
            let mut cex: Vec<Counterexample> = Vec::new();
            let mut tally = |axiom: &'static str,
                             outcomes: Vec<(ItemOutcome, Vec<String>, Option<String>)>| {
                let mut items = 0u64;
                let mut passed = 0u64;
                let mut failed = 0u64;
                let mut untested = 0u64;
                for (outcome, insertions, graph) in outcomes {
                    items += 1;
                    match outcome {
                        ItemOutcome::Pass => passed += 1,
                        ItemOutcome::Untested => untested += 1,
                        ItemOutcome::Fail(lhs, rhs) => {
                            failed += 1;
                            if cex.len() < cfg.counterexample_cap {
                                cex.push(Counterexample {
                                    axiom: axiom.to_string(),
                                    g,
                                    n,
                                    insertions,
                                    graph,
                                    lhs,
                                    rhs,
                                });
                            }
                        }
                    }
                }
                rows.push(CheckSummary {
                    axiom: axiom.to_string(),
                    g,
                    n,
                    items,
                    passed,
                    failed,
                    untested,
                });
            };

            // Symmetry.
            {
                let mut outcomes = Vec::new();
                let perms = lambda_perms(cfg, g, n);
                for tuple in &tuples {
                    for perm in &perms {
                        let outcome = checker
                            .check_symmetry(g, tuple, perm)
                            .unwrap_or_else(|e| ItemOutcome::Fail(format!("error: {e}"), String::new()));
                        outcomes.push((outcome, tokens_of(tuple), None));
                    }
                }
                tally("lambda-i", outcomes);
            }

            // Nonseparating side.
            if g >= 1 {
                let mut outcomes = Vec::new();
                for tuple in &tuples {
                    let outcome = checker
                        .check_iiq(g, tuple)
                        .unwrap_or_else(|e| ItemOutcome::Fail(format!("error: {e}"), String::new()));
                    outcomes.push((outcome, tokens_of(tuple), None));
                }
                tally("iiq", outcomes);
            }

            // Separating side.
            {
                let oriented: Vec<SepGraph> = enumerate_one_edge_graphs(g, n)
                    .map(|graphs| {
                        graphs
                            .into_iter()
                            .filter_map(|x| match x {
                                OneEdgeGraph::Sep(s) => Some(s),
                                OneEdgeGraph::Irr(_) => None,
                            })
                            .flat_map(|s| {
                                let swapped = s.swapped();
                                if swapped == s {
                                    vec![s]
                                } else {
                                    vec![s, swapped]
                                }
                            })
                            .collect()
                    })
                    .unwrap_or_default();
                if !oriented.is_empty() {
                    let mut outcomes = Vec::new();
                    let budget_per_tuple = (cfg.pair_budget / tuples.len().max(1)).max(1);
                    let mut rng = ChaCha8Rng::seed_from_u64(crate::verification::derive_seed(
                        cfg.seed, g, n, 13,
                    ));
                    for tuple in &tuples {
                        let selected: Vec<&SepGraph> = if oriented.len() <= budget_per_tuple {
                            oriented.iter().collect()
                        } else {
                            let picked = rand::seq::index::sample(
                                &mut rng,
                                oriented.len(),
                                budget_per_tuple,
                            );
                            let mut idx = picked.into_vec();
                            idx.sort_unstable();
                            idx.into_iter().map(|i| &oriented[i]).collect()
                        };
                        for graph in selected {
                            let outcome = checker.check_iir(g, tuple, graph).unwrap_or_else(|e| {
                                ItemOutcome::Fail(format!("error: {e}"), String::new())
                            });
                            outcomes.push((outcome, tokens_of(tuple), Some(graph.to_string())));
                        }
                    }
                    tally("iir", outcomes);
                }
            }

            // Forgetful side.
            {
                let mut outcomes = Vec::new();
                for tuple in &tuples {
                    let outcome = checker
                        .check_iii(g, tuple)
                        .unwrap_or_else(|e| ItemOutcome::Fail(format!("error: {e}"), String::new()));
                    outcomes.push((outcome, tokens_of(tuple), None));
                }
                tally("iii", outcomes);
            }

            Cell { rows, cex }
        })
        .collect();

    let mut checks = Vec::new();
    let mut counterexamples = Vec::new();
    let mut totals = Totals::default();
    for cell in outcomes {
        for row in &cell.rows {
            totals.passed += row.passed;
            totals.failed += row.failed;
            totals.untested += row.untested;
        }
        checks.extend(cell.rows);
        counterexamples.extend(cell.cex);
    }
    counterexamples.truncate(cfg.counterexample_cap);

    DeformationReport {
        m: lam.m(),
        mode: lam.mode().token().to_string(),
        bounds: lam.bounds(),
        sweep: cfg.clone(),
        isotropic: check_isotropic(lam, cfg),
        topft_preserving: check_topft_preserving(lam),
        checks,
        counterexamples,
        totals,
    }
}

fn lambda_perms(cfg: &SweepConfig, g: usize, n: usize) -> Vec<Vec<usize>> {
    let identity: Vec<usize> = (1..=n).collect();
    if n <= 1 {
        return vec![identity];
    }
    let mut small = 1usize;
    let mut fits = true;
    for k in 2..=n {
        small = match small.checked_mul(k) {
            Some(v) if v <= cfg.perm_cap => v,
            _ => {
                fits = false;
                break;
            }
        };
    }
    if fits {
        let mut all = Vec::new();
        heap_perms(&mut identity.clone(), &mut all);
        all.sort();
        return all;
    }
    let mut perms = vec![identity.clone()];
    for k in 0..n - 1 {
        let mut p = identity.clone();
        p.swap(k, k + 1);
        perms.push(p);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(crate::verification::derive_seed(cfg.seed, g, n, 12));
    for _ in 0..cfg.perm_samples {
        let mut p = identity.clone();
        p.shuffle(&mut rng);
        perms.push(p);
    }
    perms
}

fn heap_perms(xs: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    fn go(k: usize, xs: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(xs.clone());
            return;
        }
        for i in 0..k {
            go(k - 1, xs, out);
            if k % 2 == 0 {
                xs.swap(i, k - 1);
            } else {
                xs.swap(0, k - 1);
            }
        }
    }
    let n = xs.len();
    go(n, xs, out);
}

fn tokens_of(tuple: &[BasisVector]) -> Vec<String> {
    tuple.iter().map(|v| v.token()).collect()
}

/// True when every value with a c- or d-insertion vanishes. Explicit
/// tables are scanned exactly; lazy deformations are probed on targeted
/// and sampled tuples.
pub fn check_isotropic(lam: &dyn Deformation, cfg: &SweepConfig) -> bool {
    if let Some(answer) = lam.isotropy_scan() {
        return answer;
    }
    let space = build_state_space(lam.m(), lam.mode());
    let (bg, bn) = lam.bounds();
    let m = lam.m();
    let mut rng = ChaCha8Rng::seed_from_u64(crate::verification::derive_seed(cfg.seed, bg, bn, 17));
    let basis = space.basis().to_vec();
    let dim = basis.len();
    for g in 0..=bg {
        for n in 1..=bn {
            if !is_stable(g, n) {
                continue;
            }
            // Targeted: the correction multiset with one b replaced by
            // the matching c, and with a trailing d.
            let mut probes: Vec<Vec<BasisVector>> = Vec::new();
            if n >= m && m >= 1 {
                for i in 1..=m {
                    let mut t: Vec<BasisVector> = (1..=m)
                        .map(BasisVector::B)
                        .chain(std::iter::repeat(BasisVector::A).take(n - m))
                        .collect();
                    t[i - 1] = BasisVector::C(i);
                    probes.push(t);
                }
            }
            if n >= 1 {
                let mut t = vec![BasisVector::A; n];
                t[n - 1] = BasisVector::D;
                probes.push(t);
            }
            for _ in 0..64 {
                let mut t: Vec<BasisVector> =
                    (0..n).map(|_| basis[rng.random_range(0..dim)]).collect();
                // Force a c or d insertion into a random slot.
                let slot = rng.random_range(0..n);
                t[slot] = if rng.random_range(0..2) == 0 || m == 0 {
                    BasisVector::D
                } else {
                    BasisVector::C(rng.random_range(1..=m))
                };
                probes.push(t);
            }
            for probe in probes {
                let has_cd = probe
                    .iter()
                    .any(|v| matches!(v, BasisVector::C(_) | BasisVector::D));
                if !has_cd {
                    continue;
                }
                if let Some(value) = lam.value(g, n, &probe) {
                    if !value.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// True when every three-pointed genus-0 value vanishes.
pub fn check_topft_preserving(lam: &dyn Deformation) -> bool {
    let space = build_state_space(lam.m(), lam.mode());
    let basis = space.basis().to_vec();
    let (bg, bn) = lam.bounds();
    if bn < 3 {
        return true;
    }
    let _ = bg;
    for &x in &basis {
        for &y in &basis {
            for &z in &basis {
                if let Some(value) = lam.value(0, 3, &[x, y, z]) {
                    if !value.is_zero() {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// One all-b entry with the verdict of its boundary-restriction checks.
#[derive(Debug, Clone, Serialize)]
pub struct MinimalCandidate {
    pub g: usize,
    pub n: usize,
    pub insertions: Vec<String>,
    pub value: String,
    pub graphs_checked: u64,
    pub pullbacks_vanish: bool,
}

/// Entries with all insertions of b-kind, each verified to restrict to
/// zero on every one-edge boundary divisor: the formal pullback of the
/// value must vanish, and so must the axiom right-hand sides (which the
/// isotropy of the deformation forces term by term).
pub fn extract_minimal_candidates(
    lam: &dyn Deformation,
    cap: usize,
) -> Result<Vec<MinimalCandidate>> {
    let checker = LambdaChecker::new(lam);
    let (entries, _complete) = lam.all_b_entries(cap);
    let mut out = Vec::new();
    for (g, n, insertions) in entries {
        let Some(value) = lam.value(g, n, &insertions) else {
            continue;
        };
        let mut graphs_checked = 0u64;
        let mut vanish = true;
        for graph in enumerate_one_edge_graphs(g, n)? {
            match graph {
                OneEdgeGraph::Irr(irr) => {
                    graphs_checked += 1;
                    // Direct route: formal pullback of the value.
                    if !pullback_gamma_q(&value, &irr)?.is_zero() {
                        vanish = false;
                    }
                    // Axiom route when the contraction stays in range.
                    if let ItemOutcome::Fail(_, _) = checker.check_iiq(g, &insertions)? {
                        vanish = false;
                    }
                }
                OneEdgeGraph::Sep(sep) => {
                    let swapped = sep.swapped();
                    let orientations = if swapped == sep {
                        vec![sep]
                    } else {
                        vec![swapped, sep]
                    };
                    for oriented in orientations {
                        graphs_checked += 1;
                        if !pullback_gamma_r(&value, &oriented)?.is_zero() {
                            vanish = false;
                        }
                        match checker.check_iir(g, &insertions, &oriented)? {
                            ItemOutcome::Fail(_, _) => vanish = false,
                            ItemOutcome::Pass | ItemOutcome::Untested => {}
                        }
                    }
                }
            }
        }
        out.push(MinimalCandidate {
            g,
            n,
            insertions: tokens_of(&insertions),
            value: value.to_string(),
            graphs_checked,
            pullbacks_vanish: vanish,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_classes::FormalGamma;

    fn small_cfg() -> SweepConfig {
        SweepConfig {
            g_max: 3,
            n_max: 4,
            tuple_cap: 2_000,
            sample_count: 300,
            orbit_samples: 16,
            pair_budget: 3_000,
            perm_cap: 24,
            perm_samples: 4,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn zero_table_passes() {
        let table = ExplicitTable::new(2, GradingMode::Graded, 2, 4);
        let report = check_deformation_axioms(&table, &small_cfg());
        assert!(report.passed(), "{}", report.to_text());
        assert!(report.isotropic);
        assert!(report.topft_preserving);
    }

    #[test]
    fn correction_deformation_round_trip() {
        let gamma = FormalGamma::new(1, 2, 2, GradingMode::Graded).unwrap();
        let lam = CorrectionDeformation::new(gamma, 2, 4).unwrap();
        let report = check_deformation_axioms(&lam, &small_cfg());
        assert!(report.passed(), "{}", report.to_text());
        assert!(report.isotropic);
        assert!(report.topft_preserving);

        let candidates = extract_minimal_candidates(&lam, 64).unwrap();
        assert!(!candidates.is_empty());
        assert!(candidates.iter().all(|c| c.pullbacks_vanish));
    }

    #[test]
    fn explicit_correction_table_matches_lazy() {
        let gamma = FormalGamma::new(1, 2, 2, GradingMode::Graded).unwrap();
        let lam = CorrectionDeformation::new(gamma, 2, 4).unwrap();
        let table = lam.to_explicit().unwrap();
        let report = check_deformation_axioms(&table, &small_cfg());
        assert!(report.passed(), "{}", report.to_text());

        // Lazy and explicit agree on every declared entry.
        for ((g, n, insertions), value) in table.entries() {
            assert_eq!(lam.value(*g, *n, insertions).unwrap(), value.clone());
        }
    }

    #[test]
    fn missing_forgetful_image_fails() {
        // A single gamma entry whose one-higher forgetful image is
        // declared (in bounds) but zero.
        let mut table = ExplicitTable::new(2, GradingMode::Graded, 1, 3);
        table
            .insert(
                1,
                2,
                vec![BasisVector::B(1), BasisVector::B(2)],
                FormalClass::gamma(SpaceLabel { g: 1, n: 2 }, vec![1, 2], Coeff::from_integer(1)),
            )
            .unwrap();
        let report = check_deformation_axioms(&table, &small_cfg());
        assert!(!report.passed());
        assert!(report.counterexamples.iter().any(|c| c.axiom == "iii"));
    }

    #[test]
    fn sign_flip_is_detected() {
        let gamma = FormalGamma::new(1, 2, 2, GradingMode::Graded).unwrap();
        let lam = CorrectionDeformation::new(gamma, 2, 4).unwrap();
        let flip = SignFlip {
            inner: &lam,
            g: 1,
            n: 2,
            insertions: vec![BasisVector::B(1), BasisVector::B(2)],
        };
        let report = check_deformation_axioms(&flip, &small_cfg());
        assert!(!report.passed());
    }

    #[test]
    fn isotropy_detects_a_d_entry() {
        let mut table = ExplicitTable::new(1, GradingMode::Graded, 1, 3);
        table
            .insert(
                1,
                1,
                vec![BasisVector::D],
                FormalClass::unit(SpaceLabel { g: 1, n: 1 }, Coeff::from_integer(1)),
            )
            .unwrap();
        assert!(!check_isotropic(&table, &small_cfg()));
        let empty = ExplicitTable::new(1, GradingMode::Graded, 1, 3);
        assert!(check_isotropic(&empty, &small_cfg()));
    }

    #[test]
    fn no_all_b_entries_gives_empty_extraction() {
        let table = ExplicitTable::new(2, GradingMode::Graded, 2, 4);
        let candidates = extract_minimal_candidates(&table, 64).unwrap();
        assert!(candidates.is_empty());
    }

    /// First-order truncation: with dual values (base, eps) where
    /// base = the topological theory and eps = the deformation, the
    /// separating compatibility for the dual theory modulo eps^2 holds
    /// exactly when the base identity and the truncated identity both
    /// hold. Exercised on the canonical correction (all true) and on a
    /// sign flip (eps side fails, base side survives).
    #[test]
    fn epsilon_truncation_matches_component_checks() {
        use crate::stable_graphs::OneEdgeGraph;

        let gamma = FormalGamma::new(1, 1, 1, GradingMode::Graded).unwrap();
        let lam = CorrectionDeformation::new(gamma, 2, 3).unwrap();
        let flip = SignFlip {
            inner: &lam,
            g: 1,
            n: 1,
            insertions: vec![BasisVector::B(1)],
        };

        let space = build_state_space(1, GradingMode::Graded);
        let basis = space.basis().to_vec();
        for deformation in [&lam as &dyn Deformation, &flip as &dyn Deformation] {
            let checker = LambdaChecker::new(deformation);
            for g in 0..=2usize {
                for n in 0..=3usize {
                    if !is_stable(g, n) {
                        continue;
                    }
                    let mut tuples = vec![vec![]];
                    for _ in 0..n {
                        tuples = tuples
                            .into_iter()
                            .flat_map(|t: Vec<BasisVector>| {
                                basis.iter().map(move |&v| {
                                    let mut t2 = t.clone();
                                    t2.push(v);
                                    t2
                                })
                            })
                            .collect();
                    }
                    let graphs = enumerate_one_edge_graphs(g, n).unwrap();
                    for tuple in &tuples {
                        for graph in &graphs {
                            let OneEdgeGraph::Sep(sep) = graph else {
                                continue;
                            };
                            // Dual route: evaluate base and eps parts of
                            // both sides and truncate eps^2.
                            let dual = check_dual_separating(&checker, g, tuple, sep);
                            let Some((base_ok, dual_ok)) = dual else {
                                continue;
                            };
                            let eps_ok = matches!(
                                checker.check_iir(g, tuple, sep).unwrap(),
                                ItemOutcome::Pass
                            );
                            assert_eq!(
                                dual_ok,
                                base_ok && eps_ok,
                                "truncation mismatch at g={g} tuple={tuple:?} graph={sep}"
                            );
                        }
                    }
                }
            }
        }
    }

    /// Base and dual separating identities; `None` when the deformation
    /// is undefined somewhere (out of declared range).
    fn check_dual_separating(
        checker: &LambdaChecker,
        g: usize,
        tuple: &[BasisVector],
        graph: &SepGraph,
    ) -> Option<(bool, bool)> {
        let space = &checker.space;
        let base_value = evaluate_topft_closed(space, g, tuple).unwrap();
        let eps_value = checker.value(g, tuple)?;
        let lhs_base = pullback_gamma_r(
            &FormalClass::unit(SpaceLabel { g, n: tuple.len() }, base_value),
            graph,
        )
        .unwrap();
        let lhs_eps = pullback_gamma_r(&eps_value, graph).unwrap();

        let perm: Vec<usize> = graph.s1.iter().chain(graph.s2.iter()).copied().collect();
        let parities: Vec<u8> = tuple.iter().map(|&v| space.parity(v)).collect();
        let eps_sign = Coeff::from_integer(koszul_sign(&perm, &parities).unwrap());
        let v1: Vec<BasisVector> = graph.s1.iter().map(|&k| tuple[k - 1]).collect();
        let v2: Vec<BasisVector> = graph.s2.iter().map(|&k| tuple[k - 1]).collect();
        let mut rhs_base = ProductClass::zero(lhs_base.spaces);
        let mut rhs_eps = ProductClass::zero(lhs_eps.spaces);
        for term in space.bivector() {
            let mut left = v1.clone();
            left.push(term.left);
            let mut right = vec![term.right];
            right.extend_from_slice(&v2);
            let b1 = FormalClass::unit(
                SpaceLabel {
                    g: graph.g1,
                    n: left.len(),
                },
                evaluate_topft_closed(space, graph.g1, &left).unwrap(),
            );
            let b2 = FormalClass::unit(
                SpaceLabel {
                    g: graph.g2,
                    n: right.len(),
                },
                evaluate_topft_closed(space, graph.g2, &right).unwrap(),
            );
            let e1 = checker.value(graph.g1, &left)?;
            let e2 = checker.value(graph.g2, &right)?;
            let scale = term.coeff * eps_sign;
            // (b1 + eps·e1) ⊗ (b2 + eps·e2) with eps^2 = 0.
            rhs_base.add_scaled(&ProductClass::tensor(&b1, &b2), scale);
            rhs_eps.add_scaled(&ProductClass::tensor(&b1, &e2), scale);
            rhs_eps.add_scaled(&ProductClass::tensor(&e1, &b2), scale);
        }
        let base_ok = lhs_base == rhs_base;
        let dual_ok = base_ok && lhs_eps == rhs_eps;
        Some((base_ok, dual_ok))
    }

    /// A last-slot-only isotropy hole cannot hide: if a value with a
    /// c-insertion in a non-last slot is nonzero, the any-slot scan
    /// rejects it, and the missing permuted entries break the symmetry
    /// axiom as well.
    #[test]
    fn isotropy_is_checked_on_every_slot() {
        let mut table = ExplicitTable::new(1, GradingMode::Graded, 1, 3);
        table
            .insert(
                1,
                2,
                vec![BasisVector::C(1), BasisVector::B(1)],
                FormalClass::unit(SpaceLabel { g: 1, n: 2 }, Coeff::from_integer(1)),
            )
            .unwrap();
        assert!(!check_isotropic(&table, &small_cfg()));
        let report = check_deformation_axioms(&table, &small_cfg());
        assert!(report.counterexamples.iter().any(|c| c.axiom == "lambda-i"));
    }

    #[test]
    fn json_round_trip() {
        let gamma = FormalGamma::new(1, 2, 2, GradingMode::Graded).unwrap();
        let lam = CorrectionDeformation::new(gamma, 1, 3).unwrap();
        let table = lam.to_explicit().unwrap();
        let json = table.to_json();
        let parsed = ExplicitTable::from_json(&json).unwrap();
        for ((g, n, insertions), value) in table.entries() {
            assert_eq!(parsed.value(*g, *n, insertions).unwrap(), value.clone());
        }
    }

    #[test]
    fn json_format_parses_tokens() {
        let text = r#"{
            "m": 2,
            "mode": "graded",
            "entries": [
                {"g": 1, "n": 2, "insertions": ["b2", "b1"],
                 "value": {"gamma": {"coeff": "-1", "keep": [2, 1]}}}
            ]
        }"#;
        let table = ExplicitTable::from_json(text).unwrap();
        let value = table
            .value(1, 2, &[BasisVector::B(2), BasisVector::B(1)])
            .unwrap();
        assert_eq!(
            value,
            FormalClass::gamma(SpaceLabel { g: 1, n: 2 }, vec![2, 1], Coeff::from_integer(-1))
        );
    }
}
