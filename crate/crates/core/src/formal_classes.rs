//! Formal cohomology classes appearing in the corrected field theory.
//!
//! A class is an exact-rational combination of two kinds of symbols on a
//! moduli space of genus-g curves with n markings: the degree-0 unit
//! class, and gamma(keep) — the pullback of a fixed minimal class under
//! the forgetful map that keeps the listed markings, with keep[j]
//! relabelled to marking j of the target. The minimal class itself is
//! purely formal: only its source space (h,m), its degree, and the
//! grading mode matter, because the vanishing of all boundary
//! restrictions is what drives every rewrite rule.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::stable_graphs::{
    q_image_is_boundary, stabilize_after_forgetting, ContractionResult, IrrGraph, SepGraph,
};
use crate::state_space::{Coeff, GradingMode};

/// A formal minimal class: source space (h,m), positive cohomological
/// degree, and grading mode. The degenerate source (0,3) carries only the
/// degree-0 class and routes to the constant theory instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalGamma {
    h: usize,
    m: usize,
    deg: usize,
    mode: GradingMode,
    trivial: bool,
}

impl FormalGamma {
    /// Validates stability of (h,m), the positive-degree requirement and
    /// the parity condition: graded mode needs deg ≡ m (mod 2), ungraded
    /// mode needs deg even.
    pub fn new(h: usize, m: usize, deg: usize, mode: GradingMode) -> Result<FormalGamma> {
        if 2 * h + m <= 2 {
            return Err(Error::UnstableGamma { h, m });
        }
        if (h, m) == (0, 3) {
            if deg != 0 {
                return Err(Error::TrivialBranchDegree { deg });
            }
            return Ok(FormalGamma {
                h,
                m,
                deg,
                mode,
                trivial: true,
            });
        }
        if deg == 0 {
            return Err(Error::DegreeNotPositive { h, m });
        }
        match mode {
            GradingMode::Graded => {
                if deg % 2 != m % 2 {
                    return Err(Error::Parity { deg, m });
                }
            }
            GradingMode::Ungraded => {
                if deg % 2 != 0 {
                    return Err(Error::ParityUngraded { deg });
                }
            }
        }
        Ok(FormalGamma {
            h,
            m,
            deg,
            mode,
            trivial: false,
        })
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn mode(&self) -> GradingMode {
        self.mode
    }

    /// True for the (0,3) branch handled by the constant theory.
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }
}

/// Moduli space label (g, n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpaceLabel {
    pub g: usize,
    pub n: usize,
}

impl fmt::Display for SpaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.g, self.n)
    }
}

/// Symbol of a single term: the unit class or a gamma pullback.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClassSymbol {
    Unit,
    Gamma(Vec<usize>),
}

impl ClassSymbol {
    pub fn is_gamma(&self) -> bool {
        matches!(self, ClassSymbol::Gamma(_))
    }
}

impl fmt::Display for ClassSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassSymbol::Unit => write!(f, "1"),
            ClassSymbol::Gamma(keep) => {
                let canonical = keep.iter().copied().eq(1..=keep.len());
                if canonical {
                    write!(f, "γ")
                } else {
                    let list: Vec<String> = keep.iter().map(|k| k.to_string()).collect();
                    write!(f, "γ[{}]", list.join(","))
                }
            }
        }
    }
}

/// A class on one moduli space in canonical form: sorted symbols, no
/// zero coefficients. Equality is exact and term-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalClass {
    pub space: SpaceLabel,
    terms: BTreeMap<ClassSymbol, Coeff>,
}

impl FormalClass {
    pub fn zero(space: SpaceLabel) -> FormalClass {
        FormalClass {
            space,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(space: SpaceLabel, coeff: Coeff) -> FormalClass {
        let mut cls = FormalClass::zero(space);
        cls.add_term(ClassSymbol::Unit, coeff);
        cls
    }

    pub fn gamma(space: SpaceLabel, keep: Vec<usize>, coeff: Coeff) -> FormalClass {
        let mut cls = FormalClass::zero(space);
        cls.add_term(ClassSymbol::Gamma(keep), coeff);
        cls
    }

    pub fn add_term(&mut self, symbol: ClassSymbol, coeff: Coeff) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(symbol.clone()).or_insert_with(Coeff::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&symbol);
        }
    }

    pub fn add_scaled(&mut self, other: &FormalClass, scale: Coeff) {
        for (symbol, &coeff) in &other.terms {
            self.add_term(symbol.clone(), coeff * scale);
        }
    }

    pub fn scaled(&self, scale: Coeff) -> FormalClass {
        let mut out = FormalClass::zero(self.space);
        out.add_scaled(self, scale);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ClassSymbol, Coeff)> + '_ {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn unit_coeff(&self) -> Coeff {
        self.terms
            .get(&ClassSymbol::Unit)
            .copied()
            .unwrap_or_else(Coeff::zero)
    }

    pub fn coeff_of(&self, symbol: &ClassSymbol) -> Coeff {
        self.terms.get(symbol).copied().unwrap_or_else(Coeff::zero)
    }

    pub fn has_gamma(&self) -> bool {
        self.terms.keys().any(ClassSymbol::is_gamma)
    }

    /// The gamma terms alone, dropping the unit part.
    pub fn gamma_part(&self) -> FormalClass {
        let mut out = FormalClass::zero(self.space);
        for (symbol, &coeff) in &self.terms {
            if symbol.is_gamma() {
                out.add_term(symbol.clone(), coeff);
            }
        }
        out
    }

    /// Term-wise equality ignoring the ambient space label; used for the
    /// forgetful-map axiom where the two sides live one marking apart.
    pub fn same_terms(&self, other: &FormalClass) -> bool {
        self.terms == other.terms
    }
}

impl fmt::Display for FormalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (symbol, coeff) in &self.terms {
            let body = match symbol {
                ClassSymbol::Unit => format!("{coeff}"),
                ClassSymbol::Gamma(_) => format!("{coeff}·{symbol}"),
            };
            if first {
                write!(f, "{body}")?;
                first = false;
            } else if *coeff < Coeff::zero() {
                let pos = match symbol {
                    ClassSymbol::Unit => format!("{}", -coeff),
                    ClassSymbol::Gamma(_) => format!("{}·{symbol}", -coeff),
                };
                write!(f, " - {pos}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

/// A class on a product of two moduli spaces, stored as symbol pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductClass {
    pub spaces: (SpaceLabel, SpaceLabel),
    terms: BTreeMap<(ClassSymbol, ClassSymbol), Coeff>,
}

impl ProductClass {
    pub fn zero(spaces: (SpaceLabel, SpaceLabel)) -> ProductClass {
        ProductClass {
            spaces,
            terms: BTreeMap::new(),
        }
    }

    pub fn add_term(&mut self, symbol: (ClassSymbol, ClassSymbol), coeff: Coeff) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(symbol.clone()).or_insert_with(Coeff::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&symbol);
        }
    }

    pub fn add_scaled(&mut self, other: &ProductClass, scale: Coeff) {
        for (symbol, &coeff) in &other.terms {
            self.add_term(symbol.clone(), coeff * scale);
        }
    }

    /// Tensor of two single-factor classes. The node slots sit adjacent
    /// across the tensor, so no crossing sign arises here; all grading
    /// signs live in the evaluations and in the reordering of insertions.
    pub fn tensor(left: &FormalClass, right: &FormalClass) -> ProductClass {
        let mut out = ProductClass::zero((left.space, right.space));
        for (ls, lc) in left.terms() {
            for (rs, rc) in right.terms() {
                out.add_term((ls.clone(), rs.clone()), lc * rc);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(ClassSymbol, ClassSymbol), Coeff)> + '_ {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn has_gamma(&self) -> bool {
        self.terms
            .keys()
            .any(|(l, r)| l.is_gamma() || r.is_gamma())
    }

    /// The terms carrying a gamma symbol on either factor.
    pub fn gamma_part(&self) -> ProductClass {
        let mut out = ProductClass::zero(self.spaces);
        for (symbol, &coeff) in &self.terms {
            if symbol.0.is_gamma() || symbol.1.is_gamma() {
                out.add_term(symbol.clone(), coeff);
            }
        }
        out
    }
}

impl fmt::Display for ProductClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((l, r), coeff) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            write!(f, "{coeff}·({l} ⊗ {r})")?;
            first = false;
        }
        Ok(())
    }
}

fn check_space(cls: &FormalClass, g: usize, n: usize) -> Result<()> {
    if cls.space.g != g || cls.space.n != n {
        return Err(Error::SpaceMismatch {
            class_g: cls.space.g,
            class_n: cls.space.n,
            want_g: g,
            want_n: n,
        });
    }
    Ok(())
}

/// Pullback along the nonseparating gluing map. The unit survives; every
/// gamma term dies because the composition with any forgetful map stays
/// in the boundary and the underlying class is minimal.
pub fn pullback_gamma_q(cls: &FormalClass, graph: &IrrGraph) -> Result<FormalClass> {
    check_space(cls, graph.g, graph.n)?;
    let target = SpaceLabel {
        g: graph.g - 1,
        n: graph.n + 2,
    };
    let mut out = FormalClass::zero(target);
    for (symbol, coeff) in cls.terms() {
        match symbol {
            ClassSymbol::Unit => out.add_term(ClassSymbol::Unit, coeff),
            ClassSymbol::Gamma(keep) => {
                if q_image_is_boundary(graph.g, graph.n, graph.g, keep) {
                    // minimality: the restriction vanishes
                }
            }
        }
    }
    Ok(out)
}

/// Pullback along a separating gluing map. Unit goes to unit ⊗ unit. A
/// gamma term is resolved by stabilizing the graph after forgetting the
/// non-kept markings: if the image stays in the boundary the term dies
/// by minimality, otherwise the pullback is the transported gamma on the
/// surviving factor tensored with the unit on the contracted one.
pub fn pullback_gamma_r(cls: &FormalClass, graph: &SepGraph) -> Result<ProductClass> {
    check_space(cls, graph.g, graph.n)?;
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
    let mut out = ProductClass::zero(spaces);
    for (symbol, coeff) in cls.terms() {
        match symbol {
            ClassSymbol::Unit => out.add_term((ClassSymbol::Unit, ClassSymbol::Unit), coeff),
            ClassSymbol::Gamma(keep) => {
                match stabilize_after_forgetting(graph, keep, graph.g, keep.len())? {
                    ContractionResult::Boundary => {}
                    ContractionResult::Onto { factor, retained } => {
                        let symbol = if factor == 1 {
                            (ClassSymbol::Gamma(retained), ClassSymbol::Unit)
                        } else {
                            (ClassSymbol::Unit, ClassSymbol::Gamma(retained))
                        };
                        out.add_term(symbol, coeff);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Whether a theory whose listed values include a nonzero gamma multiple
/// on the target space takes the target value. Values of this engine are
/// unit/gamma combinations, so spanning the gamma symbol is the test.
pub fn check_takes_value(values: &[FormalClass], target: &FormalClass) -> bool {
    values
        .iter()
        .any(|v| v.space == target.space && v.has_gamma())
}
