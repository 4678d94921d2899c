//! State space of the genus-m surface algebra.
//!
//! For m >= 0 the space V has the 2m+2 basis vectors
//! `a, b_1..b_m, c_1..c_m, d` with Z-grading 0,1,1,2 and the induced
//! Z_2-parity. The pairing satisfies eta(a,d) = eta(d,a) = 1 and
//! eta(b_i,c_i) = -eta(c_i,b_i) = 1 in graded mode; the ungraded mode
//! keeps the basis but makes eta symmetric and kills every sign that
//! comes from the grading. The product has unit `a`, b_i * c_i = d,
//! c_i * b_i = -d (graded) or +d (ungraded), and all other basis
//! products vanish. The algebra is not semisimple: every non-unit basis
//! vector is nilpotent.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Exact rational coefficient. No floating point anywhere in the engine.
pub type Coeff = Rational64;

/// One of the 2m+2 basis vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisVector {
    A,
    B(usize),
    C(usize),
    D,
}

impl BasisVector {
    /// Z-grading: a -> 0, b_i and c_i -> 1, d -> 2.
    pub fn z_grade(&self) -> usize {
        match self {
            BasisVector::A => 0,
            BasisVector::B(_) | BasisVector::C(_) => 1,
            BasisVector::D => 2,
        }
    }

    pub fn is_odd_graded(&self) -> bool {
        self.z_grade() % 2 == 1
    }

    /// Parse a token of the form `a`, `d`, `b<i>`, `c<i>`.
    pub fn parse(token: &str) -> Result<BasisVector> {
        let bad = || Error::BadToken {
            token: token.to_string(),
        };
        match token {
            "a" => Ok(BasisVector::A),
            "d" => Ok(BasisVector::D),
            _ => {
                let (head, tail) = token.split_at(1.min(token.len()));
                let index: usize = tail.parse().map_err(|_| bad())?;
                if index == 0 {
                    return Err(bad());
                }
                match head {
                    "b" => Ok(BasisVector::B(index)),
                    "c" => Ok(BasisVector::C(index)),
                    _ => Err(bad()),
                }
            }
        }
    }

    pub fn token(&self) -> String {
        match self {
            BasisVector::A => "a".to_string(),
            BasisVector::B(i) => format!("b{i}"),
            BasisVector::C(i) => format!("c{i}"),
            BasisVector::D => "d".to_string(),
        }
    }
}

impl fmt::Display for BasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.token())
    }
}

/// Whether the Z_2-grading participates in signs. The ungraded variant
/// keeps the same basis but declares every vector even and symmetrizes
/// the pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GradingMode {
    Graded,
    Ungraded,
}

impl GradingMode {
    pub fn parse(s: &str) -> Result<GradingMode> {
        match s {
            "graded" => Ok(GradingMode::Graded),
            "ungraded" => Ok(GradingMode::Ungraded),
            _ => Err(Error::BadToken {
                token: s.to_string(),
            }),
        }
    }

    pub fn token(&self) -> &'static str {
        match self {
            GradingMode::Graded => "graded",
            GradingMode::Ungraded => "ungraded",
        }
    }
}

/// One term of the bi-vector inverse to eta.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BivectorTerm {
    pub left: BasisVector,
    pub right: BasisVector,
    pub coeff: Coeff,
}

/// An element of V in canonical form: zero coefficients are absent.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vector {
    coeffs: BTreeMap<BasisVector, Coeff>,
}

impl Vector {
    pub fn zero() -> Vector {
        Vector::default()
    }

    pub fn basis(v: BasisVector) -> Vector {
        Vector::term(v, Coeff::from_integer(1))
    }

    pub fn term(v: BasisVector, c: Coeff) -> Vector {
        let mut out = Vector::zero();
        out.add_term(v, c);
        out
    }

    pub fn add_term(&mut self, v: BasisVector, c: Coeff) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(v).or_insert_with(Coeff::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&v);
        }
    }

    pub fn add_scaled(&mut self, other: &Vector, c: Coeff) {
        for (&v, &x) in &other.coeffs {
            self.add_term(v, x * c);
        }
    }

    pub fn coeff(&self, v: BasisVector) -> Coeff {
        self.coeffs.get(&v).copied().unwrap_or_else(Coeff::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (BasisVector, Coeff)> + '_ {
        self.coeffs.iter().map(|(&v, &c)| (v, c))
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (v, c) in &self.coeffs {
            if first {
                write!(f, "{c}·{v}")?;
                first = false;
            } else if *c < Coeff::zero() {
                write!(f, " - {}·{v}", -c)?;
            } else {
                write!(f, " + {c}·{v}")?;
            }
        }
        Ok(())
    }
}

/// The triple (V, eta, 1) for a given m, together with the star product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    m: usize,
    mode: GradingMode,
    basis: Vec<BasisVector>,
}

/// Builds the state space for m markings in the requested grading mode.
pub fn build_state_space(m: usize, mode: GradingMode) -> StateSpace {
    StateSpace::new(m, mode)
}

impl StateSpace {
    pub fn new(m: usize, mode: GradingMode) -> StateSpace {
        let mut basis = Vec::with_capacity(2 * m + 2);
        basis.push(BasisVector::A);
        basis.extend((1..=m).map(BasisVector::B));
        basis.extend((1..=m).map(BasisVector::C));
        basis.push(BasisVector::D);
        StateSpace { m, mode, basis }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mode(&self) -> GradingMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        2 * self.m + 2
    }

    /// Ordered basis a, b_1..b_m, c_1..c_m, d.
    pub fn basis(&self) -> &[BasisVector] {
        &self.basis
    }

    /// Unit of the algebra.
    pub fn unit(&self) -> BasisVector {
        BasisVector::A
    }

    /// Z_2-parity in the active mode; the ungraded mode declares
    /// everything even.
    pub fn parity(&self, v: BasisVector) -> u8 {
        match self.mode {
            GradingMode::Graded => (v.z_grade() % 2) as u8,
            GradingMode::Ungraded => 0,
        }
    }

    pub fn check_index(&self, v: BasisVector) -> Result<()> {
        match v {
            BasisVector::B(i) | BasisVector::C(i) if i == 0 || i > self.m => {
                Err(Error::IndexOutOfRange {
                    index: i,
                    m: self.m,
                })
            }
            _ => Ok(()),
        }
    }

    pub fn check_indices(&self, vs: &[BasisVector]) -> Result<()> {
        vs.iter().try_for_each(|&v| self.check_index(v))
    }

    pub fn parse_insertions(&self, tokens: &[&str]) -> Result<Vec<BasisVector>> {
        let vs = tokens
            .iter()
            .map(|t| BasisVector::parse(t))
            .collect::<Result<Vec<_>>>()?;
        self.check_indices(&vs)?;
        Ok(vs)
    }

    /// The pairing on basis vectors.
    pub fn eta(&self, x: BasisVector, y: BasisVector) -> Result<Coeff> {
        self.check_index(x)?;
        self.check_index(y)?;
        let one = Coeff::from_integer(1);
        Ok(match (x, y) {
            (BasisVector::A, BasisVector::D) | (BasisVector::D, BasisVector::A) => one,
            (BasisVector::B(i), BasisVector::C(j)) if i == j => one,
            (BasisVector::C(i), BasisVector::B(j)) if i == j => match self.mode {
                GradingMode::Graded => -one,
                GradingMode::Ungraded => one,
            },
            _ => Coeff::zero(),
        })
    }

    /// Dense matrix of eta in basis order.
    pub fn eta_matrix(&self) -> Vec<Vec<Coeff>> {
        self.basis
            .iter()
            .map(|&x| {
                self.basis
                    .iter()
                    .map(|&y| self.eta(x, y).expect("basis indices valid"))
                    .collect()
            })
            .collect()
    }

    /// Terms of the bi-vector dual to eta:
    /// a(x)d + d(x)a - sum_i (b_i(x)c_i - c_i(x)b_i) in graded mode,
    /// with both b/c coefficients +1 in ungraded mode.
    pub fn bivector(&self) -> Vec<BivectorTerm> {
        let one = Coeff::from_integer(1);
        let bc = match self.mode {
            GradingMode::Graded => -one,
            GradingMode::Ungraded => one,
        };
        let mut terms = vec![
            BivectorTerm {
                left: BasisVector::A,
                right: BasisVector::D,
                coeff: one,
            },
            BivectorTerm {
                left: BasisVector::D,
                right: BasisVector::A,
                coeff: one,
            },
        ];
        for i in 1..=self.m {
            terms.push(BivectorTerm {
                left: BasisVector::B(i),
                right: BasisVector::C(i),
                coeff: bc,
            });
            terms.push(BivectorTerm {
                left: BasisVector::C(i),
                right: BasisVector::B(i),
                coeff: one,
            });
        }
        terms
    }

    /// Product of two basis vectors.
    pub fn star_basis(&self, x: BasisVector, y: BasisVector) -> Result<Vector> {
        self.check_index(x)?;
        self.check_index(y)?;
        let one = Coeff::from_integer(1);
        Ok(match (x, y) {
            (BasisVector::A, v) | (v, BasisVector::A) => Vector::basis(v),
            (BasisVector::B(i), BasisVector::C(j)) if i == j => Vector::term(BasisVector::D, one),
            (BasisVector::C(i), BasisVector::B(j)) if i == j => {
                let sign = match self.mode {
                    GradingMode::Graded => -one,
                    GradingMode::Ungraded => one,
                };
                Vector::term(BasisVector::D, sign)
            }
            _ => Vector::zero(),
        })
    }

    /// Bilinear extension of the basis product.
    pub fn star(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let mut out = Vector::zero();
        for (vx, cx) in x.iter() {
            for (vy, cy) in y.iter() {
                out.add_scaled(&self.star_basis(vx, vy)?, cx * cy);
            }
        }
        Ok(out)
    }

    /// Contraction of the bi-vector by the product: sum of
    /// coeff * (left * right). Multiplying by it adds a handle in the
    /// associated topological field theory.
    pub fn handle_element(&self) -> Vector {
        let mut out = Vector::zero();
        for term in self.bivector() {
            let prod = self
                .star_basis(term.left, term.right)
                .expect("bivector indices valid");
            out.add_scaled(&prod, term.coeff);
        }
        out
    }
}

/// Sign incurred when reordering a tuple of graded objects.
///
/// `perm[k]` is the original (1-based) position of the object placed at
/// slot k+1, i.e. the reordered tuple is `(v_{perm[1]}, ..., v_{perm[n]})`.
/// `parities[t-1]` is the parity of the object at original position t.
/// Each transposition of two odd objects contributes -1; equivalently the
/// result is the sign of the permutation induced on the odd subsequence.
pub fn koszul_sign(perm: &[usize], parities: &[u8]) -> Result<i64> {
    if perm.len() != parities.len() {
        return Err(Error::LengthMismatch {
            left: perm.len(),
            right: parities.len(),
        });
    }
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p > n || seen[p - 1] {
            return Err(Error::NotAPermutation { n });
        }
        seen[p - 1] = true;
    }
    let odd_sequence: Vec<usize> = perm
        .iter()
        .copied()
        .filter(|&p| parities[p - 1] % 2 == 1)
        .collect();
    let mut inversions = 0usize;
    for i in 0..odd_sequence.len() {
        for j in i + 1..odd_sequence.len() {
            if odd_sequence[i] > odd_sequence[j] {
                inversions += 1;
            }
        }
    }
    Ok(if inversions % 2 == 0 { 1 } else { -1 })
}
