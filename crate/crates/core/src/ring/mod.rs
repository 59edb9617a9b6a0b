//! Finite associative rings with dense element indices. Index 0 is always the
//! additive identity. Nothing here assumes a multiplicative identity.

mod constructors;
mod oracle;
mod subgroup;

use std::any::Any;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::expr::{parse_expr, Expr};

pub use constructors::{
    cyclic, direct_sum, galois, group_ring, matrix, parse_group, parse_ring, ring_from_expr, subring,
    CayleyRing, CyclicRing, DirectSumRing, GaloisRing, GroupRingArith, MatrixRing, SubringArith,
};
pub(crate) use oracle::principal_pair_search;
pub(crate) use subgroup::find_unit;
pub use oracle::{element_criterion, is_prime_bruteforce, PrimeVerdict, ORACLE_BOUND};
pub use subgroup::{
    centralizer, enumerate_closed, enumerate_ideals, ideal_generated, is_maximal_commutative, is_s_unital,
    s_unit_for, set_product, AdditiveSubgroup, Closure, IdealList,
};

pub type Elem = usize;

/// Rings above this size never get cached operation tables.
pub const TABLE_LIMIT: usize = 256;

/// Arithmetic of one concrete ring.
pub trait RingArith: Send + Sync + 'static {
    fn size(&self) -> usize;
    fn add(&self, a: Elem, b: Elem) -> Elem;
    fn neg(&self, a: Elem) -> Elem;
    fn mul(&self, a: Elem, b: Elem) -> Elem;

    fn one(&self) -> Option<Elem> {
        None
    }

    /// Constructor expression that rebuilds this ring.
    fn describe(&self) -> String;

    /// Element rendering that `FiniteRing::parse_element` reads back.
    fn render(&self, a: Elem) -> String;

    /// Resolves a name or call appearing in an element expression.
    fn atom(&self, ring: &FiniteRing, name: &str, args: &[Expr]) -> Result<Elem>;

    /// Whole-expression hook for rings (subrings) that evaluate elsewhere.
    fn eval_whole(&self, _expr: &Expr) -> Option<Result<Elem>> {
        None
    }

    fn as_any(&self) -> &dyn Any;
}

struct Tables {
    add: Vec<u16>,
    neg: Vec<u16>,
    mul: Vec<u16>,
}

struct Inner {
    arith: Box<dyn RingArith>,
    tables: Option<Tables>,
    generators: OnceLock<Vec<Elem>>,
}

/// Shared handle to a ring. Cloning is cheap; two handles denote the same ring
/// only if they come from the same construction.
#[derive(Clone)]
pub struct FiniteRing(Arc<Inner>);

impl fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteRing({}, {} elements)", self.describe(), self.size())
    }
}

impl FiniteRing {
    pub fn new(arith: impl RingArith) -> FiniteRing {
        let n = arith.size();
        let tables = (n <= TABLE_LIMIT).then(|| {
            let mut add = Vec::with_capacity(n * n);
            let mut mul = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    add.push(arith.add(a, b) as u16);
                    mul.push(arith.mul(a, b) as u16);
                }
            }
            let neg = (0..n).map(|a| arith.neg(a) as u16).collect();
            Tables { add, neg, mul }
        });
        FiniteRing(Arc::new(Inner {
            arith: Box::new(arith),
            tables,
            generators: OnceLock::new(),
        }))
    }

    pub fn same(&self, other: &FiniteRing) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn arith(&self) -> &dyn RingArith {
        self.0.arith.as_ref()
    }

    pub fn downcast<T: 'static>(&self) -> Option<&T> {
        self.0.arith.as_any().downcast_ref()
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.0.arith.size()
    }

    pub fn is_zero_ring(&self) -> bool {
        self.size() == 1
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size()
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match &self.0.tables {
            Some(t) => t.add[a * self.size() + b] as Elem,
            None => self.0.arith.add(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        match &self.0.tables {
            Some(t) => t.neg[a] as Elem,
            None => self.0.arith.neg(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        match &self.0.tables {
            Some(t) => t.mul[a * self.size() + b] as Elem,
            None => self.0.arith.mul(a, b),
        }
    }

    /// `k·a` for an integer `k`.
    pub fn smul(&self, k: i64, a: Elem) -> Elem {
        let base = if k < 0 { self.neg(a) } else { a };
        let mut k = k.unsigned_abs();
        let (mut acc, mut pow) = (0, base);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, pow);
            }
            pow = self.add(pow, pow);
            k >>= 1;
        }
        acc
    }

    pub fn one(&self) -> Option<Elem> {
        self.0.arith.one()
    }

    pub fn describe(&self) -> String {
        self.0.arith.describe()
    }

    pub fn render(&self, a: Elem) -> String {
        self.0.arith.render(a)
    }

    /// An additive generating set, chosen greedily in index order, so it has
    /// at most log2 |R| elements.
    pub fn additive_generators(&self) -> &[Elem] {
        self.0.generators.get_or_init(|| {
            let mut h = AdditiveSubgroup::zero(self);
            for x in self.elements() {
                if !h.contains(x) {
                    h.insert(x);
                }
                if h.len() == self.size() {
                    break;
                }
            }
            h.generators().to_vec()
        })
    }

    pub fn eval(&self, expr: &Expr) -> Result<Elem> {
        if let Some(r) = self.0.arith.eval_whole(expr) {
            return r;
        }
        match expr {
            Expr::Int(k) => self.integer(*k),
            Expr::Index(k) => {
                if *k < self.size() {
                    Ok(*k)
                } else {
                    Err(Error::MalformedInput(format!(
                        "element index #{k} outside a ring of size {}",
                        self.size()
                    )))
                }
            }
            Expr::Add(a, b) => Ok(self.add(self.eval(a)?, self.eval(b)?)),
            Expr::Sub(a, b) => Ok(self.sub(self.eval(a)?, self.eval(b)?)),
            Expr::Neg(a) => Ok(self.neg(self.eval(a)?)),
            Expr::Mul(a, b) => match a.as_int() {
                Some(k) => Ok(self.smul(k, self.eval(b)?)),
                None => Ok(self.mul(self.eval(a)?, self.eval(b)?)),
            },
            Expr::Name(n) => self.0.arith.atom(self, n, &[]),
            Expr::Call(n, args) => self.0.arith.atom(self, n, args),
        }
    }

    fn integer(&self, k: i64) -> Result<Elem> {
        if k == 0 {
            return Ok(0);
        }
        match self.one() {
            Some(one) => Ok(self.smul(k, one)),
            None => Err(Error::MalformedInput(format!(
                "integer literal {k} used in the non-unital ring {}",
                self.describe()
            ))),
        }
    }

    pub fn parse_element(&self, src: &str) -> Result<Elem> {
        self.eval(&parse_expr(src)?)
    }

    pub fn is_commutative(&self) -> bool {
        let g = self.additive_generators();
        g.iter()
            .all(|&a| g.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Exhaustive check of the ring axioms (abelian group, associativity,
    /// distributivity). Cubic in the size; callers bound it.
    pub fn check_axioms(&self) -> Result<()> {
        let n = self.size();
        if n == 0 {
            return Err(Error::MalformedInput("empty carrier".into()));
        }
        for a in 0..n {
            if self.add(a, 0) != a || self.add(0, a) != a {
                return Err(Error::axiom("additive identity", self.render(a)));
            }
            if self.add(a, self.neg(a)) != 0 {
                return Err(Error::axiom("additive inverse", self.render(a)));
            }
            for b in 0..n {
                if self.add(a, b) != self.add(b, a) {
                    return Err(Error::axiom(
                        "commutativity of +",
                        format!("{}, {}", self.render(a), self.render(b)),
                    ));
                }
                let ab = self.add(a, b);
                let m_ab = self.mul(a, b);
                for c in 0..n {
                    let triple = || format!("{}, {}, {}", self.render(a), self.render(b), self.render(c));
                    if self.add(ab, c) != self.add(a, self.add(b, c)) {
                        return Err(Error::axiom("associativity of +", triple()));
                    }
                    if self.mul(m_ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::axiom("associativity of *", triple()));
                    }
                    if self.mul(ab, c) != self.add(self.mul(a, c), self.mul(b, c)) {
                        return Err(Error::axiom("right distributivity", triple()));
                    }
                    if self.mul(c, ab) != self.add(self.mul(c, a), self.mul(c, b)) {
                        return Err(Error::axiom("left distributivity", triple()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Renders a sum of terms, `0` when empty.
pub(crate) fn join_terms(terms: Vec<String>) -> String {
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// Wraps a rendering in parentheses unless it already parses as one atom.
pub(crate) fn paren(s: &str) -> String {
    match parse_expr(s) {
        Ok(Expr::Name(_) | Expr::Int(_) | Expr::Index(_) | Expr::Call(..)) => s.to_string(),
        _ => format!("({s})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smul_handles_signs() {
        let z6 = cyclic(6);
        assert_eq!(z6.smul(4, 1), 4);
        assert_eq!(z6.smul(-1, 1), 5);
        assert_eq!(z6.smul(13, 1), 1);
        assert_eq!(z6.smul(0, 3), 0);
    }

    #[test]
    fn render_round_trips() {
        for ring in [
            parse_ring("M(2, F2)").unwrap(),
            parse_ring("GF(9)").unwrap(),
            parse_ring("sum(F2, Z(4))").unwrap(),
            parse_ring("group_ring(F3, C(2))").unwrap(),
            parse_ring("M(2, GF(4))").unwrap(),
        ] {
            for a in ring.elements() {
                let s = ring.render(a);
                assert_eq!(ring.parse_element(&s).unwrap(), a, "{} in {}", s, ring.describe());
            }
        }
    }

    #[test]
    fn generators_span() {
        let r = parse_ring("M(2, F2)").unwrap();
        assert_eq!(r.additive_generators().len(), 4);
        let h = AdditiveSubgroup::closure(&r, r.additive_generators().iter().copied());
        assert_eq!(h.len(), 16);
    }
}
