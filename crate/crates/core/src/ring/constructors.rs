//! Concrete ring families and the ring constructor grammar.

use std::any::Any;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, quote_label, Expr};
use crate::groupoid::FiniteGroup;

use super::{join_terms, paren, AdditiveSubgroup, Elem, FiniteRing, RingArith};

/// Largest carrier any constructor will build.
pub const MAX_CARRIER: usize = 1 << 20;

fn checked_pow(base: usize, exp: usize, what: &str) -> Result<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc
            .checked_mul(base)
            .filter(|&x| x <= MAX_CARRIER)
            .ok_or_else(|| Error::bound(what, usize::MAX, MAX_CARRIER))?;
    }
    Ok(acc)
}

fn no_atom(ring: &FiniteRing, name: &str) -> Error {
    Error::MalformedInput(format!("`{name}` is not an element of {}", ring.describe()))
}

fn int_arg(e: &Expr, what: &str) -> Result<i64> {
    e.as_int()
        .ok_or_else(|| Error::MalformedInput(format!("{what} must be an integer, got `{e}`")))
}

// ---------------------------------------------------------------- Z/n

pub struct CyclicRing {
    n: usize,
}

pub fn cyclic(n: usize) -> FiniteRing {
    assert!(n >= 1, "Z(0) is not finite");
    FiniteRing::new(CyclicRing { n })
}

impl RingArith for CyclicRing {
    fn size(&self) -> usize {
        self.n
    }
    fn add(&self, a: Elem, b: Elem) -> Elem {
        (a + b) % self.n
    }
    fn neg(&self, a: Elem) -> Elem {
        (self.n - a) % self.n
    }
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        ((a as u64 * b as u64) % self.n as u64) as Elem
    }
    fn one(&self) -> Option<Elem> {
        Some(1 % self.n)
    }
    fn describe(&self) -> String {
        format!("Z({})", self.n)
    }
    fn render(&self, a: Elem) -> String {
        a.to_string()
    }
    fn atom(&self, ring: &FiniteRing, name: &str, _args: &[Expr]) -> Result<Elem> {
        Err(no_atom(ring, name))
    }
    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------- GF(p^k)

/// `GF(p)` or `GF(p^2)`. Quadratic extensions use the Conway polynomial
/// `x^2 + c1 x + c0`; element `a0 + a1 x` has index `a0 + a1 p`.
pub struct GaloisRing {
    p: usize,
    k: usize,
    c0: usize,
    c1: usize,
}

/// Conway polynomials `x^2 + c1 x + c0` for the supported quadratic fields.
pub const CONWAY_QUADRATIC: [(usize, usize, usize); 4] = [(2, 1, 1), (3, 2, 2), (5, 4, 2), (7, 6, 3)];

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// The field with `q` elements, `q` a prime or the square of a prime in
/// {2, 3, 5, 7}.
pub fn galois(q: usize) -> Result<FiniteRing> {
    if is_prime(q) {
        if q > MAX_CARRIER {
            return Err(Error::bound("field", q, MAX_CARRIER));
        }
        return Ok(FiniteRing::new(GaloisRing { p: q, k: 1, c0: 0, c1: 0 }));
    }
    for &(p, c1, c0) in &CONWAY_QUADRATIC {
        if p * p == q {
            return Ok(FiniteRing::new(GaloisRing { p, k: 2, c0, c1 }));
        }
    }
    Err(Error::MalformedInput(format!(
        "GF({q}) is not supported (prime fields and GF(4), GF(9), GF(25), GF(49) are)"
    )))
}

impl GaloisRing {
    fn split(&self, a: Elem) -> (usize, usize) {
        (a % self.p, a / self.p)
    }

    /// The Frobenius automorphism `a ↦ a^p`.
    pub fn frobenius(&self, a: Elem) -> Elem {
        let mut acc = 1;
        for _ in 0..self.p {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn characteristic(&self) -> usize {
        self.p
    }
}

impl RingArith for GaloisRing {
    fn size(&self) -> usize {
        self.p.pow(self.k as u32)
    }
    fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p;
        let ((a0, a1), (b0, b1)) = (self.split(a), self.split(b));
        (a0 + b0) % p + ((a1 + b1) % p) * p
    }
    fn neg(&self, a: Elem) -> Elem {
        let p = self.p;
        let (a0, a1) = self.split(a);
        (p - a0) % p + ((p - a1) % p) * p
    }
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        let p = self.p;
        if self.k == 1 {
            return a * b % p;
        }
        let ((a0, a1), (b0, b1)) = (self.split(a), self.split(b));
        let t = a1 * b1 % p;
        // x^2 = -c1 x - c0
        let r0 = (a0 * b0 + t * (p - self.c0)) % p;
        let r1 = (a0 * b1 + a1 * b0 + t * (p - self.c1)) % p;
        r0 + r1 * p
    }
    fn one(&self) -> Option<Elem> {
        Some(1)
    }
    fn describe(&self) -> String {
        if self.k == 1 {
            format!("F{}", self.p)
        } else {
            format!("GF({})", self.p * self.p)
        }
    }
    fn render(&self, a: Elem) -> String {
        let (a0, a1) = self.split(a);
        let mut terms = Vec::new();
        match a1 {
            0 => {}
            1 => terms.push("x".to_string()),
            c => terms.push(format!("{c}*x")),
        }
        if a0 != 0 {
            terms.push(a0.to_string());
        }
        join_terms(terms)
    }
    fn atom(&self, ring: &FiniteRing, name: &str, args: &[Expr]) -> Result<Elem> {
        if name == "x" && args.is_empty() && self.k == 2 {
            Ok(self.p)
        } else {
            Err(no_atom(ring, name))
        }
    }
    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------- M_n(R)

/// `n × n` matrices over a base ring; entry `(i, j)` is digit `i·n + j` of
/// the mixed-radix index.
pub struct MatrixRing {
    n: usize,
    base: FiniteRing,
    size: usize,
}

pub fn matrix(n: usize, base: &FiniteRing) -> Result<FiniteRing> {
    if n == 0 {
        return Err(Error::MalformedInput("matrix size must be positive".into()));
    }
    let size = checked_pow(base.size(), n * n, "matrix ring")?;
    Ok(FiniteRing::new(MatrixRing {
        n,
        base: base.clone(),
        size,
    }))
}

impl MatrixRing {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> &FiniteRing {
        &self.base
    }

    pub fn entries(&self, a: Elem) -> Vec<Elem> {
        let q = self.base.size();
        let mut out = Vec::with_capacity(self.n * self.n);
        let mut a = a;
        for _ in 0..self.n * self.n {
            out.push(a % q);
            a /= q;
        }
        out
    }

    pub fn from_entries(&self, entries: &[Elem]) -> Elem {
        let q = self.base.size();
        entries.iter().rev().fold(0, |acc, &d| acc * q + d)
    }

    /// The matrix with `c` at `(i, j)` (0-based) and zeros elsewhere.
    pub fn unit(&self, i: usize, j: usize, c: Elem) -> Elem {
        let mut e = vec![0; self.n * self.n];
        e[i * self.n + j] = c;
        self.from_entries(&e)
    }

    pub fn entry(&self, a: Elem, i: usize, j: usize) -> Elem {
        let q = self.base.size();
        (a / q.pow((i * self.n + j) as u32)) % q
    }
}

impl RingArith for MatrixRing {
    fn size(&self) -> usize {
        self.size
    }
    fn add(&self, a: Elem, b: Elem) -> Elem {
        let (x, y) = (self.entries(a), self.entries(b));
        let s: Vec<Elem> = x.iter().zip(&y).map(|(&p, &q)| self.base.add(p, q)).collect();
        self.from_entries(&s)
    }
    fn neg(&self, a: Elem) -> Elem {
        let s: Vec<Elem> = self.entries(a).iter().map(|&p| self.base.neg(p)).collect();
        self.from_entries(&s)
    }
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        let n = self.n;
        let (x, y) = (self.entries(a), self.entries(b));
        let mut out = vec![0; n * n];
        for i in 0..n {
            for k in 0..n {
                let xik = x[i * n + k];
                if xik == 0 {
                    continue;
                }
                for j in 0..n {
                    let t = self.base.mul(xik, y[k * n + j]);
                    out[i * n + j] = self.base.add(out[i * n + j], t);
                }
            }
        }
        self.from_entries(&out)
    }
    fn one(&self) -> Option<Elem> {
        let one = self.base.one()?;
        let mut e = vec![0; self.n * self.n];
        for i in 0..self.n {
            e[i * self.n + i] = one;
        }
        Some(self.from_entries(&e))
    }
    fn describe(&self) -> String {
        format!("M({}, {})", self.n, self.base.describe())
    }
    fn render(&self, a: Elem) -> String {
        let n = self.n;
        let one = self.base.one();
        let mut terms = Vec::new();
        for (k, &c) in self.entries(a).iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (i, j) = (k / n + 1, k % n + 1);
            if Some(c) == one {
                terms.push(format!("e({i},{j})"));
            } else {
                terms.push(format!("e({i},{j},{})", self.base.render(c)));
            }
        }
        join_terms(terms)
    }
    fn atom(&self, ring: &FiniteRing, name: &str, args: &[Expr]) -> Result<Elem> {
        if name != "e" || !(2..=3).contains(&args.len()) {
            return Err(no_atom(ring, name));
        }
        let i = int_arg(&args[0], "row index")?;
        let j = int_arg(&args[1], "column index")?;
        let n = self.n as i64;
        if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
            return Err(Error::MalformedInput(format!("e({i},{j}) outside a {n}×{n} matrix")));
        }
        let c = match args.get(2) {
            Some(c) => self.base.eval(c)?,
            None => self.base.one().ok_or_else(|| {
                Error::MalformedInput("e(i,j) needs an explicit coefficient over a non-unital base".into())
            })?,
        };
        Ok(self.unit(i as usize - 1, j as usize - 1, c))
    }
    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------- R_1 ⊕ ... ⊕ R_m

/// External direct sum; part 0 is the least significant digit. Parts may be
/// labelled by object names (`at(e, ...)`).
pub struct DirectSumRing {
    parts: Vec<FiniteRing>,
    labels: Option<Vec<String>>,
    place: Vec<usize>,
    size: usize,
}

pub fn direct_sum(parts: &[FiniteRing], labels: Option<Vec<String>>) -> Result<FiniteRing> {
    if parts.is_empty() {
        return Err(Error::MalformedInput("direct sum of no rings".into()));
    }
    if let Some(l) = &labels {
        if l.len() != parts.len() {
            return Err(Error::MalformedInput("one label per summand is required".into()));
        }
    }
    let mut place = Vec::with_capacity(parts.len());
    let mut size: usize = 1;
    for p in parts {
        place.push(size);
        size = size
            .checked_mul(p.size())
            .filter(|&s| s <= MAX_CARRIER)
            .ok_or_else(|| Error::bound("direct sum", usize::MAX, MAX_CARRIER))?;
    }
    Ok(FiniteRing::new(DirectSumRing {
        parts: parts.to_vec(),
        labels,
        place,
        size,
    }))
}

impl DirectSumRing {
    pub fn parts(&self) -> &[FiniteRing] {
        &self.parts
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn project(&self, a: Elem, i: usize) -> Elem {
        (a / self.place[i]) % self.parts[i].size()
    }

    pub fn inject(&self, i: usize, x: Elem) -> Elem {
        x * self.place[i]
    }

    pub fn split(&self, a: Elem) -> Vec<Elem> {
        (0..self.parts.len()).map(|i| self.project(a, i)).collect()
    }

    pub fn join(&self, xs: &[Elem]) -> Elem {
        xs.iter().enumerate().map(|(i, &x)| x * self.place[i]).sum()
    }

    /// Every element of summand `i`, as elements of the sum.
    pub fn summand(&self, i: usize) -> Vec<Elem> {
        (0..self.parts[i].size()).map(|x| self.inject(i, x)).collect()
    }

    fn part_index(&self, e: &Expr) -> Result<usize> {
        if let Some(k) = e.as_int() {
            if k >= 1 && (k as usize) <= self.parts.len() {
                return Ok(k as usize - 1);
            }
        }
        if let (Some(name), Some(labels)) = (e.as_name(), &self.labels) {
            if let Some(i) = labels.iter().position(|l| l == name) {
                return Ok(i);
            }
        }
        Err(Error::MalformedInput(format!("`{e}` does not name a summand")))
    }

    fn zip(&self, a: Elem, b: Elem, f: impl Fn(&FiniteRing, Elem, Elem) -> Elem) -> Elem {
        let mut out = 0;
        for (i, p) in self.parts.iter().enumerate() {
            out += f(p, self.project(a, i), self.project(b, i)) * self.place[i];
        }
        out
    }
}

impl RingArith for DirectSumRing {
    fn size(&self) -> usize {
        self.size
    }
    fn add(&self, a: Elem, b: Elem) -> Elem {
        self.zip(a, b, |p, x, y| p.add(x, y))
    }
    fn neg(&self, a: Elem) -> Elem {
        self.zip(a, 0, |p, x, _| p.neg(x))
    }
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.zip(a, b, |p, x, y| p.mul(x, y))
    }
    fn one(&self) -> Option<Elem> {
        let ones: Option<Vec<Elem>> = self.parts.iter().map(|p| p.one()).collect();
        Some(self.join(&ones?))
    }
    fn describe(&self) -> String {
        let parts: Vec<String> = self.parts.iter().map(|p| p.describe()).collect();
        match &self.labels {
            None => format!("sum({})", parts.join(", ")),
            Some(l) => {
                let items: Vec<String> = l
                    .iter()
                    .zip(&parts)
                    .map(|(l, p)| format!("{}: {p}", quote_label(l)))
                    .collect();
                format!("by_object({})", items.join(", "))
            }
        }
    }
    fn render(&self, a: Elem) -> String {
        let mut terms = Vec::new();
        for (i, p) in self.parts.iter().enumerate() {
            let x = self.project(a, i);
            if x == 0 {
                continue;
            }
            let tag = match &self.labels {
                Some(l) => quote_label(&l[i]),
                None => (i + 1).to_string(),
            };
            terms.push(format!("at({tag}, {})", p.render(x)));
        }
        join_terms(terms)
    }
    fn atom(&self, ring: &FiniteRing, name: &str, args: &[Expr]) -> Result<Elem> {
        if name != "at" || args.len() != 2 {
            return Err(no_atom(ring, name));
        }
        let i = self.part_index(&args[0])?;
        Ok(self.inject(i, self.parts[i].eval(&args[1])?))
    }
    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------- R[H]

/// Group ring over a unital base; digit `h` is the coefficient of group
/// element `h`.
pub struct GroupRingArith {
    base: FiniteRing,
    group: FiniteGroup,
    group_name: String,
    size: usize,
}

pub fn group_ring(base: &FiniteRing, group: &FiniteGroup, group_name: &str) -> Result<FiniteRing> {
    if base.one().is_none() {
        return Err(Error::MalformedInput("group rings need a unital base ring".into()));
    }
    let size = checked_pow(base.size(), group.order(), "group ring")?;
    Ok(FiniteRing::new(GroupRingArith {
        base: base.clone(),
        group: group.clone(),
        group_name: group_name.to_string(),
        size,
    }))
}

impl GroupRingArith {
    pub fn coefficients(&self, a: Elem) -> Vec<Elem> {
        let q = self.base.size();
        let mut a = a;
        (0..self.group.order())
            .map(|_| {
                let d = a % q;
                a /= q;
                d
            })
            .collect()
    }

    pub fn from_coefficients(&self, cs: &[Elem]) -> Elem {
        let q = self.base.size();
        cs.iter().rev().fold(0, |acc, &d| acc * q + d)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn base(&self) -> &FiniteRing {
        &self.base
    }

    fn basis(&self, h: usize, c: Elem) -> Elem {
        let mut cs = vec![0; self.group.order()];
        cs[h] = c;
        self.from_coefficients(&cs)
    }
}

impl RingArith for GroupRingArith {
    fn size(&self) -> usize {
        self.size
    }
    fn add(&self, a: Elem, b: Elem) -> Elem {
        let (x, y) = (self.coefficients(a), self.coefficients(b));
        let s: Vec<Elem> = x.iter().zip(&y).map(|(&p, &q)| self.base.add(p, q)).collect();
        self.from_coefficients(&s)
    }
    fn neg(&self, a: Elem) -> Elem {
        let s: Vec<Elem> = self.coefficients(a).iter().map(|&p| self.base.neg(p)).collect();
        self.from_coefficients(&s)
    }
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        let (x, y) = (self.coefficients(a), self.coefficients(b));
        let mut out = vec![0; self.group.order()];
        for (g, &xg) in x.iter().enumerate() {
            if xg == 0 {
                continue;
            }
            for (h, &yh) in y.iter().enumerate() {
                let gh = self.group.mul(g, h);
                out[gh] = self.base.add(out[gh], self.base.mul(xg, yh));
            }
        }
        self.from_coefficients(&out)
    }
    fn one(&self) -> Option<Elem> {
        Some(self.basis(0, self.base.one()?))
    }
    fn describe(&self) -> String {
        format!("group_ring({}, {})", self.base.describe(), self.group_name)
    }
    fn render(&self, a: Elem) -> String {
        let one = self.base.one();
        let mut terms = Vec::new();
        for (h, &c) in self.coefficients(a).iter().enumerate() {
            if c == 0 {
                continue;
            }
            let coef = self.base.render(c);
            terms.push(if h == 0 {
                paren(&coef)
            } else if Some(c) == one {
                quote_label(self.group.label(h))
            } else {
                format!("{}*{}", paren(&coef), quote_label(self.group.label(h)))
            });
        }
        join_terms(terms)
    }
    fn atom(&self, ring: &FiniteRing, name: &str, args: &[Expr]) -> Result<Elem> {
        let one = self.base.one().expect("unital base");
        if args.is_empty() {
            if let Some(h) = self.group.labels().iter().position(|l| l == name) {
                return Ok(self.basis(h, one));
            }
        }
        let expr = if args.is_empty() {
            Expr::Name(name.to_string())
        } else {
            Expr::Call(name.to_string(), args.to_vec())
        };
        self.base
            .eval(&expr)
            .map(|c| self.basis(0, c))
            .map_err(|_| no_atom(ring, name))
    }
    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------- Cayley tables

/// A ring given by explicit addition and multiplication tables over labelled
/// elements; element 0 must be the additive identity.
pub struct CayleyRing {
    labels: Vec<String>,
    add: Vec<usize>,
    neg: Vec<usize>,
    mul: Vec<usize>,
    one: Option<Elem>,
}

/// Largest Cayley-table ring accepted (axioms are checked exhaustively).
pub const CAYLEY_LIMIT: usize = 64;

impl CayleyRing {
    pub fn build(labels: Vec<String>, add: Vec<Vec<usize>>, mul: Vec<Vec<usize>>) -> Result<FiniteRing> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::MalformedInput("Cayley ring with no elements".into()));
        }
        if n > CAYLEY_LIMIT {
            return Err(Error::bound("Cayley table ring", n, CAYLEY_LIMIT));
        }
        let flat = |t: Vec<Vec<usize>>, what: &str| -> Result<Vec<usize>> {
            if t.len() != n || t.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
                return Err(Error::MalformedInput(format!("{what} table must be {n}×{n} with entries < {n}")));
            }
            Ok(t.into_iter().flatten().collect())
        };
        let add = flat(add, "addition")?;
        let mul = flat(mul, "multiplication")?;
        if (0..n).any(|a| add[a] != a || add[a * n] != a) {
            return Err(Error::axiom("additive identity", "element 0 is not the additive identity"));
        }
        if (0..n).any(|a| mul[a] != 0 || mul[a * n] != 0) {
            return Err(Error::axiom("zero product", "0·a or a·0 is nonzero"));
        }
        let mut neg = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| add[a * n + b] == 0) {
                Some(b) => neg.push(b),
                None => return Err(Error::axiom("additive inverse", labels[a].clone())),
            }
        }
        let one = (0..n).find(|&u| (0..n).all(|a| mul[u * n + a] == a && mul[a * n + u] == a));
        let ring = FiniteRing::new(CayleyRing {
            labels,
            add,
            neg,
            mul,
            one,
        });
        ring.check_axioms()?;
        Ok(ring)
    }
}

impl RingArith for CayleyRing {
    fn size(&self) -> usize {
        self.labels.len()
    }
    fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a * self.labels.len() + b]
    }
    fn neg(&self, a: Elem) -> Elem {
        self.neg[a]
    }
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a * self.labels.len() + b]
    }
    fn one(&self) -> Option<Elem> {
        self.one
    }
    fn describe(&self) -> String {
        format!("cayley({})", self.labels.iter().map(|l| quote_label(l)).collect::<Vec<_>>().join(", "))
    }
    fn render(&self, a: Elem) -> String {
        if a == 0 {
            "0".into()
        } else {
            quote_label(&self.labels[a])
        }
    }
    fn atom(&self, ring: &FiniteRing, name: &str, args: &[Expr]) -> Result<Elem> {
        if args.is_empty() {
            if let Some(i) = self.labels.iter().position(|l| l == name) {
                return Ok(i);
            }
        }
        Err(no_atom(ring, name))
    }
    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------- subrings

/// The subring of a parent ring generated by a set of elements. Elements are
/// the parent's elements in increasing order.
pub struct SubringArith {
    parent: FiniteRing,
    elems: Vec<Elem>,
    pos: Vec<u32>,
    one: Option<Elem>,
}

/// Smallest subring containing `seed` (additive closure, then closure under
/// products of generators).
pub fn subring(parent: &FiniteRing, seed: impl IntoIterator<Item = Elem>) -> FiniteRing {
    let mut h = AdditiveSubgroup::closure(parent, seed);
    let mut i = 0;
    while i < h.generators().len() {
        let gens = h.generators().to_vec();
        let x = gens[i];
        for &y in &gens[..=i] {
            for p in [parent.mul(x, y), parent.mul(y, x)] {
                h.insert(p);
            }
        }
        i += 1;
    }
    let elems = h.sorted();
    let mut pos = vec![u32::MAX; parent.size()];
    for (k, &x) in elems.iter().enumerate() {
        pos[x] = k as u32;
    }
    let gens: Vec<Elem> = h.generators().to_vec();
    let one = elems.iter().copied().find(|&u| {
        gens.iter()
            .all(|&g| parent.mul(u, g) == g && parent.mul(g, u) == g)
    });
    FiniteRing::new(SubringArith {
        parent: parent.clone(),
        one: one.map(|u| pos[u] as Elem),
        elems,
        pos,
    })
}

impl SubringArith {
    pub fn parent(&self) -> &FiniteRing {
        &self.parent
    }

    pub fn lift(&self, a: Elem) -> Elem {
        self.elems[a]
    }

    pub fn restrict(&self, x: Elem) -> Option<Elem> {
        match self.pos[x] {
            u32::MAX => None,
            k => Some(k as Elem),
        }
    }

    fn back(&self, x: Elem) -> Elem {
        self.restrict(x).expect("subring is closed")
    }
}

impl RingArith for SubringArith {
    fn size(&self) -> usize {
        self.elems.len()
    }
    fn add(&self, a: Elem, b: Elem) -> Elem {
        self.back(self.parent.add(self.elems[a], self.elems[b]))
    }
    fn neg(&self, a: Elem) -> Elem {
        self.back(self.parent.neg(self.elems[a]))
    }
    fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.back(self.parent.mul(self.elems[a], self.elems[b]))
    }
    fn one(&self) -> Option<Elem> {
        self.one
    }
    fn describe(&self) -> String {
        format!("subring of {} with {} elements", self.parent.describe(), self.elems.len())
    }
    fn render(&self, a: Elem) -> String {
        self.parent.render(self.elems[a])
    }
    fn atom(&self, ring: &FiniteRing, name: &str, _args: &[Expr]) -> Result<Elem> {
        Err(no_atom(ring, name))
    }
    fn eval_whole(&self, expr: &Expr) -> Option<Result<Elem>> {
        // integer literals mean multiples of the subring's own identity
        if let Some(k) = expr.as_int() {
            if k == 0 {
                return Some(Ok(0));
            }
            return Some(match self.one {
                Some(u) => {
                    let x = self.parent.smul(k, self.elems[u]);
                    Ok(self.back(x))
                }
                None => Err(Error::MalformedInput(format!(
                    "integer literal {k} used in a non-unital subring"
                ))),
            });
        }
        Some(self.parent.eval(expr).and_then(|x| {
            self.restrict(x).ok_or_else(|| {
                Error::MalformedInput(format!("`{expr}` does not lie in the subring"))
            })
        }))
    }
    fn as_any(&self) -> &dyn Any {
        self
    }
}

// ---------------------------------------------------------------- grammar

/// Parses `C(n)`, `S(k)` or `trivial`; returns the group and its canonical name.
pub fn parse_group(src: &str) -> Result<(FiniteGroup, String)> {
    group_from_expr(&parse_expr(src)?)
}

fn group_from_expr(e: &Expr) -> Result<(FiniteGroup, String)> {
    let bad = || Error::MalformedInput(format!("unknown group `{e}` (use C(n) or S(k))"));
    match e {
        Expr::Call(name, args) if args.len() == 1 => {
            let k = int_arg(&args[0], "group parameter")?;
            match name.as_str() {
                "C" if (1..=64).contains(&k) => Ok((FiniteGroup::cyclic(k as usize), format!("C({k})"))),
                "S" if (1..=4).contains(&k) => Ok((FiniteGroup::symmetric(k as usize), format!("S({k})"))),
                _ => Err(bad()),
            }
        }
        Expr::Name(n) if n == "trivial" => Ok((FiniteGroup::trivial(), "C(1)".into())),
        _ => Err(bad()),
    }
}

fn shorthand(name: &str) -> Option<Result<FiniteRing>> {
    let digits = |prefix: &str| {
        name.strip_prefix(prefix)
            .filter(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit()))
            .and_then(|d| d.parse::<usize>().ok())
    };
    if let Some(q) = digits("GF") {
        return Some(galois(q));
    }
    if let Some(p) = digits("F") {
        return Some(if is_prime(p) {
            galois(p)
        } else {
            Err(Error::MalformedInput(format!("F{p}: {p} is not prime")))
        });
    }
    if let Some(n) = digits("Z") {
        return Some(if (1..=MAX_CARRIER).contains(&n) {
            Ok(cyclic(n))
        } else {
            Err(Error::MalformedInput(format!("Z{n} is out of range")))
        });
    }
    None
}

/// Builds a ring from a constructor expression such as `M(2, F2)`,
/// `sum(F2, Z(4))`, `GF(4)` or `group_ring(F2, C(2))`.
pub fn ring_from_expr(e: &Expr) -> Result<FiniteRing> {
    let bad = |msg: &str| Error::MalformedInput(format!("{msg}: `{e}`"));
    match e {
        Expr::Name(n) => shorthand(n).unwrap_or_else(|| Err(bad("unknown ring"))),
        Expr::Call(name, args) => match (name.as_str(), args.as_slice()) {
            ("Z", [n]) => {
                let n = int_arg(n, "modulus")?;
                if n < 1 || n as usize > MAX_CARRIER {
                    return Err(bad("modulus out of range"));
                }
                Ok(cyclic(n as usize))
            }
            ("F", [p]) => {
                let p = int_arg(p, "characteristic")?;
                if p < 2 || !is_prime(p as usize) {
                    return Err(bad("F(p) needs a prime"));
                }
                galois(p as usize)
            }
            ("GF", [q]) => {
                let q = int_arg(q, "field size")?;
                if q < 2 {
                    return Err(bad("field size"));
                }
                galois(q as usize)
            }
            ("M", [n, r]) => {
                let n = int_arg(n, "matrix size")?;
                if n < 1 {
                    return Err(bad("matrix size"));
                }
                matrix(n as usize, &ring_from_expr(r)?)
            }
            ("sum", parts) if !parts.is_empty() => {
                let rings = parts.iter().map(ring_from_expr).collect::<Result<Vec<_>>>()?;
                direct_sum(&rings, None)
            }
            ("group_ring", [r, g]) => {
                let (group, gname) = group_from_expr(g)?;
                group_ring(&ring_from_expr(r)?, &group, &gname)
            }
            _ => Err(bad("unknown ring constructor")),
        },
        _ => Err(bad("not a ring constructor")),
    }
}

pub fn parse_ring(src: &str) -> Result<FiniteRing> {
    ring_from_expr(&parse_expr(src)?)
}
