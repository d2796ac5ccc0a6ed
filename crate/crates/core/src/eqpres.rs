//! Classical algebraic theories: operator domains, terms, interpretation,
//! satisfaction, the provability congruence, finite model enumeration and
//! the operator-domain structure functor.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::setval::SetDiagram;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EqError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("arity mismatch: {0}")]
    ArityMismatch(String),
    #[error("{0}")]
    Invalid(String),
}

/// Finitely many operation symbols, each with a bounded natural arity.
/// The canonical symbol order is by (arity, name).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorDomain {
    symbols: Vec<(String, usize)>,
}

impl OperatorDomain {
    pub fn new(mut symbols: Vec<(String, usize)>) -> Result<Self, EqError> {
        symbols.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        for w in symbols.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(EqError::Invalid(format!("duplicate symbol `{}`", w[0].0)));
            }
        }
        Ok(OperatorDomain { symbols })
    }

    pub fn empty() -> Self {
        OperatorDomain { symbols: vec![] }
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn arity(&self, sym: usize) -> usize {
        self.symbols[sym].1
    }

    pub fn name(&self, sym: usize) -> &str {
        &self.symbols[sym].0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|(n, _)| n == name)
    }

    pub fn symbols_of_arity(&self, n: usize) -> Vec<usize> {
        (0..self.symbols.len())
            .filter(|&s| self.symbols[s].1 == n)
            .collect()
    }
}

/// A term over an operator domain, in tree form with variables `x1..xn`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    App(usize, Vec<Term>),
}

impl Term {
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn display(&self, dom: &OperatorDomain) -> String {
        match self {
            Term::Var(i) => format!("x{}", i + 1),
            Term::App(s, args) => {
                if args.is_empty() {
                    dom.name(*s).to_string()
                } else {
                    let parts: Vec<String> = args.iter().map(|t| t.display(dom)).collect();
                    format!("{}({})", dom.name(*s), parts.join(","))
                }
            }
        }
    }

    /// Substitute `subs[i]` for `x_{i+1}`.
    pub fn substitute(&self, subs: &[Term]) -> Term {
        match self {
            Term::Var(i) => subs[*i].clone(),
            Term::App(s, args) => Term::App(*s, args.iter().map(|t| t.substitute(subs)).collect()),
        }
    }

    /// Canonical term order: by depth, then symbol/variable index, then
    /// children.
    fn key(&self) -> (usize, usize, usize, Vec<(usize, usize, usize)>) {
        match self {
            Term::Var(i) => (0, 0, *i, vec![]),
            Term::App(s, args) => (
                self.depth(),
                1 + s,
                0,
                args.iter()
                    .map(|t| {
                        let k = t.key();
                        (k.0, k.1, k.2)
                    })
                    .collect(),
            ),
        }
    }
}

/// All terms of arity `n` with depth at most `depth_bound`, exhaustively
/// and in canonical order.
pub fn generate_terms(dom: &OperatorDomain, n: usize, depth_bound: usize) -> Vec<Term> {
    let mut by_depth: Vec<Vec<Term>> = Vec::with_capacity(depth_bound + 1);
    let vars: Vec<Term> = (0..n).map(Term::Var).collect();
    by_depth.push(vars);
    for d in 1..=depth_bound {
        // terms of depth exactly d: an application whose arguments have
        // depth < d, at least one of depth d-1
        let smaller: Vec<Term> = by_depth.iter().flatten().cloned().collect();
        let mut level = Vec::new();
        for s in 0..dom.symbols().len() {
            let k = dom.arity(s);
            let mut idx = vec![0usize; k];
            if k == 0 {
                if d == 1 {
                    level.push(Term::App(s, vec![]));
                }
                continue;
            }
            if smaller.is_empty() {
                continue;
            }
            loop {
                let args: Vec<Term> = idx.iter().map(|&i| smaller[i].clone()).collect();
                if args.iter().map(Term::depth).max().unwrap() == d - 1 {
                    level.push(Term::App(s, args));
                }
                let mut c = k;
                let done = loop {
                    if c == 0 {
                        break true;
                    }
                    c -= 1;
                    idx[c] += 1;
                    if idx[c] < smaller.len() {
                        break false;
                    }
                    idx[c] = 0;
                };
                if done {
                    break;
                }
            }
        }
        by_depth.push(level);
    }
    let mut out: Vec<Term> = by_depth.into_iter().flatten().collect();
    out.sort_by(|a, b| a.key().cmp(&b.key()));
    out.dedup();
    out
}

/// A presentation: an operator domain plus same-arity equations.
#[derive(Debug, Clone, PartialEq)]
pub struct Presentation {
    pub domain: OperatorDomain,
    /// equations (lhs, rhs, arity)
    pub equations: Vec<(Term, Term, usize)>,
}

impl Presentation {
    pub fn new(
        domain: OperatorDomain,
        equations: Vec<(Term, Term, usize)>,
    ) -> Result<Self, EqError> {
        for (l, r, n) in &equations {
            for t in [l, r] {
                check_arity(t, *n)?;
            }
        }
        Ok(Presentation { domain, equations })
    }

    /// The group presentation: symbols e/0, i/1, m/2 with the four group
    /// axioms.
    pub fn group_theory() -> Presentation {
        let dom =
            OperatorDomain::new(vec![("e".into(), 0), ("i".into(), 1), ("m".into(), 2)]).unwrap();
        let e = dom.index_of("e").unwrap();
        let i = dom.index_of("i").unwrap();
        let m = dom.index_of("m").unwrap();
        let x1 = Term::Var(0);
        let x2 = Term::Var(1);
        let x3 = Term::Var(2);
        let eq = |l: Term, r: Term, n: usize| (l, r, n);
        let equations = vec![
            eq(
                Term::App(
                    m,
                    vec![x1.clone(), Term::App(m, vec![x2.clone(), x3.clone()])],
                ),
                Term::App(
                    m,
                    vec![Term::App(m, vec![x1.clone(), x2.clone()]), x3.clone()],
                ),
                3,
            ),
            eq(
                Term::App(m, vec![Term::App(e, vec![]), x1.clone()]),
                x1.clone(),
                1,
            ),
            eq(
                Term::App(m, vec![x1.clone(), Term::App(e, vec![])]),
                x1.clone(),
                1,
            ),
            eq(
                Term::App(m, vec![x1.clone(), Term::App(i, vec![x1.clone()])]),
                Term::App(e, vec![]),
                1,
            ),
        ];
        Presentation::new(dom, equations).unwrap()
    }
}

fn check_arity(t: &Term, n: usize) -> Result<(), EqError> {
    match t {
        Term::Var(i) => {
            if *i >= n {
                Err(EqError::ArityMismatch(format!(
                    "variable x{} out of arity {n}",
                    i + 1
                )))
            } else {
                Ok(())
            }
        }
        Term::App(_, args) => args.iter().try_for_each(|a| check_arity(a, n)),
    }
}

/// A finite structure for an operator domain: a carrier `{0..size-1}` and
/// one interpretation table per symbol (indexed by argument tuples in
/// lexicographic order).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OmegaModel {
    pub size: usize,
    pub tables: Vec<Vec<usize>>,
}

impl OmegaModel {
    fn table_index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.size + a)
    }

    pub fn apply(&self, sym: usize, args: &[usize]) -> usize {
        self.tables[sym][self.table_index(args)]
    }
}

/// Interpret a term as a total function `X^n -> X`, tabulated over
/// argument tuples in lexicographic order.
pub fn interpret_term(t: &Term, model: &OmegaModel, n: usize) -> Result<Vec<usize>, EqError> {
    let count = model.size.checked_pow(n as u32).unwrap_or(0);
    let mut out = Vec::with_capacity(count);
    let mut tuple = vec![0usize; n];
    if model.size == 0 {
        return Ok(if n == 0 {
            eval_once(t, model, &[])?
        } else {
            vec![]
        });
    }
    loop {
        out.extend(eval_once(t, model, &tuple)?);
        let mut k = n;
        let done = loop {
            if k == 0 {
                break true;
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < model.size {
                break false;
            }
            tuple[k] = 0;
        };
        if done || n == 0 {
            break;
        }
    }
    Ok(out)
}

fn eval_once(t: &Term, model: &OmegaModel, tuple: &[usize]) -> Result<Vec<usize>, EqError> {
    Ok(vec![eval(t, model, tuple)?])
}

pub fn eval(t: &Term, model: &OmegaModel, tuple: &[usize]) -> Result<usize, EqError> {
    match t {
        Term::Var(i) => tuple
            .get(*i)
            .copied()
            .ok_or_else(|| EqError::ArityMismatch(format!("x{}", i + 1))),
        Term::App(s, args) => {
            if *s >= model.tables.len() {
                return Err(EqError::UnknownSymbol(format!("#{s}")));
            }
            let vals: Result<Vec<usize>, EqError> =
                args.iter().map(|a| eval(a, model, tuple)).collect();
            Ok(model.apply(*s, &vals?))
        }
    }
}

/// Does the model satisfy the equation (as equality of interpretation
/// tables)?
pub fn satisfies(model: &OmegaModel, lhs: &Term, rhs: &Term, n: usize) -> Result<bool, EqError> {
    Ok(interpret_term(lhs, model, n)? == interpret_term(rhs, model, n)?)
}

/// Exhaustively enumerate the models of a presentation on the canonical
/// carrier of a given size.
pub fn enumerate_omega_models(p: &Presentation, size: usize) -> Vec<OmegaModel> {
    let dom = &p.domain;
    let table_sizes: Vec<usize> = (0..dom.symbols().len())
        .map(|s| size.pow(dom.arity(s) as u32))
        .collect();
    let mut out = Vec::new();
    // iterate over all joint tables in lexicographic order
    let total: usize = table_sizes.iter().sum();
    if size == 0 {
        if table_sizes.iter().all(|&t| t == 0) {
            let model = OmegaModel {
                size,
                tables: table_sizes.iter().map(|_| vec![]).collect(),
            };
            let ok = p
                .equations
                .iter()
                .all(|(l, r, n)| satisfies(&model, l, r, *n).unwrap_or(false));
            if ok {
                out.push(model);
            }
        }
        return out;
    }
    let mut flat = vec![0usize; total];
    loop {
        // split into tables
        let mut tables = Vec::with_capacity(table_sizes.len());
        let mut off = 0;
        for &ts in &table_sizes {
            tables.push(flat[off..off + ts].to_vec());
            off += ts;
        }
        let model = OmegaModel { size, tables };
        let ok = p
            .equations
            .iter()
            .all(|(l, r, n)| satisfies(&model, l, r, *n).unwrap_or(false));
        if ok {
            out.push(model);
        }
        let mut k = total;
        let done = loop {
            if k == 0 {
                break true;
            }
            k -= 1;
            flat[k] += 1;
            if flat[k] < size {
                break false;
            }
            flat[k] = 0;
        };
        if done || total == 0 {
            break;
        }
    }
    out
}

/// All homomorphisms between two structures over the same domain.
pub fn model_homomorphisms(
    dom: &OperatorDomain,
    a: &OmegaModel,
    b: &OmegaModel,
) -> Vec<Vec<usize>> {
    if a.size == 0 {
        return vec![vec![]];
    }
    if b.size == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    let mut h = vec![0usize; a.size];
    loop {
        let ok = (0..dom.symbols().len()).all(|s| {
            let k = dom.arity(s);
            let mut args = vec![0usize; k];
            loop {
                let img: Vec<usize> = args.iter().map(|&x| h[x]).collect();
                if h[a.apply(s, &args)] != b.apply(s, &img) {
                    return false;
                }
                let mut c = k;
                let done = loop {
                    if c == 0 {
                        break true;
                    }
                    c -= 1;
                    args[c] += 1;
                    if args[c] < a.size {
                        break false;
                    }
                    args[c] = 0;
                };
                if done {
                    return true;
                }
            }
        });
        if ok {
            out.push(h.clone());
        }
        let mut k = a.size;
        let done = loop {
            if k == 0 {
                break true;
            }
            k -= 1;
            h[k] += 1;
            if h[k] < b.size {
                break false;
            }
            h[k] = 0;
        };
        if done {
            break;
        }
    }
    out
}

/// The provability congruence on bounded terms: the partition of
/// `generate_terms(dom, n, depth_bound)` under the smallest congruence
/// containing the axioms, closed under substitution on both sides,
/// restricted to terms inside the depth bound.
pub struct CongruenceClosure {
    pub terms: Vec<Term>,
    /// class representative index per term
    pub class: Vec<usize>,
}

impl CongruenceClosure {
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &c) in self.class.iter().enumerate() {
            map.entry(c).or_default().push(i);
        }
        map.into_values().collect()
    }

    pub fn same_class(&self, i: usize, j: usize) -> bool {
        self.class[i] == self.class[j]
    }
}

pub fn congruence_closure(p: &Presentation, n: usize, depth_bound: usize) -> CongruenceClosure {
    let terms = generate_terms(&p.domain, n, depth_bound);
    let index: BTreeMap<Term, usize> = terms
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect();
    let mut parent: Vec<usize> = (0..terms.len()).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let union = |parent: &mut Vec<usize>, a: usize, b: usize| -> bool {
        let (ra, rb) = (find(parent, a), find(parent, b));
        if ra == rb {
            false
        } else {
            parent[ra.max(rb)] = ra.min(rb);
            true
        }
    };
    // substitution tuples: for an equation of arity k, substitute terms of
    // the ambient arity n so both sides stay within the depth bound
    let all_subs = |k: usize| -> Vec<Vec<Term>> {
        let mut out = vec![vec![]];
        for _ in 0..k {
            let mut next = Vec::new();
            for pre in &out {
                for t in &terms {
                    let mut v: Vec<Term> = pre.clone();
                    v.push(t.clone());
                    next.push(v);
                }
            }
            out = next;
        }
        out
    };
    loop {
        let mut changed = false;
        // axiom instances under substitution (rules (ii) + (iii))
        for (l, r, k) in &p.equations {
            for subs in all_subs(*k) {
                let li = l.substitute(&subs);
                let ri = r.substitute(&subs);
                if li.depth() <= depth_bound && ri.depth() <= depth_bound {
                    if let (Some(&a), Some(&b)) = (index.get(&li), index.get(&ri)) {
                        changed |= union(&mut parent, a, b);
                    }
                }
            }
        }
        // congruence (rule (iv)): same symbol applied to classwise-equal
        // argument tuples
        for (i, ti) in terms.iter().enumerate() {
            for (j, tj) in terms.iter().enumerate().skip(i + 1) {
                if find(&mut parent, i) == find(&mut parent, j) {
                    continue;
                }
                if let (Term::App(s1, a1), Term::App(s2, a2)) = (ti, tj) {
                    if s1 == s2 && a1.len() == a2.len() {
                        let all_eq =
                            a1.iter()
                                .zip(a2)
                                .all(|(x, y)| match (index.get(x), index.get(y)) {
                                    (Some(&xi), Some(&yi)) => {
                                        find(&mut parent, xi) == find(&mut parent, yi)
                                    }
                                    _ => false,
                                });
                        if all_eq {
                            changed |= union(&mut parent, i, j);
                        }
                    }
                }
            }
        }
        // substitution instances of derived pairs are covered: a derived
        // pair is either an axiom instance (whose further substitution is
        // again an axiom instance, since substitutions compose) or a
        // congruence step (whose substitution follows by congruence on
        // the substituted children), so the two rules above saturate
        if !changed {
            break;
        }
    }
    let class: Vec<usize> = (0..terms.len()).map(|i| find(&mut parent, i)).collect();
    CongruenceClosure { terms, class }
}

/// Soundness report: every provable equality must hold semantically in
/// every enumerated model, while semantic equalities not yet provable at
/// this depth are reported as evidence only.
#[derive(Debug, Clone, Default)]
pub struct SoundnessReport {
    /// provable pairs that fail in some model (must be empty)
    pub violations: Vec<(String, String)>,
    /// semantically equal pairs not provable at this depth (evidence only)
    pub unproved_semantic: Vec<(String, String)>,
    pub provable_pairs: usize,
}

pub fn soundness_check(
    p: &Presentation,
    n: usize,
    depth_bound: usize,
    carrier_bound: usize,
) -> SoundnessReport {
    let closure = congruence_closure(p, n, depth_bound);
    let mut models = Vec::new();
    for size in 0..=carrier_bound {
        models.extend(enumerate_omega_models(p, size));
    }
    let interps: Vec<Vec<Vec<usize>>> = closure
        .terms
        .iter()
        .map(|t| {
            models
                .iter()
                .map(|m| interpret_term(t, m, n).expect("term interprets"))
                .collect()
        })
        .collect();
    let mut report = SoundnessReport::default();
    for i in 0..closure.terms.len() {
        for j in (i + 1)..closure.terms.len() {
            let semantically_equal = interps[i] == interps[j];
            if closure.same_class(i, j) {
                report.provable_pairs += 1;
                if !semantically_equal {
                    report.violations.push((
                        closure.terms[i].display(&p.domain),
                        closure.terms[j].display(&p.domain),
                    ));
                }
            } else if semantically_equal {
                report.unproved_semantic.push((
                    closure.terms[i].display(&p.domain),
                    closure.terms[j].display(&p.domain),
                ));
            }
        }
    }
    report
}

/// The operator-domain structure of a set-valued functor: the n-ary
/// symbols are the natural transformations `U^n -> U`, and each fibre
/// carries the tautological model structure.
pub struct Str0Result {
    pub domain: OperatorDomain,
    /// per symbol: the natural family (component per diagram object)
    pub families: Vec<crate::setval::SetNat>,
    /// tautological models, one per diagram object
    pub tautological: Vec<OmegaModel>,
}

pub fn str0(u: &SetDiagram, arity_bound: usize) -> Str0Result {
    let mut symbols = Vec::new();
    let mut families = Vec::new();
    for n in 0..=arity_bound {
        let pow = u.power(n);
        let nats = crate::setval::set_nat_transformations(&pow, u);
        for (k, nat) in nats.into_iter().enumerate() {
            symbols.push((format!("g{n}_{k}"), n));
            families.push(nat);
        }
    }
    let domain = OperatorDomain::new(symbols.clone()).expect("fresh symbol names");
    // reorder families to match the canonical symbol order
    let families: Vec<crate::setval::SetNat> = domain
        .symbols()
        .iter()
        .map(|(name, _)| {
            let pos = symbols.iter().position(|(n, _)| n == name).unwrap();
            families[pos].clone()
        })
        .collect();
    // tautological model on each fibre: delta_gamma = gamma_m
    let tautological: Vec<OmegaModel> = u
        .dom()
        .objects()
        .map(|m| {
            let size = u.ob(m).size();
            let tables: Vec<Vec<usize>> = domain
                .symbols()
                .iter()
                .enumerate()
                .map(|(s, (_, arity))| {
                    let comp = &families[s][m];
                    // reindex from tuple-name order to lexicographic order
                    let pow = u.power(*arity);
                    let src = pow.ob(m);
                    let mut table = vec![0usize; src.size()];
                    let mut tuple = vec![0usize; *arity];
                    if size == 0 {
                        return table;
                    }
                    loop {
                        let name = format!(
                            "({})",
                            tuple
                                .iter()
                                .map(|&i| u.ob(m).name(i).to_string())
                                .collect::<Vec<_>>()
                                .join(",")
                        );
                        let pos = src.index_of(&name).expect("tuple element");
                        let lex: usize = tuple.iter().fold(0, |acc, &v| acc * size + v);
                        table[lex] = comp.apply(pos);
                        let mut c = *arity;
                        let done = loop {
                            if c == 0 {
                                break true;
                            }
                            c -= 1;
                            tuple[c] += 1;
                            if tuple[c] < size {
                                break false;
                            }
                            tuple[c] = 0;
                        };
                        if done {
                            break;
                        }
                    }
                    table
                })
                .collect();
            OmegaModel { size, tables }
        })
        .collect();
    Str0Result {
        domain,
        families,
        tautological,
    }
}

/// Check the unit of the operator-domain adjunction: every morphism of
/// the diagram is a homomorphism between the tautological models.
pub fn str0_unit_check(u: &SetDiagram, res: &Str0Result) -> bool {
    u.dom().mors().all(|mm| {
        let (x, y) = (u.dom().src(mm), u.dom().dst(mm));
        let h: Vec<usize> = u.mor(mm).map().to_vec();
        let dom = &res.domain;
        (0..dom.symbols().len()).all(|s| {
            let k = dom.arity(s);
            let a = &res.tautological[x];
            let b = &res.tautological[y];
            if a.size == 0 {
                return true;
            }
            let mut args = vec![0usize; k];
            loop {
                let img: Vec<usize> = args.iter().map(|&v| h[v]).collect();
                if h[a.apply(s, &args)] != b.apply(s, &img) {
                    return false;
                }
                let mut c = k;
                let done = loop {
                    if c == 0 {
                        break true;
                    }
                    c -= 1;
                    args[c] += 1;
                    if args[c] < a.size {
                        break false;
                    }
                    args[c] = 0;
                };
                if done {
                    return true;
                }
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_binary() -> OperatorDomain {
        OperatorDomain::new(vec![("m".into(), 2)]).unwrap()
    }

    #[test]
    fn term_counts() {
        // one binary m, n = 2, depth <= 1: x1, x2 and four applications
        let dom = one_binary();
        assert_eq!(generate_terms(&dom, 2, 1).len(), 6);
        // empty domain, n = 3: exactly the variables
        assert_eq!(generate_terms(&OperatorDomain::empty(), 3, 2).len(), 3);
        // depth 0: variables only
        assert_eq!(generate_terms(&dom, 2, 0).len(), 2);
    }

    #[test]
    fn interpret_variable_is_projection() {
        let model = OmegaModel {
            size: 3,
            tables: vec![],
        };
        let t = Term::Var(1);
        let table = interpret_term(&t, &model, 2).unwrap();
        // projection onto the second coordinate
        let expected: Vec<usize> = (0..9).map(|i| i % 3).collect();
        assert_eq!(table, expected);
    }

    #[test]
    fn z2_addition_satisfies_commutativity() {
        let dom = one_binary();
        let m = 0;
        let z2 = OmegaModel {
            size: 2,
            tables: vec![vec![0, 1, 1, 0]],
        };
        let lhs = Term::App(m, vec![Term::Var(0), Term::Var(1)]);
        let rhs = Term::App(m, vec![Term::Var(1), Term::Var(0)]);
        assert!(satisfies(&z2, &lhs, &rhs, 2).unwrap());
        // m(x1, x1) is constant 0 in (Z/2, +)
        let sq = Term::App(m, vec![Term::Var(0), Term::Var(0)]);
        assert_eq!(interpret_term(&sq, &z2, 1).unwrap(), vec![0, 0]);
        // left projection magma is not commutative
        let proj = OmegaModel {
            size: 2,
            tables: vec![vec![0, 0, 1, 1]],
        };
        assert!(!satisfies(&proj, &lhs, &rhs, 2).unwrap());
    }

    #[test]
    fn group_models_on_small_carriers() {
        let p = Presentation::group_theory();
        assert_eq!(enumerate_omega_models(&p, 1).len(), 1);
        assert_eq!(enumerate_omega_models(&p, 2).len(), 2);
    }

    #[test]
    fn group_homs_between_two_element_groups() {
        let p = Presentation::group_theory();
        let models = enumerate_omega_models(&p, 2);
        assert_eq!(models.len(), 2);
        let homs = model_homomorphisms(&p.domain, &models[0], &models[1]);
        assert_eq!(homs.len(), 2);
        // identity always included for endo-homs
        let endo = model_homomorphisms(&p.domain, &models[0], &models[0]);
        assert!(endo.contains(&vec![0, 1]));
    }

    #[test]
    fn no_homs_into_empty() {
        let dom = OperatorDomain::empty();
        let a = OmegaModel {
            size: 1,
            tables: vec![],
        };
        let b = OmegaModel {
            size: 0,
            tables: vec![],
        };
        assert_eq!(model_homomorphisms(&dom, &a, &b).len(), 0);
        assert_eq!(model_homomorphisms(&dom, &b, &a).len(), 1);
    }

    #[test]
    fn involution_closure() {
        // one unary u with u(u(x1)) = x1: at depth <= 4 the classes are the
        // even and odd powers
        let dom = OperatorDomain::new(vec![("u".into(), 1)]).unwrap();
        let u = 0;
        let lhs = Term::App(u, vec![Term::App(u, vec![Term::Var(0)])]);
        let p = Presentation::new(dom, vec![(lhs, Term::Var(0), 1)]).unwrap();
        let closure = congruence_closure(&p, 1, 4);
        assert_eq!(closure.terms.len(), 5);
        assert_eq!(closure.classes().len(), 2);
    }

    #[test]
    fn idempotent_law_merges() {
        let dom = one_binary();
        let m = 0;
        let lhs = Term::App(m, vec![Term::Var(0), Term::Var(0)]);
        let p = Presentation::new(dom, vec![(lhs.clone(), Term::Var(0), 1)]).unwrap();
        let closure = congruence_closure(&p, 1, 1);
        let i = closure.terms.iter().position(|t| *t == lhs).unwrap();
        let j = closure
            .terms
            .iter()
            .position(|t| *t == Term::Var(0))
            .unwrap();
        assert!(closure.same_class(i, j));
    }

    #[test]
    fn no_equations_discrete_partition() {
        let dom = one_binary();
        let p = Presentation::new(dom, vec![]).unwrap();
        let closure = congruence_closure(&p, 2, 1);
        assert_eq!(closure.classes().len(), closure.terms.len());
    }

    #[test]
    fn soundness_of_involution_theory() {
        let dom = OperatorDomain::new(vec![("u".into(), 1)]).unwrap();
        let u = 0;
        let lhs = Term::App(u, vec![Term::App(u, vec![Term::Var(0)])]);
        let p = Presentation::new(dom, vec![(lhs, Term::Var(0), 1)]).unwrap();
        let report = soundness_check(&p, 1, 4, 3);
        assert!(report.violations.is_empty());
        assert!(report.provable_pairs > 0);
    }

    #[test]
    fn group_axiom_provable_and_sound() {
        let p = Presentation::group_theory();
        let report = soundness_check(&p, 1, 2, 2);
        assert!(report.violations.is_empty());
    }
}

#[cfg(test)]
mod str0_tests {
    use super::*;
    use crate::fincat::{FinCategory, FinSet, SetFunction};
    use std::sync::Arc;

    #[test]
    fn str0_of_a_two_element_fibre() {
        // M terminal, U picks a 2-element set: the nullary symbols are the
        // two points, the unary symbols the four endofunctions
        let one = Arc::new(FinCategory::terminal());
        let two = FinSet::canonical(2);
        let u = SetDiagram::new(one, vec![two.clone()], vec![SetFunction::identity(&two)]);
        let res = str0(&u, 2);
        assert_eq!(res.domain.symbols_of_arity(0).len(), 2);
        assert_eq!(res.domain.symbols_of_arity(1).len(), 4);
        assert_eq!(res.domain.symbols_of_arity(2).len(), 16);
        assert!(str0_unit_check(&u, &res));
    }

    #[test]
    fn str0_of_empty_diagram_is_singletons() {
        let empty = Arc::new(FinCategory::empty());
        let u = SetDiagram::new(empty, vec![], vec![]);
        let res = str0(&u, 3);
        for n in 0..=3 {
            assert_eq!(res.domain.symbols_of_arity(n).len(), 1);
        }
        assert!(str0_unit_check(&u, &res));
    }

    #[test]
    fn str0_of_z2_forgetful() {
        // the forgetful functor from Z/2-sets of size <= 3 has exactly two
        // natural unary operations
        let z2 = crate::groupsem::FinMonoid::cyclic(2);
        let gsets = crate::groupsem::enumerate_gsets(&z2, 3);
        let (_, diagram) = crate::groupsem::gset_category(&z2, &gsets);
        let res = str0(&diagram, 1);
        assert_eq!(res.domain.symbols_of_arity(1).len(), 2);
        assert!(str0_unit_check(&diagram, &res));
    }
}

#[cfg(test)]
mod inconsistency_tests {
    use super::*;

    #[test]
    fn conflicting_axioms_kill_all_two_element_models() {
        // s(x1) = x1 forces s to be the identity, while s(s(x1)) = e
        // forces every element to equal the constant: no model can have
        // two distinct elements
        let dom = OperatorDomain::new(vec![("e".into(), 0), ("s".into(), 1)]).unwrap();
        let e = dom.index_of("e").unwrap();
        let s_sym = dom.index_of("s").unwrap();
        let p = Presentation::new(
            dom,
            vec![
                (Term::App(s_sym, vec![Term::Var(0)]), Term::Var(0), 1),
                (
                    Term::App(s_sym, vec![Term::App(s_sym, vec![Term::Var(0)])]),
                    Term::App(e, vec![]),
                    1,
                ),
            ],
        )
        .unwrap();
        assert_eq!(enumerate_omega_models(&p, 2).len(), 0);
        assert_eq!(enumerate_omega_models(&p, 1).len(), 1);
    }

    #[test]
    fn constant_axioms_force_identification() {
        // u(x1) = x1 together with u(c) = d forces c = d in every model
        let dom =
            OperatorDomain::new(vec![("c".into(), 0), ("d".into(), 0), ("u".into(), 1)]).unwrap();
        let c = dom.index_of("c").unwrap();
        let d = dom.index_of("d").unwrap();
        let u = dom.index_of("u").unwrap();
        let p = Presentation::new(
            dom,
            vec![
                (Term::App(u, vec![Term::Var(0)]), Term::Var(0), 1),
                (
                    Term::App(u, vec![Term::App(c, vec![])]),
                    Term::App(d, vec![]),
                    0,
                ),
            ],
        )
        .unwrap();
        let models = enumerate_omega_models(&p, 2);
        assert!(!models.is_empty());
        for m in models {
            assert_eq!(m.apply(c, &[]), m.apply(d, &[]));
        }
    }
}
