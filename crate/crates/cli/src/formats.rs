//! Line-oriented text formats with explicit section headers. Composition
//! tables are fully explicit; nothing is inferred.

use std::fmt;
use std::sync::Arc;

use strsem_core::eqpres::{OperatorDomain, Presentation, Term};
use strsem_core::fincat::{CatBuilder, FinCategory, FinFunctor};
use strsem_core::groupsem::FinMonoid;

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

struct Lines<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Lines { items, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let item = self.items.get(self.pos).copied();
        if item.is_some() {
            self.pos += 1;
        }
        item
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    fn expect(&mut self, keyword: &str) -> Result<(usize, &'a str), ParseError> {
        match self.next() {
            Some((n, l)) if l == keyword || l.starts_with(&format!("{keyword} ")) => Ok((n, l)),
            Some((n, l)) => Err(err(n, format!("expected `{keyword}`, found `{l}`"))),
            None => Err(err(0, format!("expected `{keyword}`, found end of file"))),
        }
    }
}

/// Parse a category file:
///
/// ```text
/// CATEGORY name
/// OBJECTS
/// a
/// MORPHISMS
/// f : a -> b
/// IDENTITIES
/// a = id_a
/// COMPOSE
/// g . f = gf
/// END
/// ```
pub fn parse_category(text: &str) -> Result<FinCategory, ParseError> {
    let mut lines = Lines::new(text);
    let (n, header) = lines.expect("CATEGORY")?;
    let name = header
        .strip_prefix("CATEGORY")
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| err(n, "CATEGORY needs a name"))?;
    let mut b = CatBuilder::new(name);
    lines.expect("OBJECTS")?;
    while let Some((_, l)) = lines.peek() {
        if l == "MORPHISMS" {
            break;
        }
        lines.next();
        b.object(l);
    }
    lines.expect("MORPHISMS")?;
    while let Some((n, l)) = lines.peek() {
        if l == "IDENTITIES" {
            break;
        }
        lines.next();
        let (mor, rest) = l
            .split_once(':')
            .ok_or_else(|| err(n, "expected `name : src -> dst`"))?;
        let (src, dst) = rest
            .split_once("->")
            .ok_or_else(|| err(n, "expected `src -> dst`"))?;
        b.mor(mor.trim(), src.trim(), dst.trim());
    }
    lines.expect("IDENTITIES")?;
    while let Some((n, l)) = lines.peek() {
        if l == "COMPOSE" {
            break;
        }
        lines.next();
        let (obj, mor) = l
            .split_once('=')
            .ok_or_else(|| err(n, "expected `object = identity`"))?;
        b.identity(obj.trim(), mor.trim());
    }
    lines.expect("COMPOSE")?;
    while let Some((n, l)) = lines.peek() {
        if l == "END" {
            break;
        }
        lines.next();
        let (pair, result) = l
            .split_once('=')
            .ok_or_else(|| err(n, "expected `g . f = gf`"))?;
        let (g, f) = pair
            .split_once('.')
            .ok_or_else(|| err(n, "expected `g . f`"))?;
        b.composite(g.trim(), f.trim(), result.trim());
    }
    lines.expect("END")?;
    b.build().map_err(|e| err(0, e.to_string()))
}

pub fn render_category(c: &FinCategory) -> String {
    let mut out = String::new();
    out.push_str(&format!("CATEGORY {}\n", c.name()));
    out.push_str("OBJECTS\n");
    for o in c.objects() {
        out.push_str(&format!("{}\n", c.object_name(o)));
    }
    out.push_str("MORPHISMS\n");
    for m in c.mors() {
        out.push_str(&format!(
            "{} : {} -> {}\n",
            c.mor_name(m),
            c.object_name(c.src(m)),
            c.object_name(c.dst(m))
        ));
    }
    out.push_str("IDENTITIES\n");
    for o in c.objects() {
        out.push_str(&format!(
            "{} = {}\n",
            c.object_name(o),
            c.mor_name(c.identity(o))
        ));
    }
    out.push_str("COMPOSE\n");
    for g in c.mors() {
        for f in c.mors() {
            if let Some(gf) = c.try_compose(g, f) {
                out.push_str(&format!(
                    "{} . {} = {}\n",
                    c.mor_name(g),
                    c.mor_name(f),
                    c.mor_name(gf)
                ));
            }
        }
    }
    out.push_str("END\n");
    out
}

/// Parse a functor file against two known categories:
///
/// ```text
/// FUNCTOR name
/// SRC catname
/// DST catname
/// OBJECTS
/// a -> x
/// MORPHISMS
/// f -> g
/// END
/// ```
pub fn parse_functor(
    text: &str,
    lookup: &dyn Fn(&str) -> Option<Arc<FinCategory>>,
) -> Result<FinFunctor, ParseError> {
    let mut lines = Lines::new(text);
    lines.expect("FUNCTOR")?;
    let (n, src_line) = lines.expect("SRC")?;
    let src_name = src_line.strip_prefix("SRC").unwrap().trim();
    let src = lookup(src_name).ok_or_else(|| err(n, format!("unknown category `{src_name}`")))?;
    let (n, dst_line) = lines.expect("DST")?;
    let dst_name = dst_line.strip_prefix("DST").unwrap().trim();
    let dst = lookup(dst_name).ok_or_else(|| err(n, format!("unknown category `{dst_name}`")))?;
    lines.expect("OBJECTS")?;
    let mut on_obj = vec![usize::MAX; src.object_count()];
    while let Some((n, l)) = lines.peek() {
        if l == "MORPHISMS" {
            break;
        }
        lines.next();
        let (a, b) = l
            .split_once("->")
            .ok_or_else(|| err(n, "expected `obj -> obj`"))?;
        let ai = src
            .object_index(a.trim())
            .ok_or_else(|| err(n, format!("unknown source object `{}`", a.trim())))?;
        let bi = dst
            .object_index(b.trim())
            .ok_or_else(|| err(n, format!("unknown target object `{}`", b.trim())))?;
        on_obj[ai] = bi;
    }
    lines.expect("MORPHISMS")?;
    let mut on_mor = vec![usize::MAX; src.mor_count()];
    while let Some((n, l)) = lines.peek() {
        if l == "END" {
            break;
        }
        lines.next();
        let (a, b) = l
            .split_once("->")
            .ok_or_else(|| err(n, "expected `mor -> mor`"))?;
        let ai = src
            .mor_index(a.trim())
            .ok_or_else(|| err(n, format!("unknown source morphism `{}`", a.trim())))?;
        let bi = dst
            .mor_index(b.trim())
            .ok_or_else(|| err(n, format!("unknown target morphism `{}`", b.trim())))?;
        on_mor[ai] = bi;
    }
    lines.expect("END")?;
    if on_obj.iter().any(|&o| o == usize::MAX) {
        return Err(err(0, "object map not total"));
    }
    if on_mor.iter().any(|&m| m == usize::MAX) {
        return Err(err(0, "morphism map not total"));
    }
    let f = FinFunctor::new(src, dst, on_obj, on_mor);
    f.validate().map_err(|e| err(0, e.to_string()))?;
    Ok(f)
}

pub fn render_functor(name: &str, f: &FinFunctor) -> String {
    let mut out = String::new();
    out.push_str(&format!("FUNCTOR {name}\n"));
    out.push_str(&format!("SRC {}\n", f.src().name()));
    out.push_str(&format!("DST {}\n", f.dst().name()));
    out.push_str("OBJECTS\n");
    for o in f.src().objects() {
        out.push_str(&format!(
            "{} -> {}\n",
            f.src().object_name(o),
            f.dst().object_name(f.ob(o))
        ));
    }
    out.push_str("MORPHISMS\n");
    for m in f.src().mors() {
        out.push_str(&format!(
            "{} -> {}\n",
            f.src().mor_name(m),
            f.dst().mor_name(f.mor(m))
        ));
    }
    out.push_str("END\n");
    out
}

/// Parse a monoid file:
///
/// ```text
/// MONOID z2
/// ELEMENTS
/// e
/// g
/// UNIT e
/// TABLE
/// e.e = e
/// ...
/// END
/// ```
pub fn parse_monoid(text: &str) -> Result<FinMonoid, ParseError> {
    let mut lines = Lines::new(text);
    let (n, header) = lines.expect("MONOID")?;
    let name = header
        .strip_prefix("MONOID")
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| err(n, "MONOID needs a name"))?;
    lines.expect("ELEMENTS")?;
    let mut elements: Vec<String> = Vec::new();
    while let Some((_, l)) = lines.peek() {
        if l.starts_with("UNIT") {
            break;
        }
        lines.next();
        elements.push(l.to_string());
    }
    let (n, unit_line) = lines.expect("UNIT")?;
    let unit_name = unit_line.strip_prefix("UNIT").unwrap().trim();
    let unit = elements
        .iter()
        .position(|e| e == unit_name)
        .ok_or_else(|| err(n, format!("unknown unit `{unit_name}`")))?;
    lines.expect("TABLE")?;
    let k = elements.len();
    let mut mul = vec![vec![usize::MAX; k]; k];
    while let Some((n, l)) = lines.peek() {
        if l == "END" {
            break;
        }
        lines.next();
        let (pair, result) = l
            .split_once('=')
            .ok_or_else(|| err(n, "expected `a.b = c`"))?;
        let (a, b) = pair
            .split_once('.')
            .ok_or_else(|| err(n, "expected `a.b`"))?;
        let find = |s: &str| {
            elements
                .iter()
                .position(|e| e == s.trim())
                .ok_or_else(|| err(n, format!("unknown element `{}`", s.trim())))
        };
        mul[find(a)?][find(b)?] = find(result)?;
    }
    lines.expect("END")?;
    if mul.iter().flatten().any(|&v| v == usize::MAX) {
        return Err(err(0, "multiplication table not total"));
    }
    FinMonoid::new(name, elements, unit, mul).map_err(|e| err(0, e.to_string()))
}

pub fn render_monoid(m: &FinMonoid) -> String {
    let mut out = String::new();
    out.push_str(&format!("MONOID {}\n", m.name()));
    out.push_str("ELEMENTS\n");
    for i in 0..m.size() {
        out.push_str(&format!("{}\n", m.element_name(i)));
    }
    out.push_str(&format!("UNIT {}\n", m.element_name(m.unit())));
    out.push_str("TABLE\n");
    for i in 0..m.size() {
        for j in 0..m.size() {
            out.push_str(&format!(
                "{}.{} = {}\n",
                m.element_name(i),
                m.element_name(j),
                m.element_name(m.mul(i, j))
            ));
        }
    }
    out.push_str("END\n");
    out
}

/// Parse a presentation file:
///
/// ```text
/// PRESENTATION groups
/// SYMBOLS
/// e 0
/// i 1
/// m 2
/// EQUATIONS
/// 3 | m(x1,m(x2,x3)) = m(m(x1,x2),x3)
/// END
/// ```
pub fn parse_presentation(text: &str) -> Result<Presentation, ParseError> {
    let mut lines = Lines::new(text);
    lines.expect("PRESENTATION")?;
    lines.expect("SYMBOLS")?;
    let mut symbols: Vec<(String, usize)> = Vec::new();
    while let Some((n, l)) = lines.peek() {
        if l == "EQUATIONS" {
            break;
        }
        lines.next();
        let mut parts = l.split_whitespace();
        let name = parts
            .next()
            .ok_or_else(|| err(n, "expected `symbol arity`"))?;
        let arity: usize = parts
            .next()
            .and_then(|a| a.parse().ok())
            .ok_or_else(|| err(n, "expected a numeric arity"))?;
        symbols.push((name.to_string(), arity));
    }
    let domain = OperatorDomain::new(symbols).map_err(|e| err(0, e.to_string()))?;
    lines.expect("EQUATIONS")?;
    let mut equations = Vec::new();
    while let Some((n, l)) = lines.peek() {
        if l == "END" {
            break;
        }
        lines.next();
        let (arity_part, eq) = l
            .split_once('|')
            .ok_or_else(|| err(n, "expected `arity | lhs = rhs`"))?;
        let arity: usize = arity_part
            .trim()
            .parse()
            .map_err(|_| err(n, "expected a numeric arity"))?;
        let (lhs, rhs) = eq
            .split_once('=')
            .ok_or_else(|| err(n, "expected `lhs = rhs`"))?;
        let lt = parse_term(lhs.trim(), &domain).map_err(|m| err(n, m))?;
        let rt = parse_term(rhs.trim(), &domain).map_err(|m| err(n, m))?;
        equations.push((lt, rt, arity));
    }
    lines.expect("END")?;
    Presentation::new(domain, equations).map_err(|e| err(0, e.to_string()))
}

/// Terms in prefix notation: `x3`, `e`, `m(x1,i(x2))`.
pub fn parse_term(s: &str, dom: &OperatorDomain) -> Result<Term, String> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix('x') {
        if let Ok(i) = rest.parse::<usize>() {
            if i == 0 {
                return Err("variables are numbered from x1".into());
            }
            return Ok(Term::Var(i - 1));
        }
    }
    let (head, args) = match s.find('(') {
        Some(p) => {
            if !s.ends_with(')') {
                return Err(format!("unbalanced parentheses in `{s}`"));
            }
            (&s[..p], split_args(&s[p + 1..s.len() - 1])?)
        }
        None => (s, vec![]),
    };
    let sym = dom
        .index_of(head)
        .ok_or_else(|| format!("unknown symbol `{head}`"))?;
    if dom.arity(sym) != args.len() {
        return Err(format!(
            "symbol `{head}` has arity {}, got {} arguments",
            dom.arity(sym),
            args.len()
        ));
    }
    let parsed: Result<Vec<Term>, String> = args.into_iter().map(|a| parse_term(a, dom)).collect();
    Ok(Term::App(sym, parsed?))
}

fn split_args(s: &str) -> Result<Vec<&str>, String> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    let mut depth = 0usize;
    let mut start = 0usize;
    let mut out = Vec::new();
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| format!("unbalanced parentheses in `{s}`"))?;
            }
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(format!("unbalanced parentheses in `{s}`"));
    }
    out.push(&s[start..]);
    Ok(out)
}

/// Render a topology as open-set lists over named points.
pub fn render_topology(points: &[String], opens: &[u64]) -> String {
    let mut out = String::new();
    for &o in opens {
        let members: Vec<&str> = points
            .iter()
            .enumerate()
            .filter(|(i, _)| o & (1 << i) != 0)
            .map(|(_, p)| p.as_str())
            .collect();
        out.push_str(&format!("{{{}}}\n", members.join(",")));
    }
    out
}

/// Render a proto-theory: the arity category, the theory category and the
/// functor between them.
pub fn render_theory(l: &strsem_core::proth::ProtoTheory) -> String {
    let mut out = String::new();
    out.push_str(&render_category(l.arities()));
    out.push_str(&render_category(l.theory()));
    out.push_str(&render_functor("L", l.l()));
    out
}

/// Render a natural transformation as its component table.
pub fn render_nat(nt: &strsem_core::fincat::NatTransformation) -> String {
    let dom = nt.src().src();
    let cod = nt.src().dst();
    let mut out = String::new();
    out.push_str("NAT\n");
    for o in dom.objects() {
        out.push_str(&format!(
            "{} => {}\n",
            dom.object_name(o),
            cod.mor_name(nt.component(o))
        ));
    }
    out.push_str("END\n");
    out
}

/// Render a model in interpretation-family form: the carrier and one line
/// per interpreted operation.
pub fn render_model(
    l: &strsem_core::proth::ProtoTheory,
    world: &strsem_core::setval::FinSetWorld,
    x: &strsem_core::proth::Model,
) -> String {
    let base = world.cat();
    let theory = l.theory();
    let ld = l.l().ob(x.carrier);
    let mut out = String::new();
    out.push_str(&format!("MODEL carrier={}\n", base.object_name(x.carrier)));
    for b in base.objects() {
        let lb = l.l().ob(b);
        for &lm in theory.hom(ld, lb) {
            out.push_str(&format!(
                "alpha[{}]({}) = {}\n",
                base.object_name(b),
                theory.mor_name(lm),
                base.mor_name(x.alpha_at(l, b, lm))
            ));
        }
    }
    out.push_str("END\n");
    out
}
