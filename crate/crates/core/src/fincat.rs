//! Finite categories, functors, natural transformations, limits of finite
//! set diagrams, comma categories and the bijective-on-objects /
//! full-and-faithful factorisation system.
//!
//! Object and morphism identifiers are strings; all enumeration orders are
//! fixed by lexicographic order on identifiers, so every operation is
//! deterministic.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CatError {
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("unknown identifier `{0}`")]
    Unknown(String),
    #[error("morphism `{mor}` is not composable in `{context}`")]
    NotComposable { mor: String, context: String },
    #[error("functor is not bijective on objects")]
    NotBijectiveOnObjects,
    #[error("functor is not full and faithful: {0}")]
    NotFullFaithful(String),
    #[error("square does not commute")]
    SquareDoesNotCommute,
    #[error("no fill-in exists: {0}")]
    NoFillIn(String),
    #[error("natural transformation is not invertible at `{0}`")]
    NotInvertible(String),
    #[error("{0}")]
    Invalid(String),
}

/// A finite set with canonically ordered, distinct element names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinSet {
    elements: Vec<String>,
}

impl FinSet {
    pub fn new(mut elements: Vec<String>) -> Self {
        elements.sort();
        elements.dedup();
        FinSet { elements }
    }

    /// The canonical carrier `{0, 1, .., n-1}`.
    pub fn canonical(n: usize) -> Self {
        FinSet {
            elements: (0..n).map(|i| i.to_string()).collect(),
        }
    }

    pub fn empty() -> Self {
        FinSet { elements: vec![] }
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.elements
            .binary_search_by(|e| e.as_str().cmp(name))
            .ok()
    }

    /// Cartesian product, with pair elements named `(x,y)`.
    pub fn product(&self, other: &FinSet) -> FinSet {
        let mut elements = Vec::with_capacity(self.size() * other.size());
        for x in &self.elements {
            for y in &other.elements {
                elements.push(format!("({x},{y})"));
            }
        }
        FinSet::new(elements)
    }
}

/// A function between finite sets, stored as an index table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetFunction {
    src: FinSet,
    dst: FinSet,
    map: Vec<usize>,
}

impl SetFunction {
    pub fn new(src: FinSet, dst: FinSet, map: Vec<usize>) -> Self {
        assert_eq!(map.len(), src.size(), "function table must be total");
        assert!(map.iter().all(|&i| i < dst.size()), "value out of range");
        SetFunction { src, dst, map }
    }

    pub fn identity(s: &FinSet) -> Self {
        SetFunction {
            src: s.clone(),
            dst: s.clone(),
            map: (0..s.size()).collect(),
        }
    }

    pub fn constant(src: &FinSet, dst: &FinSet, value: usize) -> Self {
        SetFunction::new(src.clone(), dst.clone(), vec![value; src.size()])
    }

    pub fn src(&self) -> &FinSet {
        &self.src
    }

    pub fn dst(&self) -> &FinSet {
        &self.dst
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &SetFunction) -> SetFunction {
        assert_eq!(first.dst, self.src, "functions not composable");
        SetFunction {
            src: first.src.clone(),
            dst: self.dst.clone(),
            map: first.map.iter().map(|&i| self.map[i]).collect(),
        }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.dst.size()];
        self.map
            .iter()
            .all(|&i| !std::mem::replace(&mut seen[i], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.dst.size()];
        for &i in &self.map {
            seen[i] = true;
        }
        seen.into_iter().all(|b| b)
    }

    pub fn is_bijective(&self) -> bool {
        self.src.size() == self.dst.size() && self.is_injective()
    }

    pub fn inverse(&self) -> Option<SetFunction> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.src.size()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        Some(SetFunction {
            src: self.dst.clone(),
            dst: self.src.clone(),
            map: inv,
        })
    }
}

/// Enumerate all functions `src -> dst` in lexicographic order of their
/// value tables.
pub fn all_functions(src: &FinSet, dst: &FinSet) -> Vec<SetFunction> {
    let n = src.size();
    let m = dst.size();
    if n == 0 {
        return vec![SetFunction::new(src.clone(), dst.clone(), vec![])];
    }
    if m == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    let mut table = vec![0usize; n];
    loop {
        out.push(SetFunction::new(src.clone(), dst.clone(), table.clone()));
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            table[k] += 1;
            if table[k] < m {
                break;
            }
            table[k] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct MorData {
    name: String,
    src: usize,
    dst: usize,
}

/// A finite category: ordered object list, hom tables, identity assignment
/// and an explicit composition table.
#[derive(Debug, Clone, PartialEq)]
pub struct FinCategory {
    name: String,
    objects: Vec<String>,
    mors: Vec<MorData>,
    identities: Vec<usize>,
    homs: Vec<Vec<Vec<usize>>>,
    comp: HashMap<(u32, u32), u32>,
}

impl FinCategory {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn mor_count(&self) -> usize {
        self.mors.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = usize> {
        0..self.objects.len()
    }

    pub fn mors(&self) -> impl Iterator<Item = usize> {
        0..self.mors.len()
    }

    pub fn object_name(&self, o: usize) -> &str {
        &self.objects[o]
    }

    pub fn mor_name(&self, m: usize) -> &str {
        &self.mors[m].name
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.binary_search_by(|s| s.as_str().cmp(name)).ok()
    }

    pub fn mor_index(&self, name: &str) -> Option<usize> {
        self.mors
            .binary_search_by(|m| m.name.as_str().cmp(name))
            .ok()
    }

    pub fn src(&self, m: usize) -> usize {
        self.mors[m].src
    }

    pub fn dst(&self, m: usize) -> usize {
        self.mors[m].dst
    }

    pub fn identity(&self, o: usize) -> usize {
        self.identities[o]
    }

    pub fn hom(&self, src: usize, dst: usize) -> &[usize] {
        &self.homs[src][dst]
    }

    /// `g` after `f`; panics if the pair is not composable (use
    /// `try_compose` on possibly ill-formed data).
    pub fn compose(&self, g: usize, f: usize) -> usize {
        self.try_compose(g, f).unwrap_or_else(|| {
            panic!(
                "no composite {} . {} in {}",
                self.mors[g].name, self.mors[f].name, self.name
            )
        })
    }

    pub fn try_compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp.get(&(g as u32, f as u32)).map(|&c| c as usize)
    }

    pub fn is_iso(&self, m: usize) -> bool {
        self.inverse(m).is_some()
    }

    pub fn inverse(&self, m: usize) -> Option<usize> {
        let (s, d) = (self.src(m), self.dst(m));
        self.hom(d, s).iter().copied().find(|&n| {
            self.try_compose(n, m) == Some(self.identity(s))
                && self.try_compose(m, n) == Some(self.identity(d))
        })
    }

    /// The opposite category. Object and morphism names are kept, so
    /// indices and canonical orders coincide with the original's.
    pub fn opposite(&self) -> FinCategory {
        let mut b = CatBuilder::new(&format!("{}^op", self.name));
        for o in &self.objects {
            b.object(o);
        }
        for m in &self.mors {
            b.mor(&m.name, &self.objects[m.dst], &self.objects[m.src]);
        }
        for (o, &i) in self.identities.iter().enumerate() {
            b.identity(&self.objects[o], &self.mors[i].name);
        }
        for (&(g, f), &c) in &self.comp {
            b.composite(
                &self.mors[f as usize].name,
                &self.mors[g as usize].name,
                &self.mors[c as usize].name,
            );
        }
        b.build().expect("opposite of a valid category is valid")
    }

    pub fn terminal() -> FinCategory {
        let mut b = CatBuilder::new("1");
        b.object("*");
        b.mor("id", "*", "*");
        b.identity("*", "id");
        b.composite("id", "id", "id");
        b.build().unwrap()
    }

    pub fn empty() -> FinCategory {
        CatBuilder::new("0").build().unwrap()
    }

    pub fn discrete(name: &str, objects: &[&str]) -> FinCategory {
        let mut b = CatBuilder::new(name);
        for o in objects {
            b.object(o);
            let id = format!("id_{o}");
            b.mor(&id, o, o);
            b.identity(o, &id);
            b.composite(&id, &id, &id);
        }
        b.build().unwrap()
    }

    /// The walking arrow `a -> b`.
    pub fn walking_arrow() -> FinCategory {
        let mut b = CatBuilder::new("2");
        b.object("a");
        b.object("b");
        b.mor("id_a", "a", "a");
        b.mor("id_b", "b", "b");
        b.mor("f", "a", "b");
        b.identity("a", "id_a");
        b.identity("b", "id_b");
        b.composite("id_a", "id_a", "id_a");
        b.composite("id_b", "id_b", "id_b");
        b.composite("f", "id_a", "f");
        b.composite("id_b", "f", "f");
        b.build().unwrap()
    }

    /// The chain `o0 -> o1 -> ... -> o(n-1)` with all composites.
    pub fn chain(n: usize) -> FinCategory {
        let mut b = CatBuilder::new(&format!("chain{n}"));
        let names: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
        for o in &names {
            b.object(o);
        }
        let arrow = |i: usize, j: usize| {
            if i == j {
                format!("id{i}")
            } else {
                format!("a{i}{j}")
            }
        };
        for i in 0..n {
            for j in i..n {
                b.mor(&arrow(i, j), &names[i], &names[j]);
            }
        }
        for i in 0..n {
            b.identity(&names[i], &arrow(i, i));
        }
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    b.composite(&arrow(j, k), &arrow(i, j), &arrow(i, k));
                }
            }
        }
        b.build().unwrap()
    }

    /// The category of a finite poset: one morphism `x -> y` whenever
    /// `leq(x, y)`. The relation must be reflexive, transitive and
    /// antisymmetric on the given names.
    pub fn poset(name: &str, elements: &[&str], leq: impl Fn(usize, usize) -> bool) -> FinCategory {
        let mut sorted: Vec<&str> = elements.to_vec();
        sorted.sort();
        let mut b = CatBuilder::new(name);
        for e in &sorted {
            b.object(e);
        }
        let pos = |e: &str| sorted.iter().position(|x| *x == e).unwrap();
        let orig: Vec<usize> = sorted
            .iter()
            .map(|e| elements.iter().position(|x| x == e).unwrap())
            .collect();
        let le = |i: usize, j: usize| leq(orig[i], orig[j]);
        let mname = |i: usize, j: usize| format!("{}<={}", sorted[i], sorted[j]);
        for i in 0..sorted.len() {
            for j in 0..sorted.len() {
                if le(i, j) {
                    b.mor(&mname(i, j), sorted[i], sorted[j]);
                }
            }
        }
        for (i, e) in sorted.iter().enumerate() {
            b.identity(e, &mname(i, i));
        }
        for i in 0..sorted.len() {
            for j in 0..sorted.len() {
                if !le(i, j) {
                    continue;
                }
                for k in 0..sorted.len() {
                    if le(j, k) {
                        b.composite(&mname(j, k), &mname(i, j), &mname(i, k));
                    }
                }
            }
        }
        let _ = pos;
        b.build().expect("poset category is well-formed")
    }

    /// A one-object category with endomorphism monoid given by `table`
    /// (`table[i][j]` = index of `e_i . e_j`, `unit` the identity index).
    pub fn one_object(name: &str, n: usize, unit: usize, table: &[Vec<usize>]) -> FinCategory {
        let mut b = CatBuilder::new(name);
        b.object("*");
        let en = |i: usize| format!("e{i}");
        for i in 0..n {
            b.mor(&en(i), "*", "*");
        }
        b.identity("*", &en(unit));
        for i in 0..n {
            for j in 0..n {
                b.composite(&en(i), &en(j), &en(table[i][j]));
            }
        }
        b.build().unwrap()
    }
}

impl fmt::Display for FinCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} objects, {} morphisms)",
            self.name,
            self.objects.len(),
            self.mors.len()
        )
    }
}

/// Builder for `FinCategory`; checks structural well-formedness only, so
/// that `validate_category` has something meaningful to report on.
pub struct CatBuilder {
    name: String,
    objects: Vec<String>,
    mors: Vec<(String, String, String)>,
    identities: Vec<(String, String)>,
    composites: Vec<(String, String, String)>,
}

impl CatBuilder {
    pub fn new(name: &str) -> Self {
        CatBuilder {
            name: name.to_string(),
            objects: vec![],
            mors: vec![],
            identities: vec![],
            composites: vec![],
        }
    }

    pub fn object(&mut self, name: &str) -> &mut Self {
        self.objects.push(name.to_string());
        self
    }

    pub fn mor(&mut self, name: &str, src: &str, dst: &str) -> &mut Self {
        self.mors
            .push((name.to_string(), src.to_string(), dst.to_string()));
        self
    }

    pub fn identity(&mut self, obj: &str, mor: &str) -> &mut Self {
        self.identities.push((obj.to_string(), mor.to_string()));
        self
    }

    /// Record `g . f = gf`.
    pub fn composite(&mut self, g: &str, f: &str, gf: &str) -> &mut Self {
        self.composites
            .push((g.to_string(), f.to_string(), gf.to_string()));
        self
    }

    pub fn build(&self) -> Result<FinCategory, CatError> {
        let mut objects = self.objects.clone();
        objects.sort();
        for w in objects.windows(2) {
            if w[0] == w[1] {
                return Err(CatError::Duplicate(w[0].clone()));
            }
        }
        let obj_ix = |name: &str| -> Result<usize, CatError> {
            objects
                .binary_search_by(|s| s.as_str().cmp(name))
                .map_err(|_| CatError::Unknown(name.to_string()))
        };
        let mut mors: Vec<MorData> = Vec::with_capacity(self.mors.len());
        let mut sorted_mors = self.mors.clone();
        sorted_mors.sort();
        for w in sorted_mors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(CatError::Duplicate(w[0].0.clone()));
            }
        }
        for (name, src, dst) in &sorted_mors {
            mors.push(MorData {
                name: name.clone(),
                src: obj_ix(src)?,
                dst: obj_ix(dst)?,
            });
        }
        let mor_ix = |name: &str| -> Result<usize, CatError> {
            mors.binary_search_by(|m| m.name.as_str().cmp(name))
                .map_err(|_| CatError::Unknown(name.to_string()))
        };
        let mut identities = vec![usize::MAX; objects.len()];
        for (o, m) in &self.identities {
            let oi = obj_ix(o)?;
            let mi = mor_ix(m)?;
            identities[oi] = mi;
        }
        for (o, &i) in identities.iter().enumerate() {
            if i == usize::MAX {
                return Err(CatError::Invalid(format!(
                    "object `{}` has no identity",
                    objects[o]
                )));
            }
        }
        let mut homs = vec![vec![vec![]; objects.len()]; objects.len()];
        for (i, m) in mors.iter().enumerate() {
            homs[m.src][m.dst].push(i);
        }
        let mut comp = HashMap::with_capacity(self.composites.len());
        for (g, f, gf) in &self.composites {
            let gi = mor_ix(g)?;
            let fi = mor_ix(f)?;
            let ci = mor_ix(gf)?;
            comp.insert((gi as u32, fi as u32), ci as u32);
        }
        Ok(FinCategory {
            name: self.name.clone(),
            objects,
            mors,
            identities,
            homs,
            comp,
        })
    }
}

/// Report of violated category laws; empty iff the data is a category.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check identity typing, totality of the composition table on composable
/// pairs, src/dst consistency, unit laws and associativity.
pub fn validate_category(c: &FinCategory) -> ValidationReport {
    let mut v = Vec::new();
    for o in c.objects() {
        let i = c.identity(o);
        if c.src(i) != o || c.dst(i) != o {
            v.push(format!(
                "identity of `{}` is `{}` with wrong endpoints",
                c.object_name(o),
                c.mor_name(i)
            ));
        }
    }
    for g in c.mors() {
        for f in c.mors() {
            let composable = c.dst(f) == c.src(g);
            match c.try_compose(g, f) {
                None if composable => v.push(format!(
                    "missing composite {} . {}",
                    c.mor_name(g),
                    c.mor_name(f)
                )),
                Some(_) if !composable => v.push(format!(
                    "composite defined for non-composable pair {} . {}",
                    c.mor_name(g),
                    c.mor_name(f)
                )),
                Some(gf) if composable => {
                    if c.src(gf) != c.src(f) || c.dst(gf) != c.dst(g) {
                        v.push(format!(
                            "composite {} . {} = {} has wrong endpoints",
                            c.mor_name(g),
                            c.mor_name(f),
                            c.mor_name(gf)
                        ));
                    }
                }
                _ => {}
            }
        }
    }
    for f in c.mors() {
        let ids = c.identity(c.src(f));
        let idd = c.identity(c.dst(f));
        if c.try_compose(f, ids) != Some(f) {
            v.push(format!("{} . id != {0}", c.mor_name(f)));
        }
        if c.try_compose(idd, f) != Some(f) {
            v.push(format!("id . {} != {0}", c.mor_name(f)));
        }
    }
    for h in c.mors() {
        for g in c.mors() {
            if c.src(h) != c.dst(g) {
                continue;
            }
            for f in c.mors() {
                if c.src(g) != c.dst(f) {
                    continue;
                }
                let left = c.try_compose(h, g).and_then(|hg| c.try_compose(hg, f));
                let right = c.try_compose(g, f).and_then(|gf| c.try_compose(h, gf));
                if left != right || left.is_none() {
                    v.push(format!(
                        "associativity fails on ({}, {}, {})",
                        c.mor_name(h),
                        c.mor_name(g),
                        c.mor_name(f)
                    ));
                }
            }
        }
    }
    v.sort();
    v.dedup();
    ValidationReport { violations: v }
}

/// A functor between finite categories, given by total object and morphism
/// tables.
#[derive(Debug, Clone, PartialEq)]
pub struct FinFunctor {
    src: Arc<FinCategory>,
    dst: Arc<FinCategory>,
    on_obj: Vec<usize>,
    on_mor: Vec<usize>,
}

impl FinFunctor {
    pub fn new(
        src: Arc<FinCategory>,
        dst: Arc<FinCategory>,
        on_obj: Vec<usize>,
        on_mor: Vec<usize>,
    ) -> Self {
        assert_eq!(on_obj.len(), src.object_count());
        assert_eq!(on_mor.len(), src.mor_count());
        FinFunctor {
            src,
            dst,
            on_obj,
            on_mor,
        }
    }

    pub fn identity(c: &Arc<FinCategory>) -> Self {
        FinFunctor {
            src: c.clone(),
            dst: c.clone(),
            on_obj: (0..c.object_count()).collect(),
            on_mor: (0..c.mor_count()).collect(),
        }
    }

    pub fn src(&self) -> &Arc<FinCategory> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<FinCategory> {
        &self.dst
    }

    pub fn ob(&self, o: usize) -> usize {
        self.on_obj[o]
    }

    pub fn mor(&self, m: usize) -> usize {
        self.on_mor[m]
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &FinFunctor) -> FinFunctor {
        assert_eq!(*first.dst, *self.src, "functors not composable");
        FinFunctor {
            src: first.src.clone(),
            dst: self.dst.clone(),
            on_obj: first.on_obj.iter().map(|&o| self.on_obj[o]).collect(),
            on_mor: first.on_mor.iter().map(|&m| self.on_mor[m]).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), CatError> {
        for m in self.src.mors() {
            let fm = self.on_mor[m];
            if self.dst.src(fm) != self.on_obj[self.src.src(m)]
                || self.dst.dst(fm) != self.on_obj[self.src.dst(m)]
            {
                return Err(CatError::Invalid(format!(
                    "image of `{}` has wrong endpoints",
                    self.src.mor_name(m)
                )));
            }
        }
        for o in self.src.objects() {
            if self.on_mor[self.src.identity(o)] != self.dst.identity(self.on_obj[o]) {
                return Err(CatError::Invalid(format!(
                    "identity of `{}` not preserved",
                    self.src.object_name(o)
                )));
            }
        }
        for g in self.src.mors() {
            for f in self.src.mors() {
                if let Some(gf) = self.src.try_compose(g, f) {
                    let lhs = self.dst.try_compose(self.on_mor[g], self.on_mor[f]);
                    if lhs != Some(self.on_mor[gf]) {
                        return Err(CatError::Invalid(format!(
                            "composition of `{}` and `{}` not preserved",
                            self.src.mor_name(g),
                            self.src.mor_name(f)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_bijective_on_objects(&self) -> bool {
        let mut seen = vec![false; self.dst.object_count()];
        self.src.object_count() == self.dst.object_count()
            && self
                .on_obj
                .iter()
                .all(|&o| !std::mem::replace(&mut seen[o], true))
    }

    pub fn is_full_and_faithful(&self) -> Result<(), CatError> {
        for x in self.src.objects() {
            for y in self.src.objects() {
                let mut images: Vec<usize> =
                    self.src.hom(x, y).iter().map(|&m| self.on_mor[m]).collect();
                let before = images.len();
                images.sort();
                images.dedup();
                if images.len() != before {
                    return Err(CatError::NotFullFaithful(format!(
                        "not faithful on hom({}, {})",
                        self.src.object_name(x),
                        self.src.object_name(y)
                    )));
                }
                let target = self.dst.hom(self.on_obj[x], self.on_obj[y]);
                if images.len() != target.len() {
                    return Err(CatError::NotFullFaithful(format!(
                        "not full on hom({}, {})",
                        self.src.object_name(x),
                        self.src.object_name(y)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Inverse of the object bijection; only valid for bo functors.
    pub fn object_preimage(&self, o: usize) -> usize {
        self.on_obj
            .iter()
            .position(|&x| x == o)
            .expect("object not in image")
    }
}

/// A natural transformation between parallel functors, as a component
/// table indexed by objects of the domain category.
#[derive(Debug, Clone, PartialEq)]
pub struct NatTransformation {
    src: FinFunctor,
    dst: FinFunctor,
    components: Vec<usize>,
}

impl NatTransformation {
    pub fn new(src: FinFunctor, dst: FinFunctor, components: Vec<usize>) -> Self {
        assert_eq!(*src.src(), *dst.src());
        assert_eq!(*src.dst(), *dst.dst());
        assert_eq!(components.len(), src.src().object_count());
        NatTransformation {
            src,
            dst,
            components,
        }
    }

    pub fn identity(f: &FinFunctor) -> Self {
        let components = f
            .src()
            .objects()
            .map(|o| f.dst().identity(f.ob(o)))
            .collect();
        NatTransformation {
            src: f.clone(),
            dst: f.clone(),
            components,
        }
    }

    pub fn src(&self) -> &FinFunctor {
        &self.src
    }

    pub fn dst(&self) -> &FinFunctor {
        &self.dst
    }

    pub fn component(&self, o: usize) -> usize {
        self.components[o]
    }

    pub fn components(&self) -> &[usize] {
        &self.components
    }

    pub fn is_natural(&self) -> bool {
        let c = self.src.src();
        let d = self.src.dst();
        c.mors().all(|m| {
            let lhs = d.try_compose(self.components[c.dst(m)], self.src.mor(m));
            let rhs = d.try_compose(self.dst.mor(m), self.components[c.src(m)]);
            lhs.is_some() && lhs == rhs
        })
    }

    pub fn is_iso(&self) -> bool {
        let d = self.src.dst();
        self.components.iter().all(|&m| d.is_iso(m))
    }

    /// Vertical composite `self . first`.
    pub fn vcompose(&self, first: &NatTransformation) -> NatTransformation {
        assert_eq!(first.dst, self.src);
        let d = self.src.dst().clone();
        let components = first
            .components
            .iter()
            .zip(&self.components)
            .map(|(&a, &b)| d.compose(b, a))
            .collect();
        NatTransformation {
            src: first.src.clone(),
            dst: self.dst.clone(),
            components,
        }
    }
}

/// Exhaustively enumerate all functors `a -> b` in canonical order.
pub fn enumerate_functors(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> Vec<FinFunctor> {
    let mut out = Vec::new();
    let nobj = a.object_count();
    if b.object_count() == 0 && nobj > 0 {
        return out;
    }
    let mut on_obj = vec![0usize; nobj];
    loop {
        extend_functor(a, b, &on_obj, &mut out);
        let mut k = nobj;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            on_obj[k] += 1;
            if on_obj[k] < b.object_count() {
                break;
            }
            on_obj[k] = 0;
        }
        if nobj == 0 {
            return out;
        }
    }
}

fn extend_functor(
    a: &Arc<FinCategory>,
    b: &Arc<FinCategory>,
    on_obj: &[usize],
    out: &mut Vec<FinFunctor>,
) {
    let nmor = a.mor_count();
    let mut on_mor = vec![usize::MAX; nmor];
    for o in a.objects() {
        on_mor[a.identity(o)] = b.identity(on_obj[o]);
    }
    fn rec(
        a: &Arc<FinCategory>,
        b: &Arc<FinCategory>,
        on_obj: &[usize],
        on_mor: &mut Vec<usize>,
        next: usize,
        out: &mut Vec<FinFunctor>,
    ) {
        let nmor = a.mor_count();
        let mut next = next;
        while next < nmor && on_mor[next] != usize::MAX {
            next += 1;
        }
        if next == nmor {
            let f = FinFunctor::new(a.clone(), b.clone(), on_obj.to_vec(), on_mor.clone());
            if f.validate().is_ok() {
                out.push(f);
            }
            return;
        }
        let (s, d) = (a.src(next), a.dst(next));
        for &cand in b.hom(on_obj[s], on_obj[d]) {
            on_mor[next] = cand;
            let mut ok = true;
            'check: for g in a.mors() {
                if on_mor[g] == usize::MAX {
                    continue;
                }
                for f in a.mors() {
                    if on_mor[f] == usize::MAX {
                        continue;
                    }
                    if let Some(gf) = a.try_compose(g, f) {
                        if on_mor[gf] != usize::MAX
                            && b.try_compose(on_mor[g], on_mor[f]) != Some(on_mor[gf])
                        {
                            ok = false;
                            break 'check;
                        }
                    }
                }
            }
            if ok {
                rec(a, b, on_obj, on_mor, next + 1, out);
            }
            on_mor[next] = usize::MAX;
        }
    }
    rec(a, b, on_obj, &mut on_mor, 0, out);
}

/// Enumerate all functors `a -> b` extending a fixed object map and a
/// partial morphism map, in canonical order.
pub fn enumerate_functor_extensions(
    a: &Arc<FinCategory>,
    b: &Arc<FinCategory>,
    on_obj: Vec<usize>,
    partial_mor: Vec<Option<usize>>,
) -> Vec<FinFunctor> {
    assert_eq!(on_obj.len(), a.object_count());
    assert_eq!(partial_mor.len(), a.mor_count());
    let mut on_mor: Vec<usize> = partial_mor
        .iter()
        .map(|m| m.unwrap_or(usize::MAX))
        .collect();
    for o in a.objects() {
        let id = a.identity(o);
        let forced = b.identity(on_obj[o]);
        if on_mor[id] == usize::MAX {
            on_mor[id] = forced;
        } else if on_mor[id] != forced {
            return vec![];
        }
    }
    // typing check on the fixed part
    for m in a.mors() {
        if on_mor[m] != usize::MAX
            && (b.src(on_mor[m]) != on_obj[a.src(m)] || b.dst(on_mor[m]) != on_obj[a.dst(m)])
        {
            return vec![];
        }
    }
    let mut out = Vec::new();
    fn rec(
        a: &Arc<FinCategory>,
        b: &Arc<FinCategory>,
        on_obj: &[usize],
        on_mor: &mut Vec<usize>,
        out: &mut Vec<FinFunctor>,
    ) {
        let next = on_mor.iter().position(|&m| m == usize::MAX);
        let Some(next) = next else {
            let f = FinFunctor::new(a.clone(), b.clone(), on_obj.to_vec(), on_mor.clone());
            if f.validate().is_ok() {
                out.push(f);
            }
            return;
        };
        let (s, d) = (a.src(next), a.dst(next));
        'cand: for &cand in b.hom(on_obj[s], on_obj[d]) {
            on_mor[next] = cand;
            for g in a.mors() {
                if on_mor[g] == usize::MAX {
                    continue;
                }
                for f in a.mors() {
                    if on_mor[f] == usize::MAX {
                        continue;
                    }
                    if let Some(gf) = a.try_compose(g, f) {
                        if on_mor[gf] != usize::MAX
                            && b.try_compose(on_mor[g], on_mor[f]) != Some(on_mor[gf])
                        {
                            on_mor[next] = usize::MAX;
                            continue 'cand;
                        }
                    }
                }
            }
            rec(a, b, on_obj, on_mor, out);
            on_mor[next] = usize::MAX;
        }
    }
    rec(a, b, &on_obj, &mut on_mor, &mut out);
    out
}

/// Exhaustively enumerate natural transformations `f -> g` between
/// parallel functors, in lexicographic component order.
pub fn enumerate_nat_transformations(f: &FinFunctor, g: &FinFunctor) -> Vec<NatTransformation> {
    assert_eq!(*f.src(), *g.src(), "functors not parallel");
    assert_eq!(*f.dst(), *g.dst(), "functors not parallel");
    let c = f.src().clone();
    let d = f.dst().clone();
    let nobj = c.object_count();
    let mut out = Vec::new();
    let mut components = vec![usize::MAX; nobj];
    fn rec(
        c: &Arc<FinCategory>,
        d: &Arc<FinCategory>,
        f: &FinFunctor,
        g: &FinFunctor,
        components: &mut Vec<usize>,
        obj: usize,
        out: &mut Vec<NatTransformation>,
    ) {
        if obj == c.object_count() {
            out.push(NatTransformation::new(
                f.clone(),
                g.clone(),
                components.clone(),
            ));
            return;
        }
        'cand: for &cand in d.hom(f.ob(obj), g.ob(obj)) {
            components[obj] = cand;
            for m in c.mors() {
                let (s, t) = (c.src(m), c.dst(m));
                if components[s] == usize::MAX || components[t] == usize::MAX {
                    continue;
                }
                let lhs = d.try_compose(components[t], f.mor(m));
                let rhs = d.try_compose(g.mor(m), components[s]);
                if lhs != rhs || lhs.is_none() {
                    continue 'cand;
                }
            }
            rec(c, d, f, g, components, obj + 1, out);
        }
        components[obj] = usize::MAX;
    }
    rec(&c, &d, f, g, &mut components, 0, &mut out);
    out
}

/// The comma category `(c \downarrow f)` together with its projection to
/// the source of `f`. Objects are pairs `(a, h: c -> f a)`.
pub fn comma_category(f: &FinFunctor, c: usize) -> (Arc<FinCategory>, FinFunctor) {
    let a = f.src();
    let cc = f.dst();
    let mut b = CatBuilder::new(&format!("({}|{})", cc.object_name(c), a.name()));
    let obj_name = |ao: usize, h: usize| format!("{}|{}", a.object_name(ao), cc.mor_name(h));
    let mut objs: Vec<(usize, usize)> = Vec::new();
    for ao in a.objects() {
        for &h in cc.hom(c, f.ob(ao)) {
            objs.push((ao, h));
            b.object(&obj_name(ao, h));
        }
    }
    let mor_name = |ao: usize, h: usize, m: usize| {
        format!("{}|{}>{}", a.object_name(ao), cc.mor_name(h), a.mor_name(m))
    };
    let mut mors: Vec<(usize, usize, usize)> = Vec::new();
    for &(ao, h) in &objs {
        for m in a.mors() {
            if a.src(m) != ao {
                continue;
            }
            let h2 = cc.compose(f.mor(m), h);
            mors.push((ao, h, m));
            b.mor(
                &mor_name(ao, h, m),
                &obj_name(ao, h),
                &obj_name(a.dst(m), h2),
            );
        }
    }
    for &(ao, h) in &objs {
        b.identity(&obj_name(ao, h), &mor_name(ao, h, a.identity(ao)));
    }
    for &(ao, h, m) in &mors {
        let mid_o = a.dst(m);
        let mid_h = cc.compose(f.mor(m), h);
        for n in a.mors() {
            if a.src(n) != mid_o {
                continue;
            }
            b.composite(
                &mor_name(mid_o, mid_h, n),
                &mor_name(ao, h, m),
                &mor_name(ao, h, a.compose(n, m)),
            );
        }
    }
    let cat = Arc::new(b.build().expect("comma category is well-formed"));
    let mut on_obj = vec![0; cat.object_count()];
    let mut on_mor = vec![0; cat.mor_count()];
    for &(ao, h) in &objs {
        on_obj[cat.object_index(&obj_name(ao, h)).unwrap()] = ao;
    }
    for &(ao, h, m) in &mors {
        on_mor[cat.mor_index(&mor_name(ao, h, m)).unwrap()] = m;
    }
    let proj = FinFunctor::new(cat.clone(), a.clone(), on_obj, on_mor);
    (cat, proj)
}

/// Result of the bo/ff factorisation `f = n . e`.
pub struct BoFfFactorisation {
    pub mid: Arc<FinCategory>,
    pub e: FinFunctor,
    pub n: FinFunctor,
}

/// Factor `f: A -> C` as a bijective-on-objects functor followed by a full
/// and faithful one. The intermediate category reuses the source object
/// names; its hom-sets are the hom-sets between the images in `C`, with
/// morphisms named deterministically from their image.
pub fn bo_ff_factorize(f: &FinFunctor) -> BoFfFactorisation {
    let a = f.src();
    let c = f.dst();
    let mut b = CatBuilder::new(&format!("im({})", a.name()));
    for o in a.objects() {
        b.object(a.object_name(o));
    }
    let mname = |x: usize, y: usize, img: usize| {
        format!(
            "{}:{}:{}",
            a.object_name(x),
            a.object_name(y),
            c.mor_name(img)
        )
    };
    for x in a.objects() {
        for y in a.objects() {
            for &img in c.hom(f.ob(x), f.ob(y)) {
                b.mor(&mname(x, y, img), a.object_name(x), a.object_name(y));
            }
        }
    }
    for x in a.objects() {
        b.identity(a.object_name(x), &mname(x, x, c.identity(f.ob(x))));
    }
    for x in a.objects() {
        for y in a.objects() {
            for &i1 in c.hom(f.ob(x), f.ob(y)) {
                for z in a.objects() {
                    for &i2 in c.hom(f.ob(y), f.ob(z)) {
                        b.composite(
                            &mname(y, z, i2),
                            &mname(x, y, i1),
                            &mname(x, z, c.compose(i2, i1)),
                        );
                    }
                }
            }
        }
    }
    let mid = Arc::new(b.build().expect("factorisation category is well-formed"));
    // Source object names are reused, so object indices agree with `a`.
    let e_obj: Vec<usize> = a
        .objects()
        .map(|o| mid.object_index(a.object_name(o)).unwrap())
        .collect();
    let e_mor: Vec<usize> = a
        .mors()
        .map(|m| mid.mor_index(&mname(a.src(m), a.dst(m), f.mor(m))).unwrap())
        .collect();
    let e = FinFunctor::new(a.clone(), mid.clone(), e_obj, e_mor);
    let mut n_obj = vec![0; mid.object_count()];
    for o in a.objects() {
        n_obj[mid.object_index(a.object_name(o)).unwrap()] = f.ob(o);
    }
    let mut n_mor = vec![0; mid.mor_count()];
    for x in a.objects() {
        for y in a.objects() {
            for &img in c.hom(f.ob(x), f.ob(y)) {
                n_mor[mid.mor_index(&mname(x, y, img)).unwrap()] = img;
            }
        }
    }
    let n = FinFunctor::new(mid.clone(), c.clone(), n_obj, n_mor);
    BoFfFactorisation { mid, e, n }
}

/// Given a commuting square `n . top = bottom . e` with `e` bijective on
/// objects and `n` full and faithful, produce the unique diagonal functor.
pub fn fill_in(
    e: &FinFunctor,
    n: &FinFunctor,
    top: &FinFunctor,
    bottom: &FinFunctor,
) -> Result<FinFunctor, CatError> {
    if !e.is_bijective_on_objects() {
        return Err(CatError::NotBijectiveOnObjects);
    }
    n.is_full_and_faithful()?;
    if n.compose(top) != bottom.compose(e) {
        return Err(CatError::SquareDoesNotCommute);
    }
    let cc = e.dst();
    let bb = n.src();
    let on_obj: Vec<usize> = cc.objects().map(|c| top.ob(e.object_preimage(c))).collect();
    let mut on_mor = vec![0usize; cc.mor_count()];
    for m in cc.mors() {
        let img = bottom.mor(m);
        let candidates: Vec<usize> = bb
            .hom(on_obj[cc.src(m)], on_obj[cc.dst(m)])
            .iter()
            .copied()
            .filter(|&h| n.mor(h) == img)
            .collect();
        match candidates.as_slice() {
            [h] => on_mor[m] = *h,
            [] => {
                return Err(CatError::NoFillIn(format!(
                    "no preimage for `{}`",
                    cc.mor_name(m)
                )))
            }
            _ => {
                return Err(CatError::NoFillIn(format!(
                    "multiple preimages for `{}`",
                    cc.mor_name(m)
                )))
            }
        }
    }
    let h = FinFunctor::new(cc.clone(), bb.clone(), on_obj, on_mor);
    h.validate()
        .map_err(|e| CatError::NoFillIn(e.to_string()))?;
    if h.compose(e) != *top || n.compose(&h) != *bottom {
        return Err(CatError::NoFillIn("triangles do not commute".into()));
    }
    Ok(h)
}

/// Transport a functor along an isomorphism, per the amnestic isofibration
/// property of restriction along a bijective-on-objects functor: given
/// `g: L -> C`, `l: A -> L` bijective on objects and a natural isomorphism
/// `phi: g . l -> target`, return the unique `g': L -> C` with
/// `g' . l = target` together with the lifted isomorphism `g -> g'`.
pub fn transport_along_iso(
    g: &FinFunctor,
    l: &FinFunctor,
    phi: &NatTransformation,
    target: &FinFunctor,
) -> Result<(FinFunctor, NatTransformation), CatError> {
    if !l.is_bijective_on_objects() {
        return Err(CatError::NotBijectiveOnObjects);
    }
    if *phi.src() != g.compose(l) || *phi.dst() != *target {
        return Err(CatError::Invalid(
            "phi is not a transformation g.l -> target".into(),
        ));
    }
    if !phi.is_natural() {
        return Err(CatError::Invalid("phi is not natural".into()));
    }
    let lc = g.src();
    let c = g.dst();
    for o in l.src().objects() {
        if !c.is_iso(phi.component(o)) {
            return Err(CatError::NotInvertible(l.src().object_name(o).to_string()));
        }
    }
    let pre: Vec<usize> = lc.objects().map(|o| l.object_preimage(o)).collect();
    let on_obj: Vec<usize> = lc.objects().map(|o| target.ob(pre[o])).collect();
    let mut on_mor = vec![0usize; lc.mor_count()];
    for m in lc.mors() {
        let (s, d) = (lc.src(m), lc.dst(m));
        let phi_s = phi.component(pre[s]);
        let phi_d = phi.component(pre[d]);
        let inv_s = c.inverse(phi_s).expect("checked iso");
        on_mor[m] = c.compose(phi_d, c.compose(g.mor(m), inv_s));
    }
    let g2 = FinFunctor::new(lc.clone(), c.clone(), on_obj, on_mor);
    g2.validate()?;
    if g2.compose(l) != *target {
        return Err(CatError::Invalid("transport failed to restrict".into()));
    }
    let theta_components: Vec<usize> = lc.objects().map(|o| phi.component(pre[o])).collect();
    let theta = NatTransformation::new(g.clone(), g2.clone(), theta_components);
    if !theta.is_natural() {
        return Err(CatError::Invalid("lifted iso is not natural".into()));
    }
    Ok((g2, theta))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_category_is_valid() {
        let c = FinCategory::terminal();
        assert!(validate_category(&c).is_ok());
    }

    #[test]
    fn chain_category_is_valid() {
        let c = FinCategory::chain(3);
        assert_eq!(c.object_count(), 3);
        assert_eq!(c.mor_count(), 6);
        assert!(validate_category(&c).is_ok());
    }

    #[test]
    fn broken_associativity_is_reported() {
        // Two parallel endo-arrows u, v on one object with a composition
        // table that breaks associativity on (u, u, u).
        let mut b = CatBuilder::new("bad");
        b.object("*");
        b.mor("id", "*", "*");
        b.mor("u", "*", "*");
        b.mor("v", "*", "*");
        b.identity("*", "id");
        for m in ["id", "u", "v"] {
            b.composite(m, "id", m);
            b.composite("id", m, m);
        }
        b.composite("u", "u", "v");
        b.composite("u", "v", "u");
        b.composite("v", "u", "id");
        b.composite("v", "v", "v");
        let c = b.build().unwrap();
        let report = validate_category(&c);
        assert!(!report.is_ok());
        assert!(report
            .violations
            .iter()
            .any(|v| v.contains("associativity")));
    }

    #[test]
    fn functor_counts() {
        let one = Arc::new(FinCategory::terminal());
        let disc2 = Arc::new(FinCategory::discrete("D2", &["x", "y"]));
        assert_eq!(enumerate_functors(&one, &disc2).len(), 2);

        let arrow = Arc::new(FinCategory::walking_arrow());
        assert_eq!(enumerate_functors(&arrow, &arrow).len(), 3);

        let empty = Arc::new(FinCategory::empty());
        assert_eq!(enumerate_functors(&empty, &arrow).len(), 1);
        assert_eq!(enumerate_functors(&empty, &empty).len(), 1);
    }

    #[test]
    fn nat_transformations_on_terminal() {
        let one = Arc::new(FinCategory::terminal());
        let id = FinFunctor::identity(&one);
        let nats = enumerate_nat_transformations(&id, &id);
        assert_eq!(nats.len(), 1);
        assert!(nats[0].is_natural());
    }

    #[test]
    fn nat_transformations_disjoint_images() {
        let one = Arc::new(FinCategory::terminal());
        let disc2 = Arc::new(FinCategory::discrete("D2", &["x", "y"]));
        let fs = enumerate_functors(&one, &disc2);
        assert_eq!(enumerate_nat_transformations(&fs[0], &fs[1]).len(), 0);
    }

    #[test]
    fn comma_of_identity_on_terminal() {
        let one = Arc::new(FinCategory::terminal());
        let id = FinFunctor::identity(&one);
        let (comma, proj) = comma_category(&id, 0);
        assert_eq!(comma.object_count(), 1);
        assert_eq!(comma.mor_count(), 1);
        assert!(validate_category(&comma).is_ok());
        proj.validate().unwrap();
    }

    #[test]
    fn comma_of_empty_source() {
        let empty = Arc::new(FinCategory::empty());
        let one = Arc::new(FinCategory::terminal());
        let f = enumerate_functors(&empty, &one).pop().unwrap();
        let (comma, _) = comma_category(&f, 0);
        assert_eq!(comma.object_count(), 0);
    }

    #[test]
    fn bo_ff_of_identity() {
        let arrow = Arc::new(FinCategory::walking_arrow());
        let id = FinFunctor::identity(&arrow);
        let fac = bo_ff_factorize(&id);
        assert!(fac.e.is_bijective_on_objects());
        fac.n.is_full_and_faithful().unwrap();
        assert_eq!(fac.n.compose(&fac.e), id);
        assert_eq!(fac.mid.mor_count(), arrow.mor_count());
    }

    #[test]
    fn bo_ff_discrete_to_terminal() {
        let disc2 = Arc::new(FinCategory::discrete("D2", &["x", "y"]));
        let one = Arc::new(FinCategory::terminal());
        let f = enumerate_functors(&disc2, &one).pop().unwrap();
        let fac = bo_ff_factorize(&f);
        assert_eq!(fac.mid.object_count(), 2);
        // all four hom-sets are singletons
        for x in fac.mid.objects() {
            for y in fac.mid.objects() {
                assert_eq!(fac.mid.hom(x, y).len(), 1);
            }
        }
        assert!(validate_category(&fac.mid).is_ok());
        assert_eq!(fac.n.compose(&fac.e), f);
    }

    #[test]
    fn bo_ff_constant_on_chain() {
        let chain = Arc::new(FinCategory::chain(2));
        let one_obj = Arc::new(FinCategory::one_object(
            "M",
            2,
            0,
            &[vec![0, 1], vec![1, 0]],
        ));
        // constant functor sending everything to the single object, arrows to id
        let f = FinFunctor::new(
            chain.clone(),
            one_obj.clone(),
            vec![0, 0],
            vec![one_obj.identity(0); chain.mor_count()],
        );
        f.validate().unwrap();
        let fac = bo_ff_factorize(&f);
        // every hom-set of the intermediate equals the endo-hom of the image
        for x in fac.mid.objects() {
            for y in fac.mid.objects() {
                assert_eq!(fac.mid.hom(x, y).len(), 2);
            }
        }
        assert_eq!(fac.n.compose(&fac.e), f);
    }

    #[test]
    fn fill_in_identity_square() {
        let arrow = Arc::new(FinCategory::walking_arrow());
        let id = FinFunctor::identity(&arrow);
        let h = fill_in(&id, &id, &id, &id).unwrap();
        assert_eq!(h, id);
    }

    #[test]
    fn fill_in_unique_against_enumeration() {
        // Factor the unique functor discrete-2 -> terminal and fill in the
        // square (e, n, e, f); the result must be the unique such functor.
        let disc2 = Arc::new(FinCategory::discrete("D2", &["x", "y"]));
        let one = Arc::new(FinCategory::terminal());
        let f = enumerate_functors(&disc2, &one).pop().unwrap();
        let fac = bo_ff_factorize(&f);
        let h = fill_in(&fac.e, &fac.n, &fac.e, &fac.n).unwrap();
        let all = enumerate_functors(&fac.mid, &fac.mid);
        let solutions: Vec<_> = all
            .into_iter()
            .filter(|cand| cand.compose(&fac.e) == fac.e && fac.n.compose(cand) == fac.n)
            .collect();
        assert_eq!(solutions.len(), 1);
        assert_eq!(solutions[0], h);
    }

    #[test]
    fn fill_in_rejects_non_ff() {
        // n = constant functor from the walking arrow to the one-object
        // monoid Z/2 is not full, so fill-in must fail on a suitable square.
        let arrow = Arc::new(FinCategory::walking_arrow());
        let z2 = Arc::new(FinCategory::one_object(
            "Z2",
            2,
            0,
            &[vec![0, 1], vec![1, 0]],
        ));
        let n = FinFunctor::new(
            arrow.clone(),
            z2.clone(),
            vec![0, 0],
            vec![z2.identity(0); arrow.mor_count()],
        );
        n.validate().unwrap();
        let id = FinFunctor::identity(&arrow);
        let bottom = n.clone();
        let err = fill_in(&id, &n, &id, &bottom);
        // square commutes (n . id = n . id) but n is not full and faithful
        assert!(matches!(err, Err(CatError::NotFullFaithful(_))));
    }

    #[test]
    fn transport_identity_is_identity() {
        let arrow = Arc::new(FinCategory::walking_arrow());
        let l = FinFunctor::identity(&arrow);
        let g = FinFunctor::identity(&arrow);
        let gl = g.compose(&l);
        let phi = NatTransformation::identity(&gl);
        let (g2, theta) = transport_along_iso(&g, &l, &phi, &gl).unwrap();
        assert_eq!(g2, g);
        assert!(theta.is_natural());
    }

    #[test]
    fn transport_rejects_non_iso() {
        // phi with a non-invertible component must error.
        let one = Arc::new(FinCategory::terminal());
        let arrow = Arc::new(FinCategory::walking_arrow());
        let l = FinFunctor::identity(&one);
        // g picks object a; target picks b; the only transformation a -> b
        // is the non-invertible arrow f.
        let fs = enumerate_functors(&one, &arrow);
        let g = fs[0].clone();
        let target = fs[1].clone();
        let f_mor = arrow.mor_index("f").unwrap();
        let phi = NatTransformation::new(g.compose(&l), target.clone(), vec![f_mor]);
        assert!(phi.is_natural());
        let res = transport_along_iso(&g, &l, &phi, &target);
        assert!(matches!(res, Err(CatError::NotInvertible(_))));
    }

    #[test]
    fn opposite_involution() {
        let chain = FinCategory::chain(3);
        let op = chain.opposite();
        assert!(validate_category(&op).is_ok());
        let opop = op.opposite();
        assert_eq!(opop.mor_count(), chain.mor_count());
        for m in chain.mors() {
            assert_eq!(chain.src(m), opop.src(m));
            assert_eq!(chain.dst(m), opop.dst(m));
        }
    }
}

#[cfg(test)]
mod transport_relabel_tests {
    use super::*;

    #[test]
    fn transport_along_relabeling_iso() {
        // g: D2 -> D2 swaps the two objects; phi relabels back so the
        // transported functor composes with the identity to the target
        let disc2 = Arc::new(FinCategory::discrete("D2", &["x", "y"]));
        let l = FinFunctor::identity(&disc2);
        let swap = FinFunctor::new(
            disc2.clone(),
            disc2.clone(),
            vec![1, 0],
            vec![disc2.identity(1), disc2.identity(0)],
        );
        swap.validate().unwrap();
        let target = FinFunctor::identity(&disc2);
        // phi: swap . id -> id; on a discrete category the only candidate
        // components are identities, which exist only if the functors
        // agree -- so transport along the identity iso of swap itself
        let phi = NatTransformation::identity(&swap);
        let (g2, theta) = transport_along_iso(&swap, &l, &phi, &swap).unwrap();
        assert_eq!(g2, swap);
        assert!(theta.is_natural());
        // a genuine relabeling on a one-object category with two
        // automorphisms: transport the identity along the nontrivial one
        let z2 = Arc::new(FinCategory::one_object(
            "Z2",
            2,
            0,
            &[vec![0, 1], vec![1, 0]],
        ));
        let idf = FinFunctor::identity(&z2);
        let e1 = 1usize; // the nontrivial automorphism as a component
        let phi = NatTransformation::new(idf.compose(&idf), idf.clone(), vec![e1]);
        assert!(phi.is_natural());
        let (g2, theta) = transport_along_iso(&idf, &idf, &phi, &idf).unwrap();
        // conjugation by the nontrivial element of an abelian group is the
        // identity, so the transported functor is unchanged and the lift
        // is the chosen isomorphism
        assert_eq!(g2, idf);
        assert_eq!(theta.component(0), e1);
    }
}
