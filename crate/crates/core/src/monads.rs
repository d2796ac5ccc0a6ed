//! Finite monads in two guises: set-level monads acting on arbitrary
//! finite sets (identity, maybe, monoid product, explicit tables over a
//! world) and categorical monads given by endofunctor data on a finite
//! base. Kleisli proto-theories, Eilenberg-Moore algebras, recognition of
//! monadic proto-theories and pointwise codensity monads of finite
//! diagrams.

use std::sync::Arc;

use thiserror::Error;

use crate::fincat::{
    all_functions, CatBuilder, CatError, FinCategory, FinFunctor, FinSet, NatTransformation,
    SetFunction,
};
use crate::groupsem::{FinMonoid, GSet};
use crate::proth::{ProtoTheory, StructureResult, TheoryMorphism};
use crate::setval::FinSetWorld;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonadError {
    #[error(transparent)]
    Cat(#[from] CatError),
    #[error("monad law fails: {0}")]
    LawFails(String),
    #[error("triangle identity fails: {0}")]
    TriangleFails(String),
    #[error("base lacks the limit of the comma diagram at `{0}`")]
    MissingLimit(String),
    #[error("not a monad morphism: {0}")]
    NotMonadMorphism(String),
    #[error("hom-set too large: {0}")]
    TooLarge(usize),
}

/// How a set-level monad acts on finite sets.
#[derive(Debug, Clone, PartialEq)]
pub enum MonadKind {
    Identity,
    /// `T X = X + 1`
    Maybe,
    /// `T X = M x X` for a finite monoid
    Product(FinMonoid),
    /// explicit tables over the objects of the ambient world
    Tabled(TabledMonad),
}

/// Explicit monad tables, closed on a world's objects.
#[derive(Debug, Clone, PartialEq)]
pub struct TabledMonad {
    /// per world object: the world object `T b`
    pub on_obj: Vec<usize>,
    /// per world morphism: the world morphism `T g`
    pub on_mor: Vec<usize>,
    /// per world object: `eta_b : b -> T b`
    pub unit: Vec<usize>,
    /// per world object: `mu_b : T T b -> T b`
    pub mult: Vec<usize>,
}

/// A monad acting on all finite sets, used over a finite-set world.
#[derive(Debug, Clone, PartialEq)]
pub struct FinMonad {
    world: FinSetWorld,
    kind: MonadKind,
}

impl FinMonad {
    pub fn new(world: FinSetWorld, kind: MonadKind) -> Self {
        FinMonad { world, kind }
    }

    pub fn world(&self) -> &FinSetWorld {
        &self.world
    }

    pub fn kind(&self) -> &MonadKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            MonadKind::Identity => "Id".into(),
            MonadKind::Maybe => "X+1".into(),
            MonadKind::Product(m) => format!("{}x-", m.name()),
            MonadKind::Tabled(_) => "tabled".into(),
        }
    }

    pub fn t_set(&self, x: &FinSet) -> FinSet {
        match &self.kind {
            MonadKind::Identity => x.clone(),
            MonadKind::Maybe => {
                let mut elems: Vec<String> = x.elements().iter().map(|e| format!("J{e}")).collect();
                elems.push("N".into());
                FinSet::new(elems)
            }
            MonadKind::Product(m) => {
                let mut elems = Vec::with_capacity(m.size() * x.size());
                for g in 0..m.size() {
                    for e in x.elements() {
                        elems.push(format!("({},{e})", m.element_name(g)));
                    }
                }
                FinSet::new(elems)
            }
            MonadKind::Tabled(t) => {
                let obj = self.world_object_of(x);
                self.world.set_of(t.on_obj[obj]).clone()
            }
        }
    }

    fn world_object_of(&self, x: &FinSet) -> usize {
        let obj = self.world.object_of_size(x.size());
        assert_eq!(
            self.world.set_of(obj),
            x,
            "tabled monads act on canonical carriers only"
        );
        obj
    }

    pub fn t_fun(&self, f: &SetFunction) -> SetFunction {
        let (tsrc, tdst) = (self.t_set(f.src()), self.t_set(f.dst()));
        match &self.kind {
            MonadKind::Identity => f.clone(),
            MonadKind::Maybe => {
                let map = (0..tsrc.size())
                    .map(|i| {
                        let name = tsrc.name(i);
                        if name == "N" {
                            tdst.index_of("N").unwrap()
                        } else {
                            let x = &name[1..];
                            let xi = f.src().index_of(x).unwrap();
                            tdst.index_of(&format!("J{}", f.dst().name(f.apply(xi))))
                                .unwrap()
                        }
                    })
                    .collect();
                SetFunction::new(tsrc, tdst, map)
            }
            MonadKind::Product(m) => {
                let dec = product_decompose(m, f.src(), &tsrc);
                let map = (0..tsrc.size())
                    .map(|i| {
                        let (g, x) = dec[i];
                        product_index(m, f.dst(), &tdst, g, f.apply(x))
                    })
                    .collect();
                SetFunction::new(tsrc, tdst, map)
            }
            MonadKind::Tabled(t) => {
                let so = self.world_object_of(f.src());
                let d_o = self.world_object_of(f.dst());
                let mor = self.world.mor_of_fun(so, d_o, f.map());
                self.world.fun_of(t.on_mor[mor]).clone()
            }
        }
    }

    pub fn unit_at(&self, x: &FinSet) -> SetFunction {
        let tx = self.t_set(x);
        match &self.kind {
            MonadKind::Identity => SetFunction::identity(x),
            MonadKind::Maybe => {
                let map = (0..x.size())
                    .map(|i| tx.index_of(&format!("J{}", x.name(i))).unwrap())
                    .collect();
                SetFunction::new(x.clone(), tx, map)
            }
            MonadKind::Product(m) => {
                let map = (0..x.size())
                    .map(|i| product_index(m, x, &tx, m.unit(), i))
                    .collect();
                SetFunction::new(x.clone(), tx, map)
            }
            MonadKind::Tabled(t) => {
                let o = self.world_object_of(x);
                self.world.fun_of(t.unit[o]).clone()
            }
        }
    }

    pub fn mult_at(&self, x: &FinSet) -> SetFunction {
        let tx = self.t_set(x);
        let ttx = self.t_set(&tx);
        match &self.kind {
            MonadKind::Identity => SetFunction::identity(x),
            MonadKind::Maybe => {
                let map = (0..ttx.size())
                    .map(|i| {
                        let name = ttx.name(i);
                        if name == "N" || name == "JN" {
                            tx.index_of("N").unwrap()
                        } else {
                            tx.index_of(&name[1..]).unwrap()
                        }
                    })
                    .collect();
                SetFunction::new(ttx, tx, map)
            }
            MonadKind::Product(m) => {
                let dec_outer = product_decompose(m, &tx, &ttx);
                let dec_inner = product_decompose(m, x, &tx);
                let map = (0..ttx.size())
                    .map(|i| {
                        let (g, inner) = dec_outer[i];
                        let (h, xi) = dec_inner[inner];
                        product_index(m, x, &tx, m.mul(g, h), xi)
                    })
                    .collect();
                SetFunction::new(ttx, tx, map)
            }
            MonadKind::Tabled(t) => {
                let o = self.world_object_of(x);
                self.world.fun_of(t.mult[o]).clone()
            }
        }
    }

    /// Check the monad laws componentwise on the world's objects.
    pub fn validate(&self) -> Result<(), MonadError> {
        for obj in self.world.cat().objects() {
            let x = self.world.set_of(obj);
            let tx = self.t_set(x);
            let unit = self.unit_at(x);
            let mult = self.mult_at(x);
            let id_tx = SetFunction::identity(&tx);
            if mult.compose(&self.t_fun(&unit)) != id_tx {
                return Err(MonadError::LawFails(format!(
                    "mu . T eta != id at size {}",
                    x.size()
                )));
            }
            if mult.compose(&self.unit_at(&tx)) != id_tx {
                return Err(MonadError::LawFails(format!(
                    "mu . eta T != id at size {}",
                    x.size()
                )));
            }
            let mult_t = self.mult_at(&tx);
            if mult.compose(&self.t_fun(&mult)) != mult.compose(&mult_t) {
                return Err(MonadError::LawFails(format!(
                    "mu . T mu != mu . mu T at size {}",
                    x.size()
                )));
            }
        }
        // naturality of eta and mu on world morphisms
        for mor in self.world.cat().mors() {
            let f = self.world.fun_of(mor);
            let tf = self.t_fun(f);
            if tf.compose(&self.unit_at(f.src())) != self.unit_at(f.dst()).compose(f) {
                return Err(MonadError::LawFails("eta not natural".into()));
            }
            let ttf = self.t_fun(&tf);
            if tf.compose(&self.mult_at(f.src())) != self.mult_at(f.dst()).compose(&ttf) {
                return Err(MonadError::LawFails("mu not natural".into()));
            }
        }
        Ok(())
    }
}

impl FinMonad {
    /// `|T X|` for a carrier of the given size.
    pub fn t_size(&self, n: usize) -> usize {
        match &self.kind {
            MonadKind::Identity => n,
            MonadKind::Maybe => n + 1,
            MonadKind::Product(m) => m.size() * n,
            MonadKind::Tabled(t) => {
                let obj = self.world.object_of_size(n);
                self.world.size_of(t.on_obj[obj])
            }
        }
    }

    /// The rank of each monoid element in name order (the order in which
    /// product elements are laid out).
    fn monoid_ranks(m: &FinMonoid) -> Vec<usize> {
        let mut order: Vec<usize> = (0..m.size()).collect();
        order.sort_by(|&a, &b| m.element_name(a).cmp(m.element_name(b)));
        let mut rank = vec![0usize; m.size()];
        for (r, &g) in order.iter().enumerate() {
            rank[g] = r;
        }
        rank
    }

    /// `T f` as an index table, for `f` an index table from a carrier of
    /// size `f.len()` into one of size `dst_size`. Agrees with `t_fun` on
    /// canonical carriers (checked by tests).
    pub fn t_index_map(&self, f: &[usize], dst_size: usize) -> Vec<usize> {
        let n = f.len();
        match &self.kind {
            MonadKind::Identity => f.to_vec(),
            MonadKind::Maybe => {
                let mut out: Vec<usize> = f.to_vec();
                out.push(dst_size);
                out
            }
            MonadKind::Product(m) => {
                let k = m.size();
                let rank = Self::monoid_ranks(m);
                let mut inv = vec![0usize; k];
                for g in 0..k {
                    inv[rank[g]] = g;
                }
                let _ = inv;
                let mut out = vec![0usize; k * n];
                for g in 0..k {
                    for x in 0..n {
                        out[rank[g] * n + x] = rank[g] * dst_size + f[x];
                    }
                }
                out
            }
            MonadKind::Tabled(t) => {
                let so = self.world.object_of_size(n);
                let d_o = self.world.object_of_size(dst_size);
                let mor = self.world.mor_of_fun(so, d_o, f);
                self.world.fun_of(t.on_mor[mor]).map().to_vec()
            }
        }
    }

    /// `eta` as an index table on a carrier of the given size.
    pub fn unit_index(&self, n: usize) -> Vec<usize> {
        match &self.kind {
            MonadKind::Identity => (0..n).collect(),
            MonadKind::Maybe => (0..n).collect(),
            MonadKind::Product(m) => {
                let rank = Self::monoid_ranks(m);
                (0..n).map(|i| rank[m.unit()] * n + i).collect()
            }
            MonadKind::Tabled(t) => {
                let o = self.world.object_of_size(n);
                self.world.fun_of(t.unit[o]).map().to_vec()
            }
        }
    }

    /// `mu` as an index table `T T X -> T X` on a carrier of the given
    /// size.
    pub fn mult_index(&self, n: usize) -> Vec<usize> {
        match &self.kind {
            MonadKind::Identity => (0..n).collect(),
            MonadKind::Maybe => {
                let mut out: Vec<usize> = (0..n).collect();
                out.push(n);
                out.push(n);
                out
            }
            MonadKind::Product(m) => {
                let k = m.size();
                let rank = Self::monoid_ranks(m);
                let mut by_rank = vec![0usize; k];
                for g in 0..k {
                    by_rank[rank[g]] = g;
                }
                let tn = k * n;
                let mut out = vec![0usize; k * tn];
                for rg in 0..k {
                    for rh in 0..k {
                        for x in 0..n {
                            let prod = m.mul(by_rank[rg], by_rank[rh]);
                            out[rg * tn + rh * n + x] = rank[prod] * n + x;
                        }
                    }
                }
                out
            }
            MonadKind::Tabled(t) => {
                let o = self.world.object_of_size(n);
                self.world.fun_of(t.mult[o]).map().to_vec()
            }
        }
    }
}

/// The terminal monad `T X = 1` over a world, as explicit tables (the
/// simplest world-closed tabled monad besides the identity).
pub fn terminal_monad(world: &FinSetWorld) -> FinMonad {
    let base = world.cat();
    let one = world.object_of_size(1);
    let on_obj: Vec<usize> = base.objects().map(|_| one).collect();
    let on_mor: Vec<usize> = base.mors().map(|_| base.identity(one)).collect();
    let unit: Vec<usize> = base
        .objects()
        .map(|b| world.mor_of_fun(b, one, &vec![0; world.size_of(b)]))
        .collect();
    let mult: Vec<usize> = base.objects().map(|_| base.identity(one)).collect();
    FinMonad::new(
        world.clone(),
        MonadKind::Tabled(TabledMonad {
            on_obj,
            on_mor,
            unit,
            mult,
        }),
    )
}

/// Decompose each element of `M x X` into its (monoid, set) indices.
pub fn product_decompose(m: &FinMonoid, x: &FinSet, tx: &FinSet) -> Vec<(usize, usize)> {
    let mut out = vec![(usize::MAX, usize::MAX); tx.size()];
    for g in 0..m.size() {
        for i in 0..x.size() {
            let ix = tx
                .index_of(&format!("({},{})", m.element_name(g), x.name(i)))
                .expect("product element present");
            out[ix] = (g, i);
        }
    }
    out
}

pub fn product_index(m: &FinMonoid, x: &FinSet, tx: &FinSet, g: usize, i: usize) -> usize {
    tx.index_of(&format!("({},{})", m.element_name(g), x.name(i)))
        .expect("product element present")
}

const KLEISLI_CAP: usize = 1 << 20;

/// The Kleisli proto-theory of a set-level monad, with the bookkeeping
/// needed to translate between theory morphisms and function tables.
#[derive(Debug, Clone, PartialEq)]
pub struct KleisliTheory {
    pub monad: FinMonad,
    pub theory: ProtoTheory,
    /// per base object: `T set(b)`
    pub tsets: Vec<FinSet>,
}

impl KleisliTheory {
    /// The theory morphism `L x -> L y` with the given function table
    /// (indices into `T set(x)`).
    pub fn mor_of_table(&self, x: usize, y: usize, table: &[usize]) -> usize {
        let base = self.tsets[x].size();
        let idx = table.iter().fold(0usize, |acc, &v| acc * base.max(1) + v);
        let name = format!(
            "k{}>{}#{idx:06}",
            self.theory.arities().object_name(x),
            self.theory.arities().object_name(y)
        );
        self.theory
            .theory()
            .mor_index(&name)
            .expect("kleisli morphism exists")
    }

    /// Decode the function table of a theory morphism `L x -> L y`.
    pub fn table_of_mor(&self, x: usize, y: usize, mor: usize) -> Vec<usize> {
        let name = self.theory.theory().mor_name(mor);
        let idx: usize = name
            .rsplit_once('#')
            .expect("kleisli name")
            .1
            .parse()
            .unwrap();
        let n = self.y_size(y);
        let base = self.tsets[x].size();
        let mut table = vec![0usize; n];
        let mut rest = idx;
        for k in (0..n).rev() {
            table[k] = rest % base.max(1);
            rest /= base.max(1);
        }
        table
    }

    fn y_size(&self, y: usize) -> usize {
        self.monad.world().size_of(y)
    }
}

/// The Kleisli proto-theory of a set-level monad over its world: the
/// theory hom-set `L x -> L y` is the set of functions `y -> T x`;
/// morphism names encode the function table index.
pub fn kleisli(t: &FinMonad) -> KleisliTheory {
    let world = t.world();
    let base = world.cat();
    let arities = Arc::new(base.opposite());
    let tsets: Vec<FinSet> = base.objects().map(|b| t.t_set(world.set_of(b))).collect();
    // hom sizes and a quick cap
    let mut total = 0usize;
    for x in base.objects() {
        for y in base.objects() {
            total += tsets[x].size().pow(world.size_of(y) as u32);
        }
    }
    assert!(total <= KLEISLI_CAP, "kleisli theory too large: {total}");
    let mname = |x: usize, y: usize, idx: usize| {
        format!("k{}>{}#{idx:06}", base.object_name(x), base.object_name(y))
    };
    // function table <-> index (mixed radix, most significant first)
    let of_idx = |x: usize, y: usize, idx: usize| -> Vec<usize> {
        let (b, n) = (tsets[x].size(), world.size_of(y));
        let mut table = vec![0usize; n];
        let mut rest = idx;
        for k in (0..n).rev() {
            table[k] = rest % b;
            rest /= b;
        }
        table
    };
    let to_idx = |x: usize, table: &[usize]| -> usize {
        let b = tsets[x].size();
        table.iter().fold(0usize, |acc, &v| acc * b + v)
    };
    let hom_size = |x: usize, y: usize| -> usize {
        let n = world.size_of(y);
        if n == 0 {
            1
        } else if tsets[x].size() == 0 {
            0
        } else {
            tsets[x].size().pow(n as u32)
        }
    };
    let mut b = CatBuilder::new(&format!("kle({})", t.name()));
    for o in base.objects() {
        b.object(base.object_name(o));
    }
    for x in base.objects() {
        for y in base.objects() {
            for idx in 0..hom_size(x, y) {
                b.mor(&mname(x, y, idx), base.object_name(x), base.object_name(y));
            }
        }
    }
    // identities: eta_b as a table
    let eta_tables: Vec<Vec<usize>> = base
        .objects()
        .map(|o| t.unit_at(world.set_of(o)).map().to_vec())
        .collect();
    for o in base.objects() {
        b.identity(base.object_name(o), &mname(o, o, to_idx(o, &eta_tables[o])));
    }
    // composition: k2 . k1 for k1: Lx -> Ly (f1: y -> Tx) and
    // k2: Ly -> Lz (f2: z -> Ty) is mu_x . T f1 . f2
    for x in base.objects() {
        for y in base.objects() {
            for i1 in 0..hom_size(x, y) {
                let f1 =
                    SetFunction::new(world.set_of(y).clone(), tsets[x].clone(), of_idx(x, y, i1));
                let tf1 = t.t_fun(&f1);
                let mu_x = t.mult_at(world.set_of(x));
                let post = mu_x.compose(&tf1);
                for z in base.objects() {
                    for i2 in 0..hom_size(y, z) {
                        let f2 = of_idx(y, z, i2);
                        let table: Vec<usize> = f2.iter().map(|&v| post.apply(v)).collect();
                        b.composite(
                            &mname(y, z, i2),
                            &mname(x, y, i1),
                            &mname(x, z, to_idx(x, &table)),
                        );
                    }
                }
            }
        }
    }
    let theory = Arc::new(b.build().expect("kleisli theory is well-formed"));
    let mut on_obj = vec![0usize; arities.object_count()];
    for a in arities.objects() {
        on_obj[a] = theory.object_index(base.object_name(a)).unwrap();
    }
    // L on an arity morphism g (base g: b -> b2, arity direction b2 -> b):
    // the function b -> T b2 given by eta . g
    let mut on_mor = vec![0usize; arities.mor_count()];
    for g in arities.mors() {
        let gf = world.fun_of(g);
        let (b_src, b_dst) = (base.src(g), base.dst(g));
        let eta = t.unit_at(world.set_of(b_dst));
        let table: Vec<usize> = gf.map().iter().map(|&v| eta.apply(v)).collect();
        on_mor[g] = theory
            .mor_index(&mname(b_dst, b_src, to_idx(b_dst, &table)))
            .unwrap();
    }
    let l = FinFunctor::new(arities, theory, on_obj, on_mor);
    KleisliTheory {
        monad: t.clone(),
        theory: ProtoTheory::new(l).expect("kleisli functor is bijective on objects"),
        tsets,
    }
}

/// An Eilenberg-Moore algebra of a set-level monad.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EmAlgebra {
    pub carrier: FinSet,
    pub action: SetFunction,
}

impl EmAlgebra {
    pub fn satisfies_laws(&self, t: &FinMonad) -> bool {
        let unit = t.unit_at(&self.carrier);
        let id = SetFunction::identity(&self.carrier);
        if self.action.compose(&unit) != id {
            return false;
        }
        let mult = t.mult_at(&self.carrier);
        self.action.compose(&t.t_fun(&self.action)) == self.action.compose(&mult)
    }
}

/// Enumerate the algebras with carriers up to `carrier_bound`, in
/// canonical order. Candidates are generated per monad kind (the unit law
/// pins the shape) and every candidate is checked against both laws.
pub fn em_algebras(t: &FinMonad, carrier_bound: usize) -> Vec<EmAlgebra> {
    let mut out: Vec<EmAlgebra> = Vec::new();
    for n in 0..=carrier_bound {
        let carrier = FinSet::canonical(n);
        let tc = t.t_set(&carrier);
        match &t.kind {
            MonadKind::Identity => {
                out.push(EmAlgebra {
                    carrier: carrier.clone(),
                    action: SetFunction::identity(&carrier),
                });
            }
            MonadKind::Maybe => {
                // unit law forces the action to restrict to the identity;
                // the only freedom is the value at N
                for p in 0..n {
                    let map: Vec<usize> = (0..tc.size())
                        .map(|i| {
                            let name = tc.name(i);
                            if name == "N" {
                                p
                            } else {
                                carrier.index_of(&name[1..]).unwrap()
                            }
                        })
                        .collect();
                    out.push(EmAlgebra {
                        carrier: carrier.clone(),
                        action: SetFunction::new(tc.clone(), carrier.clone(), map),
                    });
                }
            }
            MonadKind::Product(m) => {
                let mut gsets = Vec::new();
                crate::groupsem::push_actions_on(m, n, &mut gsets);
                for gs in gsets {
                    let dec = product_decompose(m, &carrier, &tc);
                    let map: Vec<usize> = (0..tc.size())
                        .map(|i| {
                            let (g, x) = dec[i];
                            gs.action[g][x]
                        })
                        .collect();
                    out.push(EmAlgebra {
                        carrier: carrier.clone(),
                        action: SetFunction::new(tc.clone(), carrier.clone(), map),
                    });
                }
            }
            MonadKind::Tabled(_) => {
                for action in all_functions(&tc, &carrier) {
                    out.push(EmAlgebra {
                        carrier: carrier.clone(),
                        action,
                    });
                }
            }
        }
    }
    let mut out: Vec<EmAlgebra> = out
        .into_iter()
        .filter(|alg| alg.satisfies_laws(t))
        .collect();
    out.sort();
    out
}

/// All algebra homomorphisms `x -> y` as value tables. Uses the
/// equivariant-map machinery for group products, raw filtering otherwise.
pub fn em_homs(t: &FinMonad, x: &EmAlgebra, y: &EmAlgebra) -> Vec<Vec<usize>> {
    if let MonadKind::Product(m) = &t.kind {
        if m.is_group() {
            let gx = gset_of_algebra(t, m, x);
            let gy = gset_of_algebra(t, m, y);
            return crate::groupsem::equivariant_maps(m, &gx, &gy);
        }
    }
    all_functions(&x.carrier, &y.carrier)
        .into_iter()
        .filter(|h| h.compose(&x.action) == y.action.compose(&t.t_fun(h)))
        .map(|h| h.map().to_vec())
        .collect()
}

pub fn gset_of_algebra(t: &FinMonad, m: &FinMonoid, x: &EmAlgebra) -> GSet {
    let tc = t.t_set(&x.carrier);
    let n = x.carrier.size();
    let action = (0..m.size())
        .map(|g| {
            (0..n)
                .map(|i| x.action.apply(product_index(m, &x.carrier, &tc, g, i)))
                .collect()
        })
        .collect();
    GSet { size: n, action }
}

/// The explicit comparison between models of the Kleisli theory and
/// Eilenberg-Moore algebras: mutually inverse assignments commuting with
/// the forgetful functors.
pub struct KleisliModelComparison {
    pub models: Vec<crate::proth::Model>,
    pub algebras: Vec<EmAlgebra>,
    pub model_to_algebra: Vec<usize>,
    pub algebra_to_model: Vec<usize>,
    pub hom_counts_match: bool,
}

pub fn compare_kleisli_models(kt: &KleisliTheory) -> KleisliModelComparison {
    let world = kt.monad.world();
    let l = &kt.theory;
    let models = crate::proth::enumerate_models_world(l, world);
    let algebras = em_algebras(&kt.monad, world.max_size());
    // model -> algebra: s(tau) = alpha_1 evaluated at the morphism L d -> L 1
    // whose table is [tau]
    let one = world.unit_object();
    let mut model_to_algebra = Vec::with_capacity(models.len());
    for x in &models {
        let d = x.carrier;
        let carrier = world.set_of(d).clone();
        let tc = kt.monad.t_set(&carrier);
        let map: Vec<usize> = (0..tc.size())
            .map(|tau| {
                let lmor = kt.mor_of_table(d, one, &[tau]);
                let val = x.alpha_at(l, one, lmor);
                world.fun_of(val).apply(0)
            })
            .collect();
        let alg = EmAlgebra {
            carrier,
            action: SetFunction::new(tc, world.set_of(d).clone(), map),
        };
        assert!(alg.satisfies_laws(&kt.monad), "model yields an algebra");
        let ix = algebras
            .iter()
            .position(|a| *a == alg)
            .expect("algebra enumerated");
        model_to_algebra.push(ix);
    }
    // algebra -> model: alpha_b(lm)(j) = s(lm-table[j])
    let mut algebra_to_model = vec![usize::MAX; algebras.len()];
    for (ai, alg) in algebras.iter().enumerate() {
        let d = world.object_of_size(alg.carrier.size());
        let base = world.cat();
        let theory = l.theory();
        let ld = l.l().ob(d);
        let mut alpha = Vec::with_capacity(base.object_count());
        for bo in base.objects() {
            let lb = l.l().ob(bo);
            let mut row = Vec::with_capacity(theory.hom(ld, lb).len());
            for &lm in theory.hom(ld, lb) {
                let table = kt.table_of_mor(d, bo, lm);
                let values: Vec<usize> = table.iter().map(|&tau| alg.action.apply(tau)).collect();
                row.push(world.mor_of_fun(bo, d, &values));
            }
            alpha.push(row);
        }
        let model = crate::proth::Model { carrier: d, alpha };
        let ix = models
            .iter()
            .position(|m| *m == model)
            .expect("model enumerated");
        algebra_to_model[ai] = ix;
    }
    let mut round_ok = models.len() == algebras.len();
    for (mi, &ai) in model_to_algebra.iter().enumerate() {
        round_ok &= algebra_to_model[ai] == mi;
    }
    // hom-set counts on every pair (as base-morphism sets they must agree
    // exactly, since both comparisons are the identity on carriers)
    let mut hom_counts_match = round_ok;
    if hom_counts_match {
        for (xi, x) in models.iter().enumerate() {
            for (yi, y) in models.iter().enumerate() {
                let mh: Vec<usize> = crate::proth::enumerate_model_homs_world(l, world, x, y);
                let ah = em_homs(
                    &kt.monad,
                    &algebras[model_to_algebra[xi]],
                    &algebras[model_to_algebra[yi]],
                );
                let mh_tables: Vec<Vec<usize>> =
                    mh.iter().map(|&h| world.fun_of(h).map().to_vec()).collect();
                let mut a_sorted = ah.clone();
                a_sorted.sort();
                let mut m_sorted = mh_tables.clone();
                m_sorted.sort();
                if a_sorted != m_sorted {
                    hom_counts_match = false;
                }
            }
        }
    }
    KleisliModelComparison {
        models,
        algebras,
        model_to_algebra,
        algebra_to_model,
        hom_counts_match,
    }
}

/// A monad given categorically on an arbitrary finite base.
#[derive(Debug, Clone, PartialEq)]
pub struct CatMonad {
    pub t: FinFunctor,
    pub unit: NatTransformation,
    pub mult: NatTransformation,
}

impl CatMonad {
    pub fn validate(&self) -> Result<(), MonadError> {
        let base = self.t.src().clone();
        if *self.t.dst() != base {
            return Err(MonadError::LawFails("T is not an endofunctor".into()));
        }
        self.t.validate()?;
        if !self.unit.is_natural() || !self.mult.is_natural() {
            return Err(MonadError::LawFails("unit or mult not natural".into()));
        }
        for b in base.objects() {
            let tb = self.t.ob(b);
            let id_tb = base.identity(tb);
            // mu . T eta = id = mu . eta T
            let t_eta = self.t.mor(self.unit.component(b));
            if base.try_compose(self.mult.component(b), t_eta) != Some(id_tb) {
                return Err(MonadError::LawFails("mu . T eta != id".into()));
            }
            let eta_t = self.unit.component(tb);
            if base.try_compose(self.mult.component(b), eta_t) != Some(id_tb) {
                return Err(MonadError::LawFails("mu . eta T != id".into()));
            }
            // mu . T mu = mu . mu T
            let t_mu = self.t.mor(self.mult.component(b));
            let lhs = base.try_compose(self.mult.component(b), t_mu);
            let mu_t = self.mult.component(tb);
            let rhs = base.try_compose(self.mult.component(b), mu_t);
            if lhs != rhs || lhs.is_none() {
                return Err(MonadError::LawFails("mu not associative".into()));
            }
        }
        Ok(())
    }

    pub fn identity(base: &Arc<FinCategory>) -> Self {
        let t = FinFunctor::identity(base);
        CatMonad {
            unit: NatTransformation::identity(&t),
            mult: NatTransformation::identity(&t),
            t,
        }
    }
}

/// The Kleisli proto-theory of a categorical monad: hom `L x -> L y` is
/// the base hom-set `B(y, T x)`, with morphisms named by their underlying
/// base morphism.
pub fn kleisli_cat(m: &CatMonad) -> ProtoTheory {
    let base = m.t.src().clone();
    let arities = Arc::new(base.opposite());
    let mname = |x: usize, y: usize, f: usize| {
        format!(
            "k{}>{}:{}",
            base.object_name(x),
            base.object_name(y),
            base.mor_name(f)
        )
    };
    let mut b = CatBuilder::new("kle");
    for o in base.objects() {
        b.object(base.object_name(o));
    }
    for x in base.objects() {
        for y in base.objects() {
            for &f in base.hom(y, m.t.ob(x)) {
                b.mor(&mname(x, y, f), base.object_name(x), base.object_name(y));
            }
        }
    }
    for o in base.objects() {
        b.identity(base.object_name(o), &mname(o, o, m.unit.component(o)));
    }
    for x in base.objects() {
        for y in base.objects() {
            for &f1 in base.hom(y, m.t.ob(x)) {
                // post-composition mu_x . T f1 : T y -> T x
                let post = base.compose(m.mult.component(x), m.t.mor(f1));
                for z in base.objects() {
                    for &f2 in base.hom(z, m.t.ob(y)) {
                        b.composite(
                            &mname(y, z, f2),
                            &mname(x, y, f1),
                            &mname(x, z, base.compose(post, f2)),
                        );
                    }
                }
            }
        }
    }
    let theory = Arc::new(b.build().expect("kleisli category is well-formed"));
    let mut on_obj = vec![0usize; arities.object_count()];
    for a in arities.objects() {
        on_obj[a] = theory.object_index(base.object_name(a)).unwrap();
    }
    let mut on_mor = vec![0usize; arities.mor_count()];
    for g in arities.mors() {
        // base g: b -> b2; L g : L b2 -> L b is eta_{b2} . g : b -> T b2
        let (b_src, b_dst) = (base.src(g), base.dst(g));
        let f = base.compose(m.unit.component(b_dst), g);
        on_mor[g] = theory.mor_index(&mname(b_dst, b_src, f)).unwrap();
    }
    let l = FinFunctor::new(arities, theory, on_obj, on_mor);
    ProtoTheory::new(l).expect("kleisli functor is bijective on objects")
}

/// Outcome of monadicity recognition for a proto-theory over a world.
pub enum MonadicityResult {
    Monadic {
        monad: CatMonad,
        /// isomorphism theory -> kleisli_cat(monad)
        iso: FinFunctor,
    },
    NotMonadic {
        stage: usize,
        reason: String,
    },
}

/// Recognise a monadic proto-theory over a finite-set world: each
/// operations presheaf `L(L b, L -)` must be representable. On success,
/// the representing objects assemble into a monad with `str(U)`-style
/// comparison; on failure the offending stage is reported.
pub fn recognize_monadic(l: &ProtoTheory, base: &Arc<FinCategory>) -> MonadicityResult {
    let theory = l.theory();
    // For each stage b: find (t, u) with u in hom(L b, L t) such that for
    // every stage y the map hom_B(y, t) -> hom(L b, L y), h |-> L(h_op) . u
    // is a bijection.
    let mut t_obj = vec![0usize; base.object_count()];
    let mut univ = vec![0usize; base.object_count()];
    for bo in base.objects() {
        let lb = l.l().ob(bo);
        let mut found = None;
        'search: for cand in base.objects() {
            let lt = l.l().ob(cand);
            for &u in theory.hom(lb, lt) {
                let mut ok = true;
                for y in base.objects() {
                    let ly = l.l().ob(y);
                    let mut images: Vec<usize> = base
                        .hom(y, cand)
                        .iter()
                        .map(|&h| theory.compose(l.l().mor(h), u))
                        .collect();
                    images.sort();
                    images.dedup();
                    if images.len() != base.hom(y, cand).len()
                        || images.len() != theory.hom(lb, ly).len()
                    {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    found = Some((cand, u));
                    break 'search;
                }
            }
        }
        match found {
            Some((t, u)) => {
                t_obj[bo] = t;
                univ[bo] = u;
            }
            None => {
                return MonadicityResult::NotMonadic {
                    stage: bo,
                    reason: format!(
                        "operations presheaf at stage `{}` is not representable",
                        base.object_name(bo)
                    ),
                }
            }
        }
    }
    // invert the representation: phi_b_y : hom_B(y, T b) -> hom(L b, L y)
    let phi = |bo: usize, _y: usize, h: usize| -> usize { theory.compose(l.l().mor(h), univ[bo]) };
    let phi_inv = |bo: usize, y: usize, lm: usize| -> usize {
        base.hom(y, t_obj[bo])
            .iter()
            .copied()
            .find(|&h| phi(bo, y, h) == lm)
            .expect("representation is bijective")
    };
    // monad data
    let t_mor: Vec<usize> = base
        .mors()
        .map(|g| {
            // T g : T b -> T c for g : b -> c; classified by u_b . L(g_op)
            let (bo, co) = (base.src(g), base.dst(g));
            let lm = theory.compose(univ[bo], l.l().mor(g));
            phi_inv(co, t_obj[bo], lm)
        })
        .collect();
    let t = FinFunctor::new(base.clone(), base.clone(), t_obj.clone(), t_mor);
    if t.validate().is_err() {
        return MonadicityResult::NotMonadic {
            stage: 0,
            reason: "representing objects do not assemble into a functor".into(),
        };
    }
    let unit_components: Vec<usize> = base
        .objects()
        .map(|bo| phi_inv(bo, bo, theory.identity(l.l().ob(bo))))
        .collect();
    let mult_components: Vec<usize> = base
        .objects()
        .map(|bo| {
            // mu_b classified by u_{T b} . u_b : L b -> L T T b
            let lm = theory.compose(univ[t_obj[bo]], univ[bo]);
            phi_inv(bo, t_obj[t_obj[bo]], lm)
        })
        .collect();
    let id_f = FinFunctor::identity(base);
    let monad = CatMonad {
        unit: NatTransformation::new(id_f, t.clone(), unit_components),
        mult: NatTransformation::new(t.compose(&t), t.clone(), mult_components),
        t,
    };
    if let Err(e) = monad.validate() {
        return MonadicityResult::NotMonadic {
            stage: 0,
            reason: format!("representation does not satisfy the monad laws: {e}"),
        };
    }
    // comparison isomorphism theory -> kleisli_cat(monad)
    let kle = kleisli_cat(&monad);
    let kle_theory = kle.theory();
    let mut on_obj = vec![0usize; theory.object_count()];
    for a in base.objects() {
        on_obj[l.l().ob(a)] = kle.l().ob(a);
    }
    let mut on_mor = vec![usize::MAX; theory.mor_count()];
    for x in base.objects() {
        for y in base.objects() {
            let (lx, ly) = (l.l().ob(x), l.l().ob(y));
            for &lm in theory.hom(lx, ly) {
                let h = phi_inv(x, y, lm);
                let name = format!(
                    "k{}>{}:{}",
                    base.object_name(x),
                    base.object_name(y),
                    base.mor_name(h)
                );
                on_mor[lm] = kle_theory.mor_index(&name).unwrap();
            }
        }
    }
    let iso = FinFunctor::new(theory.clone(), kle_theory.clone(), on_obj, on_mor);
    match iso.validate() {
        Ok(()) if iso.is_bijective_on_objects() && iso.is_full_and_faithful().is_ok() => {
            MonadicityResult::Monadic { monad, iso }
        }
        _ => MonadicityResult::NotMonadic {
            stage: 0,
            reason: "comparison with the Kleisli theory is not an isomorphism".into(),
        },
    }
}

/// A pointwise codensity monad computed from comma-category limits.
pub struct CodensityMonad {
    pub monad: CatMonad,
    /// per base object: the comma objects (m, f: b -> u m) and the cone
    /// legs `T b -> u m`
    pub cones: Vec<Vec<((usize, usize), usize)>>,
}

/// The codensity value at a single stage: the limit in `B` of the comma
/// diagram `(b | u) -> M -> B`, found by exhaustive search over apexes
/// and cones and verified universal against every competing cone.
pub struct PointwiseCodensity {
    pub apex: usize,
    /// per comma object (m, f: b -> u m): the cone leg `apex -> u m`
    pub cone: Vec<((usize, usize), usize)>,
}

pub fn codensity_at(u: &FinFunctor, b: usize) -> Result<PointwiseCodensity, MonadError> {
    let m_cat = u.src().clone();
    let base = u.dst().clone();
    let objs: Vec<(usize, usize)> = {
        let mut v = Vec::new();
        for m in m_cat.objects() {
            for &f in base.hom(b, u.ob(m)) {
                v.push((m, f));
            }
        }
        v
    };
    let cones_with_apex = |t: usize| -> Vec<Vec<usize>> { comma_cones(&m_cat, &base, u, &objs, t) };
    for t in base.objects() {
        for cone in cones_with_apex(t) {
            let mut universal = true;
            for t2 in base.objects() {
                let all = cones_with_apex(t2);
                let mut images: Vec<Vec<usize>> = base
                    .hom(t2, t)
                    .iter()
                    .map(|&h| cone.iter().map(|&leg| base.compose(leg, h)).collect())
                    .collect();
                images.sort();
                images.dedup();
                let mut all_sorted = all.clone();
                all_sorted.sort();
                if images != all_sorted {
                    universal = false;
                    break;
                }
            }
            if universal {
                return Ok(PointwiseCodensity {
                    apex: t,
                    cone: objs.iter().copied().zip(cone).collect(),
                });
            }
        }
    }
    Err(MonadError::MissingLimit(base.object_name(b).to_string()))
}

fn comma_cones(
    m_cat: &Arc<FinCategory>,
    base: &Arc<FinCategory>,
    u: &FinFunctor,
    objs: &[(usize, usize)],
    t: usize,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut legs: Vec<usize> = Vec::new();
    fn rec(
        m_cat: &Arc<FinCategory>,
        base: &Arc<FinCategory>,
        u: &FinFunctor,
        objs: &[(usize, usize)],
        t: usize,
        legs: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let k = legs.len();
        if k == objs.len() {
            out.push(legs.clone());
            return;
        }
        let (m, _f) = objs[k];
        'cand: for &leg in base.hom(t, u.ob(m)) {
            legs.push(leg);
            for (i, &(mi, fi)) in objs.iter().enumerate().take(legs.len()) {
                for (j, &(mj, fj)) in objs.iter().enumerate().take(legs.len()) {
                    for w in m_cat.mors() {
                        if m_cat.src(w) != mi || m_cat.dst(w) != mj {
                            continue;
                        }
                        if base.compose(u.mor(w), fi) != fj {
                            continue;
                        }
                        if base.compose(u.mor(w), legs[i]) != legs[j] {
                            legs.pop();
                            continue 'cand;
                        }
                    }
                }
            }
            rec(m_cat, base, u, objs, t, legs, out);
            legs.pop();
        }
    }
    rec(m_cat, base, u, objs, t, &mut legs, &mut out);
    out
}

/// Compute the pointwise codensity monad of `u: M -> B`, finding each
/// limit by exhaustive search over apexes and cones in `B` and verifying
/// the universal property against every competing cone.
pub fn codensity_monad(u: &FinFunctor) -> Result<CodensityMonad, MonadError> {
    let base = u.dst().clone();
    let mut t_obj = vec![0usize; base.object_count()];
    let mut cone_legs: Vec<Vec<usize>> = vec![vec![]; base.object_count()];
    let mut cones_all: Vec<Vec<((usize, usize), usize)>> = vec![vec![]; base.object_count()];
    for b in base.objects() {
        let pw = codensity_at(u, b)?;
        t_obj[b] = pw.apex;
        cone_legs[b] = pw.cone.iter().map(|&(_, leg)| leg).collect();
        cones_all[b] = pw.cone;
    }
    // mediating morphism for a cone with a given apex
    let mediate = |b: usize, apex: usize, legs: &[usize]| -> Result<usize, MonadError> {
        let t = t_obj[b];
        let mut mediators = base.hom(apex, t).iter().copied().filter(|&h| {
            cones_all[b]
                .iter()
                .enumerate()
                .all(|(i, &(_, _))| base.compose(cone_legs[b][i], h) == legs[i])
        });
        let first = mediators.next().ok_or_else(|| {
            MonadError::MissingLimit(format!(
                "no mediating morphism at `{}`",
                base.object_name(b)
            ))
        })?;
        if mediators.next().is_some() {
            return Err(MonadError::MissingLimit(format!(
                "mediating morphism not unique at `{}`",
                base.object_name(b)
            )));
        }
        Ok(first)
    };
    // T on morphisms: for g: b -> b2, the cone on (b2 | u) with apex T b
    // has legs at (m, f) given by the leg of b at (m, f . g)
    let mut t_mor = vec![0usize; base.mor_count()];
    for g in base.mors() {
        let (b, b2) = (base.src(g), base.dst(g));
        let legs: Vec<usize> = cones_all[b2]
            .iter()
            .map(|&((m, f), _)| {
                let fg = base.compose(f, g);
                cones_all[b]
                    .iter()
                    .find(|&&((mi, fi), _)| mi == m && fi == fg)
                    .expect("comma object present")
                    .1
            })
            .collect();
        t_mor[g] = mediate(b2, t_obj[b], &legs)?;
    }
    let t = FinFunctor::new(base.clone(), base.clone(), t_obj.clone(), t_mor);
    t.validate()?;
    // eta_b: cone with apex b, legs f
    let mut unit_components = vec![0usize; base.object_count()];
    for b in base.objects() {
        let legs: Vec<usize> = cones_all[b].iter().map(|&((_, f), _)| f).collect();
        unit_components[b] = mediate(b, b, &legs)?;
    }
    // mu_b: cone with apex T T b, legs = leg of T b at (m, leg of b at (m,f))
    let mut mult_components = vec![0usize; base.object_count()];
    for b in base.objects() {
        let legs: Vec<usize> = cones_all[b]
            .iter()
            .map(|&((m, _f), leg_b)| {
                cones_all[t_obj[b]]
                    .iter()
                    .find(|&&((mi, fi), _)| mi == m && fi == leg_b)
                    .expect("comma object present")
                    .1
            })
            .collect();
        mult_components[b] = mediate(b, t.ob(t_obj[b]), &legs)?;
    }
    let id_f = FinFunctor::identity(&base);
    let monad = CatMonad {
        unit: NatTransformation::new(id_f, t.clone(), unit_components),
        mult: NatTransformation::new(t.compose(&t), t.clone(), mult_components),
        t,
    };
    monad.validate()?;
    Ok(CodensityMonad {
        monad,
        cones: cones_all,
    })
}

/// Verify `str(U) ~ kle(codensity monad of U)` on every hom-set: the map
/// sending `g: b2 -> T b` to the transformation with components
/// `f |-> leg_(m,f) . g` must be a functorial bijection.
pub fn codensity_structure_comparison(
    u: &FinFunctor,
    cod: &CodensityMonad,
    str_u: &StructureResult,
    arit: &crate::proth::Aritation,
) -> Result<(), MonadError> {
    let base = u.dst().clone();
    let m_cat = u.src().clone();
    let values = arit.values();
    let world_of_values = |s: usize| -> usize { s };
    let _ = world_of_values;
    let thr = str_u.theory.theory();
    // the comparison on each hom-set
    let mut rep: Vec<Vec<Vec<(usize, usize)>>> =
        vec![vec![vec![]; base.object_count()]; base.object_count()];
    for b in base.objects() {
        for b2 in base.objects() {
            let tb = cod.monad.t.ob(b);
            let mut seen = Vec::new();
            for &g in base.hom(b2, tb) {
                // family: component at m sends f in <b, U m> to leg . g
                let fam: Vec<usize> = m_cat
                    .objects()
                    .map(|m| {
                        // build the values morphism <b,Um> -> <b2,Um> as a
                        // function on hom positions
                        let src_obj = arit.pair_obj(b, u.ob(m));
                        let dst_obj = arit.pair_obj(b2, u.ob(m));
                        let table: Vec<usize> = base
                            .hom(b, u.ob(m))
                            .iter()
                            .map(|&f| {
                                let leg = cod.cones[b]
                                    .iter()
                                    .find(|&&((mi, fi), _)| mi == m && fi == f)
                                    .expect("comma object")
                                    .1;
                                let composite = base.compose(leg, g);
                                base.hom(b2, u.ob(m))
                                    .iter()
                                    .position(|&h| h == composite)
                                    .expect("hom element")
                            })
                            .collect();
                        values_mor_of_table(values, src_obj, dst_obj, &table)
                    })
                    .collect();
                let ta = thr.object_index(base.object_name(b)).unwrap();
                let ta2 = thr.object_index(base.object_name(b2)).unwrap();
                let mor = str_u.mor_of_family(ta, ta2, &fam).ok_or_else(|| {
                    MonadError::LawFails("comparison image is not natural".into())
                })?;
                if seen.contains(&mor) {
                    return Err(MonadError::LawFails("comparison not injective".into()));
                }
                seen.push(mor);
                rep[b][b2].push((g, mor));
            }
            if seen.len()
                != thr
                    .hom(
                        thr.object_index(base.object_name(b)).unwrap(),
                        thr.object_index(base.object_name(b2)).unwrap(),
                    )
                    .len()
            {
                return Err(MonadError::LawFails(format!(
                    "comparison not surjective at ({}, {})",
                    base.object_name(b),
                    base.object_name(b2)
                )));
            }
        }
    }
    // functoriality: kleisli composite maps to vertical composite
    for b in base.objects() {
        for b2 in base.objects() {
            for &(g1, m1) in &rep[b][b2] {
                let post = base.compose(cod.monad.mult.component(b), cod.monad.t.mor(g1));
                for b3 in base.objects() {
                    for &(g2, m2) in &rep[b2][b3] {
                        let gk = base.compose(post, g2);
                        let mk = rep[b][b3]
                            .iter()
                            .find(|&&(g, _)| g == gk)
                            .expect("kleisli composite in hom")
                            .1;
                        if thr.try_compose(m2, m1) != Some(mk) {
                            return Err(MonadError::LawFails("comparison not functorial".into()));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn values_mor_of_table(
    values: &Arc<FinCategory>,
    src_obj: usize,
    dst_obj: usize,
    table: &[usize],
) -> usize {
    // values is a finite-set world category: reconstruct the morphism name
    let digits: String = table.iter().map(|v| v.to_string()).collect();
    let name = format!(
        "{}>{}[{digits}]",
        values.object_name(src_obj),
        values.object_name(dst_obj)
    );
    values.mor_index(&name).expect("values morphism")
}

/// A morphism of set-level monads on a shared world: a component family
/// `phi_b : T b -> T' b` commuting with units and multiplications.
#[derive(Debug, Clone)]
pub struct MonadMorphism {
    pub src: FinMonad,
    pub dst: FinMonad,
    /// per world object: the component as a function table
    pub components: Vec<SetFunction>,
}

impl MonadMorphism {
    /// The induced Kleisli rule on a function `f: y -> T x`.
    pub fn hat(&self, x_obj: usize, f: &SetFunction) -> SetFunction {
        self.components[x_obj].compose(f)
    }

    /// Validate via the Kleisli-morphism laws, which quantify only over
    /// stage-indexed functions: the rule must send identities to
    /// identities and Kleisli composites to Kleisli composites.
    pub fn validate(&self) -> Result<(), MonadError> {
        let world = self.src.world();
        let base = world.cat();
        for obj in base.objects() {
            let x = world.set_of(obj);
            let phi = &self.components[obj];
            if phi.src() != &self.src.t_set(x) || phi.dst() != &self.dst.t_set(x) {
                return Err(MonadError::NotMonadMorphism("component mistyped".into()));
            }
        }
        // (i) unit rule on every base function k: b -> b2:
        //     hat(eta . k) = eta' . k
        for mor in base.mors() {
            let k = world.fun_of(mor);
            let (b, b2) = (base.src(mor), base.dst(mor));
            let _ = b;
            let eta = self.src.unit_at(world.set_of(b2));
            let eta2 = self.dst.unit_at(world.set_of(b2));
            if self.hat(b2, &eta.compose(k)) != eta2.compose(k) {
                return Err(MonadError::NotMonadMorphism("unit rule fails".into()));
            }
        }
        // (ii) composition rule on every pair of stage functions
        for x in base.objects() {
            let xs = world.set_of(x);
            for y in base.objects() {
                let ys = world.set_of(y);
                let fs = all_functions(ys, &self.src.t_set(xs));
                for z in base.objects() {
                    let zs = world.set_of(z);
                    let gs = all_functions(zs, &self.src.t_set(ys));
                    for f in &fs {
                        let post = self.src.mult_at(xs).compose(&self.src.t_fun(f));
                        let post2 = self
                            .dst
                            .mult_at(xs)
                            .compose(&self.dst.t_fun(&self.hat(x, f)));
                        for g in &gs {
                            let lhs = self.hat(x, &post.compose(g));
                            let rhs = post2.compose(&self.hat(y, g));
                            if lhs != rhs {
                                return Err(MonadError::NotMonadMorphism(
                                    "composition rule fails".into(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The theory morphism `kle(T) -> kle(T')` induced by a monad morphism:
/// each hom table is post-composed with the component.
pub fn kle_on_morphism(
    phi: &MonadMorphism,
    kt: &KleisliTheory,
    kt2: &KleisliTheory,
) -> Result<TheoryMorphism, MonadError> {
    phi.validate()?;
    let theory = kt.theory.theory();
    let base = kt.monad.world().cat();
    let on_obj: Vec<usize> = theory
        .objects()
        .map(|t| {
            kt2.theory
                .theory()
                .object_index(theory.object_name(t))
                .unwrap()
        })
        .collect();
    let mut on_mor = vec![0usize; theory.mor_count()];
    for x in base.objects() {
        for y in base.objects() {
            let (lx, ly) = (kt.theory.l().ob(x), kt.theory.l().ob(y));
            for &lm in theory.hom(lx, ly) {
                let table = kt.table_of_mor(x, y, lm);
                let mapped: Vec<usize> =
                    table.iter().map(|&v| phi.components[x].apply(v)).collect();
                on_mor[lm] = kt2.mor_of_table(x, y, &mapped);
            }
        }
    }
    let p = FinFunctor::new(theory.clone(), kt2.theory.theory().clone(), on_obj, on_mor);
    TheoryMorphism::new(&kt.theory, &kt2.theory, p)
        .map_err(|e| MonadError::NotMonadMorphism(e.to_string()))
}

/// Exhaustively enumerate theory morphisms `kle(T) -> kle(T')` over the
/// base (for the fullness check at small scale).
pub fn kleisli_theory_morphisms(kt: &KleisliTheory, kt2: &KleisliTheory) -> Vec<TheoryMorphism> {
    let theory = kt.theory.theory();
    let theory2 = kt2.theory.theory();
    let on_obj: Vec<usize> = theory
        .objects()
        .map(|t| theory2.object_index(theory.object_name(t)).unwrap())
        .collect();
    let mut partial: Vec<Option<usize>> = vec![None; theory.mor_count()];
    for f in kt.theory.arities().mors() {
        partial[kt.theory.l().mor(f)] = Some(kt2.theory.l().mor(f));
    }
    crate::fincat::enumerate_functor_extensions(theory, theory2, on_obj, partial)
        .into_iter()
        .filter_map(|p| TheoryMorphism::new(&kt.theory, &kt2.theory, p).ok())
        .collect()
}

/// Adjunction data `F -| U` with explicit unit and counit.
pub struct Adjunction {
    pub u: FinFunctor,
    pub f: FinFunctor,
    pub unit: NatTransformation,
    pub counit: NatTransformation,
}

impl Adjunction {
    pub fn validate(&self) -> Result<(), MonadError> {
        let b = self.u.dst().clone();
        let m = self.u.src().clone();
        if **self.f.src() != *b || **self.f.dst() != *m {
            return Err(MonadError::TriangleFails(
                "adjoint endpoints mismatch".into(),
            ));
        }
        if *self.unit.src() != FinFunctor::identity(&b)
            || *self.unit.dst() != self.u.compose(&self.f)
        {
            return Err(MonadError::TriangleFails("unit mistyped".into()));
        }
        if *self.counit.src() != self.f.compose(&self.u)
            || *self.counit.dst() != FinFunctor::identity(&m)
        {
            return Err(MonadError::TriangleFails("counit mistyped".into()));
        }
        if !self.unit.is_natural() || !self.counit.is_natural() {
            return Err(MonadError::TriangleFails(
                "unit or counit not natural".into(),
            ));
        }
        // (U eps)(eta U) = id_U
        for mo in m.objects() {
            let lhs = b.try_compose(
                self.u.mor(self.counit.component(mo)),
                self.unit.component(self.u.ob(mo)),
            );
            if lhs != Some(b.identity(self.u.ob(mo))) {
                return Err(MonadError::TriangleFails(format!(
                    "(U eps)(eta U) != id at `{}`",
                    m.object_name(mo)
                )));
            }
        }
        // (eps F)(F eta) = id_F
        for bo in b.objects() {
            let lhs = m.try_compose(
                self.counit.component(self.f.ob(bo)),
                self.f.mor(self.unit.component(bo)),
            );
            if lhs != Some(m.identity(self.f.ob(bo))) {
                return Err(MonadError::TriangleFails(format!(
                    "(eps F)(F eta) != id at `{}`",
                    b.object_name(bo)
                )));
            }
        }
        Ok(())
    }

    /// The induced monad `(UF, eta, U eps F)` on the base.
    pub fn monad(&self) -> CatMonad {
        let b = self.u.dst().clone();
        let t = self.u.compose(&self.f);
        let mult_components: Vec<usize> = b
            .objects()
            .map(|bo| self.u.mor(self.counit.component(self.f.ob(bo))))
            .collect();
        CatMonad {
            unit: self.unit.clone(),
            mult: NatTransformation::new(t.compose(&t), t.clone(), mult_components),
            t,
        }
    }
}

/// The hom-wise bijection `thr(U)(b, b2) ~ B(b2, T b)` of a right
/// adjoint's structure theory: `gamma |-> gamma_{F b}(eta_b)`, verified
/// bijective and functorial on every hom pair.
pub struct RightAdjointStructure {
    pub monad: CatMonad,
    /// per (b, b2): pairs (thr morphism, base morphism b2 -> T b)
    pub bijections: Vec<Vec<Vec<(usize, usize)>>>,
}

pub fn structure_of_right_adjoint(
    adj: &Adjunction,
    str_u: &StructureResult,
    arit: &crate::proth::Aritation,
) -> Result<RightAdjointStructure, MonadError> {
    adj.validate()?;
    let base = adj.u.dst().clone();
    let m_cat = adj.u.src().clone();
    let monad = adj.monad();
    monad.validate()?;
    let thr = str_u.theory.theory();
    let values = arit.values();
    let mut bijections: Vec<Vec<Vec<(usize, usize)>>> =
        vec![vec![vec![]; base.object_count()]; base.object_count()];
    for b in base.objects() {
        for b2 in base.objects() {
            let ta = thr.object_index(base.object_name(b)).unwrap();
            let ta2 = thr.object_index(base.object_name(b2)).unwrap();
            let mut seen = Vec::new();
            for &gamma in thr.hom(ta, ta2) {
                // component at F b applied to eta_b
                let fam = str_u.family(gamma);
                let fb = adj.f.ob(b);
                let comp = fam[fb]; // values morphism <b, U F b> -> <b2, U F b>
                let eta_b = adj.unit.component(b);
                let pos = base
                    .hom(b, adj.u.ob(fb))
                    .iter()
                    .position(|&h| h == eta_b)
                    .expect("eta_b in hom");
                let image_pos = apply_values_function(values, comp, pos);
                let g = base.hom(b2, adj.u.ob(fb))[image_pos];
                if seen.contains(&g) {
                    return Err(MonadError::LawFails(
                        "right-adjoint comparison not injective".into(),
                    ));
                }
                seen.push(g);
                bijections[b][b2].push((gamma, g));
            }
            if seen.len() != base.hom(b2, monad.t.ob(b)).len() {
                return Err(MonadError::LawFails(format!(
                    "right-adjoint comparison not surjective at ({}, {})",
                    base.object_name(b),
                    base.object_name(b2)
                )));
            }
        }
    }
    // functoriality: composition in thr corresponds to Kleisli composition
    for b in base.objects() {
        for b2 in base.objects() {
            for &(m1, g1) in &bijections[b][b2] {
                let post = base.compose(monad.mult.component(b), monad.t.mor(g1));
                for b3 in base.objects() {
                    for &(m2, g2) in &bijections[b2][b3] {
                        let gk = base.compose(post, g2);
                        let composite = thr.compose(m2, m1);
                        let found = bijections[b][b3]
                            .iter()
                            .find(|&&(mm, _)| mm == composite)
                            .expect("composite in hom")
                            .1;
                        if found != gk {
                            return Err(MonadError::LawFails(
                                "right-adjoint comparison not functorial".into(),
                            ));
                        }
                    }
                }
            }
        }
    }
    let _ = m_cat;
    Ok(RightAdjointStructure { monad, bijections })
}

fn apply_values_function(values: &Arc<FinCategory>, mor: usize, pos: usize) -> usize {
    // values is a finite-set world category; decode the function table
    let name = values.mor_name(mor);
    let table = name
        .split_once('[')
        .expect("values morphism name")
        .1
        .trim_end_matches(']');
    table
        .chars()
        .nth(pos)
        .and_then(|c| c.to_digit(10))
        .expect("position within table") as usize
}

/// The structure theory hom-sets over a truncated Eilenberg-Moore
/// category, computed by seeding at the free algebra and propagating along
/// the evaluation homomorphisms `e_f = s . T f`.
///
/// The computation is honest constraint propagation: the free algebra on
/// each stage must be present in the truncation, every evaluation map is
/// checked to be an algebra homomorphism with `e_f . eta = f`, every
/// candidate is checked to reproduce its seed, and naturality is verified
/// exhaustively against all algebra homomorphisms between small carriers.
/// All of this runs on plain index tables.
pub struct EmStructure {
    pub monad: FinMonad,
    pub carrier_bound: usize,
    /// all algebra actions as index tables, sorted by (size, table)
    pub actions: Vec<(usize, Vec<usize>)>,
    /// verification cap: algebra homs between carriers of size <= cap
    pub full_check_cap: usize,
    checked_stages: std::cell::RefCell<std::collections::BTreeSet<usize>>,
}

/// The hom-set `thr(U)(b, b2)`: seed tables `b2 -> T b` in lexicographic
/// order.
pub struct EmHomSet {
    pub seeds: Vec<Vec<usize>>,
}

fn index_tables(n: usize, m: usize) -> Vec<Vec<usize>> {
    // all functions {0..n-1} -> {0..m-1} in lexicographic order
    if n == 0 {
        return vec![vec![]];
    }
    if m == 0 {
        return vec![];
    }
    let mut out = Vec::with_capacity(m.pow(n as u32));
    let mut t = vec![0usize; n];
    loop {
        out.push(t.clone());
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            t[k] += 1;
            if t[k] < m {
                break;
            }
            t[k] = 0;
        }
    }
}

impl EmStructure {
    pub fn new(monad: FinMonad, carrier_bound: usize, full_check_cap: usize) -> Self {
        let algebras = em_algebras(&monad, carrier_bound);
        let actions = algebras
            .iter()
            .map(|a| (a.carrier.size(), a.action.map().to_vec()))
            .collect();
        EmStructure {
            monad,
            carrier_bound,
            actions,
            full_check_cap,
            checked_stages: std::cell::RefCell::new(std::collections::BTreeSet::new()),
        }
    }

    /// The component of the transformation with a given seed at an
    /// algebra: a table sending the position of `f: b -> X` to the
    /// position of `e_f . seed : b2 -> X` (both hom-sets in lexicographic
    /// order).
    pub fn component(
        &self,
        b_size: usize,
        b2_size: usize,
        seed: &[usize],
        alg: usize,
    ) -> Vec<usize> {
        let (nx, ax) = &self.actions[alg];
        let fs = index_tables(b_size, *nx);
        let fs2 = index_tables(b2_size, *nx);
        fs.iter()
            .map(|f| {
                let tf = self.monad.t_index_map(f, *nx);
                let composed: Vec<usize> = seed.iter().map(|&v| ax[tf[v]]).collect();
                fs2.binary_search(&composed).expect("composite in hom-set")
            })
            .collect()
    }

    /// Compute the hom-set `thr(U)(b, b2)` and run the verification
    /// batteries.
    pub fn hom_set(&self, b_size: usize, b2_size: usize) -> Result<EmHomSet, MonadError> {
        let tb = self.monad.t_size(b_size);
        if tb > self.carrier_bound {
            return Err(MonadError::MissingLimit(format!(
                "free algebra on {b_size} exceeds the carrier bound"
            )));
        }
        let free_action = self.monad.mult_index(b_size);
        if !self
            .actions
            .iter()
            .any(|(n, a)| *n == tb && *a == free_action)
        {
            return Err(MonadError::MissingLimit(format!(
                "free algebra on {b_size} not in the truncation"
            )));
        }
        let eta = self.monad.unit_index(b_size);
        // (a) every evaluation map is an algebra homomorphism extending
        // its point (checked once per stage)
        let already = self.checked_stages.borrow().contains(&b_size);
        for (nx, ax) in self.actions.iter().filter(|_| !already) {
            for f in index_tables(b_size, *nx) {
                let tf = self.monad.t_index_map(&f, *nx);
                let ef: Vec<usize> = tf.iter().map(|&v| ax[v]).collect();
                if (0..b_size).any(|i| ef[eta[i]] != f[i]) {
                    return Err(MonadError::LawFails(
                        "evaluation map does not extend its point".into(),
                    ));
                }
                // e_f . mu = s . T e_f
                let tef = self.monad.t_index_map(&ef, *nx);
                if free_action
                    .iter()
                    .enumerate()
                    .any(|(tt, &mtt)| ef[mtt] != ax[tef[tt]])
                {
                    return Err(MonadError::LawFails(
                        "evaluation map is not an algebra homomorphism".into(),
                    ));
                }
            }
        }
        self.checked_stages.borrow_mut().insert(b_size);
        let seeds = index_tables(b2_size, tb);
        // (b) each seed is recovered at the free algebra
        for seed in &seeds {
            let teta = self.monad.t_index_map(&eta, tb);
            let recovered: Vec<usize> = seed.iter().map(|&v| free_action[teta[v]]).collect();
            if recovered != *seed {
                return Err(MonadError::LawFails(
                    "seed not recovered at the free algebra".into(),
                ));
            }
        }
        // (c) naturality against every algebra homomorphism between small
        // carriers
        let small: Vec<usize> = (0..self.actions.len())
            .filter(|&i| self.actions[i].0 <= self.full_check_cap)
            .collect();
        let algebras = em_algebras(&self.monad, self.full_check_cap.min(self.carrier_bound));
        let _ = algebras;
        for &xi in &small {
            for &yi in &small {
                let homs = self.algebra_homs(xi, yi);
                if homs.is_empty() {
                    continue;
                }
                let fx = index_tables(b_size, self.actions[xi].0);
                let fy = index_tables(b_size, self.actions[yi].0);
                for seed in &seeds {
                    let cx = self.component(b_size, b2_size, seed, xi);
                    let cy = self.component(b_size, b2_size, seed, yi);
                    let fx2 = index_tables(b2_size, self.actions[xi].0);
                    let fy2 = index_tables(b2_size, self.actions[yi].0);
                    for h in &homs {
                        for (fi, f) in fx.iter().enumerate() {
                            let lhs: Vec<usize> = fx2[cx[fi]].iter().map(|&v| h[v]).collect();
                            let pushed: Vec<usize> = f.iter().map(|&v| h[v]).collect();
                            let pi = fy.binary_search(&pushed).expect("pushed in hom");
                            if lhs != fy2[cy[pi]] {
                                return Err(MonadError::LawFails(
                                    "seeded transformation not natural".into(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(EmHomSet { seeds })
    }

    /// Algebra homomorphisms between two enumerated algebras, as tables.
    fn algebra_homs(&self, xi: usize, yi: usize) -> Vec<Vec<usize>> {
        let (nx, ax) = &self.actions[xi];
        let (ny, ay) = &self.actions[yi];
        index_tables(*nx, *ny)
            .into_iter()
            .filter(|h| {
                let th = self.monad.t_index_map(h, *ny);
                ax.iter().enumerate().all(|(t, &axt)| h[axt] == ay[th[t]])
            })
            .collect()
    }

    /// Kleisli composite of two seed tables.
    pub fn compose_seeds(&self, b_size: usize, s1: &[usize], s2: &[usize]) -> Vec<usize> {
        let mu = self.monad.mult_index(b_size);
        let ts1 = self.monad.t_index_map(s1, self.monad.t_size(b_size));
        s2.iter().map(|&v| mu[ts1[v]]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::validate_category;
    use crate::proth::canonical_aritation;
    use crate::setval::FinSetWorld;

    #[test]
    fn monad_laws_hold() {
        let world = FinSetWorld::new(3);
        for kind in [
            MonadKind::Identity,
            MonadKind::Maybe,
            MonadKind::Product(FinMonoid::cyclic(2)),
            MonadKind::Product(FinMonoid::cyclic(3)),
        ] {
            FinMonad::new(world.clone(), kind).validate().unwrap();
        }
    }

    #[test]
    fn kleisli_hom_counts() {
        // identity monad: kleisli theory is the base itself in op form
        let world = FinSetWorld::new(2);
        let id = FinMonad::new(world.clone(), MonadKind::Identity);
        let kt = kleisli(&id);
        for x in world.cat().objects() {
            for y in world.cat().objects() {
                assert_eq!(
                    kt.theory
                        .theory()
                        .hom(kt.theory.l().ob(x), kt.theory.l().ob(y))
                        .len(),
                    world.cat().hom(y, x).len()
                );
            }
        }
        // maybe on sizes <= 2: hom(L2, L1) = functions 1 -> T2 has (2+1)^1
        // elements
        let maybe = FinMonad::new(world.clone(), MonadKind::Maybe);
        let km = kleisli(&maybe);
        let (s2, s1) = (world.object_of_size(2), world.object_of_size(1));
        assert_eq!(
            km.theory
                .theory()
                .hom(km.theory.l().ob(s2), km.theory.l().ob(s1))
                .len(),
            3
        );
        // G x - for G = Z/2: hom(L1, L2) = functions 2 -> T1 has (2*1)^2
        let z2 = FinMonad::new(world.clone(), MonadKind::Product(FinMonoid::cyclic(2)));
        let kz = kleisli(&z2);
        assert_eq!(
            kz.theory
                .theory()
                .hom(kz.theory.l().ob(s1), kz.theory.l().ob(s2))
                .len(),
            4
        );
        assert!(validate_category(kz.theory.theory()).is_ok());
    }

    #[test]
    fn em_counts() {
        let world = FinSetWorld::new(2);
        // identity: one algebra per carrier
        let id = FinMonad::new(world.clone(), MonadKind::Identity);
        assert_eq!(em_algebras(&id, 2).len(), 3);
        // maybe: pointed sets of size <= 2
        let maybe = FinMonad::new(world.clone(), MonadKind::Maybe);
        assert_eq!(em_algebras(&maybe, 2).len(), 3);
        // Z/2 x -: involutions on carriers <= 2
        let z2 = FinMonad::new(world.clone(), MonadKind::Product(FinMonoid::cyclic(2)));
        assert_eq!(em_algebras(&z2, 2).len(), 4);
    }

    #[test]
    fn kleisli_models_match_em() {
        let world = FinSetWorld::new(2);
        for kind in [
            MonadKind::Identity,
            MonadKind::Maybe,
            MonadKind::Product(FinMonoid::cyclic(2)),
        ] {
            let t = FinMonad::new(world.clone(), kind);
            let kt = kleisli(&t);
            let cmp = compare_kleisli_models(&kt);
            assert_eq!(cmp.models.len(), cmp.algebras.len());
            assert!(cmp.hom_counts_match);
        }
    }

    #[test]
    fn recognize_kleisli_roundtrip() {
        // the identity monad closes on any world and round-trips exactly
        let world = FinSetWorld::new(2);
        let t = FinMonad::new(world.clone(), MonadKind::Identity);
        let kt = kleisli(&t);
        match recognize_monadic(&kt.theory, world.cat()) {
            MonadicityResult::Monadic { monad, iso } => {
                monad.validate().unwrap();
                iso.validate().unwrap();
                for b in world.cat().objects() {
                    assert_eq!(world.size_of(monad.t.ob(b)), world.size_of(b));
                }
            }
            MonadicityResult::NotMonadic { reason, .. } => {
                panic!("kleisli theory must be monadic: {reason}")
            }
        }
        // monads whose functor escapes the truncation are honestly
        // rejected: the operations presheaf at the boundary stage has no
        // representing object inside the world
        for kind in [MonadKind::Maybe, MonadKind::Product(FinMonoid::cyclic(2))] {
            let t = FinMonad::new(world.clone(), kind);
            let kt = kleisli(&t);
            assert!(matches!(
                recognize_monadic(&kt.theory, world.cat()),
                MonadicityResult::NotMonadic { .. }
            ));
        }
        // a world-closed tabled monad: the terminal monad T X = 1
        let terminal = terminal_monad(&world);
        terminal.validate().unwrap();
        let kt = kleisli(&terminal);
        match recognize_monadic(&kt.theory, world.cat()) {
            MonadicityResult::Monadic { monad, iso } => {
                monad.validate().unwrap();
                iso.validate().unwrap();
                for b in world.cat().objects() {
                    assert_eq!(world.size_of(monad.t.ob(b)), 1);
                }
            }
            MonadicityResult::NotMonadic { reason, .. } => panic!("{reason}"),
        }
        // a closure operator on a chain poset, recognized from its
        // categorical kleisli theory
        let chain = Arc::new(crate::fincat::FinCategory::chain(3));
        let top = chain.object_count() - 1;
        let t_obj: Vec<usize> = chain.objects().map(|_| top).collect();
        let t_mor: Vec<usize> = chain.mors().map(|_| chain.identity(top)).collect();
        let t = FinFunctor::new(chain.clone(), chain.clone(), t_obj, t_mor);
        let unit_components: Vec<usize> = chain.objects().map(|o| chain.hom(o, top)[0]).collect();
        let id_f = FinFunctor::identity(&chain);
        let closure = CatMonad {
            unit: NatTransformation::new(id_f, t.clone(), unit_components),
            mult: NatTransformation::new(
                t.compose(&t),
                t.clone(),
                chain.objects().map(|_| chain.identity(top)).collect(),
            ),
            t,
        };
        closure.validate().unwrap();
        let ktc = kleisli_cat(&closure);
        match recognize_monadic(&ktc, &chain) {
            MonadicityResult::Monadic { monad, .. } => {
                for o in chain.objects() {
                    assert_eq!(monad.t.ob(o), top);
                }
            }
            MonadicityResult::NotMonadic { reason, .. } => panic!("{reason}"),
        }
    }

    #[test]
    fn identity_theory_recognized_as_identity_monad() {
        let world = FinSetWorld::new(2);
        let arities = Arc::new(world.cat().opposite());
        let l = ProtoTheory::identity_theory(&arities);
        match recognize_monadic(&l, world.cat()) {
            MonadicityResult::Monadic { monad, .. } => {
                for b in world.cat().objects() {
                    assert_eq!(monad.t.ob(b), b);
                }
            }
            MonadicityResult::NotMonadic { reason, .. } => panic!("{reason}"),
        }
    }

    #[test]
    fn non_representable_theory_rejected() {
        // E(M) for a 3-element monoid over sizes <= 2: the stage-1
        // operations presheaf has sizes (1, 3, 9) but no representing
        // object of size 3 exists in the world
        let world = FinSetWorld::new(2);
        let m3 = FinMonoid::cyclic(3);
        let kt = crate::groupsem::e_of_monoid(&m3, &world);
        match recognize_monadic(&kt.theory, world.cat()) {
            MonadicityResult::NotMonadic { .. } => {}
            MonadicityResult::Monadic { .. } => panic!("must not be monadic at this bound"),
        }
    }

    #[test]
    fn codensity_of_identity_is_identity() {
        let arrow = Arc::new(crate::fincat::FinCategory::walking_arrow());
        let u = FinFunctor::identity(&arrow);
        let cod = codensity_monad(&u).unwrap();
        for o in arrow.objects() {
            assert_eq!(cod.monad.t.ob(o), o);
        }
    }

    #[test]
    fn codensity_of_constant_functor() {
        // u = const_b from the terminal category into a finite-set world
        // with |b| = 2: at stage c = 1, the pointwise codensity value has
        // size 2^{|hom(1, b)|} = 4, while the full monad does not close on
        // any world and is honestly rejected
        let world = FinSetWorld::new(4);
        let one = Arc::new(crate::fincat::FinCategory::terminal());
        let b2 = world.object_of_size(2);
        let u = FinFunctor::new(
            one.clone(),
            world.cat().clone(),
            vec![b2],
            vec![world.cat().identity(b2)],
        );
        let c1 = world.object_of_size(1);
        let pw = codensity_at(&u, c1).unwrap();
        assert_eq!(world.size_of(pw.apex), 4);
        // comma-limit oracle: the set-level limit of the comma diagram
        let comma_sets = vec![world.set_of(b2).clone(); 2];
        let disc = Arc::new(crate::fincat::FinCategory::discrete("I", &["p", "q"]));
        let d = crate::setval::SetDiagram::new(
            disc,
            comma_sets,
            vec![
                SetFunction::identity(world.set_of(b2)),
                SetFunction::identity(world.set_of(b2)),
            ],
        );
        let oracle = crate::setval::limit_of_finset_diagram(&d);
        assert_eq!(world.size_of(pw.apex), oracle.apex.size());
        // the full monad needs 2^{2^c} at every stage, which escapes
        assert!(codensity_monad(&u).is_err());
    }

    fn diamond_poset() -> Arc<crate::fincat::FinCategory> {
        // bottom <= m1, m2 <= top
        let names = ["bot", "m1", "m2", "top"];
        Arc::new(crate::fincat::FinCategory::poset(
            "diamond",
            &names,
            |i, j| i == j || i == 0 || j == 3,
        ))
    }

    #[test]
    fn codensity_matches_structure() {
        // str(U) ~ kle(codensity) on poset bases, where the comma limits
        // exist at every stage
        // (a) U: 1 -> chain(2) picking the top
        let chain = Arc::new(crate::fincat::FinCategory::chain(2));
        let one = Arc::new(crate::fincat::FinCategory::terminal());
        let top = 1usize;
        let u = FinFunctor::new(
            one.clone(),
            chain.clone(),
            vec![top],
            vec![chain.identity(top)],
        );
        let cod = codensity_monad(&u).unwrap();
        let arit = canonical_aritation(&chain);
        let str_u = crate::proth::structure(&u, &arit).unwrap();
        codensity_structure_comparison(&u, &cod, &str_u, &arit).unwrap();
        // (b) U: disc2 -> diamond picking the two middle elements
        let diamond = diamond_poset();
        let disc2 = Arc::new(crate::fincat::FinCategory::discrete("D", &["p", "q"]));
        let m1 = diamond.object_index("m1").unwrap();
        let m2 = diamond.object_index("m2").unwrap();
        let u2 = FinFunctor::new(
            disc2.clone(),
            diamond.clone(),
            vec![m1, m2],
            vec![diamond.identity(m1), diamond.identity(m2)],
        );
        let cod2 = codensity_monad(&u2).unwrap();
        cod2.monad.validate().unwrap();
        let arit2 = canonical_aritation(&diamond);
        let str_u2 = crate::proth::structure(&u2, &arit2).unwrap();
        codensity_structure_comparison(&u2, &cod2, &str_u2, &arit2).unwrap();
    }

    #[test]
    fn kle_on_morphism_identity_to_maybe() {
        let world = FinSetWorld::new(2);
        let id = FinMonad::new(world.clone(), MonadKind::Identity);
        let maybe = FinMonad::new(world.clone(), MonadKind::Maybe);
        let kt = kleisli(&id);
        let km = kleisli(&maybe);
        // phi_b : b -> b + 1 is the inclusion
        let components: Vec<SetFunction> = world
            .cat()
            .objects()
            .map(|o| maybe.unit_at(world.set_of(o)))
            .collect();
        let phi = MonadMorphism {
            src: id.clone(),
            dst: maybe.clone(),
            components,
        };
        let tm = kle_on_morphism(&phi, &kt, &km).unwrap();
        tm.p.validate().unwrap();
        // fullness at this scale: every theory morphism arises from exactly
        // one monad morphism component family
        let all = kleisli_theory_morphisms(&kt, &km);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].p, tm.p);
    }

    #[test]
    fn identity_adjunction_structure() {
        let world = FinSetWorld::new(1);
        let base = world.cat().clone();
        let idf = FinFunctor::identity(&base);
        let adj = Adjunction {
            u: idf.clone(),
            f: idf.clone(),
            unit: NatTransformation::identity(&idf),
            counit: NatTransformation::identity(&idf),
        };
        let arit = canonical_aritation(&base);
        let str_u = crate::proth::structure(&idf, &arit).unwrap();
        let res = structure_of_right_adjoint(&adj, &str_u, &arit).unwrap();
        res.monad.validate().unwrap();
        for b in base.objects() {
            assert_eq!(res.monad.t.ob(b), b);
        }
    }

    #[test]
    fn em_structure_bijection_maybe() {
        // stages <= 2, carrier bound 3 hosts the free algebras; the
        // hom-sets of thr(U) are in bijection with functions b' -> T b
        let world = FinSetWorld::new(2);
        let maybe = FinMonad::new(world.clone(), MonadKind::Maybe);
        let em = EmStructure::new(maybe.clone(), 3, 3);
        for b in 0..=2usize {
            for b2 in 0..=2usize {
                let hs = em.hom_set(b, b2).unwrap();
                let expected = maybe.t_set(&FinSet::canonical(b)).size().pow(b2 as u32);
                let expected = if b2 == 0 { 1 } else { expected };
                assert_eq!(hs.seeds.len(), expected);
            }
        }
    }

    #[test]
    fn em_structure_matches_solver_at_small_bound() {
        // dual route: the seeded hom-set count equals the brute-force
        // count of natural families over the full EM category
        let world = FinSetWorld::new(1);
        let maybe = FinMonad::new(world.clone(), MonadKind::Maybe);
        let em = EmStructure::new(maybe.clone(), 2, 2);
        // build the EM category explicitly (carriers <= 2) and solve
        let algebras = em_algebras(&maybe, 2);
        let mut b = crate::fincat::CatBuilder::new("EM");
        let oname = |i: usize| format!("A{i}");
        for i in 0..algebras.len() {
            b.object(&oname(i));
        }
        let mut all: Vec<Vec<Vec<Vec<usize>>>> = vec![vec![vec![]; algebras.len()]; algebras.len()];
        let mname = |i: usize, j: usize, t: &[usize]| {
            format!(
                "{}>{}[{}]",
                oname(i),
                oname(j),
                t.iter().map(|v| v.to_string()).collect::<String>()
            )
        };
        for i in 0..algebras.len() {
            for j in 0..algebras.len() {
                let hs = em_homs(&maybe, &algebras[i], &algebras[j]);
                for t in &hs {
                    b.mor(&mname(i, j, t), &oname(i), &oname(j));
                }
                all[i][j] = hs;
            }
        }
        for (i, alg) in algebras.iter().enumerate() {
            let id: Vec<usize> = (0..alg.carrier.size()).collect();
            b.identity(&oname(i), &mname(i, i, &id));
        }
        for i in 0..algebras.len() {
            for j in 0..algebras.len() {
                for t1 in &all[i][j] {
                    for k in 0..algebras.len() {
                        for t2 in &all[j][k] {
                            let c: Vec<usize> = t1.iter().map(|&v| t2[v]).collect();
                            b.composite(&mname(j, k, t2), &mname(i, j, t1), &mname(i, k, &c));
                        }
                    }
                }
            }
        }
        let cat = Arc::new(b.build().unwrap());
        let obs: Vec<FinSet> = cat
            .objects()
            .map(|o| {
                let i: usize = cat.object_name(o)[1..].parse().unwrap();
                algebras[i].carrier.clone()
            })
            .collect();
        let mors: Vec<SetFunction> = cat
            .mors()
            .map(|m| {
                let name = cat.mor_name(m);
                let (pre, table) = name.split_once('[').unwrap();
                let (i, j) = pre.split_once('>').unwrap();
                let i: usize = i[1..].parse().unwrap();
                let j: usize = j[1..].parse().unwrap();
                let t: Vec<usize> = table
                    .trim_end_matches(']')
                    .chars()
                    .map(|c| c.to_digit(10).unwrap() as usize)
                    .collect();
                SetFunction::new(algebras[i].carrier.clone(), algebras[j].carrier.clone(), t)
            })
            .collect();
        let diagram = crate::setval::SetDiagram::new(cat.clone(), obs, mors);
        diagram.validate().unwrap();
        for b_size in 0..=1usize {
            for b2_size in 0..=1usize {
                let seeded = em.hom_set(b_size, b2_size).unwrap();
                let solver = crate::setval::set_nat_transformations(
                    &diagram.power(b_size),
                    &diagram.power(b2_size),
                );
                assert_eq!(seeded.seeds.len(), solver.len());
            }
        }
    }
}

#[cfg(test)]
mod adjunction_tests {
    use super::*;
    use crate::proth::canonical_aritation;

    #[test]
    fn chain_reflection_adjunction() {
        // B = chain(2), M = terminal; U picks the top element, its left
        // adjoint is the unique functor to the point. The induced monad is
        // the top-closure operator and the hom-wise comparison holds.
        let chain = Arc::new(crate::fincat::FinCategory::chain(2));
        let one = Arc::new(crate::fincat::FinCategory::terminal());
        let top = 1usize;
        let u = FinFunctor::new(
            one.clone(),
            chain.clone(),
            vec![top],
            vec![chain.identity(top)],
        );
        let f = FinFunctor::new(
            chain.clone(),
            one.clone(),
            vec![0, 0],
            vec![one.identity(0); chain.mor_count()],
        );
        let unit_components: Vec<usize> = chain.objects().map(|o| chain.hom(o, top)[0]).collect();
        let adj = Adjunction {
            unit: NatTransformation::new(
                FinFunctor::identity(&chain),
                u.compose(&f),
                unit_components,
            ),
            counit: NatTransformation::new(
                f.compose(&u),
                FinFunctor::identity(&one),
                vec![one.identity(0)],
            ),
            u: u.clone(),
            f,
        };
        adj.validate().unwrap();
        let arit = canonical_aritation(&chain);
        let str_u = crate::proth::structure(&u, &arit).unwrap();
        let res = structure_of_right_adjoint(&adj, &str_u, &arit).unwrap();
        for b in chain.objects() {
            assert_eq!(res.monad.t.ob(b), top);
        }
        // the comparison covers every hom pair
        for b in chain.objects() {
            for b2 in chain.objects() {
                assert_eq!(
                    res.bijections[b][b2].len(),
                    chain.hom(b2, res.monad.t.ob(b)).len()
                );
            }
        }
    }
}

#[cfg(test)]
mod codensity_adjunction_tests {
    use super::*;

    /// The codensity monad of a right adjoint is the adjunction monad.
    #[test]
    fn codensity_of_right_adjoint_is_adjunction_monad() {
        let chain = Arc::new(crate::fincat::FinCategory::chain(2));
        let one = Arc::new(crate::fincat::FinCategory::terminal());
        let top = 1usize;
        let u = FinFunctor::new(
            one.clone(),
            chain.clone(),
            vec![top],
            vec![chain.identity(top)],
        );
        let f = FinFunctor::new(
            chain.clone(),
            one.clone(),
            vec![0, 0],
            vec![one.identity(0); chain.mor_count()],
        );
        let unit_components: Vec<usize> = chain.objects().map(|o| chain.hom(o, top)[0]).collect();
        let adj = Adjunction {
            unit: NatTransformation::new(
                FinFunctor::identity(&chain),
                u.compose(&f),
                unit_components,
            ),
            counit: NatTransformation::new(
                f.compose(&u),
                FinFunctor::identity(&one),
                vec![one.identity(0)],
            ),
            u: u.clone(),
            f,
        };
        adj.validate().unwrap();
        let from_adj = adj.monad();
        let cod = codensity_monad(&u).unwrap();
        assert_eq!(cod.monad.t, from_adj.t);
        assert_eq!(cod.monad.unit, from_adj.unit);
        assert_eq!(cod.monad.mult, from_adj.mult);
    }
}
