//! Command-line front end: serialization, verification suites and the
//! individual engine operations as subcommands.
//!
//! Exit codes: 0 all checks pass, 1 a check fails, 2 input error.

mod formats;
mod report;
mod workspace;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use strsem_core::accept::{self, Bounds, Check, Status};
use strsem_core::eqpres;
use strsem_core::fincat::{validate_category, FinFunctor};
use strsem_core::groupsem::{self, FinMonoid};
use strsem_core::monads::{self, FinMonad, KleisliTheory, MonadKind};
use strsem_core::proth::{self, canonical_aritation};
use strsem_core::setval::FinSetWorld;
use strsem_core::topth::{self, Semantics, TopTheory};

use report::Report;
use workspace::Workspace;

#[derive(Parser)]
#[command(name = "strsem", about = "finite structure-semantics engine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// write the report to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Text,
    Structured,
}

#[derive(Args)]
struct WsArg {
    /// workspace manifest (lines of `kind name path`)
    #[arg(short = 'w', long)]
    workspace: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check the category laws of a category file
    Validate { path: PathBuf },
    /// Factor a workspace functor as bijective-on-objects then full-and-faithful
    Factorize {
        #[command(flatten)]
        ws: WsArg,
        /// functor name in the workspace
        #[arg(long)]
        functor: String,
    },
    /// Enumerate the models of a monoid proto-theory over a finite-set world
    Semantics {
        /// monoid file
        #[arg(long)]
        monoid: PathBuf,
        /// carrier size bound
        #[arg(long, default_value_t = 3)]
        bound: usize,
    },
    /// The structure proto-theory of a workspace functor under the canonical aritation
    Structure {
        #[command(flatten)]
        ws: WsArg,
        #[arg(long)]
        functor: String,
    },
    /// Run the adjunction bijections for a workspace theory functor pair
    CheckAdjunction {
        #[command(flatten)]
        ws: WsArg,
        /// functor name whose codomain is the base category
        #[arg(long)]
        functor: String,
        /// theory: name of a workspace functor that is bijective on objects
        /// out of the opposite of the base (defaults to the identity theory)
        #[arg(long)]
        theory: Option<String>,
    },
    /// The Kleisli proto-theory of a monad over a finite-set world
    Kleisli {
        #[arg(long)]
        monad: String,
        #[arg(long, default_value_t = 2)]
        bound: usize,
    },
    /// Recognise whether a monad's Kleisli theory is monadic on the truncation
    RecognizeMonad {
        #[arg(long)]
        monad: String,
        #[arg(long, default_value_t = 2)]
        bound: usize,
    },
    /// The pointwise codensity monad of a workspace functor
    Codensity {
        #[command(flatten)]
        ws: WsArg,
        #[arg(long)]
        functor: String,
    },
    /// Enumerate the models of an equational presentation
    Models {
        #[arg(long)]
        presentation: PathBuf,
        /// carrier size
        #[arg(long, default_value_t = 2)]
        size: usize,
    },
    /// The provability congruence on bounded terms
    Closure {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long, default_value_t = 1)]
        arity: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Soundness of the congruence against enumerated models
    Soundness {
        #[arg(long)]
        presentation: PathBuf,
        #[arg(long, default_value_t = 1)]
        arity: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 3)]
        carrier: usize,
    },
    /// The proto-theory of a monoid and its recognition roundtrip
    MonoidTheory {
        #[arg(long)]
        monoid: PathBuf,
        #[arg(long, default_value_t = 2)]
        bound: usize,
    },
    /// Truncated profinite completion of a finite group
    Profinite {
        #[arg(long)]
        monoid: PathBuf,
    },
    /// Compare the profinite completion with the natural endomorphisms of
    /// the forgetful functor
    PhiCheck {
        #[arg(long)]
        monoid: PathBuf,
        #[arg(long, default_value_t = 6)]
        bound: usize,
    },
    /// Is the discrete Kleisli theory of a monad complete?
    #[command(name = "complete?")]
    Complete {
        #[arg(long)]
        monad: String,
        #[arg(long, default_value_t = 2)]
        bound: usize,
    },
    /// The completion of the discrete Kleisli theory of a monad
    Completion {
        #[arg(long)]
        monad: String,
        #[arg(long, default_value_t = 2)]
        bound: usize,
    },
    /// Does a workspace category have enough subobjects?
    EnoughSubobjects {
        #[command(flatten)]
        ws: WsArg,
        #[arg(long)]
        category: String,
    },
    /// Run the full verification suite
    VerifyThesis {
        /// carrier/object size bound
        #[arg(long, default_value_t = 3)]
        bound: usize,
        /// monoid size bound
        #[arg(long, default_value_t = 4)]
        monoid_bound: usize,
        /// term depth bound
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// seed for generated instances
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let rendered = match cli.format {
                Format::Text => report.render_text(),
                Format::Structured => report.render_structured(),
            };
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{rendered}"),
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn parse_monad(spec: &str, world: &FinSetWorld) -> Result<FinMonad, String> {
    match spec {
        "identity" => Ok(FinMonad::new(world.clone(), MonadKind::Identity)),
        "maybe" => Ok(FinMonad::new(world.clone(), MonadKind::Maybe)),
        "terminal" => Ok(monads::terminal_monad(world)),
        s if s.starts_with('z') => {
            let n: usize = s[1..]
                .parse()
                .map_err(|_| format!("bad cyclic group `{s}`"))?;
            Ok(FinMonad::new(
                world.clone(),
                MonadKind::Product(FinMonoid::cyclic(n)),
            ))
        }
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            let m = formats::parse_monoid(&text).map_err(|e| format!("{path}: {e}"))?;
            Ok(FinMonad::new(world.clone(), MonadKind::Product(m)))
        }
    }
}

fn load_monoid(path: &PathBuf) -> Result<FinMonoid, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    formats::parse_monoid(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn check(name: &str, ok: bool, details: String) -> Check {
    Check {
        name: name.into(),
        status: if ok { Status::Pass } else { Status::Fail },
        details,
    }
}

fn kleisli_of(spec: &str, bound: usize) -> Result<(FinSetWorld, KleisliTheory), String> {
    let world = FinSetWorld::new(bound);
    let monad = parse_monad(spec, &world)?;
    monad.validate().map_err(|e| e.to_string())?;
    Ok((world, monads::kleisli(&monad)))
}

fn run(cli: &Cli) -> Result<Report, String> {
    let mut params = BTreeMap::new();
    let (suite, checks): (String, Vec<Check>) = match &cli.command {
        Command::Validate { path } => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let cat =
                formats::parse_category(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            let report = validate_category(&cat);
            let details = if report.is_ok() {
                format!(
                    "{} objects, {} morphisms, all laws hold",
                    cat.object_count(),
                    cat.mor_count()
                )
            } else {
                report.violations.join("; ")
            };
            (
                "validate".into(),
                vec![check("category laws", report.is_ok(), details)],
            )
        }
        Command::Factorize { ws, functor } => {
            let ws = Workspace::load(&ws.workspace)?;
            let f = ws
                .functors
                .get(functor)
                .ok_or_else(|| format!("unknown functor `{functor}`"))?;
            let fac = strsem_core::fincat::bo_ff_factorize(f);
            let ok = fac.e.is_bijective_on_objects()
                && fac.n.is_full_and_faithful().is_ok()
                && fac.n.compose(&fac.e) == *f;
            let mut details = format!(
                "intermediate `{}` with {} morphisms\n",
                fac.mid.name(),
                fac.mid.mor_count()
            );
            details.push_str(&formats::render_category(&fac.mid));
            details.push_str(&formats::render_functor("e", &fac.e));
            details.push_str(&formats::render_functor("n", &fac.n));
            (
                "factorize".into(),
                vec![check("bo/ff factorisation", ok, details)],
            )
        }
        Command::Semantics { monoid, bound } => {
            let m = load_monoid(monoid)?;
            params.insert("bound".into(), bound.to_string());
            let world = FinSetWorld::new(*bound);
            let cmp = groupsem::models_equal_msets(&m, &world);
            let per_size: Vec<String> = world
                .cat()
                .objects()
                .map(|o| {
                    let n = world.size_of(o);
                    let count = cmp.models.iter().filter(|x| x.carrier == o).count();
                    format!("size {n}: {count} models")
                })
                .collect();
            let mut details = per_size.join(", ");
            let kt = groupsem::e_of_monoid(&m, &world);
            if cmp.models.len() <= 12 && kt.theory.theory().mor_count() <= 200 {
                for x in &cmp.models {
                    details.push('\n');
                    details.push_str(&formats::render_model(&kt.theory, &world, x));
                }
            }
            (
                "semantics".into(),
                vec![check(
                    "models match direct actions",
                    cmp.hom_counts_match,
                    details,
                )],
            )
        }
        Command::Structure { ws, functor } => {
            let ws = Workspace::load(&ws.workspace)?;
            let u = ws
                .functors
                .get(functor)
                .ok_or_else(|| format!("unknown functor `{functor}`"))?;
            let arit = canonical_aritation(u.dst());
            let str_u = proth::structure(u, &arit).map_err(|e| e.to_string())?;
            let thr = str_u.theory.theory();
            let mut sizes = Vec::new();
            for x in thr.objects() {
                for y in thr.objects() {
                    sizes.push(format!(
                        "thr({},{})={}",
                        thr.object_name(x),
                        thr.object_name(y),
                        thr.hom(x, y).len()
                    ));
                }
            }
            let mut details = sizes.join(" ");
            if thr.mor_count() <= 20 {
                // render each operation as its natural component family
                for m in thr.mors() {
                    let a = str_u.theory.stage_of(thr.src(m));
                    let a2 = str_u.theory.stage_of(thr.dst(m));
                    let nat = strsem_core::fincat::NatTransformation::new(
                        arit.configurations(a, u),
                        arit.configurations(a2, u),
                        str_u.family(m).to_vec(),
                    );
                    details.push('\n');
                    details.push_str(&format!("{} = ", thr.mor_name(m)));
                    details.push('\n');
                    details.push_str(&formats::render_nat(&nat));
                }
            }
            (
                "structure".into(),
                vec![check("structure theory", true, details)],
            )
        }
        Command::CheckAdjunction {
            ws,
            functor,
            theory,
        } => {
            let ws = Workspace::load(&ws.workspace)?;
            let u = ws
                .functors
                .get(functor)
                .ok_or_else(|| format!("unknown functor `{functor}`"))?;
            let arit = canonical_aritation(u.dst());
            let l = match theory {
                None => proth::ProtoTheory::identity_theory(arit.arities()),
                Some(name) => {
                    let lf = ws
                        .functors
                        .get(name)
                        .ok_or_else(|| format!("unknown functor `{name}`"))?;
                    proth::ProtoTheory::new(lf.clone()).map_err(|e| e.to_string())?
                }
            };
            let modcat = proth::gamma_model_category(&l, &arit);
            let str_u = proth::structure(u, &arit).map_err(|e| e.to_string())?;
            let mut roundtrips = 0usize;
            let rs: Vec<FinFunctor> = strsem_core::fincat::enumerate_functors(u.src(), &modcat.cat)
                .into_iter()
                .filter(|r| modcat.forgetful.compose(r) == *u)
                .collect();
            let mut ok = true;
            for r in &rs {
                let s = proth::psi(&l, &modcat, r, &str_u).map_err(|e| e.to_string())?;
                let back =
                    proth::theta(&s, u, &arit, &modcat, &str_u).map_err(|e| e.to_string())?;
                ok &= back == *r;
                roundtrips += 1;
            }
            (
                "check-adjunction".into(),
                vec![check(
                    "psi/theta roundtrip",
                    ok,
                    format!("{roundtrips} functors over the base round-trip exactly"),
                )],
            )
        }
        Command::Kleisli { monad, bound } => {
            params.insert("bound".into(), bound.to_string());
            let (world, kt) = kleisli_of(monad, *bound)?;
            let theory = kt.theory.theory();
            let mut sizes = Vec::new();
            for x in world.cat().objects() {
                for y in world.cat().objects() {
                    sizes.push(format!(
                        "kle({},{})={}",
                        world.cat().object_name(x),
                        world.cat().object_name(y),
                        theory.hom(kt.theory.l().ob(x), kt.theory.l().ob(y)).len()
                    ));
                }
            }
            let valid = validate_category(theory).is_ok();
            let mut details = sizes.join(" ");
            if theory.mor_count() <= 200 {
                details.push('\n');
                details.push_str(&formats::render_theory(&kt.theory));
            }
            (
                "kleisli".into(),
                vec![check("kleisli theory", valid, details)],
            )
        }
        Command::RecognizeMonad { monad, bound } => {
            params.insert("bound".into(), bound.to_string());
            let (world, kt) = kleisli_of(monad, *bound)?;
            let result = match monads::recognize_monadic(&kt.theory, world.cat()) {
                monads::MonadicityResult::Monadic { monad, .. } => {
                    let sizes: Vec<String> = world
                        .cat()
                        .objects()
                        .map(|b| {
                            format!(
                                "T({})={}",
                                world.cat().object_name(b),
                                world.cat().object_name(monad.t.ob(b))
                            )
                        })
                        .collect();
                    check("monadic", true, sizes.join(" "))
                }
                monads::MonadicityResult::NotMonadic { reason, .. } => {
                    check("monadic", true, format!("not monadic: {reason}"))
                }
            };
            ("recognize-monad".into(), vec![result])
        }
        Command::Codensity { ws, functor } => {
            let ws = Workspace::load(&ws.workspace)?;
            let u = ws
                .functors
                .get(functor)
                .ok_or_else(|| format!("unknown functor `{functor}`"))?;
            match monads::codensity_monad(u) {
                Ok(cod) => {
                    let base = u.dst();
                    let sizes: Vec<String> = base
                        .objects()
                        .map(|b| {
                            format!(
                                "T({})={}",
                                base.object_name(b),
                                base.object_name(cod.monad.t.ob(b))
                            )
                        })
                        .collect();
                    (
                        "codensity".into(),
                        vec![check("pointwise codensity monad", true, sizes.join(" "))],
                    )
                }
                Err(e) => (
                    "codensity".into(),
                    vec![check("pointwise codensity monad", false, e.to_string())],
                ),
            }
        }
        Command::Models { presentation, size } => {
            let text = std::fs::read_to_string(presentation)
                .map_err(|e| format!("{}: {e}", presentation.display()))?;
            let p = formats::parse_presentation(&text)
                .map_err(|e| format!("{}: {e}", presentation.display()))?;
            params.insert("size".into(), size.to_string());
            let models = eqpres::enumerate_omega_models(&p, *size);
            (
                "models".into(),
                vec![check(
                    "model enumeration",
                    true,
                    format!("{} models on the {size}-element carrier", models.len()),
                )],
            )
        }
        Command::Closure {
            presentation,
            arity,
            depth,
        } => {
            let text = std::fs::read_to_string(presentation)
                .map_err(|e| format!("{}: {e}", presentation.display()))?;
            let p = formats::parse_presentation(&text)
                .map_err(|e| format!("{}: {e}", presentation.display()))?;
            params.insert("arity".into(), arity.to_string());
            params.insert("depth".into(), depth.to_string());
            let closure = eqpres::congruence_closure(&p, *arity, *depth);
            let classes = closure.classes();
            let mut lines = Vec::new();
            for class in &classes {
                let members: Vec<String> = class
                    .iter()
                    .map(|&i| closure.terms[i].display(&p.domain))
                    .collect();
                lines.push(format!("{{{}}}", members.join(", ")));
            }
            (
                "closure".into(),
                vec![check(
                    "provability congruence",
                    true,
                    format!(
                        "{} terms in {} classes: {}",
                        closure.terms.len(),
                        classes.len(),
                        lines.join(" ")
                    ),
                )],
            )
        }
        Command::Soundness {
            presentation,
            arity,
            depth,
            carrier,
        } => {
            let text = std::fs::read_to_string(presentation)
                .map_err(|e| format!("{}: {e}", presentation.display()))?;
            let p = formats::parse_presentation(&text)
                .map_err(|e| format!("{}: {e}", presentation.display()))?;
            params.insert("arity".into(), arity.to_string());
            params.insert("depth".into(), depth.to_string());
            params.insert("carrier".into(), carrier.to_string());
            let report = eqpres::soundness_check(&p, *arity, *depth, *carrier);
            let ok = report.violations.is_empty();
            (
                "soundness".into(),
                vec![check(
                    "soundness of the congruence",
                    ok,
                    format!(
                        "{} provable pairs sound; {} semantic equalities not provable at this depth",
                        report.provable_pairs,
                        report.unproved_semantic.len()
                    ),
                )],
            )
        }
        Command::MonoidTheory { monoid, bound } => {
            let m = load_monoid(monoid)?;
            params.insert("bound".into(), bound.to_string());
            let world = FinSetWorld::new(*bound);
            let kt = groupsem::e_of_monoid(&m, &world);
            let rec = groupsem::recognize_monoid_theory(&kt.theory, &world);
            let (ok, details) = match rec {
                groupsem::MonoidRecognition::Monoidal { monoid, .. } => (
                    monoid.isomorphic_to(&m),
                    format!(
                        "theory has {} morphisms; recognition recovers the monoid",
                        kt.theory.theory().mor_count()
                    ),
                ),
                groupsem::MonoidRecognition::NotMonoidal { reason } => (false, reason),
            };
            (
                "monoid-theory".into(),
                vec![check("monoid proto-theory", ok, details)],
            )
        }
        Command::Profinite { monoid } => {
            let g = load_monoid(monoid)?;
            let family = groupsem::full_quotient_family(&g);
            let comp = groupsem::profinite_completion(&g, &family).map_err(|e| e.to_string())?;
            let table = formats::render_monoid(&comp.group);
            let mut eta = comp.eta.clone();
            eta.sort();
            eta.dedup();
            let iso = eta.len() == g.size() && comp.group.size() == g.size();
            (
                "profinite".into(),
                vec![check(
                    "truncated profinite completion",
                    true,
                    format!(
                        "{} quotients, completion has {} elements, eta {}\n{}",
                        family.len(),
                        comp.group.size(),
                        if iso {
                            "is an isomorphism"
                        } else {
                            "is not an isomorphism"
                        },
                        table
                    ),
                )],
            )
        }
        Command::PhiCheck { monoid, bound } => {
            let g = load_monoid(monoid)?;
            params.insert("bound".into(), bound.to_string());
            let family = groupsem::full_quotient_family(&g);
            let phi = groupsem::phi_map(&g, *bound, &family).map_err(|e| e.to_string())?;
            let ok = phi.is_bijective && phi.is_monoid_hom && phi.unit_comparison;
            (
                "phi-check".into(),
                vec![check(
                    "completion vs natural endomorphisms",
                    ok,
                    format!(
                        "|completion|={} |Nat(U,U)|={} bijective={} hom={} cayley={}",
                        phi.completion.group.size(),
                        phi.nat.endos.len(),
                        phi.is_bijective,
                        phi.is_monoid_hom,
                        phi.unit_comparison
                    ),
                )],
            )
        }
        Command::Complete { monad, bound } | Command::Completion { monad, bound } => {
            params.insert("bound".into(), bound.to_string());
            let (world, kt) = kleisli_of(monad, *bound)?;
            let l = TopTheory::discrete(&kt.theory);
            let carrier_bound = world
                .cat()
                .objects()
                .map(|b| kt.monad.t_size(world.size_of(b)))
                .max()
                .unwrap()
                .max(world.max_size());
            let res = topth::completion(
                &l,
                &Semantics::Monadic {
                    kleisli: &kt,
                    carrier_bound,
                    full_check_cap: 3,
                },
            )
            .map_err(|e| e.to_string())?;
            let is_completion = matches!(cli.command, Command::Completion { .. });
            let name = if is_completion {
                "completion"
            } else {
                "complete?"
            };
            let mut detail = format!(
                "counit bijective={} dense={} complete={}; completed theory has {} morphisms",
                res.counit_bijective,
                res.counit_dense,
                res.is_complete,
                res.completed.theory.theory().mor_count()
            );
            if is_completion {
                // serialise the small hom-space topologies as open-set lists
                let cat = res.completed.theory.theory().clone();
                for x in cat.objects() {
                    for y in cat.objects() {
                        let homs = cat.hom(x, y);
                        if homs.is_empty() || homs.len() > 8 {
                            continue;
                        }
                        let points: Vec<String> =
                            homs.iter().map(|&m| cat.mor_name(m).to_string()).collect();
                        let opens = res.completed.topology(x, y).opens();
                        detail.push_str(&format!(
                            "\ntopology on hom({},{}):\n{}",
                            cat.object_name(x),
                            cat.object_name(y),
                            formats::render_topology(&points, &opens)
                        ));
                    }
                }
            }
            (name.into(), vec![check(name, res.is_complete, detail)])
        }
        Command::EnoughSubobjects { ws, category } => {
            let ws = Workspace::load(&ws.workspace)?;
            let cat = ws
                .categories
                .get(category)
                .ok_or_else(|| format!("unknown category `{category}`"))?;
            let report = topth::check_enough_subobjects(cat);
            let details = match &report.witness {
                Some(w) => w.clone(),
                None => {
                    "every product-preserving subfunctor of a representable is representable".into()
                }
            };
            (
                "enough-subobjects".into(),
                vec![check("enough subobjects", report.holds, details)],
            )
        }
        Command::VerifyThesis {
            bound,
            monoid_bound,
            depth,
            seed,
        } => {
            let bounds = Bounds {
                size: *bound,
                monoid: *monoid_bound,
                depth: *depth,
                seed: *seed,
            };
            params.insert("bound".into(), bound.to_string());
            params.insert("monoid-bound".into(), monoid_bound.to_string());
            params.insert("depth".into(), depth.to_string());
            params.insert("seed".into(), seed.to_string());
            ("verify-thesis".into(), accept::run_all(&bounds))
        }
    };
    Ok(Report {
        suite,
        params,
        checks,
    })
}
