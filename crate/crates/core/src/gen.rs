//! Random generation of small well-typed programs inside the analyzable
//! fragment, used by the soundness and round-trip suites.
//!
//! Generated programs have no recursion (the contract call graph is a DAG,
//! hence trivially linear), no fields, and only definitely-initialised
//! variables are read, so every program passes the frontend and can be
//! explored by the interpreter.

use crate::ast::*;
use crate::diag::Span;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MAX_CLASSES: usize = 3;
const MAX_METHODS: usize = 3;
const MAX_STMTS: usize = 6;

pub fn generate(seed: u64) -> Program {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = rng.gen_range(1..=MAX_CLASSES);
    let methods_per_class: Vec<usize> =
        (0..n_classes).map(|_| rng.gen_range(1..=MAX_METHODS)).collect();

    // Method signatures: everything returns Unit; at most one parameter of
    // a random interface type.
    let mut sigs: Vec<Vec<Option<usize>>> = Vec::new();
    for &mcount in &methods_per_class {
        let mut ms = Vec::new();
        for _ in 0..mcount {
            let param = if rng.gen_bool(0.4) { Some(rng.gen_range(0..n_classes)) } else { None };
            ms.push(param);
        }
        sigs.push(ms);
    }

    let sp = Span::default();
    let mut classes = Vec::new();
    for ci in 0..n_classes {
        let mut methods = Vec::new();
        for mi in 0..sigs[ci].len() {
            let params = match sigs[ci][mi] {
                Some(p) => vec![Param {
                    ty: Type::Interface(format!("I{p}")),
                    name: "q".into(),
                    span: sp,
                }],
                None => vec![],
            };
            let (locals, body) =
                gen_body(&mut rng, n_classes, &sigs, Some((ci, mi)), sigs[ci][mi]);
            methods.push(MethodDecl {
                sig: MethodSig { ret: Type::Unit, name: format!("m{mi}"), params, span: sp },
                locals,
                body,
                span: sp,
            });
        }
        classes.push(ClassDecl {
            name: format!("C{ci}"),
            params: vec![],
            implements: vec![format!("I{ci}")],
            fields: vec![],
            methods,
            span: sp,
        });
    }
    let interfaces = (0..n_classes)
        .map(|ci| InterfaceDecl {
            name: format!("I{ci}"),
            methods: sigs[ci]
                .iter()
                .enumerate()
                .map(|(mi, p)| MethodSig {
                    ret: Type::Unit,
                    name: format!("m{mi}"),
                    params: match p {
                        Some(pc) => vec![Param {
                            ty: Type::Interface(format!("I{pc}")),
                            name: "q".into(),
                            span: sp,
                        }],
                        None => vec![],
                    },
                    span: sp,
                })
                .collect(),
            span: sp,
        })
        .collect();

    let (locals, body) = gen_body(&mut rng, n_classes, &sigs, None, None);
    Program { interfaces, classes, main: MainBlock { locals, body, span: sp } }
}

pub fn generate_source(seed: u64) -> String {
    crate::pretty::pretty(&generate(seed))
}

/// Tracks which locals hold a value.
struct Ctx {
    /// obj var name -> class index, initialised flag
    objs: Vec<(String, usize, bool)>,
    /// fut var name -> initialised flag
    futs: Vec<(String, bool)>,
}

impl Ctx {
    fn initialised_obj(&self, class: usize) -> Vec<String> {
        self.objs
            .iter()
            .filter(|(_, c, init)| *c == class && *init)
            .map(|(n, _, _)| n.clone())
            .collect()
    }

    fn initialised_futs(&self) -> Vec<String> {
        self.futs.iter().filter(|(_, i)| *i).map(|(n, _)| n.clone()).collect()
    }
}

fn gen_body(
    rng: &mut ChaCha8Rng,
    n_classes: usize,
    sigs: &[Vec<Option<usize>>],
    // The (class, method) being generated; None for main.
    ctx_method: Option<(usize, usize)>,
    param_class: Option<usize>,
) -> (Vec<Param>, Vec<Stmt>) {
    let sp = Span::default();
    let mut ctx = Ctx { objs: Vec::new(), futs: Vec::new() };
    let mut locals = Vec::new();
    for c in 0..n_classes {
        for tag in ["a", "b"] {
            let name = format!("{tag}{c}");
            locals.push(Param { ty: Type::Interface(format!("I{c}")), name: name.clone(), span: sp });
            ctx.objs.push((name, c, false));
        }
    }
    for i in 0..3 {
        let name = format!("f{i}");
        locals.push(Param { ty: Type::Fut(Box::new(Type::Unit)), name: name.clone(), span: sp });
        ctx.futs.push((name, false));
    }
    if let (Some((ci, _)), Some(pc)) = (ctx_method, param_class) {
        let _ = ci;
        ctx.objs.push(("q".to_string(), pc, true));
    }

    let n = rng.gen_range(1..=MAX_STMTS);
    let mut body = Vec::new();
    while body.len() < n {
        let Some(s) = gen_stmt(rng, n_classes, sigs, ctx_method, &mut ctx, 0) else { continue };
        // A stored asynchronous call is often synchronised right away,
        // the pattern that makes gets on busy cogs interesting.
        let sync_now = match &s {
            Stmt::Assign(Target::Name(f, _), ExprZ::AsyncCall { .. }) if rng.gen_bool(0.5) => {
                let e = Expr::Var(f.clone(), sp);
                Some(if rng.gen_bool(0.7) {
                    Stmt::Expr(ExprZ::Get { fut: e, span: sp })
                } else {
                    Stmt::Await(e, sp)
                })
            }
            _ => None,
        };
        body.push(s);
        if let Some(s2) = sync_now {
            body.push(s2);
        }
    }
    if body.is_empty() {
        body.push(Stmt::Skip(sp));
    }
    (locals, body)
}

fn gen_stmt(
    rng: &mut ChaCha8Rng,
    n_classes: usize,
    sigs: &[Vec<Option<usize>>],
    ctx_method: Option<(usize, usize)>,
    ctx: &mut Ctx,
    depth: usize,
) -> Option<Stmt> {
    let sp = Span::default();
    // Calls may only target strictly later methods in the global
    // (class, method) order, so the call graph is acyclic.
    let callable = |class: usize, mi: usize| match ctx_method {
        None => true,
        Some((ci, mj)) => (class, mi) > (ci, mj),
    };
    for _ in 0..8 {
        match rng.gen_range(0..10) {
            // new / new cog
            0 | 1 => {
                let class = rng.gen_range(0..n_classes);
                let slot = rng.gen_range(0..ctx.objs.len());
                let (name, vclass, _) = ctx.objs[slot].clone();
                if vclass != class || name == "q" {
                    continue;
                }
                let cog = rng.gen_bool(0.45);
                ctx.objs[slot].2 = true;
                return Some(Stmt::Assign(
                    Target::Name(name, sp),
                    ExprZ::New { class: format!("C{class}"), args: vec![], cog, span: sp },
                ));
            }
            // async call storing the future
            2..=4 => {
                let (recv, class) = pick_receiver(rng, ctx, ctx_method)?;
                let candidates: Vec<usize> =
                    (0..sigs[class].len()).filter(|&mi| callable(class, mi)).collect();
                if candidates.is_empty() {
                    continue;
                }
                let mi = candidates[rng.gen_range(0..candidates.len())];
                let args = match sigs[class][mi] {
                    Some(pc) => {
                        let opts = ctx.initialised_obj(pc);
                        if opts.is_empty() {
                            continue;
                        }
                        vec![Expr::Var(opts[rng.gen_range(0..opts.len())].clone(), sp)]
                    }
                    None => vec![],
                };
                let fslot = rng.gen_range(0..ctx.futs.len());
                let fname = ctx.futs[fslot].0.clone();
                ctx.futs[fslot].1 = true;
                return Some(Stmt::Assign(
                    Target::Name(fname, sp),
                    ExprZ::AsyncCall { recv, method: format!("m{mi}"), args, span: sp },
                ));
            }
            // get / await on a stored future
            5 | 6 => {
                let futs = ctx.initialised_futs();
                if futs.is_empty() {
                    continue;
                }
                let f = futs[rng.gen_range(0..futs.len())].clone();
                let e = Expr::Var(f, sp);
                return Some(if rng.gen_bool(0.5) {
                    Stmt::Await(e, sp)
                } else {
                    Stmt::Expr(ExprZ::Get { fut: e, span: sp })
                });
            }
            // sync call, result discarded
            7 => {
                let (recv, class) = pick_receiver(rng, ctx, ctx_method)?;
                let candidates: Vec<usize> =
                    (0..sigs[class].len()).filter(|&mi| callable(class, mi)).collect();
                if candidates.is_empty() {
                    continue;
                }
                let mi = candidates[rng.gen_range(0..candidates.len())];
                let args = match sigs[class][mi] {
                    Some(pc) => {
                        let opts = ctx.initialised_obj(pc);
                        if opts.is_empty() {
                            continue;
                        }
                        vec![Expr::Var(opts[rng.gen_range(0..opts.len())].clone(), sp)]
                    }
                    None => vec![],
                };
                return Some(Stmt::Expr(ExprZ::SyncCall {
                    recv,
                    method: format!("m{mi}"),
                    args,
                    span: sp,
                }));
            }
            // conditional on a literal
            8 if depth == 0 => {
                let mut then_branch = Vec::new();
                let mut else_branch = Vec::new();
                // Branch bodies only read variables initialised before the
                // conditional; their own initialisations are not recorded.
                let mut snapshot_t = snapshot(ctx);
                let mut snapshot_e = snapshot(ctx);
                for _ in 0..rng.gen_range(1..=2) {
                    if let Some(s) =
                        gen_stmt(rng, n_classes, sigs, ctx_method, &mut snapshot_t, 1)
                    {
                        then_branch.push(s);
                    }
                }
                for _ in 0..rng.gen_range(0..=2) {
                    if let Some(s) =
                        gen_stmt(rng, n_classes, sigs, ctx_method, &mut snapshot_e, 1)
                    {
                        else_branch.push(s);
                    }
                }
                if then_branch.is_empty() {
                    then_branch.push(Stmt::Skip(sp));
                }
                return Some(Stmt::If {
                    cond: Expr::Bool(rng.gen_bool(0.5), sp),
                    then_branch,
                    else_branch,
                    span: sp,
                });
            }
            _ => return Some(Stmt::Skip(sp)),
        }
    }
    Some(Stmt::Skip(sp))
}

fn snapshot(ctx: &Ctx) -> Ctx {
    Ctx { objs: ctx.objs.clone(), futs: ctx.futs.clone() }
}

fn pick_receiver(
    rng: &mut ChaCha8Rng,
    ctx: &Ctx,
    ctx_method: Option<(usize, usize)>,
) -> Option<(Expr, usize)> {
    let sp = Span::default();
    // `this` as receiver half the time inside a method body.
    if let Some((ci, _)) = ctx_method {
        if rng.gen_bool(0.5) {
            return Some((Expr::This(sp), ci));
        }
    }
    let ready: Vec<(String, usize)> = ctx
        .objs
        .iter()
        .filter(|(_, _, init)| *init)
        .map(|(n, c, _)| (n.clone(), *c))
        .collect();
    if ready.is_empty() {
        return None;
    }
    let (name, class) = ready[rng.gen_range(0..ready.len())].clone();
    Some((Expr::Var(name, sp), class))
}
