use std::collections::{HashMap, HashSet};

use super::model::*;
use super::sexpr::{self, Pos, SExpr};
use super::{ParseError, GOAL_SUFFIX, SUPPORTED_REQUIREMENTS};

type Result<T> = std::result::Result<T, ParseError>;

fn expect_list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr]> {
    e.as_list()
        .ok_or_else(|| ParseError::syntax(e.pos(), format!("expected a list for {what}")))
}

fn expect_atom<'a>(e: &'a SExpr, what: &str) -> Result<&'a str> {
    e.as_atom()
        .ok_or_else(|| ParseError::syntax(e.pos(), format!("expected a symbol for {what}")))
}

/// Checks `(define (<kind> NAME) ...)` and returns NAME plus the sections.
fn unwrap_define<'a>(doc: &'a SExpr, kind: &str) -> Result<(&'a str, &'a [SExpr])> {
    let items = expect_list(doc, "define")?;
    if items.first().and_then(SExpr::as_atom) != Some("define") {
        return Err(ParseError::syntax(doc.pos(), "expected (define ...)"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| ParseError::syntax(doc.pos(), format!("missing ({kind} NAME)")))?;
    let h = expect_list(header, kind)?;
    if h.len() != 2 || h[0].as_atom() != Some(kind) {
        return Err(ParseError::syntax(header.pos(), format!("expected ({kind} NAME)")));
    }
    Ok((expect_atom(&h[1], "name")?, &items[2..]))
}

/// Parses `a b - t c` style lists. Untyped names get `object`.
fn parse_typed_list(items: &[SExpr], allow_vars: bool) -> Result<Vec<(TypedName, Pos)>> {
    let mut out = Vec::new();
    let mut pending: Vec<(String, Pos)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        match item {
            SExpr::Atom(s, pos) if s == "-" => {
                let ty = items
                    .get(i + 1)
                    .ok_or_else(|| ParseError::syntax(*pos, "'-' without a type"))?;
                let ty = match ty {
                    SExpr::Atom(t, _) => t.clone(),
                    SExpr::List(..) => {
                        return Err(ParseError::Unsupported {
                            pos: ty.pos(),
                            feature: "either types".into(),
                        })
                    }
                };
                if pending.is_empty() {
                    return Err(ParseError::syntax(*pos, "type annotation without names"));
                }
                for (name, p) in pending.drain(..) {
                    out.push((TypedName { name, ty: ty.clone() }, p));
                }
                i += 2;
            }
            SExpr::Atom(s, pos) => {
                let name = if allow_vars {
                    s.strip_prefix('?')
                        .ok_or_else(|| ParseError::syntax(*pos, format!("expected a variable, got '{s}'")))?
                        .to_string()
                } else {
                    if s.starts_with('?') {
                        return Err(ParseError::syntax(*pos, format!("unexpected variable '{s}'")));
                    }
                    s.clone()
                };
                pending.push((name, *pos));
                i += 1;
            }
            SExpr::List(_, pos) => return Err(ParseError::syntax(*pos, "unexpected list in typed list")),
        }
    }
    for (name, p) in pending {
        out.push((
            TypedName {
                name,
                ty: OBJECT_TYPE.to_string(),
            },
            p,
        ));
    }
    Ok(out)
}

fn check_requirements(items: &[SExpr]) -> Result<Vec<String>> {
    let mut reqs = Vec::new();
    for r in items {
        let name = expect_atom(r, "requirement")?;
        if !SUPPORTED_REQUIREMENTS.contains(&name) {
            return Err(ParseError::Unsupported {
                pos: r.pos(),
                feature: format!("requirement {name}"),
            });
        }
        if !reqs.iter().any(|x| x == name) {
            reqs.push(name.to_string());
        }
    }
    Ok(reqs)
}

const UNSUPPORTED_CONNECTIVES: &[&str] = &[
    "or", "imply", "exists", "forall", "when", "=", "increase", "decrease", "assign", "scale-up", "scale-down",
];

fn unsupported_construct(e: &SExpr) -> Option<ParseError> {
    let head = e.head()?;
    if UNSUPPORTED_CONNECTIVES.contains(&head) {
        let feature = match head {
            "=" => "equality".to_string(),
            "when" => "conditional effects (when)".to_string(),
            "increase" | "decrease" | "assign" | "scale-up" | "scale-down" => format!("numeric effects ({head})"),
            other => format!("'{other}' formulas"),
        };
        return Some(ParseError::Unsupported { pos: e.pos(), feature });
    }
    None
}

/// Flattens nested `and`s, skipping the empty conjunction `()`.
fn conjuncts<'a>(e: &'a SExpr, out: &mut Vec<&'a SExpr>) -> Result<()> {
    match e {
        SExpr::List(items, _) if items.is_empty() => Ok(()),
        SExpr::List(items, _) if items[0].as_atom() == Some("and") => {
            for c in &items[1..] {
                conjuncts(c, out)?;
            }
            Ok(())
        }
        SExpr::List(..) => {
            out.push(e);
            Ok(())
        }
        SExpr::Atom(_, pos) => Err(ParseError::syntax(*pos, "expected a formula")),
    }
}

pub fn parse_domain(text: &str) -> Result<DomainModel> {
    let doc = sexpr::parse_one(text)?;
    let (name, sections) = unwrap_define(&doc, "domain")?;
    let mut dom = DomainModel {
        name: name.to_string(),
        requirements: Vec::new(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        goal_predicates: Vec::new(),
        schemas: Vec::new(),
    };

    let mut declared_preds: Vec<(Predicate, Pos)> = Vec::new();
    let mut action_exprs: Vec<&SExpr> = Vec::new();

    for section in sections {
        let items = expect_list(section, "domain section")?;
        let key = items.first().and_then(SExpr::as_atom).unwrap_or("");
        match key {
            ":requirements" => dom.requirements = check_requirements(&items[1..])?,
            ":types" => {
                for (t, pos) in parse_typed_list(&items[1..], false)? {
                    if t.name == OBJECT_TYPE {
                        continue;
                    }
                    if dom.types.iter().any(|d| d.name == t.name) {
                        return Err(ParseError::Duplicate {
                            pos,
                            kind: "type",
                            name: t.name,
                        });
                    }
                    dom.types.push(TypeDecl {
                        name: t.name,
                        parent: t.ty,
                    });
                }
            }
            ":constants" => {
                for (c, pos) in parse_typed_list(&items[1..], false)? {
                    if dom.constants.iter().any(|d| d.name == c.name) {
                        return Err(ParseError::Duplicate {
                            pos,
                            kind: "constant",
                            name: c.name,
                        });
                    }
                    dom.constants.push(c);
                }
            }
            ":predicates" => {
                for p in &items[1..] {
                    let pl = expect_list(p, "predicate declaration")?;
                    let pname = pl
                        .first()
                        .ok_or_else(|| ParseError::syntax(p.pos(), "empty predicate declaration"))?;
                    let pname = expect_atom(pname, "predicate name")?;
                    let params: Vec<TypedName> =
                        parse_typed_list(&pl[1..], true)?.into_iter().map(|(t, _)| t).collect();
                    declared_preds.push((
                        Predicate {
                            name: pname.to_string(),
                            arity: params.len(),
                            origin: PredicateOrigin::Declared,
                            parameters: params,
                        },
                        p.pos(),
                    ));
                }
            }
            ":action" => action_exprs.push(section),
            ":functions" | ":derived" | ":durative-action" | ":axiom" | ":constraints" => {
                return Err(ParseError::Unsupported {
                    pos: section.pos(),
                    feature: format!("section {key}"),
                })
            }
            _ => return Err(ParseError::syntax(section.pos(), format!("unknown domain section '{key}'"))),
        }
    }

    // Parents named only as parents are declared implicitly.
    let mut implicit = Vec::new();
    for t in &dom.types {
        if t.parent != OBJECT_TYPE
            && !dom.types.iter().any(|d| d.name == t.parent)
            && !implicit.iter().any(|d: &TypeDecl| d.name == t.parent)
        {
            implicit.push(TypeDecl {
                name: t.parent.clone(),
                parent: OBJECT_TYPE.to_string(),
            });
        }
    }
    dom.types.extend(implicit);
    check_type_acyclic(&dom, doc.pos())?;

    let known_type = |t: &str| t == OBJECT_TYPE || dom.types.iter().any(|d| d.name == t);
    for c in &dom.constants {
        if !known_type(&c.ty) {
            return Err(ParseError::Undeclared {
                pos: doc.pos(),
                kind: "type",
                name: c.ty.clone(),
            });
        }
    }

    for t in &dom.types {
        dom.predicates.push(Predicate {
            name: t.name.clone(),
            arity: 1,
            origin: PredicateOrigin::Type,
            parameters: Vec::new(),
        });
    }
    for (p, pos) in declared_preds {
        if dom.predicates.iter().any(|q| q.name == p.name) {
            return Err(ParseError::Duplicate {
                pos,
                kind: "predicate",
                name: p.name,
            });
        }
        for param in &p.parameters {
            if !known_type(&param.ty) {
                return Err(ParseError::Undeclared {
                    pos,
                    kind: "type",
                    name: param.ty.clone(),
                });
            }
        }
        dom.predicates.push(p);
    }
    for p in &dom.predicates {
        let gname = format!("{}{}", p.name, GOAL_SUFFIX);
        if dom.predicates.iter().any(|q| q.name == gname) {
            return Err(ParseError::Duplicate {
                pos: doc.pos(),
                kind: "predicate (clashes with minted goal predicate)",
                name: gname,
            });
        }
        dom.goal_predicates.push(Predicate {
            name: gname,
            arity: p.arity,
            origin: p.origin,
            parameters: p.parameters.clone(),
        });
    }

    for a in action_exprs {
        let schema = parse_action(&dom, a)?;
        if dom.schemas.iter().any(|s| s.name == schema.name) {
            return Err(ParseError::Duplicate {
                pos: a.pos(),
                kind: "action",
                name: schema.name,
            });
        }
        dom.schemas.push(schema);
    }
    Ok(dom)
}

fn check_type_acyclic(dom: &DomainModel, pos: Pos) -> Result<()> {
    let parents: HashMap<&str, &str> = dom
        .types
        .iter()
        .map(|t| (t.name.as_str(), t.parent.as_str()))
        .collect();
    for t in &dom.types {
        let mut seen = HashSet::new();
        let mut cur = t.name.as_str();
        while cur != OBJECT_TYPE {
            if !seen.insert(cur) {
                return Err(ParseError::invalid(pos, format!("cyclic type hierarchy through '{cur}'")));
            }
            cur = parents.get(cur).copied().unwrap_or(OBJECT_TYPE);
        }
    }
    Ok(())
}

fn parse_action(dom: &DomainModel, section: &SExpr) -> Result<ActionSchema> {
    let items = section.as_list().unwrap();
    let name = items
        .get(1)
        .ok_or_else(|| ParseError::syntax(section.pos(), "action without a name"))?;
    let name = expect_atom(name, "action name")?.to_string();
    let mut parameters = Vec::new();
    let mut pre_expr = None;
    let mut eff_expr = None;
    let mut i = 2;
    while i < items.len() {
        let key = expect_atom(&items[i], "action keyword")?;
        let value = items
            .get(i + 1)
            .ok_or_else(|| ParseError::syntax(items[i].pos(), format!("missing value for {key}")))?;
        match key {
            ":parameters" => {
                let list = expect_list(value, ":parameters")?;
                for (p, pos) in parse_typed_list(list, true)? {
                    if parameters.iter().any(|q: &TypedName| q.name == p.name) {
                        return Err(ParseError::Duplicate {
                            pos,
                            kind: "parameter",
                            name: p.name,
                        });
                    }
                    if p.ty != OBJECT_TYPE && !dom.types.iter().any(|t| t.name == p.ty) {
                        return Err(ParseError::Undeclared {
                            pos,
                            kind: "type",
                            name: p.ty,
                        });
                    }
                    parameters.push(p);
                }
            }
            ":precondition" => pre_expr = Some(value),
            ":effect" => eff_expr = Some(value),
            other => {
                return Err(ParseError::Unsupported {
                    pos: items[i].pos(),
                    feature: format!("action field {other}"),
                })
            }
        }
        i += 2;
    }

    let ctx = SchemaContext { dom, params: &parameters };
    let mut precondition = Vec::new();
    if let Some(pre) = pre_expr {
        let mut parts = Vec::new();
        conjuncts(pre, &mut parts)?;
        for lit in parts {
            if let Some(err) = unsupported_construct(lit) {
                return Err(err);
            }
            let (positive, atom_expr) = split_negation(lit)?;
            if !positive && !dom.requirements.iter().any(|r| r == ":negative-preconditions") {
                return Err(ParseError::invalid(
                    lit.pos(),
                    "negative precondition requires :negative-preconditions",
                ));
            }
            let atom = ctx.atom(atom_expr, false)?;
            let l = Literal { positive, atom };
            if !precondition.contains(&l) {
                precondition.push(l);
            }
        }
    }
    let mut add_effects = Vec::new();
    let mut del_effects = Vec::new();
    if let Some(eff) = eff_expr {
        let mut parts = Vec::new();
        conjuncts(eff, &mut parts)?;
        for lit in parts {
            if let Some(err) = unsupported_construct(lit) {
                return Err(err);
            }
            let (positive, atom_expr) = split_negation(lit)?;
            let atom = ctx.atom(atom_expr, true)?;
            let target = if positive { &mut add_effects } else { &mut del_effects };
            if !target.contains(&atom) {
                target.push(atom);
            }
        }
    }
    Ok(ActionSchema {
        name,
        parameters,
        precondition,
        add_effects,
        del_effects,
    })
}

fn split_negation(e: &SExpr) -> Result<(bool, &SExpr)> {
    if e.head() == Some("not") {
        let items = e.as_list().unwrap();
        if items.len() != 2 {
            return Err(ParseError::syntax(e.pos(), "(not ...) takes exactly one argument"));
        }
        if let Some(err) = unsupported_construct(&items[1]) {
            return Err(err);
        }
        if items[1].head() == Some("not") || items[1].head() == Some("and") {
            return Err(ParseError::Unsupported {
                pos: e.pos(),
                feature: "negation of compound formulas".into(),
            });
        }
        Ok((false, &items[1]))
    } else {
        Ok((true, e))
    }
}

struct SchemaContext<'a> {
    dom: &'a DomainModel,
    params: &'a [TypedName],
}

impl SchemaContext<'_> {
    fn atom(&self, e: &SExpr, in_effect: bool) -> Result<AtomTemplate> {
        let items = expect_list(e, "atom")?;
        let pname = items
            .first()
            .ok_or_else(|| ParseError::syntax(e.pos(), "empty atom"))?;
        let pname = expect_atom(pname, "predicate name")?;
        let Some(pidx) = self.dom.predicate_index(pname) else {
            if self.dom.is_goal_predicate_name(pname) {
                return Err(ParseError::invalid(
                    e.pos(),
                    format!("goal predicate '{pname}' cannot appear in an action"),
                ));
            }
            return Err(ParseError::Undeclared {
                pos: e.pos(),
                kind: "predicate",
                name: pname.to_string(),
            });
        };
        let pred = &self.dom.predicates[pidx];
        if pred.arity != items.len() - 1 {
            return Err(ParseError::Arity {
                pos: e.pos(),
                predicate: pname.to_string(),
                expected: pred.arity,
                found: items.len() - 1,
            });
        }
        if in_effect && pred.origin == PredicateOrigin::Type {
            return Err(ParseError::invalid(
                e.pos(),
                format!("type predicate '{pname}' cannot appear in an effect"),
            ));
        }
        let mut args = Vec::with_capacity(items.len() - 1);
        for a in &items[1..] {
            let s = expect_atom(a, "argument")?;
            if let Some(var) = s.strip_prefix('?') {
                let idx = self
                    .params
                    .iter()
                    .position(|p| p.name == var)
                    .ok_or_else(|| ParseError::Undeclared {
                        pos: a.pos(),
                        kind: "variable",
                        name: s.to_string(),
                    })?;
                args.push(Term::Var(idx));
            } else {
                let idx = self
                    .dom
                    .constants
                    .iter()
                    .position(|c| c.name == s)
                    .ok_or_else(|| ParseError::Undeclared {
                        pos: a.pos(),
                        kind: "constant",
                        name: s.to_string(),
                    })?;
                args.push(Term::Const(idx));
            }
        }
        Ok(AtomTemplate { predicate: pidx, args })
    }
}

pub fn parse_instance(text: &str, dom: &DomainModel) -> Result<InstanceModel> {
    let doc = sexpr::parse_one(text)?;
    let (name, sections) = unwrap_define(&doc, "problem")?;
    let mut inst = InstanceModel {
        name: name.to_string(),
        domain_name: String::new(),
        objects: dom.constants.clone(),
        num_constants: dom.constants.len(),
        init: Vec::new(),
        goal: Vec::new(),
    };
    let mut init_exprs: &[SExpr] = &[];
    let mut goal_expr = None;
    for section in sections {
        let items = expect_list(section, "problem section")?;
        let key = items.first().and_then(SExpr::as_atom).unwrap_or("");
        match key {
            ":domain" => {
                let dname = items
                    .get(1)
                    .ok_or_else(|| ParseError::syntax(section.pos(), "missing domain name"))?;
                let dname = expect_atom(dname, "domain name")?;
                if dname != dom.name {
                    return Err(ParseError::invalid(
                        section.pos(),
                        format!("problem is for domain '{dname}', not '{}'", dom.name),
                    ));
                }
                inst.domain_name = dname.to_string();
            }
            ":requirements" => {
                check_requirements(&items[1..])?;
            }
            ":objects" => {
                for (o, pos) in parse_typed_list(&items[1..], false)? {
                    if inst.objects.iter().any(|x| x.name == o.name) {
                        return Err(ParseError::Duplicate {
                            pos,
                            kind: "object",
                            name: o.name,
                        });
                    }
                    if o.ty != OBJECT_TYPE && !dom.types.iter().any(|t| t.name == o.ty) {
                        return Err(ParseError::Undeclared {
                            pos,
                            kind: "type",
                            name: o.ty,
                        });
                    }
                    inst.objects.push(o);
                }
            }
            ":init" => init_exprs = &items[1..],
            ":goal" => {
                goal_expr = Some(
                    items
                        .get(1)
                        .ok_or_else(|| ParseError::syntax(section.pos(), "missing goal formula"))?,
                )
            }
            ":metric" | ":constraints" => {
                return Err(ParseError::Unsupported {
                    pos: section.pos(),
                    feature: format!("section {key}"),
                })
            }
            _ => return Err(ParseError::syntax(section.pos(), format!("unknown problem section '{key}'"))),
        }
    }
    if inst.domain_name.is_empty() {
        return Err(ParseError::syntax(doc.pos(), "missing (:domain NAME)"));
    }

    let mut seen = HashSet::new();
    for (oi, o) in inst.objects.iter().enumerate() {
        for t in dom.type_closure(&o.ty) {
            let pidx = dom.predicate_index(&t).expect("type predicate exists");
            let atom = GroundAtom {
                predicate: pidx,
                args: vec![oi],
            };
            if seen.insert(atom.clone()) {
                inst.init.push(atom);
            }
        }
    }
    for e in init_exprs {
        if let Some(err) = unsupported_construct(e) {
            return Err(err);
        }
        if e.head() == Some("not") {
            return Err(ParseError::invalid(e.pos(), "negative literal in :init"));
        }
        let atom = ground_atom(dom, &inst, e)?;
        if seen.insert(atom.clone()) {
            inst.init.push(atom);
        }
    }
    if let Some(g) = goal_expr {
        let mut parts = Vec::new();
        conjuncts(g, &mut parts)?;
        let mut gseen = HashSet::new();
        for lit in parts {
            if let Some(err) = unsupported_construct(lit) {
                return Err(err);
            }
            if lit.head() == Some("not") {
                return Err(ParseError::Unsupported {
                    pos: lit.pos(),
                    feature: "negative goals".into(),
                });
            }
            let atom = ground_atom(dom, &inst, lit)?;
            if gseen.insert(atom.clone()) {
                inst.goal.push(atom);
            }
        }
    }
    Ok(inst)
}

fn ground_atom(dom: &DomainModel, inst: &InstanceModel, e: &SExpr) -> Result<GroundAtom> {
    let items = expect_list(e, "ground atom")?;
    let pname = items
        .first()
        .ok_or_else(|| ParseError::syntax(e.pos(), "empty atom"))?;
    let pname = expect_atom(pname, "predicate name")?;
    let Some(pidx) = dom.predicate_index(pname) else {
        if dom.is_goal_predicate_name(pname) {
            return Err(ParseError::invalid(
                e.pos(),
                format!("goal predicate '{pname}' is minted automatically and cannot be used directly"),
            ));
        }
        return Err(ParseError::Undeclared {
            pos: e.pos(),
            kind: "predicate",
            name: pname.to_string(),
        });
    };
    let arity = dom.predicates[pidx].arity;
    if arity != items.len() - 1 {
        return Err(ParseError::Arity {
            pos: e.pos(),
            predicate: pname.to_string(),
            expected: arity,
            found: items.len() - 1,
        });
    }
    let mut args = Vec::with_capacity(arity);
    for a in &items[1..] {
        let s = expect_atom(a, "object")?;
        let idx = inst.object_index(s).ok_or_else(|| ParseError::Undeclared {
            pos: a.pos(),
            kind: "object",
            name: s.to_string(),
        })?;
        args.push(idx);
    }
    Ok(GroundAtom { predicate: pidx, args })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks;

    #[test]
    fn gripper_predicates() {
        let dom = parse_domain(benchmarks::GRIPPER_DOMAIN).unwrap();
        let got: Vec<(String, usize)> = dom.predicates.iter().map(|p| (p.name.clone(), p.arity)).collect();
        let expected = [
            ("room", 1),
            ("ball", 1),
            ("gripper", 1),
            ("at-robot", 1),
            ("at", 2),
            ("free", 1),
            ("carry", 2),
        ];
        assert_eq!(got.len(), expected.len());
        for (n, a) in expected {
            assert!(got.contains(&(n.to_string(), a)), "missing {n}/{a}");
        }
        for (p, g) in dom.predicates.iter().zip(&dom.goal_predicates) {
            assert_eq!(g.name, format!("{}_g", p.name));
            assert_eq!(g.arity, p.arity);
        }
        assert_eq!(dom.schemas.len(), 3);
    }

    #[test]
    fn zero_schema_domain() {
        let dom = parse_domain("(define (domain empty) (:predicates (p ?x)))").unwrap();
        assert!(dom.schemas.is_empty());
        assert_eq!(dom.goal_predicates[0].name, "p_g");
    }

    #[test]
    fn undeclared_predicate_in_effect() {
        let err = parse_domain(
            "(define (domain d) (:predicates (p ?x))
               (:action a :parameters (?x) :precondition (p ?x) :effect (q ?x)))",
        )
        .unwrap_err();
        assert!(matches!(err, ParseError::Undeclared { kind: "predicate", .. }), "{err}");

        let err = parse_domain(
            "(define (domain d) (:predicates (p ?x))
               (:action a :parameters (?x ?y) :effect (p ?x ?y)))",
        )
        .unwrap_err();
        assert!(matches!(err, ParseError::Arity { expected: 1, found: 2, .. }), "{err}");
    }

    #[test]
    fn unsupported_requirements_and_constructs() {
        let err = parse_domain("(define (domain d) (:requirements :strips :conditional-effects))").unwrap_err();
        match err {
            ParseError::Unsupported { feature, .. } => assert!(feature.contains(":conditional-effects")),
            other => panic!("{other:?}"),
        }
        let err = parse_domain(
            "(define (domain d) (:predicates (p ?x) (q ?x))
               (:action a :parameters (?x) :effect (when (p ?x) (q ?x))))",
        )
        .unwrap_err();
        assert!(matches!(err, ParseError::Unsupported { .. }));
        let err = parse_domain(
            "(define (domain d) (:requirements :equality) (:predicates (p ?x)))",
        )
        .unwrap_err();
        assert!(matches!(err, ParseError::Unsupported { .. }));
    }

    #[test]
    fn syntax_error_has_line_and_column() {
        let err = parse_domain("(define (domain d)\n  (:predicates (p ?x)\n").unwrap_err();
        assert_eq!(err.pos().line, 2);
        let err = parse_domain("(define (domain d)\n  (:bogus))").unwrap_err();
        assert_eq!(err.pos(), Pos { line: 2, column: 3 });
        assert!(err.to_string().contains("2:3"));
    }

    #[test]
    fn goal_predicates_rejected_in_actions_and_goals() {
        let err = parse_domain(
            "(define (domain d) (:predicates (p ?x))
               (:action a :parameters (?x) :effect (p_g ?x)))",
        )
        .unwrap_err();
        assert!(err.to_string().contains("goal predicate"));
        let dom = parse_domain("(define (domain d) (:predicates (p ?x)))").unwrap();
        let err = parse_instance(
            "(define (problem x) (:domain d) (:objects a) (:init) (:goal (p_g a)))",
            &dom,
        )
        .unwrap_err();
        assert!(err.to_string().contains("goal predicate"));
    }

    #[test]
    fn gripper_instance_one_ball() {
        let dom = parse_domain(benchmarks::GRIPPER_DOMAIN).unwrap();
        let inst = parse_instance(&benchmarks::gripper_problem(1), &dom).unwrap();
        assert_eq!(inst.goal.len(), 1);
        let at = dom.predicate_index("at").unwrap();
        let b = inst.object_index("ball1").unwrap();
        let room_b = inst.object_index("roomb").unwrap();
        assert_eq!(inst.goal[0], GroundAtom { predicate: at, args: vec![b, room_b] });
        let ball = dom.predicate_index("ball").unwrap();
        assert!(inst.init.contains(&GroundAtom { predicate: ball, args: vec![b] }));
    }

    #[test]
    fn empty_goal_is_valid() {
        let dom = parse_domain("(define (domain d) (:predicates (p ?x)))").unwrap();
        let inst = parse_instance("(define (problem x) (:domain d) (:objects a) (:init (p a)) (:goal (and)))", &dom)
            .unwrap();
        assert!(inst.goal.is_empty());
    }

    #[test]
    fn unknown_object_rejected() {
        let dom = parse_domain("(define (domain d) (:predicates (p ?x)))").unwrap();
        let err = parse_instance("(define (problem x) (:domain d) (:objects a) (:init (p b)) (:goal (p a)))", &dom)
            .unwrap_err();
        assert!(matches!(err, ParseError::Undeclared { kind: "object", .. }), "{err}");
    }

    #[test]
    fn subtypes_get_ancestor_predicates() {
        let dom = parse_domain(
            "(define (domain d) (:requirements :typing) (:types truck - vehicle vehicle - thing)
               (:predicates (at ?v - vehicle)))",
        )
        .unwrap();
        let inst = parse_instance("(define (problem x) (:domain d) (:objects t - truck) (:init) (:goal (at t)))", &dom)
            .unwrap();
        let names: Vec<&str> = inst.init.iter().map(|a| dom.predicates[a.predicate].name.as_str()).collect();
        assert_eq!(names, ["truck", "vehicle", "thing"]);
    }

    #[test]
    fn cyclic_types_rejected() {
        let err = parse_domain("(define (domain d) (:types a - b b - a))").unwrap_err();
        assert!(err.to_string().contains("cyclic"));
    }
}
