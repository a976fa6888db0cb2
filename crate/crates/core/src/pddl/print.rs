//! Pretty-printing back to PDDL. Re-parsing the output yields an equal model.

use std::fmt::Write;

use super::model::*;

fn typed(name: &str, ty: &str, var: bool) -> String {
    let q = if var { "?" } else { "" };
    if ty == OBJECT_TYPE {
        format!("{q}{name}")
    } else {
        format!("{q}{name} - {ty}")
    }
}

fn template(dom: &DomainModel, params: &[TypedName], a: &AtomTemplate) -> String {
    let mut s = format!("({}", dom.predicates[a.predicate].name);
    for t in &a.args {
        s.push(' ');
        match t {
            Term::Var(i) => {
                s.push('?');
                s.push_str(&params[*i].name);
            }
            Term::Const(c) => s.push_str(&dom.constants[*c].name),
        }
    }
    s.push(')');
    s
}

impl DomainModel {
    pub fn to_pddl(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "(define (domain {})", self.name);
        if !self.requirements.is_empty() {
            let _ = writeln!(out, "  (:requirements {})", self.requirements.join(" "));
        }
        if !self.types.is_empty() {
            let types: Vec<String> = self.types.iter().map(|t| format!("{} - {}", t.name, t.parent)).collect();
            let _ = writeln!(out, "  (:types {})", types.join(" "));
        }
        if !self.constants.is_empty() {
            let cs: Vec<String> = self.constants.iter().map(|c| typed(&c.name, &c.ty, false)).collect();
            let _ = writeln!(out, "  (:constants {})", cs.join(" "));
        }
        out.push_str("  (:predicates");
        for p in self.predicates.iter().filter(|p| p.origin == PredicateOrigin::Declared) {
            out.push_str(" (");
            out.push_str(&p.name);
            for param in &p.parameters {
                out.push(' ');
                out.push_str(&typed(&param.name, &param.ty, true));
            }
            out.push(')');
        }
        out.push_str(")\n");
        for s in &self.schemas {
            let _ = writeln!(out, "  (:action {}", s.name);
            let params: Vec<String> = s.parameters.iter().map(|p| typed(&p.name, &p.ty, true)).collect();
            let _ = writeln!(out, "   :parameters ({})", params.join(" "));
            let pre: Vec<String> = s
                .precondition
                .iter()
                .map(|l| {
                    let a = template(self, &s.parameters, &l.atom);
                    if l.positive {
                        a
                    } else {
                        format!("(not {a})")
                    }
                })
                .collect();
            let _ = writeln!(out, "   :precondition (and {})", pre.join(" "));
            let eff: Vec<String> = s
                .add_effects
                .iter()
                .map(|a| template(self, &s.parameters, a))
                .chain(s.del_effects.iter().map(|a| format!("(not {})", template(self, &s.parameters, a))))
                .collect();
            let _ = writeln!(out, "   :effect (and {}))", eff.join(" "));
        }
        out.push_str(")\n");
        out
    }
}

impl InstanceModel {
    pub fn to_pddl(&self, dom: &DomainModel) -> String {
        let ground = |a: &GroundAtom| {
            let mut s = format!("({}", dom.predicates[a.predicate].name);
            for &o in &a.args {
                s.push(' ');
                s.push_str(&self.objects[o].name);
            }
            s.push(')');
            s
        };
        let mut out = String::new();
        let _ = writeln!(out, "(define (problem {})", self.name);
        let _ = writeln!(out, "  (:domain {})", self.domain_name);
        let objs: Vec<String> = self.objects[self.num_constants..]
            .iter()
            .map(|o| typed(&o.name, &o.ty, false))
            .collect();
        let _ = writeln!(out, "  (:objects {})", objs.join(" "));
        // Type atoms implied by the object declarations are regenerated on parse.
        let implied = |a: &GroundAtom| {
            let p = &dom.predicates[a.predicate];
            p.origin == PredicateOrigin::Type
                && dom.type_closure(&self.objects[a.args[0]].ty).contains(&p.name)
        };
        let init: Vec<String> = self.init.iter().filter(|a| !implied(a)).map(ground).collect();
        let _ = writeln!(out, "  (:init {})", init.join(" "));
        let goal: Vec<String> = self.goal.iter().map(ground).collect();
        let _ = writeln!(out, "  (:goal (and {})))", goal.join(" "));
        out
    }
}
