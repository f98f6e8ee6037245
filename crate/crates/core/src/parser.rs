//! Concrete syntax for terms, specifications and formulas, and the
//! matching pretty-printer.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use crate::action::{is_action_name, ActionLabel, ActionSet, Name, RenamingMap};
use crate::error::{Error, Result};
use crate::modal::Formula;
use crate::term::{RecSpec, Term};

/// A parsed source file: optional alphabet pragma, named specifications and
/// a root term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFile {
    pub sigma: Option<ActionSet>,
    pub specs: Vec<Arc<RecSpec>>,
    pub root: Term,
}

const KEYWORDS: &[&str] = &["tau", "t", "hide", "rename", "theta", "psi"];

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    specs: BTreeMap<String, Arc<RecSpec>>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            pos: 0,
            specs: BTreeMap::new(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn location(&self, at: usize) -> (usize, usize) {
        let before = &self.src[..at];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }

    fn error_at<T>(&self, at: usize, expected: &str) -> Result<T> {
        let (line, col) = self.location(at);
        Err(Error::Syntax {
            line,
            col,
            expected: expected.to_string(),
        })
    }

    fn error<T>(&self, expected: &str) -> Result<T> {
        self.error_at(self.pos, expected)
    }

    fn skip_ws(&mut self) {
        loop {
            let r = self.rest();
            let trimmed = r.trim_start();
            self.pos += r.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos += trimmed.find('\n').unwrap_or(trimmed.len());
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.rest().is_empty()
    }

    fn peek(&mut self, tok: &str) -> bool {
        self.skip_ws();
        self.rest().starts_with(tok)
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.peek(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.error(&format!("`{tok}`"))
        }
    }

    fn peek_ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let r = self.rest();
        let len = r
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_alphanumeric() || c == '_') || (i == 0 && c.is_ascii_digit()))
            .map_or(r.len(), |(i, _)| i);
        (len > 0).then(|| &r[..len])
    }

    fn ident(&mut self, what: &str) -> Result<&'a str> {
        match self.peek_ident() {
            Some(id) => {
                self.pos += id.len();
                Ok(id)
            }
            None => self.error(what),
        }
    }

    fn action_name(&mut self) -> Result<&'a str> {
        let at = {
            self.skip_ws();
            self.pos
        };
        let id = self.ident("action name")?;
        if !is_action_name(id) {
            return self.error_at(at, "visible action name (not a reserved word)");
        }
        Ok(id)
    }

    /// `acts := (ident ("," ident)*)?`, up to and excluding the closer.
    fn acts(&mut self, close: &str) -> Result<ActionSet> {
        let mut set = ActionSet::new();
        if self.peek(close) {
            return Ok(set);
        }
        loop {
            set.insert(self.action_name()?);
            if !self.eat(",") {
                return Ok(set);
            }
        }
    }

    fn braced_acts(&mut self) -> Result<ActionSet> {
        let s = self.acts("}")?;
        self.expect("}")?;
        Ok(s)
    }

    // ---- terms ----

    fn term(&mut self) -> Result<Term> {
        let mut acc = self.par()?;
        while self.eat("+") {
            let r = self.par()?;
            acc = Term::choice(acc, r);
        }
        Ok(acc)
    }

    fn par(&mut self) -> Result<Term> {
        let mut acc = self.prefix()?;
        while self.eat("||{") {
            let s = self.braced_acts()?;
            let r = self.prefix()?;
            acc = Term::par(s, acc, r);
        }
        Ok(acc)
    }

    fn prefix(&mut self) -> Result<Term> {
        if let Some(id) = self.peek_ident() {
            let save = self.pos;
            self.pos += id.len();
            if self.eat(".") {
                let a = match id {
                    "tau" => ActionLabel::Tau,
                    "t" => ActionLabel::Timeout,
                    _ if is_action_name(id) => ActionLabel::visible(id),
                    _ => return self.error_at(save, "action name"),
                };
                let body = self.prefix()?;
                return Ok(Term::prefix(a, body));
            }
            self.pos = save;
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Term> {
        self.skip_ws();
        let start = self.pos;
        if self.eat("(") {
            let t = self.term()?;
            self.expect(")")?;
            return Ok(t);
        }
        if self.eat("<") {
            let x = self.ident("recursion variable")?;
            self.expect("|")?;
            let name = self.ident("specification name")?;
            self.expect(">")?;
            let Some(spec) = self.specs.get(name) else {
                return Err(Error::UnboundReference(format!("specification `{name}`")));
            };
            if !spec.binds(x) {
                return Err(Error::UnboundReference(format!("<{x}|{name}>")));
            }
            return Ok(Term::Rec(Name::from(x), spec.clone()));
        }
        if self.rest().starts_with('0') {
            self.pos += 1;
            return Ok(Term::Nil);
        }
        let Some(id) = self.peek_ident() else {
            return self.error("term");
        };
        self.pos += id.len();
        match id {
            "hide" if self.eat("{") => {
                let i = self.braced_acts()?;
                let body = self.paren_term()?;
                Ok(Term::hide(i, body))
            }
            "psi" if self.eat("{") => {
                let x = self.braced_acts()?;
                let body = self.paren_term()?;
                Ok(Term::psi(x, body))
            }
            "theta" if self.eat("{") => {
                let l = self.braced_acts()?;
                self.expect("{")?;
                let u = self.braced_acts()?;
                let body = self.paren_term()?;
                Term::theta(l, u, body).or_else(|_| self.error_at(start, "theta{L}{U} with L a subset of U"))
            }
            "rename" if self.eat("{") => {
                let mut r = RenamingMap::new();
                if !self.peek("}") {
                    loop {
                        let a = self.action_name()?;
                        self.expect("->")?;
                        let b = self.action_name()?;
                        r.insert(a, b);
                        if !self.eat(",") {
                            break;
                        }
                    }
                }
                self.expect("}")?;
                let body = self.paren_term()?;
                Ok(Term::rename(r, body))
            }
            _ if KEYWORDS.contains(&id) => self.error_at(start, "term"),
            _ => Ok(Term::var(id)),
        }
    }

    fn paren_term(&mut self) -> Result<Term> {
        self.expect("(")?;
        let t = self.term()?;
        self.expect(")")?;
        Ok(t)
    }

    /// `ident = term` equations until `@end` or end of input.
    fn equations(&mut self, name: &str) -> Result<RecSpec> {
        let mut eqs: Vec<(String, Term)> = Vec::new();
        while !self.at_end() && !self.peek("@end") {
            self.skip_ws();
            let at = self.pos;
            let x = self.ident("equation variable")?;
            if KEYWORDS.contains(&x) {
                return self.error_at(at, "equation variable");
            }
            self.expect("=")?;
            let body = self.term()?;
            if eqs.iter().any(|(y, _)| y == x) {
                return Err(Error::DuplicateEquation(x.to_string()));
            }
            eqs.push((x.to_string(), body));
        }
        let spec = RecSpec::new(name, eqs)?;
        if let Some(v) = spec.free_vars().iter().next() {
            return Err(Error::UnboundReference(v.to_string()));
        }
        if !spec.is_valid() {
            return Err(Error::Validity(format!("specification `{name}`")));
        }
        Ok(spec)
    }

    // ---- formulas ----

    fn formula(&mut self) -> Result<Rc<Formula>> {
        let mut acc = self.unary()?;
        while self.eat("<eps_{") {
            let x = self.braced_acts()?;
            self.expect(">")?;
            let r = self.unary()?;
            acc = Rc::new(Formula::EpsX(acc, x, r));
        }
        Ok(acc)
    }

    fn act_label(&mut self) -> Result<ActionLabel> {
        let id = self.ident("action")?;
        Ok(match id {
            "tau" => ActionLabel::Tau,
            "t" => ActionLabel::Timeout,
            _ if is_action_name(id) => ActionLabel::visible(id),
            _ => return self.error("action"),
        })
    }

    fn unary(&mut self) -> Result<Rc<Formula>> {
        self.skip_ws();
        if self.eat("(") {
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        if self.eat("!") {
            return Ok(Rc::new(Formula::Not(self.unary()?)));
        }
        if self.eat("&(") {
            let mut items = Vec::new();
            if !self.peek(")") {
                loop {
                    items.push(self.formula()?);
                    if !self.eat(",") {
                        break;
                    }
                }
            }
            self.expect(")")?;
            return Ok(Rc::new(Formula::And(items)));
        }
        if self.eat("[{") {
            let x = self.acts("}")?;
            self.expect("}]")?;
            let body = self.unary()?;
            return Ok(Formula::env(x, body));
        }
        if self.eat("<") {
            let a = self.act_label()?;
            let hat = self.eat("^");
            self.expect(">")?;
            let body = self.unary()?;
            return Ok(Rc::new(if hat {
                Formula::HatDiamond(a, body)
            } else {
                Formula::Diamond(a, body)
            }));
        }
        if self.eat("eps(") {
            let f = self.formula()?;
            if self.eat("<") {
                let a = self.act_label()?;
                self.expect("^>")?;
                let g = self.formula()?;
                self.expect(")")?;
                return Ok(Rc::new(Formula::EpsStep(f, a, g)));
            }
            self.expect(")")?;
            return Ok(Rc::new(Formula::Eps(f)));
        }
        match self.peek_ident() {
            Some("T") => {
                self.pos += 1;
                Ok(Rc::new(Formula::Top))
            }
            Some("stable") => {
                self.pos += "stable".len();
                Ok(Rc::new(Formula::Stable))
            }
            _ => self.error("formula"),
        }
    }

    fn finish(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.error("end of input")
        }
    }
}

/// Parses a term; `<x|NAME>` references need [`parse_term_with`].
pub fn parse_term(text: &str) -> Result<Term> {
    parse_term_with(text, &[])
}

pub fn parse_term_with(text: &str, specs: &[Arc<RecSpec>]) -> Result<Term> {
    let mut p = Parser::new(text);
    for s in specs {
        p.specs.insert(s.name().to_string(), s.clone());
    }
    let t = p.term()?;
    p.finish()?;
    if !t.is_valid() {
        return Err(Error::Validity(render_term(&t)));
    }
    Ok(t)
}

/// Parses `name = term` equations into a specification named `S`.
pub fn parse_spec(text: &str) -> Result<RecSpec> {
    parse_spec_named("S", text)
}

pub fn parse_spec_named(name: &str, text: &str) -> Result<RecSpec> {
    let mut p = Parser::new(text);
    let s = p.equations(name)?;
    p.finish()?;
    Ok(s)
}

/// Parses a source file:
///
/// ```text
/// # comment
/// @sigma a, b
/// @spec S
///   x = a.y
///   y = t.x
/// @end
/// <x|S> + b.0
/// ```
pub fn parse_source(text: &str) -> Result<SourceFile> {
    let mut p = Parser::new(text);
    let mut sigma = None;
    let mut specs = Vec::new();
    loop {
        if p.eat("@sigma") {
            let line = p.rest().split(['\n', '#']).next().unwrap_or("");
            let mut s = ActionSet::new();
            for (i, a) in line.split(',').map(str::trim).enumerate() {
                if a.is_empty() && i == 0 && !line.contains(',') {
                    break;
                }
                if !is_action_name(a) {
                    return p.error("comma-separated action names after @sigma");
                }
                s.insert(a);
            }
            p.pos += line.len();
            sigma = Some(sigma.map_or(s.clone(), |old: ActionSet| old.union(&s)));
        } else if p.eat("@spec") {
            p.skip_ws();
            let at = p.pos;
            let name = p.ident("specification name")?.to_string();
            if p.specs.contains_key(&name) {
                return p.error_at(at, "fresh specification name");
            }
            let spec = Arc::new(p.equations(&name)?);
            p.expect("@end")?;
            p.specs.insert(name, spec.clone());
            specs.push(spec);
        } else {
            break;
        }
    }
    let root = p.term()?;
    p.finish()?;
    if !root.is_valid() {
        return Err(Error::Validity(render_term(&root)));
    }
    Ok(SourceFile { sigma, specs, root })
}

pub fn parse_formula(text: &str) -> Result<Rc<Formula>> {
    let mut p = Parser::new(text);
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

// ---- rendering ----

struct Names(HashMap<usize, String>);

impl Names {
    fn of(&self, s: &Arc<RecSpec>) -> String {
        self.0
            .get(&(Arc::as_ptr(s) as usize))
            .cloned()
            .unwrap_or_else(|| s.name().to_string())
    }
}

fn write_term(out: &mut String, t: &Term, level: u8, names: &Names) {
    match t {
        Term::Choice(l, r) => {
            let wrap = level > 0;
            if wrap {
                out.push('(');
            }
            write_term(out, l, 0, names);
            out.push_str(" + ");
            write_term(out, r, 1, names);
            if wrap {
                out.push(')');
            }
        }
        Term::Par(s, l, r) => {
            let wrap = level > 1;
            if wrap {
                out.push('(');
            }
            write_term(out, l, 1, names);
            out.push_str(&format!(" ||{{{s}}} "));
            write_term(out, r, 2, names);
            if wrap {
                out.push(')');
            }
        }
        Term::Prefix(a, e) => {
            out.push_str(&format!("{a}."));
            write_term(out, e, 2, names);
        }
        Term::Nil => out.push('0'),
        Term::Var(x) => out.push_str(x),
        Term::Hide(i, e) => wrapped(out, &format!("hide{{{i}}}"), e, names),
        Term::Rename(r, e) => wrapped(out, &format!("rename{{{r}}}"), e, names),
        Term::Theta(l, u, e) => wrapped(out, &format!("theta{{{l}}}{{{u}}}"), e, names),
        Term::Psi(x, e) => wrapped(out, &format!("psi{{{x}}}"), e, names),
        Term::Rec(y, s) => out.push_str(&format!("<{y}|{}>", names.of(s))),
    }
}

fn wrapped(out: &mut String, head: &str, e: &Term, names: &Names) {
    out.push_str(head);
    out.push('(');
    write_term(out, e, 0, names);
    out.push(')');
}

pub fn render_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t, 0, &Names(HashMap::new()));
    out
}

fn render_equations(s: &RecSpec, names: &Names) -> String {
    let mut out = String::new();
    for (x, body) in s.equations() {
        out.push_str(&format!("{x} = "));
        write_term(&mut out, body, 0, names);
        out.push('\n');
    }
    out
}

/// One `x = term` line per equation.
pub fn render_spec(s: &RecSpec) -> String {
    render_equations(s, &Names(HashMap::new()))
}

/// A complete source file for `root`: every specification it references,
/// dependencies first, with clashing names disambiguated.
pub fn render_source(root: &Term, sigma: Option<&ActionSet>) -> String {
    let mut order: Vec<Arc<RecSpec>> = Vec::new();
    root.visit_specs(&mut |s| order.push(s.clone()));
    let mut names = Names(HashMap::new());
    let mut used: Vec<(String, Arc<RecSpec>)> = Vec::new();
    for s in &order {
        let base = s.name().to_string();
        let name = if let Some((n, _)) = used.iter().find(|(n, o)| *n == base && **o == **s) {
            n.clone()
        } else {
            let mut n = base.clone();
            let mut k = 2;
            while used.iter().any(|(m, _)| *m == n) {
                n = format!("{base}_{k}");
                k += 1;
            }
            used.push((n.clone(), s.clone()));
            n
        };
        names.0.insert(Arc::as_ptr(s) as usize, name);
    }
    let mut out = String::new();
    if let Some(sig) = sigma {
        out.push_str(&format!("@sigma {sig}\n"));
    }
    let mut emitted: Vec<String> = Vec::new();
    for s in &order {
        let n = names.of(s);
        if emitted.contains(&n) {
            continue;
        }
        out.push_str(&format!("@spec {n}\n{}@end\n", render_equations(s, &names)));
        emitted.push(n);
    }
    write_term(&mut out, root, 0, &names);
    out.push('\n');
    out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}

fn write_formula(out: &mut String, f: &Formula, operand: bool) {
    match f {
        Formula::Top => out.push('T'),
        Formula::Stable => out.push_str("stable"),
        Formula::And(items) => {
            out.push_str("&(");
            for (i, g) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_formula(out, g, false);
            }
            out.push(')');
        }
        Formula::Not(g) => {
            out.push('!');
            write_formula(out, g, true);
        }
        Formula::Diamond(a, g) => {
            out.push_str(&format!("<{a}>"));
            write_formula(out, g, true);
        }
        Formula::HatDiamond(a, g) => {
            out.push_str(&format!("<{a}^>"));
            write_formula(out, g, true);
        }
        Formula::EnvBox(x, g) => {
            out.push_str(&format!("[{{{x}}}]"));
            write_formula(out, g, true);
        }
        Formula::TimeoutDiamond(x, g) => {
            out.push_str(&format!("[{{{x}}}]<t>"));
            write_formula(out, g, true);
        }
        Formula::Eps(g) => {
            out.push_str("eps(");
            write_formula(out, g, false);
            out.push(')');
        }
        Formula::EpsStep(g, a, h) => {
            out.push_str("eps(");
            write_formula(out, g, false);
            out.push_str(&format!(" <{a}^> "));
            write_formula(out, h, false);
            out.push(')');
        }
        Formula::EpsX(g, x, h) => {
            if operand {
                out.push('(');
            }
            write_formula(out, g, false);
            out.push_str(&format!(" <eps_{{{x}}}> "));
            write_formula(out, h, true);
            if operand {
                out.push(')');
            }
        }
    }
}

pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, false);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}
