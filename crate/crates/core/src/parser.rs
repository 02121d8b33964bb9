//! Text syntax for dependencies and schemas.
//!
//! ```text
//! (s:{Station}:{zone,zoneOriginal}) :: s.zoneOriginal => s.zone
//! ()-[t:{STOPS_AT}:{code}]->(s:{Station}:{name}) :: s.name => t.code
//! ```
//!
//! Names that are not plain identifiers are written in backticks. `⇒` is
//! accepted for `=>`, and `#` starts a comment.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gofd::{GnSchema, GoFd};
use crate::pattern::{Direction, GraphPattern, ObjectPattern, Variable};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, start: usize, end: usize) -> Self {
        Parser { src, pos: start, end }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..self.end]
    }

    fn skip_ws(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                self.pos = self.end;
            } else {
                return;
            }
        }
    }

    fn error<T>(&self, message: impl Into<String>, expected: &[&str]) -> Result<T> {
        Err(Error::parse_at(
            self.src,
            self.pos,
            message,
            expected.iter().map(|s| s.to_string()).collect(),
        ))
    }

    fn found(&self) -> String {
        match self.rest().chars().next() {
            Some(c) => format!("unexpected `{c}`"),
            None => "unexpected end of input".to_owned(),
        }
    }

    fn peek(&mut self, token: &str) -> bool {
        self.skip_ws();
        self.rest().starts_with(token)
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.peek(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            self.error(self.found(), &[token])
        }
    }

    fn peek_ident(&mut self) -> bool {
        self.skip_ws();
        self.rest()
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_' || c == '`')
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let rest = self.rest();
        if let Some(quoted) = rest.strip_prefix('`') {
            let mut out = String::new();
            let mut chars = quoted.char_indices().peekable();
            while let Some((i, c)) = chars.next() {
                if c == '`' {
                    if matches!(chars.peek(), Some((_, '`'))) {
                        chars.next();
                        out.push('`');
                    } else {
                        self.pos += i + 2;
                        if out.is_empty() {
                            return self.error("empty quoted name", &["name"]);
                        }
                        return Ok(out);
                    }
                } else {
                    out.push(c);
                }
            }
            return self.error("unterminated quoted name", &["`"]);
        }
        let len = rest
            .char_indices()
            .find(|(i, c)| !(c.is_ascii_alphanumeric() || *c == '_') || (*i == 0 && c.is_ascii_digit()))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 {
            return self.error(self.found(), &["identifier"]);
        }
        self.pos += len;
        Ok(rest[..len].to_owned())
    }

    fn name_set(&mut self) -> Result<BTreeSet<String>> {
        self.expect("{")?;
        let mut out = BTreeSet::new();
        if self.eat("}") {
            return Ok(out);
        }
        loop {
            out.insert(self.ident()?);
            if self.eat("}") {
                return Ok(out);
            }
            if !self.eat(",") {
                return self.error(self.found(), &[",", "}"]);
            }
        }
    }

    /// `var:{labels}:{keys}` with every part optional; called after the opening bracket.
    fn object_body(&mut self, close: &str, default_var: &str) -> Result<ObjectPattern> {
        let var = if self.peek_ident() {
            self.ident()?
        } else {
            default_var.to_owned()
        };
        let mut labels = BTreeSet::new();
        let mut keys = BTreeSet::new();
        if self.eat(":") {
            labels = self.name_set()?;
            if self.eat(":") {
                keys = self.name_set()?;
            }
        }
        self.expect(close)?;
        Ok(ObjectPattern { var, labels, keys })
    }

    /// `(...)` or `()`; `None` for the empty endpoint.
    fn node(&mut self) -> Result<Option<ObjectPattern>> {
        self.expect("(")?;
        if self.eat(")") {
            return Ok(None);
        }
        self.object_body(")", "_n").map(Some)
    }

    /// An arrow with its edge, returning whether it points right.
    fn arrow(&mut self) -> Result<(ObjectPattern, bool)> {
        if self.eat("-[") {
            let edge = self.object_body("]", "_e")?;
            self.expect("->")?;
            Ok((edge, true))
        } else if self.eat("<-[") {
            let edge = self.object_body("]", "_e")?;
            self.expect("-")?;
            Ok((edge, false))
        } else {
            self.error(self.found(), &["-[", "<-["])
        }
    }

    fn pattern(&mut self) -> Result<GraphPattern> {
        let start = self.pos;
        let left = self.node()?;
        if !self.peek("-[") && !self.peek("<-[") {
            return match left {
                Some(n) => Ok(GraphPattern::node(n)),
                None => self.error(self.found(), &["-[", "<-["]),
            };
        }
        let (edge, rightwards) = self.arrow()?;
        let right_at = self.pos;
        let right = self.node()?;
        let pattern = match (left, right) {
            (None, None) => GraphPattern::edge(edge),
            (Some(n), None) => {
                let dir = if rightwards { Direction::Out } else { Direction::In };
                GraphPattern::node_edge(n, edge, dir)
            }
            (None, Some(n)) => {
                let dir = if rightwards { Direction::In } else { Direction::Out };
                GraphPattern::node_edge(n, edge, dir)
            }
            (Some(_), Some(_)) => {
                self.pos = right_at;
                return self.error("a basic pattern binds at most one endpoint", &["()"]);
            }
        };
        if let (Some(n), Some(e)) = (pattern.node_part(), pattern.edge_part()) {
            if n.var == e.var {
                self.pos = start;
                return self.error(format!("`{}` names both the node and the edge", n.var), &[]);
            }
        }
        Ok(pattern)
    }

    fn variable(&mut self, q: &GraphPattern) -> Result<Variable> {
        self.skip_ws();
        let at = self.pos;
        let object = self.ident()?;
        let v = if self.rest().starts_with('.') {
            self.pos += 1;
            Variable::prop(object, self.ident()?)
        } else {
            Variable::object(object)
        };
        if !q.attrs().contains(&v) {
            self.pos = at;
            return self.error(format!("variable `{v}` is not bound by the scope"), &[]);
        }
        Ok(v)
    }

    fn var_list(&mut self, q: &GraphPattern) -> Result<Vec<Variable>> {
        let mut out = vec![self.variable(q)?];
        while self.eat(",") {
            out.push(self.variable(q)?);
        }
        Ok(out)
    }

    fn gofd(&mut self) -> Result<GoFd> {
        let q = self.pattern()?;
        self.expect("::")?;
        let lhs = self.var_list(&q)?;
        if !self.eat("=>") && !self.eat("⇒") {
            return self.error(self.found(), &[",", "=>"]);
        }
        let rhs = self.var_list(&q)?;
        GoFd::new(q, lhs, rhs)
    }

    fn finish(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos < self.end {
            return self.error(self.found(), &["end of declaration"]);
        }
        Ok(())
    }
}

pub fn parse_pattern(text: &str) -> Result<GraphPattern> {
    let mut p = Parser::new(text, 0, text.len());
    let q = p.pattern()?;
    p.finish()?;
    Ok(q)
}

pub fn parse_gofd(text: &str) -> Result<GoFd> {
    let mut p = Parser::new(text, 0, text.len());
    let dep = p.gofd()?;
    p.finish()?;
    Ok(dep)
}

/// A parsed schema file, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SchemaDocument {
    pub declarations: Vec<GoFd>,
    /// Comment lines, without the leading `#`.
    pub comments: Vec<String>,
    pub warnings: Vec<String>,
}

impl SchemaDocument {
    pub fn schema(&self) -> GnSchema {
        self.declarations.iter().cloned().collect()
    }
}

/// One declaration per line. Duplicates are dropped with a warning.
pub fn parse_schema_document(text: &str) -> Result<SchemaDocument> {
    let mut doc = SchemaDocument::default();
    let mut seen = BTreeSet::new();
    let mut start = 0;
    for (n, line) in text.split_inclusive('\n').enumerate() {
        let end = start + line.trim_end_matches(['\n', '\r']).len();
        let content = &text[start..end];
        let trimmed = content.trim();
        if let Some(comment) = trimmed.strip_prefix('#') {
            doc.comments.push(comment.trim().to_owned());
        } else if !trimmed.is_empty() {
            let mut p = Parser::new(text, start, end);
            let dep = p.gofd()?;
            p.finish()?;
            if seen.insert(dep.to_string()) {
                doc.declarations.push(dep);
            } else {
                doc.warnings.push(format!("line {}: duplicate declaration `{dep}` ignored", n + 1));
            }
        }
        start += line.len();
    }
    Ok(doc)
}

pub fn parse_schema(text: &str) -> Result<GnSchema> {
    parse_schema_document(text).map(|d| d.schema())
}

/// Canonical text of a schema, one declaration per line.
pub fn format_schema(sigma: &GnSchema) -> String {
    sigma.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gofd::DepClass;
    use crate::pattern::ObjectKind;
    use proptest::prelude::*;

    #[test]
    fn within_node_declaration() {
        let d = parse_gofd("(s:{Station}:{zone,zoneOriginal}) :: s.zoneOriginal => s.zone").unwrap();
        assert_eq!(d.classify(), DepClass::WithinNode);
        assert_eq!(d.lhs(), &[Variable::prop("s", "zoneOriginal")].into());
    }

    #[test]
    fn right_endpoint_node_binds_target() {
        let d = parse_gofd("()-[t:{STOPS_AT}:{code}]->(s:{Station}:{name}) :: s.name => t.code").unwrap();
        assert_eq!(d.classify(), DepClass::Between);
        assert_eq!(d.scope.direction(), Some(Direction::In));
        assert_eq!(d.scope.kind_of("t"), Some(ObjectKind::Edge));
        assert_eq!(parse_gofd(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn trivial_and_empty_sets() {
        let d = parse_gofd("(x:{}:{}) :: x => x").unwrap();
        assert!(d.is_trivial());
        assert_eq!(parse_gofd("(x:{}:{})::x⇒x").unwrap(), d);
    }

    #[test]
    fn shorthand_and_anonymous_objects() {
        let d = parse_gofd("()-[t:{STOPS_AT}:{departure,stopid}]->(s) :: t.stopid => s").unwrap();
        assert_eq!(d.scope.node_part().unwrap().labels.len(), 0);
        let d = parse_gofd("(ts:{TrainService}:{serviceid})-[:{STOPS_AT}:{}]->() :: ts.serviceid => ts").unwrap();
        assert_eq!(d.scope.edge_part().unwrap().var, "_e");
        assert_eq!(parse_gofd(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn quoted_names_round_trip() {
        let d = parse_gofd("(`my node`:{`Odd-Label`}:{`a.b`}) :: `my node`.`a.b` => `my node`").unwrap();
        assert_eq!(d.scope.node_part().unwrap().var, "my node");
        assert_eq!(parse_gofd(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_gofd("(x:{A}:{k}) :: x.k => y.k") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 23)),
            other => panic!("{other:?}"),
        }
        match parse_gofd("(x:{A}:{k}) :: x.k -> x") {
            Err(Error::Parse { expected, .. }) => assert!(expected.contains(&"=>".to_owned())),
            other => panic!("{other:?}"),
        }
        assert!(parse_gofd("(x)-[y]->(z) :: x => y").is_err());
        assert!(parse_gofd("(x:{A}:{k}) :: x.k => x trailing").is_err());
        assert!(parse_pattern("()").is_err());
    }

    #[test]
    fn schema_files() {
        let text = "# two deps\r\n(x:{A}:{k,l}) :: x.k => x.l\n\n(x:{A}:{k,l}) :: x.l => x.k # back\n";
        let doc = parse_schema_document(text).unwrap();
        assert_eq!(doc.declarations.len(), 2);
        assert_eq!(doc.comments, ["two deps"]);

        let dup = "(x:{A}:{k,l}) :: x.k => x.l\n(x:{A}:{k,l}) :: x.k=>x.l\n";
        let doc = parse_schema_document(dup).unwrap();
        assert_eq!(doc.declarations.len(), 1);
        assert_eq!(doc.warnings.len(), 1);

        match parse_schema("(x:{A}:{k}) :: x.k => x\n(x:{A}:{k}) :: \n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn university_schema_round_trip() {
        let text = include_str!("../fixtures/scenarios/uni-1.gofd");
        let sigma = parse_schema(text).unwrap();
        assert_eq!(sigma.len(), 1);
        assert_eq!(parse_schema(&format_schema(&sigma)).unwrap(), sigma);
        assert_eq!(format_schema(&parse_schema(&format_schema(&sigma)).unwrap()), format_schema(&sigma));
    }

    fn name() -> impl Strategy<Value = String> {
        prop_oneof![4 => "[a-z][a-zA-Z0-9_]{0,5}", 1 => "[a-z .`-]{1,6}"]
    }

    fn object(var: String) -> impl Strategy<Value = ObjectPattern> {
        (
            proptest::collection::btree_set(name(), 0..3),
            proptest::collection::btree_set(name(), 0..3),
        )
            .prop_map(move |(labels, keys)| ObjectPattern {
                var: var.clone(),
                labels,
                keys,
            })
    }

    fn pattern() -> impl Strategy<Value = GraphPattern> {
        prop_oneof![
            object("x".into()).prop_map(GraphPattern::node),
            object("y".into()).prop_map(GraphPattern::edge),
            (object("x".into()), object("y".into()), any::<bool>()).prop_map(|(n, e, out)| {
                GraphPattern::node_edge(n, e, if out { Direction::Out } else { Direction::In })
            }),
        ]
    }

    fn gofd() -> impl Strategy<Value = GoFd> {
        pattern().prop_flat_map(|q| {
            let attrs: Vec<Variable> = q.attrs().into_iter().collect();
            (
                Just(q),
                proptest::sample::subsequence(attrs.clone(), 1..=attrs.len()),
                proptest::sample::subsequence(attrs.clone(), 1..=attrs.len()),
            )
                .prop_map(|(q, l, r)| GoFd::new(q, l, r).unwrap())
        })
    }

    proptest! {
        #[test]
        fn format_then_parse_is_identity(d in gofd()) {
            let text = d.to_string();
            let back = parse_gofd(&text).unwrap();
            prop_assert_eq!(&back, &d);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
