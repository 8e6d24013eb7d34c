//! Element files (`.elt`), expressions and points.
//!
//! ```text
//! groupoid: two_headed.grpd
//! bisection B = clopen("") head 1
//! bisection E = arrows(e_u_v, e_v_u)      # finite models
//! element f = 1*G0 - 1*B
//! element g = adj(f) ** f + (1-2i)*B
//! ```
//!
//! `G0` always names the unit space. A bisection name used in an expression
//! stands for its indicator function. Coefficients are exact: `2`, `-0.5`,
//! `1/3`, `i`, `2-3i`, with no spaces inside a literal.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::element::AlgebraElement;
use crate::error::{Error, Result};
use crate::groupoid::file::{read_file, statements};
use crate::groupoid::{
    is_binary_word, load_groupoid, AmpleGroupoid, Arrow, ArrowSet, ClopenSet, FiniteGroupoid, LoadedGroupoid,
    SnakeBisection, SnakeGroupoid, SnakePoint,
};
use crate::scalar::{format_complex, parse_rational};
use crate::ExactComplex;

pub const UNIT_SPACE_NAME: &str = "G0";
const RESERVED: [&str; 3] = ["adj", "i", UNIT_SPACE_NAME];

/// Textual forms of bisections and points for one backend.
pub trait ModelSyntax: AmpleGroupoid {
    /// Parses the right-hand side of a `bisection` declaration.
    fn parse_bisection(&self, text: &str) -> Result<Self::Bisection>;
    fn format_bisection(&self, b: &Self::Bisection) -> String;
    fn parse_point(&self, text: &str) -> Result<Self::Point>;
    fn format_point(&self, p: &Self::Point) -> String;
}

/// The text between `keyword(` and the matching final `)`, and what follows.
fn call_arguments<'a>(text: &'a str, keyword: &str) -> Option<(&'a str, &'a str)> {
    let rest = text.trim().strip_prefix(keyword)?.trim_start().strip_prefix('(')?;
    let close = rest.find(')')?;
    Some((&rest[..close], rest[close + 1..].trim()))
}

fn split_arguments(args: &str) -> Vec<&str> {
    if args.trim().is_empty() {
        Vec::new()
    } else {
        args.split(',').map(str::trim).collect()
    }
}

impl ModelSyntax for FiniteGroupoid {
    fn parse_bisection(&self, text: &str) -> Result<ArrowSet> {
        if text.trim_start().starts_with("clopen") {
            return Err(Error::InvalidBisection("clopen sets need a snake groupoid".into()));
        }
        let (args, rest) = call_arguments(text, "arrows")
            .ok_or_else(|| Error::InvalidBisection(format!("expected arrows(...), found `{}`", text.trim())))?;
        if !rest.is_empty() {
            return Err(Error::InvalidBisection(format!("unexpected `{rest}` after arrows(...)")));
        }
        let arrows = split_arguments(args)
            .into_iter()
            .map(|name| self.arrow(name).ok_or_else(|| Error::UnknownName(name.to_string())))
            .collect::<Result<Vec<Arrow>>>()?;
        self.bisection(arrows)
    }

    fn format_bisection(&self, b: &ArrowSet) -> String {
        let names: Vec<&str> = b.iter().map(|a| self.name(Arrow(a))).collect();
        format!("arrows({})", names.join(","))
    }

    fn parse_point(&self, text: &str) -> Result<Arrow> {
        self.arrow(text.trim()).ok_or_else(|| Error::UnknownName(text.trim().to_string()))
    }

    fn format_point(&self, p: &Arrow) -> String {
        self.name(*p).to_string()
    }
}

impl ModelSyntax for SnakeGroupoid {
    fn parse_bisection(&self, text: &str) -> Result<SnakeBisection> {
        if text.trim_start().starts_with("arrows") {
            return Err(Error::InvalidBisection("arrow sets need a finite groupoid".into()));
        }
        let (args, rest) = call_arguments(text, "clopen")
            .ok_or_else(|| Error::InvalidBisection(format!("expected clopen(...), found `{}`", text.trim())))?;
        let words = split_arguments(args)
            .into_iter()
            .map(|w| {
                w.strip_prefix('"')
                    .and_then(|w| w.strip_suffix('"'))
                    .filter(|w| is_binary_word(w))
                    .ok_or_else(|| Error::InvalidBisection(format!("`{w}` is not a quoted binary word")))
            })
            .collect::<Result<Vec<&str>>>()?;
        let head = match rest.split_whitespace().collect::<Vec<_>>().as_slice() {
            [] | ["head", "unit"] => None,
            ["head", k] => Some(
                k.parse::<i64>().map_err(|_| Error::InvalidBisection(format!("`{k}` is not a head")))?,
            ),
            _ => return Err(Error::InvalidBisection(format!("expected `head <k|unit>`, found `{rest}`"))),
        };
        self.bisection(ClopenSet::from_cylinders(words), head)
    }

    fn format_bisection(&self, b: &SnakeBisection) -> String {
        match b.head() {
            Some(k) => format!("{} head {k}", b.cylinders()),
            None => format!("{} head unit", b.cylinders()),
        }
    }

    fn parse_point(&self, text: &str) -> Result<SnakePoint> {
        let text = text.trim();
        let point = if text == "base" {
            SnakePoint::Base
        } else if let Some(w) = text.strip_prefix("unit:") {
            if !is_binary_word(w) {
                return Err(Error::parse(0, format!("`{w}` is not a binary word")));
            }
            SnakePoint::unit(w)
        } else if let Some(k) = text.strip_prefix("head:") {
            SnakePoint::Head(k.parse().map_err(|_| Error::parse(0, format!("`{k}` is not a head")))?)
        } else {
            return Err(Error::parse(0, format!("`{text}` is not a point (unit:<w>, base, head:<k>)")));
        };
        if !self.owns_point(&point) {
            return Err(Error::ForeignPoint(text.to_string()));
        }
        Ok(point)
    }

    fn format_point(&self, p: &SnakePoint) -> String {
        p.to_string()
    }
}

/// Declarations of one element file over a loaded model.
pub struct Document<G: AmpleGroupoid> {
    pub groupoid_path: String,
    pub model: Arc<G>,
    bisections: Vec<(String, G::Bisection)>,
    elements: Vec<(String, AlgebraElement<G, ExactComplex>)>,
}

impl<G: ModelSyntax> Document<G> {
    pub fn new(groupoid_path: impl Into<String>, model: Arc<G>) -> Self {
        Document { groupoid_path: groupoid_path.into(), model, bisections: Vec::new(), elements: Vec::new() }
    }

    pub fn bisection(&self, name: &str) -> Result<G::Bisection> {
        if name == UNIT_SPACE_NAME {
            return Ok(self.model.unit_space());
        }
        self.bisections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, b)| b.clone())
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn element(&self, name: &str) -> Result<AlgebraElement<G, ExactComplex>> {
        self.elements
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e.clone())
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn element_names(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|(n, _)| n.as_str())
    }

    pub fn bisection_names(&self) -> impl Iterator<Item = &str> {
        self.bisections.iter().map(|(n, _)| n.as_str())
    }

    fn check_new_name(&self, name: &str) -> Result<()> {
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(Error::Expression(format!("`{name}` is not a valid name")));
        }
        if RESERVED.contains(&name) {
            return Err(Error::Expression(format!("`{name}` is reserved")));
        }
        if self.bisections.iter().any(|(n, _)| n == name) || self.elements.iter().any(|(n, _)| n == name) {
            return Err(Error::Expression(format!("`{name}` is declared twice")));
        }
        Ok(())
    }

    pub fn declare_bisection(&mut self, name: &str, b: G::Bisection) -> Result<()> {
        self.check_new_name(name)?;
        self.bisections.push((name.to_string(), b));
        Ok(())
    }

    pub fn declare_element(&mut self, name: &str, e: AlgebraElement<G, ExactComplex>) -> Result<()> {
        self.check_new_name(name)?;
        e.same_model(&AlgebraElement::zero(&self.model))?;
        self.elements.push((name.to_string(), e));
        Ok(())
    }

    /// Evaluates an expression over the declared names.
    pub fn evaluate(&self, text: &str) -> Result<AlgebraElement<G, ExactComplex>> {
        let tokens = lex(text)?;
        let mut parser = Parser { tokens, pos: 0, doc: self };
        let value = parser.expression()?;
        if let Some(t) = parser.tokens.get(parser.pos) {
            return Err(Error::Expression(format!("unexpected {t:?} in `{text}`")));
        }
        match value {
            Value::Element(e) => Ok(e),
            Value::Scalar(_) => Err(Error::Expression(format!("`{text}` is a scalar, not an element"))),
        }
    }

    /// Reads a comma- or space-separated list of bisection names.
    pub fn bisection_list(&self, names: &str) -> Result<Vec<G::Bisection>> {
        names.split(|c: char| c == ',' || c.is_whitespace()).filter(|n| !n.is_empty()).map(|n| self.bisection(n)).collect()
    }

    /// A self-contained element file declaring `element` under `name`.
    pub fn format_element(&self, name: &str, element: &AlgebraElement<G, ExactComplex>) -> String {
        self.format_elements(&[(name, element)])
    }

    /// One element file declaring every listed element; bisections are
    /// shared and named `b0`, `b1`, … in order of first use.
    pub fn format_elements(&self, elements: &[(&str, &AlgebraElement<G, ExactComplex>)]) -> String {
        let mut out = format!("groupoid: {}\n", self.groupoid_path);
        let mut names: Vec<(G::Bisection, String)> = Vec::new();
        let mut lines = String::new();
        for (name, element) in elements {
            let mut sum = String::new();
            for term in element.terms() {
                let label = match names.iter().find(|(b, _)| *b == term.bisection) {
                    Some((_, label)) => label.clone(),
                    None => {
                        let label = format!("b{}", names.len());
                        out += &format!("bisection {label} = {}\n", self.model.format_bisection(&term.bisection));
                        names.push((term.bisection.clone(), label.clone()));
                        label
                    }
                };
                let c = &term.coefficient;
                let negative = (c.im.is_zero() && c.re < Zero::zero()) || (c.re.is_zero() && c.im < Zero::zero());
                if sum.is_empty() {
                    sum = format!("{}*{label}", coefficient_text(c));
                } else if negative {
                    sum += &format!(" - {}*{label}", coefficient_text(&-c.clone()));
                } else {
                    sum += &format!(" + {}*{label}", coefficient_text(c));
                }
            }
            if sum.is_empty() {
                sum = format!("0*{UNIT_SPACE_NAME}");
            }
            lines += &format!("element {name} = {sum}\n");
        }
        out + &lines
    }
}

/// Complex coefficients with both parts are parenthesised.
fn coefficient_text(c: &ExactComplex) -> String {
    if c.re.is_zero() || c.im.is_zero() {
        format_complex(c)
    } else {
        format!("({})", format_complex(c))
    }
}

/// A document over either backend.
pub enum AnyDocument {
    Finite(Document<FiniteGroupoid>),
    Snake(Document<SnakeGroupoid>),
}

pub fn load_document(path: impl AsRef<Path>) -> Result<AnyDocument> {
    let path = path.as_ref();
    let text = read_file(path)?;
    parse_document(&text, path.parent().unwrap_or(Path::new(".")))
}

/// Parses an element file; the groupoid path is resolved against `base`.
pub fn parse_document(text: &str, base: &Path) -> Result<AnyDocument> {
    let stmts = statements(text);
    let Some(&(line, first)) = stmts.first() else {
        return Err(Error::parse(0, "empty element file"));
    };
    let path = first
        .strip_prefix("groupoid:")
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .ok_or_else(|| Error::parse(line, "the first statement must be `groupoid: <path>`"))?;
    let resolved: PathBuf = base.join(path);
    match load_groupoid(&resolved)? {
        LoadedGroupoid::Finite(g) => {
            fill(Document::new(path, Arc::new(g)), &stmts[1..]).map(AnyDocument::Finite)
        }
        LoadedGroupoid::Snake(g) => fill(Document::new(path, Arc::new(g)), &stmts[1..]).map(AnyDocument::Snake),
    }
}

fn fill<G: ModelSyntax>(mut doc: Document<G>, stmts: &[(usize, &str)]) -> Result<Document<G>> {
    for &(line, stmt) in stmts {
        let at_line = |e: Error| match e {
            Error::Io { .. } | Error::Axiom { .. } => e,
            other => Error::parse(line, other.to_string()),
        };
        let (keyword, rest) = stmt.split_once(char::is_whitespace).unwrap_or((stmt, ""));
        let (name, body) = rest
            .split_once('=')
            .map(|(n, b)| (n.trim(), b.trim()))
            .ok_or_else(|| Error::parse(line, format!("expected `{keyword} <name> = ...`")))?;
        match keyword {
            "bisection" => {
                let b = doc.model.parse_bisection(body).map_err(at_line)?;
                doc.declare_bisection(name, b).map_err(at_line)?;
            }
            "element" => {
                let e = doc.evaluate(body).map_err(at_line)?;
                doc.declare_element(name, e).map_err(at_line)?;
            }
            other => return Err(Error::parse(line, format!("unknown statement `{other}`"))),
        }
    }
    Ok(doc)
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(ExactComplex),
    Name(String),
    Plus,
    Minus,
    Star,
    Convolve,
    Open,
    Close,
}

fn imaginary(value: num_rational::BigRational) -> ExactComplex {
    ExactComplex::new(Zero::zero(), value)
}

/// Reads `a`, `a.b` or `p/q` starting at `start`; returns the value and the
/// end position.
fn lex_magnitude(chars: &[char], start: usize) -> Option<(num_rational::BigRational, usize)> {
    let mut end = start;
    let digits = |from: usize| {
        let mut k = from;
        while k < chars.len() && chars[k].is_ascii_digit() {
            k += 1;
        }
        k
    };
    end = digits(end);
    if end == start {
        return None;
    }
    if end + 1 < chars.len() && (chars[end] == '.' || chars[end] == '/') && chars[end + 1].is_ascii_digit() {
        end = digits(end + 1);
    }
    let text: String = chars[start..end].iter().collect();
    parse_rational(&text).map(|v| (v, end))
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Reads `[±]a`, `[±]ai`, `[±]i` or a combined `a±bi` literal.
fn lex_literal(chars: &[char], start: usize) -> Option<(ExactComplex, usize)> {
    let (negative, mut pos) = match chars.get(start) {
        Some('-') => (true, start + 1),
        Some('+') => (false, start + 1),
        _ => (false, start),
    };
    let sign = |v: num_rational::BigRational, neg: bool| if neg { -v } else { v };
    let (re, end) = match lex_magnitude(chars, pos) {
        Some(found) => found,
        None if chars.get(pos) == Some(&'i') && !chars.get(pos + 1).copied().is_some_and(is_name_char) => {
            return Some((imaginary(sign(One::one(), negative)), pos + 1));
        }
        None => return None,
    };
    pos = end;
    if chars.get(pos) == Some(&'i') && !chars.get(pos + 1).copied().is_some_and(is_name_char) {
        return Some((imaginary(sign(re, negative)), pos + 1));
    }
    let re = sign(re, negative);
    // an attached imaginary part: `a+bi`, `a-i`
    if let Some(&c) = chars.get(pos) {
        if c == '+' || c == '-' {
            let im_negative = c == '-';
            let (im, im_end) = match lex_magnitude(chars, pos + 1) {
                Some(found) => found,
                None => (One::one(), pos + 1),
            };
            if chars.get(im_end) == Some(&'i') && !chars.get(im_end + 1).copied().is_some_and(is_name_char) {
                return Some((ExactComplex::new(re, sign(im, im_negative)), im_end + 1));
            }
        }
    }
    Some((ExactComplex::new(re, Zero::zero()), pos))
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let c = chars[pos];
        let prefix_position = matches!(
            tokens.last(),
            None | Some(Token::Plus | Token::Minus | Token::Star | Token::Convolve | Token::Open)
        );
        if c.is_whitespace() {
            pos += 1;
        } else if c.is_ascii_digit() || (c == '-' && prefix_position) {
            match lex_literal(&chars, pos) {
                Some((value, end)) => {
                    tokens.push(Token::Number(value));
                    pos = end;
                }
                None => {
                    tokens.push(Token::Minus);
                    pos += 1;
                }
            }
        } else if c == 'i' && !chars.get(pos + 1).copied().is_some_and(is_name_char) {
            tokens.push(Token::Number(imaginary(One::one())));
            pos += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = pos;
            while pos < chars.len() && is_name_char(chars[pos]) {
                pos += 1;
            }
            tokens.push(Token::Name(chars[start..pos].iter().collect()));
        } else {
            let token = match c {
                '+' => Token::Plus,
                '-' => Token::Minus,
                '*' if chars.get(pos + 1) == Some(&'*') => {
                    pos += 1;
                    Token::Convolve
                }
                '*' => Token::Star,
                '(' => Token::Open,
                ')' => Token::Close,
                other => return Err(Error::Expression(format!("unexpected character `{other}` in `{text}`"))),
            };
            tokens.push(token);
            pos += 1;
        }
    }
    Ok(tokens)
}

enum Value<G: AmpleGroupoid> {
    Scalar(ExactComplex),
    Element(AlgebraElement<G, ExactComplex>),
}

struct Parser<'a, G: ModelSyntax> {
    tokens: Vec<Token>,
    pos: usize,
    doc: &'a Document<G>,
}

impl<G: ModelSyntax> Parser<'_, G> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, token: Token) -> Result<()> {
        match self.next() {
            Some(t) if t == token => Ok(()),
            other => Err(Error::Expression(format!("expected {token:?}, found {other:?}"))),
        }
    }

    fn expression(&mut self) -> Result<Value<G>> {
        let mut acc = self.product()?;
        while let Some(op) = self.peek().cloned() {
            let subtract = match op {
                Token::Plus => false,
                Token::Minus => true,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.product()?;
            acc = match (acc, rhs) {
                (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(if subtract { a - b } else { a + b }),
                (Value::Element(a), Value::Element(b)) => {
                    Value::Element(if subtract { a.sub(&b)? } else { a.add(&b)? })
                }
                _ => return Err(Error::Expression("cannot add a scalar and an element".into())),
            };
        }
        Ok(acc)
    }

    fn product(&mut self) -> Result<Value<G>> {
        let mut acc = self.unary()?;
        while let Some(op) = self.peek().cloned() {
            if op != Token::Star && op != Token::Convolve {
                break;
            }
            self.pos += 1;
            let rhs = self.unary()?;
            acc = match (op, acc, rhs) {
                (Token::Star, Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(a * b),
                (Token::Star, Value::Scalar(a), Value::Element(e)) | (Token::Star, Value::Element(e), Value::Scalar(a)) => {
                    Value::Element(e.scale(&a))
                }
                (Token::Star, Value::Element(_), Value::Element(_)) => {
                    return Err(Error::Expression("`*` scales by a number; use `**` to convolve".into()))
                }
                (_, Value::Element(a), Value::Element(b)) => Value::Element(a.convolve(&b)?),
                _ => return Err(Error::Expression("`**` needs two elements".into())),
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Value<G>> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(match self.unary()? {
                Value::Scalar(a) => Value::Scalar(-a),
                Value::Element(e) => Value::Element(e.neg()),
            });
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Value<G>> {
        match self.next() {
            Some(Token::Number(z)) => Ok(Value::Scalar(z)),
            Some(Token::Open) => {
                let v = self.expression()?;
                self.expect(Token::Close)?;
                Ok(v)
            }
            Some(Token::Name(name)) if name == "adj" => {
                self.expect(Token::Open)?;
                let v = self.expression()?;
                self.expect(Token::Close)?;
                Ok(match v {
                    Value::Scalar(a) => Value::Scalar(a.conj()),
                    Value::Element(e) => Value::Element(e.involute()),
                })
            }
            Some(Token::Name(name)) => {
                if let Ok(e) = self.doc.element(&name) {
                    return Ok(Value::Element(e));
                }
                let b = self.doc.bisection(&name)?;
                Ok(Value::Element(AlgebraElement::indicator(&self.doc.model, b)))
            }
            other => Err(Error::Expression(format!("expected a number, name or `(`, found {other:?}"))),
        }
    }
}
