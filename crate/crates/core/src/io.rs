//! Text formats: Newick, tab-separated edge lists, weight files and
//! distance matrices.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::metric::FiniteMetric;
use crate::tree::{MetricTree, VertexId};

struct Node {
    label: Option<String>,
    length: Option<f64>,
    children: Vec<Node>,
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::SyntaxError {
            position: self.pos,
            message: message.into(),
        }
    }

    /// Skips whitespace and bracketed comments.
    fn skip(&mut self) -> Result<()> {
        loop {
            match self.text.get(self.pos) {
                Some(c) if c.is_ascii_whitespace() => self.pos += 1,
                Some(b'[') => {
                    let start = self.pos;
                    match self.text[start..].iter().position(|&c| c == b']') {
                        Some(end) => self.pos = start + end + 1,
                        None => return Err(self.error("unterminated comment")),
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn peek(&mut self) -> Result<Option<u8>> {
        self.skip()?;
        Ok(self.text.get(self.pos).copied())
    }

    fn subtree(&mut self) -> Result<Node> {
        let mut children = Vec::new();
        if self.peek()? == Some(b'(') {
            self.pos += 1;
            loop {
                children.push(self.subtree()?);
                match self.peek()? {
                    Some(b',') => self.pos += 1,
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.error("expected ',' or ')'")),
                }
            }
        }
        let label = self.label()?;
        let length = if self.peek()? == Some(b':') {
            self.pos += 1;
            Some(self.length()?)
        } else {
            None
        };
        Ok(Node {
            label,
            length,
            children,
        })
    }

    fn label(&mut self) -> Result<Option<String>> {
        if self.peek()? == Some(b'\'') {
            let start = self.pos;
            self.pos += 1;
            let mut out = Vec::new();
            loop {
                match self.text.get(self.pos) {
                    None => {
                        self.pos = start;
                        return Err(self.error("unterminated quoted label"));
                    }
                    Some(b'\'') if self.text.get(self.pos + 1) == Some(&b'\'') => {
                        out.push(b'\'');
                        self.pos += 2;
                    }
                    Some(b'\'') => {
                        self.pos += 1;
                        break;
                    }
                    Some(&c) => {
                        out.push(c);
                        self.pos += 1;
                    }
                }
            }
            return String::from_utf8(out)
                .map(Some)
                .map_err(|_| self.error("label is not valid UTF-8"));
        }
        let start = self.pos;
        while let Some(&c) = self.text.get(self.pos) {
            if c.is_ascii_whitespace() || b"(),:;[]'".contains(&c) {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Ok(None);
        }
        std::str::from_utf8(&self.text[start..self.pos])
            .map(|s| Some(s.to_string()))
            .map_err(|_| self.error("label is not valid UTF-8"))
    }

    fn length(&mut self) -> Result<f64> {
        self.skip()?;
        let start = self.pos;
        while let Some(&c) = self.text.get(self.pos) {
            if !(c.is_ascii_digit() || b"+-.eE".contains(&c)) {
                break;
            }
            self.pos += 1;
        }
        let token = std::str::from_utf8(&self.text[start..self.pos]).expect("ASCII");
        let value: f64 = token.parse().map_err(|_| Error::SyntaxError {
            position: start,
            message: format!("invalid branch length {token:?}"),
        })?;
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::NonPositiveBranchLength(value));
        }
        Ok(value)
    }
}

/// Parses a single Newick statement. Missing branch lengths are 1 and
/// unlabeled nodes are named `_1, _2, ...` in pre-order. A root with one
/// child stays the root; otherwise the tree is rooted at its smallest leaf.
pub fn parse_newick(text: &str) -> Result<MetricTree> {
    let mut parser = Parser {
        text: text.as_bytes(),
        pos: 0,
    };
    match parser.peek()? {
        None | Some(b';') => return Err(Error::EmptyTree),
        _ => {}
    }
    let root = parser.subtree()?;
    if parser.peek()? != Some(b';') {
        return Err(parser.error("expected ';'"));
    }
    parser.pos += 1;
    if parser.peek()?.is_some() {
        return Err(parser.error("trailing text after ';'"));
    }

    let mut taken = HashSet::new();
    collect_labels(&root, &mut taken)?;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut counter = 0;
    flatten(&root, None, &mut taken, &mut counter, &mut vertices, &mut edges);
    let keep_root = root.children.len() == 1;
    let root_label = keep_root.then(|| vertices[0].clone());
    MetricTree::from_parts(vertices, edges, root_label)
}

fn collect_labels(node: &Node, taken: &mut HashSet<String>) -> Result<()> {
    if let Some(l) = &node.label {
        if !taken.insert(l.clone()) {
            return Err(Error::DuplicateVertex(l.clone()));
        }
    }
    node.children.iter().try_for_each(|c| collect_labels(c, taken))
}

fn flatten(
    node: &Node,
    parent: Option<&str>,
    taken: &mut HashSet<String>,
    counter: &mut usize,
    vertices: &mut Vec<String>,
    edges: &mut Vec<(String, String, f64)>,
) {
    let name = match &node.label {
        Some(l) => l.clone(),
        None => loop {
            *counter += 1;
            let candidate = format!("_{counter}");
            if taken.insert(candidate.clone()) {
                break candidate;
            }
        },
    };
    if let Some(p) = parent {
        edges.push((name.clone(), p.to_string(), node.length.unwrap_or(1.0)));
    }
    vertices.push(name.clone());
    for c in &node.children {
        flatten(c, Some(&name), taken, counter, vertices, edges);
    }
}

fn quote(label: &str) -> String {
    let plain = !label.is_empty()
        && label
            .bytes()
            .all(|c| !(c.is_ascii_whitespace() || b"(),:;[]'".contains(&c)));
    if plain {
        label.to_string()
    } else {
        format!("'{}'", label.replace('\'', "''"))
    }
}

/// Newick text of `tree`, hung from its root leaf. Lengths are written in
/// shortest round-trip form, so parsing the output reproduces the tree.
pub fn to_newick(tree: &MetricTree) -> String {
    fn write(tree: &MetricTree, v: VertexId, out: &mut String) {
        let children: Vec<VertexId> = tree.children(v).collect();
        if !children.is_empty() {
            out.push('(');
            for (k, &c) in children.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write(tree, c, out);
            }
            out.push(')');
        }
        out.push_str(&quote(tree.label(v)));
        if let Some(e) = tree.edge_of(v) {
            out.push_str(&format!(":{}", e.weight));
        }
    }
    let mut out = String::new();
    write(tree, tree.root(), &mut out);
    out.push(';');
    out
}

fn fields(line: &str) -> Vec<&str> {
    if line.contains('\t') {
        line.split('\t').map(str::trim).filter(|f| !f.is_empty()).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Content lines with their 1-based line numbers; `#` lines are handed to
/// `directive` and otherwise skipped.
fn content_lines<'a>(text: &'a str, mut directive: impl FnMut(usize, &'a str) -> Result<()>) -> Result<Vec<(usize, &'a str)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            directive(i + 1, rest.trim())?;
            continue;
        }
        out.push((i + 1, line));
    }
    Ok(out)
}

fn parse_number(line: usize, token: &str) -> Result<f64> {
    token.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| Error::ParseError {
        line,
        message: format!("invalid number {token:?}"),
    })
}

/// Parses `left<TAB>right<TAB>weight` lines; an optional `# root <label>`
/// line chooses the root.
pub fn parse_edge_list(text: &str) -> Result<MetricTree> {
    let mut root = None;
    let lines = content_lines(text, |line, rest| {
        if let Some(r) = rest.strip_prefix("root") {
            let r = r.trim();
            if r.is_empty() {
                return Err(Error::ParseError {
                    line,
                    message: "root directive without a label".into(),
                });
            }
            root = Some(r.to_string());
        }
        Ok(())
    })?;
    let mut vertices = Vec::new();
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for (line, content) in lines {
        let f = fields(content);
        if f.len() != 3 {
            return Err(Error::ParseError {
                line,
                message: format!("expected 3 fields, found {}", f.len()),
            });
        }
        let w = parse_number(line, f[2])?;
        for v in &f[..2] {
            if seen.insert(v.to_string()) {
                vertices.push(v.to_string());
            }
        }
        edges.push((f[0].to_string(), f[1].to_string(), w));
    }
    if vertices.is_empty() {
        return Err(Error::EmptyTree);
    }
    MetricTree::from_parts(vertices, edges, root)
}

/// Edge-list text of `tree` with a root directive.
pub fn to_edge_list(tree: &MetricTree) -> String {
    let mut out = format!("# root {}\n", tree.label(tree.root()));
    for e in tree.edges() {
        out.push_str(&format!("{}\t{}\t{}\n", tree.label(e.left), tree.label(e.right), e.weight));
    }
    out
}

/// Parses `vertex<TAB>weight` lines.
pub fn parse_weights(text: &str) -> Result<Vec<(String, f64)>> {
    content_lines(text, |_, _| Ok(()))?
        .into_iter()
        .map(|(line, content)| {
            let f = fields(content);
            if f.len() != 2 {
                return Err(Error::ParseError {
                    line,
                    message: format!("expected 2 fields, found {}", f.len()),
                });
            }
            Ok((f[0].to_string(), parse_number(line, f[1])?))
        })
        .collect()
}

/// Parses a header line of labels followed by one row of distances per
/// label; a row may repeat its label as a leading field.
pub fn parse_distance_matrix(text: &str) -> Result<FiniteMetric> {
    let lines = content_lines(text, |_, _| Ok(()))?;
    let Some(((_, header), rows)) = lines.split_first() else {
        return Err(Error::EmptyTree);
    };
    let labels: Vec<String> = fields(header).into_iter().map(str::to_string).collect();
    let n = labels.len();
    if rows.len() != n {
        return Err(Error::ParseError {
            line: rows.last().map_or(1, |r| r.0),
            message: format!("expected {n} rows, found {}", rows.len()),
        });
    }
    let mut dist = Vec::with_capacity(n);
    for (k, &(line, content)) in rows.iter().enumerate() {
        let mut f = fields(content);
        if f.len() == n + 1 {
            if f[0] != labels[k] {
                return Err(Error::ParseError {
                    line,
                    message: format!("row label {:?} does not match column {:?}", f[0], labels[k]),
                });
            }
            f.remove(0);
        }
        if f.len() != n {
            return Err(Error::ParseError {
                line,
                message: format!("expected {n} distances, found {}", f.len()),
            });
        }
        dist.push(f.into_iter().map(|t| parse_number(line, t)).collect::<Result<Vec<_>>>()?);
    }
    FiniteMetric::new(labels, dist)
}

/// Distance-matrix text readable by [`parse_distance_matrix`].
pub fn to_distance_matrix(metric: &FiniteMetric) -> String {
    let mut out = metric.labels().join("\t");
    out.push('\n');
    for (label, row) in metric.labels().iter().zip(metric.matrix()) {
        out.push_str(label);
        for d in row {
            out.push_str(&format!("\t{d}"));
        }
        out.push('\n');
    }
    out
}
