use log::warn;

use super::{Node, ParseTree, Token};
use crate::error::{Error, Result};

#[derive(Debug, PartialEq, Clone, Copy)]
enum Lexeme<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(line: &str) -> Vec<Lexeme<'_>> {
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push(Lexeme::Open);
                i += 1;
            }
            b')' => {
                out.push(Lexeme::Close);
                i += 1;
            }
            b if b.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len()
                    && !matches!(bytes[i], b'(' | b')')
                    && !bytes[i].is_ascii_whitespace()
                {
                    i += 1;
                }
                out.push(Lexeme::Atom(&line[start..i]));
            }
        }
    }
    out
}

struct Reader<'a> {
    lexemes: Vec<Lexeme<'a>>,
    pos: usize,
    line: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Option<Lexeme<'a>> {
        let lexeme = self.lexemes.get(self.pos).copied();
        self.pos += 1;
        lexeme
    }

    fn peek(&self) -> Option<Lexeme<'a>> {
        self.lexemes.get(self.pos).copied()
    }

    // Called after an opening parenthesis has been consumed.
    fn node(&mut self) -> Result<Node> {
        let label = match self.peek() {
            Some(Lexeme::Atom(a)) => {
                let a = a.to_string();
                self.pos += 1;
                a
            }
            Some(Lexeme::Open) => String::new(),
            Some(Lexeme::Close) => return Err(self.err("empty brackets")),
            None => return Err(self.err("unbalanced parentheses")),
        };
        // (POS word) leaf
        if let Some(Lexeme::Atom(word)) = self.peek() {
            let word = word.to_string();
            self.pos += 1;
            return match self.next() {
                Some(Lexeme::Close) => {
                    if label.is_empty() {
                        Err(self.err("leaf without a part-of-speech tag"))
                    } else {
                        Ok(Node::Leaf(Token::new(0, word, label)))
                    }
                }
                None => Err(self.err("unbalanced parentheses")),
                _ => Err(self.err(format!("unexpected material after word {word:?}"))),
            };
        }
        let mut children = Vec::new();
        loop {
            match self.next() {
                Some(Lexeme::Open) => children.push(self.node()?),
                Some(Lexeme::Close) => break,
                Some(Lexeme::Atom(a)) => {
                    return Err(self.err(format!("bare word {a:?} outside a preterminal")))
                }
                None => return Err(self.err("unbalanced parentheses")),
            }
        }
        if children.is_empty() {
            return Err(self.err(format!("constituent {label:?} has no children")));
        }
        Ok(Node::Tree(ParseTree {
            label,
            children,
        }))
    }
}

fn parse_line(line: &str, line_no: usize) -> Result<ParseTree> {
    let mut reader = Reader {
        lexemes: lex(line),
        pos: 0,
        line: line_no,
    };
    match reader.next() {
        Some(Lexeme::Open) => {}
        _ => return Err(reader.err("tree must start with '('")),
    }
    let node = reader.node()?;
    if reader.pos != reader.lexemes.len() {
        return Err(reader.err("unbalanced parentheses"));
    }
    let mut tree = match node {
        Node::Tree(t) => t,
        Node::Leaf(token) => ParseTree {
            label: "TOP".into(),
            children: vec![Node::Leaf(token)],
        },
    };
    if tree.label.is_empty() {
        tree.label = "TOP".into();
    }
    tree.reindex();
    Ok(tree)
}

/// Reads one bracketed tree per line. Blank lines are skipped with a warning.
pub fn read_trees(text: &str) -> Result<Vec<ParseTree>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            warn!("line {}: empty line skipped", i + 1);
            continue;
        }
        out.push(parse_line(line, i + 1)?);
    }
    Ok(out)
}

/// Reads a parser output file keeping line alignment: a blank line is a
/// parse failure and yields `None` at that position.
pub fn read_forest_lines(text: &str) -> Result<Vec<Option<ParseTree>>> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            if line.trim().is_empty() {
                Ok(None)
            } else {
                parse_line(line, i + 1).map(Some)
            }
        })
        .collect()
}

fn check_symbol(s: &str) -> Result<()> {
    if s.is_empty() || s.chars().any(|ch| ch.is_whitespace() || ch == '(' || ch == ')') {
        return Err(Error::InvalidSymbol(s.to_string()));
    }
    Ok(())
}

fn check_tree(tree: &ParseTree) -> Result<()> {
    check_symbol(&tree.label)?;
    for child in &tree.children {
        match child {
            Node::Leaf(t) => {
                check_symbol(&t.pos)?;
                check_symbol(&t.word)?;
            }
            Node::Tree(sub) => check_tree(sub)?,
        }
    }
    Ok(())
}

/// Canonical single-line form of one tree.
pub fn write_tree(tree: &ParseTree) -> Result<String> {
    check_tree(tree)?;
    Ok(tree.to_string())
}

pub fn write_trees(trees: &[ParseTree]) -> Result<String> {
    let mut out = String::new();
    for tree in trees {
        out.push_str(&write_tree(tree)?);
        out.push('\n');
    }
    Ok(out)
}
