//! Newick I/O.
//!
//! ```text
//! tree    := subtree ';'
//! subtree := leaf | '(' subtree (',' subtree)* ')' [label] [':' length]
//! leaf    := label [':' length]
//! label   := [A-Za-z0-9_.|-]+ | "'" ( [^'] | "''" )* "'"
//! ```
//!
//! Internal labels and branch lengths are accepted and dropped. The root of the
//! expression is unrooted on the way in, and unary nesting is suppressed.
//! The writer is canonical: two label-isomorphic trees print identically.

use super::{PhyloTree, RawTree, Taxon};
use crate::error::{Error, Result};

fn is_bare(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '|' | '-')
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    raw: &'a mut RawTree,
}

impl Parser<'_> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: None,
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => self.err(format!("expected `{c}`, found `{x}`")),
            None => self.err(format!("expected `{c}`, found end of input")),
        }
    }

    fn label(&mut self) -> Result<Option<String>> {
        self.skip_ws();
        match self.peek() {
            Some('\'') => {
                self.pos += 1;
                let mut out = String::new();
                loop {
                    match self.peek() {
                        None => return self.err("unterminated quoted label"),
                        Some('\'') if self.chars.get(self.pos + 1) == Some(&'\'') => {
                            out.push('\'');
                            self.pos += 2;
                        }
                        Some('\'') => {
                            self.pos += 1;
                            break;
                        }
                        Some(c) => {
                            out.push(c);
                            self.pos += 1;
                        }
                    }
                }
                if out.is_empty() {
                    return self.err("empty quoted label");
                }
                Ok(Some(out))
            }
            Some(c) if is_bare(c) => {
                let start = self.pos;
                while self.peek().is_some_and(is_bare) {
                    self.pos += 1;
                }
                Ok(Some(self.chars[start..self.pos].iter().collect()))
            }
            _ => Ok(None),
        }
    }

    fn length(&mut self) -> Result<()> {
        self.skip_ws();
        if self.peek() != Some(':') {
            return Ok(());
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'))
        {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected branch length after `:`");
        }
        Ok(())
    }

    fn subtree(&mut self) -> Result<usize> {
        self.skip_ws();
        if self.peek() == Some('(') {
            self.pos += 1;
            let v = self.raw.add_vertex(None);
            loop {
                let child = self.subtree()?;
                self.raw.add_edge(v, child);
                self.skip_ws();
                match self.peek() {
                    Some(',') => self.pos += 1,
                    Some(')') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => return self.err(format!("expected `,` or `)`, found `{c}`")),
                    None => return self.err("unbalanced `(`"),
                }
            }
            self.label()?;
            self.length()?;
            Ok(v)
        } else {
            let Some(label) = self.label()? else {
                return match self.peek() {
                    Some(c) => self.err(format!("expected a label or `(`, found `{c}`")),
                    None => self.err("expected a label or `(`, found end of input"),
                };
            };
            let v = self.raw.add_vertex(Some(Taxon::new(&label)?));
            self.length()?;
            Ok(v)
        }
    }
}

/// Parses a single `;`-terminated Newick expression.
pub fn parse_newick(text: &str) -> Result<PhyloTree> {
    let mut raw = RawTree::default();
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        raw: &mut raw,
    };
    p.subtree()?;
    p.expect(';')?;
    p.skip_ws();
    if let Some(c) = p.peek() {
        return p.err(format!("trailing input after `;`: `{c}`"));
    }
    raw.finish()
}

/// Parses a tree file: one tree per line, blank and `#` lines skipped. Errors
/// carry the 1-based line number.
pub fn parse_newick_file(text: &str) -> Result<Vec<PhyloTree>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tree = parse_newick(trimmed).map_err(|e| match e {
            Error::Parse { column, message, .. } => Error::Parse {
                line: Some(i + 1),
                column,
                message,
            },
            other => Error::Parse {
                line: Some(i + 1),
                column: 1,
                message: other.to_string(),
            },
        })?;
        out.push(tree);
    }
    Ok(out)
}

fn quote(t: &Taxon) -> String {
    let s = t.as_str();
    if s.chars().all(is_bare) {
        s.to_string()
    } else {
        format!("'{}'", s.replace('\'', "''"))
    }
}

/// Canonical Newick string of an unrooted tree.
pub fn write_newick(t: &PhyloTree) -> String {
    let mut leaves = t.leaves();
    let Some((first, first_label)) = leaves.next() else {
        return ";".to_string();
    };
    match t.taxon_count() {
        1 => format!("{};", quote(first_label)),
        2 => {
            let (_, second) = leaves.next().expect("two taxa");
            format!("({},{});", quote(first_label), quote(second))
        }
        _ => {
            let root = t.neighbors(first)[0];
            format!("{};", subtree(t, root, usize::MAX).0)
        }
    }
}

fn subtree<'a>(t: &'a PhyloTree, v: usize, parent: usize) -> (String, &'a Taxon) {
    if let Some(label) = t.label(v) {
        return (quote(label), label);
    }
    let mut kids: Vec<(String, &Taxon)> = t
        .neighbors(v)
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| subtree(t, w, v))
        .collect();
    kids.sort_by(|a, b| a.1.cmp(b.1));
    let min = kids[0].1;
    let body: Vec<String> = kids.into_iter().map(|k| k.0).collect();
    (format!("({})", body.join(",")), min)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_quartet_and_star() {
        let q = parse_newick("((a,b),(c,d));").unwrap();
        assert_eq!((q.vertex_count(), q.edge_count()), (6, 5));
        assert!(q.is_binary());
        let s = parse_newick("(a,b,c);").unwrap();
        assert_eq!(s.vertex_count(), 4);
        let center = (0..4).find(|&v| s.label(v).is_none()).unwrap();
        assert_eq!(s.degree(center), 3);
    }

    #[test]
    fn rooted_input_is_unrooted() {
        let rooted = parse_newick("(((a,b),c),(d,e));").unwrap();
        let unrooted = parse_newick("((a,b),c,(d,e));").unwrap();
        assert!(rooted.is_label_isomorphic(&unrooted));
        assert!(rooted.is_binary());
    }

    #[test]
    fn unary_nesting_lengths_and_internal_labels() {
        let t = parse_newick("((((a:1.5)),b:2)x:0.1,(c,d)'inner node':3e-2);").unwrap();
        assert!(t.is_label_isomorphic(&parse_newick("((a,b),(c,d));").unwrap()));
    }

    #[test]
    fn duplicate_label_rejected() {
        assert_eq!(
            parse_newick("((a,b),(a,c));").unwrap_err(),
            Error::DuplicateTaxon("a".into())
        );
    }

    #[test]
    fn syntax_errors_report_position() {
        let e = parse_newick("((a,b),(c,d))").unwrap_err();
        assert!(matches!(e, Error::Parse { column: 14, .. }), "{e:?}");
        let e = parse_newick("((a,,b));").unwrap_err();
        assert!(matches!(e, Error::Parse { column: 5, .. }), "{e:?}");
        assert!(parse_newick("();").is_err());
        assert!(parse_newick("(a,b); x").is_err());
        assert!(parse_newick("(a:,b);").is_err());
    }

    #[test]
    fn writer_examples() {
        let q = parse_newick("((c,d),(b,a));").unwrap();
        assert_eq!(write_newick(&q), "(a,b,(c,d));");
        assert_eq!(write_newick(&parse_newick("(c,b,a);").unwrap()), "(a,b,c);");
        assert_eq!(write_newick(&parse_newick("a;").unwrap()), "a;");
        assert_eq!(write_newick(&parse_newick("(b,a);").unwrap()), "(a,b);");
    }

    #[test]
    fn quoted_labels_round_trip() {
        let t = parse_newick("('it''s',b,'c d');").unwrap();
        assert!(t.contains("it's") && t.contains("c d"));
        let s = write_newick(&t);
        assert_eq!(s, "(b,'c d','it''s');");
        assert!(parse_newick(&s).unwrap().is_label_isomorphic(&t));
    }

    #[test]
    fn file_parsing_skips_comments_and_reports_lines() {
        let trees = parse_newick_file("# kind: test\n((a,b),(c,d));\n\n(a,b,c);\n").unwrap();
        assert_eq!(trees.len(), 2);
        let e = parse_newick_file("(a,b,c);\n# ok\n(a,(b,c);\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: Some(3), .. }), "{e:?}");
    }
}
