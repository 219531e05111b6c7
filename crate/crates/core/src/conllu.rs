//! CoNLL-U parsing, tree validation, and serialization.
//!
//! This is the ingestion boundary of the pipeline: corpora arrive as CoNLL-U
//! v2 text (tab-separated, `#` comments, blank-line sentence breaks) produced
//! by an external tagger/parser, and augmented corpora leave in the same
//! format. Only the columns the pipeline consumes are retained: FORM, UPOS,
//! HEAD, DEPREL, plus the MISC keys `Entity` (IOB2 tag) and `CSLang`
//! (language of a code-switched token). HEAD of `_` is an error rather than a
//! missing value: every downstream stage requires a full parse.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: HEAD column is not a non-negative integer: {value:?}")]
    BadHead { line: usize, value: String },
    #[error("sentence {sent}: HEAD {head} of token {index} is out of range (n={n})")]
    HeadOutOfRange {
        sent: String,
        index: usize,
        head: usize,
        n: usize,
    },
    #[error("sentence {sent}: token {index} is its own head")]
    SelfHead { sent: String, index: usize },
    #[error("line {line}: token id {found:?} breaks 1..n numbering (expected {expected})")]
    NonContiguous {
        line: usize,
        found: String,
        expected: usize,
    },
    #[error("line {line}: UPOS column is empty")]
    EmptyUpos { line: usize },
    #[error("input contains data but no sentences")]
    NoSentences,
}

#[derive(Debug, Error)]
pub enum TreeError {
    #[error("sentence {sent}: no root token (no HEAD = 0)")]
    NoRoot { sent: String },
    #[error("sentence {sent}: multiple root tokens ({count})")]
    MultipleRoots { sent: String, count: usize },
    #[error("sentence {sent}: head pointers of token {index} form a cycle")]
    Cycle { sent: String, index: usize },
    #[error("sentence {sent}: empty sentence")]
    Empty { sent: String },
}

/// One syntactic word. `index` is 1-based within its sentence; `head` is the
/// 1-based index of the governing token, with 0 meaning the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub index: usize,
    pub form: String,
    pub upos: String,
    pub head: usize,
    pub deprel: String,
    /// Effective language of the surface form: the sentence language, or the
    /// replacement language if this token was code-switched.
    pub lang: String,
    /// Set when the form was substituted by code-switching (MISC `CSLang`).
    pub cs_lang: Option<String>,
    /// IOB2 entity tag when the corpus carries one (MISC `Entity`).
    pub entity_tag: Option<String>,
}

impl Token {
    pub fn is_entity(&self) -> bool {
        matches!(&self.entity_tag, Some(t) if t != "O")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub id: String,
    /// Sentence-level language code (`# lang = ...` comment), possibly empty.
    pub lang: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn n(&self) -> usize {
        self.tokens.len()
    }
}

/// Head pointers of a validated single-rooted tree. `parent[i]` is the
/// 1-based parent of token `i + 1`, with 0 for the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyTree {
    pub parent: Vec<usize>,
    pub root: usize,
}

impl DependencyTree {
    pub fn n(&self) -> usize {
        self.parent.len()
    }
}

/// Where to look for entity annotations while parsing.
#[derive(Debug, Clone)]
pub enum EntitySource {
    /// `key=value` entry in the MISC column; `value != "O"` marks an entity.
    MiscKey(String),
    /// A whole column (0-based among the 10) holding bare IOB2 tags.
    Column(usize),
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub entity_source: EntitySource,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            entity_source: EntitySource::MiscKey("Entity".to_string()),
        }
    }
}

pub fn parse_conllu(text: &str) -> Result<Vec<Sentence>, ConlluError> {
    parse_conllu_with(text, &ParseOptions::default())
}

pub fn parse_conllu_with(text: &str, opts: &ParseOptions) -> Result<Vec<Sentence>, ConlluError> {
    let mut sentences = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    let mut comments: Vec<&str> = Vec::new();

    let flush = |block: &mut Vec<(usize, &str)>,
                     comments: &mut Vec<&str>,
                     sentences: &mut Vec<Sentence>|
     -> Result<(), ConlluError> {
        if !block.is_empty() {
            let default_id = (sentences.len() + 1).to_string();
            sentences.push(parse_block(block, comments, default_id, opts)?);
        }
        block.clear();
        comments.clear();
        Ok(())
    };

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        if line.trim().is_empty() {
            flush(&mut block, &mut comments, &mut sentences)?;
        } else if let Some(comment) = line.strip_prefix('#') {
            comments.push(comment);
        } else {
            block.push((line_no, line));
        }
    }
    flush(&mut block, &mut comments, &mut sentences)?;

    if sentences.is_empty() && !text.trim().is_empty() {
        return Err(ConlluError::NoSentences);
    }
    Ok(sentences)
}

fn comment_value<'a>(comment: &'a str, key: &str) -> Option<&'a str> {
    let rest = comment.trim_start();
    let rest = rest.strip_prefix(key)?.trim_start();
    let rest = rest.strip_prefix('=')?;
    Some(rest.trim())
}

fn parse_block(
    lines: &[(usize, &str)],
    comments: &[&str],
    default_id: String,
    opts: &ParseOptions,
) -> Result<Sentence, ConlluError> {
    let mut id = default_id;
    let mut lang = String::new();
    for c in comments {
        if let Some(v) = comment_value(c, "sent_id") {
            id = v.to_string();
        } else if let Some(v) = comment_value(c, "lang") {
            lang = v.to_string();
        }
    }

    let mut tokens = Vec::new();
    for &(line_no, line) in lines {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConlluError::ColumnCount {
                line: line_no,
                found: cols.len(),
            });
        }
        // Multi-word-token ranges ("1-2") and empty nodes ("1.1") carry no
        // HEAD/DEPREL of their own; skip them.
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let expected = tokens.len() + 1;
        let index: usize = cols[0].parse().map_err(|_| ConlluError::NonContiguous {
            line: line_no,
            found: cols[0].to_string(),
            expected,
        })?;
        if index != expected {
            return Err(ConlluError::NonContiguous {
                line: line_no,
                found: cols[0].to_string(),
                expected,
            });
        }
        let head: usize = cols[6].parse().map_err(|_| ConlluError::BadHead {
            line: line_no,
            value: cols[6].to_string(),
        })?;
        let upos = cols[3];
        if upos.is_empty() || upos == "_" {
            return Err(ConlluError::EmptyUpos { line: line_no });
        }

        let misc = parse_misc(cols[9]);
        let cs_lang = misc.get("CSLang").cloned();
        let entity_tag = match &opts.entity_source {
            EntitySource::MiscKey(key) => misc.get(key.as_str()).cloned(),
            EntitySource::Column(i) => {
                let v = cols[*i];
                if v == "_" || v.is_empty() {
                    None
                } else {
                    Some(v.to_string())
                }
            }
        };

        tokens.push(Token {
            index,
            form: cols[1].to_string(),
            upos: upos.to_string(),
            head,
            deprel: cols[7].to_string(),
            lang: cs_lang.clone().unwrap_or_else(|| lang.clone()),
            cs_lang,
            entity_tag,
        });
    }

    let n = tokens.len();
    for t in &tokens {
        if t.head > n {
            return Err(ConlluError::HeadOutOfRange {
                sent: id,
                index: t.index,
                head: t.head,
                n,
            });
        }
        if t.head == t.index {
            return Err(ConlluError::SelfHead {
                sent: id,
                index: t.index,
            });
        }
    }

    Ok(Sentence { id, lang, tokens })
}

fn parse_misc(misc: &str) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    if misc == "_" || misc.is_empty() {
        return map;
    }
    for part in misc.split('|') {
        if let Some((k, v)) = part.split_once('=') {
            map.insert(k.to_string(), v.to_string());
        }
    }
    map
}

/// Checks that the head pointers of `s` form a single-rooted acyclic
/// connected tree and returns it.
pub fn validate_tree(s: &Sentence) -> Result<DependencyTree, TreeError> {
    let n = s.n();
    if n == 0 {
        return Err(TreeError::Empty { sent: s.id.clone() });
    }
    let parent: Vec<usize> = s.tokens.iter().map(|t| t.head).collect();
    let roots: Vec<usize> = s
        .tokens
        .iter()
        .filter(|t| t.head == 0)
        .map(|t| t.index)
        .collect();
    match roots.len() {
        0 => return Err(TreeError::NoRoot { sent: s.id.clone() }),
        1 => {}
        count => {
            return Err(TreeError::MultipleRoots {
                sent: s.id.clone(),
                count,
            })
        }
    }
    // Walk up from every token; reaching the sentinel within n steps proves
    // the chain is acyclic and connected to the root.
    for start in 1..=n {
        let mut cur = start;
        let mut steps = 0;
        while cur != 0 {
            cur = parent[cur - 1];
            steps += 1;
            if steps > n {
                return Err(TreeError::Cycle {
                    sent: s.id.clone(),
                    index: start,
                });
            }
        }
    }
    Ok(DependencyTree {
        parent,
        root: roots[0],
    })
}

/// Canonical CoNLL-U emission: `sent_id`/`lang` comments, `_` for the unused
/// columns, `CSLang`/`Entity` in MISC. `parse_conllu` of the output
/// reproduces the input sentences field-for-field.
pub fn serialize_conllu(sentences: &[Sentence]) -> String {
    let mut out = String::new();
    for s in sentences {
        let _ = writeln!(out, "# sent_id = {}", s.id);
        if !s.lang.is_empty() {
            let _ = writeln!(out, "# lang = {}", s.lang);
        }
        for t in &s.tokens {
            let mut misc_parts = Vec::new();
            if let Some(cs) = &t.cs_lang {
                misc_parts.push(format!("CSLang={cs}"));
            }
            if let Some(tag) = &t.entity_tag {
                misc_parts.push(format!("Entity={tag}"));
            }
            let misc = if misc_parts.is_empty() {
                "_".to_string()
            } else {
                misc_parts.join("|")
            };
            let _ = writeln!(
                out,
                "{}\t{}\t_\t{}\t_\t_\t{}\t{}\t_\t{}",
                t.index, t.form, t.upos, t.head, t.deprel, misc
            );
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(index: usize, form: &str, upos: &str, head: usize, deprel: &str) -> Token {
        Token {
            index,
            form: form.to_string(),
            upos: upos.to_string(),
            head,
            deprel: deprel.to_string(),
            lang: String::new(),
            cs_lang: None,
            entity_tag: None,
        }
    }

    fn sentence(heads: &[usize]) -> Sentence {
        Sentence {
            id: "t".to_string(),
            lang: String::new(),
            tokens: heads
                .iter()
                .enumerate()
                .map(|(i, &h)| tok(i + 1, "w", "NOUN", h, "dep"))
                .collect(),
        }
    }

    #[test]
    fn parses_two_token_block() {
        let text = "1\tdog\t_\tNOUN\t_\t_\t0\troot\t_\t_\n2\tbarks\t_\tVERB\t_\t_\t1\tobj\t_\t_\n";
        let ss = parse_conllu(text).unwrap();
        assert_eq!(ss.len(), 1);
        assert_eq!(ss[0].n(), 2);
        let tree = validate_tree(&ss[0]).unwrap();
        assert_eq!(tree.root, 1);
        assert_eq!(ss[0].tokens[1].form, "barks");
    }

    #[test]
    fn empty_input_gives_empty_list() {
        assert!(parse_conllu("").unwrap().is_empty());
        assert!(parse_conllu("\n\n").unwrap().is_empty());
    }

    #[test]
    fn comment_only_input_is_an_error() {
        assert!(matches!(
            parse_conllu("# sent_id = 1\n"),
            Err(ConlluError::NoSentences)
        ));
    }

    #[test]
    fn range_and_empty_node_lines_are_skipped() {
        let text = "1-2\tcannot\t_\tX\t_\t_\t_\t_\t_\t_\n\
                    1\tcan\t_\tAUX\t_\t_\t0\troot\t_\t_\n\
                    2\tnot\t_\tPART\t_\t_\t1\tadvmod\t_\t_\n\
                    2.1\tghost\t_\tX\t_\t_\t_\t_\t_\t_\n";
        let ss = parse_conllu(text).unwrap();
        assert_eq!(ss[0].n(), 2);
        assert_eq!(ss[0].tokens[0].form, "can");
    }

    #[test]
    fn malformed_column_count_is_reported_with_line() {
        let text = "1\tdog\tNOUN\n";
        match parse_conllu(text) {
            Err(ConlluError::ColumnCount { line, found }) => {
                assert_eq!(line, 1);
                assert_eq!(found, 3);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn underscore_head_is_an_error() {
        let text = "1\tdog\t_\tNOUN\t_\t_\t_\troot\t_\t_\n";
        assert!(matches!(parse_conllu(text), Err(ConlluError::BadHead { .. })));
    }

    #[test]
    fn head_out_of_range_is_an_error() {
        let text = "1\tdog\t_\tNOUN\t_\t_\t3\troot\t_\t_\n";
        assert!(matches!(
            parse_conllu(text),
            Err(ConlluError::HeadOutOfRange { .. })
        ));
    }

    #[test]
    fn misc_entity_and_cslang_are_read() {
        let text = "# sent_id = x\n# lang = en\n\
                    1\tAnna\t_\tPROPN\t_\t_\t0\troot\t_\tEntity=B-PER\n\
                    2\tHund\t_\tNOUN\t_\t_\t1\tobj\t_\tCSLang=de\n";
        let ss = parse_conllu(text).unwrap();
        let s = &ss[0];
        assert!(s.tokens[0].is_entity());
        assert_eq!(s.tokens[0].lang, "en");
        assert_eq!(s.tokens[1].cs_lang.as_deref(), Some("de"));
        assert_eq!(s.tokens[1].lang, "de");
    }

    #[test]
    fn entity_from_configured_column() {
        let opts = ParseOptions {
            entity_source: EntitySource::Column(5),
        };
        let text = "1\tAnna\t_\tPROPN\t_\tB-PER\t0\troot\t_\t_\n\
                    2\tsleeps\t_\tVERB\t_\tO\t1\tdep\t_\t_\n";
        let ss = parse_conllu_with(text, &opts).unwrap();
        assert!(ss[0].tokens[0].is_entity());
        assert!(!ss[0].tokens[1].is_entity());
    }

    #[test]
    fn chain_heads_validate() {
        let tree = validate_tree(&sentence(&[0, 1, 2])).unwrap();
        assert_eq!(tree.root, 1);
    }

    #[test]
    fn second_token_as_root_validates() {
        let tree = validate_tree(&sentence(&[2, 0])).unwrap();
        assert_eq!(tree.root, 2);
    }

    #[test]
    fn mutual_cycle_is_rejected() {
        // heads [2, 1]: no root, 1 <-> 2 cycle.
        assert!(matches!(
            validate_tree(&sentence(&[2, 1])),
            Err(TreeError::NoRoot { .. })
        ));
    }

    #[test]
    fn cycle_with_root_elsewhere_is_rejected() {
        // token 3 is root, tokens 1 and 2 point at each other.
        assert!(matches!(
            validate_tree(&sentence(&[2, 1, 0])),
            Err(TreeError::Cycle { .. })
        ));
    }

    #[test]
    fn multiple_roots_are_rejected() {
        assert!(matches!(
            validate_tree(&sentence(&[0, 0])),
            Err(TreeError::MultipleRoots { count: 2, .. })
        ));
    }

    #[test]
    fn serialize_then_parse_round_trips() {
        let text = "# sent_id = a\n# lang = en\n\
                    1\tdog\t_\tNOUN\t_\t_\t2\tnsubj\t_\tEntity=B-ANIMAL\n\
                    2\tbarks\t_\tVERB\t_\t_\t0\troot\t_\t_\n";
        let ss = parse_conllu(text).unwrap();
        let out = serialize_conllu(&ss);
        let back = parse_conllu(&out).unwrap();
        assert_eq!(ss, back);
        // Canonical output is a fixed point.
        assert_eq!(out, serialize_conllu(&back));
    }

    #[test]
    fn serialize_empty_list_is_empty() {
        assert_eq!(serialize_conllu(&[]), "");
    }

    #[test]
    fn serialize_records_cslang() {
        let mut ss = parse_conllu("1\tdog\t_\tNOUN\t_\t_\t0\troot\t_\t_\n").unwrap();
        ss[0].tokens[0].form = "hund".to_string();
        ss[0].tokens[0].cs_lang = Some("de".to_string());
        let out = serialize_conllu(&ss);
        assert!(out.contains("CSLang=de"));
    }
}
