//! Bilingual word-translation tables in MUSE format.
//!
//! A MUSE dictionary is plain UTF-8 text, one `source target` pair per line,
//! whitespace-separated. Duplicate source words accumulate their translations
//! in file order. Forms are NFC-normalized on load and lookup; matching is
//! case-sensitive unless [`LexiconOptions::lowercase`] is set.

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("no usable entries in lexicon {source_lang}-{target_lang} ({malformed} malformed lines)")]
    Empty {
        source_lang: String,
        target_lang: String,
        malformed: usize,
    },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LexiconOptions {
    pub lowercase: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadStats {
    pub pairs: usize,
    pub malformed: usize,
}

#[derive(Debug, Clone)]
pub struct BilingualLexicon {
    pub source_lang: String,
    pub target_lang: String,
    lowercase: bool,
    entries: BTreeMap<String, Vec<String>>,
}

impl BilingualLexicon {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn normalize(&self, word: &str) -> String {
        let nfc: String = word.nfc().collect();
        if self.lowercase {
            nfc.to_lowercase()
        } else {
            nfc
        }
    }

    pub fn translations(&self, word: &str) -> Option<&[String]> {
        self.entries
            .get(&self.normalize(word))
            .map(|v| v.as_slice())
    }

    /// Uniform draw over the word's translation list, `None` when absent.
    pub fn translate<R: Rng>(&self, word: &str, rng: &mut R) -> Option<&str> {
        let list = self.translations(word)?;
        Some(list[rng.gen_range(0..list.len())].as_str())
    }

    /// Iterates entries in sorted source-word order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Renders the lexicon back to MUSE text (sorted by source word).
    pub fn to_muse_string(&self) -> String {
        let mut out = String::new();
        for (src, targets) in &self.entries {
            for t in targets {
                out.push_str(src);
                out.push(' ');
                out.push_str(t);
                out.push('\n');
            }
        }
        out
    }
}

/// Parses a MUSE dictionary. Blank lines are ignored; lines with a field
/// count other than two are skipped and counted in [`LoadStats::malformed`].
pub fn load_lexicon(
    text: &str,
    source_lang: &str,
    target_lang: &str,
    opts: &LexiconOptions,
) -> Result<(BilingualLexicon, LoadStats), LexiconError> {
    let mut lex = BilingualLexicon {
        source_lang: source_lang.to_string(),
        target_lang: target_lang.to_string(),
        lowercase: opts.lowercase,
        entries: BTreeMap::new(),
    };
    let mut stats = LoadStats {
        pairs: 0,
        malformed: 0,
    };
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            stats.malformed += 1;
            continue;
        }
        let src = lex.normalize(fields[0]);
        let tgt = lex.normalize(fields[1]);
        lex.entries.entry(src).or_default().push(tgt);
        stats.pairs += 1;
    }
    if lex.entries.is_empty() {
        return Err(LexiconError::Empty {
            source_lang: source_lang.to_string(),
            target_lang: target_lang.to_string(),
            malformed: stats.malformed,
        });
    }
    Ok((lex, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn load(text: &str) -> (BilingualLexicon, LoadStats) {
        load_lexicon(text, "en", "de", &LexiconOptions::default()).unwrap()
    }

    #[test]
    fn duplicate_sources_accumulate_in_order() {
        let (lex, stats) = load("dog hund\ndog köter\n");
        assert_eq!(lex.translations("dog").unwrap(), ["hund", "köter"]);
        assert_eq!(stats.pairs, 2);
    }

    #[test]
    fn blank_lines_are_not_malformed() {
        let (lex, stats) = load("dog hund\n\n");
        assert_eq!(lex.len(), 1);
        assert_eq!(stats.malformed, 0);
    }

    #[test]
    fn three_field_line_is_skipped_and_counted() {
        let (lex, stats) = load("dog hund\na b c\n");
        assert_eq!(lex.len(), 1);
        assert_eq!(stats.malformed, 1);
    }

    #[test]
    fn empty_lexicon_is_an_error() {
        assert!(matches!(
            load_lexicon("a b c\n", "en", "de", &LexiconOptions::default()),
            Err(LexiconError::Empty { malformed: 1, .. })
        ));
    }

    #[test]
    fn single_translation_is_deterministic() {
        let (lex, _) = load("dog hund\n");
        let mut rng = rng::seeded(0);
        for _ in 0..16 {
            assert_eq!(lex.translate("dog", &mut rng), Some("hund"));
        }
    }

    #[test]
    fn absent_word_translates_to_none() {
        let (lex, _) = load("dog hund\n");
        let mut rng = rng::seeded(0);
        assert_eq!(lex.translate("cat", &mut rng), None);
    }

    #[test]
    fn translate_never_fabricates() {
        let (lex, _) = load("dog hund\ndog köter\ndog töle\n");
        let mut rng = rng::seeded(1);
        for _ in 0..200 {
            let t = lex.translate("dog", &mut rng).unwrap();
            assert!(["hund", "köter", "töle"].contains(&t));
        }
    }

    #[test]
    fn multi_translation_draws_are_uniform() {
        // 30_000 draws over three translations; each frequency must lie in
        // [0.323, 0.343] (binomial bound around 1/3 at this sample size).
        let (lex, _) = load("dog hund\ndog köter\ndog töle\n");
        let mut rng = rng::seeded(42);
        let mut counts = BTreeMap::new();
        let n = 30_000;
        for _ in 0..n {
            *counts
                .entry(lex.translate("dog", &mut rng).unwrap().to_string())
                .or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 3);
        for (_, c) in counts {
            let f = c as f64 / n as f64;
            assert!((0.323..=0.343).contains(&f), "frequency {f} out of bounds");
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let (lex, _) = load("dog hund\ndog köter\ndog töle\n");
        let a: Vec<_> = {
            let mut rng = rng::seeded(9);
            (0..50).map(|_| lex.translate("dog", &mut rng).unwrap().to_string()).collect()
        };
        let b: Vec<_> = {
            let mut rng = rng::seeded(9);
            (0..50).map(|_| lex.translate("dog", &mut rng).unwrap().to_string()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn nfc_normalization_unifies_lookups() {
        // "köter" with U+006F U+0308 (decomposed) vs U+00F6 (precomposed).
        let decomposed = "ko\u{0308}ter hund\n";
        let (lex, _) = load_lexicon(decomposed, "de", "en", &LexiconOptions::default()).unwrap();
        assert!(lex.translations("k\u{00f6}ter").is_some());
    }

    #[test]
    fn lowercase_is_off_by_default() {
        let (lex, _) = load("Dog hund\n");
        assert!(lex.translations("dog").is_none());
        assert!(lex.translations("Dog").is_some());

        let (lex, _) = load_lexicon(
            "Dog hund\n",
            "en",
            "de",
            &LexiconOptions { lowercase: true },
        )
        .unwrap();
        assert!(lex.translations("dog").is_some());
        assert!(lex.translations("DOG").is_some());
    }

    #[test]
    fn muse_round_trip() {
        let (lex, _) = load("dog hund\ncat katze\ndog köter\n");
        let text = lex.to_muse_string();
        let (back, _) = load_lexicon(&text, "en", "de", &LexiconOptions::default()).unwrap();
        assert_eq!(back.translations("dog").unwrap(), ["hund", "köter"]);
        assert_eq!(back.translations("cat").unwrap(), ["katze"]);
    }
}
