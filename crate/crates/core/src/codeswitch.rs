//! Code-switching augmentation.
//!
//! Each eligible token of a sentence is independently selected with
//! probability `alpha`; a selected token is replaced by a dictionary
//! translation into a language chosen per token by the configured policy.
//! Heads, dependency relations, POS tags, and token order never change, so
//! the dependency structure of the sentence is preserved exactly. Dictionary
//! misses keep the original word and are reported, not errored.
//!
//! Eligibility: entity tokens are excluded when `protect_entities` is set,
//! and tokens whose UPOS appears in `excluded_upos` (punctuation by default)
//! are never replaced. Random draws are consumed only for eligible tokens —
//! one selection draw each, plus language/translation draws when selected —
//! which keeps augmentation deterministic under a fixed seed.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conllu::Sentence;
use crate::lexicon::BilingualLexicon;
use crate::rng;

#[derive(Debug, Error)]
pub enum CodeSwitchError {
    #[error("alpha must lie in [0, 1], got {0}")]
    BadAlpha(f64),
    #[error("mode {mode:?} needs a non-empty candidate language pool")]
    EmptyPool { mode: LanguageMode },
    #[error("mode {mode:?} needs a target language")]
    MissingTarget { mode: LanguageMode },
    #[error("no candidate language shares a family with {target:?}")]
    EmptyFamily { target: String },
    #[error("lexicon set is for source {expected:?} but sentence is {found:?}")]
    SourceMismatch { expected: String, found: String },
}

/// How the replacement language is picked for each selected token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LanguageMode {
    /// Always the designated target language.
    TargetOnly,
    /// Uniform over candidate languages in the target's family.
    SameFamily,
    /// Uniform over all candidate languages.
    RandomLanguages,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeSwitchPolicy {
    /// Replacement ratio: per-token selection probability.
    pub alpha: f64,
    pub mode: LanguageMode,
    /// Pool of replacement languages (used by SameFamily/RandomLanguages).
    pub candidate_langs: Vec<String>,
    /// Target language for TargetOnly and the family anchor for SameFamily.
    pub target_lang: Option<String>,
    /// Never replace named-entity tokens.
    pub protect_entities: bool,
    /// UPOS tags that are never replaced.
    pub excluded_upos: BTreeSet<String>,
    pub seed: u64,
}

impl CodeSwitchPolicy {
    pub fn new(alpha: f64, mode: LanguageMode) -> Result<Self, CodeSwitchError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(CodeSwitchError::BadAlpha(alpha));
        }
        Ok(CodeSwitchPolicy {
            alpha,
            mode,
            candidate_langs: Vec::new(),
            target_lang: None,
            protect_entities: false,
            excluded_upos: default_excluded_upos(),
            seed: 0,
        })
    }

    pub fn with_candidates(mut self, langs: &[&str]) -> Self {
        self.candidate_langs = langs.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn with_target(mut self, lang: &str) -> Self {
        self.target_lang = Some(lang.to_string());
        self
    }

    pub fn validate(&self) -> Result<(), CodeSwitchError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(CodeSwitchError::BadAlpha(self.alpha));
        }
        match self.mode {
            LanguageMode::TargetOnly => {
                if self.target_lang.is_none() {
                    return Err(CodeSwitchError::MissingTarget { mode: self.mode });
                }
            }
            LanguageMode::SameFamily => {
                if self.target_lang.is_none() {
                    return Err(CodeSwitchError::MissingTarget { mode: self.mode });
                }
                if self.candidate_langs.is_empty() {
                    return Err(CodeSwitchError::EmptyPool { mode: self.mode });
                }
            }
            LanguageMode::RandomLanguages => {
                if self.candidate_langs.is_empty() {
                    return Err(CodeSwitchError::EmptyPool { mode: self.mode });
                }
            }
        }
        Ok(())
    }
}

pub fn default_excluded_upos() -> BTreeSet<String> {
    ["PUNCT"].iter().map(|s| s.to_string()).collect()
}

/// Language code -> family name.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LanguageFamilyTable {
    map: BTreeMap<String, String>,
}

impl LanguageFamilyTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, lang: &str, family: &str) {
        self.map.insert(lang.to_string(), family.to_string());
    }

    pub fn family(&self, lang: &str) -> Option<&str> {
        self.map.get(lang).map(|s| s.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Grouping of the common evaluation languages by family.
    pub fn reference() -> Self {
        let mut t = Self::new();
        for (lang, family) in [
            ("en", "IE.Germanic"),
            ("de", "IE.Germanic"),
            ("nl", "IE.Germanic"),
            ("es", "IE.Romance"),
            ("fr", "IE.Romance"),
            ("pt", "IE.Romance"),
            ("bg", "IE.Slavic"),
            ("ru", "IE.Slavic"),
            ("ar", "Afro-asiatic"),
            ("vi", "Austro-asiatic"),
            ("tr", "Altaic"),
            ("ur", "Altaic"),
            ("el", "IE.Greek"),
            ("hi", "IE.Indic"),
            ("zh", "Sino-tibetan"),
            ("ja", "Japonic"),
            ("ko", "Korean"),
        ] {
            t.insert(lang, family);
        }
        t
    }
}

/// Lexicons out of one source language, indexed by target language.
#[derive(Debug, Clone, Default)]
pub struct LexiconSet {
    pub source_lang: String,
    by_target: BTreeMap<String, BilingualLexicon>,
}

impl LexiconSet {
    pub fn new(source_lang: &str) -> Self {
        LexiconSet {
            source_lang: source_lang.to_string(),
            by_target: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, lexicon: BilingualLexicon) {
        debug_assert_eq!(lexicon.source_lang, self.source_lang);
        self.by_target.insert(lexicon.target_lang.clone(), lexicon);
    }

    pub fn get(&self, target_lang: &str) -> Option<&BilingualLexicon> {
        self.by_target.get(target_lang)
    }

    pub fn target_langs(&self) -> impl Iterator<Item = &str> {
        self.by_target.keys().map(|s| s.as_str())
    }
}

fn is_eligible(token: &crate::conllu::Token, policy: &CodeSwitchPolicy) -> bool {
    if policy.protect_entities && token.is_entity() {
        return false;
    }
    !policy.excluded_upos.contains(&token.upos)
}

/// Independently selects each eligible token with probability `alpha`.
/// Returns 1-based token indices.
pub fn select_replacements<R: Rng>(
    s: &Sentence,
    policy: &CodeSwitchPolicy,
    rng: &mut R,
) -> BTreeSet<usize> {
    let mut selected = BTreeSet::new();
    for t in &s.tokens {
        if !is_eligible(t, policy) {
            continue;
        }
        if rng.gen_bool(policy.alpha) {
            selected.insert(t.index);
        }
    }
    selected
}

/// Picks the replacement language for one token according to the policy.
pub fn choose_replacement_language<R: Rng>(
    policy: &CodeSwitchPolicy,
    target_lang: &str,
    families: &LanguageFamilyTable,
    rng: &mut R,
) -> Result<String, CodeSwitchError> {
    match policy.mode {
        LanguageMode::TargetOnly => Ok(target_lang.to_string()),
        LanguageMode::SameFamily => {
            let family = families.family(target_lang);
            let pool: Vec<&String> = policy
                .candidate_langs
                .iter()
                .filter(|l| families.family(l).is_some() && families.family(l) == family)
                .collect();
            if pool.is_empty() || family.is_none() {
                return Err(CodeSwitchError::EmptyFamily {
                    target: target_lang.to_string(),
                });
            }
            Ok(pool[rng.gen_range(0..pool.len())].clone())
        }
        LanguageMode::RandomLanguages => {
            if policy.candidate_langs.is_empty() {
                return Err(CodeSwitchError::EmptyPool { mode: policy.mode });
            }
            Ok(policy.candidate_langs[rng.gen_range(0..policy.candidate_langs.len())].clone())
        }
    }
}

/// Per-sentence augmentation outcome, one JSON line per sentence in the
/// augmentation report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentRecord {
    pub sentence_id: String,
    pub selected: usize,
    pub replaced: usize,
    pub misses: usize,
    pub languages_used: BTreeSet<String>,
}

/// Replaces the selected tokens of `s` with dictionary translations.
///
/// The replacement language is chosen before the dictionary lookup and there
/// is no fallback on a miss: a selected token whose form is absent from the
/// chosen lexicon stays unchanged and counts as a miss.
pub fn code_switch_sentence<R: Rng>(
    s: &Sentence,
    lexicons: &LexiconSet,
    policy: &CodeSwitchPolicy,
    families: &LanguageFamilyTable,
    rng: &mut R,
) -> Result<(Sentence, AugmentRecord), CodeSwitchError> {
    policy.validate()?;
    if !s.lang.is_empty() && !lexicons.source_lang.is_empty() && s.lang != lexicons.source_lang {
        return Err(CodeSwitchError::SourceMismatch {
            expected: lexicons.source_lang.clone(),
            found: s.lang.clone(),
        });
    }

    let selected = select_replacements(s, policy, rng);
    let target = policy.target_lang.clone().unwrap_or_default();

    let mut out = s.clone();
    let mut record = AugmentRecord {
        sentence_id: s.id.clone(),
        selected: selected.len(),
        replaced: 0,
        misses: 0,
        languages_used: BTreeSet::new(),
    };

    for index in selected {
        let lang = choose_replacement_language(policy, &target, families, rng)?;
        let token = &mut out.tokens[index - 1];
        let translated = lexicons
            .get(&lang)
            .and_then(|lex| lex.translate(&token.form, rng).map(|t| t.to_string()));
        match translated {
            Some(form) => {
                token.form = form;
                token.lang = lang.clone();
                token.cs_lang = Some(lang.clone());
                record.replaced += 1;
                record.languages_used.insert(lang);
            }
            None => record.misses += 1,
        }
    }
    Ok((out, record))
}

/// Augments a corpus slice with one derived RNG stream per sentence, so the
/// result does not depend on processing order.
pub fn augment_sentences(
    sentences: &[Sentence],
    lexicons: &LexiconSet,
    policy: &CodeSwitchPolicy,
    families: &LanguageFamilyTable,
) -> Result<(Vec<Sentence>, Vec<AugmentRecord>), CodeSwitchError> {
    let mut out = Vec::with_capacity(sentences.len());
    let mut records = Vec::with_capacity(sentences.len());
    for s in sentences {
        let mut stream = rng::derived(policy.seed, rng::hash_str(&s.id));
        let (aug, rec) = code_switch_sentence(s, lexicons, policy, families, &mut stream)?;
        out.push(aug);
        records.push(rec);
    }
    Ok((out, records))
}
