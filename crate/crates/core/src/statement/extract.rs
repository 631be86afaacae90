//! Pattern grammar for institutional statements.
//!
//! A sentence is tokenized, parenthesized asides are dropped, and the rest is
//! cut into segments at `;` and `:`. Inside a segment each modal opens a
//! clause:
//!
//! ```text
//! clause  := subject modal [adverb*] [not|never] verb [object] coord*
//! coord   := [","] (and|or) verb [object]        -- shares subject and modal
//! subject := agent-like noun phrase, or empty to reuse the previous subject
//! ```
//!
//! `and`/`or` followed by another modal starts a new clause with the same
//! subject. A segment without any modal yields at most one clause, where the
//! verb is the first known present-tense verb directly preceded by an
//! agent-like noun phrase. A segment that is nothing but an agent-like noun
//! phrase (`maintainer` in `maintainer: merge`) becomes the subject of the
//! following segment.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{
    canonicalize_deontic, singularize, ActionTypology, ComponentSpans, DeonticMap, InstitutionalStatement,
    PolarityTable, RoleLexicon, Span, StatementSource,
};

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "all", "any", "each", "every", "some", "both", "either", "neither", "no", "our", "its",
    "their", "his", "her", "your", "my", "this", "these", "those", "that", "other", "another", "such", "certain",
    "several", "many", "most", "few", "only", "one", "two", "three", "four", "five", "six", "seven", "eight",
    "nine", "ten", "new", "current", "existing",
];

const DEMONSTRATIVES: &[&str] = &["this", "these", "that", "those", "its", "our", "your", "my", "their"];

const CONJUNCTIONS: &[&str] = &["and", "or", "but", "nor", "then", "so"];

/// Words that end a noun phrase.
const STOP: &[&str] = &[
    "of", "in", "on", "at", "by", "for", "from", "with", "without", "to", "into", "onto", "upon", "about",
    "within", "across", "among", "amongst", "between", "through", "during", "under", "over", "after", "before",
    "since", "until", "via", "per", "as", "than", "against", "toward", "towards", "beyond", "unless", "if", "when",
    "whenever", "while", "once", "although", "though", "whereas", "because", "whether", "where", "who", "whom",
    "whose", "which", "that", "and", "or", "but", "nor", "so", "then", "is", "are", "am", "was", "were", "be",
    "been", "being", "has", "have", "had", "do", "does", "did", "not", "never", "also",
];

/// Subordinators and prepositions: a noun phrase right after one of these is
/// not a clause subject.
const NON_SUBJECT_LEAD: &[&str] = &[
    "of", "in", "on", "at", "by", "for", "from", "with", "without", "to", "into", "onto", "upon", "about",
    "within", "across", "among", "amongst", "between", "through", "during", "under", "over", "after", "before",
    "since", "until", "via", "per", "as", "than", "against", "toward", "towards", "beyond", "unless", "if", "when",
    "whenever", "while", "once", "although", "though", "whereas", "because", "whether", "where", "who", "whom",
    "whose", "which", "that",
];

const ADVERBS: &[&str] = &[
    "also", "only", "always", "usually", "generally", "typically", "promptly", "jointly", "collectively",
    "immediately", "still", "first", "additionally", "further", "furthermore", "instead", "likewise", "therefore",
    "thus", "hence", "however", "otherwise", "normally", "ordinarily", "either", "both", "then", "now", "together",
    "again", "already",
];

/// Words in `-ly` that are not adverbs.
const LY_NON_ADVERBS: &[&str] = &[
    "apply", "reply", "rely", "supply", "comply", "imply", "multiply", "family", "assembly", "ally", "italy",
    "july", "fly", "anomaly",
];

const PRONOUNS: &[&str] = &[
    "it", "them", "they", "this", "that", "these", "those", "him", "her", "us", "you", "me", "themselves",
    "itself", "himself", "herself", "yourself", "one", "ones", "we", "i", "he", "she", "something", "anything",
    "everything", "nothing",
];

/// Noun heads that denote people or bodies of people.
const AGENT_HEADS: &[&str] = &[
    "committee", "team", "board", "council", "group", "panel", "body", "person", "member", "anyone", "anybody",
    "everyone", "everybody", "someone", "somebody", "user", "owner", "chair", "chairperson", "leader", "lead",
    "officer", "director", "steward", "staff", "foundation", "organization", "organisation", "company",
    "community", "individual", "party", "representative", "delegate", "candidate", "nominee", "volunteer",
    "employee", "participant", "admin", "trustee", "assignee", "champion", "crew", "squad", "emeritus", "admins",
];

/// Words ending in an agent suffix that do not denote agents.
const NON_AGENT_SUFFIXED: &[&str] = &[
    "number", "order", "other", "matter", "paper", "charter", "letter", "folder", "header", "footer", "border",
    "corner", "water", "power", "tier", "layer", "cluster", "filter", "parameter", "register", "character",
    "chapter", "quarter", "barrier", "trigger", "marker", "error", "mirror", "floor", "door", "color", "colour",
    "factor", "vector", "sector", "behavior", "behaviour", "favor", "favour", "honor", "honour", "anchor",
    "minor", "major", "interior", "exterior", "prior", "superior", "either", "neither", "whether", "rather",
    "further", "never", "ever", "however", "together", "another", "later", "server", "container", "browser",
    "compiler", "parser", "buffer", "logger", "scheduler", "handler", "installer", "wrapper", "identifier",
    "linter", "formatter", "runner", "checker", "tracker", "list", "checklist", "allowlist", "blocklist",
    "whitelist", "blacklist", "wishlist", "playlist", "median", "meridian", "tutorial", "calendar",
    "counter", "master", "river", "sister", "december", "november", "october", "september",
    "meter", "liter", "manner", "answer", "corridor",
];

/// Acronyms that are artifacts rather than bodies.
const NON_AGENT_ACRONYMS: &[&str] = &[
    "api", "cla", "dco", "pr", "prs", "ci", "cd", "url", "readme", "faq", "cve", "rfc", "rfcs", "md", "ip",
    "os", "ui", "cli", "sdk", "http", "json", "yaml", "todo", "ok", "id",
];

/// Verbs recognized outside the typology, for modal-free clauses and
/// coordination.
const COMMON_VERBS: &[&str] = &[
    "be", "have", "do", "make", "take", "give", "get", "need", "ensure", "provide", "keep", "support", "help",
    "guide", "select", "choose", "work", "contribute", "participate", "mentor", "become", "consider", "evaluate",
    "monitor", "build", "plan", "prepare", "receive", "retain", "perform", "organize", "host", "verify", "allow",
    "permit", "prevent", "run", "ask", "send", "check", "track", "move", "attend", "handle", "coordinate",
    "sign", "reach", "see", "want", "try", "wait", "leave", "remain", "include", "discuss", "deprecate",
    "delegate", "operate", "oversee", "mediate", "investigate", "escalate", "vet", "audit", "evaluate",
];

const IRREGULAR_PRESENT: &[(&str, &str)] =
    &[("is", "be"), ("are", "be"), ("am", "be"), ("has", "have"), ("does", "do"), ("goes", "go")];

#[derive(Debug, Clone)]
struct Tok<'a> {
    full: &'a str,
    start: usize,
    end: usize,
    text: &'a str,
    lower: String,
    word: bool,
}

impl Tok<'_> {
    fn is(&self, list: &[&str]) -> bool {
        self.word && list.contains(&self.lower.as_str())
    }

    fn is_adverb(&self) -> bool {
        self.is(ADVERBS)
            || (self.word
                && self.lower.len() > 4
                && self.lower.ends_with("ly")
                && !LY_NON_ADVERBS.contains(&self.lower.as_str()))
    }

    fn is_numeral(&self) -> bool {
        self.word && self.text.bytes().all(|b| b.is_ascii_digit())
    }
}

fn tokenize(sentence: &str) -> Vec<Tok<'_>> {
    let chars: Vec<(usize, char)> = sentence.char_indices().collect();
    let byte_at = |i: usize| chars.get(i).map_or(sentence.len(), |c| c.0);
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (start, ch) = chars[i];
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        let word = ch.is_alphanumeric();
        if word {
            while j < chars.len() {
                let c = chars[j].1;
                if c.is_alphanumeric() {
                    j += 1;
                } else if matches!(c, '-' | '\'' | '\u{2019}')
                    && chars.get(j + 1).is_some_and(|n| n.1.is_alphanumeric())
                {
                    j += 2;
                } else {
                    break;
                }
            }
        }
        let end = byte_at(j);
        let text = &sentence[start..end];
        out.push(Tok { full: sentence, start, end, text, lower: text.to_lowercase(), word });
        i = j;
    }
    out
}

/// Drops bracketed asides together with their brackets.
fn drop_asides(toks: Vec<Tok<'_>>) -> Vec<Tok<'_>> {
    let mut depth = 0usize;
    let mut out = Vec::with_capacity(toks.len());
    for tok in toks {
        match tok.text {
            "(" | "[" => depth += 1,
            ")" | "]" if depth > 0 => depth -= 1,
            ")" | "]" => {}
            _ if depth == 0 => out.push(tok),
            _ => {}
        }
    }
    out
}

fn segments(toks: &[Tok<'_>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, tok) in toks.iter().enumerate() {
        if matches!(tok.text, ";" | ":") {
            out.push((start, i));
            start = i + 1;
        }
    }
    out.push((start, toks.len()));
    out
}

/// Token range `[start, end)` of a noun phrase.
type Np = (usize, usize);

/// Pre-verbal parts of a clause found in one pass.
struct Clause {
    subject: Np,
    deontic: Option<Np>,
    verb: usize,
    lemma: String,
}

/// Rule-based statement extractor with its vocabularies.
#[derive(Debug, Clone)]
pub struct Extractor {
    lexicon: RoleLexicon,
    deontics: DeonticMap,
    polarity: PolarityTable,
    typology: ActionTypology,
    verbs: BTreeSet<String>,
}

impl Default for Extractor {
    fn default() -> Self {
        Extractor::new(
            RoleLexicon::default(),
            DeonticMap::default(),
            PolarityTable::default(),
            ActionTypology::default(),
        )
    }
}

impl Extractor {
    pub fn new(lexicon: RoleLexicon, deontics: DeonticMap, polarity: PolarityTable, typology: ActionTypology) -> Self {
        let mut verbs: BTreeSet<String> = typology.verbs().map(ToString::to_string).collect();
        verbs.extend(COMMON_VERBS.iter().map(|v| v.to_string()));
        Extractor { lexicon, deontics, polarity, typology, verbs }
    }

    pub fn lexicon(&self) -> &RoleLexicon {
        &self.lexicon
    }

    pub fn deontics(&self) -> &DeonticMap {
        &self.deontics
    }

    pub fn polarity(&self) -> &PolarityTable {
        &self.polarity
    }

    pub fn typology(&self) -> &ActionTypology {
        &self.typology
    }

    /// Statements of one sentence, without provenance.
    pub fn extract(&self, sentence: &str) -> Vec<InstitutionalStatement> {
        self.extract_at(sentence, &StatementSource::default())
    }

    /// Statements of one sentence; ids are `{repo}/{snapshot}/{sentence:04}/{k}`.
    pub fn extract_at(&self, sentence: &str, source: &StatementSource) -> Vec<InstitutionalStatement> {
        let toks = drop_asides(tokenize(sentence));
        let mut clauses = Vec::new();
        let mut carried: Option<Np> = None;
        for (a, b) in segments(&toks) {
            self.segment(&toks, a, b, &mut carried, &mut clauses);
        }
        if clauses.is_empty() {
            log::debug!("no institutional statement in {sentence:?}");
        }
        clauses
            .into_iter()
            .enumerate()
            .map(|(k, (clause, object))| {
                let mut src = source.clone();
                src.statement_id =
                    format!("{}/{}/{:04}/{}", source.repo_id, source.snapshot, source.sentence_index, k);
                self.build(sentence, &toks, clause, object, src)
            })
            .collect()
    }

    fn segment(&self, toks: &[Tok<'_>], a: usize, b: usize, carried: &mut Option<Np>, out: &mut Vec<(Clause, Option<usize>)>) {
        let mut pos = a;
        let mut saw_modal = false;
        while let Some((m, len)) = self.find_modal(toks, pos, b) {
            saw_modal = true;
            let subject = self.subject(toks, pos, m).or(if filler_only(toks, pos, m) { *carried } else { None });
            match subject.and_then(|s| self.modal_clause(toks, s, m, len, b, out)) {
                Some(end) => {
                    *carried = subject;
                    pos = end;
                }
                None => pos = m + len,
            }
        }
        if !saw_modal {
            self.plain_clause(toks, a, b, carried, out);
        }
    }

    fn find_modal(&self, toks: &[Tok<'_>], from: usize, to: usize) -> Option<(usize, usize)> {
        (from..to).find_map(|i| self.modal_at(toks, i, to).map(|len| (i, len)))
    }

    /// Length in tokens of the longest modal phrase starting at `i`.
    fn modal_at(&self, toks: &[Tok<'_>], i: usize, to: usize) -> Option<usize> {
        if !toks[i].word || (i > 0 && toks[i - 1].is(DETERMINERS)) {
            return None;
        }
        if toks.get(i + 1).is_some_and(Tok::is_numeral) {
            return None;
        }
        let longest = self.deontics.max_words().min(to - i);
        (1..=longest).rev().find(|&len| {
            let words = &toks[i..i + len];
            words.iter().all(|t| t.word)
                && self.deontics.get(&words.iter().map(|t| t.lower.as_str()).collect::<Vec<_>>().join(" ")).is_some()
        })
    }

    fn modal_clause(
        &self,
        toks: &[Tok<'_>],
        subject: Np,
        m: usize,
        len: usize,
        b: usize,
        out: &mut Vec<(Clause, Option<usize>)>,
    ) -> Option<usize> {
        let mut i = skip_adverbs(toks, m + len, b);
        let mut deontic_end = m + len;
        if i < b && toks[i].is(&["not", "never"]) {
            deontic_end = i + 1;
            i = skip_adverbs(toks, i + 1, b);
        }
        if i >= b || !self.verb_slot(toks, i, b) {
            return None;
        }
        let deontic = Some((m, deontic_end));
        let mut end = push(out, toks, Clause { subject, deontic, verb: i, lemma: toks[i].lower.clone() }, b);
        while let Some(next) = self.coordinated_verb(toks, end, b, |v| self.verbs.contains(v)) {
            end = push(out, toks, Clause { subject, deontic, verb: next, lemma: toks[next].lower.clone() }, b);
        }
        Some(end)
    }

    /// A clause without a modal: the first known present-tense verb whose
    /// left neighbour is an agent-like noun phrase (or nothing, reusing the
    /// carried subject).
    fn plain_clause(&self, toks: &[Tok<'_>], a: usize, b: usize, carried: &mut Option<Np>, out: &mut Vec<(Clause, Option<usize>)>) {
        for v in a..b {
            let Some(lemma) = self.present_lemma(&toks[v]) else { continue };
            let subject = if filler_only(toks, a, v) {
                *carried
            } else {
                self.backward_np(toks, a, v).filter(|&np| self.agent_like(toks, np))
            };
            let Some(subject) = subject else { continue };
            let (verb, lemma) = match (toks.get(v + 1), toks.get(v + 2)) {
                (Some(not), Some(_)) if lemma == "do" && not.is(&["not"]) && self.verb_slot(toks, v + 2, b) => {
                    (v + 2, toks[v + 2].lower.clone())
                }
                _ => (v, lemma),
            };
            let mut end = push(out, toks, Clause { subject, deontic: None, verb, lemma }, b);
            while let Some(next) = self.coordinated_verb(toks, end, b, |w| self.present_form(w).is_some()) {
                let lemma = self.present_form(&toks[next].lower).unwrap_or_default();
                end = push(out, toks, Clause { subject, deontic: None, verb: next, lemma }, b);
            }
            *carried = Some(subject);
            return;
        }
        let bare = self.forward_np(toks, a, b).filter(|&np| {
            (np.1..b).all(|i| !toks[i].word) && self.agent_like(toks, np)
        });
        if bare.is_some() {
            *carried = bare;
        }
    }

    /// `[,] and|or verb` right after a clause, where the verb is accepted by
    /// `is_verb` and is not itself a modal.
    fn coordinated_verb(&self, toks: &[Tok<'_>], at: usize, b: usize, is_verb: impl Fn(&str) -> bool) -> Option<usize> {
        let mut j = at;
        if j < b && toks[j].text == "," {
            j += 1;
        }
        if !(j < b && toks[j].is(&["and", "or"])) {
            return None;
        }
        let v = skip_adverbs(toks, j + 1, b);
        (v < b && toks[v].word && is_verb(&toks[v].lower) && self.modal_at(toks, v, b).is_none()).then_some(v)
    }

    fn verb_slot(&self, toks: &[Tok<'_>], i: usize, b: usize) -> bool {
        let t = &toks[i];
        t.word
            && !t.is_numeral()
            && !t.is(DETERMINERS)
            && !t.is(PRONOUNS)
            && !(t.is(STOP) && !t.is(&["be", "have", "do"]))
            && self.modal_at(toks, i, b).is_none()
    }

    fn present_form(&self, word: &str) -> Option<String> {
        if let Some((_, lemma)) = IRREGULAR_PRESENT.iter().find(|(w, _)| *w == word) {
            return Some(lemma.to_string());
        }
        if self.verbs.contains(word) {
            return Some(word.to_string());
        }
        let candidates = [
            word.strip_suffix("ies").map(|s| format!("{s}y")),
            word.strip_suffix("es").map(ToString::to_string),
            word.strip_suffix('s').map(ToString::to_string),
        ];
        candidates.into_iter().flatten().find(|c| self.verbs.contains(c))
    }

    fn present_lemma(&self, tok: &Tok<'_>) -> Option<String> {
        if !tok.word {
            return None;
        }
        self.present_form(&tok.lower)
    }

    /// Subject of a modal clause from the tokens before the modal.
    ///
    /// Tried in order: the phrase opening the last comma-separated part, the
    /// phrase right before the modal, and the phrase opening the region.
    fn subject(&self, toks: &[Tok<'_>], a: usize, m: usize) -> Option<Np> {
        let after_comma = (a..m).rev().find(|&i| toks[i].text == ",").map_or(a, |i| i + 1);
        let candidates = [self.forward_np(toks, after_comma, m), self.backward_np(toks, a, m), self.forward_np(toks, a, m)];
        candidates.into_iter().flatten().find(|&np| self.agent_like(toks, np))
    }

    /// Noun phrase opening `[a, b)` after punctuation, conjunctions and
    /// determiners, cut at the first stop word and stripped of trailing
    /// adverbs.
    fn forward_np(&self, toks: &[Tok<'_>], a: usize, b: usize) -> Option<Np> {
        let mut i = a;
        while i < b && (!toks[i].word || toks[i].is(CONJUNCTIONS)) {
            i += 1;
        }
        let start = skip_determiners(toks, i, b);
        let mut end = start;
        while end < b
            && toks[end].word
            && !toks[end].is(STOP)
            && self.modal_at(toks, end, b).is_none()
            && !(end > start && participle(&toks[end]))
        {
            end += 1;
        }
        while end > start && toks[end - 1].is_adverb() {
            end -= 1;
        }
        (end > start).then_some((start, end))
    }

    /// Noun phrase ending right before `b` (trailing adverbs allowed), not
    /// governed by a preposition or subordinator.
    fn backward_np(&self, toks: &[Tok<'_>], a: usize, b: usize) -> Option<Np> {
        let mut end = b;
        while end > a && toks[end - 1].is_adverb() {
            end -= 1;
        }
        let mut start = end;
        while start > a
            && toks[start - 1].word
            && !toks[start - 1].is(STOP)
            && !toks[start - 1].is(DETERMINERS)
            && !toks[start - 1].is_numeral()
        {
            start -= 1;
        }
        if start == end {
            return None;
        }
        let mut lead = start;
        while lead > a && (toks[lead - 1].is(DETERMINERS) || toks[lead - 1].is_numeral()) {
            lead -= 1;
        }
        if lead > a && toks[lead - 1].is(NON_SUBJECT_LEAD) {
            return None;
        }
        Some((start, end))
    }

    fn agent_like(&self, toks: &[Tok<'_>], (start, end): Np) -> bool {
        let head = &toks[end - 1];
        if head.is(PRONOUNS) {
            return false;
        }
        let phrase = toks[start].text_span(&toks[end - 1]);
        if self.lexicon.lookup(phrase).is_some() || self.lexicon.lookup(head.text).is_some() {
            return true;
        }
        let singular = singularize(&head.lower);
        if AGENT_HEADS.contains(&singular.as_str()) {
            return true;
        }
        let suffixed = ["er", "or", "ist", "ian"].iter().any(|s| singular.ends_with(s));
        if suffixed && singular.len() > 4 && !NON_AGENT_SUFFIXED.contains(&singular.as_str()) {
            return true;
        }
        let demonstrative = start > 0 && toks[start - 1].is(DEMONSTRATIVES);
        let first_word = toks.iter().position(|t| t.word && !t.is_numeral()).unwrap_or(0);
        (start..end).any(|i| {
            let t = &toks[i];
            let acronym = t.text.len() >= 2
                && t.text.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit())
                && t.text.chars().any(|c| c.is_ascii_uppercase())
                && !NON_AGENT_ACRONYMS.contains(&t.lower.as_str());
            let proper = i != first_word && !demonstrative && t.text.starts_with(char::is_uppercase);
            acronym || proper
        })
    }

    fn role_name(&self, raw: &str, toks: &[Tok<'_>], (start, end): Np) -> (String, bool) {
        if let Some(canonical) = self.lexicon.lookup(raw) {
            return (canonical.to_string(), true);
        }
        // Longest listed suffix: "new core maintainers" is a core maintainer.
        for i in start + 1..end {
            if let Some(canonical) = self.lexicon.lookup(toks[i].text_span(&toks[end - 1])) {
                return (canonical.to_string(), true);
            }
        }
        let role = self.lexicon.normalize(raw);
        (role.canonical, role.controlled)
    }

    fn build(
        &self,
        sentence: &str,
        toks: &[Tok<'_>],
        clause: Clause,
        object: Option<usize>,
        source: StatementSource,
    ) -> InstitutionalStatement {
        let span_of = |(s, e): Np| Span { start: toks[s].start, end: toks[e - 1].end };
        let role_span = span_of(clause.subject);
        let role_raw = sentence[role_span.range()].to_string();
        let (role_canon, role_controlled) = self.role_name(&role_raw, toks, clause.subject);
        let deontic_span = clause.deontic.map(span_of);
        let deontic_raw = deontic_span.map(|s| sentence[s.range()].to_string());
        let deontic_canon = canonicalize_deontic(deontic_raw.as_deref().unwrap_or(""), &self.deontics);
        let action_span = span_of((clause.verb, clause.verb + 1));
        let object_span = object.map(|o| span_of((o, o + 1)));
        let object_raw = object_span.map(|s| sentence[s.range()].to_string());
        InstitutionalStatement {
            source,
            sentence: sentence.to_string(),
            role_raw,
            role_canon,
            role_controlled,
            deontic_raw,
            deontic_canon,
            polarity: self.polarity.get(deontic_canon),
            action_raw: sentence[action_span.range()].to_string(),
            action_type: self.typology.classify(&clause.lemma).to_string(),
            action_lemma: clause.lemma,
            object_head: object_raw.as_deref().map(|o| singularize(&o.to_lowercase())),
            object_raw,
            spans: ComponentSpans { role: role_span, deontic: deontic_span, action: action_span, object: object_span },
        }
    }
}

impl<'a> Tok<'a> {
    /// Source text from this token through `last`.
    fn text_span(&self, last: &Tok<'a>) -> &'a str {
        &self.full[self.start..last.end]
    }
}

/// Pushes a clause with its object and returns the token after it.
/// A copula takes a complement, not an object.
fn push(out: &mut Vec<(Clause, Option<usize>)>, toks: &[Tok<'_>], clause: Clause, b: usize) -> usize {
    let (object, end) = object_after(toks, clause.verb + 1, b);
    let object = object.filter(|_| clause.lemma != "be");
    out.push((clause, object));
    end
}

/// Head token of the direct object starting at `i`, and the token after the
/// object phrase.
fn object_after(toks: &[Tok<'_>], i: usize, b: usize) -> (Option<usize>, usize) {
    let start = skip_determiners(toks, i, b);
    if start >= b || !toks[start].word || toks[start].is(STOP) || toks[start].is_adverb() {
        return (None, i);
    }
    let mut end = start;
    while end < b
        && toks[end].word
        && !toks[end].is(STOP)
        && !(end > start && (participle(&toks[end]) || toks[end].is_adverb()))
    {
        end += 1;
    }
    if end == start || toks[end - 1].is(PRONOUNS) {
        return (None, end.max(i));
    }
    (Some(end - 1), end)
}

fn participle(t: &Tok<'_>) -> bool {
    t.lower.len() > 4 && (t.lower.ends_with("ed") || t.lower.ends_with("ing"))
}

fn skip_determiners(toks: &[Tok<'_>], mut i: usize, b: usize) -> usize {
    let start = i;
    while i < b {
        let t = &toks[i];
        if t.is(DETERMINERS) || t.is_numeral() {
            i += 1;
        } else if t.is(&["of"]) && i > start && toks.get(i + 1).is_some_and(|n| n.is(DETERMINERS)) {
            i += 1;
        } else if t.is(&["at"]) && toks.get(i + 1).is_some_and(|n| n.is(&["least", "most"])) {
            i += 2;
        } else {
            break;
        }
    }
    i
}

fn skip_adverbs(toks: &[Tok<'_>], mut i: usize, b: usize) -> usize {
    while i < b && toks[i].is_adverb() {
        i += 1;
    }
    i
}

/// True when `[a, b)` holds only punctuation, conjunctions and adverbs.
fn filler_only(toks: &[Tok<'_>], a: usize, b: usize) -> bool {
    toks[a..b].iter().all(|t| !t.word || t.is(CONJUNCTIONS) || t.is_adverb())
}
