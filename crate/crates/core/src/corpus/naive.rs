//! Built-in rule pipeline: tokenizer, stoplist, suffix-stripping lemmatizer
//! and a lexicon-backed coarse part-of-speech guesser.
//!
//! The pipeline is deliberately small and fully deterministic. Lemmatization
//! is iterated to a fixpoint and the part of speech is guessed from the lemma
//! alone, so annotating the joined output of a previous run reproduces it.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use super::Pos;

const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any",
    "are", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both",
    "but", "by", "can", "could", "d", "did", "do", "does", "doing", "don", "down", "during",
    "each", "either", "else", "even", "ever", "every", "few", "for", "from", "further", "had",
    "has", "have", "having", "he", "her", "here", "hers", "herself", "him", "himself", "his",
    "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "ll", "m", "may", "me",
    "might", "mine", "more", "most", "must", "my", "myself", "neither", "no", "nor", "not", "of",
    "off", "on", "once", "only", "or", "other", "ought", "our", "ours", "ourselves", "out",
    "over", "own", "per", "re", "s", "same", "shall", "she", "should", "so", "some", "such", "t",
    "than", "that", "the", "their", "theirs", "them", "themselves", "then", "there", "these",
    "they", "this", "those", "through", "thus", "to", "too", "under", "unless", "until", "up",
    "upon", "us", "ve", "very", "via", "was", "we", "were", "what", "when", "where", "whether",
    "which", "while", "who", "whom", "whose", "why", "will", "with", "within", "without",
    "would", "yet", "you", "your", "yours", "yourself", "yourselves",
];

const VERBS: &[&str] = &[
    "absorb", "add", "adjust", "allow", "arrange", "assemble", "bake", "baste", "beat", "blanch",
    "blend", "boil", "braise", "bring", "broil", "brown", "brush", "chill", "chop", "coat",
    "combine", "continue", "cook", "cool", "core", "cover", "crack", "cream", "crumble", "crush",
    "cube", "cut", "debone", "deglaze", "desire", "dice", "dip", "discard", "dissolve", "divide",
    "drain", "dredge", "drizzle", "drop", "dust", "enjoy", "fill", "flip", "fluff", "fold",
    "freeze", "fry", "garnish", "get", "give", "glaze", "go", "grate", "grease", "grill", "grind",
    "heat", "hold", "julienne", "keep", "knead", "ladle", "layer", "leave", "let", "line",
    "make", "marinate", "mash", "measure", "melt", "mince", "mix", "moisten", "need", "open",
    "pat", "peel", "pinch", "pit", "place", "poach", "pound", "pour", "prepare", "preheat",
    "press", "process", "puree", "put", "reduce", "refrigerate", "reheat", "remain", "remove",
    "repeat", "reserve", "rest", "return", "rinse", "roast", "roll", "rub", "saute", "scatter",
    "scoop", "scrape", "sear", "season", "seem", "separate", "serve", "set", "shake", "shape",
    "shred", "sift", "simmer", "skewer", "skim", "slice", "soak", "spoon", "spray", "spread",
    "sprinkle", "squeeze", "stand", "steam", "steep", "stir", "strain", "stuff", "take", "taste",
    "thaw", "thicken", "toast", "top", "toss", "transfer", "trim", "turn", "use", "wash",
    "whip", "whisk", "wilt", "wipe", "wrap", "zest",
];

const ADJECTIVES: &[&str] = &[
    "additional", "big", "bitter", "black", "boiling", "brown", "chunky", "clean", "cold",
    "creamy", "crisp", "crispy", "crunchy", "dark", "deep", "delicious", "dry", "easy", "entire",
    "extra", "fine", "firm", "flat", "fluffy", "fragrant", "fresh", "frozen", "full", "golden",
    "good", "great", "green", "half", "heavy", "hot", "large", "lean", "light", "little", "long",
    "low", "medium", "mild", "moist", "new", "next", "nice", "old", "orange", "pink", "plain",
    "quick", "raw", "ready", "red", "remaining", "rich", "ripe", "salty", "savory", "shallow",
    "short", "small", "smooth", "soft", "sour", "spicy", "sticky", "sweet", "tender", "thick",
    "thin", "tight", "traditional", "warm", "wet", "white", "whole", "wide", "yellow",
];

const ADVERBS: &[&str] = &[
    "again", "almost", "already", "always", "approximately", "aside", "away", "back", "briefly",
    "carefully", "completely", "constantly", "evenly", "finely", "frequently", "gently",
    "immediately", "lightly", "meanwhile", "never", "now", "occasionally", "often", "quickly",
    "roughly", "slightly", "slowly", "sometimes", "soon", "still", "thinly", "thoroughly",
    "together", "well",
];

const NUMBER_WORDS: &[&str] = &[
    "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
    "twelve", "twenty", "thirty", "forty", "fifty", "hundred", "dozen",
];

/// Singular nouns that end in an `s` the plural rules would otherwise strip.
const INVARIANT_NOUNS: &[&str] = &[
    "asparagus", "couscous", "hummus", "molasses", "octopus", "citrus", "bass", "swiss",
    "series", "species", "gas", "lens", "bolognese", "mayonnaise",
];

const IRREGULAR: &[(&str, &str)] = &[
    ("brought", "bring"),
    ("bought", "buy"),
    ("chose", "choose"),
    ("chosen", "choose"),
    ("came", "come"),
    ("did", "do"),
    ("done", "do"),
    ("ate", "eat"),
    ("eaten", "eat"),
    ("fell", "fall"),
    ("felt", "feel"),
    ("froze", "freeze"),
    ("frozen", "frozen"),
    ("gave", "give"),
    ("given", "give"),
    ("got", "get"),
    ("gotten", "get"),
    ("ground", "ground"),
    ("held", "hold"),
    ("kept", "keep"),
    ("knives", "knife"),
    ("leaves", "leaf"),
    ("loaves", "loaf"),
    ("halves", "half"),
    ("made", "make"),
    ("rose", "rise"),
    ("risen", "rise"),
    ("sat", "sit"),
    ("shook", "shake"),
    ("shaken", "shake"),
    ("stood", "stand"),
    ("took", "take"),
    ("taken", "take"),
    ("went", "go"),
    ("gone", "go"),
    ("children", "child"),
    ("feet", "foot"),
    ("teeth", "tooth"),
    ("geese", "goose"),
    ("mice", "mouse"),
];

struct Lexicon {
    stop: HashSet<&'static str>,
    pos: HashMap<&'static str, Pos>,
    invariant: HashSet<&'static str>,
    irregular: HashMap<&'static str, &'static str>,
}

fn lexicon() -> &'static Lexicon {
    static LEXICON: OnceLock<Lexicon> = OnceLock::new();
    LEXICON.get_or_init(|| {
        let mut pos = HashMap::new();
        // later tables win: a word listed as both adjective and verb is a verb
        for w in ADVERBS {
            pos.insert(*w, Pos::Adv);
        }
        for w in ADJECTIVES {
            pos.insert(*w, Pos::Adj);
        }
        for w in VERBS {
            pos.insert(*w, Pos::Verb);
        }
        for w in NUMBER_WORDS {
            pos.insert(*w, Pos::Num);
        }
        for w in INVARIANT_NOUNS {
            pos.insert(*w, Pos::Noun);
        }
        Lexicon {
            stop: STOPWORDS.iter().copied().collect(),
            pos,
            invariant: INVARIANT_NOUNS.iter().copied().collect(),
            irregular: IRREGULAR.iter().copied().collect(),
        }
    })
}

pub(crate) fn is_stopword(word: &str) -> bool {
    lexicon().stop.contains(word)
}

fn is_known(word: &str) -> bool {
    let lex = lexicon();
    lex.pos.contains_key(word) || lex.invariant.contains(word)
}

fn is_verb(word: &str) -> bool {
    matches!(lexicon().pos.get(word), Some(Pos::Verb))
}

/// A numeral: digits, optionally joined by `/`, `.`, `-` or `,` (e.g. `1/2`, `2-3`).
pub(crate) fn is_numeral(token: &str) -> bool {
    let bytes = token.as_bytes();
    !bytes.is_empty()
        && bytes[0].is_ascii_digit()
        && bytes[bytes.len() - 1].is_ascii_digit()
        && bytes
            .iter()
            .all(|b| b.is_ascii_digit() || matches!(b, b'/' | b'.' | b'-' | b','))
}

/// Lowercase and split into maximal alphanumeric runs; numeric separators
/// between two digits stay inside the token.
pub fn tokenize(text: &str) -> Vec<String> {
    let lower = text.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            current.push(c);
            continue;
        }
        let joins_digits = matches!(c, '/' | '.' | '-' | ',')
            && current.chars().last().is_some_and(|p| p.is_ascii_digit())
            && current.chars().all(|p| p.is_ascii_digit() || "/.-,".contains(p))
            && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit());
        if joins_digits {
            current.push(c);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

fn strip<'a>(word: &'a str, suffix: &str) -> Option<&'a str> {
    word.strip_suffix(suffix).filter(|s| s.chars().count() >= 2)
}

fn undouble(stem: &str) -> Option<String> {
    let mut it = stem.chars().rev();
    let last = it.next()?;
    let prev = it.next()?;
    (last == prev && !"aeiouls".contains(last)).then(|| stem[..stem.len() - last.len_utf8()].to_string())
}

/// Verb inflection candidates that resolve to a lexicon verb.
fn verb_base(word: &str) -> Option<String> {
    for suffix in ["ing", "ed"] {
        if let Some(stem) = strip(word, suffix) {
            if is_verb(stem) {
                return Some(stem.to_string());
            }
            let with_e = format!("{stem}e");
            if is_verb(&with_e) {
                return Some(with_e);
            }
            if let Some(single) = undouble(stem) {
                if is_verb(&single) {
                    return Some(single);
                }
            }
        }
    }
    for (suffix, repl) in [("ied", "y"), ("ies", "y")] {
        if let Some(stem) = strip(word, suffix) {
            let cand = format!("{stem}{repl}");
            if is_verb(&cand) {
                return Some(cand);
            }
        }
    }
    for suffix in ["es", "s"] {
        if let Some(stem) = strip(word, suffix) {
            if is_verb(stem) {
                return Some(stem.to_string());
            }
        }
    }
    None
}

/// Plural-to-singular rules applied regardless of the lexicon.
fn noun_singular(word: &str) -> Option<String> {
    if lexicon().invariant.contains(word) || word.chars().count() <= 3 {
        return None;
    }
    if word.ends_with("ss") || word.ends_with("us") || word.ends_with("is") {
        return None;
    }
    if let Some(stem) = word.strip_suffix("sses") {
        return Some(format!("{stem}ss"));
    }
    if let Some(stem) = word.strip_suffix("ies") {
        return Some(format!("{stem}y"));
    }
    for suffix in ["oes", "ches", "shes", "xes", "zes"] {
        if word.ends_with(suffix) {
            return Some(word[..word.len() - 2].to_string());
        }
    }
    word.strip_suffix('s').map(str::to_string)
}

fn lemma_step(word: &str) -> String {
    let lex = lexicon();
    if let Some(base) = lex.irregular.get(word) {
        return (*base).to_string();
    }
    if is_known(word) || is_numeral(word) {
        return word.to_string();
    }
    if let Some(base) = verb_base(word) {
        return base;
    }
    if let Some(base) = noun_singular(word) {
        // prefer a lexicon hit for the singular (e.g. "tomatoes" -> "tomato")
        return base;
    }
    word.to_string()
}

fn fixpoint(word: &str, step: impl Fn(&str) -> String) -> String {
    let mut current = word.to_string();
    // every non-trivial step shortens the word, so this terminates quickly
    for _ in 0..8 {
        let next = step(&current);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

/// Part-of-speech-agnostic lemma, used by the naive pipeline.
pub fn lemmatize(word: &str) -> String {
    fixpoint(word, lemma_step)
}

/// Lemma for a token whose part of speech is already known.
pub fn lemmatize_as(word: &str, pos: Pos) -> String {
    match pos {
        Pos::Noun => fixpoint(word, |w| {
            if let Some(base) = lexicon().irregular.get(w) {
                (*base).to_string()
            } else {
                noun_singular(w).unwrap_or_else(|| w.to_string())
            }
        }),
        Pos::Verb => fixpoint(word, |w| {
            if let Some(base) = lexicon().irregular.get(w) {
                return (*base).to_string();
            }
            if is_verb(w) {
                return w.to_string();
            }
            verb_base(w)
                .or_else(|| fallback_verb_base(w))
                .unwrap_or_else(|| w.to_string())
        }),
        Pos::Adj | Pos::Adv | Pos::Num | Pos::Other => word.to_string(),
    }
}

/// Heuristic stripping for verbs missing from the lexicon.
fn fallback_verb_base(word: &str) -> Option<String> {
    for suffix in ["ing", "ed"] {
        if let Some(stem) = strip(word, suffix) {
            if stem.chars().count() >= 3 {
                return Some(undouble(stem).unwrap_or_else(|| stem.to_string()));
            }
        }
    }
    if !word.ends_with("ss") && !word.ends_with("us") {
        if let Some(stem) = strip(word, "s") {
            if stem.chars().count() >= 3 {
                return Some(stem.to_string());
            }
        }
    }
    None
}

/// Coarse tag for a lemma: lexicon first, then suffix cues, defaulting to noun.
pub fn guess_pos(lemma: &str) -> Pos {
    if is_numeral(lemma) {
        return Pos::Num;
    }
    if is_stopword(lemma) {
        return Pos::Other;
    }
    if let Some(pos) = lexicon().pos.get(lemma) {
        return *pos;
    }
    let n = lemma.chars().count();
    if n > 4 && lemma.ends_with("ly") {
        Pos::Adv
    } else if n > 5 && (lemma.ends_with("ing") || lemma.ends_with("ed")) {
        Pos::Verb
    } else if n > 5 && ["ous", "ful", "ish", "less", "able", "ible"].iter().any(|s| lemma.ends_with(s)) {
        Pos::Adj
    } else {
        Pos::Noun
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_keeps_numeric_separators() {
        assert_eq!(tokenize("Add 1/2 cup, then 2-3 eggs."), ["add", "1/2", "cup", "then", "2-3", "eggs"]);
        assert_eq!(tokenize("Crêpes: French Pancakes"), ["crêpes", "french", "pancakes"]);
        assert_eq!(tokenize("don't"), ["don", "t"]);
        assert_eq!(tokenize("  "), Vec::<String>::new());
    }

    #[test]
    fn lemmas() {
        assert_eq!(lemmatize("onions"), "onion");
        assert_eq!(lemmatize("tomatoes"), "tomato");
        assert_eq!(lemmatize("berries"), "berry");
        assert_eq!(lemmatize("stirring"), "stir");
        assert_eq!(lemmatize("baked"), "bake");
        assert_eq!(lemmatize("chopped"), "chop");
        assert_eq!(lemmatize("fried"), "fry");
        assert_eq!(lemmatize("couscous"), "couscous");
        assert_eq!(lemmatize("glasses"), "glass");
        assert_eq!(lemmatize("took"), "take");
        assert_eq!(lemmatize("adds"), "add");
    }

    #[test]
    fn tagged_lemmas_respect_pos() {
        assert_eq!(lemmatize_as("sliced", Pos::Adj), "sliced");
        assert_eq!(lemmatize_as("sliced", Pos::Verb), "slice");
        assert_eq!(lemmatize_as("onions", Pos::Noun), "onion");
        assert_eq!(lemmatize_as("whisking", Pos::Verb), "whisk");
        assert_eq!(lemmatize_as("2", Pos::Num), "2");
    }

    #[test]
    fn pos_guesses() {
        assert_eq!(guess_pos("stir"), Pos::Verb);
        assert_eq!(guess_pos("gently"), Pos::Adv);
        assert_eq!(guess_pos("couscous"), Pos::Noun);
        assert_eq!(guess_pos("1/2"), Pos::Num);
        assert_eq!(guess_pos("fresh"), Pos::Adj);
        assert_eq!(guess_pos("unknownword"), Pos::Noun);
        assert_eq!(guess_pos("the"), Pos::Other);
    }
}
