//! Prompt templates for fusing annotations with an instruction-following
//! text generator.
//!
//! Both builders are pure string templates: identical inputs produce
//! byte-identical prompts.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

/// `PER (person), LOC (location), and ORG (organization)` — used when no
/// custom label glosses are supplied.
const DEFAULT_LABEL_GLOSSES: &[(&str, &str)] =
    &[("PER", "person"), ("LOC", "location"), ("ORG", "organization")];

fn gloss_list(glosses: &[(String, String)]) -> String {
    let rendered: Vec<String> = if glosses.is_empty() {
        DEFAULT_LABEL_GLOSSES
            .iter()
            .map(|(name, gloss)| format!("{name} ({gloss})"))
            .collect()
    } else {
        glosses
            .iter()
            .map(|(name, gloss)| format!("{name} ({gloss})"))
            .collect()
    };
    match rendered.len() {
        0 => String::new(),
        1 => rendered.into_iter().next().unwrap(),
        2 => format!("{} and {}", rendered[0], rendered[1]),
        n => format!("{}, and {}", rendered[..n - 1].join(", "), rendered[n - 1]),
    }
}

fn quote(text: &str) -> String {
    text.replace('\\', "\\\\").replace('\'', "\\'")
}

/// Renders token/tag pairs as a bracketed list of quoted tuples:
/// `[('Manchester', 'B-ORG'), ('City', 'I-ORG'), ...]`.
fn tuple_list(pairs: &[(String, String)]) -> String {
    let items: Vec<String> = pairs
        .iter()
        .map(|(word, tag)| format!("('{}', '{}')", quote(word), quote(tag)))
        .collect();
    format!("[{}]", items.join(", "))
}

/// Renders tokens as a bare bracketed list: `[Manchester, City, ...]`.
fn token_list(tokens: &[String]) -> String {
    format!("[{}]", tokens.join(", "))
}

/// Builds the tagging prompt that shows an already-tagged English
/// sentence and asks for BIO predictions on its target-language
/// translation.
///
/// `label_glosses` customizes the label inventory sentence; an empty
/// slice falls back to the PER/LOC/ORG default.
pub fn build_self_fusion_prompt(
    target_tokens: &[String],
    english_tagged: &[(String, String)],
    language_name: &str,
    label_glosses: &[(String, String)],
) -> String {
    format!(
        "Task Description: You are working as a named entity recognition expert and your task is \
         to label a given text with named entity labels. Your task is to identify and label any \
         named entities present in the text. Specifically, you will be given an English sentence \
         that has already been tagged, and you will predict on a translation of that sentence in \
         {language}.\n\
         \n\
         The named entity labels that you will be using are {glosses}. You may encounter \
         multi-word entities, so make sure to label each word of the entity with the appropriate \
         prefix (\"B\" for the first word of the entity, \"I\" for any non-initial word of the \
         entity). For words which are not part of any named entity, you should return \"O\".\n\
         Note: Your output format should be a list of tuples, where each tuple consists of a word \
         from the input text and its corresponding named entity label.\n\
         \n\
         English Output:\n\
         {english}\n\
         \n\
         {language} Sentence:\n\
         {target}",
        language = language_name,
        glosses = gloss_list(label_glosses),
        english = tuple_list(english_tagged),
        target = token_list(target_tokens),
    )
}

/// Builds the selection prompt that asks which of two candidate
/// annotation sets is correct for a sentence and its English
/// translation. Options are `(label, surface)` pairs rendered one per
/// line.
pub fn build_selection_prompt(
    language_name: &str,
    target_text: &str,
    english_translation: &str,
    option1: &[(String, String)],
    option2: &[(String, String)],
) -> String {
    let render = |options: &[(String, String)]| -> String {
        options
            .iter()
            .map(|(label, surface)| format!("{label}: {surface}\n"))
            .collect()
    };
    format!(
        "Your task is to choose the correct NER annotations from Option 1 and 2.\n\
         CoNLL NER annotation scheme: (PER: Person; LOC: Location; ORG: Organization)\n\
         Based on the sentence in {language} and its English translation, which one is correct?\n\
         Note: Your output is only \"Option 1\" or \"Option 2\".\n\
         \n\
         {language}: {target}\n\
         English Translation: {english}\n\
         ===NER tags (Option 1)===\n\
         {option1}===NER tags (Option 2)===\n\
         {option2}===Answer===",
        language = language_name,
        target = target_text,
        english = english_translation,
        option1 = render(option1),
        option2 = render(option2),
    )
}
