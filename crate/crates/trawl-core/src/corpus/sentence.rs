//! Rule-based sentence splitting.
//!
//! The splitter is a terminator table, not a model. ASCII terminators
//! (`.` `!` `?`) end a sentence only when followed by whitespace or
//! end-of-text, which keeps decimals like `3.14` intact. The full-width and
//! other-script terminators (`。` `！` `？` `؟` `।` `॥`) end a sentence
//! unconditionally: in the scripts that use them no space follows the mark,
//! so `你好。再见！` is two sentences. Abbreviation handling is not attempted.

/// Terminators that require a following whitespace character (or end of text).
const CONDITIONAL_TERMINATORS: [char; 3] = ['.', '!', '?'];

/// Terminators that end a sentence wherever they appear.
const UNCONDITIONAL_TERMINATORS: [char; 6] = ['。', '！', '？', '؟', '।', '॥'];

/// Split text into sentences. Every non-whitespace character of the input
/// lands in exactly one sentence; sentences are trimmed and never empty.
/// Text without any terminator comes back as a single sentence.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut iter = text.char_indices().peekable();

    while let Some((i, c)) = iter.next() {
        let boundary = if UNCONDITIONAL_TERMINATORS.contains(&c) {
            true
        } else if CONDITIONAL_TERMINATORS.contains(&c) {
            match iter.peek() {
                None => true,
                Some(&(_, next)) => next.is_whitespace(),
            }
        } else {
            false
        };
        if boundary {
            let end = i + c.len_utf8();
            push_trimmed(&mut sentences, &text[start..end]);
            start = end;
        }
    }
    push_trimmed(&mut sentences, &text[start..]);
    sentences
}

fn push_trimmed(out: &mut Vec<String>, raw: &str) {
    let trimmed = raw.trim();
    if !trimmed.is_empty() {
        out.push(trimmed.to_string());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminator_delimited() {
        assert_eq!(split_sentences("A. B. C."), ["A.", "B.", "C."]);
    }

    #[test]
    fn no_terminator_single_sentence() {
        assert_eq!(split_sentences("No terminator here"), ["No terminator here"]);
    }

    #[test]
    fn cjk_terminators_split_without_whitespace() {
        assert_eq!(split_sentences("你好。再见！"), ["你好。", "再见！"]);
    }

    #[test]
    fn decimal_point_does_not_split() {
        assert_eq!(
            split_sentences("Pi is 3.14 roughly. Yes."),
            ["Pi is 3.14 roughly.", "Yes."]
        );
    }

    #[test]
    fn devanagari_danda() {
        assert_eq!(split_sentences("पहला वाक्य। दूसरा वाक्य॥"), [
            "पहला वाक्य।",
            "दूसरा वाक्य॥"
        ]);
    }

    #[test]
    fn arabic_question_mark() {
        assert_eq!(split_sentences("كيف حالك؟ بخير"), ["كيف حالك؟", "بخير"]);
    }

    #[test]
    fn trailing_bang_run_is_one_sentence() {
        // '!' followed by '!' is not a boundary; the last one ends the text.
        assert_eq!(split_sentences("wow!!!"), ["wow!!!"]);
    }

    #[test]
    fn empty_and_whitespace_only() {
        assert!(split_sentences("").is_empty());
        assert!(split_sentences("   \n\t ").is_empty());
    }

    #[test]
    fn loses_no_non_whitespace_characters() {
        let text = "First. Second! Third? 你好。No end";
        let joined: String = split_sentences(text).join(" ");
        let squash = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
        assert_eq!(squash(&joined), squash(text));
    }
}
