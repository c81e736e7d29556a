/// Lowercases `raw_text` and splits it into word tokens.
///
/// Whitespace separates candidate tokens. A candidate containing any numeric
/// character is discarded whole. Every other non-letter character (punctuation,
/// dashes, apostrophes, typographic marks) acts as a separator, so clitics such
/// as `l'italia` become `l`, `italia`.
pub fn normalize(raw_text: &str) -> Vec<String> {
    let lowered = raw_text.to_lowercase();
    let mut tokens = Vec::new();
    for chunk in lowered.split_whitespace() {
        if chunk.chars().any(char::is_numeric) {
            continue;
        }
        tokens.extend(
            chunk
                .split(|c: char| !c.is_alphabetic())
                .filter(|piece| !piece.is_empty())
                .map(str::to_owned),
        );
    }
    tokens
}
