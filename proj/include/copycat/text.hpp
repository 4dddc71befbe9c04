#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace copycat {

// Rule-based reversible tokenizer. ASCII letters are lowercased, leading
// and trailing punctuation of each whitespace-separated word becomes one
// token per character, and a trailing clitic ("'s", "'t", ...) is split
// off. Word-internal punctuation ("5-star", "e.g") stays attached.
std::vector<std::string> tokenize(std::string_view text);

// Inverse of tokenize on normalized text: closing punctuation and clitics
// attach to the previous token, opening brackets to the next one.
std::string detokenize(const std::vector<std::string>& tokens);

// Canonical surface form: detokenize(tokenize(text)).
std::string normalize(std::string_view text);

// Splits on runs of . ! ? followed by whitespace or end of text. Pieces are
// trimmed; empty pieces are dropped.
std::vector<std::string> split_sentences(std::string_view text);

}  // namespace copycat
