#include "copycat/text.hpp"

#include <cctype>

namespace copycat {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_punct(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u) != 0;
}

bool is_alpha(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::isalpha(u) != 0;
}

char lower(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 ? static_cast<char>(std::tolower(u)) : c;
}

bool is_clitic(std::string_view tok) {
  if (tok.size() < 2 || tok.front() != '\'') return false;
  for (std::size_t i = 1; i < tok.size(); ++i)
    if (!is_alpha(tok[i])) return false;
  return true;
}

bool attaches_left(std::string_view tok) {
  if (is_clitic(tok)) return true;
  if (tok.size() != 1) return false;
  switch (tok[0]) {
    case '(':
    case '[':
    case '{':
      return false;
    default:
      return is_punct(tok[0]);
  }
}

bool attaches_right(std::string_view tok) {
  return tok == "(" || tok == "[" || tok == "{";
}

void split_word(std::string_view word, std::vector<std::string>& out) {
  std::size_t begin = 0;
  std::size_t end = word.size();
  while (begin < end && is_punct(word[begin])) out.emplace_back(1, word[begin++]);
  std::vector<std::string> trailing;
  while (end > begin && is_punct(word[end - 1])) trailing.emplace_back(1, word[--end]);
  if (begin < end) {
    std::string_view core = word.substr(begin, end - begin);
    const auto apos = core.rfind('\'');
    if (apos != std::string_view::npos && apos > 0 && is_clitic(core.substr(apos))) {
      out.emplace_back(core.substr(0, apos));
      out.emplace_back(core.substr(apos));
    } else {
      out.emplace_back(core);
    }
  }
  out.insert(out.end(), trailing.rbegin(), trailing.rend());
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) split_word(word, tokens);
    word.clear();
  };
  for (char c : text) {
    if (is_space(c)) {
      flush();
    } else {
      word.push_back(lower(c));
    }
  }
  flush();
  return tokens;
}

std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  bool glue_next = true;
  for (const auto& tok : tokens) {
    if (!glue_next && !attaches_left(tok)) out.push_back(' ');
    out += tok;
    glue_next = attaches_right(tok);
  }
  return out;
}

std::string normalize(std::string_view text) { return detokenize(tokenize(text)); }

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  auto emit = [&](std::size_t from, std::size_t to) {
    while (from < to && is_space(text[from])) ++from;
    while (to > from && is_space(text[to - 1])) --to;
    if (to > from) sentences.emplace_back(text.substr(from, to - from));
  };
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '.' || c == '!' || c == '?') {
      std::size_t j = i;
      while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
      if (j == text.size() || is_space(text[j])) {
        emit(start, j);
        start = j;
      }
      i = j;
    } else {
      ++i;
    }
  }
  emit(start, text.size());
  return sentences;
}

}  // namespace copycat
