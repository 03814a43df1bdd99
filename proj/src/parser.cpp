#include "ccsim/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace ccsim {

ParseError::ParseError(const std::string& message, int line, int column)
    : std::runtime_error(message + " (line " + std::to_string(line) +
                         ", column " + std::to_string(column) + ")"),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  enum Kind {
    word,
    zero,
    lparen,
    rparen,
    plus,
    dot,
    equals,
    lbrace,
    rbrace,
    colon,
    comma,
    semicolon,
    newline,
    end,
  };
  Kind kind;
  std::string_view text;
  int line;
  int column;
};

const char* describe(Token::Kind k) {
  switch (k) {
    case Token::word: return "name";
    case Token::zero: return "'0'";
    case Token::lparen: return "'('";
    case Token::rparen: return "')'";
    case Token::plus: return "'+'";
    case Token::dot: return "'.'";
    case Token::equals: return "'='";
    case Token::lbrace: return "'{'";
    case Token::rbrace: return "'}'";
    case Token::colon: return "':'";
    case Token::comma: return "','";
    case Token::semicolon: return "';'";
    case Token::newline: return "end of line";
    case Token::end: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  std::size_t pos = 0;
  int line = 1, col = 1;
  auto is_word_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
  auto is_word_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  while (pos < text.size()) {
    const char c = text[pos];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++pos, ++col;
      continue;
    }
    if (c == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos, ++col;
      continue;
    }
    if (c == '\n') {
      out.push_back({Token::newline, text.substr(pos, 1), line, col});
      ++pos, ++line;
      col = 1;
      continue;
    }
    const int tok_line = line, tok_col = col;
    if (is_word_start(c)) {
      std::size_t start = pos;
      while (pos < text.size() && is_word_char(text[pos])) ++pos, ++col;
      out.push_back({Token::word, text.substr(start, pos - start), tok_line, tok_col});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos, ++col;
      std::string_view digits = text.substr(start, pos - start);
      if (digits != "0")
        throw ParseError("unexpected number '" + std::string(digits) + "'", tok_line, tok_col);
      out.push_back({Token::zero, digits, tok_line, tok_col});
      continue;
    }
    Token::Kind kind;
    switch (c) {
      case '(': kind = Token::lparen; break;
      case ')': kind = Token::rparen; break;
      case '+': kind = Token::plus; break;
      case '.': kind = Token::dot; break;
      case '=': kind = Token::equals; break;
      case '{': kind = Token::lbrace; break;
      case '}': kind = Token::rbrace; break;
      case ':': kind = Token::colon; break;
      case ',': kind = Token::comma; break;
      case ';': kind = Token::semicolon; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", tok_line, tok_col);
    }
    out.push_back({kind, text.substr(pos, 1), tok_line, tok_col});
    ++pos, ++col;
  }
  out.push_back({Token::end, {}, line, col});
  return out;
}

// ── Token stream with paren-aware newline handling ─────────────────────────

class Cursor {
 public:
  explicit Cursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  // Newline tokens are invisible inside parentheses/braces; at depth 0 they
  // act as definition terminators and stay visible.
  const Token& peek() {
    skip_invisible();
    return tokens_[index_];
  }

  Token get() {
    skip_invisible();
    Token t = tokens_[index_];
    if (t.kind != Token::end) ++index_;
    if (t.kind == Token::lparen || t.kind == Token::lbrace) ++depth_;
    if (t.kind == Token::rparen || t.kind == Token::rbrace) depth_ = std::max(0, depth_ - 1);
    return t;
  }

  Token expect(Token::Kind kind, const std::string& where) {
    const Token& t = peek();
    if (t.kind != kind)
      throw ParseError("expected " + std::string(describe(kind)) + " " + where +
                           ", got " + describe(t.kind),
                       t.line, t.column);
    return get();
  }

  void skip_newlines() {
    while (tokens_[index_].kind == Token::newline) ++index_;
  }

 private:
  void skip_invisible() {
    if (depth_ > 0) skip_newlines();
  }

  std::vector<Token> tokens_;
  std::size_t index_ = 0;
  int depth_ = 0;
};

// ── Terms ───────────────────────────────────────────────────────────────────

class TermParser {
 public:
  TermParser(Cursor& cur, const Alphabet& alphabet,
             const std::vector<std::pair<std::string, Term>>* definitions)
      : cur_(cur), alphabet_(alphabet), definitions_(definitions) {}

  Term parse_expr() {
    Term t = parse_atom();
    while (cur_.peek().kind == Token::plus) {
      cur_.get();
      cur_.skip_newlines();  // allow '+' at end of line to continue
      t = add(t, parse_atom());
    }
    return t;
  }

 private:
  Term parse_atom() {
    const Token& t = cur_.peek();
    switch (t.kind) {
      case Token::zero:
        cur_.get();
        return Term::nil();
      case Token::lparen: {
        cur_.get();
        Term inner = parse_expr();
        cur_.expect(Token::rparen, "to close '('");
        return inner;
      }
      case Token::word:
        return parse_chain(cur_.get());
      default:
        throw ParseError(std::string("expected a term, got ") + describe(t.kind),
                         t.line, t.column);
    }
  }

  // A WORD is either a reference to an earlier definition (whole-word match)
  // or a greedy longest-match chain of declared action names, optionally
  // closed by a trailing literal 0.
  Term parse_chain(const Token& tok) {
    if (definitions_ != nullptr) {
      for (const auto& [name, body] : *definitions_)
        if (name == tok.text) return body;
    }
    std::vector<ActionId> chain;
    bool closed = false;
    const std::string_view w = tok.text;
    std::size_t i = 0;
    while (i < w.size()) {
      if (w[i] == '0' && i + 1 == w.size()) {
        closed = true;
        ++i;
        break;
      }
      std::optional<ActionId> best;
      std::size_t best_len = 0;
      for (ActionId a : alphabet_.covariant()) consider(w, i, a, best, best_len);
      for (ActionId a : alphabet_.contravariant()) consider(w, i, a, best, best_len);
      for (ActionId a : alphabet_.bivariant()) consider(w, i, a, best, best_len);
      for (ActionId a : alphabet_.fresh_pool()) consider(w, i, a, best, best_len);
      if (!best)
        throw ParseError("cannot read '" + std::string(w) +
                             "' as a chain of declared actions (stuck at '" +
                             std::string(w.substr(i)) + "')",
                         tok.line, tok.column + static_cast<int>(i));
      if (alphabet_.is_fresh(*best))
        throw ParseError("action '" + ActionRegistry::instance().name(*best) +
                             "' is reserved for generated contexts",
                         tok.line, tok.column + static_cast<int>(i));
      chain.push_back(*best);
      i += best_len;
    }
    Term target = Term::nil();
    if (!closed && cur_.peek().kind == Token::dot) {
      cur_.get();
      target = parse_atom();
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) target = prefix(*it, target);
    return target;
  }

  static void consider(std::string_view w, std::size_t i, ActionId a,
                       std::optional<ActionId>& best, std::size_t& best_len) {
    const std::string& name = ActionRegistry::instance().name(a);
    if (name.size() > best_len && w.substr(i, name.size()) == name) {
      best = a;
      best_len = name.size();
    }
  }

  Cursor& cur_;
  const Alphabet& alphabet_;
  const std::vector<std::pair<std::string, Term>>* definitions_;
};

// ── Alphabet blocks ─────────────────────────────────────────────────────────

// Parses "key: name, name; key: ..." until `stop` (rbrace or end).
Alphabet parse_classes(Cursor& cur, Token::Kind stop) {
  std::vector<std::string> classes[4];  // r, l, bi, fresh
  bool seen[4] = {};
  auto key_index = [](std::string_view key) -> int {
    if (key == "r") return 0;
    if (key == "l") return 1;
    if (key == "bi") return 2;
    if (key == "fresh") return 3;
    return -1;
  };
  cur.skip_newlines();
  while (cur.peek().kind != stop) {
    cur.skip_newlines();
    Token key = cur.expect(Token::word, "as a class key (r, l, bi, or fresh)");
    const int idx = key_index(key.text);
    if (idx < 0)
      throw ParseError("unknown alphabet class '" + std::string(key.text) +
                           "' (expected r, l, bi, or fresh)",
                       key.line, key.column);
    if (seen[idx])
      throw ParseError("class '" + std::string(key.text) + "' listed twice",
                       key.line, key.column);
    seen[idx] = true;
    cur.expect(Token::colon, "after the class key");
    for (;;) {
      Token name = cur.expect(Token::word, "as an action name");
      classes[idx].emplace_back(name.text);
      if (cur.peek().kind != Token::comma) break;
      cur.get();
    }
    if (cur.peek().kind == Token::semicolon) {
      cur.get();
      cur.skip_newlines();
      continue;
    }
    break;
  }
  cur.skip_newlines();
  Token close = cur.expect(stop, "to end the alphabet description");
  try {
    return Alphabet::make(classes[0], classes[1], classes[2], classes[3]);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), close.line, close.column);
  }
}

// Returns true when `name` would also parse as an action chain over
// `alphabet` — such definition names are rejected as ambiguous.
bool reads_as_action_chain(std::string_view name, const Alphabet& alphabet) {
  ActionRegistry& reg = ActionRegistry::instance();
  std::vector<ActionId> all = alphabet.actions();
  const std::vector<ActionId>& fr = alphabet.fresh_pool();
  all.insert(all.end(), fr.begin(), fr.end());
  std::size_t i = 0;
  while (i < name.size()) {
    if (name[i] == '0' && i + 1 == name.size()) return true;
    std::size_t best = 0;
    for (ActionId a : all) {
      const std::string& an = reg.name(a);
      if (an.size() > best && name.substr(i, an.size()) == an) best = an.size();
    }
    if (best == 0) return false;
    i += best;
  }
  return true;
}

}  // namespace

Term parse_term(std::string_view text, const Alphabet& alphabet) {
  Cursor cur(lex(text));
  cur.skip_newlines();
  Term t = TermParser(cur, alphabet, nullptr).parse_expr();
  cur.skip_newlines();
  const Token& rest = cur.peek();
  if (rest.kind != Token::end)
    throw ParseError(std::string("trailing input after the term: ") + describe(rest.kind),
                     rest.line, rest.column);
  return t;
}

bool ProcessFile::has(std::string_view name) const {
  for (const auto& [n, t] : definitions)
    if (n == name) return true;
  return false;
}

Term ProcessFile::process(std::string_view name) const {
  for (const auto& [n, t] : definitions)
    if (n == name) return t;
  throw std::out_of_range("no process named '" + std::string(name) + "' in the file");
}

ProcessFile parse_process_file(std::string_view text) {
  Cursor cur(lex(text));
  cur.skip_newlines();
  Token intro = cur.expect(Token::word, "to start the alphabet block");
  if (intro.text != "alphabet")
    throw ParseError("a process file must start with an alphabet block",
                     intro.line, intro.column);
  cur.expect(Token::lbrace, "after 'alphabet'");
  ProcessFile file;
  file.alphabet = parse_classes(cur, Token::rbrace);

  for (;;) {
    cur.skip_newlines();
    if (cur.peek().kind == Token::end) break;
    Token name = cur.expect(Token::word, "to start a definition");
    if (name.text == "alphabet")
      throw ParseError("only one alphabet block is allowed", name.line, name.column);
    if (file.has(name.text))
      throw ParseError("process '" + std::string(name.text) + "' defined twice",
                       name.line, name.column);
    if (reads_as_action_chain(name.text, file.alphabet))
      throw ParseError("process name '" + std::string(name.text) +
                           "' would be ambiguous with an action chain",
                       name.line, name.column);
    cur.expect(Token::equals, "after the process name");
    Term body = TermParser(cur, file.alphabet, &file.definitions).parse_expr();
    const Token& after = cur.peek();
    if (after.kind != Token::newline && after.kind != Token::end)
      throw ParseError(std::string("unexpected ") + describe(after.kind) +
                           " after the definition body",
                       after.line, after.column);
    file.definitions.emplace_back(std::string(name.text), body);
  }
  return file;
}

Alphabet parse_alphabet_spec(std::string_view text) {
  Cursor cur(lex(text));
  cur.skip_newlines();
  if (cur.peek().kind == Token::end) {
    const Token& t = cur.peek();
    throw ParseError("empty alphabet description", t.line, t.column);
  }
  Alphabet al = parse_classes(cur, Token::end);
  return al;
}

}  // namespace ccsim
