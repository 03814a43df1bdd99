#pragma once
// Reading terms, alphabets, and process files.
//
// Term grammar (whitespace-insensitive, '#' starts a to-end-of-line comment):
//
//   expr  ::= atom ('+' atom)*
//   atom  ::= '0' | '(' expr ')' | chain
//   chain ::= WORD ['.' atom]
//
// A WORD is decomposed into a sequence of declared action names by greedy
// longest match, so "ab0" reads as a.b.0 when a and b are declared.  A chain
// may end in a literal digit 0 ("ab0") or leave the terminal 0 implicit
// ("ab"); an explicit '.' introduces the continuation ("a.(b.0 + c.0)").
//
// Process files start with one alphabet block
//
//   alphabet { r: a, b; l: c; bi: d; fresh: f1, f2 }
//
// (class keys r / l / bi / fresh, each at most once) followed by one
// definition per line, "NAME = expr".  A definition body may mention
// previously defined names; a newline ends the body except inside
// parentheses or right after '+'.  Definition names that could themselves be
// read as action chains are rejected, so references are never ambiguous.
// Fresh actions are reserved for machine-built distinguishing contexts and
// may not appear in any parsed term.

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ccsim/action.hpp"
#include "ccsim/term.hpp"

namespace ccsim {

/// Syntax or validity error with a 1-based source position.  what() already
/// includes the position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses a single term over the given alphabet (no definitions allowed).
Term parse_term(std::string_view text, const Alphabet& alphabet);

/// A parsed process file: the alphabet plus named processes in file order.
struct ProcessFile {
  Alphabet alphabet;
  std::vector<std::pair<std::string, Term>> definitions;

  bool has(std::string_view name) const;
  /// Throws std::out_of_range for unknown names.
  Term process(std::string_view name) const;
};

ProcessFile parse_process_file(std::string_view text);

/// Parses a bare alphabet description as passed on the command line, e.g.
/// "r: a, b; l: c; fresh: f" (the body of an alphabet block, no braces).
Alphabet parse_alphabet_spec(std::string_view text);

}  // namespace ccsim
