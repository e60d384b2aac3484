#include "lexer.hpp"

#include <array>
#include <cctype>
#include <cstdlib>

#include "vdgslice/errors.hpp"

namespace vdgslice::detail {
namespace {

constexpr std::array<std::string_view, 24> kPunct3Plus = {
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&",
    "||",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "##", "::",
};

std::string where(const std::string& path, std::uint32_t line, std::uint32_t col) {
  return path + ":" + std::to_string(line) + ":" + std::to_string(col);
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, FileId file, const std::string& path) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::uint32_t line = 1;
  std::size_t line_start = 0;
  bool line_has_token = false;

  auto col = [&](std::size_t at) { return static_cast<std::uint32_t>(at - line_start + 1); };
  auto newline = [&](std::size_t at) {
    ++line;
    line_start = at + 1;
    line_has_token = false;
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      newline(i);
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      std::uint32_t start_line = line, start_col = col(i);
      i += 2;
      while (i + 1 < text.size() && !(text[i] == '*' && text[i + 1] == '/')) {
        if (text[i] == '\n') newline(i);
        ++i;
      }
      if (i + 1 >= text.size())
        throw ParseError(where(path, start_line, start_col) + ": unterminated comment");
      i += 2;
      continue;
    }
    if (c == '#' && !line_has_token) {
      throw PreprocessorDirectiveFound(where(path, line, col(i)) + ": input must be preprocessed");
    }

    Token tok;
    tok.pos = CodePosition{file, line, col(i)};
    line_has_token = true;
    std::size_t start = i;

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      tok.kind = TokKind::Ident;
      tok.text = std::string(text.substr(start, i - start));
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      bool is_float = false;
      if (c == '0' && i + 1 < text.size() && (text[i + 1] == 'x' || text[i + 1] == 'X')) {
        i += 2;
        while (i < text.size() && hex_digit(text[i]) >= 0) ++i;
      } else {
        while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
          if (text[i] == '.') is_float = true;
          ++i;
        }
        if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
          is_float = true;
          ++i;
          if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
          while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        }
      }
      std::string digits(text.substr(start, i - start));
      while (i < text.size() && std::string_view("uUlLfF").find(text[i]) != std::string_view::npos) {
        if (text[i] == 'f' || text[i] == 'F') is_float = true;
        ++i;
      }
      tok.text = std::string(text.substr(start, i - start));
      if (is_float) {
        tok.kind = TokKind::Float;
        tok.float_value = std::strtod(digits.c_str(), nullptr);
      } else {
        tok.kind = TokKind::Int;
        tok.int_value = static_cast<std::int64_t>(std::strtoull(digits.c_str(), nullptr, 0));
      }
    } else if (c == '\'') {
      ++i;
      std::int64_t value = 0;
      if (i < text.size() && text[i] == '\\') {
        ++i;
        char e = i < text.size() ? text[i] : '\0';
        ++i;
        switch (e) {
          case 'n': value = '\n'; break;
          case 't': value = '\t'; break;
          case 'r': value = '\r'; break;
          case '0': value = 0; break;
          case '\\': value = '\\'; break;
          case '\'': value = '\''; break;
          case '"': value = '"'; break;
          case 'x': {
            while (i < text.size() && hex_digit(text[i]) >= 0) value = value * 16 + hex_digit(text[i++]);
            break;
          }
          default: value = static_cast<unsigned char>(e);
        }
      } else if (i < text.size()) {
        value = static_cast<unsigned char>(text[i++]);
      }
      if (i >= text.size() || text[i] != '\'')
        throw ParseError(where(path, tok.pos.line, tok.pos.column) + ": bad character literal");
      ++i;
      tok.kind = TokKind::Char;
      tok.int_value = value;
      tok.text = std::string(text.substr(start, i - start));
    } else if (c == '"') {
      ++i;
      while (i < text.size() && text[i] != '"') {
        if (text[i] == '\\') ++i;
        if (i < text.size() && text[i] == '\n')
          throw ParseError(where(path, tok.pos.line, tok.pos.column) + ": unterminated string");
        ++i;
      }
      if (i >= text.size())
        throw ParseError(where(path, tok.pos.line, tok.pos.column) + ": unterminated string");
      ++i;
      tok.kind = TokKind::String;
      tok.text = std::string(text.substr(start, i - start));
    } else {
      tok.kind = TokKind::Punct;
      std::string_view rest = text.substr(i);
      std::size_t len = 1;
      for (auto p : kPunct3Plus) {
        if (rest.substr(0, p.size()) == p && p.size() > len) len = p.size();
      }
      if (std::string_view("{}()[];,:?~!%^&*-+=|<>/.").find(c) == std::string_view::npos)
        throw ParseError(where(path, line, col(i)) + ": unexpected character '" + std::string(1, c) + "'");
      tok.text = std::string(rest.substr(0, len));
      i += len;
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = TokKind::End;
  end.pos = CodePosition{file, line, col(i)};
  out.push_back(std::move(end));
  return out;
}

}  // namespace vdgslice::detail
