#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vdgslice/source_model.hpp"

namespace vdgslice::detail {

enum class TokKind { Ident, Int, Float, Char, String, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  std::int64_t int_value = 0;
  double float_value = 0.0;
  CodePosition pos;
};

/// Tokenizes one file. Comments and whitespace are dropped.
std::vector<Token> tokenize(std::string_view text, FileId file, const std::string& path);

}  // namespace vdgslice::detail
