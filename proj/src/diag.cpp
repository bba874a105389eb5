#include "warp/diag.hpp"

namespace warp {

LineCol line_col_at(std::string_view source, std::size_t offset) {
  LineCol lc;
  for (std::size_t i = 0; i < offset && i < source.size(); ++i) {
    if (source[i] == '\n') {
      ++lc.line;
      lc.column = 1;
    } else {
      ++lc.column;
    }
  }
  return lc;
}

std::string format_diagnostic(std::string_view source, Span span, std::string_view message) {
  LineCol lc = line_col_at(source, span.begin);
  return std::to_string(lc.line) + ":" + std::to_string(lc.column) + ": error: " +
         std::string(message);
}

}  // namespace warp
