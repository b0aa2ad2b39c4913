#pragma once

// SMS triplet text format: header "m n M", one "i j v" line per entry
// (1-based), terminated by "0 0 0".

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lsnf/operators.hpp"

namespace lsnf {

namespace detail {

struct SmsToken {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline std::vector<SmsToken> sms_tokens(std::string_view line) {
  std::vector<SmsToken> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i == line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

[[noreturn]] inline void sms_error(std::size_t line, std::size_t column, const std::string& what) {
  fail(ErrorCode::Parse, "SMS line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

inline std::size_t sms_index(const SmsToken& t, std::size_t line) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc() || ptr != t.text.data() + t.text.size())
    sms_error(line, t.column, "expected a nonnegative integer, got '" + std::string(t.text) + "'");
  return v;
}

}  // namespace detail

template <class R>
TripletMatrix<R> read_sms(std::istream& in, const R& ring) {
  std::string text;
  std::size_t lineno = 0;
  auto next = [&](std::vector<detail::SmsToken>& toks) {
    while (std::getline(in, text)) {
      ++lineno;
      toks = detail::sms_tokens(text);
      if (!toks.empty()) return true;
    }
    return false;
  };
  std::vector<detail::SmsToken> toks;
  if (!next(toks)) detail::sms_error(lineno + 1, 1, "missing header 'm n M'");
  if (toks.size() != 3) detail::sms_error(lineno, toks.front().column, "header must have three fields");
  const std::size_t rows = detail::sms_index(toks[0], lineno);
  const std::size_t cols = detail::sms_index(toks[1], lineno);
  if (toks[2].text != "M") detail::sms_error(lineno, toks[2].column, "header type must be 'M'");
  TripletMatrix<R> m(ring, rows, cols);
  for (;;) {
    if (!next(toks)) detail::sms_error(lineno + 1, 1, "missing terminator '0 0 0'");
    if (toks.size() != 3) detail::sms_error(lineno, toks.front().column, "entry must have three fields");
    const std::size_t i = detail::sms_index(toks[0], lineno);
    const std::size_t j = detail::sms_index(toks[1], lineno);
    if (i == 0 && j == 0) {
      if (toks[2].text != "0") detail::sms_error(lineno, toks[2].column, "terminator must be '0 0 0'");
      break;
    }
    if (i < 1 || i > rows) detail::sms_error(lineno, toks[0].column, "row index out of range");
    if (j < 1 || j > cols) detail::sms_error(lineno, toks[1].column, "column index out of range");
    try {
      m.add(i, j, ring.parse_element(toks[2].text));
    } catch (const Error& e) {
      detail::sms_error(lineno, toks[2].column, e.what());
    }
  }
  if (next(toks)) detail::sms_error(lineno, toks.front().column, "content after terminator");
  m.normalize();
  return m;
}

template <class R>
TripletMatrix<R> parse_sms(std::string_view text, const R& ring) {
  std::istringstream in{std::string(text)};
  return read_sms(in, ring);
}

template <class R>
void write_sms(std::ostream& out, const TripletMatrix<R>& m) {
  out << m.rows() << ' ' << m.cols() << " M\n";
  for (const auto& t : m.entries()) out << t.row << ' ' << t.col << ' ' << m.ring().format_element(t.value) << '\n';
  out << "0 0 0\n";
}

}  // namespace lsnf
