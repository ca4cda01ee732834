#include "mlpoly/lp_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace mlpoly {
namespace {

constexpr int kTermsPerLine = 8;

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool is_name_char(char ch) {
  if (std::isalnum(static_cast<unsigned char>(ch))) return true;
  switch (ch) {
    case '_': case '.': case '!': case '"': case '#': case '$': case '%':
    case '&': case '(': case ')': case '/': case ',': case ';': case '?':
    case '@': case '`': case '\'': case '{': case '}': case '|': case '~':
      return true;
    default:
      return false;
  }
}

bool valid_name(const std::string& name) {
  if (name.empty() || name.size() > 255) return false;
  const char first = name[0];
  if (std::isdigit(static_cast<unsigned char>(first)) || first == '.') return false;
  if (first == 'e' || first == 'E') {
    // "e5" would read back as part of a number in some readers.
    if (name.size() > 1 && std::isdigit(static_cast<unsigned char>(name[1]))) return false;
  }
  for (char ch : name) {
    if (!is_name_char(ch)) return false;
  }
  return true;
}

std::vector<std::string> column_names(const LinearProgram& lp) {
  std::vector<std::string> names(lp.num_vars);
  std::unordered_map<std::string, int> seen;
  for (int j = 0; j < lp.num_vars; ++j) {
    std::string name = j < static_cast<int>(lp.var_names.size()) ? lp.var_names[j] : "";
    if (!valid_name(name) || seen.contains(name)) name = "x" + std::to_string(j);
    seen.emplace(name, j);
    names[j] = name;
  }
  return names;
}

void write_terms(std::ostream& os, const std::vector<Term>& terms,
                 const std::vector<std::string>& names) {
  int on_line = 0;
  for (const Term& t : terms) {
    if (on_line == kTermsPerLine) {
      os << "\n   ";
      on_line = 0;
    }
    os << (t.coef < 0 ? " - " : " + ") << format_number(std::abs(t.coef)) << ' '
       << names[t.var];
    ++on_line;
  }
}

std::string bound_text(double v) {
  if (v == kInfinity) return "+inf";
  if (v == -kInfinity) return "-inf";
  return format_number(v);
}

// Tokens of the LP text. Newlines are kept because bound declarations end at
// a line break.
struct Token {
  enum Kind { kName, kNumber, kOp, kNewline } kind;
  std::string text;
  double number = 0.0;
};

std::vector<Token> tokenize(std::istream& is) {
  const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (ch == '\\') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (ch == '\n') {
      out.push_back({Token::kNewline, "\n"});
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t j = i;
      while (j < text.size()) {
        const char c = text[j];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
          ++j;
        } else if ((c == 'e' || c == 'E') && j + 1 < text.size()) {
          ++j;
          if (text[j] == '+' || text[j] == '-') ++j;
        } else {
          break;
        }
      }
      Token t{Token::kNumber, text.substr(i, j - i)};
      const auto res = std::from_chars(text.data() + i, text.data() + j, t.number);
      if (res.ec != std::errc() || res.ptr != text.data() + j) {
        throw std::runtime_error("bad number '" + t.text + "'");
      }
      out.push_back(std::move(t));
      i = j;
      continue;
    }
    if (ch == '<' || ch == '>' || ch == '=') {
      std::size_t j = i + 1;
      if (j < text.size() && (text[j] == '=' || text[j] == '<' || text[j] == '>')) ++j;
      std::string op = text.substr(i, j - i);
      if (op == "<" || op == "=<") op = "<=";
      if (op == ">" || op == "=>") op = ">=";
      if (op != "<=" && op != ">=" && op != "=") {
        throw std::runtime_error("bad relation '" + op + "'");
      }
      out.push_back({Token::kOp, op});
      i = j;
      continue;
    }
    if (ch == '+' || ch == '-' || ch == ':') {
      out.push_back({Token::kOp, std::string(1, ch)});
      ++i;
      continue;
    }
    if (is_name_char(ch)) {
      std::size_t j = i;
      while (j < text.size() && is_name_char(text[j])) ++j;
      out.push_back({Token::kName, text.substr(i, j - i)});
      i = j;
      continue;
    }
    throw std::runtime_error(std::string("unexpected character '") + ch + "'");
  }
  return out;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

enum class Section { kNone, kObjective, kConstraints, kBounds, kBinaries, kEnd };

class LpReader {
 public:
  explicit LpReader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  LinearProgram read() {
    Section section = Section::kNone;
    while (pos_ < tokens_.size() && section != Section::kEnd) {
      if (tokens_[pos_].kind == Token::kNewline) {
        ++pos_;
        continue;
      }
      if (std::optional<Section> next = section_keyword()) {
        section = *next;
        continue;
      }
      switch (section) {
        case Section::kObjective:
          read_objective();
          break;
        case Section::kConstraints:
          read_row();
          break;
        case Section::kBounds:
          read_bound();
          break;
        case Section::kBinaries:
          read_binary();
          break;
        default:
          throw std::runtime_error("content outside any section: '" + tokens_[pos_].text + "'");
      }
    }
    if (!have_sense_) throw std::runtime_error("missing objective section");
    if (section != Section::kEnd) throw std::runtime_error("missing End");
    if (minimize_) {
      for (Term& t : lp_.objective) t.coef = -t.coef;
    }
    std::erase_if(lp_.objective, [](const Term& t) { return t.coef == 0.0; });
    lp_.node_var_count = lp_.num_vars;
    return std::move(lp_);
  }

 private:
  // Consumes a section keyword at the current position, if any.
  std::optional<Section> section_keyword() {
    const Token& t = tokens_[pos_];
    if (t.kind != Token::kName) return std::nullopt;
    if (pos_ + 1 < tokens_.size() && tokens_[pos_ + 1].text == ":") return std::nullopt;
    const std::string w = lower(t.text);
    if (w == "maximize" || w == "maximise" || w == "maximum" || w == "max" ||
        w == "minimize" || w == "minimise" || w == "minimum" || w == "min") {
      if (have_sense_) throw std::runtime_error("second objective section");
      have_sense_ = true;
      minimize_ = w.starts_with("min");
      ++pos_;
      return Section::kObjective;
    }
    if (w == "subject" && pos_ + 1 < tokens_.size() && lower(tokens_[pos_ + 1].text) == "to") {
      pos_ += 2;
      return Section::kConstraints;
    }
    if (w == "st" || w == "s.t." || w == "such") {
      pos_ += (w == "such" && pos_ + 1 < tokens_.size()) ? 2 : 1;
      return Section::kConstraints;
    }
    if (w == "bounds" || w == "bound") {
      ++pos_;
      return Section::kBounds;
    }
    if (w == "binaries" || w == "binary" || w == "bin" || w == "generals" ||
        w == "general" || w == "gen") {
      binary_section_ = w.starts_with("b");
      ++pos_;
      return Section::kBinaries;
    }
    if (w == "end") {
      ++pos_;
      return Section::kEnd;
    }
    return std::nullopt;
  }

  int variable(const std::string& name) {
    auto [it, inserted] = index_.emplace(name, lp_.num_vars);
    if (inserted) {
      ++lp_.num_vars;
      lp_.var_names.push_back(name);
      lp_.lower.push_back(0.0);
      lp_.upper.push_back(kInfinity);
    }
    return it->second;
  }

  void skip_newlines() {
    while (pos_ < tokens_.size() && tokens_[pos_].kind == Token::kNewline) ++pos_;
  }

  bool at_name_label() const {
    return pos_ + 1 < tokens_.size() && tokens_[pos_].kind == Token::kName &&
           tokens_[pos_ + 1].text == ":";
  }

  // Linear expression up to a relation, a section keyword or the end.
  std::vector<Term> read_expression() {
    std::vector<Term> terms;
    for (;;) {
      skip_newlines();
      if (pos_ >= tokens_.size()) break;
      const Token& t = tokens_[pos_];
      if (t.kind == Token::kOp && t.text != "+" && t.text != "-") break;
      if (t.kind == Token::kName && (at_name_label() || is_section_start())) break;
      double sign = 1.0;
      while (pos_ < tokens_.size() && tokens_[pos_].kind == Token::kOp &&
             (tokens_[pos_].text == "+" || tokens_[pos_].text == "-")) {
        if (tokens_[pos_].text == "-") sign = -sign;
        ++pos_;
        skip_newlines();
      }
      if (pos_ >= tokens_.size()) throw std::runtime_error("dangling sign");
      double coef = 1.0;
      if (tokens_[pos_].kind == Token::kNumber) {
        coef = tokens_[pos_].number;
        ++pos_;
        skip_newlines();
      }
      if (pos_ >= tokens_.size() || tokens_[pos_].kind != Token::kName) {
        throw std::runtime_error("expected a variable name");
      }
      terms.push_back({variable(tokens_[pos_].text), sign * coef});
      ++pos_;
    }
    return terms;
  }

  bool is_section_start() const {
    const std::string w = lower(tokens_[pos_].text);
    return w == "subject" || w == "st" || w == "s.t." || w == "bounds" || w == "bound" ||
           w == "binaries" || w == "binary" || w == "bin" || w == "generals" ||
           w == "general" || w == "gen" || w == "end" || w == "such";
  }

  void read_objective() {
    if (at_name_label()) pos_ += 2;
    lp_.objective = read_expression();
  }

  double read_signed_number() {
    skip_newlines();
    double sign = 1.0;
    while (pos_ < tokens_.size() && tokens_[pos_].kind == Token::kOp &&
           (tokens_[pos_].text == "+" || tokens_[pos_].text == "-")) {
      if (tokens_[pos_].text == "-") sign = -sign;
      ++pos_;
    }
    if (pos_ >= tokens_.size()) throw std::runtime_error("expected a number");
    const Token& t = tokens_[pos_++];
    if (t.kind == Token::kNumber) return sign * t.number;
    const std::string w = lower(t.text);
    if (t.kind == Token::kName && (w == "inf" || w == "infinity")) return sign * kInfinity;
    throw std::runtime_error("expected a number, got '" + t.text + "'");
  }

  void read_row() {
    Row row;
    if (at_name_label()) {
      row.name = tokens_[pos_].text;
      pos_ += 2;
    }
    row.terms = read_expression();
    if (pos_ >= tokens_.size() || tokens_[pos_].kind != Token::kOp) {
      throw std::runtime_error("constraint without relation");
    }
    const std::string op = tokens_[pos_++].text;
    row.rel = op == "<=" ? Relation::kLessEqual
              : op == ">=" ? Relation::kGreaterEqual
                           : Relation::kEqual;
    row.rhs = read_signed_number();
    lp_.rows.push_back(std::move(row));
  }

  // One bound declaration per line.
  void read_bound() {
    std::vector<Token> line;
    while (pos_ < tokens_.size() && tokens_[pos_].kind != Token::kNewline) {
      line.push_back(tokens_[pos_++]);
    }
    auto number_at = [&](std::size_t& k) {
      double sign = 1.0;
      while (k < line.size() && (line[k].text == "+" || line[k].text == "-")) {
        if (line[k].text == "-") sign = -sign;
        ++k;
      }
      if (k >= line.size()) throw std::runtime_error("truncated bound");
      const Token& t = line[k++];
      if (t.kind == Token::kNumber) return sign * t.number;
      const std::string w = lower(t.text);
      if (w == "inf" || w == "infinity") return sign * kInfinity;
      throw std::runtime_error("bad bound value '" + t.text + "'");
    };
    auto is_var = [&](std::size_t k) {
      if (k >= line.size() || line[k].kind != Token::kName) return false;
      const std::string w = lower(line[k].text);
      return w != "inf" && w != "infinity";
    };
    std::size_t k = 0;
    if (is_var(0)) {
      const int j = variable(line[0].text);
      k = 1;
      if (k < line.size() && lower(line[k].text) == "free") {
        lp_.lower[j] = -kInfinity;
        lp_.upper[j] = kInfinity;
        return;
      }
      if (k >= line.size()) throw std::runtime_error("incomplete bound");
      const std::string op = line[k++].text;
      const double v = number_at(k);
      if (op == "<=") {
        lp_.upper[j] = v;
      } else if (op == ">=") {
        lp_.lower[j] = v;
      } else if (op == "=") {
        lp_.lower[j] = lp_.upper[j] = v;
      } else {
        throw std::runtime_error("bad bound relation");
      }
    } else {
      const double lo = number_at(k);
      if (k >= line.size()) throw std::runtime_error("incomplete bound");
      const std::string op1 = line[k++].text;
      if (!is_var(k)) throw std::runtime_error("bound without variable");
      const int j = variable(line[k++].text);
      if (op1 == "<=") {
        lp_.lower[j] = lo;
      } else if (op1 == ">=") {
        lp_.upper[j] = lo;
      } else if (op1 == "=") {
        lp_.lower[j] = lp_.upper[j] = lo;
      } else {
        throw std::runtime_error("bad bound relation");
      }
      if (k < line.size()) {
        const std::string op2 = line[k++].text;
        const double hi = number_at(k);
        if (op2 == "<=") {
          lp_.upper[j] = hi;
        } else if (op2 == ">=") {
          lp_.lower[j] = hi;
        } else {
          throw std::runtime_error("bad bound relation");
        }
      }
    }
    if (k != line.size()) throw std::runtime_error("trailing tokens in bound");
  }

  void read_binary() {
    const Token& t = tokens_[pos_++];
    if (t.kind != Token::kName) throw std::runtime_error("expected a variable name");
    const int j = variable(t.text);
    if (binary_section_) {
      lp_.lower[j] = 0.0;
      lp_.upper[j] = 1.0;
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  LinearProgram lp_;
  std::unordered_map<std::string, int> index_;
  bool have_sense_ = false;
  bool minimize_ = false;
  bool binary_section_ = false;
};

}  // namespace

void write_lp(std::ostream& os, const LinearProgram& lp, std::span<const int> binary_vars) {
  lp.validate();
  const std::vector<std::string> names = column_names(lp);
  os << "\\ " << lp.num_vars << " columns, " << lp.rows.size() << " rows\n";
  // Every column appears in the objective, zeros included, so a reader that
  // numbers columns by first appearance recovers the original order.
  std::vector<Term> dense(lp.num_vars);
  for (int j = 0; j < lp.num_vars; ++j) dense[j] = {j, 0.0};
  for (const Term& t : lp.objective) dense[t.var].coef += t.coef;
  os << "Maximize\n obj:";
  write_terms(os, dense, names);
  os << "\nSubject To\n";
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const Row& row = lp.rows[i];
    os << " c" << i << ':';
    if (row.terms.empty()) {
      os << " 0 " << (lp.num_vars > 0 ? names[0] : "x0");
    } else {
      write_terms(os, row.terms, names);
    }
    os << ' ' << to_string(row.rel) << ' ' << format_number(row.rhs) << '\n';
  }
  os << "Bounds\n";
  for (int j = 0; j < lp.num_vars; ++j) {
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    if (lo == -kInfinity && hi == kInfinity) {
      os << ' ' << names[j] << " free\n";
    } else if (lo == hi) {
      os << ' ' << names[j] << " = " << format_number(lo) << '\n';
    } else {
      os << ' ' << bound_text(lo) << " <= " << names[j] << " <= " << bound_text(hi) << '\n';
    }
  }
  if (!binary_vars.empty()) {
    os << "Binaries\n";
    for (int j : binary_vars) os << ' ' << names.at(j) << '\n';
  }
  os << "End\n";
}

LinearProgram read_lp(std::istream& is) {
  LinearProgram lp = LpReader(tokenize(is)).read();
  lp.validate();
  return lp;
}

}  // namespace mlpoly
