#include "spectainer/sdpa.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace spectainer {

namespace {

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void append_entries(std::string& out, int matno, const SparseSym& s) {
  for (const auto& e : s.entries) {
    out += std::to_string(matno) + ' ' + std::to_string(e.block + 1) + ' ' +
           std::to_string(e.i + 1) + ' ' + std::to_string(e.j + 1) + ' ';
    append_double(out, e.v);
    out += '\n';
  }
}

struct Token {
  std::string text;
  int line;
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> toks;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '"' || line[first] == '*') continue;
    for (char& ch : line)
      if (ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == ',' || ch == '\r')
        ch = ' ';
    std::istringstream ls(line);
    std::string t;
    while (ls >> t) toks.push_back({t, lineno});
  }
  return toks;
}

class Reader {
 public:
  explicit Reader(std::vector<Token> toks) : toks_(std::move(toks)) {}

  bool done() const { return pos_ >= toks_.size(); }
  int line() const {
    if (toks_.empty()) return 0;
    return pos_ < toks_.size() ? toks_[pos_].line : toks_.back().line;
  }

  long next_int(const char* what) {
    const Token& t = take(what);
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(t.text.c_str(), &end, 10);
    if (errno != 0 || *end != '\0')
      throw ParseError(t.line, std::string("expected integer ") + what +
                                   ", got '" + t.text + "'");
    return v;
  }

  double next_double(const char* what) {
    const Token& t = take(what);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.text.c_str(), &end);
    if (errno == ERANGE || *end != '\0')
      throw ParseError(t.line, std::string("expected number ") + what + ", got '" +
                                   t.text + "'");
    return v;
  }

 private:
  const Token& take(const char* what) {
    if (pos_ >= toks_.size())
      throw ParseError(line(), std::string("unexpected end of input, expected ") +
                                   what);
    return toks_[pos_++];
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

}  // namespace

std::string to_sdpa_string(const SdpProblem& p) {
  std::string out;
  out += std::to_string(p.num_constraints()) + '\n';
  out += std::to_string(p.blocks.size()) + '\n';
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    if (b) out += ' ';
    const int s = p.blocks[b].size;
    out += std::to_string(p.blocks[b].kind == BlockKind::Diagonal ? -s : s);
  }
  out += '\n';
  for (int i = 0; i < p.num_constraints(); ++i) {
    if (i) out += ' ';
    append_double(out, p.b(i));
  }
  out += '\n';
  append_entries(out, 0, p.c);
  for (int i = 0; i < p.num_constraints(); ++i) append_entries(out, i + 1, p.a[i]);
  return out;
}

SdpProblem from_sdpa_string(const std::string& text) {
  Reader r(tokenize(text));
  SdpProblem p;
  const long m = r.next_int("constraint count");
  if (m < 0) throw ParseError(r.line(), "negative constraint count");
  const long nb = r.next_int("block count");
  if (nb < 1) throw ParseError(r.line(), "block count must be positive");
  for (long b = 0; b < nb; ++b) {
    const long s = r.next_int("block size");
    if (s == 0) throw ParseError(r.line(), "zero block size");
    p.blocks.push_back({static_cast<int>(s < 0 ? -s : s),
                        s < 0 ? BlockKind::Diagonal : BlockKind::Psd});
  }
  p.b = Vector(m);
  for (long i = 0; i < m; ++i) p.b(i) = r.next_double("objective coefficient");
  p.a.resize(m);
  while (!r.done()) {
    const int at = r.line();
    const long matno = r.next_int("matrix number");
    const long blk = r.next_int("block number");
    const long i = r.next_int("row index");
    const long j = r.next_int("column index");
    const double v = r.next_double("entry value");
    if (matno < 0 || matno > m) throw ParseError(at, "matrix number out of range");
    if (blk < 1 || blk > nb) throw ParseError(at, "block number out of range");
    const int size = p.blocks[blk - 1].size;
    if (i < 1 || j < 1 || i > size || j > size)
      throw ParseError(at, "entry index outside its block");
    if (p.blocks[blk - 1].kind == BlockKind::Diagonal && i != j)
      throw ParseError(at, "off-diagonal entry in a diagonal block");
    SparseSym& target = matno == 0 ? p.c : p.a[matno - 1];
    target.add(static_cast<int>(blk - 1), static_cast<int>(i - 1),
               static_cast<int>(j - 1), v);
  }
  p.c.canonicalize();
  for (auto& a : p.a) a.canonicalize();
  return p;
}

void export_sdpa(const SdpProblem& p, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << to_sdpa_string(p);
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

SdpProblem import_sdpa(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return from_sdpa_string(ss.str());
}

}  // namespace spectainer
