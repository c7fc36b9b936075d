#include "epsrob/dimacs.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "epsrob/error.hpp"

namespace epsrob {
namespace {

long long parse_integer(std::string_view token, std::size_t line) {
  long long value = 0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || end != token.data() + token.size())
    throw ParseError("line " + std::to_string(line) + ": expected an integer, got '" + std::string(token) + "'");
  return value;
}

}  // namespace

CnfFormula parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  long long declared_clauses = 0;
  CnfFormula cnf;
  Clause current;

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string first;
    if (!(tokens >> first)) continue;
    if (first == "c") continue;
    if (first == "%") break;
    if (first == "p") {
      if (have_header) throw ParseError("line " + std::to_string(line_no) + ": duplicate header");
      std::string format, vars, clauses, extra;
      if (!(tokens >> format >> vars >> clauses) || format != "cnf" || (tokens >> extra))
        throw ParseError("line " + std::to_string(line_no) + ": malformed header, expected 'p cnf <vars> <clauses>'");
      const long long n = parse_integer(vars, line_no);
      declared_clauses = parse_integer(clauses, line_no);
      if (n <= 0 || declared_clauses < 0)
        throw ParseError("line " + std::to_string(line_no) + ": header needs vars >= 1 and clauses >= 0");
      cnf.num_variables = static_cast<std::size_t>(n);
      have_header = true;
      continue;
    }
    if (!have_header) throw ParseError("line " + std::to_string(line_no) + ": clause data before 'p cnf' header");

    std::string token = first;
    do {
      const long long lit = parse_integer(token, line_no);
      if (lit == 0) {
        if (current.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty clause");
        cnf.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      const unsigned long long var = static_cast<unsigned long long>(lit < 0 ? -lit : lit);
      if (var > cnf.num_variables)
        throw ParseError("line " + std::to_string(line_no) + ": variable " + std::to_string(var) +
                         " exceeds declared count " + std::to_string(cnf.num_variables));
      current.push_back(Literal{static_cast<std::size_t>(var - 1), lit < 0});
    } while (tokens >> token);
  }

  if (!have_header) throw ParseError("missing 'p cnf' header");
  if (!current.empty()) cnf.clauses.push_back(std::move(current));
  if (static_cast<long long>(cnf.clauses.size()) != declared_clauses)
    throw ParseError("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                     std::to_string(cnf.clauses.size()));
  return cnf;
}

CnfFormula load_dimacs_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open DIMACS file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_dimacs(text);
}

std::string write_dimacs(const CnfFormula& cnf) {
  std::ostringstream out;
  out << "p cnf " << cnf.num_variables << ' ' << cnf.clauses.size() << '\n';
  for (const Clause& clause : cnf.clauses) {
    for (const Literal& lit : clause) out << (lit.negated ? "-" : "") << lit.variable + 1 << ' ';
    out << "0\n";
  }
  return out.str();
}

}  // namespace epsrob
