#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "epsrob/gadget.hpp"

namespace epsrob {

/// DIMACS CNF: "c" comment lines, a "p cnf <vars> <clauses>" header, then
/// clauses as signed 1-based integers each terminated by 0. A trailing "%"
/// line (SATLIB style) ends the input. Throws ParseError.
CnfFormula parse_dimacs(std::string_view text);
CnfFormula load_dimacs_file(const std::filesystem::path& path);

std::string write_dimacs(const CnfFormula& cnf);

}  // namespace epsrob
