#pragma once

#include <string>

#include "stf/model/ast.hpp"

namespace stf {

/// Canonical text: four-space indentation, one declaration or statement per
/// line, minimal parentheses. Default-valued DA options are omitted.
std::string pretty_print(const Model& m);

std::string print_expr(const Expr& e);
std::string print_literal(const Value& v);

}  // namespace stf
