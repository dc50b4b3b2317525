#pragma once

#include "doctest.h"
#include "symflow/expr.hpp"

namespace doctest {
template <>
struct StringMaker<symflow::Expr> {
    static String convert(const symflow::Expr& e) { return symflow::to_string(e).c_str(); }
};
}  // namespace doctest
