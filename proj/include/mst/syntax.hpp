#pragma once

#include <string>

#include "mst/process.hpp"
#include "mst/types.hpp"

namespace mst {

struct ParseOptions {
  // Accept names produced by the decompositions: c@k, cr@k, cr@name,
  // crX@X, _name, #serial, and indexed or dual binders.
  bool generated = false;
};

ProcPtr parse_process(const std::string& text, ParseOptions opts = {});
STypePtr parse_session_type(const std::string& text);
VTypePtr parse_value_type(const std::string& text);
ValuePtr parse_value(const std::string& text, ParseOptions opts = {});
Name parse_name(const std::string& text, ParseOptions opts = {});

std::string print_process(const ProcPtr& p);
std::string print_value(const ValuePtr& v);
std::string print_names(const std::vector<Name>& ns);

}  // namespace mst
