#pragma once

#include <string>

#include "dpfb/ast.hpp"

namespace dpfb::corpus {

std::string corpus_path(const std::string& name);
std::string read(const std::string& name);
Program load(const std::string& name);

}  // namespace dpfb::corpus
