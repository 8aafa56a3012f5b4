#pragma once

#include <string>

namespace sls {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace sls
