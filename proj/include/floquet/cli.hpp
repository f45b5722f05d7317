#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace floquet::cli {

// exit status: 0 ok, 1 a bound check failed, 2 parse/validation or runtime error
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace floquet::cli
