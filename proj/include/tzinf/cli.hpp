#pragma once

#include "tzinf/lasso.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace tzinf {

struct Table {
    std::vector<std::string> columns;
    Eigen::MatrixXd values;
};

// Comma- or tab-delimited numeric table with a header row. The delimiter is
// taken from the header line. Throws InputError naming the offending column.
Table read_table(const std::string& text);

namespace cli {

enum ExitCode { ok = 0, input_error = 2, numerical_error = 3 };

// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cli
} // namespace tzinf
