#pragma once

#include <ostream>

namespace similab::cli {

/// Fast invariant suite behind 'similab check'.  Returns the number of failures.
int run_checks(std::ostream& out);

}  // namespace similab::cli
