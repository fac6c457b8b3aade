#pragma once

#include <string>

namespace bunchkit {

/// Shortest decimal text that reads back as the same double ("nan", "inf"
/// and "-inf" for non-finite values).
std::string format_double(double v);

}  // namespace bunchkit
