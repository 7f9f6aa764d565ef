#ifndef INTROSPECT_CSV_HPP
#define INTROSPECT_CSV_HPP

#include <string>
#include <string_view>
#include <vector>

namespace introspect::csv {

// Shortest round-trip decimal form, '.' separator regardless of locale.
std::string format(double x);

// Quotes a field when it contains a comma, quote or line break.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

}  // namespace introspect::csv

#endif  // INTROSPECT_CSV_HPP
