#ifndef QBATT_CONFIG_HPP
#define QBATT_CONFIG_HPP

#include <map>
#include <set>
#include <string>

#include "qbatt/types.hpp"

namespace qbatt {

/// Flat `key = value` configuration text: one pair per line, `#` comments,
/// blank lines ignored. Unknown keys are rejected with the key and line
/// number in the message.
std::map<std::string, std::string> parse_config(const std::string& text,
                                                const std::set<std::string>& allowed_keys);

/// Parses a floating-point value; `pi` and `-pi` are accepted as literals.
double parse_real(const std::string& key, const std::string& value);

}  // namespace qbatt

#endif
