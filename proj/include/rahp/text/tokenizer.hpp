#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace rahp::text {

/// Lowercases ASCII letters and splits on whitespace; every ASCII
/// punctuation character becomes its own token. Bytes >= 0x80 are kept
/// inside words.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace rahp::text
