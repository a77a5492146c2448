#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edla {

// Graph files compiled into the library (see data/). Generated at build time.
std::optional<std::string_view> bundled_dataset_text(std::string_view name);
std::vector<std::string> detail_bundled_names();

}  // namespace edla
