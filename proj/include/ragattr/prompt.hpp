#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ragattr/coalition.hpp"
#include "ragattr/types.hpp"

namespace ragattr {

// Renders the prompt for query + the documents in `coalition`. Documents keep
// their position in case.documents and are labelled with that 1-based
// position. Known templates: "default", "bare". Throws ConfigError otherwise.
std::string build_prompt(const QueryCase& c, CoalitionMask coalition, std::string_view template_id = "default");

const std::vector<std::string>& prompt_template_ids();

}  // namespace ragattr
