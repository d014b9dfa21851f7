// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>

// Data files compiled into the library (see data/).
namespace housebot::resources {

std::string_view catalog_csv();
std::string_view prompts_json();
std::string_view eip_example_json();
std::string_view fetch_golden_jsonl();
std::string_view report_schema_json();

} // namespace housebot::resources
