/* Copyright 2026 The DOST Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef DOST_JSON_WRITER_H_
#define DOST_JSON_WRITER_H_

#include <string>

#include "json.hpp"

namespace dost {

using Json = nlohmann::ordered_json;

// Serializes `value` with insertion-ordered keys and every floating-point
// number printed as %.17g, so identical inputs give byte-identical text.
// indent < 0 emits a single line. Non-finite floats become null.
std::string to_json_text(const Json& value, int indent = -1);

}  // namespace dost

#endif  // DOST_JSON_WRITER_H_
