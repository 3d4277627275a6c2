// Copyright 2026 The Migrant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MIGRANT_BUNDLED_HPP
#define MIGRANT_BUNDLED_HPP

#include <string_view>

// Copies of the documents under configs/, compiled into the library.
namespace migrant::bundled {

std::string_view grammar();
std::string_view deployment();
std::string_view home_speaker_script();
std::string_view receptionist_robot_script();
std::string_view waiting_display_script();

}  // namespace migrant::bundled

#endif  // MIGRANT_BUNDLED_HPP
