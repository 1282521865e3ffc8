// Copyright 2026 The trackfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TRACKFUSE__ERRORS_HPP_
#define TRACKFUSE__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace trackfuse
{

class FrameRegressionError : public std::runtime_error
{
public:
  FrameRegressionError(int last, int requested)
  : std::runtime_error(
      "frame regression: requested frame " + std::to_string(requested) +
      " is not after frame " + std::to_string(last))
  {
  }
};

class StaleTrackletError : public std::runtime_error
{
public:
  explicit StaleTrackletError(long long id)
  : std::runtime_error("stale tracklet: id " + std::to_string(id) + " is not alive")
  {
  }
};

/// Invalid input data or configuration. Maps to CLI exit code 2.
class SchemaError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// File system failure. Maps to CLI exit code 3.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace trackfuse

#endif  // TRACKFUSE__ERRORS_HPP_
