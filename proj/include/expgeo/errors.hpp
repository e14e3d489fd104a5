#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The expgeo Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <stdexcept>
#include <string>

namespace expgeo {

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Operands live on different sample spaces, or vectors have mismatched bases.
class DimensionError : public Error
{
public:
  using Error::Error;
};

// A precondition on an input value does not hold (non-positive density,
// uncentered variable, bad arity, malformed configuration).
class DomainError : public Error
{
public:
  using Error::Error;
};

// The computation itself failed: overflow guard tripped, a root bracket could
// not be found, a tolerance was not met.
class NumericError : public Error
{
public:
  using Error::Error;
};

}  // namespace expgeo
