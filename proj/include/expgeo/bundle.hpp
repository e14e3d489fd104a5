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

// Fibers of the tangent, pretangent and Hilbert bundles over a finite space.
//
// On a finite sample space the three fibers at p are the same set, the
// p-centered random variables; they differ by which norm and which transport
// applies. The fiber tag keeps them apart at compile time.

#include "expgeo/space.hpp"

#include <utility>

namespace expgeo {

struct TangentFiber {};     // B_p, exponential Orlicz model
struct PretangentFiber {};  // *B_p, mixture side
struct HilbertFiber {};     // H_p = L^2_0(p)

template <class Fiber>
class BundleVector
{
public:
  explicit BundleVector(CenteredRandomVariable value) : value_(std::move(value)) {}

  BundleVector(const Density& base, const RandomVariable& value)
    : value_(CenteredRandomVariable(base, value))
  {
  }

  static BundleVector zero(const Density& base)
  {
    return BundleVector(CenteredRandomVariable::zero(base));
  }

  const Density& base() const { return value_.base(); }
  const CenteredRandomVariable& centered() const { return value_; }
  const RandomVariable& variable() const { return value_.variable(); }
  std::span<const double> values() const { return value_.values(); }
  double operator[](std::size_t i) const { return value_[i]; }
  std::size_t size() const { return value_.size(); }

private:
  CenteredRandomVariable value_;
};

using TangentVector = BundleVector<TangentFiber>;
using PretangentVector = BundleVector<PretangentFiber>;
using HilbertVector = BundleVector<HilbertFiber>;

}  // namespace expgeo
