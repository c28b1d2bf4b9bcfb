// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace bagchain {

/// Independent seed stream for a named component, derived from the master
/// seed by hashing (master, label, indices). Streams for different labels or
/// indices are unrelated.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::initializer_list<std::uint64_t> indices = {});

}  // namespace bagchain
