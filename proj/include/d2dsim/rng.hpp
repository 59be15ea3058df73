/**
 * \file d2dsim/rng.hpp
 *
 * \brief Seed derivation for order-independent per-drop random streams.
 *
 * Copyright 2026 the d2dsim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef D2DSIM_RNG_HPP
#define D2DSIM_RNG_HPP

#include <cstdint>
#include <random>

namespace d2dsim {

/// One round of the splitmix64 output function (Steele, Lea & Flood).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/**
 * \brief Derives the seed of drop \p drop_index from the master seed.
 *
 * The derivation is a fixed counter-based mix, so the streams of distinct
 * drops are independent of the order in which drops are executed.
 */
inline std::uint64_t drop_seed(std::uint64_t master_seed, std::uint64_t drop_index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(drop_index + 1));
}

inline std::mt19937_64 drop_rng(std::uint64_t master_seed, std::uint64_t drop_index) {
    return std::mt19937_64(drop_seed(master_seed, drop_index));
}

} // namespace d2dsim

#endif // D2DSIM_RNG_HPP
