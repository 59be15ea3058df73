/**
 * \file d2dsim/units.hpp
 *
 * \brief Decibel/linear/watt conversions used throughout the simulator.
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

#ifndef D2DSIM_UNITS_HPP
#define D2DSIM_UNITS_HPP

#include <algorithm>
#include <cmath>

namespace d2dsim {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

inline double clamp_dbm(double dbm, double lo_dbm, double hi_dbm) {
    return std::clamp(dbm, lo_dbm, hi_dbm);
}

} // namespace d2dsim

#endif // D2DSIM_UNITS_HPP
