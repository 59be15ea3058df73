/**
 * \file d2dsim/modeselect.hpp
 *
 * \brief Forced and adaptive (harmonic-gain) communication mode selection.
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

#ifndef D2DSIM_MODESELECT_HPP
#define D2DSIM_MODESELECT_HPP

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <d2dsim/geometry.hpp>

namespace d2dsim {

enum class ModeDecision {
    Cellular,     ///< through the serving BS (direct uplink in range extension)
    D2dSingleHop, ///< proximity scenario only
    D2dTwoHop,    ///< via the relay device
};

enum class MsPolicy {
    Cmode, ///< forced cellular
    Dms,   ///< single-hop-vs-cellular (proximity) / forced relaying (range extension)
    Hms,   ///< adaptive, harmonic equivalent gain
};

/**
 * \brief Equivalent gain of a two-hop path: the harmonic combination
 *        1 / (1/g_a + 1/g_b) of the per-hop gains.
 *
 * High only when both hops are high, which is what makes it a usable
 * single-number measure for mode selection.
 */
inline double equivalent_gain(double g_a, double g_b) {
    if (g_a <= 0.0 || g_b <= 0.0)
        throw std::domain_error("equivalent_gain: gains must be strictly positive");
    return 1.0 / (1.0 / g_a + 1.0 / g_b);
}

/// Proximity scenario decision; ties resolve toward the earlier branch.
inline ModeDecision hms_proximity(double g_eq, double g_tx_rx, double g_tx_bs) {
    if (g_eq >= std::max(g_tx_rx, g_tx_bs)) return ModeDecision::D2dTwoHop;
    if (g_tx_rx >= g_tx_bs) return ModeDecision::D2dSingleHop;
    return ModeDecision::Cellular;
}

/// Range-extension decision: relay-assisted wins on g_eq >= g_tx_bs.
inline ModeDecision hms_range_extension(double g_eq, double g_tx_bs) {
    return (g_eq >= g_tx_bs) ? ModeDecision::D2dTwoHop : ModeDecision::Cellular;
}

/**
 * \brief One decision per D2D candidate of the drop, from the large-scale
 *        gains (shadowing included, fast fading excluded).
 */
inline std::vector<ModeDecision> select_modes(MsPolicy policy, const Deployment& dep) {
    std::vector<ModeDecision> out;
    out.reserve(dep.triplets.size());
    for (const auto& t : dep.triplets) {
        const int bs = dep.bs_of_cell[t.cell];
        const double g_tx_bs = dep.gain_large_scale(t.tx, bs);
        ModeDecision d = ModeDecision::Cellular;
        if (dep.scenario == ScenarioKind::ProximityCommunication) {
            const double g_tx_rx = dep.gain_large_scale(t.tx, t.rx);
            switch (policy) {
                case MsPolicy::Cmode:
                    d = ModeDecision::Cellular;
                    break;
                case MsPolicy::Dms:
                    d = (g_tx_rx >= g_tx_bs) ? ModeDecision::D2dSingleHop
                                             : ModeDecision::Cellular;
                    break;
                case MsPolicy::Hms: {
                    const double g_eq = equivalent_gain(dep.gain_large_scale(t.tx, t.relay),
                                                        dep.gain_large_scale(t.relay, t.rx));
                    d = hms_proximity(g_eq, g_tx_rx, g_tx_bs);
                    break;
                }
            }
        } else {
            switch (policy) {
                case MsPolicy::Cmode:
                    d = ModeDecision::Cellular;
                    break;
                case MsPolicy::Dms:
                    d = ModeDecision::D2dTwoHop; // forced relaying
                    break;
                case MsPolicy::Hms: {
                    const double g_eq = equivalent_gain(dep.gain_large_scale(t.tx, t.relay),
                                                        dep.gain_large_scale(t.relay, bs));
                    d = hms_range_extension(g_eq, g_tx_bs);
                    break;
                }
            }
        }
        out.push_back(d);
    }
    return out;
}

} // namespace d2dsim

#endif // D2DSIM_MODESELECT_HPP
