/**
 * \file d2dsim/powerctl.hpp
 *
 * \brief SINR/capacity evaluation over an allocated drop and the five power
 *        control schemes, including the distributed utility-maximizing one.
 *
 * The utility maximizer trades sum log-rate against total transmit power
 * (weight omega). It runs an outer ascent on per-route SINR targets in log
 * domain, each step realized by a multiplicative target-tracking inner loop
 * that uses only quantities a link can measure locally: its own SINR, its
 * own target and its own power.
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

#ifndef D2DSIM_POWERCTL_HPP
#define D2DSIM_POWERCTL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <d2dsim/geometry.hpp>
#include <d2dsim/resalloc.hpp>
#include <d2dsim/routing.hpp>
#include <d2dsim/units.hpp>

namespace d2dsim {

enum class PcScheme { Fix, FixSnr, OpenLoop, ClosedLoop, UtilityMax };

/// Which power-control column a link follows under the LTE-style schemes.
enum class PcClass {
    CellularColumn, ///< transmissions received by a BS
    D2dColumn,      ///< device-to-device transmissions
    FixedBs,        ///< BS hops: constant power, never optimized
};

struct PcParams {
    double fixed_power_dbm = -10.0;
    double p0_dbm = -10.0;
    double alpha = 0.8;
    double sinr_target_db = 15.0;
    double cl_step_db = 1.0;
    double cl_deadzone_db = 0.5;
    double ue_pmin_dbm = -23.0;
    double ue_pmax_dbm = 23.0;
    double bs_power_dbm = 40.0;
};

struct UmConfig {
    double omega = 1.0;
    int outer_iters = 70;
    int inner_iters = 10;
    double epsilon = 0.05; ///< outer loop stops below this relative target change
    double p_init_dbm = 10.0;
    double gamma_tgt_init_db = 0.0;
    double step_size = 0.5;
    int max_step_halvings = 5;
};

inline void validate(const UmConfig& c) {
    if (c.omega <= 0 || c.epsilon <= 0 || c.step_size <= 0)
        throw std::invalid_argument("um: omega, epsilon and step_size must be positive");
    if (c.outer_iters < 1 || c.inner_iters < 1)
        throw std::invalid_argument("um: iteration counts must be >= 1");
}

/// Per-link radio environment, fixed for the duration of a drop.
struct LinkRadio {
    double gain = 0.0;       ///< desired-link effective linear gain
    double gain_ls_db = 0.0; ///< desired-link large-scale gain in dB
    int resource = -1;
    double p_min_w = 0.0;
    double p_max_w = 0.0;
    bool controllable = true; ///< false for fixed-power BS hops
    PcClass pc_class = PcClass::D2dColumn;
    int route = -1;
    int hop = -1;
};

/**
 * \brief Immutable per-drop state shared by every power-control scheme:
 *        allocated routes, per-link radio data and per-resource cross gains.
 */
struct DropEnv {
    RoutingMatrix rm;
    std::vector<LinkRadio> radio;
    std::vector<std::vector<int>> links_on_resource;
    std::vector<std::vector<double>> cross_gain; ///< per resource, n_q x n_q row-major
    const Deployment* dep = nullptr;              ///< optional, for generic receivers
    double noise_w = 0.0;
    double rb_bw_hz = 180e3;

    int num_links() const { return rm.num_links; }
};

inline DropEnv build_drop_env(const Deployment& dep, const RoutingMatrix& rm,
                              const std::vector<LinkRole>& roles, const ChannelParams& chan,
                              const PcParams& pc) {
    DropEnv env;
    env.rm = rm;
    env.dep = &dep;
    env.noise_w = dbm_to_watt(chan.noise_per_rb_dbm);
    env.rb_bw_hz = chan.rb_bandwidth_hz;
    env.radio.resize(rm.num_links);
    env.links_on_resource.assign(rm.num_resources, {});

    for (std::size_t i = 0; i < rm.routes.size(); ++i) {
        const Route& r = rm.routes[i];
        for (int h = 0; h < hops(r); ++h) {
            const auto [l, q] = hop_link_resource(r, h);
            LinkRadio& lr = env.radio[l];
            const Link& lk = rm.links[l];
            lr.gain = dep.gain(lk.tx_node, lk.rx_node);
            lr.gain_ls_db = dep.gain_large_scale_db(lk.tx_node, lk.rx_node);
            lr.resource = q;
            lr.route = static_cast<int>(i);
            lr.hop = h;
            if (roles[l] == LinkRole::BsDownlink) {
                lr.controllable = false;
                lr.pc_class = PcClass::FixedBs;
                lr.p_min_w = lr.p_max_w = dbm_to_watt(pc.bs_power_dbm);
            } else {
                lr.controllable = true;
                lr.p_min_w = dbm_to_watt(pc.ue_pmin_dbm);
                lr.p_max_w = dbm_to_watt(pc.ue_pmax_dbm);
                lr.pc_class = (dep.nodes[lk.rx_node].kind == NodeKind::BaseStation)
                                  ? PcClass::CellularColumn
                                  : PcClass::D2dColumn;
            }
            env.links_on_resource[q].push_back(l);
        }
    }
    env.cross_gain.resize(rm.num_resources);
    for (int q = 0; q < rm.num_resources; ++q) {
        const auto& ls = env.links_on_resource[q];
        auto& cg = env.cross_gain[q];
        cg.resize(ls.size() * ls.size());
        for (std::size_t a = 0; a < ls.size(); ++a) {
            for (std::size_t b = 0; b < ls.size(); ++b) {
                cg[a * ls.size() + b] = dep.gain(rm.links[ls[b]].tx_node, rm.links[ls[a]].rx_node);
            }
        }
    }
    return env;
}

/// Total power received at \p rx_node on resource \p q, desired link included.
inline double received_total_power(const DropEnv& env, const std::vector<double>& p_w,
                                   int rx_node, int q) {
    double total = 0.0;
    for (int l : env.links_on_resource[q]) {
        total += env.dep->gain(env.rm.links[l].tx_node, rx_node) * p_w[l];
    }
    return total;
}

/**
 * \brief Achieved SINR of every link: desired received power over noise plus
 *        the total received power net of the desired contribution.
 */
inline std::vector<double> all_sinrs(const DropEnv& env, const std::vector<double>& p_w) {
    std::vector<double> out(env.num_links(), 0.0);
    for (std::size_t q = 0; q < env.links_on_resource.size(); ++q) {
        const auto& ls = env.links_on_resource[q];
        const auto& cg = env.cross_gain[q];
        const std::size_t n = ls.size();
        for (std::size_t a = 0; a < n; ++a) {
            const double own = cg[a * n + a] * p_w[ls[a]];
            if (own <= 0.0) { out[ls[a]] = 0.0; continue; }
            double interference = 0.0;
            for (std::size_t b = 0; b < n; ++b) {
                if (b != a) interference += cg[a * n + b] * p_w[ls[b]];
            }
            out[ls[a]] = own / (env.noise_w + interference);
        }
    }
    return out;
}

inline double link_sinr(const DropEnv& env, const std::vector<double>& p_w, int link) {
    return all_sinrs(env, p_w)[link];
}

/// Shannon capacity of one resource block: w * log2(1 + gamma).
inline double capacity(double gamma, double w_hz) {
    return w_hz * std::log2(1.0 + gamma);
}

/// End-to-end rate per route: the minimum hop capacity sustains the flow.
inline std::vector<double> route_rates(const RoutingMatrix& rm,
                                       const std::vector<double>& link_capacity) {
    std::vector<double> s(rm.routes.size(), 0.0);
    for (std::size_t i = 0; i < rm.routes.size(); ++i) {
        double m = std::numeric_limits<double>::infinity();
        for (int l : rm.routes[i].hop_links) m = std::min(m, link_capacity[l]);
        s[i] = m;
    }
    return s;
}

inline std::vector<double> link_capacities(const DropEnv& env, const std::vector<double>& sinr) {
    std::vector<double> c(env.num_links());
    for (int l = 0; l < env.num_links(); ++l) c[l] = capacity(sinr[l], env.rb_bw_hz);
    return c;
}

/// Fractional-pathloss-compensating open loop: min(Pmax, P0 + 10 log10 M + alpha * PL).
inline double pc_lte_open_loop(double pl_db, int m_rbs, double p0_dbm, double alpha,
                               double pmax_dbm, double pmin_dbm) {
    const double p = p0_dbm + 10.0 * std::log10(static_cast<double>(m_rbs)) + alpha * pl_db;
    return clamp_dbm(std::min(p, pmax_dbm), pmin_dbm, pmax_dbm);
}

inline double pc_lte_open_loop(double pl_db, const PcParams& pc) {
    return pc_lte_open_loop(pl_db, 1, pc.p0_dbm, pc.alpha, pc.ue_pmax_dbm, pc.ue_pmin_dbm);
}

/// Fixed-power scheme: constant for device links, open loop for cellular ones.
inline double pc_fixed(PcClass cls, double pl_db, const PcParams& pc) {
    if (cls == PcClass::CellularColumn) return pc_lte_open_loop(pl_db, pc);
    return clamp_dbm(pc.fixed_power_dbm, pc.ue_pmin_dbm, pc.ue_pmax_dbm);
}

/// Noise-only target inversion P = gamma_tgt * sigma / g, clamped to bounds.
inline double pc_fixed_snr(double gamma_tgt_db, double g_linear, double sigma_w,
                           double pmin_dbm, double pmax_dbm) {
    if (g_linear <= 0.0) throw std::domain_error("pc_fixed_snr: gain must be positive");
    const double p_dbm = watt_to_dbm(db_to_linear(gamma_tgt_db) * sigma_w / g_linear);
    return clamp_dbm(p_dbm, pmin_dbm, pmax_dbm);
}

/// One closed-loop correction: +-step toward the target outside the dead zone.
inline double pc_lte_closed_loop_step(double p_dbm, double achieved_db, double target_db,
                                      const PcParams& pc) {
    if (achieved_db < target_db - pc.cl_deadzone_db) p_dbm += pc.cl_step_db;
    else if (achieved_db > target_db + pc.cl_deadzone_db) p_dbm -= pc.cl_step_db;
    return clamp_dbm(p_dbm, pc.ue_pmin_dbm, pc.ue_pmax_dbm);
}

/// Powers with fixed links at their constant value, others at \p dbm (clamped).
inline std::vector<double> initial_powers(const DropEnv& env, double dbm) {
    std::vector<double> p(env.num_links());
    for (int l = 0; l < env.num_links(); ++l) {
        const LinkRadio& lr = env.radio[l];
        p[l] = lr.controllable ? std::clamp(dbm_to_watt(dbm), lr.p_min_w, lr.p_max_w)
                               : lr.p_max_w;
    }
    return p;
}

/**
 * \brief The four LTE-style schemes. Fix/FixSnr/OpenLoop are one-shot;
 *        ClosedLoop starts from the open-loop point and then steps the
 *        device links toward the SINR target for \p cl_iters rounds.
 */
inline std::vector<double> lte_powers(const DropEnv& env, PcScheme scheme, const PcParams& pc,
                                      int cl_iters = 10) {
    std::vector<double> p(env.num_links());
    for (int l = 0; l < env.num_links(); ++l) {
        const LinkRadio& lr = env.radio[l];
        if (!lr.controllable) { p[l] = lr.p_max_w; continue; }
        const double pl_db = -lr.gain_ls_db;
        double dbm = 0.0;
        switch (scheme) {
            case PcScheme::Fix:
                dbm = pc_fixed(lr.pc_class, pl_db, pc);
                break;
            case PcScheme::FixSnr:
                dbm = (lr.pc_class == PcClass::CellularColumn)
                          ? pc_lte_open_loop(pl_db, pc)
                          : pc_fixed_snr(pc.sinr_target_db, lr.gain, env.noise_w,
                                         pc.ue_pmin_dbm, pc.ue_pmax_dbm);
                break;
            case PcScheme::OpenLoop:
            case PcScheme::ClosedLoop:
                dbm = pc_lte_open_loop(pl_db, pc);
                break;
            case PcScheme::UtilityMax:
                throw std::invalid_argument("lte_powers: utility scheme is um_solve");
        }
        p[l] = dbm_to_watt(dbm);
    }
    if (scheme == PcScheme::ClosedLoop) {
        for (int it = 0; it < cl_iters; ++it) {
            const std::vector<double> sinr = all_sinrs(env, p);
            for (int l = 0; l < env.num_links(); ++l) {
                const LinkRadio& lr = env.radio[l];
                if (!lr.controllable || lr.pc_class != PcClass::D2dColumn) continue;
                const double dbm = pc_lte_closed_loop_step(
                    watt_to_dbm(p[l]), linear_to_db(sinr[l]), pc.sinr_target_db, pc);
                p[l] = dbm_to_watt(dbm);
            }
        }
    }
    return p;
}

/**
 * \brief Distributed target-tracking inner loop: the synchronous
 *        multiplicative update P <- clamp(P * target / achieved) on every
 *        controllable link, \p iters times.
 *
 * Converges from below to the minimal power meeting feasible targets and
 * saturates at the power cap when targets are infeasible.
 */
inline std::vector<double> zander_inner_loop(const DropEnv& env, std::vector<double> p_w,
                                             const std::vector<double>& route_targets,
                                             int iters) {
    for (int it = 0; it < iters; ++it) {
        const std::vector<double> sinr = all_sinrs(env, p_w);
        for (int l = 0; l < env.num_links(); ++l) {
            const LinkRadio& lr = env.radio[l];
            if (!lr.controllable) continue;
            const double tgt = route_targets[lr.route];
            const double next = (sinr[l] > 0.0) ? p_w[l] * tgt / sinr[l] : lr.p_max_w;
            p_w[l] = std::clamp(next, lr.p_min_w, lr.p_max_w);
        }
    }
    return p_w;
}

struct UmResult {
    std::vector<double> targets;         ///< per route, linear SINR
    std::vector<double> powers_w;        ///< per link
    std::vector<double> rates_bps;       ///< per route
    std::vector<double> duals;           ///< per route, marginal utility of the binding hop
    std::vector<double> objective_trace; ///< realized objective per outer iteration
    int outer_iters_used = 0;
    bool failed = false;
};

namespace detail {

/// d ln(rate) / d ln(target) for rate = W log2(1 + target).
inline double um_utility_slope(double gamma) {
    const double l1p = std::log1p(gamma);
    return gamma / ((1.0 + gamma) * l1p);
}

/// Negated second derivative of the same term; positive for gamma > 0.
inline double um_utility_curvature(double gamma) {
    const double l1p = std::log1p(gamma);
    const double d = (1.0 + gamma) * l1p;
    return gamma * (gamma - l1p) / (d * d);
}

} // namespace detail

/**
 * \brief Utility-maximizing power control for one drop.
 *
 * Outer loop: projected ascent on per-route log SINR targets, gradient
 * scaled by the analytic diagonal curvature and backtracked on objective
 * decrease. All hops of a route share one target; the gradient uses the
 * frozen-interference power sensitivity dP/d(ln target) = P, and the target
 * is projected into the box of values realizable within the power bounds as
 * estimated from the link's own measurements. Routes whose rate is capped
 * by an uncontrollable hop receive no utility push. Inner loop:
 * zander_inner_loop() warm-started from the previous powers. Dual prices
 * are read off as the marginal utility 1/s_i of the binding hop constraint.
 *
 * A non-finite objective triggers one restart from the initial state; a
 * second occurrence flags the drop as failed.
 */
inline UmResult um_solve(const DropEnv& env, const UmConfig& cfg) {
    validate(cfg);
    const std::size_t n_routes = env.rm.routes.size();
    UmResult res;
    res.targets.assign(n_routes, db_to_linear(cfg.gamma_tgt_init_db));
    res.powers_w = initial_powers(env, cfg.p_init_dbm);
    if (n_routes == 0) return res;

    const double log_tgt_min = std::log(1e-7);
    const double log_tgt_max = std::log(1e7);

    std::vector<double> x(n_routes, cfg.gamma_tgt_init_db * std::log(10.0) / 10.0);
    std::vector<double> p = res.powers_w;

    // per-route list of controllable hop links
    std::vector<std::vector<int>> ctrl_links(n_routes);
    for (int l = 0; l < env.num_links(); ++l) {
        if (env.radio[l].controllable) ctrl_links[env.radio[l].route].push_back(l);
    }

    auto realized_objective = [&](const std::vector<double>& pw,
                                  const std::vector<double>& rates) {
        double obj = 0.0;
        for (double s : rates) obj += std::log(s);
        for (int l = 0; l < env.num_links(); ++l) {
            if (env.radio[l].controllable) obj -= cfg.omega * pw[l];
        }
        return obj;
    };

    bool restarted = false;
    std::vector<double> sinr, caps, rates;
    double obj = 0.0;

    auto realize = [&](const std::vector<double>& from_p, const std::vector<double>& targets) {
        std::vector<double> pw = zander_inner_loop(env, from_p, targets, cfg.inner_iters);
        return pw;
    };

    // initial realization
    for (;;) {
        std::vector<double> targets(n_routes);
        for (std::size_t i = 0; i < n_routes; ++i) targets[i] = std::exp(x[i]);
        p = realize(p, targets);
        sinr = all_sinrs(env, p);
        caps = link_capacities(env, sinr);
        rates = route_rates(env.rm, caps);
        obj = realized_objective(p, rates);
        if (std::isfinite(obj)) break;
        if (restarted) {
            res.failed = true;
            return res;
        }
        restarted = true;
        x.assign(n_routes, cfg.gamma_tgt_init_db * std::log(10.0) / 10.0);
        p = initial_powers(env, cfg.p_init_dbm);
    }
    res.objective_trace.push_back(obj);

    int outer = 0;
    for (; outer < cfg.outer_iters; ++outer) {
        // gradient and curvature per route
        std::vector<double> dir(n_routes, 0.0), lo(n_routes), hi(n_routes);
        for (std::size_t i = 0; i < n_routes; ++i) {
            const Route& r = env.rm.routes[i];
            const double tgt = std::exp(x[i]);

            int binding = r.hop_links[0];
            for (int l : r.hop_links) {
                if (caps[l] < caps[binding]) binding = l;
            }
            const bool binding_ctrl = env.radio[binding].controllable;

            double pow_sum = 0.0;
            for (int l : ctrl_links[i]) pow_sum += p[l];

            const double g = (binding_ctrl ? detail::um_utility_slope(tgt) : 0.0) -
                             cfg.omega * pow_sum;
            const double h = cfg.omega * pow_sum + detail::um_utility_curvature(tgt);
            dir[i] = std::clamp(g / std::max(h, 1e-12), -4.0, 4.0);

            // realizable-target box from local measurements, frozen interference
            double cap_x = log_tgt_max, floor_x = log_tgt_min;
            for (int l : ctrl_links[i]) {
                if (sinr[l] > 0.0 && p[l] > 0.0) {
                    cap_x = std::min(cap_x, std::log(sinr[l] * env.radio[l].p_max_w / p[l]));
                    floor_x = std::max(floor_x, std::log(sinr[l] * env.radio[l].p_min_w / p[l]));
                }
            }
            cap_x = std::clamp(cap_x, log_tgt_min, log_tgt_max);
            floor_x = std::clamp(std::min(floor_x, cap_x), log_tgt_min, log_tgt_max);
            lo[i] = floor_x;
            hi[i] = cap_x;
        }

        // backtracking line search on the realized objective
        double step = cfg.step_size;
        std::vector<double> x_acc, p_acc, sinr_acc, caps_acc, rates_acc;
        double obj_acc = -std::numeric_limits<double>::infinity();
        bool have_acc = false;
        for (int attempt = 0; attempt <= cfg.max_step_halvings; ++attempt, step /= 2.0) {
            std::vector<double> xn(n_routes), tn(n_routes);
            for (std::size_t i = 0; i < n_routes; ++i) {
                xn[i] = std::clamp(x[i] + step * dir[i], lo[i], hi[i]);
                tn[i] = std::exp(xn[i]);
            }
            std::vector<double> pn = realize(p, tn);
            std::vector<double> sn = all_sinrs(env, pn);
            std::vector<double> cn = link_capacities(env, sn);
            std::vector<double> rn = route_rates(env.rm, cn);
            const double on = realized_objective(pn, rn);
            if (!std::isfinite(on)) continue;
            x_acc = std::move(xn);
            p_acc = std::move(pn);
            sinr_acc = std::move(sn);
            caps_acc = std::move(cn);
            rates_acc = std::move(rn);
            obj_acc = on;
            have_acc = true;
            if (on >= obj) break;
        }
        if (!have_acc) {
            if (restarted) {
                res.failed = true;
                return res;
            }
            restarted = true;
            x.assign(n_routes, cfg.gamma_tgt_init_db * std::log(10.0) / 10.0);
            p = initial_powers(env, cfg.p_init_dbm);
            std::vector<double> targets(n_routes);
            for (std::size_t i = 0; i < n_routes; ++i) targets[i] = std::exp(x[i]);
            p = realize(p, targets);
            sinr = all_sinrs(env, p);
            caps = link_capacities(env, sinr);
            rates = route_rates(env.rm, caps);
            obj = realized_objective(p, rates);
            if (!std::isfinite(obj)) {
                res.failed = true;
                return res;
            }
            continue;
        }

        double max_rel = 0.0;
        for (std::size_t i = 0; i < n_routes; ++i) {
            const double prev = std::exp(x[i]);
            max_rel = std::max(max_rel, std::abs(std::exp(x_acc[i]) - prev) / prev);
        }
        x = std::move(x_acc);
        p = std::move(p_acc);
        sinr = std::move(sinr_acc);
        caps = std::move(caps_acc);
        rates = std::move(rates_acc);
        obj = obj_acc;
        res.objective_trace.push_back(obj);
        if (max_rel < cfg.epsilon) {
            ++outer;
            break;
        }
    }

    res.outer_iters_used = outer;
    res.powers_w = p;
    res.rates_bps = rates;
    for (std::size_t i = 0; i < n_routes; ++i) res.targets[i] = std::exp(x[i]);
    res.duals.resize(n_routes);
    for (std::size_t i = 0; i < n_routes; ++i) {
        res.duals[i] = (rates[i] > 0.0) ? 1.0 / rates[i] : std::numeric_limits<double>::infinity();
    }
    return res;
}

} // namespace d2dsim

#endif // D2DSIM_POWERCTL_HPP
