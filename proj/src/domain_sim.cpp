#include "alphafair/domain_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "alphafair/error.hpp"
#include "kernels.hpp"
#include "parallel.hpp"

namespace alphafair {

int ControllerNode::local_index(int route) const {
    auto it = std::lower_bound(routes.begin(), routes.end(), route);
    if (it == routes.end() || *it != route) return -1;
    return static_cast<int>(it - routes.begin());
}

std::vector<long> predicted_overhead(const Partition& partition) {
    std::vector<long> out(partition.num_domains + 1, 0);
    for (const auto& doms : partition.domains_of_route) {
        const long shared = static_cast<long>(doms.size()) - 2;  // other domains, excluding index 0 and self
        if (shared <= 0) continue;
        for (int p : doms) {
            if (p != 0) out[p] += 2 * shared;
        }
    }
    return out;
}

namespace {

double own_partial(const ControllerNode& node, std::size_t i) {
    double part = 0.0;
    for (const auto& c : node.copies[i]) part += node.links[c.owned].z[c.slot];
    return part;
}

double own_min(const ControllerNode& node, std::size_t i) {
    double low = INFINITY;
    for (const auto& c : node.copies[i]) low = std::min(low, node.links[c.owned].z[c.slot]);
    return low;
}

void post_messages(ControllerNode& node, long round) {
    node.outbox.clear();
    for (std::size_t i = 0; i < node.routes.size(); ++i) {
        if (node.domains[i].size() < 2) continue;
        const double part = own_partial(node, i);
        const double low = own_min(node, i);
        for (int d : node.domains[i]) {
            if (d != node.domain) node.outbox.push_back({round, node.routes[i], node.domain, d, part, low});
        }
    }
}

}  // namespace

DomainSimulation::DomainSimulation(const Instance& instance, const Partition& partition, const SolverConfig& config,
                                   bool log_messages)
    : instance_(instance),
      partition_(partition),
      alpha_(instance.alpha),
      workers_(config.workers),
      log_messages_(log_messages) {
    require_valid(instance);
    if (partition.domain_of_link.size() != instance.num_links()) {
        throw InvalidArgument("partition does not match the instance link count");
    }
    if (config.lambda) {
        if (!(*config.lambda > 0.0)) throw InvalidArgument("lambda must be > 0");
        penalty_ = {*config.lambda, config.tau, true};
    } else {
        if (!(instance.alpha > 0.0)) {
            throw InvalidArgument("adaptive lambda is unavailable for alpha = 0; pass an explicit lambda");
        }
        penalty_ = {1.0, config.tau, false};
    }

    const Incidence inc(instance);
    const int P = partition.num_domains;
    nodes_.resize(P);
    for (int p = 1; p <= P; ++p) {
        ControllerNode& node = nodes_[p - 1];
        node.domain = p;
        node.routes = partition.routes_of_domain[p];
        const std::size_t n = node.routes.size();
        node.weight.resize(n);
        node.bottleneck.assign(n, INFINITY);
        node.route_length.resize(n);
        node.domains.resize(n);
        node.copies.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const int r = node.routes[i];
            node.weight[i] = instance.routes[r].weight;
            node.route_length[i] = inc.links_of_route[r].size();
            for (int d : partition.domains_of_route[r]) {
                if (d != 0) node.domains[i].push_back(d);
            }
        }
        for (int j : partition.links_of_domain[p]) {
            ControllerNode::OwnedLink owned;
            owned.link = j;
            owned.capacity = instance.links[j].capacity;
            const auto& routes = inc.routes_of_link[j];
            const double share = detail::equal_share(owned.capacity, routes.size());
            for (std::size_t k = 0; k < routes.size(); ++k) {
                const int li = node.local_index(routes[k]);
                owned.routes.push_back(li);
                node.copies[li].push_back({static_cast<int>(node.links.size()), static_cast<int>(k)});
                node.bottleneck[li] = std::min(node.bottleneck[li], owned.capacity);
            }
            owned.z.assign(routes.size(), share);
            owned.u.assign(routes.size(), 0.0);
            node.links.push_back(std::move(owned));
        }
        node.inbox_z.resize(n);
        node.inbox_z_star.resize(n);
        node.inbox_seen.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            node.inbox_z[i].assign(node.domains[i].size(), 0.0);
            node.inbox_z_star[i].assign(node.domains[i].size(), 0.0);
            node.inbox_seen[i].assign(node.domains[i].size(), 0);
        }
        node.z0.assign(n, 0.0);
        node.u0.assign(n, 0.0);
        node.z_tilde.assign(n, 0.0);
        node.z_star.assign(n, 0.0);
    }

    // Setup exchange: bottleneck capacities of shared routes (min-reduction).
    std::vector<double> bottleneck(instance.num_routes(), INFINITY);
    for (const auto& node : nodes_) {
        for (std::size_t i = 0; i < node.routes.size(); ++i) {
            bottleneck[node.routes[i]] = std::min(bottleneck[node.routes[i]], node.bottleneck[i]);
        }
    }
    for (auto& node : nodes_) {
        for (std::size_t i = 0; i < node.routes.size(); ++i) node.bottleneck[i] = bottleneck[node.routes[i]];
    }

    // Seed the inboxes with what the initial copies would send.
    for (auto& node : nodes_) post_messages(node, 0);
    deliver(nullptr);
    enforce_min();
    for (auto& node : nodes_) {
        node.z0 = node.z_star;
        node.z_tilde = node.z_star;
    }
}

void DomainSimulation::deliver(std::vector<std::map<std::pair<int, int>, long>>* meter) {
    std::map<std::pair<int, int>, long> counts;
    for (auto& node : nodes_) {
        for (const auto& msg : node.outbox) {
            if (keep_ && !keep_(msg)) continue;
            if (msg.to < 1 || msg.to > static_cast<int>(nodes_.size())) {
                throw ProtocolError("round " + std::to_string(msg.round) + ": message for unknown domain " +
                                    std::to_string(msg.to));
            }
            ControllerNode& dest = nodes_[msg.to - 1];
            const int li = dest.local_index(msg.route);
            if (li < 0) {
                throw ProtocolError("round " + std::to_string(msg.round) + ": domain " + std::to_string(msg.to) +
                                    " received route " + std::to_string(msg.route) + " it does not carry");
            }
            const auto& doms = dest.domains[li];
            const auto pos = std::lower_bound(doms.begin(), doms.end(), msg.from) - doms.begin();
            if (pos == static_cast<long>(doms.size()) || doms[pos] != msg.from) {
                throw ProtocolError("round " + std::to_string(msg.round) + ": unexpected sender " +
                                    std::to_string(msg.from) + " for route " + std::to_string(msg.route));
            }
            dest.inbox_z[li][pos] = msg.z;
            dest.inbox_z_star[li][pos] = msg.z_star;
            dest.inbox_seen[li][pos] = 1;
            counts[{msg.from, msg.to}] += 2;
            if (log_messages_) log_.push_back(msg);
        }
        node.outbox.clear();
    }
    if (meter) meter->push_back(std::move(counts));
}

void DomainSimulation::enforce_min() {
    for (auto& node : nodes_) {
        for (std::size_t i = 0; i < node.routes.size(); ++i) {
            double low = own_min(node, i);
            for (std::size_t k = 0; k < node.domains[i].size(); ++k) {
                if (node.domains[i][k] == node.domain) continue;
                if (!node.inbox_seen[i][k]) {
                    throw ProtocolError("round " + std::to_string(round_) + ": missing message for route " +
                                        std::to_string(node.routes[i]) + " from domain " +
                                        std::to_string(node.domains[i][k]));
                }
                low = std::min(low, node.inbox_z_star[i][k]);
            }
            node.z_star[i] = low;
        }
    }
}

void DomainSimulation::run_round() {
    if (!penalty_.frozen) {
        PenaltyTerms terms;
        for (const auto& node : nodes_) {
            terms = combine(terms, penalty_terms(alpha_, node.weight, node.bottleneck, node.z_star));
        }
        const PenaltyState next = adapt_penalty(penalty_, round_, alpha_, terms);
        if (next.lambda != penalty_.lambda) {
            const double ratio = next.lambda / penalty_.lambda;
            for (auto& node : nodes_) {
                for (auto& l : node.links) {
                    for (auto& v : l.u) v *= ratio;
                }
                for (auto& v : node.u0) v *= ratio;
            }
        }
        penalty_ = next;
    }

    const double lambda = penalty_.lambda;
    const long round = round_ + 1;
    std::vector<Residuals> local(nodes_.size());
    detail::parallel_for(nodes_.size(), workers_, [&](std::size_t idx) {
        ControllerNode& node = nodes_[idx];
        double dual = 0.0;
        for (std::size_t i = 0; i < node.routes.size(); ++i) {
            double acc = 0.0;
            for (std::size_t k = 0; k < node.domains[i].size(); ++k) {
                const int q = node.domains[i][k];
                if (q == node.domain) {
                    acc += own_partial(node, i);
                } else {
                    if (!node.inbox_seen[i][k]) {
                        throw ProtocolError("round " + std::to_string(round) + ": missing message for route " +
                                            std::to_string(node.routes[i]) + " from domain " + std::to_string(q));
                    }
                    acc += node.inbox_z[i][k];
                }
            }
            const double zt = detail::consensus_value(acc, node.z0[i], node.route_length[i]);
            dual = std::max(dual, std::abs(zt - node.z_tilde[i]));
            node.z_tilde[i] = zt;
            std::fill(node.inbox_seen[i].begin(), node.inbox_seen[i].end(), 0);
        }
        std::vector<double> scratch;
        double primal = 0.0;
        for (auto& l : node.links) {
            detail::link_update(
                l.capacity, [&](std::size_t k) { return node.z_tilde[l.routes[k]]; }, l.u, l.z, scratch);
            for (std::size_t k = 0; k < l.z.size(); ++k) {
                primal = std::max(primal, std::abs(l.z[k] - node.z_tilde[l.routes[k]]));
            }
        }
        for (std::size_t i = 0; i < node.routes.size(); ++i) {
            detail::route_update(alpha_, node.weight[i], lambda, node.z_tilde[i], node.u0[i], node.z0[i]);
            primal = std::max(primal, std::abs(node.z0[i] - node.z_tilde[i]));
        }
        post_messages(node, round);
        local[idx] = {primal, dual};
    });

    deliver(&meter_.per_round);
    enforce_min();
    residuals_ = {0.0, 0.0};
    for (const auto& r : local) {
        residuals_.primal = std::max(residuals_.primal, r.primal);
        residuals_.dual = std::max(residuals_.dual, r.dual);
    }
    round_ = round;
}

void DomainSimulation::run(long rounds) {
    for (long k = 0; k < rounds; ++k) run_round();
}

void DomainSimulation::inject_weight_update(std::span<const double> weights) {
    if (weights.size() != instance_.num_routes()) throw InvalidArgument("weight vector size mismatch");
    for (std::size_t r = 0; r < weights.size(); ++r) {
        if (!(weights[r] > 0.0) || !std::isfinite(weights[r])) {
            throw InvalidArgument("weight of route " + std::to_string(r) + " must be > 0");
        }
    }
    for (std::size_t r = 0; r < weights.size(); ++r) instance_.routes[r].weight = weights[r];
    for (auto& node : nodes_) {
        for (std::size_t i = 0; i < node.routes.size(); ++i) node.weight[i] = weights[node.routes[i]];
    }
}

SolverState DomainSimulation::global_state() const {
    SolverState s;
    const std::size_t n_routes = instance_.num_routes();
    s.z_links.resize(instance_.num_links());
    s.u_links.resize(instance_.num_links());
    s.z0.assign(n_routes, NAN);
    s.u0.assign(n_routes, NAN);
    s.z_tilde.assign(n_routes, NAN);
    s.z_star.assign(n_routes, NAN);
    std::vector<char> filled(n_routes, 0);
    for (const auto& node : nodes_) {
        for (const auto& l : node.links) {
            s.z_links[l.link] = l.z;
            s.u_links[l.link] = l.u;
        }
        for (std::size_t i = 0; i < node.routes.size(); ++i) {
            const int r = node.routes[i];
            if (filled[r]) continue;
            filled[r] = 1;
            s.z0[r] = node.z0[i];
            s.u0[r] = node.u0[i];
            s.z_tilde[r] = node.z_tilde[i];
            s.z_star[r] = node.z_star[i];
        }
    }
    s.iteration = round_;
    s.penalty = penalty_;
    s.residuals = residuals_;
    return s;
}

bool DomainSimulation::replicas_agree() const {
    const SolverState s = global_state();
    for (const auto& node : nodes_) {
        for (std::size_t i = 0; i < node.routes.size(); ++i) {
            const int r = node.routes[i];
            if (node.z0[i] != s.z0[r] || node.u0[i] != s.u0[r] || node.z_tilde[i] != s.z_tilde[r] ||
                node.z_star[i] != s.z_star[r]) {
                return false;
            }
        }
    }
    return true;
}

OverheadReport DomainSimulation::measure_overhead() const {
    OverheadReport rep;
    rep.rounds = static_cast<long>(meter_.per_round.size());
    rep.per_domain.assign(partition_.num_domains + 1, 0);
    rep.predicted_per_round = predicted_overhead(partition_);
    rep.matches_prediction = true;
    for (const auto& round : meter_.per_round) {
        std::vector<long> sent(partition_.num_domains + 1, 0);
        for (const auto& [pair, floats] : round) {
            rep.per_pair[pair] += floats;
            sent[pair.first] += floats;
        }
        for (std::size_t p = 1; p < sent.size(); ++p) {
            rep.per_domain[p] += sent[p];
            rep.total += sent[p];
            if (sent[p] != rep.predicted_per_round[p]) rep.matches_prediction = false;
        }
    }
    return rep;
}

void DomainSimulation::write_message_log(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << "round,route,from,to,z,z_star\n";
    char buf[128];
    for (const auto& m : log_) {
        std::snprintf(buf, sizeof buf, "%ld,%d,%d,%d,%.17g,%.17g\n", m.round, m.route, m.from, m.to, m.z, m.z_star);
        out << buf;
    }
}

}  // namespace alphafair
